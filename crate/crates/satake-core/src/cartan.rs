//! Generalized Cartan matrices: validation, symmetrizers, components,
//! the invariant bilinear form and diagram automorphisms.

use std::fmt;

use num::{BigInt, Integer, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{det_rat, kernel_rat};
use crate::scalar::Rat;

/// Whether a (component of a) generalized Cartan matrix is of finite, affine
/// or indefinite type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TypeKind {
    Finite,
    Affine,
    Indefinite,
}

/// The name of one indecomposable diagram, in Dynkin notation with the Kac
/// alias derivable. Stored in canonical form: low-rank coincidences such as
/// B1 = A1, C2 = B2, D3 = A3 are resolved at construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SimpleTypeName {
    /// Finite family letter with its rank, e.g. A4, G2.
    Finite { family: char, rank: usize },
    /// Affine family: `dual` marks the ∨-decoration, `prime` the C′ family.
    Affine { family: char, rank: usize, dual: bool, prime: bool },
    /// Connected but neither finite nor affine.
    Indefinite { size: usize },
    /// The empty diagram.
    Z0,
}

impl SimpleTypeName {
    pub fn finite(family: char, rank: usize) -> Self {
        // low-rank coincidences, canonicalized per the standard tables
        match (family, rank) {
            (_, 0) => SimpleTypeName::Z0,
            ('B', 1) | ('C', 1) | ('D', 1) => SimpleTypeName::Finite { family: 'A', rank: 1 },
            ('B', 2) => SimpleTypeName::Finite { family: 'C', rank: 2 },
            ('D', 3) => SimpleTypeName::Finite { family: 'A', rank: 3 },
            _ => SimpleTypeName::Finite { family, rank },
        }
    }

    pub fn affine(family: char, rank: usize, dual: bool, prime: bool) -> Self {
        match (family, rank, dual, prime) {
            ('B', 1, false, false)
            | ('B', 1, true, false)
            | ('C', 1, false, false)
            | ('C', 1, true, false) => SimpleTypeName::Affine { family: 'A', rank: 1, dual: false, prime: false },
            ('B', 2, d, false) => SimpleTypeName::Affine { family: 'C', rank: 2, dual: d, prime: false },
            ('D', 3, false, false) => SimpleTypeName::Affine { family: 'A', rank: 3, dual: false, prime: false },
            _ => SimpleTypeName::Affine { family, rank, dual, prime },
        }
    }

    pub fn kind(&self) -> TypeKind {
        match self {
            SimpleTypeName::Finite { .. } | SimpleTypeName::Z0 => TypeKind::Finite,
            SimpleTypeName::Affine { .. } => TypeKind::Affine,
            SimpleTypeName::Indefinite { .. } => TypeKind::Indefinite,
        }
    }

    /// Kac notation alias, e.g. `A3(1)` for Â3 and `D4(3)` for Ĝ2∨.
    pub fn kac_alias(&self) -> Option<String> {
        let SimpleTypeName::Affine { family, rank, dual, prime } = self else {
            return None;
        };
        let (fam, r, twist) = match (family, dual, prime) {
            ('A', false, false) => ('A', *rank, 1),
            ('B', false, false) => ('B', *rank, 1),
            ('B', true, false) => ('A', 2 * rank - 1, 2),
            ('C', false, false) => ('C', *rank, 1),
            ('C', true, false) => ('D', rank + 1, 2),
            ('C', false, true) => ('A', 2 * rank, 2),
            ('D', false, false) => ('D', *rank, 1),
            ('E', false, false) => ('E', *rank, 1),
            ('F', false, false) => ('F', 4, 1),
            ('F', true, false) => ('E', 6, 2),
            ('G', false, false) => ('G', 2, 1),
            ('G', true, false) => ('D', 4, 3),
            _ => return None,
        };
        Some(format!("{fam}{r}({twist})"))
    }
}

impl fmt::Display for SimpleTypeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimpleTypeName::Finite { family, rank } => write!(f, "{family}{rank}"),
            SimpleTypeName::Affine { family, rank, dual, prime } => {
                write!(f, "{family}{rank}~")?;
                if *prime {
                    write!(f, "'")?;
                }
                if *dual {
                    write!(f, "v")?;
                }
                Ok(())
            }
            SimpleTypeName::Indefinite { size } => write!(f, "Ind({size})"),
            SimpleTypeName::Z0 => write!(f, "Z0"),
        }
    }
}

/// Type of a (possibly decomposable) sub-diagram: a product of simple names.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LieTypeLabel {
    /// Factors sorted for canonical comparison; empty for the empty set Z0.
    pub factors: Vec<SimpleTypeName>,
}

impl LieTypeLabel {
    pub fn z0() -> Self {
        LieTypeLabel { factors: Vec::new() }
    }

    pub fn simple(name: SimpleTypeName) -> Self {
        LieTypeLabel { factors: vec![name] }
    }

    pub fn product(mut factors: Vec<SimpleTypeName>) -> Self {
        factors.sort_by_key(|t| format!("{t}"));
        LieTypeLabel { factors }
    }

    pub fn kind(&self) -> TypeKind {
        let mut kind = TypeKind::Finite;
        for t in &self.factors {
            match t.kind() {
                TypeKind::Indefinite => return TypeKind::Indefinite,
                TypeKind::Affine => kind = TypeKind::Affine,
                TypeKind::Finite => {}
            }
        }
        kind
    }

    pub fn is_finite(&self) -> bool {
        self.kind() == TypeKind::Finite
    }
}

impl fmt::Display for LieTypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "Z0");
        }
        let parts: Vec<String> = self.factors.iter().map(|t| t.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// An indecomposable (by default) symmetrizable generalized Cartan matrix
/// together with its coprime symmetrizer and node labels.
///
/// Node labels follow the conventions of the catalogue: 1-based for finite
/// families, 0-based for affine families with node 0 the affinizing node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartanMatrix {
    n: usize,
    a: Vec<i64>,
    eps: Vec<i64>,
    labels: Vec<usize>,
}

impl CartanMatrix {
    /// Validates and wraps a generalized Cartan matrix. Rejects decomposable
    /// input; use [`CartanMatrix::new_relaxed`] where products are wanted.
    pub fn new(entries: &[Vec<i64>]) -> Result<Self> {
        let m = Self::new_relaxed(entries)?;
        let comps = m.components(&(0..m.n).collect::<Vec<_>>());
        if comps.len() != 1 && m.n > 0 {
            return Err(Error::Decomposable(comps.len()));
        }
        Ok(m)
    }

    /// Same validation but allowing a decomposable index set. The symmetrizer
    /// is normalized to be coprime on each component.
    pub fn new_relaxed(entries: &[Vec<i64>]) -> Result<Self> {
        let n = entries.len();
        for row in entries {
            if row.len() != n {
                return Err(Error::NotGcm("matrix is not square".into()));
            }
        }
        for i in 0..n {
            if entries[i][i] != 2 {
                return Err(Error::NotGcm(format!("a[{i}][{i}] = {} != 2", entries[i][i])));
            }
            for j in 0..n {
                if i != j {
                    if entries[i][j] > 0 {
                        return Err(Error::NotGcm(format!(
                            "positive off-diagonal entry a[{i}][{j}] = {}",
                            entries[i][j]
                        )));
                    }
                    if (entries[i][j] == 0) != (entries[j][i] == 0) {
                        return Err(Error::NotGcm(format!(
                            "zero pattern asymmetric at ({i},{j})"
                        )));
                    }
                }
            }
        }
        let a: Vec<i64> = entries.iter().flatten().copied().collect();
        let eps = symmetrizer(n, &a)?;
        let mut m = CartanMatrix { n, a, eps, labels: (1..=n).collect() };
        if m.classify_all_kind() == TypeKind::Affine {
            m.labels = (0..n).collect();
        }
        Ok(m)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn a(&self, i: usize, j: usize) -> i64 {
        self.a[i * self.n + j]
    }

    pub fn epsilon(&self) -> &[i64] {
        &self.eps
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn index_of_label(&self, label: usize) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.a(i, j)).collect()).collect()
    }

    /// The invariant bilinear form on the root lattice: B_ij = eps_i a_ij.
    pub fn bilinear_form(&self) -> Vec<Vec<i64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.eps[i] * self.a(i, j)).collect())
            .collect()
    }

    /// (lambda, mu) with respect to the invariant form, exactly.
    pub fn pairing(&self, lambda: &[i64], mu: &[i64]) -> i64 {
        let mut acc: i128 = 0;
        for i in 0..self.n {
            if lambda[i] == 0 {
                continue;
            }
            for j in 0..self.n {
                if mu[j] != 0 {
                    acc += lambda[i] as i128 * self.eps[i] as i128 * self.a(i, j) as i128
                        * mu[j] as i128;
                }
            }
        }
        i64::try_from(acc).expect("pairing overflow")
    }

    pub fn pairing_rat(&self, lambda: &[Rat], mu: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for i in 0..self.n {
            if lambda[i].is_zero() {
                continue;
            }
            for j in 0..self.n {
                if !mu[j].is_zero() {
                    let b = Rat::from_integer(BigInt::from(self.eps[i] * self.a(i, j)));
                    acc += &lambda[i] * b * &mu[j];
                }
            }
        }
        acc
    }

    /// Coroot pairing lambda(alpha^vee) = 2 (lambda, alpha) / (alpha, alpha)
    /// for a real root alpha; exact rational.
    pub fn coroot_pairing(&self, lambda: &[i64], alpha: &[i64]) -> Rat {
        let num = 2 * self.pairing(lambda, alpha);
        let den = self.pairing(alpha, alpha);
        assert!(den != 0, "coroot pairing of an isotropic vector");
        Rat::new(BigInt::from(num), BigInt::from(den))
    }

    /// Connected components of `j` under the nonzero-entry adjacency.
    pub fn components(&self, j: &[usize]) -> Vec<Vec<usize>> {
        let mut remaining: Vec<usize> = j.to_vec();
        remaining.sort_unstable();
        remaining.dedup();
        let mut comps = Vec::new();
        let mut seen = vec![false; self.n];
        for &start in &remaining {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for &w in &remaining {
                    if !seen[w] && self.a(v, w) != 0 {
                        seen[w] = true;
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    /// J^perp = { i : a_ij = 0 for all j in J }.
    pub fn perp(&self, j: &[usize]) -> Vec<usize> {
        (0..self.n)
            .filter(|&i| j.iter().all(|&jj| self.a(i, jj) == 0))
            .collect()
    }

    /// Principal submatrix on `j` (relaxed: may be decomposable), with labels
    /// inherited from the ambient matrix.
    pub fn submatrix(&self, j: &[usize]) -> CartanMatrix {
        let rows: Vec<Vec<i64>> = j.iter().map(|&i| j.iter().map(|&k| self.a(i, k)).collect()).collect();
        let mut m = CartanMatrix::new_relaxed(&rows).expect("principal submatrix of a GCM is a GCM");
        m.labels = j.iter().map(|&i| self.labels[i]).collect();
        m
    }

    fn kind_of_component(&self, comp: &[usize]) -> TypeKind {
        // Symmetrized form restricted to the component.
        let b: Vec<Vec<Rat>> = comp
            .iter()
            .map(|&i| {
                comp.iter()
                    .map(|&j| Rat::from_integer(BigInt::from(self.eps[i] * self.a(i, j))))
                    .collect()
            })
            .collect();
        let k = comp.len();
        // positive definite <=> all leading principal minors positive
        let mut finite = true;
        for lead in 1..=k {
            let sub: Vec<Vec<Rat>> = (0..lead).map(|r| b[r][0..lead].to_vec()).collect();
            if !det_rat(&sub).is_positive() {
                finite = false;
                break;
            }
        }
        if finite {
            return TypeKind::Finite;
        }
        // affine <=> singular with a strictly positive kernel vector
        let kernel = kernel_rat(&b, k);
        if kernel.len() == 1 {
            let v = &kernel[0];
            let all_pos = v.iter().all(|x| x.is_positive());
            let all_neg = v.iter().all(|x| x.is_negative());
            if all_pos || all_neg {
                return TypeKind::Affine;
            }
        }
        TypeKind::Indefinite
    }

    fn classify_all_kind(&self) -> TypeKind {
        let everything: Vec<usize> = (0..self.n).collect();
        let comps = self.components(&everything);
        let mut kind = TypeKind::Finite;
        for c in comps {
            match self.kind_of_component(&c) {
                TypeKind::Indefinite => return TypeKind::Indefinite,
                TypeKind::Affine => kind = TypeKind::Affine,
                TypeKind::Finite => {}
            }
        }
        kind
    }

    /// Classifies the subset `j`: each connected component independently,
    /// returned as a product label with canonical names attached.
    pub fn classify_subset(&self, j: &[usize]) -> LieTypeLabel {
        let comps = self.components(j);
        if comps.is_empty() {
            return LieTypeLabel::z0();
        }
        let names: Vec<SimpleTypeName> = comps
            .iter()
            .map(|c| {
                let kind = self.kind_of_component(c);
                crate::catalogue::recognize_component(self, c, kind)
            })
            .collect();
        LieTypeLabel::product(names)
    }

    /// Classifies the whole index set.
    pub fn classify(&self) -> LieTypeLabel {
        self.classify_subset(&(0..self.n).collect::<Vec<_>>())
    }

    pub fn is_finite_subset(&self, j: &[usize]) -> bool {
        self.components(j).iter().all(|c| self.kind_of_component(c) == TypeKind::Finite)
    }

    /// For an affine matrix: the basic imaginary root delta as the coprime
    /// positive kernel vector of A (marks).
    pub fn delta(&self) -> Option<Vec<i64>> {
        let rows: Vec<Vec<Rat>> = (0..self.n)
            .map(|i| (0..self.n).map(|j| Rat::from_integer(BigInt::from(self.a(i, j)))).collect())
            .collect();
        let kernel = kernel_rat(&rows, self.n);
        if kernel.len() != 1 {
            return None;
        }
        let v = &kernel[0];
        let lcm = v.iter().fold(BigInt::from(1), |acc, x| acc.lcm(x.denom()));
        let mut ints: Vec<BigInt> = v.iter().map(|x| x.numer() * &lcm / x.denom()).collect();
        if ints.iter().all(|x| x.is_negative()) {
            for x in &mut ints {
                *x = -x.clone();
            }
        }
        if !ints.iter().all(|x| x.is_positive()) {
            return None;
        }
        let gcd = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        Some(ints.iter().map(|x| i64::try_from(x / &gcd).unwrap()).collect())
    }

    /// The full group Aut(A) of diagram automorphisms, as permutations of
    /// node indices, found by backtracking with adjacency-signature pruning.
    pub fn diagram_automorphisms(&self) -> Vec<Vec<usize>> {
        let n = self.n;
        // signature: multiset of (a_ij, a_ji) over all other nodes
        let sig: Vec<Vec<(i64, i64)>> = (0..n)
            .map(|i| {
                let mut s: Vec<(i64, i64)> = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| (self.a(i, j), self.a(j, i)))
                    .collect();
                s.sort_unstable();
                s
            })
            .collect();
        let mut out = Vec::new();
        let mut perm = vec![usize::MAX; n];
        let mut used = vec![false; n];
        self.automorphism_search(0, &mut perm, &mut used, &sig, &mut out);
        out
    }

    fn automorphism_search(
        &self,
        i: usize,
        perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
        sig: &[Vec<(i64, i64)>],
        out: &mut Vec<Vec<usize>>,
    ) {
        let n = self.n;
        if i == n {
            out.push(perm.clone());
            return;
        }
        for cand in 0..n {
            if used[cand] || sig[i] != sig[cand] {
                continue;
            }
            let ok = (0..i).all(|j| {
                self.a(i, j) == self.a(cand, perm[j]) && self.a(j, i) == self.a(perm[j], cand)
            });
            if ok {
                perm[i] = cand;
                used[cand] = true;
                self.automorphism_search(i + 1, perm, used, sig, out);
                used[cand] = false;
                perm[i] = usize::MAX;
            }
        }
    }
}

/// Computes the unique setwise-coprime positive symmetrizer by propagating
/// ratios along a spanning tree of each component, then checking every edge.
fn symmetrizer(n: usize, a: &[i64]) -> Result<Vec<i64>> {
    let at = |i: usize, j: usize| a[i * n + j];
    let mut eps: Vec<Option<Rat>> = vec![None; n];
    let mut comp_members: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if eps[start].is_some() {
            continue;
        }
        eps[start] = Some(Rat::from_integer(BigInt::from(1)));
        let mut members = vec![start];
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for w in 0..n {
                if w != v && at(v, w) != 0 && eps[w].is_none() {
                    // eps_v a_vw = eps_w a_wv
                    let ratio = Rat::new(BigInt::from(at(v, w)), BigInt::from(at(w, v)));
                    eps[w] = Some(eps[v].clone().unwrap() * ratio);
                    members.push(w);
                    stack.push(w);
                }
            }
        }
        comp_members.push(members);
    }
    let eps: Vec<Rat> = eps.into_iter().map(|e| e.unwrap()).collect();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let lhs = &eps[i] * Rat::from_integer(BigInt::from(at(i, j)));
                let rhs = &eps[j] * Rat::from_integer(BigInt::from(at(j, i)));
                if lhs != rhs {
                    return Err(Error::NotSymmetrizable(format!(
                        "consistency fails on edge ({i},{j})"
                    )));
                }
            }
        }
    }
    // scale each component to coprime positive integers
    let mut out = vec![0i64; n];
    for members in comp_members {
        let lcm = members
            .iter()
            .fold(BigInt::from(1), |acc, &i| acc.lcm(eps[i].denom()));
        let ints: Vec<BigInt> = members.iter().map(|&i| eps[i].numer() * &lcm / eps[i].denom()).collect();
        let gcd = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        for (&i, x) in members.iter().zip(&ints) {
            let v = x / &gcd;
            if !v.is_positive() {
                return Err(Error::NotSymmetrizable("non-positive symmetrizer entry".into()));
            }
            out[i] = i64::try_from(v).map_err(|_| {
                Error::NotSymmetrizable("symmetrizer entry exceeds i64".into())
            })?;
        }
    }
    Ok(out)
}

pub fn height(v: &[i64]) -> i64 {
    v.iter().sum()
}
