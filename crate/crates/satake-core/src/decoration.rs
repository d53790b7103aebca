//! Compatible decorations (X, tau) of a Dynkin diagram, generalized Satake
//! diagrams, odd nodes, enriched characters, special tau-orbits, exhaustive
//! enumeration and Aut(A)-orbit classification.

use std::collections::BTreeSet;

use num::{BigInt, Zero};
use serde::{Deserialize, Serialize};

use crate::cartan::{CartanMatrix, SimpleTypeName};
use crate::error::{Error, Result};
use crate::linalg::{solve_square, IMat};
use crate::scalar::{Gaussian, Rat};
use crate::weyl::{longest_element, opposition_involution, zeta_x};

/// Default ceiling on the node count for exhaustive enumeration.
pub const RANK_GUARD: usize = 10;

/// A pair (X, tau) on the node set of a Cartan matrix. Compatibility is not
/// enforced at construction; see [`compatibility`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decoration {
    pub cartan: CartanMatrix,
    /// Sorted node indices of X.
    pub x: Vec<usize>,
    /// tau as a permutation of node indices.
    pub tau: Vec<usize>,
}

impl Decoration {
    pub fn new(cartan: CartanMatrix, mut x: Vec<usize>, tau: Vec<usize>) -> Self {
        x.sort_unstable();
        x.dedup();
        Decoration { cartan, x, tau }
    }

    pub fn trivial(cartan: CartanMatrix) -> Self {
        let n = cartan.size();
        Decoration { cartan, x: Vec::new(), tau: (0..n).collect() }
    }

    pub fn n(&self) -> usize {
        self.cartan.size()
    }

    pub fn in_x(&self, i: usize) -> bool {
        self.x.binary_search(&i).is_ok()
    }

    /// Nodes outside X, one representative per tau-orbit (smallest index).
    pub fn i_star(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut seen = vec![false; self.n()];
        for i in 0..self.n() {
            if self.in_x(i) || seen[i] {
                continue;
            }
            seen[i] = true;
            seen[self.tau[i]] = true;
            out.push(i);
        }
        out
    }

    /// sigma = w_X . tau as an integer matrix on the root lattice.
    pub fn sigma_matrix(&self) -> Result<IMat> {
        let wx = longest_element(&self.cartan, &self.x)?;
        let n = self.n();
        let tau_mat = IMat::from_fn(n, |r, c| i64::from(self.tau[c] == r));
        Ok(wx.matrix.mul(&tau_mat))
    }
}

/// Why a decoration fails to be compatible; `None` means compatible.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum IncompatibleReason {
    TauNotPermutation,
    TauNotAutomorphism,
    TauNotInvolution,
    XNotFiniteType,
    TauDoesNotStabilizeX,
    TauNotOppositionOnX,
}

impl std::fmt::Display for IncompatibleReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            IncompatibleReason::TauNotPermutation => "tau is not a permutation of the nodes",
            IncompatibleReason::TauNotAutomorphism => "tau is not a diagram automorphism",
            IncompatibleReason::TauNotInvolution => "tau^2 != id",
            IncompatibleReason::XNotFiniteType => "X is not of finite type",
            IncompatibleReason::TauDoesNotStabilizeX => "tau(X) != X",
            IncompatibleReason::TauNotOppositionOnX => "tau|_X differs from the opposition involution of X",
        };
        write!(f, "{s}")
    }
}

/// Checks the compatible-decoration clauses in order and reports the first
/// failure.
pub fn compatibility(dec: &Decoration) -> Option<IncompatibleReason> {
    let n = dec.n();
    let tau = &dec.tau;
    let mut seen = vec![false; n];
    if tau.len() != n {
        return Some(IncompatibleReason::TauNotPermutation);
    }
    for &t in tau {
        if t >= n || seen[t] {
            return Some(IncompatibleReason::TauNotPermutation);
        }
        seen[t] = true;
    }
    for i in 0..n {
        for j in 0..n {
            if dec.cartan.a(tau[i], tau[j]) != dec.cartan.a(i, j) {
                return Some(IncompatibleReason::TauNotAutomorphism);
            }
        }
    }
    if (0..n).any(|i| tau[tau[i]] != i) {
        return Some(IncompatibleReason::TauNotInvolution);
    }
    if !dec.cartan.is_finite_subset(&dec.x) {
        return Some(IncompatibleReason::XNotFiniteType);
    }
    if dec.x.iter().any(|&i| !dec.in_x(tau[i])) {
        return Some(IncompatibleReason::TauDoesNotStabilizeX);
    }
    let oi = opposition_involution(&dec.cartan, &dec.x).expect("X finite type");
    if dec.x.iter().any(|&i| tau[i] != oi[i]) {
        return Some(IncompatibleReason::TauNotOppositionOnX);
    }
    None
}

pub fn is_compatible(dec: &Decoration) -> bool {
    compatibility(dec).is_none()
}

pub fn require_compatible(dec: &Decoration) -> Result<()> {
    match compatibility(dec) {
        None => Ok(()),
        Some(r) => Err(Error::NotCompatible(r.to_string())),
    }
}

/// Definition of a generalized Satake diagram: no tau-fixed node i outside X
/// whose connected component in X ∪ {i} is of type A2.
pub fn is_generalized_satake(dec: &Decoration) -> Result<bool> {
    require_compatible(dec)?;
    for i in 0..dec.n() {
        if dec.in_x(i) || dec.tau[i] != i {
            continue;
        }
        let mut xi = dec.x.clone();
        xi.push(i);
        let comps = dec.cartan.components(&xi);
        let comp = comps.iter().find(|c| c.contains(&i)).expect("i is in X[i]");
        let label = dec.cartan.classify_subset(comp);
        if label.factors == vec![SimpleTypeName::Finite { family: 'A', rank: 2 }] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Odd nodes: tau-fixed i outside X with zeta_X(alpha_i) = -1.
pub fn odd_nodes(dec: &Decoration) -> Result<Vec<usize>> {
    require_compatible(dec)?;
    let n = dec.n();
    let mut out = Vec::new();
    for i in 0..n {
        if dec.in_x(i) || dec.tau[i] != i {
            continue;
        }
        let mut e = vec![0i64; n];
        e[i] = 1;
        if zeta_x(&dec.cartan, &dec.x, &e)? == -1 {
            out.push(i);
        }
    }
    Ok(out)
}

/// A Satake diagram is a compatible decoration without odd nodes.
pub fn is_satake(dec: &Decoration) -> Result<bool> {
    Ok(odd_nodes(dec)?.is_empty())
}

/// A decoration with character values chi(alpha_i) in Q(i).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnrichedDecoration {
    pub dec: Decoration,
    pub chi: Vec<Gaussian>,
}

impl EnrichedDecoration {
    pub fn trivial_chi(dec: Decoration) -> Self {
        let n = dec.n();
        EnrichedDecoration { dec, chi: vec![Gaussian::one(); n] }
    }

    /// chi extended multiplicatively to the root lattice.
    pub fn chi_of(&self, v: &[i64]) -> Gaussian {
        let mut acc = Gaussian::one();
        for (i, &m) in v.iter().enumerate() {
            if m != 0 {
                acc = &acc * &self.chi[i].pow(m);
            }
        }
        acc
    }

    /// Validates chi: nonzero values satisfying chi(sigma(alpha_i)) =
    /// chi(alpha_i)^{-1} for all i (the fixed-character condition).
    pub fn validate_chi(&self) -> Result<()> {
        require_compatible(&self.dec)?;
        if self.chi.len() != self.dec.n() {
            return Err(Error::InvalidCharacter("wrong number of chi values".into()));
        }
        if self.chi.iter().any(|c| c.is_zero()) {
            return Err(Error::InvalidCharacter("chi values must be nonzero".into()));
        }
        let sigma = self.dec.sigma_matrix()?;
        for i in 0..self.dec.n() {
            let mut e = vec![0i64; self.dec.n()];
            e[i] = 1;
            let si = sigma.apply(&e);
            if self.chi_of(&si) != self.chi[i].inv() {
                return Err(Error::InvalidCharacter(format!(
                    "chi(sigma(alpha_{i})) != chi(alpha_{i})^-1"
                )));
            }
        }
        Ok(())
    }
}

/// Enriched generalized Satake: the underlying diagram is generalized Satake
/// and chi(alpha_{tau(i)}) = chi(alpha_i) for all i in X^perp with
/// a_{i,tau(i)} = 0.
pub fn is_enriched_gsat(edec: &EnrichedDecoration) -> Result<bool> {
    edec.validate_chi()?;
    if !is_generalized_satake(&edec.dec)? {
        return Ok(false);
    }
    let dec = &edec.dec;
    let xp = dec.cartan.perp(&dec.x);
    for &i in &xp {
        if dec.in_x(i) {
            continue;
        }
        let ti = dec.tau[i];
        if dec.cartan.a(i, ti) == 0 && edec.chi[ti] != edec.chi[i] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Special tau-orbit bookkeeping for the derived-subalgebra split.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitReport {
    pub i_star: Vec<usize>,
    pub i_diff: Vec<usize>,
    pub i_ns: Vec<usize>,
    pub i_nsf: Vec<usize>,
    pub odd_nodes: Vec<usize>,
}

/// Computes I_diff, I_ns, I_nsf and the odd nodes for a choice of orbit
/// representatives (defaults to smallest index per orbit).
pub fn special_orbits(dec: &Decoration, i_star: Option<Vec<usize>>) -> Result<OrbitReport> {
    require_compatible(dec)?;
    let i_star = i_star.unwrap_or_else(|| dec.i_star());
    let xp = dec.cartan.perp(&dec.x);
    let mut i_diff = Vec::new();
    let mut i_ns = Vec::new();
    for &i in &i_star {
        let ti = dec.tau[i];
        if ti != i {
            // i_diff: i not orthogonal to X ∪ {tau(i)}
            let mut set = dec.x.clone();
            set.push(ti);
            let orthogonal = set.iter().all(|&j| dec.cartan.a(i, j) == 0);
            if !orthogonal {
                i_diff.push(i);
            }
        } else if xp.contains(&i) {
            i_ns.push(i);
        }
    }
    let i_nsf: Vec<usize> = i_ns
        .iter()
        .copied()
        .filter(|&j| i_ns.iter().all(|&i| dec.cartan.a(i, j) % 2 == 0))
        .collect();
    Ok(OrbitReport { i_star, i_diff, i_ns, i_nsf, odd_nodes: odd_nodes(dec)? })
}

/// Which decorations an enumeration keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecorationFilter {
    Compatible,
    GeneralizedSatake,
    Satake,
}

/// Exhaustive enumeration of decorations over (X, tau), X of finite type,
/// ordered by |X| then lexicographically.
pub fn enumerate(cm: &CartanMatrix, filter: DecorationFilter, rank_guard: usize) -> Result<Vec<Decoration>> {
    let n = cm.size();
    if n > rank_guard {
        return Err(Error::RankGuardExceeded(n, rank_guard));
    }
    let auts = cm.diagram_automorphisms();
    let involutions: Vec<Vec<usize>> = auts
        .into_iter()
        .filter(|t| (0..n).all(|i| t[t[i]] == i))
        .collect();
    let mut subsets: Vec<Vec<usize>> = (0u32..(1 << n))
        .map(|mask| (0..n).filter(|&i| mask & (1 << i) != 0).collect())
        .collect();
    subsets.sort_by_key(|s: &Vec<usize>| (s.len(), s.clone()));
    let mut out = Vec::new();
    for x in subsets {
        if !cm.is_finite_subset(&x) {
            continue;
        }
        let oi = opposition_involution(cm, &x).expect("finite type");
        for tau in &involutions {
            if x.iter().any(|&i| !x.contains(&tau[i])) {
                continue;
            }
            if x.iter().any(|&i| tau[i] != oi[i]) {
                continue;
            }
            let dec = Decoration::new(cm.clone(), x.clone(), tau.clone());
            debug_assert!(is_compatible(&dec));
            let keep = match filter {
                DecorationFilter::Compatible => true,
                DecorationFilter::GeneralizedSatake => is_generalized_satake(&dec)?,
                DecorationFilter::Satake => is_satake(&dec)?,
            };
            if keep {
                out.push(dec);
            }
        }
    }
    Ok(out)
}

/// Applies a diagram automorphism: psi . (X, tau) = (psi(X), psi tau psi^-1).
pub fn apply_automorphism(dec: &Decoration, psi: &[usize]) -> Decoration {
    let n = dec.n();
    let x: Vec<usize> = dec.x.iter().map(|&i| psi[i]).collect();
    let mut psi_inv = vec![0usize; n];
    for i in 0..n {
        psi_inv[psi[i]] = i;
    }
    let tau: Vec<usize> = (0..n).map(|i| psi[dec.tau[psi_inv[i]]]).collect();
    Decoration::new(dec.cartan.clone(), x, tau)
}

fn orbit_key(dec: &Decoration) -> (Vec<usize>, Vec<usize>) {
    (dec.x.clone(), dec.tau.clone())
}

/// Canonical representative: the lexicographically minimal image under
/// Aut(A).
pub fn canonical_representative(dec: &Decoration) -> Decoration {
    let auts = dec.cartan.diagram_automorphisms();
    auts.iter()
        .map(|psi| apply_automorphism(dec, psi))
        .min_by_key(orbit_key)
        .expect("Aut(A) contains the identity")
}

/// Partitions a list of decorations into Aut(A)-orbits and returns the sorted
/// canonical representatives.
pub fn orbit_classes(list: &[Decoration]) -> Vec<Decoration> {
    let mut reps: Vec<Decoration> = Vec::new();
    let mut keys: BTreeSet<(Vec<usize>, Vec<usize>)> = BTreeSet::new();
    for dec in list {
        let rep = canonical_representative(dec);
        if keys.insert(orbit_key(&rep)) {
            reps.push(rep);
        }
    }
    reps.sort_by_key(orbit_key);
    reps
}

/// Pairing lambda(kappa^vee_j) with the fundamental coweight of X at j in X.
pub fn fundamental_coweight_pairing(cm: &CartanMatrix, x: &[usize], j: usize, lambda: &[i64]) -> Rat {
    // kappa^vee_j = sum_{k in X} c_k h_k with sum_k c_k a_{kl} = delta_{jl}
    let k = x.len();
    let a_t: Vec<Vec<Rat>> = (0..k)
        .map(|l| (0..k).map(|kk| Rat::from_integer(BigInt::from(cm.a(x[kk], x[l])))).collect())
        .collect();
    let jpos = x.iter().position(|&v| v == j).expect("j in X");
    let mut e = vec![Rat::zero(); k];
    e[jpos] = Rat::from_integer(BigInt::from(1));
    let c = solve_square(&a_t, &e).expect("A_X invertible for finite type");
    // lambda(h_k) = sum_l lambda_l a_{kl}
    let mut acc = Rat::zero();
    for (kk, ck) in c.iter().enumerate() {
        let mut lam_h = 0i64;
        for (l, &ml) in lambda.iter().enumerate() {
            lam_h += ml * cm.a(x[kk], l);
        }
        acc += ck * Rat::from_integer(BigInt::from(lam_h));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalogue::cartan_by_name;
    use crate::cartan::CartanMatrix;

    fn a2_dec(x: Vec<usize>, tau: Vec<usize>) -> Decoration {
        Decoration::new(cartan_by_name("A2").unwrap(), x, tau)
    }

    #[test]
    fn compatibility_clauses() {
        // (empty, id) on any A is compatible
        assert!(is_compatible(&a2_dec(vec![], vec![0, 1])));
        // A2, X={1} (index 0), tau = id: compatible
        assert!(is_compatible(&a2_dec(vec![0], vec![0, 1])));
        // A2, X=I, tau=id: fails because oi is the swap
        assert_eq!(
            compatibility(&a2_dec(vec![0, 1], vec![0, 1])),
            Some(IncompatibleReason::TauNotOppositionOnX)
        );
        // A2, X=I, tau=swap: compatible (compact decoration)
        assert!(is_compatible(&a2_dec(vec![0, 1], vec![1, 0])));
        // affine: X = all of I is not finite type
        let a1h = cartan_by_name("A1~").unwrap();
        assert_eq!(
            compatibility(&Decoration::new(a1h, vec![0, 1], vec![0, 1])),
            Some(IncompatibleReason::XNotFiniteType)
        );
    }

    #[test]
    fn gsat_and_odd_nodes() {
        // A2, X={1}: the filled-unfilled A2 obstruction; node 2 is odd
        let dec = a2_dec(vec![0], vec![0, 1]);
        assert!(!is_generalized_satake(&dec).unwrap());
        assert_eq!(odd_nodes(&dec).unwrap(), vec![1]);
        assert!(!is_satake(&dec).unwrap());
        // (empty, id) is Satake, hence generalized Satake
        let dec = a2_dec(vec![], vec![0, 1]);
        assert!(is_generalized_satake(&dec).unwrap());
        assert!(is_satake(&dec).unwrap());
        // incompatible input is an error
        let bad = a2_dec(vec![0, 1], vec![0, 1]);
        assert!(is_generalized_satake(&bad).is_err());
    }

    #[test]
    fn g2_gsat_not_satake() {
        // G2, X = {node 1}: generalized Satake but not Satake
        let g2 = cartan_by_name("G2").unwrap();
        let dec = Decoration::new(g2, vec![0], vec![0, 1]);
        assert!(is_generalized_satake(&dec).unwrap());
        assert!(!is_satake(&dec).unwrap());
    }

    #[test]
    fn a3_reflecting_is_gsat() {
        let a3 = cartan_by_name("A3").unwrap();
        let dec = Decoration::new(a3, vec![1], vec![2, 1, 0]);
        assert!(is_compatible(&dec));
        assert!(is_generalized_satake(&dec).unwrap());
    }

    #[test]
    fn enriched_characters() {
        // A1 x A1 with the swap, X = empty
        let cm = CartanMatrix::new_relaxed(&[vec![2, 0], vec![0, 2]]).unwrap();
        let dec = Decoration::new(cm, vec![], vec![1, 0]);
        assert!(is_compatible(&dec));
        // chi(a1)=2, chi(a2)=1/2 satisfies the fixed-character condition but
        // fails the enriched clause
        let edec = EnrichedDecoration {
            dec: dec.clone(),
            chi: vec![Gaussian::from_int(2), Gaussian::from_rat(crate::scalar::ratio(1, 2))],
        };
        edec.validate_chi().unwrap();
        assert!(!is_enriched_gsat(&edec).unwrap());
        // chi = 1 works
        let edec = EnrichedDecoration::trivial_chi(dec.clone());
        assert!(is_enriched_gsat(&edec).unwrap());
        // chi values that break the fixed-character condition are rejected
        let edec = EnrichedDecoration {
            dec,
            chi: vec![Gaussian::from_int(2), Gaussian::from_int(2)],
        };
        assert!(matches!(edec.validate_chi(), Err(Error::InvalidCharacter(_))));
    }

    #[test]
    fn special_orbit_examples() {
        // (empty, id) on A1: I_ns = I_nsf = {node 1}
        let a1 = cartan_by_name("A1").unwrap();
        let rep = special_orbits(&Decoration::trivial(a1), None).unwrap();
        assert_eq!(rep.i_ns, vec![0]);
        assert_eq!(rep.i_nsf, vec![0]);
        // (empty, id) on A2: I_ns = {1,2}, I_nsf = empty (odd a_12)
        let rep = special_orbits(&a2_dec(vec![], vec![0, 1]), None).unwrap();
        assert_eq!(rep.i_ns, vec![0, 1]);
        assert!(rep.i_nsf.is_empty());
        // A3 reflecting with central X: the outer orbit is in I_diff
        let a3 = cartan_by_name("A3").unwrap();
        let dec = Decoration::new(a3, vec![1], vec![2, 1, 0]);
        let rep = special_orbits(&dec, None).unwrap();
        assert_eq!(rep.i_star, vec![0]);
        assert_eq!(rep.i_diff, vec![0]);
    }

    #[test]
    fn enumerate_a1_and_a2() {
        let a1 = cartan_by_name("A1").unwrap();
        let all = enumerate(&a1, DecorationFilter::Compatible, RANK_GUARD).unwrap();
        assert_eq!(all.len(), 2);
        assert!(all
            .iter()
            .all(|d| is_generalized_satake(d).unwrap()));
        let a2 = cartan_by_name("A2").unwrap();
        let all = enumerate(&a2, DecorationFilter::Compatible, RANK_GUARD).unwrap();
        // (0,id), (0,swap), ({1},id), ({2},id), (I,swap)
        assert_eq!(all.len(), 5);
        let gsat = enumerate(&a2, DecorationFilter::GeneralizedSatake, RANK_GUARD).unwrap();
        assert_eq!(gsat.len(), 3);
        let orbits = orbit_classes(&gsat);
        assert_eq!(orbits.len(), 3);
        // the two non-gsat singleton-X decorations form one orbit
        let nongsat: Vec<Decoration> = all
            .iter()
            .filter(|d| !is_generalized_satake(d).unwrap())
            .cloned()
            .collect();
        assert_eq!(nongsat.len(), 2);
        assert_eq!(orbit_classes(&nongsat).len(), 1);
    }

    #[test]
    fn rank_guard() {
        let a2 = cartan_by_name("A2").unwrap();
        assert!(matches!(
            enumerate(&a2, DecorationFilter::Compatible, 1),
            Err(Error::RankGuardExceeded(2, 1))
        ));
    }

    #[test]
    fn wx_formula_lemma() {
        // w_X(alpha_i) = alpha_i + sum v_ij alpha_j with
        // v_ij = -(alpha_i + alpha_tau(i))(kappa^vee_j) >= 0
        for name in ["A3", "B3", "G2"] {
            let cm = cartan_by_name(name).unwrap();
            for dec in enumerate(&cm, DecorationFilter::Compatible, RANK_GUARD).unwrap() {
                let wx = longest_element(&cm, &dec.x).unwrap();
                for i in 0..cm.size() {
                    if dec.in_x(i) {
                        continue;
                    }
                    let mut e = vec![0i64; cm.size()];
                    e[i] = 1;
                    let img = wx.apply(&e);
                    assert_eq!(img[i], 1);
                    let mut sum = vec![0i64; cm.size()];
                    sum[i] += 1;
                    sum[dec.tau[i]] += 1;
                    for &j in &dec.x {
                        let v = -fundamental_coweight_pairing(&cm, &dec.x, j, &sum);
                        assert!(v.is_integer());
                        assert!(v >= Rat::zero());
                        assert_eq!(Rat::from_integer(BigInt::from(img[j])), v, "{name}");
                    }
                    for j in 0..cm.size() {
                        if j != i && !dec.in_x(j) {
                            assert_eq!(img[j], 0);
                        }
                    }
                }
            }
        }
    }
}
