//! The truncated algebra: graded basis construction, elements and brackets.
//!
//! Degrees are signed content vectors over the simple roots; degree 0 is the
//! span of the h_i. Lowering-side weight spaces carry pivot bracket words in
//! the f generators, raising-side spaces mirror them in the e generators
//! with identical structure constants. Brackets landing outside the working
//! height window set a truncation flag instead of silently vanishing.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use num::{BigInt, Zero};

use crate::cartan::CartanMatrix;
use crate::error::{Error, Result};
use crate::scalar::{Gaussian, Rat};

use super::words::{
    build_degree, commutator, contents_up_to, expand_word, DegreeData, IntTensor, Word,
};

/// Signed degree: content vector, all entries of one sign (or zero for the
/// Cartan part).
pub type Deg = Vec<i32>;

pub fn deg_height(d: &[i32]) -> i32 {
    d.iter().sum()
}

pub fn neg(d: &[i32]) -> Deg {
    d.iter().map(|&x| -x).collect()
}

pub fn abs_content(d: &[i32]) -> Deg {
    d.iter().map(|&x| x.abs()).collect()
}

pub fn is_zero_deg(d: &[i32]) -> bool {
    d.iter().all(|&x| x == 0)
}

/// An element of the truncated algebra: per-degree coordinate vectors in the
/// chosen bases. `truncated` records that some bracket product fell outside
/// the working window; assertions must refuse flagged elements.
#[derive(Debug, Clone, PartialEq)]
pub struct Elem {
    pub parts: BTreeMap<Deg, Vec<Gaussian>>,
    pub truncated: bool,
}

impl Elem {
    pub fn zero() -> Self {
        Elem { parts: BTreeMap::new(), truncated: false }
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub(crate) fn insert_part(&mut self, d: Deg, v: Vec<Gaussian>) {
        if v.iter().any(|c| !c.is_zero()) {
            match self.parts.get_mut(&d) {
                Some(existing) => {
                    for (a, b) in existing.iter_mut().zip(&v) {
                        *a += b;
                    }
                    if existing.iter().all(|c| c.is_zero()) {
                        self.parts.remove(&d);
                    }
                }
                None => {
                    self.parts.insert(d, v);
                }
            }
        }
    }

    pub fn add(&self, other: &Elem) -> Elem {
        let mut out = self.clone();
        out.truncated |= other.truncated;
        for (d, v) in &other.parts {
            out.insert_part(d.clone(), v.clone());
        }
        out
    }

    pub fn sub(&self, other: &Elem) -> Elem {
        self.add(&other.scale(&Gaussian::from_int(-1)))
    }

    pub fn scale(&self, c: &Gaussian) -> Elem {
        if c.is_zero() {
            return Elem { parts: BTreeMap::new(), truncated: self.truncated };
        }
        Elem {
            parts: self
                .parts
                .iter()
                .map(|(d, v)| (d.clone(), v.iter().map(|x| x * c).collect()))
                .collect(),
            truncated: self.truncated,
        }
    }

    pub fn degrees(&self) -> Vec<Deg> {
        self.parts.keys().cloned().collect()
    }

    pub fn max_abs_height(&self) -> i32 {
        self.parts.keys().map(|d| deg_height(d).abs()).max().unwrap_or(0)
    }

    pub fn require_exact(&self) -> Result<&Elem> {
        if self.truncated {
            Err(Error::TruncationOverflow { height: 0, suggested: 0 })
        } else {
            Ok(self)
        }
    }
}

/// A height-bounded realization of the derived algebra.
pub struct TruncatedAlgebra {
    pub cartan: CartanMatrix,
    /// The verified height: dimensions and assertions are exact up to here.
    pub height: usize,
    /// Internal representation window; brackets beyond it are flagged.
    pub working_height: usize,
    degrees: BTreeMap<Deg, DegreeData>,
    /// Once a whole height shell has dimension 0, every higher shell does
    /// too (the lowering side is generated in degree one), so weight spaces
    /// at or above this height are exactly zero.
    zero_above: Option<usize>,
    raise_cache: Mutex<HashMap<(u8, Deg), Vec<Vec<Rat>>>>,
    lower_cache: Mutex<HashMap<(u8, Deg), Vec<Vec<Rat>>>>,
    tau_cache: Mutex<HashMap<(Vec<usize>, Deg), Vec<Vec<Rat>>>>,
    ff_cache: Mutex<HashMap<(Deg, usize, Deg, usize), Elem>>,
    mixed_cache: Mutex<HashMap<(Deg, usize, Deg, usize), Elem>>,
}

impl std::fmt::Debug for TruncatedAlgebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TruncatedAlgebra")
            .field("cartan", &self.cartan.classify().to_string())
            .field("height", &self.height)
            .field("working_height", &self.working_height)
            .finish()
    }
}

impl TruncatedAlgebra {
    /// Builds the algebra with working window equal to the verified height.
    pub fn build(cartan: &CartanMatrix, height: usize) -> Self {
        Self::build_with_working(cartan, height, height)
    }

    /// Builds the complete algebra of a finite-type matrix: the verified
    /// height covers the highest root, and the one extra shell witnesses
    /// that everything above vanishes, so nothing ever truncates.
    pub fn build_finite(cartan: &CartanMatrix) -> Self {
        let all: Vec<usize> = (0..cartan.size()).collect();
        let roots = crate::weyl::positive_roots_finite(cartan, &all)
            .expect("build_finite requires finite type");
        let h = roots.iter().map(|r| crate::cartan::height(r)).max().unwrap_or(1) as usize;
        Self::build_with_working(cartan, h, h + 1)
    }

    /// Builds with an explicit working window (>= height) for operations
    /// whose intermediate terms overshoot the verified heights. Stops early
    /// when a whole shell vanishes, after which all higher weight spaces are
    /// exactly zero.
    pub fn build_with_working(cartan: &CartanMatrix, height: usize, working_height: usize) -> Self {
        assert!(height >= 1 && working_height >= height);
        let n = cartan.size();
        let mut degrees = BTreeMap::new();
        let mut zero_above = None;
        let mut by_shell: BTreeMap<i32, Vec<Deg>> = BTreeMap::new();
        for content in contents_up_to(n, working_height) {
            by_shell.entry(deg_height(&content)).or_default().push(content);
        }
        for (shell, contents) in by_shell {
            let mut shell_dim = 0usize;
            let mut built = Vec::new();
            for content in contents {
                let dd = build_degree(cartan, &content);
                shell_dim += dd.dim();
                built.push((content, dd));
            }
            if shell_dim == 0 {
                zero_above = Some(shell as usize);
                break;
            }
            for (content, dd) in built {
                degrees.insert(content, dd);
            }
        }
        TruncatedAlgebra {
            cartan: cartan.clone(),
            height,
            working_height,
            degrees,
            zero_above,
            raise_cache: Mutex::new(HashMap::new()),
            lower_cache: Mutex::new(HashMap::new()),
            tau_cache: Mutex::new(HashMap::new()),
            ff_cache: Mutex::new(HashMap::new()),
            mixed_cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn n(&self) -> usize {
        self.cartan.size()
    }

    pub fn degree_data(&self, content: &[i32]) -> Option<&DegreeData> {
        self.degrees.get(content)
    }

    /// Dimension of the degree-d weight space; None when outside the window.
    pub fn dim(&self, d: &[i32]) -> Option<usize> {
        if is_zero_deg(d) {
            return Some(self.n());
        }
        let content = abs_content(d);
        if let Some(dd) = self.degrees.get(&content) {
            return Some(dd.dim());
        }
        match self.zero_above {
            Some(z) if deg_height(&content) >= z as i32 => Some(0),
            _ => None,
        }
    }

    /// Graded dimensions of the lowering side up to the verified height,
    /// zero entries included.
    pub fn lowering_dimensions(&self) -> BTreeMap<Deg, usize> {
        contents_up_to(self.n(), self.height)
            .into_iter()
            .map(|c| {
                let d = self.dim(&c).expect("inside the verified window");
                (c, d)
            })
            .collect()
    }

    /// Pivot words (the bookkeeping set J) at the given content.
    pub fn pivot_words(&self, content: &[i32]) -> Option<&[Word]> {
        self.degrees.get(content).map(|dd| dd.pivots.as_slice())
    }

    /// All degrees (signed, Cartan part included) with |height| <= bound and
    /// nonzero weight spaces.
    pub fn window_degrees(&self, bound: usize) -> Vec<Deg> {
        let mut out = Vec::new();
        for (c, dd) in &self.degrees {
            if dd.dim() > 0 && deg_height(c) <= bound as i32 {
                out.push(neg(c));
            }
        }
        out.push(vec![0; self.n()]);
        for (c, dd) in &self.degrees {
            if dd.dim() > 0 && deg_height(c) <= bound as i32 {
                out.push(c.clone());
            }
        }
        out
    }

    // ----- basis elements -------------------------------------------------

    pub fn h(&self, i: usize) -> Elem {
        let mut v = vec![Gaussian::zero(); self.n()];
        v[i] = Gaussian::one();
        let mut e = Elem::zero();
        e.insert_part(vec![0; self.n()], v);
        e
    }

    pub fn f(&self, i: usize) -> Elem {
        let mut d = vec![0i32; self.n()];
        d[i] = -1;
        let mut e = Elem::zero();
        e.insert_part(d, vec![Gaussian::one()]);
        e
    }

    pub fn e(&self, i: usize) -> Elem {
        let mut d = vec![0i32; self.n()];
        d[i] = 1;
        let mut e = Elem::zero();
        e.insert_part(d, vec![Gaussian::one()]);
        e
    }

    pub fn basis_elem(&self, d: &[i32], idx: usize) -> Elem {
        let dim = self.dim(d).expect("degree inside window");
        assert!(idx < dim);
        let mut v = vec![Gaussian::zero(); dim];
        v[idx] = Gaussian::one();
        let mut e = Elem::zero();
        e.insert_part(d.to_vec(), v);
        e
    }

    /// alpha(h) for a degree vector alpha and Cartan coordinates h.
    fn degree_pairing(&self, d: &[i32], hcoords: &[Gaussian]) -> Gaussian {
        let mut acc = Gaussian::zero();
        for (i, c) in hcoords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut alpha_hi: i64 = 0;
            for (j, &m) in d.iter().enumerate() {
                alpha_hi += m as i64 * self.cartan.a(i, j);
            }
            acc += &c.scale(&Rat::from_integer(BigInt::from(alpha_hi)));
        }
        acc
    }

    // ----- transition matrices ---------------------------------------------

    fn gaussian_cols_to_rat(cols: &[Vec<Gaussian>], rows: usize) -> Vec<Vec<Rat>> {
        (0..rows)
            .map(|r| {
                cols.iter()
                    .map(|c| {
                        debug_assert!(c[r].is_real());
                        c[r].re.clone()
                    })
                    .collect()
            })
            .collect()
    }

    /// Raising matrix: coordinates at content beta map to beta + alpha_a via
    /// the tensor commutator with the single letter.
    fn raise_matrix(&self, a: u8, content: &Deg) -> Option<Vec<Vec<Rat>>> {
        if let Some(m) = self.raise_cache.lock().unwrap().get(&(a, content.clone())) {
            return Some(m.clone());
        }
        let src = self.degrees.get(content)?;
        let mut target = content.clone();
        target[a as usize] += 1;
        let tgt = self.degrees.get(&target)?;
        let letter: IntTensor = IntTensor::from([(vec![a], 1)]);
        let cols: Vec<Vec<Gaussian>> = src
            .pivot_tensors
            .iter()
            .map(|t| tgt.express_int(&commutator(&letter, t), &self.cartan))
            .collect();
        let m = Self::gaussian_cols_to_rat(&cols, tgt.dim());
        self.raise_cache.lock().unwrap().insert((a, content.clone()), m.clone());
        Some(m)
    }

    /// Lowering matrix for heights >= 2: the raising derivation of the
    /// opposite generator, shared between the two sides.
    fn lower_matrix(&self, a: u8, content: &Deg) -> Option<Vec<Vec<Rat>>> {
        if let Some(m) = self.lower_cache.lock().unwrap().get(&(a, content.clone())) {
            return Some(m.clone());
        }
        let src = self.degrees.get(content)?;
        let mut target = content.clone();
        target[a as usize] -= 1;
        if target[a as usize] < 0 {
            return None;
        }
        let tgt = self.degrees.get(&target)?;
        let cols: Vec<Vec<Gaussian>> = src
            .pivot_tensors
            .iter()
            .map(|t| {
                let lowered = super::words::lower_int(t, a, &self.cartan);
                tgt.express_int(&lowered, &self.cartan)
            })
            .collect();
        let m = Self::gaussian_cols_to_rat(&cols, tgt.dim());
        self.lower_cache.lock().unwrap().insert((a, content.clone()), m.clone());
        Some(m)
    }

    fn apply_rat_matrix(m: &[Vec<Rat>], v: &[Gaussian]) -> Vec<Gaussian> {
        m.iter()
            .map(|row| {
                let mut acc = Gaussian::zero();
                for (c, x) in row.iter().zip(v) {
                    if !c.is_zero() && !x.is_zero() {
                        acc += &x.scale(c);
                    }
                }
                acc
            })
            .collect()
    }

    // ----- single-generator adjoint actions --------------------------------

    fn ad_e_component(&self, a: usize, d: &Deg, v: &[Gaussian]) -> Elem {
        let n = self.n();
        let mut out = Elem::zero();
        let ht = deg_height(d);
        if is_zero_deg(d) {
            // [e_a, h] = -alpha_a(h) e_a
            let mut alpha = vec![0i32; n];
            alpha[a] = 1;
            let c = self.degree_pairing(&alpha, v);
            if !c.is_zero() {
                out.insert_part(alpha, vec![-c]);
            }
        } else if ht < 0 {
            let content = abs_content(d);
            if content[a] == 0 {
                return out;
            }
            if ht == -1 {
                // [e_a, c f_a] = c h_a
                let mut h = vec![Gaussian::zero(); n];
                h[a] = v[0].clone();
                out.insert_part(vec![0; n], h);
            } else if let Some(m) = self.lower_matrix(a as u8, &content) {
                let mut target = content.clone();
                target[a] -= 1;
                out.insert_part(neg(&target), Self::apply_rat_matrix(&m, v));
            }
        } else {
            let content = d.clone();
            let mut target = content.clone();
            target[a] += 1;
            match self.dim(&target) {
                Some(0) => {}
                Some(_) => {
                    let m = self.raise_matrix(a as u8, &content).expect("both degrees built");
                    out.insert_part(target, Self::apply_rat_matrix(&m, v));
                }
                None => out.truncated = true,
            }
        }
        out
    }

    fn ad_f_component(&self, a: usize, d: &Deg, v: &[Gaussian]) -> Elem {
        let n = self.n();
        let mut out = Elem::zero();
        let ht = deg_height(d);
        if is_zero_deg(d) {
            // [f_a, h] = alpha_a(h) f_a
            let mut alpha = vec![0i32; n];
            alpha[a] = 1;
            let c = self.degree_pairing(&alpha, v);
            if !c.is_zero() {
                let mut dd = vec![0i32; n];
                dd[a] = -1;
                out.insert_part(dd, vec![c]);
            }
        } else if ht > 0 {
            let content = d.clone();
            if content[a] == 0 {
                return out;
            }
            if ht == 1 {
                // [f_a, c e_a] = -c h_a
                let mut h = vec![Gaussian::zero(); n];
                h[a] = -v[0].clone();
                out.insert_part(vec![0; n], h);
            } else if let Some(m) = self.lower_matrix(a as u8, &content) {
                let mut target = content.clone();
                target[a] -= 1;
                out.insert_part(target, Self::apply_rat_matrix(&m, v));
            }
        } else {
            let content = abs_content(d);
            let mut target = content.clone();
            target[a] += 1;
            match self.dim(&target) {
                Some(0) => {}
                Some(_) => {
                    let m = self.raise_matrix(a as u8, &content).expect("both degrees built");
                    out.insert_part(neg(&target), Self::apply_rat_matrix(&m, v));
                }
                None => out.truncated = true,
            }
        }
        out
    }

    pub fn ad_e(&self, a: usize, x: &Elem) -> Elem {
        let mut out = Elem::zero();
        out.truncated = x.truncated;
        for (d, v) in &x.parts {
            let part = self.ad_e_component(a, d, v);
            out.truncated |= part.truncated;
            for (dd, vv) in part.parts {
                out.insert_part(dd, vv);
            }
        }
        out
    }

    pub fn ad_f(&self, a: usize, x: &Elem) -> Elem {
        let mut out = Elem::zero();
        out.truncated = x.truncated;
        for (d, v) in &x.parts {
            let part = self.ad_f_component(a, d, v);
            out.truncated |= part.truncated;
            for (dd, vv) in part.parts {
                out.insert_part(dd, vv);
            }
        }
        out
    }

    // ----- brackets ---------------------------------------------------------

    fn ff_entry(&self, c1: &Deg, i: usize, c2: &Deg, j: usize) -> Elem {
        let key = (c1.clone(), i, c2.clone(), j);
        if let Some(e) = self.ff_cache.lock().unwrap().get(&key) {
            return e.clone();
        }
        let sum: Deg = c1.iter().zip(c2).map(|(a, b)| a + b).collect();
        let mut out = Elem::zero();
        match self.dim(&sum) {
            Some(0) => {}
            Some(_) => {
                let d1 = &self.degrees[c1];
                let d2 = &self.degrees[c2];
                let comm = commutator(&d1.pivot_tensors[i], &d2.pivot_tensors[j]);
                let coords = self.degrees[&sum].express_int(&comm, &self.cartan);
                out.insert_part(neg(&sum), coords);
            }
            None => out.truncated = true,
        }
        self.ff_cache.lock().unwrap().insert(key, out.clone());
        out
    }

    /// Mixed bracket of a raising basis vector against a lowering one,
    /// resolved by peeling the raising pivot word.
    fn mixed_entry(&self, c1: &Deg, i: usize, c2: &Deg, j: usize) -> Elem {
        let key = (c1.clone(), i, c2.clone(), j);
        if let Some(e) = self.mixed_cache.lock().unwrap().get(&key) {
            return e.clone();
        }
        let word = self.degrees[c1].pivots[i].clone();
        let y = self.basis_elem(&neg(c2), j);
        let out = if word.len() == 1 {
            self.ad_e(word[0] as usize, &y)
        } else {
            let a = word[0] as usize;
            let rest = &word[1..];
            let rest_elem = self.express_e_word(rest);
            let inner = self.bracket(&rest_elem, &y);
            let term1 = self.ad_e(a, &inner);
            let term2 = self.bracket(&rest_elem, &self.ad_e(a, &y));
            term1.sub(&term2)
        };
        self.mixed_cache.lock().unwrap().insert(key, out.clone());
        out
    }

    /// The raising-side element given by a bracket word in the e generators.
    pub fn express_e_word(&self, word: &[u8]) -> Elem {
        let mut content = vec![0i32; self.n()];
        for &l in word {
            content[l as usize] += 1;
        }
        let tensor = expand_word(word);
        let dd = &self.degrees[&content];
        let coords = dd.express_int(&tensor, &self.cartan);
        let mut out = Elem::zero();
        out.insert_part(content, coords);
        out
    }

    /// The lowering-side element given by a bracket word in the f generators.
    pub fn express_f_word(&self, word: &[u8]) -> Elem {
        let mut content = vec![0i32; self.n()];
        for &l in word {
            content[l as usize] += 1;
        }
        let tensor = expand_word(word);
        let dd = &self.degrees[&content];
        let coords = dd.express_int(&tensor, &self.cartan);
        let mut out = Elem::zero();
        out.insert_part(neg(&content), coords);
        out
    }

    /// The Lie bracket, bilinear over all component pairs. Sets the
    /// truncation flag when a product degree leaves the working window.
    pub fn bracket(&self, x: &Elem, y: &Elem) -> Elem {
        let mut out = Elem::zero();
        out.truncated = x.truncated || y.truncated;
        for (d1, v1) in &x.parts {
            for (d2, v2) in &y.parts {
                let piece = self.bracket_components(d1, v1, d2, v2);
                out.truncated |= piece.truncated;
                for (d, v) in piece.parts {
                    out.insert_part(d, v);
                }
            }
        }
        out
    }

    fn bracket_components(&self, d1: &Deg, v1: &[Gaussian], d2: &Deg, v2: &[Gaussian]) -> Elem {
        let h1 = deg_height(d1);
        let h2 = deg_height(d2);
        if is_zero_deg(d1) && is_zero_deg(d2) {
            return Elem::zero();
        }
        if is_zero_deg(d1) {
            // [h, x] = deg(x)(h) x
            let c = self.degree_pairing(d2, v1);
            let mut out = Elem::zero();
            out.insert_part(d2.clone(), v2.iter().map(|x| x * &c).collect());
            return out;
        }
        if is_zero_deg(d2) {
            let c = self.degree_pairing(d1, v2);
            let mut out = Elem::zero();
            out.insert_part(d1.clone(), v1.iter().map(|x| -&(x * &c)).collect());
            return out;
        }
        if h1 < 0 && h2 < 0 {
            let c1 = abs_content(d1);
            let c2 = abs_content(d2);
            let mut out = Elem::zero();
            for (i, a) in v1.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, b) in v2.iter().enumerate() {
                    if b.is_zero() {
                        continue;
                    }
                    let piece = self.ff_entry(&c1, i, &c2, j).scale(&(a * b));
                    out.truncated |= piece.truncated;
                    for (d, v) in piece.parts {
                        out.insert_part(d, v);
                    }
                }
            }
            return out;
        }
        if h1 > 0 && h2 > 0 {
            // mirror of the lowering side: identical structure constants
            let mut out = Elem::zero();
            for (i, a) in v1.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, b) in v2.iter().enumerate() {
                    if b.is_zero() {
                        continue;
                    }
                    let piece = self.ff_entry(d1, i, d2, j).scale(&(a * b));
                    out.truncated |= piece.truncated;
                    for (d, v) in piece.parts {
                        out.insert_part(neg(&d), v);
                    }
                }
            }
            return out;
        }
        if h1 < 0 && h2 > 0 {
            return self.bracket_components(d2, v2, d1, v1).scale(&Gaussian::from_int(-1));
        }
        let c2 = abs_content(d2);
        let mut out = Elem::zero();
        for (i, a) in v1.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in v2.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let piece = self.mixed_entry(d1, i, &c2, j).scale(&(a * b));
                out.truncated |= piece.truncated;
                for (d, v) in piece.parts {
                    out.insert_part(d, v);
                }
            }
        }
        out
    }

    // ----- algebra automorphism building blocks ----------------------------

    /// The Chevalley involution: e_i -> -f_i, f_i -> -e_i, h -> -h.
    pub fn omega(&self, x: &Elem) -> Elem {
        let mut out = Elem::zero();
        out.truncated = x.truncated;
        for (d, v) in &x.parts {
            if is_zero_deg(d) {
                out.insert_part(d.clone(), v.iter().map(|c| -c).collect());
            } else {
                let sign = if deg_height(&abs_content(d)) % 2 == 0 { 1 } else { -1 };
                let c = Gaussian::from_int(sign);
                out.insert_part(neg(d), v.iter().map(|x| x * &c).collect());
            }
        }
        out
    }

    /// Relabelling by a diagram automorphism.
    pub fn relabel(&self, tau: &[usize], x: &Elem) -> Elem {
        let n = self.n();
        let mut out = Elem::zero();
        out.truncated = x.truncated;
        for (d, v) in &x.parts {
            if is_zero_deg(d) {
                let mut w = vec![Gaussian::zero(); n];
                for i in 0..n {
                    w[tau[i]] = v[i].clone();
                }
                out.insert_part(d.clone(), w);
                continue;
            }
            let content = abs_content(d);
            let m = self.tau_matrix(tau, &content);
            let w = Self::apply_rat_matrix(&m, v);
            let mut target = vec![0i32; n];
            for i in 0..n {
                target[tau[i]] = content[i];
            }
            let target = if deg_height(d) < 0 { neg(&target) } else { target };
            out.insert_part(target, w);
        }
        out
    }

    fn tau_matrix(&self, tau: &[usize], content: &Deg) -> Vec<Vec<Rat>> {
        let key = (tau.to_vec(), content.clone());
        if let Some(m) = self.tau_cache.lock().unwrap().get(&key) {
            return m.clone();
        }
        let n = self.n();
        let src = &self.degrees[content];
        let mut target = vec![0i32; n];
        for i in 0..n {
            target[tau[i]] = content[i];
        }
        let tgt = &self.degrees[&target];
        let cols: Vec<Vec<Gaussian>> = src
            .pivots
            .iter()
            .map(|w| {
                let relabeled: Word = w.iter().map(|&l| tau[l as usize] as u8).collect();
                tgt.express_int(&expand_word(&relabeled), &self.cartan)
            })
            .collect();
        let m = Self::gaussian_cols_to_rat(&cols, tgt.dim());
        self.tau_cache.lock().unwrap().insert(key, m.clone());
        m
    }

    /// Degree-wise scaling by a character: x in g_lambda scales by chi(lambda).
    pub fn scale_by_character(&self, chi: impl Fn(&[i64]) -> Gaussian, x: &Elem) -> Elem {
        let mut out = Elem::zero();
        out.truncated = x.truncated;
        for (d, v) in &x.parts {
            if is_zero_deg(d) {
                out.insert_part(d.clone(), v.clone());
            } else {
                let lambda: Vec<i64> = d.iter().map(|&c| c as i64).collect();
                let c = chi(&lambda);
                out.insert_part(d.clone(), v.iter().map(|x| x * &c).collect());
            }
        }
        out
    }

    /// exp(ad(c * gen)) where gen is e_a (raising = true) or f_a. Errors
    /// when the series fails to terminate inside the working window.
    pub fn exp_ad_generator(&self, raising: bool, a: usize, c: &Gaussian, x: &Elem) -> Result<Elem> {
        let mut acc = x.clone();
        let mut term = x.clone();
        let mut k: i64 = 1;
        loop {
            let ad = if raising { self.ad_e(a, &term) } else { self.ad_f(a, &term) };
            let mut next = ad.scale(&c.scale(&Rat::new(BigInt::from(1), BigInt::from(k))));
            if next.truncated {
                return Err(Error::TruncationOverflow {
                    height: self.working_height,
                    suggested: self.working_height + 4,
                });
            }
            if next.is_zero() {
                break;
            }
            acc = acc.add(&next);
            next.truncated = false;
            term = next;
            k += 1;
            if k > 4 * self.working_height as i64 + 8 {
                return Err(Error::TruncationOverflow {
                    height: self.working_height,
                    suggested: self.working_height + 4,
                });
            }
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalogue::cartan_by_name;

    fn gi(v: i64) -> Gaussian {
        Gaussian::from_int(v)
    }

    #[test]
    fn defining_relations_a2() {
        let a2 = cartan_by_name("A2").unwrap();
        let alg = TruncatedAlgebra::build(&a2, 3);
        // [e1, f1] = h1
        assert_eq!(alg.bracket(&alg.e(0), &alg.f(0)), alg.h(0));
        // [h1, f2] = -a_12 f2 = f2
        assert_eq!(alg.bracket(&alg.h(0), &alg.f(1)), alg.f(1));
        // [h1, e1] = 2 e1
        assert_eq!(alg.bracket(&alg.h(0), &alg.e(0)), alg.e(0).scale(&gi(2)));
        // Serre relation: [f1, [f1, f2]] = 0 without truncation
        let inner = alg.bracket(&alg.f(0), &alg.f(1));
        let b = alg.bracket(&alg.f(0), &inner);
        assert!(b.is_zero() && !b.truncated);
        // [e1, f2] = 0
        assert!(alg.bracket(&alg.e(0), &alg.f(1)).is_zero());
    }

    #[test]
    fn antisymmetry_and_jacobi_on_generators() {
        let g2 = cartan_by_name("G2").unwrap();
        let alg = TruncatedAlgebra::build(&g2, 5);
        let xs = [alg.e(0), alg.e(1), alg.f(0), alg.f(1), alg.h(0), alg.h(1)];
        for x in &xs {
            for y in &xs {
                let xy = alg.bracket(x, y);
                let yx = alg.bracket(y, x);
                assert_eq!(xy, yx.scale(&gi(-1)));
                for z in &xs {
                    let a = alg.bracket(x, &alg.bracket(y, z));
                    let b = alg.bracket(y, &alg.bracket(x, z));
                    let c = alg.bracket(&alg.bracket(x, y), z);
                    let jac = a.sub(&b).sub(&c);
                    assert!(!jac.truncated);
                    assert!(jac.is_zero());
                }
            }
        }
    }

    #[test]
    fn g2_total_dimension() {
        let g2 = cartan_by_name("G2").unwrap();
        let alg = TruncatedAlgebra::build(&g2, 5);
        let total: usize = alg.lowering_dimensions().values().sum();
        assert_eq!(total, 6);
    }

    #[test]
    fn truncation_flag_set_beyond_window() {
        let a2 = cartan_by_name("A2").unwrap();
        let alg = TruncatedAlgebra::build(&a2, 1);
        let b = alg.bracket(&alg.f(0), &alg.f(1));
        assert!(b.truncated);
        assert!(b.require_exact().is_err());
    }

    #[test]
    fn omega_is_an_involutive_algebra_map() {
        let a2 = cartan_by_name("A2").unwrap();
        let alg = TruncatedAlgebra::build(&a2, 3);
        let x = alg.bracket(&alg.f(0), &alg.f(1));
        let wx = alg.omega(&x);
        assert_eq!(alg.omega(&wx), x);
        // omega([f1,f2]) = [omega f1, omega f2] = [e1, e2]
        let ee = alg.bracket(&alg.e(0), &alg.e(1));
        assert_eq!(wx, ee);
        assert_eq!(alg.omega(&alg.e(0)), alg.f(0).scale(&gi(-1)));
    }

    #[test]
    fn exp_ad_of_nilpotent_generator() {
        let a2 = cartan_by_name("A2").unwrap();
        let alg = TruncatedAlgebra::build_with_working(&a2, 3, 4);
        // exp(ad e_0)(h_0) = h_0 - 2 e_0
        let out = alg.exp_ad_generator(true, 0, &Gaussian::one(), &alg.h(0)).unwrap();
        let expected = alg.h(0).add(&alg.e(0).scale(&gi(-2)));
        assert_eq!(out, expected);
    }

    #[test]
    fn mixed_brackets_of_words() {
        let a2 = cartan_by_name("A2").unwrap();
        let alg = TruncatedAlgebra::build(&a2, 3);
        // [[e1,e2],[f1,f2]] = -(h1 + h2)
        let ee = alg.bracket(&alg.e(0), &alg.e(1));
        let ff = alg.bracket(&alg.f(0), &alg.f(1));
        let b = alg.bracket(&ee, &ff);
        let expected = alg.h(0).add(&alg.h(1)).scale(&gi(-1));
        assert_eq!(b, expected);
    }

    #[test]
    fn relabel_by_diagram_automorphism() {
        let a2 = cartan_by_name("A2").unwrap();
        let alg = TruncatedAlgebra::build(&a2, 3);
        let swap = vec![1usize, 0usize];
        assert_eq!(alg.relabel(&swap, &alg.f(0)), alg.f(1));
        assert_eq!(alg.relabel(&swap, &alg.h(0)), alg.h(1));
        let ff = alg.bracket(&alg.f(0), &alg.f(1));
        let img = alg.relabel(&swap, &ff);
        // [f2, f1] = -[f1, f2]
        assert_eq!(img, ff.scale(&gi(-1)));
    }
}
