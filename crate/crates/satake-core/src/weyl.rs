//! The Weyl group as exact integer matrices on the root lattice: reflections,
//! length by descent, longest elements of finite-type subsets, opposition
//! involutions, the zeta sign characters, root enumeration and coset tests.

use std::collections::{HashSet, VecDeque};

use num::Zero;
use serde::{Deserialize, Serialize};

use crate::cartan::{height, CartanMatrix};
use crate::error::{Error, Result};
use crate::linalg::IMat;
use crate::scalar::Rat;

/// Default ceiling for brute-force group enumeration.
pub const BRUTE_FORCE_BUDGET: usize = 2_000_000;

/// An element of W, stored as its exact matrix action on the root lattice in
/// the basis of simple roots. Equality is matrix equality; the word is
/// bookkeeping only and need not be reduced.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeylElement {
    pub matrix: IMat,
    pub word: Option<Vec<usize>>,
}

impl PartialEq for WeylElement {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}
impl Eq for WeylElement {}

impl WeylElement {
    pub fn identity(n: usize) -> Self {
        WeylElement { matrix: IMat::identity(n), word: Some(Vec::new()) }
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        self.matrix.apply(v)
    }

    pub fn apply_rat(&self, v: &[Rat]) -> Vec<Rat> {
        self.matrix.apply_rat(v)
    }

    pub fn compose(&self, other: &WeylElement) -> WeylElement {
        let word = match (&self.word, &other.word) {
            (Some(a), Some(b)) => {
                let mut w = a.clone();
                w.extend_from_slice(b);
                Some(w)
            }
            _ => None,
        };
        WeylElement { matrix: self.matrix.mul(&other.matrix), word }
    }

    pub fn inverse(&self) -> WeylElement {
        let matrix = self.matrix.inverse().expect("Weyl matrices are unimodular");
        let word = self.word.as_ref().map(|w| w.iter().rev().copied().collect());
        WeylElement { matrix, word }
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity()
    }
}

/// The simple reflection s_i: alpha_j -> alpha_j - a_ij alpha_i.
pub fn reflect(cm: &CartanMatrix, i: usize) -> WeylElement {
    let n = cm.size();
    let matrix = IMat::from_fn(n, |r, c| {
        let id = i64::from(r == c);
        if r == i {
            id - cm.a(i, c)
        } else {
            id
        }
    });
    WeylElement { matrix, word: Some(vec![i]) }
}

fn column(m: &IMat, j: usize) -> Vec<i64> {
    (0..m.n).map(|i| m.get(i, j)).collect()
}

/// Length by repeated descent. Returns (length, reduced word) where the word
/// multiplies left-to-right to the input element.
pub fn length(cm: &CartanMatrix, w: &WeylElement, step_bound: usize) -> Result<(usize, Vec<usize>)> {
    let n = cm.size();
    let mut cur = w.matrix.clone();
    let mut steps = Vec::new();
    while !cur.is_identity() {
        // descent: smallest i with w(alpha_i) negative
        let mut found = None;
        for i in 0..n {
            let col = column(&cur, i);
            if col.iter().any(|&x| x < 0) {
                if col.iter().any(|&x| x > 0) {
                    return Err(Error::NotInWeylGroup(steps.len()));
                }
                found = Some(i);
                break;
            }
        }
        let Some(i) = found else {
            return Err(Error::NotInWeylGroup(steps.len()));
        };
        cur = cur.mul(&reflect(cm, i).matrix);
        steps.push(i);
        if steps.len() > step_bound {
            return Err(Error::NotInWeylGroup(steps.len()));
        }
    }
    steps.reverse();
    Ok((steps.len(), steps))
}

/// The longest element w_X of a finite-type parabolic, with a reduced word.
pub fn longest_element(cm: &CartanMatrix, x: &[usize]) -> Result<WeylElement> {
    if !cm.is_finite_subset(x) {
        return Err(Error::NotFiniteType(x.to_vec()));
    }
    let n = cm.size();
    let mut w = IMat::identity(n);
    let mut word = Vec::new();
    loop {
        // ascend while some alpha_i (i in X) is still positive under w
        let mut found = None;
        for &i in x {
            let col = column(&w, i);
            if col.iter().any(|&v| v > 0) {
                found = Some(i);
                break;
            }
        }
        match found {
            Some(i) => {
                w = w.mul(&reflect(cm, i).matrix);
                word.push(i);
            }
            None => break,
        }
    }
    // w accumulated by right multiplication, so the push order is already
    // the multiplication order
    Ok(WeylElement { matrix: w, word: Some(word) })
}

/// The opposition involution of a finite-type subset, returned as a full
/// permutation of the node set that is the identity off X.
pub fn opposition_involution(cm: &CartanMatrix, x: &[usize]) -> Result<Vec<usize>> {
    let wx = longest_element(cm, x)?;
    let n = cm.size();
    let mut perm: Vec<usize> = (0..n).collect();
    for &i in x {
        let col = column(&wx.matrix, i);
        // w_X(alpha_i) = -alpha_{oi(i)}
        let mut target = None;
        for (j, &v) in col.iter().enumerate() {
            if v == -1 && x.contains(&j) && target.is_none() {
                target = Some(j);
            }
        }
        let j = target.ok_or_else(|| Error::NotFiniteType(x.to_vec()))?;
        let expected: Vec<i64> = (0..n).map(|k| if k == j { -1 } else { 0 }).collect();
        if col != expected {
            return Err(Error::NotFiniteType(x.to_vec()));
        }
        perm[i] = j;
    }
    Ok(perm)
}

/// All positive roots of a finite-type subset, by orbit closure inside the
/// positive cone.
pub fn positive_roots_finite(cm: &CartanMatrix, x: &[usize]) -> Result<Vec<Vec<i64>>> {
    if !cm.is_finite_subset(x) {
        return Err(Error::NotFiniteType(x.to_vec()));
    }
    let n = cm.size();
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let mut queue: VecDeque<Vec<i64>> = VecDeque::new();
    for &i in x {
        let mut e = vec![0i64; n];
        e[i] = 1;
        seen.insert(e.clone());
        queue.push_back(e);
    }
    let refls: Vec<IMat> = x.iter().map(|&i| reflect(cm, i).matrix).collect();
    while let Some(v) = queue.pop_front() {
        for r in &refls {
            let img = r.apply(&v);
            if img.iter().all(|&c| c >= 0) && !seen.contains(&img) {
                seen.insert(img.clone());
                queue.push_back(img);
            }
        }
    }
    let mut out: Vec<Vec<i64>> = seen.into_iter().collect();
    out.sort_by_key(|v| (height(v), v.clone()));
    Ok(out)
}

/// Positive real roots with height at most `h`, by reflection orbit closure.
/// Every positive real root admits a height-decreasing path to a simple root
/// through positive roots, so the bounded upward closure is complete.
pub fn real_roots(cm: &CartanMatrix, h: usize) -> Vec<Vec<i64>> {
    let n = cm.size();
    let bound = h as i64;
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let mut queue: VecDeque<Vec<i64>> = VecDeque::new();
    for i in 0..n {
        let mut e = vec![0i64; n];
        e[i] = 1;
        seen.insert(e.clone());
        queue.push_back(e);
    }
    let refls: Vec<IMat> = (0..n).map(|i| reflect(cm, i).matrix).collect();
    while let Some(v) = queue.pop_front() {
        for r in &refls {
            let img = r.apply(&v);
            if img.iter().all(|&c| c >= 0) && height(&img) <= bound && !seen.contains(&img) {
                seen.insert(img.clone());
                queue.push_back(img);
            }
        }
    }
    let mut out: Vec<Vec<i64>> = seen.into_iter().collect();
    out.sort_by_key(|v| (height(v), v.clone()));
    out
}

/// A height-bounded (or complete) set of positive roots, real and imaginary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RootSet {
    pub positive_real: Vec<Vec<i64>>,
    pub positive_imaginary: Vec<Vec<i64>>,
    /// True when the set is all of Phi^+ (finite type).
    pub complete: bool,
    pub height_bound: Option<usize>,
}

impl RootSet {
    pub fn contains(&self, v: &[i64]) -> bool {
        let neg: Vec<i64> = v.iter().map(|x| -x).collect();
        let probe = |set: &Vec<Vec<i64>>| set.iter().any(|r| r[..] == v[..] || r[..] == neg[..]);
        probe(&self.positive_real) || probe(&self.positive_imaginary)
    }

    pub fn all_roots(&self) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        for r in self.positive_real.iter().chain(&self.positive_imaginary) {
            out.push(r.clone());
            out.push(r.iter().map(|x| -x).collect());
        }
        out
    }
}

/// Enumerates Phi^+ within a height bound: all real roots plus, for affine
/// type, the multiples of the basic imaginary root delta. Finite type yields
/// the complete system regardless of `h`.
pub fn positive_roots(cm: &CartanMatrix, h: usize) -> RootSet {
    let all: Vec<usize> = (0..cm.size()).collect();
    if cm.is_finite_subset(&all) {
        let pos = positive_roots_finite(cm, &all).expect("finite type");
        return RootSet { positive_real: pos, positive_imaginary: Vec::new(), complete: true, height_bound: None };
    }
    let real = real_roots(cm, h);
    let mut imaginary = Vec::new();
    if let Some(delta) = cm.delta() {
        let dh = height(&delta);
        let mut k = 1i64;
        while k * dh <= h as i64 {
            imaginary.push(delta.iter().map(|x| x * k).collect());
            k += 1;
        }
    }
    RootSet { positive_real: real, positive_imaginary: imaginary, complete: false, height_bound: Some(h) }
}

/// lambda(2 rho^vee_X): the pairing with the sum of positive coroots of X.
fn two_rho_check_pairing(cm: &CartanMatrix, x: &[usize], lambda: &[i64]) -> Result<i64> {
    let pos = positive_roots_finite(cm, x)?;
    let mut acc = Rat::zero();
    for alpha in &pos {
        acc += cm.coroot_pairing(lambda, alpha);
    }
    assert!(acc.is_integer(), "2 rho^vee pairing must be integral");
    Ok(i64::try_from(acc.to_integer()).expect("pairing fits i64"))
}

/// zeta_X(lambda) = (-1)^{lambda(2 rho^vee_X)}.
pub fn zeta_x(cm: &CartanMatrix, x: &[usize], lambda: &[i64]) -> Result<i64> {
    let e = two_rho_check_pairing(cm, x, lambda)?;
    Ok(if e % 2 == 0 { 1 } else { -1 })
}

/// zeta_w(lambda) as the product of (-1)^{lambda(alpha^vee)} over
/// Phi^+ ∩ w(-Phi^+), enumerated from a reduced word.
pub fn zeta_w(cm: &CartanMatrix, w: &WeylElement, lambda: &[i64], step_bound: usize) -> Result<i64> {
    let n = cm.size();
    let (_, word) = length(cm, w, step_bound)?;
    // Phi^+ ∩ w(-Phi^+) = { s_{i1}...s_{i_{t-1}}(alpha_{i_t}) } for the
    // reduced word w = s_{i1} ... s_{ik}
    let mut prefix = IMat::identity(n);
    let mut parity = 0i64;
    for (t, &it) in word.iter().enumerate() {
        let mut e = vec![0i64; n];
        e[it] = 1;
        let alpha = prefix.apply(&e);
        let p = cm.coroot_pairing(lambda, &alpha);
        assert!(p.is_integer());
        parity += i64::try_from(p.to_integer()).expect("pairing fits i64");
        if t + 1 < word.len() {
            prefix = prefix.mul(&reflect(cm, it).matrix);
        }
    }
    Ok(if parity % 2 == 0 { 1 } else { -1 })
}

/// Minimal left coset representative test: l(s_j w) > l(w) for all j in X,
/// equivalently w^{-1}(alpha_j) > 0.
pub fn is_minimal_coset_rep(cm: &CartanMatrix, w: &WeylElement, x: &[usize]) -> Result<bool> {
    if !cm.is_finite_subset(x) {
        return Err(Error::NotFiniteType(x.to_vec()));
    }
    let winv = w.inverse();
    Ok(x.iter().all(|&j| {
        let col = column(&winv.matrix, j);
        col.iter().all(|&c| c >= 0)
    }))
}

/// Does w normalize the parabolic W_X? Decided by checking that w maps the
/// simple roots of X into ±Phi_X.
pub fn normalizes_parabolic(cm: &CartanMatrix, w: &WeylElement, x: &[usize]) -> Result<bool> {
    let pos = positive_roots_finite(cm, x)?;
    let in_pm_phi_x = |v: &[i64]| {
        let neg: Vec<i64> = v.iter().map(|c| -c).collect();
        pos.iter().any(|r| r[..] == v[..] || r[..] == neg[..])
    };
    Ok(x.iter().all(|&j| {
        let col = column(&w.matrix, j);
        in_pm_phi_x(&col)
    }))
}

/// Brute-force enumeration of the group generated by `gens`, as matrices.
pub fn enumerate_group(gens: &[IMat], budget: usize) -> Result<Vec<IMat>> {
    let n = gens.first().map(|g| g.n).unwrap_or(0);
    let mut seen: HashSet<IMat> = HashSet::new();
    let mut queue: VecDeque<IMat> = VecDeque::new();
    let id = IMat::identity(n);
    seen.insert(id.clone());
    queue.push_back(id);
    while let Some(m) = queue.pop_front() {
        for g in gens {
            let next = m.mul(g);
            if !seen.contains(&next) {
                if seen.len() >= budget {
                    return Err(Error::BeyondBruteForce(budget));
                }
                seen.insert(next.clone());
                queue.push_back(next);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// Enumerates the parabolic W_X.
pub fn enumerate_parabolic(cm: &CartanMatrix, x: &[usize], budget: usize) -> Result<Vec<IMat>> {
    if !cm.is_finite_subset(x) {
        return Err(Error::NotFiniteType(x.to_vec()));
    }
    if x.is_empty() {
        return Ok(vec![IMat::identity(cm.size())]);
    }
    let gens: Vec<IMat> = x.iter().map(|&i| reflect(cm, i).matrix).collect();
    enumerate_group(&gens, budget)
}

/// Order of a matrix under repeated multiplication, with a cap.
pub fn matrix_order(m: &IMat, cap: usize) -> Result<usize> {
    let mut acc = m.clone();
    let mut k = 1usize;
    while !acc.is_identity() {
        acc = acc.mul(m);
        k += 1;
        if k > cap {
            return Err(Error::OrderCapExceeded(cap));
        }
    }
    Ok(k)
}

/// Checks the isometry invariant M^T B M = B.
pub fn is_isometry(cm: &CartanMatrix, m: &IMat) -> bool {
    let n = cm.size();
    let b = cm.bilinear_form();
    for i in 0..n {
        for j in 0..n {
            let mut acc: i128 = 0;
            for k in 0..n {
                for l in 0..n {
                    acc += m.get(k, i) as i128 * b[k][l] as i128 * m.get(l, j) as i128;
                }
            }
            if acc != b[i][j] as i128 {
                return false;
            }
        }
    }
    true
}
