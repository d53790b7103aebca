//! Structural verification on the truncated algebra: the pseudo-fixed-point
//! decomposition of k, the Iwasawa decomposition, and the derived-subalgebra
//! split, all as exact linear algebra inside a height window.

use std::collections::HashMap;

use serde::Serialize;

use crate::decoration::{is_enriched_gsat, special_orbits};
use crate::error::{Error, Result};
use crate::linalg::{kernel_field, Span};
use crate::scalar::Gaussian;
use crate::weyl::positive_roots_finite;

use super::algebra::{deg_height, is_zero_deg, Deg, Elem, TruncatedAlgebra};
use super::theta::ThetaMap;

/// Flattening of elements over a fixed degree window.
struct WindowSpace {
    offsets: HashMap<Deg, usize>,
    total: usize,
}

impl WindowSpace {
    fn new(alg: &TruncatedAlgebra, degs: Vec<Deg>) -> Self {
        let mut offsets = HashMap::new();
        let mut total = 0usize;
        for d in &degs {
            offsets.insert(d.clone(), total);
            total += alg.dim(d).unwrap();
        }
        WindowSpace { offsets, total }
    }

    fn flatten(&self, x: &Elem) -> Option<Vec<Gaussian>> {
        let mut v = vec![Gaussian::zero(); self.total];
        for (d, coords) in &x.parts {
            let off = *self.offsets.get(d)?;
            for (k, c) in coords.iter().enumerate() {
                v[off + k] = c.clone();
            }
        }
        Some(v)
    }
}

fn overflow(alg: &TruncatedAlgebra) -> Error {
    Error::TruncationOverflow {
        height: alg.working_height,
        suggested: alg.working_height + 4,
    }
}

/// Basis of the theta-eigenspace on the Cartan part (sign +1 for h^theta,
/// -1 for h^{-theta}).
fn cartan_eigenspace(th: &ThetaMap<'_>, sign: i64) -> Result<Vec<Elem>> {
    let alg = th.alg;
    let n = alg.n();
    let zero = vec![0i32; n];
    let mut cols: Vec<Vec<Gaussian>> = Vec::new();
    for i in 0..n {
        let img = th.apply(&alg.h(i))?;
        let mut col = vec![Gaussian::zero(); n];
        for (d, v) in &img.parts {
            assert!(is_zero_deg(d), "theta stabilizes the Cartan part");
            col = v.clone();
        }
        let hi: Vec<Gaussian> = (0..n)
            .map(|k| if k == i { Gaussian::from_int(sign) } else { Gaussian::zero() })
            .collect();
        let diff: Vec<Gaussian> = col.iter().zip(&hi).map(|(a, b)| a - b).collect();
        cols.push(diff);
    }
    let rows: Vec<Vec<Gaussian>> =
        (0..n).map(|r| (0..n).map(|c| cols[c][r].clone()).collect()).collect();
    let kernel = kernel_field(&rows, n);
    Ok(kernel
        .into_iter()
        .map(|kv| {
            let mut e = Elem::zero();
            e.insert_part(zero.clone(), kv);
            e
        })
        .collect())
}

/// Basis of n^+_X inside the window (complete, since X is finite type).
fn n_plus_x_basis(alg: &TruncatedAlgebra, x: &[usize]) -> Result<Vec<Elem>> {
    let phi_x = positive_roots_finite(&alg.cartan, x)?;
    let mut out = Vec::new();
    for root in &phi_x {
        let content: Deg = root.iter().map(|&c| c as i32).collect();
        if deg_height(&content) > alg.working_height as i32 {
            return Err(overflow(alg));
        }
        let dim = alg.dim(&content).unwrap_or(0);
        for idx in 0..dim {
            out.push(alg.basis_elem(&content, idx));
        }
    }
    Ok(out)
}

/// The bookkeeping words J up to a height cap (I is always included).
fn jay_words(alg: &TruncatedAlgebra, cap: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for d in alg.window_degrees(cap) {
        if deg_height(&d) <= 0 {
            continue;
        }
        if let Some(words) = alg.pivot_words(&d) {
            for w in words {
                out.push(w.iter().map(|&l| l as usize).collect());
            }
        }
    }
    out
}

/// The generators of k: h^theta, n^+_X, and the b_i.
fn k_generators(th: &ThetaMap<'_>) -> Result<Vec<Elem>> {
    let alg = th.alg;
    let mut gens = cartan_eigenspace(th, 1)?;
    gens.extend(n_plus_x_basis(alg, &th.edec.dec.x)?);
    for i in 0..alg.n() {
        gens.push(th.b_generator(i)?);
    }
    Ok(gens)
}

/// Candidate basis of k per the decomposition theorem: n^+_X, h^theta, and
/// the b-words over J up to the cap.
fn k_candidate(th: &ThetaMap<'_>, cap: usize) -> Result<Vec<Elem>> {
    let alg = th.alg;
    let mut cand = n_plus_x_basis(alg, &th.edec.dec.x)?;
    cand.extend(cartan_eigenspace(th, 1)?);
    for w in jay_words(alg, cap) {
        let b = th.b_word(&w)?;
        b.require_exact()?;
        cand.push(b);
    }
    Ok(cand)
}

/// Bounded bracket closure of the generators; returns the collected span
/// elements and whether any bracket overflowed the window (skipped).
fn bracket_closure(
    alg: &TruncatedAlgebra,
    window: &WindowSpace,
    gens: &[Elem],
    max_rounds: usize,
) -> (Vec<Elem>, Span<Gaussian>, bool) {
    let mut span = Span::<Gaussian>::new(window.total);
    let mut elements: Vec<Elem> = Vec::new();
    let mut frontier: Vec<Elem> = Vec::new();
    let mut overflowed = false;
    for g in gens {
        if let Some(v) = window.flatten(g) {
            if span.insert(v) {
                elements.push(g.clone());
                frontier.push(g.clone());
            }
        } else {
            overflowed = true;
        }
    }
    for _ in 0..max_rounds {
        if frontier.is_empty() {
            break;
        }
        let mut next = Vec::new();
        for g in gens {
            for x in &frontier {
                let b = alg.bracket(g, x);
                if b.truncated {
                    overflowed = true;
                    continue;
                }
                if b.is_zero() {
                    continue;
                }
                match window.flatten(&b) {
                    Some(v) => {
                        if span.insert(v) {
                            elements.push(b.clone());
                            next.push(b);
                        }
                    }
                    None => overflowed = true,
                }
            }
        }
        frontier = next;
    }
    (elements, span, overflowed)
}

/// Report of the pseudo-fixed-point verification.
#[derive(Debug, Clone, Serialize)]
pub struct KReport {
    pub enriched_gsat: bool,
    /// The candidate space is a module for the generators: the span of
    /// products of generators agrees with n^+_X + h^theta + span(b_J).
    pub spanning_identity: bool,
    pub candidate_independent: bool,
    /// Pseudo-fixed-point condition (1): the Cartan part of the generated
    /// subalgebra is exactly h^theta.
    pub cartan_condition: bool,
    /// Pseudo-fixed-point condition (2): dim(k ∩ (g_a + theta(g_a))) equals
    /// dim g_a on the sampled root spaces.
    pub root_space_condition: bool,
    /// Every Serre deviation lies in the allowed filtration piece.
    pub deviations_in_filtration: bool,
    /// The closure saw brackets leaving the window; failure verdicts remain
    /// exact, success relies on the spanning identity.
    pub closure_truncated: bool,
}

impl KReport {
    /// Consistency with the decomposition theorem: the spanning identity,
    /// the Cartan condition and the deviation containment hold exactly when
    /// the diagram is an enriched generalized Satake diagram. The root-space
    /// dimension condition is reported but not folded into the verdict: on
    /// sigma-fixed root sectors the symmetrized vectors can carry coroot
    /// tails in h^{-theta}, so it can fail even for generalized Satake data
    /// (exact counterexamples exist already in rank 2).
    pub fn consistent(&self) -> bool {
        let positive =
            self.spanning_identity && self.cartan_condition && self.deviations_in_filtration;
        positive == self.enriched_gsat
    }
}

/// Verifies the decomposition of k inside the window: the spanning identity,
/// the two pseudo-fixed-point conditions, and the filtration containment of
/// the Serre deviations.
pub fn k_check(th: &ThetaMap<'_>, h_safe: usize) -> Result<KReport> {
    let alg = th.alg;
    let dec = &th.edec.dec;
    let window = WindowSpace::new(alg, alg.window_degrees(alg.working_height));
    let gens = k_generators(th)?;
    let cap2 = (h_safe + 2).min(alg.working_height);
    let candidate = k_candidate(th, cap2)?;
    let mut cand_span = Span::<Gaussian>::new(window.total);
    let mut independent = true;
    for c in &candidate {
        let v = window.flatten(c).ok_or_else(|| overflow(alg))?;
        if !cand_span.insert(v) {
            independent = false;
        }
    }
    // module property: [g, c] stays in the candidate span for candidates
    // capped at h_safe
    let small = k_candidate(th, h_safe)?;
    let mut spanning = true;
    'outer: for g in &gens {
        for c in &small {
            let b = alg.bracket(g, c);
            b.require_exact().map_err(|_| overflow(alg))?;
            if b.is_zero() {
                continue;
            }
            let v = window.flatten(&b).ok_or_else(|| overflow(alg))?;
            if !cand_span.contains(&v) {
                spanning = false;
                break 'outer;
            }
        }
    }
    // closure-based pseudo-fixed-point conditions
    let (closure_elems, _, closure_truncated) =
        bracket_closure(alg, &window, &gens, 2 * window.total.max(4));
    let n = alg.n();
    let zero = vec![0i32; n];
    let h_theta = cartan_eigenspace(th, 1)?;
    let mut h_span = Span::<Gaussian>::new(n);
    for e in &h_theta {
        h_span.insert(e.parts[&zero].clone());
    }
    // condition (1): pure-Cartan vectors inside the closure span lie in
    // h^theta. Reorder coordinates with the Cartan block last and compute
    // the kernel of the non-Cartan head over the closure rows.
    let mut cartan_ok = true;
    {
        let zero_off = window.offsets[&zero];
        let reorder = |v: &[Gaussian]| -> Vec<Gaussian> {
            let mut out = Vec::with_capacity(window.total);
            for (k, x) in v.iter().enumerate() {
                if !(zero_off..zero_off + n).contains(&k) {
                    out.push(x.clone());
                }
            }
            out.extend_from_slice(&v[zero_off..zero_off + n]);
            out
        };
        let mut reduced_rows: Vec<Vec<Gaussian>> = Vec::new();
        let mut span = Span::<Gaussian>::new(window.total);
        for e in &closure_elems {
            let v = reorder(&window.flatten(e).ok_or_else(|| overflow(alg))?);
            if span.insert(v.clone()) {
                reduced_rows.push(v);
            }
        }
        let head = window.total - n;
        let m: Vec<Vec<Gaussian>> = (0..head)
            .map(|r| reduced_rows.iter().map(|row| row[r].clone()).collect())
            .collect();
        let kernel = kernel_field(&m, reduced_rows.len());
        for combo in kernel {
            let mut tail = vec![Gaussian::zero(); n];
            for (c, row) in combo.iter().zip(&reduced_rows) {
                if !c.is_zero() {
                    for k in 0..n {
                        tail[k] += &(c * &row[head + k]);
                    }
                }
            }
            if tail.iter().any(|x| !x.is_zero()) && !h_span.contains(&tail) {
                cartan_ok = false;
            }
        }
    }
    // condition (2): dim(k ∩ (g_a + theta(g_a))) = dim g_a on sampled alpha
    let mut root_ok = true;
    let mut k_span = Span::<Gaussian>::new(window.total);
    let mut k_dim = 0usize;
    for e in &closure_elems {
        let v = window.flatten(e).ok_or_else(|| overflow(alg))?;
        if k_span.insert(v) {
            k_dim += 1;
        }
    }
    let sample_heights = h_safe.min(3);
    for d in alg.window_degrees(sample_heights) {
        if is_zero_deg(&d) || deg_height(&d) >= 0 {
            continue;
        }
        let dim_ga = alg.dim(&d).unwrap();
        if dim_ga == 0 {
            continue;
        }
        let mut p_span = Span::<Gaussian>::new(window.total);
        let mut p_dim = 0usize;
        let mut sum_span = k_span.clone();
        let mut sum_dim = k_dim;
        for idx in 0..dim_ga {
            let x = alg.basis_elem(&d, idx);
            for y in [x.clone(), th.apply(&x)?] {
                let v = window.flatten(&y).ok_or_else(|| overflow(alg))?;
                if p_span.insert(v.clone()) {
                    p_dim += 1;
                }
                if sum_span.insert(v) {
                    sum_dim += 1;
                }
            }
        }
        let inter = k_dim + p_dim - sum_dim;
        if inter != dim_ga {
            root_ok = false;
        }
    }
    // Serre deviations land in n^+_X + h^theta + span{b_w : a_w < lambda_ij}
    let mut deviations_ok = true;
    'dev: for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let m_ij = (1 - alg.cartan.a(i, j)) as usize;
            let bi = th.b_generator(i)?;
            let bj = th.b_generator(j)?;
            let mut devn = bj.clone();
            for _ in 0..m_ij {
                devn = alg.bracket(&bi, &devn);
            }
            devn.require_exact().map_err(|_| overflow(alg))?;
            if devn.is_zero() {
                continue;
            }
            let mut lambda = vec![0i32; n];
            lambda[i] = 1;
            lambda[j] += m_ij as i32;
            let mut allowed = n_plus_x_basis(alg, &dec.x)?;
            allowed.extend(cartan_eigenspace(th, 1)?);
            for w in jay_words(alg, alg.working_height) {
                let mut content = vec![0i32; n];
                for &l in &w {
                    content[l] += 1;
                }
                let delta: Vec<i32> = lambda.iter().zip(&content).map(|(a, b)| a - b).collect();
                if delta.iter().all(|&x| x >= 0) && deg_height(&delta) > 0 {
                    allowed.push(th.b_word(&w)?);
                }
            }
            let mut allowed_span = Span::<Gaussian>::new(window.total);
            for e in &allowed {
                let v = window.flatten(e).ok_or_else(|| overflow(alg))?;
                allowed_span.insert(v);
            }
            let v = window.flatten(&devn).ok_or_else(|| overflow(alg))?;
            if !allowed_span.contains(&v) {
                deviations_ok = false;
                break 'dev;
            }
        }
    }
    Ok(KReport {
        enriched_gsat: is_enriched_gsat(&th.edec)?,
        spanning_identity: spanning,
        candidate_independent: independent,
        cartan_condition: cartan_ok,
        root_space_condition: root_ok,
        deviations_in_filtration: deviations_ok,
        closure_truncated,
    })
}

/// Per-degree entry of the Iwasawa report.
#[derive(Debug, Clone, Serialize)]
pub struct IwasawaDegree {
    pub degree: Deg,
    pub dim_g: usize,
    pub dim_n_plus_x: usize,
    pub dim_n_plus_theta: usize,
    pub b_words: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct IwasawaReport {
    pub holds: bool,
    pub enriched_gsat: bool,
    pub closure_consistent: bool,
    pub direct_sum_rank: usize,
    pub window_dimension: usize,
    pub degrees: Vec<IwasawaDegree>,
}

/// Verifies g = k + h^{-theta} + n^+_theta (direct) inside the window: the
/// candidate k-basis must complement the other two factors exactly, and the
/// bracket closure of the k-generators must stay inside the candidate span.
pub fn iwasawa_check(th: &ThetaMap<'_>, h_safe: usize) -> Result<IwasawaReport> {
    let alg = th.alg;
    let dec = &th.edec.dec;
    // window: lowering side capped at h_safe, raising side at the working
    // height so that positive tails of the b-words stay inside
    let mut degs: Vec<Deg> = Vec::new();
    for d in alg.window_degrees(alg.working_height) {
        let ht = deg_height(&d);
        if ht < 0 && -ht <= h_safe as i32 {
            degs.push(d);
        } else if ht >= 0 {
            degs.push(d);
        }
    }
    let window = WindowSpace::new(alg, degs.clone());
    let candidate = k_candidate(th, h_safe)?;
    let h_minus = cartan_eigenspace(th, -1)?;
    let mut n_theta: Vec<Elem> = Vec::new();
    let mut per_degree: Vec<IwasawaDegree> = Vec::new();
    for d in &degs {
        let ht = deg_height(d);
        let dim = alg.dim(d).unwrap();
        let supported_in_x =
            ht > 0 && d.iter().enumerate().all(|(k, &c)| c == 0 || dec.in_x(k));
        if ht > 0 && !supported_in_x {
            for idx in 0..dim {
                n_theta.push(alg.basis_elem(d, idx));
            }
        }
        per_degree.push(IwasawaDegree {
            degree: d.clone(),
            dim_g: dim,
            dim_n_plus_x: if supported_in_x { dim } else { 0 },
            dim_n_plus_theta: if ht > 0 && !supported_in_x { dim } else { 0 },
            b_words: if ht < 0 { dim } else { 0 },
        });
    }
    let mut span = Span::<Gaussian>::new(window.total);
    let mut rank = 0usize;
    let mut columns = 0usize;
    for e in candidate.iter().chain(&h_minus).chain(&n_theta) {
        let v = window.flatten(e).ok_or_else(|| overflow(alg))?;
        columns += 1;
        if span.insert(v) {
            rank += 1;
        }
    }
    let direct_sum = rank == window.total && columns == window.total;
    // closure consistency: generated k stays in the candidate span
    let full_window = WindowSpace::new(alg, alg.window_degrees(alg.working_height));
    let gens = k_generators(th)?;
    let big_candidate = k_candidate(th, alg.working_height.min(h_safe + 2))?;
    let mut cand_span = Span::<Gaussian>::new(full_window.total);
    for c in &big_candidate {
        let v = full_window.flatten(c).ok_or_else(|| overflow(alg))?;
        cand_span.insert(v);
    }
    let (closure_elems, _, _) = bracket_closure(alg, &full_window, &gens, 6);
    let mut closure_consistent = true;
    for e in &closure_elems {
        // only elements inside the comparable window are decisive
        if e.parts.keys().any(|d| {
            let ht = deg_height(d);
            ht < 0 && -ht > h_safe as i32
        }) {
            continue;
        }
        let v = full_window.flatten(e).ok_or_else(|| overflow(alg))?;
        if !cand_span.contains(&v) {
            closure_consistent = false;
        }
    }
    let enriched = is_enriched_gsat(&th.edec)?;
    Ok(IwasawaReport {
        holds: direct_sum && closure_consistent,
        enriched_gsat: enriched,
        closure_consistent,
        direct_sum_rank: rank,
        window_dimension: window.total,
        degrees: per_degree,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct KPrimeReport {
    pub k_dimension_in_window: usize,
    pub derived_dimension: usize,
    pub codimension: usize,
    pub expected_codimension: usize,
    pub complement_matches: bool,
}

/// The derived subalgebra of k has codimension |I_diff| + |I_nsf| in
/// k ∩ g' (our realization is the derived algebra, so k ∩ g' = k), with
/// complement spanned by the special Cartan differences and the
/// nonstandard-free b_j. Verified against the explicit basis: the listed
/// k'-basis must lie in the bracket span, split off the complement exactly,
/// and the complement must stay outside the bracket span.
pub fn kprime_split(th: &ThetaMap<'_>, h_safe: usize) -> Result<KPrimeReport> {
    let alg = th.alg;
    let dec = &th.edec.dec;
    if !is_enriched_gsat(&th.edec)? {
        return Err(Error::NotGeneralizedSatake);
    }
    let report = special_orbits(dec, None)?;
    let window = WindowSpace::new(alg, alg.window_degrees(alg.working_height));
    let candidate = k_candidate(th, h_safe)?;
    let mut k_span = Span::<Gaussian>::new(window.total);
    let mut k_dim = 0usize;
    for e in &candidate {
        let v = window.flatten(e).ok_or_else(|| overflow(alg))?;
        if k_span.insert(v) {
            k_dim += 1;
        }
    }
    // bracket span of candidate pairs (window-representable ones)
    let mut derived = Span::<Gaussian>::new(window.total);
    let mut derived_truncated = false;
    for (a, x) in candidate.iter().enumerate() {
        for y in candidate.iter().skip(a + 1) {
            let b = alg.bracket(x, y);
            if b.truncated {
                derived_truncated = true;
                continue;
            }
            if b.is_zero() {
                continue;
            }
            match window.flatten(&b) {
                Some(v) => {
                    derived.insert(v);
                }
                None => derived_truncated = true,
            }
        }
    }
    // the listed k' basis: n^+_X, h_i (i in X), non-special Cartan
    // differences, and the b-words outside I_nsf
    let mut listed: Vec<Elem> = n_plus_x_basis(alg, &dec.x)?;
    for &i in &dec.x {
        listed.push(alg.h(i));
    }
    for &i in &report.i_star {
        if dec.tau[i] != i && !report.i_diff.contains(&i) {
            listed.push(alg.h(i).sub(&alg.h(dec.tau[i])));
        }
    }
    for w in jay_words(alg, h_safe) {
        if w.len() == 1 && report.i_nsf.contains(&w[0]) {
            continue;
        }
        listed.push(th.b_word(&w)?);
    }
    // the special complement
    let mut complement: Vec<Elem> = Vec::new();
    for &i in &report.i_diff {
        complement.push(alg.h(i).sub(&alg.h(dec.tau[i])));
    }
    for &j in &report.i_nsf {
        complement.push(th.b_generator(j)?);
    }
    // every listed element must arise from brackets, no complement element may
    let mut listed_in_derived = true;
    let mut listed_span = Span::<Gaussian>::new(window.total);
    let mut listed_rank = 0usize;
    for e in &listed {
        let v = window.flatten(e).ok_or_else(|| overflow(alg))?;
        if !derived.contains(&v) {
            listed_in_derived = false;
        }
        if listed_span.insert(v) {
            listed_rank += 1;
        }
    }
    let mut complement_outside = true;
    let mut split_span = listed_span.clone();
    let mut split_rank = listed_rank;
    for e in &complement {
        let v = window.flatten(e).ok_or_else(|| overflow(alg))?;
        if derived.contains(&v) {
            complement_outside = false;
        }
        if split_span.insert(v) {
            split_rank += 1;
        }
    }
    let expected = report.i_diff.len() + report.i_nsf.len();
    let splits_exactly = split_rank == k_dim
        && listed_rank + complement.len() == k_dim
        && candidate.iter().all(|e| {
            window
                .flatten(e)
                .map(|v| split_span.contains(&v))
                .unwrap_or(false)
        });
    let complement_matches =
        listed_in_derived && complement_outside && splits_exactly && !derived_truncated;
    Ok(KPrimeReport {
        k_dimension_in_window: k_dim,
        derived_dimension: listed_rank,
        codimension: k_dim - listed_rank,
        expected_codimension: expected,
        complement_matches,
    })
}
