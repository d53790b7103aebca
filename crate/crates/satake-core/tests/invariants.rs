//! Property suites: each invariant is exercised on at least a thousand
//! randomized cases at rank <= 4, plus deterministic sweeps over the
//! enumerated diagrams where the statement is about catalogued data.

mod common;

use std::time::Instant;

use num::{BigInt, BigRational, Signed, Zero};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use satake_core::cartan::CartanMatrix;
use satake_core::catalogue::cartan_by_name;
use satake_core::decoration::{
    apply_automorphism, enumerate, fundamental_coweight_pairing, is_compatible,
    is_generalized_satake, is_satake, Decoration, DecorationFilter, EnrichedDecoration,
};
use satake_core::diagram_text::{parse_spec, render_spec};
use satake_core::lie::theta::{theta, triangularity_check};
use satake_core::lie::TruncatedAlgebra;
use satake_core::restricted::{restricted_system, sigma, v_sigma_intersection_check};
use satake_core::scalar::{ratio, Gaussian};
use satake_core::weyl::{
    is_isometry, length, longest_element, positive_roots, positive_roots_finite, reflect,
    zeta_w, zeta_x, WeylElement,
};

const CASES: usize = 1000;

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Random catalogued Cartan matrix of rank <= 4.
fn random_cartan(rng: &mut StdRng) -> CartanMatrix {
    const NAMES: &[&str] = &[
        "A1", "A2", "A3", "A4", "C2", "B3", "C3", "B4", "C4", "D4", "G2", "F4", "A1~", "A2~",
        "A3~", "C2~", "C2~v", "C1~'", "B3~v", "G2~", "G2~v",
    ];
    cartan_by_name(NAMES[rng.gen_range(0..NAMES.len())]).unwrap()
}

fn random_word(rng: &mut StdRng, n: usize, max_len: usize) -> Vec<usize> {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| rng.gen_range(0..n)).collect()
}

fn word_element(cm: &CartanMatrix, word: &[usize]) -> WeylElement {
    let mut w = WeylElement::identity(cm.size());
    for &i in word {
        w = w.compose(&reflect(cm, i));
    }
    w
}

fn random_compatible(rng: &mut StdRng, cm: &CartanMatrix) -> Decoration {
    let all = enumerate(cm, DecorationFilter::Compatible, 12).unwrap();
    all[rng.gen_range(0..all.len())].clone()
}

fn random_vector(rng: &mut StdRng, n: usize) -> Vec<i64> {
    (0..n).map(|_| rng.gen_range(-4..=4)).collect()
}

#[test]
fn isometry_of_weyl_matrices() {
    let t = Instant::now();
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..CASES {
        let cm = random_cartan(&mut rng);
        let w = word_element(&cm, &random_word(&mut rng, cm.size(), 8));
        assert!(is_isometry(&cm, &w.matrix));
    }
    println!("[invariants] isometry: {CASES} cases in {:.2?}", t.elapsed());
}

#[test]
fn length_equals_inversion_count_small_ranks() {
    // cross-check of the two length algorithms on the whole group, rank <= 3
    for name in ["A2", "C2", "G2", "A3"] {
        let cm = cartan_by_name(name).unwrap();
        let gens: Vec<_> = (0..cm.size()).map(|i| reflect(&cm, i).matrix).collect();
        let grp = satake_core::weyl::enumerate_group(&gens, 100_000).unwrap();
        let pos = positive_roots_finite(&cm, &(0..cm.size()).collect::<Vec<_>>()).unwrap();
        for m in grp {
            let w = WeylElement { matrix: m, word: None };
            let (len, _) = length(&cm, &w, 10_000).unwrap();
            let winv = w.inverse();
            let inversions = pos
                .iter()
                .filter(|r| winv.apply(r).iter().any(|&c| c < 0))
                .count();
            assert_eq!(len, inversions, "{name}");
        }
    }
}

#[test]
fn longest_element_conjugation_identity() {
    // w_X s_i = s_{oi(i)} w_X for all i in X, over all finite subsets
    for name in ["A3", "B3", "C4", "D4", "G2", "F4"] {
        let cm = cartan_by_name(name).unwrap();
        let n = cm.size();
        for mask in 0u32..(1 << n) {
            let x: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            if !cm.is_finite_subset(&x) {
                continue;
            }
            let wx = longest_element(&cm, &x).unwrap();
            let oi = satake_core::weyl::opposition_involution(&cm, &x).unwrap();
            for &i in &x {
                let lhs = wx.compose(&reflect(&cm, i));
                let rhs = reflect(&cm, oi[i]).compose(&wx);
                assert_eq!(lhs, rhs, "{name} X={x:?} i={i}");
            }
        }
    }
}

#[test]
fn zeta_characters_agree() {
    let mut rng = StdRng::seed_from_u64(13);
    let mut cases = 0usize;
    while cases < CASES {
        let cm = random_cartan(&mut rng);
        let n = cm.size();
        let mask = rng.gen_range(0u32..(1 << n));
        let x: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        if !cm.is_finite_subset(&x) {
            continue;
        }
        let wx = longest_element(&cm, &x).unwrap();
        let lam = random_vector(&mut rng, n);
        assert_eq!(
            zeta_x(&cm, &x, &lam).unwrap(),
            zeta_w(&cm, &wx, &lam, 10_000).unwrap()
        );
        cases += 1;
    }
}

#[test]
fn sigma_involution_and_bar_algebra() {
    let t = Instant::now();
    let mut rng = StdRng::seed_from_u64(17);
    for _ in 0..CASES {
        let cm = random_cartan(&mut rng);
        let dec = random_compatible(&mut rng, &cm);
        let sg = sigma(&dec).unwrap();
        // sigma^2 = id, sigma is an isometry, sigma = -id on V_X
        assert!(sg.matrix.mul(&sg.matrix).is_identity());
        assert!(is_isometry(&cm, &sg.matrix));
        for &j in &dec.x {
            let mut e = vec![0i64; cm.size()];
            e[j] = 1;
            let img = sg.matrix.apply(&e);
            assert!(img.iter().zip(&e).all(|(a, b)| *a == -*b) || {
                // -id on the span, checked via bar(alpha_j) = 0
                sg.bar_int(&e).iter().all(|c| c.is_zero())
            });
        }
        // bar is idempotent and self-adjoint: (bar b, bar c) = (bar b, c) = (b, bar c)
        let b = random_vector(&mut rng, cm.size());
        let c = random_vector(&mut rng, cm.size());
        let bb = sg.bar_int(&b);
        let bc = sg.bar_int(&c);
        assert_eq!(sg.bar(&bb), bb);
        let to_rat = |v: &[i64]| -> Vec<BigRational> { v.iter().map(|&x| rat(x)).collect() };
        let p1 = cm.pairing_rat(&bb, &bc);
        let p2 = cm.pairing_rat(&bb, &to_rat(&c));
        let p3 = cm.pairing_rat(&to_rat(&b), &bc);
        assert_eq!(p1, p2);
        assert_eq!(p2, p3);
    }
    println!("[invariants] sigma/bar: {CASES} cases in {:.2?}", t.elapsed());
}

#[test]
fn component_lemma_and_wx_formula() {
    // the union of components of X ∪ {i, tau(i)} meeting the orbit is
    // connected or of type A1 x A1, and the w_X coefficient formula holds
    let mut rng = StdRng::seed_from_u64(19);
    let mut cases = 0usize;
    while cases < CASES {
        let cm = random_cartan(&mut rng);
        let dec = random_compatible(&mut rng, &cm);
        let n = cm.size();
        let outside: Vec<usize> = (0..n).filter(|&i| !dec.in_x(i)).collect();
        if outside.is_empty() {
            continue;
        }
        let i = outside[rng.gen_range(0..outside.len())];
        let ti = dec.tau[i];
        let mut xi = dec.x.clone();
        xi.push(i);
        if ti != i {
            xi.push(ti);
        }
        let comps = cm.components(&xi);
        let z: Vec<Vec<usize>> = comps
            .into_iter()
            .filter(|c| c.contains(&i) || c.contains(&ti))
            .collect();
        if z.len() > 1 {
            // must be exactly A1 x A1: two singletons {i}, {tau(i)}
            let total: usize = z.iter().map(|c| c.len()).sum();
            assert_eq!(z.len(), 2, "Z has more than two components");
            assert_eq!(total, 2, "disconnected Z must be A1 x A1");
        }
        // w_X(alpha_i) = alpha_i + sum_j v_ij alpha_j with
        // v_ij = -(alpha_i + alpha_tau(i))(kappa_j) >= 0
        let wx = longest_element(&cm, &dec.x).unwrap();
        let mut e = vec![0i64; n];
        e[i] = 1;
        let img = wx.apply(&e);
        let mut pair_sum = vec![0i64; n];
        pair_sum[i] += 1;
        pair_sum[ti] += 1;
        for &j in &dec.x {
            let v = -fundamental_coweight_pairing(&cm, &dec.x, j, &pair_sum);
            assert!(v.is_integer() && !v.is_negative());
            assert_eq!(rat(img[j]), v);
        }
        cases += 1;
    }
}

#[test]
fn theta_tau_composition_vanishes_on_lattice() {
    // (theta* - id)(tau - id) = 0 as matrices on the root lattice
    let mut rng = StdRng::seed_from_u64(23);
    for _ in 0..CASES {
        let cm = random_cartan(&mut rng);
        let dec = random_compatible(&mut rng, &cm);
        let n = cm.size();
        let sg = sigma(&dec).unwrap();
        let v = random_vector(&mut rng, n);
        let tau_v: Vec<i64> = {
            let mut out = vec![0i64; n];
            for i in 0..n {
                out[dec.tau[i]] += v[i];
            }
            out
        };
        let diff: Vec<i64> = tau_v.iter().zip(&v).map(|(a, b)| a - b).collect();
        // theta* = -sigma, so (theta* - id)(diff) = -(sigma + id)(diff)
        let s_diff = sg.matrix.apply(&diff);
        let total: Vec<i64> = s_diff.iter().zip(&diff).map(|(a, b)| a + b).collect();
        assert!(total.iter().all(|&x| x == 0));
    }
}

#[test]
fn restricted_inner_products_sign() {
    // (bar alpha_i, bar alpha_j) > 0 iff i = j in tilde-I
    let mut rng = StdRng::seed_from_u64(29);
    let mut cases = 0usize;
    while cases < CASES {
        let cm = random_cartan(&mut rng);
        let dec = random_compatible(&mut rng, &cm);
        let rs = restricted_system(&dec, 6).unwrap();
        for (p, &i) in rs.i_star.iter().enumerate() {
            for (q, &j) in rs.i_star.iter().enumerate() {
                let positive = rs.gram[p][q].is_positive();
                let expected = i == j && rs.tilde_i.contains(&i);
                assert_eq!(positive, expected, "{dec:?} i={i} j={j}");
                cases += 1;
            }
        }
    }
}

#[test]
fn phi_meets_v_minus_sigma_in_phi_x() {
    let mut rng = StdRng::seed_from_u64(31);
    let mut cases = 0usize;
    while cases < CASES {
        let cm = random_cartan(&mut rng);
        let dec = random_compatible(&mut rng, &cm);
        let sg = sigma(&dec).unwrap();
        let roots = positive_roots(&cm, 6);
        let phi_x: Vec<Vec<i64>> = positive_roots_finite(&cm, &dec.x).unwrap();
        for r in roots.positive_real.iter().chain(&roots.positive_imaginary) {
            let img = sg.matrix.apply(r);
            let negated: Vec<i64> = img.iter().map(|x| -x).collect();
            assert_eq!(negated == *r, phi_x.contains(r));
            cases += 1;
        }
        assert!(v_sigma_intersection_check(&dec).unwrap());
    }
}

#[test]
fn theta_square_twist_randomized() {
    // theta^2 = Ad(chi^2 zeta_X) degree-wise, over random decorations and
    // characters on cached small algebras
    let t = Instant::now();
    let mut rng = StdRng::seed_from_u64(37);
    let pool = ["A1", "A2", "C2", "G2", "A3"];
    let algebras: Vec<(CartanMatrix, TruncatedAlgebra)> = pool
        .iter()
        .map(|name| {
            let cm = cartan_by_name(name).unwrap();
            let alg = TruncatedAlgebra::build_finite(&cm);
            (cm, alg)
        })
        .collect();
    let chi_values = [
        Gaussian::one(),
        Gaussian::from_int(-1),
        Gaussian::from_int(2),
        Gaussian::from_rat(ratio(1, 2)),
        Gaussian::i(),
        -Gaussian::i(),
    ];
    let mut cases = 0usize;
    while cases < CASES {
        let (cm, alg) = &algebras[rng.gen_range(0..algebras.len())];
        let dec = random_compatible(&mut rng, cm);
        // random chi on orbit representatives, extended consistently
        let sg = dec.sigma_matrix().unwrap();
        let mut chi = vec![Gaussian::one(); cm.size()];
        for i in dec.i_star() {
            let v = chi_values[rng.gen_range(0..chi_values.len())].clone();
            let ti = dec.tau[i];
            if ti == i {
                // sigma(alpha_i) = alpha_i + X-part; the fixed-character
                // condition then pins chi(alpha_i)^2 via the X-values (kept
                // at 1), so only ±1 and ±i survive
                let mut e = vec![0i64; cm.size()];
                e[i] = 1;
                let si = sg.apply(&e);
                if si == e {
                    if v.norm() == rat(1) {
                        chi[i] = v;
                    }
                } else {
                    // quadratic constraint: keep chi = 1
                }
            } else {
                chi[i] = v.clone();
                chi[ti] = v.inv();
            }
        }
        let edec = EnrichedDecoration { dec, chi };
        if edec.validate_chi().is_err() {
            continue;
        }
        let th = theta(&alg, &edec).unwrap();
        assert!(th.square_twist_check().unwrap());
        assert!(th.degree_transport_consistent());
        cases += 1;
    }
    println!("[invariants] theta square twist: {CASES} cases in {:.2?}", t.elapsed());
}

#[test]
fn triangularity_randomized() {
    let mut rng = StdRng::seed_from_u64(41);
    let pool = ["A2", "C2", "G2", "A3"];
    let algebras: Vec<(CartanMatrix, TruncatedAlgebra)> = pool
        .iter()
        .map(|name| {
            let cm = cartan_by_name(name).unwrap();
            let alg = TruncatedAlgebra::build_finite(&cm);
            (cm, alg)
        })
        .collect();
    let mut cases = 0usize;
    while cases < CASES {
        let (cm, alg) = &algebras[rng.gen_range(0..algebras.len())];
        let dec = random_compatible(&mut rng, cm);
        let edec = EnrichedDecoration::trivial_chi(dec);
        let th = theta(&alg, &edec).unwrap();
        // random word within the verified height
        let len = rng.gen_range(1..=alg.height.min(4));
        let word: Vec<usize> = (0..len).map(|_| rng.gen_range(0..cm.size())).collect();
        assert!(triangularity_check(&th, &word).unwrap());
        cases += 1;
    }
}

#[test]
fn satake_diagrams_are_generalized_satake_up_to_rank_6() {
    for name in ["A4", "A5", "A6", "B5", "C6", "D6", "E6", "F4", "G2", "A3~", "C3~", "D4~"] {
        let cm = cartan_by_name(name).unwrap();
        for dec in enumerate(&cm, DecorationFilter::Satake, 12).unwrap() {
            assert!(is_generalized_satake(&dec).unwrap(), "{name}");
        }
        // the automorphism action preserves the generalized Satake property
        let auts = cm.diagram_automorphisms();
        for dec in enumerate(&cm, DecorationFilter::GeneralizedSatake, 12).unwrap() {
            for psi in &auts {
                let moved = apply_automorphism(&dec, psi);
                assert!(is_compatible(&moved));
                assert!(is_generalized_satake(&moved).unwrap(), "{name}");
            }
        }
    }
}

#[test]
fn weyl_group_orders_match_catalogue() {
    for (name, order) in [("A4", 120), ("D4", 192), ("F4", 1152), ("G2", 12), ("B4", 384)] {
        let cm = cartan_by_name(name).unwrap();
        let gens: Vec<_> = (0..cm.size()).map(|i| reflect(&cm, i).matrix).collect();
        assert_eq!(
            satake_core::weyl::enumerate_group(&gens, 100_000).unwrap().len(),
            order,
            "{name}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Round-trip of the text grammar over random decorations.
    #[test]
    fn spec_roundtrip(seed in 0u64..5000) {
        let mut rng = StdRng::seed_from_u64(seed);
        let cm = random_cartan(&mut rng);
        let dec = random_compatible(&mut rng, &cm);
        let edec = EnrichedDecoration::trivial_chi(dec);
        let rendered = render_spec(&edec);
        let back = parse_spec(&rendered).unwrap();
        prop_assert_eq!(back, edec);
    }

    /// Relabelled Cartan matrices classify identically.
    #[test]
    fn classification_is_relabelling_invariant(seed in 0u64..5000) {
        let mut rng = StdRng::seed_from_u64(seed);
        let cm = random_cartan(&mut rng);
        let n = cm.size();
        // random permutation
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.gen_range(0..=i);
            perm.swap(i, j);
        }
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| cm.a(perm[i], perm[j])).collect())
            .collect();
        let relabeled = CartanMatrix::new(&rows).unwrap();
        prop_assert_eq!(relabeled.classify(), cm.classify());
    }
}

#[test]
fn every_satake_filter_is_subset_of_gsat_filter() {
    for name in ["A4", "C3", "D4", "G2~v"] {
        let cm = cartan_by_name(name).unwrap();
        let sat = enumerate(&cm, DecorationFilter::Satake, 12).unwrap();
        let gsat = enumerate(&cm, DecorationFilter::GeneralizedSatake, 12).unwrap();
        for d in &sat {
            assert!(gsat.contains(d));
            assert!(is_satake(d).unwrap());
        }
    }
}
