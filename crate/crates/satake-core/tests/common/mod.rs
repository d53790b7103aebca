//! Shared oracles for the integration suites. These stay independent of the
//! implementation paths they cross-check: root multiplicities come from the
//! Peterson recursion, and the rank-2 deviation values from the defining
//! 3x3 representation.

use std::collections::BTreeMap;

use num::{BigInt, BigRational, Zero};
use satake_core::cartan::CartanMatrix;

type Rat = BigRational;

fn rat(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// Root multiplicities by the Peterson recursion:
///   (beta, beta - 2 rho) c_beta = sum_{beta' + beta'' = beta} (beta', beta'') c_beta' c_beta''
/// with c_beta = sum_{k | beta} mult(beta/k)/k and (rho, alpha_i) = eps_i.
pub fn peterson_multiplicities(cm: &CartanMatrix, height: usize) -> BTreeMap<Vec<i32>, i64> {
    let n = cm.size();
    let mut contents: Vec<Vec<i32>> = Vec::new();
    fn gen(pos: usize, left: i32, cur: &mut Vec<i32>, out: &mut Vec<Vec<i32>>) {
        if pos == cur.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for v in 0..=left {
            cur[pos] = v;
            gen(pos + 1, left - v, cur, out);
        }
        cur[pos] = 0;
    }
    for total in 1..=height as i32 {
        let mut cur = vec![0i32; n];
        gen(0, total, &mut cur, &mut contents);
    }
    contents.sort_by_key(|c| (c.iter().sum::<i32>(), c.clone()));
    contents.retain(|c| c.iter().any(|&x| x > 0));
    let pairing = |a: &[i32], b: &[i32]| -> Rat {
        let mut acc = 0i64;
        for i in 0..n {
            for j in 0..n {
                acc += a[i] as i64 * cm.epsilon()[i] * cm.a(i, j) * b[j] as i64;
            }
        }
        rat(acc)
    };
    let rho_pairing = |b: &[i32]| -> Rat {
        // (rho, beta) = sum_i m_i eps_i
        let mut acc = 0i64;
        for i in 0..n {
            acc += b[i] as i64 * cm.epsilon()[i];
        }
        rat(acc)
    };
    let mut mult: BTreeMap<Vec<i32>, Rat> = BTreeMap::new();
    let mut c: BTreeMap<Vec<i32>, Rat> = BTreeMap::new();
    let c_of = |beta: &[i32], mult: &BTreeMap<Vec<i32>, Rat>| -> Rat {
        let mut acc = Rat::zero();
        for k in 1..=beta.iter().sum::<i32>() {
            if beta.iter().all(|&x| x % k == 0) {
                let div: Vec<i32> = beta.iter().map(|&x| x / k).collect();
                if let Some(m) = mult.get(&div) {
                    acc += m / rat(k as i64);
                }
            }
        }
        acc
    };
    for beta in &contents {
        let ht: i32 = beta.iter().sum();
        if ht == 1 {
            mult.insert(beta.clone(), rat(1));
            c.insert(beta.clone(), rat(1));
            continue;
        }
        // right side: sum over proper decompositions
        let mut rhs = Rat::zero();
        for bp in &contents {
            if bp.iter().sum::<i32>() >= ht {
                break;
            }
            let bpp: Vec<i32> = beta.iter().zip(bp).map(|(a, b)| a - b).collect();
            if bpp.iter().any(|&x| x < 0) || bpp.iter().all(|&x| x == 0) {
                continue;
            }
            let (Some(cp), Some(cpp)) = (c.get(bp), c.get(&bpp)) else { continue };
            rhs += pairing(bp, &bpp) * cp * cpp;
        }
        let denom = pairing(beta, beta) - rat(2) * rho_pairing(beta);
        if denom.is_zero() {
            // vacuous equation; happens only for k-fold multiples of real
            // roots (k >= 2), which are never roots, so mult = 0 and c is
            // the divisor contribution alone
            debug_assert!(rhs.is_zero());
            let c_beta = c_of(beta, &mult);
            mult.insert(beta.clone(), Rat::zero());
            c.insert(beta.clone(), c_beta);
            continue;
        }
        let c_beta = rhs / denom;
        // recover mult from c_beta
        let lower = c_of(beta, &mult); // contribution of proper divisors
        let m = &c_beta - &lower;
        mult.insert(beta.clone(), m);
        c.insert(beta.clone(), c_beta);
    }
    mult.into_iter()
        .map(|(k, v)| {
            assert!(v.is_integer(), "multiplicity must be integral at {k:?}");
            (k, i64::try_from(v.to_integer()).unwrap())
        })
        .collect()
}

/// The defining 3x3 representation of sl3: an independent bracket oracle.
pub mod sl3 {
    pub type M = [[f64; 3]; 3];

    pub fn mat(entries: [[f64; 3]; 3]) -> M {
        entries
    }

    pub fn e(i: usize) -> M {
        let mut m = [[0.0; 3]; 3];
        m[i - 1][i] = 1.0;
        m
    }

    pub fn f(i: usize) -> M {
        let mut m = [[0.0; 3]; 3];
        m[i][i - 1] = 1.0;
        m
    }

    pub fn mul(a: &M, b: &M) -> M {
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    out[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        out
    }

    pub fn sub(a: &M, b: &M) -> M {
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = a[i][j] - b[i][j];
            }
        }
        out
    }

    pub fn add(a: &M, b: &M) -> M {
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = a[i][j] + b[i][j];
            }
        }
        out
    }

    pub fn scale(a: &M, c: f64) -> M {
        let mut out = *a;
        for row in &mut out {
            for x in row.iter_mut() {
                *x *= c;
            }
        }
        out
    }

    pub fn bracket(a: &M, b: &M) -> M {
        sub(&mul(a, b), &mul(b, a))
    }

    pub fn approx_eq(a: &M, b: &M) -> bool {
        for i in 0..3 {
            for j in 0..3 {
                if (a[i][j] - b[i][j]).abs() > 1e-9 {
                    return false;
                }
            }
        }
        true
    }
}
