//! Bracket words, tensor-algebra expansions and the contravariant pairing
//! used to carve the algebra out of the free Lie algebra.
//!
//! Elements of the free Lie algebra on the lowering generators are stored as
//! noncommutative polynomials (maps word -> coefficient). The pairing of two
//! weight-beta elements is evaluated by iterated lowering: peeling a letter
//! off a bracket word applies the corresponding raising derivation to the
//! other side. The radical of this pairing is the defining ideal, so graded
//! dimensions are Gram-matrix ranks.

use std::collections::{BTreeMap, HashMap};

use num::{BigInt, Zero};

use crate::cartan::CartanMatrix;
use crate::linalg::{solve_square, Span};
use crate::scalar::{Gaussian, Rat};

/// A bracket word (i_1, ..., i_k), read as [x_{i_1}, [x_{i_2}, ...]].
pub type Word = Vec<u8>;

/// Integer noncommutative polynomial.
pub type IntTensor = HashMap<Word, i128>;

/// Gaussian-rational noncommutative polynomial.
pub type GTensor = HashMap<Word, Gaussian>;

/// Expands the nested bracket word into the tensor algebra.
pub fn expand_word(word: &[u8]) -> IntTensor {
    assert!(!word.is_empty());
    if word.len() == 1 {
        return IntTensor::from([(word.to_vec(), 1)]);
    }
    let head = word[0];
    let tail = expand_word(&word[1..]);
    let mut out = IntTensor::new();
    for (w, c) in tail {
        let mut left = Vec::with_capacity(w.len() + 1);
        left.push(head);
        left.extend_from_slice(&w);
        *out.entry(left).or_insert(0) += c;
        let mut right = w;
        right.push(head);
        *out.entry(right).or_insert(0) -= c;
    }
    out.retain(|_, c| *c != 0);
    out
}

/// Commutator of two integer tensors.
pub fn commutator(a: &IntTensor, b: &IntTensor) -> IntTensor {
    let mut out = IntTensor::new();
    for (wa, ca) in a {
        for (wb, cb) in b {
            let mut ab = wa.clone();
            ab.extend_from_slice(wb);
            *out.entry(ab).or_insert(0) += ca * cb;
            let mut ba = wb.clone();
            ba.extend_from_slice(wa);
            *out.entry(ba).or_insert(0) -= ca * cb;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

/// The raising derivation on a Lie element of weight below -alpha_k: the
/// h-component cancels for heights >= 2, leaving
///   x -> sum over occurrences of k of -(sum of a_{k, later letters}) * (x with the occurrence deleted).
pub fn lower_int(t: &IntTensor, k: u8, cm: &CartanMatrix) -> IntTensor {
    let mut out = IntTensor::new();
    for (w, c) in t {
        for (m, &letter) in w.iter().enumerate() {
            if letter != k {
                continue;
            }
            let mut factor: i64 = 0;
            for &later in &w[m + 1..] {
                factor += cm.a(k as usize, later as usize);
            }
            if factor == 0 {
                continue;
            }
            let mut deleted = Vec::with_capacity(w.len() - 1);
            deleted.extend_from_slice(&w[..m]);
            deleted.extend_from_slice(&w[m + 1..]);
            *out.entry(deleted).or_insert(0) -= c * factor as i128;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

/// Same derivation on Gaussian tensors.
pub fn lower_gaussian(t: &GTensor, k: u8, cm: &CartanMatrix) -> GTensor {
    let mut out = GTensor::new();
    for (w, c) in t {
        for (m, &letter) in w.iter().enumerate() {
            if letter != k {
                continue;
            }
            let mut factor: i64 = 0;
            for &later in &w[m + 1..] {
                factor += cm.a(k as usize, later as usize);
            }
            if factor == 0 {
                continue;
            }
            let mut deleted = Vec::with_capacity(w.len() - 1);
            deleted.extend_from_slice(&w[..m]);
            deleted.extend_from_slice(&w[m + 1..]);
            let delta = c.scale(&Rat::from_integer(BigInt::from(-factor)));
            let entry = out.entry(deleted).or_insert_with(Gaussian::zero);
            *entry += &delta;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Contravariant pairing of a bracket word against an integer Lie tensor of
/// the same content. Peels the word left to right, lowering the tensor.
pub fn pair_word_int(word: &[u8], tensor: &IntTensor, cm: &CartanMatrix) -> Rat {
    if word.len() == 1 {
        let c = tensor.get(&word.to_vec()).copied().unwrap_or(0);
        return Rat::new(BigInt::from(c), BigInt::from(cm.epsilon()[word[0] as usize]));
    }
    let lowered = lower_int(tensor, word[0], cm);
    if lowered.is_empty() {
        return Rat::zero();
    }
    pair_word_int(&word[1..], &lowered, cm)
}

/// Same pairing against a Gaussian tensor.
pub fn pair_word_gaussian(word: &[u8], tensor: &GTensor, cm: &CartanMatrix) -> Gaussian {
    if word.len() == 1 {
        let c = tensor.get(&word.to_vec()).cloned().unwrap_or_else(Gaussian::zero);
        return c.scale(&Rat::new(BigInt::from(1), BigInt::from(cm.epsilon()[word[0] as usize])));
    }
    let lowered = lower_gaussian(tensor, word[0], cm);
    if lowered.is_empty() {
        return Gaussian::zero();
    }
    pair_word_gaussian(&word[1..], &lowered, cm)
}

/// All words with the given content, in lexicographic order.
pub fn content_words(content: &[i32]) -> Vec<Word> {
    let mut out = Vec::new();
    let mut remaining: Vec<i32> = content.to_vec();
    let total: i32 = remaining.iter().sum();
    let mut current: Word = Vec::with_capacity(total as usize);
    fn rec(remaining: &mut Vec<i32>, current: &mut Word, left: i32, out: &mut Vec<Word>) {
        if left == 0 {
            out.push(current.clone());
            return;
        }
        for i in 0..remaining.len() {
            if remaining[i] > 0 {
                remaining[i] -= 1;
                current.push(i as u8);
                rec(remaining, current, left - 1, out);
                current.pop();
                remaining[i] += 1;
            }
        }
    }
    rec(&mut remaining, &mut current, total, &mut out);
    out
}

fn is_lyndon(w: &[u8]) -> bool {
    for k in 1..w.len() {
        if w[k..] <= *w {
            return false;
        }
    }
    true
}

/// Standard-factorization bracketing of a Lyndon word, as a tensor.
fn lyndon_tensor(w: &[u8]) -> IntTensor {
    if w.len() == 1 {
        return IntTensor::from([(w.to_vec(), 1)]);
    }
    // standard factorization: v is the lexicographically least proper suffix
    let mut best = 1;
    for k in 2..w.len() {
        if w[k..] < w[best..] {
            best = k;
        }
    }
    let left = lyndon_tensor(&w[..best]);
    let right = lyndon_tensor(&w[best..]);
    commutator(&left, &right)
}

/// Basis data for one weight space of the quotient algebra.
#[derive(Debug)]
pub struct DegreeData {
    pub content: Vec<i32>,
    /// Chosen pivot words (lexicographically least independent bracket
    /// words); their images form a basis of the weight space.
    pub pivots: Vec<Word>,
    /// Tensor expansions of the pivot words.
    pub pivot_tensors: Vec<IntTensor>,
    /// Gram matrix of the pivots under the contravariant pairing.
    pub gram: Vec<Vec<Rat>>,
}

impl DegreeData {
    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    /// Coordinates of a Gaussian Lie tensor of this content in the pivot
    /// basis (modulo the radical).
    pub fn express(&self, tensor: &GTensor, cm: &CartanMatrix) -> Vec<Gaussian> {
        let d = self.dim();
        if d == 0 {
            return Vec::new();
        }
        let rhs: Vec<Gaussian> =
            self.pivots.iter().map(|p| pair_word_gaussian(p, tensor, cm)).collect();
        let re: Vec<Rat> = rhs.iter().map(|g| g.re.clone()).collect();
        let im: Vec<Rat> = rhs.iter().map(|g| g.im.clone()).collect();
        let sol_re = solve_square(&self.gram, &re).expect("pivot Gram is invertible");
        let sol_im = solve_square(&self.gram, &im).expect("pivot Gram is invertible");
        sol_re.into_iter().zip(sol_im).map(|(re, im)| Gaussian::new(re, im)).collect()
    }

    pub fn express_int(&self, tensor: &IntTensor, cm: &CartanMatrix) -> Vec<Gaussian> {
        let g: GTensor = tensor
            .iter()
            .map(|(w, &c)| (w.clone(), Gaussian::from_rat(Rat::from_integer(BigInt::from(c)))))
            .collect();
        self.express(&g, cm)
    }
}

/// Builds the weight-space data for one content: Gram-rank computation over
/// the spanning bracket words with greedy lexicographic pivot selection.
pub fn build_degree(cm: &CartanMatrix, content: &[i32]) -> DegreeData {
    let words = content_words(content);
    let lyndon: Vec<&Word> = words.iter().filter(|w| is_lyndon(w)).collect();
    let columns: Vec<IntTensor> = lyndon.iter().map(|w| lyndon_tensor(w)).collect();
    let mut span = Span::<Rat>::new(columns.len().max(1));
    let mut pivots: Vec<Word> = Vec::new();
    for w in &words {
        if columns.is_empty() {
            break;
        }
        let row: Vec<Rat> = columns.iter().map(|c| pair_word_int(w, c, cm)).collect();
        if span.insert(row) {
            pivots.push(w.clone());
        }
    }
    let pivot_tensors: Vec<IntTensor> = pivots.iter().map(|w| expand_word(w)).collect();
    let gram: Vec<Vec<Rat>> = pivots
        .iter()
        .map(|p| pivot_tensors.iter().map(|t| pair_word_int(p, t, cm)).collect())
        .collect();
    DegreeData { content: content.to_vec(), pivots, pivot_tensors, gram }
}

/// Enumerates the positive contents with height in 1..=h.
pub fn contents_up_to(n: usize, h: usize) -> Vec<Vec<i32>> {
    let mut out = Vec::new();
    let mut cur = vec![0i32; n];
    fn rec(pos: usize, left: i32, cur: &mut Vec<i32>, out: &mut Vec<Vec<i32>>) {
        if pos == cur.len() {
            if left == 0 && cur.iter().any(|&c| c > 0) {
                out.push(cur.clone());
            }
            return;
        }
        for v in 0..=left {
            cur[pos] = v;
            rec(pos + 1, left - v, cur, out);
        }
        cur[pos] = 0;
    }
    for total in 1..=h as i32 {
        rec(0, total, &mut cur, &mut out);
    }
    let mut map: BTreeMap<(i32, Vec<i32>), ()> = BTreeMap::new();
    for c in out {
        map.insert((c.iter().sum(), c), ());
    }
    map.into_keys().map(|(_, c)| c).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalogue::cartan_by_name;

    #[test]
    fn expansion_and_commutator() {
        let t = expand_word(&[0, 1]);
        assert_eq!(t.get(&vec![0, 1]), Some(&1));
        assert_eq!(t.get(&vec![1, 0]), Some(&-1));
        let t = expand_word(&[0, 0, 1]);
        assert_eq!(t.len(), 3); // 001 - 2*010 + 100
        assert_eq!(t.get(&vec![0, 1, 0]), Some(&-2));
    }

    #[test]
    fn serre_radical_in_a2() {
        let a2 = cartan_by_name("A2").unwrap();
        // [f1,[f1,f2]] is in the radical: both lowerings kill it
        let t = expand_word(&[0, 0, 1]);
        assert!(lower_int(&t, 0, &a2).is_empty());
        assert!(lower_int(&t, 1, &a2).is_empty());
        // content (2,1) has dimension 0
        let d = build_degree(&a2, &[2, 1]);
        assert_eq!(d.dim(), 0);
        // content (1,1) has dimension 1
        let d = build_degree(&a2, &[1, 1]);
        assert_eq!(d.dim(), 1);
        assert_eq!(d.pivots, vec![vec![0, 1]]);
    }

    #[test]
    fn affine_a1_null_root_dimension() {
        let a1h = cartan_by_name("A1~").unwrap();
        let d = build_degree(&a1h, &[1, 1]);
        assert_eq!(d.dim(), 1);
        // 2*delta also has multiplicity 1
        let d = build_degree(&a1h, &[2, 2]);
        assert_eq!(d.dim(), 1);
        // but (2,1) = delta + alpha_0 is a real root: dimension 1
        let d = build_degree(&a1h, &[2, 1]);
        assert_eq!(d.dim(), 1);
        // (3,1) is not a root
        let d = build_degree(&a1h, &[3, 1]);
        assert_eq!(d.dim(), 0);
    }

    #[test]
    fn gram_is_symmetric() {
        let g2 = cartan_by_name("G2").unwrap();
        for content in contents_up_to(2, 5) {
            let d = build_degree(&g2, &content);
            let k = d.dim();
            for i in 0..k {
                for j in 0..k {
                    assert_eq!(d.gram[i][j], d.gram[j][i], "{content:?}");
                }
            }
        }
    }

    #[test]
    fn g2_dimensions_match_roots() {
        let g2 = cartan_by_name("G2").unwrap();
        let roots = crate::weyl::positive_roots_finite(&g2, &[0, 1]).unwrap();
        let mut total = 0usize;
        for content in contents_up_to(2, 5) {
            let d = build_degree(&g2, &content);
            let as_root: Vec<i64> = content.iter().map(|&x| x as i64).collect();
            let expected = usize::from(roots.contains(&as_root));
            assert_eq!(d.dim(), expected, "{content:?}");
            total += d.dim();
        }
        assert_eq!(total, 6);
    }

    #[test]
    fn express_identifies_pivot_combinations() {
        let a1h = cartan_by_name("A1~").unwrap();
        let d = build_degree(&a1h, &[2, 1]);
        assert_eq!(d.dim(), 1);
        // twice the pivot tensor expresses as coefficient 2
        let mut doubled = IntTensor::new();
        for (w, c) in &d.pivot_tensors[0] {
            doubled.insert(w.clone(), 2 * c);
        }
        let coords = d.express_int(&doubled, &a1h);
        assert_eq!(coords, vec![Gaussian::from_int(2)]);
    }
}
