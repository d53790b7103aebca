//! Small dense exact linear algebra: integer matrices for Weyl group
//! elements and rational/Gaussian elimination for everything else.

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::scalar::{Gaussian, Rat};

/// Minimal field interface so that elimination code can be shared between
/// `Rat` and `Gaussian` coefficients.
pub trait Field: Clone + PartialEq {
    fn fzero() -> Self;
    fn fone() -> Self;
    fn fis_zero(&self) -> bool;
    fn fadd(&self, o: &Self) -> Self;
    fn fsub(&self, o: &Self) -> Self;
    fn fmul(&self, o: &Self) -> Self;
    fn fdiv(&self, o: &Self) -> Self;
    fn fneg(&self) -> Self;
}

impl Field for Rat {
    fn fzero() -> Self {
        <Rat as Zero>::zero()
    }
    fn fone() -> Self {
        <Rat as One>::one()
    }
    fn fis_zero(&self) -> bool {
        <Rat as Zero>::is_zero(self)
    }
    fn fadd(&self, o: &Self) -> Self {
        self + o
    }
    fn fsub(&self, o: &Self) -> Self {
        self - o
    }
    fn fmul(&self, o: &Self) -> Self {
        self * o
    }
    fn fdiv(&self, o: &Self) -> Self {
        self / o
    }
    fn fneg(&self) -> Self {
        -self
    }
}

impl Field for Gaussian {
    fn fzero() -> Self {
        Gaussian::zero()
    }
    fn fone() -> Self {
        Gaussian::one()
    }
    fn fis_zero(&self) -> bool {
        Gaussian::is_zero(self)
    }
    fn fadd(&self, o: &Self) -> Self {
        self + o
    }
    fn fsub(&self, o: &Self) -> Self {
        self - o
    }
    fn fmul(&self, o: &Self) -> Self {
        self * o
    }
    fn fdiv(&self, o: &Self) -> Self {
        self / o
    }
    fn fneg(&self) -> Self {
        -self
    }
}

/// Incremental row-echelon accumulator: tracks the span of inserted vectors.
#[derive(Debug, Clone)]
pub struct Span<F: Field> {
    width: usize,
    /// Rows in echelon form; `pivots[k]` is the pivot column of `rows[k]`.
    rows: Vec<Vec<F>>,
    pivots: Vec<usize>,
}

impl<F: Field> Span<F> {
    pub fn new(width: usize) -> Self {
        Span { width, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the current rows in place, returning the residual.
    fn reduce(&self, mut v: Vec<F>) -> Vec<F> {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !v[p].fis_zero() {
                let c = v[p].clone();
                for (x, r) in v.iter_mut().zip(row) {
                    *x = x.fsub(&c.fmul(r));
                }
            }
        }
        v
    }

    /// Inserts a vector; returns true when it enlarged the span.
    pub fn insert(&mut self, v: Vec<F>) -> bool {
        assert_eq!(v.len(), self.width);
        let v = self.reduce(v);
        match v.iter().position(|x| !x.fis_zero()) {
            None => false,
            Some(p) => {
                let inv = v[p].clone();
                let row: Vec<F> = v.iter().map(|x| x.fdiv(&inv)).collect();
                // keep earlier rows reduced against the new one
                for r in &mut self.rows {
                    if !r[p].fis_zero() {
                        let c = r[p].clone();
                        for (x, y) in r.iter_mut().zip(&row) {
                            *x = x.fsub(&c.fmul(y));
                        }
                    }
                }
                self.rows.push(row);
                self.pivots.push(p);
                true
            }
        }
    }

    pub fn contains(&self, v: &[F]) -> bool {
        let v = self.reduce(v.to_vec());
        v.iter().all(|x| x.fis_zero())
    }
}

/// Solve `a x = b` for a square invertible rational matrix `a` given as rows,
/// with one rational right-hand side. Returns None when `a` is singular.
pub fn solve_square(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.len();
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let inv = m[col][col].clone();
        for x in m[col].iter_mut() {
            *x = &*x / &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let c = m[r][col].clone();
                for k in col..=n {
                    let delta = &c * &m[col][k];
                    m[r][k] = &m[r][k] - &delta;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

/// Least-structure solve of a (possibly rectangular) system `a x = b` where
/// the columns of `a` are known to be linearly independent. Returns None when
/// `b` is outside the column span.
pub fn solve_columns(a_cols: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let rows = b.len();
    let ncols = a_cols.len();
    let mut m: Vec<Vec<Rat>> = (0..rows)
        .map(|r| {
            let mut row: Vec<Rat> = a_cols.iter().map(|c| c[r].clone()).collect();
            row.push(b[r].clone());
            row
        })
        .collect();
    let mut pivot_rows = Vec::new();
    let mut rr = 0usize;
    for col in 0..ncols {
        let piv = (rr..rows).find(|&r| !m[r][col].is_zero())?;
        m.swap(rr, piv);
        let inv = m[rr][col].clone();
        for x in m[rr].iter_mut() {
            *x = &*x / &inv;
        }
        for r in 0..rows {
            if r != rr && !m[r][col].is_zero() {
                let c = m[r][col].clone();
                for k in col..=ncols {
                    let delta = &c * &m[rr][k];
                    m[r][k] = &m[r][k] - &delta;
                }
            }
        }
        pivot_rows.push(rr);
        rr += 1;
    }
    // consistency: residual rows must vanish
    for r in rr..rows {
        if !m[r][ncols].is_zero() {
            return None;
        }
    }
    Some((0..ncols).map(|c| m[pivot_rows[c]][ncols].clone()).collect())
}

pub fn rank_rat(rows: &[Vec<Rat>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let mut span = Span::<Rat>::new(rows[0].len());
    for r in rows {
        span.insert(r.clone());
    }
    span.rank()
}

/// Rational kernel basis of the linear map given by `rows` (acting on column
/// vectors of length `cols`).
pub fn kernel_rat(rows: &[Vec<Rat>], cols: usize) -> Vec<Vec<Rat>> {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let nrows = m.len();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
    let mut rr = 0usize;
    for col in 0..cols {
        let piv = (rr..nrows).find(|&r| !m[r][col].is_zero());
        let Some(piv) = piv else { continue };
        m.swap(rr, piv);
        let inv = m[rr][col].clone();
        for x in m[rr].iter_mut() {
            *x = &*x / &inv;
        }
        for r in 0..nrows {
            if r != rr && !m[r][col].is_zero() {
                let c = m[r][col].clone();
                for k in 0..cols {
                    let delta = &c * &m[rr][k];
                    m[r][k] = &m[r][k] - &delta;
                }
            }
        }
        pivot_of_col[col] = Some(rr);
        rr += 1;
    }
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_of_col[free].is_some() {
            continue;
        }
        let mut v = vec![Rat::zero(); cols];
        v[free] = Rat::one();
        for col in 0..cols {
            if let Some(pr) = pivot_of_col[col] {
                v[col] = -m[pr][free].clone();
            }
        }
        basis.push(v);
    }
    basis
}

/// Kernel basis over an arbitrary field.
pub fn kernel_field<F: Field>(rows: &[Vec<F>], cols: usize) -> Vec<Vec<F>> {
    let mut m: Vec<Vec<F>> = rows.to_vec();
    let nrows = m.len();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
    let mut rr = 0usize;
    for col in 0..cols {
        let Some(piv) = (rr..nrows).find(|&r| !m[r][col].fis_zero()) else { continue };
        m.swap(rr, piv);
        let inv = m[rr][col].clone();
        for x in m[rr].iter_mut() {
            *x = x.fdiv(&inv);
        }
        for r in 0..nrows {
            if r != rr && !m[r][col].fis_zero() {
                let c = m[r][col].clone();
                for k in 0..cols {
                    let delta = c.fmul(&m[rr][k]);
                    m[r][k] = m[r][k].fsub(&delta);
                }
            }
        }
        pivot_of_col[col] = Some(rr);
        rr += 1;
    }
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_of_col[free].is_some() {
            continue;
        }
        let mut v = vec![F::fzero(); cols];
        v[free] = F::fone();
        for col in 0..cols {
            if let Some(pr) = pivot_of_col[col] {
                v[col] = m[pr][free].fneg();
            }
        }
        basis.push(v);
    }
    basis
}

/// Exact rational determinant (Gaussian elimination).
pub fn det_rat(a: &[Vec<Rat>]) -> Rat {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = Rat::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Rat::zero();
        };
        if piv != col {
            m.swap(col, piv);
            det = -det;
        }
        det = &det * &m[col][col];
        let inv = m[col][col].clone();
        for r in col + 1..n {
            if !m[r][col].is_zero() {
                let c = &m[r][col] / &inv;
                for k in col..n {
                    let delta = &c * &m[col][k];
                    m[r][k] = &m[r][k] - &delta;
                }
            }
        }
    }
    det
}

/// Square integer matrix acting on the root lattice in the basis of simple
/// roots. Weyl group elements live here; entries stay small at desk scale.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IMat {
    pub n: usize,
    /// Row-major entries.
    pub data: Vec<i64>,
}

impl IMat {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        IMat { n, data }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> i64) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = f(i, j);
            }
        }
        IMat { n, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.n + j] = v;
    }

    pub fn mul(&self, other: &IMat) -> IMat {
        let n = self.n;
        assert_eq!(n, other.n);
        let mut out = vec![0i64; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * other.get(k, j);
                }
            }
        }
        IMat { n, data: out }
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        let n = self.n;
        let mut out = vec![0i64; n];
        for i in 0..n {
            for j in 0..n {
                out[i] += self.get(i, j) * v[j];
            }
        }
        out
    }

    pub fn apply_rat(&self, v: &[Rat]) -> Vec<Rat> {
        let n = self.n;
        (0..n)
            .map(|i| {
                let mut acc = Rat::zero();
                for j in 0..n {
                    if self.get(i, j) != 0 {
                        acc += v[j].clone() * Rat::from_integer(self.get(i, j).into());
                    }
                }
                acc
            })
            .collect()
    }

    pub fn transpose(&self) -> IMat {
        IMat::from_fn(self.n, |i, j| self.get(j, i))
    }

    pub fn is_identity(&self) -> bool {
        *self == IMat::identity(self.n)
    }

    /// Exact inverse for unimodular matrices (Weyl elements have det ±1).
    pub fn inverse(&self) -> Option<IMat> {
        let n = self.n;
        let rows: Vec<Vec<Rat>> = (0..n)
            .map(|i| (0..n).map(|j| Rat::from_integer(self.get(i, j).into())).collect())
            .collect();
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![Rat::zero(); n];
            e[j] = Rat::one();
            cols.push(solve_square(&rows, &e)?);
        }
        let mut out = IMat::identity(n);
        for i in 0..n {
            for j in 0..n {
                let x = &cols[j][i];
                if !x.is_integer() {
                    return None;
                }
                out.set(i, j, i64::try_from(x.to_integer()).ok()?);
            }
        }
        Some(out)
    }

    pub fn to_rat_rows(&self) -> Vec<Vec<Rat>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| Rat::from_integer(self.get(i, j).into())).collect())
            .collect()
    }
}
