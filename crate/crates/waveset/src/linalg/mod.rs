//! Exact and floating linear algebra for dilation matrices.
//!
//! The exact side works over the rationals (and over ℚ(i) where complex
//! eigen-structure demands it); the floating side delegates to `nalgebra`.
//! Matrices carry a uniform mode so downstream decision rules know whether a
//! comparison is exact or subject to the clustering tolerance.

mod companion;
mod jordan;
mod spectrum;

pub use companion::{positive_companion, PositiveSpectrumCompanion};
pub use jordan::{real_jordan, BlockKind, JordanBlock, JordanDecomposition};
pub use spectrum::{spectrum, Eigenvalue, SpectrumData};

use nalgebra::DMatrix;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rat::{q_to_f64, Q};

/// Relative tolerance under which eigenvalue moduli are clustered and
/// compared against 1.  Decision rules are discontinuous at modulus 1, so
/// moduli within this band of each other (or of 1) are treated as equal and
/// surfaced as borderline rather than silently resolved.
pub const EIGEN_CLUSTER_RTOL: f64 = 1e-8;

/// Tolerance for floating rank decisions (Jordan staircase, RREF pivots).
pub const RANK_TOL: f64 = 1e-8;

// ---------------------------------------------------------------------------
// Exact rational matrices
// ---------------------------------------------------------------------------

/// Dense square-or-rectangular matrix over ℚ, row major.
#[derive(Clone, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl std::fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "QMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|c| crate::rat::fmt_q(self.at(r, c)))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![Q::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Q::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::InvalidInput("empty matrix".into()));
        }
        let c = rows[0].len();
        if rows.iter().any(|row| row.len() != c) || c == 0 {
            return Err(Error::DimensionMismatch("ragged or empty rows".into()));
        }
        Ok(QMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Q) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                *m.at_mut(r, c) = f(r, c);
            }
        }
        m
    }

    pub fn diagonal(entries: &[Q]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |r, c| if r == c { entries[r].clone() } else { Q::zero() })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &Q {
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Q {
        &mut self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> Vec<Q> {
        (0..self.cols).map(|c| self.at(r, c).clone()).collect()
    }

    pub fn col(&self, c: usize) -> Vec<Q> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.at(c, r).clone())
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.at(k, c);
                    if !b.is_zero() {
                        *out.at_mut(r, c) += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.at(r, c) * &v[c]).sum())
            .collect()
    }

    pub fn scale(&self, s: &Q) -> QMatrix {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Exact determinant by fraction-free-ish Gaussian elimination.
    pub fn det(&self) -> Q {
        assert_eq!(self.rows, self.cols, "determinant of square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Q::one();
        for k in 0..n {
            // Pivot search.
            let Some(p) = (k..n).find(|&r| !m.at(r, k).is_zero()) else {
                return Q::zero();
            };
            if p != k {
                for c in 0..n {
                    let tmp = m.at(p, c).clone();
                    *m.at_mut(p, c) = m.at(k, c).clone();
                    *m.at_mut(k, c) = tmp;
                }
                det = -det;
            }
            let pivot = m.at(k, k).clone();
            det *= &pivot;
            for r in k + 1..n {
                if m.at(r, k).is_zero() {
                    continue;
                }
                let factor = m.at(r, k) / &pivot;
                for c in k..n {
                    let delta = &factor * m.at(k, c);
                    *m.at_mut(r, c) -= delta;
                }
            }
        }
        det
    }

    /// Exact inverse; `None` when singular.
    pub fn inverse(&self) -> Option<QMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = QMatrix::identity(n);
        for k in 0..n {
            let p = (k..n).find(|&r| !m.at(r, k).is_zero())?;
            if p != k {
                for c in 0..n {
                    let tmp = m.at(p, c).clone();
                    *m.at_mut(p, c) = m.at(k, c).clone();
                    *m.at_mut(k, c) = tmp;
                    let tmp = inv.at(p, c).clone();
                    *inv.at_mut(p, c) = inv.at(k, c).clone();
                    *inv.at_mut(k, c) = tmp;
                }
            }
            let pivot = m.at(k, k).clone();
            for c in 0..n {
                *m.at_mut(k, c) /= &pivot;
                *inv.at_mut(k, c) /= &pivot;
            }
            for r in 0..n {
                if r == k || m.at(r, k).is_zero() {
                    continue;
                }
                let factor = m.at(r, k).clone();
                for c in 0..n {
                    let dm = &factor * m.at(k, c);
                    *m.at_mut(r, c) -= dm;
                    let di = &factor * inv.at(k, c);
                    *inv.at_mut(r, c) -= di;
                }
            }
        }
        Some(inv)
    }

    /// Exact integer power (negative powers via the inverse).
    pub fn pow(&self, j: i64) -> Result<QMatrix> {
        assert_eq!(self.rows, self.cols);
        let base = if j >= 0 {
            self.clone()
        } else {
            self.inverse().ok_or(Error::SingularMatrix)?
        };
        let mut e = j.unsigned_abs();
        let mut acc = QMatrix::identity(self.rows);
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        Ok(acc)
    }

    /// Max absolute row sum (the ∞→∞ operator norm), exact.
    pub fn inf_norm(&self) -> Q {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.at(r, c).abs()).sum::<Q>())
            .max()
            .unwrap_or_else(Q::zero)
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |r, c| q_to_f64(self.at(r, c)))
    }

    /// Coefficients of the characteristic polynomial det(xI − A),
    /// `c[0] + c[1] x + … + c[n] xⁿ` with `c[n] = 1`, via Faddeev–LeVerrier.
    pub fn char_poly(&self) -> Vec<Q> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut coeffs = vec![Q::zero(); n + 1];
        coeffs[n] = Q::one();
        let mut m = QMatrix::zeros(n, n); // M_0 = 0
        for k in 1..=n {
            // M_k = A·M_{k-1} + c_{n-k+1}·I
            let mut am = self.mul(&m);
            for i in 0..n {
                *am.at_mut(i, i) += &coeffs[n - k + 1];
            }
            m = am;
            let am2 = self.mul(&m);
            let trace: Q = (0..n).map(|i| am2.at(i, i).clone()).sum();
            coeffs[n - k] = -trace / crate::rat::q(k as i64);
        }
        coeffs
    }

    /// True when the matrix is upper or lower triangular.
    pub fn is_triangular(&self) -> bool {
        let n = self.rows.min(self.cols);
        let upper = (0..n).all(|r| (0..r).all(|c| self.at(r, c).is_zero()));
        let lower = (0..n).all(|r| (r + 1..self.cols).all(|c| self.at(r, c).is_zero()));
        upper || lower
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|r| (0..self.cols).all(|c| r == c || self.at(r, c).is_zero()))
    }
}

// ---------------------------------------------------------------------------
// Complex rationals (ℚ(i)) for exact complex eigen-structure
// ---------------------------------------------------------------------------

/// Element of ℚ(i).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QC {
    pub re: Q,
    pub im: Q,
}

impl QC {
    pub fn new(re: Q, im: Q) -> Self {
        QC { re, im }
    }

    pub fn from_q(re: Q) -> Self {
        QC {
            re,
            im: Q::zero(),
        }
    }

    pub fn zero() -> Self {
        QC::from_q(Q::zero())
    }

    pub fn one() -> Self {
        QC::from_q(Q::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        QC::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> Q {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn add(&self, o: &QC) -> QC {
        QC::new(&self.re + &o.re, &self.im + &o.im)
    }

    pub fn sub(&self, o: &QC) -> QC {
        QC::new(&self.re - &o.re, &self.im - &o.im)
    }

    pub fn mul(&self, o: &QC) -> QC {
        QC::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }

    pub fn div(&self, o: &QC) -> QC {
        let d = o.norm_sqr();
        assert!(!d.is_zero(), "division by zero in QC");
        let num = self.mul(&o.conj());
        QC::new(num.re / &d, num.im / &d)
    }
}

// ---------------------------------------------------------------------------
// Mode-tagged matrix
// ---------------------------------------------------------------------------

/// A square dilation matrix with a declared arithmetic mode.
#[derive(Clone, Debug, PartialEq)]
pub enum Matrix {
    Rational(QMatrix),
    Float(DMatrix<f64>),
}

impl Matrix {
    pub fn dim(&self) -> usize {
        match self {
            Matrix::Rational(m) => m.nrows(),
            Matrix::Float(m) => m.nrows(),
        }
    }

    pub fn from_q(m: QMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch("matrix must be square".into()));
        }
        Ok(Matrix::Rational(m))
    }

    pub fn from_f64_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("matrix must be square".into()));
        }
        Ok(Matrix::Float(DMatrix::from_fn(n, n, |r, c| rows[r][c])))
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Matrix::Rational(_))
    }

    pub fn as_q(&self) -> Option<&QMatrix> {
        match self {
            Matrix::Rational(m) => Some(m),
            Matrix::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        match self {
            Matrix::Rational(m) => m.to_f64(),
            Matrix::Float(m) => m.clone(),
        }
    }

    pub fn det_f64(&self) -> f64 {
        match self {
            Matrix::Rational(m) => q_to_f64(&m.det()),
            Matrix::Float(m) => m.clone().lu().determinant(),
        }
    }

    /// Exact determinant when rational.
    pub fn det_q(&self) -> Option<Q> {
        self.as_q().map(|m| m.det())
    }

    pub fn is_invertible(&self) -> bool {
        match self {
            Matrix::Rational(m) => !m.det().is_zero(),
            Matrix::Float(m) => m.clone().lu().determinant().abs() > 1e-300,
        }
    }

    /// Inverse in the same mode.
    pub fn inverse(&self) -> Result<Matrix> {
        match self {
            Matrix::Rational(m) => m
                .inverse()
                .map(Matrix::Rational)
                .ok_or(Error::SingularMatrix),
            Matrix::Float(m) => m
                .clone()
                .try_inverse()
                .map(Matrix::Float)
                .ok_or(Error::SingularMatrix),
        }
    }

    pub fn pow_f64(&self, j: i64) -> Result<DMatrix<f64>> {
        match self {
            Matrix::Rational(m) => Ok(m.pow(j)?.to_f64()),
            Matrix::Float(m) => {
                let base = if j >= 0 {
                    m.clone()
                } else {
                    m.clone().try_inverse().ok_or(Error::SingularMatrix)?
                };
                let mut acc = DMatrix::identity(m.nrows(), m.nrows());
                for _ in 0..j.unsigned_abs() {
                    acc *= &base;
                }
                Ok(acc)
            }
        }
    }
}

/// Spectral norm (largest singular value).
pub fn operator_norm(m: &Matrix) -> f64 {
    let f = m.to_f64();
    f.svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// Generic exact elimination (shared by ℚ and ℚ(i) code paths)
// ---------------------------------------------------------------------------

/// Minimal field interface for exact Gaussian elimination.
pub trait Field: Clone + PartialEq + std::fmt::Debug {
    fn f_zero() -> Self;
    fn f_one() -> Self;
    fn f_is_zero(&self) -> bool;
    fn f_add(&self, o: &Self) -> Self;
    fn f_sub(&self, o: &Self) -> Self;
    fn f_mul(&self, o: &Self) -> Self;
    fn f_div(&self, o: &Self) -> Self;
}

impl Field for Q {
    fn f_zero() -> Self {
        Q::zero()
    }
    fn f_one() -> Self {
        Q::one()
    }
    fn f_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn f_add(&self, o: &Self) -> Self {
        self + o
    }
    fn f_sub(&self, o: &Self) -> Self {
        self - o
    }
    fn f_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn f_div(&self, o: &Self) -> Self {
        self / o
    }
}

impl Field for QC {
    fn f_zero() -> Self {
        QC::zero()
    }
    fn f_one() -> Self {
        QC::one()
    }
    fn f_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn f_add(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn f_sub(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn f_mul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn f_div(&self, o: &Self) -> Self {
        self.div(o)
    }
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref<F: Field>(rows: &mut Vec<Vec<F>>) -> Vec<usize> {
    let nr = rows.len();
    if nr == 0 {
        return vec![];
    }
    let nc = rows[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..nc {
        if r >= nr {
            break;
        }
        let Some(p) = (r..nr).find(|&i| !rows[i][c].f_is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let pv = rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x = x.f_div(&pv);
        }
        for i in 0..nr {
            if i != r && !rows[i][c].f_is_zero() {
                let f = rows[i][c].clone();
                for cc in 0..nc {
                    let d = f.f_mul(&rows[r][cc]);
                    rows[i][cc] = rows[i][cc].f_sub(&d);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    // Drop zero rows.
    rows.retain(|row| row.iter().any(|x| !x.f_is_zero()));
    pivots
}

/// Basis of the (right) kernel of the matrix given by rows.
pub fn kernel_basis<F: Field>(rows: &[Vec<F>], ncols: usize) -> Vec<Vec<F>> {
    let mut m: Vec<Vec<F>> = rows.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::new();
    for &fc in &free {
        let mut v = vec![F::f_zero(); ncols];
        v[fc] = F::f_one();
        for (ri, &pc) in pivots.iter().enumerate() {
            // pivot row ri: x_pc = -Σ_free coeff
            v[pc] = F::f_zero().f_sub(&m[ri][fc]);
        }
        basis.push(v);
    }
    basis
}

/// Rank of the row set.
pub fn rank<F: Field>(rows: &[Vec<F>]) -> usize {
    let mut m: Vec<Vec<F>> = rows.to_vec();
    rref(&mut m).len()
}

/// Incremental exact independence tracker used by Jordan chain construction.
pub struct SpanTracker<F: Field> {
    ncols: usize,
    echelon: Vec<Vec<F>>,
}

impl<F: Field> SpanTracker<F> {
    pub fn new(ncols: usize) -> Self {
        SpanTracker {
            ncols,
            echelon: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.echelon.len()
    }

    /// Inserts `v` if independent of the current span; returns true if inserted.
    pub fn insert(&mut self, v: &[F]) -> bool {
        let mut w = v.to_vec();
        for row in &self.echelon {
            let lead = row
                .iter()
                .position(|x| !x.f_is_zero())
                .expect("echelon rows nonzero");
            if !w[lead].f_is_zero() {
                let f = w[lead].f_div(&row[lead]);
                for c in 0..self.ncols {
                    let d = f.f_mul(&row[c]);
                    w[c] = w[c].f_sub(&d);
                }
            }
        }
        if w.iter().all(|x| x.f_is_zero()) {
            return false;
        }
        self.echelon.push(w);
        self.echelon.sort_by_key(|r| {
            r.iter()
                .position(|x| !x.f_is_zero())
                .unwrap_or(self.ncols)
        });
        true
    }

    pub fn contains(&self, v: &[F]) -> bool {
        let mut t = SpanTracker {
            ncols: self.ncols,
            echelon: self.echelon.clone(),
        };
        !t.insert(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{q, qr};

    fn m2(a: i64, b: i64, c: i64, d: i64) -> QMatrix {
        QMatrix::from_rows(vec![vec![q(a), q(b)], vec![q(c), q(d)]]).unwrap()
    }

    #[test]
    fn det_inverse_pow() {
        let a = m2(2, 1, 0, 3);
        assert_eq!(a.det(), q(6));
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), QMatrix::identity(2));
        let a2 = a.pow(2).unwrap();
        assert_eq!(a2, a.mul(&a));
        let am1 = a.pow(-1).unwrap();
        assert_eq!(am1, inv);
        assert!(m2(1, 2, 2, 4).inverse().is_none());
    }

    #[test]
    fn char_poly_quincunx() {
        // [[1,1],[-1,1]] has char poly x² − 2x + 2.
        let a = m2(1, 1, -1, 1);
        let cp = a.char_poly();
        assert_eq!(cp, vec![q(2), q(-2), q(1)]);
    }

    #[test]
    fn char_poly_diag() {
        let a = QMatrix::diagonal(&[q(2), qr(1, 2)]);
        // (x−2)(x−1/2) = x² − 5/2 x + 1
        assert_eq!(a.char_poly(), vec![q(1), qr(-5, 2), q(1)]);
    }

    #[test]
    fn kernel_and_rank() {
        // x + y + z = 0 has a 2-dimensional kernel.
        let rows = vec![vec![q(1), q(1), q(1)]];
        let k = kernel_basis(&rows, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            let s: Q = v.iter().cloned().sum();
            assert!(s.is_zero());
        }
        assert_eq!(rank(&rows), 1);
    }

    #[test]
    fn operator_norm_matches_power_iteration() {
        // Singular-value oracle: independent power iteration on AᵀA.
        let a = Matrix::from_q(m2(1, 1, 0, 1)).unwrap();
        let n = operator_norm(&a);
        let f = a.to_f64();
        let ata = f.transpose() * &f;
        let mut v = nalgebra::DVector::from_element(2, 1.0f64);
        for _ in 0..200 {
            v = &ata * v;
            v /= v.norm();
        }
        let lambda = (&ata * &v).norm();
        assert!((n - lambda.sqrt()).abs() < 1e-9);
        // Golden ratio is the exact spectral norm of [[1,1],[0,1]].
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((n - phi).abs() < 1e-12);
    }

    #[test]
    fn operator_norm_trivia() {
        assert!((operator_norm(&Matrix::from_q(QMatrix::identity(3)).unwrap()) - 1.0).abs() < 1e-13);
        let d = Matrix::from_q(QMatrix::diagonal(&[q(2), qr(1, 2)])).unwrap();
        assert!((operator_norm(&d) - 2.0).abs() < 1e-13);
    }

    #[test]
    fn qc_field_ops() {
        let i = QC::new(q(0), q(1));
        assert_eq!(i.mul(&i), QC::from_q(q(-1)));
        let z = QC::new(q(1), q(1));
        let w = z.div(&i); // (1+i)/i = 1 - i
        assert_eq!(w, QC::new(q(1), q(-1)));
        assert_eq!(z.norm_sqr(), q(2));
    }

    #[test]
    fn span_tracker() {
        let mut t: SpanTracker<Q> = SpanTracker::new(3);
        assert!(t.insert(&[q(1), q(0), q(1)]));
        assert!(t.insert(&[q(0), q(1), q(0)]));
        assert!(!t.insert(&[q(1), q(1), q(1)]));
        assert_eq!(t.dim(), 2);
    }
}
