//! Full-rank lattices, enumeration of lattice points in ellipsoids, count
//! series, Minkowski-style counting bounds, and sublattice extraction.

mod count;
mod enumerate;
mod intersect;

pub use count::{
    count_at, count_series, lattice_counting_envelope, matrix_power, minkowski_bounds,
    redundancy_sequence, CountSeries, MinkowskiBounds, SymmetricBody,
};
pub use enumerate::{enumerate_points, EnumOutcome, EnumPoint, Ellipsoid, ENUM_CAP_DEFAULT};
pub use intersect::{intersection_lattice, LatticeIntersection};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, QMatrix};
use crate::rat::{common_denominator, q_to_f64, Q};

/// A full-rank lattice Γ = G·ℤⁿ.  Generators are the *columns* of `gens`;
/// constructors take them as rows to match the JSON interchange format.
#[derive(Clone, Debug)]
pub struct Lattice {
    gens: Matrix,
}

impl Lattice {
    /// Builds a lattice from generator rows, requiring full rank.
    pub fn from_rows(rows: &Matrix) -> Result<Self> {
        let gens = match rows {
            Matrix::Rational(m) => Matrix::Rational(m.transpose()),
            Matrix::Float(m) => Matrix::Float(m.transpose()),
        };
        let lat = Lattice { gens };
        if !lat.gens.is_invertible() {
            return Err(Error::InvalidInput("lattice basis is rank deficient".into()));
        }
        Ok(lat)
    }

    pub fn standard(n: usize) -> Self {
        Lattice {
            gens: Matrix::Rational(QMatrix::identity(n)),
        }
    }

    pub fn from_q_rows(rows: Vec<Vec<Q>>) -> Result<Self> {
        let m = Matrix::from_q(QMatrix::from_rows(rows)?)?;
        Lattice::from_rows(&m)
    }

    pub fn dim(&self) -> usize {
        self.gens.dim()
    }

    pub fn is_rational(&self) -> bool {
        self.gens.is_rational()
    }

    /// Generator matrix (generators as columns).
    pub fn generator_matrix(&self) -> &Matrix {
        &self.gens
    }

    /// Generators as row vectors, the interchange orientation.
    pub fn basis_rows_f64(&self) -> Vec<Vec<f64>> {
        let g = self.gens.to_f64();
        (0..g.ncols())
            .map(|c| (0..g.nrows()).map(|r| g[(r, c)]).collect())
            .collect()
    }

    pub fn basis_rows_q(&self) -> Option<Vec<Vec<Q>>> {
        let g = self.gens.as_q()?;
        Some((0..g.ncols()).map(|c| g.col(c)).collect())
    }

    pub fn covolume_f64(&self) -> f64 {
        self.gens.det_f64().abs()
    }

    pub fn covolume_q(&self) -> Option<Q> {
        self.gens.det_q().map(|d| d.abs())
    }

    /// The lattice point with integer coefficient vector `z`.
    pub fn point_f64(&self, z: &[BigInt]) -> Vec<f64> {
        use num_traits::ToPrimitive;
        let g = self.gens.to_f64();
        let zf: Vec<f64> = z.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
        (0..g.nrows())
            .map(|r| (0..g.ncols()).map(|c| g[(r, c)] * zf[c]).sum())
            .collect()
    }

    pub fn point_q(&self, z: &[BigInt]) -> Option<Vec<Q>> {
        let g = self.gens.as_q()?;
        Some(
            (0..g.nrows())
                .map(|r| {
                    (0..g.ncols())
                        .map(|c| g.at(r, c) * &Q::from_integer(z[c].clone()))
                        .sum()
                })
                .collect(),
        )
    }

    /// Canonical generator rows via the Hermite normal form; rational
    /// lattices that are equal as point sets yield identical output.
    pub fn canonical_rows(&self) -> Option<Vec<Vec<Q>>> {
        let g = self.gens.as_q()?;
        // Scale to an integer matrix: columns of D·G are integer vectors.
        let entries: Vec<Q> = (0..g.nrows())
            .flat_map(|r| (0..g.ncols()).map(move |c| g.at(r, c).clone()))
            .collect();
        let d = common_denominator(&entries);
        let dm: Vec<Vec<BigInt>> = (0..g.ncols())
            .map(|c| {
                (0..g.nrows())
                    .map(|r| {
                        let x = g.at(r, c) * Q::from_integer(d.clone());
                        x.numer().clone()
                    })
                    .collect()
            })
            .collect();
        // Row HNF of the generator-rows matrix is the canonical form.
        let (h, _) = hnf_rows(&dm);
        let dq = Q::from_integer(d);
        Some(
            h.into_iter()
                .filter(|row| row.iter().any(|x| !x.is_zero()))
                .map(|row| {
                    row.into_iter()
                        .map(|x| Q::from_integer(x) / dq.clone())
                        .collect()
                })
                .collect(),
        )
    }
}

/// A linear subspace given by a spanning basis (rows).
#[derive(Clone, Debug)]
pub struct Subspace {
    pub basis: BasisRows,
}

/// Rectangular basis storage for subspaces (rows are basis vectors).
#[derive(Clone, Debug)]
pub enum BasisRows {
    Rational(Vec<Vec<Q>>),
    Float(Vec<Vec<f64>>),
}

impl Subspace {
    pub fn from_q_rows(rows: Vec<Vec<Q>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidInput("empty subspace basis".into()));
        }
        let rk = crate::linalg::rank(&rows);
        if rk != rows.len() {
            return Err(Error::InvalidInput(
                "subspace basis is linearly dependent".into(),
            ));
        }
        Ok(Subspace {
            basis: BasisRows::Rational(rows),
        })
    }

    pub fn from_f64_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidInput("empty subspace basis".into()));
        }
        let m = DMatrix::from_fn(rows.len(), rows[0].len(), |r, c| rows[r][c]);
        if m.rank(1e-10) != rows.len() {
            return Err(Error::InvalidInput(
                "subspace basis is numerically rank deficient".into(),
            ));
        }
        Ok(Subspace {
            basis: BasisRows::Float(rows),
        })
    }

    pub fn dim(&self) -> usize {
        match &self.basis {
            BasisRows::Rational(r) => r.len(),
            BasisRows::Float(r) => r.len(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match &self.basis {
            BasisRows::Rational(r) => r[0].len(),
            BasisRows::Float(r) => r[0].len(),
        }
    }

    pub fn rows_f64(&self) -> Vec<Vec<f64>> {
        match &self.basis {
            BasisRows::Rational(r) => r
                .iter()
                .map(|row| row.iter().map(q_to_f64).collect())
                .collect(),
            BasisRows::Float(r) => r.clone(),
        }
    }

    pub fn rows_q(&self) -> Option<&Vec<Vec<Q>>> {
        match &self.basis {
            BasisRows::Rational(r) => Some(r),
            BasisRows::Float(_) => None,
        }
    }

    /// Exact basis of the orthogonal complement (rational subspaces only).
    pub fn orthogonal_complement_q(&self) -> Option<Vec<Vec<Q>>> {
        let rows = self.rows_q()?;
        Some(crate::linalg::kernel_basis(rows, self.ambient_dim()))
    }
}

// ---------------------------------------------------------------------------
// Integer Hermite normal form
// ---------------------------------------------------------------------------

/// Row Hermite normal form: returns `(H, U)` with `U · A = H`, `U`
/// unimodular, pivots positive, entries above each pivot reduced.
pub fn hnf_rows(a: &[Vec<BigInt>]) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut h: Vec<Vec<BigInt>> = a.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    let mut r = 0usize;
    for c in 0..n {
        if r >= m {
            break;
        }
        // Clear below via gcd steps.
        loop {
            let mut min_i = None;
            let mut min_v: Option<BigInt> = None;
            for i in r..m {
                if !h[i][c].is_zero() {
                    let av = h[i][c].abs();
                    if min_v.as_ref().map_or(true, |mv| &av < mv) {
                        min_v = Some(av);
                        min_i = Some(i);
                    }
                }
            }
            let Some(p) = min_i else {
                break;
            };
            h.swap(r, p);
            u.swap(r, p);
            let mut done = true;
            for i in r + 1..m {
                if h[i][c].is_zero() {
                    continue;
                }
                let q = div_round(&h[i][c], &h[r][c]);
                if !q.is_zero() {
                    for k in 0..n {
                        let t = &q * &h[r][k];
                        h[i][k] -= t;
                    }
                    for k in 0..m {
                        let t = &q * &u[r][k];
                        u[i][k] -= t;
                    }
                }
                if !h[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[r][c].is_zero() {
            continue;
        }
        if h[r][c].is_negative() {
            for k in 0..n {
                h[r][k] = -h[r][k].clone();
            }
            for k in 0..m {
                u[r][k] = -u[r][k].clone();
            }
        }
        // Reduce entries above the pivot.
        for i in 0..r {
            let q = div_floor_big(&h[i][c], &h[r][c]);
            if !q.is_zero() {
                for k in 0..n {
                    let t = &q * &h[r][k];
                    h[i][k] -= t;
                }
                for k in 0..m {
                    let t = &q * &u[r][k];
                    u[i][k] -= t;
                }
            }
        }
        r += 1;
    }
    (h, u)
}

fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    // Nearest-integer division.
    let two = BigInt::from(2);
    let (q, r) = num_integer::Integer::div_rem(a, b);
    if &r.abs() * &two > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + BigInt::one()
        } else {
            q - BigInt::one()
        }
    } else {
        q
    }
}

fn div_floor_big(a: &BigInt, b: &BigInt) -> BigInt {
    num_integer::Integer::div_floor(a, b)
}

/// Basis of the integer kernel `{z ∈ ℤᵏ : M z = 0}` for an integer matrix
/// given by rows (`m` rows of length `k`).  The result is a primitive basis
/// of the saturated kernel lattice.
pub fn integer_kernel(rows: &[Vec<BigInt>], k: usize) -> Vec<Vec<BigInt>> {
    // Kernel of z ↦ M z equals the rows of U (from U·Mᵀ = H) whose image
    // rows in H vanish.
    let mt: Vec<Vec<BigInt>> = (0..k)
        .map(|c| rows.iter().map(|row| row[c].clone()).collect())
        .collect();
    let (h, u) = hnf_rows(&mt);
    let mut out = Vec::new();
    for (hr, ur) in h.iter().zip(u.iter()) {
        if hr.iter().all(|x| x.is_zero()) {
            out.push(ur.clone());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{q, qr};

    #[test]
    fn covolume_and_canonical() {
        let l = Lattice::from_q_rows(vec![vec![q(2), q(0)], vec![q(1), q(3)]]).unwrap();
        assert_eq!(l.covolume_q().unwrap(), q(6));
        // Same lattice, different basis.
        let l2 = Lattice::from_q_rows(vec![vec![q(3), q(3)], vec![q(1), q(3)]]).unwrap();
        assert_eq!(l.canonical_rows().unwrap(), l2.canonical_rows().unwrap());
        // A genuinely different lattice disagrees.
        let l3 = Lattice::from_q_rows(vec![vec![q(1), q(0)], vec![q(0), q(3)]]).unwrap();
        assert_ne!(l.canonical_rows().unwrap(), l3.canonical_rows().unwrap());
    }

    #[test]
    fn canonical_handles_denominators() {
        let l = Lattice::from_q_rows(vec![vec![qr(1, 2), q(0)], vec![q(0), qr(1, 3)]]).unwrap();
        let rows = l.canonical_rows().unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(l.covolume_q().unwrap(), qr(1, 6));
    }

    #[test]
    fn hnf_unimodular_transform() {
        let a: Vec<Vec<BigInt>> = vec![
            vec![BigInt::from(4), BigInt::from(6)],
            vec![BigInt::from(2), BigInt::from(5)],
        ];
        let (h, u) = hnf_rows(&a);
        // U·A = H.
        for i in 0..2 {
            for j in 0..2 {
                let s: BigInt = (0..2).map(|k| &u[i][k] * &a[k][j]).sum();
                assert_eq!(s, h[i][j]);
            }
        }
        // Staircase with positive pivots.
        assert!(h[0][0] > BigInt::zero());
        assert_eq!(h[1][0], BigInt::zero());
    }

    #[test]
    fn integer_kernel_saturated() {
        // Kernel of (2, 4, 6)·z = 0 over ℤ³ has rank 2 and contains
        // primitive vectors like (2, -1, 0) and (3, 0, -1).
        let rows = vec![vec![BigInt::from(2), BigInt::from(4), BigInt::from(6)]];
        let k = integer_kernel(&rows, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            let s: BigInt = v
                .iter()
                .zip([2, 4, 6])
                .map(|(x, c)| x * BigInt::from(c))
                .sum();
            assert!(s.is_zero());
        }
    }

    #[test]
    fn subspace_complement() {
        let s = Subspace::from_q_rows(vec![vec![q(1), q(1), q(0)], vec![q(0), q(0), q(1)]])
            .unwrap();
        let comp = s.orthogonal_complement_q().unwrap();
        assert_eq!(comp.len(), 1);
        // Complement vector is orthogonal to both basis rows.
        let v = &comp[0];
        assert_eq!(&v[0] + &v[1], Q::zero());
        assert!(v[2].is_zero());
    }
}
