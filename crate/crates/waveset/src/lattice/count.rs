//! The count series N_j, redundancy bounds, and Minkowski counting bounds.

use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rat::{q, q_to_f64, Q};

use super::{enumerate_points, Ellipsoid, Lattice, ENUM_CAP_DEFAULT};

/// The j-indexed counts `N_j = #|A⁻ʲ(B(0,r)) ∩ Γ|` (closed-ball convention).
#[derive(Clone, Debug)]
pub struct CountSeries {
    /// Consecutive entries (j, N_j) starting at j = 1.
    pub entries: Vec<(u32, u64)>,
    pub radius: Q,
    /// First j whose enumeration exceeded the cap, if any; entries stop
    /// right before it.
    pub truncated_at: Option<u32>,
    pub matrix_desc: String,
    pub lattice_desc: String,
}

impl CountSeries {
    /// Partial sums Σ_{i≤j} 1/N_i, one per entry.
    pub fn partial_sums(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.entries
            .iter()
            .map(|(_, n)| {
                acc += 1.0 / *n as f64;
                acc
            })
            .collect()
    }
}

/// Computes N_j for j = 1..=jmax.  Requires |det A| ≥ 1; for |det A| < 1
/// apply the A ↦ A⁻¹ symmetry upstream.  (The counts are well defined for
/// |det A| = 1 even though the existence theorems then decide immediately.)
pub fn count_series(
    a: &Matrix,
    lat: &Lattice,
    radius: &Q,
    jmax: u32,
    cap: usize,
) -> Result<CountSeries> {
    let det = a.det_f64().abs();
    if det < 1.0 - 1e-12 {
        return Err(Error::Precondition(
            "count series needs |det A| ≥ 1; replace A by A⁻¹ first".into(),
        ));
    }
    let mut entries = Vec::new();
    let mut truncated_at = None;
    for j in 1..=jmax {
        let shape = matrix_power(a, -(j as i64))?;
        let e = Ellipsoid::origin(shape, radius.clone())?;
        match enumerate_points(&e, lat, true, cap) {
            Ok(out) => entries.push((j, out.count() as u64)),
            Err(Error::EnumerationCap { .. }) => {
                truncated_at = Some(j);
                break;
            }
            Err(other) => return Err(other),
        }
    }
    Ok(CountSeries {
        entries,
        radius: radius.clone(),
        truncated_at,
        matrix_desc: format!("{}x{} matrix", a.dim(), a.dim()),
        lattice_desc: format!("rank-{} lattice", lat.dim()),
    })
}

/// Certified redundancy bounds: `A⁻ʲ(B(0,r))` packs m_j-redundantly by Γ
/// translations with `m_j = #|A⁻ʲ(B(0,2r)) ∩ Γ|` (the doubling argument:
/// translates of a point inside the r-ball image differ by lattice points of
/// the 2r-ball image).
pub fn redundancy_sequence(
    a: &Matrix,
    lat: &Lattice,
    radius: &Q,
    jmax: u32,
    cap: usize,
) -> Result<Vec<(u32, u64)>> {
    let doubled = radius * q(2);
    let series = count_series(a, lat, &doubled, jmax, cap)?;
    if series.truncated_at.is_some() {
        return Err(Error::EnumerationCap {
            cap,
            partial: series.entries.len(),
        });
    }
    Ok(series.entries)
}

pub fn matrix_power(a: &Matrix, j: i64) -> Result<Matrix> {
    match a {
        Matrix::Rational(m) => Ok(Matrix::Rational(m.pow(j)?)),
        Matrix::Float(_) => Ok(Matrix::Float(a.pow_f64(j)?)),
    }
}

/// A symmetric convex body for the counting bounds.
#[derive(Clone, Debug)]
pub enum SymmetricBody {
    Ellipsoid(Ellipsoid),
    /// Axis box Π [−a_i, a_i].
    Box(Vec<Q>),
}

impl SymmetricBody {
    pub fn dim(&self) -> usize {
        match self {
            SymmetricBody::Ellipsoid(e) => e.dim(),
            SymmetricBody::Box(a) => a.len(),
        }
    }

    pub fn volume_f64(&self) -> f64 {
        match self {
            SymmetricBody::Ellipsoid(e) => e.volume_f64(),
            SymmetricBody::Box(a) => a.iter().map(|x| 2.0 * q_to_f64(x)).product(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct MinkowskiBounds {
    pub lower: f64,
    /// Present only when the enumerated points span ℝⁿ.
    pub upper: Option<f64>,
    pub count: usize,
}

/// Two-sided volume/covolume counting bounds for a symmetric convex body:
/// `|Ω| / (2ⁿ·covol) ≤ count`, and when the points of Ω ∩ Γ span ℝⁿ also
/// `count ≤ 3ⁿ·n!·|Ω| / (2ⁿ·covol)`.
pub fn minkowski_bounds(
    body: &SymmetricBody,
    lat: &Lattice,
    closed: bool,
    cap: usize,
) -> Result<MinkowskiBounds> {
    let n = body.dim();
    if lat.dim() != n {
        return Err(Error::DimensionMismatch(
            "body and lattice dimensions differ".into(),
        ));
    }
    let out = match body {
        SymmetricBody::Ellipsoid(e) => {
            if e.center.is_some() {
                return Err(Error::Precondition(
                    "counting bounds need an origin-symmetric body".into(),
                ));
            }
            enumerate_points(e, lat, closed, cap)?
        }
        SymmetricBody::Box(a) => {
            // Realize the box as an ellipsoid in the ∞-norm by enumerating a
            // bounding ball and filtering exactly.
            let shape = Matrix::Rational(crate::linalg::QMatrix::diagonal(a));
            let radius_bound = crate::rat::sqrt_upper(&q(n as i64));
            let e = Ellipsoid::origin(shape.clone(), radius_bound)?;
            let mut out = enumerate_points(&e, lat, true, cap)?;
            let ainv = shape.inverse()?;
            out.points.retain(|p| match (ainv.as_q(), lat.point_q(&p.coeffs)) {
                (Some(mi), Some(pt)) => {
                    let y = mi.mul_vec(&pt);
                    y.iter().all(|c| {
                        if closed {
                            c.abs() <= Q::one()
                        } else {
                            c.abs() < Q::one()
                        }
                    })
                }
                _ => {
                    let y = ainv.to_f64() * nalgebra::DVector::from_vec(p.coords.clone());
                    y.iter().all(|c| {
                        if closed {
                            c.abs() <= 1.0 + 1e-12
                        } else {
                            c.abs() < 1.0 - 1e-12
                        }
                    })
                }
            });
            out
        }
    };
    let count = out.count();
    let covol = lat.covolume_f64();
    let lower = body.volume_f64() / (2f64.powi(n as i32) * covol);
    // Span test on the integer coefficient vectors (exact).
    let coeff_rows: Vec<Vec<Q>> = out
        .points
        .iter()
        .map(|p| p.coeffs.iter().map(|x| Q::from_integer(x.clone())).collect())
        .collect();
    let spans = !coeff_rows.is_empty() && crate::linalg::rank(&coeff_rows) == n;
    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    let upper = if spans {
        Some(3f64.powi(n as i32) * factorial * body.volume_f64() / (2f64.powi(n as i32) * covol))
    } else {
        None
    };
    Ok(MinkowskiBounds {
        lower,
        upper,
        count,
    })
}

/// Smallest empirical constant C with
/// `#|ℤⁿ ∩ Aʲ(B(0,r))| ≤ C·max(1,rⁿ)·max(1,|det A|ʲ)` over the given range.
pub fn lattice_counting_envelope(
    a: &Matrix,
    radii: &[Q],
    jrange: std::ops::RangeInclusive<i64>,
    cap: usize,
) -> Result<f64> {
    let n = a.dim();
    let lat = Lattice::standard(n);
    let det = a.det_f64().abs();
    let mut cmin = 0.0f64;
    for r in radii {
        for j in jrange.clone() {
            let shape = matrix_power(a, j)?;
            let e = Ellipsoid::origin(shape, r.clone())?;
            let count = enumerate_points(&e, &lat, true, cap)?.count() as f64;
            let envelope = q_to_f64(r).powi(n as i32).max(1.0) * det.powi(j as i32).max(1.0);
            cmin = cmin.max(count / envelope);
        }
    }
    Ok(cmin)
}

/// Convenience: N_j for a single j (closed convention).
pub fn count_at(a: &Matrix, lat: &Lattice, radius: &Q, j: i64) -> Result<u64> {
    let shape = matrix_power(a, -j)?;
    let e = Ellipsoid::origin(shape, radius.clone())?;
    Ok(enumerate_points(&e, lat, true, ENUM_CAP_DEFAULT)?.count() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::QMatrix;
    use crate::rat::qr;

    fn diag(entries: &[Q]) -> Matrix {
        Matrix::Rational(QMatrix::diagonal(entries))
    }

    #[test]
    fn one_dimensional_counts_are_one() {
        // A = (2): A⁻ʲB = [−2⁻ʲ, 2⁻ʲ] contains only 0 for j ≥ 1.
        let a = diag(&[q(2)]);
        let s = count_series(&a, &Lattice::standard(1), &Q::one(), 10, 100000).unwrap();
        assert!(s.entries.iter().all(|&(_, n)| n == 1));
        let sums = s.partial_sums();
        assert!((sums.last().unwrap() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn hyperbolic_counts_match_brute_force() {
        // A = diag(2, 1/2): N_j = 2^{j+1} + 1.
        let a = diag(&[q(2), qr(1, 2)]);
        let s = count_series(&a, &Lattice::standard(2), &Q::one(), 12, 1_000_000).unwrap();
        for &(j, n) in &s.entries {
            // Brute-force oracle over the integer bounding box.
            let b = 1i64 << j;
            let mut brute = 0u64;
            for x in -2..=2i64 {
                for y in -b - 2..=b + 2 {
                    let s2 = (x as f64 * 2f64.powi(j as i32)).powi(2)
                        + (y as f64 / 2f64.powi(j as i32)).powi(2);
                    if s2 <= 1.0 + 1e-12 {
                        brute += 1;
                    }
                }
            }
            assert_eq!(n, brute, "j={j}");
            assert_eq!(n, (1u64 << (j + 1)) + 1, "j={j}");
        }
    }

    #[test]
    fn precondition_rejects_contraction() {
        let a = diag(&[qr(1, 2)]);
        assert!(matches!(
            count_series(&a, &Lattice::standard(1), &Q::one(), 3, 1000),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn redundancy_examples() {
        // A = (2), r = 1/4: the doubled ball still only contains 0.
        let a = diag(&[q(2)]);
        let m = redundancy_sequence(&a, &Lattice::standard(1), &qr(1, 4), 8, 1000).unwrap();
        assert!(m.iter().all(|&(_, v)| v == 1));

        // A = 2I₂, r = 1: m_j = 1 for j ≥ 2.
        let a2 = diag(&[q(2), q(2)]);
        let m2 = redundancy_sequence(&a2, &Lattice::standard(2), &Q::one(), 6, 10000).unwrap();
        for &(j, v) in &m2 {
            if j >= 2 {
                assert_eq!(v, 1, "j={j}");
            }
        }

        // A = diag(2, 1/2), r = 1: the doubled ellipse has semiaxes
        // (2^{1-j}, 2^{1+j}); for j ≥ 2 only the x = 0 column survives and
        // m_j = 2^{j+2} + 1.  At j = 1 the closed boundary adds (±1, 0).
        let a3 = diag(&[q(2), qr(1, 2)]);
        let m3 = redundancy_sequence(&a3, &Lattice::standard(2), &Q::one(), 8, 100000).unwrap();
        for &(j, v) in &m3 {
            let brute = {
                let mut n = 0u64;
                let b = 2i64 << j;
                for x in -2..=2i64 {
                    for y in -b - 2..=b + 2 {
                        let s2 = (x as f64 * 2f64.powi(j as i32 - 1)).powi(2)
                            + (y as f64 / 2f64.powi(j as i32 + 1)).powi(2);
                        if s2 <= 1.0 + 1e-12 {
                            n += 1;
                        }
                    }
                }
                n
            };
            assert_eq!(v, brute, "j={j}");
            if j >= 2 {
                assert_eq!(v, (1u64 << (j + 2)) + 1, "j={j}");
            }
        }
    }

    #[test]
    fn minkowski_box_cases() {
        // Ω = [−1,1]², ℤ²: lower 1 ≤ count 9 ≤ upper 18.
        let b = SymmetricBody::Box(vec![Q::one(), Q::one()]);
        let r = minkowski_bounds(&b, &Lattice::standard(2), true, 1000).unwrap();
        assert_eq!(r.count, 9);
        assert!((r.lower - 1.0).abs() < 1e-12);
        assert!((r.upper.unwrap() - 18.0).abs() < 1e-9);
        assert!(r.lower <= r.count as f64 && r.count as f64 <= r.upper.unwrap());

        // Open box: only the origin; the span condition fails so the upper
        // bound is absent.
        let ro = minkowski_bounds(&b, &Lattice::standard(2), false, 1000).unwrap();
        assert_eq!(ro.count, 1);
        assert!(ro.upper.is_none());
        assert!(ro.lower <= ro.count as f64);
    }

    #[test]
    fn envelope_one_dimensional() {
        // Counts are 1 for j < 0 and 2^{j+1}+1 for j ≥ 0; C_emp = 3 at j = 0.
        let a = diag(&[q(2)]);
        let c = lattice_counting_envelope(&a, &[Q::one()], -10..=10, 1_000_000).unwrap();
        assert!((c - 3.0).abs() < 1e-9, "C = {c}");
    }
}
