//! Growth rates of subspace sections of dilated balls.
//!
//! For an invertible `B` and a subspace `V` of dimension d there are
//! constants `b > 0`, `C ≥ 1` with
//!
//! ```text
//! bʲ/C ≤ m_d(V ∩ Bʲ(B(0,1))) ≤ C·bʲ        for all j ≥ 1,
//! ```
//!
//! and `b` is computable exactly from the eigen-structure: pass to the
//! positive-spectrum companion, move to Jordan coordinates (blocks sorted by
//! ascending modulus, lower-diagonal convention), row-reduce the subspace
//! basis there, and multiply the moduli at the pivot coordinates.  When the
//! eigen-structure is not exactly representable the base is fitted by
//! log-linear regression on computed section volumes instead.

mod sections;

pub use sections::{
    ellipsoid_section_volume, ellipsoid_subspace_volume, plane_box_section,
    projection_section_check, section_upper_bound, slice_bound_check, ProjectionSectionReport,
    SliceBoundReport,
};

use nalgebra::DMatrix;
use num_traits::One;

use crate::error::{Error, Result};
use crate::lattice::Subspace;
use crate::linalg::{real_jordan, rref, Matrix, RANK_TOL};
use crate::rat::{q_to_f64, Q};

/// Pivot coordinates of a subspace basis in Jordan coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct PivotSet {
    /// 0-based pivot columns, strictly increasing.
    pub sigma: Vec<usize>,
    /// Row-reduced basis satisfying the pivot support condition.
    pub reduced_basis: Vec<Vec<f64>>,
}

/// Reduced row echelon pivots of a (rational) row basis.
pub fn pivot_columns_q(rows: &[Vec<Q>]) -> Result<PivotSet> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    if pivots.len() != rows.len() {
        return Err(Error::InvalidInput("rank-deficient subspace basis".into()));
    }
    Ok(PivotSet {
        sigma: pivots,
        reduced_basis: m
            .iter()
            .map(|r| r.iter().map(q_to_f64).collect())
            .collect(),
    })
}

/// Floating RREF with a tolerance; errors when a pivot decision is unclear.
pub fn pivot_columns_f64(rows: &[Vec<f64>]) -> Result<PivotSet> {
    let nr = rows.len();
    if nr == 0 {
        return Err(Error::InvalidInput("empty basis".into()));
    }
    let nc = rows[0].len();
    let mut m: Vec<Vec<f64>> = rows.to_vec();
    let scale = m
        .iter()
        .flat_map(|r| r.iter().map(|x| x.abs()))
        .fold(0.0f64, f64::max)
        .max(1.0);
    let mut pivots = Vec::new();
    let mut r = 0usize;
    for c in 0..nc {
        if r >= nr {
            break;
        }
        let (imax, vmax) = (r..nr)
            .map(|i| (i, m[i][c].abs()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        if vmax <= RANK_TOL * scale {
            if vmax > RANK_TOL * scale / 100.0 {
                return Err(Error::InvalidInput(format!(
                    "pivot decision ambiguous at column {c} (magnitude {vmax:.3e})"
                )));
            }
            continue;
        }
        m.swap(r, imax);
        let pv = m[r][c];
        for x in m[r].iter_mut() {
            *x /= pv;
        }
        for i in 0..nr {
            if i != r {
                let f = m[i][c];
                if f != 0.0 {
                    for cc in 0..nc {
                        m[i][cc] -= f * m[r][cc];
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if pivots.len() != nr {
        return Err(Error::InvalidInput("rank-deficient subspace basis".into()));
    }
    Ok(PivotSet {
        sigma: pivots,
        reduced_basis: m,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum GrowthCertainty {
    /// Base derived exactly from eigenvalue products.
    Exact,
    /// Base fitted from computed section volumes (R² reported).
    Fitted { r_squared: f64 },
    /// The fit failed its quality gate.
    Inconclusive { r_squared: f64 },
}

#[derive(Clone, Debug)]
pub struct GrowthRate {
    pub base: f64,
    /// Exact b² when every pivot modulus is exactly known.
    pub base_sq: Option<Q>,
    /// Empirical constant: the smallest C ≥ 1 with bʲ/C ≤ m_d ≤ C·bʲ over
    /// the sampled range.
    pub constant: f64,
    pub certainty: GrowthCertainty,
    pub sigma: Vec<usize>,
}

impl GrowthRate {
    /// Exact comparison of the base against 1 when available.
    pub fn base_exceeds_one_exactly(&self) -> Option<bool> {
        match (&self.certainty, &self.base_sq) {
            (GrowthCertainty::Exact, Some(b2)) => Some(b2 > &Q::one()),
            _ => None,
        }
    }
}

/// Section volumes m_d(V ∩ Bʲ(B(0,1))) for j = 1..=jmax via the closed-form
/// ellipsoid section formula.
pub fn section_volume_series(b: &Matrix, v: &Subspace, jmax: u32) -> Result<Vec<f64>> {
    let bf = b.to_f64();
    let mut out = Vec::new();
    let mut pow = DMatrix::<f64>::identity(bf.nrows(), bf.nrows());
    for _ in 1..=jmax {
        pow = &pow * &bf;
        out.push(ellipsoid_subspace_volume(&pow, 1.0, v)?);
    }
    Ok(out)
}

/// Growth rate of `m_d(V ∩ Bʲ(B(0,1)))`.
pub fn subspace_growth(b: &Matrix, v: &Subspace, jmax: u32) -> Result<GrowthRate> {
    if v.dim() == 0 {
        return Err(Error::Precondition("subspace must be nontrivial".into()));
    }
    if v.ambient_dim() != b.dim() {
        return Err(Error::DimensionMismatch(
            "subspace ambient dimension differs from matrix".into(),
        ));
    }
    let volumes = section_volume_series(b, v, jmax.max(8))?;

    // Exact route: Jordan coordinates with exactly known moduli.
    if let Ok(dec) = real_jordan(b) {
        let moduli = dec.coordinate_moduli();
        let pivot = match (&dec.basis_change, v.rows_q()) {
            (Matrix::Rational(p), Some(rows)) if dec.exact => {
                let jrows: Vec<Vec<Q>> = rows.iter().map(|r| p.mul_vec(r)).collect();
                pivot_columns_q(&jrows).ok()
            }
            _ => {
                let p = dec.basis_change.to_f64();
                let rows = v.rows_f64();
                let jrows: Vec<Vec<f64>> = rows
                    .iter()
                    .map(|r| {
                        let x = nalgebra::DVector::from_vec(r.clone());
                        (&p * x).iter().cloned().collect()
                    })
                    .collect();
                pivot_columns_f64(&jrows).ok()
            }
        };
        if let Some(pivot) = pivot {
            let base: f64 = pivot.sigma.iter().map(|&i| moduli[i].0).product();
            let base_sq: Option<Q> = pivot
                .sigma
                .iter()
                .map(|&i| moduli[i].1.clone())
                .collect::<Option<Vec<Q>>>()
                .map(|v| v.into_iter().product());
            let exact = dec.exact && base_sq.is_some() && v.rows_q().is_some();
            let constant = empirical_constant(&volumes, base);
            return Ok(GrowthRate {
                base,
                base_sq: if exact { base_sq } else { None },
                constant,
                certainty: if exact {
                    GrowthCertainty::Exact
                } else {
                    // Eigen data is floating; corroborate with the fit.
                    let (fit_b, r2) = fit_base(&volumes);
                    if r2 >= 0.99 && (fit_b - base).abs() <= 0.05 * base {
                        GrowthCertainty::Fitted { r_squared: r2 }
                    } else {
                        GrowthCertainty::Inconclusive { r_squared: r2 }
                    }
                },
                sigma: pivot.sigma,
            });
        }
    }

    // Fitted fallback.
    let (base, r2) = fit_base(&volumes);
    let constant = empirical_constant(&volumes, base);
    Ok(GrowthRate {
        base,
        base_sq: None,
        constant,
        certainty: if r2 >= 0.99 {
            GrowthCertainty::Fitted { r_squared: r2 }
        } else {
            GrowthCertainty::Inconclusive { r_squared: r2 }
        },
        sigma: vec![],
    })
}

/// Least squares on (j, log m) over the upper half of the range, where the
/// transient constants have died down.
fn fit_base(volumes: &[f64]) -> (f64, f64) {
    let n = volumes.len();
    let lo = n / 2;
    let pts: Vec<(f64, f64)> = (lo..n)
        .filter(|&i| volumes[i] > 0.0 && volumes[i].is_finite())
        .map(|i| ((i + 1) as f64, volumes[i].ln()))
        .collect();
    if pts.len() < 3 {
        return (f64::NAN, 0.0);
    }
    let m = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = m * sxx - sx * sx;
    let slope = (m * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / m;
    let mean_y = sy / m;
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum();
    let r2 = if ss_tot <= 1e-18 {
        // Constant series fit exactly by slope 0.
        if ss_res <= 1e-12 {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 - ss_res / ss_tot
    };
    (slope.exp(), r2)
}

fn empirical_constant(volumes: &[f64], base: f64) -> f64 {
    let mut c = 1.0f64;
    for (i, v) in volumes.iter().enumerate() {
        if !v.is_finite() || *v <= 0.0 {
            continue;
        }
        let bj = base.powi(i as i32 + 1);
        c = c.max(v / bj).max(bj / v);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::QMatrix;
    use crate::rat::{q, qr};

    #[test]
    fn pivot_examples() {
        // span{e₂, e₃} in ℝ³ → σ = {1, 2} (0-based).
        let p = pivot_columns_q(&[
            vec![q(0), q(1), q(0)],
            vec![q(0), q(0), q(1)],
        ])
        .unwrap();
        assert_eq!(p.sigma, vec![1, 2]);
        // span{(1,1,0)} → leading entry in column 0.
        let p = pivot_columns_q(&[vec![q(1), q(1), q(0)]]).unwrap();
        assert_eq!(p.sigma, vec![0]);
        // span{(0,1,5)} → column 1.
        let p = pivot_columns_q(&[vec![q(0), q(1), q(5)]]).unwrap();
        assert_eq!(p.sigma, vec![1]);
        // Rank-deficient input errors.
        assert!(pivot_columns_q(&[
            vec![q(1), q(0), q(0)],
            vec![q(2), q(0), q(0)],
        ])
        .is_err());
    }

    #[test]
    fn growth_interval_doubling() {
        // B = A⁻¹ for A = diag(2, 1/2): on V = span(e₂) sections stretch by 2.
        let a = Matrix::from_q(QMatrix::diagonal(&[q(2), qr(1, 2)])).unwrap();
        let b = a.inverse().unwrap();
        let v = Subspace::from_q_rows(vec![vec![q(0), q(1)]]).unwrap();
        let g = subspace_growth(&b, &v, 16).unwrap();
        assert_eq!(g.certainty, GrowthCertainty::Exact);
        assert!((g.base - 2.0).abs() < 1e-12);
        assert_eq!(g.base_sq.clone().unwrap(), q(4));
        assert_eq!(g.base_exceeds_one_exactly(), Some(true));
    }

    #[test]
    fn growth_skew_plane() {
        // A = diag(2, 2, 1/3), V = span{(1,1,0), (0,0,1)}, B = A⁻¹ → b = 3/2.
        let a = Matrix::from_q(QMatrix::diagonal(&[q(2), q(2), qr(1, 3)])).unwrap();
        let b = a.inverse().unwrap();
        let v = Subspace::from_q_rows(vec![
            vec![q(1), q(1), q(0)],
            vec![q(0), q(0), q(1)],
        ])
        .unwrap();
        let g = subspace_growth(&b, &v, 20).unwrap();
        assert_eq!(g.certainty, GrowthCertainty::Exact);
        assert!((g.base - 1.5).abs() < 1e-12);
        assert_eq!(g.base_sq.clone().unwrap(), qr(9, 4));
    }

    #[test]
    fn growth_full_space_is_det() {
        // V = ℝⁿ → b = |det B|.
        let a = Matrix::from_q(QMatrix::diagonal(&[q(2), q(3)])).unwrap();
        let v = Subspace::from_q_rows(vec![
            vec![q(1), q(0)],
            vec![q(0), q(1)],
        ])
        .unwrap();
        let g = subspace_growth(&a, &v, 12).unwrap();
        assert!((g.base - 6.0).abs() < 1e-12);
        assert_eq!(g.base_sq.clone().unwrap(), q(36));
    }

    #[test]
    fn exact_and_fitted_agree() {
        // Diagonalizable rational matrices: fitted base within 1% of exact.
        for (diag, v_rows) in [
            (
                vec![q(2), qr(1, 2)],
                vec![vec![q(0), q(1)]],
            ),
            (
                vec![q(3), qr(1, 3)],
                vec![vec![q(1), q(1)]],
            ),
        ] {
            let b = Matrix::from_q(QMatrix::diagonal(&diag))
                .unwrap()
                .inverse()
                .unwrap();
            let v = Subspace::from_q_rows(v_rows).unwrap();
            let g = subspace_growth(&b, &v, 24).unwrap();
            let vols = section_volume_series(&b, &v, 24).unwrap();
            let (fit_b, r2) = fit_base(&vols);
            assert!(r2 > 0.99);
            assert!(
                (fit_b - g.base).abs() <= 0.01 * g.base,
                "fit {fit_b} vs exact {}",
                g.base
            );
        }
    }

    #[test]
    fn exact_diagonal_section_law() {
        // For diagonal A and coordinate subspaces the closed-form section
        // volume is c_d·Π|λ_i|ʲ exactly.
        let b = Matrix::from_q(QMatrix::diagonal(&[q(2), q(3), qr(1, 2)])).unwrap();
        let v = Subspace::from_q_rows(vec![
            vec![q(1), q(0), q(0)],
            vec![q(0), q(1), q(0)],
        ])
        .unwrap();
        let vols = section_volume_series(&b, &v, 10).unwrap();
        for (i, vol) in vols.iter().enumerate() {
            let j = i as i32 + 1;
            let expect = std::f64::consts::PI * 6f64.powi(j);
            assert!(
                (vol - expect).abs() <= 1e-9 * expect,
                "j={j}: {vol} vs {expect}"
            );
        }
    }

    #[test]
    fn quincunx_growth_exact_modulus_sq() {
        // Complex pair with |λ|² = 2: on V = ℝ² the base is |det| = 2 and
        // base_sq = 4 is exact.
        let a = Matrix::from_q(
            QMatrix::from_rows(vec![vec![q(1), q(1)], vec![q(-1), q(1)]]).unwrap(),
        )
        .unwrap();
        let v = Subspace::from_q_rows(vec![vec![q(1), q(0)], vec![q(0), q(1)]]).unwrap();
        let g = subspace_growth(&a, &v, 12).unwrap();
        assert_eq!(g.certainty, GrowthCertainty::Exact);
        assert_eq!(g.base_sq.clone().unwrap(), q(4));
        // One-dimensional subspaces see base √2 with exact square 2.
        let v1 = Subspace::from_q_rows(vec![vec![q(1), q(0)]]).unwrap();
        let g1 = subspace_growth(&a, &v1, 12).unwrap();
        assert_eq!(g1.base_sq.clone().unwrap(), q(2));
        assert!((g1.base - 2f64.sqrt()).abs() < 1e-12);
    }
}
