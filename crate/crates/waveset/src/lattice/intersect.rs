//! Sublattice extraction: Γ ∩ V for a linear subspace V.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rat::{common_denominator, Q};

use super::{hnf_rows, integer_kernel, Lattice, Subspace};

/// Search height for integer relations in irrational (floating) mode.
const RELATION_HEIGHT: f64 = 20_000.0;
/// Residuals below this (relative) accept a relation; residuals between the
/// two thresholds are ambiguous and abort with near-miss diagnostics.
const ACCEPT_TOL: f64 = 1e-9;
const AMBIGUOUS_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct LatticeIntersection {
    pub rank: usize,
    /// Integer coefficient vectors (w.r.t. the Γ generators) of a basis of
    /// the sublattice Γ ∩ V.
    pub coeff_basis: Vec<Vec<BigInt>>,
    /// The same basis in ambient coordinates (floating view).
    pub basis_f64: Vec<Vec<f64>>,
    /// Exact ambient coordinates when the lattice is rational.
    pub basis_q: Option<Vec<Vec<Q>>>,
    /// For floating inputs: the certified search height (no relation with
    /// coefficients up to this size was missed).
    pub search_height: Option<f64>,
}

/// Basis of the rank-k sublattice Γ ∩ V; rank 0 means Γ ∩ V = {0}.
///
/// Rational inputs are decided exactly via the Hermite normal form.
/// Floating inputs search for integer relations up to a fixed height and
/// report near misses as an error when membership is numerically ambiguous.
pub fn intersection_lattice(lat: &Lattice, v: &Subspace) -> Result<LatticeIntersection> {
    let n = lat.dim();
    if v.ambient_dim() != n {
        return Err(Error::DimensionMismatch(
            "subspace ambient dimension differs from lattice".into(),
        ));
    }
    match (lat.generator_matrix().as_q(), v.rows_q()) {
        (Some(_), Some(_)) => exact_intersection(lat, v),
        _ => float_intersection(lat, v),
    }
}

fn exact_intersection(lat: &Lattice, v: &Subspace) -> Result<LatticeIntersection> {
    let n = lat.dim();
    let g = lat.generator_matrix().as_q().expect("rational");
    // Constraints: rows spanning V^⊥; x ∈ V ⟺ C·x = 0.
    let comp = v
        .orthogonal_complement_q()
        .expect("rational subspace");
    if comp.is_empty() {
        // V = ℝⁿ: everything intersects; basis = generators.
        let coeff_basis: Vec<Vec<BigInt>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { BigInt::from(1) } else { BigInt::zero() })
                    .collect()
            })
            .collect();
        return finish(lat, coeff_basis, None);
    }
    // Constraint matrix on coefficients z: (C·G)·z = 0.
    let mut rows: Vec<Vec<Q>> = Vec::new();
    for c in &comp {
        let mut row = vec![Q::zero(); n];
        for (j, entry) in row.iter_mut().enumerate() {
            let col = g.col(j);
            *entry = c.iter().zip(&col).map(|(a, b)| a * b).sum();
        }
        rows.push(row);
    }
    // Scale to integers.
    let all: Vec<Q> = rows.iter().flatten().cloned().collect();
    let d = common_denominator(&all);
    let int_rows: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| (x * Q::from_integer(d.clone())).numer().clone())
                .collect()
        })
        .collect();
    let kernel = integer_kernel(&int_rows, n);
    finish(lat, kernel, None)
}

fn float_intersection(lat: &Lattice, v: &Subspace) -> Result<LatticeIntersection> {
    let n = lat.dim();
    let g = lat.generator_matrix().to_f64();
    // Orthonormal basis of V^⊥: Gram–Schmidt the V rows, then extend with
    // standard basis vectors; the extension spans the complement.
    let rows = v.rows_f64();
    let mut ortho: Vec<nalgebra::DVector<f64>> = Vec::new();
    for row in &rows {
        let mut w = nalgebra::DVector::from_vec(row.clone());
        for u in &ortho {
            let c = u.dot(&w);
            w -= u * c;
        }
        if w.norm() > 1e-12 {
            let nn = w.norm();
            ortho.push(w / nn);
        }
    }
    let vdim = ortho.len();
    let mut comp_rows: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        let mut w = nalgebra::DVector::from_fn(n, |r, _| if r == i { 1.0 } else { 0.0 });
        for u in &ortho {
            let c = u.dot(&w);
            w -= u * c;
        }
        if w.norm() > 1e-9 {
            let nn = w.norm();
            let w = w / nn;
            comp_rows.push(w.iter().cloned().collect());
            ortho.push(w);
        }
    }
    debug_assert_eq!(vdim + comp_rows.len(), n);
    if comp_rows.is_empty() {
        let coeff_basis: Vec<Vec<BigInt>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { BigInt::from(1) } else { BigInt::zero() })
                    .collect()
            })
            .collect();
        return finish(lat, coeff_basis, Some(f64::INFINITY));
    }
    let k = comp_rows.len();
    let c = nalgebra::DMatrix::from_fn(k, n, |r, cix| comp_rows[r][cix]);
    let cg = &c * &g;
    let scale = g.norm().max(1.0);

    // Relation search: every z with ‖z‖ ≤ H and ‖CG·z‖ ≤ band satisfies
    // ‖S·z‖² ≤ 2 for the stacked map S = [I/H ; CG/band].  Factoring S by QR
    // (rather than forming SᵀS) keeps the extreme eccentricity within f64.
    let h = RELATION_HEIGHT;
    let band = AMBIGUOUS_TOL * scale;
    let mut s = nalgebra::DMatrix::<f64>::zeros(n + k, n);
    for i in 0..n {
        s[(i, i)] = 1.0 / h;
    }
    for r in 0..k {
        for cix in 0..n {
            s[(n + r, cix)] = cg[(r, cix)] / band;
        }
    }
    let (sred, u) = super::enumerate::size_reduce(&s);
    let qr = sred.qr();
    let mut rfac = qr.r();
    for i in 0..n {
        if rfac[(i, i)] < 0.0 {
            for j in 0..n {
                rfac[(i, j)] = -rfac[(i, j)];
            }
        }
        if rfac[(i, i)].abs() < 1e-300 {
            return Err(Error::InvalidInput("degenerate relation form".into()));
        }
    }
    let w = vec![0.0; n];
    let mut raw: Vec<Vec<i64>> = Vec::new();
    let cap = 5_000_000usize;
    let complete = super::enumerate::enumerate_cholesky(&rfac, &w, 2.0, &mut |z| {
        raw.push(z.to_vec());
        raw.len() <= cap
    });
    if !complete {
        return Err(Error::EnumerationCap {
            cap,
            partial: raw.len(),
        });
    }

    let mut accepted: Vec<Vec<BigInt>> = Vec::new();
    let mut near: Vec<(Vec<i64>, f64)> = Vec::new();
    for zp in &raw {
        // Map back through the unimodular transform.
        let z: Vec<BigInt> = (0..n)
            .map(|r| {
                (0..n)
                    .map(|cix| &u[r][cix] * BigInt::from(zp[cix]))
                    .sum::<BigInt>()
            })
            .collect();
        if z.iter().all(|x| x.is_zero()) {
            continue;
        }
        let zf = nalgebra::DVector::from_vec(
            z.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect::<Vec<_>>(),
        );
        if zf.norm() > h * (1.0 + 1e-9) {
            continue;
        }
        let resid = (&cg * &zf).norm();
        if resid <= ACCEPT_TOL * scale {
            accepted.push(z);
        } else if resid <= AMBIGUOUS_TOL * scale {
            near.push((
                z.iter().map(|x| x.to_f64().unwrap_or(0.0) as i64).collect(),
                resid,
            ));
        }
    }
    if !near.is_empty() {
        near.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        near.truncate(8);
        return Err(Error::AmbiguousMembership {
            count: near.len(),
            near_misses: near,
        });
    }
    // Primitive basis of the accepted relation set via HNF.
    let basis = if accepted.is_empty() {
        vec![]
    } else {
        let (hm, _) = hnf_rows(&accepted);
        hm.into_iter()
            .filter(|r| r.iter().any(|x| !x.is_zero()))
            .collect()
    };
    finish(lat, basis, Some(h))
}

fn finish(
    lat: &Lattice,
    coeff_basis: Vec<Vec<BigInt>>,
    search_height: Option<f64>,
) -> Result<LatticeIntersection> {
    let basis_f64: Vec<Vec<f64>> = coeff_basis.iter().map(|z| lat.point_f64(z)).collect();
    let basis_q = if lat.is_rational() {
        Some(
            coeff_basis
                .iter()
                .map(|z| lat.point_q(z).expect("rational lattice"))
                .collect(),
        )
    } else {
        None
    };
    Ok(LatticeIntersection {
        rank: coeff_basis.len(),
        coeff_basis,
        basis_f64,
        basis_q,
        search_height,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::rat::{q, qr};
    use num_traits::{One, Signed};

    #[test]
    fn axis_line_in_z3() {
        let lat = Lattice::standard(3);
        let v = Subspace::from_q_rows(vec![vec![q(0), q(0), q(1)]]).unwrap();
        let r = intersection_lattice(&lat, &v).unwrap();
        assert_eq!(r.rank, 1);
        let b = &r.basis_q.unwrap()[0];
        assert!(b[0].is_zero() && b[1].is_zero());
        assert_eq!(b[2].clone().abs(), Q::one());
    }

    #[test]
    fn plane_in_z3_hermite() {
        let lat = Lattice::standard(3);
        let v = Subspace::from_q_rows(vec![
            vec![q(1), q(1), q(0)],
            vec![q(0), q(0), q(1)],
        ])
        .unwrap();
        let r = intersection_lattice(&lat, &v).unwrap();
        assert_eq!(r.rank, 2);
        // The sublattice is spanned by (1,1,0) and (0,0,1).
        let basis = r.basis_q.unwrap();
        for b in &basis {
            // Each basis vector lies in V: first coord equals second.
            assert_eq!(b[0], b[1]);
        }
        // Covolume within V must be √2·1 — check via coefficients instead:
        // the coefficient lattice is exactly {(a,a,c)}… verified by rank and
        // membership above plus primitivity below.
        for b in &basis {
            let gcd = b
                .iter()
                .map(|x| x.numer().clone())
                .fold(num_bigint::BigInt::zero(), |acc, v| {
                    num_integer::Integer::gcd(&acc, &v)
                });
            assert!(gcd <= num_bigint::BigInt::from(1));
        }
    }

    #[test]
    fn sheared_irrational_lattice_rank_zero() {
        // Γ = {(1,0), (√2,1)}: a + b√2 = 0 forces a = b = 0, so the e₂ axis
        // meets Γ only at the origin.
        let s2 = std::f64::consts::SQRT_2;
        let lat = Lattice::from_rows(
            &Matrix::from_f64_rows(vec![vec![1.0, 0.0], vec![s2, 1.0]]).unwrap(),
        )
        .unwrap();
        let v = Subspace::from_f64_rows(vec![vec![0.0, 1.0]]).unwrap();
        let r = intersection_lattice(&lat, &v).unwrap();
        assert_eq!(r.rank, 0);
        assert!(r.search_height.unwrap() >= 10_000.0);
    }

    #[test]
    fn rational_shear_detects_relation() {
        // Replacing √2 by 7/5 re-introduces lattice points on the axis.
        let lat = Lattice::from_q_rows(vec![vec![q(1), q(0)], vec![qr(7, 5), q(1)]]).unwrap();
        let v = Subspace::from_q_rows(vec![vec![q(0), q(1)]]).unwrap();
        let r = intersection_lattice(&lat, &v).unwrap();
        assert_eq!(r.rank, 1);
        let b = &r.basis_q.unwrap()[0];
        assert!(b[0].is_zero());
        // Primitive generator: (0, 5)·(1,0) coefficients (−7,5) ↦ (0,5)… the
        // smallest positive second coordinate on the axis is 5? No: the axis
        // points are a(1,0)+b(7/5,1) with a + 7b/5 = 0 ⇒ 5a + 7b = 0 ⇒
        // (a,b) = t(7,−5), giving (0,−5t). So |second| = 5.
        assert_eq!(b[1].clone().abs(), q(5));
    }

    #[test]
    fn full_space_intersection() {
        let lat = Lattice::standard(2);
        let v = Subspace::from_q_rows(vec![vec![q(1), q(0)], vec![q(0), q(1)]]).unwrap();
        let r = intersection_lattice(&lat, &v).unwrap();
        assert_eq!(r.rank, 2);
    }
}
