//! Ellipsoid section/projection formulas and the packing slice bound.

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{enumerate_points, Ellipsoid, Lattice, Subspace};
use crate::linalg::{operator_norm, Matrix, QMatrix};
use crate::rat::{q_to_f64, rationalize, sqrt_upper, unit_ball_volume, Q};
use crate::regions::{poly2::ConvexPoly, translation_check, BoolOp, Region};

/// Orthonormal basis (columns) of the span of the given rows.
fn orthonormal_columns(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let n = rows[0].len();
    let mut cols: Vec<DVector<f64>> = Vec::new();
    for r in rows {
        let mut w = DVector::from_vec(r.clone());
        for u in &cols {
            let c = u.dot(&w);
            w -= u * c;
        }
        if w.norm() > 1e-12 {
            let nn = w.norm();
            cols.push(w / nn);
        }
    }
    DMatrix::from_fn(n, cols.len(), |r, c| cols[c][r])
}

fn orthonormal_complement(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let n = rows[0].len();
    let mut cols: Vec<DVector<f64>> = Vec::new();
    for r in rows {
        let mut w = DVector::from_vec(r.clone());
        for u in &cols {
            let c = u.dot(&w);
            w -= u * c;
        }
        if w.norm() > 1e-12 {
            let nn = w.norm();
            cols.push(w / nn);
        }
    }
    let d = cols.len();
    let mut comp: Vec<DVector<f64>> = Vec::new();
    for i in 0..n {
        let mut w = DVector::from_fn(n, |r, _| if r == i { 1.0 } else { 0.0 });
        for u in cols.iter().chain(comp.iter()) {
            let c = u.dot(&w);
            w -= u * c;
        }
        if w.norm() > 1e-9 {
            let nn = w.norm();
            comp.push(w / nn);
        }
    }
    debug_assert_eq!(d + comp.len(), n);
    DMatrix::from_fn(n, comp.len(), |r, c| comp[c][r])
}

/// d-volume of `V ∩ M(B(0,r))` by the closed-form quadric restriction.
pub fn ellipsoid_subspace_volume(m: &DMatrix<f64>, r: f64, v: &Subspace) -> Result<f64> {
    let n = m.nrows();
    if v.ambient_dim() != n {
        return Err(Error::DimensionMismatch("subspace vs ellipsoid".into()));
    }
    let d = v.dim();
    let mm = m * m.transpose();
    let qmat = mm
        .try_inverse()
        .ok_or(Error::SingularMatrix)?;
    let o = orthonormal_columns(&v.rows_f64());
    if o.ncols() != d {
        return Err(Error::InvalidInput("degenerate subspace basis".into()));
    }
    let restricted = o.transpose() * qmat * &o;
    let det = restricted.determinant();
    if det <= 0.0 {
        return Err(Error::InvalidInput("indefinite restriction".into()));
    }
    Ok(unit_ball_volume(d) * r.powi(d as i32) / det.sqrt())
}

/// Codimension-one section `m_{n−1}(A(B(0,1)) ∩ ξ^⊥) = C_n·|det A|/‖Aᵀξ‖`
/// with `C_n` the (n−1)-dimensional unit-ball volume.
pub fn ellipsoid_section_volume(a: &Matrix, xi: &[f64]) -> Result<f64> {
    let n = a.dim();
    if xi.len() != n {
        return Err(Error::DimensionMismatch("normal vector".into()));
    }
    let x = DVector::from_vec(xi.to_vec());
    let nrm = x.norm();
    if (nrm - 1.0).abs() > 1e-9 {
        return Err(Error::Precondition("ξ must be a unit vector".into()));
    }
    let af = a.to_f64();
    let atxi = af.transpose() * x;
    Ok(unit_ball_volume(n - 1) * a.det_f64().abs() / atxi.norm())
}

/// Upper bound `c_k · Π_{i=1}^k λ_i` on the k-volume of any k-dimensional
/// central section, from the k largest principal semi-axes.
pub fn section_upper_bound(e: &Ellipsoid, v: &Subspace) -> Result<f64> {
    let k = v.dim();
    let mf = e.shape.to_f64();
    let mut sv: Vec<f64> = mf.svd(false, false).singular_values.iter().cloned().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let r = q_to_f64(&e.radius);
    let prod: f64 = sv.iter().take(k).map(|s| s * r).product();
    Ok(unit_ball_volume(k) * prod)
}

#[derive(Clone, Debug)]
pub struct ProjectionSectionReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Checks `m_d(E ∩ V) · m_{n−d}(Q(E)) ≤ 2ⁿ · m_n(E)` with Q the orthogonal
/// projection onto V^⊥.
pub fn projection_section_check(e: &Ellipsoid, v: &Subspace) -> Result<ProjectionSectionReport> {
    let n = e.dim();
    let d = v.dim();
    if e.center.is_some() {
        return Err(Error::Precondition("ellipsoid must be origin-centered".into()));
    }
    let mf = e.shape.to_f64();
    let r = q_to_f64(&e.radius);
    let section = ellipsoid_subspace_volume(&mf, r, v)?;
    // Projection onto V^⊥ of M(B(0,r)): an ellipsoid with squared shape
    // O⊥ᵀ·MMᵀ·O⊥.
    let rows = v.rows_f64();
    let comp = orthonormal_complement(&rows);
    let mm = &mf * mf.transpose();
    let proj_quad = comp.transpose() * mm * &comp;
    let detp = proj_quad.determinant();
    let proj_vol = unit_ball_volume(n - d) * r.powi((n - d) as i32) * detp.sqrt();
    let lhs = section * proj_vol;
    let rhs = 2f64.powi(n as i32)
        * unit_ball_volume(n)
        * r.powi(n as i32)
        * e.shape.det_f64().abs();
    Ok(ProjectionSectionReport {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + 1e-9),
    })
}

/// Exact parametric section of a box by a plane through the origin in ℝ³.
///
/// Returns (parametric area, Gram determinant): the true 2-volume of the
/// section is `param_area · √gram_det`.
pub fn plane_box_section(
    v1: &[Q; 3],
    v2: &[Q; 3],
    lo: &[Q; 3],
    hi: &[Q; 3],
) -> Result<(Q, Q)> {
    let g11: Q = v1.iter().map(|x| x * x).sum();
    let g22: Q = v2.iter().map(|x| x * x).sum();
    let g12: Q = v1.iter().zip(v2.iter()).map(|(a, b)| a * b).sum();
    let det = &g11 * &g22 - &g12 * &g12;
    if det.is_zero() {
        return Err(Error::InvalidInput("plane basis is degenerate".into()));
    }
    let trace = &g11 + &g22;
    // λ_min ≥ det/trace for a 2×2 SPD Gram matrix.
    let lam_min_lb = &det / &trace;
    let m2: Q = (0..3)
        .map(|k| {
            let m = lo[k].clone().abs().max(hi[k].clone().abs());
            &m * &m
        })
        .sum();
    let rad = sqrt_upper(&(&m2 / &lam_min_lb)) + Q::one();
    let mut poly = ConvexPoly::from_box(&[-rad.clone(), -rad.clone()], &[rad.clone(), rad])
        .expect("nondegenerate start box");
    for k in 0..3 {
        // lo_k ≤ s·v1[k] + t·v2[k] ≤ hi_k.
        if v1[k].is_zero() && v2[k].is_zero() {
            if lo[k].is_positive() || hi[k].is_negative() {
                return Ok((Q::zero(), det));
            }
            continue;
        }
        poly = match poly.clip_halfplane(&v1[k], &v2[k], &hi[k]) {
            Some(p) => p,
            None => return Ok((Q::zero(), det)),
        };
        poly = match poly.clip_halfplane(&-v1[k].clone(), &-v2[k].clone(), &-lo[k].clone()) {
            Some(p) => p,
            None => return Ok((Q::zero(), det)),
        };
    }
    Ok((poly.area(), det))
}

/// Certified inner and outer rational polygons for the disk `B(center, r)`.
pub fn disk_polygons(center: &[Q; 2], r: &Q, sides: usize) -> (Region, Region) {
    let rf = q_to_f64(r);
    let cf = [q_to_f64(&center[0]), q_to_f64(&center[1])];
    let make = |scale: f64| -> Vec<[Q; 2]> {
        (0..sides)
            .map(|k| {
                let th = 2.0 * std::f64::consts::PI * k as f64 / sides as f64;
                let x = rationalize(cf[0] + scale * rf * th.cos(), 1 << 24).unwrap();
                let y = rationalize(cf[1] + scale * rf * th.sin(), 1 << 24).unwrap();
                [x, y]
            })
            .collect()
    };
    // Inner: shrink until every vertex verifies ‖v − c‖² ≤ r² exactly.
    let mut shrink = 1.0 - 1e-6;
    let inner = loop {
        let verts = make(shrink);
        let ok = verts.iter().all(|p| {
            let dx = &p[0] - &center[0];
            let dy = &p[1] - &center[1];
            &dx * &dx + &dy * &dy <= r * r
        });
        if ok {
            break ConvexPoly::new(verts).expect("inner polygon");
        }
        shrink -= 1e-6;
    };
    // Outer: grow until every edge line verifies distance ≥ r exactly.
    let apothem = (std::f64::consts::PI / sides as f64).cos();
    let mut grow = (1.0 + 1e-6) / apothem;
    let outer = loop {
        let verts = make(grow);
        let n = verts.len();
        let ok = (0..n).all(|i| {
            let a = &verts[i];
            let b = &verts[(i + 1) % n];
            // Distance from the center to the line through a, b is at least
            // r ⟺ cross² ≥ r²·‖b−a‖².
            let ax = &a[0] - &center[0];
            let ay = &a[1] - &center[1];
            let bx = &b[0] - &center[0];
            let by = &b[1] - &center[1];
            let cross = &ax * &by - &ay * &bx;
            let dx = &bx - &ax;
            let dy = &by - &ay;
            &cross * &cross >= r * r * (&dx * &dx + &dy * &dy)
        });
        if ok {
            break ConvexPoly::new(verts).expect("outer polygon");
        }
        grow += 1e-6;
    };
    (Region::D2(vec![inner]), Region::D2(vec![outer]))
}

#[derive(Clone, Debug)]
pub struct SliceBoundReport {
    /// Lower/upper enclosures of |B(x,1) ∩ A(W)| (equal in 1-D).
    pub measured_lo: f64,
    pub measured_hi: f64,
    pub bound: f64,
    pub lattice_count: usize,
    pub holds: bool,
}

/// Verifies the packing slice bound
/// `|B(x,1) ∩ A(W)| ≤ 3ⁿ·n!·c_n / #|A⁻¹(B(0,1)) ∩ Γ|`
/// for a region `W` that packs by Γ translations.
pub fn slice_bound_check(
    w: &Region,
    lat: &Lattice,
    a: &QMatrix,
    x: &[Q],
) -> Result<SliceBoundReport> {
    let n = w.dim();
    if a.nrows() != n || x.len() != n {
        return Err(Error::DimensionMismatch("slice bound inputs".into()));
    }
    let rep = translation_check(w, lat)?;
    if !rep.packs {
        return Err(Error::Precondition(
            "slice bound needs a region that packs by translations".into(),
        ));
    }
    let aw = w.affine_image(a, &vec![Q::zero(); n])?;
    let (mlo, mhi) = match n {
        1 => {
            let ball = Region::interval(&x[0] - Q::one(), &x[0] + Q::one());
            let v = q_to_f64(&ball.boolean(&aw, BoolOp::Intersect)?.volume());
            (v, v)
        }
        2 => {
            let c = [x[0].clone(), x[1].clone()];
            let (inner, outer) = disk_polygons(&c, &Q::one(), 64);
            let lo = q_to_f64(&inner.boolean(&aw, BoolOp::Intersect)?.volume());
            let hi = q_to_f64(&outer.boolean(&aw, BoolOp::Intersect)?.volume());
            (lo, hi)
        }
        _ => {
            return Err(Error::Unsupported(
                "slice bound is implemented for dimensions 1–2".into(),
            ))
        }
    };
    let am = Matrix::Rational(a.clone());
    let ainv = am.inverse()?;
    let ball = Ellipsoid::origin(ainv, Q::one())?;
    let count = enumerate_points(&ball, lat, true, crate::lattice::ENUM_CAP_DEFAULT)?.count();
    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    let bound = 3f64.powi(n as i32) * factorial * unit_ball_volume(n) / count as f64;
    Ok(SliceBoundReport {
        measured_lo: mlo,
        measured_hi: mhi,
        bound,
        lattice_count: count,
        holds: mhi <= bound * (1.0 + 1e-9),
    })
}

#[allow(dead_code)]
fn unused(_: &dyn Fn() -> f64) {
    let _ = operator_norm;
}
