//! Fincke–Pohst enumeration of lattice points in ellipsoids.
//!
//! The search runs in floating point over integer coefficient vectors with a
//! slightly inflated radius; every candidate is then re-tested exactly in
//! rational arithmetic when the inputs permit, so boundary points are decided
//! correctly under the closed-ball convention.  A pairwise size-reduction
//! pass (tracked by a unimodular transform) preconditions skew bases.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rat::{q_to_f64, Q};

use super::Lattice;

/// Default cap on enumerated points per call.
pub const ENUM_CAP_DEFAULT: usize = 10_000_000;

/// Relative width of the floating boundary band that triggers membership
/// warnings for irrational-mode inputs.
const BOUNDARY_BAND: f64 = 1e-12;

/// The set `M(B(0, r)) + center`, i.e. an ellipsoid described by an
/// invertible shape matrix, a radius, and an optional rational center.
#[derive(Clone, Debug)]
pub struct Ellipsoid {
    pub shape: Matrix,
    pub radius: Q,
    pub center: Option<Vec<Q>>,
}

impl Ellipsoid {
    pub fn origin(shape: Matrix, radius: Q) -> Result<Self> {
        if !shape.is_invertible() {
            return Err(Error::SingularMatrix);
        }
        if radius <= Q::zero() {
            return Err(Error::InvalidInput("ellipsoid radius must be positive".into()));
        }
        Ok(Ellipsoid {
            shape,
            radius,
            center: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.shape.dim()
    }

    /// Volume of the ellipsoid.
    pub fn volume_f64(&self) -> f64 {
        let n = self.dim();
        crate::rat::unit_ball_volume(n)
            * q_to_f64(&self.radius).powi(n as i32)
            * self.shape.det_f64().abs()
    }
}

/// One enumerated lattice point.
#[derive(Clone, Debug)]
pub struct EnumPoint {
    /// Integer coefficients w.r.t. the lattice generators.
    pub coeffs: Vec<BigInt>,
    pub coords: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct EnumOutcome {
    /// Points sorted by coefficient vector.
    pub points: Vec<EnumPoint>,
    /// Candidates whose membership was decided inside the floating boundary
    /// band (irrational-mode inputs only).
    pub boundary_warnings: usize,
}

impl EnumOutcome {
    pub fn count(&self) -> usize {
        self.points.len()
    }
}

/// Pairwise Lagrange-style size reduction of the columns of `b`, tracking
/// the unimodular transform: returns `(b', u)` with `b' = b · u`.
pub(crate) fn size_reduce(b: &DMatrix<f64>) -> (DMatrix<f64>, Vec<Vec<BigInt>>) {
    let n = b.ncols();
    let mut bb = b.clone();
    let mut u: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::from(1) } else { BigInt::zero() })
                .collect()
        })
        .collect();
    for _pass in 0..200 {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let bj = bb.column(j);
                let nj = bj.dot(&bj);
                if nj <= 0.0 {
                    continue;
                }
                let mu = (bb.column(i).dot(&bj) / nj).round();
                if mu != 0.0 && mu.abs() < 9e15 {
                    let mu_i = BigInt::from(mu as i64);
                    let col_j = bb.column(j).clone_owned();
                    let mut col_i = bb.column_mut(i);
                    col_i.axpy(-mu, &col_j, 1.0);
                    for r in 0..n {
                        let t = &mu_i * &u[r][j];
                        u[r][i] -= t;
                    }
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    (bb, u)
}

/// Cholesky factor R (upper triangular, RᵀR = G) computed in f64.
fn cholesky_upper(g: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = g.nrows();
    let mut r = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let mut d = g[(i, i)];
        for k in 0..i {
            d -= r[(k, i)] * r[(k, i)];
        }
        if d <= 0.0 {
            return None;
        }
        let rii = d.sqrt();
        r[(i, i)] = rii;
        for j in i + 1..n {
            let mut s = g[(i, j)];
            for k in 0..i {
                s -= r[(k, i)] * r[(k, j)];
            }
            r[(i, j)] = s / rii;
        }
    }
    Some(r)
}

/// Enumerates integer vectors with ‖R z − w‖² ≤ r2, calling `visit`.
/// Returns `false` when the visitor aborts (cap reached).
pub(crate) fn enumerate_cholesky(
    r: &DMatrix<f64>,
    w: &[f64],
    r2: f64,
    visit: &mut impl FnMut(&[i64]) -> bool,
) -> bool {
    enumerate_cholesky_clamped(r, w, r2, None, visit)
}

/// Like [`enumerate_cholesky`] with an optional clamp on the outermost
/// coordinate, used to split the search across workers.
pub(crate) fn enumerate_cholesky_clamped(
    r: &DMatrix<f64>,
    w: &[f64],
    r2: f64,
    top_clamp: Option<(i64, i64)>,
    visit: &mut impl FnMut(&[i64]) -> bool,
) -> bool {
    let n = r.nrows();
    let mut z = vec![0i64; n];
    // partial[i] = Σ_{k>i} R[i][k]·z_k − w[i]
    let mut level = n - 1;
    let mut lo = vec![0i64; n];
    let mut hi = vec![-1i64; n];
    let mut used = vec![0.0f64; n + 1]; // used[i] = cost of levels > i

    macro_rules! set_bounds {
        ($i:expr) => {{
            let i = $i;
            let mut s = -w[i];
            for k in i + 1..n {
                s += r[(i, k)] * z[k] as f64;
            }
            let rem = r2 - used[i + 1];
            if rem < 0.0 {
                lo[i] = 1;
                hi[i] = 0;
            } else {
                let half = rem.sqrt() * (1.0 + 1e-12) + 1e-9;
                let rii = r[(i, i)];
                lo[i] = ((-half - s) / rii).ceil() as i64;
                hi[i] = ((half - s) / rii).floor() as i64;
            }
            if i == n - 1 {
                if let Some((clo, chi)) = top_clamp {
                    lo[i] = lo[i].max(clo);
                    hi[i] = hi[i].min(chi);
                }
            }
            lo[i]
        }};
    }

    z[level] = set_bounds!(level);
    loop {
        if z[level] > hi[level] {
            // backtrack
            if level + 1 >= n {
                return true;
            }
            level += 1;
            z[level] += 1;
            continue;
        }
        // cost at this level
        let i = level;
        let mut s = -w[i];
        for k in i + 1..n {
            s += r[(i, k)] * z[k] as f64;
        }
        let t = r[(i, i)] * z[i] as f64 + s;
        let cost = used[i + 1] + t * t;
        if cost > r2 * (1.0 + 1e-9) + 1e-9 {
            z[level] += 1;
            continue;
        }
        if level == 0 {
            if !visit(&z) {
                return false;
            }
            z[0] += 1;
        } else {
            used[level] = cost;
            level -= 1;
            z[level] = set_bounds!(level);
        }
    }
}

/// Bounds of the outermost coordinate for the given factorization.
fn top_level_bounds(r: &DMatrix<f64>, w: &[f64], r2: f64) -> (i64, i64) {
    let n = r.nrows();
    let i = n - 1;
    let s = -w[i];
    let half = r2.max(0.0).sqrt() * (1.0 + 1e-12) + 1e-9;
    let rii = r[(i, i)];
    (
        ((-half - s) / rii).ceil() as i64,
        ((half - s) / rii).floor() as i64,
    )
}

/// Worker count from the WAVESET_THREADS environment variable (default 1).
fn worker_count() -> usize {
    std::env::var("WAVESET_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&t| t >= 1)
        .unwrap_or(1)
        .min(64)
}

struct ExactData {
    /// Rows of M⁻¹·G as exact rationals.
    big: Vec<Vec<Q>>,
    target: Vec<Q>,
    r_sq: Q,
}

/// Exactly the lattice points of `e` (closed or open per the flag).
///
/// Membership is `‖M⁻¹(γ − center)‖ ≤ r` (closed) or `< r` (open).  Errors
/// with [`Error::EnumerationCap`] when more than `cap` points qualify.
pub fn enumerate_points(
    e: &Ellipsoid,
    lat: &Lattice,
    closed: bool,
    cap: usize,
) -> Result<EnumOutcome> {
    let n = e.dim();
    if lat.dim() != n {
        return Err(Error::DimensionMismatch(
            "ellipsoid and lattice dimensions differ".into(),
        ));
    }
    let minv = e.shape.inverse()?;
    let g = lat.generator_matrix();
    // B = M⁻¹·G maps coefficients to ball coordinates.
    let bmat = minv.to_f64() * g.to_f64();
    let radius = q_to_f64(&e.radius);

    // Exact data when every ingredient is rational.
    let exact: Option<ExactData> = match (&minv, g.as_q()) {
        (Matrix::Rational(mi), Some(gq)) => {
            let bq = mi.mul(gq);
            let target = match &e.center {
                Some(c) => mi.mul_vec(c),
                None => vec![Q::zero(); n],
            };
            Some(ExactData {
                big: (0..n).map(|r| bq.row(r)).collect(),
                target,
                r_sq: &e.radius * &e.radius,
            })
        }
        _ => None,
    };

    let w: Vec<f64> = match &e.center {
        Some(c) => {
            let cf: Vec<f64> = c.iter().map(q_to_f64).collect();
            let mf = minv.to_f64();
            (0..n)
                .map(|r| (0..n).map(|k| mf[(r, k)] * cf[k]).sum())
                .collect()
        }
        None => vec![0.0; n],
    };

    // Precondition the basis.
    let (bred, u) = size_reduce(&bmat);
    // Order columns by ascending norm so the outermost enumeration level has
    // the tightest interval.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let na = bred.column(a).norm();
        let nb = bred.column(b).norm();
        na.partial_cmp(&nb).unwrap()
    });
    let bperm = DMatrix::from_fn(n, n, |r, c| bred[(r, order[c])]);
    let gram = bperm.transpose() * &bperm;
    let rchol = cholesky_upper(&gram).ok_or_else(|| {
        Error::InvalidInput("degenerate quadratic form in enumeration".into())
    })?;
    // Solve R w' = projection for the target: w expressed in the triangular
    // frame is Rᵀ⁻¹·(Bᵀw)… use least squares via the normal equations.
    let wprime = if w.iter().all(|x| *x == 0.0) {
        vec![0.0; n]
    } else {
        // Find y with B_perm·y = w; then ‖B z − w‖² = ‖R(z − y)‖².
        let wv = nalgebra::DVector::from_vec(w.clone());
        let y = bperm
            .clone()
            .lu()
            .solve(&wv)
            .ok_or(Error::SingularMatrix)?;
        let ry = &rchol * y;
        ry.iter().cloned().collect()
    };

    let r2 = radius * radius * (1.0 + 1e-9) + 1e-12;
    // The reduced basis in the enumeration (permuted) coordinate order and
    // its absolute-value copy, used for a rigorous float error bound.
    let bperm_abs = bperm.map(|x| x.abs());
    let u_is_identity = (0..n).all(|r| {
        (0..n).all(|c| u[r][c] == if r == c { BigInt::from(1) } else { BigInt::zero() })
    });
    let r_sq_f = radius * radius;

    // Shared candidate filter: returns the accepted coefficient vector and
    // whether the decision touched the floating boundary band.
    let filter = |zp: &[i64]| -> (Option<Vec<BigInt>>, bool) {
        let mut boundary_warn = false;
        // Candidate in original coefficient coordinates.
        let mut zr = vec![0i64; n];
        for (c, &zc) in zp.iter().enumerate() {
            zr[order[c]] = zc;
        }
        // Certified float filter in the reduced frame: the value and an
        // upper bound for its rounding error.
        let mut s_f = 0.0f64;
        let mut s_abs = 0.0f64;
        for r in 0..n {
            let mut acc = 0.0;
            let mut acc_abs = 0.0;
            for (c, &zc) in zp.iter().enumerate() {
                acc += bperm[(r, c)] * zc as f64;
                acc_abs += bperm_abs[(r, c)] * (zc as f64).abs();
            }
            acc -= w[r];
            acc_abs += w[r].abs();
            s_f += acc * acc;
            s_abs += acc_abs * acc_abs;
        }
        // Includes the representation error of the exact radius² in f64.
        let err = 1e-12 * (s_abs + r_sq_f + 1.0);
        let inside = if s_f + err < r_sq_f {
            true
        } else if s_f - err > r_sq_f {
            false
        } else {
            // Boundary band: decide exactly when possible.
            match &exact {
                Some(ex) => {
                    let z: Vec<BigInt> = if u_is_identity {
                        zr.iter().map(|&v| BigInt::from(v)).collect()
                    } else {
                        (0..n)
                            .map(|r| {
                                (0..n)
                                    .map(|c| &u[r][c] * BigInt::from(zr[c]))
                                    .sum::<BigInt>()
                            })
                            .collect()
                    };
                    let zq: Vec<Q> = z.iter().map(|x| Q::from_integer(x.clone())).collect();
                    let mut s = Q::zero();
                    for (brow, t) in ex.big.iter().zip(&ex.target) {
                        let mut acc = -t.clone();
                        for (bc, zc) in brow.iter().zip(&zq) {
                            acc += bc * zc;
                        }
                        s += &acc * &acc;
                    }
                    if closed {
                        s <= ex.r_sq
                    } else {
                        s < ex.r_sq
                    }
                }
                None => {
                    boundary_warn = true;
                    if closed {
                        s_f <= r_sq_f * (1.0 + BOUNDARY_BAND)
                    } else {
                        s_f < r_sq_f * (1.0 - BOUNDARY_BAND)
                    }
                }
            }
        };
        if inside {
            let z: Vec<BigInt> = if u_is_identity {
                zr.iter().map(|&v| BigInt::from(v)).collect()
            } else {
                (0..n)
                    .map(|r| {
                        (0..n)
                            .map(|c| &u[r][c] * BigInt::from(zr[c]))
                            .sum::<BigInt>()
                    })
                    .collect()
            };
            (Some(z), boundary_warn)
        } else {
            (None, boundary_warn)
        }
    };

    // Optional worker split over the outermost enumeration coordinate
    // (deterministic merge: chunks are disjoint and the result is sorted).
    let workers = worker_count();
    let (tlo, thi) = top_level_bounds(&rchol, &wprime, r2);
    let mut points: Vec<Vec<BigInt>> = Vec::new();
    let mut warnings = 0usize;
    let mut capped = false;
    if workers <= 1 || thi.saturating_sub(tlo) < 2 * workers as i64 || n == 1 {
        let complete = enumerate_cholesky(&rchol, &wprime, r2, &mut |zp| {
            let (hit, warn) = filter(zp);
            if warn {
                warnings += 1;
            }
            if let Some(z) = hit {
                points.push(z);
                if points.len() > cap {
                    capped = true;
                    return false;
                }
            }
            true
        });
        if !complete && capped {
            return Err(Error::EnumerationCap {
                cap,
                partial: points.len(),
            });
        }
    } else {
        let span = thi - tlo + 1;
        let chunk = (span + workers as i64 - 1) / workers as i64;
        let results: Vec<(Vec<Vec<BigInt>>, usize, bool)> = std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for t in 0..workers {
                let lo_t = tlo + t as i64 * chunk;
                let hi_t = (lo_t + chunk - 1).min(thi);
                let rchol = &rchol;
                let wprime = &wprime;
                let filter = &filter;
                handles.push(scope.spawn(move || {
                    let mut pts: Vec<Vec<BigInt>> = Vec::new();
                    let mut warns = 0usize;
                    let mut over = false;
                    if lo_t <= hi_t {
                        enumerate_cholesky_clamped(
                            rchol,
                            wprime,
                            r2,
                            Some((lo_t, hi_t)),
                            &mut |zp| {
                                let (hit, warn) = filter(zp);
                                if warn {
                                    warns += 1;
                                }
                                if let Some(z) = hit {
                                    pts.push(z);
                                    if pts.len() > cap {
                                        over = true;
                                        return false;
                                    }
                                }
                                true
                            },
                        );
                    }
                    (pts, warns, over)
                }));
            }
            handles.into_iter().map(|h| h.join().expect("worker")).collect()
        });
        for (pts, warns, over) in results {
            points.extend(pts);
            warnings += warns;
            capped |= over;
        }
        if capped || points.len() > cap {
            return Err(Error::EnumerationCap {
                cap,
                partial: points.len(),
            });
        }
    }
    points.sort();
    points.dedup();
    let points = points
        .into_iter()
        .map(|z| {
            let coords = lat.point_f64(&z);
            EnumPoint { coeffs: z, coords }
        })
        .collect();
    Ok(EnumOutcome {
        points,
        boundary_warnings: warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::QMatrix;
    use crate::rat::{q, qr};

    fn ident_ball(r: Q, n: usize) -> Ellipsoid {
        Ellipsoid::origin(Matrix::Rational(QMatrix::identity(n)), r).unwrap()
    }

    #[test]
    fn closed_unit_ball_z2() {
        let out = enumerate_points(&ident_ball(q(1), 2), &Lattice::standard(2), true, 1000)
            .unwrap();
        // {0, ±e₁, ±e₂}
        assert_eq!(out.count(), 5);
    }

    #[test]
    fn open_unit_ball_z2() {
        let out = enumerate_points(&ident_ball(q(1), 2), &Lattice::standard(2), false, 1000)
            .unwrap();
        assert_eq!(out.count(), 1);
    }

    #[test]
    fn skew_ellipse_matches_brute_force() {
        // Closed ellipse with semiaxes (2⁻³, 2³): only the x = 0 column
        // survives, |y| ≤ 8 → 17 points.
        let shape = Matrix::Rational(QMatrix::diagonal(&[qr(1, 8), q(8)]));
        let e = Ellipsoid::origin(shape, q(1)).unwrap();
        let out = enumerate_points(&e, &Lattice::standard(2), true, 1000).unwrap();
        // Brute-force oracle over |x|,|y| ≤ 8.
        let mut brute = 0;
        for x in -8i64..=8 {
            for y in -8i64..=8 {
                let s = (x as f64 * 8.0).powi(2) + (y as f64 / 8.0).powi(2);
                if s <= 1.0 + 1e-12 {
                    brute += 1;
                }
            }
        }
        assert_eq!(out.count(), brute);
        assert_eq!(out.count(), 17);
    }

    #[test]
    fn shifted_center() {
        // Unit ball centered at (1/2, 0): members are (0,0) and (1,0).
        let mut e = ident_ball(q(1), 2);
        e.center = Some(vec![qr(1, 2), q(0)]);
        let out = enumerate_points(&e, &Lattice::standard(2), true, 1000).unwrap();
        // Brute-force oracle: only (0,0) and (1,0) are within distance 1.
        let mut brute = vec![];
        for x in -3i64..=3 {
            for y in -3i64..=3 {
                if ((x as f64 - 0.5).powi(2) + (y as f64).powi(2)).sqrt() <= 1.0 + 1e-12 {
                    brute.push((x, y));
                }
            }
        }
        assert_eq!(out.count(), brute.len());
    }

    #[test]
    fn cap_is_enforced() {
        let e = ident_ball(q(100), 2);
        let err = enumerate_points(&e, &Lattice::standard(2), true, 10).unwrap_err();
        assert!(matches!(err, Error::EnumerationCap { cap: 10, .. }));
    }

    #[test]
    fn boundary_points_exact() {
        // Radius 5 circle hits (±3,±4),(±4,±3),(±5,0),(0,±5): 12 boundary
        // points; closed minus open count must be exactly 12.
        let closed = enumerate_points(&ident_ball(q(5), 2), &Lattice::standard(2), true, 10000)
            .unwrap()
            .count();
        let open = enumerate_points(&ident_ball(q(5), 2), &Lattice::standard(2), false, 10000)
            .unwrap()
            .count();
        assert_eq!(closed - open, 12);
    }

    #[test]
    fn skew_lattice_anisotropic() {
        // Lattice {(1,0),(√2,1)} under diag(2^j, 2^{-j}) stays sparse.
        let s2 = std::f64::consts::SQRT_2;
        let lat = Lattice::from_rows(
            &Matrix::from_f64_rows(vec![vec![1.0, 0.0], vec![s2, 1.0]]).unwrap(),
        )
        .unwrap();
        for j in [5i32, 10, 15, 20] {
            let shape = Matrix::Float(nalgebra::DMatrix::from_diagonal(
                &nalgebra::DVector::from_vec(vec![2f64.powi(-j), 2f64.powi(j)]),
            ));
            let e = Ellipsoid::origin(shape, q(1)).unwrap();
            let out = enumerate_points(&e, &lat, true, 100_000).unwrap();
            assert!(out.count() <= 5, "j={j} count={}", out.count());
            assert!(out.count() >= 1);
        }
    }
}
