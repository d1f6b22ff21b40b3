//! Dilation-side verification: the equivalency map d, pack/cover checks for
//! matrix dilations, and the finite-window certificates that turn the
//! j ∈ ℤ quantifier into a finite computation.
//!
//! A window certificate for a pair (V, W) is a range [j₋, j₊] outside of
//! which `Aʲ(V) ∩ W` is provably empty.  Two certificate strategies are
//! implemented: Euclidean annulus separation driven by exact operator-norm
//! bounds (requires A expansive), and per-coordinate band separation for
//! diagonal A (covers the nonexpansive diagonal cases).  Inputs accumulating
//! at 0 or ∞ are rejected rather than silently truncated.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::rat::Q;

use super::lattice_ops::TilingReport;
use super::{BoolOp, Region};

/// Exact upper bound for the squared spectral norm: ‖M‖₂² ≤ ‖M‖₁·‖M‖∞.
fn norm2_sq_upper(m: &QMatrix) -> Q {
    m.inf_norm() * m.transpose().inf_norm()
}

const MAX_WINDOW: i64 = 512;

/// Certified j-range outside of which `Aʲ(V) ∩ W = ∅`.
pub fn certified_dilation_window(
    v: &Region,
    w: &Region,
    a: &QMatrix,
) -> Result<(i64, i64)> {
    if v.is_empty() || w.is_empty() {
        return Ok((0, -1));
    }
    if let Some(win) = diagonal_window(v, w, a) {
        return Ok(win);
    }
    if let Some(win) = annulus_window(v, w, a)? {
        return Ok(win);
    }
    Err(Error::WindowUncertifiable(
        "no separating certificate (matrix neither expansive nor diagonal with a separating coordinate, or the regions accumulate at 0/∞)"
            .into(),
    ))
}

fn diagonal_window(v: &Region, w: &Region, a: &QMatrix) -> Option<(i64, i64)> {
    if !a.is_diagonal() {
        return None;
    }
    let n = a.nrows();
    let one = Q::one();
    for i in 0..n {
        let lam = a.at(i, i).clone().abs();
        if lam == one {
            continue;
        }
        let (vlo, vhi) = v.abs_coord_range(i)?;
        let (wlo, whi) = w.abs_coord_range(i)?;
        // λʲ·[vlo, vhi] must meet [wlo, whi].
        let (grow, shrink) = if lam > one {
            (lam.clone(), one.clone() / &lam)
        } else {
            (one.clone() / &lam, lam.clone())
        };
        // Positive direction along growth: needs vlo > 0.
        let jplus = if vlo.is_zero() {
            None
        } else {
            let mut b = vlo.clone();
            let mut j = 0i64;
            loop {
                if b > whi {
                    break Some(j - 1);
                }
                j += 1;
                if j > MAX_WINDOW {
                    break None;
                }
                b *= &grow;
            }
        };
        // Negative direction: needs wlo > 0.
        let jminus = if wlo.is_zero() {
            None
        } else {
            let mut b = vhi.clone();
            let mut j = 0i64;
            loop {
                if b < wlo {
                    break Some(-(j - 1));
                }
                j += 1;
                if j > MAX_WINDOW {
                    break None;
                }
                b *= &shrink;
            }
        };
        if let (Some(p), Some(m)) = (jplus, jminus) {
            // When λ < 1 growth happens toward −∞; swap the roles.
            let (lo, hi) = if lam > one { (m, p) } else { (-p, -m) };
            return Some((lo.min(hi), lo.max(hi)));
        }
    }
    None
}

fn annulus_window(v: &Region, w: &Region, a: &QMatrix) -> Result<Option<(i64, i64)>> {
    let (v0sq, v1sq) = v.norm_sq_range().expect("nonempty");
    let (w0sq, w1sq) = w.norm_sq_range().expect("nonempty");
    if v0sq.is_zero() || w0sq.is_zero() {
        return Ok(None);
    }
    let ainv = match a.inverse() {
        Some(x) => x,
        None => return Err(Error::SingularMatrix),
    };
    // e_k = certified bound on ‖A^{−k}‖₂².
    let mut e = vec![Q::one()];
    let mut pow = QMatrix::identity(a.nrows());
    let mut period = None;
    for k in 1..=64usize {
        pow = pow.mul(&ainv);
        e.push(norm2_sq_upper(&pow));
        if e[k] < Q::one() {
            period = Some(k);
            break;
        }
    }
    let Some(m) = period else {
        return Ok(None); // A is not expansive; no annulus certificate.
    };
    let c0 = e[..m].iter().cloned().fold(Q::zero(), |acc, x| acc.max(x));
    let em = e[m].clone();
    // Exclusion for all j ≥ js in the + direction:
    //   min‖Aʲ(V)‖² ≥ v0²/‖A^{−j}‖² and ‖A^{−j}‖² ≤ e_js·C0 for j ≥ js.
    let mut ejs = Q::one();
    let mut js = 0i64;
    let jplus = loop {
        if &v0sq > &(&w1sq * &ejs * &c0) {
            break js - 1;
        }
        js += 1;
        if js > MAX_WINDOW {
            return Ok(None);
        }
        if js as usize % m == 0 {
            ejs = em.pow(js as i32 / m as i32);
        } else {
            ejs = em.pow(js as i32 / m as i32) * e[js as usize % m].clone();
        }
    };
    // − direction: max‖A^{−k}(V)‖² ≤ e_k·v1² < w0² for all k ≥ ks.
    let mut ks = 0i64;
    let jminus = loop {
        let eks = if ks == 0 {
            Q::one()
        } else {
            em.pow(ks as i32 / m as i32) * e[ks as usize % m].clone()
        };
        if &(&eks * &c0 * &v1sq) < &w0sq {
            break -(ks - 1);
        }
        ks += 1;
        if ks > MAX_WINDOW {
            return Ok(None);
        }
    };
    Ok(Some((jminus.min(jplus), jplus.max(jminus))))
}

/// Dilation equivalency map `d_W(V) = ⋃_j (Aʲ(V) ∩ W)` over a certified (or
/// explicitly supplied) window.
pub fn d_map(
    v: &Region,
    w: &Region,
    a: &QMatrix,
    window: Option<(i64, i64)>,
) -> Result<Region> {
    let (jlo, jhi) = match window {
        Some(win) => win,
        None => certified_dilation_window(v, w, a)?,
    };
    let mut out = Region::empty(v.dim())?;
    let zero_t = vec![Q::zero(); v.dim()];
    for j in jlo..=jhi {
        let aj = a.pow(j)?;
        let img = v.affine_image(&aj, &zero_t)?;
        let piece = img.boolean(w, BoolOp::Intersect)?;
        if !piece.is_empty() {
            out = out.boolean(&piece, BoolOp::Union)?;
        }
    }
    Ok(out)
}

/// Pack/cover report for dilations of `s`, with covering measured against a
/// reference region `tile` that tiles by A dilations.
///
/// Packing is decided from the pairwise overlaps `|Aⁱ(s) ∩ s|` for i ≥ 1
/// inside a certified window.  Covering is `|tile ∖ d_tile(s)| = 0`; when no
/// window certificate exists the map is accumulated over expanding windows,
/// which can still certify covering (a zero deficit cannot be undone) but
/// reports a nonzero `truncation_bound` when it never reaches zero.
pub fn dilation_check(s: &Region, a: &QMatrix, tile: &Region) -> Result<TilingReport> {
    let det = a.det().abs();
    if det == Q::one() {
        return Err(Error::Precondition(
            "dilation check needs |det A| ≠ 1".into(),
        ));
    }
    let zero_t = vec![Q::zero(); s.dim()];

    // Pack side.
    let mut excess = Q::zero();
    let mut pack_certified = true;
    match certified_dilation_window(s, s, a) {
        Ok((jlo, jhi)) => {
            let imax = jhi.max(-jlo).max(0);
            for i in 1..=imax {
                let ai = a.pow(i)?;
                let img = s.affine_image(&ai, &zero_t)?;
                excess += img.boolean(s, BoolOp::Intersect)?.volume();
            }
        }
        Err(_) => {
            // Probe: a found overlap soundly refutes packing.
            pack_certified = false;
            for i in 1..=64i64 {
                let ai = a.pow(i)?;
                let img = s.affine_image(&ai, &zero_t)?;
                excess += img.boolean(s, BoolOp::Intersect)?.volume();
            }
            if excess.is_zero() {
                return Err(Error::WindowUncertifiable(
                    "packing window not certifiable and no overlap found in the probe range"
                        .into(),
                ));
            }
        }
    }

    // Cover side.
    let mut deficit;
    let mut truncation = Q::zero();
    match certified_dilation_window(s, tile, a) {
        Ok(win) => {
            let d = d_map(s, tile, a, Some(win))?;
            deficit = &tile.volume() - &d.volume();
        }
        Err(e) => {
            // Expanding windows: covering can still be certified by reaching
            // zero deficit.
            let mut d = Region::empty(s.dim())?;
            deficit = tile.volume();
            for k in 0..=16i64 {
                let dk = d_map(s, tile, a, Some((-k, k)))?;
                d = d.boolean(&dk, BoolOp::Union)?;
                deficit = &tile.volume() - &d.volume();
                if deficit.is_zero() {
                    break;
                }
            }
            if !deficit.is_zero() {
                if pack_certified && excess.is_zero() {
                    return Err(e);
                }
                truncation = deficit.clone();
            }
        }
    }

    Ok(TilingReport {
        packs: excess.is_zero(),
        covers: deficit.is_zero(),
        excess_volume: excess,
        deficit_volume: deficit,
        truncation_bound: truncation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{q, qr};

    fn a1(v: i64) -> QMatrix {
        QMatrix::diagonal(&[q(v)])
    }

    fn shannon() -> Region {
        Region::intervals(vec![(q(-1), qr(-1, 2)), (qr(1, 2), q(1))])
    }

    fn band_tile_1d() -> Region {
        Region::intervals(vec![(q(-2), q(-1)), (q(1), q(2))])
    }

    #[test]
    fn window_certificates() {
        let s = shannon();
        let t = band_tile_1d();
        let (lo, hi) = certified_dilation_window(&s, &t, &a1(2)).unwrap();
        // 2ʲ·[1/2, 1] meets [1, 2] exactly for j ∈ {0, 1, 2}.
        assert!(lo <= 0 && hi >= 2, "window ({lo}, {hi})");
        // A region touching the origin cannot be certified.
        let bad = Region::interval(q(0), q(1));
        assert!(certified_dilation_window(&bad, &t, &a1(2)).is_err());
    }

    #[test]
    fn band_tile_tiles_by_dilations() {
        // S = (−2,−1) ∪ (1,2) under A = 2 tiles ℝ∖{0}.
        let t = band_tile_1d();
        let rep = dilation_check(&t, &a1(2), &t).unwrap();
        assert!(rep.packs && rep.covers, "{rep:?}");
    }

    #[test]
    fn shannon_tiles_by_dilations() {
        let s = shannon();
        let t = band_tile_1d();
        let rep = dilation_check(&s, &a1(2), &t).unwrap();
        assert!(rep.packs && rep.covers, "{rep:?}");
        assert!(rep.excess_volume.is_zero());
        assert!(rep.deficit_volume.is_zero());
    }

    #[test]
    fn overlapping_interval_fails_pack() {
        // S = [1, 3): A(S) ∩ S = [2, 3) has measure 1.
        let s = Region::interval(q(1), q(3));
        let t = band_tile_1d();
        let rep = dilation_check(&s, &a1(2), &t).unwrap();
        assert!(!rep.packs);
        assert_eq!(rep.excess_volume, q(1));
        // Dilates of [1,3) only reach the positive axis.
        assert!(!rep.covers);
        assert_eq!(rep.deficit_volume, q(1));
    }

    #[test]
    fn unit_square_fails_pack_2d() {
        let s = Region::box2([q(0), q(0)], [q(1), q(1)]).unwrap();
        let a = QMatrix::diagonal(&[q(2), q(2)]);
        // Reference: the box frame [−1,1]² ∖ [−1/2,1/2]².
        let outer = Region::box2([q(-1), q(-1)], [q(1), q(1)]).unwrap();
        let inner = Region::box2([qr(-1, 2), qr(-1, 2)], [qr(1, 2), qr(1, 2)]).unwrap();
        let tile = outer.boolean(&inner, BoolOp::Difference).unwrap();
        let rep = dilation_check(&s, &a, &tile).unwrap();
        assert!(!rep.packs);
        assert!(!rep.covers);
    }

    #[test]
    fn d_map_identity_on_subsets() {
        // V ⊆ W ⇒ d_W(V) = V.
        let w = band_tile_1d();
        let v = Region::interval(qr(5, 4), qr(3, 2));
        let d = d_map(&v, &w, &a1(2), None).unwrap();
        let sym = d.boolean(&v, BoolOp::SymmetricDifference).unwrap();
        assert!(sym.volume().is_zero());
        // V = A⁻¹(W′) for W′ ⊆ W maps onto W′.
        let wp = Region::interval(qr(3, 2), q(2));
        let v2 = Region::interval(qr(3, 4), q(1));
        let d2 = d_map(&v2, &w, &a1(2), None).unwrap();
        let sym2 = d2.boolean(&wp, BoolOp::SymmetricDifference).unwrap();
        assert!(sym2.volume().is_zero());
    }

    #[test]
    fn d_map_brute_force_window() {
        // Random-ish V against the band tile: explicit window equals the
        // certified one.
        let w = band_tile_1d();
        let v = Region::intervals(vec![(qr(1, 8), qr(1, 4)), (q(3), q(5))]);
        let auto = d_map(&v, &w, &a1(2), None).unwrap();
        let wide = d_map(&v, &w, &a1(2), Some((-12, 12))).unwrap();
        assert!(auto
            .boolean(&wide, BoolOp::SymmetricDifference)
            .unwrap()
            .volume()
            .is_zero());
    }

    #[test]
    fn quincunx_expansive_window() {
        // Non-diagonal but expansive: the annulus certificate applies.
        let a = QMatrix::from_rows(vec![vec![q(1), q(1)], vec![q(-1), q(1)]]).unwrap();
        let s = Region::box2([q(1), q(1)], [q(2), q(2)]).unwrap();
        let (lo, hi) = certified_dilation_window(&s, &s, &a).unwrap();
        assert!(lo <= 0 && hi >= 0);
        assert!(hi < 40);
    }

    #[test]
    fn nonexpansive_diagonal_window() {
        // diag(2, 1/2) with bands bounded away from the x-axis-zero set.
        let a = QMatrix::diagonal(&[q(2), qr(1, 2)]);
        let band = Region::box2([q(1), q(-3)], [q(2), q(3)]).unwrap();
        let (lo, hi) = certified_dilation_window(&band, &band, &a).unwrap();
        assert!(lo <= 0 && hi >= 0);
    }
}
