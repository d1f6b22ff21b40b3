//! The exchange upgrade: a set that tiles by dilations and packs by
//! translations is converted toward a simultaneous tile by transporting
//! dilation-equivalent material into the translation holes.
//!
//! Each pass computes the hole `H = F ∖ (Γ-reduction of U)` and, piece by
//! piece, pulls material from `Aʲ(U)` (j ≥ 1) at some lattice translate of
//! the hole.  Swapping `A⁻ʲ(M) ⊆ U` for `M` keeps the dilation orbit sums
//! unchanged, fills the hole exactly, and re-creates at most `|det A|⁻ʲ·|M|`
//! of new hole, so the translation deficit contracts by at least 1/|det A|
//! per full pass while the dilation reports never get worse.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::QMatrix;
use crate::rat::{fmt_q, q, Q};
use crate::regions::{
    dilation_check, fundamental_domain, reduce_mod_lattice, translation_check, BoolOp, Region,
    TilingReport,
};

#[derive(Clone, Debug)]
pub struct CsbTraceRow {
    pub iteration: usize,
    /// Translation deficit |F ∖ reduction(U)| after the pass.
    pub deficit: Q,
    /// Material moved during the pass.
    pub moved: Q,
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub dilation: TilingReport,
    pub translation: TilingReport,
    pub pass: bool,
}

/// Combined pack/cover verification against the given reference dilation
/// tile; `pass` requires exact translation tiling and dilation reports
/// within `tol`.
pub fn verify_wavelet(
    s: &Region,
    a: &QMatrix,
    lat: &Lattice,
    reference: &Region,
    tol: &Q,
) -> Result<VerifyReport> {
    let translation = translation_check(s, lat)?;
    let dilation = dilation_check(s, a, reference)?;
    let pass = translation.excess_volume <= *tol
        && translation.deficit_volume <= *tol
        && dilation.excess_volume <= *tol
        && dilation.deficit_volume <= *tol;
    Ok(VerifyReport {
        dilation,
        translation,
        pass,
    })
}

/// Hole coverage of U after reduction: (hole region in F, deficit).
fn translation_hole(u: &Region, lat: &Lattice) -> Result<(Region, Q)> {
    let fd = fundamental_domain(lat)?;
    let frags = reduce_mod_lattice(u, lat)?;
    let mut covered = Region::empty(u.dim())?;
    for f in &frags {
        covered = covered.boolean(&f.region, BoolOp::Union)?;
    }
    let hole = fd.region.boolean(&covered, BoolOp::Difference)?;
    let deficit = hole.volume();
    Ok((hole, deficit))
}

/// One upgrade run: strictly decreases the translation deficit each
/// iteration (by at least the factor 1/|det A| per full pass) until it
/// reaches `target_deficit` or `max_iters` passes have run.  Inputs must
/// pack by translations exactly; the dilation reports of the output are
/// never worse than the input's.
pub fn csb_upgrade(
    u: &Region,
    a: &QMatrix,
    lat: &Lattice,
    target_deficit: &Q,
    max_iters: usize,
) -> Result<(Region, Vec<CsbTraceRow>)> {
    let det_abs = a.det().abs();
    if det_abs <= Q::one() {
        return Err(Error::Precondition("upgrade needs |det A| > 1".into()));
    }
    let t0 = translation_check(u, lat)?;
    if !t0.packs {
        return Err(Error::Precondition(format!(
            "input must pack by translations (excess {})",
            fmt_q(&t0.excess_volume)
        )));
    }
    let g = lat
        .generator_matrix()
        .as_q()
        .ok_or_else(|| Error::Unsupported("upgrade needs a rational lattice".into()))?
        .clone();
    let n = u.dim();
    let zero_t = vec![Q::zero(); n];

    let mut cur = u.clone();
    let mut trace: Vec<CsbTraceRow> = Vec::new();
    let mut stall = 0usize;
    for it in 1..=max_iters {
        let (hole, deficit) = translation_hole(&cur, lat)?;
        if deficit <= *target_deficit {
            break;
        }
        // Fill the hole from dilation levels j ≥ 1 at lattice translates of
        // increasing height.
        let mut remaining = hole;
        let mut moved = Q::zero();
        'shells: for height in 0..=8i64 {
            if remaining.is_empty() {
                break;
            }
            for z in coefficient_shell(n, height) {
                if remaining.is_empty() {
                    break 'shells;
                }
                let zq: Vec<Q> = z.iter().map(|&v| q(v)).collect();
                let gz = g.mul_vec(&zq);
                let shifted = remaining.translate(&gz)?;
                // Certified level window for material under Aʲ, j ≥ 1.
                let (jlo, jhi) =
                    match crate::regions::certified_dilation_window(&cur, &shifted, a) {
                        Ok(win) => win,
                        Err(_) => (1, 24),
                    };
                for j in jlo.max(1)..=jhi.max(1) {
                    if remaining.is_empty() {
                        break;
                    }
                    let aj = a.pow(j)?;
                    let img = cur.affine_image(&aj, &zero_t)?;
                    let m = img.boolean(&shifted, BoolOp::Intersect)?;
                    if m.is_empty() {
                        continue;
                    }
                    let ajinv = a.pow(-j)?;
                    let pulled = m.affine_image(&ajinv, &zero_t)?;
                    cur = cur.boolean(&pulled, BoolOp::Difference)?;
                    cur = cur.boolean(&m, BoolOp::Union)?;
                    moved += m.volume();
                    let neg: Vec<Q> = gz.iter().map(|x| -x.clone()).collect();
                    let filled = m.translate(&neg)?;
                    remaining = remaining.boolean(&filled, BoolOp::Difference)?;
                }
            }
        }
        let (_, new_deficit) = translation_hole(&cur, lat)?;
        if new_deficit >= deficit {
            stall += 1;
            if stall >= 3 {
                return Err(Error::Stalled(format!(
                    "no measurable progress over 3 iterations (deficit {})",
                    fmt_q(&new_deficit)
                )));
            }
        } else {
            stall = 0;
        }
        trace.push(CsbTraceRow {
            iteration: it,
            deficit: new_deficit,
            moved,
        });
    }
    Ok((cur, trace))
}

/// Integer coefficient vectors of ∞-norm exactly `height`.
fn coefficient_shell(n: usize, height: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let range: Vec<i64> = (-height..=height).collect();
    let mut stack = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for p in &stack {
            for &v in &range {
                let mut p2 = p.clone();
                p2.push(v);
                next.push(p2);
            }
        }
        stack = next;
    }
    for z in stack {
        if z.iter().map(|v| v.abs()).max().unwrap_or(0) == height {
            out.push(z);
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{q_to_f64, qr};

    fn dyadic_tile() -> Region {
        Region::intervals(vec![(q(-2), q(-1)), (q(1), q(2))])
    }

    fn a2() -> QMatrix {
        QMatrix::diagonal(&[q(2)])
    }

    /// A family of 1-D inputs tiling by dilations and packing by
    /// translations with deficit 1 − 2ε: U = ±(ε, 2ε].
    fn packing_input(eps: Q) -> Region {
        Region::intervals(vec![
            (-(&eps * q(2)), -eps.clone()),
            (eps.clone(), &eps * q(2)),
        ])
    }

    #[test]
    fn shannon_passes_exact() {
        let s = Region::intervals(vec![(q(-1), qr(-1, 2)), (qr(1, 2), q(1))]);
        let rep = verify_wavelet(&s, &a2(), &Lattice::standard(1), &dyadic_tile(), &q(0))
            .unwrap();
        assert!(rep.pass);
        assert!(rep.translation.excess_volume.is_zero());
        assert!(rep.translation.deficit_volume.is_zero());
        assert!(rep.dilation.excess_volume.is_zero());
        assert!(rep.dilation.deficit_volume.is_zero());
    }

    #[test]
    fn already_tiling_unchanged() {
        let s = Region::intervals(vec![(q(-1), qr(-1, 2)), (qr(1, 2), q(1))]);
        let (out, trace) =
            csb_upgrade(&s, &a2(), &Lattice::standard(1), &q(0), 5).unwrap();
        assert!(trace.is_empty());
        assert!(out
            .boolean(&s, BoolOp::SymmetricDifference)
            .unwrap()
            .volume()
            .is_zero());
    }

    #[test]
    fn deficit_strictly_decreases() {
        let lat = Lattice::standard(1);
        let u = packing_input(qr(1, 5));
        // Sanity: tiles by dilations, packs with deficit 3/5.
        let pre = verify_wavelet(&u, &a2(), &lat, &dyadic_tile(), &q(0)).unwrap();
        assert!(pre.dilation.excess_volume.is_zero());
        assert!(pre.dilation.deficit_volume.is_zero());
        assert!(pre.translation.packs);
        assert_eq!(pre.translation.deficit_volume, qr(3, 5));

        let (out, trace) = csb_upgrade(&u, &a2(), &lat, &qr(1, 10_000), 40).unwrap();
        assert!(!trace.is_empty());
        let mut prev = qr(3, 5);
        for row in &trace {
            assert!(row.deficit < prev, "deficit must strictly decrease");
            prev = row.deficit.clone();
        }
        assert!(prev <= qr(1, 10_000));
        // Dilation tiling is preserved exactly.
        let post = verify_wavelet(&out, &a2(), &lat, &dyadic_tile(), &qr(1, 10_000)).unwrap();
        assert!(post.dilation.excess_volume.is_zero());
        assert!(post.dilation.deficit_volume.is_zero());
        assert!(post.translation.packs);
        assert!(post.pass);
    }

    #[test]
    fn seeded_family_monotone() {
        let lat = Lattice::standard(1);
        for i in 0..10i64 {
            let eps = Q::new((7 + i).into(), (30 + 4 * i).into());
            assert!(eps < qr(1, 3));
            let u = packing_input(eps);
            let (_, trace) = csb_upgrade(&u, &a2(), &lat, &qr(1, 10_000), 40).unwrap();
            let mut prev: Option<Q> = None;
            for row in &trace {
                if let Some(p) = &prev {
                    assert!(&row.deficit < p);
                }
                prev = Some(row.deficit.clone());
            }
            assert!(prev.unwrap() <= qr(1, 10_000));
        }
    }

    #[test]
    fn rejects_translation_excess() {
        // ±(1,2] has measure 2 > covolume 1: it cannot pack, and the
        // upgrade must reject it.
        let u = Region::intervals(vec![(q(-2), q(-1)), (q(1), q(2))]);
        assert!(matches!(
            csb_upgrade(&u, &a2(), &Lattice::standard(1), &q(0), 3),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn upgrade_approaches_full_measure() {
        let lat = Lattice::standard(1);
        let u = packing_input(qr(1, 4));
        let (out, _) = csb_upgrade(&u, &a2(), &lat, &qr(1, 1000), 30).unwrap();
        // The limit object has measure approaching the covolume 1.
        let vol = q_to_f64(&out.volume());
        assert!((vol - 1.0).abs() < 1e-3 + 1e-12, "volume {vol}");
    }
}
