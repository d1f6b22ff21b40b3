//! Constructive machinery: dilation tiling generators, the inner redundancy
//! recursion, the outer shell loop, and the exchange that upgrades a
//! dilation-tiling translation-packing set into a candidate for both.

mod csb;
mod easycase;
mod outer;

pub use csb::{csb_upgrade, verify_wavelet, CsbTraceRow, VerifyReport};
pub use easycase::{build_packing_preimage, BuildTrace, TraceRow};
pub use outer::{build_wavelet_core, CoreParams, OuterTraceRow, WaveletCandidate};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{real_jordan, spectrum, Matrix, QMatrix};
use crate::rat::{q, q_to_f64, rationalize, Q};
use crate::regions::{dilation_check, poly2::ConvexPoly, BoolOp, Region, TilingReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    /// Bands ((−λ,−1) ∪ (1,λ)) × [−L,L]^{n−1} along a real eigendirection.
    RealEigenvalueBands,
    /// Polygonal ring approximating {1 < |x| < |λ|} × [−L,L]^{n−2}.
    ComplexEigenvalueAnnulus,
    /// C ∖ A⁻¹(C) for the cube C = [−1,1]ⁿ (expansive A with A⁻¹C ⊆ C).
    ExpansiveAnnulus,
}

/// How a generator region was produced, including truncation caveats.
#[derive(Clone, Debug)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    /// Half-width L of the truncated unbounded factor, when present.
    pub truncation_half_width: Option<Q>,
    /// Eigen-data used (plain-text note).
    pub eigen_note: String,
    /// True when the region only approximately tiles (polygonal ring).
    pub approximate: bool,
    /// Certified bound on the approximation error in measure, when
    /// `approximate` is set.
    pub area_error: Option<f64>,
    /// Pack/cover verification of the generated region against itself.
    pub verification: TilingReport,
}

/// Produces a region whose A-dilates tile ℝⁿ (modulo the documented
/// truncation/approximation), together with its provenance.
///
/// With `kind = None` the exact variants are preferred: 1-D bands, the cube
/// annulus for expansive matrices, then diagonal bands; the polygonal
/// complex-eigenvalue ring is only selected on request or as a last resort.
pub fn tiling_generator(
    a: &Matrix,
    l: &Q,
    kind: Option<GeneratorKind>,
) -> Result<(Region, GeneratorSpec)> {
    let aq = a
        .as_q()
        .ok_or_else(|| Error::Unsupported("generators need a rational matrix".into()))?;
    let n = aq.nrows();
    if n > 3 {
        return Err(Error::Unsupported("region work is limited to dimensions 1–3".into()));
    }
    let det = aq.det().abs();
    if det <= Q::one() {
        return Err(Error::Precondition("generator needs |det A| > 1".into()));
    }
    if l <= &Q::zero() {
        return Err(Error::Precondition("truncation half-width must be positive".into()));
    }

    let chosen = match kind {
        Some(k) => k,
        None => {
            if n == 1 {
                GeneratorKind::RealEigenvalueBands
            } else if cube_annulus_applies(aq) {
                GeneratorKind::ExpansiveAnnulus
            } else if diagonal_band_coordinate(aq).is_some() {
                GeneratorKind::RealEigenvalueBands
            } else if has_complex_expanding_pair(a)? {
                GeneratorKind::ComplexEigenvalueAnnulus
            } else {
                return Err(Error::Unsupported(
                    "no generator construction applies (non-diagonal, non-expansive, no complex expanding pair)"
                        .into(),
                ));
            }
        }
    };

    match chosen {
        GeneratorKind::RealEigenvalueBands => real_bands(a, aq, l),
        GeneratorKind::ExpansiveAnnulus => cube_annulus(a, aq),
        GeneratorKind::ComplexEigenvalueAnnulus => complex_ring(a, l),
    }
}

fn cube_annulus_applies(aq: &QMatrix) -> bool {
    if let Some(ainv) = aq.inverse() {
        // A⁻¹([−1,1]ⁿ) ⊆ [−1,1]ⁿ ⟺ ‖A⁻¹‖∞ ≤ 1; 3-D region algebra also
        // needs diagonal A.
        ainv.inf_norm() <= Q::one() && (aq.nrows() < 3 || aq.is_diagonal())
    } else {
        false
    }
}

fn diagonal_band_coordinate(aq: &QMatrix) -> Option<(usize, Q)> {
    if !aq.is_diagonal() {
        return None;
    }
    let n = aq.nrows();
    // Largest expanding coordinate.
    (0..n)
        .map(|i| (i, aq.at(i, i).clone().abs()))
        .filter(|(_, l)| l > &Q::one())
        .max_by(|x, y| x.1.cmp(&y.1))
}

fn has_complex_expanding_pair(a: &Matrix) -> Result<bool> {
    let spec = spectrum(a)?;
    Ok(spec
        .eigenvalues
        .iter()
        .any(|e| e.im != 0.0 && e.modulus() > 1.0))
}

fn checked(
    region: Region,
    a: &QMatrix,
    spec_kind: GeneratorKind,
    truncation: Option<Q>,
    eigen_note: String,
    approximate: bool,
    area_error: Option<f64>,
) -> Result<(Region, GeneratorSpec)> {
    let verification = dilation_check(&region, a, &region)?;
    if !verification.packs && !approximate {
        return Err(Error::Precondition(
            "generated region fails its own packing verification".into(),
        ));
    }
    Ok((
        region.clone(),
        GeneratorSpec {
            kind: spec_kind,
            truncation_half_width: truncation,
            eigen_note,
            approximate,
            area_error,
            verification,
        },
    ))
}

fn real_bands(a: &Matrix, aq: &QMatrix, l: &Q) -> Result<(Region, GeneratorSpec)> {
    let n = aq.nrows();
    if n == 1 {
        let lam = aq.at(0, 0).clone().abs();
        if lam <= Q::one() {
            return Err(Error::Precondition("1-D generator needs |a| > 1".into()));
        }
        let region = Region::intervals(vec![
            (-lam.clone(), -Q::one()),
            (Q::one(), lam.clone()),
        ]);
        return checked(
            region,
            aq,
            GeneratorKind::RealEigenvalueBands,
            None,
            format!("real eigenvalue {}", crate::rat::fmt_q(&lam)),
            false,
            None,
        );
    }
    let Some((i, lam)) = diagonal_band_coordinate(aq) else {
        return Err(Error::Unsupported(
            "band generator beyond 1-D needs a diagonal matrix".into(),
        ));
    };
    let _ = a;
    // The band needs L ≥ one fundamental cell in the free directions; the
    // caller controls L, we only require positivity (checked upstream) and
    // document the slab.
    let mut lo = vec![-l.clone(); n];
    let mut hi = vec![l.clone(); n];
    lo[i] = Q::one();
    hi[i] = lam.clone();
    let pos = box_region(&lo, &hi)?;
    lo[i] = -lam.clone();
    hi[i] = -Q::one();
    let neg = box_region(&lo, &hi)?;
    let region = pos.boolean(&neg, BoolOp::Union)?;
    checked(
        region,
        aq,
        GeneratorKind::RealEigenvalueBands,
        Some(l.clone()),
        format!("real eigenvalue {} on coordinate {}", crate::rat::fmt_q(&lam), i),
        false,
        None,
    )
}

fn box_region(lo: &[Q], hi: &[Q]) -> Result<Region> {
    match lo.len() {
        1 => Ok(Region::interval(lo[0].clone(), hi[0].clone())),
        2 => Region::box2([lo[0].clone(), lo[1].clone()], [hi[0].clone(), hi[1].clone()]),
        3 => Region::box3(
            [lo[0].clone(), lo[1].clone(), lo[2].clone()],
            [hi[0].clone(), hi[1].clone(), hi[2].clone()],
        ),
        d => Err(Error::Unsupported(format!("dimension {d}"))),
    }
}

fn cube_annulus(a: &Matrix, aq: &QMatrix) -> Result<(Region, GeneratorSpec)> {
    let n = aq.nrows();
    let one = Q::one();
    let cube = box_region(&vec![-one.clone(); n], &vec![one.clone(); n])?;
    let ainv = aq.inverse().ok_or(Error::SingularMatrix)?;
    let inner = cube.affine_image(&ainv, &vec![Q::zero(); n])?;
    let region = cube.boolean(&inner, BoolOp::Difference)?;
    let spec = spectrum(a)?;
    checked(
        region,
        aq,
        GeneratorKind::ExpansiveAnnulus,
        None,
        format!(
            "expansive spectrum, min modulus {:.6}",
            spec.min_modulus()
        ),
        false,
        None,
    )
}

fn complex_ring(a: &Matrix, l: &Q) -> Result<(Region, GeneratorSpec)> {
    let n = a.dim();
    if n != 2 {
        return Err(Error::Unsupported(
            "polygonal ring generator is implemented for n = 2 (higher-n slabs need box factors)"
                .into(),
        ));
    }
    let dec = real_jordan(a)?;
    let pair = dec
        .blocks
        .iter()
        .find(|b| b.eigen_im != 0.0 && b.modulus() > 1.0)
        .ok_or_else(|| Error::Precondition("no expanding complex pair".into()))?;
    let modulus = pair.modulus();
    // 64-gon ring between radii 1 and |λ| in the Jordan plane, mapped back
    // through P⁻¹ when the decomposition is exact.
    let sides = 64usize;
    let ring_outer: Vec<[Q; 2]> = (0..sides)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / sides as f64;
            [
                rationalize(modulus * th.cos(), 1 << 24).unwrap(),
                rationalize(modulus * th.sin(), 1 << 24).unwrap(),
            ]
        })
        .collect();
    let ring_inner: Vec<[Q; 2]> = (0..sides)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / sides as f64;
            [
                rationalize(th.cos(), 1 << 24).unwrap(),
                rationalize(th.sin(), 1 << 24).unwrap(),
            ]
        })
        .collect();
    let outer = Region::D2(vec![
        ConvexPoly::new(ring_outer).ok_or_else(|| Error::InvalidInput("ring outer".into()))?,
    ]);
    let inner = Region::D2(vec![
        ConvexPoly::new(ring_inner).ok_or_else(|| Error::InvalidInput("ring inner".into()))?,
    ]);
    let mut region = outer.boolean(&inner, BoolOp::Difference)?;
    if let (Matrix::Rational(_), Some(pinv)) =
        (&dec.basis_change, dec.basis_change_inv.as_q())
    {
        region = region.affine_image(pinv, &[Q::zero(), Q::zero()])?;
    }
    // Certified measure error against the true annulus π(|λ|² − 1)·|det P⁻¹|.
    let target = std::f64::consts::PI * (modulus * modulus - 1.0)
        * dec.basis_change_inv.det_f64().abs();
    let actual = q_to_f64(&region.volume());
    let area_error = (actual - target).abs();
    let _ = l;
    // The ring only approximately tiles; verification is advisory here.
    let aq = a.as_q().ok_or_else(|| {
        Error::Unsupported("polygonal ring needs a rational matrix".into())
    })?;
    let verification = dilation_check(&region, aq, &region)?;
    Ok((
        region,
        GeneratorSpec {
            kind: GeneratorKind::ComplexEigenvalueAnnulus,
            truncation_half_width: None,
            eigen_note: format!("complex pair of modulus {modulus:.6}"),
            approximate: true,
            area_error: Some(area_error),
            verification,
        },
    ))
}

/// Splits a generator region into pieces of measure < 1/2 (∞-norm shells
/// refined by deterministic sweeps), as the outer construction loop needs.
pub fn shell_partition(w: &Region, want: usize) -> Result<Vec<Region>> {
    let half = crate::rat::qr(1, 2);
    let cap = crate::rat::qr(45, 100);
    let mut shells: Vec<Region> = Vec::new();
    // First cut by ∞-norm annuli.
    let bands = want.max(1);
    let (_, hi) = w
        .bbox()
        .ok_or_else(|| Error::Precondition("empty generator".into()))?;
    let (lo, _) = w.bbox().unwrap();
    let rmax: Q = hi
        .iter()
        .chain(lo.iter())
        .map(|x| x.clone().abs())
        .max()
        .unwrap();
    let mut cuts: Vec<Q> = (0..=bands)
        .map(|k| &rmax * q(k as i64) / q(bands as i64))
        .collect();
    cuts[0] = Q::zero();
    for k in 0..bands {
        let inner_r = cuts[k].clone();
        let outer_r = cuts[k + 1].clone();
        let outer_box = box_region(
            &vec![-outer_r.clone(); w.dim()],
            &vec![outer_r.clone(); w.dim()],
        )?;
        let annulus = if inner_r.is_zero() {
            outer_box
        } else {
            let inner_box = box_region(
                &vec![-inner_r.clone(); w.dim()],
                &vec![inner_r.clone(); w.dim()],
            )?;
            outer_box.boolean(&inner_box, BoolOp::Difference)?
        };
        let piece = w.boolean(&annulus, BoolOp::Intersect)?;
        if !piece.is_empty() {
            shells.push(piece);
        }
    }
    // Refine any shell at or above measure 1/2 by exact trims.
    let mut out = Vec::new();
    for s in shells {
        let mut rest = s;
        while rest.volume() >= half {
            let (piece, r) = rest.trim_to_volume(&cap)?;
            out.push(piece);
            rest = r;
        }
        if !rest.is_empty() {
            out.push(rest);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::qr;

    fn qm(rows: Vec<Vec<Q>>) -> Matrix {
        Matrix::from_q(QMatrix::from_rows(rows).unwrap()).unwrap()
    }

    #[test]
    fn one_dimensional_bands() {
        let a = qm(vec![vec![q(2)]]);
        let (region, spec) = tiling_generator(&a, &Q::one(), None).unwrap();
        // (−2,−1) ∪ (1,2).
        assert_eq!(region.volume(), q(2));
        assert_eq!(spec.kind, GeneratorKind::RealEigenvalueBands);
        assert!(spec.verification.packs);
        let expect = Region::intervals(vec![(q(-2), q(-1)), (q(1), q(2))]);
        assert!(region
            .boolean(&expect, BoolOp::SymmetricDifference)
            .unwrap()
            .volume()
            .is_zero());
    }

    #[test]
    fn quincunx_ring_on_request() {
        // {1 < |x| < √2} approximated by a 64-gon ring with certified error.
        let a = qm(vec![vec![q(1), q(1)], vec![q(-1), q(1)]]);
        let (region, spec) =
            tiling_generator(&a, &Q::one(), Some(GeneratorKind::ComplexEigenvalueAnnulus))
                .unwrap();
        assert!(spec.approximate);
        let err = spec.area_error.unwrap();
        assert!(err < 0.02, "{err}");
        let target = std::f64::consts::PI;
        assert!((q_to_f64(&region.volume()) - target).abs() < 0.02);
    }

    #[test]
    fn quincunx_auto_prefers_exact_cube_annulus() {
        let a = qm(vec![vec![q(1), q(1)], vec![q(-1), q(1)]]);
        let (region, spec) = tiling_generator(&a, &Q::one(), None).unwrap();
        assert_eq!(spec.kind, GeneratorKind::ExpansiveAnnulus);
        assert!(!spec.approximate);
        assert!(spec.verification.packs && spec.verification.covers);
        // |cube| − |diamond| = 4 − 2.
        assert_eq!(region.volume(), q(2));
    }

    #[test]
    fn diagonal_bands_two_dim() {
        let a = qm(vec![vec![q(2), q(0)], vec![q(0), q(2)]]);
        let (region, spec) = tiling_generator(
            &a,
            &q(3),
            Some(GeneratorKind::RealEigenvalueBands),
        )
        .unwrap();
        assert_eq!(spec.truncation_half_width, Some(q(3)));
        // Bands ((−2,−1)∪(1,2)) × [−3,3]: measure 2·6 = 12.
        assert_eq!(region.volume(), q(12));
        assert!(spec.verification.packs);
    }

    #[test]
    fn nonexpansive_diagonal_bands() {
        let a = qm(vec![vec![q(2), q(0)], vec![q(0), qr(1, 2)]]);
        let (region, spec) = tiling_generator(&a, &q(2), None).unwrap();
        assert_eq!(spec.kind, GeneratorKind::RealEigenvalueBands);
        assert!(spec.verification.packs);
        assert_eq!(region.volume(), q(8));
    }

    #[test]
    fn expansive_rect_annulus() {
        let a = qm(vec![vec![q(2), q(0)], vec![q(0), q(3)]]);
        let (region, spec) = tiling_generator(&a, &Q::one(), None).unwrap();
        assert_eq!(spec.kind, GeneratorKind::ExpansiveAnnulus);
        // 4 − 4·(1/2)(1/3) = 4 − 2/3.
        assert_eq!(region.volume(), q(4) - qr(2, 3));
        assert!(spec.verification.packs && spec.verification.covers);
    }

    #[test]
    fn shells_are_small_and_partition() {
        let a = qm(vec![vec![q(2)]]);
        let (w, _) = tiling_generator(&a, &Q::one(), None).unwrap();
        let shells = shell_partition(&w, 4).unwrap();
        let total: Q = shells.iter().map(|s| s.volume()).sum();
        assert_eq!(total, w.volume());
        for s in &shells {
            assert!(s.volume() < qr(1, 2));
        }
        // Pairwise disjoint.
        for i in 0..shells.len() {
            for j in i + 1..shells.len() {
                assert!(shells[i]
                    .boolean(&shells[j], BoolOp::Intersect)
                    .unwrap()
                    .volume()
                    .is_zero());
            }
        }
    }
}
