//! Positive-spectrum companion matrix.
//!
//! For an invertible `B` there is a matrix `B̃` with all-positive eigenvalues
//! (the moduli of `B`'s eigenvalues) and a constant `c ≥ 1` such that
//!
//! ```text
//! Bʲ(B(0, r/c)) ⊆ B̃ʲ(B(0, r)) ⊆ Bʲ(B(0, c·r))    for all j ∈ ℤ, r > 0.
//! ```
//!
//! `B̃` is obtained by multiplying each Jordan block by the orthogonal
//! rotation that cancels the eigenvalue's phase; the rotation commutes with
//! the block, which is what makes the ball sandwich work with
//! `c = ‖P⁻¹‖·‖P‖`.

use nalgebra::DMatrix;
use num_traits::{One, Signed};

use crate::error::Result;
use crate::rat::Q;

use super::jordan::exact_modulus;
use super::{operator_norm, real_jordan, BlockKind, JordanDecomposition, Matrix, QMatrix};

#[derive(Clone, Debug)]
pub struct PositiveSpectrumCompanion {
    /// The companion matrix with all-positive spectrum.
    pub companion: Matrix,
    /// Sandwich constant `c = ‖P⁻¹‖·‖P‖`.
    pub sandwich_constant: f64,
    /// The decomposition the companion was built from.
    pub jordan: JordanDecomposition,
}

/// Builds J′ = R·J for an exact decomposition, when every block modulus is
/// rational.
fn exact_jprime(dec: &JordanDecomposition) -> Option<QMatrix> {
    let n = dec.dim();
    let mut jp = QMatrix::zeros(n, n);
    let mut off = 0usize;
    for b in &dec.blocks {
        match b.kind {
            BlockKind::Real => {
                let (lam, _) = b.exact.clone()?;
                let sign = if lam.is_negative() { -Q::one() } else { Q::one() };
                let modulus = lam.abs();
                for i in 0..b.size {
                    *jp.at_mut(off + i, off + i) = modulus.clone();
                    if i + 1 < b.size {
                        *jp.at_mut(off + i + 1, off + i) = sign.clone();
                    }
                }
                off += b.size;
            }
            BlockKind::ComplexPair => {
                let (re, im) = b.exact.clone()?;
                let modulus = exact_modulus(b)?;
                // M_ω̄ with ω = λ/|λ|.
                let wre = &re / &modulus;
                let wim = &im / &modulus;
                for p in 0..b.size {
                    let r = off + 2 * p;
                    *jp.at_mut(r, r) = modulus.clone();
                    *jp.at_mut(r + 1, r + 1) = modulus.clone();
                    if p + 1 < b.size {
                        *jp.at_mut(r + 2, r) = wre.clone();
                        *jp.at_mut(r + 2, r + 1) = -wim.clone();
                        *jp.at_mut(r + 3, r) = wim.clone();
                        *jp.at_mut(r + 3, r + 1) = wre.clone();
                    }
                }
                off += 2 * b.size;
            }
        }
    }
    Some(jp)
}

fn float_jprime(dec: &JordanDecomposition) -> DMatrix<f64> {
    let n = dec.dim();
    let mut jp = DMatrix::<f64>::zeros(n, n);
    let mut off = 0usize;
    for b in &dec.blocks {
        match b.kind {
            BlockKind::Real => {
                let sign = if b.eigen_re < 0.0 { -1.0 } else { 1.0 };
                for i in 0..b.size {
                    jp[(off + i, off + i)] = b.eigen_re.abs();
                    if i + 1 < b.size {
                        jp[(off + i + 1, off + i)] = sign;
                    }
                }
                off += b.size;
            }
            BlockKind::ComplexPair => {
                let modulus = b.modulus();
                let wre = b.eigen_re / modulus;
                let wim = b.eigen_im / modulus;
                for p in 0..b.size {
                    let r = off + 2 * p;
                    jp[(r, r)] = modulus;
                    jp[(r + 1, r + 1)] = modulus;
                    if p + 1 < b.size {
                        jp[(r + 2, r)] = wre;
                        jp[(r + 2, r + 1)] = -wim;
                        jp[(r + 3, r)] = wim;
                        jp[(r + 3, r + 1)] = wre;
                    }
                }
                off += 2 * b.size;
            }
        }
    }
    jp
}

/// Companion matrix with all-positive eigenvalues equal to the moduli of
/// `m`'s eigenvalues, plus the sandwich constant.
pub fn positive_companion(m: &Matrix) -> Result<PositiveSpectrumCompanion> {
    let dec = real_jordan(m)?;
    let c = operator_norm(&dec.basis_change) * operator_norm(&dec.basis_change_inv);

    // Exact route when P and all block moduli are rational.
    if dec.exact {
        if let (Matrix::Rational(p), Matrix::Rational(pinv)) =
            (&dec.basis_change, &dec.basis_change_inv)
        {
            if let Some(jp) = exact_jprime(&dec) {
                let companion = pinv.mul(&jp).mul(p);
                return Ok(PositiveSpectrumCompanion {
                    companion: Matrix::Rational(companion),
                    sandwich_constant: c,
                    jordan: dec,
                });
            }
        }
    }

    let p = dec.basis_change.to_f64();
    let pinv = dec.basis_change_inv.to_f64();
    let jp = float_jprime(&dec);
    let companion = &pinv * jp * &p;
    Ok(PositiveSpectrumCompanion {
        companion: Matrix::Float(companion),
        sandwich_constant: c,
        jordan: dec,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::spectrum;
    use crate::rat::{q, qr};
    use rand::Rng;
    use rand::SeedableRng;

    fn qm(rows: Vec<Vec<Q>>) -> Matrix {
        Matrix::from_q(QMatrix::from_rows(rows).unwrap()).unwrap()
    }

    #[test]
    fn negative_scalar() {
        // −2I → 2I with c = 1 (the rotation −I is orthogonal).
        let m = qm(vec![vec![q(-2), q(0)], vec![q(0), q(-2)]]);
        let pc = positive_companion(&m).unwrap();
        let expect = qm(vec![vec![q(2), q(0)], vec![q(0), q(2)]]);
        assert_eq!(pc.companion, expect);
        assert!((pc.sandwich_constant - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mixed_sign_diagonal() {
        let m = qm(vec![vec![q(2), q(0)], vec![q(0), q(-3)]]);
        let pc = positive_companion(&m).unwrap();
        let got = pc.companion.as_q().unwrap();
        assert!(got.is_diagonal());
        let mut diag: Vec<Q> = (0..2).map(|i| got.at(i, i).clone()).collect();
        diag.sort();
        assert_eq!(diag, vec![q(2), q(3)]);
    }

    #[test]
    fn quincunx_rotation_factored_out() {
        // [[1,1],[-1,1]] = √2 · rotation; companion is √2·I₂.
        let m = qm(vec![vec![q(1), q(1)], vec![q(-1), q(1)]]);
        let pc = positive_companion(&m).unwrap();
        let f = pc.companion.to_f64();
        let s = 2f64.sqrt();
        assert!((f[(0, 0)] - s).abs() < 1e-12);
        assert!((f[(1, 1)] - s).abs() < 1e-12);
        assert!(f[(0, 1)].abs() < 1e-12 && f[(1, 0)].abs() < 1e-12);
    }

    /// Checks the ball-sandwich inclusions on sampled boundary points for
    /// j ∈ [−8, 8].
    fn assert_sandwich(m: &Matrix, seed: u64) {
        let pc = positive_companion(m).unwrap();
        let c = pc.sandwich_constant;
        let a = m.to_f64();
        let at = pc.companion.to_f64();
        let n = a.nrows();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for j in -8i64..=8 {
            let aj = {
                let mut acc = DMatrix::<f64>::identity(n, n);
                let base = if j >= 0 {
                    a.clone()
                } else {
                    a.clone().try_inverse().unwrap()
                };
                for _ in 0..j.unsigned_abs() {
                    acc *= &base;
                }
                acc
            };
            let atj = {
                let mut acc = DMatrix::<f64>::identity(n, n);
                let base = if j >= 0 {
                    at.clone()
                } else {
                    at.clone().try_inverse().unwrap()
                };
                for _ in 0..j.unsigned_abs() {
                    acc *= &base;
                }
                acc
            };
            let aj_inv = aj.clone().try_inverse().unwrap();
            let atj_inv = atj.clone().try_inverse().unwrap();
            for _ in 0..40 {
                let mut x = nalgebra::DVector::from_fn(n, |_, _| rng.gen::<f64>() - 0.5);
                x /= x.norm();
                // ‖x‖ = 1/c ⇒ Aʲx must lie in Ãʲ(B(0,1)).
                let y = &aj * (&x / c);
                assert!((&atj_inv * &y).norm() <= 1.0 + 1e-9, "left inclusion at j={j}");
                // ‖x‖ = 1 ⇒ Ãʲx must lie in Aʲ(B(0,c)).
                let z = &atj * &x;
                assert!((&aj_inv * &z).norm() <= c * (1.0 + 1e-9), "right inclusion at j={j}");
            }
        }
    }

    #[test]
    fn sandwich_quincunx() {
        assert_sandwich(&qm(vec![vec![q(1), q(1)], vec![q(-1), q(1)]]), 7);
    }

    #[test]
    fn sandwich_defective_negative() {
        let m = qm(vec![vec![q(-2), q(0)], vec![q(1), q(-2)]]);
        assert_sandwich(&m, 8);
    }

    #[test]
    fn sandwich_nonexpansive_mix() {
        let m = qm(vec![vec![q(2), q(1)], vec![q(0), qr(1, 2)]]);
        assert_sandwich(&m, 9);
    }

    #[test]
    fn moduli_and_det_preserved() {
        let m = qm(vec![vec![q(1), q(1)], vec![q(-1), q(1)]]);
        let pc = positive_companion(&m).unwrap();
        let s_orig = spectrum(&m).unwrap();
        let s_comp = spectrum(&pc.companion).unwrap();
        for (a, b) in s_orig.moduli_sorted.iter().zip(&s_comp.moduli_sorted) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!(
            (m.det_f64().abs() - pc.companion.det_f64().abs()).abs() < 1e-9,
            "determinant magnitude preserved"
        );
        // All companion eigenvalues positive real.
        for e in &s_comp.eigenvalues {
            assert!(e.re > 0.0 && e.im.abs() < 1e-9);
        }
    }
}
