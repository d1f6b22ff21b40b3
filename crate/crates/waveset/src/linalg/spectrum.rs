//! Eigenvalue extraction with exact rational (and ℚ(i)) fast paths.

use nalgebra::DMatrix;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rat::{exact_sqrt, q_to_f64, rationalize, Q};

use super::{Matrix, EIGEN_CLUSTER_RTOL};

/// One distinct eigenvalue with its algebraic multiplicity.
#[derive(Clone, Debug)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
    /// Exact (re, im) when the eigenvalue lies in ℚ(i).
    pub exact: Option<(Q, Q)>,
    /// Exact |λ|² when known (covers ℚ(i) eigenvalues and conjugate pairs
    /// from rational quadratic factors).
    pub modulus_sq: Option<Q>,
}

impl Eigenvalue {
    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn is_real(&self) -> bool {
        match &self.exact {
            Some((_, im)) => im.is_zero(),
            None => self.im.abs() <= EIGEN_CLUSTER_RTOL * (1.0 + self.modulus()),
        }
    }

    /// Compares |λ| with `t` exactly when possible; ties within the
    /// clustering tolerance are reported as `None` (borderline).
    pub fn modulus_cmp(&self, t: &Q) -> Option<std::cmp::Ordering> {
        if let Some(m2) = &self.modulus_sq {
            let t2 = t * t;
            return Some(m2.cmp(&t2));
        }
        let m = self.modulus();
        let tf = q_to_f64(t);
        if (m - tf).abs() <= EIGEN_CLUSTER_RTOL * (1.0 + tf) {
            None
        } else {
            Some(m.partial_cmp(&tf).unwrap())
        }
    }
}

/// Eigenvalues with multiplicities plus the nonincreasing list of moduli.
#[derive(Clone, Debug)]
pub struct SpectrumData {
    /// Distinct eigenvalues, sorted by (modulus, re, im) descending.
    pub eigenvalues: Vec<Eigenvalue>,
    /// All n moduli (with multiplicity), nonincreasing.
    pub moduli_sorted: Vec<f64>,
}

impl SpectrumData {
    pub fn dim(&self) -> usize {
        self.eigenvalues.iter().map(|e| e.multiplicity).sum()
    }

    /// True when some |λ| lies within the clustering tolerance of `t`.
    pub fn has_borderline_modulus(&self, t: f64) -> bool {
        self.moduli_sorted
            .iter()
            .any(|m| (m - t).abs() <= EIGEN_CLUSTER_RTOL * (1.0 + t))
    }

    pub fn min_modulus(&self) -> f64 {
        *self.moduli_sorted.last().expect("nonempty spectrum")
    }

    pub fn max_modulus(&self) -> f64 {
        self.moduli_sorted[0]
    }
}

// -- exact polynomial helpers ------------------------------------------------

/// Evaluates Σ c_k x^k.
fn poly_eval(coeffs: &[Q], x: &Q) -> Q {
    let mut acc = Q::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Divides by (x − r); returns the quotient when the remainder is zero.
fn poly_div_linear(coeffs: &[Q], r: &Q) -> Option<Vec<Q>> {
    let n = coeffs.len() - 1;
    let mut quot = vec![Q::zero(); n];
    let mut carry = Q::zero();
    for k in (0..=n).rev() {
        let cur = &coeffs[k] + &carry;
        if k == 0 {
            if !cur.is_zero() {
                return None;
            }
        } else {
            carry = &cur * r;
            quot[k - 1] = cur;
        }
    }
    Some(quot)
}

/// Divides by x² − s·x + p; returns the quotient when the remainder is zero.
fn poly_div_quadratic(coeffs: &[Q], s: &Q, p: &Q) -> Option<Vec<Q>> {
    let n = coeffs.len() - 1;
    if n < 2 {
        return None;
    }
    let mut rem = coeffs.to_vec();
    let mut quot = vec![Q::zero(); n - 1];
    for k in (2..=n).rev() {
        let c = rem[k].clone();
        quot[k - 2] = c.clone();
        rem[k] = Q::zero();
        rem[k - 1] += &c * s;
        rem[k - 2] -= &c * p;
    }
    if rem[0].is_zero() && rem[1].is_zero() {
        Some(quot)
    } else {
        None
    }
}

fn numeric_roots(m: &DMatrix<f64>) -> Result<Vec<(f64, f64)>> {
    let schur = nalgebra::linalg::Schur::try_new(m.clone(), 1e-14, 10_000)
        .ok_or(Error::EigenConvergence)?;
    let ev = schur.complex_eigenvalues();
    Ok(ev.iter().map(|z| (z.re, z.im)).collect())
}

fn cluster_numeric(mut roots: Vec<(f64, f64)>) -> Vec<Eigenvalue> {
    roots.sort_by(|a, b| {
        let (ma, mb) = (a.0.hypot(a.1), b.0.hypot(b.1));
        mb.partial_cmp(&ma)
            .unwrap()
            .then(b.0.partial_cmp(&a.0).unwrap())
            .then(b.1.partial_cmp(&a.1).unwrap())
    });
    let mut out: Vec<Eigenvalue> = Vec::new();
    for (re, im) in roots {
        // Snap tiny imaginary parts produced by the Schur iteration.
        let scale = 1.0 + re.hypot(im);
        let im = if im.abs() <= EIGEN_CLUSTER_RTOL * scale {
            0.0
        } else {
            im
        };
        if let Some(prev) = out.last_mut() {
            let d = (prev.re - re).hypot(prev.im - im);
            if d <= EIGEN_CLUSTER_RTOL * scale {
                prev.multiplicity += 1;
                continue;
            }
        }
        out.push(Eigenvalue {
            re,
            im,
            multiplicity: 1,
            exact: None,
            modulus_sq: None,
        });
    }
    out
}

/// Extracts eigenvalues of a rational matrix exactly where the
/// characteristic polynomial factors over ℚ into linear factors and
/// quadratics; anything left is reported with floating values only.
fn rational_spectrum(mq: &super::QMatrix) -> Result<Vec<Eigenvalue>> {
    let n = mq.nrows();
    let mut poly = mq.char_poly();
    let mut found: Vec<Eigenvalue> = Vec::new();

    // Candidate rational roots come from numeric eigenvalues (plus the
    // diagonal, which covers triangular matrices exactly).
    let numeric = numeric_roots(&mq.to_f64())?;
    let mut candidates: Vec<Q> = Vec::new();
    for i in 0..n {
        candidates.push(mq.at(i, i).clone());
    }
    for &(re, im) in &numeric {
        if im.abs() <= 1e-7 * (1.0 + re.abs()) {
            for max_den in [1u64, 1_000, 1_000_000, 1_000_000_000] {
                if let Some(r) = rationalize(re, max_den) {
                    candidates.push(r);
                }
            }
        }
    }

    // Linear factors.
    let mut progress = true;
    while progress && poly.len() > 1 {
        progress = false;
        for cand in &candidates {
            if poly.len() <= 1 {
                break;
            }
            while poly.len() > 1 && poly_eval(&poly, cand).is_zero() {
                poly = poly_div_linear(&poly, cand).expect("root divides");
                progress = true;
                if let Some(e) = found
                    .iter_mut()
                    .find(|e| e.exact.as_ref().is_some_and(|(r, i)| r == cand && i.is_zero()))
                {
                    e.multiplicity += 1;
                } else {
                    found.push(Eigenvalue {
                        re: q_to_f64(cand),
                        im: 0.0,
                        multiplicity: 1,
                        exact: Some((cand.clone(), Q::zero())),
                        modulus_sq: Some(cand * cand),
                    });
                }
            }
        }
    }

    // Quadratic factors for conjugate pairs: x² − s·x + p with s = 2 Re λ
    // and p = |λ|².
    if poly.len() > 2 {
        let mut quad_cands: Vec<(Q, Q)> = Vec::new();
        for &(re, im) in &numeric {
            if im > 1e-9 {
                for max_den in [1u64, 1_000, 1_000_000, 1_000_000_000] {
                    let s = rationalize(2.0 * re, max_den);
                    let p = rationalize(re * re + im * im, max_den);
                    if let (Some(s), Some(p)) = (s, p) {
                        quad_cands.push((s, p));
                    }
                }
            }
        }
        let mut progress = true;
        while progress && poly.len() > 2 {
            progress = false;
            for (s, p) in &quad_cands {
                while poly.len() > 2 {
                    let Some(q2) = poly_div_quadratic(&poly, s, p) else {
                        break;
                    };
                    poly = q2;
                    progress = true;
                    let a = s / crate::rat::q(2);
                    let b_sq = p - &a * &a;
                    let b_exact = exact_sqrt(&b_sq);
                    let re_f = q_to_f64(&a);
                    let im_f = b_exact
                        .as_ref()
                        .map(q_to_f64)
                        .unwrap_or_else(|| q_to_f64(&b_sq).sqrt());
                    let mut merged = false;
                    for e in found.iter_mut() {
                        if e.modulus_sq.as_ref() == Some(p)
                            && (e.re - re_f).abs() <= 1e-12 * (1.0 + re_f.abs())
                            && e.im > 0.0
                        {
                            e.multiplicity += 1;
                            merged = true;
                        } else if e.modulus_sq.as_ref() == Some(p)
                            && (e.re - re_f).abs() <= 1e-12 * (1.0 + re_f.abs())
                            && e.im < 0.0
                        {
                            e.multiplicity += 1;
                            merged = true;
                        }
                    }
                    if !merged {
                        for sign in [1.0, -1.0] {
                            found.push(Eigenvalue {
                                re: re_f,
                                im: sign * im_f,
                                multiplicity: 1,
                                exact: b_exact.as_ref().map(|b| {
                                    (a.clone(), if sign > 0.0 { b.clone() } else { -b.clone() })
                                }),
                                modulus_sq: Some(p.clone()),
                            });
                        }
                    }
                }
            }
        }
    }

    // Whatever is left gets numeric values: match unconsumed numeric roots.
    let deg_left = poly.len() - 1;
    if deg_left > 0 {
        let mut remaining = numeric.clone();
        // Remove numeric roots already accounted for exactly.
        for e in &found {
            for _ in 0..e.multiplicity {
                if let Some(pos) = remaining.iter().position(|&(re, im)| {
                    (re - e.re).hypot(im - e.im) <= 1e-6 * (1.0 + e.modulus())
                }) {
                    remaining.remove(pos);
                }
            }
        }
        remaining.truncate(deg_left);
        found.extend(cluster_numeric(remaining));
    }

    Ok(found)
}

/// Eigenvalues with multiplicities; moduli sorted nonincreasing.
pub fn spectrum(m: &Matrix) -> Result<SpectrumData> {
    if !m.is_invertible() {
        return Err(Error::SingularMatrix);
    }
    let mut eigenvalues = match m {
        Matrix::Rational(mq) => rational_spectrum(mq)?,
        Matrix::Float(mf) => cluster_numeric(numeric_roots(mf)?),
    };
    eigenvalues.sort_by(|a, b| {
        let (ma, mb) = (a.modulus(), b.modulus());
        mb.partial_cmp(&ma)
            .unwrap()
            .then(b.re.partial_cmp(&a.re).unwrap())
            .then(b.im.partial_cmp(&a.im).unwrap())
    });
    let total: usize = eigenvalues.iter().map(|e| e.multiplicity).sum();
    if total != m.dim() {
        return Err(Error::EigenConvergence);
    }
    let mut moduli: Vec<f64> = eigenvalues
        .iter()
        .flat_map(|e| std::iter::repeat(e.modulus()).take(e.multiplicity))
        .collect();
    moduli.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(SpectrumData {
        eigenvalues,
        moduli_sorted: moduli,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::QMatrix;
    use num_traits::Signed;
    use crate::rat::{q, qr};

    fn qm(rows: Vec<Vec<i64>>) -> Matrix {
        Matrix::from_q(
            QMatrix::from_rows(
                rows.into_iter()
                    .map(|r| r.into_iter().map(q).collect())
                    .collect(),
            )
            .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn diagonal_spectrum() {
        let s = spectrum(&qm(vec![vec![2, 0], vec![0, 3]])).unwrap();
        assert_eq!(s.moduli_sorted, vec![3.0, 2.0]);
        assert!(s.eigenvalues.iter().all(|e| e.exact.is_some()));
    }

    #[test]
    fn quincunx_spectrum() {
        // Roots of λ² − 2λ + 2 are 1 ± i.
        let s = spectrum(&qm(vec![vec![1, 1], vec![-1, 1]])).unwrap();
        assert_eq!(s.eigenvalues.len(), 2);
        for e in &s.eigenvalues {
            assert_eq!(e.modulus_sq.clone().unwrap(), q(2));
            let (re, im) = e.exact.clone().unwrap();
            assert_eq!(re, q(1));
            assert_eq!(im.abs(), q(1));
        }
        for m in &s.moduli_sorted {
            assert!((m - 2f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_spectrum() {
        // Char poly λ² + 4, roots ±2i.
        let s = spectrum(&qm(vec![vec![0, -2], vec![2, 0]])).unwrap();
        assert_eq!(s.moduli_sorted, vec![2.0, 2.0]);
        let mut ims: Vec<Q> = s
            .eigenvalues
            .iter()
            .map(|e| e.exact.clone().unwrap().1)
            .collect();
        ims.sort();
        assert_eq!(ims, vec![q(-2), q(2)]);
    }

    #[test]
    fn multiplicity_sums_and_det_product() {
        let m = qm(vec![vec![1, 0, 0], vec![1, 1, 0], vec![0, 1, 1]]);
        let s = spectrum(&m).unwrap();
        assert_eq!(s.dim(), 3);
        assert_eq!(s.eigenvalues.len(), 1);
        assert_eq!(s.eigenvalues[0].multiplicity, 3);
        // Π |λ_i| = |det|.
        let prod: f64 = s.moduli_sorted.iter().product();
        assert!((prod - m.det_f64().abs()).abs() < 1e-9);
    }

    #[test]
    fn singular_rejected() {
        assert!(matches!(
            spectrum(&qm(vec![vec![1, 2], vec![2, 4]])),
            Err(Error::SingularMatrix)
        ));
    }

    #[test]
    fn float_mode_clusters() {
        let m = Matrix::from_f64_rows(vec![vec![2.0, 1.0], vec![0.0, 2.0]]).unwrap();
        let s = spectrum(&m).unwrap();
        assert_eq!(s.eigenvalues.len(), 1);
        assert_eq!(s.eigenvalues[0].multiplicity, 2);
        assert!(s.eigenvalues[0].exact.is_none());
    }

    #[test]
    fn triangular_rational_exact_product() {
        let m = Matrix::from_q(
            QMatrix::from_rows(vec![
                vec![qr(3, 2), q(0)],
                vec![q(7), qr(-4, 3)],
            ])
            .unwrap(),
        )
        .unwrap();
        let s = spectrum(&m).unwrap();
        let dets: Q = s
            .eigenvalues
            .iter()
            .flat_map(|e| {
                std::iter::repeat(e.exact.clone().unwrap().0).take(e.multiplicity)
            })
            .product();
        assert_eq!(dets.abs(), m.det_q().unwrap().abs());
    }
}
