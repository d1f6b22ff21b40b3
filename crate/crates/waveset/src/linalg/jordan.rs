//! Real Jordan normal form in lower-diagonal convention.
//!
//! Blocks are ordered by ascending eigenvalue modulus and each block is
//! written with the eigenvalue (or the 2×2 rotation-scaling block `M_λ`) on
//! the diagonal and the coupling entries *below* it:
//!
//! ```text
//! ⎡ λ        ⎤        ⎡ M_λ       ⎤           ⎡  Re λ  Im λ ⎤
//! ⎢ 1  λ     ⎥        ⎢ I₂  M_λ   ⎥     M_λ = ⎣ −Im λ  Re λ ⎦
//! ⎣    1  λ  ⎦        ⎣     I₂ M_λ⎦
//! ```
//!
//! Rational matrices whose eigenvalues lie in ℚ(i) are decomposed exactly;
//! everything else falls back to a floating staircase with rank decisions at
//! [`super::RANK_TOL`], reporting an error when the staircase is numerically
//! ambiguous instead of guessing.

use nalgebra::{Complex, DMatrix};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rat::{exact_sqrt, q_to_f64, Q};

use super::{
    kernel_basis, spectrum, Field, Matrix, QMatrix, SpanTracker, QC, RANK_TOL,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockKind {
    Real,
    /// A conjugate pair realized as 2×2 rotation-scaling blocks.
    ComplexPair,
}

#[derive(Clone, Debug)]
pub struct JordanBlock {
    pub kind: BlockKind,
    pub eigen_re: f64,
    pub eigen_im: f64,
    /// Exact (re, im) when available.
    pub exact: Option<(Q, Q)>,
    /// Exact |λ|² when available.
    pub modulus_sq: Option<Q>,
    /// Chain length; the real dimension of the block is `size` for real
    /// eigenvalues and `2·size` for complex pairs.
    pub size: usize,
}

impl JordanBlock {
    pub fn real_dim(&self) -> usize {
        match self.kind {
            BlockKind::Real => self.size,
            BlockKind::ComplexPair => 2 * self.size,
        }
    }

    pub fn modulus(&self) -> f64 {
        self.eigen_re.hypot(self.eigen_im)
    }
}

/// Decomposition `P · A · P⁻¹ = J`.
#[derive(Clone, Debug)]
pub struct JordanDecomposition {
    pub basis_change: Matrix,
    pub basis_change_inv: Matrix,
    pub jmat: Matrix,
    pub blocks: Vec<JordanBlock>,
    pub exact: bool,
}

impl JordanDecomposition {
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.real_dim()).sum()
    }

    /// Modulus of the block eigenvalue governing each Jordan coordinate,
    /// in block order (length = dimension).
    pub fn coordinate_moduli(&self) -> Vec<(f64, Option<Q>)> {
        let mut out = Vec::with_capacity(self.dim());
        for b in &self.blocks {
            for _ in 0..b.real_dim() {
                out.push((b.modulus(), b.modulus_sq.clone()));
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Exact path over ℚ and ℚ(i)
// ---------------------------------------------------------------------------

fn qc_matrix_from_q(m: &QMatrix) -> Vec<Vec<QC>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| QC::from_q(m.at(r, c).clone())).collect())
        .collect()
}

fn mat_mul_f<F: Field>(a: &[Vec<F>], b: &[Vec<F>]) -> Vec<Vec<F>> {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    let mut out = vec![vec![F::f_zero(); m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l].f_is_zero() {
                continue;
            }
            for j in 0..m {
                let d = a[i][l].f_mul(&b[l][j]);
                out[i][j] = out[i][j].f_add(&d);
            }
        }
    }
    out
}

fn mat_vec_f<F: Field>(a: &[Vec<F>], v: &[F]) -> Vec<F> {
    a.iter()
        .map(|row| {
            let mut acc = F::f_zero();
            for (x, y) in row.iter().zip(v) {
                acc = acc.f_add(&x.f_mul(y));
            }
            acc
        })
        .collect()
}

/// Chains `(top, height)` for one eigenvalue of the exact matrix `n_mat`
/// (= A − λI over the field), with `mult` the algebraic multiplicity.
fn exact_chains<F: Field>(n_mat: &[Vec<F>], mult: usize) -> Vec<(Vec<F>, usize)> {
    let n = n_mat.len();
    // Kernel filtration K_1 ⊆ K_2 ⊆ … until the dimension reaches mult.
    let mut kernels: Vec<Vec<Vec<F>>> = Vec::new();
    let mut power = n_mat.to_vec();
    loop {
        let rows: Vec<Vec<F>> = power.clone();
        let ker = kernel_basis(&rows, n);
        let dim = ker.len();
        kernels.push(ker);
        if dim >= mult || kernels.len() > n {
            break;
        }
        power = mat_mul_f(&power, n_mat);
    }
    let kmax = kernels.len();
    let mut tops: Vec<(Vec<F>, usize)> = Vec::new();
    for k in (1..=kmax).rev() {
        let mut tracker: SpanTracker<F> = SpanTracker::new(n);
        if k >= 2 {
            for v in &kernels[k - 2] {
                tracker.insert(v);
            }
        }
        for (top, h) in &tops {
            // Image of the chain at level k.
            let mut img = top.clone();
            for _ in 0..(h - k) {
                img = mat_vec_f(n_mat, &img);
            }
            tracker.insert(&img);
        }
        for v in &kernels[k - 1] {
            if tracker.insert(v) {
                tops.push((v.clone(), k));
            }
        }
    }
    tops.sort_by_key(|(_, h)| std::cmp::Reverse(*h));
    tops
}

struct PendingBlock {
    kind: BlockKind,
    eigen_re: f64,
    eigen_im: f64,
    exact: Option<(Q, Q)>,
    modulus_sq: Option<Q>,
    size: usize,
    /// Real columns of the block, chain-top first.
    columns: Vec<Vec<Q>>,
}

fn exact_jordan(a: &QMatrix) -> Result<Option<JordanDecomposition>> {
    let n = a.nrows();
    let spec = spectrum(&Matrix::Rational(a.clone()))?;
    if spec.eigenvalues.iter().any(|e| e.exact.is_none()) {
        return Ok(None); // irrational eigen-structure → numeric path
    }

    let mut pending: Vec<PendingBlock> = Vec::new();
    for e in &spec.eigenvalues {
        let (re, im) = e.exact.clone().expect("checked exact");
        if im.is_zero() {
            // Real eigenvalue: chains over ℚ.
            let mut nm: Vec<Vec<Q>> = (0..n).map(|r| a.row(r)).collect();
            for (i, nm_row) in nm.iter_mut().enumerate() {
                nm_row[i] = &nm_row[i] - &re;
            }
            for (top, h) in exact_chains(&nm, e.multiplicity) {
                let mut cols = Vec::with_capacity(h);
                let mut v = top;
                for _ in 0..h {
                    cols.push(v.clone());
                    v = mat_vec_f(&nm, &v);
                }
                pending.push(PendingBlock {
                    kind: BlockKind::Real,
                    eigen_re: q_to_f64(&re),
                    eigen_im: 0.0,
                    exact: Some((re.clone(), Q::zero())),
                    modulus_sq: Some(&re * &re),
                    size: h,
                    columns: cols,
                });
            }
        } else if im > Q::zero() {
            // Complex pair: chains over ℚ(i), realified afterwards.
            let lam = QC::new(re.clone(), im.clone());
            let mut nm = qc_matrix_from_q(a);
            for (i, nm_row) in nm.iter_mut().enumerate() {
                nm_row[i] = nm_row[i].sub(&lam);
            }
            for (top, h) in exact_chains(&nm, e.multiplicity) {
                let mut cols = Vec::with_capacity(2 * h);
                let mut w = top;
                for _ in 0..h {
                    cols.push(w.iter().map(|z| z.re.clone()).collect());
                    cols.push(w.iter().map(|z| z.im.clone()).collect());
                    w = mat_vec_f(&nm, &w);
                }
                pending.push(PendingBlock {
                    kind: BlockKind::ComplexPair,
                    eigen_re: q_to_f64(&re),
                    eigen_im: q_to_f64(&im),
                    exact: Some((re.clone(), im.clone())),
                    modulus_sq: Some(&re * &re + &im * &im),
                    size: h,
                    columns: cols,
                });
            }
        }
    }

    // Ascending modulus, then a deterministic tie-break.
    pending.sort_by(|x, y| {
        let mx = x.modulus_sq.clone().unwrap();
        let my = y.modulus_sq.clone().unwrap();
        mx.cmp(&my)
            .then_with(|| {
                x.eigen_re
                    .partial_cmp(&y.eigen_re)
                    .unwrap()
                    .then(x.eigen_im.partial_cmp(&y.eigen_im).unwrap())
            })
            .then(y.size.cmp(&x.size))
    });

    // Assemble the column matrix Q (A·Q = Q·J) and J itself.
    let mut qcols: Vec<Vec<Q>> = Vec::with_capacity(n);
    let mut jm = QMatrix::zeros(n, n);
    let mut blocks = Vec::new();
    let mut off = 0usize;
    for pb in pending {
        let d = pb.columns.len();
        match pb.kind {
            BlockKind::Real => {
                let (lam, _) = pb.exact.clone().unwrap();
                for i in 0..d {
                    *jm.at_mut(off + i, off + i) = lam.clone();
                    if i + 1 < d {
                        *jm.at_mut(off + i + 1, off + i) = Q::one();
                    }
                }
            }
            BlockKind::ComplexPair => {
                let (re, im) = pb.exact.clone().unwrap();
                for p in 0..pb.size {
                    let r = off + 2 * p;
                    *jm.at_mut(r, r) = re.clone();
                    *jm.at_mut(r, r + 1) = im.clone();
                    *jm.at_mut(r + 1, r) = -im.clone();
                    *jm.at_mut(r + 1, r + 1) = re.clone();
                    if p + 1 < pb.size {
                        *jm.at_mut(r + 2, r) = Q::one();
                        *jm.at_mut(r + 3, r + 1) = Q::one();
                    }
                }
            }
        }
        qcols.extend(pb.columns);
        blocks.push(JordanBlock {
            kind: pb.kind,
            eigen_re: pb.eigen_re,
            eigen_im: pb.eigen_im,
            exact: pb.exact,
            modulus_sq: pb.modulus_sq,
            size: pb.size,
        });
        off += d;
    }
    if off != n {
        return Ok(None); // defective bookkeeping; let the numeric path report
    }

    let qmat = QMatrix::from_fn(n, n, |r, c| qcols[c][r].clone());
    let p = match qmat.inverse() {
        Some(inv) => inv,
        None => return Ok(None),
    };
    debug_assert_eq!(p.mul(a).mul(&qmat), jm);
    Ok(Some(JordanDecomposition {
        basis_change: Matrix::Rational(p),
        basis_change_inv: Matrix::Rational(qmat),
        jmat: Matrix::Rational(jm),
        blocks,
        exact: true,
    }))
}

// ---------------------------------------------------------------------------
// Numeric path (complex staircase)
// ---------------------------------------------------------------------------

type CMat = DMatrix<Complex<f64>>;
type CVec = nalgebra::DVector<Complex<f64>>;

fn to_complex(m: &DMatrix<f64>) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |r, c| Complex::new(m[(r, c)], 0.0))
}

/// Orthonormal kernel basis of `m` with an ambiguity check on the
/// singular-value gap.
fn numeric_kernel(m: &CMat, tol: f64) -> Result<Vec<CVec>> {
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.as_ref().expect("requested V^T");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let thresh = tol * smax.max(1.0);
    for s in svd.singular_values.iter() {
        if *s > thresh / 10.0 && *s < thresh * 10.0 {
            return Err(Error::JordanAmbiguous {
                detail: format!(
                    "singular value {s:.3e} sits inside the rank-decision band around {thresh:.3e}"
                ),
                clusters: vec![],
            });
        }
    }
    let mut out = Vec::new();
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s <= thresh {
            out.push(vt.row(i).transpose().map(|z| z.conj()));
        }
    }
    // Rows of V^T beyond the number of singular values (if any) are exact
    // kernel directions for non-square inputs; square here, so done.
    Ok(out)
}

fn numeric_jordan(af: &DMatrix<f64>) -> Result<JordanDecomposition> {
    let n = af.nrows();
    let spec = spectrum(&Matrix::Float(af.clone()))?;
    let ac = to_complex(af);

    struct NBlock {
        kind: BlockKind,
        re: f64,
        im: f64,
        size: usize,
        columns: Vec<Vec<f64>>,
    }
    let mut pending: Vec<NBlock> = Vec::new();

    for e in &spec.eigenvalues {
        if e.im < 0.0 {
            continue; // conjugate handled with its im > 0 partner
        }
        let lam = Complex::new(e.re, e.im);
        let mut nm = ac.clone();
        for i in 0..n {
            nm[(i, i)] -= lam;
        }
        // Kernel staircase.
        let mut kernels: Vec<Vec<CVec>> = Vec::new();
        let mut power = nm.clone();
        loop {
            let ker = numeric_kernel(&power, RANK_TOL).map_err(|err| match err {
                Error::JordanAmbiguous { detail, .. } => Error::JordanAmbiguous {
                    detail,
                    clusters: spec
                        .eigenvalues
                        .iter()
                        .map(|e| (e.re, e.im, e.multiplicity))
                        .collect(),
                },
                other => other,
            })?;
            let dim = ker.len();
            kernels.push(ker);
            if dim >= e.multiplicity || kernels.len() > n {
                break;
            }
            power = &power * &nm;
        }
        let kmax = kernels.len();
        // Chain tops via orthogonal projection residuals.
        let mut tops: Vec<(CVec, usize)> = Vec::new();
        for k in (1..=kmax).rev() {
            let mut span: Vec<CVec> = Vec::new();
            if k >= 2 {
                span.extend(kernels[k - 2].iter().cloned());
            }
            for (top, h) in &tops {
                let mut img = top.clone();
                for _ in 0..(h - k) {
                    img = &nm * img;
                }
                if img.norm() > 1e-12 {
                    span.push(img.normalize());
                }
            }
            // Gram–Schmidt the span.
            let mut ortho: Vec<CVec> = Vec::new();
            for v in span {
                let mut w = v;
                for u in &ortho {
                    let c = u.dotc(&w);
                    w -= u * c;
                }
                if w.norm() > 1e-10 {
                    let nrm = w.norm();
                    ortho.push(w / Complex::new(nrm, 0.0));
                }
            }
            for v in &kernels[k - 1] {
                let mut w = v.clone();
                for u in &ortho {
                    let c = u.dotc(&w);
                    w -= u * c;
                }
                if w.norm() > 1e-6 {
                    let nrm = w.norm();
                    let w = w / Complex::new(nrm, 0.0);
                    ortho.push(w.clone());
                    tops.push((w, k));
                }
            }
        }
        tops.sort_by_key(|(_, h)| std::cmp::Reverse(*h));

        let expected: usize = tops.iter().map(|(_, h)| h).sum();
        if expected != e.multiplicity {
            return Err(Error::JordanAmbiguous {
                detail: format!(
                    "chain lengths sum to {expected} but algebraic multiplicity is {}",
                    e.multiplicity
                ),
                clusters: spec
                    .eigenvalues
                    .iter()
                    .map(|e| (e.re, e.im, e.multiplicity))
                    .collect(),
            });
        }

        for (top, h) in tops {
            let mut chain: Vec<CVec> = Vec::with_capacity(h);
            let mut w = top;
            for step in 0..h {
                if step > 0 && w.norm() < 1e-10 {
                    return Err(Error::JordanAmbiguous {
                        detail: "chain vector collapsed below tolerance".into(),
                        clusters: spec
                            .eigenvalues
                            .iter()
                            .map(|e| (e.re, e.im, e.multiplicity))
                            .collect(),
                    });
                }
                chain.push(w.clone());
                w = &nm * w;
            }
            if e.im == 0.0 {
                // Rotate the chain to be (numerically) real.
                let top = &chain[0];
                let mut best = Complex::new(1.0, 0.0);
                let mut bestn = 0.0;
                for z in top.iter() {
                    if z.norm() > bestn {
                        bestn = z.norm();
                        best = *z;
                    }
                }
                let phase = best / Complex::new(best.norm(), 0.0);
                let cols: Vec<Vec<f64>> = chain
                    .iter()
                    .map(|v| v.iter().map(|z| (z / phase).re).collect())
                    .collect();
                pending.push(NBlock {
                    kind: BlockKind::Real,
                    re: e.re,
                    im: 0.0,
                    size: h,
                    columns: cols,
                });
            } else {
                let mut cols: Vec<Vec<f64>> = Vec::with_capacity(2 * h);
                for v in &chain {
                    cols.push(v.iter().map(|z| z.re).collect());
                    cols.push(v.iter().map(|z| z.im).collect());
                }
                pending.push(NBlock {
                    kind: BlockKind::ComplexPair,
                    re: e.re,
                    im: e.im,
                    size: h,
                    columns: cols,
                });
            }
        }
    }

    pending.sort_by(|x, y| {
        let (mx, my) = (x.re.hypot(x.im), y.re.hypot(y.im));
        mx.partial_cmp(&my)
            .unwrap()
            .then(x.re.partial_cmp(&y.re).unwrap())
            .then(x.im.partial_cmp(&y.im).unwrap())
            .then(y.size.cmp(&x.size))
    });

    let mut jm = DMatrix::<f64>::zeros(n, n);
    let mut qcols: Vec<Vec<f64>> = Vec::new();
    let mut blocks = Vec::new();
    let mut off = 0usize;
    for pb in pending {
        let d = pb.columns.len();
        match pb.kind {
            BlockKind::Real => {
                for i in 0..d {
                    jm[(off + i, off + i)] = pb.re;
                    if i + 1 < d {
                        jm[(off + i + 1, off + i)] = 1.0;
                    }
                }
            }
            BlockKind::ComplexPair => {
                for p in 0..pb.size {
                    let r = off + 2 * p;
                    jm[(r, r)] = pb.re;
                    jm[(r, r + 1)] = pb.im;
                    jm[(r + 1, r)] = -pb.im;
                    jm[(r + 1, r + 1)] = pb.re;
                    if p + 1 < pb.size {
                        jm[(r + 2, r)] = 1.0;
                        jm[(r + 3, r + 1)] = 1.0;
                    }
                }
            }
        }
        qcols.extend(pb.columns);
        blocks.push(JordanBlock {
            kind: pb.kind,
            eigen_re: pb.re,
            eigen_im: pb.im,
            exact: None,
            modulus_sq: None,
            size: pb.size,
        });
        off += d;
    }
    if off != n {
        return Err(Error::JordanAmbiguous {
            detail: format!("assembled dimension {off} ≠ {n}"),
            clusters: spec
                .eigenvalues
                .iter()
                .map(|e| (e.re, e.im, e.multiplicity))
                .collect(),
        });
    }
    let qmat = DMatrix::from_fn(n, n, |r, c| qcols[c][r]);
    let p = qmat
        .clone()
        .try_inverse()
        .ok_or(Error::SingularMatrix)?;
    let recon = (&p * af * &qmat) - &jm;
    let err = recon.norm();
    if err > 1e-6 * (1.0 + jm.norm()) {
        return Err(Error::JordanAmbiguous {
            detail: format!("reconstruction residual {err:.3e} exceeds tolerance"),
            clusters: spec
                .eigenvalues
                .iter()
                .map(|e| (e.re, e.im, e.multiplicity))
                .collect(),
        });
    }
    Ok(JordanDecomposition {
        basis_change: Matrix::Float(p),
        basis_change_inv: Matrix::Float(qmat),
        jmat: Matrix::Float(jm),
        blocks,
        exact: false,
    })
}

/// Real Jordan decomposition of an invertible matrix.
pub fn real_jordan(m: &Matrix) -> Result<JordanDecomposition> {
    if !m.is_invertible() {
        return Err(Error::SingularMatrix);
    }
    if let Matrix::Rational(a) = m {
        if let Some(dec) = exact_jordan(a)? {
            return Ok(dec);
        }
    }
    numeric_jordan(&m.to_f64())
}

/// Exact |λ| as a rational when |λ|² is a perfect rational square.
pub fn exact_modulus(block: &JordanBlock) -> Option<Q> {
    block.modulus_sq.as_ref().and_then(exact_sqrt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{q, qr};

    fn qm(rows: Vec<Vec<Q>>) -> Matrix {
        Matrix::from_q(QMatrix::from_rows(rows).unwrap()).unwrap()
    }

    fn reconstruction_err(m: &Matrix, dec: &JordanDecomposition) -> f64 {
        let p = dec.basis_change.to_f64();
        let pinv = dec.basis_change_inv.to_f64();
        let j = dec.jmat.to_f64();
        ((&p * m.to_f64() * &pinv) - j).norm()
    }

    #[test]
    fn diagonal_is_its_own_form() {
        let m = qm(vec![vec![q(2), q(0)], vec![q(0), qr(1, 2)]]);
        let d = real_jordan(&m).unwrap();
        assert!(d.exact);
        assert_eq!(d.blocks.len(), 2);
        assert!(d.blocks.iter().all(|b| b.size == 1));
        // Ascending modulus ordering puts 1/2 first.
        assert_eq!(d.blocks[0].exact.clone().unwrap().0, qr(1, 2));
        assert!(reconstruction_err(&m, &d) < 1e-12);
    }

    #[test]
    fn shear_single_block() {
        // [[1,0],[1,1]] is already a lower-diagonal Jordan block for λ = 1.
        let m = qm(vec![vec![q(1), q(0)], vec![q(1), q(1)]]);
        let d = real_jordan(&m).unwrap();
        assert!(d.exact);
        assert_eq!(d.blocks.len(), 1);
        assert_eq!(d.blocks[0].size, 2);
        assert_eq!(d.blocks[0].kind, BlockKind::Real);
        assert!(reconstruction_err(&m, &d) < 1e-12);
    }

    #[test]
    fn quincunx_complex_block() {
        let m = qm(vec![vec![q(1), q(1)], vec![q(-1), q(1)]]);
        let d = real_jordan(&m).unwrap();
        assert!(d.exact);
        assert_eq!(d.blocks.len(), 1);
        assert_eq!(d.blocks[0].kind, BlockKind::ComplexPair);
        assert_eq!(d.blocks[0].size, 1);
        assert_eq!(d.blocks[0].exact.clone().unwrap(), (q(1), q(1)));
        assert!(reconstruction_err(&m, &d) < 1e-12);
    }

    #[test]
    fn defective_rational_three_chain() {
        let m = qm(vec![
            vec![q(1), q(0), q(0)],
            vec![q(1), q(1), q(0)],
            vec![q(0), q(1), q(1)],
        ]);
        let d = real_jordan(&m).unwrap();
        assert!(d.exact);
        assert_eq!(d.blocks.len(), 1);
        assert_eq!(d.blocks[0].size, 3);
        assert!(reconstruction_err(&m, &d) < 1e-12);
    }

    #[test]
    fn mixed_blocks_sorted_ascending() {
        // Block diag: rotation by 2 (modulus 2) and eigenvalue 1/2.
        let m = qm(vec![
            vec![q(0), q(-2), q(0)],
            vec![q(2), q(0), q(0)],
            vec![q(0), q(0), qr(1, 2)],
        ]);
        let d = real_jordan(&m).unwrap();
        assert!(d.exact);
        assert_eq!(d.blocks.len(), 2);
        assert!(d.blocks[0].modulus() < d.blocks[1].modulus());
        assert_eq!(d.blocks[0].exact.clone().unwrap().0, qr(1, 2));
        assert!(reconstruction_err(&m, &d) < 1e-12);
    }

    #[test]
    fn numeric_fallback_irrational() {
        // Eigenvalues 1 ± √2 are irrational, forcing the numeric path.
        let m = qm(vec![vec![q(1), q(2)], vec![q(1), q(1)]]);
        let d = real_jordan(&m).unwrap();
        assert!(!d.exact);
        assert_eq!(d.blocks.len(), 2);
        assert!(reconstruction_err(&m, &d) < 1e-8);
    }

    #[test]
    fn float_mode_defective() {
        let m = Matrix::from_f64_rows(vec![vec![2.0, 0.0], vec![3.0, 2.0]]).unwrap();
        let d = real_jordan(&m).unwrap();
        assert_eq!(d.blocks.len(), 1);
        assert_eq!(d.blocks[0].size, 2);
        assert!(reconstruction_err(&m, &d) < 1e-8);
    }
}
