//! The inner redundancy recursion: builds a small set V that packs by both
//! actions and projects onto a required target under the dilation
//! equivalency map.
//!
//! Starting from a layer of `A⁻ᴶ(U)` the recursion repeatedly converts the
//! uncovered residual `W_j = U ∖ d(U_j)` into new material one dilation
//! level down, exchanging translation-equivalent parts so packing is never
//! lost.  In exact arithmetic every accepted step satisfies the residual
//! decay `|W_{j+1}| ≤ (1 − c/m_{j+1})·|W_j|` with `c = 1 − |det A|⁻¹`, and
//! the symmetric-difference increments obey the geometric term bound that
//! makes the iterates Cauchy.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::QMatrix;
use crate::rat::{fmt_q, q, Q};
use crate::regions::{d_map, redundant_partition, tau_map, BoolOp, Region};

/// One accepted recursion step.
#[derive(Clone, Debug)]
pub struct TraceRow {
    pub j: i64,
    /// |W_j| after this step.
    pub residual: Q,
    /// Redundancy m_{j+1} used to carve the new piece.
    pub redundancy: u64,
    /// |Ũ_{j+1}|.
    pub new_piece: Q,
    /// |U_{j+1} △ U_j|.
    pub sym_diff: Q,
    /// |d(U_{j+1} △ U_j)|.
    pub d_sym_diff: Q,
    pub cum_sym_diff: Q,
    pub cum_d_sym_diff: Q,
    /// Row-level decay check |W_{j+1}| ≤ (1 − c/m_{j+1})·|W_j|.
    pub decay_ok: bool,
    /// Term bound |U_{j+1} △ U_j| ≤ 2·|det A|^{−j−1}·|W_j|.
    pub term_bound_ok: bool,
}

#[derive(Clone, Debug)]
pub struct BuildTrace {
    pub rows: Vec<TraceRow>,
    pub det_abs: Q,
    /// c = 1 − |det A|⁻¹.
    pub c_factor: Q,
    /// Start index J of the recursion.
    pub start_index: i64,
    /// |W_J| before any step.
    pub initial_residual: Q,
}

impl BuildTrace {
    /// The telescoping majorant: c·Σ |W_j|/m_{j+1} ≤ e·|W_J|.
    pub fn seq_majorant_ok(&self) -> bool {
        let mut sum = Q::zero();
        let mut prev = self.initial_residual.clone();
        for row in &self.rows {
            sum += &prev / q(row.redundancy as i64);
            prev = row.residual.clone();
        }
        let lhs = crate::rat::q_to_f64(&(&self.c_factor * &sum));
        let rhs = std::f64::consts::E * crate::rat::q_to_f64(&self.initial_residual);
        lhs <= rhs * (1.0 + 1e-12)
    }
}

/// Looks up m_j in the redundancy table (entries (j, m_j)).
fn redundancy_at(m: &[(u32, u64)], j: i64) -> Result<u64> {
    m.iter()
        .find(|&&(jj, _)| jj as i64 == j)
        .map(|&(_, v)| v)
        .ok_or_else(|| {
            Error::Precondition(format!("redundancy table does not cover j = {j}"))
        })
}

/// Builds a set `V` packing by translations and by dilations with
/// `d(V) ≈ u_target` (residual ≤ tol), `|V| < epsilon`, together with the
/// full convergence trace.
///
/// Preconditions (caller-certified): `w` packs by A dilations,
/// `u_target ⊆ w`, and `A⁻ʲ(u_target)` packs `m_j`-redundantly by Γ
/// translations for every j in the table.
#[allow(clippy::too_many_arguments)]
pub fn build_packing_preimage(
    u_target: &Region,
    w: &Region,
    a: &QMatrix,
    lat: &Lattice,
    m_table: &[(u32, u64)],
    epsilon: &Q,
    tol: &Q,
    maxiter: usize,
) -> Result<(Region, BuildTrace)> {
    let det_abs = a.det().abs();
    if det_abs <= Q::one() {
        return Err(Error::Precondition("recursion needs |det A| > 1".into()));
    }
    let outside = u_target.boolean(w, BoolOp::Difference)?;
    if !outside.volume().is_zero() {
        return Err(Error::Precondition("target must be a subset of the frame".into()));
    }
    let c_factor = Q::one() - Q::one() / &det_abs;
    let target_vol = u_target.volume();
    if target_vol.is_zero() {
        return Ok((
            Region::empty(u_target.dim())?,
            BuildTrace {
                rows: vec![],
                det_abs,
                c_factor,
                start_index: 0,
                initial_residual: Q::zero(),
            },
        ));
    }
    if epsilon <= &Q::zero() {
        return Err(Error::Precondition("epsilon must be positive".into()));
    }

    // Smallest J with Σ_{j≥J} |A⁻ʲ(U)| = |U|·det^{−J}/(1 − det⁻¹) < ε.
    let mut j_start: i64 = 1;
    {
        let mut tail = &target_vol / (&det_abs - Q::one()); // |U|·det^{−1}·det/(det−1)·… at J=1
        // tail(J) = |U| · det^{1−J} / (det − 1); maintain incrementally.
        while tail >= *epsilon {
            j_start += 1;
            tail /= &det_abs;
            if j_start > 10_000 {
                return Err(Error::Precondition("epsilon left no feasible start index".into()));
            }
        }
    }

    let zero_t = vec![Q::zero(); u_target.dim()];

    // U_J: the largest layer of a redundant partition of A^{−J}(U).
    let m_j0 = redundancy_at(m_table, j_start)?;
    let a_pow = a.pow(-j_start)?;
    let scaled = u_target.affine_image(&a_pow, &zero_t)?;
    let layers = redundant_partition(&scaled, lat, m_j0 as usize)?;
    let u0 = layers
        .iter()
        .max_by(|x, y| x.volume().cmp(&y.volume()))
        .cloned()
        .unwrap_or(Region::empty(u_target.dim())?);
    // Pigeonhole: the largest layer has at least a 1/m share.
    debug_assert!(&u0.volume() * q(m_j0 as i64) >= scaled.volume());

    let mut u_cur = u0;
    let mut w_cur = u_target.boolean(&d_map(&u_cur, w, a, None)?, BoolOp::Difference)?;
    let initial_residual = w_cur.volume();

    let mut rows: Vec<TraceRow> = Vec::new();
    let mut cum_sym = Q::zero();
    let mut cum_dsym = Q::zero();
    let mut j = j_start;
    while w_cur.volume() > *tol && rows.len() < maxiter {
        let m_next = redundancy_at(m_table, j + 1)?;
        let w_res_vol = w_cur.volume();
        // Ũ ⊆ A^{−j−1}(W_j) packing with measure exactly |A^{−j−1}(W_j)|/m.
        let a_pow = a.pow(-(j + 1))?;
        let pulled = w_cur.affine_image(&a_pow, &zero_t)?;
        let layers = redundant_partition(&pulled, lat, m_next as usize)?;
        let largest = layers
            .iter()
            .max_by(|x, y| x.volume().cmp(&y.volume()))
            .cloned()
            .unwrap();
        let want = pulled.volume() / q(m_next as i64);
        let (u_tilde, _) = largest.trim_to_volume(&want)?;

        let tau = tau_map(&u_tilde, &u_cur, lat)?;
        let u_next = u_tilde.boolean(&u_cur.boolean(&tau, BoolOp::Difference)?, BoolOp::Union)?;
        let w_next = u_target.boolean(&d_map(&u_next, w, a, None)?, BoolOp::Difference)?;

        let sym = u_next.boolean(&u_cur, BoolOp::SymmetricDifference)?;
        let sym_vol = sym.volume();
        let dsym_vol = d_map(&sym, w, a, None)?.volume();
        cum_sym += &sym_vol;
        cum_dsym += &dsym_vol;

        let decay_bound = (Q::one() - &c_factor / q(m_next as i64)) * &w_res_vol;
        let decay_ok = w_next.volume() <= decay_bound;
        let term_bound = q(2) * det_abs.pow(-(j as i32) - 1) * &w_res_vol;
        let term_bound_ok = sym_vol <= term_bound;

        rows.push(TraceRow {
            j: j + 1,
            residual: w_next.volume(),
            redundancy: m_next,
            new_piece: u_tilde.volume(),
            sym_diff: sym_vol,
            d_sym_diff: dsym_vol,
            cum_sym_diff: cum_sym.clone(),
            cum_d_sym_diff: cum_dsym.clone(),
            decay_ok,
            term_bound_ok,
        });
        if !decay_ok {
            return Err(Error::Stalled(format!(
                "residual decay violated at j = {}: |W| = {} > {}",
                j + 1,
                fmt_q(&w_next.volume()),
                fmt_q(&decay_bound)
            )));
        }
        u_cur = u_next;
        w_cur = w_next;
        j += 1;
    }
    if w_cur.volume() > *tol {
        return Err(Error::Stalled(format!(
            "residual {} above tolerance {} after {} iterations",
            fmt_q(&w_cur.volume()),
            fmt_q(tol),
            rows.len()
        )));
    }

    Ok((
        u_cur,
        BuildTrace {
            rows,
            det_abs,
            c_factor,
            start_index: j_start,
            initial_residual,
        },
    ))
}
