//! The outer shell loop: assembles a candidate that covers the generator
//! shell by shell under the dilation equivalency map while keeping exact
//! translation packing throughout.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{redundancy_sequence, Lattice};
use crate::linalg::Matrix;
use crate::rat::{fmt_q, q, qr, sqrt_upper, Q};
use crate::regions::{
    d_map, dilation_check, tau_map, translation_check, BoolOp, Region, TilingReport,
};

use super::easycase::build_packing_preimage;
use super::{shell_partition, tiling_generator, GeneratorSpec};

#[derive(Clone, Debug)]
pub struct OuterTraceRow {
    pub k: usize,
    /// Covering deficit of d(U) against the shells targeted so far.
    pub deficit: Q,
    /// |Ũ_k| (bounded by the exchange-depth budget).
    pub new_piece: Q,
    /// |d(τ_{U_k}(Ũ_k))| (must stay below 2^{−k}).
    pub exchange_mass: Q,
    /// The 2^{−k} budget for the step.
    pub exchange_budget: Q,
    /// |U_{k+1} △ U_k|.
    pub sym_diff: Q,
}

/// Parameters of the outer construction.
#[derive(Clone, Debug)]
pub struct CoreParams {
    /// Truncation half-width for generators with unbounded factors.
    pub l: Q,
    /// Requested shell count (refined so every shell has measure < 1/2).
    pub k: usize,
    /// Target covering deficit on the certified shells.
    pub tol: Q,
    pub maxiter: usize,
}

impl Default for CoreParams {
    fn default() -> Self {
        CoreParams {
            l: q(2),
            k: 4,
            tol: qr(1, 1000),
            maxiter: 30,
        }
    }
}

/// A constructed candidate with its verification reports and trace.
#[derive(Clone, Debug)]
pub struct WaveletCandidate {
    pub region: Region,
    pub dilation_report: TilingReport,
    pub translation_report: TilingReport,
    pub generator: GeneratorSpec,
    pub generator_region: Region,
    pub outer_trace: Vec<OuterTraceRow>,
    /// Total inner-recursion rows across every invocation.
    pub inner_rows: usize,
}

/// Redundancy table for a region target: ball radius from the exact norm
/// range, counts at the doubled radius.
fn redundancy_table(
    a: &Matrix,
    lat: &Lattice,
    target: &Region,
    jmax: u32,
) -> Result<Vec<(u32, u64)>> {
    let (_, max_sq) = target
        .norm_sq_range()
        .ok_or_else(|| Error::Precondition("empty redundancy target".into()))?;
    let r = sqrt_upper(&max_sq).max(Q::one());
    redundancy_sequence(a, lat, &r, jmax, crate::lattice::ENUM_CAP_DEFAULT)
}

/// Runs the shell-by-shell construction for (A, Γ).
///
/// The result covers the certified shells of the generator under the
/// dilation map up to `params.tol` and packs by translations exactly; the
/// trace records the per-step exchange masses against their 2^{−k} budgets.
pub fn build_wavelet_core(
    a: &Matrix,
    lat: &Lattice,
    params: &CoreParams,
) -> Result<WaveletCandidate> {
    let aq = a
        .as_q()
        .ok_or_else(|| Error::Unsupported("construction needs a rational matrix".into()))?
        .clone();
    let det_abs = aq.det().abs();
    if det_abs <= Q::one() {
        return Err(Error::Precondition("construction needs |det A| > 1".into()));
    }
    let (w, gen_spec) = tiling_generator(a, &params.l, None)?;
    let shells = shell_partition(&w, params.k)?;
    let kshells = shells.len();
    let dim = w.dim();

    let full_target: Region = {
        let mut t = Region::empty(dim)?;
        for s in shells.iter() {
            t = t.boolean(s, BoolOp::Union)?;
        }
        t
    };

    // Inner tolerance budget: residuals of the easy-case runs add to the
    // final deficit, so give each run a geometric slice of tol.
    let inner_tol = |k: usize| -> Q { (&params.tol / q(4)) / q(1i64 << (k + 1).min(30)) };

    let mut inner_rows = 0usize;
    let mut trace: Vec<OuterTraceRow> = Vec::new();

    // U_1 with d(U_1) ≈ W_1.
    let m1 = redundancy_table(a, lat, &shells[0], 120)?;
    let (mut u_cur, t0) = build_packing_preimage(
        &shells[0],
        &w,
        &aq,
        lat,
        &m1,
        &Q::one(),
        &inner_tol(0),
        160,
    )?;
    inner_rows += t0.rows.len();

    let mut k = 1usize;
    loop {
        let d_cur = d_map(&u_cur, &w, &aq, None)?;
        let deficit = full_target.boolean(&d_cur, BoolOp::Difference)?.volume();
        if deficit <= params.tol {
            let translation_report = translation_check(&u_cur, lat)?;
            if !translation_report.packs {
                return Err(Error::Stalled(
                    "constructed set lost exact translation packing".into(),
                ));
            }
            let dilation_report = dilation_check(&u_cur, &aq, &w)?;
            return Ok(WaveletCandidate {
                region: u_cur,
                dilation_report,
                translation_report,
                generator: gen_spec,
                generator_region: w,
                outer_trace: trace,
                inner_rows,
            });
        }
        if k > params.maxiter {
            return Err(Error::Stalled(format!(
                "outer loop deficit {} above tolerance {} after {} steps",
                fmt_q(&deficit),
                fmt_q(&params.tol),
                params.maxiter
            )));
        }

        // Next target: everything up to shell k+1 that d(U_k) misses.
        let upto = (k + 1).min(kshells);
        let mut covered_target = Region::empty(dim)?;
        for s in shells.iter().take(upto) {
            covered_target = covered_target.boolean(s, BoolOp::Union)?;
        }
        let target_k = covered_target.boolean(&d_cur, BoolOp::Difference)?;
        if target_k.is_empty() {
            k += 1;
            continue;
        }

        // Exchange budget: pick K with Σ_{j≥K} det^j·|U ∩ A⁻ʲ(W)| < 2^{−k−2},
        // then bound |Ũ| < det^{−K}·2^{−k−2} so the τ-exchange stays inside
        // the 2^{−k} budget.
        let budget = Q::one() / q(1i64 << (k + 2).min(60));
        let kdepth = exchange_depth(&u_cur, &w, &aq, &det_abs, &budget)?;
        let epsilon = det_abs.pow(-(kdepth as i32)) * &budget;

        let mt = redundancy_table(a, lat, &target_k, 160)?;
        let (u_tilde, ti) = build_packing_preimage(
            &target_k,
            &w,
            &aq,
            lat,
            &mt,
            &epsilon,
            &inner_tol(k),
            200,
        )?;
        inner_rows += ti.rows.len();

        let tau = tau_map(&u_tilde, &u_cur, lat)?;
        let exchange_mass = d_map(&tau, &w, &aq, None)?.volume();
        let exchange_budget = Q::one() / q(1i64 << k.min(60));
        if exchange_mass >= exchange_budget {
            return Err(Error::Stalled(format!(
                "exchange mass {} exceeded its 2^-k budget {} at step {k}",
                fmt_q(&exchange_mass),
                fmt_q(&exchange_budget)
            )));
        }
        let u_next =
            u_tilde.boolean(&u_cur.boolean(&tau, BoolOp::Difference)?, BoolOp::Union)?;
        let sym = u_next.boolean(&u_cur, BoolOp::SymmetricDifference)?.volume();

        let d_next = d_map(&u_next, &w, &aq, None)?;
        let deficit_next = covered_target.boolean(&d_next, BoolOp::Difference)?.volume();
        trace.push(OuterTraceRow {
            k,
            deficit: deficit_next,
            new_piece: u_tilde.volume(),
            exchange_mass,
            exchange_budget,
            sym_diff: sym,
        });
        u_cur = u_next;
        k += 1;
    }
}

/// Smallest K with Σ_{j≥K} det^j·|U ∩ A⁻ʲ(W)| < budget (exact scan over the
/// certified window of levels that meet U).
fn exchange_depth(
    u: &Region,
    w: &Region,
    a: &crate::linalg::QMatrix,
    det_abs: &Q,
    budget: &Q,
) -> Result<i64> {
    let ainv = a.inverse().ok_or(Error::SingularMatrix)?;
    // A⁻ʲ(W) meets U ⟺ j in the certified window for (W, U) under A⁻¹.
    let (jlo, jhi) = crate::regions::certified_dilation_window(w, u, &ainv)?;
    let lo = jlo.min(0);
    let hi = jhi.max(1);
    let zero_t = vec![Q::zero(); u.dim()];
    let mut masses: Vec<(i64, Q)> = Vec::new();
    for j in lo..=hi {
        let am = a.pow(-j)?;
        let img = w.affine_image(&am, &zero_t)?;
        let inter = u.boolean(&img, BoolOp::Intersect)?;
        if !inter.is_empty() {
            masses.push((j, det_abs.pow(j as i32) * inter.volume()));
        }
    }
    for kdepth in lo..=hi + 1 {
        let tail: Q = masses
            .iter()
            .filter(|(j, _)| *j >= kdepth)
            .map(|(_, m)| m.clone())
            .sum();
        if &tail < budget {
            return Ok(kdepth.max(1));
        }
    }
    Ok(hi + 1)
}
