//! Simultaneous tilings of ℝⁿ by matrix dilations and lattice translations.
//!
//! A measurable set `W ⊂ ℝⁿ` is a *wavelet set* for an invertible matrix `A`
//! and a full-rank lattice `Γ` when the dilates `{Aʲ(W) : j ∈ ℤ}` and the
//! translates `{W + γ : γ ∈ Γ}` are both tilings of ℝⁿ up to null sets.
//! Whether such a set exists at all is controlled by the lattice counts
//!
//! ```text
//! N_j = #| A⁻ʲ(B(0,1)) ∩ Γ |,      j = 1, 2, …
//! ```
//!
//! a wavelet set exists if and only if `Σ 1/N_j` diverges.  This crate turns
//! that characterization, the proven structural decision rules around it, and
//! the iterative constructions that realize the sufficiency direction into an
//! executable library for dimensions 1–3 (counting and spectral analysis work
//! in any small dimension):
//!
//! * [`linalg`] — exact and floating spectra, real Jordan form in
//!   lower-diagonal convention, and the positive-spectrum companion matrix
//!   with its ball-sandwich constant.
//! * [`lattice`] — full-rank lattices, Fincke–Pohst enumeration of lattice
//!   points in ellipsoids, the count series `N_j`, redundancy bounds, and
//!   Minkowski-style two-sided counting estimates.
//! * [`asymptotics`] — growth rates of subspace sections of dilated balls,
//!   ellipsoid section and projection formulas, and packing slice bounds.
//! * [`existence`] — the verdict engine combining the proven decision rules
//!   with series diagnostics.
//! * [`regions`] — exact rational set algebra on finite polytope unions with
//!   pack/cover/tile verification for translations and dilations.
//! * [`construct`] — dilation tiling generators and the iterative
//!   constructions that build wavelet-set candidates with full convergence
//!   bookkeeping.
//! * [`io`] — JSON/CSV/SVG interchange used by the CLI.
//!
//! All types are immutable values and every operation is a pure function of
//! its inputs; Monte Carlo oracles take explicit seeds.

pub mod asymptotics;
pub mod construct;
pub mod error;
pub mod existence;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod rat;
pub mod regions;

pub use error::{Error, Result};
