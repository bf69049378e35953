//! Probabilistic coherent-error cancellation.
//!
//! A teleported TMR state applies `R(θ_j)` with probability `q̄_j`. The
//! canceller samples the same branch statistics and applies the inverse
//! over-rotation `R(-Δ_j)`, `Δ_j = θ_j - θ_0`. To first order in `Σ q̄_j`
//! the composition is the target rotation followed by stochastic Z with
//! rate `2 Σ q̄_j sin²Δ_j`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tmr::{model_for_logical_angle, TmrOutputModel, TmrParams};
use crate::zchan::RotationMixture;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PcecChannelSet {
    pub noisy: RotationMixture,
    pub canceller: RotationMixture,
    /// `canceller ∘ noisy ∘ R(-θ_0)`: the error left in the target frame.
    pub composed_error: RotationMixture,
    pub residual_rate: f64,
}

/// `Σ q̄_j R(θ_j)`.
pub fn build_noisy_channel(model: &TmrOutputModel) -> Result<RotationMixture> {
    RotationMixture::from_branches(model.branches.iter().map(|b| (b.qbar_j, b.theta_j)))
}

/// `(1 - Σ q̄_j) Id + Σ q̄_j R(-Δ_j)`; requires `Σ_{j≥1} q̄_j < 1/2`.
pub fn build_canceller(model: &TmrOutputModel) -> Result<RotationMixture> {
    let err = model.error_weight();
    if err >= 0.5 {
        return Err(Error::OutOfRegime(format!(
            "error-branch weight {err} is not below 1/2"
        )));
    }
    let branches = std::iter::once((1.0 - err, 0.0)).chain(model.over_rotations().map(|(q, d)| (q, -d)));
    RotationMixture::from_branches(branches)
}

/// `2 Σ_{j≥1} q̄_j sin²Δ_j`.
pub fn residual_rate(model: &TmrOutputModel) -> f64 {
    2.0 * model.over_rotations().map(|(q, d)| q * d.sin().powi(2)).sum::<f64>()
}

/// Single-flip term only, `2 q̄_1 sin²Δ_1`.
pub fn leading_residual_rate(model: &TmrOutputModel) -> f64 {
    2.0 * model
        .over_rotations()
        .next()
        .map_or(0.0, |(q, d)| q * d.sin().powi(2))
}

/// Bound on `|residual_rate - exact twirled error|`, `10 (Σ q̄_j)²`.
pub fn remainder_bound(model: &TmrOutputModel) -> f64 {
    10.0 * model.error_weight().powi(2)
}

pub fn channel_set(model: &TmrOutputModel) -> Result<PcecChannelSet> {
    let noisy = build_noisy_channel(model)?;
    let canceller = build_canceller(model)?;
    let composed_error = canceller.compose(&noisy).rotated(-model.theta_l);
    Ok(PcecChannelSet {
        noisy,
        canceller,
        composed_error,
        residual_rate: residual_rate(model),
    })
}

/// Per-trial residual at logical angle `theta_l`; `leading_only` keeps just
/// the `j = 1` term.
pub fn residual_at(params: &TmrParams, theta_l: f64, leading_only: bool) -> Result<f64> {
    let model = model_for_logical_angle(params, theta_l)?;
    Ok(if leading_only {
        leading_residual_rate(&model)
    } else {
        residual_rate(&model)
    })
}
