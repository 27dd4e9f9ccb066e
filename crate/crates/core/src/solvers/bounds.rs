//! Closed-form convergence bounds and iteration-count predictors.
//!
//! Notation: `σ_min` is the smallest nonzero singular value, `‖A‖_F` the
//! Frobenius norm, `a²_min`/`a²_max` the extreme squared row norms and
//! `e = A A†b − b`.

use crate::error::{Error, Result};
use crate::linalg::norm_sq;
use crate::oracle::GroundTruth;

/// Expected squared error bound for relaxed RK with stepsize `λ ∈ (0, 1)`
/// after `k` iterations from a start in `Range(Aᵀ)`:
///
/// `(1 − 2λ(1−λ) σ²_min/‖A‖²_F)^k · ‖x⁰ − A†b‖² + λ a²_max ‖e‖² / ((1−λ) a²_min σ²_min)`
pub fn rk_error_bound(k: u64, lambda: f64, gt: &GroundTruth, x0_err_sq: f64) -> Result<f64> {
    let horizon = rk_horizon(lambda, gt)?;
    let rate = 1.0 - 2.0 * lambda * (1.0 - lambda) * gt.sigma_min.powi(2) / gt.frob_sq();
    Ok(powu(rate, k) * x0_err_sq + horizon)
}

/// The additive convergence-horizon term of [`rk_error_bound`].
pub fn rk_horizon(lambda: f64, gt: &GroundTruth) -> Result<f64> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "the RK error bound needs a stepsize in (0, 1), got {lambda}"
        )));
    }
    Ok(lambda * gt.a_max_sq * norm_sq(&gt.e) / ((1.0 - lambda) * gt.a_min_sq * gt.sigma_min.powi(2)))
}

/// Per-iteration contraction of `E‖Ax^k − A A†b‖²` under RKAS:
/// `1 − σ⁴_min / (‖A‖²₂ ‖A‖²_F)`.
pub fn rkas_contraction_factor(gt: &GroundTruth) -> f64 {
    1.0 - gt.sigma_min.powi(4) / (gt.sigma_max.powi(2) * gt.frob_sq())
}

/// Bound on `E‖Ax^k − A A†b‖²` after `k` RKAS iterations, given
/// `eps1 = ‖Ax⁰ − A A†b‖²`.
pub fn rkas_residual_bound(k: u64, gt: &GroundTruth, eps1: f64) -> f64 {
    powu(rkas_contraction_factor(gt), k) * eps1
}

/// Bound on `E‖x^k − A†b‖²` after `k` RKAS iterations from `x⁰ = 0`.
pub fn rkas_error_bound(k: u64, gt: &GroundTruth, eps1: f64) -> f64 {
    rkas_residual_bound(k, gt, eps1) / gt.sigma_min.powi(2)
}

/// Iteration budget and stepsize for relaxed RK to reach
/// `E‖x^k − A†b‖² ≤ ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RkPrediction {
    pub iters: u64,
    pub lambda: f64,
}

/// `k = 2 log(2ε₀/ε) (‖A‖²_F/σ²_min + ‖A‖²_F ‖e‖² a²_max / (ε σ⁴_min a²_min))`
/// with `λ = ε σ²_min a²_min / (2 ε σ²_min a²_min + 2 ‖e‖² a²_max)` and
/// `ε₀ = ‖x⁰ − A†b‖²`.
pub fn predict_iters_rk(eps: f64, eps0: f64, gt: &GroundTruth) -> Result<RkPrediction> {
    check_positive("eps", eps)?;
    check_positive("eps0", eps0)?;
    let s2 = gt.sigma_min.powi(2);
    let e2 = norm_sq(&gt.e);
    let f2 = gt.frob_sq();
    let lambda = eps * s2 * gt.a_min_sq / (2.0 * eps * s2 * gt.a_min_sq + 2.0 * e2 * gt.a_max_sq);
    let raw = 2.0 * (2.0 * eps0 / eps).ln() * (f2 / s2 + f2 * e2 * gt.a_max_sq / (eps * s2 * s2 * gt.a_min_sq));
    Ok(RkPrediction {
        iters: ceil_count(raw),
        lambda,
    })
}

/// `k = log(ε₁ / (ε σ²_min)) · ‖A‖²_F ‖A‖²₂ / σ⁴_min` with
/// `ε₁ = ‖Ax⁰ − A A†b‖²`; zero when the log argument is at most one.
pub fn predict_iters_rkas(eps: f64, eps1: f64, gt: &GroundTruth) -> Result<u64> {
    check_positive("eps", eps)?;
    check_positive("eps1", eps1)?;
    let arg = eps1 / (eps * gt.sigma_min.powi(2));
    if arg <= 1.0 {
        return Ok(0);
    }
    let raw = arg.ln() * gt.frob_sq() * gt.sigma_max.powi(2) / gt.sigma_min.powi(4);
    Ok(ceil_count(raw))
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

/// Ceiling, except that values within rounding noise of an integer snap to
/// it (so `ln(e) · n` gives `n`, not `n + 1`).
fn ceil_count(raw: f64) -> u64 {
    if !(raw > 0.0) {
        return 0;
    }
    let nearest = raw.round();
    if (raw - nearest).abs() <= 1e-9 * raw.max(1.0) {
        nearest as u64
    } else {
        raw.ceil() as u64
    }
}

fn powu(base: f64, k: u64) -> f64 {
    match i32::try_from(k) {
        Ok(k) => base.powi(k),
        Err(_) => base.powf(k as f64),
    }
}
