//! The (unnormalized) Faltings height of y² = x³ + ax + b over ℚ:
//!
//! ```text
//! H_F = λ·|Δ(a₀, b₀)| / G(τ),   G(τ) = |Δ(τ)|·(Im τ)⁶,
//! ```
//!
//! where (a₀, b₀) is the weakly minimal model, λ·Δ its minimal discriminant,
//! and τ the period ratio.  h_F = (ln H_F)/12 is the classical normalization.

use crate::error::{Error, Result};
use crate::minimality::{lambda_class, minimal_discriminant, reduce_pair, Lambda};
use crate::modfun::{self, HalfPlanePoint};
use crate::periods::{tau_of_curve, Curve};

/// Full report for one curve.
#[derive(Debug, Clone, serde::Serialize)]
pub struct HeightValue {
    pub a: i64,
    pub b: i64,
    /// Weakly minimal model (all u⁴, u⁶ content stripped).
    pub minimal_a: i64,
    pub minimal_b: i64,
    pub lambda: Lambda,
    /// Exact minimal discriminant λ·(−16)(4a₀³ + 27b₀²).
    pub min_disc: i128,
    /// Period ratio reduced to the fundamental domain.
    pub tau: HalfPlanePoint,
    /// ln H_F = ln λ + ln|Δ| − ln G.
    pub log_hf: f64,
    pub hf: f64,
    /// h_F = (ln H_F)/12.
    pub faltings: f64,
}

/// Compute the height of the curve given by any integral model.
pub fn faltings_hf(a: i64, b: i64) -> Result<HeightValue> {
    let (a0, b0, _) = reduce_pair(a, b)?;
    let (ai, bi) = (a0 as i128, b0 as i128);
    let dtil = 4 * ai * ai * ai + 27 * bi * bi;
    if dtil == 0 {
        return Err(Error::Singular(format!("({a}, {b}) has vanishing discriminant")));
    }
    let lam = lambda_class(a0, b0)?;
    let min_disc = minimal_discriminant(a0, b0)?;
    let curve = Curve::new(a0 as f64, b0 as f64)?;
    let (tau, _) = modfun::reduce_to_fundamental_domain(tau_of_curve(&curve)?)?;
    let log_g = modfun::log_g(tau)?;
    let log_abs_disc = 16f64.ln() + (dtil.unsigned_abs() as f64).ln();
    let log_hf = lam.ln() + log_abs_disc - log_g;
    Ok(HeightValue {
        a,
        b,
        minimal_a: a0,
        minimal_b: b0,
        lambda: lam,
        min_disc,
        tau,
        log_hf,
        hf: log_hf.exp(),
        faltings: log_hf / 12.0,
    })
}

/// Cross-check of the transcendental leg: G(τ) evaluated through the AGM
/// period ratio divided by G evaluated through the inverse of j on the real
/// locus.  Equals 1 up to numerical error for every nonsingular curve.
pub fn silverman_ratio(a: i64, b: i64) -> Result<f64> {
    let (a0, b0, _) = reduce_pair(a, b)?;
    let curve = Curve::new(a0 as f64, b0 as f64)?;
    let g_agm = modfun::log_g(tau_of_curve(&curve)?)?;
    let g_inv = modfun::log_g_of_real_j(curve.jinv)?;
    Ok((g_agm - g_inv).exp())
}
