//! Signal and interference statistics: the Welch-Satterthwaite single-Gamma
//! reduction of the interference-plus-absorption-noise sum, the generalized
//! Beta-prime SINR law, and the closed-form outage probability.

use crate::error::{Error, Result};
use crate::link::{self, LinkGeometry};
use crate::mobility;
use crate::montecarlo::McEstimate;
use crate::scenario::CorridorScenario;
use crate::special::{log_beta, reg_inc_beta};

/// A Gamma random variable in shape/rate convention:
/// f(x) = rate^shape x^(shape-1) e^(-rate x) / Gamma(shape).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaRV {
    pub shape: f64,
    pub rate: f64,
}

/// Single-Gamma moment match for a weighted sum of independent Gammas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaApprox {
    /// Effective shape p.
    pub p: f64,
    /// Effective rate beta2.
    pub beta2: f64,
    /// Exact mean of the sum, matched by p / beta2.
    pub mean: f64,
    /// Exact variance of the sum, matched by p / beta2^2.
    pub variance: f64,
}

/// Parameters of the SINR ratio law Z = Y/X for Y ~ Gamma(a, beta1),
/// X ~ Gamma(b, beta2): a generalized Beta-prime with scale beta2/beta1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaPrimeParams {
    /// Numerator shape (serving-link fading parameter).
    pub a: f64,
    /// Denominator shape (effective interference shape).
    pub b: f64,
    /// Scale beta2 / beta1.
    pub scale: f64,
}

impl BetaPrimeParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.b > 0.0 && self.scale > 0.0) {
            return Err(Error::Validation(format!(
                "Beta-prime parameters must be positive: a={}, b={}, scale={}",
                self.a, self.b, self.scale
            )));
        }
        Ok(())
    }
}

/// Moment-match a weighted Gamma sum sum_k Gamma(m_k, scale bbar_k) by a
/// single Gamma(p, beta2). Terms are (bbar, m) pairs with bbar = b/m, so each
/// term has mean m bbar and variance m bbar^2.
pub fn welch_satterthwaite(terms: &[(f64, f64)]) -> Result<GammaApprox> {
    if terms.is_empty() {
        return Err(Error::Domain(
            "no interference terms; use exact single-Gamma path".into(),
        ));
    }
    let mut mean = 0.0;
    let mut variance = 0.0;
    for &(bbar, m) in terms {
        if !(bbar > 0.0) || !(m > 0.0) {
            return Err(Error::Domain(format!(
                "welch_satterthwaite requires positive terms, got (bbar={bbar}, m={m})"
            )));
        }
        mean += m * bbar;
        variance += m * bbar * bbar;
    }
    Ok(GammaApprox {
        p: mean * mean / variance,
        beta2: mean / variance,
        mean,
        variance,
    })
}

/// CDF of the SINR law: F_Z(z) = I(z / (z + scale), a, b).
pub fn sinr_cdf(z: f64, params: &BetaPrimeParams) -> Result<f64> {
    params.validate()?;
    if z < 0.0 || z.is_nan() {
        return Err(Error::Domain(format!("sinr_cdf requires z >= 0, got {z}")));
    }
    if z.is_infinite() {
        // e.g. an overflowed SINR threshold near handoff saturation
        return Ok(1.0);
    }
    reg_inc_beta(z / (z + params.scale), params.a, params.b)
}

/// PDF of the SINR law, evaluated in log space.
pub fn sinr_pdf(z: f64, params: &BetaPrimeParams) -> Result<f64> {
    params.validate()?;
    if z < 0.0 || (z == 0.0 && params.a < 1.0) {
        return Err(Error::Domain(format!(
            "sinr_pdf requires z > 0 (z >= 0 when a >= 1), got {z}"
        )));
    }
    if z == 0.0 {
        return Ok(if params.a > 1.0 {
            0.0
        } else {
            // a == 1: density at the origin is 1 / (scale B(1, b))
            (-params.scale.ln() - log_beta(1.0, params.b)?).exp()
        });
    }
    let t = z / params.scale;
    let ln_f = (params.a - 1.0) * t.ln() - (params.a + params.b) * t.ln_1p()
        - params.scale.ln()
        - log_beta(params.a, params.b)?;
    Ok(ln_f.exp())
}

/// Closed-form HO-aware rate outage.
#[derive(Debug, Clone)]
pub struct OutageResult {
    /// SINR threshold; `None` when the HO cost saturates (no transmission).
    pub gamma_th: Option<f64>,
    /// SINR distribution parameters, when the analytic path applies.
    pub beta_prime: Option<BetaPrimeParams>,
    /// Analytical outage probability.
    pub p_out: f64,
    /// Optional Monte-Carlo estimate, filled by callers that run one.
    pub mc: Option<McEstimate>,
}

/// Denominator terms (bbar, m) for the Welch-Satterthwaite reduction:
/// one per interferer plus the serving-link absorption-noise term.
/// Zero-power terms are dropped.
pub fn denominator_terms(
    scenario: &CorridorScenario,
    geometry: &LinkGeometry,
) -> Result<Vec<(f64, f64)>> {
    let mut terms = Vec::with_capacity(geometry.interferer_distances.len() + 1);
    for &d in &geometry.interferer_distances {
        let b = link::interference_coefficient(scenario, d)?;
        if b > 0.0 {
            terms.push((b / scenario.m_interferer, scenario.m_interferer));
        }
    }
    let b_abs = link::absorption_noise_coefficient(scenario, geometry.serving_distance)?;
    if b_abs > 0.0 {
        terms.push((b_abs / scenario.m_serving, scenario.m_serving));
    }
    Ok(terms)
}

/// SINR distribution parameters for a CAV at the given geometry.
pub fn sinr_params(
    scenario: &CorridorScenario,
    geometry: &LinkGeometry,
) -> Result<BetaPrimeParams> {
    let a = link::mean_signal_power(scenario, geometry.serving_distance)?;
    let beta1 = scenario.m_serving / a;
    let terms = denominator_terms(scenario, geometry)?;
    if terms.is_empty() {
        return Err(Error::Degenerate(
            "no interference or absorption-noise mass in the SINR denominator".into(),
        ));
    }
    let ws = welch_satterthwaite(&terms)?;
    Ok(BetaPrimeParams {
        a: scenario.m_serving,
        b: ws.p,
        scale: ws.beta2 / beta1,
    })
}

/// Analytical HO-aware rate outage for a CAV at `cav_position` moving at
/// `velocity`.
pub fn outage_probability(
    scenario: &CorridorScenario,
    cav_position: f64,
    velocity: f64,
) -> Result<OutageResult> {
    if velocity < 0.0 {
        return Err(Error::Domain(format!("velocity must be >= 0, got {velocity}")));
    }
    let (_, h_c_max) = mobility::ho_cost(scenario.mu, velocity, scenario.h_d)?;
    let gamma_th =
        mobility::gamma_threshold(scenario.traffic.r_th, scenario.bandwidth, h_c_max)?;
    let Some(gth) = gamma_th else {
        // HO cost saturates: no transmission, certain outage
        return Ok(OutageResult {
            gamma_th: None,
            beta_prime: None,
            p_out: 1.0,
            mc: None,
        });
    };
    let geometry = link::link_geometry(scenario, cav_position)?;
    let params = sinr_params(scenario, &geometry)?;
    let p_out = sinr_cdf(gth, &params)?;
    Ok(OutageResult {
        gamma_th: Some(gth),
        beta_prime: Some(params),
        p_out,
        mc: None,
    })
}

/// Outage with the CAV at the worst-case position: the midpoint of the
/// central cell, where path loss is maximal and interferer rings symmetric.
pub fn worst_case_outage(scenario: &CorridorScenario, velocity: f64) -> Result<OutageResult> {
    let position = link::worst_case_position(scenario)?;
    outage_probability(scenario, position, velocity)
}
