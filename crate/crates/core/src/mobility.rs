//! Handoff cost, HO-aware rate, SINR threshold, the log-normal headway model,
//! and macroscopic traffic flow.

use crate::error::{Error, Result};
use crate::scenario::TrafficParams;
use crate::special::inv_erf;

/// Log-normal spacing density f_S(s).
pub fn spacing_pdf(s: f64, params: &TrafficParams) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::Domain(format!("spacing_pdf requires s > 0, got {s}")));
    }
    let sigma = params.sigma_ln;
    let z = (s.ln() - params.mu_ln) / sigma;
    Ok((-0.5 * z * z).exp() / (s * sigma * (2.0 * std::f64::consts::PI).sqrt()))
}

/// Macroscopic traffic flow Q = v exp((sigma^2 - 2 mu)/2) [CAV/s].
pub fn traffic_flow(v: f64, params: &TrafficParams) -> Result<f64> {
    if v < 0.0 {
        return Err(Error::Domain(format!("traffic_flow requires v >= 0, got {v}")));
    }
    Ok(v * ((params.sigma_ln * params.sigma_ln - 2.0 * params.mu_ln) / 2.0).exp())
}

/// Handoff delay fraction H_d = h_d mu v and its cap H_c_max = min(H_d, 1).
pub fn ho_cost(mu: f64, v: f64, h_d: f64) -> Result<(f64, f64)> {
    if mu < 0.0 || v < 0.0 || h_d < 0.0 {
        return Err(Error::Domain("ho_cost requires nonnegative inputs".into()));
    }
    let hd = h_d * mu * v;
    Ok((hd, hd.min(1.0)))
}

/// HO-aware rate M = R (1 - H_c_max).
pub fn ho_aware_rate(r: f64, h_c_max: f64) -> Result<f64> {
    if r < 0.0 {
        return Err(Error::Domain(format!("rate must be >= 0, got {r}")));
    }
    if !(0.0..=1.0).contains(&h_c_max) {
        return Err(Error::Domain(format!("H_c_max must be in [0,1], got {h_c_max}")));
    }
    Ok(r * (1.0 - h_c_max))
}

/// SINR threshold for a rate threshold under the HO cost.
///
/// `None` when H_c_max = 1: the HO cost consumes the whole connection
/// interval and no finite threshold exists (outage is certain).
pub fn gamma_threshold(r_th: f64, bandwidth: f64, h_c_max: f64) -> Result<Option<f64>> {
    if !(bandwidth > 0.0) {
        return Err(Error::Domain("bandwidth must be > 0".into()));
    }
    if !(0.0..=1.0).contains(&h_c_max) {
        return Err(Error::Domain(format!("H_c_max must be in [0,1], got {h_c_max}")));
    }
    if r_th < 0.0 {
        return Err(Error::Domain("r_th must be >= 0".into()));
    }
    if h_c_max >= 1.0 {
        return Ok(None);
    }
    Ok(Some(
        (r_th / (bandwidth * (1.0 - h_c_max)) * std::f64::consts::LN_2).exp_m1(),
    ))
}

/// Collision-avoidance speed bound: Pr(s <= v tau) = epsilon under the
/// log-normal spacing law.
pub fn v_safe(params: &TrafficParams) -> Result<f64> {
    let z = inv_erf(2.0 * params.epsilon - 1.0)?;
    Ok((params.sigma_ln * std::f64::consts::SQRT_2 * z + params.mu_ln).exp() / params.tau)
}

/// Minimum-flow speed bound: traffic_flow(v_flow) = Q_min exactly.
pub fn v_flow(params: &TrafficParams) -> Result<f64> {
    Ok(params.q_min
        / ((params.sigma_ln * params.sigma_ln - 2.0 * params.mu_ln) / 2.0).exp())
}
