//! Traffic-flow maximization over TBS density and CAV speed.
//!
//! The objective grows linearly in v, so the problem reduces to maximizing
//! the outage-limited speed V_data over the density, then clamping by the
//! safety, flow, and speed-cap constraints.

use crate::error::{Error, Result};
use crate::link;
use crate::mobility;
use crate::scenario::CorridorScenario;
use crate::special::inv_reg_inc_beta;
use crate::stats;

/// Which constraint fixes the optimal speed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActiveConstraint {
    /// v* = V_data: the outage cap binds.
    Data,
    /// v* = V_safe: collision avoidance binds.
    Safe,
    /// v* = V_max: the speed limit binds.
    Max,
    /// No admissible speed exists.
    Infeasible,
}

impl std::fmt::Display for ActiveConstraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::Data => "data",
            Self::Safe => "safe",
            Self::Max => "max",
            Self::Infeasible => "infeasible",
        };
        f.write_str(s)
    }
}

/// Solution of the flow-maximization problem.
#[derive(Debug, Clone)]
pub struct OptimizationResult {
    pub mu_star: f64,
    pub v_star: f64,
    pub q_star: f64,
    pub v_data: Option<f64>,
    pub v_safe: f64,
    pub v_flow: f64,
    pub v_max: f64,
    pub active_constraint: ActiveConstraint,
    /// Why the problem is infeasible, when it is.
    pub reason: Option<String>,
    /// (mu, V_data) evaluations from the density search; sentinel -1 marks
    /// densities where the outage cap is unachievable at any speed.
    pub search_trace: Vec<(f64, f64)>,
}

/// Outage-limited speed V_data at density mu, from the inverted worst-case
/// outage constraint. Velocity-independent inputs only: the worst-case
/// geometry and the (p, beta2) reduction depend on distances alone.
///
/// `None` means the outage cap cannot be met at any speed for this density.
pub fn v_data(mu: f64, scenario: &CorridorScenario) -> Result<Option<f64>> {
    if !(mu > 0.0) {
        return Err(Error::Domain(format!("v_data requires mu > 0, got {mu}")));
    }
    let sc = scenario.with_mu(mu);
    let position = link::worst_case_position(&sc)?;
    let geometry = link::link_geometry(&sc, position)?;
    let params = stats::sinr_params(&sc, &geometry)?;
    let o_th = scenario.traffic.o_th;
    let a = inv_reg_inc_beta(o_th, params.a, params.b)?;
    let ho_limit = 1.0 / (scenario.h_d * mu);
    if a >= 1.0 {
        // outage cap trivially satisfied; only the HO saturation bounds v
        return Ok(Some(ho_limit));
    }
    let gamma = params.scale * a / (1.0 - a);
    let log_term = gamma.ln_1p() / std::f64::consts::LN_2;
    if log_term <= 0.0 {
        return Ok(None);
    }
    let margin = 1.0 - scenario.traffic.r_th / (scenario.bandwidth * log_term);
    if margin <= 0.0 {
        return Ok(None);
    }
    Ok(Some(margin * ho_limit))
}

/// V_data at mu, with degenerate-denominator densities treated as infeasible.
fn v_data_or_infeasible(mu: f64, scenario: &CorridorScenario) -> Result<Option<f64>> {
    match v_data(mu, scenario) {
        Ok(v) => Ok(v),
        Err(Error::Degenerate(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

const GRID_POINTS: usize = 256;
const MU_TOLERANCE: f64 = 1e-6;

/// Maximize V_data over (0, mu_max]: coarse grid scan to bracket the best
/// basin, then golden-section refinement. Returns the best (mu, V_data) pair
/// and the full evaluation trace.
pub fn optimize_density(
    scenario: &CorridorScenario,
) -> Result<(f64, f64, Vec<(f64, f64)>)> {
    if !(scenario.mu_max > 0.0) {
        return Err(Error::Domain("mu_max must be > 0".into()));
    }
    // smallest density that still puts one TBS on the corridor
    let mu_min = 1.0 / scenario.length;
    if mu_min > scenario.mu_max {
        return Err(Error::Infeasible(
            "C5 infeasible: mu_max admits no TBS on the corridor".into(),
        ));
    }
    let mut trace = Vec::with_capacity(GRID_POINTS);
    let mut best: Option<(f64, f64)> = None;
    let step = (scenario.mu_max - mu_min) / (GRID_POINTS - 1) as f64;
    for i in 0..GRID_POINTS {
        let mu = mu_min + step * i as f64;
        let v = v_data_or_infeasible(mu, scenario)?;
        trace.push((mu, v.unwrap_or(-1.0)));
        if let Some(v) = v {
            if best.map_or(true, |(_, bv)| v > bv) {
                best = Some((mu, v));
            }
        }
    }
    let Some((grid_mu, grid_v)) = best else {
        return Err(Error::Infeasible(
            "C3 infeasible: outage cap unachievable at every density".into(),
        ));
    };
    // golden-section refinement inside the bracketing grid interval
    let mut lo = (grid_mu - step).max(mu_min);
    let mut hi = (grid_mu + step).min(scenario.mu_max);
    let mut best_mu = grid_mu;
    let mut best_v = grid_v;
    let inv_phi = 0.618_033_988_749_894_9_f64;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let eval = |mu: f64, trace: &mut Vec<(f64, f64)>| -> Result<f64> {
        let v = v_data_or_infeasible(mu, scenario)?;
        trace.push((mu, v.unwrap_or(-1.0)));
        Ok(v.unwrap_or(f64::NEG_INFINITY))
    };
    let mut f1 = eval(x1, &mut trace)?;
    let mut f2 = eval(x2, &mut trace)?;
    while hi - lo > MU_TOLERANCE {
        if f1 > f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = eval(x1, &mut trace)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = eval(x2, &mut trace)?;
        }
        let (x, f) = if f1 > f2 { (x1, f1) } else { (x2, f2) };
        if f > best_v {
            best_mu = x;
            best_v = f;
        }
    }
    Ok((best_mu, best_v, trace))
}

/// Case selection for the optimal speed: the continuous completion of the
/// two-case rule v* = min(V_data, V_max, V_safe) when that value clears
/// V_flow; otherwise infeasible.
pub fn optimal_velocity(
    v_data: Option<f64>,
    v_safe: f64,
    v_flow: f64,
    v_max: f64,
) -> (f64, ActiveConstraint) {
    let Some(vd) = v_data else {
        return (0.0, ActiveConstraint::Infeasible);
    };
    let cap = v_max.min(v_safe);
    let v = vd.min(cap);
    if v < v_flow || v <= 0.0 {
        return (0.0, ActiveConstraint::Infeasible);
    }
    let label = if vd <= cap {
        ActiveConstraint::Data
    } else if v_safe <= v_max {
        ActiveConstraint::Safe
    } else {
        ActiveConstraint::Max
    };
    (v, label)
}

/// Solve the full flow-maximization problem and re-check every constraint on
/// the returned point.
pub fn solve_p1(scenario: &CorridorScenario) -> Result<OptimizationResult> {
    scenario.validate()?;
    let traffic = &scenario.traffic;
    let v_safe = mobility::v_safe(traffic)?;
    let v_flow = mobility::v_flow(traffic)?;
    let v_max = traffic.v_max;

    let (mu_star, vd, trace) = match optimize_density(scenario) {
        Ok(res) => res,
        Err(Error::Infeasible(reason)) => {
            return Ok(OptimizationResult {
                mu_star: 0.0,
                v_star: 0.0,
                q_star: 0.0,
                v_data: None,
                v_safe,
                v_flow,
                v_max,
                active_constraint: ActiveConstraint::Infeasible,
                reason: Some(reason),
                search_trace: Vec::new(),
            })
        }
        Err(e) => return Err(e),
    };
    let (v_star, active) = optimal_velocity(Some(vd), v_safe, v_flow, v_max);
    if active == ActiveConstraint::Infeasible {
        let reason = if vd.min(v_max.min(v_safe)) < v_flow {
            "C2 infeasible: minimum flow exceeds the achievable speed".to_string()
        } else {
            "no admissible speed".to_string()
        };
        return Ok(OptimizationResult {
            mu_star,
            v_star: 0.0,
            q_star: 0.0,
            v_data: Some(vd),
            v_safe,
            v_flow,
            v_max,
            active_constraint: ActiveConstraint::Infeasible,
            reason: Some(reason),
            search_trace: trace,
        });
    }
    let q_star = mobility::traffic_flow(v_star, traffic)?;

    // defense-in-depth: re-evaluate every constraint at the returned point
    const TOL: f64 = 1e-9;
    let outage = stats::worst_case_outage(&scenario.with_mu(mu_star), v_star)?;
    let checks = [
        (v_star <= v_safe + TOL, "C1"),
        (v_star >= v_flow - TOL, "C2"),
        (outage.p_out <= traffic.o_th + TOL, "C3"),
        (v_star > 0.0 && v_star <= v_max + TOL, "C4"),
        (mu_star >= 0.0 && mu_star <= scenario.mu_max + TOL, "C5"),
    ];
    for (ok, name) in checks {
        if !ok {
            return Err(Error::Validation(format!(
                "solver postcondition failed: {name} violated at (mu*={mu_star}, v*={v_star})"
            )));
        }
    }
    Ok(OptimizationResult {
        mu_star,
        v_star,
        q_star,
        v_data: Some(vd),
        v_safe,
        v_flow,
        v_max,
        active_constraint: active,
        reason: None,
        search_trace: trace,
    })
}
