//! One-shot validation suite: cross-checks every closed form against its
//! independent oracle on a given scenario. Backs the CLI `validate` command.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::link;
use crate::mobility;
use crate::montecarlo::{simulate_outage, McConfig};
use crate::scenario::CorridorScenario;
use crate::special::inv_erf;
use crate::stats::{self, welch_satterthwaite, BetaPrimeParams};
use crate::{optimizer, TrafficParams};

/// Verdict for one validation check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub status: String,
    pub detail: String,
}

impl CheckResult {
    fn new(check: &str, pass: bool, detail: String) -> Self {
        Self {
            check: check.to_string(),
            status: if pass { "pass" } else { "fail" }.to_string(),
            detail,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == "pass"
    }
}

/// Moment match of the Welch-Satterthwaite reduction over random term lists.
fn check_ws_moment_match(rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=50);
        let terms: Vec<(f64, f64)> = (0..n)
            .map(|_| {
                (
                    10f64.powf(rng.gen_range(-6.0..3.0)),
                    rng.gen_range(0.5..10.0),
                )
            })
            .collect();
        let g = welch_satterthwaite(&terms)?;
        let mean: f64 = terms.iter().map(|(b, m)| m * b).sum();
        let var: f64 = terms.iter().map(|(b, m)| m * b * b).sum();
        worst = worst
            .max((g.p / g.beta2 - mean).abs() / mean)
            .max((g.p / (g.beta2 * g.beta2) - var).abs() / var);
    }
    Ok(CheckResult::new(
        "ws_moment_match",
        worst <= 1e-12,
        format!("max_rel_err={worst:.3e} tol=1.0e-12"),
    ))
}

/// Closed-form traffic flow vs numeric integration of the headway average.
fn check_flow_identity(rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let mu_ln = rng.gen_range(-1.0..1.0);
        let sigma_ln = rng.gen_range(0.01..2.0);
        let v = rng.gen_range(1.0..40.0);
        let p = TrafficParams {
            mu_ln,
            sigma_ln,
            ..crate::scenario::reference_scenario().traffic
        };
        let closed = mobility::traffic_flow(v, &p)?;
        let numeric = v * quad_mean_inverse_spacing(&p);
        worst = worst.max((closed - numeric).abs() / closed);
    }
    Ok(CheckResult::new(
        "flow_identity",
        worst <= 1e-6,
        format!("max_rel_err={worst:.3e} tol=1.0e-6"),
    ))
}

/// E[1/s] under the log-normal spacing law by Simpson quadrature in the
/// standardized variable.
fn quad_mean_inverse_spacing(p: &TrafficParams) -> f64 {
    let n = 4000;
    let (lo, hi) = (-14.0f64, 14.0f64);
    let h = (hi - lo) / n as f64;
    let phi = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let f = |t: f64| (-(p.mu_ln + p.sigma_ln * t)).exp() * phi(t);
    let mut acc = f(lo) + f(hi);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + i as f64 * h);
    }
    acc * h / 3.0
}

/// The safe-speed bound hits its chance-constraint definition empirically.
fn check_v_safe_calibration(
    params: &TrafficParams,
    trials: u64,
    rng: &mut ChaCha8Rng,
) -> Result<CheckResult> {
    let v = mobility::v_safe(params)?;
    let stop = v * params.tau;
    let mut below = 0u64;
    for _ in 0..trials {
        let t: f64 = rng.gen();
        // inverse-transform log-normal draw
        let z = inv_erf(2.0 * t.clamp(1e-15, 1.0 - 1e-15) - 1.0)? * std::f64::consts::SQRT_2;
        let s = (params.mu_ln + params.sigma_ln * z).exp();
        if s <= stop {
            below += 1;
        }
    }
    let frac = below as f64 / trials as f64;
    let eps = params.epsilon;
    let band = 3.0 * (eps * (1.0 - eps) / trials as f64).sqrt();
    Ok(CheckResult::new(
        "v_safe_calibration",
        (frac - eps).abs() <= band,
        format!("v_safe={v:.6e} empirical={frac:.6e} target={eps:.6e} band={band:.3e}"),
    ))
}

/// The closed-form SINR CDF matches quadrature of the PDF.
fn check_betaprime_cdf_oracle() -> Result<CheckResult> {
    let cases = [
        BetaPrimeParams { a: 1.0, b: 1.0, scale: 1.0 },
        BetaPrimeParams { a: 2.0, b: 3.7, scale: 0.4 },
        BetaPrimeParams { a: 2.0, b: 40.0, scale: 3.0 },
    ];
    let mut worst: f64 = 0.0;
    for p in &cases {
        for &z in &[0.1, 0.8, 3.0] {
            // midpoint quadrature through the bounded substitution t = z/(z+scale)
            let t_hi = z / (z + p.scale);
            let n = 200_000;
            let h = t_hi / n as f64;
            let mut total = 0.0;
            for i in 0..n {
                let t = (i as f64 + 0.5) * h;
                let zz = p.scale * t / (1.0 - t);
                let jac = p.scale / ((1.0 - t) * (1.0 - t));
                total += stats::sinr_pdf(zz, p)? * jac * h;
            }
            worst = worst.max((total - stats::sinr_cdf(z, p)?).abs());
        }
    }
    Ok(CheckResult::new(
        "betaprime_cdf_oracle",
        worst <= 1e-8,
        format!("max_abs_err={worst:.3e} tol=1.0e-8"),
    ))
}

/// Analytic worst-case outage vs the Monte-Carlo estimate.
fn check_mc_agreement(
    scenario: &CorridorScenario,
    velocity: f64,
    trials: u64,
    seed: u64,
) -> Result<CheckResult> {
    let position = link::worst_case_position(scenario)?;
    let analytic = stats::outage_probability(scenario, position, velocity)?.p_out;
    let est = simulate_outage(scenario, position, velocity, &McConfig::new(trials, seed))?;
    let gap = (analytic - est.p_hat).abs();
    let tol = (3.0 * est.std_err).max(0.01);
    Ok(CheckResult::new(
        "mc_agreement",
        gap <= tol,
        format!(
            "analytic={analytic:.6e} p_hat={:.6e} std_err={:.3e} gap={gap:.3e} tol={tol:.3e} trials={trials} seed={seed}",
            est.p_hat, est.std_err
        ),
    ))
}

/// Solver result dominates a brute-force feasibility grid.
fn check_optimizer_dominance(scenario: &CorridorScenario) -> Result<CheckResult> {
    let r = optimizer::solve_p1(scenario)?;
    if r.active_constraint == optimizer::ActiveConstraint::Infeasible {
        return Ok(CheckResult::new(
            "optimizer_dominance",
            false,
            "problem infeasible under this scenario".to_string(),
        ));
    }
    let v_safe = r.v_safe;
    let traffic = &scenario.traffic;
    let mu_min = 1.0 / scenario.length;
    let n = 100;
    let mut best_q: f64 = 0.0;
    for i in 0..n {
        let mu = mu_min + (scenario.mu_max - mu_min) * i as f64 / (n - 1) as f64;
        let sc = scenario.with_mu(mu);
        let position = link::worst_case_position(&sc)?;
        let geometry = link::link_geometry(&sc, position)?;
        let params = match stats::sinr_params(&sc, &geometry) {
            Ok(p) => p,
            Err(crate::Error::Degenerate(_)) => continue,
            Err(e) => return Err(e),
        };
        for j in 1..=n {
            let v = traffic.v_max * j as f64 / n as f64;
            if v > v_safe || mobility::traffic_flow(v, traffic)? < traffic.q_min {
                continue;
            }
            let (_, h_c_max) = mobility::ho_cost(mu, v, scenario.h_d)?;
            let p_out = match mobility::gamma_threshold(traffic.r_th, scenario.bandwidth, h_c_max)? {
                Some(g) => stats::sinr_cdf(g, &params)?,
                None => 1.0,
            };
            if p_out <= traffic.o_th {
                best_q = best_q.max(mobility::traffic_flow(v, traffic)?);
            }
        }
    }
    let pass = r.q_star >= (1.0 - 1e-3) * best_q;
    Ok(CheckResult::new(
        "optimizer_dominance",
        pass,
        format!("q_star={:.6e} grid_best={best_q:.6e} slack=1.0e-3", r.q_star),
    ))
}

/// Round trip: the outage at (mu, V_data(mu)) reproduces the outage cap.
fn check_outage_round_trip(scenario: &CorridorScenario) -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    let mut feasible = 0;
    for i in 0..20 {
        let mu = 0.01 + 0.015 * i as f64;
        let Some(vd) = optimizer::v_data(mu, scenario)? else {
            continue;
        };
        feasible += 1;
        let p = stats::worst_case_outage(&scenario.with_mu(mu), vd)?.p_out;
        worst = worst.max((p - scenario.traffic.o_th).abs());
    }
    Ok(CheckResult::new(
        "outage_round_trip",
        feasible > 0 && worst <= 1e-6,
        format!("feasible_densities={feasible} max_abs_err={worst:.3e} tol=1.0e-6"),
    ))
}

/// Run the full validation suite. Deterministic for a fixed seed.
pub fn run_validation(
    scenario: &CorridorScenario,
    trials: u64,
    seed: u64,
) -> Result<Vec<CheckResult>> {
    scenario.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(vec![
        check_ws_moment_match(&mut rng)?,
        check_flow_identity(&mut rng)?,
        check_v_safe_calibration(&scenario.traffic, trials, &mut rng)?,
        check_betaprime_cdf_oracle()?,
        check_mc_agreement(scenario, 20.0, trials, seed)?,
        check_outage_round_trip(scenario)?,
        check_optimizer_dominance(scenario)?,
    ])
}
