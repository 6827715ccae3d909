//! Acceptance suite: end-to-end checks of every closed form, the sampler,
//! and the optimizer at fixed tolerances. Run with
//! `cargo test --release --test acceptance -- --nocapture` to see the
//! per-criterion verdict lines.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Normal};

use thzcav::montecarlo::{simulate_outage, McConfig};
use thzcav::optimizer::{self, ActiveConstraint};
use thzcav::scenario::reference_scenario;
use thzcav::stats::{self, welch_satterthwaite, BetaPrimeParams};
use thzcav::validation::run_validation;
use thzcav::{link, mobility, CorridorScenario};

struct Criterion {
    name: &'static str,
    time_limit_s: f64,
    run: fn() -> Result<String, String>,
}

/// 1. Welch-Satterthwaite reduction matches the exact first two moments.
fn c1_ws_moment_match() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
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
        let g = welch_satterthwaite(&terms).map_err(|e| e.to_string())?;
        let mean: f64 = terms.iter().map(|(b, m)| m * b).sum();
        let var: f64 = terms.iter().map(|(b, m)| m * b * b).sum();
        worst = worst
            .max((g.p / g.beta2 - mean).abs() / mean)
            .max((g.p / (g.beta2 * g.beta2) - var).abs() / var);
    }
    if worst <= 1e-12 {
        Ok(format!("max rel err {worst:.2e} <= 1e-12 over 1000 lists"))
    } else {
        Err(format!("max rel err {worst:.2e} > 1e-12"))
    }
}

/// 2. The Beta-prime SINR law matches empirical Gamma-ratio samples.
fn c2_beta_prime_vs_sampling() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let n = 1_000_000usize;
    let tol = 3.0 * 1.63 / (n as f64).sqrt();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let params = BetaPrimeParams {
            a: rng.gen_range(0.5..10.0),
            b: rng.gen_range(0.5..50.0),
            scale: 10f64.powf(rng.gen_range(-2.0..2.0)),
        };
        // Z = Y/X with Y ~ Gamma(a, beta1), X ~ Gamma(b, beta2),
        // scale = beta2/beta1; take beta1 = 1, beta2 = scale.
        let y = Gamma::new(params.a, 1.0).map_err(|e| e.to_string())?;
        let x = Gamma::new(params.b, 1.0 / params.scale).map_err(|e| e.to_string())?;
        let mut z: Vec<f64> = (0..n)
            .map(|_| y.sample(&mut rng) / x.sample(&mut rng))
            .collect();
        z.sort_by(|p, q| p.partial_cmp(q).unwrap());
        let mut ks: f64 = 0.0;
        for (i, &zi) in z.iter().enumerate() {
            let f = stats::sinr_cdf(zi, &params).map_err(|e| e.to_string())?;
            ks = ks
                .max((f - i as f64 / n as f64).abs())
                .max((f - (i + 1) as f64 / n as f64).abs());
        }
        worst = worst.max(ks);
    }
    if worst <= tol {
        Ok(format!("max KS distance {worst:.2e} <= {tol:.2e} over 20 parameter sets"))
    } else {
        Err(format!("max KS distance {worst:.2e} > {tol:.2e}"))
    }
}

/// 3. Analytic outage tracks Monte-Carlo across the density sweep, dips then
/// rises in density, and is ordered in velocity.
fn c3_outage_curves() -> Result<String, String> {
    let base = reference_scenario();
    let velocities = [10.0, 20.0, 30.0];
    let mus: Vec<f64> = (0..50).map(|i| 0.01 + 0.01 * i as f64).collect();
    let mut curves: Vec<Vec<f64>> = Vec::new();
    let mut worst_gap: f64 = 0.0;
    for (vi, &v) in velocities.iter().enumerate() {
        let mut curve = Vec::with_capacity(mus.len());
        for (i, &mu) in mus.iter().enumerate() {
            let sc = base.with_mu(mu);
            let position = link::worst_case_position(&sc).map_err(|e| e.to_string())?;
            let analytic = stats::outage_probability(&sc, position, v)
                .map_err(|e| e.to_string())?
                .p_out;
            let seed = 3000 + (vi * 100 + i) as u64;
            let est = simulate_outage(&sc, position, v, &McConfig::new(1_000_000, seed))
                .map_err(|e| e.to_string())?;
            let gap = (analytic - est.p_hat).abs();
            let tol = (3.0 * est.std_err).max(0.01);
            if gap > tol {
                return Err(format!(
                    "MC mismatch at mu={mu}, v={v}: analytic={analytic:.4e} p_hat={:.4e} gap={gap:.2e} > {tol:.2e}",
                    est.p_hat
                ));
            }
            worst_gap = worst_gap.max(gap);
            curve.push(analytic);
        }
        curves.push(curve);
    }
    // non-monotone in density: an interior minimum with real descent and ascent
    for (curve, v) in curves.iter().zip(velocities) {
        let (argmin, &min) = curve
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        if argmin == 0 || argmin == curve.len() - 1 {
            return Err(format!("outage curve at v={v} has no interior minimum"));
        }
        if curve[0] < min + 0.01 || *curve.last().unwrap() < min + 0.01 {
            return Err(format!("outage curve at v={v} lacks a clear dip"));
        }
    }
    // velocity ordering at every density
    for i in 0..mus.len() {
        if curves[0][i] > curves[1][i] + 1e-12 || curves[1][i] > curves[2][i] + 1e-12 {
            return Err(format!("velocity ordering violated at mu={}", mus[i]));
        }
    }
    Ok(format!(
        "150 points within max(0.01, 3 se) of MC (worst gap {worst_gap:.2e}); dip and ordering hold"
    ))
}

/// 4. Closed-form traffic flow matches quadrature of the headway average.
fn c4_flow_identity() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let mut p = reference_scenario().traffic;
        p.mu_ln = rng.gen_range(-1.0..1.0);
        p.sigma_ln = rng.gen_range(0.01..2.0);
        let v = rng.gen_range(1.0..40.0);
        let closed = mobility::traffic_flow(v, &p).map_err(|e| e.to_string())?;
        // Simpson quadrature of v E[1/s] in the standardized variable
        let n = 4000;
        let (lo, hi) = (-14.0f64, 14.0f64);
        let h = (hi - lo) / n as f64;
        let f = |t: f64| {
            (-(p.mu_ln + p.sigma_ln * t)).exp() * (-0.5 * t * t).exp()
                / (2.0 * std::f64::consts::PI).sqrt()
        };
        let mut acc = f(lo) + f(hi);
        for i in 1..n {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(lo + i as f64 * h);
        }
        let numeric = v * acc * h / 3.0;
        worst = worst.max((closed - numeric).abs() / closed);
    }
    if worst <= 1e-6 {
        Ok(format!("max rel err {worst:.2e} <= 1e-6 over 100 parameter draws"))
    } else {
        Err(format!("max rel err {worst:.2e} > 1e-6"))
    }
}

/// 5. The safe-speed bound: pinned value and empirical calibration.
fn c5_v_safe() -> Result<String, String> {
    let p = reference_scenario().traffic;
    let v = mobility::v_safe(&p).map_err(|e| e.to_string())?;
    let pinned = 25.650_638_290_222_18;
    if (v - pinned).abs() > 1e-6 {
        return Err(format!("v_safe={v:.12} differs from pinned {pinned:.12}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let normal = Normal::new(p.mu_ln, p.sigma_ln).map_err(|e| e.to_string())?;
    let n = 1_000_000u64;
    let stop = v * p.tau;
    let below = (0..n)
        .filter(|_| normal.sample(&mut rng).exp() <= stop)
        .count() as f64;
    let frac = below / n as f64;
    if (frac - p.epsilon).abs() <= 5e-4 {
        Ok(format!("v_safe pinned; empirical crash rate {frac:.5} in 0.02 +/- 5e-4"))
    } else {
        Err(format!("empirical crash rate {frac:.5} outside 0.02 +/- 5e-4"))
    }
}

/// 6. Inverting the outage constraint round-trips: outage at
/// (mu, V_data(mu)) equals the cap.
fn c6_outage_round_trip() -> Result<String, String> {
    let s = reference_scenario();
    let mut worst: f64 = 0.0;
    let mut feasible = 0;
    for i in 0..20 {
        let mu = 0.01 + 0.01 * i as f64;
        let Some(vd) = optimizer::v_data(mu, &s).map_err(|e| e.to_string())? else {
            continue;
        };
        feasible += 1;
        let p = stats::worst_case_outage(&s.with_mu(mu), vd)
            .map_err(|e| e.to_string())?
            .p_out;
        worst = worst.max((p - s.traffic.o_th).abs());
    }
    if feasible >= 20 && worst <= 1e-6 {
        Ok(format!("20 densities, max |outage - cap| = {worst:.2e} <= 1e-6"))
    } else {
        Err(format!(
            "feasible={feasible}/20, max |outage - cap| = {worst:.2e}"
        ))
    }
}

fn grid_best_flow(scenario: &CorridorScenario) -> Result<f64, String> {
    let traffic = &scenario.traffic;
    let v_safe = mobility::v_safe(traffic).map_err(|e| e.to_string())?;
    let mu_min = 1.0 / scenario.length;
    let n = 200;
    let mut best: f64 = 0.0;
    for i in 0..n {
        let mu = mu_min + (scenario.mu_max - mu_min) * i as f64 / (n - 1) as f64;
        let sc = scenario.with_mu(mu);
        let position = link::worst_case_position(&sc).map_err(|e| e.to_string())?;
        let geometry = link::link_geometry(&sc, position).map_err(|e| e.to_string())?;
        let params = match stats::sinr_params(&sc, &geometry) {
            Ok(p) => p,
            Err(thzcav::Error::Degenerate(_)) => continue,
            Err(e) => return Err(e.to_string()),
        };
        for j in 1..=n {
            let v = traffic.v_max * j as f64 / n as f64;
            let flow = mobility::traffic_flow(v, traffic).map_err(|e| e.to_string())?;
            if v > v_safe || flow < traffic.q_min {
                continue;
            }
            let (_, h_c_max) =
                mobility::ho_cost(mu, v, scenario.h_d).map_err(|e| e.to_string())?;
            let p_out =
                match mobility::gamma_threshold(traffic.r_th, scenario.bandwidth, h_c_max)
                    .map_err(|e| e.to_string())?
                {
                    Some(g) => stats::sinr_cdf(g, &params).map_err(|e| e.to_string())?,
                    None => 1.0,
                };
            if p_out <= traffic.o_th {
                best = best.max(flow);
            }
        }
    }
    Ok(best)
}

/// 7. The solver dominates a brute-force feasibility grid.
fn c7_optimizer_dominance() -> Result<String, String> {
    let mut report = Vec::new();
    for &o_th in &[0.05, 0.1, 0.2] {
        let mut s = reference_scenario();
        s.traffic.o_th = o_th;
        let r = optimizer::solve_p1(&s).map_err(|e| e.to_string())?;
        if r.active_constraint == ActiveConstraint::Infeasible {
            return Err(format!("unexpectedly infeasible at o_th={o_th}"));
        }
        let best = grid_best_flow(&s)?;
        if r.q_star < (1.0 - 1e-3) * best {
            return Err(format!(
                "o_th={o_th}: q_star={:.6e} below grid best {best:.6e}",
                r.q_star
            ));
        }
        report.push(format!("o_th={o_th}: q*={:.4}>=grid {best:.4}", r.q_star));
    }
    Ok(report.join("; "))
}

/// 8. Constraint-sweep trends: density relaxes and speed saturates as the
/// outage cap loosens; flow grows with the tolerated crash intensity.
fn c8_sweep_trends() -> Result<String, String> {
    let base = reference_scenario();
    let cap = base.traffic.v_max.min(mobility::v_safe(&base.traffic).map_err(|e| e.to_string())?);
    let mut prev_mu = f64::INFINITY;
    let mut prev_v = 0.0;
    let mut saturated = false;
    for i in 0..10 {
        let mut s = base.clone();
        s.traffic.o_th = 0.02 + 0.38 * i as f64 / 9.0;
        let r = optimizer::solve_p1(&s).map_err(|e| e.to_string())?;
        if r.active_constraint == ActiveConstraint::Infeasible {
            return Err(format!("infeasible at o_th={}", s.traffic.o_th));
        }
        if r.mu_star > prev_mu + 1e-4 {
            return Err(format!(
                "mu_star not nonincreasing in o_th: {prev_mu} -> {}",
                r.mu_star
            ));
        }
        if r.v_star < prev_v - 1e-9 {
            return Err(format!(
                "v_star not nondecreasing in o_th: {prev_v} -> {}",
                r.v_star
            ));
        }
        prev_mu = r.mu_star;
        prev_v = r.v_star;
        saturated |= (r.v_star - cap).abs() <= 1e-6;
    }
    if !saturated {
        return Err("v_star never reaches min(v_max, v_safe) across the o_th sweep".into());
    }
    let mut prev_q = 0.0;
    for i in 0..8 {
        let mut s = base.clone();
        s.traffic.epsilon = 0.005 + 0.095 * i as f64 / 7.0;
        let r = optimizer::solve_p1(&s).map_err(|e| e.to_string())?;
        if r.active_constraint == ActiveConstraint::Infeasible {
            return Err(format!("infeasible at epsilon={}", s.traffic.epsilon));
        }
        if r.q_star < prev_q - 1e-9 {
            return Err(format!(
                "q_star not nondecreasing in epsilon: {prev_q} -> {}",
                r.q_star
            ));
        }
        if r.q_star < s.traffic.q_min {
            return Err(format!("q_star {} below q_min", r.q_star));
        }
        prev_q = r.q_star;
    }
    Ok("mu* nonincreasing, v* nondecreasing to its cap, q* nondecreasing in epsilon".into())
}

/// 9. Reproducibility: identical validation reports for a fixed seed, and
/// Monte-Carlo estimates independent of the worker count.
fn c9_reproducibility() -> Result<String, String> {
    let s = reference_scenario();
    let render = || -> Result<String, String> {
        let results = run_validation(&s, 20_000, 7).map_err(|e| e.to_string())?;
        let mut text = String::new();
        for r in &results {
            text.push_str(&serde_json::to_string(r).map_err(|e| e.to_string())?);
            text.push('\n');
        }
        Ok(text)
    };
    if render()? != render()? {
        return Err("validation report differs between identical runs".into());
    }
    let position = link::worst_case_position(&s).map_err(|e| e.to_string())?;
    let run_with = |threads: usize| -> Result<f64, String> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| e.to_string())?;
        pool.install(|| simulate_outage(&s, position, 20.0, &McConfig::new(300_000, 11)))
            .map(|e| e.p_hat)
            .map_err(|e| e.to_string())
    };
    let single = run_with(1)?;
    let multi = run_with(3)?;
    if single != multi {
        return Err(format!(
            "p_hat depends on worker count: {single} (1 thread) vs {multi} (3 threads)"
        ));
    }
    Ok(format!("reports byte-identical; p_hat={single} for 1 and 3 workers"))
}

#[test]
fn acceptance() {
    let criteria = [
        Criterion {
            name: "Welch-Satterthwaite moment match",
            time_limit_s: 1.0,
            run: c1_ws_moment_match,
        },
        Criterion {
            name: "Beta-prime SINR law vs Gamma-ratio sampling",
            time_limit_s: 120.0,
            run: c2_beta_prime_vs_sampling,
        },
        Criterion {
            name: "outage curves vs Monte-Carlo, dip and velocity ordering",
            time_limit_s: 600.0,
            run: c3_outage_curves,
        },
        Criterion {
            name: "traffic-flow closed form vs quadrature",
            time_limit_s: 5.0,
            run: c4_flow_identity,
        },
        Criterion {
            name: "safe-speed bound pinned and calibrated",
            time_limit_s: 30.0,
            run: c5_v_safe,
        },
        Criterion {
            name: "outage-constraint inversion round trip",
            time_limit_s: 30.0,
            run: c6_outage_round_trip,
        },
        Criterion {
            name: "optimizer dominates brute-force grid",
            time_limit_s: 300.0,
            run: c7_optimizer_dominance,
        },
        Criterion {
            name: "constraint-sweep trends",
            time_limit_s: 120.0,
            run: c8_sweep_trends,
        },
        Criterion {
            name: "seeded, worker-independent reproducibility",
            time_limit_s: 120.0,
            run: c9_reproducibility,
        },
    ];
    let mut failures = Vec::new();
    for (i, c) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed().as_secs_f64();
        let timed_out = elapsed > c.time_limit_s;
        match (&outcome, timed_out) {
            (Ok(detail), false) => {
                println!("criterion {} ({}): PASS [{elapsed:.1}s] {detail}", i + 1, c.name);
            }
            (Ok(_), true) => {
                println!(
                    "criterion {} ({}): FAIL [{elapsed:.1}s] exceeded {}s budget",
                    i + 1,
                    c.name,
                    c.time_limit_s
                );
                failures.push(format!("{}: over time budget", c.name));
            }
            (Err(msg), _) => {
                println!("criterion {} ({}): FAIL [{elapsed:.1}s] {msg}", i + 1, c.name);
                failures.push(format!("{}: {msg}", c.name));
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
