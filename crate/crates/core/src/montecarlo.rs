//! Stochastic oracle: empirical outage and SINR distributions under the same
//! corridor model, used to validate the closed-form expressions.
//!
//! Trials are partitioned into fixed-size blocks; each block owns a private
//! counter-mode RNG stream derived from (seed, block index), so estimates are
//! bit-identical across runs and independent of the degree of parallelism.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::link;
use crate::mobility;
use crate::scenario::CorridorScenario;
use crate::special::{inv_reg_inc_gamma, reg_inc_gamma};
use crate::stats::GammaApprox;

const BLOCK_SIZE: u64 = 1 << 14;

/// Monte-Carlo run configuration.
#[derive(Debug, Clone)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    /// Add the thermal-noise power sigma2 to the SINR denominator.
    pub include_thermal_noise: bool,
    /// Reuse the serving-link fading draw for the absorption-noise term.
    /// The analytic law treats the two as independent, so validation runs
    /// keep this off.
    pub shared_serving_fade: bool,
    /// Antithetic pairing of fading draws (inverse-transform sampling).
    pub antithetic: bool,
}

impl McConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            include_thermal_noise: false,
            shared_serving_fade: false,
            antithetic: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::Validation("trials must be >= 1".into()));
        }
        Ok(())
    }
}

/// Empirical probability estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub p_hat: f64,
    pub std_err: f64,
    pub trials: u64,
    pub seed: u64,
}

impl McEstimate {
    fn from_count(count: u64, trials: u64, seed: u64) -> Self {
        let p_hat = count as f64 / trials as f64;
        Self {
            p_hat,
            std_err: (p_hat * (1.0 - p_hat) / trials as f64).sqrt(),
            trials,
            seed,
        }
    }
}

/// One JSON-lines record of a validation run; field names are fixed for the
/// report generator.
#[derive(Debug, Clone, Serialize)]
pub struct McRecord {
    pub seed: u64,
    pub trials: u64,
    pub p_hat: f64,
    pub std_err: f64,
    pub analytic: f64,
    pub gap: f64,
}

fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block.wrapping_add(1));
    rng
}

/// Fading-power sampler: Gamma(shape m, rate m), unit mean.
///
/// Draws come from the library's rejection sampler (valid for shape >= 0.5
/// with the boost transform below 1); antithetic mode switches to
/// inverse-transform sampling so mirrored uniforms produce mirrored draws.
#[derive(Debug, Clone, Copy)]
struct NakagamiPower {
    m: f64,
    dist: Gamma<f64>,
}

impl NakagamiPower {
    fn new(m: f64) -> Result<Self> {
        if !(m >= 0.5) {
            return Err(Error::Domain(format!(
                "Nakagami shape must be >= 0.5, got {m}"
            )));
        }
        let dist = Gamma::new(m, 1.0 / m)
            .map_err(|e| Error::Domain(format!("gamma sampler: {e}")))?;
        Ok(Self { m, dist })
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        self.dist.sample(rng)
    }

    fn from_uniform(&self, u: f64) -> f64 {
        // clamp away from the endpoints so the inverse stays finite
        let u = u.clamp(1e-15, 1.0 - 1e-15);
        inv_reg_inc_gamma(u, self.m).expect("in-domain inverse gamma") / self.m
    }
}

/// One draw from the unit-mean Nakagami power law Gamma(m, rate m).
pub fn sample_nakagami_power(m: f64, rng: &mut ChaCha8Rng) -> Result<f64> {
    Ok(NakagamiPower::new(m)?.sample(rng))
}

struct OutageModel {
    a: f64,
    b_interferers: Vec<f64>,
    b_abs: f64,
    sigma2: f64,
    h_c_max: f64,
    bandwidth: f64,
    r_th: f64,
    serving: NakagamiPower,
    interferer: NakagamiPower,
}

impl OutageModel {
    fn build(
        scenario: &CorridorScenario,
        cav_position: f64,
        velocity: f64,
        mc: &McConfig,
    ) -> Result<Self> {
        let geometry = link::link_geometry(scenario, cav_position)?;
        let a = link::mean_signal_power(scenario, geometry.serving_distance)?;
        let b_interferers = geometry
            .interferer_distances
            .iter()
            .map(|&d| link::interference_coefficient(scenario, d))
            .collect::<Result<Vec<_>>>()?;
        let b_abs =
            link::absorption_noise_coefficient(scenario, geometry.serving_distance)?;
        let (_, h_c_max) = mobility::ho_cost(scenario.mu, velocity, scenario.h_d)?;
        Ok(Self {
            a,
            b_interferers,
            b_abs,
            sigma2: if mc.include_thermal_noise {
                scenario.sigma2
            } else {
                0.0
            },
            h_c_max,
            bandwidth: scenario.bandwidth,
            r_th: scenario.traffic.r_th,
            serving: NakagamiPower::new(scenario.m_serving)?,
            interferer: NakagamiPower::new(scenario.m_interferer)?,
        })
    }

    fn sinr(&self, rng: &mut ChaCha8Rng, mc: &McConfig) -> f64 {
        let chi_s = self.serving.sample(rng);
        let mut denom = self.sigma2;
        for &b in &self.b_interferers {
            denom += b * self.interferer.sample(rng);
        }
        let chi_abs = if mc.shared_serving_fade {
            chi_s
        } else {
            self.serving.sample(rng)
        };
        denom += self.b_abs * chi_abs;
        self.a * chi_s / denom
    }

    fn draws_per_trial(&self, mc: &McConfig) -> usize {
        1 + self.b_interferers.len() + usize::from(!mc.shared_serving_fade)
    }

    fn sinr_from_uniforms(&self, us: &[f64], mc: &McConfig, mirror: bool) -> f64 {
        let u = |i: usize| if mirror { 1.0 - us[i] } else { us[i] };
        let chi_s = self.serving.from_uniform(u(0));
        let mut denom = self.sigma2;
        for (i, &b) in self.b_interferers.iter().enumerate() {
            denom += b * self.interferer.from_uniform(u(1 + i));
        }
        let chi_abs = if mc.shared_serving_fade {
            chi_s
        } else {
            self.serving.from_uniform(u(1 + self.b_interferers.len()))
        };
        denom += self.b_abs * chi_abs;
        self.a * chi_s / denom
    }
}

/// Run one block of trials, visiting each trial's SINR draw. Antithetic mode
/// pairs consecutive trials on mirrored uniforms.
fn sample_block(
    model: &OutageModel,
    mc: &McConfig,
    block: u64,
    len: u64,
    mut visit: impl FnMut(f64),
) {
    use rand::Rng;
    let mut rng = block_rng(mc.seed, block);
    if mc.antithetic {
        let mut us = vec![0.0f64; model.draws_per_trial(mc)];
        let mut t = 0;
        while t < len {
            for u in us.iter_mut() {
                *u = rng.gen();
            }
            visit(model.sinr_from_uniforms(&us, mc, false));
            t += 1;
            if t < len {
                visit(model.sinr_from_uniforms(&us, mc, true));
                t += 1;
            }
        }
    } else {
        for _ in 0..len {
            visit(model.sinr(&mut rng, mc));
        }
    }
}

impl OutageModel {
    fn ho_aware_rate(&self, sinr: f64) -> f64 {
        self.bandwidth * sinr.ln_1p() / std::f64::consts::LN_2 * (1.0 - self.h_c_max)
    }
}

fn block_ranges(trials: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut start = 0;
    while start < trials {
        let len = BLOCK_SIZE.min(trials - start);
        out.push((start / BLOCK_SIZE, len));
        start += len;
    }
    out
}

/// Empirical HO-aware rate outage at one (position, velocity) point.
pub fn simulate_outage(
    scenario: &CorridorScenario,
    cav_position: f64,
    velocity: f64,
    mc: &McConfig,
) -> Result<McEstimate> {
    mc.validate()?;
    let model = OutageModel::build(scenario, cav_position, velocity, mc)?;
    if model.h_c_max >= 1.0 {
        // M = 0 <= R_th deterministically: every trial is an outage
        return Ok(McEstimate::from_count(mc.trials, mc.trials, mc.seed));
    }
    let count: u64 = block_ranges(mc.trials)
        .par_iter()
        .map(|&(block, len)| {
            let mut c = 0u64;
            sample_block(&model, mc, block, len, |sinr| {
                if model.ho_aware_rate(sinr) <= model.r_th {
                    c += 1;
                }
            });
            c
        })
        .sum();
    Ok(McEstimate::from_count(count, mc.trials, mc.seed))
}

/// Empirical SINR CDF on a sorted grid.
pub fn simulate_sinr_cdf(
    scenario: &CorridorScenario,
    cav_position: f64,
    z_grid: &[f64],
    mc: &McConfig,
) -> Result<Vec<f64>> {
    mc.validate()?;
    if z_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Domain("z_grid must be sorted ascending".into()));
    }
    let model = OutageModel::build(scenario, cav_position, 0.0, mc)?;
    let counts: Vec<u64> = block_ranges(mc.trials)
        .par_iter()
        .map(|&(block, len)| {
            let mut hist = vec![0u64; z_grid.len() + 1];
            sample_block(&model, mc, block, len, |sinr| {
                let idx = z_grid.partition_point(|&z| z < sinr);
                hist[idx] += 1;
            });
            hist
        })
        .reduce(
            || vec![0u64; z_grid.len() + 1],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(&b) {
                    *x += y;
                }
                a
            },
        );
    // counts[i] holds trials with z_{i-1} < sinr <= z_i; cumulate below each grid point
    let mut cdf = Vec::with_capacity(z_grid.len());
    let mut below = 0u64;
    for i in 0..z_grid.len() {
        below += counts[i];
        cdf.push(below as f64 / mc.trials as f64);
    }
    Ok(cdf)
}

/// Kolmogorov-Smirnov-style sup distance between the empirical CDF of a
/// weighted Gamma sum and its single-Gamma moment match.
pub fn ws_approximation_gap(terms: &[(f64, f64)], mc: &McConfig) -> Result<f64> {
    mc.validate()?;
    let approx: GammaApprox = crate::stats::welch_satterthwaite(terms)?;
    let dists = terms
        .iter()
        .map(|&(bbar, m)| {
            Gamma::new(m, bbar).map_err(|e| Error::Domain(format!("gamma sampler: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut samples: Vec<f64> = block_ranges(mc.trials)
        .par_iter()
        .map(|&(block, len)| {
            let mut rng = block_rng(mc.seed, block);
            (0..len)
                .map(|_| dists.iter().map(|d| d.sample(&mut rng)).sum::<f64>())
                .collect::<Vec<f64>>()
        })
        .reduce(Vec::new, |mut a, mut b| {
            a.append(&mut b);
            a
        });
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut sup: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let f = reg_inc_gamma(approx.p, approx.beta2 * x)?;
        let hi = (i as f64 + 1.0) / n - f;
        let lo = f - i as f64 / n;
        sup = sup.max(hi.max(lo));
    }
    Ok(sup)
}
