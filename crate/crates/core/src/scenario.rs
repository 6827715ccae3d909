//! Corridor scenario: the full network, channel, and traffic parameter set,
//! loadable from a TOML config file with strict unknown-key rejection.

use std::path::Path;

use serde::Deserialize;

use crate::absorption::GasMixture;
use crate::error::{Error, Result};

/// Traffic and constraint parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TrafficParams {
    /// Log-mean of the vehicle spacing [ln m].
    pub mu_ln: f64,
    /// Log-scatter of the vehicle spacing.
    pub sigma_ln: f64,
    /// Processing/decision time [s].
    pub tau: f64,
    /// Crash intensity level (probability cap on spacing < stopping distance).
    pub epsilon: f64,
    /// Minimum guaranteed traffic flow [CAV/s].
    pub q_min: f64,
    /// Speed cap [m/s].
    pub v_max: f64,
    /// Rate threshold [bit/s].
    pub r_th: f64,
    /// Rate-outage cap.
    pub o_th: f64,
}

impl TrafficParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_ln > 0.0) {
            return Err(Error::Validation("sigma_ln must be > 0".into()));
        }
        if !(self.tau > 0.0) {
            return Err(Error::Validation("tau must be > 0".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Validation("epsilon must be in (0,1)".into()));
        }
        if self.q_min < 0.0 {
            return Err(Error::Validation("q_min must be >= 0".into()));
        }
        if !(self.v_max > 0.0) {
            return Err(Error::Validation("v_max must be > 0".into()));
        }
        if self.r_th < 0.0 {
            return Err(Error::Validation("r_th must be >= 0".into()));
        }
        if !(self.o_th > 0.0 && self.o_th < 1.0) {
            return Err(Error::Validation("o_th must be in (0,1)".into()));
        }
        Ok(())
    }
}

/// Full corridor parameter set. Gains are stored linear; the config file
/// accepts them in dB.
#[derive(Debug, Clone, PartialEq)]
pub struct CorridorScenario {
    /// Corridor length [m].
    pub length: f64,
    /// TBS density [1/m].
    pub mu: f64,
    /// TBS height [m].
    pub h_bs: f64,
    /// Lateral safety distance [m].
    pub d_safe: f64,
    /// Transmit power [W].
    pub p_tx: f64,
    /// Transmit antenna gain [linear].
    pub g_tx: f64,
    /// Receive antenna gain [linear].
    pub g_rx: f64,
    /// Carrier frequency [Hz].
    pub frequency: f64,
    /// Molecular absorption coefficient [1/m].
    pub k_abs: f64,
    /// Beam alignment probability.
    pub alignment_prob: f64,
    /// Nakagami shape of the serving link.
    pub m_serving: f64,
    /// Nakagami shape of each interferer (scalar broadcast).
    pub m_interferer: f64,
    /// Bandwidth [Hz].
    pub bandwidth: f64,
    /// Thermal noise power [W]; Monte-Carlo only.
    pub sigma2: f64,
    /// Handoff delay [s/HO].
    pub h_d: f64,
    /// Apply the Beer-Lambert factor to interferer powers as well.
    pub interferer_beer_lambert: bool,
    /// Upper bound on TBS density for the optimizer [1/m].
    pub mu_max: f64,
    pub traffic: TrafficParams,
}

impl CorridorScenario {
    /// TBS count, round(mu * L).
    pub fn tbs_count(&self) -> usize {
        (self.mu * self.length).round() as usize
    }

    /// zeta = G_tx * G_rx * (c / 4 pi f)^2.
    pub fn zeta(&self) -> f64 {
        let c = crate::absorption::SPEED_OF_LIGHT;
        let lam = c / (4.0 * std::f64::consts::PI * self.frequency);
        self.g_tx * self.g_rx * lam * lam
    }

    /// Same scenario with a different density.
    pub fn with_mu(&self, mu: f64) -> Self {
        Self { mu, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0) {
            return Err(Error::Validation("mu must be > 0".into()));
        }
        if !(self.length > 0.0) {
            return Err(Error::Validation("length must be > 0".into()));
        }
        if self.mu * self.length < 1.0 {
            return Err(Error::Validation("corridor holds no TBS".into()));
        }
        if !(0.0..=1.0).contains(&self.alignment_prob) {
            return Err(Error::Validation("alignment probability must be in [0,1]".into()));
        }
        if !(self.m_serving >= 0.5) {
            return Err(Error::Validation("m_serving must be >= 0.5".into()));
        }
        if !(self.m_interferer >= 0.5) {
            return Err(Error::Validation("m_interferer must be >= 0.5".into()));
        }
        if !(self.bandwidth > 0.0) {
            return Err(Error::Validation("bandwidth must be > 0".into()));
        }
        if !(self.p_tx > 0.0) {
            return Err(Error::Validation("p_tx must be > 0".into()));
        }
        if self.k_abs < 0.0 {
            return Err(Error::Validation("k_abs must be >= 0".into()));
        }
        if self.h_d < 0.0 {
            return Err(Error::Validation("h_d must be >= 0".into()));
        }
        if !(self.mu_max > 0.0) {
            return Err(Error::Validation("mu_max must be > 0".into()));
        }
        self.traffic.validate()
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinkSection {
    length: f64,
    mu: f64,
    h_bs: f64,
    d_safe: f64,
    p_tx: f64,
    g_tx_db: f64,
    g_rx_db: f64,
    frequency: f64,
    k_abs: Option<f64>,
    alignment_prob: Option<f64>,
    theta_tx: Option<f64>,
    theta_rx: Option<f64>,
    m_serving: f64,
    m_interferer: f64,
    bandwidth: f64,
    sigma2: Option<f64>,
    h_d: f64,
    interferer_beer_lambert: Option<bool>,
    mu_max: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrafficSection {
    mu_ln: f64,
    sigma_ln: f64,
    tau: f64,
    epsilon: f64,
    q_min: f64,
    v_max: f64,
    r_th: f64,
    o_th: f64,
}

/// Optional gas conditions for line-catalog absorption; every field falls
/// back to the `GasMixture` defaults. Mixing ratios are keyed "GAS/ISO",
/// e.g. `"H2O/1" = 0.02`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AbsorptionSection {
    pressure: Option<f64>,
    temperature: Option<f64>,
    t_sp: Option<f64>,
    t0: Option<f64>,
    mixing_ratios: Option<std::collections::BTreeMap<String, f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    link: LinkSection,
    traffic: TrafficSection,
    absorption: Option<AbsorptionSection>,
}

fn gas_from_section(section: Option<AbsorptionSection>) -> Result<GasMixture> {
    let mut gas = GasMixture::default();
    let Some(a) = section else {
        return Ok(gas);
    };
    if let Some(p) = a.pressure {
        gas.pressure = p;
    }
    if let Some(t) = a.temperature {
        gas.temperature = t;
    }
    if let Some(t) = a.t_sp {
        gas.t_sp = t;
    }
    if let Some(t) = a.t0 {
        gas.t0 = t;
    }
    for (key, q) in a.mixing_ratios.unwrap_or_default() {
        let (gas_id, iso_id) = key.split_once('/').ok_or_else(|| {
            Error::Config(format!(
                "mixing-ratio key must be \"GAS/ISO\", got \"{key}\""
            ))
        })?;
        gas.mixing_ratios
            .push(((iso_id.to_string(), gas_id.to_string()), q));
    }
    gas.validate()?;
    Ok(gas)
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Parse a scenario from TOML text.
pub fn parse_config(text: &str) -> Result<CorridorScenario> {
    parse_config_with_gas(text).map(|(s, _)| s)
}

/// Parse a scenario plus the gas conditions from the optional `[absorption]`
/// section (defaults when absent).
pub fn parse_config_with_gas(text: &str) -> Result<(CorridorScenario, GasMixture)> {
    let cfg: ConfigFile =
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let gas = gas_from_section(cfg.absorption)?;
    let l = cfg.link;
    let alignment_prob = match (l.alignment_prob, l.theta_tx, l.theta_rx) {
        (Some(f), None, None) => f,
        (None, Some(tx), Some(rx)) => {
            tx * rx / (4.0 * std::f64::consts::PI * std::f64::consts::PI)
        }
        (None, None, None) => {
            return Err(Error::Config(
                "either alignment_prob or both theta_tx/theta_rx must be set".into(),
            ))
        }
        _ => {
            return Err(Error::Config(
                "give exactly one of alignment_prob or the theta_tx/theta_rx pair".into(),
            ))
        }
    };
    let t = cfg.traffic;
    let scenario = CorridorScenario {
        length: l.length,
        mu: l.mu,
        h_bs: l.h_bs,
        d_safe: l.d_safe,
        p_tx: l.p_tx,
        g_tx: db_to_linear(l.g_tx_db),
        g_rx: db_to_linear(l.g_rx_db),
        frequency: l.frequency,
        k_abs: l.k_abs.unwrap_or(0.0),
        alignment_prob,
        m_serving: l.m_serving,
        m_interferer: l.m_interferer,
        bandwidth: l.bandwidth,
        sigma2: l.sigma2.unwrap_or(0.0),
        h_d: l.h_d,
        interferer_beer_lambert: l.interferer_beer_lambert.unwrap_or(false),
        mu_max: l.mu_max,
        traffic: TrafficParams {
            mu_ln: t.mu_ln,
            sigma_ln: t.sigma_ln,
            tau: t.tau,
            epsilon: t.epsilon,
            q_min: t.q_min,
            v_max: t.v_max,
            r_th: t.r_th,
            o_th: t.o_th,
        },
    };
    scenario.validate()?;
    Ok((scenario, gas))
}

/// Load a scenario config file.
pub fn load_config(path: &Path) -> Result<CorridorScenario> {
    load_config_with_gas(path).map(|(s, _)| s)
}

/// Load a scenario config file together with the gas conditions.
pub fn load_config_with_gas(path: &Path) -> Result<(CorridorScenario, GasMixture)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config_with_gas(&text)
}

/// Reference scenario: the evaluation parameter set used throughout the docs
/// and the validation suite. The absorption coefficient defaults to a
/// representative transmission-window value; override `k_abs` (or derive it
/// from a line catalog) for other frequencies.
pub fn reference_scenario() -> CorridorScenario {
    CorridorScenario {
        length: 2000.0,
        mu: 0.1,
        h_bs: 8.0,
        d_safe: 5.0,
        p_tx: 0.2,
        g_tx: db_to_linear(25.0),
        g_rx: db_to_linear(25.0),
        frequency: 0.837e12,
        k_abs: 0.01,
        alignment_prob: 0.0069,
        m_serving: 2.0,
        m_interferer: 2.5,
        bandwidth: 3e9,
        sigma2: 0.0,
        h_d: 0.35,
        interferer_beer_lambert: false,
        mu_max: 0.5,
        traffic: TrafficParams {
            mu_ln: 0.0,
            sigma_ln: 1.0,
            tau: 5e-3,
            epsilon: 0.02,
            q_min: 10.0,
            v_max: 30.0,
            r_th: 1e9,
            o_th: 0.1,
        },
    }
}

/// The reference scenario rendered as a config file.
pub fn reference_config_toml() -> String {
    "[link]\n\
     length = 2000.0\n\
     mu = 0.1\n\
     h_bs = 8.0\n\
     d_safe = 5.0\n\
     p_tx = 0.2\n\
     g_tx_db = 25.0\n\
     g_rx_db = 25.0\n\
     frequency = 0.837e12\n\
     k_abs = 0.01\n\
     alignment_prob = 0.0069\n\
     m_serving = 2.0\n\
     m_interferer = 2.5\n\
     bandwidth = 3.0e9\n\
     sigma2 = 0.0\n\
     h_d = 0.35\n\
     mu_max = 0.5\n\
     \n\
     [traffic]\n\
     mu_ln = 0.0\n\
     sigma_ln = 1.0\n\
     tau = 5.0e-3\n\
     epsilon = 0.02\n\
     q_min = 10.0\n\
     v_max = 30.0\n\
     r_th = 1.0e9\n\
     o_th = 0.1\n"
        .to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_config_parses_to_reference_scenario() {
        let parsed = parse_config(&reference_config_toml()).unwrap();
        assert_eq!(parsed, reference_scenario());
    }

    #[test]
    fn unknown_key_rejected() {
        let mut text = reference_config_toml();
        text.push_str("mystery_key = 1.0\n");
        assert!(matches!(parse_config(&text), Err(Error::Config(_))));
    }

    #[test]
    fn alignment_forms_are_exclusive() {
        let text = reference_config_toml().replace(
            "alignment_prob = 0.0069",
            "alignment_prob = 0.0069\ntheta_tx = 0.5\ntheta_rx = 0.5",
        );
        assert!(parse_config(&text).is_err());
        let text = reference_config_toml()
            .replace("alignment_prob = 0.0069", "theta_tx = 0.5\ntheta_rx = 0.33");
        let s = parse_config(&text).unwrap();
        let expect = 0.5 * 0.33 / (4.0 * std::f64::consts::PI * std::f64::consts::PI);
        assert!((s.alignment_prob - expect).abs() < 1e-15);
    }

    #[test]
    fn gains_converted_from_db() {
        let s = reference_scenario();
        assert!((s.g_tx - 316.227_766_016_837_94).abs() < 1e-9);
    }

    #[test]
    fn negative_bandwidth_rejected() {
        let text = reference_config_toml().replace("bandwidth = 3.0e9", "bandwidth = -1.0");
        assert!(parse_config(&text).is_err());
    }

    #[test]
    fn absorption_section_parsed() {
        let mut text = reference_config_toml();
        text.push_str(
            "\n[absorption]\npressure = 0.9\ntemperature = 300.0\n\
             [absorption.mixing_ratios]\n\"H2O/1\" = 0.02\n",
        );
        let (_, gas) = parse_config_with_gas(&text).unwrap();
        assert_eq!(gas.pressure, 0.9);
        assert_eq!(gas.temperature, 300.0);
        assert_eq!(gas.t_sp, 273.15);
        assert!((gas.mixing_ratio("1", "H2O") - 0.02).abs() < 1e-15);
    }

    #[test]
    fn absorption_section_defaults_when_absent() {
        let (_, gas) = parse_config_with_gas(&reference_config_toml()).unwrap();
        assert!(gas.mixing_ratios.is_empty());
        assert_eq!(gas.pressure, 1.0);
    }

    #[test]
    fn bad_mixing_ratio_key_rejected() {
        let mut text = reference_config_toml();
        text.push_str("\n[absorption.mixing_ratios]\nH2O = 0.02\n");
        assert!(matches!(parse_config_with_gas(&text), Err(Error::Config(_))));
    }

    #[test]
    fn corridor_without_tbs_rejected() {
        let text = reference_config_toml().replace("mu = 0.1", "mu = 0.0001");
        assert!(matches!(parse_config(&text), Err(Error::Validation(_))));
    }
}
