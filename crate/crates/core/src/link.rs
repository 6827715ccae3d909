//! Corridor geometry, received-power coefficients, and the Shannon rate.
//!
//! TBSs sit on a lattice with spacing 1/mu, the first at 1/(2 mu), so the
//! corridor is tiled symmetrically and cell edges fall halfway between
//! neighbouring TBSs.

use crate::error::{Error, Result};
use crate::scenario::CorridorScenario;

/// Serving and interferer distances for one CAV position.
#[derive(Debug, Clone)]
pub struct LinkGeometry {
    /// Distance to the serving (nearest) TBS [m].
    pub serving_distance: f64,
    /// Distances to every other TBS in the corridor [m].
    pub interferer_distances: Vec<f64>,
}

/// Axial TBS coordinates: round(mu L) stations, spacing 1/mu, first at 1/(2 mu).
pub fn tbs_positions(mu: f64, length: f64) -> Result<Vec<f64>> {
    if !(mu > 0.0) || !(length > 0.0) {
        return Err(Error::Domain(format!(
            "tbs_positions requires mu > 0 and length > 0, got mu={mu}, L={length}"
        )));
    }
    if mu * length < 1.0 {
        return Err(Error::Validation("corridor holds no TBS".into()));
    }
    let n = (mu * length).round() as usize;
    Ok((0..n).map(|i| (i as f64 + 0.5) / mu).collect())
}

/// 3-D distance from an axial offset, TBS height, and lateral safety distance.
pub fn distance(x_offset: f64, h_bs: f64, d_safe: f64) -> Result<f64> {
    if h_bs < 0.0 || d_safe < 0.0 {
        return Err(Error::Domain(
            "distance requires h_bs >= 0 and d_safe >= 0".into(),
        ));
    }
    Ok((x_offset * x_offset + h_bs * h_bs + d_safe * d_safe).sqrt())
}

/// Mean received-signal coefficient a = P zeta d^-2 e^{-k d}.
pub fn mean_signal_power(scenario: &CorridorScenario, d: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::Domain(format!("mean_signal_power requires d > 0, got {d}")));
    }
    Ok(scenario.p_tx * scenario.zeta() / (d * d) * (-scenario.k_abs * d).exp())
}

/// Interference coefficient b = P zeta F d^-2.
///
/// The printed interference term carries no Beer-Lambert factor; the
/// `interferer_beer_lambert` scenario switch restores it for exploration.
pub fn interference_coefficient(scenario: &CorridorScenario, d: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::Domain(format!(
            "interference_coefficient requires d > 0, got {d}"
        )));
    }
    let beer = if scenario.interferer_beer_lambert {
        (-scenario.k_abs * d).exp()
    } else {
        1.0
    };
    Ok(scenario.p_tx * scenario.zeta() * scenario.alignment_prob / (d * d) * beer)
}

/// Absorption-noise coefficient b = P zeta d^-2 (1 - e^{-k d}).
///
/// Together with `mean_signal_power` this partitions P zeta d^-2 exactly.
pub fn absorption_noise_coefficient(scenario: &CorridorScenario, d: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::Domain(format!(
            "absorption_noise_coefficient requires d > 0, got {d}"
        )));
    }
    Ok(scenario.p_tx * scenario.zeta() / (d * d) * (-(-scenario.k_abs * d).exp_m1()))
}

/// Nearest-TBS association: serving and interferer distances for a CAV at the
/// given axial position.
pub fn link_geometry(scenario: &CorridorScenario, cav_position: f64) -> Result<LinkGeometry> {
    if !(0.0..=scenario.length).contains(&cav_position) {
        return Err(Error::Domain(format!(
            "cav_position {cav_position} outside corridor [0, {}]",
            scenario.length
        )));
    }
    let positions = tbs_positions(scenario.mu, scenario.length)?;
    let mut serving_idx = 0;
    let mut best = f64::INFINITY;
    for (i, &p) in positions.iter().enumerate() {
        let off = (p - cav_position).abs();
        if off < best {
            best = off;
            serving_idx = i;
        }
    }
    let serving_distance = distance(best, scenario.h_bs, scenario.d_safe)?;
    let interferer_distances = positions
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != serving_idx)
        .map(|(_, &p)| distance((p - cav_position).abs(), scenario.h_bs, scenario.d_safe))
        .collect::<Result<Vec<_>>>()?;
    Ok(LinkGeometry {
        serving_distance,
        interferer_distances,
    })
}

/// Worst-case CAV position for the given density: the midpoint of the central
/// cell (axial offset 1/(2 mu) from the serving TBS). With a single TBS the
/// worst position is the cell edge, clamped to the corridor.
pub fn worst_case_position(scenario: &CorridorScenario) -> Result<f64> {
    let positions = tbs_positions(scenario.mu, scenario.length)?;
    let n = positions.len();
    if n >= 2 {
        let j = n / 2;
        Ok(0.5 * (positions[j - 1] + positions[j]))
    } else {
        Ok((positions[0] + 0.5 / scenario.mu).min(scenario.length))
    }
}

/// Shannon rate W log2(1 + sinr) [bit/s].
pub fn shannon_rate(scenario: &CorridorScenario, sinr: f64) -> Result<f64> {
    if sinr < 0.0 {
        return Err(Error::Domain(format!("shannon_rate requires sinr >= 0, got {sinr}")));
    }
    Ok(scenario.bandwidth * sinr.ln_1p() / std::f64::consts::LN_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::reference_scenario;

    #[test]
    fn lattice_examples() {
        assert_eq!(tbs_positions(0.5, 8.0).unwrap(), vec![1.0, 3.0, 5.0, 7.0]);
        assert_eq!(tbs_positions(1.0, 3.0).unwrap(), vec![0.5, 1.5, 2.5]);
        assert!(tbs_positions(0.001, 500.0).is_err());
    }

    #[test]
    fn distance_examples() {
        assert!((distance(0.0, 8.0, 5.0).unwrap() - 89f64.sqrt()).abs() < 1e-12);
        assert_eq!(distance(0.0, 0.0, 0.0).unwrap(), 0.0);
        assert_eq!(distance(3.0, 4.0, 0.0).unwrap(), 5.0);
        assert!(distance(1.0, -1.0, 0.0).is_err());
    }

    #[test]
    fn signal_inverse_square_when_no_absorption() {
        let mut s = reference_scenario();
        s.k_abs = 0.0;
        let a1 = mean_signal_power(&s, 10.0).unwrap();
        let a2 = mean_signal_power(&s, 20.0).unwrap();
        assert!((a2 / a1 - 0.25).abs() < 1e-14);
    }

    #[test]
    fn signal_linear_in_gain() {
        let s = reference_scenario();
        let mut s2 = s.clone();
        s2.g_tx *= 2.0;
        let d = 12.0;
        let r = mean_signal_power(&s2, d).unwrap() / mean_signal_power(&s, d).unwrap();
        assert!((r - 2.0).abs() < 1e-14);
    }

    #[test]
    fn signal_pinned_regression_constant() {
        // P=0.2, 25 dB gains, f=0.837e12, k=0, d=sqrt(89)
        let mut s = reference_scenario();
        s.k_abs = 0.0;
        let a = mean_signal_power(&s, 89f64.sqrt()).unwrap();
        assert!((a - 1.825_621_538_403_574_9e-7).abs() < 1e-17, "a={a:e}");
        assert!(mean_signal_power(&s, 0.0).is_err());
    }

    #[test]
    fn interference_isolates_alignment_probability() {
        let mut s = reference_scenario();
        s.k_abs = 0.0;
        let d = 15.0;
        let ratio =
            interference_coefficient(&s, d).unwrap() / mean_signal_power(&s, d).unwrap();
        assert!((ratio - s.alignment_prob).abs() < 1e-14);
        s.alignment_prob = 0.0;
        assert_eq!(interference_coefficient(&s, d).unwrap(), 0.0);
    }

    #[test]
    fn power_split_identity() {
        let s = reference_scenario();
        for &(d, k) in &[(10.0, 0.01), (25.0, 0.2), (3.0, 0.0)] {
            let mut sc = s.clone();
            sc.k_abs = k;
            let total = sc.p_tx * sc.zeta() / (d * d);
            let sum = mean_signal_power(&sc, d).unwrap()
                + absorption_noise_coefficient(&sc, d).unwrap();
            assert!((sum - total).abs() <= 1e-15 * total, "d={d} k={k}");
        }
    }

    #[test]
    fn absorption_noise_limits() {
        let mut s = reference_scenario();
        s.k_abs = 0.0;
        assert_eq!(absorption_noise_coefficient(&s, 10.0).unwrap(), 0.0);
        s.k_abs = 1e6;
        let d = 10.0;
        let total = s.p_tx * s.zeta() / (d * d);
        assert!((absorption_noise_coefficient(&s, d).unwrap() - total).abs() < 1e-15 * total);
    }

    #[test]
    fn geometry_under_tbs_and_single_tbs() {
        let mut s = reference_scenario();
        s.mu = 0.1; // lattice 5, 15, 25, ...
        let g = link_geometry(&s, 5.0).unwrap();
        assert!((g.serving_distance - 89f64.sqrt()).abs() < 1e-12);
        assert_eq!(g.interferer_distances.len(), s.tbs_count() - 1);

        s.length = 10.0;
        s.mu = 0.1; // one TBS at 5
        let g = link_geometry(&s, 5.0).unwrap();
        assert!(g.interferer_distances.is_empty());
    }

    #[test]
    fn geometry_midpoint_ring_structure() {
        let mut s = reference_scenario();
        s.mu = 0.1;
        let mid = worst_case_position(&s).unwrap();
        let g = link_geometry(&s, mid).unwrap();
        let base = s.h_bs * s.h_bs + s.d_safe * s.d_safe;
        let expect_serv = (base + 25.0).sqrt(); // offset 1/(2 mu) = 5
        assert!((g.serving_distance - expect_serv).abs() < 1e-9);
        // nearest interferer is the opposite TBS at the same offset
        let mut sorted = g.interferer_distances.clone();
        sorted.sort_by(f64::total_cmp);
        assert!((sorted[0] - expect_serv).abs() < 1e-9);
        // next ring: offset 3/(2 mu) = 15, twice
        let expect_ring = (base + 225.0).sqrt();
        assert!((sorted[1] - expect_ring).abs() < 1e-9);
        assert!((sorted[2] - expect_ring).abs() < 1e-9);
    }

    #[test]
    fn geometry_mirror_symmetry() {
        let s = reference_scenario();
        let x = 7.3;
        // the lattice is symmetric about the corridor center
        let mirror = s.length - x;
        let g1 = link_geometry(&s, x).unwrap();
        let g2 = link_geometry(&s, mirror).unwrap();
        let mut d1: Vec<f64> = g1.interferer_distances.clone();
        let mut d2: Vec<f64> = g2.interferer_distances.clone();
        d1.sort_by(f64::total_cmp);
        d2.sort_by(f64::total_cmp);
        assert!((g1.serving_distance - g2.serving_distance).abs() < 1e-9);
        for (a, b) in d1.iter().zip(&d2) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn shannon_rate_examples() {
        let mut s = reference_scenario();
        assert_eq!(shannon_rate(&s, 0.0).unwrap(), 0.0);
        assert!((shannon_rate(&s, 1.0).unwrap() - 3e9).abs() < 1e-3);
        s.bandwidth = 1.0;
        assert!((shannon_rate(&s, 3.0).unwrap() - 2.0).abs() < 1e-14);
        assert!(shannon_rate(&s, -0.1).is_err());
    }
}
