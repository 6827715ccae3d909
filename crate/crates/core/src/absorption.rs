//! Molecular absorption coefficient k(f) from a spectral-line catalog.
//!
//! The catalog is a CSV with header `gas_id,iso_id,f_c,S,alpha_air,alpha_self,gamma_exp`
//! and a units comment line `# units: f_c=<Hz|cm-1>, S=<text>`. When `f_c` is
//! declared in cm⁻¹ it is converted on load via f = 100·c·ν̃, so all internal
//! frequencies are in Hz. Line intensities are stored as given; the resulting
//! k(f) is consistent up to a fixed catalog-dependent scale.
//!
//! The denominator reference temperature of the summand (printed `T_k` in the
//! source formula but never defined there) is taken to be `T_sp`.

use std::path::Path;

use crate::error::{Error, Result};

/// Speed of light [m/s] (CODATA).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Planck constant [J s] (CODATA 2018, exact).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Boltzmann constant [J/K] (CODATA 2018, exact).
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Avogadro constant [1/mol] (CODATA 2018, exact).
pub const AVOGADRO: f64 = 6.022_140_76e23;
/// Molar gas constant [J/(mol K)].
pub const GAS_CONSTANT: f64 = 8.314_462_618;

/// Fixed physical constants used by the absorption summand.
#[derive(Debug, Clone, Copy)]
pub struct PhysicalConstants {
    pub c: f64,
    pub h: f64,
    pub k_b: f64,
    pub n_a: f64,
    pub v: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            c: SPEED_OF_LIGHT,
            h: PLANCK,
            k_b: BOLTZMANN,
            n_a: AVOGADRO,
            v: GAS_CONSTANT,
        }
    }
}

/// One absorption line of an isotopologue.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralLine {
    pub gas_id: String,
    pub isotopologue_id: String,
    /// Resonant frequency [Hz].
    pub f_c: f64,
    /// Line intensity, in the catalog's native units.
    pub s: f64,
    /// Air-broadened half-width [Hz/atm].
    pub alpha_air: f64,
    /// Self-broadened half-width [Hz/atm].
    pub alpha_self: f64,
    /// Temperature-broadening exponent.
    pub gamma_exp: f64,
}

impl SpectralLine {
    pub fn validate(&self) -> Result<()> {
        if !(self.f_c > 0.0) {
            return Err(Error::Validation(format!(
                "line {}/{}: f_c must be > 0, got {}",
                self.gas_id, self.isotopologue_id, self.f_c
            )));
        }
        if self.s < 0.0 {
            return Err(Error::Validation(format!(
                "line {}/{}: S must be >= 0, got {}",
                self.gas_id, self.isotopologue_id, self.s
            )));
        }
        if self.alpha_air < 0.0 || self.alpha_self < 0.0 {
            return Err(Error::Validation(format!(
                "line {}/{}: half-widths must be >= 0",
                self.gas_id, self.isotopologue_id
            )));
        }
        Ok(())
    }
}

/// Ambient gas and thermodynamic conditions.
#[derive(Debug, Clone)]
pub struct GasMixture {
    /// Ambient pressure [atm].
    pub pressure: f64,
    /// Reference pressure [atm], 1 by convention.
    pub reference_pressure: f64,
    /// Ambient temperature [K].
    pub temperature: f64,
    /// Temperature at standard pressure [K].
    pub t_sp: f64,
    /// Reference temperature [K].
    pub t0: f64,
    /// Mixing ratios keyed by (isotopologue_id, gas_id).
    pub mixing_ratios: Vec<((String, String), f64)>,
}

impl Default for GasMixture {
    fn default() -> Self {
        Self {
            pressure: 1.0,
            reference_pressure: 1.0,
            temperature: 296.0,
            t_sp: 273.15,
            t0: 296.0,
            mixing_ratios: Vec::new(),
        }
    }
}

impl GasMixture {
    pub fn validate(&self) -> Result<()> {
        if !(self.pressure > 0.0) {
            return Err(Error::Validation("pressure must be > 0".into()));
        }
        if !(self.temperature > 0.0) {
            return Err(Error::Validation("temperature must be > 0".into()));
        }
        let mut total = 0.0;
        for ((iso, gas), q) in &self.mixing_ratios {
            if !(0.0..=1.0).contains(q) {
                return Err(Error::Validation(format!(
                    "mixing ratio for ({iso},{gas}) must be in [0,1], got {q}"
                )));
            }
            total += q;
        }
        if total > 1.0 + 1e-12 {
            return Err(Error::Validation(format!(
                "mixing ratios sum to {total} > 1"
            )));
        }
        Ok(())
    }

    pub fn mixing_ratio(&self, iso: &str, gas: &str) -> f64 {
        self.mixing_ratios
            .iter()
            .find(|((i, g), _)| i == iso && g == gas)
            .map(|(_, q)| *q)
            .unwrap_or(0.0)
    }
}

/// Units declared by the catalog header for the resonant-frequency column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum FreqUnit {
    Hz,
    Wavenumber,
}

const CATALOG_HEADER: &str = "gas_id,iso_id,f_c,S,alpha_air,alpha_self,gamma_exp";

/// Load a line catalog from the CSV format described in the module docs.
pub fn load_line_catalog(path: &Path) -> Result<Vec<SpectralLine>> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::Config(format!("cannot read catalog {}: {e}", path.display()))
    })?;
    parse_line_catalog(&text)
}

/// Parse the catalog CSV from a string (split out for testability).
pub fn parse_line_catalog(text: &str) -> Result<Vec<SpectralLine>> {
    let mut unit = FreqUnit::Hz;
    let mut saw_header = false;
    let mut lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(units) = comment.strip_prefix("units:") {
                for part in units.split(',') {
                    let part = part.trim();
                    if let Some(v) = part.strip_prefix("f_c=") {
                        unit = match v.trim() {
                            "Hz" => FreqUnit::Hz,
                            "cm-1" => FreqUnit::Wavenumber,
                            other => {
                                return Err(Error::Parse {
                                    line: lineno,
                                    msg: format!("unknown f_c unit '{other}'"),
                                })
                            }
                        };
                    }
                    // S units are free text, stored as declared
                }
            }
            continue;
        }
        if !saw_header {
            if line != CATALOG_HEADER {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected header '{CATALOG_HEADER}', got '{line}'"),
                });
            }
            saw_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 7 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected 7 fields, got {}", fields.len()),
            });
        }
        let num = |i: usize, name: &str| -> Result<f64> {
            fields[i].parse::<f64>().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("invalid {name} '{}'", fields[i]),
            })
        };
        let mut f_c = num(2, "f_c")?;
        if unit == FreqUnit::Wavenumber {
            f_c *= 100.0 * SPEED_OF_LIGHT;
        }
        let rec = SpectralLine {
            gas_id: fields[0].to_string(),
            isotopologue_id: fields[1].to_string(),
            f_c,
            s: num(3, "S")?,
            alpha_air: num(4, "alpha_air")?,
            alpha_self: num(5, "alpha_self")?,
            gamma_exp: num(6, "gamma_exp")?,
        };
        rec.validate().map_err(|e| Error::Parse {
            line: lineno,
            msg: e.to_string(),
        })?;
        lines.push(rec);
    }
    if !saw_header && !text.trim().is_empty() {
        return Err(Error::Parse {
            line: 1,
            msg: "catalog has no header row".into(),
        });
    }
    Ok(lines)
}

/// Pressure- and temperature-corrected Lorentz half-width [Hz].
pub fn lorentz_half_width(line: &SpectralLine, mix: &GasMixture) -> Result<f64> {
    if !(mix.temperature > 0.0) {
        return Err(Error::Domain("temperature must be > 0".into()));
    }
    let q = mix.mixing_ratio(&line.isotopologue_id, &line.gas_id);
    let alpha = ((1.0 - q) * line.alpha_air + q * line.alpha_self)
        * (mix.pressure / mix.reference_pressure)
        * (mix.t0 / mix.temperature).powf(line.gamma_exp);
    Ok(alpha)
}

/// Van Vleck-Weisskopf asymmetric line shape at frequency f [Hz].
pub fn vvw_line_shape(line: &SpectralLine, mix: &GasMixture, f: f64) -> Result<f64> {
    if !(f > 0.0) {
        return Err(Error::Domain(format!("frequency must be > 0, got {f}")));
    }
    let alpha = lorentz_half_width(line, mix)?;
    let g = f + line.f_c;
    let h = f - line.f_c;
    let a2 = alpha * alpha;
    let shape = (100.0 * SPEED_OF_LIGHT * alpha * f) / (std::f64::consts::PI * line.f_c)
        * (1.0 / (g * g + a2) + 1.0 / (h * h + a2));
    Ok(shape)
}

/// One summand of the absorption coefficient, with the line shape supplied so
/// tests can bypass the half-width model.
fn absorption_summand(
    line: &SpectralLine,
    mix: &GasMixture,
    consts: &PhysicalConstants,
    f: f64,
    shape: f64,
) -> f64 {
    let q = mix.mixing_ratio(&line.isotopologue_id, &line.gas_id);
    let t = mix.temperature;
    let num = mix.pressure * mix.pressure
        * mix.t_sp
        * q
        * consts.n_a
        * line.s
        * f
        * (consts.h * consts.c * f / (2.0 * consts.k_b * t)).tanh();
    let den = mix.reference_pressure
        * mix.t_sp
        * consts.v
        * t
        * t
        * line.f_c
        * (consts.h * consts.c * line.f_c / (2.0 * consts.k_b * t)).tanh();
    num / den * shape
}

/// Molecular absorption coefficient k(f) [1/m] summed over the catalog.
///
/// Returns `(k, empty)` where `empty` flags a catalog with no lines.
pub fn absorption_coefficient(
    catalog: &[SpectralLine],
    mix: &GasMixture,
    f: f64,
) -> Result<(f64, bool)> {
    if !(f > 0.0) {
        return Err(Error::Domain(format!("frequency must be > 0, got {f}")));
    }
    mix.validate()?;
    if catalog.is_empty() {
        return Ok((0.0, true));
    }
    let consts = PhysicalConstants::default();
    let mut k = 0.0;
    for line in catalog {
        let shape = vvw_line_shape(line, mix, f)?;
        k += absorption_summand(line, mix, &consts, f, shape);
    }
    Ok((k, false))
}
