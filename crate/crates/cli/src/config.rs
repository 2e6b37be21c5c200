//! Run configuration: a TOML file with flag overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use uhs_core::scattering::AngularPolynomial;
use uhs_core::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    GammaExp,
    AngularBump,
    /// gamma_exp radial profile with an angular polynomial read from a JSON file.
    CustomFile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PresetParams {
    pub polynomial: Option<AngularPolynomial>,
    pub center_theta: Option<Vec<f64>>,
    pub center_omega: Option<Vec<f64>>,
    pub width: f64,
    pub power: u32,
    pub file: Option<PathBuf>,
    /// Replace the preset by `r^{N/2-2+ε}` with no decay, which must fail validation.
    pub without_tail: bool,
}

impl Default for PresetParams {
    fn default() -> Self {
        Self {
            polynomial: None,
            center_theta: None,
            center_omega: None,
            width: 0.5,
            power: 6,
            file: None,
            without_tail: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Quadrature {
    pub radial_tol: f64,
    /// Resolution of the sphere rules whose node pairs the checks sample.
    pub sphere_resolution: usize,
    pub s_scale: f64,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            radial_tol: 1e-12,
            sphere_resolution: 4,
            s_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct Output {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RoundtripParams {
    pub r_values: Vec<f64>,
    pub p_values: Vec<f64>,
}

impl Default for RoundtripParams {
    fn default() -> Self {
        Self {
            r_values: vec![0.1, 1.0, 10.0],
            p_values: (-5..=5).map(f64::from).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResidualParams {
    pub points: usize,
    pub seed: u64,
    /// Points are drawn with `|x|, |y| ≤ radius`.
    pub radius: f64,
    pub h_ladder: Vec<f64>,
}

impl Default for ResidualParams {
    fn default() -> Self {
        Self {
            points: 3,
            seed: 20_240_601,
            radius: 1.0,
            h_ladder: vec![0.04, 0.02, 0.01],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AsymptoticsParams {
    pub theta: Option<Vec<f64>>,
    pub omega: Option<Vec<f64>>,
    pub p_values: Vec<f64>,
}

impl Default for AsymptoticsParams {
    fn default() -> Self {
        Self {
            theta: None,
            omega: None,
            p_values: vec![0.0, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StationaryParams {
    pub r: f64,
    pub p: f64,
    pub theta: Option<Vec<f64>>,
    pub omega: Option<Vec<f64>>,
    pub s_ladder: Vec<f64>,
}

impl Default for StationaryParams {
    fn default() -> Self {
        Self {
            r: 1.0,
            p: 0.0,
            theta: None,
            omega: None,
            s_ladder: vec![16.0, 32.0, 64.0, 128.0, 256.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    InversePower,
    Lorentzian,
    SignedLorentzian,
    Gaussian,
    Constant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LemmaParams {
    pub profile: ProfileKind,
    /// Exponent of `(1+p²)^{-β}` for `inverse_power`.
    pub beta: f64,
    /// Declared ε; defaults to the profile's own.
    pub epsilon: Option<f64>,
    pub max_ell: u32,
}

impl Default for LemmaParams {
    fn default() -> Self {
        Self {
            profile: ProfileKind::InversePower,
            beta: 0.25,
            epsilon: None,
            max_ell: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct EvalParams {
    /// Each entry is `x` followed by `y` (d + n numbers).
    pub points: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub d: usize,
    pub n: usize,
    pub epsilon: f64,
    pub preset: Preset,
    pub preset_params: PresetParams,
    pub quadrature: Quadrature,
    pub s_ladder: Vec<f64>,
    pub output: Output,
    pub roundtrip: RoundtripParams,
    pub residual: ResidualParams,
    pub asymptotics: AsymptoticsParams,
    pub stationary: StationaryParams,
    pub lemmas: LemmaParams,
    pub eval: EvalParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            d: 1,
            n: 1,
            epsilon: 0.5,
            preset: Preset::GammaExp,
            preset_params: PresetParams::default(),
            quadrature: Quadrature::default(),
            s_ladder: vec![8.0, 16.0, 32.0, 64.0],
            output: Output::default(),
            roundtrip: RoundtripParams::default(),
            residual: ResidualParams::default(),
            asymptotics: AsymptoticsParams::default(),
            stationary: StationaryParams::default(),
            lemmas: LemmaParams::default(),
            eval: EvalParams::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, Error> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Configuration(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::Configuration(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), Error> {
        uhs_core::scattering::check_dims(self.d, self.n)?;
        if !(self.epsilon > 0.0 && self.epsilon <= 0.5) {
            return Err(Error::Configuration(format!("epsilon must lie in (0, 1/2], got {}", self.epsilon)));
        }
        for (name, ladder) in [
            ("s_ladder", &self.s_ladder),
            ("stationary.s_ladder", &self.stationary.s_ladder),
        ] {
            if ladder.is_empty() || ladder[0] <= 0.0 || ladder.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::Configuration(format!("{name} must be positive and strictly increasing")));
            }
        }
        if !(self.quadrature.radial_tol > 0.0 && self.quadrature.radial_tol < 1.0) {
            return Err(Error::Configuration("quadrature.radial_tol must lie in (0, 1)".into()));
        }
        if self.residual.h_ladder.iter().any(|h| !(*h > 0.0)) {
            return Err(Error::Configuration("residual.h_ladder entries must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nested_tables() {
        let cfg: RunConfig = toml::from_str(
            r#"
            d = 2
            n = 1
            preset = "angular_bump"
            s_ladder = [8.0, 16.0]
            [preset_params]
            center_theta = [1.0, 0.0]
            width = 0.4
            [output]
            format = "json"
            "#,
        )
        .unwrap();
        assert_eq!(cfg.d, 2);
        assert_eq!(cfg.preset, Preset::AngularBump);
        assert_eq!(cfg.preset_params.width, 0.4);
        assert_eq!(cfg.output.format, Some(Format::Json));
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn rejects_bad_values() {
        assert!(toml::from_str::<RunConfig>("d = 2\nunknown = 3").is_err());
        let cfg = RunConfig { d: 4, ..RunConfig::default() };
        assert_eq!(cfg.validate(), Err(Error::Dimension(4)));
        let cfg = RunConfig { s_ladder: vec![8.0, 8.0], ..RunConfig::default() };
        assert!(cfg.validate().is_err());
        let cfg = RunConfig { epsilon: 0.75, ..RunConfig::default() };
        assert!(cfg.validate().is_err());
    }
}
