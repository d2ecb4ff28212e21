//! Run configuration: flat `key = value` files plus command-line overrides.
//!
//! ```text
//! # Fe8, field along the hard axis
//! [system]
//! spin = 10
//! d_kelvin = -0.292
//! e_kelvin = -0.046
//! [sweep]
//! b_max_tesla = 3
//! steps = 301
//! theta_deg = 90
//! ```
//!
//! Section headers are accepted and ignored; keys are global.

use std::fmt;
use std::path::PathBuf;

use crate::hamiltonian::{SpinSystem, BOHR_MAGNETON_K_PER_T, FE8_D_KELVIN, FE8_E_KELVIN, FE8_SPIN};
use crate::spin::SpinQuantum;
use crate::sweep::SweepGrid;

pub const DEFAULT_DECIMALS: usize = 10;
pub const DECIMALS_RANGE: std::ops::RangeInclusive<usize> = 3..=17;

pub const KEYS: [&str; 13] = [
    "spin",
    "d_kelvin",
    "e_kelvin",
    "g",
    "mu_b_kelvin_per_tesla",
    "b_min_tesla",
    "b_max_tesla",
    "steps",
    "theta_deg",
    "phi_deg",
    "output",
    "state_index",
    "decimals",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    /// Line in the config file; `None` for command-line values.
    pub line: Option<usize>,
    pub key: String,
    pub message: String,
}

impl ConfigError {
    fn new(line: Option<usize>, key: &str, message: impl Into<String>) -> Self {
        Self { line, key: key.to_string(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: `{}`: {}", self.key, self.message),
            None => write!(f, "`{}`: {}", self.key, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Values as written, before defaults and validation. Every field is optional
/// so a file and a flag set can be layered.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigValues {
    pub spin: Option<String>,
    pub d_kelvin: Option<f64>,
    pub e_kelvin: Option<f64>,
    pub g: Option<f64>,
    pub mu_b_kelvin_per_tesla: Option<f64>,
    pub b_min_tesla: Option<f64>,
    pub b_max_tesla: Option<f64>,
    pub steps: Option<usize>,
    pub theta_deg: Option<f64>,
    pub phi_deg: Option<f64>,
    pub output: Option<PathBuf>,
    pub state_index: Option<usize>,
    pub decimals: Option<usize>,
    /// Source line of each key set from a file.
    lines: Vec<(String, usize)>,
}

impl ConfigValues {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut values = ConfigValues::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if line.starts_with('[') {
                if !line.ends_with(']') {
                    return Err(ConfigError::new(Some(line_no), line, "unterminated section header"));
                }
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::new(Some(line_no), line, "expected `key = value`"));
            };
            let key = key.trim();
            let value = unquote(value.trim());
            if values.lines.iter().any(|(k, _)| k == key) {
                return Err(ConfigError::new(Some(line_no), key, "duplicate key"));
            }
            values.set(key, value, Some(line_no))?;
            values.lines.push((key.to_string(), line_no));
        }
        Ok(values)
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str, line: Option<usize>) -> Result<(), ConfigError> {
        let float = |v: &str| -> Result<f64, ConfigError> {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| ConfigError::new(line, key, format!("malformed number `{v}`")))
        };
        let int = |v: &str| -> Result<usize, ConfigError> {
            v.parse::<usize>().map_err(|_| ConfigError::new(line, key, format!("malformed nonnegative integer `{v}`")))
        };
        match key {
            "spin" => {
                parse_spin(value).map_err(|m| ConfigError::new(line, key, m))?;
                self.spin = Some(value.to_string());
            }
            "d_kelvin" => self.d_kelvin = Some(float(value)?),
            "e_kelvin" => self.e_kelvin = Some(float(value)?),
            "g" => self.g = Some(float(value)?),
            "mu_b_kelvin_per_tesla" => self.mu_b_kelvin_per_tesla = Some(float(value)?),
            "b_min_tesla" => self.b_min_tesla = Some(float(value)?),
            "b_max_tesla" => self.b_max_tesla = Some(float(value)?),
            "steps" => self.steps = Some(int(value)?),
            "theta_deg" => self.theta_deg = Some(float(value)?),
            "phi_deg" => self.phi_deg = Some(float(value)?),
            "output" => self.output = Some(PathBuf::from(value)),
            "state_index" => self.state_index = Some(int(value)?),
            "decimals" => self.decimals = Some(int(value)?),
            _ => return Err(ConfigError::new(line, key, "unknown key")),
        }
        Ok(())
    }

    /// Values in `other` replace those in `self`.
    pub fn overlay(mut self, other: ConfigValues) -> Self {
        macro_rules! take {
            ($($field:ident),*) => { $( if other.$field.is_some() { self.$field = other.$field; } )* };
        }
        take!(
            spin,
            d_kelvin,
            e_kelvin,
            g,
            mu_b_kelvin_per_tesla,
            b_min_tesla,
            b_max_tesla,
            steps,
            theta_deg,
            phi_deg,
            output,
            state_index,
            decimals
        );
        self
    }

    fn line_of(&self, key: &str) -> Option<usize> {
        self.lines.iter().find(|(k, _)| k == key).map(|&(_, l)| l)
    }

    /// Applies defaults and validates.
    pub fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let err = |key: &str, msg: String| ConfigError::new(self.line_of(key), key, msg);

        let spin_text = self.spin.clone().unwrap_or_else(|| FE8_SPIN.to_string());
        let spin = parse_spin(&spin_text).map_err(|m| err("spin", m))?;
        let d = self.d_kelvin.unwrap_or(FE8_D_KELVIN);
        let e = self.e_kelvin.unwrap_or(FE8_E_KELVIN);
        let g = self.g.unwrap_or(2.0);
        if g <= 0.0 {
            return Err(err("g", format!("must be positive, got {g}")));
        }
        let mu_b = self.mu_b_kelvin_per_tesla.unwrap_or(BOHR_MAGNETON_K_PER_T);
        if mu_b <= 0.0 {
            return Err(err("mu_b_kelvin_per_tesla", format!("must be positive, got {mu_b}")));
        }
        let system = SpinSystem::with_mu_b(spin, d, e, g, mu_b).map_err(|x| err("d_kelvin", x.to_string()))?;

        let defaults = SweepGrid::default();
        let b_min = self.b_min_tesla.unwrap_or(defaults.b_min);
        let b_max = self.b_max_tesla.unwrap_or(defaults.b_max);
        if b_min < 0.0 {
            return Err(err("b_min_tesla", format!("must be nonnegative, got {b_min}")));
        }
        if b_max < b_min {
            return Err(err("b_max_tesla", format!("must be at least b_min_tesla = {b_min}, got {b_max}")));
        }
        let steps = self.steps.unwrap_or(defaults.steps);
        if steps < 2 {
            return Err(err("steps", format!("must be at least 2, got {steps}")));
        }
        let theta_deg = self.theta_deg.unwrap_or(0.0);
        if !(0.0..=180.0).contains(&theta_deg) {
            return Err(err("theta_deg", format!("must lie in [0, 180], got {theta_deg}")));
        }
        let phi_deg = self.phi_deg.unwrap_or(0.0);
        let grid = SweepGrid::new(b_min, b_max, steps, theta_deg.to_radians(), phi_deg.to_radians())
            .map_err(|x| err("theta_deg", x.to_string()))?;

        if let Some(k) = self.state_index {
            if k >= spin.dim() {
                return Err(err("state_index", format!("must lie in [0, {}], got {k}", spin.dim() - 1)));
            }
        }
        let decimals = self.decimals.unwrap_or(DEFAULT_DECIMALS);
        if !DECIMALS_RANGE.contains(&decimals) {
            return Err(err("decimals", format!("must lie in [3, 17], got {decimals}")));
        }

        let mut warnings = Vec::new();
        if system.rhombicity_warning() {
            warnings.push(format!("|E| = {} K exceeds |D|/3 = {} K", e.abs(), d.abs() / 3.0));
        }
        Ok(RunConfig {
            system,
            grid,
            spin_text,
            theta_deg,
            phi_deg,
            output: self.output.clone(),
            state_index: self.state_index,
            decimals,
            warnings,
        })
    }
}

fn unquote(v: &str) -> &str {
    let b = v.as_bytes();
    if b.len() >= 2 && (b[0] == b'"' && b[b.len() - 1] == b'"' || b[0] == b'\'' && b[b.len() - 1] == b'\'') {
        &v[1..v.len() - 1]
    } else {
        v
    }
}

/// Accepts `10`, `2.5`, or `5/2`.
pub fn parse_spin(text: &str) -> Result<SpinQuantum, String> {
    let value = match text.split_once('/') {
        Some((num, "2")) => {
            num.trim().parse::<u32>().map(|n| n as f64 / 2.0).map_err(|_| format!("malformed spin `{text}`"))?
        }
        Some(_) => return Err(format!("malformed spin `{text}`")),
        None => text.parse::<f64>().map_err(|_| format!("malformed spin `{text}`"))?,
    };
    SpinQuantum::new(value).map_err(|e| e.to_string())
}

/// Validated settings for one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub system: SpinSystem,
    pub grid: SweepGrid,
    pub spin_text: String,
    /// Angles as given, in degrees; `grid` holds them in radians.
    pub theta_deg: f64,
    pub phi_deg: f64,
    pub output: Option<PathBuf>,
    pub state_index: Option<usize>,
    pub decimals: usize,
    pub warnings: Vec<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        ConfigValues::default().resolve().expect("defaults are valid")
    }
}

impl RunConfig {
    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        ConfigValues::parse(text)?.resolve()
    }

    /// The numeric settings as config lines; each value uses the shortest
    /// representation that parses back to the same `f64`.
    pub fn echo(&self) -> Vec<String> {
        let s = &self.system;
        let g = &self.grid;
        let mut lines = vec![
            format!("spin = {}", self.spin_text),
            format!("d_kelvin = {}", s.d),
            format!("e_kelvin = {}", s.e),
            format!("g = {}", s.g),
            format!("mu_b_kelvin_per_tesla = {}", s.mu_b),
            format!("b_min_tesla = {}", g.b_min),
            format!("b_max_tesla = {}", g.b_max),
            format!("steps = {}", g.steps),
            format!("theta_deg = {}", self.theta_deg),
            format!("phi_deg = {}", self.phi_deg),
        ];
        if let Some(k) = self.state_index {
            lines.push(format!("state_index = {k}"));
        }
        lines.push(format!("decimals = {}", self.decimals));
        lines
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn empty_config_gives_fe8_defaults() {
        let c = RunConfig::from_text("").unwrap();
        assert_eq!(c.system.d, -0.292);
        assert_eq!(c.system.e, -0.046);
        assert_eq!(c.system.g, 2.0);
        assert_eq!(c.system.spin, SpinQuantum::integer(10));
        assert_eq!(c.grid, SweepGrid::default());
        assert_eq!(c.decimals, 10);
        assert!(c.warnings.is_empty());
    }

    #[test]
    fn degrees_are_converted() {
        let c = RunConfig::from_text("[sweep]\ntheta_deg = 90\n").unwrap();
        assert!((c.grid.theta - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn strong_rhombicity_warns() {
        let c = RunConfig::from_text("e_kelvin = -0.2\nd_kelvin = -0.292").unwrap();
        assert_eq!(c.warnings.len(), 1);
    }

    #[test]
    fn errors_name_key_and_line() {
        let e = RunConfig::from_text("spin = 10\n\nfoo = 3\n").unwrap_err();
        assert_eq!((e.line, e.key.as_str()), (Some(3), "foo"));
        let e = RunConfig::from_text("d_kelvin = abc").unwrap_err();
        assert_eq!((e.line, e.key.as_str()), (Some(1), "d_kelvin"));
        let e = RunConfig::from_text("# c\nsteps = 1").unwrap_err();
        assert_eq!((e.line, e.key.as_str()), (Some(2), "steps"));
        let e = RunConfig::from_text("decimals = 2").unwrap_err();
        assert_eq!(e.key, "decimals");
        let e = RunConfig::from_text("state_index = 21").unwrap_err();
        assert_eq!(e.key, "state_index");
        assert!(RunConfig::from_text("spin = 1/3").is_err());
        assert!(RunConfig::from_text("just words").is_err());
        assert!(RunConfig::from_text("g = 1\ng = 2").is_err());
        assert!(RunConfig::from_text("b_min_tesla = 2\nb_max_tesla = 1").is_err());
        assert!(RunConfig::from_text("theta_deg = 200").is_err());
    }

    #[test]
    fn spin_forms() {
        assert_eq!(parse_spin("5/2").unwrap(), SpinQuantum::from_twice(5));
        assert_eq!(parse_spin("2.5").unwrap(), SpinQuantum::from_twice(5));
        assert_eq!(parse_spin("10").unwrap(), SpinQuantum::integer(10));
        assert!(parse_spin("-1").is_err());
    }

    #[test]
    fn overlay_prefers_flags() {
        let file = ConfigValues::parse("steps = 10\nb_max_tesla = 2").unwrap();
        let mut flags = ConfigValues::default();
        flags.set("steps", "20", None).unwrap();
        let c = file.overlay(flags).resolve().unwrap();
        assert_eq!(c.grid.steps, 20);
        assert_eq!(c.grid.b_max, 2.0);
    }

    #[test]
    fn quoted_output_path() {
        let c = RunConfig::from_text("output = \"out dir/a.csv\"").unwrap();
        assert_eq!(c.output, Some(PathBuf::from("out dir/a.csv")));
    }
}
