//! Flat `key=value` experiment configuration.
//!
//! ```text
//! # Hadamard walk, figure-1 layout with a different seed
//! preset=fig1
//! master_seed=42
//! ensemble_size=2000
//! ```
//!
//! Recognised keys: `preset`, `theta`, `disorder_width`, `alpha`, `beta`,
//! `horizon`, `ensemble_size`, `master_seed`, `disorder_mode`, `output_dir`,
//! `format`. Blank lines and `#` comments are ignored. Angles accept plain
//! numbers or multiples of pi such as `pi/4`, `7pi/18` or `0.5*pi`.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::disorder::DisorderMode;
use crate::ensemble::SimConfig;
use crate::error::{Error, Result};
use crate::walk::{CoinAngle, InitialStateAngles};

pub const KEYS: [&str; 11] = [
    "preset",
    "theta",
    "disorder_width",
    "alpha",
    "beta",
    "horizon",
    "ensemble_size",
    "master_seed",
    "disorder_mode",
    "output_dir",
    "format",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig1,
    Fig2,
    Fig3,
    Fig4a,
    Fig4b,
    Custom,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::Fig1,
        Preset::Fig2,
        Preset::Fig3,
        Preset::Fig4a,
        Preset::Fig4b,
        Preset::Custom,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4a => "fig4a",
            Preset::Fig4b => "fig4b",
            Preset::Custom => "custom",
        }
    }

    /// Simulation keys the preset varies itself; they cannot be overridden.
    pub fn swept_keys(&self) -> &'static [&'static str] {
        match self {
            Preset::Fig1 => &["alpha", "beta", "disorder_width"],
            Preset::Fig2 => &["alpha", "beta"],
            Preset::Fig3 => &["theta", "disorder_width"],
            Preset::Fig4a => &["theta"],
            Preset::Fig4b => &["disorder_width"],
            Preset::Custom => &[],
        }
    }

    /// Base configuration before overrides. For swept keys the value is only
    /// a placeholder.
    pub fn defaults(&self) -> SimConfig {
        let mut cfg = SimConfig {
            theta: CoinAngle::hadamard(),
            disorder_width: 0.2,
            initial: InitialStateAngles::RIGHT,
            horizon: 300,
            ensemble_size: 5000,
            master_seed: 1,
            disorder_mode: DisorderMode::Static,
        };
        match self {
            Preset::Fig1 | Preset::Fig2 | Preset::Custom => {}
            Preset::Fig3 => cfg.horizon = 500,
            Preset::Fig4a => cfg.disorder_width = 0.3,
            Preset::Fig4b => {}
        }
        cfg
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                Error::config(
                    "preset",
                    format!("unknown preset `{s}` (fig1, fig2, fig3, fig4a, fig4b, custom)"),
                )
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutputFormat {
    pub csv: bool,
    pub json: bool,
}

impl Default for OutputFormat {
    fn default() -> Self {
        Self {
            csv: true,
            json: true,
        }
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut out = OutputFormat {
            csv: false,
            json: false,
        };
        for part in s.split(',').map(str::trim) {
            match part {
                "csv" => out.csv = true,
                "json" => out.json = true,
                other => {
                    return Err(Error::config(
                        "format",
                        format!("unknown format `{other}` (csv, json)"),
                    ))
                }
            }
        }
        Ok(out)
    }
}

/// Explicitly set simulation parameters.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub theta: Option<f64>,
    pub disorder_width: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub horizon: Option<usize>,
    pub ensemble_size: Option<usize>,
    pub master_seed: Option<u64>,
    pub disorder_mode: Option<DisorderMode>,
}

impl Overrides {
    fn keys(&self) -> Vec<&'static str> {
        let mut keys = Vec::new();
        let mut add = |set: bool, k| {
            if set {
                keys.push(k)
            }
        };
        add(self.theta.is_some(), "theta");
        add(self.disorder_width.is_some(), "disorder_width");
        add(self.alpha.is_some(), "alpha");
        add(self.beta.is_some(), "beta");
        add(self.horizon.is_some(), "horizon");
        add(self.ensemble_size.is_some(), "ensemble_size");
        add(self.master_seed.is_some(), "master_seed");
        add(self.disorder_mode.is_some(), "disorder_mode");
        keys
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub preset: Preset,
    pub overrides: Overrides,
    pub output_dir: PathBuf,
    pub format: OutputFormat,
}

impl ExperimentSpec {
    pub fn new(preset: Preset) -> Self {
        Self {
            preset,
            overrides: Overrides::default(),
            output_dir: PathBuf::from("output").join(preset.name()),
            format: OutputFormat::default(),
        }
    }

    /// Preset defaults with the overrides applied, validated.
    pub fn base_config(&self) -> Result<SimConfig> {
        let mut cfg = self.preset.defaults();
        let o = &self.overrides;
        if let Some(theta) = o.theta {
            cfg.theta = CoinAngle::new(theta)?;
        }
        if let Some(w) = o.disorder_width {
            cfg.disorder_width = w;
        }
        cfg.initial = InitialStateAngles::new(
            o.alpha.unwrap_or(cfg.initial.alpha()),
            o.beta.unwrap_or(cfg.initial.beta()),
        )?;
        if let Some(h) = o.horizon {
            cfg.horizon = h;
        }
        if let Some(m) = o.ensemble_size {
            cfg.ensemble_size = m;
        }
        if let Some(seed) = o.master_seed {
            cfg.master_seed = seed;
        }
        if let Some(mode) = o.disorder_mode {
            cfg.disorder_mode = mode;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<()> {
        // Values that were given must be in range before missing ones are
        // reported.
        self.base_config()?;
        let set = self.overrides.keys();
        for key in self.preset.swept_keys() {
            if set.contains(key) {
                return Err(Error::config(
                    *key,
                    format!("preset {} sweeps this parameter itself", self.preset),
                ));
            }
        }
        if self.preset == Preset::Custom {
            for key in [
                "theta",
                "disorder_width",
                "alpha",
                "beta",
                "horizon",
                "ensemble_size",
                "master_seed",
            ] {
                if !set.contains(&key) {
                    return Err(Error::config(key, "missing key required by preset custom"));
                }
            }
        }
        Ok(())
    }
}

/// Parses an angle: a number, or `[k][*]pi[/d]`.
pub fn parse_angle(text: &str) -> Option<f64> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if let Ok(v) = t.parse::<f64>() {
        return v.is_finite().then_some(v);
    }
    let idx = t.find("pi")?;
    let (coef, rest) = (&t[..idx], &t[idx + 2..]);
    let coef = coef.strip_suffix('*').unwrap_or(coef);
    let k = if coef.is_empty() {
        1.0
    } else {
        coef.parse::<f64>().ok()?
    };
    let d = match rest {
        "" => 1.0,
        r => r.strip_prefix('/')?.parse::<f64>().ok()?,
    };
    let v = k * PI / d;
    (v.is_finite() && d != 0.0).then_some(v)
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse::<T>()
        .map_err(|_| Error::config(key, format!("cannot parse `{value}`")))
}

fn parse_angle_value(key: &str, value: &str) -> Result<f64> {
    parse_angle(value).ok_or_else(|| Error::config(key, format!("cannot parse angle `{value}`")))
}

pub fn parse_config(text: &str) -> Result<ExperimentSpec> {
    let mut seen = BTreeSet::new();
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::config(
                line.to_string(),
                format!("line {} is not of the form key=value", lineno + 1),
            )
        })?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(Error::config(key, "unknown key"));
        }
        if !seen.insert(key.to_string()) {
            return Err(Error::config(key, "given more than once"));
        }
        pairs.push((key, value));
    }

    let preset = match pairs.iter().find(|(k, _)| *k == "preset") {
        Some((_, v)) => v.parse()?,
        None => Preset::Custom,
    };
    let mut spec = ExperimentSpec::new(preset);
    let o = &mut spec.overrides;
    for (key, value) in pairs {
        match key {
            "preset" => {}
            "theta" => o.theta = Some(parse_angle_value(key, value)?),
            "alpha" => o.alpha = Some(parse_angle_value(key, value)?),
            "beta" => o.beta = Some(parse_angle_value(key, value)?),
            "disorder_width" => o.disorder_width = Some(parse_value(key, value)?),
            "horizon" => o.horizon = Some(parse_value(key, value)?),
            "ensemble_size" => o.ensemble_size = Some(parse_value(key, value)?),
            "master_seed" => o.master_seed = Some(parse_value(key, value)?),
            "disorder_mode" => o.disorder_mode = Some(value.parse()?),
            "output_dir" => spec.output_dir = PathBuf::from(value),
            "format" => spec.format = value.parse()?,
            _ => unreachable!("key list checked above"),
        }
    }
    spec.check()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key_of(err: Error) -> String {
        match err {
            Error::Config { key, .. } => key,
            other => panic!("expected a config error, got {other}"),
        }
    }

    #[test]
    fn preset_with_seed() {
        let spec = parse_config("preset=fig1\nmaster_seed=42").unwrap();
        assert_eq!(spec.preset, Preset::Fig1);
        assert_eq!(spec.overrides.master_seed, Some(42));
        let cfg = spec.base_config().unwrap();
        assert_eq!(cfg.master_seed, 42);
        assert_eq!(cfg.ensemble_size, 5000);
        assert_eq!(cfg.horizon, 300);
    }

    #[test]
    fn theta_out_of_range() {
        let err = parse_config("preset=fig2\ntheta=2.0").unwrap_err();
        assert_eq!(key_of(err), "theta");
    }

    #[test]
    fn custom_needs_horizon() {
        let text = "preset=custom\ntheta=pi/4\ndisorder_width=0.2\nalpha=0\nbeta=0\n\
                    ensemble_size=10\nmaster_seed=3";
        assert_eq!(key_of(parse_config(text).unwrap_err()), "horizon");
        let spec = parse_config(&format!("{text}\nhorizon=50")).unwrap();
        let cfg = spec.base_config().unwrap();
        assert_eq!(cfg.horizon, 50);
        assert_eq!(cfg.disorder_mode, DisorderMode::Static);
        assert!((cfg.theta.theta() - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn unknown_and_repeated_keys() {
        assert_eq!(
            key_of(parse_config("preset=fig1\ncolour=red").unwrap_err()),
            "colour"
        );
        assert_eq!(
            key_of(parse_config("master_seed=1\nmaster_seed=2").unwrap_err()),
            "master_seed"
        );
        assert_eq!(key_of(parse_config("preset=fig9").unwrap_err()), "preset");
    }

    #[test]
    fn unparseable_values_name_their_key() {
        for (text, key) in [
            ("preset=fig1\nmaster_seed=-3", "master_seed"),
            ("preset=fig1\nensemble_size=lots", "ensemble_size"),
            ("preset=fig1\nensemble_size=0", "ensemble_size"),
            ("preset=fig2\ndisorder_width=-0.1", "disorder_width"),
            ("preset=fig1\ndisorder_mode=frozen", "disorder_mode"),
            ("preset=fig1\nformat=xml", "format"),
            ("preset=fig4b\nalpha=4", "alpha"),
            ("preset=fig4b\nhorizon=0", "horizon"),
        ] {
            assert_eq!(key_of(parse_config(text).unwrap_err()), key, "{text}");
        }
    }

    #[test]
    fn swept_keys_cannot_be_set() {
        assert_eq!(
            key_of(parse_config("preset=fig4a\ntheta=0.1").unwrap_err()),
            "theta"
        );
        assert_eq!(
            key_of(parse_config("preset=fig1\ndisorder_width=0.1").unwrap_err()),
            "disorder_width"
        );
        assert!(parse_config("preset=fig4a\ndisorder_width=0.1").is_ok());
    }

    #[test]
    fn comments_blank_lines_and_paths() {
        let spec = parse_config(
            "# demo\n\npreset = fig3   # the coin comparison\noutput_dir = /tmp/x\nformat = csv\n",
        )
        .unwrap();
        assert_eq!(spec.preset, Preset::Fig3);
        assert_eq!(spec.output_dir, PathBuf::from("/tmp/x"));
        assert_eq!(
            spec.format,
            OutputFormat {
                csv: true,
                json: false
            }
        );
        assert_eq!(
            ExperimentSpec::new(Preset::Fig1).output_dir,
            PathBuf::from("output/fig1")
        );
    }

    #[test]
    fn angle_expressions() {
        assert_eq!(parse_angle("0.5"), Some(0.5));
        assert_eq!(parse_angle("pi"), Some(PI));
        assert_eq!(parse_angle("pi/4"), Some(PI / 4.0));
        assert_eq!(parse_angle("7pi/18"), Some(7.0 * PI / 18.0));
        assert_eq!(parse_angle("7*pi/18"), Some(7.0 * PI / 18.0));
        assert_eq!(parse_angle("pi/0"), None);
        assert_eq!(parse_angle("tau"), None);
    }

    #[test]
    fn missing_equals_sign() {
        assert!(parse_config("preset fig1").is_err());
    }
}
