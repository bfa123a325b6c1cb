//! Boomerang observables and power-law scaling fits.

use std::f64::consts::FRAC_PI_2;

use crate::ensemble::{run_ensemble_oriented, CentroidSeries, FieldOrientation, SimConfig};
use crate::error::{Error, Result};
use crate::walk::{CoinAngle, InitialStateAngles};

/// Sign convention for the maximum displacement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Rightward,
    Leftward,
}

impl Direction {
    /// Direction of the initial drift: rightward unless the start is mostly
    /// `|L⟩`.
    pub fn for_initial(angles: InitialStateAngles) -> Self {
        if angles.alpha() > FRAC_PI_2 {
            Direction::Leftward
        } else {
            Direction::Rightward
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Direction::Rightward => "rightward",
            Direction::Leftward => "leftward",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxDisplacement {
    pub x_max: f64,
    pub t_max: usize,
    /// False when the extremum sits at the last time step, i.e. the centroid
    /// had not turned around within the horizon.
    pub returning: bool,
}

/// Largest excursion of `x_mean` in the given direction (earliest extremum,
/// no smoothing). Leftward reports the magnitude of the minimum.
pub fn extract_x_max(series: &CentroidSeries, direction: Direction) -> Result<MaxDisplacement> {
    if series.is_empty() {
        return Err(Error::Input("empty centroid series".into()));
    }
    let sign = match direction {
        Direction::Rightward => 1.0,
        Direction::Leftward => -1.0,
    };
    let (t_max, x_max) = series.x_mean.iter().map(|&x| sign * x).enumerate().fold(
        (0, f64::NEG_INFINITY),
        |best, (t, x)| {
            if x > best.1 {
                (t, x)
            } else {
                best
            }
        },
    );
    Ok(MaxDisplacement {
        x_max,
        t_max,
        returning: t_max < series.horizon(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub log_prefactor: f64,
    pub r_squared: f64,
    pub fit_range: (f64, f64),
    pub points: usize,
}

impl PowerLawFit {
    pub fn predict(&self, x: f64) -> f64 {
        (self.log_prefactor + self.exponent * x.ln()).exp()
    }
}

/// Least-squares line through `(ln x, ln y)` for the points with
/// `lo <= x <= hi`.
pub fn fit_power_law(xs: &[f64], ys: &[f64], range: (f64, f64)) -> Result<PowerLawFit> {
    if xs.len() != ys.len() {
        return Err(Error::Fit(format!(
            "{} abscissae but {} ordinates",
            xs.len(),
            ys.len()
        )));
    }
    let (lo, hi) = range;
    let mut pts = Vec::new();
    for (&x, &y) in xs.iter().zip(ys) {
        if x < lo || x > hi {
            continue;
        }
        if !(x > 0.0 && y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::Fit(format!(
                "non-positive point ({x}, {y}) inside the fit range"
            )));
        }
        pts.push((x.ln(), y.ln()));
    }
    if pts.len() < 3 {
        return Err(Error::Fit(format!(
            "{} points in [{lo}, {hi}], need at least 3",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        let ss_res: f64 = pts
            .iter()
            .map(|p| (p.1 - intercept - slope * p.0).powi(2))
            .sum();
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(PowerLawFit {
        exponent: slope,
        log_prefactor: intercept,
        r_squared,
        fit_range: range,
        points: pts.len(),
    })
}

/// `n` points log-spaced over `[lo, hi]`, endpoints exact.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| match i {
                    0 => lo,
                    i if i == n - 1 => hi,
                    i => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
                })
                .collect()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plateau {
    pub level: f64,
    pub band: f64,
    /// First time index of the averaging window.
    pub start: usize,
}

/// Mean and sample standard deviation of `x_mean` over the last
/// `tail_fraction` of the horizon.
pub fn plateau_level(series: &CentroidSeries, tail_fraction: f64) -> Result<Plateau> {
    if !(tail_fraction > 0.0 && tail_fraction <= 0.5) {
        return Err(Error::Input(format!(
            "tail fraction {tail_fraction} is outside (0, 0.5]"
        )));
    }
    let horizon = series.horizon();
    let start = ((1.0 - tail_fraction) * horizon as f64).ceil() as usize;
    let tail = series.x_mean.get(start..).unwrap_or(&[]);
    if tail.len() < 10 {
        return Err(Error::Input(format!(
            "plateau window holds {} points, need at least 10",
            tail.len()
        )));
    }
    let n = tail.len() as f64;
    let level = tail.iter().sum::<f64>() / n;
    let var = tail.iter().map(|x| (x - level).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(Plateau {
        level,
        band: var.sqrt(),
        start,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    Theta,
    DisorderWidth,
}

impl SweepParameter {
    /// Column name used in sweep tables.
    pub fn column(&self) -> &'static str {
        match self {
            SweepParameter::Theta => "theta",
            SweepParameter::DisorderWidth => "W",
        }
    }
}

/// Knobs for a parameter sweep beyond the base configuration.
#[derive(Debug, Clone, Default)]
pub struct SweepOptions {
    pub orientation: FieldOrientation,
    /// One horizon per sweep point; `None` uses the base horizon everywhere.
    pub horizons: Option<Vec<usize>>,
    /// Defaults to the drift direction of the initial state.
    pub direction: Option<Direction>,
    /// Horizon cap for automatic extension. When set, a point whose maximum
    /// falls in the last quarter of its run is repeated with a horizon 1.5
    /// times longer, until the maximum settles or the cap is reached.
    pub extend_to: Option<usize>,
}

/// A maximum this late in the run may not have turned around yet.
fn peaks_late(max: &MaxDisplacement, horizon: usize) -> bool {
    4 * max.t_max > 3 * horizon
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub config: SimConfig,
    pub max: MaxDisplacement,
    pub series: CentroidSeries,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub parameter: SweepParameter,
    pub direction: Direction,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.value).collect()
    }

    pub fn x_max(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.max.x_max).collect()
    }

    pub fn fit(&self, range: (f64, f64)) -> Result<PowerLawFit> {
        fit_power_law(&self.values(), &self.x_max(), range)
    }
}

pub fn sweep_theta(base: &SimConfig, thetas: &[f64]) -> Result<SweepTable> {
    sweep_theta_with(base, thetas, &SweepOptions::default())
}

pub fn sweep_theta_with(
    base: &SimConfig,
    thetas: &[f64],
    options: &SweepOptions,
) -> Result<SweepTable> {
    for &theta in thetas {
        if !(theta > 0.0 && theta <= FRAC_PI_2) {
            return Err(Error::config(
                "theta",
                format!("sweep values must lie in (0, pi/2], got {theta}"),
            ));
        }
    }
    sweep(
        base,
        thetas,
        SweepParameter::Theta,
        options,
        |cfg, theta| {
            cfg.theta = CoinAngle::new(theta)?;
            Ok(())
        },
    )
}

pub fn sweep_disorder(base: &SimConfig, widths: &[f64]) -> Result<SweepTable> {
    sweep_disorder_with(base, widths, &SweepOptions::default())
}

pub fn sweep_disorder_with(
    base: &SimConfig,
    widths: &[f64],
    options: &SweepOptions,
) -> Result<SweepTable> {
    for &w in widths {
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::config(
                "disorder_width",
                format!("sweep values must be positive, got {w}"),
            ));
        }
    }
    sweep(
        base,
        widths,
        SweepParameter::DisorderWidth,
        options,
        |cfg, w| {
            cfg.disorder_width = w;
            Ok(())
        },
    )
}

// Every point reuses the base master seed, so points differ only in the
// swept parameter and share their disorder draws.
fn sweep(
    base: &SimConfig,
    values: &[f64],
    parameter: SweepParameter,
    options: &SweepOptions,
    set: impl Fn(&mut SimConfig, f64) -> Result<()>,
) -> Result<SweepTable> {
    if let Some(h) = &options.horizons {
        if h.len() != values.len() {
            return Err(Error::config(
                "horizon",
                format!("{} horizons for {} sweep points", h.len(), values.len()),
            ));
        }
    }
    let direction = options
        .direction
        .unwrap_or_else(|| Direction::for_initial(base.initial));
    let mut rows = Vec::with_capacity(values.len());
    for (i, &value) in values.iter().enumerate() {
        let mut config = *base;
        set(&mut config, value)?;
        if let Some(h) = &options.horizons {
            config.horizon = h[i];
        }
        let mut series = run_ensemble_oriented(&config, options.orientation)?;
        let mut max = extract_x_max(&series, direction)?;
        if let Some(cap) = options.extend_to {
            while peaks_late(&max, config.horizon) && config.horizon < cap {
                config.horizon = (config.horizon + config.horizon.div_ceil(2)).min(cap);
                series = run_ensemble_oriented(&config, options.orientation)?;
                max = extract_x_max(&series, direction)?;
            }
        }
        rows.push(SweepRow {
            value,
            config,
            max,
            series,
        });
    }
    Ok(SweepTable {
        parameter,
        direction,
        rows,
    })
}
