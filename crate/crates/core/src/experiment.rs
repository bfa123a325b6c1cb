//! Preset pipelines: run the simulations a preset calls for and write its
//! artifacts.
//!
//! Output layout, relative to the output directory:
//!
//! | preset   | series files                               | sweep tables              |
//! |----------|--------------------------------------------|---------------------------|
//! | `fig1`   | `series_W{w}_{right,left,symmetric}.csv`   | –                         |
//! | `fig2`   | `series_{right,left,symmetric}.csv`        | –                         |
//! | `fig3`   | `series_theta_{label}_W{w}.csv`            | `sweep_theta_{label}.csv` |
//! | `fig4a`  | `series_point{i}.csv`                      | `sweep_theta.csv`         |
//! | `fig4b`  | `series_point{i}.csv`                      | `sweep_W.csv`             |
//! | `custom` | `series.csv`                               | –                         |
//!
//! plus `summary.json` and `manifest.txt`. CSV and JSON files can be switched
//! off through the format flags; the manifest is always written.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::analysis::{
    extract_x_max, log_spaced, plateau_level, sweep_disorder_with, sweep_theta_with, Direction,
    SweepOptions, SweepParameter, SweepTable,
};
use crate::config::{ExperimentSpec, Preset};
use crate::ensemble::{run_ensemble, CentroidSeries, SimConfig};
use crate::error::{Error, Result};
use crate::output::{
    write_manifest, write_series_csv, write_summary_json, write_sweep_csv, FitRecord, RunManifest,
    SeriesRecord,
};
use crate::walk::{CoinAngle, InitialStateAngles};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Fraction of the run averaged for the late-time plateau.
pub const PLATEAU_FRACTION: f64 = 0.2;

/// Longest horizon a fig4 sweep point is extended to.
pub const MAX_SWEEP_HORIZON: usize = 20_000;

pub const FIG1_WIDTHS: [f64; 2] = [0.0, 0.2];
pub const FIG3_WIDTHS: [f64; 5] = [0.1, 0.2, 0.3, 0.4, 0.5];
/// Coin angles of the three-coin comparison, with file labels.
pub const FIG3_COINS: [(f64, &str); 3] = [
    (PI / 9.0, "pi_9"),
    (PI / 4.0, "pi_4"),
    (7.0 * PI / 18.0, "7pi_18"),
];

/// Fit window of the coin-angle sweep, `[π/90, π/9]`.
pub const FIG4A_RANGE: (f64, f64) = (PI / 90.0, PI / 9.0);
/// Fit window of the disorder sweep.
pub const FIG4B_RANGE: (f64, f64) = (0.05, 0.5);
pub const SWEEP_POINTS: usize = 8;
/// Points beyond the fit window showing where the scaling breaks down.
pub const FIG4A_BREAKDOWN: [f64; 3] = [PI / 4.0, 7.0 * PI / 18.0, 4.0 * PI / 9.0];

pub fn initial_conditions() -> [(InitialStateAngles, &'static str); 3] {
    [
        (InitialStateAngles::RIGHT, "right"),
        (InitialStateAngles::LEFT, "left"),
        (InitialStateAngles::SYMMETRIC, "symmetric"),
    ]
}

pub fn fig4a_thetas() -> Vec<f64> {
    let mut thetas = log_spaced(FIG4A_RANGE.0, FIG4A_RANGE.1, SWEEP_POINTS);
    thetas.extend(FIG4A_BREAKDOWN);
    thetas
}

pub fn fig4b_widths() -> Vec<f64> {
    log_spaced(FIG4B_RANGE.0, FIG4B_RANGE.1, SWEEP_POINTS)
}

/// Starting horizon for a sweep point.
///
/// The time of the maximum grows roughly like `W⁻⁴ cot²θ` over the swept
/// ranges; the estimate below overshoots it slightly, and the sweep extends
/// any point whose maximum still lands late.
pub fn sweep_horizon(theta: f64, w: f64) -> usize {
    let t_est = 0.0193 / (w.powi(4) * theta.tan().powi(2));
    let h = (1.25 * t_est / 100.0).ceil() * 100.0;
    if h.is_finite() {
        (h as usize).clamp(200, MAX_SWEEP_HORIZON)
    } else {
        200
    }
}

fn fig3_horizon(theta: f64, w: f64) -> usize {
    if theta == FIG3_COINS[0].0 && w == FIG3_WIDTHS[0] {
        2000
    } else {
        500
    }
}

/// Collects written files so a failed run can clean up after itself.
struct Outputs {
    dir: PathBuf,
    csv: bool,
    written: Vec<PathBuf>,
    checksums: BTreeMap<String, String>,
    series: Vec<SeriesRecord>,
    tables: Vec<(String, SweepTable)>,
    fit: Option<FitRecord>,
}

impl Outputs {
    fn path(&mut self, name: &str) -> PathBuf {
        let path = self.dir.join(name);
        self.written.push(path.clone());
        path
    }

    fn series(&mut self, name: &str, cfg: &SimConfig, series: &CentroidSeries) -> Result<()> {
        let max = extract_x_max(series, Direction::for_initial(cfg.initial))?;
        let plateau = plateau_level(series, PLATEAU_FRACTION).ok();
        if self.csv {
            let path = self.path(name);
            let sum = write_series_csv(series, &path)?;
            self.checksums.insert(name.to_string(), sum);
        }
        self.series.push(SeriesRecord {
            file: name.to_string(),
            config: *cfg,
            x_max: max.x_max,
            t_max: max.t_max,
            returning: max.returning,
            plateau,
        });
        Ok(())
    }

    fn sweep(&mut self, name: &str, table: SweepTable) -> Result<()> {
        if self.csv {
            let path = self.path(name);
            let sum = write_sweep_csv(&table, &path)?;
            self.checksums.insert(name.to_string(), sum);
        }
        self.tables.push((name.to_string(), table));
        Ok(())
    }

    fn sweep_points(&mut self, table: &SweepTable) -> Result<()> {
        for (i, row) in table.rows.iter().enumerate() {
            self.series(&format!("series_point{i}.csv"), &row.config, &row.series)?;
        }
        Ok(())
    }

    fn remove_all(&self) {
        for path in &self.written {
            let _ = fs::remove_file(path);
        }
    }
}

/// Runs the pipeline bound to the experiment's preset and writes its artifacts.
/// On failure every file this run created is removed again.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<RunManifest> {
    let start = Instant::now();
    let base = spec.base_config()?;
    let dir = spec.output_dir.clone();
    let dir_existed = dir.is_dir();
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut out = Outputs {
        dir: dir.clone(),
        csv: spec.format.csv,
        written: Vec::new(),
        checksums: BTreeMap::new(),
        series: Vec::new(),
        tables: Vec::new(),
        fit: None,
    };
    let result = execute(spec, &base, &mut out).and_then(|()| {
        let mut manifest = RunManifest {
            preset: spec.preset.name().to_string(),
            config: base,
            master_seed: base.master_seed,
            version: VERSION.to_string(),
            duration: start.elapsed(),
            checksums: out.checksums.clone(),
        };
        if spec.format.json {
            let path = out.path("summary.json");
            let sum =
                write_summary_json(&manifest, &out.series, &out.tables, out.fit.as_ref(), &path)?;
            manifest.checksums.insert("summary.json".into(), sum);
        }
        manifest.duration = start.elapsed();
        let path = out.path("manifest.txt");
        write_manifest(&manifest, &path)?;
        Ok(manifest)
    });
    if result.is_err() {
        out.remove_all();
        if !dir_existed {
            let _ = fs::remove_dir(&dir);
        }
    }
    result
}

fn execute(spec: &ExperimentSpec, base: &SimConfig, out: &mut Outputs) -> Result<()> {
    match spec.preset {
        Preset::Fig1 => {
            for w in FIG1_WIDTHS {
                for (initial, label) in initial_conditions() {
                    let cfg = SimConfig {
                        disorder_width: w,
                        initial,
                        ..*base
                    };
                    out.series(
                        &format!("series_W{w}_{label}.csv"),
                        &cfg,
                        &run_ensemble(&cfg)?,
                    )?;
                }
            }
        }
        Preset::Fig2 => {
            for (initial, label) in initial_conditions() {
                let cfg = SimConfig { initial, ..*base };
                out.series(&format!("series_{label}.csv"), &cfg, &run_ensemble(&cfg)?)?;
            }
        }
        Preset::Fig3 => {
            for (theta, label) in FIG3_COINS {
                let cfg = SimConfig {
                    theta: CoinAngle::new(theta)?,
                    ..*base
                };
                let horizons = FIG3_WIDTHS
                    .iter()
                    .map(|&w| {
                        spec.overrides
                            .horizon
                            .unwrap_or_else(|| fig3_horizon(theta, w))
                    })
                    .collect();
                let options = SweepOptions {
                    horizons: Some(horizons),
                    ..Default::default()
                };
                let table = sweep_disorder_with(&cfg, &FIG3_WIDTHS, &options)?;
                for row in &table.rows {
                    let name = format!("series_theta_{label}_W{}.csv", row.value);
                    out.series(&name, &row.config, &row.series)?;
                }
                out.sweep(&format!("sweep_theta_{label}.csv"), table)?;
            }
        }
        Preset::Fig4a => {
            let thetas = fig4a_thetas();
            let options = fig4_options(spec, thetas.iter().map(|&t| (t, base.disorder_width)));
            let table = sweep_theta_with(base, &thetas, &options)?;
            finish_fig4(out, table, "sweep_theta.csv", FIG4A_RANGE)?;
        }
        Preset::Fig4b => {
            let widths = fig4b_widths();
            let theta = base.theta.theta();
            let options = fig4_options(spec, widths.iter().map(|&w| (theta, w)));
            let table = sweep_disorder_with(base, &widths, &options)?;
            finish_fig4(out, table, "sweep_W.csv", FIG4B_RANGE)?;
        }
        Preset::Custom => out.series("series.csv", base, &run_ensemble(base)?)?,
    }
    Ok(())
}

/// An explicit horizon is used as given; otherwise each point starts from
/// [`sweep_horizon`] and is extended while its maximum lands late.
fn fig4_options(spec: &ExperimentSpec, points: impl Iterator<Item = (f64, f64)>) -> SweepOptions {
    match spec.overrides.horizon {
        Some(_) => SweepOptions::default(),
        None => SweepOptions {
            horizons: Some(points.map(|(theta, w)| sweep_horizon(theta, w)).collect()),
            extend_to: Some(MAX_SWEEP_HORIZON),
            ..Default::default()
        },
    }
}

fn finish_fig4(out: &mut Outputs, table: SweepTable, name: &str, range: (f64, f64)) -> Result<()> {
    let fit = table.fit(range)?;
    out.sweep_points(&table)?;
    let parameter = table.parameter;
    out.sweep(name, table)?;
    out.fit = Some(FitRecord {
        table: name.to_string(),
        parameter,
        fit,
    });
    Ok(())
}

/// Reads a sweep CSV and fits `column` against `against` over `range`.
pub fn fit_csv(
    path: &Path,
    column: &str,
    against: SweepParameter,
    range: (f64, f64),
) -> Result<crate::analysis::PowerLawFit> {
    let table = crate::output::read_csv(path)?;
    let ys = table.column(column)?;
    let xs = table.column(against.column())?;
    crate::analysis::fit_power_law(&xs, &ys, range)
}
