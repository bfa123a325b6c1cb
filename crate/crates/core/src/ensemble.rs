//! Disorder-averaged centroid dynamics.

use rayon::prelude::*;

use crate::disorder::{fill_field, DisorderField, DisorderMode, RandomStream};
use crate::error::{Error, Result};
use crate::evolve::{Evolver, SublatticePhases};
use crate::walk::{initial_state, lattice_size, CoinAngle, InitialStateAngles};

/// Everything needed to reproduce one ensemble run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub theta: CoinAngle,
    pub disorder_width: f64,
    pub initial: InitialStateAngles,
    pub horizon: usize,
    pub ensemble_size: usize,
    pub master_seed: u64,
    pub disorder_mode: DisorderMode,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.disorder_width.is_finite() && self.disorder_width >= 0.0) {
            return Err(Error::config(
                "disorder_width",
                format!(
                    "{} must be a finite non-negative number",
                    self.disorder_width
                ),
            ));
        }
        if self.horizon < 1 {
            return Err(Error::config("horizon", "must be at least 1"));
        }
        if self.ensemble_size < 1 {
            return Err(Error::config("ensemble_size", "must be at least 1"));
        }
        Ok(())
    }

    pub fn n_sites(&self) -> usize {
        lattice_size(self.horizon)
    }

    /// The walker starts at the centre of the chain.
    pub fn origin_index(&self) -> usize {
        self.horizon + 1
    }
}

/// Which copy of a realization's field the walker sees.
///
/// `Mirrored` reflects every drawn field through the origin. Running `|L⟩`
/// with mirrored fields reproduces the `|R⟩` run with direct fields reflected
/// in space, realization by realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FieldOrientation {
    #[default]
    Direct,
    Mirrored,
}

/// Centroid time series `t = 0..=T`, averaged over `samples` realizations.
#[derive(Debug, Clone, PartialEq)]
pub struct CentroidSeries {
    pub x_mean: Vec<f64>,
    pub x_r: Vec<f64>,
    pub x_l: Vec<f64>,
    pub x_stderr: Vec<f64>,
    pub samples: usize,
}

impl CentroidSeries {
    pub fn len(&self) -> usize {
        self.x_mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x_mean.is_empty()
    }

    /// Last time index, `T`.
    pub fn horizon(&self) -> usize {
        self.len().saturating_sub(1)
    }
}

/// `Σ_n (n - n₀) P_n`, without normalization.
pub fn centroid(p: &[f64], origin_index: usize) -> f64 {
    p.iter()
        .enumerate()
        .map(|(i, &pi)| (i as f64 - origin_index as f64) * pi)
        .sum()
}

/// Centroid contribution of one coin component.
///
/// The component distribution is deliberately left unnormalized, so the two
/// contributions add up to the total centroid.
pub fn component_centroid(p_component: &[f64], origin_index: usize) -> f64 {
    centroid(p_component, origin_index)
}

pub fn run_realization(config: &SimConfig, realization_index: u64) -> Result<CentroidSeries> {
    run_realization_oriented(config, realization_index, FieldOrientation::Direct)
}

pub fn run_realization_oriented(
    config: &SimConfig,
    realization_index: u64,
    orientation: FieldOrientation,
) -> Result<CentroidSeries> {
    config.validate()?;
    let (x_r, x_l) = realization_moments(config, realization_index, orientation)?;
    let x_mean: Vec<f64> = x_r.iter().zip(&x_l).map(|(r, l)| r + l).collect();
    Ok(CentroidSeries {
        x_stderr: vec![0.0; x_mean.len()],
        x_mean,
        x_r,
        x_l,
        samples: 1,
    })
}

fn realization_moments(
    config: &SimConfig,
    realization_index: u64,
    orientation: FieldOrientation,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = config.n_sites();
    let mut stream = RandomStream::for_realization(config.master_seed, realization_index);
    let draw = |stream: &mut RandomStream| -> Result<SublatticePhases> {
        let field = fill_field(config.disorder_width, n, config.disorder_mode, stream)?;
        let field: DisorderField = match orientation {
            FieldOrientation::Direct => field,
            FieldOrientation::Mirrored => field.mirrored(),
        };
        Ok(SublatticePhases::new(&field.phase_factors()))
    };

    let mut evolver = Evolver::new(initial_state(config.initial, n, config.origin_index())?)?;
    let mut x_r = Vec::with_capacity(config.horizon + 1);
    let mut x_l = Vec::with_capacity(config.horizon + 1);
    let m0 = evolver.moments();
    x_r.push(m0.right);
    x_l.push(m0.left);

    let mut phases = draw(&mut stream)?;
    for t in 0..config.horizon {
        if t > 0 && config.disorder_mode == DisorderMode::Dynamic {
            phases = draw(&mut stream)?;
        }
        let m = evolver.step(&phases, config.theta)?;
        x_r.push(m.right);
        x_l.push(m.left);
    }
    Ok((x_r, x_l))
}

// Realizations are simulated in parallel one block at a time and folded into
// the running statistics strictly in index order.
const BLOCK: usize = 64;

pub fn run_ensemble(config: &SimConfig) -> Result<CentroidSeries> {
    run_ensemble_oriented(config, FieldOrientation::Direct)
}

pub fn run_ensemble_oriented(
    config: &SimConfig,
    orientation: FieldOrientation,
) -> Result<CentroidSeries> {
    config.validate()?;
    let len = config.horizon + 1;
    let mut acc = Accumulator::new(len);
    let total = config.ensemble_size as u64;
    let mut start = 0u64;
    while start < total {
        let end = (start + BLOCK as u64).min(total);
        let block: Vec<(Vec<f64>, Vec<f64>)> = (start..end)
            .into_par_iter()
            .map(|idx| realization_moments(config, idx, orientation))
            .collect::<Result<_>>()?;
        for (x_r, x_l) in &block {
            acc.push(x_r, x_l);
        }
        start = end;
    }
    Ok(acc.finish())
}

/// Welford running mean and variance per time index.
struct Accumulator {
    count: usize,
    mean: Vec<f64>,
    m2: Vec<f64>,
    mean_r: Vec<f64>,
    mean_l: Vec<f64>,
}

impl Accumulator {
    fn new(len: usize) -> Self {
        Self {
            count: 0,
            mean: vec![0.0; len],
            m2: vec![0.0; len],
            mean_r: vec![0.0; len],
            mean_l: vec![0.0; len],
        }
    }

    fn push(&mut self, x_r: &[f64], x_l: &[f64]) {
        self.count += 1;
        let k = self.count as f64;
        for t in 0..self.mean.len() {
            let x = x_r[t] + x_l[t];
            let delta = x - self.mean[t];
            self.mean[t] += delta / k;
            self.m2[t] += delta * (x - self.mean[t]);
            self.mean_r[t] += (x_r[t] - self.mean_r[t]) / k;
            self.mean_l[t] += (x_l[t] - self.mean_l[t]) / k;
        }
    }

    fn finish(self) -> CentroidSeries {
        let m = self.count;
        let x_stderr = if m < 2 {
            vec![0.0; self.mean.len()]
        } else {
            self.m2
                .iter()
                .map(|&m2| (m2.max(0.0) / (m - 1) as f64).sqrt() / (m as f64).sqrt())
                .collect()
        };
        CentroidSeries {
            x_mean: self.mean,
            x_r: self.mean_r,
            x_l: self.mean_l,
            x_stderr,
            samples: m,
        }
    }
}
