//! Random phase fields and their reproducible random streams.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::walk::phase_factor;

/// Whether one field is drawn per realization or a fresh one every step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DisorderMode {
    #[default]
    Static,
    Dynamic,
}

impl DisorderMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            DisorderMode::Static => "static",
            DisorderMode::Dynamic => "dynamic",
        }
    }
}

impl std::str::FromStr for DisorderMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "static" => Ok(DisorderMode::Static),
            "dynamic" => Ok(DisorderMode::Dynamic),
            other => Err(Error::config(
                "disorder_mode",
                format!("expected `static` or `dynamic`, got `{other}`"),
            )),
        }
    }
}

/// Random stream for one disorder realization.
///
/// The stream is ChaCha8 keyed by the master seed, with the realization index
/// selecting one of its 2^64 independent streams. Realizations can therefore be
/// generated in any order, on any thread, with identical results.
#[derive(Debug, Clone)]
pub struct RandomStream(ChaCha8Rng);

impl RandomStream {
    pub fn for_realization(master_seed: u64, realization_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(realization_index);
        Self(rng)
    }

    /// Uniform draw on `[0, 1)`.
    pub fn next_unit(&mut self) -> f64 {
        self.0.random::<f64>()
    }
}

/// Phase parameters `ν_n` of one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct DisorderField {
    nu: Vec<f64>,
    mode: DisorderMode,
}

impl DisorderField {
    pub fn zeros(n_sites: usize, mode: DisorderMode) -> Self {
        Self {
            nu: vec![0.0; n_sites],
            mode,
        }
    }

    pub fn from_values(nu: Vec<f64>, mode: DisorderMode) -> Self {
        Self { nu, mode }
    }

    pub fn nu(&self) -> &[f64] {
        &self.nu
    }

    pub fn mode(&self) -> DisorderMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.nu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nu.is_empty()
    }

    /// The field reflected through the centre of the lattice,
    /// `ν'_i = ν_{N-1-i}`. On a lattice centred on the origin this is
    /// `ν'_n = ν_{2n₀-n}`.
    pub fn mirrored(&self) -> Self {
        Self {
            nu: self.nu.iter().rev().copied().collect(),
            mode: self.mode,
        }
    }

    pub fn phase_factors(&self) -> Vec<Complex64> {
        self.nu.iter().map(|&nu| phase_factor(nu)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.nu.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Draws `ν_n` i.i.d. uniform on `[-width, width]`, one per site in index
/// order.
///
/// The stream is consumed identically for every width, so fields drawn from
/// the same stream at different widths are rescaled copies of each other.
pub fn sample_field(
    width: f64,
    n_sites: usize,
    stream: &mut RandomStream,
) -> Result<DisorderField> {
    fill_field(width, n_sites, DisorderMode::Static, stream)
}

pub(crate) fn fill_field(
    width: f64,
    n_sites: usize,
    mode: DisorderMode,
    stream: &mut RandomStream,
) -> Result<DisorderField> {
    if !(width.is_finite() && width >= 0.0) {
        return Err(Error::config(
            "disorder_width",
            format!("{width} must be a finite non-negative number"),
        ));
    }
    let nu = (0..n_sites)
        .map(|_| {
            let u = 2.0 * stream.next_unit() - 1.0;
            if width == 0.0 {
                0.0
            } else {
                width * u
            }
        })
        .collect();
    Ok(DisorderField { nu, mode })
}
