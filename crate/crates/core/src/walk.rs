//! Walker state and the three elementary operators of a coined walk on a line.
//!
//! One time step is `S · C(θ) · D`: the phase-gain operator `D` multiplies
//! both coin components at site `n` by `exp(i 2π ν_n)`, the coin `C(θ)` mixes
//! the `|R⟩`/`|L⟩` components on every site, and the conditional shift `S`
//! moves `|R⟩` one site right and `|L⟩` one site left.
//!
//! The functions [`apply_phase`], [`apply_coin`], [`apply_shift`] and [`step`]
//! are out-of-place reference implementations; [`crate::evolve::Evolver`]
//! is the fused in-place version used by the ensemble runner.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;

use crate::disorder::DisorderField;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `(sin x, cos x)` that is exact at integer multiples of π/2.
///
/// `cos(FRAC_PI_2)` evaluates to `6.1e-17` rather than zero, which would leak
/// amplitude into components that must stay empty (pure `|L⟩` starts, the
/// Pauli-X coin).
pub(crate) fn sin_cos_exact(x: f64) -> (f64, f64) {
    for (k, &(s, c)) in [(0.0, 1.0), (1.0, 0.0), (0.0, -1.0), (-1.0, 0.0)]
        .iter()
        .enumerate()
    {
        if x == k as f64 * FRAC_PI_2 {
            return (s, c);
        }
    }
    x.sin_cos()
}

/// Coin parameter θ ∈ [0, π/2].
///
/// θ = 0 is the Pauli-Z coin, θ = π/4 the Hadamard coin and θ = π/2 the
/// Pauli-X coin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinAngle {
    theta: f64,
    cos: f64,
    sin: f64,
}

impl CoinAngle {
    pub fn new(theta: f64) -> Result<Self> {
        if !(0.0..=FRAC_PI_2).contains(&theta) {
            return Err(Error::config(
                "theta",
                format!("{theta} is outside [0, pi/2]"),
            ));
        }
        let (sin, cos) = sin_cos_exact(theta);
        Ok(Self { theta, cos, sin })
    }

    pub const PAULI_Z: CoinAngle = CoinAngle {
        theta: 0.0,
        cos: 1.0,
        sin: 0.0,
    };

    pub fn hadamard() -> Self {
        Self::new(PI / 4.0).expect("pi/4 is in range")
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn cos(&self) -> f64 {
        self.cos
    }

    pub fn sin(&self) -> f64 {
        self.sin
    }
}

/// Bloch-sphere angles of the initial coin state
/// `cos(α/2)|R⟩ + e^{iβ} sin(α/2)|L⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialStateAngles {
    alpha: f64,
    beta: f64,
}

impl InitialStateAngles {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&alpha) {
            return Err(Error::config(
                "alpha",
                format!("{alpha} is outside [0, pi]"),
            ));
        }
        if !(0.0..TAU).contains(&beta) {
            return Err(Error::config("beta", format!("{beta} is outside [0, 2pi)")));
        }
        Ok(Self { alpha, beta })
    }

    /// Pure `|R⟩`, initial condition (i).
    pub const RIGHT: InitialStateAngles = InitialStateAngles {
        alpha: 0.0,
        beta: 0.0,
    };

    /// Pure `|L⟩`, initial condition (ii).
    pub const LEFT: InitialStateAngles = InitialStateAngles {
        alpha: PI,
        beta: 0.0,
    };

    /// `(|R⟩ + i|L⟩)/√2`, initial condition (iii).
    pub const SYMMETRIC: InitialStateAngles = InitialStateAngles {
        alpha: FRAC_PI_2,
        beta: FRAC_PI_2,
    };

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Coin spinor `(a, b)` at the starting site.
    pub fn spinor(&self) -> (Complex64, Complex64) {
        let (s, c) = sin_cos_exact(self.alpha / 2.0);
        let (sb, cb) = sin_cos_exact(self.beta);
        (Complex64::new(c, 0.0), Complex64::new(cb * s, sb * s))
    }
}

/// Amplitudes `a_n` (coin `|R⟩`) and `b_n` (coin `|L⟩`) on a finite chain.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    pub amp_r: Vec<Complex64>,
    pub amp_l: Vec<Complex64>,
    pub origin_index: usize,
    pub time: usize,
}

impl WalkState {
    pub fn n_sites(&self) -> usize {
        self.amp_r.len()
    }

    /// `Σ_n |a_n|² + |b_n|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.amp_r
            .iter()
            .chain(&self.amp_l)
            .map(|z| z.norm_sqr())
            .sum()
    }
}

/// Per-site probabilities of a state.
#[derive(Debug, Clone, PartialEq)]
pub struct Probabilities {
    pub total: Vec<f64>,
    pub right: Vec<f64>,
    pub left: Vec<f64>,
}

/// Number of sites needed for a `horizon`-step run with no edge effects.
pub fn lattice_size(horizon: usize) -> usize {
    2 * horizon + 3
}

pub fn initial_state(
    angles: InitialStateAngles,
    n_sites: usize,
    origin_index: usize,
) -> Result<WalkState> {
    if n_sites < 1 {
        return Err(Error::config("n_sites", "lattice needs at least one site"));
    }
    if origin_index >= n_sites {
        return Err(Error::config(
            "origin_index",
            format!("{origin_index} is outside a {n_sites}-site lattice"),
        ));
    }
    let (a, b) = angles.spinor();
    let mut amp_r = vec![ZERO; n_sites];
    let mut amp_l = vec![ZERO; n_sites];
    amp_r[origin_index] = a;
    amp_l[origin_index] = b;
    Ok(WalkState {
        amp_r,
        amp_l,
        origin_index,
        time: 0,
    })
}

/// `exp(i 2π ν)`.
pub fn phase_factor(nu: f64) -> Complex64 {
    let (s, c) = (TAU * nu).sin_cos();
    Complex64::new(c, s)
}

pub fn apply_phase(state: &WalkState, field: &DisorderField) -> Result<WalkState> {
    if field.len() != state.n_sites() {
        return Err(Error::Dimension {
            expected: state.n_sites(),
            found: field.len(),
        });
    }
    let mut out = state.clone();
    for ((a, b), &nu) in out.amp_r.iter_mut().zip(&mut out.amp_l).zip(field.nu()) {
        if nu != 0.0 {
            let p = phase_factor(nu);
            *a *= p;
            *b *= p;
        }
    }
    Ok(out)
}

pub fn apply_coin(state: &WalkState, coin: CoinAngle) -> WalkState {
    let (c, s) = (coin.cos(), coin.sin());
    let mut out = state.clone();
    for (a, b) in out.amp_r.iter_mut().zip(&mut out.amp_l) {
        let (ra, rb) = (*a, *b);
        *a = ra * c + rb * s;
        *b = ra * s - rb * c;
    }
    out
}

pub fn apply_shift(state: &WalkState) -> Result<WalkState> {
    let n = state.n_sites();
    for side in [0, n - 1] {
        if state.amp_r[side] != ZERO || state.amp_l[side] != ZERO {
            return Err(Error::BoundaryOverflow { site: side });
        }
    }
    let mut amp_r = vec![ZERO; n];
    let mut amp_l = vec![ZERO; n];
    amp_r[1..].copy_from_slice(&state.amp_r[..n - 1]);
    amp_l[..n - 1].copy_from_slice(&state.amp_l[1..]);
    Ok(WalkState {
        amp_r,
        amp_l,
        origin_index: state.origin_index,
        time: state.time,
    })
}

/// One full step `S · C · D`; advances `time` by one.
pub fn step(state: &WalkState, field: &DisorderField, coin: CoinAngle) -> Result<WalkState> {
    let phased = apply_phase(state, field)?;
    let mut out = apply_shift(&apply_coin(&phased, coin))?;
    out.time += 1;
    Ok(out)
}

pub fn probabilities(state: &WalkState) -> Probabilities {
    let right: Vec<f64> = state.amp_r.iter().map(|z| z.norm_sqr()).collect();
    let left: Vec<f64> = state.amp_l.iter().map(|z| z.norm_sqr()).collect();
    let total = right.iter().zip(&left).map(|(r, l)| r + l).collect();
    Probabilities { total, right, left }
}

/// First moments `Σ (n - n₀) P^R_n` and `Σ (n - n₀) P^L_n` of a state.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Moments {
    pub right: f64,
    pub left: f64,
}

impl Moments {
    pub fn total(&self) -> f64 {
        self.right + self.left
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_1_SQRT_2;

    use super::*;
    use crate::disorder::{sample_field, DisorderMode, RandomStream};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn state_from(a: &[Complex64], b: &[Complex64]) -> WalkState {
        WalkState {
            amp_r: a.to_vec(),
            amp_l: b.to_vec(),
            origin_index: a.len() / 2,
            time: 0,
        }
    }

    #[test]
    fn initial_state_pure_right() {
        let s = initial_state(InitialStateAngles::RIGHT, 5, 2).unwrap();
        let expect: Vec<_> = [0.0, 0.0, 1.0, 0.0, 0.0]
            .iter()
            .map(|&x| c(x, 0.0))
            .collect();
        assert_eq!(s.amp_r, expect);
        assert!(s.amp_l.iter().all(|z| *z == ZERO));
        assert_eq!(s.time, 0);
    }

    #[test]
    fn initial_state_pure_left() {
        let s = initial_state(InitialStateAngles::LEFT, 5, 2).unwrap();
        assert_eq!(s.amp_l[2], c(1.0, 0.0));
        assert!(s.amp_r.iter().all(|z| *z == ZERO));
    }

    #[test]
    fn initial_state_symmetric() {
        let s = initial_state(InitialStateAngles::SYMMETRIC, 5, 2).unwrap();
        assert!((s.amp_r[2] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((s.amp_l[2] - c(0.0, FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn initial_state_rejects_bad_lattice() {
        assert!(matches!(
            initial_state(InitialStateAngles::RIGHT, 5, 5),
            Err(Error::Config { .. })
        ));
        assert!(initial_state(InitialStateAngles::RIGHT, 0, 0).is_err());
    }

    #[test]
    fn angle_ranges_are_enforced() {
        assert!(CoinAngle::new(2.0).is_err());
        assert!(CoinAngle::new(-0.1).is_err());
        assert!(CoinAngle::new(FRAC_PI_2).is_ok());
        assert!(InitialStateAngles::new(PI + 0.1, 0.0).is_err());
        assert!(InitialStateAngles::new(0.0, TAU).is_err());
    }

    #[test]
    fn zero_field_leaves_state_unchanged() {
        let s = state_from(&[c(0.3, 0.1), c(0.5, -0.2), c(0.0, 0.4)], &[c(0.2, 0.0); 3]);
        let field = DisorderField::zeros(3, DisorderMode::Static);
        assert_eq!(apply_phase(&s, &field).unwrap(), s);
    }

    #[test]
    fn quarter_phase_multiplies_by_i() {
        let s = state_from(&[c(0.3, 0.1), c(0.5, -0.2), c(0.0, 0.4)], &[c(0.2, 0.7); 3]);
        let field = DisorderField::from_values(vec![0.0, 0.25, 0.0], DisorderMode::Static);
        let out = apply_phase(&s, &field).unwrap();
        assert!((out.amp_r[1] - s.amp_r[1] * c(0.0, 1.0)).norm() < 1e-15);
        assert!((out.amp_l[1] - s.amp_l[1] * c(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(out.amp_r[0], s.amp_r[0]);
        let (p, q) = (probabilities(&s), probabilities(&out));
        for i in 0..3 {
            assert!((p.right[i] - q.right[i]).abs() < 1e-15);
            assert!((p.left[i] - q.left[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn random_phase_preserves_norm() {
        let n = 100;
        let mut stream = RandomStream::for_realization(3, 0);
        let field = sample_field(0.5, n, &mut stream).unwrap();
        let amps: Vec<_> = (0..n)
            .map(|i| c((i as f64).sin(), (i as f64 * 0.3).cos()))
            .collect();
        let mut s = state_from(&amps, &amps.iter().rev().copied().collect::<Vec<_>>());
        let norm = s.norm_sqr().sqrt();
        for z in s.amp_r.iter_mut().chain(s.amp_l.iter_mut()) {
            *z /= norm;
        }
        let before: f64 = probabilities(&s).total.iter().sum();
        let after: f64 = probabilities(&apply_phase(&s, &field).unwrap())
            .total
            .iter()
            .sum();
        assert!((before - after).abs() < 1e-14);
    }

    #[test]
    fn phase_length_mismatch() {
        let s = initial_state(InitialStateAngles::RIGHT, 5, 2).unwrap();
        let field = DisorderField::zeros(4, DisorderMode::Static);
        assert!(matches!(
            apply_phase(&s, &field),
            Err(Error::Dimension {
                expected: 5,
                found: 4
            })
        ));
    }

    #[test]
    fn coin_limits() {
        let s = state_from(&[c(0.6, 0.0)], &[c(0.0, 0.8)]);
        let z = apply_coin(&s, CoinAngle::new(0.0).unwrap());
        assert_eq!(z.amp_r[0], c(0.6, 0.0));
        assert_eq!(z.amp_l[0], c(-0.0, -0.8));
        let x = apply_coin(&s, CoinAngle::new(FRAC_PI_2).unwrap());
        assert_eq!(x.amp_r[0], c(0.0, 0.8));
        assert_eq!(x.amp_l[0], c(0.6, 0.0));
        let h = apply_coin(&state_from(&[c(1.0, 0.0)], &[ZERO]), CoinAngle::hadamard());
        assert!((h.amp_r[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((h.amp_l[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn shift_moves_components() {
        let one = c(1.0, 0.0);
        let s = state_from(&[ZERO, one, ZERO], &[ZERO; 3]);
        assert_eq!(apply_shift(&s).unwrap().amp_r, vec![ZERO, ZERO, one]);
        let s = state_from(&[ZERO; 3], &[ZERO, one, ZERO]);
        assert_eq!(apply_shift(&s).unwrap().amp_l, vec![one, ZERO, ZERO]);
    }

    #[test]
    fn shift_refuses_boundary_amplitude() {
        let one = c(1.0, 0.0);
        let s = state_from(&[one, ZERO, ZERO], &[ZERO; 3]);
        assert!(matches!(
            apply_shift(&s),
            Err(Error::BoundaryOverflow { site: 0 })
        ));
        let s = state_from(&[ZERO; 3], &[ZERO, ZERO, one]);
        assert!(matches!(
            apply_shift(&s),
            Err(Error::BoundaryOverflow { site: 2 })
        ));
    }

    #[test]
    fn pauli_z_step_moves_right() {
        let mut stream = RandomStream::for_realization(1, 0);
        let field = sample_field(0.5, 7, &mut stream).unwrap();
        let s = initial_state(InitialStateAngles::RIGHT, 7, 3).unwrap();
        let s = step(&s, &field, CoinAngle::PAULI_Z).unwrap();
        let p = probabilities(&s);
        assert!((p.total[4] - 1.0).abs() < 1e-15);
        assert_eq!(s.time, 1);
    }

    #[test]
    fn pauli_x_two_cycle() {
        let field = DisorderField::zeros(7, DisorderMode::Static);
        let coin = CoinAngle::new(FRAC_PI_2).unwrap();
        let s0 = initial_state(InitialStateAngles::RIGHT, 7, 3).unwrap();
        let s1 = step(&s0, &field, coin).unwrap();
        assert_eq!(s1.amp_l[2], c(1.0, 0.0));
        assert_eq!(probabilities(&s1).total.iter().sum::<f64>(), 1.0);
        let s2 = step(&s1, &field, coin).unwrap();
        assert_eq!(probabilities(&s2).total, probabilities(&s0).total);
    }

    #[test]
    fn hadamard_keeps_normalization() {
        let n = lattice_size(50);
        let field = DisorderField::zeros(n, DisorderMode::Static);
        let mut s = initial_state(InitialStateAngles::RIGHT, n, 51).unwrap();
        for _ in 0..50 {
            s = step(&s, &field, CoinAngle::hadamard()).unwrap();
        }
        let total: f64 = probabilities(&s).total.iter().sum();
        assert!((total - 1.0).abs() < 1e-10);
    }
}
