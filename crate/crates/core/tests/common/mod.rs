//! Dense explicit-unitary oracle shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// `U = S · C(θ) · D` on `n` sites. Basis: `|R, k⟩ ↦ k`, `|L, k⟩ ↦ n + k`.
/// Amplitude shifted past either end is dropped; the lattices used here are
/// large enough that none ever reaches it.
pub fn dense_unitary(theta: f64, nu: &[f64]) -> DMatrix<Complex64> {
    let n = nu.len();
    let mut d = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
    for (k, &v) in nu.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, 2.0 * PI * v);
        d[(k, k)] = phase;
        d[(n + k, n + k)] = phase;
    }
    let (s, c) = if theta == 0.0 {
        (0.0, 1.0)
    } else if theta == PI / 2.0 {
        (1.0, 0.0)
    } else {
        theta.sin_cos()
    };
    let mut coin = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
    for k in 0..n {
        coin[(k, k)] = Complex64::new(c, 0.0);
        coin[(k, n + k)] = Complex64::new(s, 0.0);
        coin[(n + k, k)] = Complex64::new(s, 0.0);
        coin[(n + k, n + k)] = Complex64::new(-c, 0.0);
    }
    let mut shift = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
    for k in 0..n {
        if k + 1 < n {
            shift[(k + 1, k)] = Complex64::new(1.0, 0.0);
        }
        if k > 0 {
            shift[(n + k - 1, n + k)] = Complex64::new(1.0, 0.0);
        }
    }
    shift * coin * d
}

pub fn dense_initial(n: usize, origin: usize, alpha: f64, beta: f64) -> DVector<Complex64> {
    let mut psi = DVector::<Complex64>::zeros(2 * n);
    psi[origin] = Complex64::new((alpha / 2.0).cos(), 0.0);
    psi[n + origin] = Complex64::from_polar((alpha / 2.0).sin(), beta);
    psi
}

/// `(P, P^R, P^L)` per site.
pub fn dense_probabilities(psi: &DVector<Complex64>) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let n = psi.len() / 2;
    let right: Vec<f64> = (0..n).map(|k| psi[k].norm_sqr()).collect();
    let left: Vec<f64> = (0..n).map(|k| psi[n + k].norm_sqr()).collect();
    let total = right.iter().zip(&left).map(|(r, l)| r + l).collect();
    (total, right, left)
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
