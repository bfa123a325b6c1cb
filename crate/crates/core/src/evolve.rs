//! Fused in-place evolution on the light cone.
//!
//! A walk started on one site occupies only sites with `n - n₀ ≡ t (mod 2)`
//! at time `t`. Amplitudes are therefore stored per sublattice (even and odd
//! site indices in separate arrays) and each step reads the occupied
//! sublattice and writes the empty one. All loops run over contiguous slices
//! of the current support window.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::walk::{CoinAngle, Moments, WalkState};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

// Amplitude components below this are flushed to zero at the edges of the
// support window. Their probabilities (< 1e-300) are far below double
// precision resolution of any observable, and keeping them would drive the
// arithmetic into subnormal numbers.
const NEGLIGIBLE: f64 = 1e-150;

fn negligible(z: Complex64) -> bool {
    z.re.abs() < NEGLIGIBLE && z.im.abs() < NEGLIGIBLE
}

/// Per-site phase factors split by sublattice.
#[derive(Debug, Clone, PartialEq)]
pub struct SublatticePhases {
    re: [Vec<f64>; 2],
    im: [Vec<f64>; 2],
    n_sites: usize,
}

impl SublatticePhases {
    pub fn new(phases: &[Complex64]) -> Self {
        let pick = |parity: usize, f: fn(&Complex64) -> f64| -> Vec<f64> {
            phases
                .iter()
                .skip(parity)
                .step_by(2)
                .map(f)
                .chain(std::iter::repeat_n(0.0, PAD))
                .collect()
        };
        Self {
            re: [pick(0, |z| z.re), pick(1, |z| z.re)],
            im: [pick(0, |z| z.im), pick(1, |z| z.im)],
            n_sites: phases.len(),
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }
}

/// Amplitudes of one sublattice, real and imaginary parts stored apart so
/// the step loop vectorizes.
#[derive(Debug, Clone)]
struct Sublattice {
    r_re: Vec<f64>,
    r_im: Vec<f64>,
    l_re: Vec<f64>,
    l_im: Vec<f64>,
}

impl Sublattice {
    fn from_amplitudes(r: &[Complex64], l: &[Complex64]) -> Self {
        let padded = |v: &[Complex64], f: fn(&Complex64) -> f64| -> Vec<f64> {
            v.iter()
                .map(f)
                .chain(std::iter::repeat_n(0.0, PAD))
                .collect()
        };
        Self {
            r_re: padded(r, |z| z.re),
            r_im: padded(r, |z| z.im),
            l_re: padded(l, |z| z.re),
            l_im: padded(l, |z| z.im),
        }
    }

    fn r(&self, k: usize) -> Complex64 {
        Complex64::new(self.r_re[k], self.r_im[k])
    }

    fn l(&self, k: usize) -> Complex64 {
        Complex64::new(self.l_re[k], self.l_im[k])
    }

    fn is_negligible(&self, k: usize) -> bool {
        negligible(self.r(k)) && negligible(self.l(k))
    }

    fn clear(&mut self, k: usize) {
        self.r_re[k] = 0.0;
        self.r_im[k] = 0.0;
        self.l_re[k] = 0.0;
        self.l_im[k] = 0.0;
    }
}

const LANES: usize = 4;

// Sublattice arrays carry this many zero entries past the last site so that
// every window can be rounded up to whole chunks of `LANES`. Zero source
// amplitudes produce zero output, so the padding stays empty.
const PAD: usize = LANES + 1;

/// One step over a window of sites: phase, coin, and a write of both coin
/// components into the destination slices (already offset by the shift).
/// All slices have the same length, a multiple of `LANES`; the source is
/// cleared. Returns the moments of the written amplitudes,
/// `x0` being the position of the first source site relative to the origin.
fn advance(
    src: [&mut [f64]; 4],
    phase: [&[f64]; 2],
    dst: [&mut [f64]; 4],
    (c, s): (f64, f64),
    x0: f64,
) -> Moments {
    let [ur, ui, vr, vi] = src;
    let [pr, pi] = phase;
    let [rr, ri, lr, li] = dst;
    let mut acc_r = [0.0; LANES];
    let mut acc_l = [0.0; LANES];
    let chunks = ur
        .chunks_exact_mut(LANES)
        .zip(ui.chunks_exact_mut(LANES))
        .zip(vr.chunks_exact_mut(LANES))
        .zip(vi.chunks_exact_mut(LANES))
        .zip(pr.chunks_exact(LANES).zip(pi.chunks_exact(LANES)))
        .zip(rr.chunks_exact_mut(LANES).zip(ri.chunks_exact_mut(LANES)))
        .zip(lr.chunks_exact_mut(LANES).zip(li.chunks_exact_mut(LANES)));
    let mut x = [x0, x0 + 2.0, x0 + 4.0, x0 + 6.0];
    for ((((((ur, ui), vr), vi), (pr, pi)), (rr, ri)), (lr, li)) in chunks {
        for k in 0..LANES {
            let (a_re, a_im) = (ur[k] * pr[k] - ui[k] * pi[k], ur[k] * pi[k] + ui[k] * pr[k]);
            let (b_re, b_im) = (vr[k] * pr[k] - vi[k] * pi[k], vr[k] * pi[k] + vi[k] * pr[k]);
            ur[k] = 0.0;
            ui[k] = 0.0;
            vr[k] = 0.0;
            vi[k] = 0.0;
            let (r_re, r_im) = (a_re * c + b_re * s, a_im * c + b_im * s);
            let (l_re, l_im) = (a_re * s - b_re * c, a_im * s - b_im * c);
            rr[k] = r_re;
            ri[k] = r_im;
            lr[k] = l_re;
            li[k] = l_im;
            acc_r[k] += (x[k] + 1.0) * (r_re * r_re + r_im * r_im);
            acc_l[k] += (x[k] - 1.0) * (l_re * l_re + l_im * l_im);
        }
        for xk in &mut x {
            *xk += 2.0 * LANES as f64;
        }
    }
    Moments {
        right: (acc_r[0] + acc_r[1]) + (acc_r[2] + acc_r[3]),
        left: (acc_l[0] + acc_l[1]) + (acc_l[2] + acc_l[3]),
    }
}

/// In-place evolution of a state supported on a single sublattice.
#[derive(Debug, Clone)]
pub struct Evolver {
    sub: [Sublattice; 2],
    n_sites: usize,
    origin_index: usize,
    time: usize,
    // Parity of the occupied site indices and the occupied window, as
    // sublattice indices k (site 2k + parity).
    parity: usize,
    lo: usize,
    hi: usize,
}

impl Evolver {
    pub fn new(state: WalkState) -> Result<Self> {
        let n = state.n_sites();
        if state.amp_l.len() != n {
            return Err(Error::Dimension {
                expected: n,
                found: state.amp_l.len(),
            });
        }
        let occupied: Vec<usize> = (0..n)
            .filter(|&i| state.amp_r[i] != ZERO || state.amp_l[i] != ZERO)
            .collect();
        let (first, last) = match (occupied.first(), occupied.last()) {
            (Some(&a), Some(&b)) => (a, b),
            _ => (state.origin_index, state.origin_index),
        };
        if occupied.iter().any(|i| (i - first) % 2 != 0) {
            return Err(Error::Input(
                "fast evolution needs support on a single sublattice".into(),
            ));
        }
        let split = |v: &[Complex64], parity: usize| -> Vec<Complex64> {
            v.iter().skip(parity).step_by(2).copied().collect()
        };
        let sub = [0, 1]
            .map(|p| Sublattice::from_amplitudes(&split(&state.amp_r, p), &split(&state.amp_l, p)));
        Ok(Self {
            sub,
            n_sites: n,
            origin_index: state.origin_index,
            time: state.time,
            parity: first % 2,
            lo: first / 2,
            hi: last / 2,
        })
    }

    pub fn time(&self) -> usize {
        self.time
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Occupied window `[first, last]` in site indices.
    pub fn support(&self) -> (usize, usize) {
        (2 * self.lo + self.parity, 2 * self.hi + self.parity)
    }

    /// Applies one step `S · C(θ) · D` and returns the moments of the new
    /// state.
    pub fn step(&mut self, phases: &SublatticePhases, coin: CoinAngle) -> Result<Moments> {
        if phases.n_sites() != self.n_sites {
            return Err(Error::Dimension {
                expected: self.n_sites,
                found: phases.n_sites(),
            });
        }
        let (first, last) = self.support();
        if first == 0 {
            return Err(Error::BoundaryOverflow { site: 0 });
        }
        if last + 1 >= self.n_sites {
            return Err(Error::BoundaryOverflow {
                site: self.n_sites - 1,
            });
        }

        let s = self.parity;
        let (lo, hi) = (self.lo, self.hi);
        let w = (hi - lo + 1).div_ceil(LANES) * LANES;
        let (c, sn) = (coin.cos(), coin.sin());
        let [even, odd] = &mut self.sub;
        let (src, dst) = if s == 0 { (even, odd) } else { (odd, even) };

        // site 2k+s sends |R⟩ to sublattice index k+s and |L⟩ to k+s-1
        let ar_re = &mut src.r_re[lo..lo + w];
        let ar_im = &mut src.r_im[lo..lo + w];
        let al_re = &mut src.l_re[lo..lo + w];
        let al_im = &mut src.l_im[lo..lo + w];
        let p_re = &phases.re[s][lo..lo + w];
        let p_im = &phases.im[s][lo..lo + w];
        let dr = lo + s;
        let dl = lo + s - 1;
        let br_re = &mut dst.r_re[dr..dr + w];
        let br_im = &mut dst.r_im[dr..dr + w];
        let bl_re = &mut dst.l_re[dl..dl + w];
        let bl_im = &mut dst.l_im[dl..dl + w];

        let x0 = first as f64 - self.origin_index as f64;
        let moments = advance(
            [ar_re, ar_im, al_re, al_im],
            [p_re, p_im],
            [br_re, br_im, bl_re, bl_im],
            (c, sn),
            x0,
        );

        let (mut nlo, mut nhi) = (dl, hi + s);
        while nlo < nhi && dst.is_negligible(nlo) {
            dst.clear(nlo);
            nlo += 1;
        }
        while nhi > nlo && dst.is_negligible(nhi) {
            dst.clear(nhi);
            nhi -= 1;
        }
        self.lo = nlo;
        self.hi = nhi;
        self.parity = 1 - s;
        self.time += 1;
        Ok(moments)
    }

    pub fn moments(&self) -> Moments {
        let sub = &self.sub[self.parity];
        let (first, _) = self.support();
        let mut x = first as f64 - self.origin_index as f64;
        let mut moments = Moments::default();
        for k in self.lo..=self.hi {
            moments.right += x * sub.r(k).norm_sqr();
            moments.left += x * sub.l(k).norm_sqr();
            x += 2.0;
        }
        moments
    }

    pub fn state(&self) -> WalkState {
        let mut amp_r = vec![ZERO; self.n_sites];
        let mut amp_l = vec![ZERO; self.n_sites];
        for (p, sub) in self.sub.iter().enumerate() {
            for k in (0..sub.r_re.len()).take_while(|k| 2 * k + p < self.n_sites) {
                amp_r[2 * k + p] = sub.r(k);
                amp_l[2 * k + p] = sub.l(k);
            }
        }
        WalkState {
            amp_r,
            amp_l,
            origin_index: self.origin_index,
            time: self.time,
        }
    }
}
