//! Uniform-grid machinery: FFT, spectral and finite-difference
//! derivatives, and cumulative quadrature.
//!
//! The window is `[-L, L)` sampled at `N` uniform nodes `t_i = -L + i h`,
//! `h = 2L/N`. Data is expected to be Schwartz-like: decayed below the
//! tail tolerance at the window ends. Under that assumption the trapezoid
//! rule on the periodic grid is spectrally accurate, the FFT derivative is
//! exact up to the resolved bandwidth, and an 8th-order stencil scheme is
//! available for data that is bounded but not window-periodic (such as
//! antiderivatives of data with nonzero mean).

use crate::linalg::RatMat;
use crate::rat::{rat, rint, to_f64, Rat};
use num_complex::Complex64;
use num_traits::Zero;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub n: usize,
    pub l: f64,
}

impl GridSpec {
    pub fn new(n: usize, l: f64) -> Self {
        assert!(n >= 16, "grid too coarse");
        assert!(l > 0.0);
        Self { n, l }
    }

    pub fn h(&self) -> f64 {
        2.0 * self.l / self.n as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        -self.l + i as f64 * self.h()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }
}

/// In-place iterative radix-2 FFT. `n` must be a power of two.
pub fn fft(data: &mut [Complex64], inverse: bool) {
    let n = data.len();
    assert!(n.is_power_of_two(), "FFT length must be a power of two");
    // Bit reversal permutation.
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            data.swap(i, j);
        }
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let ang = sign * 2.0 * std::f64::consts::PI / len as f64;
        let wlen = Complex64::new(ang.cos(), ang.sin());
        for start in (0..n).step_by(len) {
            let mut w = Complex64::new(1.0, 0.0);
            for k in 0..len / 2 {
                let u = data[start + k];
                let v = data[start + k + len / 2] * w;
                data[start + k] = u + v;
                data[start + k + len / 2] = u - v;
                w *= wlen;
            }
        }
        len <<= 1;
    }
    if inverse {
        let inv = 1.0 / n as f64;
        for x in data.iter_mut() {
            *x *= inv;
        }
    }
}

/// Fraction of spectral energy in the top octave `|k| > N/4`.
pub fn nyquist_energy_fraction(values: &[Complex64]) -> f64 {
    let n = values.len();
    let mut hat = values.to_vec();
    fft(&mut hat, false);
    let total: f64 = hat.iter().map(|z| z.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let top: f64 = (0..n)
        .filter(|&k| {
            let signed = if k <= n / 2 { k as i64 } else { k as i64 - n as i64 };
            signed.unsigned_abs() as usize > n / 4
        })
        .map(|k| hat[k].norm_sqr())
        .sum();
    top / total
}

/// Spectral derivative on the periodized window. Exact for band-limited
/// periodic data; requires a power-of-two node count.
pub fn spectral_derivative(spec: &GridSpec, values: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(values.len(), spec.n);
    let n = spec.n;
    let mut hat = values.to_vec();
    fft(&mut hat, false);
    let base = std::f64::consts::PI / spec.l; // 2π / (2L)
    for (k, v) in hat.iter_mut().enumerate() {
        let signed = if k < n / 2 {
            k as i64
        } else if k == n / 2 {
            0 // Nyquist mode has no well-defined odd derivative
        } else {
            k as i64 - n as i64
        };
        *v *= Complex64::new(0.0, base * signed as f64);
    }
    fft(&mut hat, true);
    hat
}

/// Exact finite-difference weights for the `m`-th derivative on integer
/// offsets, from the rational moment system.
fn fd_weights(offsets: &[i64], m: usize) -> Vec<f64> {
    let k = offsets.len();
    assert!(m < k);
    let mut rows = Vec::with_capacity(k);
    for p in 0..k {
        rows.push(
            offsets
                .iter()
                .map(|&o| {
                    let mut v = rint(1);
                    for _ in 0..p {
                        v *= rint(o);
                    }
                    v
                })
                .collect::<Vec<Rat>>(),
        );
    }
    let mat = RatMat::from_rows(rows);
    let mut rhs = vec![Rat::zero(); k];
    // d^m/dx^m x^p at 0 = m! [p == m]
    let mut fact = rint(1);
    for i in 1..=m {
        fact *= rint(i as i64);
    }
    rhs[m] = fact;
    let w = mat.solve(&rhs).expect("moment system is invertible");
    w.iter().map(to_f64).collect()
}

/// 8th-order first derivative with one-sided closures at the window ends.
/// Local, so it tolerates data that is not window-periodic.
pub fn fd8_derivative(spec: &GridSpec, values: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(values.len(), spec.n);
    let n = spec.n;
    let h = spec.h();
    let central: Vec<i64> = (-4..=4).collect();
    let wc = fd_weights(&central, 1);
    let mut out = vec![Complex64::zero(); n];
    for i in 4..n - 4 {
        let mut acc = Complex64::zero();
        for (w, &o) in wc.iter().zip(&central) {
            acc += values[(i as i64 + o) as usize] * *w;
        }
        out[i] = acc / h;
    }
    // One-sided 9-point stencils at the ends.
    for i in 0..4 {
        let offsets: Vec<i64> = (0..9).map(|o| o - i as i64).collect();
        let w = fd_weights(&offsets, 1);
        let mut acc = Complex64::zero();
        for (wj, &o) in w.iter().zip(&offsets) {
            acc += values[(i as i64 + o) as usize] * *wj;
        }
        out[i] = acc / h;
    }
    for i in n - 4..n {
        let offsets: Vec<i64> = (0..9).map(|o| o - 8 + (n - 1 - i) as i64).collect();
        let w = fd_weights(&offsets, 1);
        let mut acc = Complex64::zero();
        for (wj, &o) in w.iter().zip(&offsets) {
            acc += values[(i as i64 + o) as usize] * *wj;
        }
        out[i] = acc / h;
    }
    out
}

/// Weights integrating the degree-7 interpolant through 8 consecutive
/// nodes over one grid interval. `shift` positions the stencil relative
/// to the interval's left node (0 means the stencil starts there).
fn cotes_weights(shift: i64) -> Vec<f64> {
    // Nodes at x = shift, shift+1, ..., shift+7; integrate over [0, 1].
    let mut rows = Vec::with_capacity(8);
    for p in 0..8usize {
        rows.push(
            (0..8)
                .map(|j| {
                    let x = rint(shift + j as i64);
                    let mut v = rint(1);
                    for _ in 0..p {
                        v *= x.clone();
                    }
                    v
                })
                .collect::<Vec<Rat>>(),
        );
    }
    let mat = RatMat::from_rows(rows);
    let rhs: Vec<Rat> = (0..8).map(|p| rat(1, p as i64 + 1)).collect();
    mat.solve(&rhs)
        .expect("Cotes system is invertible")
        .iter()
        .map(to_f64)
        .collect()
}

/// Cumulative integral `u_i = int_{t_0}^{t_i} f`, by degree-7 local
/// interpolation per interval. `u_0 = 0`.
pub fn cumulative_integral(spec: &GridSpec, values: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(values.len(), spec.n);
    let n = spec.n;
    let h = spec.h();
    // Cache the handful of distinct stencil shifts.
    let mut cache: std::collections::BTreeMap<i64, Vec<f64>> = std::collections::BTreeMap::new();
    let mut out = vec![Complex64::zero(); n];
    let mut acc = Complex64::zero();
    for i in 0..n - 1 {
        let start = (i as i64 - 3).clamp(0, n as i64 - 8);
        let shift = start - i as i64;
        let w = cache.entry(shift).or_insert_with(|| cotes_weights(shift));
        let mut inc = Complex64::zero();
        for (j, wj) in w.iter().enumerate() {
            inc += values[(start + j as i64) as usize] * *wj;
        }
        acc += inc * h;
        out[i + 1] = acc;
    }
    out
}

/// Trapezoid integral over the periodic window: spectrally accurate for
/// smooth data decayed at the ends.
pub fn window_integral(spec: &GridSpec, values: &[Complex64]) -> Complex64 {
    values.iter().sum::<Complex64>() * spec.h()
}

/// Weighted squared L² norm `h Σ w_i |f_i|²`.
pub fn weighted_l2_sq(spec: &GridSpec, values: &[Complex64], weight: impl Fn(f64) -> f64) -> f64 {
    values
        .iter()
        .enumerate()
        .map(|(i, v)| weight(spec.node(i)) * v.norm_sqr())
        .sum::<f64>()
        * spec.h()
}
