//! Oscillator eigenbasis for the Heisenberg model.
//!
//! For the standard pair (`λ = m E3*`, `X = E1`, `Y = E2`) the operator
//! `π(Δ) = -d²/dt² + 4π²m²t² + 4π²m²` is the harmonic oscillator with
//! frequency `2π|m|` plus a central offset. Its eigenfunctions are the
//! scaled Hermite functions `e_n(t) = σ^{1/2} ψ_n(σ t)`, `σ = (2π|m|)^{1/2}`,
//! with eigenvalues `μ_n = 2π|m|(2n+1) + 4π²m²`.

use std::f64::consts::PI;

/// Scaling `σ = sqrt(2π|m|)`.
pub fn sigma(m: f64) -> f64 {
    (2.0 * PI * m.abs()).sqrt()
}

/// Eigenvalue `μ_n = 2π|m|(2n+1) + 4π²m²` of `π(Δ)`.
pub fn eigenvalue(m: f64, n: usize) -> f64 {
    2.0 * PI * m.abs() * (2 * n + 1) as f64 + 4.0 * PI * PI * m * m
}

/// Values `e_0(t), ..., e_{nmax-1}(t)` by the stable upward recurrence.
pub fn basis_values(m: f64, nmax: usize, t: f64) -> Vec<f64> {
    let s = sigma(m);
    let x = s * t;
    let mut out = Vec::with_capacity(nmax);
    if nmax == 0 {
        return out;
    }
    let psi0 = PI.powf(-0.25) * (-0.5 * x * x).exp();
    out.push(s.sqrt() * psi0);
    if nmax == 1 {
        return out;
    }
    out.push(2.0_f64.sqrt() * x * out[0]);
    for n in 1..nmax - 1 {
        let next = x * (2.0 / (n as f64 + 1.0)).sqrt() * out[n]
            - (n as f64 / (n as f64 + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
    out
}

/// Coefficients of `d/dt Σ c_n e_n` in the same basis (length grows by 1):
/// `out_k = σ (sqrt((k+1)/2) c_{k+1} - sqrt(k/2) c_{k-1})`.
pub fn derivative_coeffs(m: f64, coeffs: &[num_complex::Complex64]) -> Vec<num_complex::Complex64> {
    let s = sigma(m);
    let n = coeffs.len();
    let mut out = vec![num_complex::Complex64::new(0.0, 0.0); n + 1];
    for (k, o) in out.iter_mut().enumerate() {
        let up = if k + 1 < n {
            coeffs[k + 1] * ((k as f64 + 1.0) / 2.0).sqrt()
        } else {
            num_complex::Complex64::new(0.0, 0.0)
        };
        let down = if k >= 1 && k - 1 < n {
            coeffs[k - 1] * (k as f64 / 2.0).sqrt()
        } else {
            num_complex::Complex64::new(0.0, 0.0)
        };
        *o = (up - down) * s;
    }
    out
}

/// Coefficients of `t · Σ c_n e_n`:
/// `out_k = σ^{-1} (sqrt((k+1)/2) c_{k+1} + sqrt(k/2) c_{k-1})`.
pub fn mul_t_coeffs(m: f64, coeffs: &[num_complex::Complex64]) -> Vec<num_complex::Complex64> {
    let s = sigma(m);
    let n = coeffs.len();
    let mut out = vec![num_complex::Complex64::new(0.0, 0.0); n + 1];
    for (k, o) in out.iter_mut().enumerate() {
        let up = if k + 1 < n {
            coeffs[k + 1] * ((k as f64 + 1.0) / 2.0).sqrt()
        } else {
            num_complex::Complex64::new(0.0, 0.0)
        };
        let down = if k >= 1 && k - 1 < n {
            coeffs[k - 1] * (k as f64 / 2.0).sqrt()
        } else {
            num_complex::Complex64::new(0.0, 0.0)
        };
        *o = (up + down) / s;
    }
    out
}

/// Integrals `∫ e_n dt` for `n < nmax`. Odd `n` vanish; even `n` follow the
/// two-step recurrence `I_{n+1} = sqrt(n/(n+1)) I_{n-1}` obtained by
/// integrating the derivative recurrence.
pub fn basis_integrals(m: f64, nmax: usize) -> Vec<f64> {
    let s = sigma(m);
    let mut out = vec![0.0; nmax];
    if nmax == 0 {
        return out;
    }
    // ∫ ψ_0 = sqrt(2) π^{1/4}; scaling contributes 1/sqrt(σ).
    out[0] = 2.0_f64.sqrt() * PI.powf(0.25) / s.sqrt();
    let mut prev = out[0];
    let mut n = 0usize;
    while n + 2 < nmax {
        let next = (((n + 1) as f64) / ((n + 2) as f64)).sqrt() * prev;
        out[n + 2] = next;
        prev = next;
        n += 2;
    }
    out
}
