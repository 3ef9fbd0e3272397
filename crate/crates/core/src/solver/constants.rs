//! Estimate constants, computed by quadrature of their defining integrals.
//!
//! The constants are never fitted to data: `c_alpha` and `c_alpha_ell`
//! come from the explicit integrals via a hyperbolic substitution that
//! makes the integrands smooth and exponentially decaying, integrated by
//! composite Gauss-Legendre quadrature.

use std::f64::consts::PI;

/// Nodes and weights of `n`-point Gauss-Legendre quadrature on `[-1, 1]`,
/// by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev-like initial guess.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and derivative by upward recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite Gauss-Legendre integral of `f` over `[a, b]`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let (xs, ws) = gauss_legendre(order);
    let mut total = 0.0;
    let width = (b - a) / panels as f64;
    for p in 0..panels {
        let lo = a + p as f64 * width;
        let mid = lo + 0.5 * width;
        let half = 0.5 * width;
        for (x, w) in xs.iter().zip(&ws) {
            total += w * half * f(mid + half * x);
        }
    }
    total
}

/// Cauchy-Schwarz constant of the invariant-distribution estimate:
/// `C_α = (∫_R (1 + 4π² s²)^{-α} ds)^{1/2}`, for `α > 1/2`.
///
/// Substituting `2π s = sinh u` gives `(2π)^{-1} ∫_R cosh(u)^{1-2α} du`,
/// a smooth integrand decaying like `e^{-(2α-1)|u|}`.
pub fn c_alpha(alpha: f64) -> f64 {
    assert!(alpha > 0.5, "the defining integral diverges for α <= 1/2");
    let cutoff = (80.0 / (2.0 * alpha - 1.0)).min(700.0);
    let integrand = |u: f64| u.cosh().powf(1.0 - 2.0 * alpha);
    let val = 2.0 * integrate(integrand, 0.0, cutoff, 64, 24) / (2.0 * PI);
    val.sqrt()
}

/// Constant of the weighted Green estimate:
/// `C_{α,ℓ}² = ∫_0^∞ (2πt)^{2ℓ} ∫_t^∞ (1+4π²s²)^{-(ℓ+α)} ds dt + (mirror)`,
/// for `α > 1`. Swapping the integration order collapses it to
/// `2 (2π)^{-2} (2ℓ+1)^{-1} ∫_0^∞ w^{2ℓ+1} (1+w²)^{-(ℓ+α)} dw`,
/// computed with `w = sinh u`.
pub fn c_alpha_ell(alpha: f64, ell: u32) -> f64 {
    assert!(alpha > 1.0, "the defining integral diverges for α <= 1");
    let le = ell as f64;
    let cutoff = (80.0 / (2.0 * alpha - 2.0)).min(700.0);
    // Evaluated in log space: sinh/cosh powers overflow separately long
    // before their product decays.
    let integrand = |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        let ln_sinh = u + (0.5 * (1.0 - (-2.0 * u).exp())).ln();
        let ln_cosh = u + (0.5 * (1.0 + (-2.0 * u).exp())).ln();
        ((2.0 * le + 1.0) * ln_sinh + (1.0 - 2.0 * (le + alpha)) * ln_cosh).exp()
    };
    let inner = integrate(integrand, 0.0, cutoff, 96, 24);
    (2.0 * inner / (4.0 * PI * PI * (2.0 * le + 1.0))).sqrt()
}

/// Log-gamma by the Lanczos approximation (g = 7, 9 terms). Used by test
/// oracles to cross-check the quadrature constants against closed forms.
pub fn ln_gamma(x: f64) -> f64 {
    #[allow(clippy::excessive_precision)]
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection formula.
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + 7.5;
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}
