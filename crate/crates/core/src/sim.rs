//! Nilflow simulator in Malcev coordinates of the second kind.
//!
//! Points on the nilmanifold are represented by coordinates
//! `(x_1, ..., x_d) in [0,1)^d` through `x = exp(x_1 E_1) ... exp(x_d E_d)`;
//! the lattice is the set of integer-coordinate words (the basis is
//! strongly based). The flow right-multiplies by `exp(tX)` via the float
//! BCH product and reduces back to the fundamental window.
//!
//! The projection to the torus factor is exactly linear in the
//! first-layer coordinates, so pullback characters and their coboundaries
//! integrate in closed form along each step; a composite Gauss rule is
//! available as the generic fallback.

use crate::algebra::{AlgebraError, NilpotentLieAlgebra};
use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("time step {dt} does not resolve the top observable frequency {max_freq}")]
    UnderResolved { dt: f64, max_freq: f64 },
    #[error("invalid input: {0}")]
    BadInput(String),
}

/// Point on the nilmanifold: second-kind Malcev coordinates reduced to
/// the fundamental window `[0, 1)^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct NilPoint {
    pub coords: Vec<f64>,
}

impl NilPoint {
    pub fn identity(alg: &NilpotentLieAlgebra) -> Self {
        NilPoint {
            coords: vec![0.0; alg.dim()],
        }
    }

    pub fn new(alg: &NilpotentLieAlgebra, coords: Vec<f64>) -> Result<Self, SimError> {
        if coords.len() != alg.dim() {
            return Err(SimError::BadInput(format!(
                "point has {} coordinates, algebra dimension is {}",
                coords.len(),
                alg.dim()
            )));
        }
        Ok(NilPoint {
            coords: coords.iter().map(|c| c.rem_euclid(1.0)).collect(),
        })
    }

    /// First-layer coordinates: the torus projection.
    pub fn torus_part<'a>(&'a self, alg: &NilpotentLieAlgebra) -> &'a [f64] {
        &self.coords[..alg.generators()]
    }
}

/// Log of the second-kind word `exp(x_1 E_1) ... exp(x_d E_d)`.
pub fn log_of_coords(alg: &NilpotentLieAlgebra, coords: &[f64]) -> Result<Vec<f64>, SimError> {
    let d = alg.dim();
    let mut w = vec![0.0; d];
    for i in 0..d {
        if coords[i] == 0.0 {
            continue;
        }
        let mut e = vec![0.0; d];
        e[i] = coords[i];
        w = alg.bch_f(&w, &e)?;
    }
    Ok(w)
}

/// Second-kind coordinates of `exp(w)`, by peeling the flag.
pub fn coords_of_log(alg: &NilpotentLieAlgebra, w: &[f64]) -> Result<Vec<f64>, SimError> {
    let d = alg.dim();
    let mut rest = w.to_vec();
    let mut coords = vec![0.0; d];
    for i in 0..d {
        // Brackets only feed deeper layers, so after peeling the first i
        // factors the i-th log coordinate is the i-th word coordinate.
        let xi = rest[i];
        coords[i] = xi;
        let mut e = vec![0.0; d];
        e[i] = -xi;
        rest = alg.bch_f(&e, &rest)?;
    }
    Ok(coords)
}

/// Reduces `exp(w)` to its fundamental-domain representative by lattice
/// generators, one coordinate at a time: each left translation only
/// modifies deeper coordinates, so a single shallow-to-deep pass lands in
/// the window.
pub fn reduce_log(alg: &NilpotentLieAlgebra, w: &[f64]) -> Result<NilPoint, SimError> {
    let d = alg.dim();
    let mut cur = w.to_vec();
    for i in 0..d {
        let coords = coords_of_log(alg, &cur)?;
        let k = coords[i].floor();
        if k != 0.0 {
            let mut gamma = vec![0.0; d];
            gamma[i] = -k;
            cur = alg.bch_f(&gamma, &cur)?;
        }
    }
    let coords = coords_of_log(alg, &cur)?;
    // Guard against -0.0 / 1.0-epsilon artifacts.
    Ok(NilPoint {
        coords: coords.iter().map(|c| c.rem_euclid(1.0)).collect(),
    })
}

/// One flow step: `x . exp(tX)`, reduced to the window.
pub fn flow_step(
    alg: &NilpotentLieAlgebra,
    x: &NilPoint,
    generator: &[f64],
    t: f64,
) -> Result<NilPoint, SimError> {
    let w = flow_step_log(alg, x, generator, t)?;
    reduce_log(alg, &w)
}

/// Unreduced flow step in log coordinates (used by the volume tests).
pub fn flow_step_log(
    alg: &NilpotentLieAlgebra,
    x: &NilPoint,
    generator: &[f64],
    t: f64,
) -> Result<Vec<f64>, SimError> {
    let w = log_of_coords(alg, &x.coords)?;
    let tx: Vec<f64> = generator.iter().map(|g| g * t).collect();
    Ok(alg.bch_f(&w, &tx)?)
}

/// Observables along the flow.
#[derive(Debug, Clone)]
pub enum Observable {
    /// Constant 1.
    Constant,
    /// Torus character pullback `χ_M ∘ p`, `M != 0`.
    Character { m: Vec<i64> },
    /// Coboundary `X u` for `u = Σ c_M χ_M ∘ p` (closed-form derivative).
    Coboundary { terms: Vec<(Complex64, Vec<i64>)> },
}

impl Observable {
    pub fn character(m: Vec<i64>) -> Result<Self, SimError> {
        if m.iter().all(|&v| v == 0) {
            return Err(SimError::BadInput(
                "character exponent must be nonzero (constant otherwise)".into(),
            ));
        }
        Ok(Observable::Character { m })
    }

    /// Largest torus frequency `|<M, Ω>|` occurring in the observable.
    pub fn max_frequency(&self, omega: &[f64]) -> f64 {
        let freq = |m: &[i64]| {
            m.iter()
                .zip(omega)
                .map(|(&mi, &w)| mi as f64 * w)
                .sum::<f64>()
                .abs()
        };
        match self {
            Observable::Constant => 0.0,
            Observable::Character { m } => freq(m),
            Observable::Coboundary { terms } => terms
                .iter()
                .map(|(_, m)| freq(m))
                .fold(0.0, f64::max),
        }
    }

    /// Pointwise value; needs Ω for the coboundary derivative factor.
    pub fn eval(&self, alg: &NilpotentLieAlgebra, omega: &[f64], x: &NilPoint) -> Complex64 {
        let phase = |m: &[i64]| {
            let theta: f64 = m
                .iter()
                .zip(x.torus_part(alg))
                .map(|(&mi, &xi)| mi as f64 * xi)
                .sum();
            Complex64::new(0.0, 2.0 * PI * theta).exp()
        };
        match self {
            Observable::Constant => Complex64::new(1.0, 0.0),
            Observable::Character { m } => phase(m),
            Observable::Coboundary { terms } => terms
                .iter()
                .map(|(c, m)| {
                    let omega_m: f64 = m
                        .iter()
                        .zip(omega)
                        .map(|(&mi, &w)| mi as f64 * w)
                        .sum();
                    c * Complex64::new(0.0, 2.0 * PI * omega_m) * phase(m)
                })
                .sum(),
        }
    }

    /// Value of the primitive `u` itself (coboundary observables only).
    pub fn primitive_value(&self, alg: &NilpotentLieAlgebra, x: &NilPoint) -> Option<Complex64> {
        let Observable::Coboundary { terms } = self else {
            return None;
        };
        let val = terms
            .iter()
            .map(|(c, m)| {
                let theta: f64 = m
                    .iter()
                    .zip(x.torus_part(alg))
                    .map(|(&mi, &xi)| mi as f64 * xi)
                    .sum();
                c * Complex64::new(0.0, 2.0 * PI * theta).exp()
            })
            .sum();
        Some(val)
    }

    /// Sup-norm bound `Σ |c_M|` of the primitive.
    pub fn primitive_sup_bound(&self) -> Option<f64> {
        let Observable::Coboundary { terms } = self else {
            return None;
        };
        Some(terms.iter().map(|(c, _)| c.norm()).sum())
    }
}

/// Integration rule along the orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitQuadrature {
    /// Per-step closed form (exact in `t` for the shipped observables).
    ClosedForm,
    /// Composite Gauss-Legendre (generic fallback).
    Gauss(usize),
}

/// Time average `(1/T) ∫_0^T obs(φ^t x_0) dt`.
pub fn birkhoff_average(
    alg: &NilpotentLieAlgebra,
    x0: &NilPoint,
    generator: &[f64],
    obs: &Observable,
    t_total: f64,
    dt: f64,
    rule: OrbitQuadrature,
) -> Result<Complex64, SimError> {
    if t_total <= 0.0 || dt <= 0.0 {
        return Err(SimError::BadInput("T and dt must be positive".into()));
    }
    let omega = crate::diophantine::frequency_vector_f64(alg, generator);
    let max_freq = obs.max_frequency(&omega);
    if dt * max_freq > 0.5 {
        return Err(SimError::UnderResolved { dt, max_freq });
    }
    let steps = (t_total / dt).ceil() as usize;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut x = x0.clone();
    let mut t_done = 0.0;
    for s in 0..steps {
        let step = if s + 1 == steps { t_total - t_done } else { dt };
        if step <= 0.0 {
            break;
        }
        acc += step_integral(alg, &x, &omega, obs, step, rule);
        x = flow_step(alg, &x, generator, step)?;
        t_done += step;
    }
    Ok(acc / t_total)
}

fn step_integral(
    alg: &NilpotentLieAlgebra,
    x: &NilPoint,
    omega: &[f64],
    obs: &Observable,
    step: f64,
    rule: OrbitQuadrature,
) -> Complex64 {
    match rule {
        OrbitQuadrature::ClosedForm => {
            // Along the step the torus part moves linearly:
            // obs(φ^s x) has each character contributing
            // e^{2πiθ} (e^{2πiωs} - 1)/(2πiω), integrated exactly.
            let char_int = |m: &[i64]| {
                let omega_m: f64 = m
                    .iter()
                    .zip(omega)
                    .map(|(&mi, &w)| mi as f64 * w)
                    .sum();
                let theta: f64 = m
                    .iter()
                    .zip(x.torus_part(alg))
                    .map(|(&mi, &xi)| mi as f64 * xi)
                    .sum();
                let head = Complex64::new(0.0, 2.0 * PI * theta).exp();
                if omega_m.abs() < 1e-300 {
                    head * step
                } else {
                    let rot = Complex64::new(0.0, 2.0 * PI * omega_m * step).exp();
                    head * (rot - Complex64::new(1.0, 0.0))
                        / Complex64::new(0.0, 2.0 * PI * omega_m)
                }
            };
            match obs {
                Observable::Constant => Complex64::new(step, 0.0),
                Observable::Character { m } => char_int(m),
                Observable::Coboundary { terms } => terms
                    .iter()
                    .map(|(c, m)| {
                        let omega_m: f64 = m
                            .iter()
                            .zip(omega)
                            .map(|(&mi, &w)| mi as f64 * w)
                            .sum();
                        c * Complex64::new(0.0, 2.0 * PI * omega_m) * char_int(m)
                    })
                    .sum(),
            }
        }
        OrbitQuadrature::Gauss(order) => {
            let (nodes, weights) = crate::solver::constants::gauss_legendre(order.max(2));
            let mut acc = Complex64::new(0.0, 0.0);
            for (xi, wi) in nodes.iter().zip(&weights) {
                let s = 0.5 * step * (xi + 1.0);
                // Linear torus motion within the step.
                let mut shifted = x.clone();
                for (i, w) in omega.iter().enumerate() {
                    shifted.coords[i] = (shifted.coords[i] + s * w).rem_euclid(1.0);
                }
                acc += obs.eval(alg, omega, &shifted) * (0.5 * step * wi);
            }
            acc
        }
    }
}

/// One row of the equidistribution table.
#[derive(Debug, Clone)]
pub struct EquidistRow {
    pub m: Vec<i64>,
    pub t: f64,
    pub measured: Complex64,
    /// Exact magnitude `|sin(π ω T) / (π ω T)|` of the average.
    pub closed_form: f64,
    /// Decay bound `min(1, 1/(π T |ω|))`.
    pub bound: f64,
    pub pass: bool,
}

/// Measured character averages against their closed forms and decay
/// bounds, per `(M, T)` pair.
pub fn equidistribution_report(
    alg: &NilpotentLieAlgebra,
    x0: &NilPoint,
    generator: &[f64],
    m_list: &[Vec<i64>],
    t_list: &[f64],
    dt: f64,
    tol: f64,
) -> Result<Vec<EquidistRow>, SimError> {
    let omega = crate::diophantine::frequency_vector_f64(alg, generator);
    let mut rows = Vec::new();
    for m in m_list {
        let obs = Observable::character(m.clone())?;
        let freq: f64 = m
            .iter()
            .zip(&omega)
            .map(|(&mi, &w)| mi as f64 * w)
            .sum();
        for &t in t_list {
            let measured = birkhoff_average(
                alg,
                x0,
                generator,
                &obs,
                t,
                dt,
                OrbitQuadrature::ClosedForm,
            )?;
            let closed_form = if freq.abs() < 1e-300 {
                1.0
            } else {
                ((PI * freq * t).sin() / (PI * freq * t)).abs()
            };
            let bound = (1.0 / (PI * t * freq.abs().max(1e-300))).min(1.0);
            let pass = (measured.norm() - closed_form).abs() <= tol
                && measured.norm() <= bound + tol;
            rows.push(EquidistRow {
                m: m.clone(),
                t,
                measured,
                closed_form,
                bound,
                pass,
            });
        }
    }
    Ok(rows)
}
