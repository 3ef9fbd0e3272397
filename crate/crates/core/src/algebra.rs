//! Exact-rational nilpotent Lie algebra arithmetic.
//!
//! An algebra is described by structure constants `c_{ij}^l` with
//! `[E_i, E_j] = sum_l c_{ij}^l E_l` on a Malcev basis ordered through the
//! descending central series: first the generators (layer 1), then a basis
//! of each deeper layer. Construction validates antisymmetry, the Jacobi
//! identity, the declared layering against the computed central series and
//! the Malcev flag property; bad tables are rejected eagerly.

use crate::linalg::{RatMat, Subspace};
use crate::rat::{dot, Rat};
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("vector has length {got}, algebra dimension is {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid structure data: {0}")]
    BadStructure(String),
    #[error("Jacobi identity fails on basis triple ({0}, {1}, {2})")]
    JacobiViolation(usize, usize, usize),
    #[error("declared layers do not match the computed central series: {0}")]
    CentralSeriesMismatch(String),
    #[error("dropping the first {0} basis elements does not span a subalgebra")]
    FlagViolation(usize),
    #[error("step {step} exceeds the supported BCH truncation order {max}")]
    UnsupportedStep { step: usize, max: usize },
    #[error("basis brackets leave the integer span: c_({i},{j}) has a non-integer coefficient")]
    NonIntegerLattice { i: usize, j: usize },
    #[error("unsupported algebra: {0}")]
    UnsupportedAlgebra(String),
}

/// Largest nilpotency step the hardcoded BCH truncation is exact for.
pub const MAX_BCH_STEP: usize = 4;

/// A sparse bracket table entry: `[E_i, E_j] += c E_l` (0-based indices).
#[derive(Debug, Clone)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub l: usize,
    pub c: Rat,
}

#[derive(Debug, Clone)]
pub struct NilpotentLieAlgebra {
    dim: usize,
    step: usize,
    /// Number of basis elements in each Malcev layer `1..=step`.
    layer_sizes: Vec<usize>,
    labels: Vec<String>,
    /// Dense `c[i][j][l]`, antisymmetric in `(i, j)`.
    c: Vec<Rat>,
    /// Float copy of the structure constants for the numeric layers.
    c_f64: Vec<f64>,
    series: Vec<Subspace>,
}

impl NilpotentLieAlgebra {
    /// Builds and fully validates an algebra from its bracket table.
    ///
    /// `layer_sizes` lists the Malcev layer sizes, summing to `dim`; the
    /// basis is implicitly `E_1^1, ..., E_{n_1}^1, E_1^2, ...` in that
    /// order. Entries may specify either orientation of a pair; the
    /// antisymmetric counterpart is filled in and cross-checked.
    pub fn new(
        dim: usize,
        layer_sizes: Vec<usize>,
        entries: Vec<BracketEntry>,
    ) -> Result<Self, AlgebraError> {
        if dim == 0 {
            return Err(AlgebraError::BadStructure("dimension must be positive".into()));
        }
        let step = layer_sizes.len();
        if step == 0 || layer_sizes.iter().sum::<usize>() != dim {
            return Err(AlgebraError::BadStructure(format!(
                "layer sizes {layer_sizes:?} do not sum to dim {dim}"
            )));
        }
        if layer_sizes.contains(&0) {
            return Err(AlgebraError::BadStructure("empty Malcev layer".into()));
        }

        let mut c = vec![Rat::zero(); dim * dim * dim];
        let idx = |i: usize, j: usize, l: usize| (i * dim + j) * dim + l;
        let mut seen = std::collections::BTreeSet::new();
        for e in &entries {
            if e.i >= dim || e.j >= dim || e.l >= dim {
                return Err(AlgebraError::BadStructure(format!(
                    "bracket entry ({}, {}, {}) out of range",
                    e.i + 1,
                    e.j + 1,
                    e.l + 1
                )));
            }
            if e.i == e.j && !e.c.is_zero() {
                return Err(AlgebraError::BadStructure(format!(
                    "nonzero bracket [E_{0}, E_{0}]",
                    e.i + 1
                )));
            }
            // One orientation per (i, j, l); the mirror is filled in.
            if !seen.insert((e.i, e.j, e.l)) || seen.contains(&(e.j, e.i, e.l)) {
                return Err(AlgebraError::BadStructure(format!(
                    "duplicate bracket entry ({}, {}, {})",
                    e.i + 1,
                    e.j + 1,
                    e.l + 1
                )));
            }
            c[idx(e.i, e.j, e.l)] = e.c.clone();
            c[idx(e.j, e.i, e.l)] = -e.c.clone();
        }

        let labels = {
            let mut out = Vec::with_capacity(dim);
            for (j, &sz) in layer_sizes.iter().enumerate() {
                for i in 0..sz {
                    out.push(format!("E_{}^{}", i + 1, j + 1));
                }
            }
            out
        };

        let c_f64 = c.iter().map(crate::rat::to_f64).collect();
        let mut alg = Self {
            dim,
            step,
            layer_sizes,
            labels,
            c,
            c_f64,
            series: Vec::new(),
        };
        alg.validate()?;
        Ok(alg)
    }

    fn validate(&mut self) -> Result<(), AlgebraError> {
        // Jacobi on all basis triples, exactly.
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                for k in (j + 1)..self.dim {
                    let ei = self.basis_vector(i);
                    let ej = self.basis_vector(j);
                    let ek = self.basis_vector(k);
                    let mut acc = self.bracket(&self.bracket(&ei, &ej).unwrap(), &ek).unwrap();
                    for (t, s) in [(j, k), (k, i)] {
                        let inner = self
                            .bracket(&self.basis_vector(t), &self.basis_vector(s))
                            .unwrap();
                        let term = self
                            .bracket(&inner, &self.basis_vector(if t == j { i } else { j }))
                            .unwrap();
                        for (a, b) in acc.iter_mut().zip(term) {
                            *a += b;
                        }
                    }
                    if acc.iter().any(|x| !x.is_zero()) {
                        return Err(AlgebraError::JacobiViolation(i + 1, j + 1, k + 1));
                    }
                }
            }
        }

        // Central series must terminate and match the declared layers.
        let mut series = vec![Subspace::full(self.dim)];
        loop {
            let prev = series.last().unwrap();
            let mut gens = Vec::new();
            for b in prev.basis() {
                for i in 0..self.dim {
                    gens.push(self.bracket(b, &self.basis_vector(i)).unwrap());
                }
            }
            let next = Subspace::span(self.dim, gens);
            if next.dim() == prev.dim() && next.dim() > 0 {
                return Err(AlgebraError::CentralSeriesMismatch(
                    "series stalls before reaching zero (not nilpotent)".into(),
                ));
            }
            let done = next.dim() == 0;
            series.push(next);
            if done {
                break;
            }
        }
        // series = [n_1, n_2, ..., n_m, {0}] with n_m != 0.
        let computed_step = series.len() - 1;
        if computed_step != self.step {
            return Err(AlgebraError::CentralSeriesMismatch(format!(
                "computed step {computed_step}, declared {}",
                self.step
            )));
        }
        for j in 1..=self.step {
            let start: usize = self.layer_sizes[..j - 1].iter().sum();
            let tail = Subspace::span(
                self.dim,
                (start..self.dim).map(|i| self.basis_vector(i)).collect(),
            );
            if series[j - 1] != tail {
                return Err(AlgebraError::CentralSeriesMismatch(format!(
                    "layer-{j} tail does not span the computed n_{j}"
                )));
            }
        }
        // n_k central.
        let center = self.center_from_brackets();
        if !center.contains_subspace(&series[self.step - 1]) {
            return Err(AlgebraError::CentralSeriesMismatch(
                "deepest term is not central".into(),
            ));
        }

        // Malcev flag: every tail spans a subalgebra.
        for ell in 1..self.dim {
            let tail = Subspace::span(
                self.dim,
                (ell..self.dim).map(|i| self.basis_vector(i)).collect(),
            );
            for a in ell..self.dim {
                for b in (a + 1)..self.dim {
                    let br = self
                        .bracket(&self.basis_vector(a), &self.basis_vector(b))
                        .unwrap();
                    if !tail.contains(&br) {
                        return Err(AlgebraError::FlagViolation(ell));
                    }
                }
            }
        }

        self.series = series;
        Ok(())
    }

    fn center_from_brackets(&self) -> Subspace {
        // Kernel of x -> ([x, E_1], ..., [x, E_d]) stacked.
        let mut rows = Vec::new();
        for j in 0..self.dim {
            for l in 0..self.dim {
                rows.push((0..self.dim).map(|i| self.c_at(i, j, l).clone()).collect());
            }
        }
        let m = RatMat::from_rows(rows);
        Subspace::span(self.dim, m.nullspace())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Number of generators, i.e. the size of the first layer.
    pub fn generators(&self) -> usize {
        self.layer_sizes[0]
    }

    /// Basis indices belonging to Malcev layer `j` (1-based layer).
    pub fn layer_indices(&self, j: usize) -> std::ops::Range<usize> {
        assert!(j >= 1 && j <= self.step);
        let start: usize = self.layer_sizes[..j - 1].iter().sum();
        start..start + self.layer_sizes[j - 1]
    }

    /// Malcev layer (1-based) of basis index `i`.
    pub fn layer_of(&self, i: usize) -> usize {
        let mut acc = 0;
        for (j, &sz) in self.layer_sizes.iter().enumerate() {
            acc += sz;
            if i < acc {
                return j + 1;
            }
        }
        unreachable!()
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Rat> {
        let mut v = vec![Rat::zero(); self.dim];
        v[i] = Rat::one();
        v
    }

    fn c_at(&self, i: usize, j: usize, l: usize) -> &Rat {
        &self.c[(i * self.dim + j) * self.dim + l]
    }

    pub fn structure_constant(&self, i: usize, j: usize, l: usize) -> &Rat {
        self.c_at(i, j, l)
    }

    /// Squared Frobenius norm of the bracket tensor: a valid square bound
    /// for `||[u, y]||^2` over unit vectors `u`, `y`.
    pub fn bracket_norm_bound_sq(&self) -> Rat {
        self.c.iter().map(|x| x * x).fold(Rat::zero(), |a, b| a + b)
    }

    fn check_len(&self, v: &[Rat]) -> Result<(), AlgebraError> {
        if v.len() != self.dim {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        Ok(())
    }

    /// Exact bracket `[x, y]`.
    pub fn bracket(&self, x: &[Rat], y: &[Rat]) -> Result<Vec<Rat>, AlgebraError> {
        self.check_len(x)?;
        self.check_len(y)?;
        let mut out = vec![Rat::zero(); self.dim];
        for i in 0..self.dim {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..self.dim {
                if y[j].is_zero() {
                    continue;
                }
                let f = &x[i] * &y[j];
                for l in 0..self.dim {
                    let cl = self.c_at(i, j, l);
                    if !cl.is_zero() {
                        let t = &f * cl;
                        out[l] += t;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Float bracket, for the simulator and other numeric paths.
    pub fn bracket_f(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        let mut out = vec![0.0; self.dim];
        for i in 0..self.dim {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..self.dim {
                if y[j] == 0.0 {
                    continue;
                }
                let f = x[i] * y[j];
                for l in 0..self.dim {
                    out[l] += f * self.c_f64[(i * self.dim + j) * self.dim + l];
                }
            }
        }
        out
    }

    /// Matrix of `ad(x) = [x, .]` acting on column vectors.
    pub fn ad_matrix(&self, x: &[Rat]) -> Result<RatMat, AlgebraError> {
        self.check_len(x)?;
        let mut m = RatMat::zero(self.dim, self.dim);
        for j in 0..self.dim {
            let col = self.bracket(x, &self.basis_vector(j))?;
            for l in 0..self.dim {
                m[(l, j)] = col[l].clone();
            }
        }
        Ok(m)
    }

    /// Descending central series `n_1 = n, ..., n_k, n_{k+1} = {0}`.
    pub fn central_series(&self) -> &[Subspace] {
        &self.series
    }

    /// The term `n_j` (`j` in `1..=step+1`).
    pub fn series_term(&self, j: usize) -> &Subspace {
        &self.series[j - 1]
    }

    pub fn center(&self) -> Subspace {
        self.center_from_brackets()
    }

    /// Exact `log(exp x . exp y)` via the BCH series, truncated at order 4.
    ///
    /// The truncation is exact for nilpotency step at most 4; higher steps
    /// are rejected.
    pub fn bch(&self, x: &[Rat], y: &[Rat]) -> Result<Vec<Rat>, AlgebraError> {
        if self.step > MAX_BCH_STEP {
            return Err(AlgebraError::UnsupportedStep {
                step: self.step,
                max: MAX_BCH_STEP,
            });
        }
        self.check_len(x)?;
        self.check_len(y)?;
        let xy = self.bracket(x, y)?;
        let xxy = self.bracket(x, &xy)?;
        let yyx = {
            let yx: Vec<Rat> = xy.iter().map(|t| -t.clone()).collect();
            self.bracket(y, &yx)?
        };
        let yxxy = self.bracket(y, &xxy)?;
        let half = Rat::new(1.into(), 2.into());
        let twelfth = Rat::new(1.into(), 12.into());
        let neg24 = Rat::new((-1).into(), 24.into());
        let mut out = vec![Rat::zero(); self.dim];
        for l in 0..self.dim {
            out[l] = &x[l]
                + &y[l]
                + &half * &xy[l]
                + &twelfth * &xxy[l]
                + &twelfth * &yyx[l]
                + &neg24 * &yxxy[l];
        }
        Ok(out)
    }

    /// Float BCH product, same truncation rules as [`Self::bch`].
    pub fn bch_f(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>, AlgebraError> {
        if self.step > MAX_BCH_STEP {
            return Err(AlgebraError::UnsupportedStep {
                step: self.step,
                max: MAX_BCH_STEP,
            });
        }
        let xy = self.bracket_f(x, y);
        let xxy = self.bracket_f(x, &xy);
        let yx: Vec<f64> = xy.iter().map(|t| -t).collect();
        let yyx = self.bracket_f(y, &yx);
        let yxxy = self.bracket_f(y, &xxy);
        Ok((0..self.dim)
            .map(|l| x[l] + y[l] + 0.5 * xy[l] + xxy[l] / 12.0 + yyx[l] / 12.0 - yxxy[l] / 24.0)
            .collect())
    }

    /// `Ad(exp x) = exp(ad x)` as an exact matrix (finite series).
    pub fn ad_exp(&self, x: &[Rat]) -> Result<RatMat, AlgebraError> {
        let ad = self.ad_matrix(x)?;
        let mut term = RatMat::identity(self.dim);
        let mut sum = RatMat::identity(self.dim);
        let mut fact = Rat::one();
        for j in 1..self.step.max(1) {
            term = ad.mul(&term);
            fact *= Rat::from(num_bigint::BigInt::from(j as i64));
            if term.is_zero() {
                break;
            }
            for a in 0..self.dim {
                for b in 0..self.dim {
                    let t = &sum[(a, b)] + &term[(a, b)] / &fact;
                    sum[(a, b)] = t;
                }
            }
        }
        Ok(sum)
    }
}

/// Lattice bookkeeping for an algebra whose Malcev basis is declared
/// strongly based at a lattice `Gamma`.
///
/// The basis being strongly based is accepted as an input declaration; the
/// constructor verifies only the necessary condition that brackets of basis
/// elements have integer coefficients, so that integer Malcev words stay
/// integer under the group law. Full verification of the strong-basing
/// property is not performed.
#[derive(Debug, Clone)]
pub struct LatticeData {
    /// Integer basis of `log Z(Gamma)`: the central Malcev basis vectors.
    central_lattice_basis: Vec<Vec<Rat>>,
    central_indices: Vec<usize>,
}

impl LatticeData {
    pub fn new(alg: &NilpotentLieAlgebra) -> Result<Self, AlgebraError> {
        for i in 0..alg.dim() {
            for j in (i + 1)..alg.dim() {
                for l in 0..alg.dim() {
                    if !alg.structure_constant(i, j, l).denom().is_one() {
                        return Err(AlgebraError::NonIntegerLattice { i: i + 1, j: j + 1 });
                    }
                }
            }
        }
        // log Z(Gamma) from the declared data: the central basis vectors.
        // For the supported algebras the center is spanned by basis vectors;
        // anything else is out of scope for lattice bookkeeping.
        let center = alg.center();
        let mut central_indices = Vec::new();
        for i in 0..alg.dim() {
            if center.contains(&alg.basis_vector(i)) {
                central_indices.push(i);
            }
        }
        if central_indices.len() != center.dim() {
            return Err(AlgebraError::UnsupportedAlgebra(
                "center is not spanned by Malcev basis vectors; \
                 integer lattice data cannot be derived from the declaration"
                    .into(),
            ));
        }
        let central_lattice_basis = central_indices
            .iter()
            .map(|&i| alg.basis_vector(i))
            .collect();
        Ok(Self {
            central_lattice_basis,
            central_indices,
        })
    }

    /// Integer basis of `log Z(Gamma)`.
    pub fn central_lattice_basis(&self) -> &[Vec<Rat>] {
        &self.central_lattice_basis
    }

    /// Basis indices of the central lattice directions.
    pub fn central_indices(&self) -> &[usize] {
        &self.central_indices
    }

    /// Evaluates a linear form on the central lattice basis.
    pub fn lambda_on_central_lattice(&self, lambda: &[Rat]) -> Vec<Rat> {
        self.central_lattice_basis
            .iter()
            .map(|e| dot(lambda, e))
            .collect()
    }
}

/// Builders for the worked algebras used across tests and docs.
pub mod standard {
    use super::{BracketEntry, NilpotentLieAlgebra};
    use crate::rat::rint;

    /// 3-dimensional Heisenberg algebra: `[E1, E2] = E3`.
    pub fn heisenberg() -> NilpotentLieAlgebra {
        NilpotentLieAlgebra::new(
            3,
            vec![2, 1],
            vec![BracketEntry {
                i: 0,
                j: 1,
                l: 2,
                c: rint(1),
            }],
        )
        .expect("h3 is valid")
    }

    /// Filiform algebra of dimension 4: `[E1,E2] = E3`, `[E1,E3] = E4`.
    pub fn filiform4() -> NilpotentLieAlgebra {
        NilpotentLieAlgebra::new(
            4,
            vec![2, 1, 1],
            vec![
                BracketEntry {
                    i: 0,
                    j: 1,
                    l: 2,
                    c: rint(1),
                },
                BracketEntry {
                    i: 0,
                    j: 2,
                    l: 3,
                    c: rint(1),
                },
            ],
        )
        .expect("n4 is valid")
    }

    /// `h3 (+) R`: Heisenberg plus a central line, ordered so that the
    /// extra generator sits in layer 1 and `[E1, E2] = E4`.
    pub fn heisenberg_plus_line() -> NilpotentLieAlgebra {
        NilpotentLieAlgebra::new(
            4,
            vec![3, 1],
            vec![BracketEntry {
                i: 0,
                j: 1,
                l: 3,
                c: rint(1),
            }],
        )
        .expect("h3+R is valid")
    }

    /// Abelian algebra of rank 2.
    pub fn abelian2() -> NilpotentLieAlgebra {
        NilpotentLieAlgebra::new(2, vec![2], vec![]).expect("abelian is valid")
    }

    /// Free 2-step algebra on 3 generators:
    /// `[E1,E2] = E4`, `[E1,E3] = E5`, `[E2,E3] = E6`.
    pub fn free_two_step3() -> NilpotentLieAlgebra {
        NilpotentLieAlgebra::new(
            6,
            vec![3, 3],
            vec![
                BracketEntry {
                    i: 0,
                    j: 1,
                    l: 3,
                    c: rint(1),
                },
                BracketEntry {
                    i: 0,
                    j: 2,
                    l: 4,
                    c: rint(1),
                },
                BracketEntry {
                    i: 1,
                    j: 2,
                    l: 5,
                    c: rint(1),
                },
            ],
        )
        .expect("free 2-step is valid")
    }

    /// Filiform algebra of dimension 4 with the deepest basis vector
    /// rescaled so the integer Malcev words close under the group law:
    /// `[E1,E2] = E3`, `[E1,E3] = 2 E4`. (With the unscaled basis the
    /// generator commutator picks up a half-integer deep coordinate, so
    /// that basis is not strongly based at the integer-word lattice.)
    pub fn filiform4_lattice() -> NilpotentLieAlgebra {
        NilpotentLieAlgebra::new(
            4,
            vec![2, 1, 1],
            vec![
                BracketEntry {
                    i: 0,
                    j: 1,
                    l: 2,
                    c: rint(1),
                },
                BracketEntry {
                    i: 0,
                    j: 2,
                    l: 3,
                    c: rint(2),
                },
            ],
        )
        .expect("n4 lattice variant is valid")
    }

    /// Filiform algebra of dimension 5 (step 4): `[E1, Ei] = E_{i+1}`.
    pub fn filiform5() -> NilpotentLieAlgebra {
        NilpotentLieAlgebra::new(
            5,
            vec![2, 1, 1, 1],
            vec![
                BracketEntry {
                    i: 0,
                    j: 1,
                    l: 2,
                    c: rint(1),
                },
                BracketEntry {
                    i: 0,
                    j: 2,
                    l: 3,
                    c: rint(1),
                },
                BracketEntry {
                    i: 0,
                    j: 3,
                    l: 4,
                    c: rint(1),
                },
            ],
        )
        .expect("n5 is valid")
    }

    /// Filiform algebra of dimension 6 (step 5): exceeds the BCH truncation.
    pub fn filiform6() -> NilpotentLieAlgebra {
        NilpotentLieAlgebra::new(
            6,
            vec![2, 1, 1, 1, 1],
            vec![
                BracketEntry {
                    i: 0,
                    j: 1,
                    l: 2,
                    c: rint(1),
                },
                BracketEntry {
                    i: 0,
                    j: 2,
                    l: 3,
                    c: rint(1),
                },
                BracketEntry {
                    i: 0,
                    j: 3,
                    l: 4,
                    c: rint(1),
                },
                BracketEntry {
                    i: 0,
                    j: 4,
                    l: 5,
                    c: rint(1),
                },
            ],
        )
        .expect("n6 is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::standard::*;
    use super::*;
    use crate::rat::{rat, rint};
    use num_traits::Zero;

    fn v(alg: &NilpotentLieAlgebra, coords: &[(usize, Rat)]) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); alg.dim()];
        for (i, c) in coords {
            out[*i] = c.clone();
        }
        out
    }

    #[test]
    fn heisenberg_bracket_table() {
        let h = heisenberg();
        let e1 = h.basis_vector(0);
        let e2 = h.basis_vector(1);
        assert_eq!(h.bracket(&e1, &e2).unwrap(), h.basis_vector(2));
        assert_eq!(h.bracket(&e2, &e1).unwrap(), v(&h, &[(2, rint(-1))]));
    }

    #[test]
    fn bracket_of_vector_with_itself_vanishes() {
        let n4 = filiform4();
        let x = v(&n4, &[(0, rat(2, 3)), (1, rint(-5)), (3, rat(7, 2))]);
        assert!(n4.bracket(&x, &x).unwrap().iter().all(Zero::is_zero));
    }

    #[test]
    fn filiform_bilinear_expansion() {
        // [E1, E2 + E3] = E3 + E4, by hand.
        let n4 = filiform4();
        let e1 = n4.basis_vector(0);
        let y = v(&n4, &[(1, rint(1)), (2, rint(1))]);
        let expect = v(&n4, &[(2, rint(1)), (3, rint(1))]);
        assert_eq!(n4.bracket(&e1, &y).unwrap(), expect);
    }

    #[test]
    fn bracket_dimension_mismatch() {
        let h = heisenberg();
        let bad = vec![Rat::zero(); 4];
        assert!(matches!(
            h.bracket(&bad, &h.basis_vector(0)),
            Err(AlgebraError::DimensionMismatch { expected: 3, got: 4 })
        ));
    }

    #[test]
    fn central_series_shapes() {
        let ab = abelian2();
        assert_eq!(ab.step(), 1);
        assert_eq!(ab.central_series().len(), 2);
        assert_eq!(ab.series_term(2).dim(), 0);

        let h = heisenberg();
        let s = h.central_series();
        assert_eq!(s.len(), 3);
        assert_eq!(s[0].dim(), 3);
        assert_eq!(s[1].dim(), 1);
        assert!(s[1].contains(&h.basis_vector(2)));
        assert_eq!(s[2].dim(), 0);

        let n4 = filiform4();
        let s = n4.central_series();
        assert_eq!(s.iter().map(Subspace::dim).collect::<Vec<_>>(), vec![4, 2, 1, 0]);
        assert!(s[1].contains(&n4.basis_vector(2)));
        assert!(s[1].contains(&n4.basis_vector(3)));
        assert!(s[2].contains(&n4.basis_vector(3)));
    }

    #[test]
    fn series_terms_are_ideals() {
        for alg in [heisenberg(), filiform4(), heisenberg_plus_line(), free_two_step3()] {
            let s = alg.central_series();
            for j in 1..=alg.step() {
                let nj = &s[j - 1];
                let next = &s[j];
                for b in nj.basis() {
                    for i in 0..alg.dim() {
                        let br = alg.bracket(b, &alg.basis_vector(i)).unwrap();
                        assert!(next.contains(&br), "[n_{j}, n] not inside n_{}", j + 1);
                    }
                }
            }
        }
    }

    #[test]
    fn ad_matrices() {
        let h = heisenberg();
        assert!(h.ad_matrix(&h.basis_vector(2)).unwrap().is_zero());
        let ad1 = h.ad_matrix(&h.basis_vector(0)).unwrap();
        assert_eq!(ad1.rank(), 1);
        assert_eq!(ad1.mul_vec(&h.basis_vector(1)), h.basis_vector(2));

        // ad(E1)^2 in n4 maps E2 to E4 and kills E3, E4: matrix-square oracle.
        let n4 = filiform4();
        let ad1 = n4.ad_matrix(&n4.basis_vector(0)).unwrap();
        let sq = ad1.mul(&ad1);
        assert_eq!(sq.mul_vec(&n4.basis_vector(1)), n4.basis_vector(3));
        assert!(sq.mul_vec(&n4.basis_vector(2)).iter().all(Zero::is_zero));
        assert!(sq.mul_vec(&n4.basis_vector(3)).iter().all(Zero::is_zero));
    }

    #[test]
    fn ad_nilpotent_at_step() {
        for alg in [heisenberg(), filiform4(), free_two_step3(), filiform5()] {
            for i in 0..alg.dim() {
                let mut m = RatMat::identity(alg.dim());
                let ad = alg.ad_matrix(&alg.basis_vector(i)).unwrap();
                for _ in 0..alg.step() {
                    m = ad.mul(&m);
                }
                assert!(m.is_zero(), "ad^k nonzero in {:?}", alg.labels());
            }
        }
    }

    #[test]
    fn bch_heisenberg() {
        let h = heisenberg();
        let z = h.bch(&h.basis_vector(0), &h.basis_vector(1)).unwrap();
        assert_eq!(z, v(&h, &[(0, rint(1)), (1, rint(1)), (2, rat(1, 2))]));
    }

    #[test]
    fn bch_inverse() {
        let n4 = filiform4();
        let x = v(&n4, &[(0, rat(3, 7)), (1, rint(2)), (2, rat(-1, 2)), (3, rint(4))]);
        let minus: Vec<Rat> = x.iter().map(|t| -t.clone()).collect();
        assert!(n4.bch(&x, &minus).unwrap().iter().all(Zero::is_zero));
    }

    #[test]
    fn bch_filiform_third_order() {
        // Dynkin series to order 3 by hand: E1 + E2 + E3/2 + E4/12.
        let n4 = filiform4();
        let z = n4.bch(&n4.basis_vector(0), &n4.basis_vector(1)).unwrap();
        assert_eq!(
            z,
            v(&n4, &[(0, rint(1)), (1, rint(1)), (2, rat(1, 2)), (3, rat(1, 12))])
        );
    }

    #[test]
    fn bch_rejects_high_step() {
        let n6 = filiform6();
        assert!(matches!(
            n6.bch(&n6.basis_vector(0), &n6.basis_vector(1)),
            Err(AlgebraError::UnsupportedStep { step: 5, max: 4 })
        ));
    }

    #[test]
    fn bch_associative_step4() {
        // Exact associativity on the step-4 filiform algebra.
        let n5 = filiform5();
        let xs = [
            v(&n5, &[(0, rint(1)), (1, rat(1, 2))]),
            v(&n5, &[(1, rint(1)), (2, rat(-2, 3))]),
            v(&n5, &[(0, rat(1, 3)), (3, rint(2)), (4, rat(5, 7))]),
        ];
        let ab_c = n5.bch(&n5.bch(&xs[0], &xs[1]).unwrap(), &xs[2]).unwrap();
        let a_bc = n5.bch(&xs[0], &n5.bch(&xs[1], &xs[2]).unwrap()).unwrap();
        assert_eq!(ab_c, a_bc);
    }

    #[test]
    fn group_commutator_is_exp_bracket_when_central() {
        // (exp x, exp y) = exp[x, y] whenever [x, y] is central.
        let h = heisenberg();
        let x = v(&h, &[(0, rat(2, 5))]);
        let y = v(&h, &[(1, rint(3))]);
        let xy = h.bch(&x, &y).unwrap();
        let inv = |w: &[Rat]| w.iter().map(|t| -t.clone()).collect::<Vec<_>>();
        let comm = h.bch(&xy, &h.bch(&inv(&x), &inv(&y)).unwrap()).unwrap();
        assert_eq!(comm, h.bracket(&x, &y).unwrap());
    }

    #[test]
    fn rejects_jacobi_violation() {
        // [E1,E2]=E3, [E1,E3]=E2 breaks nilpotency/Jacobi bookkeeping.
        let bad = NilpotentLieAlgebra::new(
            3,
            vec![2, 1],
            vec![
                BracketEntry { i: 0, j: 1, l: 2, c: rint(1) },
                BracketEntry { i: 0, j: 2, l: 1, c: rint(1) },
            ],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn rejects_wrong_layers() {
        let bad = NilpotentLieAlgebra::new(
            3,
            vec![3],
            vec![BracketEntry { i: 0, j: 1, l: 2, c: rint(1) }],
        );
        assert!(matches!(bad, Err(AlgebraError::CentralSeriesMismatch(_))));
    }

    #[test]
    fn rejects_misordered_basis() {
        // [E2, E3] = E1 puts a bracket image in the declared first layer;
        // the computed central series cannot match the layering.
        let bad = NilpotentLieAlgebra::new(
            4,
            vec![3, 1],
            vec![BracketEntry { i: 1, j: 2, l: 0, c: rint(1) }],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn lattice_requires_integer_brackets() {
        let h = heisenberg();
        assert!(LatticeData::new(&h).is_ok());
        let half = NilpotentLieAlgebra::new(
            3,
            vec![2, 1],
            vec![BracketEntry { i: 0, j: 1, l: 2, c: rat(1, 2) }],
        )
        .unwrap();
        assert!(matches!(
            LatticeData::new(&half),
            Err(AlgebraError::NonIntegerLattice { i: 1, j: 2 })
        ));
    }

    #[test]
    fn central_lattice_basis_heisenberg() {
        let h = heisenberg();
        let lat = LatticeData::new(&h).unwrap();
        assert_eq!(lat.central_lattice_basis(), &[h.basis_vector(2)]);
    }

    #[test]
    fn ad_exp_is_exp_of_ad() {
        // On h3: Ad(exp tE1) E2 = E2 + t E3 exactly.
        let h = heisenberg();
        let t = rat(5, 3);
        let x = v(&h, &[(0, t.clone())]);
        let m = h.ad_exp(&x).unwrap();
        let img = m.mul_vec(&h.basis_vector(1));
        assert_eq!(img, v(&h, &[(1, rint(1)), (2, t)]));
    }
}
