//! Linear forms, the skew form `B_λ`, coadjoint orbit invariants, rank
//! classification, polarizing subalgebras and integrality tests.
//!
//! Everything here is exact: norms of restricted functionals are carried
//! as squared rationals (the Malcev basis is orthonormal by convention),
//! with float views provided for the numeric layers.

use crate::algebra::{AlgebraError, LatticeData, NilpotentLieAlgebra, MAX_BCH_STEP};
use crate::linalg::{RatMat, Subspace};
use crate::rat::{dot, rabs, to_f64, Rat};
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoadjointError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("step {0} exceeds the supported exact group computations (max {MAX_BCH_STEP})")]
    UnsupportedStep(usize),
    #[error("orbit does not have maximal rank")]
    NotMaximalRank,
    #[error("internal construction failed validation: {0}")]
    InternalError(String),
    #[error("operation supported only for the Heisenberg algebra with its standard lattice")]
    UnsupportedAlgebra,
}

/// A linear form on the algebra, written in the dual Malcev basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearForm {
    coeffs: Vec<Rat>,
}

impl LinearForm {
    pub fn new(coeffs: Vec<Rat>) -> Self {
        Self { coeffs }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            coeffs: vec![Rat::zero(); dim],
        }
    }

    /// The form `m E_i^*`.
    pub fn dual_basis(dim: usize, i: usize, m: Rat) -> Self {
        let mut coeffs = vec![Rat::zero(); dim];
        coeffs[i] = m;
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn eval(&self, v: &[Rat]) -> Rat {
        dot(&self.coeffs, v)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
}

/// The skew form `B_λ(x, y) = λ([x, y])`.
pub fn b_form(
    alg: &NilpotentLieAlgebra,
    lambda: &LinearForm,
    x: &[Rat],
    y: &[Rat],
) -> Result<Rat, CoadjointError> {
    Ok(lambda.eval(&alg.bracket(x, y)?))
}

/// Matrix `(B_λ(E_i, E_j))_{ij}`.
pub fn b_matrix(alg: &NilpotentLieAlgebra, lambda: &LinearForm) -> RatMat {
    let d = alg.dim();
    let mut m = RatMat::zero(d, d);
    for i in 0..d {
        for j in 0..d {
            let mut acc = Rat::zero();
            for l in 0..d {
                let c = alg.structure_constant(i, j, l);
                if !c.is_zero() {
                    acc += c * &lambda.coeffs[l];
                }
            }
            m[(i, j)] = acc;
        }
    }
    m
}

/// Coadjoint action: `Ad*(exp g) λ = λ ∘ Ad(exp(-g))`, computed exactly.
pub fn coadjoint_act(
    alg: &NilpotentLieAlgebra,
    g_log: &[Rat],
    lambda: &LinearForm,
) -> Result<LinearForm, CoadjointError> {
    if alg.step() > MAX_BCH_STEP {
        return Err(CoadjointError::UnsupportedStep(alg.step()));
    }
    let minus: Vec<Rat> = g_log.iter().map(|t| -t.clone()).collect();
    let m = alg.ad_exp(&minus)?;
    // (λ ∘ M) has coefficient vector M^T λ.
    let coeffs = m.transpose().mul_vec(&lambda.coeffs);
    Ok(LinearForm::new(coeffs))
}

/// Squared norm of the restriction `λ|V` for a subspace `V`, i.e. the
/// squared norm of the orthogonal projection of the coefficient vector
/// onto `V` (the Malcev basis is orthonormal).
pub fn restricted_norm_sq(subspace: &Subspace, lambda: &LinearForm) -> Rat {
    if subspace.dim() == 0 {
        return Rat::zero();
    }
    let a = RatMat::from_rows(subspace.basis().to_vec());
    let al = a.mul_vec(lambda.coeffs());
    let gram = a.mul(&a.transpose());
    let y = gram.solve(&al).expect("Gram matrix is invertible");
    dot(&al, &y)
}

/// Orbit-level invariants of the coadjoint orbit through `λ`, together
/// with the direction data for a chosen generator `X`.
#[derive(Debug, Clone)]
pub struct OrbitInvariants {
    /// `(B_λ(E_i, E_j))_{ij}`.
    pub b_matrix: RatMat,
    /// Radical `r_λ` of `B_λ`.
    pub radical: Subspace,
    /// `n_{k-1}^⊥(O) = {x : B_λ(x, n_{k-1}) = 0}`.
    pub nk1_perp: Subspace,
    /// `λ|n_k != 0`.
    pub maximal_rank: bool,
    /// Squared norm of `λ|n_k` (exact) and its float value.
    pub w_k_sq: Rat,
    pub w_k: f64,
    /// Squared norm of `λ|Z(n)` (exact) and its float value.
    pub w_z_sq: Rat,
    pub w_z: f64,
    /// `δ_O(X, E_i) = |B_λ(X, E_i)|` for the basis vectors of `n_{k-1}`,
    /// keyed by basis index.
    pub delta_xy: Vec<(usize, Rat)>,
    /// Representer of `Y -> B_λ(X, Y)` on `n_{k-1}` (zero-padded to the
    /// ambient dimension); `δ_O(X)` is its euclidean norm.
    pub delta_representer: Vec<Rat>,
    /// Squared `δ_O(X)` (exact) and its float value.
    pub delta_sq: Rat,
    pub delta: f64,
}

/// Computes [`OrbitInvariants`] for the orbit of `λ` and generator `X`.
pub fn orbit_invariants(
    alg: &NilpotentLieAlgebra,
    lambda: &LinearForm,
    x: &[Rat],
) -> Result<OrbitInvariants, CoadjointError> {
    let d = alg.dim();
    if lambda.dim() != d || x.len() != d {
        return Err(AlgebraError::DimensionMismatch {
            expected: d,
            got: lambda.dim().max(x.len()),
        }
        .into());
    }
    let bm = b_matrix(alg, lambda);
    let radical = Subspace::span(d, bm.nullspace());

    let k = alg.step();
    let nk1 = alg.series_term(k.max(2) - 1); // n_{k-1}; n itself when k = 1
    // Kernel of x -> (B_λ(x, y))_{y in basis of n_{k-1}}.
    let rows: Vec<Vec<Rat>> = nk1.basis().iter().map(|y| bm.mul_vec(y)).collect();
    let nk1_perp = if rows.is_empty() {
        Subspace::full(d)
    } else {
        Subspace::span(d, RatMat::from_rows(rows).nullspace())
    };

    let nk = alg.series_term(k);
    let w_k_sq = restricted_norm_sq(nk, lambda);
    let center = alg.center();
    let w_z_sq = restricted_norm_sq(&center, lambda);
    let maximal_rank = !w_k_sq.is_zero();

    // δ_O(X, .) on n_{k-1}: the dual norm of a linear functional is the
    // euclidean norm of its representer, so no sphere search is needed.
    let mut delta_xy = Vec::new();
    let mut representer = vec![Rat::zero(); d];
    let nk1_start: usize = if k >= 2 {
        alg.layer_indices(k - 1).start
    } else {
        0
    };
    for i in nk1_start..d {
        let b = b_form(alg, lambda, x, &alg.basis_vector(i))?;
        representer[i] = b.clone();
        delta_xy.push((i, rabs(&b)));
    }
    let delta_sq = crate::rat::norm_sq(&representer);

    Ok(OrbitInvariants {
        b_matrix: bm,
        radical,
        nk1_perp,
        maximal_rank,
        w_k: to_f64(&w_k_sq).sqrt(),
        w_k_sq,
        w_z: to_f64(&w_z_sq).sqrt(),
        w_z_sq,
        delta_xy,
        delta_representer: representer,
        delta: to_f64(&delta_sq).sqrt(),
        delta_sq,
    })
}

/// Polarizing subalgebra for `λ` by the inductive construction along the
/// Malcev flag of ideals: the sum over `j` of the radicals of `B_λ`
/// restricted to the flag ideals spanned by the last `j` basis vectors.
/// Deterministic given the fixed basis.
pub fn polarizing_subalgebra(
    alg: &NilpotentLieAlgebra,
    lambda: &LinearForm,
) -> Result<Subspace, CoadjointError> {
    let d = alg.dim();
    let bm = b_matrix(alg, lambda);
    let mut m = Subspace::zero(d);
    for j in 1..=d {
        let flag = Subspace::span(d, (d - j..d).map(|i| alg.basis_vector(i)).collect());
        let a = RatMat::from_rows(flag.basis().to_vec());
        let restricted = a.mul(&bm).mul(&a.transpose());
        let vecs = restricted
            .nullspace()
            .into_iter()
            .map(|c| {
                let mut v = vec![Rat::zero(); d];
                for (row, ci) in flag.basis().iter().zip(&c) {
                    for t in 0..d {
                        let inc = ci * &row[t];
                        v[t] += inc;
                    }
                }
                v
            })
            .collect();
        m = m.sum(&Subspace::span(d, vecs));
    }

    // Validation: maximal isotropic subalgebra containing the radical.
    let rank = bm.rank();
    if m.dim() != d - rank / 2 {
        return Err(CoadjointError::InternalError(format!(
            "polarization has dimension {}, expected {}",
            m.dim(),
            d - rank / 2
        )));
    }
    for a in m.basis() {
        for b in m.basis() {
            if !dot(a, &bm.mul_vec(b)).is_zero() {
                return Err(CoadjointError::InternalError(
                    "polarization is not isotropic".into(),
                ));
            }
            let br = alg.bracket(a, b)?;
            if !m.contains(&br) {
                return Err(CoadjointError::InternalError(
                    "polarization is not a subalgebra".into(),
                ));
            }
        }
    }
    let radical = Subspace::span(d, bm.nullspace());
    if !m.contains_subspace(&radical) {
        return Err(CoadjointError::InternalError(
            "polarization does not contain the radical".into(),
        ));
    }
    Ok(m)
}

/// `λ` is weakly integral for the lattice when it takes integer values on
/// the integer basis of `log Z(Γ)`.
pub fn weakly_integral(lattice: &LatticeData, lambda: &LinearForm) -> bool {
    lattice
        .lambda_on_central_lattice(lambda.coeffs())
        .iter()
        .all(|v| v.denom().is_one())
}

/// Multiplicity of the representation attached to `λ = m E_3^*` in the
/// space of square-integrable functions on the standard Heisenberg
/// nilmanifold, by counting the closed polarization-subgroup orbits with
/// trivial character stabilizer.
///
/// With `M = exp(span(E2, E3))`, the `M`-orbits on the nilmanifold are the
/// fibers over the first coordinate `x in [0, 1)`; the stabilizer of a
/// point over `x` consists of pairs `(y, z) in Z x (Z - x y)`, and the
/// character `exp(2πi m z)` is trivial on it exactly when `m x` is an
/// integer. The count is the number of such `x` in `[0, 1)`.
pub fn heisenberg_multiplicity(alg: &NilpotentLieAlgebra, m: i64) -> Result<u64, CoadjointError> {
    let is_h3 = alg.dim() == 3
        && alg.step() == 2
        && alg.structure_constant(0, 1, 2).is_one()
        && (0..3).all(|i| {
            (0..3).all(|j| {
                (0..3).all(|l| {
                    (i, j, l) == (0, 1, 2)
                        || (i, j, l) == (1, 0, 2)
                        || alg.structure_constant(i, j, l).is_zero()
                })
            })
        });
    if !is_h3 {
        return Err(CoadjointError::UnsupportedAlgebra);
    }
    if m == 0 {
        return Err(CoadjointError::NotMaximalRank);
    }
    let q = m.unsigned_abs();
    let mut count = 0;
    for j in 0..q {
        // Orbit over x = j/|m|: the character is trivial on the stabilizer
        // iff m x is an integer.
        let mx = Rat::new((m * j as i64).into(), (q as i64).into());
        if mx.denom().is_one() {
            count += 1;
        }
    }
    Ok(count)
}
