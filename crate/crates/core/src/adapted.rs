//! Construction of the adapted irreducible representation for a maximal
//! rank orbit and an admissible generator `X`.
//!
//! The output realizes the representation on `L²(R, H')` with
//! `π(X) = d/dt` and `π(Y) = 2πi B_λ(X, Y) t`: a distinguished direction
//! `Y` in `n_{k-1}` maximizing `|B_λ(X, .)|` on the unit sphere, the
//! codimension-one ideal `n' = {T : B_λ(T, Y) = 0}`, its unit normal `U`,
//! a shifted representative of the orbit with `λ(Y) = 0`, and the
//! polynomial operator symbols of the derived representation.

use crate::algebra::{AlgebraError, NilpotentLieAlgebra};
use crate::coadjoint::{b_form, b_matrix, coadjoint_act, orbit_invariants, CoadjointError, LinearForm, OrbitInvariants};
use crate::linalg::{RatMat, Subspace};
use crate::rat::{dot, norm_sq, to_f64, Rat};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AdaptedError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Coadjoint(#[from] CoadjointError),
    #[error("orbit does not have maximal rank (λ vanishes on n_k)")]
    NotMaximalRank,
    #[error("δ_O(X) = 0: X lies in n_{{k-1}}^⊥ of the orbit")]
    DegenerateDirection,
    #[error("element does not belong to the ideal n'")]
    NotInIdeal,
    #[error("internal construction failed validation: {0}")]
    InternalError(String),
}

/// Sign-normalizes `v` so its first nonzero coordinate is positive.
fn fix_sign(mut v: Vec<Rat>) -> Vec<Rat> {
    if let Some(first) = v.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in &mut v {
                *x = -x.clone();
            }
        }
    }
    v
}

/// Data of the adapted representation; exact quantities carry their
/// rational squares, float views are provided for the numeric layers.
#[derive(Debug, Clone)]
pub struct AdaptedRepData {
    /// Unnormalized direction of `Y` (rational; `Y = y_dir / |y_dir|`),
    /// sign-fixed so the first nonzero coordinate is positive.
    pub y_dir: Vec<Rat>,
    /// `|y_dir|²`.
    pub y_dir_norm_sq: Rat,
    /// `B_λ(X, Y)`: sign and square. `δ = |B_λ(X, Y)| = δ_O(X)`.
    pub b_xy_sign: i8,
    pub delta_sq: Rat,
    /// Basis of the codimension-one ideal `n'`.
    pub nprime: Subspace,
    /// Unnormalized normal direction to `n'` (rational, sign-fixed).
    pub u_dir: Vec<Rat>,
    pub u_dir_norm_sq: Rat,
    /// `<X, U>`: signed float and exact square.
    pub x_component_sq: Rat,
    pub x_component_negative: bool,
    /// Orbit representative with `λ(Y) = 0`, reached by the parameter
    /// shift `t₀ = λ(Y) / B_λ(X, Y)` along `exp(t₀ X)`.
    pub lambda_shifted: LinearForm,
    pub t0: Rat,
    /// `n_k'' = {T in n_k : λ(T) = 0}`.
    pub nk2: Subspace,
    /// For each basis generator of `n'`, the symbol
    /// `[(j, ad(X)^j E / j!)]` of the derived action.
    pub op_symbols: Vec<Vec<(usize, Vec<Rat>)>>,
    /// Ambient data retained for the solver.
    pub orbit: OrbitInvariants,
    /// Generator the representation is adapted to.
    pub x: Vec<Rat>,
}

impl AdaptedRepData {
    /// `δ_O(X)` as a float.
    pub fn delta(&self) -> f64 {
        to_f64(&self.delta_sq).sqrt()
    }

    /// `B_λ(X, Y)` as a float (signed).
    pub fn b_xy(&self) -> f64 {
        f64::from(self.b_xy_sign) * self.delta()
    }

    /// `<X, U>` as a float (signed).
    pub fn x_component(&self) -> f64 {
        let v = to_f64(&self.x_component_sq).sqrt();
        if self.x_component_negative {
            -v
        } else {
            v
        }
    }

    /// Unit `Y` as floats.
    pub fn y_unit(&self) -> Vec<f64> {
        let n = to_f64(&self.y_dir_norm_sq).sqrt();
        self.y_dir.iter().map(|c| to_f64(c) / n).collect()
    }

    /// Unit `U` as floats.
    pub fn u_unit(&self) -> Vec<f64> {
        let n = to_f64(&self.u_dir_norm_sq).sqrt();
        self.u_dir.iter().map(|c| to_f64(c) / n).collect()
    }
}

/// Builds the adapted representation data for `(λ, X)`.
pub fn build_adapted(
    alg: &NilpotentLieAlgebra,
    lambda: &LinearForm,
    x: &[Rat],
) -> Result<AdaptedRepData, AdaptedError> {
    let orbit = orbit_invariants(alg, lambda, x)?;
    if !orbit.maximal_rank {
        return Err(AdaptedError::NotMaximalRank);
    }
    if orbit.delta_sq.is_zero() {
        return Err(AdaptedError::DegenerateDirection);
    }

    // Y realizes δ_O(X): the normalized representer of B_λ(X, .)|n_{k-1},
    // sign-fixed for determinism.
    let y_dir = fix_sign(orbit.delta_representer.clone());
    let y_dir_norm_sq = norm_sq(&y_dir);
    let b_x_ydir = b_form(alg, lambda, x, &y_dir)?; // = ±|y_dir|²
    debug_assert_eq!(b_x_ydir.abs(), y_dir_norm_sq);
    let b_xy_sign = if b_x_ydir.is_negative() { -1 } else { 1 };

    // n' = {T : B_λ(T, Y) = 0}; its defining row is also the normal.
    let bm = b_matrix(alg, lambda);
    let row = bm.mul_vec(&y_dir); // B_λ(E_i, y_dir) stacked over i
    let nprime = Subspace::span(alg.dim(), RatMat::from_rows(vec![row.clone()]).nullspace());
    if nprime.dim() != alg.dim() - 1 {
        return Err(AdaptedError::InternalError(format!(
            "ideal has dimension {}, expected {}",
            nprime.dim(),
            alg.dim() - 1
        )));
    }
    if nprime.contains(x) {
        return Err(AdaptedError::InternalError("X lies in n'".into()));
    }
    // n' is an ideal: [n, n'] ⊆ n'.
    for b in nprime.basis() {
        for i in 0..alg.dim() {
            let br = alg.bracket(&alg.basis_vector(i), b)?;
            if !nprime.contains(&br) {
                return Err(AdaptedError::InternalError("n' is not an ideal".into()));
            }
        }
    }

    let u_dir = fix_sign(row);
    let u_dir_norm_sq = norm_sq(&u_dir);
    let xu = dot(x, &u_dir);
    let x_component_sq = &xu * &xu / &u_dir_norm_sq;
    let x_component_negative = xu.is_negative();

    // Shift λ along exp(t₀ X) so that λ(Y) vanishes:
    // t₀ = λ(Y)/B_λ(X, Y) = λ(y_dir)/B_λ(X, y_dir), which is rational.
    let t0 = lambda.eval(&y_dir) / &b_x_ydir;
    let g: Vec<Rat> = x.iter().map(|c| c * &t0).collect();
    let lambda_shifted = coadjoint_act(alg, &g, lambda)?;
    if !lambda_shifted.eval(&y_dir).is_zero() {
        return Err(AdaptedError::InternalError("shift failed to kill λ(Y)".into()));
    }
    // The shift preserves B_λ(X, Y) ([X, Y] is central).
    if b_form(alg, &lambda_shifted, x, &y_dir)? != b_x_ydir {
        return Err(AdaptedError::InternalError(
            "shift changed B_λ(X, Y)".into(),
        ));
    }

    // n_k'' = {T in n_k : λ(T) = 0} (λ|n_k is an orbit invariant).
    let nk = alg.series_term(alg.step());
    let lam_rows: Vec<Vec<Rat>> = vec![lambda_shifted.coeffs().to_vec()];
    let lam_kernel = Subspace::span(alg.dim(), RatMat::from_rows(lam_rows).nullspace());
    let nk2 = nk.intersect(&lam_kernel);

    // Operator symbols for the n' basis generators.
    let op_symbols = nprime
        .basis()
        .iter()
        .map(|e| symbol_terms(alg, x, e))
        .collect::<Result<Vec<_>, _>>()?;

    Ok(AdaptedRepData {
        y_dir,
        y_dir_norm_sq,
        b_xy_sign,
        delta_sq: orbit.delta_sq.clone(),
        nprime,
        u_dir,
        u_dir_norm_sq,
        x_component_sq,
        x_component_negative,
        lambda_shifted,
        t0,
        nk2,
        op_symbols,
        orbit,
        x: x.to_vec(),
    })
}

fn symbol_terms(
    alg: &NilpotentLieAlgebra,
    x: &[Rat],
    e: &[Rat],
) -> Result<Vec<(usize, Vec<Rat>)>, AdaptedError> {
    let mut terms = Vec::new();
    let mut cur = e.to_vec();
    let mut fact = BigInt::from(1);
    for j in 0..alg.step() {
        if j > 0 {
            cur = alg.bracket(x, &cur)?;
            fact *= BigInt::from(j as i64);
        }
        if cur.iter().all(Zero::is_zero) {
            break;
        }
        let scaled: Vec<Rat> = cur
            .iter()
            .map(|c| c / Rat::from(fact.clone()))
            .collect();
        terms.push((j, scaled));
    }
    Ok(terms)
}

/// Symbol of the derived action of `E in n'`: the finite list
/// `[(j, ad(X)^j E / j!)]`, so that `π(E)` acts pointwise as
/// `Σ_j t^j π'(ad(X)^j E)/j!`.
pub fn operator_symbol(
    alg: &NilpotentLieAlgebra,
    rep: &AdaptedRepData,
    e: &[Rat],
) -> Result<Vec<(usize, Vec<Rat>)>, AdaptedError> {
    if !rep.nprime.contains(e) {
        return Err(AdaptedError::NotInIdeal);
    }
    symbol_terms(alg, &rep.x, e)
}

/// Scalar-resolved symbol: coefficients `p_j` such that `π(E)` acts as
/// multiplication by `Σ_j p_j t^j`, when every symbol term lies in
/// `span(Y) + n_k` (where `π'(Y) = 0` and `π'` is the central character
/// `2πi λ(.)` on `n_k`). Returns the imaginary parts `q_j` with
/// `p_j = 2πi q_j`; `None` when a term is not scalar-resolvable.
pub fn scalar_symbol(
    alg: &NilpotentLieAlgebra,
    rep: &AdaptedRepData,
    e: &[Rat],
) -> Result<Option<Vec<(usize, Rat)>>, AdaptedError> {
    let terms = operator_symbol(alg, rep, e)?;
    let d = alg.dim();
    let nk = alg.series_term(alg.step());
    // span(Y) + n_k
    let resolvable = Subspace::span(d, vec![rep.y_dir.clone()]).sum(nk);
    let mut out = Vec::new();
    for (j, v) in terms {
        if !resolvable.contains(&v) {
            return Ok(None);
        }
        // Solve v = c y_dir + z with z in n_k; π'(v) = 2πi λ(z).
        let mut cols: Vec<Vec<Rat>> = vec![rep.y_dir.clone()];
        cols.extend(nk.basis().to_vec());
        let mut m = RatMat::zero(d, cols.len());
        for (cidx, col) in cols.iter().enumerate() {
            for r in 0..d {
                m[(r, cidx)] = col[r].clone();
            }
        }
        let coeffs = m
            .solve(&v)
            .ok_or_else(|| AdaptedError::InternalError("decomposition failed".into()))?;
        let mut z = vec![Rat::zero(); d];
        for (cidx, col) in cols.iter().enumerate().skip(1) {
            for r in 0..d {
                let inc = &coeffs[cidx] * &col[r];
                z[r] += inc;
            }
        }
        let q = rep.lambda_shifted.eval(&z);
        if !q.is_zero() {
            out.push((j, q));
        }
    }
    Ok(Some(out))
}

/// Result of the quotient reduction `n̄' = n'/n_k''`.
#[derive(Debug, Clone)]
pub struct QuotientReduction {
    /// Coset representatives spanning `n'` modulo `n_k''`.
    pub coset_basis: Vec<Vec<Rat>>,
    /// The quotiented central ideal.
    pub nk2: Subspace,
    /// Verified: the image of `Y` is central in the quotient.
    pub ybar_central: bool,
    /// Verified: the induced form vanishes on the image of `Y`.
    pub lambda_bar_on_ybar_zero: bool,
}

/// Performs the reduction and verifies that the image of `Y` is central in
/// `n'/n_k''` with `λ̄'(Ȳ) = 0` — the facts that force `π'(Y) = 0`.
pub fn quotient_reduction(
    alg: &NilpotentLieAlgebra,
    rep: &AdaptedRepData,
) -> Result<QuotientReduction, AdaptedError> {
    // Coset representatives: n' basis vectors independent modulo n_k''.
    let mut acc = rep.nk2.clone();
    let mut coset_basis = Vec::new();
    for b in rep.nprime.basis() {
        if !acc.contains(b) {
            coset_basis.push(b.clone());
            acc = acc.sum(&Subspace::span(alg.dim(), vec![b.clone()]));
        }
    }

    // Ȳ central in the quotient: [T, Y] in n_k'' for every T in n'.
    // (B_λ(T, Y) = 0 and [T, Y] in n_k make the two conditions equivalent.)
    let mut ybar_central = true;
    for t in rep.nprime.basis() {
        let br = alg.bracket(t, &rep.y_dir)?;
        if !rep.nk2.contains(&br) {
            ybar_central = false;
        }
    }
    let lambda_bar_on_ybar_zero = rep.lambda_shifted.eval(&rep.y_dir).is_zero();
    if !ybar_central || !lambda_bar_on_ybar_zero {
        return Err(AdaptedError::InternalError(
            "quotient reduction lost centrality of Y".into(),
        ));
    }
    Ok(QuotientReduction {
        coset_basis,
        nk2: rep.nk2.clone(),
        ybar_central,
        lambda_bar_on_ybar_zero,
    })
}
