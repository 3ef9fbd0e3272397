//! Finite-range certification of small-denominator lower bounds for the
//! abelianized frequency vector.
//!
//! The scan certifies the largest `K` with
//! `|<M, Ω>| >= K / |M|^{n-1+τ}` over all integer vectors `0 < |M| <= M_max`
//! in the max-norm. Rather than enumerating the full box, each tail
//! `(m_2, ..., m_n)` is reduced over `m_1` to a constant-size candidate
//! set containing its minimizer (the product is piecewise monotone in
//! `m_1` around the root of the pairing); a brute-force cross-check of
//! this reduction lives in the tests. Pairings are accumulated in
//! double-double arithmetic so that cancellation stays far below the
//! certification scale for `M_max` up to 10^6.

use crate::algebra::NilpotentLieAlgebra;
use crate::rat::{to_f64, Rat};
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DiophantineError {
    #[error("exact integer relation <M, Ω> = 0 at M = {witness:?}")]
    RationalRelation { witness: Vec<i64> },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

// ---------------------------------------------------------------------
// Double-double arithmetic (compensated pairs hi + lo).
// ---------------------------------------------------------------------

/// Unevaluated sum of two doubles with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DDouble {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

#[allow(clippy::should_implement_trait)] // fn names mirror the usual
// compensated-arithmetic vocabulary; operator sugar is not worth the
// trait plumbing for a Copy pair type
impl DDouble {
    pub const ZERO: DDouble = DDouble { hi: 0.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Self {
        DDouble { hi: x, lo: 0.0 }
    }

    pub fn from_rat(r: &Rat) -> Self {
        // hi = rounded value, lo = rounded remainder.
        let hi = to_f64(r);
        let rest = r - Rat::from_float(hi).unwrap_or_else(Rat::zero);
        DDouble::from_f64(hi).add(DDouble::from_f64(to_f64(&rest)))
    }

    fn renorm(hi: f64, lo: f64) -> Self {
        let (s, e) = two_sum(hi, lo);
        DDouble { hi: s, lo: e }
    }

    pub fn add(self, other: DDouble) -> DDouble {
        let (s, e) = two_sum(self.hi, other.hi);
        DDouble::renorm(s, e + self.lo + other.lo)
    }

    pub fn sub(self, other: DDouble) -> DDouble {
        self.add(other.neg())
    }

    pub fn neg(self) -> DDouble {
        DDouble {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn mul(self, other: DDouble) -> DDouble {
        let (p, e) = two_prod(self.hi, other.hi);
        DDouble::renorm(p, e + self.hi * other.lo + self.lo * other.hi)
    }

    pub fn mul_i64(self, k: i64) -> DDouble {
        self.mul(DDouble::from_f64(k as f64))
    }

    pub fn div(self, other: DDouble) -> DDouble {
        let q0 = self.hi / other.hi;
        let r = self.sub(other.mul(DDouble::from_f64(q0)));
        let q1 = r.hi / other.hi;
        let r2 = r.sub(other.mul(DDouble::from_f64(q1)));
        let q2 = r2.hi / other.hi;
        DDouble::renorm(q0, q1 + q2)
    }

    pub fn sqrt(self) -> DDouble {
        assert!(self.hi >= 0.0);
        if self.hi == 0.0 {
            return DDouble::ZERO;
        }
        let s0 = self.hi.sqrt();
        // One Newton step in double-double.
        let s = DDouble::from_f64(s0);
        let corr = self.sub(s.mul(s)).div(DDouble::from_f64(2.0 * s0));
        s.add(corr)
    }

    pub fn abs(self) -> DDouble {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            self.neg()
        } else {
            self
        }
    }

    pub fn is_zero(self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn floor(self) -> f64 {
        let f = self.hi.floor();
        let frac = (self.hi - f) + self.lo;
        if frac < 0.0 {
            f - 1.0
        } else if frac >= 1.0 {
            f + 1.0
        } else {
            f
        }
    }
}

// ---------------------------------------------------------------------
// Frequency vectors
// ---------------------------------------------------------------------

/// Frequency data: exact rationals take the exact relation path, real
/// input is carried in double-double.
#[derive(Debug, Clone)]
pub enum Frequencies {
    Exact(Vec<Rat>),
    Real(Vec<DDouble>),
}

impl Frequencies {
    pub fn from_f64(omega: &[f64]) -> Self {
        Frequencies::Real(omega.iter().map(|&w| DDouble::from_f64(w)).collect())
    }

    pub fn len(&self) -> usize {
        match self {
            Frequencies::Exact(v) => v.len(),
            Frequencies::Real(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        match self {
            Frequencies::Exact(v) => v.iter().map(to_f64).collect(),
            Frequencies::Real(v) => v.iter().map(|d| d.to_f64()).collect(),
        }
    }

    fn dd(&self) -> Vec<DDouble> {
        match self {
            Frequencies::Exact(v) => v.iter().map(DDouble::from_rat).collect(),
            Frequencies::Real(v) => v.clone(),
        }
    }
}

/// Abelianized frequency vector of `X`: its first-layer Malcev
/// coordinates (the deeper part projects away).
pub fn frequency_vector(alg: &NilpotentLieAlgebra, x: &[Rat]) -> Vec<Rat> {
    x[..alg.generators()].to_vec()
}

/// Float version for irrational generators.
pub fn frequency_vector_f64(alg: &NilpotentLieAlgebra, x: &[f64]) -> Vec<f64> {
    x[..alg.generators()].to_vec()
}

// ---------------------------------------------------------------------
// Certification scan
// ---------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ShellRow {
    /// Max-norm shell radius.
    pub shell: u64,
    /// Minimum of `|<M, Ω>| |M|^{n-1+τ}` over the shell.
    pub shell_min: f64,
    /// Running minimum over all shells up to this one.
    pub record: f64,
}

#[derive(Debug, Clone)]
pub struct CfConvergent {
    pub p: i64,
    pub q: i64,
    /// `|<(-p, q), Ω>| max(|p|, |q|)^{n-1+τ}`.
    pub product: f64,
}

#[derive(Debug, Clone)]
pub struct DiophantineReport {
    pub omega: Vec<f64>,
    pub tau: f64,
    pub m_max: u64,
    /// Largest `K` valid over the whole range: the global product minimum.
    pub k_best: f64,
    /// Minimizing integer vector.
    pub witness: Vec<i64>,
    /// No exact integer relation was found in range.
    pub irrational_flag: bool,
    /// Product minimum restricted to deep shells `|M| > sqrt(M_max)`: an
    /// estimator of the asymptotic (liminf) constant, free of the
    /// small-shell dips.
    pub k_liminf: f64,
    pub liminf_witness: Vec<i64>,
    /// Shells where the running record dropped by more than 5x.
    pub collapse_shells: Vec<(u64, f64, f64)>,
    /// Exact per-shell minima for small shells (plotting CSV).
    pub shells: Vec<ShellRow>,
    /// Continued-fraction cross-check (n = 2 only): convergents of
    /// `ω_2/ω_1` and their products, plus the deep-shell minimum.
    pub cf_convergents: Vec<CfConvergent>,
    pub cf_k_liminf: Option<f64>,
}

struct ScanState {
    e: f64,
    best: f64,
    witness: Vec<i64>,
    tail_threshold: u64,
    best_tail: f64,
    tail_witness: Vec<i64>,
    relation: Option<Vec<i64>>,
}

impl ScanState {
    fn offer(&mut self, m: &[i64], pairing: DDouble) {
        if m.iter().all(|&v| v == 0) {
            return;
        }
        if pairing.is_zero() {
            if self.relation.is_none() {
                self.relation = Some(m.to_vec());
            }
            return;
        }
        let norm = m.iter().map(|v| v.unsigned_abs()).max().unwrap();
        let product = pairing.abs().to_f64() * (norm as f64).powf(self.e);
        if product < self.best {
            self.best = product;
            self.witness = m.to_vec();
        }
        if norm > self.tail_threshold && product < self.best_tail {
            self.best_tail = product;
            self.tail_witness = m.to_vec();
        }
    }
}

fn for_each_tail(n: usize, m_max: i64, mut f: impl FnMut(&[i64])) {
    // Odometer over the (n-1)-dimensional tail box.
    let dims = n - 1;
    if dims == 0 {
        f(&[]);
        return;
    }
    let mut tail = vec![-m_max; dims];
    loop {
        f(&tail);
        let mut i = 0;
        loop {
            tail[i] += 1;
            if tail[i] <= m_max {
                break;
            }
            tail[i] = -m_max;
            i += 1;
            if i == dims {
                return;
            }
        }
    }
}

/// Candidate `m_1` values containing the product minimizer for a fixed
/// tail: around the pairing root, at the clamped root, at the tail-norm
/// boundary, and at the box edge.
fn candidates(root: f64, t: i64, m_max: i64) -> Vec<i64> {
    let k0 = root.round().clamp(-(m_max as f64), m_max as f64) as i64;
    let mut cs = Vec::with_capacity(10);
    for dk in -1..=1_i64 {
        if let Some(k) = k0.checked_add(dk) {
            if k.abs() <= m_max {
                cs.push(k);
            }
        }
    }
    cs.push(k0.clamp(-t, t));
    for v in [t + 1, -(t + 1), m_max, -m_max] {
        if v.abs() <= m_max {
            cs.push(v);
        }
    }
    cs.sort_unstable();
    cs.dedup();
    cs
}

/// Exhaustive-scan certification of the Diophantine condition over
/// `0 < |M| <= m_max` (max-norm), exponent `n - 1 + τ`.
pub fn certify(
    omega: &Frequencies,
    tau: f64,
    m_max: u64,
    csv_shell_cap: u64,
) -> Result<DiophantineReport, DiophantineError> {
    let n = omega.len();
    if n < 2 {
        return Err(DiophantineError::InvalidInput(
            "frequency vector needs at least two entries".into(),
        ));
    }
    if m_max < 1 {
        return Err(DiophantineError::InvalidInput("m_max must be >= 1".into()));
    }
    if tau < 0.0 {
        return Err(DiophantineError::InvalidInput("τ must be >= 0".into()));
    }
    let w = omega.dd();
    if w[0].is_zero() {
        return Err(DiophantineError::InvalidInput(
            "leading frequency must be nonzero".into(),
        ));
    }
    let e = n as f64 - 1.0 + tau;
    let mm = m_max as i64;
    let mut state = ScanState {
        e,
        best: f64::INFINITY,
        witness: Vec::new(),
        tail_threshold: (m_max as f64).sqrt() as u64,
        best_tail: f64::INFINITY,
        tail_witness: Vec::new(),
        relation: None,
    };

    // Exact integer-relation path for rational input.
    if let Frequencies::Exact(rats) = omega {
        if let Some(witness) = exact_relation(rats, mm) {
            return Err(DiophantineError::RationalRelation { witness });
        }
    }

    for_each_tail(n, mm, |tail| {
        let mut c = DDouble::ZERO;
        for (i, &mi) in tail.iter().enumerate() {
            c = c.add(w[i + 1].mul_i64(mi));
        }
        let t = tail.iter().map(|v| v.abs()).max().unwrap_or(0);
        let root = c.neg().div(w[0]).to_f64();
        let mut m = Vec::with_capacity(n);
        for m1 in candidates(root, t, mm) {
            m.clear();
            m.push(m1);
            m.extend_from_slice(tail);
            let pairing = w[0].mul_i64(m1).add(c);
            state.offer(&m, pairing);
        }
    });

    if let Some(witness) = state.relation {
        return Err(DiophantineError::RationalRelation { witness });
    }

    // Exact small-shell minima by brute force, for the CSV and the
    // collapse flags.
    let cap = csv_shell_cap.min(m_max);
    let mut shells = Vec::new();
    let mut record = f64::INFINITY;
    let mut collapse = Vec::new();
    for r in 1..=cap {
        let mut shell_min = f64::INFINITY;
        shell_boundary(n, r as i64, |m| {
            let mut pairing = DDouble::ZERO;
            for (i, &mi) in m.iter().enumerate() {
                pairing = pairing.add(w[i].mul_i64(mi));
            }
            if !pairing.is_zero() {
                let product = pairing.abs().to_f64() * (r as f64).powf(e);
                shell_min = shell_min.min(product);
            }
        });
        if shell_min < record / 5.0 {
            collapse.push((r, record, shell_min));
        }
        record = record.min(shell_min);
        shells.push(ShellRow {
            shell: r,
            shell_min,
            record,
        });
    }

    // Continued-fraction cross-check for planar frequencies.
    let (cf_convergents, cf_k_liminf) = if n == 2 {
        let ratio = w[1].div(w[0]);
        let convs = convergents(ratio, mm);
        let mut rows = Vec::new();
        let mut tail_min = f64::INFINITY;
        for (p, q) in convs {
            let pairing = w[0].mul_i64(-p).add(w[1].mul_i64(q)).abs();
            let norm = p.unsigned_abs().max(q.unsigned_abs());
            if norm == 0 || norm > m_max || pairing.is_zero() {
                continue;
            }
            let product = pairing.to_f64() * (norm as f64).powf(e);
            if norm > state.tail_threshold {
                tail_min = tail_min.min(product);
            }
            rows.push(CfConvergent { p, q, product });
        }
        (rows, tail_min.is_finite().then_some(tail_min))
    } else {
        (Vec::new(), None)
    };

    Ok(DiophantineReport {
        omega: omega.to_f64_vec(),
        tau,
        m_max,
        k_best: state.best,
        witness: state.witness,
        irrational_flag: true,
        k_liminf: state.best_tail,
        liminf_witness: state.tail_witness,
        collapse_shells: collapse,
        shells,
        cf_convergents,
        cf_k_liminf,
    })
}

/// Visits the boundary of the max-norm shell of radius `r` exactly once
/// per point.
fn shell_boundary(n: usize, r: i64, mut f: impl FnMut(&[i64])) {
    let mut m = vec![0i64; n];
    for fix in 0..n {
        // Coordinates before `fix` range over (-r, r); after it over
        // [-r, r]; `fix` itself is pinned to ±r. This covers the shell
        // without repeats.
        let others: Vec<usize> = (0..n).filter(|&i| i != fix).collect();
        let lims: Vec<i64> = others.iter().map(|&i| if i > fix { r } else { r - 1 }).collect();
        for (slot, &i) in others.iter().enumerate() {
            m[i] = -lims[slot];
        }
        'outer: loop {
            m[fix] = r;
            f(&m);
            m[fix] = -r;
            f(&m);
            let mut j = 0;
            loop {
                if j == others.len() {
                    break 'outer;
                }
                let idx = others[j];
                m[idx] += 1;
                if m[idx] <= lims[j] {
                    break;
                }
                m[idx] = -lims[j];
                j += 1;
            }
        }
    }
}

/// Minimal exact integer relation for rational frequencies, if one fits
/// in the box.
fn exact_relation(rats: &[Rat], m_max: i64) -> Option<Vec<i64>> {
    let n = rats.len();
    if n == 2 {
        let (a, b) = (&rats[0], &rats[1]);
        if b.is_zero() {
            return Some(vec![0, 1]);
        }
        if a.is_zero() {
            return Some(vec![1, 0]);
        }
        // ω_2/ω_1 = p/q in lowest terms: witness (p, -q).
        let ratio = b / a;
        let p = ratio.numer().to_i64()?;
        let q = ratio.denom().to_i64()?;
        if p.abs() <= m_max && q.abs() <= m_max {
            return Some(vec![p, -q]);
        }
        return None;
    }
    // General n: exact pairing over all tails, solving for the m_1 root.
    let mut found = None;
    for_each_tail(n, m_max, |tail| {
        if found.is_some() {
            return;
        }
        let mut c = Rat::zero();
        for (i, &mi) in tail.iter().enumerate() {
            c += &rats[i + 1] * Rat::from(num_bigint::BigInt::from(mi));
        }
        if rats[0].is_zero() {
            if c.is_zero() && tail.iter().any(|&v| v != 0) {
                let mut m = vec![0];
                m.extend_from_slice(tail);
                found = Some(m);
            }
            return;
        }
        let root = -&c / &rats[0];
        if root.denom().is_one() {
            if let Some(m1) = root.numer().to_i64() {
                if m1.abs() <= m_max && (m1 != 0 || tail.iter().any(|&v| v != 0)) {
                    let mut m = vec![m1];
                    m.extend_from_slice(tail);
                    found = Some(m);
                }
            }
        }
    });
    found
}

/// True when no exact integer relation exists in range; otherwise false
/// with a witness.
pub fn is_irrational_in_range(
    omega: &Frequencies,
    m_max: u64,
) -> Result<(bool, Option<Vec<i64>>), DiophantineError> {
    match certify(omega, 0.0, m_max, 0) {
        Ok(_) => Ok((true, None)),
        Err(DiophantineError::RationalRelation { witness }) => Ok((false, Some(witness))),
        Err(e) => Err(e),
    }
}

/// Continued-fraction convergents `p_k/q_k` of a real ratio, up to
/// denominator `q_max`.
pub fn convergents(x: DDouble, q_max: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    let (mut p0, mut q0): (i64, i64) = (0, 1);
    let (mut p1, mut q1): (i64, i64) = (1, 0);
    let mut frac = x;
    for _ in 0..64 {
        let a = frac.floor();
        if a.abs() > 1e17 {
            break;
        }
        let ai = a as i64;
        let (Some(p2), Some(q2)) = (
            ai.checked_mul(p1).and_then(|v| v.checked_add(p0)),
            ai.checked_mul(q1).and_then(|v| v.checked_add(q0)),
        ) else {
            break;
        };
        if q2.abs() > q_max {
            break;
        }
        out.push((p2, q2));
        (p0, q0) = (p1, q1);
        (p1, q1) = (p2, q2);
        let rem = frac.sub(DDouble::from_f64(a));
        if rem.abs().to_f64() < 1e-28 {
            break;
        }
        frac = DDouble::from_f64(1.0).div(rem);
    }
    out
}

/// Golden-ratio conjugate `(sqrt(5) - 1)/2` in double-double.
pub fn golden_conjugate() -> DDouble {
    DDouble::from_f64(5.0)
        .sqrt()
        .sub(DDouble::from_f64(1.0))
        .div(DDouble::from_f64(2.0))
}

/// Golden ratio `(sqrt(5) + 1)/2` in double-double.
pub fn golden_ratio() -> DDouble {
    DDouble::from_f64(5.0)
        .sqrt()
        .add(DDouble::from_f64(1.0))
        .div(DDouble::from_f64(2.0))
}
