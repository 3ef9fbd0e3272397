//! Symbolic Schwartz-class data recipes.
//!
//! A recipe is a finite sum of terms `c * t^p * gaussian(a)` (meaning
//! `c t^p exp(-π a t²)`) and `c * hermite(n)` (the oscillator eigenbasis
//! of the ambient representation). The polynomial-Gaussian family is
//! closed under differentiation, which gives exact coboundary data and
//! closed-form primitives for the tests.

use crate::rat::parse_rat;
use rand::Rng;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub enum Atom {
    /// `t^p exp(-π a t²)`, `a > 0`.
    PolyGauss { p: u32, a: f64 },
    /// Oscillator eigenfunction `e_n` (requires an ambient `m`).
    Hermite { n: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: f64,
    pub atom: Atom,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Recipe {
    pub terms: Vec<Term>,
}

impl Recipe {
    pub fn gaussian(a: f64) -> Self {
        Recipe {
            terms: vec![Term {
                coeff: 1.0,
                atom: Atom::PolyGauss { p: 0, a },
            }],
        }
    }

    pub fn needs_hermite_context(&self) -> bool {
        self.terms
            .iter()
            .any(|t| matches!(t.atom, Atom::Hermite { .. }))
    }

    pub fn max_hermite_index(&self) -> usize {
        self.terms
            .iter()
            .filter_map(|t| match t.atom {
                Atom::Hermite { n } => Some(n),
                _ => None,
            })
            .max()
            .map_or(0, |n| n + 1)
    }

    /// Evaluates at `t`; `m` supplies the oscillator scaling and may be
    /// `None` when no hermite atoms occur.
    pub fn eval(&self, t: f64, m: Option<f64>) -> f64 {
        let hermite_cache = if self.needs_hermite_context() {
            let m = m.expect("hermite atoms need the ambient parameter m");
            super::hermite::basis_values(m, self.max_hermite_index(), t)
        } else {
            Vec::new()
        };
        let mut acc = 0.0;
        for term in &self.terms {
            acc += term.coeff
                * match term.atom {
                    Atom::PolyGauss { p, a } => t.powi(p as i32) * (-PI * a * t * t).exp(),
                    Atom::Hermite { n } => hermite_cache[n],
                };
        }
        acc
    }

    /// Exact derivative; defined for polynomial-Gaussian recipes.
    pub fn derivative(&self) -> Result<Recipe, String> {
        let mut terms = Vec::new();
        for term in &self.terms {
            match term.atom {
                Atom::PolyGauss { p, a } => {
                    if p > 0 {
                        terms.push(Term {
                            coeff: term.coeff * p as f64,
                            atom: Atom::PolyGauss { p: p - 1, a },
                        });
                    }
                    terms.push(Term {
                        coeff: -term.coeff * 2.0 * PI * a,
                        atom: Atom::PolyGauss { p: p + 1, a },
                    });
                }
                Atom::Hermite { .. } => {
                    return Err("derivative of hermite atoms is not recipe-closed".into())
                }
            }
        }
        Ok(Recipe { terms })
    }

    /// Random polynomial-Gaussian recipe: `k` terms with powers up to 4
    /// and widths in [1/2, 3].
    pub fn random(rng: &mut impl Rng, k: usize) -> Recipe {
        let terms = (0..k.max(1))
            .map(|_| Term {
                coeff: rng.gen_range(-2.0..2.0_f64),
                atom: Atom::PolyGauss {
                    p: rng.gen_range(0..=4),
                    a: rng.gen_range(1..=6) as f64 * 0.5,
                },
            })
            .collect();
        Recipe { terms }
    }
}

/// Parses the recipe grammar: `+`-separated terms, each an optional
/// rational coefficient times one of `gaussian(a)`, `dgaussian(a)`,
/// `t^p*gaussian(a)`, `hermite(n)`. Bare `gaussian`/`dgaussian` default
/// to `a = 1`; `-` prefixes negate.
pub fn parse_recipe(s: &str) -> Result<Recipe, String> {
    let mut terms = Vec::new();
    // Normalize "a - b" into "a + -b" before splitting.
    let normalized = s.replace(" -", " + -").replace("- ", "-");
    for raw in normalized.split('+') {
        let mut piece = raw.trim();
        if piece.is_empty() {
            continue;
        }
        let mut sign = 1.0;
        while let Some(rest) = piece.strip_prefix('-') {
            sign = -sign;
            piece = rest.trim();
        }
        let mut coeff = sign;
        let mut power = 0u32;
        let mut atom: Option<Atom> = None;
        for factor in piece.split('*') {
            let f = factor.trim();
            if f.is_empty() {
                return Err(format!("empty factor in `{piece}`"));
            }
            if let Some(rest) = f.strip_prefix("t^") {
                power += rest
                    .parse::<u32>()
                    .map_err(|_| format!("invalid power `{f}`"))?;
            } else if f == "t" {
                power += 1;
            } else if let Some(arg) = fn_arg(f, "gaussian")? {
                set_atom(&mut atom, Atom::PolyGauss { p: 0, a: arg })?;
            } else if let Some(arg) = fn_arg(f, "dgaussian")? {
                // d/dt gaussian(a) = -2π a t gaussian(a).
                coeff *= -2.0 * PI * arg;
                power += 1;
                set_atom(&mut atom, Atom::PolyGauss { p: 0, a: arg })?;
            } else if let Some(arg) = fn_arg(f, "hermite")? {
                if arg.fract() != 0.0 || arg < 0.0 {
                    return Err(format!("hermite index must be a nonnegative integer in `{f}`"));
                }
                set_atom(&mut atom, Atom::Hermite { n: arg as usize })?;
            } else if let Ok(r) = parse_rat(f) {
                coeff *= crate::rat::to_f64(&r);
            } else {
                return Err(format!("unrecognized factor `{f}`"));
            }
        }
        let atom = match atom {
            Some(Atom::PolyGauss { p, a }) => Atom::PolyGauss { p: p + power, a },
            Some(h @ Atom::Hermite { .. }) => {
                if power > 0 {
                    return Err("monomial factors cannot multiply hermite atoms".into());
                }
                h
            }
            None => return Err(format!("term `{piece}` has no gaussian or hermite factor")),
        };
        terms.push(Term { coeff, atom });
    }
    if terms.is_empty() {
        return Err("empty recipe".into());
    }
    Ok(Recipe { terms })
}

fn set_atom(slot: &mut Option<Atom>, atom: Atom) -> Result<(), String> {
    if slot.is_some() {
        return Err("more than one gaussian/hermite factor in a term".into());
    }
    *slot = Some(atom);
    Ok(())
}

/// Matches `name` or `name(arg)` with a rational `arg`; returns the
/// argument (1 when omitted), or `None` if the head does not match.
fn fn_arg(f: &str, name: &str) -> Result<Option<f64>, String> {
    if f == name {
        return Ok(Some(1.0));
    }
    let Some(rest) = f.strip_prefix(name) else {
        return Ok(None);
    };
    let Some(arg) = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')) else {
        return Ok(None);
    };
    let r = parse_rat(arg)?;
    let v = crate::rat::to_f64(&r);
    if name != "hermite" && v <= 0.0 {
        return Err(format!("width must be positive in `{f}`"));
    }
    Ok(Some(v))
}
