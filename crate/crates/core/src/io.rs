//! Algebra definition files.
//!
//! The on-disk format is a small key-value tree:
//!
//! ```text
//! # 3-dimensional Heisenberg algebra
//! dim: 3
//! step: 2
//! layers: 2 1
//! brackets:
//!   [1, 2, 3, 1]
//! ```
//!
//! `layers` lists the Malcev layer sizes; each bracket entry `[i, j, l, c]`
//! states `[E_i, E_j] = c E_l + ...` with 1-based indices and `c` in the
//! exact-rational syntax `p/q`. Omitted entries are zero. Lines starting
//! with `#` are comments.

use crate::algebra::{AlgebraError, BracketEntry, NilpotentLieAlgebra};
use crate::rat::parse_rat;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing required key `{0}`")]
    MissingKey(&'static str),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        msg: msg.into(),
    }
}

/// Parses the algebra file format described in the module docs.
pub fn parse_algebra(text: &str) -> Result<NilpotentLieAlgebra, ParseError> {
    let mut dim: Option<usize> = None;
    let mut step: Option<usize> = None;
    let mut layers: Option<Vec<usize>> = None;
    let mut entries = Vec::new();
    let mut in_brackets = false;

    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if in_brackets {
            if content.starts_with('[') {
                entries.push(parse_entry(line, content)?);
                continue;
            }
            in_brackets = false;
        }
        let Some((key, value)) = content.split_once(':') else {
            return Err(syntax(line, format!("expected `key: value`, got `{content}`")));
        };
        let key = key.trim();
        let value = value.trim();
        match key {
            "dim" => {
                dim = Some(
                    value
                        .parse()
                        .map_err(|_| syntax(line, format!("invalid dim `{value}`")))?,
                );
            }
            "step" => {
                step = Some(
                    value
                        .parse()
                        .map_err(|_| syntax(line, format!("invalid step `{value}`")))?,
                );
            }
            "layers" => {
                let sizes: Result<Vec<usize>, _> =
                    value.split_whitespace().map(str::parse).collect();
                layers = Some(sizes.map_err(|_| syntax(line, format!("invalid layers `{value}`")))?);
            }
            "brackets" => {
                in_brackets = true;
                if !value.is_empty() {
                    return Err(syntax(line, "bracket entries belong on following lines"));
                }
            }
            other => return Err(syntax(line, format!("unknown key `{other}`"))),
        }
    }

    let dim = dim.ok_or(ParseError::MissingKey("dim"))?;
    let step = step.ok_or(ParseError::MissingKey("step"))?;
    let layers = layers.ok_or(ParseError::MissingKey("layers"))?;
    if layers.len() != step {
        return Err(syntax(
            0,
            format!("`layers` lists {} sizes but step is {step}", layers.len()),
        ));
    }
    Ok(NilpotentLieAlgebra::new(dim, layers, entries)?)
}

fn parse_entry(line: usize, content: &str) -> Result<BracketEntry, ParseError> {
    let inner = content
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| syntax(line, "bracket entry must be `[i, j, l, p/q]`"))?;
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(syntax(line, "bracket entry needs exactly four fields"));
    }
    let index = |s: &str| -> Result<usize, ParseError> {
        let v: usize = s
            .parse()
            .map_err(|_| syntax(line, format!("invalid index `{s}`")))?;
        if v == 0 {
            return Err(syntax(line, "indices are 1-based"));
        }
        Ok(v - 1)
    };
    Ok(BracketEntry {
        i: index(parts[0])?,
        j: index(parts[1])?,
        l: index(parts[2])?,
        c: parse_rat(parts[3]).map_err(|e| syntax(line, e))?,
    })
}
