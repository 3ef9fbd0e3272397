//! Command line driver for the nilflow analysis pipeline.
//!
//! Subcommands: `analyze`, `orbit`, `adapt`, `solve`, `diophantine`,
//! `simulate`. Every run writes a text report, a JSON report with the
//! same field order, and (where applicable) a CSV artifact into the
//! output directory; stdout carries the text report, or JSON with
//! `--json`. Exit codes: 0 success, 1 validation failure, 2 usage error,
//! 3 violated estimate.

mod commands;
mod fmt;

use commands::{CliError, Outputs, RunConfig};
use fmt::Val;
use std::collections::BTreeMap;

const USAGE: &str = "\
nilflow — cohomological equations along nilflows

USAGE:
  nilflow <SUBCOMMAND> [ARGS] [FLAGS]

SUBCOMMANDS:
  analyze <file.alg>                        validate an algebra and report its structure
  orbit <file.alg> --lambda L --X X         coadjoint orbit invariants and rank class
  adapt <file.alg> --lambda L --X X         adapted representation data and symbols
  solve <file.alg> --lambda L --X X --f R   Green operator, obstructions, estimates
  diophantine --omega W --tau T --mmax N    finite-range Diophantine certification
  simulate <file.alg> --X X --obs O --T Ts  nilflow Birkhoff averages

COMMON FLAGS:
  --out DIR          output directory for artifacts (default .)
  --json             print the JSON report to stdout instead of text
  --precision N      significant digits in printed floats (default 17)
  --seed N           seed for randomized recipes (default 0)

SOLVE FLAGS:
  --alpha A          source Sobolev order (default 1.5)
  --beta B           target Sobolev order (default -0.75)
  --grid-N N         window nodes, power of two for the spectral path (default 4096)
  --grid-L L         window half-width (default 12)
  --mode M           grid | hermite (default grid)
  --ells LIST        comma list of part-2 weights, e.g. 0,1,2 (default none)
  --hermite-N N      oscillator modes for hermite mode (default 64)
  --f R              data recipe, e.g. 'dgaussian', '3/2*t^2*gaussian(2)',
                     'hermite(3)', 'random(4)'

DIOPHANTINE FLAGS:
  --tau T            Diophantine exponent (default 0)
  --mmax N           scan range (default 100000)
  --csv-shells N     exact per-shell CSV rows (default 2000)

SIMULATE FLAGS:
  --obs O            const | char:m1,m2,... | cob:c@m1,m2;c@m1,m2;...
  --T LIST           comma list of averaging times
  --dt D             orbit step (default 0.05)
  --x0 LIST          initial point coordinates (default identity)
";

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(&args) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {}", e.message());
            if matches!(e, CliError::Usage(_)) {
                eprintln!("\n{USAGE}");
            }
            std::process::exit(e.exit_code());
        }
    }
}

struct Parsed {
    sub: String,
    positional: Vec<String>,
    flags: BTreeMap<String, String>,
}

fn parse_args(args: &[String]) -> Result<Parsed, CliError> {
    let mut it = args.iter().peekable();
    let sub = it
        .next()
        .ok_or_else(|| CliError::Usage("missing subcommand".into()))?
        .clone();
    let mut positional = Vec::new();
    let mut flags = BTreeMap::new();
    while let Some(tok) = it.next() {
        if let Some(name) = tok.strip_prefix("--") {
            if name == "json" {
                flags.insert("json".to_string(), "true".to_string());
                continue;
            }
            let val = it
                .next()
                .ok_or_else(|| CliError::Usage(format!("flag --{name} needs a value")))?;
            if flags.insert(name.to_string(), val.clone()).is_some() {
                return Err(CliError::Usage(format!("flag --{name} given twice")));
            }
        } else {
            positional.push(tok.clone());
        }
    }
    Ok(Parsed {
        sub,
        positional,
        flags,
    })
}

fn flag<'a>(p: &'a Parsed, name: &str) -> Option<&'a str> {
    p.flags.get(name).map(String::as_str)
}

fn require<'a>(p: &'a Parsed, name: &str) -> Result<&'a str, CliError> {
    flag(p, name).ok_or_else(|| CliError::Usage(format!("missing required flag --{name}")))
}

fn num_flag<T: std::str::FromStr>(p: &Parsed, name: &str, default: T) -> Result<T, CliError> {
    match flag(p, name) {
        None => Ok(default),
        Some(v) => v
            .parse()
            .map_err(|_| CliError::Usage(format!("flag --{name}: invalid value `{v}`"))),
    }
}

fn known_flags(p: &Parsed, allowed: &[&str]) -> Result<(), CliError> {
    for key in p.flags.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(CliError::Usage(format!("unknown flag --{key}")));
        }
    }
    Ok(())
}

const COMMON: &[&str] = &["out", "json", "precision", "seed"];

fn with_common<'a>(extra: &'a [&'a str]) -> Vec<&'a str> {
    let mut v = COMMON.to_vec();
    v.extend_from_slice(extra);
    v
}

fn run(args: &[String]) -> Result<(), CliError> {
    if args.is_empty() || args[0] == "--help" || args[0] == "help" {
        print!("{USAGE}");
        return Ok(());
    }
    let parsed = parse_args(args)?;
    let config = RunConfig {
        subcommand: parsed.sub.clone(),
        out_dir: flag(&parsed, "out").unwrap_or(".").to_string(),
        json: flag(&parsed, "json").is_some(),
        precision: num_flag(&parsed, "precision", 17usize)?,
        seed: num_flag(&parsed, "seed", 0u64)?,
    };
    if config.precision == 0 || config.precision > 17 {
        return Err(CliError::Usage("--precision must be in 1..=17".into()));
    }

    let pos = |i: usize, what: &str| -> Result<&str, CliError> {
        parsed
            .positional
            .get(i)
            .map(String::as_str)
            .ok_or_else(|| CliError::Usage(format!("missing {what}")))
    };

    let mut outputs: Outputs = match parsed.sub.as_str() {
        "analyze" => {
            known_flags(&parsed, &with_common(&[]))?;
            commands::analyze(pos(0, "algebra file")?)?
        }
        "orbit" => {
            known_flags(&parsed, &with_common(&["lambda", "X"]))?;
            commands::orbit(
                pos(0, "algebra file")?,
                require(&parsed, "lambda")?,
                require(&parsed, "X")?,
            )?
        }
        "adapt" => {
            known_flags(&parsed, &with_common(&["lambda", "X"]))?;
            commands::adapt(
                pos(0, "algebra file")?,
                require(&parsed, "lambda")?,
                require(&parsed, "X")?,
            )?
        }
        "solve" => {
            known_flags(
                &parsed,
                &with_common(&[
                    "lambda", "X", "f", "alpha", "beta", "grid-N", "grid-L", "mode", "ells",
                    "hermite-N",
                ]),
            )?;
            let mode = flag(&parsed, "mode").unwrap_or("grid");
            if mode != "grid" && mode != "hermite" {
                return Err(CliError::Usage(format!(
                    "--mode must be grid or hermite, got `{mode}`"
                )));
            }
            let ells: Vec<u32> = match flag(&parsed, "ells") {
                None => Vec::new(),
                Some(s) => s
                    .split(',')
                    .map(|p| p.trim().parse())
                    .collect::<Result<_, _>>()
                    .map_err(|_| CliError::Usage("--ells: invalid list".into()))?,
            };
            commands::solve(
                pos(0, "algebra file")?,
                require(&parsed, "lambda")?,
                require(&parsed, "X")?,
                require(&parsed, "f")?,
                num_flag(&parsed, "alpha", 1.5)?,
                num_flag(&parsed, "beta", -0.75)?,
                num_flag(&parsed, "grid-N", 4096usize)?,
                num_flag(&parsed, "grid-L", 12.0)?,
                mode,
                &ells,
                num_flag(&parsed, "hermite-N", 64usize)?,
                config.precision,
                config.seed,
            )?
        }
        "diophantine" => {
            known_flags(&parsed, &with_common(&["omega", "tau", "mmax", "csv-shells"]))?;
            commands::diophantine_cmd(
                require(&parsed, "omega")?,
                num_flag(&parsed, "tau", 0.0)?,
                num_flag(&parsed, "mmax", 100_000u64)?,
                num_flag(&parsed, "csv-shells", 2000u64)?,
                config.precision,
            )?
        }
        "simulate" => {
            known_flags(&parsed, &with_common(&["X", "obs", "T", "dt", "x0"]))?;
            commands::simulate(
                pos(0, "algebra file")?,
                require(&parsed, "X")?,
                require(&parsed, "obs")?,
                require(&parsed, "T")?,
                num_flag(&parsed, "dt", 0.05)?,
                flag(&parsed, "x0"),
                config.precision,
            )?
        }
        other => return Err(CliError::Usage(format!("unknown subcommand `{other}`"))),
    };

    // Prepend the effective configuration; the section round-trips.
    let mut full = fmt::Report::new();
    full.push("config", Val::Nested(config.to_report()));
    full.push("result", Val::Nested(outputs.report.clone()));
    outputs.report = full;

    emit(&config, &outputs)
}

fn emit(config: &RunConfig, outputs: &Outputs) -> Result<(), CliError> {
    let dir = std::path::Path::new(&config.out_dir);
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Validation(format!("cannot create --out dir: {e}")))?;
    let text = outputs.report.to_text(config.precision);
    let json = outputs.report.to_json(config.precision);
    let stem = &config.subcommand;
    let write = |name: &str, content: &str| -> Result<(), CliError> {
        std::fs::write(dir.join(name), content)
            .map_err(|e| CliError::Validation(format!("cannot write {name}: {e}")))
    };
    write(&format!("{stem}_report.txt"), &text)?;
    write(&format!("{stem}_report.json"), &json)?;
    if let Some((name, csv)) = &outputs.csv {
        write(name, csv)?;
    }
    if config.json {
        print!("{json}");
    } else {
        print!("{text}");
    }
    Ok(())
}
