//! Subcommand implementations.

use crate::fmt::{Csv, Report, Val};
use nilflow_core::adapted::{build_adapted, operator_symbol, quotient_reduction, AdaptedError};
use nilflow_core::algebra::{LatticeData, NilpotentLieAlgebra};
use nilflow_core::coadjoint::{orbit_invariants, weakly_integral, LinearForm};
use nilflow_core::diophantine::{self, Frequencies};
use nilflow_core::rat::{fmt_rat, parse_rat, to_f64, Rat};
use nilflow_core::sim::{
    birkhoff_average, equidistribution_report, NilPoint, Observable, OrbitQuadrature, SimError,
};
use nilflow_core::solver::{
    self, grid::GridSpec, recipe, RepContext, RepFunction, SolverError,
};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::SeedableRng;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or arguments: exit 2.
    Usage(String),
    /// Invalid inputs or failed preconditions: exit 1.
    Validation(String),
    /// A checked estimate was violated or an obstruction blocked a
    /// requested solve: exit 3.
    Estimate(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Validation(_) => 1,
            CliError::Estimate(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Validation(m) | CliError::Estimate(m) => m,
        }
    }
}

fn solver_err(e: SolverError) -> CliError {
    match e {
        SolverError::EstimateViolated { .. } | SolverError::ObstructionNonzero { .. } => {
            CliError::Estimate(e.to_string())
        }
        SolverError::Component { ref source, .. }
            if matches!(
                **source,
                SolverError::EstimateViolated { .. } | SolverError::ObstructionNonzero { .. }
            ) =>
        {
            CliError::Estimate(e.to_string())
        }
        other => CliError::Validation(other.to_string()),
    }
}

fn adapted_err(e: AdaptedError) -> CliError {
    CliError::Validation(e.to_string())
}

/// Effective configuration, echoed into every report (the config section
/// round-trips: parsing the echoed flags reproduces the run).
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub subcommand: String,
    pub out_dir: String,
    pub json: bool,
    pub precision: usize,
    pub seed: u64,
}

impl RunConfig {
    pub fn to_report(&self) -> Report {
        let mut r = Report::new();
        r.push("subcommand", self.subcommand.as_str());
        r.push("out", self.out_dir.as_str());
        r.push("json", self.json);
        r.push("precision", self.precision);
        r.push("seed", self.seed);
        r
    }
}

pub struct Outputs {
    pub report: Report,
    pub csv: Option<(String, String)>,
}

// ---------------------------------------------------------------------
// Shared parsing helpers
// ---------------------------------------------------------------------

fn load_algebra(path: &str) -> Result<NilpotentLieAlgebra, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read `{path}`: {e}")))?;
    nilflow_core::io::parse_algebra(&text)
        .map_err(|e| CliError::Validation(format!("{path}: {e}")))
}

fn parse_rat_vec(s: &str, dim: usize, what: &str) -> Result<Vec<Rat>, CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != dim {
        return Err(CliError::Usage(format!(
            "{what} needs {dim} comma-separated rational entries, got {}",
            parts.len()
        )));
    }
    parts
        .iter()
        .map(|p| parse_rat(p).map_err(|e| CliError::Usage(format!("{what}: {e}"))))
        .collect()
}

fn parse_f64_vec(s: &str, dim: usize, what: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != dim {
        return Err(CliError::Usage(format!(
            "{what} needs {dim} comma-separated entries, got {}",
            parts.len()
        )));
    }
    parts
        .iter()
        .map(|p| {
            if let Ok(r) = parse_rat(p) {
                return Ok(to_f64(&r));
            }
            p.parse::<f64>()
                .map_err(|_| CliError::Usage(format!("{what}: invalid number `{p}`")))
        })
        .collect()
}

fn rat_vec_strings(v: &[Rat]) -> Vec<String> {
    v.iter().map(fmt_rat).collect()
}

fn subspace_rows(s: &nilflow_core::linalg::Subspace) -> Vec<String> {
    s.basis()
        .iter()
        .map(|row| {
            let cells: Vec<String> = row.iter().map(fmt_rat).collect();
            format!("({})", cells.join(", "))
        })
        .collect()
}

// ---------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------

pub fn analyze(path: &str) -> Result<Outputs, CliError> {
    let alg = load_algebra(path)?;
    let mut r = Report::new();
    r.push("file", path);
    r.push("dim", alg.dim());
    r.push("step", alg.step());
    r.push(
        "layers",
        Val::List(
            alg.layer_sizes()
                .iter()
                .map(|&s| Val::UInt(s as u64))
                .collect(),
        ),
    );
    r.push_strs("basis", alg.labels());
    let dims: Vec<Val> = alg
        .central_series()
        .iter()
        .map(|s| Val::UInt(s.dim() as u64))
        .collect();
    r.push("central_series_dims", Val::List(dims));
    r.push("center_dim", alg.center().dim());
    r.push("jacobi_identity", "verified exactly at construction");
    match LatticeData::new(&alg) {
        Ok(lat) => {
            r.push("lattice_integer_brackets", true);
            r.push(
                "central_lattice_rank",
                lat.central_lattice_basis().len(),
            );
        }
        Err(e) => {
            r.push("lattice_integer_brackets", false);
            r.push("lattice_note", e.to_string());
        }
    }
    r.push(
        "strongly_based_note",
        "declared data; only the integer-bracket necessary condition is checked",
    );
    Ok(Outputs {
        report: r,
        csv: None,
    })
}

// ---------------------------------------------------------------------
// orbit
// ---------------------------------------------------------------------

pub fn orbit(path: &str, lambda_s: &str, x_s: &str) -> Result<Outputs, CliError> {
    let alg = load_algebra(path)?;
    let lambda = LinearForm::new(parse_rat_vec(lambda_s, alg.dim(), "--lambda")?);
    let x = parse_rat_vec(x_s, alg.dim(), "--X")?;
    let inv = orbit_invariants(&alg, &lambda, &x)
        .map_err(|e| CliError::Validation(e.to_string()))?;

    let mut r = Report::new();
    r.push("file", path);
    r.push_strs("lambda", &rat_vec_strings(lambda.coeffs()));
    r.push_strs("x", &rat_vec_strings(&x));
    r.push("maximal_rank", inv.maximal_rank);
    r.push(
        "rank_class",
        if inv.maximal_rank {
            "maximal"
        } else {
            "factors through the step-(k-1) quotient"
        },
    );
    r.push("delta_sq", fmt_rat(&inv.delta_sq));
    r.push("delta", inv.delta);
    r.push("w_k_sq", fmt_rat(&inv.w_k_sq));
    r.push("w_k", inv.w_k);
    r.push("w_z_sq", fmt_rat(&inv.w_z_sq));
    r.push("w_z", inv.w_z);
    let bm_rows: Vec<String> = (0..alg.dim())
        .map(|i| {
            let cells: Vec<String> = (0..alg.dim()).map(|j| fmt_rat(&inv.b_matrix[(i, j)])).collect();
            format!("({})", cells.join(", "))
        })
        .collect();
    r.push_strs("b_matrix", &bm_rows);
    r.push("radical_dim", inv.radical.dim());
    r.push_strs("radical_basis", &subspace_rows(&inv.radical));
    r.push("nk1_perp_dim", inv.nk1_perp.dim());
    r.push_strs("nk1_perp_basis", &subspace_rows(&inv.nk1_perp));
    let mut dxy = Report::new();
    for (i, v) in &inv.delta_xy {
        dxy.push(&format!("E{}", i + 1), fmt_rat(v));
    }
    r.push("delta_xy", Val::Nested(dxy));
    if let Ok(lat) = LatticeData::new(&alg) {
        r.push("weakly_integral", weakly_integral(&lat, &lambda));
    }
    Ok(Outputs {
        report: r,
        csv: None,
    })
}

// ---------------------------------------------------------------------
// adapt
// ---------------------------------------------------------------------

pub fn adapt(path: &str, lambda_s: &str, x_s: &str) -> Result<Outputs, CliError> {
    let alg = load_algebra(path)?;
    let lambda = LinearForm::new(parse_rat_vec(lambda_s, alg.dim(), "--lambda")?);
    let x = parse_rat_vec(x_s, alg.dim(), "--X")?;
    let rep = build_adapted(&alg, &lambda, &x).map_err(adapted_err)?;

    let mut r = Report::new();
    r.push("file", path);
    r.push_strs("lambda", &rat_vec_strings(lambda.coeffs()));
    r.push_strs("x", &rat_vec_strings(&x));
    r.push_strs("y_direction", &rat_vec_strings(&rep.y_dir));
    r.push("delta_sq", fmt_rat(&rep.delta_sq));
    r.push("delta", rep.delta());
    r.push("b_xy", rep.b_xy());
    r.push("nprime_dim", rep.nprime.dim());
    r.push_strs("nprime_basis", &subspace_rows(&rep.nprime));
    r.push_strs("u_direction", &rat_vec_strings(&rep.u_dir));
    r.push("x_component", rep.x_component());
    r.push("x_component_sq", fmt_rat(&rep.x_component_sq));
    r.push("shift_t0", fmt_rat(&rep.t0));
    r.push_strs(
        "lambda_shifted",
        &rat_vec_strings(rep.lambda_shifted.coeffs()),
    );
    r.push("nk2_dim", rep.nk2.dim());
    let q = quotient_reduction(&alg, &rep).map_err(adapted_err)?;
    r.push("quotient_ybar_central", q.ybar_central);
    r.push("quotient_coset_rank", q.coset_basis.len());

    let mut symbols = Report::new();
    for (gi, b) in rep.nprime.basis().iter().enumerate() {
        let sym = operator_symbol(&alg, &rep, b).map_err(adapted_err)?;
        let mut rows = Vec::new();
        for (j, vec) in &sym {
            rows.push(Val::Str(format!(
                "t^{j}/{j}! * ({})",
                rat_vec_strings(vec).join(", ")
            )));
        }
        symbols.push(&format!("generator_{gi}"), Val::List(rows));
    }
    r.push("operator_symbols", Val::Nested(symbols));
    Ok(Outputs {
        report: r,
        csv: None,
    })
}

// ---------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------

#[allow(clippy::too_many_arguments)]
pub fn solve(
    path: &str,
    lambda_s: &str,
    x_s: &str,
    f_s: &str,
    alpha: f64,
    beta: f64,
    grid_n: usize,
    grid_l: f64,
    mode: &str,
    ells: &[u32],
    hermite_n: usize,
    precision: usize,
    seed: u64,
) -> Result<Outputs, CliError> {
    let alg = load_algebra(path)?;
    let lambda = LinearForm::new(parse_rat_vec(lambda_s, alg.dim(), "--lambda")?);
    let x = parse_rat_vec(x_s, alg.dim(), "--X")?;
    let rep = build_adapted(&alg, &lambda, &x).map_err(adapted_err)?;
    let ctx = RepContext::from_adapted(&alg, &rep);
    if mode == "hermite" && ctx.hermite_m.is_none() {
        return Err(CliError::Validation(
            "hermite mode needs the standard Heisenberg pair (λ = m E3*, X = E1)".into(),
        ));
    }

    let recipe = if let Some(rest) = f_s.strip_prefix("random(") {
        let k: usize = rest
            .strip_suffix(')')
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| CliError::Usage("random recipe is `random(k)`".into()))?;
        let mut rng = StdRng::seed_from_u64(seed);
        recipe::Recipe::random(&mut rng, k)
    } else {
        recipe::parse_recipe(f_s).map_err(|e| CliError::Usage(format!("--f: {e}")))?
    };

    let spec = GridSpec::new(grid_n, grid_l);
    let f = RepFunction::from_recipe(&ctx, spec, &recipe).map_err(solver_err)?;

    let mut r = Report::new();
    r.push("file", path);
    r.push_strs("lambda", &rat_vec_strings(lambda.coeffs()));
    r.push_strs("x", &rat_vec_strings(&x));
    r.push("recipe", format!("{recipe:?}"));
    r.push("delta", ctx.delta);
    r.push("mode", mode);
    r.push("grid_n", grid_n);
    r.push("grid_l", grid_l);
    r.push("alpha", alpha);
    r.push("beta", beta);

    let obstructions = solver::obstructions(&ctx, &f).map_err(solver_err)?;
    let obs_norms: Vec<f64> = obstructions.iter().map(|z| z.norm()).collect();
    r.push_floats("obstruction_abs", &obs_norms);
    let f_norm = solver::l2_norm(&ctx, &f);
    r.push("f_l2", f_norm);
    let obstruction_free = obs_norms
        .iter()
        .all(|&v| v <= solver::ZERO_TOL * f_norm.max(f64::MIN_POSITIVE));
    r.push("obstruction_free", obstruction_free);

    let u = solver::green(&ctx, &f).map_err(solver_err)?;
    // Inversion residual of the primitive.
    let du = u.derivative();
    let mut resid_sq = 0.0;
    if let RepFunction::Grid { values, .. } = &f {
        for (comp_d, comp_f) in du.iter().zip(values) {
            for (a, b) in comp_d.iter().zip(comp_f) {
                resid_sq += (a - b).norm_sqr() * spec.h();
            }
        }
    }
    let resid = resid_sq.sqrt() / f_norm.max(f64::MIN_POSITIVE);
    r.push("inversion_residual_rel", resid);
    r.push("u_sup", u.sup_norm());
    r.push("f_y_norm_alpha", solver::y_sobolev_norm(&ctx, &f, alpha).map_err(solver_err)?);
    r.push("u_y_norm_beta", u.y_weighted_norm(&ctx, beta));

    let inv_est = solver::check_invdist_estimate(&ctx, &f, alpha).map_err(solver_err)?;
    let mut est = Report::new();
    est.push("lhs", inv_est.lhs);
    est.push("rhs", inv_est.rhs);
    est.push("constant", inv_est.constant);
    est.push("ratio", inv_est.ratio);
    r.push("invdist_estimate", Val::Nested(est));

    let g1 = solver::check_green_part1(&ctx, &f, alpha, beta).map_err(solver_err)?;
    let mut est = Report::new();
    est.push("lhs", g1.lhs);
    est.push("rhs", g1.rhs);
    est.push("constant", g1.constant);
    est.push("ratio", g1.ratio);
    r.push("green_part1", Val::Nested(est));

    if !ells.is_empty() {
        if alpha <= 1.0 {
            return Err(CliError::Usage(
                "--ells (part-2 bounds) needs --alpha > 1".into(),
            ));
        }
        let rows = solver::check_green_part2(&ctx, &f, alpha, ells).map_err(solver_err)?;
        let mut part2 = Report::new();
        for (ell, e) in &rows {
            let mut one = Report::new();
            one.push("lhs", e.lhs);
            one.push("rhs", e.rhs);
            one.push("constant", e.constant);
            one.push("ratio", e.ratio);
            part2.push(&format!("ell_{ell}"), Val::Nested(one));
        }
        r.push("green_part2", Val::Nested(part2));
    }

    if mode == "hermite" {
        let fh = f.project_hermite(&ctx, hermite_n).map_err(solver_err)?;
        r.push(
            "hermite_full_norm_alpha",
            solver::full_sobolev_norm(&ctx, &fh, alpha).map_err(solver_err)?,
        );
        if let RepFunction::Hermite { coeffs } = &fh {
            let head: Vec<f64> = coeffs.iter().take(8).map(|c| c.norm()).collect();
            r.push_floats("hermite_coeff_abs_head", &head);
        }
    }

    let mut csv = Csv::new(&["t", "re_f", "im_f", "re_u", "im_u"], precision);
    if let RepFunction::Grid { values, .. } = &f {
        for (i, &t) in spec.nodes().iter().enumerate() {
            csv.row(&[
                Val::Float(t),
                Val::Float(values[0][i].re),
                Val::Float(values[0][i].im),
                Val::Float(u.values[0][i].re),
                Val::Float(u.values[0][i].im),
            ]);
        }
    }
    Ok(Outputs {
        report: r,
        csv: Some(("solve.csv".into(), csv.finish())),
    })
}

// ---------------------------------------------------------------------
// diophantine
// ---------------------------------------------------------------------

pub fn diophantine_cmd(
    omega_s: &str,
    tau: f64,
    m_max: u64,
    csv_shells: u64,
    precision: usize,
) -> Result<Outputs, CliError> {
    let parts: Vec<&str> = omega_s.split(',').map(str::trim).collect();
    if parts.len() < 2 {
        return Err(CliError::Usage(
            "--omega needs at least two comma-separated entries".into(),
        ));
    }
    // All-rational input takes the exact path.
    let rationals: Option<Vec<Rat>> = parts.iter().map(|p| parse_rat(p).ok()).collect();
    let freqs = match rationals {
        Some(rs) => Frequencies::Exact(rs),
        None => {
            let floats: Result<Vec<f64>, _> =
                parts.iter().map(|p| p.parse::<f64>()).collect();
            Frequencies::from_f64(
                &floats.map_err(|_| CliError::Usage("--omega: invalid entry".into()))?,
            )
        }
    };

    let mut r = Report::new();
    r.push_floats("omega", &freqs.to_f64_vec());
    r.push("tau", tau);
    r.push("m_max", m_max);
    match diophantine::certify(&freqs, tau, m_max, csv_shells) {
        Ok(report) => {
            r.push("irrational_in_range", report.irrational_flag);
            r.push("k_best", report.k_best);
            r.push_ints("witness", &report.witness);
            r.push("k_liminf", report.k_liminf);
            r.push_ints("liminf_witness", &report.liminf_witness);
            if let Some(cf) = report.cf_k_liminf {
                r.push("cf_k_liminf", cf);
                let convs: Vec<String> = report
                    .cf_convergents
                    .iter()
                    .map(|c| format!("{}/{}", c.p, c.q))
                    .collect();
                r.push_strs("cf_convergents", &convs);
            }
            let collapses: Vec<Val> = report
                .collapse_shells
                .iter()
                .map(|&(s, old, new)| {
                    Val::Str(format!(
                        "shell {s}: {} -> {}",
                        crate::fmt::fmt_float(old, 6),
                        crate::fmt::fmt_float(new, 6)
                    ))
                })
                .collect();
            r.push("collapse_shells", Val::List(collapses));
            let mut csv = Csv::new(&["shell", "shell_min", "record"], precision);
            for row in &report.shells {
                csv.row(&[
                    Val::UInt(row.shell),
                    Val::Float(row.shell_min),
                    Val::Float(row.record),
                ]);
            }
            Ok(Outputs {
                report: r,
                csv: Some(("diophantine.csv".into(), csv.finish())),
            })
        }
        Err(diophantine::DiophantineError::RationalRelation { witness }) => {
            r.push("irrational_in_range", false);
            r.push_ints("rational_relation_witness", &witness);
            r.push("k_best", 0.0);
            Ok(Outputs {
                report: r,
                csv: None,
            })
        }
        Err(e) => Err(CliError::Usage(e.to_string())),
    }
}

// ---------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------

fn parse_observable(s: &str) -> Result<Observable, CliError> {
    if s == "const" {
        return Ok(Observable::Constant);
    }
    if let Some(rest) = s.strip_prefix("char:") {
        let m: Result<Vec<i64>, _> = rest.split(',').map(|p| p.trim().parse()).collect();
        let m = m.map_err(|_| CliError::Usage(format!("bad character spec `{s}`")))?;
        return Observable::character(m).map_err(|e| CliError::Usage(e.to_string()));
    }
    if let Some(rest) = s.strip_prefix("cob:") {
        // c@m1,m2;c@m1,m2;...
        let mut terms = Vec::new();
        for piece in rest.split(';') {
            let (c, mvec) = piece
                .split_once('@')
                .ok_or_else(|| CliError::Usage(format!("bad coboundary term `{piece}`")))?;
            let coeff: f64 = c
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad coefficient `{c}`")))?;
            let m: Result<Vec<i64>, _> = mvec.split(',').map(|p| p.trim().parse()).collect();
            let m = m.map_err(|_| CliError::Usage(format!("bad exponent vector `{mvec}`")))?;
            terms.push((Complex64::new(coeff, 0.0), m));
        }
        return Ok(Observable::Coboundary { terms });
    }
    Err(CliError::Usage(format!(
        "unknown observable `{s}` (use const, char:..., cob:...)"
    )))
}

fn sim_err(e: SimError) -> CliError {
    CliError::Validation(e.to_string())
}

#[allow(clippy::too_many_arguments)]
pub fn simulate(
    path: &str,
    x_s: &str,
    obs_s: &str,
    t_s: &str,
    dt: f64,
    x0_s: Option<&str>,
    precision: usize,
) -> Result<Outputs, CliError> {
    let alg = load_algebra(path)?;
    let generator = parse_f64_vec(x_s, alg.dim(), "--X")?;
    let obs = parse_observable(obs_s)?;
    let t_list: Result<Vec<f64>, _> = t_s.split(',').map(|p| p.trim().parse::<f64>()).collect();
    let t_list = t_list.map_err(|_| CliError::Usage("--T: invalid list".into()))?;
    if dt <= 0.0 {
        return Err(CliError::Usage("--dt must be positive".into()));
    }
    let x0 = match x0_s {
        Some(s) => NilPoint::new(&alg, parse_f64_vec(s, alg.dim(), "--x0")?).map_err(sim_err)?,
        None => NilPoint::identity(&alg),
    };
    let omega = nilflow_core::diophantine::frequency_vector_f64(&alg, &generator);

    let mut r = Report::new();
    r.push("file", path);
    r.push_floats("x", &generator);
    r.push_floats("omega", &omega);
    r.push("observable", obs_s);
    r.push("dt", dt);

    let mut csv = Csv::new(&["T", "re_avg", "im_avg", "bound"], precision);
    match &obs {
        Observable::Character { m } => {
            let rows = equidistribution_report(&alg, &x0, &generator, std::slice::from_ref(m), &t_list, dt, 1e-10)
                .map_err(sim_err)?;
            let mut all_pass = true;
            for row in &rows {
                csv.row(&[
                    Val::Float(row.t),
                    Val::Float(row.measured.re),
                    Val::Float(row.measured.im),
                    Val::Float(row.bound),
                ]);
                all_pass &= row.pass;
            }
            r.push("closed_form_agreement", all_pass);
        }
        other => {
            let sup = other.primitive_sup_bound();
            for &t in &t_list {
                let avg = birkhoff_average(
                    &alg,
                    &x0,
                    &generator,
                    other,
                    t,
                    dt,
                    OrbitQuadrature::ClosedForm,
                )
                .map_err(sim_err)?;
                let bound = match (other, sup) {
                    (Observable::Constant, _) => 1.0,
                    (_, Some(s)) => (2.0 * s / t).min(2.0 * s),
                    _ => f64::NAN,
                };
                csv.row(&[
                    Val::Float(t),
                    Val::Float(avg.re),
                    Val::Float(avg.im),
                    Val::Float(bound),
                ]);
            }
            if let Some(s) = sup {
                r.push("primitive_sup_bound", s);
            }
        }
    }
    Ok(Outputs {
        report: r,
        csv: Some(("simulate.csv".into(), csv.finish())),
    })
}
