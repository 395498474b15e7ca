use std::str::FromStr;

use serde_json::{json, Value};

use rmtlab_core::delta1d::{
    composition_roots, convergence_order, convolution_residual, derivative_pairing, derivative_target,
    dirichlet_delta, pv_sinc, sampling_residual, scaling_check, PolynomialG, TestFunction, EPS_GRID,
};
use rmtlab_core::ensembles::{
    logdensity_eigs, logdensity_wishart_matrix, sample_batch, write_batch_csv, CsvLayout, EigenKind,
    EnsembleSpec, WishartTerm,
};
use rmtlab_core::jacobians::{
    delta_scale_complex_vector, delta_scale_congruence, delta_scale_rect, delta_scale_vector, fourier_constant,
    Field, Scale,
};
use rmtlab_core::linalg::{eig_sorted, ComplexMatrix, CoordinateKind};
use rmtlab_core::mc::MCEstimate;
use rmtlab_core::rng::{tags, RngStream};
use rmtlab_core::specialfn::{
    hciz_closed_form, hciz_monte_carlo, kummer_residual, matrix_1f1, sum_wishart_symmetry_residual, HCIZInput,
    PairedEstimate,
};
use rmtlab_core::statcheck::{marginal_from_joint_m2, verify_suite, Suite};

use crate::args::{
    Command, DeltaArgs, DeltaOp, DensityArgs, DensityEnsemble, EnsembleName, F1Args, FieldArg, Format, HcizArgs,
    Identity, JacobianArgs, JacobianKind, LayoutArg, MatrixText, SampleArgs, VerifyArgs, DEFAULT_SEED,
};
use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Rendered output and whether every verification in it passed.
pub struct Outcome {
    pub text: String,
    pub pass: bool,
}

enum Body {
    Json(Value),
    Csv(String),
}

struct Report {
    body: Body,
    pass: bool,
}

impl Report {
    fn json(result: Value, pass: bool) -> Self {
        Self { body: Body::Json(result), pass }
    }
}

fn require<T: Clone>(key: &str, v: &Option<T>) -> Result<T, CliError> {
    v.clone().ok_or_else(|| CliError::usage(format!("missing value for '{key}'")))
}

fn as_usize(v: u64) -> usize {
    usize::try_from(v).unwrap_or(usize::MAX)
}

/// Square matrix from a literal or a spectrum.
fn square(key: &str, text: &MatrixText) -> Result<ComplexMatrix, CliError> {
    let m = match text.as_list() {
        Some(diag) => ComplexMatrix::from_diagonal(&diag),
        None => ComplexMatrix::from_str(&text.0).map_err(|e| CliError::key(key, e))?,
    };
    if !m.is_square() {
        return Err(CliError::usage(format!("invalid value for '{key}': expected a square matrix")));
    }
    Ok(m)
}

fn list(key: &str, text: &MatrixText) -> Result<Vec<f64>, CliError> {
    text.as_list()
        .ok_or_else(|| CliError::usage(format!("invalid value for '{key}': expected a comma-separated list of numbers")))
}

fn check_dim(key: &str, expected: Option<u64>, actual: usize) -> Result<(), CliError> {
    match expected {
        Some(m) if as_usize(m) != actual => Err(CliError::usage(format!(
            "invalid value for '{key}': {m} does not match the {actual}x{actual} matrix"
        ))),
        _ => Ok(()),
    }
}

/// JSON number, with non-finite values as `null`.
fn num(x: f64) -> Value {
    json!(x)
}

fn estimate(e: &MCEstimate) -> Value {
    json!({ "value": e.value, "stderr": e.stderr, "n_samples": e.n_samples })
}

fn paired(p: &PairedEstimate, sigmas: f64) -> (Value, bool) {
    let z = p.z_score();
    let pass = z <= sigmas;
    let v = json!({
        "lhs": estimate(&p.lhs),
        "rhs": estimate(&p.rhs),
        "relative_residual": num(p.relative_residual()),
        "combined_stderr": num(p.combined_stderr()),
        "z_score": num(z),
        "acceptance_rate": p.acceptance_rate,
        "sigmas": sigmas,
        "pass": pass,
    });
    (v, pass)
}

fn default_samples(cmd: &Command) -> Option<u64> {
    match cmd {
        Command::Sample(_) => Some(1000),
        Command::Hciz(_) | Command::F1(_) => Some(100_000),
        Command::Verify(v) if v.suite == "wishart-m1" => Some(100_000),
        Command::Verify(_) => Some(10_000),
        _ => None,
    }
}

/// Fills defaults, dispatches and renders.
pub fn run(mut cmd: Command, env_seed: Option<u64>) -> Result<Outcome, CliError> {
    let seed = cmd.common().seed.or(env_seed).unwrap_or(DEFAULT_SEED);
    let samples = cmd.common().samples.or(default_samples(&cmd));
    {
        let c = cmd.common_mut();
        c.seed = Some(seed);
        c.samples = samples;
    }
    if let Some(t) = cmd.common().threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(as_usize(t)).build_global();
    }
    let n = samples.map(as_usize).unwrap_or(0);
    let report = match &cmd {
        Command::Sample(a) => sample(a, n, seed)?,
        Command::Density(a) => density(a)?,
        Command::DeltaCheck(a) => delta_check(a)?,
        Command::JacobianCheck(a) => jacobian_check(a, seed)?,
        Command::Hciz(a) => hciz(a, n, seed)?,
        Command::F1(a) => f1(a, n, seed)?,
        Command::Verify(a) => verify(a, n, seed)?,
    };
    let config = serde_json::to_value(&cmd).expect("config serializes");
    let requested = cmd.common().format;
    let text = match (report.body, requested) {
        (Body::Csv(body), None | Some(Format::Csv)) => {
            format!("# rmtlab {VERSION} seed={seed} config={config}\n{body}")
        }
        (Body::Csv(_), Some(Format::Json)) => unreachable!("csv bodies are built only when csv is allowed"),
        (Body::Json(result), None | Some(Format::Json)) => {
            let envelope = json!({ "version": VERSION, "seed": seed, "config": config, "result": result });
            let mut s = serde_json::to_string_pretty(&envelope).expect("json renders");
            s.push('\n');
            s
        }
        (Body::Json(_), Some(Format::Csv)) => {
            return Err(CliError::usage("invalid value for 'format': this subcommand writes json only"));
        }
    };
    Ok(Outcome { text, pass: report.pass })
}

fn sample(a: &SampleArgs, n: usize, seed: u64) -> Result<Report, CliError> {
    let m = as_usize(a.m);
    let sigma = a.sigma.as_ref().map(|s| square("sigma", s)).transpose()?;
    let need_n = || require("n", &a.n).map(as_usize);
    let spec = match a.ensemble {
        EnsembleName::Ginibre => EnsembleSpec::Ginibre { m, n: need_n()? },
        EnsembleName::Wishart => EnsembleSpec::Wishart { m, n: need_n()?, sigma },
        EnsembleName::Induced => EnsembleSpec::Induced { m, n: need_n()? },
        EnsembleName::HaarUnitary => EnsembleSpec::HaarUnitary { m },
        EnsembleName::SumWishart => {
            let terms = list("terms", &require("terms", &a.terms)?)?;
            let terms = terms
                .iter()
                .map(|&t| {
                    if t >= 1.0 && t.fract() == 0.0 {
                        Ok(WishartTerm { n: t as usize, sigma: sigma.clone() })
                    } else {
                        Err(CliError::usage(format!("invalid value for 'terms': {t} is not a positive integer")))
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            EnsembleSpec::SumWishart { m, terms }
        }
    };
    spec.sampler().map_err(|e| CliError::key("ensemble", e))?;
    let layout = match a.layout {
        Some(LayoutArg::Eigenvalues) => CsvLayout::Eigenvalues,
        Some(LayoutArg::Matrix) => CsvLayout::Matrix,
        None if spec.is_hermitian() => CsvLayout::Eigenvalues,
        None => CsvLayout::Matrix,
    };
    if layout == CsvLayout::Eigenvalues && !spec.is_hermitian() {
        return Err(CliError::usage("invalid value for 'layout': eigenvalues need a Hermitian ensemble"));
    }
    let draws = sample_batch(&spec, n, seed)?;
    if a.common.format == Some(Format::Json) {
        let rows = draws
            .iter()
            .map(|d| match layout {
                CsvLayout::Eigenvalues => eig_sorted(d).map(|v| json!(v)),
                CsvLayout::Matrix => Ok(json!(d.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let key = if layout == CsvLayout::Eigenvalues { "eigenvalues" } else { "matrices" };
        return Ok(Report::json(json!({ "spec": spec, "draws": n, key: rows }), true));
    }
    let mut out = Vec::new();
    write_batch_csv(&mut out, &spec, seed, &draws, layout)?;
    Ok(Report { body: Body::Csv(String::from_utf8(out).expect("csv is utf-8")), pass: true })
}

fn density(a: &DensityArgs) -> Result<Report, CliError> {
    let n = as_usize(a.n);
    let kind = match a.ensemble {
        DensityEnsemble::Wishart => EigenKind::Wishart { n },
        DensityEnsemble::Induced => EigenKind::Induced { n },
    };
    if let Some(text) = &a.matrix {
        if a.ensemble != DensityEnsemble::Wishart {
            return Err(CliError::usage("invalid value for 'matrix': matrix densities exist for wishart only"));
        }
        let w = square("matrix", text)?;
        check_dim("m", a.m, w.rows())?;
        let sigma = match &a.sigma {
            Some(s) => square("sigma", s)?,
            None => ComplexMatrix::identity(w.rows()),
        };
        let ld = logdensity_wishart_matrix(&w, n, &sigma).map_err(|e| CliError::key("matrix", e))?;
        return Ok(Report::json(json!({ "log_density": num(ld) }), true));
    }
    if let Some(text) = &a.eigs {
        let eigs = list("eigs", text)?;
        check_dim("m", a.m, eigs.len())?;
        let ld = logdensity_eigs(&eigs, kind, eigs.len()).map_err(|e| CliError::key("eigs", e))?;
        return Ok(Report::json(json!({ "log_density": num(ld), "degenerate": ld == f64::NEG_INFINITY }), true));
    }
    if a.m.unwrap_or(2) != 2 {
        return Err(CliError::usage("invalid value for 'm': the eigenvalue table exists for m = 2 only"));
    }
    let marginal = marginal_from_joint_m2(kind).map_err(|e| CliError::key("n", e))?;
    let points = as_usize(a.points.unwrap_or(201));
    let (lo, hi) = marginal.support();
    let grid: Vec<f64> = (0..points).map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64).collect();
    if a.common.format == Some(Format::Json) {
        let rows: Vec<Value> = grid.iter().map(|&t| json!([t, marginal.density(t), marginal.cdf(t)])).collect();
        return Ok(Report::json(json!({ "columns": ["t", "density", "cdf"], "rows": rows }), true));
    }
    let mut csv = String::from("t,density,cdf\n");
    for t in grid {
        csv.push_str(&format!("{t:.16e},{:.16e},{:.16e}\n", marginal.density(t), marginal.cdf(t)));
    }
    Ok(Report { body: Body::Csv(csv), pass: true })
}

fn delta_check(a: &DeltaArgs) -> Result<Report, CliError> {
    let f = TestFunction::from_str(&a.f).map_err(|e| CliError::key("f", e))?;
    let eps_grid: Vec<f64> = match a.eps {
        Some(e) => vec![e],
        None => EPS_GRID.to_vec(),
    };
    let need = |key: &str, v: Option<f64>| require(key, &v);
    let key_err = |key: &'static str| move |e| CliError::key(key, e);
    // (eps, lhs, rhs) per row; eps is absent for the ε-free limits.
    let mut rows: Vec<(Option<f64>, f64, f64)> = Vec::new();
    match a.op {
        DeltaOp::Sampling => {
            let x = need("a", a.a)?;
            for &e in &eps_grid {
                let r = sampling_residual(&f, x, e).map_err(key_err("eps"))?;
                rows.push((Some(e), f.eval(x) + r, f.eval(x)));
            }
        }
        DeltaOp::Derivative => {
            let k = a.order.unwrap_or(1);
            let rhs = derivative_target(&f, k).map_err(key_err("order"))?;
            for &e in &eps_grid {
                rows.push((Some(e), derivative_pairing(&f, k, e).map_err(key_err("eps"))?, rhs));
            }
        }
        DeltaOp::Composition => {
            let g = PolynomialG::from_str(&require("g", &a.g)?).map_err(key_err("g"))?;
            for &e in &eps_grid {
                let (l, r) = composition_roots(&g, &f, e).map_err(key_err("g"))?;
                rows.push((Some(e), l, r));
            }
        }
        DeltaOp::Scaling => {
            let s = need("a", a.a)?;
            for &e in &eps_grid {
                let (l, r) = scaling_check(s, &f, e).map_err(key_err("a"))?;
                rows.push((Some(e), l, r));
            }
        }
        DeltaOp::Convolution => {
            let (x, y) = (need("a", a.a)?, need("b", a.b)?);
            for &e in &eps_grid {
                let r = convolution_residual(&f, x, y, e).map_err(key_err("eps"))?;
                rows.push((Some(e), f.eval(x + y) + r, f.eval(x + y)));
            }
        }
        DeltaOp::Pv => {
            let w = need("omega", a.omega)?;
            rows.push((None, pv_sinc(w).map_err(key_err("omega"))?, std::f64::consts::PI * w.signum()));
        }
        DeltaOp::Dirichlet => {
            let t = a.t.unwrap_or(20.0);
            rows.push((None, dirichlet_delta(&f, t).map_err(key_err("f"))?, f.eval(0.0)));
        }
    }
    let (_, lhs, rhs) = *rows.last().expect("at least one row");
    let tol = a.tol.unwrap_or(1e-3);
    let pass = (lhs - rhs).abs() <= tol * rhs.abs().max(1.0);
    let residuals: Vec<f64> = rows.iter().map(|(_, l, r)| l - r).collect();
    let widths: Vec<f64> = rows.iter().filter_map(|r| r.0).collect();
    let order = (widths.len() >= 2 && residuals.iter().all(|r| r.abs() > 1e-13))
        .then(|| convergence_order(&widths, &residuals));
    let table: Vec<Value> = rows
        .iter()
        .map(|&(e, l, r)| json!({ "eps": e, "lhs": l, "rhs": r, "residual": l - r }))
        .collect();
    Ok(Report::json(
        json!({ "op": a.op, "lhs": lhs, "rhs": rhs, "rows": table, "order": order, "tol": tol, "pass": pass }),
        pass,
    ))
}

fn coordinate_kind(kind: JacobianKind) -> Option<CoordinateKind> {
    match kind {
        JacobianKind::Symmetric => Some(CoordinateKind::Symmetric),
        JacobianKind::Hermitian => Some(CoordinateKind::Hermitian),
        _ => None,
    }
}

fn random_matrix(n: usize, complex: bool, rng: &mut RngStream) -> ComplexMatrix {
    let entries = (0..n * n)
        .map(|_| {
            if complex {
                rng.complex_normal()
            } else {
                rmtlab_core::linalg::C64::new(rng.standard_normal(), 0.0)
            }
        })
        .collect();
    ComplexMatrix::new(n, n, entries).expect("n*n entries")
}

fn scale_of(kind: JacobianKind, a: &ComplexMatrix, b: Option<&ComplexMatrix>, field: Field) -> rmtlab_core::Result<Scale> {
    match kind {
        JacobianKind::Vector => delta_scale_vector(a),
        JacobianKind::ComplexVector => delta_scale_complex_vector(a),
        JacobianKind::Rect => delta_scale_rect(a, b.expect("rect has B"), field),
        JacobianKind::Symmetric => delta_scale_congruence(a, CoordinateKind::Symmetric),
        JacobianKind::Hermitian => delta_scale_congruence(a, CoordinateKind::Hermitian),
    }
}

fn jacobian_check(a: &JacobianArgs, seed: u64) -> Result<Report, CliError> {
    if a.fourier {
        let kind = coordinate_kind(a.kind)
            .ok_or_else(|| CliError::usage("invalid value for 'kind': fourier needs symmetric or hermitian"))?;
        let m = as_usize(require("m", &a.m)?);
        let c = fourier_constant(m, kind).map_err(|e| CliError::key("m", e))?;
        let tol = a.tol.unwrap_or(1e-3);
        let pass = c.relative_error() <= tol;
        let mut v = serde_json::to_value(c).expect("serializes");
        v["relative_error"] = num(c.relative_error());
        v["tol"] = json!(tol);
        v["pass"] = json!(pass);
        return Ok(Report::json(v, pass));
    }
    if let Some(text) = &a.matrix {
        let m = square("matrix", text)?;
        check_dim("m", a.m, m.rows())?;
        let b = match a.kind {
            JacobianKind::Rect => {
                let b = square("b-matrix", &require("b-matrix", &a.b_matrix)?)?;
                check_dim("n", a.n, b.rows())?;
                Some(b)
            }
            _ => None,
        };
        let field = match a.field {
            Some(FieldArg::Real) => Field::Real,
            Some(FieldArg::Complex) => Field::Complex,
            None if m.is_real() && b.as_ref().is_none_or(|b| b.is_real()) => Field::Real,
            None => Field::Complex,
        };
        let s = scale_of(a.kind, &m, b.as_ref(), field).map_err(|e| CliError::key("matrix", e))?;
        let tol = a.tol.unwrap_or(1e-10);
        let pass = s.relative_discrepancy() <= tol;
        let v = json!({
            "kind": a.kind,
            "value": s.value,
            "expected": s.cross_check,
            "relative_discrepancy": s.relative_discrepancy(),
            "tol": tol,
            "pass": pass,
        });
        return Ok(Report::json(v, pass));
    }
    let m = as_usize(require("m", &a.m)?);
    let n = match a.kind {
        JacobianKind::Rect => as_usize(require("n", &a.n)?),
        _ => 0,
    };
    let field = match (a.kind, a.field) {
        (JacobianKind::ComplexVector | JacobianKind::Hermitian, _) => Field::Complex,
        (_, Some(FieldArg::Complex)) => Field::Complex,
        _ => Field::Real,
    };
    if field == Field::Complex && matches!(a.kind, JacobianKind::Vector | JacobianKind::Symmetric) {
        return Err(CliError::usage("invalid value for 'field': this kind needs real matrices"));
    }
    let trials = as_usize(a.random.unwrap_or(100));
    let complex = field == Field::Complex;
    let mut rng = RngStream::new(seed, u64::from(tags::VERIFY));
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let am = random_matrix(m, complex, &mut rng);
        let bm = (a.kind == JacobianKind::Rect).then(|| random_matrix(n, complex, &mut rng));
        let s = scale_of(a.kind, &am, bm.as_ref(), field)?;
        worst = worst.max(s.relative_discrepancy());
    }
    let tol = a.tol.unwrap_or(1e-9);
    let pass = worst <= tol;
    let v = json!({
        "kind": a.kind,
        "field": if complex { "complex" } else { "real" },
        "trials": trials,
        "max_relative_discrepancy": worst,
        "tol": tol,
        "pass": pass,
    });
    Ok(Report::json(v, pass))
}

fn hciz(a: &HcizArgs, n: usize, seed: u64) -> Result<Report, CliError> {
    let am = square("a", &a.a)?;
    let bm = square("b", &a.b)?;
    let input = HCIZInput::from_matrices(&am, &bm).map_err(|e| CliError::key("a", e))?;
    let exact = hciz_closed_form(&input)?;
    let mc = hciz_monte_carlo(&am, &bm, n, seed).map_err(|e| CliError::key("samples", e))?;
    let sigmas = a.sigmas.unwrap_or(3.0);
    let z = mc.z_score(exact);
    let pass = if mc.stderr > 0.0 { z <= sigmas } else { (mc.value - exact).abs() <= 1e-12 * exact.abs().max(1.0) };
    let v = json!({
        "closed_form": exact,
        "monte_carlo": estimate(&mc),
        "z_score": num(z),
        "sigmas": sigmas,
        "pass": pass,
    });
    Ok(Report::json(v, pass))
}

fn f1(a: &F1Args, n: usize, seed: u64) -> Result<Report, CliError> {
    let sigmas = a.sigmas.unwrap_or(3.0);
    if a.identity == Some(Identity::SumWishart) {
        let w = square("w", &require("w", &a.w)?)?;
        let sa = square("sigma-a", &require("sigma-a", &a.sigma_a)?)?;
        let sb = square("sigma-b", &require("sigma-b", &a.sigma_b)?)?;
        let (na, nb) = (as_usize(require("n-a", &a.n_a)?), as_usize(require("n-b", &a.n_b)?));
        let p = sum_wishart_symmetry_residual(&w, &sa, &sb, na, nb, n, seed).map_err(|e| match e {
            e @ rmtlab_core::Error::RejectionStarved { .. } => CliError::Core(e),
            e => CliError::key("w", e),
        })?;
        let (v, pass) = paired(&p, sigmas);
        return Ok(Report::json(json!({ "identity": "sum-wishart", "check": v }), pass));
    }
    let (pa, pc) = (require("a", &a.a)?, require("c", &a.c)?);
    let lambda = square("lambda", &require("lambda", &a.lambda)?)?;
    let starved_or = |key: &'static str| {
        move |e| match e {
            e @ rmtlab_core::Error::RejectionStarved { .. } => CliError::Core(e),
            e => CliError::key(key, e),
        }
    };
    match a.identity {
        Some(Identity::Kummer) => {
            let p = kummer_residual(pa, pc, &lambda, n, seed).map_err(starved_or("lambda"))?;
            let (v, pass) = paired(&p, sigmas);
            Ok(Report::json(json!({ "identity": "kummer", "check": v }), pass))
        }
        _ => {
            let e = matrix_1f1(pa, pc, &lambda, n, seed).map_err(starved_or("lambda"))?;
            Ok(Report::json(json!({ "estimate": estimate(&e) }), true))
        }
    }
}

fn verify(a: &VerifyArgs, n: usize, seed: u64) -> Result<Report, CliError> {
    let suite = Suite::from_name(&a.suite, a.n.map(as_usize)).map_err(|e| CliError::key("suite", e))?;
    let verdict = verify_suite(suite, n, seed).map_err(|e| CliError::key("samples", e))?;
    let pass = verdict.pass;
    Ok(Report::json(serde_json::to_value(verdict).expect("verdict serializes"), pass))
}
