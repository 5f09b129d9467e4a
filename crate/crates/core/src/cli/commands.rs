use serde_json::{json, Value};

use super::spec::parse_field_spec;
use super::{
    Cli, CliError, Command, FieldArgs, Outcome, EXIT_INCONCLUSIVE, EXIT_OK, EXIT_VIOLATION,
};
use crate::calculus::EigenContext;
use crate::diagnostics::{check_equivalence_conditions, index_report, IndexReport, Region, Verdict};
use crate::error::Error;
use crate::linalg::{to_rows, SymMatrix};
use crate::oracle::{
    fd_dproj, fd_grad_lambda, fd_hess_lambda, fit_expansion_order, kyfan_bruteforce,
    DerivativeReport, FdConfig,
};
use crate::polyfield::{builtin, PolyMatrixField};
use crate::spectral::{decompose, kyfan_sum, ClusterConfig, SpectralDecomposition, DEFAULT_RELATIVE_GAP};

/// Relative oracle tolerances used by `derive --validate`.
const GRAD_TOL: f64 = 1e-6;
const HESS_TOL: f64 = 1e-4;
const DPROJ_TOL: f64 = 1e-5;
const SECOND_TOL: f64 = 1e-4;

struct Loaded {
    label: String,
    field: PolyMatrixField,
}

fn load_field(args: &FieldArgs) -> Result<Loaded, CliError> {
    match (&args.builtin, &args.spec) {
        (Some(name), None) => builtin::by_name(name)
            .map(|field| Loaded {
                label: format!("builtin:{name}"),
                field,
            })
            .ok_or_else(|| {
                CliError::Input(format!(
                    "unknown builtin {name:?}; available: {}",
                    builtin::NAMES.join(", ")
                ))
            }),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            let field = parse_field_spec(&text)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            Ok(Loaded {
                label: format!("spec:{}", path.display()),
                field,
            })
        }
        _ => Err(CliError::Input("give one of --builtin or --spec".into())),
    }
}

fn cluster(cli: &Cli) -> Result<ClusterConfig, CliError> {
    Ok(ClusterConfig::new(cli.gap_tol.unwrap_or(DEFAULT_RELATIVE_GAP))?)
}

fn refuse(error: Error, witness: &[f64], inputs: &Value) -> CliError {
    CliError::Refused {
        error,
        witness: Some(witness.to_vec()),
        inputs: inputs.clone(),
    }
}

fn index_json(r: &IndexReport) -> Value {
    json!({
        "j_star_lo": r.j_lo,
        "j_star_hi": r.j_hi,
        "d": r.d,
        "s_upto_j": r.s_upto_j,
        "s_total": r.s_total,
        "inv_mult_sum": r.inv_mult_sum,
    })
}

fn decomposition_json(d: &SpectralDecomposition) -> Result<Value, Error> {
    let groups = d
        .groups()
        .iter()
        .map(|g| {
            Ok(json!({
                "value": g.value,
                "multiplicity": g.multiplicity,
                "first": g.first,
                "last": g.last,
                "projection": g.projection.to_rows(),
                "index": index_json(&index_report(d, g.first)?),
            }))
        })
        .collect::<Result<Vec<Value>, Error>>()?;
    Ok(json!({
        "eigenvalues": d.eigenvalues(),
        "s": d.s(),
        "groups": groups,
        "cluster_gap_used": d.cluster_gap_used(),
        "nearest_gap_margin": d.nearest_gap_margin(),
    }))
}

fn report_json(r: &DerivativeReport, tol: f64) -> Value {
    json!({
        "quantity": r.quantity,
        "analytic": r.analytic,
        "oracle": r.oracle,
        "discrepancy": r.discrepancy,
        "relative": r.relative,
        "tolerance": tol,
        "within": r.within(tol),
    })
}

pub(super) fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let cfg = cluster(cli)?;
    match &cli.command {
        Command::Eval { field, point } => eval(field, &point.0, &cfg),
        Command::Derive {
            field,
            point,
            j,
            grad,
            hess,
            dproj,
            second,
            e,
            q,
            a,
            b,
            validate,
            force,
        } => {
            let opts = DeriveOptions {
                grad: *grad || !(*hess || *dproj || *second),
                hess: *hess,
                dproj: *dproj,
                second: *second,
                e: e.as_ref().map(|c| c.0.clone()),
                q: q.as_ref().map(|c| c.0.clone()),
                a: a.as_ref().map(|c| c.0.clone()),
                b: b.as_ref().map(|c| c.0.clone()),
                validate: *validate,
                force: *force,
            };
            derive(field, &point.0, *j, &opts, &cfg)
        }
        Command::Expand {
            field,
            point,
            j,
            e,
            steps,
        } => expand(
            field,
            &point.0,
            *j,
            e.as_ref().map(|c| c.0.as_slice()),
            steps.as_ref().map(|c| c.0.as_slice()),
            &cfg,
        ),
        Command::Scan {
            field,
            region,
            grid,
            j,
        } => scan(field, &region.0, &grid.0, *j, &cfg),
        Command::Kyfan {
            field,
            point,
            matrix,
            k,
            samples,
            seed,
        } => kyfan(
            field,
            point.as_ref().map(|c| c.0.as_slice()),
            matrix.as_ref().map(|c| c.0.as_slice()),
            *k,
            *samples,
            *seed,
            &cfg,
        ),
    }
}

fn eval(args: &FieldArgs, x: &[f64], cfg: &ClusterConfig) -> Result<Outcome, CliError> {
    let loaded = load_field(args)?;
    let value = loaded.field.eval(x)?;
    let decomp = decompose(&value, cfg)?;
    let mut outputs = decomposition_json(&decomp)?;
    outputs["matrix"] = json!(value.to_rows());
    Ok(Outcome {
        inputs: json!({"field": loaded.label, "point": x, "relative_gap": cfg.relative_gap}),
        outputs,
        hypotheses_unverified: false,
        exit: EXIT_OK,
    })
}

struct DeriveOptions {
    grad: bool,
    hess: bool,
    dproj: bool,
    second: bool,
    e: Option<Vec<f64>>,
    q: Option<Vec<f64>>,
    a: Option<Vec<f64>>,
    b: Option<Vec<f64>>,
    validate: bool,
    force: bool,
}

fn derive(
    args: &FieldArgs,
    x: &[f64],
    j: usize,
    opts: &DeriveOptions,
    cfg: &ClusterConfig,
) -> Result<Outcome, CliError> {
    let loaded = load_field(args)?;
    let field = &loaded.field;
    let inputs = json!({
        "field": loaded.label,
        "point": x,
        "j": j,
        "e": opts.e,
        "q": opts.q,
        "a": opts.a,
        "b": opts.b,
        "relative_gap": cfg.relative_gap,
        "validate": opts.validate,
        "force": opts.force,
    });
    if opts.dproj && opts.e.is_none() && opts.q.is_none() {
        return Err(CliError::Input("--dproj needs --e or --q".into()));
    }
    let (a, b) = match (opts.second, &opts.a, &opts.b) {
        (true, Some(a), Some(b)) => (a.as_slice(), b.as_slice()),
        (true, _, _) => return Err(CliError::Input("--second needs --a and --b".into())),
        _ => (&[][..], &[][..]),
    };

    let ctx = EigenContext::new(field, x, j, cfg)?;
    let fd = FdConfig::default();
    let mut outputs = json!({
        "lambda": ctx.lambda(),
        "multiplicity": ctx.multiplicity(),
        "xi": ctx.xi(),
    });
    let mut checks: Vec<(DerivativeReport, f64)> = Vec::new();

    if opts.force {
        let g = ctx.gradient_forms();
        let h = ctx.hessian_forms();
        outputs["gradient_forms"] = json!({
            "eigenvector_form": g.eigenvector_form,
            "trace_form": g.trace_form,
            "discrepancy": g.discrepancy,
        });
        outputs["hessian_forms"] = json!({
            "eigenvector_form": h.eigenvector_form.to_rows(),
            "trace_form": h.trace_form.to_rows(),
            "discrepancy": h.discrepancy,
        });
    }

    if opts.grad {
        let grad = match ctx.grad_lambda() {
            Ok(g) => Some(g),
            Err(e) if opts.force => {
                outputs["grad_error"] = json!(e.to_string());
                None
            }
            Err(e) => return Err(refuse(e, x, &inputs)),
        };
        if let Some(grad) = grad {
            if opts.validate {
                let o = fd_grad_lambda(field, x, j, &fd, cfg).map_err(|e| refuse(e, x, &inputs))?;
                checks.push((DerivativeReport::new("grad", &grad, &o)?, GRAD_TOL));
            }
            outputs["grad"] = json!(grad);
        }
    }

    if opts.hess || opts.second {
        let hess = match ctx.hess_lambda() {
            Ok(h) => Some(h),
            Err(e) if opts.force => {
                outputs["hess_error"] = json!(e.to_string());
                None
            }
            Err(e) => return Err(refuse(e, x, &inputs)),
        };
        if let Some(hess) = hess {
            let fd_hess = if opts.validate {
                Some(fd_hess_lambda(field, x, j, &fd, cfg).map_err(|e| refuse(e, x, &inputs))?)
            } else {
                None
            };
            if opts.hess {
                if let Some(o) = &fd_hess {
                    checks.push((
                        DerivativeReport::new("hess", hess.as_slice(), o.as_slice())?,
                        HESS_TOL,
                    ));
                }
                outputs["hess"] = json!(hess.to_rows());
            }
            if opts.second {
                let value = ctx.second_dir_lambda(a, b)?;
                if let Some(o) = &fd_hess {
                    let av = nalgebra::DVector::from_column_slice(a);
                    let bv = nalgebra::DVector::from_column_slice(b);
                    let fd_value = av.dot(&(o.as_matrix() * bv));
                    checks.push((DerivativeReport::new("second", &[value], &[fd_value])?, SECOND_TOL));
                }
                outputs["second"] = json!(value);
            }
        }
    }

    if opts.dproj {
        if let Some(e) = &opts.e {
            let d = ctx.dir_deriv_proj(e)?;
            if opts.validate {
                let o = fd_dproj(field, x, j, e, &fd, cfg).map_err(|e| refuse(e, x, &inputs))?;
                checks.push((DerivativeReport::new("dproj", d.as_slice(), o.as_slice())?, DPROJ_TOL));
            }
            outputs["dproj"] = json!(d.to_rows());
        }
        if let Some(q) = &opts.q {
            let jac = ctx.jac_deriv_proj(q)?;
            if opts.validate {
                let qv = nalgebra::DVector::from_column_slice(q);
                let mut fd_jac = crate::linalg::Matrix::zeros(field.m(), field.n());
                for i in 0..field.n() {
                    let mut axis = vec![0.0; field.n()];
                    axis[i] = 1.0;
                    let di = fd_dproj(field, x, j, &axis, &fd, cfg).map_err(|e| refuse(e, x, &inputs))?;
                    fd_jac.set_column(i, &(di.as_matrix() * &qv));
                }
                checks.push((
                    DerivativeReport::new("jacproj", jac.as_slice(), fd_jac.as_slice())?,
                    DPROJ_TOL,
                ));
            }
            outputs["jacproj"] = json!(to_rows(&jac));
        }
    }

    let mut exit = EXIT_OK;
    if opts.validate {
        let max = checks.iter().map(|(r, _)| r.relative).fold(0.0, f64::max);
        if checks.iter().any(|(r, tol)| !r.within(*tol)) {
            exit = EXIT_VIOLATION;
        }
        outputs["oracle"] = Value::Array(checks.iter().map(|(r, tol)| report_json(r, *tol)).collect());
        outputs["max_discrepancy"] = json!(max);
    }
    Ok(Outcome {
        inputs,
        outputs,
        hypotheses_unverified: true,
        exit,
    })
}

fn expand(
    args: &FieldArgs,
    x: &[f64],
    j: usize,
    e: Option<&[f64]>,
    steps: Option<&[f64]>,
    cfg: &ClusterConfig,
) -> Result<Outcome, CliError> {
    let loaded = load_field(args)?;
    let field = &loaded.field;
    let inputs = json!({
        "field": loaded.label,
        "point": x,
        "j": j,
        "e": e,
        "steps": steps,
        "relative_gap": cfg.relative_gap,
    });
    let ctx = EigenContext::new(field, x, j, cfg)?;
    let expansion = ctx.taylor2().map_err(|err| refuse(err, x, &inputs))?;
    let mut outputs = json!({
        "expansion": {
            "base": expansion.base,
            "linear": expansion.linear,
            "quadratic": expansion.quadratic.to_rows(),
        }
    });
    match (e, steps) {
        (None, Some(_)) => return Err(CliError::Input("--steps needs a direction --e".into())),
        (None, None) => {}
        (Some(y), None) => {
            let predicted = expansion.predict(y)?;
            let moved: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
            let actual = crate::spectral::eig_sym(&field.eval(&moved)?)?.values[j - 1];
            outputs["displacement"] = json!(y);
            outputs["predicted"] = json!(predicted);
            outputs["actual"] = json!(actual);
            outputs["residual"] = json!((actual - predicted).abs());
        }
        (Some(dir), Some(steps)) => {
            let fit = fit_expansion_order(field, x, j, dir, steps, cfg)?;
            outputs["fit"] = json!({
                "steps": fit.steps,
                "residuals": fit.residuals,
                "noise_floor": fit.noise_floor,
                "fitted_order": fit.fitted_order,
                "exact": fit.exact,
            });
        }
    }
    Ok(Outcome {
        inputs,
        outputs,
        hypotheses_unverified: true,
        exit: EXIT_OK,
    })
}

fn scan(
    args: &FieldArgs,
    bounds: &[f64],
    grid: &[usize],
    j: usize,
    cfg: &ClusterConfig,
) -> Result<Outcome, CliError> {
    let loaded = load_field(args)?;
    let field = &loaded.field;
    let region = Region::from_interleaved(bounds)?;
    let grid = if grid.len() == 1 {
        vec![grid[0]; region.dim()]
    } else {
        grid.to_vec()
    };
    let report = check_equivalence_conditions(field, &region, &grid, j, cfg)?;
    let scan = &report.scan;
    let crossings: Vec<Value> = scan
        .crossings
        .iter()
        .map(|c| {
            json!({
                "from": c.from,
                "to": c.to,
                "bracket": [c.bracket.0, c.bracket.1],
                "group_counts": [c.group_counts.0, c.group_counts.1],
            })
        })
        .collect();
    let exit = match report.verdict {
        Verdict::Supported => EXIT_OK,
        Verdict::Refuted => EXIT_VIOLATION,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    };
    Ok(Outcome {
        inputs: json!({
            "field": loaded.label,
            "box": {"lo": region.lo, "hi": region.hi},
            "grid": grid,
            "j": j,
            "relative_gap": cfg.relative_gap,
        }),
        outputs: json!({
            "sample_points": scan.sample_points,
            "group_counts": scan.group_counts,
            "dims_of_j": scan.dims_of_j,
            "gaps": scan.gaps,
            "crossings": crossings,
            "constant_dim": scan.constant_dim,
            "constant_s": scan.constant_s,
            "min_gap": scan.min_gap,
            "cluster_gap_used": scan.cluster_gap_used,
            "max_projection_jump": report.max_projection_jump,
            "flagged_edges": report.flagged_edges,
            "verdict": report.verdict.as_str(),
            "witness": report.witness,
            "reason": report.reason,
        }),
        hypotheses_unverified: false,
        exit,
    })
}

fn kyfan(
    args: &FieldArgs,
    point: Option<&[f64]>,
    matrix: Option<&[f64]>,
    k: usize,
    samples: Option<usize>,
    seed: u64,
    cfg: &ClusterConfig,
) -> Result<Outcome, CliError> {
    let has_field = args.builtin.is_some() || args.spec.is_some();
    let (label, x) = match (matrix, has_field, point) {
        (Some(values), false, None) => {
            let m = (values.len() as f64).sqrt().round() as usize;
            if m * m != values.len() || m == 0 {
                return Err(CliError::Input(format!(
                    "--matrix needs m*m values, got {}",
                    values.len()
                )));
            }
            ("matrix".to_string(), SymMatrix::from_row_slice(m, values)?)
        }
        (None, true, Some(x)) => {
            let loaded = load_field(args)?;
            (loaded.label, loaded.field.eval(x)?)
        }
        (None, true, None) => return Err(CliError::Input("a field needs --point".into())),
        _ => {
            return Err(CliError::Input(
                "give either --matrix or a field with --point".into(),
            ))
        }
    };
    let decomp = decompose(&x, cfg)?;
    let sum = kyfan_sum(&decomp, k)?;
    let mut outputs = json!({
        "eigenvalues": decomp.eigenvalues(),
        "sum": sum.value,
        "minimizer": sum.minimizer.as_ref().map(|r| r.to_rows()),
        "singleton": sum.minimizer.is_some(),
    });
    if let Some(n) = samples {
        let best = kyfan_bruteforce(&x, k, n, seed)?;
        outputs["bruteforce"] = json!({
            "samples": n,
            "seed": seed,
            "value": best,
            "excess": best - sum.value,
        });
    }
    Ok(Outcome {
        inputs: json!({
            "source": label,
            "point": point,
            "matrix": x.to_rows(),
            "k": k,
            "relative_gap": cfg.relative_gap,
        }),
        outputs,
        hypotheses_unverified: false,
        exit: EXIT_OK,
    })
}
