//! Command-line surface for the aromatic-bicomplex kernel.
//!
//! Every subcommand is deterministic: bases, pivots, and term orders are
//! canonical, so output is stable across runs.  Exit codes: `0` for success,
//! `1` for a negative mathematical answer (a target outside an image, a field
//! that is not solenoidal, a failed zero assertion, a failed regression), and
//! `2` for usage, parse, or capacity errors.  Expression flags accept `-` to
//! read from standard input; the node-count capacity honours the
//! `AROMATIC_MAX_ORDER` environment variable.

mod regressions;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::OnceLock;

use aromatic::elemdiff::{elementary_differential, Differential, Polynomial};
use aromatic::envelope::{exact_flow, exp_lie, Series};
use aromatic::forest::{enumerate_forests, Grade};
use aromatic::linalg::{exactness_report, solve_horizontal, BasisSlice, GradedMatrix, OperatorTag};
use aromatic::noether::{
    classify_symmetry, conservation_law, is_solenoidal, solenoidal_basis, vp_modified_field,
    SymmetryStatus,
};
use aromatic::textio::{
    parse_expr, parse_form, parse_vector_field, print_forest, print_form, print_graded,
};
use aromatic::{bracket as field_bracket, d_total, lie as lie_derivative, Error, Form, GradedForm};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "aromatic",
    version,
    about = "Exact computer algebra for the aromatic bicomplex",
    after_help = "Expression flags accept `-` to read the expression from standard input.\n\
                  The environment variable AROMATIC_MAX_ORDER bounds the node count all\n\
                  commands will touch (default 7); raising it trades time for reach."
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Op {
    /// Horizontal differential.
    Dh,
    /// Vertical differential.
    Dv,
    /// Signed total differential (both bigraded parts).
    D,
    /// Wedge normalization only.
    Wedge,
    /// Interior Euler operator.
    #[value(name = "I")]
    InteriorEuler,
    /// Variational derivative.
    #[value(name = "deltaV")]
    DeltaV,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KernelOp {
    Dh,
    Dv,
}

#[derive(Subcommand)]
enum Command {
    /// List all forests of a grade, or only the wedge-basis representatives.
    Enumerate {
        #[arg(long)]
        roots: usize,
        #[arg(long)]
        covertices: usize,
        #[arg(long)]
        order: usize,
        /// Keep only the representatives that survive wedge normalization.
        #[arg(long)]
        wedge_basis: bool,
    },
    /// Apply one operator to an expression.
    Apply {
        #[arg(long, value_enum)]
        op: Op,
        #[arg(long)]
        expr: String,
    },
    /// Lie derivative of an expression along a vector field.
    Lie {
        #[arg(long)]
        tau: String,
        #[arg(long)]
        gamma: String,
    },
    /// Antisymmetrized grafting bracket of two vector fields.
    Bracket {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Lie-group action of the exponential of a field, truncated by order.
    ///
    /// `--gamma exact-flow` acts on the exact-flow series instead of a fixed
    /// expression and also reports the horizontal differential of each
    /// homogeneous component of the result.
    ExpLie {
        #[arg(long)]
        tau: String,
        #[arg(long)]
        gamma: String,
        #[arg(long)]
        order: usize,
    },
    /// Solve d_H x = target; reports a witness or exits 1.
    SolveDh {
        #[arg(long)]
        target: String,
    },
    /// Basis of the kernel of a differential on one graded slice.
    Kernel {
        /// Grade of the domain as `n,p` (roots, covertices).
        #[arg(long)]
        grade: String,
        #[arg(long)]
        order: usize,
        #[arg(long, value_enum)]
        op: KernelOp,
    },
    /// Rank bookkeeping for the augmented bicomplex over a grade window.
    Exactness {
        #[arg(long)]
        max_order: usize,
        #[arg(long, default_value_t = 3)]
        max_roots: usize,
        #[arg(long, default_value_t = 2)]
        max_covertices: usize,
    },
    /// Basis of the solenoidal (divergence-free) fields of one order.
    Solenoidal {
        #[arg(long)]
        order: usize,
    },
    /// Symmetry analysis of a Lagrangian along a field, with the
    /// conservation-law witness when one exists.
    Noether {
        #[arg(long)]
        tau: String,
        #[arg(long)]
        lagrangian: String,
    },
    /// Classify a field as symmetry, divergence symmetry, or neither.
    Classify {
        #[arg(long)]
        tau: String,
        #[arg(long)]
        gamma: String,
    },
    /// Elementary differential of an expression for a polynomial field.
    Elemdiff {
        #[arg(long)]
        expr: String,
        /// File holding the field, e.g. `d=2; f1 = x2^3; f2 = -x1;` (`-` for stdin).
        #[arg(long)]
        field: PathBuf,
        /// Exit 1 unless the resulting polynomial vanishes identically.
        #[arg(long)]
        assert_zero: bool,
    },
    /// Exact-flow series up to the given order.
    ExactFlow {
        #[arg(long)]
        order: usize,
    },
    /// Run the built-in table of worked examples from the literature.
    PaperExamples,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

/// Expression text behind a flag: `-` drains standard input (once; later
/// requests see the same text).
fn expr_text(raw: &str) -> &str {
    if raw != "-" {
        return raw;
    }
    static STDIN: OnceLock<String> = OnceLock::new();
    STDIN.get_or_init(|| {
        let mut buffer = String::new();
        std::io::stdin().read_to_string(&mut buffer).expect("standard input is readable");
        buffer
    })
}

fn form_json(form: &Form) -> Value {
    let grade = form.grade();
    json!({
        "text": print_form(form),
        "roots": grade.roots,
        "covertices": grade.covertices,
        "order": grade.order,
    })
}

fn graded_json(graded: &GradedForm) -> Value {
    Value::Array(graded.components().map(form_json).collect())
}

fn series_json(series: &Series) -> Value {
    let orders: Vec<Value> = series
        .orders()
        .map(|k| json!({"order": k, "form": form_json(&series.component(k))}))
        .collect();
    json!({"truncation": series.truncation(), "orders": orders})
}

fn print_series(series: &Series) {
    for order in series.orders() {
        println!("order {order}: {}", print_form(&series.component(order)));
    }
}

fn emit(format: Format, text: &str, json: Value) {
    match format {
        Format::Text => {
            if !text.is_empty() {
                println!("{text}");
            }
        }
        Format::Json => println!("{json}"),
    }
}

fn run(cli: &Cli) -> Result<u8, Error> {
    let format = cli.format;
    match &cli.command {
        Command::Enumerate { roots, covertices, order, wedge_basis } => {
            let grade = Grade::new(*roots, *covertices, *order);
            let forests = if *wedge_basis {
                BasisSlice::wedge_basis(grade)?.elements().to_vec()
            } else {
                enumerate_forests(grade)?
            };
            let lines: Vec<String> = forests.iter().map(print_forest).collect();
            emit(
                format,
                &lines.join("\n"),
                json!({
                    "command": "enumerate",
                    "roots": roots,
                    "covertices": covertices,
                    "order": order,
                    "wedge_basis": wedge_basis,
                    "count": lines.len(),
                    "forests": lines,
                }),
            );
            Ok(0)
        }
        Command::Apply { op, expr } => {
            let input = parse_expr(expr_text(expr))?;
            let result = match op {
                Op::Dh => input.map(aromatic::d_h)?,
                Op::Dv => input.map(aromatic::d_v)?,
                Op::InteriorEuler => input.map(aromatic::interior_euler)?,
                Op::DeltaV => input.map(aromatic::delta_v)?,
                Op::Wedge => input.clone(),
                Op::D => {
                    let mut total = GradedForm::zero();
                    for component in input.components() {
                        let (horizontal, vertical) = d_total(component)?;
                        total.add_form(horizontal);
                        total.add_form(vertical);
                    }
                    total
                }
            };
            let op_name = ["dh", "dv", "d", "wedge", "I", "deltaV"][*op as usize];
            emit(
                format,
                &print_graded(&result),
                json!({
                    "command": "apply",
                    "op": op_name,
                    "text": print_graded(&result),
                    "components": graded_json(&result),
                }),
            );
            Ok(0)
        }
        Command::Lie { tau, gamma } => {
            let tau = parse_form(expr_text(tau))?;
            let gamma = parse_form(expr_text(gamma))?;
            let result = lie_derivative(&tau, &gamma)?;
            emit(
                format,
                &print_form(&result),
                json!({"command": "lie", "result": form_json(&result)}),
            );
            Ok(0)
        }
        Command::Bracket { a, b } => {
            let a = parse_form(expr_text(a))?;
            let b = parse_form(expr_text(b))?;
            let result = field_bracket(&a, &b)?;
            emit(
                format,
                &print_form(&result),
                json!({"command": "bracket", "result": form_json(&result)}),
            );
            Ok(0)
        }
        Command::ExpLie { tau, gamma, order } => {
            let tau_form = parse_form(expr_text(tau))?;
            let tau_series = Series::from_form(&tau_form, *order);
            if gamma == "exact-flow" {
                if !is_solenoidal(&tau_form)? {
                    emit(
                        format,
                        "not solenoidal",
                        json!({"command": "exp-lie", "solenoidal": false}),
                    );
                    return Ok(1);
                }
                let report = vp_modified_field(&tau_series, *order)?;
                let divergences: Vec<Value> = report
                    .divergence
                    .iter()
                    .map(|(k, form)| json!({"order": k, "form": form_json(form)}))
                    .collect();
                if format == Format::Text {
                    print_series(&report.field);
                    for (k, form) in &report.divergence {
                        println!("divergence at order {k}: {}", print_form(form));
                    }
                } else {
                    println!(
                        "{}",
                        json!({
                            "command": "exp-lie",
                            "gamma": "exact-flow",
                            "solenoidal": true,
                            "field": series_json(&report.field),
                            "divergence": divergences,
                        })
                    );
                }
                Ok(0)
            } else {
                let gamma_form = parse_form(expr_text(gamma))?;
                let gamma_series = Series::from_form(&gamma_form, *order);
                let result = exp_lie(&tau_series, &gamma_series, *order)?;
                if format == Format::Text {
                    print_series(&result);
                } else {
                    println!("{}", json!({"command": "exp-lie", "result": series_json(&result)}));
                }
                Ok(0)
            }
        }
        Command::SolveDh { target } => {
            let target = parse_form(expr_text(target))?;
            match solve_horizontal(&target)? {
                Some(witness) => {
                    emit(
                        format,
                        &print_form(&witness),
                        json!({
                            "command": "solve-dh",
                            "solvable": true,
                            "witness": form_json(&witness),
                        }),
                    );
                    Ok(0)
                }
                None => {
                    emit(format, "not in image", json!({"command": "solve-dh", "solvable": false}));
                    Ok(1)
                }
            }
        }
        Command::Kernel { grade, order, op } => {
            let (n, p) = parse_grade_pair(grade)?;
            let tag = match op {
                KernelOp::Dh => OperatorTag::Horizontal,
                KernelOp::Dv => OperatorTag::Vertical,
            };
            let matrix = GradedMatrix::of_operator(tag, Grade::new(n, p, *order))?;
            let basis = matrix.kernel_forms()?;
            let lines: Vec<String> = basis.iter().map(print_form).collect();
            emit(
                format,
                &lines.join("\n"),
                json!({
                    "command": "kernel",
                    "op": if matches!(op, KernelOp::Dh) { "dh" } else { "dv" },
                    "roots": n,
                    "covertices": p,
                    "order": order,
                    "dimension": basis.len(),
                    "basis": basis.iter().map(form_json).collect::<Vec<_>>(),
                }),
            );
            Ok(0)
        }
        Command::Exactness { max_order, max_roots, max_covertices } => {
            let report = exactness_report(*max_order, *max_roots, *max_covertices)?;
            let mut lines = Vec::new();
            for row in &report.rows {
                lines.push(format!(
                    "{} at ({}, {}, {}): space {}, kernel {}, image {} -> {}",
                    row.label,
                    row.grade.roots,
                    row.grade.covertices,
                    row.grade.order,
                    row.space_dim,
                    row.kernel_dim,
                    row.image_dim,
                    if row.exact { "exact" } else { "NOT EXACT" },
                ));
            }
            let all = report.all_exact();
            lines.push(if all {
                format!("all {} slots exact", report.rows.len())
            } else {
                "exactness FAILED".to_string()
            });
            let rows: Vec<Value> = report
                .rows
                .iter()
                .map(|row| {
                    json!({
                        "label": row.label,
                        "roots": row.grade.roots,
                        "covertices": row.grade.covertices,
                        "order": row.grade.order,
                        "space": row.space_dim,
                        "kernel": row.kernel_dim,
                        "image": row.image_dim,
                        "exact": row.exact,
                    })
                })
                .collect();
            emit(
                format,
                &lines.join("\n"),
                json!({"command": "exactness", "all_exact": all, "rows": rows}),
            );
            Ok(if all { 0 } else { 1 })
        }
        Command::Solenoidal { order } => {
            let basis = solenoidal_basis(*order)?;
            let lines: Vec<String> = basis.iter().map(print_form).collect();
            emit(
                format,
                &lines.join("\n"),
                json!({
                    "command": "solenoidal",
                    "order": order,
                    "dimension": basis.len(),
                    "basis": basis.iter().map(form_json).collect::<Vec<_>>(),
                }),
            );
            Ok(0)
        }
        Command::Noether { tau, lagrangian } => {
            let tau = parse_form(expr_text(tau))?;
            let gamma = parse_form(expr_text(lagrangian))?;
            let verdict = classify_symmetry(&tau, &gamma)?;
            let (name, eta) = describe_status(&verdict.status);
            let mut lines = vec![format!("verdict: {name}")];
            if let Some(eta) = &eta {
                lines.push(format!("eta: {}", print_form(eta)));
            }
            let witness = if matches!(verdict.status, SymmetryStatus::Neither) {
                None
            } else {
                let witness = conservation_law(&tau, &gamma)?;
                if let Some(w) = &witness {
                    lines.push(format!("conservation witness: {}", print_form(w)));
                }
                witness
            };
            emit(
                format,
                &lines.join("\n"),
                json!({
                    "command": "noether",
                    "verdict": name,
                    "eta": eta.as_ref().map(form_json),
                    "conservation_witness": witness.as_ref().map(form_json),
                }),
            );
            Ok(if matches!(verdict.status, SymmetryStatus::Neither) { 1 } else { 0 })
        }
        Command::Classify { tau, gamma } => {
            let tau = parse_form(expr_text(tau))?;
            let gamma = parse_form(expr_text(gamma))?;
            let verdict = classify_symmetry(&tau, &gamma)?;
            let (name, eta) = describe_status(&verdict.status);
            let mut lines = vec![format!("verdict: {name}")];
            if let Some(eta) = &eta {
                lines.push(format!("eta: {}", print_form(eta)));
            }
            emit(
                format,
                &lines.join("\n"),
                json!({
                    "command": "classify",
                    "verdict": name,
                    "eta": eta.as_ref().map(form_json),
                }),
            );
            Ok(if matches!(verdict.status, SymmetryStatus::Neither) { 1 } else { 0 })
        }
        Command::Elemdiff { expr, field, assert_zero } => {
            let field_text = if field.as_os_str() == "-" {
                expr_text("-").to_string()
            } else {
                std::fs::read_to_string(field)
                    .map_err(|e| Error::Domain(format!("cannot read {}: {e}", field.display())))?
            };
            let field = parse_vector_field(&field_text)?;
            let input = parse_expr(expr_text(expr))?;
            let differential = differential_of_graded(&input, &field)?;
            let zero = differential.is_zero();
            let (lines, components) = match &differential {
                Differential::Scalar(p) => (vec![p.to_string()], vec![p.to_string()]),
                Differential::Vector(ps) => (
                    ps.iter()
                        .enumerate()
                        .map(|(i, p)| format!("component {}: {}", i + 1, p))
                        .collect(),
                    ps.iter().map(Polynomial::to_string).collect(),
                ),
            };
            emit(
                format,
                &lines.join("\n"),
                json!({
                    "command": "elemdiff",
                    "kind": match &differential {
                        Differential::Scalar(_) => "scalar",
                        Differential::Vector(_) => "vector",
                    },
                    "components": components,
                    "zero": zero,
                }),
            );
            Ok(if *assert_zero && !zero { 1 } else { 0 })
        }
        Command::ExactFlow { order } => {
            let series = exact_flow(*order)?;
            if format == Format::Text {
                print_series(&series);
            } else {
                println!("{}", json!({"command": "exact-flow", "result": series_json(&series)}));
            }
            Ok(0)
        }
        Command::PaperExamples => {
            let outcomes = regressions::run_all();
            let failed = outcomes.iter().filter(|o| !o.pass).count();
            let mut lines: Vec<String> = outcomes
                .iter()
                .map(|o| format!("{} {}", if o.pass { "PASS" } else { "FAIL" }, o.name))
                .collect();
            lines.push(format!("{} of {} checks passed", outcomes.len() - failed, outcomes.len()));
            let rows: Vec<Value> =
                outcomes.iter().map(|o| json!({"name": o.name, "pass": o.pass})).collect();
            emit(
                format,
                &lines.join("\n"),
                json!({
                    "command": "paper-examples",
                    "total": outcomes.len(),
                    "passed": outcomes.len() - failed,
                    "failed": failed,
                    "results": rows,
                }),
            );
            Ok(if failed == 0 { 0 } else { 1 })
        }
    }
}

fn describe_status(status: &SymmetryStatus) -> (&'static str, Option<Form>) {
    match status {
        SymmetryStatus::Symmetry => ("symmetry", None),
        SymmetryStatus::DivergenceSymmetry(eta) => ("divergence-symmetry", Some(eta.clone())),
        SymmetryStatus::Neither => ("neither", None),
    }
}

fn parse_grade_pair(text: &str) -> Result<(usize, usize), Error> {
    let mut parts = text.split(',');
    let bad = || Error::Domain(format!("--grade takes `n,p`, got {text:?}"));
    let n = parts.next().and_then(|s| s.trim().parse().ok()).ok_or_else(bad)?;
    let p = parts.next().and_then(|s| s.trim().parse().ok()).ok_or_else(bad)?;
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok((n, p))
}

/// Elementary differential of a (possibly graded) expression: components must
/// share a root count so the scalar/vector answers add up.
fn differential_of_graded(
    input: &GradedForm,
    field: &aromatic::elemdiff::PolyVectorField,
) -> Result<Differential, Error> {
    let mut scalar: Option<Polynomial> = None;
    let mut vector: Option<Vec<Polynomial>> = None;
    for component in input.components() {
        match elementary_differential(component, field)? {
            Differential::Scalar(p) => {
                if vector.is_some() {
                    return Err(Error::Domain(
                        "expression mixes rootless and one-root parts".into(),
                    ));
                }
                scalar = Some(match scalar {
                    Some(acc) => acc.add(&p),
                    None => p,
                });
            }
            Differential::Vector(ps) => {
                if scalar.is_some() {
                    return Err(Error::Domain(
                        "expression mixes rootless and one-root parts".into(),
                    ));
                }
                vector = Some(match vector {
                    Some(acc) => acc.iter().zip(&ps).map(|(a, b)| a.add(b)).collect(),
                    None => ps,
                });
            }
        }
    }
    if let Some(p) = scalar {
        Ok(Differential::Scalar(p))
    } else if let Some(ps) = vector {
        Ok(Differential::Vector(ps))
    } else {
        Ok(Differential::Scalar(Polynomial::zero(field.dim())))
    }
}
