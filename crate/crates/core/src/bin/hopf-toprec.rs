use std::fs;
use std::io::{ErrorKind, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use hopf_toprec::checks::{run_all, run_suite, suite_number, SuiteReport};
use hopf_toprec::ck::{exp_series, phi, phi_inverse};
use hopf_toprec::hopf::{antipode, coproduct, iterated_reduced, reduced_coproduct, star};
use hopf_toprec::io::{parse_forest, parse_graph, parse_tree_comb, render, Format, Json, Render};
use hopf_toprec::lincomb::LinComb;
use hopf_toprec::loops::{enumerate_loop_graphs_with, ContractionRule};
use hopf_toprec::quantize::{build_w, q_op_comb, q_parts};
use hopf_toprec::toprec::{corr_coproduct, expand_w0, expand_wg, product_rhs, reduced_corr_coproduct, toprec_rhs, Label, SplitMode};
use hopf_toprec::tree::enumerate_trees;
use hopf_toprec::{AlgebraError, ParseError, Q};

#[derive(Parser)]
#[command(name = "hopf-toprec", version, about = "Planar binary trees, loop graphs and topological recursion")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, default_value = "text")]
    format: FormatArg,
    /// Write output to a file instead of standard out.
    #[arg(long, global = true)]
    out: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
    Latex,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
            FormatArg::Latex => Format::Latex,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    Adjacent,
    Nearest,
    Isolation,
}

#[derive(Subcommand)]
enum Command {
    /// List Y^n, or the loop graphs (Y^n)^g.
    Enumerate {
        #[arg(long, conflicts_with = "graphs")]
        trees: Option<usize>,
        #[arg(long, num_args = 2, value_names = ["N", "G"])]
        graphs: Option<Vec<usize>>,
        #[arg(long, default_value = "adjacent")]
        rule: RuleArg,
    },
    /// Product of two tree combinations, e.g. `star "(1)" "2*(12)"`.
    Star { left: String, right: String },
    /// Coproduct of a tree combination, or of W^0_{n+2} with `--corr n`.
    Coproduct {
        input: String,
        #[arg(long, conflicts_with = "iterate")]
        reduced: bool,
        #[arg(long)]
        iterate: Option<usize>,
        /// Read the input as an order and expand the correlation coproduct.
        #[arg(long)]
        corr: bool,
    },
    /// Antipode of a tree combination.
    Antipode { input: String },
    /// Kernel/cylinder expansion of W^g at Euler characteristic -n.
    Expand {
        #[arg(long, default_value_t = 0)]
        genus: usize,
        #[arg(long)]
        order: usize,
        /// Print one recursion step instead of the full expansion.
        #[arg(long)]
        step: bool,
        /// Expand the symmetrization over external labels.
        #[arg(long)]
        full: bool,
    },
    /// One recursion step of W^0_{l+2} ∗ W^0_{m+2}.
    Product { l: usize, m: usize },
    /// φ of a forest such as `•[•] •`, or φ⁻¹ of a tree with `--inverse`.
    Phi {
        input: String,
        #[arg(long)]
        inverse: bool,
    },
    /// exp of the generator through order N.
    ExpSeries { n: usize },
    /// Q of a tree or loop graph, e.g. `quantize "((|,|),|)"`.
    Quantize {
        input: String,
        #[arg(long)]
        parts: bool,
    },
    /// W^(n) as a series in h.
    Wseries {
        n: usize,
        #[arg(long)]
        summary: bool,
    },
    /// Run a check suite by number or name, or `all`.
    Check { suite: String },
}

enum Failure {
    Parse(ParseError),
    Params(String),
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::Parse(e)
    }
}

impl From<AlgebraError> for Failure {
    fn from(e: AlgebraError) -> Self {
        Failure::Params(e.to_string())
    }
}

fn max_order() -> usize {
    std::env::var("HOPF_TOPREC_MAX_ORDER")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(8)
}

fn guard(order: usize) -> Result<(), Failure> {
    let max = max_order();
    if order > max {
        return Err(Failure::Params(format!(
            "order {order} exceeds HOPF_TOPREC_MAX_ORDER={max}"
        )));
    }
    Ok(())
}

fn guard_comb(c: &LinComb<hopf_toprec::Tree, Q>) -> Result<(), Failure> {
    guard(c.basis_elements().map(|t| t.order()).max().unwrap_or(0))
}

fn report_json(r: &SuiteReport) -> serde_json::Value {
    json!({
        "suite": r.number,
        "name": r.title,
        "passed": r.passed(),
        "checks": r.checks.iter().map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail})).collect::<Vec<_>>(),
        "notes": r.notes,
    })
}

fn run(cli: &Cli) -> Result<(String, bool), Failure> {
    let fmt: Format = cli.format.into();
    let out = match &cli.command {
        Command::Enumerate { trees, graphs, rule } => {
            if let Some(n) = trees {
                guard(*n)?;
                let all = enumerate_trees(*n);
                match fmt {
                    Format::Json => serde_json::Value::Array(all.iter().map(Json::to_json).collect()).to_string(),
                    _ => all.iter().map(|t| render(t, fmt)).collect::<Vec<_>>().join("\n"),
                }
            } else if let Some(ng) = graphs {
                guard(ng[0])?;
                let rule = match rule {
                    RuleArg::Adjacent => ContractionRule::AdjacentOnly,
                    RuleArg::Nearest => ContractionRule::NearestFree,
                    RuleArg::Isolation => ContractionRule::Isolation,
                };
                let set = enumerate_loop_graphs_with(ng[0], ng[1], rule)?;
                match fmt {
                    Format::Json => serde_json::Value::Array(set.basis_elements().map(Json::to_json).collect()).to_string(),
                    _ => set.basis_elements().map(|x| render(x, fmt)).collect::<Vec<_>>().join("\n"),
                }
            } else {
                return Err(Failure::Params("enumerate needs --trees or --graphs".into()));
            }
        }
        Command::Star { left, right } => {
            let a = parse_tree_comb::<Q>(left)?;
            let b = parse_tree_comb::<Q>(right)?;
            guard_comb(&a)?;
            guard_comb(&b)?;
            render(&star(&a, &b), fmt)
        }
        Command::Coproduct { input, reduced, iterate, corr } => {
            if *corr {
                let n: usize = input
                    .trim()
                    .parse()
                    .map_err(|_| ParseError::new(0, "expected an order"))?;
                guard(n)?;
                let d = if *reduced { reduced_corr_coproduct::<Q>(n) } else { corr_coproduct::<Q>(n) };
                render(&d, fmt)
            } else {
                let a = parse_tree_comb::<Q>(input)?;
                guard_comb(&a)?;
                let d = match (reduced, iterate) {
                    (_, Some(0)) => return Err(Failure::Params("--iterate starts at 1".into())),
                    (_, Some(k)) => iterated_reduced(&a, *k),
                    (true, None) => reduced_coproduct(&a),
                    (false, None) => coproduct(&a),
                };
                render(&d, fmt)
            }
        }
        Command::Antipode { input } => {
            let a = parse_tree_comb::<Q>(input)?;
            guard_comb(&a)?;
            render(&antipode(&a), fmt)
        }
        Command::Expand { genus, order, step, full } => {
            guard(*order)?;
            if *order + 2 < 2 * genus + 1 {
                return Err(AlgebraError::InconsistentEuler { order: *order, genus: *genus }.into());
            }
            if *step {
                let ext: Vec<Label> = (1..=order + 1 - 2 * genus).map(Label::External).collect();
                render(&toprec_rhs::<Q>(*genus, &ext, SplitMode::Contiguous)?, fmt)
            } else {
                let s = if *genus == 0 {
                    if *order == 0 {
                        return Err(Failure::Params("expand needs order at least 1".into()));
                    }
                    expand_w0::<Q>(*order)
                } else {
                    expand_wg::<Q>(*genus, *order)?
                };
                if *full {
                    if *order > 5 {
                        return Err(Failure::Params("full expansion is limited to order 5".into()));
                    }
                    render(&s.expand(), fmt)
                } else {
                    match fmt {
                        Format::Text => hopf_toprec::io::render::symmetrized_text(&s),
                        _ => render(&s.representative, fmt),
                    }
                }
            }
        }
        Command::Product { l, m } => {
            guard(l + m)?;
            render(&product_rhs::<Q>(*l, *m)?, fmt)
        }
        Command::Phi { input, inverse } => {
            if *inverse {
                let t = hopf_toprec::io::parse_tree(input)?;
                guard(t.order())?;
                let f = phi_inverse(&t).ok_or_else(|| Failure::Params("no preimage".into()))?;
                render(&f, fmt)
            } else {
                let f = parse_forest(input)?;
                guard(f.vertices())?;
                render(&phi(&f), fmt)
            }
        }
        Command::ExpSeries { n } => {
            guard(*n)?;
            let terms = exp_series(*n);
            match fmt {
                Format::Json => serde_json::Value::Array(
                    terms
                        .iter()
                        .map(|t| {
                            json!({
                                "order": t.order,
                                "factor": t.factor.to_string(),
                                "trees": t.trees.to_json(),
                                "forests": t.forests.to_json(),
                            })
                        })
                        .collect(),
                )
                .to_string(),
                _ => terms
                    .iter()
                    .map(|t| {
                        let body = if fmt == Format::Latex { t.forests.latex() } else { t.forests.text() };
                        format!("{}: {} * ({})", t.order, t.factor, body)
                    })
                    .collect::<Vec<_>>()
                    .join("\n"),
            }
        }
        Command::Quantize { input, parts } => {
            let g = parse_graph(input)?;
            guard(g.order())?;
            if *parts {
                let (l, m, r) = q_parts(&g);
                let l = l.convert(|c| Q::from_integer((*c).into()));
                let m = m.convert(|c| Q::from_integer((*c).into()));
                let r = r.convert(|c| Q::from_integer((*c).into()));
                match fmt {
                    Format::Json => json!({"left": l.to_json(), "middle": m.to_json(), "right": r.to_json()}).to_string(),
                    _ => format!("Q_L: {}\nQ_M: {}\nQ_R: {}", render(&l, fmt), render(&m, fmt), render(&r, fmt)),
                }
            } else {
                render(&q_op_comb::<Q>(&LinComb::basis(g)), fmt)
            }
        }
        Command::Wseries { n, summary } => {
            guard(*n)?;
            let w = build_w::<Q>(*n);
            if *summary && fmt == Format::Text {
                w.summary()
            } else {
                render(&w, fmt)
            }
        }
        Command::Check { suite } => {
            let reports = if suite == "all" {
                run_all()
            } else {
                let n = suite_number(suite).ok_or_else(|| Failure::Params(format!("unknown suite '{suite}'")))?;
                vec![run_suite(n).expect("resolved suite")]
            };
            let ok = reports.iter().all(SuiteReport::passed);
            let text = match fmt {
                Format::Json => serde_json::Value::Array(reports.iter().map(report_json).collect()).to_string(),
                _ => reports.iter().map(|r| r.to_string()).collect::<String>().trim_end().to_string(),
            };
            return Ok((text, ok));
        }
    };
    Ok((out, true))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, ok)) => {
            if let Some(path) = &cli.out {
                if let Err(e) = fs::write(path, format!("{text}\n")) {
                    eprintln!("error: cannot write {path}: {e}");
                    return ExitCode::from(1);
                }
            } else if let Err(e) = writeln!(std::io::stdout().lock(), "{text}") {
                if e.kind() != ErrorKind::BrokenPipe {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Parse(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Params(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
