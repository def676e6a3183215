use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use tticad::cad::build;
use tticad::complexity::{BoundScenario, BoundScheme};
use tticad::projection::Projector;
use tticad::qff::{family, QffList, Scheme};
use tticad_cli::report::RunReport;
use tticad_cli::{apply_order, bounds, heuristics, parse_problem, split_names, Rayon};

#[derive(Parser)]
#[command(name = "tticad", version, about = "Cylindrical algebraic decomposition with equational constraints")]
struct Cli {
    /// Worker threads for stack construction (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct BuildOpts {
    /// sign, ec, tti or rescad. Overrides `@scheme` in the file; default tti.
    #[arg(long)]
    scheme: Option<String>,
    /// Ascending variable order, e.g. `y,x`. Overrides `@order`.
    #[arg(long)]
    order: Option<String>,
    /// Project with every coefficient instead of only those needed.
    #[arg(long)]
    all_coefficients: bool,
    #[arg(long)]
    json: bool,
    /// List every leaf cell with its sample point.
    #[arg(long)]
    cells: bool,
    #[arg(long)]
    timing: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decompose the space for a problem file.
    Build {
        file: PathBuf,
        #[command(flatten)]
        opts: BuildOpts,
    },
    /// Compare variable orders (and EC designations) by sotd, ndrr and cell count.
    Heuristics {
        file: PathBuf,
        #[arg(long)]
        scheme: Option<String>,
        /// Also build every candidate.
        #[arg(long)]
        build: bool,
        /// Try every choice of designated equational constraint.
        #[arg(long)]
        designations: bool,
        #[arg(long, default_value_t = 24)]
        cap: usize,
        #[arg(long)]
        json: bool,
    },
    /// Projection growth table and cell-count bounds.
    Bounds {
        /// sign, ec, tti, ec-implicit or tti-general.
        #[arg(long)]
        scheme: String,
        #[arg(short = 'n')]
        n: u32,
        #[arg(short = 'm')]
        m: u64,
        #[arg(short = 'd')]
        d: u64,
        /// Number of formulae.
        #[arg(short = 't')]
        t: Option<u64>,
        /// Formulae with an equational constraint (tti-general).
        #[arg(short = 'e', default_value_t = 0)]
        e: u64,
        /// Polynomials in formulae with an equational constraint (tti-general).
        #[arg(long = "me", default_value_t = 0)]
        m_e: u64,
        /// Two schemes whose projection sizes to compare, e.g. `tti,ec-implicit`.
        #[arg(long)]
        compare: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// The built-in circle/hyperbola family with J clauses.
    Family {
        j: usize,
        /// Drop the equational constraint from the last clause.
        #[arg(long)]
        psi: bool,
        #[command(flatten)]
        opts: BuildOpts,
    },
}

struct Failure {
    code: u8,
    msg: String,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 1, msg: msg.into() }
}

/// Write to stdout; a closed pipe (`tticad ... | head`) is not an error.
fn emit(s: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(s.as_bytes()).and_then(|_| out.flush());
}

fn print_json<T: Serialize>(v: &T) {
    emit(&serde_json::to_string_pretty(v).expect("reports serialize"));
    emit("\n");
}

fn scheme_arg(s: Option<&str>, file: Option<Scheme>) -> Result<Scheme, Failure> {
    match s {
        Some(s) => Scheme::parse(s).ok_or_else(|| usage(format!("unknown scheme `{}`", s))),
        None => Ok(file.unwrap_or(Scheme::Tti)),
    }
}

fn load(path: &PathBuf) -> Result<tticad_cli::Problem, Failure> {
    let src = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {}", path.display(), e)))?;
    parse_problem(&src).map_err(|e| usage(format!("{}: {}", path.display(), e)))
}

fn run_build(
    q: QffList,
    file_scheme: Option<Scheme>,
    file_order: Option<Vec<String>>,
    opts: &BuildOpts,
    exec: &Rayon,
) -> Result<(), Failure> {
    let scheme = scheme_arg(opts.scheme.as_deref(), file_scheme)?;
    let order = opts.order.as_deref().map(split_names).or(file_order);
    let q = match order {
        Some(o) => apply_order(&q, &o).map_err(usage)?,
        None => q,
    };
    let pr = if opts.all_coefficients { Projector::full_coefficients() } else { Projector::default() };
    let start = Instant::now();
    let result = build(&q, scheme, &pr, exec);
    let (report, failed) = match result {
        Ok(mut cad) => {
            // the EC scheme answers for the merged formula
            let eval_q = if scheme == Scheme::Ec { q.merged() } else { q.clone() };
            cad.evaluate(&eval_q, exec);
            (RunReport::from_cad(&cad, opts.cells), false)
        }
        Err(f) => (RunReport::from_fail(scheme, &q.vars, &f), true),
    };
    let report = RunReport {
        timing_ms: opts.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
        ..report
    };
    if opts.json {
        print_json(&report);
    } else {
        emit(&report.text());
    }
    if failed {
        Err(Failure { code: 2, msg: String::new() })
    } else {
        Ok(())
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let exec = Rayon::new(cli.threads).map_err(usage)?;
    match cli.cmd {
        Cmd::Build { file, opts } => {
            let p = load(&file)?;
            run_build(p.qff, p.scheme, p.order, &opts, &exec)
        }
        Cmd::Family { j, psi, opts } => {
            if j == 0 {
                return Err(usage("the family needs at least one clause"));
            }
            run_build(family(j, psi), None, None, &opts, &exec)
        }
        Cmd::Heuristics { file, scheme, build, designations, cap, json } => {
            let p = load(&file)?;
            let scheme = scheme_arg(scheme.as_deref(), p.scheme)?;
            let opts = heuristics::Options { scheme, designations, build, cap };
            let r = heuristics::run(&p.qff, &opts, &exec).map_err(usage)?;
            if json {
                print_json(&r);
            } else {
                emit(&r.text());
            }
            Ok(())
        }
        Cmd::Bounds { scheme, n, m, d, t, e, m_e, compare, json } => {
            let bs = |s: &str| BoundScheme::parse(s).ok_or_else(|| usage(format!("unknown bound scheme `{}`", s)));
            let sc = BoundScenario::new(bs(&scheme)?, n, m, d)
                .with_t(t.unwrap_or(e.max(1)))
                .with_split(e, m_e);
            let sc = if sc.scheme == BoundScheme::TtiGeneral { sc } else { BoundScenario { e: 0, m_e: 0, m_n: m, ..sc } };
            let r = bounds::report(&sc).map_err(|e| usage(e.to_string()))?;
            let cmp = match compare {
                Some(c) => {
                    let names = split_names(&c);
                    if names.len() != 2 {
                        return Err(usage("--compare takes two schemes"));
                    }
                    Some(bounds::compare(&sc, bs(&names[0])?, bs(&names[1])?).map_err(|e| usage(e.to_string()))?)
                }
                None => None,
            };
            if json {
                #[derive(Serialize)]
                struct Out {
                    #[serde(flatten)]
                    bounds: bounds::BoundsReport,
                    #[serde(skip_serializing_if = "Option::is_none")]
                    compare: Option<bounds::Comparison>,
                }
                print_json(&Out { bounds: r, compare: cmp });
            } else {
                emit(&r.text());
                if let Some(c) = cmp {
                    emit(&format!("M[{}] = {}, M[{}] = {}, difference {}\n", c.a, c.m_a, c.b, c.m_b, c.difference));
                }
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.msg.is_empty() {
                eprintln!("error: {}", f.msg);
            }
            ExitCode::from(f.code)
        }
    }
}
