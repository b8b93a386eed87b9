use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use dgz_core::census::{self, curve_points, extension};
use dgz_core::check::{all_passed, Check};
use dgz_core::config::Config;
use dgz_core::curve::DgzCurve;
use dgz_core::group::{Subgroup, SubgroupName};
use dgz_core::local::Local;
use dgz_core::plane::ProjPoint;
use dgz_core::quotient;
use dgz_core::report::{run_suites, suite_checks, validate_q, Report, RunOptions, Suite, DEFAULT_SEED};
use dgz_core::{Error, Result};

#[derive(Parser)]
#[command(name = "dgz", version, about = "Exact computations on the Dickson invariant curve F = D1/D2 over F_q")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args)]
struct Global {
    /// Field size (a prime power).
    #[arg(long, global = true, conflicts_with_all = ["p", "h"])]
    q: Option<u64>,
    /// Characteristic; combine with --h.
    #[arg(long, global = true)]
    p: Option<u64>,
    /// Extension degree over F_p (default 1).
    #[arg(long, global = true)]
    h: Option<u32>,
    /// Seed for random matrices and generic point samples.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Also write a JSON report to this path.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Also write a CSV report to this path.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Record wall times in reports (makes output nondeterministic).
    #[arg(long, global = true)]
    timings: bool,
    /// key=value config file; command-line flags take precedence.
    #[arg(long, global = true, env = "DGZ_CONFIG")]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Build D1, D2 and F and print a summary.
    Build {
        /// Print F in the text exchange format.
        #[arg(long)]
        emit: bool,
    },
    /// Run verification suites for one q.
    Verify {
        /// Suites to run (repeatable); all when omitted.
        #[arg(long = "suite")]
        suites: Vec<String>,
    },
    /// Count points of the curve over F_{q^i}.
    Count {
        #[arg(long, default_value_t = 3)]
        ext: u32,
    },
    /// Check that C(F_{q^3}) is a complete arc.
    Arc,
    /// Orbits of a named subgroup on C(F_{q^i}).
    Orbits {
        #[arg(long, default_value = "Full")]
        subgroup: String,
        #[arg(long, default_value_t = 2)]
        ext: u32,
    },
    /// Local data at a point of PG(2, F_{q^i}).
    Local {
        /// A point such as "(1:2:0)"; extension-field coordinates use comma-separated digits.
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = 2)]
        ext: u32,
    },
    /// Quotient identities and p-rank bookkeeping.
    Quotient,
    /// Run suites over several q and emit a report.
    Report {
        /// Comma-separated q values.
        #[arg(long, value_delimiter = ',', default_values_t = [2u64, 3, 4, 5, 7, 8, 9])]
        qs: Vec<u64>,
        #[arg(long = "suite")]
        suites: Vec<String>,
    },
}

struct Settings {
    q: Option<u64>,
    seed: u64,
    json: Option<PathBuf>,
    csv: Option<PathBuf>,
    timings: bool,
}

fn settings(g: &Global) -> Result<Settings> {
    let cli = Config {
        q: g.q,
        p: g.p,
        h: g.h,
        seed: g.seed,
        jobs: g.jobs,
        json: g.json.clone(),
        csv: g.csv.clone(),
        timings: g.timings.then_some(true),
    };
    // Command-line q and p/h replace the file's choice as a unit.
    let file = match &g.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let file = if cli.q.is_some() || cli.p.is_some() { Config { q: None, p: None, h: None, ..file } } else { file };
    let c = cli.over(file);
    if let Some(j) = c.jobs {
        // Ignore the error when a pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    Ok(Settings {
        q: c.resolve_q()?,
        seed: c.seed.unwrap_or(DEFAULT_SEED),
        json: c.json,
        csv: c.csv,
        timings: c.timings.unwrap_or(false),
    })
}

fn need_q(s: &Settings) -> Result<u64> {
    s.q.ok_or_else(|| Error::Parse("pass --q, or --p and --h, or set q in DGZ_CONFIG".into()))
}

fn print_json<T: Serialize>(v: &T) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn parse_suites(names: &[String]) -> Result<Vec<Suite>> {
    names.iter().map(|n| n.parse()).collect()
}

fn emit(report: &Report, s: &Settings) -> Result<()> {
    if let Some(p) = &s.json {
        std::fs::write(p, report.to_json() + "\n")?;
    }
    if let Some(p) = &s.csv {
        std::fs::write(p, report.to_csv())?;
    }
    print_json(report);
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    let s = settings(&cli.global)?;
    let opts = RunOptions { seed: s.seed, timings: s.timings };
    match cli.cmd {
        Command::Build { emit } => {
            let q = need_q(&s)?;
            let c = DgzCurve::build(q)?;
            if emit {
                print!("{}", c.f.to_text());
                return Ok(true);
            }
            #[derive(Serialize)]
            struct Summary {
                q: u64,
                degree: u64,
                terms_f: usize,
                terms_d1: usize,
                terms_d2: usize,
            }
            print_json(&Summary {
                q,
                degree: c.degree(),
                terms_f: c.f.num_terms(),
                terms_d1: c.d1.num_terms(),
                terms_d2: c.d2.num_terms(),
            });
            Ok(all_passed(&c.structure_checks()))
        }
        Command::Verify { suites } => {
            let q = need_q(&s)?;
            let r = Report::new(s.seed, run_suites(&[q], &parse_suites(&suites)?, opts)?);
            emit(&r, &s)?;
            Ok(!r.any_failed())
        }
        Command::Report { qs, suites } => {
            let qs = match s.q {
                Some(q) => vec![q],
                None => qs,
            };
            let r = Report::new(s.seed, run_suites(&qs, &parse_suites(&suites)?, opts)?);
            emit(&r, &s)?;
            Ok(!r.any_failed())
        }
        Command::Count { ext } => {
            let q = need_q(&s)?;
            let c = DgzCurve::build(q)?;
            let rep = census::census(&c, &[ext])?;
            print_json(&rep);
            Ok(all_passed(&rep.checks()))
        }
        Command::Arc => {
            let q = need_q(&s)?;
            let c = DgzCurve::build(q)?;
            let rep = census::verify_arc(&c)?;
            print_json(&rep);
            Ok(all_passed(&rep.checks))
        }
        Command::Orbits { subgroup, ext } => {
            let q = need_q(&s)?;
            let c = DgzCurve::build(q)?;
            let g = Subgroup::new(subgroup.parse::<SubgroupName>()?, c.field());
            let pts = curve_points(&c, ext)?;
            let records = g
                .orbits_on(&pts)?
                .iter()
                .map(|orb| g.orbit_record(&orb[0]))
                .collect::<Result<Vec<_>>>()?;
            print_json(&records);
            Ok(true)
        }
        Command::Local { point, ext } => {
            let q = need_q(&s)?;
            let c = DgzCurve::build(q)?;
            let (f, _) = extension(&c, ext)?;
            let p = ProjPoint::parse(&f, &point)?;
            let data = Local::new(&c, &f)?.local_data(&p)?;
            print_json(&data);
            Ok(true)
        }
        Command::Quotient => {
            let q = need_q(&s)?;
            validate_q(q)?;
            let c = DgzCurve::build(q)?;
            let mut checks = suite_checks(Suite::Quotient, &c, s.seed)?;
            checks.extend(suite_checks(Suite::FermatPrank, &c, s.seed)?);
            #[derive(Serialize)]
            struct Verdicts<'a> {
                q: u64,
                passed: bool,
                m_forms: quotient::MFormReport,
                checks: &'a [Check],
            }
            let passed = all_passed(&checks);
            print_json(&Verdicts { q, passed, m_forms: quotient::verify_m_forms(q)?, checks: &checks });
            Ok(passed)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("dgz: {e}");
            ExitCode::from(2)
        }
    }
}
