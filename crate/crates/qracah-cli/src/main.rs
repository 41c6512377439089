//! `qracah`: tables of q-Racah polynomials and q-6j symbols, and the
//! verification suites.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qracah::racah::{Family, Method, RacahParams};
use qracah::sixj::{admissible_symbols, parts, sixj_value, Route, SixJ};
use qracah::verify::{self, Report, Suite, VerifyConfig};
use qracah::{Error, ExactField, FloatField, Rat};
use serde_json::{json, Map, Value};

mod table;

use table::Table;

#[derive(Parser, Debug)]
#[command(name = "qracah", version, about = "q-Racah polynomials and q-6j symbols")]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct RunConfig {
    #[arg(long, global = true, value_enum, default_value_t = Backend::Float)]
    backend: Backend,
    /// Rational (`7/10`) or decimal (`0.7`).
    #[arg(long, global = true, default_value = "7/10", value_parser = parse_rat)]
    q: Rat,
    #[arg(long, global = true, env = "QRACAH_PRECISION", default_value_t = 128)]
    precision: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, global = true, default_value = "1e-25")]
    tolerance: f64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Backend {
    Exact,
    Float,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    U,
    Utilde,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Values P_n(x(s)) on the orthogonality grid.
    Poly {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, value_parser = parse_rat, allow_hyphen_values = true)]
        a: Rat,
        #[arg(long, value_parser = parse_rat, allow_hyphen_values = true)]
        b: Rat,
        #[arg(long, value_parser = parse_rat, allow_hyphen_values = true)]
        alpha: Rat,
        #[arg(long, value_parser = parse_rat, allow_hyphen_values = true)]
        beta: Rat,
        #[arg(long)]
        nmax: i64,
        /// explicit, hypergeometric, sears, phi, phi-sears or ttrr.
        #[arg(long, default_value = "hypergeometric")]
        method: Method,
    },
    /// 6j symbols, given as `j1,j2,j12,j3,j,j23` or enumerated with `--jmax`.
    Sixj {
        symbols: Vec<String>,
        #[arg(long, value_parser = parse_rat)]
        jmax: Option<Rat>,
        /// via-u, via-utilde, explicit, explicit-tilde, or all.
        #[arg(long, default_value = "via-u")]
        route: String,
        /// Report inadmissible symbols as rows instead of failing.
        #[arg(long)]
        lenient: bool,
    },
    /// Run a verification suite, or `all`.
    Verify {
        suite: String,
        #[arg(long, value_parser = parse_rat)]
        jmax: Option<Rat>,
    },
}

fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{frac}", int.trim_start_matches('-'));
        let num: i64 = digits.parse().map_err(|_| format!("invalid number '{s}'"))?;
        let den = 10i64.checked_pow(frac.len() as u32).ok_or_else(|| format!("too many digits in '{s}'"))?;
        let r = Rat::new(num, den);
        return Ok(if neg { -r } else { r });
    }
    s.parse().map_err(|_| format!("invalid rational '{s}'"))
}

fn kind(e: &Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| c == '(' || c == ' ' || c == '{').next().unwrap_or("Error").to_string()
}

fn error_object(e: &Error) -> Value {
    json!({ "error": { "kind": kind(e), "message": e.to_string() } })
}

struct Failure {
    code: u8,
    error: Error,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure { code: 2, error }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Poly { family, a, b, alpha, beta, nmax, method } => {
            let family = match family {
                FamilyArg::U => Family::U,
                FamilyArg::Utilde => Family::UTilde,
            };
            poly(&cli.run, family, [*a, *b, *alpha, *beta], *nmax, *method).map(|t| (t, true))
        }
        Command::Sixj { symbols, jmax, route, lenient } => sixj(&cli.run, symbols, *jmax, route, *lenient).map(|t| (t, true)),
        Command::Verify { suite, jmax } => verify_cmd(&cli.run, suite, *jmax),
    };
    match result {
        Ok((table, ok)) => {
            print!("{}", table.render(cli.run.format));
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => {
            println!("{}", serde_json::to_string_pretty(&error_object(&f.error)).expect("serializable"));
            ExitCode::from(f.code)
        }
    }
}

fn float_field(run: &RunConfig) -> Result<FloatField, Error> {
    FloatField::new(run.q, run.precision)
}

fn backend_meta(run: &RunConfig, t: &mut Table) {
    match run.backend {
        Backend::Exact => {
            t.meta("backend", "exact");
            t.meta("t", "q^(1/4)");
        }
        Backend::Float => {
            t.meta("backend", "float");
            t.meta("q", &run.q.to_string());
            t.meta("precision_bits", &run.precision.to_string());
        }
    }
}

fn poly(run: &RunConfig, family: Family, [a, b, alpha, beta]: [Rat; 4], nmax: i64, method: Method) -> Result<Table, Failure> {
    let p = RacahParams::new(family, a, b, alpha, beta)?;
    let mut t = Table::new(&["n", "s", "x", "value"]);
    t.meta("family", &family.to_string());
    for (k, v) in [("a", a), ("b", b), ("alpha", alpha), ("beta", beta)] {
        t.meta(k, &v.to_string());
    }
    t.meta("method", method.name());
    backend_meta(run, &mut t);
    let lattice = qracah::nulattice::Lattice;
    match run.backend {
        Backend::Exact => {
            let f = ExactField::new();
            for n in 0..=nmax {
                for s in p.grid() {
                    let x = lattice.x(&f, s)?;
                    let v = p.eval(&f, n, s, method)?;
                    t.row(vec![json!(n), json!(s.to_string()), json!(x.to_string()), json!(v.to_string())]);
                }
            }
        }
        Backend::Float => {
            let f = float_field(run)?;
            for n in 0..=nmax {
                for s in p.grid() {
                    let x = lattice.x(&f, s)?;
                    let v = p.eval(&f, n, s, method)?;
                    t.row(vec![json!(n), json!(s.to_string()), json!(x.to_string()), json!(v.to_string())]);
                }
            }
        }
    }
    Ok(t)
}

fn routes(arg: &str) -> Result<Vec<Route>, Failure> {
    if arg == "all" {
        return Ok(Route::ALL.to_vec());
    }
    arg.parse::<Route>().map(|r| vec![r]).map_err(|m| Failure { code: 2, error: Error::InadmissibleParams(m) })
}

fn sixj(run: &RunConfig, inputs: &[String], jmax: Option<Rat>, route: &str, lenient: bool) -> Result<Table, Failure> {
    let routes = routes(route)?;
    let mut symbols: Vec<(String, Result<SixJ, Error>)> = inputs.iter().map(|s| (s.clone(), s.parse::<SixJ>())).collect();
    if let Some(j) = jmax {
        symbols.extend(admissible_symbols(j).into_iter().map(|sj| (sj.to_string(), Ok(sj))));
    }
    let mut cols = vec!["j1", "j2", "j12", "j3", "j", "j23"];
    let names: Vec<String> = match run.backend {
        Backend::Float if routes.len() == 1 => vec!["value".into()],
        Backend::Float => routes.iter().map(|r| r.name().to_string()).collect(),
        Backend::Exact if routes.len() == 1 => vec!["square".into(), "sign".into()],
        Backend::Exact => routes.iter().flat_map(|r| [format!("{}-square", r.name()), format!("{}-sign", r.name())]).collect(),
    };
    if routes.len() == 1 {
        cols.push("route");
    }
    let mut cols: Vec<String> = cols.into_iter().map(String::from).collect();
    cols.extend(names);
    if lenient {
        cols.push("error".into());
    }
    let mut t = Table::new(&cols.iter().map(String::as_str).collect::<Vec<_>>());
    backend_meta(run, &mut t);
    if run.backend == Backend::Exact {
        t.meta("sign_at_q", &run.q.to_string());
    }
    let f = float_field(run)?;
    let fe = ExactField::new();
    for (input, sj) in symbols {
        let sj = match sj {
            Ok(sj) => sj,
            Err(e) if lenient => {
                let mut row = vec![json!(input)];
                row.extend(std::iter::repeat(json!("")).take(cols.len() - 2));
                row.push(json!(e.to_string()));
                t.row(row);
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let mut row: Vec<Value> = [sj.j1, sj.j2, sj.j12, sj.j3, sj.j, sj.j23].iter().map(|x| json!(x.to_string())).collect();
        if routes.len() == 1 {
            row.push(json!(routes[0].name()));
        }
        for &r in &routes {
            match run.backend {
                Backend::Float => row.push(json!(sixj_value(&f, &sj, r)?.to_string())),
                Backend::Exact => {
                    let p = parts(&fe, &sj, r)?;
                    row.push(json!(p.square().to_string()));
                    row.push(json!(p.sign_at(&f)?));
                }
            }
        }
        if lenient {
            row.push(json!(""));
        }
        t.row(row);
    }
    Ok(t)
}

fn report_json(r: &Report) -> Value {
    let checks: Vec<Value> = r
        .checks
        .iter()
        .map(|c| {
            let mut m = Map::new();
            m.insert("check".into(), json!(c.name));
            m.insert("params".into(), json!(c.params));
            m.insert("exact".into(), json!(c.exact));
            m.insert("count".into(), json!(c.count));
            m.insert("max_residual".into(), json!(format!("{:e}", c.max_residual)));
            m.insert("pass".into(), json!(c.passed));
            Value::Object(m)
        })
        .collect();
    json!({
        "suite": r.suite.name(),
        "passed": r.passed(),
        "evaluations": r.evaluations(),
        "max_residual": format!("{:e}", r.max_residual()),
        "checks": checks,
    })
}

fn verify_cmd(run: &RunConfig, suite: &str, jmax: Option<Rat>) -> Result<(Table, bool), Failure> {
    let suites = if suite == "all" { Suite::ALL.to_vec() } else { vec![suite.parse::<Suite>()?] };
    let mut cfg = VerifyConfig { q: run.q, precision: run.precision, tolerance: run.tolerance, ..VerifyConfig::default() };
    if let Some(j) = jmax {
        cfg.jmax = j;
    }
    float_field(run)?;
    let mut t = Table::new(&["suite", "check", "params", "exact", "count", "max_residual", "pass"]);
    t.meta("q", &cfg.q.to_string());
    t.meta("precision_bits", &cfg.precision.to_string());
    t.meta("tolerance", &format!("{:e}", cfg.tolerance));
    t.meta("jmax", &cfg.jmax.to_string());
    let mut ok = true;
    let mut reports = Vec::new();
    for s in suites {
        let r = verify::run(s, &cfg)?;
        ok &= r.passed();
        for c in &r.checks {
            t.row(vec![
                json!(s.name()),
                json!(c.name),
                json!(c.params),
                json!(c.exact),
                json!(c.count),
                json!(format!("{:e}", c.max_residual)),
                json!(c.passed),
            ]);
        }
        reports.push(report_json(&r));
    }
    t.set_json(json!({
        "meta": t.meta_json(),
        "passed": ok,
        "reports": reports,
    }));
    Ok((t, ok))
}
