//! The `cremona` command line: argument parsing and command dispatch.

use std::fs;
use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand};
use cremona_core::algebra::rational::{format_rational, parse_rational};
use cremona_core::algebra::{format_point, Rational};
use cremona_core::links::{factorize, recompose, LinkTrace};
use cremona_core::marked::{fano3_classify, Fano3Data, HomaloidalType, MarkedSystem};
use cremona_core::realization::{
    compose, factor_by_quadratics, homaloidal_type_of, random_corpus, residual_linear, RationalMap,
    RationalMapJson,
};
use cremona_core::Error;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "cremona", version, about = "Factor plane Cremona maps into elementary links")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Untwist a homaloidal type (or the type of a map) into links.
    Factor(FactorArgs),
    /// Check the degree identities and Noether's inequality for a type.
    Check(TypeArgs),
    /// Print the Sarkisov degree (mu, lambda, e) of a type on the plane.
    Degree(TypeArgs),
    /// Compose maps; the first `--map` is applied first.
    Compose(ComposeArgs),
    /// Emit a seeded random chain of Cremona maps as JSON lines.
    Corpus(CorpusArgs),
    /// Threshold report for maximal singularities on a Fano threefold.
    Fano3(Fano3Args),
}

#[derive(Args, Debug)]
pub struct TypeArgs {
    /// Homaloidal type, e.g. "2;1,1,1" or "3;2,1>1,1,1,1".
    #[arg(long = "type", value_name = "TYPE")]
    pub ty: String,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct FactorArgs {
    /// Homaloidal type, e.g. "2;1,1,1".
    #[arg(long = "type", value_name = "TYPE", conflicts_with = "map", required_unless_present = "map")]
    pub ty: Option<String>,
    /// Map JSON file, or `-` for stdin.
    #[arg(long, value_name = "FILE")]
    pub map: Option<String>,
    #[arg(long)]
    pub json: bool,
    /// Re-check the trace by recomposition and, for maps, by polynomial factoring.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Args, Debug)]
pub struct ComposeArgs {
    /// Map JSON files (`-` for stdin), at least two.
    #[arg(long = "map", value_name = "FILE", required = true, num_args = 1)]
    pub maps: Vec<String>,
}

#[derive(Args, Debug)]
pub struct CorpusArgs {
    #[arg(long)]
    pub seed: u64,
    /// Number of quadratic steps.
    #[arg(long)]
    pub k: usize,
    /// Bound on the coordinates of fresh centers.
    #[arg(long)]
    pub height: u64,
    #[arg(long)]
    pub max_degree: Option<u32>,
}

#[derive(Args, Debug)]
pub struct Fano3Args {
    #[arg(long)]
    pub n: u64,
    /// Fano index.
    #[arg(long)]
    pub r: u64,
    /// Degree H^3.
    #[arg(long)]
    pub hcube: u64,
    /// Curves as "deg:mult,...".
    #[arg(long, default_value = "")]
    pub curves: String,
    /// Point multiplicities as "m,...".
    #[arg(long, default_value = "")]
    pub points: String,
    /// Infinitely near curves as "curve_mult:point_mult,...".
    #[arg(long, default_value = "")]
    pub near: String,
}

/// Failures reported by a command. Usage errors are handled by clap.
#[derive(Debug)]
pub enum CliError {
    Domain(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

impl CliError {
    pub fn to_json(&self) -> Value {
        let (kind, message) = match self {
            CliError::Domain(e) => (e.kind(), e.to_string()),
            CliError::Io(m) => ("Io", m.clone()),
        };
        json!({ "error": { "kind": kind, "message": message } })
    }
}

type CmdResult = Result<(), CliError>;

/// Parses `argv` and runs the command. Returns the process exit code: 0 on
/// success, 1 on domain errors (reported as JSON on `out`), 2 on usage errors.
pub fn run<I, T>(argv: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    let mut ctx = Ctx { stdin, out, stdin_used: false };
    let result = match &cli.command {
        Command::Factor(a) => ctx.factor(a),
        Command::Check(a) => ctx.check(a),
        Command::Degree(a) => ctx.degree(a),
        Command::Compose(a) => ctx.compose(a),
        Command::Corpus(a) => ctx.corpus(a),
        Command::Fano3(a) => ctx.fano3(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(ctx.out, "{}", e.to_json());
            1
        }
    }
}

struct Ctx<'a> {
    stdin: &'a mut dyn Read,
    out: &'a mut dyn Write,
    stdin_used: bool,
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Io(e.to_string())
}

fn parse_type(text: &str) -> Result<HomaloidalType, CliError> {
    Ok(text.parse::<HomaloidalType>()?)
}

fn trace_json(input: &HomaloidalType, trace: &LinkTrace) -> Value {
    json!({
        "input": input.to_json(),
        "trace": trace.to_json(),
    })
}

fn trace_text(trace: &LinkTrace) -> String {
    let mut s = format!("{}: {} links\n", trace.input, trace.steps.len());
    for (i, step) in trace.steps.iter().enumerate() {
        let center = step.link.center().map(|c| format!(" at {c}")).unwrap_or_default();
        s += &format!(
            "{:>3}. {}{center} -> {}  degree {}\n",
            i + 1,
            step.link.name(),
            step.state_after.summary(),
            step.degree
        );
    }
    s
}

fn parse_pairs(text: &str, what: &str) -> Result<Vec<(String, String)>, CliError> {
    list(text)
        .map(|item| {
            item.split_once(':')
                .map(|(a, b)| (a.trim().to_string(), b.trim().to_string()))
                .ok_or_else(|| Error::Parse(format!("expected \"x:y\" in {what}, got {item:?}")).into())
        })
        .collect()
}

fn list(text: &str) -> impl Iterator<Item = &str> {
    text.split(',').map(str::trim).filter(|s| !s.is_empty())
}

impl Ctx<'_> {
    fn emit(&mut self, text: &str) -> CmdResult {
        self.out.write_all(text.as_bytes()).map_err(io_err)
    }

    fn emit_json(&mut self, v: &impl serde::Serialize) -> CmdResult {
        let line = serde_json::to_string(v).map_err(|e| CliError::Io(e.to_string()))?;
        writeln!(self.out, "{line}").map_err(io_err)
    }

    fn read_source(&mut self, path: &str) -> Result<String, CliError> {
        if path == "-" {
            if self.stdin_used {
                return Err(Error::InvalidInput("stdin can be read only once".into()).into());
            }
            self.stdin_used = true;
            let mut s = String::new();
            self.stdin.read_to_string(&mut s).map_err(io_err)?;
            Ok(s)
        } else {
            fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))
        }
    }

    fn read_map(&mut self, path: &str) -> Result<RationalMap, CliError> {
        let text = self.read_source(path)?;
        let j: RationalMapJson = serde_json::from_str(&text)
            .map_err(|e| Error::Parse(format!("{path}: not a map JSON object: {e}")))?;
        Ok(RationalMap::from_json(&j)?)
    }

    fn factor(&mut self, a: &FactorArgs) -> CmdResult {
        let map = a.map.as_deref().map(|p| self.read_map(p)).transpose()?;
        let ty = match (&map, &a.ty) {
            (Some(m), _) => homaloidal_type_of(m)?,
            (None, Some(t)) => parse_type(t)?,
            (None, None) => unreachable!("clap requires --type or --map"),
        };
        let trace = factorize(&ty)?;
        let mut verify = None;
        if a.verify {
            let back = recompose(&trace)?;
            if back != ty {
                return Err(Error::InternalInvariantViolation(format!(
                    "recomposition gave {back}, expected {ty}"
                ))
                .into());
            }
            let mut v = json!({ "recompose": true });
            if let Some(m) = &map {
                let factors = factor_by_quadratics(m)?;
                let linear = residual_linear(m, &factors)?;
                if linear.is_none() {
                    return Err(Error::InternalInvariantViolation(
                        "quadratic factors do not compose to a linear map".into(),
                    )
                    .into());
                }
                let centers: Vec<Vec<String>> = factors
                    .iter()
                    .map(|f| f.centers.iter().map(format_point).collect())
                    .collect();
                v["polynomial"] = json!({ "quadratic_factors": centers, "linear_residual": true });
            }
            verify = Some(v);
        }
        if a.json {
            let mut v = trace_json(&ty, &trace);
            if let Some(ver) = verify {
                v["verify"] = ver;
            }
            self.emit_json(&v)
        } else {
            let mut s = trace_text(&trace);
            if let Some(ver) = verify {
                s += "verified: recomposition matches the input";
                if let Some(p) = ver.get("polynomial") {
                    let k = p["quadratic_factors"].as_array().map_or(0, Vec::len);
                    s += &format!("; {k} quadratic factor(s) leave a linear map");
                }
                s.push('\n');
            }
            self.emit(&s)
        }
    }

    fn check(&mut self, a: &TypeArgs) -> CmdResult {
        let t = parse_type(&a.ty)?;
        let (sq, lin) = t.residuals();
        let noether = t.noether_inequality().ok();
        if a.json {
            return self.emit_json(&json!({
                "type": t.to_string(),
                "noether_inequality": noether,
                "sum_of_squares": { "holds": sq == 0.into(), "residual": sq.to_string() },
                "sum": { "holds": lin == 0.into(), "residual": lin.to_string() },
                "homaloidal": t.validate(),
            }));
        }
        let verdict = |ok: bool| if ok { "holds" } else { "fails" };
        let noether_text = match noether {
            Some(ok) => verdict(ok).to_string(),
            None => "not applicable (n = 1)".to_string(),
        };
        let s = format!(
            "type {t}\nnu1+nu2+nu3 > n: {noether_text}\nsum nu^2 = n^2-1: {} (residual {sq})\nsum nu = 3n-3: {} (residual {lin})\n",
            verdict(sq == 0.into()),
            verdict(lin == 0.into()),
        );
        self.emit(&s)
    }

    fn degree(&mut self, a: &TypeArgs) -> CmdResult {
        let t = parse_type(&a.ty)?;
        let d = MarkedSystem::from_homaloidal(&t)?.sarkisov_degree();
        if a.json {
            self.emit_json(&json!({
                "mu": format_rational(&d.mu),
                "lambda": format_rational(&d.lambda),
                "e": d.e,
            }))
        } else {
            self.emit(&format!("{d}\n"))
        }
    }

    fn compose(&mut self, a: &ComposeArgs) -> CmdResult {
        if a.maps.len() < 2 {
            return Err(Error::InvalidInput("compose needs at least two --map arguments".into()).into());
        }
        let maps = a
            .maps
            .iter()
            .map(|p| self.read_map(p))
            .collect::<Result<Vec<_>, _>>()?;
        let mut acc = maps[0].clone();
        for g in &maps[1..] {
            acc = compose(g, &acc)?;
        }
        self.emit_json(&acc.to_json())
    }

    fn corpus(&mut self, a: &CorpusArgs) -> CmdResult {
        let entries = random_corpus(a.seed, a.k, a.height, a.max_degree)?;
        for e in &entries {
            self.emit_json(&e.to_json())?;
        }
        Ok(())
    }

    fn fano3(&mut self, a: &Fano3Args) -> CmdResult {
        let curves = parse_pairs(&a.curves, "--curves")?
            .into_iter()
            .map(|(d, m)| {
                let deg = d
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("bad curve degree {d:?}")))?;
                Ok((deg, parse_rational(&m)?))
            })
            .collect::<Result<Vec<(u64, Rational)>, CliError>>()?;
        let points = list(&a.points)
            .map(parse_rational)
            .collect::<Result<Vec<_>, _>>()?;
        let near = parse_pairs(&a.near, "--near")?
            .into_iter()
            .map(|(c, p)| Ok((parse_rational(&c)?, parse_rational(&p)?)))
            .collect::<Result<Vec<_>, CliError>>()?;
        let data = Fano3Data::new(a.n, a.r, a.hcube, curves, points, near)?;
        self.emit_json(&fano3_classify(&data))
    }
}
