//! Command-line front end. [`run`] never exits the process; the binary maps
//! [`CommandResult::code`] to the exit status.

use std::collections::BTreeMap;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::catalog::Catalog;
use crate::error::{Error, Result};
use crate::eval::{is_zero_sampled, SampleConfig};
use crate::numeric::{constancy_check, NumericConfig};
use crate::ode::{construct_family, shape_classify, Family, FamilyParams, RationalODE};
use crate::parse::{is_equation, parse_expr, parse_value};
use crate::ratfun::RationalFunction as RF;
use crate::reduce::{reduce_by_roots, split_to_normal_form};
use crate::solve::{residual, solve_ail};
use crate::transform::{invert_xy, Transform};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct CommandResult {
    pub code: i32,
    pub payload: String,
}

#[derive(Parser, Debug)]
#[command(name = "abelkit", version, about = "Exact manipulation of Abel equations and their integrable classes")]
struct Cli {
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for sampled zero tests.
    #[arg(long, global = true, default_value_t = 0x5eed)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Parse an expression or equation and print its canonical form.
    Parse { expr: String },
    /// Report the structural classes of an equation.
    Form { ode: String },
    /// Build a member of a named family.
    Construct {
        family: String,
        #[arg(long, default_value = "")]
        set: String,
    },
    /// Apply a change of variables given as JSON (or @file).
    Transform {
        ode: String,
        #[arg(long)]
        spec: String,
    },
    /// Swap the roles of x and y.
    Invert { ode: String },
    /// Move the roots of the numerator cubic to infinity, 0 and 1.
    Reduce {
        ode: String,
        /// Roots of the cubic when they are not in Q(i).
        #[arg(long)]
        roots: Option<String>,
    },
    /// Map an AIL8 member to its AIL4/AIL2/AIL1 normal form.
    Split {
        #[arg(long, default_value = "AIL8")]
        family: String,
        #[arg(long, default_value = "")]
        set: String,
        /// Refuse to introduce radicals.
        #[arg(long)]
        strict: bool,
    },
    /// First integral of an AIL8 member.
    SolveAil {
        #[arg(long, default_value = "")]
        set: String,
    },
    /// Check that psi is constant along solutions.
    Verify {
        ode: String,
        #[arg(long)]
        psi: String,
    },
    /// Replay catalog derivations.
    Fit {
        id: Option<String>,
        #[arg(long)]
        all: bool,
    },
    /// Integrate numerically and measure the drift of psi.
    NumericCheck {
        ode: String,
        #[arg(long)]
        psi: String,
        /// Start point `x0,y0`.
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        /// Largest accepted relative drift.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Write the sampled trajectory as CSV.
        #[arg(long)]
        csv: Option<std::path::PathBuf>,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Verification(_) => EXIT_MISMATCH,
        Error::Numeric(_) => EXIT_NUMERIC,
        _ => EXIT_USAGE,
    }
}

struct Out {
    code: i32,
    text: String,
    json: Value,
}

impl Out {
    fn ok(text: impl Into<String>, json: Value) -> Self {
        Out { code: EXIT_OK, text: text.into(), json }
    }
}

fn split_top(s: &str) -> Vec<&str> {
    let mut depth = 0i32;
    let mut start = 0;
    let mut parts = Vec::new();
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(s[start..].trim());
    parts.retain(|p| !p.is_empty());
    parts
}

/// Parses `k=v,k=v`; commas inside parentheses belong to the value.
pub fn parse_settings(s: &str) -> Result<FamilyParams> {
    let mut out = BTreeMap::new();
    for part in split_top(s) {
        let (k, v) = part.split_once('=').ok_or_else(|| Error::Invalid(format!("expected name=value, got `{part}`")))?;
        out.insert(k.trim().to_string(), parse_value(v)?);
    }
    Ok(out)
}

fn read_spec(s: &str) -> Result<Value> {
    let text = match s.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{path}: {e}")))?,
        None => s.to_string(),
    };
    serde_json::from_str(&text).map_err(|e| Error::Invalid(format!("transform spec: {e}")))
}

fn ode_json(e: &RationalODE) -> Value {
    let mut v = e.to_json();
    v["equation"] = Value::String(e.to_string());
    v
}

fn params_json(p: &FamilyParams) -> Value {
    Value::Object(p.iter().map(|(k, v)| (k.clone(), Value::String(v.to_string()))).collect())
}

fn cmd_verify(e: &RationalODE, psi: &RF, seed: u64) -> Result<Out> {
    let res = residual(e, psi);
    let check = if res.is_zero() {
        Some("exact")
    } else if is_zero_sampled(&res, &SampleConfig { points: 12, seed, ..SampleConfig::default() })?.zero {
        Some("sampled")
    } else {
        None
    };
    let json = json!({"equation": e.to_string(), "psi": psi.to_string(), "verified": check.is_some(), "check": check});
    Ok(match check {
        Some(c) => Out::ok(format!("verified ({c})"), json),
        None => Out { code: EXIT_MISMATCH, text: format!("not a first integral; residual {res}"), json },
    })
}

fn cmd_fit(id: Option<String>, all: bool) -> Result<Out> {
    let cat = Catalog::load()?;
    let mut ids: Vec<String> = match (id, all) {
        (Some(id), false) => vec![id],
        (None, true) => cat.entries.iter().map(|e| e.id.clone()).collect(),
        _ => return Err(Error::Invalid("give exactly one of <id> or --all".into())),
    };
    ids.sort();
    let reports: Vec<Result<(String, String, bool, Value)>> = ids
        .par_iter()
        .map(|id| {
            let r = cat.verify_fit(id)?;
            let class = cat.get(id)?.class.to_string();
            let mut j = r.to_json();
            j["class"] = Value::String(class.clone());
            j["result"] = Value::String(r.result.to_string());
            Ok((id.clone(), class, r.identity, j))
        })
        .collect();
    let mut lines = Vec::new();
    let mut rows = Vec::new();
    let mut good = 0;
    for r in reports {
        let (id, class, ok, j) = r?;
        good += ok as usize;
        lines.push(format!("{id:<16} {class:<4} {}", if ok { "verified" } else { "MISMATCH" }));
        rows.push(j);
    }
    lines.push(format!("{good}/{} identities verified", rows.len()));
    let code = if good == rows.len() { EXIT_OK } else { EXIT_MISMATCH };
    Ok(Out { code, text: lines.join("\n"), json: json!({"verified": good, "total": rows.len(), "entries": rows}) })
}

fn cmd_numeric(ode: &RationalODE, psi: &RF, from: &str, to: f64, tol: f64, csv: Option<&std::path::Path>) -> Result<Out> {
    let (a, b) = from.split_once(',').ok_or_else(|| Error::Invalid("--from expects x0,y0".into()))?;
    let num = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Invalid(format!("`{s}`: {e}")));
    let (x0, y0) = (num(a)?, num(b)?);
    let cfg = NumericConfig { drift_tol: tol, ..Default::default() };
    let report = constancy_check(ode, psi, x0, y0, to, &cfg).map_err(|e| match e {
        Error::Singular(m) | Error::Unsupported(m) => Error::Numeric(m),
        other => other,
    })?;
    if let Some(path) = csv {
        std::fs::write(path, report.to_csv()).map_err(|e| Error::Numeric(format!("{}: {e}", path.display())))?;
    }
    let tr = &report.trajectory;
    let code = if !tr.completed() {
        EXIT_NUMERIC
    } else if report.passed() {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    };
    let text = format!(
        "max drift {:.3e} (tolerance {:.1e}) over {} steps, {} rejected{}",
        report.max_drift,
        tol,
        tr.stats.steps,
        tr.stats.rejected,
        if tr.completed() { String::new() } else { format!("; stopped at x = {}", tr.last().0) }
    );
    Ok(Out { code, text, json: report.to_json() })
}

fn dispatch(cli: Cli) -> Result<Out> {
    let seed = cli.seed;
    match cli.cmd {
        Cmd::Parse { expr } => {
            if is_equation(&expr) {
                let e = RationalODE::parse(&expr)?;
                return Ok(Out::ok(e.to_string(), ode_json(&e)));
            }
            let tree = parse_expr(&expr)?;
            let v = tree.normalize()?;
            Ok(Out::ok(v.to_string(), json!({"expression": tree.to_string(), "canonical": v.to_string()})))
        }
        Cmd::Form { ode } => {
            let e = RationalODE::parse(&ode)?;
            let r = shape_classify(&e);
            let tags: Vec<&str> = r.tags.iter().map(|s| s.tag()).collect();
            let mut text = tags.join(" ");
            for (k, v) in &r.slots {
                text.push_str(&format!("\n  {k} = {v}"));
            }
            Ok(Out::ok(text, r.to_json()))
        }
        Cmd::Construct { family, set } => {
            let fam = Family::from_name(&family)?;
            let e = construct_family(fam, &parse_settings(&set)?)?;
            Ok(Out::ok(e.to_string(), ode_json(&e)))
        }
        Cmd::Transform { ode, spec } => {
            let t = Transform::from_json(&read_spec(&spec)?)?;
            let e = t.apply(&RationalODE::parse(&ode)?)?;
            let mut j = ode_json(&e);
            j["transform"] = t.to_json();
            Ok(Out::ok(e.to_string(), j))
        }
        Cmd::Invert { ode } => {
            let e = invert_xy(&RationalODE::parse(&ode)?)?;
            Ok(Out::ok(e.to_string(), ode_json(&e)))
        }
        Cmd::Reduce { ode, roots } => {
            let e = RationalODE::parse(&ode)?;
            let roots = match roots {
                Some(s) => {
                    let v = split_top(&s).into_iter().map(parse_value).collect::<Result<Vec<_>>>()?;
                    Some(<[RF; 3]>::try_from(v).map_err(|_| Error::Invalid("--roots expects three values".into()))?)
                }
                None => None,
            };
            let (r, t, prof) = reduce_by_roots(&e, roots)?;
            let roots: Vec<String> = prof.roots.iter().map(|v| v.to_string()).collect();
            let j = json!({"equation": r.to_string(), "reduced": ode_json(&r), "transform": t.to_json(),
                "roots": roots, "pattern": format!("{:?}", prof.pattern)});
            Ok(Out::ok(format!("{r}\n  via {t}"), j))
        }
        Cmd::Split { family, set, strict } => {
            if Family::from_name(&family)? != Family::Ail8 {
                return Err(Error::Invalid("split works on AIL8 members".into()));
            }
            let s = split_to_normal_form(&parse_settings(&set)?, strict)?;
            let mut text = s.normal_form.to_string();
            if let Some(t) = s.target()? {
                text.push_str(&format!(": {t}"));
            }
            let mut j = s.to_json();
            if let Some(t) = s.target()? {
                j["target"] = ode_json(&t);
            }
            Ok(Out::ok(text, j))
        }
        Cmd::SolveAil { set } => {
            let p = parse_settings(&set)?;
            let fi = solve_ail(&p)?;
            let mut j = fi.to_json();
            j["params"] = params_json(&p);
            Ok(Out::ok(format!("{}\n  {} ({})", fi.psi, fi.method.tag(), fi.check), j))
        }
        Cmd::Verify { ode, psi } => cmd_verify(&RationalODE::parse(&ode)?, &parse_value(&psi)?, seed),
        Cmd::Fit { id, all } => cmd_fit(id, all),
        Cmd::NumericCheck { ode, psi, from, to, tol, csv } => {
            cmd_numeric(&RationalODE::parse(&ode)?, &parse_value(&psi)?, &from, to, tol, csv.as_deref())
        }
    }
}

/// Runs one command line (`argv[0]` is the program name).
pub fn run<I, T>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            return CommandResult { code, payload: e.render().to_string() };
        }
    };
    let as_json = cli.json;
    match dispatch(cli) {
        Ok(out) if as_json => CommandResult { code: out.code, payload: pretty(&out.json) },
        Ok(out) => CommandResult { code: out.code, payload: out.text },
        Err(e) if as_json => {
            CommandResult { code: exit_code(&e), payload: pretty(&json!({"error": e.to_string(), "code": exit_code(&e)})) }
        }
        Err(e) => CommandResult { code: exit_code(&e), payload: format!("error: {e}") },
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}
