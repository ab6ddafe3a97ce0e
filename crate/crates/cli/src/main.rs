//! `sigmak` — classify, integrate, plot and verify radial solutions of the
//! normalized sigma_k curvature equation.

mod portrait;
mod report;
mod sweep;
mod table;

use std::collections::HashMap;
use std::process::ExitCode;

use sigmak::classifier::{classify, classify_flat, orientation_inverted, xi_tt_sign_from_state, XiTtSign};
use sigmak::closed_forms::FlatFamily;
use sigmak::error::Error;
use sigmak::first_integral::conserved_h;
use sigmak::ode::{integrate, IntegrationConfig};
use sigmak::verify::{run_suite, Suite, Tolerances};
use sigmak::{Branch, LogState, MetricParams, SigmaSign};

const USAGE: &str = "\
sigmak — radial solutions of the normalized sigma_k curvature equation

USAGE:
  sigmak classify  -n N -k K --sign +|-|0 (--h H --branch +|- [--xi-tt-sign -|0|+]
                   | --xi XI --xi-t XIT | --family linear+|linear-|sinh|cosh [--t0 T0] [--c C])
                   [--format text|json]
  sigmak integrate -n N -k K --sign +|- --xi0 XI --xit0 XIT --out FILE
                   [--span S] [--tol T | --rel-tol R --abs-tol A] [--max-step H] [--xi-min LO] [--xi-max HI]
  sigmak portrait  -n N -k K --sign +|- --h-list H1,H2,... --out PREFIX
                   [--branch-list +,-] [--xi-range LO:HI] [--samples N] [--svg FILE]
  sigmak verify    [--suite all|conservation|closed-forms|exponents|classification]
                   [--seed N] [--format text|json]
  sigmak sweep     --out DIR [--n-list 3,4,...] [--k-list 2,3] [--sign-list +,-]
                   [--h-list H1,H2,...] [--branch-list +,-] [--threads N]

Exit codes: 0 success, 1 internal/check failure, 2 inadmissible or invalid input.
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match dispatch(&args) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("{USAGE}");
            ExitCode::from(2)
        }
        Err(CliError::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 1 })
        }
        Err(CliError::Io(e)) => {
            eprintln!("io error: {e}");
            ExitCode::from(1)
        }
    }
}

enum CliError {
    Usage(String),
    Core(Error),
    Io(std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

type CliResult = Result<ExitCode, CliError>;

fn dispatch(args: &[String]) -> CliResult {
    let Some(cmd) = args.first() else {
        return Err(CliError::Usage("missing subcommand".into()));
    };
    let flags = Flags::parse(&args[1..])?;
    match cmd.as_str() {
        "classify" => cmd_classify(flags),
        "integrate" => cmd_integrate(flags),
        "portrait" => cmd_portrait(flags),
        "verify" => cmd_verify(flags),
        "sweep" => cmd_sweep(flags),
        "help" | "--help" | "-h" => {
            println!("{USAGE}");
            Ok(ExitCode::SUCCESS)
        }
        other => Err(CliError::Usage(format!("unknown subcommand '{other}'"))),
    }
}

/// Minimal `--flag value` parser; every flag takes exactly one value.
struct Flags {
    values: HashMap<String, String>,
}

impl Flags {
    fn parse(args: &[String]) -> Result<Self, CliError> {
        let mut values = HashMap::new();
        let mut it = args.iter();
        while let Some(key) = it.next() {
            if !key.starts_with('-') {
                return Err(CliError::Usage(format!("unexpected argument '{key}'")));
            }
            let name = key.trim_start_matches('-').to_string();
            let Some(value) = it.next() else {
                return Err(CliError::Usage(format!("flag '{key}' needs a value")));
            };
            if values.insert(name, value.clone()).is_some() {
                return Err(CliError::Usage(format!("flag '{key}' given twice")));
            }
        }
        Ok(Flags { values })
    }

    fn get(&self, name: &str) -> Option<&str> {
        self.values.get(name).map(|s| s.as_str())
    }

    fn require(&self, name: &str) -> Result<&str, CliError> {
        self.get(name).ok_or_else(|| CliError::Usage(format!("missing required flag --{name}")))
    }

    fn parse_f64(&self, name: &str) -> Result<Option<f64>, CliError> {
        self.get(name)
            .map(|s| s.parse::<f64>().map_err(|_| CliError::Usage(format!("--{name}: not a number: '{s}'"))))
            .transpose()
    }

    fn parse_u32(&self, name: &str) -> Result<Option<u32>, CliError> {
        self.get(name)
            .map(|s| s.parse::<u32>().map_err(|_| CliError::Usage(format!("--{name}: not an integer: '{s}'"))))
            .transpose()
    }
}

fn parse_sign(s: &str) -> Result<SigmaSign, CliError> {
    match s {
        "+" | "+1" | "1" => Ok(SigmaSign::Positive),
        "-" | "-1" => Ok(SigmaSign::Negative),
        "0" => Ok(SigmaSign::Zero),
        other => Err(CliError::Usage(format!("--sign must be one of +, -, 0 (got '{other}')"))),
    }
}

fn parse_branch(s: &str) -> Result<Branch, CliError> {
    match s {
        "+" | "+1" | "1" => Ok(Branch::Positive),
        "-" | "-1" => Ok(Branch::Negative),
        other => Err(CliError::Usage(format!("--branch must be + or - (got '{other}')"))),
    }
}

fn parse_xi_tt_sign(s: &str) -> Result<XiTtSign, CliError> {
    match s {
        "+" | "+1" | "1" => Ok(XiTtSign::Positive),
        "-" | "-1" => Ok(XiTtSign::Negative),
        "0" => Ok(XiTtSign::Zero),
        other => Err(CliError::Usage(format!("--xi-tt-sign must be -, 0 or + (got '{other}')"))),
    }
}

fn params_from(flags: &Flags) -> Result<MetricParams, CliError> {
    let n = flags
        .parse_u32("n")?
        .ok_or_else(|| CliError::Usage("missing required flag -n".into()))?;
    let k = flags
        .parse_u32("k")?
        .ok_or_else(|| CliError::Usage("missing required flag -k".into()))?;
    let s = parse_sign(flags.require("sign")?)?;
    Ok(MetricParams::new(n, k, s)?)
}

fn cmd_classify(flags: Flags) -> CliResult {
    let params = params_from(&flags)?;
    let format = flags.get("format").unwrap_or("text");

    let (inputs, class, inverted) = if params.s == SigmaSign::Zero {
        let family_str = flags.require("family")?;
        let family = match family_str {
            "linear+" => FlatFamily::Linear { positive_slope: true },
            "linear-" | "linear" => FlatFamily::Linear { positive_slope: false },
            "sinh" => FlatFamily::Sinh,
            "cosh" => FlatFamily::Cosh,
            other => return Err(CliError::Usage(format!("--family must be linear+|linear-|sinh|cosh (got '{other}')"))),
        };
        let class = classify_flat(&params, family)?;
        let inputs = report::ReportInputs {
            n: params.n,
            k: params.k,
            sign: 0,
            h: None,
            branch: None,
            xi_tt_sign: None,
            xi: None,
            xi_t: None,
            family: Some(family_str.to_string()),
        };
        (inputs, class, false)
    } else if let (Some(xi), Some(xi_t)) = (flags.parse_f64("xi")?, flags.parse_f64("xi-t")?) {
        // Classify from an initial state: h, branch and the xi_tt sign are
        // computed rather than passed.
        let state = LogState::new(0.0, xi, xi_t);
        let fi = conserved_h(&state, &params)?;
        let xi_tt_sign = xi_tt_sign_from_state(&state, &params)?;
        let class = classify(&params, fi.h, fi.branch, Some(xi_tt_sign))?;
        let inverted = orientation_inverted(&state, &class);
        let inputs = report::ReportInputs {
            n: params.n,
            k: params.k,
            sign: params.s.as_i8(),
            h: Some(fi.h),
            branch: Some(fi.branch.as_i8()),
            xi_tt_sign: Some(xi_tt_sign.as_i8()),
            xi: Some(xi),
            xi_t: Some(xi_t),
            family: None,
        };
        (inputs, class, inverted)
    } else {
        let h = flags
            .parse_f64("h")?
            .ok_or_else(|| CliError::Usage("classify needs either --h/--branch or --xi/--xi-t".into()))?;
        let branch = parse_branch(flags.require("branch")?)?;
        let xi_tt_sign = flags.get("xi-tt-sign").map(parse_xi_tt_sign).transpose()?;
        let class = classify(&params, h, branch, xi_tt_sign)?;
        let inputs = report::ReportInputs {
            n: params.n,
            k: params.k,
            sign: params.s.as_i8(),
            h: Some(h),
            branch: Some(branch.as_i8()),
            xi_tt_sign: xi_tt_sign.map(|s| s.as_i8()),
            xi: None,
            xi_t: None,
            family: None,
        };
        (inputs, class, false)
    };

    let rep = report::build_report(&params, inputs, &class, inverted);
    match format {
        "json" => println!("{}", serde_json::to_string_pretty(&rep).expect("serializable")),
        "text" => print!("{}", report::render_text(&rep)),
        other => return Err(CliError::Usage(format!("--format must be text or json (got '{other}')"))),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_integrate(flags: Flags) -> CliResult {
    let params = params_from(&flags)?;
    let xi0 = flags
        .parse_f64("xi0")?
        .ok_or_else(|| CliError::Usage("missing required flag --xi0".into()))?;
    let xit0 = flags
        .parse_f64("xit0")?
        .ok_or_else(|| CliError::Usage("missing required flag --xit0".into()))?;
    let out = flags.require("out")?.to_string();
    let mut cfg = IntegrationConfig::default();
    if let Some(v) = flags.parse_f64("span")? {
        cfg.max_span = v;
    }
    // --tol sets both local tolerances at once; the explicit flags refine.
    if let Some(v) = flags.parse_f64("tol")? {
        cfg.rel_tol = v;
        cfg.abs_tol = v * 1e-2;
    }
    if let Some(v) = flags.parse_f64("rel-tol")? {
        cfg.rel_tol = v;
    }
    if let Some(v) = flags.parse_f64("abs-tol")? {
        cfg.abs_tol = v;
    }
    if let Some(v) = flags.parse_f64("max-step")? {
        cfg.max_step = v;
    }
    if let Some(v) = flags.parse_f64("xi-min")? {
        cfg.xi_min = v;
    }
    if let Some(v) = flags.parse_f64("xi-max")? {
        cfg.xi_max = v;
    }
    let traj = integrate(&LogState::new(0.0, xi0, xit0), &params, &cfg)?;
    std::fs::write(&out, table::render(&traj))?;
    println!("wrote {} samples to {out}", traj.samples.len());
    for e in &traj.events {
        println!("event: {}", table::event_summary(e));
    }
    println!("drift: {}", table::num(traj.drift));
    Ok(ExitCode::SUCCESS)
}

fn parse_f64_list(s: &str, flag: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("--{flag}: not a number: '{p}'"))))
        .collect()
}

fn cmd_portrait(flags: Flags) -> CliResult {
    let params = params_from(&flags)?;
    if params.s == SigmaSign::Zero {
        return Err(CliError::Usage("portraits are drawn for sign +1 or -1".into()));
    }
    let h_list = parse_f64_list(flags.require("h-list")?, "h-list")?;
    let out = flags.require("out")?.to_string();
    let branches: Vec<Branch> = match flags.get("branch-list") {
        None => vec![Branch::Positive, Branch::Negative],
        Some(s) => s
            .split(',')
            .map(|p| parse_branch(p.trim()))
            .collect::<Result<_, _>>()?,
    };
    let (xi_lo, xi_hi) = match flags.get("xi-range") {
        None => (-2.0, 3.0),
        Some(s) => {
            let parts: Vec<&str> = s.split(':').collect();
            if parts.len() != 2 {
                return Err(CliError::Usage("--xi-range expects LO:HI".into()));
            }
            let lo = parts[0].parse().map_err(|_| CliError::Usage("--xi-range: bad LO".into()))?;
            let hi = parts[1].parse().map_err(|_| CliError::Usage("--xi-range: bad HI".into()))?;
            (lo, hi)
        }
    };
    let samples = flags.parse_u32("samples")?.unwrap_or(800).max(16) as usize;

    let mut all = Vec::new();
    for &h in &h_list {
        for &branch in &branches {
            let curves = portrait::level_curves(&params, h, branch, xi_lo, xi_hi, samples);
            if curves.is_empty() {
                eprintln!("warning: no admissible points for h = {h}, branch {branch}");
            }
            all.extend(curves);
        }
    }
    if all.is_empty() {
        eprintln!("warning: empty admissible set; writing an empty curve file");
        std::fs::write(format!("{out}_c000.csv"), "# sigmak phase-portrait curve\n# (empty admissible set)\nxi,xi_t\n")?;
    }
    for (i, curve) in all.iter().enumerate() {
        let path = format!("{out}_c{i:03}.csv");
        std::fs::write(&path, portrait::render_curve_csv(&params, curve))?;
    }
    println!("wrote {} curve files with prefix {out}", all.len().max(1));
    if let Some(svg_path) = flags.get("svg") {
        std::fs::write(svg_path, portrait::render_svg(&params, &all, xi_lo, xi_hi))?;
        println!("wrote {svg_path}");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(flags: Flags) -> CliResult {
    let suite = Suite::parse(flags.get("suite").unwrap_or("all"))?;
    let seed = flags
        .get("seed")
        .map(|s| s.parse::<u64>().map_err(|_| CliError::Usage(format!("--seed: not an integer: '{s}'"))))
        .transpose()?
        .unwrap_or(42);
    let format = flags.get("format").unwrap_or("text");
    let results = run_suite(suite, seed, &Tolerances::default());
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
    match format {
        "json" => {
            let items: Vec<serde_json::Value> = results
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "name": r.name,
                        "passed": r.passed,
                        "detail": r.detail,
                    })
                })
                .collect();
            let doc = serde_json::json!({
                "suite": flags.get("suite").unwrap_or("all"),
                "seed": seed,
                "passed": failed.is_empty(),
                "checks": items,
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
        }
        "text" => {
            for r in &results {
                println!("{} {} — {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
            }
            println!("{} checks, {} failed", results.len(), failed.len());
        }
        other => return Err(CliError::Usage(format!("--format must be text or json (got '{other}')"))),
    }
    if failed.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("first failing check: {}", failed[0]);
        Ok(ExitCode::FAILURE)
    }
}

fn parse_u32_list(s: &str, flag: &str) -> Result<Vec<u32>, CliError> {
    s.split(',')
        .map(|p| p.trim().parse::<u32>().map_err(|_| CliError::Usage(format!("--{flag}: not an integer: '{p}'"))))
        .collect()
}

fn cmd_sweep(flags: Flags) -> CliResult {
    let out = std::path::PathBuf::from(flags.require("out")?);
    let n_list = flags.get("n-list").map(|s| parse_u32_list(s, "n-list")).transpose()?;
    let k_list = flags.get("k-list").map(|s| parse_u32_list(s, "k-list")).transpose()?;
    let sign_list = flags
        .get("sign-list")
        .map(|s| {
            s.split(',')
                .map(|p| parse_sign(p.trim()))
                .collect::<Result<Vec<_>, _>>()
        })
        .transpose()?;
    let h_list = flags.get("h-list").map(|s| parse_f64_list(s, "h-list")).transpose()?;
    let branch_list = flags
        .get("branch-list")
        .map(|s| {
            s.split(',')
                .map(|p| parse_branch(p.trim()))
                .collect::<Result<Vec<_>, _>>()
        })
        .transpose()?;
    let threads = match flags.parse_u32("threads")? {
        Some(v) => v as usize,
        None => std::env::var("SIGMAK_THREADS")
            .ok()
            .and_then(|s| s.parse::<usize>().ok())
            .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
    };
    let cells = sweep::grid(
        n_list.as_deref(),
        k_list.as_deref(),
        sign_list.as_deref(),
        h_list.as_deref(),
        branch_list.as_deref(),
    );
    if cells.is_empty() {
        return Err(CliError::Usage("the requested grid is empty".into()));
    }
    let outcomes = sweep::run(&cells, threads);
    let (_, counts) = sweep::write_outputs(&out, &outcomes)?;
    let classified: usize = counts.values().sum();
    let inadmissible = outcomes
        .iter()
        .filter(|o| matches!(o.result, sweep::CellResult::Inadmissible(_)))
        .count();
    let failed = outcomes
        .iter()
        .filter(|o| matches!(o.result, sweep::CellResult::Failed(_)))
        .count();
    println!("swept {} cells: {classified} classified, {inadmissible} inadmissible, {failed} failed", cells.len());
    println!("cases:");
    for (case, count) in &counts {
        println!("  {case}: {count}");
    }
    println!("summary: {}", out.join("summary.csv").display());
    Ok(ExitCode::SUCCESS)
}
