//! Command-line front end.
//!
//! Exit codes: `0` success or pass, `1` inconclusive certificate or failed
//! audit, `2` usage or validation error, `3` no characteristic value found.

use std::collections::HashMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bounds::{
    bound_report, max_abs_green, sweep_problems, KiraneThreshold, SStarLocation, SweepRow,
};
use crate::error::{Error, Result};
use crate::format::sig17;
use crate::green::{g1_raw, g2_raw};
use crate::ingest::{certify, load_q_csv_path, Verdict};
use crate::oracle::{check_branch_signs, closed_grid, fd_check_h_derivatives, grid_max_abs_green};
use crate::problem::{ExtendedReal, Problem};
use crate::spectral::{discretization_slack, gap_of, smallest_characteristic_value, ScanOptions};
use crate::sweep::{linspace, standard_alphas, with_thread_cap, STANDARD_LENGTHS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INCONCLUSIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NO_SIGN_CHANGE: i32 = 3;

/// Oracle and closed form must agree to this.
pub const AUDIT_MAX_TOL: f64 = 1e-9;
/// Central differences of `h1`, `h2` must match `h'` to this.
pub const AUDIT_FD_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(
    name = "cflk",
    version,
    about = "Green's-function bounds and Lyapunov thresholds for the Caputo-Fabrizio two-point problem"
)]
pub struct Cli {
    /// Optional `key=value` file; flags override its entries.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Write output here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, value_enum, global = true)]
    pub format: Option<OutputFormat>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        <OutputFormat as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Args, Clone, Default)]
pub struct ProblemArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct SweepArgs {
    #[arg(long)]
    pub alpha_min: Option<f64>,
    #[arg(long)]
    pub alpha_max: Option<f64>,
    #[arg(long)]
    pub alpha_steps: Option<usize>,
    #[arg(long)]
    pub length_min: Option<f64>,
    #[arg(long)]
    pub length_max: Option<f64>,
    #[arg(long)]
    pub length_steps: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Regime, max |G|, corrected and original thresholds, s*.
    Bound(ProblemArgs),
    /// Kernel samples `t,s,G,branch` for plotting.
    GreenGrid {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Oracle audit of the closed forms; a single point when --alpha is given.
    Audit {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        sweep: SweepArgs,
        /// Oracle grid resolution.
        #[arg(long)]
        oracle_n: Option<usize>,
        #[arg(long)]
        sign_n: Option<usize>,
        #[arg(long)]
        fd_n: Option<usize>,
        #[arg(long)]
        fd_eps: Option<f64>,
    },
    /// Smallest characteristic value for constant potential.
    Eigen {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Nyström node count.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        lambda_max: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        ratio: Option<f64>,
    },
    /// Nonexistence certificate for a sampled potential.
    Certify {
        #[command(flatten)]
        problem: ProblemArgs,
        /// CSV with header `t,q`.
        #[arg(long)]
        q: Option<PathBuf>,
    },
    /// Threshold sweep across the singularity of the original bound.
    Counterexample {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        sweep: SweepArgs,
        /// Relative half-width of the default window around the critical length.
        #[arg(long)]
        span: Option<f64>,
    },
}

/// Merged view of flags over an optional config file.
struct Settings {
    file: HashMap<String, String>,
}

impl Settings {
    fn load(path: Option<&PathBuf>) -> Result<Self> {
        let mut file = HashMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                    line: i as u64 + 1,
                    message: format!("expected key=value, got {line:?}"),
                })?;
                file.insert(k.trim().replace('-', "_"), v.trim().to_string());
            }
        }
        Ok(Settings { file })
    }

    fn value<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|_| Error::Parse {
                line: 0,
                message: format!("config key {key}: cannot parse {raw:?}"),
            }),
        }
    }

    fn or<T: std::str::FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T> {
        Ok(self.value(flag, key)?.unwrap_or(default))
    }

    fn problem(&self, args: &ProblemArgs) -> Result<Option<Problem>> {
        let alpha = self.value(args.alpha, "alpha")?;
        let a = self.value(args.a, "a")?;
        let b = self.value(args.b, "b")?;
        match (alpha, b) {
            (None, None) if a.is_none() => Ok(None),
            (Some(alpha), Some(b)) => Problem::new(alpha, a.unwrap_or(0.0), b).map(Some),
            _ => Err(Error::InvalidProblem(
                "both --alpha and --b are required".into(),
            )),
        }
    }

    fn required_problem(&self, args: &ProblemArgs) -> Result<Problem> {
        self.problem(args)?
            .ok_or_else(|| Error::InvalidProblem("--alpha and --b are required".into()))
    }

    fn range(
        &self,
        min: Option<f64>,
        max: Option<f64>,
        steps: Option<usize>,
        key: &str,
    ) -> Result<Option<Vec<f64>>> {
        let min = self.value(min, &format!("{key}_min"))?;
        let max = self.value(max, &format!("{key}_max"))?;
        let steps = self.value(steps, &format!("{key}_steps"))?;
        match (min, max, steps) {
            (None, None, None) => Ok(None),
            (Some(lo), Some(hi), steps) => {
                let steps = steps.unwrap_or(if lo == hi { 1 } else { 11 });
                if steps < 1 || hi < lo {
                    return Err(Error::InvalidGrid(vec![format!(
                        "{key} range [{lo}, {hi}] with {steps} steps"
                    )]));
                }
                Ok(Some(linspace(lo, hi, steps)))
            }
            _ => Err(Error::InvalidGrid(vec![format!(
                "--{key}-min and --{key}-max must be given together"
            )])),
        }
    }
}

fn extended(x: ExtendedReal) -> String {
    match x {
        ExtendedReal::Finite(v) => sig17(v),
        ExtendedReal::Unbounded => "UNBOUNDED".into(),
    }
}

fn kirane_text(k: KiraneThreshold) -> String {
    match k {
        KiraneThreshold::Finite(v) => sig17(v),
        KiraneThreshold::Singular => "SINGULAR".into(),
    }
}

fn json_value(text: &str) -> String {
    if text.parse::<f64>().is_ok() {
        text.to_string()
    } else {
        format!("\"{text}\"")
    }
}

fn emit(
    out: &mut dyn Write,
    format: OutputFormat,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
            w.write_record(header)
                .map_err(|e| Error::Io(e.to_string()))?;
            for row in rows {
                w.write_record(row).map_err(|e| Error::Io(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
            out.write_all(&bytes)?;
        }
        OutputFormat::Json => {
            let objects: Vec<String> = rows
                .iter()
                .map(|row| {
                    let fields: Vec<String> = header
                        .iter()
                        .zip(row)
                        .map(|(k, v)| format!("\"{k}\":{}", json_value(v)))
                        .collect();
                    format!("{{{}}}", fields.join(","))
                })
                .collect();
            writeln!(out, "[{}]", objects.join(","))?;
        }
    }
    Ok(())
}

pub const SWEEP_HEADER: [&str; 6] = [
    "alpha",
    "length",
    "regime",
    "max_abs_green",
    "lyapunov_threshold",
    "kirane_threshold",
];

pub fn sweep_row_fields(r: &SweepRow) -> Vec<String> {
    vec![
        sig17(r.alpha),
        sig17(r.length),
        r.regime.to_string(),
        sig17(r.max_abs_green),
        sig17(r.lyapunov_threshold),
        kirane_text(r.kirane_threshold),
    ]
}

fn cmd_bound(p: &Problem, format: OutputFormat, out: &mut dyn Write) -> Result<i32> {
    let r = bound_report(p);
    let (s_star, inside) = match r.s_star {
        SStarLocation::Inside(s) => (sig17(s), "true"),
        SStarLocation::Outside(s) => (sig17(s), "false"),
        SStarLocation::Unbounded => ("UNBOUNDED".into(), "false"),
    };
    let header = [
        "alpha",
        "a",
        "b",
        "regime",
        "critical_length",
        "max_abs_green",
        "lyapunov_threshold",
        "kirane_threshold",
        "s_star",
        "s_star_inside",
    ];
    let row = vec![
        sig17(p.alpha()),
        sig17(p.a()),
        sig17(p.b()),
        r.regime.kind.to_string(),
        extended(r.regime.critical_length),
        sig17(r.max_abs_green),
        sig17(r.lyapunov_threshold),
        kirane_text(r.kirane_threshold),
        s_star,
        inside.to_string(),
    ];
    emit(out, format, &header, &[row])?;
    Ok(EXIT_OK)
}

fn cmd_green_grid(p: &Problem, n: usize, format: OutputFormat, out: &mut dyn Write) -> Result<i32> {
    if n < 2 {
        return Err(Error::InvalidGrid(vec![format!("resolution {n} < 2")]));
    }
    let nodes = closed_grid(p.a(), p.b(), n);
    let mut rows = Vec::with_capacity(n * (n + 1));
    for (i, &t) in nodes.iter().enumerate() {
        for (j, &s) in nodes.iter().enumerate() {
            if j <= i {
                rows.push(vec![
                    sig17(t),
                    sig17(s),
                    sig17(g1_raw(p, t, s)),
                    "g1".into(),
                ]);
            }
            if j >= i {
                rows.push(vec![
                    sig17(t),
                    sig17(s),
                    sig17(g2_raw(p, t, s)),
                    "g2".into(),
                ]);
            }
        }
    }
    emit(out, format, &["t", "s", "G", "branch"], &rows)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Clone, Copy)]
pub struct AuditSettings {
    pub oracle_n: usize,
    pub sign_n: usize,
    pub fd_n: usize,
    pub fd_eps: f64,
}

impl Default for AuditSettings {
    fn default() -> Self {
        AuditSettings {
            oracle_n: 512,
            sign_n: 256,
            fd_n: 128,
            fd_eps: 1e-5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AuditOutcome {
    pub problem: Problem,
    pub closed_form: f64,
    pub oracle: crate::oracle::GridMaxResult,
    pub sign: crate::oracle::SignAudit,
    pub fd_discrepancy: f64,
}

impl AuditOutcome {
    pub fn max_diff(&self) -> f64 {
        (self.oracle.max_abs - self.closed_form).abs()
    }

    pub fn passed(&self) -> bool {
        self.max_diff() <= AUDIT_MAX_TOL
            && self.sign.passed()
            && self.fd_discrepancy <= AUDIT_FD_TOL
    }

    fn fields(&self) -> Vec<String> {
        vec![
            sig17(self.problem.alpha()),
            sig17(self.problem.length()),
            self.problem.regime().kind.to_string(),
            sig17(self.closed_form),
            sig17(self.oracle.max_abs),
            sig17(self.oracle.arg_t),
            sig17(self.oracle.arg_s),
            self.oracle.branch.label().to_string(),
            sig17(self.max_diff()),
            self.sign.violations().to_string(),
            sig17(self.sign.worst()),
            sig17(self.fd_discrepancy),
            self.passed().to_string(),
        ]
    }
}

const AUDIT_HEADER: [&str; 13] = [
    "alpha",
    "length",
    "regime",
    "closed_form_max",
    "oracle_max",
    "oracle_t",
    "oracle_s",
    "oracle_branch",
    "max_diff",
    "sign_violations",
    "sign_worst",
    "fd_discrepancy",
    "pass",
];

/// Audits one problem against the supplied closed form for `max |G|`.
pub fn audit_point(
    p: &Problem,
    s: &AuditSettings,
    closed_form: &dyn Fn(&Problem) -> f64,
) -> AuditOutcome {
    AuditOutcome {
        problem: *p,
        closed_form: closed_form(p),
        oracle: grid_max_abs_green(p, s.oracle_n),
        sign: check_branch_signs(p, s.sign_n),
        fd_discrepancy: fd_check_h_derivatives(p, s.fd_n, s.fd_eps),
    }
}

pub fn run_audit(
    problems: &[Problem],
    s: &AuditSettings,
    closed_form: &dyn Fn(&Problem) -> f64,
) -> Vec<AuditOutcome> {
    problems
        .iter()
        .map(|p| audit_point(p, s, closed_form))
        .collect()
}

fn cmd_audit(
    problems: &[Problem],
    s: &AuditSettings,
    format: OutputFormat,
    out: &mut dyn Write,
) -> Result<i32> {
    let outcomes = run_audit(problems, s, &max_abs_green);
    let rows: Vec<Vec<String>> = outcomes.iter().map(AuditOutcome::fields).collect();
    emit(out, format, &AUDIT_HEADER, &rows)?;
    Ok(if outcomes.iter().all(AuditOutcome::passed) {
        EXIT_OK
    } else {
        EXIT_INCONCLUSIVE
    })
}

fn cmd_eigen(
    p: &Problem,
    n: usize,
    opts: &ScanOptions,
    format: OutputFormat,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    match smallest_characteristic_value(p, n, opts) {
        Ok(cv) => {
            let header = [
                "alpha",
                "a",
                "b",
                "n",
                "lambda_star",
                "bracket_lo",
                "bracket_hi",
                "det_residual",
                "lyapunov_threshold",
                "gap",
                "slack",
                "u_a",
                "u_b",
            ];
            let row = vec![
                sig17(p.alpha()),
                sig17(p.a()),
                sig17(p.b()),
                n.to_string(),
                sig17(cv.lambda_star),
                sig17(cv.bracket.0),
                sig17(cv.bracket.1),
                sig17(cv.det_residual),
                sig17(crate::bounds::lyapunov_threshold(p)),
                sig17(gap_of(p, &cv)),
                sig17(discretization_slack(p, n)),
                sig17(cv.extend(p, p.a())),
                sig17(cv.extend(p, p.b())),
            ];
            emit(out, format, &header, &[row])?;
            Ok(EXIT_OK)
        }
        Err(Error::NoSignChange {
            lambda_start,
            lambda_max,
            trace,
        }) => {
            writeln!(
                err,
                "no sign change of det(I - lambda K) for lambda in [{}, {}]",
                sig17(lambda_start),
                sig17(lambda_max)
            )?;
            let rows: Vec<Vec<String>> = trace
                .iter()
                .map(|&(lam, sign)| vec![sig17(lam), format!("{sign}")])
                .collect();
            emit(out, format, &["lambda", "det_sign"], &rows)?;
            Ok(EXIT_NO_SIGN_CHANGE)
        }
        Err(e) => Err(e),
    }
}

fn cmd_certify(p: &Problem, path: &std::path::Path, out: &mut dyn Write) -> Result<i32> {
    let q = load_q_csv_path(path, p)?;
    let cert = certify(p, &q)?;
    writeln!(out, "{}", cert.to_json())?;
    Ok(match cert.verdict {
        Verdict::NoNontrivialSolution => EXIT_OK,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    })
}

/// Lengths for the counterexample sweep: an explicit range, or `steps`
/// points on `c (1 - span) .. c (1 + span)` around the critical length `c`,
/// with `c` itself hit exactly when `steps` is odd.
pub fn counterexample_lengths(p_alpha: f64, span: f64, steps: usize) -> Result<Vec<f64>> {
    let probe = Problem::with_length(p_alpha, 1.0)?;
    let c = match probe.critical_length() {
        ExtendedReal::Finite(c) if c > 0.0 => c,
        ExtendedReal::Finite(_) => return Ok(linspace(0.5, 2.0, steps.max(2))),
        ExtendedReal::Unbounded => {
            return Err(Error::InvalidProblem(format!(
                "critical length unbounded at alpha={p_alpha}"
            )))
        }
    };
    if !(span > 0.0 && span < 1.0) || steps < 1 {
        return Err(Error::InvalidGrid(vec![format!(
            "span={span}, steps={steps}"
        )]));
    }
    if steps == 1 {
        return Ok(vec![c]);
    }
    let half = (steps - 1) as f64 / 2.0;
    Ok((0..steps)
        .map(|i| c * (1.0 + span * (i as f64 - half) / half))
        .collect())
}

fn cmd_counterexample(
    alphas: &[f64],
    lengths: Option<Vec<f64>>,
    span: f64,
    steps: usize,
    format: OutputFormat,
    out: &mut dyn Write,
) -> Result<i32> {
    let mut rows = Vec::new();
    for &alpha in alphas {
        let lengths = match &lengths {
            Some(l) => l.clone(),
            None => counterexample_lengths(alpha, span, steps)?,
        };
        for p in sweep_problems(&[alpha], &lengths)? {
            rows.push(sweep_row_fields(&SweepRow::from_problem(&p)));
        }
    }
    emit(out, format, &SWEEP_HEADER, &rows)?;
    Ok(EXIT_OK)
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let settings = Settings::load(cli.config.as_ref())?;
    let format = settings.or(cli.format, "format", OutputFormat::Csv)?;
    match &cli.command {
        Command::Bound(args) => cmd_bound(&settings.required_problem(args)?, format, out),
        Command::GreenGrid {
            problem,
            resolution,
        } => {
            let p = settings.required_problem(problem)?;
            let n = settings.or(*resolution, "resolution", 33)?;
            cmd_green_grid(&p, n, format, out)
        }
        Command::Audit {
            problem,
            sweep,
            oracle_n,
            sign_n,
            fd_n,
            fd_eps,
        } => {
            let d = AuditSettings::default();
            let s = AuditSettings {
                oracle_n: settings.or(*oracle_n, "oracle_n", d.oracle_n)?,
                sign_n: settings.or(*sign_n, "sign_n", d.sign_n)?,
                fd_n: settings.or(*fd_n, "fd_n", d.fd_n)?,
                fd_eps: settings.or(*fd_eps, "fd_eps", d.fd_eps)?,
            };
            let problems = match settings.problem(problem)? {
                Some(p) => vec![p],
                None => {
                    let alphas = settings
                        .range(sweep.alpha_min, sweep.alpha_max, sweep.alpha_steps, "alpha")?
                        .unwrap_or_else(standard_alphas);
                    let lengths = settings
                        .range(
                            sweep.length_min,
                            sweep.length_max,
                            sweep.length_steps,
                            "length",
                        )?
                        .unwrap_or_else(|| STANDARD_LENGTHS.to_vec());
                    sweep_problems(&alphas, &lengths)?
                }
            };
            cmd_audit(&problems, &s, format, out)
        }
        Command::Eigen {
            problem,
            n,
            lambda_max,
            tol,
            ratio,
        } => {
            let p = settings.required_problem(problem)?;
            let d = ScanOptions::default();
            let opts = ScanOptions {
                lambda_max: settings.value(*lambda_max, "lambda_max")?,
                tol: settings.or(*tol, "tol", d.tol)?,
                ratio: settings.or(*ratio, "ratio", d.ratio)?,
            };
            let n = settings.or(*n, "n", 400)?;
            cmd_eigen(&p, n, &opts, format, out, err)
        }
        Command::Certify { problem, q } => {
            let p = settings.required_problem(problem)?;
            let path = settings
                .value(q.clone(), "q")?
                .ok_or_else(|| Error::InvalidProblem("--q is required".into()))?;
            cmd_certify(&p, &path, out)
        }
        Command::Counterexample {
            problem,
            sweep,
            span,
        } => {
            let alpha = settings.or(problem.alpha, "alpha", 1.5)?;
            let lengths = settings.range(
                sweep.length_min,
                sweep.length_max,
                sweep.length_steps,
                "length",
            )?;
            let span = settings.or(*span, "span", 0.1)?;
            let steps = settings.or(sweep.length_steps, "length_steps", 21)?;
            let alphas = settings
                .range(sweep.alpha_min, sweep.alpha_max, sweep.alpha_steps, "alpha")?
                .unwrap_or_else(|| vec![alpha]);
            cmd_counterexample(&alphas, lengths, span, steps, format, out)
        }
    }
}

/// Parses `args` and runs the selected command, returning the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };

    let (result, buf, err_buf) = with_thread_cap(|| {
        let mut buf = Vec::new();
        let mut err_buf = Vec::new();
        let r = dispatch(&cli, &mut buf, &mut err_buf);
        (r, buf, err_buf)
    });

    let _ = err.write_all(&err_buf);
    let written = match &cli.output {
        Some(path) => {
            std::fs::write(path, &buf).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
        }
        None => out.write_all(&buf).map_err(Error::from),
    };
    match (result, written) {
        (Ok(code), Ok(())) => code,
        (Err(e), _) | (Ok(_), Err(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}
