//! Command-line front end. Each command reads a [`RunConfig`], writes CSV
//! files (and optionally SVG plots) into the output directory, and appends
//! one line per failed cell to `errors.log`.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::analytics::Regime;
use crate::barrier::barrier_trapping_probability_with;
use crate::error::{Error, Result};
use crate::model::{
    estimate_laplace, estimate_subsidy_value, estimate_trapping_probability, ModelParams,
    PremiumMapping, SchemeKind, SchemeSpec,
};
use crate::optimize::{
    evaluate, optimal_barrier, optimal_theta, Quantity, RootConfig, SweepContext,
};
use crate::specfun::SeriesPolicy;
use crate::welfare::{subsidy_rate, subsidy_value};

pub use config::{Axis, Column, Overrides, RunConfig, Target, CONFIG_HELP};
use output::{error_log, fmt_num, plot_table, ErrorLine, Table};

/// Largest |z| between a closed form and its simulation estimate that passes validation.
pub const Z_GATE: f64 = 4.0;

#[derive(Parser, Debug)]
#[command(
    name = "poverty-trap",
    version,
    about = "Trapping probabilities, subsidy values and optimal subsidies for households under microinsurance",
    after_long_help = CONFIG_HELP
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Run configuration file (TOML; see --help for keys)
    #[arg(long, short)]
    config: PathBuf,
    /// Capital grid: "1,2,3" or "start:stop:points"
    #[arg(long)]
    x_grid: Option<String>,
    /// Simulation seed
    #[arg(long)]
    seed: Option<u64>,
    /// Number of simulated paths
    #[arg(long)]
    paths: Option<usize>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also render SVG line charts next to the CSV files
    #[arg(long)]
    plots: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Trapping probability of every scheme over the capital grid
    TrapProb(Common),
    /// Laplace transform of the trapping time, one column per force of interest
    Laplace {
        #[command(flatten)]
        common: Common,
        /// Forces of interest, comma separated
        #[arg(long, value_delimiter = ',')]
        deltas: Option<Vec<f64>>,
    },
    /// Expected trapping time over the capital grid or over a barrier grid
    ExpectedTime {
        #[command(flatten)]
        common: Common,
        /// Growth rates, comma separated; one column per scheme and rate
        #[arg(long, value_delimiter = ',')]
        r_list: Option<Vec<f64>>,
    },
    /// Optimal subsidised loading or optimal barrier over the capital grid
    Optimize {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        target: Option<Target>,
    },
    /// Cost of social protection of every scheme
    Cost(Common),
    /// Compare closed forms with simulation and write validation_report.csv
    Validate(Common),
}

/// Files written and failures met by one command.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub errors: Vec<ErrorLine>,
    /// Validation failures (only `validate` sets these).
    pub failures: Vec<String>,
}

impl Outcome {
    pub fn failed(&self) -> bool {
        !self.errors.is_empty() || !self.failures.is_empty()
    }
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Domain(format!("cannot write {}: {e}", path.display()))
}

fn write_file(dir: &Path, name: &str, body: &str, out: &mut Outcome) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, body).map_err(|e| io_error(&path, e))?;
    out.files.push(path);
    Ok(())
}

fn finish(
    cfg: &RunConfig,
    name: &str,
    table: &Table,
    y_label: &str,
    mut out: Outcome,
) -> Result<Outcome> {
    write_file(
        &cfg.output_dir,
        &format!("{name}.csv"),
        &table.to_csv(),
        &mut out,
    )?;
    if cfg.emit_plots {
        let path = cfg.output_dir.join(format!("{name}.svg"));
        plot_table(&path, table, y_label).map_err(Error::Domain)?;
        out.files.push(path);
    }
    let log = error_log(&out.errors);
    write_file(&cfg.output_dir, "errors.log", &log, &mut out)?;
    Ok(out)
}

/// Evaluate `f` on every (key, column) cell in parallel and assemble the table.
fn tabulate<F>(
    command: &'static str,
    key: &str,
    keys: &[f64],
    cols: &[Column],
    f: F,
) -> (Table, Vec<ErrorLine>)
where
    F: Fn(&Column, f64) -> Result<f64> + Sync,
{
    let n = cols.len();
    let cells: Vec<Result<f64>> = (0..keys.len() * n)
        .into_par_iter()
        .map(|k| f(&cols[k % n], keys[k / n]))
        .collect();
    let mut rows: Vec<(f64, Vec<Option<f64>>)> = keys.iter().map(|&k| (k, vec![None; n])).collect();
    let mut errors = Vec::new();
    for (k, cell) in cells.into_iter().enumerate() {
        let (i, j) = (k / n, k % n);
        match cell {
            Ok(v) => rows[i].1[j] = Some(v),
            Err(e) => errors.push(ErrorLine {
                command,
                x: keys[i],
                scheme: cols[j].label.clone(),
                kind: e.kind(),
                message: e.to_string(),
            }),
        }
    }
    let table = Table {
        key: key.to_string(),
        columns: cols.iter().map(|c| c.label.clone()).collect(),
        rows,
    };
    (table, errors)
}

fn context(cfg: &RunConfig) -> SweepContext {
    SweepContext {
        welfare: cfg.welfare,
        mapping: cfg.mapping,
        matching: cfg.matching,
        root: None,
    }
}

pub fn cmd_trap_prob(cfg: &RunConfig) -> Result<Outcome> {
    let ctx = context(cfg);
    let (table, errors) = tabulate("trap-prob", "x", &cfg.x_grid, &cfg.schemes, |c, x| {
        evaluate(&c.params, &c.scheme, x, Quantity::TrappingProbability, &ctx)
    });
    finish(
        cfg,
        "trapping_probabilities",
        &table,
        "trapping probability",
        Outcome {
            errors,
            ..Default::default()
        },
    )
}

pub fn cmd_laplace(cfg: &RunConfig) -> Result<Outcome> {
    let ctx = context(cfg);
    let single = cfg.schemes.len() == 1;
    let mut cols = Vec::new();
    let mut deltas = Vec::new();
    for c in &cfg.schemes {
        for &d in &cfg.deltas {
            let label = if single {
                format!("delta={}", fmt_num(d))
            } else {
                format!("{} delta={}", c.label, fmt_num(d))
            };
            cols.push(Column { label, ..c.clone() });
            deltas.push(d);
        }
    }
    let (table, errors) = tabulate("laplace", "x", &cfg.x_grid, &cols, |c, x| {
        let j = cols
            .iter()
            .position(|k| std::ptr::eq(k, c))
            .expect("column of this table");
        evaluate(
            &c.params,
            &c.scheme,
            x,
            Quantity::Laplace { delta: deltas[j] },
            &ctx,
        )
    });
    finish(
        cfg,
        "laplace",
        &table,
        "Laplace transform",
        Outcome {
            errors,
            ..Default::default()
        },
    )
}

/// Rebuild `scheme` for new model parameters through `mapping`.
fn rebuild(
    scheme: &SchemeSpec,
    params: &ModelParams,
    mapping: PremiumMapping,
) -> Result<SchemeSpec> {
    match scheme.kind {
        SchemeKind::Uninsured => Ok(SchemeSpec::uninsured(params)),
        SchemeKind::Insured => SchemeSpec::insured(params, scheme.kappa, scheme.theta, mapping),
        SchemeKind::SubsidisedInsured => SchemeSpec::subsidised(
            params,
            scheme.kappa,
            scheme.theta,
            scheme.theta_star,
            mapping,
        ),
        SchemeKind::BarrierSubsidised => {
            let s = SchemeSpec::barrier(params, scheme.kappa, scheme.theta, f64::MAX, mapping)?;
            s.with_barrier(params, scheme.barrier.max(s.x_star_ins))
        }
    }
}

pub fn cmd_expected_time(cfg: &RunConfig) -> Result<Outcome> {
    let mut cols = Vec::new();
    match &cfg.r_list {
        None => cols.extend(cfg.schemes.iter().cloned()),
        Some(rs) => {
            for c in &cfg.schemes {
                for &r in rs {
                    let params =
                        ModelParams::new(r, c.params.lambda, c.params.alpha, c.params.x_star)?;
                    let scheme = rebuild(&c.scheme, &params, cfg.mapping)?;
                    let label = if cfg.schemes.len() == 1 {
                        format!("r={}", fmt_num(r))
                    } else {
                        format!("{} r={}", c.label, fmt_num(r))
                    };
                    cols.push(Column {
                        label,
                        params,
                        scheme,
                    });
                }
            }
        }
    }
    let policy = SeriesPolicy::default();
    for c in &cols {
        if c.scheme.kind != SchemeKind::BarrierSubsidised {
            let rg = Regime::of(&c.params, &c.scheme);
            let g = c.params.lambda / rg.rho;
            if policy.near_integer(g) {
                eprintln!(
                    "warning: {}: lambda/r = {} is an integer; using the average at lambda/r +- {}",
                    c.label,
                    fmt_num(g),
                    fmt_num(5.0 * policy.integer_guard)
                );
            }
        }
    }
    let ctx = context(cfg);
    let (table, errors) = match cfg.time_axis {
        Axis::X => tabulate("expected-time", "x", &cfg.x_grid, &cols, |c, x| {
            evaluate(&c.params, &c.scheme, x, Quantity::ExpectedTime, &ctx)
        }),
        Axis::Barrier => {
            let x = cfg.time_x.ok_or_else(|| {
                Error::InvalidParameter(
                    "expected_time.x is required when over = \"barrier\"".into(),
                )
            })?;
            if let Some(c) = cols
                .iter()
                .find(|c| c.scheme.kind != SchemeKind::BarrierSubsidised)
            {
                return Err(Error::InvalidParameter(format!(
                    "scheme {} is not a barrier scheme",
                    c.label
                )));
            }
            tabulate("expected-time", "B", &cfg.x_grid, &cols, |c, b| {
                let s = c.scheme.with_barrier(&c.params, b)?;
                evaluate(&c.params, &s, x, Quantity::ExpectedTime, &ctx)
            })
        }
    };
    finish(
        cfg,
        "expected_time",
        &table,
        "expected trapping time",
        Outcome {
            errors,
            ..Default::default()
        },
    )
}

pub fn cmd_optimize(cfg: &RunConfig) -> Result<Outcome> {
    let col = cfg
        .schemes
        .iter()
        .find(|c| match cfg.target {
            Target::Theta => c.scheme.kind != SchemeKind::Uninsured,
            Target::Barrier => c.scheme.kind == SchemeKind::BarrierSubsidised,
        })
        .ok_or_else(|| {
            Error::InvalidParameter(match cfg.target {
                Target::Theta => "optimize theta needs an insured scheme".into(),
                Target::Barrier => "optimize barrier needs a barrier scheme".into(),
            })
        })?;
    let cells: Vec<Result<(f64, &'static str)>> = cfg
        .x_grid
        .par_iter()
        .map(|&x| match cfg.target {
            Target::Theta => {
                let o = optimal_theta(
                    &col.params,
                    col.scheme.kappa,
                    col.scheme.theta,
                    cfg.mapping,
                    x,
                    &RootConfig::for_theta(),
                )?;
                Ok((o.value, o.verdict.name()))
            }
            Target::Barrier => {
                let rc = RootConfig::for_barrier(col.params.x_star);
                let o = optimal_barrier(&col.params, &col.scheme, x, cfg.b_max, &rc, cfg.matching)?;
                Ok((o.value - x, o.verdict.name()))
            }
        })
        .collect();
    let mut out = Outcome::default();
    let mut csv = String::from("x,value,verdict\n");
    for (&x, cell) in cfg.x_grid.iter().zip(cells) {
        match cell {
            Ok((v, verdict)) => {
                let _ = writeln!(csv, "{},{},{}", fmt_num(x), fmt_num(v), verdict);
            }
            Err(e) => {
                let _ = writeln!(csv, "{},,", fmt_num(x));
                out.errors.push(ErrorLine {
                    command: "optimize",
                    x,
                    scheme: col.label.clone(),
                    kind: e.kind(),
                    message: e.to_string(),
                });
            }
        }
    }
    write_file(&cfg.output_dir, "optimize.csv", &csv, &mut out)?;
    if cfg.emit_plots {
        let table = Table {
            key: "x".into(),
            columns: vec![match cfg.target {
                Target::Theta => "theta*".into(),
                Target::Barrier => "B* - x".into(),
            }],
            rows: csv
                .lines()
                .skip(1)
                .map(|l| {
                    let mut it = l.split(',');
                    let x = it.next().and_then(|s| s.parse().ok()).unwrap_or(f64::NAN);
                    (x, vec![it.next().and_then(|s| s.parse().ok())])
                })
                .collect(),
        };
        let path = cfg.output_dir.join("optimize.svg");
        plot_table(&path, &table, "optimum").map_err(Error::Domain)?;
        out.files.push(path);
    }
    let log = error_log(&out.errors);
    write_file(&cfg.output_dir, "errors.log", &log, &mut out)?;
    Ok(out)
}

pub fn cmd_cost(cfg: &RunConfig) -> Result<Outcome> {
    let ctx = context(cfg);
    let (table, errors) = tabulate("cost", "x", &cfg.x_grid, &cfg.schemes, |c, x| {
        evaluate(&c.params, &c.scheme, x, Quantity::Cost, &ctx)
    });
    finish(
        cfg,
        "cost",
        &table,
        "cost of social protection",
        Outcome {
            errors,
            ..Default::default()
        },
    )
}

/// One row of the validation report.
struct Check {
    scheme: String,
    x: f64,
    quantity: String,
    closed: Option<f64>,
    mc: Option<(f64, f64)>,
    z: Option<f64>,
    pass: bool,
    note: String,
}

fn mc_check(
    label: &str,
    x: f64,
    quantity: String,
    closed: Result<f64>,
    mc: Result<crate::model::MCEstimate>,
) -> Check {
    match (closed, mc) {
        (Ok(c), Ok(m)) => {
            let z = m.z_score(c);
            Check {
                scheme: label.into(),
                x,
                quantity,
                closed: Some(c),
                mc: Some((m.mean, m.std_err)),
                z: Some(z),
                pass: z.abs() <= Z_GATE,
                note: String::new(),
            }
        }
        (c, m) => {
            let note = [c.err(), m.err()]
                .into_iter()
                .flatten()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join("; ");
            Check {
                scheme: label.into(),
                x,
                quantity,
                closed: None,
                mc: None,
                z: None,
                pass: false,
                note,
            }
        }
    }
}

fn invariant(
    label: &str,
    x: f64,
    quantity: &str,
    value: Result<f64>,
    ok: impl Fn(f64) -> bool,
) -> Check {
    let (closed, pass, note) = match value {
        Ok(v) => (Some(v), ok(v), String::new()),
        Err(e) => (None, false, e.to_string()),
    };
    Check {
        scheme: label.into(),
        x,
        quantity: quantity.into(),
        closed,
        mc: None,
        z: None,
        pass,
        note,
    }
}

fn validation_points(cfg: &RunConfig, c: &Column) -> Vec<f64> {
    let base = c.scheme.critical_capital();
    let mut xs = match &cfg.validate_x {
        Some(v) => v.clone(),
        None => [0.5, 1.0, 2.0, 4.0, 7.0].iter().map(|d| base + d).collect(),
    };
    if c.scheme.kind == SchemeKind::BarrierSubsidised
        && c.scheme.barrier > base
        && !xs.contains(&c.scheme.barrier)
    {
        xs.push(c.scheme.barrier);
        xs.sort_by(f64::total_cmp);
    }
    xs
}

pub fn cmd_validate(cfg: &RunConfig) -> Result<Outcome> {
    let ctx = context(cfg);
    let w = cfg.welfare;
    let mut checks = Vec::new();
    for c in &cfg.schemes {
        let (p, s) = (&c.params, &c.scheme);
        let xc = s.critical_capital();
        checks.push(invariant(
            &c.label,
            xc,
            "boundary_psi",
            evaluate(p, s, xc, Quantity::TrappingProbability, &ctx),
            |v| (v - 1.0).abs() <= 1e-12,
        ));
        for &d in cfg.validate_deltas.iter().filter(|d| **d > 0.0) {
            let want = p.lambda / (p.lambda + d);
            checks.push(invariant(
                &c.label,
                xc,
                &format!("boundary_laplace delta={}", fmt_num(d)),
                evaluate(p, s, xc, Quantity::Laplace { delta: d }, &ctx),
                |v| (v - want).abs() <= 1e-12,
            ));
        }
        if s.kind == SchemeKind::BarrierSubsidised && s.barrier > xc {
            let b = s.barrier;
            let eps = 1e-9 * b.abs().max(1.0);
            let left = barrier_trapping_probability_with(p, s, b - eps, cfg.matching);
            let right = barrier_trapping_probability_with(p, s, b + eps, cfg.matching);
            let gap = match (left, right) {
                (Ok(l), Ok(r)) => Ok((l - r).abs()),
                (Err(e), _) | (_, Err(e)) => Err(e),
            };
            checks.push(invariant(&c.label, b, "barrier_continuity", gap, |g| {
                g <= 1e-8
            }));
        }
        for x in validation_points(cfg, c) {
            if s.check_capital(x).is_err() {
                continue;
            }
            let closed = evaluate(p, s, x, Quantity::TrappingProbability, &ctx);
            let mc = estimate_trapping_probability(p, s, x, &cfg.sim);
            checks.push(mc_check(&c.label, x, "psi".into(), closed, mc));
            for &d in cfg.validate_deltas.iter().filter(|d| **d > 0.0) {
                let closed = evaluate(p, s, x, Quantity::Laplace { delta: d }, &ctx);
                let mc = estimate_laplace(p, s, x, d, &cfg.sim);
                checks.push(mc_check(
                    &c.label,
                    x,
                    format!("laplace delta={}", fmt_num(d)),
                    closed,
                    mc,
                ));
            }
            let rate = match s.kind {
                SchemeKind::SubsidisedInsured => Some(subsidy_rate(p, s, w.subsidy_rate_mode)),
                SchemeKind::BarrierSubsidised => Some(s.market_premium(p)),
                _ => None,
            };
            if let Some(rate) = rate {
                let closed = subsidy_value(p, s, x, &w);
                let mc = estimate_subsidy_value(p, s, x, w.delta, rate, &cfg.sim);
                checks.push(mc_check(
                    &c.label,
                    x,
                    format!("subsidy delta={}", fmt_num(w.delta)),
                    closed,
                    mc,
                ));
            }
        }
    }
    let opt = |v: Option<f64>| v.map(fmt_num).unwrap_or_default();
    let mut csv = String::from("scheme,x,quantity,closed_form,mc_mean,std_err,z,pass\n");
    let mut out = Outcome::default();
    for k in &checks {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            k.scheme,
            fmt_num(k.x),
            k.quantity,
            opt(k.closed),
            opt(k.mc.map(|m| m.0)),
            opt(k.mc.map(|m| m.1)),
            opt(k.z),
            if k.pass { "pass" } else { "FAIL" }
        );
        if !k.pass {
            let detail = match (k.z, k.note.is_empty()) {
                (Some(z), _) => format!("z = {}", fmt_num(z)),
                (None, false) => k.note.clone(),
                (None, true) => format!("value {}", opt(k.closed)),
            };
            out.failures.push(format!(
                "{} x={} {}: {}",
                k.scheme,
                fmt_num(k.x),
                k.quantity,
                detail
            ));
        }
    }
    write_file(&cfg.output_dir, "validation_report.csv", &csv, &mut out)?;
    write_file(&cfg.output_dir, "errors.log", "", &mut out)?;
    Ok(out)
}

fn overrides(c: &Common) -> Overrides {
    Overrides {
        x_grid: c.x_grid.clone(),
        seed: c.seed,
        paths: c.paths,
        out: c.out.clone(),
        plots: c.plots,
    }
}

/// Parse `args` (including the program name), run the command and return the exit code:
/// 0 on success, 1 on computation or validation failure, 2 on usage or config errors.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let (common, cmd): (&Common, fn(&RunConfig) -> Result<Outcome>) = match &cli.command {
        Command::TrapProb(c) => (c, cmd_trap_prob),
        Command::Laplace { common, .. } => (common, cmd_laplace),
        Command::ExpectedTime { common, .. } => (common, cmd_expected_time),
        Command::Optimize { common, .. } => (common, cmd_optimize),
        Command::Cost(c) => (c, cmd_cost),
        Command::Validate(c) => (c, cmd_validate),
    };
    let mut cfg = match RunConfig::load(&common.config, &overrides(common)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match &cli.command {
        Command::Laplace {
            deltas: Some(d), ..
        } => {
            if d.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
                eprintln!("error: deltas must be >= 0");
                return 2;
            }
            cfg.deltas = d.clone();
        }
        Command::ExpectedTime {
            r_list: Some(r), ..
        } => {
            if r.iter().any(|v| !(*v > 0.0)) {
                eprintln!("error: rates must be > 0");
                return 2;
            }
            cfg.r_list = Some(r.clone());
        }
        Command::Optimize {
            target: Some(t), ..
        } => cfg.target = *t,
        _ => {}
    }
    match cmd(&cfg) {
        Ok(out) => {
            for f in &out.files {
                println!("wrote {}", f.display());
            }
            if !out.errors.is_empty() {
                eprintln!("{} cell(s) failed; see errors.log", out.errors.len());
            }
            for f in &out.failures {
                eprintln!("FAIL {f}");
            }
            if out.failed() {
                1
            } else {
                0
            }
        }
        Err(e @ Error::InvalidParameter(_)) => {
            eprintln!("error: {e}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rebuild_keeps_scheme_fields() {
        let p = ModelParams::new(0.5, 1.0, 1.0, 1.0).unwrap();
        let q = ModelParams::new(0.08, 1.0, 1.0, 1.0).unwrap();
        let s = SchemeSpec::barrier(&p, 0.5, 0.5, 3.0, PremiumMapping::RateScaling).unwrap();
        let t = rebuild(&s, &q, PremiumMapping::RateScaling).unwrap();
        assert_eq!(
            (t.kind, t.kappa, t.theta, t.barrier),
            (s.kind, s.kappa, s.theta, 3.0)
        );
        assert!((t.r_ins - 0.08 / 1.75).abs() < 1e-15);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["poverty-trap", "no-such-command"]), 2);
        assert_eq!(
            run([
                "poverty-trap",
                "trap-prob",
                "--config",
                "/nonexistent/cfg.toml"
            ]),
            2
        );
    }
}
