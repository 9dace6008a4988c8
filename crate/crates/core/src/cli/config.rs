//! TOML run configuration and its resolution into model types.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::barrier::Matching;
use crate::error::{Error, Result};
use crate::model::{ModelParams, PremiumMapping, SchemeSpec, SimConfig};
use crate::welfare::{SubsidyRateMode, WelfareParams};

pub const CONFIG_HELP: &str = "\
CONFIGURATION FILE (TOML)

  [model]            r, lambda, alpha, x_star                      (required)
  [premium]          mapping = \"drift_absorption\" | \"rate_scaling\"
                     drift_absorption: r_ins = r, x_star_ins = x_star + pi/r
                     rate_scaling:     r_ins = r lambda/(lambda + pi alpha), x_star_ins = x_star
  [barrier]          matching = \"flux_continuity\" (default) | \"smooth_pasting\"
  [welfare]          delta (0.9), m_cost (8), subsidy_rate_mode = \"paper_literal\" | \"dimensional\"
  [sim]              paths (100000), t_max (200), seed (1), escape_level (none)
  [grid]             x = [..]  or  start, stop, points
                     default: start = largest critical capital, stop = start + 9, 181 points
  [[schemes]]        label, kind = \"uninsured\" | \"insured\" | \"subsidised\" | \"barrier\",
                     kappa, theta, theta_star, barrier,
                     r, alpha (per-scheme model overrides),
                     r_ins, x_star_ins (explicit insured dynamics, bypassing the mapping)
  [laplace]          deltas = [0, 0.125, 0.03125, 0.0078125]
  [expected_time]    r = [..] (one column per scheme and rate), over = \"x\" | \"barrier\",
                     x (initial capital when sweeping the barrier)
  [optimize]         target = \"theta\" | \"barrier\", b_max
  [validate]         x = [..] (default: critical + 0.5, 1, 2, 4, 7), deltas = [0.125]
  [output]           dir (\"out\"), plots (false)

Flags --x-grid, --seed, --paths, --out and --plots override the file.
--x-grid takes either a list \"1,2,3\" or \"start:stop:points\".";

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    model: ModelSection,
    #[serde(default)]
    premium: PremiumSection,
    #[serde(default)]
    barrier: BarrierSection,
    #[serde(default)]
    welfare: WelfareSection,
    #[serde(default)]
    sim: SimSection,
    #[serde(default)]
    grid: GridSection,
    #[serde(default)]
    schemes: Vec<SchemeSection>,
    #[serde(default)]
    laplace: LaplaceSection,
    #[serde(default)]
    expected_time: ExpectedTimeSection,
    #[serde(default)]
    optimize: OptimizeSection,
    #[serde(default)]
    validate: ValidateSection,
    #[serde(default)]
    output: OutputSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelSection {
    r: f64,
    lambda: f64,
    alpha: f64,
    x_star: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PremiumSection {
    #[serde(default)]
    mapping: MappingName,
}

#[derive(Debug, Default, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum MappingName {
    #[default]
    DriftAbsorption,
    RateScaling,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct BarrierSection {
    #[serde(default)]
    matching: MatchingName,
}

#[derive(Debug, Default, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum MatchingName {
    SmoothPasting,
    #[default]
    FluxContinuity,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct WelfareSection {
    delta: f64,
    m_cost: f64,
    subsidy_rate_mode: RateModeName,
}

impl Default for WelfareSection {
    fn default() -> Self {
        let w = WelfareParams::default();
        WelfareSection {
            delta: w.delta,
            m_cost: w.m_cost,
            subsidy_rate_mode: RateModeName::PaperLiteral,
        }
    }
}

#[derive(Debug, Default, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum RateModeName {
    #[default]
    PaperLiteral,
    Dimensional,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct SimSection {
    paths: usize,
    t_max: f64,
    seed: u64,
    escape_level: Option<f64>,
}

impl Default for SimSection {
    fn default() -> Self {
        let s = SimConfig::default();
        SimSection {
            paths: s.n_paths,
            t_max: s.t_max,
            seed: s.seed,
            escape_level: s.escape_level,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSection {
    x: Option<Vec<f64>>,
    start: Option<f64>,
    stop: Option<f64>,
    points: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemeSection {
    label: Option<String>,
    kind: KindName,
    kappa: Option<f64>,
    theta: Option<f64>,
    theta_star: Option<f64>,
    barrier: Option<f64>,
    r: Option<f64>,
    alpha: Option<f64>,
    r_ins: Option<f64>,
    x_star_ins: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum KindName {
    Uninsured,
    Insured,
    Subsidised,
    Barrier,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct LaplaceSection {
    deltas: Vec<f64>,
}

impl Default for LaplaceSection {
    fn default() -> Self {
        LaplaceSection {
            deltas: vec![0.0, 0.125, 0.03125, 0.0078125],
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExpectedTimeSection {
    r: Option<Vec<f64>>,
    #[serde(default)]
    over: Axis,
    x: Option<f64>,
}

/// Variable along the rows of the expected-time table.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    #[default]
    X,
    Barrier,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OptimizeSection {
    #[serde(default)]
    target: Target,
    b_max: Option<f64>,
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    #[default]
    Theta,
    Barrier,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ValidateSection {
    x: Option<Vec<f64>>,
    deltas: Vec<f64>,
}

impl Default for ValidateSection {
    fn default() -> Self {
        ValidateSection {
            x: None,
            deltas: vec![0.125],
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct OutputSection {
    dir: PathBuf,
    plots: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: PathBuf::from("out"),
            plots: false,
        }
    }
}

/// One output column: a labelled scheme with its own model parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub label: String,
    pub params: ModelParams,
    pub scheme: SchemeSpec,
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelParams,
    pub schemes: Vec<Column>,
    pub mapping: PremiumMapping,
    pub matching: Matching,
    pub welfare: WelfareParams,
    pub sim: SimConfig,
    pub x_grid: Vec<f64>,
    pub output_dir: PathBuf,
    pub emit_plots: bool,
    pub deltas: Vec<f64>,
    pub r_list: Option<Vec<f64>>,
    pub time_axis: Axis,
    pub time_x: Option<f64>,
    pub target: Target,
    pub b_max: Option<f64>,
    pub validate_x: Option<Vec<f64>>,
    pub validate_deltas: Vec<f64>,
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub x_grid: Option<String>,
    pub seed: Option<u64>,
    pub paths: Option<usize>,
    pub out: Option<PathBuf>,
    pub plots: bool,
}

fn config_error(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

/// Parse `--x-grid`: `"1,2,3"` or `"start:stop:points"`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|e| config_error(format!("bad grid value {t:?}: {e}")))
    };
    if parts.len() == 3 {
        let n = parts[2]
            .trim()
            .parse::<usize>()
            .map_err(|e| config_error(format!("bad grid size: {e}")))?;
        return linspace(num(parts[0])?, num(parts[1])?, n);
    }
    if parts.len() != 1 {
        return Err(config_error(format!(
            "grid must be a list or start:stop:points, got {s:?}"
        )));
    }
    s.split(',').map(num).collect()
}

pub fn linspace(start: f64, stop: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || !(stop > start) {
        return Err(config_error(format!(
            "grid needs stop > start and at least 2 points, got {start}:{stop}:{n}"
        )));
    }
    let h = (stop - start) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| {
            if i == n - 1 {
                stop
            } else {
                start + h * i as f64
            }
        })
        .collect())
}

fn check_grid(g: &[f64]) -> Result<()> {
    if g.is_empty() || g.iter().any(|v| !v.is_finite()) || g.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(config_error(
            "grid must be non-empty, finite and strictly ascending",
        ));
    }
    Ok(())
}

fn build_column(
    sec: &SchemeSection,
    base: &ModelParams,
    mapping: PremiumMapping,
    index: usize,
) -> Result<Column> {
    let params = ModelParams::new(
        sec.r.unwrap_or(base.r),
        base.lambda,
        sec.alpha.unwrap_or(base.alpha),
        base.x_star,
    )?;
    let need = |v: Option<f64>, name: &str| {
        v.ok_or_else(|| config_error(format!("scheme {index}: missing {name}")))
    };
    let mut scheme = match sec.kind {
        KindName::Uninsured => SchemeSpec::uninsured(&params),
        KindName::Insured => SchemeSpec::insured(
            &params,
            need(sec.kappa, "kappa")?,
            need(sec.theta, "theta")?,
            mapping,
        )?,
        KindName::Subsidised => SchemeSpec::subsidised(
            &params,
            need(sec.kappa, "kappa")?,
            need(sec.theta, "theta")?,
            need(sec.theta_star, "theta_star")?,
            mapping,
        )?,
        KindName::Barrier => {
            let kappa = need(sec.kappa, "kappa")?;
            let theta = need(sec.theta, "theta")?;
            // the barrier defaults to the critical capital; optimize and the
            // barrier axis of expected-time overwrite it
            let template = SchemeSpec::barrier(&params, kappa, theta, f64::MAX, mapping)?;
            template.with_barrier(&params, sec.barrier.unwrap_or(template.x_star_ins))?
        }
    };
    if sec.r_ins.is_some() || sec.x_star_ins.is_some() {
        if matches!(sec.kind, KindName::Uninsured) {
            return Err(config_error(format!(
                "scheme {index}: uninsured scheme takes no insured dynamics"
            )));
        }
        let r_ins = sec.r_ins.unwrap_or(scheme.r_ins);
        let x_ins = sec.x_star_ins.unwrap_or(scheme.x_star_ins);
        scheme = scheme.with_insured_dynamics(&params, r_ins, x_ins)?;
        if matches!(sec.kind, KindName::Barrier) && sec.barrier.is_none() {
            scheme = scheme.with_barrier(&params, x_ins)?;
        }
    }
    let label = sec
        .label
        .clone()
        .unwrap_or_else(|| scheme.kind.name().to_string());
    if label.is_empty() || label.contains(',') || label.contains('\n') {
        return Err(config_error(format!(
            "scheme {index}: label must be non-empty without commas"
        )));
    }
    Ok(Column {
        label,
        params,
        scheme,
    })
}

impl RunConfig {
    pub fn from_toml(text: &str, ov: &Overrides) -> Result<Self> {
        let f: FileConfig =
            toml::from_str(text).map_err(|e| config_error(format!("config: {}", e.message())))?;
        let model = ModelParams::new(f.model.r, f.model.lambda, f.model.alpha, f.model.x_star)?;
        let mapping = match f.premium.mapping {
            MappingName::DriftAbsorption => PremiumMapping::DriftAbsorption,
            MappingName::RateScaling => PremiumMapping::RateScaling,
        };
        let matching = match f.barrier.matching {
            MatchingName::SmoothPasting => Matching::SmoothPasting,
            MatchingName::FluxContinuity => Matching::FluxContinuity,
        };
        let welfare = WelfareParams {
            delta: f.welfare.delta,
            m_cost: f.welfare.m_cost,
            subsidy_rate_mode: match f.welfare.subsidy_rate_mode {
                RateModeName::PaperLiteral => SubsidyRateMode::PaperLiteral,
                RateModeName::Dimensional => SubsidyRateMode::Dimensional,
            },
            matching,
        };
        welfare.validate()?;
        if f.schemes.is_empty() {
            return Err(config_error("config lists no schemes"));
        }
        let schemes = f
            .schemes
            .iter()
            .enumerate()
            .map(|(i, s)| build_column(s, &model, mapping, i))
            .collect::<Result<Vec<_>>>()?;
        let mut labels: Vec<&str> = schemes.iter().map(|c| c.label.as_str()).collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(config_error("scheme labels must be unique"));
        }
        let sim = SimConfig {
            n_paths: ov.paths.unwrap_or(f.sim.paths),
            t_max: f.sim.t_max,
            seed: ov.seed.unwrap_or(f.sim.seed),
            escape_level: f.sim.escape_level,
        };
        sim.validate(&model)?;
        let critical = schemes
            .iter()
            .map(|c| c.scheme.critical_capital())
            .fold(f64::NEG_INFINITY, f64::max);
        let x_grid = match (&ov.x_grid, &f.grid) {
            (Some(s), _) => parse_grid(s)?,
            (None, GridSection { x: Some(x), .. }) => x.clone(),
            (None, g) => {
                let start = g.start.unwrap_or(critical);
                linspace(
                    start,
                    g.stop.unwrap_or(start + 9.0),
                    g.points.unwrap_or(181),
                )?
            }
        };
        check_grid(&x_grid)?;
        for d in f.laplace.deltas.iter().chain(&f.validate.deltas) {
            if !(*d >= 0.0 && d.is_finite()) {
                return Err(config_error(format!("deltas must be >= 0, got {d}")));
            }
        }
        if let Some(rs) = &f.expected_time.r {
            if rs.is_empty() || rs.iter().any(|r| !(*r > 0.0)) {
                return Err(config_error("expected_time.r must list positive rates"));
            }
        }
        if let Some(x) = &f.validate.x {
            check_grid(x)?;
        }
        Ok(RunConfig {
            model,
            schemes,
            mapping,
            matching,
            welfare,
            sim,
            x_grid,
            output_dir: ov.out.clone().unwrap_or(f.output.dir),
            emit_plots: ov.plots || f.output.plots,
            deltas: f.laplace.deltas,
            r_list: f.expected_time.r,
            time_axis: f.expected_time.over,
            time_x: f.expected_time.x,
            target: f.optimize.target,
            b_max: f.optimize.b_max,
            validate_x: f.validate.x,
            validate_deltas: f.validate.deltas,
        })
    }

    pub fn load(path: &Path, ov: &Overrides) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text, ov)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
[model]
r = 0.5
lambda = 1.0
alpha = 1.0
x_star = 1.0

[premium]
mapping = "rate_scaling"

[[schemes]]
label = "uninsured"
kind = "uninsured"

[[schemes]]
label = "B=2"
kind = "barrier"
kappa = 0.5
theta = 0.5
barrier = 2.0
"#;

    #[test]
    fn parses_and_defaults() {
        let c = RunConfig::from_toml(BASE, &Overrides::default()).unwrap();
        assert_eq!(c.schemes.len(), 2);
        assert_eq!(c.x_grid.len(), 181);
        assert_eq!(c.x_grid[0], 1.0);
        assert_eq!(*c.x_grid.last().unwrap(), 10.0);
        assert_eq!(c.schemes[1].scheme.barrier, 2.0);
        assert_eq!(c.welfare.delta, 0.9);
        assert_eq!(c.matching, Matching::FluxContinuity);
    }

    #[test]
    fn overrides_win() {
        let ov = Overrides {
            x_grid: Some("1,2,3".into()),
            seed: Some(9),
            paths: Some(10),
            out: Some("o".into()),
            plots: true,
        };
        let c = RunConfig::from_toml(BASE, &ov).unwrap();
        assert_eq!(c.x_grid, vec![1.0, 2.0, 3.0]);
        assert_eq!((c.sim.seed, c.sim.n_paths), (9, 10));
        assert!(c.emit_plots);
        assert_eq!(parse_grid("1:2:3").unwrap(), vec![1.0, 1.5, 2.0]);
    }

    #[test]
    fn rejects_bad_configs() {
        let no_schemes = BASE.split("[[schemes]]").next().unwrap();
        assert!(RunConfig::from_toml(no_schemes, &Overrides::default()).is_err());
        let typo = BASE.replace("kappa = 0.5", "kapa = 0.5");
        assert!(RunConfig::from_toml(&typo, &Overrides::default()).is_err());
        let ov = Overrides {
            x_grid: Some("3,2".into()),
            ..Default::default()
        };
        assert!(RunConfig::from_toml(BASE, &ov).is_err());
        let dup = BASE.replace("label = \"B=2\"", "label = \"uninsured\"");
        assert!(RunConfig::from_toml(&dup, &Overrides::default()).is_err());
    }
}
