use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::data::{gen_disks, gen_swiss, Case, Spiral, DISK_RADIUS};
use super::render::render_decision_map;
use super::seed::derive_seed;
use super::HarnessError;
use crate::compiler::{
    compile_ball_cover_with, compile_convex, compile_union, margin_params, FacetRule, GateParams, UnionOptions,
};
use crate::dataset::Dataset;
use crate::geometry::{ball_cover_from_positives, ball_polytope};
use crate::metrics::MetricsReport;
use crate::network::{bce_loss, init_baseline, train, EarlyStop, InitScheme, LossCurve, NetworkSpec, TrainConfig};
use crate::Window;

/// A baseline scheme or the compiled geometric construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Init {
    Baseline(InitScheme),
    Ours,
}

impl Init {
    pub const ALL: [Init; 5] = [
        Init::Baseline(InitScheme::Random),
        Init::Baseline(InitScheme::Xavier),
        Init::Baseline(InitScheme::Kaiming),
        Init::Baseline(InitScheme::He),
        Init::Ours,
    ];
}

impl fmt::Display for Init {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Init::Baseline(s) => f.write_str(s.name()),
            Init::Ours => f.write_str("ours"),
        }
    }
}

impl FromStr for Init {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("ours") {
            return Ok(Init::Ours);
        }
        s.parse().map(Init::Baseline).map_err(|_| HarnessError::Config(format!("unknown init '{s}'")))
    }
}

impl TryFrom<String> for Init {
    type Error = HarnessError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Init> for String {
    fn from(i: Init) -> String {
        i.to_string()
    }
}

/// Ball-cover settings of the swiss-roll run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SwissConfig {
    pub spiral: Spiral,
    pub eps: f64,
    pub voxel_ratio: f64,
    pub budget: usize,
    pub sides: usize,
    pub kappa: f64,
    /// Outer sharpness `λ` of the per-ball units.
    pub lambda: f64,
    pub head_scale: f64,
    pub head_tau: f64,
    pub epochs: usize,
    pub early_stop: EarlyStop,
}

impl Default for SwissConfig {
    fn default() -> Self {
        SwissConfig {
            spiral: Spiral::default(),
            eps: 1.5,
            voxel_ratio: 0.6,
            budget: 120,
            sides: 24,
            kappa: 8.0,
            lambda: 6.0,
            head_scale: 6.0,
            head_tau: 0.5,
            epochs: 200,
            early_stop: EarlyStop { patience: 10, min_delta: 1e-4 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub case: Case,
    /// Sampling window; `None` picks `[−2, 2]²` for the disks and `[−16, 16]²`
    /// for the swiss roll.
    pub window: Option<Window>,
    pub train_n: usize,
    pub test_n: usize,
    pub hidden: Vec<usize>,
    pub inits: Vec<Init>,
    pub kappa_hidden: f64,
    pub train: TrainConfig,
    pub grid_n: usize,
    pub tau: f64,
    pub seed: u64,
    pub swiss: SwissConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            case: Case::Single,
            window: None,
            train_n: 12_000,
            test_n: 3_000,
            hidden: vec![16, 32],
            inits: Init::ALL.to_vec(),
            kappa_hidden: 30.0,
            train: TrainConfig::default(),
            grid_n: 200,
            tau: 0.5,
            seed: 0,
            swiss: SwissConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn window(&self) -> Window {
        self.window.unwrap_or(match self.case {
            Case::Swiss => Window::square(16.0),
            _ => Window::square(2.0),
        })
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if !self.window().is_valid() {
            return bad("window must be nonempty".into());
        }
        if self.train_n == 0 || self.test_n == 0 {
            return bad("train_n and test_n must be at least 1".into());
        }
        if self.case != Case::Swiss {
            if self.hidden.is_empty() || self.inits.is_empty() {
                return bad("need at least one hidden size and one init".into());
            }
            let min_h = if self.case == Case::Double { 6 } else { 3 };
            if let Some(h) = self.hidden.iter().find(|&&h| h < min_h) {
                return bad(format!("hidden size {h} is below {min_h} for the {} case", self.case));
            }
        }
        if self.grid_n < 2 {
            return bad("grid_n must be at least 2".into());
        }
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return bad(format!("tau must lie in (0, 1), got {}", self.tau));
        }
        if !(self.kappa_hidden > 0.0) || !self.kappa_hidden.is_finite() {
            return bad(format!("kappa_hidden must be positive, got {}", self.kappa_hidden));
        }
        self.train.validate()?;
        if self.case == Case::Swiss {
            self.swiss.spiral.validate()?;
        }
        Ok(())
    }

    fn data_seed(&self, which: &str) -> u64 {
        derive_seed(self.seed, &format!("{}/{which}", self.case))
    }

    /// Training and test sets; every row of an experiment shares them.
    pub fn datasets(&self) -> Result<(Dataset, Dataset), HarnessError> {
        let w = self.window();
        let gen = |n, which| match self.case {
            Case::Swiss => gen_swiss(&w, n, self.data_seed(which), &self.swiss.spiral),
            case => gen_disks(case, &w, n, self.data_seed(which)),
        };
        Ok((gen(self.train_n, "train")?, gen(self.test_n, "test")?))
    }
}

/// Compiled network for a disk case: one circumscribed `h`-gon for the single
/// disk, a union of two `h/2`-gons with default margins for the double disk.
pub fn ours_spec(case: Case, h: usize, kappa: f64) -> Result<NetworkSpec, HarnessError> {
    match case {
        Case::Single => {
            let comp = ball_polytope(&case.centers()[0], DISK_RADIUS, h, 2, 0)?;
            Ok(compile_convex(&comp, kappa)?)
        }
        Case::Double => {
            let m = h / 2;
            let comps =
                case.centers().iter().map(|c| ball_polytope(c, DISK_RADIUS, m, 2, 0)).collect::<Result<Vec<_>, _>>()?;
            let params = GateParams::from_margins(m, comps.len(), kappa)?;
            Ok(compile_union(&comps, &params)?)
        }
        Case::Swiss => Err(HarnessError::Config("the swiss roll is compiled from a ball cover".into())),
    }
}

/// Ball-cover network for the swiss roll built from the positive samples of `train`.
pub fn swiss_spec(train: &Dataset, sc: &SwissConfig) -> Result<NetworkSpec, HarnessError> {
    let positives: Vec<[f64; 2]> =
        train.points().zip(train.labels()).filter(|(_, &y)| y).map(|(p, _)| [p[0], p[1]]).collect();
    if positives.is_empty() {
        return Err(HarnessError::NoPositives);
    }
    let cover = ball_cover_from_positives(&positives, sc.eps, sc.voxel_ratio, sc.budget)?;
    let mg = margin_params(sc.sides, cover.balls.len())?;
    let params = GateParams::new(sc.kappa, sc.lambda, mg.eta, mg.delta)?;
    let opts = UnionOptions { enforce_margins: false, head_scale: sc.head_scale };
    let mut spec = compile_ball_cover_with(&cover, FacetRule::Fixed(sc.sides), &params, &opts)?;
    spec.head.tau = sc.head_tau;
    Ok(spec)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowResult {
    pub case: Case,
    pub h: usize,
    pub init: Init,
    pub init_metrics: MetricsReport,
    pub final_metrics: MetricsReport,
    pub init_bce: f64,
    pub final_bce: f64,
    pub stopped_at: Option<usize>,
}

impl RowResult {
    pub fn name(&self) -> String {
        row_name(self.case, self.h, self.init)
    }
}

fn row_name(case: Case, h: usize, init: Init) -> String {
    format!("{case}_H{h}_{init}")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentOutcome {
    pub rows: Vec<RowResult>,
}

fn fmt_metric(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |v| format!("{v:.6}"))
}

impl ExperimentOutcome {
    /// `case,H,init,init_brier,init_auc,init_iou,final_brier,final_auc,final_iou`.
    pub fn summary_csv(&self) -> String {
        let mut s = String::from("case,H,init,init_brier,init_auc,init_iou,final_brier,final_auc,final_iou\n");
        for r in &self.rows {
            let (a, b) = (&r.init_metrics, &r.final_metrics);
            s.push_str(&format!(
                "{},{},{},{:.6},{},{},{:.6},{},{}\n",
                r.case,
                r.h,
                r.init,
                a.brier,
                fmt_metric(a.auc),
                fmt_metric(a.iou),
                b.brier,
                fmt_metric(b.auc),
                fmt_metric(b.iou)
            ));
        }
        s
    }

    /// `case,H,init,phase,brier,auc,iou`, one line per row and phase.
    pub fn metrics_csv(&self) -> String {
        let mut s = String::from("case,H,init,phase,brier,auc,iou\n");
        for r in &self.rows {
            for (phase, m) in [("init", &r.init_metrics), ("final", &r.final_metrics)] {
                s.push_str(&format!(
                    "{},{},{},{phase},{:.6},{},{}\n",
                    r.case,
                    r.h,
                    r.init,
                    m.brier,
                    fmt_metric(m.auc),
                    fmt_metric(m.iou)
                ));
            }
        }
        s
    }
}

/// Metrics and mean BCE of `spec` on `data`.
pub fn evaluate(spec: &NetworkSpec, data: &Dataset, tau: f64) -> Result<(MetricsReport, f64), HarnessError> {
    let probs: Vec<f64> = spec.forward_batch(&data.point_vec())?.into_iter().map(|o| o.prob).collect();
    let report = MetricsReport::evaluate(&probs, data.labels(), tau)?;
    Ok((report, bce_loss(&probs, data.labels())?))
}

struct RowJob {
    h: usize,
    init: Init,
    spec: NetworkSpec,
    train: TrainConfig,
}

fn write_artifacts(
    dir: &Path,
    name: &str,
    cfg: &ExperimentConfig,
    specs: [&NetworkSpec; 2],
    curve: &LossCurve,
) -> Result<(), HarnessError> {
    let w = cfg.window();
    fs::write(dir.join("curves").join(format!("{name}.csv")), curve.to_csv())?;
    for (phase, spec) in ["init", "final"].into_iter().zip(specs) {
        let mut map = render_decision_map(spec, &w, cfg.grid_n)?;
        map.tau = cfg.tau;
        fs::write(dir.join("maps").join(format!("{name}_{phase}.ppm")), map.to_ppm())?;
        fs::write(dir.join("contours").join(format!("{name}_{phase}.csv")), map.contour_csv())?;
        fs::write(dir.join("specs").join(format!("{name}_{phase}.json")), spec.to_json())?;
    }
    Ok(())
}

fn run_row(
    job: &RowJob,
    cfg: &ExperimentConfig,
    data: &(Dataset, Dataset),
    outdir: Option<&Path>,
) -> Result<RowResult, HarnessError> {
    let (train_set, test_set) = data;
    let name = row_name(cfg.case, job.h, job.init);
    let (init_metrics, init_bce) = evaluate(&job.spec, test_set, cfg.tau)?;
    let (trained, curve) = train(&job.spec, train_set, &job.train)?;
    let (final_metrics, final_bce) = evaluate(&trained, test_set, cfg.tau)?;
    log::info!(
        "{name}: init auc {} iou {} | final auc {} iou {}",
        fmt_metric(init_metrics.auc),
        fmt_metric(init_metrics.iou),
        fmt_metric(final_metrics.auc),
        fmt_metric(final_metrics.iou)
    );
    if let Some(dir) = outdir {
        write_artifacts(dir, &name, cfg, [&job.spec, &trained], &curve)?;
    }
    Ok(RowResult {
        case: cfg.case,
        h: job.h,
        init: job.init,
        init_metrics,
        final_metrics,
        init_bce,
        final_bce,
        stopped_at: curve.stopped_at,
    })
}

/// Runs every `(H, init)` row of `cfg.case` (a single row for the swiss roll).
///
/// Rows run in parallel, each with its own derived seed; when `outdir` is
/// given each row writes its artifacts as soon as it finishes and the
/// summary tables are written last, in row order.
pub fn run_experiment(cfg: &ExperimentConfig, outdir: Option<&Path>) -> Result<ExperimentOutcome, HarnessError> {
    cfg.validate()?;
    if let Some(dir) = outdir {
        for sub in ["curves", "maps", "contours", "specs"] {
            fs::create_dir_all(dir.join(sub))?;
        }
    }
    let data = cfg.datasets()?;
    let jobs = if cfg.case == Case::Swiss {
        let spec = swiss_spec(&data.0, &cfg.swiss)?;
        let h = spec.unit_counts()[0];
        let train = TrainConfig {
            epochs: cfg.swiss.epochs,
            early_stop: Some(cfg.swiss.early_stop),
            seed: derive_seed(cfg.seed, &row_name(cfg.case, h, Init::Ours)),
            ..cfg.train.clone()
        };
        vec![RowJob { h, init: Init::Ours, spec, train }]
    } else {
        let mut jobs = Vec::new();
        for &h in &cfg.hidden {
            for &init in &cfg.inits {
                let seed = derive_seed(cfg.seed, &row_name(cfg.case, h, init));
                let spec = match init {
                    Init::Ours => ours_spec(cfg.case, h, cfg.kappa_hidden)?,
                    Init::Baseline(s) => init_baseline(s, &[2, h, 1], seed)?,
                };
                jobs.push(RowJob { h, init, spec, train: TrainConfig { seed, ..cfg.train.clone() } });
            }
        }
        jobs
    };
    let rows = jobs.par_iter().map(|job| run_row(job, cfg, &data, outdir)).collect::<Result<Vec<_>, _>>()?;
    let outcome = ExperimentOutcome { rows };
    if let Some(dir) = outdir {
        fs::write(dir.join("summary.csv"), outcome.summary_csv())?;
        fs::write(dir.join("metrics.csv"), outcome.metrics_csv())?;
    }
    Ok(outcome)
}
