use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use tropinit::harness::{render_decision_map, run_experiment, Case, ExperimentConfig};
use tropinit::metrics::MetricsReport;
use tropinit::network::{bce_loss, train, EarlyStop, NetworkSpec, TrainConfig};
use tropinit::Window;

use crate::error::{CliError, CliResult, Code};
use crate::io::{emit, read_dataset, read_json, require_outputs, versioned_json, write_file};
use crate::trop::parse_window;

#[derive(Debug, Args, Serialize)]
pub struct TrainArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// Labelled CSV `x1,...,xd,y`.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value_t = 80)]
    pub epochs: usize,
    #[arg(long, default_value_t = 512)]
    pub batch: usize,
    #[arg(long, default_value_t = 3e-3)]
    pub lr: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Stop after this many epochs without validation improvement (10% held out).
    #[arg(long)]
    pub patience: Option<usize>,
    #[arg(long, default_value_t = 1e-4)]
    pub min_delta: f64,
    /// Trained spec; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-epoch loss CSV.
    #[arg(long)]
    pub curve: Option<PathBuf>,
}

impl TrainArgs {
    pub fn execute(&self) -> CliResult<()> {
        require_outputs([&self.out, &self.curve])?;
        let spec: NetworkSpec = read_json(&self.spec)?;
        let (data, labelled) = read_dataset(&self.data)?;
        if !labelled {
            return Err(CliError::input("training data needs a label column"));
        }
        let cfg = TrainConfig {
            epochs: self.epochs,
            batch_size: self.batch,
            learning_rate: self.lr,
            seed: self.seed,
            early_stop: self.patience.map(|patience| EarlyStop { patience, min_delta: self.min_delta }),
            ..TrainConfig::default()
        };
        let (trained, curve) = train(&spec, &data, &cfg)?;
        if let Some(p) = &self.curve {
            write_file(p, curve.to_csv().as_bytes())?;
        }
        if let Some(at) = curve.stopped_at {
            log::info!("early stop at epoch {at}");
        }
        emit(self.out.as_deref(), versioned_json(&trained).as_bytes())
    }
}

#[derive(Debug, Args, Serialize)]
pub struct EvalArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// CSV of points, optionally with a trailing label column.
    #[arg(long)]
    pub data: PathBuf,
    /// Per-point predictions CSV `score,logit,prob,decision`; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Metrics JSON; printed to stderr when omitted and labels are present.
    #[arg(long)]
    pub metrics: Option<PathBuf>,
    /// Threshold for the IoU decision.
    #[arg(long, default_value_t = 0.5)]
    pub tau: f64,
}

#[derive(Serialize)]
struct EvalMetrics {
    #[serde(flatten)]
    report: MetricsReport,
    bce: f64,
}

impl EvalArgs {
    pub fn execute(&self) -> CliResult<()> {
        require_outputs([&self.out, &self.metrics])?;
        let spec: NetworkSpec = read_json(&self.spec)?;
        let (data, labelled) = read_dataset(&self.data)?;
        if data.dim() != spec.input_dim() {
            return Err(CliError::input(format!(
                "data dimension {} does not match spec input {}",
                data.dim(),
                spec.input_dim()
            )));
        }
        let outs = spec.forward_batch(&data.point_vec())?;
        let mut csv = String::from("score,logit,prob,decision\n");
        for o in &outs {
            writeln!(csv, "{:.9},{:.9},{:.9},{}", o.score, o.logit, o.prob, u8::from(o.decision())).expect("string");
        }
        emit(self.out.as_deref(), csv.as_bytes())?;
        if !labelled {
            if self.metrics.is_some() {
                return Err(CliError::input("metrics need a label column"));
            }
            return Ok(());
        }
        let probs: Vec<f64> = outs.iter().map(|o| o.prob).collect();
        let report = MetricsReport::evaluate(&probs, data.labels(), self.tau)?;
        let bce = bce_loss(&probs, data.labels())?;
        let json = versioned_json(&EvalMetrics { report, bce });
        match &self.metrics {
            Some(p) => write_file(p, json.as_bytes()),
            None => {
                eprint!("{json}");
                Ok(())
            }
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct RenderArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// Window `xmin,xmax,ymin,ymax`.
    #[arg(long, value_parser = parse_window, default_value = "-2,2,-2,2", allow_hyphen_values = true)]
    pub window: Window,
    #[arg(long, default_value_t = 200)]
    pub grid: usize,
    /// Grayscale PPM of the probability map.
    #[arg(long)]
    pub ppm: Option<PathBuf>,
    /// CSV of the decision contour polylines.
    #[arg(long)]
    pub contour: Option<PathBuf>,
    /// Probability level of the contour.
    #[arg(long, default_value_t = 0.5)]
    pub tau: f64,
}

impl RenderArgs {
    pub fn execute(&self) -> CliResult<()> {
        if self.ppm.is_none() && self.contour.is_none() {
            return Err(CliError::new(Code::Flag, "at least one of --ppm or --contour is required"));
        }
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(CliError::input(format!("tau must lie in (0, 1), got {}", self.tau)));
        }
        require_outputs([&self.ppm, &self.contour])?;
        let spec: NetworkSpec = read_json(&self.spec)?;
        let mut map = render_decision_map(&spec, &self.window, self.grid)?;
        map.tau = self.tau;
        if let Some(p) = &self.ppm {
            write_file(p, &map.to_ppm())?;
        }
        if let Some(p) = &self.contour {
            write_file(p, map.contour_csv().as_bytes())?;
        }
        Ok(())
    }
}

#[derive(Debug, Args, Serialize)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub case: Case,
    /// JSON overrides of the experiment configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory for summary.csv, metrics.csv, curves, maps, contours and specs.
    #[arg(long)]
    pub outdir: PathBuf,
}

impl ExperimentArgs {
    pub fn resolve(&self) -> CliResult<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => read_json::<ExperimentConfig>(p)?,
            None => ExperimentConfig::default(),
        };
        cfg.case = self.case;
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn execute(&self) -> CliResult<()> {
        let cfg = self.resolve()?;
        fs::create_dir_all(&self.outdir)
            .map_err(|e| CliError::new(Code::Io, format!("{}: {e}", self.outdir.display())))?;
        write_file(&self.outdir.join("config.json"), versioned_json(&cfg).as_bytes())?;
        let outcome = run_experiment(&cfg, Some(&self.outdir))?;
        emit(None, outcome.summary_csv().as_bytes())
    }
}
