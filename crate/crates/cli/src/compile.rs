use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use clap::{Args, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use tropinit::compiler::{
    compile_ball_cover_with, compile_convex, compile_union_with, ls_initializer_1d, margin_params, Basis, FacetRule,
    GateParams, UnionOptions,
};
use tropinit::geometry::{ball_cover_from_positives, polygon_facets, BallCover, ConvexComponent, Facet};

use crate::error::{CliError, CliResult, Code};
use crate::io::{emit, read_dataset, read_json, require_input, require_outputs, versioned_json, write_file};

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompileCommand {
    /// One convex region: a single layer of gates with threshold m − ½.
    Convex(ConvexArgs),
    /// Union of convex regions: gates, per-component units and an OR head.
    Union(UnionArgs),
    /// Ball cover, given directly or built from the positives of a dataset.
    Cover(CoverArgs),
    /// One-dimensional least-squares output weights over fixed centers.
    Ls1d(Ls1dArgs),
}

/// A convex region as CCW vertices or as unit-normal facets.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RegionInput {
    Vertices { vertices: Vec<[f64; 2]> },
    Facets { dim: usize, facets: Vec<Facet> },
}

impl RegionInput {
    fn component(self) -> CliResult<ConvexComponent> {
        Ok(match self {
            RegionInput::Vertices { vertices } => polygon_facets(&vertices)?,
            RegionInput::Facets { dim, facets } => ConvexComponent::new(dim, facets)?,
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum UnionInput {
    Wrapped { components: Vec<RegionInput> },
    Bare(Vec<RegionInput>),
}

#[derive(Debug, Args, Serialize)]
pub struct ConvexArgs {
    /// Region JSON: `{"vertices": [[x, y], ...]}` or `{"dim": d, "facets": [{"u": [...], "h": h}, ...]}`.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 30.0)]
    pub kappa: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct MarginArgs {
    #[arg(long, default_value_t = 30.0)]
    pub kappa: f64,
    /// Outer sharpness; defaults to 4·ln((1 − δ)/δ).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Inner confidence tolerance; defaults to 1/(8M).
    #[arg(long)]
    pub eta: Option<f64>,
    /// Outer confidence tolerance; defaults to 1/(8R).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Accept parameters outside the margin bounds (logged as warnings).
    #[arg(long)]
    pub allow_margin_violation: bool,
    #[arg(long, default_value_t = 1.0)]
    pub head_scale: f64,
}

impl MarginArgs {
    fn params(&self, m: usize, r: usize) -> CliResult<(GateParams, UnionOptions)> {
        let mg = margin_params(m, r)?;
        let params = GateParams::new(
            self.kappa,
            self.lambda.unwrap_or(mg.lambda),
            self.eta.unwrap_or(mg.eta),
            self.delta.unwrap_or(mg.delta),
        )?;
        Ok((params, UnionOptions { enforce_margins: !self.allow_margin_violation, head_scale: self.head_scale }))
    }
}

#[derive(Debug, Args, Serialize)]
pub struct UnionArgs {
    /// `{"components": [region, ...]}` or a bare array of regions.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[command(flatten)]
    pub margins: MarginArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CoverArgs {
    /// Ball cover JSON `{"dim": 2, "balls": [{"c": [x, y], "r": r}, ...]}`.
    #[arg(long, conflicts_with = "data", required_unless_present = "data")]
    pub cover: Option<PathBuf>,
    /// Labelled CSV whose positives seed a voxel + farthest-point cover.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Ball radius of the cover built from `--data`.
    #[arg(long, default_value_t = 1.5)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.6)]
    pub voxel_ratio: f64,
    #[arg(long, default_value_t = 120)]
    pub budget: usize,
    /// Facets per ball; exclusive with `--eps-poly`.
    #[arg(long, conflicts_with = "eps_poly", required_unless_present = "eps_poly")]
    pub sides: Option<usize>,
    /// Per-ball polytope tolerance.
    #[arg(long)]
    pub eps_poly: Option<f64>,
    #[command(flatten)]
    pub margins: MarginArgs,
    /// Head threshold on the sum of per-ball units.
    #[arg(long, default_value_t = 0.5)]
    pub tau: f64,
    /// Also write the cover itself as JSON.
    #[arg(long)]
    pub cover_out: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisArg {
    Sigmoid,
    Relu,
}

#[derive(Debug, Args, Serialize)]
pub struct Ls1dArgs {
    /// CSV with header `x,y` and real-valued targets.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub centers: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    #[arg(long, value_enum, default_value_t = BasisArg::Sigmoid)]
    pub basis: BasisArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn read_xy(path: &Path) -> CliResult<(Vec<f64>, Vec<f64>)> {
    require_input(path)?;
    let file = File::open(path).map_err(|e| CliError::new(Code::Io, format!("{}: {e}", path.display())))?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(BufReader::new(file));
    let bad = |e: csv::Error| CliError::input(format!("{}: {e}", path.display()));
    let header = rdr.headers().map_err(bad)?;
    if header.iter().collect::<Vec<_>>() != ["x", "y"] {
        return Err(CliError::input(format!("{}: expected header x,y", path.display())));
    }
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for row in rdr.deserialize::<(f64, f64)>() {
        let (x, y) = row.map_err(bad)?;
        xs.push(x);
        ys.push(y);
    }
    Ok((xs, ys))
}

impl CompileCommand {
    pub fn execute(&self) -> CliResult<()> {
        match self {
            CompileCommand::Convex(a) => {
                require_outputs([&a.out])?;
                let comp = read_json::<RegionInput>(&a.input)?.component()?;
                let spec = compile_convex(&comp, a.kappa)?;
                emit(a.out.as_deref(), versioned_json(&spec).as_bytes())
            }
            CompileCommand::Union(a) => {
                require_outputs([&a.out])?;
                let regions = match read_json::<UnionInput>(&a.input)? {
                    UnionInput::Wrapped { components } | UnionInput::Bare(components) => components,
                };
                let comps = regions.into_iter().map(RegionInput::component).collect::<CliResult<Vec<_>>>()?;
                let m = comps.iter().map(|c| c.len()).max().unwrap_or(1);
                let (params, opts) = a.margins.params(m, comps.len().max(1))?;
                let spec = compile_union_with(&comps, &params, &opts)?;
                emit(a.out.as_deref(), versioned_json(&spec).as_bytes())
            }
            CompileCommand::Cover(a) => {
                require_outputs([&a.out, &a.cover_out])?;
                let cover = match (&a.cover, &a.data) {
                    (Some(path), _) => read_json::<BallCover>(path)?,
                    (None, Some(path)) => {
                        let (data, has_labels) = read_dataset(path)?;
                        if !has_labels || data.dim() != 2 {
                            return Err(CliError::input("cover data must be a labelled 2D CSV"));
                        }
                        let pos: Vec<[f64; 2]> =
                            data.points().zip(data.labels()).filter(|(_, &y)| y).map(|(p, _)| [p[0], p[1]]).collect();
                        ball_cover_from_positives(&pos, a.eps, a.voxel_ratio, a.budget)?
                    }
                    (None, None) => return Err(CliError::new(Code::Flag, "one of --cover or --data is required")),
                };
                let rule = match (a.sides, a.eps_poly) {
                    (Some(m), _) => FacetRule::Fixed(m),
                    (None, Some(e)) => FacetRule::Tolerance(e),
                    (None, None) => return Err(CliError::new(Code::Flag, "one of --sides or --eps-poly is required")),
                };
                let m = match rule {
                    FacetRule::Fixed(m) => m,
                    FacetRule::Tolerance(e) => cover
                        .balls
                        .iter()
                        .map(|b| tropinit::geometry::facet_count_for_tolerance(b.r, e, cover.dim))
                        .collect::<Result<Vec<_>, _>>()?
                        .into_iter()
                        .max()
                        .unwrap_or(3),
                };
                let (params, opts) = a.margins.params(m, cover.balls.len().max(1))?;
                let mut spec = compile_ball_cover_with(&cover, rule, &params, &opts)?;
                spec.head.tau = a.tau;
                spec.validate()?;
                if let Some(p) = &a.cover_out {
                    write_file(p, versioned_json(&cover).as_bytes())?;
                }
                emit(a.out.as_deref(), versioned_json(&spec).as_bytes())
            }
            CompileCommand::Ls1d(a) => {
                require_outputs([&a.out])?;
                let (xs, ys) = read_xy(&a.data)?;
                let basis = match a.basis {
                    BasisArg::Sigmoid => Basis::Sigmoid,
                    BasisArg::Relu => Basis::Relu,
                };
                let fit = ls_initializer_1d(&xs, &ys, &a.centers, a.k, basis)?;
                emit(a.out.as_deref(), versioned_json(&fit.spec).as_bytes())
            }
        }
    }
}
