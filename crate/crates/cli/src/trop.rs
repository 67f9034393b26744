use std::path::PathBuf;

use clap::{Args, Subcommand};
use serde::Serialize;
use serde_json::json;
use tropinit::tropical::{dual_subdivision, duality_report, enumerate_curve, TropicalPolynomial};
use tropinit::Window;

use crate::error::{CliError, CliResult, Code};
use crate::io::{emit, read_json, require_outputs, versioned_json};

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TropCommand {
    /// Value and maximizing monomials at a point.
    Eval(EvalArgs),
    /// Vertices, edges and regions of a planar tropical curve.
    Curve(PolyArgs),
    /// Regular subdivision of the Newton polygon.
    Dual(PolyArgs),
    /// Compare curve and subdivision counts; fails when any pair differs.
    DualityCheck(DualityArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct PolyArgs {
    /// Polynomial JSON: `{"dim": 2, "monomials": [{"u": [1, 0], "c": 0.5}, ...]}`.
    #[arg(long)]
    pub poly: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EvalArgs {
    #[command(flatten)]
    pub io: PolyArgs,
    /// Comma-separated coordinates.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub point: Vec<f64>,
    /// Tie tolerance for the maximizing set.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct DualityArgs {
    #[command(flatten)]
    pub io: PolyArgs,
    /// Window `xmin,xmax,ymin,ymax` for the in-window counts.
    #[arg(long, value_parser = parse_window, default_value = "-2,2,-2,2", allow_hyphen_values = true)]
    pub window: Window,
    #[arg(long, default_value_t = 256)]
    pub grid: usize,
}

pub fn parse_window(s: &str) -> Result<Window, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("cannot parse {t:?} as a number")))
        .collect::<Result<_, _>>()?;
    if v.len() != 4 {
        return Err(format!("expected xmin,xmax,ymin,ymax, got {} values", v.len()));
    }
    Window::new(v[0], v[1], v[2], v[3]).ok_or_else(|| "window must have xmin < xmax and ymin < ymax".into())
}

impl TropCommand {
    pub fn execute(&self) -> CliResult<()> {
        match self {
            TropCommand::Eval(a) => {
                require_outputs([&a.io.out])?;
                let poly: TropicalPolynomial = read_json(&a.io.poly)?;
                let value = poly.eval(&a.point)?;
                let argmax: Vec<&Vec<i64>> =
                    poly.argmax(&a.point, a.tol)?.into_iter().map(|i| &poly.monomials()[i].exponent).collect();
                let on = argmax.len() >= 2;
                emit(
                    a.io.out.as_deref(),
                    versioned_json(&json!({ "value": value, "argmax": argmax, "on_hypersurface": on })).as_bytes(),
                )
            }
            TropCommand::Curve(a) => {
                require_outputs([&a.out])?;
                let poly: TropicalPolynomial = read_json(&a.poly)?;
                let curve = enumerate_curve(&poly)?;
                emit(a.out.as_deref(), versioned_json(&json!({ "curve": curve })).as_bytes())
            }
            TropCommand::Dual(a) => {
                require_outputs([&a.out])?;
                let poly: TropicalPolynomial = read_json(&a.poly)?;
                let sub = dual_subdivision(&poly)?;
                let polygons = sub.polygons();
                emit(a.out.as_deref(), versioned_json(&json!({ "subdivision": sub, "polygons": polygons })).as_bytes())
            }
            TropCommand::DualityCheck(a) => {
                require_outputs([&a.io.out])?;
                let poly: TropicalPolynomial = read_json(&a.io.poly)?;
                let report = duality_report(&poly, &a.window, a.grid)?;
                let ok = report.counts_match();
                emit(a.io.out.as_deref(), versioned_json(&json!({ "report": report, "counts_match": ok })).as_bytes())?;
                if ok {
                    Ok(())
                } else {
                    Err(CliError::new(Code::Numeric, "duality counts differ"))
                }
            }
        }
    }
}
