use std::path::{Path, PathBuf};

use clap::Args;
use cxrtriage::metrics::{ratio_grid, wr_curve, WrSensitivity};
use cxrtriage::EvalReport;
use serde::{Deserialize, Serialize};

use super::{csv_bytes, read_json, required, Command, Outputs};
use crate::config::impl_merge;
use crate::error::CliError;
use crate::plot::{line_chart, Series};

pub(crate) const NAME: &str = "wr-curve";

/// Mean work reduction of a report's operating points across disease ratios.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct WrCurveArgs {
    /// Report JSON written by `eval --report-out`
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Disease-ratio grid spacing; must divide 1 [default: 0.01]
    #[arg(long)]
    pub grid_step: Option<f64>,
    /// Extra disease ratio to include and print; repeatable
    #[arg(long)]
    pub at: Vec<f64>,
    /// Use the report's target sensitivity instead of the achieved ones
    #[arg(long)]
    pub nominal_sens: bool,
    /// Curve CSV (disease_ratio,work_reduction)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg_out: Option<PathBuf>,
}

impl_merge!(WrCurveArgs { report, grid_step, at, nominal_sens, out, svg_out });

impl Command for WrCurveArgs {
    const NAME: &'static str = NAME;

    fn resolve(&mut self) -> Result<(), CliError> {
        required(&self.report, "report")?;
        required(&self.out, "out")?;
        self.grid_step.get_or_insert(0.01);
        Ok(())
    }

    fn inputs(&self) -> Vec<PathBuf> {
        self.report.iter().cloned().collect()
    }

    fn primary_output(&self) -> &Path {
        self.out.as_deref().expect("resolved")
    }

    fn execute(&self) -> Result<Outputs, CliError> {
        let report: EvalReport = read_json(required(&self.report, "report")?)?;
        let mode = if self.nominal_sens { WrSensitivity::Nominal } else { report.wr_sensitivity };
        let points = report.operating_points(mode);

        let mut grid = ratio_grid(self.grid_step.unwrap_or(0.01))?;
        grid.extend(&self.at);
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        let curve = wr_curve(&points, &grid)?;

        let csv = csv_bytes(|w| {
            let mut wtr = csv::Writer::from_writer(w);
            wtr.write_record(["disease_ratio", "work_reduction"])?;
            for p in &curve {
                wtr.write_record([p.disease_ratio.to_string(), p.work_reduction.to_string()])?;
            }
            wtr.flush()?;
            Ok(())
        })?;
        let mut files = vec![(self.out.clone().expect("resolved"), csv)];
        if let Some(p) = &self.svg_out {
            let series = [Series {
                label: report.model_id.clone(),
                points: curve.iter().map(|p| (p.disease_ratio, p.work_reduction)).collect(),
            }];
            files.push((
                p.clone(),
                line_chart("Work reduction", "disease ratio", "work reduction", &series).into_bytes(),
            ));
        }

        let mut lines = vec![format!("{} grid points", curve.len())];
        for &p in &self.at {
            let wr = wr_curve(&points, &[p])?[0].work_reduction;
            lines.push(format!("disease ratio {p}: work reduction {wr:.3}"));
        }
        Ok(Outputs { files, summary: lines.join("\n") })
    }
}
