use std::path::{Path, PathBuf};

use clap::Args;
use cxrtriage::metrics::{compare_models, format_change, Better};
use cxrtriage::EvalReport;
use serde::{Deserialize, Serialize};

use super::{csv_bytes, json_bytes, read_json, required, Command, Outputs};
use crate::config::impl_merge;
use crate::error::CliError;

pub(crate) const NAME: &str = "compare";

/// Per-condition AUROC deltas between two reports on the same dataset.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct CompareArgs {
    /// Baseline report JSON
    #[arg(long)]
    pub report_a: Option<PathBuf>,
    /// Candidate report JSON
    #[arg(long)]
    pub report_b: Option<PathBuf>,
    /// Comparison CSV
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json_out: Option<PathBuf>,
}

impl_merge!(CompareArgs { report_a, report_b, out, json_out });

impl Command for CompareArgs {
    const NAME: &'static str = NAME;

    fn resolve(&mut self) -> Result<(), CliError> {
        required(&self.report_a, "report-a")?;
        required(&self.report_b, "report-b")?;
        required(&self.out, "out")?;
        Ok(())
    }

    fn inputs(&self) -> Vec<PathBuf> {
        self.report_a.iter().chain(&self.report_b).cloned().collect()
    }

    fn primary_output(&self) -> &Path {
        self.out.as_deref().expect("resolved")
    }

    fn execute(&self) -> Result<Outputs, CliError> {
        let a: EvalReport = read_json(required(&self.report_a, "report-a")?)?;
        let b: EvalReport = read_json(required(&self.report_b, "report-b")?)?;
        let cmp = compare_models(&a, &b)?;
        let mut files = vec![(self.out.clone().expect("resolved"), csv_bytes(|w| cmp.write_csv(w))?)];
        if let Some(p) = &self.json_out {
            files.push((p.clone(), json_bytes(&cmp)?));
        }
        let n = cmp.rows.len();
        let mut lines = vec![
            format!("{} wins {}/{n}", cmp.model_a, cmp.wins(Better::A)),
            format!("{} wins {}/{n}", cmp.model_b, cmp.wins(Better::B)),
        ];
        for m in &cmp.means {
            let change = m.relative_change.map(format_change).unwrap_or_else(|| "n/a".into());
            lines.push(format!("mean {}: {:.3} -> {:.3} ({change})", m.metric, m.a, m.b));
        }
        Ok(Outputs { files, summary: lines.join("\n") })
    }
}
