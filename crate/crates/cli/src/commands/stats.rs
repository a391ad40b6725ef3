use std::path::{Path, PathBuf};

use clap::Args;
use cxrtriage::datastore::prevalence_stats;
use serde::{Deserialize, Serialize};

use super::{json_bytes, read_records, required, Command, Outputs};
use crate::config::impl_merge;
use crate::error::CliError;

pub(crate) const NAME: &str = "stats";

/// Count and percentage of each label state per condition.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct StatsArgs {
    /// Labeled records CSV
    #[arg(long)]
    pub records: Option<PathBuf>,
    /// Prevalence table CSV
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Counts as JSON; usable as `eval --prevalence-from`
    #[arg(long)]
    pub json_out: Option<PathBuf>,
}

impl_merge!(StatsArgs { records, out, json_out });

impl Command for StatsArgs {
    const NAME: &'static str = NAME;

    fn resolve(&mut self) -> Result<(), CliError> {
        required(&self.records, "records")?;
        required(&self.out, "out")?;
        Ok(())
    }

    fn inputs(&self) -> Vec<PathBuf> {
        self.records.iter().cloned().collect()
    }

    fn primary_output(&self) -> &Path {
        self.out.as_deref().expect("resolved")
    }

    fn execute(&self) -> Result<Outputs, CliError> {
        let records = read_records(required(&self.records, "records")?)?;
        let table = prevalence_stats(&records)?;
        let mut csv = Vec::new();
        table.write_csv(&mut csv).map_err(|e| CliError::internal(e.to_string()))?;
        let mut files = vec![(self.out.clone().expect("resolved"), csv)];
        if let Some(p) = &self.json_out {
            files.push((p.clone(), json_bytes(&table)?));
        }
        Ok(Outputs { files, summary: format!("{} records", table.total) })
    }
}
