use std::path::{Path, PathBuf};

use clap::Args;
use cxrtriage::datastore::{split_dataset, Split, DEFAULT_RATIOS};
use serde::{Deserialize, Serialize};

use super::{read_records, required, Command, Outputs};
use crate::config::impl_merge;
use crate::error::CliError;

pub(crate) const NAME: &str = "split";

/// Seeded train/validation/test split, grouped by patient.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct SplitArgs {
    /// Records CSV
    #[arg(long)]
    pub records: Option<PathBuf>,
    /// Assignment CSV (study_id,split)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Shuffle seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Train,validation,test fractions [default: 0.6,0.2,0.2]
    #[arg(long, value_delimiter = ',')]
    pub ratios: Vec<f64>,
    /// Split studies independently even when they share a patient
    #[arg(long)]
    pub no_group: bool,
}

impl_merge!(SplitArgs { records, out, seed, ratios, no_group });

impl Command for SplitArgs {
    const NAME: &'static str = NAME;

    fn resolve(&mut self) -> Result<(), CliError> {
        required(&self.records, "records")?;
        required(&self.out, "out")?;
        self.seed.get_or_insert(0);
        if self.ratios.is_empty() {
            self.ratios = DEFAULT_RATIOS.to_vec();
        }
        if self.ratios.len() != 3 {
            return Err(CliError::input(format!("--ratios needs three values, got {}", self.ratios.len())));
        }
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
        let ratios = [self.ratios[0], self.ratios[1], self.ratios[2]];
        let split = split_dataset(&records, ratios, self.seed.unwrap_or(0), !self.no_group)?;
        let mut bytes = Vec::new();
        split.write_csv(&mut bytes).map_err(|e| CliError::internal(e.to_string()))?;
        let counts: Vec<String> = Split::ALL.iter().map(|&s| format!("{s} {}", split.count(s))).collect();
        Ok(Outputs { files: vec![(self.out.clone().expect("resolved"), bytes)], summary: counts.join(", ") })
    }
}
