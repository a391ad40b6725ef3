use std::path::{Path, PathBuf};

use clap::Args;
use cxrtriage::datastore::write_records;
use cxrtriage::synth::{generate_scores, ConditionSpec};
use cxrtriage::SynthSpec;
use serde::{Deserialize, Serialize};

use super::{read_json, required, Command, Outputs};
use crate::config::impl_merge;
use crate::error::CliError;

pub(crate) const NAME: &str = "synth";

/// Synthetic labeled and scored records from a binormal score model.
///
/// Flags override the matching fields of `--spec`; `--target-auroc` and
/// `--disease-ratio` set the default for conditions the spec does not list.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct SynthArgs {
    /// Spec JSON
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Number of records; overrides the spec
    #[arg(long)]
    pub n_records: Option<usize>,
    /// [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// AUROC for every condition; needs --disease-ratio
    #[arg(long)]
    pub target_auroc: Option<f64>,
    /// Positive fraction for every condition; needs --target-auroc
    #[arg(long)]
    pub disease_ratio: Option<f64>,
    /// Attach a templated report to each record
    #[arg(long)]
    pub emit_reports: bool,
    /// Records CSV
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl_merge!(SynthArgs { spec, n_records, seed, target_auroc, disease_ratio, emit_reports, out });

impl SynthArgs {
    fn build_spec(&self) -> Result<SynthSpec, CliError> {
        let mut spec = match &self.spec {
            Some(p) => read_json::<SynthSpec>(p)?,
            None => {
                SynthSpec { n_records: 0, seed: 0, default: None, conditions: Default::default(), emit_reports: false }
            }
        };
        if let Some(n) = self.n_records {
            spec.n_records = n;
        }
        if let Some(s) = self.seed {
            spec.seed = s;
        }
        spec.emit_reports |= self.emit_reports;
        match (self.target_auroc, self.disease_ratio, spec.default.as_mut()) {
            (None, None, _) => {}
            (t, r, Some(d)) => {
                d.target_auroc = t.unwrap_or(d.target_auroc);
                d.disease_ratio = r.unwrap_or(d.disease_ratio);
            }
            (Some(target_auroc), Some(disease_ratio), None) => {
                spec.default = Some(ConditionSpec { target_auroc, disease_ratio });
            }
            _ => return Err(CliError::input("--target-auroc and --disease-ratio must be given together")),
        }
        Ok(spec)
    }
}

impl Command for SynthArgs {
    const NAME: &'static str = NAME;

    fn resolve(&mut self) -> Result<(), CliError> {
        required(&self.out, "out")?;
        if self.spec.is_none() {
            required(&self.n_records, "n-records")?;
            self.seed.get_or_insert(0);
        }
        Ok(())
    }

    fn inputs(&self) -> Vec<PathBuf> {
        self.spec.iter().cloned().collect()
    }

    fn primary_output(&self) -> &Path {
        self.out.as_deref().expect("resolved")
    }

    fn execute(&self) -> Result<Outputs, CliError> {
        let spec = self.build_spec()?;
        let records = generate_scores(&spec)?;
        let mut bytes = Vec::new();
        write_records(&records, &mut bytes).map_err(|e| CliError::internal(e.to_string()))?;
        Ok(Outputs {
            files: vec![(self.out.clone().expect("resolved"), bytes)],
            summary: format!("{} records, seed {}", records.len(), spec.seed),
        })
    }
}
