use std::path::{Path, PathBuf};

use clap::Args;
use cxrtriage::datastore::write_records;
use cxrtriage::labeler::{Labeler, Lexicon, Mention};
use cxrtriage::StudyRecord;
use serde::{Deserialize, Serialize};

use super::{read_records, required, Command, Outputs};
use crate::config::impl_merge;
use crate::error::CliError;
use crate::output::{read_input, text_files};

pub(crate) const NAME: &str = "label";

/// Label free-text reports with the rule-based labeler.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct LabelArgs {
    /// Records CSV with a report_text column, or a directory of .txt reports
    #[arg(long)]
    pub reports: Option<PathBuf>,
    /// Lexicon file; repeatable. Replaces the bundled lexicon when given
    #[arg(long)]
    pub lexicon: Vec<PathBuf>,
    /// Labeled records CSV
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// One JSON line per mention, for auditing
    #[arg(long)]
    pub audit_out: Option<PathBuf>,
}

impl_merge!(LabelArgs { reports, lexicon, out, audit_out });

#[derive(Serialize)]
struct AuditLine<'a> {
    study_id: &'a str,
    #[serde(flatten)]
    mention: &'a Mention,
}

impl Command for LabelArgs {
    const NAME: &'static str = NAME;

    fn resolve(&mut self) -> Result<(), CliError> {
        required(&self.reports, "reports")?;
        required(&self.out, "out")?;
        Ok(())
    }

    fn inputs(&self) -> Vec<PathBuf> {
        self.reports.iter().chain(&self.lexicon).cloned().collect()
    }

    fn primary_output(&self) -> &Path {
        self.out.as_deref().expect("resolved")
    }

    fn execute(&self) -> Result<Outputs, CliError> {
        let lexicon = if self.lexicon.is_empty() { Lexicon::bundled() } else { Lexicon::load(&self.lexicon)? };
        let source = required(&self.reports, "reports")?;
        let mut records = if source.is_dir() { records_from_dir(source)? } else { read_records(source)? };

        let missing: Vec<String> = records
            .iter()
            .enumerate()
            .filter(|(_, r)| r.report_text.is_none())
            .map(|(i, r)| format!("  row {}: study `{}` has no report_text", i + 1, r.study_id))
            .collect();
        if !missing.is_empty() {
            return Err(CliError::input(format!(
                "{}: {} record(s) without report text\n{}",
                source.display(),
                missing.len(),
                missing.join("\n")
            )));
        }

        let texts: Vec<&str> = records.iter().map(|r| r.report_text.as_deref().unwrap_or_default()).collect();
        let labeled = Labeler::new(lexicon).label_all(&texts);

        let mut audit = Vec::new();
        for (record, result) in records.iter().zip(&labeled) {
            for mention in &result.mentions {
                serde_json::to_writer(&mut audit, &AuditLine { study_id: &record.study_id, mention })
                    .map_err(|e| CliError::internal(e.to_string()))?;
                audit.push(b'\n');
            }
        }
        let n_mentions = labeled.iter().map(|l| l.mentions.len()).sum::<usize>();
        for (record, result) in records.iter_mut().zip(labeled) {
            record.labels = Some(result.labels);
        }

        let mut table = Vec::new();
        write_records(&records, &mut table).map_err(|e| CliError::internal(e.to_string()))?;
        let mut files = vec![(self.out.clone().expect("resolved"), table)];
        if let Some(p) = &self.audit_out {
            files.push((p.clone(), audit));
        }
        Ok(Outputs { files, summary: format!("labeled {} reports, {n_mentions} mentions", records.len()) })
    }
}

/// One record per `.txt` file; the file stem is the study id.
fn records_from_dir(dir: &Path) -> Result<Vec<StudyRecord>, CliError> {
    let files = text_files(dir)?;
    if files.is_empty() {
        return Err(CliError::input(format!("{}: no .txt reports", dir.display())));
    }
    files
        .iter()
        .map(|f| {
            let text = String::from_utf8(read_input(f)?)
                .map_err(|_| CliError::input(format!("{}: not UTF-8", f.display())))?;
            let stem = f.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
            let mut r = StudyRecord::new(stem);
            r.report_text = Some(text);
            Ok(r)
        })
        .collect()
}
