use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::config::Merge;
use crate::error::CliError;
use crate::output::{digest_inputs, read_input, sha256_hex, write_atomic, RunManifest};

mod compare;
mod eval;
mod label;
mod split;
mod stats;
mod synth;
mod wr_curve;

pub use compare::CompareArgs;
pub use eval::EvalArgs;
pub use label::LabelArgs;
pub use split::SplitArgs;
pub use stats::StatsArgs;
pub use synth::SynthArgs;
pub use wr_curve::WrCurveArgs;

/// Files produced by a command, held in memory until every one is ready.
pub struct Outputs {
    pub files: Vec<(PathBuf, Vec<u8>)>,
    pub summary: String,
}

pub trait Command: Serialize + DeserializeOwned + Merge + Sync {
    const NAME: &'static str;

    /// Applies defaults and checks that required parameters are present.
    fn resolve(&mut self) -> Result<(), CliError>;

    fn inputs(&self) -> Vec<PathBuf>;

    /// The output the manifest is named after.
    fn primary_output(&self) -> &Path;

    fn execute(&self) -> Result<Outputs, CliError>;
}

pub struct RunOutcome {
    pub manifest: RunManifest,
    pub summary: String,
}

/// Runs a resolved command, writes its outputs and then its manifest.
pub fn drive<C: Command>(cmd: &C, threads: Option<usize>) -> Result<RunOutcome, CliError> {
    let inputs = digest_inputs(&cmd.inputs())?;
    let outputs = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::internal(format!("cannot start {n} threads: {e}")))?
            .install(|| cmd.execute())?,
        None => cmd.execute()?,
    };
    let mut digests = std::collections::BTreeMap::new();
    for (path, bytes) in &outputs.files {
        write_atomic(path, bytes)?;
        digests.insert(path.display().to_string(), sha256_hex(bytes));
    }
    let manifest = RunManifest {
        command: C::NAME.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        params: serde_json::to_value(cmd).map_err(|e| CliError::internal(e.to_string()))?,
        inputs,
        outputs: digests,
    };
    write_atomic(&RunManifest::path_for(cmd.primary_output()), &json_bytes(&manifest)?)?;
    Ok(RunOutcome { manifest, summary: outputs.summary })
}

/// Re-runs the command recorded in a manifest and checks that inputs and
/// outputs still hash to the recorded digests.
pub fn replay(manifest_path: &Path, threads: Option<usize>) -> Result<RunOutcome, CliError> {
    let recorded = RunManifest::read(manifest_path)?;
    match recorded.command.as_str() {
        label::NAME => replay_as::<LabelArgs>(&recorded, threads),
        stats::NAME => replay_as::<StatsArgs>(&recorded, threads),
        split::NAME => replay_as::<SplitArgs>(&recorded, threads),
        eval::NAME => replay_as::<EvalArgs>(&recorded, threads),
        wr_curve::NAME => replay_as::<WrCurveArgs>(&recorded, threads),
        compare::NAME => replay_as::<CompareArgs>(&recorded, threads),
        synth::NAME => replay_as::<SynthArgs>(&recorded, threads),
        other => Err(CliError::input(format!("manifest names unknown command `{other}`"))),
    }
}

fn replay_as<C: Command>(recorded: &RunManifest, threads: Option<usize>) -> Result<RunOutcome, CliError> {
    let mut cmd: C = serde_json::from_value(recorded.params.clone())
        .map_err(|e| CliError::input(format!("manifest parameters for `{}`: {e}", C::NAME)))?;
    cmd.resolve()?;
    let current = digest_inputs(&cmd.inputs())?;
    if current != recorded.inputs {
        let changed: Vec<&str> =
            recorded.inputs.iter().filter(|(k, v)| current.get(*k) != Some(*v)).map(|(k, _)| k.as_str()).collect();
        return Err(CliError::input(format!("inputs changed since the recorded run: {}", changed.join(", "))));
    }
    let outcome = drive(&cmd, threads)?;
    if outcome.manifest.outputs != recorded.outputs {
        return Err(CliError::internal("replayed outputs differ from the recorded digests"));
    }
    Ok(outcome)
}

pub(crate) fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::internal(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub(crate) fn required<'a, T>(value: &'a Option<T>, flag: &str) -> Result<&'a T, CliError> {
    value.as_ref().ok_or_else(|| CliError::input(format!("missing --{flag}")))
}

pub(crate) fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    serde_json::from_slice(&read_input(path)?).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub(crate) fn read_records(path: &Path) -> Result<Vec<cxrtriage::StudyRecord>, CliError> {
    let bytes = read_input(path)?;
    cxrtriage::datastore::parse_records(bytes.as_slice())
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub(crate) fn csv_bytes(write: impl FnOnce(&mut Vec<u8>) -> Result<(), csv::Error>) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    write(&mut buf).map_err(|e| CliError::internal(e.to_string()))?;
    Ok(buf)
}
