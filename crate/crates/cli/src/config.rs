use std::path::Path;

use serde::Deserialize;

use crate::commands::{CompareArgs, EvalArgs, LabelArgs, SplitArgs, StatsArgs, SynthArgs, WrCurveArgs};
use crate::error::CliError;
use crate::output::read_input;

/// Fills unset fields of `self` (from flags) with values from `base` (from the config file).
pub trait Merge {
    fn merge(&mut self, base: Self);
}

impl<T> Merge for Option<T> {
    fn merge(&mut self, base: Self) {
        if self.is_none() {
            *self = base;
        }
    }
}

impl<T> Merge for Vec<T> {
    fn merge(&mut self, base: Self) {
        if self.is_empty() {
            *self = base;
        }
    }
}

impl Merge for bool {
    fn merge(&mut self, base: Self) {
        *self |= base;
    }
}

macro_rules! impl_merge {
    ($t:ty { $($field:ident),* $(,)? }) => {
        impl $crate::config::Merge for $t {
            fn merge(&mut self, base: Self) {
                $( self.$field.merge(base.$field); )*
            }
        }
    };
}
pub(crate) use impl_merge;

/// TOML configuration: optional `threads` plus one table per command, keyed
/// by the command's flag names.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfigFile {
    pub threads: Option<usize>,
    pub label: Option<LabelArgs>,
    pub stats: Option<StatsArgs>,
    pub split: Option<SplitArgs>,
    pub eval: Option<EvalArgs>,
    pub wr_curve: Option<WrCurveArgs>,
    pub compare: Option<CompareArgs>,
    pub synth: Option<SynthArgs>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<ConfigFile, CliError> {
        let bytes = read_input(path)?;
        let text = String::from_utf8(bytes)
            .map_err(|_| CliError::input(format!("{}: config is not UTF-8", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
    }
}
