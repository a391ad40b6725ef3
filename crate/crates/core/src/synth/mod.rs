//! Synthetic classifier scores from an equal-variance binormal model.
//!
//! With unit-variance normal classes whose means differ by `mu`, the AUROC is
//! `Phi(mu / sqrt(2))`, so a target AUROC fixes `mu` in closed form.

mod generate;
mod normal;

pub use generate::{
    draw_condition, generate_scores, logistic, report_phrase, ConditionDraws, ConditionSpec, SynthSpec,
};
pub use normal::{inverse_normal_cdf, mu_for_auroc};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthError {
    #[error("target AUROC {0} outside (0, 1)")]
    Domain(f64),
    #[error("invalid synth spec: {0}")]
    InvalidSpec(String),
}
