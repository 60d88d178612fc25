//! Independent oracles and the verification report format.

mod density;
mod moments;
mod quadrature;
mod stats;
mod suite;

use serde::{Deserialize, Serialize};

pub use density::{
    beta_rounds_for_tolerance, decomposition_density_partial_sum, generalized_gamma_partial_sum, levy_density,
    GeneralizedForm, LevyFamily, PartialSum,
};
pub use moments::{jump_moment, moment_oracle, ProcessRef, ORACLE_TOLERANCE};
pub use quadrature::{integrate, integrate_endpoint_singular, integrate_half_line};
pub use stats::{
    chi_square, ks_critical_value, ks_distance, monte_carlo_moments, ChiSquareResult, KsResult, SampleMoments,
    SIGNIFICANCE,
};
pub use suite::{run_check, run_suite, Check, SuiteConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ToleranceMode {
    Absolute,
    Relative,
}

/// One row of a verification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub name: String,
    pub target: f64,
    pub computed: f64,
    pub tolerance: f64,
    pub mode: ToleranceMode,
    pub passed: bool,
    /// Gated rows are reported but never fail a run.
    pub gated: bool,
    pub detail: String,
}

impl VerificationReport {
    pub fn compare(
        name: impl Into<String>,
        target: f64,
        computed: f64,
        tolerance: f64,
        mode: ToleranceMode,
        detail: impl Into<String>,
    ) -> Self {
        let error = match mode {
            ToleranceMode::Absolute => (computed - target).abs(),
            ToleranceMode::Relative => ((computed - target) / target).abs(),
        };
        VerificationReport {
            name: name.into(),
            target,
            computed,
            tolerance,
            mode,
            passed: error <= tolerance,
            gated: false,
            detail: detail.into(),
        }
    }

    /// A yes/no check, recorded as target 1 against computed 1 or 0.
    pub fn boolean(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        let computed = if passed { 1.0 } else { 0.0 };
        Self::compare(name, 1.0, computed, 0.0, ToleranceMode::Absolute, detail)
    }

    pub fn gated(mut self) -> Self {
        self.gated = true;
        self
    }

    pub fn error(&self) -> f64 {
        match self.mode {
            ToleranceMode::Absolute => (self.computed - self.target).abs(),
            ToleranceMode::Relative => ((self.computed - self.target) / self.target).abs(),
        }
    }

    /// Counts against the run: failed and not gated.
    pub fn is_failure(&self) -> bool {
        !self.passed && !self.gated
    }
}
