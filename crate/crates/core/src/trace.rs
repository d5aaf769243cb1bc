use thiserror::Error as ThisError;

use crate::density::DensityField;
use crate::error::Error;
use crate::fem::EquilibriumSolution;

/// State of one outer iteration: the equilibrium at `t_n` and the size of the
/// step taken from it.
#[derive(Debug, Clone, PartialEq)]
pub struct IterRecord {
    /// 1-based.
    pub iteration: usize,
    /// Compliance `1/2 U^T K(t_n) U` (J).
    pub objective: f64,
    /// `1/2 f . U` at the same state (J).
    pub external_work: f64,
    pub volume_fraction: f64,
    /// Fraction `t_n` was constructed to hold.
    pub target_fraction: f64,
    /// `max_e |t_{n+1,e} - t_{n,e}|`.
    pub max_change: f64,
    /// Objective minus the dual functional, only for affine interpolation.
    pub duality_gap: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct OptRun {
    pub records: Vec<IterRecord>,
    pub density: DensityField,
    /// Equilibrium at the final density.
    pub solution: EquilibriumSolution,
}

impl OptRun {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn final_objective(&self) -> f64 {
        self.solution.compliance
    }

    pub fn final_fraction(&self) -> f64 {
        self.density.fraction()
    }
}

/// An optimizer run aborted by an error; the trace up to the failure is kept.
#[derive(Debug, ThisError)]
#[error("optimization aborted after {} iterations: {source}", records.len())]
pub struct RunFailure {
    #[source]
    pub source: Error,
    pub records: Vec<IterRecord>,
}

impl RunFailure {
    pub(crate) fn new(source: Error, records: Vec<IterRecord>) -> Self {
        Self { source, records }
    }
}

impl From<Error> for RunFailure {
    fn from(source: Error) -> Self {
        Self::new(source, Vec::new())
    }
}
