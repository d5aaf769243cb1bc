//! Minimum-compliance topology optimization of 2D plane-stress structures on
//! regular grids.
//!
//! Two optimizers share the finite element core: an alternating scheme that
//! solves a continuous knapsack per iteration (with a duality-gap certificate
//! under affine interpolation), and a filtered optimality-criteria baseline.
//!
//! ```
//! use topo_core::{build_structure, optimize, CaseName, RunConfig};
//!
//! let mut cfg = RunConfig::for_case(CaseName::Cantilever);
//! cfg.nelx = 8;
//! cfg.nely = 4;
//! let structure = build_structure(&cfg).unwrap();
//! let run = optimize(&structure, &cfg).unwrap();
//! assert!((run.final_fraction() - cfg.t1).abs() < 1e-6);
//! ```

// `!(x > 0.0)` style guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cases;
pub mod density;
pub mod dual_lp;
pub mod error;
pub mod fem;
pub mod io;
pub mod knapsack;
pub mod material;
pub mod mesh;
pub mod oc;
mod pipeline;
pub mod trace;

pub use cases::{
    case_by_name, case_catalog, CaseInstance, CaseName, CaseSpec, MaskRule, SupportRule,
};
pub use density::{DensityField, DEFAULT_FLOOR};
pub use dual_lp::{dual_bound, sensitivities, OptConfig};
pub use error::{Error, InfeasibleSide, Result};
pub use fem::{EquilibriumSolution, SolverKind, Structure};
pub use io::{checkerboard_score, OptimizerKind, RunConfig, RunManifest};
pub use knapsack::continuous_knapsack;
pub use material::{Interpolation, MaterialModel};
pub use mesh::{BoundaryConditions, DofMap, GridMesh};
pub use oc::{filter_sensitivities, oc_update, run_oc, FilterSpec, OcConfig};
pub use pipeline::{build_structure, optimize};
pub use trace::{IterRecord, OptRun, RunFailure};
