use crate::cases::CaseInstance;
use crate::dual_lp;
use crate::error::Result;
use crate::fem::Structure;
use crate::io::{OptimizerKind, RunConfig};
use crate::oc::{run_oc, FilterSpec};
use crate::trace::{OptRun, RunFailure};

/// Mesh, supports and solver for a resolved configuration.
pub fn build_structure(cfg: &RunConfig) -> Result<Structure> {
    cfg.validate()?;
    let CaseInstance { mesh, bc, .. } = cfg.case_spec().instantiate(cfg.t1, cfg.floor)?;
    Ok(Structure::new(mesh, bc, cfg.nu)?.with_solver(cfg.solver))
}

/// Run the configured optimizer on a prepared structure.
pub fn optimize(structure: &Structure, cfg: &RunConfig) -> Result<OptRun, RunFailure> {
    let mat = cfg.material()?;
    match cfg.optimizer {
        OptimizerKind::DualLp => dual_lp::run(structure, &mat, &cfg.opt_config()),
        OptimizerKind::OcFilter => {
            let spec = FilterSpec::new(cfg.rmin, structure.mesh())?;
            run_oc(structure, &mat, cfg.t1, &spec, &cfg.oc_config())
        }
    }
}
