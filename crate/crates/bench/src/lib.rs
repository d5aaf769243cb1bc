//! Benchmark fixtures shared by the criterion targets.

use topo_core::{build_structure, CaseName, RunConfig, Structure};

/// Cantilever structure at the given resolution.
pub fn cantilever(nelx: usize, nely: usize) -> Structure {
    let mut cfg = RunConfig::for_case(CaseName::Cantilever);
    cfg.nelx = nelx;
    cfg.nely = nely;
    build_structure(&cfg).expect("cantilever builds")
}
