//! Bilinear-quad finite elements: stiffness, assembly, equilibrium solve.

mod element;
mod solve;
mod sparse;

pub use element::{reference_ke, ElementStiffness};
pub use solve::{pcg, solve_spd, SkylineCholesky, SolverKind, RESIDUAL_TOLERANCE};
pub use sparse::{Assembler, CsrMatrix, SparseSystem};

use crate::error::{Error, Result};
use crate::material::MaterialModel;
use crate::mesh::{BoundaryConditions, DofMap, GridMesh};

/// Result of one equilibrium solve `K(t) U = f`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumSolution {
    /// Full displacement vector, zero at fixed DOFs (m).
    pub displacements: Vec<f64>,
    /// `1/2 U^T K(t) U` (J).
    pub compliance: f64,
    /// `1/2 f . U` (J); equals `compliance` at equilibrium.
    pub external_work: f64,
    /// `1/2 E(t_e) u_e^T ke u_e` per element (J).
    pub element_energy: Vec<f64>,
    /// `1/2 u_e^T ke u_e` per element, i.e. the energy at unit modulus.
    pub unit_energy: Vec<f64>,
}

/// A meshed, supported and loaded structure ready for repeated solves.
#[derive(Debug, Clone)]
pub struct Structure {
    mesh: GridMesh,
    dofs: DofMap,
    bc: BoundaryConditions,
    ke: ElementStiffness,
    assembler: Assembler,
    solver: SolverKind,
}

impl Structure {
    pub fn new(mesh: GridMesh, bc: BoundaryConditions, nu: f64) -> Result<Self> {
        let ke = reference_ke(mesh.hx(), mesh.hy(), nu)?;
        let dofs = mesh.dof_map();
        if let Some(&d) = bc.fixed_dofs().last() {
            if d >= mesh.n_dofs() {
                return Err(Error::invalid("boundary conditions do not match mesh"));
            }
        }
        let assembler = Assembler::new(&dofs, mesh.n_dofs(), &bc);
        Ok(Self {
            mesh,
            dofs,
            bc,
            ke,
            assembler,
            solver: SolverKind::default(),
        })
    }

    pub fn with_solver(mut self, solver: SolverKind) -> Self {
        self.solver = solver;
        self
    }

    pub fn mesh(&self) -> &GridMesh {
        &self.mesh
    }

    pub fn dof_map(&self) -> &DofMap {
        &self.dofs
    }

    pub fn boundary_conditions(&self) -> &BoundaryConditions {
        &self.bc
    }

    pub fn ke(&self) -> &ElementStiffness {
        &self.ke
    }

    pub fn solver(&self) -> SolverKind {
        self.solver
    }

    /// Per-element moduli `E(t_e)`.
    pub fn element_moduli(&self, mat: &MaterialModel, t: &[f64]) -> Result<Vec<f64>> {
        if t.len() != self.mesh.n_elements() {
            return Err(Error::invalid(format!(
                "density length {} does not match {} elements",
                t.len(),
                self.mesh.n_elements()
            )));
        }
        t.iter().map(|&te| mat.interpolate_e(te)).collect()
    }

    pub fn assemble(&self, mat: &MaterialModel, t: &[f64]) -> Result<SparseSystem> {
        let moduli = self.element_moduli(mat, t)?;
        Ok(self.assembler.assemble(self.ke.matrix(), &moduli))
    }

    /// Assemble, solve and post-process at densities `t`.
    pub fn solve(&self, mat: &MaterialModel, t: &[f64]) -> Result<EquilibriumSolution> {
        let moduli = self.element_moduli(mat, t)?;
        let sys = self.assembler.assemble(self.ke.matrix(), &moduli);
        self.solve_system(&sys, &moduli)
    }

    /// Solve an assembled system; `moduli` must be the ones it was assembled with.
    pub fn solve_system(&self, sys: &SparseSystem, moduli: &[f64]) -> Result<EquilibriumSolution> {
        let reduced = solve_spd(&sys.matrix, &sys.rhs, self.solver)?;
        let ku = sys.matrix.mul_vec(&reduced);
        let compliance = 0.5 * dot(&reduced, &ku);
        let external_work = 0.5 * dot(&reduced, &sys.rhs);
        let displacements = sys.expand(&reduced);
        let unit_energy = self.unit_energies(&displacements);
        let element_energy = unit_energy.iter().zip(moduli).map(|(w, e)| w * e).collect();
        Ok(EquilibriumSolution {
            displacements,
            compliance,
            external_work,
            element_energy,
            unit_energy,
        })
    }

    /// `1/2 u_e^T ke u_e` for every element.
    pub fn unit_energies(&self, u: &[f64]) -> Vec<f64> {
        self.dofs
            .iter()
            .map(|dofs| {
                let ue: [f64; 8] = std::array::from_fn(|k| u[dofs[k]]);
                0.5 * self.ke.quadratic_form(&ue)
            })
            .collect()
    }

    /// `1/2 E(t_e) u_e^T ke u_e` for every element.
    pub fn element_energies(&self, mat: &MaterialModel, t: &[f64], u: &[f64]) -> Result<Vec<f64>> {
        let moduli = self.element_moduli(mat, t)?;
        Ok(self
            .unit_energies(u)
            .into_iter()
            .zip(moduli)
            .map(|(w, e)| w * e)
            .collect())
    }

    /// `f . U` over the full DOF vector.
    pub fn load_work(&self, u: &[f64]) -> f64 {
        self.bc.loads().iter().map(|&(d, f)| f * u[d]).sum()
    }
}

/// One-shot assembly of `K(t)` with fixed DOFs eliminated.
pub fn assemble(
    mesh: &GridMesh,
    dofmap: &DofMap,
    mat: &MaterialModel,
    t: &[f64],
    bc: &BoundaryConditions,
) -> Result<SparseSystem> {
    if t.len() != mesh.n_elements() {
        return Err(Error::invalid("density length does not match mesh"));
    }
    let ke = reference_ke(mesh.hx(), mesh.hy(), mat.nu())?;
    let moduli: Vec<f64> = t
        .iter()
        .map(|&te| mat.interpolate_e(te))
        .collect::<Result<_>>()?;
    Ok(Assembler::new(dofmap, mesh.n_dofs(), bc).assemble(ke.matrix(), &moduli))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
