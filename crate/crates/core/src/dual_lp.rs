//! Alternating optimizer: equilibrium solve, then the exact minimizer of the
//! linearized objective over the volume-constrained box, with continuation on
//! the volume fraction and a duality-gap diagnostic for affine interpolation.

use crate::density::{DensityField, DEFAULT_FLOOR};
use crate::error::{Error, Result};
use crate::fem::Structure;
use crate::knapsack::{continuous_knapsack, knapsack_update_with_moves};
use crate::material::MaterialModel;
use crate::trace::{IterRecord, OptRun, RunFailure};

#[derive(Debug, Clone, PartialEq)]
pub struct OptConfig {
    /// Final volume fraction.
    pub t1_target: f64,
    /// Volume fraction of the initial uniform field and first stage.
    pub t1_start: f64,
    /// Number of volume-fraction stages from `t1_start` to `t1_target`.
    pub continuation_steps: usize,
    /// Iteration cap for every stage but the last.
    pub stage_iterations: usize,
    pub max_iterations: usize,
    /// Stop when `max |dt| < change_tol`.
    pub change_tol: f64,
    /// Largest per-iteration density move.
    pub move_limit: f64,
    /// Factor applied to an element's move limit when its step reverses direction.
    pub move_shrink: f64,
    /// Factor applied when it keeps its direction, capped at `move_limit`.
    pub move_grow: f64,
    pub floor: f64,
}

impl Default for OptConfig {
    fn default() -> Self {
        Self {
            t1_target: 0.5,
            t1_start: 0.95,
            continuation_steps: 10,
            stage_iterations: 30,
            max_iterations: 500,
            change_tol: 0.01,
            move_limit: 0.2,
            move_shrink: 0.5,
            move_grow: 1.2,
            floor: DEFAULT_FLOOR,
        }
    }
}

impl OptConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.floor > 0.0 && self.floor < 1.0) {
            return Err(Error::invalid(format!(
                "floor {} outside (0, 1)",
                self.floor
            )));
        }
        if !(self.t1_target > self.floor && self.t1_target <= self.t1_start && self.t1_start <= 1.0)
        {
            return Err(Error::invalid(format!(
                "need floor < t1_target <= t1_start <= 1, got t1_target={} t1_start={}",
                self.t1_target, self.t1_start
            )));
        }
        if !(self.change_tol > 0.0) {
            return Err(Error::invalid("change_tol must be positive"));
        }
        if !(self.move_limit > 0.0 && self.move_limit <= 1.0) {
            return Err(Error::invalid(format!(
                "move_limit {} outside (0, 1]",
                self.move_limit
            )));
        }
        if !(self.move_shrink > 0.0 && self.move_shrink <= 1.0) || !(self.move_grow >= 1.0) {
            return Err(Error::invalid("need 0 < move_shrink <= 1 <= move_grow"));
        }
        if self.continuation_steps == 0 || self.stage_iterations == 0 || self.max_iterations == 0 {
            return Err(Error::invalid(
                "iteration and stage counts must be positive",
            ));
        }
        Ok(())
    }

    /// Volume fraction of every continuation stage, ending exactly at the target.
    pub fn schedule(&self) -> Vec<f64> {
        let s = self.continuation_steps;
        if s <= 1 || self.t1_start == self.t1_target {
            return vec![self.t1_target];
        }
        let mut out: Vec<f64> = (0..s - 1)
            .map(|k| self.t1_start + (self.t1_target - self.t1_start) * k as f64 / (s - 1) as f64)
            .collect();
        out.push(self.t1_target);
        out
    }
}

/// `dJ/dt_e = -E'(t_e) * 1/2 u_e^T ke u_e`, always `<= 0`.
pub fn sensitivities(
    structure: &Structure,
    mat: &MaterialModel,
    t: &DensityField,
    u: &[f64],
) -> Result<Vec<f64>> {
    if t.len() != structure.mesh().n_elements() {
        return Err(Error::invalid("density length does not match mesh"));
    }
    if u.len() != structure.mesh().n_dofs() {
        return Err(Error::invalid("displacement length does not match mesh"));
    }
    let w = structure.unit_energies(u);
    sensitivities_from_energies(mat, t.values(), &w)
}

pub(crate) fn sensitivities_from_energies(
    mat: &MaterialModel,
    t: &[f64],
    unit_energy: &[f64],
) -> Result<Vec<f64>> {
    t.iter()
        .zip(unit_energy)
        .map(|(&te, &w)| Ok(-mat.interpolate_de(te)? * w))
        .collect()
}

/// Dual functional `J*(u) = min_{t in B} [-G(e(u), t)] + f . u` for affine
/// interpolation, where B is the volume-`fraction` slice of `[floor, 1]^N`.
///
/// `template` supplies element volumes, the active mask and the floor.
pub fn dual_bound(
    structure: &Structure,
    mat: &MaterialModel,
    template: &DensityField,
    u: &[f64],
    fraction: f64,
) -> Result<f64> {
    if !mat.is_affine() {
        return Err(Error::Mode(format!(
            "dual bound requires affine interpolation, got p = {}",
            mat.penal()
        )));
    }
    if u.len() != structure.mesh().n_dofs() || template.len() != structure.mesh().n_elements() {
        return Err(Error::invalid("dual bound inputs do not match mesh"));
    }
    let w = structure.unit_energies(u);
    dual_value(structure, mat, template, u, &w, fraction)
}

fn dual_value(
    structure: &Structure,
    mat: &MaterialModel,
    template: &DensityField,
    u: &[f64],
    unit_energy: &[f64],
    fraction: f64,
) -> Result<f64> {
    let floor = template.floor();
    let active: Vec<usize> = template.active_indices().collect();
    // -G is affine in t with slope -(E0 - E1) w_e.
    let slope = mat.e0() - mat.e1();
    let costs: Vec<f64> = active.iter().map(|&e| -slope * unit_energy[e]).collect();
    let weights: Vec<f64> = active.iter().map(|&e| template.volumes()[e]).collect();
    let lower = vec![floor; active.len()];
    let upper = vec![1.0; active.len()];
    let capacity = fraction * template.domain_volume();
    let t_star = continuous_knapsack(&costs, &weights, &lower, &upper, capacity)?;

    let mut t_full = vec![floor; template.len()];
    for (&e, te) in active.iter().zip(t_star) {
        t_full[e] = te;
    }
    let g: f64 = t_full
        .iter()
        .zip(unit_energy)
        .map(|(&te, &w)| mat.modulus(te) * w)
        .sum();
    Ok(-g + structure.load_work(u))
}

/// Volume range reachable from `t` inside the per-element move box.
fn reachable_fractions(t: &DensityField, moves: &[f64]) -> (f64, f64) {
    let (mut lo, mut hi) = (0.0, 0.0);
    for e in t.active_indices() {
        let v = t.volumes()[e];
        lo += (t.values()[e] - moves[e]).max(t.floor()) * v;
        hi += (t.values()[e] + moves[e]).min(1.0) * v;
    }
    let dom = t.domain_volume();
    (lo / dom, hi / dom)
}

/// Run the alternating optimizer from a uniform field at `cfg.t1_start`.
pub fn run(
    structure: &Structure,
    mat: &MaterialModel,
    cfg: &OptConfig,
) -> Result<OptRun, RunFailure> {
    cfg.validate()?;
    let t0 = DensityField::uniform(structure.mesh(), cfg.t1_start, cfg.floor)?;
    run_from(structure, mat, cfg, t0)
}

/// Run the alternating optimizer from an explicit initial field.
pub fn run_from(
    structure: &Structure,
    mat: &MaterialModel,
    cfg: &OptConfig,
    initial: DensityField,
) -> Result<OptRun, RunFailure> {
    cfg.validate()?;
    let n = initial.len();
    if n != structure.mesh().n_elements() {
        return Err(Error::invalid("initial density does not match mesh").into());
    }
    let mut records: Vec<IterRecord> = Vec::new();
    let mut t = initial;
    let mut moves = vec![cfg.move_limit; n];
    let mut last_step = vec![0.0; n];
    let mut iteration = 0;

    macro_rules! attempt {
        ($e:expr) => {
            match $e {
                Ok(v) => v,
                Err(err) => return Err(RunFailure::new(err, records)),
            }
        };
    }

    let stages = cfg.schedule();
    'stages: for (k, &stage_fraction) in stages.iter().enumerate() {
        let last_stage = k + 1 == stages.len();
        moves.fill(cfg.move_limit);
        last_step.fill(0.0);
        let mut stage_iter = 0;
        loop {
            iteration += 1;
            stage_iter += 1;
            let sol = attempt!(structure.solve(mat, t.values()));
            let g = attempt!(sensitivities_from_energies(
                mat,
                t.values(),
                &sol.unit_energy
            ));
            let fraction_now = t.fraction();
            let gap = if mat.is_affine() {
                let dual = attempt!(dual_value(
                    structure,
                    mat,
                    &t,
                    &sol.displacements,
                    &sol.unit_energy,
                    fraction_now
                ));
                Some(sol.compliance - dual)
            } else {
                None
            };

            // Approach the stage fraction as fast as the move limits allow.
            let (lo, hi) = reachable_fractions(&t, &moves);
            let fraction = stage_fraction.clamp(lo, hi);
            let next = attempt!(knapsack_update_with_moves(&g, &t, fraction, &moves));
            let change = next.max_change(&t);

            for e in 0..n {
                let step = next.values()[e] - t.values()[e];
                let product = step * last_step[e];
                if product < 0.0 {
                    moves[e] *= cfg.move_shrink;
                } else if product > 0.0 {
                    moves[e] = (moves[e] * cfg.move_grow).min(cfg.move_limit);
                }
                if step != 0.0 {
                    last_step[e] = step;
                }
            }

            records.push(IterRecord {
                iteration,
                objective: sol.compliance,
                external_work: sol.external_work,
                volume_fraction: fraction_now,
                target_fraction: t.target(),
                max_change: change,
                duality_gap: gap,
            });
            let reached = fraction == stage_fraction;
            t = next;

            if iteration >= cfg.max_iterations {
                break 'stages;
            }
            if reached && change < cfg.change_tol {
                break;
            }
            if !last_stage && stage_iter >= cfg.stage_iterations {
                break;
            }
        }
    }

    let solution = attempt!(structure.solve(mat, t.values()));
    Ok(OptRun {
        records,
        density: t,
        solution,
    })
}
