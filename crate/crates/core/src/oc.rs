//! Optimality-criteria update with a sensitivity filter, run at a fixed volume
//! fraction. This is the filtered baseline the unfiltered optimizer is compared
//! against.

use crate::density::{DensityField, DEFAULT_FLOOR};
use crate::dual_lp::sensitivities_from_energies;
use crate::error::{Error, Result};
use crate::fem::Structure;
use crate::material::MaterialModel;
use crate::mesh::GridMesh;
use crate::trace::{IterRecord, OptRun, RunFailure};

/// Sensitivity filter radius, in element widths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    rmin: f64,
}

impl FilterSpec {
    pub fn new(rmin: f64, mesh: &GridMesh) -> Result<Self> {
        let span = mesh.nelx().max(mesh.nely()) as f64;
        if !(rmin >= 0.0 && rmin < span) {
            return Err(Error::invalid(format!(
                "filter radius {rmin} outside [0, {span})"
            )));
        }
        Ok(Self { rmin })
    }

    pub fn rmin(&self) -> f64 {
        self.rmin
    }
}

/// Cone-weighted sensitivity filter over active neighbours:
/// `g~_e = sum_i w_ei t_i g_i / (t_e sum_i w_ei)`, `w_ei = rmin - dist(e, i)`.
///
/// Distances are between element centres in grid-index units.
pub fn filter_sensitivities(
    mesh: &GridMesh,
    t: &DensityField,
    g: &[f64],
    spec: &FilterSpec,
) -> Result<Vec<f64>> {
    if g.len() != mesh.n_elements() || t.len() != mesh.n_elements() {
        return Err(Error::invalid("filter input lengths do not match mesh"));
    }
    let rmin = spec.rmin;
    if rmin < 1.0 {
        return Ok(g.to_vec());
    }
    let reach = rmin.floor() as isize;
    let (nelx, nely) = (mesh.nelx() as isize, mesh.nely() as isize);
    let tv = t.values();
    let mut out = g.to_vec();
    for e in 0..mesh.n_elements() {
        if !mesh.is_active(e) {
            continue;
        }
        let (ix, iy) = mesh.element_coords(e);
        let (ix, iy) = (ix as isize, iy as isize);
        let mut num = 0.0;
        let mut den = 0.0;
        for jx in (ix - reach).max(0)..=(ix + reach).min(nelx - 1) {
            for jy in (iy - reach).max(0)..=(iy + reach).min(nely - 1) {
                let i = mesh.element_index(jx as usize, jy as usize);
                if !mesh.is_active(i) {
                    continue;
                }
                let dist = (((jx - ix).pow(2) + (jy - iy).pow(2)) as f64).sqrt();
                let w = rmin - dist;
                if w > 0.0 {
                    num += w * tv[i] * g[i];
                    den += w;
                }
            }
        }
        out[e] = num / (tv[e] * den);
    }
    Ok(out)
}

/// Optimality-criteria parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct OcConfig {
    pub eta: f64,
    pub move_limit: f64,
    pub max_iterations: usize,
    pub change_tol: f64,
    pub floor: f64,
}

impl Default for OcConfig {
    fn default() -> Self {
        Self {
            eta: 0.5,
            move_limit: 0.2,
            max_iterations: 500,
            change_tol: 0.01,
            floor: DEFAULT_FLOOR,
        }
    }
}

impl OcConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0) {
            return Err(Error::invalid("OC exponent must be positive"));
        }
        if !(self.move_limit > 0.0 && self.move_limit <= 1.0) {
            return Err(Error::invalid(format!(
                "OC move {} outside (0, 1]",
                self.move_limit
            )));
        }
        if !(self.change_tol > 0.0) || self.max_iterations == 0 {
            return Err(Error::invalid("need change_tol > 0 and max_iterations > 0"));
        }
        if !(self.floor > 0.0 && self.floor < 1.0) {
            return Err(Error::invalid(format!(
                "floor {} outside (0, 1)",
                self.floor
            )));
        }
        Ok(())
    }
}

const LAMBDA_LOW: f64 = 1e-12;
const LAMBDA_HIGH: f64 = 1e12;
const MAX_HALVINGS: usize = 200;
/// Accepted relative volume error of an OC update.
pub const OC_VOLUME_TOLERANCE: f64 = 1e-6;

/// `t_e = clamp(t_prev,e * (-g_e / lambda)^eta)` into the move box, with the
/// multiplier found by bisection so the volume equals `fraction`.
pub fn oc_update(
    prev: &DensityField,
    g: &[f64],
    fraction: f64,
    move_limit: f64,
    eta: f64,
) -> Result<DensityField> {
    if g.len() != prev.len() {
        return Err(Error::invalid("sensitivity length does not match field"));
    }
    let active: Vec<usize> = prev.active_indices().collect();
    if let Some(&e) = active.iter().find(|&&e| !(g[e] <= 0.0)) {
        return Err(Error::invalid(format!(
            "OC needs non-positive sensitivities, element {e} has {}",
            g[e]
        )));
    }
    // The update depends on g / lambda only; normalizing keeps the bracket meaningful.
    let scale = active.iter().map(|&e| -g[e]).fold(0.0, f64::max);
    let scale = if scale > 0.0 { scale } else { 1.0 };

    let t = prev.values();
    let floor = prev.floor();
    let volumes = prev.volumes();
    let target = fraction * prev.domain_volume();
    let lower: Vec<f64> = active
        .iter()
        .map(|&e| (t[e] - move_limit).max(floor))
        .collect();
    let upper: Vec<f64> = active
        .iter()
        .map(|&e| (t[e] + move_limit).min(1.0))
        .collect();
    let ratio: Vec<f64> = active.iter().map(|&e| -g[e] / scale).collect();

    let candidate = |lambda: f64, out: &mut Vec<f64>| -> f64 {
        out.clear();
        let mut vol = 0.0;
        for (k, &e) in active.iter().enumerate() {
            let te = (t[e] * (ratio[k] / lambda).powf(eta)).clamp(lower[k], upper[k]);
            vol += te * volumes[e];
            out.push(te);
        }
        vol
    };

    let mut buf = Vec::with_capacity(active.len());
    let (mut lo, mut hi) = (LAMBDA_LOW, LAMBDA_HIGH);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for _ in 0..MAX_HALVINGS {
        let mid = (lo * hi).sqrt();
        let vol = candidate(mid, &mut buf);
        let err = (vol - target).abs() / target;
        if best.as_ref().is_none_or(|(b, _)| err < *b) {
            best = Some((err, buf.clone()));
        }
        if err <= 1e-12 || hi / lo - 1.0 < 1e-15 {
            break;
        }
        if vol > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (err, x) = best.expect("at least one bisection step");
    if err > OC_VOLUME_TOLERANCE {
        return Err(Error::MultiplierNotFound {
            relative_error: err,
        });
    }
    let mut values = t.to_vec();
    for (&e, xe) in active.iter().zip(x) {
        values[e] = xe;
    }
    Ok(prev.with_values(values, fraction))
}

/// Filtered OC iterations at constant volume fraction from a uniform field.
pub fn run_oc(
    structure: &Structure,
    mat: &MaterialModel,
    fraction: f64,
    spec: &FilterSpec,
    cfg: &OcConfig,
) -> Result<OptRun, RunFailure> {
    cfg.validate()?;
    let mut t = DensityField::uniform(structure.mesh(), fraction, cfg.floor)?;
    let mut records = Vec::new();

    macro_rules! attempt {
        ($e:expr) => {
            match $e {
                Ok(v) => v,
                Err(err) => return Err(RunFailure::new(err, records)),
            }
        };
    }

    for iteration in 1..=cfg.max_iterations {
        let sol = attempt!(structure.solve(mat, t.values()));
        let g = attempt!(sensitivities_from_energies(
            mat,
            t.values(),
            &sol.unit_energy
        ));
        let filtered = attempt!(filter_sensitivities(structure.mesh(), &t, &g, spec));
        let next = attempt!(oc_update(&t, &filtered, fraction, cfg.move_limit, cfg.eta));
        let change = next.max_change(&t);
        records.push(IterRecord {
            iteration,
            objective: sol.compliance,
            external_work: sol.external_work,
            volume_fraction: t.fraction(),
            target_fraction: t.target(),
            max_change: change,
            duality_gap: None,
        });
        t = next;
        if change < cfg.change_tol {
            break;
        }
    }
    let solution = attempt!(structure.solve(mat, t.values()));
    Ok(OptRun {
        records,
        density: t,
        solution,
    })
}
