//! Invariant suite behind `topo check`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use topo_core::knapsack::continuous_knapsack;
use topo_core::mesh::{dof, Axis};
use topo_core::{
    dual_lp, filter_sensitivities, oc_update, sensitivities, BoundaryConditions, CaseName,
    DensityField, FilterSpec, GridMesh, Interpolation, MaterialModel, OptConfig, Structure,
};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, worst: Result<f64, String>, tol: f64) -> CheckOutcome {
    match worst {
        Ok(w) => CheckOutcome {
            name,
            passed: w <= tol,
            detail: format!("max error {w:.3e} (tol {tol:.0e})"),
        },
        Err(msg) => CheckOutcome {
            name,
            passed: false,
            detail: msg,
        },
    }
}

/// All checks, with random instances drawn from `seed`.
pub fn run_checks(seed: u64) -> Vec<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    vec![
        outcome("patch_test", patch_test(), 1e-9),
        outcome("compliance_identity", compliance_identity(), 1e-8),
        outcome("sensitivities_fd", sensitivity_fd(&mut rng), 1e-4),
        outcome("knapsack_vertices", knapsack_vertices(&mut rng), 1e-10),
        outcome("filter_identity", filter_identity(&mut rng), 0.0),
        outcome("oc_volume", oc_volume(&mut rng), 1e-6),
    ]
}

type Check = Result<f64, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Uniaxial tension of a solid rectangle: the bilinear element reproduces
/// the constant-stress field exactly.
fn patch_test() -> Check {
    let (nelx, nely, w, h, sigma) = (4, 3, 2.0, 1.5, 1.0e6);
    let mat = MaterialModel::steel();
    let mesh = GridMesh::new(nelx, nely, w, h).map_err(err)?;
    let mut fixed: Vec<usize> = mesh
        .left_edge_nodes()
        .iter()
        .map(|&n| dof(n, Axis::X))
        .collect();
    fixed.push(dof(mesh.node_index(0, 0), Axis::Y));
    let hy = mesh.hy();
    let loads = mesh
        .right_edge_nodes()
        .into_iter()
        .map(|n| {
            let (_, iy) = mesh.node_coords(n);
            let share = if iy == 0 || iy == nely { 0.5 } else { 1.0 };
            (dof(n, Axis::X), sigma * hy * share)
        })
        .collect();
    let bc = BoundaryConditions::new(&mesh, fixed, loads).map_err(err)?;
    let s = Structure::new(mesh, bc, mat.nu()).map_err(err)?;
    let sol = s
        .solve(&mat, &vec![1.0; s.mesh().n_elements()])
        .map_err(err)?;
    let e = mat.e0();
    let scale = sigma / e * w;
    let mut worst: f64 = 0.0;
    for n in 0..s.mesh().n_nodes() {
        let (x, y) = s.mesh().node_position(n);
        let ux = sigma / e * x;
        let uy = -mat.nu() * sigma / e * y;
        worst = worst
            .max((sol.displacements[dof(n, Axis::X)] - ux).abs() / scale)
            .max((sol.displacements[dof(n, Axis::Y)] - uy).abs() / scale);
    }
    Ok(worst)
}

/// `1/2 U^T K U = 1/2 f . U` along a short dual-LP run on every case.
fn compliance_identity() -> Check {
    let mut worst: f64 = 0.0;
    for case in CaseName::ALL {
        let spec = topo_core::case_by_name(case);
        let mut small = spec.clone();
        small.nelx = 12;
        small.nely = 8;
        let inst = small
            .instantiate(spec.t1, topo_core::DEFAULT_FLOOR)
            .map_err(err)?;
        let s = Structure::new(inst.mesh, inst.bc, 0.33).map_err(err)?;
        let cfg = OptConfig {
            max_iterations: 20,
            ..OptConfig::default()
        };
        let run = dual_lp::run(&s, &MaterialModel::steel(), &cfg).map_err(err)?;
        for r in &run.records {
            worst = worst.max((r.objective - r.external_work).abs() / r.external_work.abs());
        }
    }
    Ok(worst)
}

/// Analytic sensitivities against centred differences with full re-solves.
fn sensitivity_fd(rng: &mut ChaCha8Rng) -> Check {
    let inst = topo_core::case_by_name(CaseName::Cantilever);
    let mut small = inst.clone();
    small.nelx = 4;
    small.nely = 3;
    let inst = small
        .instantiate(0.5, topo_core::DEFAULT_FLOOR)
        .map_err(err)?;
    let s = Structure::new(inst.mesh, inst.bc, 0.33).map_err(err)?;
    let n = s.mesh().n_elements();
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for (mode, penal) in [(Interpolation::Linear, 1.0), (Interpolation::Simp, 3.0)] {
        let mat = MaterialModel::steel().with_mode(mode, penal).map_err(err)?;
        let values: Vec<f64> = (0..n).map(|_| rng.random_range(0.3..0.9)).collect();
        let t = DensityField::from_values(s.mesh(), values.clone(), 1e-3).map_err(err)?;
        let sol = s.solve(&mat, &values).map_err(err)?;
        let g = sensitivities(&s, &mat, &t, &sol.displacements).map_err(err)?;
        for e in 0..n {
            let mut tp = values.clone();
            let mut tm = values.clone();
            tp[e] += h;
            tm[e] -= h;
            let jp = s.solve(&mat, &tp).map_err(err)?.compliance;
            let jm = s.solve(&mat, &tm).map_err(err)?.compliance;
            let fd = (jp - jm) / (2.0 * h);
            worst = worst.max((g[e] - fd).abs() / g[e].abs());
        }
    }
    Ok(worst)
}

/// Greedy knapsack objective against enumeration of all basic solutions.
fn knapsack_vertices(rng: &mut ChaCha8Rng) -> Check {
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.random_range(1..=10);
        let c: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..2.0)).collect();
        let lo: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..0.5)).collect();
        let hi: Vec<f64> = lo.iter().map(|l| l + rng.random_range(0.0..0.5)).collect();
        let wlo: f64 = w.iter().zip(&lo).map(|(a, b)| a * b).sum();
        let whi: f64 = w.iter().zip(&hi).map(|(a, b)| a * b).sum();
        let cap = wlo + rng.random_range(0.0..=1.0) * (whi - wlo);
        let x = continuous_knapsack(&c, &w, &lo, &hi, cap).map_err(err)?;
        let got: f64 = c.iter().zip(&x).map(|(a, b)| a * b).sum();
        let best = vertex_optimum(&c, &w, &lo, &hi, cap).ok_or("oracle found no vertex")?;
        worst = worst.max((got - best).abs() / best.abs().max(1.0));
    }
    Ok(worst)
}

fn vertex_optimum(c: &[f64], w: &[f64], lo: &[f64], hi: &[f64], cap: f64) -> Option<f64> {
    let n = c.len();
    let mut best: Option<f64> = None;
    for free in 0..n {
        for mask in 0u32..(1 << (n - 1)) {
            let mut used = 0.0;
            let mut cost = 0.0;
            for (bit, i) in (0..n).filter(|&i| i != free).enumerate() {
                let v = if mask >> bit & 1 == 1 { hi[i] } else { lo[i] };
                used += w[i] * v;
                cost += c[i] * v;
            }
            let xf = (cap - used) / w[free];
            let slack = 1e-12 * (1.0 + hi[free].abs());
            if xf >= lo[free] - slack && xf <= hi[free] + slack {
                let total = cost + c[free] * xf.clamp(lo[free], hi[free]);
                best = Some(best.map_or(total, |b: f64| b.min(total)));
            }
        }
    }
    best
}

/// A radius below one element leaves sensitivities untouched.
fn filter_identity(rng: &mut ChaCha8Rng) -> Check {
    let mesh = GridMesh::new(7, 5, 1.4, 1.0).map_err(err)?;
    let n = mesh.n_elements();
    let t = DensityField::from_values(
        &mesh,
        (0..n).map(|_| rng.random_range(0.01..1.0)).collect(),
        1e-3,
    )
    .map_err(err)?;
    let g: Vec<f64> = (0..n).map(|_| -rng.random_range(0.0..5.0)).collect();
    let spec = FilterSpec::new(0.9, &mesh).map_err(err)?;
    let f = filter_sensitivities(&mesh, &t, &g, &spec).map_err(err)?;
    Ok(f.iter()
        .zip(&g)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// OC updates land on the volume target.
fn oc_volume(rng: &mut ChaCha8Rng) -> Check {
    let mesh = GridMesh::new(10, 6, 1.0, 0.6).map_err(err)?;
    let n = mesh.n_elements();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let t = DensityField::uniform(&mesh, 0.5, 1e-3).map_err(err)?;
        let g: Vec<f64> = (0..n).map(|_| -rng.random_range(1e-3..10.0)).collect();
        let next = oc_update(&t, &g, 0.5, 0.2, 0.5).map_err(err)?;
        worst = worst.max((next.fraction() - 0.5).abs() / 0.5);
    }
    Ok(worst)
}
