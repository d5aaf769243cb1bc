//! End-to-end acceptance criteria. Each test writes one PASS/FAIL line straight
//! to stderr (bypassing output capture) before asserting.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use topo_core::knapsack::knapsack_update;
use topo_core::mesh::{dof, Axis};
use topo_core::{
    build_structure, dual_lp, optimize, sensitivities, BoundaryConditions, CaseName, DensityField,
    GridMesh, Interpolation, MaterialModel, OptRun, OptimizerKind, RunConfig, RunManifest,
    Structure, DEFAULT_FLOOR,
};

fn report(id: u32, title: &str, ok: bool, detail: &str) {
    let tag = if ok { "PASS" } else { "FAIL" };
    let line = format!("acceptance {id:>2} {tag}  {title}: {detail}\n");
    let _ = std::io::stderr().lock().write_all(line.as_bytes());
    assert!(ok, "criterion {id} ({title}) failed: {detail}");
}

fn cfg(case: CaseName, nelx: usize, nely: usize, optimizer: OptimizerKind) -> RunConfig {
    let mut c = RunConfig::for_case(case);
    c.nelx = nelx;
    c.nely = nely;
    c.optimizer = optimizer;
    c
}

fn solve(c: &RunConfig) -> OptRun {
    let s = build_structure(c).unwrap();
    optimize(&s, c).unwrap()
}

/// Both optimizers on every catalog case at its catalog resolution.
fn catalog_runs() -> &'static Vec<(CaseName, OptimizerKind, OptRun)> {
    static RUNS: OnceLock<Vec<(CaseName, OptimizerKind, OptRun)>> = OnceLock::new();
    RUNS.get_or_init(|| {
        let jobs: Vec<(CaseName, OptimizerKind)> = CaseName::ALL
            .into_iter()
            .flat_map(|c| [(c, OptimizerKind::DualLp), (c, OptimizerKind::OcFilter)])
            .collect();
        std::thread::scope(|scope| {
            let handles: Vec<_> = jobs
                .iter()
                .map(|&(case, opt)| {
                    scope.spawn(move || {
                        let mut c = RunConfig::for_case(case);
                        c.optimizer = opt;
                        (case, opt, solve(&c))
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        })
    })
}

// ---------------------------------------------------------------------------

fn patch_error(nelx: usize, nely: usize, nu: f64) -> f64 {
    let (w, h, sigma) = (1.0, 0.8, 1e6);
    let mat = MaterialModel::simp(210e9, 210e3, nu, 3.0).unwrap();
    let mesh = GridMesh::new(nelx, nely, w, h).unwrap();
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
            let iy = mesh.node_coords(n).1;
            let share = if iy == 0 || iy == nely { 0.5 } else { 1.0 };
            (dof(n, Axis::X), sigma * hy * share)
        })
        .collect();
    let bc = BoundaryConditions::new(&mesh, fixed, loads).unwrap();
    let s = Structure::new(mesh, bc, nu).unwrap();
    let u = s
        .solve(&mat, &vec![1.0; nelx * nely])
        .unwrap()
        .displacements;
    let e = mat.e0();
    let mut worst: f64 = 0.0;
    for n in 0..s.mesh().n_nodes() {
        let (x, y) = s.mesh().node_position(n);
        let exact = [sigma * x / e, -nu * sigma * y / e];
        let scale = sigma * w / e;
        worst = worst
            .max((u[dof(n, Axis::X)] - exact[0]).abs() / scale)
            .max((u[dof(n, Axis::Y)] - exact[1]).abs() / scale);
    }
    worst
}

#[test]
fn criterion_01_fe_correctness() {
    let mut patch: f64 = 0.0;
    for nu in [0.0, 0.33] {
        for (nx, ny) in [(1, 1), (4, 3), (10, 7)] {
            patch = patch.max(patch_error(nx, ny, nu));
        }
    }
    let mut identity: f64 = 0.0;
    let mut rows = 0;
    for (_, _, run) in catalog_runs() {
        for r in &run.records {
            identity = identity.max((r.objective - r.external_work).abs() / r.external_work.abs());
            rows += 1;
        }
    }
    report(
        1,
        "FE correctness",
        patch <= 1e-9 && identity <= 1e-8,
        &format!("patch error {patch:.2e} (<=1e-9), compliance identity {identity:.2e} over {rows} iterations (<=1e-8)"),
    );
}

#[test]
fn criterion_02_sensitivities() {
    let mut spec = topo_core::case_by_name(CaseName::Cantilever);
    spec.nelx = 4;
    spec.nely = 3;
    let inst = spec.instantiate(0.5, DEFAULT_FLOOR).unwrap();
    let s = Structure::new(inst.mesh, inst.bc, 0.33).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for (mode, p) in [(Interpolation::Linear, 1.0), (Interpolation::Simp, 3.0)] {
        let mat = MaterialModel::steel().with_mode(mode, p).unwrap();
        let values: Vec<f64> = (0..12).map(|_| rng.random_range(0.2..0.9)).collect();
        let t = DensityField::from_values(s.mesh(), values.clone(), DEFAULT_FLOOR).unwrap();
        let u = s.solve(&mat, &values).unwrap().displacements;
        let g = sensitivities(&s, &mat, &t, &u).unwrap();
        for e in sample(&mut rng, 12, 10) {
            let (mut tp, mut tm) = (values.clone(), values.clone());
            tp[e] += h;
            tm[e] -= h;
            let fd = (s.solve(&mat, &tp).unwrap().compliance
                - s.solve(&mat, &tm).unwrap().compliance)
                / (2.0 * h);
            worst = worst.max((g[e] - fd).abs() / fd.abs());
        }
    }
    report(
        2,
        "sensitivity correctness",
        worst <= 1e-4,
        &format!("max relative FD error {worst:.2e} at p in {{1, 3}} (<=1e-4)"),
    );
}

/// Minimum of `c.x` over basic solutions of `{lo <= x <= hi, w.x = cap}`.
fn vertex_oracle(c: &[f64], w: &[f64], lo: &[f64], hi: &[f64], cap: f64) -> Option<f64> {
    let n = c.len();
    let mut best: Option<f64> = None;
    for free in 0..n {
        for mask in 0u32..(1 << (n - 1)) {
            let (mut used, mut cost, mut bit) = (0.0, 0.0, 0);
            for i in (0..n).filter(|&i| i != free) {
                let v = if (mask >> bit) & 1 == 1 { hi[i] } else { lo[i] };
                bit += 1;
                used += w[i] * v;
                cost += c[i] * v;
            }
            let x = (cap - used) / w[free];
            if x >= lo[free] - 1e-12 && x <= hi[free] + 1e-12 {
                let total = cost + c[free] * x.clamp(lo[free], hi[free]);
                best = Some(best.map_or(total, |b: f64| b.min(total)));
            }
        }
    }
    best
}

#[test]
fn criterion_03_subproblem_exactness() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.random_range(1..=12);
        let mesh = GridMesh::new(n, 1, n as f64, 1.0).unwrap();
        let prev = DensityField::from_values(
            &mesh,
            (0..n).map(|_| rng.random_range(0.05..0.95)).collect(),
            DEFAULT_FLOOR,
        )
        .unwrap();
        let g: Vec<f64> = (0..n).map(|_| -rng.random_range(0.0..10.0)).collect();
        let mv = rng.random_range(0.05..1.0);
        let lo: Vec<f64> = prev
            .values()
            .iter()
            .map(|v| (v - mv).max(DEFAULT_FLOOR))
            .collect();
        let hi: Vec<f64> = prev.values().iter().map(|v| (v + mv).min(1.0)).collect();
        let (vl, vh) = (
            lo.iter().sum::<f64>() / n as f64,
            hi.iter().sum::<f64>() / n as f64,
        );
        let fraction = vl + rng.random_range(0.0..=1.0) * (vh - vl);
        let next = knapsack_update(&g, &prev, fraction, mv).unwrap();
        let got: f64 = g.iter().zip(next.values()).map(|(a, b)| a * b).sum();
        let best = vertex_oracle(&g, &vec![1.0; n], &lo, &hi, fraction * n as f64).unwrap();
        worst = worst.max((got - best).abs() / best.abs().max(1.0));
    }
    report(
        3,
        "subproblem exactness",
        worst <= 1e-10,
        &format!("max objective deviation from vertex enumeration {worst:.2e} over 200 instances (<=1e-10)"),
    );
}

#[test]
fn criterion_04_weak_duality() {
    let mut c = cfg(CaseName::Cantilever, 30, 25, OptimizerKind::DualLp);
    c.interpolation = Interpolation::Linear;
    c.penal = 1.0;
    let s = build_structure(&c).unwrap();
    let run = dual_lp::run(&s, &c.material().unwrap(), &c.opt_config()).unwrap();
    let gaps: Vec<(f64, f64)> = run
        .records
        .iter()
        .map(|r| (r.duality_gap.unwrap(), r.objective))
        .collect();
    let worst = gaps
        .iter()
        .map(|(g, j)| g / j.abs())
        .fold(f64::INFINITY, f64::min);
    let (first, last) = (gaps[0].0, gaps[gaps.len() - 1].0);
    report(
        4,
        "weak duality",
        worst >= -1e-9 && last <= first,
        &format!(
            "min gap/|J| {worst:.3e} (>=-1e-9), gap first {first:.4e} -> final {last:.4e} over {} iterations",
            gaps.len()
        ),
    );
}

#[test]
fn criterion_05_volume_constraint() {
    let mut dual: f64 = 0.0;
    let mut oc: f64 = 0.0;
    let mut finals = Vec::new();
    for (case, opt, run) in catalog_runs() {
        for r in &run.records {
            let err = (r.volume_fraction - r.target_fraction).abs() / r.target_fraction;
            match opt {
                OptimizerKind::DualLp => dual = dual.max(err),
                OptimizerKind::OcFilter => oc = oc.max((r.volume_fraction - 0.5).abs() / 0.5),
            }
        }
        finals.push((*case, *opt, run.final_fraction()));
    }
    let final_err = finals
        .iter()
        .map(|(_, opt, f)| {
            let tol = if *opt == OptimizerKind::DualLp {
                1e-8
            } else {
                1e-6
            };
            (f - 0.5).abs() / 0.5 / tol
        })
        .fold(0.0, f64::max);
    report(
        5,
        "volume constraint",
        dual <= 1e-8 && oc <= 1e-6 && final_err <= 1.0,
        &format!(
            "dual-LP iterate error {dual:.2e} (<=1e-8), OC {oc:.2e} (<=1e-6), all 4 cases end at 0.5 (worst error/tol {final_err:.2e})"
        ),
    );
}

#[test]
fn criterion_06_filter_parity() {
    let mut details = Vec::new();
    let mut ok = true;
    for (case, nx, ny) in [
        (CaseName::Cantilever, 30, 25),
        (CaseName::SimplySupported, 20, 25),
    ] {
        let jd = solve(&cfg(case, nx, ny, OptimizerKind::DualLp)).final_objective();
        let joc = solve(&cfg(case, nx, ny, OptimizerKind::OcFilter)).final_objective();
        let rel = (jd - joc).abs() / joc;
        ok &= rel <= 0.15 && jd <= 1.05 * joc;
        details.push(format!(
            "{case} {nx}x{ny}: dual {jd:.4e} vs OC {joc:.4e} ({:+.1}%)",
            100.0 * (jd - joc) / joc
        ));
    }
    report(6, "filter/no-filter parity", ok, &details.join("; "));
}

// ---------------------------------------------------------------------------
// Criteria driven through the `topo` binary.

fn topo(args: &[&str]) -> (i32, Duration) {
    let start = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_topo"))
        .args(args)
        .stdout(std::process::Stdio::null())
        .status()
        .expect("topo binary runs");
    (status.code().unwrap_or(-1), start.elapsed())
}

struct CliRun {
    dir: PathBuf,
    code: i32,
    elapsed: Duration,
}

fn cli_run(tmp: &Path, name: &str, args: &[&str]) -> CliRun {
    let dir = tmp.join(name);
    let mut full = vec!["run", "--out", dir.to_str().unwrap()];
    full.extend_from_slice(args);
    let (code, elapsed) = topo(&full);
    CliRun { dir, code, elapsed }
}

fn manifest(dir: &Path) -> RunManifest {
    RunManifest::from_json(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

/// Full-size cantilever through the binary with both optimizers.
fn full_cantilever() -> &'static (tempfile::TempDir, CliRun, CliRun) {
    static RUNS: OnceLock<(tempfile::TempDir, CliRun, CliRun)> = OnceLock::new();
    RUNS.get_or_init(|| {
        let tmp = tempfile::tempdir().unwrap();
        let base = ["--case", "cantilever", "--nelx", "60", "--nely", "50"];
        let (d, o) = std::thread::scope(|s| {
            let d = s.spawn(|| {
                let mut a = base.to_vec();
                a.extend(["--optimizer", "dual_lp"]);
                cli_run(tmp.path(), "dual", &a)
            });
            let o = s.spawn(|| {
                let mut a = base.to_vec();
                a.extend(["--optimizer", "oc_filter"]);
                cli_run(tmp.path(), "oc", &a)
            });
            (d.join().unwrap(), o.join().unwrap())
        });
        (tmp, d, o)
    })
}

#[test]
fn criterion_07_checkerboard_suppression() {
    let (_, fine, _) = full_cantilever();
    assert_eq!(fine.code, 0);
    let tmp = tempfile::tempdir().unwrap();
    let coarse = cli_run(
        tmp.path(),
        "coarse",
        &[
            "--case",
            "cantilever",
            "--nelx",
            "60",
            "--nely",
            "20",
            "--optimizer",
            "dual_lp",
        ],
    );
    assert_eq!(coarse.code, 0);
    let s_fine = manifest(&fine.dir).checkerboard_score.unwrap();
    let s_coarse = manifest(&coarse.dir).checkerboard_score.unwrap();
    report(
        7,
        "checkerboard suppression",
        s_fine < s_coarse,
        &format!("score 60x50 {s_fine:.4} < 60x20 {s_coarse:.4}"),
    );
}

fn volume_column(dir: &Path) -> Vec<f64> {
    let text = std::fs::read_to_string(dir.join("history.csv")).unwrap();
    text.lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn criterion_08_continuation_conformance() {
    let (_, dual, oc) = full_cantilever();
    let vd = volume_column(&dual.dir);
    let vo = volume_column(&oc.dir);
    // Tolerances absorb summation round-off in the recorded fraction.
    let monotone = vd.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    let ends = (vd[0] - 0.95).abs() < 1e-12 && (vd[vd.len() - 1] - 0.5).abs() < 1e-8;
    let constant = vo.iter().all(|v| (v - 0.5).abs() < 1e-6);
    report(
        8,
        "continuation conformance",
        monotone && ends && constant,
        &format!(
            "dual-LP {:.4} -> {:.4} non-increasing over {} rows: {monotone}; OC constant 0.5 over {} rows: {constant}",
            vd[0],
            vd[vd.len() - 1],
            vd.len(),
            vo.len()
        ),
    );
}

#[test]
fn criterion_09_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("run.cfg");
    std::fs::write(
        &cfg_path,
        "case = hole_cantilever\nnelx = 25\nnely = 20\nseed = 7\n",
    )
    .unwrap();
    let mut same = true;
    let mut detail = Vec::new();
    for opt in ["dual_lp", "oc_filter"] {
        let args = ["--config", cfg_path.to_str().unwrap(), "--optimizer", opt];
        let a = cli_run(tmp.path(), &format!("{opt}-a"), &args);
        let b = cli_run(tmp.path(), &format!("{opt}-b"), &args);
        assert_eq!((a.code, b.code), (0, 0));
        for file in ["density.pgm", "history.csv"] {
            let eq = std::fs::read(a.dir.join(file)).unwrap()
                == std::fs::read(b.dir.join(file)).unwrap();
            same &= eq;
            detail.push(format!(
                "{opt}/{file} {}",
                if eq { "identical" } else { "DIFFERS" }
            ));
        }
        let (mut ma, mut mb) = (manifest(&a.dir), manifest(&b.dir));
        ma.duration_seconds = 0.0;
        mb.duration_seconds = 0.0;
        let eq = ma.to_json() == mb.to_json();
        same &= eq;
        detail.push(format!(
            "{opt}/manifest {}",
            if eq { "identical" } else { "DIFFERS" }
        ));
    }
    report(9, "determinism", same, &detail.join(", "));
}

#[test]
fn criterion_10_desk_budget() {
    let (_, dual, oc) = full_cantilever();
    let total = dual.elapsed + oc.elapsed;
    let ok = dual.code == 0 && oc.code == 0 && total < Duration::from_secs(300);
    report(
        10,
        "desk-scale budget",
        ok,
        &format!(
            "60x50 cantilever dual-LP {:.1} s + OC {:.1} s = {:.1} s (<300 s, run concurrently)",
            dual.elapsed.as_secs_f64(),
            oc.elapsed.as_secs_f64(),
            total.as_secs_f64()
        ),
    );
}
