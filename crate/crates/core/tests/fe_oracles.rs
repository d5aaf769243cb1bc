//! Finite element solutions against closed-form and dense-factorization oracles.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use topo_core::mesh::{dof, Axis};
use topo_core::{BoundaryConditions, GridMesh, MaterialModel, SolverKind, Structure};

/// Rectangle under uniform tension sigma on the right edge, ux held on the left
/// edge and uy at the origin. Exact field: u = sigma x / E, v = -nu sigma y / E.
fn patch_error(nelx: usize, nely: usize, nu: f64, solver: SolverKind) -> f64 {
    let (w, h, sigma) = (1.3, 0.7, 2.5e7);
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
    let s = Structure::new(mesh, bc, nu).unwrap().with_solver(solver);
    let u = s
        .solve(&mat, &vec![1.0; nelx * nely])
        .unwrap()
        .displacements;
    let e = mat.e0();
    let reference = sigma / e * w;
    let mut worst: f64 = 0.0;
    for n in 0..s.mesh().n_nodes() {
        let (x, y) = s.mesh().node_position(n);
        worst = worst
            .max((u[dof(n, Axis::X)] - sigma * x / e).abs() / reference)
            .max((u[dof(n, Axis::Y)] + nu * sigma * y / e).abs() / reference);
    }
    worst
}

#[test]
fn patch_test_is_exact() {
    for nu in [0.0, 0.33] {
        for (nx, ny) in [(1, 1), (4, 3), (10, 7)] {
            let err = patch_error(nx, ny, nu, SolverKind::Cholesky);
            assert!(err < 1e-9, "nu={nu} {nx}x{ny}: {err:e}");
        }
    }
}

#[test]
fn patch_test_with_cg() {
    let err = patch_error(10, 7, 0.33, SolverKind::Cg);
    assert!(err < 1e-8, "{err:e}");
}

fn random_structure(rng: &mut ChaCha8Rng, nelx: usize, nely: usize) -> Structure {
    let mesh = GridMesh::new(nelx, nely, 1.0, 0.6).unwrap();
    let fixed: Vec<usize> = mesh
        .left_edge_nodes()
        .iter()
        .flat_map(|&n| [dof(n, Axis::X), dof(n, Axis::Y)])
        .collect();
    let loads = (0..3)
        .map(|_| {
            let ix = rng.random_range(1..=nelx);
            let iy = rng.random_range(0..=nely);
            (
                dof(mesh.node_index(ix, iy), Axis::Y),
                rng.random_range(-1e6..1e6),
            )
        })
        .collect::<Vec<_>>();
    let mut dedup: Vec<(usize, f64)> = Vec::new();
    for (d, f) in loads {
        if !dedup.iter().any(|(e, _)| *e == d) {
            dedup.push((d, f));
        }
    }
    let bc = BoundaryConditions::new(&mesh, fixed, dedup).unwrap();
    Structure::new(mesh, bc, 0.33).unwrap()
}

#[test]
fn sparse_solve_matches_dense_lu() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mat = MaterialModel::steel();
    for _ in 0..5 {
        let s = random_structure(&mut rng, 7, 5);
        let t: Vec<f64> = (0..35).map(|_| rng.random_range(0.001..1.0)).collect();
        let sys = s.assemble(&mat, &t).unwrap();
        let dense = sys.matrix.to_dense();
        let n = dense.len();
        let a = DMatrix::from_fn(n, n, |i, j| dense[i][j]);
        let x = a.lu().solve(&DVector::from_vec(sys.rhs.clone())).unwrap();
        let sol = s.solve(&mat, &t).unwrap();
        let scale = x.amax();
        for (k, &d) in sys.free_dofs.iter().enumerate() {
            assert!((sol.displacements[d] - x[k]).abs() <= 1e-9 * scale);
        }
        for &d in s.boundary_conditions().fixed_dofs() {
            assert_eq!(sol.displacements[d], 0.0);
        }
        // compliance identity 1/2 U^T K U = 1/2 f . U
        let rel = (sol.compliance - sol.external_work).abs() / sol.external_work.abs();
        assert!(rel < 1e-10, "{rel:e}");
    }
}

#[test]
fn stiffness_is_symmetric_positive_definite() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let s = random_structure(&mut rng, 5, 4);
    let t: Vec<f64> = (0..20).map(|_| rng.random_range(0.001..1.0)).collect();
    let dense = s
        .assemble(&MaterialModel::steel(), &t)
        .unwrap()
        .matrix
        .to_dense();
    let n = dense.len();
    let a = DMatrix::from_fn(n, n, |i, j| dense[i][j]);
    assert!((&a - a.transpose()).amax() <= 1e-12 * a.amax());
    let eig = a.symmetric_eigenvalues();
    assert!(eig.iter().all(|&l| l > 0.0));
}
