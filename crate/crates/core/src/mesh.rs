//! Structured quad grids, DOF numbering and boundary conditions.
//!
//! Nodes are numbered column-major with y running fastest:
//! `node(ix, iy) = ix * (nely + 1) + iy`, where `iy = 0` is the bottom edge
//! (y = 0). Elements follow the same layout, `elem(ix, iy) = ix * nely + iy`.
//! DOFs are interleaved per node: `2n` is ux, `2n + 1` is uy.

use crate::error::{Error, Result};

/// Displacement axis of a nodal DOF.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Global DOF index of `node` along `axis`.
pub fn dof(node: usize, axis: Axis) -> usize {
    match axis {
        Axis::X => 2 * node,
        Axis::Y => 2 * node + 1,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridMesh {
    nelx: usize,
    nely: usize,
    width: f64,
    height: f64,
    active: Vec<bool>,
}

impl GridMesh {
    /// Fully active `nelx` x `nely` grid over `[0, width] x [0, height]`.
    pub fn new(nelx: usize, nely: usize, width: f64, height: f64) -> Result<Self> {
        if nelx == 0 || nely == 0 {
            return Err(Error::invalid(format!(
                "element counts must be positive, got {nelx}x{nely}"
            )));
        }
        if !(width > 0.0 && width.is_finite()) || !(height > 0.0 && height.is_finite()) {
            return Err(Error::invalid(format!(
                "extents must be positive and finite, got {width} x {height}"
            )));
        }
        Ok(Self {
            nelx,
            nely,
            width,
            height,
            active: vec![true; nelx * nely],
        })
    }

    /// Replace the active set with `predicate(center_x, center_y)` per element.
    pub fn with_mask<F>(&self, predicate: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> bool,
    {
        let active: Vec<bool> = (0..self.n_elements())
            .map(|e| {
                let (x, y) = self.element_center(e);
                predicate(x, y)
            })
            .collect();
        if !active.iter().any(|&a| a) {
            return Err(Error::InvalidDomain(
                "mask deactivates every element".to_string(),
            ));
        }
        Ok(Self {
            active,
            ..self.clone()
        })
    }

    pub fn nelx(&self) -> usize {
        self.nelx
    }

    pub fn nely(&self) -> usize {
        self.nely
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn hx(&self) -> f64 {
        self.width / self.nelx as f64
    }

    pub fn hy(&self) -> f64 {
        self.height / self.nely as f64
    }

    pub fn n_elements(&self) -> usize {
        self.nelx * self.nely
    }

    pub fn n_nodes(&self) -> usize {
        (self.nelx + 1) * (self.nely + 1)
    }

    pub fn n_dofs(&self) -> usize {
        2 * self.n_nodes()
    }

    pub fn element_area(&self) -> f64 {
        self.hx() * self.hy()
    }

    pub fn active(&self) -> &[bool] {
        &self.active
    }

    pub fn is_active(&self, e: usize) -> bool {
        self.active[e]
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    /// Area of the active region.
    pub fn active_area(&self) -> f64 {
        self.active_count() as f64 * self.element_area()
    }

    pub fn element_index(&self, ix: usize, iy: usize) -> usize {
        debug_assert!(ix < self.nelx && iy < self.nely);
        ix * self.nely + iy
    }

    /// Grid coordinates `(ix, iy)` of element `e`.
    pub fn element_coords(&self, e: usize) -> (usize, usize) {
        (e / self.nely, e % self.nely)
    }

    pub fn element_center(&self, e: usize) -> (f64, f64) {
        let (ix, iy) = self.element_coords(e);
        ((ix as f64 + 0.5) * self.hx(), (iy as f64 + 0.5) * self.hy())
    }

    pub fn node_index(&self, ix: usize, iy: usize) -> usize {
        debug_assert!(ix <= self.nelx && iy <= self.nely);
        ix * (self.nely + 1) + iy
    }

    pub fn node_coords(&self, n: usize) -> (usize, usize) {
        (n / (self.nely + 1), n % (self.nely + 1))
    }

    pub fn node_position(&self, n: usize) -> (f64, f64) {
        let (ix, iy) = self.node_coords(n);
        (ix as f64 * self.hx(), iy as f64 * self.hy())
    }

    /// Node closest to the point `(x, y)`, clamped to the grid.
    pub fn nearest_node(&self, x: f64, y: f64) -> usize {
        let ix = (x / self.hx()).round().clamp(0.0, self.nelx as f64) as usize;
        let iy = (y / self.hy()).round().clamp(0.0, self.nely as f64) as usize;
        self.node_index(ix, iy)
    }

    /// Elements touching node `n`.
    pub fn node_elements(&self, n: usize) -> impl Iterator<Item = usize> + '_ {
        let (ix, iy) = self.node_coords(n);
        let xs = ix.saturating_sub(1)..=ix.min(self.nelx - 1);
        xs.flat_map(move |ex| {
            (iy.saturating_sub(1)..=iy.min(self.nely - 1)).map(move |ey| (ex, ey))
        })
        .map(move |(ex, ey)| self.element_index(ex, ey))
    }

    /// Corner nodes of element `e`, counter-clockwise from the bottom-left.
    pub fn element_nodes(&self, e: usize) -> [usize; 4] {
        let (ix, iy) = self.element_coords(e);
        let n0 = self.node_index(ix, iy);
        let n1 = self.node_index(ix + 1, iy);
        [n0, n1, n1 + 1, n0 + 1]
    }

    /// The 8 DOFs of element `e`: `(ux, uy)` at each corner in counter-clockwise order.
    pub fn element_dofs(&self, e: usize) -> Result<[usize; 8]> {
        if e >= self.n_elements() {
            return Err(Error::invalid(format!(
                "element index {e} out of range for {} elements",
                self.n_elements()
            )));
        }
        Ok(self.element_dofs_unchecked(e))
    }

    fn element_dofs_unchecked(&self, e: usize) -> [usize; 8] {
        let nodes = self.element_nodes(e);
        let mut out = [0; 8];
        for (k, &n) in nodes.iter().enumerate() {
            out[2 * k] = dof(n, Axis::X);
            out[2 * k + 1] = dof(n, Axis::Y);
        }
        out
    }

    pub fn dof_map(&self) -> DofMap {
        DofMap {
            dofs: (0..self.n_elements())
                .map(|e| self.element_dofs_unchecked(e))
                .collect(),
        }
    }

    /// Nodes on the left edge (x = 0), bottom to top.
    pub fn left_edge_nodes(&self) -> Vec<usize> {
        (0..=self.nely).map(|iy| self.node_index(0, iy)).collect()
    }

    /// Nodes on the right edge (x = width), bottom to top.
    pub fn right_edge_nodes(&self) -> Vec<usize> {
        (0..=self.nely)
            .map(|iy| self.node_index(self.nelx, iy))
            .collect()
    }

    /// Nodes on the top edge (y = height), left to right.
    pub fn top_edge_nodes(&self) -> Vec<usize> {
        (0..=self.nelx)
            .map(|ix| self.node_index(ix, self.nely))
            .collect()
    }
}

/// Per-element global DOF indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofMap {
    dofs: Vec<[usize; 8]>,
}

impl DofMap {
    pub fn element(&self, e: usize) -> &[usize; 8] {
        &self.dofs[e]
    }

    pub fn len(&self) -> usize {
        self.dofs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dofs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize; 8]> {
        self.dofs.iter()
    }
}

/// Homogeneous Dirichlet supports plus nodal point loads.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryConditions {
    fixed: Vec<usize>,
    loads: Vec<(usize, f64)>,
}

impl BoundaryConditions {
    pub fn new(mesh: &GridMesh, mut fixed: Vec<usize>, loads: Vec<(usize, f64)>) -> Result<Self> {
        let n_dofs = mesh.n_dofs();
        fixed.sort_unstable();
        fixed.dedup();
        if let Some(&bad) = fixed.iter().find(|&&d| d >= n_dofs) {
            return Err(Error::invalid(format!(
                "fixed DOF {bad} out of range ({n_dofs} DOFs)"
            )));
        }
        if fixed.len() < 3 {
            return Err(Error::invalid(format!(
                "need at least 3 fixed DOFs to remove rigid-body modes, got {}",
                fixed.len()
            )));
        }
        for &(d, f) in &loads {
            if d >= n_dofs {
                return Err(Error::invalid(format!(
                    "loaded DOF {d} out of range ({n_dofs} DOFs)"
                )));
            }
            if !f.is_finite() {
                return Err(Error::invalid(format!("non-finite load on DOF {d}")));
            }
            if fixed.binary_search(&d).is_ok() {
                return Err(Error::invalid(format!("DOF {d} is both fixed and loaded")));
            }
        }
        Ok(Self { fixed, loads })
    }

    pub fn fixed_dofs(&self) -> &[usize] {
        &self.fixed
    }

    pub fn loads(&self) -> &[(usize, f64)] {
        &self.loads
    }

    pub fn is_fixed(&self, d: usize) -> bool {
        self.fixed.binary_search(&d).is_ok()
    }

    /// Full-length load vector.
    pub fn load_vector(&self, n_dofs: usize) -> Vec<f64> {
        let mut f = vec![0.0; n_dofs];
        for &(d, v) in &self.loads {
            f[d] += v;
        }
        f
    }

    /// Same supports, every load multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            fixed: self.fixed.clone(),
            loads: self.loads.iter().map(|&(d, f)| (d, f * factor)).collect(),
        }
    }
}
