use crate::mesh::{BoundaryConditions, DofMap};

/// Square matrix in compressed sparse row layout with sorted columns.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Largest `|i - j|` over stored entries.
    pub fn bandwidth(&self) -> usize {
        (0..self.n)
            .map(|i| {
                let (cols, _) = self.row(i);
                match (cols.first(), cols.last()) {
                    (Some(&lo), Some(&hi)) => (i - lo.min(i)).max(hi.saturating_sub(i)),
                    _ => 0,
                }
            })
            .max()
            .unwrap_or(0)
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum();
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for (i, row) in d.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                row[j] = v;
            }
        }
        d
    }
}

/// Reduced linear system after eliminating the fixed DOFs.
#[derive(Debug, Clone)]
pub struct SparseSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    /// Full DOF index of each reduced unknown.
    pub free_dofs: Vec<usize>,
    /// Length of the full displacement vector.
    pub n_dofs: usize,
}

impl SparseSystem {
    /// Scatter a reduced solution back to full length with zeros at fixed DOFs.
    pub fn expand(&self, reduced: &[f64]) -> Vec<f64> {
        let mut u = vec![0.0; self.n_dofs];
        for (&d, &v) in self.free_dofs.iter().zip(reduced) {
            u[d] = v;
        }
        u
    }
}

const ELIMINATED: usize = usize::MAX;

/// Precomputed sparsity pattern and element-to-slot scatter map.
///
/// Built once per (mesh, supports); each assembly only rewrites values.
#[derive(Debug, Clone)]
pub struct Assembler {
    n_dofs: usize,
    free_dofs: Vec<usize>,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    slots: Vec<[usize; 64]>,
    rhs: Vec<f64>,
}

impl Assembler {
    pub fn new(dofmap: &DofMap, n_dofs: usize, bc: &BoundaryConditions) -> Self {
        let mut reduced = vec![ELIMINATED; n_dofs];
        let mut free_dofs = Vec::with_capacity(n_dofs - bc.fixed_dofs().len());
        for (d, r) in reduced.iter_mut().enumerate() {
            if !bc.is_fixed(d) {
                *r = free_dofs.len();
                free_dofs.push(d);
            }
        }
        let n = free_dofs.len();

        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n];
        for dofs in dofmap.iter() {
            for &a in dofs {
                let ra = reduced[a];
                if ra == ELIMINATED {
                    continue;
                }
                for &b in dofs {
                    let rb = reduced[b];
                    if rb != ELIMINATED {
                        rows[ra].push(rb);
                    }
                }
            }
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        row_ptr.push(0);
        for row in &mut rows {
            row.sort_unstable();
            row.dedup();
            col_idx.extend_from_slice(row);
            row_ptr.push(col_idx.len());
        }

        let slots = dofmap
            .iter()
            .map(|dofs| {
                let mut s = [ELIMINATED; 64];
                for i in 0..8 {
                    let ri = reduced[dofs[i]];
                    if ri == ELIMINATED {
                        continue;
                    }
                    let cols = &col_idx[row_ptr[ri]..row_ptr[ri + 1]];
                    for j in 0..8 {
                        let rj = reduced[dofs[j]];
                        if rj != ELIMINATED {
                            let k = cols.binary_search(&rj).expect("pattern covers element");
                            s[8 * i + j] = row_ptr[ri] + k;
                        }
                    }
                }
                s
            })
            .collect();

        let full = bc.load_vector(n_dofs);
        let rhs = free_dofs.iter().map(|&d| full[d]).collect();

        Self {
            n_dofs,
            free_dofs,
            row_ptr,
            col_idx,
            slots,
            rhs,
        }
    }

    pub fn n_free(&self) -> usize {
        self.free_dofs.len()
    }

    /// Assemble `sum_e scale[e] * ke` over elements in index order.
    pub fn assemble(&self, ke: &[[f64; 8]; 8], scale: &[f64]) -> SparseSystem {
        self.assemble_ordered(ke, scale, 0..self.slots.len())
    }

    /// Assemble visiting elements in the given order.
    pub fn assemble_ordered<I>(&self, ke: &[[f64; 8]; 8], scale: &[f64], order: I) -> SparseSystem
    where
        I: IntoIterator<Item = usize>,
    {
        debug_assert_eq!(scale.len(), self.slots.len());
        let mut values = vec![0.0; self.col_idx.len()];
        for e in order {
            let s = scale[e];
            let slots = &self.slots[e];
            for i in 0..8 {
                for j in 0..8 {
                    let k = slots[8 * i + j];
                    if k != ELIMINATED {
                        values[k] += s * ke[i][j];
                    }
                }
            }
        }
        SparseSystem {
            matrix: CsrMatrix {
                n: self.free_dofs.len(),
                row_ptr: self.row_ptr.clone(),
                col_idx: self.col_idx.clone(),
                values,
            },
            rhs: self.rhs.clone(),
            free_dofs: self.free_dofs.clone(),
            n_dofs: self.n_dofs,
        }
    }
}
