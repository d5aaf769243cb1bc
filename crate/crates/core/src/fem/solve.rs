use serde::{Deserialize, Serialize};

use super::sparse::CsrMatrix;
use crate::error::{Error, Result};

/// Required relative residual `||K u - f|| / ||f||` of any accepted solution.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    /// Envelope (skyline) Cholesky factorization with iterative refinement.
    #[default]
    Cholesky,
    /// Jacobi-preconditioned conjugate gradients.
    Cg,
}

impl SolverKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverKind::Cholesky => "cholesky",
            SolverKind::Cg => "cg",
        }
    }
}

impl std::str::FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "cholesky" => Ok(SolverKind::Cholesky),
            "cg" => Ok(SolverKind::Cg),
            other => Err(format!("unknown solver '{other}' (expected cholesky|cg)")),
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> Vec<f64> {
    let mut r = a.mul_vec(x);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    r
}

/// Solve `a x = b` for a symmetric positive definite `a`.
pub fn solve_spd(a: &CsrMatrix, b: &[f64], kind: SolverKind) -> Result<Vec<f64>> {
    let b_norm = norm(b);
    if b_norm == 0.0 {
        return Ok(vec![0.0; b.len()]);
    }
    let x = match kind {
        SolverKind::Cholesky => {
            let factor = SkylineCholesky::factor(a)?;
            let mut x = factor.solve(b);
            for _ in 0..3 {
                let r = residual(a, &x, b);
                if norm(&r) <= 1e-14 * b_norm {
                    break;
                }
                let dx = factor.solve(&r);
                x.iter_mut().zip(&dx).for_each(|(xi, di)| *xi += di);
            }
            x
        }
        SolverKind::Cg => pcg(a, b, RESIDUAL_TOLERANCE * 0.1, 10 * a.dim().max(1))?,
    };
    let r = norm(&residual(a, &x, b));
    if !(r <= RESIDUAL_TOLERANCE * b_norm) {
        return Err(Error::SolverFailure {
            reason: "residual above tolerance".to_string(),
            residual: r,
        });
    }
    Ok(x)
}

const PIVOT_FLOOR: f64 = 1e-12;

/// Lower-triangular Cholesky factor stored row-wise over the matrix envelope.
#[derive(Debug, Clone)]
pub struct SkylineCholesky {
    first: Vec<usize>,
    ptr: Vec<usize>,
    data: Vec<f64>,
}

impl SkylineCholesky {
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let n = a.dim();
        let mut first = Vec::with_capacity(n);
        let mut ptr = Vec::with_capacity(n + 1);
        ptr.push(0);
        for i in 0..n {
            let (cols, _) = a.row(i);
            let f = cols.first().copied().unwrap_or(i).min(i);
            first.push(f);
            ptr.push(ptr[i] + (i - f + 1));
        }
        let mut data = vec![0.0; ptr[n]];
        for i in 0..n {
            let (cols, vals) = a.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                if j <= i {
                    data[ptr[i] + j - first[i]] = v;
                }
            }
        }

        for i in 0..n {
            let fi = first[i];
            let row_i = ptr[i];
            for j in fi..=i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let row_j = ptr[j];
                let mut s = data[row_i + j - fi];
                let original = s;
                for k in k0..j {
                    s -= data[row_i + k - fi] * data[row_j + k - fj];
                }
                if j == i {
                    // Pivots that lose all digits of the original diagonal mean a
                    // (numerically) singular matrix, e.g. an unrestrained rigid mode.
                    if !(s > PIVOT_FLOOR * original) {
                        return Err(Error::SolverFailure {
                            reason: format!("non-positive pivot {s:.3e} at row {i}"),
                            residual: f64::NAN,
                        });
                    }
                    data[row_i + i - fi] = s.sqrt();
                } else {
                    data[row_i + j - fi] = s / data[row_j + j - fj];
                }
            }
        }
        Ok(Self { first, ptr, data })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.first.len();
        let mut y = b.to_vec();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.data[self.ptr[i]..self.ptr[i + 1]];
            let mut s = y[i];
            for k in fi..i {
                s -= row[k - fi] * y[k];
            }
            y[i] = s / row[i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.data[self.ptr[i]..self.ptr[i + 1]];
            y[i] /= row[i - fi];
            let xi = y[i];
            for k in fi..i {
                y[k] -= row[k - fi] * xi;
            }
        }
        y
    }
}

/// Jacobi-preconditioned conjugate gradients to relative residual `tol`.
pub fn pcg(a: &CsrMatrix, b: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let n = a.dim();
    let inv_diag: Vec<f64> = a
        .diagonal()
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let b_norm = norm(b);
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, m)| r * m).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    for _ in 0..max_iter {
        if norm(&r) <= tol * b_norm {
            return Ok(x);
        }
        a.mul_vec_into(&p, &mut ap);
        let curvature: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if !(curvature > 0.0) {
            return Err(Error::SolverFailure {
                reason: "non-positive curvature in conjugate gradients".to_string(),
                residual: norm(&r),
            });
        }
        let alpha = rz / curvature;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let res = norm(&r);
    if res <= tol * b_norm {
        Ok(x)
    } else {
        Err(Error::SolverFailure {
            reason: format!("conjugate gradients did not converge in {max_iter} iterations"),
            residual: res,
        })
    }
}
