use crate::error::{Error, Result};
use crate::material::plane_stress_matrix;

/// Natural coordinates of the corners, counter-clockwise from bottom-left.
const CORNERS: [(f64, f64); 4] = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)];

/// 8x8 stiffness of a bilinear quad at unit Young's modulus and unit thickness.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementStiffness {
    ke: [[f64; 8]; 8],
}

impl ElementStiffness {
    pub fn matrix(&self) -> &[[f64; 8]; 8] {
        &self.ke
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.ke[i][j]
    }

    /// `u^T ke u` for element displacements `u`.
    pub fn quadratic_form(&self, u: &[f64; 8]) -> f64 {
        let mut acc = 0.0;
        for i in 0..8 {
            let row = &self.ke[i];
            let mut r = 0.0;
            for j in 0..8 {
                r += row[j] * u[j];
            }
            acc += u[i] * r;
        }
        acc
    }
}

/// Reference stiffness from 2x2 Gauss quadrature of `B^T D B` with `E = 1`.
pub fn reference_ke(hx: f64, hy: f64, nu: f64) -> Result<ElementStiffness> {
    if !(hx > 0.0 && hy > 0.0) {
        return Err(Error::invalid(format!(
            "element sizes must be positive, got {hx} x {hy}"
        )));
    }
    let d = plane_stress_matrix(1.0, nu);
    let g = 1.0 / 3f64.sqrt();
    let det_j = 0.25 * hx * hy;
    let mut ke = [[0.0; 8]; 8];
    for &xi in &[-g, g] {
        for &eta in &[-g, g] {
            let b = strain_displacement(xi, eta, hx, hy);
            // db = D * B (3x8)
            let mut db = [[0.0; 8]; 3];
            for r in 0..3 {
                for c in 0..8 {
                    db[r][c] = (0..3).map(|k| d[r][k] * b[k][c]).sum();
                }
            }
            for i in 0..8 {
                for j in 0..8 {
                    let v: f64 = (0..3).map(|k| b[k][i] * db[k][j]).sum();
                    ke[i][j] += v * det_j;
                }
            }
        }
    }
    // Symmetrize away quadrature round-off.
    for (i, j) in (0..8).flat_map(|i| ((i + 1)..8).map(move |j| (i, j))) {
        let avg = 0.5 * (ke[i][j] + ke[j][i]);
        ke[i][j] = avg;
        ke[j][i] = avg;
    }
    Ok(ElementStiffness { ke })
}

/// Strain-displacement matrix rows `(e_xx, e_yy, gamma_xy)` on a rectangle.
fn strain_displacement(xi: f64, eta: f64, hx: f64, hy: f64) -> [[f64; 8]; 3] {
    let mut b = [[0.0; 8]; 3];
    for (a, &(xa, ya)) in CORNERS.iter().enumerate() {
        let dn_dxi = 0.25 * xa * (1.0 + ya * eta);
        let dn_deta = 0.25 * ya * (1.0 + xa * xi);
        let dn_dx = dn_dxi * 2.0 / hx;
        let dn_dy = dn_deta * 2.0 / hy;
        b[0][2 * a] = dn_dx;
        b[1][2 * a + 1] = dn_dy;
        b[2][2 * a] = dn_dy;
        b[2][2 * a + 1] = dn_dx;
    }
    b
}
