use crate::density::DensityField;
use crate::error::{Error, Result};
use crate::mesh::GridMesh;

/// Fraction of fully active 2x2 element blocks whose thresholded pattern
/// (at 0.5) alternates like a checkerboard.
pub fn checkerboard_score(t: &DensityField, mesh: &GridMesh) -> Result<f64> {
    if t.len() != mesh.n_elements() {
        return Err(Error::invalid("density length does not match mesh"));
    }
    let solid = |ix: usize, iy: usize| t.values()[mesh.element_index(ix, iy)] >= 0.5;
    let active = |ix: usize, iy: usize| mesh.is_active(mesh.element_index(ix, iy));
    let mut blocks = 0usize;
    let mut alternating = 0usize;
    for ix in 0..mesh.nelx().saturating_sub(1) {
        for iy in 0..mesh.nely().saturating_sub(1) {
            if !(active(ix, iy)
                && active(ix + 1, iy)
                && active(ix, iy + 1)
                && active(ix + 1, iy + 1))
            {
                continue;
            }
            blocks += 1;
            let a = solid(ix, iy);
            if solid(ix + 1, iy + 1) == a && solid(ix + 1, iy) != a && solid(ix, iy + 1) != a {
                alternating += 1;
            }
        }
    }
    if blocks == 0 {
        return Err(Error::UndefinedMetric(
            "no fully active 2x2 element block".to_string(),
        ));
    }
    Ok(alternating as f64 / blocks as f64)
}
