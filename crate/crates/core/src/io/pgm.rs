use std::fmt::Write as _;
use std::path::Path;

use crate::density::DensityField;
use crate::error::{Error, Result};
use crate::mesh::GridMesh;

/// Plain (P2) graymap of the density: solid is black, void and inactive white.
///
/// One pixel per element, rows from the top of the domain down.
pub fn density_pgm(t: &DensityField, mesh: &GridMesh) -> Result<String> {
    if t.len() != mesh.n_elements() {
        return Err(Error::invalid("density length does not match mesh"));
    }
    let (nx, ny) = (mesh.nelx(), mesh.nely());
    let mut s = String::with_capacity(16 + 4 * nx * ny);
    let _ = write!(s, "P2\n{nx} {ny}\n255\n");
    for iy in (0..ny).rev() {
        for ix in 0..nx {
            let e = mesh.element_index(ix, iy);
            let px = if mesh.is_active(e) {
                // round half up
                (255.0 * (1.0 - t.values()[e]) + 0.5)
                    .floor()
                    .clamp(0.0, 255.0) as u8
            } else {
                255
            };
            if ix > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{px}");
        }
        s.push('\n');
    }
    Ok(s)
}

pub fn write_density_pgm(t: &DensityField, mesh: &GridMesh, path: &Path) -> Result<()> {
    super::write_text(path, &density_pgm(t, mesh)?)
}
