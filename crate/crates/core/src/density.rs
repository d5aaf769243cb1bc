use crate::error::{Error, Result};
use crate::mesh::GridMesh;

/// Lowest density any element may take.
pub const DEFAULT_FLOOR: f64 = 1e-3;

/// Relative tolerance of the volume equality for exact updates.
pub const VOLUME_TOLERANCE: f64 = 1e-8;

/// Per-element design densities with volume bookkeeping.
///
/// Inactive elements are pinned at the floor and never count toward volume.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    values: Vec<f64>,
    volumes: Vec<f64>,
    active: Vec<bool>,
    floor: f64,
    target: f64,
}

impl DensityField {
    /// Uniform `fraction` on active elements.
    pub fn uniform(mesh: &GridMesh, fraction: f64, floor: f64) -> Result<Self> {
        check_floor(floor)?;
        if !(fraction >= floor && fraction <= 1.0) {
            return Err(Error::invalid(format!(
                "volume fraction {fraction} outside [{floor}, 1]"
            )));
        }
        let active = mesh.active().to_vec();
        let values = active
            .iter()
            .map(|&a| if a { fraction } else { floor })
            .collect();
        Ok(Self {
            values,
            volumes: vec![mesh.element_area(); mesh.n_elements()],
            active,
            floor,
            target: fraction,
        })
    }

    /// Field with explicit values; inactive entries are reset to the floor.
    pub fn from_values(mesh: &GridMesh, values: Vec<f64>, floor: f64) -> Result<Self> {
        check_floor(floor)?;
        if values.len() != mesh.n_elements() {
            return Err(Error::invalid(format!(
                "{} densities for {} elements",
                values.len(),
                mesh.n_elements()
            )));
        }
        let active = mesh.active().to_vec();
        let mut values = values;
        for (v, &a) in values.iter_mut().zip(&active) {
            if !a {
                *v = floor;
            } else if !(*v >= floor && *v <= 1.0) {
                return Err(Error::invalid(format!("density {v} outside [{floor}, 1]")));
            }
        }
        let mut field = Self {
            values,
            volumes: vec![mesh.element_area(); mesh.n_elements()],
            active,
            floor,
            target: 0.0,
        };
        field.target = field.fraction();
        Ok(field)
    }

    pub(crate) fn with_values(&self, values: Vec<f64>, target: f64) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self {
            values,
            volumes: self.volumes.clone(),
            active: self.active.clone(),
            floor: self.floor,
            target,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    pub fn active(&self) -> &[bool] {
        &self.active
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    /// The volume fraction this field was constructed or updated for.
    pub fn target(&self) -> f64 {
        self.target
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Indices of active elements in ascending order.
    pub fn active_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.active
            .iter()
            .enumerate()
            .filter(|(_, &a)| a)
            .map(|(e, _)| e)
    }

    /// `sum_active t_e V_e`.
    pub fn material_volume(&self) -> f64 {
        self.active_indices()
            .map(|e| self.values[e] * self.volumes[e])
            .sum()
    }

    /// `sum_active V_e`.
    pub fn domain_volume(&self) -> f64 {
        self.active_indices().map(|e| self.volumes[e]).sum()
    }

    pub fn fraction(&self) -> f64 {
        self.material_volume() / self.domain_volume()
    }

    /// `max_e |t_e - other_e|`.
    pub fn max_change(&self, other: &DensityField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Relative volume error against the stored target.
    pub fn volume_error(&self) -> f64 {
        let dom = self.domain_volume();
        (self.material_volume() - self.target * dom).abs() / dom
    }
}

fn check_floor(floor: f64) -> Result<()> {
    if floor > 0.0 && floor < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "density floor {floor} outside (0, 1)"
        )))
    }
}
