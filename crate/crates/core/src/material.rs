//! Two-phase isotropic material with linear or SIMP stiffness interpolation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Young's modulus of the strong phase used by the benchmark cases (Pa).
pub const STEEL_MODULUS: f64 = 210e9;
/// Poisson ratio used by the benchmark cases.
pub const STEEL_POISSON: f64 = 0.33;
/// Default soft-phase modulus as a fraction of the strong one.
pub const DEFAULT_SOFT_RATIO: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Interpolation {
    /// `E(t) = E1 + t (E0 - E1)`, the plain two-phase mixture.
    Linear,
    /// `E(t) = E1 + t^p (E0 - E1)`.
    Simp,
}

impl Interpolation {
    pub fn as_str(self) -> &'static str {
        match self {
            Interpolation::Linear => "linear",
            Interpolation::Simp => "simp",
        }
    }
}

impl std::str::FromStr for Interpolation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "linear" => Ok(Interpolation::Linear),
            "simp" => Ok(Interpolation::Simp),
            other => Err(format!(
                "unknown interpolation '{other}' (expected linear|simp)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialModel {
    e0: f64,
    e1: f64,
    nu: f64,
    penal: f64,
    mode: Interpolation,
}

impl MaterialModel {
    /// Validating constructor. `Interpolation::Linear` forces `penal = 1`.
    pub fn new(e0: f64, e1: f64, nu: f64, penal: f64, mode: Interpolation) -> Result<Self> {
        if !(e1 > 0.0 && e0 > e1 && e0.is_finite()) {
            return Err(Error::invalid(format!(
                "moduli must satisfy E0 > E1 > 0, got E0={e0}, E1={e1}"
            )));
        }
        if !(0.0..0.5).contains(&nu) {
            return Err(Error::invalid(format!(
                "Poisson ratio {nu} outside [0, 0.5)"
            )));
        }
        let penal = match mode {
            Interpolation::Linear => 1.0,
            Interpolation::Simp => {
                if !(penal >= 1.0 && penal.is_finite()) {
                    return Err(Error::invalid(format!("penalization {penal} must be >= 1")));
                }
                penal
            }
        };
        Ok(Self {
            e0,
            e1,
            nu,
            penal,
            mode,
        })
    }

    pub fn simp(e0: f64, e1: f64, nu: f64, penal: f64) -> Result<Self> {
        Self::new(e0, e1, nu, penal, Interpolation::Simp)
    }

    pub fn linear(e0: f64, e1: f64, nu: f64) -> Result<Self> {
        Self::new(e0, e1, nu, 1.0, Interpolation::Linear)
    }

    /// Steel-like strong phase with a soft phase at `1e-6 * E0` and SIMP `p = 3`.
    pub fn steel() -> Self {
        Self::simp(
            STEEL_MODULUS,
            DEFAULT_SOFT_RATIO * STEEL_MODULUS,
            STEEL_POISSON,
            3.0,
        )
        .expect("steel constants are valid")
    }

    /// Same phases with a different interpolation.
    pub fn with_mode(&self, mode: Interpolation, penal: f64) -> Result<Self> {
        Self::new(self.e0, self.e1, self.nu, penal, mode)
    }

    pub fn e0(&self) -> f64 {
        self.e0
    }

    pub fn e1(&self) -> f64 {
        self.e1
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn penal(&self) -> f64 {
        self.penal
    }

    pub fn mode(&self) -> Interpolation {
        self.mode
    }

    /// True when the interpolation is affine in t, i.e. effective `p = 1`.
    pub fn is_affine(&self) -> bool {
        self.penal == 1.0
    }

    pub fn interpolate_e(&self, t: f64) -> Result<f64> {
        check_density(t)?;
        Ok(self.modulus(t))
    }

    pub fn interpolate_de(&self, t: f64) -> Result<f64> {
        check_density(t)?;
        Ok(self.modulus_slope(t))
    }

    /// Plane-stress constitutive matrix at density `t` (engineering shear strain).
    pub fn constitutive_matrix(&self, t: f64) -> Result<[[f64; 3]; 3]> {
        check_density(t)?;
        Ok(plane_stress_matrix(self.modulus(t), self.nu))
    }

    pub(crate) fn modulus(&self, t: f64) -> f64 {
        match self.mode {
            Interpolation::Linear => self.e1 + t * (self.e0 - self.e1),
            Interpolation::Simp => self.e1 + t.powf(self.penal) * (self.e0 - self.e1),
        }
    }

    pub(crate) fn modulus_slope(&self, t: f64) -> f64 {
        match self.mode {
            Interpolation::Linear => self.e0 - self.e1,
            Interpolation::Simp => {
                if self.penal == 1.0 {
                    self.e0 - self.e1
                } else {
                    self.penal * t.powf(self.penal - 1.0) * (self.e0 - self.e1)
                }
            }
        }
    }
}

fn check_density(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::invalid(format!("density {t} outside [0, 1]")))
    }
}

/// `E / (1 - nu^2) * [[1, nu, 0], [nu, 1, 0], [0, 0, (1 - nu) / 2]]`.
pub fn plane_stress_matrix(e: f64, nu: f64) -> [[f64; 3]; 3] {
    let c = e / (1.0 - nu * nu);
    [
        [c, c * nu, 0.0],
        [c * nu, c, 0.0],
        [0.0, 0.0, c * 0.5 * (1.0 - nu)],
    ]
}
