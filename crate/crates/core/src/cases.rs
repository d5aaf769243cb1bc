//! The four benchmark beams: geometry, mesh, supports and load.
//!
//! Load points and support details are not given by the source figures; the
//! defaults here are declared choices and every one can be overridden.

use std::fmt;
use std::str::FromStr;

use crate::density::DensityField;
use crate::error::{Error, Result};
use crate::mesh::{dof, Axis, BoundaryConditions, GridMesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseName {
    Cantilever,
    SimplySupported,
    HoleCantilever,
    LShape,
}

impl CaseName {
    pub const ALL: [CaseName; 4] = [
        CaseName::Cantilever,
        CaseName::SimplySupported,
        CaseName::HoleCantilever,
        CaseName::LShape,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseName::Cantilever => "cantilever",
            CaseName::SimplySupported => "simply_supported",
            CaseName::HoleCantilever => "hole_cantilever",
            CaseName::LShape => "l_shape",
        }
    }
}

impl fmt::Display for CaseName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        CaseName::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| {
                format!(
                    "unknown case '{s}' (expected one of: {})",
                    CaseName::ALL.map(|c| c.as_str()).join(", ")
                )
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SupportRule {
    /// Both DOFs of every node on x = 0.
    ClampLeft,
    /// ux, uy at the bottom-left node and uy at the bottom-right node.
    PinnedBottomCorners,
    /// Both DOFs of every node on y = height.
    ClampTop,
}

impl SupportRule {
    pub fn describe(&self) -> &'static str {
        match self {
            SupportRule::ClampLeft => "clamped at x=0",
            SupportRule::PinnedBottomCorners => "pinned at bottom corners x=0 and x=width",
            SupportRule::ClampTop => "clamped at y=height",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MaskRule {
    None,
    /// Circular hole; elements whose centre lies within `radius` are removed.
    Hole {
        cx: f64,
        cy: f64,
        radius: f64,
    },
    /// Remove the lower-right quadrant `x > width/2, y < height/2`.
    LShape,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseSpec {
    pub name: CaseName,
    pub width: f64,
    pub height: f64,
    pub nelx: usize,
    pub nely: usize,
    /// Vertical point load (N); negative points down.
    pub load: f64,
    /// Load application point, snapped to the nearest node.
    pub load_point: (f64, f64),
    pub support: SupportRule,
    pub mask: MaskRule,
    pub t1: f64,
}

/// The benchmark catalog, in presentation order.
pub fn case_catalog() -> Vec<CaseSpec> {
    vec![
        CaseSpec {
            name: CaseName::Cantilever,
            width: 1.0,
            height: 0.5,
            nelx: 60,
            nely: 50,
            load: -1e6,
            load_point: (1.0, 0.25),
            support: SupportRule::ClampLeft,
            mask: MaskRule::None,
            t1: 0.5,
        },
        CaseSpec {
            name: CaseName::SimplySupported,
            width: 1.0,
            height: 0.5,
            nelx: 40,
            nely: 50,
            load: -1e7,
            load_point: (0.5, 0.5),
            support: SupportRule::PinnedBottomCorners,
            mask: MaskRule::None,
            t1: 0.5,
        },
        CaseSpec {
            name: CaseName::HoleCantilever,
            width: 1.0,
            height: 0.6,
            nelx: 50,
            nely: 40,
            load: -1e6,
            load_point: (1.0, 0.3),
            support: SupportRule::ClampLeft,
            mask: MaskRule::Hole {
                cx: 0.5,
                cy: 0.3,
                radius: 0.15 * 0.6,
            },
            t1: 0.5,
        },
        CaseSpec {
            name: CaseName::LShape,
            width: 1.0,
            height: 1.0,
            nelx: 40,
            nely: 60,
            load: -1e8,
            load_point: (0.5, 0.25),
            support: SupportRule::ClampTop,
            mask: MaskRule::LShape,
            t1: 0.5,
        },
    ]
}

/// Catalog entry by name.
pub fn case_by_name(name: CaseName) -> CaseSpec {
    case_catalog()
        .into_iter()
        .find(|c| c.name == name)
        .expect("every case name is in the catalog")
}

/// A case resolved onto a concrete mesh.
#[derive(Debug, Clone)]
pub struct CaseInstance {
    pub mesh: GridMesh,
    pub bc: BoundaryConditions,
    pub seed: DensityField,
    /// Node that carries the load.
    pub load_node: usize,
}

impl CaseSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.height > 0.0) || self.nelx == 0 || self.nely == 0 {
            return Err(Error::InvalidCase(format!(
                "{}: dimensions and mesh counts must be positive",
                self.name
            )));
        }
        if !(self.t1 > 0.0 && self.t1 <= 1.0) {
            return Err(Error::InvalidCase(format!(
                "{}: t1 {} outside (0, 1]",
                self.name, self.t1
            )));
        }
        if !self.load.is_finite() {
            return Err(Error::InvalidCase(format!(
                "{}: non-finite load",
                self.name
            )));
        }
        let (x, y) = self.load_point;
        if !(0.0..=self.width).contains(&x) || !(0.0..=self.height).contains(&y) {
            return Err(Error::InvalidCase(format!(
                "{}: load point ({x}, {y}) outside the domain",
                self.name
            )));
        }
        if let MaskRule::Hole { radius, .. } = self.mask {
            if !(radius > 0.0) {
                return Err(Error::InvalidCase(format!(
                    "{}: hole radius must be positive",
                    self.name
                )));
            }
        }
        Ok(())
    }

    pub fn build_mesh(&self) -> Result<GridMesh> {
        let mesh = GridMesh::new(self.nelx, self.nely, self.width, self.height)?;
        let (w, h) = (self.width, self.height);
        match self.mask {
            MaskRule::None => Ok(mesh),
            MaskRule::Hole { cx, cy, radius } => {
                mesh.with_mask(|x, y| (x - cx).hypot(y - cy) > radius)
            }
            MaskRule::LShape => mesh.with_mask(|x, y| !(x > 0.5 * w && y < 0.5 * h)),
        }
    }

    /// Build mesh, supports, load and a uniform seed field at `seed_fraction`.
    pub fn instantiate(&self, seed_fraction: f64, floor: f64) -> Result<CaseInstance> {
        self.validate()?;
        let mesh = self.build_mesh()?;

        let clamp = |nodes: Vec<usize>| -> Vec<usize> {
            nodes
                .into_iter()
                .flat_map(|n| [dof(n, Axis::X), dof(n, Axis::Y)])
                .collect()
        };
        let fixed = match self.support {
            SupportRule::ClampLeft => clamp(mesh.left_edge_nodes()),
            SupportRule::ClampTop => clamp(mesh.top_edge_nodes()),
            SupportRule::PinnedBottomCorners => {
                let left = mesh.node_index(0, 0);
                let right = mesh.node_index(mesh.nelx(), 0);
                vec![dof(left, Axis::X), dof(left, Axis::Y), dof(right, Axis::Y)]
            }
        };

        let load_node = mesh.nearest_node(self.load_point.0, self.load_point.1);
        if !mesh.node_elements(load_node).any(|e| mesh.is_active(e)) {
            return Err(Error::InvalidCase(format!(
                "{}: load node {load_node} touches no active element",
                self.name
            )));
        }
        let load_dof = dof(load_node, Axis::Y);
        if fixed.contains(&load_dof) {
            return Err(Error::InvalidCase(format!(
                "{}: load node {load_node} is supported",
                self.name
            )));
        }
        for &d in &fixed {
            if !mesh.node_elements(d / 2).any(|e| mesh.is_active(e)) {
                return Err(Error::InvalidCase(format!(
                    "{}: support node {} touches no active element",
                    self.name,
                    d / 2
                )));
            }
        }
        let bc = BoundaryConditions::new(&mesh, fixed, vec![(load_dof, self.load)])
            .map_err(|e| Error::InvalidCase(format!("{}: {e}", self.name)))?;
        let seed = DensityField::uniform(&mesh, seed_fraction, floor)?;
        Ok(CaseInstance {
            mesh,
            bc,
            seed,
            load_node,
        })
    }
}
