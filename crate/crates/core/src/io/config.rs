//! `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment, blank lines are ignored and
//! unknown or repeated keys are rejected. Case-dependent keys (mesh, extents,
//! load) default to the selected catalog case.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::cases::{case_by_name, CaseName, CaseSpec, MaskRule};
use crate::dual_lp::OptConfig;
use crate::error::{Error, Result};
use crate::fem::SolverKind;
use crate::material::{
    Interpolation, MaterialModel, DEFAULT_SOFT_RATIO, STEEL_MODULUS, STEEL_POISSON,
};
use crate::oc::OcConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimizerKind {
    /// Alternating equilibrium / exact linearized subproblem, no filter.
    DualLp,
    /// Optimality criteria with sensitivity filter.
    OcFilter,
}

impl OptimizerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OptimizerKind::DualLp => "dual_lp",
            OptimizerKind::OcFilter => "oc_filter",
        }
    }
}

impl FromStr for OptimizerKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "dual_lp" => Ok(OptimizerKind::DualLp),
            "oc_filter" => Ok(OptimizerKind::OcFilter),
            other => Err(format!(
                "unknown optimizer '{other}' (expected dual_lp|oc_filter)"
            )),
        }
    }
}

/// Every recognised key, in serialization order.
pub const KEYS: [&str; 30] = [
    "case",
    "optimizer",
    "nelx",
    "nely",
    "width",
    "height",
    "load",
    "load_x",
    "load_y",
    "hole_radius",
    "t1",
    "t1_start",
    "continuation_steps",
    "stage_iterations",
    "max_iterations",
    "change_tol",
    "move_limit",
    "move_shrink",
    "move_grow",
    "floor",
    "interpolation",
    "penal",
    "e0",
    "e1",
    "nu",
    "rmin",
    "oc_eta",
    "oc_move",
    "solver",
    "seed",
];

/// One `key = value` assignment; `line` is 1-based, 0 for command-line overrides.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

/// Split config text into validated assignments.
pub fn parse_entries(text: &str) -> Result<Vec<Entry>> {
    let mut out: Vec<Entry> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
            line,
            message: format!("expected `key = value`, got `{content}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(Error::Config {
                line,
                message: format!("unknown key `{key}`"),
            });
        }
        if value.is_empty() {
            return Err(Error::Config {
                line,
                message: format!("missing value for `{key}`"),
            });
        }
        if let Some(prev) = out.iter().find(|e| e.key == key) {
            return Err(Error::Config {
                line,
                message: format!("duplicate key `{key}` (first set on line {})", prev.line),
            });
        }
        out.push(Entry {
            key: key.to_string(),
            value: value.to_string(),
            line,
        });
    }
    Ok(out)
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub case: CaseName,
    pub optimizer: OptimizerKind,
    pub nelx: usize,
    pub nely: usize,
    pub width: f64,
    pub height: f64,
    pub load: f64,
    pub load_x: f64,
    pub load_y: f64,
    /// Only used by the hole case.
    pub hole_radius: f64,
    pub t1: f64,
    pub t1_start: f64,
    pub continuation_steps: usize,
    pub stage_iterations: usize,
    pub max_iterations: usize,
    pub change_tol: f64,
    pub move_limit: f64,
    pub move_shrink: f64,
    pub move_grow: f64,
    pub floor: f64,
    pub interpolation: Interpolation,
    pub penal: f64,
    pub e0: f64,
    pub e1: f64,
    pub nu: f64,
    pub rmin: f64,
    pub oc_eta: f64,
    pub oc_move: f64,
    pub solver: SolverKind,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::for_case(CaseName::Cantilever)
    }
}

/// Parse config text into a resolved configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    RunConfig::resolve(&parse_entries(text)?)
}

impl RunConfig {
    /// Defaults with the geometry of `case`.
    pub fn for_case(case: CaseName) -> Self {
        let spec = case_by_name(case);
        let opt = OptConfig::default();
        let oc = OcConfig::default();
        Self {
            case,
            optimizer: OptimizerKind::DualLp,
            nelx: spec.nelx,
            nely: spec.nely,
            width: spec.width,
            height: spec.height,
            load: spec.load,
            load_x: spec.load_point.0,
            load_y: spec.load_point.1,
            hole_radius: match spec.mask {
                MaskRule::Hole { radius, .. } => radius,
                _ => 0.15 * spec.height,
            },
            t1: spec.t1,
            t1_start: opt.t1_start,
            continuation_steps: opt.continuation_steps,
            stage_iterations: opt.stage_iterations,
            max_iterations: opt.max_iterations,
            change_tol: opt.change_tol,
            move_limit: opt.move_limit,
            move_shrink: opt.move_shrink,
            move_grow: opt.move_grow,
            floor: opt.floor,
            interpolation: Interpolation::Simp,
            penal: 3.0,
            e0: STEEL_MODULUS,
            e1: DEFAULT_SOFT_RATIO * STEEL_MODULUS,
            nu: STEEL_POISSON,
            rmin: 1.5,
            oc_eta: oc.eta,
            oc_move: oc.move_limit,
            solver: SolverKind::default(),
            seed: 0,
        }
    }

    /// Apply assignments on top of the defaults of the selected case.
    pub fn resolve(entries: &[Entry]) -> Result<Self> {
        let find = |k: &str| entries.iter().find(|e| e.key == k);
        let case = match find("case") {
            Some(e) => parse_value::<CaseName>(e)?,
            None => CaseName::Cantilever,
        };
        let mut cfg = Self::for_case(case);
        let spec = case_by_name(case);

        for e in entries {
            match e.key.as_str() {
                "case" => {}
                "optimizer" => cfg.optimizer = parse_value(e)?,
                "nelx" => cfg.nelx = parse_value(e)?,
                "nely" => cfg.nely = parse_value(e)?,
                "width" => cfg.width = parse_value(e)?,
                "height" => cfg.height = parse_value(e)?,
                "load" => cfg.load = parse_value(e)?,
                "load_x" => cfg.load_x = parse_value(e)?,
                "load_y" => cfg.load_y = parse_value(e)?,
                "hole_radius" => cfg.hole_radius = parse_value(e)?,
                "t1" => cfg.t1 = parse_value(e)?,
                "t1_start" => cfg.t1_start = parse_value(e)?,
                "continuation_steps" => cfg.continuation_steps = parse_value(e)?,
                "stage_iterations" => cfg.stage_iterations = parse_value(e)?,
                "max_iterations" => cfg.max_iterations = parse_value(e)?,
                "change_tol" => cfg.change_tol = parse_value(e)?,
                "move_limit" => cfg.move_limit = parse_value(e)?,
                "move_shrink" => cfg.move_shrink = parse_value(e)?,
                "move_grow" => cfg.move_grow = parse_value(e)?,
                "floor" => cfg.floor = parse_value(e)?,
                "interpolation" => cfg.interpolation = parse_value(e)?,
                "penal" => cfg.penal = parse_value(e)?,
                "e0" => cfg.e0 = parse_value(e)?,
                "e1" => cfg.e1 = parse_value(e)?,
                "nu" => cfg.nu = parse_value(e)?,
                "rmin" => cfg.rmin = parse_value(e)?,
                "oc_eta" => cfg.oc_eta = parse_value(e)?,
                "oc_move" => cfg.oc_move = parse_value(e)?,
                "solver" => cfg.solver = parse_value(e)?,
                "seed" => cfg.seed = parse_value(e)?,
                other => unreachable!("key `{other}` passed parse_entries"),
            }
        }

        // Geometry-relative defaults follow overridden extents.
        if find("load_x").is_none() {
            cfg.load_x = spec.load_point.0 / spec.width * cfg.width;
        }
        if find("load_y").is_none() {
            cfg.load_y = spec.load_point.1 / spec.height * cfg.height;
        }
        if find("hole_radius").is_none() {
            cfg.hole_radius = 0.15 * cfg.height;
        }
        if find("e1").is_none() {
            cfg.e1 = DEFAULT_SOFT_RATIO * cfg.e0;
        }
        if cfg.interpolation == Interpolation::Linear {
            if let Some(e) = find("penal") {
                if cfg.penal != 1.0 {
                    return Err(Error::Config {
                        line: e.line,
                        message: "`penal` must be 1 with linear interpolation".to_string(),
                    });
                }
            }
            cfg.penal = 1.0;
        }

        cfg.validate_with(|key| find(key).map_or(0, |e| e.line))?;
        Ok(cfg)
    }

    fn validate_with(&self, line_of: impl Fn(&str) -> usize) -> Result<()> {
        let fail = |key: &str, msg: String| Error::Config {
            line: line_of(key),
            message: format!("`{key}`: {msg}"),
        };
        if self.nelx == 0 {
            return Err(fail("nelx", "must be positive".into()));
        }
        if self.nely == 0 {
            return Err(fail("nely", "must be positive".into()));
        }
        for (key, v) in [("width", self.width), ("height", self.height)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(fail(key, format!("{v} must be positive")));
            }
        }
        if !self.load.is_finite() {
            return Err(fail("load", "must be finite".into()));
        }
        if !(0.0..=self.width).contains(&self.load_x) {
            return Err(fail(
                "load_x",
                format!("{} outside [0, width]", self.load_x),
            ));
        }
        if !(0.0..=self.height).contains(&self.load_y) {
            return Err(fail(
                "load_y",
                format!("{} outside [0, height]", self.load_y),
            ));
        }
        if !(self.hole_radius > 0.0) {
            return Err(fail("hole_radius", "must be positive".into()));
        }
        if !(self.floor > 0.0 && self.floor < 1.0) {
            return Err(fail("floor", format!("{} outside (0, 1)", self.floor)));
        }
        if !(self.t1 > self.floor && self.t1 <= 1.0) {
            return Err(fail("t1", format!("{} outside (floor, 1]", self.t1)));
        }
        if !(self.t1_start >= self.t1 && self.t1_start <= 1.0) {
            return Err(fail(
                "t1_start",
                format!("{} outside [t1, 1]", self.t1_start),
            ));
        }
        for (key, v) in [
            ("continuation_steps", self.continuation_steps),
            ("stage_iterations", self.stage_iterations),
            ("max_iterations", self.max_iterations),
        ] {
            if v == 0 {
                return Err(fail(key, "must be positive".into()));
            }
        }
        if !(self.change_tol > 0.0) {
            return Err(fail("change_tol", "must be positive".into()));
        }
        if !(self.move_limit > 0.0 && self.move_limit <= 1.0) {
            return Err(fail(
                "move_limit",
                format!("{} outside (0, 1]", self.move_limit),
            ));
        }
        if !(self.move_shrink > 0.0 && self.move_shrink <= 1.0) {
            return Err(fail(
                "move_shrink",
                format!("{} outside (0, 1]", self.move_shrink),
            ));
        }
        if !(self.move_grow >= 1.0 && self.move_grow.is_finite()) {
            return Err(fail(
                "move_grow",
                format!("{} must be >= 1", self.move_grow),
            ));
        }
        if !(self.penal >= 1.0 && self.penal.is_finite()) {
            return Err(fail("penal", format!("{} must be >= 1", self.penal)));
        }
        if !(self.e0 > 0.0 && self.e0.is_finite()) {
            return Err(fail("e0", "must be positive".into()));
        }
        if !(self.e1 > 0.0 && self.e1 < self.e0) {
            return Err(fail("e1", format!("{} outside (0, e0)", self.e1)));
        }
        if !(0.0..0.5).contains(&self.nu) {
            return Err(fail("nu", format!("{} outside [0, 0.5)", self.nu)));
        }
        if !(self.rmin >= 0.0 && self.rmin < self.nelx.max(self.nely) as f64) {
            return Err(fail(
                "rmin",
                format!("{} outside [0, max(nelx, nely))", self.rmin),
            ));
        }
        if !(self.oc_eta > 0.0) {
            return Err(fail("oc_eta", "must be positive".into()));
        }
        if !(self.oc_move > 0.0 && self.oc_move <= 1.0) {
            return Err(fail("oc_move", format!("{} outside (0, 1]", self.oc_move)));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_with(|_| 0)
    }

    /// `(key, value)` pairs in canonical key order.
    pub fn to_pairs(&self) -> Vec<(&'static str, String)> {
        let v: [String; 30] = [
            self.case.as_str().to_string(),
            self.optimizer.as_str().to_string(),
            self.nelx.to_string(),
            self.nely.to_string(),
            self.width.to_string(),
            self.height.to_string(),
            self.load.to_string(),
            self.load_x.to_string(),
            self.load_y.to_string(),
            self.hole_radius.to_string(),
            self.t1.to_string(),
            self.t1_start.to_string(),
            self.continuation_steps.to_string(),
            self.stage_iterations.to_string(),
            self.max_iterations.to_string(),
            self.change_tol.to_string(),
            self.move_limit.to_string(),
            self.move_shrink.to_string(),
            self.move_grow.to_string(),
            self.floor.to_string(),
            self.interpolation.as_str().to_string(),
            self.penal.to_string(),
            self.e0.to_string(),
            self.e1.to_string(),
            self.nu.to_string(),
            self.rmin.to_string(),
            self.oc_eta.to_string(),
            self.oc_move.to_string(),
            self.solver.as_str().to_string(),
            self.seed.to_string(),
        ];
        KEYS.into_iter().zip(v).collect()
    }

    pub fn to_map(&self) -> BTreeMap<String, String> {
        self.to_pairs()
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect()
    }

    /// Canonical text form: every key, one per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.to_pairs() {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    pub fn material(&self) -> Result<MaterialModel> {
        MaterialModel::new(self.e0, self.e1, self.nu, self.penal, self.interpolation)
    }

    pub fn case_spec(&self) -> CaseSpec {
        let base = case_by_name(self.case);
        let mask = match base.mask {
            MaskRule::Hole { cx, cy, .. } => MaskRule::Hole {
                cx: cx / base.width * self.width,
                cy: cy / base.height * self.height,
                radius: self.hole_radius,
            },
            other => other,
        };
        CaseSpec {
            name: self.case,
            width: self.width,
            height: self.height,
            nelx: self.nelx,
            nely: self.nely,
            load: self.load,
            load_point: (self.load_x, self.load_y),
            support: base.support,
            mask,
            t1: self.t1,
        }
    }

    pub fn opt_config(&self) -> OptConfig {
        OptConfig {
            t1_target: self.t1,
            t1_start: self.t1_start,
            continuation_steps: self.continuation_steps,
            stage_iterations: self.stage_iterations,
            max_iterations: self.max_iterations,
            change_tol: self.change_tol,
            move_limit: self.move_limit,
            move_shrink: self.move_shrink,
            move_grow: self.move_grow,
            floor: self.floor,
        }
    }

    pub fn oc_config(&self) -> OcConfig {
        OcConfig {
            eta: self.oc_eta,
            move_limit: self.oc_move,
            max_iterations: self.max_iterations,
            change_tol: self.change_tol,
            floor: self.floor,
        }
    }
}

fn parse_value<T>(e: &Entry) -> Result<T>
where
    T: FromStr,
    T::Err: std::fmt::Display,
{
    e.value.parse::<T>().map_err(|err| Error::Config {
        line: e.line,
        message: format!("`{}`: cannot parse `{}`: {err}", e.key, e.value),
    })
}
