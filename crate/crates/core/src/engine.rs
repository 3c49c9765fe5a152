//! Quasi-static simulation of one grasp: press the fingertips onto the
//! object, close the fingers, and check that the lifted object stays put.
//!
//! In hybrid mode the distal joint is a torsion spring whose stiffness is set
//! by the ring pressure. During the press the fingertip folds back until the
//! ring torque balances the contact load; during the close the ring drives it
//! forward again, and that spring-back adds end-shortening to the sheet on top
//! of the commanded closure. In rigid mode the joint is locked.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{FingertipGeometry, GeometryError, MAX_FINGER_SEPARATION_MM};
use crate::joint::{JointError, JointStiffnessModel};
use crate::numeric::bisect;
use crate::sheet::{buckle_amplitude, SheetError, SheetSpec, GRAVITY_M_PER_S2};

/// Slack on friction-cone checks.
pub const FRICTION_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Sheet(#[from] SheetError),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("invalid contact parameters: {0}")]
    InvalidContact(String),
    #[error("invalid engine configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid stiffness model: {0}")]
    InvalidModel(String),
    #[error("no successful closure up to {upper_mm:.3} mm")]
    Infeasible { upper_mm: f64 },
    #[error("scenario holds a rigid object; use grasp_rigid_object")]
    NotASheet,
    #[error("root bracketing failed in {0}")]
    RootFinding(&'static str),
}

impl From<JointError> for EngineError {
    fn from(e: JointError) -> Self {
        EngineError::InvalidModel(e.to_string())
    }
}

/// Coulomb coefficients at the fingertip pad and under the object.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContactParams {
    pub mu_tip: f64,
    pub mu_surface: f64,
}

impl ContactParams {
    pub fn new(mu_tip: f64, mu_surface: f64) -> Self {
        Self { mu_tip, mu_surface }
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        for (name, v) in [("mu_tip", self.mu_tip), ("mu_surface", self.mu_surface)] {
            if !(0.0..=2.0).contains(&v) {
                return Err(EngineError::InvalidContact(format!("{name} = {v} outside [0, 2]")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Hybrid,
    Rigid,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Hybrid => "hybrid",
            Mode::Rigid => "rigid",
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A rigid object described only by what the friction check needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RigidObjectSpec {
    pub name: String,
    pub mass_kg: f64,
    #[serde(default)]
    pub contact_mu_override: Option<f64>,
    #[serde(default)]
    pub grasp_height_mm: f64,
    /// Derates usable friction for sharp edges and small contact patches.
    pub edge_factor: f64,
    /// Bend angle at which the pad wedges against the object.
    #[serde(default = "default_contact_angle")]
    pub contact_angle_deg: f64,
}

pub const DEFAULT_OBJECT_CONTACT_ANGLE_DEG: f64 = 15.0;

fn default_contact_angle() -> f64 {
    DEFAULT_OBJECT_CONTACT_ANGLE_DEG
}

impl RigidObjectSpec {
    pub fn new(name: &str, mass_kg: f64, edge_factor: f64) -> Self {
        Self {
            name: name.to_string(),
            mass_kg,
            contact_mu_override: None,
            grasp_height_mm: 0.0,
            edge_factor,
            contact_angle_deg: DEFAULT_OBJECT_CONTACT_ANGLE_DEG,
        }
    }

    pub fn validate(&self, geom: &FingertipGeometry) -> Result<(), EngineError> {
        let bad = |m: String| Err(EngineError::InvalidScenario(format!("object `{}`: {m}", self.name)));
        if !(self.mass_kg.is_finite() && self.mass_kg > 0.0) {
            return bad(format!("mass_kg = {} must be positive", self.mass_kg));
        }
        if !(self.edge_factor > 0.0 && self.edge_factor <= 1.0) {
            return bad(format!("edge_factor = {} outside (0, 1]", self.edge_factor));
        }
        if let Some(mu) = self.contact_mu_override {
            if !(0.0..=2.0).contains(&mu) {
                return bad(format!("contact_mu_override = {mu} outside [0, 2]"));
            }
        }
        if !(self.grasp_height_mm.is_finite() && self.grasp_height_mm >= 0.0) {
            return bad(format!("grasp_height_mm = {} must be non-negative", self.grasp_height_mm));
        }
        if !(0.0..=geom.alpha_max_deg).contains(&self.contact_angle_deg) {
            return bad(format!("contact_angle_deg = {} outside joint range", self.contact_angle_deg));
        }
        if geom.horizontal_lever(self.contact_angle_deg) <= 1e-9 {
            return bad(format!(
                "contact_angle_deg = {} leaves no horizontal lever (beta + alpha >= 90 deg)",
                self.contact_angle_deg
            ));
        }
        Ok(())
    }

    pub fn weight_n(&self) -> f64 {
        self.mass_kg * GRAVITY_M_PER_S2
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Workpiece {
    Sheet(SheetSpec),
    Object(RigidObjectSpec),
}

/// One grasp experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraspScenario {
    pub mode: Mode,
    /// Bend angle before the press. The rigid finger is locked here.
    pub alpha0_deg: f64,
    pub pressure_kpa: f64,
    pub d_f0_mm: f64,
    pub close_by_mm: f64,
    /// Commanded per-finger normal preload N1.
    pub press_force_n: f64,
    pub workpiece: Workpiece,
}

impl GraspScenario {
    pub fn sheet(
        mode: Mode,
        alpha0_deg: f64,
        pressure_kpa: f64,
        d_f0_mm: f64,
        close_by_mm: f64,
        press_force_n: f64,
        sheet: SheetSpec,
    ) -> Self {
        Self {
            mode,
            alpha0_deg,
            pressure_kpa,
            d_f0_mm,
            close_by_mm,
            press_force_n,
            workpiece: Workpiece::Sheet(sheet),
        }
    }

    pub fn with_close_by(&self, close_by_mm: f64) -> Self {
        Self {
            close_by_mm,
            ..self.clone()
        }
    }

    pub fn with_mode(&self, mode: Mode) -> Self {
        Self { mode, ..self.clone() }
    }

    pub fn with_pressure(&self, pressure_kpa: f64) -> Self {
        Self {
            pressure_kpa,
            ..self.clone()
        }
    }

    pub fn sheet_spec(&self) -> Option<&SheetSpec> {
        match &self.workpiece {
            Workpiece::Sheet(s) => Some(s),
            Workpiece::Object(_) => None,
        }
    }

    pub fn validate(&self, geom: &FingertipGeometry) -> Result<(), EngineError> {
        let bad = |m: String| Err(EngineError::InvalidScenario(m));
        if !(self.alpha0_deg > 0.0 && self.alpha0_deg <= geom.alpha_max_deg) {
            return bad(format!(
                "alpha0_deg = {} outside (0, {}]",
                self.alpha0_deg, geom.alpha_max_deg
            ));
        }
        if !(self.pressure_kpa.is_finite() && self.pressure_kpa >= 0.0) {
            return bad(format!("pressure_kpa = {} must be non-negative", self.pressure_kpa));
        }
        if !(0.0..=MAX_FINGER_SEPARATION_MM).contains(&self.d_f0_mm) {
            return bad(format!("d_f0_mm = {} outside [0, 100]", self.d_f0_mm));
        }
        if !(self.close_by_mm.is_finite() && self.close_by_mm >= 0.0) {
            return bad(format!("close_by_mm = {} must be non-negative", self.close_by_mm));
        }
        if !(self.press_force_n.is_finite() && self.press_force_n > 0.0) {
            return bad(format!("press_force_n = {} must be positive", self.press_force_n));
        }
        match &self.workpiece {
            Workpiece::Sheet(s) => s.validate()?,
            Workpiece::Object(o) => o.validate(geom)?,
        }
        Ok(())
    }
}

/// Contact loads on the object at one quasi-static state.
///
/// `ff1` is the tangential (horizontal) force one fingertip applies to the
/// sheet, positive pointing inward, i.e. compressing the sheet. `ff2` is the
/// horizontal force the base applies to one half of the sheet, with the same
/// sign convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForceState {
    pub n1: f64,
    pub ff1: f64,
    pub n2: f64,
    pub ff2: f64,
    pub alpha_deg: f64,
    pub w_mm: f64,
    pub closure_mm: f64,
}

impl ForceState {
    /// Horizontal force the object presses into the base sensor.
    pub fn base_fy(&self) -> f64 {
        -self.ff2
    }

    pub fn within_friction_cones(&self, contact: &ContactParams) -> bool {
        self.n1 >= 0.0
            && self.n2 >= 0.0
            && self.ff1.abs() <= contact.mu_tip * self.n1 + FRICTION_TOL
            && self.ff2.abs() <= contact.mu_surface * self.n2 + FRICTION_TOL
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureMode {
    None,
    TipSlip,
    NoBuckle,
    HoldFailure,
}

impl FailureMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FailureMode::None => "none",
            FailureMode::TipSlip => "tip_slip",
            FailureMode::NoBuckle => "no_buckle",
            FailureMode::HoldFailure => "hold_failure",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub success: bool,
    pub failure_mode: FailureMode,
    pub closure_used_mm: f64,
    pub force_trace: Vec<ForceState>,
    pub springback_contribution_mm: f64,
    pub alpha_settled_deg: f64,
    pub alpha_final_deg: f64,
}

impl TrialOutcome {
    /// Recorded fingertip tangential force with the largest magnitude.
    pub fn peak_tip_tangential(&self) -> f64 {
        self.force_trace
            .iter()
            .map(|s| s.ff1)
            .fold(0.0, |acc, v| if v.abs() > acc.abs() { v } else { acc })
    }
}

/// Numerical and calibration constants of the engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EngineConfig {
    /// Closure increment.
    pub increment_mm: f64,
    /// Sheet counts as lifted once its rise reaches this many thicknesses.
    pub lift_thickness_factor: f64,
    /// Base contact unloads linearly from this many thicknesses of rise up
    /// to the lift threshold.
    pub unload_start_thickness_factor: f64,
    /// Load steps of the press ramp.
    pub press_steps: u32,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            increment_mm: 0.1,
            lift_thickness_factor: 58.0,
            unload_start_thickness_factor: 10.0,
            press_steps: 50,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<(), EngineError> {
        if !(self.increment_mm > 0.0 && self.increment_mm.is_finite()) {
            return Err(EngineError::InvalidConfig(format!("increment_mm = {}", self.increment_mm)));
        }
        if !(self.unload_start_thickness_factor >= 0.0
            && self.lift_thickness_factor > self.unload_start_thickness_factor)
        {
            return Err(EngineError::InvalidConfig(
                "lift_thickness_factor must exceed unload_start_thickness_factor".into(),
            ));
        }
        if self.press_steps == 0 {
            return Err(EngineError::InvalidConfig("press_steps must be at least 1".into()));
        }
        Ok(())
    }
}

/// Post-lift retention: both pads together must carry the weight.
pub fn hold_check(w_mm: f64, n_grip_n: f64, sheet: &SheetSpec, contact: &ContactParams) -> bool {
    debug_assert!(w_mm >= 0.0 && n_grip_n >= 0.0);
    2.0 * contact.mu_tip * n_grip_n >= sheet.weight_n()
}

/// Settled state after the press, plus the press-ramp trace.
#[derive(Debug, Clone, PartialEq)]
pub struct PressResult {
    pub state: ForceState,
    pub trace: Vec<ForceState>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Engine {
    pub geom: FingertipGeometry,
    pub joint: JointStiffnessModel,
    pub config: EngineConfig,
}

impl Engine {
    pub fn new(geom: FingertipGeometry, joint: JointStiffnessModel, config: EngineConfig) -> Result<Self, EngineError> {
        geom.validate()?;
        joint.validate()?;
        config.validate()?;
        Ok(Self { geom, joint, config })
    }

    pub fn with_defaults() -> Self {
        Self::new(
            FingertipGeometry::default(),
            JointStiffnessModel::default(),
            EngineConfig::default(),
        )
        .expect("default engine is valid")
    }

    fn sin_cos(&self, alpha_deg: f64) -> (f64, f64) {
        (self.geom.beta_deg + alpha_deg).to_radians().sin_cos()
    }

    /// Ring torque minus the moment of a tip load `n` whose friction opposes
    /// the fold. Negative means the tip folds further.
    fn press_margin(&self, alpha: f64, p: f64, n: f64, mu: f64) -> f64 {
        let (s, c) = self.sin_cos(alpha);
        self.joint.ring_torque(alpha, p) - n * self.geom.d1_mm * (s - mu * c)
    }

    /// Step 1: ramp the preload and let the fingertip fold back by moment
    /// balance. Rigid fingers stay at `alpha0`.
    pub fn press_phase(&self, sc: &GraspScenario, contact: &ContactParams) -> Result<PressResult, EngineError> {
        sc.validate(&self.geom)?;
        contact.validate()?;
        let sheet = sc.sheet_spec().ok_or(EngineError::NotASheet)?;
        let mg = sheet.weight_n();
        let n1_full = sc.press_force_n;
        let w0 = sheet.initial_deflection_mm;
        let steps = self.config.press_steps;
        let mut trace = Vec::with_capacity(steps as usize);

        let mut alpha = sc.alpha0_deg;
        let amax = self.geom.alpha_max_deg;
        let p = sc.pressure_kpa;
        let mu = contact.mu_tip;
        let d1 = self.geom.d1_mm;
        for k in 1..=steps {
            let n = n1_full * k as f64 / steps as f64;
            let mut ff1 = 0.0;
            match sc.mode {
                Mode::Rigid => {
                    // the locked joint carries the moment
                }
                Mode::Hybrid => {
                    if self.press_margin(alpha, p, n, mu) < 0.0 {
                        let before = alpha;
                        if self.press_margin(amax, p, n, mu) < 0.0 {
                            alpha = amax;
                        } else {
                            alpha = bisect(|a| self.press_margin(a, p, n, mu), alpha, amax, 1e-12, 0.0)
                                .map_err(|_| EngineError::RootFinding("press balance"))?;
                        }
                        if alpha > before {
                            // the pad skids outward while folding
                            ff1 = -mu * n;
                        }
                    } else {
                        let (s, c) = self.sin_cos(alpha);
                        let lever = d1 * c;
                        if lever.abs() > 1e-12 {
                            let need = (self.joint.ring_torque(alpha, p) - n * d1 * s) / lever;
                            ff1 = need.clamp(-mu * n, mu * n);
                        }
                    }
                }
            }
            trace.push(ForceState {
                n1: n,
                ff1,
                n2: mg + 2.0 * n,
                ff2: 0.0,
                alpha_deg: alpha,
                w_mm: w0,
                closure_mm: 0.0,
            });
        }
        let state = *trace.last().expect("press_steps >= 1");
        Ok(PressResult { state, trace })
    }

    /// Tangential load one pad can push into the sheet before slipping. For
    /// the hybrid finger this is also capped by the torque reserve of the
    /// ring at the settled angle; a finger that folded past `alpha0` has none.
    fn tip_capacity(&self, sc: &GraspScenario, contact: &ContactParams, alpha_s: f64, n1: f64) -> f64 {
        let friction = contact.mu_tip * n1;
        match sc.mode {
            Mode::Rigid => friction,
            Mode::Hybrid => {
                if alpha_s > sc.alpha0_deg {
                    return 0.0;
                }
                let (s, c) = self.sin_cos(alpha_s);
                let num = self.joint.ring_torque(alpha_s, sc.pressure_kpa) - n1 * self.geom.d1_mm * s;
                let reserve = if num <= 0.0 {
                    0.0
                } else if c <= 1e-12 {
                    f64::INFINITY
                } else {
                    num / (self.geom.d1_mm * c)
                };
                friction.min(reserve)
            }
        }
    }

    /// Angle where the ring torque balances an inward tip load `f_t`,
    /// searched on `[0, alpha]`. The tip only rotates forward.
    fn springback_angle(&self, alpha: f64, p: f64, f_t: f64) -> Result<f64, EngineError> {
        let d1 = self.geom.d1_mm;
        let g = |a: f64| self.joint.ring_torque(a, p) - f_t * d1 * self.sin_cos(a).1;
        if g(alpha) <= 0.0 {
            return Ok(alpha);
        }
        bisect(g, 0.0, alpha, 1e-12, 0.0).map_err(|_| EngineError::RootFinding("spring-back balance"))
    }

    /// Step 2: close the fingers in increments, buckle the sheet and lift it.
    pub fn close_phase(
        &self,
        settled: &ForceState,
        sc: &GraspScenario,
        contact: &ContactParams,
    ) -> Result<TrialOutcome, EngineError> {
        sc.validate(&self.geom)?;
        contact.validate()?;
        let sheet = sc.sheet_spec().ok_or(EngineError::NotASheet)?;
        let t = sheet.thickness_mm;
        let delta0 = sheet.initial_deflection_mm;
        let w_lift = self.config.lift_thickness_factor * t;
        let w_unload = self.config.unload_start_thickness_factor * t;
        let p = sc.pressure_kpa;
        let n1 = settled.n1;
        let alpha_s = settled.alpha_deg;

        let d0 = sc.d_f0_mm + 2.0 * self.geom.extension_unchecked(alpha_s);
        let p_buckle = sheet.critical_buckling_load(d0)? * sheet.knockdown();
        let n2_0 = settled.n2;
        // each pad drags its half of the sheet across the base
        let drag0 = contact.mu_surface * n2_0 / 2.0;
        let required = p_buckle + drag0;
        let capacity = self.tip_capacity(sc, contact, alpha_s, n1);

        let dx = self.config.increment_mm;
        let close_by = sc.close_by_mm;
        let n_steps = (close_by / dx - 1e-9).ceil().max(0.0) as usize;
        let mut trace = Vec::with_capacity(n_steps);
        let outcome = |success, mode, closure, trace, alpha_final: f64| TrialOutcome {
            success,
            failure_mode: mode,
            closure_used_mm: closure,
            force_trace: trace,
            springback_contribution_mm: match sc.mode {
                Mode::Hybrid => {
                    2.0 * (self.geom.extension_unchecked(alpha_s) - self.geom.extension_unchecked(alpha_final))
                }
                Mode::Rigid => 0.0,
            },
            alpha_settled_deg: alpha_s,
            alpha_final_deg: alpha_final,
        };

        if capacity < required {
            // the pads slide over the sheet; it never buckles
            let q = capacity.min(p_buckle);
            for i in 1..=n_steps {
                trace.push(ForceState {
                    n1,
                    ff1: capacity,
                    n2: n2_0,
                    ff2: -(capacity - q),
                    alpha_deg: alpha_s,
                    w_mm: delta0,
                    closure_mm: (i as f64 * dx).min(close_by),
                });
            }
            return Ok(outcome(false, FailureMode::TipSlip, close_by, trace, alpha_s));
        }

        let span_cap = d0 * (1.0 - 1e-9);
        let mut alpha = alpha_s;
        let mut w = delta0;
        let mut x = 0.0;
        for i in 1..=n_steps {
            x = (i as f64 * dx).min(close_by);
            let lam = ((w_lift - w) / (w_lift - w_unload)).clamp(0.0, 1.0);
            let f_t = p_buckle + drag0 * lam;
            if sc.mode == Mode::Hybrid {
                alpha = self.springback_angle(alpha, p, f_t)?;
            }
            let sb = match sc.mode {
                Mode::Hybrid => 2.0 * (self.geom.extension_unchecked(alpha_s) - self.geom.extension_unchecked(alpha)),
                Mode::Rigid => 0.0,
            };
            let c = (x + sb).clamp(0.0, span_cap);
            w = buckle_amplitude(d0, c)?.max(delta0);
            trace.push(ForceState {
                n1,
                ff1: f_t,
                n2: n2_0 * lam,
                ff2: -drag0 * lam,
                alpha_deg: alpha,
                w_mm: w,
                closure_mm: x,
            });
            if w >= w_lift {
                let ok = hold_check(w, f_t, sheet, contact);
                let mode = if ok { FailureMode::None } else { FailureMode::HoldFailure };
                return Ok(outcome(ok, mode, x, trace, alpha));
            }
        }
        Ok(outcome(false, FailureMode::NoBuckle, x.max(0.0), trace, alpha))
    }

    /// Press, close and hold, composed.
    pub fn run_trial(&self, sc: &GraspScenario, contact: &ContactParams) -> Result<TrialOutcome, EngineError> {
        if let Workpiece::Object(obj) = &sc.workpiece {
            return self.grasp_rigid_object(obj, sc.pressure_kpa, contact);
        }
        let press = self.press_phase(sc, contact)?;
        let mut out = self.close_phase(&press.state, sc, contact)?;
        let mut trace = press.trace;
        trace.append(&mut out.force_trace);
        out.force_trace = trace;
        Ok(out)
    }

    /// Smallest closure on the increment grid that succeeds, searched up to
    /// the settled contact span (the sheet cannot be shortened further).
    pub fn min_closure_for_success(&self, sc: &GraspScenario, contact: &ContactParams) -> Result<f64, EngineError> {
        let press = self.press_phase(sc, contact)?;
        let d0 = sc.d_f0_mm + 2.0 * self.geom.extension_unchecked(press.state.alpha_deg);
        let dx = self.config.increment_mm;
        let upper = (d0 / dx).floor() * dx;
        // A trial stops at the first increment that lifts the sheet, so one
        // run at the upper bound finds the smallest successful grid closure.
        let out = self.close_phase(&press.state, &sc.with_close_by(upper), contact)?;
        if out.success {
            Ok(out.closure_used_mm)
        } else {
            Err(EngineError::Infeasible { upper_mm: upper })
        }
    }

    /// Per-pad squeeze when the ring wedges the pad against a rigid object.
    pub fn object_squeeze(&self, obj: &RigidObjectSpec, pressure_kpa: f64) -> f64 {
        let a = obj.contact_angle_deg;
        self.joint.ring_torque(a, pressure_kpa) / self.geom.horizontal_lever(a)
    }

    /// Rigid objects: success iff the derated friction of both pads carries
    /// the weight.
    pub fn grasp_rigid_object(
        &self,
        obj: &RigidObjectSpec,
        pressure_kpa: f64,
        contact: &ContactParams,
    ) -> Result<TrialOutcome, EngineError> {
        obj.validate(&self.geom)?;
        contact.validate()?;
        if !(pressure_kpa.is_finite() && pressure_kpa >= 0.0) {
            return Err(EngineError::InvalidScenario(format!(
                "pressure_kpa = {pressure_kpa} must be non-negative"
            )));
        }
        let n_grip = self.object_squeeze(obj, pressure_kpa);
        let mu = obj.contact_mu_override.unwrap_or(contact.mu_tip);
        let usable = mu * obj.edge_factor;
        let weight = obj.weight_n();
        let success = 2.0 * usable * n_grip >= weight;
        let state = ForceState {
            n1: n_grip,
            ff1: (weight / 2.0).min(mu * n_grip),
            n2: 0.0,
            ff2: 0.0,
            alpha_deg: obj.contact_angle_deg,
            w_mm: 0.0,
            closure_mm: 0.0,
        };
        Ok(TrialOutcome {
            success,
            failure_mode: if success { FailureMode::None } else { FailureMode::HoldFailure },
            closure_used_mm: 0.0,
            force_trace: vec![state],
            springback_contribution_mm: 0.0,
            alpha_settled_deg: obj.contact_angle_deg,
            alpha_final_deg: obj.contact_angle_deg,
        })
    }
}

/// One of the three hybrid-versus-rigid test conditions, stated as bend
/// angle, contact span and preload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestCondition {
    pub key: String,
    pub alpha_deg: f64,
    pub span_mm: f64,
    pub press_force_n: f64,
}

impl TestCondition {
    pub fn new(key: &str, alpha_deg: f64, span_mm: f64, press_force_n: f64) -> Self {
        Self {
            key: key.to_string(),
            alpha_deg,
            span_mm,
            press_force_n,
        }
    }

    /// Finger separation back-solved from the stated contact span.
    pub fn finger_separation(&self, geom: &FingertipGeometry) -> Result<f64, EngineError> {
        Ok(geom.separation_for_span(self.span_mm, self.alpha_deg)?)
    }

    pub fn scenario(
        &self,
        geom: &FingertipGeometry,
        mode: Mode,
        pressure_kpa: f64,
        close_by_mm: f64,
        sheet: SheetSpec,
    ) -> Result<GraspScenario, EngineError> {
        Ok(GraspScenario::sheet(
            mode,
            self.alpha_deg,
            pressure_kpa,
            self.finger_separation(geom)?,
            close_by_mm,
            self.press_force_n,
            sheet,
        ))
    }
}

pub fn default_conditions() -> Vec<TestCondition> {
    vec![
        TestCondition::new("c1", 35.0, 60.0, 6.0),
        TestCondition::new("c2", 45.0, 65.0, 9.0),
        TestCondition::new("c3", 65.0, 70.0, 14.0),
    ]
}
