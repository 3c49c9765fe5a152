//! Monte Carlo success rates over uncertain friction, sheet imperfection and
//! preload.
//!
//! Trial `i` of every cell draws from its own ChaCha stream `(seed, i)`, so
//! cells that differ only in a monotone input (pressure, closure) see the same
//! draws and their rates are ordered pointwise. Trials run in parallel and are
//! reduced by index.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{
    default_conditions, ContactParams, Engine, EngineError, GraspScenario, Mode, RigidObjectSpec, TestCondition,
};
use crate::sheet::SheetSpec;

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959963984540054;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CampaignError {
    #[error("invalid stochastic parameters: {0}")]
    InvalidParams(String),
    #[error("invalid campaign: {0}")]
    InvalidCampaign(String),
    #[error("cell `{cell}`, trial {trial}: {source}")]
    Trial {
        cell: String,
        trial: u64,
        #[source]
        source: EngineError,
    },
    #[error("cell `{cell}`: {source}")]
    Nominal {
        cell: String,
        #[source]
        source: EngineError,
    },
}

/// Uniform ranges of the per-trial uncertain inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StochasticParams {
    pub mu_tip_range: (f64, f64),
    pub mu_surface_range: (f64, f64),
    pub initial_deflection_range_mm: (f64, f64),
    /// Relative half-width of the uniform preload scatter.
    pub press_force_jitter: f64,
    pub seed: u64,
}

impl Default for StochasticParams {
    fn default() -> Self {
        Self {
            mu_tip_range: (0.4, 0.9),
            mu_surface_range: (0.1, 0.3),
            initial_deflection_range_mm: (0.1, 1.0),
            press_force_jitter: 0.1,
            seed: 42,
        }
    }
}

impl StochasticParams {
    pub fn validate(&self) -> Result<(), CampaignError> {
        let bad = |m: String| Err(CampaignError::InvalidParams(m));
        for (name, (lo, hi), max) in [
            ("mu_tip_range", self.mu_tip_range, 2.0),
            ("mu_surface_range", self.mu_surface_range, 2.0),
            ("initial_deflection_range_mm", self.initial_deflection_range_mm, f64::MAX),
        ] {
            if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi && hi <= max) {
                return bad(format!("{name} = ({lo}, {hi}) must satisfy 0 <= lo <= hi <= {max}"));
            }
        }
        if !(0.0..1.0).contains(&self.press_force_jitter) {
            return bad(format!("press_force_jitter = {} outside [0, 1)", self.press_force_jitter));
        }
        Ok(())
    }

    /// Midpoint parameters with no preload scatter.
    pub fn nominal(&self) -> TrialDraw {
        let mid = |(lo, hi): (f64, f64)| 0.5 * (lo + hi);
        TrialDraw {
            contact: ContactParams::new(mid(self.mu_tip_range), mid(self.mu_surface_range)),
            initial_deflection_mm: mid(self.initial_deflection_range_mm),
            press_force_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialDraw {
    pub contact: ContactParams,
    pub initial_deflection_mm: f64,
    pub press_force_scale: f64,
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    let u: f64 = rng.gen();
    lo + (hi - lo) * u
}

/// Draw of trial `trial_index`; a pure function of `(seed, trial_index)`.
pub fn sample_params(stoch: &StochasticParams, trial_index: u64) -> TrialDraw {
    let mut rng = ChaCha8Rng::seed_from_u64(stoch.seed);
    rng.set_stream(trial_index);
    let mu_tip = uniform(&mut rng, stoch.mu_tip_range);
    let mu_surface = uniform(&mut rng, stoch.mu_surface_range);
    let delta0 = uniform(&mut rng, stoch.initial_deflection_range_mm);
    let j = stoch.press_force_jitter;
    let scale = 1.0 + uniform(&mut rng, (-j, j));
    TrialDraw {
        contact: ContactParams::new(mu_tip, mu_surface),
        initial_deflection_mm: delta0,
        press_force_scale: scale,
    }
}

/// Wilson score interval for `k` successes in `n` trials, clamped to [0, 1].
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    assert!(n > 0 && k <= n, "wilson_interval needs 0 <= k <= n, n > 0");
    let (kf, nf) = (k as f64, n as f64);
    let z2 = z * z;
    let denom = nf + z2;
    let center = (kf + z2 / 2.0) / denom;
    let half = z / denom * (kf * (nf - kf) / nf + z2 / 4.0).sqrt();
    let rate = kf / nf;
    let mut lo = (center - half).clamp(0.0, 1.0);
    let mut hi = (center + half).clamp(0.0, 1.0);
    if k == 0 {
        lo = 0.0;
    }
    if k == n {
        hi = 1.0;
    }
    (lo.min(rate), hi.max(rate))
}

/// Aggregated result of one scenario cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub key: String,
    pub n: u64,
    pub k: u64,
    pub rate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl CellReport {
    pub fn from_counts(key: impl Into<String>, n: u64, k: u64) -> Self {
        let (ci_lo, ci_hi) = wilson_interval(k, n, Z_95);
        Self {
            key: key.into(),
            n,
            k,
            rate: k as f64 / n as f64,
            ci_lo,
            ci_hi,
        }
    }

    /// Aggregate `(trial_index, success)` pairs arriving in any order.
    pub fn from_indexed<I>(key: impl Into<String>, outcomes: I) -> Self
    where
        I: IntoIterator<Item = (u64, bool)>,
    {
        let mut v: Vec<(u64, bool)> = outcomes.into_iter().collect();
        v.sort_unstable_by_key(|&(i, _)| i);
        let k = v.iter().filter(|&&(_, s)| s).count() as u64;
        Self::from_counts(key, v.len() as u64, k)
    }
}

/// Smallest successful closure per mode on nominal parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinClosureRow {
    pub condition: String,
    pub finger_separation_mm: f64,
    pub hybrid_mm: Option<f64>,
    pub rigid_mm: Option<f64>,
    /// Rigid over hybrid closure.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuccessRateReport {
    pub campaign_id: String,
    pub seed: u64,
    pub config_sha256: String,
    pub n_trials: u64,
    pub cells: Vec<CellReport>,
    pub assumptions: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub min_closures: Vec<MinClosureRow>,
}

impl SuccessRateReport {
    pub fn cell(&self, key: &str) -> Option<&CellReport> {
        self.cells.iter().find(|c| c.key == key)
    }

    pub fn rate(&self, key: &str) -> Option<f64> {
        self.cell(key).map(|c| c.rate)
    }
}

/// Disclosures attached to every report.
pub fn base_assumptions(stoch: &StochasticParams) -> Vec<String> {
    vec![
        "ring torque model tau = (k0 + k1 p) alpha_rad".into(),
        "sheet: pinned-pinned Euler buckling with knockdown max(0, 1 - 0.1 delta0/t)".into(),
        format!(
            "stochastic hypothesis: mu_tip ~ U{:?}, mu_surface ~ U{:?}, delta0_mm ~ U{:?}, preload scatter +/-{}",
            stoch.mu_tip_range, stoch.mu_surface_range, stoch.initial_deflection_range_mm, stoch.press_force_jitter
        ),
        "friction coefficients and sheet imperfection are unmeasured defaults".into(),
    ]
}

fn sheet_assumption(engine: &Engine, sheet: &SheetSpec) -> String {
    format!(
        "sheet {} mm thick (thicker than office paper, used as given); lifted at a rise of {} thicknesses",
        sheet.thickness_mm, engine.config.lift_thickness_factor
    )
}

fn run_cell<F>(key: &str, stoch: &StochasticParams, n_trials: u64, trial: F) -> Result<CellReport, CampaignError>
where
    F: Fn(&TrialDraw) -> Result<bool, EngineError> + Sync,
{
    let outcomes = (0..n_trials)
        .into_par_iter()
        .map(|i| {
            let draw = sample_params(stoch, i);
            trial(&draw)
                .map(|s| (i, s))
                .map_err(|source| CampaignError::Trial {
                    cell: key.to_string(),
                    trial: i,
                    source,
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CellReport::from_indexed(key, outcomes))
}

fn check_trials(n_trials: u64) -> Result<(), CampaignError> {
    if n_trials == 0 {
        return Err(CampaignError::InvalidCampaign("n_trials must be at least 1".into()));
    }
    Ok(())
}

/// Apply a draw to a sheet scenario.
pub fn perturb(sc: &GraspScenario, draw: &TrialDraw) -> GraspScenario {
    let mut out = sc.clone();
    out.press_force_n = sc.press_force_n * draw.press_force_scale;
    if let crate::engine::Workpiece::Sheet(s) = &sc.workpiece {
        out.workpiece = crate::engine::Workpiece::Sheet(s.with_initial_deflection(draw.initial_deflection_mm));
    }
    out
}

/// Success rate of one scenario under the stochastic parameters.
pub fn success_rate(
    engine: &Engine,
    key: &str,
    scenario: &GraspScenario,
    stoch: &StochasticParams,
    n_trials: u64,
) -> Result<CellReport, CampaignError> {
    stoch.validate()?;
    check_trials(n_trials)?;
    run_cell(key, stoch, n_trials, |d| {
        Ok(engine.run_trial(&perturb(scenario, d), &d.contact)?.success)
    })
}

fn num(v: f64) -> String {
    format!("{v}")
}

pub fn sweep_key(alpha_deg: f64, pressure_kpa: f64) -> String {
    format!("alpha={}deg;p={}kPa", num(alpha_deg), num(pressure_kpa))
}

pub fn object_key(name: &str, pressure_kpa: f64) -> String {
    format!("object={name};p={}kPa", num(pressure_kpa))
}

pub fn compare_key(mode: Mode, condition: &str, closure_mm: f64) -> String {
    format!("mode={mode};cond={condition};close={}mm", num(closure_mm))
}

/// Pressure-by-angle sheet grasping sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepCampaign {
    pub alphas_deg: Vec<f64>,
    pub pressures_kpa: Vec<f64>,
    pub finger_separation_mm: f64,
    pub close_by_mm: f64,
    pub press_force_n: f64,
}

pub fn pressure_grid(max_kpa: u32, step_kpa: u32) -> Vec<f64> {
    (0..=max_kpa / step_kpa).map(|i| (i * step_kpa) as f64).collect()
}

impl Default for SweepCampaign {
    fn default() -> Self {
        Self {
            alphas_deg: vec![35.0, 45.0, 65.0],
            pressures_kpa: pressure_grid(150, 10),
            finger_separation_mm: 30.0,
            close_by_mm: 5.0,
            press_force_n: 9.0,
        }
    }
}

fn nonempty(name: &str, v: &[f64]) -> Result<(), CampaignError> {
    if v.is_empty() {
        Err(CampaignError::InvalidCampaign(format!("{name} is empty")))
    } else {
        Ok(())
    }
}

pub fn sweep_paper_campaign(
    engine: &Engine,
    campaign: &SweepCampaign,
    sheet: &SheetSpec,
    stoch: &StochasticParams,
    n_trials: u64,
) -> Result<SuccessRateReport, CampaignError> {
    stoch.validate()?;
    check_trials(n_trials)?;
    nonempty("alphas_deg", &campaign.alphas_deg)?;
    nonempty("pressures_kpa", &campaign.pressures_kpa)?;
    let mut cells = Vec::new();
    for &a in &campaign.alphas_deg {
        for &p in &campaign.pressures_kpa {
            let sc = GraspScenario::sheet(
                Mode::Hybrid,
                a,
                p,
                campaign.finger_separation_mm,
                campaign.close_by_mm,
                campaign.press_force_n,
                sheet.clone(),
            );
            cells.push(success_rate(engine, &sweep_key(a, p), &sc, stoch, n_trials)?);
        }
    }
    let mut assumptions = base_assumptions(stoch);
    assumptions.push(sheet_assumption(engine, sheet));
    assumptions.push(format!(
        "sweep: finger separation {} mm, closure {} mm, preload {} N for every angle",
        campaign.finger_separation_mm, campaign.close_by_mm, campaign.press_force_n
    ));
    Ok(SuccessRateReport {
        campaign_id: "grasp-sweep".into(),
        seed: stoch.seed,
        config_sha256: String::new(),
        n_trials,
        cells,
        assumptions,
        min_closures: Vec::new(),
    })
}

/// The five parametric stand-ins for everyday objects.
pub fn default_objects() -> Vec<RigidObjectSpec> {
    vec![
        RigidObjectSpec::new("paper-roll", 0.12, 0.25),
        RigidObjectSpec::new("plastic-box", 0.10, 0.17),
        RigidObjectSpec::new("charger", 0.08, 0.20),
        RigidObjectSpec::new("glue-stick", 0.04, 0.04),
        RigidObjectSpec::new("pet-bottle", 0.25, 0.33),
    ]
}

pub fn objects_campaign(
    engine: &Engine,
    objects: &[RigidObjectSpec],
    pressures_kpa: &[f64],
    stoch: &StochasticParams,
    n_trials: u64,
) -> Result<SuccessRateReport, CampaignError> {
    stoch.validate()?;
    check_trials(n_trials)?;
    if objects.is_empty() {
        return Err(CampaignError::InvalidCampaign("object list is empty".into()));
    }
    nonempty("pressures_kpa", pressures_kpa)?;
    let mut cells = Vec::new();
    for obj in objects {
        for &p in pressures_kpa {
            let key = object_key(&obj.name, p);
            cells.push(run_cell(&key, stoch, n_trials, |d| {
                Ok(engine.grasp_rigid_object(obj, p, &d.contact)?.success)
            })?);
        }
    }
    let mut assumptions = base_assumptions(stoch);
    assumptions.push(format!(
        "objects are parametric (mass, edge factor); pads wedge at {} deg unless overridden",
        crate::engine::DEFAULT_OBJECT_CONTACT_ANGLE_DEG
    ));
    for obj in objects {
        assumptions.push(format!(
            "object {}: mass {} kg, edge factor {}, contact angle {} deg",
            obj.name, obj.mass_kg, obj.edge_factor, obj.contact_angle_deg
        ));
    }
    Ok(SuccessRateReport {
        campaign_id: "objects".into(),
        seed: stoch.seed,
        config_sha256: String::new(),
        n_trials,
        cells,
        assumptions,
        min_closures: Vec::new(),
    })
}

/// Hybrid-versus-rigid closure sweep over the test conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareCampaign {
    pub conditions: Vec<TestCondition>,
    pub closures_mm: Vec<f64>,
    pub pressure_kpa: f64,
}

impl Default for CompareCampaign {
    fn default() -> Self {
        Self {
            conditions: default_conditions(),
            closures_mm: (0..=10).map(|i| 5.0 * i as f64).collect(),
            pressure_kpa: 100.0,
        }
    }
}

pub fn rigid_vs_hybrid_campaign(
    engine: &Engine,
    campaign: &CompareCampaign,
    sheet: &SheetSpec,
    stoch: &StochasticParams,
    n_trials: u64,
) -> Result<SuccessRateReport, CampaignError> {
    stoch.validate()?;
    check_trials(n_trials)?;
    nonempty("closures_mm", &campaign.closures_mm)?;
    if campaign.conditions.is_empty() {
        return Err(CampaignError::InvalidCampaign("condition list is empty".into()));
    }
    let nominal = stoch.nominal();
    let mut cells = Vec::new();
    let mut rows = Vec::new();
    for cond in &campaign.conditions {
        let nominal_err = |source| CampaignError::Nominal {
            cell: cond.key.clone(),
            source,
        };
        let d_f = cond.finger_separation(&engine.geom).map_err(nominal_err)?;
        let mut min = [None, None];
        for (slot, mode) in [Mode::Hybrid, Mode::Rigid].into_iter().enumerate() {
            let base = cond
                .scenario(&engine.geom, mode, campaign.pressure_kpa, 0.0, sheet.clone())
                .map_err(nominal_err)?;
            for &c in &campaign.closures_mm {
                let sc = base.with_close_by(c);
                cells.push(success_rate(engine, &compare_key(mode, &cond.key, c), &sc, stoch, n_trials)?);
            }
            min[slot] = match engine.min_closure_for_success(&perturb(&base, &nominal), &nominal.contact) {
                Ok(v) => Some(v),
                Err(EngineError::Infeasible { .. }) => None,
                Err(e) => return Err(nominal_err(e)),
            };
        }
        let ratio = match (min[0], min[1]) {
            (Some(h), Some(r)) if h > 0.0 => Some(r / h),
            _ => None,
        };
        rows.push(MinClosureRow {
            condition: cond.key.clone(),
            finger_separation_mm: d_f,
            hybrid_mm: min[0],
            rigid_mm: min[1],
            ratio,
        });
    }
    let mut assumptions = base_assumptions(stoch);
    assumptions.push(sheet_assumption(engine, sheet));
    assumptions.push(format!(
        "ring pressure {} kPa; finger separation back-solved from each condition's contact span",
        campaign.pressure_kpa
    ));
    assumptions.push("rigid finger is locked at the condition's bend angle".into());
    assumptions.push("minimum closures use range midpoints without preload scatter".into());
    Ok(SuccessRateReport {
        campaign_id: "compare-rigid".into(),
        seed: stoch.seed,
        config_sha256: String::new(),
        n_trials,
        cells,
        assumptions,
        min_closures: rows,
    })
}
