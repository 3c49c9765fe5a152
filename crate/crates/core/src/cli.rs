//! Command-line front end. Each subcommand writes its artifacts to the output
//! directory and returns a process exit code.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use crate::config::{ConfigError, Resolved, RunConfig};
use crate::engine::{EngineError, Mode};
use crate::joint::{
    fit_model, ingest_calibration_log, protocol_alphas_deg, protocol_pressures_kpa, read_calibration_csv,
};
use crate::montecarlo::{
    compare_key, object_key, objects_campaign, rigid_vs_hybrid_campaign, sweep_key, sweep_paper_campaign,
    CampaignError, CompareCampaign, SuccessRateReport,
};
use crate::plot::{LinePlot, Series};
use crate::report::{csv_with_provenance, fmt_f64, min_closure_csv, report_csv, to_canonical_json, write_artifact};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "softgrip", version, about = "Quasi-static hybrid gripper grasp simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `out_dir`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// RNG seed (overrides `seed`).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Trials per cell (overrides `n_trials`).
    #[arg(long)]
    pub trials: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reduce a force-sensor calibration log to a torque grid and fit the ring model.
    Calibrate {
        /// CSV with header `alpha_deg,pressure_kpa,fy_n,fz_n`.
        log: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Tabulate ring torque over the characterization grid.
    TorqueMap(RunArgs),
    /// Sheet grasp success rate over bend angle and pressure.
    GraspSweep(RunArgs),
    /// Hybrid versus rigid success rate over closing distance.
    CompareRigid(RunArgs),
    /// Rigid-object grasp success rate over pressure.
    Objects(RunArgs),
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(m: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: m.into(),
        }
    }

    fn internal(m: impl Into<String>) -> Self {
        Self {
            code: EXIT_INTERNAL,
            message: m.into(),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::input(e.to_string())
    }
}

fn engine_code(e: &EngineError) -> i32 {
    match e {
        EngineError::Infeasible { .. } => EXIT_INFEASIBLE,
        EngineError::RootFinding(_) => EXIT_INTERNAL,
        _ => EXIT_INPUT,
    }
}

impl From<CampaignError> for CliError {
    fn from(e: CampaignError) -> Self {
        let code = match &e {
            CampaignError::InvalidParams(_) | CampaignError::InvalidCampaign(_) => EXIT_INPUT,
            CampaignError::Trial { source, .. } | CampaignError::Nominal { source, .. } => engine_code(source),
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::input(format!("cannot write {}: {e}", path.display()))
}

fn load(args: &RunArgs) -> Result<Resolved, CliError> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(n) = args.trials {
        cfg.n_trials = n;
    }
    if let Some(o) = &args.out {
        cfg.out_dir = o.clone();
    }
    Ok(cfg.resolve()?)
}

struct Writer<'a> {
    dir: &'a Path,
    written: Vec<PathBuf>,
}

impl<'a> Writer<'a> {
    fn new(dir: &'a Path) -> Self {
        Self {
            dir,
            written: Vec::new(),
        }
    }

    fn put(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let p = write_artifact(self.dir, name, contents).map_err(io_err(&self.dir.join(name)))?;
        self.written.push(p);
        Ok(())
    }

    fn finish(self) {
        for p in self.written {
            println!("wrote {}", p.display());
        }
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::internal(format!("csv emission failed: {e}"))
}

fn json<T: serde::Serialize>(v: &T) -> Result<String, CliError> {
    to_canonical_json(v).map_err(|e| CliError::internal(format!("json emission failed: {e}")))
}

fn caption(r: &Resolved) -> String {
    format!("config_sha256={} seed={}", r.config_sha256, r.config.seed)
}

/// Every cell must satisfy 0 <= rate <= 1, k <= n and ci_lo <= rate <= ci_hi.
fn check_report(report: &SuccessRateReport) -> Result<(), CliError> {
    for c in &report.cells {
        let ok = c.k <= c.n
            && (0.0..=1.0).contains(&c.rate)
            && c.ci_lo <= c.rate
            && c.rate <= c.ci_hi
            && c.ci_lo >= 0.0
            && c.ci_hi <= 1.0;
        if !ok {
            return Err(CliError::internal(format!("report invariant violated in cell `{}`", c.key)));
        }
    }
    Ok(())
}

fn stamp(mut report: SuccessRateReport, r: &Resolved) -> Result<SuccessRateReport, CliError> {
    report.config_sha256 = r.config_sha256.clone();
    check_report(&report)?;
    Ok(report)
}

pub fn run(cli: Cli) -> i32 {
    let res = match cli.command {
        Command::Calibrate { log, run } => cmd_calibrate(&log, &run),
        Command::TorqueMap(a) => cmd_torque_map(&a),
        Command::GraspSweep(a) => cmd_grasp_sweep(&a),
        Command::CompareRigid(a) => cmd_compare_rigid(&a),
        Command::Objects(a) => cmd_objects(&a),
    };
    match res {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

pub fn cmd_calibrate(log: &Path, args: &RunArgs) -> Result<(), CliError> {
    let r = load(args)?;
    let bytes = std::fs::read(log).map_err(|e| CliError::input(format!("cannot read {}: {e}", log.display())))?;
    let input_sha = hex::encode(Sha256::digest(&bytes));
    let rows =
        read_calibration_csv(bytes.as_slice()).map_err(|e| CliError::input(format!("{}: {e}", log.display())))?;
    let grid = ingest_calibration_log(&rows, r.config.geometry.a1_mm)
        .map_err(|e| CliError::input(format!("{}: {e}", log.display())))?;
    let mut model = fit_model(&grid).map_err(|e| CliError::input(format!("{}: {e}", log.display())))?;
    model.source = format!("fit of {}", log.display());

    let meta = |v: serde_json::Value| {
        serde_json::json!({
            "config_sha256": r.config_sha256,
            "input_sha256": input_sha,
            "seed": r.config.seed,
            "data": v,
        })
    };
    let grid_v = serde_json::to_value(&grid).map_err(|e| CliError::internal(e.to_string()))?;
    let model_v = serde_json::to_value(&model).map_err(|e| CliError::internal(e.to_string()))?;

    let mut rows_out = Vec::new();
    for (i, &a) in grid.alphas_deg.iter().enumerate() {
        for (j, &p) in grid.pressures_kpa.iter().enumerate() {
            let measured = grid.torques_nmm[i][j];
            let fitted = model.ring_torque(a, p);
            rows_out.push(vec![
                fmt_f64(a),
                fmt_f64(p),
                grid.trials_per_cell[i][j].to_string(),
                fmt_f64(measured),
                fmt_f64(fitted),
                fmt_f64(measured - fitted),
            ]);
        }
    }
    let mut residuals = format!("# input_sha256={input_sha}\n# residual_rmse_nmm={}\n", fmt_f64(model.residual_rmse_nmm));
    residuals.push_str(
        &csv_with_provenance(
            &r.config_sha256,
            r.config.seed,
            &["alpha_deg", "pressure_kpa", "trials", "measured_torque_nmm", "model_torque_nmm", "residual_nmm"],
            &rows_out,
        )
        .map_err(csv_err)?,
    );

    let mut w = Writer::new(&r.config.out_dir);
    w.put("calibration_grid.json", &json(&meta(grid_v))?)?;
    w.put("joint_model.json", &json(&meta(model_v))?)?;
    w.put("calibration_residuals.csv", &residuals)?;
    w.finish();
    Ok(())
}

pub fn cmd_torque_map(args: &RunArgs) -> Result<(), CliError> {
    let r = load(args)?;
    let model = &r.engine.joint;
    let alphas = protocol_alphas_deg();
    let pressures = protocol_pressures_kpa();
    let mut rows = Vec::new();
    for &a in &alphas {
        for &p in &pressures {
            rows.push(vec![fmt_f64(a), fmt_f64(p), fmt_f64(model.ring_torque(a, p))]);
        }
    }
    let csv = csv_with_provenance(
        &r.config_sha256,
        r.config.seed,
        &["alpha_deg", "pressure_kpa", "torque_nmm"],
        &rows,
    )
    .map_err(csv_err)?;
    let plot = LinePlot {
        title: "Ring resisting torque".into(),
        x_label: "bend angle (deg)".into(),
        y_label: "torque (N*mm)".into(),
        series: pressures
            .iter()
            .filter(|&&p| (p as u64).is_multiple_of(30))
            .map(|&p| Series {
                label: format!("{p} kPa"),
                points: alphas.iter().map(|&a| (a, model.ring_torque(a, p))).collect(),
            })
            .collect(),
        y_range: None,
        caption: caption(&r),
    };
    let mut w = Writer::new(&r.config.out_dir);
    w.put("torque_map.csv", &csv)?;
    w.put("torque_map.svg", &plot.to_svg())?;
    w.finish();
    Ok(())
}

pub fn cmd_grasp_sweep(args: &RunArgs) -> Result<(), CliError> {
    let r = load(args)?;
    let c = &r.config.sweep;
    let report = sweep_paper_campaign(&r.engine, c, &r.config.sheet, &r.stochastic, r.config.n_trials)?;
    let report = stamp(report, &r)?;
    let plot = LinePlot {
        title: "Sheet grasp success rate".into(),
        x_label: "pressure (kPa)".into(),
        y_label: "success rate".into(),
        series: c
            .alphas_deg
            .iter()
            .map(|&a| Series {
                label: format!("alpha {a} deg"),
                points: c
                    .pressures_kpa
                    .iter()
                    .map(|&p| (p, report.rate(&sweep_key(a, p)).unwrap_or(f64::NAN)))
                    .collect(),
            })
            .collect(),
        y_range: Some((0.0, 1.0)),
        caption: caption(&r),
    };
    let mut w = Writer::new(&r.config.out_dir);
    w.put("grasp_sweep.csv", &report_csv(&report).map_err(csv_err)?)?;
    w.put("grasp_sweep.json", &json(&report)?)?;
    w.put("grasp_sweep.svg", &plot.to_svg())?;
    w.finish();
    Ok(())
}

pub fn cmd_compare_rigid(args: &RunArgs) -> Result<(), CliError> {
    let r = load(args)?;
    let campaign = CompareCampaign {
        conditions: r.conditions.clone(),
        closures_mm: r.config.compare.closures_mm.clone(),
        pressure_kpa: r.config.compare.pressure_kpa,
    };
    let report = rigid_vs_hybrid_campaign(&r.engine, &campaign, &r.config.sheet, &r.stochastic, r.config.n_trials)?;
    let report = stamp(report, &r)?;
    let max_ratio = report
        .min_closures
        .iter()
        .filter_map(|m| m.ratio)
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))));

    let mut value = serde_json::to_value(&report).map_err(|e| CliError::internal(e.to_string()))?;
    if let serde_json::Value::Object(m) = &mut value {
        m.insert("max_min_closure_ratio".into(), serde_json::to_value(max_ratio).unwrap_or_default());
    }
    let mut series = Vec::new();
    for cond in &campaign.conditions {
        for mode in [Mode::Hybrid, Mode::Rigid] {
            series.push(Series {
                label: format!("{mode} {}", cond.key),
                points: campaign
                    .closures_mm
                    .iter()
                    .map(|&c| (c, report.rate(&compare_key(mode, &cond.key, c)).unwrap_or(f64::NAN)))
                    .collect(),
            });
        }
    }
    let plot = LinePlot {
        title: "Success rate versus closing distance".into(),
        x_label: "closing distance (mm)".into(),
        y_label: "success rate".into(),
        series,
        y_range: Some((0.0, 1.0)),
        caption: caption(&r),
    };
    let mut w = Writer::new(&r.config.out_dir);
    w.put("compare_rigid.csv", &report_csv(&report).map_err(csv_err)?)?;
    w.put("compare_rigid_min_closure.csv", &min_closure_csv(&report).map_err(csv_err)?)?;
    w.put("compare_rigid.json", &json(&value)?)?;
    w.put("compare_rigid.svg", &plot.to_svg())?;
    w.finish();
    Ok(())
}

pub fn cmd_objects(args: &RunArgs) -> Result<(), CliError> {
    let r = load(args)?;
    let o = &r.config.objects;
    let report = objects_campaign(&r.engine, &o.items, &o.pressures_kpa, &r.stochastic, r.config.n_trials)?;
    let report = stamp(report, &r)?;
    let plot = LinePlot {
        title: "Object grasp success rate".into(),
        x_label: "pressure (kPa)".into(),
        y_label: "success rate".into(),
        series: o
            .items
            .iter()
            .map(|obj| Series {
                label: obj.name.clone(),
                points: o
                    .pressures_kpa
                    .iter()
                    .map(|&p| (p, report.rate(&object_key(&obj.name, p)).unwrap_or(f64::NAN)))
                    .collect(),
            })
            .collect(),
        y_range: Some((0.0, 1.0)),
        caption: caption(&r),
    };
    let mut w = Writer::new(&r.config.out_dir);
    w.put("objects.csv", &report_csv(&report).map_err(csv_err)?)?;
    w.put("objects.json", &json(&report)?)?;
    w.put("objects.svg", &plot.to_svg())?;
    w.finish();
    Ok(())
}
