//! Resisting-torque model of the pneumatic ring around the distal joint.
//!
//! Force-sensor logs from the torque-characterization rig are reduced to a
//! per-(angle, pressure) mean torque grid, which is then fitted with the
//! torsion-spring form `tau = (k0 + k1 p) alpha`.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Bend-angle range covered by the characterization rig.
pub const ALPHA_RANGE_DEG: (f64, f64) = (0.0, 80.0);
/// Gauge-pressure range covered by the characterization rig.
pub const PRESSURE_RANGE_KPA: (f64, f64) = (0.0, 150.0);

/// Coefficients of the shipped default calibration.
pub const DEFAULT_K0_NMM_PER_RAD: f64 = 200.0;
pub const DEFAULT_K1_NMM_PER_RAD_PER_KPA: f64 = 4.0;

#[derive(Debug, Error)]
pub enum JointError {
    #[error("calibration log has no rows")]
    NoRows,
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("line {line}: {field} = {value} outside protocol range [{lo}, {hi}]")]
    RowOutOfRange {
        line: u64,
        field: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("calibration grid has no samples for cell alpha={alpha_deg} deg, pressure={pressure_kpa} kPa")]
    EmptyCell { alpha_deg: f64, pressure_kpa: f64 },
    #[error("invalid calibration grid: {0}")]
    InvalidGrid(String),
    #[error("query alpha={alpha_deg} deg, pressure={pressure_kpa} kPa outside the calibration grid")]
    OutsideGrid { alpha_deg: f64, pressure_kpa: f64 },
    #[error("grid needs at least 2 angles and 2 pressures to fit, got {alphas}x{pressures}")]
    GridTooSmall { alphas: usize, pressures: usize },
    #[error("target torque {tau_nmm} N*mm unreachable at alpha={alpha_deg} deg: {reason}")]
    Infeasible {
        alpha_deg: f64,
        tau_nmm: f64,
        reason: &'static str,
    },
    #[error("invalid stiffness model: {0}")]
    InvalidModel(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Resisting torque from the two in-plane force components measured under
/// the testing fingertip: `tau = F_z a1 sin(alpha) - F_y a1 cos(alpha)`.
///
/// The result may be negative; callers decide whether that is physical.
pub fn torque_from_forces(f_y_n: f64, f_z_n: f64, alpha_deg: f64, a1_mm: f64) -> f64 {
    let a = alpha_deg.to_radians();
    f_z_n * a1_mm * a.sin() - f_y_n * a1_mm * a.cos()
}

/// One trial of the characterization protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRow {
    pub alpha_deg: f64,
    pub pressure_kpa: f64,
    pub fy_n: f64,
    pub fz_n: f64,
}

/// Header of the calibration CSV.
pub const CALIBRATION_HEADER: [&str; 4] = ["alpha_deg", "pressure_kpa", "fy_n", "fz_n"];

/// Parse a calibration log (`alpha_deg,pressure_kpa,fy_n,fz_n`).
///
/// Line numbers in errors are 1-based file lines, counting the header.
pub fn read_calibration_csv<R: Read>(reader: R) -> Result<Vec<CalibrationRow>, JointError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| JointError::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(JointError::NoRows);
    }
    if headers.iter().collect::<Vec<_>>() != CALIBRATION_HEADER {
        return Err(JointError::Parse {
            line: 1,
            message: format!(
                "expected header `{}`, found `{}`",
                CALIBRATION_HEADER.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| JointError::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 4 {
            return Err(JointError::Parse {
                line,
                message: format!("expected 4 fields, found {}", record.len()),
            });
        }
        let mut vals = [0.0; 4];
        for (i, v) in vals.iter_mut().enumerate() {
            *v = record[i].parse::<f64>().map_err(|e| JointError::Parse {
                line,
                message: format!("{}: {e} (`{}`)", CALIBRATION_HEADER[i], &record[i]),
            })?;
            if !v.is_finite() {
                return Err(JointError::Parse {
                    line,
                    message: format!("{} is not finite", CALIBRATION_HEADER[i]),
                });
            }
        }
        check_range(line, "alpha_deg", vals[0], ALPHA_RANGE_DEG)?;
        check_range(line, "pressure_kpa", vals[1], PRESSURE_RANGE_KPA)?;
        rows.push(CalibrationRow {
            alpha_deg: vals[0],
            pressure_kpa: vals[1],
            fy_n: vals[2],
            fz_n: vals[3],
        });
    }
    if rows.is_empty() {
        return Err(JointError::NoRows);
    }
    Ok(rows)
}

pub fn read_calibration_file(path: &Path) -> Result<Vec<CalibrationRow>, JointError> {
    let f = std::fs::File::open(path)?;
    read_calibration_csv(f)
}

fn check_range(line: u64, field: &'static str, value: f64, (lo, hi): (f64, f64)) -> Result<(), JointError> {
    if (lo..=hi).contains(&value) {
        Ok(())
    } else {
        Err(JointError::RowOutOfRange {
            line,
            field,
            value,
            lo,
            hi,
        })
    }
}

/// Mean resisting torque per (angle, pressure) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointCalibrationGrid {
    pub alphas_deg: Vec<f64>,
    pub pressures_kpa: Vec<f64>,
    /// `torques_nmm[i][j]` belongs to `alphas_deg[i]`, `pressures_kpa[j]`.
    pub torques_nmm: Vec<Vec<f64>>,
    pub trials_per_cell: Vec<Vec<usize>>,
}

/// Cell key with exact float identity; values come straight from the log.
fn key(v: f64) -> u64 {
    // -0.0 and 0.0 share a cell
    (v + 0.0).to_bits()
}

/// Reduce raw trials to a grid of per-cell mean torques.
///
/// The grid is the cartesian product of every angle and every pressure that
/// appears in the log; each cell must have at least one row.
pub fn ingest_calibration_log(rows: &[CalibrationRow], a1_mm: f64) -> Result<JointCalibrationGrid, JointError> {
    if rows.is_empty() {
        return Err(JointError::NoRows);
    }
    let mut sums: BTreeMap<(u64, u64), (f64, usize)> = BTreeMap::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut pressures: Vec<f64> = Vec::new();
    for r in rows {
        let tau = torque_from_forces(r.fy_n, r.fz_n, r.alpha_deg, a1_mm);
        let e = sums.entry((key(r.alpha_deg), key(r.pressure_kpa))).or_insert((0.0, 0));
        e.0 += tau;
        e.1 += 1;
        alphas.push(r.alpha_deg + 0.0);
        pressures.push(r.pressure_kpa + 0.0);
    }
    let sort_dedup = |v: &mut Vec<f64>| {
        v.sort_by(|a, b| a.total_cmp(b));
        v.dedup();
    };
    sort_dedup(&mut alphas);
    sort_dedup(&mut pressures);

    let mut torques = vec![vec![0.0; pressures.len()]; alphas.len()];
    let mut counts = vec![vec![0usize; pressures.len()]; alphas.len()];
    for (i, &a) in alphas.iter().enumerate() {
        for (j, &p) in pressures.iter().enumerate() {
            match sums.get(&(key(a), key(p))) {
                Some(&(sum, n)) => {
                    torques[i][j] = sum / n as f64;
                    counts[i][j] = n;
                }
                None => {
                    return Err(JointError::EmptyCell {
                        alpha_deg: a,
                        pressure_kpa: p,
                    })
                }
            }
        }
    }
    let grid = JointCalibrationGrid {
        alphas_deg: alphas,
        pressures_kpa: pressures,
        torques_nmm: torques,
        trials_per_cell: counts,
    };
    grid.validate()?;
    Ok(grid)
}

impl JointCalibrationGrid {
    /// Grid sampled from a stiffness model at the given nodes.
    pub fn from_model(model: &JointStiffnessModel, alphas_deg: &[f64], pressures_kpa: &[f64]) -> Self {
        let torques = alphas_deg
            .iter()
            .map(|&a| pressures_kpa.iter().map(|&p| model.ring_torque(a, p)).collect())
            .collect();
        Self {
            alphas_deg: alphas_deg.to_vec(),
            pressures_kpa: pressures_kpa.to_vec(),
            torques_nmm: torques,
            trials_per_cell: vec![vec![1; pressures_kpa.len()]; alphas_deg.len()],
        }
    }

    /// The shipped default surface: 0..80 deg by 5 deg, 0..150 kPa by 10 kPa.
    pub fn default_surface() -> Self {
        Self::from_model(
            &JointStiffnessModel::default(),
            &protocol_alphas_deg(),
            &protocol_pressures_kpa(),
        )
    }

    pub fn validate(&self) -> Result<(), JointError> {
        let bad = |m: String| Err(JointError::InvalidGrid(m));
        if self.alphas_deg.is_empty() || self.pressures_kpa.is_empty() {
            return bad("empty axis".into());
        }
        let sorted = |v: &[f64]| v.windows(2).all(|w| w[0] < w[1]);
        if !sorted(&self.alphas_deg) || !sorted(&self.pressures_kpa) {
            return bad("axes must be strictly ascending".into());
        }
        let (alo, ahi) = ALPHA_RANGE_DEG;
        let (plo, phi) = PRESSURE_RANGE_KPA;
        if self.alphas_deg.iter().any(|a| !(alo..=ahi).contains(a)) {
            return bad("angle outside [0, 80] deg".into());
        }
        if self.pressures_kpa.iter().any(|p| !(plo..=phi).contains(p)) {
            return bad("pressure outside [0, 150] kPa".into());
        }
        if self.torques_nmm.len() != self.alphas_deg.len()
            || self.torques_nmm.iter().any(|r| r.len() != self.pressures_kpa.len())
        {
            return bad(format!(
                "torque matrix must be {}x{}",
                self.alphas_deg.len(),
                self.pressures_kpa.len()
            ));
        }
        if self.trials_per_cell.len() != self.alphas_deg.len()
            || self.trials_per_cell.iter().any(|r| r.len() != self.pressures_kpa.len())
        {
            return bad("trial-count matrix shape mismatch".into());
        }
        for (i, row) in self.torques_nmm.iter().enumerate() {
            for (j, &t) in row.iter().enumerate() {
                if !t.is_finite() || t < 0.0 {
                    return bad(format!(
                        "torque {t} at alpha={} deg, pressure={} kPa must be finite and non-negative",
                        self.alphas_deg[i], self.pressures_kpa[j]
                    ));
                }
            }
        }
        Ok(())
    }

    /// Bilinear interpolation inside the grid hull; no extrapolation.
    pub fn ring_torque(&self, alpha_deg: f64, pressure_kpa: f64) -> Result<f64, JointError> {
        let outside = || JointError::OutsideGrid {
            alpha_deg,
            pressure_kpa,
        };
        let (i, u) = locate(&self.alphas_deg, alpha_deg).ok_or_else(outside)?;
        let (j, v) = locate(&self.pressures_kpa, pressure_kpa).ok_or_else(outside)?;
        let t = &self.torques_nmm;
        let at = |ii: usize, jj: usize| t[ii.min(t.len() - 1)][jj.min(t[0].len() - 1)];
        // Exact node values when u or v is zero.
        let lerp = |a: f64, b: f64, s: f64| if s == 0.0 { a } else { a + (b - a) * s };
        let low = lerp(at(i, j), at(i, j + 1), v);
        let high = lerp(at(i + 1, j), at(i + 1, j + 1), v);
        Ok(lerp(low, high, u))
    }
}

/// Index of the cell containing `x` and the fractional offset within it.
fn locate(axis: &[f64], x: f64) -> Option<(usize, f64)> {
    let (first, last) = (*axis.first()?, *axis.last()?);
    if !x.is_finite() || x < first || x > last {
        return None;
    }
    if axis.len() == 1 {
        return Some((0, 0.0));
    }
    let k = axis.partition_point(|&a| a <= x);
    if k == axis.len() {
        // exactly on the last node
        return Some((axis.len() - 1, 0.0));
    }
    let i = k - 1;
    Some((i, (x - axis[i]) / (axis[i + 1] - axis[i])))
}

/// Bend angles of the characterization protocol, 0..80 deg in 5 deg steps.
pub fn protocol_alphas_deg() -> Vec<f64> {
    (0..=16).map(|i| 5.0 * i as f64).collect()
}

/// Pressures of the characterization protocol, 0..150 kPa in 10 kPa steps.
pub fn protocol_pressures_kpa() -> Vec<f64> {
    (0..=15).map(|i| 10.0 * i as f64).collect()
}

/// Torsion-spring fit `tau = (k0 + k1 p) alpha_rad`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointStiffnessModel {
    pub k0_nmm_per_rad: f64,
    pub k1_nmm_per_rad_per_kpa: f64,
    #[serde(default)]
    pub residual_rmse_nmm: f64,
    /// Set when the fit saw an all-zero grid.
    #[serde(default)]
    pub degenerate: bool,
    /// Where the coefficients came from.
    #[serde(default)]
    pub source: String,
}

impl Default for JointStiffnessModel {
    fn default() -> Self {
        Self::new(DEFAULT_K0_NMM_PER_RAD, DEFAULT_K1_NMM_PER_RAD_PER_KPA)
    }
}

impl JointStiffnessModel {
    pub fn new(k0_nmm_per_rad: f64, k1_nmm_per_rad_per_kpa: f64) -> Self {
        Self {
            k0_nmm_per_rad,
            k1_nmm_per_rad_per_kpa,
            residual_rmse_nmm: 0.0,
            degenerate: false,
            source: "inline coefficients".into(),
        }
    }

    pub fn validate(&self) -> Result<(), JointError> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        if !ok(self.k0_nmm_per_rad) || !ok(self.k1_nmm_per_rad_per_kpa) || !ok(self.residual_rmse_nmm) {
            return Err(JointError::InvalidModel(format!(
                "k0={}, k1={}, rmse={} must be finite and non-negative",
                self.k0_nmm_per_rad, self.k1_nmm_per_rad_per_kpa, self.residual_rmse_nmm
            )));
        }
        Ok(())
    }

    /// Joint stiffness at a given pressure (N*mm per rad).
    pub fn stiffness(&self, pressure_kpa: f64) -> f64 {
        self.k0_nmm_per_rad + self.k1_nmm_per_rad_per_kpa * pressure_kpa
    }

    pub fn ring_torque(&self, alpha_deg: f64, pressure_kpa: f64) -> f64 {
        self.stiffness(pressure_kpa) * alpha_deg.to_radians()
    }

    /// Pressure that makes the ring resist `tau_nmm` at `alpha_deg`.
    pub fn required_pressure(&self, alpha_deg: f64, tau_nmm: f64) -> Result<f64, JointError> {
        let infeasible = |reason| JointError::Infeasible {
            alpha_deg,
            tau_nmm,
            reason,
        };
        if !(alpha_deg > 0.0) {
            return Err(infeasible("bend angle must be positive"));
        }
        let base = self.ring_torque(alpha_deg, 0.0);
        if tau_nmm < base {
            return Err(infeasible("below the zero-pressure torque"));
        }
        if tau_nmm == base {
            return Ok(0.0);
        }
        if self.k1_nmm_per_rad_per_kpa <= 0.0 {
            return Err(infeasible("ring has no pressure gain"));
        }
        Ok((tau_nmm / alpha_deg.to_radians() - self.k0_nmm_per_rad) / self.k1_nmm_per_rad_per_kpa)
    }
}

/// Non-negative least-squares fit of `tau = (k0 + k1 p) alpha_rad` over every
/// grid cell.
pub fn fit_model(grid: &JointCalibrationGrid) -> Result<JointStiffnessModel, JointError> {
    grid.validate()?;
    let (na, np) = (grid.alphas_deg.len(), grid.pressures_kpa.len());
    if na < 2 || np < 2 {
        return Err(JointError::GridTooSmall {
            alphas: na,
            pressures: np,
        });
    }
    let samples: Vec<(f64, f64, f64)> = grid
        .alphas_deg
        .iter()
        .enumerate()
        .flat_map(|(i, &a)| {
            grid.pressures_kpa
                .iter()
                .enumerate()
                .map(move |(j, &p)| (a.to_radians(), p, grid.torques_nmm[i][j]))
        })
        .collect();

    if samples.iter().all(|s| s.2 == 0.0) {
        return Ok(JointStiffnessModel {
            k0_nmm_per_rad: 0.0,
            k1_nmm_per_rad_per_kpa: 0.0,
            residual_rmse_nmm: 0.0,
            degenerate: true,
            source: "fit: all-zero grid".into(),
        });
    }

    // Regressors x0 = alpha, x1 = p * alpha.
    let (mut s00, mut s01, mut s11, mut s0y, mut s1y) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(a, p, y) in &samples {
        let x0 = a;
        let x1 = p * a;
        s00 += x0 * x0;
        s01 += x0 * x1;
        s11 += x1 * x1;
        s0y += x0 * y;
        s1y += x1 * y;
    }
    let sse = |k0: f64, k1: f64| -> f64 {
        samples
            .iter()
            .map(|&(a, p, y)| {
                let r = (k0 + k1 * p) * a - y;
                r * r
            })
            .sum()
    };

    let mut candidates: Vec<(f64, f64)> = Vec::with_capacity(4);
    let det = s00 * s11 - s01 * s01;
    if det > 0.0 {
        let k0 = (s0y * s11 - s1y * s01) / det;
        let k1 = (s1y * s00 - s0y * s01) / det;
        if k0 >= 0.0 && k1 >= 0.0 {
            candidates.push((k0, k1));
        }
    }
    if candidates.is_empty() {
        if s00 > 0.0 {
            candidates.push(((s0y / s00).max(0.0), 0.0));
        }
        if s11 > 0.0 {
            candidates.push((0.0, (s1y / s11).max(0.0)));
        }
        candidates.push((0.0, 0.0));
    }
    let (k0, k1) = candidates
        .into_iter()
        .map(|c| (c, sse(c.0, c.1)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(c, _)| c)
        .expect("at least one candidate");

    Ok(JointStiffnessModel {
        k0_nmm_per_rad: k0,
        k1_nmm_per_rad_per_kpa: k1,
        residual_rmse_nmm: (sse(k0, k1) / samples.len() as f64).sqrt(),
        degenerate: false,
        source: format!("fit over {na}x{np} calibration grid"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn torque_from_forces_examples() {
        assert_relative_eq!(torque_from_forces(0.0, 1.0, 30.0, 50.0), 25.0, max_relative = 1e-12);
        assert_relative_eq!(torque_from_forces(1.0, 0.0, 0.0, 50.0), -50.0, max_relative = 1e-12);
        // 50 * (2 - 0.5) * sqrt(2)/2
        assert_relative_eq!(
            torque_from_forces(0.5, 2.0, 45.0, 50.0),
            53.033008588991066,
            max_relative = 1e-12
        );
    }

    fn row(a: f64, p: f64, fy: f64, fz: f64) -> CalibrationRow {
        CalibrationRow {
            alpha_deg: a,
            pressure_kpa: p,
            fy_n: fy,
            fz_n: fz,
        }
    }

    #[test]
    fn ingest_identical_rows() {
        let rows = vec![row(45.0, 100.0, -0.2, 1.0); 10];
        let grid = ingest_calibration_log(&rows, 50.0).unwrap();
        assert_eq!(grid.alphas_deg, vec![45.0]);
        assert_eq!(grid.pressures_kpa, vec![100.0]);
        let single = torque_from_forces(-0.2, 1.0, 45.0, 50.0);
        assert_relative_eq!(grid.torques_nmm[0][0], single, max_relative = 1e-12);
        assert_eq!(grid.trials_per_cell[0][0], 10);
    }

    #[test]
    fn ingest_shape_and_mean() {
        // fz chosen so tau = fz * 50 at 90 deg
        let rows = vec![
            row(80.0, 0.0, 0.0, 1.0),
            row(40.0, 0.0, 0.0, 1.0),
            row(40.0, 10.0, 0.0, 1.0),
            row(80.0, 10.0, 0.0, 1.0),
        ];
        let grid = ingest_calibration_log(&rows, 50.0).unwrap();
        assert_eq!(grid.alphas_deg, vec![40.0, 80.0]);
        assert_eq!(grid.pressures_kpa, vec![0.0, 10.0]);
        assert_eq!(grid.torques_nmm.len(), 2);
        assert_eq!(grid.torques_nmm[0].len(), 2);

        // tau = fz * a1 at 90 deg is outside the protocol, so use the
        // linear relation at 30 deg: tau = 25 fz.
        let rows = vec![row(30.0, 50.0, 0.0, 0.4), row(30.0, 50.0, 0.0, 0.8)];
        let grid = ingest_calibration_log(&rows, 50.0).unwrap();
        assert_relative_eq!(grid.torques_nmm[0][0], 15.0, max_relative = 1e-12);
    }

    #[test]
    fn ingest_reports_empty_cell() {
        let rows = vec![
            row(40.0, 0.0, 0.0, 1.0),
            row(40.0, 10.0, 0.0, 1.0),
            row(80.0, 0.0, 0.0, 1.0),
        ];
        match ingest_calibration_log(&rows, 50.0) {
            Err(JointError::EmptyCell {
                alpha_deg,
                pressure_kpa,
            }) => {
                assert_eq!(alpha_deg, 80.0);
                assert_eq!(pressure_kpa, 10.0);
            }
            other => panic!("expected empty cell, got {other:?}"),
        }
        assert!(matches!(ingest_calibration_log(&[], 50.0), Err(JointError::NoRows)));
    }

    #[test]
    fn csv_parse_errors_carry_line_numbers() {
        let text = "alpha_deg,pressure_kpa,fy_n,fz_n\n10,20,0.1,0.2\n10,abc,0.1,0.2\n";
        match read_calibration_csv(text.as_bytes()) {
            Err(JointError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        let text = "alpha_deg,pressure_kpa,fy_n,fz_n\n10,20,0.1,0.2\n95,20,0.1,0.2\n";
        match read_calibration_csv(text.as_bytes()) {
            Err(JointError::RowOutOfRange { line, field, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(field, "alpha_deg");
            }
            other => panic!("expected range error, got {other:?}"),
        }
        assert!(matches!(read_calibration_csv("".as_bytes()), Err(JointError::NoRows)));
        assert!(matches!(
            read_calibration_csv("alpha_deg,pressure_kpa,fy_n,fz_n\n".as_bytes()),
            Err(JointError::NoRows)
        ));
        assert!(matches!(
            read_calibration_csv("a,b,c,d\n1,2,3,4\n".as_bytes()),
            Err(JointError::Parse { line: 1, .. })
        ));
    }

    fn square(values: [[f64; 2]; 2]) -> JointCalibrationGrid {
        JointCalibrationGrid {
            alphas_deg: vec![10.0, 20.0],
            pressures_kpa: vec![0.0, 100.0],
            torques_nmm: values.iter().map(|r| r.to_vec()).collect(),
            trials_per_cell: vec![vec![1, 1], vec![1, 1]],
        }
    }

    #[test]
    fn interpolation_examples() {
        let g = square([[10.0, 10.0], [20.0, 20.0]]);
        assert_eq!(g.ring_torque(10.0, 100.0).unwrap(), 10.0);
        assert_eq!(g.ring_torque(20.0, 0.0).unwrap(), 20.0);
        assert_relative_eq!(g.ring_torque(15.0, 50.0).unwrap(), 15.0, max_relative = 1e-12);

        let g = square([[0.0, 10.0], [20.0, 30.0]]);
        // (0 + 10 + 20 + 30) / 4 at the centre
        assert_relative_eq!(g.ring_torque(15.0, 50.0).unwrap(), 15.0, max_relative = 1e-12);
        assert!(matches!(
            g.ring_torque(25.0, 50.0),
            Err(JointError::OutsideGrid { .. })
        ));
        assert!(g.ring_torque(15.0, -1.0).is_err());
    }

    #[test]
    fn model_examples() {
        let m = JointStiffnessModel::default();
        assert_eq!(m.ring_torque(0.0, 77.0), 0.0);
        assert!((m.ring_torque(45.0, 100.0) - 471.2).abs() < 0.05);
        assert!((m.ring_torque(45.0, 0.0) - 157.1).abs() < 0.05);

        let base = m.ring_torque(45.0, 0.0);
        assert_eq!(m.required_pressure(45.0, base).unwrap(), 0.0);
        assert!((m.required_pressure(45.0, 471.2).unwrap() - 100.0).abs() < 0.05);
        let flat = JointStiffnessModel::new(200.0, 0.0);
        assert!(matches!(
            flat.required_pressure(45.0, base + 10.0),
            Err(JointError::Infeasible { .. })
        ));
        assert!(m.required_pressure(45.0, base - 1.0).is_err());
        assert!(m.required_pressure(0.0, 10.0).is_err());
    }

    #[test]
    fn fit_recovers_generator() {
        let grid = JointCalibrationGrid::default_surface();
        let m = fit_model(&grid).unwrap();
        assert!((m.k0_nmm_per_rad - 200.0).abs() < 1e-6);
        assert!((m.k1_nmm_per_rad_per_kpa - 4.0).abs() < 1e-8);
        assert!(m.residual_rmse_nmm < 1e-9);
        assert!(!m.degenerate);
    }

    #[test]
    fn fit_all_zero_grid_is_degenerate() {
        let mut grid = JointCalibrationGrid::default_surface();
        for row in &mut grid.torques_nmm {
            row.iter_mut().for_each(|t| *t = 0.0);
        }
        let m = fit_model(&grid).unwrap();
        assert_eq!((m.k0_nmm_per_rad, m.k1_nmm_per_rad_per_kpa), (0.0, 0.0));
        assert_eq!(m.residual_rmse_nmm, 0.0);
        assert!(m.degenerate);
    }

    #[test]
    fn fit_clamps_negative_gain() {
        // torque falls with pressure: unconstrained k1 < 0
        let grid = JointCalibrationGrid {
            alphas_deg: vec![10.0, 20.0],
            pressures_kpa: vec![0.0, 100.0],
            torques_nmm: vec![vec![40.0, 20.0], vec![80.0, 40.0]],
            trials_per_cell: vec![vec![1, 1], vec![1, 1]],
        };
        let m = fit_model(&grid).unwrap();
        assert!(m.k0_nmm_per_rad > 0.0);
        assert_eq!(m.k1_nmm_per_rad_per_kpa, 0.0);
    }

    #[test]
    fn fit_rejects_small_grid() {
        let grid = JointCalibrationGrid {
            alphas_deg: vec![10.0],
            pressures_kpa: vec![0.0, 100.0],
            torques_nmm: vec![vec![1.0, 2.0]],
            trials_per_cell: vec![vec![1, 1]],
        };
        assert!(matches!(fit_model(&grid), Err(JointError::GridTooSmall { .. })));
    }

    #[test]
    fn grid_validation() {
        let mut g = square([[1.0, 2.0], [3.0, 4.0]]);
        g.validate().unwrap();
        g.torques_nmm[0][0] = -1.0;
        assert!(g.validate().is_err());
        let mut g = square([[1.0, 2.0], [3.0, 4.0]]);
        g.alphas_deg = vec![20.0, 10.0];
        assert!(g.validate().is_err());
        let mut g = square([[1.0, 2.0], [3.0, 4.0]]);
        g.pressures_kpa = vec![0.0, 200.0];
        assert!(g.validate().is_err());
    }
}
