//! Thin-sheet mechanics: bending stiffness, moment-curvature, Euler buckling
//! between the two fingertip contacts, and buckle rise under end-shortening.
//!
//! Inputs are mm / Pa / kg per m^2; everything is converted to SI internally.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const GRAVITY_M_PER_S2: f64 = 9.81;

const MM: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SheetError {
    #[error("invalid sheet: {0}")]
    InvalidSpec(String),
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("end-shortening {c_mm} mm must lie in [0, {span_mm}) mm")]
    ShorteningOutOfRange { c_mm: f64, span_mm: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SheetSpec {
    pub elastic_modulus_pa: f64,
    pub thickness_mm: f64,
    /// Across the fingers.
    pub width_mm: f64,
    /// Along the closing axis.
    pub length_mm: f64,
    pub areal_density_kg_per_m2: f64,
    /// Mid-span rise of the unloaded sheet.
    pub initial_deflection_mm: f64,
}

impl Default for SheetSpec {
    /// 48 x 210 x 0.5 mm paperboard strip.
    fn default() -> Self {
        Self {
            elastic_modulus_pa: 2e9,
            thickness_mm: 0.5,
            width_mm: 48.0,
            length_mm: 210.0,
            areal_density_kg_per_m2: 0.08,
            initial_deflection_mm: 0.0,
        }
    }
}

impl SheetSpec {
    pub fn validate(&self) -> Result<(), SheetError> {
        let positive = [
            ("elastic_modulus_pa", self.elastic_modulus_pa),
            ("thickness_mm", self.thickness_mm),
            ("width_mm", self.width_mm),
            ("length_mm", self.length_mm),
            ("areal_density_kg_per_m2", self.areal_density_kg_per_m2),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(SheetError::InvalidSpec(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(self.initial_deflection_mm.is_finite() && self.initial_deflection_mm >= 0.0) {
            return Err(SheetError::InvalidSpec(format!(
                "initial_deflection_mm must be non-negative, got {}",
                self.initial_deflection_mm
            )));
        }
        if self.thickness_mm > self.length_mm / 20.0 {
            return Err(SheetError::InvalidSpec(format!(
                "thickness {} mm is not thin against length {} mm (limit length/20)",
                self.thickness_mm, self.length_mm
            )));
        }
        Ok(())
    }

    pub fn with_initial_deflection(&self, delta0_mm: f64) -> Self {
        Self {
            initial_deflection_mm: delta0_mm,
            ..self.clone()
        }
    }

    /// Bending stiffness per unit width, N*m.
    pub fn bending_stiffness(&self) -> f64 {
        bending_stiffness(self.elastic_modulus_pa, self.thickness_mm)
    }

    pub fn mass_kg(&self) -> f64 {
        self.areal_density_kg_per_m2 * self.width_mm * MM * self.length_mm * MM
    }

    pub fn weight_n(&self) -> f64 {
        self.mass_kg() * GRAVITY_M_PER_S2
    }

    /// Euler load of this strip over `span_mm`, N.
    pub fn critical_buckling_load(&self, span_mm: f64) -> Result<f64, SheetError> {
        critical_buckling_load(self.bending_stiffness(), self.width_mm, span_mm)
    }

    /// Imperfection knockdown `max(0, 1 - 0.1 delta0 / t)`.
    pub fn knockdown(&self) -> f64 {
        (1.0 - self.initial_deflection_mm / self.thickness_mm * 0.1).max(0.0)
    }
}

/// `S_b = E t^3 / 12` per unit width, N*m.
pub fn bending_stiffness(elastic_modulus_pa: f64, thickness_mm: f64) -> f64 {
    let t = thickness_mm * MM;
    elastic_modulus_pa * t * t * t / 12.0
}

/// Bending moment holding a strip of width `b` at radius `R`, N*m.
pub fn moment_for_curvature(s_b_nm: f64, width_mm: f64, radius_mm: f64) -> Result<f64, SheetError> {
    if !(radius_mm > 0.0) {
        return Err(SheetError::NonPositive {
            name: "radius_mm",
            value: radius_mm,
        });
    }
    if !(width_mm > 0.0) {
        return Err(SheetError::NonPositive {
            name: "width_mm",
            value: width_mm,
        });
    }
    Ok(s_b_nm * (width_mm * MM) / (radius_mm * MM))
}

/// Pinned-pinned Euler load `pi^2 S_b b / d^2`, N.
pub fn critical_buckling_load(s_b_nm: f64, width_mm: f64, span_mm: f64) -> Result<f64, SheetError> {
    if !(span_mm > 0.0) {
        return Err(SheetError::NonPositive {
            name: "span_mm",
            value: span_mm,
        });
    }
    let d = span_mm * MM;
    Ok(std::f64::consts::PI.powi(2) * s_b_nm * (width_mm * MM) / (d * d))
}

/// First-mode rise `w = (2/pi) sqrt(d c)` of an inextensible strip, mm.
pub fn buckle_amplitude(span_mm: f64, end_shortening_mm: f64) -> Result<f64, SheetError> {
    if !(span_mm > 0.0) {
        return Err(SheetError::NonPositive {
            name: "span_mm",
            value: span_mm,
        });
    }
    if !(0.0..span_mm).contains(&end_shortening_mm) {
        return Err(SheetError::ShorteningOutOfRange {
            c_mm: end_shortening_mm,
            span_mm,
        });
    }
    Ok(std::f64::consts::FRAC_2_PI * (span_mm * end_shortening_mm).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bending_stiffness_examples() {
        assert_relative_eq!(bending_stiffness(2e9, 0.5), 2.0833333333333333e-2, max_relative = 1e-12);
        assert_relative_eq!(bending_stiffness(2e9, 1.0) / bending_stiffness(2e9, 0.5), 8.0, max_relative = 1e-12);
        assert_eq!(bending_stiffness(0.0, 0.5), 0.0);
    }

    #[test]
    fn moment_examples() {
        let m = moment_for_curvature(2.083e-2, 48.0, 100.0).unwrap();
        assert!((m - 1.0e-2).abs() < 1e-4);
        assert!(moment_for_curvature(2.083e-2, 48.0, 1e9).unwrap() < 1e-9);
        let m2 = moment_for_curvature(2.083e-2, 96.0, 100.0).unwrap();
        assert_eq!(m2, 2.0 * m);
        assert!(moment_for_curvature(2.083e-2, 48.0, 0.0).is_err());
    }

    #[test]
    fn buckling_examples() {
        let p = critical_buckling_load(2.083e-2, 48.0, 65.0).unwrap();
        assert!((p - 2.34).abs() < 0.005, "{p}");
        let p2 = critical_buckling_load(2.083e-2, 48.0, 130.0).unwrap();
        assert_relative_eq!(p2 * 4.0, p, max_relative = 1e-12);
        let pb = critical_buckling_load(2.083e-2, 96.0, 65.0).unwrap();
        assert_relative_eq!(pb, 2.0 * p, max_relative = 1e-12);
        assert!(critical_buckling_load(2.083e-2, 48.0, 0.0).is_err());
    }

    #[test]
    fn amplitude_examples() {
        assert_eq!(buckle_amplitude(65.0, 0.0).unwrap(), 0.0);
        let w5 = buckle_amplitude(65.0, 5.0).unwrap();
        assert!((w5 - 11.48).abs() < 0.005);
        let w20 = buckle_amplitude(65.0, 20.0).unwrap();
        assert!((w20 - 22.95).abs() < 0.005);
        assert_relative_eq!(w20, 2.0 * w5, max_relative = 1e-15);
        assert!(buckle_amplitude(65.0, 65.0).is_err());
        assert!(buckle_amplitude(65.0, -0.1).is_err());
    }

    #[test]
    fn default_sheet_weight_and_knockdown() {
        let s = SheetSpec::default();
        s.validate().unwrap();
        assert!((s.weight_n() - 7.91e-3).abs() < 1e-5);
        assert_eq!(s.knockdown(), 1.0);
        assert_relative_eq!(s.with_initial_deflection(1.0).knockdown(), 0.8, max_relative = 1e-12);
        assert_eq!(s.with_initial_deflection(100.0).knockdown(), 0.0);
    }

    #[test]
    fn rejects_thick_sheet() {
        let s = SheetSpec {
            thickness_mm: 20.0,
            ..SheetSpec::default()
        };
        assert!(s.validate().is_err());
        let s = SheetSpec {
            width_mm: 0.0,
            ..SheetSpec::default()
        };
        assert!(s.validate().is_err());
    }
}
