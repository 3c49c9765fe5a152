//! Closed-form kinematics of the finger body, the distal revolute joint and
//! the curved fingertip.
//!
//! Lengths are millimeters and angles are degrees at every public boundary.
//! The contact point sits at the pole of the fingertip arc, `d1` away from the
//! joint and rotated by the built-in offset `beta` plus the backward bend
//! `alpha`. The arc radius only guarantees flat-surface contact and is not
//! used kinematically.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::bisect;

/// Largest finger separation the gripper frame allows.
pub const MAX_FINGER_SEPARATION_MM: f64 = 100.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid fingertip geometry: {0}")]
    InvalidGeometry(String),
    #[error("bend angle {alpha_deg} deg outside [0, {alpha_max_deg}] deg")]
    AngleOutOfRange { alpha_deg: f64, alpha_max_deg: f64 },
    #[error("drop {h_mm} mm outside reachable range [0, {h_max_mm}] mm")]
    DropOutOfRange { h_mm: f64, h_max_mm: f64 },
    #[error("invalid finger pose: {0}")]
    InvalidPose(String),
}

/// Rigid-link constants of one finger.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FingertipGeometry {
    /// Fingertip contact-arc radius.
    pub r_c_mm: f64,
    /// Joint-to-contact link length.
    pub d1_mm: f64,
    /// Built-in offset between finger-body axis and the joint-to-contact segment.
    pub beta_deg: f64,
    /// Joint deflection limit.
    pub alpha_max_deg: f64,
    /// Lever length of the straight testing fingertip used for torque
    /// characterization.
    pub a1_mm: f64,
}

impl Default for FingertipGeometry {
    fn default() -> Self {
        Self {
            r_c_mm: 20.0,
            d1_mm: 31.0,
            beta_deg: 20.64,
            alpha_max_deg: 80.0,
            a1_mm: 50.0,
        }
    }
}

impl FingertipGeometry {
    pub fn new(
        r_c_mm: f64,
        d1_mm: f64,
        beta_deg: f64,
        alpha_max_deg: f64,
        a1_mm: f64,
    ) -> Result<Self, GeometryError> {
        let g = Self {
            r_c_mm,
            d1_mm,
            beta_deg,
            alpha_max_deg,
            a1_mm,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        let bad = |m: &str| Err(GeometryError::InvalidGeometry(m.to_string()));
        let all_finite = [
            self.r_c_mm,
            self.d1_mm,
            self.beta_deg,
            self.alpha_max_deg,
            self.a1_mm,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !all_finite {
            return bad("non-finite field");
        }
        if self.r_c_mm <= 0.0 || self.d1_mm <= 0.0 || self.a1_mm <= 0.0 {
            return bad("r_c, d1 and a1 must be positive");
        }
        if !(0.0..90.0).contains(&self.beta_deg) {
            return bad("beta must lie in [0, 90) deg");
        }
        if !(self.alpha_max_deg > 0.0 && self.alpha_max_deg <= 80.0) {
            return bad("alpha_max must lie in (0, 80] deg");
        }
        if self.beta_deg + self.alpha_max_deg > 110.0 {
            return bad("beta + alpha_max must not exceed 110 deg");
        }
        Ok(())
    }

    fn check_alpha(&self, alpha_deg: f64) -> Result<(), GeometryError> {
        if alpha_deg.is_finite() && (0.0..=self.alpha_max_deg).contains(&alpha_deg) {
            Ok(())
        } else {
            Err(GeometryError::AngleOutOfRange {
                alpha_deg,
                alpha_max_deg: self.alpha_max_deg,
            })
        }
    }

    /// Vertical travel `H = a1 (1 - cos alpha)` of the testing fingertip.
    pub fn testing_fingertip_drop(&self, alpha_deg: f64) -> Result<f64, GeometryError> {
        self.check_alpha(alpha_deg)?;
        // 1 - cos a = 2 sin^2(a/2), free of cancellation near zero
        let s = (0.5 * alpha_deg.to_radians()).sin();
        Ok(2.0 * self.a1_mm * s * s)
    }

    /// Gripper descent `h = d1 (cos beta - cos(beta + alpha))` that bends the
    /// working fingertip back by `alpha`.
    pub fn finger_drop(&self, alpha_deg: f64) -> Result<f64, GeometryError> {
        self.check_alpha(alpha_deg)?;
        Ok(self.finger_drop_unchecked(alpha_deg))
    }

    fn finger_drop_unchecked(&self, alpha_deg: f64) -> f64 {
        let half = 0.5 * alpha_deg.to_radians();
        let mid = self.beta_deg.to_radians() + half;
        2.0 * self.d1_mm * mid.sin() * half.sin()
    }

    /// Inverse of [`finger_drop`](Self::finger_drop) on `[0, alpha_max]`.
    pub fn drop_to_angle(&self, h_mm: f64) -> Result<f64, GeometryError> {
        let h_max = self.finger_drop_unchecked(self.alpha_max_deg);
        if !h_mm.is_finite() || h_mm < 0.0 || h_mm > h_max {
            return Err(GeometryError::DropOutOfRange {
                h_mm,
                h_max_mm: h_max,
            });
        }
        if h_mm == 0.0 {
            return Ok(0.0);
        }
        bisect(
            |a| self.finger_drop_unchecked(a) - h_mm,
            0.0,
            self.alpha_max_deg,
            1e-13,
            1e-12,
        )
        .map_err(|_| GeometryError::DropOutOfRange {
            h_mm,
            h_max_mm: h_max,
        })
    }

    /// Horizontal reach `d_e = d1 sin(beta + alpha)` of the contact point
    /// beyond the finger-body axis.
    pub fn extension(&self, alpha_deg: f64) -> Result<f64, GeometryError> {
        self.check_alpha(alpha_deg)?;
        Ok(self.extension_unchecked(alpha_deg))
    }

    // Kept out of line so callers that also need the cosine cannot fuse the
    // two into a sincos call, whose sine may differ in the last bit.
    #[inline(never)]
    pub(crate) fn extension_unchecked(&self, alpha_deg: f64) -> f64 {
        self.d1_mm * (self.beta_deg + alpha_deg).to_radians().sin()
    }

    /// Contact point `(y, z)` relative to the revolute joint; `y` points away
    /// from the opposing finger, `z` up.
    pub fn contact_point(&self, alpha_deg: f64) -> Result<(f64, f64), GeometryError> {
        self.check_alpha(alpha_deg)?;
        let phi = (self.beta_deg + alpha_deg).to_radians();
        Ok((self.extension_unchecked(alpha_deg), -self.d1_mm * phi.cos()))
    }

    /// Distance between the two contact points, `d = d_f + 2 d_e`.
    pub fn contact_span(&self, pose: &FingerPose) -> Result<f64, GeometryError> {
        pose.validate(self)?;
        Ok(pose.d_f_mm + 2.0 * self.extension_unchecked(pose.alpha_deg))
    }

    /// Finger separation that yields a contact span `span_mm` at bend `alpha`.
    pub fn separation_for_span(&self, span_mm: f64, alpha_deg: f64) -> Result<f64, GeometryError> {
        let d_f = span_mm - 2.0 * self.extension(alpha_deg)?;
        if !(0.0..=MAX_FINGER_SEPARATION_MM).contains(&d_f) {
            return Err(GeometryError::InvalidPose(format!(
                "span {span_mm} mm at {alpha_deg} deg needs finger separation {d_f:.3} mm"
            )));
        }
        Ok(d_f)
    }

    /// Lever of a horizontal contact force about the joint, `d1 cos(beta + alpha)`.
    pub(crate) fn horizontal_lever(&self, alpha_deg: f64) -> f64 {
        self.d1_mm * (self.beta_deg + alpha_deg).to_radians().cos()
    }
}

/// Pose of one finger relative to the object.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FingerPose {
    pub alpha_deg: f64,
    pub d_f_mm: f64,
    pub descent_mm: f64,
}

impl FingerPose {
    pub fn new(alpha_deg: f64, d_f_mm: f64, descent_mm: f64) -> Self {
        Self {
            alpha_deg,
            d_f_mm,
            descent_mm,
        }
    }

    pub fn validate(&self, geom: &FingertipGeometry) -> Result<(), GeometryError> {
        geom.check_alpha(self.alpha_deg)?;
        if !(self.d_f_mm.is_finite() && (0.0..=MAX_FINGER_SEPARATION_MM).contains(&self.d_f_mm)) {
            return Err(GeometryError::InvalidPose(format!(
                "finger separation {} mm outside [0, {MAX_FINGER_SEPARATION_MM}] mm",
                self.d_f_mm
            )));
        }
        if !(self.descent_mm.is_finite() && self.descent_mm >= 0.0) {
            return Err(GeometryError::InvalidPose(format!(
                "descent {} mm must be non-negative",
                self.descent_mm
            )));
        }
        Ok(())
    }
}
