//! Uniform conformal-time grid and midpoint Hamiltonian coefficients.

use serde::{Deserialize, Serialize};

use crate::background::ModeParams;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    DeSitter,
    Radiation,
}

/// One slice of the product formula. `cz` and `ca` are the coefficients of
/// the number generator and the pair generator in units of `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepCoeffs {
    pub index: usize,
    pub y_mid: f64,
    pub dy: f64,
    pub cz: f64,
    pub ca: f64,
    pub branch: Branch,
}

/// Rotation angles of one Strang step:
/// `exp(-i·z_half·Z) · exp(-i·a·A) · exp(-i·z_half·Z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrangAngles {
    pub theta_z_half: f64,
    pub theta_a: f64,
}

impl StepCoeffs {
    /// Coefficients at `y_mid`. `y_mid >= -x` selects the radiation branch.
    pub fn at(index: usize, y_mid: f64, dy: f64, x: f64) -> Self {
        if y_mid < -x {
            let ca = -1.0 / (y_mid * y_mid);
            Self {
                index,
                y_mid,
                dy,
                cz: 1.0 + ca,
                ca,
                branch: Branch::DeSitter,
            }
        } else {
            Self {
                index,
                y_mid,
                dy,
                cz: 1.0,
                ca: 0.0,
                branch: Branch::Radiation,
            }
        }
    }

    pub fn strang_angles(&self) -> StrangAngles {
        StrangAngles {
            theta_z_half: self.cz * self.dy / 2.0,
            theta_a: self.ca * self.dy,
        }
    }
}

pub fn strang_angles(step: &StepCoeffs) -> StrangAngles {
    step.strang_angles()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffSchedule {
    pub params: ModeParams,
    pub steps: Vec<StepCoeffs>,
}

impl CoeffSchedule {
    pub fn dy(&self) -> f64 {
        (self.params.y_f - self.params.y_i) / self.params.n_steps as f64
    }

    /// Grid point `y_n`, for `n` in `0..=n_steps`.
    pub fn boundary(&self, n: usize) -> f64 {
        self.params.y_i + n as f64 * self.dy()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

pub fn build_schedule(params: ModeParams) -> Result<CoeffSchedule> {
    params.validate()?;
    let n = params.n_steps;
    let dy = (params.y_f - params.y_i) / n as f64;
    let steps = (0..n)
        .map(|i| {
            let y_mid = params.y_i + (i as f64 + 0.5) * dy;
            StepCoeffs::at(i, y_mid, dy, params.x)
        })
        .collect();
    Ok(CoeffSchedule { params, steps })
}
