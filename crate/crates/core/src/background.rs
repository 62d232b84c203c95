//! De Sitter to radiation background in dimensionless units.
//!
//! Everything is expressed with `k = 1` and `H = 1`, so conformal time is
//! `y = k·eta` and the transition sits at `y_e = -x` with `x = |k·eta_e|`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{self, Tolerance};

pub const DEFAULT_Y_INITIAL: f64 = -80.0;

/// Conformal-time units simulated after the transition.
pub const DEFAULT_TAIL: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeParams {
    pub x: f64,
    pub y_i: f64,
    pub y_f: f64,
    pub n_steps: usize,
}

impl ModeParams {
    pub fn new(x: f64, y_i: f64, y_f: f64, n_steps: usize) -> Result<Self> {
        let params = Self {
            x,
            y_i,
            y_f,
            n_steps,
        };
        params.validate()?;
        Ok(params)
    }

    /// Grid from `y_i = -80` to two units past the transition.
    pub fn with_default_grid(x: f64, n_steps: usize) -> Result<Self> {
        Self::new(x, DEFAULT_Y_INITIAL, -x + DEFAULT_TAIL, n_steps)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if !(self.x.is_finite() && self.x > 0.0) {
            return bad(format!("x must be positive and finite, got {}", self.x));
        }
        if !(self.y_i.is_finite() && self.y_f.is_finite()) {
            return bad("grid bounds must be finite".into());
        }
        if !(self.y_i < -self.x && -self.x < self.y_f) {
            return bad(format!(
                "transition y_e = {} must lie strictly inside ({}, {})",
                -self.x, self.y_i, self.y_f
            ));
        }
        if self.n_steps == 0 {
            return bad("n_steps must be at least 1".into());
        }
        Ok(())
    }

    pub fn y_transition(&self) -> f64 {
        -self.x
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogoliubovPair {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl BogoliubovPair {
    /// `|alpha|^2 - |beta|^2`, which is 1 for a canonical transformation.
    pub fn wronskian(&self) -> f64 {
        self.alpha.norm_sqr() - self.beta.norm_sqr()
    }

    pub fn particle_number(&self) -> f64 {
        self.beta.norm_sqr()
    }
}

/// Scale factor `a(y)` with `a(y_e) = 1/x`; `a` and `a'` are continuous at `y = -x`.
pub fn scale_factor(y: f64, x: f64) -> Result<f64> {
    if !(y.is_finite() && x.is_finite() && x > 0.0) {
        return Err(Error::Domain { y, x });
    }
    if y <= -x {
        Ok(-1.0 / y)
    } else {
        Ok((2.0 + y / x) / x)
    }
}

/// `omega_k^2 / k^2`. At the matching point the radiation value is returned.
pub fn omega_squared(y: f64, x: f64) -> f64 {
    if y < -x {
        1.0 - 2.0 / (y * y)
    } else {
        1.0
    }
}

/// Closed-form sudden-matching coefficients.
pub fn bogoliubov_analytic(x: f64) -> BogoliubovPair {
    let x2 = x * x;
    BogoliubovPair {
        alpha: Complex64::new(1.0 - 0.5 / x2, 1.0 / x),
        beta: Complex64::from_polar(0.5 / x2, 2.0 * x),
    }
}

/// `n_k = 1 / (4 x^4)`.
pub fn n_k_analytic(x: f64) -> f64 {
    0.25 / x.powi(4)
}

/// Probability of two or more pairs in a two-mode squeezed state with mean
/// occupation `n_k`; the error the single-excitation truncation discards.
pub fn multi_pair_probability(n_k: f64) -> f64 {
    let r = n_k / (1.0 + n_k);
    r * r
}

/// Bunch–Davies mode `(1 - i/y) e^{-iy} / sqrt(2)` and its derivative.
fn bunch_davies(y: f64) -> (Complex64, Complex64) {
    let phase = Complex64::from_polar(std::f64::consts::FRAC_1_SQRT_2, -y);
    let v = phase * Complex64::new(1.0, -1.0 / y);
    let dv = phase * Complex64::new(-1.0 / y, 1.0 / (y * y) - 1.0);
    (v, dv)
}

/// Projects a radiation-era mode onto `(alpha e^{-iy} + beta e^{iy}) / sqrt(2)`.
fn extract(y: f64, v: Complex64, dv: Complex64) -> BogoliubovPair {
    let i = Complex64::i();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    BogoliubovPair {
        alpha: Complex64::from_polar(s, y) * (v + i * dv),
        beta: Complex64::from_polar(s, -y) * (v - i * dv),
    }
}

fn pack(v: Complex64, dv: Complex64) -> [f64; 4] {
    [v.re, v.im, dv.re, dv.im]
}

fn unpack(s: &[f64; 4]) -> (Complex64, Complex64) {
    (Complex64::new(s[0], s[1]), Complex64::new(s[2], s[3]))
}

/// Numerical Bogoliubov coefficients from integrating the mode equation.
///
/// The integration is split at `y = -x` so the jump in `a''/a` falls on a
/// step boundary. Coefficients are extracted at `y_e + 0.5` and `y_e + 1.5`
/// and must agree on `|beta|^2` to `10·tol` relative.
pub fn bogoliubov_ode_oracle(x: f64, y_i: f64, tol: f64) -> Result<BogoliubovPair> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::InvalidParams(format!("x must be positive, got {x}")));
    }
    if !(y_i <= -10.0 * x) {
        return Err(Error::InvalidParams(format!(
            "y_i = {y_i} is not deep in the de Sitter branch (need <= {})",
            -10.0 * x
        )));
    }
    if !(1e-12..=1e-6).contains(&tol) {
        return Err(Error::InvalidParams(format!(
            "tol = {tol} outside [1e-12, 1e-6]"
        )));
    }
    let local = (tol * 1e-2).max(1e-14);
    let tolerance = Tolerance {
        rtol: local,
        atol: local,
    };

    let de_sitter = |y: f64, s: &[f64; 4]| {
        let w2 = 1.0 - 2.0 / (y * y);
        [s[2], s[3], -w2 * s[0], -w2 * s[1]]
    };
    let radiation = |_: f64, s: &[f64; 4]| [s[2], s[3], -s[0], -s[1]];

    let y_e = -x;
    let (v0, dv0) = bunch_davies(y_i);
    let (at_transition, _) = ode::integrate(de_sitter, y_i, y_e, pack(v0, dv0), tolerance)?;

    let probe_1 = y_e + 0.5;
    let probe_2 = y_e + 1.5;
    let (s1, _) = ode::integrate(radiation, y_e, probe_1, at_transition, tolerance)?;
    let (s2, _) = ode::integrate(radiation, probe_1, probe_2, s1, tolerance)?;

    let (v1, dv1) = unpack(&s1);
    let (v2, dv2) = unpack(&s2);
    let first = extract(probe_1, v1, dv1);
    let second = extract(probe_2, v2, dv2);

    let b1 = first.particle_number();
    let b2 = second.particle_number();
    if (b1 - b2).abs() > 10.0 * tol * b1.abs().max(b2.abs()) {
        return Err(Error::ExtractionMismatch {
            first: b1,
            second: b2,
        });
    }
    Ok(second)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn scale_factor_examples() {
        assert!(close(scale_factor(-2.0, 2.0).unwrap(), 0.5, 1e-15));
        assert!(close(scale_factor(-4.0, 2.0).unwrap(), 0.25, 1e-15));
        assert!(close(scale_factor(-1.0, 2.0).unwrap(), 0.75, 1e-15));
    }

    #[test]
    fn scale_factor_rejects_bad_input() {
        assert!(scale_factor(f64::NAN, 2.0).is_err());
        assert!(scale_factor(-1.0, 0.0).is_err());
    }

    #[test]
    fn scale_factor_is_c1_at_transition() {
        let eps = 1e-6;
        for &x in &[0.7, 1.3, 2.0, 5.0] {
            let left = scale_factor(-x - eps, x).unwrap();
            let right = scale_factor(-x + eps, x).unwrap();
            assert!((left - right).abs() / left < 1e-4);

            // one-sided central differences on each branch
            let d_left = (scale_factor(-x - eps, x).unwrap()
                - scale_factor(-x - 3.0 * eps, x).unwrap())
                / (2.0 * eps);
            let d_right = (scale_factor(-x + 3.0 * eps, x).unwrap()
                - scale_factor(-x + eps, x).unwrap())
                / (2.0 * eps);
            assert!((d_left - d_right).abs() / d_right.abs() < 1e-4, "x={x}");
        }
    }

    #[test]
    fn omega_squared_examples() {
        assert!(close(omega_squared(-80.0, 2.0), 0.9996875, 1e-15));
        assert_eq!(omega_squared(-1.0, 2.0), 1.0);
        assert!(close(omega_squared(-2f64.sqrt(), 1.0), 0.0, 1e-15));
        // tie at the matching point goes to radiation
        assert_eq!(omega_squared(-2.0, 2.0), 1.0);
    }

    #[test]
    fn analytic_coefficients() {
        let b = bogoliubov_analytic(1.0);
        assert!(close(b.alpha.re, 0.5, 1e-15) && close(b.alpha.im, 1.0, 1e-15));
        assert!(close(b.beta.norm_sqr(), 0.25, 1e-15));
        assert!(close(b.wronskian(), 1.0, 1e-14));

        assert!(close(
            bogoliubov_analytic(2.0).beta.norm_sqr(),
            0.015625,
            1e-16
        ));

        let far = bogoliubov_analytic(1e6);
        assert!(far.beta.norm() < 1e-11);
        assert!((far.alpha - Complex64::new(1.0, 0.0)).norm() < 1e-5);
    }

    #[test]
    fn normalization_on_log_grid() {
        for i in 0..=40 {
            let x = 0.5 * 20f64.powf(i as f64 / 40.0);
            let b = bogoliubov_analytic(x);
            assert!(close(b.wronskian(), 1.0, 1e-12), "x={x}");
            assert!(close(b.particle_number(), n_k_analytic(x), 1e-14), "x={x}");
        }
    }

    #[test]
    fn particle_number_examples() {
        assert!(close(n_k_analytic(1.0), 0.25, 0.0));
        assert_eq!(format!("{:.4}", n_k_analytic(1.3)), "0.0875");
        assert_eq!(format!("{:.4}", n_k_analytic(2.2)), "0.0107");
        for &x in &[0.5, 1.0, 1.7, 3.0] {
            assert_eq!(n_k_analytic(x) / n_k_analytic(2.0 * x), 16.0);
        }
    }

    #[test]
    fn multi_pair_examples() {
        assert_eq!(multi_pair_probability(0.0), 0.0);
        assert!(close(
            multi_pair_probability(0.01),
            9.802960494069208e-5,
            1e-18
        ));
        assert!(close(multi_pair_probability(1.0), 0.25, 0.0));
    }

    #[test]
    fn mode_params_validation() {
        assert!(ModeParams::with_default_grid(2.0, 10).is_ok());
        assert!(ModeParams::with_default_grid(2.0, 0).is_err());
        assert!(ModeParams::with_default_grid(-1.0, 10).is_err());
        assert!(ModeParams::new(2.0, -80.0, -3.0, 10).is_err());
        assert!(ModeParams::new(100.0, -80.0, 0.0, 10).is_err());
    }

    #[test]
    fn bunch_davies_derivative_matches_finite_difference() {
        let y = -7.3;
        let h = 1e-5;
        let (_, dv) = bunch_davies(y);
        let fd = (bunch_davies(y + h).0 - bunch_davies(y - h).0) / (2.0 * h);
        assert!((dv - fd).norm() < 1e-9);
    }

    #[test]
    fn oracle_rejects_bad_arguments() {
        assert!(bogoliubov_ode_oracle(2.0, -10.0, 1e-10).is_err());
        assert!(bogoliubov_ode_oracle(2.0, -80.0, 1e-3).is_err());
        assert!(bogoliubov_ode_oracle(0.0, -80.0, 1e-10).is_err());
    }

    #[test]
    fn oracle_examples() {
        let b = bogoliubov_ode_oracle(2.0, -80.0, 1e-10).unwrap();
        assert!(close(b.particle_number(), 0.015625, 1e-9), "{b:?}");
        let b = bogoliubov_ode_oracle(1.0, -80.0, 1e-10).unwrap();
        assert!(close(b.alpha.norm_sqr(), 1.25, 1e-8), "{b:?}");
        let b = bogoliubov_ode_oracle(5.0, -80.0, 1e-10).unwrap();
        assert!(close(b.particle_number(), 4.0e-4, 1e-9), "{b:?}");
    }

    #[test]
    fn oracle_matches_closed_form() {
        for &x in &[1.0, 1.5, 2.0, 3.0, 5.0] {
            let numeric = bogoliubov_ode_oracle(x, -80.0, 1e-10).unwrap();
            let exact = bogoliubov_analytic(x);
            let rel = (numeric.particle_number() / exact.particle_number() - 1.0).abs();
            assert!(rel < 1e-6, "x={x} rel={rel}");
            assert!((numeric.beta - exact.beta).norm() < 1e-6 * exact.beta.norm().max(1e-3));
            assert!((numeric.wronskian() - 1.0).abs() < 1e-8);
        }
    }
}
