//! Adaptive Dormand–Prince 5(4) integrator for small fixed-size real systems.
//!
//! Only what the Bogoliubov oracle needs: integrate `y' = f(t, y)` from `t0`
//! to `t1`, landing exactly on `t1`.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

// Difference between the 5th- and 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const MAX_STEPS: usize = 10_000_000;

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
}

/// Integrates from `t0` to `t1` (either direction is fine as long as `t1 > t0`).
pub fn integrate<const N: usize, F>(
    f: F,
    t0: f64,
    t1: f64,
    y0: [f64; N],
    tol: Tolerance,
) -> Result<([f64; N], Stats)>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    if !(t1 > t0) {
        return Err(Error::Integration(format!(
            "empty or reversed interval [{t0}, {t1}]"
        )));
    }
    let mut stats = Stats::default();
    let mut t = t0;
    let mut y = y0;
    let mut k = [[0.0; N]; 7];
    k[0] = f(t, &y);

    let span = t1 - t0;
    let mut h = (span * 1e-3).min(0.01);
    let min_h = span * 1e-15;

    while t < t1 {
        if stats.accepted + stats.rejected > MAX_STEPS {
            return Err(Error::Integration(format!(
                "step budget exhausted at t = {t}"
            )));
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }

        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..N {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            k[s] = f(t + C[s] * h, &ys);
        }

        // Stage 7 was evaluated at the 5th-order solution (FSAL).
        let mut y_new = y;
        for (j, a) in A[6].iter().enumerate() {
            for i in 0..N {
                y_new[i] += h * a * k[j][i];
            }
        }

        let mut err_sq = 0.0;
        for i in 0..N {
            let mut e = 0.0;
            for (j, ej) in E.iter().enumerate() {
                e += ej * k[j][i];
            }
            e *= h;
            let scale = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
            err_sq += (e / scale).powi(2);
        }
        let err = (err_sq / N as f64).sqrt();
        if !err.is_finite() {
            return Err(Error::Integration(format!("non-finite error at t = {t}")));
        }

        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };

        if err <= 1.0 {
            stats.accepted += 1;
            t = if last { t1 } else { t + h };
            y = y_new;
            k[0] = k[6];
            h *= factor;
        } else {
            stats.rejected += 1;
            h *= factor.min(1.0);
            if h < min_h {
                return Err(Error::Integration(format!(
                    "step size underflow at t = {t}"
                )));
            }
        }
    }
    Ok((y, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_one_period() {
        let tol = Tolerance {
            rtol: 1e-12,
            atol: 1e-12,
        };
        let two_pi = 2.0 * std::f64::consts::PI;
        let (y, stats) = integrate(
            |_, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            two_pi,
            [1.0, 0.0],
            tol,
        )
        .unwrap();
        assert!((y[0] - 1.0).abs() < 1e-10, "{y:?}");
        assert!(y[1].abs() < 1e-10, "{y:?}");
        assert!(stats.accepted > 10);
    }

    #[test]
    fn exponential_growth() {
        let tol = Tolerance {
            rtol: 1e-11,
            atol: 1e-14,
        };
        let (y, _) = integrate(|_, y: &[f64; 1]| [y[0]], 0.0, 3.0, [1.0], tol).unwrap();
        assert!((y[0] / 3f64.exp() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_reversed_interval() {
        let tol = Tolerance {
            rtol: 1e-8,
            atol: 1e-8,
        };
        assert!(integrate(|_, y: &[f64; 1]| *y, 1.0, 0.0, [1.0], tol).is_err());
    }
}
