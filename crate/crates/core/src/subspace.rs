//! Exact 4×4 matrix-Trotter evolution on the physical subspace.
//!
//! Basis order is `|0101>, |1001>, |0110>, |1010>`, i.e. vacuum, one `+k`
//! quantum, one `-k` quantum, and the pair.

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::schedule::{CoeffSchedule, StepCoeffs};

/// Physical basis labels, in amplitude order.
pub const PHYS_LABELS: [&str; 4] = ["0101", "1001", "0110", "1010"];

/// Occupation `Z_phys = diag(0, 1, 1, 2)`.
pub const OCCUPATION: [f64; 4] = [0.0, 1.0, 1.0, 2.0];

pub const VAC: usize = 0;
pub const PLUS: usize = 1;
pub const MINUS: usize = 2;
pub const PAIR: usize = 3;

pub type Unitary4 = Matrix4<Complex64>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysState {
    pub amplitudes: [Complex64; 4],
}

impl PhysState {
    pub fn vacuum() -> Self {
        Self::basis(VAC)
    }

    pub fn basis(index: usize) -> Self {
        let mut amplitudes = [Complex64::new(0.0, 0.0); 4];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn populations(&self) -> [f64; 4] {
        self.amplitudes.map(|a| a.norm_sqr())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.populations().iter().sum()
    }

    pub fn apply(&mut self, u: &Unitary4) {
        let old = self.amplitudes;
        for (r, amp) in self.amplitudes.iter_mut().enumerate() {
            *amp = (0..4).map(|c| u[(r, c)] * old[c]).sum();
        }
    }
}

/// Generator matrices on the physical subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysOperators {
    pub z_phys: Matrix4<f64>,
    pub a_phys: Matrix4<f64>,
}

impl PhysOperators {
    pub fn new() -> Self {
        let z_phys = Matrix4::from_diagonal(&nalgebra::Vector4::from(OCCUPATION));
        let mut a_phys = Matrix4::zeros();
        a_phys[(VAC, PAIR)] = 1.0;
        a_phys[(PAIR, VAC)] = 1.0;
        Self { z_phys, a_phys }
    }
}

impl Default for PhysOperators {
    fn default() -> Self {
        Self::new()
    }
}

/// One Strang step `e^{-iθ_z Z} e^{-iθ_a A} e^{-iθ_z Z}`, using the closed
/// forms for the diagonal `Z` and for `A` (whose square is a projector).
pub fn strang_step_unitary(step: &StepCoeffs) -> Unitary4 {
    let angles = step.strang_angles();
    let half = OCCUPATION.map(|n| Complex64::from_polar(1.0, -angles.theta_z_half * n));

    let (s, c) = angles.theta_a.sin_cos();
    let mut mix = Unitary4::identity();
    mix[(VAC, VAC)] = Complex64::new(c, 0.0);
    mix[(PAIR, PAIR)] = Complex64::new(c, 0.0);
    mix[(VAC, PAIR)] = Complex64::new(0.0, -s);
    mix[(PAIR, VAC)] = Complex64::new(0.0, -s);

    Unitary4::from_fn(|r, col| half[r] * mix[(r, col)] * half[col])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub y: f64,
    pub p_vac: f64,
    pub p_plus: f64,
    pub p_minus: f64,
    pub p_pair: f64,
}

impl TrajectoryRow {
    fn new(y: f64, state: &PhysState) -> Self {
        let p = state.populations();
        Self {
            y,
            p_vac: p[VAC],
            p_plus: p[PLUS],
            p_minus: p[MINUS],
            p_pair: p[PAIR],
        }
    }
}

/// Populations at every grid point, starting with the initial state at `y_i`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Trajectory {
    pub rows: Vec<TrajectoryRow>,
}

impl Trajectory {
    pub const CSV_HEADER: &'static str = "y,p_vac,p_plus,p_minus,p_pair";
}

/// Applies `steps` in order (step 0 acts first) starting at `y_start`.
pub fn evolve_steps(
    steps: &[StepCoeffs],
    y_start: f64,
    initial: PhysState,
) -> (PhysState, Trajectory) {
    let mut state = initial;
    let mut rows = Vec::with_capacity(steps.len() + 1);
    rows.push(TrajectoryRow::new(y_start, &state));
    for step in steps {
        state.apply(&strang_step_unitary(step));
        rows.push(TrajectoryRow::new(step.y_mid + step.dy / 2.0, &state));
    }
    (state, Trajectory { rows })
}

pub fn evolve(schedule: &CoeffSchedule, initial: PhysState) -> (PhysState, Trajectory) {
    evolve_steps(&schedule.steps, schedule.params.y_i, initial)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleNumber {
    pub n_plus: f64,
    pub n_minus: f64,
    pub p_pair: f64,
}

pub fn particle_number(state: &PhysState) -> ParticleNumber {
    let p = state.populations();
    ParticleNumber {
        n_plus: p[PLUS] + p[PAIR],
        n_minus: p[MINUS] + p[PAIR],
        p_pair: p[PAIR],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::background::ModeParams;
    use crate::schedule::build_schedule;

    fn max_abs(m: &Unitary4) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Truncated Taylor series; independent of the closed forms above.
    fn expm_series(h: &Unitary4, t: f64) -> Unitary4 {
        let gen = h * Complex64::new(0.0, -t);
        let mut term = Unitary4::identity();
        let mut sum = Unitary4::identity();
        for k in 1..60 {
            term = term * gen / Complex64::new(k as f64, 0.0);
            sum += term;
        }
        sum
    }

    fn complexify(m: &Matrix4<f64>) -> Unitary4 {
        m.map(|v| Complex64::new(v, 0.0))
    }

    #[test]
    fn operator_properties() {
        let ops = PhysOperators::new();
        assert_eq!(ops.z_phys, ops.z_phys.transpose());
        assert_eq!(ops.a_phys, ops.a_phys.transpose());
        let a2 = ops.a_phys * ops.a_phys;
        assert_eq!(
            a2,
            Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 0.0, 0.0, 1.0))
        );
        let comm = ops.z_phys * ops.a_phys - ops.a_phys * ops.z_phys;
        assert!(comm.abs().max() > 0.5);
    }

    #[test]
    fn zero_angles_give_identity() {
        let step = StepCoeffs::at(0, -10.0, 0.0, 2.0);
        assert!(max_abs(&(strang_step_unitary(&step) - Unitary4::identity())) < 1e-15);
    }

    #[test]
    fn closed_form_matches_series_exponential() {
        let ops = PhysOperators::new();
        let z = complexify(&ops.z_phys);
        let a = complexify(&ops.a_phys);
        for &(y_mid, dy) in &[(-30.0, 0.4), (-3.1, 0.9), (-1.0, 0.3), (-2.5, 1.7)] {
            let step = StepCoeffs::at(0, y_mid, dy, 2.0);
            let ang = step.strang_angles();
            let oracle = expm_series(&z, ang.theta_z_half)
                * expm_series(&a, ang.theta_a)
                * expm_series(&z, ang.theta_z_half);
            let u = strang_step_unitary(&step);
            assert!(max_abs(&(u - oracle)) < 1e-13);
            assert!(max_abs(&(u.adjoint() * u - Unitary4::identity())) < 1e-14);
        }
    }

    #[test]
    fn pair_population_is_sin_squared() {
        for &(y_mid, dy) in &[(-5.0, 3.0), (-2.5, 20.0), (-40.0, 80.0)] {
            let step = StepCoeffs::at(0, y_mid, dy, 2.0);
            let mut s = PhysState::vacuum();
            s.apply(&strang_step_unitary(&step));
            let expected = step.strang_angles().theta_a.sin().powi(2);
            assert!((s.populations()[PAIR] - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn single_step_hardware_value() {
        let schedule = build_schedule(ModeParams::with_default_grid(1.3, 1).unwrap()).unwrap();
        let (fin, traj) = evolve(&schedule, PhysState::vacuum());
        let p = particle_number(&fin).p_pair;
        assert!((p - 0.051332f64.sin().powi(2)).abs() < 1e-6);
        assert_eq!(format!("{p:.4}"), "0.0026");
        assert_eq!(traj.rows.len(), 2);
    }

    #[test]
    fn identity_step_leaves_state() {
        let step = StepCoeffs::at(0, -10.0, 0.0, 2.0);
        let init = PhysState::vacuum();
        let (fin, _) = evolve_steps(&[step], -10.0, init);
        assert_eq!(fin, init);
    }

    #[test]
    fn particle_number_examples() {
        let pn = particle_number(&PhysState::basis(PAIR));
        assert_eq!((pn.n_plus, pn.n_minus, pn.p_pair), (1.0, 1.0, 1.0));
        let pn = particle_number(&PhysState::vacuum());
        assert_eq!((pn.n_plus, pn.n_minus, pn.p_pair), (0.0, 0.0, 0.0));
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let sup = PhysState {
            amplitudes: [h, zero, zero, h],
        };
        let pn = particle_number(&sup);
        for v in [pn.n_plus, pn.n_minus, pn.p_pair] {
            assert!((v - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn long_evolution_invariants() {
        let schedule = build_schedule(ModeParams::with_default_grid(2.0, 2500).unwrap()).unwrap();
        let (fin, traj) = evolve(&schedule, PhysState::vacuum());
        assert!((fin.norm_sqr() - 1.0).abs() < 1e-10);
        assert_eq!(traj.rows.len(), 2501);
        for row in &traj.rows {
            assert!((row.p_vac + row.p_plus + row.p_minus + row.p_pair - 1.0).abs() < 1e-10);
            assert!(row.p_plus < 1e-12 && row.p_minus < 1e-12);
        }
        let pn = particle_number(&fin);
        assert!((pn.n_plus - pn.p_pair).abs() < 1e-12);
        // truncation plus the straddling slice leave this ~6.6% below 1/(4x^4) at x = 2
        assert!((pn.p_pair / 0.015625 - 1.0).abs() < 0.1);
        assert!((traj.rows.last().unwrap().y - schedule.params.y_f).abs() < 1e-9);
    }

    #[test]
    fn trajectory_rises_through_transition() {
        let x = 1.5;
        let schedule = build_schedule(ModeParams::with_default_grid(x, 2500).unwrap()).unwrap();
        let (_, traj) = evolve(&schedule, PhysState::vacuum());
        let at = |y: f64| {
            traj.rows
                .iter()
                .min_by(|a, b| (a.y - y).abs().total_cmp(&(b.y - y).abs()))
                .unwrap()
                .p_pair
        };
        let plateau = 0.25 / x.powi(4);
        // early de Sitter: negligible
        assert!(at(-40.0) < 0.01 * plateau);
        // most growth happens in the last few units before the transition
        assert!(at(-6.0) < 0.5 * plateau);
        assert!(at(-1.5) > at(-3.0));
        let final_p = traj.rows.last().unwrap().p_pair;
        // radiation era keeps the occupation fixed
        assert!((at(-1.0) - final_p).abs() < 1e-12);
        assert!((final_p / plateau - 1.0).abs() < 0.1);
    }

    #[test]
    fn second_order_convergence_on_aligned_grids() {
        // x = 3 with y_i = -80, y_f = -1: N a multiple of 79 puts y_e on a grid point.
        let x = 3.0;
        let p = |n: usize| {
            let s = build_schedule(ModeParams::with_default_grid(x, n).unwrap()).unwrap();
            particle_number(&evolve(&s, PhysState::vacuum()).0).p_pair
        };
        let ns = [79 * 4, 79 * 8, 79 * 16, 79 * 32, 79 * 64];
        let ps: Vec<f64> = ns.iter().map(|&n| p(n)).collect();
        // |P(N) - P(2N)| drops by ~4 per doubling, |P(N) - P(4N)| by ~16 per quadrupling
        let d2: Vec<f64> = ps.windows(2).map(|w| (w[0] - w[1]).abs()).collect();
        for w in d2.windows(2) {
            let ratio = w[0] / w[1];
            assert!((3.5..4.5).contains(&ratio), "doubling ratio {ratio}");
        }
        let d4_coarse = (ps[0] - ps[2]).abs();
        let d4_fine = (ps[2] - ps[4]).abs();
        let ratio = d4_coarse / d4_fine;
        assert!((14.0..18.0).contains(&ratio), "quadrupling ratio {ratio}");
    }
}
