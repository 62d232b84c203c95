//! Fast self-checks run by the `verify` subcommand.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::background::{bogoliubov_ode_oracle, n_k_analytic, ModeParams};
use crate::encoding::{pauli_to_matrix, restrict_to_physical, Generators, PHYS_INDICES};
use crate::error::Result;
use crate::schedule::{build_schedule, CoeffSchedule, StepCoeffs};
use crate::statevector::{circuit_unitary, run_circuit};
use crate::subspace::{evolve, strang_step_unitary, PhysState};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> Vec<&'static str> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name)
            .collect()
    }

    pub fn render(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut out = String::new();
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("{mark}  {:width$}  {}\n", c.name, c.detail));
        }
        let n_ok = self.checks.iter().filter(|c| c.passed).count();
        out.push_str(&format!("{n_ok}/{} checks passed\n", self.checks.len()));
        out
    }
}

/// `max |A - e^{iφ} B|` with the phase `φ` that best aligns `B` to `A`.
pub fn distance_up_to_phase(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    let overlap: Complex64 = a.iter().zip(b.iter()).map(|(x, y)| y.conj() * x).sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - phase * y).norm())
        .fold(0.0, f64::max)
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest deviation of the restricted `Z_q`/`A_q` from `diag(0,1,1,2)` and the vacuum/pair swap.
pub fn embedding_error(gens: &Generators) -> Result<f64> {
    let z = restrict_to_physical(&pauli_to_matrix(&gens.z, 4)?);
    let a = restrict_to_physical(&pauli_to_matrix(&gens.a, 4)?);
    let mut z_ref = DMatrix::zeros(4, 4);
    let mut a_ref = DMatrix::zeros(4, 4);
    for (i, n) in [0.0, 1.0, 1.0, 2.0].into_iter().enumerate() {
        z_ref[(i, i)] = Complex64::new(n, 0.0);
    }
    a_ref[(0, 3)] = Complex64::new(1.0, 0.0);
    a_ref[(3, 0)] = Complex64::new(1.0, 0.0);
    Ok(max_abs(&(z - z_ref)).max(max_abs(&(a - a_ref))))
}

/// Largest commutator norm among the pair-generator terms.
pub fn commutation_error(gens: &Generators) -> Result<f64> {
    let mats = gens
        .a
        .terms
        .iter()
        .map(|t| pauli_to_matrix(&crate::encoding::PauliSum::new(vec![t.clone()]), 4))
        .collect::<Result<Vec<_>>>()?;
    let mut worst: f64 = 0.0;
    for i in 0..mats.len() {
        for j in i + 1..mats.len() {
            worst = worst.max(max_abs(&(&mats[i] * &mats[j] - &mats[j] * &mats[i])));
        }
    }
    Ok(worst)
}

/// Synthesized-step unitary on the physical block vs the 4×4 Strang step
/// (up to phase), plus the largest amplitude leaking out of the block.
pub fn step_equivalence_error(gens: &Generators, step: &StepCoeffs) -> Result<(f64, f64)> {
    let u = circuit_unitary(&gens.synthesize_step(step)?)?;
    let block = restrict_to_physical(&u);
    let reference = DMatrix::from_fn(4, 4, |r, c| strang_step_unitary(step)[(r, c)]);
    let mut leak: f64 = 0.0;
    for &col in &PHYS_INDICES {
        for row in 0..u.nrows() {
            if !PHYS_INDICES.contains(&row) {
                leak = leak.max(u[(row, col)].norm());
            }
        }
    }
    Ok((distance_up_to_phase(&block, &reference), leak))
}

/// Largest population difference between the matrix engine and the
/// statevector run of the synthesized circuit, over all 16 strings.
pub fn engine_gap(gens: &Generators, schedule: &CoeffSchedule) -> Result<f64> {
    let (phys, _) = evolve(schedule, PhysState::vacuum());
    let sv = run_circuit(&gens.build_full_circuit(&schedule.steps)?)?;
    let probs = sv.probability_vector();
    let pops = phys.populations();
    let mut gap: f64 = 0.0;
    for (i, p) in probs.iter().enumerate() {
        let expected = PHYS_INDICES
            .iter()
            .position(|&k| k == i)
            .map_or(0.0, |slot| pops[slot]);
        gap = gap.max((p - expected).abs());
    }
    Ok(gap)
}

fn check(name: &'static str, outcome: Result<(bool, String)>) -> CheckResult {
    match outcome {
        Ok((passed, detail)) => CheckResult {
            name,
            passed,
            detail,
        },
        Err(e) => CheckResult {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

pub fn run_checks(gens: &Generators) -> Report {
    let mut checks = Vec::new();

    checks.push(check(
        "embedding",
        (|| {
            let err = embedding_error(gens)?;
            Ok((err == 0.0, format!("max entry error {err:.3e}")))
        })(),
    ));

    checks.push(check(
        "commutation",
        (|| {
            let err = commutation_error(gens)?;
            Ok((err < 1e-14, format!("max |[P_i, P_j]| {err:.3e}")))
        })(),
    ));

    checks.push(check(
        "step-equivalence",
        (|| {
            let steps = [
                StepCoeffs::at(0, -39.65, 80.7, 1.3),
                StepCoeffs::at(0, -3.0, 0.7, 2.0),
                StepCoeffs::at(0, -1.0, 0.25, 2.0),
            ];
            let mut worst: f64 = 0.0;
            let mut leak: f64 = 0.0;
            for s in &steps {
                let (d, l) = step_equivalence_error(gens, s)?;
                worst = worst.max(d);
                leak = leak.max(l);
            }
            Ok((
                worst < 1e-10 && leak < 1e-12,
                format!("max phase-aligned distance {worst:.3e}, leakage {leak:.3e}"),
            ))
        })(),
    ));

    checks.push(check(
        "ode-oracle",
        (|| {
            let b = bogoliubov_ode_oracle(2.0, -80.0, 1e-10)?;
            let rel = (b.particle_number() / n_k_analytic(2.0) - 1.0).abs();
            Ok((rel < 1e-6, format!("x=2 |beta|^2 relative error {rel:.3e}")))
        })(),
    ));

    checks.push(check(
        "engine-equivalence",
        (|| {
            let schedule = build_schedule(ModeParams::with_default_grid(2.0, 10)?)?;
            let gap = engine_gap(gens, &schedule)?;
            Ok((
                gap < 1e-10,
                format!("x=2 N=10 max population gap {gap:.3e}"),
            ))
        })(),
    ));

    Report { checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_generators_pass() {
        let report = run_checks(&Generators::default());
        assert!(report.all_passed(), "{}", report.render());
        assert_eq!(report.render(), run_checks(&Generators::default()).render());
    }

    #[test]
    fn corrupted_z_coefficient_is_caught() {
        let mut gens = Generators::default();
        gens.z.terms[1].coeff = -0.2;
        let report = run_checks(&gens);
        assert!(!report.all_passed());
        assert!(report.failed().contains(&"embedding"));
        assert!(report.render().contains("FAIL  embedding"));
    }

    #[test]
    fn flipped_a_sign_is_caught() {
        let mut gens = Generators::default();
        gens.a.terms[2].coeff = 0.125;
        let report = run_checks(&gens);
        assert!(report.failed().contains(&"embedding"));
        assert!(report.failed().contains(&"step-equivalence"));
    }
}
