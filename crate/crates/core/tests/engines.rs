//! Cross-checks between the synthesized circuits, the dense Pauli algebra
//! and the 4×4 matrix engine.

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use pairsim::background::ModeParams;
use pairsim::encoding::{
    build_full_circuit, pauli_to_matrix, synthesize_pauli_rotation, Generators, PauliString,
    PauliSum, PHYS_INDICES,
};
use pairsim::schedule::{build_schedule, StepCoeffs};
use pairsim::statevector::{circuit_unitary, run_circuit, MINUS_ONLY, PLUS_ONLY};
use pairsim::subspace::{evolve, particle_number, PhysState};
use pairsim::verify::{engine_gap, step_equivalence_error};

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `e^{-iθP} = cos θ · I - i sin θ · P` for a Pauli string `P`.
fn dense_rotation(letters: &str, theta: f64) -> DMatrix<Complex64> {
    let p = pauli_to_matrix(&PauliSum::new(vec![PauliString::new(letters, 1.0)]), 4).unwrap();
    let id = DMatrix::<Complex64>::identity(16, 16);
    id * Complex64::new(theta.cos(), 0.0) + p * Complex64::new(0.0, -theta.sin())
}

#[test]
fn rotation_circuits_match_dense_exponentials() {
    let cases = [
        ("ZZII", std::f64::consts::FRAC_PI_2),
        ("XXXX", 0.1),
        ("XYYX", -0.7),
        ("YIZX", 1.3),
        ("IIIY", 0.25),
        ("ZIIZ", -2.9),
    ];
    for (letters, theta) in cases {
        let c = synthesize_pauli_rotation(&PauliString::new(letters, 1.0), theta, 4).unwrap();
        let err = max_abs(&(circuit_unitary(&c).unwrap() - dense_rotation(letters, theta)));
        assert!(err < 1e-12, "{letters} at {theta}: {err:e}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn synthesized_steps_match_strang_unitaries(
        x in 1.0f64..5.0,
        y_mid in -79.0f64..2.0,
        dy in 0.0f64..3.0,
    ) {
        let step = StepCoeffs::at(0, y_mid, dy, x);
        let (dist, leak) = step_equivalence_error(&Generators::default(), &step).unwrap();
        prop_assert!(dist < 1e-10, "distance {dist:e}");
        prop_assert!(leak < 1e-12, "leakage {leak:e}");
    }
}

#[test]
fn engines_agree_across_step_counts() {
    let gens = Generators::default();
    for n in [1, 5, 10, 20, 100, 1000] {
        let schedule = build_schedule(ModeParams::with_default_grid(2.0, n).unwrap()).unwrap();
        let gap = engine_gap(&gens, &schedule).unwrap();
        assert!(gap < 1e-10, "N={n}: {gap:e}");
    }
}

#[test]
fn noiseless_runs_stay_in_the_physical_subspace() {
    for (x, n) in [(1.3, 1), (2.0, 100), (3.0, 400)] {
        let schedule = build_schedule(ModeParams::with_default_grid(x, n).unwrap()).unwrap();
        let probs = run_circuit(&build_full_circuit(&schedule.steps).unwrap())
            .unwrap()
            .probability_vector();
        let outside: f64 = probs
            .iter()
            .enumerate()
            .filter(|(i, _)| !PHYS_INDICES.contains(i))
            .map(|(_, p)| p)
            .sum();
        assert!(outside < 1e-10, "x={x} N={n}: leakage {outside:e}");
        let idx = |s: &str| usize::from_str_radix(s, 2).unwrap();
        assert!(probs[idx(PLUS_ONLY)] < 1e-12);
        assert!(probs[idx(MINUS_ONLY)] < 1e-12);

        let (phys, _) = evolve(&schedule, PhysState::vacuum());
        let pn = particle_number(&phys);
        assert!((pn.n_plus - pn.p_pair).abs() < 1e-12);
        assert!((pn.n_minus - pn.p_pair).abs() < 1e-12);
    }
}

#[test]
fn pair_block_alone_preserves_the_physical_subspace() {
    let gens = Generators::default();
    for theta in [0.05, 0.5, 1.7] {
        let mut c = pairsim::circuit::Circuit::new(4).unwrap();
        for term in gens.a.non_identity() {
            c.append(&synthesize_pauli_rotation(term, theta * term.coeff, 4).unwrap())
                .unwrap();
        }
        let u = circuit_unitary(&c).unwrap();
        for &col in &PHYS_INDICES {
            for row in 0..16 {
                if !PHYS_INDICES.contains(&row) {
                    assert!(u[(row, col)].norm() < 1e-12);
                }
            }
        }
        // vacuum -> cos θ |vac> - i sin θ |pair>
        let vac = PHYS_INDICES[0];
        let pair = PHYS_INDICES[3];
        assert!((u[(vac, vac)] - Complex64::new(theta.cos(), 0.0)).norm() < 1e-12);
        assert!((u[(pair, vac)] - Complex64::new(0.0, -theta.sin())).norm() < 1e-12);
    }
}
