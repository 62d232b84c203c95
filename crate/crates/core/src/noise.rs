//! Synthetic device noise: stochastic Pauli errors after gates and
//! independent per-qubit readout flips.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::statevector::{self, bitstring, index_of, CountsTable, Distribution, StateVector};

/// Median two-qubit error rate of the reference device calibration.
pub const DEFAULT_P2: f64 = 2.80e-3;
/// Median readout error of the reference device calibration.
pub const DEFAULT_READOUT_FLIP: f64 = 1.49e-2;

/// Upper bound on cached prefix states (in amplitudes) for the trajectory sampler.
const PREFIX_CACHE_LIMIT: usize = 1 << 24;

/// `readout[q][observed][true]` is column-stochastic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub readout: Vec<[[f64; 2]; 2]>,
    pub p1: f64,
    pub p2: f64,
}

impl NoiseModel {
    pub fn ideal(n_qubits: usize) -> Self {
        Self {
            readout: vec![[[1.0, 0.0], [0.0, 1.0]]; n_qubits],
            p1: 0.0,
            p2: 0.0,
        }
    }

    pub fn symmetric(n_qubits: usize, flip: f64, p1: f64, p2: f64) -> Self {
        Self {
            readout: vec![[[1.0 - flip, flip], [flip, 1.0 - flip]]; n_qubits],
            p1,
            p2,
        }
    }

    /// Calibration-scale defaults; `p1 = p2 / 10`.
    pub fn device_default(n_qubits: usize) -> Self {
        Self::symmetric(
            n_qubits,
            DEFAULT_READOUT_FLIP,
            DEFAULT_P2 / 10.0,
            DEFAULT_P2,
        )
    }

    pub fn n_qubits(&self) -> usize {
        self.readout.len()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidNoiseModel(m));
        if self.readout.is_empty() {
            return bad("no readout matrices".into());
        }
        for (name, p) in [("p1", self.p1), ("p2", self.p2)] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} = {p} is not a probability"));
            }
        }
        for (q, c) in self.readout.iter().enumerate() {
            for col in 0..2 {
                for row in 0..2 {
                    if !(0.0..=1.0).contains(&c[row][col]) {
                        return bad(format!("qubit {q}: entry [{row}][{col}] = {}", c[row][col]));
                    }
                }
                let sum = c[0][col] + c[1][col];
                if (sum - 1.0).abs() > 1e-12 {
                    return bad(format!("qubit {q}: column {col} sums to {sum}"));
                }
            }
        }
        Ok(())
    }

    pub fn has_gate_noise(&self) -> bool {
        self.p1 > 0.0 || self.p2 > 0.0
    }

    pub fn has_readout_noise(&self) -> bool {
        self.readout
            .iter()
            .any(|c| c[0][0] != 1.0 || c[1][1] != 1.0)
    }

    pub fn is_noiseless(&self) -> bool {
        !self.has_gate_noise() && !self.has_readout_noise()
    }

    /// Gate error rates multiplied by `factor`; readout is left alone.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let scaled = Self {
            readout: self.readout.clone(),
            p1: self.p1 * factor,
            p2: self.p2 * factor,
        };
        scaled.validate()?;
        Ok(scaled)
    }

    /// `P(observed | true)` for whole registers.
    pub fn assignment_probability(&self, observed: usize, truth: usize) -> f64 {
        let n = self.n_qubits();
        self.readout
            .iter()
            .enumerate()
            .map(|(q, c)| {
                let shift = n - 1 - q;
                c[(observed >> shift) & 1][(truth >> shift) & 1]
            })
            .product()
    }
}

/// SplitMix64 finalizer, used to derive independent sub-seeds.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn dense(probs: &Distribution, n: usize) -> Result<Vec<f64>> {
    let mut v = vec![0.0; 1 << n];
    for (k, &p) in probs {
        if k.len() != n {
            return Err(Error::InvalidDistribution(format!(
                "bitstring {k:?} does not have {n} bits"
            )));
        }
        v[index_of(k)?] = p;
    }
    Ok(v)
}

/// `(⊗_q C_q) · p` over all `2^n` outcomes.
pub fn apply_readout_noise(probs: &Distribution, model: &NoiseModel) -> Result<Distribution> {
    model.validate()?;
    let n = model.n_qubits();
    let mut v = dense(probs, n)?;
    for (q, c) in model.readout.iter().enumerate() {
        let mask = 1usize << (n - 1 - q);
        for i in 0..v.len() {
            if i & mask == 0 {
                let (t0, t1) = (v[i], v[i | mask]);
                v[i] = c[0][0] * t0 + c[0][1] * t1;
                v[i | mask] = c[1][0] * t0 + c[1][1] * t1;
            }
        }
    }
    Ok(v.into_iter()
        .enumerate()
        .map(|(i, p)| (bitstring(i, n), p))
        .collect())
}

fn inject_pauli(state: &mut StateVector, q: usize, which: u8) -> Result<()> {
    // 1 = X, 2 = Y, 3 = Z; Y is applied as X·Z up to a global phase.
    if which == 1 || which == 2 {
        state.apply_gate(&Gate::X(q))?;
    }
    if which == 2 || which == 3 {
        state.apply_gate(&Gate::Rz(q, std::f64::consts::PI))?;
    }
    Ok(())
}

fn maybe_fault<R: Rng>(
    rng: &mut R,
    gate: &Gate,
    model: &NoiseModel,
) -> Option<(usize, u8, Option<(usize, u8)>)> {
    match *gate {
        Gate::Cnot { control, target } => {
            if model.p2 > 0.0 && rng.gen::<f64>() < model.p2 {
                // uniform over the 15 non-identity two-qubit Paulis
                let k = rng.gen_range(1u8..16);
                Some((control, k / 4, Some((target, k % 4))))
            } else {
                None
            }
        }
        _ => {
            let q = gate.qubits()[0];
            if model.p1 > 0.0 && rng.gen::<f64>() < model.p1 {
                Some((q, rng.gen_range(1u8..4), None))
            } else {
                None
            }
        }
    }
}

fn apply_fault(state: &mut StateVector, fault: (usize, u8, Option<(usize, u8)>)) -> Result<()> {
    let (q, a, second) = fault;
    if a != 0 {
        inject_pauli(state, q, a)?;
    }
    if let Some((q2, b)) = second {
        if b != 0 {
            inject_pauli(state, q2, b)?;
        }
    }
    Ok(())
}

fn cumulative(probs: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut cdf: Vec<f64> = probs
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect();
    let total = acc;
    for c in &mut cdf {
        *c /= total;
    }
    if let Some(last) = cdf.last_mut() {
        *last = 1.0;
    }
    cdf
}

fn draw<R: Rng>(cdf: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

fn readout<R: Rng>(truth: usize, model: &NoiseModel, rng: &mut R) -> usize {
    let n = model.n_qubits();
    let mut observed = truth;
    for (q, c) in model.readout.iter().enumerate() {
        let mask = 1usize << (n - 1 - q);
        let bit = usize::from(truth & mask != 0);
        let p_one = c[1][bit];
        let one = if p_one <= 0.0 {
            false
        } else if p_one >= 1.0 {
            true
        } else {
            rng.gen::<f64>() < p_one
        };
        if one {
            observed |= mask;
        } else {
            observed &= !mask;
        }
    }
    observed
}

/// Monte-Carlo trajectories with stochastic Pauli faults and readout flips.
///
/// Shot `s` draws from its own ChaCha20 stream (`seed`, stream `s`), so the
/// result does not depend on how shots are split across threads. A model
/// with no noise at all delegates to [`statevector::sample_counts`] with the
/// same seed.
pub fn run_noisy_circuit(
    circuit: &Circuit,
    model: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<CountsTable> {
    model.validate()?;
    let n = circuit.n_qubits();
    if model.n_qubits() != n {
        return Err(Error::InvalidNoiseModel(format!(
            "model covers {} qubits, circuit has {n}",
            model.n_qubits()
        )));
    }
    if shots == 0 {
        return Err(Error::InvalidDistribution(
            "shots must be at least 1".into(),
        ));
    }
    if model.is_noiseless() {
        let ideal = statevector::run_circuit(circuit)?;
        return statevector::sample_counts(&ideal.probabilities(), shots, seed);
    }

    // Ideal state after each gate; a faulty shot resumes from its first fault.
    let gates = circuit.gates();
    let mut prefix = Vec::new();
    let mut state = StateVector::zero(n)?;
    let cache = gates.len().saturating_mul(1 << n) <= PREFIX_CACHE_LIMIT;
    for g in gates {
        state.apply_gate(g)?;
        if cache {
            prefix.push(state.clone());
        }
    }
    let ideal_cdf = cumulative(&state.probability_vector());

    let base = ChaCha20Rng::seed_from_u64(seed);
    let shot = |s: u64| -> Result<usize> {
        let mut rng = base.clone();
        rng.set_stream(s);
        rng.set_word_pos(0);

        let mut first = None;
        if model.has_gate_noise() {
            for (k, g) in gates.iter().enumerate() {
                if let Some(f) = maybe_fault(&mut rng, g, model) {
                    first = Some((k, f));
                    break;
                }
            }
        }
        let truth = match first {
            None => draw(&ideal_cdf, &mut rng),
            Some((k, fault)) => {
                let mut s = if cache {
                    prefix[k].clone()
                } else {
                    let mut s = StateVector::zero(n)?;
                    for g in &gates[..=k] {
                        s.apply_gate(g)?;
                    }
                    s
                };
                apply_fault(&mut s, fault)?;
                for g in &gates[k + 1..] {
                    s.apply_gate(g)?;
                    if let Some(f) = maybe_fault(&mut rng, g, model) {
                        apply_fault(&mut s, f)?;
                    }
                }
                draw(&cumulative(&s.probability_vector()), &mut rng)
            }
        };
        Ok(readout(truth, model, &mut rng))
    };

    let dim = 1usize << n;
    let tally = (0..shots)
        .into_par_iter()
        .try_fold(
            || vec![0u64; dim],
            |mut acc, s| {
                acc[shot(s)?] += 1;
                Ok::<_, Error>(acc)
            },
        )
        .try_reduce(
            || vec![0u64; dim],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                Ok(a)
            },
        )?;

    let counts = tally
        .into_iter()
        .enumerate()
        .filter(|(_, c)| *c > 0)
        .map(|(i, c)| (bitstring(i, n), c))
        .collect();
    Ok(CountsTable {
        shots,
        seed,
        counts,
    })
}
