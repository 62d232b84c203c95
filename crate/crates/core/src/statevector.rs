//! Small dense statevector simulator, shot sampling, and encoded observables.
//!
//! Amplitude index bit `n-1-j` belongs to qubit `j`, so formatting an index
//! as an `n`-character binary string gives the ket label with qubit 0 first.
//!
//! Sampling uses ChaCha20 (`rand_chacha::ChaCha20Rng`) seeded through
//! `SeedableRng::seed_from_u64`, and draws `f64`s with the `rand` 0.8
//! `Standard` distribution (53 high bits of a `u64`). Both are
//! platform-independent, so counts tables are reproducible bit for bit.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, MAX_QUBITS};
use crate::error::{Error, Result};

/// Bitstring → probability (or quasi-probability), ordered lexicographically.
pub type Distribution = BTreeMap<String, f64>;

pub const VACUUM: &str = "0101";
pub const PLUS_ONLY: &str = "1001";
pub const MINUS_ONLY: &str = "0110";
pub const PAIR: &str = "1010";

/// Probabilities below this are treated as exact zeros before sampling.
pub const CLAMP_BELOW: f64 = 1e-15;

pub fn bitstring(index: usize, n_qubits: usize) -> String {
    format!("{index:0n_qubits$b}")
}

pub fn index_of(bits: &str) -> Result<usize> {
    usize::from_str_radix(bits, 2)
        .map_err(|_| Error::InvalidDistribution(format!("not a bitstring: {bits:?}")))
}

pub fn rng_from_seed(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0>` on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits {
                n_qubits,
                max: MAX_QUBITS,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = amplitudes.len();
        if n < 2 || !n.is_power_of_two() || n.trailing_zeros() as usize > MAX_QUBITS {
            return Err(Error::InvalidDistribution(format!(
                "{n} amplitudes is not a supported register size"
            )));
        }
        Ok(Self {
            n_qubits: n.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, bits: &str) -> Result<Complex64> {
        let i = index_of(bits)?;
        self.amplitudes
            .get(i)
            .copied()
            .ok_or_else(|| Error::InvalidDistribution(format!("{bits} out of range")))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn mask(&self, q: usize) -> usize {
        1 << (self.n_qubits - 1 - q)
    }

    fn apply_single(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        let mask = self.mask(q);
        for i in 0..self.amplitudes.len() {
            if i & mask == 0 {
                let j = i | mask;
                let (a0, a1) = (self.amplitudes[i], self.amplitudes[j]);
                self.amplitudes[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amplitudes[j] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn apply_diagonal(&mut self, q: usize, d0: Complex64, d1: Complex64) {
        let mask = self.mask(q);
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            *a *= if i & mask == 0 { d0 } else { d1 };
        }
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.check(self.n_qubits)?;
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::i();
        match *gate {
            Gate::X(q) => {
                let mask = self.mask(q);
                for k in 0..self.amplitudes.len() {
                    if k & mask == 0 {
                        self.amplitudes.swap(k, k | mask);
                    }
                }
            }
            Gate::H(q) => {
                let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                self.apply_single(q, [[h, h], [h, -h]]);
            }
            Gate::S(q) => self.apply_diagonal(q, one, i),
            Gate::Sdg(q) => self.apply_diagonal(q, one, -i),
            Gate::Rz(q, theta) => self.apply_diagonal(
                q,
                Complex64::from_polar(1.0, -theta / 2.0),
                Complex64::from_polar(1.0, theta / 2.0),
            ),
            Gate::Rx(q, theta) => {
                let (s, c) = (theta / 2.0).sin_cos();
                let c = Complex64::new(c, 0.0);
                let s = Complex64::new(0.0, -s);
                self.apply_single(q, [[c, s], [s, c]]);
            }
            Gate::Cnot { control, target } => {
                let cm = self.mask(control);
                let tm = self.mask(target);
                for k in 0..self.amplitudes.len() {
                    if k & cm != 0 && k & tm == 0 {
                        self.amplitudes.swap(k, k | tm);
                    }
                }
            }
        }
        Ok(())
    }

    /// Dense per-index probabilities.
    pub fn probability_vector(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn probabilities(&self) -> Distribution {
        self.probability_vector()
            .into_iter()
            .enumerate()
            .map(|(i, p)| (bitstring(i, self.n_qubits), p))
            .collect()
    }
}

pub fn apply_gate(state: &mut StateVector, gate: &Gate) -> Result<()> {
    state.apply_gate(gate)
}

/// Runs `circuit` from `|0…0>`.
pub fn run_circuit(circuit: &Circuit) -> Result<StateVector> {
    let mut state = StateVector::zero(circuit.n_qubits())?;
    for g in circuit.gates() {
        state.apply_gate(g)?;
    }
    Ok(state)
}

pub fn probabilities(state: &StateVector) -> Distribution {
    state.probabilities()
}

/// Dense unitary of `circuit`, built column by column.
pub fn circuit_unitary(circuit: &Circuit) -> Result<DMatrix<Complex64>> {
    let n = circuit.n_qubits();
    let dim = 1usize << n;
    let mut u = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[col] = Complex64::new(1.0, 0.0);
        let mut s = StateVector::from_amplitudes(amps)?;
        for g in circuit.gates() {
            s.apply_gate(g)?;
        }
        for (row, a) in s.amplitudes.iter().enumerate() {
            u[(row, col)] = *a;
        }
    }
    Ok(u)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountsTable {
    pub shots: u64,
    pub seed: u64,
    pub counts: BTreeMap<String, u64>,
}

impl CountsTable {
    pub fn get(&self, bits: &str) -> u64 {
        self.counts.get(bits).copied().unwrap_or(0)
    }

    pub fn frequency(&self, bits: &str) -> f64 {
        self.get(bits) as f64 / self.shots as f64
    }

    pub fn frequencies(&self) -> Distribution {
        self.counts
            .iter()
            .map(|(k, &v)| (k.clone(), v as f64 / self.shots as f64))
            .collect()
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// `bitstring,count`, lexicographic, observed strings only.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bitstring,count\n");
        for (k, v) in &self.counts {
            out.push_str(&format!("{k},{v}\n"));
        }
        out
    }
}

/// Clamps tiny values, rejects real negatives, renormalizes.
fn sanitize(probs: &Distribution) -> Result<Vec<(String, f64)>> {
    if probs.is_empty() {
        return Err(Error::InvalidDistribution("empty distribution".into()));
    }
    let mut total = 0.0;
    let mut out = Vec::with_capacity(probs.len());
    for (k, &p) in probs {
        if !p.is_finite() || p < -1e-12 {
            return Err(Error::InvalidDistribution(format!("P({k}) = {p}")));
        }
        let p = if p < CLAMP_BELOW { 0.0 } else { p };
        total += p;
        out.push((k.clone(), p));
    }
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution(format!(
            "probabilities sum to {total}"
        )));
    }
    for (_, p) in &mut out {
        *p /= total;
    }
    Ok(out)
}

/// Inverse-CDF sampler over a fixed outcome list.
struct Sampler {
    keys: Vec<String>,
    cdf: Vec<f64>,
}

impl Sampler {
    fn new(probs: &Distribution) -> Result<Self> {
        let clean = sanitize(probs)?;
        let mut keys = Vec::new();
        let mut cdf = Vec::new();
        let mut acc = 0.0;
        for (k, p) in clean {
            if p > 0.0 {
                acc += p;
                keys.push(k);
                cdf.push(acc);
            }
        }
        if let Some(last) = cdf.last_mut() {
            *last = 1.0;
        }
        Ok(Self { keys, cdf })
    }

    fn draw_index<R: Rng>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        self.cdf
            .partition_point(|&c| c <= u)
            .min(self.cdf.len() - 1)
    }
}

/// Multinomial draw of `shots` outcomes from `probs`.
pub fn sample_counts(probs: &Distribution, shots: u64, seed: u64) -> Result<CountsTable> {
    if shots == 0 {
        return Err(Error::InvalidDistribution(
            "shots must be at least 1".into(),
        ));
    }
    let sampler = Sampler::new(probs)?;
    let mut rng = rng_from_seed(seed);
    let mut tally = vec![0u64; sampler.keys.len()];
    for _ in 0..shots {
        tally[sampler.draw_index(&mut rng)] += 1;
    }
    let counts = sampler
        .keys
        .iter()
        .zip(tally)
        .filter(|(_, n)| *n > 0)
        .map(|(k, n)| (k.clone(), n))
        .collect();
    Ok(CountsTable {
        shots,
        seed,
        counts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub n_plus: f64,
    pub n_minus: f64,
    pub p_pair: f64,
    pub leakage: f64,
    pub stderr_pair: f64,
}

impl Observables {
    /// From (quasi-)probabilities; `shots` only feeds the binomial error.
    pub fn from_distribution(dist: &Distribution, shots: Option<u64>) -> Self {
        let p = |k: &str| dist.get(k).copied().unwrap_or(0.0);
        let p_pair = p(PAIR);
        let physical = p(VACUUM) + p(PLUS_ONLY) + p(MINUS_ONLY) + p(PAIR);
        let total: f64 = dist.values().sum();
        let stderr_pair = match shots {
            Some(n) if n > 0 => {
                let q = p_pair.clamp(0.0, 1.0);
                (q * (1.0 - q) / n as f64).sqrt()
            }
            _ => 0.0,
        };
        Self {
            n_plus: p(PLUS_ONLY) + p_pair,
            n_minus: p(MINUS_ONLY) + p_pair,
            p_pair,
            leakage: total - physical,
            stderr_pair,
        }
    }
}

pub fn observables_from_counts(counts: &CountsTable) -> Observables {
    Observables::from_distribution(&counts.frequencies(), Some(counts.shots))
}
