//! Readout mitigation restricted to observed bitstrings, and linear
//! zero-noise extrapolation with gate-rate scaling.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::noise::{derive_seed, run_noisy_circuit, NoiseModel};
use crate::statevector::{index_of, observables_from_counts, CountsTable, Distribution};

/// Condition numbers above this set [`MitigatedDistribution::ill_conditioned`].
pub const ILL_CONDITIONED: f64 = 1e8;

pub const DEFAULT_FACTORS: [f64; 3] = [1.0, 1.5, 2.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MitigatedDistribution {
    /// Solution of the restricted system; entries may be slightly negative.
    pub quasi: Distribution,
    /// `quasi` with negatives set to zero, renormalized to sum to one.
    pub clipped: Distribution,
    pub condition_number: f64,
    pub ill_conditioned: bool,
}

/// Solves `A_SS · q = p_S`, where `S` is the set of observed bitstrings and
/// `A` is the tensor-product assignment matrix of `model`.
pub fn mitigate_distribution(
    observed: &Distribution,
    model: &NoiseModel,
) -> Result<MitigatedDistribution> {
    model.validate()?;
    let support: Vec<(&String, f64)> = observed
        .iter()
        .filter(|(_, &p)| p != 0.0)
        .map(|(k, &p)| (k, p))
        .collect();
    if support.is_empty() {
        return Err(Error::InvalidDistribution("no observed bitstrings".into()));
    }
    let n = model.n_qubits();
    let mut idx = Vec::with_capacity(support.len());
    for (k, _) in &support {
        if k.len() != n {
            return Err(Error::InvalidDistribution(format!(
                "bitstring {k:?} does not have {n} bits"
            )));
        }
        idx.push(index_of(k)?);
    }

    let m = idx.len();
    let a = DMatrix::from_fn(m, m, |r, c| model.assignment_probability(idx[r], idx[c]));
    let b = DVector::from_iterator(m, support.iter().map(|(_, p)| *p));

    let sv = a.clone().singular_values();
    let s_max = sv.max();
    let s_min = sv.min();
    if !(s_min > s_max * f64::EPSILON * m as f64) {
        return Err(Error::SingularConfusion);
    }
    let condition_number = s_max / s_min;
    let x = a.lu().solve(&b).ok_or(Error::SingularConfusion)?;

    let quasi: Distribution = support
        .iter()
        .zip(x.iter())
        .map(|((k, _), &v)| ((*k).clone(), v))
        .collect();
    let positive: f64 = x.iter().map(|v| v.max(0.0)).sum();
    let clipped = quasi
        .iter()
        .map(|(k, &v)| {
            let w = if positive > 0.0 {
                v.max(0.0) / positive
            } else {
                0.0
            };
            (k.clone(), w)
        })
        .collect();

    Ok(MitigatedDistribution {
        quasi,
        clipped,
        condition_number,
        ill_conditioned: condition_number > ILL_CONDITIONED,
    })
}

pub fn mitigate_readout(counts: &CountsTable, model: &NoiseModel) -> Result<MitigatedDistribution> {
    if counts.shots == 0 || counts.counts.is_empty() {
        return Err(Error::InvalidDistribution("empty counts table".into()));
    }
    mitigate_distribution(&counts.frequencies(), model)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZneObservable {
    PPair,
    Leakage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZneResult {
    pub noise_factors: Vec<f64>,
    pub values: Vec<f64>,
    pub stderrs: Vec<f64>,
    pub extrapolated: f64,
    pub extrapolated_stderr: f64,
}

fn check_factors(factors: &[f64]) -> Result<()> {
    if factors.len() < 2 {
        return Err(Error::InvalidExtrapolation(
            "need at least two noise factors".into(),
        ));
    }
    if factors.iter().any(|f| !(f.is_finite() && *f >= 1.0)) {
        return Err(Error::InvalidExtrapolation(
            "noise factors must be >= 1".into(),
        ));
    }
    if factors.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidExtrapolation(
            "noise factors must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Ordinary least-squares line through `(factor, value)`; returns the
/// intercept at factor 0 and its standard error propagated from the
/// per-point standard errors.
pub fn linear_extrapolate(factors: &[f64], values: &[f64], stderrs: &[f64]) -> Result<(f64, f64)> {
    if factors.len() != values.len() || factors.len() != stderrs.len() {
        return Err(Error::InvalidExtrapolation("length mismatch".into()));
    }
    let n = factors.len() as f64;
    if factors.len() < 2 {
        return Err(Error::InvalidExtrapolation(
            "need at least two points".into(),
        ));
    }
    let mean = factors.iter().sum::<f64>() / n;
    let sxx: f64 = factors.iter().map(|f| (f - mean).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidExtrapolation("all factors are equal".into()));
    }
    // intercept = Σ w_i y_i with w_i = 1/n - mean (f_i - mean) / sxx
    let weights: Vec<f64> = factors
        .iter()
        .map(|f| 1.0 / n - mean * (f - mean) / sxx)
        .collect();
    let intercept = weights.iter().zip(values).map(|(w, y)| w * y).sum();
    let variance: f64 = weights
        .iter()
        .zip(stderrs)
        .map(|(w, s)| (w * s).powi(2))
        .sum();
    Ok((intercept, variance.sqrt()))
}

/// Runs the noisy circuit with gate error rates scaled by each factor and
/// extrapolates the chosen observable linearly to zero noise. Factor `i`
/// uses the sub-seed `derive_seed(seed, i)`.
pub fn zne_estimate(
    circuit: &Circuit,
    model: &NoiseModel,
    observable: ZneObservable,
    factors: &[f64],
    shots: u64,
    seed: u64,
) -> Result<ZneResult> {
    let mut all = zne_estimate_all(circuit, model, &[observable], factors, shots, seed)?;
    Ok(all.remove(0))
}

/// [`zne_estimate`] for several observables read off the same noisy runs.
pub fn zne_estimate_all(
    circuit: &Circuit,
    model: &NoiseModel,
    observables: &[ZneObservable],
    factors: &[f64],
    shots: u64,
    seed: u64,
) -> Result<Vec<ZneResult>> {
    check_factors(factors)?;
    let mut values = vec![Vec::with_capacity(factors.len()); observables.len()];
    for (i, &factor) in factors.iter().enumerate() {
        let scaled = model.scaled(factor)?;
        let counts = run_noisy_circuit(circuit, &scaled, shots, derive_seed(seed, i as u64))?;
        let obs = observables_from_counts(&counts);
        for (slot, which) in values.iter_mut().zip(observables) {
            slot.push(match which {
                ZneObservable::PPair => obs.p_pair,
                ZneObservable::Leakage => obs.leakage,
            });
        }
    }
    values
        .into_iter()
        .map(|values| {
            let stderrs: Vec<f64> = values
                .iter()
                .map(|v| {
                    let q = v.clamp(0.0, 1.0);
                    (q * (1.0 - q) / shots as f64).sqrt()
                })
                .collect();
            let (extrapolated, extrapolated_stderr) =
                linear_extrapolate(factors, &values, &stderrs)?;
            Ok(ZneResult {
                noise_factors: factors.to_vec(),
                values,
                stderrs,
                extrapolated,
                extrapolated_stderr,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::apply_readout_noise;

    fn dist(entries: &[(&str, f64)]) -> Distribution {
        entries.iter().map(|&(k, v)| (k.to_string(), v)).collect()
    }

    #[test]
    fn identity_model_returns_frequencies() {
        let counts = CountsTable {
            shots: 100,
            seed: 0,
            counts: [("0101".to_string(), 90), ("1010".to_string(), 10)].into(),
        };
        let m = mitigate_readout(&counts, &NoiseModel::ideal(4)).unwrap();
        assert!((m.quasi["0101"] - 0.9).abs() < 1e-15);
        assert!((m.quasi["1010"] - 0.1).abs() < 1e-15);
        assert_eq!(m.condition_number, 1.0);
    }

    #[test]
    fn single_qubit_inversion() {
        let model = NoiseModel {
            readout: vec![[[0.99, 0.02], [0.01, 0.98]]],
            p1: 0.0,
            p2: 0.0,
        };
        let m = mitigate_distribution(&dist(&[("0", 0.99), ("1", 0.01)]), &model).unwrap();
        assert!((m.quasi["0"] - 1.0).abs() < 1e-12);
        assert!(m.quasi["1"].abs() < 1e-12);
        assert!(!m.ill_conditioned);
    }

    #[test]
    fn four_qubit_round_trip() {
        let model = NoiseModel {
            readout: vec![
                [[0.98, 0.03], [0.02, 0.97]],
                [[0.985, 0.02], [0.015, 0.98]],
                [[0.97, 0.05], [0.03, 0.95]],
                [[0.99, 0.01], [0.01, 0.99]],
            ],
            p1: 0.0,
            p2: 0.0,
        };
        let truth = dist(&[("0101", 0.6), ("1010", 0.25), ("1001", 0.1), ("0000", 0.05)]);
        let noisy = apply_readout_noise(&truth, &model).unwrap();
        let m = mitigate_distribution(&noisy, &model).unwrap();
        for (k, v) in &m.quasi {
            let expected = truth.get(k).copied().unwrap_or(0.0);
            assert!((v - expected).abs() < 1e-10, "{k}");
        }
    }

    #[test]
    fn clipped_variant_is_a_distribution() {
        let model = NoiseModel::symmetric(1, 0.1, 0.0, 0.0);
        // (0.95, 0.05) is not reachable through this channel: q = (1.0625, -0.0625)
        let m = mitigate_distribution(&dist(&[("0", 0.95), ("1", 0.05)]), &model).unwrap();
        assert!((m.quasi["0"] - 1.0625).abs() < 1e-12);
        assert!((m.quasi["1"] + 0.0625).abs() < 1e-12);
        assert_eq!(m.clipped["0"], 1.0);
        assert_eq!(m.clipped["1"], 0.0);
    }

    #[test]
    fn singular_system_is_reported() {
        let model = NoiseModel::symmetric(1, 0.5, 0.0, 0.0);
        assert_eq!(
            mitigate_distribution(&dist(&[("0", 0.5), ("1", 0.5)]), &model).unwrap_err(),
            Error::SingularConfusion
        );
    }

    #[test]
    fn ill_conditioning_is_flagged() {
        let model = NoiseModel::symmetric(1, 0.5 - 1e-9, 0.0, 0.0);
        let m = mitigate_distribution(&dist(&[("0", 0.5), ("1", 0.5)]), &model).unwrap();
        assert!(m.ill_conditioned);
    }

    #[test]
    fn extrapolation_of_affine_data_is_exact() {
        let f = DEFAULT_FACTORS;
        let values: Vec<f64> = f.iter().map(|l| 0.0025 + 0.01 * l).collect();
        let (b, s) = linear_extrapolate(&f, &values, &[1e-3; 3]).unwrap();
        assert!((b - 0.0025).abs() < 1e-15, "{b}");
        // OLS intercept weights for (1, 1.5, 2) are (11/6, 1/3, -7/6)
        let expected = 1e-3 * (174.0f64 / 36.0).sqrt();
        assert!((s - expected).abs() < 1e-15, "{s} vs {expected}");
    }

    #[test]
    fn factor_validation() {
        let c = crate::encoding::vacuum_preparation().unwrap();
        let m = NoiseModel::ideal(4);
        for bad in [vec![1.0], vec![1.0, 1.0], vec![2.0, 1.5], vec![0.5, 1.0]] {
            assert!(zne_estimate(&c, &m, ZneObservable::PPair, &bad, 10, 0).is_err());
        }
        assert!(linear_extrapolate(&[1.0, 1.0], &[0.0, 0.0], &[0.0, 0.0]).is_err());
    }
}
