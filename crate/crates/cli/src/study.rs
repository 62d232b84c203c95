//! Synthetic-device study at shallow depth: raw, readout-mitigated and
//! zero-noise-extrapolated estimates for each x.

use anyhow::Result;
use rayon::prelude::*;
use serde::Serialize;

use pairsim::background::{n_k_analytic, ModeParams};
use pairsim::encoding::build_full_circuit;
use pairsim::mitigation::{
    mitigate_distribution, mitigate_readout, zne_estimate_all, ZneObservable, ZneResult,
};
use pairsim::noise::{apply_readout_noise, run_noisy_circuit, NoiseModel};
use pairsim::schedule::build_schedule;
use pairsim::statevector::{observables_from_counts, run_circuit, Observables};

use crate::sweep::point_seed;

#[derive(Debug, Clone, Serialize)]
pub struct RawEstimate {
    pub p_pair: f64,
    pub stderr: f64,
    pub leakage: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MitigatedEstimate {
    /// From the unclipped quasi-probabilities.
    pub p_pair: f64,
    pub p_pair_clipped: f64,
    pub leakage: f64,
    pub condition_number: f64,
    pub ill_conditioned: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ZneEstimate {
    pub p_pair: ZneResult,
    pub leakage: ZneResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct LeakageTriplet {
    pub raw: f64,
    pub mitigated: f64,
    pub zne: f64,
}

/// Readout channel applied to the exact probabilities and then inverted:
/// no sampling noise, so the effect of mitigation alone is visible.
#[derive(Debug, Clone, Serialize)]
pub struct ExactPathway {
    pub leakage_raw: f64,
    pub leakage_mitigated: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StudyPoint {
    pub x: f64,
    pub n_steps: usize,
    pub seed: u64,
    pub n_k_analytic: f64,
    pub p_pair_ideal: f64,
    pub raw: RawEstimate,
    pub mitigated: MitigatedEstimate,
    pub zne: ZneEstimate,
    pub leakage: LeakageTriplet,
    pub exact_pathway: ExactPathway,
}

#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub xs: Vec<f64>,
    pub n_steps: usize,
    pub shots: u64,
    pub seed: u64,
    pub model: NoiseModel,
    pub factors: Vec<f64>,
}

pub fn run_study(cfg: &StudyConfig) -> Result<Vec<StudyPoint>> {
    let mut points = cfg
        .xs
        .par_iter()
        .map(|&x| study_point(cfg, x))
        .collect::<Result<Vec<_>>>()?;
    points.sort_by(|a, b| a.x.total_cmp(&b.x));
    Ok(points)
}

fn study_point(cfg: &StudyConfig, x: f64) -> Result<StudyPoint> {
    let schedule = build_schedule(ModeParams::with_default_grid(x, cfg.n_steps)?)?;
    let circuit = build_full_circuit(&schedule.steps)?;
    let seed = point_seed(cfg.seed, x);

    let ideal_probs = run_circuit(&circuit)?.probabilities();
    let ideal = Observables::from_distribution(&ideal_probs, None);

    let counts = run_noisy_circuit(&circuit, &cfg.model, cfg.shots, seed)?;
    let raw_obs = observables_from_counts(&counts);
    let m = mitigate_readout(&counts, &cfg.model)?;
    let mit_quasi = Observables::from_distribution(&m.quasi, None);
    let mit_clipped = Observables::from_distribution(&m.clipped, None);

    let mut zne = zne_estimate_all(
        &circuit,
        &cfg.model,
        &[ZneObservable::PPair, ZneObservable::Leakage],
        &cfg.factors,
        cfg.shots,
        seed,
    )?;
    let zne_leak = zne.pop().expect("two observables");
    let zne_pair = zne.pop().expect("two observables");

    let exact_noisy = apply_readout_noise(&ideal_probs, &cfg.model)?;
    let exact_mit = mitigate_distribution(&exact_noisy, &cfg.model)?;

    Ok(StudyPoint {
        x,
        n_steps: cfg.n_steps,
        seed,
        n_k_analytic: n_k_analytic(x),
        p_pair_ideal: ideal.p_pair,
        raw: RawEstimate {
            p_pair: raw_obs.p_pair,
            stderr: raw_obs.stderr_pair,
            leakage: raw_obs.leakage,
        },
        mitigated: MitigatedEstimate {
            p_pair: mit_quasi.p_pair,
            p_pair_clipped: mit_clipped.p_pair,
            leakage: mit_quasi.leakage,
            condition_number: m.condition_number,
            ill_conditioned: m.ill_conditioned,
        },
        leakage: LeakageTriplet {
            raw: raw_obs.leakage,
            mitigated: mit_quasi.leakage,
            zne: zne_leak.extrapolated,
        },
        zne: ZneEstimate {
            p_pair: zne_pair,
            leakage: zne_leak,
        },
        exact_pathway: ExactPathway {
            leakage_raw: Observables::from_distribution(&exact_noisy, None).leakage,
            leakage_mitigated: Observables::from_distribution(&exact_mit.quasi, None).leakage,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(model: NoiseModel) -> StudyConfig {
        StudyConfig {
            xs: vec![2.0, 1.3],
            n_steps: 1,
            shots: 4096,
            seed: 7,
            model,
            factors: vec![1.0, 1.5, 2.0],
        }
    }

    #[test]
    fn noiseless_raw_matches_ideal() {
        let points = run_study(&config(NoiseModel::ideal(4))).unwrap();
        assert_eq!(points[0].x, 1.3);
        for p in &points {
            let sigma = (p.p_pair_ideal * (1.0 - p.p_pair_ideal) / 4096.0).sqrt();
            assert!((p.raw.p_pair - p.p_pair_ideal).abs() < 4.0 * sigma);
            assert!(p.raw.leakage.abs() < 1e-12);
        }
    }

    #[test]
    fn mitigation_lowers_exact_leakage() {
        for p in run_study(&config(NoiseModel::device_default(4))).unwrap() {
            assert!(p.exact_pathway.leakage_raw > p.exact_pathway.leakage_mitigated);
            assert_eq!(p.zne.p_pair.noise_factors, vec![1.0, 1.5, 2.0]);
        }
    }
}
