//! One row per (x, method): the analytic benchmark, both ideal engines,
//! finite-shot sampling and the three noisy estimators.

use anyhow::Result;
use clap::ValueEnum;
use rayon::prelude::*;
use serde::Serialize;

use pairsim::background::{multi_pair_probability, n_k_analytic, ModeParams};
use pairsim::encoding::build_full_circuit;
use pairsim::mitigation::{mitigate_readout, zne_estimate, ZneObservable};
use pairsim::noise::{derive_seed, run_noisy_circuit, NoiseModel};
use pairsim::schedule::build_schedule;
use pairsim::statevector::{observables_from_counts, run_circuit, sample_counts, Observables};
use pairsim::subspace::{evolve, particle_number, PhysState};

use crate::output::{fmt_f64, fmt_opt};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Analytic,
    Matrix,
    Statevector,
    Shots,
    Noisy,
    Mitigated,
    Zne,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::Matrix => "matrix",
            Method::Statevector => "statevector",
            Method::Shots => "shots",
            Method::Noisy => "noisy",
            Method::Mitigated => "mitigated",
            Method::Zne => "zne",
        }
    }

    /// Step count used when `--n-steps` is not given.
    pub fn default_steps(self) -> usize {
        match self {
            Method::Analytic => 0,
            Method::Matrix => 2500,
            Method::Statevector => 1000,
            Method::Shots => 500,
            Method::Noisy | Method::Mitigated | Method::Zne => 1,
        }
    }

    pub fn uses_shots(self) -> bool {
        matches!(
            self,
            Method::Shots | Method::Noisy | Method::Mitigated | Method::Zne
        )
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub x: f64,
    pub n_steps: usize,
    pub method: Method,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub n_k: f64,
    pub stderr: Option<f64>,
    pub leakage: Option<f64>,
    pub multi_pair_bound: f64,
}

impl SweepRow {
    pub const CSV_HEADER: &'static str =
        "x,n_steps,method,shots,seed,n_k,stderr,leakage,multi_pair_bound";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            fmt_f64(self.x),
            self.n_steps,
            self.method.name(),
            fmt_opt(self.shots),
            fmt_opt(self.seed),
            fmt_f64(self.n_k),
            fmt_opt(self.stderr.map(fmt_f64)),
            fmt_opt(self.leakage.map(fmt_f64)),
            fmt_f64(self.multi_pair_bound),
        )
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub xs: Vec<f64>,
    pub methods: Vec<Method>,
    pub n_steps: Option<usize>,
    pub shots: u64,
    pub seed: u64,
    pub model: NoiseModel,
    pub factors: Vec<f64>,
}

/// Per-point seed; depends only on the base seed and `x`, never on grid
/// position or scheduling.
pub fn point_seed(seed: u64, x: f64) -> u64 {
    derive_seed(seed, x.to_bits())
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    let jobs: Vec<(f64, Method)> = cfg
        .xs
        .iter()
        .flat_map(|&x| cfg.methods.iter().map(move |&m| (x, m)))
        .collect();
    let mut rows = jobs
        .par_iter()
        .map(|&(x, m)| sweep_point(cfg, x, m))
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.method.cmp(&b.method)));
    Ok(rows)
}

fn sweep_point(cfg: &SweepConfig, x: f64, method: Method) -> Result<SweepRow> {
    let bound = multi_pair_probability(n_k_analytic(x));
    let mut row = SweepRow {
        x,
        n_steps: 0,
        method,
        shots: None,
        seed: None,
        n_k: 0.0,
        stderr: None,
        leakage: None,
        multi_pair_bound: bound,
    };
    if method == Method::Analytic {
        ModeParams::with_default_grid(x, 1)?;
        row.n_k = n_k_analytic(x);
        return Ok(row);
    }

    let n = cfg.n_steps.unwrap_or(method.default_steps());
    let schedule = build_schedule(ModeParams::with_default_grid(x, n)?)?;
    row.n_steps = n;
    if method == Method::Matrix {
        let (state, _) = evolve(&schedule, PhysState::vacuum());
        row.n_k = particle_number(&state).p_pair;
        return Ok(row);
    }

    let circuit = build_full_circuit(&schedule.steps)?;
    let seed = point_seed(cfg.seed, x);
    if method.uses_shots() {
        row.shots = Some(cfg.shots);
        row.seed = Some(seed);
    }
    let obs = match method {
        Method::Statevector => {
            Observables::from_distribution(&run_circuit(&circuit)?.probabilities(), None)
        }
        Method::Shots => {
            let probs = run_circuit(&circuit)?.probabilities();
            observables_from_counts(&sample_counts(&probs, cfg.shots, seed)?)
        }
        Method::Noisy => {
            observables_from_counts(&run_noisy_circuit(&circuit, &cfg.model, cfg.shots, seed)?)
        }
        Method::Mitigated => {
            let counts = run_noisy_circuit(&circuit, &cfg.model, cfg.shots, seed)?;
            let m = mitigate_readout(&counts, &cfg.model)?;
            let mut obs = Observables::from_distribution(&m.quasi, Some(cfg.shots));
            obs.stderr_pair = observables_from_counts(&counts).stderr_pair;
            obs
        }
        Method::Zne => {
            let z = zne_estimate(
                &circuit,
                &cfg.model,
                ZneObservable::PPair,
                &cfg.factors,
                cfg.shots,
                seed,
            )?;
            row.n_k = z.extrapolated;
            row.stderr = Some(z.extrapolated_stderr);
            return Ok(row);
        }
        Method::Analytic | Method::Matrix => unreachable!("handled above"),
    };
    row.n_k = obs.p_pair;
    row.leakage = Some(obs.leakage);
    if method.uses_shots() {
        row.stderr = Some(obs.stderr_pair);
    }
    Ok(row)
}
