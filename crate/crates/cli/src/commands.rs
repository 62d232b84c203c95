//! Subcommand bodies: validate flags, run, write files.

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use serde_json::json;

use pairsim::background::{n_k_analytic, ModeParams, DEFAULT_Y_INITIAL};
use pairsim::encoding::{Generators, PauliString, PauliSum};
use pairsim::noise::NoiseModel;
use pairsim::schedule::{build_schedule, Branch, CoeffSchedule};
use pairsim::subspace::{evolve, evolve_steps, PhysState};
use pairsim::verify::run_checks;

use crate::output::{fmt_f64, json_text, write_files_atomically, x_tag, Metadata};
use crate::study::{run_study, StudyConfig};
use crate::sweep::{run_sweep, SweepConfig, SweepRow};
use crate::{DumpArgs, NoiseArgs, NoiseStudyArgs, SweepArgs, TrajectoryArgs, VerifyArgs, XGrid};

pub const DEFAULT_X_MIN: f64 = 1.0;
pub const DEFAULT_X_MAX: f64 = 5.0;
pub const DEFAULT_X_POINTS: usize = 40;
pub const TRAJECTORY_XS: [f64; 2] = [1.5, 2.0];
pub const STUDY_XS: [f64; 5] = [1.3, 1.5, 1.8, 2.0, 2.2];

/// `n` log-spaced points from `lo` to `hi`, both ends exact.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| match i {
            0 => lo,
            i if i == n - 1 => hi,
            i => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

/// Explicit `--x` list, else a log grid if any of its bounds was given,
/// else `default`.
pub fn resolve_grid(grid: &XGrid, default: Option<&[f64]>) -> Result<Vec<f64>> {
    let uses_log = grid.x_min.is_some() || grid.x_max.is_some() || grid.x_points.is_some();
    let xs = match (&grid.x, default) {
        (Some(xs), _) => xs.clone(),
        (None, Some(d)) if !uses_log => d.to_vec(),
        _ => {
            let lo = grid.x_min.unwrap_or(DEFAULT_X_MIN);
            let hi = grid.x_max.unwrap_or(DEFAULT_X_MAX);
            let n = grid.x_points.unwrap_or(DEFAULT_X_POINTS);
            if n == 0 {
                bail!("--x-points must be at least 1");
            }
            if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) {
                bail!("log grid needs 0 < --x-min <= --x-max, got [{lo}, {hi}]");
            }
            log_grid(lo, hi, n)
        }
    };
    if xs.is_empty() {
        bail!("empty x grid");
    }
    if let Some(bad) = xs.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        bail!("x values must be positive and finite, got {bad}");
    }
    let mut sorted = xs.clone();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        bail!("duplicate x values in grid");
    }
    Ok(xs)
}

pub fn load_model(noise: &NoiseArgs) -> Result<NoiseModel> {
    let model = match &noise.model_file {
        None => NoiseModel::device_default(4),
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read model file {}", path.display()))?;
            serde_json::from_str(&text)
                .with_context(|| format!("invalid model file {}", path.display()))?
        }
    };
    model.validate()?;
    if model.n_qubits() != 4 {
        bail!("noise model must cover 4 qubits, got {}", model.n_qubits());
    }
    for &f in &noise.factors {
        model
            .scaled(f)
            .with_context(|| format!("noise factor {f}"))?;
    }
    Ok(model)
}

fn report_written(paths: &[std::path::PathBuf]) {
    for p in paths {
        eprintln!("wrote {}", p.display());
    }
}

pub fn sweep(args: &SweepArgs) -> Result<ExitCode> {
    let xs = resolve_grid(&args.grid, None)?;
    if args.methods.is_empty() {
        bail!("--methods must name at least one method");
    }
    if args.shots == 0 {
        bail!("--shots must be at least 1");
    }
    let mut methods = args.methods.clone();
    methods.sort();
    methods.dedup();
    let model = load_model(&args.noise)?;
    let cfg = SweepConfig {
        xs: xs.clone(),
        methods: methods.clone(),
        n_steps: args.n_steps,
        shots: args.shots,
        seed: args.seed,
        model: model.clone(),
        factors: args.noise.factors.clone(),
    };
    let rows = run_sweep(&cfg)?;

    let meta = Metadata::new(
        "sweep",
        json!({
            "x": xs,
            "methods": methods,
            "n_steps": args.n_steps,
            "shots": args.shots,
            "seed": args.seed,
            "model": model,
            "factors": args.noise.factors,
            "y_initial": DEFAULT_Y_INITIAL,
        }),
    );
    let mut csv = meta.csv_header();
    csv.push_str(SweepRow::CSV_HEADER);
    csv.push('\n');
    for r in &rows {
        csv.push_str(&r.to_csv());
        csv.push('\n');
    }
    let doc = meta.json_document(
        json!({ "columns": SweepRow::CSV_HEADER.split(',').collect::<Vec<_>>(), "rows": rows }),
    );
    let written = write_files_atomically(
        &args.out_dir,
        &[
            ("sweep.csv".into(), csv),
            ("sweep.json".into(), json_text(&doc)?),
        ],
    )?;
    report_written(&written);
    Ok(ExitCode::SUCCESS)
}

pub const TRAJECTORY_HEADER: &str = "y,p_vac,p_plus,p_minus,p_pair,n_k_plateau";

pub fn trajectory_csv(x: f64, n_steps: usize) -> Result<String> {
    let traj = if n_steps == 0 {
        ModeParams::with_default_grid(x, 1)?;
        evolve_steps(&[], DEFAULT_Y_INITIAL, PhysState::vacuum()).1
    } else {
        let schedule = build_schedule(ModeParams::with_default_grid(x, n_steps)?)?;
        evolve(&schedule, PhysState::vacuum()).1
    };
    let plateau = fmt_f64(n_k_analytic(x));
    let meta = Metadata::new(
        "trajectory",
        json!({ "x": x, "n_steps": n_steps, "y_initial": DEFAULT_Y_INITIAL, "y_final": -x + 2.0 }),
    );
    let mut csv = meta.csv_header();
    csv.push_str(TRAJECTORY_HEADER);
    csv.push('\n');
    for r in &traj.rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{plateau}\n",
            fmt_f64(r.y),
            fmt_f64(r.p_vac),
            fmt_f64(r.p_plus),
            fmt_f64(r.p_minus),
            fmt_f64(r.p_pair),
        ));
    }
    Ok(csv)
}

pub fn trajectory(args: &TrajectoryArgs) -> Result<ExitCode> {
    let xs = resolve_grid(&args.grid, Some(&TRAJECTORY_XS))?;
    let files = xs
        .iter()
        .map(|&x| {
            Ok((
                format!("trajectory_x{}_n{}.csv", x_tag(x), args.n_steps),
                trajectory_csv(x, args.n_steps)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    report_written(&write_files_atomically(&args.out_dir, &files)?);
    Ok(ExitCode::SUCCESS)
}

pub fn noise_study(args: &NoiseStudyArgs) -> Result<ExitCode> {
    let xs = resolve_grid(&args.grid, Some(&STUDY_XS))?;
    if args.shots == 0 {
        bail!("--shots must be at least 1");
    }
    let model = load_model(&args.noise)?;
    let cfg = StudyConfig {
        xs: xs.clone(),
        n_steps: args.n_steps,
        shots: args.shots,
        seed: args.seed,
        model: model.clone(),
        factors: args.noise.factors.clone(),
    };
    let points = run_study(&cfg)?;
    let meta = Metadata::new(
        "noise-study",
        json!({
            "x": xs,
            "n_steps": args.n_steps,
            "shots": args.shots,
            "seed": args.seed,
            "model": model,
            "model_file": args.noise.model_file,
            "factors": args.noise.factors,
        }),
    );
    let doc = meta.json_document(json!({ "noise_factors": args.noise.factors, "points": points }));
    let written = write_files_atomically(
        &args.out_dir,
        &[("noise_study.json".into(), json_text(&doc)?)],
    )?;
    report_written(&written);
    Ok(ExitCode::SUCCESS)
}

pub const SCHEDULE_HEADER: &str = "index,y_mid,dy,branch,cz,ca,theta_z_half,theta_a";

pub fn schedule_csv(schedule: &CoeffSchedule) -> String {
    let p = schedule.params;
    let meta = Metadata::new(
        "dump-schedule",
        json!({ "x": p.x, "n_steps": p.n_steps, "y_initial": p.y_i, "y_final": p.y_f }),
    );
    let mut csv = meta.csv_header();
    csv.push_str(SCHEDULE_HEADER);
    csv.push('\n');
    for s in &schedule.steps {
        let a = s.strang_angles();
        let branch = match s.branch {
            Branch::DeSitter => "de_sitter",
            Branch::Radiation => "radiation",
        };
        csv.push_str(&format!(
            "{},{},{},{branch},{},{},{},{}\n",
            s.index,
            fmt_f64(s.y_mid),
            fmt_f64(s.dy),
            fmt_f64(s.cz),
            fmt_f64(s.ca),
            fmt_f64(a.theta_z_half),
            fmt_f64(a.theta_a),
        ));
    }
    csv
}

fn emit(out_dir: Option<&Path>, name: String, text: String) -> Result<()> {
    match out_dir {
        Some(dir) => report_written(&write_files_atomically(dir, &[(name, text)])?),
        None => print!("{text}"),
    }
    Ok(())
}

pub fn dump_schedule(args: &DumpArgs) -> Result<ExitCode> {
    let schedule = build_schedule(ModeParams::with_default_grid(args.x, args.n_steps)?)?;
    emit(
        args.out_dir.as_deref(),
        format!("schedule_x{}_n{}.csv", x_tag(args.x), args.n_steps),
        schedule_csv(&schedule),
    )?;
    Ok(ExitCode::SUCCESS)
}

pub fn dump_circuit(args: &DumpArgs) -> Result<ExitCode> {
    let schedule = build_schedule(ModeParams::with_default_grid(args.x, args.n_steps)?)?;
    let circuit = Generators::default().build_full_circuit(&schedule.steps)?;
    let meta = Metadata::new(
        "dump-circuit",
        json!({
            "x": args.x,
            "n_steps": args.n_steps,
            "gates": circuit.len(),
            "cnots": circuit.two_qubit_count(),
            "depth": circuit.depth(),
        }),
    );
    let text = format!("{}{}", meta.csv_header(), circuit.to_text());
    emit(
        args.out_dir.as_deref(),
        format!("circuit_x{}_n{}.txt", x_tag(args.x), args.n_steps),
        text,
    )?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Debug, Deserialize)]
struct GeneratorsFile {
    z: Vec<(String, f64)>,
    a: Vec<(String, f64)>,
}

pub fn load_generators(path: &Path) -> Result<Generators> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read generators file {}", path.display()))?;
    let raw: GeneratorsFile = serde_json::from_str(&text)
        .with_context(|| format!("invalid generators file {}", path.display()))?;
    let sum = |terms: Vec<(String, f64)>| -> Result<PauliSum> {
        let terms = terms
            .into_iter()
            .map(|(letters, c)| {
                let p = PauliString::parse(&letters, c)?;
                if p.letters.len() != 4 {
                    bail!("Pauli string {letters:?} must have 4 letters");
                }
                Ok(p)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliSum::new(terms))
    };
    Ok(Generators {
        z: sum(raw.z)?,
        a: sum(raw.a)?,
    })
}

pub fn verify(args: &VerifyArgs) -> Result<ExitCode> {
    let gens = match &args.generators {
        Some(path) => load_generators(path)?,
        None => Generators::default(),
    };
    let report = run_checks(&gens);
    print!("{}", report.render());
    if report.all_passed() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("failed checks: {}", report.failed().join(", "));
        Ok(ExitCode::from(1))
    }
}
