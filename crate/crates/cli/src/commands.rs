use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use anyhow::{anyhow, Context};
use rayon::prelude::*;
use serde::Serialize;

use sts_core::configs::{configuration_name, enumerate_erdos, ErdosCatalog};
use sts_core::formats::{read_sts, write_sts};
use sts_core::general_designs::{build_weak_sparse, is_weakly_k_sparse, theta_max, DesignReport, WeakReport};
use sts_core::process::{ProcessState, StopCondition, StopReason};
use sts_core::rng::trial_seed;
use sts_core::sparse_check::{is_k_sparse, is_partial_steiner, sampled_sparseness, SparsenessReport};
use sts_core::stats::{export_series, EdgeSample, Snapshot, TrackerSpec, Tracking};
use sts_core::trajectory::{conjectured_log_count, count_exponent_constant, Constants, TrajectoryParams};
use sts_core::{Error, TripleSystem};

use crate::args::*;

#[derive(Debug)]
pub enum Failure {
    /// The run finished but fell short of the target size.
    Missed,
    /// An output or input failed a correctness check.
    Verify,
    Config(anyhow::Error),
    Other(anyhow::Error),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Missed => 2,
            Failure::Verify => 3,
            Failure::Config(_) => 4,
            Failure::Other(_) => 1,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::Parse { .. } | Error::UnsupportedVersion(_) | Error::TooLarge { .. } => {
                Failure::Config(e.into())
            }
            _ => Failure::Other(e.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

type CmdResult = Result<(), Failure>;

fn config(msg: String) -> Failure {
    Failure::Config(anyhow!(msg))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn with_ext(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value).context("serializing summary")?;
    s.push('\n');
    Ok(s)
}

fn catalog_for(k: usize) -> Result<Arc<ErdosCatalog>, Failure> {
    if k < 2 {
        return Err(config(format!("k must be at least 2, got {k}")));
    }
    Ok(Arc::new(enumerate_erdos(k + 2)?))
}

fn constants(a: &ConstantArgs) -> Constants {
    let d = Constants::default();
    Constants {
        c_err: a.c_err.unwrap_or(d.c_err),
        eps0: a.eps0.unwrap_or(d.eps0),
        gamma: a.gamma.unwrap_or(d.gamma),
    }
}

fn target_size(n: usize, gamma: f64) -> u64 {
    ((1.0 - gamma) * (n * n) as f64 / 6.0).floor() as u64
}

fn density(n: usize, steps: usize) -> f64 {
    steps as f64 / ((n * n) as f64 / 6.0)
}

pub fn catalog(a: CatalogArgs, out_dir: &Path) -> CmdResult {
    let cat = enumerate_erdos(a.jmax)?;
    let path = a.out.unwrap_or_else(|| out_dir.join(format!("catalog-j{}.txt", a.jmax)));
    let text = cat.to_text();
    write_file(&path, &text)?;
    let reloaded = ErdosCatalog::from_text(&fs::read_to_string(&path).context("reading catalog back")?)?;
    if reloaded != cat {
        eprintln!("reloaded catalog differs from the enumerated one");
        return Err(Failure::Verify);
    }
    println!("{:>3} {:>6} {:>10}  names", "j", "count", "erd_j");
    for j in 4..=a.jmax {
        let names: Vec<&str> = cat.entries_for(j).map(|e| configuration_name(&e.system()).unwrap_or("-")).collect();
        println!("{j:>3} {:>6} {:>10}  {}", cat.count(j), cat.erd(j), names.join(", "));
    }
    println!("wrote {}", path.display());
    Ok(())
}

#[derive(Serialize)]
struct CheckpointSummary {
    i: u64,
    avail: u64,
    avail_traj: f64,
    avail_band: f64,
    avail_in_band: bool,
    edge_in_band: Option<f64>,
    triple_in_band: Option<f64>,
}

impl CheckpointSummary {
    fn new(s: &Snapshot) -> Self {
        CheckpointSummary {
            i: s.i,
            avail: s.avail,
            avail_traj: s.avail_traj,
            avail_band: s.avail_band,
            avail_in_band: s.avail_in_band(),
            edge_in_band: s.in_band_fraction("e"),
            triple_in_band: s.in_band_fraction("t"),
        }
    }
}

#[derive(Serialize)]
struct RunReport {
    schema: &'static str,
    n: usize,
    k: usize,
    seed: u64,
    constants: Constants,
    target: u64,
    steps: usize,
    density: f64,
    reached_target: bool,
    stop_reason: StopReason,
    available_left: usize,
    uncovered_pairs: usize,
    tau_cut: u64,
    trajectory_valid: bool,
    trajectory_error: Option<String>,
    checkpoints: Vec<CheckpointSummary>,
    checkpoints_missed: Vec<u64>,
    tracker_replacements: usize,
}

pub fn run(a: RunArgs, out_dir: &Path) -> CmdResult {
    let cat = catalog_for(a.k)?;
    let consts = constants(&a.constants);
    let mut state = ProcessState::new(a.n, a.k, a.seed, cat.clone())?;
    let params = TrajectoryParams::new(a.n, a.k, &cat, consts)?;
    let validation = params.validate();
    if let Err(e) = &validation {
        eprintln!("warning: trajectory constants fail the startup check ({e}); bands are reported but not meaningful");
    }
    let tau_cut = params.tau_cut();
    let mut tracking = if a.no_track {
        None
    } else {
        let mut spec = TrackerSpec::default_for(&params);
        spec.edge_sample = EdgeSample::Random(a.edge_sample);
        spec.triple_sample = a.triple_sample;
        if let Some(c) = &a.checkpoints {
            spec.checkpoints = c.clone();
        }
        Some(Tracking::new(&state, params, spec)?)
    };
    let mut snapshots = Vec::new();
    let mut failure: Option<Error> = None;
    if let Some(t) = tracking.as_mut() {
        snapshots.extend(t.observe(&state)?);
    }
    let stop = StopCondition {
        max_steps: a.max_steps,
        target_chosen: None,
        wall_clock: a.wall_clock_secs.map(Duration::from_secs),
    };
    let (system, summary) = state.run_observed(&stop, &mut |s, _| {
        if let (Some(t), None) = (tracking.as_mut(), &failure) {
            match t.observe(s) {
                Ok(snap) => snapshots.extend(snap),
                Err(e) => failure = Some(e),
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e.into());
    }
    let missed: Vec<u64> = tracking
        .as_ref()
        .map(|t| t.spec().checkpoints.iter().copied().filter(|&c| c > summary.steps as u64).collect())
        .unwrap_or_default();
    let target = target_size(a.n, consts.gamma);
    let reached = summary.steps as u64 >= target;
    let report = RunReport {
        schema: "sts-run v1",
        n: a.n,
        k: a.k,
        seed: a.seed,
        constants: consts,
        target,
        steps: summary.steps,
        density: density(a.n, summary.steps),
        reached_target: reached,
        stop_reason: summary.stop_reason,
        available_left: summary.available_left,
        uncovered_pairs: summary.uncovered_pairs,
        tau_cut,
        trajectory_valid: validation.is_ok(),
        trajectory_error: validation.err().map(|e| e.to_string()),
        checkpoints: snapshots.iter().map(CheckpointSummary::new).collect(),
        checkpoints_missed: missed,
        tracker_replacements: tracking.as_ref().map_or(0, |t| t.replacements.len()),
    };
    let prefix = a.out.unwrap_or_else(|| out_dir.join(format!("run-n{}-k{}-s{}", a.n, a.k, a.seed)));
    write_file(&with_ext(&prefix, "sts"), &write_sts(&system))?;
    if tracking.is_some() {
        write_file(&with_ext(&prefix, "csv"), &export_series(&snapshots)?)?;
    }
    write_file(&with_ext(&prefix, "json"), &to_json(&report)?)?;
    println!(
        "n={} k={} seed={} steps={} target={} density={:.4} stop={:?}",
        a.n, a.k, a.seed, summary.steps, target, report.density, summary.stop_reason
    );
    for c in &report.checkpoints {
        let frac = c.edge_in_band.map_or("-".to_string(), |f| format!("{f:.3}"));
        println!("  i={} avail={} in_band={} edges_in_band={frac}", c.i, c.avail, c.avail_in_band);
    }
    let exts = if tracking.is_some() { "{sts,csv,json}" } else { "{sts,json}" };
    println!("wrote {}.{exts}", prefix.display());
    if reached {
        Ok(())
    } else {
        Err(Failure::Missed)
    }
}

#[derive(Serialize)]
struct Sparseness {
    linear: bool,
    method: &'static str,
    ok: bool,
}

fn check_sparse(s: &TripleSystem, k: usize, samples: usize, seed: u64) -> Result<(Sparseness, SparsenessReport), Failure> {
    let (method, report) = match is_k_sparse(s, k) {
        Ok(r) => ("exhaustive", r),
        Err(Error::TooLarge { .. }) => ("sampled", sampled_sparseness(s, k, samples, seed)?),
        Err(e) => return Err(e.into()),
    };
    let summary = Sparseness {
        linear: is_partial_steiner(s),
        method,
        ok: report.ok,
    };
    Ok((summary, report))
}

#[derive(Serialize)]
struct TrialResult {
    index: usize,
    seed: u64,
    steps: usize,
    density: f64,
    reached_target: bool,
    sparseness: Sparseness,
}

#[derive(Serialize)]
struct TrialsReport {
    schema: &'static str,
    n: usize,
    k: usize,
    gamma: f64,
    master_seed: u64,
    trials: usize,
    target: u64,
    success_fraction: f64,
    mean_density: f64,
    min_density: f64,
    max_density: f64,
    violations: usize,
    runs: Vec<TrialResult>,
}

pub fn trials(a: TrialsArgs, out_dir: &Path) -> CmdResult {
    if a.trials == 0 {
        return Err(config("trials must be at least 1".into()));
    }
    if !(0.0..1.0).contains(&a.gamma) {
        return Err(config(format!("gamma must lie in [0, 1), got {}", a.gamma)));
    }
    let cat = catalog_for(a.k)?;
    ProcessState::new(a.n, a.k, 0, cat.clone())?;
    let target = target_size(a.n, a.gamma);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.threads.unwrap_or(0))
        .build()
        .context("building thread pool")?;
    let runs: Vec<Result<TrialResult, Failure>> = pool.install(|| {
        (0..a.trials)
            .into_par_iter()
            .map(|index| {
                let seed = trial_seed(a.master_seed, index as u64);
                let mut state = ProcessState::new(a.n, a.k, seed, cat.clone())?;
                let (system, summary) = state.run(&StopCondition::default())?;
                let (sparseness, _) = check_sparse(&system, a.k, a.verify_samples, seed)?;
                Ok(TrialResult {
                    index,
                    seed,
                    steps: summary.steps,
                    density: density(a.n, summary.steps),
                    reached_target: summary.steps as u64 >= target,
                    sparseness,
                })
            })
            .collect()
    });
    let runs: Vec<TrialResult> = runs.into_iter().collect::<Result<_, _>>()?;
    let dens: Vec<f64> = runs.iter().map(|r| r.density).collect();
    let report = TrialsReport {
        schema: "sts-trials v1",
        n: a.n,
        k: a.k,
        gamma: a.gamma,
        master_seed: a.master_seed,
        trials: a.trials,
        target,
        success_fraction: runs.iter().filter(|r| r.reached_target).count() as f64 / runs.len() as f64,
        mean_density: dens.iter().sum::<f64>() / dens.len() as f64,
        min_density: dens.iter().copied().fold(f64::INFINITY, f64::min),
        max_density: dens.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        violations: runs.iter().filter(|r| !(r.sparseness.ok && r.sparseness.linear)).count(),
        runs,
    };
    let path = a.out.unwrap_or_else(|| out_dir.join(format!("trials-n{}-k{}-m{}.json", a.n, a.k, a.master_seed)));
    write_file(&path, &to_json(&report)?)?;
    println!(
        "trials={} success={:.3} density mean={:.4} min={:.4} max={:.4} violations={}",
        a.trials, report.success_fraction, report.mean_density, report.min_density, report.max_density, report.violations
    );
    println!("wrote {}", path.display());
    if report.violations > 0 {
        Err(Failure::Verify)
    } else if report.success_fraction < 1.0 {
        Err(Failure::Missed)
    } else {
        Ok(())
    }
}

pub fn verify(a: VerifyArgs) -> CmdResult {
    let text = fs::read_to_string(&a.file).with_context(|| format!("reading {}", a.file.display()))?;
    let s = read_sts(&text)?;
    if a.k < 2 {
        return Err(config(format!("k must be at least 2, got {}", a.k)));
    }
    let (summary, report) = check_sparse(&s, a.k, a.samples, a.seed)?;
    println!("n={} blocks={}", s.n(), s.len());
    println!("linear: {}", if summary.linear { "yes" } else { "no" });
    println!("{}-sparse ({}): {}", a.k, summary.method, if summary.ok { "yes" } else { "no" });
    if let Some(w) = &report.witness {
        let verts: Vec<String> = w.vertices.iter().map(|v| v.to_string()).collect();
        let blocks: Vec<String> = w.blocks.iter().map(|t| format!("{} {} {}", t.a(), t.b(), t.c())).collect();
        println!("witness vertices: {}", verts.join(" "));
        println!("witness blocks: {}", blocks.join(" | "));
        let sub = TripleSystem::compact(&w.blocks);
        if let Some(name) = configuration_name(&sub) {
            println!("witness is a {name}");
        }
    }
    if summary.linear && summary.ok {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}

pub fn trajectory(a: TrajectoryArgs, out_dir: &Path) -> CmdResult {
    let cat = catalog_for(a.k)?;
    let params = TrajectoryParams::new(a.n, a.k, &cat, constants(&a.constants))?;
    let v = params.validate()?;
    let csv = params.grid_csv(a.grid)?;
    let path = a.out.unwrap_or_else(|| out_dir.join(format!("trajectory-n{}-k{}.csv", a.n, a.k)));
    write_file(&path, &csv)?;
    println!(
        "tau_cut={} f_edge(tau_cut)={:.4} eps(tau_cut)n={:.4}",
        v.tau_cut, v.f_edge_at_cut, v.eps_n_at_cut
    );
    println!("wrote {}", path.display());
    Ok(())
}

#[derive(Serialize)]
struct DesignSummary {
    schema: &'static str,
    n: usize,
    q: usize,
    r: usize,
    k: usize,
    gamma: f64,
    seed: u64,
    blocks: usize,
    report: DesignReport,
    weak_check: WeakReport,
}

pub fn design(a: DesignArgs, out_dir: &Path) -> CmdResult {
    let theta = match a.theta {
        Some(t) => t,
        None => theta_max(a.q, a.r, a.k)?,
    };
    let (system, report) = build_weak_sparse(a.n, a.q, a.r, a.k, a.gamma, theta, a.seed)?;
    let weak = is_weakly_k_sparse(&system, a.k)?;
    let prefix = a
        .out
        .unwrap_or_else(|| out_dir.join(format!("design-n{}-q{}-r{}-k{}-s{}", a.n, a.q, a.r, a.k, a.seed)));
    write_file(&with_ext(&prefix, "qsys"), &system.to_text())?;
    println!(
        "blocks={} target={:.1} coverage={:.4} theta={:.4} resample_rounds={} weakly_sparse={}",
        system.len(),
        report.target_blocks,
        report.coverage,
        theta,
        report.sparsify.rounds,
        weak.ok
    );
    let (ok, meets) = (weak.ok && system.is_partial_steiner(), report.meets_target);
    let summary = DesignSummary {
        schema: "sts-design v1",
        n: a.n,
        q: a.q,
        r: a.r,
        k: a.k,
        gamma: a.gamma,
        seed: a.seed,
        blocks: system.len(),
        report,
        weak_check: weak,
    };
    write_file(&with_ext(&prefix, "json"), &to_json(&summary)?)?;
    println!("wrote {}.{{qsys,json}}", prefix.display());
    if !ok {
        Err(Failure::Verify)
    } else if !meets {
        Err(Failure::Missed)
    } else {
        Ok(())
    }
}

pub fn count(a: CountArgs) -> CmdResult {
    let cat = catalog_for(a.k)?;
    let c = count_exponent_constant(a.k, &cat)?;
    let log = conjectured_log_count(a.n, a.k, &cat)?;
    println!("exponent constant: {c}");
    println!("conjectured ln(count) for n={}: {log:.6e}", a.n);
    Ok(())
}
