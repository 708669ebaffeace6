//! Experiments: runtime search, final-energy sweeps, scaling studies, gap
//! reports and single evolutions with a time series.

use std::fs;
use std::path::Path;

use aqcsim::ec3::Ec3Instance;
use aqcsim::integrator::{Diagnostics, EvolutionSpec, Evolver, TimeDependentHamiltonian};
use aqcsim::paths::hamiltonian_at;
use aqcsim::spectra::{gap_curve, uniform_grid, EigenOptions, GapCurve, Sector};
use aqcsim::state::energy_expectation;
use aqcsim::StateVector;
use rayon::prelude::*;

use crate::config::{AlgorithmName, IntegratorConfig, PathSpec, RunConfig, SearchConfig};
use crate::error::{LabError, Result};
use crate::formats::{read_checkpoint, write_checkpoint, write_instance};
use crate::problem::{derive_seed, evolution_spec, MAX_REFINEMENTS, register_size, resolve_instance, Probe, Problem, GENERATOR_RESTARTS};
use crate::stats::{quartiles, QUANTILE_METHOD};

/// Run the protocol for every candidate sector and keep the lowest energy.
pub fn probe_best(problems: &[Problem], omega_t: f64, integ: &IntegratorConfig) -> Result<(Probe, StateVector)> {
    let mut best: Option<(Probe, StateVector)> = None;
    for p in problems {
        let (probe, psi) = p.probe(omega_t, integ)?;
        if best.as_ref().is_none_or(|(b, _)| probe.energy < b.energy) {
            best = Some((probe, psi));
        }
    }
    best.ok_or_else(|| LabError::Config("no protocol to run".into()))
}

/// Evidence for a reported successful runtime.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    /// SHA-256 of the state at `T_s`.
    pub checksum: String,
    pub energy: f64,
    /// `(T_fail, T_s)`.
    pub bracket: (f64, f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RuntimeSearchResult {
    /// `omega T_s`; the cap if the search was censored.
    pub t_s: f64,
    pub energy: f64,
    pub p1: f64,
    /// Largest probed runtime that failed; 0 if none was probed.
    pub t_fail: f64,
    /// No success up to the runtime cap.
    pub censored: bool,
    /// Every evolution in probe order.
    pub probes: Vec<Probe>,
    pub certificate: Certificate,
}

impl RuntimeSearchResult {
    pub fn total_steps(&self) -> u64 {
        self.probes.iter().map(|p| p.steps).sum()
    }

    /// All probes stayed inside their symmetry sector.
    pub fn valid(&self) -> bool {
        self.probes.iter().all(Probe::valid)
    }
}

const MAX_DESCENT: usize = 60;
const MAX_BISECTIONS: usize = 60;

/// Smallest runtime with `(E - E_0) / omega <= 1/2`: grow the runtime by
/// `growth` from `t_start` until the criterion holds, then bisect the
/// bracket down to a relative width of `rel_tol`. Every probe is a fresh
/// evolution at constant speed.
pub fn successful_runtime(
    problems: &[Problem],
    search: &SearchConfig,
    integ: &IntegratorConfig,
) -> Result<RuntimeSearchResult> {
    let mut probes: Vec<Probe> = Vec::new();
    let mut run = |t: f64| -> Result<Probe> {
        let (p, _) = probe_best(problems, t, integ)?;
        probes.push(p.clone());
        Ok(p)
    };
    let mut fail: Option<Probe> = None;
    let mut t = search.t_start;
    let mut ok = loop {
        let p = run(t)?;
        if p.succeeded() {
            break p;
        }
        if t >= search.t_cap {
            let certificate = Certificate { checksum: p.checksum.clone(), energy: p.energy, bracket: (p.omega_t, p.omega_t) };
            return Ok(RuntimeSearchResult {
                t_s: search.t_cap,
                energy: p.energy,
                p1: p.p1,
                t_fail: p.omega_t,
                censored: true,
                probes,
                certificate,
            });
        }
        fail = Some(p);
        t = (t * search.growth).min(search.t_cap);
    };
    if fail.is_none() {
        // the first probe already succeeded: walk down to a failing runtime
        let mut t = ok.omega_t;
        for _ in 0..MAX_DESCENT {
            t /= search.growth;
            let p = run(t)?;
            if p.succeeded() {
                ok = p;
            } else {
                fail = Some(p);
                break;
            }
        }
        if fail.is_none() {
            let p = run(0.0)?;
            if p.succeeded() {
                ok = p;
            } else {
                fail = Some(p);
            }
        }
    }
    let mut t_fail = fail.as_ref().map_or(0.0, |p| p.omega_t);
    for _ in 0..MAX_BISECTIONS {
        if t_fail <= 0.0 || ok.omega_t - t_fail <= search.rel_tol * t_fail {
            break;
        }
        let p = run(0.5 * (ok.omega_t + t_fail))?;
        if p.succeeded() {
            ok = p;
        } else {
            t_fail = p.omega_t;
        }
    }
    Ok(RuntimeSearchResult {
        t_s: ok.omega_t,
        energy: ok.energy,
        p1: ok.p1,
        t_fail,
        censored: false,
        certificate: Certificate { checksum: ok.checksum.clone(), energy: ok.energy, bracket: (t_fail, ok.omega_t) },
        probes,
    })
}

/// Thread pool honouring `AQCLAB_THREADS` and the config.
pub fn pool(cfg: &RunConfig) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.worker_threads())
        .build()
        .map_err(|e| LabError::Config(e.to_string()))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(LabError::io(path))?;
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(file))
}

/// Shortest round-trip decimal, in exponent form outside `[1e-4, 1e16)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, num)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(LabError::io(dir))
}

/// Resolve and persist the configured instance.
pub fn prepare_instance(cfg: &RunConfig) -> Result<(Option<Ec3Instance>, usize)> {
    let needs_instance = cfg.path_variants().iter().any(|v| v.algorithm != AlgorithmName::Ising);
    let inst = if needs_instance || cfg.instance.file.is_some() {
        resolve_instance(&cfg.instance, cfg.master_seed)?
    } else {
        None
    };
    let n = register_size(cfg, inst.as_ref())?;
    if let Some(inst) = &inst {
        ensure_dir(&cfg.output_dir)?;
        write_instance(&cfg.output_dir.join("instance.ec3"), inst)?;
    }
    Ok((inst, n))
}

/// `runtime` subcommand: one search per path variant.
/// Writes `runtime.csv` and `runtime_probes.csv`.
pub fn runtime_report(cfg: &RunConfig) -> Result<Vec<(String, RuntimeSearchResult)>> {
    let (inst, n) = prepare_instance(cfg)?;
    let variants = cfg.path_variants();
    let results: Vec<(String, RuntimeSearchResult)> = pool(cfg)?.install(|| {
        variants
            .par_iter()
            .map(|spec| {
                let problems = Problem::build_all(spec, inst.as_ref(), n, cfg.omega, cfg.scan_hamming)?;
                Ok((spec.label(), successful_runtime(&problems, &cfg.search, &cfg.integrator)?))
            })
            .collect::<Result<_>>()
    })?;
    ensure_dir(&cfg.output_dir)?;
    let mut summary = csv_writer(&cfg.output_dir.join("runtime.csv"))?;
    summary.write_record([
        "path", "n", "t_s", "t_fail", "energy", "p1", "censored", "valid", "probes", "total_steps", "checksum",
    ])?;
    let mut detail = csv_writer(&cfg.output_dir.join("runtime_probes.csv"))?;
    detail.write_record([
        "path", "probe", "omega_t", "energy", "p1", "leakage", "valid", "steps", "dt", "norm_drift", "checksum",
    ])?;
    for (label, r) in &results {
        summary.write_record([
            label.clone(),
            n.to_string(),
            num(r.t_s),
            num(r.t_fail),
            num(r.energy),
            num(r.p1),
            r.censored.to_string(),
            r.valid().to_string(),
            r.probes.len().to_string(),
            r.total_steps().to_string(),
            r.certificate.checksum.clone(),
        ])?;
        for (i, p) in r.probes.iter().enumerate() {
            detail.write_record([
                label.clone(),
                i.to_string(),
                num(p.omega_t),
                num(p.energy),
                num(p.p1),
                opt(p.leakage),
                p.valid().to_string(),
                p.steps.to_string(),
                num(p.dt),
                num(p.norm_drift),
                p.checksum.clone(),
            ])?;
        }
    }
    summary.flush().map_err(LabError::io(&cfg.output_dir))?;
    detail.flush().map_err(LabError::io(&cfg.output_dir))?;
    Ok(results)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub path: String,
    pub probe: Probe,
}

/// Final energy and ground-state occupation for every path variant and
/// runtime in `runtimes`. Rows are ordered by variant, then runtime.
pub fn energy_vs_runtime(cfg: &RunConfig, runtimes: &[f64]) -> Result<Vec<SweepRow>> {
    let (inst, n) = prepare_instance(cfg)?;
    let variants = cfg.path_variants();
    let protocols: Vec<(String, Vec<Problem>)> = variants
        .iter()
        .map(|spec| Ok((spec.label(), Problem::build_all(spec, inst.as_ref(), n, cfg.omega, cfg.scan_hamming)?)))
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, f64)> =
        (0..protocols.len()).flat_map(|v| runtimes.iter().map(move |&t| (v, t))).collect();
    let rows = pool(cfg)?.install(|| {
        jobs.par_iter()
            .map(|&(v, t)| {
                let (probe, _) = probe_best(&protocols[v].1, t, &cfg.integrator)?;
                Ok(SweepRow { path: protocols[v].0.clone(), probe })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    ensure_dir(&cfg.output_dir)?;
    let mut w = csv_writer(&cfg.output_dir.join("energy_vs_runtime.csv"))?;
    w.write_record(["path", "omega_t", "energy", "p1", "leakage", "valid", "steps", "dt", "norm_drift"])?;
    for r in &rows {
        let p = &r.probe;
        w.write_record([
            r.path.clone(),
            num(p.omega_t),
            num(p.energy),
            num(p.p1),
            opt(p.leakage),
            p.valid().to_string(),
            p.steps.to_string(),
            num(p.dt),
            num(p.norm_drift),
        ])?;
    }
    w.flush().map_err(LabError::io(&cfg.output_dir))?;
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingInstance {
    pub path: String,
    pub n: usize,
    pub index: usize,
    /// Generator seed; `None` for the instance-free Ising benchmark.
    pub seed: Option<u64>,
    pub result: RuntimeSearchResult,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingRecord {
    pub path: String,
    pub n: usize,
    pub t_s: Vec<f64>,
    pub censored: usize,
    /// `None` when every run was censored and censored runs are excluded.
    pub quartiles: Option<(f64, f64, f64)>,
}

/// Successful runtimes over `scaling.n_list` with `instances_per_n`
/// generated instances each (seeds derived from the master seed). Writes
/// `scaling_instances.csv` and `scaling.csv`; instances are persisted under
/// `instances/`.
pub fn scaling_study(cfg: &RunConfig) -> Result<(Vec<ScalingRecord>, Vec<ScalingInstance>)> {
    let variants = cfg.path_variants();
    let inst_dir = cfg.output_dir.join("instances");
    ensure_dir(&inst_dir)?;
    let mut jobs: Vec<(usize, usize, usize, usize, Option<u64>)> = Vec::new();
    let mut instances: Vec<Option<Ec3Instance>> = Vec::new();
    for &n in &cfg.scaling.n_list {
        let ising_only = variants.iter().all(|v| v.algorithm == AlgorithmName::Ising);
        let count = if ising_only { 1 } else { cfg.scaling.instances_per_n.max(1) };
        for index in 0..count {
            let (inst, seed) = if ising_only {
                (None, None)
            } else {
                let seed = derive_seed(cfg.master_seed, n as u64, index as u64);
                let inst = aqcsim::ec3::generate_hard_instance(n, seed, GENERATOR_RESTARTS)?;
                write_instance(&inst_dir.join(format!("n{n}_i{index}.ec3")), &inst)?;
                (Some(inst), Some(seed))
            };
            for v in 0..variants.len() {
                jobs.push((v, n, index, instances.len(), seed));
            }
            instances.push(inst);
        }
    }
    let runs: Vec<ScalingInstance> = pool(cfg)?.install(|| {
        jobs.par_iter()
            .map(|&(v, n, index, slot, seed)| {
                let spec = &variants[v];
                let problems = Problem::build_all(spec, instances[slot].as_ref(), n, cfg.omega, cfg.scan_hamming)?;
                let result = successful_runtime(&problems, &cfg.search, &cfg.integrator)?;
                Ok(ScalingInstance { path: spec.label(), n, index, seed, result })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut records = Vec::new();
    for spec in &variants {
        let label = spec.label();
        for &n in &cfg.scaling.n_list {
            let mine: Vec<&ScalingInstance> = runs.iter().filter(|r| r.path == label && r.n == n).collect();
            let t_s: Vec<f64> = mine.iter().map(|r| r.result.t_s).collect();
            let censored = mine.iter().filter(|r| r.result.censored).count();
            let kept: Vec<f64> = mine
                .iter()
                .filter(|r| !(cfg.scaling.exclude_censored && r.result.censored))
                .map(|r| r.result.t_s)
                .collect();
            records.push(ScalingRecord { path: label.clone(), n, t_s, censored, quartiles: quartiles(&kept) });
        }
    }
    let mut w = csv_writer(&cfg.output_dir.join("scaling_instances.csv"))?;
    w.write_record(["path", "n", "index", "seed", "t_s", "censored", "t_fail", "energy", "p1", "valid", "checksum"])?;
    for r in &runs {
        w.write_record([
            r.path.clone(),
            r.n.to_string(),
            r.index.to_string(),
            r.seed.map_or_else(String::new, |s| s.to_string()),
            num(r.result.t_s),
            r.result.censored.to_string(),
            num(r.result.t_fail),
            num(r.result.energy),
            num(r.result.p1),
            r.result.valid().to_string(),
            r.result.certificate.checksum.clone(),
        ])?;
    }
    w.flush().map_err(LabError::io(&cfg.output_dir))?;
    let mut w = csv_writer(&cfg.output_dir.join("scaling.csv"))?;
    w.write_record(["path", "n", "instances", "censored", "q1", "median", "q3", "quantile_method", "censored_excluded"])?;
    for r in &records {
        let (q1, med, q3) = r.quartiles.map_or((None, None, None), |(a, b, c)| (Some(a), Some(b), Some(c)));
        w.write_record([
            r.path.clone(),
            r.n.to_string(),
            r.t_s.len().to_string(),
            r.censored.to_string(),
            opt(q1),
            opt(med),
            opt(q3),
            QUANTILE_METHOD.to_string(),
            cfg.scaling.exclude_censored.to_string(),
        ])?;
    }
    w.flush().map_err(LabError::io(&cfg.output_dir))?;
    Ok((records, runs))
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapSummary {
    pub path: String,
    pub curve: GapCurve,
}

fn sector_name(s: Sector) -> String {
    match s {
        Sector::Full => "full".into(),
        Sector::HammingWeight(w) => format!("weight-{w}"),
        Sector::SpinFlip { even: true } => "spin-flip-even".into(),
        Sector::SpinFlip { even: false } => "spin-flip-odd".into(),
    }
}

fn file_label(label: &str) -> String {
    label.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' }).collect()
}

/// Gap curves of every path variant on a uniform grid with `points` points.
/// Writes `gap_<path>.csv` per variant and `gap_summary.csv`. Energies are in
/// units of omega.
pub fn gap_report(cfg: &RunConfig, points: usize) -> Result<Vec<GapSummary>> {
    let (inst, n) = prepare_instance(cfg)?;
    let grid = uniform_grid(points);
    let variants = cfg.path_variants();
    let problems: Vec<Problem> =
        variants.iter().map(|spec| Problem::build(spec, inst.as_ref(), n, cfg.omega, None)).collect::<Result<_>>()?;
    let opts = EigenOptions::default();
    let curves: Vec<GapSummary> = pool(cfg)?.install(|| {
        problems
            .par_iter()
            .map(|p| {
                let mut curve = gap_curve(&p.path, &grid, p.gap_sector, &opts)?;
                let scale = 1.0 / cfg.omega;
                for v in [&mut curve.e1, &mut curve.e2, &mut curve.gap] {
                    v.iter_mut().for_each(|x| *x *= scale);
                }
                curve.min_gap.1 *= scale;
                Ok(GapSummary { path: p.label.clone(), curve })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    ensure_dir(&cfg.output_dir)?;
    for g in &curves {
        let mut w = csv_writer(&cfg.output_dir.join(format!("gap_{}.csv", file_label(&g.path))))?;
        w.write_record(["s", "e1", "e2", "gap"])?;
        for i in 0..g.curve.s_grid.len() {
            let c = &g.curve;
            w.write_record([num(c.s_grid[i]), num(c.e1[i]), num(c.e2[i]), num(c.gap[i])])?;
        }
        w.flush().map_err(LabError::io(&cfg.output_dir))?;
    }
    let mut w = csv_writer(&cfg.output_dir.join("gap_summary.csv"))?;
    w.write_record(["path", "sector", "s_star", "gap_min", "max_residual"])?;
    for g in &curves {
        w.write_record([
            g.path.clone(),
            sector_name(g.curve.sector),
            num(g.curve.min_gap.0),
            num(g.curve.min_gap.1),
            num(g.curve.max_residual),
        ])?;
    }
    w.flush().map_err(LabError::io(&cfg.output_dir))?;
    Ok(curves)
}

/// One sample of an evolution's time series.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesRow {
    pub omega_t: f64,
    pub s: f64,
    /// `(<H_f> - E_0) / omega`.
    pub energy: f64,
    /// `<H(s)> / omega`.
    pub energy_instantaneous: f64,
    pub p1: f64,
    pub leakage: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EvolveOptions {
    /// Write a checkpoint every this many steps to `<output_dir>/checkpoint.*`.
    pub checkpoint_every: Option<u64>,
    /// Continue from `<stem>.state` / `<stem>.json`.
    pub resume: Option<std::path::PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvolveReport {
    pub rows: Vec<SeriesRow>,
    pub diagnostics: Diagnostics,
    /// Step used, in units of `1/omega`.
    pub dt: f64,
    pub wall_time_s: f64,
    pub checksum: String,
}

/// Single evolution of `[path]` for runtime `omega_t` with `samples`
/// evenly spaced observations. Writes `evolve.csv` and `evolve.json`.
pub fn evolve_series(cfg: &RunConfig, omega_t: f64, opts: &EvolveOptions) -> Result<EvolveReport> {
    let started = std::time::Instant::now();
    let (inst, n) = prepare_instance(cfg)?;
    let problem = Problem::build(&cfg.path, inst.as_ref(), n, cfg.omega, None)?;
    let at = |source| LabError::AtRuntime { omega_t, source };
    let total = omega_t / cfg.omega;
    let ham = TimeDependentHamiltonian::from_path(&problem.path, total).map_err(at)?;
    let mut spec = evolution_spec(&ham, &cfg.integrator, cfg.omega);
    let resume = opts.resume.as_ref().map(|stem| read_checkpoint(stem)).transpose()?;
    if let Some((_, dt)) = &resume {
        spec.dt = *dt;
    }

    let sample = |psi: &StateVector, t: f64| -> Result<SeriesRow> {
        let s = if total > 0.0 { (t / total).min(1.0) } else { 1.0 };
        let m = problem.measure(psi)?;
        let mut unit = psi.clone();
        unit.normalize();
        let inst_energy = energy_expectation(&unit, &hamiltonian_at(&problem.path, s)?)? / cfg.omega;
        Ok(SeriesRow { omega_t: t * cfg.omega, s, energy: m.energy, energy_instantaneous: inst_energy, p1: m.p1, leakage: m.leakage })
    };
    ensure_dir(&cfg.output_dir)?;
    let checkpoint_stem = cfg.output_dir.join("checkpoint");
    let samples = cfg.samples.max(2);
    let targets: Vec<f64> = (0..samples).map(|i| total * i as f64 / (samples - 1) as f64).collect();
    let attempt = |spec: EvolutionSpec| -> Result<(Vec<SeriesRow>, StateVector, Diagnostics)> {
        let mut ev = match &resume {
            Some((cp, _)) => Evolver::resume(&ham, spec, cp).map_err(at)?,
            None => Evolver::new(&problem.initial, &ham, spec).map_err(at)?,
        };
        let mut next = targets.iter().position(|&t| t > ev.time()).unwrap_or(samples);
        let mut rows = Vec::new();
        if resume.is_none() {
            rows.push(sample(&ev.state(), 0.0)?);
            next = next.max(1);
        }
        let mut failure: Option<LabError> = None;
        let mut last_checkpoint = ev.diagnostics().steps;
        let run = ev.run_with(|e| {
            let t = e.time();
            while next < samples && (t >= targets[next] - 1e-12 * total.max(1.0) || e.is_finished()) {
                match sample(&e.state(), t) {
                    Ok(r) => rows.push(r),
                    Err(err) => {
                        failure = Some(err);
                        return Ok(false);
                    }
                }
                next += 1;
            }
            if let Some(k) = opts.checkpoint_every {
                let steps = e.diagnostics().steps;
                if k > 0 && steps >= last_checkpoint + k {
                    last_checkpoint = steps;
                    if let Err(err) = write_checkpoint(&checkpoint_stem, &e.checkpoint(), spec.dt) {
                        failure = Some(err);
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        });
        run.map_err(at)?;
        if let Some(err) = failure {
            return Err(err);
        }
        if next < samples && rows.last().is_none_or(|r: &SeriesRow| r.omega_t != ev.time() * cfg.omega) {
            rows.push(sample(&ev.state(), ev.time())?);
        }
        Ok((rows, ev.state(), ev.diagnostics()))
    };
    let mut refinements = 0;
    let (rows, psi, diagnostics) = loop {
        match attempt(spec) {
            Err(LabError::AtRuntime { source: aqcsim::Error::Divergence { .. }, .. })
                if cfg.integrator.dt.is_none() && resume.is_none() && refinements < MAX_REFINEMENTS =>
            {
                spec.dt /= 2.0;
                refinements += 1;
            }
            other => break other?,
        }
    };
    let mut w = csv_writer(&cfg.output_dir.join("evolve.csv"))?;
    w.write_record(["omega_t", "s", "energy", "energy_instantaneous", "p1", "leakage"])?;
    for r in &rows {
        w.write_record([
            num(r.omega_t),
            num(r.s),
            num(r.energy),
            num(r.energy_instantaneous),
            num(r.p1),
            opt(r.leakage),
        ])?;
    }
    w.flush().map_err(LabError::io(&cfg.output_dir))?;
    let report = EvolveReport {
        rows,
        diagnostics,
        dt: spec.dt * cfg.omega,
        wall_time_s: started.elapsed().as_secs_f64(),
        checksum: crate::formats::state_checksum(&psi),
    };
    let json = serde_json::json!({
        "path": problem.label,
        "omega_t": omega_t,
        "dt": spec.dt * cfg.omega,
        "steps": diagnostics.steps,
        "bootstrap_steps": diagnostics.bootstrap_steps,
        "rhs_evaluations": diagnostics.rhs_evaluations,
        "segments": diagnostics.segments,
        "norm_drift": diagnostics.norm_drift,
        "renormalizations": diagnostics.renormalizations,
        "wall_time_s": report.wall_time_s,
        "checksum": report.checksum,
    });
    let json_path = cfg.output_dir.join("evolve.json");
    fs::write(&json_path, serde_json::to_string_pretty(&json)?).map_err(LabError::io(&json_path))?;
    Ok(report)
}

/// Labels of the configured variants, in order.
pub fn variant_labels(cfg: &RunConfig) -> Vec<String> {
    cfg.path_variants().iter().map(PathSpec::label).collect()
}
