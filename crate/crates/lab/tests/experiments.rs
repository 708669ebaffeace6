use aqcsim::ec3::{removable_clauses, Clause, Ec3Instance};
use aqcsim::state::energy_expectation;
use aqclab::config::{AlgorithmName, IntegratorConfig, PathKind, PathSpec, SearchConfig};
use aqclab::experiments::*;
use aqclab::formats::write_instance;
use aqclab::problem::{derive_seed, Problem};
use aqclab::RunConfig;

fn five_bit() -> Ec3Instance {
    let c = |i, j, k| Clause::new(i, j, k).unwrap();
    Ec3Instance::new(5, vec![c(1, 2, 3), c(1, 2, 4), c(1, 2, 5), c(1, 3, 4)], None).unwrap()
}

fn spec(algorithm: AlgorithmName, kind: PathKind) -> PathSpec {
    PathSpec { algorithm, kind, ..PathSpec::default() }
}

fn config_for(inst: &Ec3Instance, dir: &std::path::Path) -> RunConfig {
    let file = dir.join("inst.ec3");
    write_instance(&file, inst).unwrap();
    let mut cfg = RunConfig::default();
    cfg.instance.file = Some(file);
    cfg.output_dir = dir.join("out");
    cfg
}

#[test]
fn zero_runtime_leaves_the_initial_state() {
    let inst = five_bit();
    for alg in [AlgorithmName::X, AlgorithmName::Xyz, AlgorithmName::Xy] {
        let p = Problem::build(&spec(alg, PathKind::Straight), Some(&inst), 5, 1.0, None).unwrap();
        let (probe, psi) = p.probe(0.0, &IntegratorConfig::default()).unwrap();
        assert_eq!(psi.amplitudes(), p.initial.amplitudes());
        let e0 = energy_expectation(&p.initial, &p.final_op).unwrap();
        assert!((probe.energy - e0).abs() < 1e-12, "{alg:?}");
        assert_eq!(probe.steps, 0);
    }
}

#[test]
fn runtime_search_certifies_its_bracket() {
    let inst = five_bit();
    let p = Problem::build(&spec(AlgorithmName::Xy, PathKind::Straight), Some(&inst), 5, 1.0, None).unwrap();
    let search = SearchConfig::default();
    let integ = IntegratorConfig::default();
    let r = successful_runtime(std::slice::from_ref(&p), &search, &integ).unwrap();
    assert!(!r.censored && r.valid());
    assert!(r.energy <= 0.5 && r.p1 >= 0.5 - 1e-9);
    let lower = r.probes.iter().find(|q| q.omega_t == r.t_fail).expect("failing probe is recorded");
    assert!(lower.energy > 0.5);
    assert!(r.t_s / r.t_fail <= 1.0 + 2.0 * search.rel_tol);
    assert_eq!(r.certificate.bracket, (r.t_fail, r.t_s));

    // the certificate is reproducible from a fresh evolution
    let (again, _) = p.probe(r.t_s, &integ).unwrap();
    assert_eq!(again.checksum, r.certificate.checksum);
    assert_eq!(again.energy, r.certificate.energy);

    // energy falls with runtime along the probe sequence, up to 10%
    let mut by_t: Vec<_> = r.probes.iter().map(|q| (q.omega_t, q.energy)).collect();
    by_t.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in by_t.windows(2) {
        assert!(w[1].1 <= 1.1 * w[0].1, "{by_t:?}");
    }
}

#[test]
fn search_walks_down_from_a_long_start_and_censors_at_the_cap() {
    let inst = five_bit();
    let p = Problem::build(&spec(AlgorithmName::Xy, PathKind::Straight), Some(&inst), 5, 1.0, None).unwrap();
    let integ = IntegratorConfig::default();
    let up = successful_runtime(std::slice::from_ref(&p), &SearchConfig::default(), &integ).unwrap();
    let down = successful_runtime(
        std::slice::from_ref(&p),
        &SearchConfig { t_start: 64.0, ..SearchConfig::default() },
        &integ,
    )
    .unwrap();
    assert!(down.energy <= 0.5 && !down.censored);
    assert!(down.t_s / down.t_fail <= 1.1);
    // both brackets straddle the same threshold crossing
    assert!(down.t_fail < up.t_s && up.t_fail < down.t_s, "{up:?} {down:?}");

    let capped = successful_runtime(
        std::slice::from_ref(&p),
        &SearchConfig { t_start: 0.25, t_cap: 1.0, ..SearchConfig::default() },
        &integ,
    )
    .unwrap();
    assert!(capped.censored);
    assert_eq!(capped.t_s, 1.0);
    assert_eq!(capped.probes.len(), 3);
}

#[test]
fn sweep_rows_respect_the_energy_bound() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config_for(&five_bit(), dir.path());
    cfg.variants = vec![
        spec(AlgorithmName::X, PathKind::Straight),
        spec(AlgorithmName::Xyz, PathKind::Straight),
        spec(AlgorithmName::Xy, PathKind::Straight),
        spec(AlgorithmName::Xy, PathKind::Nonlinear),
        spec(AlgorithmName::Xy, PathKind::ClauseByClause),
    ];
    let runtimes = [0.0, 0.5, 2.0, 8.0, 32.0];
    let rows = energy_vs_runtime(&cfg, &runtimes).unwrap();
    assert_eq!(rows.len(), 25);
    for r in &rows {
        assert!(r.probe.energy >= (1.0 - r.probe.p1) - 1e-9, "{r:?}");
        assert!(r.probe.valid());
    }
    let text = std::fs::read_to_string(cfg.output_dir.join("energy_vs_runtime.csv")).unwrap();
    assert_eq!(text.lines().count(), 26);
    assert!(!text.contains('\r'));
}

#[test]
fn long_runtime_on_an_easy_instance_reaches_the_ground_state() {
    let c = |i, j, k| Clause::new(i, j, k).unwrap();
    let inst = Ec3Instance::new(4, vec![c(1, 2, 3), c(1, 2, 4)], None).unwrap();
    // solutions 0001, 0010 and 1100: run in the weight-1 sector
    let p = Problem::build(&spec(AlgorithmName::Xy, PathKind::Straight), Some(&inst), 4, 1.0, Some(1)).unwrap();
    assert_eq!(p.ground_states.len(), 3);
    let (probe, _) = p.probe(200.0, &IntegratorConfig::default()).unwrap();
    assert!(probe.energy < 0.05, "{probe:?}");
}

#[test]
fn scanning_weights_never_does_worse() {
    let inst = five_bit();
    let s = spec(AlgorithmName::Xyz, PathKind::Straight);
    let known = Problem::build_all(&s, Some(&inst), 5, 1.0, false).unwrap();
    let all = Problem::build_all(&s, Some(&inst), 5, 1.0, true).unwrap();
    assert_eq!(all.len(), 6);
    let integ = IntegratorConfig::default();
    let (a, _) = probe_best(&known, 4.0, &integ).unwrap();
    let (b, _) = probe_best(&all, 4.0, &integ).unwrap();
    assert!(b.energy <= a.energy);
}

#[test]
fn single_instance_scaling_has_degenerate_quartiles() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::default();
    cfg.output_dir = dir.path().to_path_buf();
    cfg.master_seed = 3;
    cfg.scaling.n_list = vec![7];
    let (records, runs) = scaling_study(&cfg).unwrap();
    assert_eq!(records.len(), 1);
    let t = runs[0].result.t_s;
    assert_eq!(records[0].quartiles, Some((t, t, t)));
    assert_eq!(runs[0].seed, Some(derive_seed(3, 7, 0)));
    assert!(dir.path().join("instances/n7_i0.ec3").exists());
}

#[test]
fn zero_bump_gap_curve_matches_the_straight_line() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config_for(&five_bit(), dir.path());
    cfg.variants = vec![
        spec(AlgorithmName::Xy, PathKind::Straight),
        PathSpec { alpha: 0.0, ..spec(AlgorithmName::Xy, PathKind::Nonlinear) },
    ];
    let g = gap_report(&cfg, 51).unwrap();
    for i in 0..51 {
        assert!((g[0].curve.gap[i] - g[1].curve.gap[i]).abs() < 1e-9);
        assert!((g[0].curve.e1[i] - g[1].curve.e1[i]).abs() < 1e-9);
    }
    assert!(cfg.output_dir.join("gap_xy-nonlinear-a0.csv").exists());
}

#[test]
fn removed_clause_choice_changes_the_minimum_gap() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::default();
    cfg.instance.n = Some(10);
    cfg.instance.seed = Some(1);
    cfg.output_dir = dir.path().to_path_buf();
    let (inst, _) = prepare_instance(&cfg).unwrap();
    let removable = removable_clauses(inst.as_ref().unwrap());
    assert!(removable.len() >= 3);
    cfg.variants = removable[..3]
        .iter()
        .map(|c| PathSpec { removed_clause: Some(c.bits()), ..spec(AlgorithmName::Xy, PathKind::Nonlinear) })
        .collect();
    let g = gap_report(&cfg, 51).unwrap();
    let gaps: Vec<f64> = g.iter().map(|c| c.curve.min_gap.1).collect();
    assert!(gaps.iter().all(|v| *v > 0.0));
    assert_eq!(g.iter().map(|c| c.path.clone()).collect::<std::collections::BTreeSet<_>>().len(), 3);
    // curves differ even where the minimum sits at the shared endpoint
    let distinct = |a: &GapSummary, b: &GapSummary| a.curve.gap.iter().zip(&b.curve.gap).any(|(x, y)| (x - y).abs() > 1e-6);
    assert!(distinct(&g[0], &g[1]) && distinct(&g[1], &g[2]) && distinct(&g[0], &g[2]));
}

#[test]
fn evolve_series_agrees_with_a_probe_and_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config_for(&five_bit(), dir.path());
    cfg.samples = 11;
    let full = evolve_series(&cfg, 6.0, &EvolveOptions::default()).unwrap();
    assert_eq!(full.rows.len(), 11);
    assert_eq!(full.rows[0].omega_t, 0.0);
    assert!((full.rows[10].omega_t - 6.0).abs() < 1e-12);
    let p = Problem::build(&cfg.path, Some(&five_bit()), 5, 1.0, None).unwrap();
    let (probe, _) = p.probe(6.0, &cfg.integrator).unwrap();
    assert_eq!(probe.checksum, full.checksum);
    assert_eq!(full.rows[10].energy, probe.energy);

    let steps = full.diagnostics.steps;
    let opts = EvolveOptions { checkpoint_every: Some(steps / 3 + 1), resume: None };
    evolve_series(&cfg, 6.0, &opts).unwrap();
    let stem = cfg.output_dir.join("checkpoint");
    let resumed = evolve_series(&cfg, 6.0, &EvolveOptions { checkpoint_every: None, resume: Some(stem) }).unwrap();
    assert_eq!(resumed.checksum, full.checksum);
    assert!(resumed.rows.len() < 11 && !resumed.rows.is_empty());
    for (a, b) in resumed.rows.iter().rev().zip(full.rows.iter().rev()) {
        assert_eq!(a, b);
    }
    assert_eq!(resumed.rows.last().unwrap().energy, probe.energy);
}

#[test]
fn thread_count_does_not_change_the_output() {
    let read = |threads| {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = config_for(&five_bit(), dir.path());
        cfg.threads = Some(threads);
        cfg.variants = vec![spec(AlgorithmName::Xy, PathKind::Straight), spec(AlgorithmName::Xyz, PathKind::Straight)];
        energy_vs_runtime(&cfg, &[1.0, 3.0, 5.0]).unwrap();
        std::fs::read(cfg.output_dir.join("energy_vs_runtime.csv")).unwrap()
    };
    assert_eq!(read(1), read(3));
}

#[test]
fn number_format_round_trips() {
    for x in [0.0, 1.0, 0.1, 3.75, 2.2e-35, 1e-4, 9.99e-5, 1e16, -4.5e-9, 123456.789] {
        assert_eq!(num(x).parse::<f64>().unwrap(), x);
    }
    assert_eq!(num(2.5e-35), "2.5e-35");
    assert_eq!(num(0.5), "0.5");
}
