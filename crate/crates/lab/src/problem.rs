//! Turning a configuration into concrete evolutions: instance, path, initial
//! state and the observables measured at the end.

use aqcsim::ec3::{final_hamiltonian, generate_hard_instance, removable_clauses, solutions, Clause, Ec3Instance};
use aqcsim::integrator::{Diagnostics, EvolutionSpec, Evolver, TimeDependentHamiltonian};
use aqcsim::paths::{
    clause_by_clause_path, initial_hamiltonian, ising_path, nonlinear_smooth_path, straight_line_path, Algorithm, Path,
};
use aqcsim::spectra::{embed, lowest_eigs, EigenOptions, Sector};
use aqcsim::state::{dicke_state, energy_expectation, sector_leakage, uniform_superposition};
use aqcsim::{SqhOperator, StateVector};
use rand::seq::SliceRandom;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{AlgorithmName, InstanceSource, IntegratorConfig, PathKind, PathSpec, RunConfig};
use crate::error::{LabError, Result};
use crate::formats::{read_instance, state_checksum};

/// Restart budget handed to the instance generator.
pub const GENERATOR_RESTARTS: usize = 10_000;

/// Largest tolerated leakage out of the conserved Hamming sector.
pub const LEAKAGE_TOLERANCE: f64 = 1e-8;

/// Times the default step is halved after a norm-drift failure.
pub const MAX_REFINEMENTS: usize = 4;

/// Integrator settings for `ham`: the configured step (in units of
/// `1/omega`) or the default rule, never longer than the runtime.
pub fn evolution_spec(ham: &TimeDependentHamiltonian, integ: &IntegratorConfig, omega: f64) -> EvolutionSpec {
    let mut spec = match integ.dt {
        Some(dt) => EvolutionSpec::new(dt / omega),
        None => EvolutionSpec::default_for(ham),
    };
    if ham.total_time() > 0.0 {
        spec.dt = spec.dt.min(ham.total_time());
    }
    spec.norm_tolerance = integ.norm_tolerance;
    spec.renormalize = integ.renormalize;
    spec
}

/// Evolve `psi0` to the end of `ham`, calling `observer` after every step.
/// Without a configured step, a norm-drift failure halves the default step
/// and restarts, at most [`MAX_REFINEMENTS`] times. Returns the step used,
/// in units of time.
pub fn evolve_refined(
    psi0: &StateVector,
    ham: &TimeDependentHamiltonian,
    integ: &IntegratorConfig,
    omega: f64,
    mut observer: impl FnMut(&Evolver) -> aqcsim::Result<bool>,
) -> aqcsim::Result<(StateVector, Diagnostics, f64)> {
    let mut spec = evolution_spec(ham, integ, omega);
    let mut refinements = 0;
    loop {
        let mut ev = Evolver::new(psi0, ham, spec)?;
        match ev.run_with(&mut observer) {
            Ok(()) => return Ok((ev.state(), ev.diagnostics(), spec.dt)),
            Err(aqcsim::Error::Divergence { .. }) if integ.dt.is_none() && refinements < MAX_REFINEMENTS => {
                spec.dt /= 2.0;
                refinements += 1;
            }
            Err(e) => return Err(e),
        }
    }
}

/// Seed number `index` of the stream `stream` derived from `master`.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng.set_word_pos(2 * index as u128);
    rng.next_u64()
}

/// The instance named by the config, if any.
pub fn resolve_instance(src: &InstanceSource, master_seed: u64) -> Result<Option<Ec3Instance>> {
    if let Some(file) = &src.file {
        return read_instance(file).map(Some);
    }
    match src.n {
        Some(n) => {
            let seed = src.seed.unwrap_or_else(|| derive_seed(master_seed, n as u64, 0));
            Ok(Some(generate_hard_instance(n, seed, GENERATOR_RESTARTS)?))
        }
        None => Ok(None),
    }
}

/// One fully specified adiabatic protocol.
#[derive(Clone, Debug)]
pub struct Problem {
    pub label: String,
    pub algorithm: Algorithm,
    pub n: usize,
    pub omega: f64,
    pub path: Path,
    /// Energies are reported as `(<final_op> - ground_energy) / omega`.
    pub final_op: SqhOperator,
    pub ground_energy: f64,
    /// Basis states spanning the ground space of `final_op`; `P1` is their
    /// total probability.
    pub ground_states: Vec<usize>,
    pub initial: StateVector,
    /// Hamming weight conserved by the path.
    pub weight: Option<usize>,
    pub gap_sector: Sector,
}

impl Problem {
    /// Build the protocol of `spec` on `inst`. `weight` overrides the Hamming
    /// sector of weight-conserving algorithms.
    pub fn build(spec: &PathSpec, inst: Option<&Ec3Instance>, n: usize, omega: f64, weight: Option<usize>) -> Result<Self> {
        let algorithm = Algorithm::from(spec.algorithm);
        if spec.algorithm == AlgorithmName::Ising {
            if spec.kind != PathKind::Straight {
                return Err(LabError::Config("the Ising benchmark only has a straight path".into()));
            }
            let path = ising_path(n, omega)?;
            return Ok(Problem {
                label: spec.label(),
                algorithm,
                n,
                omega,
                final_op: path.final_operator().clone(),
                path,
                ground_energy: -(n as f64) * omega,
                ground_states: vec![0, (1 << n) - 1],
                initial: uniform_superposition(n)?,
                weight: None,
                gap_sector: Sector::SpinFlip { even: true },
            });
        }
        let inst = inst.ok_or_else(|| LabError::Config(format!("algorithm {} needs an instance", algorithm.label())))?;
        let hi = initial_hamiltonian(algorithm, inst, omega)?;
        let hf = final_hamiltonian(inst, omega);
        let path = match spec.kind {
            PathKind::Straight => straight_line_path(&hi, &hf)?,
            PathKind::Nonlinear => {
                let removed = match spec.removed_clause {
                    Some([i, j, k]) => Clause::new(i, j, k)?,
                    None => *removable_clauses(inst)
                        .first()
                        .ok_or_else(|| LabError::Config("instance has no removable clause".into()))?,
                };
                nonlinear_smooth_path(&hi, inst, omega, &removed, spec.alpha)?
            }
            PathKind::ClauseByClause => {
                let order = match (&spec.clause_order, spec.clause_order_seed) {
                    (Some(order), _) => order.clone(),
                    (None, Some(seed)) => {
                        let mut order: Vec<usize> = (0..inst.m()).collect();
                        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
                        order
                    }
                    (None, None) => (0..inst.m()).collect(),
                };
                clause_by_clause_path(&hi, inst, omega, &order)?
            }
        };
        let ground_states = solutions(inst)?;
        if ground_states.is_empty() {
            return Err(LabError::Config("instance has no satisfying assignment".into()));
        }
        let conserved = algorithm.conserves_hamming_weight();
        let weight = match (conserved, weight) {
            (false, _) => None,
            (true, Some(w)) => Some(w),
            (true, None) => Some(solution_weight(inst, &ground_states)?),
        };
        let initial = match (algorithm, weight) {
            (Algorithm::Xyz, Some(w)) => dicke_state(n, w)?,
            (Algorithm::Xy, Some(w)) => xy_ground_state(&hi, w)?,
            _ => uniform_superposition(n)?,
        };
        Ok(Problem {
            label: spec.label(),
            algorithm,
            n,
            omega,
            path: path.with_conserved_sector(weight),
            final_op: hf,
            ground_energy: 0.0,
            ground_states,
            initial,
            weight,
            gap_sector: weight.map_or(Sector::Full, Sector::HammingWeight),
        })
    }

    /// One problem per Hamming weight `0..=n` when scanning, else just the
    /// known solution's sector.
    pub fn build_all(spec: &PathSpec, inst: Option<&Ec3Instance>, n: usize, omega: f64, scan: bool) -> Result<Vec<Self>> {
        if scan && Algorithm::from(spec.algorithm).conserves_hamming_weight() {
            (0..=n).map(|w| Self::build(spec, inst, n, omega, Some(w))).collect()
        } else {
            Ok(vec![Self::build(spec, inst, n, omega, None)?])
        }
    }

    /// Evolve for the dimensionless runtime `omega_t` and measure.
    pub fn probe(&self, omega_t: f64, integ: &IntegratorConfig) -> Result<(Probe, StateVector)> {
        let at = |source| LabError::AtRuntime { omega_t, source };
        let total = omega_t / self.omega;
        let ham = TimeDependentHamiltonian::from_path(&self.path, total).map_err(at)?;
        let (psi, steps, drift, dt) = if total == 0.0 {
            (self.initial.clone(), 0, 0.0, 0.0)
        } else {
            let (psi, diag, dt) = evolve_refined(&self.initial, &ham, integ, self.omega, |_| Ok(true)).map_err(at)?;
            (psi, diag.steps, diag.norm_drift, dt * self.omega)
        };
        let m = self.measure(&psi)?;
        let probe = Probe { omega_t, energy: m.energy, p1: m.p1, leakage: m.leakage, steps, dt, norm_drift: drift, checksum: state_checksum(&psi) };
        Ok((probe, psi))
    }

    /// Energy above the ground level in units of `omega`, ground-space
    /// occupation and sector leakage of `psi`, measured on the normalized state.
    pub fn measure(&self, psi: &StateVector) -> Result<Measurement> {
        let mut unit = psi.clone();
        unit.normalize();
        let energy = (energy_expectation(&unit, &self.final_op)? - self.ground_energy) / self.omega;
        let p1 = self.ground_states.iter().map(|&z| unit.amplitudes()[z].norm_sqr()).sum::<f64>();
        let leakage = self.weight.map(|w| sector_leakage(&unit, w)).transpose()?;
        Ok(Measurement { energy, p1, leakage })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Measurement {
    pub energy: f64,
    pub p1: f64,
    pub leakage: Option<f64>,
}

/// Outcome of one evolution.
#[derive(Clone, Debug, PartialEq)]
pub struct Probe {
    pub omega_t: f64,
    /// `(E - E_0) / omega` under the final Hamiltonian.
    pub energy: f64,
    pub p1: f64,
    pub leakage: Option<f64>,
    pub steps: u64,
    /// Step used, in units of `1/omega`; 0 for `T = 0`.
    pub dt: f64,
    pub norm_drift: f64,
    /// SHA-256 of the final state dump.
    pub checksum: String,
}

impl Probe {
    /// Whether the run stayed inside its symmetry sector.
    pub fn valid(&self) -> bool {
        self.leakage.is_none_or(|l| l < LEAKAGE_TOLERANCE)
    }

    pub fn succeeded(&self) -> bool {
        self.energy <= 0.5
    }
}

fn solution_weight(inst: &Ec3Instance, sols: &[usize]) -> Result<usize> {
    if let Some(w) = inst.solution_weight() {
        return Ok(w);
    }
    let w = sols[0].count_ones() as usize;
    if sols.iter().any(|z| z.count_ones() as usize != w) {
        return Err(LabError::Config("solutions have different Hamming weights; enable scan_hamming".into()));
    }
    Ok(w)
}

/// Ground state of the XY driver inside the sector of weight `w`.
pub fn xy_ground_state(hi: &SqhOperator, w: usize) -> Result<StateVector> {
    let res = lowest_eigs(hi, 1, Sector::HammingWeight(w), &EigenOptions::default())?;
    Ok(embed(hi.n_qubits(), Sector::HammingWeight(w), &res.eigenvectors[0])?)
}

/// Register size implied by the config and instance.
pub fn register_size(cfg: &RunConfig, inst: Option<&Ec3Instance>) -> Result<usize> {
    inst.map(|i| i.n())
        .or(cfg.instance.n)
        .ok_or_else(|| LabError::Config("set instance.n or instance.file".into()))
}
