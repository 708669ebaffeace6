//! Driver Hamiltonians and interpolation paths `H(s)`, `s in [0, 1]`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::ec3::{final_hamiltonian, instance_stats, removable_clauses, Clause, Ec3Instance};
use crate::error::{contract, invalid};
use crate::sqh::{linear_combine, PauliAxis, SqhOperator, SqhTerm};
use crate::Result;

/// Scalar weight of one path component as a function of `s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Envelope {
    Constant(f64),
    OneMinusS,
    S,
    /// `alpha * s * (1 - s)`
    Bump(f64),
    /// Active on `[(k-1)/m, k/m)` (the last segment also at `s = 1`) with
    /// local parameter `s_k = m s - k + 1`. The rising ramp has value `s_k`,
    /// the falling one `1 - s_k`; both vanish outside the segment.
    ClauseRamp { k: usize, m: usize, rising: bool },
}

impl Envelope {
    pub fn value(&self, s: f64) -> f64 {
        match *self {
            Envelope::Constant(c) => c,
            Envelope::OneMinusS => 1.0 - s,
            Envelope::S => s,
            Envelope::Bump(alpha) => alpha * s * (1.0 - s),
            Envelope::ClauseRamp { k, m, rising } => match ramp_local(k, m, s) {
                Some(sk) if rising => sk,
                Some(sk) => 1.0 - sk,
                None => 0.0,
            },
        }
    }

    /// `int_0^s value(u) du`.
    pub fn integral(&self, s: f64) -> f64 {
        match *self {
            Envelope::Constant(c) => c * s,
            Envelope::OneMinusS => s - 0.5 * s * s,
            Envelope::S => 0.5 * s * s,
            Envelope::Bump(alpha) => alpha * (0.5 * s * s - s * s * s / 3.0),
            Envelope::ClauseRamp { k, m, rising } => {
                let mf = m as f64;
                let start = (k - 1) as f64 / mf;
                if s <= start {
                    return 0.0;
                }
                let sk = (mf * s - k as f64 + 1.0).min(1.0);
                let area = if rising { 0.5 * sk * sk } else { sk - 0.5 * sk * sk };
                area / mf
            }
        }
    }

    /// Points in `(0, 1)` where the envelope's derivative jumps.
    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            Envelope::ClauseRamp { k, m, .. } => [(k - 1) as f64 / m as f64, k as f64 / m as f64]
                .into_iter()
                .filter(|&b| b > 0.0 && b < 1.0)
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Whether a clause ramp is inside its active segment at `s`.
    pub fn is_active(&self, s: f64) -> bool {
        match *self {
            Envelope::ClauseRamp { k, m, .. } => ramp_local(k, m, s).is_some(),
            _ => true,
        }
    }
}

fn ramp_local(k: usize, m: usize, s: f64) -> Option<f64> {
    let sk = m as f64 * s - k as f64 + 1.0;
    let last = k == m && s == 1.0;
    ((0.0..1.0).contains(&sk) || last).then_some(if last { 1.0 } else { sk })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    X,
    Xyz,
    Xy,
    Ising,
}

impl Algorithm {
    pub fn label(self) -> &'static str {
        match self {
            Algorithm::X => "x",
            Algorithm::Xyz => "xyz",
            Algorithm::Xy => "xy",
            Algorithm::Ising => "ising",
        }
    }

    /// XYZ and XY drivers commute with the Hamming-weight operator.
    pub fn conserves_hamming_weight(self) -> bool {
        matches!(self, Algorithm::Xyz | Algorithm::Xy)
    }
}

/// `H(s) = sum_p envelope_p(s) * op_p`, with the declared endpoints kept for checks.
#[derive(Clone, Debug, PartialEq)]
pub struct Path {
    parts: Vec<(Envelope, SqhOperator)>,
    label: String,
    initial: SqhOperator,
    final_op: SqhOperator,
    conserved_sector: Option<usize>,
}

impl Path {
    pub fn new(
        parts: Vec<(Envelope, SqhOperator)>,
        label: impl Into<String>,
        initial: SqhOperator,
        final_op: SqhOperator,
    ) -> Result<Self> {
        let n = initial.n_qubits();
        if parts.is_empty() {
            return Err(contract!("a path needs at least one part"));
        }
        if final_op.n_qubits() != n || parts.iter().any(|(_, op)| op.n_qubits() != n) {
            return Err(contract!("all path operators must act on {n} qubits"));
        }
        Ok(Path { parts, label: label.into(), initial, final_op, conserved_sector: None })
    }

    /// Attach the Hamming weight that the path's operators conserve.
    pub fn with_conserved_sector(mut self, weight: Option<usize>) -> Self {
        self.conserved_sector = weight;
        self
    }

    pub fn parts(&self) -> &[(Envelope, SqhOperator)] {
        &self.parts
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn initial(&self) -> &SqhOperator {
        &self.initial
    }

    pub fn final_operator(&self) -> &SqhOperator {
        &self.final_op
    }

    pub fn conserved_sector(&self) -> Option<usize> {
        self.conserved_sector
    }

    pub fn n_qubits(&self) -> usize {
        self.initial.n_qubits()
    }

    /// Sorted interior breakpoints of all envelopes.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.parts.iter().flat_map(|(e, _)| e.breakpoints()).collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }
}

/// The operator `H(s)`.
pub fn hamiltonian_at(path: &Path, s: f64) -> Result<SqhOperator> {
    if !(0.0..=1.0).contains(&s) {
        return Err(contract!("interpolation parameter {s} outside [0, 1]"));
    }
    let weighted: Vec<(f64, &SqhOperator)> = path.parts.iter().map(|(e, op)| (e.value(s), op)).collect();
    linear_combine(&weighted)
}

fn term(w: f64, factors: Vec<(usize, PauliAxis)>) -> SqhTerm {
    SqhTerm::new(w, factors).expect("driver factors are valid")
}

/// `H^x = omega * sum_i n_i/2 (1 - sigma^x_i)`; ground state `|S>` at energy 0.
pub fn h_x_initial(inst: &Ec3Instance, omega: f64) -> SqhOperator {
    let stats = instance_stats(inst);
    let mut shift = 0.0;
    let mut terms = Vec::new();
    for (i, &ni) in stats.bit_counts().iter().enumerate() {
        if ni > 0 {
            let w = omega * ni as f64 / 2.0;
            shift += w;
            terms.push(term(-w, vec![(i + 1, PauliAxis::X)]));
        }
    }
    SqhOperator::new(inst.n(), shift, terms).expect("instance fits the register")
}

/// Heisenberg ferromagnet `omega * sum_{i<j} n_ij/2 (1 - sigma_i . sigma_j)`.
pub fn h_xyz_initial(inst: &Ec3Instance, omega: f64) -> SqhOperator {
    let stats = instance_stats(inst);
    let mut shift = 0.0;
    let mut terms = Vec::new();
    for ((i, j), nij) in stats.pairs() {
        let w = omega * nij as f64 / 2.0;
        shift += w;
        for axis in PauliAxis::ALL {
            terms.push(term(-w, vec![(i, axis), (j, axis)]));
        }
    }
    SqhOperator::new(inst.n(), shift, terms).expect("instance fits the register")
}

/// x,y-ferromagnet `3 m omega - omega * sum_{i<j} n_ij/2 (sigma^x sigma^x + sigma^y sigma^y)`.
pub fn h_xy_initial(inst: &Ec3Instance, omega: f64) -> SqhOperator {
    let stats = instance_stats(inst);
    let mut terms = Vec::new();
    for ((i, j), nij) in stats.pairs() {
        let w = omega * nij as f64 / 2.0;
        terms.push(term(-w, vec![(i, PauliAxis::X), (j, PauliAxis::X)]));
        terms.push(term(-w, vec![(i, PauliAxis::Y), (j, PauliAxis::Y)]));
    }
    SqhOperator::new(inst.n(), 3.0 * inst.m() as f64 * omega, terms).expect("instance fits the register")
}

/// Driver Hamiltonian of an algorithm for an EC3 instance.
pub fn initial_hamiltonian(algorithm: Algorithm, inst: &Ec3Instance, omega: f64) -> Result<SqhOperator> {
    match algorithm {
        Algorithm::X => Ok(h_x_initial(inst, omega)),
        Algorithm::Xyz => Ok(h_xyz_initial(inst, omega)),
        Algorithm::Xy => Ok(h_xy_initial(inst, omega)),
        Algorithm::Ising => Err(invalid!("the Ising benchmark has no EC3 driver")),
    }
}

/// Transverse-field Ising chain with periodic boundary:
/// `-omega (1-s) sum sigma^x_i - omega s sum sigma^z_i sigma^z_{i+1}`.
pub fn ising_path(n: usize, omega: f64) -> Result<Path> {
    if n < 3 {
        return Err(contract!("the periodic Ising chain needs n >= 3, got {n}"));
    }
    let field = SqhOperator::new(n, 0.0, (1..=n).map(|i| term(-omega, vec![(i, PauliAxis::X)])).collect())?;
    let coupling = SqhOperator::new(
        n,
        0.0,
        (1..=n).map(|i| term(-omega, vec![(i, PauliAxis::Z), (i % n + 1, PauliAxis::Z)])).collect(),
    )?;
    Path::new(
        vec![(Envelope::OneMinusS, field.clone()), (Envelope::S, coupling.clone())],
        Algorithm::Ising.label(),
        field,
        coupling,
    )
}

/// `H(s) = (1-s) H_i + s H_f`.
pub fn straight_line_path(hi: &SqhOperator, hf: &SqhOperator) -> Result<Path> {
    if hi.n_qubits() != hf.n_qubits() {
        return Err(contract!("endpoints act on {} and {} qubits", hi.n_qubits(), hf.n_qubits()));
    }
    Path::new(
        vec![(Envelope::OneMinusS, hi.clone()), (Envelope::S, hf.clone())],
        "straight",
        hi.clone(),
        hf.clone(),
    )
}

/// `H(s) = (1-s) H_i + s H_f + alpha s (1-s) H_{m-1}` where `H_{m-1}` is the
/// penalty Hamiltonian of `inst` without `removed`. The removed clause must
/// appear in [`removable_clauses`].
pub fn nonlinear_smooth_path(
    hi: &SqhOperator,
    inst: &Ec3Instance,
    omega: f64,
    removed: &Clause,
    alpha: f64,
) -> Result<Path> {
    if !removable_clauses(inst).contains(removed) {
        return Err(invalid!("clause {removed} cannot be removed without disconnecting or uncovering the instance"));
    }
    let reduced = final_hamiltonian(&inst.without(removed)?, omega);
    nonlinear_smooth_path_with(hi, &final_hamiltonian(inst, omega), &reduced, alpha)
}

/// Same as [`nonlinear_smooth_path`] with an arbitrary bump operator.
pub fn nonlinear_smooth_path_with(
    hi: &SqhOperator,
    hf: &SqhOperator,
    bump: &SqhOperator,
    alpha: f64,
) -> Result<Path> {
    if !alpha.is_finite() {
        return Err(invalid!("coupling {alpha} is not finite"));
    }
    let mut path = straight_line_path(hi, hf)?;
    if bump.n_qubits() != hi.n_qubits() {
        return Err(contract!("bump operator acts on {} qubits", bump.n_qubits()));
    }
    path.parts.push((Envelope::Bump(alpha), bump.clone()));
    path.label = String::from("nonlinear");
    Ok(path)
}

/// Switch clauses on one after another on top of the straight line.
///
/// `order` is a permutation of clause positions. With `H_j = omega * sum of the
/// first j clause penalties in that order` and `H_0 = H_m = 0`, segment `k`
/// contributes `(1 - s_k) H_{k-1} + s_k H_k`.
pub fn clause_by_clause_path(hi: &SqhOperator, inst: &Ec3Instance, omega: f64, order: &[usize]) -> Result<Path> {
    let m = inst.m();
    let mut seen = vec![false; m];
    if order.len() != m || order.iter().any(|&p| p >= m || core::mem::replace(&mut seen[p], true)) {
        return Err(invalid!("clause order must be a permutation of 0..{m}"));
    }
    let hf = final_hamiltonian(inst, omega);
    let mut path = straight_line_path(hi, &hf)?;
    path.label = String::from("clause_by_clause");
    // partial sums H_1 .. H_{m-1}; H_0 and H_m are zero by convention
    let partial: Vec<SqhOperator> =
        (1..m).map(|j| inst.select(&order[..j]).map(|sub| final_hamiltonian(&sub, omega))).collect::<Result<_>>()?;
    for k in 1..=m {
        if k >= 2 {
            path.parts.push((Envelope::ClauseRamp { k, m, rising: false }, partial[k - 2].clone()));
        }
        if k < m {
            path.parts.push((Envelope::ClauseRamp { k, m, rising: true }, partial[k - 1].clone()));
        }
    }
    Ok(path)
}
