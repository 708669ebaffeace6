//! 3-bit exact cover: clauses, penalty Hamiltonians and a generator of
//! instances with a unique satisfying assignment.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{contract, invalid};
use crate::sqh::{PauliAxis, SqhOperator, SqhTerm};
use crate::{Error, Result};

/// Exhaustive solution counting is limited to `2^30` assignments.
pub const EXHAUSTIVE_BIT_LIMIT: usize = 30;

/// Three distinct 1-based bit indices, stored ascending.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Clause([usize; 3]);

impl Clause {
    pub fn new(a: usize, b: usize, c: usize) -> Result<Self> {
        let mut bits = [a, b, c];
        bits.sort_unstable();
        if bits[0] == 0 {
            return Err(invalid!("clause ({a}, {b}, {c}): bit indices start at 1"));
        }
        if bits[0] == bits[1] || bits[1] == bits[2] {
            return Err(invalid!("clause ({a}, {b}, {c}) repeats a bit"));
        }
        Ok(Clause(bits))
    }

    pub fn bits(&self) -> [usize; 3] {
        self.0
    }

    pub fn mask(&self) -> usize {
        self.0.iter().fold(0, |m, &b| m | 1 << (b - 1))
    }

    pub fn contains(&self, bit: usize) -> bool {
        self.0.contains(&bit)
    }

    /// The three bit pairs `(i, j)` with `i < j`.
    pub fn pairs(&self) -> [(usize, usize); 3] {
        let [a, b, c] = self.0;
        [(a, b), (a, c), (b, c)]
    }

    /// Number of bits shared with `other`.
    pub fn overlap(&self, other: &Clause) -> usize {
        (self.mask() & other.mask()).count_ones() as usize
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

/// Satisfied iff exactly one of the three addressed bits of `z` is 1.
#[inline]
pub fn clause_satisfied(c: &Clause, z: usize) -> bool {
    (z & c.mask()).count_ones() == 1
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ec3Instance {
    n: usize,
    clauses: Vec<Clause>,
    known_solution: Option<usize>,
}

impl Ec3Instance {
    pub fn new(n: usize, clauses: Vec<Clause>, known_solution: Option<usize>) -> Result<Self> {
        if n == 0 || n >= usize::BITS as usize {
            return Err(invalid!("bit count {n} out of range"));
        }
        for (i, c) in clauses.iter().enumerate() {
            if c.0[2] > n {
                return Err(invalid!("clause {c} exceeds {n} bits"));
            }
            if clauses[..i].contains(c) {
                return Err(invalid!("clause {c} appears twice"));
            }
        }
        if let Some(w) = known_solution {
            if w >> n != 0 {
                return Err(invalid!("solution {w} does not fit {n} bits"));
            }
            if let Some(c) = clauses.iter().find(|c| !clause_satisfied(c, w)) {
                return Err(invalid!("solution {w} violates clause {c}"));
            }
        }
        Ok(Ec3Instance { n, clauses, known_solution })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn known_solution(&self) -> Option<usize> {
        self.known_solution
    }

    /// Hamming weight of the known solution.
    pub fn solution_weight(&self) -> Option<usize> {
        self.known_solution.map(|w| w.count_ones() as usize)
    }

    pub fn is_satisfied_by(&self, z: usize) -> bool {
        self.clauses.iter().all(|c| clause_satisfied(c, z))
    }

    /// Same bit count with `clause` removed. The known solution is kept.
    pub fn without(&self, clause: &Clause) -> Result<Ec3Instance> {
        let pos = self
            .clauses
            .iter()
            .position(|c| c == clause)
            .ok_or_else(|| invalid!("clause {clause} is not part of the instance"))?;
        let mut clauses = self.clauses.clone();
        clauses.remove(pos);
        Ok(Ec3Instance { n: self.n, clauses, known_solution: self.known_solution })
    }

    /// Sub-instance built from the clauses at the given positions.
    pub fn select(&self, positions: &[usize]) -> Result<Ec3Instance> {
        let clauses = positions
            .iter()
            .map(|&p| self.clauses.get(p).copied().ok_or_else(|| contract!("clause position {p} out of range")))
            .collect::<Result<Vec<_>>>()?;
        Ec3Instance::new(self.n, clauses, self.known_solution)
    }

    /// Clause penalty `sum_c (1 - bits of c set in z)^2`, in units of the energy scale.
    pub fn penalty(&self, z: usize) -> u32 {
        self.clauses
            .iter()
            .map(|c| {
                let k = (z & c.mask()).count_ones() as i32;
                ((1 - k) * (1 - k)) as u32
            })
            .sum()
    }

    /// All bits appear in at least one clause.
    pub fn covers_all_bits(&self) -> bool {
        covered_mask(&self.clauses) == full_mask(self.n)
    }

    /// The clause hypergraph restricted to covered bits is connected.
    pub fn is_connected(&self) -> bool {
        clauses_connected(&self.clauses)
    }
}

fn full_mask(n: usize) -> usize {
    if n == usize::BITS as usize {
        usize::MAX
    } else {
        (1usize << n) - 1
    }
}

fn covered_mask(clauses: &[Clause]) -> usize {
    clauses.iter().fold(0, |m, c| m | c.mask())
}

fn clauses_connected(clauses: &[Clause]) -> bool {
    let Some(first) = clauses.first() else {
        return false;
    };
    let mut reached = first.mask();
    let mut used = vec![false; clauses.len()];
    used[0] = true;
    let mut grew = true;
    while grew {
        grew = false;
        for (c, u) in clauses.iter().zip(used.iter_mut()) {
            if !*u && c.mask() & reached != 0 {
                reached |= c.mask();
                *u = true;
                grew = true;
            }
        }
    }
    used.iter().all(|&u| u)
}

/// Result of [`count_solutions`]; `AtLeast` is returned when a cap stopped the scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolutionCount {
    Exact(u64),
    AtLeast(u64),
}

impl SolutionCount {
    pub fn lower_bound(self) -> u64 {
        match self {
            SolutionCount::Exact(c) | SolutionCount::AtLeast(c) => c,
        }
    }
}

/// Count satisfying assignments by exhaustive enumeration.
///
/// With a cap the scan stops as soon as `cap` solutions are found, which also
/// lifts the `2^30` size limit.
pub fn count_solutions(inst: &Ec3Instance, cap: Option<u64>) -> Result<SolutionCount> {
    if cap.is_none() && inst.n > EXHAUSTIVE_BIT_LIMIT {
        return Err(Error::Resource(alloc::format!(
            "exhaustive counting over {} bits exceeds the {EXHAUSTIVE_BIT_LIMIT}-bit limit",
            inst.n
        )));
    }
    let masks: Vec<usize> = inst.clauses.iter().map(Clause::mask).collect();
    let mut count = 0u64;
    for z in 0..=full_mask(inst.n) {
        if masks.iter().all(|&m| (z & m).count_ones() == 1) {
            count += 1;
            if cap.is_some_and(|c| count >= c) {
                return Ok(SolutionCount::AtLeast(count));
            }
        }
    }
    Ok(SolutionCount::Exact(count))
}

/// All satisfying assignments in increasing order.
pub fn solutions(inst: &Ec3Instance) -> Result<Vec<usize>> {
    if inst.n > EXHAUSTIVE_BIT_LIMIT {
        return Err(Error::Resource(alloc::format!("cannot enumerate {} bits", inst.n)));
    }
    Ok((0..=full_mask(inst.n)).filter(|&z| inst.is_satisfied_by(z)).collect())
}

/// Per-bit and per-pair clause incidence counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceStats {
    n: usize,
    m: usize,
    bit_counts: Vec<u32>,
    pair_counts: Vec<u32>,
}

impl InstanceStats {
    pub fn m(&self) -> usize {
        self.m
    }

    /// `n_i`: clauses touching bit `i` (1-based).
    pub fn bit_count(&self, i: usize) -> u32 {
        self.bit_counts[i - 1]
    }

    pub fn bit_counts(&self) -> &[u32] {
        &self.bit_counts
    }

    /// `n_{i,j}`: clauses containing both bits (order irrelevant).
    pub fn pair_count(&self, i: usize, j: usize) -> u32 {
        self.pair_counts[(i - 1) * self.n + (j - 1)]
    }

    /// Non-zero `n_{i,j}` with `i < j`, in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = ((usize, usize), u32)> + '_ {
        let n = self.n;
        (1..=n)
            .flat_map(move |i| ((i + 1)..=n).map(move |j| (i, j)))
            .map(|(i, j)| ((i, j), self.pair_count(i, j)))
            .filter(|(_, c)| *c > 0)
    }

    pub fn max_pair_count(&self) -> u32 {
        self.pair_counts.iter().copied().max().unwrap_or(0)
    }
}

pub fn instance_stats(inst: &Ec3Instance) -> InstanceStats {
    let n = inst.n;
    let mut bit_counts = vec![0u32; n];
    let mut pair_counts = vec![0u32; n * n];
    for c in &inst.clauses {
        for b in c.bits() {
            bit_counts[b - 1] += 1;
        }
        for (i, j) in c.pairs() {
            pair_counts[(i - 1) * n + (j - 1)] += 1;
            pair_counts[(j - 1) * n + (i - 1)] += 1;
        }
    }
    InstanceStats { n, m: inst.m(), bit_counts, pair_counts }
}

/// `H_f = omega * (m - sum_i n_i/2 sigma^z_i + sum_{i<j} n_ij/2 sigma^z_i sigma^z_j)`,
/// whose diagonal is `omega` times the clause penalty of each assignment.
pub fn final_hamiltonian(inst: &Ec3Instance, omega: f64) -> SqhOperator {
    let stats = instance_stats(inst);
    let mut terms = Vec::new();
    for (i, &ni) in stats.bit_counts.iter().enumerate() {
        if ni > 0 {
            terms.push(SqhTerm::new(-omega * ni as f64 / 2.0, vec![(i + 1, PauliAxis::Z)]).expect("valid factor"));
        }
    }
    for ((i, j), nij) in stats.pairs() {
        terms.push(
            SqhTerm::new(omega * nij as f64 / 2.0, vec![(i, PauliAxis::Z), (j, PauliAxis::Z)]).expect("valid factors"),
        );
    }
    SqhOperator::new(inst.n, omega * inst.m() as f64, terms).expect("instance bits fit the register")
}

/// Clauses whose removal keeps the remaining clause graph connected and
/// still covering every bit.
pub fn removable_clauses(inst: &Ec3Instance) -> Vec<Clause> {
    if inst.m() < 2 {
        return Vec::new();
    }
    let all = full_mask(inst.n);
    (0..inst.m())
        .filter(|&k| {
            let rest: Vec<Clause> =
                inst.clauses.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, c)| *c).collect();
            covered_mask(&rest) == all && clauses_connected(&rest)
        })
        .map(|k| inst.clauses[k])
        .collect()
}

/// Clause budget used by the generator, `ceil(2n/3) + 2`.
pub fn clause_budget(n: usize) -> usize {
    (2 * n).div_ceil(3) + 2
}

/// Draw a random instance with a unique satisfying assignment.
///
/// Starting from one random clause, clauses are drawn from the pool of all
/// `C(n,3)` triples, restricted to those touching the current graph without
/// sharing a bit pair with an accepted clause. Once every bit is covered,
/// each drawn clause is kept only if at least one solution survives, and the
/// search stops at exactly one. An exhausted pool or a full clause budget
/// triggers a restart. Randomness comes from ChaCha8 seeded with `seed`.
pub fn generate_hard_instance(n: usize, seed: u64, max_restarts: usize) -> Result<Ec3Instance> {
    if n < 4 {
        return Err(contract!("instance generation needs n >= 4, got {n}"));
    }
    if n > EXHAUSTIVE_BIT_LIMIT {
        return Err(Error::Resource(alloc::format!("{n} bits exceed the counting limit")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = clause_budget(n);
    let all_bits = full_mask(n);
    let mut full_pool = Vec::new();
    for a in 1..=n {
        for b in a + 1..=n {
            for c in b + 1..=n {
                full_pool.push(Clause([a, b, c]));
            }
        }
    }

    for _attempt in 0..=max_restarts {
        let mut pool = full_pool.clone();
        let first = pool.swap_remove(rng.random_range(0..pool.len()));
        let mut accepted = vec![first];
        let mut covered = first.mask();
        let mut candidates = Vec::new();

        let found = loop {
            if accepted.len() >= budget {
                break None;
            }
            // a shared bit pair means an overlap of two or more bits
            pool.retain(|c| accepted.iter().all(|a| a.overlap(c) < 2));
            candidates.clear();
            candidates.extend(pool.iter().enumerate().filter(|(_, c)| c.mask() & covered != 0).map(|(i, _)| i));
            if candidates.is_empty() {
                break None;
            }
            let pick = candidates[rng.random_range(0..candidates.len())];
            let clause = pool.swap_remove(pick);
            accepted.push(clause);
            covered |= clause.mask();
            if covered != all_bits {
                continue;
            }
            let trial = Ec3Instance { n, clauses: accepted.clone(), known_solution: None };
            match count_solutions(&trial, Some(2))? {
                SolutionCount::Exact(0) => {
                    accepted.pop();
                    covered = covered_mask(&accepted);
                }
                SolutionCount::Exact(1) => break Some(trial),
                _ => {}
            }
        };

        if let Some(inst) = found {
            let w = solutions(&inst)?[0];
            return Ok(Ec3Instance { known_solution: Some(w), ..inst });
        }
    }
    Err(Error::GenerationFailed { attempts: max_restarts + 1 })
}
