//! State vectors over the computational basis and Hamming-weight sectors.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{contract, invalid};
use crate::sqh::{PauliAxis, SqhOperator, SqhTerm};
use crate::{binomial, Error, Result};

/// Default register limit: `2^26` complex doubles is 1 GiB.
pub const DEFAULT_QUBIT_CAP: usize = 26;
/// Default tolerance on `|1 - <psi|psi>|` for physics functionals.
pub const DEFAULT_NORM_TOLERANCE: f64 = 1e-9;

const IMAG_RESIDUAL_TOL: f64 = 1e-9;

/// `2^n` complex amplitudes `alpha_z`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::Resource(alloc::format!("{n} qubits exceed the cap of {cap}")));
    }
    Ok(())
}

impl StateVector {
    pub(crate) fn from_raw(n_qubits: usize, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), 1usize << n_qubits);
        StateVector { n_qubits, amps }
    }

    pub fn zeros(n_qubits: usize) -> Result<Self> {
        check_cap(n_qubits, DEFAULT_QUBIT_CAP)?;
        Ok(Self::from_raw(n_qubits, vec![Complex64::new(0.0, 0.0); 1 << n_qubits]))
    }

    /// The basis state `|z>`.
    pub fn basis(n_qubits: usize, z: usize) -> Result<Self> {
        let mut s = Self::zeros(n_qubits)?;
        if z >= s.dim() {
            return Err(contract!("basis index {z} out of range for {n_qubits} qubits"));
        }
        s.amps[z] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    /// Wrap amplitudes; the length must be a power of two. No normalization is applied.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() || !amps.len().is_power_of_two() {
            return Err(invalid!("{} amplitudes is not a power of two", amps.len()));
        }
        let n = amps.len().trailing_zeros() as usize;
        Ok(Self::from_raw(n, amps))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.same_register(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|<self|other>|^2`, insensitive to global phase.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Euclidean distance `||self - other||`.
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        self.same_register(other)?;
        let d: f64 = self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm_sqr()).sum();
        Ok(libm::sqrt(d))
    }

    pub fn normalize(&mut self) {
        let n = libm::sqrt(self.norm_sqr());
        if n > 0.0 {
            self.amps.iter_mut().for_each(|a| *a /= n);
        }
    }

    pub fn check_normalized(&self, tolerance: f64) -> Result<()> {
        let drift = (1.0 - self.norm_sqr()).abs();
        if !(drift <= tolerance) {
            return Err(invalid!("state norm^2 deviates from 1 by {drift:.3e}"));
        }
        Ok(())
    }

    fn same_register(&self, other: &StateVector) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(contract!("states on {} and {} qubits", self.n_qubits, other.n_qubits));
        }
        Ok(())
    }
}

/// `|S> = 2^{-n/2} sum_z |z>`, the ground state of the transverse-field driver.
pub fn uniform_superposition(n: usize) -> Result<StateVector> {
    uniform_superposition_capped(n, DEFAULT_QUBIT_CAP)
}

pub fn uniform_superposition_capped(n: usize, cap: usize) -> Result<StateVector> {
    if n == 0 {
        return Err(contract!("need at least one qubit"));
    }
    check_cap(n, cap)?;
    let dim = 1usize << n;
    let a = 1.0 / libm::sqrt(dim as f64);
    Ok(StateVector::from_raw(n, vec![Complex64::new(a, 0.0); dim]))
}

/// Equal-weight superposition of all basis states with Hamming weight `weight`.
pub fn dicke_state(n: usize, weight: usize) -> Result<StateVector> {
    let sector = sector_map(n, weight)?;
    let a = 1.0 / libm::sqrt(sector.len() as f64);
    let mut s = StateVector::zeros(n)?;
    for &z in sector.indices() {
        s.amps[z] = Complex64::new(a, 0.0);
    }
    Ok(s)
}

/// `Re <psi|H|psi>`.
pub fn energy_expectation(psi: &StateVector, op: &SqhOperator) -> Result<f64> {
    psi.check_normalized(DEFAULT_NORM_TOLERANCE)?;
    let e = expectation_unchecked(psi, op)?;
    if e.im.abs() > IMAG_RESIDUAL_TOL {
        return Err(Error::Numerical {
            t: f64::NAN,
            message: alloc::format!("expectation value has imaginary part {:.3e}", e.im),
        });
    }
    Ok(e.re)
}

pub(crate) fn expectation_unchecked(psi: &StateVector, op: &SqhOperator) -> Result<Complex64> {
    let h_psi = crate::sqh::matvec(op, psi)?;
    psi.inner(&h_psi)
}

/// Probability `|<w|psi>|^2` of measuring basis state `w`.
pub fn solution_overlap(psi: &StateVector, w: usize) -> Result<f64> {
    psi.amps
        .get(w)
        .map(|a| a.norm_sqr())
        .ok_or_else(|| contract!("basis index {w} out of range for {} qubits", psi.n_qubits))
}

/// Total probability outside the Hamming-weight sector `weight`.
pub fn sector_leakage(psi: &StateVector, weight: usize) -> Result<f64> {
    if weight > psi.n_qubits {
        return Err(contract!("weight {weight} exceeds {} qubits", psi.n_qubits));
    }
    Ok(psi
        .amps
        .iter()
        .enumerate()
        .filter(|(z, _)| z.count_ones() as usize != weight)
        .map(|(_, a)| a.norm_sqr())
        .sum())
}

/// Probability mass in each Hamming-weight sector `0..=n`.
pub fn sector_probabilities(psi: &StateVector) -> Vec<f64> {
    let mut p = vec![0.0; psi.n_qubits + 1];
    for (z, a) in psi.amps.iter().enumerate() {
        p[z.count_ones() as usize] += a.norm_sqr();
    }
    p
}

/// `Sigma^z = sum_i (1 - sigma^z_i)/2`, which counts 1-bits.
pub fn hamming_weight_operator(n: usize) -> Result<SqhOperator> {
    let terms = (1..=n)
        .map(|q| SqhTerm::new(-0.5, vec![(q, PauliAxis::Z)]))
        .collect::<Result<Vec<_>>>()?;
    SqhOperator::new(n, 0.5 * n as f64, terms)
}

/// Sorted basis indices of fixed Hamming weight.
///
/// Among integers of equal popcount, numeric order coincides with colex
/// order, so the position of `z` is `sum_k C(b_k, k + 1)` over its set bits
/// `b_0 < b_1 < ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectorMap {
    n_qubits: usize,
    weight: usize,
    indices: Vec<usize>,
    // binom[b][k] = C(b, k) for b < n, k <= weight
    binom: Vec<Vec<usize>>,
}

pub fn sector_map(n: usize, weight: usize) -> Result<SectorMap> {
    if weight > n {
        return Err(invalid!("Hamming weight {weight} exceeds {n} qubits"));
    }
    check_cap(n, DEFAULT_QUBIT_CAP)?;
    let mut indices = Vec::with_capacity(binomial(n, weight) as usize);
    if weight == 0 {
        indices.push(0);
    } else {
        // Gosper's hack enumerates fixed-popcount integers in increasing order.
        let mut z: usize = (1 << weight) - 1;
        let end = 1usize << n;
        while z < end {
            indices.push(z);
            let c = z & z.wrapping_neg();
            let r = z + c;
            z = (((r ^ z) >> 2) / c) | r;
        }
    }
    let binom = (0..n.max(1))
        .map(|b| (0..=weight).map(|k| binomial(b, k) as usize).collect())
        .collect();
    Ok(SectorMap { n_qubits: n, weight, indices, binom })
}

impl SectorMap {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Position of `z` in the sector, or `None` if its weight differs.
    #[inline]
    pub fn rank(&self, z: usize) -> Option<usize> {
        if z >> self.n_qubits != 0 || z.count_ones() as usize != self.weight {
            return None;
        }
        let mut rank = 0;
        let mut rest = z;
        let mut k = 1;
        while rest != 0 {
            let b = rest.trailing_zeros() as usize;
            rank += self.binom[b][k];
            rest &= rest - 1;
            k += 1;
        }
        Some(rank)
    }

    /// Amplitudes of `psi` on the sector, in sector order.
    pub fn restrict(&self, psi: &StateVector) -> Result<Vec<Complex64>> {
        if psi.n_qubits != self.n_qubits {
            return Err(contract!("state has {} qubits, sector {}", psi.n_qubits, self.n_qubits));
        }
        Ok(self.indices.iter().map(|&z| psi.amps[z]).collect())
    }

    /// Full-register state with `amps` placed on the sector indices.
    pub fn embed(&self, amps: &[Complex64]) -> Result<StateVector> {
        if amps.len() != self.len() {
            return Err(contract!("{} amplitudes for a sector of size {}", amps.len(), self.len()));
        }
        let mut s = StateVector::zeros(self.n_qubits)?;
        for (&z, &a) in self.indices.iter().zip(amps) {
            s.amps[z] = a;
        }
        Ok(s)
    }
}
