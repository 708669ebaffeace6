//! Sparse Pauli-product Hamiltonians.
//!
//! An [`SqhOperator`] stores `shift * 1 + sum_l w_l P_l` where every `P_l` is
//! a product of single-qubit Pauli matrices on distinct qubits. Applying a
//! product to a basis state only flips bits and multiplies by an element of
//! `{+1, +i, -1, -i}`, so `H|psi>` costs `O(2^n * terms)`.

use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{contract, invalid};
use crate::{Result, StateVector};

/// Largest operator that [`SqhOperator::to_dense`] will materialize.
pub const DENSE_QUBIT_CAP: usize = 12;
/// Largest matrix accepted by [`decompose_dense`] (`4^6 = 4096` Pauli products).
pub const DECOMPOSE_QUBIT_CAP: usize = 6;

const MERGE_DROP: f64 = 1e-15;
const DECOMPOSE_DROP: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub const ALL: [PauliAxis; 3] = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];

    pub fn symbol(self) -> char {
        match self {
            PauliAxis::X => 'x',
            PauliAxis::Y => 'y',
            PauliAxis::Z => 'z',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c {
            'x' | 'X' => Some(PauliAxis::X),
            'y' | 'Y' => Some(PauliAxis::Y),
            'z' | 'Z' => Some(PauliAxis::Z),
            _ => None,
        }
    }
}

/// An element `i^k` of the four-element phase group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: u32) -> Self {
        Phase((k & 3) as u8)
    }

    pub fn power(self) -> u32 {
        self.0 as u32
    }

    pub fn mul(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) & 3)
    }

    pub fn to_complex(self) -> Complex64 {
        self.rotate(Complex64::new(1.0, 0.0))
    }

    /// Multiply `c` by this phase without any floating-point rounding.
    #[inline(always)]
    pub fn rotate(self, c: Complex64) -> Complex64 {
        rotate(self.0, c)
    }
}

#[inline(always)]
fn rotate(power: u8, c: Complex64) -> Complex64 {
    match power & 3 {
        0 => c,
        1 => Complex64::new(-c.im, c.re),
        2 => Complex64::new(-c.re, -c.im),
        _ => Complex64::new(c.im, -c.re),
    }
}

/// Bit-mask form of a Pauli product: `P|z> = i^base (-1)^{|z & parity|} |z ^ flip>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) struct TermKernel {
    pub flip: usize,
    pub parity: usize,
    pub base: u8,
}

impl TermKernel {
    fn from_factors(factors: &[(usize, PauliAxis)]) -> Self {
        let mut flip = 0usize;
        let mut parity = 0usize;
        let mut ys = 0u8;
        for &(q, axis) in factors {
            let bit = 1usize << (q - 1);
            match axis {
                PauliAxis::X => flip |= bit,
                PauliAxis::Y => {
                    flip |= bit;
                    parity |= bit;
                    ys += 1;
                }
                PauliAxis::Z => parity |= bit,
            }
        }
        TermKernel { flip, parity, base: ys & 3 }
    }

    /// Image of basis index `z` and the phase power picked up on the way.
    #[inline(always)]
    pub fn apply(&self, z: usize) -> (usize, u8) {
        let sign = ((z & self.parity).count_ones() & 1) as u8;
        (z ^ self.flip, self.base + 2 * sign)
    }
}

/// One weighted Pauli product with factors sorted by qubit.
#[derive(Clone, Debug)]
pub struct SqhTerm {
    weight: f64,
    factors: Vec<(usize, PauliAxis)>,
    kernel: TermKernel,
}

impl SqhTerm {
    /// Factors may be given in any order but must act on distinct qubits `>= 1`.
    pub fn new(weight: f64, mut factors: Vec<(usize, PauliAxis)>) -> Result<Self> {
        if !weight.is_finite() {
            return Err(invalid!("term weight {weight} is not finite"));
        }
        if factors.is_empty() {
            return Err(invalid!("a term needs at least one Pauli factor; identity belongs in the shift"));
        }
        factors.sort_unstable_by_key(|f| f.0);
        for pair in factors.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(invalid!("qubit {} appears twice in one term", pair[0].0));
            }
        }
        let top = factors[factors.len() - 1].0;
        if factors[0].0 == 0 || top > usize::BITS as usize - 1 {
            return Err(invalid!("qubit indices must lie in 1..{}", usize::BITS));
        }
        let kernel = TermKernel::from_factors(&factors);
        Ok(SqhTerm { weight, factors, kernel })
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn factors(&self) -> &[(usize, PauliAxis)] {
        &self.factors
    }

    /// Highest qubit the term touches.
    pub fn max_qubit(&self) -> usize {
        self.factors[self.factors.len() - 1].0
    }

    pub fn is_diagonal(&self) -> bool {
        self.kernel.flip == 0
    }

    pub(crate) fn kernel(&self) -> TermKernel {
        self.kernel
    }

    fn with_weight(&self, weight: f64) -> Self {
        SqhTerm { weight, factors: self.factors.clone(), kernel: self.kernel }
    }
}

impl PartialEq for SqhTerm {
    fn eq(&self, other: &Self) -> bool {
        self.weight == other.weight && self.factors == other.factors
    }
}

impl fmt::Display for SqhTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.weight)?;
        for (q, a) in &self.factors {
            write!(f, " {}:{}", q, a.symbol())?;
        }
        Ok(())
    }
}

/// Apply the Pauli product of `term` (without its weight) to basis state `z`.
///
/// ```
/// use aqcsim::sqh::{apply_term, SqhTerm};
/// use aqcsim::{PauliAxis, Phase};
/// let y = SqhTerm::new(1.0, vec![(1, PauliAxis::Y)]).unwrap();
/// assert_eq!(apply_term(&y, 0, 1).unwrap(), (1, Phase::I));
/// ```
pub fn apply_term(term: &SqhTerm, z: usize, n: usize) -> Result<(usize, Phase)> {
    if term.max_qubit() > n {
        return Err(contract!("term acts on qubit {} but the register has {n}", term.max_qubit()));
    }
    if n >= usize::BITS as usize || z >> n != 0 {
        return Err(contract!("basis index {z} out of range for {n} qubits"));
    }
    let (image, power) = term.kernel.apply(z);
    Ok((image, Phase::from_power(power as u32)))
}

/// A Hermitian operator in sparse Pauli form. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct SqhOperator {
    n_qubits: usize,
    shift: f64,
    terms: Vec<SqhTerm>,
}

impl SqhOperator {
    /// Sorts the terms, merges identical factor lists and drops terms whose
    /// merged weight vanishes.
    pub fn new(n_qubits: usize, shift: f64, terms: Vec<SqhTerm>) -> Result<Self> {
        if n_qubits >= usize::BITS as usize {
            return Err(invalid!("{n_qubits} qubits do not fit a basis index"));
        }
        if !shift.is_finite() {
            return Err(invalid!("shift {shift} is not finite"));
        }
        if let Some(t) = terms.iter().find(|t| t.max_qubit() > n_qubits) {
            return Err(invalid!("term `{t}` exceeds {n_qubits} qubits"));
        }
        Ok(SqhOperator { n_qubits, shift, terms: merge_terms(terms) })
    }

    /// `shift * 1` on `n_qubits` qubits.
    pub fn identity(n_qubits: usize, shift: f64) -> Result<Self> {
        Self::new(n_qubits, shift, Vec::new())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn terms(&self) -> &[SqhTerm] {
        &self.terms
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.iter().all(SqhTerm::is_diagonal)
    }

    /// `|shift| + sum |w|`, an upper bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        self.shift.abs() + self.terms.iter().map(|t| t.weight.abs()).sum::<f64>()
    }

    /// `self * c`.
    pub fn scaled(&self, c: f64) -> SqhOperator {
        linear_combine(&[(c, self)]).expect("single operator")
    }

    /// `H|psi>` for raw amplitude slices, written into `out`.
    pub fn apply_into(&self, psi: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(psi.len(), 1usize << self.n_qubits);
        debug_assert_eq!(psi.len(), out.len());
        for (o, p) in out.iter_mut().zip(psi) {
            *o = p * self.shift;
        }
        for term in &self.terms {
            accumulate_term(term.kernel, term.weight, psi, out);
        }
    }

    /// Diagonal entry `<z|H|z>`.
    pub fn diagonal_entry(&self, z: usize) -> f64 {
        let mut acc = self.shift;
        for t in self.terms.iter().filter(|t| t.is_diagonal()) {
            let (_, power) = t.kernel.apply(z);
            acc += if power & 3 == 0 { t.weight } else { -t.weight };
        }
        acc
    }

    /// Full `2^n x 2^n` matrix, for tests and small dense solves.
    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        if self.n_qubits > DENSE_QUBIT_CAP {
            return Err(crate::Error::Resource(format!(
                "dense form of {} qubits exceeds the {DENSE_QUBIT_CAP}-qubit cap",
                self.n_qubits
            )));
        }
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for z in 0..dim {
            m[(z, z)] += Complex64::new(self.shift, 0.0);
            for t in &self.terms {
                let (image, power) = t.kernel.apply(z);
                m[(image, z)] += rotate(power, Complex64::new(t.weight, 0.0));
            }
        }
        Ok(m)
    }
}

impl fmt::Display for SqhOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "shift {}", self.shift)?;
        for t in &self.terms {
            writeln!(f, "{t}")?;
        }
        Ok(())
    }
}

/// `out[y] += w * P psi [y]`, evaluated in gather form so each output index
/// sees the terms in a fixed order.
#[inline]
pub(crate) fn accumulate_term(k: TermKernel, weight: f64, psi: &[Complex64], out: &mut [Complex64]) {
    if k.flip == 0 {
        for (y, (o, p)) in out.iter_mut().zip(psi).enumerate() {
            let odd = (y & k.parity).count_ones() & 1;
            let c = p * weight;
            *o += rotate(k.base + 2 * odd as u8, c);
        }
    } else {
        for (y, o) in out.iter_mut().enumerate() {
            let z = y ^ k.flip;
            let odd = (z & k.parity).count_ones() & 1;
            *o += rotate(k.base + 2 * odd as u8, psi[z] * weight);
        }
    }
}

fn cmp_factors(a: &[(usize, PauliAxis)], b: &[(usize, PauliAxis)]) -> Ordering {
    a.cmp(b)
}

fn merge_terms(mut terms: Vec<SqhTerm>) -> Vec<SqhTerm> {
    // stable: like terms are summed in input order
    terms.sort_by(|a, b| cmp_factors(&a.factors, &b.factors));
    let mut merged: Vec<SqhTerm> = Vec::with_capacity(terms.len());
    for t in terms {
        match merged.last_mut() {
            Some(last) if last.factors == t.factors => last.weight += t.weight,
            _ => merged.push(t),
        }
    }
    merged.retain(|t| t.weight.abs() >= MERGE_DROP);
    merged
}

/// `H psi` without materializing `H`.
pub fn matvec(op: &SqhOperator, psi: &StateVector) -> Result<StateVector> {
    if psi.n_qubits() != op.n_qubits {
        return Err(contract!(
            "operator acts on {} qubits, state has {}",
            op.n_qubits,
            psi.n_qubits()
        ));
    }
    let mut out = alloc::vec![Complex64::new(0.0, 0.0); psi.dim()];
    op.apply_into(psi.amplitudes(), &mut out);
    Ok(StateVector::from_raw(op.n_qubits, out))
}

/// `sum_k c_k A_k`. Like terms are merged and weights below `1e-15` dropped.
pub fn linear_combine(parts: &[(f64, &SqhOperator)]) -> Result<SqhOperator> {
    let Some((_, first)) = parts.first() else {
        return Err(contract!("linear_combine needs at least one operator"));
    };
    let n = first.n_qubits;
    let mut shift = 0.0;
    let mut terms = Vec::new();
    for (c, op) in parts {
        if op.n_qubits != n {
            return Err(contract!("cannot combine {n}- and {}-qubit operators", op.n_qubits));
        }
        if !c.is_finite() {
            return Err(invalid!("coefficient {c} is not finite"));
        }
        shift += c * op.shift;
        terms.extend(op.terms.iter().map(|t| t.with_weight(c * t.weight)));
    }
    SqhOperator::new(n, shift, terms)
}

/// Expand a dense Hermitian matrix in the Pauli-product basis,
/// `m_i = Tr(H S_i) / 2^n`.
pub fn decompose_dense(h: &DMatrix<Complex64>) -> Result<SqhOperator> {
    let dim = h.nrows();
    if dim != h.ncols() {
        return Err(invalid!("matrix is {}x{}, not square", dim, h.ncols()));
    }
    if dim == 0 || !dim.is_power_of_two() {
        return Err(invalid!("dimension {dim} is not a power of two"));
    }
    let n = dim.trailing_zeros() as usize;
    if n > DECOMPOSE_QUBIT_CAP {
        return Err(crate::Error::Resource(format!(
            "decomposition is limited to {DECOMPOSE_QUBIT_CAP} qubits, got {n}"
        )));
    }
    for r in 0..dim {
        for c in r..dim {
            if (h[(r, c)] - h[(c, r)].conj()).norm() > HERMITIAN_TOL {
                return Err(invalid!("matrix is not Hermitian at ({r}, {c})"));
            }
        }
    }

    let mut shift = 0.0;
    let mut terms = Vec::new();
    let mut factors = Vec::with_capacity(n);
    // each qubit gets digit 0 (identity), 1 (x), 2 (y) or 3 (z)
    for code in 0..(1usize << (2 * n)) {
        factors.clear();
        for q in 0..n {
            let digit = (code >> (2 * q)) & 3;
            if digit != 0 {
                factors.push((q + 1, PauliAxis::ALL[digit - 1]));
            }
        }
        let kernel = TermKernel::from_factors(&factors);
        let mut trace = Complex64::new(0.0, 0.0);
        for z in 0..dim {
            let (image, power) = kernel.apply(z);
            trace += rotate(power, h[(z, image)]);
        }
        let coeff = trace / dim as f64;
        if coeff.im.abs() > HERMITIAN_TOL {
            return Err(invalid!("coefficient {coeff} is not real"));
        }
        if coeff.re.abs() < DECOMPOSE_DROP {
            continue;
        }
        if factors.is_empty() {
            shift = coeff.re;
        } else {
            terms.push(SqhTerm::new(coeff.re, factors.clone())?);
        }
    }
    SqhOperator::new(n, shift, terms)
}
