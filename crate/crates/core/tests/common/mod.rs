//! Dense reference implementations shared by the integration tests.
#![allow(dead_code)]

use aqcsim::paths::Envelope;
use aqcsim::{Complex64, PauliAxis, SqhOperator, SqhTerm, StateVector};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

pub type C = Complex64;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn pauli(axis: Option<PauliAxis>) -> DMatrix<C> {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    match axis {
        None => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        Some(PauliAxis::X) => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        Some(PauliAxis::Y) => DMatrix::from_row_slice(2, 2, &[z, c(0.0, -1.0), c(0.0, 1.0), z]),
        Some(PauliAxis::Z) => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

/// `sigma_n (x) ... (x) sigma_1`: qubit 1 is the least significant bit.
pub fn kron_term(n: usize, factors: &[(usize, PauliAxis)]) -> DMatrix<C> {
    let mut m = DMatrix::from_element(1, 1, c(1.0, 0.0));
    for q in (1..=n).rev() {
        let axis = factors.iter().find(|(i, _)| *i == q).map(|(_, a)| *a);
        m = m.kronecker(&pauli(axis));
    }
    m
}

pub fn dense(op: &SqhOperator) -> DMatrix<C> {
    let n = op.n_qubits();
    let dim = 1usize << n;
    let mut m = DMatrix::<C>::identity(dim, dim) * c(op.shift(), 0.0);
    for t in op.terms() {
        m += kron_term(n, t.factors()) * c(t.weight(), 0.0);
    }
    m
}

pub fn to_vec(psi: &StateVector) -> DVector<C> {
    DVector::from_column_slice(psi.amplitudes())
}

pub fn from_vec(v: &DVector<C>) -> StateVector {
    StateVector::from_amplitudes(v.as_slice().to_vec()).unwrap()
}

pub fn random_operator(rng: &mut impl Rng, n: usize, terms: usize) -> SqhOperator {
    let mut list = Vec::new();
    while list.len() < terms {
        let mut factors = Vec::new();
        for q in 1..=n {
            if rng.random_bool(0.5) {
                factors.push((q, PauliAxis::ALL[rng.random_range(0..3)]));
            }
        }
        if factors.is_empty() {
            continue;
        }
        list.push(SqhTerm::new(rng.random_range(-1.0..1.0), factors).unwrap());
    }
    SqhOperator::new(n, rng.random_range(-1.0..1.0), list).unwrap()
}

pub fn random_state(rng: &mut impl Rng, n: usize) -> StateVector {
    let amps = (0..1usize << n).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let mut psi = StateVector::from_amplitudes(amps).unwrap();
    psi.normalize();
    psi
}

/// `exp(-i t H)` for Hermitian `H` by eigendecomposition.
pub fn expm_hermitian(h: &DMatrix<C>, t: f64) -> DMatrix<C> {
    let eig = h.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| C::from_polar(1.0, -l * t)));
    v * d * v.adjoint()
}

/// Dense `H(t) = sum_p env_p(t / T) op_p`.
pub fn dense_schedule(parts: &[(Envelope, SqhOperator)], total: f64) -> impl Fn(f64) -> DMatrix<C> {
    let mats: Vec<(Envelope, DMatrix<C>)> = parts.iter().map(|(e, op)| (*e, dense(op))).collect();
    move |t| {
        let dim = mats[0].1.nrows();
        let mut m = DMatrix::zeros(dim, dim);
        for (e, op) in &mats {
            m += op * c(e.value(t / total), 0.0);
        }
        m
    }
}

/// Fourth-order commutator-free Magnus propagation over `[0, T]` in `steps`
/// equal steps.
pub fn magnus4(ham: impl Fn(f64) -> DMatrix<C>, total: f64, psi0: &StateVector, steps: usize) -> DVector<C> {
    let h = total / steps as f64;
    let r3 = 3f64.sqrt();
    let (c1, c2) = (0.5 - r3 / 6.0, 0.5 + r3 / 6.0);
    let (a1, a2) = (0.25 + r3 / 6.0, 0.25 - r3 / 6.0);
    let mut v = to_vec(psi0);
    for k in 0..steps {
        let t0 = k as f64 * h;
        let h1 = ham(t0 + c1 * h);
        let h2 = ham(t0 + c2 * h);
        let first = expm_hermitian(&(&h1 * c(a1, 0.0) + &h2 * c(a2, 0.0)), h);
        let second = expm_hermitian(&(&h1 * c(a2, 0.0) + &h2 * c(a1, 0.0)), h);
        v = second * (first * v);
    }
    v
}

/// Piecewise-constant midpoint propagator with `steps` sub-steps.
pub fn midpoint_propagate(ham: impl Fn(f64) -> DMatrix<C>, total: f64, psi0: &StateVector, steps: usize) -> DVector<C> {
    let h = total / steps as f64;
    let mut v = to_vec(psi0);
    for k in 0..steps {
        let hk = ham((k as f64 + 0.5) * h);
        v = expm_hermitian(&hk, h) * v;
    }
    v
}

pub fn fidelity(a: &DVector<C>, b: &DVector<C>) -> f64 {
    a.dotc(b).norm_sqr() / (a.norm_squared() * b.norm_squared())
}

pub fn max_abs_diff(a: &DMatrix<C>, b: &DMatrix<C>) -> f64 {
    (a - b).iter().map(|x| x.norm()).fold(0.0, f64::max)
}
