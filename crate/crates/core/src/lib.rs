//! Matrix-free simulation of adiabatic quantum computation.
//!
//! Hamiltonians are stored as a real energy shift plus a list of weighted
//! Pauli products ([`SqhOperator`]) and are applied to state vectors term by
//! term, so no `2^n x 2^n` matrix is ever built on the hot paths. On top of
//! that sit a fixed-step Adams predictor-corrector integrator, exact-cover
//! (EC3) problem instances, interpolation paths, and a Lanczos eigensolver
//! for spectral gaps.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, timing and
//! the command line live in the `aqclab` companion crate.
//!
//! Basis convention: qubits are labelled `1..=n` and qubit `i` is bit `i - 1`
//! of the basis index, i.e. `z = sum_i z_i 2^(i-1)`. `|0>` is the `+1`
//! eigenstate of `sigma^z`.

#![no_std]

extern crate alloc;

pub mod ec3;
mod error;
pub mod integrator;
pub mod paths;
pub mod spectra;
pub mod sqh;
pub mod state;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use sqh::{PauliAxis, Phase, SqhOperator, SqhTerm};
pub use state::{SectorMap, StateVector};

pub(crate) fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}
