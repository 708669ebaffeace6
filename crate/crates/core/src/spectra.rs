//! Lowest eigenvalues of `H(s)` and spectral-gap curves.
//!
//! The iterative solver is Lanczos with full reorthogonalization. Eigenpairs
//! are found one at a time: after the lowest Ritz pair converges it is locked
//! and the next run works in its orthogonal complement, so degenerate levels
//! are resolved. Small problems go to a dense Hermitian eigensolver instead.
//!
//! Restriction to a symmetry sector never builds the full vector: the
//! operator is applied directly on sector coordinates.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{contract, invalid};
use crate::paths::{hamiltonian_at, Path};
use crate::sqh::SqhOperator;
use crate::state::{sector_map, SectorMap};
use crate::{Error, Result, StateVector};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const BREAKDOWN: f64 = 1e-12;

/// Invariant subspace the solver is restricted to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sector {
    Full,
    /// Basis states with this many 1-bits. Requires `[H, Sigma^z] = 0`.
    HammingWeight(usize),
    /// Eigenspace of the global bit flip `prod_i sigma^x_i` with eigenvalue
    /// `+1` (`even`) or `-1`. Requires `H` to commute with the flip.
    SpinFlip { even: bool },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Dense below `dense_threshold`, Lanczos above.
    Auto,
    Lanczos,
    Dense,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenOptions {
    /// Required residual `||H v - lambda v||` per eigenpair.
    pub tol: f64,
    /// Seed of the random Lanczos start vectors.
    pub seed: u64,
    pub method: Method,
    pub dense_threshold: usize,
    pub max_krylov: usize,
    pub max_restarts: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            tol: 1e-10,
            seed: 0x5eed,
            method: Method::Auto,
            dense_threshold: 512,
            max_krylov: 300,
            max_restarts: 30,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Eigenvectors in sector coordinates; see [`embed`].
    pub eigenvectors: Vec<Vec<Complex64>>,
    /// Total Lanczos iterations (0 for the dense path).
    pub iterations: usize,
    pub sector: Sector,
}

impl EigenResult {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// `H` acting on the coordinates of an invariant subspace.
trait SectorOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]);
}

struct FullSpace<'a>(&'a SqhOperator);

impl SectorOperator for FullSpace<'_> {
    fn dim(&self) -> usize {
        1 << self.0.n_qubits()
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.0.apply_into(x, y);
    }
}

struct HammingSpace<'a> {
    op: &'a SqhOperator,
    map: SectorMap,
}

impl SectorOperator for HammingSpace<'_> {
    fn dim(&self) -> usize {
        self.map.len()
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        let shift = self.op.shift();
        for (o, a) in y.iter_mut().zip(x) {
            *o = a * shift;
        }
        for t in self.op.terms() {
            let k = t.kernel();
            let w = t.weight();
            for (pos, &target) in self.map.indices().iter().enumerate() {
                let source = target ^ k.flip;
                // images leaving the sector cancel between terms of a
                // Sigma^z-conserving operator
                if let Some(src) = self.map.rank(source) {
                    let (_, power) = k.apply(source);
                    y[pos] += crate::sqh::Phase::from_power(power as u32).rotate(x[src] * w);
                }
            }
        }
    }
}

struct SpinFlipSpace<'a> {
    op: &'a SqhOperator,
    even: bool,
}

impl SpinFlipSpace<'_> {
    fn top(&self) -> usize {
        1 << (self.op.n_qubits() - 1)
    }

    fn all(&self) -> usize {
        (1 << self.op.n_qubits()) - 1
    }
}

impl SectorOperator for SpinFlipSpace<'_> {
    fn dim(&self) -> usize {
        self.top()
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        let (top, all) = (self.top(), self.all());
        let shift = self.op.shift();
        for (o, a) in y.iter_mut().zip(x) {
            *o = a * shift;
        }
        for t in self.op.terms() {
            let k = t.kernel();
            let w = t.weight();
            for (target, o) in y.iter_mut().enumerate() {
                let source = target ^ k.flip;
                let (_, power) = k.apply(source);
                let amp = if source & top == 0 {
                    x[source]
                } else if self.even {
                    x[source ^ all]
                } else {
                    -x[source ^ all]
                };
                *o += crate::sqh::Phase::from_power(power as u32).rotate(amp * w);
            }
        }
    }
}

/// Full-register state for sector coordinates `amps`.
pub fn embed(n_qubits: usize, sector: Sector, amps: &[Complex64]) -> Result<StateVector> {
    match sector {
        Sector::Full => {
            if amps.len() != 1 << n_qubits {
                return Err(contract!("{} amplitudes for {n_qubits} qubits", amps.len()));
            }
            StateVector::from_amplitudes(amps.to_vec())
        }
        Sector::HammingWeight(w) => sector_map(n_qubits, w)?.embed(amps),
        Sector::SpinFlip { even } => {
            let top = 1usize << (n_qubits - 1);
            if amps.len() != top {
                return Err(contract!("{} amplitudes for a spin-flip sector of size {top}", amps.len()));
            }
            let all = (top << 1) - 1;
            let scale = core::f64::consts::FRAC_1_SQRT_2;
            let mut full = vec![ZERO; top << 1];
            for (z, a) in amps.iter().enumerate() {
                full[z] = a * scale;
                full[z ^ all] = if even { a * scale } else { -a * scale };
            }
            StateVector::from_amplitudes(full)
        }
    }
}

fn check_symmetry(op: &SqhOperator, sector: Sector) -> Result<()> {
    let n = op.n_qubits();
    let ok = match sector {
        Sector::Full => true,
        Sector::HammingWeight(w) => {
            if w > n {
                return Err(invalid!("Hamming weight {w} exceeds {n} qubits"));
            }
            // every off-diagonal element must connect equal weights
            !cfg!(debug_assertions) || n > 6 || {
                let dense = op.to_dense()?;
                (0..dense.nrows()).all(|r| {
                    (0..dense.ncols())
                        .all(|c| r.count_ones() == c.count_ones() || dense[(r, c)].norm() < 1e-12)
                })
            }
        }
        Sector::SpinFlip { .. } => {
            if n == 0 {
                return Err(invalid!("spin-flip sector needs at least one qubit"));
            }
            !cfg!(debug_assertions) || n > 6 || {
                let dense = op.to_dense()?;
                let all = dense.nrows() - 1;
                (0..dense.nrows())
                    .all(|r| (0..dense.ncols()).all(|c| (dense[(r, c)] - dense[(r ^ all, c ^ all)]).norm() < 1e-12))
            }
        }
    };
    if ok {
        Ok(())
    } else {
        Err(invalid!("operator does not commute with the {sector:?} symmetry"))
    }
}

/// The `k` lowest eigenvalues of `op`, optionally restricted to a sector.
pub fn lowest_eigs(op: &SqhOperator, k: usize, sector: Sector, opts: &EigenOptions) -> Result<EigenResult> {
    if k == 0 {
        return Err(contract!("need k >= 1 eigenvalues"));
    }
    check_symmetry(op, sector)?;
    let space: Box<dyn SectorOperator + '_> = match sector {
        Sector::Full => Box::new(FullSpace(op)),
        Sector::HammingWeight(w) => Box::new(HammingSpace { op, map: sector_map(op.n_qubits(), w)? }),
        Sector::SpinFlip { even } => Box::new(SpinFlipSpace { op, even }),
    };
    let dim = space.dim();
    if dim < k {
        return Err(invalid!("sector dimension {dim} is smaller than k = {k}"));
    }
    let dense = match opts.method {
        Method::Dense => true,
        Method::Lanczos => false,
        Method::Auto => dim <= opts.dense_threshold,
    };
    let mut result = if dense {
        dense_lowest(space.as_ref(), k, sector)?
    } else {
        lanczos(space.as_ref(), k, sector, op.norm_bound(), opts)?
    };
    if let Some(&worst) = result.residuals.iter().find(|&&r| !(r < opts.tol.max(dense_floor(op)))) {
        return Err(Error::NoConvergence { iterations: result.iterations, residual: worst });
    }
    sort_pairs(&mut result);
    Ok(result)
}

// residual floor of a backward-stable dense solve
fn dense_floor(op: &SqhOperator) -> f64 {
    op.norm_bound() * 1e-13
}

fn sort_pairs(r: &mut EigenResult) {
    let mut idx: Vec<usize> = (0..r.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| r.eigenvalues[a].total_cmp(&r.eigenvalues[b]));
    r.eigenvalues = idx.iter().map(|&i| r.eigenvalues[i]).collect();
    r.residuals = idx.iter().map(|&i| r.residuals[i]).collect();
    r.eigenvectors = idx.iter().map(|&i| r.eigenvectors[i].clone()).collect();
}

fn residual(space: &dyn SectorOperator, v: &[Complex64], lambda: f64, scratch: &mut [Complex64]) -> f64 {
    space.apply(v, scratch);
    libm::sqrt(scratch.iter().zip(v).map(|(hv, x)| (hv - x * lambda).norm_sqr()).sum())
}

fn dense_lowest(space: &dyn SectorOperator, k: usize, sector: Sector) -> Result<EigenResult> {
    let dim = space.dim();
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    let mut e = vec![ZERO; dim];
    let mut col = vec![ZERO; dim];
    for c in 0..dim {
        e.iter_mut().for_each(|x| *x = ZERO);
        e[c] = Complex64::new(1.0, 0.0);
        space.apply(&e, &mut col);
        for (r, v) in col.iter().enumerate() {
            m[(r, c)] = *v;
        }
    }
    // symmetrize away rounding before the Hermitian solve
    let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut out = EigenResult {
        eigenvalues: Vec::new(),
        residuals: Vec::new(),
        eigenvectors: Vec::new(),
        iterations: 0,
        sector,
    };
    for &i in order.iter().take(k) {
        let v: Vec<Complex64> = eig.eigenvectors.column(i).iter().copied().collect();
        let lambda = eig.eigenvalues[i];
        out.residuals.push(residual(space, &v, lambda, &mut col));
        out.eigenvalues.push(lambda);
        out.eigenvectors.push(v);
    }
    Ok(out)
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    libm::sqrt(a.iter().map(|x| x.norm_sqr()).sum())
}

fn orthogonalize(w: &mut [Complex64], basis: &[Vec<Complex64>]) {
    // two passes of classical Gram-Schmidt
    for _ in 0..2 {
        for v in basis {
            let c = dot(v, w);
            for (x, y) in w.iter_mut().zip(v) {
                *x -= y * c;
            }
        }
    }
}

fn lanczos(space: &dyn SectorOperator, k: usize, sector: Sector, bound: f64, opts: &EigenOptions) -> Result<EigenResult> {
    let dim = space.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out =
        EigenResult { eigenvalues: Vec::new(), residuals: Vec::new(), eigenvectors: Vec::new(), iterations: 0, sector };
    let mut scratch = vec![ZERO; dim];
    while out.eigenvalues.len() < k {
        let start: Vec<Complex64> =
            (0..dim).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let deflated = Deflated { space, locked: &out.eigenvectors, lift: 2.0 * bound + 1.0 };
        let (lambda, v, res, iters) = lanczos_lowest(&deflated, start, opts, &mut scratch)?;
        out.iterations += iters;
        out.eigenvalues.push(lambda);
        out.residuals.push(res);
        out.eigenvectors.push(v);
    }
    Ok(out)
}

/// `H + lift * sum |v><v|` over the locked eigenvectors. Projecting the locked
/// vectors out instead would leave them at eigenvalue 0, which lies below the
/// spectrum of a positive `H` and attracts the iteration through rounding.
struct Deflated<'a> {
    space: &'a dyn SectorOperator,
    locked: &'a [Vec<Complex64>],
    lift: f64,
}

impl SectorOperator for Deflated<'_> {
    fn dim(&self) -> usize {
        self.space.dim()
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.space.apply(x, y);
        for v in self.locked {
            let c = dot(v, x) * self.lift;
            for (o, a) in y.iter_mut().zip(v) {
                *o += a * c;
            }
        }
    }
}

/// Lowest eigenpair of `op.space` on the orthogonal complement of `op.locked`.
fn lanczos_lowest(
    op: &Deflated<'_>,
    mut start: Vec<Complex64>,
    opts: &EigenOptions,
    scratch: &mut [Complex64],
) -> Result<(f64, Vec<Complex64>, f64, usize)> {
    let (space, locked) = (op.space, op.locked);
    let dim = space.dim();
    let kmax = opts.max_krylov.min(dim - locked.len()).max(1);
    let mut iterations = 0;
    let mut best = f64::INFINITY;
    for _restart in 0..=opts.max_restarts {
        orthogonalize(&mut start, locked);
        let n0 = norm(&start);
        if n0 < BREAKDOWN {
            return Err(Error::NoConvergence { iterations, residual: best });
        }
        start.iter_mut().for_each(|x| *x /= n0);
        let mut basis: Vec<Vec<Complex64>> = vec![start];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        loop {
            let j = alpha.len();
            let mut w = vec![ZERO; dim];
            op.apply(&basis[j], &mut w);
            iterations += 1;
            let a = dot(&basis[j], &w).re;
            orthogonalize(&mut w, &basis);
            let b = norm(&w);
            alpha.push(a);
            let size = j + 1;
            let exhausted = size == kmax || b < BREAKDOWN;
            if size.is_multiple_of(5) || exhausted {
                let (theta, s) = lowest_tridiagonal(&alpha, &beta);
                let estimate = b * s[size - 1].abs();
                if estimate < 0.1 * opts.tol || exhausted {
                    let mut v = vec![ZERO; dim];
                    for (q, c) in basis.iter().zip(s.iter()) {
                        for (x, y) in v.iter_mut().zip(q) {
                            *x += y * *c;
                        }
                    }
                    orthogonalize(&mut v, locked);
                    let nv = norm(&v);
                    v.iter_mut().for_each(|x| *x /= nv);
                    let r = residual(space, &v, theta, scratch);
                    best = best.min(r);
                    if r < opts.tol {
                        return Ok((theta, v, r, iterations));
                    }
                    if exhausted || estimate < 0.1 * opts.tol {
                        // explicit restart from the current Ritz vector
                        start = v;
                        break;
                    }
                }
            }
            beta.push(b);
            w.iter_mut().for_each(|x| *x /= b);
            basis.push(w);
        }
    }
    Err(Error::NoConvergence { iterations, residual: best })
}

/// Lowest eigenpair of the real symmetric tridiagonal matrix `(alpha, beta)`.
fn lowest_tridiagonal(alpha: &[f64], beta: &[f64]) -> (f64, DVector<f64>) {
    let n = alpha.len();
    let mut t = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        t[(i, i)] = alpha[i];
        if i + 1 < n {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = t.symmetric_eigen();
    let i = (0..n).min_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b])).expect("non-empty");
    (eig.eigenvalues[i], eig.eigenvectors.column(i).into_owned())
}

/// Lowest two levels of `H(s)` along a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GapCurve {
    pub s_grid: Vec<f64>,
    pub e1: Vec<f64>,
    pub e2: Vec<f64>,
    pub gap: Vec<f64>,
    /// `(s*, gap_min)`.
    pub min_gap: (f64, f64),
    pub max_residual: f64,
    pub sector: Sector,
}

/// `points` equally spaced values from 0 to 1 inclusive.
pub fn uniform_grid(points: usize) -> Vec<f64> {
    let last = (points.max(2) - 1) as f64;
    (0..points.max(2)).map(|i| i as f64 / last).collect()
}

pub fn gap_curve(path: &Path, s_grid: &[f64], sector: Sector, opts: &EigenOptions) -> Result<GapCurve> {
    if s_grid.len() < 2 {
        return Err(contract!("a gap curve needs at least two grid points"));
    }
    if s_grid.iter().any(|s| !(0.0..=1.0).contains(s)) || s_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(contract!("grid must be strictly increasing within [0, 1]"));
    }
    let mut curve = GapCurve {
        s_grid: s_grid.to_vec(),
        e1: Vec::with_capacity(s_grid.len()),
        e2: Vec::with_capacity(s_grid.len()),
        gap: Vec::with_capacity(s_grid.len()),
        min_gap: (0.0, 0.0),
        max_residual: 0.0,
        sector,
    };
    for &s in s_grid {
        let at = |e: Error| Error::AtParameter { s, source: Box::new(e) };
        let h = hamiltonian_at(path, s).map_err(at)?;
        let r = lowest_eigs(&h, 2, sector, opts).map_err(at)?;
        curve.e1.push(r.eigenvalues[0]);
        curve.e2.push(r.eigenvalues[1]);
        curve.gap.push(r.eigenvalues[1] - r.eigenvalues[0]);
        curve.max_residual = curve.max_residual.max(r.max_residual());
    }
    curve.min_gap = min_gap(&curve);
    Ok(curve)
}

/// Grid argmin of the gap; ties go to the smaller `s`.
pub fn min_gap(curve: &GapCurve) -> (f64, f64) {
    let mut best = (curve.s_grid[0], curve.gap[0]);
    for (&s, &g) in curve.s_grid.iter().zip(&curve.gap).skip(1) {
        if g < best.1 {
            best = (s, g);
        }
    }
    best
}
