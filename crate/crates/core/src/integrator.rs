//! Fixed-step Adams-Bashforth-Moulton integration of `i d/dt psi = H(t/T) psi`.
//!
//! Each step predicts with the 4-step Adams-Bashforth formula, evaluates the
//! derivative once at the predicted point and corrects with the 3-step
//! Adams-Moulton formula, storing the predicted-point derivative as history
//! (PEC mode). The first three steps of every smooth segment use classical
//! Runge-Kutta to build the history. Segments end at the kinks of the
//! envelopes so no multistep history straddles a derivative jump.
//!
//! Internally the identity component `c(t)` of `H(t)` is removed from the
//! generator and its phase `exp(-i int c dt)` is multiplied back onto every
//! state handed out, so results carry the exact global phase of the full
//! Hamiltonian while the stepper only sees the traceless part.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{contract, invalid};
use crate::paths::{Envelope, Path};
use crate::sqh::{accumulate_term, linear_combine, SqhOperator, TermKernel};
use crate::{Error, Result, StateVector};

/// Default tolerated `|1 - ||psi||^2|` before an evolution is declared divergent.
pub const DEFAULT_NORM_TOLERANCE: f64 = 1e-6;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `H(t) = sum_p envelope_p(t/T) op_p` over a total time `T`, with all terms
/// of all parts merged into one list so `H(t)|psi>` is a single pass.
#[derive(Clone, Debug)]
pub struct TimeDependentHamiltonian {
    n_qubits: usize,
    total_time: f64,
    envelopes: Vec<Envelope>,
    operators: Vec<SqhOperator>,
    shifts: Vec<f64>,
    kernels: Vec<TermKernel>,
    // weights[p][j]: weight of merged term j in part p
    weights: Vec<Vec<f64>>,
    breakpoints: Vec<f64>,
}

impl TimeDependentHamiltonian {
    pub fn new(parts: Vec<(Envelope, SqhOperator)>, total_time: f64) -> Result<Self> {
        let Some((_, first)) = parts.first() else {
            return Err(contract!("a time-dependent Hamiltonian needs at least one part"));
        };
        let n = first.n_qubits();
        if parts.iter().any(|(_, op)| op.n_qubits() != n) {
            return Err(contract!("all parts must act on {n} qubits"));
        }
        if !(total_time >= 0.0 && total_time.is_finite()) {
            return Err(invalid!("total time {total_time} must be finite and non-negative"));
        }
        let mut index: Vec<(&[(usize, crate::PauliAxis)], TermKernel)> = Vec::new();
        for (_, op) in &parts {
            for t in op.terms() {
                index.push((t.factors(), t.kernel()));
            }
        }
        index.sort_by(|a, b| a.0.cmp(b.0));
        index.dedup_by(|a, b| a.0 == b.0);
        let weights = parts
            .iter()
            .map(|(_, op)| {
                let mut w = vec![0.0; index.len()];
                for t in op.terms() {
                    let j = index.binary_search_by(|probe| probe.0.cmp(t.factors())).expect("indexed");
                    w[j] = t.weight();
                }
                w
            })
            .collect();
        let kernels = index.iter().map(|e| e.1).collect();
        let mut breakpoints: Vec<f64> = parts.iter().flat_map(|(e, _)| e.breakpoints()).collect();
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        Ok(TimeDependentHamiltonian {
            n_qubits: n,
            total_time,
            shifts: parts.iter().map(|(_, op)| op.shift()).collect(),
            envelopes: parts.iter().map(|p| p.0).collect(),
            operators: parts.into_iter().map(|p| p.1).collect(),
            kernels,
            weights,
            breakpoints,
        })
    }

    pub fn from_path(path: &Path, total_time: f64) -> Result<Self> {
        Self::new(path.parts().to_vec(), total_time)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    /// Number of distinct Pauli products across all parts.
    pub fn merged_term_count(&self) -> usize {
        self.kernels.len()
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    fn s_of(&self, t: f64) -> f64 {
        if self.total_time == 0.0 {
            0.0
        } else {
            (t / self.total_time).clamp(0.0, 1.0)
        }
    }

    fn envelope_values(&self, t: f64) -> Result<Vec<f64>> {
        let s = self.s_of(t);
        let values: Vec<f64> = self.envelopes.iter().map(|e| e.value(s)).collect();
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Numerical { t, message: alloc::format!("envelope evaluated to {v}") });
        }
        Ok(values)
    }

    /// `H(t)` as a static operator.
    pub fn operator_at(&self, t: f64) -> Result<SqhOperator> {
        let values = self.envelope_values(t)?;
        let parts: Vec<(f64, &SqhOperator)> = values.iter().copied().zip(&self.operators).collect();
        linear_combine(&parts)
    }

    /// `sum_p |env_p(s)| (|shift_p| + sum |w|)` maximized over `s in {0, 1/2, 1}`.
    pub fn energy_bound(&self) -> f64 {
        [0.0, 0.5, 1.0]
            .into_iter()
            .map(|s| {
                self.envelopes
                    .iter()
                    .zip(&self.operators)
                    .map(|(e, op)| e.value(s).abs() * op.norm_bound())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// Like [`energy_bound`](Self::energy_bound) but without the identity
    /// components, which the stepper never sees.
    fn traceless_bound(&self) -> f64 {
        [0.0, 0.5, 1.0]
            .into_iter()
            .map(|s| {
                self.envelopes
                    .iter()
                    .zip(&self.weights)
                    .map(|(e, w)| e.value(s).abs() * w.iter().map(|x| x.abs()).sum::<f64>())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// Identity coefficient `c(t)`.
    fn shift_at(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.shifts).map(|(v, c)| v * c).sum()
    }

    /// `int_0^t c(t') dt'`.
    fn phase_integral(&self, t: f64) -> f64 {
        let s = self.s_of(t);
        self.total_time * self.envelopes.iter().zip(&self.shifts).map(|(e, c)| c * e.integral(s)).sum::<f64>()
    }

    /// `out = -i (H(t) - offset) psi` with envelopes already evaluated.
    fn apply_generator(&self, values: &[f64], offset: f64, psi: &[Complex64], out: &mut [Complex64]) {
        let diag = self.shift_at(values) - offset;
        for (o, p) in out.iter_mut().zip(psi) {
            *o = p * diag;
        }
        for (j, k) in self.kernels.iter().enumerate() {
            let w: f64 = values.iter().zip(&self.weights).map(|(v, ws)| v * ws[j]).sum();
            if w != 0.0 {
                accumulate_term(*k, w, psi, out);
            }
        }
        for o in out.iter_mut() {
            *o = Complex64::new(o.im, -o.re);
        }
    }

    fn frame_derivative(&self, t: f64, psi: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        let values = self.envelope_values(t)?;
        let offset = self.shift_at(&values);
        self.apply_generator(&values, offset, psi, out);
        Ok(())
    }
}

/// Right-hand side of the Schrödinger equation, `-i H(t) psi` (hbar = 1).
pub fn rhs(ham: &TimeDependentHamiltonian, psi: &StateVector, t: f64) -> Result<StateVector> {
    if psi.n_qubits() != ham.n_qubits {
        return Err(contract!("state has {} qubits, Hamiltonian {}", psi.n_qubits(), ham.n_qubits));
    }
    if !(0.0..=ham.total_time).contains(&t) {
        return Err(contract!("time {t} outside [0, {}]", ham.total_time));
    }
    let values = ham.envelope_values(t)?;
    let mut out = vec![ZERO; psi.dim()];
    ham.apply_generator(&values, 0.0, psi.amplitudes(), &mut out);
    Ok(StateVector::from_amplitudes(out).expect("same dimension"))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolutionSpec {
    /// Largest step, in units of `1/omega`. Segments use the largest step
    /// `<= dt` that divides them evenly.
    pub dt: f64,
    pub norm_tolerance: f64,
    pub renormalize: bool,
    /// Invoke the observer with a checkpoint every this many steps.
    pub checkpoint_every: Option<u64>,
}

impl EvolutionSpec {
    pub fn new(dt: f64) -> Self {
        EvolutionSpec { dt, norm_tolerance: DEFAULT_NORM_TOLERANCE, renormalize: false, checkpoint_every: None }
    }

    /// `dt = min(1e-2, 0.05 / E_max)` with `E_max` the summed term weights of
    /// `H(s)` at `s in {0, 1/2, 1}`. Identity components are left out because
    /// the stepper integrates them exactly.
    pub fn default_for(ham: &TimeDependentHamiltonian) -> Self {
        let bound = ham.traceless_bound();
        let dt = if bound > 0.0 { (0.05 / bound).min(1e-2) } else { 1e-2 };
        Self::new(dt)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Diagnostics {
    pub steps: u64,
    pub bootstrap_steps: u64,
    pub rhs_evaluations: u64,
    pub segments: usize,
    /// `|1 - ||psi(T)||^2|`.
    pub norm_drift: f64,
    pub renormalizations: u64,
}

/// Everything needed to resume an evolution bit-for-bit.
///
/// `state` and `history` live in the shift-free frame: `state` lacks the
/// identity phase `exp(-i int c)`, and `history` holds the stored
/// derivatives `f_n, f_{n-1}, ...` of the shift-free generator, newest first.
#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub t: f64,
    pub step: u64,
    pub segment: usize,
    pub segment_step: u64,
    pub state: StateVector,
    pub history: Vec<Vec<Complex64>>,
    pub diagnostics: Diagnostics,
}

struct Segment {
    t0: f64,
    steps: u64,
    h: f64,
}

/// Step-by-step driver; see [`evolve`] for the one-shot form.
pub struct Evolver<'a> {
    ham: &'a TimeDependentHamiltonian,
    spec: EvolutionSpec,
    segments: Vec<Segment>,
    segment: usize,
    segment_step: u64,
    // state in the shift-free frame
    psi: Vec<Complex64>,
    history: Vec<Vec<Complex64>>,
    scratch: [Vec<Complex64>; 3],
    diag: Diagnostics,
}

impl<'a> Evolver<'a> {
    pub fn new(psi0: &StateVector, ham: &'a TimeDependentHamiltonian, spec: EvolutionSpec) -> Result<Self> {
        if psi0.n_qubits() != ham.n_qubits {
            return Err(contract!("state has {} qubits, Hamiltonian {}", psi0.n_qubits(), ham.n_qubits));
        }
        psi0.check_normalized(spec.norm_tolerance)?;
        if !(spec.dt > 0.0 && spec.dt.is_finite()) {
            return Err(invalid!("time step {} must be positive", spec.dt));
        }
        if ham.total_time > 0.0 && spec.dt > ham.total_time {
            return Err(invalid!("time step {} exceeds total time {}", spec.dt, ham.total_time));
        }
        let segments = build_segments(ham, spec.dt);
        let dim = psi0.dim();
        Ok(Evolver {
            ham,
            spec,
            diag: Diagnostics { segments: segments.len(), ..Diagnostics::default() },
            segments,
            segment: 0,
            segment_step: 0,
            psi: psi0.amplitudes().to_vec(),
            history: Vec::new(),
            scratch: [vec![ZERO; dim], vec![ZERO; dim], vec![ZERO; dim]],
        })
    }

    /// Continue from a checkpoint taken with the same Hamiltonian and spec.
    pub fn resume(ham: &'a TimeDependentHamiltonian, spec: EvolutionSpec, cp: &Checkpoint) -> Result<Self> {
        let mut ev = Self::new(&cp.state, ham, spec)?;
        if cp.segment > ev.segments.len() {
            return Err(invalid!("checkpoint segment {} does not exist", cp.segment));
        }
        let dim = cp.state.dim();
        if cp.history.len() > 4 || cp.history.iter().any(|f| f.len() != dim) {
            return Err(invalid!("checkpoint derivative history is malformed"));
        }
        ev.segment = cp.segment;
        ev.segment_step = cp.segment_step;
        ev.history = cp.history.clone();
        ev.diag = cp.diagnostics;
        Ok(ev)
    }

    pub fn is_finished(&self) -> bool {
        self.segment >= self.segments.len()
    }

    pub fn time(&self) -> f64 {
        match self.segments.get(self.segment) {
            Some(seg) => seg.t0 + self.segment_step as f64 * seg.h,
            None => self.ham.total_time,
        }
    }

    pub fn diagnostics(&self) -> Diagnostics {
        self.diag
    }

    /// The physical state `psi(t)` including its global phase.
    pub fn state(&self) -> StateVector {
        let phase = Complex64::from_polar(1.0, -self.ham.phase_integral(self.time()));
        let amps = self.psi.iter().map(|a| a * phase).collect();
        StateVector::from_amplitudes(amps).expect("same dimension")
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            t: self.time(),
            step: self.diag.steps,
            segment: self.segment,
            segment_step: self.segment_step,
            state: StateVector::from_amplitudes(self.psi.clone()).expect("same dimension"),
            history: self.history.clone(),
            diagnostics: self.diag,
        }
    }

    fn eval(&mut self, t: f64, y: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        self.diag.rhs_evaluations += 1;
        self.ham.frame_derivative(t, y, out)
    }

    /// Advance by one step. Returns `false` once the final time is reached.
    pub fn step(&mut self) -> Result<bool> {
        let Some(seg) = self.segments.get(self.segment) else {
            return Ok(false);
        };
        let (t0, h, steps) = (seg.t0, seg.h, seg.steps);
        let t = t0 + self.segment_step as f64 * h;
        let t_next = if self.segment_step + 1 == steps {
            self.segments.get(self.segment + 1).map_or(self.ham.total_time, |s| s.t0)
        } else {
            t0 + (self.segment_step + 1) as f64 * h
        };

        if self.history.is_empty() {
            let mut f0 = vec![ZERO; self.psi.len()];
            let psi = core::mem::take(&mut self.psi);
            self.eval(t, &psi, &mut f0)?;
            self.psi = psi;
            self.history.push(f0);
        }

        if self.history.len() < 4 {
            self.rk4_step(t, h)?;
            self.diag.bootstrap_steps += 1;
        } else {
            self.abm_step(t_next, h)?;
        }
        self.diag.steps += 1;
        self.segment_step += 1;
        if self.segment_step == steps {
            self.segment += 1;
            self.segment_step = 0;
            self.history.clear();
        }
        self.check_norm(t_next)?;
        Ok(!self.is_finished())
    }

    fn rk4_step(&mut self, t: f64, h: f64) -> Result<()> {
        let n = self.psi.len();
        let [mut tmp, mut k, mut acc] = core::mem::take(&mut self.scratch);
        let psi = core::mem::take(&mut self.psi);
        let f0 = &self.history[0];
        for i in 0..n {
            acc[i] = f0[i];
            tmp[i] = psi[i] + f0[i] * (0.5 * h);
        }
        let result = (|| {
            self.eval(t + 0.5 * h, &tmp, &mut k)?;
            for i in 0..n {
                acc[i] += k[i] * 2.0;
                tmp[i] = psi[i] + k[i] * (0.5 * h);
            }
            self.eval(t + 0.5 * h, &tmp, &mut k)?;
            for i in 0..n {
                acc[i] += k[i] * 2.0;
                tmp[i] = psi[i] + k[i] * h;
            }
            self.eval(t + h, &tmp, &mut k)?;
            for i in 0..n {
                acc[i] += k[i];
                tmp[i] = psi[i] + acc[i] * (h / 6.0);
            }
            let mut f_new = vec![ZERO; n];
            self.eval(t + h, &tmp, &mut f_new)?;
            Ok(f_new)
        })();
        self.psi = tmp;
        self.scratch = [psi, k, acc];
        self.history.insert(0, result?);
        Ok(())
    }

    fn abm_step(&mut self, t_next: f64, h: f64) -> Result<()> {
        let n = self.psi.len();
        let mut predicted = core::mem::take(&mut self.scratch[0]);
        {
            let [f0, f1, f2, f3] = [&self.history[0], &self.history[1], &self.history[2], &self.history[3]];
            let c = h / 24.0;
            for i in 0..n {
                predicted[i] = self.psi[i] + (f0[i] * 55.0 - f1[i] * 59.0 + f2[i] * 37.0 - f3[i] * 9.0) * c;
            }
        }
        // oldest derivative buffer is recycled for the new one
        let mut f_pred = self.history.pop().expect("four derivatives");
        let eval = self.eval(t_next, &predicted, &mut f_pred);
        self.scratch[0] = predicted;
        eval?;
        let [f0, f1, f2] = [&self.history[0], &self.history[1], &self.history[2]];
        let c = h / 24.0;
        for i in 0..n {
            self.psi[i] += (f_pred[i] * 9.0 + f0[i] * 19.0 - f1[i] * 5.0 + f2[i]) * c;
        }
        self.history.insert(0, f_pred);
        Ok(())
    }

    fn check_norm(&mut self, t: f64) -> Result<()> {
        let norm: f64 = self.psi.iter().map(|a| a.norm_sqr()).sum();
        if !norm.is_finite() {
            return Err(Error::Numerical { t, message: alloc::string::String::from("non-finite amplitude") });
        }
        let drift = (1.0 - norm).abs();
        self.diag.norm_drift = drift;
        if drift > self.spec.norm_tolerance {
            if !self.spec.renormalize {
                return Err(Error::Divergence { step: self.diag.steps, drift, tolerance: self.spec.norm_tolerance });
            }
            let scale = 1.0 / libm::sqrt(norm);
            self.psi.iter_mut().for_each(|a| *a *= scale);
            self.diag.renormalizations += 1;
            self.diag.norm_drift = 0.0;
        }
        Ok(())
    }

    /// Run to the end, calling `observer` after every step with the
    /// evolver. Returning `false` from the observer stops early.
    pub fn run_with(&mut self, mut observer: impl FnMut(&Evolver<'a>) -> Result<bool>) -> Result<()> {
        while !self.is_finished() {
            self.step()?;
            if !observer(self)? {
                break;
            }
        }
        Ok(())
    }
}

fn build_segments(ham: &TimeDependentHamiltonian, dt: f64) -> Vec<Segment> {
    let total = ham.total_time;
    if total == 0.0 {
        return Vec::new();
    }
    let mut cuts = vec![0.0];
    cuts.extend(ham.breakpoints.iter().copied());
    cuts.push(1.0);
    cuts.windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let len = (w[1] - w[0]) * total;
            let steps = libm::ceil(len / dt - 1e-9).max(1.0) as u64;
            Segment { t0: w[0] * total, steps, h: len / steps as f64 }
        })
        .collect()
}

/// Evolve `psi0` from `t = 0` to `T`. With `T = 0` the state is returned unchanged.
pub fn evolve(
    psi0: &StateVector,
    ham: &TimeDependentHamiltonian,
    spec: &EvolutionSpec,
) -> Result<(StateVector, Diagnostics)> {
    let mut ev = Evolver::new(psi0, ham, *spec)?;
    while ev.step()? {}
    Ok((ev.state(), ev.diagnostics()))
}
