//! Text and binary file formats: EC3 instances, operator dumps, state dumps
//! and checkpoint sidecars.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use aqcsim::ec3::{Clause, Ec3Instance};
use aqcsim::integrator::{Checkpoint, Diagnostics};
use aqcsim::{Complex64, PauliAxis, SqhOperator, SqhTerm, StateVector};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{LabError, Result};

/// Serialize an instance:
///
/// ```text
/// ec3 <n> <m>
/// solution <z>        (optional)
/// <i> <j> <k>         (m lines, 1-based, ascending)
/// ```
pub fn emit_instance(inst: &Ec3Instance) -> String {
    let mut out = format!("ec3 {} {}\n", inst.n(), inst.m());
    if let Some(z) = inst.known_solution() {
        writeln!(out, "solution {z}").unwrap();
    }
    for c in inst.clauses() {
        let [i, j, k] = c.bits();
        writeln!(out, "{i} {j} {k}").unwrap();
    }
    out
}

fn numbers<T: std::str::FromStr>(line: usize, fields: &[&str]) -> Result<Vec<T>> {
    fields
        .iter()
        .map(|f| f.parse::<T>().map_err(|_| LabError::parse(line, format!("`{f}` is not a non-negative integer"))))
        .collect()
}

pub fn parse_instance(text: &str) -> Result<Ec3Instance> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    let (line, header) = lines.next().ok_or_else(|| LabError::parse(1, "empty instance file"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 || fields[0] != "ec3" {
        return Err(LabError::parse(line, "expected header `ec3 <n> <m>`"));
    }
    let nm: Vec<usize> = numbers(line, &fields[1..])?;
    let (n, m) = (nm[0], nm[1]);
    let mut solution = None;
    let mut clauses: Vec<Clause> = Vec::with_capacity(m);
    for (line, l) in lines {
        let fields: Vec<&str> = l.split_whitespace().collect();
        if fields.first() == Some(&"solution") {
            if solution.is_some() || !clauses.is_empty() || fields.len() != 2 {
                return Err(LabError::parse(line, "`solution <z>` must directly follow the header"));
            }
            solution = Some(numbers::<usize>(line, &fields[1..])?[0]);
            continue;
        }
        if fields.len() != 3 {
            return Err(LabError::parse(line, "expected a clause `<i> <j> <k>`"));
        }
        let b: Vec<usize> = numbers(line, &fields)?;
        if !(b[0] < b[1] && b[1] < b[2]) {
            return Err(LabError::parse(line, "clause indices must be strictly ascending"));
        }
        if b[0] == 0 || b[2] > n {
            return Err(LabError::parse(line, format!("clause indices must lie in 1..={n}")));
        }
        let c = Clause::new(b[0], b[1], b[2]).map_err(|e| LabError::parse(line, e.to_string()))?;
        if clauses.contains(&c) {
            return Err(LabError::parse(line, format!("duplicate clause {c}")));
        }
        if clauses.len() == m {
            return Err(LabError::parse(line, format!("more than the declared {m} clauses")));
        }
        clauses.push(c);
    }
    if clauses.len() != m {
        return Err(LabError::parse(text.lines().count().max(1), format!("expected {m} clauses, found {}", clauses.len())));
    }
    Ec3Instance::new(n, clauses, solution).map_err(|e| LabError::parse(2, e.to_string()))
}

pub fn read_instance(path: &Path) -> Result<Ec3Instance> {
    let text = fs::read_to_string(path).map_err(LabError::io(path))?;
    parse_instance(&text).map_err(|e| match e {
        LabError::Parse { line, message } => LabError::Parse { line, message: format!("{}: {message}", path.display()) },
        other => other,
    })
}

pub fn write_instance(path: &Path, inst: &Ec3Instance) -> Result<()> {
    fs::write(path, emit_instance(inst)).map_err(LabError::io(path))
}

/// Operator dump: `shift <v>` then one `<weight> <q>:<axis> ...` line per term.
/// Floats use the shortest representation that round-trips.
pub fn emit_operator(op: &SqhOperator) -> String {
    op.to_string()
}

/// Inverse of [`emit_operator`]; `n` is the register size.
pub fn parse_operator(text: &str, n: usize) -> Result<SqhOperator> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    let (line, first) = lines.next().ok_or_else(|| LabError::parse(1, "empty operator dump"))?;
    let shift = first
        .strip_prefix("shift ")
        .and_then(|v| v.trim().parse::<f64>().ok())
        .ok_or_else(|| LabError::parse(line, "expected `shift <value>`"))?;
    let mut terms = Vec::new();
    for (line, l) in lines {
        let mut fields = l.split_whitespace();
        let weight: f64 = fields
            .next()
            .and_then(|w| w.parse().ok())
            .ok_or_else(|| LabError::parse(line, "expected a term weight"))?;
        let factors = fields
            .map(|f| {
                let (q, a) = f.split_once(':')?;
                let mut axis = a.chars();
                let symbol = axis.next()?;
                if axis.next().is_some() {
                    return None;
                }
                Some((q.parse::<usize>().ok()?, PauliAxis::from_symbol(symbol)?))
            })
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| LabError::parse(line, "factors must look like `<qubit>:<x|y|z>`"))?;
        terms.push(SqhTerm::new(weight, factors).map_err(|e| LabError::parse(line, e.to_string()))?);
    }
    Ok(SqhOperator::new(n, shift, terms)?)
}

const STATE_MAGIC: &[u8; 8] = b"SQHSTATE";

/// 16-byte header (`SQHSTATE`, `u32 n`, `u32 0`) and interleaved
/// little-endian `re, im` doubles.
pub fn encode_state(psi: &StateVector) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + 16 * psi.dim());
    out.extend_from_slice(STATE_MAGIC);
    out.extend_from_slice(&(psi.n_qubits() as u32).to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    for a in psi.amplitudes() {
        out.extend_from_slice(&a.re.to_le_bytes());
        out.extend_from_slice(&a.im.to_le_bytes());
    }
    out
}

pub fn decode_state(bytes: &[u8]) -> Result<StateVector> {
    let bad = |m: &str| LabError::Config(format!("state dump: {m}"));
    if bytes.len() < 16 || &bytes[..8] != STATE_MAGIC {
        return Err(bad("missing SQHSTATE header"));
    }
    let n = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    if n == 0 || n > aqcsim::state::DEFAULT_QUBIT_CAP {
        return Err(bad("qubit count out of range"));
    }
    let body = &bytes[16..];
    if body.len() != 16 << n {
        return Err(bad("payload length does not match the qubit count"));
    }
    let f = |c: &[u8]| f64::from_le_bytes(c.try_into().unwrap());
    let amps = body.chunks_exact(16).map(|c| Complex64::new(f(&c[..8]), f(&c[8..]))).collect();
    Ok(StateVector::from_amplitudes(amps)?)
}

/// SHA-256 of the state dump, hex encoded.
pub fn state_checksum(psi: &StateVector) -> String {
    Sha256::digest(encode_state(psi)).iter().map(|b| format!("{b:02x}")).collect()
}

/// JSON sidecar stored next to the state dump of a checkpoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckpointSidecar {
    pub t: f64,
    /// Step size of the run, needed to resume it.
    pub dt: f64,
    pub step: u64,
    pub segment: usize,
    pub segment_step: u64,
    /// Stored derivatives, newest first, as `[re, im]` pairs.
    pub history: Vec<Vec<[f64; 2]>>,
    pub segments: usize,
    pub bootstrap_steps: u64,
    pub rhs_evaluations: u64,
    pub renormalizations: u64,
    pub norm_drift: f64,
}

/// Write `<stem>.state` and `<stem>.json` for a run with step `dt`.
pub fn write_checkpoint(stem: &Path, cp: &Checkpoint, dt: f64) -> Result<()> {
    let state_path = stem.with_extension("state");
    fs::write(&state_path, encode_state(&cp.state)).map_err(LabError::io(&state_path))?;
    let d = cp.diagnostics;
    let sidecar = CheckpointSidecar {
        t: cp.t,
        dt,
        step: cp.step,
        segment: cp.segment,
        segment_step: cp.segment_step,
        history: cp.history.iter().map(|f| f.iter().map(|c| [c.re, c.im]).collect()).collect(),
        segments: d.segments,
        bootstrap_steps: d.bootstrap_steps,
        rhs_evaluations: d.rhs_evaluations,
        renormalizations: d.renormalizations,
        norm_drift: d.norm_drift,
    };
    let json_path = stem.with_extension("json");
    fs::write(&json_path, serde_json::to_string_pretty(&sidecar)?).map_err(LabError::io(&json_path))
}

/// The checkpoint and the step size it was taken with.
pub fn read_checkpoint(stem: &Path) -> Result<(Checkpoint, f64)> {
    let state_path = stem.with_extension("state");
    let state = decode_state(&fs::read(&state_path).map_err(LabError::io(&state_path))?)?;
    let json_path = stem.with_extension("json");
    let text = fs::read_to_string(&json_path).map_err(LabError::io(&json_path))?;
    let s: CheckpointSidecar = serde_json::from_str(&text)?;
    let cp = Checkpoint {
        t: s.t,
        step: s.step,
        segment: s.segment,
        segment_step: s.segment_step,
        state,
        history: s.history.iter().map(|f| f.iter().map(|[re, im]| Complex64::new(*re, *im)).collect()).collect(),
        diagnostics: Diagnostics {
            steps: s.step,
            bootstrap_steps: s.bootstrap_steps,
            rhs_evaluations: s.rhs_evaluations,
            segments: s.segments,
            norm_drift: s.norm_drift,
            renormalizations: s.renormalizations,
        },
    };
    Ok((cp, s.dt))
}
