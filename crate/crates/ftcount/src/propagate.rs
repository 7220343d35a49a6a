//! Reference Pauli-frame propagation through a gadget, fault scenarios and the
//! correctness predicates.
//!
//! The frame holds each qubit's error relative to the ideal run. Diagnosed
//! corrections are folded into the frame of the data block when a syndrome is
//! read, so the frame on a data block is always the error *after* the classical
//! record has been taken into account; no physical recovery is ever applied.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::circuit::{CheckKind, Consumer, Event, Gadget, Ideal, Location, LocationType, Operation, Projection};
use crate::pauli::{BlockError, Pauli1, PauliError, PauliOp, StabilizerCode, Syndrome};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RunError {
    #[error("location {0} does not exist")]
    NoSuchLocation(usize),
    #[error("location {loc}: expected {expected} Pauli(s), got {got}")]
    Arity { loc: usize, expected: usize, got: usize },
    #[error("block {0} is not an input block")]
    NotAnInput(usize),
    #[error("location {0} is not a T location")]
    NotT(usize),
    #[error("duplicate fault at location {0}")]
    Duplicate(usize),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("scenario line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fault {
    pub loc: usize,
    /// One Pauli per qubit of the location, control first.
    pub paulis: Vec<Pauli1>,
}

/// Faults, input errors on input blocks, and the free Z bits chosen at T gates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FaultScenario {
    pub faults: Vec<Fault>,
    pub inputs: Vec<(usize, PauliOp)>,
    pub t_bits: Vec<(usize, bool)>,
}

impl FaultScenario {
    pub fn validate(&self, g: &Gadget) -> Result<(), RunError> {
        let mut seen = std::collections::HashSet::new();
        for f in &self.faults {
            let l = g.locations.get(f.loc).ok_or(RunError::NoSuchLocation(f.loc))?;
            if f.paulis.len() != l.qubits.len() {
                return Err(RunError::Arity { loc: f.loc, expected: l.qubits.len(), got: f.paulis.len() });
            }
            if !seen.insert(f.loc) {
                return Err(RunError::Duplicate(f.loc));
            }
        }
        for (b, p) in &self.inputs {
            if !g.input_blocks.contains(b) {
                return Err(RunError::NotAnInput(*b));
            }
            if p.num_qubits() != 7 {
                return Err(PauliError::DimensionMismatch { left: 7, right: p.num_qubits() }.into());
            }
        }
        for (loc, _) in &self.t_bits {
            let l = g.locations.get(*loc).ok_or(RunError::NoSuchLocation(*loc))?;
            if l.ltype != LocationType::T {
                return Err(RunError::NotT(*loc));
            }
        }
        Ok(())
    }
}

impl fmt::Display for FaultScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for fault in &self.faults {
            let s: String = fault.paulis.iter().map(|p| p.as_char()).collect();
            writeln!(f, "fault {} {s}", fault.loc)?;
        }
        for (b, p) in &self.inputs {
            writeln!(f, "input {b} {p}")?;
        }
        for (loc, bit) in &self.t_bits {
            writeln!(f, "tbit {loc} {}", *bit as u8)?;
        }
        Ok(())
    }
}

impl FromStr for FaultScenario {
    type Err = RunError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut sc = FaultScenario::default();
        for (i, raw) in s.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| RunError::Parse { line: i + 1, msg: msg.to_string() };
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(err("expected three fields"));
            }
            let idx: usize = parts[1].parse().map_err(|_| err("bad index"))?;
            match parts[0] {
                "fault" => {
                    let paulis = parts[2]
                        .chars()
                        .map(Pauli1::from_char)
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| err(&e.to_string()))?;
                    sc.faults.push(Fault { loc: idx, paulis });
                }
                "input" => sc.inputs.push((idx, parts[2].parse().map_err(|e: PauliError| err(&e.to_string()))?)),
                "tbit" => {
                    let bit = match parts[2] {
                        "0" => false,
                        "1" => true,
                        _ => return Err(err("tbit must be 0 or 1")),
                    };
                    sc.t_bits.push((idx, bit));
                }
                _ => return Err(err("unknown directive")),
            }
        }
        Ok(sc)
    }
}

/// Fault alphabet of a location with per-Pauli depolarizing weights.
///
/// Preparations and measurements get the Pauli that flips the prepared or
/// measured eigenstate (weight 2/3) and the one that does not (weight 1/3);
/// single-qubit gates and rests get X, Y, Z at 1/3; CNOTs get all 15
/// nontrivial two-qubit Paulis at 1/15.
pub fn fault_alphabet(l: &Location) -> Vec<(Vec<Pauli1>, f64)> {
    use Pauli1::*;
    match l.op {
        Operation::PrepZero | Operation::MeasZ => vec![(vec![X], 2.0 / 3.0), (vec![Z], 1.0 / 3.0)],
        Operation::PrepPlus | Operation::MeasX => vec![(vec![Z], 2.0 / 3.0), (vec![X], 1.0 / 3.0)],
        Operation::Cnot => {
            let mut v = Vec::with_capacity(15);
            for a in [I, X, Y, Z] {
                for b in [I, X, Y, Z] {
                    if (a, b) != (I, I) {
                        v.push((vec![a, b], 1.0 / 15.0));
                    }
                }
            }
            v
        }
        _ => Pauli1::NONTRIVIAL.iter().map(|&p| (vec![p], 1.0 / 3.0)).collect(),
    }
}

/// Per-qubit X and Z error bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliFrame {
    pub x: Vec<bool>,
    pub z: Vec<bool>,
}

impl PauliFrame {
    pub fn new(n: usize) -> Self {
        PauliFrame { x: vec![false; n], z: vec![false; n] }
    }

    pub fn apply(&mut self, q: usize, p: Pauli1) {
        self.x[q] ^= p.has_x();
        self.z[q] ^= p.has_z();
    }

    pub fn block(&self, qs: &[usize; 7]) -> PauliOp {
        let (mut x, mut z) = (0u64, 0u64);
        for (i, &q) in qs.iter().enumerate() {
            x |= (self.x[q] as u64) << i;
            z |= (self.z[q] as u64) << i;
        }
        PauliOp::from_xz(7, x, z).expect("seven qubits")
    }

    pub fn xor_block(&mut self, qs: &[usize; 7], p: &PauliOp) {
        for (i, &q) in qs.iter().enumerate() {
            self.x[q] ^= p.x() >> i & 1 == 1;
            self.z[q] ^= p.z() >> i & 1 == 1;
        }
    }

    /// Ideal action of a location on the frame, before any fault. Returns the
    /// outcome flip for measurements.
    pub fn step(&mut self, l: &Location, t_bit: bool) -> Option<bool> {
        let q = l.qubits[0];
        match l.op {
            Operation::PrepZero | Operation::PrepPlus => {
                self.x[q] = false;
                self.z[q] = false;
                None
            }
            Operation::MeasZ | Operation::MeasX => {
                let flip = if l.op == Operation::MeasZ { self.x[q] } else { self.z[q] };
                self.x[q] = false;
                self.z[q] = false;
                Some(flip)
            }
            Operation::Cnot => {
                let t = l.qubits[1];
                self.x[t] ^= self.x[q];
                self.z[q] ^= self.z[t];
                None
            }
            Operation::T | Operation::TDagger => {
                if self.x[q] && t_bit {
                    self.z[q] ^= true;
                }
                None
            }
            Operation::Rest => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub accepted: bool,
    /// Reduced errors on the output blocks, in `Gadget::output_blocks` order.
    pub output_errors: Vec<BlockError>,
    pub output_frames: Vec<PauliOp>,
    /// Reduced errors on every data block at the rectangle input, if the gadget marks one.
    pub rec_input_errors: Option<Vec<BlockError>>,
    /// Reduced input errors on every data block (identity for non-input blocks).
    pub input_errors: Vec<BlockError>,
    pub eigenvalue_flips: Vec<bool>,
    /// Rounds whose outcome was left free by a dropped logical X.
    pub eigenvalue_free: Vec<bool>,
    /// Accumulated diagnosed corrections per data block.
    pub records: Vec<PauliOp>,
}

/// Correction Pauli implied by a three-bit sector syndrome.
pub fn sector_correction(code: &StabilizerCode, kind: CheckKind, bits: u64) -> PauliOp {
    match kind {
        CheckKind::XSyndromeExtract => code.decode_syndrome(Syndrome::new(6, bits)),
        CheckKind::ZSyndromeExtract => code.decode_syndrome(Syndrome::new(6, bits << 3)),
        _ => PauliOp::identity(7).unwrap(),
    }
}

/// Canonical X part of a block at a projection: the decoder's residual for the
/// X-sector syndrome, and whether a logical X had to be removed to get there.
pub fn project_x(code: &StabilizerCode, x: u64) -> (u64, bool) {
    let e = code.reduce_block_error(&PauliOp::from_xz(7, x, 0).expect("seven qubits")).expect("seven qubits");
    (e.residual.x(), e.logical_x_flip)
}

/// Lightest X part equivalent to `x` at a projection, and the eigenvalue round
/// freed by a dropped logical X, if any.
pub fn canonical_x(code: &StabilizerCode, p: &Projection, x: u64) -> (u64, Option<usize>) {
    match *p {
        Projection::Eigen { round, .. } => {
            let (c, dropped) = project_x(code, x);
            (c, dropped.then_some(round))
        }
        Projection::Cat { .. } => (if x.count_ones() > 3 { x ^ 0x7f } else { x }, None),
    }
}

/// Eigenvalue acceptance: every round must agree with the one before it unless
/// a logical X was dropped at that round's projection, which leaves its outcome free.
pub fn eigenvalues_agree(eig: &[bool], free: &[bool]) -> bool {
    (1..eig.len()).all(|r| free.get(r).copied().unwrap_or(false) || eig[r] == eig[r - 1])
}

/// Propagates one scenario through the gadget.
pub fn run(g: &Gadget, code: &StabilizerCode, sc: &FaultScenario) -> Result<RunResult, RunError> {
    sc.validate(g)?;
    let n_locs = g.locations.len();
    let mut fault_at: Vec<Option<&[Pauli1]>> = vec![None; n_locs];
    for f in &sc.faults {
        fault_at[f.loc] = Some(&f.paulis);
    }
    let mut t_bit = vec![false; n_locs];
    for &(loc, b) in &sc.t_bits {
        t_bit[loc] = b;
    }

    let mut frame = PauliFrame::new(g.num_qubits);
    let ident = PauliOp::identity(7)?;
    let mut inputs = vec![ident; g.blocks.len()];
    for (b, p) in &sc.inputs {
        frame.xor_block(&g.blocks[*b], p);
        inputs[*b] = inputs[*b].compose(p)?;
    }
    let input_errors = inputs.iter().map(|p| code.reduce_block_error(p)).collect::<Result<Vec<_>, _>>()?;

    let mut flips = vec![false; n_locs];
    let mut accepted = true;
    let n_rounds = g.eigen_rounds();
    let mut eig = vec![false; n_rounds];
    let mut free = vec![false; n_rounds];
    let mut records = vec![ident; g.blocks.len()];
    let mut rec_input = None;

    for ev in g.schedule() {
        match ev {
            Event::Loc(id) => {
                let l = &g.locations[id];
                let fault = fault_at[id];
                if l.op.is_measurement() {
                    if let Some(ps) = fault {
                        frame.apply(l.qubits[0], ps[0]);
                    }
                    flips[id] = frame.step(l, false).unwrap();
                } else {
                    frame.step(l, t_bit[id]);
                    if let Some(ps) = fault {
                        for (&q, &p) in l.qubits.iter().zip(ps) {
                            frame.apply(q, p);
                        }
                    }
                }
            }
            Event::Check(ci) => {
                let c = &g.checks[ci];
                let bits = c.evaluate(|m| flips[m]);
                match c.consumer {
                    Consumer::Record { block } => {
                        let corr = sector_correction(code, c.kind, bits);
                        frame.xor_block(&g.blocks[block], &corr);
                        records[block] = records[block].compose(&corr)?;
                    }
                    Consumer::Reject => accepted &= bits == 0,
                    Consumer::Eigenvalue { round } => eig[round] = bits & 1 == 1,
                }
            }
            Event::Project(i) => {
                let p = &g.projections[i];
                let qs = p.qubits(g);
                let cur = frame.block(qs).x();
                let (x, round) = canonical_x(code, p, cur);
                frame.xor_block(qs, &PauliOp::from_xz(7, cur ^ x, 0)?);
                if let Some(r) = round.filter(|&r| r > 0 && r < n_rounds) {
                    free[r] = true;
                }
            }
            Event::Snapshot => {
                rec_input = Some(
                    g.blocks
                        .iter()
                        .map(|b| code.reduce_block_error(&frame.block(b)))
                        .collect::<Result<Vec<_>, _>>()?,
                );
            }
        }
    }
    accepted &= eigenvalues_agree(&eig, &free);
    let output_frames: Vec<PauliOp> = g.output_blocks.iter().map(|&b| frame.block(&g.blocks[b])).collect();
    let output_errors =
        output_frames.iter().map(|p| code.reduce_block_error(p)).collect::<Result<Vec<_>, _>>()?;
    Ok(RunResult {
        accepted,
        output_errors,
        output_frames,
        rec_input_errors: rec_input,
        input_errors,
        eigenvalue_flips: eig,
        eigenvalue_free: free,
        records,
    })
}

/// Logical flips `(x, z)` after the ideal CNOT acts on the given input flips.
pub fn ideal_cnot(control: (bool, bool), target: (bool, bool)) -> ((bool, bool), (bool, bool)) {
    ((control.0, control.1 ^ target.1), (target.0 ^ control.0, target.1))
}

/// Whether the output matches the ideal action applied to the reference input
/// (the rectangle input when marked, otherwise the gadget input).
pub fn is_correct(g: &Gadget, r: &RunResult) -> bool {
    let reference = r.rec_input_errors.as_ref().unwrap_or(&r.input_errors);
    let flips = |e: &BlockError| (e.logical_x_flip, e.logical_z_flip);
    let out_pos = |b: usize| g.output_blocks.iter().position(|&o| o == b).expect("output block");
    match g.ideal {
        Ideal::None => true,
        Ideal::Identity => g
            .output_blocks
            .iter()
            .enumerate()
            .all(|(i, &b)| flips(&r.output_errors[i]) == flips(&reference[b])),
        Ideal::Cnot { control, target } => {
            let (c, t) = ideal_cnot(flips(&reference[control]), flips(&reference[target]));
            flips(&r.output_errors[out_pos(control)]) == c && flips(&r.output_errors[out_pos(target)]) == t
        }
        Ideal::AState => {
            // Relative to the eigenstate reported last.
            let m = r.eigenvalue_flips.last().copied().unwrap_or(false);
            let e = &r.output_errors[0];
            !e.logical_x_flip && e.logical_z_flip == m
        }
    }
}

/// Accepted and incorrect.
pub fn is_failure(g: &Gadget, r: &RunResult) -> bool {
    r.accepted && !is_correct(g, r)
}
