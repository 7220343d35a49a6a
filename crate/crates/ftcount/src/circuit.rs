//! Gadget intermediate representation: typed locations on a step grid, classical
//! checks over measurement outcomes, and the processing schedule shared by every
//! propagation engine.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

/// Location types, numbered 1 through 8.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LocationType {
    /// Rest during a gate cycle.
    RestGate,
    /// Rest during a measurement cycle.
    RestMeasure,
    PrepZero,
    PrepPlus,
    MeasX,
    MeasZ,
    Cnot,
    /// T or T-dagger.
    T,
}

impl LocationType {
    pub const ALL: [LocationType; 8] = [
        LocationType::RestGate,
        LocationType::RestMeasure,
        LocationType::PrepZero,
        LocationType::PrepPlus,
        LocationType::MeasX,
        LocationType::MeasZ,
        LocationType::Cnot,
        LocationType::T,
    ];

    /// 1-based type number.
    pub fn number(self) -> usize {
        self as usize + 1
    }

    pub fn from_number(n: usize) -> Option<Self> {
        Self::ALL.get(n.checked_sub(1)?).copied()
    }

    pub fn label(self) -> &'static str {
        match self {
            LocationType::RestGate => "rest-gate",
            LocationType::RestMeasure => "rest-measure",
            LocationType::PrepZero => "prep-zero",
            LocationType::PrepPlus => "prep-plus",
            LocationType::MeasX => "meas-x",
            LocationType::MeasZ => "meas-z",
            LocationType::Cnot => "cnot",
            LocationType::T => "t",
        }
    }

    pub fn is_storage(self) -> bool {
        matches!(self, LocationType::RestGate | LocationType::RestMeasure)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Operation {
    PrepZero,
    PrepPlus,
    MeasX,
    MeasZ,
    Cnot,
    T,
    TDagger,
    Rest,
}

impl Operation {
    pub fn arity(self) -> usize {
        if self == Operation::Cnot {
            2
        } else {
            1
        }
    }

    pub fn is_measurement(self) -> bool {
        matches!(self, Operation::MeasX | Operation::MeasZ)
    }

    pub fn mnemonic(self) -> &'static str {
        match self {
            Operation::PrepZero => "prep0",
            Operation::PrepPlus => "prep+",
            Operation::MeasX => "measx",
            Operation::MeasZ => "measz",
            Operation::Cnot => "cnot",
            Operation::T => "t",
            Operation::TDagger => "tdg",
            Operation::Rest => "rest",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Location {
    pub id: usize,
    pub op: Operation,
    pub ltype: LocationType,
    pub step: usize,
    /// Control first for a CNOT.
    pub qubits: Vec<usize>,
    /// Slash-separated sub-gadget path, e.g. `lead-ec[0]/anc0/encoder`.
    pub path: String,
    /// How many locations this one stands for when counting pairs.
    pub multiplicity: u64,
    /// Data block whose leading error correction contains this location.
    pub leading_block: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CheckKind {
    /// X-type stabilizer readout; diagnoses Z errors on the data.
    XSyndromeExtract,
    /// Z-type stabilizer readout; diagnoses X errors on the data.
    ZSyndromeExtract,
    VerifyReject,
    EigenvalueParity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Consumer {
    /// Decode and fold the correction into the block's classical record.
    Record { block: usize },
    /// Reject the run if any parity is odd.
    Reject,
    /// Store the single parity as the eigenvalue flip of a measurement round.
    Eigenvalue { round: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalCheck {
    pub kind: CheckKind,
    /// Measurement location ids; row bit `i` refers to `inputs[i]`.
    pub inputs: Vec<usize>,
    pub rows: Vec<u64>,
    pub consumer: Consumer,
}

impl ClassicalCheck {
    pub fn evaluate(&self, flips: impl Fn(usize) -> bool) -> u64 {
        let mut mask = 0u64;
        for (i, &m) in self.inputs.iter().enumerate() {
            if flips(m) {
                mask |= 1 << i;
            }
        }
        self.rows
            .iter()
            .enumerate()
            .fold(0, |acc, (r, row)| acc | (((row & mask).count_ones() as u64) & 1) << r)
    }
}

/// What a fault-free gadget does to the logical state of its data blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ideal {
    /// No data blocks of interest.
    None,
    Identity,
    Cnot { control: usize, target: usize },
    /// Preparation of an encoded T-gate eigenstate by repeated eigenvalue measurement.
    AState,
}

/// Points where the X part of a frame may be rewritten without changing the
/// physical state. The pessimistic T rule depends on which representative is
/// carried, so the propagators switch to the lightest one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Projection {
    /// A nondestructive eigenvalue measurement of `block` begins. Logical X
    /// content present here only changes which eigenstate is found, so it is
    /// dropped along with stabilizer factors.
    Eigen { step: usize, block: usize, round: usize },
    /// A verified seven-qubit cat state is about to be used; X on all seven
    /// qubits stabilizes it.
    Cat { step: usize, qubits: [usize; 7] },
}

impl Projection {
    pub fn step(&self) -> usize {
        match *self {
            Projection::Eigen { step, .. } | Projection::Cat { step, .. } => step,
        }
    }

    pub fn qubits<'a>(&'a self, g: &'a Gadget) -> &'a [usize; 7] {
        match self {
            Projection::Eigen { block, .. } => &g.blocks[*block],
            Projection::Cat { qubits, .. } => qubits,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Event {
    Loc(usize),
    Check(usize),
    /// Capture data-block errors at the input of the rectangle.
    Snapshot,
    Project(usize),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Gadget {
    pub name: String,
    pub num_qubits: usize,
    pub locations: Vec<Location>,
    pub checks: Vec<ClassicalCheck>,
    /// Data blocks, seven qubits each.
    pub blocks: Vec<[usize; 7]>,
    /// Blocks that carry an incoming state (may hold input errors).
    pub input_blocks: Vec<usize>,
    pub output_blocks: Vec<usize>,
    /// Step at which the rectangle input is captured, after that step's measurements.
    pub rec_boundary: Option<usize>,
    #[serde(default)]
    pub projections: Vec<Projection>,
    pub ideal: Ideal,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    /// Weighted counts per type, index 0 is type 1.
    pub by_type: [u64; 8],
    /// Unweighted number of location records.
    pub physical: usize,
}

impl Census {
    pub fn total(&self) -> u64 {
        self.by_type.iter().sum()
    }

    pub fn get(&self, t: LocationType) -> u64 {
        self.by_type[t as usize]
    }
}

impl fmt::Display for Census {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.by_type.iter().enumerate().map(|(i, c)| format!("{}:{c}", i + 1)).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl Gadget {
    pub fn census(&self) -> Census {
        let mut c = Census { physical: self.locations.len(), ..Default::default() };
        for l in &self.locations {
            c.by_type[l.ltype as usize] += l.multiplicity;
        }
        c
    }

    /// Number of eigenvalue measurement rounds.
    pub fn eigen_rounds(&self) -> usize {
        self.checks
            .iter()
            .filter_map(|c| match c.consumer {
                Consumer::Eigenvalue { round } => Some(round + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn num_steps(&self) -> usize {
        self.locations.iter().map(|l| l.step).max().unwrap_or(0)
    }

    /// Processing order: per step, projections, measurements, then checks whose
    /// inputs are all read, then the snapshot, then every other location. Within a phase,
    /// locations are ordered by first qubit.
    pub fn schedule(&self) -> Vec<Event> {
        let steps = self.num_steps();
        let mut by_step: Vec<Vec<usize>> = vec![Vec::new(); steps + 1];
        for l in &self.locations {
            by_step[l.step].push(l.id);
        }
        let mut check_ready = vec![0usize; self.checks.len()];
        for (ci, c) in self.checks.iter().enumerate() {
            check_ready[ci] = c.inputs.iter().map(|&m| self.locations[m].step).max().unwrap_or(0);
        }
        let mut events =
            Vec::with_capacity(self.locations.len() + self.checks.len() + self.projections.len() + 1);
        for (step, ids) in by_step.iter_mut().enumerate() {
            ids.sort_by_key(|&id| (self.locations[id].qubits[0], id));
            events.extend((0..self.projections.len()).filter(|&i| self.projections[i].step() == step).map(Event::Project));
            events.extend(
                ids.iter().filter(|&&id| self.locations[id].op.is_measurement()).map(|&id| Event::Loc(id)),
            );
            events.extend((0..self.checks.len()).filter(|&ci| check_ready[ci] == step).map(Event::Check));
            if self.rec_boundary == Some(step) {
                events.push(Event::Snapshot);
            }
            events.extend(
                ids.iter().filter(|&&id| !self.locations[id].op.is_measurement()).map(|&id| Event::Loc(id)),
            );
        }
        events
    }

    /// Structural sanity: no qubit used twice in a step, arities, check inputs are
    /// measurements, and qubits are live exactly between preparation and measurement.
    pub fn validate(&self) -> Result<(), String> {
        let steps = self.num_steps();
        let mut busy = vec![vec![false; self.num_qubits]; steps + 1];
        for (i, l) in self.locations.iter().enumerate() {
            if l.id != i {
                return Err(format!("location {i} has id {}", l.id));
            }
            if l.qubits.len() != l.op.arity() {
                return Err(format!("location {i}: arity mismatch"));
            }
            for &q in &l.qubits {
                if q >= self.num_qubits || busy[l.step][q] {
                    return Err(format!("location {i}: qubit {q} clash at step {}", l.step));
                }
                busy[l.step][q] = true;
            }
        }
        for (ci, c) in self.checks.iter().enumerate() {
            if c.inputs.iter().any(|&m| !self.locations[m].op.is_measurement()) {
                return Err(format!("check {ci} reads a non-measurement"));
            }
        }
        let mut live = vec![false; self.num_qubits];
        for b in &self.input_blocks {
            for &q in &self.blocks[*b] {
                live[q] = true;
            }
        }
        for ev in self.schedule() {
            if let Event::Loc(id) = ev {
                let l = &self.locations[id];
                match l.op {
                    Operation::PrepZero | Operation::PrepPlus => {
                        if live[l.qubits[0]] {
                            return Err(format!("location {id}: prepares a live qubit"));
                        }
                        live[l.qubits[0]] = true;
                    }
                    _ => {
                        for &q in &l.qubits {
                            if !live[q] {
                                return Err(format!("location {id}: qubit {q} not live"));
                            }
                        }
                        if l.op.is_measurement() {
                            live[l.qubits[0]] = false;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Text netlist: a commented header with the census, then one line per
    /// location (`id step type op qubits multiplicity path`) and per check.
    pub fn netlist(&self) -> String {
        let census = self.census();
        let mut s = String::new();
        let _ = writeln!(s, "# gadget {}", self.name);
        let _ = writeln!(s, "# locations {}", census.total());
        let _ = writeln!(s, "# census {census}");
        let _ = writeln!(s, "# qubits {}", self.num_qubits);
        for (b, qs) in self.blocks.iter().enumerate() {
            let qs: Vec<String> = qs.iter().map(|q| q.to_string()).collect();
            let _ = writeln!(s, "# block {b} {}", qs.join(","));
        }
        for l in &self.locations {
            let qs: Vec<String> = l.qubits.iter().map(|q| q.to_string()).collect();
            let _ = writeln!(
                s,
                "{} {} {} {} {} {} {}",
                l.id,
                l.step,
                l.ltype.number(),
                l.op.mnemonic(),
                qs.join(","),
                l.multiplicity,
                l.path
            );
        }
        for (ci, c) in self.checks.iter().enumerate() {
            let ins: Vec<String> = c.inputs.iter().map(|q| q.to_string()).collect();
            let consumer = match c.consumer {
                Consumer::Record { block } => format!("record:{block}"),
                Consumer::Reject => "reject".to_string(),
                Consumer::Eigenvalue { round } => format!("eigenvalue:{round}"),
            };
            let _ = writeln!(s, "check {ci} {:?} {consumer} {}", c.kind, ins.join(","));
        }
        for (i, p) in self.projections.iter().enumerate() {
            let _ = match p {
                Projection::Eigen { step, block, round } => {
                    writeln!(s, "project {i} eigen step:{step} block:{block} round:{round}")
                }
                Projection::Cat { step, qubits } => {
                    let qs: Vec<String> = qubits.iter().map(|q| q.to_string()).collect();
                    writeln!(s, "project {i} cat step:{step} qubits:{}", qs.join(","))
                }
            };
        }
        s
    }
}
