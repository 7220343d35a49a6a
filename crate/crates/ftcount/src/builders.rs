//! Constructors for the Steane-code gadgets: encoders, Steane error correction,
//! verified cat states, the CNOT extended rectangle and the |A> preparation
//! extended rectangle.

use crate::circuit::{
    CheckKind, ClassicalCheck, Consumer, Gadget, Ideal, Location, LocationType, Operation, Projection,
};

/// Hamming parity-check rows over qubits 0..7.
pub const HAMMING_ROWS: [u64; 3] = [0b1111000, 0b1100110, 0b1010101];
/// Support of the weight-3 logical operators.
pub const LOGICAL_SUPPORT: u64 = 0b0000111;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Zero,
    Plus,
}

/// Which syndrome-extraction ancilla couples to the data first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EcOrder {
    /// |0> ancilla first (diagnoses Z errors), then |+> ancilla.
    #[default]
    ZeroFirst,
    PlusFirst,
}

/// CNOT rounds of the depth-four encoder as `(pivot, target)` qubit indices
/// (pivots 0, 1, 3). `delayed` is the target prepared one step late; it must not
/// appear in the first round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncoderSchedule {
    pub rounds: [[(usize, usize); 3]; 3],
    pub delayed: usize,
}

impl Default for EncoderSchedule {
    fn default() -> Self {
        EncoderSchedule { rounds: [[(0, 4), (1, 5), (3, 6)], [(0, 2), (1, 6), (3, 5)], [(0, 6), (1, 2), (3, 4)]], delayed: 2 }
    }
}

impl EncoderSchedule {
    /// Every schedule where each pivot meets its three targets once and no target
    /// is used twice in a round.
    pub fn all() -> Vec<EncoderSchedule> {
        let targets: [(usize, [usize; 3]); 3] = [(0, [2, 4, 6]), (1, [2, 5, 6]), (3, [4, 5, 6])];
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let mut out = Vec::new();
        for pa in perms {
            for pb in perms {
                for pc in perms {
                    let order = [pa, pb, pc];
                    let rounds: [[(usize, usize); 3]; 3] = std::array::from_fn(|r| {
                        std::array::from_fn(|k| (targets[k].0, targets[k].1[order[k][r]]))
                    });
                    let distinct = rounds.iter().all(|rd| rd[0].1 != rd[1].1 && rd[0].1 != rd[2].1 && rd[1].1 != rd[2].1);
                    if !distinct {
                        continue;
                    }
                    for delayed in [2, 4, 5] {
                        if rounds[0].iter().all(|&(_, t)| t != delayed) {
                            out.push(EncoderSchedule { rounds, delayed });
                        }
                    }
                }
            }
        }
        out
    }
}

/// Cat-state wiring as `(round, control, target)` CNOTs. The one cat qubit that
/// is never a target is prepared in |+> and fans out to the rest; target 7 is
/// the verifier, hit twice and measured one step after the last round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CatSchedule {
    pub cnots: [(usize, usize, usize); 8],
}

impl Default for CatSchedule {
    fn default() -> Self {
        CatSchedule { cnots: [(0, 0, 1), (1, 0, 2), (1, 1, 3), (2, 0, 4), (2, 3, 5), (3, 3, 7), (3, 4, 6), (4, 4, 7)] }
    }
}

impl CatSchedule {
    pub fn depth(&self) -> usize {
        self.cnots.iter().map(|c| c.0).max().unwrap_or(0) + 1
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BuildOptions {
    pub encoder: EncoderSchedule,
    pub cat: CatSchedule,
    pub include_storage: bool,
    /// Coupling order of the EC on data block 0 (and of every EC outside the CNOT rectangle).
    pub ec_order: EcOrder,
    /// Coupling order of the ECs on data block 1 of the CNOT rectangle.
    pub ec_order_target: EcOrder,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            encoder: EncoderSchedule::default(),
            cat: CatSchedule::default(),
            include_storage: true,
            ec_order: EcOrder::ZeroFirst,
            ec_order_target: EcOrder::PlusFirst,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum EcUse {
    Record(usize),
    RejectNontrivial,
}

struct Builder {
    opts: BuildOptions,
    locations: Vec<Location>,
    checks: Vec<ClassicalCheck>,
    num_qubits: usize,
    blocks: Vec<[usize; 7]>,
    leading: Option<usize>,
}

impl Builder {
    fn new(opts: BuildOptions) -> Self {
        Builder { opts, locations: Vec::new(), checks: Vec::new(), num_qubits: 0, blocks: Vec::new(), leading: None }
    }

    fn block(&mut self) -> [usize; 7] {
        let base = self.num_qubits;
        self.num_qubits += 7;
        std::array::from_fn(|i| base + i)
    }

    fn qubit(&mut self) -> usize {
        self.num_qubits += 1;
        self.num_qubits - 1
    }

    fn data_block(&mut self) -> usize {
        let b = self.block();
        self.blocks.push(b);
        self.blocks.len() - 1
    }

    fn push(&mut self, op: Operation, step: usize, qubits: Vec<usize>, path: &str) -> usize {
        let ltype = match op {
            Operation::PrepZero => LocationType::PrepZero,
            Operation::PrepPlus => LocationType::PrepPlus,
            Operation::MeasX => LocationType::MeasX,
            Operation::MeasZ => LocationType::MeasZ,
            Operation::Cnot => LocationType::Cnot,
            Operation::T | Operation::TDagger => LocationType::T,
            Operation::Rest => LocationType::RestGate,
        };
        self.push_typed(op, ltype, step, qubits, path)
    }

    fn push_typed(
        &mut self,
        op: Operation,
        ltype: LocationType,
        step: usize,
        qubits: Vec<usize>,
        path: &str,
    ) -> usize {
        let id = self.locations.len();
        self.locations.push(Location {
            id,
            op,
            ltype,
            step,
            qubits,
            path: path.to_string(),
            multiplicity: 1,
            leading_block: self.leading,
        });
        id
    }

    fn rest(&mut self, ltype: LocationType, step: usize, q: usize, path: &str) {
        if self.opts.include_storage {
            self.push_typed(Operation::Rest, ltype, step, vec![q], path);
        }
    }

    fn prep(&mut self, basis: Basis, step: usize, q: usize, path: &str) {
        let op = if basis == Basis::Zero { Operation::PrepZero } else { Operation::PrepPlus };
        self.push(op, step, vec![q], path);
    }

    fn transversal_cnot(&mut self, step: usize, c: &[usize; 7], t: &[usize; 7], path: &str) {
        for i in 0..7 {
            self.push(Operation::Cnot, step, vec![c[i], t[i]], path);
        }
    }

    fn measure(&mut self, op: Operation, step: usize, qs: &[usize], path: &str) -> Vec<usize> {
        qs.iter().map(|&q| self.push(op, step, vec![q], path)).collect()
    }

    /// Depth-four encoder occupying `step..step+4`. Pivots 1, 2, 4 fan out to the
    /// other qubits; one target is prepared a step late so nothing idles at first.
    fn encoder(&mut self, basis: Basis, q: &[usize; 7], step: usize, path: &str) {
        let (pivot, other) = match basis {
            Basis::Zero => (Basis::Plus, Basis::Zero),
            Basis::Plus => (Basis::Zero, Basis::Plus),
        };
        let sched = self.opts.encoder;
        for i in [0, 1, 3] {
            self.prep(pivot, step, q[i], path);
        }
        for i in [2, 4, 5, 6] {
            let s = if i == sched.delayed { step + 1 } else { step };
            self.prep(other, s, q[i], path);
        }
        for (r, pairs) in sched.rounds.iter().enumerate() {
            let s = step + 1 + r;
            for &(p, t) in pairs {
                let (c, tg) = if basis == Basis::Zero { (q[p], q[t]) } else { (q[t], q[p]) };
                self.push(Operation::Cnot, s, vec![c, tg], path);
            }
            for i in [2, 4, 5, 6] {
                let used = pairs.iter().any(|&(_, t)| t == i);
                if !used && !(r == 0 && i == sched.delayed) {
                    self.rest(LocationType::RestGate, s, q[i], path);
                }
            }
        }
    }

    fn verify_check(&mut self, inputs: Vec<usize>) {
        let mut rows = HAMMING_ROWS.to_vec();
        rows.push(LOGICAL_SUPPORT);
        self.checks.push(ClassicalCheck { kind: CheckKind::VerifyReject, inputs, rows, consumer: Consumer::Reject });
    }

    /// Encodes and verifies one ancilla: `step..step+6`, ready at `step + 6`.
    fn verified_ancilla(&mut self, basis: Basis, step: usize, path: &str) -> [usize; 7] {
        let anc = self.block();
        let ver = self.block();
        let (pa, pv) = (format!("{path}/encoder"), format!("{path}/verifier"));
        self.encoder(basis, &anc, step, &pa);
        self.encoder(basis, &ver, step, &pv);
        let meas = match basis {
            Basis::Zero => {
                self.transversal_cnot(step + 4, &anc, &ver, &pv);
                Operation::MeasZ
            }
            Basis::Plus => {
                self.transversal_cnot(step + 4, &ver, &anc, &pv);
                Operation::MeasX
            }
        };
        let outs = self.measure(meas, step + 5, &ver, &pv);
        for q in anc {
            self.rest(LocationType::RestMeasure, step + 5, q, path);
        }
        self.verify_check(outs);
        anc
    }

    /// Steane error correction on `data`; the first data coupling happens at
    /// `step + 6` and the last readout at `step + 8`.
    fn steane_ec(&mut self, data: &[usize; 7], step: usize, path: &str, usage: EcUse) {
        self.steane_ec_ordered(data, step, path, usage, self.opts.ec_order)
    }

    fn steane_ec_ordered(&mut self, data: &[usize; 7], step: usize, path: &str, usage: EcUse, order: EcOrder) {
        let (first, second) = match order {
            EcOrder::ZeroFirst => (Basis::Zero, Basis::Plus),
            EcOrder::PlusFirst => (Basis::Plus, Basis::Zero),
        };
        for (k, basis) in [first, second].into_iter().enumerate() {
            let s = step + k;
            let name = if basis == Basis::Zero { "anc0" } else { "anc+" };
            let anc = self.verified_ancilla(basis, s, &format!("{path}/{name}"));
            let cp = format!("{path}/{name}/couple");
            let (meas, kind) = match basis {
                Basis::Zero => {
                    self.transversal_cnot(s + 6, &anc, data, &cp);
                    (Operation::MeasX, CheckKind::XSyndromeExtract)
                }
                Basis::Plus => {
                    self.transversal_cnot(s + 6, data, &anc, &cp);
                    (Operation::MeasZ, CheckKind::ZSyndromeExtract)
                }
            };
            let outs = self.measure(meas, s + 7, &anc, &cp);
            let consumer = match usage {
                EcUse::Record(block) => Consumer::Record { block },
                EcUse::RejectNontrivial => Consumer::Reject,
            };
            self.checks.push(ClassicalCheck { kind, inputs: outs, rows: HAMMING_ROWS.to_vec(), consumer });
        }
    }

    /// Verified seven-qubit cat state occupying `step..step+7`; the verifier is
    /// read at `step + 6` while the cat rests. Returns the cat qubits.
    /// Verified cat state whose verifier is measured at `meas_step`.
    fn cat(&mut self, meas_step: usize, path: &str) -> [usize; 7] {
        let sched = self.opts.cat;
        let rounds = sched.depth();
        let step = meas_step - rounds - 1;
        let c = self.block();
        let v = self.qubit();
        let pv = format!("{path}/verifier");
        let qubit = |i: usize| if i == 7 { v } else { c[i] };
        let first = |i: usize| sched.cnots.iter().filter(|&&(_, a, t)| a == i || t == i).map(|&(r, ..)| r).min().unwrap();
        let last = |i: usize| sched.cnots.iter().filter(|&&(_, a, t)| a == i || t == i).map(|&(r, ..)| r).max().unwrap();
        // Every qubit is prepared one step before its first gate.
        let root = (0..7).find(|&i| sched.cnots.iter().all(|c| c.2 != i)).expect("cat schedule has a root");
        for i in 0..8 {
            let (basis, p) = match i {
                7 => (Basis::Zero, pv.as_str()),
                _ if i == root => (Basis::Plus, path),
                _ => (Basis::Zero, path),
            };
            self.prep(basis, step + first(i), qubit(i), p);
        }
        for r in 0..rounds {
            let s = step + 1 + r;
            let mut busy = [false; 8];
            for &(_, a, t) in sched.cnots.iter().filter(|&&(rr, ..)| rr == r) {
                let p = if t == 7 { &pv } else { path };
                self.push(Operation::Cnot, s, vec![qubit(a), qubit(t)], p);
                busy[a] = true;
                busy[t] = true;
            }
            for (i, &b) in busy.iter().enumerate() {
                let live = first(i) < r && (i < 7 || r < last(i));
                if live && !b {
                    self.rest(LocationType::RestGate, s, qubit(i), if i == 7 { &pv } else { path });
                }
            }
        }
        let out = self.measure(Operation::MeasZ, meas_step, &[v], &pv);
        for q in c {
            self.rest(LocationType::RestMeasure, meas_step, q, path);
        }
        self.checks.push(ClassicalCheck {
            kind: CheckKind::VerifyReject,
            inputs: out,
            rows: vec![1],
            consumer: Consumer::Reject,
        });
        c
    }

    fn finish(self, name: &str, inputs: Vec<usize>, outputs: Vec<usize>, boundary: Option<usize>, ideal: Ideal) -> Gadget {
        let g = Gadget {
            name: name.to_string(),
            num_qubits: self.num_qubits,
            locations: self.locations,
            checks: self.checks,
            blocks: self.blocks,
            input_blocks: inputs,
            output_blocks: outputs,
            rec_boundary: boundary,
            projections: Vec::new(),
            ideal,
        };
        debug_assert_eq!(g.validate(), Ok(()));
        g
    }
}

/// Standalone encoder of |0> or |+> into the code.
pub fn build_encoder(basis: Basis, opts: BuildOptions) -> Gadget {
    let mut b = Builder::new(opts);
    let blk = b.data_block();
    let q = b.blocks[blk];
    b.encoder(basis, &q, 1, "encoder");
    b.finish("encoder", vec![], vec![blk], None, Ideal::None)
}

/// Standalone Steane error correction on one data block.
pub fn build_steane_ec(opts: BuildOptions) -> Gadget {
    let mut b = Builder::new(opts);
    let blk = b.data_block();
    let q = b.blocks[blk];
    b.steane_ec(&q, 1, "ec", EcUse::Record(blk));
    b.finish("steane-ec", vec![blk], vec![blk], None, Ideal::Identity)
}

/// Standalone verified cat state.
pub fn build_cat_prep(opts: BuildOptions) -> Gadget {
    let mut b = Builder::new(opts);
    b.cat(opts.cat.depth() + 2, "cat");
    b.finish("cat", vec![], vec![], None, Ideal::None)
}

/// Leading EC on both blocks, transversal CNOT (block 0 controls block 1),
/// trailing EC on both blocks.
pub fn build_cnot_exrec(opts: BuildOptions) -> Gadget {
    let mut b = Builder::new(opts);
    let b0 = b.data_block();
    let b1 = b.data_block();
    let (d0, d1) = (b.blocks[b0], b.blocks[b1]);
    for (blk, d) in [(b0, d0), (b1, d1)] {
        b.leading = Some(blk);
        let order = if blk == b0 { opts.ec_order } else { opts.ec_order_target };
        b.steane_ec_ordered(&d, 1, &format!("lead-ec[{blk}]"), EcUse::Record(blk), order);
    }
    b.leading = None;
    b.transversal_cnot(9, &d0, &d1, "cnot");
    for (blk, d) in [(b0, d0), (b1, d1)] {
        let order = if blk == b0 { opts.ec_order } else { opts.ec_order_target };
        b.steane_ec_ordered(&d, 4, &format!("trail-ec[{blk}]"), EcUse::Record(blk), order);
    }
    b.finish("cnot-exrec", vec![b0, b1], vec![b0, b1], Some(9), Ideal::Cnot { control: b0, target: b1 })
}

/// Unverified |0> encoding, then two rounds of cat-controlled measurement of the
/// T-conjugated X eigenvalue, each followed by EC that rejects any nontrivial
/// syndrome. T and T-dagger locations count four times each.
pub fn build_a_state_exrec(opts: BuildOptions) -> Gadget {
    let mut b = Builder::new(opts);
    let blk = b.data_block();
    let d = b.blocks[blk];
    b.encoder(Basis::Zero, &d, 3, "encoder");
    let mut projections = Vec::new();
    for (round, (gate_step, ec_step)) in [(7, 4), (12, 9)].into_iter().enumerate() {
        let cat_meas = gate_step;
        let path = format!("round[{round}]");
        let cat = b.cat(cat_meas, &format!("{path}/cat"));
        projections.push(Projection::Eigen { step: gate_step, block: blk, round });
        projections.push(Projection::Cat { step: gate_step + 1, qubits: cat });
        let gp = format!("{path}/controlled");
        for &q in &d {
            let id = b.push(Operation::T, gate_step, vec![q], &gp);
            b.locations[id].multiplicity = 4;
        }
        b.transversal_cnot(gate_step + 1, &cat, &d, &gp);
        for &q in &d {
            let id = b.push(Operation::TDagger, gate_step + 2, vec![q], &gp);
            b.locations[id].multiplicity = 4;
        }
        let outs = b.measure(Operation::MeasX, gate_step + 2, &cat, &format!("{path}/cat"));
        b.checks.push(ClassicalCheck {
            kind: CheckKind::EigenvalueParity,
            inputs: outs,
            rows: vec![0b1111111],
            consumer: Consumer::Eigenvalue { round },
        });
        b.steane_ec(&d, ec_step, &format!("{path}/ec"), EcUse::RejectNontrivial);
    }
    for &q in &d {
        b.rest(LocationType::RestMeasure, 17, q, "final");
    }
    let mut g = b.finish("a-state-exrec", vec![], vec![blk], None, Ideal::AState);
    g.projections = projections;
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encoder_census() {
        for basis in [Basis::Zero, Basis::Plus] {
            let g = build_encoder(basis, BuildOptions::default());
            let c = g.census();
            assert_eq!(c.total(), 18);
            assert_eq!(c.get(LocationType::Cnot), 9);
            assert_eq!(c.get(LocationType::RestGate), 2);
            assert_eq!(g.num_steps(), 4);
        }
    }

    #[test]
    fn cat_census() {
        let g = build_cat_prep(BuildOptions::default());
        g.validate().unwrap();
        let c = g.census();
        assert_eq!(c.total(), 36);
        assert_eq!(c.get(LocationType::RestGate), 12);
        assert_eq!(c.get(LocationType::RestMeasure), 7);
        assert_eq!(c.get(LocationType::Cnot), 8);
    }
}

#[cfg(test)]
mod exrec_census {
    use super::*;

    #[test]
    fn exrec_totals() {
        let ec = build_steane_ec(BuildOptions::default()).census();
        assert_eq!(ec.total(), 142);
        let cnot = build_cnot_exrec(BuildOptions::default());
        cnot.validate().unwrap();
        assert_eq!(cnot.census().total(), 575);
        let bare = BuildOptions { include_storage: false, ..Default::default() };
        assert_eq!(build_cnot_exrec(bare).census().total(), 487);
        let a = build_a_state_exrec(BuildOptions::default());
        a.validate().unwrap();
        assert_eq!(a.census().total(), 521);
        assert_eq!(a.census().get(LocationType::T), 112);
    }
}
