//! Compiled evaluator for bulk sweeps.
//!
//! Every gadget here is Clifford apart from the T rule, so the effect of a Pauli
//! inserted anywhere is a GF(2)-linear map onto a short "signature": the parity
//! outputs of every classical check, a reduced summary of each data block at the
//! rectangle input, and a summary of each output block. A scenario is the XOR of
//! its faults' signatures; decoding, corrections and acceptance are then replayed
//! check by check on that vector. Corrections are themselves inserted Paulis, so
//! their signatures are precomputed too.
//!
//! A T gate adds an optional Z wherever an X passes through it. The X frame at
//! each T location is linear in the faults, so each signature also carries a mask
//! of T locations its X part reaches; the free Z bits range over the span of the
//! corresponding companion signatures.
//!
//! Projections read the raw X part of a block into the signature; resolving one
//! XORs in the precomputed effect of replacing that X part by its canonical form.

use crate::circuit::{Consumer, Event, Gadget, Ideal, Operation};
use crate::pauli::{Pauli1, PauliOp, StabilizerCode};
use crate::propagate::{canonical_x, eigenvalues_agree, fault_alphabet, ideal_cnot, sector_correction};

pub type Sig = u128;
const SIG_BITS: usize = 128;
const SUMMARY_BITS: usize = 8;

/// Signature and T-reach mask of one inserted Pauli.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Effect {
    pub sig: Sig,
    pub tmask: u32,
}

impl std::ops::BitXor for Effect {
    type Output = Effect;
    fn bitxor(self, o: Effect) -> Effect {
        Effect { sig: self.sig ^ o.sig, tmask: self.tmask ^ o.tmask }
    }
}

impl std::ops::BitXorAssign for Effect {
    fn bitxor_assign(&mut self, o: Effect) {
        self.sig ^= o.sig;
        self.tmask ^= o.tmask;
    }
}

#[derive(Debug, Clone)]
pub struct FaultEntry {
    pub paulis: [Pauli1; 2],
    pub effect: Effect,
    pub weight: f64,
}

#[derive(Debug, Clone)]
enum Action {
    Record(Box<[Sig; 8]>),
    Reject,
    Eigen(usize),
}

#[derive(Debug, Clone)]
struct CompiledCheck {
    off: u32,
    mask: u64,
    action: Action,
}

/// Decoded summary of one block: residual syndrome and logical flips.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Reduced {
    pub syndrome: u8,
    pub lx: bool,
    pub lz: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub accepted: bool,
    pub reference: Vec<Reduced>,
    pub outputs: Vec<Reduced>,
    pub eigen: u8,
}

#[derive(Debug, Clone)]
struct CompiledProjection {
    off: u32,
    /// Indexed by the raw X part: canonicalizing effect and the eigenvalue rounds it frees.
    table: Box<[(Effect, u8); 128]>,
}

#[derive(Debug, Clone)]
pub struct Compiled {
    ideal: Ideal,
    output_blocks: Vec<usize>,
    n_blocks: usize,
    checks: Vec<CompiledCheck>,
    projections: Vec<CompiledProjection>,
    n_rounds: usize,
    ref_off: Option<u32>,
    out_off: u32,
    reduce: Vec<Reduced>,
    /// Per location, per qubit slot: X and Z insertions.
    loc_basis: Vec<[[Effect; 2]; 2]>,
    /// Per block, per qubit: X and Z inserted at gadget start.
    input_basis: Vec<[[Effect; 2]; 7]>,
    /// Per block, per qubit: X and Z inserted just after the rectangle-input capture.
    snapshot_basis: Vec<[[Sig; 2]; 7]>,
    /// T locations in mask-bit order.
    pub t_locs: Vec<usize>,
    companions: Vec<Sig>,
    pub alphabets: Vec<Vec<FaultEntry>>,
    pub has_snapshot: bool,
}

struct Lin<'a> {
    g: &'a Gadget,
    events: Vec<Event>,
    check_off: Vec<u32>,
    proj_off: Vec<u32>,
    ref_off: Option<u32>,
    ref_pos: Option<usize>,
    out_off: u32,
    t_index: Vec<Option<u32>>,
    code: &'a StabilizerCode,
}

fn summary(code: &StabilizerCode, p: &PauliOp) -> u64 {
    let s = code.syndrome(p).unwrap().bits();
    let lx = !p.commutes(code.logical_z()).unwrap() as u64;
    let lz = !p.commutes(code.logical_x()).unwrap() as u64;
    s | lx << 6 | lz << 7
}

impl Lin<'_> {
    fn block_summary(&self, x: &[bool], z: &[bool], qs: &[usize; 7]) -> u64 {
        let (mut bx, mut bz) = (0u64, 0u64);
        for (i, &q) in qs.iter().enumerate() {
            bx |= (x[q] as u64) << i;
            bz |= (z[q] as u64) << i;
        }
        summary(self.code, &PauliOp::from_xz(7, bx, bz).unwrap())
    }

    /// Propagates the Paulis in `init` from event `start` onwards with no
    /// corrections and no T companions.
    fn propagate(&self, start: usize, init: &[(usize, Pauli1)]) -> Effect {
        let g = self.g;
        let mut x = vec![false; g.num_qubits];
        let mut z = vec![false; g.num_qubits];
        for &(q, p) in init {
            x[q] ^= p.has_x();
            z[q] ^= p.has_z();
        }
        let mut flips = vec![false; g.locations.len()];
        let mut e = Effect::default();
        let put = |e: &mut Effect, off: u32, bits: u64| e.sig |= (bits as Sig) << off;
        if self.ref_pos == Some(0) && start == 0 {
            for (b, qs) in g.blocks.iter().enumerate() {
                let s = self.block_summary(&x, &z, qs);
                put(&mut e, self.ref_off.unwrap() + (SUMMARY_BITS * b) as u32, s);
            }
        }
        for (pos, ev) in self.events.iter().enumerate().skip(start) {
            match *ev {
                Event::Loc(id) => {
                    let l = &g.locations[id];
                    let q = l.qubits[0];
                    match l.op {
                        Operation::PrepZero | Operation::PrepPlus => {
                            x[q] = false;
                            z[q] = false;
                        }
                        Operation::MeasZ | Operation::MeasX => {
                            flips[id] = if l.op == Operation::MeasZ { x[q] } else { z[q] };
                            x[q] = false;
                            z[q] = false;
                        }
                        Operation::Cnot => {
                            let t = l.qubits[1];
                            x[t] ^= x[q];
                            z[q] ^= z[t];
                        }
                        Operation::T | Operation::TDagger => {
                            if x[q] {
                                e.tmask |= 1 << self.t_index[id].unwrap();
                            }
                        }
                        Operation::Rest => {}
                    }
                }
                Event::Check(ci) => {
                    let bits = g.checks[ci].evaluate(|m| flips[m]);
                    put(&mut e, self.check_off[ci], bits);
                }
                Event::Project(i) => {
                    let mut bx = 0u64;
                    for (k, &q) in g.projections[i].qubits(g).iter().enumerate() {
                        bx |= (x[q] as u64) << k;
                    }
                    put(&mut e, self.proj_off[i], bx);
                }
                Event::Snapshot => {
                    debug_assert_eq!(Some(pos), self.ref_pos);
                    for (b, qs) in g.blocks.iter().enumerate() {
                        let s = self.block_summary(&x, &z, qs);
                        put(&mut e, self.ref_off.unwrap() + (SUMMARY_BITS * b) as u32, s);
                    }
                }
            }
        }
        for (i, &b) in g.output_blocks.iter().enumerate() {
            let s = self.block_summary(&x, &z, &g.blocks[b]);
            put(&mut e, self.out_off + (SUMMARY_BITS * i) as u32, s);
        }
        e
    }
}

impl Compiled {
    pub fn new(g: &Gadget, code: &StabilizerCode) -> Self {
        let events = g.schedule();
        let mut off = 0u32;
        let mut check_off = vec![0u32; g.checks.len()];
        for ev in &events {
            if let Event::Check(ci) = *ev {
                check_off[ci] = off;
                off += g.checks[ci].rows.len() as u32;
            }
        }
        let proj_off: Vec<u32> = (0..g.projections.len())
            .map(|_| {
                off += 7;
                off - 7
            })
            .collect();
        let snap_event = events.iter().position(|e| *e == Event::Snapshot);
        let ref_pos = match snap_event {
            Some(p) => Some(p),
            None if !g.input_blocks.is_empty() => Some(0),
            None => None,
        };
        let ref_off = ref_pos.map(|_| {
            let o = off;
            off += (SUMMARY_BITS * g.blocks.len()) as u32;
            o
        });
        let out_off = off;
        off += (SUMMARY_BITS * g.output_blocks.len()) as u32;
        assert!(off as usize <= SIG_BITS, "signature needs {off} bits");

        let t_locs: Vec<usize> = g
            .locations
            .iter()
            .filter(|l| matches!(l.op, Operation::T | Operation::TDagger))
            .map(|l| l.id)
            .collect();
        assert!(t_locs.len() <= 32, "at most 32 T locations supported");
        assert!(
            t_locs.is_empty() || !g.checks.iter().any(|c| matches!(c.consumer, Consumer::Record { .. })),
            "T gates together with recorded corrections are not supported by the compiled engine"
        );
        let mut t_index = vec![None; g.locations.len()];
        for (i, &id) in t_locs.iter().enumerate() {
            t_index[id] = Some(i as u32);
        }
        let lin = Lin { g, events, check_off, proj_off, ref_off, ref_pos, out_off, t_index, code };
        let mut event_of_loc = vec![0usize; g.locations.len()];
        for (pos, ev) in lin.events.iter().enumerate() {
            if let Event::Loc(id) = *ev {
                event_of_loc[id] = pos;
            }
        }

        let mut loc_basis = Vec::with_capacity(g.locations.len());
        for l in &g.locations {
            // Measurement faults act before readout, everything else after the operation.
            let start = if l.op.is_measurement() { event_of_loc[l.id] } else { event_of_loc[l.id] + 1 };
            let mut slots = [[Effect::default(); 2]; 2];
            for (k, &q) in l.qubits.iter().enumerate() {
                slots[k][0] = lin.propagate(start, &[(q, Pauli1::X)]);
                slots[k][1] = lin.propagate(start, &[(q, Pauli1::Z)]);
            }
            loc_basis.push(slots);
        }
        let mut input_basis = vec![[[Effect::default(); 2]; 7]; g.blocks.len()];
        for &b in &g.input_blocks {
            for (i, &q) in g.blocks[b].iter().enumerate() {
                input_basis[b][i] = [lin.propagate(0, &[(q, Pauli1::X)]), lin.propagate(0, &[(q, Pauli1::Z)])];
            }
        }
        let mut snapshot_basis = vec![[[0 as Sig; 2]; 7]; g.blocks.len()];
        if let Some(p) = snap_event {
            for (b, qs) in g.blocks.iter().enumerate() {
                for (i, &q) in qs.iter().enumerate() {
                    snapshot_basis[b][i] =
                        [lin.propagate(p + 1, &[(q, Pauli1::X)]).sig, lin.propagate(p + 1, &[(q, Pauli1::Z)]).sig];
                }
            }
        }
        let companions = t_locs.iter().map(|&id| lin.propagate(event_of_loc[id] + 1, &[(g.locations[id].qubits[0], Pauli1::Z)]).sig).collect();

        let mut checks = Vec::new();
        let mut n_rounds = 0;
        for (pos, ev) in lin.events.iter().enumerate() {
            let Event::Check(ci) = *ev else { continue };
            let c = &g.checks[ci];
            let action = match c.consumer {
                Consumer::Record { block } => {
                    let mut table = Box::new([0 as Sig; 8]);
                    for (s, slot) in table.iter_mut().enumerate() {
                        let corr = sector_correction(code, c.kind, s as u64);
                        let init: Vec<(usize, Pauli1)> =
                            g.blocks[block].iter().enumerate().map(|(i, &q)| (q, corr.get(i))).collect();
                        *slot = lin.propagate(pos + 1, &init).sig;
                    }
                    Action::Record(table)
                }
                Consumer::Reject => Action::Reject,
                Consumer::Eigenvalue { round } => {
                    n_rounds = n_rounds.max(round + 1);
                    Action::Eigen(round)
                }
            };
            checks.push(CompiledCheck { off: lin.check_off[ci], mask: (1u64 << c.rows.len()) - 1, action });
        }

        let mut projections = Vec::new();
        for (pos, ev) in lin.events.iter().enumerate() {
            let Event::Project(i) = *ev else { continue };
            let p = &g.projections[i];
            let single: Vec<Effect> = p.qubits(g).iter().map(|&q| lin.propagate(pos + 1, &[(q, Pauli1::X)])).collect();
            let table = Box::new(std::array::from_fn(|raw| {
                let (canon, round) = canonical_x(code, p, raw as u64);
                let delta = raw as u64 ^ canon;
                let e = (0..7).filter(|k| delta >> k & 1 == 1).fold(Effect::default(), |a, k| a ^ single[k]);
                (e, round.filter(|&r| r > 0 && r < g.eigen_rounds()).map_or(0, |r| 1u8 << r))
            }));
            projections.push(CompiledProjection { off: lin.proj_off[i], table });
        }

        let reduce = (0..256u64)
            .map(|s| {
                let syn = (s & 63) as u8;
                let r = code.decode_table()[syn as usize];
                let rs = summary(code, &r);
                Reduced { syndrome: syn, lx: (s >> 6 & 1) != (rs >> 6 & 1), lz: (s >> 7 & 1) != (rs >> 7 & 1) }
            })
            .collect();

        let mut c = Compiled {
            ideal: g.ideal,
            output_blocks: g.output_blocks.clone(),
            n_blocks: g.blocks.len(),
            checks,
            projections,
            n_rounds,
            ref_off,
            out_off,
            reduce,
            loc_basis,
            input_basis,
            snapshot_basis,
            t_locs,
            companions,
            alphabets: Vec::new(),
            has_snapshot: snap_event.is_some(),
        };
        c.alphabets = g
            .locations
            .iter()
            .map(|l| {
                fault_alphabet(l)
                    .into_iter()
                    .map(|(ps, w)| {
                        let mut paulis = [Pauli1::I; 2];
                        paulis[..ps.len()].copy_from_slice(&ps);
                        FaultEntry { paulis, effect: c.fault_effect(l.id, &ps), weight: w }
                    })
                    .collect()
            })
            .collect();
        c
    }

    pub fn fault_effect(&self, loc: usize, paulis: &[Pauli1]) -> Effect {
        let mut e = Effect::default();
        for (k, p) in paulis.iter().enumerate() {
            if p.has_x() {
                e ^= self.loc_basis[loc][k][0];
            }
            if p.has_z() {
                e ^= self.loc_basis[loc][k][1];
            }
        }
        e
    }

    pub fn input_effect(&self, block: usize, p: &PauliOp) -> Effect {
        let mut e = Effect::default();
        for i in 0..7 {
            if p.x() >> i & 1 == 1 {
                e ^= self.input_basis[block][i][0];
            }
            if p.z() >> i & 1 == 1 {
                e ^= self.input_basis[block][i][1];
            }
        }
        e
    }

    /// Signature of a Pauli placed on `block` right after the rectangle input is captured.
    pub fn snapshot_sig(&self, block: usize, p: &PauliOp) -> Sig {
        let mut s = 0;
        for i in 0..7 {
            if p.x() >> i & 1 == 1 {
                s ^= self.snapshot_basis[block][i][0];
            }
            if p.z() >> i & 1 == 1 {
                s ^= self.snapshot_basis[block][i][1];
            }
        }
        s
    }

    pub fn num_blocks(&self) -> usize {
        self.n_blocks
    }

    fn summary_at(&self, v: Sig, off: u32) -> Reduced {
        self.reduce[(v >> off) as usize & 0xff]
    }

    /// Resolves every projection in time order. Returns the adjusted effect and
    /// the mask of eigenvalue rounds left free. Companions never touch the X
    /// parts read here, so this may run before the T bits are chosen.
    pub fn project(&self, mut e: Effect) -> (Effect, u8) {
        let mut free = 0u8;
        for p in &self.projections {
            let (d, f) = p.table[(e.sig >> p.off) as usize & 0x7f];
            e ^= d;
            free |= f;
        }
        (e, free)
    }

    /// Replays checks on `v`; returns `None` as soon as anything rejects.
    #[inline]
    fn settle(&self, mut v: Sig, free: u8) -> Option<(Sig, u8)> {
        let mut eig = 0u8;
        for c in &self.checks {
            let bits = (v >> c.off) as u64 & c.mask;
            match &c.action {
                Action::Record(t) => v ^= t[bits as usize],
                Action::Reject => {
                    if bits != 0 {
                        return None;
                    }
                }
                Action::Eigen(r) => eig |= (bits as u8) << r,
            }
        }
        if self.n_rounds > 1 {
            let bits: Vec<bool> = (0..self.n_rounds).map(|r| eig >> r & 1 == 1).collect();
            let fr: Vec<bool> = (0..self.n_rounds).map(|r| free >> r & 1 == 1).collect();
            if !eigenvalues_agree(&bits, &fr) {
                return None;
            }
        }
        Some((v, eig))
    }

    fn reference(&self, v: Sig, b: usize) -> Reduced {
        match self.ref_off {
            Some(o) => self.summary_at(v, o + (SUMMARY_BITS * b) as u32),
            None => Reduced::default(),
        }
    }

    fn output(&self, v: Sig, i: usize) -> Reduced {
        self.summary_at(v, self.out_off + (SUMMARY_BITS * i) as u32)
    }

    fn correct(&self, v: Sig, eig: u8) -> bool {
        let out_pos = |b: usize| self.output_blocks.iter().position(|&o| o == b).unwrap();
        let fl = |r: Reduced| (r.lx, r.lz);
        match self.ideal {
            Ideal::None => true,
            Ideal::Identity => {
                self.output_blocks.iter().enumerate().all(|(i, &b)| fl(self.output(v, i)) == fl(self.reference(v, b)))
            }
            Ideal::Cnot { control, target } => {
                let (c, t) = ideal_cnot(fl(self.reference(v, control)), fl(self.reference(v, target)));
                fl(self.output(v, out_pos(control))) == c && fl(self.output(v, out_pos(target))) == t
            }
            Ideal::AState => {
                let o = self.output(v, 0);
                let last = self.n_rounds.saturating_sub(1);
                !o.lx && o.lz == (eig >> last & 1 == 1)
            }
        }
    }

    /// Accepted and incorrect, for a signature that needs no projection.
    #[inline]
    pub fn fails(&self, v: Sig) -> bool {
        self.fails_free(v, 0)
    }

    /// Accepted and incorrect for a projected signature with the given free rounds.
    #[inline]
    pub fn fails_free(&self, v: Sig, free: u8) -> bool {
        match self.settle(v, free) {
            Some((v, eig)) => !self.correct(v, eig),
            None => false,
        }
    }

    /// Full outcome of a projected signature.
    pub fn outcome(&self, v: Sig, free: u8) -> Outcome {
        let (accepted, v, eigen) = match self.settle(v, free) {
            Some((w, e)) => (true, w, e),
            None => (false, v, 0),
        };
        Outcome {
            accepted,
            reference: (0..self.n_blocks).map(|b| self.reference(v, b)).collect(),
            outputs: (0..self.output_blocks.len()).map(|i| self.output(v, i)).collect(),
            eigen,
        }
    }

    /// Residual syndrome at the rectangle input of `block` if accepted.
    #[inline]
    pub fn accepted_snapshot(&self, v: Sig, block: usize) -> Option<u8> {
        self.settle(v, 0).map(|(w, _)| self.reference(w, block).syndrome)
    }

    /// Searches the T-bit choices reachable under `e.tmask` for an accepted
    /// failure; returns the T bits (bit `i` is `t_locs[i]`).
    pub fn find_failure(&self, e: Effect) -> Option<u32> {
        let (e, free) = self.project(e);
        if e.tmask == 0 {
            return self.fails_free(e.sig, free).then_some(0);
        }
        // Row-reduce the reachable companions, remembering which T bits make each row.
        let mut basis: Vec<(Sig, u32)> = Vec::new();
        let mut m = e.tmask;
        while m != 0 {
            let i = m.trailing_zeros();
            m &= m - 1;
            let (mut s, mut w) = (self.companions[i as usize], 1u32 << i);
            for &(b, bw) in &basis {
                if s ^ b < s {
                    s ^= b;
                    w ^= bw;
                }
            }
            if s != 0 {
                basis.push((s, w));
                basis.sort_by_key(|e| std::cmp::Reverse(e.0));
            }
        }
        let (mut v, mut bits) = (e.sig, 0u32);
        if self.fails_free(v, free) {
            return Some(0);
        }
        for k in 1u64..(1u64 << basis.len()) {
            let (s, w) = basis[k.trailing_zeros() as usize];
            v ^= s;
            bits ^= w;
            if self.fails_free(v, free) {
                return Some(bits);
            }
        }
        None
    }

    /// Signature of the Z companions selected by `bits`.
    pub fn companion_sum(&self, mut bits: u32) -> Sig {
        let mut s = 0;
        while bits != 0 {
            s ^= self.companions[bits.trailing_zeros() as usize];
            bits &= bits - 1;
        }
        s
    }

    pub fn fails_any_t(&self, e: Effect) -> bool {
        self.find_failure(e).is_some()
    }
}
