//! Exhaustive classification of location pairs, the per-type count matrices and
//! a Monte Carlo estimate of the accepted-failure rate.
//!
//! A pair is malignant when some choice of Paulis at the two locations, some
//! admissible input error and some choice of T bits yields an accepted run whose
//! output disagrees with the ideal gadget. Admissible input errors are the 64
//! decoder residuals per block (at most one X and one Z).
//!
//! For rectangles with leading error correction the sweep is factored by stage.
//! The input to the rectangle body only matters through the reduced residual each
//! leading EC hands over, and a fault-free leading EC hands over no residual at
//! all. So we tabulate, per leading fault, which residuals it can leave behind
//! (over all inputs), and per body fault, which residuals it turns into a failure.

use serde::{Deserialize, Serialize};

use crate::circuit::{Gadget, LocationType};
use crate::engine::{Compiled, Effect, Sig};
use crate::exec::{map_indices, Execution};
use crate::pauli::{PauliOp, StabilizerCode};
use crate::propagate::{Fault, FaultScenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum NoiseMode {
    /// Count a pair if any Pauli choice fails.
    Adversarial,
    /// Weight each Pauli choice by its depolarizing probability share.
    Depolarizing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Sweep {
    /// Input errors only on blocks whose leading EC holds one of the faults.
    Reduced,
    /// Every admissible input error on every input block.
    Full,
}

/// A failing configuration: alphabet indices, input residual indices, T bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub faults: Vec<(usize, usize)>,
    pub inputs: Vec<(usize, u8)>,
    pub t_bits: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairVerdict {
    pub malignant: bool,
    /// 1 or 0 in adversarial mode; summed Pauli weight of failing choices in depolarizing mode.
    pub weight: f64,
    pub witness: Option<Witness>,
}

struct LeadTables {
    /// Per leading location, per alphabet entry: accepted residuals at the rectangle input.
    reach: Vec<Vec<u64>>,
    /// Per leading location, per alphabet entry, per residual: an input residual producing it.
    reach_input: Vec<Vec<[u8; 64]>>,
    /// Per body location, per block, per alphabet entry: residuals that fail together with it.
    body_fail: Vec<[Vec<u64>; 2]>,
    /// `pair_fail[r0]`: residuals on block 1 that fail with `r0` on block 0 in a fault-free body.
    pair_fail: [u64; 64],
}

pub struct Classifier<'a> {
    g: &'a Gadget,
    code: &'a StabilizerCode,
    pub compiled: Compiled,
    residual_ops: Vec<PauliOp>,
    input_effects: Vec<Vec<Effect>>,
    lead: Option<LeadTables>,
}

const NONE: u8 = u8::MAX;

impl<'a> Classifier<'a> {
    pub fn new(g: &'a Gadget, code: &'a StabilizerCode) -> Self {
        let compiled = Compiled::new(g, code);
        let residual_ops = code.decode_table().to_vec();
        let input_effects = (0..g.blocks.len())
            .map(|b| {
                if g.input_blocks.contains(&b) {
                    residual_ops.iter().map(|p| compiled.input_effect(b, p)).collect()
                } else {
                    vec![Effect::default()]
                }
            })
            .collect();
        let mut c = Classifier { g, code, compiled, residual_ops, input_effects, lead: None };
        if c.compiled.has_snapshot && c.compiled.t_locs.is_empty() && g.blocks.len() == 2 {
            c.lead = Some(c.lead_tables());
        }
        c
    }

    pub fn gadget(&self) -> &Gadget {
        self.g
    }

    fn lead_tables(&self) -> LeadTables {
        let g = self.g;
        let c = &self.compiled;
        let n = g.locations.len();
        let mut reach = vec![Vec::new(); n];
        let mut reach_input = vec![Vec::new(); n];
        let mut body_fail = vec![[Vec::new(), Vec::new()]; n];
        for l in &g.locations {
            let alpha = &c.alphabets[l.id];
            match l.leading_block {
                Some(b) => {
                    for entry in alpha {
                        let (mut mask, mut wit) = (0u64, [NONE; 64]);
                        for (e_idx, ie) in self.input_effects[b].iter().enumerate() {
                            if let Some(r) = c.accepted_snapshot(entry.effect.sig ^ ie.sig, b) {
                                if mask >> r & 1 == 0 {
                                    mask |= 1 << r;
                                    wit[r as usize] = e_idx as u8;
                                }
                            }
                        }
                        reach[l.id].push(mask);
                        reach_input[l.id].push(wit);
                    }
                }
                None => {
                    for (b, slot) in body_fail[l.id].iter_mut().enumerate() {
                        *slot = alpha
                            .iter()
                            .map(|entry| {
                                (0..64).fold(0u64, |m, r| {
                                    let v = c.snapshot_sig(b, &self.residual_ops[r]) ^ entry.effect.sig;
                                    m | (c.fails(v) as u64) << r
                                })
                            })
                            .collect();
                    }
                }
            }
        }
        let mut pair_fail = [0u64; 64];
        for (r0, row) in pair_fail.iter_mut().enumerate() {
            let s0 = c.snapshot_sig(0, &self.residual_ops[r0]);
            for r1 in 0..64 {
                if c.fails(s0 ^ c.snapshot_sig(1, &self.residual_ops[r1])) {
                    *row |= 1 << r1;
                }
            }
        }
        LeadTables { reach, reach_input, body_fail, pair_fail }
    }

    fn input_blocks_for(&self, locs: &[usize], sweep: Sweep) -> Vec<usize> {
        match sweep {
            Sweep::Full => self.g.input_blocks.clone(),
            Sweep::Reduced if self.compiled.has_snapshot => {
                let mut v: Vec<usize> =
                    locs.iter().filter_map(|&l| self.g.locations[l].leading_block).collect();
                v.sort_unstable();
                v.dedup();
                v
            }
            Sweep::Reduced => self.g.input_blocks.clone(),
        }
    }

    /// Classifies by direct enumeration of Paulis, inputs on the relevant blocks and T bits.
    pub fn classify_direct(&self, i: usize, j: usize, mode: NoiseMode, sweep: Sweep) -> PairVerdict {
        let c = &self.compiled;
        let blocks = self.input_blocks_for(&[i, j], sweep);
        let mut weight = 0.0;
        let mut witness = None;
        for (ai, ei) in c.alphabets[i].iter().enumerate() {
            for (aj, ej) in c.alphabets[j].iter().enumerate() {
                let base = ei.effect ^ ej.effect;
                let found = self.search_inputs(base, &blocks, 0, &mut Vec::new());
                if let Some((inputs, t_bits)) = found {
                    if witness.is_none() {
                        witness = Some(Witness { faults: vec![(i, ai), (j, aj)], inputs, t_bits });
                    }
                    if mode == NoiseMode::Adversarial {
                        return PairVerdict { malignant: true, weight: 1.0, witness };
                    }
                    weight += ei.weight * ej.weight;
                }
            }
        }
        PairVerdict { malignant: witness.is_some(), weight, witness }
    }

    fn search_inputs(
        &self,
        e: Effect,
        blocks: &[usize],
        k: usize,
        chosen: &mut Vec<(usize, u8)>,
    ) -> Option<(Vec<(usize, u8)>, u32)> {
        if k == blocks.len() {
            return self.compiled.find_failure(e).map(|t| (chosen.clone(), t));
        }
        let b = blocks[k];
        for (r, ie) in self.input_effects[b].iter().enumerate() {
            chosen.push((b, r as u8));
            if let Some(w) = self.search_inputs(e ^ *ie, blocks, k + 1, chosen) {
                return Some(w);
            }
            chosen.pop();
        }
        None
    }

    /// Classifies one pair, using the stage tables when available.
    pub fn classify_pair(&self, i: usize, j: usize, mode: NoiseMode, sweep: Sweep) -> PairVerdict {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        assert_ne!(i, j, "a pair needs two distinct locations");
        let Some(t) = &self.lead else { return self.classify_direct(i, j, mode, sweep) };
        if sweep == Sweep::Full {
            return self.classify_direct(i, j, mode, sweep);
        }
        let c = &self.compiled;
        let (li, lj) = (self.g.locations[i].leading_block, self.g.locations[j].leading_block);
        match (li, lj) {
            (None, None) => self.classify_direct(i, j, mode, sweep),
            (Some(a), Some(b)) if a == b => self.classify_direct(i, j, mode, sweep),
            (Some(_), Some(_)) => {
                // Block 0's leading location first.
                let (p, q) = if li == Some(0) { (i, j) } else { (j, i) };
                let mut weight = 0.0;
                let mut witness = None;
                for (ap, ep) in c.alphabets[p].iter().enumerate() {
                    for (aq, eq) in c.alphabets[q].iter().enumerate() {
                        let (rp, rq) = (t.reach[p][ap], t.reach[q][aq]);
                        let hit = (0..64).find(|&r0| rp >> r0 & 1 == 1 && t.pair_fail[r0] & rq != 0);
                        if let Some(r0) = hit {
                            if witness.is_none() {
                                let r1 = (t.pair_fail[r0] & rq).trailing_zeros() as usize;
                                witness = Some(Witness {
                                    faults: vec![(p, ap), (q, aq)],
                                    inputs: vec![(0, t.reach_input[p][ap][r0]), (1, t.reach_input[q][aq][r1])],
                                    t_bits: 0,
                                });
                            }
                            if mode == NoiseMode::Adversarial {
                                return PairVerdict { malignant: true, weight: 1.0, witness };
                            }
                            weight += ep.weight * eq.weight;
                        }
                    }
                }
                PairVerdict { malignant: witness.is_some(), weight, witness }
            }
            _ => {
                let (p, q) = if li.is_some() { (i, j) } else { (j, i) };
                let b = self.g.locations[p].leading_block.unwrap();
                let mut weight = 0.0;
                let mut witness = None;
                for (ap, ep) in c.alphabets[p].iter().enumerate() {
                    for (aq, eq) in c.alphabets[q].iter().enumerate() {
                        let hit = t.reach[p][ap] & t.body_fail[q][b][aq];
                        if hit != 0 {
                            if witness.is_none() {
                                let r = hit.trailing_zeros() as usize;
                                witness = Some(Witness {
                                    faults: vec![(p, ap), (q, aq)],
                                    inputs: vec![(b, t.reach_input[p][ap][r])],
                                    t_bits: 0,
                                });
                            }
                            if mode == NoiseMode::Adversarial {
                                return PairVerdict { malignant: true, weight: 1.0, witness };
                            }
                            weight += ep.weight * eq.weight;
                        }
                    }
                }
                PairVerdict { malignant: witness.is_some(), weight, witness }
            }
        }
    }

    /// Turns a witness into a replayable scenario.
    pub fn scenario(&self, w: &Witness) -> FaultScenario {
        let c = &self.compiled;
        let faults = w
            .faults
            .iter()
            .map(|&(loc, a)| {
                let k = self.g.locations[loc].qubits.len();
                Fault { loc, paulis: c.alphabets[loc][a].paulis[..k].to_vec() }
            })
            .collect();
        let inputs = w
            .inputs
            .iter()
            .filter(|(_, r)| *r != 0)
            .map(|&(b, r)| (b, self.residual_ops[r as usize]))
            .collect();
        let t_bits = (0..c.t_locs.len()).filter(|i| w.t_bits >> i & 1 == 1).map(|i| (c.t_locs[i], true)).collect();
        FaultScenario { faults, inputs, t_bits }
    }

    /// Accepted failure with a single fault and any admissible input, searched
    /// over every location and Pauli. Returns the first counterexample.
    pub fn single_fault_counterexample(&self, exec: Execution) -> Option<Witness> {
        let c = &self.compiled;
        let blocks = self.g.input_blocks.clone();
        let found = map_indices(self.g.locations.len(), exec, |l| {
            c.alphabets[l].iter().enumerate().find_map(|(a, e)| {
                self.search_inputs(e.effect, &blocks, 0, &mut Vec::new())
                    .map(|(inputs, t_bits)| Witness { faults: vec![(l, a)], inputs, t_bits })
            })
        });
        found.into_iter().flatten().next()
    }

    pub fn code(&self) -> &StabilizerCode {
        self.code
    }
}

/// Signature of a list of faults given as `(location, alphabet index)`.
pub fn effect_of(c: &Compiled, faults: &[(usize, usize)]) -> Effect {
    faults.iter().fold(Effect::default(), |e, &(l, a)| e ^ c.alphabets[l][a].effect)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MalignantPair {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MalignancyReport {
    pub gadget: String,
    pub mode: NoiseMode,
    pub sweep: Sweep,
    /// Lower-triangular per-type matrix; `matrix[a][b]` with `a >= b`, index 0 is type 1.
    pub matrix: [[f64; 8]; 8],
    pub total: f64,
    pub pairs_examined: u64,
    pub malignant_pairs: u64,
    /// Every malignant pair, in lexicographic order, with its weight before multiplicity.
    pub pairs: Vec<MalignantPair>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct FractionStats {
    pub cnot_involving: f64,
    pub cnot_cnot: f64,
    pub storage_involving: f64,
}

impl MalignancyReport {
    pub fn entry(&self, a: LocationType, b: LocationType) -> f64 {
        let (x, y) = if a >= b { (a as usize, b as usize) } else { (b as usize, a as usize) };
        self.matrix[x][y]
    }

    pub fn fraction_stats(&self) -> FractionStats {
        let (mut cnot, mut storage) = (0.0, 0.0);
        for a in 0..8 {
            for b in 0..=a {
                let v = self.matrix[a][b];
                if a == LocationType::Cnot as usize || b == LocationType::Cnot as usize {
                    cnot += v;
                }
                if LocationType::ALL[a].is_storage() || LocationType::ALL[b].is_storage() {
                    storage += v;
                }
            }
        }
        let cc = self.matrix[LocationType::Cnot as usize][LocationType::Cnot as usize];
        let t = if self.total > 0.0 { self.total } else { 1.0 };
        FractionStats { cnot_involving: cnot / t, cnot_cnot: cc / t, storage_involving: storage / t }
    }
}

/// Classifies every unordered pair and accumulates the per-type matrix,
/// weighting each pair by the product of the locations' multiplicities.
pub fn count_matrix(cl: &Classifier, mode: NoiseMode, sweep: Sweep, exec: Execution) -> MalignancyReport {
    let g = cl.gadget();
    let n = g.locations.len();
    let rows = map_indices(n, exec, |i| {
        let mut out = Vec::new();
        for j in i + 1..n {
            let v = cl.classify_pair(i, j, mode, sweep);
            if v.malignant {
                out.push(MalignantPair { i, j, weight: v.weight });
            }
        }
        out
    });
    let mut matrix = [[0.0; 8]; 8];
    let mut pairs = Vec::new();
    for row in rows {
        for p in row {
            let (li, lj) = (&g.locations[p.i], &g.locations[p.j]);
            let (a, b) = (li.ltype as usize, lj.ltype as usize);
            let (a, b) = if a >= b { (a, b) } else { (b, a) };
            matrix[a][b] += p.weight * (li.multiplicity * lj.multiplicity) as f64;
            pairs.push(p);
        }
    }
    let total = matrix.iter().flatten().sum();
    MalignancyReport {
        gadget: g.name.clone(),
        mode,
        sweep,
        matrix,
        total,
        pairs_examined: (n * (n - 1) / 2) as u64,
        malignant_pairs: pairs.len() as u64,
        pairs,
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct MonteCarloResult {
    pub shots: u64,
    pub accepted: u64,
    pub failures: u64,
    /// Failures per shot (accepted and incorrect).
    pub rate: f64,
    pub sigma: f64,
}

/// Samples independent faults at per-type rates (index 0 is type 1) with a
/// nontrivial Pauli drawn by its depolarizing weight, clean inputs and uniformly
/// random T bits.
/// Shots are split into fixed chunks with their own seeds, so the result does not
/// depend on the thread count.
pub fn monte_carlo(cl: &Classifier, eps: [f64; 8], shots: u64, seed: u64, exec: Execution) -> MonteCarloResult {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const CHUNK: u64 = 1 << 16;
    let g = cl.gadget();
    let c = &cl.compiled;
    // Group locations by fault rate so a geometric skip can jump between faults.
    let mut groups: Vec<(f64, Vec<usize>)> = Vec::new();
    for l in &g.locations {
        let p = 1.0 - (1.0 - eps[l.ltype as usize]).powi(l.multiplicity as i32);
        if p <= 0.0 {
            continue;
        }
        match groups.iter_mut().find(|(q, _)| *q == p) {
            Some((_, v)) => v.push(l.id),
            None => groups.push((p, vec![l.id])),
        }
    }
    let n_chunks = shots.div_ceil(CHUNK) as usize;
    let parts = map_indices(n_chunks, exec, |k| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let todo = CHUNK.min(shots - k as u64 * CHUNK);
        let (mut acc, mut fail) = (0u64, 0u64);
        for _ in 0..todo {
            let mut sig: Sig = 0;
            let mut tmask = 0u32;
            for (p, locs) in &groups {
                let ln1p = (1.0 - p).ln();
                let mut idx = 0usize;
                loop {
                    let u: f64 = rng.gen::<f64>();
                    let skip = ((1.0 - u).ln() / ln1p).floor();
                    if !skip.is_finite() || skip >= (locs.len() - idx) as f64 {
                        break;
                    }
                    idx += skip as usize;
                    let alpha = &c.alphabets[locs[idx]];
                    let mut u: f64 = rng.gen();
                    let pick = alpha.iter().position(|f| {
                        u -= f.weight;
                        u < 0.0
                    });
                    let e = alpha[pick.unwrap_or(alpha.len() - 1)].effect;
                    sig ^= e.sig;
                    tmask ^= e.tmask;
                    idx += 1;
                    if idx >= locs.len() {
                        break;
                    }
                }
            }
            let (e, free) = c.project(Effect { sig, tmask });
            // Resolve T companions only where X actually passes.
            let t_choice = if e.tmask != 0 { rng.gen::<u32>() & e.tmask } else { 0 };
            let v = e.sig ^ c.companion_sum(t_choice);
            let o = c.outcome(v, free);
            if o.accepted {
                acc += 1;
                if c.fails_free(v, free) {
                    fail += 1;
                }
            }
        }
        (acc, fail)
    });
    let (accepted, failures) = parts.iter().fold((0, 0), |(a, f), &(x, y)| (a + x, f + y));
    let rate = failures as f64 / shots as f64;
    MonteCarloResult { shots, accepted, failures, rate, sigma: (rate * (1.0 - rate) / shots as f64).sqrt() }
}
