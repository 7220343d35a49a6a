//! Run configuration, the structured count document, CSV matrices and the
//! comparison against reference values.

use std::io;

use serde::{Deserialize, Serialize};

use crate::builders::{build_a_state_exrec, build_cnot_exrec, build_encoder, Basis, BuildOptions};
use crate::circuit::{Census, Gadget, LocationType};
use crate::malignancy::{FractionStats, MalignancyReport, MalignantPair, NoiseMode, Sweep};
use crate::reference::{self, Constant};
use crate::threshold::{self, ThresholdError, ThresholdInputs, ThresholdResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExRecKind {
    Cnot,
    AState,
}

impl ExRecKind {
    pub fn build(self, storage: bool) -> Gadget {
        let opts = BuildOptions { include_storage: storage, ..Default::default() };
        match self {
            ExRecKind::Cnot => build_cnot_exrec(opts),
            ExRecKind::AState => build_a_state_exrec(opts),
        }
    }

    /// Key stem used in the reference table, e.g. `cnot.depol.no-storage`.
    pub fn key(self, noise: NoiseMode, storage: bool) -> String {
        let mut k = match self {
            ExRecKind::Cnot => "cnot".to_string(),
            ExRecKind::AState => "a-state".to_string(),
        };
        if noise == NoiseMode::Depolarizing {
            k.push_str(".depol");
        }
        if !storage {
            k.push_str(".no-storage");
        }
        k
    }
}

/// Locations in one verified ancilla: two encoders, the verifying CNOT and the verifier readout.
pub fn ancilla_locations(storage: bool) -> u64 {
    let opts = BuildOptions { include_storage: storage, ..Default::default() };
    let enc = build_encoder(Basis::Zero, opts).census().total();
    2 * enc + 7 + 7
}

/// Acceptance adjustment for an extended rectangle: the CNOT one conditions on
/// eight independent ancillas, the |A> one on its whole circuit at once.
pub fn threshold_inputs(kind: ExRecKind, storage: bool, a: f64, census: &Census) -> ThresholdInputs {
    let b = threshold::triple_count(census.total()) as f64;
    match kind {
        ExRecKind::Cnot => ThresholdInputs { a, b, c_anc: ancilla_locations(storage) as f64, acceptance_exponent: 8 },
        ExRecKind::AState => ThresholdInputs { a, b, c_anc: census.total() as f64, acceptance_exponent: 1 },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub exrec: ExRecKind,
    pub noise: NoiseMode,
    pub storage: bool,
    pub sweep: Sweep,
    /// Per-type fault rates, index 0 is type 1.
    pub eps: Option<[f64; 8]>,
    pub shots: Option<u64>,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CountDocument {
    pub schema_version: u32,
    pub config: RunConfig,
    pub gadget: String,
    pub census: Census,
    pub matrix: [[f64; 8]; 8],
    pub a: f64,
    pub b: u64,
    pub pairs_examined: u64,
    pub malignant_pairs: u64,
    pub fractions: FractionStats,
    pub threshold_inputs: ThresholdInputs,
    pub threshold: Option<ThresholdResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<MalignantPair>>,
}

impl CountDocument {
    pub fn new(config: RunConfig, census: Census, rep: &MalignancyReport, keep_pairs: bool) -> Self {
        let inputs = threshold_inputs(config.exrec, config.storage, rep.total, &census);
        CountDocument {
            schema_version: SCHEMA_VERSION,
            gadget: rep.gadget.clone(),
            census,
            matrix: rep.matrix,
            a: rep.total,
            b: inputs.b as u64,
            pairs_examined: rep.pairs_examined,
            malignant_pairs: rep.malignant_pairs,
            fractions: rep.fraction_stats(),
            threshold: threshold::threshold(&inputs).ok(),
            threshold_inputs: inputs,
            pairs: keep_pairs.then(|| rep.pairs.clone()),
            config,
        }
    }
}

/// Lower-triangular matrix as CSV with a header row and a leading type column.
pub fn write_matrix_csv<W: io::Write>(w: W, matrix: &[[f64; 8]; 8]) -> Result<(), csv::Error> {
    let mut wr = csv::Writer::from_writer(w);
    let mut header = vec!["type".to_string()];
    header.extend(LocationType::ALL.iter().map(|t| t.label().to_string()));
    wr.write_record(&header)?;
    for (a, t) in LocationType::ALL.iter().enumerate() {
        let mut row = vec![t.label().to_string()];
        row.extend((0..8).map(|b| if b <= a { format!("{}", matrix[a][b]) } else { String::new() }));
        wr.write_record(&row)?;
    }
    wr.flush()?;
    Ok(())
}

/// Human-readable matrix; fractional entries are shown to one decimal.
pub fn format_matrix(matrix: &[[f64; 8]; 8], rows: usize) -> String {
    let integral = matrix.iter().flatten().all(|v| v.fract() == 0.0);
    let mut s = String::new();
    for (a, row) in matrix.iter().enumerate().take(rows) {
        let cells: Vec<String> = row[..=a]
            .iter()
            .map(|v| if integral { format!("{v:>8.0}") } else { format!("{v:>8.1}") })
            .collect();
        s.push_str(&format!("{:>2} {}\n", a + 1, cells.join("")));
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub key: String,
    pub computed: f64,
    pub reference: f64,
    pub rel_tol: f64,
    pub pass: bool,
}

impl Comparison {
    pub fn new(c: &Constant, computed: f64) -> Self {
        Comparison { key: c.key.to_string(), computed, reference: c.value, rel_tol: c.rel_tol, pass: c.matches(computed) }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {:<40} computed {:<14} reference {:<14} tol {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.key,
            fmt_num(self.computed),
            fmt_num(self.reference),
            self.rel_tol
        )
    }
}

fn fmt_num(v: f64) -> String {
    if v != 0.0 && v.abs() < 1e-2 {
        format!("{v:.4e}")
    } else if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

/// Compares every reference value whose key belongs to this run.
pub fn compare(stem: &str, a: f64, b: f64, t: Option<&ThresholdResult>) -> Vec<Comparison> {
    let mut out = Vec::new();
    let mut push = |key: String, v: f64| {
        if let Some(c) = reference::lookup(&key) {
            out.push(Comparison::new(c, v));
        }
    };
    push(format!("a.{stem}"), a);
    let b_stem = stem.replace(".depol", "");
    push(format!("b.{b_stem}"), b);
    if let Some(t) = t {
        push(format!("a-prime.{stem}"), t.a_prime);
        push(format!("a-double-prime.{stem}"), t.a_double_prime);
        push(format!("eps0.{stem}"), t.eps0);
    }
    out
}

/// Threshold of an explicit `(A, B)` pair under the adjustment for `kind`.
pub fn threshold_for(kind: ExRecKind, storage: bool, a: f64, census: &Census) -> Result<(ThresholdInputs, ThresholdResult), ThresholdError> {
    let inputs = threshold_inputs(kind, storage, a, census);
    Ok((inputs, threshold::threshold(&inputs)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ancilla_sizes() {
        assert_eq!(ancilla_locations(true), 50);
        assert_eq!(ancilla_locations(false), 46);
    }

    #[test]
    fn csv_shape() {
        let mut m = [[0.0; 8]; 8];
        m[6][6] = 3.5;
        let mut buf = Vec::new();
        write_matrix_csv(&mut buf, &m).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 9);
        assert!(lines[0].starts_with("type,rest-gate"));
        assert_eq!(lines[7], "cnot,0,0,0,0,0,0,3.5,");
    }
}
