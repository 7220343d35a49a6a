//! Oracle suite behind the `verify` command: structural counts, closed-form
//! arithmetic against reference values, exhaustive single-fault search, the
//! signed tail identity on random instances and the recursion properties.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::builders::{build_a_state_exrec, build_cat_prep, build_cnot_exrec, build_encoder, build_steane_ec, Basis, BuildOptions};
use crate::exec::Execution;
use crate::malignancy::Classifier;
use crate::pauli::StabilizerCode;
use crate::reference;
use crate::threshold::{self, ThresholdInputs};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), pass, detail: detail.into() }
    }

    pub fn line(&self) -> String {
        format!("{} {:<28} {}", if self.pass { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

fn opts(storage: bool) -> BuildOptions {
    BuildOptions { include_storage: storage, ..Default::default() }
}

pub fn census_checks() -> Vec<Check> {
    let got = [
        ("census.encoder", build_encoder(Basis::Zero, opts(true)).census().total()),
        ("census.ec", build_steane_ec(opts(true)).census().total()),
        ("census.cnot", build_cnot_exrec(opts(true)).census().total()),
        ("census.cnot.no-storage", build_cnot_exrec(opts(false)).census().total()),
        ("census.cat", build_cat_prep(opts(true)).census().total()),
        ("census.a-state", build_a_state_exrec(opts(true)).census().total()),
    ];
    got.iter()
        .map(|&(k, v)| {
            let c = reference::lookup(k).expect("reference key");
            Check::new(k, c.matches(v as f64), format!("{v} (expected {})", c.value))
        })
        .collect()
}

pub fn triple_checks() -> Vec<Check> {
    let got = [
        ("b.cnot", build_cnot_exrec(opts(true)).census().total()),
        ("b.cnot.no-storage", build_cnot_exrec(opts(false)).census().total()),
        ("b.a-state", build_a_state_exrec(opts(true)).census().total()),
    ];
    got.iter()
        .map(|&(k, l)| {
            let c = reference::lookup(k).expect("reference key");
            let b = threshold::triple_count(l);
            Check::new(k, b as f64 == c.value, format!("C({l},3) = {b}"))
        })
        .collect()
}

/// Runs the closed-form pipeline on the reference `A`, `B` and ancilla sizes.
pub fn pipeline_checks() -> Vec<Check> {
    let runs: [(&str, &str, f64, u32, bool); 5] = [
        ("cnot", "cnot", 50.0, 8, true),
        ("cnot.no-storage", "cnot.no-storage", 46.0, 8, true),
        ("cnot.depol", "cnot", 50.0, 8, true),
        ("cnot.depol.no-storage", "cnot.no-storage", 46.0, 8, true),
        ("a-state", "a-state", 521.0, 1, false),
    ];
    let mut out = Vec::new();
    for (stem, b_stem, c_anc, exp, has_eps0) in runs {
        let a = reference::lookup(&format!("a.{stem}")).expect("reference key").value;
        let b = reference::lookup(&format!("b.{b_stem}")).expect("reference key").value;
        let inp = ThresholdInputs { a, b, c_anc, acceptance_exponent: exp };
        let r = match threshold::threshold(&inp) {
            Ok(r) => r,
            Err(e) => {
                out.push(Check::new(format!("pipeline.{stem}"), false, e.to_string()));
                continue;
            }
        };
        let mut vals = vec![("a-prime", r.a_prime), ("a-double-prime", r.a_double_prime)];
        if has_eps0 {
            vals.push(("eps0", r.eps0));
        }
        for (k, v) in vals {
            let key = format!("{k}.{stem}");
            let c = reference::lookup(&key).expect("reference key");
            out.push(Check::new(key, c.matches(v), format!("{v:.6e} vs {:.6e}", c.value)));
        }
    }
    out
}

pub fn single_fault_checks(exec: Execution) -> Vec<Check> {
    let code = StabilizerCode::steane();
    let mut out = Vec::new();
    for (name, g) in [
        ("single-fault.cnot", build_cnot_exrec(opts(true))),
        ("single-fault.a-state", build_a_state_exrec(opts(true))),
    ] {
        let cl = Classifier::new(&g, &code);
        match cl.single_fault_counterexample(exec) {
            None => out.push(Check::new(name, true, format!("{} locations, no counterexample", g.locations.len()))),
            Some(w) => out.push(Check::new(name, false, format!("counterexample {:?}", w.faults))),
        }
    }
    out
}

/// Random bad-magnitude vectors of length at most 12, threshold index `s`.
pub fn inclusion_exclusion_check(instances: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut identity_bad, mut bound_bad) = (0, 0);
    for _ in 0..instances {
        let a = rng.gen_range(1..=12usize);
        let s = rng.gen_range(1..=a);
        let eta = rng.gen_range(1e-4..=1.0);
        let b: Vec<f64> = (0..a).map(|_| eta * rng.gen_range(0.0..=1.0)).collect();
        if !threshold::verify_inclusion_exclusion(&b, s) {
            identity_bad += 1;
        }
        let exact = threshold::brute_force_tail(&b, s);
        if exact > threshold::fault_path_tail(a as u64, s as u64, eta) * (1.0 + 1e-12) {
            bound_bad += 1;
        }
    }
    Check::new(
        "inclusion-exclusion",
        identity_bad == 0 && bound_bad == 0,
        format!("{instances} instances, {identity_bad} identity and {bound_bad} bound violations"),
    )
}

/// Fixed point, squaring step and minimality of the chosen level on a grid.
pub fn recursion_checks() -> Vec<Check> {
    let eps0 = 2.739e-5;
    let fixed = (0..8).all(|k| {
        let v = threshold::eps_level_k(eps0, eps0, k);
        (v - eps0).abs() <= 1e-15
    });
    let mut square = true;
    let mut minimal = true;
    for i in 1..20 {
        let eps = eps0 * i as f64 / 20.0;
        for k in 1..6 {
            let prev = threshold::eps_level_k(eps, eps0, k - 1);
            let cur = threshold::eps_level_k(eps, eps0, k);
            let want = prev * prev / eps0;
            if (cur - want).abs() > 1e-9 * want.max(f64::MIN_POSITIVE) {
                square = false;
            }
        }
        for &delta in &[1e-3, 1e-6, 1e-9] {
            if let Ok((d, k)) = threshold::minimal_level(1e6, delta, eps, eps0) {
                if d > delta || (k > 0 && threshold::accuracy_bound(1e6, eps, eps0, k - 1) <= delta) {
                    minimal = false;
                }
            }
        }
    }
    vec![
        Check::new("recursion.fixed-point", fixed, "eps_k(eps0) = eps0 for k < 8"),
        Check::new("recursion.squaring", square, "eps_k = eps_(k-1)^2 / eps0"),
        Check::new("recursion.minimal-level", minimal, "no smaller level meets the target"),
    ]
}

/// Every check; `exhaustive` adds the single-fault searches.
pub fn run_all(exhaustive: bool, exec: Execution) -> Vec<Check> {
    let mut v = census_checks();
    v.extend(triple_checks());
    v.extend(pipeline_checks());
    if exhaustive {
        v.extend(single_fault_checks(exec));
    }
    v.push(inclusion_exclusion_check(1000, 7));
    v.extend(recursion_checks());
    v
}
