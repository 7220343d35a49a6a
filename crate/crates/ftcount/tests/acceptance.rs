//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
//! Built without the libtest harness so the lines are always shown.

use std::time::Instant;

use ftcount::builders::{build_a_state_exrec, build_cnot_exrec, BuildOptions};
use ftcount::circuit::Gadget;
use ftcount::exec::Execution;
use ftcount::malignancy::{count_matrix, monte_carlo, Classifier, NoiseMode, Sweep};
use ftcount::pauli::StabilizerCode;
use ftcount::reference::{self, ALPHA, ALPHA_DEPOL, BETA, COUNT_TOL};
use ftcount::threshold;
use ftcount::verify::{self, Check};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, Box<dyn Fn() -> Outcome>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn all_pass(checks: &[Check]) -> Outcome {
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    Outcome {
        pass: failed.is_empty(),
        detail: if failed.is_empty() { format!("{} checks", checks.len()) } else { format!("failed: {}", failed.join(", ")) },
    }
}

fn opts(storage: bool) -> BuildOptions {
    BuildOptions { include_storage: storage, ..Default::default() }
}

/// Entries of a computed matrix that differ from the reference, rounded to one decimal.
fn deviations(m: &[[f64; 8]; 8], r: &[[f64; 7]; 7]) -> Vec<String> {
    let mut out = Vec::new();
    for a in 0..7 {
        for b in 0..=a {
            if (m[a][b] * 10.0).round() != (r[a][b] * 10.0).round() {
                out.push(format!("{}{}:{:+}", a + 1, b + 1, ((m[a][b] - r[a][b]) * 10.0).round() / 10.0));
            }
        }
    }
    out
}

fn count_check(name: &str, g: &Gadget, mode: NoiseMode, r: &[[f64; 7]; 7], key: &str) -> (bool, String) {
    let code = StabilizerCode::steane();
    let cl = Classifier::new(g, &code);
    let rep = count_matrix(&cl, mode, Sweep::Reduced, Execution::Parallel);
    let c = reference::lookup(key).expect("reference key");
    let dev = deviations(&rep.matrix, r);
    let extra: f64 = rep.matrix[7].iter().sum();
    let ok = (rep.total - c.value).abs() <= COUNT_TOL * c.value && extra == 0.0;
    let dev = if dev.is_empty() { "all entries exact".to_string() } else { format!("entry deviations {}", dev.join(" ")) };
    (ok, format!("{name} A = {:.2} (ref {}), {dev}", rep.total, c.value))
}

/// Reduced and full sweeps agree on a random 1% of pairs.
fn pruning_sample(g: &Gadget, seed: u64) -> (bool, usize) {
    let code = StabilizerCode::steane();
    let cl = Classifier::new(g, &code);
    let n = g.locations.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = n * (n - 1) / 200;
    let mut bad = 0;
    for _ in 0..samples {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            continue;
        }
        let r = cl.classify_pair(i, j, NoiseMode::Adversarial, Sweep::Reduced);
        let f = cl.classify_pair(i, j, NoiseMode::Adversarial, Sweep::Full);
        bad += (r.malignant != f.malignant) as usize;
    }
    (bad == 0, samples)
}

fn criterion_4() -> Outcome {
    let cnot = build_cnot_exrec(opts(true));
    let a_state = build_a_state_exrec(opts(true));
    let runs = [
        count_check("alpha", &cnot, NoiseMode::Adversarial, &ALPHA, "a.cnot"),
        count_check("beta", &a_state, NoiseMode::Adversarial, &BETA, "a.a-state"),
        count_check("alpha_depol", &cnot, NoiseMode::Depolarizing, &ALPHA_DEPOL, "a.cnot.depol"),
    ];
    let (prune_ok, samples) = pruning_sample(&cnot, 11);
    let pass = runs.iter().all(|r| r.0) && prune_ok;
    let mut detail: Vec<String> = runs.into_iter().map(|r| r.1).collect();
    detail.push(format!("reduced/full agree on {samples} sampled pairs: {prune_ok}"));
    Outcome { pass, detail: detail.join("; ") }
}

fn criterion_6() -> Outcome {
    let g = build_cnot_exrec(opts(true));
    let code = StabilizerCode::steane();
    let cl = Classifier::new(&g, &code);
    let eps = 1e-3;
    let r = monte_carlo(&cl, [eps; 8], 1_000_000, 2024, Execution::Parallel);
    let quad: f64 = ALPHA.iter().flatten().sum::<f64>() * eps * eps;
    let bound = quad + threshold::triple_count(g.census().total()) as f64 * eps.powi(3);
    Outcome {
        pass: r.rate <= bound + 3.0 * r.sigma,
        detail: format!("rate {:.3e} +- {:.1e} over {} shots, bound {bound:.3e}", r.rate, r.sigma, r.shots),
    }
}

fn main() {
    // Respect libtest-style filtering flags passed by `cargo test` without acting on them.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let criteria: Vec<Criterion> = vec![
        ("1 census", Box::new(|| all_pass(&verify::census_checks()))),
        ("2 triple counts", Box::new(|| all_pass(&verify::triple_checks()))),
        ("3 closed-form pipeline", Box::new(|| all_pass(&verify::pipeline_checks()))),
        ("4 counted matrices", Box::new(criterion_4)),
        ("5 single faults", Box::new(|| all_pass(&verify::single_fault_checks(Execution::Parallel)))),
        ("6 monte carlo", Box::new(criterion_6)),
        ("7 inclusion-exclusion", Box::new(|| all_pass(&[verify::inclusion_exclusion_check(1000, 7)]))),
        ("8 recursion properties", Box::new(|| all_pass(&verify::recursion_checks()))),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let t = Instant::now();
        let o = run();
        failed += !o.pass as usize;
        println!("{} criterion {name} ({:.2}s): {}", if o.pass { "PASS" } else { "FAIL" }, t.elapsed().as_secs_f64(), o.detail);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
