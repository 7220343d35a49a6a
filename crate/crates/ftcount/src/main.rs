use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ftcount::builders::{build_a_state_exrec, build_cat_prep, build_cnot_exrec, build_encoder, build_steane_ec, Basis, BuildOptions};
use ftcount::circuit::Gadget;
use ftcount::exec::Execution;
use ftcount::malignancy::{count_matrix, monte_carlo, Classifier, MalignancyReport, NoiseMode, Sweep};
use ftcount::pauli::StabilizerCode;
use ftcount::report::{self, CountDocument, ExRecKind, RunConfig};
use ftcount::{reference, threshold, verify};

#[derive(Parser)]
#[command(name = "ftcount", version, about = "Malignant-pair counting and threshold estimates for Steane-code extended rectangles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Workers {
    /// Worker threads for the sweep (0 = all cores). Never changes exact counts.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Run on the calling thread only.
    #[arg(long)]
    sequential: bool,
}

impl Workers {
    fn exec(self) -> Execution {
        match (self.sequential, self.workers) {
            (true, _) => Execution::Sequential,
            (false, 0) => Execution::Parallel,
            (false, k) => Execution::ParallelWith(k),
        }
    }

    fn recorded(self) -> Option<usize> {
        if self.sequential {
            Some(1)
        } else {
            (self.workers > 0).then_some(self.workers)
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write netlists of the built gadgets.
    Gadgets {
        /// Only this extended rectangle (default: every gadget).
        #[arg(long, value_enum)]
        exrec: Option<ExRecKind>,
        #[arg(long)]
        no_storage: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify every location pair and report the count matrix.
    Count {
        #[arg(long, value_enum)]
        exrec: ExRecKind,
        #[arg(long, value_enum, default_value = "adversarial")]
        noise: NoiseMode,
        #[arg(long)]
        no_storage: bool,
        #[arg(long, value_enum, default_value = "reduced")]
        sweep: Sweep,
        #[command(flatten)]
        workers: Workers,
        /// Write the structured report here.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Write the matrix as CSV here.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Include every malignant pair in the report.
        #[arg(long)]
        pairs: bool,
    },
    /// Threshold from a count report or from an explicit pair count.
    Threshold {
        /// Count report written by `count --json`.
        #[arg(long, conflicts_with_all = ["exrec", "a"])]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "cnot")]
        exrec: ExRecKind,
        #[arg(long, value_enum, default_value = "adversarial")]
        noise: NoiseMode,
        #[arg(long)]
        no_storage: bool,
        /// Malignant-pair count (default: the published one for this configuration).
        #[arg(long)]
        a: Option<f64>,
        /// Operating noise rate for the level and accuracy estimate.
        #[arg(long)]
        eps: Option<f64>,
        /// Circuit size for the accuracy estimate.
        #[arg(long, default_value_t = 1e6)]
        circuit_size: f64,
        /// Target accuracy for the level estimate.
        #[arg(long, default_value_t = 1e-6)]
        delta: f64,
    },
    /// Sample faults and estimate the accepted-failure rate.
    Montecarlo {
        #[arg(long, value_enum, default_value = "cnot")]
        exrec: ExRecKind,
        #[arg(long)]
        no_storage: bool,
        /// Uniform fault rate for every type.
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        /// Per-type rates for types 1..=8, comma separated; overrides --eps.
        #[arg(long, value_delimiter = ',', num_args = 8)]
        eps_types: Option<Vec<f64>>,
        #[arg(long, default_value_t = 1_000_000)]
        shots: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        workers: Workers,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run the oracle suite.
    Verify {
        /// Skip the exhaustive single-fault searches.
        #[arg(long)]
        quick: bool,
        #[command(flatten)]
        workers: Workers,
    },
}

/// Failure modes mapped onto exit codes.
enum Fail {
    /// Invariant violation or failed check: exit 1.
    Invariant(String),
    /// Unusable arguments or inputs: exit 2.
    Usage(String),
}

type Res = Result<(), Fail>;

fn io_err(p: &Path, e: impl std::fmt::Display) -> Fail {
    Fail::Usage(format!("{}: {e}", p.display()))
}

fn opts(storage: bool) -> BuildOptions {
    BuildOptions { include_storage: storage, ..Default::default() }
}

fn cmd_gadgets(exrec: Option<ExRecKind>, storage: bool, out: &Path) -> Res {
    fs::create_dir_all(out).map_err(|e| io_err(out, e))?;
    let suffix = if storage { "" } else { ".no-storage" };
    let gadgets: Vec<(String, Gadget)> = match exrec {
        Some(k) => vec![(k.key(NoiseMode::Adversarial, storage), k.build(storage))],
        None => vec![
            (format!("encoder-zero{suffix}"), build_encoder(Basis::Zero, opts(storage))),
            (format!("encoder-plus{suffix}"), build_encoder(Basis::Plus, opts(storage))),
            (format!("ec{suffix}"), build_steane_ec(opts(storage))),
            (format!("cat{suffix}"), build_cat_prep(opts(storage))),
            (format!("cnot{suffix}"), build_cnot_exrec(opts(storage))),
            (format!("a-state{suffix}"), build_a_state_exrec(opts(storage))),
        ],
    };
    for (name, g) in gadgets {
        g.validate().map_err(|e| Fail::Invariant(format!("{name}: {e}")))?;
        let path = out.join(format!("{name}.netlist"));
        fs::write(&path, g.netlist()).map_err(|e| io_err(&path, e))?;
        println!("{} {}", path.display(), g.census().total());
    }
    Ok(())
}

/// Internal consistency of a finished count.
fn check_report(rep: &MalignancyReport, g: &Gadget) -> Res {
    let mut sum = 0.0;
    for (a, row) in rep.matrix.iter().enumerate() {
        for (b, &v) in row.iter().enumerate() {
            if !v.is_finite() || v < 0.0 || (b > a && v != 0.0) {
                return Err(Fail::Invariant(format!("matrix entry ({}, {}) = {v}", a + 1, b + 1)));
            }
            sum += v;
        }
    }
    if (sum - rep.total).abs() > 1e-6 * sum.max(1.0) {
        return Err(Fail::Invariant(format!("total {} differs from entry sum {sum}", rep.total)));
    }
    let n = g.locations.len() as u64;
    if rep.pairs_examined != n * (n - 1) / 2 || rep.malignant_pairs > rep.pairs_examined {
        return Err(Fail::Invariant("pair counts inconsistent".into()));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_count(
    exrec: ExRecKind,
    noise: NoiseMode,
    storage: bool,
    sweep: Sweep,
    workers: Workers,
    json: Option<&Path>,
    csv: Option<&Path>,
    keep_pairs: bool,
) -> Res {
    let g = exrec.build(storage);
    g.validate().map_err(|e| Fail::Invariant(format!("gadget: {e}")))?;
    let code = StabilizerCode::steane();
    let cl = Classifier::new(&g, &code);
    let rep = count_matrix(&cl, noise, sweep, workers.exec());
    check_report(&rep, &g)?;
    let config = RunConfig {
        command: "count".into(),
        exrec,
        noise,
        storage,
        sweep,
        eps: None,
        shots: None,
        workers: workers.recorded(),
        seed: None,
    };
    let census = g.census();
    let doc = CountDocument::new(config, census, &rep, keep_pairs);
    let rows = if exrec == ExRecKind::AState { 8 } else { 7 };
    println!("gadget {} locations {}", doc.gadget, census.total());
    print!("{}", report::format_matrix(&doc.matrix, rows));
    println!("A {} B {} malignant pairs {} of {}", fmt_a(doc.a), doc.b, doc.malignant_pairs, doc.pairs_examined);
    let f = doc.fractions;
    println!(
        "fractions cnot {:.3} cnot-cnot {:.3} storage {:.3}",
        f.cnot_involving, f.cnot_cnot, f.storage_involving
    );
    if let Some(t) = &doc.threshold {
        println!("A' {:.1} A'' {:.1} eps0 {:.4e}", t.a_prime, t.a_double_prime, t.eps0);
    }
    if let Some(p) = json {
        let text = serde_json::to_string_pretty(&doc).map_err(|e| Fail::Invariant(e.to_string()))?;
        fs::write(p, text + "\n").map_err(|e| io_err(p, e))?;
    }
    if let Some(p) = csv {
        let f = fs::File::create(p).map_err(|e| io_err(p, e))?;
        report::write_matrix_csv(f, &doc.matrix).map_err(|e| io_err(p, e))?;
    }
    Ok(())
}

fn fmt_a(a: f64) -> String {
    if a.fract() == 0.0 {
        format!("{a:.0}")
    } else {
        format!("{a:.2}")
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_threshold(
    report_path: Option<&Path>,
    exrec: ExRecKind,
    noise: NoiseMode,
    storage: bool,
    a: Option<f64>,
    eps: Option<f64>,
    circuit_size: f64,
    delta: f64,
) -> Res {
    let (exrec, noise, storage, a) = match report_path {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| io_err(p, e))?;
            let doc: CountDocument = serde_json::from_str(&text).map_err(|e| io_err(p, e))?;
            if doc.schema_version != report::SCHEMA_VERSION {
                return Err(Fail::Usage(format!("unsupported schema version {}", doc.schema_version)));
            }
            (doc.config.exrec, doc.config.noise, doc.config.storage, doc.a)
        }
        None => {
            let stem = exrec.key(noise, storage);
            let a = match a {
                Some(a) => a,
                None => reference::lookup(&format!("a.{stem}"))
                    .map(|c| c.value)
                    .ok_or_else(|| Fail::Usage(format!("no published count for {stem}; pass --a")))?,
            };
            (exrec, noise, storage, a)
        }
    };
    let stem = exrec.key(noise, storage);
    let census = exrec.build(storage).census();
    let (inp, t) = report::threshold_for(exrec, storage, a, &census).map_err(|e| Fail::Usage(e.to_string()))?;
    println!("configuration {stem}");
    println!("A {} B {} C {} acceptance exponent {}", fmt_a(inp.a), inp.b, inp.c_anc, inp.acceptance_exponent);
    println!("A' {:.2}", t.a_prime);
    println!("A'' {:.2}", t.a_double_prime);
    println!("eps0 {:.4e}", t.eps0);
    let cmp = report::compare(&stem, a, inp.b, Some(&t));
    for c in &cmp {
        println!("{}", c.line());
    }
    let l = census.total();
    if let Ok(eta) = threshold::local_noise_threshold(l, 2, std::f64::consts::E) {
        println!("local noise eta0 (C = e) {eta:.4e}");
    }
    if let Ok((eta, c, _)) = threshold::local_noise_threshold_self_consistent(l, 2) {
        println!("local noise eta0 (self-consistent C = {c:.6}) {eta:.4e}");
    }
    let eta_pairs = threshold::local_noise_pair_threshold(a, l, std::f64::consts::E);
    println!("local noise eta0 from malignant pairs {eta_pairs:.4e}");
    if let Some(eps) = eps {
        match threshold::minimal_level(circuit_size, delta, eps, t.eps0) {
            Ok((d, k)) => println!("level {k} reaches accuracy {d:.3e} for {circuit_size:.0} locations at eps {eps:.3e}"),
            Err(e) => println!("level estimate: {e}"),
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_montecarlo(
    exrec: ExRecKind,
    storage: bool,
    eps: f64,
    eps_types: Option<Vec<f64>>,
    shots: u64,
    seed: u64,
    workers: Workers,
    json: Option<&Path>,
) -> Res {
    let rates: [f64; 8] = match eps_types {
        Some(v) => v.try_into().map_err(|_| Fail::Usage("--eps-types needs 8 values".into()))?,
        None => [eps; 8],
    };
    if rates.iter().any(|&e| !(0.0..=1.0).contains(&e)) {
        return Err(Fail::Usage("fault rates must lie in [0, 1]".into()));
    }
    if shots == 0 {
        return Err(Fail::Usage("--shots must be positive".into()));
    }
    let g = exrec.build(storage);
    let code = StabilizerCode::steane();
    let cl = Classifier::new(&g, &code);
    let r = monte_carlo(&cl, rates, shots, seed, workers.exec());
    // Second-order bound from the published matrix and the triple count.
    let bound = if exrec == ExRecKind::Cnot {
        let mut quad = 0.0;
        for (a, row) in reference::ALPHA.iter().enumerate() {
            for (b, &v) in row.iter().enumerate() {
                quad += v * rates[a] * rates[b];
            }
        }
        let e_max = rates.iter().cloned().fold(0.0, f64::max);
        Some(quad + threshold::triple_count(g.census().total()) as f64 * e_max.powi(3))
    } else {
        None
    };
    println!("shots {} accepted {} failures {}", r.shots, r.accepted, r.failures);
    println!("rate {:.4e} sigma {:.2e}", r.rate, r.sigma);
    if let Some(b) = bound {
        let ok = r.rate <= b + 3.0 * r.sigma;
        println!("{} rate within 3 sigma of bound {b:.4e}", if ok { "PASS" } else { "FAIL" });
    }
    if let Some(p) = json {
        let config = RunConfig {
            command: "montecarlo".into(),
            exrec,
            noise: NoiseMode::Depolarizing,
            storage,
            sweep: Sweep::Reduced,
            eps: Some(rates),
            shots: Some(shots),
            workers: workers.recorded(),
            seed: Some(seed),
        };
        let doc = serde_json::json!({
            "schema_version": report::SCHEMA_VERSION,
            "config": config,
            "result": r,
            "bound": bound,
        });
        let text = serde_json::to_string_pretty(&doc).map_err(|e| Fail::Invariant(e.to_string()))?;
        fs::write(p, text + "\n").map_err(|e| io_err(p, e))?;
    }
    Ok(())
}

fn cmd_verify(quick: bool, workers: Workers) -> Res {
    let checks = verify::run_all(!quick, workers.exec());
    for c in &checks {
        println!("{}", c.line());
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    println!("{} checks, {failed} failed", checks.len());
    if failed > 0 {
        return Err(Fail::Invariant(format!("{failed} checks failed")));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let res = match cli.command {
        Command::Gadgets { exrec, no_storage, out } => cmd_gadgets(exrec, !no_storage, &out),
        Command::Count { exrec, noise, no_storage, sweep, workers, json, csv, pairs } => {
            cmd_count(exrec, noise, !no_storage, sweep, workers, json.as_deref(), csv.as_deref(), pairs)
        }
        Command::Threshold { report, exrec, noise, no_storage, a, eps, circuit_size, delta } => {
            cmd_threshold(report.as_deref(), exrec, noise, !no_storage, a, eps, circuit_size, delta)
        }
        Command::Montecarlo { exrec, no_storage, eps, eps_types, shots, seed, workers, json } => {
            cmd_montecarlo(exrec, !no_storage, eps, eps_types, shots, seed, workers, json.as_deref())
        }
        Command::Verify { quick, workers } => cmd_verify(quick, workers),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail::Invariant(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Fail::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
