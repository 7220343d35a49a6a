use ftcount::builders::{build_a_state_exrec, build_cnot_exrec, build_steane_ec, BuildOptions, EcOrder};
use ftcount::circuit::Gadget;
use ftcount::engine::{Compiled, Effect};
use ftcount::pauli::{PauliOp, StabilizerCode};
use ftcount::propagate::{is_failure, run, Fault, FaultScenario};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_scenario(g: &Gadget, c: &Compiled, rng: &mut ChaCha8Rng, n_faults: usize) -> (FaultScenario, Effect) {
    let mut sc = FaultScenario::default();
    let mut e = Effect::default();
    let mut used = std::collections::HashSet::new();
    while sc.faults.len() < n_faults {
        let loc = rng.gen_range(0..g.locations.len());
        if !used.insert(loc) {
            continue;
        }
        let entry = &c.alphabets[loc][rng.gen_range(0..c.alphabets[loc].len())];
        let paulis = entry.paulis[..g.locations[loc].qubits.len()].to_vec();
        e ^= entry.effect;
        sc.faults.push(Fault { loc, paulis });
    }
    for &b in &g.input_blocks {
        if rng.gen_bool(0.5) {
            let p = PauliOp::from_xz(7, rng.gen_range(0..128), rng.gen_range(0..128)).unwrap();
            e ^= c.input_effect(b, &p);
            sc.inputs.push((b, p));
        }
    }
    (sc, e)
}

fn agree(g: &Gadget, seed: u64, trials: usize) {
    let code = StabilizerCode::steane();
    let c = Compiled::new(g, &code);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for trial in 0..trials {
        let (mut sc, e) = random_scenario(g, &c, &mut rng, 1 + trial % 4);
        // Pin T bits to a random subset and fold the matching companions in.
        let mut eff = e;
        if !c.t_locs.is_empty() {
            let tbits: u32 = rng.gen::<u32>() & ((1u64 << c.t_locs.len()) - 1) as u32;
            let r = run(g, &code, &{
                let mut s2 = sc.clone();
                s2.t_bits = (0..c.t_locs.len()).map(|i| (c.t_locs[i], tbits >> i & 1 == 1)).collect();
                s2
            })
            .unwrap();
            // Only bits where X actually reaches matter; search must find a failure whenever run does.
            if is_failure(g, &r) {
                assert!(c.fails_any_t(e), "seed {seed} trial {trial}: run fails but T search does not\n{sc}");
                failures += 1;
            }
            sc.t_bits.clear();
            eff.tmask = 0;
        }
        let r = run(g, &code, &sc).unwrap();
        let (eff, free) = c.project(eff);
        let o = c.outcome(eff.sig, free);
        assert_eq!(o.accepted, r.accepted, "trial {trial}\n{sc}");
        if r.accepted {
            for (i, e) in r.output_errors.iter().enumerate() {
                assert_eq!((o.outputs[i].lx, o.outputs[i].lz), (e.logical_x_flip, e.logical_z_flip), "trial {trial}\n{sc}");
            }
            if let Some(ri) = &r.rec_input_errors {
                for (b, e) in ri.iter().enumerate() {
                    assert_eq!((o.reference[b].lx, o.reference[b].lz), (e.logical_x_flip, e.logical_z_flip));
                }
            }
        }
        assert_eq!(c.fails_free(eff.sig, free), is_failure(g, &r), "trial {trial}\n{sc}");
        failures += is_failure(g, &r) as usize;
    }
    assert!(failures > 0 || trials < 100, "no failures seen; test is vacuous");
}

#[test]
fn cnot_exrec_engines_agree() {
    agree(&build_cnot_exrec(BuildOptions::default()), 1, 3000);
    agree(&build_cnot_exrec(BuildOptions { ec_order: EcOrder::PlusFirst, ec_order_target: EcOrder::PlusFirst, ..Default::default() }), 2, 1000);
}

#[test]
fn steane_ec_engines_agree() {
    agree(&build_steane_ec(BuildOptions::default()), 3, 2000);
}

#[test]
fn a_state_engines_agree() {
    agree(&build_a_state_exrec(BuildOptions::default()), 4, 3000);
}
