use ftcount::builders::{build_a_state_exrec, build_cnot_exrec, BuildOptions};
use ftcount::pauli::{PauliOp, StabilizerCode};
use ftcount::propagate::PauliFrame;
use ftcount::threshold::*;
use proptest::prelude::*;

fn op7() -> impl Strategy<Value = PauliOp> {
    (0u64..128, 0u64..128).prop_map(|(x, z)| PauliOp::from_xz(7, x, z).unwrap())
}

/// Products of Steane generators.
fn stabilizer() -> impl Strategy<Value = PauliOp> {
    (0u32..64).prop_map(|m| {
        let code = StabilizerCode::steane();
        code.generators()
            .iter()
            .enumerate()
            .filter(|(i, _)| m >> i & 1 == 1)
            .fold(PauliOp::identity(7).unwrap(), |acc, (_, g)| acc.compose(g).unwrap())
    })
}

proptest! {
    #[test]
    fn compose_is_an_involution(a in op7(), b in op7()) {
        prop_assert_eq!(a.compose(&b).unwrap().compose(&b).unwrap(), a);
        prop_assert_eq!(a.compose(&b).unwrap(), b.compose(&a).unwrap());
    }

    #[test]
    fn commutation_is_symmetric_and_bilinear(a in op7(), b in op7(), c in op7()) {
        prop_assert_eq!(a.commutes(&b).unwrap(), b.commutes(&a).unwrap());
        let ab_c = a.compose(&b).unwrap().commutes(&c).unwrap();
        prop_assert_eq!(ab_c, a.commutes(&c).unwrap() == b.commutes(&c).unwrap());
        prop_assert!(a.commutes(&a).unwrap());
    }

    #[test]
    fn literal_roundtrip(a in op7()) {
        let s = a.to_string();
        prop_assert_eq!(s.parse::<PauliOp>().unwrap(), a);
    }

    #[test]
    fn syndrome_is_linear(a in op7(), b in op7()) {
        let code = StabilizerCode::steane();
        let s = |p: &PauliOp| code.syndrome(p).unwrap().bits();
        prop_assert_eq!(s(&a.compose(&b).unwrap()), s(&a) ^ s(&b));
    }

    #[test]
    fn correctable_errors_decode_exactly(xq in 0usize..8, zq in 0usize..8, st in stabilizer()) {
        let code = StabilizerCode::steane();
        let x = if xq < 7 { 1u64 << xq } else { 0 };
        let z = if zq < 7 { 1u64 << zq } else { 0 };
        let e = PauliOp::from_xz(7, x, z).unwrap();
        let r = code.reduce_block_error(&e.compose(&st).unwrap()).unwrap();
        prop_assert_eq!(r.residual, e);
        prop_assert!(!r.has_logical_flip());
    }

    #[test]
    fn decoder_residual_has_one_error_per_sector(a in op7()) {
        let code = StabilizerCode::steane();
        let r = code.reduce_block_error(&a).unwrap();
        prop_assert!(r.residual.x().count_ones() <= 1);
        prop_assert!(r.residual.z().count_ones() <= 1);
        // Removing the residual and the logical part leaves a stabilizer.
        let mut rest = a.compose(&r.residual).unwrap();
        if r.logical_x_flip { rest = rest.compose(code.logical_x()).unwrap(); }
        if r.logical_z_flip { rest = rest.compose(code.logical_z()).unwrap(); }
        prop_assert!(code.syndrome(&rest).unwrap().is_trivial());
        prop_assert!(rest.commutes(code.logical_x()).unwrap() && rest.commutes(code.logical_z()).unwrap());
    }

    #[test]
    fn frame_propagation_is_linear(seed_a in any::<u64>(), seed_b in any::<u64>(), t_bit in any::<bool>(), a_state in any::<bool>()) {
        let g = if a_state { build_a_state_exrec(BuildOptions::default()) } else { build_cnot_exrec(BuildOptions::default()) };
        let n = g.num_qubits;
        let bits = |s: u64, i: usize| (s.rotate_left(i as u32 % 64) ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)) & 1 == 1;
        let mut fa = PauliFrame::new(n);
        let mut fb = PauliFrame::new(n);
        let mut fs = PauliFrame::new(n);
        for q in 0..n {
            fa.x[q] = bits(seed_a, 2 * q);
            fa.z[q] = bits(seed_a, 2 * q + 1);
            fb.x[q] = bits(seed_b, 2 * q);
            fb.z[q] = bits(seed_b, 2 * q + 1);
            fs.x[q] = fa.x[q] ^ fb.x[q];
            fs.z[q] = fa.z[q] ^ fb.z[q];
        }
        for l in &g.locations {
            let (ma, mb, ms) = (fa.step(l, t_bit), fb.step(l, t_bit), fs.step(l, t_bit));
            if let (Some(a), Some(b), Some(s)) = (ma, mb, ms) {
                prop_assert_eq!(s, a ^ b);
            }
        }
        for q in 0..n {
            prop_assert_eq!(fs.x[q], fa.x[q] ^ fb.x[q]);
            prop_assert_eq!(fs.z[q], fa.z[q] ^ fb.z[q]);
        }
    }

    #[test]
    fn a_prime_solves_its_fixed_point(a in 1.0f64..1e6, b in 0.0f64..1e9) {
        let ap = a_prime(a, b).unwrap();
        prop_assert!((ap - (a + b / ap)).abs() <= 1e-9 * ap);
        prop_assert!(ap >= a);
    }

    #[test]
    fn adjusted_coefficient_dominates(a in 100.0f64..1e5, b in 0.0f64..1e8, c in 0.0f64..50.0, k in 1u32..9) {
        let r = threshold(&ThresholdInputs { a, b, c_anc: c, acceptance_exponent: k }).unwrap();
        prop_assert!(r.a_double_prime >= r.a_prime && r.a_prime >= a);
        prop_assert!((r.eps0 * r.a_double_prime - 1.0).abs() < 1e-12);
    }

    #[test]
    fn threshold_decreases_in_a_and_b(a in 100.0f64..1e5, b in 0.0f64..1e8, da in 1.0f64..100.0, db in 1.0f64..1e6) {
        let t = |a: f64, b: f64| threshold(&ThresholdInputs { a, b, c_anc: 50.0, acceptance_exponent: 8 }).unwrap().eps0;
        prop_assert!(t(a + da, b) < t(a, b));
        prop_assert!(t(a, b + db) < t(a, b));
    }

    #[test]
    fn squaring_identity(frac in 0.01f64..1.0, k in 1u32..6, a2 in 1e3f64..1e5) {
        let eps0 = 1.0 / a2;
        let eps = frac * eps0;
        let prev = eps_level_k(eps, eps0, k - 1);
        let cur = eps_level_k(eps, eps0, k);
        prop_assert!((cur - a2 * prev * prev).abs() <= 1e-9 * cur.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn chosen_level_is_minimal(frac in 0.01f64..0.99, l in 1.0f64..1e9, delta_exp in 1i32..15) {
        let eps0 = 2.739e-5;
        let eps = frac * eps0;
        let delta = 10f64.powi(-delta_exp);
        if let Ok((d, k)) = minimal_level(l, delta, eps, eps0) {
            prop_assert!(d <= delta);
            if k > 0 {
                prop_assert!(accuracy_bound(l, eps, eps0, k - 1) > delta);
            }
        }
    }

    #[test]
    fn inclusion_exclusion_identity(b in prop::collection::vec(0.0f64..=1.0, 1..=12), s_frac in 0.0f64..1.0) {
        let s = 1 + ((b.len() as f64 - 1.0) * s_frac) as usize;
        prop_assert!(verify_inclusion_exclusion(&b, s));
        let eta = b.iter().cloned().fold(0.0, f64::max);
        prop_assert!(brute_force_tail(&b, s) <= fault_path_tail(b.len() as u64, s as u64, eta) * (1.0 + 1e-12));
    }

    #[test]
    fn local_threshold_decreases_in_size(a in 3u64..2000, s in 2u64..4) {
        prop_assume!(s < a);
        let t0 = local_noise_threshold(a, s, std::f64::consts::E).unwrap();
        let t1 = local_noise_threshold(a + 1, s, std::f64::consts::E).unwrap();
        prop_assert!(t1 < t0);
        let back = (std::f64::consts::E * binomial_f64(a, s)).powf(1.0 / (s - 1) as f64);
        prop_assert!((1.0 / t0 - back).abs() <= 1e-9 * back);
    }
}
