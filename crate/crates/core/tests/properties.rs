use proptest::prelude::*;
use qpd_core::capacity::{
    coherent_information, coherent_information_pd, coherent_information_stinespring, fd_gradient, ssa_check, PdIsometries,
};
use qpd_core::degradability::{
    classify_pd, solve_degrading_map, solve_degrading_map_with, transfer_matrix, verify_pd_identity,
};
use qpd_core::entanglement::{ccnr, entropy, ppt_check};
use qpd_core::polar::{self, PolarLedger, Regime, Q};
use qpd_core::qmat::kron;
use qpd_core::random::{ginibre, random_density, random_hermitian, random_isometry, random_pure, random_unitary, seeded};
use qpd_core::zoo;
use qpd_core::{ComplexMatrix, DensityMatrix, KrausChannel, Tolerances};

/// At least enough Kraus operators for an isometric dilation.
fn random_channel(seed: u64, din: usize, dout: usize, k: usize) -> KrausChannel {
    let k = k.max(din.div_ceil(dout));
    let v = random_isometry(&mut seeded(seed), dout * k, din);
    let ops = (0..k).map(|i| ComplexMatrix::from_fn(dout, din, |b, a| v[(b * k + i, a)])).collect();
    KrausChannel::new(din, dout, ops).unwrap()
}

fn state(m: ComplexMatrix) -> DensityMatrix {
    let d = m.rows();
    DensityMatrix::new(m, vec![d]).unwrap()
}

/// `U_out N(U_in ρ U_in†) U_out†`: same degradability class as `N`.
fn conjugated(ch: &KrausChannel, seed: u64) -> KrausChannel {
    let mut rng = seeded(seed);
    let u_in = random_unitary(&mut rng, ch.dim_in());
    let u_out = random_unitary(&mut rng, ch.dim_out());
    let ops = ch.kraus().iter().map(|k| &(&u_out * k) * &u_in).collect();
    KrausChannel::new(ch.dim_in(), ch.dim_out(), ops).unwrap()
}

fn choi_apply(ch: &KrausChannel, rho: &ComplexMatrix) -> ComplexMatrix {
    // N(ρ) = d_in Tr_A[(ρᵀ ⊗ I) J]
    let choi = ch.to_choi().unwrap().matrix;
    let lifted = kron(&rho.transpose(), &ComplexMatrix::identity(ch.dim_out())).unwrap();
    (&lifted * &choi).partial_trace(&[ch.dim_in(), ch.dim_out()], &[1]).unwrap().scale_real(ch.dim_in() as f64)
}

fn baseline_channel(kind: u8, param: f64) -> KrausChannel {
    match kind % 4 {
        0 => zoo::amplitude_damping(param).unwrap(),
        1 => zoo::erasure(param, 2).unwrap(),
        2 => zoo::dephasing(param).unwrap(),
        _ => zoo::depolarizing(param, 2).unwrap(),
    }
}

// ------------------------------------------------------------------ qmat

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kron_is_associative(seed in any::<u64>(), a in 1usize..4, b in 1usize..4, c in 1usize..4) {
        let mut rng = seeded(seed);
        let (x, y, z) = (ginibre(&mut rng, a, b), ginibre(&mut rng, b, c), ginibre(&mut rng, c, a));
        let left = kron(&kron(&x, &y).unwrap(), &z).unwrap();
        let right = kron(&x, &kron(&y, &z).unwrap()).unwrap();
        prop_assert!(left.max_diff(&right) < 1e-12);
    }

    #[test]
    fn partial_trace_is_linear_and_trace_preserving(seed in any::<u64>(), a in 1usize..4, b in 1usize..4, s in -2.0f64..2.0) {
        let mut rng = seeded(seed);
        let (x, y) = (random_hermitian(&mut rng, a * b), random_hermitian(&mut rng, a * b));
        for keep in [[0usize], [1usize]] {
            let lhs = (&x + &y.scale_real(s)).partial_trace(&[a, b], &keep).unwrap();
            let rhs = &x.partial_trace(&[a, b], &keep).unwrap() + &y.partial_trace(&[a, b], &keep).unwrap().scale_real(s);
            prop_assert!(lhs.max_diff(&rhs) < 1e-12);
            prop_assert!((x.partial_trace(&[a, b], &keep).unwrap().trace() - x.trace()).norm() < 1e-12);
        }
    }

    #[test]
    fn partial_transpose_is_a_hermitian_involution(seed in any::<u64>(), a in 1usize..4, b in 1usize..4, which in 0usize..2) {
        let h = random_hermitian(&mut seeded(seed), a * b);
        let t = h.partial_transpose(&[a, b], which).unwrap();
        prop_assert!(t.hermitian_deviation() < 1e-14);
        prop_assert!((t.trace() - h.trace()).norm() < 1e-14);
        prop_assert_eq!(t.partial_transpose(&[a, b], which).unwrap(), h);
    }

    #[test]
    fn eigh_reconstructs(seed in any::<u64>(), n in 1usize..48) {
        let h = random_hermitian(&mut seeded(seed), n);
        let e = h.eigh().unwrap();
        let rebuilt = &(&e.vectors * &ComplexMatrix::from_real_diag(&e.values)) * &e.vectors.adjoint();
        prop_assert!(rebuilt.max_diff(&h) <= 1e-8 * h.frobenius_norm().max(1.0));
        prop_assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn pinv_satisfies_penrose_identities(seed in any::<u64>(), m in 1usize..12, n in 1usize..12, r in 1usize..12) {
        let mut rng = seeded(seed);
        // rank at most r
        let a = &ginibre(&mut rng, m, r) * &ginibre(&mut rng, r, n);
        let p = a.pinv(1e-10);
        let scale = a.max_abs().max(1.0);
        prop_assert!((&(&a * &p) * &a).max_diff(&a) < 1e-8 * scale);
        prop_assert!((&(&p * &a) * &p).max_diff(&p) < 1e-8 * p.max_abs().max(1.0));
        prop_assert!((&a * &p).hermitian_deviation() < 1e-8);
        prop_assert!((&p * &a).hermitian_deviation() < 1e-8);
    }
}

#[test]
fn eigh_reconstructs_at_side_144() {
    let h = random_hermitian(&mut seeded(144), 144);
    let e = h.eigh().unwrap();
    let rebuilt = &(&e.vectors * &ComplexMatrix::from_real_diag(&e.values)) * &e.vectors.adjoint();
    assert!(rebuilt.max_diff(&h) <= 1e-8 * h.frobenius_norm());
}

// --------------------------------------------------------------- channel

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn kraus_stinespring_and_choi_agree(seed in any::<u64>(), din in 1usize..4, dout in 1usize..4, k in 1usize..5) {
        let ch = random_channel(seed, din, dout, k);
        let iso = ch.stinespring().unwrap();
        let mut rng = seeded(seed ^ 1);
        for _ in 0..5 {
            let rho = random_density(&mut rng, din, din);
            let out = ch.apply_matrix(&rho).unwrap();
            let dilated = (&(&iso.v * &rho) * &iso.v.adjoint()).partial_trace(&[dout, iso.dim_env], &[0]).unwrap();
            prop_assert!(out.max_diff(&dilated) < 1e-10);
            prop_assert!(out.max_diff(&choi_apply(&ch, &rho)) < 1e-10);
        }
    }

    #[test]
    fn complement_of_a_channel_is_a_channel(seed in any::<u64>(), din in 1usize..4, dout in 1usize..4, k in 1usize..5) {
        let env = random_channel(seed, din, dout, k).complementary().unwrap();
        prop_assert!(env.tp_residual() < 1e-10);
    }

    #[test]
    fn environment_dimension_bound(seed in any::<u64>(), din in 1usize..4, dout in 1usize..4, k in 1usize..10) {
        let ch = random_channel(seed, din, dout, k);
        let tol = Tolerances::default();
        let rank = ch.to_choi().unwrap().rank(tol.kraus_cutoff).unwrap();
        let minimal = ch.minimized(tol.kraus_cutoff).unwrap();
        prop_assert_eq!(minimal.kraus().len(), rank);
        prop_assert!(rank <= din * dout);
        prop_assert!(rank <= ch.kraus().len());
    }
}

#[test]
fn zoo_channels_have_psd_choi_with_mixed_marginal() {
    let p = zoo::ZooParams::default();
    for item in zoo::CATALOG {
        let e = zoo::build(item.id, &p).unwrap();
        if e.status != zoo::EntryStatus::Complete {
            continue;
        }
        let choi = e.channel.to_choi().unwrap();
        assert!(choi.min_eig().unwrap() >= -1e-9, "{}", item.id);
        let d = e.channel.dim_in();
        let marginal = choi.matrix.partial_trace(&[d, e.channel.dim_out()], &[0]).unwrap();
        assert!(marginal.max_diff(&ComplexMatrix::identity(d).scale_real(1.0 / d as f64)) < 1e-10, "{}", item.id);
    }
}

// ---------------------------------------------------------- entanglement

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn entropy_bounds_and_unitary_invariance(seed in any::<u64>(), d in 1usize..6) {
        let mut rng = seeded(seed);
        let rho = random_density(&mut rng, d, 1 + (seed as usize) % d);
        let h = entropy(&state(rho.clone())).unwrap();
        prop_assert!(h >= -1e-12 && h <= (d as f64).log2() + 1e-12);
        let u = random_unitary(&mut rng, d);
        let rotated = (&(&u * &rho) * &u.adjoint()).hermitian_part();
        prop_assert!((entropy(&state(rotated)).unwrap() - h).abs() < 1e-9);
    }

    #[test]
    fn strong_subadditivity(seed in any::<u64>(), rank in 1usize..9) {
        let rho = random_density(&mut seeded(seed), 8, rank);
        let s = DensityMatrix::new(rho, vec![2, 2, 2]).unwrap();
        prop_assert!(ssa_check(&s).unwrap() >= -1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn separable_mixtures_are_ppt(seed in any::<u64>(), a in 2usize..4, b in 2usize..4, terms in 1usize..6) {
        let mut rng = seeded(seed);
        let mut m = ComplexMatrix::zeros(a * b, a * b);
        for _ in 0..terms {
            let p = kron(&random_density(&mut rng, a, a), &random_density(&mut rng, b, b)).unwrap();
            m = &m + &p.scale_real(1.0 / terms as f64);
        }
        let r = ppt_check(&DensityMatrix::new(m.hermitian_part(), vec![a, b]).unwrap()).unwrap();
        prop_assert!(r.is_ppt);
    }

    #[test]
    fn ccnr_of_pure_products_is_one(seed in any::<u64>(), a in 2usize..4, b in 2usize..4) {
        let mut rng = seeded(seed);
        let (x, y) = (random_pure(&mut rng, a), random_pure(&mut rng, b));
        let v: Vec<_> = x.iter().flat_map(|&p| y.iter().map(move |&q| p * q)).collect();
        let s = DensityMatrix::pure(&v, vec![a, b]).unwrap();
        prop_assert!((ccnr(&s).unwrap() - 1.0).abs() < 1e-9);
    }
}

// ---------------------------------------------------------- degradability

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn successful_solves_are_sound(kind in 0u8..4, param in 0.02f64..0.98, seed in any::<u64>(), reverse in any::<bool>()) {
        let ch = conjugated(&baseline_channel(kind, param), seed);
        let env = ch.complementary().unwrap();
        let (from, to) = if reverse { (&env, &ch) } else { (&ch, &env) };
        let sol = solve_degrading_map(from, to).unwrap();
        if let Some(d) = &sol.map {
            let via = KrausChannel::compose(from, d).unwrap();
            let mut rng = seeded(seed ^ 7);
            for _ in 0..200 {
                let rho = random_density(&mut rng, ch.dim_in(), ch.dim_in());
                let diff = via.apply_matrix(&rho).unwrap().max_diff(&to.apply_matrix(&rho).unwrap());
                prop_assert!(diff <= 10.0 * Tolerances::default().residual_tol, "{diff:e}");
            }
            prop_assert!(d.tp_residual() <= 1e-8);
        }
    }

    #[test]
    fn warm_start_resolve_is_idempotent(gamma in 0.02f64..0.48, seed in any::<u64>()) {
        let ch = conjugated(&zoo::amplitude_damping(gamma).unwrap(), seed);
        let env = ch.complementary().unwrap();
        let first = solve_degrading_map(&ch, &env).unwrap();
        prop_assert!(first.success);
        let again = solve_degrading_map_with(&ch, &env, first.map.as_ref(), &Tolerances::default()).unwrap();
        prop_assert!(again.success);
        prop_assert!((again.residual - first.residual).abs() < 1e-12);
    }

    #[test]
    fn transfer_of_composition_is_the_product(seed in any::<u64>(), a in 1usize..4, b in 1usize..4, c in 1usize..4) {
        let first = random_channel(seed, a, b, 2);
        let then = random_channel(seed ^ 3, b, c, 2);
        let composed = transfer_matrix(&KrausChannel::compose(&first, &then).unwrap()).unwrap();
        let product = &transfer_matrix(&then).unwrap() * &transfer_matrix(&first).unwrap();
        prop_assert!(composed.max_diff(&product) < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn classification_ignores_kraus_rotation(kind in 0u8..2, param in prop_oneof![0.05f64..0.4, 0.6f64..0.95], seed in any::<u64>()) {
        let ch = baseline_channel(kind, param);
        let k = ch.kraus().len();
        let rotated = ch.rotate_kraus(&random_unitary(&mut seeded(seed), k)).unwrap();
        let a = classify_pd(&ch, &KrausChannel::identity(k), false).unwrap();
        let b = classify_pd(&rotated, &KrausChannel::identity(k), false).unwrap();
        prop_assert_eq!(a.label, b.label);
    }

    #[test]
    fn classification_commutes_with_conjugation(gamma in prop_oneof![0.05f64..0.4, 0.6f64..0.95], seed in any::<u64>()) {
        let ch = conjugated(&zoo::amplitude_damping(gamma).unwrap(), seed);
        let d = zoo::dephasing(0.3).unwrap();
        let plain = classify_pd(&ch, &d, true).unwrap();
        let conj = classify_pd(&ch.conjugate(), &d.conjugate(), true).unwrap();
        prop_assert_eq!(plain.label, conj.label);
    }
}

// ---------------------------------------------------------------- capacity

fn segment_point(a: &ComplexMatrix, b: &ComplexMatrix, t: f64) -> DensityMatrix {
    state(&a.scale_real(1.0 - t) + &b.scale_real(t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn coherent_information_paths_agree(seed in any::<u64>(), din in 1usize..4, dout in 1usize..4, k in 1usize..5) {
        let ch = random_channel(seed, din, dout, k);
        let rho = state(random_density(&mut seeded(seed ^ 5), din, din));
        let a = coherent_information(&ch, &rho).unwrap();
        let b = coherent_information_stinespring(&ch, &rho).unwrap();
        prop_assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn degradable_coherent_information_is_concave(gamma in 0.0f64..0.5, seed in any::<u64>()) {
        let ch = zoo::amplitude_damping(gamma).unwrap();
        let mut rng = seeded(seed);
        let (a, b) = (random_density(&mut rng, 2, 2), random_density(&mut rng, 2, 2));
        let f = |t: f64| coherent_information(&ch, &segment_point(&a, &b, t)).unwrap();
        prop_assert!(f(0.5) >= 0.5 * (f(0.0) + f(1.0)) - 1e-7);
    }

    #[test]
    fn finite_difference_gradient_is_consistent(seed in any::<u64>(), kind in 0u8..4, param in 0.1f64..0.9) {
        let ch = baseline_channel(kind, param);
        let d = ch.dim_in();
        let g = ginibre(&mut seeded(seed), d, d);
        let mut l = ComplexMatrix::from_fn(d, d, |i, j| if j <= i { g[(i, j)] } else { Default::default() });
        for i in 0..d {
            l[(i, i)] += qpd_core::C64::new(2.0, 0.0);
        }
        let coarse = fd_gradient(&ch, &l, 1e-5).unwrap();
        let fine = fd_gradient(&ch, &l, 5e-6).unwrap();
        prop_assert!(coarse.max_diff(&fine) <= 1e-4 * coarse.max_abs().max(1e-2));
    }

    #[test]
    fn pd_entropies_vanish_for_identity_degrading_maps(seed in any::<u64>()) {
        // the symmetric-subspace pair is self-complementary, so both degrading maps are identities
        let (ab, _) = zoo::symmetric_pd_channel();
        let id = KrausChannel::identity(8);
        prop_assert!(verify_pd_identity(&ab, &id, &ab.complementary().unwrap(), &id).unwrap() <= 1e-8);
        let iso = PdIsometries::new(&ab, &id, &id).unwrap();
        let rho = state(random_density(&mut seeded(seed), 4, 4));
        let e = coherent_information_pd(&iso, &rho).unwrap();
        prop_assert!((e.h_f_given_eprime - e.h_h_given_g).abs() < 1e-6);
        prop_assert!(e.h_rf_given_eprime.abs() < 1e-6);
    }
}

// ------------------------------------------------------------------- zoo

#[test]
fn zoo_builds_are_bit_reproducible() {
    let p = zoo::ZooParams::default();
    for item in zoo::CATALOG {
        let a = zoo::build(item.id, &p).unwrap();
        let b = zoo::build(item.id, &p).unwrap();
        assert_eq!(a.channel, b.channel, "{}", item.id);
        assert_eq!(a.validation.tp_residual.to_bits(), b.validation.tp_residual.to_bits(), "{}", item.id);
        assert_eq!(a.validation.choi_min_eig.to_bits(), b.validation.choi_min_eig.to_bits(), "{}", item.id);
    }
}

#[test]
fn horodecki_ppt_window_on_a_grid() {
    for k in 31..=50 {
        let alpha = k as f64 / 10.0;
        let r = ppt_check(&zoo::horodecki_state(alpha).unwrap()).unwrap();
        assert_eq!(r.is_ppt, alpha <= 4.0, "alpha {alpha}: {r:?}");
    }
}

// ----------------------------------------------------------------- polar

fn frac() -> impl Strategy<Value = Q> {
    (0i64..=60).prop_map(|n| Q::new(n, 60))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pd_rates_grow_with_recovered_fraction(g in frac(), p1 in frac(), a in frac(), b in frac(), ent in frac()) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (lo, hi) = (lo * p1, hi * p1);
        let deg = |pp| PolarLedger::new(Regime::DegradablePd, g, p1, pp, Q::new(0, 1));
        prop_assert!(polar::rate_pd_degradable(&deg(hi)).unwrap() >= polar::rate_pd_degradable(&deg(lo)).unwrap());
        let anti = |pp| PolarLedger::new(Regime::AntiDegradablePd, g, p1, pp, ent);
        let (x, y) = (polar::rate_pd_antidegradable(&anti(hi)).unwrap(), polar::rate_pd_antidegradable(&anti(lo)).unwrap());
        prop_assert!(x.gross >= y.gross && x.net >= y.net);
    }

    #[test]
    fn pd_rates_collapse_without_recovery(g in frac(), p1 in frac(), ent in frac()) {
        let zero = Q::new(0, 1);
        let deg_pd = PolarLedger::new(Regime::DegradablePd, g, p1, zero, zero);
        let deg = PolarLedger::new(Regime::Degradable, g, p1, zero, zero);
        prop_assert_eq!(polar::rate_pd_degradable(&deg_pd).unwrap(), polar::rate_degradable(&deg).unwrap());
        let anti_pd = PolarLedger::new(Regime::AntiDegradablePd, g, p1, zero, ent);
        let anti = PolarLedger::new(Regime::AntiDegradable, g, p1, zero, ent);
        prop_assert_eq!(polar::rate_pd_antidegradable(&anti_pd).unwrap().gross, polar::rate_antidegradable(&anti).unwrap());
    }

    #[test]
    fn holevo_rate_matches_regime_rate(g in frac(), p1 in frac(), t in frac(), ent in frac(), which in 0usize..4) {
        let regime = [Regime::Degradable, Regime::DegradablePd, Regime::AntiDegradable, Regime::AntiDegradablePd][which];
        let pp = if regime.is_pd() { t * p1 } else { Q::new(0, 1) };
        let b = if regime.is_degradable() { Q::new(0, 1) } else { ent };
        let l = PolarLedger::new(regime, g, p1, pp, b);
        prop_assert_eq!(polar::holevo_triples(&l).rate(), polar::regime_rate(&l));
    }
}
