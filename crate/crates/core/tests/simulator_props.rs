use proptest::prelude::*;
use qfrac_core::simulator::NORM_TOLERANCE;
use qfrac_core::{
    analytic_p1, apply_oracle, measure_y, prepare_uniform, run_experiment, ExperimentConfig, OracleTable,
    RegisterSpec, SamplingPlan, Width,
};

fn random_table() -> impl Strategy<Value = OracleTable> {
    (1u32..=10).prop_flat_map(|k| {
        prop::collection::vec(any::<bool>(), 1usize << k)
            .prop_map(move |bits| OracleTable::from_fn(Width::new(k).unwrap(), |x| bits[x as usize]))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn oracle_twice_restores_state(t in random_table()) {
        let spec = RegisterSpec::from(t.width());
        let prepared = prepare_uniform(spec).unwrap();
        let once = apply_oracle(prepared.clone(), &t).unwrap();
        prop_assert!((once.norm_sqr() - 1.0).abs() <= NORM_TOLERANCE);
        let twice = apply_oracle(once, &t).unwrap();
        prop_assert_eq!(twice.amplitudes(), prepared.amplitudes());
    }

    #[test]
    fn simulated_p1_matches_closed_form(t in random_table()) {
        let state = apply_oracle(prepare_uniform(RegisterSpec::from(t.width())).unwrap(), &t).unwrap();
        let exact = t.solution_count() as f64 / t.len() as f64;
        prop_assert!((state.p1() - exact).abs() <= 1e-10);
        prop_assert!((state.p1() - analytic_p1(&t).p1()).abs() <= 1e-10);
        let summary = analytic_p1(&t);
        prop_assert_eq!(summary.a_sq.ratio() + summary.b_sq.ratio(), 1u64.into());
    }

    #[test]
    fn x_marginals_survive_the_oracle(t in random_table()) {
        let before = prepare_uniform(RegisterSpec::from(t.width())).unwrap();
        let after = apply_oracle(before.clone(), &t).unwrap();
        for x in 0..t.len() {
            prop_assert!((before.x_marginal(x) - after.x_marginal(x)).abs() <= 1e-12);
        }
    }

    #[test]
    fn collapse_renormalizes(t in random_table(), r in 0.0f64..1.0) {
        let s = t.solution_count();
        // Skip draws that would pick a zero-probability branch.
        prop_assume!(s > 0 && s < t.len());
        let state = apply_oracle(prepare_uniform(RegisterSpec::from(t.width())).unwrap(), &t).unwrap();
        let p1 = state.p1();
        let (outcome, collapsed) = measure_y(state, r).unwrap();
        prop_assert_eq!(outcome, u8::from(r < p1));
        prop_assert!((collapsed.norm_sqr() - 1.0).abs() <= NORM_TOLERANCE);
        let expect = if outcome == 1 { 1.0 } else { 0.0 };
        prop_assert!((collapsed.p1() - expect).abs() <= 1e-12);
    }
}

#[test]
fn shot_frequency_within_hoeffding() {
    // sqrt(ln(2 / 1e-6) / (2 * 100_000)) = 0.008517
    let bound = ((2.0f64 / 1e-6).ln() / 200_000.0).sqrt();
    assert!((bound - 0.0085).abs() < 1e-4);
    let plan = SamplingPlan::with_shots(100_000, 1e-6).unwrap();
    let cfg = ExperimentConfig::new("x*x mod 16 == 1", 4, plan).with_seed(2024);
    let r = run_experiment(&cfg).unwrap();
    assert!((r.f_hat - 0.25).abs() <= bound, "f_hat = {}", r.f_hat);
}
