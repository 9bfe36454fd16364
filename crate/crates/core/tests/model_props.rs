use proptest::prelude::*;
use qhe_core::model::{integrate_simplified, rate_generator, steady_state, EngineParams};

fn params() -> impl Strategy<Value = EngineParams> {
    (0.2f64..3.0, 0.0f64..1.0, 0.05f64..1.0, 1.0f64..3.0, 0.01f64..0.5, 0.01f64..0.5).prop_map(
        |(gap, lambda, beta_h, beta_ratio, gh, gc)| EngineParams {
            omega1: 1.0,
            omega2: 1.0 + gap,
            lambda,
            beta_h,
            beta_c: beta_h * beta_ratio,
            gamma_h20: gh,
            gamma_c10: gc,
            ..EngineParams::standard()
        },
    )
}

fn populations() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(0.0f64..1.0).prop_filter_map("nonzero", |w| {
        let s: f64 = w.iter().sum();
        (s > 1e-3).then(|| w.map(|x| x / s))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn rate_equation_preserves_probability(p in params(), rho0 in populations(), t in 0.0f64..50.0) {
        let trace = integrate_simplified(&p, rho0, &[0.0, t]).unwrap();
        prop_assert!(trace.check_invariants());
        let last = trace.samples.last().unwrap();
        prop_assert!((last.rho00 + last.rho11 + last.rho22 - 1.0).abs() < 1e-12);
        prop_assert!(last.rho00 >= -1e-12 && last.rho11 >= -1e-12 && last.rho22 >= -1e-12);
    }

    #[test]
    fn steady_state_is_a_balanced_fixed_point(p in params()) {
        let pi = steady_state(&p).unwrap();
        let g = rate_generator(&p);
        for i in 0..3 {
            let flow: f64 = (0..3).map(|j| g[i][j] * pi[j]).sum();
            prop_assert!(flow.abs() < 1e-12);
        }
        // Detailed balance on each bath edge.
        for j in 1..3 {
            prop_assert!((g[0][j] * pi[j] - g[j][0] * pi[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn ground_population_closes_for_equal_decay_rates(p in params(), t in 0.0f64..20.0) {
        // Rescale the cold coupling so both levels decay into ε0 at the same
        // rate; ρ00 then obeys a closed equation.
        let r = p.transition_rates();
        let p = EngineParams { gamma_c10: p.gamma_c10 * r.down20 / r.down10, ..p };
        let r = p.transition_rates();
        prop_assume!((r.down20 - r.down10).abs() < 1e-12 * r.down20);
        let from1 = integrate_simplified(&p, [0.0, 1.0, 0.0], &[t]).unwrap().samples[0];
        let from2 = integrate_simplified(&p, [0.0, 0.0, 1.0], &[t]).unwrap().samples[0];
        prop_assert!((from1.rho00 - from2.rho00).abs() < 1e-8);
    }
}

#[test]
fn standard_initial_states_converge() {
    let p = EngineParams::standard();
    let pi = steady_state(&p).unwrap();
    for init in 0..3 {
        let mut rho0 = [0.0; 3];
        rho0[init] = 1.0;
        let s = integrate_simplified(&p, rho0, &[200.0]).unwrap().samples[0];
        let err = [s.rho00 - pi[0], s.rho11 - pi[1], s.rho22 - pi[2]].iter().map(|x| x.abs()).fold(0.0, f64::max);
        assert!(err <= 1e-9, "init {init}: {err}");
    }
}
