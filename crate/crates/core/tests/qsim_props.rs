use proptest::prelude::*;
use qhe_core::qsim::{
    apply_gate, depolarizing_kraus, evolve, Circuit, Condition, GateOp, NoiseModel, RegisterState,
};

const N: usize = 3;

fn gate() -> impl Strategy<Value = GateOp> {
    let q = 0..N;
    let angle = -6.3f64..6.3;
    prop_oneof![
        (q.clone(), angle.clone()).prop_map(|(t, a)| GateOp::ry(t, a)),
        q.clone().prop_map(GateOp::x),
        (q.clone(), 1..N).prop_map(|(c, d)| GateOp::cx(c, (c + d) % N)),
        (q.clone(), 1..N, angle.clone()).prop_map(|(c, d, a)| GateOp::cry(c, (c + d) % N, a)),
        (angle, any::<bool>()).prop_map(|(a, on1)| {
            let cond = if on1 { Condition::on_one(2) } else { Condition::on_zero(2) };
            GateOp::cry(0, 1, a).with_condition(cond)
        }),
        q.clone().prop_map(|t| GateOp::Reset { target: t }),
        Just(GateOp::Barrier),
    ]
}

fn unitary_gate() -> impl Strategy<Value = GateOp> {
    gate().prop_filter("unitary", |g| g.is_unitary())
}

/// A random mixed state: a unitary-scrambled product of partly mixed qubits.
fn mixed_state() -> impl Strategy<Value = RegisterState> {
    (prop::collection::vec(unitary_gate(), 0..12), 0.0f64..1.0).prop_map(|(ops, p)| {
        let mut s = RegisterState::zero(N);
        for op in &ops {
            s = apply_gate(&s, op).unwrap();
        }
        let mixed = RegisterState::maximally_mixed(N);
        let rho = s.matrix().scale((1.0 - p).into()).add(&mixed.matrix().scale(p.into()));
        RegisterState::from_matrix(N, rho).unwrap()
    })
}

fn noise() -> impl Strategy<Value = NoiseModel> {
    (0.0f64..0.2, 0.0f64..0.2, 0.0f64..0.2, 0.0f64..0.1).prop_map(|(d1, d2, r, f)| NoiseModel {
        p_dep1: d1,
        p_dep2: d2,
        p_relax: r,
        readout: vec![[[1.0 - f, f], [f, 1.0 - f]]; N],
    })
}

proptest! {
    #[test]
    fn noisy_evolution_yields_valid_states(
        ops in prop::collection::vec(gate(), 0..20),
        rho in mixed_state(),
        noise in noise(),
    ) {
        let mut c = Circuit::new(N, [0, 1]);
        c.extend(ops);
        let out = evolve(&c, &rho, Some(&noise)).unwrap();
        prop_assert!(out.check().is_ok());
        prop_assert!((out.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gate_then_inverse_restores_state(g in unitary_gate(), rho in mixed_state()) {
        let there = apply_gate(&rho, &g).unwrap();
        let back = apply_gate(&there, &g.inverse()).unwrap();
        prop_assert!(back.matrix().max_abs_diff(rho.matrix()) < 1e-10);
    }

    #[test]
    fn depolarizing_formula_matches_pauli_kraus(rho in mixed_state(), p in 0.0f64..=1.0, q in 0..N) {
        let pair = [q, (q + 1) % N];
        let direct = qhe_core::qsim::apply_depolarizing(&rho, &pair, p).unwrap();
        let kraus = rho.apply_kraus(&pair, &depolarizing_kraus(2, p));
        prop_assert!(direct.matrix().max_abs_diff(kraus.matrix()) < 1e-12);
    }
}

#[test]
fn empty_and_involution_circuits_are_identity() {
    let rho = RegisterState::basis(N, 0b101);
    let c = Circuit::new(N, [0, 1]);
    assert_eq!(evolve(&c, &rho, None).unwrap(), rho);
    let c = c.with_ops(vec![GateOp::x(0), GateOp::x(0)]);
    assert!(evolve(&c, &rho, None).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-15);
}

#[test]
fn readout_flip_on_leading_qubit() {
    use qhe_core::qsim::{flip_confusion, observed_distribution, IDEAL_READOUT};
    let out = observed_distribution(&RegisterState::zero(N), &[0, 1], &[flip_confusion(0.02), IDEAL_READOUT]).unwrap();
    assert!((out[0b10] - 0.02).abs() < 1e-15);
}
