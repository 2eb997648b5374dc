//! Built circuits against ordered products of exact Pauli-term exponentials,
//! and the first-order Trotter error of a full step.

mod common;

use combsim::circuits::{
    comb_step_circuit, interaction_step_circuit, target_step_circuit, trotter_step_circuit, Circuit,
};
use combsim::models::{CombParams, CouplingMode, InteractionParams, IsingParams};
use common::*;
use proptest::prelude::*;

const TOL: f64 = 1e-12;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn target_circuit_matches_term_product(h in 0.05f64..2.5, b in -1.5f64..1.5, dt in 0.01f64..0.8) {
        let b = if b.abs() < 1e-3 { 0.5 } else { b };
        let (ham, terms) = target_terms(3, h, b);
        assert_complete(&ham, &terms);
        let circ = target_step_circuit(&IsingParams::new(3, h).with_field(b), dt);
        prop_assert!(dist_up_to_phase(&unitary(&circ), &ordered_product(&terms, dt)) < TOL);
    }

    #[test]
    fn comb_circuit_matches_term_product(
        nu0 in 0.5f64..8.0,
        frac in 0.0f64..1.0,
        kappa in 0.01f64..1.0,
        phis in proptest::collection::vec(0.5f64..1.5, 4),
        dt in 0.01f64..0.8,
        four in any::<bool>(),
    ) {
        let nc = if four { 4 } else { 3 };
        let tf = 10.0;
        let t = frac * tf;
        let nu = nu0 * (1.0 - t / tf);
        let phis = phis[..nc].to_vec();
        let (ham, terms) = comb_terms(nc, nu, kappa, &phis);
        assert_complete(&ham, &terms);
        let circ = comb_step_circuit(&CombParams::new(nc, nu0, kappa, phis, tf).unwrap(), t, dt).unwrap();
        prop_assert!(dist_up_to_phase(&unitary(&circ), &ordered_product(&terms, dt)) < TOL);
    }

    #[test]
    fn interaction_circuit_matches_term_product(h in 0.05f64..2.5, g in 0.01f64..1.0, dt in 0.01f64..0.8) {
        let (ham, terms) = interaction_terms(3, 3, h, g);
        assert_complete(&ham, &terms);
        let ip = InteractionParams { g, mode: CouplingMode::OneBodyX };
        let circ = interaction_step_circuit(&ip, &IsingParams::new(3, h), 3, dt).unwrap();
        prop_assert!(dist_up_to_phase(&unitary(&circ), &ordered_product(&terms, dt)) < TOL);
    }
}

#[test]
fn trotter_error_quarters_when_step_halves() {
    let ratio = step_error(0.02) / step_error(0.01);
    assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn dump_round_trips_a_full_step() {
    let circ = trotter_step_circuit(
        &IsingParams::new(3, 0.7).with_field(-1.0),
        &CombParams::new(3, 2.0, 0.2, vec![1.0; 3], 5.0).unwrap(),
        &InteractionParams { g: 0.1, mode: CouplingMode::OneBodyX },
        1.0,
        0.05,
        true,
    )
    .unwrap();
    let back = Circuit::parse_dump(6, &circ.dump()).unwrap();
    assert_eq!(back, circ);
    assert_eq!(circ.len(), 283);
}
