//! Pauli content of the three-spin comb term by brute-force 8x8 projection.

mod common;

use combsim::circuits::{comb_step_circuit, Gate};
use combsim::models::{comb_scrambler, CombParams};
use combsim::pauli::{PauliAxis, PauliString};
use common::*;

const TOL: f64 = 1e-12;

fn words() -> Vec<String> {
    let mut out = Vec::new();
    for a in "IXYZ".chars() {
        for b in "IXYZ".chars() {
            for c in "IXYZ".chars() {
                out.push([a, b, c].iter().collect());
            }
        }
    }
    out
}

fn axis(ch: char) -> PauliAxis {
    match ch {
        'I' => PauliAxis::I,
        'X' => PauliAxis::X,
        'Y' => PauliAxis::Y,
        'Z' => PauliAxis::Z,
        _ => unreachable!(),
    }
}

fn library_coefficient(p: &CombParams, word: &str) -> f64 {
    let sites: Vec<(usize, PauliAxis)> = word.chars().enumerate().map(|(q, ch)| (q, axis(ch))).collect();
    comb_scrambler(p).coefficient(&PauliString::from_sites(3, &sites))
}

#[test]
fn cyclic_sum_is_three_quarters_and_one_quarter() {
    let m = scrambler_dense(3, 1.0, &[1.0; 3]);
    for w in words() {
        let got = coefficient(&m, &pauli(3, &[0, 1, 2], &w));
        let want = match w.as_str() {
            "XXX" => 0.75,
            "XYY" | "YXY" | "YYX" => 0.25,
            _ => 0.0,
        };
        assert!((got - want).abs() < TOL, "{w}: {got} vs {want}");
    }
}

#[test]
fn library_expansion_matches_projection() {
    let phis = vec![0.7, 1.3, 0.95];
    let p = CombParams::new(3, 1.0, 0.37, phis.clone(), 1.0).unwrap();
    let m = scrambler_dense(3, 0.37, &phis);
    for w in words() {
        let want = coefficient(&m, &pauli(3, &[0, 1, 2], &w));
        let got = library_coefficient(&p, &w);
        assert!((got - want).abs() < TOL, "{w}: {got} vs {want}");
    }
}

#[test]
fn a_single_triple_carries_quarter_weights_with_signs() {
    let m = scrambler_dense(3, 1.0, &[1.0, 0.0, 0.0]);
    let mut nonzero = 0;
    for w in words() {
        let x = coefficient(&m, &pauli(3, &[0, 1, 2], &w));
        if x.abs() > TOL {
            nonzero += 1;
            assert!((x.abs() - 0.25).abs() < TOL, "{w}: {x}");
        }
    }
    assert_eq!(nonzero, 4);
}

#[test]
fn circuit_rotation_angles_follow_the_weights() {
    let (kappa, dt) = (0.3, 0.07);
    let p = CombParams::new(3, 2.0, kappa, vec![1.0; 3], 5.0).unwrap();
    let circ = comb_step_circuit(&p, 1.0, dt).unwrap();
    let angles: Vec<f64> = circ
        .gates()
        .iter()
        .filter_map(|g| match g {
            Gate::Rz(_, th) => Some(*th),
            _ => None,
        })
        .collect();
    assert_eq!(angles.len(), 7);
    let m = scrambler_dense(3, kappa, &[1.0; 3]);
    for (w, th) in ["XXX", "XYY", "YXY", "YYX"].iter().zip(&angles[3..]) {
        let want = dt * coefficient(&m, &pauli(3, &[0, 1, 2], w));
        assert!((th - want).abs() < TOL, "{w}: {th} vs {want}");
    }
    assert!((angles[3] / angles[4] - 3.0).abs() < TOL);
}
