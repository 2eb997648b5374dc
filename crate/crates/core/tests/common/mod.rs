//! Independent dense oracles shared by the integration tests. Everything here
//! is built from explicit 2x2 matrices and Kronecker products, without the
//! library's Pauli algebra.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64 as C;

use combsim::circuits::{circuit_unitary, trotter_step_circuit, Circuit};
use combsim::models::{CombParams, CouplingMode, InteractionParams, IsingParams};

pub type M = DMatrix<C>;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn one(ch: char) -> M {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    let v = match ch {
        'I' => [o, z, z, o],
        'X' => [z, o, o, z],
        'Y' => [z, -i, i, z],
        'Z' => [o, z, z, -o],
        // |1⟩⟨0| and |0⟩⟨1|, with |1⟩ the excited level
        '+' => [z, z, o, z],
        '-' => [z, o, z, z],
        _ => panic!("unknown single-qubit symbol {ch}"),
    };
    M::from_row_slice(2, 2, &v)
}

/// Operator with `sites[k] = (qubit, symbol)` and identity elsewhere; qubit 0
/// is the least significant bit of the basis index.
pub fn op(n: usize, sites: &[(usize, char)]) -> M {
    let mut m = M::identity(1, 1);
    for q in (0..n).rev() {
        let ch = sites.iter().find(|(s, _)| *s == q).map(|(_, ch)| *ch).unwrap_or('I');
        m = m.kronecker(&one(ch));
    }
    m
}

/// Pauli string from a word like "XYZ" applied to `qubits` in order.
pub fn pauli(n: usize, qubits: &[usize], word: &str) -> M {
    let sites: Vec<(usize, char)> = qubits.iter().copied().zip(word.chars()).collect();
    op(n, &sites)
}

/// `Tr(P M) / 2^n`: the coefficient of Pauli string `P` in `M`.
pub fn coefficient(m: &M, p: &M) -> f64 {
    let d = m.nrows() as f64;
    let t = (p * m).trace() / d;
    assert!(t.im.abs() < 1e-12, "non-real Pauli coefficient {t}");
    t.re
}

/// `e^{−iθP}` for a Pauli string `P` (`P² = 1`).
pub fn exp_pauli(theta: f64, p: &M) -> M {
    let d = p.nrows();
    M::identity(d, d) * c(theta.cos(), 0.0) + p * c(0.0, -theta.sin())
}

/// `Π_k e^{−i dt c_k P_k}`, first factor applied first.
pub fn ordered_product(terms: &[(f64, M)], dt: f64) -> M {
    let d = terms[0].1.nrows();
    let mut u = M::identity(d, d);
    for (coef, p) in terms {
        u = exp_pauli(coef * dt, p) * u;
    }
    u
}

/// `e^{−iHt}` by scaling and squaring of a Taylor series.
pub fn expm(h: &M, t: f64) -> M {
    let d = h.nrows();
    let norm = h.norm() * t.abs();
    let squarings = (norm.max(1e-300).log2().ceil().max(0.0) as u32) + 4;
    let a = h * c(0.0, -t / f64::from(1u32 << squarings));
    let mut term = M::identity(d, d);
    let mut sum = M::identity(d, d);
    for k in 1..40 {
        term = &term * &a * c(1.0 / k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// `min_φ max_ij |a − e^{iφ} b|`, with `φ` aligned on the trace overlap.
pub fn dist_up_to_phase(a: &M, b: &M) -> f64 {
    let ov = (b.adjoint() * a).trace();
    let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { c(1.0, 0.0) };
    (a - b * phase).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Frobenius distance up to a global phase.
pub fn frob_up_to_phase(a: &M, b: &M) -> f64 {
    let ov = (b.adjoint() * a).trace();
    let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { c(1.0, 0.0) };
    (a - b * phase).norm()
}

pub fn to_m(d: &combsim::pauli::DenseOperator) -> M {
    d.matrix().clone()
}

/// `−h Σ X − Σ Z_i Z_{i+1} + b Σ Z` on a periodic chain.
pub fn ising_dense(nt: usize, h: f64, b: f64) -> M {
    let d = 1 << nt;
    let mut m = M::zeros(d, d);
    for i in 0..nt {
        m -= op(nt, &[(i, 'X')]) * c(h, 0.0);
        m -= op(nt, &[(i, 'Z'), ((i + 1) % nt, 'Z')]);
        m += op(nt, &[(i, 'Z')]) * c(b, 0.0);
    }
    m
}

/// Three-spin comb term `κ Σ_i φ_i (σ⁺_i σ⁻_{i+1} σ⁻_{i+2} + h.c.)` on `nc` qubits.
pub fn scrambler_dense(nc: usize, kappa: f64, phis: &[f64]) -> M {
    let d = 1 << nc;
    let mut m = M::zeros(d, d);
    for i in 0..nc {
        let t = op(nc, &[(i, '+'), ((i + 1) % nc, '-'), ((i + 2) % nc, '-')]);
        m += (&t + t.adjoint()) * c(kappa * phis[i], 0.0);
    }
    m
}

/// `ν Σ σ⁺σ⁻` on `nc` qubits.
pub fn number_dense(nc: usize, nu: f64) -> M {
    let d = 1 << nc;
    let mut m = M::zeros(d, d);
    for i in 0..nc {
        m += op(nc, &[(i, '+')]) * op(nc, &[(i, '-')]) * c(nu, 0.0);
    }
    m
}

/// `Σ_pairs (σ⁺_i + σ⁺_j + σ⁺_i σ⁺_j) + h.c.` on the cyclic comb.
pub fn comb_coupling_dense(nc: usize) -> M {
    let d = 1 << nc;
    let mut m = M::zeros(d, d);
    let pairs: Vec<(usize, usize)> = if nc == 2 { vec![(0, 1)] } else { (0..nc).map(|i| (i, (i + 1) % nc)).collect() };
    for (i, j) in pairs {
        for t in [op(nc, &[(i, '+')]), op(nc, &[(j, '+')]), op(nc, &[(i, '+'), (j, '+')])] {
            m += &t + t.adjoint();
        }
    }
    m
}

/// `A ⊗ B` with `A` on the low qubits.
pub fn low_high(a: &M, b: &M) -> M {
    b.kronecker(a)
}

pub fn max_abs(m: &M) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Terms of `h` over the listed Pauli strings, coefficients by projection.
pub fn terms_of(h: &M, strings: Vec<M>) -> Vec<(f64, M)> {
    strings.into_iter().map(|p| (coefficient(h, &p), p)).collect()
}

/// `Σ c_k P_k` plus the identity component must rebuild `h` exactly.
pub fn assert_complete(h: &M, terms: &[(f64, M)]) {
    let d = h.nrows();
    let mut sum = M::identity(d, d) * c(h.trace().re / d as f64, 0.0);
    for (coef, p) in terms {
        sum += p * c(*coef, 0.0);
    }
    assert!(max_abs(&(h - sum)) < 1e-12, "listed terms do not span the Hamiltonian");
}

pub fn target_terms(nt: usize, h: f64, b: f64) -> (M, Vec<(f64, M)>) {
    let ham = ising_dense(nt, h, b);
    let mut strings: Vec<M> = (0..nt).map(|q| pauli(nt, &[q], "X")).collect();
    strings.extend((0..nt).map(|i| pauli(nt, &[i, (i + 1) % nt], "ZZ")));
    if b != 0.0 {
        strings.extend((0..nt).map(|q| pauli(nt, &[q], "Z")));
    }
    let terms = terms_of(&ham, strings);
    (ham, terms)
}

pub fn sorted_triples(nc: usize) -> Vec<[usize; 3]> {
    let mut out: Vec<[usize; 3]> = Vec::new();
    for i in 0..nc {
        let mut t = [i, (i + 1) % nc, (i + 2) % nc];
        t.sort_unstable();
        if !out.contains(&t) {
            out.push(t);
        }
    }
    out
}

pub fn comb_terms(nc: usize, nu: f64, kappa: f64, phis: &[f64]) -> (M, Vec<(f64, M)>) {
    let ham = number_dense(nc, nu) + scrambler_dense(nc, kappa, phis);
    let mut strings: Vec<M> = (0..nc).map(|q| pauli(nc, &[q], "Z")).collect();
    for t in sorted_triples(nc) {
        for w in ["XXX", "XYY", "YXY", "YYX"] {
            strings.push(pauli(nc, &t, w));
        }
    }
    let terms = terms_of(&ham, strings);
    (ham, terms)
}

pub fn interaction_terms(nt: usize, nc: usize, h: f64, g: f64) -> (M, Vec<(f64, M)>) {
    let n = nt + nc;
    let d = 1 << nt;
    let mut a = M::zeros(d, d);
    for q in 0..nt {
        a -= op(nt, &[(q, 'X')]) * c(h, 0.0);
    }
    let ham = low_high(&a, &comb_coupling_dense(nc)) * c(g, 0.0);
    let mut strings = Vec::new();
    for i in 0..nc {
        for j in 0..nt {
            strings.push(pauli(n, &[j, nt + i], "XX"));
        }
    }
    for i in 0..nc {
        let k = (i + 1) % nc;
        for w in ["XXX", "XYY"] {
            for j in 0..nt {
                strings.push(pauli(n, &[j, nt + i, nt + k], w));
            }
        }
    }
    let terms = terms_of(&ham, strings);
    (ham, terms)
}

pub fn unitary(c: &Circuit) -> M {
    to_m(&circuit_unitary(c).unwrap())
}

/// Error of one full Trotter step against `e^{−iHδt}`, with `ν` frozen at `t`.
pub fn step_error(dt: f64) -> f64 {
    let (nt, nc) = (3, 3);
    let (h, b, g) = (0.8, 0.3, 0.3);
    let (nu0, tf, t, kappa) = (3.0, 10.0, 2.5, 0.4);
    let phis = vec![0.9, 1.2, 0.7];
    let nu = nu0 * (1.0 - t / tf);
    let (targ, _) = target_terms(nt, h, b);
    let (comb, _) = comb_terms(nc, nu, kappa, &phis);
    let (int, _) = interaction_terms(nt, nc, h, g);
    let ham = low_high(&targ, &M::identity(1 << nc, 1 << nc)) + low_high(&M::identity(1 << nt, 1 << nt), &comb) + int;
    let circ = trotter_step_circuit(
        &IsingParams::new(nt, h).with_field(b),
        &CombParams::new(nc, nu0, kappa, phis, tf).unwrap(),
        &InteractionParams { g, mode: CouplingMode::OneBodyX },
        t,
        dt,
        true,
    )
    .unwrap();
    frob_up_to_phase(&unitary(&circ), &expm(&ham, dt))
}
