//! Gate-level first-order Trotter circuits for the target, comb and
//! interaction propagators, plus their closed-form gate tallies.
//!
//! Every block is a basis change around a CNOT ladder that funnels a Pauli
//! string's parity onto one qubit, where a single `Rz(θ) = e^{−iθZ}` applies
//! the phase. Rotation angles are read off the Pauli expansion of the
//! Hamiltonian being propagated, so a block realizes `e^{−iδt·c·P}` for the
//! term `c·P`. SWAPs are never emitted: connectivity is assumed all-to-all.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{
    comb_coupling_sum, comb_pairs, comb_scrambler, comb_triples, coupling_operator, ising_hamiltonian, nu_schedule,
    CombParams, CouplingMode, InteractionParams, IsingParams,
};
use crate::pauli::{DenseOperator, PauliAxis, PauliString, WeightedPauliSum};
use crate::statevector::{gates, StateVector};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    H(usize),
    S(usize),
    Sdg(usize),
    /// `diag(e^{−iθ}, e^{iθ})`.
    Rz(usize, f64),
    Cnot {
        control: usize,
        target: usize,
    },
    Swap(usize, usize),
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::S(q) | Gate::Sdg(q) | Gate::Rz(q, _) => vec![q],
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Swap(a, b) => vec![a, b],
        }
    }

    pub fn is_rotation(&self) -> bool {
        matches!(self, Gate::Rz(..))
    }

    fn shifted(self, offset: usize) -> Gate {
        match self {
            Gate::H(q) => Gate::H(q + offset),
            Gate::S(q) => Gate::S(q + offset),
            Gate::Sdg(q) => Gate::Sdg(q + offset),
            Gate::Rz(q, t) => Gate::Rz(q + offset, t),
            Gate::Cnot { control, target } => Gate::Cnot { control: control + offset, target: target + offset },
            Gate::Swap(a, b) => Gate::Swap(a + offset, b + offset),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::H(q) => write!(f, "H {q}"),
            Gate::S(q) => write!(f, "S {q}"),
            Gate::Sdg(q) => write!(f, "SDG {q}"),
            Gate::Rz(q, t) => write!(f, "RZ {q} {t:.17e}"),
            Gate::Cnot { control, target } => write!(f, "CNOT {control} {target}"),
            Gate::Swap(a, b) => write!(f, "SWAP {a} {b}"),
        }
    }
}

impl FromStr for Gate {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let mut it = line.split_whitespace();
        let kind = it.next().ok_or_else(|| Error::Parse("empty gate line".into()))?;
        let mut qubit = || -> Result<usize> {
            it.next()
                .ok_or_else(|| Error::Parse(format!("missing operand in `{line}`")))?
                .parse()
                .map_err(|e| Error::Parse(format!("bad qubit index in `{line}`: {e}")))
        };
        let gate = match kind {
            "H" => Gate::H(qubit()?),
            "S" => Gate::S(qubit()?),
            "SDG" => Gate::Sdg(qubit()?),
            "CNOT" => Gate::Cnot { control: qubit()?, target: qubit()? },
            "SWAP" => Gate::Swap(qubit()?, qubit()?),
            "RZ" => {
                let q = qubit()?;
                let theta = line
                    .split_whitespace()
                    .nth(2)
                    .ok_or_else(|| Error::Parse(format!("missing angle in `{line}`")))?
                    .parse()
                    .map_err(|e| Error::Parse(format!("bad angle in `{line}`: {e}")))?;
                Gate::Rz(q, theta)
            }
            other => return Err(Error::Parse(format!("unknown gate `{other}`"))),
        };
        Ok(gate)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    nqubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(nqubits: usize) -> Self {
        Self { nqubits, gates: Vec::new() }
    }

    pub fn nqubits(&self) -> usize {
        self.nqubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn rotation_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_rotation()).count()
    }

    pub fn push(&mut self, g: Gate) {
        debug_assert!(g.qubits().iter().all(|&q| q < self.nqubits), "gate {g} outside register");
        self.gates.push(g);
    }

    /// Appends `other` with its qubits shifted up by `offset`.
    pub fn append_shifted(&mut self, other: &Circuit, offset: usize) {
        assert!(other.nqubits + offset <= self.nqubits);
        self.gates.extend(other.gates.iter().map(|g| g.shifted(offset)));
    }

    /// Plain-text dump, one gate per line: `KIND q0 [q1] [theta]`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }

    pub fn parse_dump(nqubits: usize, text: &str) -> Result<Self> {
        let mut c = Circuit::new(nqubits);
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let g: Gate = line.parse()?;
            if let Some(&q) = g.qubits().iter().find(|&&q| q >= nqubits) {
                return Err(Error::QubitOutOfRange { qubit: q, nqubits });
            }
            c.gates.push(g);
        }
        Ok(c)
    }

    fn basis_in(&mut self, q: usize, axis: PauliAxis) {
        match axis {
            PauliAxis::X => self.push(Gate::H(q)),
            // S† then H maps Y onto Z
            PauliAxis::Y => {
                self.push(Gate::Sdg(q));
                self.push(Gate::H(q));
            }
            _ => {}
        }
    }

    fn basis_out(&mut self, q: usize, axis: PauliAxis) {
        match axis {
            PauliAxis::X => self.push(Gate::H(q)),
            PauliAxis::Y => {
                self.push(Gate::H(q));
                self.push(Gate::S(q));
            }
            _ => {}
        }
    }

    /// `e^{−iθ Z_{q0} ⋯ Z_{qk}}` via a CNOT ladder ending on the last qubit.
    fn parity_rotation(&mut self, chain: &[usize], theta: f64) {
        for w in chain.windows(2) {
            self.push(Gate::Cnot { control: w[0], target: w[1] });
        }
        self.push(Gate::Rz(*chain.last().expect("non-empty chain"), theta));
        for w in chain.windows(2).rev() {
            self.push(Gate::Cnot { control: w[0], target: w[1] });
        }
    }
}

/// `e^{−iδt H_targ}`: one `H·Rz·H` per transverse-field term, one
/// `CNOT·Rz·CNOT` per bond, and one `Rz` per site for the longitudinal field
/// when `b ≠ 0`.
pub fn target_step_circuit(p: &IsingParams, dt: f64) -> Circuit {
    target_step_circuit_opts(p, dt, p.b != 0.0)
}

/// As [`target_step_circuit`], with the longitudinal-field layer forced on or
/// off (a swept field passes through zero but keeps its gates).
pub fn target_step_circuit_opts(p: &IsingParams, dt: f64, field_layer: bool) -> Circuit {
    let h = ising_hamiltonian(&p.clone().with_field(0.0));
    let mut c = Circuit::new(p.nt);
    for q in 0..p.nt {
        let coef = h.coefficient(&PauliString::from_sites(p.nt, &[(q, PauliAxis::X)]));
        c.push(Gate::H(q));
        c.push(Gate::Rz(q, coef * dt));
        c.push(Gate::H(q));
    }
    for (i, j) in p.bonds() {
        let (a, b) = (i.min(j), i.max(j));
        // a doubled bond (nt = 2, periodic) is split evenly across its two entries
        let coef = h.coefficient(&PauliString::from_sites(p.nt, &[(a, PauliAxis::Z), (b, PauliAxis::Z)]))
            / bond_multiplicity(p, a, b) as f64;
        c.parity_rotation(&[a, b], coef * dt);
    }
    if field_layer {
        for q in 0..p.nt {
            c.push(Gate::Rz(q, p.b * dt));
        }
    }
    c
}

fn bond_multiplicity(p: &IsingParams, a: usize, b: usize) -> usize {
    p.bonds().iter().filter(|&&(i, j)| (i.min(j), i.max(j)) == (a, b)).count()
}

/// The four three-spin patterns a cyclic triple expands into, in circuit order.
const TRIPLE_PATTERNS: [[PauliAxis; 3]; 4] = {
    use PauliAxis::{X, Y};
    [[X, X, X], [X, Y, Y], [Y, X, Y], [Y, Y, X]]
};

/// Site triples carrying three-body comb terms, each sorted ascending.
fn scrambler_blocks(nc: usize) -> Vec<[usize; 3]> {
    let mut blocks: Vec<[usize; 3]> = Vec::new();
    for (a, b, c) in comb_triples(nc) {
        let mut t = [a, b, c];
        t.sort_unstable();
        if !blocks.contains(&t) {
            blocks.push(t);
        }
    }
    blocks
}

/// `e^{−iδt H_comb(t)}` on `nc` qubits: a `Rz` per site for the swept level
/// spacing, then one 46-gate block per distinct site triple of the
/// three-spin term (a single block when `nc = 3`).
pub fn comb_step_circuit(p: &CombParams, t: f64, dt: f64) -> Result<Circuit> {
    p.validate()?;
    let nu = nu_schedule(p.nu0, p.tf, t)?;
    let scr = comb_scrambler(p);
    let mut c = Circuit::new(p.nc);
    // ν σ⁺σ⁻ = ν/2 − (ν/2) Z; the constant is a global phase
    for q in 0..p.nc {
        c.push(Gate::Rz(q, -0.5 * nu * dt));
    }
    for [a, b, q] in scrambler_blocks(p.nc) {
        let theta = |pat: [PauliAxis; 3]| {
            dt * scr.coefficient(&PauliString::from_sites(p.nc, &[(a, pat[0]), (b, pat[1]), (q, pat[2])]))
        };
        let sites = [a, b, q];
        let mut current = [PauliAxis::I; 3];
        for pat in TRIPLE_PATTERNS {
            for k in 0..3 {
                if current[k] != pat[k] {
                    c.basis_out(sites[k], current[k]);
                    c.basis_in(sites[k], pat[k]);
                    current[k] = pat[k];
                }
            }
            c.parity_rotation(&sites, theta(pat));
        }
        for k in 0..3 {
            c.basis_out(sites[k], current[k]);
        }
    }
    Ok(c)
}

/// `e^{−iδt H_int}` on `nt + nc` qubits for the one-body coupling
/// `A = −h Σ X`: per comb site an `A₁` block (`X_j X_c` terms), then per comb
/// pair an `A₂⁺` block (`X_j X_c X_c'`) and an `A₂⁻` block (`X_j Y_c Y_c'`).
pub fn interaction_step_circuit(ip: &InteractionParams, p: &IsingParams, nc: usize, dt: f64) -> Result<Circuit> {
    if let CouplingMode::RandomPattern { .. } = ip.mode {
        return Err(Error::UnsupportedCoupling(ip.mode.to_string()));
    }
    let nt = p.nt;
    let n = nt + nc;
    let a = coupling_operator(ip.mode, p);
    let a = a.as_pauli().expect("one-body coupling is a Pauli sum");
    let hint = a.scaled(ip.g).tensor(&comb_coupling_sum(nc));
    let coef = |sites: &[(usize, PauliAxis)]| hint.coefficient(&PauliString::from_sites(n, sites));
    let mut c = Circuit::new(n);
    let targets: Vec<usize> = (0..nt).collect();

    let coupled_block = |c: &mut Circuit, comb: &[(usize, PauliAxis)]| {
        for &(q, axis) in comb {
            c.basis_in(q, axis);
        }
        for &j in &targets {
            c.push(Gate::H(j));
        }
        for &j in &targets {
            let mut sites = vec![(j, PauliAxis::X)];
            sites.extend_from_slice(comb);
            let mut chain = vec![j];
            chain.extend(comb.iter().map(|&(q, _)| q));
            c.parity_rotation(&chain, dt * coef(&sites));
        }
        for &j in &targets {
            c.push(Gate::H(j));
        }
        for &(q, axis) in comb {
            c.basis_out(q, axis);
        }
    };

    for i in 0..nc {
        coupled_block(&mut c, &[(nt + i, PauliAxis::X)]);
    }
    for (i, j) in comb_pairs(nc) {
        let (ci, cj) = (nt + i, nt + j);
        coupled_block(&mut c, &[(ci, PauliAxis::X), (cj, PauliAxis::X)]);
        coupled_block(&mut c, &[(ci, PauliAxis::Y), (cj, PauliAxis::Y)]);
    }
    Ok(c)
}

/// One full first-order Trotter step starting at time `t`:
/// target, then comb, then interaction.
pub fn trotter_step_circuit(
    ising: &IsingParams,
    comb: &CombParams,
    ip: &InteractionParams,
    t: f64,
    dt: f64,
    field_layer: bool,
) -> Result<Circuit> {
    let nt = ising.nt;
    let nc = comb.nc;
    let mut c = Circuit::new(nt + nc);
    c.append_shifted(&target_step_circuit_opts(ising, dt, field_layer), 0);
    c.append_shifted(&comb_step_circuit(comb, t, dt)?, nt);
    c.append_shifted(&interaction_step_circuit(ip, ising, nc, dt)?, 0);
    Ok(c)
}

/// Applies the gates left to right.
pub fn run_circuit(c: &Circuit, s: &mut StateVector) -> Result<()> {
    if c.nqubits != s.nqubits() {
        return Err(Error::DimensionMismatch { expected: 1 << c.nqubits, found: s.dim() });
    }
    let h = gates::h();
    let s_gate = gates::s();
    let sdg = gates::sdg();
    for g in &c.gates {
        match *g {
            Gate::H(q) => s.apply_1q_unchecked(&h, q),
            Gate::S(q) => s.apply_diag_1q(s_gate[0][0], s_gate[1][1], q),
            Gate::Sdg(q) => s.apply_diag_1q(sdg[0][0], sdg[1][1], q),
            Gate::Rz(q, theta) => {
                let rz = gates::rz(theta);
                s.apply_diag_1q(rz[0][0], rz[1][1], q)
            }
            Gate::Cnot { control, target } => s.apply_cnot(control, target),
            Gate::Swap(a, b) => s.apply_swap(a, b),
        }
    }
    Ok(())
}

/// Largest register [`circuit_unitary`] will densify.
pub const MAX_DENSE_QUBITS: usize = 8;

/// Ordered product of the circuit's gates as a dense matrix.
pub fn circuit_unitary(c: &Circuit) -> Result<DenseOperator> {
    if c.nqubits > MAX_DENSE_QUBITS {
        return Err(Error::TooLarge(c.nqubits));
    }
    let d = 1usize << c.nqubits;
    let mut m = nalgebra::DMatrix::zeros(d, d);
    for col in 0..d {
        let mut s = StateVector::basis(c.nqubits, col);
        run_circuit(c, &mut s)?;
        for (row, a) in s.amplitudes().iter().enumerate() {
            m[(row, col)] = *a;
        }
    }
    DenseOperator::from_matrix(m)
}

/// Gates and rotations in one part of a step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Tally {
    pub gates: usize,
    pub rotations: usize,
}

impl std::ops::Add for Tally {
    type Output = Tally;
    fn add(self, rhs: Tally) -> Tally {
        Tally { gates: self.gates + rhs.gates, rotations: self.rotations + rhs.rotations }
    }
}

/// Per-step resource count, split by propagator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCount {
    pub total: usize,
    pub rotations: usize,
    pub target: Tally,
    pub comb: Tally,
    pub interaction: Tally,
}

impl GateCount {
    fn from_parts(target: Tally, comb: Tally, interaction: Tally) -> Self {
        let sum = target + comb + interaction;
        Self { total: sum.gates, rotations: sum.rotations, target, comb, interaction }
    }
}

/// Closed-form per-step tally (SWAPs excluded).
pub fn gate_count(nt: usize, nc: usize, with_b: bool) -> GateCount {
    let field = if with_b { nt } else { 0 };
    let target = Tally { gates: 6 * nt + field, rotations: 2 * nt + field };
    let blocks = if nc == 3 { 1 } else { nc };
    let comb = Tally { gates: nc + 46 * blocks, rotations: nc + 4 * blocks };
    let interaction = Tally { gates: nc * (5 * nt + 2 * (7 * nt) + 14), rotations: nc * 3 * nt };
    GateCount::from_parts(target, comb, interaction)
}

/// Tally obtained by enumerating the built circuits.
pub fn enumerated_gate_count(nt: usize, nc: usize, with_b: bool) -> Result<GateCount> {
    let ising = IsingParams { nt, h: 1.0, b: if with_b { 1.0 } else { 0.0 }, periodic: true };
    let comb = CombParams::new(nc, 1.0, 0.1, vec![1.0; nc], 1.0)?;
    let ip = InteractionParams { g: 0.1, mode: CouplingMode::OneBodyX };
    let tally = |c: &Circuit| Tally { gates: c.len(), rotations: c.rotation_count() };
    Ok(GateCount::from_parts(
        tally(&target_step_circuit_opts(&ising, 0.1, with_b)),
        tally(&comb_step_circuit(&comb, 0.0, 0.1)?),
        tally(&interaction_step_circuit(&ip, &ising, nc, 0.1)?),
    ))
}

/// Product of exact term exponentials `e^{−iδt c_k P_k}` in the given order,
/// used to check circuits block by block.
pub fn ordered_term_product(terms: &[(f64, PauliString)], dt: f64) -> DenseOperator {
    let n = terms.first().map(|(_, s)| s.nqubits()).unwrap_or(0);
    let mut u = DenseOperator::identity(n);
    for (c, s) in terms {
        // e^{−iθP} = cos θ − i sin θ P for any Pauli string
        let theta = c * dt;
        let p = s.matrix();
        let step = DenseOperator::identity(n)
            .scaled(theta.cos())
            .checked_add(&p.scaled_complex(num_complex::Complex64::new(0.0, -theta.sin())))
            .expect("same size");
        u = step.matmul(&u);
    }
    u
}

/// Terms of a Pauli sum, identity dropped.
pub fn non_identity_terms(h: &WeightedPauliSum) -> Vec<(f64, PauliString)> {
    h.terms().filter(|(_, s)| !s.is_identity()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::expm_hermitian;

    #[test]
    fn closed_form_counts() {
        assert_eq!(gate_count(3, 3, true).total, 283);
        assert_eq!(gate_count(4, 3, true).total, 347);
        let g = gate_count(3, 3, false);
        assert_eq!(g.rotations, 40);
        assert_eq!((g.target.rotations, g.comb.rotations, g.interaction.rotations), (6, 7, 27));
        assert_eq!(g.interaction.gates, 213);
        assert_eq!(g.comb.gates, 49);
    }

    #[test]
    fn target_counts() {
        let p = IsingParams::new(3, 1.0);
        let c = target_step_circuit(&p, 0.1);
        assert_eq!((c.len(), c.rotation_count()), (18, 6));
        assert_eq!(target_step_circuit(&p.clone().with_field(0.5), 0.1).len(), 21);
        assert_eq!(target_step_circuit(&IsingParams::new(4, 1.0).with_field(0.5), 0.1).len(), 28);
    }

    #[test]
    fn random_coupling_rejected() {
        let ip = InteractionParams { g: 0.1, mode: CouplingMode::RandomPattern { seed: 1 } };
        assert!(matches!(
            interaction_step_circuit(&ip, &IsingParams::new(3, 1.0), 3, 0.1),
            Err(Error::UnsupportedCoupling(_))
        ));
    }

    #[test]
    fn empty_and_hh_circuits() {
        let s0 = crate::statevector::random_target_state(2, &mut crate::statevector::seeded_rng(1, 0));
        let mut s = s0.clone();
        run_circuit(&Circuit::new(2), &mut s).unwrap();
        assert_eq!(s, s0);
        let mut hh = Circuit::new(2);
        hh.push(Gate::H(0));
        hh.push(Gate::H(0));
        run_circuit(&hh, &mut s).unwrap();
        assert!(s.fidelity(&s0).unwrap() > 1.0 - 1e-14);
    }

    #[test]
    fn cnot_unitary_matches_textbook() {
        // control is the gate's high bit in the textbook matrix
        let mut c = Circuit::new(2);
        c.push(Gate::Cnot { control: 1, target: 0 });
        let u = circuit_unitary(&c).unwrap();
        let perm = [0, 1, 3, 2];
        for (col, &row) in perm.iter().enumerate() {
            assert!((u.get(row, col).re - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn cnot_rz_cnot_is_zz_rotation() {
        let theta = 0.37;
        let mut c = Circuit::new(2);
        c.parity_rotation(&[0, 1], theta);
        let u = circuit_unitary(&c).unwrap();
        let zz: PauliString = "ZZ".parse().unwrap();
        let exact = expm_hermitian(&zz.matrix(), theta).unwrap();
        assert!(u.max_abs_diff(&exact) < 1e-12);
    }

    #[test]
    fn hadamard_conjugated_rz_is_x_rotation() {
        let theta = -0.81;
        let mut c = Circuit::new(1);
        c.push(Gate::H(0));
        c.push(Gate::Rz(0, theta));
        c.push(Gate::H(0));
        let x: PauliString = "X".parse().unwrap();
        let exact = expm_hermitian(&x.matrix(), theta).unwrap();
        assert!(circuit_unitary(&c).unwrap().max_abs_diff(&exact) < 1e-12);
    }

    #[test]
    fn too_large_to_densify() {
        assert!(matches!(circuit_unitary(&Circuit::new(9)), Err(Error::TooLarge(9))));
    }

    #[test]
    fn dump_format() {
        let mut c = Circuit::new(3);
        c.push(Gate::H(0));
        c.push(Gate::Cnot { control: 0, target: 2 });
        c.push(Gate::Rz(2, 0.25));
        c.push(Gate::Sdg(1));
        let text = c.dump();
        assert!(text.starts_with("H 0\nCNOT 0 2\nRZ 2 2.5"));
        assert_eq!(Circuit::parse_dump(3, &text).unwrap(), c);
        assert!(Circuit::parse_dump(2, &text).is_err());
        assert!("FOO 1".parse::<Gate>().is_err());
    }
}
