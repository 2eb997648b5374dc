//! Wavefunction storage, gate kernels, measurement and reset.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{DenseOperator, ONE, ZERO};

/// Random stream used for state sampling and measurements.
pub type SimRng = ChaCha8Rng;

/// Generator for `(seed, stream)`; distinct streams are independent.
pub fn seeded_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub type Gate1 = [[C64; 2]; 2];
pub type Gate2 = [[C64; 4]; 4];

const NORM_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    nqubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero(nqubits: usize) -> Self {
        Self::basis(nqubits, 0)
    }

    pub fn basis(nqubits: usize, index: usize) -> Self {
        assert!(index < 1 << nqubits, "basis index {index} out of range");
        let mut amps = vec![ZERO; 1 << nqubits];
        amps[index] = ONE;
        Self { nqubits, amps }
    }

    /// Normalizes the given amplitudes.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let d = amps.len();
        if d == 0 || !d.is_power_of_two() {
            return Err(Error::InvalidParameter(format!("amplitude count {d} is not a power of two")));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroNormProjection);
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(Self { nqubits: d.trailing_zeros() as usize, amps })
    }

    pub fn nqubits(&self) -> usize {
        self.nqubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.nqubits {
            return Err(Error::QubitOutOfRange { qubit: q, nqubits: self.nqubits });
        }
        Ok(())
    }

    pub fn apply_1q(&mut self, gate: &Gate1, q: usize) -> Result<()> {
        self.check_qubit(q)?;
        let defect = unitarity_defect(gate.iter().map(|r| r.as_slice()));
        if defect > NORM_TOL {
            return Err(Error::NonUnitary { deviation: defect });
        }
        self.apply_1q_unchecked(gate, q);
        Ok(())
    }

    pub(crate) fn apply_1q_unchecked(&mut self, g: &Gate1, q: usize) {
        let m = 1 << q;
        for i in 0..self.amps.len() {
            if i & m == 0 {
                let a = self.amps[i];
                let b = self.amps[i | m];
                self.amps[i] = g[0][0] * a + g[0][1] * b;
                self.amps[i | m] = g[1][0] * a + g[1][1] * b;
            }
        }
    }

    pub(crate) fn apply_diag_1q(&mut self, d0: C64, d1: C64, q: usize) {
        let m = 1 << q;
        for (i, a) in self.amps.iter_mut().enumerate() {
            *a *= if i & m == 0 { d0 } else { d1 };
        }
    }

    pub(crate) fn apply_cnot(&mut self, control: usize, target: usize) {
        let mc = 1 << control;
        let mt = 1 << target;
        for i in 0..self.amps.len() {
            if i & mc != 0 && i & mt == 0 {
                self.amps.swap(i, i | mt);
            }
        }
    }

    pub(crate) fn apply_swap(&mut self, a: usize, b: usize) {
        let ma = 1 << a;
        let mb = 1 << b;
        for i in 0..self.amps.len() {
            if i & ma != 0 && i & mb == 0 {
                self.amps.swap(i, (i & !ma) | mb);
            }
        }
    }

    pub(crate) fn apply_x(&mut self, q: usize) {
        let m = 1 << q;
        for i in 0..self.amps.len() {
            if i & m == 0 {
                self.amps.swap(i, i | m);
            }
        }
    }

    /// Two-qubit gate; the gate's row index is `2·bit(q1) + bit(q2)`, so for a
    /// CNOT `q1` is the control.
    pub fn apply_2q(&mut self, gate: &Gate2, q1: usize, q2: usize) -> Result<()> {
        self.check_qubit(q1)?;
        self.check_qubit(q2)?;
        if q1 == q2 {
            return Err(Error::InvalidParameter(format!("two-qubit gate on repeated qubit {q1}")));
        }
        let defect = unitarity_defect(gate.iter().map(|r| r.as_slice()));
        if defect > NORM_TOL {
            return Err(Error::NonUnitary { deviation: defect });
        }
        let m1 = 1 << q1;
        let m2 = 1 << q2;
        for i in 0..self.amps.len() {
            if i & (m1 | m2) == 0 {
                let idx = [i, i | m2, i | m1, i | m1 | m2];
                let v = idx.map(|k| self.amps[k]);
                for (r, &k) in idx.iter().enumerate() {
                    self.amps[k] = (0..4).map(|c| gate[r][c] * v[c]).sum();
                }
            }
        }
        Ok(())
    }

    /// Applies `u` to the listed qubits (`u`'s bit `j` acts on `qubits[j]`).
    pub fn apply_dense(&mut self, u: &DenseOperator, qubits: &[usize]) -> Result<()> {
        if u.nqubits() != qubits.len() {
            return Err(Error::DimensionMismatch { expected: 1 << qubits.len(), found: u.dim() });
        }
        for &q in qubits {
            self.check_qubit(q)?;
        }
        if !u.is_unitary(NORM_TOL) {
            return Err(Error::NonUnitary { deviation: u.unitarity_defect() });
        }
        if qubits.iter().enumerate().all(|(j, &q)| j == q) && qubits.len() == self.nqubits {
            self.apply_full_unchecked(u);
            return Ok(());
        }
        let sub = u.dim();
        let mask: usize = qubits.iter().fold(0, |m, &q| m | (1 << q));
        let scatter = |base: usize, local: usize| -> usize {
            qubits.iter().enumerate().fold(base, |idx, (j, &q)| if local >> j & 1 == 1 { idx | (1 << q) } else { idx })
        };
        let mut buf = vec![ZERO; sub];
        for base in 0..self.amps.len() {
            if base & mask != 0 {
                continue;
            }
            for (l, b) in buf.iter_mut().enumerate() {
                *b = self.amps[scatter(base, l)];
            }
            let out = u.apply(&buf);
            for (l, v) in out.into_iter().enumerate() {
                self.amps[scatter(base, l)] = v;
            }
        }
        Ok(())
    }

    pub(crate) fn apply_full_unchecked(&mut self, u: &DenseOperator) {
        self.amps = u.apply(&self.amps);
    }

    /// Born-rule measurement of `qubits` in the computational basis.
    pub fn measure_subset(&mut self, qubits: &[usize], rng: &mut impl Rng) -> Result<MeasurementRecord> {
        for (k, &q) in qubits.iter().enumerate() {
            self.check_qubit(q)?;
            if qubits[..k].contains(&q) {
                return Err(Error::InvalidParameter(format!("qubit {q} listed twice for measurement")));
            }
        }
        let outcome_of =
            |i: usize| -> usize { qubits.iter().enumerate().fold(0, |o, (j, &q)| o | ((i >> q & 1) << j)) };
        let mut probs = vec![0.0; 1 << qubits.len()];
        for (i, a) in self.amps.iter().enumerate() {
            probs[outcome_of(i)] += a.norm_sqr();
        }
        let total: f64 = probs.iter().sum();
        let u: f64 = rng.random::<f64>() * total;
        let mut acc = 0.0;
        // lowest bin whose cumulative upper edge reaches the draw
        let mut chosen = probs.iter().rposition(|&p| p > 0.0).ok_or(Error::ZeroNormProjection)?;
        for (k, &p) in probs.iter().enumerate() {
            acc += p;
            if p > 0.0 && u <= acc {
                chosen = k;
                break;
            }
        }
        let p = probs[chosen] / total;
        if !(p > 0.0) {
            return Err(Error::ZeroNormProjection);
        }
        let scale = 1.0 / probs[chosen].sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if outcome_of(i) == chosen {
                *a *= scale;
            } else {
                *a = ZERO;
            }
        }
        Ok(MeasurementRecord {
            qubits: qubits.to_vec(),
            outcome: (0..qubits.len()).map(|j| (chosen >> j & 1) as u8).collect(),
            probability: p,
        })
    }

    /// Flips every measured qubit that came out `1`, returning those qubits to `|0⟩`.
    pub fn reset_down(&mut self, qubits: &[usize], record: &MeasurementRecord) -> Result<()> {
        if record.qubits != qubits {
            return Err(Error::StaleRecord);
        }
        for (&q, &bit) in qubits.iter().zip(&record.outcome) {
            if bit == 1 {
                self.check_qubit(q)?;
                self.apply_x(q);
            }
        }
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.overlap(other)?.norm_sqr())
    }

    /// `Re⟨ψ|H|ψ⟩`.
    pub fn expectation(&self, h: &DenseOperator) -> Result<f64> {
        if h.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: h.dim() });
        }
        let hv = h.apply(&self.amps);
        Ok(self.amps.iter().zip(&hv).map(|(a, b)| (a.conj() * b).re).sum())
    }

    /// Amplitude block of comb configuration `c`, indexed by the `nt` low target bits.
    pub fn target_block(&self, nt: usize, c: usize) -> &[C64] {
        let d = 1 << nt;
        &self.amps[c * d..(c + 1) * d]
    }

    /// `Σ_c |⟨v, c|ψ⟩|²`: population of target vector `v` with the comb traced out.
    pub fn reduced_population(&self, nt: usize, v: &[C64]) -> f64 {
        let d = 1 << nt;
        assert_eq!(v.len(), d);
        self.amps
            .chunks_exact(d)
            .map(|block| block.iter().zip(v).map(|(a, b)| b.conj() * a).sum::<C64>().norm_sqr())
            .sum()
    }

    /// `Tr(ρ_target H)` for an operator acting on the low `nt` qubits.
    pub fn target_expectation(&self, h: &DenseOperator) -> f64 {
        let d = h.dim();
        self.amps
            .chunks_exact(d)
            .map(|block| {
                let hb = h.apply(block);
                block.iter().zip(&hb).map(|(a, b)| (a.conj() * b).re).sum::<f64>()
            })
            .sum()
    }

    /// Probability that any of the high `nc` comb qubits is excited.
    pub fn comb_excitation_probability(&self, nt: usize) -> f64 {
        let d = 1 << nt;
        self.amps[d..].iter().map(|a| a.norm_sqr()).sum()
    }
}

/// `target ⊗ |0…0⟩` with the comb on the high qubits.
pub fn init_comb_product(target: &StateVector, nc: usize) -> StateVector {
    let mut amps = vec![ZERO; target.dim() << nc];
    amps[..target.dim()].copy_from_slice(&target.amps);
    StateVector { nqubits: target.nqubits + nc, amps }
}

/// Haar-random state: complex standard-normal entries, normalized.
pub fn random_target_state(nt: usize, rng: &mut impl Rng) -> StateVector {
    loop {
        let amps: Vec<C64> =
            (0..1usize << nt).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
        if let Ok(s) = StateVector::from_amplitudes(amps) {
            return s;
        }
    }
}

/// Outcome of a projective measurement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub qubits: Vec<usize>,
    /// One bit per entry of `qubits`.
    pub outcome: Vec<u8>,
    pub probability: f64,
}

impl MeasurementRecord {
    pub fn bitstring(&self) -> String {
        self.outcome.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect()
    }

    pub fn excitations(&self) -> usize {
        self.outcome.iter().filter(|&&b| b == 1).count()
    }
}

fn unitarity_defect<'a>(rows: impl Iterator<Item = &'a [C64]> + Clone) -> f64 {
    let m: Vec<&[C64]> = rows.collect();
    let d = m.len();
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let s: C64 = (0..d).map(|k| m[k][i].conj() * m[k][j]).sum();
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((s - target).norm());
        }
    }
    worst
}

pub mod gates {
    //! Standard single- and two-qubit gate matrices.
    use super::{Gate1, Gate2, C64};
    use crate::pauli::{I, ONE, ZERO};

    pub fn h() -> Gate1 {
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        [[s, s], [s, -s]]
    }

    pub fn x() -> Gate1 {
        [[ZERO, ONE], [ONE, ZERO]]
    }

    pub fn s() -> Gate1 {
        [[ONE, ZERO], [ZERO, I]]
    }

    pub fn sdg() -> Gate1 {
        [[ONE, ZERO], [ZERO, -I]]
    }

    /// `diag(e^{−iθ}, e^{iθ}) = e^{−iθZ}`.
    pub fn rz(theta: f64) -> Gate1 {
        [[C64::from_polar(1.0, -theta), ZERO], [ZERO, C64::from_polar(1.0, theta)]]
    }

    pub fn cnot() -> Gate2 {
        [[ONE, ZERO, ZERO, ZERO], [ZERO, ONE, ZERO, ZERO], [ZERO, ZERO, ZERO, ONE], [ZERO, ZERO, ONE, ZERO]]
    }

    pub fn swap() -> Gate2 {
        [[ONE, ZERO, ZERO, ZERO], [ZERO, ZERO, ONE, ZERO], [ZERO, ONE, ZERO, ZERO], [ZERO, ZERO, ZERO, ONE]]
    }
}
