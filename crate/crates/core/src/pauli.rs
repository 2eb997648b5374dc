//! Pauli-string algebra, dense operators, and Hermitian spectral tools.
//!
//! Qubit 0 is the least-significant bit of a basis index. Pauli strings are
//! written with qubit 0 as the leftmost character, so `"XZ"` is `X` on qubit 0
//! and `Z` on qubit 1.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Single-qubit Pauli operator.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliAxis {
    I,
    X,
    Y,
    Z,
}

impl PauliAxis {
    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => PauliAxis::I,
            (true, false) => PauliAxis::X,
            (true, true) => PauliAxis::Y,
            (false, true) => PauliAxis::Z,
        }
    }

    fn x_bit(self) -> bool {
        matches!(self, PauliAxis::X | PauliAxis::Y)
    }

    fn z_bit(self) -> bool {
        matches!(self, PauliAxis::Z | PauliAxis::Y)
    }

    pub fn matrix(self) -> [[C64; 2]; 2] {
        match self {
            PauliAxis::I => [[ONE, ZERO], [ZERO, ONE]],
            PauliAxis::X => [[ZERO, ONE], [ONE, ZERO]],
            PauliAxis::Y => [[ZERO, -I], [I, ZERO]],
            PauliAxis::Z => [[ONE, ZERO], [ZERO, -ONE]],
        }
    }

    /// Product `self · rhs`, returned as a phase and the resulting axis.
    pub fn mul(self, rhs: PauliAxis) -> (Phase, PauliAxis) {
        use PauliAxis::*;
        let phase = match (self, rhs) {
            (X, Y) | (Y, Z) | (Z, X) => Phase::PLUS_I,
            (Y, X) | (Z, Y) | (X, Z) => Phase::MINUS_I,
            _ => Phase::ONE,
        };
        let axis = PauliAxis::from_bits(self.x_bit() ^ rhs.x_bit(), self.z_bit() ^ rhs.z_bit());
        (phase, axis)
    }

    fn symbol(self) -> char {
        match self {
            PauliAxis::I => 'I',
            PauliAxis::X => 'X',
            PauliAxis::Y => 'Y',
            PauliAxis::Z => 'Z',
        }
    }
}

/// A phase in `{1, i, -1, -i}`, stored as a number of quarter turns.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const PLUS_I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn quarter_turns(self) -> u8 {
        self.0
    }

    pub fn to_complex(self) -> C64 {
        match self.0 {
            0 => ONE,
            1 => I,
            2 => -ONE,
            _ => -I,
        }
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }
}

impl Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

/// Tensor product of Pauli axes with an overall phase.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    axes: Vec<PauliAxis>,
    phase: Phase,
}

impl PauliString {
    pub fn new(axes: Vec<PauliAxis>) -> Self {
        Self { axes, phase: Phase::ONE }
    }

    pub fn with_phase(axes: Vec<PauliAxis>, phase: Phase) -> Self {
        Self { axes, phase }
    }

    pub fn identity(nqubits: usize) -> Self {
        Self::new(vec![PauliAxis::I; nqubits])
    }

    /// String acting with `axis` on each listed qubit and identity elsewhere.
    pub fn from_sites(nqubits: usize, sites: &[(usize, PauliAxis)]) -> Self {
        let mut axes = vec![PauliAxis::I; nqubits];
        for &(q, a) in sites {
            assert!(q < nqubits, "qubit {q} out of range for {nqubits} qubits");
            axes[q] = a;
        }
        Self::new(axes)
    }

    pub fn nqubits(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[PauliAxis] {
        &self.axes
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn is_identity(&self) -> bool {
        self.axes.iter().all(|&a| a == PauliAxis::I)
    }

    /// Qubits on which the string acts non-trivially.
    pub fn support(&self) -> Vec<usize> {
        self.axes.iter().enumerate().filter(|(_, &a)| a != PauliAxis::I).map(|(q, _)| q).collect()
    }

    pub(crate) fn x_mask(&self) -> usize {
        self.axes.iter().enumerate().filter(|(_, a)| a.x_bit()).fold(0, |m, (q, _)| m | (1 << q))
    }

    pub(crate) fn z_mask(&self) -> usize {
        self.axes.iter().enumerate().filter(|(_, a)| a.z_bit()).fold(0, |m, (q, _)| m | (1 << q))
    }

    /// Operator product `self · rhs`.
    pub fn mul(&self, rhs: &PauliString) -> PauliString {
        assert_eq!(self.nqubits(), rhs.nqubits(), "Pauli strings of different length");
        let mut phase = self.phase * rhs.phase;
        let axes = self
            .axes
            .iter()
            .zip(&rhs.axes)
            .map(|(&a, &b)| {
                let (p, c) = a.mul(b);
                phase = phase * p;
                c
            })
            .collect();
        PauliString { axes, phase }
    }

    /// Dense matrix `phase · ⊗ σ^{axes[q]}` with qubit 0 as the least-significant bit.
    pub fn matrix(&self) -> DenseOperator {
        string_matrix(self)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.phase.0 {
            0 => {}
            1 => write!(f, "i")?,
            2 => write!(f, "-")?,
            _ => write!(f, "-i")?,
        }
        for a in &self.axes {
            write!(f, "{}", a.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (phase, body) = if let Some(rest) = s.strip_prefix("-i") {
            (Phase::MINUS_I, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (Phase::MINUS_ONE, rest)
        } else if let Some(rest) = s.strip_prefix('i') {
            (Phase::PLUS_I, rest)
        } else {
            (Phase::ONE, s.strip_prefix('+').unwrap_or(s))
        };
        let axes = body
            .chars()
            .map(|c| match c {
                'I' => Ok(PauliAxis::I),
                'X' => Ok(PauliAxis::X),
                'Y' => Ok(PauliAxis::Y),
                'Z' => Ok(PauliAxis::Z),
                other => Err(Error::Parse(format!("unknown Pauli symbol `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliString { axes, phase })
    }
}

/// Complex `2^n × 2^n` matrix on an `n`-qubit register.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    nqubits: usize,
    matrix: DMatrix<C64>,
}

impl DenseOperator {
    pub fn zeros(nqubits: usize) -> Self {
        let d = 1 << nqubits;
        Self { nqubits, matrix: DMatrix::zeros(d, d) }
    }

    pub fn identity(nqubits: usize) -> Self {
        let d = 1 << nqubits;
        Self { nqubits, matrix: DMatrix::identity(d, d) }
    }

    pub fn from_matrix(matrix: DMatrix<C64>) -> Result<Self> {
        let d = matrix.nrows();
        if d != matrix.ncols() || !d.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "operator shape {}x{} is not a square power of two",
                d,
                matrix.ncols()
            )));
        }
        Ok(Self { nqubits: d.trailing_zeros() as usize, matrix })
    }

    pub fn from_diagonal(nqubits: usize, diag: &[f64]) -> Self {
        assert_eq!(diag.len(), 1 << nqubits);
        let mut op = Self::zeros(nqubits);
        for (k, &d) in diag.iter().enumerate() {
            op.matrix[(k, k)] = C64::new(d, 0.0);
        }
        op
    }

    pub fn nqubits(&self) -> usize {
        self.nqubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self { nqubits: self.nqubits, matrix: self.matrix.adjoint() }
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self { nqubits: self.nqubits, matrix: &self.matrix * C64::new(a, 0.0) }
    }

    pub fn scaled_complex(&self, a: C64) -> Self {
        Self { nqubits: self.nqubits, matrix: &self.matrix * a }
    }

    /// `self · rhs`; panics on mismatched sizes.
    pub fn matmul(&self, rhs: &DenseOperator) -> Self {
        assert_eq!(self.nqubits, rhs.nqubits);
        Self { nqubits: self.nqubits, matrix: &self.matrix * &rhs.matrix }
    }

    pub fn checked_add(&self, rhs: &DenseOperator) -> Result<Self> {
        if self.nqubits != rhs.nqubits {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: rhs.dim() });
        }
        Ok(Self { nqubits: self.nqubits, matrix: &self.matrix + &rhs.matrix })
    }

    /// Tensor product with `self` on the low qubits and `high` on the qubits above it.
    pub fn tensor(&self, high: &DenseOperator) -> Self {
        Self { nqubits: self.nqubits + high.nqubits, matrix: high.matrix.kronecker(&self.matrix) }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest elementwise modulus of `self − rhs`.
    pub fn max_abs_diff(&self, rhs: &DenseOperator) -> f64 {
        assert_eq!(self.dim(), rhs.dim());
        self.matrix.iter().zip(rhs.matrix.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Largest elementwise modulus of `self − e^{iφ} rhs`, with the phase
    /// `φ` chosen to align the two operators.
    pub fn max_abs_diff_up_to_phase(&self, rhs: &DenseOperator) -> f64 {
        let tr: C64 = self.matrix.iter().zip(rhs.matrix.iter()).map(|(a, b)| b.conj() * a).sum();
        let phase = if tr.norm() > 0.0 { tr / tr.norm() } else { ONE };
        self.max_abs_diff(&rhs.scaled_complex(phase))
    }

    /// Frobenius norm of `self − e^{iφ} rhs` for the best-aligned global phase.
    pub fn distance_up_to_phase(&self, rhs: &DenseOperator) -> f64 {
        let tr: C64 = self.matrix.iter().zip(rhs.matrix.iter()).map(|(a, b)| b.conj() * a).sum();
        let phase = if tr.norm() > 0.0 { tr / tr.norm() } else { ONE };
        let aligned = rhs.scaled_complex(phase);
        self.matrix.iter().zip(aligned.matrix.iter()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermiticity_defect() <= rel_tol * self.frobenius_norm()
    }

    pub fn unitarity_defect(&self) -> f64 {
        let d = self.dim();
        let prod = self.matrix.adjoint() * &self.matrix;
        (prod - DMatrix::<C64>::identity(d, d)).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol * (self.dim() as f64).sqrt()
    }

    pub fn commutator(&self, rhs: &DenseOperator) -> Self {
        Self { nqubits: self.nqubits, matrix: &self.matrix * &rhs.matrix - &rhs.matrix * &self.matrix }
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim());
        let d = self.dim();
        let mut out = vec![ZERO; d];
        // nalgebra storage is column-major
        for (c, &vc) in v.iter().enumerate() {
            if vc == ZERO {
                continue;
            }
            let col = self.matrix.column(c);
            for (o, m) in out.iter_mut().zip(col.iter()) {
                *o += m * vc;
            }
        }
        out
    }
}

/// `phase · ⊗ σ^{axes[q]}` as a dense matrix.
pub fn string_matrix(s: &PauliString) -> DenseOperator {
    let n = s.nqubits();
    let mut op = DenseOperator::zeros(n);
    let xm = s.x_mask();
    let zm = s.z_mask();
    let ny = s.axes.iter().filter(|&&a| a == PauliAxis::Y).count() as u8;
    // Y = i X Z on every site
    let base = (s.phase * Phase(ny % 4)).to_complex();
    for col in 0..op.dim() {
        let sign = if (col & zm).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
        op.matrix[(col ^ xm, col)] = base * sign;
    }
    op
}

/// Hermitian operator written as a real-weighted sum of phase-free Pauli strings.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedPauliSum {
    nqubits: usize,
    terms: BTreeMap<Vec<PauliAxis>, f64>,
}

impl WeightedPauliSum {
    pub fn new(nqubits: usize) -> Self {
        Self { nqubits, terms: BTreeMap::new() }
    }

    pub fn nqubits(&self) -> usize {
        self.nqubits
    }

    /// Adds `coef · s`. A real phase on `s` is folded into the coefficient;
    /// an imaginary phase would break Hermiticity and is rejected.
    pub fn add_term(&mut self, coef: f64, s: &PauliString) -> Result<()> {
        if s.nqubits() != self.nqubits {
            return Err(Error::DimensionMismatch { expected: self.nqubits, found: s.nqubits() });
        }
        if !s.phase().is_real() {
            return Err(Error::NotHermitian { deviation: coef.abs() });
        }
        let c = if s.phase() == Phase::MINUS_ONE { -coef } else { coef };
        *self.terms.entry(s.axes.clone()).or_insert(0.0) += c;
        Ok(())
    }

    pub(crate) fn push(&mut self, coef: f64, axes: Vec<PauliAxis>) {
        debug_assert_eq!(axes.len(), self.nqubits);
        *self.terms.entry(axes).or_insert(0.0) += coef;
    }

    /// Convenience: `coef · ⊗ axis` on the listed sites.
    pub fn add_sites(&mut self, coef: f64, sites: &[(usize, PauliAxis)]) {
        self.push(coef, PauliString::from_sites(self.nqubits, sites).axes);
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (f64, PauliString)> + '_ {
        self.terms.iter().map(|(axes, &c)| (c, PauliString::new(axes.clone())))
    }

    pub fn coefficient(&self, s: &PauliString) -> f64 {
        self.terms.get(&s.axes).copied().unwrap_or(0.0)
    }

    pub fn identity_coefficient(&self) -> f64 {
        self.coefficient(&PauliString::identity(self.nqubits))
    }

    pub fn without_identity(&self) -> Self {
        let mut out = self.clone();
        out.terms.remove(&vec![PauliAxis::I; self.nqubits]);
        out
    }

    /// Drops terms with `|c| ≤ tol`.
    pub fn chopped(&self, tol: f64) -> Self {
        Self {
            nqubits: self.nqubits,
            terms: self.terms.iter().filter(|(_, c)| c.abs() > tol).map(|(k, &c)| (k.clone(), c)).collect(),
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self { nqubits: self.nqubits, terms: self.terms.iter().map(|(k, &c)| (k.clone(), a * c)).collect() }
    }

    /// `self ⊗ high`, with `self` on the low qubits.
    pub fn tensor(&self, high: &WeightedPauliSum) -> Self {
        let mut out = Self::new(self.nqubits + high.nqubits);
        for (lo_axes, &a) in &self.terms {
            for (hi_axes, &b) in &high.terms {
                let mut axes = lo_axes.clone();
                axes.extend_from_slice(hi_axes);
                out.push(a * b, axes);
            }
        }
        out
    }

    /// Places this operator on qubits `offset..offset+n` of a `total`-qubit register.
    pub fn embed(&self, offset: usize, total: usize) -> Self {
        assert!(offset + self.nqubits <= total);
        let mut out = Self::new(total);
        for (axes, &c) in &self.terms {
            let mut full = vec![PauliAxis::I; total];
            full[offset..offset + self.nqubits].copy_from_slice(axes);
            out.push(c, full);
        }
        out
    }

    pub fn to_dense(&self) -> DenseOperator {
        sum_matrix(self)
    }
}

impl Add for &WeightedPauliSum {
    type Output = WeightedPauliSum;
    fn add(self, rhs: &WeightedPauliSum) -> WeightedPauliSum {
        assert_eq!(self.nqubits, rhs.nqubits, "adding Pauli sums of different sizes");
        let mut out = self.clone();
        for (k, &c) in &rhs.terms {
            *out.terms.entry(k.clone()).or_insert(0.0) += c;
        }
        out
    }
}

/// `Σ_k c_k · string_matrix(s_k)`.
pub fn sum_matrix(h: &WeightedPauliSum) -> DenseOperator {
    let mut op = DenseOperator::zeros(h.nqubits);
    for (c, s) in h.terms() {
        let xm = s.x_mask();
        let zm = s.z_mask();
        let ny = s.axes.iter().filter(|&&a| a == PauliAxis::Y).count() as u8;
        let base = Phase(ny % 4).to_complex() * c;
        for col in 0..op.dim() {
            let sign = if (col & zm).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
            op.matrix[(col ^ xm, col)] += base * sign;
        }
    }
    op
}

/// Operator either kept symbolically as a Pauli sum or stored densely.
#[derive(Clone, Debug)]
pub enum Operator {
    Pauli(WeightedPauliSum),
    Dense(DenseOperator),
}

impl Operator {
    pub fn nqubits(&self) -> usize {
        match self {
            Operator::Pauli(p) => p.nqubits(),
            Operator::Dense(d) => d.nqubits(),
        }
    }

    pub fn to_dense(&self) -> DenseOperator {
        match self {
            Operator::Pauli(p) => p.to_dense(),
            Operator::Dense(d) => d.clone(),
        }
    }

    pub fn as_pauli(&self) -> Option<&WeightedPauliSum> {
        match self {
            Operator::Pauli(p) => Some(p),
            Operator::Dense(_) => None,
        }
    }

    pub fn scaled(&self, a: f64) -> Operator {
        match self {
            Operator::Pauli(p) => Operator::Pauli(p.scaled(a)),
            Operator::Dense(d) => Operator::Dense(d.scaled(a)),
        }
    }

    /// `self ⊗ high`, `self` on the low qubits.
    pub fn tensor(&self, high: &WeightedPauliSum) -> Operator {
        match self {
            Operator::Pauli(p) => Operator::Pauli(p.tensor(high)),
            Operator::Dense(d) => Operator::Dense(d.tensor(&high.to_dense())),
        }
    }
}

/// Eigendecomposition of a Hermitian operator, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: DMatrix<C64>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k).iter().copied().collect()
    }

    pub fn ground_energy(&self) -> f64 {
        self.values[0]
    }

    /// `V e^{−iΛt} V†`.
    pub fn propagator(&self, t: f64) -> DenseOperator {
        let phases: Vec<C64> = self.values.iter().map(|&l| C64::from_polar(1.0, -l * t)).collect();
        let mut scaled = self.vectors.clone();
        for (mut col, &p) in scaled.column_iter_mut().zip(&phases) {
            col *= p;
        }
        let m = scaled * self.vectors.adjoint();
        DenseOperator::from_matrix(m).expect("eigenbasis has power-of-two dimension")
    }

    /// `‖V†V − 1‖_F`.
    pub fn orthonormality_defect(&self) -> f64 {
        let d = self.dim();
        (self.vectors.adjoint() * &self.vectors - DMatrix::<C64>::identity(d, d))
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `‖MV − VΛ‖_F`.
    pub fn residual(&self, m: &DenseOperator) -> f64 {
        let mut vl = self.vectors.clone();
        for (mut col, &l) in vl.column_iter_mut().zip(&self.values) {
            col *= C64::new(l, 0.0);
        }
        (m.matrix() * &self.vectors - vl).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Hermitian eigendecomposition; values ascending.
pub fn eigh(m: &DenseOperator) -> Result<EigenSystem> {
    let defect = m.hermiticity_defect();
    if defect > 1e-10 * m.frobenius_norm() {
        return Err(Error::NotHermitian { deviation: defect });
    }
    let d = m.dim();
    let sym = (m.matrix() + m.matrix().adjoint()) * C64::new(0.5, 0.0);
    // real symmetric input takes the cheaper real solver
    let (raw_values, raw_vectors) = if sym.iter().all(|z| z.im == 0.0) {
        let eig = nalgebra::SymmetricEigen::new(sym.map(|z| z.re));
        (eig.eigenvalues, eig.eigenvectors.map(|x| C64::new(x, 0.0)))
    } else {
        let eig = nalgebra::SymmetricEigen::new(sym);
        (eig.eigenvalues, eig.eigenvectors)
    };
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| raw_values[a].total_cmp(&raw_values[b]));
    let values = order.iter().map(|&k| raw_values[k]).collect();
    let vectors = DMatrix::from_fn(d, d, |r, c| raw_vectors[(r, order[c])]);
    Ok(EigenSystem { values, vectors })
}

/// `e^{−iMt}` for Hermitian `M`.
pub fn expm_hermitian(m: &DenseOperator, t: f64) -> Result<DenseOperator> {
    Ok(eigh(m)?.propagator(t))
}

/// Ladder-operator symbol acting on one site. `Raise` maps `|0⟩ = |↓⟩` to
/// `|1⟩ = |↑⟩`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Ladder {
    I,
    Raise,
    Lower,
    Z,
}

impl Ladder {
    fn pauli_components(self) -> &'static [(PauliAxis, C64)] {
        const HALF: C64 = C64::new(0.5, 0.0);
        const HALF_I: C64 = C64::new(0.0, 0.5);
        const NEG_HALF_I: C64 = C64::new(0.0, -0.5);
        match self {
            Ladder::I => &[(PauliAxis::I, ONE)],
            Ladder::Z => &[(PauliAxis::Z, ONE)],
            // |1⟩⟨0| = (X − iY)/2
            Ladder::Raise => &[(PauliAxis::X, HALF), (PauliAxis::Y, NEG_HALF_I)],
            // |0⟩⟨1| = (X + iY)/2
            Ladder::Lower => &[(PauliAxis::X, HALF), (PauliAxis::Y, HALF_I)],
        }
    }

    pub fn matrix(self) -> [[C64; 2]; 2] {
        match self {
            Ladder::I => PauliAxis::I.matrix(),
            Ladder::Z => PauliAxis::Z.matrix(),
            Ladder::Raise => [[ZERO, ZERO], [ONE, ZERO]],
            Ladder::Lower => [[ZERO, ONE], [ZERO, ZERO]],
        }
    }
}

/// Pauli expansion of `P + P†` where `P` is the site-wise product of ladder
/// symbols (`product[q]` acts on qubit `q`).
pub fn expand_ladder(product: &[Ladder]) -> WeightedPauliSum {
    let mut acc: Vec<(Vec<PauliAxis>, C64)> = vec![(Vec::with_capacity(product.len()), ONE)];
    for site in product {
        let comps = site.pauli_components();
        acc = acc
            .into_iter()
            .flat_map(|(axes, c)| {
                comps.iter().map(move |&(a, w)| {
                    let mut next = axes.clone();
                    next.push(a);
                    (next, c * w)
                })
            })
            .collect();
    }
    let mut out = WeightedPauliSum::new(product.len());
    for (axes, c) in acc {
        // c + c̄ from the Hermitian conjugate
        let re = 2.0 * c.re;
        if re != 0.0 {
            out.push(re, axes);
        }
    }
    out.chopped(0.0)
}
