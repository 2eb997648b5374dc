//! Hamiltonians: the Ising target (with optional longitudinal field), the
//! swept comb, the target–comb interaction, and their assembled total.
//!
//! Target qubits occupy register indices `0..nt`, comb qubits `nt..nt+nc`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{eigh, expand_ladder, DenseOperator, Ladder, Operator, PauliAxis, WeightedPauliSum};
use crate::statevector::seeded_rng;

/// 1D transverse-field Ising chain, `−h Σ X_i − Σ Z_i Z_{i+1} + b Σ Z_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsingParams {
    pub nt: usize,
    pub h: f64,
    #[serde(default)]
    pub b: f64,
    #[serde(default = "default_true")]
    pub periodic: bool,
}

fn default_true() -> bool {
    true
}

impl IsingParams {
    pub fn new(nt: usize, h: f64) -> Self {
        Self { nt, h, b: 0.0, periodic: true }
    }

    pub fn with_field(mut self, b: f64) -> Self {
        self.b = b;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.nt < 2 {
            return Err(Error::InvalidParameter(format!("Ising chain needs nt >= 2, got {}", self.nt)));
        }
        Ok(())
    }

    /// ZZ bonds `(i, i+1)`, wrapping around when periodic.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let n = self.nt;
        if self.periodic {
            (0..n).map(|i| (i, (i + 1) % n)).collect()
        } else {
            (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect()
        }
    }
}

pub fn ising_hamiltonian(p: &IsingParams) -> WeightedPauliSum {
    let mut h = WeightedPauliSum::new(p.nt);
    for i in 0..p.nt {
        h.add_sites(-p.h, &[(i, PauliAxis::X)]);
    }
    for (i, j) in p.bonds() {
        h.add_sites(-1.0, &[(i, PauliAxis::Z), (j, PauliAxis::Z)]);
    }
    if p.b != 0.0 {
        for i in 0..p.nt {
            h.add_sites(p.b, &[(i, PauliAxis::Z)]);
        }
    }
    h.chopped(0.0)
}

/// `ε σ⁺σ⁻` on a single qubit: the two-level target used for spectrum sweeps.
pub fn toy_target(eps: f64) -> WeightedPauliSum {
    comb_number_operator(1).scaled(eps)
}

/// Comb ring parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CombParams {
    pub nc: usize,
    pub nu0: f64,
    pub kappa: f64,
    /// One symmetry-breaking weight per cyclic triple.
    pub phis: Vec<f64>,
    pub tf: f64,
}

impl CombParams {
    pub fn new(nc: usize, nu0: f64, kappa: f64, phis: Vec<f64>, tf: f64) -> Result<Self> {
        let p = Self { nc, nu0, kappa, phis, tf };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nc < 3 {
            return Err(Error::InvalidParameter(format!("comb needs nc >= 3, got {}", self.nc)));
        }
        if !(self.nu0 > 0.0) {
            return Err(Error::InvalidParameter(format!("nu0 must be positive, got {}", self.nu0)));
        }
        if !(self.tf > 0.0) {
            return Err(Error::InvalidParameter(format!("tf must be positive, got {}", self.tf)));
        }
        if self.phis.len() != self.nc {
            return Err(Error::InvalidParameter(format!(
                "expected {} phi weights (one per cyclic triple), got {}",
                self.nc,
                self.phis.len()
            )));
        }
        Ok(())
    }

    pub fn nu_at(&self, t: f64) -> Result<f64> {
        nu_schedule(self.nu0, self.tf, t)
    }
}

/// How the comb's symmetry-breaking weights are chosen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiChoice {
    /// Every cyclic triple shares one weight.
    Single(f64),
    /// Independent draws on `[0.5, 1.5]`.
    Random { seed: u64 },
}

impl PhiChoice {
    pub fn weights(&self, nc: usize) -> Vec<f64> {
        match *self {
            PhiChoice::Single(phi) => vec![phi; nc],
            PhiChoice::Random { seed } => random_phis(nc, seed),
        }
    }
}

pub fn random_phis(nc: usize, seed: u64) -> Vec<f64> {
    let mut rng = seeded_rng(seed, 0x9e37);
    (0..nc).map(|_| rng.random_range(0.5..=1.5)).collect()
}

/// Cyclic triples `(i, i+1, i+2)` on the comb ring.
pub fn comb_triples(nc: usize) -> Vec<(usize, usize, usize)> {
    (0..nc).map(|i| (i, (i + 1) % nc, (i + 2) % nc)).collect()
}

/// Cyclic nearest-neighbour pairs `(i, i+1)` on the comb ring; a two-site
/// ring has a single pair.
pub fn comb_pairs(nc: usize) -> Vec<(usize, usize)> {
    match nc {
        0 | 1 => Vec::new(),
        2 => vec![(0, 1)],
        _ => (0..nc).map(|i| (i, (i + 1) % nc)).collect(),
    }
}

/// `Σ_i σ⁺_i σ⁻_i = Σ_i (1 − Z_i)/2`, counting excitations (`|1⟩ = |↑⟩`).
pub fn comb_number_operator(nc: usize) -> WeightedPauliSum {
    let mut n = WeightedPauliSum::new(nc);
    for i in 0..nc {
        n.add_sites(0.5, &[]);
        n.add_sites(-0.5, &[(i, PauliAxis::Z)]);
    }
    n
}

/// `κ Σ_cyc φ_i (σ⁺_i σ⁻_{i+1} σ⁻_{i+2} + h.c.)`.
pub fn comb_scrambler(p: &CombParams) -> WeightedPauliSum {
    let mut out = WeightedPauliSum::new(p.nc);
    for ((a, b, c), &phi) in comb_triples(p.nc).into_iter().zip(&p.phis) {
        let mut product = vec![Ladder::I; p.nc];
        product[a] = Ladder::Raise;
        product[b] = Ladder::Lower;
        product[c] = Ladder::Lower;
        out = &out + &expand_ladder(&product).scaled(p.kappa * phi);
    }
    out.chopped(1e-15)
}

/// Comb Hamiltonian at level spacing `nu`, including the `ν·nc/2` identity
/// component of the number operator.
pub fn comb_hamiltonian(p: &CombParams, nu: f64) -> Result<WeightedPauliSum> {
    if nu < 0.0 {
        return Err(Error::OutOfRange { what: "nu", value: nu, lo: 0.0, hi: f64::INFINITY });
    }
    Ok(&comb_number_operator(p.nc).scaled(nu) + &comb_scrambler(p))
}

/// Linear sweep `ν(t) = ν0 (1 − t/tf)`.
pub fn nu_schedule(nu0: f64, tf: f64, t: f64) -> Result<f64> {
    // tolerate accumulated rounding at the right endpoint
    let slack = 1e-12 * tf.abs().max(1.0);
    if t < -slack || t > tf + slack {
        return Err(Error::OutOfRange { what: "t", value: t, lo: 0.0, hi: tf });
    }
    Ok(nu0 * (1.0 - t.clamp(0.0, tf) / tf))
}

/// Target-side operator of the interaction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CouplingMode {
    /// `A = −h Σ X_i`.
    OneBodyX,
    /// Random real symmetric `A` on the nonzero pattern of the target matrix.
    RandomPattern { seed: u64 },
}

impl std::fmt::Display for CouplingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CouplingMode::OneBodyX => write!(f, "one_body_x"),
            CouplingMode::RandomPattern { seed } => write!(f, "random_pattern(seed={seed})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractionParams {
    pub g: f64,
    pub mode: CouplingMode,
}

/// Builds the target-side coupling operator `A`.
pub fn coupling_operator(mode: CouplingMode, p: &IsingParams) -> Operator {
    match mode {
        CouplingMode::OneBodyX => {
            let mut a = WeightedPauliSum::new(p.nt);
            for i in 0..p.nt {
                a.add_sites(-p.h, &[(i, PauliAxis::X)]);
            }
            Operator::Pauli(a.chopped(0.0))
        }
        CouplingMode::RandomPattern { seed } => {
            let target = ising_hamiltonian(p).to_dense();
            let d = target.dim();
            let mut rng = seeded_rng(seed, 0xa11);
            let mut raw = vec![0.0; d * d];
            for r in 0..d {
                for c in 0..d {
                    if target.get(r, c).norm() > 1e-14 {
                        raw[r * d + c] = rng.random_range(-1.0..=1.0);
                    }
                }
            }
            let sym = nalgebra::DMatrix::from_fn(d, d, |r, c| {
                num_complex::Complex64::new(0.5 * (raw[r * d + c] + raw[c * d + r]), 0.0)
            });
            Operator::Dense(DenseOperator::from_matrix(sym).expect("power-of-two target"))
        }
    }
}

/// Comb side of the interaction, `Σ_i (σ⁺_i + σ⁺_{i+1} + σ⁺_i σ⁺_{i+1}) + h.c.`,
/// which expands to `2 Σ X_i + ½ Σ_pairs (X_i X_j − Y_i Y_j)`.
pub fn comb_coupling_sum(nc: usize) -> WeightedPauliSum {
    let mut out = WeightedPauliSum::new(nc);
    for (i, j) in comb_pairs(nc) {
        for product in
            [vec![(i, Ladder::Raise)], vec![(j, Ladder::Raise)], vec![(i, Ladder::Raise), (j, Ladder::Raise)]]
        {
            let mut sites = vec![Ladder::I; nc];
            for (q, l) in product {
                sites[q] = l;
            }
            out = &out + &expand_ladder(&sites);
        }
    }
    out
}

/// `g · A ⊗ comb_coupling_sum(nc)` on the full register.
pub fn interaction_hamiltonian(ip: &InteractionParams, a: &Operator, nc: usize) -> Operator {
    a.scaled(ip.g).tensor(&comb_coupling_sum(nc))
}

/// `H_targ ⊗ 1 + 1 ⊗ H_comb + H_int` as a dense operator.
pub fn total_hamiltonian(targ: &Operator, comb: &WeightedPauliSum, int: &Operator) -> Result<DenseOperator> {
    let nt = targ.nqubits();
    let nc = comb.nqubits();
    if int.nqubits() != nt + nc {
        return Err(Error::DimensionMismatch { expected: 1 << (nt + nc), found: 1 << int.nqubits() });
    }
    let t = targ.to_dense().tensor(&DenseOperator::identity(nc));
    let c = DenseOperator::identity(nt).tensor(&comb.to_dense());
    t.checked_add(&c)?.checked_add(&int.to_dense())
}

/// Minimum of `E₁(B) − E₀(B)` over a uniform grid of `B` from `+1` to `−1`.
pub fn path_gap(p: &IsingParams, grid: usize) -> Result<f64> {
    if grid < 3 || grid.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "B grid needs an odd number (>= 3) of points so that it contains B = 0, got {grid}"
        )));
    }
    let mut gap = f64::INFINITY;
    for k in 0..grid {
        let b = 1.0 - 2.0 * k as f64 / (grid - 1) as f64;
        let es = eigh(&ising_hamiltonian(&p.clone().with_field(b)).to_dense())?;
        gap = gap.min(es.values[1] - es.values[0]);
    }
    Ok(gap)
}

/// Energy gaps `E_k − E_0` of an operator.
pub fn spectral_gaps(h: &DenseOperator) -> Result<Vec<f64>> {
    let es = eigh(h)?;
    let e0 = es.values[0];
    Ok(es.values.iter().map(|e| e - e0).collect())
}

/// Total Hamiltonian split as `static + ν · N_comb`, so the swept part can be
/// re-evaluated cheaply.
#[derive(Clone, Debug)]
pub struct SweptHamiltonian {
    pub nt: usize,
    pub nc: usize,
    static_part: DenseOperator,
    number: Vec<f64>,
}

impl SweptHamiltonian {
    /// `targ ⊗ 1 + 1 ⊗ scrambler + int`, with the comb number operator kept separately.
    pub fn new(targ: &Operator, scrambler: &WeightedPauliSum, int: &Operator) -> Result<Self> {
        let nt = targ.nqubits();
        let nc = scrambler.nqubits();
        let static_part = total_hamiltonian(targ, scrambler, int)?;
        let comb_count = comb_number_operator(nc).to_dense();
        let number = (0..1usize << (nt + nc)).map(|k| comb_count.get(k >> nt, k >> nt).re).collect();
        Ok(Self { nt, nc, static_part, number })
    }

    pub fn at(&self, nu: f64) -> DenseOperator {
        let mut h = self.static_part.clone();
        let mut m = h.clone().into_matrix();
        for (k, &n) in self.number.iter().enumerate() {
            m[(k, k)] += num_complex::Complex64::new(nu * n, 0.0);
        }
        h = DenseOperator::from_matrix(m).expect("square");
        h
    }
}
