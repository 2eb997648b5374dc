//! Adiabatic baseline: sweep the longitudinal field linearly from `B = +1`
//! to `B = −1` starting in the `B = +1` ground state, and compare its step
//! and gate cost against single-comb runs on the `B = −1` chain.

use serde::{Deserialize, Serialize};

use crate::circuits::{gate_count, run_circuit, target_step_circuit_opts};
use crate::combing::prepare_initial;
use crate::combing::{run_batch, CombingConfig, InitialState, Member, Mode, Recording, TargetModel};
use crate::error::{Error, Result};
use crate::models::{ising_hamiltonian, path_gap, IsingParams};
use crate::pauli::{eigh, PauliAxis, WeightedPauliSum};
use crate::statevector::StateVector;

/// Default step size; total evolution time is `n_steps · dt`.
pub const DEFAULT_DT: f64 = 0.1;
/// Points in the `B` grid used for the gap.
pub const GAP_GRID: usize = 201;
/// Single-comb step budgets scanned for the combing cost.
pub const SC_BUDGETS: [usize; 8] = [10, 20, 30, 50, 75, 100, 150, 200];
/// Success threshold on the final ground-state fidelity.
pub const SUCCESS_FIDELITY: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QaaConfig {
    /// Chain parameters; `b` is ignored and swept instead.
    pub ising: IsingParams,
    pub n_steps: usize,
    pub dt: f64,
    pub mode: Mode,
}

impl QaaConfig {
    pub fn new(ising: IsingParams, n_steps: usize) -> Self {
        Self { ising, n_steps, dt: DEFAULT_DT, mode: Mode::Emulate }
    }

    pub fn validate(&self) -> Result<()> {
        self.ising.validate()?;
        if self.n_steps == 0 {
            return Err(Error::config("n_steps", "must be at least 1"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::config("dt", format!("must be positive, got {}", self.dt)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct QaaResult {
    pub fidelity: f64,
    pub final_state: StateVector,
    pub steps: usize,
    pub gates: usize,
}

fn field_sum(nt: usize) -> WeightedPauliSum {
    let mut z = WeightedPauliSum::new(nt);
    for i in 0..nt {
        z.add_sites(1.0, &[(i, PauliAxis::Z)]);
    }
    z
}

/// `B_k = 1 − 2k/N` at the left endpoint of step `k`.
pub fn field_at(k: usize, n_steps: usize) -> f64 {
    1.0 - 2.0 * k as f64 / n_steps as f64
}

pub fn run_qaa(cfg: &QaaConfig) -> Result<QaaResult> {
    cfg.validate()?;
    let p0 = cfg.ising.clone().with_field(0.0);
    let nt = p0.nt;
    let start = eigh(&ising_hamiltonian(&p0.clone().with_field(1.0)).to_dense())?;
    let end = eigh(&ising_hamiltonian(&p0.clone().with_field(-1.0)).to_dense())?;
    let mut s = StateVector::from_amplitudes(start.vector(0))?;
    let h0 = ising_hamiltonian(&p0).to_dense();
    let z = field_sum(nt).to_dense();
    let mut gates = 0;
    for k in 0..cfg.n_steps {
        let b = field_at(k, cfg.n_steps);
        match cfg.mode {
            Mode::Emulate => {
                let h = h0.checked_add(&z.scaled(b))?;
                s.apply_full_unchecked(&eigh(&h)?.propagator(cfg.dt));
            }
            Mode::Circuit => {
                let c = target_step_circuit_opts(&p0.clone().with_field(b), cfg.dt, true);
                gates += c.len();
                run_circuit(&c, &mut s)?;
            }
        }
    }
    let gs = StateVector::from_amplitudes(end.vector(0))?;
    Ok(QaaResult { fidelity: s.fidelity(&gs)?, final_state: s, steps: cfg.n_steps, gates })
}

/// Gates in one adiabatic step: the target circuit with its field layer.
pub fn qaa_gates_per_step(nt: usize) -> usize {
    gate_count(nt, 3, true).target.gates
}

/// Smallest step count reaching `target_fidelity`, found by doubling from one
/// step and then bisecting between the last failure and first success.
pub fn steps_to_success(ising: &IsingParams, target_fidelity: f64, dt: f64, mode: Mode, cap: usize) -> Result<usize> {
    if !(ising.h > 0.0) {
        return Err(Error::InvalidParameter(format!("steps_to_success needs h > 0, got {}", ising.h)));
    }
    let ok = |n: usize| -> Result<bool> {
        let cfg = QaaConfig { ising: ising.clone(), n_steps: n, dt, mode };
        Ok(run_qaa(&cfg)?.fidelity >= target_fidelity)
    };
    let mut hi = 1;
    while !ok(hi)? {
        if hi >= cap {
            return Err(Error::Diverged { cap });
        }
        hi = (hi * 2).min(cap);
    }
    let mut lo = hi / 2;
    if lo == 0 {
        return Ok(hi);
    }
    // invariant: lo fails, hi succeeds
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Method {
    Qaa,
    Sc,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Qaa => "QAA",
            Method::Sc => "SC",
        })
    }
}

/// Cost of reaching the success threshold at one `h`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostPoint {
    pub method: Method,
    pub h: f64,
    pub delta: f64,
    pub inv_gap: f64,
    /// `None` when no scanned budget succeeded.
    pub steps: Option<usize>,
    pub gates: Option<usize>,
}

/// Single-comb cost on the `B = −1` chain: the smallest budget in
/// [`SC_BUDGETS`] whose run, started from the `B = +1` ground state, ends with
/// reduced ground-state fidelity at least [`SUCCESS_FIDELITY`]. `provider`
/// supplies the configuration for each `(h, budget)`; it is forced to one
/// iteration.
pub fn sc_steps_to_success(
    nt: usize,
    h: f64,
    provider: &dyn Fn(f64, usize) -> Result<CombingConfig>,
) -> Result<Option<(usize, f64)>> {
    let target = TargetModel::Ising(IsingParams::new(nt, h).with_field(-1.0));
    let init = prepare_initial(InitialState::GroundStateOfBPlus1, &target, 0)?;
    for budget in SC_BUDGETS {
        let mut cfg = provider(h, budget)?;
        cfg.n_iters = 1;
        cfg.iteration_steps = Some(vec![budget]);
        cfg.dt = cfg.tf / budget as f64;
        cfg.initial_state = InitialState::GroundStateOfBPlus1;
        let r = run_batch(&cfg, &target, &[Member { initial: init.clone(), seed: cfg.seed }], Recording::Endpoints)?;
        if r[0].final_fidelity >= SUCCESS_FIDELITY {
            return Ok(Some((budget, r[0].final_fidelity)));
        }
    }
    Ok(None)
}

/// QAA and single-comb cost points for every `h`, gates being steps times the
/// per-step count of each method.
pub fn compare_cost(
    hs: &[f64],
    nt: usize,
    nc: usize,
    qaa_mode: Mode,
    qaa_cap: usize,
    provider: &dyn Fn(f64, usize) -> Result<CombingConfig>,
) -> Result<Vec<CostPoint>> {
    let sc_per_step = gate_count(nt, nc, true).total;
    let qaa_per_step = qaa_gates_per_step(nt);
    let mut out = Vec::new();
    for &h in hs {
        let ising = IsingParams::new(nt, h);
        let delta = path_gap(&ising, GAP_GRID)?;
        let q = steps_to_success(&ising, SUCCESS_FIDELITY, DEFAULT_DT, qaa_mode, qaa_cap)?;
        out.push(CostPoint {
            method: Method::Qaa,
            h,
            delta,
            inv_gap: 1.0 / delta,
            steps: Some(q),
            gates: Some(q * qaa_per_step),
        });
        let sc = sc_steps_to_success(nt, h, provider)?.map(|(n, _)| n);
        out.push(CostPoint {
            method: Method::Sc,
            h,
            delta,
            inv_gap: 1.0 / delta,
            steps: sc,
            gates: sc.map(|n| n * sc_per_step),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn per_step_gate_counts() {
        assert_eq!(qaa_gates_per_step(3), 21);
        assert_eq!(qaa_gates_per_step(4), 28);
        let cfg = QaaConfig { ising: IsingParams::new(3, 1.0), n_steps: 4, dt: 0.1, mode: Mode::Circuit };
        assert_eq!(run_qaa(&cfg).unwrap().gates, 84);
    }

    #[test]
    fn zero_field_sectors_never_mix() {
        for n in [1, 10, 100] {
            let cfg = QaaConfig::new(IsingParams::new(3, 0.0), n);
            assert!(run_qaa(&cfg).unwrap().fidelity < 1e-20);
        }
    }

    #[test]
    fn large_h_is_cheap_and_small_h_costs_more() {
        let fast = steps_to_success(&IsingParams::new(3, 3.0), 0.5, DEFAULT_DT, Mode::Emulate, 1 << 20).unwrap();
        assert!(fast <= 8, "{fast}");
        let n1 = steps_to_success(&IsingParams::new(3, 1.0), 0.5, DEFAULT_DT, Mode::Emulate, 1 << 20).unwrap();
        let n05 = steps_to_success(&IsingParams::new(3, 0.5), 0.5, DEFAULT_DT, Mode::Emulate, 1 << 20).unwrap();
        assert!(n05 >= n1);
    }

    #[test]
    fn cap_exceeded_diverges() {
        assert!(matches!(
            steps_to_success(&IsingParams::new(3, 0.4), 0.5, DEFAULT_DT, Mode::Emulate, 64),
            Err(Error::Diverged { cap: 64 })
        ));
    }

    #[test]
    fn field_schedule_endpoints() {
        assert_eq!(field_at(0, 10), 1.0);
        assert!((field_at(5, 10)).abs() < 1e-15);
        assert!((field_at(9, 10) - (-0.8)).abs() < 1e-15);
    }
}
