//! The combing driver: sweep the total Hamiltonian while the comb's level
//! spacing falls to zero, measure and reset the comb, shrink `g` and `ν0`,
//! repeat. Also a seeded random-search optimizer over the sweep parameters.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuits::trotter_step_circuit;
use crate::error::{Error, Result};
use crate::models::{
    comb_coupling_sum, comb_scrambler, coupling_operator, ising_hamiltonian, toy_target, CombParams, CouplingMode,
    InteractionParams, IsingParams, PhiChoice, SweptHamiltonian,
};
use crate::pauli::{eigh, DenseOperator, EigenSystem, Operator, PauliAxis, WeightedPauliSum};
use crate::statevector::{init_comb_product, random_target_state, seeded_rng, MeasurementRecord, StateVector};

const STREAM_MEASURE: u64 = 1;
const STREAM_INIT: u64 = 2;
const STREAM_SEARCH: u64 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Exact exponential of the instantaneous total Hamiltonian per step.
    Emulate,
    /// The gate-level Trotter step.
    Circuit,
}

/// How the target register is prepared before the first sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum InitialState {
    /// Haar-random, drawn from the run seed.
    Random,
    BasisState {
        index: usize,
    },
    /// Ground state of the Ising chain with its longitudinal field set to `+1`.
    GroundStateOfBPlus1,
}

/// The system being cooled.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TargetModel {
    Ising(IsingParams),
    /// One qubit with `H = ε σ⁺σ⁻`, coupled through `A = X`.
    Toy {
        eps: f64,
    },
}

impl TargetModel {
    pub fn nt(&self) -> usize {
        match self {
            TargetModel::Ising(p) => p.nt,
            TargetModel::Toy { .. } => 1,
        }
    }

    pub fn hamiltonian(&self) -> WeightedPauliSum {
        match self {
            TargetModel::Ising(p) => ising_hamiltonian(p),
            TargetModel::Toy { eps } => toy_target(*eps),
        }
    }

    pub fn coupling(&self, mode: CouplingMode) -> Result<Operator> {
        match (self, mode) {
            (TargetModel::Ising(p), _) => Ok(coupling_operator(mode, p)),
            (TargetModel::Toy { .. }, CouplingMode::OneBodyX) => {
                let mut a = WeightedPauliSum::new(1);
                a.add_sites(1.0, &[(0, PauliAxis::X)]);
                Ok(Operator::Pauli(a))
            }
            (TargetModel::Toy { .. }, other) => {
                Err(Error::InvalidParameter(format!("toy target only supports one_body_x coupling, got {other}")))
            }
        }
    }

    fn ising(&self) -> Result<&IsingParams> {
        match self {
            TargetModel::Ising(p) => Ok(p),
            TargetModel::Toy { .. } => Err(Error::InvalidParameter("circuit mode needs an Ising target".into())),
        }
    }
}

fn default_overlaps() -> usize {
    6
}

/// Everything needed to reproduce a combing run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CombingConfig {
    pub nc: usize,
    pub nu0: f64,
    pub tf: f64,
    pub kappa: f64,
    pub g: f64,
    /// Step size when every iteration uses `tf / dt` steps.
    pub dt: f64,
    pub eta: f64,
    pub phis: PhiChoice,
    pub n_iters: usize,
    /// Per-iteration step counts; iteration `i` then uses `dt = tf / steps[i]`.
    #[serde(default)]
    pub iteration_steps: Option<Vec<usize>>,
    pub mode: Mode,
    pub coupling: CouplingMode,
    pub seed: u64,
    pub initial_state: InitialState,
    /// Measure the comb after the final sweep too.
    #[serde(default)]
    pub measure_last: bool,
    /// Number of lowest target eigenstates whose populations are tracked.
    #[serde(default = "default_overlaps")]
    pub n_overlaps: usize,
}

impl CombingConfig {
    /// A single-comb emulation with `steps` steps and a shared `φ = 1`.
    pub fn new(nc: usize, nu0: f64, tf: f64, kappa: f64, g: f64, steps: usize) -> Self {
        Self {
            nc,
            nu0,
            tf,
            kappa,
            g,
            dt: tf / steps as f64,
            eta: 1.0,
            phis: PhiChoice::Single(1.0),
            n_iters: 1,
            iteration_steps: None,
            mode: Mode::Emulate,
            coupling: CouplingMode::OneBodyX,
            seed: 0,
            initial_state: InitialState::Random,
            measure_last: false,
            n_overlaps: default_overlaps(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |field: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(field, format!("must be positive and finite, got {v}")))
            }
        };
        positive("nu0", self.nu0)?;
        positive("tf", self.tf)?;
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::config("eta", format!("must lie in (0, 1], got {}", self.eta)));
        }
        if !self.g.is_finite() || !self.kappa.is_finite() {
            return Err(Error::config("g, kappa", "must be finite"));
        }
        if self.n_iters == 0 {
            return Err(Error::config("n_iters", "must be at least 1"));
        }
        if self.nc < 2 {
            return Err(Error::config("nc", format!("comb needs at least 2 qubits, got {}", self.nc)));
        }
        if self.nc == 2 && self.kappa != 0.0 {
            return Err(Error::config("kappa", "a two-site comb has no three-spin term; kappa must be 0"));
        }
        match &self.iteration_steps {
            Some(steps) => {
                if steps.len() != self.n_iters {
                    return Err(Error::config(
                        "iteration_steps",
                        format!("has {} entries but n_iters = {}", steps.len(), self.n_iters),
                    ));
                }
                if steps.contains(&0) {
                    return Err(Error::config("iteration_steps", "every iteration needs at least one step"));
                }
            }
            None => {
                positive("dt", self.dt)?;
                let n = self.tf / self.dt;
                if (n - n.round()).abs() > 1e-9 * n.max(1.0) || n.round() < 1.0 {
                    return Err(Error::config(
                        "dt",
                        format!("dt = {} does not divide tf = {} into an integer number of steps", self.dt, self.tf),
                    ));
                }
            }
        }
        if self.mode == Mode::Circuit && self.coupling != CouplingMode::OneBodyX {
            return Err(Error::config(
                "coupling",
                format!("circuit mode supports only one_body_x coupling, got {}", self.coupling),
            ));
        }
        Ok(())
    }

    pub fn steps_for(&self, iter: usize) -> usize {
        match &self.iteration_steps {
            Some(steps) => steps[iter],
            None => (self.tf / self.dt).round() as usize,
        }
    }

    pub fn dt_for(&self, iter: usize) -> f64 {
        match &self.iteration_steps {
            Some(_) => self.tf / self.steps_for(iter) as f64,
            None => self.dt,
        }
    }

    pub fn total_steps(&self) -> usize {
        (0..self.n_iters).map(|i| self.steps_for(i)).sum()
    }

    /// `(g, ν0)` in effect during iteration `iter`.
    pub fn scaled_params(&self, iter: usize) -> (f64, f64) {
        let s = self.eta.powi(iter as i32);
        (self.g * s, self.nu0 * s)
    }
}

/// Target state prepared according to `spec`.
pub fn prepare_initial(spec: InitialState, target: &TargetModel, seed: u64) -> Result<StateVector> {
    let nt = target.nt();
    match spec {
        InitialState::Random => Ok(random_target_state(nt, &mut seeded_rng(seed, STREAM_INIT))),
        InitialState::BasisState { index } => {
            if index >= 1 << nt {
                return Err(Error::InvalidParameter(format!("basis index {index} outside {nt}-qubit target")));
            }
            Ok(StateVector::basis(nt, index))
        }
        InitialState::GroundStateOfBPlus1 => {
            let p = target.ising()?.clone().with_field(1.0);
            let es = eigh(&ising_hamiltonian(&p).to_dense())?;
            StateVector::from_amplitudes(es.vector(0))
        }
    }
}

/// Observables recorded after a step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub step: usize,
    pub t: f64,
    /// `Tr(ρ_target H_targ)`.
    pub energy: f64,
    /// Reduced ground-state fidelity.
    pub fidelity: f64,
    /// Reduced populations of the lowest target eigenstates.
    pub overlaps: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationResult {
    pub index: usize,
    pub g: f64,
    pub nu0: f64,
    pub dt: f64,
    pub steps: usize,
    /// Comb measurement after the sweep, if one was made.
    pub outcome: Option<MeasurementRecord>,
    /// `steps + 1` points when recorded in full, otherwise the two endpoints.
    pub trajectory: Vec<TrajectoryPoint>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunResult {
    pub seed: u64,
    pub iterations: Vec<IterationResult>,
    pub initial_fidelity: f64,
    pub final_fidelity: f64,
    pub initial_energy: f64,
    pub final_energy: f64,
    pub total_steps: usize,
    /// Gates executed, in circuit mode.
    pub total_gates: Option<usize>,
    #[serde(skip)]
    pub final_state: Option<StateVector>,
}

impl RunResult {
    pub fn outcomes(&self) -> Vec<String> {
        self.iterations.iter().filter_map(|it| it.outcome.as_ref().map(|o| o.bitstring())).collect()
    }
}

/// Target Hamiltonian and its eigenbasis, shared by every observable.
#[derive(Clone, Debug)]
pub struct TargetSpectrum {
    pub hamiltonian: DenseOperator,
    pub eigen: EigenSystem,
    vectors: Vec<Vec<num_complex::Complex64>>,
}

impl TargetSpectrum {
    pub fn new(target: &TargetModel) -> Result<Self> {
        let hamiltonian = target.hamiltonian().to_dense();
        let eigen = eigh(&hamiltonian)?;
        let vectors = (0..eigen.dim()).map(|k| eigen.vector(k)).collect();
        Ok(Self { hamiltonian, eigen, vectors })
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigen.ground_energy()
    }

    pub fn nt(&self) -> usize {
        self.hamiltonian.nqubits()
    }

    /// Reduced population of target eigenstate `k`.
    pub fn population(&self, s: &StateVector, k: usize) -> f64 {
        s.reduced_population(self.nt(), &self.vectors[k])
    }

    pub fn observe(&self, s: &StateVector, step: usize, t: f64, k: usize) -> TrajectoryPoint {
        let overlaps: Vec<f64> = (0..k.min(self.vectors.len())).map(|j| self.population(s, j)).collect();
        TrajectoryPoint {
            step,
            t,
            energy: s.target_expectation(&self.hamiltonian),
            fidelity: self.population(s, 0),
            overlaps,
        }
    }
}

/// How much of each sweep to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Recording {
    EveryStep,
    Endpoints,
}

/// Frozen per-iteration sweep parameters.
#[derive(Clone, Debug)]
pub struct SweepParams {
    pub g: f64,
    pub nu0: f64,
    pub tf: f64,
    pub dt: f64,
    pub steps: usize,
}

/// The pieces of the total Hamiltonian that do not change within a run.
pub struct CombSystem {
    pub target: TargetModel,
    pub spectrum: TargetSpectrum,
    pub nc: usize,
    pub kappa: f64,
    pub phis: Vec<f64>,
    pub coupling: CouplingMode,
    targ_op: Operator,
    a: Operator,
    scrambler: WeightedPauliSum,
}

impl CombSystem {
    pub fn new(target: &TargetModel, cfg: &CombingConfig) -> Result<Self> {
        let phis = cfg.phis.weights(cfg.nc);
        let scrambler = if cfg.nc >= 3 {
            comb_scrambler(&CombParams { nc: cfg.nc, nu0: cfg.nu0, kappa: cfg.kappa, phis: phis.clone(), tf: cfg.tf })
        } else {
            WeightedPauliSum::new(cfg.nc)
        };
        Ok(Self {
            target: target.clone(),
            spectrum: TargetSpectrum::new(target)?,
            nc: cfg.nc,
            kappa: cfg.kappa,
            phis,
            coupling: cfg.coupling,
            targ_op: Operator::Pauli(target.hamiltonian()),
            a: target.coupling(cfg.coupling)?,
            scrambler,
        })
    }

    pub fn nt(&self) -> usize {
        self.target.nt()
    }

    pub fn swept(&self, g: f64) -> Result<SweptHamiltonian> {
        let int = self.a.scaled(g).tensor(&comb_coupling_sum(self.nc));
        SweptHamiltonian::new(&self.targ_op, &self.scrambler, &int)
    }

    fn comb_params(&self, sweep: &SweepParams) -> CombParams {
        CombParams { nc: self.nc, nu0: sweep.nu0, kappa: self.kappa, phis: self.phis.clone(), tf: sweep.tf }
    }
}

/// Applies one sweep's worth of steps to every state, in lockstep, handing
/// each post-step state to `observe`. Returns the gates applied per state.
fn sweep_lockstep(
    sys: &CombSystem,
    sweep: &SweepParams,
    mode: Mode,
    states: &mut [StateVector],
    mut observe: impl FnMut(usize, f64, &[StateVector]),
) -> Result<usize> {
    let mut gates = 0;
    match mode {
        Mode::Emulate => {
            let h = sys.swept(sweep.g)?;
            for k in 0..sweep.steps {
                let t = k as f64 * sweep.dt;
                let nu = crate::models::nu_schedule(sweep.nu0, sweep.tf, t)?;
                let u = eigh(&h.at(nu))?.propagator(sweep.dt);
                states.par_iter_mut().for_each(|s| s.apply_full_unchecked(&u));
                observe(k + 1, (k + 1) as f64 * sweep.dt, states);
            }
        }
        Mode::Circuit => {
            let ising = sys.target.ising()?;
            let comb = sys.comb_params(sweep);
            let ip = InteractionParams { g: sweep.g, mode: sys.coupling };
            let field_layer = ising.b != 0.0;
            for k in 0..sweep.steps {
                let t = k as f64 * sweep.dt;
                let c = trotter_step_circuit(ising, &comb, &ip, t, sweep.dt, field_layer)?;
                gates += c.len();
                states.par_iter_mut().try_for_each(|s| crate::circuits::run_circuit(&c, s))?;
                observe(k + 1, (k + 1) as f64 * sweep.dt, states);
            }
        }
    }
    Ok(gates)
}

/// One sweep from `t = 0` to `t = tf` on a single state whose comb starts
/// in `|0…0⟩`. The trajectory has `steps + 1` points.
pub fn single_sweep(
    sys: &CombSystem,
    state: &mut StateVector,
    sweep: &SweepParams,
    mode: Mode,
    n_overlaps: usize,
) -> Result<Vec<TrajectoryPoint>> {
    let mut traj = vec![sys.spectrum.observe(state, 0, 0.0, n_overlaps)];
    let mut states = vec![state.clone()];
    sweep_lockstep(sys, sweep, mode, &mut states, |step, t, s| {
        traj.push(sys.spectrum.observe(&s[0], step, t, n_overlaps));
    })?;
    *state = states.pop().expect("one state");
    Ok(traj)
}

/// A member of a lockstep batch: its initial target state and RNG seed.
#[derive(Clone, Debug)]
pub struct Member {
    pub initial: StateVector,
    pub seed: u64,
}

/// Runs `members` through the same schedule together. Every member sees the
/// same sequence of step propagators (rescaling does not depend on
/// measurement outcomes) and draws its own measurement outcomes.
pub fn run_batch(
    cfg: &CombingConfig,
    target: &TargetModel,
    members: &[Member],
    recording: Recording,
) -> Result<Vec<RunResult>> {
    cfg.validate()?;
    let sys = CombSystem::new(target, cfg)?;
    run_batch_with(&sys, cfg, members, recording)
}

pub fn run_batch_with(
    sys: &CombSystem,
    cfg: &CombingConfig,
    members: &[Member],
    recording: Recording,
) -> Result<Vec<RunResult>> {
    let nt = sys.nt();
    let comb_qubits: Vec<usize> = (nt..nt + cfg.nc).collect();
    let k = cfg.n_overlaps;
    for m in members {
        if m.initial.nqubits() != nt {
            return Err(Error::DimensionMismatch { expected: 1 << nt, found: m.initial.dim() });
        }
    }
    let mut states: Vec<StateVector> = members.iter().map(|m| init_comb_product(&m.initial, cfg.nc)).collect();
    let mut rngs: Vec<_> = members.iter().map(|m| seeded_rng(m.seed, STREAM_MEASURE)).collect();
    let mut iterations: Vec<Vec<IterationResult>> = vec![Vec::with_capacity(cfg.n_iters); members.len()];
    let initial: Vec<TrajectoryPoint> = states.iter().map(|s| sys.spectrum.observe(s, 0, 0.0, k)).collect();
    let mut gates = 0;

    for iter in 0..cfg.n_iters {
        let (g, nu0) = cfg.scaled_params(iter);
        let sweep = SweepParams { g, nu0, tf: cfg.tf, dt: cfg.dt_for(iter), steps: cfg.steps_for(iter) };
        let mut trajs: Vec<Vec<TrajectoryPoint>> =
            states.iter().map(|s| vec![sys.spectrum.observe(s, 0, 0.0, k)]).collect();
        let steps = sweep.steps;
        gates += sweep_lockstep(sys, &sweep, cfg.mode, &mut states, |step, t, ss| {
            if recording == Recording::EveryStep || step == steps {
                for (traj, s) in trajs.iter_mut().zip(ss) {
                    traj.push(sys.spectrum.observe(s, step, t, k));
                }
            }
        })?;
        let last = iter + 1 == cfg.n_iters;
        for (m, ((state, rng), traj)) in states.iter_mut().zip(rngs.iter_mut()).zip(trajs).enumerate() {
            let outcome = if !last || cfg.measure_last {
                let rec = state.measure_subset(&comb_qubits, rng)?;
                state.reset_down(&comb_qubits, &rec)?;
                Some(rec)
            } else {
                None
            };
            iterations[m].push(IterationResult {
                index: iter,
                g,
                nu0,
                dt: sweep.dt,
                steps: sweep.steps,
                outcome,
                trajectory: traj,
            });
        }
    }

    let total_gates = (cfg.mode == Mode::Circuit).then_some(gates);
    Ok(members
        .iter()
        .zip(states)
        .zip(iterations)
        .zip(initial)
        .map(|(((m, state), iterations), init)| {
            let end = sys.spectrum.observe(&state, 0, cfg.tf, 0);
            RunResult {
                seed: m.seed,
                iterations,
                initial_fidelity: init.fidelity,
                final_fidelity: end.fidelity,
                initial_energy: init.energy,
                final_energy: end.energy,
                total_steps: cfg.total_steps(),
                total_gates,
                final_state: Some(state),
            }
        })
        .collect())
}

/// Full combing run from `initial` (a target-register state), recording
/// every step. Randomness comes from `cfg.seed`.
pub fn run_combing(cfg: &CombingConfig, target: &TargetModel, initial: &StateVector) -> Result<RunResult> {
    let member = Member { initial: initial.clone(), seed: cfg.seed };
    Ok(run_batch(cfg, target, &[member], Recording::EveryStep)?.remove(0))
}

/// Prepares the initial state from `cfg.initial_state` and runs.
pub fn run_combing_from_config(cfg: &CombingConfig, target: &TargetModel) -> Result<RunResult> {
    cfg.validate()?;
    let init = prepare_initial(cfg.initial_state, target, cfg.seed)?;
    run_combing(cfg, target, &init)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Mean final target energy.
    FinalEnergy,
    /// Minus the mean final reduced ground-state fidelity.
    NegGsFidelity,
}

impl Objective {
    fn score(self, r: &RunResult) -> f64 {
        match self {
            Objective::FinalEnergy => r.final_energy,
            Objective::NegGsFidelity => -r.final_fidelity,
        }
    }
}

/// A sampling box for one parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamRange {
    pub lo: f64,
    pub hi: f64,
    /// Sample uniformly in `ln x` rather than `x`.
    #[serde(default)]
    pub log: bool,
}

impl ParamRange {
    pub fn linear(lo: f64, hi: f64) -> Self {
        Self { lo, hi, log: false }
    }

    pub fn log(lo: f64, hi: f64) -> Self {
        Self { lo, hi, log: true }
    }

    pub fn fixed(x: f64) -> Self {
        Self::linear(x, x)
    }

    fn check(&self, name: &str) -> Result<()> {
        let ok = self.lo.is_finite() && self.hi.is_finite() && self.lo <= self.hi && (!self.log || self.lo > 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::EmptySearchSpace(format!("{name} range [{}, {}] (log = {})", self.lo, self.hi, self.log)))
        }
    }

    fn sample(&self, rng: &mut impl Rng) -> f64 {
        if self.lo == self.hi {
            return self.lo;
        }
        let u: f64 = rng.random();
        if self.log {
            (self.lo.ln() + u * (self.hi.ln() - self.lo.ln())).exp()
        } else {
            self.lo + u * (self.hi - self.lo)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub nu0: ParamRange,
    pub tf: ParamRange,
    pub kappa: ParamRange,
    pub g: ParamRange,
    pub eta: ParamRange,
}

impl SearchSpace {
    /// The default box, with `ν0` scaled by the target's spectral width.
    pub fn default_for(spectrum: &TargetSpectrum) -> Self {
        let vals = &spectrum.eigen.values;
        let width = vals[vals.len() - 1] - vals[0];
        Self {
            nu0: ParamRange::log(0.5 * width, 4.0 * width),
            tf: ParamRange::log(5.0, 100.0),
            kappa: ParamRange::log(0.01, 0.5),
            g: ParamRange::log(0.01, 1.0),
            eta: ParamRange::linear(0.3, 0.9),
        }
    }

    fn check(&self) -> Result<()> {
        self.nu0.check("nu0")?;
        self.tf.check("tf")?;
        self.kappa.check("kappa")?;
        self.g.check("g")?;
        self.eta.check("eta")?;
        if self.nu0.lo <= 0.0 || self.tf.lo <= 0.0 || self.eta.lo <= 0.0 || self.eta.hi > 1.0 {
            return Err(Error::EmptySearchSpace("nu0, tf, eta must stay positive and eta <= 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Sample {
    pub config: CombingConfig,
    pub score: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OptimizeResult {
    pub best: CombingConfig,
    pub best_score: f64,
    pub space: SearchSpace,
    pub samples: Vec<Sample>,
}

/// Seeded random search. Each sample copies `base`, replaces the five
/// searched parameters, keeps the per-iteration step counts (so `dt` follows
/// `tf`), and is scored by the mean objective over `eval_seeds`, each seed
/// fixing both the initial state and the measurement outcomes. Ties go to the
/// earliest sample.
pub fn optimize_params(
    base: &CombingConfig,
    target: &TargetModel,
    space: &SearchSpace,
    objective: Objective,
    budget: usize,
    seed: u64,
    eval_seeds: &[u64],
) -> Result<OptimizeResult> {
    if budget == 0 {
        return Err(Error::EmptySearchSpace("budget is 0".into()));
    }
    if eval_seeds.is_empty() {
        return Err(Error::EmptySearchSpace("no evaluation seeds".into()));
    }
    space.check()?;
    base.validate()?;
    let steps = base.steps_for(0);
    let mut rng = seeded_rng(seed, STREAM_SEARCH);
    let configs: Vec<CombingConfig> = (0..budget)
        .map(|_| {
            let mut c = base.clone();
            c.nu0 = space.nu0.sample(&mut rng);
            c.tf = space.tf.sample(&mut rng);
            c.kappa = space.kappa.sample(&mut rng);
            c.g = space.g.sample(&mut rng);
            c.eta = space.eta.sample(&mut rng);
            c.dt = c.tf / steps as f64;
            c
        })
        .collect();
    let scores: Vec<f64> =
        configs.par_iter().map(|c| evaluate(c, target, objective, eval_seeds)).collect::<Result<_>>()?;
    let (best_idx, best_score) =
        scores.iter().copied().enumerate().fold((0, f64::INFINITY), |acc, (i, s)| if s < acc.1 { (i, s) } else { acc });
    Ok(OptimizeResult {
        best: configs[best_idx].clone(),
        best_score,
        space: space.clone(),
        samples: configs.into_iter().zip(scores).map(|(config, score)| Sample { config, score }).collect(),
    })
}

/// Mean objective of `cfg` over runs seeded by `eval_seeds`.
pub fn evaluate(cfg: &CombingConfig, target: &TargetModel, objective: Objective, eval_seeds: &[u64]) -> Result<f64> {
    let members = eval_seeds
        .iter()
        .map(|&s| Ok(Member { initial: prepare_initial(cfg.initial_state, target, s)?, seed: s }))
        .collect::<Result<Vec<_>>>()?;
    let runs = run_batch(cfg, target, &members, Recording::Endpoints)?;
    Ok(runs.iter().map(|r| objective.score(r)).sum::<f64>() / runs.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ising3(h: f64) -> TargetModel {
        TargetModel::Ising(IsingParams::new(3, h))
    }

    #[test]
    fn dt_must_divide_tf() {
        let mut c = CombingConfig::new(3, 4.0, 10.0, 0.1, 0.1, 100);
        c.dt = 0.3;
        match c.validate() {
            Err(Error::Config { field, reason }) => {
                assert_eq!(field, "dt");
                assert!(reason.contains("tf"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn circuit_mode_rejects_random_coupling() {
        let mut c = CombingConfig::new(3, 4.0, 10.0, 0.1, 0.1, 100);
        c.mode = Mode::Circuit;
        c.coupling = CouplingMode::RandomPattern { seed: 1 };
        assert!(matches!(c.validate(), Err(Error::Config { field, .. }) if field == "coupling"));
    }

    #[test]
    fn eta_bounds() {
        let mut c = CombingConfig::new(3, 4.0, 10.0, 0.1, 0.1, 100);
        c.eta = 0.0;
        assert!(c.validate().is_err());
        c.eta = 1.5;
        assert!(c.validate().is_err());
        c.eta = 1.0;
        assert!(c.validate().is_ok());
    }

    #[test]
    fn uneven_split() {
        let mut c = CombingConfig::new(3, 4.0, 10.0, 0.1, 0.1, 100);
        c.n_iters = 2;
        c.iteration_steps = Some(vec![300, 700]);
        c.validate().unwrap();
        assert_eq!(c.total_steps(), 1000);
        assert!((c.dt_for(1) - 10.0 / 700.0).abs() < 1e-15);
        c.iteration_steps = Some(vec![300]);
        assert!(c.validate().is_err());
    }

    #[test]
    fn single_iteration_skips_measurement() {
        let mut c = CombingConfig::new(3, 4.0, 2.0, 0.1, 0.2, 20);
        c.seed = 5;
        let r = run_combing_from_config(&c, &ising3(1.0)).unwrap();
        assert_eq!(r.iterations.len(), 1);
        assert!(r.iterations[0].outcome.is_none());
        assert_eq!(r.iterations[0].trajectory.len(), 21);
        assert_eq!(r.total_steps, 20);
        assert!(r.total_gates.is_none());
    }

    #[test]
    fn measured_iterations_reset_comb() {
        let mut c = CombingConfig::new(3, 4.0, 2.0, 0.1, 0.3, 10);
        c.n_iters = 3;
        c.eta = 0.5;
        let r = run_combing_from_config(&c, &ising3(1.0)).unwrap();
        assert!(r.iterations[..2].iter().all(|it| it.outcome.is_some()));
        assert!(r.iterations[2].outcome.is_none());
        assert!((r.iterations[2].g - 0.3 * 0.25).abs() < 1e-15);
        assert!((r.iterations[2].nu0 - 1.0).abs() < 1e-15);
        // each sweep starts with the comb in |000⟩
        for it in &r.iterations {
            let ov: f64 = it.trajectory[0].overlaps.iter().sum();
            assert!(ov <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn toy_rejects_random_coupling() {
        let t = TargetModel::Toy { eps: 1.0 };
        assert!(t.coupling(CouplingMode::RandomPattern { seed: 0 }).is_err());
    }

    #[test]
    fn budget_one_returns_the_sample() {
        let base = CombingConfig::new(3, 4.0, 2.0, 0.1, 0.1, 10);
        let t = ising3(1.0);
        let sys = TargetSpectrum::new(&t).unwrap();
        let space = SearchSpace::default_for(&sys);
        let r = optimize_params(&base, &t, &space, Objective::FinalEnergy, 1, 3, &[1]).unwrap();
        assert_eq!(r.samples.len(), 1);
        assert_eq!(r.samples[0].config, r.best);
        assert_eq!(r.best_score, r.samples[0].score);
        assert!((r.best.tf / r.best.dt - 10.0).abs() < 1e-9);
    }

    #[test]
    fn empty_search_space() {
        let base = CombingConfig::new(3, 4.0, 2.0, 0.1, 0.1, 10);
        let t = ising3(1.0);
        let mut space = SearchSpace::default_for(&TargetSpectrum::new(&t).unwrap());
        assert!(matches!(
            optimize_params(&base, &t, &space, Objective::FinalEnergy, 0, 0, &[1]),
            Err(Error::EmptySearchSpace(_))
        ));
        space.g = ParamRange::linear(1.0, 0.5);
        assert!(matches!(
            optimize_params(&base, &t, &space, Objective::FinalEnergy, 1, 0, &[1]),
            Err(Error::EmptySearchSpace(_))
        ));
    }
}
