//! Sectioned TOML configuration shared by the command line and the pinned
//! fixtures. Every field is optional in the file; defaults are applied when
//! the sections are turned into validated run parameters, and errors name
//! the offending `section.field`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::Sampler;
use crate::combing::{
    prepare_initial, CombingConfig, InitialState, Mode, Objective, ParamRange, SearchSpace, TargetModel, TargetSpectrum,
};
use crate::error::{Error, Result};
use crate::models::{CouplingMode, IsingParams, PhiChoice};
use crate::qaa::{QaaConfig, DEFAULT_DT};
use crate::statevector::init_comb_product;

pub const DEFAULT_NT: usize = 3;
pub const DEFAULT_H: f64 = 1.0;
pub const DEFAULT_NC: usize = 3;
pub const DEFAULT_NU0: f64 = 4.0;
pub const DEFAULT_TF: f64 = 50.0;
pub const DEFAULT_KAPPA: f64 = 0.1;
pub const DEFAULT_G: f64 = 0.2;
pub const DEFAULT_STEPS: usize = 500;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetKind {
    Ising,
    Toy,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nt: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub periodic: Option<bool>,
    /// Toy level splitting; defaults to `nu0 / 2`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CombSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nc: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tf: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    /// One weight shared by every cyclic triple.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    /// Independent weights drawn from this seed instead.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingKind {
    OneBodyX,
    RandomPattern,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupling: Option<CouplingKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupling_seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    Random,
    Basis,
    GroundStateBPlus1,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    /// Steps per iteration; `dt = tf / steps`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iteration_steps: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_iters: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<InitialKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measure_last: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_overlaps: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QaaSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub members: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampler: Option<Sampler>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizeFor {
    /// Tune the `[run]` configuration.
    Run,
    /// Tune one single-comb configuration per `compare.hs` entry.
    Compare,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<OptimizeFor>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objective: Option<Objective>,
    /// Seeds scored per sample.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eval_seeds: Option<Vec<u64>>,
    /// Alternatively, the first `eval_count` seeds whose prepared initial
    /// state has ground-state fidelity at most `max_initial_fidelity`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eval_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_initial_fidelity: Option<f64>,
    /// Step count used when tuning per-`h` comparison configurations.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu0: Option<ParamRange>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tf: Option<ParamRange>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<ParamRange>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<ParamRange>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<ParamRange>,
}

/// Tuned single-comb parameters for one `h`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScEntry {
    pub h: f64,
    pub nu0: f64,
    pub tf: f64,
    pub kappa: f64,
    pub g: f64,
    /// Ground-state fidelity reached when tuned.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tuned_fidelity: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hs: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sc: Vec<ScEntry>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    Both,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AppConfig {
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub comb: CombSection,
    #[serde(default)]
    pub interaction: InteractionSection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub qaa: QaaSection,
    #[serde(default)]
    pub ensemble: EnsembleSection,
    #[serde(default)]
    pub optimize: OptimizeSection,
    #[serde(default)]
    pub compare: CompareSection,
    #[serde(default)]
    pub spectrum: SpectrumSection,
    #[serde(default)]
    pub output: OutputSection,
}

fn section_of(field: &str) -> &'static str {
    match field {
        "nc" | "nu0" | "tf" | "kappa" => "comb",
        "g" | "coupling" => "interaction",
        _ => "run",
    }
}

impl AppConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config("<file>", e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("<file>", format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config("<file>", e.to_string()))
    }

    pub fn target_kind(&self) -> TargetKind {
        self.model.target.unwrap_or(TargetKind::Ising)
    }

    pub fn nu0(&self) -> f64 {
        self.comb.nu0.unwrap_or(DEFAULT_NU0)
    }

    pub fn tf(&self) -> f64 {
        self.comb.tf.unwrap_or(DEFAULT_TF)
    }

    pub fn ising(&self) -> Result<IsingParams> {
        let p = IsingParams {
            nt: self.model.nt.unwrap_or(DEFAULT_NT),
            h: self.model.h.unwrap_or(DEFAULT_H),
            b: self.model.b.unwrap_or(0.0),
            periodic: self.model.periodic.unwrap_or(true),
        };
        p.validate().map_err(|e| Error::config("model.nt", e.to_string()))?;
        if !p.h.is_finite() || !p.b.is_finite() {
            return Err(Error::config("model.h", "h and b must be finite"));
        }
        Ok(p)
    }

    pub fn target_model(&self) -> Result<TargetModel> {
        match self.target_kind() {
            TargetKind::Ising => Ok(TargetModel::Ising(self.ising()?)),
            TargetKind::Toy => Ok(TargetModel::Toy { eps: self.model.eps.unwrap_or(self.nu0() / 2.0) }),
        }
    }

    pub fn coupling(&self) -> Result<CouplingMode> {
        match (self.interaction.coupling.unwrap_or(CouplingKind::OneBodyX), self.interaction.coupling_seed) {
            (CouplingKind::OneBodyX, None) => Ok(CouplingMode::OneBodyX),
            (CouplingKind::OneBodyX, Some(_)) => {
                Err(Error::config("interaction.coupling_seed", "only meaningful with coupling = \"random_pattern\""))
            }
            (CouplingKind::RandomPattern, seed) => Ok(CouplingMode::RandomPattern { seed: seed.unwrap_or(0) }),
        }
    }

    /// Validated combing configuration. `seed` stands in for `run.seed`
    /// when the file leaves it out.
    pub fn combing(&self, seed: u64) -> Result<CombingConfig> {
        let nc = self.comb.nc.unwrap_or(if self.target_kind() == TargetKind::Toy { 2 } else { DEFAULT_NC });
        let tf = self.tf();
        let phis = match (self.comb.phi, self.comb.phi_seed) {
            (Some(_), Some(_)) => return Err(Error::config("comb.phi", "set either phi or phi_seed, not both")),
            (None, Some(s)) => PhiChoice::Random { seed: s },
            (phi, None) => PhiChoice::Single(phi.unwrap_or(1.0)),
        };
        let dt = match (self.run.steps, self.run.dt) {
            (Some(n), Some(dt)) => {
                if n == 0 || (tf / n as f64 - dt).abs() > 1e-12 * dt.abs().max(1e-300) {
                    return Err(Error::config(
                        "run.dt",
                        format!("run.dt = {dt} disagrees with run.steps = {n} for comb.tf = {tf}"),
                    ));
                }
                dt
            }
            (Some(0), None) => return Err(Error::config("run.steps", "must be at least 1")),
            (Some(n), None) => tf / n as f64,
            (None, Some(dt)) => dt,
            (None, None) => tf / DEFAULT_STEPS as f64,
        };
        let initial_state = match (self.run.initial_state.unwrap_or(InitialKind::Random), self.run.basis_index) {
            (InitialKind::Basis, Some(index)) => InitialState::BasisState { index },
            (InitialKind::Basis, None) => {
                return Err(Error::config("run.basis_index", "required when initial_state = \"basis\""))
            }
            (InitialKind::Random, _) => InitialState::Random,
            (InitialKind::GroundStateBPlus1, _) => InitialState::GroundStateOfBPlus1,
        };
        let cfg = CombingConfig {
            nc,
            nu0: self.nu0(),
            tf,
            kappa: self.comb.kappa.unwrap_or(if nc < 3 { 0.0 } else { DEFAULT_KAPPA }),
            g: self.interaction.g.unwrap_or(DEFAULT_G),
            dt,
            eta: self.run.eta.unwrap_or(1.0),
            phis,
            n_iters: self.run.n_iters.unwrap_or(1),
            iteration_steps: self.run.iteration_steps.clone(),
            mode: self.run.mode.unwrap_or(Mode::Emulate),
            coupling: self.coupling()?,
            seed: self.run.seed.unwrap_or(seed),
            initial_state,
            measure_last: self.run.measure_last.unwrap_or(false),
            n_overlaps: self.run.n_overlaps.unwrap_or(6),
        };
        cfg.validate().map_err(|e| match e {
            Error::Config { field, .. } if field == "dt" => Error::config(
                "run.dt",
                format!("run.dt = {} does not divide comb.tf = {} into an integer number of steps", cfg.dt, cfg.tf),
            ),
            Error::Config { field, reason } => {
                let path = field.split(", ").map(|f| format!("{}.{f}", section_of(f))).collect::<Vec<_>>().join(", ");
                Error::config(path, reason)
            }
            other => other,
        })?;
        if cfg.mode == Mode::Circuit && self.target_kind() == TargetKind::Toy {
            return Err(Error::config("run.mode", "circuit mode needs an Ising target"));
        }
        Ok(cfg)
    }

    pub fn qaa(&self) -> Result<QaaConfig> {
        let cfg = QaaConfig {
            ising: self.ising()?,
            n_steps: self.qaa.steps.unwrap_or(1000),
            dt: self.qaa.dt.unwrap_or(DEFAULT_DT),
            mode: self.qaa.mode.unwrap_or(Mode::Emulate),
        };
        cfg.validate().map_err(|e| match e {
            Error::Config { field, reason } => Error::config(format!("qaa.{field}"), reason),
            other => other,
        })?;
        Ok(cfg)
    }

    pub fn qaa_cap(&self) -> usize {
        self.qaa.cap.unwrap_or(1 << 20)
    }

    pub fn search_space(&self, spectrum: &TargetSpectrum) -> SearchSpace {
        let d = SearchSpace::default_for(spectrum);
        let o = &self.optimize;
        SearchSpace {
            nu0: o.nu0.unwrap_or(d.nu0),
            tf: o.tf.unwrap_or(d.tf),
            kappa: o.kappa.unwrap_or(d.kappa),
            g: o.g.unwrap_or(d.g),
            eta: o.eta.unwrap_or(d.eta),
        }
    }

    pub fn objective(&self) -> Objective {
        self.optimize.objective.unwrap_or(Objective::FinalEnergy)
    }

    /// Seeds used to score optimizer samples.
    pub fn eval_seeds(&self, cfg: &CombingConfig, target: &TargetModel) -> Result<Vec<u64>> {
        let o = &self.optimize;
        match (&o.eval_seeds, o.eval_count) {
            (Some(_), Some(_)) => Err(Error::config("optimize.eval_seeds", "set either eval_seeds or eval_count")),
            (Some(s), None) if s.is_empty() => Err(Error::config("optimize.eval_seeds", "must not be empty")),
            (Some(s), None) => Ok(s.clone()),
            (None, Some(n)) => low_overlap_seeds(cfg, target, n, o.max_initial_fidelity.unwrap_or(1.0)),
            (None, None) => Ok(vec![cfg.seed]),
        }
    }

    /// Single-comb configuration for `h` from the `[[compare.sc]]` entries,
    /// built on the file's comb/run settings.
    pub fn sc_config(&self, h: f64, budget: usize) -> Result<CombingConfig> {
        let e = self
            .compare
            .sc
            .iter()
            .find(|e| (e.h - h).abs() < 1e-9)
            .ok_or_else(|| Error::config("compare.sc", format!("no entry for h = {h}")))?;
        let mut file = self.clone();
        file.model.h = Some(h);
        file.model.b = Some(-1.0);
        file.comb.nu0 = Some(e.nu0);
        file.comb.tf = Some(e.tf);
        file.comb.kappa = Some(e.kappa);
        file.interaction.g = Some(e.g);
        file.run.steps = Some(budget);
        file.run.dt = None;
        file.run.iteration_steps = None;
        file.run.n_iters = Some(1);
        file.run.initial_state = Some(InitialKind::GroundStateBPlus1);
        file.combing(0)
    }
}

/// The first `count` seeds (counting from `cfg.seed`) whose prepared initial
/// state has reduced ground-state fidelity at most `max_fidelity`.
pub fn low_overlap_seeds(
    cfg: &CombingConfig,
    target: &TargetModel,
    count: usize,
    max_fidelity: f64,
) -> Result<Vec<u64>> {
    let spec = TargetSpectrum::new(target)?;
    let mut out = Vec::new();
    let mut s = cfg.seed;
    let limit = cfg.seed.saturating_add(1_000_000);
    while out.len() < count {
        if s >= limit {
            return Err(Error::EmptySearchSpace(format!("fewer than {count} seeds with fidelity <= {max_fidelity}")));
        }
        let init = prepare_initial(cfg.initial_state, target, s)?;
        if spec.population(&init_comb_product(&init, 0), 0) <= max_fidelity {
            out.push(s);
        }
        s += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_is_valid() {
        let c = AppConfig::parse("[model]\nnt = 3\nh = 2.0\n").unwrap();
        let cfg = c.combing(9).unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.steps_for(0), DEFAULT_STEPS);
        assert_eq!(c.ising().unwrap().h, 2.0);
    }

    #[test]
    fn dt_not_dividing_tf_names_both() {
        let c = AppConfig::parse("[comb]\ntf = 10.0\n[run]\ndt = 0.3\n").unwrap();
        match c.combing(0) {
            Err(Error::Config { field, reason }) => {
                assert_eq!(field, "run.dt");
                assert!(reason.contains("comb.tf"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn circuit_with_random_pattern_rejected() {
        let c = AppConfig::parse(
            "[interaction]\ncoupling = \"random_pattern\"\ncoupling_seed = 3\n[run]\nmode = \"circuit\"\n",
        )
        .unwrap();
        match c.combing(0) {
            Err(Error::Config { field, reason }) => {
                assert_eq!(field, "interaction.coupling");
                assert!(reason.contains("circuit"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(AppConfig::parse("[model]\nnq = 3\n").is_err());
        assert!(AppConfig::parse("[modle]\nnt = 3\n").is_err());
    }

    #[test]
    fn toml_round_trip() {
        let text = "[model]\nnt = 4\nh = 0.5\n\n[optimize]\nnu0 = { lo = 1.0, hi = 4.0, log = true }\n\n[[compare.sc]]\nh = 0.5\nnu0 = 3.0\ntf = 10.0\nkappa = 0.1\ng = 0.2\n";
        let c = AppConfig::parse(text).unwrap();
        assert_eq!(AppConfig::parse(&c.to_toml().unwrap()).unwrap(), c);
        let sc = c.sc_config(0.5, 30).unwrap();
        assert_eq!(sc.steps_for(0), 30);
        assert!(c.sc_config(0.6, 30).is_err());
    }
}
