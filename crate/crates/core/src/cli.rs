//! Command-line front end: flag parsing, config loading, seed handling and
//! subcommand dispatch.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::Rng;

use crate::analysis::{
    ensemble_success, ensemble_summary, overlap_trajectory, spectrum_sweep, time_grid, write_csv_with_metadata,
    write_json, Document, Metadata, Sampler,
};
use crate::circuits::{enumerated_gate_count, gate_count, trotter_step_circuit};
use crate::combing::{optimize_params, CombingConfig, Mode, TargetModel, TargetSpectrum};
use crate::config::{AppConfig, CouplingKind, Format, InitialKind, OptimizeFor, ScEntry, TargetKind};
use crate::error::{Error, Result};
use crate::models::{CombParams, InteractionParams, IsingParams};
use crate::qaa::{compare_cost, run_qaa, steps_to_success, SUCCESS_FIDELITY};

#[derive(Parser, Debug)]
#[command(name = "combsim", version, about = "Spectral combing and adiabatic-baseline simulations")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand. Flags override values from `--config`.
#[derive(Args, Debug, Default, Clone)]
pub struct GlobalArgs {
    /// Sectioned TOML config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Run seed; drawn from entropy and printed when omitted.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (0 = all cores); falls back to COMBSIM_THREADS.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output directory [default: .].
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format: csv, json or both [default: csv].
    #[arg(long, global = true, value_parser = parse_format)]
    pub format: Option<Format>,
    /// Target chain length [default: 3].
    #[arg(long, global = true)]
    pub nt: Option<usize>,
    /// Transverse field [default: 1.0].
    #[arg(long, global = true)]
    pub h: Option<f64>,
    /// Longitudinal field [default: 0].
    #[arg(long, global = true)]
    pub b: Option<f64>,
    /// Comb size [default: 3].
    #[arg(long, global = true)]
    pub nc: Option<usize>,
    /// Initial comb level spacing [default: 4.0].
    #[arg(long, global = true)]
    pub nu0: Option<f64>,
    /// Sweep duration [default: 50].
    #[arg(long, global = true)]
    pub tf: Option<f64>,
    /// Three-spin comb coupling [default: 0.1].
    #[arg(long, global = true)]
    pub kappa: Option<f64>,
    /// Target-comb coupling [default: 0.2].
    #[arg(long, global = true)]
    pub g: Option<f64>,
    /// Steps per sweep [default: 500].
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// Step size (alternative to --steps).
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    /// Rescaling factor between iterations [default: 1].
    #[arg(long, global = true)]
    pub eta: Option<f64>,
    /// Number of comb iterations [default: 1].
    #[arg(long, global = true)]
    pub iters: Option<usize>,
    /// emulate or circuit [default: emulate].
    #[arg(long, global = true, value_parser = parse_mode)]
    pub mode: Option<Mode>,
    /// one_body_x or random_pattern [default: one_body_x].
    #[arg(long, global = true, value_parser = parse_coupling)]
    pub coupling: Option<CouplingKind>,
    /// Seed of the random coupling pattern [default: 0].
    #[arg(long, global = true)]
    pub coupling_seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run spectral combing and write the overlap trajectory.
    Comb {
        /// Eigenstates tracked in the trajectory [default: 6].
        #[arg(long)]
        k: Option<usize>,
    },
    /// Run the adiabatic baseline, or search its step count to success.
    Qaa {
        /// Search the smallest step count reaching fidelity 0.5.
        #[arg(long)]
        search: bool,
    },
    /// Eigenvalues of the total Hamiltonian along the sweep.
    Spectrum {
        /// Use the one-qubit toy target with a two-site comb.
        #[arg(long)]
        toy: bool,
        /// Time points [default: 201].
        #[arg(long)]
        points: Option<usize>,
    },
    /// Many runs from random initial states.
    Ensemble {
        /// Ensemble size [default: 100].
        #[arg(long)]
        members: Option<usize>,
        /// haar or basis [default: haar].
        #[arg(long, value_parser = parse_sampler)]
        sampler: Option<Sampler>,
    },
    /// Per-step gate counts.
    Gatecount {
        #[arg(long, default_value_t = 3)]
        nt: usize,
        #[arg(long, default_value_t = 3)]
        nc: usize,
        /// Include the longitudinal-field layer.
        #[arg(long)]
        with_b: bool,
        /// Print one Trotter step's gates.
        #[arg(long)]
        dump: bool,
    },
    /// Seeded random search over sweep parameters; writes a config file.
    Optimize {
        /// Number of sampled configurations [default: 20].
        #[arg(long)]
        budget: Option<usize>,
        /// Where to write the tuned config [default: <out>/optimized.toml].
        #[arg(long)]
        write_config: Option<PathBuf>,
    },
    /// Cost of the adiabatic baseline and single-comb runs over an h grid.
    Compare {
        /// Comma-separated h values (overrides compare.hs).
        #[arg(long, value_delimiter = ',')]
        hs: Option<Vec<f64>>,
    },
}

fn parse_format(s: &str) -> std::result::Result<Format, String> {
    match s {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        "both" => Ok(Format::Both),
        _ => Err(format!("expected csv, json or both, got `{s}`")),
    }
}

fn parse_mode(s: &str) -> std::result::Result<Mode, String> {
    match s {
        "emulate" => Ok(Mode::Emulate),
        "circuit" => Ok(Mode::Circuit),
        _ => Err(format!("expected emulate or circuit, got `{s}`")),
    }
}

fn parse_coupling(s: &str) -> std::result::Result<CouplingKind, String> {
    match s {
        "one_body_x" => Ok(CouplingKind::OneBodyX),
        "random_pattern" => Ok(CouplingKind::RandomPattern),
        _ => Err(format!("expected one_body_x or random_pattern, got `{s}`")),
    }
}

fn parse_sampler(s: &str) -> std::result::Result<Sampler, String> {
    match s {
        "haar" => Ok(Sampler::Haar),
        "basis" => Ok(Sampler::Basis),
        _ => Err(format!("expected haar or basis, got `{s}`")),
    }
}

/// Loads `--config` (if any) and applies flag overrides.
pub fn parse_config(args: &GlobalArgs) -> Result<AppConfig> {
    let mut c = match &args.config {
        Some(p) => AppConfig::load(p)?,
        None => AppConfig::default(),
    };
    macro_rules! set {
        ($flag:expr, $slot:expr) => {
            if let Some(v) = $flag.clone() {
                $slot = Some(v);
            }
        };
    }
    set!(args.nt, c.model.nt);
    set!(args.h, c.model.h);
    set!(args.b, c.model.b);
    set!(args.nc, c.comb.nc);
    set!(args.nu0, c.comb.nu0);
    set!(args.tf, c.comb.tf);
    set!(args.kappa, c.comb.kappa);
    set!(args.g, c.interaction.g);
    set!(args.coupling, c.interaction.coupling);
    set!(args.coupling_seed, c.interaction.coupling_seed);
    set!(args.eta, c.run.eta);
    set!(args.iters, c.run.n_iters);
    set!(args.mode, c.run.mode);
    set!(args.seed, c.run.seed);
    set!(args.format, c.output.format);
    if let Some(dir) = &args.out {
        c.output.dir = Some(dir.display().to_string());
    }
    // a step flag replaces whichever of steps/dt the file used
    if args.steps.is_some() || args.dt.is_some() {
        c.run.steps = args.steps;
        c.run.dt = args.dt;
    }
    Ok(c)
}

/// The run seed: from config/flags, otherwise fresh entropy, reported on
/// stderr so the run can be repeated.
pub fn resolve_seed(c: &mut AppConfig) -> u64 {
    match c.run.seed {
        Some(s) => s,
        None => {
            let s: u64 = rand::rng().random();
            eprintln!("seed: {s}");
            c.run.seed = Some(s);
            s
        }
    }
}

fn configure_threads(args: &GlobalArgs) -> Result<()> {
    let n = match args.threads {
        Some(n) => n,
        None => match std::env::var("COMBSIM_THREADS") {
            Ok(v) => {
                v.trim().parse().map_err(|_| Error::config("COMBSIM_THREADS", format!("not an integer: `{v}`")))?
            }
            Err(_) => 0,
        },
    };
    // a second call (in-process reuse) keeps the existing pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn out_dir(c: &AppConfig) -> Result<PathBuf> {
    let dir = PathBuf::from(c.output.dir.clone().unwrap_or_else(|| ".".into()));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn emit<P: crate::analysis::CsvProduct + serde::Serialize>(
    c: &AppConfig,
    name: &str,
    product: &P,
    meta: Metadata,
) -> Result<Vec<PathBuf>> {
    let dir = out_dir(c)?;
    let mut written = Vec::new();
    let fmt = c.output.format.unwrap_or(Format::Csv);
    if matches!(fmt, Format::Csv | Format::Both) {
        let p = dir.join(format!("{name}.csv"));
        write_csv_with_metadata(product, &meta, &p)?;
        written.push(p);
    }
    if matches!(fmt, Format::Json | Format::Both) {
        let p = dir.join(format!("{name}.json"));
        write_json(&Document { metadata: meta, data: product }, &p)?;
        written.push(p);
    }
    Ok(written)
}

fn report(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

/// Runs one parsed command line, returning the process exit code.
pub fn dispatch(cli: Cli) -> i32 {
    match run(cli) {
        Ok(()) => 0,
        Err(e @ Error::Config { .. }) => {
            eprintln!("error: {e}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

pub fn main() -> i32 {
    dispatch(Cli::parse())
}

fn run(cli: Cli) -> Result<()> {
    configure_threads(&cli.global)?;
    let mut c = parse_config(&cli.global)?;
    match cli.command {
        Command::Gatecount { nt, nc, with_b, dump } => gatecount(nt, nc, with_b, dump),
        Command::Comb { k } => {
            let seed = resolve_seed(&mut c);
            let target = c.target_model()?;
            let cfg = c.combing(seed)?;
            let k = k.unwrap_or(cfg.n_overlaps).min(1 << target.nt());
            let (traj, run) = overlap_trajectory(&cfg, &target, k)?;
            println!(
                "initial fidelity {:.6}  final fidelity {:.6}  steps {}{}",
                run.initial_fidelity,
                run.final_fidelity,
                run.total_steps,
                run.total_gates.map(|g| format!("  gates {g}")).unwrap_or_default()
            );
            let meta = Metadata::new("comb", vec![cfg.seed], Some(cfg.mode), &c)?;
            report(&emit(&c, "trajectory", &traj, meta)?);
            Ok(())
        }
        Command::Qaa { search } => {
            set_qaa_overrides(&mut c, &cli.global);
            let q = c.qaa()?;
            if search {
                let n = steps_to_success(&q.ising, SUCCESS_FIDELITY, q.dt, q.mode, c.qaa_cap())?;
                println!("steps to fidelity {SUCCESS_FIDELITY}: {n}");
            } else {
                let r = run_qaa(&q)?;
                println!("steps {}  fidelity {:.6}  gates {}", r.steps, r.fidelity, r.gates);
            }
            Ok(())
        }
        Command::Spectrum { toy, points } => {
            if toy {
                c.model.target = Some(TargetKind::Toy);
                c.comb.nc = Some(2);
                c.comb.kappa = Some(0.0);
            }
            let target = c.target_model()?;
            let cfg = c.combing(c.run.seed.unwrap_or(0))?;
            let times = time_grid(cfg.tf, points.or(c.spectrum.points).unwrap_or(201));
            let s = spectrum_sweep(&target, &cfg, &times)?;
            let meta = Metadata::new("spectrum", vec![], None, &c)?;
            report(&emit(&c, "spectrum", &s, meta)?);
            Ok(())
        }
        Command::Ensemble { members, sampler } => {
            let seed = resolve_seed(&mut c);
            let target = c.target_model()?;
            let cfg = c.combing(seed)?;
            let m = members.or(c.ensemble.members).unwrap_or(100);
            let sampler = sampler.or(c.ensemble.sampler).unwrap_or(Sampler::Haar);
            let recs = ensemble_success(&cfg, &target, m, sampler, cfg.seed)?;
            let (frac, median) = ensemble_summary(&recs);
            println!("members {m}  improved {:.1}%  median final fidelity {median:.6}", 100.0 * frac);
            let meta = Metadata::new("ensemble", vec![cfg.seed], Some(cfg.mode), &c)?;
            report(&emit(&c, "ensemble", &recs, meta)?);
            Ok(())
        }
        Command::Optimize { budget, write_config } => {
            let seed = resolve_seed(&mut c);
            let budget = budget.or(c.optimize.budget).unwrap_or(20);
            let path = match write_config {
                Some(p) => p,
                None => out_dir(&c)?.join("optimized.toml"),
            };
            optimize(&mut c, seed, budget, &path)
        }
        Command::Compare { hs } => {
            let hs =
                hs.or_else(|| c.compare.hs.clone()).ok_or_else(|| Error::config("compare.hs", "no h grid given"))?;
            let nt = c.ising()?.nt;
            let nc = c.comb.nc.unwrap_or(crate::config::DEFAULT_NC);
            let qmode = c.qaa.mode.unwrap_or(Mode::Emulate);
            let provider = |h: f64, budget: usize| c.sc_config(h, budget);
            let points = compare_cost(&hs, nt, nc, qmode, c.qaa_cap(), &provider)?;
            for p in &points {
                println!(
                    "{:<3} h={:<5} 1/gap={:<10.4} steps={:<8} gates={}",
                    p.method.to_string(),
                    p.h,
                    p.inv_gap,
                    p.steps.map(|s| s.to_string()).unwrap_or_else(|| "-".into()),
                    p.gates.map(|s| s.to_string()).unwrap_or_else(|| "-".into())
                );
            }
            let meta = Metadata::new("compare", vec![], Some(qmode), &c)?;
            report(&emit(&c, "cost", &points, meta)?);
            Ok(())
        }
    }
}

// --steps/--dt/--mode address the adiabatic run directly for `qaa`
fn set_qaa_overrides(c: &mut AppConfig, args: &GlobalArgs) {
    if args.steps.is_some() {
        c.qaa.steps = args.steps;
    }
    if args.dt.is_some() {
        c.qaa.dt = args.dt;
    }
    if args.mode.is_some() {
        c.qaa.mode = args.mode;
    }
}

fn gatecount(nt: usize, nc: usize, with_b: bool, dump: bool) -> Result<()> {
    if nt < 2 || nc < 3 {
        return Err(Error::config("gatecount", "needs nt >= 2 and nc >= 3"));
    }
    let closed = gate_count(nt, nc, with_b);
    let built = enumerated_gate_count(nt, nc, with_b)?;
    if closed != built {
        return Err(Error::InvalidParameter(format!("closed form {closed:?} disagrees with circuits {built:?}")));
    }
    println!("{}", closed.total);
    println!("target       {:>5} gates {:>4} rotations", closed.target.gates, closed.target.rotations);
    println!("comb         {:>5} gates {:>4} rotations", closed.comb.gates, closed.comb.rotations);
    println!("interaction  {:>5} gates {:>4} rotations", closed.interaction.gates, closed.interaction.rotations);
    println!("total        {:>5} gates {:>4} rotations", closed.total, closed.rotations);
    if dump {
        let ising = IsingParams::new(nt, 1.0).with_field(if with_b { 1.0 } else { 0.0 });
        let comb = CombParams::new(nc, 1.0, 0.1, vec![1.0; nc], 1.0)?;
        let ip = InteractionParams { g: 0.1, mode: crate::models::CouplingMode::OneBodyX };
        print!("{}", trotter_step_circuit(&ising, &comb, &ip, 0.0, 0.1, with_b)?.dump());
    }
    Ok(())
}

fn optimize(c: &mut AppConfig, seed: u64, budget: usize, path: &Path) -> Result<()> {
    let search_seed = c.optimize.seed.unwrap_or(seed);
    let objective = c.objective();
    let mut out = c.clone();
    out.output = Default::default();
    match c.optimize.target.unwrap_or(OptimizeFor::Run) {
        OptimizeFor::Run => {
            let target = c.target_model()?;
            let cfg = c.combing(seed)?;
            let eval = c.eval_seeds(&cfg, &target)?;
            let space = c.search_space(&TargetSpectrum::new(&target)?);
            let r = optimize_params(&cfg, &target, &space, objective, budget, search_seed, &eval)?;
            println!("best score {:.6} over {budget} samples", r.best_score);
            apply_best(&mut out, &r.best, eval[0]);
            let meta = Metadata::new("optimize", eval.clone(), Some(cfg.mode), &r)?;
            let p = out_dir(c)?.join("optimize.json");
            write_json(&Document { metadata: meta, data: &r.samples }, &p)?;
            report(&[p]);
        }
        OptimizeFor::Compare => {
            let hs = c.compare.hs.clone().ok_or_else(|| Error::config("compare.hs", "no h grid given"))?;
            let steps = c.optimize.steps.unwrap_or(50);
            let mut entries = Vec::new();
            for &h in &hs {
                let mut file = c.clone();
                file.model.h = Some(h);
                file.model.b = Some(-1.0);
                file.run.steps = Some(steps);
                file.run.dt = None;
                file.run.n_iters = Some(1);
                file.run.initial_state = Some(InitialKind::GroundStateBPlus1);
                let target = file.target_model()?;
                let cfg = file.combing(seed)?;
                let mut space = file.search_space(&TargetSpectrum::new(&target)?);
                space.eta = crate::combing::ParamRange::fixed(1.0);
                let r = optimize_params(&cfg, &target, &space, objective, budget, search_seed, &[cfg.seed])?;
                println!("h = {h}: best score {:.6}", r.best_score);
                entries.push(ScEntry {
                    h,
                    nu0: r.best.nu0,
                    tf: r.best.tf,
                    kappa: r.best.kappa,
                    g: r.best.g,
                    tuned_fidelity: (objective == crate::combing::Objective::NegGsFidelity).then_some(-r.best_score),
                });
            }
            out.compare.sc = entries;
        }
    }
    let header = format!(
        "# written by `combsim optimize` (budget {budget}, search seed {search_seed}, objective {objective:?})\n"
    );
    std::fs::write(path, header + &out.to_toml()?)?;
    report(&[path.to_path_buf()]);
    Ok(())
}

fn apply_best(out: &mut AppConfig, best: &CombingConfig, seed: u64) {
    out.comb.nu0 = Some(best.nu0);
    out.comb.tf = Some(best.tf);
    out.comb.kappa = Some(best.kappa);
    out.interaction.g = Some(best.g);
    out.run.eta = Some(best.eta);
    out.run.dt = None;
    out.run.steps = Some(best.steps_for(0));
    if best.iteration_steps.is_some() {
        out.run.steps = None;
    }
    out.run.seed = Some(seed);
}

/// Target model for a parsed config (exposed for tests).
pub fn target_of(c: &AppConfig) -> Result<TargetModel> {
    c.target_model()
}
