//! Data products: spectrum sweeps, overlap trajectories, ensembles and cost
//! tables, with CSV/JSON writers and readers.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use rand::Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::combing::{
    prepare_initial, run_batch, single_sweep, CombSystem, CombingConfig, Member, Mode, Recording, RunResult,
    SweepParams, TargetModel,
};
use crate::error::{Error, Result};
use crate::models::{comb_number_operator, nu_schedule};
use crate::pauli::{eigh, DenseOperator};
use crate::qaa::{CostPoint, Method};
use crate::statevector::{init_comb_product, random_target_state, seeded_rng, StateVector};

const STREAM_ENSEMBLE: u64 = 4;

/// Eigenvalues of the total Hamiltonian along the sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSweep {
    pub times: Vec<f64>,
    /// One ascending row per time.
    pub rows: Vec<Vec<f64>>,
}

/// `times` evenly spaced on `[0, tf]`, both ends included.
pub fn time_grid(tf: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        n => (0..n).map(|k| tf * k as f64 / (n - 1) as f64).collect(),
    }
}

pub fn spectrum_sweep(target: &TargetModel, cfg: &CombingConfig, times: &[f64]) -> Result<SpectrumSweep> {
    let sys = CombSystem::new(target, cfg)?;
    let h = sys.swept(cfg.g)?;
    let rows =
        times.iter().map(|&t| Ok(eigh(&h.at(nu_schedule(cfg.nu0, cfg.tf, t)?))?.values)).collect::<Result<Vec<_>>>()?;
    Ok(SpectrumSweep { times: times.to_vec(), rows })
}

/// The two-level toy: one target qubit with `ε = ν0/2`, a two-site comb
/// without the three-spin term.
pub fn toy_setup(nu0: f64, tf: f64, g: f64, steps: usize) -> (TargetModel, CombingConfig) {
    let cfg = CombingConfig::new(2, nu0, tf, 0.0, g, steps);
    (TargetModel::Toy { eps: nu0 / 2.0 }, cfg)
}

/// Orthonormal basis (as columns) of each eigenspace of a Hermitian
/// symmetry operator, keyed by its eigenvalue rounded to 1e-6.
pub fn symmetry_sectors(sym: &DenseOperator) -> Result<Vec<(f64, Vec<Vec<num_complex::Complex64>>)>> {
    let es = eigh(sym)?;
    let mut sectors: Vec<(f64, Vec<Vec<num_complex::Complex64>>)> = Vec::new();
    for k in 0..es.dim() {
        let v = es.values[k];
        match sectors.iter_mut().find(|(w, _)| (w - v).abs() < 1e-6) {
            Some((_, basis)) => basis.push(es.vector(k)),
            None => sectors.push(((v * 1e6).round() / 1e6, vec![es.vector(k)])),
        }
    }
    Ok(sectors)
}

fn restrict(h: &DenseOperator, basis: &[Vec<num_complex::Complex64>]) -> Result<DenseOperator> {
    let d = basis.len();
    let hb: Vec<Vec<num_complex::Complex64>> = basis.iter().map(|b| h.apply(b)).collect();
    let m = nalgebra::DMatrix::from_fn(d, d, |r, c| {
        basis[r].iter().zip(&hb[c]).map(|(a, b)| a.conj() * b).sum::<num_complex::Complex64>()
    });
    // sector blocks need not have power-of-two size; pad with a far-away diagonal
    let n = d.next_power_of_two().trailing_zeros() as usize;
    let full = 1usize << n;
    let pad = 1e6 * (1.0 + h.frobenius_norm());
    let padded = nalgebra::DMatrix::from_fn(full, full, |r, c| {
        if r < d && c < d {
            m[(r, c)]
        } else if r == c {
            num_complex::Complex64::new(pad, 0.0)
        } else {
            num_complex::Complex64::new(0.0, 0.0)
        }
    });
    DenseOperator::from_matrix(padded)
}

fn sector_values(h: &DenseOperator, basis: &[Vec<num_complex::Complex64>]) -> Result<Vec<f64>> {
    let mut v = eigh(&restrict(h, basis)?)?.values;
    v.truncate(basis.len());
    Ok(v)
}

/// A level crossing of the uncoupled (`g = 0`) spectrum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    /// Eigenvalue of the symmetry operator labelling the sector.
    pub sector: f64,
    pub t: f64,
    pub nu: f64,
    pub energy: f64,
    /// Smallest splitting of the levels meeting there once `g ≠ 0`.
    pub min_gap: f64,
}

/// Crossings of `E_a + ν k` curves (target level `a`, comb excitation `k`)
/// inside each symmetry sector, and the splitting each acquires with the
/// configured `g`. Levels in different sectors never mix, so only
/// same-sector crossings are reported; `protected` counts the rest.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CrossingReport {
    pub crossings: Vec<Crossing>,
    pub protected: usize,
}

/// `window` is the half-width (in `t`) scanned around each crossing,
/// sampled at `samples` points.
pub fn avoided_crossings(
    target: &TargetModel,
    cfg: &CombingConfig,
    sym: &DenseOperator,
    window: f64,
    samples: usize,
) -> Result<CrossingReport> {
    let sys = CombSystem::new(target, cfg)?;
    let nt = sys.nt();
    let nc = cfg.nc;
    let tvals = &sys.spectrum.eigen.values;
    let number = comb_number_operator(nc).to_dense();
    let h = sys.swept(cfg.g)?;
    let sectors = symmetry_sectors(sym)?;

    // labels (sector, target level, comb count, multiplicity) of the uncoupled problem
    let mut labels: Vec<(usize, f64, usize, usize)> = Vec::new();
    for (si, (_, basis)) in sectors.iter().enumerate() {
        for a in 0..1usize << nt {
            let va = sys.spectrum.eigen.vector(a);
            for k in 0..=nc {
                let weight: f64 = basis
                    .iter()
                    .map(|b| {
                        (0..1usize << nc)
                            .filter(|&c| (number.get(c, c).re - k as f64).abs() < 1e-9)
                            .map(|c| {
                                let blk = &b[c << nt..(c + 1) << nt];
                                blk.iter()
                                    .zip(&va)
                                    .map(|(x, y)| y.conj() * x)
                                    .sum::<num_complex::Complex64>()
                                    .norm_sqr()
                            })
                            .sum::<f64>()
                    })
                    .sum();
                // trace of a product of commuting projectors is the shared dimension
                if weight > 0.5 {
                    labels.push((si, tvals[a], k, weight.round() as usize));
                }
            }
        }
    }

    let mut crossings = Vec::new();
    let mut protected = 0;
    for (i, &(s1, e1, k1, _)) in labels.iter().enumerate() {
        for &(s2, e2, k2, _) in &labels[i + 1..] {
            if k1 == k2 {
                continue;
            }
            let nu = (e2 - e1) / (k1 as f64 - k2 as f64);
            if !(nu > 1e-12 && nu < cfg.nu0 - 1e-12) {
                continue;
            }
            if s1 != s2 {
                protected += 1;
                continue;
            }
            let t = cfg.tf * (1.0 - nu / cfg.nu0);
            let energy = e1 + nu * k1 as f64;
            // several label pairs can meet at one point
            if crossings.iter().any(|c: &Crossing| {
                c.sector == sectors[s1].0 && (c.t - t).abs() < 1e-9 && (c.energy - energy).abs() < 1e-9
            }) {
                continue;
            }
            let basis = &sectors[s1].1;
            // sorted position of the degenerate cluster in the uncoupled sector spectrum
            let below = labels
                .iter()
                .filter(|&&(s, e, k, _)| s == s1 && e + nu * (k as f64) < energy - 1e-9)
                .map(|&(_, _, _, m)| m)
                .sum::<usize>();
            let mut min_gap = f64::INFINITY;
            for j in 0..samples {
                let tt = (t - window + 2.0 * window * j as f64 / (samples.max(2) - 1) as f64).clamp(0.0, cfg.tf);
                let vals = sector_values(&h.at(nu_schedule(cfg.nu0, cfg.tf, tt)?), basis)?;
                if below + 1 < vals.len() {
                    min_gap = min_gap.min(vals[below + 1] - vals[below]);
                }
            }
            crossings.push(Crossing { sector: sectors[s1].0, t, nu, energy, min_gap });
        }
    }
    crossings.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.energy.total_cmp(&b.energy)));
    Ok(CrossingReport { crossings, protected })
}

/// Exchange of the two comb sites of a two-site comb, on the full register.
pub fn comb_swap_operator(nt: usize) -> DenseOperator {
    let n = nt + 2;
    let d = 1usize << n;
    let mut m = nalgebra::DMatrix::zeros(d, d);
    for i in 0..d {
        let a = i >> nt & 1;
        let b = i >> (nt + 1) & 1;
        let j = (i & !(0b11 << nt)) | (b << nt) | (a << (nt + 1));
        m[(j, i)] = num_complex::Complex64::new(1.0, 0.0);
    }
    DenseOperator::from_matrix(m).expect("power-of-two size")
}

/// Outcome of the slow-sweep search on the toy.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransferResult {
    pub tf: f64,
    pub steps: usize,
    pub initial_excited: f64,
    pub final_excited: f64,
    /// `1 − final/initial` for the excited target level.
    pub transferred: f64,
    pub final_ground: f64,
}

/// Starting from the excited target level with the comb in `|0…0⟩`, doubles
/// `tf` (at fixed `dt`) until at least `fraction` of the excited population
/// has left the target level in one emulated sweep.
pub fn slow_sweep_search(
    target: &TargetModel,
    cfg: &CombingConfig,
    fraction: f64,
    tf_start: f64,
    tf_cap: f64,
) -> Result<TransferResult> {
    let sys = CombSystem::new(target, cfg)?;
    let excited = StateVector::from_amplitudes(sys.spectrum.eigen.vector(1))?;
    let mut tf = tf_start;
    loop {
        let steps = (tf / cfg.dt).round().max(1.0) as usize;
        let sweep = SweepParams { g: cfg.g, nu0: cfg.nu0, tf, dt: tf / steps as f64, steps };
        let mut s = init_comb_product(&excited, cfg.nc);
        let traj = single_sweep(&sys, &mut s, &sweep, Mode::Emulate, 2)?;
        let first = &traj[0].overlaps;
        let last = &traj[traj.len() - 1].overlaps;
        let transferred = 1.0 - last[1] / first[1];
        if transferred >= fraction {
            return Ok(TransferResult {
                tf,
                steps,
                initial_excited: first[1],
                final_excited: last[1],
                transferred,
                final_ground: last[0],
            });
        }
        tf *= 2.0;
        if tf > tf_cap {
            return Err(Error::Diverged { cap: tf_cap as usize });
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampler {
    /// Haar-random target states.
    Haar,
    /// Uniformly chosen computational basis states.
    Basis,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleRecord {
    pub seed: u64,
    pub initial_fidelity: f64,
    pub final_fidelity: f64,
    pub steps: usize,
    /// Comb outcomes per measured iteration, `|`-separated bitstrings.
    pub outcomes: String,
}

/// Seed of ensemble member `i`.
pub fn member_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_add(i as u64)
}

/// `m` independent runs of `cfg`, member `i` seeded by [`member_seed`];
/// records are sorted by seed.
pub fn ensemble_success(
    cfg: &CombingConfig,
    target: &TargetModel,
    m: usize,
    sampler: Sampler,
    seed: u64,
) -> Result<Vec<EnsembleRecord>> {
    let nt = target.nt();
    let members: Vec<Member> = (0..m)
        .map(|i| {
            let s = member_seed(seed, i);
            let mut rng = seeded_rng(s, STREAM_ENSEMBLE);
            let initial = match sampler {
                Sampler::Haar => random_target_state(nt, &mut rng),
                Sampler::Basis => StateVector::basis(nt, rng.random_range(0..1usize << nt)),
            };
            Member { initial, seed: s }
        })
        .collect();
    let mut records: Vec<EnsembleRecord> = run_batch(cfg, target, &members, Recording::Endpoints)?
        .into_iter()
        .map(|r| EnsembleRecord {
            seed: r.seed,
            initial_fidelity: r.initial_fidelity,
            final_fidelity: r.final_fidelity,
            steps: r.total_steps,
            outcomes: r.outcomes().join("|"),
        })
        .collect();
    records.sort_by_key(|r| r.seed);
    Ok(records)
}

/// Share of records whose fidelity improved, and the median final fidelity.
pub fn ensemble_summary(records: &[EnsembleRecord]) -> (f64, f64) {
    if records.is_empty() {
        return (0.0, f64::NAN);
    }
    let improved = records.iter().filter(|r| r.final_fidelity > r.initial_fidelity).count();
    let mut f: Vec<f64> = records.iter().map(|r| r.final_fidelity).collect();
    f.sort_by(|a, b| a.total_cmp(b));
    let n = f.len();
    let median = if n % 2 == 1 { f[n / 2] } else { 0.5 * (f[n / 2 - 1] + f[n / 2]) };
    (improved as f64 / n as f64, median)
}

/// One row of a long-form overlap trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub iter: usize,
    pub step: usize,
    pub t: f64,
    pub energy: f64,
    /// `energy − E_gs`.
    pub residual: f64,
    pub overlaps: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub k: usize,
    pub rows: Vec<TrajectoryRow>,
    /// Global step index at which each iteration starts.
    pub iteration_starts: Vec<usize>,
}

/// Runs `cfg` from its configured initial state and flattens the recorded
/// sweeps, tracking `k` eigenstates.
pub fn overlap_trajectory(cfg: &CombingConfig, target: &TargetModel, k: usize) -> Result<(Trajectory, RunResult)> {
    if k == 0 || k > 1 << target.nt() {
        return Err(Error::InvalidParameter(format!("K = {k} must lie in 1..={}", 1usize << target.nt())));
    }
    let mut cfg = cfg.clone();
    cfg.n_overlaps = k;
    cfg.validate()?;
    let init = prepare_initial(cfg.initial_state, target, cfg.seed)?;
    let run = run_batch(&cfg, target, &[Member { initial: init, seed: cfg.seed }], Recording::EveryStep)?.remove(0);
    let e0 = CombSystem::new(target, &cfg)?.spectrum.ground_energy();
    let mut rows = Vec::new();
    let mut starts = Vec::new();
    let mut offset = 0;
    for it in &run.iterations {
        starts.push(offset);
        for p in &it.trajectory {
            rows.push(TrajectoryRow {
                iter: it.index,
                step: offset + p.step,
                t: p.t,
                energy: p.energy,
                residual: p.energy - e0,
                overlaps: p.overlaps.clone(),
            });
        }
        offset += it.steps;
    }
    Ok((Trajectory { k, rows, iteration_starts: starts }, run))
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim().parse().map_err(|e| Error::Parse(format!("bad number `{s}`: {e}")))
}

fn parse_usize(s: &str) -> Result<usize> {
    s.trim().parse().map_err(|e| Error::Parse(format!("bad integer `{s}`: {e}")))
}

fn write_table(path: &Path, header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut r = csv::Reader::from_reader(BufReader::new(File::open(path)?));
    let header = r.headers()?.iter().map(String::from).collect();
    let rows =
        r.records().map(|rec| Ok(rec?.iter().map(String::from).collect())).collect::<Result<Vec<Vec<String>>>>()?;
    Ok((header, rows))
}

/// Products with a fixed CSV schema.
pub trait CsvProduct: Sized {
    fn header(&self) -> Vec<String>;
    fn rows(&self) -> Vec<Vec<String>>;
    fn from_table(header: &[String], rows: &[Vec<String>]) -> Result<Self>;
}

impl CsvProduct for SpectrumSweep {
    fn header(&self) -> Vec<String> {
        let n = self.rows.first().map_or(0, Vec::len);
        std::iter::once("t".to_string()).chain((0..n).map(|k| format!("e{k}"))).collect()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.times
            .iter()
            .zip(&self.rows)
            .map(|(t, r)| std::iter::once(fmt_f64(*t)).chain(r.iter().map(|&e| fmt_f64(e))).collect())
            .collect()
    }

    fn from_table(_header: &[String], rows: &[Vec<String>]) -> Result<Self> {
        let mut times = Vec::new();
        let mut vals = Vec::new();
        for r in rows {
            times.push(parse_f64(&r[0])?);
            vals.push(r[1..].iter().map(|s| parse_f64(s)).collect::<Result<Vec<_>>>()?);
        }
        Ok(SpectrumSweep { times, rows: vals })
    }
}

impl CsvProduct for Trajectory {
    fn header(&self) -> Vec<String> {
        ["iter", "step", "t", "energy", "residual"]
            .iter()
            .map(|s| s.to_string())
            .chain((0..self.k).map(|j| format!("ov{j}")))
            .collect()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                let mut v =
                    vec![r.iter.to_string(), r.step.to_string(), fmt_f64(r.t), fmt_f64(r.energy), fmt_f64(r.residual)];
                v.extend(r.overlaps.iter().map(|&x| fmt_f64(x)));
                v
            })
            .collect()
    }

    fn from_table(header: &[String], rows: &[Vec<String>]) -> Result<Self> {
        let k = header.len().checked_sub(5).ok_or_else(|| Error::Parse("trajectory header too short".into()))?;
        let rows = rows
            .iter()
            .map(|r| {
                Ok(TrajectoryRow {
                    iter: parse_usize(&r[0])?,
                    step: parse_usize(&r[1])?,
                    t: parse_f64(&r[2])?,
                    energy: parse_f64(&r[3])?,
                    residual: parse_f64(&r[4])?,
                    overlaps: r[5..].iter().map(|s| parse_f64(s)).collect::<Result<_>>()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut starts = Vec::new();
        let mut last = None;
        for r in &rows {
            if last != Some(r.iter) {
                starts.push(r.step);
                last = Some(r.iter);
            }
        }
        Ok(Trajectory { k, rows, iteration_starts: starts })
    }
}

impl CsvProduct for Vec<EnsembleRecord> {
    fn header(&self) -> Vec<String> {
        ["seed", "initial_fidelity", "final_fidelity", "steps", "outcomes"].iter().map(|s| s.to_string()).collect()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.iter()
            .map(|r| {
                vec![
                    r.seed.to_string(),
                    fmt_f64(r.initial_fidelity),
                    fmt_f64(r.final_fidelity),
                    r.steps.to_string(),
                    r.outcomes.clone(),
                ]
            })
            .collect()
    }

    fn from_table(_header: &[String], rows: &[Vec<String>]) -> Result<Self> {
        rows.iter()
            .map(|r| {
                Ok(EnsembleRecord {
                    seed: r[0].trim().parse().map_err(|e| Error::Parse(format!("bad seed: {e}")))?,
                    initial_fidelity: parse_f64(&r[1])?,
                    final_fidelity: parse_f64(&r[2])?,
                    steps: parse_usize(&r[3])?,
                    outcomes: r[4].clone(),
                })
            })
            .collect()
    }
}

impl CsvProduct for Vec<CostPoint> {
    fn header(&self) -> Vec<String> {
        ["method", "h", "delta", "inv_gap", "steps", "gates"].iter().map(|s| s.to_string()).collect()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let opt = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
        self.iter()
            .map(|c| {
                vec![
                    c.method.to_string(),
                    fmt_f64(c.h),
                    fmt_f64(c.delta),
                    fmt_f64(c.inv_gap),
                    opt(c.steps),
                    opt(c.gates),
                ]
            })
            .collect()
    }

    fn from_table(_header: &[String], rows: &[Vec<String>]) -> Result<Self> {
        let opt = |s: &str| -> Result<Option<usize>> {
            if s.trim().is_empty() {
                Ok(None)
            } else {
                parse_usize(s).map(Some)
            }
        };
        rows.iter()
            .map(|r| {
                let method = match r[0].as_str() {
                    "QAA" => Method::Qaa,
                    "SC" => Method::Sc,
                    other => return Err(Error::Parse(format!("unknown method `{other}`"))),
                };
                Ok(CostPoint {
                    method,
                    h: parse_f64(&r[1])?,
                    delta: parse_f64(&r[2])?,
                    inv_gap: parse_f64(&r[3])?,
                    steps: opt(&r[4])?,
                    gates: opt(&r[5])?,
                })
            })
            .collect()
    }
}

pub fn write_csv<P: CsvProduct>(product: &P, path: &Path) -> Result<()> {
    write_table(path, &product.header(), product.rows())
}

pub fn read_csv<P: CsvProduct>(path: &Path) -> Result<P> {
    let (header, rows) = read_table(path)?;
    P::from_table(&header, &rows)
}

/// Provenance attached to every emitted file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub command: String,
    pub version: String,
    pub seeds: Vec<u64>,
    pub mode: Option<Mode>,
    /// The full configuration that produced the product.
    pub config: serde_json::Value,
}

impl Metadata {
    pub fn new(command: &str, seeds: Vec<u64>, mode: Option<Mode>, config: &impl Serialize) -> Result<Self> {
        Ok(Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seeds,
            mode,
            config: serde_json::to_value(config)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Document<T> {
    pub metadata: Metadata,
    pub data: T,
}

pub fn write_json<T: Serialize>(doc: &Document<T>, path: &Path) -> Result<()> {
    let w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(w, doc)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<Document<T>> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}

/// Writes `<path>` as CSV and `<path>.meta.json` alongside it.
pub fn write_csv_with_metadata<P: CsvProduct>(product: &P, meta: &Metadata, path: &Path) -> Result<()> {
    write_csv(product, path)?;
    let mut side = path.as_os_str().to_owned();
    side.push(".meta.json");
    serde_json::to_writer_pretty(BufWriter::new(File::create(Path::new(&side))?), meta)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints() {
        assert_eq!(time_grid(10.0, 3), vec![0.0, 5.0, 10.0]);
        assert!(time_grid(1.0, 0).is_empty());
    }

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 123_456_789.123_456_78, f64::MIN_POSITIVE] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn toy_spectrum_at_zero_coupling() {
        let (t, mut cfg) = toy_setup(2.0, 10.0, 0.0, 100);
        cfg.g = 0.0;
        let s = spectrum_sweep(&t, &cfg, &[0.0, 10.0]).unwrap();
        // ε = 1, ν = 2 at t = 0: {0, 1, 2, 2, 3, 3, 4, 5}
        let expect = [0.0, 1.0, 2.0, 2.0, 3.0, 3.0, 4.0, 5.0];
        for (a, b) in s.rows[0].iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
        // ν = 0: each target level four-fold
        let end = [0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0];
        for (a, b) in s.rows[1].iter().zip(end) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn swap_operator_is_an_involution() {
        let s = comb_swap_operator(1);
        assert!(s.matmul(&s).max_abs_diff(&DenseOperator::identity(3)) < 1e-15);
        assert!(s.is_hermitian(1e-15));
    }

    #[test]
    fn summary_median() {
        let rec = |i: f64, f: f64| EnsembleRecord {
            seed: 0,
            initial_fidelity: i,
            final_fidelity: f,
            steps: 1,
            outcomes: String::new(),
        };
        let (frac, med) = ensemble_summary(&[rec(0.1, 0.2), rec(0.5, 0.4), rec(0.3, 0.9)]);
        assert!((frac - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(med, 0.4);
    }
}
