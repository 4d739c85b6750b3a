//! Monte Carlo experiment harness.
//!
//! Ties the channel model, training algorithms, and genie baselines together
//! into repeatable experiments: a [`ScenarioConfig`] describes one operating
//! point, [`run_trial`] simulates a single seeded realization block by block,
//! and [`run_monte_carlo`] averages many independent trials into
//! [`CurveRecord`] rows ready for CSV/JSON export. [`sweep`] re-runs a base
//! scenario across one swept axis, reusing the same base seed at every axis
//! value so that curves are paired (common random numbers).
//!
//! # Reproducibility
//!
//! All randomness descends from one `u64` seed. Trial `i` gets its own seed
//! via [`trial_seed`], and each trial splits into five independent ChaCha
//! sub-streams (channel evolution, receiver noise, beam/filter init, pilot
//! symbols, payload data). Adding trials or reordering the trial loop never
//! perturbs the draws inside any existing trial, and results are invariant
//! to the worker-thread count.

mod emit;
mod presets;

pub use emit::{parse_csv, parse_json, render, write_records, EmitFormat, CSV_HEADER};
pub use presets::{preset, preset_names, preset_with};

use std::path::Path;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Deserialize;
use thiserror::Error;

use crate::adapt::{
    decision_directed_refresh, default_ridge_floor, run_forward_only_block, run_ls_block,
    run_rls_block, RlsLinkStates, Schedule, TrainingBudget,
};
use crate::channel::{init_channels, FadingParams};
use crate::maxsinr::run_maxsinr;
use crate::numerics::C64;
use crate::phy::{
    gen_training, sum_rate, synth_forward, throughput, LinkState, NetworkConfig, PhyError,
    PilotScheme, TrainingMatrix,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Iteration cap for the warm-started genie fixed point; the residual-based
/// early stop in [`run_maxsinr`] usually exits far sooner on slowly varying
/// channels.
const GENIE_MAX_ITERS: usize = 100;

/// Errors from configuration, execution, or result serialization.
#[derive(Debug, Error)]
pub enum HarnessError {
    /// The scenario description is self-inconsistent (bad ranges, training
    /// longer than the block, axis value not representable, ...).
    #[error("invalid scenario: {0}")]
    ConfigInvalid(String),
    /// The JSON config file could not be interpreted.
    #[error("failed to parse scenario config: {0}")]
    ConfigParse(String),
    /// A previously emitted results table could not be read back.
    #[error("malformed results table: {0}")]
    TableParse(String),
    /// Filesystem failure while loading configs or writing results.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    /// Physical-layer rejection surfaced verbatim.
    #[error(transparent)]
    Phy(#[from] PhyError),
}

/// Which adaptation algorithm drives each block of a scenario.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    /// Perfect-CSI fixed point, warm-started from the previous block and
    /// iterated to convergence. Upper reference; zero training overhead.
    MaxsinrGenie,
    /// Perfect-CSI single sweep (one receiver pass, one transmitter pass)
    /// per block. Tracking reference for time-varying channels.
    GeniePerBlock,
    /// Bi-directional least-squares training ([`run_ls_block`]).
    BidirLs,
    /// Bi-directional recursive least squares ([`run_rls_block`]).
    BidirRls,
    /// Forward-only training; transmit beams stay fixed
    /// ([`run_forward_only_block`]).
    ForwardOnly,
}

impl Algorithm {
    /// True for schemes that estimate filters from received samples (and can
    /// therefore use decision-directed refresh), false for the genies.
    pub fn is_trained(self) -> bool {
        matches!(
            self,
            Algorithm::BidirLs | Algorithm::BidirRls | Algorithm::ForwardOnly
        )
    }

    /// Canonical config-file name.
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::MaxsinrGenie => "maxsinr_genie",
            Algorithm::GeniePerBlock => "genie_per_block",
            Algorithm::BidirLs => "bidir_ls",
            Algorithm::BidirRls => "bidir_rls",
            Algorithm::ForwardOnly => "forward_only",
        }
    }

    fn parse(s: &str) -> Result<Self, HarnessError> {
        match s {
            "maxsinr_genie" => Ok(Algorithm::MaxsinrGenie),
            "genie_per_block" => Ok(Algorithm::GeniePerBlock),
            "bidir_ls" => Ok(Algorithm::BidirLs),
            "bidir_rls" => Ok(Algorithm::BidirRls),
            "forward_only" => Ok(Algorithm::ForwardOnly),
            other => Err(HarnessError::ConfigParse(format!(
                "unknown algorithm {other:?}; expected one of maxsinr_genie, \
                 genie_per_block, bidir_ls, bidir_rls, forward_only"
            ))),
        }
    }
}

/// Complete description of one experiment: network, fading, training budget,
/// algorithm, operating point, and Monte Carlo extent.
#[derive(Clone, Debug)]
pub struct ScenarioConfig {
    /// Label used in result rows and output file names.
    pub scenario_id: String,
    /// Network geometry and power/noise levels. `noise_var` is always kept
    /// consistent with `snr_db[0]` (SNR in dB maps to `10^(-snr/10)`).
    pub network: NetworkConfig,
    /// Gauss-Markov fading parameters shared by every link.
    pub fading: FadingParams,
    /// Total symbols per block (training plus payload).
    pub block_len: usize,
    /// Training symbols per phase, cycle count, and phase order.
    pub budget: TrainingBudget,
    /// Adaptation scheme run on every block.
    pub algorithm: Algorithm,
    /// RLS forgetting factor in `(0, 1]` (ignored by other algorithms).
    pub lambda: f64,
    /// RLS initial inverse-correlation scale, `P = I / delta` (ignored by
    /// other algorithms).
    pub delta: f64,
    /// Operating SNR points in dB. Single-point scenarios run directly;
    /// multi-point scenarios are expanded via [`sweep`] over the SNR axis.
    pub snr_db: Vec<f64>,
    /// Fading blocks simulated per trial.
    pub n_blocks: usize,
    /// Independent trials averaged per curve point.
    pub n_trials: usize,
    /// Base seed; trial `i` derives its own via [`trial_seed`].
    pub seed: u64,
    /// Refit each receive filter from detected payload symbols at the end of
    /// every block (trained algorithms only; recorded rates are pre-refresh).
    pub decision_directed: bool,
}

/// Noise variance at a given SNR in dB, under unit transmit power and
/// unit-variance channel entries: `10^(-snr_db / 10)`.
pub fn noise_var_for_snr_db(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

impl ScenarioConfig {
    /// Copy of this scenario pinned to a single SNR point, with `noise_var`
    /// updated to match.
    pub fn with_snr(&self, snr_db: f64) -> ScenarioConfig {
        let mut out = self.clone();
        out.snr_db = vec![snr_db];
        out.network.noise_var = noise_var_for_snr_db(snr_db);
        out
    }

    /// Training overhead in symbols per block for the configured algorithm.
    pub fn overhead_symbols(&self) -> usize {
        match self.algorithm {
            Algorithm::MaxsinrGenie | Algorithm::GeniePerBlock => 0,
            Algorithm::BidirLs => 2 * self.budget.m * self.budget.cycles,
            Algorithm::BidirRls => 2 * self.budget.m,
            Algorithm::ForwardOnly => self.budget.m,
        }
    }

    /// Rejects self-inconsistent scenarios with a description of the first
    /// problem found.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let fail = |msg: String| Err(HarnessError::ConfigInvalid(msg));
        if self.scenario_id.is_empty() {
            return fail("scenario_id must be non-empty".into());
        }
        if self.scenario_id.contains(',') || self.scenario_id.contains(char::is_whitespace) {
            return fail(format!(
                "scenario_id {:?} must not contain commas or whitespace",
                self.scenario_id
            ));
        }
        if self.network.k_users == 0 || self.network.n_t == 0 || self.network.n_r == 0 {
            return fail("users, n_t, and n_r must all be at least 1".into());
        }
        if !(self.network.p_max > 0.0 && self.network.p_max.is_finite()) {
            return fail(format!(
                "p_max {} must be positive and finite",
                self.network.p_max
            ));
        }
        if self.snr_db.is_empty() {
            return fail("snr_db must list at least one operating point".into());
        }
        if let Some(bad) = self.snr_db.iter().find(|s| !s.is_finite()) {
            return fail(format!("snr_db contains non-finite value {bad}"));
        }
        let expected_noise = noise_var_for_snr_db(self.snr_db[0]);
        if (self.network.noise_var - expected_noise).abs() > 1e-12 * expected_noise {
            return fail(format!(
                "noise_var {} does not match snr_db[0] = {} dB (expected {})",
                self.network.noise_var, self.snr_db[0], expected_noise
            ));
        }
        if self.block_len == 0 {
            return fail("block_len must be at least 1".into());
        }
        if self.budget.m == 0 {
            return fail("training length m must be at least 1".into());
        }
        if self.budget.cycles == 0 {
            return fail("cycles must be at least 1".into());
        }
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return fail(format!("lambda {} must lie in (0, 1]", self.lambda));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return fail(format!("delta {} must be positive and finite", self.delta));
        }
        if self.n_blocks == 0 {
            return fail("n_blocks must be at least 1".into());
        }
        if self.n_trials == 0 {
            return fail("n_trials must be at least 1".into());
        }
        let overhead = self.overhead_symbols();
        if overhead > self.block_len {
            return fail(format!(
                "training overhead {} symbols exceeds block_len {}",
                overhead, self.block_len
            ));
        }
        Ok(())
    }
}

/// Flat on-disk JSON schema. Unknown keys are rejected so typos fail loudly.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FlatConfig {
    scenario_id: Option<String>,
    users: usize,
    n_t: usize,
    n_r: usize,
    p_max: Option<f64>,
    active_users: Option<Vec<bool>>,
    alpha: f64,
    entry_variance: Option<f64>,
    block_len: usize,
    m: usize,
    cycles: Option<usize>,
    schedule: Option<String>,
    algorithm: String,
    lambda: Option<f64>,
    delta: Option<f64>,
    snr_db: Vec<f64>,
    n_blocks: usize,
    n_trials: usize,
    seed: u64,
    decision_directed: Option<bool>,
}

/// Parses a scenario from its flat JSON text form. See the crate README for
/// the schema; omitted optional keys take the documented defaults.
pub fn parse_config(json: &str) -> Result<ScenarioConfig, HarnessError> {
    let flat: FlatConfig =
        serde_json::from_str(json).map_err(|e| HarnessError::ConfigParse(e.to_string()))?;
    let fail = |msg: String| Err(HarnessError::ConfigInvalid(msg));

    if flat.users == 0 || flat.n_t == 0 || flat.n_r == 0 {
        return fail("users, n_t, and n_r must all be at least 1".into());
    }
    let p_max = flat.p_max.unwrap_or(1.0);
    if !(p_max > 0.0 && p_max.is_finite()) {
        return fail(format!("p_max {p_max} must be positive and finite"));
    }
    let entry_variance = flat.entry_variance.unwrap_or(1.0);
    if !(entry_variance > 0.0 && entry_variance.is_finite()) {
        return fail(format!(
            "entry_variance {entry_variance} must be positive and finite"
        ));
    }
    if !(0.0..=1.0).contains(&flat.alpha) {
        return fail(format!("alpha {} must lie in [0, 1]", flat.alpha));
    }
    if flat.snr_db.is_empty() {
        return fail("snr_db must list at least one operating point".into());
    }
    let noise_var = noise_var_for_snr_db(flat.snr_db[0]);
    let mut network = NetworkConfig::new(flat.users, flat.n_t, flat.n_r, p_max, noise_var);
    if let Some(active) = flat.active_users {
        if active.len() != flat.users {
            return fail(format!(
                "active_users has {} entries but users = {}",
                active.len(),
                flat.users
            ));
        }
        if !active.iter().any(|&a| a) {
            return fail("active_users must enable at least one user".into());
        }
        network = network.with_active(active);
    }
    let schedule = match flat.schedule.as_deref() {
        None | Some("backward_first") => Schedule::BackwardFirst,
        Some("forward_first") => Schedule::ForwardFirst,
        Some(other) => {
            return Err(HarnessError::ConfigParse(format!(
                "unknown schedule {other:?}; expected backward_first or forward_first"
            )))
        }
    };
    if flat.m == 0 {
        return fail("training length m must be at least 1".into());
    }
    if flat.cycles == Some(0) {
        return fail("cycles must be at least 1".into());
    }
    let cfg = ScenarioConfig {
        scenario_id: flat.scenario_id.unwrap_or_else(|| "scenario".into()),
        network,
        fading: FadingParams::new(flat.alpha, entry_variance),
        block_len: flat.block_len,
        budget: TrainingBudget::new(flat.m, flat.cycles.unwrap_or(1), schedule),
        algorithm: Algorithm::parse(&flat.algorithm)?,
        lambda: flat.lambda.unwrap_or(1.0),
        delta: flat.delta.unwrap_or(0.01),
        snr_db: flat.snr_db,
        n_blocks: flat.n_blocks,
        n_trials: flat.n_trials,
        seed: flat.seed,
        decision_directed: flat.decision_directed.unwrap_or(false),
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Loads and validates a scenario config from a JSON file.
pub fn load_config(path: &Path) -> Result<ScenarioConfig, HarnessError> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

/// One step of the SplitMix64 output function, used as a stateless avalanche
/// mix: close inputs map to statistically unrelated outputs.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed for trial `trial_index` from a scenario's base seed.
/// Both arguments are avalanche-mixed, so neighbouring trial indices (and
/// neighbouring base seeds) yield unrelated streams.
pub fn trial_seed(base_seed: u64, trial_index: u64) -> u64 {
    splitmix64(base_seed ^ splitmix64(trial_index))
}

// Sub-stream tags. Each per-trial RNG is seeded from the trial seed and one
// of these, keeping channel evolution, receiver noise, initial beam draws,
// pilot symbols, and payload data mutually independent and individually
// reproducible.
const STREAM_CHANNEL: u64 = 1;
const STREAM_NOISE: u64 = 2;
const STREAM_INIT: u64 = 3;
const STREAM_PILOT: u64 = 4;
const STREAM_DATA: u64 = 5;

fn stream(trial_seed: u64, tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(trial_seed ^ splitmix64(tag)))
}

/// Per-block outcome of one trial.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockMetrics {
    /// 1-based index within the trial.
    pub block_index: u64,
    /// Instantaneous sum rate in bits/s/Hz after this block's adaptation.
    pub sum_rate_bits: f64,
    /// Sum rate discounted by the training fraction of the block.
    pub throughput_bits: f64,
    /// Training symbols spent in this block.
    pub overhead_symbols: usize,
}

/// All blocks of a single seeded realization.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialResult {
    /// Seed this trial actually ran under (already mixed via [`trial_seed`]).
    pub trial_seed: u64,
    /// One entry per fading block, in simulation order.
    pub blocks: Vec<BlockMetrics>,
}

/// Random BPSK payload: entries drawn uniformly from {+1, -1}.
fn bpsk_payload(k_users: usize, len: usize, rng: &mut ChaCha8Rng) -> TrainingMatrix {
    use rand::Rng;
    let symbols = DMatrix::from_fn(k_users, len, |_, _| {
        if rng.random::<bool>() {
            C64::new(1.0, 0.0)
        } else {
            C64::new(-1.0, 0.0)
        }
    });
    TrainingMatrix { symbols }
}

/// Simulates one seeded realization of a single-SNR scenario, block by
/// block: evolve the channel, adapt with the configured algorithm, record
/// sum rate and throughput, then (optionally) run the decision-directed
/// filter refresh whose benefit lands in the next block.
pub fn run_trial(cfg: &ScenarioConfig, seed: u64) -> Result<TrialResult, HarnessError> {
    cfg.validate()?;
    if cfg.snr_db.len() != 1 {
        return Err(HarnessError::ConfigInvalid(
            "run_trial needs a single snr_db point; use sweep for multi-SNR scenarios".into(),
        ));
    }
    let net = &cfg.network;
    let k = net.k_users;
    let mut ch_rng = stream(seed, STREAM_CHANNEL);
    let mut noise_rng = stream(seed, STREAM_NOISE);
    let mut init_rng = stream(seed, STREAM_INIT);
    let mut pilot_rng = stream(seed, STREAM_PILOT);
    let mut data_rng = stream(seed, STREAM_DATA);

    let mut ch = init_channels(k, net.n_t, net.n_r, &cfg.fading, &mut ch_rng);
    let mut state = LinkState::random_isotropic(net, &mut init_rng);
    let mut rls = match cfg.algorithm {
        Algorithm::BidirRls => Some(RlsLinkStates::new(net, cfg.lambda, cfg.delta)),
        _ => None,
    };

    // Orthogonal pilots exist whenever each user can get its own row; they
    // are deterministic, so one matrix serves every block. Shorter budgets
    // fall back to fresh random QPSK pilots per phase and per block.
    let m = cfg.budget.m;
    let orthogonal = m >= k;
    let fixed_pilots = if orthogonal && cfg.algorithm.is_trained() {
        Some(gen_training(k, m, PilotScheme::Orthogonal, &mut pilot_rng)?)
    } else {
        None
    };

    let mut blocks = Vec::with_capacity(cfg.n_blocks);
    for block_index in 1..=cfg.n_blocks as u64 {
        ch = crate::channel::evolve(&ch, &cfg.fading, &mut ch_rng);

        let fresh_pilots = |rng: &mut ChaCha8Rng| -> Result<TrainingMatrix, PhyError> {
            gen_training(k, m, PilotScheme::RandomQpsk, rng)
        };
        let overhead = match cfg.algorithm {
            Algorithm::MaxsinrGenie => {
                let report = run_maxsinr(&ch, &state.beams, net, GENIE_MAX_ITERS);
                state = report.final_state;
                0
            }
            Algorithm::GeniePerBlock => {
                let report = run_maxsinr(&ch, &state.beams, net, 1);
                state = report.final_state;
                0
            }
            Algorithm::BidirLs => {
                let (pf, pb) = match &fixed_pilots {
                    Some(p) => (p.clone(), p.clone()),
                    None => (fresh_pilots(&mut pilot_rng)?, fresh_pilots(&mut pilot_rng)?),
                };
                let (next, used) =
                    run_ls_block(&ch, &state, &cfg.budget, &pf, &pb, net, &mut noise_rng);
                state = next;
                used
            }
            Algorithm::BidirRls => {
                let (pf, pb) = match &fixed_pilots {
                    Some(p) => (p.clone(), p.clone()),
                    None => (fresh_pilots(&mut pilot_rng)?, fresh_pilots(&mut pilot_rng)?),
                };
                let rls_in = rls.as_ref().expect("rls state present for bidir_rls");
                let (next, rls_out, used) =
                    run_rls_block(&ch, &state, rls_in, &pf, &pb, net, &mut noise_rng);
                state = next;
                rls = Some(rls_out);
                used
            }
            Algorithm::ForwardOnly => {
                let pilots = match &fixed_pilots {
                    Some(p) => p.clone(),
                    None => fresh_pilots(&mut pilot_rng)?,
                };
                let (next, used) =
                    run_forward_only_block(&ch, &state, &pilots, net, &mut noise_rng);
                state = next;
                used
            }
        };

        let rate = sum_rate(&ch, &state, net);
        let thr = throughput(rate, overhead, cfg.block_len)?;
        blocks.push(BlockMetrics {
            block_index,
            sum_rate_bits: rate,
            throughput_bits: thr,
            overhead_symbols: overhead,
        });

        // Payload pass: detect this block's data with the just-trained
        // filters and refit them. Rates above were recorded first, so the
        // refresh only influences the blocks that follow.
        let data_len = cfg.block_len - overhead;
        if cfg.decision_directed && cfg.algorithm.is_trained() && data_len > 0 {
            let payload = bpsk_payload(k, data_len, &mut data_rng);
            let received = synth_forward(&ch, &state.beams, &payload, net, &mut noise_rng);
            for user in net.active_users() {
                let floor = default_ridge_floor(&received[user].samples);
                match decision_directed_refresh(
                    &received[user],
                    &state.filters[user],
                    net.p_max,
                    floor,
                ) {
                    Ok(g) => state.filters[user] = g,
                    Err(e) => log::warn!(
                        "decision-directed refresh failed for user {user}: {e}; keeping filter"
                    ),
                }
            }
        }
    }
    Ok(TrialResult {
        trial_seed: seed,
        blocks,
    })
}

/// Identifies a result row: one fading-block index, or the per-trial average
/// over all blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockKey {
    /// Statistics of one block position across trials (1-based).
    Index(u64),
    /// Statistics of the per-trial means over all blocks.
    Average,
}

/// One exported curve point: cross-trial statistics at a fixed scenario,
/// axis value, and block position.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveRecord {
    /// Scenario label (shared by every row of one experiment).
    pub scenario_id: String,
    /// Value of the swept axis, or `0.0` for plain (non-swept) runs.
    pub axis_value: f64,
    /// Operating SNR in dB.
    pub snr_db: f64,
    /// Fading coefficient.
    pub alpha: f64,
    /// RLS forgetting factor (carried for traceability even when unused).
    pub lambda: f64,
    /// Training symbols per phase.
    pub m: u64,
    /// Training cycles per block.
    pub cycles: u64,
    /// Block position this row summarizes.
    pub block: BlockKey,
    /// Mean sum rate across trials, bits/s/Hz.
    pub sum_rate_bits_mean: f64,
    /// Standard error of the sum-rate mean (0 for a single trial).
    pub sum_rate_stderr: f64,
    /// Mean throughput across trials, bits/s/Hz.
    pub throughput_bits_mean: f64,
    /// Standard error of the throughput mean.
    pub throughput_stderr: f64,
    /// Trials aggregated into this row.
    pub n_trials: u64,
    /// Base seed the scenario ran under.
    pub seed: u64,
}

/// Sample mean and standard error of the mean (unbiased variance; stderr is
/// 0 when fewer than two samples exist).
fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Worker-thread count requested via the `SIM_THREADS` environment variable.
/// Unset, empty, or `0` means "let rayon decide".
fn sim_threads() -> Option<usize> {
    match std::env::var("SIM_THREADS") {
        Ok(v) if !v.trim().is_empty() => match v.trim().parse::<usize>() {
            Ok(0) => None,
            Ok(n) => Some(n),
            Err(_) => {
                log::warn!("ignoring unparseable SIM_THREADS={v:?}");
                None
            }
        },
        _ => None,
    }
}

/// Runs all trials of a single-SNR scenario and aggregates them into rows:
/// one per block index plus one [`BlockKey::Average`] row. `axis_value` is
/// stamped into every row (plain runs pass 0.0).
pub(crate) fn monte_carlo_records(
    cfg: &ScenarioConfig,
    axis_value: f64,
) -> Result<Vec<CurveRecord>, HarnessError> {
    cfg.validate()?;
    if cfg.snr_db.len() != 1 {
        return Err(HarnessError::ConfigInvalid(
            "monte carlo runs need a single snr_db point; use sweep for multi-SNR scenarios"
                .into(),
        ));
    }
    let run_all = || -> Result<Vec<TrialResult>, HarnessError> {
        (0..cfg.n_trials as u64)
            .into_par_iter()
            .map(|i| run_trial(cfg, trial_seed(cfg.seed, i)))
            .collect()
    };
    let trials = match sim_threads() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| HarnessError::ConfigInvalid(format!("SIM_THREADS pool: {e}")))?
            .install(run_all),
        None => run_all(),
    }?;

    let record = |block: BlockKey, rates: &[f64], thrs: &[f64]| -> CurveRecord {
        let (rm, rs) = mean_stderr(rates);
        let (tm, ts) = mean_stderr(thrs);
        CurveRecord {
            scenario_id: cfg.scenario_id.clone(),
            axis_value,
            snr_db: cfg.snr_db[0],
            alpha: cfg.fading.alpha,
            lambda: cfg.lambda,
            m: cfg.budget.m as u64,
            cycles: cfg.budget.cycles as u64,
            block,
            sum_rate_bits_mean: rm,
            sum_rate_stderr: rs,
            throughput_bits_mean: tm,
            throughput_stderr: ts,
            n_trials: cfg.n_trials as u64,
            seed: cfg.seed,
        }
    };

    let mut records = Vec::with_capacity(cfg.n_blocks + 1);
    let mut rates = Vec::with_capacity(cfg.n_trials);
    let mut thrs = Vec::with_capacity(cfg.n_trials);
    for b in 0..cfg.n_blocks {
        rates.clear();
        thrs.clear();
        for t in &trials {
            rates.push(t.blocks[b].sum_rate_bits);
            thrs.push(t.blocks[b].throughput_bits);
        }
        records.push(record(BlockKey::Index(b as u64 + 1), &rates, &thrs));
    }
    let trial_mean = |f: fn(&BlockMetrics) -> f64| -> Vec<f64> {
        trials
            .iter()
            .map(|t| t.blocks.iter().map(f).sum::<f64>() / t.blocks.len() as f64)
            .collect()
    };
    let avg_rates = trial_mean(|b| b.sum_rate_bits);
    let avg_thrs = trial_mean(|b| b.throughput_bits);
    records.push(record(BlockKey::Average, &avg_rates, &avg_thrs));
    Ok(records)
}

/// Runs a plain (non-swept) scenario. The `axis_value` column is 0 in every
/// row. Scenarios listing several SNR points must go through [`sweep`].
pub fn run_monte_carlo(cfg: &ScenarioConfig) -> Result<Vec<CurveRecord>, HarnessError> {
    monte_carlo_records(cfg, 0.0)
}

/// Axes a scenario can be swept over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepAxis {
    /// Training symbols per phase (`m`); values must be positive integers.
    TrainingLength,
    /// Training cycles per block, holding the total training budget
    /// `2 * m * cycles` of the base scenario fixed; each value must divide
    /// the total evenly.
    Cycles,
    /// Operating SNR in dB (noise variance updated to match).
    SnrDb,
    /// RLS forgetting factor; values must lie in `(0, 1]`.
    Lambda,
}

impl SweepAxis {
    /// Canonical CLI/config name.
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::TrainingLength => "training_length",
            SweepAxis::Cycles => "cycles",
            SweepAxis::SnrDb => "snr_db",
            SweepAxis::Lambda => "lambda",
        }
    }

    /// Parses the canonical name.
    pub fn parse(s: &str) -> Result<Self, HarnessError> {
        match s {
            "training_length" => Ok(SweepAxis::TrainingLength),
            "cycles" => Ok(SweepAxis::Cycles),
            "snr_db" => Ok(SweepAxis::SnrDb),
            "lambda" => Ok(SweepAxis::Lambda),
            other => Err(HarnessError::ConfigParse(format!(
                "unknown sweep axis {other:?}; expected one of training_length, cycles, \
                 snr_db, lambda"
            ))),
        }
    }
}

fn positive_integer(axis: SweepAxis, v: f64) -> Result<usize, HarnessError> {
    if v.fract() == 0.0 && v >= 1.0 && v <= usize::MAX as f64 {
        Ok(v as usize)
    } else {
        Err(HarnessError::ConfigInvalid(format!(
            "{} sweep value {v} must be a positive integer",
            axis.name()
        )))
    }
}

/// Applies one sweep value to a copy of the base scenario.
fn apply_axis(
    base: &ScenarioConfig,
    axis: SweepAxis,
    value: f64,
) -> Result<ScenarioConfig, HarnessError> {
    let mut cfg = base.clone();
    match axis {
        SweepAxis::TrainingLength => {
            cfg.budget.m = positive_integer(axis, value)?;
        }
        SweepAxis::Cycles => {
            let cycles = positive_integer(axis, value)?;
            let total = 2 * base.budget.m * base.budget.cycles;
            if total % (2 * cycles) != 0 {
                return Err(HarnessError::ConfigInvalid(format!(
                    "cycles sweep value {cycles} does not divide the total training \
                     budget {total} into whole per-phase lengths"
                )));
            }
            cfg.budget.cycles = cycles;
            cfg.budget.m = total / (2 * cycles);
        }
        SweepAxis::SnrDb => {
            if !value.is_finite() {
                return Err(HarnessError::ConfigInvalid(format!(
                    "snr_db sweep value {value} must be finite"
                )));
            }
            cfg = cfg.with_snr(value);
        }
        SweepAxis::Lambda => {
            if !(value > 0.0 && value <= 1.0) {
                return Err(HarnessError::ConfigInvalid(format!(
                    "lambda sweep value {value} must lie in (0, 1]"
                )));
            }
            cfg.lambda = value;
        }
    }
    Ok(cfg)
}

/// Re-runs `base` at each axis value and concatenates the rows, stamping the
/// value into the `axis_value` column. Every point reuses the base seed, so
/// the same channel/noise/pilot realizations underlie the whole curve and
/// differences between points are paired, not masked by fresh randomness.
/// Multi-SNR scenarios must sweep the SNR axis (other axes would be
/// ambiguous about which operating point to hold).
pub fn sweep(
    base: &ScenarioConfig,
    axis: SweepAxis,
    values: &[f64],
) -> Result<Vec<CurveRecord>, HarnessError> {
    if values.is_empty() {
        return Err(HarnessError::ConfigInvalid(
            "sweep needs at least one axis value".into(),
        ));
    }
    if base.snr_db.len() != 1 && axis != SweepAxis::SnrDb {
        return Err(HarnessError::ConfigInvalid(format!(
            "base scenario lists {} snr_db points; only the snr_db axis may be swept then",
            base.snr_db.len()
        )));
    }
    let mut records = Vec::new();
    for &v in values {
        let cfg = apply_axis(base, axis, v)?;
        records.extend(monte_carlo_records(&cfg, v)?);
    }
    Ok(records)
}
