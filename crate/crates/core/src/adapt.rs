//! Pilot-driven filter adaptation: the schemes that run without channel
//! knowledge.
//!
//! Where [`crate::maxsinr`] solves for filters from the true channel
//! matrices, everything here works purely from received training blocks.
//! The key identity is that the least-squares fit of a known pilot row from
//! the received samples converges, as training grows, to the same
//! interference-whitening filter the genie computes — and running the
//! identical fit in the reverse duplex direction adapts the transmit beams,
//! since each side's filter doubles as the other direction's beam.
//!
//! Two estimators are provided per phase:
//!
//! * one-shot least squares over the current block ([`ls_forward_update`],
//!   [`ls_backward_update`], driven by [`run_ls_block`]);
//! * an exponentially weighted recursive update that carries its inverse
//!   sample covariance across blocks ([`rls_block_update`], driven by
//!   [`run_rls_block`]), trading a forgetting factor against channel
//!   coherence so that short per-block training still accumulates.
//!
//! Both keep the raw (unnormalized) fit internally and hand the network a
//! power-normalized copy. A failed per-user update (degenerate block) keeps
//! that user's previous vector and logs a warning rather than aborting the
//! block.

use crate::channel::ChannelRealization;
use crate::numerics::{
    hpd_solve_mat, ls_solve, normalize_power, C64, CMat, CVec, NumericsError,
};
use crate::phy::{
    synth_backward, synth_forward, Direction, LinkState, NetworkConfig, ReceivedBlock,
    TrainingMatrix,
};
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AdaptError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Which duplex direction trains first within a cycle.
///
/// Backward-first lets the very first forward fit see beams that already
/// reflect the receivers' initial filters, which is the natural order when
/// filters are initialized randomly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Schedule {
    BackwardFirst,
    ForwardFirst,
}

/// Per-block training budget of the bidirectional least-squares scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrainingBudget {
    /// Symbols per training phase.
    pub m: usize,
    /// Bidirectional cycles per block; total overhead is `2 m cycles`.
    pub cycles: usize,
    pub schedule: Schedule,
}

impl TrainingBudget {
    pub fn new(m: usize, cycles: usize, schedule: Schedule) -> Self {
        assert!(m >= 1, "need at least one training symbol per phase");
        assert!(cycles >= 1, "need at least one cycle");
        Self { m, cycles, schedule }
    }
}

/// Ridge fallback sized to the data: a `1e-6` fraction of the average
/// per-dimension sample energy, so it vanishes relative to well-conditioned
/// blocks and stabilizes degenerate ones.
pub fn default_ridge_floor(samples: &CMat) -> f64 {
    1e-6 * samples.norm_squared() / samples.nrows() as f64
}

/// Least-squares fit of `pilot` from the samples, regularized only when the
/// plain normal equations are numerically singular, then power-normalized.
fn fit_filter(
    samples: &CMat,
    pilot: &CVec,
    p_max: f64,
    ridge_floor: f64,
) -> Result<CVec, AdaptError> {
    if samples.norm() < f64::MIN_POSITIVE {
        return Err(NumericsError::ZeroVector.into());
    }
    let w = match ls_solve(samples, pilot, 0.0) {
        Ok(w) => w,
        Err(NumericsError::Singular(_)) if ridge_floor > 0.0 => {
            ls_solve(samples, pilot, ridge_floor)?
        }
        Err(e) => return Err(e.into()),
    };
    Ok(normalize_power(&w, p_max)?)
}

/// One-shot least-squares receive filter from a forward training block.
pub fn ls_forward_update(
    block: &ReceivedBlock,
    pilot: &CVec,
    p_max: f64,
    ridge_floor: f64,
) -> Result<CVec, AdaptError> {
    assert_eq!(block.direction, Direction::Forward, "expected a forward block");
    fit_filter(&block.samples, pilot, p_max, ridge_floor)
}

/// One-shot least-squares transmit beam from a backward training block: the
/// conjugate of the filter fitted on the reverse link.
pub fn ls_backward_update(
    block: &ReceivedBlock,
    pilot: &CVec,
    p_max: f64,
    ridge_floor: f64,
) -> Result<CVec, AdaptError> {
    assert_eq!(block.direction, Direction::Backward, "expected a backward block");
    let w = fit_filter(&block.samples, pilot, p_max, ridge_floor)?;
    Ok(w.map(|z| z.conj()))
}

fn ls_backward_phase<R: Rng + ?Sized>(
    ch: &ChannelRealization,
    st: &mut LinkState,
    pilots: &TrainingMatrix,
    cfg: &NetworkConfig,
    rng: &mut R,
) {
    let blocks = synth_backward(ch, &st.filters, pilots, cfg, rng);
    for k in cfg.active_users() {
        let floor = default_ridge_floor(&blocks[k].samples);
        match ls_backward_update(&blocks[k], &pilots.row(k), cfg.p_max, floor) {
            Ok(v) => st.beams[k] = v,
            Err(e) => log::warn!("user {k}: backward fit failed ({e}); keeping previous beam"),
        }
    }
}

fn ls_forward_phase<R: Rng + ?Sized>(
    ch: &ChannelRealization,
    st: &mut LinkState,
    pilots: &TrainingMatrix,
    cfg: &NetworkConfig,
    rng: &mut R,
) {
    let blocks = synth_forward(ch, &st.beams, pilots, cfg, rng);
    for k in cfg.active_users() {
        let floor = default_ridge_floor(&blocks[k].samples);
        match ls_forward_update(&blocks[k], &pilots.row(k), cfg.p_max, floor) {
            Ok(g) => st.filters[k] = g,
            Err(e) => log::warn!("user {k}: forward fit failed ({e}); keeping previous filter"),
        }
    }
}

/// Runs the bidirectional least-squares training of one block and returns
/// the adapted state together with the training overhead `2 m cycles`.
pub fn run_ls_block<R: Rng + ?Sized>(
    ch: &ChannelRealization,
    state: &LinkState,
    budget: &TrainingBudget,
    pilots_fwd: &TrainingMatrix,
    pilots_bwd: &TrainingMatrix,
    cfg: &NetworkConfig,
    rng: &mut R,
) -> (LinkState, usize) {
    assert_eq!(pilots_fwd.m(), budget.m, "forward pilots must match the budget");
    assert_eq!(pilots_bwd.m(), budget.m, "backward pilots must match the budget");
    let mut st = state.clone();
    for _ in 0..budget.cycles {
        match budget.schedule {
            Schedule::BackwardFirst => {
                ls_backward_phase(ch, &mut st, pilots_bwd, cfg, rng);
                ls_forward_phase(ch, &mut st, pilots_fwd, cfg, rng);
            }
            Schedule::ForwardFirst => {
                ls_forward_phase(ch, &mut st, pilots_fwd, cfg, rng);
                ls_backward_phase(ch, &mut st, pilots_bwd, cfg, rng);
            }
        }
    }
    (st, 2 * budget.m * budget.cycles)
}

/// Forward-only reference: receivers adapt, beams stay fixed. Overhead is
/// the pilot length.
pub fn run_forward_only_block<R: Rng + ?Sized>(
    ch: &ChannelRealization,
    state: &LinkState,
    pilots: &TrainingMatrix,
    cfg: &NetworkConfig,
    rng: &mut R,
) -> (LinkState, usize) {
    let mut st = state.clone();
    ls_forward_phase(ch, &mut st, pilots, cfg, rng);
    (st, pilots.m())
}

/// Running state of one exponentially weighted recursive least-squares
/// estimator.
///
/// `w` is the raw (unnormalized) weight minimizing
/// `Σ_l λ^{n-l} ‖b(l) - wᴴ Y(l)‖² + δ λⁿ ‖w‖²` over everything seen so far,
/// and `p` tracks the inverse of the weighted sample covariance, seeded at
/// `I/δ`.
#[derive(Clone, Debug, PartialEq)]
pub struct RlsState {
    pub w: CVec,
    pub p: CMat,
    /// Forgetting factor, `0 < λ ≤ 1`.
    pub lambda: f64,
    /// Initial ridge weight.
    pub delta: f64,
    /// Training blocks folded in so far.
    pub blocks_seen: u64,
}

impl RlsState {
    pub fn new(dim: usize, lambda: f64, delta: f64) -> Self {
        assert!(dim >= 1, "estimator needs at least one dimension");
        assert!(lambda > 0.0 && lambda <= 1.0, "forgetting factor must lie in (0, 1]");
        assert!(delta > 0.0, "initial ridge must be positive");
        Self {
            w: CVec::zeros(dim),
            p: CMat::identity(dim, dim) * C64::from(1.0 / delta),
            lambda,
            delta,
            blocks_seen: 0,
        }
    }
}

fn symmetrize(m: &CMat) -> CMat {
    (m + m.adjoint()) * C64::from(0.5)
}

/// Folds one block of samples `y` (columns = symbol times) with known
/// symbols `b` into the estimator: block variant of the classic recursion,
/// inverting only an M×M system.
///
/// ```text
/// S = I + λ⁻¹ Yᴴ P Y          (M×M)
/// K = λ⁻¹ P Y S⁻¹             (gain)
/// w ← w + K (bᴴ - Yᴴ w)
/// P ← λ⁻¹ (P - K Yᴴ P)
/// ```
pub fn rls_block_update(st: &RlsState, y: &CMat, b: &CVec) -> RlsState {
    let d = st.w.len();
    assert_eq!(y.nrows(), d, "sample dimension must match the estimator");
    assert_eq!(y.ncols(), b.len(), "one known symbol per sample column");
    let m = y.ncols();
    let lam_inv = C64::from(1.0 / st.lambda);
    let py = &st.p * y;
    let s = symmetrize(&(CMat::identity(m, m) + (y.adjoint() * &py) * lam_inv));
    // Z = S⁻¹ Yᴴ P, so the gain is K = λ⁻¹ Zᴴ.
    let z = hpd_solve_mat(&s, &py.adjoint())
        .expect("gain system is Hermitian positive definite by construction");
    let k_gain = z.adjoint() * lam_inv;
    let innovation = b.map(|x| x.conj()) - y.adjoint() * &st.w;
    let w = &st.w + &k_gain * innovation;
    let p = symmetrize(&((&st.p - &k_gain * py.adjoint()) * lam_inv));
    RlsState { w, p, lambda: st.lambda, delta: st.delta, blocks_seen: st.blocks_seen + 1 }
}

/// The recursive estimators of every user, one per duplex direction.
#[derive(Clone, Debug, PartialEq)]
pub struct RlsLinkStates {
    /// Receiver-side estimators (dimension `n_r`).
    pub forward: Vec<RlsState>,
    /// Transmitter-side estimators (dimension `n_t`); their conjugated
    /// weights act as beams.
    pub backward: Vec<RlsState>,
}

impl RlsLinkStates {
    pub fn new(cfg: &NetworkConfig, lambda: f64, delta: f64) -> Self {
        Self {
            forward: (0..cfg.k_users).map(|_| RlsState::new(cfg.n_r, lambda, delta)).collect(),
            backward: (0..cfg.k_users).map(|_| RlsState::new(cfg.n_t, lambda, delta)).collect(),
        }
    }
}

/// One block of bidirectional recursive training: the backward phase feeds
/// the previous filters back as beams, then the forward phase adapts the
/// filters to the fresh beams. Returns the adapted link state, the advanced
/// estimators and the overhead `2 m`.
pub fn run_rls_block<R: Rng + ?Sized>(
    ch: &ChannelRealization,
    state: &LinkState,
    rls: &RlsLinkStates,
    pilots_fwd: &TrainingMatrix,
    pilots_bwd: &TrainingMatrix,
    cfg: &NetworkConfig,
    rng: &mut R,
) -> (LinkState, RlsLinkStates, usize) {
    assert_eq!(pilots_fwd.m(), pilots_bwd.m(), "phases share one training length");
    let mut st = state.clone();
    let mut rls = rls.clone();

    let blocks = synth_backward(ch, &st.filters, pilots_bwd, cfg, rng);
    for k in cfg.active_users() {
        let upd = rls_block_update(&rls.backward[k], &blocks[k].samples, &pilots_bwd.row(k));
        match normalize_power(&upd.w.map(|z| z.conj()), cfg.p_max) {
            Ok(v) => st.beams[k] = v,
            Err(e) => log::warn!("user {k}: backward weight unusable ({e}); keeping previous beam"),
        }
        rls.backward[k] = upd;
    }

    let blocks = synth_forward(ch, &st.beams, pilots_fwd, cfg, rng);
    for k in cfg.active_users() {
        let upd = rls_block_update(&rls.forward[k], &blocks[k].samples, &pilots_fwd.row(k));
        match normalize_power(&upd.w, cfg.p_max) {
            Ok(g) => st.filters[k] = g,
            Err(e) => log::warn!("user {k}: forward weight unusable ({e}); keeping previous filter"),
        }
        rls.forward[k] = upd;
    }

    (st, rls, 2 * pilots_fwd.m())
}

/// Refreshes a receive filter from payload data instead of pilots: detect
/// the (BPSK) symbols with the current filter, then refit as if the
/// decisions were pilots. With a reliable detector this turns the whole
/// data segment into free training; the refreshed filter benefits the next
/// block's backward phase.
pub fn decision_directed_refresh(
    block: &ReceivedBlock,
    filter: &CVec,
    p_max: f64,
    ridge_floor: f64,
) -> Result<CVec, AdaptError> {
    assert_eq!(block.direction, Direction::Forward, "data is received in the forward direction");
    if filter.norm() < 1e-15 {
        // Nothing to detect with; leave the filter untouched.
        return Ok(filter.clone());
    }
    let m = block.samples.ncols();
    let decided = CVec::from_fn(m, |i, _| {
        let mut z = C64::from(0.0);
        for (g, y) in filter.iter().zip(block.samples.column(i).iter()) {
            z += g.conj() * y;
        }
        if z.re >= 0.0 {
            C64::from(1.0)
        } else {
            C64::from(-1.0)
        }
    });
    fit_filter(&block.samples, &decided, p_max, ridge_floor)
}
