//! Iterative max-SINR beamforming under perfect channel knowledge.
//!
//! Each half-iteration solves a small Hermitian system per user: the
//! receive filter maximizing the SINR quotient is the whitened matched
//! filter `B_k⁻¹ H(k,k) v_k`, where `B_k` collects interference-plus-noise
//! covariance at receiver `k`; by reciprocity the transmit update is the
//! same computation on the reversed network. Updates are simultaneous
//! (Jacobi style): all receivers refresh from the current beams, then all
//! beams refresh from the new filters.
//!
//! This needs the true channel matrices, so it serves as a genie reference
//! for the pilot-driven schemes in [`crate::adapt`], which reach the same
//! fixed points without ever seeing a channel matrix.

use crate::channel::ChannelRealization;
use crate::numerics::{hpd_solve, normalize_power, C64, CMat, CVec};
use crate::phy::{LinkState, NetworkConfig};

/// Stop iterating once the worst direction change falls below this.
const CONVERGENCE_RESIDUAL: f64 = 1e-12;

/// Outcome of [`run_maxsinr`].
#[derive(Clone, Debug)]
pub struct MaxSinrReport {
    pub final_state: LinkState,
    /// Iterations actually executed (early-stopped once converged).
    pub iterations_run: usize,
    /// Largest direction change (1 − |cosine|) across all beams and
    /// filters in the last executed iteration.
    pub fixed_point_residual: f64,
}

/// SINR-optimal receive filter for user `k` given everyone's current beams,
/// normalized to `‖g‖² = p_max`.
pub fn optimal_receiver(
    k: usize,
    ch: &ChannelRealization,
    beams: &[CVec],
    cfg: &NetworkConfig,
) -> CVec {
    assert!(cfg.active[k], "inactive users have no receiver to optimize");
    assert!(cfg.noise_var > 0.0, "positive noise keeps the covariance invertible");
    let n_r = ch.n_r();
    let mut cov = CMat::identity(n_r, n_r) * C64::from(cfg.noise_var);
    for j in cfg.active_users() {
        if j == k {
            continue;
        }
        let e = ch.h(k, j) * &beams[j];
        cov += &e * e.adjoint();
    }
    let target = ch.h(k, k) * &beams[k];
    let g = hpd_solve(&cov, &target)
        .expect("interference-plus-noise covariance is Hermitian positive definite");
    normalize_power(&g, cfg.p_max).expect("direct link must not annihilate the beam")
}

/// SINR-optimal transmit beam for user `k` given everyone's current receive
/// filters — the receiver update of the reversed network, conjugated back.
pub fn optimal_transmitter(
    k: usize,
    ch: &ChannelRealization,
    filters: &[CVec],
    cfg: &NetworkConfig,
) -> CVec {
    assert!(cfg.active[k], "inactive users have no beam to optimize");
    assert!(cfg.noise_var > 0.0, "positive noise keeps the covariance invertible");
    let n_t = ch.n_t();
    let mut cov = CMat::identity(n_t, n_t) * C64::from(cfg.noise_var);
    for j in cfg.active_users() {
        if j == k {
            continue;
        }
        let e = ch.h(j, k).adjoint() * &filters[j];
        cov += &e * e.adjoint();
    }
    let target = ch.h(k, k).adjoint() * &filters[k];
    let v = hpd_solve(&cov, &target)
        .expect("leakage-plus-noise covariance is Hermitian positive definite");
    normalize_power(&v, cfg.p_max).expect("direct link must not annihilate the filter")
}

/// `1 − |cos angle|` between two directions; 1 when either is zero.
fn direction_change(old: &CVec, new: &CVec) -> f64 {
    let denom = old.norm() * new.norm();
    if denom < 1e-300 {
        return 1.0;
    }
    1.0 - (old.dotc(new).norm() / denom).min(1.0)
}

/// Alternates simultaneous receiver and transmitter updates from the given
/// beams until directions stop moving or `max_iters` is reached.
pub fn run_maxsinr(
    ch: &ChannelRealization,
    init_beams: &[CVec],
    cfg: &NetworkConfig,
    max_iters: usize,
) -> MaxSinrReport {
    assert!(max_iters >= 1, "need at least one iteration");
    assert_eq!(init_beams.len(), cfg.k_users, "one initial beam per user");
    let mut beams: Vec<CVec> = init_beams.to_vec();
    let mut filters: Vec<CVec> = vec![CVec::zeros(ch.n_r()); cfg.k_users];
    let mut iterations_run = 0;
    let mut fixed_point_residual = f64::INFINITY;
    for it in 0..max_iters {
        let mut worst = 0.0f64;
        let new_filters: Vec<(usize, CVec)> = cfg
            .active_users()
            .map(|k| (k, optimal_receiver(k, ch, &beams, cfg)))
            .collect();
        for (k, g) in new_filters {
            // The first pass populates filters out of nothing; only count
            // their movement once there is something to move from.
            if it > 0 {
                worst = worst.max(direction_change(&filters[k], &g));
            }
            filters[k] = g;
        }
        let new_beams: Vec<(usize, CVec)> = cfg
            .active_users()
            .map(|k| (k, optimal_transmitter(k, ch, &filters, cfg)))
            .collect();
        for (k, v) in new_beams {
            worst = worst.max(direction_change(&beams[k], &v));
            beams[k] = v;
        }
        iterations_run = it + 1;
        fixed_point_residual = worst;
        if worst < CONVERGENCE_RESIDUAL {
            break;
        }
    }
    MaxSinrReport {
        final_state: LinkState { beams, filters },
        iterations_run,
        fixed_point_residual,
    }
}
