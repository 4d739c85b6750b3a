//! Link-level simulator for adaptive beamforming in multi-user MIMO
//! interference networks.
//!
//! A set of K transmitter/receiver pairs share the same band. Each
//! transmitter sends a single stream through a beamforming vector and each
//! receiver applies a linear filter; the cross links couple every pair to
//! every other. The crate provides
//!
//! * [`numerics`]: complex linear algebra kernels (Hermitian solves,
//!   least squares, power normalization, Gaussian sampling),
//! * [`channel`]: a first-order Gauss-Markov block-fading channel with
//!   time-division reciprocity,
//! * [`phy`]: training-signal synthesis and the SINR / sum-rate /
//!   throughput metrics,
//! * [`maxsinr`]: the iterative max-SINR beamformer update under perfect
//!   channel knowledge, used as a genie reference,
//! * [`adapt`]: pilot-driven least-squares and recursive least-squares
//!   filter adaptation that never touches channel matrices directly,
//! * [`harness`]: deterministic Monte Carlo trials, parameter sweeps and
//!   CSV/JSON emission behind a scenario configuration.
//!
//! Everything is deterministic given a scenario seed: trials derive
//! per-trial seeds from a fixed 64-bit mix, so results are reproducible
//! across runs and thread counts.

pub mod adapt;
pub mod channel;
pub mod harness;
pub mod maxsinr;
pub mod numerics;
pub mod phy;
