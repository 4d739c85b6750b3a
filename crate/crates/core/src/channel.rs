//! Block-fading channel model for a K-pair interference network.
//!
//! Each of the K transmitters is paired with one receiver, and every
//! receiver hears every transmitter: a realization holds K² complex
//! matrices, one per (receiver, transmitter) link. Within a block the
//! channel is constant; across blocks each entry follows a first-order
//! Gauss-Markov process
//!
//! ```text
//! H(n) = α H(n-1) + sqrt(1 - α²) W(n)
//! ```
//!
//! with i.i.d. circularly symmetric Gaussian innovations `W(n)`, so the
//! per-entry variance is stationary for any correlation coefficient
//! `α ∈ [0, 1]`. The reverse direction of a time-division duplex is the
//! unconjugated transpose of each forward link ([`reverse`]).

use crate::numerics::{cgauss, C64, CMat};
use rand::Rng;

/// Temporal correlation and per-entry variance of the fading process.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FadingParams {
    /// Block-to-block correlation coefficient, `0 ≤ α ≤ 1`.
    /// `α = 1` freezes the channel; `α = 0` redraws it independently.
    pub alpha: f64,
    /// Second moment of each channel entry.
    pub entry_variance: f64,
}

impl FadingParams {
    pub fn new(alpha: f64, entry_variance: f64) -> Self {
        assert!(
            (0.0..=1.0).contains(&alpha),
            "fading correlation must lie in [0, 1], got {alpha}"
        );
        assert!(
            entry_variance > 0.0,
            "entry variance must be positive, got {entry_variance}"
        );
        Self { alpha, entry_variance }
    }
}

/// One block's worth of channel matrices for all K² links.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelRealization {
    /// Receiver-major storage: `links[rx * k_users + tx]`.
    links: Vec<CMat>,
    k_users: usize,
    n_r: usize,
    n_t: usize,
    /// Number of evolution steps since the initial draw.
    pub block_index: u64,
}

impl ChannelRealization {
    /// Builds a realization from explicit link matrices in receiver-major
    /// order (`links[rx * k_users + tx]`), all of one shape. Useful for
    /// deterministic scenarios and tests.
    pub fn from_links(k_users: usize, links: Vec<CMat>) -> Self {
        assert!(k_users >= 1, "need at least one user pair");
        assert_eq!(links.len(), k_users * k_users, "need one matrix per (rx, tx) pair");
        let (n_r, n_t) = links[0].shape();
        assert!(n_r >= 1 && n_t >= 1, "links must be non-empty matrices");
        for l in &links {
            assert_eq!(l.shape(), (n_r, n_t), "all links must share one shape");
        }
        Self { links, k_users, n_r, n_t, block_index: 0 }
    }

    /// Channel matrix from transmitter `tx` to receiver `rx`.
    pub fn h(&self, rx: usize, tx: usize) -> &CMat {
        &self.links[rx * self.k_users + tx]
    }

    pub fn k_users(&self) -> usize {
        self.k_users
    }

    /// Rows of each link matrix (receive antennas in this direction).
    pub fn n_r(&self) -> usize {
        self.n_r
    }

    /// Columns of each link matrix (transmit antennas in this direction).
    pub fn n_t(&self) -> usize {
        self.n_t
    }
}

/// Draws an independent initial realization. Links are generated in
/// receiver-major order so results are reproducible for a given generator
/// state.
pub fn init_channels<R: Rng + ?Sized>(
    k_users: usize,
    n_t: usize,
    n_r: usize,
    params: &FadingParams,
    rng: &mut R,
) -> ChannelRealization {
    assert!(k_users >= 1, "need at least one user pair");
    assert!(n_t >= 1 && n_r >= 1, "need at least one antenna per side");
    let links = (0..k_users * k_users)
        .map(|_| cgauss(rng, n_r, n_t, params.entry_variance))
        .collect();
    ChannelRealization { links, k_users, n_r, n_t, block_index: 0 }
}

/// Advances every link one block: `H ← α H + sqrt(1 - α²) W`.
///
/// Innovations are drawn for every link even when `α = 1`, so generator
/// consumption — and therefore everything downstream of the shared stream —
/// does not depend on the correlation coefficient.
pub fn evolve<R: Rng + ?Sized>(
    prev: &ChannelRealization,
    params: &FadingParams,
    rng: &mut R,
) -> ChannelRealization {
    let keep = C64::from(params.alpha);
    let fresh = C64::from((1.0 - params.alpha * params.alpha).sqrt());
    let links = prev
        .links
        .iter()
        .map(|h| {
            let w = cgauss(rng, prev.n_r, prev.n_t, params.entry_variance);
            h * keep + w * fresh
        })
        .collect();
    ChannelRealization {
        links,
        k_users: prev.k_users,
        n_r: prev.n_r,
        n_t: prev.n_t,
        block_index: prev.block_index + 1,
    }
}

/// Reverse-direction realization of a time-division duplex: the link from
/// node `tx`'s receiver side to node `rx`'s transmitter side is the plain
/// (unconjugated) transpose of the forward link, `←H(rx, tx) = H(tx, rx)ᵀ`.
pub fn reverse(ch: &ChannelRealization) -> ChannelRealization {
    let k = ch.k_users;
    let mut links = Vec::with_capacity(k * k);
    for rx in 0..k {
        for tx in 0..k {
            links.push(ch.h(tx, rx).transpose());
        }
    }
    ChannelRealization {
        links,
        k_users: k,
        n_r: ch.n_t,
        n_t: ch.n_r,
        block_index: ch.block_index,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(alpha: f64) -> FadingParams {
        FadingParams::new(alpha, 1.0)
    }

    #[test]
    fn init_has_expected_shape_and_indexing() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ch = init_channels(3, 2, 2, &params(0.5), &mut rng);
        assert_eq!(ch.k_users(), 3);
        assert_eq!(ch.block_index, 0);
        for rx in 0..3 {
            for tx in 0..3 {
                assert_eq!(ch.h(rx, tx).shape(), (2, 2));
            }
        }
        // Distinct links hold distinct draws.
        assert_ne!(ch.h(0, 0), ch.h(1, 1));
    }

    #[test]
    fn init_is_deterministic_per_seed() {
        let a = init_channels(2, 3, 2, &params(0.9), &mut ChaCha8Rng::seed_from_u64(5));
        let b = init_channels(2, 3, 2, &params(0.9), &mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(a, b);
    }

    #[test]
    fn entry_second_moment_matches_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = FadingParams::new(0.5, 2.0);
        let mut acc = 0.0;
        let mut count = 0usize;
        for _ in 0..2_500 {
            let ch = init_channels(1, 2, 2, &p, &mut rng);
            acc += ch.h(0, 0).iter().map(|z| z.norm_sqr()).sum::<f64>();
            count += 4;
        }
        let second_moment = acc / count as f64;
        assert!(
            (second_moment - 2.0).abs() < 0.06,
            "second moment {second_moment} too far from 2.0"
        );
    }

    #[test]
    fn alpha_one_freezes_the_channel_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ch0 = init_channels(2, 2, 2, &params(1.0), &mut rng);
        let ch1 = evolve(&ch0, &params(1.0), &mut rng);
        assert_eq!(ch1.block_index, 1);
        for rx in 0..2 {
            for tx in 0..2 {
                assert_eq!(ch0.h(rx, tx), ch1.h(rx, tx));
            }
        }
    }

    #[test]
    fn alpha_zero_redraws_independently() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = params(0.0);
        let mut cross = C64::from(0.0);
        let mut n = 0usize;
        for _ in 0..2_500 {
            let ch0 = init_channels(1, 2, 2, &p, &mut rng);
            let ch1 = evolve(&ch0, &p, &mut rng);
            for (a, b) in ch0.h(0, 0).iter().zip(ch1.h(0, 0).iter()) {
                cross += b * a.conj();
                n += 1;
            }
        }
        let corr = (cross / C64::from(n as f64)).norm();
        assert!(corr < 0.03, "blocks still correlated at alpha = 0: {corr}");
    }

    #[test]
    fn variance_is_stationary_under_evolution() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let p = params(0.99);
        let mut acc = 0.0;
        let mut count = 0usize;
        for _ in 0..2_500 {
            let mut ch = init_channels(1, 2, 2, &p, &mut rng);
            for _ in 0..100 {
                ch = evolve(&ch, &p, &mut rng);
            }
            acc += ch.h(0, 0).iter().map(|z| z.norm_sqr()).sum::<f64>();
            count += 4;
        }
        let second_moment = acc / count as f64;
        assert!(
            (0.9..=1.1).contains(&second_moment),
            "second moment drifted to {second_moment}"
        );
    }

    #[test]
    fn lag_correlation_decays_as_alpha_to_the_m() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let alpha = 0.9f64;
        let p = params(alpha);
        for lag in [1usize, 5] {
            let mut cross = C64::from(0.0);
            let mut n = 0usize;
            for _ in 0..2_500 {
                let ch0 = init_channels(1, 2, 2, &p, &mut rng);
                let mut ch = ch0.clone();
                for _ in 0..lag {
                    ch = evolve(&ch, &p, &mut rng);
                }
                for (a, b) in ch0.h(0, 0).iter().zip(ch.h(0, 0).iter()) {
                    cross += b * a.conj();
                    n += 1;
                }
            }
            let corr = (cross / C64::from(n as f64)).re;
            let want = alpha.powi(lag as i32);
            assert!(
                (corr - want).abs() < 0.05,
                "lag-{lag} correlation {corr}, expected about {want}"
            );
        }
    }

    #[test]
    fn reverse_transposes_without_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut ch = init_channels(2, 2, 2, &params(0.5), &mut rng);
        // Pin one link to a known matrix to make the rule visible.
        let fixed = DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::new(3.0, 0.0), C64::new(0.0, 4.0)],
        );
        ch.links[0 * 2 + 1] = fixed.clone();
        let rev = reverse(&ch);
        // ←H(1, 0) = H(0, 1)ᵀ with entries untouched (no conjugation).
        let got = rev.h(1, 0);
        assert_eq!(got[(0, 0)], C64::new(1.0, 0.0));
        assert_eq!(got[(0, 1)], C64::new(3.0, 0.0));
        assert_eq!(got[(1, 0)], C64::new(2.0, 0.0));
        assert_eq!(got[(1, 1)], C64::new(0.0, 4.0));
        assert_eq!(got[(1, 1)].im, 4.0, "conjugation must not happen");
    }

    #[test]
    fn reverse_is_an_involution_preserving_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ch = init_channels(3, 2, 3, &params(0.5), &mut rng);
        let rev = reverse(&ch);
        // Forward links are 3×2, so reverse links are 2×3.
        assert_eq!(rev.n_r(), 2);
        assert_eq!(rev.n_t(), 3);
        for rx in 0..3 {
            for tx in 0..3 {
                let diff = (ch.h(rx, tx).norm() - rev.h(tx, rx).norm()).abs();
                assert!(diff < 1e-12, "link energy changed by {diff}");
            }
        }
        assert_eq!(reverse(&rev), ch);
    }
}
