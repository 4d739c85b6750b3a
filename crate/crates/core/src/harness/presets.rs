//! Canned experiment families.
//!
//! Each preset bundles the scenario sweeps behind one figure-style study:
//! training-length trade-offs on a frozen channel, cycle splits on
//! independently fading blocks, genie tracking across SNR, and RLS-vs-LS
//! comparisons under slow fading. Every scenario in a family shares the same
//! base seed, so the same channel realizations underlie all of its curves
//! and cross-curve gaps are paired comparisons rather than noise.

use super::{
    monte_carlo_records, noise_var_for_snr_db, run_monte_carlo, sweep, Algorithm, CurveRecord,
    HarnessError, ScenarioConfig, SweepAxis,
};
use crate::adapt::{Schedule, TrainingBudget};
use crate::channel::FadingParams;
use crate::phy::NetworkConfig;

/// Names accepted by [`preset`], in documentation order.
pub fn preset_names() -> &'static [&'static str] {
    &["fig1", "fig2", "fig3", "fig4", "fig5"]
}

/// Runs a preset with its default trial count and seed.
pub fn preset(name: &str) -> Result<Vec<CurveRecord>, HarnessError> {
    preset_with(name, None, None)
}

/// Runs a preset, optionally overriding the Monte Carlo trial count and the
/// base seed shared by every scenario in the family.
pub fn preset_with(
    name: &str,
    trials: Option<usize>,
    seed: Option<u64>,
) -> Result<Vec<CurveRecord>, HarnessError> {
    match name {
        "fig1" => fig1(trials.unwrap_or(500), seed.unwrap_or(101)),
        "fig2" => fig2(trials.unwrap_or(500), seed.unwrap_or(202)),
        "fig3" => fig3(trials.unwrap_or(500), seed.unwrap_or(303)),
        "fig4" => fig4(trials.unwrap_or(500), seed.unwrap_or(404)),
        "fig5" => fig5(trials.unwrap_or(500), seed.unwrap_or(505)),
        other => Err(HarnessError::ConfigParse(format!(
            "unknown preset {other:?}; expected one of {}",
            preset_names().join(", ")
        ))),
    }
}

/// Three-user network with 2x2 links, unit power, all users active.
#[allow(clippy::too_many_arguments)]
fn scenario(
    id: &str,
    algorithm: Algorithm,
    alpha: f64,
    block_len: usize,
    m: usize,
    cycles: usize,
    lambda: f64,
    snr_db: f64,
    n_blocks: usize,
    n_trials: usize,
    seed: u64,
    decision_directed: bool,
) -> ScenarioConfig {
    ScenarioConfig {
        scenario_id: id.to_string(),
        network: NetworkConfig::new(3, 2, 2, 1.0, noise_var_for_snr_db(snr_db)),
        fading: FadingParams::new(alpha, 1.0),
        block_len,
        budget: TrainingBudget::new(m, cycles, Schedule::BackwardFirst),
        algorithm,
        lambda,
        delta: 0.01,
        snr_db: vec![snr_db],
        n_blocks,
        n_trials,
        seed,
        decision_directed,
    }
}

/// Throughput versus per-phase training length on a frozen channel
/// (alpha = 1, 30 dB, 1000-symbol blocks): bi-directional LS against
/// forward-only training with the same total budget, with the converged
/// genie as the upper reference. Shows the overhead/accuracy trade-off and
/// where the throughput peak sits.
fn fig1(n_trials: usize, seed: u64) -> Result<Vec<CurveRecord>, HarnessError> {
    let ms = [2.0, 4.0, 8.0, 10.0, 16.0, 25.0, 32.0, 64.0, 128.0];
    let ms_double: Vec<f64> = ms.iter().map(|m| 2.0 * m).collect();
    let (l, snr, blocks) = (1000, 30.0, 30);

    let bidir = scenario(
        "fig1_bidir_ls",
        Algorithm::BidirLs,
        1.0,
        l,
        2,
        1,
        1.0,
        snr,
        blocks,
        n_trials,
        seed,
        true,
    );
    let fwd = scenario(
        "fig1_forward_only",
        Algorithm::ForwardOnly,
        1.0,
        l,
        4,
        1,
        1.0,
        snr,
        blocks,
        n_trials,
        seed,
        true,
    );
    let genie = scenario(
        "fig1_maxsinr_genie",
        Algorithm::MaxsinrGenie,
        1.0,
        l,
        1,
        1,
        1.0,
        snr,
        blocks,
        n_trials,
        seed,
        false,
    );

    let mut out = sweep(&bidir, SweepAxis::TrainingLength, &ms)?;
    out.extend(sweep(&fwd, SweepAxis::TrainingLength, &ms_double)?);
    out.extend(run_monte_carlo(&genie)?);
    Ok(out)
}

/// Throughput versus total training budget on independently fading blocks
/// (alpha = 0, 20 dB, 1000-symbol blocks), one curve per cycle count: the
/// same budget split into one long exchange or several shorter ones.
/// Forward-only training with the full budget and the converged genie frame
/// the comparison. Decision-directed refresh is off: with alpha = 0 its
/// benefit would land on an unrelated channel.
fn fig2(n_trials: usize, seed: u64) -> Result<Vec<CurveRecord>, HarnessError> {
    let totals = [32usize, 64, 128, 256, 512];
    let (l, snr, blocks) = (1000, 20.0, 8);
    let mut out = Vec::new();
    for cycles in [1usize, 2, 4, 8] {
        let id = format!("fig2_bidir_ls_c{cycles}");
        for &total in &totals {
            debug_assert_eq!(total % (2 * cycles), 0);
            let cfg = scenario(
                &id,
                Algorithm::BidirLs,
                0.0,
                l,
                total / (2 * cycles),
                cycles,
                1.0,
                snr,
                blocks,
                n_trials,
                seed,
                false,
            );
            out.extend(monte_carlo_records(&cfg, total as f64)?);
        }
    }
    for &total in &totals {
        let cfg = scenario(
            "fig2_forward_only",
            Algorithm::ForwardOnly,
            0.0,
            l,
            total,
            1,
            1.0,
            snr,
            blocks,
            n_trials,
            seed,
            false,
        );
        out.extend(monte_carlo_records(&cfg, total as f64)?);
    }
    let genie = scenario(
        "fig2_maxsinr_genie",
        Algorithm::MaxsinrGenie,
        0.0,
        l,
        1,
        1,
        1.0,
        snr,
        blocks,
        n_trials,
        seed,
        false,
    );
    out.extend(run_monte_carlo(&genie)?);
    Ok(out)
}

/// Sum rate versus SNR for the per-block genie sweep: a frozen channel
/// (alpha = 1), two slowly varying channels (alpha = 0.999 and 0.99), and a
/// two-user variant of the frozen case obtained by deactivating one pair.
/// Shows the high-SNR slope with perfect tracking and the interference-
/// induced saturation once the channel moves between updates.
fn fig3(n_trials: usize, seed: u64) -> Result<Vec<CurveRecord>, HarnessError> {
    let snrs: Vec<f64> = (0..=10).map(|i| 5.0 * i as f64).collect();
    let blocks = 150;
    let mut out = Vec::new();
    for (id, alpha) in [
        ("fig3_alpha_1p000", 1.0),
        ("fig3_alpha_0p999", 0.999),
        ("fig3_alpha_0p990", 0.99),
    ] {
        let cfg = scenario(
            id,
            Algorithm::GeniePerBlock,
            alpha,
            1000,
            1,
            1,
            1.0,
            0.0,
            blocks,
            n_trials,
            seed,
            false,
        );
        out.extend(sweep(&cfg, SweepAxis::SnrDb, &snrs)?);
    }
    let mut two_user = scenario(
        "fig3_two_user_alpha_1p000",
        Algorithm::GeniePerBlock,
        1.0,
        1000,
        1,
        1,
        1.0,
        0.0,
        blocks,
        n_trials,
        seed,
        false,
    );
    two_user.network = two_user.network.with_active(vec![true, true, false]);
    out.extend(sweep(&two_user, SweepAxis::SnrDb, &snrs)?);
    Ok(out)
}

/// RLS-versus-LS training-length sweep under fast block fading
/// (alpha = 0.99, lambda = 0.5, 100-symbol blocks, 10 dB): recursive
/// weighting of past blocks against single-block fits, with forward-only
/// training at the same total budget and the converged genie as references.
fn fig4(n_trials: usize, seed: u64) -> Result<Vec<CurveRecord>, HarnessError> {
    rls_vs_ls("fig4", 0.99, 0.5, 100, 40, 10.0, n_trials, seed)
}

/// Same comparison as the fast-fading study but under slow fading
/// (alpha = 0.999, lambda = 0.7, 1000-symbol blocks, 10 dB), where longer
/// channel memory favours the recursive scheme for longer.
fn fig5(n_trials: usize, seed: u64) -> Result<Vec<CurveRecord>, HarnessError> {
    rls_vs_ls("fig5", 0.999, 0.7, 1000, 60, 10.0, n_trials, seed)
}

#[allow(clippy::too_many_arguments)]
fn rls_vs_ls(
    prefix: &str,
    alpha: f64,
    lambda: f64,
    block_len: usize,
    n_blocks: usize,
    snr: f64,
    n_trials: usize,
    seed: u64,
) -> Result<Vec<CurveRecord>, HarnessError> {
    let ms = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0];
    let ms_double: Vec<f64> = ms.iter().map(|m| 2.0 * m).collect();
    let make = |suffix: &str, algorithm: Algorithm, dd: bool| {
        scenario(
            &format!("{prefix}_{suffix}"),
            algorithm,
            alpha,
            block_len,
            1,
            1,
            lambda,
            snr,
            n_blocks,
            n_trials,
            seed,
            dd,
        )
    };
    let mut out = sweep(
        &make("bidir_rls", Algorithm::BidirRls, true),
        SweepAxis::TrainingLength,
        &ms,
    )?;
    out.extend(sweep(
        &make("bidir_ls", Algorithm::BidirLs, true),
        SweepAxis::TrainingLength,
        &ms,
    )?);
    out.extend(sweep(
        &make("forward_only", Algorithm::ForwardOnly, true),
        SweepAxis::TrainingLength,
        &ms_double,
    )?);
    out.extend(run_monte_carlo(&make(
        "maxsinr_genie",
        Algorithm::MaxsinrGenie,
        false,
    ))?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::BlockKey;

    #[test]
    fn registry_lists_known_presets_and_rejects_others() {
        assert_eq!(preset_names().len(), 5);
        assert!(matches!(
            preset_with("fig9", Some(1), Some(1)),
            Err(HarnessError::ConfigParse(_))
        ));
    }

    #[test]
    fn fast_fading_family_produces_expected_rows() {
        let records = preset_with("fig4", Some(2), Some(9)).unwrap();
        let rows_per_point = 40 + 1; // per-block rows plus the average row
        let count = |id: &str| records.iter().filter(|r| r.scenario_id == id).count();
        assert_eq!(count("fig4_bidir_rls"), 6 * rows_per_point);
        assert_eq!(count("fig4_bidir_ls"), 6 * rows_per_point);
        assert_eq!(count("fig4_forward_only"), 6 * rows_per_point);
        assert_eq!(count("fig4_maxsinr_genie"), rows_per_point);
        assert_eq!(records.len(), 19 * rows_per_point);
        for r in &records {
            assert_eq!(r.n_trials, 2, "trial override must reach every scenario");
            assert_eq!(r.seed, 9, "seed override must reach every scenario");
            assert!(r.sum_rate_bits_mean.is_finite());
        }
        // Forward-only sweeps the doubled budget so totals match the
        // bi-directional curves point for point.
        let fwd_ms: Vec<u64> = records
            .iter()
            .filter(|r| r.scenario_id == "fig4_forward_only" && r.block == BlockKey::Average)
            .map(|r| r.m)
            .collect();
        assert_eq!(fwd_ms, vec![2, 4, 8, 16, 32, 64]);
    }

    #[test]
    fn cycle_split_family_keeps_budget_constant() {
        let records = preset_with("fig2", Some(2), Some(5)).unwrap();
        for r in &records {
            if let Some(c) = r.scenario_id.strip_prefix("fig2_bidir_ls_c") {
                let c: u64 = c.parse().unwrap();
                assert_eq!(r.cycles, c);
                assert_eq!(2 * r.m * r.cycles, r.axis_value as u64);
            } else if r.scenario_id == "fig2_forward_only" {
                assert_eq!(r.m, r.axis_value as u64);
            }
        }
        let genie_rows = records
            .iter()
            .filter(|r| r.scenario_id == "fig2_maxsinr_genie")
            .count();
        assert_eq!(genie_rows, 9);
    }
}
