//! Density sweeps: Monte Carlo over random deployments for each scheme and
//! femtocell count, with CSV emission.
//!
//! Reproducibility is the organizing constraint. Every sweep cell derives
//! its seed from the base seed and the femtocell count alone, and every
//! trial inside a cell derives per-entity streams from the cell seed, the
//! trial index, a purpose tag, and the entity id. Two consequences:
//!
//! * all schemes of one cell see the same deployments and the same channel
//!   draws, so scheme comparisons are paired rather than independent; and
//! * trials are pure functions of their labels, so the parallel schedule
//!   cannot influence any output bit. Results are folded in trial order
//!   after the parallel map.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

use crate::analysis::{
    interference_breakdown, sir, spectral_efficiency, LinkRealizationSet, OutageEstimate,
    ReferenceUser, Sir, SirThreshold, TransmitPowers,
};
use crate::channel::{sample_fast_fading, ChannelParams, LinkClass, LinkRealization};
use crate::config::{ConfigError, PlacementMode, ScenarioConfig, ThroughputMetric};
use crate::deployment::{sample_neighbor_count, Deployment, Point};
use crate::rng::{mix, stream, tag};
use crate::schemes::{
    allocate_dedicated, allocate_dynamic, allocate_shared, allocate_static_reuse,
    allocate_subband, AllocationPlan, SchemeKind,
};
use crate::spectrum::Band;

/// Fixed CSV header; columns match [`SweepRow`] field order.
pub const CSV_HEADER: &str = "scheme,femtocell_count,outage_probability,ci_half_width,\
mean_throughput_bps,aggregate_throughput_bps,same_band_neighbor_fraction,seed";

/// Errors from sweep execution and result emission.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("sweep cell with count {count}: {message}")]
    Cell { count: u64, message: String },
    #[error("sweep cell with count {count}, trial {trial}: {message}")]
    Trial {
        count: u64,
        trial: u64,
        message: String,
    },
    #[error("cannot write {path}: {message}")]
    Write { path: String, message: String },
    #[error("refusing to emit an empty result")]
    Empty,
}

/// One (scheme, count) cell of the sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub scheme: SchemeKind,
    pub femtocell_count: u64,
    pub outage_probability: f64,
    pub ci_half_width: f64,
    pub mean_throughput_bps: f64,
    /// 95% confidence half-width of the per-trial capacity mean. Not a CSV
    /// column; it backs ordering checks between schemes.
    pub throughput_half_width_95: f64,
    pub aggregate_throughput_bps: f64,
    pub same_band_neighbor_fraction: f64,
    /// The derived seed of this cell; rerunning with the base seed that
    /// produced it regenerates the row bit for bit.
    pub seed: u64,
}

/// All rows of one sweep, ordered by scheme, then by ascending count.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Finds the row of one cell.
    pub fn row(&self, scheme: SchemeKind, count: u64) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.scheme == scheme && r.femtocell_count == count)
    }

    /// Renders the result as CSV text with six-significant-digit floats.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{:.5e},{:.5e},{:.5e},{:.5e},{:.5e},{}",
                r.scheme,
                r.femtocell_count,
                r.outage_probability,
                r.ci_half_width,
                r.mean_throughput_bps,
                r.aggregate_throughput_bps,
                r.same_band_neighbor_fraction,
                r.seed,
            );
        }
        out
    }

    /// Writes the CSV to a file, refusing to emit an empty result.
    pub fn write_csv(&self, path: &Path) -> Result<(), SweepError> {
        if self.rows.is_empty() {
            return Err(SweepError::Empty);
        }
        std::fs::write(path, self.to_csv()).map_err(|e| SweepError::Write {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }

    /// A short per-count recommendation: static reuse for non-dense
    /// deployments, dynamic reuse once the count crosses the dense
    /// threshold.
    pub fn summary(&self, dense_threshold: u64) -> String {
        let mut counts: Vec<u64> = self.rows.iter().map(|r| r.femtocell_count).collect();
        counts.sort_unstable();
        counts.dedup();
        let mut out = String::new();
        for count in counts {
            let (regime, pick) = if count > dense_threshold {
                ("dense", SchemeKind::DynamicReuse)
            } else {
                ("non-dense", SchemeKind::StaticReuse)
            };
            let _ = writeln!(
                out,
                "count {count} ({regime}): prefer the {} scheme",
                pick.as_str()
            );
        }
        out
    }
}

/// Per-trial, per-scheme measurements before aggregation.
#[derive(Debug, Clone, Copy)]
struct SchemeTrial {
    outage_hit: bool,
    capacity_bps: f64,
    same_pairs: u64,
    total_pairs: u64,
}

/// Runs the full sweep described by the configuration.
pub fn run_sweep(config: &ScenarioConfig) -> Result<SweepResult, SweepError> {
    config.validate()?;
    let schemes: Vec<SchemeKind> = SchemeKind::ALL
        .iter()
        .copied()
        .filter(|k| config.schemes.contains(k))
        .collect();
    let mut counts = config.femtocell_counts.clone();
    counts.sort_unstable();
    counts.dedup();

    let mut cells: Vec<Vec<SweepRow>> = Vec::with_capacity(counts.len());
    for &count in &counts {
        cells.push(run_cell(config, &schemes, count)?);
    }

    let mut rows = Vec::with_capacity(schemes.len() * counts.len());
    for scheme_idx in 0..schemes.len() {
        for cell in &cells {
            rows.push(cell[scheme_idx].clone());
        }
    }
    Ok(SweepResult { rows })
}

/// Runs every trial of one count cell and aggregates per-scheme rows.
fn run_cell(
    config: &ScenarioConfig,
    schemes: &[SchemeKind],
    count: u64,
) -> Result<Vec<SweepRow>, SweepError> {
    let cell_seed = mix(&[config.seed, tag::SWEEP_CELL, count]);
    let total = config.total_band()?;
    let params = config.channel_params();
    let powers = config.transmit_powers();
    let gamma = config.sir_threshold();

    // With a fixed per-trial count, the non-dynamic plans depend only on
    // the femtocell ids, so one copy serves every trial of the cell. The
    // prototype deployment below exists only to size those plans.
    let fixed_plans: Vec<Option<AllocationPlan>> = if config.placement_mode == PlacementMode::Fixed
    {
        let trial0_key = mix(&[cell_seed, tag::TRIAL, 0]);
        let proto = Deployment::generate(
            &config.deployment_spec(count),
            &mut stream(&[trial0_key, tag::PLACEMENT]),
        )
        .map_err(|e| SweepError::Cell {
            count,
            message: e.to_string(),
        })?;
        schemes
            .iter()
            .map(|&kind| {
                if kind == SchemeKind::DynamicReuse {
                    Ok(None)
                } else {
                    build_plan(kind, total, config, &proto).map(Some)
                }
            })
            .collect::<Result<_, _>>()
            .map_err(|e: crate::schemes::SchemeError| SweepError::Cell {
                count,
                message: e.to_string(),
            })?
    } else {
        vec![None; schemes.len()]
    };

    let trials = config.trials;
    let outcomes: Vec<Vec<SchemeTrial>> = (0..trials as usize)
        .into_par_iter()
        .map(|t| {
            run_trial(config, schemes, &fixed_plans, total, &params, &powers, gamma, cell_seed, count, t as u64)
                .map_err(|message| SweepError::Trial {
                    count,
                    trial: t as u64,
                    message,
                })
        })
        .collect::<Result<_, _>>()?;

    let mut rows = Vec::with_capacity(schemes.len());
    for (scheme_idx, &scheme) in schemes.iter().enumerate() {
        let mut hits = 0u64;
        let mut capacity_sum = 0.0f64;
        let mut capacity_sq_sum = 0.0f64;
        let mut same_pairs = 0u64;
        let mut total_pairs = 0u64;
        for trial in &outcomes {
            let s = &trial[scheme_idx];
            hits += u64::from(s.outage_hit);
            capacity_sum += s.capacity_bps;
            capacity_sq_sum += s.capacity_bps * s.capacity_bps;
            same_pairs += s.same_pairs;
            total_pairs += s.total_pairs;
        }
        let estimate = OutageEstimate::from_count(hits, trials).map_err(|e| SweepError::Cell {
            count,
            message: e.to_string(),
        })?;
        let n = trials as f64;
        let mean_throughput_bps = capacity_sum / n;
        let capacity_variance = if trials > 1 {
            ((capacity_sq_sum - n * mean_throughput_bps * mean_throughput_bps) / (n - 1.0))
                .max(0.0)
        } else {
            0.0
        };
        rows.push(SweepRow {
            scheme,
            femtocell_count: count,
            outage_probability: estimate.probability,
            ci_half_width: estimate.half_width_95,
            mean_throughput_bps,
            throughput_half_width_95: 1.96 * (capacity_variance / n).sqrt(),
            aggregate_throughput_bps: mean_throughput_bps * count as f64,
            same_band_neighbor_fraction: if total_pairs == 0 {
                0.0
            } else {
                same_pairs as f64 / total_pairs as f64
            },
            seed: cell_seed,
        });
    }
    Ok(rows)
}

fn build_plan(
    kind: SchemeKind,
    total: Band,
    config: &ScenarioConfig,
    deployment: &Deployment,
) -> Result<AllocationPlan, crate::schemes::SchemeError> {
    match kind {
        SchemeKind::Shared => allocate_shared(total, deployment),
        SchemeKind::Dedicated => {
            allocate_dedicated(total, config.dedicated_femto_fraction, deployment)
        }
        SchemeKind::SubBand => allocate_subband(total, config.subband_fraction, deployment),
        SchemeKind::StaticReuse => allocate_static_reuse(total, deployment),
        SchemeKind::DynamicReuse => {
            allocate_dynamic(total, deployment, config.resize_policy()).map(|(plan, _)| plan)
        }
    }
}

/// Draws one user's interferer realizations from per-entity streams, so
/// results do not depend on how many other entities exist.
fn draw_links(
    deployment: &Deployment,
    serving: usize,
    params: &ChannelParams,
    trial_key: u64,
    femto_tag: u64,
    macro_tag: u64,
) -> LinkRealizationSet {
    LinkRealizationSet {
        femto: deployment
            .neighbors
            .neighbors(serving)
            .iter()
            .map(|&j| {
                LinkRealization::sample(
                    LinkClass::FemtoCross,
                    params,
                    &mut stream(&[trial_key, femto_tag, j as u64]),
                )
            })
            .collect(),
        macro_links: deployment
            .macrocells
            .iter()
            .map(|site| {
                LinkRealization::sample(
                    LinkClass::MacroDown,
                    params,
                    &mut stream(&[trial_key, macro_tag, site.id as u64]),
                )
            })
            .collect(),
    }
}

#[allow(clippy::too_many_arguments)]
fn run_trial(
    config: &ScenarioConfig,
    schemes: &[SchemeKind],
    fixed_plans: &[Option<AllocationPlan>],
    total: Band,
    params: &ChannelParams,
    powers: &TransmitPowers,
    gamma: SirThreshold,
    cell_seed: u64,
    count: u64,
    t: u64,
) -> Result<Vec<SchemeTrial>, String> {
    let trial_key = mix(&[cell_seed, tag::TRIAL, t]);
    let mut placement_rng = stream(&[trial_key, tag::PLACEMENT]);
    let placed = match config.placement_mode {
        PlacementMode::Fixed => count,
        PlacementMode::Poisson => {
            let mean = config.poisson_mean.unwrap_or(count as f64);
            sample_neighbor_count(mean, &mut placement_rng).map_err(|e| e.to_string())?
        }
    };
    let deployment = Deployment::generate(&config.deployment_spec(placed), &mut placement_rng)
        .map_err(|e| e.to_string())?;

    let edge_ue = ReferenceUser::at(deployment.reference_ue, &deployment, 0)
        .map_err(|e| e.to_string())?;
    let edge_links = draw_links(
        &deployment,
        0,
        params,
        trial_key,
        tag::FEMTO_EDGE,
        tag::MACRO_EDGE,
    );
    let z0_edge = sample_fast_fading(&mut stream(&[trial_key, tag::SIGNAL_EDGE]));

    // The center-region user only matters for the dynamic scheme's cell
    // capacity; its streams are separate, so skipping them when unused
    // changes nothing else.
    let needs_center = config.throughput_metric == ThroughputMetric::Cell
        && schemes.contains(&SchemeKind::DynamicReuse);
    let center_ctx = if needs_center {
        let position = Point::new(
            config.reference_fap_distance_m + config.center_ue_distance_m,
            0.0,
        );
        let ue = ReferenceUser::at(position, &deployment, 0).map_err(|e| e.to_string())?;
        let links = draw_links(
            &deployment,
            0,
            params,
            trial_key,
            tag::FEMTO_CENTER,
            tag::MACRO_CENTER,
        );
        let z0 = sample_fast_fading(&mut stream(&[trial_key, tag::SIGNAL_CENTER]));
        Some((ue, links, z0))
    } else {
        None
    };

    let mut results = Vec::with_capacity(schemes.len());
    for (scheme_idx, &kind) in schemes.iter().enumerate() {
        let built;
        let plan: &AllocationPlan = match &fixed_plans[scheme_idx] {
            Some(plan) => plan,
            None => {
                built = build_plan(kind, total, config, &deployment).map_err(|e| e.to_string())?;
                &built
            }
        };

        let edge_breakdown =
            interference_breakdown(&edge_ue, plan, &deployment, params, powers, &edge_links)
                .map_err(|e| e.to_string())?;
        let edge_sir = sir(&edge_breakdown, z0_edge);
        let outage_hit = matches!(edge_sir, Sir::Ratio(r) if r < gamma.gamma_linear());

        let assignment = plan
            .assignment_of(0)
            .ok_or_else(|| "reference femtocell missing from plan".to_string())?;
        let cap = config.se_cap_bits_per_hz;
        let capacity_bps = match (&center_ctx, kind) {
            (Some((center_ue, center_links, z0_center)), SchemeKind::DynamicReuse) => {
                let center_breakdown = interference_breakdown(
                    center_ue,
                    plan,
                    &deployment,
                    params,
                    powers,
                    center_links,
                )
                .map_err(|e| e.to_string())?;
                let center_sir = sir(&center_breakdown, *z0_center);
                assignment.center_band.width_hz() * spectral_efficiency(center_sir, cap)
                    + assignment.edge_band.width_hz() * spectral_efficiency(edge_sir, cap)
            }
            _ => {
                assignment.active_band(edge_ue.in_inner).width_hz()
                    * spectral_efficiency(edge_sir, cap)
            }
        };

        let (same_pairs, total_pairs) = plan.count_same_band_pairs(&deployment.neighbors);
        results.push(SchemeTrial {
            outage_hit,
            capacity_bps,
            same_pairs,
            total_pairs,
        });
    }
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> ScenarioConfig {
        let mut c = ScenarioConfig::default();
        c.femtocell_counts = vec![20, 10];
        c.trials = 50;
        c
    }

    #[test]
    fn rows_form_the_scheme_by_count_product() {
        let result = run_sweep(&small_config()).unwrap();
        assert_eq!(result.rows.len(), 10);
        let order: Vec<(SchemeKind, u64)> = result
            .rows
            .iter()
            .map(|r| (r.scheme, r.femtocell_count))
            .collect();
        let mut expected = Vec::new();
        for scheme in SchemeKind::ALL {
            for count in [10, 20] {
                expected.push((scheme, count));
            }
        }
        assert_eq!(order, expected);
        for row in &result.rows {
            assert!(row.outage_probability >= 0.0 && row.outage_probability <= 1.0);
            assert!(row.same_band_neighbor_fraction >= 0.0);
            assert!(row.same_band_neighbor_fraction <= 1.0);
            assert!(row.mean_throughput_bps > 0.0);
        }
    }

    #[test]
    fn reruns_are_byte_identical() {
        let config = small_config();
        let a = run_sweep(&config).unwrap();
        let b = run_sweep(&config).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
    }

    #[test]
    fn the_seed_column_is_the_derived_cell_seed() {
        let config = small_config();
        let result = run_sweep(&config).unwrap();
        for row in &result.rows {
            assert_eq!(
                row.seed,
                mix(&[config.seed, tag::SWEEP_CELL, row.femtocell_count])
            );
        }
    }

    #[test]
    fn changing_the_base_seed_changes_the_results() {
        let mut config = small_config();
        let a = run_sweep(&config).unwrap();
        config.seed = 2;
        let b = run_sweep(&config).unwrap();
        assert_ne!(
            a.row(SchemeKind::Shared, 20).unwrap().mean_throughput_bps,
            b.row(SchemeKind::Shared, 20).unwrap().mean_throughput_bps
        );
    }

    #[test]
    fn csv_has_the_fixed_header_and_six_digit_floats() {
        let mut config = small_config();
        config.femtocell_counts = vec![10];
        config.schemes = vec![SchemeKind::Shared, SchemeKind::StaticReuse];
        let result = run_sweep(&config).unwrap();
        let csv = result.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        let mut rows = 0;
        for line in lines {
            rows += 1;
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), 8);
            for float_field in &fields[2..7] {
                let (mantissa, exponent) = float_field
                    .split_once('e')
                    .unwrap_or_else(|| panic!("not scientific notation: {float_field}"));
                assert_eq!(mantissa.len(), 7, "six significant digits in {float_field}");
                assert_eq!(&mantissa[1..2], ".");
                assert!(exponent.trim_start_matches('-').parse::<u32>().is_ok());
            }
            assert!(fields[7].parse::<u64>().is_ok());
        }
        assert_eq!(rows, 2);
    }

    #[test]
    fn empty_results_are_not_written() {
        let empty = SweepResult { rows: Vec::new() };
        let err = empty
            .write_csv(Path::new("/tmp/never-written.csv"))
            .unwrap_err();
        assert_eq!(err, SweepError::Empty);
    }

    #[test]
    fn summary_switches_recommendation_at_the_dense_threshold() {
        let mut config = small_config();
        config.femtocell_counts = vec![2000, 100];
        config.trials = 5;
        let result = run_sweep(&config).unwrap();
        let summary = result.summary(1000);
        let lines: Vec<&str> = summary.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("count 100 (non-dense)"));
        assert!(lines[0].contains("static"));
        assert!(lines[1].starts_with("count 2000 (dense)"));
        assert!(lines[1].contains("dynamic"));
    }

    #[test]
    fn invalid_configs_are_rejected_before_running() {
        let mut config = small_config();
        config.trials = 0;
        assert!(matches!(run_sweep(&config), Err(SweepError::Config(_))));
    }

    #[test]
    fn poisson_placement_mode_runs_and_labels_rows_by_mean() {
        let mut config = small_config();
        config.placement_mode = PlacementMode::Poisson;
        config.poisson_mean = Some(5.0);
        config.femtocell_counts = vec![3];
        config.trials = 20;
        let result = run_sweep(&config).unwrap();
        assert_eq!(result.rows.len(), 5);
        assert!(result.rows.iter().all(|r| r.femtocell_count == 3));
    }

    #[test]
    fn edge_user_metric_never_exceeds_the_cell_metric_for_dynamic() {
        let mut config = small_config();
        config.femtocell_counts = vec![30];
        config.trials = 40;
        config.schemes = vec![SchemeKind::DynamicReuse];
        let cell = run_sweep(&config).unwrap();
        config.throughput_metric = ThroughputMetric::EdgeUe;
        let edge = run_sweep(&config).unwrap();
        let cell_row = cell.row(SchemeKind::DynamicReuse, 30).unwrap();
        let edge_row = edge.row(SchemeKind::DynamicReuse, 30).unwrap();
        assert!(cell_row.mean_throughput_bps > edge_row.mean_throughput_bps);
        assert_eq!(cell_row.outage_probability, edge_row.outage_probability);
    }
}
