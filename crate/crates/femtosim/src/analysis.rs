//! SIR, outage, and throughput analytics for one plan over channel draws.
//!
//! The analyzed victim is the downlink of the reference femto user. Its
//! mean received signal is split from the random factors: the serving link
//! carries only fast fading, so outage conditional on all interferer
//! randomness has the closed form `1 − exp(−γ·(I_f + I_m)/S̄)`, which the
//! Monte Carlo estimators here are tested against. Throughput follows the
//! Shannon formula with interference treated as noise, capped at a
//! configurable spectral efficiency because the interference-free case has
//! no noise floor in this model.

use rand::Rng;
use thiserror::Error;

use crate::channel::{
    mean_path_gain, received_power, sample_fast_fading, ChannelError, ChannelParams, LinkClass,
    LinkRealization,
};
use crate::deployment::{Deployment, Point};
use crate::schemes::{indicator_x, indicator_y, AllocationPlan};

/// Errors from the analytics layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("mean received signal must be positive, got {s_bar} W")]
    NonPositiveSignal { s_bar: f64 },
    #[error("at least one trial is required")]
    ZeroTrials,
    #[error("bandwidth must be positive, got {bandwidth_hz} Hz")]
    NonPositiveBandwidth { bandwidth_hz: f64 },
    #[error("spectral efficiency cap must be positive, got {cap}")]
    NonPositiveCap { cap: f64 },
    #[error("throughput needs at least one SIR sample")]
    NoSamples,
    #[error("decibel conversion needs a positive linear value, got {value}")]
    NonPositiveLinear { value: f64 },
    #[error("unknown femtocell id {id}")]
    UnknownFap { id: usize },
    #[error("femtocell {fap} has no assignment in the plan")]
    MissingAssignment { fap: usize },
    #[error("expected {expected} link realizations, got {got}")]
    MismatchedRealizations { expected: usize, got: usize },
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

/// The SIR threshold below which a user is in outage, kept in both scales.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SirThreshold {
    gamma_db: f64,
    gamma_linear: f64,
}

impl SirThreshold {
    pub fn from_db(gamma_db: f64) -> SirThreshold {
        SirThreshold {
            gamma_db,
            gamma_linear: linear_from_db(gamma_db),
        }
    }

    pub fn gamma_db(&self) -> f64 {
        self.gamma_db
    }

    pub fn gamma_linear(&self) -> f64 {
        self.gamma_linear
    }
}

/// Downlink transmit powers of the two tiers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmitPowers {
    pub fap_w: f64,
    pub macro_w: f64,
}

/// The analyzed user: where it sits, which femtocell serves it, and
/// whether its position falls in that cell's inner region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceUser {
    pub position: Point,
    pub serving_fap: usize,
    pub in_inner: bool,
}

impl ReferenceUser {
    /// Associates a position with its serving femtocell. The inner region
    /// is open: a user exactly on the inner radius is served by the edge
    /// band.
    pub fn at(
        position: Point,
        deployment: &Deployment,
        serving_fap: usize,
    ) -> Result<ReferenceUser, AnalysisError> {
        let fap = deployment
            .faps
            .get(serving_fap)
            .ok_or(AnalysisError::UnknownFap { id: serving_fap })?;
        Ok(ReferenceUser {
            position,
            serving_fap,
            in_inner: position.distance(&fap.position) < fap.inner_radius_m,
        })
    }
}

/// Random factors for every potential interferer of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkRealizationSet {
    /// One realization per neighbor of the serving femtocell, aligned with
    /// the neighbor list's ascending-id order.
    pub femto: Vec<LinkRealization>,
    /// One realization per macrocell, indexed by site id.
    pub macro_links: Vec<LinkRealization>,
}

impl LinkRealizationSet {
    /// The all-ones set, making interference purely deterministic.
    pub fn unit(deployment: &Deployment, serving_fap: usize) -> LinkRealizationSet {
        LinkRealizationSet {
            femto: vec![LinkRealization::UNIT; deployment.neighbors.neighbors(serving_fap).len()],
            macro_links: vec![LinkRealization::UNIT; deployment.macrocells.len()],
        }
    }

    /// Draws every realization from one stream: first the neighbor links
    /// in ascending-id order, then the macrocells in site order.
    pub fn sample<R: Rng>(
        deployment: &Deployment,
        serving_fap: usize,
        params: &ChannelParams,
        rng: &mut R,
    ) -> LinkRealizationSet {
        LinkRealizationSet {
            femto: deployment
                .neighbors
                .neighbors(serving_fap)
                .iter()
                .map(|_| LinkRealization::sample(LinkClass::FemtoCross, params, rng))
                .collect(),
            macro_links: deployment
                .macrocells
                .iter()
                .map(|_| LinkRealization::sample(LinkClass::MacroDown, params, rng))
                .collect(),
        }
    }
}

/// Signal and interference at the reference user for one realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceBreakdown {
    /// Mean received signal with the serving link's fast fading factored
    /// out.
    pub s_bar: f64,
    /// Total received femto interference.
    pub i_f: f64,
    /// Total received macro interference.
    pub i_m: f64,
    /// Number of neighbor femtocells interfering in the serving band.
    pub k_active: usize,
    /// Number of macrocells interfering in the serving band.
    pub n_active: usize,
}

impl InterferenceBreakdown {
    pub fn total_interference(&self) -> f64 {
        self.i_f + self.i_m
    }
}

/// Sums the interference arriving in the user's serving band.
///
/// Neighbors and macrocells outside the serving band are skipped entirely,
/// so their link realizations never influence the result.
pub fn interference_breakdown(
    ue: &ReferenceUser,
    plan: &AllocationPlan,
    deployment: &Deployment,
    params: &ChannelParams,
    powers: &TransmitPowers,
    links: &LinkRealizationSet,
) -> Result<InterferenceBreakdown, AnalysisError> {
    let serving = deployment
        .faps
        .get(ue.serving_fap)
        .ok_or(AnalysisError::UnknownFap { id: ue.serving_fap })?;
    if plan.assignment_of(ue.serving_fap).is_none() {
        return Err(AnalysisError::MissingAssignment { fap: ue.serving_fap });
    }
    let neighbors = deployment.neighbors.neighbors(ue.serving_fap);
    if links.femto.len() != neighbors.len() {
        return Err(AnalysisError::MismatchedRealizations {
            expected: neighbors.len(),
            got: links.femto.len(),
        });
    }
    if links.macro_links.len() != deployment.macrocells.len() {
        return Err(AnalysisError::MismatchedRealizations {
            expected: deployment.macrocells.len(),
            got: links.macro_links.len(),
        });
    }

    let s_bar = powers.fap_w
        * mean_path_gain(
            LinkClass::FemtoOwn,
            ue.position.distance(&serving.position),
            0,
            params,
        )?;

    let mut i_f = 0.0;
    let mut k_active = 0;
    for (k, &j) in neighbors.iter().enumerate() {
        if !indicator_x(plan, j, ue.serving_fap, ue.in_inner) {
            continue;
        }
        k_active += 1;
        i_f += received_power(
            powers.fap_w,
            LinkClass::FemtoCross,
            ue.position.distance(&deployment.faps[j].position),
            deployment.walls_to_ue(ue.serving_fap, j),
            params,
            &links.femto[k],
        )?;
    }

    let mut i_m = 0.0;
    let mut n_active = 0;
    for (m, site) in deployment.macrocells.iter().enumerate() {
        if !indicator_y(plan, m, ue.serving_fap, ue.in_inner) {
            continue;
        }
        n_active += 1;
        i_m += received_power(
            powers.macro_w,
            LinkClass::MacroDown,
            ue.position.distance(&site.center),
            0,
            params,
            &links.macro_links[m],
        )?;
    }

    Ok(InterferenceBreakdown {
        s_bar,
        i_f,
        i_m,
        k_active,
        n_active,
    })
}

/// An SIR sample; the interference-free case carries no finite ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sir {
    Ratio(f64),
    /// No transmitter interferes in the serving band, so no outage is
    /// possible and the model puts no ceiling on the ratio.
    NoInterference,
}

impl Sir {
    pub fn ratio(&self) -> Option<f64> {
        match self {
            Sir::Ratio(r) => Some(*r),
            Sir::NoInterference => None,
        }
    }
}

/// Signal-to-interference ratio for one serving-link fading factor.
pub fn sir(breakdown: &InterferenceBreakdown, z0: f64) -> Sir {
    let interference = breakdown.total_interference();
    if interference <= 0.0 {
        Sir::NoInterference
    } else {
        Sir::Ratio(breakdown.s_bar * z0 / interference)
    }
}

/// Outage probability conditioned on the interferer realizations, with the
/// serving link's exponential fading integrated out in closed form.
pub fn outage_conditional(
    breakdown: &InterferenceBreakdown,
    gamma: SirThreshold,
) -> Result<f64, AnalysisError> {
    if !(breakdown.s_bar > 0.0) {
        return Err(AnalysisError::NonPositiveSignal {
            s_bar: breakdown.s_bar,
        });
    }
    let interference = breakdown.total_interference();
    if interference <= 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 - (-gamma.gamma_linear() * interference / breakdown.s_bar).exp())
}

/// An outage frequency with its Wald 95% confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    pub probability: f64,
    pub trials: u64,
    pub half_width_95: f64,
}

impl OutageEstimate {
    /// Frequency estimate from an event count.
    pub fn from_count(outage_events: u64, trials: u64) -> Result<OutageEstimate, AnalysisError> {
        if trials == 0 {
            return Err(AnalysisError::ZeroTrials);
        }
        let p = outage_events as f64 / trials as f64;
        Ok(OutageEstimate {
            probability: p,
            trials,
            half_width_95: 1.96 * (p * (1.0 - p) / trials as f64).sqrt(),
        })
    }
}

/// Monte Carlo outage over the serving link's fading only, for a fixed
/// interference realization. This estimates exactly what
/// [`outage_conditional`] computes in closed form.
pub fn outage_z0_monte_carlo<R: Rng>(
    breakdown: &InterferenceBreakdown,
    gamma: SirThreshold,
    trials: u64,
    rng: &mut R,
) -> Result<OutageEstimate, AnalysisError> {
    if !(breakdown.s_bar > 0.0) {
        return Err(AnalysisError::NonPositiveSignal {
            s_bar: breakdown.s_bar,
        });
    }
    if trials == 0 {
        return Err(AnalysisError::ZeroTrials);
    }
    let mut outages = 0;
    for _ in 0..trials {
        let z0 = sample_fast_fading(rng);
        if let Sir::Ratio(r) = sir(breakdown, z0) {
            if r < gamma.gamma_linear() {
                outages += 1;
            }
        }
    }
    OutageEstimate::from_count(outages, trials)
}

/// Monte Carlo outage over all fading on a fixed deployment and plan.
///
/// Each trial redraws every interferer realization (neighbors first, then
/// macrocells) and the serving link's fading, then tests the SIR against
/// the threshold.
pub fn outage_monte_carlo<R: Rng>(
    ue: &ReferenceUser,
    plan: &AllocationPlan,
    deployment: &Deployment,
    params: &ChannelParams,
    powers: &TransmitPowers,
    gamma: SirThreshold,
    trials: u64,
    rng: &mut R,
) -> Result<OutageEstimate, AnalysisError> {
    if trials == 0 {
        return Err(AnalysisError::ZeroTrials);
    }
    let mut outages = 0;
    for _ in 0..trials {
        let links = LinkRealizationSet::sample(deployment, ue.serving_fap, params, rng);
        let breakdown = interference_breakdown(ue, plan, deployment, params, powers, &links)?;
        let z0 = sample_fast_fading(rng);
        if let Sir::Ratio(r) = sir(&breakdown, z0) {
            if r < gamma.gamma_linear() {
                outages += 1;
            }
        }
    }
    OutageEstimate::from_count(outages, trials)
}

/// Mean Shannon throughput over a set of SIR samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputEstimate {
    pub mean_bps: f64,
    pub bandwidth_hz: f64,
    pub samples: u64,
}

/// Shannon spectral efficiency of one sample, capped; interference-free
/// samples sit at the cap.
pub fn spectral_efficiency(sample: Sir, cap_bits_per_hz: f64) -> f64 {
    match sample {
        Sir::Ratio(r) => (1.0 + r).log2().min(cap_bits_per_hz),
        Sir::NoInterference => cap_bits_per_hz,
    }
}

/// Averages `W · log2(1 + SIR)` over the samples.
pub fn throughput(
    sir_samples: &[Sir],
    bandwidth_hz: f64,
    cap_bits_per_hz: f64,
) -> Result<ThroughputEstimate, AnalysisError> {
    if !(bandwidth_hz > 0.0) || !bandwidth_hz.is_finite() {
        return Err(AnalysisError::NonPositiveBandwidth { bandwidth_hz });
    }
    if !(cap_bits_per_hz > 0.0) || !cap_bits_per_hz.is_finite() {
        return Err(AnalysisError::NonPositiveCap {
            cap: cap_bits_per_hz,
        });
    }
    if sir_samples.is_empty() {
        return Err(AnalysisError::NoSamples);
    }
    let mean_se = sir_samples
        .iter()
        .map(|&s| spectral_efficiency(s, cap_bits_per_hz))
        .sum::<f64>()
        / sir_samples.len() as f64;
    Ok(ThroughputEstimate {
        mean_bps: bandwidth_hz * mean_se,
        bandwidth_hz,
        samples: sir_samples.len() as u64,
    })
}

/// Linear ratio to decibels.
pub fn db_from_linear(x: f64) -> Result<f64, AnalysisError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(AnalysisError::NonPositiveLinear { value: x });
    }
    Ok(10.0 * x.log10())
}

/// Decibels to linear ratio.
pub fn linear_from_db(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}
