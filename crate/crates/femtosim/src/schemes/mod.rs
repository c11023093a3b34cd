//! Frequency-allocation schemes and the plans they produce.
//!
//! Three schemes are deployment-independent: shared gives every cell the
//! whole band, dedicated splits the band between the macro and femto tiers,
//! and sub-band carves the femto slice out of a macro band that still spans
//! everything. The two reuse schemes cut the band into thirds with
//! macrocells on a reuse-3 pattern; static reuse alternates femtocells over
//! the two non-host thirds, while dynamic reuse runs the self-organizing
//! engine in [`dynamic`] to pick center and edge sub-bands from neighbor
//! observations.
//!
//! Every scheme produces an [`AllocationPlan`], a frozen table of per-site
//! bands that the analytics interrogate through the binary interference
//! indicators [`indicator_x`] and [`indicator_y`].

pub mod dynamic;

pub use dynamic::{
    allocate_dynamic, select_edge_band, DynamicEngine, EdgeBandKind, EdgeDecision,
    InstallOutcome, ResizePolicy,
};

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::deployment::{Deployment, NeighborGraph};
use crate::spectrum::{partition_equal, Band, BandSet, SpectrumError};

/// Errors from plan construction and scheme-name parsing.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchemeError {
    #[error("total band must be nonempty")]
    EmptyTotal,
    /// The tier split fraction is outside (0, 1) or cuts a degenerate slice.
    #[error("band fraction must cut a nonempty strict slice of the total, got {value}")]
    InvalidFraction { value: f64 },
    #[error("macrocell {macrocell} has reuse band index {band_index}, expected 1 to 3")]
    BadBandIndex { macrocell: usize, band_index: u8 },
    #[error("unknown femtocell id {id}")]
    UnknownFap { id: usize },
    #[error("unknown scheme \"{name}\" (expected shared, dedicated, subband, static, or dynamic)")]
    UnknownScheme { name: String },
    #[error("resize policy invalid: {detail}")]
    BadResizePolicy { detail: String },
    #[error("femtocell {fap} has invalid cell radius {radius_m} m")]
    BadCellRadius { fap: usize, radius_m: f64 },
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}

/// The five modeled allocation schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeKind {
    Shared,
    Dedicated,
    SubBand,
    StaticReuse,
    DynamicReuse,
}

impl SchemeKind {
    /// All schemes, in the fixed order used for reports.
    pub const ALL: [SchemeKind; 5] = [
        SchemeKind::Shared,
        SchemeKind::Dedicated,
        SchemeKind::SubBand,
        SchemeKind::StaticReuse,
        SchemeKind::DynamicReuse,
    ];

    /// Stable lowercase name used on the command line and in CSV output.
    pub fn as_str(&self) -> &'static str {
        match self {
            SchemeKind::Shared => "shared",
            SchemeKind::Dedicated => "dedicated",
            SchemeKind::SubBand => "subband",
            SchemeKind::StaticReuse => "static",
            SchemeKind::DynamicReuse => "dynamic",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeKind {
    type Err = SchemeError;

    fn from_str(s: &str) -> Result<SchemeKind, SchemeError> {
        SchemeKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| SchemeError::UnknownScheme { name: s.to_owned() })
    }
}

/// The bands one femtocell may transmit on.
///
/// Non-dynamic schemes assign a single band: it is stored in both
/// `center_band` and `full_band`, and `edge_band` is empty. The dynamic
/// scheme stores the fixed center third in `center_band`, the engine-chosen
/// edge sub-band in `edge_band`, and their union in `full_band`.
#[derive(Debug, Clone, PartialEq)]
pub struct FapAssignment {
    pub fap_id: usize,
    pub host_macrocell: usize,
    pub center_band: BandSet,
    pub edge_band: BandSet,
    pub full_band: BandSet,
}

impl FapAssignment {
    /// Assignment of a single band, as the non-dynamic schemes produce.
    pub fn uniform(fap_id: usize, host_macrocell: usize, band: Band) -> FapAssignment {
        let set = BandSet::from(band);
        FapAssignment {
            fap_id,
            host_macrocell,
            center_band: set.clone(),
            edge_band: BandSet::empty(),
            full_band: set,
        }
    }

    /// Assignment with distinct center and edge parts, as the dynamic
    /// scheme produces.
    pub fn split(fap_id: usize, host_macrocell: usize, center: Band, edge: Band) -> FapAssignment {
        let center = BandSet::from(center);
        let edge = BandSet::from(edge);
        let full = center.unite(&edge);
        FapAssignment {
            fap_id,
            host_macrocell,
            center_band: center,
            edge_band: edge,
            full_band: full,
        }
    }

    /// The band serving a user at the given cell position: the center band
    /// inside the inner region, the edge band outside it. Single-band
    /// assignments serve the same band everywhere.
    pub fn active_band(&self, in_inner: bool) -> &BandSet {
        if self.edge_band.is_empty() {
            &self.full_band
        } else if in_inner {
            &self.center_band
        } else {
            &self.edge_band
        }
    }

    /// Everything the femtocell transmits on, regardless of user position.
    pub fn transmit_band(&self) -> &BandSet {
        &self.full_band
    }
}

/// A frozen allocation: one band per macrocell, one assignment per
/// femtocell, and the per-macrocell union of bands its femtocells may use.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationPlan {
    pub scheme: SchemeKind,
    /// Downlink band of each macrocell, indexed by site id.
    pub macro_bands: Vec<Band>,
    /// Per-femtocell assignment, indexed by femtocell id.
    pub fap_assignments: Vec<FapAssignment>,
    /// Union of femto-usable spectrum under each macrocell, indexed by
    /// site id.
    pub femto_totals: Vec<BandSet>,
}

impl AllocationPlan {
    pub fn femto_total(&self, macrocell: usize) -> &BandSet {
        &self.femto_totals[macrocell]
    }

    /// Looks up a femtocell's assignment by id. Returns `None` for ids the
    /// plan does not cover, such as femtocells removed from a dynamic plan.
    pub fn assignment_of(&self, fap_id: usize) -> Option<&FapAssignment> {
        self.fap_assignments
            .binary_search_by_key(&fap_id, |a| a.fap_id)
            .ok()
            .map(|idx| &self.fap_assignments[idx])
    }

    /// Counts neighbor pairs whose outer-region bands overlap.
    ///
    /// Returns `(overlapping, total)` over the undirected edges of the
    /// graph whose endpoints are both in the plan. Under dynamic reuse
    /// this compares edge sub-bands; otherwise it compares the assigned
    /// bands directly.
    pub fn count_same_band_pairs(&self, graph: &NeighborGraph) -> (u64, u64) {
        let mut same = 0;
        let mut pairs = 0;
        for assignment in &self.fap_assignments {
            let i = assignment.fap_id;
            for &j in graph.neighbors(i) {
                if j <= i {
                    continue;
                }
                let Some(partner) = self.assignment_of(j) else {
                    continue;
                };
                pairs += 1;
                if assignment.active_band(false).overlaps(partner.active_band(false)) {
                    same += 1;
                }
            }
        }
        (same, pairs)
    }

    /// Renders one line per femtocell: id, host macrocell, center band,
    /// edge band, with bands as kHz intervals.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for a in &self.fap_assignments {
            writeln!(
                out,
                "fap {} host {} center {} edge {}",
                a.fap_id, a.host_macrocell, a.center_band, a.edge_band
            )
            .expect("writing to a String cannot fail");
        }
        out
    }
}

/// Whether an interfering femtocell transmits into the band serving the
/// reference user.
///
/// `reference_in_inner` tells which band serves the user under dynamic
/// reuse; it is ignored for single-band assignments. An interferer the
/// plan does not cover (a removed femtocell) does not transmit, so the
/// indicator is 0. The reference femtocell must be in the plan.
pub fn indicator_x(
    plan: &AllocationPlan,
    interferer: usize,
    reference_fap: usize,
    reference_in_inner: bool,
) -> bool {
    let serving = plan
        .assignment_of(reference_fap)
        .expect("reference femtocell is in the plan")
        .active_band(reference_in_inner);
    plan.assignment_of(interferer)
        .is_some_and(|a| a.transmit_band().overlaps(serving))
}

/// Whether a macrocell transmits into the band serving the reference user.
pub fn indicator_y(
    plan: &AllocationPlan,
    macrocell: usize,
    reference_fap: usize,
    reference_in_inner: bool,
) -> bool {
    let serving = plan
        .assignment_of(reference_fap)
        .expect("reference femtocell is in the plan")
        .active_band(reference_in_inner);
    serving.overlaps_band(&plan.macro_bands[macrocell])
}

/// Every macrocell and every femtocell gets the whole band.
pub fn allocate_shared(total: Band, deployment: &Deployment) -> Result<AllocationPlan, SchemeError> {
    if total.is_empty() {
        return Err(SchemeError::EmptyTotal);
    }
    Ok(AllocationPlan {
        scheme: SchemeKind::Shared,
        macro_bands: vec![total; deployment.macrocells.len()],
        fap_assignments: deployment
            .faps
            .iter()
            .map(|f| FapAssignment::uniform(f.id, f.host_macrocell, total))
            .collect(),
        femto_totals: vec![BandSet::from(total); deployment.macrocells.len()],
    })
}

/// Femtocells get the lower fraction of the band, macrocells the rest.
pub fn allocate_dedicated(
    total: Band,
    femto_fraction: f64,
    deployment: &Deployment,
) -> Result<AllocationPlan, SchemeError> {
    let (femto, macro_band) = cut_lower_slice(total, femto_fraction)?;
    Ok(AllocationPlan {
        scheme: SchemeKind::Dedicated,
        macro_bands: vec![macro_band; deployment.macrocells.len()],
        fap_assignments: deployment
            .faps
            .iter()
            .map(|f| FapAssignment::uniform(f.id, f.host_macrocell, femto))
            .collect(),
        femto_totals: vec![BandSet::from(femto); deployment.macrocells.len()],
    })
}

/// Macrocells keep the whole band; femtocells get its lower fraction.
pub fn allocate_subband(
    total: Band,
    sub_fraction: f64,
    deployment: &Deployment,
) -> Result<AllocationPlan, SchemeError> {
    let (femto, _) = cut_lower_slice(total, sub_fraction)?;
    Ok(AllocationPlan {
        scheme: SchemeKind::SubBand,
        macro_bands: vec![total; deployment.macrocells.len()],
        fap_assignments: deployment
            .faps
            .iter()
            .map(|f| FapAssignment::uniform(f.id, f.host_macrocell, femto))
            .collect(),
        femto_totals: vec![BandSet::from(femto); deployment.macrocells.len()],
    })
}

/// Reuse-3 thirds with femtocells alternating over the two non-host thirds.
///
/// Even femtocell ids take the third two steps past the host's, odd ids the
/// immediately following third. The alternation needs no coordination and
/// leaves roughly half of any femtocell's neighbors on its own band.
pub fn allocate_static_reuse(
    total: Band,
    deployment: &Deployment,
) -> Result<AllocationPlan, SchemeError> {
    let thirds = reuse_thirds(total)?;
    let macro_bands = macro_reuse_bands(&thirds, deployment)?;
    let femto_totals = femto_reuse_totals(&thirds, deployment);
    let fap_assignments = deployment
        .faps
        .iter()
        .map(|f| {
            let band_index = deployment.macrocells[f.host_macrocell].band_index;
            let slot = if f.id % 2 == 0 {
                edge_third_slot(band_index)
            } else {
                center_third_slot(band_index)
            };
            FapAssignment::uniform(f.id, f.host_macrocell, thirds[slot])
        })
        .collect();
    Ok(AllocationPlan {
        scheme: SchemeKind::StaticReuse,
        macro_bands,
        fap_assignments,
        femto_totals,
    })
}

/// Splits the total band into the reuse-3 thirds, indexed by
/// `band_index - 1`.
pub(crate) fn reuse_thirds(total: Band) -> Result<[Band; 3], SchemeError> {
    if total.is_empty() {
        return Err(SchemeError::EmptyTotal);
    }
    let parts = partition_equal(total, 3)?;
    Ok([parts[0], parts[1], parts[2]])
}

/// Third index holding the femto center band under a host with the given
/// reuse band index: the cyclic successor of the host's own third.
pub(crate) fn center_third_slot(band_index: u8) -> usize {
    band_index as usize % 3
}

/// Third index that edge sub-bands are carved from: two cyclic steps past
/// the host's own third.
pub(crate) fn edge_third_slot(band_index: u8) -> usize {
    (band_index as usize + 1) % 3
}

pub(crate) fn macro_reuse_bands(
    thirds: &[Band; 3],
    deployment: &Deployment,
) -> Result<Vec<Band>, SchemeError> {
    deployment
        .macrocells
        .iter()
        .map(|m| {
            if (1..=3).contains(&m.band_index) {
                Ok(thirds[m.band_index as usize - 1])
            } else {
                Err(SchemeError::BadBandIndex {
                    macrocell: m.id,
                    band_index: m.band_index,
                })
            }
        })
        .collect()
}

pub(crate) fn femto_reuse_totals(thirds: &[Band; 3], deployment: &Deployment) -> Vec<BandSet> {
    deployment
        .macrocells
        .iter()
        .map(|m| {
            let center = BandSet::from(thirds[center_third_slot(m.band_index)]);
            center.unite(&BandSet::from(thirds[edge_third_slot(m.band_index)]))
        })
        .collect()
}

fn cut_lower_slice(total: Band, fraction: f64) -> Result<(Band, Band), SchemeError> {
    if total.is_empty() {
        return Err(SchemeError::EmptyTotal);
    }
    if !fraction.is_finite() || fraction <= 0.0 || fraction >= 1.0 {
        return Err(SchemeError::InvalidFraction { value: fraction });
    }
    let width = total.width_khz();
    let cut = (width as f64 * fraction).round() as i64;
    if cut <= 0 || cut >= width {
        return Err(SchemeError::InvalidFraction { value: fraction });
    }
    let lower = Band::from_khz(total.lo_khz(), total.lo_khz() + cut)?;
    let upper = Band::from_khz(total.lo_khz() + cut, total.hi_khz())?;
    Ok((lower, upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deployment::{Deployment, DeploymentSpec};
    use crate::rng::stream;

    fn total() -> Band {
        Band::from_mhz(0.0, 30.0).unwrap()
    }

    fn spec(count: u64) -> DeploymentSpec {
        DeploymentSpec {
            macro_radius_m: 1000.0,
            femtocell_count: count,
            reference_fap_distance_m: 200.0,
            ue_distance_m: 5.0,
            cell_radius_m: 10.0,
            inner_radius_fraction: 0.5,
            neighbor_threshold_m: 60.0,
            walls_between_femtocells: 1,
        }
    }

    fn sample_deployment(count: u64, seed: u64) -> Deployment {
        Deployment::generate(&spec(count), &mut stream(&[seed])).unwrap()
    }

    #[test]
    fn scheme_names_round_trip() {
        for kind in SchemeKind::ALL {
            assert_eq!(kind.as_str().parse::<SchemeKind>().unwrap(), kind);
        }
        assert!(matches!(
            "round-robin".parse::<SchemeKind>(),
            Err(SchemeError::UnknownScheme { .. })
        ));
    }

    #[test]
    fn shared_assigns_the_full_band_everywhere() {
        let d = sample_deployment(10, 1);
        let plan = allocate_shared(total(), &d).unwrap();
        for band in &plan.macro_bands {
            assert_eq!(*band, total());
        }
        for a in &plan.fap_assignments {
            assert_eq!(*a.transmit_band(), BandSet::from(total()));
            assert_eq!(a.full_band.width_khz(), total().width_khz());
        }
        // The tiers coincide, so their intersection is still the whole band.
        let joint = BandSet::from(plan.macro_bands[0]).intersect(&plan.fap_assignments[0].full_band);
        assert_eq!(joint, BandSet::from(total()));
    }

    #[test]
    fn dedicated_splits_the_band_between_tiers() {
        let d = sample_deployment(5, 2);
        let plan = allocate_dedicated(total(), 1.0 / 3.0, &d).unwrap();
        let femto = &plan.fap_assignments[0].full_band;
        let macro_band = BandSet::from(plan.macro_bands[0]);
        assert_eq!(*femto, BandSet::from(Band::from_mhz(0.0, 10.0).unwrap()));
        assert_eq!(plan.macro_bands[0], Band::from_mhz(10.0, 30.0).unwrap());
        assert!(macro_band.intersect(femto).is_empty());
        assert_eq!(macro_band.unite(femto), BandSet::from(total()));
    }

    #[test]
    fn dedicated_default_fraction_cuts_at_whole_khz() {
        let d = sample_deployment(1, 3);
        let plan = allocate_dedicated(total(), 0.333, &d).unwrap();
        assert_eq!(plan.fap_assignments[0].full_band.width_khz(), 9990);
        assert_eq!(plan.macro_bands[0].width_khz(), 20010);
    }

    #[test]
    fn subband_nests_the_femto_slice_inside_the_macro_band() {
        let d = sample_deployment(5, 4);
        let plan = allocate_subband(total(), 1.0 / 3.0, &d).unwrap();
        let femto = &plan.fap_assignments[0].full_band;
        let macro_band = BandSet::from(plan.macro_bands[0]);
        assert_eq!(plan.macro_bands[0], total());
        assert_eq!(macro_band.intersect(femto), *femto);
        assert_eq!(macro_band.unite(femto), BandSet::from(total()));
    }

    #[test]
    fn degenerate_fractions_are_rejected() {
        let d = sample_deployment(1, 5);
        for fraction in [0.0, 1.0, -0.2, 1.7, f64::NAN, 1e-9] {
            assert!(allocate_dedicated(total(), fraction, &d).is_err());
            assert!(allocate_subband(total(), fraction, &d).is_err());
        }
    }

    #[test]
    fn static_reuse_avoids_the_host_third() {
        let d = sample_deployment(50, 6);
        let plan = allocate_static_reuse(total(), &d).unwrap();
        let thirds = reuse_thirds(total()).unwrap();
        for a in &plan.fap_assignments {
            let host_third = BandSet::from(thirds[0]);
            assert!(!a.full_band.overlaps(&host_third), "fap {}", a.fap_id);
            assert!(
                a.full_band == BandSet::from(thirds[1]) || a.full_band == BandSet::from(thirds[2])
            );
        }
    }

    #[test]
    fn static_reuse_alternates_by_id() {
        let d = sample_deployment(4, 7);
        let plan = allocate_static_reuse(total(), &d).unwrap();
        let thirds = reuse_thirds(total()).unwrap();
        // Host band is 1, so even ids take the third third and odd ids the
        // second; in particular any two adjacent ids differ.
        assert_eq!(plan.fap_assignments[0].full_band, BandSet::from(thirds[2]));
        assert_eq!(plan.fap_assignments[1].full_band, BandSet::from(thirds[1]));
        assert_ne!(
            plan.fap_assignments[2].full_band,
            plan.fap_assignments[3].full_band
        );
    }

    #[test]
    fn static_reuse_balances_without_edges() {
        let d = sample_deployment(999, 8);
        let plan = allocate_static_reuse(total(), &d).unwrap();
        let thirds = reuse_thirds(total()).unwrap();
        let second = plan
            .fap_assignments
            .iter()
            .filter(|a| a.full_band == BandSet::from(thirds[1]))
            .count() as i64;
        let third = plan.fap_assignments.len() as i64 - second;
        assert!((second - third).abs() <= 1, "{second} vs {third}");
    }

    #[test]
    fn reuse_tiers_partition_the_total_band() {
        let d = sample_deployment(20, 9);
        let plan = allocate_static_reuse(total(), &d).unwrap();
        for m in &d.macrocells {
            let macro_band = BandSet::from(plan.macro_bands[m.id]);
            let femto = plan.femto_total(m.id);
            assert!(macro_band.intersect(femto).is_empty());
            assert_eq!(macro_band.unite(femto), BandSet::from(total()));
        }
    }

    #[test]
    fn indicators_match_the_scheme_structure() {
        let d = sample_deployment(6, 10);
        let shared = allocate_shared(total(), &d).unwrap();
        let dedicated = allocate_dedicated(total(), 0.333, &d).unwrap();
        let static_reuse = allocate_static_reuse(total(), &d).unwrap();
        for m in 0..d.macrocells.len() {
            assert!(indicator_y(&shared, m, 0, false));
            assert!(!indicator_y(&dedicated, m, 0, false));
        }
        // No macrocell interferes with a femto user on its own host's band
        // under reuse: the host's third is never assigned to its femtocells.
        assert!(!indicator_y(&static_reuse, 0, 0, false));
        // Same-parity ids share a third, adjacent ids never do.
        assert!(indicator_x(&static_reuse, 2, 0, false));
        assert!(!indicator_x(&static_reuse, 1, 0, false));
        assert!(indicator_x(&shared, 1, 0, false));
    }

    #[test]
    fn single_band_assignments_serve_the_same_band_everywhere() {
        let a = FapAssignment::uniform(3, 0, Band::from_mhz(10.0, 20.0).unwrap());
        assert_eq!(a.active_band(true), a.active_band(false));
        assert_eq!(*a.active_band(true), a.full_band);
        assert!(a.edge_band.is_empty());
    }

    #[test]
    fn split_assignments_switch_bands_at_the_inner_boundary() {
        let center = Band::from_mhz(10.0, 20.0).unwrap();
        let edge = Band::from_mhz(20.0, 23.333).unwrap();
        let a = FapAssignment::split(0, 0, center, edge);
        assert_eq!(*a.active_band(true), BandSet::from(center));
        assert_eq!(*a.active_band(false), BandSet::from(edge));
        assert_eq!(*a.transmit_band(), BandSet::from(center).unite(&BandSet::from(edge)));
    }

    #[test]
    fn dump_lists_every_fap_with_its_bands() {
        let d = sample_deployment(1, 11);
        let plan = allocate_static_reuse(total(), &d).unwrap();
        let dump = plan.dump();
        let lines: Vec<&str> = dump.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "fap 0 host 0 center [20000,30000) edge (empty)");
        assert_eq!(lines[1], "fap 1 host 0 center [10000,20000) edge (empty)");
    }

    #[test]
    fn same_band_pair_counting_uses_outer_bands() {
        let d = sample_deployment(60, 12);
        let plan = allocate_static_reuse(total(), &d).unwrap();
        let (same, pairs) = plan.count_same_band_pairs(&d.neighbors);
        assert_eq!(pairs, d.neighbors.edge_count() as u64);
        let mut expected = 0;
        for i in 0..d.faps.len() {
            for &j in d.neighbors.neighbors(i) {
                if j > i && (i % 2) == (j % 2) {
                    expected += 1;
                }
            }
        }
        assert_eq!(same, expected);
    }
}
