//! Self-organizing edge-band assignment for the dynamic reuse scheme.
//!
//! A dynamic-reuse femtocell serves its inner region on the fixed center
//! third and its outer ring on a sub-band of the edge third. The engine
//! picks that sub-band when the femtocell powers on: with no interferer in
//! reach it takes the whole edge third, and as interferers accumulate the
//! third is subdivided into two halves and then three equal sub-thirds,
//! with coarser holders re-banded to finer slices as needed. When all
//! three sub-thirds are taken around a newcomer, the involved cells shrink
//! their radii stepwise, which shortens their interference reach, until
//! some pair stops interfering; if shrinking bottoms out at the radius
//! floor the newcomer takes the least-loaded sub-third and the conflict is
//! recorded.
//!
//! Interference reach scales with cell size: a femtocell's reach is half
//! the neighbor threshold times the ratio of its current to its original
//! radius, and two femtocells interfere when their distance is at most the
//! sum of their reaches. At the original radii this is exactly the
//! neighbor-graph threshold rule, so engine interferers are always a
//! subset of graph neighbors.

use crate::deployment::Deployment;
use crate::spectrum::{partition_equal, Band};

use super::{
    center_third_slot, edge_third_slot, femto_reuse_totals, macro_reuse_bands, reuse_thirds,
    AllocationPlan, FapAssignment, SchemeError, SchemeKind,
};

/// Granularity and position of an edge-band assignment within the host's
/// edge third.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeBandKind {
    /// The whole edge third.
    FullThird,
    /// Lower half of the edge third.
    HalfLow,
    /// Upper half of the edge third.
    HalfHigh,
    /// First of the three equal sub-thirds.
    ThirdLow,
    /// Second sub-third.
    ThirdMid,
    /// Third sub-third.
    ThirdHigh,
}

impl EdgeBandKind {
    /// Position among the three sub-thirds, if this is sub-third
    /// granularity.
    pub fn third_slot(self) -> Option<usize> {
        match self {
            EdgeBandKind::ThirdLow => Some(0),
            EdgeBandKind::ThirdMid => Some(1),
            EdgeBandKind::ThirdHigh => Some(2),
            _ => None,
        }
    }

    fn is_half(self) -> bool {
        matches!(self, EdgeBandKind::HalfLow | EdgeBandKind::HalfHigh)
    }

    /// The concrete frequencies this kind selects within an edge third.
    pub fn sub_band(self, edge_third: Band) -> Result<Band, SchemeError> {
        Ok(match self {
            EdgeBandKind::FullThird => edge_third,
            EdgeBandKind::HalfLow => partition_equal(edge_third, 2)?[0],
            EdgeBandKind::HalfHigh => partition_equal(edge_third, 2)?[1],
            EdgeBandKind::ThirdLow => partition_equal(edge_third, 3)?[0],
            EdgeBandKind::ThirdMid => partition_equal(edge_third, 3)?[1],
            EdgeBandKind::ThirdHigh => partition_equal(edge_third, 3)?[2],
        })
    }

    fn band_in(self, layout: &HostLayout) -> Band {
        match self {
            EdgeBandKind::FullThird => layout.edge,
            EdgeBandKind::HalfLow => layout.halves[0],
            EdgeBandKind::HalfHigh => layout.halves[1],
            EdgeBandKind::ThirdLow => layout.thirds[0],
            EdgeBandKind::ThirdMid => layout.thirds[1],
            EdgeBandKind::ThirdHigh => layout.thirds[2],
        }
    }
}

fn third_of_slot(slot: usize) -> EdgeBandKind {
    match slot {
        0 => EdgeBandKind::ThirdLow,
        1 => EdgeBandKind::ThirdMid,
        _ => EdgeBandKind::ThirdHigh,
    }
}

/// Decision for a newly installing femtocell, given the edge bands its
/// assigned interferers currently hold (listed in ascending femtocell id).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EdgeDecision {
    /// The newcomer takes `chosen`; each entry of `demotions` re-bands the
    /// interferer at that list position.
    Assign {
        chosen: EdgeBandKind,
        demotions: Vec<(usize, EdgeBandKind)>,
    },
    /// Every sub-third is taken; cells must shrink before a retry.
    ResizeRequired,
}

fn assign(chosen: EdgeBandKind, demotions: Vec<(usize, EdgeBandKind)>) -> EdgeDecision {
    EdgeDecision::Assign { chosen, demotions }
}

/// The edge-band selection rule.
///
/// Zero interferers yield the full edge third. One interferer splits the
/// third into halves (a full-third holder is demoted to the lower half) or
/// hands over the cyclic successor among equal granularities. Two
/// interferers resolve toward the three sub-thirds, demoting coarser
/// holders. With three or more, coarse holders are demoted onto free
/// sub-thirds in list order and the newcomer takes a remaining free
/// sub-third; if none remains the decision is [`EdgeDecision::ResizeRequired`]
/// and no demotion is applied.
pub fn select_edge_band(interferers: &[EdgeBandKind]) -> EdgeDecision {
    use EdgeBandKind::*;
    match interferers {
        [] => assign(FullThird, Vec::new()),
        [one] => match one {
            FullThird => assign(HalfHigh, vec![(0, HalfLow)]),
            HalfLow => assign(HalfHigh, Vec::new()),
            HalfHigh => assign(HalfLow, Vec::new()),
            ThirdLow => assign(ThirdMid, Vec::new()),
            ThirdMid => assign(ThirdHigh, Vec::new()),
            ThirdHigh => assign(ThirdLow, Vec::new()),
        },
        [a, b] => match (a.third_slot(), b.third_slot()) {
            (Some(sa), Some(sb)) if sa != sb => assign(third_of_slot(3 - sa - sb), Vec::new()),
            (Some(sa), Some(_)) => assign(third_of_slot((sa + 1) % 3), Vec::new()),
            _ if a.is_half() && b.is_half() => {
                if a == b {
                    let other = if *a == HalfLow { HalfHigh } else { HalfLow };
                    assign(other, Vec::new())
                } else {
                    assign(ThirdHigh, vec![(0, ThirdLow), (1, ThirdMid)])
                }
            }
            _ => demote_to_thirds(interferers),
        },
        many => demote_to_thirds(many),
    }
}

/// Moves coarse holders onto free sub-thirds in list order and hands the
/// newcomer a remaining free sub-third, or reports that none is left.
fn demote_to_thirds(interferers: &[EdgeBandKind]) -> EdgeDecision {
    let mut used = [false; 3];
    for kind in interferers {
        if let Some(slot) = kind.third_slot() {
            used[slot] = true;
        }
    }
    let mut demotions = Vec::new();
    for (k, kind) in interferers.iter().enumerate() {
        if kind.third_slot().is_none() {
            if let Some(free) = used.iter().position(|taken| !taken) {
                used[free] = true;
                demotions.push((k, third_of_slot(free)));
            }
        }
    }
    match used.iter().position(|taken| !taken) {
        Some(free) => assign(third_of_slot(free), demotions),
        None => EdgeDecision::ResizeRequired,
    }
}

/// Sub-third held by the fewest of the given interferers, ties toward the
/// lowest slot. Used when resizing cannot clear a conflict.
fn fallback_third(interferers: &[EdgeBandKind]) -> EdgeBandKind {
    let mut counts = [0u32; 3];
    for kind in interferers {
        if let Some(slot) = kind.third_slot() {
            counts[slot] += 1;
        }
    }
    let slot = (0..3).min_by_key(|&s| (counts[s], s)).expect("three slots");
    third_of_slot(slot)
}

/// Radius-shrink policy applied when every sub-third is taken.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResizePolicy {
    /// Multiplier applied to a conflicted cell's radius per shrink step.
    pub shrink_factor: f64,
    /// Radii never shrink below this floor.
    pub min_radius_m: f64,
}

impl Default for ResizePolicy {
    fn default() -> ResizePolicy {
        ResizePolicy {
            shrink_factor: 0.8,
            min_radius_m: 4.0,
        }
    }
}

/// How one installation ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstallOutcome {
    /// A conflict-free edge band was found, possibly after shrinking.
    Installed,
    /// The radius floor was reached with every sub-third taken; the
    /// least-loaded sub-third was assigned and the conflict recorded.
    Conflicted,
}

struct HostLayout {
    center: Band,
    edge: Band,
    halves: [Band; 2],
    thirds: [Band; 3],
}

/// The mutable allocation state of the dynamic scheme for one deployment.
///
/// Install and removal events are serialized on the engine; a finished
/// state is exported as an immutable [`AllocationPlan`].
pub struct DynamicEngine<'d> {
    deployment: &'d Deployment,
    layouts: [HostLayout; 3],
    macro_bands: Vec<Band>,
    femto_totals: Vec<crate::spectrum::BandSet>,
    policy: ResizePolicy,
    default_radius: Vec<f64>,
    radius: Vec<f64>,
    assignments: Vec<Option<EdgeBandKind>>,
    conflicted: Vec<bool>,
    resize_steps: u64,
}

impl<'d> DynamicEngine<'d> {
    pub fn new(
        total: Band,
        deployment: &'d Deployment,
        policy: ResizePolicy,
    ) -> Result<DynamicEngine<'d>, SchemeError> {
        if !(policy.shrink_factor.is_finite() && policy.shrink_factor > 0.0 && policy.shrink_factor < 1.0)
        {
            return Err(SchemeError::BadResizePolicy {
                detail: format!(
                    "shrink factor must lie strictly inside (0, 1), got {}",
                    policy.shrink_factor
                ),
            });
        }
        if !(policy.min_radius_m.is_finite() && policy.min_radius_m > 0.0) {
            return Err(SchemeError::BadResizePolicy {
                detail: format!(
                    "minimum radius must be positive and finite, got {}",
                    policy.min_radius_m
                ),
            });
        }
        let thirds = reuse_thirds(total)?;
        let macro_bands = macro_reuse_bands(&thirds, deployment)?;
        let femto_totals = femto_reuse_totals(&thirds, deployment);
        let layout_for = |band_index: u8| -> Result<HostLayout, SchemeError> {
            let edge = thirds[edge_third_slot(band_index)];
            let halves = partition_equal(edge, 2)?;
            let sub = partition_equal(edge, 3)?;
            Ok(HostLayout {
                center: thirds[center_third_slot(band_index)],
                edge,
                halves: [halves[0], halves[1]],
                thirds: [sub[0], sub[1], sub[2]],
            })
        };
        let layouts = [layout_for(1)?, layout_for(2)?, layout_for(3)?];
        let mut default_radius = Vec::with_capacity(deployment.faps.len());
        for fap in &deployment.faps {
            if !(fap.cell_radius_m.is_finite() && fap.cell_radius_m > 0.0) {
                return Err(SchemeError::BadCellRadius {
                    fap: fap.id,
                    radius_m: fap.cell_radius_m,
                });
            }
            default_radius.push(fap.cell_radius_m);
        }
        let n = deployment.faps.len();
        Ok(DynamicEngine {
            deployment,
            layouts,
            macro_bands,
            femto_totals,
            policy,
            radius: default_radius.clone(),
            default_radius,
            assignments: vec![None; n],
            conflicted: vec![false; n],
            resize_steps: 0,
        })
    }

    /// Current interference reach: half the neighbor threshold, scaled by
    /// how far the cell has shrunk from its original radius.
    fn interference_reach(&self, fap: usize) -> f64 {
        self.deployment.neighbor_threshold_m() / 2.0 * self.radius[fap] / self.default_radius[fap]
    }

    /// Whether two femtocells currently interfere under the scaled-reach
    /// rule.
    pub fn in_interference_reach(&self, a: usize, b: usize) -> bool {
        let d = self.deployment.faps[a]
            .position
            .distance(&self.deployment.faps[b].position);
        d <= self.interference_reach(a) + self.interference_reach(b)
    }

    /// Assigned femtocells currently interfering with `fap`, ascending.
    pub fn assigned_interferers(&self, fap: usize) -> Vec<usize> {
        self.deployment
            .neighbors
            .neighbors(fap)
            .iter()
            .copied()
            .filter(|&j| self.assignments[j].is_some() && self.in_interference_reach(fap, j))
            .collect()
    }

    /// Installs one femtocell, resolving its edge band against the current
    /// assignments and shrinking cells if every sub-third is taken.
    pub fn install(&mut self, fap: usize) -> Result<InstallOutcome, SchemeError> {
        if fap >= self.assignments.len() {
            return Err(SchemeError::UnknownFap { id: fap });
        }
        loop {
            let interferers = self.assigned_interferers(fap);
            let kinds: Vec<EdgeBandKind> = interferers
                .iter()
                .map(|&j| self.assignments[j].expect("interferers are assigned"))
                .collect();
            match select_edge_band(&kinds) {
                EdgeDecision::Assign { chosen, demotions } => {
                    for (k, kind) in demotions {
                        self.assignments[interferers[k]] = Some(kind);
                    }
                    self.assignments[fap] = Some(chosen);
                    self.conflicted[fap] = false;
                    return Ok(InstallOutcome::Installed);
                }
                EdgeDecision::ResizeRequired => {
                    let mut members = vec![fap];
                    members.extend_from_slice(&interferers);
                    if !self.shrink_step(&members) {
                        // Radius floor everywhere: take the least-loaded
                        // sub-third and record the unresolvable conflict.
                        self.assignments[fap] = Some(fallback_third(&kinds));
                        self.conflicted[fap] = true;
                        return Ok(InstallOutcome::Conflicted);
                    }
                }
            }
        }
    }

    /// Installs every femtocell of the deployment in ascending id order.
    pub fn install_all(&mut self) -> Result<(), SchemeError> {
        for fap in 0..self.assignments.len() {
            self.install(fap)?;
        }
        Ok(())
    }

    /// Powers a femtocell off. Its former interferers give up their bands
    /// and re-install in ascending id order, which lets survivors upgrade
    /// to coarser bands.
    pub fn remove(&mut self, fap: usize) -> Result<(), SchemeError> {
        if fap >= self.assignments.len() || self.assignments[fap].is_none() {
            return Err(SchemeError::UnknownFap { id: fap });
        }
        let former = self.assigned_interferers(fap);
        self.assignments[fap] = None;
        self.conflicted[fap] = false;
        for &j in &former {
            self.assignments[j] = None;
            self.conflicted[j] = false;
        }
        for &j in &former {
            self.install(j)?;
        }
        Ok(())
    }

    /// One shrink pass over the given cells. Returns whether any radius
    /// actually changed.
    pub fn resize_cells(&mut self, faps: &[usize]) -> Result<bool, SchemeError> {
        for &fap in faps {
            if fap >= self.radius.len() {
                return Err(SchemeError::UnknownFap { id: fap });
            }
        }
        Ok(self.shrink_step(faps))
    }

    fn shrink_step(&mut self, members: &[usize]) -> bool {
        let mut any = false;
        for &fap in members {
            let next = (self.radius[fap] * self.policy.shrink_factor).max(self.policy.min_radius_m);
            if next < self.radius[fap] {
                self.radius[fap] = next;
                any = true;
            }
        }
        if any {
            self.resize_steps += 1;
        }
        any
    }

    /// The edge band currently held by a femtocell, if installed.
    pub fn edge_band_kind(&self, fap: usize) -> Option<EdgeBandKind> {
        self.assignments[fap]
    }

    /// Femtocells whose conflicts could not be resolved, ascending.
    pub fn conflicted_faps(&self) -> Vec<usize> {
        self.conflicted
            .iter()
            .enumerate()
            .filter_map(|(i, &c)| if c { Some(i) } else { None })
            .collect()
    }

    /// Current cell radius, after any shrinking.
    pub fn cell_radius_m(&self, fap: usize) -> f64 {
        self.radius[fap]
    }

    /// Number of shrink passes applied so far.
    pub fn resize_steps(&self) -> u64 {
        self.resize_steps
    }

    /// Exports the current assignments as an immutable plan. Femtocells
    /// that are not installed are omitted.
    pub fn to_plan(&self) -> AllocationPlan {
        let mut fap_assignments = Vec::with_capacity(self.assignments.len());
        for (fap, kind) in self.deployment.faps.iter().zip(&self.assignments) {
            if let Some(kind) = kind {
                let band_index = self.deployment.macrocells[fap.host_macrocell].band_index;
                let layout = &self.layouts[band_index as usize - 1];
                fap_assignments.push(FapAssignment::split(
                    fap.id,
                    fap.host_macrocell,
                    layout.center,
                    kind.band_in(layout),
                ));
            }
        }
        AllocationPlan {
            scheme: SchemeKind::DynamicReuse,
            macro_bands: self.macro_bands.clone(),
            fap_assignments,
            femto_totals: self.femto_totals.clone(),
        }
    }
}

/// Builds a dynamic plan by installing every femtocell in id order.
///
/// Returns the plan together with the engine that produced it, so callers
/// can inspect conflicts and shrunk radii or continue the event sequence.
pub fn allocate_dynamic(
    total: Band,
    deployment: &Deployment,
    policy: ResizePolicy,
) -> Result<(AllocationPlan, DynamicEngine<'_>), SchemeError> {
    let mut engine = DynamicEngine::new(total, deployment, policy)?;
    engine.install_all()?;
    let plan = engine.to_plan();
    Ok((plan, engine))
}
