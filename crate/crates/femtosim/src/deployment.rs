//! Cluster geometry, random femtocell placement, and the neighbor graph.
//!
//! The modeled world is one reference macrocell at the origin surrounded by
//! the six first-tier macrocells of a hexagonal layout. Femtocells are
//! dropped uniformly over the reference macrocell disk, with one designated
//! reference femtocell at a fixed distance from the macrocell base station
//! so the analyzed victim link is identical across runs. Two femtocells are
//! neighbors when their access points are within a configurable threshold
//! of each other (inclusive).

use std::collections::HashMap;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use thiserror::Error;

/// Errors from geometry construction and lookups.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DeploymentError {
    /// A radius or threshold that must be positive was not.
    #[error("{what} must be positive and finite, got {value}")]
    NonPositive { what: &'static str, value: f64 },
    /// Poisson sampling with a negative or non-finite mean.
    #[error("poisson mean must be nonnegative and finite, got {mean}")]
    BadPoissonMean { mean: f64 },
    /// Wall count queried for a femtocell paired with itself.
    #[error("wall count is undefined for a femtocell paired with itself (id {id})")]
    SelfPair { id: usize },
    /// An id that does not exist in the deployment.
    #[error("unknown femtocell id {id}")]
    UnknownFap { id: usize },
    /// A femtocell referring to a macrocell that does not exist.
    #[error("femtocell {fap} names unknown host macrocell {macrocell}")]
    UnknownMacrocell { fap: usize, macrocell: usize },
}

/// A position in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Point {
        Point { x, y }
    }

    /// Euclidean distance to another point.
    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// One macrocell base station of the cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct MacrocellSite {
    pub id: usize,
    pub center: Point,
    pub radius_m: f64,
    /// Reuse-3 band index in `1..=3`, selecting which third of the spectrum
    /// the macrocell transmits on under the reuse schemes.
    pub band_index: u8,
}

/// One femto access point and the cell it creates.
#[derive(Debug, Clone, PartialEq)]
pub struct FapSite {
    pub id: usize,
    pub position: Point,
    pub cell_radius_m: f64,
    /// Radius of the inner region that uses the center band under the
    /// dynamic reuse scheme.
    pub inner_radius_m: f64,
    pub host_macrocell: usize,
}

/// Symmetric femtocell adjacency derived from the distance threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborGraph {
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl NeighborGraph {
    /// Neighbor ids of `fap`, in ascending order.
    pub fn neighbors(&self, fap: usize) -> &[usize] {
        &self.adjacency[fap]
    }

    pub fn are_neighbors(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }
}

/// A fully assembled random scenario: cluster, femtocells, reference user,
/// adjacency, and the wall convention.
#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    pub macrocells: Vec<MacrocellSite>,
    pub faps: Vec<FapSite>,
    /// The analyzed femto user, served by the reference femtocell (id 0).
    pub reference_ue: Point,
    pub neighbors: NeighborGraph,
    walls_between_femtocells: u32,
    neighbor_threshold_m: f64,
}

/// Geometry inputs for [`Deployment::generate`].
#[derive(Debug, Clone, PartialEq)]
pub struct DeploymentSpec {
    pub macro_radius_m: f64,
    /// Number of randomly placed femtocells; the reference femtocell is
    /// always added on top of these.
    pub femtocell_count: u64,
    pub reference_fap_distance_m: f64,
    pub ue_distance_m: f64,
    pub cell_radius_m: f64,
    pub inner_radius_fraction: f64,
    pub neighbor_threshold_m: f64,
    pub walls_between_femtocells: u32,
}

impl Deployment {
    /// Builds a complete random scenario from its parts.
    pub fn generate<R: Rng>(spec: &DeploymentSpec, rng: &mut R) -> Result<Deployment, DeploymentError> {
        let macrocells = build_cluster(spec.macro_radius_m)?;
        let faps = place_femtocells(
            spec.femtocell_count,
            spec.macro_radius_m,
            spec.reference_fap_distance_m,
            spec.cell_radius_m,
            spec.inner_radius_fraction,
            rng,
        )?;
        let neighbors = neighbor_graph(&faps, spec.neighbor_threshold_m)?;
        // The user sits on the +x axis beyond the reference femtocell, at a
        // fixed offset that the analytics treat as the victim link length.
        let reference_ue = Point::new(spec.reference_fap_distance_m + spec.ue_distance_m, 0.0);
        Ok(Deployment {
            macrocells,
            faps,
            reference_ue,
            neighbors,
            walls_between_femtocells: spec.walls_between_femtocells,
            neighbor_threshold_m: spec.neighbor_threshold_m,
        })
    }

    /// Assembles a deployment from explicit sites, deriving the adjacency
    /// from the threshold. Femtocell ids must match their positions in the
    /// list and each host macrocell must exist.
    pub fn assemble(
        macrocells: Vec<MacrocellSite>,
        faps: Vec<FapSite>,
        reference_ue: Point,
        neighbor_threshold_m: f64,
        walls_between_femtocells: u32,
    ) -> Result<Deployment, DeploymentError> {
        for fap in &faps {
            if fap.host_macrocell >= macrocells.len() {
                return Err(DeploymentError::UnknownMacrocell {
                    fap: fap.id,
                    macrocell: fap.host_macrocell,
                });
            }
        }
        let neighbors = neighbor_graph(&faps, neighbor_threshold_m)?;
        Ok(Deployment {
            macrocells,
            faps,
            reference_ue,
            neighbors,
            walls_between_femtocells,
            neighbor_threshold_m,
        })
    }

    /// The inclusive adjacency threshold the neighbor graph was built with.
    pub fn neighbor_threshold_m(&self) -> f64 {
        self.neighbor_threshold_m
    }

    /// Walls crossed by a signal between two distinct femtocells.
    pub fn wall_count(&self, a: usize, b: usize) -> Result<u32, DeploymentError> {
        if a >= self.faps.len() {
            return Err(DeploymentError::UnknownFap { id: a });
        }
        if b >= self.faps.len() {
            return Err(DeploymentError::UnknownFap { id: b });
        }
        if a == b {
            return Err(DeploymentError::SelfPair { id: a });
        }
        Ok(self.walls_between_femtocells)
    }

    /// Walls between a user and a femto transmitter: none for the user's
    /// own serving femtocell, the configured count otherwise.
    pub fn walls_to_ue(&self, serving_fap: usize, transmitter: usize) -> u32 {
        if serving_fap == transmitter {
            0
        } else {
            self.walls_between_femtocells
        }
    }
}

/// Lays out the reference macrocell and its six first-tier neighbors.
///
/// The reference site (id 0, band 1) sits at the origin; tier centers sit at
/// distance `√3 · macro_radius` every 60°, with band indices alternating
/// 2, 3 around the ring so adjacent macrocells never share a band.
pub fn build_cluster(macro_radius_m: f64) -> Result<Vec<MacrocellSite>, DeploymentError> {
    if !(macro_radius_m > 0.0) || !macro_radius_m.is_finite() {
        return Err(DeploymentError::NonPositive {
            what: "macro radius",
            value: macro_radius_m,
        });
    }
    let mut sites = vec![MacrocellSite {
        id: 0,
        center: Point::new(0.0, 0.0),
        radius_m: macro_radius_m,
        band_index: 1,
    }];
    let ring = 3f64.sqrt() * macro_radius_m;
    for k in 0..6u8 {
        let angle = f64::from(k) * std::f64::consts::FRAC_PI_3;
        sites.push(MacrocellSite {
            id: usize::from(k) + 1,
            center: Point::new(ring * angle.cos(), ring * angle.sin()),
            radius_m: macro_radius_m,
            band_index: if k % 2 == 0 { 2 } else { 3 },
        });
    }
    Ok(sites)
}

/// Places `n` femtocells uniformly over the reference macrocell disk, plus
/// the reference femtocell (id 0) at `reference_distance_m` along +x.
///
/// Each random femtocell consumes exactly two draws (radial, then angular),
/// so placements are reproducible from the generator seed alone.
pub fn place_femtocells<R: Rng>(
    n: u64,
    macro_radius_m: f64,
    reference_distance_m: f64,
    cell_radius_m: f64,
    inner_radius_fraction: f64,
    rng: &mut R,
) -> Result<Vec<FapSite>, DeploymentError> {
    if !(macro_radius_m > 0.0) || !macro_radius_m.is_finite() {
        return Err(DeploymentError::NonPositive {
            what: "macro radius",
            value: macro_radius_m,
        });
    }
    if !(cell_radius_m > 0.0) || !cell_radius_m.is_finite() {
        return Err(DeploymentError::NonPositive {
            what: "femtocell radius",
            value: cell_radius_m,
        });
    }
    let inner_radius_m = inner_radius_fraction * cell_radius_m;
    if !(inner_radius_m > 0.0) || inner_radius_m > cell_radius_m {
        return Err(DeploymentError::NonPositive {
            what: "inner radius fraction (relative to the cell radius)",
            value: inner_radius_fraction,
        });
    }
    let mut faps = Vec::with_capacity(n as usize + 1);
    faps.push(FapSite {
        id: 0,
        position: Point::new(reference_distance_m, 0.0),
        cell_radius_m,
        inner_radius_m,
        host_macrocell: 0,
    });
    for id in 1..=n as usize {
        // Uniform over the disk: radius grows as sqrt of a uniform draw.
        let radius = macro_radius_m * rng.random::<f64>().sqrt();
        let angle = std::f64::consts::TAU * rng.random::<f64>();
        faps.push(FapSite {
            id,
            position: Point::new(radius * angle.cos(), radius * angle.sin()),
            cell_radius_m,
            inner_radius_m,
            host_macrocell: 0,
        });
    }
    Ok(faps)
}

/// Samples how many femtocells fall in a neighborhood when the scenario
/// prescribes a Poisson density instead of a fixed count.
pub fn sample_neighbor_count<R: Rng>(mean: f64, rng: &mut R) -> Result<u64, DeploymentError> {
    if !mean.is_finite() || mean < 0.0 {
        return Err(DeploymentError::BadPoissonMean { mean });
    }
    if mean == 0.0 {
        return Ok(0);
    }
    let poisson = Poisson::new(mean).map_err(|_| DeploymentError::BadPoissonMean { mean })?;
    Ok(poisson.sample(rng) as u64)
}

/// Builds the symmetric neighbor graph: an edge joins two femtocells whose
/// access points are within `threshold_m` of each other, boundary included.
///
/// Candidate pairs come from a uniform grid with cells the size of the
/// threshold, so construction is near linear in the femtocell count.
pub fn neighbor_graph(faps: &[FapSite], threshold_m: f64) -> Result<NeighborGraph, DeploymentError> {
    if !(threshold_m > 0.0) || !threshold_m.is_finite() {
        return Err(DeploymentError::NonPositive {
            what: "neighbor threshold",
            value: threshold_m,
        });
    }
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); faps.len()];
    let mut edge_count = 0;
    let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let bucket_of = |p: &Point| {
        (
            (p.x / threshold_m).floor() as i64,
            (p.y / threshold_m).floor() as i64,
        )
    };
    let threshold_sq = threshold_m * threshold_m;
    for (i, fap) in faps.iter().enumerate() {
        let (bx, by) = bucket_of(&fap.position);
        for dx in -1..=1 {
            for dy in -1..=1 {
                let Some(candidates) = buckets.get(&(bx + dx, by + dy)) else {
                    continue;
                };
                for &j in candidates {
                    let d = &faps[j].position;
                    let ddx = fap.position.x - d.x;
                    let ddy = fap.position.y - d.y;
                    if ddx * ddx + ddy * ddy <= threshold_sq {
                        adjacency[i].push(j);
                        adjacency[j].push(i);
                        edge_count += 1;
                    }
                }
            }
        }
        buckets.entry((bx, by)).or_default().push(i);
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }
    Ok(NeighborGraph {
        adjacency,
        edge_count,
    })
}
