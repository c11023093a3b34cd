//! Property tests for the allocation schemes.
//!
//! The randomized deployments here are small clusters under one host so
//! that shrunk counterexamples stay readable.

use proptest::prelude::*;

use femtosim::deployment::{build_cluster, Deployment, FapSite, Point};
use femtosim::schemes::{
    allocate_dedicated, allocate_static_reuse, allocate_subband, select_edge_band,
    DynamicEngine, EdgeBandKind, EdgeDecision, InstallOutcome, ResizePolicy, SchemeKind,
};
use femtosim::spectrum::{partition_equal, Band, BandSet};

fn total_band() -> impl Strategy<Value = Band> {
    (0i64..100_000, 60i64..150_000)
        .prop_map(|(lo, width)| Band::from_khz(lo, lo + width).unwrap())
}

fn fraction() -> impl Strategy<Value = f64> {
    0.05f64..0.95
}

fn positions() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-300.0f64..300.0, -300.0f64..300.0), 0..25)
}

fn edge_kind() -> impl Strategy<Value = EdgeBandKind> {
    prop::sample::select(vec![
        EdgeBandKind::FullThird,
        EdgeBandKind::HalfLow,
        EdgeBandKind::HalfHigh,
        EdgeBandKind::ThirdLow,
        EdgeBandKind::ThirdMid,
        EdgeBandKind::ThirdHigh,
    ])
}

fn make_deployment(positions: &[(f64, f64)], host: usize) -> Deployment {
    let faps = positions
        .iter()
        .enumerate()
        .map(|(id, &(x, y))| FapSite {
            id,
            position: Point::new(x, y),
            cell_radius_m: 10.0,
            inner_radius_m: 5.0,
            host_macrocell: host,
        })
        .collect();
    Deployment::assemble(
        build_cluster(1_000.0).unwrap(),
        faps,
        Point::new(205.0, 0.0),
        60.0,
        1,
    )
    .unwrap()
}

const TOTAL: (f64, f64) = (0.0, 30.0);

fn engine_for(deployment: &Deployment) -> DynamicEngine<'_> {
    let total = Band::from_mhz(TOTAL.0, TOTAL.1).unwrap();
    DynamicEngine::new(total, deployment, ResizePolicy::default()).unwrap()
}

fn edge_bands_disjoint(plan: &femtosim::schemes::AllocationPlan, a: usize, b: usize) -> bool {
    let ea = &plan.assignment_of(a).unwrap().edge_band;
    let eb = &plan.assignment_of(b).unwrap().edge_band;
    ea.intersect(eb).is_empty()
}

proptest! {
    #[test]
    fn selection_leaves_the_newcomer_without_overlap(
        interferers in prop::collection::vec(edge_kind(), 0..6),
    ) {
        let edge_third = Band::from_khz(0, 9_990).unwrap();
        let materialize = |kind: EdgeBandKind| kind.sub_band(edge_third).unwrap();
        match select_edge_band(&interferers) {
            EdgeDecision::Assign { chosen, demotions } => {
                // Demotions must point at distinct coarse holders.
                let mut seen = std::collections::HashSet::new();
                for &(k, _) in &demotions {
                    prop_assert!(k < interferers.len());
                    prop_assert!(seen.insert(k));
                    prop_assert!(interferers[k].third_slot().is_none());
                }
                let final_kinds: Vec<EdgeBandKind> = interferers
                    .iter()
                    .enumerate()
                    .map(|(k, &kind)| {
                        demotions
                            .iter()
                            .find(|&&(dk, _)| dk == k)
                            .map_or(kind, |&(_, demoted)| demoted)
                    })
                    .collect();
                let chosen_band = materialize(chosen);
                for (&kind, &original) in final_kinds.iter().zip(&interferers) {
                    prop_assert!(
                        !chosen_band.overlaps(&materialize(kind)),
                        "chosen {chosen:?} overlaps a final {kind:?} (was {original:?})"
                    );
                }
                // A demoted holder ends up clear of everyone else, not
                // just of the newcomer.
                for &(k, demoted) in &demotions {
                    let band = materialize(demoted);
                    for (j, &other) in final_kinds.iter().enumerate() {
                        if j != k {
                            prop_assert!(
                                !band.overlaps(&materialize(other)),
                                "demoted {demoted:?} overlaps {other:?}"
                            );
                        }
                    }
                }
            }
            EdgeDecision::ResizeRequired => {
                let distinct_slots = interferers
                    .iter()
                    .filter_map(|k| k.third_slot())
                    .collect::<std::collections::HashSet<_>>()
                    .len();
                let coarse = interferers.iter().filter(|k| k.third_slot().is_none()).count();
                prop_assert!(interferers.len() >= 2);
                prop_assert!(
                    distinct_slots + coarse >= 3,
                    "resize requested with spectrum to spare"
                );
            }
        }
    }

    #[test]
    fn each_install_event_ends_clear_of_its_interferers(
        positions in positions(),
        host in 0usize..3,
    ) {
        let deployment = make_deployment(&positions, host);
        let mut engine = engine_for(&deployment);
        for fap in 0..deployment.faps.len() {
            let outcome = engine.install(fap).unwrap();
            if outcome == InstallOutcome::Conflicted {
                continue;
            }
            let plan = engine.to_plan();
            for j in engine.assigned_interferers(fap) {
                if j != fap {
                    prop_assert!(
                        edge_bands_disjoint(&plan, fap, j),
                        "fap {fap} still overlaps interferer {j}"
                    );
                }
            }
        }
    }

    #[test]
    fn installs_are_deterministic(positions in positions(), host in 0usize..3) {
        let deployment = make_deployment(&positions, host);
        let mut first = engine_for(&deployment);
        first.install_all().unwrap();
        let mut second = engine_for(&deployment);
        second.install_all().unwrap();
        prop_assert_eq!(first.to_plan(), second.to_plan());
        prop_assert_eq!(first.to_plan().dump(), second.to_plan().dump());
        prop_assert_eq!(first.resize_steps(), second.resize_steps());
    }

    #[test]
    fn radii_stay_within_the_policy_bounds(positions in positions(), host in 0usize..3) {
        let deployment = make_deployment(&positions, host);
        let policy = ResizePolicy::default();
        let mut engine = engine_for(&deployment);
        engine.install_all().unwrap();
        for fap in 0..deployment.faps.len() {
            let r = engine.cell_radius_m(fap);
            prop_assert!(r >= policy.min_radius_m);
            prop_assert!(r <= deployment.faps[fap].cell_radius_m);
        }
    }

    // A pair is locally decidable when every install that can touch either
    // member sees both of them: that is the case when the assigned
    // two-hop neighborhood around the pair has no more than three members.
    // For such pairs the edge bands must come out disjoint.
    #[test]
    fn locally_decidable_pairs_end_up_disjoint(
        positions in positions(),
        host in 0usize..3,
    ) {
        let deployment = make_deployment(&positions, host);
        let mut engine = engine_for(&deployment);
        engine.install_all().unwrap();
        let plan = engine.to_plan();
        let conflicted = engine.conflicted_faps();
        let n = deployment.faps.len();
        for a in 0..n {
            for b in (a + 1)..n {
                if !engine.in_interference_reach(a, b)
                    || conflicted.contains(&a)
                    || conflicted.contains(&b)
                {
                    continue;
                }
                let mut closure: Vec<usize> = vec![a, b];
                for _ in 0..2 {
                    let frontier: Vec<usize> = closure.clone();
                    for f in frontier {
                        for j in engine.assigned_interferers(f) {
                            if !closure.contains(&j) {
                                closure.push(j);
                            }
                        }
                    }
                }
                if closure.len() <= 3 {
                    prop_assert!(
                        edge_bands_disjoint(&plan, a, b),
                        "locally decidable pair ({a}, {b}) overlaps"
                    );
                }
            }
        }
    }

    #[test]
    fn removal_releases_spectrum_and_reinstall_recovers(
        positions in positions(),
        host in 0usize..3,
        pick in any::<prop::sample::Index>(),
    ) {
        prop_assume!(!positions.is_empty());
        let deployment = make_deployment(&positions, host);
        let mut engine = engine_for(&deployment);
        engine.install_all().unwrap();
        let victim = pick.index(deployment.faps.len());
        engine.remove(victim).unwrap();
        prop_assert!(engine.edge_band_kind(victim).is_none());
        let plan = engine.to_plan();
        prop_assert!(plan.assignment_of(victim).is_none());
        prop_assert_eq!(plan.fap_assignments.len(), deployment.faps.len() - 1);
        for fap in 0..deployment.faps.len() {
            if fap != victim {
                prop_assert!(engine.edge_band_kind(fap).is_some());
            }
        }
        let outcome = engine.install(victim).unwrap();
        prop_assert!(engine.edge_band_kind(victim).is_some());
        if outcome == InstallOutcome::Installed {
            let plan = engine.to_plan();
            for j in engine.assigned_interferers(victim) {
                if j != victim {
                    prop_assert!(edge_bands_disjoint(&plan, victim, j));
                }
            }
        }
    }

    #[test]
    fn static_reuse_balances_the_two_foreign_thirds(
        positions in positions(),
        host in 0usize..3,
        total in total_band(),
    ) {
        prop_assume!(positions.len() >= 2);
        let deployment = make_deployment(&positions, host);
        let plan = allocate_static_reuse(total, &deployment).unwrap();
        let thirds = partition_equal(total, 3).unwrap();
        let host_third = BandSet::from(thirds[deployment.macrocells[host].band_index as usize - 1]);
        let mut counts = std::collections::HashMap::new();
        for a in &plan.fap_assignments {
            prop_assert!(a.full_band.intersect(&host_third).is_empty());
            *counts.entry(a.full_band.clone()).or_insert(0u64) += 1;
        }
        prop_assert_eq!(counts.len(), 2);
        let values: Vec<u64> = counts.values().copied().collect();
        prop_assert!(values[0].abs_diff(values[1]) <= 1);
    }

    #[test]
    fn dedicated_splits_and_subband_nests(
        total in total_band(),
        cut in fraction(),
        positions in positions(),
        host in 0usize..3,
    ) {
        prop_assume!(!positions.is_empty());
        let deployment = make_deployment(&positions, host);
        let total_set = BandSet::from(total);

        let plan = allocate_dedicated(total, cut, &deployment).unwrap();
        prop_assert_eq!(plan.scheme, SchemeKind::Dedicated);
        let femto = &plan.fap_assignments[0].full_band;
        let macro_set = BandSet::from(plan.macro_bands[0]);
        prop_assert!(femto.intersect(&macro_set).is_empty());
        prop_assert_eq!(femto.unite(&macro_set), total_set.clone());

        let plan = allocate_subband(total, cut, &deployment).unwrap();
        prop_assert_eq!(plan.scheme, SchemeKind::SubBand);
        let femto = &plan.fap_assignments[0].full_band;
        prop_assert!(femto.is_subset_of(&total_set));
        prop_assert!(!femto.is_empty());
        prop_assert_eq!(BandSet::from(plan.macro_bands[0]), total_set);
    }
}
