use std::collections::BTreeSet;

use logdp::canon::canonical_form;
use logdp::classifier::{
    classify, compare_reference, enumerate_placements, family_instances, reaches_fiber, verify_fiber_impossibility,
    RankOneOracle, TargetKind,
};
use logdp::contraction::{replay, MarkedConfiguration};
use logdp::discrepancy::{solve_discrepancies, zero_propagates};
use logdp::enumerator::{
    classify_family, enumerate_index3, enumerate_index3_exhaustive, enumerate_index3_with, has_dynkin_shape,
    FamilyLabel,
};
use logdp::refdata::load_reference;
use logdp::{Rational, WeightedDualGraph};
use num_traits::{One, Zero};

fn keys(gs: &[WeightedDualGraph]) -> BTreeSet<logdp::CanonicalKey> {
    gs.iter().map(canonical_form).collect()
}

#[test]
fn guided_enumeration_matches_brute_force_up_to_four() {
    let brute = enumerate_index3_exhaustive(4, -12, true);
    assert_eq!(keys(&enumerate_index3(4, -12)), keys(&brute));
    assert_eq!(keys(&enumerate_index3_with(4, -12, true)), keys(&brute));
}

#[test]
fn permissive_shapes_add_nothing() {
    let strict = enumerate_index3_with(8, -8, false);
    let loose = enumerate_index3_with(8, -8, true);
    assert_eq!(keys(&strict), keys(&loose));
    assert!(loose.iter().all(has_dynkin_shape));
}

#[test]
fn weight_range_saturates_at_minus_six() {
    let a = enumerate_index3(10, -8);
    let b = enumerate_index3(10, -12);
    assert_eq!(keys(&a), keys(&b));
    assert!(b.iter().flat_map(|g| g.weights()).all(|w| w >= -6));
}

#[test]
fn every_positive_survivor_belongs_to_one_family() {
    for g in enumerate_index3(10, -12) {
        let d = solve_discrepancies(&g).unwrap();
        assert_eq!(d.cartier_index, 3);
        assert!(d.log_terminal);
        assert!(zero_propagates(&g, &d));
        if d.k_bar_squared > Rational::zero() {
            assert!(classify_family(&g).is_some(), "{:?}", g.weights());
        }
    }
}

#[test]
fn family_members_are_index_three() {
    for f in &load_reference().families {
        for n in f.size_range.min..=f.size_range.max {
            let d = solve_discrepancies(&f.instance(n).unwrap()).unwrap();
            assert_eq!(d.cartier_index, 3, "{} n={n}", f.label);
            assert!(d.log_terminal);
        }
    }
}

#[test]
fn classify_family_examples() {
    assert_eq!(
        classify_family(&WeightedDualGraph::chain(&[-4, -2, -2, -4])),
        Some((FamilyLabel::V, 4))
    );
    let viii4 = WeightedDualGraph::from_index_edges(&[-4, -2, -2, -2], &[(0, 1), (1, 2), (1, 3)]);
    assert_eq!(classify_family(&viii4), Some((FamilyLabel::VIII, 4)));
    assert_eq!(classify_family(&WeightedDualGraph::chain(&[-2, -2])), None);
}

#[test]
fn reference_output_is_inside_permissive_output() {
    let r = classify(10, &RankOneOracle::reference());
    let p = classify(10, &RankOneOracle::permissive());
    let pk: BTreeSet<_> = p.all().map(|e| e.key()).collect();
    assert!(r.all().all(|e| pk.contains(&e.key())));
    let diff = compare_reference(&p.all().cloned().collect::<Vec<_>>());
    assert!(diff.missing.is_empty());
    assert!(diff.label_mismatches.is_empty());
    assert_eq!(diff.extra.len(), p.extras.len());
}

#[test]
fn classification_is_deterministic() {
    let a = classify(10, &RankOneOracle::reference());
    let b = classify(10, &RankOneOracle::reference());
    assert_eq!(a.entries, b.entries);
}

#[test]
fn entries_satisfy_structural_invariants() {
    let c = classify(10, &RankOneOracle::reference());
    for e in c.all() {
        let d = solve_discrepancies(&e.configuration.d_part()).unwrap();
        assert!(e.k_bar_squared > Rational::zero());
        assert_eq!(d.cartier_index, 3);
        let (_, end) = replay(&e.configuration, &e.trace).unwrap();
        match e.target_kind {
            TargetKind::SmoothPoint => {
                assert!(end.is_empty());
                assert_eq!(e.trace.len(), e.n + 1);
            }
            TargetKind::SingularRankOne => {
                let r = e.residual_e.as_ref().unwrap();
                assert_eq!(canonical_form(&end), canonical_form(r));
            }
        }
        if let Some(j) = e.configuration.attachment_in_d() {
            let gap = Rational::one() - d.coeffs[j];
            assert!(
                gap == Rational::new(1, 3) || gap == Rational::new(2, 3),
                "{}",
                e.display_label()
            );
        }
    }
}

#[test]
fn fiber_sweep_and_detector() {
    let report = verify_fiber_impossibility(10);
    assert!(report.violations.is_empty());
    let expected: usize = family_instances(&load_reference().families, 10)
        .iter()
        .map(|(_, _, d)| enumerate_placements(d).len())
        .sum();
    assert_eq!(report.configurations_checked, expected);
    let live = MarkedConfiguration::with_curve(&WeightedDualGraph::chain(&[-2, -2, -2]), Some(1)).unwrap();
    assert!(reaches_fiber(&live));
    let i_attached = MarkedConfiguration::with_curve(&WeightedDualGraph::chain(&[-3]), Some(0)).unwrap();
    assert!(!reaches_fiber(&i_attached));
}
