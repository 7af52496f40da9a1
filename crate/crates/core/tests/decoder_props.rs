use ifp_core::algebra::{AllenRelation, EndpointPairKey};
use ifp_core::decoder::{
    classify_pair, decode, score_intervals, PointDistribution, QuadDistribution, RelationSet,
};
use ifp_core::synth::{generate_documents, SynthConfig};
use ifp_core::testing::{brute_force_scores, SymmetricRandom};
use proptest::prelude::*;

fn dist() -> impl Strategy<Value = PointDistribution> {
    (0.01..1.0f64, 0.01..1.0f64, 0.01..1.0f64).prop_map(|(a, b, c)| {
        let s = a + b + c;
        PointDistribution::new(a / s, b / s, c / s)
    })
}

fn quad() -> impl Strategy<Value = QuadDistribution> {
    [dist(), dist(), dist(), dist()].prop_map(ifp_core::algebra::Quad)
}

fn worked_quad() -> QuadDistribution {
    ifp_core::algebra::Quad([
        PointDistribution::new(0.6, 0.3, 0.1),
        PointDistribution::new(0.8, 0.1, 0.1),
        PointDistribution::new(0.1, 0.1, 0.8),
        PointDistribution::new(0.5, 0.4, 0.1),
    ])
}

#[test]
fn worked_score_table_matches_brute_force() {
    let q = worked_quad();
    let scores = score_intervals(&q, RelationSet::Full);
    let oracle = brute_force_scores(&q);
    assert_eq!(scores.len(), 13);
    for (r, s) in &scores {
        assert!((s - oracle[r]).abs() <= 1e-12, "{r}: {s} vs {}", oracle[r]);
    }
    assert!((scores[&AllenRelation::Before] - 0.6 * 0.8 * 0.1 * 0.5).abs() <= 1e-12);
    let best = oracle
        .iter()
        .fold(None::<(AllenRelation, f64)>, |b, (&r, &s)| match b {
            Some((_, bs)) if bs >= s => b,
            _ => Some((r, s)),
        })
        .unwrap()
        .0;
    assert_eq!(decode(&q, RelationSet::Full).unwrap().relation, best);
}

proptest! {
    #[test]
    fn scores_match_brute_force(q in quad()) {
        let scores = score_intervals(&q, RelationSet::Full);
        let oracle = brute_force_scores(&q);
        for r in AllenRelation::ALL {
            prop_assert!((scores[&r] - oracle[&r]).abs() <= 1e-12);
        }
    }

    #[test]
    fn argmax_is_scale_invariant(q in quad(), k in 1e-3..1e3f64, key in 0..4usize) {
        let mut scaled = q;
        scaled[EndpointPairKey::ALL[key]] = q[EndpointPairKey::ALL[key]].scaled(k);
        prop_assert_eq!(
            decode(&q, RelationSet::Full).unwrap().relation,
            decode(&scaled, RelationSet::Full).unwrap().relation
        );
    }

    #[test]
    fn observed_set_never_overlaps(q in quad()) {
        let r = decode(&q, RelationSet::Observed).unwrap().relation;
        prop_assert!(r != AllenRelation::Overlaps && r != AllenRelation::OverlappedBy);
    }
}

#[test]
fn one_hot_quads_decode_to_their_relation() {
    for r in AllenRelation::ALL {
        let q = r.to_points().map(|&p| PointDistribution::one_hot(p));
        assert_eq!(decode(&q, RelationSet::Full).unwrap().relation, r);
    }
}

#[test]
fn symmetric_predictor_gives_inverse_relations() {
    let docs = generate_documents(&SynthConfig { documents: 4, seed: 9, ..Default::default() });
    for seed in 0..5 {
        let p = SymmetricRandom { seed };
        for doc in &docs {
            for l in &doc.tlinks {
                let fwd = classify_pair(doc, &l.source, &l.target, &p, RelationSet::Full).unwrap();
                let bwd = classify_pair(doc, &l.target, &l.source, &p, RelationSet::Full).unwrap();
                assert_eq!(fwd.relation.invert(), bwd.relation);
            }
        }
    }
}
