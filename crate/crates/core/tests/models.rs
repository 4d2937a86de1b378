use std::collections::BTreeSet;

use bpnet::equiv::{bounded_compare, compare, default_shared, Verdict};
use bpnet::models::ModelRef;
use bpnet::statespace::{reduce_helper, Guards};
use bpnet::{Event, Lts};

fn pn_and_star(r: &str) -> (Lts, Lts, BTreeSet<Event>) {
    let m = r.parse::<ModelRef>().unwrap().build().unwrap();
    let lts = m.lts(Guards::default()).unwrap();
    let star = reduce_helper(&lts, &m.helpers()).unwrap();
    let shared = default_shared(&lts, &star, &m.helpers());
    (lts, star, shared)
}

#[test]
fn single_net_projection_matches_reduction() {
    let (lts, star, shared) = pn_and_star("lc:pn:single");
    assert_eq!(compare(&lts, &star, &shared).verdict, Verdict::Equal);
    assert!(star.labels().iter().all(|e| shared.contains(e)));
}

#[test]
fn multi_net_reduction_keeps_a_sublanguage() {
    for n in 1..=3 {
        let (lts, star, shared) = pn_and_star(&format!("lc:pn:multi:{n}"));
        let v = compare(&lts, &star, &shared).verdict;
        assert!(matches!(v, Verdict::Equal | Verdict::RightStrictSubset), "n={n}: {v}");
    }
}

#[test]
fn modified_bp_matches_single_net_up_to_sixteen() {
    let bp = "lc:bp:modified:1".parse::<ModelRef>().unwrap().build().unwrap().lts(Guards::default()).unwrap();
    let (_, star, shared) = pn_and_star("lc:pn:single");
    let c = bounded_compare(&bp, &star, &shared, 16, 1 << 20).unwrap();
    assert_eq!((c.only_a, c.only_b), (0, 0));
    assert!(c.both > 1);
}

#[test]
fn every_reference_builds() {
    for r in [
        "lc:bp", "lc:bp:modified:2", "lc:bp:original:2,faults", "lc:pn:multi:2,faults", "dining:bp:priority:3",
        "dining:pn:base:3", "ttt:pn:xwin", "ab:bp:interleave",
    ] {
        let m = r.parse::<ModelRef>().unwrap().build().unwrap_or_else(|e| panic!("{r}: {e}"));
        assert!(m.lts(Guards::default()).unwrap().num_states() > 1, "{r}");
    }
}
