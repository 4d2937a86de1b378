mod common;

use bpnet::models::dining::{dining_bp, DiningVariant};
use bpnet::models::lc::{lc_bp, lc_pn, LcBpVariant, LcPnVariant};
use bpnet::models::ttt::ttt_bp;
use bpnet::statespace::{reduce_helper, Stepper};
use bpnet::{Event, Value};
use common::*;
use proptest::prelude::*;

/// Follows `choices` through the successor lists; stops at a dead end.
fn walk<T: Stepper>(m: &T, choices: &[usize]) -> Vec<Event> {
    let mut s = m.initial();
    let mut out = Vec::new();
    for c in choices {
        let succ = m.successors(&s);
        if succ.is_empty() {
            break;
        }
        let k = c % succ.len();
        let (e, next) = succ.into_iter().nth(k).unwrap();
        out.push(e);
        s = next;
    }
    out
}

fn track(e: &Event) -> Option<usize> {
    match e.params().first() {
        Some(Value::Int(i)) => Some(*i as usize),
        _ => None,
    }
}

fn is_fault(e: &Event) -> bool {
    e.params().last() == Some(&Value::Bool(true))
}

/// Drops the trailing `false` flag so a fault-aware event matches its plain form.
fn unflag(e: &Event) -> Event {
    match e.params().split_last() {
        Some((Value::Bool(false), rest)) => Event::with(e.label(), rest.to_vec()),
        _ => e.clone(),
    }
}

/// Per-track Approaching/Entering/Leaving cycles; without faults also the
/// barrier discipline (Lower/Raise alternate, no Entering while up).
fn check_crossing(trace: &[Event], n: usize, faults: bool) -> Result<(), String> {
    let mut phase = vec![0usize; n + 1];
    let mut down = false;
    for e in trace {
        match e.label() {
            "Approaching" | "Entering" | "Leaving" => {
                let i = track(e).ok_or("untracked railway event")?;
                let want = ["Approaching", "Entering", "Leaving"][phase[i]];
                if e.label() != want {
                    return Err(format!("track {i}: {e} out of order in {trace:?}"));
                }
                if !faults && e.label() == "Entering" && !down {
                    return Err(format!("{e} while the barriers are up in {trace:?}"));
                }
                phase[i] = (phase[i] + 1) % 3;
            }
            "Lower" if !faults => {
                if down {
                    return Err("Lower twice".into());
                }
                down = true;
            }
            "Raise" if !faults => {
                if !down {
                    return Err("Raise while up".into());
                }
                down = false;
            }
            _ => {}
        }
    }
    Ok(())
}

fn choices() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(any::<usize>(), 0..40)
}

proptest! {
    #[test]
    fn bp_selection_safety(p in arb_program(), w in prop::collection::vec(any::<usize>(), 0..20)) {
        selection_safety(&p, &w).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn bp_frame_property(p in arb_program(), w in prop::collection::vec(any::<usize>(), 0..20)) {
        frame_property(&p, &w).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn bp_simulate_deterministic(p in arb_program(), seed in any::<u64>()) {
        simulate_determinism(&p, seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn projection_is_idempotent((t, m) in arb_trace()) {
        projection_idempotent(&t, m).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn compare_is_reflexive(a in arb_lts()) {
        compare_reflexive(&a).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn compare_is_antisymmetric(a in arb_lts(), b in arb_lts()) {
        compare_antisymmetric(&a, &b).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn witnesses_replay(a in arb_lts(), b in arb_lts()) {
        witness_replay(&a, &b).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn equal_verdict_agrees_with_bounded_counts(a in arb_lts(), b in arb_lts(), l in 0usize..7) {
        equal_implies_bounded_agreement(&a, &b, l).map_err(TestCaseError::fail)?;
        equal_implies_bounded_agreement(&a, &a, l).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn reduction_removes_helpers(a in arb_lts()) {
        let h = [Event::new("h")].into_iter().collect();
        if let Ok(r) = reduce_helper(&a, &h) {
            prop_assert!(r.labels().iter().all(|e| e.label() != "h"));
            prop_assert!(r.num_states() <= a.num_states());
            prop_assert!(r.check().is_ok());
        }
    }

    #[test]
    fn lc_bp_crossing_order(n in 1usize..4, faults in any::<bool>(), c in choices()) {
        let t = walk(&lc_bp(n, faults, LcBpVariant::Original), &c);
        check_crossing(&t, n, faults).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn lc_modified_crossing_order(n in 1usize..3, c in choices()) {
        let t = walk(&lc_bp(n, false, LcBpVariant::ModifiedR2), &c);
        check_crossing(&t, n, false).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn lc_net_crossing_order(n in 1usize..4, faults in any::<bool>(), c in choices()) {
        let net = lc_pn(n, faults, LcPnVariant::Multi2016);
        let helpers: Vec<Event> = net.transitions().iter().filter(|t| t.helper).map(|t| t.label.clone()).collect();
        let t: Vec<Event> = walk(&net, &c).into_iter().filter(|e| !helpers.contains(e)).collect();
        check_crossing(&t, n, faults).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn lc_fault_free_runs_match_plain_model(n in 1usize..3, c in choices()) {
        let faulty = lc_bp(n, true, LcBpVariant::Original);
        let plain = lc_bp(n, false, LcBpVariant::Original);
        let (mut s, mut p) = (faulty.initial(), plain.initial());
        for k in c {
            let ok: Vec<_> = faulty.successors(&s).into_iter().filter(|(e, _)| !is_fault(e)).collect();
            let plain_next: Vec<Event> = plain.successors(&p).into_iter().map(|(e, _)| e).collect();
            let mut mapped: Vec<Event> = ok.iter().map(|(e, _)| unflag(e)).collect();
            mapped.sort();
            let mut expect = plain_next.clone();
            expect.sort();
            prop_assert_eq!(&mapped, &expect);
            if ok.is_empty() {
                break;
            }
            let (e, next) = ok[k % ok.len()].clone();
            p = plain.advance(&p, &unflag(&e)).unwrap();
            s = next;
        }
    }

    #[test]
    fn ttt_turns_alternate(c in choices()) {
        let t = walk(&ttt_bp(), &c);
        let moves: Vec<&Event> = t.iter().filter(|e| matches!(e.label(), "X" | "O")).collect();
        for (k, e) in moves.iter().enumerate() {
            prop_assert_eq!(e.label(), if k % 2 == 0 { "X" } else { "O" });
        }
        let mut cells: Vec<_> = moves.iter().map(|e| e.params().to_vec()).collect();
        cells.sort();
        cells.dedup();
        prop_assert_eq!(cells.len(), moves.len());
        if let Some(k) = t.iter().position(|e| matches!(e.label(), "XWin" | "OWin" | "Tie")) {
            prop_assert_eq!(k + 1, t.len());
        }
    }

    #[test]
    fn dining_forks_exclusive(n in 2usize..5, c in choices()) {
        let t = walk(&dining_bp(n, DiningVariant::Base), &c);
        let mut held = vec![false; n + 1];
        for e in &t {
            let i = track(e).unwrap();
            let side = e.params()[1].to_string();
            let fork = if side.contains('R') { i } else if i == 1 { n } else { i - 1 };
            let take = e.label() == "Take";
            prop_assert_ne!(held[fork], take, "{} in {:?}", e, t);
            held[fork] = take;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn translation_is_bisimilar(spec in arb_net()) {
        translation_bisimilar(&spec).map_err(TestCaseError::fail)?;
    }
}
