use std::collections::BTreeSet;

use bpom_core::chor::{parse, Action, Choreography, MessageType, Participant};
use bpom_core::corpus::{self, GenConfig};
use bpom_core::encode::{encode, EncodeConfig};
use bpom_core::lts::{bisimilar, build_chor_lts, build_pom_lts, trace_equivalent, Lts, DEFAULT_STATE_BOUND};
use bpom_core::pomset::{
    all_refinements, enable, enabled_events, fire, linearisations, refines, BranchingPomset, EventId,
    DEFAULT_LEAF_BUDGET,
};
use bpom_core::semantics::{partial_terminate, partial_terminate_for, steps};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn with_loops() -> GenConfig {
    GenConfig { loop_probability: 0.2, ..Default::default() }
}

/// A term reached by a few random steps, so that pending receives show up.
fn walked(seed: u64, cfg: &GenConfig) -> Choreography {
    let mut rng = rng(seed);
    let mut c = corpus::random_choreography(&mut rng, cfg);
    for _ in 0..rng.gen_range(0..6) {
        match steps(&c).choose(&mut rng) {
            Some(step) => c = step.target.clone(),
            None => break,
        }
    }
    c
}

fn enc(c: &Choreography) -> BranchingPomset {
    encode(c, &EncodeConfig::default()).unwrap()
}

fn labels() -> Vec<Action> {
    let mut out = Vec::new();
    for from in ["a", "b", "c", "d", "e"] {
        for to in ["a", "b", "c", "d", "e"] {
            if from != to {
                let (f, t, m) = (Participant::new(from).unwrap(), Participant::new(to).unwrap(), MessageType::new("x").unwrap());
                out.push(Action::send(f.clone(), t.clone(), m.clone()));
                out.push(Action::receive(f, t, m));
            }
        }
    }
    out
}

/// All topological orders of a choice-free pomset, as label sequences.
fn topological_orders(r: &BranchingPomset) -> BTreeSet<Vec<Action>> {
    fn go(r: &BranchingPomset, left: &mut BTreeSet<EventId>, prefix: &mut Vec<Action>, out: &mut BTreeSet<Vec<Action>>) {
        if left.is_empty() {
            out.insert(prefix.clone());
            return;
        }
        let ready: Vec<EventId> = left
            .iter()
            .copied()
            .filter(|e| !r.deps().iter().any(|(a, b)| b == e && left.contains(a)))
            .collect();
        for e in ready {
            left.remove(&e);
            prefix.push(r.label(e).unwrap().clone());
            go(r, left, prefix, out);
            prefix.pop();
            left.insert(e);
        }
    }
    let mut out = BTreeSet::new();
    go(r, &mut r.events().clone(), &mut Vec::new(), &mut out);
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn print_parse_round_trip(seed in any::<u64>()) {
        let c = walked(seed, &with_loops());
        prop_assert_eq!(parse(&c.to_string(), true).unwrap(), c);
    }

    #[test]
    fn participants_of_composition_are_the_union(s1 in any::<u64>(), s2 in any::<u64>()) {
        let (a, b) = (walked(s1, &with_loops()), walked(s2, &with_loops()));
        let union: BTreeSet<_> = a.participants().union(&b.participants()).cloned().collect();
        for c in [Choreography::seq(a.clone(), b.clone()), Choreography::choice(a.clone(), b.clone()), Choreography::par(a, b)] {
            prop_assert_eq!(c.participants(), union.clone());
        }
    }

    #[test]
    fn partial_termination_depends_only_on_subject(seed in any::<u64>()) {
        let c = walked(seed, &with_loops());
        for l in labels() {
            let r = partial_terminate(&c, &l);
            prop_assert_eq!(&r, &partial_terminate_for(&c, l.subject()));
            if let Some(r) = r {
                // Idempotent, and the residue no longer involves the subject's conflicts.
                prop_assert_eq!(partial_terminate(&r, &l), Some(r.clone()));
            }
        }
    }

    #[test]
    fn weak_sequencing_steps(s1 in any::<u64>(), s2 in any::<u64>()) {
        let (c1, c2) = (walked(s1, &with_loops()), walked(s2, &with_loops()));
        let seq = Choreography::seq(c1.clone(), c2.clone());
        let mut expected = BTreeSet::new();
        for st in steps(&c1) {
            expected.insert((st.label.clone(), Choreography::seq(st.target, c2.clone())));
        }
        for st in steps(&c2) {
            if let Some(rest) = partial_terminate(&c1, &st.label) {
                expected.insert((st.label.clone(), Choreography::seq(rest, st.target)));
            }
        }
        let got: BTreeSet<_> = steps(&seq).into_iter().map(|s| (s.label, s.target)).collect();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn event_count_formula(seed in any::<u64>()) {
        let c = walked(seed, &GenConfig::default());
        let r = enc(&c);
        prop_assert_eq!(r.len(), 2 * c.interaction_count() + c.pending_count());
        prop_assert_eq!(r.validate(), Ok(()));
    }

    #[test]
    fn sequencing_orders_same_subject_events(s1 in any::<u64>(), s2 in any::<u64>()) {
        let (c1, c2) = (walked(s1, &GenConfig::default()), walked(s2, &GenConfig::default()));
        let first = enc(&c1);
        let whole = enc(&Choreography::seq(c1, c2));
        let closure = whole.closure();
        for a in first.events() {
            for b in whole.events().difference(first.events()) {
                if whole.label(*a).unwrap().subject() == whole.label(*b).unwrap().subject() {
                    prop_assert!(closure.contains(&(*a, *b)));
                }
            }
        }
    }

    #[test]
    fn enable_and_fire_preserve_validity(seed in any::<u64>()) {
        let r = corpus::random_pomset(&mut rng(seed), 12, 3);
        for e in r.events() {
            if let Ok(x) = enable(&r, *e) {
                prop_assert_eq!(x.validate(), Ok(()));
                prop_assert!(x.active_minimal().contains(e));
                prop_assert!(refines(r.branching(), x.branching()));
                let y = fire(&r, *e).unwrap();
                prop_assert_eq!(y.validate(), Ok(()));
                prop_assert!(!y.events().contains(e));
            }
        }
    }

    #[test]
    fn refinement_is_reflexive_and_transitive(seed in any::<u64>()) {
        let r = corpus::random_pomset(&mut rng(seed), 8, 2);
        prop_assert!(refines(r.branching(), r.branching()));
        let all = all_refinements(&r, DEFAULT_LEAF_BUDGET).unwrap();
        for x in &all {
            prop_assert!(refines(r.branching(), x.branching()));
            for y in all_refinements(x, DEFAULT_LEAF_BUDGET).unwrap() {
                prop_assert!(all.contains(&y));
            }
        }
    }

    #[test]
    fn choice_free_linearisations_are_topological_orders(seed in any::<u64>()) {
        let r = corpus::random_pomset(&mut rng(seed), 7, 0);
        let lin = linearisations(&r, 100_000);
        prop_assert!(!lin.truncated);
        prop_assert_eq!(lin.traces, topological_orders(&r));
    }

    #[test]
    fn enabled_events_of_choice_free_pomsets_are_minimal(seed in any::<u64>()) {
        let r = corpus::random_pomset(&mut rng(seed), 12, 0);
        prop_assert_eq!(enabled_events(&r), r.active_minimal());
    }
}

fn lts_of(seed: u64) -> (Choreography, Lts) {
    let c = corpus::random_guarded(&mut rng(seed), &GenConfig::default());
    let l = build_chor_lts(&c, DEFAULT_STATE_BOUND).unwrap();
    (c, l)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn bisimulation_is_symmetric(s1 in any::<u64>(), s2 in any::<u64>()) {
        let ((_, a), (_, b)) = (lts_of(s1), lts_of(s2));
        prop_assert_eq!(bisimilar(&a, &b).bisimilar, bisimilar(&b, &a).bisimilar);
    }

    #[test]
    fn bisimulation_ignores_state_numbering(seed in any::<u64>(), shuffle in any::<u64>()) {
        let (c, a) = lts_of(seed);
        let mut perm: Vec<usize> = (0..a.state_count()).collect();
        perm.shuffle(&mut rng(shuffle));
        let report = bisimilar(&a, &a.permuted(&perm));
        prop_assert!(report.bisimilar, "{}", c);
        for (s, t) in perm.iter().enumerate() {
            prop_assert!(report.relation.contains(&(s, *t)));
        }
    }

    #[test]
    fn bisimilar_systems_are_trace_equivalent(s1 in any::<u64>(), s2 in any::<u64>()) {
        let ((c, a), (_, b)) = (lts_of(s1), lts_of(s2));
        if bisimilar(&a, &b).bisimilar {
            prop_assert!(trace_equivalent(&a, &b, 14));
        }
        let pom = build_pom_lts(&enc(&c), DEFAULT_STATE_BOUND).unwrap();
        prop_assert!(trace_equivalent(&a, &pom, 14));
    }
}
