//! Named protocols and seeded random generators for tests and benchmarks.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::chor::{parse, Action, Choreography, MessageType, Participant};
use crate::pomset::{BranchNode, BranchingPomset, Child, EventId};
use crate::semantics::is_dependently_guarded;

/// Master and two workers.
pub const MASTER_WORKERS: &str = "(m->w1:t ; w1->m:d) || (m->w2:t ; w2->m:d)";

/// Three participants each send the same vote to both others.
pub const DISTRIBUTED_VOTING: &str = "((a->b:y || a->c:y) + (a->b:n || a->c:n))
  || ((b->a:y || b->c:y) + (b->a:n || b->c:n))
  || ((c->a:y || c->b:y) + (c->a:n || c->b:n))";

/// One choice between two sequenced interactions.
pub const CHOICE_IN_SEQUENCE: &str = "a->b:x ; (b->c:x + b->d:x) ; c->d:x";

/// Nested choices followed by an interaction depending on both levels.
pub const NESTED_CHOICE: &str = "((a->b:x ; (b->a:x + b->d:x)) + (a->c:x ; (c->a:x + c->d:x))) ; d->a:x";

/// Language equivalent to [`EARLY_CHOICE`] but not bisimilar.
pub const LATE_CHOICE: &str = "a->b:x ; (b->a:x + b->a:y)";
pub const EARLY_CHOICE: &str = "(a->b:x ; b->a:x) + (a->b:x ; b->a:y)";

/// The named loop-free protocols.
pub fn named() -> Vec<(&'static str, Choreography)> {
    [
        ("master-workers", MASTER_WORKERS),
        ("distributed-voting", DISTRIBUTED_VOTING),
        ("choice-in-sequence", CHOICE_IN_SEQUENCE),
        ("nested-choice", NESTED_CHOICE),
        ("late-choice", LATE_CHOICE),
        ("early-choice", EARLY_CHOICE),
    ]
    .into_iter()
    .map(|(name, text)| (name, parse(text, false).expect("built-in protocol parses")))
    .collect()
}

const PARTICIPANTS: [&str; 4] = ["a", "b", "c", "d"];
const MESSAGES: [&str; 2] = ["x", "y"];

/// Shape of generated choreographies.
#[derive(Debug, Clone, Copy)]
pub struct GenConfig {
    pub max_interactions: usize,
    pub max_participants: usize,
    /// Chance that a generated subterm is wrapped in a loop.
    pub loop_probability: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { max_interactions: 6, max_participants: 4, loop_probability: 0.0 }
    }
}

/// A random choreography with between 1 and `max_interactions` interactions.
pub fn random_choreography<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Choreography {
    let k = rng.gen_range(2..=cfg.max_participants.clamp(2, PARTICIPANTS.len()));
    let names = &PARTICIPANTS[..k];
    let n = rng.gen_range(1..=cfg.max_interactions.max(1));
    gen_term(rng, n, names, cfg.loop_probability)
}

fn gen_term<R: Rng>(rng: &mut R, n: usize, names: &[&str], loop_probability: f64) -> Choreography {
    let term = match n {
        0 => Choreography::Skip,
        1 => {
            let mut pair: Vec<&str> = names.choose_multiple(rng, 2).copied().collect();
            pair.shuffle(rng);
            Choreography::interaction(pair[0], pair[1], MESSAGES.choose(rng).expect("non-empty"))
        }
        _ => {
            // Occasionally put everything on one side to get `0` operands.
            let k = if rng.gen_bool(0.1) { *[0, n].choose(rng).expect("non-empty") } else { rng.gen_range(1..n) };
            let l = gen_term(rng, k, names, loop_probability);
            let r = gen_term(rng, n - k, names, loop_probability);
            match rng.gen_range(0..3) {
                0 => Choreography::seq(l, r),
                1 => Choreography::choice(l, r),
                _ => Choreography::par(l, r),
            }
        }
    };
    if n > 0 && loop_probability > 0.0 && rng.gen_bool(loop_probability) {
        Choreography::star(term)
    } else {
        term
    }
}

/// Draws until a dependently guarded choreography comes up.
pub fn random_guarded<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Choreography {
    loop {
        let c = random_choreography(rng, cfg);
        if is_dependently_guarded(&c) {
            return c;
        }
    }
}

/// A loop body `c` such that `c*` is dependently guarded.
pub fn random_guarded_loop_body<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Choreography {
    loop {
        let c = random_choreography(rng, cfg);
        if is_dependently_guarded(&Choreography::star(c.clone())) {
            return c;
        }
    }
}

/// A random valid branching pomset with at most `max_events` events and
/// `max_choices` choice nodes. Dependencies follow a random topological order.
pub fn random_pomset<R: Rng>(rng: &mut R, max_events: usize, max_choices: usize) -> BranchingPomset {
    enum Item {
        Event(EventId),
        Choice(usize, usize),
    }
    let n_events = rng.gen_range(1..=max_events.max(1));
    let n_choices = rng.gen_range(0..=max_choices);
    let mut nodes: Vec<Vec<Item>> = vec![Vec::new()];
    for _ in 0..n_choices {
        let parent = rng.gen_range(0..nodes.len());
        let (l, r) = (nodes.len(), nodes.len() + 1);
        nodes.push(Vec::new());
        nodes.push(Vec::new());
        nodes[parent].push(Item::Choice(l, r));
    }
    let events: Vec<EventId> = (0..n_events as u32).map(EventId).collect();
    for e in &events {
        let at = rng.gen_range(0..nodes.len());
        nodes[at].push(Item::Event(*e));
    }
    fn build(nodes: &[Vec<Item>], at: usize) -> BranchNode {
        BranchNode::new(nodes[at].iter().map(|item| match item {
            Item::Event(e) => Child::Event(*e),
            Item::Choice(l, r) => Child::choice(build(nodes, *l), build(nodes, *r)),
        }))
    }
    let branching = build(&nodes, 0);

    let mut order = events.clone();
    order.shuffle(rng);
    let mut deps = BTreeSet::new();
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            if rng.gen_bool(0.25) {
                deps.insert((order[i], order[j]));
            }
        }
    }
    let labels: BTreeMap<EventId, Action> = events
        .iter()
        .map(|e| {
            let pair: Vec<&str> = PARTICIPANTS.choose_multiple(rng, 2).copied().collect();
            let (from, to) = (Participant::new(pair[0]).expect("name"), Participant::new(pair[1]).expect("name"));
            let msg = MessageType::new(*MESSAGES.choose(rng).expect("non-empty")).expect("name");
            let action = if rng.gen_bool(0.5) { Action::send(from, to, msg) } else { Action::receive(from, to, msg) };
            (*e, action)
        })
        .collect();
    BranchingPomset::new(labels, deps, branching).expect("generated pomset is valid")
}
