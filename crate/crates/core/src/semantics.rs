//! Small-step semantics of choreographies: reduction, termination, partial
//! termination and dependent guardedness.

use std::collections::BTreeSet;

use crate::chor::{Action, Choreography, Participant};

/// One reduction `c --label--> target`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChorStep {
    pub label: Action,
    pub target: Choreography,
}

/// All reductions of `c`, deduplicated and sorted.
pub fn steps(c: &Choreography) -> Vec<ChorStep> {
    let mut out = BTreeSet::new();
    collect_steps(c, &mut out);
    out.into_iter().collect()
}

fn collect_steps(c: &Choreography, out: &mut BTreeSet<ChorStep>) {
    use Choreography as C;
    match c {
        C::Skip => {}
        C::Interaction { from, to, msg } => {
            out.insert(ChorStep {
                label: Action::send(from.clone(), to.clone(), msg.clone()),
                target: C::PendingReceive { from: from.clone(), to: to.clone(), msg: msg.clone() },
            });
        }
        C::PendingReceive { from, to, msg } => {
            out.insert(ChorStep {
                label: Action::receive(from.clone(), to.clone(), msg.clone()),
                target: C::Skip,
            });
        }
        C::Seq(l, r) => {
            for s in steps(l) {
                out.insert(ChorStep { label: s.label, target: C::seq(s.target, (**r).clone()) });
            }
            for s in steps(r) {
                // Weak sequencing: the left side must get out of the way of the subject.
                if let Some(rest) = partial_terminate_for(l, s.label.subject()) {
                    out.insert(ChorStep { label: s.label, target: C::seq(rest, s.target) });
                }
            }
        }
        C::Par(l, r) => {
            for s in steps(l) {
                out.insert(ChorStep { label: s.label, target: C::par(s.target, (**r).clone()) });
            }
            for s in steps(r) {
                out.insert(ChorStep { label: s.label, target: C::par((**l).clone(), s.target) });
            }
        }
        C::Choice(l, r) => {
            collect_steps(l, out);
            collect_steps(r, out);
        }
        C::Loop(body) => {
            for s in steps(body) {
                out.insert(ChorStep { label: s.label, target: C::seq(s.target, c.clone()) });
            }
        }
    }
}

/// Whether `c` may stop here.
pub fn terminates(c: &Choreography) -> bool {
    use Choreography as C;
    match c {
        C::Skip | C::Loop(_) => true,
        C::Interaction { .. } | C::PendingReceive { .. } => false,
        C::Seq(l, r) | C::Par(l, r) => terminates(l) && terminates(r),
        C::Choice(l, r) => terminates(l) || terminates(r),
    }
}

/// Discards exactly the branches of `c` that conflict with the subject of
/// `label`. `None` means `c` cannot get out of the way.
pub fn partial_terminate(c: &Choreography, label: &Action) -> Option<Choreography> {
    partial_terminate_for(c, label.subject())
}

/// Partial termination only ever looks at the subject of the action.
pub fn partial_terminate_for(c: &Choreography, subject: &Participant) -> Option<Choreography> {
    use Choreography as C;
    match c {
        C::Skip => Some(C::Skip),
        C::Interaction { from, to, .. } => (subject != from && subject != to).then(|| c.clone()),
        C::PendingReceive { to, .. } => (subject != to).then(|| c.clone()),
        C::Seq(l, r) => Some(C::seq(partial_terminate_for(l, subject)?, partial_terminate_for(r, subject)?)),
        C::Par(l, r) => Some(C::par(partial_terminate_for(l, subject)?, partial_terminate_for(r, subject)?)),
        C::Choice(l, r) => match (partial_terminate_for(l, subject), partial_terminate_for(r, subject)) {
            (Some(l), Some(r)) => Some(C::choice(l, r)),
            (Some(only), None) | (None, Some(only)) => Some(only),
            (None, None) => None,
        },
        C::Loop(body) => match partial_terminate_for(body, subject) {
            Some(rest) if rest == **body => Some(c.clone()),
            _ => Some(C::Skip),
        },
    }
}

/// A loop whose body can get out of the way of `subject` only by dropping
/// some of its branches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuardViolation {
    pub looped: Choreography,
    pub subject: Participant,
    /// What the body partially terminates to; never equal to the body.
    pub residue: Choreography,
}

/// Every loop of `c` that is not dependently guarded, with each offending subject.
pub fn guard_violations(c: &Choreography) -> Vec<GuardViolation> {
    let mut out = Vec::new();
    for looped in c.loops() {
        let Choreography::Loop(body) = looped else { unreachable!() };
        for subject in body.participants() {
            if let Some(residue) = partial_terminate_for(body, &subject) {
                if residue != **body {
                    out.push(GuardViolation { looped: looped.clone(), subject, residue });
                }
            }
        }
    }
    out
}

/// Every loop body either partially terminates to itself or not at all.
///
/// Subjects outside the body leave it untouched, so only the body's own
/// participants need checking.
pub fn is_dependently_guarded(c: &Choreography) -> bool {
    guard_violations(c).is_empty()
}
