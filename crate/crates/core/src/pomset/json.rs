//! JSON form of a branching pomset:
//!
//! ```json
//! { "events": [ { "id": 1, "label": { "kind": "send", "from": "a", "to": "b", "msg": "x" } } ],
//!   "deps": [ [1, 2] ],
//!   "branching": { "type": "node", "children": [ { "type": "event", "id": 1 },
//!                  { "type": "choice", "branches": [ node, node ] } ] } }
//! ```

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{BranchNode, BranchingPomset, Child, EventId, InvariantViolation};
use crate::chor::Action;

#[derive(Debug, Error)]
pub enum PomsetJsonError {
    #[error("invalid pomset: {0}")]
    Invalid(#[from] InvariantViolation),
    #[error("label of {0} communicates with itself")]
    SelfCommunication(EventId),
}

#[derive(Serialize, Deserialize)]
struct EventDto {
    id: EventId,
    label: Action,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename = "node")]
struct NodeDto {
    children: Vec<ChildDto>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum ChildDto {
    Event { id: EventId },
    Choice { branches: [NodeDto; 2] },
}

#[derive(Serialize, Deserialize)]
pub(super) struct PomsetDto {
    events: Vec<EventDto>,
    deps: Vec<[EventId; 2]>,
    branching: NodeDto,
}

impl From<&BranchNode> for NodeDto {
    fn from(node: &BranchNode) -> Self {
        NodeDto {
            children: node
                .children
                .iter()
                .map(|c| match c {
                    Child::Event(id) => ChildDto::Event { id: *id },
                    Child::Choice(l, r) => ChildDto::Choice { branches: [(&**l).into(), (&**r).into()] },
                })
                .collect(),
        }
    }
}

impl NodeDto {
    /// Keeps duplicate events visible so that validation can reject them.
    fn into_node(self, seen: &mut Vec<EventId>) -> BranchNode {
        BranchNode::new(self.children.into_iter().map(|c| match c {
            ChildDto::Event { id } => {
                seen.push(id);
                Child::Event(id)
            }
            ChildDto::Choice { branches: [l, r] } => Child::choice(l.into_node(seen), r.into_node(seen)),
        }))
    }
}

impl From<BranchingPomset> for PomsetDto {
    fn from(r: BranchingPomset) -> Self {
        PomsetDto {
            events: r.labels.iter().map(|(id, label)| EventDto { id: *id, label: label.clone() }).collect(),
            deps: r.deps.iter().map(|(a, b)| [*a, *b]).collect(),
            branching: (&r.branching).into(),
        }
    }
}

impl TryFrom<PomsetDto> for BranchingPomset {
    type Error = PomsetJsonError;

    fn try_from(dto: PomsetDto) -> Result<Self, Self::Error> {
        let mut labels = BTreeMap::new();
        for ev in dto.events {
            if ev.label.from == ev.label.to {
                return Err(PomsetJsonError::SelfCommunication(ev.id));
            }
            if labels.insert(ev.id, ev.label).is_some() {
                return Err(InvariantViolation::DuplicateEvent.into());
            }
        }
        let mut seen = Vec::new();
        let branching = dto.branching.into_node(&mut seen);
        if seen.len() != seen.iter().collect::<BTreeSet<_>>().len() {
            return Err(InvariantViolation::DuplicateEvent.into());
        }
        let deps = dto.deps.into_iter().map(|[a, b]| (a, b)).collect();
        Ok(BranchingPomset::new(labels, deps, branching)?)
    }
}

impl Serialize for BranchingPomset {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        PomsetDto::from(self.clone()).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BranchingPomset {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let dto = PomsetDto::deserialize(deserializer)?;
        BranchingPomset::try_from(dto).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pomset::tests::{encoded, NESTED};
    use serde_json::json;

    #[test]
    fn exact_field_names() {
        let r = encoded("a->b:x + 0");
        let v = serde_json::to_value(&r).unwrap();
        let expected = json!({
            "events": [
                {"id": 0, "label": {"kind": "send", "from": "a", "to": "b", "msg": "x"}},
                {"id": 1, "label": {"kind": "recv", "from": "a", "to": "b", "msg": "x"}}
            ],
            "deps": [[0, 1]],
            "branching": {"type": "node", "children": [
                {"type": "choice", "branches": [
                    {"type": "node", "children": []},
                    {"type": "node", "children": [{"type": "event", "id": 0}, {"type": "event", "id": 1}]}
                ]}
            ]}
        });
        assert_eq!(v, expected);
    }

    #[test]
    fn round_trip() {
        let r = encoded(NESTED);
        let text = serde_json::to_string(&r).unwrap();
        let back: BranchingPomset = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn rejects_invalid_documents() {
        let label = json!({"kind": "send", "from": "a", "to": "b", "msg": "x"});
        let cyclic = json!({
            "events": [{"id": 1, "label": label}, {"id": 2, "label": label}],
            "deps": [[1, 2], [2, 1]],
            "branching": {"type": "node", "children": [{"type": "event", "id": 1}, {"type": "event", "id": 2}]}
        });
        let err = serde_json::from_value::<BranchingPomset>(cyclic).unwrap_err();
        assert!(err.to_string().contains("cyclic"), "{err}");

        let dup = json!({
            "events": [{"id": 1, "label": label}],
            "deps": [],
            "branching": {"type": "node", "children": [{"type": "event", "id": 1},
                {"type": "choice", "branches": [
                    {"type": "node", "children": [{"type": "event", "id": 1}]},
                    {"type": "node", "children": []}]}]}
        });
        assert!(serde_json::from_value::<BranchingPomset>(dup).is_err());
    }
}
