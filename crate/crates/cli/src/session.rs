//! A choreography and its pomset stepped side by side.

use std::collections::BTreeSet;

use bpom_core::chor::{parse, Action, Choreography};
use bpom_core::encode::{encode, unfold_loops, EncodeConfig, LoopPolicy};
use bpom_core::lts::{bisimilar, build_chor_lts, build_pom_lts};
use bpom_core::pomset::{enabled_events, fire, BranchingPomset, EventId};
use bpom_core::semantics::{steps, terminates};
use serde::Serialize;

use crate::error::CliError;

/// States explored when two choreography successors carry the same label
/// and we need to pick the one matching the pomset.
const TIE_BREAK_BOUND: usize = 10_000;

#[derive(Debug, Clone)]
pub struct Session {
    source: Choreography,
    config: EncodeConfig,
    chor_initial: Choreography,
    pom_initial: BranchingPomset,
    chor_state: Choreography,
    pom_state: BranchingPomset,
    history: Vec<(EventId, Action)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnabledEvent {
    pub event: EventId,
    pub label: Action,
}

impl Session {
    /// Parses and encodes `text`. With `unfold`, loops are unfolded that many
    /// times on both sides; without it they are rejected.
    pub fn new(text: &str, unfold: Option<usize>) -> Result<Session, CliError> {
        let source = parse(text, false).map_err(|e| CliError::user(format!("parse error: {e}")))?;
        let config = EncodeConfig { loops: unfold.map_or(LoopPolicy::Reject, LoopPolicy::Unfold), ..Default::default() };
        Session::from_choreography(source, config)
    }

    pub fn from_choreography(source: Choreography, config: EncodeConfig) -> Result<Session, CliError> {
        let pom_initial = encode(&source, &config).map_err(|e| CliError::user(e.to_string()))?;
        let chor_initial = match config.loops {
            LoopPolicy::Unfold(k) => unfold_loops(&source, k),
            LoopPolicy::Reject => source.clone(),
        };
        let session = Session {
            source,
            config,
            chor_state: chor_initial.clone(),
            pom_state: pom_initial.clone(),
            chor_initial,
            pom_initial,
            history: Vec::new(),
        };
        session.check_agreement()?;
        Ok(session)
    }

    pub fn source(&self) -> &Choreography {
        &self.source
    }

    pub fn config(&self) -> &EncodeConfig {
        &self.config
    }

    pub fn chor_state(&self) -> &Choreography {
        &self.chor_state
    }

    pub fn pom_state(&self) -> &BranchingPomset {
        &self.pom_state
    }

    pub fn history(&self) -> &[(EventId, Action)] {
        &self.history
    }

    pub fn enabled(&self) -> Vec<EnabledEvent> {
        enabled_events(&self.pom_state)
            .into_iter()
            .map(|event| EnabledEvent { event, label: self.pom_state.label(event).expect("labelled").clone() })
            .collect()
    }

    pub fn terminated(&self) -> bool {
        self.pom_state.terminates()
    }

    /// Fires `event`. On a user error the session is unchanged.
    pub fn fire(&mut self, event: EventId) -> Result<(), CliError> {
        self.step(event)?;
        debug_assert!(self.replays(), "history does not replay to the current state");
        Ok(())
    }

    fn step(&mut self, event: EventId) -> Result<(), CliError> {
        let label = self
            .pom_state
            .label(event)
            .cloned()
            .ok_or_else(|| CliError::user(format!("{event} is not an event of the current pomset")))?;
        let pom_next = fire(&self.pom_state, event).map_err(|e| CliError::user(e.to_string()))?;
        let chor_next = match_step(&self.chor_state, &label, &pom_next)?;
        self.pom_state = pom_next;
        self.chor_state = chor_next;
        self.history.push((event, label));
        self.check_agreement()
    }

    pub fn reset(&mut self) {
        self.chor_state = self.chor_initial.clone();
        self.pom_state = self.pom_initial.clone();
        self.history.clear();
    }

    /// Refires the history from the initial states and compares.
    pub fn replays(&self) -> bool {
        let mut fresh = self.clone();
        fresh.reset();
        for (event, _) in &self.history {
            if fresh.step(*event).is_err() {
                return false;
            }
        }
        fresh.chor_state == self.chor_state && fresh.pom_state == self.pom_state
    }

    /// Both sides offer the same labels and agree on termination.
    fn check_agreement(&self) -> Result<(), CliError> {
        let chor: BTreeSet<Action> = steps(&self.chor_state).into_iter().map(|s| s.label).collect();
        let pom: BTreeSet<Action> = self.enabled().into_iter().map(|e| e.label).collect();
        if chor != pom {
            return Err(CliError::internal(format!(
                "choreography offers {} but the pomset offers {}",
                fmt_labels(&chor),
                fmt_labels(&pom)
            )));
        }
        if terminates(&self.chor_state) != self.terminated() {
            return Err(CliError::internal("choreography and pomset disagree on termination"));
        }
        Ok(())
    }
}

fn fmt_labels(labels: &BTreeSet<Action>) -> String {
    let parts: Vec<String> = labels.iter().map(ToString::to_string).collect();
    format!("{{{}}}", parts.join(", "))
}

/// The choreography step labelled `label` that corresponds to `pom_next`.
fn match_step(c: &Choreography, label: &Action, pom_next: &BranchingPomset) -> Result<Choreography, CliError> {
    let candidates: Vec<Choreography> =
        steps(c).into_iter().filter(|s| &s.label == label).map(|s| s.target).collect();
    match candidates.as_slice() {
        [] => Err(CliError::internal(format!("choreography cannot take {label}"))),
        [only] => Ok(only.clone()),
        _ => {
            let Ok(pom) = build_pom_lts(pom_next, TIE_BREAK_BOUND) else {
                return Ok(candidates[0].clone());
            };
            let fits = |t: &Choreography| build_chor_lts(t, TIE_BREAK_BOUND).is_ok_and(|l| bisimilar(&l, &pom).bisimilar);
            Ok(candidates.iter().find(|t| fits(t)).unwrap_or(&candidates[0]).clone())
        }
    }
}
