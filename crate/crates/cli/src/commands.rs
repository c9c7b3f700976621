//! The subcommands, as functions from input text to output text.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use bpom_core::chor::{parse, Action, Choreography};
use bpom_core::encode::{encode, unfold_loops, EncodeConfig, LoopPolicy};
use bpom_core::lts::{
    bisimilar, build_chor_lts, build_chor_lts_to_depth, build_pom_lts, completed_traces, Exploded, Lts, Side, Verdict,
    DEFAULT_STATE_BOUND,
};
use bpom_core::pomset::{linearisations, to_dot};
use bpom_core::semantics::guard_violations;

use crate::error::CliError;
use crate::session::Session;

/// Cap on listed linearisations when no length bound is given.
const MAX_TRACES: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Dot,
}

pub fn read_choreography(text: &str) -> Result<Choreography, CliError> {
    parse(text, false).map_err(|e| CliError::user(format!("parse error at {e}")))
}

fn loop_config(unfold: Option<usize>) -> EncodeConfig {
    EncodeConfig { loops: unfold.map_or(LoopPolicy::Reject, LoopPolicy::Unfold), ..Default::default() }
}

fn exploded(e: Exploded) -> CliError {
    CliError::user(e.to_string())
}

pub fn cmd_parse(text: &str) -> Result<String, CliError> {
    let c = read_choreography(text)?;
    let names: Vec<String> = c.participants().iter().map(ToString::to_string).collect();
    Ok(format!("{c}\n\n{}\nparticipants: {{{}}}\n", c.tree_dump(), names.join(", ")))
}

/// The report, and whether every loop is dependently guarded.
pub fn cmd_check(text: &str) -> Result<(String, bool), CliError> {
    let c = read_choreography(text)?;
    let loops = c.loops();
    if loops.is_empty() {
        return Ok(("no loops: dependently guarded\n".into(), true));
    }
    let violations = guard_violations(&c);
    let mut out = String::new();
    for looped in loops {
        let bad: Vec<_> = violations.iter().filter(|v| &v.looped == looped).collect();
        if bad.is_empty() {
            let _ = writeln!(out, "{looped}: ok");
        } else {
            let _ = writeln!(out, "{looped}: NOT dependently guarded");
            for v in bad {
                let _ = writeln!(out, "  subject {} partially terminates the body to {}", v.subject, v.residue);
            }
        }
    }
    Ok((out, violations.is_empty()))
}

pub fn cmd_encode(text: &str, unfold: Option<usize>, format: Format) -> Result<String, CliError> {
    let c = read_choreography(text)?;
    let r = encode(&c, &loop_config(unfold)).map_err(|e| CliError::user(e.to_string()))?;
    r.validate().map_err(|e| CliError::internal(format!("encoder produced an invalid pomset: {e}")))?;
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(&r).map_err(|e| CliError::internal(e.to_string()))? + "\n",
        Format::Dot => to_dot(&r),
    })
}

/// Single mode: the choreography against its own encoding. A mismatch here
/// means the encoder or one of the semantics is broken.
pub fn cmd_bisim(text: &str, unfold: Option<usize>) -> Result<String, CliError> {
    let c = read_choreography(text)?;
    let r = encode(&c, &loop_config(unfold)).map_err(|e| CliError::user(e.to_string()))?;
    let c = match unfold {
        Some(k) => unfold_loops(&c, k),
        None => c,
    };
    let chor = build_chor_lts(&c, DEFAULT_STATE_BOUND).map_err(exploded)?;
    let pom = build_pom_lts(&r, DEFAULT_STATE_BOUND).map_err(exploded)?;
    let report = bisimilar(&chor, &pom);
    if !report.bisimilar {
        return Err(CliError::internal(format!(
            "choreography and its pomset are not bisimilar: {}",
            describe_witness(&report.witness.expect("witness for a negative verdict"))
        )));
    }
    Ok(format!(
        "bisimilar\nchoreography: {} states, {} transitions\npomset: {} states, {} transitions\n",
        chor.state_count(),
        chor.transition_count(),
        pom.state_count(),
        pom.transition_count()
    ))
}

/// Pair mode: two choreographies against each other.
pub fn cmd_bisim_pair(left: &str, right: &str, unfold: Option<usize>) -> Result<String, CliError> {
    let lts = |text: &str| -> Result<Lts, CliError> {
        let c = read_choreography(text)?;
        let c = match unfold {
            Some(k) => unfold_loops(&c, k),
            None if c.contains_loop() => {
                return Err(CliError::user("choreography contains loops; pass --unfold to compare them"))
            }
            None => c,
        };
        build_chor_lts(&c, DEFAULT_STATE_BOUND).map_err(exploded)
    };
    let (l, r) = (lts(left)?, lts(right)?);
    let report = bisimilar(&l, &r);
    let mut out = format!("left: {} states\nright: {} states\n", l.state_count(), r.state_count());
    match report.witness {
        None => out.push_str("bisimilar\n"),
        Some(w) => {
            let _ = writeln!(out, "not bisimilar\n{}", describe_witness(&w));
        }
    }
    Ok(out)
}

fn side(s: Side) -> &'static str {
    match s {
        Side::Left => "left",
        Side::Right => "right",
    }
}

fn describe_witness(w: &bpom_core::lts::Witness) -> String {
    let trace = fmt_trace(&w.trace);
    match w.verdict {
        Verdict::MissingStep { side: s } => {
            let other = side(if s == Side::Left { Side::Right } else { Side::Left });
            format!("distinguishing trace: {trace}\nonly {} can take the last step; {other} has no matching move", side(s))
        }
        Verdict::TerminationMismatch { terminating } => {
            format!("distinguishing trace: {trace}\nafterwards only {} may terminate", side(terminating))
        }
    }
}

fn fmt_trace(trace: &[Action]) -> String {
    if trace.is_empty() {
        return "(empty)".into();
    }
    trace.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

/// Completed traces. Without `max_len` these are the pomset's linearisations
/// (loops must be unfolded); with it, the choreography is explored that deep.
pub fn cmd_traces(text: &str, max_len: Option<usize>, unfold: Option<usize>, count_only: bool) -> Result<String, CliError> {
    let c = read_choreography(text)?;
    let traces = match max_len {
        Some(n) => {
            let c = unfold.map_or(c.clone(), |k| unfold_loops(&c, k));
            let lts = build_chor_lts_to_depth(&c, n, DEFAULT_STATE_BOUND).map_err(exploded)?;
            completed_traces(&lts, n)
        }
        None => {
            let r = encode(&c, &loop_config(unfold)).map_err(|e| CliError::user(e.to_string()))?;
            let lin = linearisations(&r, MAX_TRACES);
            if lin.truncated {
                return Err(CliError::user(format!("more than {MAX_TRACES} traces; pass --max-len")));
            }
            lin.traces
        }
    };
    let mut out = String::new();
    if !count_only {
        for t in &traces {
            let _ = writeln!(out, "{}", fmt_trace(t));
        }
    }
    let _ = writeln!(out, "{} traces", traces.len());
    Ok(out)
}

fn print_state(s: &Session, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "choreography: {}", s.chor_state())?;
    writeln!(out, "pomset: {} events, {} choices", s.pom_state().len(), s.pom_state().choice_count())?;
    if s.terminated() {
        writeln!(out, "terminated: choreography and pomset")?;
    }
    for (i, e) in s.enabled().iter().enumerate() {
        writeln!(out, "  [{i}] {} {}", e.event, e.label)?;
    }
    Ok(())
}

/// Step-through loop. Each input line is an index into the enabled list or a
/// label (`ab!x`, `m w1?t`); `reset` and `quit` are also understood. In
/// script mode the first bad line stops the run with an error.
pub fn run_sim(
    text: &str,
    unfold: Option<usize>,
    input: impl BufRead,
    out: &mut impl Write,
    script: bool,
) -> Result<(), CliError> {
    let mut session = Session::new(text, unfold)?;
    print_state(&session, out)?;
    for line in input.lines() {
        let line = line?;
        let cmd = line.trim();
        if cmd.is_empty() || cmd.starts_with("//") {
            continue;
        }
        match cmd {
            "quit" | "q" => break,
            "reset" => {
                session.reset();
                writeln!(out, "> reset")?;
                print_state(&session, out)?;
                continue;
            }
            _ => {}
        }
        let enabled = session.enabled();
        let chosen = match cmd.parse::<usize>() {
            Ok(i) => enabled.get(i).ok_or_else(|| format!("no enabled event at index {i}")),
            Err(_) => match Action::parse_label(cmd) {
                Some(label) => enabled.iter().find(|e| e.label == label).ok_or_else(|| format!("{label} is not enabled")),
                None => Err(format!("cannot read `{cmd}` as an index or label")),
            },
        };
        match chosen {
            Ok(e) => {
                writeln!(out, "> {} {}", e.event, e.label)?;
                session.fire(e.event)?;
                print_state(&session, out)?;
            }
            Err(msg) if script => return Err(CliError::user(msg)),
            Err(msg) => writeln!(out, "error: {msg}")?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MW: &str = "(m->w1:t ; w1->m:d) || (m->w2:t ; w2->m:d)";

    #[test]
    fn parse_lists_participants() {
        let out = cmd_parse("((a->b:y || a->c:y) + (a->b:n || a->c:n)) || ((b->a:y || b->c:y) + (b->a:n || b->c:n))").unwrap();
        assert!(out.ends_with("participants: {a, b, c}\n"));
        assert_eq!(cmd_parse("a->a:x").unwrap_err().exit_code(), 1);
    }

    #[test]
    fn check_reports_offending_subject() {
        let (out, ok) = cmd_check("(a->b:x + a->c:x)*").unwrap();
        assert!(!ok);
        assert!(out.contains("subject c partially terminates the body to a->b:x"));
        assert!(cmd_check("(a->b:x + b->a:x)*").unwrap().1);
        assert!(cmd_check("a->b:x").unwrap().1);
    }

    #[test]
    fn bisim_single_and_pair() {
        let out = cmd_bisim(MW, None).unwrap();
        assert!(out.contains("choreography: 25 states") && out.contains("pomset: 25 states"));
        let out = cmd_bisim_pair("a->b:x ; (b->a:x + b->a:y)", "(a->b:x ; b->a:x) + (a->b:x ; b->a:y)", None).unwrap();
        assert!(out.contains("not bisimilar\ndistinguishing trace: ab!x, ab?x, "));
    }

    #[test]
    fn trace_counts() {
        assert!(cmd_traces(MW, None, None, true).unwrap().ends_with("70 traces\n"));
        assert_eq!(cmd_traces(MW, Some(8), None, true).unwrap(), "70 traces\n");
        assert_eq!(cmd_traces("0", None, None, false).unwrap(), "(empty)\n1 traces\n");
        assert_eq!(cmd_traces("a->b:x", None, None, false).unwrap(), "ab!x, ab?x\n1 traces\n");
    }

    #[test]
    fn sim_script_stops_on_bad_index() {
        let mut out = Vec::new();
        let err = run_sim("a->b:x", None, "5\n".as_bytes(), &mut out, true).unwrap_err();
        assert_eq!(err, CliError::user("no enabled event at index 5"));
    }
}
