//! Terminal review of table candidates.

use std::io::{BufRead, Write};

use schemamatch::orchestrator::{Decision, RunState};
use schemamatch::table_matcher::{CandidateStatus, TableCandidate};

pub fn describe(c: &TableCandidate) -> String {
    let mut s = format!(
        "{}  {} -> {}  score {:.3}  [{:?}, {:?}]",
        c.id, c.source_table, c.target_table, c.score, c.provenance, c.status
    );
    if let Some((f, b)) = c.direction_ratios {
        s.push_str(&format!("  ratios {f:.2}/{b:.2}"));
    }
    for e in &c.evidence {
        s.push_str(&format!("\n      {} ~ {}  {:.3}", e.source_attribute, e.target_attribute, e.score));
    }
    s
}

/// Walks the proposed candidates and asks for a decision on each.
///
/// Answers: `c` confirm, `r` reject, `s` skip, `q` quit. `after_decision`
/// runs after every recorded decision, typically to persist the run.
/// Returns the number of decisions made.
pub fn review_loop<R: BufRead, W: Write>(
    run: &mut RunState,
    mut input: R,
    mut out: W,
    mut after_decision: impl FnMut(&RunState) -> schemamatch::Result<()>,
) -> anyhow::Result<usize> {
    let pending: Vec<String> = run
        .candidates
        .iter()
        .filter(|c| c.status == CandidateStatus::Proposed)
        .map(|c| c.id.clone())
        .collect();
    if pending.is_empty() {
        writeln!(out, "no candidates awaiting review")?;
        return Ok(0);
    }
    let mut made = 0;
    'outer: for id in pending {
        let text = describe(run.candidate(&id).expect("pending id exists"));
        loop {
            write!(out, "{text}\n  [c]onfirm / [r]eject / [s]kip / [q]uit > ")?;
            out.flush()?;
            let mut line = String::new();
            if input.read_line(&mut line)? == 0 {
                writeln!(out)?;
                break 'outer;
            }
            let answer = line.trim().to_ascii_lowercase();
            let decision = match answer.as_str() {
                "s" | "skip" | "" => continue 'outer,
                "q" | "quit" => break 'outer,
                other => match other.parse::<Decision>() {
                    Ok(d) => d,
                    Err(_) => {
                        writeln!(out, "  please answer c, r, s or q")?;
                        continue;
                    }
                },
            };
            run.apply_decision(&id, decision)?;
            after_decision(run)?;
            made += 1;
            continue 'outer;
        }
    }
    Ok(made)
}
