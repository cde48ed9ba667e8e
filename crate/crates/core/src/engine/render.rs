use serde_json::{json, Value};

use super::{Outcome, Proof, ProofNode};
use crate::processors::Justification;
use crate::term::Substitution;

/// Numbered processor applications, each with its input problem and witness.
pub fn render_text(proof: &Proof) -> String {
    let mut out = format!("{}\n", proof.verdict);
    if matches!(proof.root.outcome, Outcome::Solved) {
        out.push_str("trivially iAST: no annotations\n");
        return out;
    }
    let mut counter = 0;
    text_node(&proof.root, &mut counter, &mut out);
    if let Some(e) = &proof.verification_error {
        out.push_str(&format!("re-verification failed: {e}\n"));
    }
    if proof.timed_out {
        out.push_str("timeout reached\n");
    }
    out
}

fn text_node(node: &ProofNode, counter: &mut usize, out: &mut String) -> usize {
    *counter += 1;
    let id = *counter;
    let header = match &node.outcome {
        Outcome::Solved => "solved: no annotations".to_string(),
        Outcome::Step { processor, .. } => processor.to_string(),
        Outcome::Open { last_attempted, timed_out } => {
            let last = last_attempted.map_or("none".to_string(), |p| p.to_string());
            format!("open: last attempted {last}{}", if *timed_out { " (timed out)" } else { "" })
        }
    };
    out.push_str(&format!("[{id}] {header}\n"));
    out.push_str(if node.problem.is_classical() { "  problem (classical):\n" } else { "  problem:\n" });
    for (i, a) in node.problem.adps().iter().enumerate() {
        out.push_str(&format!("    ({}) {a}\n", i + 1));
    }
    if let Outcome::Step { justification, children, .. } = &node.outcome {
        for line in justification_lines(justification) {
            out.push_str(&format!("  {line}\n"));
        }
        let mut body = String::new();
        let ids: Vec<String> = children.iter().map(|c| format!("[{}]", text_node(c, counter, &mut body))).collect();
        out.push_str(&format!("  children: {}\n", if ids.is_empty() { "none".to_string() } else { ids.join(", ") }));
        out.push_str(&body);
    }
    id
}

fn index_set(ix: &[usize]) -> String {
    let parts: Vec<String> = ix.iter().map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", parts.join(", "))
}

fn substitutions(subs: &[Substitution]) -> String {
    if subs.is_empty() {
        return "none".to_string();
    }
    subs.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", ")
}

fn justification_lines(j: &Justification) -> Vec<String> {
    match j {
        Justification::DependencyGraph { sccs, .. } => {
            let parts: Vec<String> = sccs.iter().map(|c| index_set(c)).collect();
            vec![format!("SCCs: {}", if parts.is_empty() { "none".to_string() } else { parts.join(", ") })]
        }
        Justification::UsableTerms { removed } => removed
            .iter()
            .map(|(i, j, pos)| format!("not usable: ADP {}, term {}, position {pos}", i + 1, j + 1))
            .collect(),
        Justification::UsableRules { deflagged } => vec![format!("not usable: {}", index_set(deflagged))],
        Justification::ReductionPair { interpretation, strict } => {
            let mut lines = interpretation.lines();
            lines.push(format!("strictly decreasing: {}", index_set(strict)));
            lines
        }
        Justification::ProbabilityRemoval { dps, np } => {
            let mut lines = vec!["dependency pairs:".to_string()];
            lines.extend(dps.iter().map(|(l, r)| format!("  {l} -> {r}")));
            lines.push("rules:".to_string());
            lines.extend(np.iter().map(|r| format!("  {r}")));
            lines
        }
        Justification::Rewriting { adp, j, pos, rule, condition } => vec![format!(
            "ADP {}, term {}, position {pos}, rule {}, condition {condition}",
            adp + 1,
            j + 1,
            rule + 1
        )],
        Justification::Instantiation { adp, substitutions: s } | Justification::ForwardInstantiation { adp, substitutions: s } => {
            vec![format!("ADP {}, substitutions: {}", adp + 1, substitutions(s))]
        }
        Justification::RuleOverlap { adp, j, pos, substitutions: s } => vec![format!(
            "ADP {}, term {}, position {pos}, substitutions: {}",
            adp + 1,
            j + 1,
            substitutions(s)
        )],
    }
}

/// The proof tree as a JSON document with sorted keys.
pub fn render_machine(proof: &Proof) -> String {
    let doc = json!({
        "verdict": proof.verdict,
        "timed_out": proof.timed_out,
        "verification_error": proof.verification_error,
        "proof": machine_node(&proof.root),
    });
    serde_json::to_string_pretty(&doc).expect("plain JSON values")
}

fn machine_node(node: &ProofNode) -> Value {
    let problem: Vec<String> = node.problem.adps().iter().map(|a| a.to_string()).collect();
    let mut v = json!({ "problem": problem, "classical": node.problem.is_classical() });
    let obj = v.as_object_mut().expect("object literal");
    match &node.outcome {
        Outcome::Solved => {
            obj.insert("outcome".into(), json!("solved"));
        }
        Outcome::Step { processor, justification, children } => {
            obj.insert("outcome".into(), json!("step"));
            obj.insert("processor".into(), json!(processor));
            obj.insert("justification".into(), machine_justification(justification));
            obj.insert("children".into(), Value::Array(children.iter().map(machine_node).collect()));
        }
        Outcome::Open { last_attempted, timed_out } => {
            obj.insert("outcome".into(), json!("open"));
            obj.insert("last_attempted".into(), json!(last_attempted));
            obj.insert("timed_out".into(), json!(timed_out));
        }
    }
    v
}

fn subs_json(subs: &[Substitution]) -> Value {
    json!(subs.iter().map(|s| s.to_string()).collect::<Vec<_>>())
}

fn machine_justification(j: &Justification) -> Value {
    match j {
        Justification::DependencyGraph { edges, sccs } => json!({ "edges": edges, "sccs": sccs }),
        Justification::UsableTerms { removed } => {
            let r: Vec<Value> =
                removed.iter().map(|(i, j, p)| json!({ "adp": i, "term": j, "position": p.to_string() })).collect();
            json!({ "removed": r })
        }
        Justification::UsableRules { deflagged } => json!({ "deflagged": deflagged }),
        Justification::ReductionPair { interpretation, strict } => {
            json!({ "interpretation": interpretation.lines(), "strict": strict })
        }
        Justification::ProbabilityRemoval { dps, np } => json!({
            "dependency_pairs": dps.iter().map(|(l, r)| format!("{l} -> {r}")).collect::<Vec<_>>(),
            "rules": np.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        }),
        Justification::Rewriting { adp, j, pos, rule, condition } => json!({
            "adp": adp, "term": j, "position": pos.to_string(), "rule": rule, "condition": condition,
        }),
        Justification::Instantiation { adp, substitutions } | Justification::ForwardInstantiation { adp, substitutions } => {
            json!({ "adp": adp, "substitutions": subs_json(substitutions) })
        }
        Justification::RuleOverlap { adp, j, pos, substitutions } => json!({
            "adp": adp, "term": j, "position": pos.to_string(), "substitutions": subs_json(substitutions),
        }),
    }
}
