//! Deterministic DOT renderings of game graphs.
//!
//! The output is a pure function of its inputs — vertices in id order, edges
//! in declaration order — so exports are byte-stable and can be diffed or
//! pinned as goldens.

use std::collections::BTreeSet;

use crate::alpha::AlphaLabels;
use crate::game::{GameGraph, VertexId};
use crate::spe::ThreatTable;

/// Renders the graph, annotating decision vertices as `id|mover|label` when
/// labels are supplied and thickening every edge that occurs in a threat
/// play when a table is supplied.
pub fn export_dot(
    g: &GameGraph,
    labels: Option<&AlphaLabels>,
    threats: Option<&ThreatTable>,
) -> String {
    let mut out = String::from("digraph game {\n  rankdir=LR;\n");
    for v in g.vertices() {
        let name = dot_name(g.id(v));
        if let Some(p) = g.terminal_payoff(v) {
            out.push_str(&format!(
                "  {name} [shape=box label=\"{}|{}\"];\n",
                g.id(v),
                p
            ));
        } else {
            let mover = g.controller(v).expect("decision vertex has a mover");
            let text = match labels.and_then(|l| l.get(v)) {
                Some(q) => format!("{}|{}|{}", g.id(v), mover, q),
                None => format!("{}|{}", g.id(v), mover),
            };
            out.push_str(&format!("  {name} [label=\"{text}\"];\n"));
        }
    }
    let mut highlighted: BTreeSet<(VertexId, usize)> = BTreeSet::new();
    if let Some(table) = threats {
        for (_, play) in table.entries() {
            let verts = play.prefix_vertices(g).expect("threat play fits its game");
            let actions = play.step_actions();
            for (i, &a) in actions.iter().take(play.prefix_len()).enumerate() {
                highlighted.insert((verts[i], a));
            }
            for (v, a) in play.cycle_steps(g).expect("threat play fits its game") {
                highlighted.insert((v, a));
            }
        }
    }
    for v in g.vertices() {
        for (i, action) in g.actions(v).iter().enumerate() {
            let style = if highlighted.contains(&(v, i)) {
                " penwidth=2"
            } else {
                ""
            };
            out.push_str(&format!(
                "  {} -> {} [label=\"{}\"{style}];\n",
                dot_name(g.id(v)),
                dot_name(g.id(action.target)),
                action.label
            ));
        }
    }
    out.push('}');
    out.push('\n');
    out
}

/// Quotes a vertex id unless it is already a safe bare DOT identifier.
fn dot_name(id: &str) -> String {
    let bare = !id.is_empty()
        && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !id.starts_with(|c: char| c.is_ascii_digit());
    if bare {
        id.to_string()
    } else {
        format!("\"{}\"", id.replace('"', "\\\""))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpha::alpha_fixed_point;
    use crate::scenarios;
    use crate::spe::threat_table;

    #[test]
    fn annotated_export_carries_labels_and_highlights() {
        let g = scenarios::g1();
        let labels = alpha_fixed_point(&g).unwrap().labels;
        let threats = threat_table(&g, &labels).unwrap();
        let dot = export_dot(&g, Some(&labels), Some(&threats));
        assert!(dot.contains("v1 [label=\"v1|P1|1\"]"), "{dot}");
        assert!(dot.contains("v2 [label=\"v2|P2|1\"]"));
        assert!(dot.contains("t1 [shape=box label=\"t1|(1, 3)\"]"));
        assert!(dot.contains("penwidth=2"));
        // Byte-stable: a fresh computation renders identically.
        let again = export_dot(
            &g,
            Some(&alpha_fixed_point(&g).unwrap().labels),
            Some(&threat_table(&g, &alpha_fixed_point(&g).unwrap().labels).unwrap()),
        );
        assert_eq!(dot, again);
    }

    #[test]
    fn plain_export_omits_labels_and_highlights() {
        let g = scenarios::g1();
        let dot = export_dot(&g, None, None);
        assert!(dot.contains("v1 [label=\"v1|P1\"]"));
        assert!(!dot.contains("penwidth"));
        let labeled = export_dot(&g, Some(&alpha_fixed_point(&g).unwrap().labels), None);
        assert!(!labeled.contains("penwidth"));
    }

    #[test]
    fn uncertified_games_still_render() {
        let g = scenarios::counterexample();
        let dot = export_dot(&g, None, None);
        assert!(dot.contains("v1 [label=\"v1|P1\"]"));
        assert!(dot.contains("v2 [label=\"v2|P2\"]"));
    }
}
