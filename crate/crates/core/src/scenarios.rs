//! Bundled example games, compiled into the library so tests and the demo
//! command work without touching the filesystem. The same files ship in the
//! repository's `scenarios/` directory for use with the CLI.

use crate::game::GameGraph;

pub const G1: &str = include_str!("../../../scenarios/g1.game");
pub const SINGLE: &str = include_str!("../../../scenarios/single.game");
pub const TIE: &str = include_str!("../../../scenarios/tie.game");
pub const ACYCLIC2: &str = include_str!("../../../scenarios/acyclic2.game");
pub const CYCLIC6: &str = include_str!("../../../scenarios/cyclic6.game");
pub const COUNTEREXAMPLE: &str = include_str!("../../../scenarios/counterexample.game");

/// Name/source pairs of every bundled scenario, in catalog order.
pub const ALL: &[(&str, &str)] = &[
    ("g1", G1),
    ("single", SINGLE),
    ("tie", TIE),
    ("acyclic2", ACYCLIC2),
    ("cyclic6", CYCLIC6),
    ("counterexample", COUNTEREXAMPLE),
];

fn must(text: &str) -> GameGraph {
    GameGraph::load(text).expect("bundled scenario parses")
}

/// Two players pushing a token around a 2-cycle, each able to stop at a
/// terminal that favors the other; non-termination pays (0, 0).
pub fn g1() -> GameGraph {
    must(G1)
}

/// One decision vertex, one action, one terminal.
pub fn single() -> GameGraph {
    must(SINGLE)
}

/// One mover indifferent between two terminals with equal own payoff.
pub fn tie() -> GameGraph {
    must(TIE)
}

/// Depth-2 acyclic game with a second-stage tie.
pub fn acyclic2() -> GameGraph {
    must(ACYCLIC2)
}

/// Three-vertex cycle where every stopping terminal is someone's best offer.
pub fn cyclic6() -> GameGraph {
    must(CYCLIC6)
}

/// The tail-table game whose unique equilibrium payoff is not reachable by
/// the constant-rule machinery; not certified for the solver.
pub fn counterexample() -> GameGraph {
    must(COUNTEREXAMPLE)
}
