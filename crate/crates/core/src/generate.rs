//! Seeded random game generators backing the property-test harnesses.
//!
//! Everything here is a pure function of the passed RNG, so a fixed seed
//! reproduces the exact same game on every platform.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::game::{GameBuilder, GameGraph, PlayerId};
use crate::rational::Q;

/// The RNG used by all generators, constructed from a bare seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn draw_player(rng: &mut ChaCha8Rng) -> PlayerId {
    if rng.gen::<bool>() {
        PlayerId::P1
    } else {
        PlayerId::P2
    }
}

fn action_label(i: usize) -> String {
    ((b'a' + i as u8) as char).to_string()
}

struct TreeSink {
    decisions: Vec<(String, PlayerId, Vec<(String, String)>)>,
    terminals: Vec<(String, Q, Q)>,
    counter: usize,
}

impl TreeSink {
    fn fresh(&mut self, prefix: &str) -> String {
        let id = format!("{prefix}{:03}", self.counter);
        self.counter += 1;
        id
    }

    fn build(self, root: &str) -> GameGraph {
        let mut b = GameBuilder::new();
        for (id, u1, u2) in &self.terminals {
            b = b.terminal(id, *u1, *u2);
        }
        for (id, mover, actions) in &self.decisions {
            let refs: Vec<(&str, &str)> =
                actions.iter().map(|(l, t)| (l.as_str(), t.as_str())).collect();
            b = b.decision(id, *mover, &refs);
        }
        b.root(root)
            .infinite_constant(Q::from_integer(0), Q::from_integer(0))
            .build()
            .expect("generated tree is well-formed")
    }
}

fn grow_tree(
    rng: &mut ChaCha8Rng,
    sink: &mut TreeSink,
    depth_left: usize,
    max_branching: usize,
    draw_payoff: &mut impl FnMut(&mut ChaCha8Rng) -> (Q, Q),
    force_decision: bool,
) -> String {
    let leaf = depth_left == 0 || (!force_decision && rng.gen_ratio(2, 5));
    if leaf {
        let id = sink.fresh("t");
        let (u1, u2) = draw_payoff(rng);
        sink.terminals.push((id.clone(), u1, u2));
        return id;
    }
    let id = sink.fresh("v");
    let mover = draw_player(rng);
    let n = rng.gen_range(1..=max_branching);
    let mut actions = Vec::with_capacity(n);
    for i in 0..n {
        let child = grow_tree(rng, sink, depth_left - 1, max_branching, draw_payoff, false);
        actions.push((action_label(i), child));
    }
    sink.decisions.push((id.clone(), mover, actions));
    id
}

fn tree_with(
    rng: &mut ChaCha8Rng,
    max_depth: usize,
    max_branching: usize,
    mut draw_payoff: impl FnMut(&mut ChaCha8Rng) -> (Q, Q),
) -> GameGraph {
    assert!(max_depth >= 1 && max_branching >= 1);
    let mut sink = TreeSink { decisions: Vec::new(), terminals: Vec::new(), counter: 0 };
    let root = grow_tree(rng, &mut sink, max_depth, max_branching, &mut draw_payoff, true);
    sink.build(&root)
}

/// A random finite tree game: depth at most `max_depth` edges, between 1 and
/// `max_branching` actions per vertex, random movers, integer payoffs drawn
/// uniformly from `0..=max_payoff`. Non-termination pays (0, 0), so the
/// result is always certified.
pub fn random_tree(
    rng: &mut ChaCha8Rng,
    max_depth: usize,
    max_branching: usize,
    max_payoff: i64,
) -> GameGraph {
    tree_with(rng, max_depth, max_branching, |rng| {
        (
            Q::from_integer(rng.gen_range(0..=max_payoff)),
            Q::from_integer(rng.gen_range(0..=max_payoff)),
        )
    })
}

/// Like [`random_tree`], but every terminal's payoffs sum to `total` — the
/// strictly competitive case where equilibrium payoffs must match the
/// zero-sum values.
pub fn random_constant_sum_tree(
    rng: &mut ChaCha8Rng,
    max_depth: usize,
    max_branching: usize,
    total: i64,
) -> GameGraph {
    assert!(total >= 0);
    tree_with(rng, max_depth, max_branching, |rng| {
        let u1 = rng.gen_range(0..=total);
        (Q::from_integer(u1), Q::from_integer(total - u1))
    })
}

/// A random cyclic game: up to `max_vertices` vertices in total, terminal
/// payoffs drawn from `1..=4`, non-termination worth (0, 0) — dominated by
/// every terminal, so the game is always certified. Regenerates until the
/// graph actually contains a cycle.
pub fn random_recursive_game(rng: &mut ChaCha8Rng, max_vertices: usize) -> GameGraph {
    assert!(max_vertices >= 3);
    for _ in 0..1000 {
        let n_dec = rng.gen_range(2..=(max_vertices - 1).min(6));
        let n_term = rng.gen_range(1..=(max_vertices - n_dec).min(3));
        let mut b = GameBuilder::new();
        for t in 0..n_term {
            b = b.terminal(
                &format!("t{t}"),
                Q::from_integer(rng.gen_range(1..=4)),
                Q::from_integer(rng.gen_range(1..=4)),
            );
        }
        for v in 0..n_dec {
            let n_act = rng.gen_range(1..=3);
            let mut actions = Vec::with_capacity(n_act);
            for a in 0..n_act {
                let pick = rng.gen_range(0..n_dec + n_term);
                let target = if pick < n_dec {
                    format!("v{pick}")
                } else {
                    format!("t{}", pick - n_dec)
                };
                actions.push((action_label(a), target));
            }
            let refs: Vec<(&str, &str)> =
                actions.iter().map(|(l, t)| (l.as_str(), t.as_str())).collect();
            b = b.decision(&format!("v{v}"), draw_player(rng), &refs);
        }
        let g = b
            .root("v0")
            .infinite_constant(Q::from_integer(0), Q::from_integer(0))
            .build()
            .expect("generated graph is well-formed");
        if !g.is_acyclic() {
            return g;
        }
    }
    unreachable!("a thousand draws without a cycle")
}
