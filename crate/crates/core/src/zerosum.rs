//! Per-player guaranteed values.
//!
//! For each player `i` in turn, the whole graph is read as a zero-sum game in
//! which `i` maximizes their own payoff coordinate and the other player
//! minimizes it. The value of that game at a vertex is what `i` can guarantee
//! from there against a fully adversarial opponent; these labels are the base
//! layer of the viability fixed point.
//!
//! Values are the least fixed point of the Bellman operator, iterated
//! jointly (Jacobi style) from the bottom element that maps every decision
//! vertex to the non-termination payoff. The iteration is monotone because
//! every terminal payoff dominates that constant (the certified
//! lower-semi-continuity of the payoff structure), so it stabilizes after at
//! most `|V| * |payoff values|` rounds.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::game::{GameGraph, Lasso, PlayerId, VertexId};
use crate::rational::Q;

/// One player's guaranteed value at every vertex. At a terminal the value is
/// simply that player's payoff coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueLabels {
    player: PlayerId,
    values: Vec<Q>,
}

impl ValueLabels {
    pub fn player(&self) -> PlayerId {
        self.player
    }

    pub fn get(&self, v: VertexId) -> Q {
        self.values[v.index()]
    }
}

/// A deterministic memoryless strategy: one chosen action index per vertex
/// controlled by `player`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositionalStrategy {
    player: PlayerId,
    choice: BTreeMap<VertexId, usize>,
}

impl PositionalStrategy {
    pub fn player(&self) -> PlayerId {
        self.player
    }

    /// The chosen action index at `v`; `None` if `v` is not this player's.
    pub fn action(&self, v: VertexId) -> Option<usize> {
        self.choice.get(&v).copied()
    }
}

/// Everything the zero-sum analysis of one player produces: the value labels,
/// a maximizing strategy for that player that guarantees at least the label
/// against every opponent behavior, a minimizing strategy for the opponent
/// that caps the payoff at the label, and the number of Bellman rounds until
/// stabilization.
pub struct ZeroSumSolution {
    pub labels: ValueLabels,
    pub max_strategy: PositionalStrategy,
    pub min_strategy: PositionalStrategy,
    pub rounds: usize,
}

/// Bellman iteration from the bottom element. Returns final values, the
/// round at which each vertex last changed (its "settling round"), and the
/// number of rounds until no change.
fn iterate(g: &GameGraph, player: PlayerId) -> Result<(Vec<Q>, Vec<usize>, usize)> {
    g.require_lsc()?;
    let c = g.constant_infinite()?.get(player);
    let n = g.vertex_count();
    let mut cur: Vec<Q> = g
        .vertices()
        .map(|v| match g.terminal_payoff(v) {
            Some(p) => p.get(player),
            None => c,
        })
        .collect();
    let mut settled = vec![0usize; n];

    let bound = n * g.payoff_values().len() + 2;
    for round in 1..=bound {
        let mut next = cur.clone();
        let mut changed = false;
        for v in g.vertices() {
            if g.is_terminal(v) {
                continue;
            }
            let succ = g.actions(v).iter().map(|a| cur[a.target.index()]);
            let val = if g.controller(v)? == player {
                succ.max()
            } else {
                succ.min()
            }
            .expect("decision vertices have actions");
            if val != cur[v.index()] {
                next[v.index()] = val;
                settled[v.index()] = round;
                changed = true;
            }
        }
        if !changed {
            return Ok((cur, settled, round - 1));
        }
        cur = next;
    }
    // Unreachable for monotone iterations; kept as a defensive bound.
    Err(Error::InconsistentLabels(format!(
        "value iteration for {player} did not stabilize within {bound} rounds"
    )))
}

/// The guaranteed values of `player` at every vertex.
pub fn value_labels(g: &GameGraph, player: PlayerId) -> Result<ValueLabels> {
    let (values, _, _) = iterate(g, player)?;
    Ok(ValueLabels { player, values })
}

/// Values plus witness strategies for both sides of `player`'s zero-sum view.
///
/// The maximizing strategy picks, among value-preserving actions, one whose
/// target settled earliest in the iteration. That tie-break is what makes the
/// guarantee real: following ever-earlier settling rounds forces the play out
/// of value-neutral cycles and into a terminal whenever the current label
/// exceeds the non-termination payoff. The minimizing strategy needs no such
/// care; any pointwise argmin of the fixed point works.
pub fn solve(g: &GameGraph, player: PlayerId) -> Result<ZeroSumSolution> {
    let (values, settled, rounds) = iterate(g, player)?;
    let mut max_choice = BTreeMap::new();
    let mut min_choice = BTreeMap::new();
    for v in g.vertices() {
        if g.is_terminal(v) {
            continue;
        }
        let acts = g.actions(v);
        if g.controller(v)? == player {
            let mut best: Option<(usize, usize)> = None;
            for (i, a) in acts.iter().enumerate() {
                if values[a.target.index()] == values[v.index()] {
                    let r = settled[a.target.index()];
                    if best.map_or(true, |(br, _)| r < br) {
                        best = Some((r, i));
                    }
                }
            }
            // The fixed point guarantees a value-preserving action exists.
            let (_, idx) = best.ok_or_else(|| {
                Error::InconsistentLabels(format!(
                    "no value-preserving action at `{}`",
                    g.id(v)
                ))
            })?;
            max_choice.insert(v, idx);
        } else {
            let idx = (0..acts.len())
                .min_by_key(|&i| values[acts[i].target.index()])
                .expect("decision vertices have actions");
            min_choice.insert(v, idx);
        }
    }
    Ok(ZeroSumSolution {
        labels: ValueLabels { player, values },
        max_strategy: PositionalStrategy { player, choice: max_choice },
        min_strategy: PositionalStrategy { player: player.opponent(), choice: min_choice },
        rounds,
    })
}

/// The unique play that unfolds from `from` when both sides follow the
/// solution's strategies; it either terminates or closes a cycle.
pub fn induced_play(g: &GameGraph, sol: &ZeroSumSolution, from: VertexId) -> Result<Lasso> {
    let mut first_seen: BTreeMap<VertexId, usize> = BTreeMap::new();
    let mut actions: Vec<usize> = Vec::new();
    let mut cur = from;
    loop {
        if g.is_terminal(cur) {
            return Lasso::terminal(g, from, actions);
        }
        if let Some(&first) = first_seen.get(&cur) {
            let cycle = actions.split_off(first);
            return Lasso::cycle(g, from, actions, cycle);
        }
        first_seen.insert(cur, actions.len());
        let strat = if g.controller(cur)? == sol.max_strategy.player {
            &sol.max_strategy
        } else {
            &sol.min_strategy
        };
        let a = strat.action(cur).expect("solution covers every decision vertex");
        cur = g.actions(cur)[a].target;
        actions.push(a);
    }
}
