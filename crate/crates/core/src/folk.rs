//! Which plays can an equilibrium produce? On acyclic games the exact answer
//! comes from the backward-induction oracle; on any game, the viability
//! labels predict it. This module enumerates the viability side exhaustively
//! and cross-checks the two answers against each other.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::alpha::{self, AlphaLabels};
use crate::error::{Error, Result};
use crate::game::{GameGraph, Lasso, PayoffVector, VertexId};
use crate::verify;

/// Hard ceilings for the play enumeration. A graph of any size can hide
/// exponentially many lassos, so the walk refuses outright when asked for
/// bounds beyond these, and aborts if the search itself outgrows the node
/// budget.
#[derive(Clone, Copy, Debug)]
pub struct EnumerationLimits {
    /// Largest admissible `max_prefix` request, in edges.
    pub max_prefix: usize,
    /// Largest admissible `max_cycle` request, in edges.
    pub max_cycle: usize,
    /// Total walk-tree nodes the search may expand.
    pub max_nodes: usize,
}

impl Default for EnumerationLimits {
    fn default() -> EnumerationLimits {
        EnumerationLimits { max_prefix: 16, max_cycle: 12, max_nodes: 200_000 }
    }
}

/// The plays from one vertex that give every visited mover at least their
/// label, listed exhaustively up to the stated bounds.
#[derive(Clone, Debug)]
pub struct ViablePlaySet {
    /// Canonical lassos with their payoffs, in lasso order.
    pub plays: Vec<(Lasso, PayoffVector)>,
    /// The `(max_prefix, max_cycle)` the enumeration ran with.
    pub bounds: (usize, usize),
}

impl ViablePlaySet {
    pub fn contains(&self, lasso: &Lasso) -> bool {
        self.plays.iter().any(|(l, _)| l == lasso)
    }

    pub fn lassos(&self) -> BTreeSet<Lasso> {
        self.plays.iter().map(|(l, _)| l.clone()).collect()
    }
}

/// Enumerates every canonical lasso from `from` with prefix at most
/// `max_prefix` edges and cycle at most `max_cycle` edges that is viable for
/// `labels`, under the default limits.
pub fn enumerate_viable(
    g: &GameGraph,
    labels: &AlphaLabels,
    from: VertexId,
    max_prefix: usize,
    max_cycle: usize,
) -> Result<ViablePlaySet> {
    enumerate_viable_with(g, labels, from, max_prefix, max_cycle, EnumerationLimits::default())
}

/// Same as [`enumerate_viable`] with explicit limits.
pub fn enumerate_viable_with(
    g: &GameGraph,
    labels: &AlphaLabels,
    from: VertexId,
    max_prefix: usize,
    max_cycle: usize,
    limits: EnumerationLimits,
) -> Result<ViablePlaySet> {
    if max_prefix > limits.max_prefix || max_cycle > limits.max_cycle {
        return Err(Error::CapExceeded(format!(
            "requested bounds ({max_prefix}, {max_cycle}) exceed the enumeration limits ({}, {})",
            limits.max_prefix, limits.max_cycle
        )));
    }
    let mut walk = PlayWalk {
        g,
        labels,
        max_prefix,
        max_cycle,
        budget: limits.max_nodes,
        start: from,
        actions: Vec::new(),
        first_seen: BTreeMap::new(),
        out: BTreeMap::new(),
    };
    if !g.is_terminal(from) {
        walk.first_seen.insert(from, 0);
    }
    walk.dfs(from, false)?;
    Ok(ViablePlaySet {
        plays: walk.out.into_iter().collect(),
        bounds: (max_prefix, max_cycle),
    })
}

/// Depth-first walk over canonical lassos: vertices stay pairwise distinct
/// until either a revisit closes a cycle (ending the lasso there) or the
/// walk passes through its one allowed revisit and continues over fresh
/// vertices to a terminal.
struct PlayWalk<'a> {
    g: &'a GameGraph,
    labels: &'a AlphaLabels,
    max_prefix: usize,
    max_cycle: usize,
    budget: usize,
    start: VertexId,
    actions: Vec<usize>,
    first_seen: BTreeMap<VertexId, usize>,
    out: BTreeMap<Lasso, PayoffVector>,
}

impl PlayWalk<'_> {
    fn emit(&mut self, lasso: Lasso) -> Result<()> {
        debug_assert!(lasso.is_canonical(self.g)?);
        if alpha::is_viable(self.g, self.labels, &lasso)? {
            let payoff = self.g.evaluate_payoff(&lasso)?;
            self.out.insert(lasso, payoff);
        }
        Ok(())
    }

    fn dfs(&mut self, cur: VertexId, repeated: bool) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::CapExceeded(
                "play enumeration exhausted its node budget".to_string(),
            ));
        }
        self.budget -= 1;
        if self.g.is_terminal(cur) {
            if self.actions.len() <= self.max_prefix {
                self.emit(Lasso::terminal(self.g, self.start, self.actions.clone())?)?;
            }
            return Ok(());
        }
        if self.actions.len() > self.max_prefix + self.max_cycle {
            return Ok(()); // nothing this deep can still satisfy the bounds
        }
        for a in 0..self.g.actions(cur).len() {
            let target = self.g.actions(cur)[a].target;
            match self.first_seen.get(&target).copied() {
                None => {
                    self.actions.push(a);
                    if !self.g.is_terminal(target) {
                        self.first_seen.insert(target, self.actions.len());
                    }
                    self.dfs(target, repeated)?;
                    self.first_seen.remove(&target);
                    self.actions.pop();
                }
                Some(entry) if !repeated => {
                    // Closing the walk into its own tail makes a cycle...
                    let prefix_len = entry;
                    let cycle_len = self.actions.len() + 1 - entry;
                    if prefix_len <= self.max_prefix && cycle_len <= self.max_cycle {
                        let prefix = self.actions[..prefix_len].to_vec();
                        let mut cycle = self.actions[prefix_len..].to_vec();
                        cycle.push(a);
                        self.emit(Lasso::cycle(self.g, self.start, prefix, cycle)?)?;
                    }
                    // ...and passing through the revisit instead may still
                    // reach a terminal over fresh vertices.
                    self.actions.push(a);
                    self.dfs(target, true)?;
                    self.actions.pop();
                }
                Some(_) => {} // a second revisit is never canonical
            }
        }
        Ok(())
    }
}

/// The two answers to "which plays can an equilibrium produce", compared.
#[derive(Clone, Debug)]
pub struct FolkReport {
    /// Plays the backward-induction oracle found but viability rejects.
    pub oracle_only: Vec<Lasso>,
    /// Viable plays no equilibrium induces.
    pub viable_only: Vec<Lasso>,
    /// True when both difference sets are empty.
    pub agree: bool,
}

/// Cross-checks, on an acyclic game, the exact equilibrium play set from
/// backward induction against the viable plays from the root.
pub fn folk_crosscheck(g: &GameGraph) -> Result<FolkReport> {
    let depth = g.depth().ok_or(Error::CyclicGame)?;
    let oracle = verify::finite_horizon_spe(g)?;
    let labels = alpha::alpha_fixed_point(g)?.labels;
    let viable = enumerate_viable(g, &labels, g.root(), depth, 0)?;

    let oracle_plays: BTreeSet<Lasso> = oracle.plays.keys().cloned().collect();
    let viable_plays = viable.lassos();
    let oracle_only: Vec<Lasso> =
        oracle_plays.difference(&viable_plays).cloned().collect();
    let viable_only: Vec<Lasso> =
        viable_plays.difference(&oracle_plays).cloned().collect();
    let agree = oracle_only.is_empty() && viable_only.is_empty();
    Ok(FolkReport { oracle_only, viable_only, agree })
}
