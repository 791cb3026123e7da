//! The viability fixed point.
//!
//! A play is *viable* for a labeling `α` when every decision vertex it
//! visits is content: the mover there receives at least their label from the
//! play's payoff. The solver's central object is the least labeling that is
//! closed under one step of best-response reasoning:
//!
//! > `α_{k+1}(h) = max over actions a of (the minimum payoff the mover at h
//! > can be held to, over plays from the successor that are viable for α_k)`
//!
//! starting from `α_1 =` each mover's zero-sum guaranteed value at their own
//! vertices. The iteration is monotone and stabilizes after at most
//! `|V| * |payoff values|` rounds; its fixed point `α*` is what the threat
//! construction in [`crate::spe`] is built on.
//!
//! Minima over viable plays are computed exactly by outcome-class analysis:
//! a play's payoff is decided by where it ends up (a terminal, or looping
//! forever), so it suffices to check, per outcome, whether the outcome is
//! reachable through vertices whose labels that outcome satisfies.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::game::{GameGraph, Lasso, PayoffVector, PlayerId, VertexId};
use crate::rational::Q;
use crate::zerosum;

/// A rational label per decision vertex. Terminals carry no label: no one
/// moves there, so there is no one to be content or not.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphaLabels {
    values: BTreeMap<VertexId, Q>,
}

impl AlphaLabels {
    /// The label of `v`; `None` for terminals.
    pub fn get(&self, v: VertexId) -> Option<Q> {
        self.values.get(&v).copied()
    }

    /// `(vertex, label)` pairs in vertex-id order.
    pub fn entries(&self) -> impl Iterator<Item = (VertexId, Q)> + '_ {
        self.values.iter().map(|(&v, &q)| (v, q))
    }

    /// The same label at every decision vertex; handy for what-if analyses
    /// on games the solver refuses.
    pub fn constant(g: &GameGraph, value: Q) -> AlphaLabels {
        AlphaLabels {
            values: g.decision_vertices().into_iter().map(|v| (v, value)).collect(),
        }
    }

    /// Explicit labels by vertex id; must cover exactly the decision
    /// vertices.
    pub fn from_entries(g: &GameGraph, entries: &[(&str, Q)]) -> Result<AlphaLabels> {
        let mut values = BTreeMap::new();
        for (id, q) in entries {
            let v = g.require_vertex(id)?;
            if g.is_terminal(v) {
                return Err(Error::TerminalVertex(id.to_string()));
            }
            values.insert(v, *q);
        }
        if values.len() != g.decision_vertices().len() {
            return Err(Error::Parse("labels must cover every decision vertex".into()));
        }
        Ok(AlphaLabels { values })
    }

    pub fn pointwise_le(&self, other: &AlphaLabels) -> bool {
        self.values
            .iter()
            .all(|(v, q)| other.values.get(v).map_or(false, |o| q <= o))
    }
}

/// The base labeling: each decision vertex gets its own mover's zero-sum
/// guaranteed value there.
pub fn alpha_one(g: &GameGraph) -> Result<AlphaLabels> {
    let p1 = zerosum::value_labels(g, PlayerId::P1)?;
    let p2 = zerosum::value_labels(g, PlayerId::P2)?;
    let mut values = BTreeMap::new();
    for v in g.decision_vertices() {
        let q = match g.controller(v)? {
            PlayerId::P1 => p1.get(v),
            PlayerId::P2 => p2.get(v),
        };
        values.insert(v, q);
    }
    Ok(AlphaLabels { values })
}

/// Does the play leave every visited mover with at least their label?
///
/// This is a pure play-level predicate: it works on any game the payoff
/// function can score, including ones the solver itself refuses.
pub fn is_viable(g: &GameGraph, labels: &AlphaLabels, lasso: &Lasso) -> Result<bool> {
    let p = g.evaluate_payoff(lasso)?;
    for h in lasso.visited_decision_vertices(g)? {
        let lab = labels.get(h).expect("labels cover decision vertices");
        if lab > p.get(g.controller(h)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Are the labels non-decreasing along each player's own visits? Only
/// consecutive vertices of the *same* mover are compared — a label may drop
/// when the turn passes to the other player, whose floor is independent.
/// The cycle is unrolled twice so that a player's step from their last
/// vertex in one period to their first in the next is also checked; a
/// single unrolling would miss it.
pub fn is_monotonic(g: &GameGraph, labels: &AlphaLabels, lasso: &Lasso) -> Result<bool> {
    let seq = lasso.decision_sequence(g, 2)?;
    let mut last: BTreeMap<PlayerId, Q> = BTreeMap::new();
    for h in seq {
        let mover = g.controller(h)?;
        let lab = labels.get(h).expect("labels cover decision vertices");
        if let Some(prev) = last.insert(mover, lab) {
            if prev > lab {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum OutcomeKind {
    Terminal(VertexId),
    Cycle,
}

#[derive(Clone, Copy, Debug)]
struct OutcomeClass {
    payoff: PayoffVector,
    kind: OutcomeKind,
}

/// Decision vertices whose movers are content with payoff `p`.
fn allowed_set(g: &GameGraph, labels: &AlphaLabels, p: PayoffVector) -> BTreeSet<VertexId> {
    g.decision_vertices()
        .into_iter()
        .filter(|&v| {
            let lab = labels.get(v).expect("labels cover decision vertices");
            lab <= p.get(g.controller(v).expect("decision vertex"))
        })
        .collect()
}

/// Can a play from `from` end at terminal `t` while keeping every visited
/// mover content with `t`'s payoff?
fn terminal_reachable(
    g: &GameGraph,
    labels: &AlphaLabels,
    from: VertexId,
    p: PayoffVector,
    t: VertexId,
) -> bool {
    let allowed = allowed_set(g, labels, p);
    if !allowed.contains(&from) {
        return false;
    }
    let mut seen = BTreeSet::from([from]);
    let mut stack = vec![from];
    while let Some(x) = stack.pop() {
        for a in g.actions(x) {
            if a.target == t {
                return true;
            }
            if allowed.contains(&a.target) && seen.insert(a.target) {
                stack.push(a.target);
            }
        }
    }
    false
}

/// Can a play from `from` loop forever while keeping every visited mover
/// content with the non-termination payoff `c`? True iff some cycle lies in
/// the `c`-allowed region reachable from `from` through that region.
fn cycle_reachable(g: &GameGraph, labels: &AlphaLabels, from: VertexId, c: PayoffVector) -> bool {
    let allowed = allowed_set(g, labels, c);
    if !allowed.contains(&from) {
        return false;
    }
    let mut region = BTreeSet::from([from]);
    let mut stack = vec![from];
    while let Some(x) = stack.pop() {
        for a in g.actions(x) {
            if allowed.contains(&a.target) && region.insert(a.target) {
                stack.push(a.target);
            }
        }
    }
    // Three-color DFS restricted to the region.
    let mut color: BTreeMap<VertexId, u8> = BTreeMap::new();
    for &s in &region {
        if color.get(&s).copied().unwrap_or(0) != 0 {
            continue;
        }
        let mut stack: Vec<(VertexId, usize)> = vec![(s, 0)];
        color.insert(s, 1);
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            let succ: Vec<VertexId> = g
                .actions(v)
                .iter()
                .map(|a| a.target)
                .filter(|t| region.contains(t))
                .collect();
            if *next < succ.len() {
                let t = succ[*next];
                *next += 1;
                match color.get(&t).copied().unwrap_or(0) {
                    0 => {
                        color.insert(t, 1);
                        stack.push((t, 0));
                    }
                    1 => return true,
                    _ => {}
                }
            } else {
                color.insert(v, 2);
                stack.pop();
            }
        }
    }
    false
}

/// Every outcome some viable play from `from` can realize, with its payoff.
fn achievable_classes(
    g: &GameGraph,
    labels: &AlphaLabels,
    from: VertexId,
) -> Result<Vec<OutcomeClass>> {
    g.require_lsc()?;
    if let Some(p) = g.terminal_payoff(from) {
        return Ok(vec![OutcomeClass { payoff: p, kind: OutcomeKind::Terminal(from) }]);
    }
    let mut out = Vec::new();
    for t in g.vertices() {
        let Some(p) = g.terminal_payoff(t) else { continue };
        if terminal_reachable(g, labels, from, p, t) {
            out.push(OutcomeClass { payoff: p, kind: OutcomeKind::Terminal(t) });
        }
    }
    let c = g.constant_infinite()?;
    if cycle_reachable(g, labels, from, c) {
        out.push(OutcomeClass { payoff: c, kind: OutcomeKind::Cycle });
    }
    Ok(out)
}

/// The minimum `player` can be held to over plays from `from` that are
/// viable for `labels`. Errors with [`Error::EmptyViability`] when no viable
/// play exists at all.
pub fn viable_min(
    g: &GameGraph,
    labels: &AlphaLabels,
    from: VertexId,
    player: PlayerId,
) -> Result<Q> {
    achievable_classes(g, labels, from)?
        .iter()
        .map(|cl| cl.payoff.get(player))
        .min()
        .ok_or_else(|| Error::EmptyViability(g.id(from).to_string()))
}

/// What a witness search is looking for: a play paying one player exactly
/// `m`, or a play with one exact payoff vector.
#[derive(Clone, Copy)]
enum Target {
    Coord(PlayerId, Q),
    Exact(PayoffVector),
}

impl Target {
    fn admits(&self, p: PayoffVector) -> bool {
        match *self {
            Target::Coord(player, m) => p.get(player) == m,
            Target::Exact(t) => p == t,
        }
    }
}

/// Depth-first search for the lexicographically least canonical viable play
/// from `start` whose payoff matches the target. Actions are tried in
/// declared order and cycles close at the first revisit, so the first play
/// emitted is the least one.
struct WitnessSearch<'a> {
    g: &'a GameGraph,
    labels: &'a AlphaLabels,
    target: Target,
    /// Union of the allowed sets of every target-matching outcome class; no
    /// viable target-matching play leaves it.
    allowed: BTreeSet<VertexId>,
    /// Set when looping forever matches the target.
    cycle_payoff: Option<PayoffVector>,
    start: VertexId,
    actions: Vec<usize>,
    verts: Vec<VertexId>,
    pos: BTreeMap<VertexId, usize>,
}

impl WitnessSearch<'_> {
    /// `r1`/`r2` carry the largest label of any visited vertex of each
    /// player: the play built so far is viable for a payoff `p` exactly when
    /// `p >= (r1, r2)` componentwise.
    fn dfs(&mut self, cur: VertexId, repeated: bool, mut r1: Q, mut r2: Q) -> Result<Option<Lasso>> {
        let lab = self.labels.get(cur).expect("labels cover decision vertices");
        match self.g.controller(cur)? {
            PlayerId::P1 => r1 = r1.max(lab),
            PlayerId::P2 => r2 = r2.max(lab),
        }
        for a in 0..self.g.actions(cur).len() {
            let y = self.g.actions(cur)[a].target;
            if let Some(p) = self.g.terminal_payoff(y) {
                if self.target.admits(p) && p.u1 >= r1 && p.u2 >= r2 {
                    self.actions.push(a);
                    return Ok(Some(Lasso::terminal(self.g, self.start, self.actions.clone())?));
                }
                continue;
            }
            if let Some(&first) = self.pos.get(&y) {
                if repeated {
                    // A second revisit can only produce a non-canonical walk.
                    continue;
                }
                if let Some(c) = self.cycle_payoff {
                    if c.u1 >= r1 && c.u2 >= r2 {
                        self.actions.push(a);
                        let prefix = self.actions[..first].to_vec();
                        let cycle = self.actions[first..].to_vec();
                        return Ok(Some(Lasso::cycle(self.g, self.start, prefix, cycle)?));
                    }
                }
                // Pass through the revisited vertex once; only fresh
                // vertices may follow.
                self.actions.push(a);
                self.verts.push(y);
                let found = self.dfs(y, true, r1, r2)?;
                self.verts.pop();
                self.actions.pop();
                if found.is_some() {
                    return Ok(found);
                }
                continue;
            }
            if !self.allowed.contains(&y) {
                continue;
            }
            self.actions.push(a);
            self.verts.push(y);
            self.pos.insert(y, self.verts.len() - 1);
            let found = self.dfs(y, repeated, r1, r2)?;
            self.pos.remove(&y);
            self.verts.pop();
            self.actions.pop();
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }
}

/// [`viable_min`] together with the least canonical play achieving it.
pub fn viable_min_witness(
    g: &GameGraph,
    labels: &AlphaLabels,
    from: VertexId,
    player: PlayerId,
) -> Result<(Q, Lasso)> {
    let classes = achievable_classes(g, labels, from)?;
    let Some(m) = classes.iter().map(|cl| cl.payoff.get(player)).min() else {
        return Err(Error::EmptyViability(g.id(from).to_string()));
    };
    if g.is_terminal(from) {
        return Ok((m, Lasso::terminal(g, from, vec![])?));
    }

    let lasso = search_matching(g, labels, from, Target::Coord(player, m), &classes)?
        .ok_or_else(|| Error::EmptyViability(g.id(from).to_string()))?;
    debug_assert!(lasso.is_canonical(g)?);
    debug_assert!(is_viable(g, labels, &lasso)?);
    debug_assert_eq!(g.evaluate_payoff(&lasso)?.get(player), m);
    Ok((m, lasso))
}

/// The distinct payoffs realizable by viable plays from `from`, ascending.
pub fn viable_payoffs(
    g: &GameGraph,
    labels: &AlphaLabels,
    from: VertexId,
) -> Result<Vec<PayoffVector>> {
    let set: BTreeSet<PayoffVector> = achievable_classes(g, labels, from)?
        .iter()
        .map(|cl| cl.payoff)
        .collect();
    Ok(set.into_iter().collect())
}

/// The least canonical viable play from `from` whose payoff vector is
/// exactly `target`; `None` when no outcome class with that payoff is
/// achievable.
pub fn viable_exact_witness(
    g: &GameGraph,
    labels: &AlphaLabels,
    from: VertexId,
    target: PayoffVector,
) -> Result<Option<Lasso>> {
    let classes = achievable_classes(g, labels, from)?;
    if !classes.iter().any(|cl| cl.payoff == target) {
        return Ok(None);
    }
    if g.is_terminal(from) {
        return Ok(Some(Lasso::terminal(g, from, vec![])?));
    }
    search_matching(g, labels, from, Target::Exact(target), &classes)
}

/// Shared driver for the witness searches.
fn search_matching(
    g: &GameGraph,
    labels: &AlphaLabels,
    from: VertexId,
    target: Target,
    classes: &[OutcomeClass],
) -> Result<Option<Lasso>> {
    let mut allowed = BTreeSet::new();
    let mut cycle_payoff = None;
    for cl in classes {
        if !target.admits(cl.payoff) {
            continue;
        }
        allowed.extend(allowed_set(g, labels, cl.payoff));
        if cl.kind == OutcomeKind::Cycle {
            cycle_payoff = Some(cl.payoff);
        }
    }

    let c = g.constant_infinite()?;
    let mut search = WitnessSearch {
        g,
        labels,
        target,
        allowed,
        cycle_payoff,
        start: from,
        actions: Vec::new(),
        verts: vec![from],
        pos: BTreeMap::from([(from, 0)]),
    };
    search.dfs(from, false, c.u1, c.u2)
}

/// One round of the viability iteration. Errors if some successor has no
/// viable play at all, which cannot happen along the standard iteration from
/// the zero-sum base labels.
pub fn alpha_step(g: &GameGraph, labels: &AlphaLabels) -> Result<AlphaLabels> {
    g.require_lsc()?;
    let mut values = BTreeMap::new();
    for h in g.decision_vertices() {
        let mover = g.controller(h)?;
        let mut best: Option<Q> = None;
        for a in g.actions(h) {
            let vm = viable_min(g, labels, a.target, mover)?;
            best = Some(best.map_or(vm, |b: Q| b.max(vm)));
        }
        values.insert(h, best.expect("decision vertices have actions"));
    }
    Ok(AlphaLabels { values })
}

/// The full iteration trace `α_1, α_2, …` up to and including the first
/// stationary labeling. Adjacent entries are strictly increasing somewhere,
/// and each is pointwise at most the next.
pub fn alpha_iterations(g: &GameGraph) -> Result<Vec<AlphaLabels>> {
    let mut trace = vec![alpha_one(g)?];
    let bound = g.decision_vertices().len() * g.payoff_values().len() + 2;
    for _ in 0..bound {
        let last = trace.last().unwrap();
        let next = alpha_step(g, last)?;
        if next == *last {
            return Ok(trace);
        }
        trace.push(next);
    }
    Err(Error::InconsistentLabels(
        "viability iteration did not stabilize within its bound".into(),
    ))
}

/// The stationary labeling and how many rounds it took. `iterations` counts
/// the labelings in the trace: 1 means the base labeling was already
/// stationary.
pub struct AlphaSolution {
    pub labels: AlphaLabels,
    pub iterations: usize,
}

pub fn alpha_fixed_point(g: &GameGraph) -> Result<AlphaSolution> {
    let mut trace = alpha_iterations(g)?;
    let iterations = trace.len();
    let labels = trace.pop().expect("trace is never empty");
    Ok(AlphaSolution { labels, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios;

    fn q(n: i64) -> Q {
        Q::from_integer(n)
    }

    fn label_of(g: &GameGraph, l: &AlphaLabels, id: &str) -> Q {
        l.get(g.vertex(id).unwrap()).unwrap()
    }

    #[test]
    fn two_vertex_cycle_is_stationary_immediately() {
        let g = scenarios::g1();
        let sol = alpha_fixed_point(&g).unwrap();
        assert_eq!(sol.iterations, 1);
        assert_eq!(label_of(&g, &sol.labels, "v1"), q(1));
        assert_eq!(label_of(&g, &sol.labels, "v2"), q(1));
    }

    #[test]
    fn three_vertex_cycle_takes_three_rounds() {
        let g = scenarios::cyclic6();
        let trace = alpha_iterations(&g).unwrap();
        let snapshot: Vec<Vec<Q>> = trace
            .iter()
            .map(|l| {
                ["v1", "v2", "v3"].iter().map(|id| label_of(&g, l, id)).collect()
            })
            .collect();
        assert_eq!(
            snapshot,
            vec![
                vec![q(2), q(2), q(4)],
                vec![q(2), q(3), q(4)],
                vec![q(4), q(3), q(4)],
            ]
        );
        for pair in trace.windows(2) {
            assert!(pair[0].pointwise_le(&pair[1]), "iteration must be monotone");
        }
        let sol = alpha_fixed_point(&g).unwrap();
        assert_eq!(sol.iterations, 3);
    }

    #[test]
    fn acyclic_game_fixed_point() {
        let g = scenarios::acyclic2();
        let sol = alpha_fixed_point(&g).unwrap();
        assert_eq!(sol.iterations, 1);
        assert_eq!(label_of(&g, &sol.labels, "r"), q(2));
        assert_eq!(label_of(&g, &sol.labels, "m1"), q(3));
        assert_eq!(label_of(&g, &sol.labels, "m2"), q(2));
    }

    #[test]
    fn viability_predicate_on_the_two_vertex_cycle() {
        let g = scenarios::g1();
        let labels = alpha_fixed_point(&g).unwrap().labels;
        let v1 = g.vertex("v1").unwrap();
        let stop_now = Lasso::terminal(&g, v1, vec![1]).unwrap();
        let partner_stops = Lasso::terminal(&g, v1, vec![0, 1]).unwrap();
        let around_once = Lasso::terminal(&g, v1, vec![0, 0, 1]).unwrap();
        let forever = Lasso::cycle(&g, v1, vec![], vec![0, 0]).unwrap();
        assert!(is_viable(&g, &labels, &stop_now).unwrap());
        assert!(is_viable(&g, &labels, &partner_stops).unwrap());
        assert!(is_viable(&g, &labels, &around_once).unwrap());
        // Looping forever pays (0, 0), below both movers' labels.
        assert!(!is_viable(&g, &labels, &forever).unwrap());
    }

    #[test]
    fn monotonicity_is_per_player_and_checks_the_wrap_around_step() {
        // The three-vertex loop visits P1 twice per period (v1, v3).
        let g = scenarios::cyclic6();
        let v1 = g.vertex("v1").unwrap();
        let forever = Lasso::cycle(&g, v1, vec![], vec![0, 0, 0]).unwrap();

        // P1's own labels within one period read 0, 1 — non-decreasing.
        // The wrap step back to v1 drops from 1 to 0 and must be caught.
        let wrap =
            AlphaLabels::from_entries(&g, &[("v1", q(0)), ("v2", q(5)), ("v3", q(1))]).unwrap();
        assert!(!is_monotonic(&g, &wrap, &forever).unwrap());

        // A drop when the turn changes hands is no violation: v2's 5 towers
        // over v3's 0, but each player's own subsequence stays flat.
        let handoff =
            AlphaLabels::from_entries(&g, &[("v1", q(0)), ("v2", q(5)), ("v3", q(0))]).unwrap();
        assert!(is_monotonic(&g, &handoff, &forever).unwrap());
    }

    #[test]
    fn viable_minimum_and_witness_on_the_two_vertex_cycle() {
        let g = scenarios::g1();
        let labels = alpha_fixed_point(&g).unwrap().labels;
        let v1 = g.vertex("v1").unwrap();
        let v2 = g.vertex("v2").unwrap();

        let (m, w) = viable_min_witness(&g, &labels, v1, PlayerId::P2).unwrap();
        assert_eq!(m, q(1));
        assert_eq!(w.display(&g), "v1 -go-> v2 -stop-> t2");

        let (m, w) = viable_min_witness(&g, &labels, v2, PlayerId::P1).unwrap();
        assert_eq!(m, q(1));
        assert_eq!(w.display(&g), "v2 -go-> v1 -stop-> t1");

        // `go` is declared before `stop`, so the canonical walk that loops
        // once before stopping precedes `v1 -stop-> t1` in lasso order even
        // though both pay P1 exactly 1.
        let (m, w) = viable_min_witness(&g, &labels, v1, PlayerId::P1).unwrap();
        assert_eq!(m, q(1));
        assert_eq!(w.display(&g), "v1 -go-> v2 -go-> v1 -stop-> t1");

        let t1 = g.vertex("t1").unwrap();
        let (m, w) = viable_min_witness(&g, &labels, t1, PlayerId::P1).unwrap();
        assert_eq!(m, q(1));
        assert_eq!(w.display(&g), "t1");
    }

    #[test]
    fn witness_may_loop_before_terminating() {
        let g = scenarios::cyclic6();
        let labels = alpha_fixed_point(&g).unwrap().labels;
        let v3 = g.vertex("v3").unwrap();
        let (m, w) = viable_min_witness(&g, &labels, v3, PlayerId::P2).unwrap();
        assert_eq!(m, q(3));
        assert_eq!(w.display(&g), "v3 -back-> v1 -push-> v2 -push-> v3 -out-> t3");
        assert!(w.is_canonical(&g).unwrap());
    }

    #[test]
    fn unreachable_labels_make_viability_empty() {
        let g = scenarios::g1();
        let sky_high = AlphaLabels::constant(&g, q(100));
        let v2 = g.vertex("v2").unwrap();
        assert!(matches!(
            viable_min(&g, &sky_high, v2, PlayerId::P1),
            Err(Error::EmptyViability(id)) if id == "v2"
        ));
        assert!(matches!(alpha_step(&g, &sky_high), Err(Error::EmptyViability(_))));
    }

    #[test]
    fn solver_refuses_tail_table_games() {
        let g = scenarios::counterexample();
        assert!(matches!(alpha_one(&g), Err(Error::NotLscCertified)));
        let manual = AlphaLabels::constant(&g, q(1));
        let v1 = g.vertex("v1").unwrap();
        assert!(matches!(
            viable_min(&g, &manual, v1, PlayerId::P1),
            Err(Error::NotLscCertified)
        ));
        // The play-level predicate still works there.
        let both_b = Lasso::cycle(&g, v1, vec![], vec![1, 1]).unwrap();
        assert!(!is_viable(&g, &manual, &both_b).unwrap());
        let both_a = Lasso::cycle(&g, v1, vec![], vec![0, 0]).unwrap();
        assert!(is_viable(&g, &manual, &both_a).unwrap());
    }

    /// Brute-force oracle: enumerate every canonical lasso by unrestricted
    /// walk search, filter with the viability predicate, and take the
    /// minimum directly. Checks both the minimum and that the witness is the
    /// least achiever in lasso order.
    fn all_canonical_lassos(g: &GameGraph, from: VertexId) -> BTreeSet<Lasso> {
        fn rec(
            g: &GameGraph,
            start: VertexId,
            cur: VertexId,
            seq: &mut Vec<usize>,
            out: &mut BTreeSet<Lasso>,
            max_len: usize,
        ) {
            if g.is_terminal(cur) {
                let l = Lasso::terminal(g, start, seq.clone()).unwrap();
                if l.is_canonical(g).unwrap() {
                    out.insert(l);
                }
                return;
            }
            for split in 0..seq.len() {
                if let Ok(l) = Lasso::cycle(g, start, seq[..split].to_vec(), seq[split..].to_vec())
                {
                    if l.is_canonical(g).unwrap() {
                        out.insert(l);
                    }
                }
            }
            if seq.len() == max_len {
                return;
            }
            for a in 0..g.actions(cur).len() {
                seq.push(a);
                rec(g, start, g.actions(cur)[a].target, seq, out, max_len);
                seq.pop();
            }
        }
        let mut out = BTreeSet::new();
        rec(g, from, from, &mut Vec::new(), &mut out, 2 * g.vertex_count() + 2);
        out
    }

    #[test]
    fn viable_minimum_matches_exhaustive_enumeration() {
        for g in [
            scenarios::g1(),
            scenarios::cyclic6(),
            scenarios::acyclic2(),
            scenarios::tie(),
        ] {
            let labels = alpha_fixed_point(&g).unwrap().labels;
            for from in g.vertices() {
                let viable: Vec<(Lasso, PayoffVector)> = all_canonical_lassos(&g, from)
                    .into_iter()
                    .filter(|l| is_viable(&g, &labels, l).unwrap())
                    .map(|l| {
                        let p = g.evaluate_payoff(&l).unwrap();
                        (l, p)
                    })
                    .collect();
                for player in [PlayerId::P1, PlayerId::P2] {
                    let expect = viable.iter().map(|(_, p)| p.get(player)).min();
                    match viable_min(&g, &labels, from, player) {
                        Ok(m) => {
                            assert_eq!(Some(m), expect, "minimum at {} for {player}", g.id(from));
                            let (wm, w) = viable_min_witness(&g, &labels, from, player).unwrap();
                            assert_eq!(wm, m);
                            let least = viable
                                .iter()
                                .filter(|(_, p)| p.get(player) == m)
                                .map(|(l, _)| l.clone())
                                .min()
                                .unwrap();
                            assert_eq!(w, least, "witness at {} for {player}", g.id(from));
                        }
                        Err(Error::EmptyViability(_)) => {
                            assert_eq!(expect, None);
                        }
                        Err(e) => panic!("unexpected error: {e}"),
                    }
                }
            }
        }
    }
}
