//! Independent certification of strategy profiles.
//!
//! Nothing in here reuses the solver's reasoning: deviation payoffs are
//! computed by brute-force value iteration on the finite product of the game
//! graph with the profile's plan automaton, and acyclic games additionally
//! get an exhaustive backward-induction oracle with full tie enumeration.
//! The two halves let the test suite cross-examine the construction from
//! both sides.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::game::{GameGraph, Lasso, PayoffVector, PlayerId, VertexId};
use crate::rational::Q;
use crate::spe::{PlanKey, ProfileMemory, StrategyProfile};

/// A state of the deviation search: a game vertex paired with the plan
/// memory the profile is in when play stands there.
pub type ProductNode = (VertexId, ProfileMemory);

/// The payoff the profile yields for `player` when both sides follow it from
/// `(from, memory)`: the remainder of the current plan, scored like any
/// other play (a plan that loops forever scores the non-termination payoff).
pub fn induced_payoff_from(
    g: &GameGraph,
    profile: &StrategyProfile,
    from: VertexId,
    memory: ProfileMemory,
) -> Result<PayoffVector> {
    let mut seen: BTreeSet<ProductNode> = BTreeSet::new();
    let mut v = from;
    let mut m = memory;
    loop {
        if let Some(p) = g.terminal_payoff(v) {
            return Ok(p);
        }
        if !seen.insert((v, m)) {
            return g.constant_infinite();
        }
        if profile.memory_vertex(g, m)? != Some(v) {
            return Err(Error::InvalidProfile(format!(
                "plan memory lost track of the play at `{}`",
                g.id(v)
            )));
        }
        let action = profile
            .planned_action(m)
            .expect("a tracked memory prescribes an action");
        m = profile.transition(g, v, m, action)?;
        v = g.actions(v)[action].target;
    }
}

/// How a product node behaves in the one-player deviation optimization.
enum NodeRule {
    /// Terminal vertex: the deviator's coordinate of its payoff.
    Fixed(Q),
    /// The deviator moves: free choice among the successor nodes.
    Best(Vec<usize>),
    /// The opponent moves: the plan's single prescribed successor.
    Follow(usize),
}

/// The best payoff `deviator` can force from `(from, memory)` when the
/// opponent plays the profile and every observed departure from the plan
/// resets it, exactly as in live play. Computed by least-fixed-point value
/// iteration from the non-termination payoff, so product cycles — plays in
/// which the deviation war never ends — score exactly that payoff.
pub fn best_deviation_from(
    g: &GameGraph,
    profile: &StrategyProfile,
    from: VertexId,
    memory: ProfileMemory,
    deviator: PlayerId,
) -> Result<Q> {
    g.require_lsc()?;
    let bottom = g.constant_infinite()?.get(deviator);

    // First pass: the product states the search can reach.
    let mut order: Vec<ProductNode> = Vec::new();
    let mut index: BTreeMap<ProductNode, usize> = BTreeMap::new();
    let mut queue: VecDeque<ProductNode> = VecDeque::new();
    index.insert((from, memory), 0);
    order.push((from, memory));
    queue.push_back((from, memory));
    while let Some((v, m)) = queue.pop_front() {
        if g.is_terminal(v) {
            continue;
        }
        for action in deviation_actions(g, profile, v, m, deviator)? {
            let target = g.actions(v)[action].target;
            let next = (target, profile.transition(g, v, m, action)?);
            if !index.contains_key(&next) {
                index.insert(next, order.len());
                order.push(next);
                queue.push_back(next);
            }
        }
    }

    // Second pass: each state's rule, with successors resolved to indices.
    let mut rules: Vec<NodeRule> = Vec::with_capacity(order.len());
    for &(v, m) in &order {
        if let Some(p) = g.terminal_payoff(v) {
            rules.push(NodeRule::Fixed(p.get(deviator)));
            continue;
        }
        let succ = |action: usize| -> Result<usize> {
            let target = g.actions(v)[action].target;
            Ok(index[&(target, profile.transition(g, v, m, action)?)])
        };
        let actions = deviation_actions(g, profile, v, m, deviator)?;
        if g.controller(v)? == deviator {
            let succs = actions.iter().map(|&a| succ(a)).collect::<Result<_>>()?;
            rules.push(NodeRule::Best(succs));
        } else {
            rules.push(NodeRule::Follow(succ(actions[0])?));
        }
    }

    // Value iteration from the bottom of the payoff lattice.
    let mut values: Vec<Q> = rules
        .iter()
        .map(|rule| match rule {
            NodeRule::Fixed(q) => *q,
            _ => bottom,
        })
        .collect();
    let bound = order.len() * (g.payoff_values().len() + 1) + 2;
    for _ in 0..bound {
        let next: Vec<Q> = rules
            .iter()
            .enumerate()
            .map(|(i, rule)| match rule {
                NodeRule::Fixed(_) => values[i],
                NodeRule::Best(succs) => succs
                    .iter()
                    .map(|&s| values[s])
                    .max()
                    .unwrap_or(values[i]),
                NodeRule::Follow(s) => values[*s],
            })
            .collect();
        if next == values {
            return Ok(values[0]);
        }
        values = next;
    }
    Err(Error::InconsistentLabels(
        "deviation search did not stabilize within its bound".to_string(),
    ))
}

/// The actions available at `(v, m)` during the search: everything for the
/// deviator, the planned action for the opponent.
fn deviation_actions(
    g: &GameGraph,
    profile: &StrategyProfile,
    v: VertexId,
    m: ProfileMemory,
    deviator: PlayerId,
) -> Result<Vec<usize>> {
    if g.controller(v)? == deviator {
        return Ok((0..g.actions(v).len()).collect());
    }
    if profile.memory_vertex(g, m)? != Some(v) {
        return Err(Error::InvalidProfile(format!(
            "plan memory lost track of the play at `{}`",
            g.id(v)
        )));
    }
    Ok(vec![profile
        .planned_action(m)
        .expect("a tracked memory prescribes an action")])
}

/// The best payoff `deviator` can force in the subgame starting at `w`, with
/// the profile's memory freshly initialized to `w`'s threat play. Following
/// the plan is one of the deviator's options, so this is never below the
/// induced payoff.
pub fn best_deviation(
    g: &GameGraph,
    profile: &StrategyProfile,
    w: VertexId,
    deviator: PlayerId,
) -> Result<Q> {
    if g.is_terminal(w) {
        return Err(Error::TerminalVertex(g.id(w).to_string()));
    }
    let memory = subgame_memory(g, w)?;
    best_deviation_from(g, profile, w, memory, deviator)
}

/// The memory a subgame examination starts from: the local threat play
/// against the mover's opponent, at position zero. That is the plan an
/// opponent deviating *into* `w` would hand the table, and the default
/// posture the certificate holds each subgame to.
fn subgame_memory(g: &GameGraph, w: VertexId) -> Result<ProfileMemory> {
    let mover = g.controller(w)?;
    Ok(ProfileMemory { key: PlanKey::Threat(w, mover.opponent()), pos: 0 })
}

/// One certified line of a report: what `player` gets by following from the
/// given state, the best they can force by deviating, and the difference.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportRow {
    pub vertex: VertexId,
    pub memory: ProfileMemory,
    pub player: PlayerId,
    pub on_path: Q,
    pub best_deviation: Q,
    /// `on_path - best_deviation`; the row is acceptable at tolerance
    /// `epsilon` iff `slack >= -epsilon`.
    pub slack: Q,
}

/// The full certification verdict for a profile.
#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub epsilon: Q,
    /// Whether the report also covers every plan memory reachable in live
    /// play, rather than only freshly initialized subgames.
    pub strict: bool,
    pub rows: Vec<ReportRow>,
    pub pass: bool,
}

impl VerificationReport {
    /// The rows violating the tolerance, worst first.
    pub fn failures(&self) -> Vec<&ReportRow> {
        let mut rows: Vec<&ReportRow> =
            self.rows.iter().filter(|r| r.slack < -self.epsilon).collect();
        rows.sort_by_key(|r| r.slack);
        rows
    }
}

/// Checks that no unilateral deviation gains more than `epsilon` in any
/// subgame: every decision vertex is examined under both of its freshly
/// initialized threat plays, and the whole game is examined from the root
/// under the root plan.
pub fn check_spe(
    g: &GameGraph,
    profile: &StrategyProfile,
    epsilon: Q,
) -> Result<VerificationReport> {
    check_spe_inner(g, profile, epsilon, false)
}

/// Like [`check_spe`], but additionally certifies every `(vertex, memory)`
/// state the plan automaton can reach from the root under arbitrary play —
/// the reading in which a subgame inherits the memory of the history that
/// led to it.
pub fn check_spe_strict(
    g: &GameGraph,
    profile: &StrategyProfile,
    epsilon: Q,
) -> Result<VerificationReport> {
    check_spe_inner(g, profile, epsilon, true)
}

fn check_spe_inner(
    g: &GameGraph,
    profile: &StrategyProfile,
    epsilon: Q,
    strict: bool,
) -> Result<VerificationReport> {
    g.require_lsc()?;
    if epsilon < Q::from_integer(0) {
        return Err(Error::Parse(format!(
            "tolerance must be nonnegative, got {epsilon}"
        )));
    }
    let mut keys: BTreeSet<ProductNode> = BTreeSet::new();
    if !g.is_terminal(g.root()) {
        keys.insert((g.root(), profile.initial_memory(g, g.root())));
    }
    for w in g.decision_vertices() {
        for punished in [PlayerId::P1, PlayerId::P2] {
            keys.insert((w, ProfileMemory { key: PlanKey::Threat(w, punished), pos: 0 }));
        }
    }
    if strict {
        for node in reachable_memories(g, profile)? {
            keys.insert(node);
        }
    }
    let mut rows = Vec::new();
    for (v, m) in keys {
        for player in [PlayerId::P1, PlayerId::P2] {
            let on_path = induced_payoff_from(g, profile, v, m)?.get(player);
            let best = best_deviation_from(g, profile, v, m, player)?;
            rows.push(ReportRow {
                vertex: v,
                memory: m,
                player,
                on_path,
                best_deviation: best,
                slack: on_path - best,
            });
        }
    }
    let pass = rows.iter().all(|r| r.slack >= -epsilon);
    Ok(VerificationReport { epsilon, strict, rows, pass })
}

/// Every `(vertex, memory)` state reachable from the root under arbitrary
/// joint play, terminals excluded.
pub fn reachable_memories(
    g: &GameGraph,
    profile: &StrategyProfile,
) -> Result<BTreeSet<ProductNode>> {
    let mut seen: BTreeSet<ProductNode> = BTreeSet::new();
    if g.is_terminal(g.root()) {
        return Ok(seen);
    }
    let start = (g.root(), profile.initial_memory(g, g.root()));
    let mut queue: VecDeque<ProductNode> = VecDeque::new();
    seen.insert(start);
    queue.push_back(start);
    while let Some((v, m)) = queue.pop_front() {
        for action in 0..g.actions(v).len() {
            let target = g.actions(v)[action].target;
            if g.is_terminal(target) {
                continue;
            }
            let next = (target, profile.transition(g, v, m, action)?);
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    Ok(seen)
}

/// One move of a deviation simulation.
#[derive(Clone, Debug)]
pub struct DeviationStep {
    pub vertex: VertexId,
    pub memory: ProfileMemory,
    pub action: usize,
    /// Whether this move departed from the plan and reset it.
    pub reset: bool,
}

/// The transcript of playing one deviator strategy against the profile.
#[derive(Clone, Debug)]
pub struct DeviationTrace {
    pub steps: Vec<DeviationStep>,
    /// Payoff of the realized play.
    pub outcome: PayoffVector,
    /// The deviator's payoff under each plan adopted after one of their
    /// departures, in adoption order.
    pub threat_payoffs: Vec<Q>,
    /// The deviator's payoff had they followed from the start.
    pub on_path: Q,
    /// True when the run ended by revisiting a product state rather than at
    /// a terminal.
    pub looped: bool,
}

/// Plays `deviator`'s moves from `policy` against the profile, starting at
/// `from` with the profile's own initial memory, until the play terminates
/// or a `(vertex, memory)` state repeats. A policy that answers the same
/// state the same way therefore always drives the run into a cycle or a
/// terminal.
pub fn simulate_deviation(
    g: &GameGraph,
    profile: &StrategyProfile,
    from: VertexId,
    deviator: PlayerId,
    mut policy: impl FnMut(VertexId, ProfileMemory, usize) -> usize,
) -> Result<DeviationTrace> {
    g.require_lsc()?;
    let mut m = profile.initial_memory(g, from);
    let mut v = from;
    let on_path = induced_payoff_from(g, profile, v, m)?.get(deviator);
    let mut steps = Vec::new();
    let mut threat_payoffs = Vec::new();
    let mut seen: BTreeSet<ProductNode> = BTreeSet::new();
    loop {
        if let Some(p) = g.terminal_payoff(v) {
            return Ok(DeviationTrace {
                steps,
                outcome: p,
                threat_payoffs,
                on_path,
                looped: false,
            });
        }
        if !seen.insert((v, m)) {
            return Ok(DeviationTrace {
                steps,
                outcome: g.constant_infinite()?,
                threat_payoffs,
                on_path,
                looped: true,
            });
        }
        let mover = g.controller(v)?;
        let action = if mover == deviator {
            let picked = policy(v, m, g.actions(v).len());
            if picked >= g.actions(v).len() {
                return Err(Error::UnknownAction {
                    vertex: g.id(v).to_string(),
                    action: format!("#{picked}"),
                });
            }
            picked
        } else {
            match (profile.memory_vertex(g, m)?, profile.planned_action(m)) {
                (Some(here), Some(a)) if here == v => a,
                _ => {
                    return Err(Error::InvalidProfile(format!(
                        "plan memory lost track of the play at `{}`",
                        g.id(v)
                    )))
                }
            }
        };
        let on_plan = profile.memory_vertex(g, m)? == Some(v)
            && profile.planned_action(m) == Some(action);
        let next_memory = profile.transition(g, v, m, action)?;
        let target = g.actions(v)[action].target;
        let reset = !on_plan && !g.is_terminal(target);
        if reset {
            threat_payoffs
                .push(induced_payoff_from(g, profile, target, next_memory)?.get(deviator));
        }
        steps.push(DeviationStep { vertex: v, memory: m, action, reset });
        m = next_memory;
        v = target;
    }
}

/// Simulates the deviator who departs from the plan at every opportunity,
/// picking the smallest off-plan action whenever one exists.
pub fn simulate_eager_deviator(
    g: &GameGraph,
    profile: &StrategyProfile,
    from: VertexId,
    deviator: PlayerId,
) -> Result<DeviationTrace> {
    let plan = profile.clone();
    simulate_deviation(g, profile, from, deviator, move |v, m, n| {
        let planned = match plan.memory_vertex(g, m) {
            Ok(Some(here)) if here == v => plan.planned_action(m),
            _ => None,
        };
        match planned {
            Some(a) => (0..n).find(|&x| x != a).unwrap_or(a),
            None => 0,
        }
    })
}

/// Branching/depth limits for the exhaustive backward-induction oracle; tie
/// enumeration is exponential, so anything bigger is refused outright.
#[derive(Clone, Copy, Debug)]
pub struct OracleCaps {
    pub max_depth: usize,
    pub max_branching: usize,
}

impl Default for OracleCaps {
    fn default() -> OracleCaps {
        OracleCaps { max_depth: 6, max_branching: 3 }
    }
}

/// Output of the backward-induction oracle.
#[derive(Clone, Debug)]
pub struct SpeOracle {
    /// For each vertex, every payoff some pure subgame-perfect equilibrium
    /// of the subgame rooted there achieves.
    pub values: BTreeMap<VertexId, BTreeSet<PayoffVector>>,
    /// Every root play induced by some pure subgame-perfect equilibrium,
    /// with its payoff.
    pub plays: BTreeMap<Lasso, PayoffVector>,
}

/// Exhaustive equilibrium enumeration on an acyclic game by backward
/// induction, with every tie followed: an action (with continuation payoff
/// `p`) is an equilibrium choice iff each rival action admits some
/// continuation equilibrium worth no more than `p` to the mover. Used as the
/// independent oracle that the viability machinery is checked against.
pub fn finite_horizon_spe(g: &GameGraph) -> Result<SpeOracle> {
    finite_horizon_spe_with(g, OracleCaps::default())
}

/// Same as [`finite_horizon_spe`] with explicit caps.
pub fn finite_horizon_spe_with(g: &GameGraph, caps: OracleCaps) -> Result<SpeOracle> {
    let depth = g.depth().ok_or(Error::CyclicGame)?;
    if depth > caps.max_depth {
        return Err(Error::CapExceeded(format!(
            "game depth {depth} exceeds the oracle cap {}",
            caps.max_depth
        )));
    }
    let branching = g.max_branching();
    if branching > caps.max_branching {
        return Err(Error::CapExceeded(format!(
            "branching {branching} exceeds the oracle cap {}",
            caps.max_branching
        )));
    }

    let mut values: BTreeMap<VertexId, BTreeSet<PayoffVector>> = BTreeMap::new();
    for v in g.vertices() {
        equilibrium_values(g, v, &mut values)?;
    }
    let mut plays = BTreeMap::new();
    for (actions, payoff) in equilibrium_plays(g, g.root(), &values)? {
        plays.insert(Lasso::terminal(g, g.root(), actions)?, payoff);
    }
    Ok(SpeOracle { values, plays })
}

/// The worst equilibrium continuation for `mover` at each of `v`'s children;
/// an action survives iff its payoff is at least every rival child's entry.
fn rival_floor(
    g: &GameGraph,
    v: VertexId,
    mover: PlayerId,
    skip: usize,
    values: &BTreeMap<VertexId, BTreeSet<PayoffVector>>,
) -> Option<Q> {
    g.actions(v)
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != skip)
        .map(|(_, a)| {
            values[&a.target]
                .iter()
                .map(|p| p.get(mover))
                .min()
                .expect("every subgame has an equilibrium")
        })
        .max()
}

fn equilibrium_values(
    g: &GameGraph,
    v: VertexId,
    values: &mut BTreeMap<VertexId, BTreeSet<PayoffVector>>,
) -> Result<()> {
    if values.contains_key(&v) {
        return Ok(());
    }
    if let Some(p) = g.terminal_payoff(v) {
        values.insert(v, BTreeSet::from([p]));
        return Ok(());
    }
    let mover = g.controller(v)?;
    for a in g.actions(v) {
        equilibrium_values(g, a.target, values)?;
    }
    let mut set = BTreeSet::new();
    for (i, a) in g.actions(v).iter().enumerate() {
        let floor = rival_floor(g, v, mover, i, values);
        for p in &values[&a.target] {
            if floor.map_or(true, |f| p.get(mover) >= f) {
                set.insert(*p);
            }
        }
    }
    values.insert(v, set);
    Ok(())
}

fn equilibrium_plays(
    g: &GameGraph,
    v: VertexId,
    values: &BTreeMap<VertexId, BTreeSet<PayoffVector>>,
) -> Result<Vec<(Vec<usize>, PayoffVector)>> {
    if let Some(p) = g.terminal_payoff(v) {
        return Ok(vec![(Vec::new(), p)]);
    }
    let mover = g.controller(v)?;
    let mut out = Vec::new();
    for (i, a) in g.actions(v).iter().enumerate() {
        let floor = rival_floor(g, v, mover, i, values);
        for (tail, payoff) in equilibrium_plays(g, a.target, values)? {
            if floor.map_or(true, |f| payoff.get(mover) >= f) {
                let mut actions = Vec::with_capacity(tail.len() + 1);
                actions.push(i);
                actions.extend(tail);
                out.push((actions, payoff));
            }
        }
    }
    Ok(out)
}
