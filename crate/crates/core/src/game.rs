//! Game graphs and plays.
//!
//! A game is a finite directed graph. Each vertex is either a decision vertex
//! owned by one of the two players (with at least one outgoing action) or a
//! terminal carrying a payoff vector. A play that never reaches a terminal is
//! scored by the game's infinite rule. Plays are represented as lassos: a
//! finite prefix followed by a terminal or by a cycle repeated forever.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::rational::{parse_rational, Q};

/// One of the two players.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PlayerId {
    P1,
    P2,
}

impl PlayerId {
    pub fn opponent(self) -> PlayerId {
        match self {
            PlayerId::P1 => PlayerId::P2,
            PlayerId::P2 => PlayerId::P1,
        }
    }

    /// 0-based coordinate of this player inside a payoff vector.
    pub fn index(self) -> usize {
        match self {
            PlayerId::P1 => 0,
            PlayerId::P2 => 1,
        }
    }

    pub fn from_number(n: u8) -> Result<PlayerId> {
        match n {
            1 => Ok(PlayerId::P1),
            2 => Ok(PlayerId::P2),
            other => Err(Error::Parse(format!("controller must be 1 or 2, got {other}"))),
        }
    }
}

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlayerId::P1 => write!(f, "P1"),
            PlayerId::P2 => write!(f, "P2"),
        }
    }
}

/// Index of a vertex inside a [`GameGraph`]. Vertices are numbered in
/// lexicographic order of their ids, so the numeric order of `VertexId`s is
/// the deterministic "vertex-id order" used in tie-breaking.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub(crate) u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A payoff for both players.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PayoffVector {
    pub u1: Q,
    pub u2: Q,
}

impl PayoffVector {
    pub fn new(u1: Q, u2: Q) -> PayoffVector {
        PayoffVector { u1, u2 }
    }

    pub fn get(&self, player: PlayerId) -> Q {
        match player {
            PlayerId::P1 => self.u1,
            PlayerId::P2 => self.u2,
        }
    }

    /// Componentwise `>=`.
    pub fn dominates(&self, other: &PayoffVector) -> bool {
        self.u1 >= other.u1 && self.u2 >= other.u2
    }

    pub fn welfare(&self) -> Q {
        self.u1 + self.u2
    }
}

impl fmt::Display for PayoffVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.u1, self.u2)
    }
}

/// An outgoing edge of a decision vertex.
#[derive(Clone, Debug)]
pub struct Action {
    pub label: String,
    pub target: VertexId,
}

#[derive(Clone, Debug)]
pub(crate) enum VertexKind {
    Decision { controller: PlayerId, actions: Vec<Action> },
    Terminal(PayoffVector),
}

/// Payoff table for non-terminating plays keyed by which players' marker
/// actions are traversed infinitely often. Accepted for demo/evaluation only;
/// games using it are never certified for the solver.
#[derive(Clone, Debug)]
pub struct TailTable {
    pub marker: String,
    pub none: PayoffVector,
    pub p1: PayoffVector,
    pub p2: PayoffVector,
    pub both: PayoffVector,
}

impl TailTable {
    pub fn class_payoff(&self, p1_marks: bool, p2_marks: bool) -> PayoffVector {
        match (p1_marks, p2_marks) {
            (false, false) => self.none,
            (true, false) => self.p1,
            (false, true) => self.p2,
            (true, true) => self.both,
        }
    }
}

/// How non-terminating plays are scored.
#[derive(Clone, Debug)]
pub enum InfiniteRule {
    Constant(PayoffVector),
    TailTable(TailTable),
}

/// A finite two-player game graph.
pub struct GameGraph {
    ids: Vec<String>,
    index: BTreeMap<String, VertexId>,
    kinds: Vec<VertexKind>,
    infinite: InfiniteRule,
    root: VertexId,
    lsc_certified: bool,
}

/// Incremental construction of a [`GameGraph`]; used by the file loader and
/// by the random generators.
pub struct GameBuilder {
    vertices: Vec<(String, BuilderKind)>,
    root: Option<String>,
    infinite: Option<InfiniteRule>,
}

enum BuilderKind {
    Decision { controller: PlayerId, actions: Vec<(String, String)> },
    Terminal(PayoffVector),
}

impl GameBuilder {
    pub fn new() -> GameBuilder {
        GameBuilder { vertices: Vec::new(), root: None, infinite: None }
    }

    pub fn decision(
        mut self,
        id: &str,
        controller: PlayerId,
        actions: &[(&str, &str)],
    ) -> GameBuilder {
        self.vertices.push((
            id.to_string(),
            BuilderKind::Decision {
                controller,
                actions: actions.iter().map(|(l, t)| (l.to_string(), t.to_string())).collect(),
            },
        ));
        self
    }

    pub fn terminal(mut self, id: &str, u1: Q, u2: Q) -> GameBuilder {
        self.vertices.push((id.to_string(), BuilderKind::Terminal(PayoffVector::new(u1, u2))));
        self
    }

    pub fn root(mut self, id: &str) -> GameBuilder {
        self.root = Some(id.to_string());
        self
    }

    pub fn infinite_constant(mut self, u1: Q, u2: Q) -> GameBuilder {
        self.infinite = Some(InfiniteRule::Constant(PayoffVector::new(u1, u2)));
        self
    }

    pub fn infinite_tail_table(mut self, table: TailTable) -> GameBuilder {
        self.infinite = Some(InfiniteRule::TailTable(table));
        self
    }

    pub fn build(self) -> Result<GameGraph> {
        let root = self.root.ok_or_else(|| Error::Parse("missing root".into()))?;
        let infinite =
            self.infinite.ok_or_else(|| Error::Parse("missing infinite payoff rule".into()))?;

        let mut index: BTreeMap<String, VertexId> = BTreeMap::new();
        for (id, _) in &self.vertices {
            check_name(id, "vertex id")?;
            if index.insert(id.clone(), VertexId(0)).is_some() {
                return Err(Error::DuplicateVertex(id.clone()));
            }
        }
        // The BTreeMap iterates ids in lexicographic order; that order is the
        // vertex numbering.
        let ids: Vec<String> = index.keys().cloned().collect();
        for (rank, id) in ids.iter().enumerate() {
            index.insert(id.clone(), VertexId(rank as u32));
        }

        let mut kinds: Vec<Option<VertexKind>> = vec![None; ids.len()];
        for (id, kind) in self.vertices {
            let slot = index[&id];
            let resolved = match kind {
                BuilderKind::Terminal(p) => VertexKind::Terminal(p),
                BuilderKind::Decision { controller, actions } => {
                    if actions.is_empty() {
                        return Err(Error::NoActions(id.clone()));
                    }
                    let mut out: Vec<Action> = Vec::with_capacity(actions.len());
                    for (label, to) in actions {
                        check_name(&label, "action label")?;
                        // Lasso strings and profile documents address actions
                        // by label, so labels must be unique per vertex.
                        if out.iter().any(|a| a.label == label) {
                            return Err(Error::Parse(format!(
                                "duplicate action label `{label}` at vertex `{id}`"
                            )));
                        }
                        let target =
                            *index.get(&to).ok_or_else(|| Error::UnknownVertex(to.clone()))?;
                        out.push(Action { label, target });
                    }
                    VertexKind::Decision { controller, actions: out }
                }
            };
            kinds[slot.index()] = Some(resolved);
        }
        let kinds: Vec<VertexKind> = kinds.into_iter().map(|k| k.unwrap()).collect();

        let root = *index.get(&root).ok_or(Error::UnknownVertex(root))?;

        let lsc_certified = match &infinite {
            InfiniteRule::TailTable(_) => false,
            InfiniteRule::Constant(c) => kinds.iter().all(|k| match k {
                VertexKind::Terminal(p) => p.dominates(c),
                VertexKind::Decision { .. } => true,
            }),
        };

        Ok(GameGraph { ids, index, kinds, infinite, root, lsc_certified })
    }
}

/// Ids and action labels appear verbatim inside lasso strings and DOT output,
/// so whitespace and the bracket characters are rejected up front.
fn check_name(name: &str, what: &str) -> Result<()> {
    if name.is_empty() || name.chars().any(|c| c.is_whitespace() || c == '[' || c == ']') {
        return Err(Error::Parse(format!("invalid {what} `{name}`")));
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGame {
    players: Vec<String>,
    root: String,
    infinite_payoff: RawInfinite,
    vertices: Vec<RawVertex>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawInfinite {
    Constant([RawRational; 2]),
    Table(RawTailTableWrap),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTailTableWrap {
    tail_table: RawTailTable,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTailTable {
    marker: String,
    none: [RawRational; 2],
    p1: [RawRational; 2],
    p2: [RawRational; 2],
    both: [RawRational; 2],
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawRational {
    Int(i64),
    Text(String),
}

impl RawRational {
    fn to_q(&self) -> Result<Q> {
        match self {
            RawRational::Int(n) => Ok(Q::from_integer(*n)),
            RawRational::Text(s) => parse_rational(s),
        }
    }
}

fn to_payoff(pair: &[RawRational; 2]) -> Result<PayoffVector> {
    Ok(PayoffVector::new(pair[0].to_q()?, pair[1].to_q()?))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVertex {
    id: String,
    #[serde(default)]
    controller: Option<u8>,
    #[serde(default)]
    actions: Option<Vec<RawAction>>,
    #[serde(default)]
    terminal: Option<[RawRational; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAction {
    label: String,
    to: String,
}

impl GameGraph {
    /// Parses and validates a game-file document. Unknown fields, dangling
    /// vertex references, terminals with actions, decision vertices without
    /// actions, and malformed rationals are all rejected.
    pub fn load(text: &str) -> Result<GameGraph> {
        let raw: RawGame = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if raw.players != ["P1", "P2"] {
            return Err(Error::Parse("players must be exactly [\"P1\", \"P2\"]".into()));
        }

        let mut builder = GameBuilder::new().root(&raw.root);
        builder.infinite = Some(match &raw.infinite_payoff {
            RawInfinite::Constant(pair) => InfiniteRule::Constant(to_payoff(pair)?),
            RawInfinite::Table(wrap) => {
                let t = &wrap.tail_table;
                check_name(&t.marker, "marker label")?;
                InfiniteRule::TailTable(TailTable {
                    marker: t.marker.clone(),
                    none: to_payoff(&t.none)?,
                    p1: to_payoff(&t.p1)?,
                    p2: to_payoff(&t.p2)?,
                    both: to_payoff(&t.both)?,
                })
            }
        });

        for v in raw.vertices {
            match (v.terminal, v.controller, v.actions) {
                (Some(_), None, Some(_)) | (Some(_), Some(_), _) => {
                    return Err(Error::TerminalWithActions(v.id));
                }
                (Some(pair), None, None) => {
                    let p = to_payoff(&pair)?;
                    builder.vertices.push((v.id, BuilderKind::Terminal(p)));
                }
                (None, Some(n), actions) => {
                    let controller = PlayerId::from_number(n)?;
                    let actions = actions.unwrap_or_default();
                    if actions.is_empty() {
                        return Err(Error::NoActions(v.id));
                    }
                    builder.vertices.push((
                        v.id,
                        BuilderKind::Decision {
                            controller,
                            actions: actions.into_iter().map(|a| (a.label, a.to)).collect(),
                        },
                    ));
                }
                (None, None, _) => {
                    return Err(Error::Parse(format!(
                        "vertex `{}` must declare either a controller with actions or a terminal payoff",
                        v.id
                    )));
                }
            }
        }
        builder.build()
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.ids.len() as u32).map(VertexId)
    }

    /// Decision vertices in vertex-id order.
    pub fn decision_vertices(&self) -> Vec<VertexId> {
        self.vertices().filter(|v| !self.is_terminal(*v)).collect()
    }

    pub fn id(&self, v: VertexId) -> &str {
        &self.ids[v.index()]
    }

    pub fn vertex(&self, id: &str) -> Option<VertexId> {
        self.index.get(id).copied()
    }

    pub fn require_vertex(&self, id: &str) -> Result<VertexId> {
        self.vertex(id).ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn is_terminal(&self, v: VertexId) -> bool {
        matches!(self.kinds[v.index()], VertexKind::Terminal(_))
    }

    /// The player who moves at `v`; errors on terminals, which have no mover.
    pub fn controller(&self, v: VertexId) -> Result<PlayerId> {
        match &self.kinds[v.index()] {
            VertexKind::Decision { controller, .. } => Ok(*controller),
            VertexKind::Terminal(_) => Err(Error::TerminalVertex(self.id(v).to_string())),
        }
    }

    /// Outgoing actions of `v` in declared order; empty for terminals.
    pub fn actions(&self, v: VertexId) -> &[Action] {
        match &self.kinds[v.index()] {
            VertexKind::Decision { actions, .. } => actions,
            VertexKind::Terminal(_) => &[],
        }
    }

    pub fn action_index(&self, v: VertexId, label: &str) -> Result<usize> {
        self.actions(v)
            .iter()
            .position(|a| a.label == label)
            .ok_or_else(|| Error::UnknownAction {
                vertex: self.id(v).to_string(),
                action: label.to_string(),
            })
    }

    pub fn terminal_payoff(&self, v: VertexId) -> Option<PayoffVector> {
        match &self.kinds[v.index()] {
            VertexKind::Terminal(p) => Some(*p),
            VertexKind::Decision { .. } => None,
        }
    }

    pub fn infinite_rule(&self) -> &InfiniteRule {
        &self.infinite
    }

    /// The constant payoff of non-terminating plays; errors for tail-table
    /// games, which the solver refuses anyway.
    pub fn constant_infinite(&self) -> Result<PayoffVector> {
        match &self.infinite {
            InfiniteRule::Constant(c) => Ok(*c),
            InfiniteRule::TailTable(_) => Err(Error::NotLscCertified),
        }
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    /// Whether the payoff structure is certified lower-semi-continuous: the
    /// infinite rule is a constant that every terminal payoff weakly
    /// dominates componentwise. All solver guarantees are conditional on this.
    pub fn lsc_certified(&self) -> bool {
        self.lsc_certified
    }

    pub fn require_lsc(&self) -> Result<()> {
        if self.lsc_certified {
            Ok(())
        } else {
            Err(Error::NotLscCertified)
        }
    }

    /// Every rational that can appear as some play's payoff coordinate.
    pub fn payoff_values(&self) -> BTreeSet<Q> {
        let mut set = BTreeSet::new();
        match &self.infinite {
            InfiniteRule::Constant(c) => {
                set.insert(c.u1);
                set.insert(c.u2);
            }
            InfiniteRule::TailTable(t) => {
                for p in [t.none, t.p1, t.p2, t.both] {
                    set.insert(p.u1);
                    set.insert(p.u2);
                }
            }
        }
        for v in self.vertices() {
            if let Some(p) = self.terminal_payoff(v) {
                set.insert(p.u1);
                set.insert(p.u2);
            }
        }
        set
    }

    pub fn is_acyclic(&self) -> bool {
        // Three-color DFS over all vertices.
        let n = self.vertex_count();
        let mut color = vec![0u8; n];
        let mut stack: Vec<(VertexId, usize)> = Vec::new();
        for s in self.vertices() {
            if color[s.index()] != 0 {
                continue;
            }
            stack.push((s, 0));
            color[s.index()] = 1;
            while let Some(&mut (v, ref mut next)) = stack.last_mut() {
                if *next < self.actions(v).len() {
                    let t = self.actions(v)[*next].target;
                    *next += 1;
                    match color[t.index()] {
                        0 => {
                            color[t.index()] = 1;
                            stack.push((t, 0));
                        }
                        1 => return false,
                        _ => {}
                    }
                } else {
                    color[v.index()] = 2;
                    stack.pop();
                }
            }
        }
        true
    }

    /// Length in edges of the longest path from the root; `None` when cyclic.
    pub fn depth(&self) -> Option<usize> {
        if !self.is_acyclic() {
            return None;
        }
        let mut memo: Vec<Option<usize>> = vec![None; self.vertex_count()];
        fn go(g: &GameGraph, v: VertexId, memo: &mut Vec<Option<usize>>) -> usize {
            if let Some(d) = memo[v.index()] {
                return d;
            }
            let d = g
                .actions(v)
                .iter()
                .map(|a| 1 + go(g, a.target, memo))
                .max()
                .unwrap_or(0);
            memo[v.index()] = Some(d);
            d
        }
        Some(go(self, self.root, &mut memo))
    }

    /// Maximum out-degree over decision vertices.
    pub fn max_branching(&self) -> usize {
        self.vertices().map(|v| self.actions(v).len()).max().unwrap_or(0)
    }

    /// Scores a set of cycle edges under the infinite rule.
    pub(crate) fn cycle_payoff(&self, cycle_edges: &[(VertexId, usize)]) -> PayoffVector {
        match &self.infinite {
            InfiniteRule::Constant(c) => *c,
            InfiniteRule::TailTable(t) => {
                let mut p1 = false;
                let mut p2 = false;
                for &(v, a) in cycle_edges {
                    if self.actions(v)[a].label == t.marker {
                        match self.controller(v).expect("cycle edges leave decision vertices") {
                            PlayerId::P1 => p1 = true,
                            PlayerId::P2 => p2 = true,
                        }
                    }
                }
                t.class_payoff(p1, p2)
            }
        }
    }

    /// The payoff of the play denoted by `lasso`. The lasso is re-validated
    /// against this graph, so a lasso built for a different game errors
    /// rather than producing nonsense. The result depends only on the play:
    /// unrolling the cycle or shifting its starting point does not change it.
    pub fn evaluate_payoff(&self, lasso: &Lasso) -> Result<PayoffVector> {
        let path = lasso.prefix_vertices(self)?;
        let end = *path.last().unwrap();
        match &lasso.tail {
            LassoTail::Terminal => {
                self.terminal_payoff(end).ok_or_else(|| {
                    Error::InvalidLasso(format!("prefix ends at non-terminal `{}`", self.id(end)))
                })
            }
            LassoTail::Cycle(actions) => {
                let cycle = lasso.cycle_steps(self)?;
                debug_assert_eq!(cycle.len(), actions.len());
                Ok(self.cycle_payoff(&cycle))
            }
        }
    }
}

/// A terminating or ultimately-periodic play: a finite prefix of actions from
/// `start`, then either a terminal or a cycle repeated forever.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lasso {
    start: VertexId,
    prefix: Vec<u32>,
    tail: LassoTail,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LassoTail {
    Terminal,
    Cycle(Vec<u32>),
}

impl Lasso {
    /// A play that ends at a terminal; `prefix` are action indices and the
    /// walk must end on a terminal vertex.
    pub fn terminal(g: &GameGraph, start: VertexId, prefix: Vec<usize>) -> Result<Lasso> {
        Lasso::new(g, start, prefix, None)
    }

    /// A play that loops forever; the cycle starts where the prefix ends and
    /// must return there.
    pub fn cycle(
        g: &GameGraph,
        start: VertexId,
        prefix: Vec<usize>,
        cycle: Vec<usize>,
    ) -> Result<Lasso> {
        Lasso::new(g, start, prefix, Some(cycle))
    }

    fn new(
        g: &GameGraph,
        start: VertexId,
        prefix: Vec<usize>,
        cycle: Option<Vec<usize>>,
    ) -> Result<Lasso> {
        let lasso = Lasso {
            start,
            prefix: prefix.iter().map(|&a| a as u32).collect(),
            tail: match cycle {
                None => LassoTail::Terminal,
                Some(c) => LassoTail::Cycle(c.iter().map(|&a| a as u32).collect()),
            },
        };
        lasso.validate(g)?;
        Ok(lasso)
    }

    fn validate(&self, g: &GameGraph) -> Result<()> {
        let path = self.prefix_vertices(g)?;
        let end = *path.last().unwrap();
        match &self.tail {
            LassoTail::Terminal => {
                if !g.is_terminal(end) {
                    return Err(Error::InvalidLasso(format!(
                        "prefix ends at non-terminal `{}`",
                        g.id(end)
                    )));
                }
            }
            LassoTail::Cycle(actions) => {
                if actions.is_empty() {
                    return Err(Error::InvalidLasso("empty cycle".into()));
                }
                let back = walk(g, end, actions)?;
                if *back.last().unwrap() != end {
                    return Err(Error::InvalidLasso(format!(
                        "cycle from `{}` does not return to it",
                        g.id(end)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn start(&self) -> VertexId {
        self.start
    }

    pub fn tail(&self) -> &LassoTail {
        &self.tail
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix.len()
    }

    pub fn cycle_len(&self) -> usize {
        match &self.tail {
            LassoTail::Terminal => 0,
            LassoTail::Cycle(c) => c.len(),
        }
    }

    /// The vertex reached after following `steps` entries of
    /// [`Lasso::step_actions`] from the start.
    pub fn vertex_at(&self, g: &GameGraph, steps: usize) -> Result<VertexId> {
        let all: Vec<u32> = self.step_actions()[..steps].iter().map(|&a| a as u32).collect();
        Ok(*walk(g, self.start, &all)?.last().unwrap())
    }

    /// Prefix action indices, then cycle action indices.
    pub fn step_actions(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.prefix.iter().map(|&a| a as usize).collect();
        if let LassoTail::Cycle(c) = &self.tail {
            out.extend(c.iter().map(|&a| a as usize));
        }
        out
    }

    /// Vertices visited by the prefix, including `start` and the prefix end.
    pub fn prefix_vertices(&self, g: &GameGraph) -> Result<Vec<VertexId>> {
        walk(g, self.start, &self.prefix)
    }

    /// The vertex where the tail begins: the terminal, or the cycle entry.
    pub fn tail_vertex(&self, g: &GameGraph) -> Result<VertexId> {
        Ok(*self.prefix_vertices(g)?.last().unwrap())
    }

    /// Cycle edges as (source vertex, action index), starting at the entry.
    pub fn cycle_steps(&self, g: &GameGraph) -> Result<Vec<(VertexId, usize)>> {
        let entry = self.tail_vertex(g)?;
        match &self.tail {
            LassoTail::Terminal => Ok(Vec::new()),
            LassoTail::Cycle(actions) => {
                let path = walk(g, entry, actions)?;
                Ok(path[..actions.len()]
                    .iter()
                    .zip(actions.iter())
                    .map(|(&v, &a)| (v, a as usize))
                    .collect())
            }
        }
    }

    /// Every decision vertex the play visits (with repetition, in visit
    /// order): prefix vertices and, for looping plays, the cycle vertices.
    pub fn visited_decision_vertices(&self, g: &GameGraph) -> Result<Vec<VertexId>> {
        let mut out: Vec<VertexId> = self
            .prefix_vertices(g)?
            .into_iter()
            .filter(|&v| !g.is_terminal(v))
            .collect();
        if let LassoTail::Cycle(_) = self.tail {
            // The entry is already in the prefix walk; add the interior.
            for (v, _) in self.cycle_steps(g)?.iter().skip(1) {
                out.push(*v);
            }
        }
        Ok(out)
    }

    /// The infinite sequence of movers' labels needed by monotonicity checks:
    /// decision vertices in visit order, with the cycle unrolled `unrollings`
    /// times.
    pub fn decision_sequence(&self, g: &GameGraph, unrollings: usize) -> Result<Vec<VertexId>> {
        let mut out: Vec<VertexId> = self
            .prefix_vertices(g)?
            .into_iter()
            .filter(|&v| !g.is_terminal(v))
            .collect();
        if let LassoTail::Cycle(_) = self.tail {
            let cycle: Vec<VertexId> = self.cycle_steps(g)?.iter().map(|&(v, _)| v).collect();
            for _ in 0..unrollings {
                out.extend(cycle.iter().copied());
            }
        }
        Ok(out)
    }

    /// Deterministic comparison key: start vertex, then the flattened action
    /// sequence (prefix followed by cycle), then the prefix length, then the
    /// tail kind. "Lexicographically smallest lasso" always means smallest
    /// under this key.
    pub fn sort_key(&self) -> (VertexId, Vec<u32>, usize, u8) {
        let flat: Vec<u32> = {
            let mut f = self.prefix.clone();
            if let LassoTail::Cycle(c) = &self.tail {
                f.extend_from_slice(c);
            }
            f
        };
        let kind = match self.tail {
            LassoTail::Terminal => 0,
            LassoTail::Cycle(_) => 1,
        };
        (self.start, flat, self.prefix.len(), kind)
    }

    /// Canonical lassos are the unique representatives enumerable by bounded
    /// search: the walk may revisit at most one vertex, the first revisit
    /// either closes the cycle (looping plays) or is followed only by fresh
    /// vertices on the way to the terminal (terminating plays).
    pub fn is_canonical(&self, g: &GameGraph) -> Result<bool> {
        let prefix_path = self.prefix_vertices(g)?;
        match &self.tail {
            LassoTail::Terminal => {
                let mut seen: BTreeSet<VertexId> = BTreeSet::new();
                let mut repeated = false;
                for &v in &prefix_path {
                    if !seen.insert(v) {
                        if repeated {
                            return Ok(false);
                        }
                        repeated = true;
                    } else if repeated {
                        // Fine: fresh vertices may follow the single revisit.
                    }
                }
                Ok(true)
            }
            LassoTail::Cycle(_) => {
                let mut seen: BTreeSet<VertexId> = prefix_path.iter().copied().collect();
                if seen.len() != prefix_path.len() {
                    return Ok(false);
                }
                for (v, _) in self.cycle_steps(g)?.iter().skip(1) {
                    if !seen.insert(*v) {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    /// Rewrites a looping play into its minimal form: the cycle is reduced to
    /// its primitive root and rotated backwards into the prefix as far as the
    /// play allows. Plays already in minimal form come back unchanged.
    pub fn canonicalize(mut self, g: &GameGraph) -> Result<Lasso> {
        let LassoTail::Cycle(mut cycle) = self.tail.clone() else {
            return Ok(self);
        };
        let entry = self.tail_vertex(g)?;

        // Primitive root: the shortest period that also closes the walk.
        'root: for d in 1..cycle.len() {
            if cycle.len() % d != 0 {
                continue;
            }
            for i in d..cycle.len() {
                if cycle[i] != cycle[i - d] {
                    continue 'root;
                }
            }
            let head: Vec<u32> = cycle[..d].to_vec();
            let back = walk(g, entry, &head)?;
            if *back.last().unwrap() == entry {
                cycle = head;
                break;
            }
        }

        // Absorb: while the last prefix edge equals the last cycle edge,
        // rotate the cycle right and shorten the prefix.
        loop {
            let (Some(&pl), Some(&cl)) = (self.prefix.last(), cycle.last()) else { break };
            if pl != cl {
                break;
            }
            let pre_path = walk(g, self.start, &self.prefix)?;
            let cyc_entry = *pre_path.last().unwrap();
            let cyc_path = walk(g, cyc_entry, &cycle)?;
            let prefix_src = pre_path[pre_path.len() - 2];
            let cycle_src = cyc_path[cyc_path.len() - 2];
            if prefix_src != cycle_src {
                break;
            }
            self.prefix.pop();
            cycle.rotate_right(1);
        }
        self.tail = LassoTail::Cycle(cycle);
        self.validate(g)?;
        Ok(self)
    }

    /// Renders the play with explicit edges, e.g. `v1 -go-> v2 -stop-> t2`
    /// for a terminating play and `v1 -a-> [v2 -b-> v3 -c-> v2]` for a play
    /// that loops through the bracketed cycle forever.
    pub fn display(&self, g: &GameGraph) -> String {
        let path = self.prefix_vertices(g).expect("lasso validated at construction");
        let mut out = String::new();
        match &self.tail {
            LassoTail::Terminal => {
                for (i, &v) in path.iter().enumerate() {
                    if i > 0 {
                        out.push_str(&format!(" -{}-> ", g.actions(path[i - 1])[self.prefix[i - 1] as usize].label));
                    }
                    out.push_str(g.id(v));
                }
            }
            LassoTail::Cycle(_) => {
                for (i, &v) in path[..path.len() - 1].iter().enumerate() {
                    out.push_str(g.id(v));
                    out.push_str(&format!(" -{}-> ", g.actions(v)[self.prefix[i] as usize].label));
                }
                let entry = *path.last().unwrap();
                out.push('[');
                out.push_str(g.id(entry));
                for (v, a) in self.cycle_steps(g).expect("validated") {
                    let act = &g.actions(v)[a];
                    out.push_str(&format!(" -{}-> ", act.label));
                    out.push_str(g.id(act.target));
                }
                out.push(']');
            }
        }
        out
    }

    /// Parses the [`Lasso::display`] form back against a graph.
    pub fn parse(g: &GameGraph, text: &str) -> Result<Lasso> {
        let bad = |msg: &str| Error::InvalidLasso(format!("{msg} in `{text}`"));
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.is_empty() {
            return Err(bad("empty lasso"));
        }

        // Split off bracket markers, remembering where the cycle starts.
        let mut cycle_opens_at: Option<usize> = None;
        let mut parts: Vec<String> = Vec::new();
        for tok in &tokens {
            let mut t = *tok;
            if let Some(rest) = t.strip_prefix('[') {
                if cycle_opens_at.is_some() {
                    return Err(bad("nested `[`"));
                }
                cycle_opens_at = Some(parts.len());
                t = rest;
            }
            let t = match t.strip_suffix(']') {
                Some(rest) => {
                    if cycle_opens_at.is_none() {
                        return Err(bad("unmatched `]`"));
                    }
                    rest
                }
                None => t,
            };
            parts.push(t.to_string());
        }

        // parts alternate: id, -label->, id, -label->, ..., id
        if parts.len() % 2 == 0 {
            return Err(bad("expected alternating vertices and `-label->` arrows"));
        }
        let mut vertices: Vec<VertexId> = Vec::new();
        let mut labels: Vec<String> = Vec::new();
        for (i, p) in parts.iter().enumerate() {
            if i % 2 == 0 {
                vertices.push(g.require_vertex(p)?);
            } else {
                let inner = p
                    .strip_prefix('-')
                    .and_then(|s| s.strip_suffix("->"))
                    .ok_or_else(|| bad("expected `-label->` arrow"))?;
                labels.push(inner.to_string());
            }
        }

        let mut actions: Vec<usize> = Vec::new();
        for (i, label) in labels.iter().enumerate() {
            actions.push(g.action_index(vertices[i], label)?);
        }

        match cycle_opens_at {
            None => Lasso::terminal(g, vertices[0], actions),
            Some(open) => {
                if open % 2 != 0 {
                    return Err(bad("`[` must precede a vertex"));
                }
                let entry_pos = open / 2;
                if *vertices.last().unwrap() != vertices[entry_pos] {
                    return Err(bad("cycle does not close at its entry"));
                }
                if entry_pos == vertices.len() - 1 {
                    return Err(bad("empty cycle"));
                }
                // When a prefix is present its last vertex is written once,
                // as the bracket's opening vertex.
                let (start, prefix, cycle) = if entry_pos == 0 {
                    (vertices[0], Vec::new(), actions)
                } else {
                    let prefix = actions[..entry_pos].to_vec();
                    let cycle = actions[entry_pos..].to_vec();
                    (vertices[0], prefix, cycle)
                };
                Lasso::cycle(g, start, prefix, cycle)
            }
        }
    }
}

impl PartialOrd for Lasso {
    fn partial_cmp(&self, other: &Lasso) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Lasso {
    fn cmp(&self, other: &Lasso) -> std::cmp::Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

/// Follows `actions` from `start`, returning every vertex on the way
/// (`actions.len() + 1` entries). Errors if a step leaves a terminal or uses
/// an out-of-range action index.
pub(crate) fn walk(g: &GameGraph, start: VertexId, actions: &[u32]) -> Result<Vec<VertexId>> {
    let mut path = Vec::with_capacity(actions.len() + 1);
    path.push(start);
    let mut cur = start;
    for &a in actions {
        let acts = g.actions(cur);
        if g.is_terminal(cur) {
            return Err(Error::InvalidLasso(format!(
                "play continues past terminal `{}`",
                g.id(cur)
            )));
        }
        let a = a as usize;
        if a >= acts.len() {
            return Err(Error::InvalidLasso(format!(
                "action index {a} out of range at `{}`",
                g.id(cur)
            )));
        }
        cur = acts[a].target;
        path.push(cur);
    }
    Ok(path)
}
