//! Threat plays and the finite-memory strategy profile built from them.
//!
//! At the viability fixed point `α*`, every decision vertex `w` gets one
//! *threat play* per player: the least canonical `α*`-viable play from `w`
//! holding that player to the lowest payoff any viable play allows. The
//! profile starts on a root plan and keeps a one-plan memory: while everyone
//! plays along, the memory advances through the current plan; the moment a
//! player departs from it, the memory resets to the arrival vertex's threat
//! play against the deviator. Punishments are therefore not grim — they are
//! themselves viable plays, which is exactly why the profile survives
//! subgame-perfect scrutiny: whoever deviates is handed a continuation worth
//! no more than what they walked away from, and the other player still
//! clears their own viability floor along it.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::alpha::{self, AlphaLabels};
use crate::error::{Error, Result};
use crate::game::{GameGraph, Lasso, LassoTail, PlayerId, VertexId};

/// Two threat plays per decision vertex, keyed by the player they punish.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreatTable {
    threats: BTreeMap<(VertexId, PlayerId), Lasso>,
}

impl ThreatTable {
    /// The play adopted at `w` after `deviator` deviates into it.
    pub fn get(&self, w: VertexId, deviator: PlayerId) -> Option<&Lasso> {
        self.threats.get(&(w, deviator))
    }

    /// `((vertex, punished player), play)` entries in key order.
    pub fn entries(&self) -> impl Iterator<Item = ((VertexId, PlayerId), &Lasso)> {
        self.threats.iter().map(|(&k, l)| (k, l))
    }
}

/// The threat plays at every decision vertex: for each player, the least
/// viable play from there holding that player to their viable minimum. The
/// entry consulted at runtime is the one punishing whoever just deviated;
/// keying by the deviator rather than by the vertex's mover is what keeps
/// the construction sound when a deviation lands on the deviator's own
/// vertex or another vertex of the same player.
pub fn threat_table(g: &GameGraph, labels: &AlphaLabels) -> Result<ThreatTable> {
    let mut threats = BTreeMap::new();
    for w in g.decision_vertices() {
        for punished in [PlayerId::P1, PlayerId::P2] {
            let (_, play) = alpha::viable_min_witness(g, labels, w, punished)?;
            threats.insert((w, punished), play);
        }
    }
    Ok(ThreatTable { threats })
}

/// How the root plan is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlanMode {
    /// The root's own threat play against the root mover's opponent: the
    /// default, and the play the construction's guarantees are stated for.
    RootThreat,
    /// Among outcomes realizable by viable plays from the root, pick one
    /// maximizing the payoff sum, then the least play realizing it.
    MaxWelfare,
}

impl PlanMode {
    pub fn as_str(self) -> &'static str {
        match self {
            PlanMode::RootThreat => "root-threat",
            PlanMode::MaxWelfare => "max-welfare",
        }
    }

    pub fn parse(text: &str) -> Result<PlanMode> {
        match text {
            "root-threat" => Ok(PlanMode::RootThreat),
            "max-welfare" => Ok(PlanMode::MaxWelfare),
            other => Err(Error::InvalidProfile(format!("unknown plan mode `{other}`"))),
        }
    }
}

/// Which plan the profile is currently executing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PlanKey {
    /// The root plan.
    Root,
    /// The named vertex's threat play against the named player.
    Threat(VertexId, PlayerId),
    /// The play has reached a terminal; nothing is ever prescribed again.
    Done,
}

/// A profile memory state: a plan and a position inside it. Positions index
/// the plan's flattened action list and stay normalized, so a looping plan
/// has finitely many distinct memories.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProfileMemory {
    pub key: PlanKey,
    pub pos: usize,
}

impl ProfileMemory {
    /// Human-readable rendering: `root@0`, `threat(v2,P1)@1`, or `done`.
    pub fn describe(&self, g: &GameGraph) -> String {
        match self.key {
            PlanKey::Root => format!("root@{}", self.pos),
            PlanKey::Threat(w, punished) => {
                format!("threat({},{})@{}", g.id(w), punished, self.pos)
            }
            PlanKey::Done => "done".to_string(),
        }
    }
}

/// The constructed strategy profile for both players: follow the current
/// plan; on any departure from it, switch to the arrival vertex's threat
/// play against whoever departed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategyProfile {
    mode: PlanMode,
    root_plan: Lasso,
    threats: ThreatTable,
}

impl StrategyProfile {
    pub fn mode(&self) -> PlanMode {
        self.mode
    }

    pub fn root_plan(&self) -> &Lasso {
        &self.root_plan
    }

    pub fn threats(&self) -> &ThreatTable {
        &self.threats
    }

    fn plan(&self, key: PlanKey) -> Option<&Lasso> {
        match key {
            PlanKey::Root => Some(&self.root_plan),
            PlanKey::Threat(w, punished) => self.threats.get(w, punished),
            PlanKey::Done => None,
        }
    }

    /// The memory the profile starts with when play begins at `from`: the
    /// root plan at the root; anywhere else the local threat play against
    /// the opponent of `from`'s mover — the plan a subgame examination
    /// starts under.
    pub fn initial_memory(&self, g: &GameGraph, from: VertexId) -> ProfileMemory {
        if g.is_terminal(from) {
            ProfileMemory { key: PlanKey::Done, pos: 0 }
        } else if from == g.root() {
            ProfileMemory { key: PlanKey::Root, pos: 0 }
        } else {
            let punished = g
                .controller(from)
                .expect("non-terminal vertex has a controller")
                .opponent();
            ProfileMemory { key: PlanKey::Threat(from, punished), pos: 0 }
        }
    }

    /// The action index the current plan prescribes; `None` once done.
    pub fn planned_action(&self, m: ProfileMemory) -> Option<usize> {
        let plan = self.plan(m.key)?;
        plan.step_actions().get(m.pos).copied()
    }

    /// The vertex the memory believes play is at; `None` once done.
    pub fn memory_vertex(&self, g: &GameGraph, m: ProfileMemory) -> Result<Option<VertexId>> {
        match self.plan(m.key) {
            None => Ok(None),
            Some(plan) => Ok(Some(plan.vertex_at(g, m.pos)?)),
        }
    }

    /// The memory after the mover at `v` takes `action` while the profile is
    /// in memory `m`. Following the plan advances it (wrapping inside a
    /// looping plan); anything else counts as a deviation by `v`'s mover and
    /// resets the memory to the arrival vertex's threat play against them.
    /// Arriving at a terminal retires the memory.
    pub fn transition(
        &self,
        g: &GameGraph,
        v: VertexId,
        m: ProfileMemory,
        action: usize,
    ) -> Result<ProfileMemory> {
        let target = g
            .actions(v)
            .get(action)
            .ok_or_else(|| Error::UnknownAction {
                vertex: g.id(v).to_string(),
                action: format!("#{action}"),
            })?
            .target;
        if g.is_terminal(target) {
            return Ok(ProfileMemory { key: PlanKey::Done, pos: 0 });
        }
        let on_plan = self.memory_vertex(g, m)? == Some(v)
            && self.planned_action(m) == Some(action);
        if !on_plan {
            let deviator = g.controller(v)?;
            return Ok(ProfileMemory { key: PlanKey::Threat(target, deviator), pos: 0 });
        }
        let plan = self.plan(m.key).expect("on-plan memory has a plan");
        let mut pos = m.pos + 1;
        if let LassoTail::Cycle(_) = plan.tail() {
            let (pre, cyc) = (plan.prefix_len(), plan.cycle_len());
            if pos >= pre + cyc {
                pos = pre + (pos - pre) % cyc;
            }
        }
        Ok(ProfileMemory { key: m.key, pos })
    }

    /// The play that unfolds from `from` when both players follow the
    /// profile: exactly the plan of the initial memory.
    pub fn induced_play(&self, g: &GameGraph, from: VertexId) -> Result<Lasso> {
        let m = self.initial_memory(g, from);
        match self.plan(m.key) {
            Some(plan) => Ok(plan.clone()),
            None => Lasso::terminal(g, from, vec![]),
        }
    }
}

/// Builds the profile from scratch: runs the viability fixed point, derives
/// the threat table, and picks the root plan per `mode`.
pub fn build_profile(g: &GameGraph, mode: PlanMode) -> Result<StrategyProfile> {
    let labels = alpha::alpha_fixed_point(g)?.labels;
    build_profile_with(g, &labels, mode)
}

/// Same, reusing an already-computed stationary labeling.
pub fn build_profile_with(
    g: &GameGraph,
    labels: &AlphaLabels,
    mode: PlanMode,
) -> Result<StrategyProfile> {
    let threats = threat_table(g, labels)?;
    let root = g.root();
    let root_plan = match mode {
        PlanMode::RootThreat => {
            if g.is_terminal(root) {
                Lasso::terminal(g, root, vec![])?
            } else {
                let punished = g.controller(root)?.opponent();
                threats
                    .get(root, punished)
                    .expect("every decision vertex has threat plays")
                    .clone()
            }
        }
        PlanMode::MaxWelfare => {
            let payoffs = alpha::viable_payoffs(g, labels, root)?;
            let best = payoffs
                .iter()
                .map(|p| p.welfare())
                .max()
                .ok_or_else(|| Error::EmptyViability(g.id(root).to_string()))?;
            let mut candidate: Option<Lasso> = None;
            for p in payoffs {
                if p.welfare() != best {
                    continue;
                }
                let w = alpha::viable_exact_witness(g, labels, root, p)?
                    .expect("achievable payoff has a witness");
                candidate = Some(match candidate {
                    None => w,
                    Some(c) => c.min(w),
                });
            }
            candidate.expect("some payoff achieves the maximum")
        }
    };
    Ok(StrategyProfile { mode, root_plan, threats })
}

/// One vertex's threat plays in serialized form, keyed by the punished
/// player.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThreatPlays {
    /// The play adopted here after P1 deviates; it holds P1 to the minimum.
    #[serde(rename = "P1")]
    pub against_p1: String,
    /// The play adopted here after P2 deviates.
    #[serde(rename = "P2")]
    pub against_p2: String,
}

/// Serialized form of a profile: plays as their display strings, threats
/// keyed by vertex id and punished player. This is what `spe --json` emits
/// and `verify --profile` reads back.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileDoc {
    pub plan_mode: String,
    pub root_plan: String,
    pub threats: BTreeMap<String, ThreatPlays>,
}

impl StrategyProfile {
    pub fn to_doc(&self, g: &GameGraph) -> ProfileDoc {
        let mut threats: BTreeMap<String, ThreatPlays> = BTreeMap::new();
        for ((v, punished), play) in self.threats.entries() {
            let entry = threats.entry(g.id(v).to_string()).or_insert_with(|| ThreatPlays {
                against_p1: String::new(),
                against_p2: String::new(),
            });
            match punished {
                PlayerId::P1 => entry.against_p1 = play.display(g),
                PlayerId::P2 => entry.against_p2 = play.display(g),
            }
        }
        ProfileDoc {
            plan_mode: self.mode.as_str().to_string(),
            root_plan: self.root_plan.display(g),
            threats,
        }
    }

    /// Parses and validates a profile document against a game. The plays
    /// need not be the constructed ones — verification of hand-edited
    /// profiles is the point — but they must be structurally sound: every
    /// decision vertex needs both threat plays starting there, and the root
    /// plan must start at the root.
    pub fn from_doc(g: &GameGraph, doc: &ProfileDoc) -> Result<StrategyProfile> {
        let mode = PlanMode::parse(&doc.plan_mode)?;
        let root_plan = Lasso::parse(g, &doc.root_plan)?;
        if root_plan.start() != g.root() {
            return Err(Error::InvalidProfile(format!(
                "root plan must start at the root `{}`",
                g.id(g.root())
            )));
        }
        let mut threats = BTreeMap::new();
        for (id, plays) in &doc.threats {
            let v = g.require_vertex(id)?;
            if g.is_terminal(v) {
                return Err(Error::InvalidProfile(format!(
                    "terminal `{id}` cannot carry threat plays"
                )));
            }
            for (punished, text) in
                [(PlayerId::P1, &plays.against_p1), (PlayerId::P2, &plays.against_p2)]
            {
                let play = Lasso::parse(g, text)?;
                if play.start() != v {
                    return Err(Error::InvalidProfile(format!(
                        "threat play for `{id}` starts at `{}`",
                        g.id(play.start())
                    )));
                }
                threats.insert((v, punished), play);
            }
        }
        for v in g.decision_vertices() {
            if !threats.contains_key(&(v, PlayerId::P1)) {
                return Err(Error::InvalidProfile(format!(
                    "missing threat plays for `{}`",
                    g.id(v)
                )));
            }
        }
        Ok(StrategyProfile { mode, root_plan, threats: ThreatTable { threats } })
    }
}
