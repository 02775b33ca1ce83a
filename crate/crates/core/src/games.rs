//! The six games over a finite Gowers space, truncated at a finite horizon.
//!
//! Adversarial (`A`, `B`) and Kastanas (`K`) games open with a subspace from
//! II and then alternate `(point, subspace)` moves; II's last move is a bare
//! point since nothing follows it. Asymptotic (`F`), Gowers (`G`) and strong
//! asymptotic (`SF`) games alternate a subspace from I with a point (or a
//! precompact set) from II.

use std::cell::OnceCell;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::payoff::{Domain, Payoff};
use crate::space::{PointId, SpaceInstance, SubspaceId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GameKind {
    A,
    B,
    K,
    F,
    G,
    SF,
}

impl GameKind {
    pub const ALL: [GameKind; 6] = [GameKind::A, GameKind::B, GameKind::K, GameKind::F, GameKind::G, GameKind::SF];

    pub fn is_adversarial(self) -> bool {
        matches!(self, GameKind::A | GameKind::B | GameKind::K)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    I,
    II,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::I => Player::II,
            Player::II => Player::I,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Move {
    PointSub { point: PointId, sub: SubspaceId },
    Point { point: PointId },
    Sub { sub: SubspaceId },
    Set { set: usize },
}

impl Move {
    pub fn point(&self) -> Option<PointId> {
        match *self {
            Move::PointSub { point, .. } | Move::Point { point } => Some(point),
            _ => None,
        }
    }

    pub fn sub(&self) -> Option<SubspaceId> {
        match *self {
            Move::PointSub { sub, .. } | Move::Sub { sub } => Some(sub),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MoveRecord {
    pub player: Player,
    #[serde(rename = "move")]
    pub mv: Move,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Game {
    pub kind: GameKind,
    pub root: SubspaceId,
    /// Number of rounds. Outcomes of `A`, `B`, `K` have length `2 * horizon`.
    pub horizon: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Expect {
    Sub,
    PointSub,
    Point,
    Set,
}

impl Game {
    pub fn new(kind: GameKind, root: SubspaceId, horizon: usize) -> Self {
        Game { kind, root, horizon }
    }

    pub fn outcome_len(&self) -> usize {
        if self.kind.is_adversarial() {
            2 * self.horizon
        } else {
            self.horizon
        }
    }

    /// Total number of moves in a complete play.
    pub fn total_moves(&self) -> usize {
        if self.kind.is_adversarial() {
            2 * self.horizon + 1
        } else {
            2 * self.horizon
        }
    }

    pub(crate) fn phase(&self, idx: usize) -> Option<(Player, Expect)> {
        if idx >= self.total_moves() {
            return None;
        }
        Some(if self.kind.is_adversarial() {
            if idx == 0 {
                (Player::II, Expect::Sub)
            } else if idx % 2 == 1 {
                (Player::I, Expect::PointSub)
            } else if idx == self.total_moves() - 1 {
                (Player::II, Expect::Point)
            } else {
                (Player::II, Expect::PointSub)
            }
        } else if idx % 2 == 0 {
            (Player::I, Expect::Sub)
        } else if self.kind == GameKind::SF {
            (Player::II, Expect::Set)
        } else {
            (Player::II, Expect::Point)
        })
    }

    /// Whether the legal moves at `idx` depend on the previous move's subspace.
    pub(crate) fn uses_prev(&self, idx: usize) -> bool {
        !(idx == 0 || (!self.kind.is_adversarial() && idx % 2 == 0))
    }

    pub fn domain(&self) -> Domain {
        if self.kind == GameKind::SF {
            Domain::Sets
        } else {
            Domain::Points
        }
    }

    /// Checks that a payoff fits this game's outcomes.
    pub fn check_payoff(&self, payoff: &Payoff) -> Result<()> {
        if payoff.domain() != self.domain() || payoff.len() != self.outcome_len() {
            return Err(Error::GameMismatch(format!(
                "payoff {:?} of length {} ({:?}) does not fit a {:?} game with outcomes of length {}",
                payoff.name(),
                payoff.len(),
                payoff.domain(),
                self.kind,
                self.outcome_len()
            )));
        }
        Ok(())
    }

    pub fn check_space(&self, space: &SpaceInstance) -> Result<()> {
        if self.root >= space.num_subspaces() {
            return Err(Error::GameMismatch(format!("root {} is not in the palette", self.root)));
        }
        if self.kind == GameKind::SF && space.system().is_none() {
            return Err(Error::GameMismatch("SF games need a precompact system".into()));
        }
        Ok(())
    }
}

/// Subspace lists a game keeps consulting, computed once.
pub(crate) struct MoveCache {
    pub below_root: Vec<SubspaceId>,
    pub approx_root: Vec<SubspaceId>,
    below: Vec<OnceCell<Vec<SubspaceId>>>,
}

impl MoveCache {
    pub fn new(space: &SpaceInstance, game: &Game) -> Self {
        MoveCache {
            below_root: space.palette().below(game.root),
            approx_root: space.palette().lessapprox_below(game.root),
            below: (0..space.num_subspaces()).map(|_| OnceCell::new()).collect(),
        }
    }

    pub fn below(&self, space: &SpaceInstance, p: SubspaceId) -> &[SubspaceId] {
        self.below[p].get_or_init(|| space.palette().below(p))
    }
}

/// Calls `f` on every legal move at move index `idx`, in canonical order.
/// `history` holds the points (or set ids, for `SF`) played so far and `prev`
/// the subspace carried by the previous move.
pub(crate) fn for_each_legal<B>(
    space: &SpaceInstance,
    cache: &MoveCache,
    game: &Game,
    idx: usize,
    history: &[usize],
    prev: Option<SubspaceId>,
    mut f: impl FnMut(Move) -> ControlFlow<B>,
) -> ControlFlow<B> {
    let Some((player, expect)) = game.phase(idx) else {
        return ControlFlow::Continue(());
    };
    let kind = game.kind;
    let subs: &[SubspaceId] = match (kind, player, expect) {
        (GameKind::A, Player::II, _) | (GameKind::B, Player::I, _) | (GameKind::G, _, _) => &cache.below_root,
        (GameKind::K, Player::II, Expect::Sub) => &cache.below_root,
        (GameKind::A, Player::I, _) | (GameKind::B, Player::II, _) | (GameKind::F | GameKind::SF, _, _) => {
            &cache.approx_root
        }
        (GameKind::K, _, _) => cache.below(space, prev.expect("Kastanas moves follow a subspace")),
    };
    match expect {
        Expect::Sub => {
            for &s in subs {
                f(Move::Sub { sub: s })?;
            }
        }
        Expect::PointSub | Expect::Point => {
            let prev = prev.expect("point moves follow a subspace");
            let next = space.next_points(history, prev);
            for x in next.ones() {
                if expect == Expect::Point {
                    f(Move::Point { point: x })?;
                } else {
                    for &s in subs {
                        f(Move::PointSub { point: x, sub: s })?;
                    }
                }
            }
        }
        Expect::Set => {
            let prev = prev.expect("set moves follow a subspace");
            let system = space.system().expect("SF games carry a system");
            let admitted = space.next_points(&[], prev);
            for k in 0..system.len() {
                if system.set(k).is_subset(&admitted) {
                    f(Move::Set { set: k })?;
                }
            }
        }
    }
    ControlFlow::Continue(())
}

/// Direct legality test, equivalent to membership in [`for_each_legal`].
pub(crate) fn is_legal(
    space: &SpaceInstance,
    game: &Game,
    idx: usize,
    history: &[usize],
    prev: Option<SubspaceId>,
    mv: &Move,
) -> bool {
    let Some((player, expect)) = game.phase(idx) else {
        return false;
    };
    let pal = space.palette();
    let root = game.root;
    let sub_ok = |s: SubspaceId| -> bool {
        if s >= pal.len() {
            return false;
        }
        match (game.kind, player, expect) {
            (GameKind::A, Player::II, _) | (GameKind::B, Player::I, _) | (GameKind::G, _, _) => pal.leq(s, root),
            (GameKind::K, Player::II, Expect::Sub) => pal.leq(s, root),
            (GameKind::A, Player::I, _) | (GameKind::B, Player::II, _) | (GameKind::F | GameKind::SF, _, _) => {
                pal.lessapprox(s, root)
            }
            (GameKind::K, _, _) => prev.is_some_and(|p| pal.leq(s, p)),
        }
    };
    let point_ok = |x: PointId| -> bool {
        x < space.num_points() && prev.is_some_and(|p| space.next_points(history, p).contains(x))
    };
    match (expect, mv) {
        (Expect::Sub, Move::Sub { sub }) => sub_ok(*sub),
        (Expect::PointSub, Move::PointSub { point, sub }) => point_ok(*point) && sub_ok(*sub),
        (Expect::Point, Move::Point { point }) => point_ok(*point),
        (Expect::Set, Move::Set { set }) => match (space.system(), prev) {
            (Some(system), Some(p)) => *set < system.len() && system.set(*set).is_subset(&space.next_points(&[], p)),
            _ => false,
        },
        _ => false,
    }
}

/// A position: the game plus the moves made so far.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GamePosition {
    pub game: Game,
    pub moves: Vec<MoveRecord>,
    /// Points played so far (set ids for `SF`).
    pub outcome_prefix: Vec<usize>,
}

impl GamePosition {
    pub fn initial(game: Game) -> Self {
        GamePosition {
            game,
            moves: Vec::new(),
            outcome_prefix: Vec::new(),
        }
    }

    /// Replays a move list, checking each move.
    pub fn replay(space: &SpaceInstance, game: Game, moves: &[MoveRecord]) -> Result<Self> {
        game.check_space(space)?;
        let mut pos = GamePosition::initial(game);
        for m in moves {
            pos = apply_move(space, &pos, *m)?;
        }
        Ok(pos)
    }

    /// Number of points (or sets) played.
    pub fn depth(&self) -> usize {
        self.outcome_prefix.len()
    }

    pub fn is_terminal(&self) -> bool {
        self.moves.len() >= self.game.total_moves()
    }

    pub fn to_move(&self) -> Option<Player> {
        self.game.phase(self.moves.len()).map(|(p, _)| p)
    }

    pub(crate) fn prev_sub(&self) -> Option<SubspaceId> {
        self.moves.last().and_then(|m| m.mv.sub())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("positions serialize")
    }
}

pub fn legal_moves(space: &SpaceInstance, pos: &GamePosition) -> Vec<MoveRecord> {
    let cache = MoveCache::new(space, &pos.game);
    let mut out = Vec::new();
    let player = pos.to_move();
    let _ = for_each_legal::<()>(
        space,
        &cache,
        &pos.game,
        pos.moves.len(),
        &pos.outcome_prefix,
        pos.prev_sub(),
        |mv| {
            out.push(MoveRecord {
                player: player.unwrap(),
                mv,
            });
            ControlFlow::Continue(())
        },
    );
    out
}

pub fn apply_move(space: &SpaceInstance, pos: &GamePosition, record: MoveRecord) -> Result<GamePosition> {
    let idx = pos.moves.len();
    let illegal = |why: &str| {
        Error::IllegalMove(format!(
            "{why}: {} at move {idx} of {:?}",
            serde_json::to_string(&record).unwrap(),
            pos.game
        ))
    };
    match pos.to_move() {
        None => return Err(illegal("the game is over")),
        Some(p) if p != record.player => return Err(illegal("not this player's turn")),
        _ => {}
    }
    if !is_legal(space, &pos.game, idx, &pos.outcome_prefix, pos.prev_sub(), &record.mv) {
        return Err(illegal("move breaks the rules"));
    }
    let mut next = pos.clone();
    next.moves.push(record);
    match record.mv {
        Move::Point { point } | Move::PointSub { point, .. } => next.outcome_prefix.push(point),
        Move::Set { set } => next.outcome_prefix.push(set),
        Move::Sub { .. } => {}
    }
    Ok(next)
}

pub fn play_outcome(pos: &GamePosition) -> Result<&[usize]> {
    if pos.is_terminal() {
        Ok(&pos.outcome_prefix)
    } else {
        Err(Error::NotTerminal)
    }
}
