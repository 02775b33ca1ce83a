use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::{Game, GameKind, Player};
use crate::payoff::Payoff;
use crate::solver::solve;
use crate::space::{SpaceInstance, SubspaceId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DichotomyFlavor {
    /// I forces `X` in `A_q`, or II forces `Xᶜ` in `B_q`.
    Adversarial,
    /// I forces `Xᶜ` in `F_q`, or II forces `X` in `G_q`.
    Strategic,
}

#[derive(Clone, Debug, Serialize)]
pub struct GameVerdict {
    pub game: GameKind,
    pub goal_owner: Player,
    pub target: String,
    pub goal_won: bool,
    pub nodes: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DichotomyRow {
    pub q: SubspaceId,
    pub label: String,
    pub first: GameVerdict,
    pub second: GameVerdict,
    /// Whether either side wins below `q`.
    pub realized: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DichotomyReport {
    pub flavor: DichotomyFlavor,
    pub payoff: String,
    pub root: SubspaceId,
    pub rows: Vec<DichotomyRow>,
    pub realizing: Vec<SubspaceId>,
}

fn verdict(space: &SpaceInstance, game: Game, target: &Payoff, owner: Player, budget: u64) -> Result<GameVerdict> {
    let r = solve(space, game, target, owner, budget)?;
    Ok(GameVerdict {
        game: game.kind,
        goal_owner: owner,
        target: target.name().to_string(),
        goal_won: r.goal_won(),
        nodes: r.nodes_expanded,
    })
}

/// Solves the pair of games of `flavor` below every `q <= p` and reports
/// which `q` realize one side of the dichotomy. Rows follow palette order.
pub fn check_ramsey_dichotomy(
    space: &SpaceInstance,
    payoff: &Payoff,
    p: SubspaceId,
    flavor: DichotomyFlavor,
    budget: u64,
) -> Result<DichotomyReport> {
    let (kinds, horizon) = match flavor {
        DichotomyFlavor::Adversarial => {
            if payoff.len() % 2 != 0 {
                return Err(Error::GameMismatch("adversarial payoffs have even length".into()));
            }
            ((GameKind::A, GameKind::B), payoff.len() / 2)
        }
        DichotomyFlavor::Strategic => ((GameKind::F, GameKind::G), payoff.len()),
    };
    let complement = payoff.complement();
    let (first_target, second_target) = match flavor {
        DichotomyFlavor::Adversarial => (payoff, &complement),
        DichotomyFlavor::Strategic => (&complement, payoff),
    };
    let qs = space.palette().below(p);
    let rows = qs
        .par_iter()
        .map(|&q| {
            let first = verdict(space, Game::new(kinds.0, q, horizon), first_target, Player::I, budget)?;
            let second = verdict(space, Game::new(kinds.1, q, horizon), second_target, Player::II, budget)?;
            Ok(DichotomyRow {
                q,
                label: space.palette().subspace(q).label.clone(),
                realized: first.goal_won || second.goal_won,
                first,
                second,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let realizing = rows.iter().filter(|r| r.realized).map(|r| r.q).collect();
    Ok(DichotomyReport {
        flavor,
        payoff: payoff.name().to_string(),
        root: p,
        rows,
        realizing,
    })
}
