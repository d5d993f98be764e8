//! The robots' compute function: task selection and the moves of every task.

mod frame;
mod moves;
mod pattern;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::configspace::{Configuration, ViewFrame};
use crate::error::{Error, Result};
use crate::hexgrid::HexVertex;

pub use frame::{Embedding, GuardFrame, RowBalance, RowStats};
pub use moves::Conclusive;
pub use pattern::{build_pattern, Formation, Pattern};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TaskId {
    T1a,
    T1b,
    T1c,
    T2,
    T3,
    T4,
    T5,
}

impl TaskId {
    pub const ALL: [TaskId; 7] =
        [TaskId::T1a, TaskId::T1b, TaskId::T1c, TaskId::T2, TaskId::T3, TaskId::T4, TaskId::T5];

    pub fn successors(self) -> &'static [TaskId] {
        use TaskId::*;
        match self {
            T1a => &[T1a, T1b],
            T1b => &[T1b, T2, T3, T4],
            T1c => &[T2, T3, T4, T5],
            T2 => &[T2, T3, T4, T5],
            T3 => &[T3, T4, T5],
            T4 => &[T4, T5],
            T5 => &[T5],
        }
    }

    pub fn may_follow(self, prev: TaskId) -> bool {
        prev.successors().contains(&self)
    }
}

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for TaskId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TaskId::ALL
            .into_iter()
            .find(|t| t.to_string() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown task {s:?}")))
    }
}

/// One robot's decision for a round. `to == from` is the nil move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MoveIntent {
    pub from: HexVertex,
    pub to: HexVertex,
}

impl MoveIntent {
    pub fn is_nil(&self) -> bool {
        self.from == self.to
    }
}

/// Task and non-nil moves as dense ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Decision {
    pub task: TaskId,
    pub moves: Vec<(usize, usize)>,
}

/// Everything derived from one snapshot before choosing a task.
struct Snapshot<'a, 'g> {
    c: &'a Configuration<'g>,
    f: &'a Formation<'g>,
    view: ViewFrame<'g>,
    corner_robots: usize,
    perimeter_robots: usize,
}

impl<'a, 'g> Snapshot<'a, 'g> {
    fn new(c: &'a Configuration<'g>, f: &'a Formation<'g>) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::InvalidInput("no robots".into()));
        }
        if c.len() != f.pattern().len() {
            return Err(Error::InvalidInput(format!(
                "{} robots but the pattern has {} targets",
                c.len(),
                f.pattern().len()
            )));
        }
        let g = c.grid();
        let corner_robots = g.corner_ids().iter().filter(|&&v| c.has(v)).count();
        let perimeter_robots = c.ids().filter(|&v| g.is_perimeter(v)).count();
        Ok(Snapshot { c, f, view: ViewFrame::new(c), corner_robots, perimeter_robots })
    }
}

enum Plan<'g> {
    Formed,
    Finish(Conclusive),
    Rows(GuardFrame<'g>, RowStats),
    Drain,
    ToCorner,
    ToSide,
}

fn plan<'g>(s: &Snapshot<'_, 'g>) -> Result<Plan<'g>> {
    if s.f.is_formed(s.c) {
        return Ok(Plan::Formed);
    }
    if let Some(con) = moves::conclusive_embedding(s.c, s.f, &s.view) {
        return Ok(Plan::Finish(con));
    }
    let rho = s.view.rho();
    if s.corner_robots == rho {
        let frame = GuardFrame::with_rho(s.c, rho)?;
        let emb = frame.embedding(s.f)?;
        let stats = RowStats::compute(s.c, s.f, &frame, &emb)?;
        return Ok(Plan::Rows(frame, stats));
    }
    if s.corner_robots > rho {
        return Ok(Plan::Drain);
    }
    if s.perimeter_robots >= rho && s.corner_robots == 0 {
        return Ok(Plan::ToCorner);
    }
    if s.perimeter_robots == 0 {
        return Ok(Plan::ToSide);
    }
    Err(Error::Invariant(format!(
        "no task applies: {} perimeter robots, {} corner robots, symmetricity {rho}",
        s.perimeter_robots, s.corner_robots
    )))
}

pub fn compute_task(c: &Configuration<'_>, f: &Formation<'_>) -> Result<TaskId> {
    let s = Snapshot::new(c, f)?;
    Ok(task_of(&plan(&s)?))
}

fn task_of(p: &Plan<'_>) -> TaskId {
    match p {
        Plan::Formed => TaskId::T5,
        Plan::Finish(_) => TaskId::T4,
        Plan::Rows(_, stats) if stats.balanced() => TaskId::T3,
        Plan::Rows(..) => TaskId::T2,
        Plan::Drain => TaskId::T1c,
        Plan::ToCorner => TaskId::T1b,
        Plan::ToSide => TaskId::T1a,
    }
}

pub(crate) fn decide(c: &Configuration<'_>, f: &Formation<'_>) -> Result<Decision> {
    let s = Snapshot::new(c, f)?;
    let p = plan(&s)?;
    let task = task_of(&p);
    let moves = match &p {
        Plan::Formed => Vec::new(),
        Plan::Finish(con) => moves::finish(c, f, &s.view, con),
        Plan::Rows(frame, stats) if stats.balanced() => moves::along_rows(c, frame, stats)?,
        Plan::Rows(frame, stats) => moves::along_columns(c, frame, stats)?,
        Plan::Drain => moves::along_special_paths(c, &s.view)?,
        Plan::ToCorner => moves::to_corner(c, &s.view),
        Plan::ToSide => moves::to_side(c, &s.view),
    };
    Ok(Decision { task, moves })
}

/// Task and non-nil move intents for one synchronous round.
pub fn compute_step(c: &Configuration<'_>, f: &Formation<'_>) -> Result<(TaskId, Vec<MoveIntent>)> {
    let g = c.grid();
    let d = decide(c, f)?;
    let mut intents: Vec<MoveIntent> =
        d.moves.iter().map(|&(a, b)| MoveIntent { from: g.vert(a), to: g.vert(b) }).collect();
    intents.sort();
    Ok((d.task, intents))
}

pub fn guard_frame<'g>(c: &Configuration<'g>) -> Result<GuardFrame<'g>> {
    GuardFrame::new(c)
}

pub fn forbidden_vertices(frame: &GuardFrame<'_>) -> Vec<HexVertex> {
    frame.forbidden_vertices()
}

pub fn embed_pattern(f: &Formation<'_>, frame: &GuardFrame<'_>) -> Result<Embedding> {
    frame.embedding(f)
}

pub fn row_stats(c: &Configuration<'_>, f: &Formation<'_>, frame: &GuardFrame<'_>) -> Result<RowStats> {
    let emb = frame.embedding(f)?;
    RowStats::compute(c, f, frame, &emb)
}

pub fn conclusive_embedding(c: &Configuration<'_>, f: &Formation<'_>) -> Option<Conclusive> {
    moves::conclusive_embedding(c, f, &ViewFrame::new(c))
}

pub fn is_formed(c: &Configuration<'_>, f: &Formation<'_>) -> bool {
    f.is_formed(c)
}

/// Whether `r` is stuck this round while moving along its column.
pub fn blocked(c: &Configuration<'_>, frame: &GuardFrame<'_>, stats: &RowStats, r: HexVertex) -> Result<bool> {
    let i = c.grid().idx(r)?;
    let outcome = moves::column_outcome(c, frame, stats);
    outcome.blocked_of(i).ok_or(Error::NotApplicable(r))
}
