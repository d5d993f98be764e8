//! Synchronous Look-Compute-Move scheduler, traces and trace validation.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, Write};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::configspace::{symmetricity, Configuration};
use crate::error::{Error, Result};
use crate::gmvalgo::{decide, Formation, MoveIntent, TaskId};
use crate::hexgrid::{Grid, HexVertex};
use crate::visibility::{is_mutual_visibility_set, VertexSet};

/// Self-loops of one task longer than this many multiples of k are reported.
pub const SELF_LOOP_FACTOR: usize = 25;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub task: TaskId,
    /// Non-nil moves only.
    pub moves: Vec<MoveIntent>,
    /// Occupancy after the moves.
    pub robots: Vec<HexVertex>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Formed,
    Timeout,
    Error(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub k: usize,
    pub rho: usize,
    pub seed: Option<u64>,
    pub pattern: Vec<HexVertex>,
    pub initial: Vec<HexVertex>,
    pub records: Vec<RoundRecord>,
    pub outcome: Outcome,
}

impl Trace {
    pub fn n(&self) -> usize {
        self.initial.len()
    }

    pub fn rounds(&self) -> usize {
        self.records.len()
    }

    pub fn final_robots(&self) -> &[HexVertex] {
        self.records.last().map_or(&self.initial, |r| &r.robots)
    }
}

/// Moves `c` by `moves`, rejecting anything that is not a legal synchronous step.
pub(crate) fn apply<'g>(c: &Configuration<'g>, moves: &[(usize, usize)]) -> Result<Configuration<'g>> {
    let g = c.grid();
    let mut dests = HashSet::new();
    let mut sources = HashMap::new();
    for &(a, b) in moves {
        if !c.has(a) {
            return Err(Error::Collision(format!("move from empty vertex {}", g.vert(a))));
        }
        if a != b && !g.is_adjacent(a, b) {
            return Err(Error::Collision(format!("{} -> {} is not an edge", g.vert(a), g.vert(b))));
        }
        if sources.insert(a, b).is_some() {
            return Err(Error::Collision(format!("robot on {} moves twice", g.vert(a))));
        }
    }
    for &(a, b) in moves {
        if !dests.insert(b) {
            return Err(Error::Collision(format!("two robots enter {}", g.vert(b))));
        }
        if c.has(b) && !sources.contains_key(&b) {
            return Err(Error::Collision(format!("{} -> {} hits a robot that stays", g.vert(a), g.vert(b))));
        }
        if a != b && sources.get(&b) == Some(&a) {
            return Err(Error::Collision(format!("{} and {} swap", g.vert(a), g.vert(b))));
        }
    }
    let mut next = c.occupied().clone();
    for &(a, _) in moves {
        next.remove_id(a);
    }
    for &(_, b) in moves {
        next.insert_id(b);
    }
    Ok(Configuration::from_set(next))
}

/// One synchronous round: every robot looks at the same snapshot, computes, moves.
pub fn step<'g>(c: &Configuration<'g>, f: &Formation<'g>) -> Result<(Configuration<'g>, TaskId, Vec<MoveIntent>)> {
    let g = c.grid();
    let d = decide(c, f)?;
    let next = apply(c, &d.moves).map_err(|e| match e {
        Error::Collision(msg) => Error::Collision(format!("{msg} (task {}, robots {:?})", d.task, c.robots())),
        other => other,
    })?;
    let mut intents: Vec<MoveIntent> =
        d.moves.iter().map(|&(a, b)| MoveIntent { from: g.vert(a), to: g.vert(b) }).collect();
    intents.sort();
    Ok((next, d.task, intents))
}

/// Runs until the pattern is formed, an error occurs or `max_rounds` pass.
pub fn run(c: &Configuration<'_>, f: &Formation<'_>, max_rounds: usize) -> Trace {
    let g = c.grid();
    let mut trace = Trace {
        k: g.k(),
        rho: symmetricity(c),
        seed: None,
        pattern: f.pattern().targets().to_vec(),
        initial: c.robots(),
        records: Vec::new(),
        outcome: Outcome::Timeout,
    };
    let mut cur = c.clone();
    for round in 1..=max_rounds {
        match step(&cur, f) {
            Ok((next, task, moves)) => {
                trace.records.push(RoundRecord { round, task, moves, robots: next.robots() });
                cur = next;
                if task == TaskId::T5 {
                    trace.outcome = Outcome::Formed;
                    break;
                }
            }
            Err(e) => {
                trace.outcome = Outcome::Error(e.to_string());
                break;
            }
        }
    }
    trace
}

pub fn default_max_rounds(k: usize) -> usize {
    100 * k
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Transition { round: usize, from: TaskId, to: TaskId },
    Collision { round: usize, reason: String },
    OccupancyMismatch { round: usize },
    NotMutuallyVisible,
    NotFormed,
    LongSelfLoop { task: TaskId, start: usize, length: usize },
    Unfinished(Outcome),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Transition { round, from, to } => write!(f, "round {round}: illegal transition {from} -> {to}"),
            Violation::Collision { round, reason } => write!(f, "round {round}: {reason}"),
            Violation::OccupancyMismatch { round } => {
                write!(f, "round {round}: recorded occupancy differs from replayed moves")
            }
            Violation::NotMutuallyVisible => write!(f, "final occupancy is not a mutual-visibility set"),
            Violation::NotFormed => write!(f, "final occupancy does not match the pattern"),
            Violation::LongSelfLoop { task, start, length } => {
                write!(f, "task {task} repeats {length} rounds from round {start}")
            }
            Violation::Unfinished(o) => write!(f, "run ended without forming the pattern: {o:?}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub violations: Vec<Violation>,
}

impl Report {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn messages(&self) -> Vec<String> {
        self.violations.iter().map(ToString::to_string).collect()
    }
}

/// Re-checks a trace offline against the task graph, collisions, visibility
/// and per-task round budgets.
pub fn validate_trace(t: &Trace) -> Result<Report> {
    let g = Grid::new(t.k)?;
    let mut report = Report::default();
    let mut v = |x| report.violations.push(x);

    for w in t.records.windows(2) {
        if !w[1].task.may_follow(w[0].task) {
            v(Violation::Transition { round: w[1].round, from: w[0].task, to: w[1].task });
        }
    }

    let mut run_start = 0;
    for i in 1..=t.records.len() {
        if i == t.records.len() || t.records[i].task != t.records[run_start].task {
            let length = i - run_start;
            let task = t.records[run_start].task;
            if task != TaskId::T5 && length > SELF_LOOP_FACTOR * t.k {
                v(Violation::LongSelfLoop { task, start: t.records[run_start].round, length });
            }
            run_start = i;
        }
    }

    let mut cur = Configuration::new(&g, t.initial.iter().copied())?;
    for rec in &t.records {
        let moves: Result<Vec<(usize, usize)>> =
            rec.moves.iter().map(|m| Ok((g.idx(m.from)?, g.idx(m.to)?))).collect();
        match moves.and_then(|m| apply(&cur, &m)) {
            Ok(next) => {
                let recorded = VertexSet::from_vertices(&g, rec.robots.iter().copied())?;
                if recorded != *next.occupied() || rec.robots.len() != next.len() {
                    v(Violation::OccupancyMismatch { round: rec.round });
                }
                cur = Configuration::from_set(recorded);
            }
            Err(e) => {
                v(Violation::Collision { round: rec.round, reason: e.to_string() });
                cur = Configuration::new(&g, rec.robots.iter().copied())?;
            }
        }
    }

    match &t.outcome {
        Outcome::Formed => {
            let last = VertexSet::from_vertices(&g, t.final_robots().iter().copied())?;
            if !is_mutual_visibility_set(&g, &last) {
                v(Violation::NotMutuallyVisible);
            }
            let kprime = t.pattern.len().div_ceil(4);
            let pattern = crate::gmvalgo::Pattern::from_parts(kprime, t.pattern.clone());
            match Formation::new(&g, &pattern) {
                Ok(f) if f.is_formed(&Configuration::from_set(last)) => {}
                _ => v(Violation::NotFormed),
            }
        }
        other => v(Violation::Unfinished(other.clone())),
    }
    Ok(report)
}

/// Random configuration on `g` with `n` robots and symmetricity exactly `rho`.
pub fn gen_config(g: &Grid, n: usize, rho: usize, seed: u64) -> Result<Configuration<'_>> {
    let k = g.k();
    if k < 4 {
        return Err(Error::InvalidParameter(format!("k must be at least 4, got {k}")));
    }
    if n < 12 || n > 4 * k {
        return Err(Error::InvalidParameter(format!("n must lie in 12..={}, got {n}", 4 * k)));
    }
    if rho != 1 && rho != 2 {
        return Err(Error::InvalidParameter(format!("symmetricity must be 1 or 2, got {rho}")));
    }
    if n % rho != 0 {
        return Err(Error::InvalidParameter(format!("{n} robots cannot have symmetricity {rho}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_symmetric(g, n / rho, rho, &mut rng)
}

/// Union of `orbits` random orbits of the rotation by `360 / rho` degrees,
/// redrawn until the symmetricity is exactly `rho`.
pub fn random_symmetric<'g, R: Rng>(g: &'g Grid, orbits: usize, rho: usize, rng: &mut R) -> Result<Configuration<'g>> {
    if ![1, 2, 3, 6].contains(&rho) {
        return Err(Error::InvalidParameter(format!("symmetricity must divide 6, got {rho}")));
    }
    let step = 6 / rho;
    let reps: Vec<usize> = (0..g.vertex_count())
        .filter(|&v| (1..rho).all(|j| g.turn(v, j * step) > v))
        .collect();
    if orbits == 0 || orbits > reps.len() {
        return Err(Error::InvalidParameter(format!("cannot place {orbits} orbits")));
    }
    for _ in 0..10_000 {
        let mut set = VertexSet::empty(g);
        for i in sample(rng, reps.len(), orbits) {
            for j in 0..rho {
                set.insert_id(g.turn(reps[i], j * step));
            }
        }
        let c = Configuration::from_set(set);
        if symmetricity(&c) == rho {
            return Ok(c);
        }
    }
    Err(Error::InvalidParameter(format!("no configuration with symmetricity {rho} found")))
}

#[derive(Serialize, Deserialize)]
struct Header {
    k: usize,
    n: usize,
    rho: usize,
    seed: Option<u64>,
    pattern: Vec<HexVertex>,
    robots: Vec<HexVertex>,
}

#[derive(Serialize, Deserialize)]
struct RoundLine {
    round: usize,
    task: TaskId,
    moves: Vec<[HexVertex; 2]>,
    robots: Vec<HexVertex>,
}

#[derive(Serialize, Deserialize)]
struct Footer {
    outcome: Outcome,
    rounds: usize,
    validations: Vec<String>,
}

/// Writes a header line, one line per round and a footer line.
pub fn write_jsonl<W: Write>(t: &Trace, report: &Report, mut w: W) -> std::io::Result<()> {
    let header = Header {
        k: t.k,
        n: t.n(),
        rho: t.rho,
        seed: t.seed,
        pattern: t.pattern.clone(),
        robots: t.initial.clone(),
    };
    serde_json::to_writer(&mut w, &header)?;
    writeln!(w)?;
    for r in &t.records {
        let line = RoundLine {
            round: r.round,
            task: r.task,
            moves: r.moves.iter().map(|m| [m.from, m.to]).collect(),
            robots: r.robots.clone(),
        };
        serde_json::to_writer(&mut w, &line)?;
        writeln!(w)?;
    }
    let footer = Footer { outcome: t.outcome.clone(), rounds: t.rounds(), validations: report.messages() };
    serde_json::to_writer(&mut w, &footer)?;
    writeln!(w)
}

pub fn read_jsonl<R: BufRead>(r: R) -> Result<Trace> {
    let lines: Vec<(usize, String)> = r
        .lines()
        .enumerate()
        .map(|(i, l)| l.map(|l| (i + 1, l)).map_err(|e| Error::InvalidInput(format!("line {}: {e}", i + 1))))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|(_, l)| !l.trim().is_empty())
        .collect();
    let parse_err = |no: usize, e: serde_json::Error| Error::InvalidInput(format!("line {no}: {e}"));
    let Some(((first_no, first), rest)) = lines.split_first() else {
        return Err(Error::InvalidInput("empty trace".into()));
    };
    let header: Header = serde_json::from_str(first).map_err(|e| parse_err(*first_no, e))?;
    let Some(((last_no, last), middle)) = rest.split_last() else {
        return Err(Error::InvalidInput("trace has no footer line".into()));
    };
    let footer: Footer = serde_json::from_str(last).map_err(|e| parse_err(*last_no, e))?;
    let records = middle
        .iter()
        .map(|(no, l)| {
            let line: RoundLine = serde_json::from_str(l).map_err(|e| parse_err(*no, e))?;
            Ok(RoundRecord {
                round: line.round,
                task: line.task,
                moves: line.moves.iter().map(|m| MoveIntent { from: m[0], to: m[1] }).collect(),
                robots: line.robots,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if header.robots.len() != header.n {
        return Err(Error::InvalidInput(format!("line {first_no}: header n does not match its robots")));
    }
    Ok(Trace {
        k: header.k,
        rho: header.rho,
        seed: header.seed,
        pattern: header.pattern,
        initial: header.robots,
        records,
        outcome: footer.outcome,
    })
}
