use std::cmp::Reverse;
use std::collections::{HashMap, HashSet};

use crate::configspace::{total_distance_id, Configuration, ViewFrame};
use crate::error::{Error, Result};
use crate::hexgrid::{Grid, HexVertex};

use super::frame::{GuardFrame, RowStats};
use super::pattern::Formation;

type Moves = Vec<(usize, usize)>;

/// Candidate steps of `from`, most clockwise (seen from the grid center) first.
fn clockwise_order(g: &Grid, from: usize, mut cands: Vec<usize>) -> Vec<usize> {
    let cart = |i: usize| {
        let (x, y) = g.lattice(i);
        (x as f64 * 3f64.sqrt() / 2.0, y as f64 / 2.0)
    };
    let (rx, ry) = cart(from);
    let angle = |n: usize| {
        let (nx, ny) = cart(n);
        let (dx, dy) = (nx - rx, ny - ry);
        (rx * dy - ry * dx).atan2(rx * dx + ry * dy)
    };
    cands.sort_by(|&a, &b| angle(a).total_cmp(&angle(b)));
    cands
}

/// T1a: the robots farthest from the others walk toward the perimeter.
pub(crate) fn to_side(c: &Configuration<'_>, view: &ViewFrame<'_>) -> Moves {
    let g = c.grid();
    let robots: Vec<usize> = c.ids().collect();
    let far = robots
        .iter()
        .map(|&r| (Reverse(total_distance_id(c, r)), view.key(r)))
        .min()
        .expect("nonempty");
    let chosen: Vec<usize> =
        robots.iter().copied().filter(|&r| (Reverse(total_distance_id(c, r)), view.key(r)) == far).collect();
    if let Some(moves) = step_outward(c, view, &chosen) {
        return moves;
    }
    // Someone in the way: the robots nearest the perimeter always have a free step.
    let near = robots.iter().map(|&r| (g.perimeter_distance(r), view.key(r))).min().expect("nonempty");
    let chosen: Vec<usize> =
        robots.iter().copied().filter(|&r| (g.perimeter_distance(r), view.key(r)) == near).collect();
    step_outward(c, view, &chosen).unwrap_or_default()
}

fn step_outward(c: &Configuration<'_>, view: &ViewFrame<'_>, movers: &[usize]) -> Option<Moves> {
    let g = c.grid();
    let mut claimed = HashSet::new();
    let mut moves = Vec::new();
    let mut order = movers.to_vec();
    order.sort_by_key(|&r| view.key(r));
    for r in order {
        let d = g.perimeter_distance(r);
        let cands: Vec<usize> = g.adj(r).iter().copied().filter(|&n| g.perimeter_distance(n) + 1 == d).collect();
        let pick = clockwise_order(g, r, cands).into_iter().find(|&n| !c.has(n) && !claimed.contains(&n))?;
        claimed.insert(pick);
        moves.push((r, pick));
    }
    Some(moves)
}

/// T1b: the perimeter robots closest to a corner step toward it.
pub(crate) fn to_corner(c: &Configuration<'_>, view: &ViewFrame<'_>) -> Moves {
    let g = c.grid();
    let cycle = g.cycle_ids();
    let len = cycle.len();
    let is_corner = |i: usize| g.corner_index(cycle[i % len]).is_some();
    let approach = |r: usize| {
        let p = g.cycle_position(r).expect("perimeter robot");
        let cw = (0..len).find(|&d| is_corner(p + d)).expect("corner on cycle");
        let ccw = (0..len).find(|&d| is_corner(p + len - d)).expect("corner on cycle");
        if cw <= ccw {
            (cw, cycle[(p + 1) % len])
        } else {
            (ccw, cycle[(p + len - 1) % len])
        }
    };
    let on_perimeter: Vec<usize> = c.ids().filter(|&r| g.is_perimeter(r)).collect();
    let best = on_perimeter.iter().map(|&r| (approach(r).0, view.key(r))).min().expect("perimeter robot");
    on_perimeter
        .into_iter()
        .filter(|&r| (approach(r).0, view.key(r)) == best)
        .map(|r| (r, approach(r).1))
        .collect()
}

/// T1c: empty the surplus corners by pushing robots along special-paths.
pub(crate) fn along_special_paths(c: &Configuration<'_>, view: &ViewFrame<'_>) -> Result<Moves> {
    let g = c.grid();
    let occupied: Vec<usize> = (0..6).filter(|&s| c.has(g.corner_ids()[s])).collect();
    let prefix = |s: usize| g.special_ids(s).iter().take_while(|&&v| c.has(v)).count();
    let full: Vec<usize> = occupied.iter().copied().filter(|&s| prefix(s) == g.special_ids(s).len()).collect();
    let keep: Vec<usize> = match full.len() {
        0 => {
            let best = occupied.iter().map(|&s| view.key(g.corner_ids()[s])).min().expect("corner robot");
            occupied.iter().copied().filter(|&s| view.key(g.corner_ids()[s]) == best).collect()
        }
        1 => full,
        n => return Err(Error::Invariant(format!("{n} fully occupied special-paths"))),
    };
    let mut moves = Vec::new();
    for &s in occupied.iter().filter(|s| !keep.contains(s)) {
        let path = g.special_ids(s);
        for i in 0..prefix(s) {
            moves.push((path[i], path[i + 1]));
        }
    }
    Ok(moves)
}

/// Result of resolving column moves for one round.
pub(crate) struct ColumnOutcome {
    movers: Vec<(usize, bool)>,
    blocked: Vec<bool>,
    next: Vec<Option<usize>>,
    side_steps: Moves,
}

impl ColumnOutcome {
    pub(crate) fn blocked_of(&self, robot: usize) -> Option<bool> {
        self.movers.iter().position(|&(r, _)| r == robot).map(|i| self.blocked[i])
    }

    fn all_blocked(&self) -> bool {
        self.blocked.iter().all(|&b| b)
    }
}

pub(crate) fn column_outcome(c: &Configuration<'_>, frame: &GuardFrame<'_>, stats: &RowStats) -> ColumnOutcome {
    let cells = &frame.cells;
    let mut movers = stats.movers.clone();
    movers.sort_by_key(|&(r, _)| (cells[r].sector, cells[r].row, cells[r].x));
    let index: HashMap<usize, usize> = movers.iter().enumerate().map(|(i, &(r, _))| (r, i)).collect();
    let next: Vec<Option<usize>> =
        movers.iter().map(|&(r, up)| if up { cells[r].up } else { cells[r].down }).collect();
    let mut blocked = vec![false; movers.len()];
    let mut side_steps = Vec::new();

    loop {
        let mut changed = false;
        let mut block = |i: usize, blocked: &mut Vec<bool>| {
            if !blocked[i] {
                blocked[i] = true;
                changed = true;
            }
        };
        for i in 0..movers.len() {
            if blocked[i] {
                continue;
            }
            let (r, up) = movers[i];
            let exit_ok = frame.column_exit(r, up).is_some_and(|e| frame.enterable(e));
            let stuck = match next[i] {
                _ if !exit_ok => true,
                None => true,
                Some(n) if !frame.enterable(n) => true,
                Some(n) if c.has(n) => {
                    index.get(&n).is_some_and(|&j| blocked[j] || movers[j].1 != movers[i].1)
                }
                Some(_) => false,
            };
            if stuck {
                block(i, &mut blocked);
            }
        }
        // Two movers heading for one vertex: the later one in row order waits.
        let mut heading: HashMap<usize, usize> = HashMap::new();
        for i in 0..movers.len() {
            if let (false, Some(n)) = (blocked[i], next[i]) {
                if heading.insert(n, i).is_some() {
                    block(i, &mut blocked);
                }
            }
        }
        // Non-moving robots in the way step aside along their row.
        let mut reserved: HashSet<usize> =
            (0..movers.len()).filter(|&i| !blocked[i]).filter_map(|i| next[i]).collect();
        side_steps.clear();
        for i in 0..movers.len() {
            let Some(n) = next[i] else { continue };
            if blocked[i] || !c.has(n) || index.contains_key(&n) {
                continue;
            }
            let mut cands: Vec<usize> = [cells[n].left, cells[n].right]
                .into_iter()
                .flatten()
                .filter(|&y| !c.has(y) && frame.enterable(y) && !reserved.contains(&y))
                .collect();
            cands.sort_by_key(|&y| (Reverse(frame.nearest_forbidden(y)), Reverse(cells[y].local.r)));
            match cands.first() {
                Some(&y) => {
                    reserved.insert(y);
                    side_steps.push((n, y));
                }
                None => block(i, &mut blocked),
            }
        }
        if !changed {
            break;
        }
    }
    ColumnOutcome { movers, blocked, next, side_steps }
}

/// T2: rebalance rows by moving selected robots along their columns.
pub(crate) fn along_columns(c: &Configuration<'_>, frame: &GuardFrame<'_>, stats: &RowStats) -> Result<Moves> {
    let out = column_outcome(c, frame, stats);
    if out.movers.is_empty() {
        return Err(Error::Invariant("rows unbalanced but nobody selected to move".into()));
    }
    if !out.all_blocked() {
        let mut moves: Moves = (0..out.movers.len())
            .filter(|&i| !out.blocked[i])
            .map(|i| (out.movers[i].0, out.next[i].expect("unblocked mover has a next vertex")))
            .collect();
        moves.extend(&out.side_steps);
        return Ok(moves);
    }
    let moves = shift_rows(c, frame, stats);
    if moves.is_empty() {
        return Err(Error::Invariant("every column mover is blocked and no row can shift".into()));
    }
    Ok(moves)
}

/// Slides the run of robots at the left (right) end of rows that send
/// robots down (up) one step further along the row.
fn shift_rows(c: &Configuration<'_>, frame: &GuardFrame<'_>, stats: &RowStats) -> Moves {
    let mut moves = Vec::new();
    let mut claimed = HashSet::new();
    for (j, bal) in stats.sectors.iter().enumerate() {
        for h in 1..=frame.rows() {
            let members = frame.row_members(j, h);
            for rightward in [true, false] {
                let wanted = if rightward { bal.mr_down[h] } else { bal.mr_up[h] };
                if wanted == 0 {
                    continue;
                }
                let seq: Vec<usize> =
                    if rightward { members.clone() } else { members.iter().rev().copied().collect() };
                let Some(start) = seq.iter().position(|&v| c.has(v)) else { continue };
                let end = seq[start..].iter().position(|&v| !c.has(v)).map(|p| start + p);
                let shift = end.filter(|&end| {
                    !seq[start..end].iter().any(|&v| frame.is_guard(v))
                        && frame.enterable(seq[end])
                        && !claimed.contains(&seq[end])
                });
                if let Some(end) = shift {
                    claimed.insert(seq[end]);
                    moves.extend(seq[start..end].iter().zip(&seq[start + 1..=end]).map(|(&a, &b)| (a, b)));
                    continue;
                }
                // The path runs into the row end: its first robot backs off instead.
                if start > 0 && !frame.is_guard(seq[start]) && frame.enterable(seq[start - 1]) && claimed.insert(seq[start - 1]) {
                    moves.push((seq[start], seq[start - 1]));
                }
            }
        }
    }
    moves
}

/// T3: slide every robot along its row toward its assigned target.
pub(crate) fn along_rows(c: &Configuration<'_>, frame: &GuardFrame<'_>, stats: &RowStats) -> Result<Moves> {
    let cells = &frame.cells;
    let mut moves = Vec::new();
    for j in 0..stats.robots.len() {
        for (h, (robots, targets)) in stats.robots[j].iter().zip(&stats.targets[j]).enumerate() {
            if robots.len() != targets.len() {
                return Err(Error::Invariant(format!(
                    "row {h}: {} robots for {} targets",
                    robots.len(),
                    targets.len()
                )));
            }
            for (&r, &t) in robots.iter().zip(targets) {
                if r == t {
                    continue;
                }
                let step = if cells[t].x > cells[r].x { cells[r].right } else { cells[r].left };
                match step {
                    Some(n) if frame.is_forbidden(n) || c.has(n) => {}
                    Some(n) => moves.push((r, n)),
                    None => return Err(Error::Invariant(format!("row {h}: target beyond the row end"))),
                }
            }
        }
    }
    Ok(moves)
}

/// An embedding from which every unmatched robot can walk to its own target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conclusive {
    pub rotation: usize,
    pub(crate) assign: Vec<(usize, usize)>,
    pub(crate) vertices: Vec<(HexVertex, HexVertex)>,
}

impl Conclusive {
    /// `(robot, target)` for every unmatched robot.
    pub fn assignments(&self) -> &[(HexVertex, HexVertex)] {
        &self.vertices
    }
}

pub(crate) fn conclusive_embedding(
    c: &Configuration<'_>,
    f: &Formation<'_>,
    view: &ViewFrame<'_>,
) -> Option<Conclusive> {
    let g = c.grid();
    let rho = view.rho();
    let mut best: Option<((u32, Vec<usize>), Conclusive)> = None;
    for s in 0..6 {
        let mut unmatched: Vec<usize> = c.ids().filter(|&r| !f.is_target(s, r)).collect();
        if unmatched.is_empty() || unmatched.len() > 6 {
            continue;
        }
        unmatched.sort_by_key(|&r| view.key(r));
        let mut used = HashSet::new();
        let mut assign = Vec::new();
        let mut guards = Vec::new();
        for &r in &unmatched {
            let corner = g
                .adj(r)
                .iter()
                .copied()
                .find(|&n| g.corner_index(n).is_some() && f.is_target(s, n) && !c.has(n));
            match corner {
                Some(t) if used.insert(t) => assign.push((r, t)),
                _ => guards.push(r),
            }
        }
        if guards.len() > rho {
            continue;
        }
        let ok = guards.iter().all(|&r| {
            if f.in_interior(r) {
                return false;
            }
            let row = g.dist_row(r);
            let nearest = f.placed(s).iter().map(|&t| row[t]).min().expect("targets");
            let pick = f
                .placed(s)
                .iter()
                .copied()
                .filter(|&t| row[t] == nearest && !c.has(t) && f.on_boundary(t) && !used.contains(&t))
                .min_by_key(|&t| view.key(t));
            match pick {
                Some(t) => {
                    used.insert(t);
                    assign.push((r, t));
                    true
                }
                None => false,
            }
        });
        if !ok {
            continue;
        }
        let cost: u32 = assign.iter().map(|&(r, t)| g.dist(r, t)).sum();
        let rank = (cost, view.set_key(f.placed(s)));
        if best.as_ref().is_none_or(|(b, _)| rank < *b) {
            let vertices = assign.iter().map(|&(r, t)| (g.vert(r), g.vert(t))).collect();
            best = Some((rank, Conclusive { rotation: s, assign, vertices }));
        }
    }
    best.map(|(_, con)| con)
}

/// T4: every unmatched robot steps along a shortest path to its target.
pub(crate) fn finish(c: &Configuration<'_>, f: &Formation<'_>, view: &ViewFrame<'_>, con: &Conclusive) -> Moves {
    let g = c.grid();
    let mut claimed = HashSet::new();
    let mut moves = Vec::new();
    let mut order = con.assign.clone();
    order.sort_by_key(|&(r, _)| view.key(r));
    for (r, t) in order {
        let d = g.dist(r, t);
        let mut cands: Vec<usize> = g
            .adj(r)
            .iter()
            .copied()
            .filter(|&n| g.dist(n, t) + 1 == d && !c.has(n) && !claimed.contains(&n))
            .collect();
        cands.sort_by_key(|&n| (f.in_interior(n), view.key(n)));
        if let Some(&n) = cands.first() {
            claimed.insert(n);
            moves.push((r, n));
        }
    }
    moves
}
