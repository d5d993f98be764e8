//! The guard-anchored reference frame used while forming rows.
//!
//! Each guard owns a c-sector. Inside it, after rotating the guard onto
//! corner 0, rows are h-lines counted from the top (row 1 holds the guard)
//! and columns are r-lines. "Up" along a column means increasing height.

use crate::configspace::{Configuration, ViewFrame};
use crate::error::{Error, Result};
use crate::hexgrid::{Grid, HexVertex};

use super::pattern::Formation;

#[derive(Clone, Debug)]
pub(crate) struct Cell {
    pub sector: usize,
    /// 1..=M for ordinary vertices, 0 and M+1 for the two pockets.
    pub row: usize,
    /// Left-to-right order along the row.
    pub x: i32,
    pub local: HexVertex,
    pub up: Option<usize>,
    pub down: Option<usize>,
    pub left: Option<usize>,
    pub right: Option<usize>,
}

/// Guards, c-sectors, forbidden corners and per-vertex row/column data.
#[derive(Debug)]
pub struct GuardFrame<'g> {
    grid: &'g Grid,
    guards: Vec<usize>,
    guard_corners: Vec<usize>,
    pub(crate) cells: Vec<Cell>,
    forbidden: Vec<bool>,
    pocket: Vec<bool>,
    is_guard: Vec<bool>,
    rows: usize,
}

impl<'g> GuardFrame<'g> {
    pub fn new(c: &Configuration<'g>) -> Result<Self> {
        let view = ViewFrame::new(c);
        Self::with_rho(c, view.rho())
    }

    pub(crate) fn with_rho(c: &Configuration<'g>, rho: usize) -> Result<Self> {
        let g = c.grid();
        let k = g.k() as i32;
        let guard_corners: Vec<usize> = (0..6).filter(|&s| c.has(g.corner_ids()[s])).collect();
        if guard_corners.len() != rho {
            return Err(Error::FrameUndefined { corner_robots: guard_corners.len(), rho });
        }
        let guards: Vec<usize> = guard_corners.iter().map(|&s| g.corner_ids()[s]).collect();
        let n = g.vertex_count();

        // Sector s belongs to the first guard at or after it, clockwise.
        let owner_of_sector: Vec<usize> = (0..6)
            .map(|s| {
                (0..guard_corners.len())
                    .min_by_key(|&j| (guard_corners[j] + 6 - s) % 6)
                    .expect("at least one guard")
            })
            .collect();
        let owner = |v: usize| owner_of_sector[g.sector_id(v)];

        let m = 2 * g.k();
        let w_canon = g.at_lattice((k, 3 * k - 2)).expect("corner neighbor exists");
        let wbar_canon = g.turn(w_canon, 3);
        let mut pocket = vec![false; n];
        let mut pocket_row = vec![None; n];
        for (j, &cj) in guard_corners.iter().enumerate() {
            for (w, row) in [(w_canon, 0), (wbar_canon, m + 1)] {
                let v = g.turn(w, cj);
                if owner(v) == j {
                    pocket[v] = true;
                    pocket_row[v] = Some(row);
                }
            }
        }

        let mut cells = Vec::with_capacity(n);
        for v in 0..n {
            let j = owner(v);
            let cj = guard_corners[j];
            let canon = g.turn(v, 6 - cj);
            let t = g.vert(canon);
            let (x, y) = g.lattice(canon);
            let back = |w: usize| {
                let w = g.turn(w, cj);
                (owner(w) == j).then_some(w)
            };
            let mut cell = Cell {
                sector: j,
                row: pocket_row[v].unwrap_or((k - t.h + 1) as usize),
                x,
                local: HexVertex::new(k - t.l, k - t.h, 1 - t.r),
                up: None,
                down: None,
                left: None,
                right: None,
            };
            for &nb in g.adj(canon) {
                let s = g.vert(nb);
                let (nx, ny) = g.lattice(nb);
                if s.r == t.r {
                    if ny > y {
                        cell.up = back(nb);
                    } else {
                        cell.down = back(nb);
                    }
                }
                if s.h == t.h {
                    if nx > x {
                        cell.right = back(nb);
                    } else {
                        cell.left = back(nb);
                    }
                }
            }
            cells.push(cell);
        }

        let mut forbidden = vec![false; n];
        let mut is_guard = vec![false; n];
        for (s, &corner) in g.corner_ids().iter().enumerate() {
            if guard_corners.contains(&s) {
                is_guard[corner] = true;
            } else {
                forbidden[corner] = true;
            }
        }

        Ok(GuardFrame { grid: g, guards, guard_corners, cells, forbidden, pocket, is_guard, rows: m })
    }

    pub fn guards(&self) -> Vec<HexVertex> {
        self.guards.iter().map(|&v| self.grid.vert(v)).collect()
    }

    pub fn sector_count(&self) -> usize {
        self.guards.len()
    }

    pub fn sector_of(&self, v: HexVertex) -> Result<usize> {
        Ok(self.cells[self.grid.idx(v)?].sector)
    }

    /// Coordinates relative to the sector's guard, which sits at `(0,0,0)`.
    pub fn local_coords(&self, v: HexVertex) -> Result<HexVertex> {
        Ok(self.cells[self.grid.idx(v)?].local)
    }

    /// Row index (1 = guard row; 0 and M+1 are the pocket pseudo-rows).
    pub fn row(&self, v: HexVertex) -> Result<usize> {
        Ok(self.cells[self.grid.idx(v)?].row)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn forbidden_vertices(&self) -> Vec<HexVertex> {
        (0..self.forbidden.len()).filter(|&v| self.forbidden[v]).map(|v| self.grid.vert(v)).collect()
    }

    /// Vertices beyond a corner that lies inside its row; treated as no-entry.
    pub fn pockets(&self) -> Vec<HexVertex> {
        (0..self.pocket.len()).filter(|&v| self.pocket[v]).map(|v| self.grid.vert(v)).collect()
    }

    pub(crate) fn is_forbidden(&self, v: usize) -> bool {
        self.forbidden[v]
    }

    pub(crate) fn is_pocket(&self, v: usize) -> bool {
        self.pocket[v]
    }

    pub(crate) fn is_guard(&self, v: usize) -> bool {
        self.is_guard[v]
    }

    /// Whether robots may step onto `v` during row formation.
    pub(crate) fn enterable(&self, v: usize) -> bool {
        !self.forbidden[v] && !self.pocket[v] && !self.is_guard[v]
    }

    /// Ordinary vertices of row `row` in `sector`, left to right.
    pub(crate) fn row_members(&self, sector: usize, row: usize) -> Vec<usize> {
        let mut out: Vec<usize> = (0..self.cells.len())
            .filter(|&v| self.cells[v].sector == sector && self.cells[v].row == row && !self.pocket[v])
            .collect();
        out.sort_by_key(|&v| self.cells[v].x);
        out
    }

    /// First vertex of `v`'s column in another row, walking up or down.
    pub(crate) fn column_exit(&self, v: usize, up: bool) -> Option<usize> {
        let row = self.cells[v].row;
        let mut cur = v;
        loop {
            let cell = &self.cells[cur];
            cur = if up { cell.up } else { cell.down }?;
            if self.cells[cur].row != row {
                return Some(cur);
            }
        }
    }

    pub(crate) fn nearest_forbidden(&self, v: usize) -> u32 {
        let row = self.grid.dist_row(v);
        (0..self.forbidden.len()).filter(|&f| self.forbidden[f]).map(|f| row[f] as u32).min().unwrap_or(u32::MAX)
    }

    /// The common embedding of the pattern as seen from every guard.
    pub(crate) fn embedding(&self, f: &Formation<'_>) -> Result<Embedding> {
        let rotation = f.rotation_for_corner(self.guard_corners[0]);
        for &cj in &self.guard_corners[1..] {
            let other = f.rotation_for_corner(cj);
            if f.placed(other) != f.placed(rotation) {
                return Err(Error::Invariant("guards disagree on the pattern embedding".into()));
            }
        }
        let guard_targets = self.guard_corners.iter().map(|&cj| f.guard_target(cj)).collect();
        Ok(Embedding { rotation, guard_targets })
    }
}

/// Placement of the pattern: `rotation` clockwise steps of its targets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub rotation: usize,
    pub(crate) guard_targets: Vec<usize>,
}

/// Exceeding-robot bookkeeping of one c-sector, indexed by row `0..=M+1`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RowBalance {
    pub r_bar: Vec<usize>,
    pub t: Vec<usize>,
    pub r_up: Vec<usize>,
    pub r_down: Vec<usize>,
    pub t_up: Vec<usize>,
    pub t_down: Vec<usize>,
    pub er_up: Vec<usize>,
    pub er_down: Vec<usize>,
    pub mr_up: Vec<usize>,
    pub mr_down: Vec<usize>,
}

impl RowBalance {
    /// Applies the exceeding-robot formulas to per-row robot and target counts.
    pub fn from_counts(r_bar: &[usize], t: &[usize]) -> Self {
        let rows = r_bar.len();
        assert_eq!(rows, t.len());
        let prefix = |xs: &[usize]| {
            let mut acc = 0;
            xs.iter()
                .map(|&x| {
                    let before = acc;
                    acc += x;
                    before
                })
                .collect::<Vec<_>>()
        };
        let r_up = prefix(r_bar);
        let t_up = prefix(t);
        let total_r: usize = r_bar.iter().sum();
        let total_t: usize = t.iter().sum();
        let r_down: Vec<usize> = (0..rows).map(|h| total_r - r_up[h] - r_bar[h]).collect();
        let t_down: Vec<usize> = (0..rows).map(|h| total_t - t_up[h] - t[h]).collect();
        let er_up: Vec<usize> = (0..rows).map(|h| (r_up[h] + r_bar[h]).saturating_sub(t_up[h] + t[h])).collect();
        let er_down: Vec<usize> =
            (0..rows).map(|h| (r_down[h] + r_bar[h]).saturating_sub(t_down[h] + t[h])).collect();
        let mr_down = (0..rows).map(|h| r_bar[h] - r_bar[h].saturating_sub(er_up[h])).collect();
        let mr_up = (0..rows).map(|h| r_bar[h] - r_bar[h].saturating_sub(er_down[h])).collect();
        RowBalance {
            r_bar: r_bar.to_vec(),
            t: t.to_vec(),
            r_up,
            r_down,
            t_up,
            t_down,
            er_up,
            er_down,
            mr_up,
            mr_down,
        }
    }

    pub fn balanced(&self) -> bool {
        self.er_up.iter().chain(&self.er_down).all(|&e| e == 0)
    }

    pub fn total_exceeding(&self) -> usize {
        self.er_up.iter().chain(&self.er_down).sum()
    }
}

/// Row statistics of every c-sector plus the selected movers.
#[derive(Clone, Debug)]
pub struct RowStats {
    pub sectors: Vec<RowBalance>,
    /// Robots per sector and row, left to right (guards excluded).
    pub(crate) robots: Vec<Vec<Vec<usize>>>,
    pub(crate) targets: Vec<Vec<Vec<usize>>>,
    /// `(robot, moves_up)` for every robot selected to move along its column.
    pub(crate) movers: Vec<(usize, bool)>,
}

impl RowStats {
    pub fn compute(c: &Configuration<'_>, f: &Formation<'_>, frame: &GuardFrame<'_>, emb: &Embedding) -> Result<Self> {
        let sectors = frame.sector_count();
        let rows = frame.rows + 2;
        let mut robots = vec![vec![Vec::new(); rows]; sectors];
        let mut targets = vec![vec![Vec::new(); rows]; sectors];
        for v in c.ids() {
            if !frame.is_guard(v) {
                let cell = &frame.cells[v];
                robots[cell.sector][cell.row].push(v);
            }
        }
        for &t in f.placed(emb.rotation) {
            if !emb.guard_targets.contains(&t) {
                let cell = &frame.cells[t];
                if frame.is_pocket(t) {
                    return Err(Error::Invariant("pattern target on a pocket vertex".into()));
                }
                targets[cell.sector][cell.row].push(t);
            }
        }
        let by_x = |list: &mut Vec<usize>| list.sort_by_key(|&v| frame.cells[v].x);
        robots.iter_mut().flatten().for_each(by_x);
        targets.iter_mut().flatten().for_each(by_x);

        let mut balances = Vec::with_capacity(sectors);
        let mut movers = Vec::new();
        for j in 0..sectors {
            let r_bar: Vec<usize> = robots[j].iter().map(Vec::len).collect();
            let t: Vec<usize> = targets[j].iter().map(Vec::len).collect();
            let bal = RowBalance::from_counts(&r_bar, &t);
            for h in 0..rows {
                if bal.mr_up[h] + bal.mr_down[h] > bal.r_bar[h] {
                    return Err(Error::OverlapAnomaly { row: h });
                }
                let row = &robots[j][h];
                movers.extend(row[..bal.mr_down[h]].iter().map(|&v| (v, false)));
                movers.extend(row[row.len() - bal.mr_up[h]..].iter().map(|&v| (v, true)));
            }
            balances.push(bal);
        }
        Ok(RowStats { sectors: balances, robots, targets, movers })
    }

    pub fn balanced(&self) -> bool {
        self.sectors.iter().all(RowBalance::balanced)
    }

    pub fn total_exceeding(&self) -> usize {
        self.sectors.iter().map(RowBalance::total_exceeding).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monus_and_three_rows() {
        assert_eq!(3usize.saturating_sub(5), 0);
        let b = RowBalance::from_counts(&[3, 0, 1], &[1, 2, 1]);
        assert_eq!(b.er_up[0], 2);
        assert_eq!(b.mr_down[0], 2);
        assert_eq!(b.er_down[1], 0);
        assert_eq!(b.mr_up, vec![0, 0, 0]);
        let flat = RowBalance::from_counts(&[1, 2, 1], &[1, 2, 1]);
        assert!(flat.balanced());
    }

    #[test]
    fn single_guard_frame() {
        let g = Grid::new(4).unwrap();
        let c = Configuration::new(&g, [g.corners()[3], HexVertex::new(0, 0, 0)]).unwrap();
        let frame = GuardFrame::new(&c).unwrap();
        assert_eq!(frame.sector_count(), 1);
        assert_eq!(frame.forbidden_vertices().len(), 5);
        assert_eq!(frame.local_coords(g.corners()[3]).unwrap(), HexVertex::new(0, 0, 0));
        assert_eq!(frame.row(g.corners()[3]).unwrap(), 1);
        assert_eq!(frame.pockets().len(), 2);
        assert!(!frame.forbidden_vertices().contains(&g.corners()[3]));
    }

    #[test]
    fn two_guard_frame() {
        let g = Grid::new(4).unwrap();
        let cs = g.corners();
        let c = Configuration::new(&g, [cs[1], cs[4]]).unwrap();
        let frame = GuardFrame::new(&c).unwrap();
        assert_eq!(frame.sector_count(), 2);
        let fv = frame.forbidden_vertices();
        assert_eq!(fv.len(), 4);
        for v in &fv {
            assert!(fv.contains(&g.rotate(*v, 3).unwrap()));
        }
        let sizes: Vec<usize> =
            (0..2).map(|j| g.vertices().filter(|&v| frame.sector_of(v).unwrap() == j).count()).collect();
        assert_eq!(sizes, vec![48, 48]);
        for (j, &guard) in frame.guards().iter().enumerate() {
            assert_eq!(frame.sector_of(guard).unwrap(), j);
            assert_eq!(frame.local_coords(guard).unwrap(), HexVertex::new(0, 0, 0));
        }
    }

    #[test]
    fn columns_stay_in_sector() {
        let g = Grid::new(5).unwrap();
        let cs = g.corners();
        let c = Configuration::new(&g, [cs[0], cs[3]]).unwrap();
        let frame = GuardFrame::new(&c).unwrap();
        for v in 0..g.vertex_count() {
            let cell = &frame.cells[v];
            for nb in [cell.up, cell.down].into_iter().flatten() {
                assert_eq!(frame.cells[nb].sector, cell.sector);
                assert!(g.is_adjacent(v, nb));
            }
            if let Some(up) = cell.up {
                assert_eq!(frame.cells[up].down, Some(v));
            }
        }
    }

    #[test]
    fn frame_needs_matching_corner_count() {
        let g = Grid::new(4).unwrap();
        let cs = g.corners();
        let c = Configuration::new(&g, [cs[0], cs[1], HexVertex::new(0, 0, 0)]).unwrap();
        assert!(matches!(GuardFrame::new(&c), Err(Error::FrameUndefined { .. })));
    }
}
