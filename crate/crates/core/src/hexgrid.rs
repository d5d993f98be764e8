//! Finite hexagonal grids `G_k` with the three-family line coordinates.
//!
//! Hexagons are pointy-top. Internally every vertex has integer lattice
//! coordinates `(X, Y)` where the Cartesian position is `(X * sqrt(3) / 2, Y / 2)`
//! for unit edge length, and the grid center sits at the origin.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A grid vertex named by the indices of its l-line, h-line and r-line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i32; 3]", into = "[i32; 3]")]
pub struct HexVertex {
    pub l: i32,
    pub h: i32,
    pub r: i32,
}

impl HexVertex {
    pub const fn new(l: i32, h: i32, r: i32) -> Self {
        HexVertex { l, h, r }
    }

    pub fn coord(&self, family: LineFamily) -> i32 {
        match family {
            LineFamily::L => self.l,
            LineFamily::H => self.h,
            LineFamily::R => self.r,
        }
    }
}

impl From<[i32; 3]> for HexVertex {
    fn from(a: [i32; 3]) -> Self {
        HexVertex::new(a[0], a[1], a[2])
    }
}

impl From<HexVertex> for [i32; 3] {
    fn from(v: HexVertex) -> Self {
        [v.l, v.h, v.r]
    }
}

impl fmt::Display for HexVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.l, self.h, self.r)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LineFamily {
    L,
    H,
    R,
}

impl LineFamily {
    pub const ALL: [LineFamily; 3] = [LineFamily::L, LineFamily::H, LineFamily::R];

    fn slot(self) -> usize {
        match self {
            LineFamily::L => 0,
            LineFamily::H => 1,
            LineFamily::R => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LineId {
    pub family: LineFamily,
    pub index: i32,
}

/// Edge direction classes. A line family is what remains connected after
/// dropping one class: h-lines drop `V`, l-lines drop `P`, r-lines drop `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum EdgeClass {
    V,
    P,
    N,
}

fn edge_class(a: (i32, i32), b: (i32, i32)) -> EdgeClass {
    let dx = b.0 - a.0;
    let dy = b.1 - a.1;
    if dx == 0 {
        EdgeClass::V
    } else if dx * dy > 0 {
        EdgeClass::P
    } else {
        EdgeClass::N
    }
}

const HEX_OFFSETS: [(i32, i32); 6] = [(0, 2), (1, 1), (1, -1), (0, -2), (-1, -1), (-1, 1)];

/// Clockwise rotation by 60 degrees in lattice units.
fn rotate_cw(p: (i32, i32)) -> (i32, i32) {
    ((p.0 + p.1) / 2, (p.1 - 3 * p.0) / 2)
}

/// Immutable `G_k`.
///
/// Corner `0` is the top vertex of the upper-right boundary hexagon; the
/// others follow clockwise, and so do sides, sectors and corner readings.
pub struct Grid {
    k: usize,
    verts: Vec<HexVertex>,
    lattice: Vec<(i32, i32)>,
    index: HashMap<HexVertex, usize>,
    by_lattice: HashMap<(i32, i32), usize>,
    adj: Vec<Vec<usize>>,
    lines: [Vec<Vec<usize>>; 3],
    rot: [Vec<usize>; 6],
    corners: [usize; 6],
    sides: [Vec<usize>; 6],
    perimeter: Vec<bool>,
    cycle: Vec<usize>,
    cycle_pos: Vec<Option<usize>>,
    sector: Vec<u8>,
    special: [Vec<usize>; 6],
    readings: [Vec<usize>; 6],
    reading_rank: Vec<usize>,
    to_perimeter: Vec<u32>,
    apsp: OnceLock<Vec<u16>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid").field("k", &self.k).finish_non_exhaustive()
    }
}

impl Grid {
    pub fn new(k: usize) -> Result<Grid> {
        if k < 1 {
            return Err(Error::InvalidParameter("grid size k must be at least 1".into()));
        }
        let kk = k as i32;

        let mut pts = Vec::new();
        let mut edge_pts = Vec::new();
        for q in -(kk - 1)..=kk - 1 {
            for r in -(kk - 1)..=kk - 1 {
                if (q + r).abs() > kk - 1 {
                    continue;
                }
                let (cx, cy) = (2 * q + r, 3 * r);
                let ring = HEX_OFFSETS.map(|(dx, dy)| (cx + dx, cy + dy));
                pts.extend_from_slice(&ring);
                for i in 0..6 {
                    edge_pts.push((ring[i], ring[(i + 1) % 6]));
                }
            }
        }
        // Top to bottom, then left to right.
        pts.sort_by_key(|&(x, y)| (-y, x));
        pts.dedup();
        let n = pts.len();
        let by_lattice: HashMap<(i32, i32), usize> =
            pts.iter().enumerate().map(|(i, &p)| (p, i)).collect();

        let mut adj = vec![Vec::new(); n];
        let mut seen = HashSet::new();
        let mut class_adj: Vec<Vec<(usize, EdgeClass)>> = vec![Vec::new(); n];
        for (a, b) in edge_pts {
            let (ia, ib) = (by_lattice[&a], by_lattice[&b]);
            if seen.insert((ia.min(ib), ia.max(ib))) {
                let c = edge_class(a, b);
                adj[ia].push(ib);
                adj[ib].push(ia);
                class_adj[ia].push((ib, c));
                class_adj[ib].push((ia, c));
            }
        }
        for list in adj.iter_mut() {
            list.sort_unstable();
        }

        // Line families as connected components after removing one edge class.
        let family_spec: [(EdgeClass, fn((i32, i32)) -> i32, fn((i32, i32)) -> i32); 3] = [
            // l-lines: "\" zigzags, indexed across by 3X+Y, read top to bottom.
            (EdgeClass::P, |p| 3 * p.0 + p.1, |p| -p.1),
            // h-lines: horizontal, indexed by Y, read left to right.
            (EdgeClass::V, |p| p.1, |p| p.0),
            // r-lines: "/" zigzags, indexed across by Y-3X, read bottom to top.
            (EdgeClass::N, |p| p.1 - 3 * p.0, |p| p.1),
        ];
        let mut lines: [Vec<Vec<usize>>; 3] = Default::default();
        let mut coords = vec![[0i32; 3]; n];
        for (slot, &(skip, across, along)) in family_spec.iter().enumerate() {
            let mut comp = vec![usize::MAX; n];
            let mut comps: Vec<Vec<usize>> = Vec::new();
            for s in 0..n {
                if comp[s] != usize::MAX {
                    continue;
                }
                let id = comps.len();
                let mut members = vec![s];
                comp[s] = id;
                let mut queue = VecDeque::from([s]);
                while let Some(v) = queue.pop_front() {
                    for &(w, c) in &class_adj[v] {
                        if c != skip && comp[w] == usize::MAX {
                            comp[w] = id;
                            members.push(w);
                            queue.push_back(w);
                        }
                    }
                }
                members.sort_by_key(|&v| along(pts[v]));
                comps.push(members);
            }
            comps.sort_by_key(|m| m.iter().map(|&v| across(pts[v])).min());
            debug_assert_eq!(comps.len(), 2 * k);
            for (rank, members) in comps.iter().enumerate() {
                let index = rank as i32 - (kk - 1);
                for &v in members {
                    coords[v][slot] = index;
                }
            }
            lines[slot] = comps;
        }
        let verts: Vec<HexVertex> = coords.iter().map(|&c| HexVertex::from(c)).collect();
        let index = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();

        let rot1: Vec<usize> = pts.iter().map(|&p| by_lattice[&rotate_cw(p)]).collect();
        let mut rot: [Vec<usize>; 6] = Default::default();
        rot[0] = (0..n).collect();
        for s in 1..6 {
            rot[s] = rot[s - 1].iter().map(|&v| rot1[v]).collect();
        }
        let turn = |v: usize, s: usize| rot[s % 6][v];

        let u = by_lattice[&(kk - 1, 3 * kk - 1)];
        let corners: [usize; 6] = std::array::from_fn(|s| turn(u, s));

        let in_top_sector = |v: usize| pts[v].1 > 3 * pts[v].0.abs();
        let sector: Vec<u8> = (0..n)
            .map(|v| {
                (0..6)
                    .find(|&s| in_top_sector(turn(v, 6 - s)))
                    .expect("every vertex lies strictly inside one sector") as u8
            })
            .collect();

        let side0: Vec<usize> = if k == 1 {
            vec![corners[0], corners[1]]
        } else {
            let l_u = coords[u][0];
            let path = lines[0][(l_u + kk - 1) as usize].clone();
            debug_assert_eq!(path[0], u);
            path
        };
        let sides: [Vec<usize>; 6] = std::array::from_fn(|s| side0.iter().map(|&v| turn(v, s)).collect());

        let owned = if k == 1 { 1 } else { 2 * k - 1 };
        let cycle: Vec<usize> = sides.iter().flat_map(|s| s[..owned].iter().copied()).collect();
        let mut perimeter = vec![false; n];
        let mut cycle_pos = vec![None; n];
        for (i, &v) in cycle.iter().enumerate() {
            perimeter[v] = true;
            cycle_pos[v] = Some(i);
        }

        let special0 = {
            let mut path = Vec::new();
            let mut cur = u;
            for level in (1..=kk).rev() {
                let mut row: Vec<usize> = lines[1][(level + kk - 1) as usize]
                    .iter()
                    .copied()
                    .filter(|&v| sector[v] == 0)
                    .collect();
                if row.last() == Some(&cur) {
                    row.reverse();
                }
                debug_assert_eq!(row[0], cur);
                if level == 1 {
                    path.extend(row);
                } else {
                    path.extend_from_slice(&row[..row.len() - 1]);
                    let exit = row[row.len() - 2];
                    let below = (pts[exit].0, pts[exit].1 - 2);
                    cur = by_lattice[&below];
                }
            }
            path
        };
        let special: [Vec<usize>; 6] =
            std::array::from_fn(|s| special0.iter().map(|&v| turn(v, s)).collect());

        let reading0: Vec<usize> = lines[0].iter().rev().flatten().copied().collect();
        let readings: [Vec<usize>; 6] =
            std::array::from_fn(|s| reading0.iter().map(|&v| turn(v, s)).collect());
        let mut reading_rank = vec![0; n];
        for (pos, &v) in reading0.iter().enumerate() {
            reading_rank[v] = pos;
        }

        let mut to_perimeter = vec![u32::MAX; n];
        let mut queue = VecDeque::new();
        for &v in &cycle {
            to_perimeter[v] = 0;
            queue.push_back(v);
        }
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if to_perimeter[w] == u32::MAX {
                    to_perimeter[w] = to_perimeter[v] + 1;
                    queue.push_back(w);
                }
            }
        }

        Ok(Grid {
            k,
            verts,
            lattice: pts,
            index,
            by_lattice,
            adj,
            lines,
            rot,
            corners,
            sides,
            perimeter,
            cycle,
            cycle_pos,
            sector,
            special,
            readings,
            reading_rank,
            to_perimeter,
            apsp: OnceLock::new(),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn vertex_count(&self) -> usize {
        self.verts.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = HexVertex> + '_ {
        self.verts.iter().copied()
    }

    pub fn contains(&self, v: HexVertex) -> bool {
        self.index.contains_key(&v)
    }

    pub fn adjacent(&self, a: HexVertex, b: HexVertex) -> Result<bool> {
        let (ia, ib) = (self.idx(a)?, self.idx(b)?);
        Ok(self.adj[ia].binary_search(&ib).is_ok())
    }

    pub fn neighbors(&self, v: HexVertex) -> Result<Vec<HexVertex>> {
        Ok(self.adj[self.idx(v)?].iter().map(|&w| self.verts[w]).collect())
    }

    pub fn distance(&self, a: HexVertex, b: HexVertex) -> Result<u32> {
        Ok(self.dist(self.idx(a)?, self.idx(b)?))
    }

    /// Rotation by `60 * steps` degrees clockwise about the grid center.
    pub fn rotate(&self, v: HexVertex, steps: usize) -> Result<HexVertex> {
        Ok(self.verts[self.turn(self.idx(v)?, steps)])
    }

    pub fn line(&self, id: LineId) -> Option<Vec<HexVertex>> {
        let i = id.index + self.k as i32 - 1;
        let path = self.lines[id.family.slot()].get(usize::try_from(i).ok()?)?;
        Some(path.iter().map(|&v| self.verts[v]).collect())
    }

    pub fn line_ids(&self) -> impl Iterator<Item = LineId> + '_ {
        let k = self.k as i32;
        LineFamily::ALL
            .into_iter()
            .flat_map(move |family| (-k + 1..=k).map(move |index| LineId { family, index }))
    }

    pub fn corners(&self) -> [HexVertex; 6] {
        self.corners.map(|v| self.verts[v])
    }

    /// Full side paths (2k+1 vertices for k >= 2), each starting at its corner.
    pub fn sides(&self) -> Vec<Vec<HexVertex>> {
        self.sides.iter().map(|s| s.iter().map(|&v| self.verts[v]).collect()).collect()
    }

    /// Perimeter vertices in clockwise order starting at corner 0.
    pub fn perimeter_cycle(&self) -> Vec<HexVertex> {
        self.cycle.iter().map(|&v| self.verts[v]).collect()
    }

    pub fn on_perimeter(&self, v: HexVertex) -> Result<bool> {
        Ok(self.perimeter[self.idx(v)?])
    }

    pub fn sector_of(&self, v: HexVertex) -> Result<usize> {
        Ok(self.sector[self.idx(v)?] as usize)
    }

    pub fn special_path(&self, sector: usize) -> Result<Vec<HexVertex>> {
        let path = self
            .special
            .get(sector)
            .ok_or_else(|| Error::InvalidParameter(format!("sector {sector} out of range")))?;
        Ok(path.iter().map(|&v| self.verts[v]).collect())
    }

    /// Cartesian position for unit edge length, y pointing up.
    pub fn position(&self, v: HexVertex) -> Result<(f64, f64)> {
        let (x, y) = self.lattice[self.idx(v)?];
        Ok((x as f64 * 3f64.sqrt() / 2.0, y as f64 / 2.0))
    }

    // Dense-index API used across the crate.

    pub(crate) fn idx(&self, v: HexVertex) -> Result<usize> {
        self.index.get(&v).copied().ok_or(Error::InvalidVertex(v))
    }

    pub(crate) fn try_idx(&self, v: HexVertex) -> Option<usize> {
        self.index.get(&v).copied()
    }

    pub(crate) fn vert(&self, i: usize) -> HexVertex {
        self.verts[i]
    }

    pub(crate) fn adj(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub(crate) fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    pub(crate) fn lattice(&self, i: usize) -> (i32, i32) {
        self.lattice[i]
    }

    pub(crate) fn at_lattice(&self, p: (i32, i32)) -> Option<usize> {
        self.by_lattice.get(&p).copied()
    }

    pub(crate) fn turn(&self, i: usize, steps: usize) -> usize {
        self.rot[steps % 6][i]
    }

    pub(crate) fn corner_ids(&self) -> &[usize; 6] {
        &self.corners
    }

    pub(crate) fn corner_index(&self, i: usize) -> Option<usize> {
        self.corners.iter().position(|&c| c == i)
    }

    pub(crate) fn is_perimeter(&self, i: usize) -> bool {
        self.perimeter[i]
    }

    pub(crate) fn cycle_ids(&self) -> &[usize] {
        &self.cycle
    }

    pub(crate) fn cycle_position(&self, i: usize) -> Option<usize> {
        self.cycle_pos[i]
    }

    pub(crate) fn sector_id(&self, i: usize) -> usize {
        self.sector[i] as usize
    }

    pub(crate) fn special_ids(&self, sector: usize) -> &[usize] {
        &self.special[sector]
    }

    pub(crate) fn reading(&self, corner: usize) -> &[usize] {
        &self.readings[corner]
    }

    /// Position of vertex `i` in the reading that starts at `corner`.
    pub(crate) fn reading_pos(&self, corner: usize, i: usize) -> usize {
        self.reading_rank[self.turn(i, 6 - corner % 6)]
    }

    pub(crate) fn line_ids_of(&self, family: LineFamily) -> &[Vec<usize>] {
        &self.lines[family.slot()]
    }

    pub(crate) fn perimeter_distance(&self, i: usize) -> u32 {
        self.to_perimeter[i]
    }

    pub(crate) fn dist(&self, a: usize, b: usize) -> u32 {
        let n = self.verts.len();
        self.apsp.get_or_init(|| self.all_pairs())[a * n + b] as u32
    }

    pub(crate) fn dist_row(&self, a: usize) -> &[u16] {
        let n = self.verts.len();
        &self.apsp.get_or_init(|| self.all_pairs())[a * n..(a + 1) * n]
    }

    fn all_pairs(&self) -> Vec<u16> {
        let n = self.verts.len();
        let mut out = vec![u16::MAX; n * n];
        let mut queue = VecDeque::with_capacity(n);
        for s in 0..n {
            let row = &mut out[s * n..(s + 1) * n];
            row[s] = 0;
            queue.push_back(s);
            while let Some(v) = queue.pop_front() {
                for &w in &self.adj[v] {
                    if row[w] == u16::MAX {
                        row[w] = row[v] + 1;
                        queue.push_back(w);
                    }
                }
            }
        }
        out
    }
}
