//! Geodesic mutual visibility: the pairwise predicate, the closed-form
//! 4k-vertex sets `X_k`, and an exact branch-and-bound solver for small graphs.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::hexgrid::{Grid, HexVertex, LineFamily};

/// A subset of the vertices of one grid.
#[derive(Clone)]
pub struct VertexSet<'g> {
    grid: &'g Grid,
    bits: Vec<u64>,
}

impl PartialEq for VertexSet<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.grid.k() == other.grid.k() && self.bits == other.bits
    }
}

impl Eq for VertexSet<'_> {}

impl std::fmt::Debug for VertexSet<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.vertices()).finish()
    }
}

impl<'g> VertexSet<'g> {
    pub fn empty(grid: &'g Grid) -> Self {
        VertexSet { grid, bits: vec![0; grid.vertex_count().div_ceil(64)] }
    }

    /// Duplicates are accepted and collapse.
    pub fn from_vertices<I>(grid: &'g Grid, vertices: I) -> Result<Self>
    where
        I: IntoIterator<Item = HexVertex>,
    {
        let mut set = Self::empty(grid);
        for v in vertices {
            set.insert_id(grid.idx(v)?);
        }
        Ok(set)
    }

    pub fn grid(&self) -> &'g Grid {
        self.grid
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn contains(&self, v: HexVertex) -> bool {
        self.grid.try_idx(v).is_some_and(|i| self.has(i))
    }

    pub fn insert(&mut self, v: HexVertex) -> Result<bool> {
        let i = self.grid.idx(v)?;
        Ok(self.insert_id(i))
    }

    pub fn remove(&mut self, v: HexVertex) -> Result<bool> {
        let i = self.grid.idx(v)?;
        Ok(self.remove_id(i))
    }

    /// Members in dense-index order (top row first, left to right).
    pub fn vertices(&self) -> Vec<HexVertex> {
        self.ids().map(|i| self.grid.vert(i)).collect()
    }

    pub fn rotated(&self, steps: usize) -> Self {
        let mut out = Self::empty(self.grid);
        for i in self.ids() {
            out.insert_id(self.grid.turn(i, steps));
        }
        out
    }

    pub(crate) fn has(&self, i: usize) -> bool {
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub(crate) fn insert_id(&mut self, i: usize) -> bool {
        let fresh = !self.has(i);
        self.bits[i / 64] |= 1 << (i % 64);
        fresh
    }

    pub(crate) fn remove_id(&mut self, i: usize) -> bool {
        let had = self.has(i);
        self.bits[i / 64] &= !(1 << (i % 64));
        had
    }

    pub(crate) fn ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(w * 64 + b)
            })
        })
    }
}

/// Anything with dense vertex ids and an all-pairs distance table.
pub trait Topology {
    fn order(&self) -> usize;
    fn neighbors(&self, v: usize) -> &[usize];
    /// Distances from `v`; `u16::MAX` marks unreachable vertices.
    fn dist_row(&self, v: usize) -> &[u16];
}

impl Topology for Grid {
    fn order(&self) -> usize {
        self.vertex_count()
    }
    fn neighbors(&self, v: usize) -> &[usize] {
        self.adj(v)
    }
    fn dist_row(&self, v: usize) -> &[u16] {
        Grid::dist_row(self, v)
    }
}

/// A plain undirected graph given by adjacency lists.
#[derive(Clone, Debug)]
pub struct AdjGraph {
    adj: Vec<Vec<usize>>,
    dist: Vec<u16>,
}

impl AdjGraph {
    pub fn new(adj: Vec<Vec<usize>>) -> Result<Self> {
        let n = adj.len();
        for (v, list) in adj.iter().enumerate() {
            for &w in list {
                if w >= n || !adj[w].contains(&v) {
                    return Err(Error::InvalidInput(format!("edge {v}-{w} is not symmetric")));
                }
            }
        }
        let mut dist = vec![u16::MAX; n * n];
        for s in 0..n {
            let row = &mut dist[s * n..(s + 1) * n];
            row[s] = 0;
            let mut queue = std::collections::VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &w in &adj[v] {
                    if row[w] == u16::MAX {
                        row[w] = row[v] + 1;
                        queue.push_back(w);
                    }
                }
            }
        }
        Ok(AdjGraph { adj, dist })
    }

    pub fn path(n: usize) -> Self {
        let adj = (0..n)
            .map(|v| {
                let mut list = Vec::new();
                if v > 0 {
                    list.push(v - 1);
                }
                if v + 1 < n {
                    list.push(v + 1);
                }
                list
            })
            .collect();
        Self::new(adj).expect("path adjacency is symmetric")
    }

    pub fn cycle(n: usize) -> Self {
        let adj = (0..n).map(|v| vec![(v + n - 1) % n, (v + 1) % n]).collect();
        Self::new(adj).expect("cycle adjacency is symmetric")
    }
}

impl Topology for AdjGraph {
    fn order(&self) -> usize {
        self.adj.len()
    }
    fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }
    fn dist_row(&self, v: usize) -> &[u16] {
        let n = self.adj.len();
        &self.dist[v * n..(v + 1) * n]
    }
}

/// Walks the geodesic DAG from `u` toward `v`, avoiding blocked interior vertices.
pub(crate) fn visible_by<T, F>(g: &T, blocked: F, u: usize, v: usize) -> bool
where
    T: Topology + ?Sized,
    F: Fn(usize) -> bool,
{
    let du = g.dist_row(u);
    let dv = g.dist_row(v);
    let d = du[v];
    if d == u16::MAX {
        return false;
    }
    if d <= 1 {
        return true;
    }
    let mut seen = vec![false; g.order()];
    let mut stack = vec![u];
    seen[u] = true;
    while let Some(w) = stack.pop() {
        for &x in g.neighbors(w) {
            if x == v && du[w] + 1 == d {
                return true;
            }
            if !seen[x] && du[x] == du[w] + 1 && du[x] + dv[x] == d && !blocked(x) {
                seen[x] = true;
                stack.push(x);
            }
        }
    }
    false
}

pub fn x_visible(g: &Grid, x: &VertexSet<'_>, u: HexVertex, v: HexVertex) -> Result<bool> {
    let (iu, iv) = (g.idx(u)?, g.idx(v)?);
    if iu == iv {
        return Err(Error::InvalidPair);
    }
    Ok(visible_by(g, |w| x.has(w), iu, iv))
}

pub fn is_mutual_visibility_set(g: &Grid, x: &VertexSet<'_>) -> bool {
    let members: Vec<usize> = x.ids().collect();
    mutually_visible(g, &members, |w| x.has(w))
}

/// Mutual visibility of `members` on any topology.
pub fn is_mutual_visibility_subset<T: Topology + ?Sized>(g: &T, members: &[usize]) -> bool {
    let mut inside = vec![false; g.order()];
    for &m in members {
        inside[m] = true;
    }
    mutually_visible(g, members, |w| inside[w])
}

fn mutually_visible<T, F>(g: &T, members: &[usize], blocked: F) -> bool
where
    T: Topology + ?Sized,
    F: Fn(usize) -> bool + Copy,
{
    members
        .iter()
        .enumerate()
        .all(|(i, &a)| members[i + 1..].iter().all(|&b| visible_by(g, blocked, a, b)))
}

/// Members of `X_k` before the half-turn, keyed by their role in the construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XkAnchors {
    pub a: HexVertex,
    pub a_i: Vec<HexVertex>,
    pub b: HexVertex,
    pub b_prime: HexVertex,
    pub b_second: HexVertex,
    pub b_i: Vec<HexVertex>,
}

impl XkAnchors {
    pub fn new(k: usize) -> Result<Self> {
        if k < 4 {
            return Err(Error::Unsupported(format!("X_k is defined for k >= 4, got {k}")));
        }
        let k = k as i32;
        Ok(XkAnchors {
            a: HexVertex::new(2, -k + 2, -k + 1),
            a_i: (0..=k - 3).map(|i| HexVertex::new(3 + i, -k + 4 + 2 * i, -k + 1 + i)).collect(),
            b: HexVertex::new(k, k, 1),
            b_prime: HexVertex::new(k - 1, k - 1, 0),
            b_second: HexVertex::new(k - 2, k - 3, -1),
            b_i: (0..=k - 3).map(|i| HexVertex::new(i, -k + 1 + 2 * i, -k + 2 + i)).collect(),
        })
    }

    /// `A_k ∪ B_k`.
    pub fn half(&self) -> Vec<HexVertex> {
        let mut out = vec![self.a];
        out.extend(&self.a_i);
        out.extend([self.b, self.b_prime, self.b_second]);
        out.extend(&self.b_i);
        out
    }
}

/// Image under the half-turn about the grid center.
pub fn half_turn(v: HexVertex) -> HexVertex {
    HexVertex::new(1 - v.l, 1 - v.h, 1 - v.r)
}

/// The 4k vertices of `X_k`.
pub fn xk_vertices(k: usize) -> Result<Vec<HexVertex>> {
    let half = XkAnchors::new(k)?.half();
    let mut out: Vec<HexVertex> = half.iter().copied().chain(half.iter().map(|&v| half_turn(v))).collect();
    out.sort();
    Ok(out)
}

pub fn mu_set_xk(g: &Grid) -> Result<VertexSet<'_>> {
    VertexSet::from_vertices(g, xk_vertices(g.k())?)
}

/// A 12-vertex mutual-visibility set of `G_3` that is closed under the
/// half-turn and has at most two vertices per line. The `X_k` formulas
/// evaluated at k = 3 do not give a mutual-visibility set.
pub const G3_SET: [[i32; 3]; 12] = [
    [-2, -2, 0],
    [-2, 0, 3],
    [-1, -1, 1],
    [-1, 1, 2],
    [0, -2, -2],
    [0, 2, 2],
    [1, -1, -1],
    [1, 3, 3],
    [2, 0, -1],
    [2, 2, 0],
    [3, 1, -2],
    [3, 3, 1],
];

/// Maximum-size mutual-visibility set used as a formation template on `G_k`.
pub fn template_vertices(k: usize) -> Result<Vec<HexVertex>> {
    match k {
        3 => Ok(G3_SET.iter().map(|&a| HexVertex::from(a)).collect()),
        _ => xk_vertices(k),
    }
}

/// The vertices `c` and `c_i` used as geodesic waypoints for `X_k`.
pub fn witness_c_vertices(k: usize) -> Result<Vec<HexVertex>> {
    if k < 4 {
        return Err(Error::Unsupported(format!("witnesses are defined for k >= 4, got {k}")));
    }
    let k = k as i32;
    let mut out = vec![HexVertex::new(0, -k + 2, -k + 2)];
    out.extend((0..=k - 3).map(|i| HexVertex::new(i + 1, -k + 4 + 2 * i, -k + 3 + i)));
    Ok(out)
}

/// Largest number of members of `x` on a single line of any family.
pub fn max_per_line(g: &Grid, x: &VertexSet<'_>) -> usize {
    LineFamily::ALL
        .iter()
        .flat_map(|&f| g.line_ids_of(f).iter())
        .map(|line| line.iter().filter(|&&v| x.has(v)).count())
        .max()
        .unwrap_or(0)
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct MuResult<V> {
    pub value: usize,
    pub witness: Vec<V>,
    pub exact: bool,
}

/// Exact mutual-visibility number of a grid. Branches on each h-line
/// taking at most two of its vertices.
pub fn mu_exact(g: &Grid, budget: Duration) -> MuResult<HexVertex> {
    let groups: Vec<Vec<usize>> = g.line_ids_of(LineFamily::H).to_vec();
    let res = search(g, &groups, 2, budget);
    MuResult {
        value: res.value,
        witness: res.witness.iter().map(|&i| g.vert(i)).collect(),
        exact: res.exact,
    }
}

/// Exact mutual-visibility number of an arbitrary graph (one vertex per branch).
pub fn mu_exact_graph<T: Topology>(g: &T, budget: Duration) -> MuResult<usize> {
    let groups: Vec<Vec<usize>> = (0..g.order()).map(|v| vec![v]).collect();
    search(g, &groups, 1, budget)
}

struct Search<'a, T: ?Sized> {
    g: &'a T,
    groups: &'a [Vec<usize>],
    caps: Vec<usize>,
    /// caps summed from group i to the end
    tail: Vec<usize>,
    chosen: Vec<usize>,
    inside: Vec<bool>,
    best: Vec<usize>,
    deadline: Instant,
    nodes: u64,
    timed_out: bool,
}

fn search<T: Topology + ?Sized>(g: &T, groups: &[Vec<usize>], cap: usize, budget: Duration) -> MuResult<usize> {
    let caps: Vec<usize> = groups.iter().map(|grp| grp.len().min(cap)).collect();
    let mut tail = vec![0; groups.len() + 1];
    for i in (0..groups.len()).rev() {
        tail[i] = tail[i + 1] + caps[i];
    }
    let mut s = Search {
        g,
        groups,
        caps,
        tail,
        chosen: Vec::new(),
        inside: vec![false; g.order()],
        best: Vec::new(),
        deadline: Instant::now() + budget,
        nodes: 0,
        timed_out: false,
    };
    s.descend(0);
    let mut witness = s.best.clone();
    witness.sort_unstable();
    MuResult { value: witness.len(), witness, exact: !s.timed_out }
}

impl<T: Topology + ?Sized> Search<'_, T> {
    /// Returns true once the search can stop (bound met or out of time).
    fn descend(&mut self, group: usize) -> bool {
        if self.chosen.len() > self.best.len() {
            self.best = self.chosen.clone();
            if self.best.len() == self.tail[0] {
                return true;
            }
        }
        if group == self.groups.len() || self.chosen.len() + self.tail[group] <= self.best.len() {
            return false;
        }
        self.nodes += 1;
        if self.nodes % 256 == 0 && Instant::now() > self.deadline {
            self.timed_out = true;
            return true;
        }
        let members = &self.groups[group];
        for size in (0..=self.caps[group]).rev() {
            for pick in combinations(members.len(), size) {
                let added: Vec<usize> = pick.iter().map(|&p| members[p]).collect();
                if !self.admits(&added) {
                    continue;
                }
                for &a in &added {
                    self.inside[a] = true;
                    self.chosen.push(a);
                }
                let stop = self.descend(group + 1);
                for &a in &added {
                    self.inside[a] = false;
                    self.chosen.pop();
                }
                if stop {
                    return true;
                }
            }
        }
        false
    }

    /// Whether the current set extended by `added` is still mutually visible.
    fn admits(&mut self, added: &[usize]) -> bool {
        if added.is_empty() {
            return true;
        }
        for &a in added {
            self.inside[a] = true;
        }
        let g = self.g;
        let inside = &self.inside;
        let blocked = |w: usize| inside[w];
        let lies_between = |a: usize, b: usize, x: usize| {
            let (da, db) = (g.dist_row(a), g.dist_row(b));
            da[x] as u32 + db[x] as u32 == da[b] as u32
        };
        let mut ok = true;
        'outer: for (i, &a) in self.chosen.iter().enumerate() {
            for &b in &self.chosen[i + 1..] {
                if added.iter().any(|&x| lies_between(a, b, x)) && !visible_by(g, blocked, a, b) {
                    ok = false;
                    break 'outer;
                }
            }
            for &b in added {
                if !visible_by(g, blocked, a, b) {
                    ok = false;
                    break 'outer;
                }
            }
        }
        if ok && added.len() == 2 {
            ok = visible_by(g, blocked, added[0], added[1]);
        }
        for &a in added {
            self.inside[a] = false;
        }
        ok
    }
}

fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    match size {
        0 => vec![vec![]],
        1 => (0..n).map(|i| vec![i]).collect(),
        2 => (0..n).flat_map(|i| (i + 1..n).map(move |j| vec![i, j])).collect(),
        _ => unreachable!("at most two picks per group"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xk_sizes_and_named_members() {
        let x = XkAnchors::new(5).unwrap();
        assert_eq!(x.a_i.len() + 1, 4);
        assert_eq!(x.b_i.len() + 3, 6);
        assert_eq!(x.b, HexVertex::new(5, 5, 1));
        assert_eq!(x.b_prime, HexVertex::new(4, 4, 0));
        assert_eq!(x.b_second, HexVertex::new(3, 2, -1));
        assert!(XkAnchors::new(3).is_err());
        for k in 4..=12 {
            assert_eq!(xk_vertices(k).unwrap().len(), 4 * k);
        }
    }

    #[test]
    fn small_sets_are_visible() {
        let g = Grid::new(3).unwrap();
        let v: Vec<HexVertex> = g.vertices().collect();
        for pair in [[v[0], v[20]], [v[5], v[53]]] {
            let x = VertexSet::from_vertices(&g, pair).unwrap();
            assert!(is_mutual_visibility_set(&g, &x));
        }
    }

    #[test]
    fn three_on_a_line_block() {
        let g = Grid::new(3).unwrap();
        let line = &g.line_ids_of(LineFamily::H)[2];
        let x = VertexSet::from_vertices(&g, line[2..5].iter().map(|&i| g.vert(i))).unwrap();
        assert!(!is_mutual_visibility_set(&g, &x));
    }

    #[test]
    fn x5_waypoint_case() {
        let g = Grid::new(5).unwrap();
        let x = mu_set_xk(&g).unwrap();
        let a = HexVertex::new(2, -3, -4);
        let target = half_turn(HexVertex::new(0, -4, -3));
        assert!(x_visible(&g, &x, a, target).unwrap());
        assert_eq!(x_visible(&g, &x, a, a), Err(Error::InvalidPair));
        let c = witness_c_vertices(5).unwrap();
        assert_eq!(c[1], HexVertex::new(1, -1, -2));
        assert_eq!(c[0].h, a.h);
        assert_eq!(g.distance(c[0], HexVertex::new(0, -4, -3)).unwrap(), 1);
    }

    #[test]
    fn g3_template() {
        let g = Grid::new(3).unwrap();
        let set = VertexSet::from_vertices(&g, template_vertices(3).unwrap()).unwrap();
        assert_eq!(set.len(), 12);
        assert!(is_mutual_visibility_set(&g, &set));
        assert_eq!(set.rotated(3), set);
        assert!(max_per_line(&g, &set) <= 2);
        assert!(set.contains(HexVertex::new(3, 3, 1)));
    }

    #[test]
    fn exact_on_paths_and_cycles() {
        let budget = Duration::from_secs(10);
        for n in 2..9 {
            assert_eq!(mu_exact_graph(&AdjGraph::path(n), budget).value, 2);
        }
        assert_eq!(mu_exact_graph(&AdjGraph::path(1), budget).value, 1);
        assert_eq!(mu_exact_graph(&AdjGraph::cycle(7), budget).value, 3);
    }

    #[test]
    fn vertex_set_basics() {
        let g = Grid::new(2).unwrap();
        let mut s = VertexSet::empty(&g);
        assert!(s.is_empty());
        let v = HexVertex::new(0, 0, 0);
        assert!(s.insert(v).unwrap());
        assert!(!s.insert(v).unwrap());
        assert!(s.contains(v));
        assert_eq!(s.len(), 1);
        assert!(s.remove(v).unwrap());
        assert!(s.insert(HexVertex::new(7, 7, 7)).is_err());
    }
}
