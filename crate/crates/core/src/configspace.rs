//! Robot configurations, symmetricity and corner-reading views.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hexgrid::{Grid, HexVertex};
use crate::visibility::VertexSet;

/// Robot positions on a grid. At most one robot per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration<'g> {
    occupied: VertexSet<'g>,
}

/// On-disk form: `{ "k": 5, "robots": [[l, h, r], ...] }`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigFile {
    pub k: usize,
    pub robots: Vec<HexVertex>,
}

impl<'g> Configuration<'g> {
    /// Fails on vertices outside the grid and on two robots sharing a vertex.
    pub fn new<I>(grid: &'g Grid, robots: I) -> Result<Self>
    where
        I: IntoIterator<Item = HexVertex>,
    {
        let mut occupied = VertexSet::empty(grid);
        for v in robots {
            if !occupied.insert(v)? {
                return Err(Error::InvalidInput(format!("two robots on {v}")));
            }
        }
        Ok(Configuration { occupied })
    }

    pub fn from_set(occupied: VertexSet<'g>) -> Self {
        Configuration { occupied }
    }

    pub fn grid(&self) -> &'g Grid {
        self.occupied.grid()
    }

    pub fn occupied(&self) -> &VertexSet<'g> {
        &self.occupied
    }

    pub fn robots(&self) -> Vec<HexVertex> {
        self.occupied.vertices()
    }

    pub fn len(&self) -> usize {
        self.occupied.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occupied.is_empty()
    }

    pub fn rotated(&self, steps: usize) -> Self {
        Configuration { occupied: self.occupied.rotated(steps) }
    }

    pub fn to_file(&self) -> ConfigFile {
        ConfigFile { k: self.grid().k(), robots: self.robots() }
    }

    pub fn from_file(grid: &'g Grid, file: &ConfigFile) -> Result<Self> {
        if file.k != grid.k() {
            return Err(Error::InvalidInput(format!(
                "configuration is for k = {}, grid has k = {}",
                file.k,
                grid.k()
            )));
        }
        Self::new(grid, file.robots.iter().copied())
    }

    pub(crate) fn ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.occupied.ids()
    }

    pub(crate) fn has(&self, i: usize) -> bool {
        self.occupied.has(i)
    }
}

/// Outcome of reading the configuration from all six corners.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ViewResult {
    /// The lexicographically smallest reading as a string of `0`/`1`.
    pub lss: String,
    /// Corners whose reading equals `lss`. Corner `s` is reached from
    /// corner 0 by rotating `s` steps clockwise.
    pub achievers: Vec<usize>,
    pub rho: usize,
}

fn packed_reading(c: &Configuration<'_>, corner: usize) -> Vec<u64> {
    let reading = c.grid().reading(corner);
    let mut words = vec![0u64; reading.len().div_ceil(64)];
    for (pos, &v) in reading.iter().enumerate() {
        if c.has(v) {
            words[pos / 64] |= 1 << (63 - pos % 64);
        }
    }
    words
}

/// Corners attaining the minimum reading.
pub(crate) fn lss_achievers(c: &Configuration<'_>) -> Vec<usize> {
    let packed: Vec<Vec<u64>> = (0..6).map(|s| packed_reading(c, s)).collect();
    let mut best = vec![0];
    for s in 1..6 {
        match packed[s].cmp(&packed[best[0]]) {
            Ordering::Less => best = vec![s],
            Ordering::Equal => best.push(s),
            Ordering::Greater => {}
        }
    }
    best
}

pub fn lss_view(c: &Configuration<'_>) -> Result<ViewResult> {
    if c.is_empty() {
        return Err(Error::InvalidInput("view of an empty configuration".into()));
    }
    let achievers = lss_achievers(c);
    let lss = c
        .grid()
        .reading(achievers[0])
        .iter()
        .map(|&v| if c.has(v) { '1' } else { '0' })
        .collect();
    Ok(ViewResult { rho: achievers.len(), lss, achievers })
}

/// The six corner readings as `0`/`1` strings, indexed by corner.
pub fn corner_readings(c: &Configuration<'_>) -> Vec<String> {
    (0..6)
        .map(|s| c.grid().reading(s).iter().map(|&v| if c.has(v) { '1' } else { '0' }).collect())
        .collect()
}

/// Order of the rotation group fixing the configuration, by direct rotation.
pub fn symmetricity(c: &Configuration<'_>) -> usize {
    let fixed = |steps| c.rotated(steps) == *c;
    if fixed(1) {
        6
    } else if fixed(2) {
        3
    } else if fixed(3) {
        2
    } else {
        1
    }
}

/// Rotation-invariant ranking of vertices derived from the minimum readings.
/// Two vertices share a key exactly when a symmetry of the configuration
/// maps one onto the other.
#[derive(Clone, Debug)]
pub struct ViewFrame<'g> {
    grid: &'g Grid,
    achievers: Vec<usize>,
}

impl<'g> ViewFrame<'g> {
    pub fn new(c: &Configuration<'g>) -> Self {
        ViewFrame { grid: c.grid(), achievers: lss_achievers(c) }
    }

    pub fn rho(&self) -> usize {
        self.achievers.len()
    }

    pub fn achievers(&self) -> &[usize] {
        &self.achievers
    }

    pub(crate) fn key(&self, v: usize) -> usize {
        self.achievers.iter().map(|&s| self.grid.reading_pos(s, v)).min().expect("at least one achiever")
    }

    /// Canonical encoding of a vertex set: its sorted keys.
    pub(crate) fn set_key(&self, set: &[usize]) -> Vec<usize> {
        let mut best: Option<Vec<usize>> = None;
        for &s in &self.achievers {
            let mut enc: Vec<usize> = set.iter().map(|&v| self.grid.reading_pos(s, v)).collect();
            enc.sort_unstable();
            if best.as_ref().is_none_or(|b| enc < *b) {
                best = Some(enc);
            }
        }
        best.unwrap_or_default()
    }
}

pub fn min_view_robots(c: &Configuration<'_>) -> Result<Vec<HexVertex>> {
    if c.is_empty() {
        return Err(Error::InvalidInput("view of an empty configuration".into()));
    }
    let g = c.grid();
    let mut out: Vec<HexVertex> = lss_achievers(c)
        .into_iter()
        .map(|s| {
            let first = g.reading(s).iter().find(|&&v| c.has(v)).expect("nonempty");
            g.vert(*first)
        })
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// Sum of distances from `at` to every robot.
pub fn total_distance(c: &Configuration<'_>, at: HexVertex) -> Result<u32> {
    let g = c.grid();
    let i = g.idx(at)?;
    if !c.has(i) {
        return Err(Error::InvalidInput(format!("no robot on {at}")));
    }
    Ok(total_distance_id(c, i))
}

pub(crate) fn total_distance_id(c: &Configuration<'_>, i: usize) -> u32 {
    let row = c.grid().dist_row(i);
    c.ids().map(|j| row[j] as u32).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::visibility::xk_vertices;

    #[test]
    fn lone_corner_robot() {
        let g = Grid::new(4).unwrap();
        let c = Configuration::new(&g, [g.corners()[2]]).unwrap();
        let view = lss_view(&c).unwrap();
        assert_eq!(view.rho, 1);
        assert_eq!(view.lss.len(), 6 * 16);
        assert_eq!(view.achievers.len(), 1);
        let starts: Vec<usize> = (0..6).filter(|&s| c.has(g.reading(s)[0])).collect();
        assert_eq!(starts, vec![2]);
        assert_eq!(min_view_robots(&c).unwrap(), vec![g.corners()[2]]);
    }

    #[test]
    fn xk_has_symmetricity_two() {
        let g = Grid::new(5).unwrap();
        let c = Configuration::new(&g, xk_vertices(5).unwrap()).unwrap();
        assert_eq!(symmetricity(&c), 2);
        let view = lss_view(&c).unwrap();
        assert_eq!(view.rho, 2);
        let mins = min_view_robots(&c).unwrap();
        assert_eq!(mins.len(), 2);
        assert_eq!(g.rotate(mins[0], 3).unwrap(), mins[1]);
    }

    #[test]
    fn duplicate_robots_rejected() {
        let g = Grid::new(2).unwrap();
        let v = HexVertex::new(0, 0, 0);
        assert!(Configuration::new(&g, [v, v]).is_err());
        assert!(lss_view(&Configuration::new(&g, []).unwrap()).is_err());
    }

    #[test]
    fn total_distance_pair() {
        let g = Grid::new(4).unwrap();
        let a = HexVertex::new(0, 0, 0);
        let b = g.vertices().find(|&v| g.distance(a, v).unwrap() == 5).unwrap();
        let c = Configuration::new(&g, [a, b]).unwrap();
        assert_eq!(total_distance(&c, a).unwrap(), 5);
        assert_eq!(total_distance(&c, b).unwrap(), 5);
        let lone = Configuration::new(&g, [a]).unwrap();
        assert_eq!(total_distance(&lone, a).unwrap(), 0);
    }

    #[test]
    fn json_round_trip() {
        let g = Grid::new(4).unwrap();
        let c = Configuration::new(&g, xk_vertices(4).unwrap()).unwrap();
        let text = serde_json::to_string(&c.to_file()).unwrap();
        assert!(text.starts_with("{\"k\":4,\"robots\":[["));
        let back: ConfigFile = serde_json::from_str(&text).unwrap();
        assert_eq!(Configuration::from_file(&g, &back).unwrap(), c);
    }
}
