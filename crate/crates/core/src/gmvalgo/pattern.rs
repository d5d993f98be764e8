use crate::configspace::Configuration;
use crate::error::{Error, Result};
use crate::hexgrid::{Grid, HexVertex};
use crate::visibility::{half_turn, template_vertices, XkAnchors};

/// Target vertices on `G_{k'}`, labelled with the shared center-based triples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    kprime: usize,
    targets: Vec<HexVertex>,
}

impl Pattern {
    /// A pattern with explicit targets, e.g. read back from a trace.
    pub fn from_parts(kprime: usize, mut targets: Vec<HexVertex>) -> Pattern {
        targets.sort();
        Pattern { kprime, targets }
    }

    pub fn kprime(&self) -> usize {
        self.kprime
    }

    pub fn targets(&self) -> &[HexVertex] {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }
}

/// Pattern for `n` robots whose configuration has symmetricity `rho_c`.
pub fn build_pattern(n: usize, rho_c: usize) -> Result<Pattern> {
    if n < 12 {
        return Err(Error::InvalidParameter(format!("at least 12 robots are required, got {n}")));
    }
    match rho_c {
        1 => {}
        2 if n % 2 == 1 => return Err(Error::UnsolvableDivisibility { n, rho: rho_c }),
        2 => {}
        _ => {
            return Err(Error::Unsupported(format!(
                "no maximum mutual-visibility pattern is known for symmetricity {rho_c}"
            )))
        }
    }
    let kprime = n.div_ceil(4);
    let mut targets = template_vertices(kprime)?;
    let surplus = 4 * kprime - n;
    if surplus > 0 {
        let x = XkAnchors::new(kprime)?;
        let order = [x.b_second, half_turn(x.b_second), x.b_prime, half_turn(x.b_prime)];
        targets.retain(|v| !order[..surplus].contains(v));
    }
    targets.sort();
    Ok(Pattern { kprime, targets })
}

/// A pattern laid over a concrete grid, with everything the compute step
/// needs precomputed.
#[derive(Debug)]
pub struct Formation<'g> {
    grid: &'g Grid,
    pattern: Pattern,
    /// Target ids for each clockwise rotation, sorted.
    placed: [Vec<usize>; 6],
    member: [Vec<bool>; 6],
    in_region: Vec<bool>,
    on_region_boundary: Vec<bool>,
    /// Rotation used when a guard sits on corner 0.
    canon_rotation: usize,
    /// Target of a guard on corner 0 under `canon_rotation`.
    canon_guard_target: usize,
}

impl<'g> Formation<'g> {
    pub fn new(grid: &'g Grid, pattern: &Pattern) -> Result<Self> {
        if pattern.kprime > grid.k() {
            return Err(Error::InvalidParameter(format!(
                "pattern needs k >= {}, grid has k = {}",
                pattern.kprime,
                grid.k()
            )));
        }
        let base: Vec<usize> = pattern.targets.iter().map(|&v| grid.idx(v)).collect::<Result<_>>()?;
        let placed: [Vec<usize>; 6] = std::array::from_fn(|s| {
            let mut ids: Vec<usize> = base.iter().map(|&v| grid.turn(v, s)).collect();
            ids.sort_unstable();
            ids
        });
        let n = grid.vertex_count();
        let member: [Vec<bool>; 6] = std::array::from_fn(|s| {
            let mut m = vec![false; n];
            for &v in &placed[s] {
                m[v] = true;
            }
            m
        });

        let sub = Grid::new(pattern.kprime)?;
        let mut in_region = vec![false; n];
        let mut on_region_boundary = vec![false; n];
        for v in sub.vertices() {
            let i = grid.idx(v)?;
            in_region[i] = true;
            on_region_boundary[i] = sub.on_perimeter(v)?;
        }

        // Orientation relative to a guard on corner 0: bring a target as close
        // to the guard as possible, then prefer the smallest corner-0 reading.
        let u = grid.corner_ids()[0];
        let du = grid.dist_row(u);
        let canon_rotation = (0..6)
            .min_by_key(|&s| {
                let nearest = placed[s].iter().map(|&t| du[t]).min();
                let mut enc: Vec<usize> = placed[s].iter().map(|&t| grid.reading_pos(0, t)).collect();
                enc.sort_unstable();
                (nearest, enc)
            })
            .expect("six rotations");
        let canon_guard_target = *placed[canon_rotation]
            .iter()
            .min_by_key(|&&t| (du[t], grid.reading_pos(0, t)))
            .expect("pattern is nonempty");

        Ok(Formation {
            grid,
            pattern: pattern.clone(),
            placed,
            member,
            in_region,
            on_region_boundary,
            canon_rotation,
            canon_guard_target,
        })
    }

    pub fn grid(&self) -> &'g Grid {
        self.grid
    }

    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }

    /// Targets of the pattern rotated `steps` times clockwise.
    pub fn placement(&self, steps: usize) -> Vec<HexVertex> {
        self.placed[steps % 6].iter().map(|&i| self.grid.vert(i)).collect()
    }

    pub fn is_formed(&self, c: &Configuration<'_>) -> bool {
        self.formed_rotation(c).is_some()
    }

    pub(crate) fn formed_rotation(&self, c: &Configuration<'_>) -> Option<usize> {
        if c.len() != self.pattern.len() {
            return None;
        }
        (0..6).find(|&s| self.placed[s].iter().all(|&t| c.has(t)))
    }

    pub(crate) fn placed(&self, s: usize) -> &[usize] {
        &self.placed[s % 6]
    }

    pub(crate) fn is_target(&self, s: usize, v: usize) -> bool {
        self.member[s % 6][v]
    }

    pub(crate) fn in_interior(&self, v: usize) -> bool {
        self.in_region[v] && !self.on_region_boundary[v]
    }

    pub(crate) fn on_boundary(&self, v: usize) -> bool {
        self.on_region_boundary[v]
    }

    /// Rotation embedding the pattern for a guard on `corner`.
    pub(crate) fn rotation_for_corner(&self, corner: usize) -> usize {
        (self.canon_rotation + corner) % 6
    }

    pub(crate) fn guard_target(&self, corner: usize) -> usize {
        self.grid.turn(self.canon_guard_target, corner)
    }
}
