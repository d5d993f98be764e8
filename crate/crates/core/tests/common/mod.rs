//! Independent oracles shared by the integration tests. Nothing here calls
//! into the distance tables or visibility code of the library.

#![allow(dead_code)]

use std::collections::{HashMap, HashSet, VecDeque};

use hexvis::{Configuration, Grid, HexVertex};

/// Breadth-first distances from `s`, using only `Grid::neighbors`.
pub fn bfs(g: &Grid, s: HexVertex) -> HashMap<HexVertex, u32> {
    let mut dist = HashMap::from([(s, 0)]);
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        for w in g.neighbors(v).unwrap() {
            if !dist.contains_key(&w) {
                dist.insert(w, d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Every shortest path from `u` to `v`, listed explicitly.
pub fn all_geodesics(g: &Grid, u: HexVertex, v: HexVertex) -> Vec<Vec<HexVertex>> {
    let from_v = bfs(g, v);
    let mut out = Vec::new();
    let mut path = vec![u];
    extend(g, &from_v, v, &mut path, &mut out);
    out
}

fn extend(
    g: &Grid,
    from_v: &HashMap<HexVertex, u32>,
    v: HexVertex,
    path: &mut Vec<HexVertex>,
    out: &mut Vec<Vec<HexVertex>>,
) {
    let last = *path.last().unwrap();
    if last == v {
        out.push(path.clone());
        return;
    }
    for w in g.neighbors(last).unwrap() {
        if from_v[&w] + 1 == from_v[&last] {
            path.push(w);
            extend(g, from_v, v, path, out);
            path.pop();
        }
    }
}

/// Some geodesic avoids `x` in its interior.
pub fn brute_visible(g: &Grid, x: &HashSet<HexVertex>, u: HexVertex, v: HexVertex) -> bool {
    all_geodesics(g, u, v).iter().any(|p| p[1..p.len() - 1].iter().all(|w| !x.contains(w)))
}

/// Order of the rotation group of `c`, found by rotating every robot.
pub fn direct_symmetricity(c: &Configuration<'_>) -> usize {
    let g = c.grid();
    let robots: HashSet<HexVertex> = c.robots().into_iter().collect();
    let fixed = |steps: usize| robots.iter().all(|&v| robots.contains(&g.rotate(v, steps).unwrap()));
    [(1, 6), (2, 3), (3, 2)].into_iter().find(|&(s, _)| fixed(s)).map_or(1, |(_, rho)| rho)
}

/// Least-squares fit of `y = a + b x + c x^2`, returned as `[a, b, c]`.
pub fn quadratic_fit(points: &[(f64, f64)]) -> [f64; 3] {
    let mut m = [[0.0; 4]; 3];
    for &(x, y) in points {
        let basis = [1.0, x, x * x];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += basis[i] * basis[j];
            }
            m[i][3] += basis[i] * y;
        }
    }
    for col in 0..3 {
        let pivot = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())).unwrap();
        m.swap(col, pivot);
        for row in 0..3 {
            if row != col {
                let f = m[row][col] / m[col][col];
                for j in col..4 {
                    m[row][j] -= f * m[col][j];
                }
            }
        }
    }
    [m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]]
}
