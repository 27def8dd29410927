//! Generators for reproducible test embeddings.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cycle::EmbCycle;
use crate::embedding::{Dart, RotationSystem};

/// Vertex id of `(i, j)` in `TG(p, q)`.
pub fn tg_vertex(q: usize, i: usize, j: usize) -> usize {
    i * q + j
}

/// Edge from `(i, j)` to `(i, j + 1)` (a row edge).
pub fn tg_row_edge(q: usize, i: usize, j: usize) -> usize {
    2 * (i * q + j)
}

/// Edge from `(i, j)` to `(i + 1, j)` (a column edge).
pub fn tg_col_edge(q: usize, i: usize, j: usize) -> usize {
    2 * (i * q + j) + 1
}

/// The toroidal grid `C_p x C_q`: `p` rows of length `q`, `q` columns of length `p`.
pub fn torus_grid(p: usize, q: usize) -> RotationSystem {
    assert!(p >= 1 && q >= 1);
    let mut rotations = Vec::with_capacity(p * q);
    for i in 0..p {
        for j in 0..q {
            let jm = (j + q - 1) % q;
            let im = (i + p - 1) % p;
            rotations.push(vec![
                2 * tg_row_edge(q, i, j),
                2 * tg_col_edge(q, i, j),
                2 * tg_row_edge(q, i, jm) + 1,
                2 * tg_col_edge(q, im, j) + 1,
            ]);
        }
    }
    RotationSystem::new(rotations, 2 * p * q).expect("torus grid is valid")
}

/// Edges of column `j` of `TG(p, q)` in walk order from `(0, j)`.
pub fn tg_column(p: usize, q: usize, j: usize) -> Vec<usize> {
    (0..p).map(|i| tg_col_edge(q, i, j)).collect()
}

/// Edges of row `i` of `TG(p, q)` in walk order from `(i, 0)`.
pub fn tg_row(q: usize, i: usize) -> Vec<usize> {
    (0..q).map(|j| tg_row_edge(q, i, j)).collect()
}

/// A single vertex carrying loops; `rotation` must use darts `0..2m` once each.
pub fn one_vertex(rotation: &[Dart]) -> RotationSystem {
    RotationSystem::new(vec![rotation.to_vec()], rotation.len() / 2).expect("valid rotation")
}

/// The cycle `C_n` embedded in the plane.
pub fn plane_cycle(n: usize) -> RotationSystem {
    let rotations = (0..n)
        .map(|v| vec![2 * v, 2 * ((v + n - 1) % n) + 1])
        .collect();
    RotationSystem::new(rotations, n).expect("valid cycle")
}

/// The `p x q` grid graph (no wraparound) embedded in the plane.
pub fn plane_grid(p: usize, q: usize) -> RotationSystem {
    let id = |i: usize, j: usize| i * q + j;
    let mut edges = Vec::new();
    for i in 0..p {
        for j in 0..q {
            if j + 1 < q {
                edges.push((id(i, j), id(i, j + 1)));
            }
            if i + 1 < p {
                edges.push((id(i, j), id(i + 1, j)));
            }
        }
    }
    let mut rot: Vec<Vec<(u8, Dart)>> = vec![Vec::new(); p * q];
    for (e, &(a, b)) in edges.iter().enumerate() {
        // east = 0, north = 1, west = 2, south = 3 (i grows northwards)
        let dir = if b == a + 1 { 0 } else { 1 };
        rot[a].push((dir, 2 * e));
        rot[b].push((dir + 2, 2 * e + 1));
    }
    let rotations = rot
        .into_iter()
        .map(|mut r| {
            r.sort();
            r.into_iter().map(|(_, d)| d).collect()
        })
        .collect();
    RotationSystem::new(rotations, edges.len()).expect("valid plane grid")
}

/// Joins `b` onto `a` at vertex 0 of each. Genus is additive.
pub fn join(a: &RotationSystem, b: &RotationSystem) -> RotationSystem {
    let na = a.num_vertices();
    let off = 2 * a.num_edges();
    let mut rotations: Vec<Vec<Dart>> = a.rotations().to_vec();
    rotations[0].extend(b.rotation(0).iter().map(|d| d + off));
    for v in 1..b.num_vertices() {
        rotations.push(b.rotation(v).iter().map(|d| d + off).collect());
    }
    debug_assert_eq!(rotations.len(), na + b.num_vertices() - 1);
    RotationSystem::new(rotations, a.num_edges() + b.num_edges()).expect("join is valid")
}

/// Random connected rotation system with `n` vertices and `m >= n - 1` edges;
/// loops and parallel edges allowed.
pub fn random_rotation_system(n: usize, m: usize, seed: u64) -> RotationSystem {
    assert!(n >= 1 && m >= n.saturating_sub(1) && m >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ends = Vec::with_capacity(m);
    for v in 1..n {
        ends.push((rng.random_range(0..v), v));
    }
    while ends.len() < m {
        ends.push((rng.random_range(0..n), rng.random_range(0..n)));
    }
    ends.shuffle(&mut rng);
    let mut rotations = vec![Vec::new(); n];
    for (e, &(a, b)) in ends.iter().enumerate() {
        rotations[a].push(2 * e);
        rotations[b].push(2 * e + 1);
    }
    for r in &mut rotations {
        r.shuffle(&mut rng);
    }
    RotationSystem::new(rotations, m).expect("random system is connected")
}

/// Random rotation system of genus at least `min_genus`, retrying seeds.
pub fn random_with_genus(max_edges: usize, min_genus: usize, seed: u64) -> RotationSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    loop {
        let m = rng.random_range(2..=max_edges.max(2));
        let n = rng.random_range(1..=m.min(8));
        let rs = random_rotation_system(n, m, rng.random());
        if rs.genus() >= min_genus {
            return rs;
        }
    }
}

/// `TG(p, q)` with a random diagonal added to about half of its faces.
pub fn chorded_torus_grid(p: usize, q: usize, seed: u64) -> RotationSystem {
    let mut rs = torus_grid(p, q);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for f in 0..rs.num_faces() {
        if rng.random_bool(0.5) {
            continue;
        }
        let face = rs.faces()[f].clone();
        let a = rng.random_range(0..face.len());
        let (x, y) = (rs.sigma_inv(face[a]), rs.sigma_inv(face[(a + 2) % face.len()]));
        let m = rs.num_edges();
        let mut rot = rs.rotations().to_vec();
        for (z, d) in [(x, 2 * m), (y, 2 * m + 1)] {
            let v = rs.vertex_of(z);
            let pos = rot[v].iter().position(|&t| t == z).unwrap();
            rot[v].insert(pos + 1, d);
        }
        rs = RotationSystem::new(rot, m + 1).expect("chord keeps the embedding valid");
    }
    rs
}

/// Cycle of `TG(p, q)` through the given `(row, column)` sequence.
pub fn tg_cycle(p: usize, q: usize, cells: &[(usize, usize)]) -> EmbCycle {
    let rs = torus_grid(p, q);
    let l = cells.len();
    let darts = (0..l)
        .map(|t| {
            let (a, b) = (cells[t], cells[(t + 1) % l]);
            let (u, v) = (tg_vertex(q, a.0 % p, a.1 % q), tg_vertex(q, b.0 % p, b.1 % q));
            *rs.rotation(u).iter().find(|&&d| rs.head(d) == v).expect("grid neighbours")
        })
        .collect();
    EmbCycle::from_darts(&rs, darts, false).expect("simple grid cycle")
}

fn tg_columns(p: usize, q: usize) -> Vec<EmbCycle> {
    (0..q).map(|j| EmbCycle::from_edges(&torus_grid(p, q), &tg_column(p, q, j), false).unwrap()).collect()
}

/// `TG(12, 6)` with its columns and four rows, one of them zigzagging back
/// over two columns.
pub fn grid_phase2_fixture() -> (RotationSystem, Vec<EmbCycle>, Vec<EmbCycle>) {
    let (p, q) = (12, 6);
    let zigzag = [(0, 0), (0, 1), (0, 2), (1, 2), (1, 1), (2, 1), (2, 2), (2, 3), (2, 4), (2, 5), (1, 5), (0, 5)];
    let mut rows = vec![tg_cycle(p, q, &zigzag)];
    for i in [3, 6, 9] {
        rows.push(EmbCycle::from_edges(&torus_grid(p, q), &tg_row(q, i), false).unwrap());
    }
    (torus_grid(p, q), tg_columns(p, q), rows)
}

/// `TG(12, 6)` with its columns and three staircases winding twice around
/// the column direction.
pub fn grid_phase3_fixture() -> (RotationSystem, Vec<EmbCycle>, Vec<EmbCycle>) {
    let (p, q) = (12, 6);
    let stairs = [0, 2, 4]
        .iter()
        .map(|&c| {
            let cells: Vec<(usize, usize)> = (0..p).flat_map(|t| [(t, t + c), (t, t + c + 1)]).collect();
            tg_cycle(p, q, &cells)
        })
        .collect();
    (torus_grid(p, q), tg_columns(p, q), stairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn join_adds_genus() {
        let a = torus_grid(3, 3);
        let b = torus_grid(3, 4);
        let j = join(&a, &b);
        assert_eq!(j.genus(), 2);
        assert_eq!(j.num_vertices(), 9 + 12 - 1);
        assert_eq!(j.num_edges(), 18 + 24);
    }

    #[test]
    fn plane_grid_is_planar() {
        let g = plane_grid(3, 4);
        assert_eq!(g.genus(), 0);
        assert_eq!(g.num_edges(), 3 * 3 + 2 * 4);
    }

    #[test]
    fn random_systems_are_deterministic() {
        let a = random_rotation_system(5, 12, 7);
        let b = random_rotation_system(5, 12, 7);
        assert_eq!(a, b);
        let g = random_with_genus(20, 2, 3);
        assert!(g.genus() >= 2);
        let c = chorded_torus_grid(4, 5, 1);
        assert_eq!(c.genus(), 1);
        assert_eq!(c, chorded_torus_grid(4, 5, 1));
    }
}
