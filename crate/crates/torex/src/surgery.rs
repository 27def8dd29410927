//! Surface surgery: cutting through a primal cycle, cutting along a dual
//! cycle, lifting back, and good planarizing sequences.

use std::collections::HashSet;

use serde::Serialize;

use crate::cycle::EmbCycle;
use crate::embedding::{edge_of, mate, Dart, RotationSystem};
use crate::error::{Error, Result};
use crate::homology::{is_separating, shortest_nonseparating_cycle, switching_ear_length};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VertexOrigin {
    Original(usize),
    Left,
    Right,
}

/// Result of cutting `G` through a primal cycle `C`.
#[derive(Clone, Debug)]
pub struct CutThroughResult {
    pub cut: RotationSystem,
    /// Vertex collecting the darts on the left of `C`.
    pub c1: usize,
    /// Vertex collecting the darts on the right of `C`.
    pub c2: usize,
    /// Original edge id of each edge of `cut`.
    pub edge_origin: Vec<usize>,
    pub vertex_origin: Vec<VertexOrigin>,
}

impl CutThroughResult {
    pub fn lift_dart(&self, d: Dart) -> Dart {
        2 * self.edge_origin[edge_of(d)] + (d & 1)
    }

    pub fn lift_edges(&self, edges: &[usize]) -> Vec<usize> {
        edges.iter().map(|&e| self.edge_origin[e]).collect()
    }
}

/// Compacts the edges that survive, preserving dart parity.
fn compact_edges(m: usize, removed: &HashSet<usize>) -> (Vec<usize>, Vec<usize>) {
    let mut new_id = vec![usize::MAX; m];
    let mut origin = Vec::with_capacity(m - removed.len());
    for e in 0..m {
        if !removed.contains(&e) {
            new_id[e] = origin.len();
            origin.push(e);
        }
    }
    (new_id, origin)
}

/// Cuts the surface through the simple nonseparating cycle `c`: its
/// vertices and edges disappear and two new vertices collect the darts on
/// either side.
pub fn cut_through(rs: &RotationSystem, c: &EmbCycle) -> Result<CutThroughResult> {
    let c = EmbCycle::from_darts(rs, c.darts.clone(), c.dual)?;
    if is_separating(rs, &c) {
        return Err(Error::Separating);
    }
    let k = c.len();
    let removed: HashSet<usize> = c.edge_set();
    let (new_id, edge_origin) = compact_edges(rs.num_edges(), &removed);
    let nd = |d: Dart| 2 * new_id[edge_of(d)] + (d & 1);

    let on_c: HashSet<usize> = c.vertices(rs).into_iter().collect();
    let mut rotations = Vec::new();
    let mut vertex_origin = Vec::new();
    for v in 0..rs.num_vertices() {
        if !on_c.contains(&v) {
            rotations.push(rs.rotation(v).iter().map(|&d| nd(d)).collect::<Vec<_>>());
            vertex_origin.push(VertexOrigin::Original(v));
        }
    }
    let mut left: Vec<Vec<Dart>> = Vec::with_capacity(k);
    let mut right: Vec<Vec<Dart>> = Vec::with_capacity(k);
    for i in 0..k {
        let out = c.darts[i];
        let inn = mate(c.darts[(i + k - 1) % k]);
        let mut l = Vec::new();
        let mut x = rs.sigma(out);
        while x != inn {
            l.push(nd(x));
            x = rs.sigma(x);
        }
        let mut r = Vec::new();
        let mut x = rs.sigma(inn);
        while x != out {
            r.push(nd(x));
            x = rs.sigma(x);
        }
        left.push(l);
        right.push(r);
    }
    let c1 = rotations.len();
    rotations.push(left.into_iter().rev().flatten().collect());
    vertex_origin.push(VertexOrigin::Left);
    let c2 = rotations.len();
    rotations.push(right.into_iter().flatten().collect());
    vertex_origin.push(VertexOrigin::Right);

    let cut = RotationSystem::new(rotations, edge_origin.len())
        .map_err(|e| Error::Invariant(format!("cut through produced an invalid embedding: {e}")))?;
    Ok(CutThroughResult { cut, c1, c2, edge_origin, vertex_origin })
}

/// Where a severed edge was attached in the cut embedding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Severed {
    /// Edge id in the embedding that was cut.
    pub edge: usize,
    /// Corner (dart of the cut embedding) holding the tail halfedge.
    pub tail_corner: Dart,
    /// Corner holding the head halfedge.
    pub head_corner: Dart,
}

/// Result of cutting `G` along a dual cycle `gamma`.
#[derive(Clone, Debug)]
pub struct CutAlongResult {
    pub cut: RotationSystem,
    /// New face on the tail side of the severed edges.
    pub a1: usize,
    /// New face on the head side.
    pub a2: usize,
    /// Severed edges in the order of `gamma`.
    pub severed: Vec<Severed>,
    pub edge_origin: Vec<usize>,
    /// For every dart of the original embedding, the dart of `cut` whose
    /// following corner now contains the original corner after that dart.
    pub corner_map: Vec<Dart>,
}

impl CutAlongResult {
    pub fn lift_dart(&self, d: Dart) -> Dart {
        2 * self.edge_origin[edge_of(d)] + (d & 1)
    }

    pub fn lift_edges(&self, edges: &[usize]) -> Vec<usize> {
        edges.iter().map(|&e| self.edge_origin[e]).collect()
    }

    pub fn severed_edges(&self) -> Vec<usize> {
        self.severed.iter().map(|s| s.edge).collect()
    }
}

/// Cuts the surface along the dual cycle `gamma` (darts of `dual(rs)`),
/// deleting the edges it crosses. Vertices are unchanged.
pub fn cut_along(rs: &RotationSystem, gamma: &EmbCycle) -> Result<CutAlongResult> {
    let dual = rs.dual();
    let gamma = EmbCycle::from_darts(&dual, gamma.darts.clone(), true)?;
    if is_separating(&dual, &gamma) {
        return Err(Error::Separating);
    }
    let removed: HashSet<usize> = gamma.edge_set();
    let (new_id, edge_origin) = compact_edges(rs.num_edges(), &removed);
    let nd = |d: Dart| 2 * new_id[edge_of(d)] + (d & 1);
    let alive = |d: Dart| !removed.contains(&edge_of(d));

    let rotations: Vec<Vec<Dart>> = (0..rs.num_vertices())
        .map(|v| rs.rotation(v).iter().filter(|&&d| alive(d)).map(|&d| nd(d)).collect())
        .collect();
    let mut corner_map = vec![usize::MAX; rs.num_darts()];
    for d in 0..rs.num_darts() {
        let mut x = d;
        let mut steps = 0;
        while !alive(x) {
            x = rs.sigma_inv(x);
            steps += 1;
            if steps > rs.degree(rs.vertex_of(d)) {
                return Err(Error::Invariant("vertex lost all its edges".into()));
            }
        }
        corner_map[d] = nd(x);
    }
    let cut = RotationSystem::new(rotations, edge_origin.len())
        .map_err(|e| Error::Invariant(format!("cut along produced an invalid embedding: {e}")))?;
    let severed: Vec<Severed> = gamma
        .darts
        .iter()
        .map(|&d| Severed {
            edge: edge_of(d),
            tail_corner: corner_map[d],
            head_corner: corner_map[mate(d)],
        })
        .collect();
    let a1 = cut.corner_face(severed[0].tail_corner);
    let a2 = cut.corner_face(severed[0].head_corner);
    Ok(CutAlongResult { cut, a1, a2, severed, edge_origin, corner_map })
}

/// One step of a good planarizing sequence (computed on the dual).
#[derive(Clone, Debug)]
pub struct PlanarizingStep {
    /// Shortest nonseparating cycle of the dual of the previous embedding.
    pub gamma: EmbCycle,
    pub k: usize,
    /// Shortest `gamma`-switching dual ear length.
    pub l: usize,
    pub along: CutAlongResult,
    /// Input edge id of each edge of `along.cut`.
    pub input_edges: Vec<usize>,
    /// Input edge ids of `gamma`.
    pub gamma_input: Vec<usize>,
    /// Input edge ids of the severed edges, in `gamma` order.
    pub severed_input: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct PlanarizingSequence {
    pub input: RotationSystem,
    pub steps: Vec<PlanarizingStep>,
}

impl PlanarizingSequence {
    pub fn genus(&self) -> usize {
        self.input.genus()
    }

    /// The embedding `G_i` (`G_0` is the input).
    pub fn embedding(&self, i: usize) -> &RotationSystem {
        if i == 0 {
            &self.input
        } else {
            &self.steps[i - 1].along.cut
        }
    }

    pub fn last(&self) -> &RotationSystem {
        self.embedding(self.steps.len())
    }

    /// Input edge id of each edge of `G_i`.
    pub fn input_edges(&self, i: usize) -> Vec<usize> {
        if i == 0 {
            (0..self.input.num_edges()).collect()
        } else {
            self.steps[i - 1].input_edges.clone()
        }
    }

    pub fn max_kl(&self) -> usize {
        self.steps.iter().map(|s| s.k * s.l).max().unwrap_or(0)
    }
}

/// Planarizes by repeatedly cutting along a shortest nonseparating dual
/// cycle (deterministic tie-break) until the surface is the sphere.
pub fn good_planarizing_sequence(rs: &RotationSystem) -> Result<PlanarizingSequence> {
    let g = rs.genus();
    let mut steps: Vec<PlanarizingStep> = Vec::with_capacity(g);
    let mut current = rs.clone();
    let mut input_edges: Vec<usize> = (0..rs.num_edges()).collect();
    for i in 1..=g {
        let dual = current.dual();
        let mut gamma = shortest_nonseparating_cycle(&dual)?;
        gamma.dual = true;
        let k = gamma.len();
        let l = switching_ear_length(&dual, &gamma)?;
        let along = cut_along(&current, &gamma)?;
        if along.cut.genus() != g - i {
            return Err(Error::Invariant(format!("genus after cut {i} is {}", along.cut.genus())));
        }
        let gamma_input = gamma.edges().iter().map(|&e| input_edges[e]).collect();
        let severed_input = along.severed.iter().map(|s| input_edges[s.edge]).collect();
        let next_edges: Vec<usize> = along.edge_origin.iter().map(|&e| input_edges[e]).collect();
        log::debug!("planarizing step {i}: k = {k}, l = {l}");
        current = along.cut.clone();
        input_edges = next_edges.clone();
        steps.push(PlanarizingStep {
            gamma,
            k,
            l,
            along,
            input_edges: next_edges,
            gamma_input,
            severed_input,
        });
    }
    Ok(PlanarizingSequence { input: rs.clone(), steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{join, one_vertex, tg_column, torus_grid};
    use crate::homology::ewn;

    #[test]
    fn cut_torus_grid_through_column() {
        let rs = torus_grid(3, 3);
        let c = EmbCycle::from_edges(&rs, &tg_column(3, 3, 0), false).unwrap();
        let r = cut_through(&rs, &c).unwrap();
        assert_eq!(r.cut.genus(), 0);
        assert_eq!(r.cut.num_vertices(), 8);
        assert_eq!(r.cut.num_edges(), 15);
        assert_eq!(r.cut.num_faces(), rs.num_faces());
        assert_eq!(r.cut.degree(r.c1) + r.cut.degree(r.c2), 6);
    }

    #[test]
    fn cut_one_vertex_torus() {
        let rs = one_vertex(&[0, 2, 1, 3]);
        let a = EmbCycle::from_darts(&rs, vec![0], false).unwrap();
        let r = cut_through(&rs, &a).unwrap();
        assert_eq!((r.cut.num_vertices(), r.cut.num_edges(), r.cut.genus()), (2, 1, 0));
        assert_eq!(r.edge_origin, vec![1]);
    }

    #[test]
    fn separating_cut_is_rejected() {
        let rs = torus_grid(3, 3);
        let f = EmbCycle::from_darts(&rs, rs.faces()[0].clone(), false).unwrap();
        assert_eq!(cut_through(&rs, &f).unwrap_err(), Error::Separating);
    }

    #[test]
    fn cut_along_matches_dual_of_cut_through() {
        for (p, q) in [(3, 3), (3, 5), (4, 4)] {
            let rs = torus_grid(p, q);
            let dual = rs.dual();
            let mut gamma = shortest_nonseparating_cycle(&dual).unwrap();
            gamma.dual = true;
            let along = cut_along(&rs, &gamma).unwrap();
            let through = cut_through(&dual, &gamma).unwrap();
            assert_eq!(along.edge_origin, through.edge_origin);
            let back = through.cut.dual();
            for d in 0..along.cut.num_darts() {
                assert_eq!(along.cut.sigma(d), back.sigma(d));
            }
            assert_eq!(along.cut.num_vertices(), rs.num_vertices());
            assert_eq!(along.cut.genus(), 0);
            assert_eq!(along.cut.num_edges(), 2 * p * q - p);
        }
    }

    #[test]
    fn severed_edges_share_two_new_faces() {
        for q in 3..=7 {
            let rs = torus_grid(3, q);
            let seq = good_planarizing_sequence(&rs).unwrap();
            assert_eq!(seq.steps.len(), 1);
            let s = &seq.steps[0];
            assert_eq!((s.k, s.l), (3, q));
            let cut = &s.along.cut;
            assert_ne!(s.along.a1, s.along.a2);
            for sv in &s.along.severed {
                assert_eq!(cut.corner_face(sv.tail_corner), s.along.a1);
                assert_eq!(cut.corner_face(sv.head_corner), s.along.a2);
            }
        }
    }

    #[test]
    fn genus_two_sequence() {
        let rs = join(&torus_grid(3, 4), &torus_grid(4, 4));
        let seq = good_planarizing_sequence(&rs).unwrap();
        assert_eq!(seq.steps.len(), 2);
        assert_eq!(seq.last().genus(), 0);
        let (k1, k2) = (seq.steps[0].k, seq.steps[1].k);
        assert!(k1 <= 2 * k2);
        for s in &seq.steps {
            assert!(2 * s.l >= s.k);
        }
    }

    #[test]
    fn halving_under_cut_through() {
        let rs = join(&torus_grid(3, 3), &torus_grid(3, 4));
        let c = shortest_nonseparating_cycle(&rs).unwrap();
        let r = cut_through(&rs, &c).unwrap();
        assert!(2 * ewn(&r.cut).unwrap() >= ewn(&rs).unwrap());
        let plane = good_planarizing_sequence(&crate::fixtures::plane_cycle(4)).unwrap();
        assert!(plane.steps.is_empty());
    }
}
