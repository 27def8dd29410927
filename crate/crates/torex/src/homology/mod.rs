//! Homological cycle tests, shortest nonseparating / noncontractible cycles,
//! widths and switching ears.

mod leap;
mod stretch;

pub use leap::{leap_report, LeapComponent, LeapReport};
pub use stretch::{
    brute_force_stretch, crossing_lb_from_tex, crossing_weights, enumerate_cycles,
    shortest_odd_cycle, stretch_bounds, stretch_exact, BruteStretch, CrossingLb, StretchMode,
    StretchResult, DEFAULT_EXACT_CAP,
};

use std::collections::{HashSet, VecDeque};

use crate::cycle::EmbCycle;
use crate::embedding::{edge_of, mate, Dart, RotationSystem};
use crate::error::{Error, Result};
use crate::surgery::cut_through;

/// Two-colours the faces so that exactly the edges in `edges` separate
/// colours. Returns `None` when `edges` is not a sum of face boundaries.
pub fn face_two_colouring(rs: &RotationSystem, edges: &[usize]) -> Option<Vec<u8>> {
    let mut in_z = vec![false; rs.num_edges()];
    for &e in edges {
        in_z[e] ^= true;
    }
    let nf = rs.num_faces();
    let mut colour = vec![u8::MAX; nf];
    colour[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(f) = queue.pop_front() {
        for &d in &rs.faces()[f] {
            let g = rs.face_of(mate(d));
            let c = colour[f] ^ in_z[edge_of(d)] as u8;
            if colour[g] == u8::MAX {
                colour[g] = c;
                queue.push_back(g);
            } else if colour[g] != c {
                return None;
            }
        }
    }
    Some(colour)
}

/// Whether the GF(2) edge vector lies in the span of face boundaries.
pub fn is_null_homologous(rs: &RotationSystem, edges: &[usize]) -> bool {
    face_two_colouring(rs, edges).is_some()
}

/// A simple cycle separates the surface iff it is null-homologous over GF(2).
pub fn is_separating(rs: &RotationSystem, c: &EmbCycle) -> bool {
    is_null_homologous(rs, &c.edges())
}

/// Genus of each side of a separating simple cycle, after capping with a disc.
pub fn side_genera(rs: &RotationSystem, c: &EmbCycle) -> Option<[i64; 2]> {
    let colour = face_two_colouring(rs, &c.edges())?;
    let on_c: HashSet<usize> = c.vertices(rs).into_iter().collect();
    let in_c = c.edge_set();
    let mut v = [0i64; 2];
    let mut e = [0i64; 2];
    let mut f = [0i64; 2];
    for &col in &colour {
        f[col as usize] += 1;
    }
    for x in 0..rs.num_vertices() {
        if !on_c.contains(&x) {
            v[colour[rs.corner_face(rs.rotation(x)[0])] as usize] += 1;
        }
    }
    for ed in 0..rs.num_edges() {
        if !in_c.contains(&ed) {
            e[colour[rs.face_of(2 * ed)] as usize] += 1;
        }
    }
    Some([0, 1].map(|s| (1 - v[s] + e[s] - f[s]) / 2))
}

/// True iff `c` bounds a disc.
pub fn is_contractible(rs: &RotationSystem, c: &EmbCycle) -> bool {
    side_genera(rs, c).is_some_and(|g| g.contains(&0))
}

struct BfsTree {
    parent: Vec<Option<Dart>>,
    depth: Vec<usize>,
}

fn bfs_tree(rs: &RotationSystem, root: usize) -> BfsTree {
    let n = rs.num_vertices();
    let mut parent = vec![None; n];
    let mut depth = vec![usize::MAX; n];
    depth[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &d in rs.rotation(v) {
            let w = rs.head(d);
            if depth[w] == usize::MAX {
                depth[w] = depth[v] + 1;
                parent[w] = Some(d);
                queue.push_back(w);
            }
        }
    }
    BfsTree { parent, depth }
}

impl BfsTree {
    fn is_tree_edge(&self, rs: &RotationSystem, e: usize) -> bool {
        let (a, b) = rs.endpoints(e);
        self.parent[b] == Some(2 * e) || self.parent[a] == Some(2 * e + 1)
    }

    fn lca(&self, rs: &RotationSystem, mut u: usize, mut v: usize) -> usize {
        while self.depth[u] > self.depth[v] {
            u = rs.tail(self.parent[u].unwrap());
        }
        while self.depth[v] > self.depth[u] {
            v = rs.tail(self.parent[v].unwrap());
        }
        while u != v {
            u = rs.tail(self.parent[u].unwrap());
            v = rs.tail(self.parent[v].unwrap());
        }
        u
    }

    /// Fundamental cycle of non-tree edge `e`, cut down to the LCA.
    fn cycle(&self, rs: &RotationSystem, e: usize) -> Vec<Dart> {
        let (u, v) = rs.endpoints(e);
        let w = self.lca(rs, u, v);
        let mut down = Vec::new();
        let mut x = u;
        while x != w {
            let d = self.parent[x].unwrap();
            down.push(d);
            x = rs.tail(d);
        }
        down.reverse();
        down.push(2 * e);
        let mut y = v;
        while y != w {
            let d = self.parent[y].unwrap();
            down.push(mate(d));
            y = rs.tail(d);
        }
        down
    }
}

/// All shortest cycles accepted by `accept` among the fundamental cycles of
/// breadth-first trees rooted at every vertex, ordered by canonical key.
/// Correct for cycle families with the 3-path property.
pub fn shortest_cycles_by<F>(rs: &RotationSystem, accept: F) -> Vec<EmbCycle>
where
    F: Fn(&EmbCycle) -> bool,
{
    let trees: Vec<BfsTree> = (0..rs.num_vertices()).map(|r| bfs_tree(rs, r)).collect();
    let mut cands: Vec<(usize, usize, usize)> = Vec::new();
    for (r, t) in trees.iter().enumerate() {
        for e in 0..rs.num_edges() {
            if t.is_tree_edge(rs, e) {
                continue;
            }
            let (u, v) = rs.endpoints(e);
            let w = t.lca(rs, u, v);
            let len = t.depth[u] + t.depth[v] + 1 - 2 * t.depth[w];
            cands.push((len, r, e));
        }
    }
    cands.sort_unstable();
    let mut seen = HashSet::new();
    let mut found: Vec<EmbCycle> = Vec::new();
    let mut best = usize::MAX;
    for (len, r, e) in cands {
        if len > best {
            break;
        }
        let c = EmbCycle { dual: false, darts: trees[r].cycle(rs, e) };
        let key = c.canonical_key();
        if !seen.insert(key) {
            continue;
        }
        if accept(&c) {
            best = len;
            found.push(c.canonical());
        }
    }
    found.sort_by_key(|c| c.canonical_key());
    found
}

/// Every shortest nonseparating cycle found by the fundamental-cycle search.
pub fn all_shortest_nonseparating(rs: &RotationSystem) -> Result<Vec<EmbCycle>> {
    if rs.genus() == 0 {
        return Err(Error::NoNonseparatingCycle);
    }
    let found = shortest_cycles_by(rs, |c| !is_separating(rs, c));
    if found.is_empty() {
        return Err(Error::Invariant("positive genus but no nonseparating cycle found".into()));
    }
    Ok(found)
}

/// The shortest nonseparating cycle with the smallest canonical key.
pub fn shortest_nonseparating_cycle(rs: &RotationSystem) -> Result<EmbCycle> {
    Ok(all_shortest_nonseparating(rs)?.swap_remove(0))
}

pub fn shortest_noncontractible_cycle(rs: &RotationSystem) -> Result<EmbCycle> {
    if rs.genus() == 0 {
        return Err(Error::NoneExists("no noncontractible cycle in the sphere".into()));
    }
    shortest_cycles_by(rs, |c| !is_contractible(rs, c))
        .into_iter()
        .next()
        .ok_or_else(|| Error::Invariant("positive genus but no noncontractible cycle".into()))
}

/// Nonseparating edge-width.
pub fn ewn(rs: &RotationSystem) -> Result<usize> {
    Ok(shortest_nonseparating_cycle(rs)?.len())
}

/// Nonseparating edge-width of the dual.
pub fn ewn_dual(rs: &RotationSystem) -> Result<usize> {
    ewn(&rs.dual())
}

/// Edge-width: shortest noncontractible cycle.
pub fn ew(rs: &RotationSystem) -> Result<usize> {
    Ok(shortest_noncontractible_cycle(rs)?.len())
}

/// Face-width, as half the edge-width of the vertex-face incidence graph.
pub fn fw(rs: &RotationSystem) -> Result<usize> {
    Ok(ew(&rs.vertex_face_incidence())? / 2)
}

pub fn fwn(rs: &RotationSystem) -> Result<usize> {
    Ok(ewn(&rs.vertex_face_incidence())? / 2)
}

/// A path given by its darts; for an ear, the first dart leaves the cycle on
/// its left and the last dart arrives on its right.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ear {
    pub darts: Vec<Dart>,
}

impl Ear {
    pub fn len(&self) -> usize {
        self.darts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.darts.is_empty()
    }

    pub fn start(&self, rs: &RotationSystem) -> usize {
        rs.tail(self.darts[0])
    }

    pub fn end(&self, rs: &RotationSystem) -> usize {
        rs.head(*self.darts.last().unwrap())
    }

    pub fn edges(&self) -> Vec<usize> {
        self.darts.iter().map(|&d| edge_of(d)).collect()
    }
}

/// Shortest `C`-switching ear, found as a shortest `c1`-`c2` path after
/// cutting through `C` and lifted back.
pub fn shortest_switching_ear(rs: &RotationSystem, c: &EmbCycle) -> Result<Ear> {
    let cut = cut_through(rs, c)?;
    let g = &cut.cut;
    let mut pred: Vec<Option<Dart>> = vec![None; g.num_vertices()];
    let mut seen = vec![false; g.num_vertices()];
    seen[cut.c1] = true;
    let mut queue = VecDeque::from([cut.c1]);
    while let Some(v) = queue.pop_front() {
        if v == cut.c2 {
            break;
        }
        for &d in g.rotation(v) {
            let w = g.head(d);
            if !seen[w] {
                seen[w] = true;
                pred[w] = Some(d);
                queue.push_back(w);
            }
        }
    }
    if !seen[cut.c2] {
        return Err(Error::Invariant("no switching ear for a nonseparating cycle".into()));
    }
    let mut darts = Vec::new();
    let mut v = cut.c2;
    while v != cut.c1 {
        let d = pred[v].unwrap();
        darts.push(cut.lift_dart(d));
        v = g.tail(d);
    }
    darts.reverse();
    Ok(Ear { darts })
}

/// Length of the shortest switching ear.
pub fn switching_ear_length(rs: &RotationSystem, c: &EmbCycle) -> Result<usize> {
    Ok(shortest_switching_ear(rs, c)?.len())
}

/// Side of `C` on which each non-`C` dart at a `C`-vertex sits: `Some(true)`
/// for left, `Some(false)` for right, `None` elsewhere.
pub fn dart_sides(rs: &RotationSystem, c: &EmbCycle) -> Vec<Option<bool>> {
    let mut side = vec![None; rs.num_darts()];
    let k = c.darts.len();
    for i in 0..k {
        let out = c.darts[i];
        let inn = mate(c.darts[(i + k - 1) % k]);
        let mut x = rs.sigma(out);
        while x != inn {
            side[x] = Some(true);
            x = rs.sigma(x);
        }
        let mut x = rs.sigma(inn);
        while x != out {
            side[x] = Some(false);
            x = rs.sigma(x);
        }
    }
    side
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{one_vertex, plane_cycle, tg_column, torus_grid};

    fn col(p: usize, q: usize, j: usize) -> EmbCycle {
        EmbCycle::from_edges(&torus_grid(p, q), &tg_column(p, q, j), false).unwrap()
    }

    #[test]
    fn facial_cycles_separate() {
        let rs = torus_grid(3, 4);
        for f in rs.faces() {
            let c = EmbCycle::from_darts(&rs, f.clone(), false).unwrap();
            assert!(is_separating(&rs, &c));
            assert!(is_contractible(&rs, &c));
        }
    }

    #[test]
    fn columns_do_not_separate() {
        let rs = torus_grid(3, 5);
        let c = col(3, 5, 1);
        assert!(!is_separating(&rs, &c));
        assert!(!is_contractible(&rs, &c));
    }

    #[test]
    fn sphere_cycles_separate() {
        let rs = plane_cycle(5);
        let c = EmbCycle::from_edges(&rs, &[0, 1, 2, 3, 4], false).unwrap();
        assert!(is_separating(&rs, &c));
        assert!(is_contractible(&rs, &c));
        assert_eq!(ewn(&rs), Err(Error::NoNonseparatingCycle));
    }

    #[test]
    fn separating_noncontractible_on_genus_two() {
        // a loop around the join vertex separating two handles
        let mut rot = vec![8usize];
        rot.extend([0, 2, 1, 3]);
        rot.push(9);
        rot.extend([4, 6, 5, 7]);
        let rs = RotationSystem::new(vec![rot], 5).unwrap();
        assert_eq!(rs.genus(), 2);
        let c = EmbCycle::from_darts(&rs, vec![8], false).unwrap();
        assert!(is_separating(&rs, &c));
        assert_eq!(side_genera(&rs, &c), Some([1, 1]));
        assert!(!is_contractible(&rs, &c));
    }

    #[test]
    fn ewn_of_torus_grids() {
        for p in 3..=5 {
            for q in p..=5 {
                let rs = torus_grid(p, q);
                assert_eq!(ewn(&rs).unwrap(), p, "TG({p},{q})");
                assert_eq!(ewn_dual(&rs).unwrap(), p);
                assert_eq!(ew(&rs).unwrap(), p);
            }
        }
        assert_eq!(ewn(&one_vertex(&[0, 2, 1, 3])).unwrap(), 1);
    }

    #[test]
    fn face_width_bounds() {
        let rs = torus_grid(4, 6);
        let f = fw(&rs).unwrap();
        let ewd = ew(&rs.dual()).unwrap();
        assert!(ewd >= f && f * rs.half_degree() >= ewd);
        assert_eq!(f, 4);
    }

    #[test]
    fn switching_ears_on_grids() {
        for q in 3..=8 {
            let rs = torus_grid(3, q);
            let c = col(3, q, 0);
            let ear = shortest_switching_ear(&rs, &c).unwrap();
            assert_eq!(ear.len(), q);
            let side = dart_sides(&rs, &c);
            assert_eq!(side[ear.darts[0]], Some(true));
            assert_eq!(side[mate(*ear.darts.last().unwrap())], Some(false));
        }
        let lp = one_vertex(&[0, 2, 1, 3]);
        let a = EmbCycle::from_darts(&lp, vec![0], false).unwrap();
        let ear = shortest_switching_ear(&lp, &a).unwrap();
        assert_eq!(ear.edges(), vec![1]);
    }

    #[test]
    fn tie_break_is_canonical() {
        let rs = torus_grid(3, 4);
        let all = all_shortest_nonseparating(&rs).unwrap();
        assert_eq!(all.len(), 4);
        let c = shortest_nonseparating_cycle(&rs).unwrap();
        assert_eq!(c.canonical_key(), all[0].canonical_key());
        assert_eq!(c.edges(), tg_column(3, 4, 0));
    }
}
