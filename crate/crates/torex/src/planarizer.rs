//! Planar drawings with certified crossing counts. The input is cut along a
//! good planarizing sequence; the severed edges are then reinserted into the
//! planar remainder, bunch `F_g` first, each along a route that crosses as
//! few base edges as possible.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap, VecDeque};

use petgraph::graph::UnGraph;
use serde::Serialize;

use crate::embedding::{edge_of, mate, Dart, RotationSystem};
use crate::error::{Error, Result};
use crate::surgery::{good_planarizing_sequence, PlanarizingSequence};

/// Faces `a_j(f)`, `b_j(f)` of every later embedding for one severed edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HeirEntry {
    /// Index `i` of the cut that severed the edge (`f ∈ F_i`).
    pub step: usize,
    /// Input edge id.
    pub edge: usize,
    /// Input dart of the edge in the direction of the dual cycle; its tail
    /// is the endpoint on the `a` side.
    pub dart: Dart,
    /// Corners holding the `a`-side halfedge in `G_i, ..., G_g`.
    pub tail_corners: Vec<Dart>,
    pub head_corners: Vec<Dart>,
    /// `a_j(f)` for `j = i..=g`.
    pub a: Vec<usize>,
    /// `b_j(f)` for `j = i..=g`.
    pub b: Vec<usize>,
}

impl HeirEntry {
    pub fn a_g(&self) -> usize {
        *self.a.last().unwrap()
    }

    pub fn b_g(&self) -> usize {
        *self.b.last().unwrap()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HeirFaces {
    pub genus: usize,
    /// Grouped by step, each bunch in the order of its dual cycle.
    pub entries: Vec<HeirEntry>,
}

impl HeirFaces {
    pub fn bunch(&self, i: usize) -> impl Iterator<Item = &HeirEntry> {
        self.entries.iter().filter(move |e| e.step == i)
    }

    /// Number of distinct `a_g(f)` and `b_g(f)` over `f ∈ F_i`.
    pub fn grouping(&self, i: usize) -> (usize, usize) {
        let mut a: Vec<usize> = self.bunch(i).map(HeirEntry::a_g).collect();
        let mut b: Vec<usize> = self.bunch(i).map(HeirEntry::b_g).collect();
        a.sort_unstable();
        a.dedup();
        b.sort_unstable();
        b.dedup();
        (a.len(), b.len())
    }
}

/// Follows the corners of every severed halfedge through the later cuts.
pub fn heir_faces(seq: &PlanarizingSequence) -> HeirFaces {
    let g = seq.steps.len();
    let mut entries = Vec::new();
    for (si, step) in seq.steps.iter().enumerate() {
        let i = si + 1;
        for (k, sev) in step.along.severed.iter().enumerate() {
            let mut tail_corners = vec![sev.tail_corner];
            let mut head_corners = vec![sev.head_corner];
            for later in &seq.steps[i..] {
                let map = &later.along.corner_map;
                tail_corners.push(map[*tail_corners.last().unwrap()]);
                head_corners.push(map[*head_corners.last().unwrap()]);
            }
            let faces = |cs: &[Dart]| -> Vec<usize> {
                cs.iter().enumerate().map(|(t, &x)| seq.embedding(i + t).corner_face(x)).collect()
            };
            entries.push(HeirEntry {
                step: i,
                edge: step.severed_input[k],
                dart: 2 * step.severed_input[k] + (step.gamma.darts[k] & 1),
                a: faces(&tail_corners),
                b: faces(&head_corners),
                tail_corners,
                head_corners,
            });
        }
    }
    HeirFaces { genus: g, entries }
}

/// `Σ_{j=i}^{g} ℓ_j`.
pub fn ell_suffix(seq: &PlanarizingSequence, i: usize) -> usize {
    seq.steps[i - 1..].iter().map(|s| s.l).sum()
}

/// `3·(2^{g+1} − 2 − g)·max k_iℓ_i`.
pub fn certified_bound(seq: &PlanarizingSequence) -> usize {
    let g = seq.genus();
    3 * ((1usize << (g + 1)) - 2 - g) * seq.max_kl()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InsertionRoute {
    pub edge: usize,
    pub step: usize,
    /// Faces of `G_g` from `a_g(f)` to `b_g(f)`.
    pub faces: Vec<usize>,
}

/// Shortest dual paths in `G_g` from `a_g(f)` to `b_g(f)`, one search per
/// distinct source face. Returns the routes and the number of searches.
pub fn insertion_routes(seq: &PlanarizingSequence, heirs: &HeirFaces) -> (Vec<InsertionRoute>, usize) {
    let base = seq.last();
    let mut trees: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut routes = Vec::with_capacity(heirs.entries.len());
    for e in &heirs.entries {
        let (a, b) = (e.a_g(), e.b_g());
        let pred = trees.entry(a).or_insert_with(|| {
            let mut pred = vec![usize::MAX; base.num_faces()];
            pred[a] = a;
            let mut queue = VecDeque::from([a]);
            while let Some(f) = queue.pop_front() {
                for &d in &base.faces()[f] {
                    let h = base.face_of(mate(d));
                    if pred[h] == usize::MAX {
                        pred[h] = f;
                        queue.push_back(h);
                    }
                }
            }
            pred
        });
        let mut faces = vec![b];
        while *faces.last().unwrap() != a {
            faces.push(pred[*faces.last().unwrap()]);
        }
        faces.reverse();
        routes.push(InsertionRoute { edge: e.edge, step: e.step, faces });
    }
    let searches = trees.len();
    (routes, searches)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossingRecord {
    /// The other edge (input id).
    pub edge: usize,
    /// Index of the crossing along this edge, from its tail.
    pub pos_self: usize,
    /// Index of the crossing along the other edge, from its tail.
    pub pos_other: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Insertion {
    pub edge: usize,
    pub step: usize,
    pub tail: usize,
    pub head: usize,
    /// Faces of the base embedding visited, in order.
    pub route_faces: Vec<usize>,
    pub base_crossings: usize,
    pub crossings: Vec<CrossingRecord>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Drawing {
    pub genus: usize,
    pub bound: usize,
    pub total_crossings: usize,
    pub input_edges: usize,
    /// Plane embedding `G_g` in rotation-file format.
    pub base: String,
    /// Input edge id of each base edge.
    pub base_edges: Vec<usize>,
    pub insertions: Vec<Insertion>,
    /// Plane map with a degree-4 vertex per crossing; vertex ids below
    /// `V` are the input vertices.
    #[serde(skip)]
    pub planarization: RotationSystem,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Owner {
    Base(usize),
    Inserted(usize),
}

/// The plane map under construction.
struct Plane {
    rotations: Vec<Vec<Dart>>,
    vertex_of: Vec<usize>,
    owner: Vec<Owner>,
    /// Edge `e` points against its owner's tail-to-head direction.
    flip: Vec<bool>,
    /// Dart that took the place of `d` at vertex `v` when `d` moved away.
    repl: HashMap<(Dart, usize), Dart>,
}

impl Plane {
    fn new(base: &RotationSystem) -> Self {
        let m = base.num_edges();
        Plane {
            rotations: base.rotations().to_vec(),
            vertex_of: (0..2 * m).map(|d| base.vertex_of(d)).collect(),
            owner: (0..m).map(Owner::Base).collect(),
            flip: vec![false; m],
            repl: HashMap::new(),
        }
    }

    fn num_edges(&self) -> usize {
        self.owner.len()
    }

    fn embedding(&self) -> RotationSystem {
        RotationSystem::new(self.rotations.clone(), self.num_edges()).expect("plane map stays valid")
    }

    fn resolve(&self, mut d: Dart, v: usize) -> Dart {
        while self.vertex_of[d] != v {
            d = self.repl[&(d, v)];
        }
        d
    }

    fn position(&self, d: Dart) -> usize {
        let v = self.vertex_of[d];
        self.rotations[v].iter().position(|&x| x == d).unwrap()
    }

    fn new_edge(&mut self, owner: Owner, flip: bool) -> usize {
        self.owner.push(owner);
        self.flip.push(flip);
        self.vertex_of.extend([usize::MAX, usize::MAX]);
        self.owner.len() - 1
    }

    /// Places a new vertex on the edge of `delta`. Returns the new vertex;
    /// `mate(delta)` now sits there with the continuation `2n` after it.
    fn subdivide(&mut self, delta: Dart) -> (usize, Dart) {
        let e = edge_of(delta);
        let flip = self.flip[e] ^ (delta & 1 == 1);
        let n = self.new_edge(self.owner[e], flip);
        let (p, q) = (2 * n, 2 * n + 1);
        let md = mate(delta);
        let h = self.vertex_of[md];
        let at = self.position(md);
        self.rotations[h][at] = q;
        self.vertex_of[q] = h;
        self.repl.insert((md, h), q);
        let w = self.rotations.len();
        self.rotations.push(vec![md, p]);
        self.vertex_of[md] = w;
        self.vertex_of[p] = w;
        (w, p)
    }

    /// Joins the corners after `y1` and `y2` by a new edge, `2z` at `y1`.
    fn connect(&mut self, y1: Dart, y2: Dart, owner: Owner, flip: bool) {
        let z = self.new_edge(owner, flip);
        let (a, b) = (2 * z, 2 * z + 1);
        let v1 = self.vertex_of[y1];
        let i1 = self.position(y1);
        self.rotations[v1].insert(i1 + 1, a);
        self.vertex_of[a] = v1;
        let (v2, after) = if y1 == y2 { (v1, a) } else { (self.vertex_of[y2], y2) };
        let i2 = self.position(after);
        self.rotations[v2].insert(i2 + 1, b);
        self.vertex_of[b] = v2;
    }

    /// Darts at the same vertex whose corners lie in the base corner after
    /// `x`: `x` itself and the inserted darts following it.
    fn sub_corners(&self, x: Dart) -> Vec<Dart> {
        let v = self.vertex_of[x];
        let rot = &self.rotations[v];
        let i = self.position(x);
        let mut out = vec![x];
        for t in 1..rot.len() {
            let d = rot[(i + t) % rot.len()];
            if matches!(self.owner[edge_of(d)], Owner::Base(_)) {
                break;
            }
            out.push(d);
        }
        out
    }
}

/// Draws `rs` in the plane with crossings counted from the construction.
pub fn draw(rs: &RotationSystem) -> Result<Drawing> {
    let seq = good_planarizing_sequence(rs)?;
    draw_sequence(rs, &seq)
}

pub fn draw_sequence(rs: &RotationSystem, seq: &PlanarizingSequence) -> Result<Drawing> {
    let g = seq.genus();
    let base = seq.last();
    let heirs = heir_faces(seq);
    let base_edges = seq.input_edges(g);
    let mut plane = Plane::new(base);

    let mut order: Vec<&HeirEntry> = heirs.entries.iter().collect();
    order.sort_by_key(|e| Reverse(e.step));
    let mut routes: HashMap<usize, (usize, Vec<usize>)> = HashMap::new();
    for entry in order {
        let f = entry.edge;
        let (u, v) = (rs.tail(entry.dart), rs.head(entry.dart));
        let reversed = entry.dart & 1 == 1;
        let pm = plane.embedding();
        let starts = plane.sub_corners(plane.resolve(*entry.tail_corners.last().unwrap(), u));
        let ends = plane.sub_corners(plane.resolve(*entry.head_corners.last().unwrap(), v));

        // lexicographic Dijkstra over the faces of the plane map
        let nf = pm.num_faces();
        let mut dist = vec![(usize::MAX, usize::MAX); nf];
        let mut pred: Vec<Option<Dart>> = vec![None; nf];
        let mut heap = BinaryHeap::new();
        for &y in &starts {
            let fy = pm.corner_face(y);
            if dist[fy] > (0, 0) {
                dist[fy] = (0, 0);
                heap.push(Reverse(((0, 0), fy)));
            }
        }
        while let Some(Reverse((c, face))) = heap.pop() {
            if c > dist[face] {
                continue;
            }
            for &d in &pm.faces()[face] {
                let step = match plane.owner[edge_of(d)] {
                    Owner::Base(_) => (1, 0),
                    Owner::Inserted(_) => (0, 1),
                };
                let nc = (c.0 + step.0, c.1 + step.1);
                let h = pm.face_of(mate(d));
                if nc < dist[h] {
                    dist[h] = nc;
                    pred[h] = Some(d);
                    heap.push(Reverse((nc, h)));
                }
            }
        }
        let y2 = *ends
            .iter()
            .min_by_key(|&&y| dist[pm.corner_face(y)])
            .expect("corner list is never empty");
        let mut crossed = Vec::new();
        let mut face = pm.corner_face(y2);
        while let Some(d) = pred[face] {
            if dist[face] == (0, 0) {
                break;
            }
            crossed.push(d);
            face = pm.face_of(d);
        }
        crossed.reverse();
        let y1 = *starts.iter().find(|&&y| pm.corner_face(y) == face).unwrap();

        // route through the base faces, read off the crossed base darts
        let mut route_faces = vec![entry.a_g()];
        let mut base_crossings = 0;
        for &d in &crossed {
            if let Owner::Base(be) = plane.owner[edge_of(d)] {
                let gd = 2 * be + ((d & 1) ^ plane.flip[edge_of(d)] as usize);
                route_faces.push(base.face_of(mate(gd)));
                base_crossings += 1;
            }
        }
        if *route_faces.last().unwrap() != entry.b_g() {
            return Err(Error::Invariant(format!("route of edge {f} ends in the wrong face")));
        }
        routes.insert(f, (base_crossings, route_faces));

        let owner = Owner::Inserted(f);
        let mut cur = (y1, u);
        for &d in &crossed {
            let (w, p) = plane.subdivide(d);
            let md = mate(d);
            let c = plane.resolve(cur.0, cur.1);
            plane.connect(c, md, owner, reversed);
            cur = (p, w);
        }
        let c = plane.resolve(cur.0, cur.1);
        let t = plane.resolve(y2, v);
        plane.connect(c, t, owner, reversed);
    }

    let planarization = plane.embedding();
    if planarization.genus() != 0 {
        return Err(Error::Invariant("planarization is not plane".into()));
    }

    // walk every input edge from its tail and number its crossings
    let n = rs.num_vertices();
    let mut first_piece: HashMap<usize, Dart> = HashMap::new();
    for pe in 0..plane.num_edges() {
        let ge = match plane.owner[pe] {
            Owner::Base(be) => base_edges[be],
            Owner::Inserted(f) => f,
        };
        let d = 2 * pe + plane.flip[pe] as usize;
        if plane.vertex_of[d] == rs.tail(2 * ge) && plane.vertex_of[d] < n {
            first_piece.entry(ge).or_insert(d);
        }
    }
    let mut along: Vec<Vec<usize>> = vec![Vec::new(); rs.num_edges()];
    let mut at_crossing: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    for ge in 0..rs.num_edges() {
        let mut d = *first_piece
            .get(&ge)
            .ok_or_else(|| Error::Invariant(format!("edge {ge} missing from the drawing")))?;
        loop {
            let w = plane.vertex_of[mate(d)];
            if w < n {
                break;
            }
            let rot = &plane.rotations[w];
            let i = rot.iter().position(|&x| x == mate(d)).unwrap();
            at_crossing.entry(w).or_default().push((ge, along[ge].len()));
            along[ge].push(w);
            d = rot[(i + 2) % 4];
        }
    }
    let total_crossings = at_crossing.len();
    let mut insertions = Vec::with_capacity(heirs.entries.len());
    for entry in &heirs.entries {
        let f = entry.edge;
        let crossings = along[f]
            .iter()
            .enumerate()
            .map(|(pos, w)| {
                let pair = &at_crossing[w];
                let &(o, po) = pair.iter().find(|&&(e, p)| (e, p) != (f, pos)).unwrap();
                CrossingRecord { edge: o, pos_self: pos, pos_other: po }
            })
            .collect();
        let (base_crossings, route_faces) = routes.remove(&f).unwrap();
        insertions.push(Insertion {
            edge: f,
            step: entry.step,
            tail: rs.tail(2 * f),
            head: rs.head(2 * f),
            route_faces,
            base_crossings,
            crossings,
        });
    }
    let bound = certified_bound(seq);
    log::info!("drawing: genus {g}, {total_crossings} crossings, bound {bound}");
    Ok(Drawing {
        genus: g,
        bound,
        total_crossings,
        input_edges: rs.num_edges(),
        base: base.serialize(),
        base_edges,
        insertions,
        planarization,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DrawingCheck {
    pub valid: bool,
    pub problems: Vec<String>,
}

/// Checks edge accounting, the consistency of the crossing records and the
/// planarity of the planarization built from them.
pub fn validate_drawing(d: &Drawing) -> DrawingCheck {
    let mut problems = Vec::new();
    let base = match RotationSystem::parse(&d.base) {
        Ok(b) => b,
        Err(e) => {
            return DrawingCheck { valid: false, problems: vec![format!("base does not parse: {e}")] };
        }
    };
    if base.genus() != 0 {
        problems.push(format!("base has genus {}", base.genus()));
    }
    if d.base_edges.len() != base.num_edges() {
        problems.push("base edge map has the wrong length".into());
    }
    let mut seen = vec![0usize; d.input_edges];
    let mut ends: Vec<Option<(usize, usize)>> = vec![None; d.input_edges];
    for (be, &e) in d.base_edges.iter().enumerate() {
        match seen.get_mut(e) {
            Some(c) => {
                *c += 1;
                ends[e] = Some(base.endpoints(be));
            }
            None => problems.push(format!("base edge maps to unknown edge {e}")),
        }
    }
    let mut inserted: HashMap<usize, &Insertion> = HashMap::new();
    for ins in &d.insertions {
        match seen.get_mut(ins.edge) {
            Some(c) => {
                *c += 1;
                ends[ins.edge] = Some((ins.tail, ins.head));
                inserted.insert(ins.edge, ins);
            }
            None => problems.push(format!("insertion of unknown edge {}", ins.edge)),
        }
    }
    for (e, &c) in seen.iter().enumerate() {
        if c != 1 {
            problems.push(format!("edge {e} appears {c} times"));
        }
    }
    if !problems.is_empty() {
        return DrawingCheck { valid: false, problems };
    }

    // crossing positions per edge: (edge, pos) -> canonical crossing key
    let mut base_pos: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    let mut key_of: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
    for ins in &d.insertions {
        let mut own: Vec<usize> = ins.crossings.iter().map(|c| c.pos_self).collect();
        own.sort_unstable();
        if own != (0..own.len()).collect::<Vec<_>>() {
            problems.push(format!("edge {}: crossing positions are not 0..{}", ins.edge, own.len()));
        }
        for c in &ins.crossings {
            let key = if ins.edge < c.edge { (ins.edge, c.pos_self) } else { (c.edge, c.pos_other) };
            key_of.insert((ins.edge, c.pos_self), key);
            match inserted.get(&c.edge) {
                Some(other) => {
                    let mirrored = other
                        .crossings
                        .iter()
                        .any(|r| r.edge == ins.edge && r.pos_self == c.pos_other && r.pos_other == c.pos_self);
                    if !mirrored {
                        problems.push(format!("edges ({}, {}): crossing orders disagree", ins.edge, c.edge));
                    }
                }
                None => {
                    if c.edge >= d.input_edges {
                        problems.push(format!("edge {}: crossing with unknown edge {}", ins.edge, c.edge));
                        continue;
                    }
                    base_pos.entry(c.edge).or_default().push((c.pos_other, ins.edge));
                    key_of.insert((c.edge, c.pos_other), key);
                }
            }
        }
    }
    for (e, pos) in &mut base_pos {
        pos.sort_unstable();
        let k = pos.len();
        for (i, &(p, f)) in pos.iter().enumerate() {
            if p >= k || (i > 0 && pos[i - 1].0 == p) {
                problems.push(format!("edges ({f}, {e}): crossing orders disagree"));
            }
        }
    }
    let keys: BTreeMap<(usize, usize), usize> = {
        let mut ks: Vec<(usize, usize)> = key_of.values().copied().collect();
        ks.sort_unstable();
        ks.dedup();
        ks.into_iter().enumerate().map(|(i, k)| (k, i)).collect()
    };
    if keys.len() != d.total_crossings {
        problems.push(format!("{} crossings recorded, {} claimed", keys.len(), d.total_crossings));
    }
    if d.total_crossings > d.bound && d.genus > 0 {
        problems.push(format!("{} crossings exceed the bound {}", d.total_crossings, d.bound));
    }
    if !problems.is_empty() {
        return DrawingCheck { valid: false, problems };
    }

    let n = base.num_vertices();
    let mut graph = UnGraph::<(), ()>::new_undirected();
    let nodes: Vec<_> = (0..n + keys.len()).map(|_| graph.add_node(())).collect();
    let mut count: BTreeMap<usize, usize> = BTreeMap::new();
    for (&(e, _), _) in key_of.iter() {
        *count.entry(e).or_default() += 1;
    }
    for (e, end) in ends.iter().enumerate() {
        let (t, h) = end.unwrap();
        let mut path = vec![t];
        for pos in 0..count.get(&e).copied().unwrap_or(0) {
            path.push(n + keys[&key_of[&(e, pos)]]);
        }
        path.push(h);
        for w in path.windows(2) {
            if w[0] != w[1] && graph.find_edge(nodes[w[0]], nodes[w[1]]).is_none() {
                graph.add_edge(nodes[w[0]], nodes[w[1]], ());
            }
        }
    }
    if !rustworkx_core::planar::is_planar(&graph) {
        problems.push("planarization is not planar".into());
    }
    DrawingCheck { valid: problems.is_empty(), problems }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{join, plane_grid, torus_grid};
    use crate::homology::crossing_lb_from_tex;

    #[test]
    fn torus_grid_drawings() {
        for (p, q) in [(3, 3), (3, 4), (3, 8), (4, 6), (5, 5)] {
            let rs = torus_grid(p, q);
            let d = draw(&rs).unwrap();
            let check = validate_drawing(&d);
            assert!(check.valid, "TG({p},{q}): {:?}", check.problems);
            let lb = crossing_lb_from_tex(p, q).unwrap().value;
            assert!(lb <= d.total_crossings && d.total_crossings <= d.bound, "TG({p},{q})");
            assert_eq!(d.insertions.len(), p.min(q));
        }
        let d = draw(&torus_grid(3, 8)).unwrap();
        assert!(d.total_crossings <= 72);
        assert!(d.total_crossings <= 3 * (8 + 3));
    }

    #[test]
    fn one_step_heirs_share_faces() {
        for q in 3..=7 {
            let seq = good_planarizing_sequence(&torus_grid(3, q)).unwrap();
            let heirs = heir_faces(&seq);
            assert_eq!(heirs.entries.len(), 3);
            assert_eq!(heirs.grouping(1), (1, 1));
            let along = &seq.steps[0].along;
            for e in &heirs.entries {
                assert_eq!((e.a[0], e.b[0]), (along.a1, along.a2));
            }
            let (routes, searches) = insertion_routes(&seq, &heirs);
            assert_eq!(searches, 1);
            for r in routes {
                assert!(r.faces.len() - 1 <= q);
            }
        }
    }

    #[test]
    fn genus_two_routes_and_grouping() {
        let rs = join(&torus_grid(3, 4), &torus_grid(3, 5));
        let seq = good_planarizing_sequence(&rs).unwrap();
        let heirs = heir_faces(&seq);
        let g = seq.genus();
        for i in 1..=g {
            let (a, b) = heirs.grouping(i);
            assert!(a <= 1 << (g - i) && b <= 1 << (g - i));
        }
        let (routes, searches) = insertion_routes(&seq, &heirs);
        assert!(searches <= 1 << g);
        let d = draw_sequence(&rs, &seq).unwrap();
        assert!(validate_drawing(&d).valid);
        for (r, ins) in routes.iter().zip(&d.insertions) {
            assert_eq!(r.edge, ins.edge);
            assert_eq!(r.faces.len() - 1, ins.base_crossings);
            assert!(ins.base_crossings <= ell_suffix(&seq, ins.step));
        }
    }

    #[test]
    fn plane_input_has_no_crossings() {
        let d = draw(&plane_grid(3, 3)).unwrap();
        assert_eq!((d.total_crossings, d.bound, d.insertions.len()), (0, 0, 0));
        assert!(validate_drawing(&d).valid);
    }

    /// K5 minus one edge, embedded in the plane by exhaustive search.
    fn planar_k5_minus_edge() -> RotationSystem {
        let pairs: Vec<(usize, usize)> =
            (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))).filter(|&p| p != (0, 1)).collect();
        let mut darts: Vec<Vec<Dart>> = vec![Vec::new(); 5];
        for (e, &(a, b)) in pairs.iter().enumerate() {
            darts[a].push(2 * e);
            darts[b].push(2 * e + 1);
        }
        fn perms(v: &[Dart]) -> Vec<Vec<Dart>> {
            // cyclic orders with v[0] fixed first
            let rest = &v[1..];
            let mut out = Vec::new();
            let mut idx: Vec<usize> = (0..rest.len()).collect();
            loop {
                let mut r = vec![v[0]];
                r.extend(idx.iter().map(|&i| rest[i]));
                out.push(r);
                let Some(i) = (1..idx.len()).rev().find(|&i| idx[i - 1] < idx[i]) else { break };
                let j = (i..idx.len()).rev().find(|&j| idx[j] > idx[i - 1]).unwrap();
                idx.swap(i - 1, j);
                idx[i..].reverse();
            }
            out
        }
        let options: Vec<Vec<Vec<Dart>>> = darts.iter().map(|d| perms(d)).collect();
        let mut choice = vec![0usize; 5];
        loop {
            let rot: Vec<Vec<Dart>> = (0..5).map(|v| options[v][choice[v]].clone()).collect();
            let rs = RotationSystem::new(rot, pairs.len()).unwrap();
            if rs.genus() == 0 {
                return rs;
            }
            let mut v = 0;
            while choice[v] + 1 == options[v].len() {
                choice[v] = 0;
                v += 1;
            }
            choice[v] += 1;
        }
    }

    #[test]
    fn k5_at_zero_crossings_is_rejected() {
        let base = planar_k5_minus_edge();
        let planarization = base.clone();
        let d = Drawing {
            genus: 0,
            bound: 0,
            total_crossings: 0,
            input_edges: 10,
            base: base.serialize(),
            base_edges: (0..9).collect(),
            insertions: vec![Insertion {
                edge: 9,
                step: 1,
                tail: 0,
                head: 1,
                route_faces: vec![],
                base_crossings: 0,
                crossings: vec![],
            }],
            planarization,
        };
        let check = validate_drawing(&d);
        assert!(!check.valid);
        assert_eq!(check.problems, vec!["planarization is not planar".to_string()]);
    }

    #[test]
    fn corrupt_crossing_order_is_reported() {
        let mut d = draw(&torus_grid(3, 4)).unwrap();
        assert!(validate_drawing(&d).valid);
        let i = d.insertions.iter().position(|ins| !ins.crossings.is_empty()).unwrap();
        let j = 0;
        d.insertions[i].crossings[j].pos_other += 7;
        let check = validate_drawing(&d);
        assert!(!check.valid);
        assert!(check.problems.iter().any(|p| p.contains("crossing orders disagree")), "{:?}", check.problems);
    }
}
