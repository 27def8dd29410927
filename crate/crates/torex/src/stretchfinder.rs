//! Bipolar dual subgraphs and the cutting iteration that trades genus for
//! stretch: cut along the shorter stretch witness until the longer one is
//! at least the polarity switching distance.
//!
//! Everything below works on a host `h` with an edge subset `δ`; callers
//! pass the dual of the embedding they care about.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use crate::cycle::EmbCycle;
use crate::embedding::{edge_of, mate, Dart, RotationSystem};
use crate::error::{Error, Result};
use crate::homology::{all_shortest_nonseparating, ewn_dual, stretch_exact, switching_ear_length};
use crate::surgery::cut_along;

/// `δ` with the faces of its induced embedding and a proper two-colouring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BipolarSubgraph {
    pub edges: Vec<usize>,
    pub vertices: Vec<usize>,
    /// Faces of the induced embedding as dart cycles.
    pub faces: Vec<Vec<Dart>>,
    /// `true` for positive.
    pub positive: Vec<bool>,
    /// Connected component of `δ` owning each induced face.
    pub component: Vec<usize>,
    #[serde(skip)]
    face_of: Vec<usize>,
}

impl BipolarSubgraph {
    pub fn contains_edge(&self, e: usize) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn num_components(&self) -> usize {
        self.component.iter().max().map_or(0, |c| c + 1)
    }

    /// Swaps the colours on one component.
    pub fn flip_component(&mut self, c: usize) {
        for (f, pos) in self.positive.iter_mut().enumerate() {
            if self.component[f] == c {
                *pos = !*pos;
            }
        }
    }

    /// Polarity of the halfedge of dart `x`, which must sit at a vertex of
    /// `δ` and not belong to `δ`.
    pub fn polarity(&self, h: &RotationSystem, x: Dart) -> Result<bool> {
        if self.contains_edge(edge_of(x)) {
            return Err(Error::pre("halfedge polarity", "edge outside the bipolar subgraph"));
        }
        if !self.contains_vertex(h.vertex_of(x)) {
            return Err(Error::pre("halfedge polarity", "vertex on the bipolar subgraph"));
        }
        let mut y = h.sigma_inv(x);
        while !self.contains_edge(edge_of(y)) {
            y = h.sigma_inv(y);
        }
        // the corner after y in the induced rotation
        let mut z = h.sigma(y);
        while !self.contains_edge(edge_of(z)) {
            z = h.sigma(z);
        }
        Ok(self.positive[self.face_of[z]])
    }

    /// Polarity of every dart it is defined for.
    pub fn polarities(&self, h: &RotationSystem) -> Vec<Option<bool>> {
        (0..h.num_darts()).map(|x| self.polarity(h, x).ok()).collect()
    }
}

/// Traces the induced embedding of `δ` and two-colours its faces.
pub fn bipolar_coloring(h: &RotationSystem, delta: &[usize]) -> Result<BipolarSubgraph> {
    if delta.is_empty() {
        return Err(Error::pre("bipolar colouring", "nonempty dual subgraph"));
    }
    let mut edges = delta.to_vec();
    edges.sort_unstable();
    edges.dedup();
    let inside = |d: Dart| edges.binary_search(&edge_of(d)).is_ok();
    let next_in_rotation = |d: Dart| {
        let mut z = h.sigma(d);
        while !inside(z) {
            z = h.sigma(z);
        }
        z
    };
    let mut vertices: Vec<usize> = edges.iter().flat_map(|&e| [h.tail(2 * e), h.head(2 * e)]).collect();
    vertices.sort_unstable();
    vertices.dedup();

    let mut face_of = vec![usize::MAX; h.num_darts()];
    let mut faces = Vec::new();
    for &e in &edges {
        for d in [2 * e, 2 * e + 1] {
            if face_of[d] != usize::MAX {
                continue;
            }
            let mut face = Vec::new();
            let mut x = d;
            loop {
                face_of[x] = faces.len();
                face.push(x);
                x = next_in_rotation(mate(x));
                if x == d {
                    break;
                }
            }
            faces.push(face);
        }
    }
    let nf = faces.len();
    let mut colour: Vec<Option<bool>> = vec![None; nf];
    let mut component = vec![usize::MAX; nf];
    let mut comps = 0;
    for s in 0..nf {
        if colour[s].is_some() {
            continue;
        }
        colour[s] = Some(true);
        component[s] = comps;
        let mut queue = VecDeque::from([s]);
        while let Some(f) = queue.pop_front() {
            for &d in &faces[f] {
                let g = face_of[mate(d)];
                let want = !colour[f].unwrap();
                match colour[g] {
                    None => {
                        colour[g] = Some(want);
                        component[g] = comps;
                        queue.push_back(g);
                    }
                    Some(c) if c != want => {
                        return Err(Error::NotBipolar(format!(
                            "edge {} has the same colour on both sides",
                            edge_of(d)
                        )));
                    }
                    Some(_) => {}
                }
            }
        }
        comps += 1;
    }
    let positive = colour.into_iter().map(Option::unwrap).collect();
    Ok(BipolarSubgraph { edges, vertices, faces, positive, component, face_of })
}

/// Shortest ear of `δ` whose two end halfedges have different polarities,
/// oriented from the positive end.
pub fn shortest_polarity_switching_ear(h: &RotationSystem, bp: &BipolarSubgraph) -> Result<Vec<Dart>> {
    let pol = bp.polarities(h);
    let mut pred: Vec<Option<Dart>> = vec![None; h.num_vertices()];
    let mut queue = VecDeque::new();
    let path_to = |pred: &[Option<Dart>], last: Dart| {
        let mut darts = vec![last];
        let mut v = h.tail(last);
        while let Some(d) = pred[v] {
            darts.push(d);
            v = h.tail(d);
        }
        darts.reverse();
        darts
    };
    let mut frontier: Vec<Dart> = (0..h.num_darts()).filter(|&x| pol[x] == Some(true)).collect();
    // every dart leaving a reached vertex, in BFS layers
    while !frontier.is_empty() {
        for &x in &frontier {
            let w = h.head(x);
            if bp.contains_vertex(w) {
                if pol[mate(x)] == Some(false) {
                    return Ok(path_to(&pred, x));
                }
            } else if pred[w].is_none() {
                pred[w] = Some(x);
                queue.push_back(w);
            }
        }
        frontier = queue.drain(..).flat_map(|w| h.rotation(w).to_vec()).collect();
    }
    Err(Error::NoneExists("no polarity switching ear".into()))
}

/// Number of polarity leaps of a closed walk.
pub fn polarity_leaps(h: &RotationSystem, bp: &BipolarSubgraph, walk: &[Dart]) -> usize {
    let l = walk.len();
    let ind = |d: Dart| bp.contains_edge(edge_of(d));
    let Some(s) = (0..l).find(|&t| !ind(walk[t])) else { return 0 };
    let mut leaps = 0;
    let mut t = 0;
    while t < l {
        let f0 = walk[(s + t) % l];
        t += 1;
        if !bp.contains_vertex(h.head(f0)) {
            continue;
        }
        while t < l && ind(walk[(s + t) % l]) {
            t += 1;
        }
        let f1 = walk[(s + t) % l];
        if bp.polarity(h, mate(f0)).ok() != bp.polarity(h, f1).ok() {
            leaps += 1;
        }
    }
    leaps
}

fn reduce(walk: Vec<Dart>) -> Vec<Dart> {
    let mut st: Vec<Dart> = Vec::with_capacity(walk.len());
    for d in walk {
        if st.last() == Some(&mate(d)) {
            st.pop();
        } else {
            st.push(d);
        }
    }
    while st.len() >= 2 && st[0] == mate(*st.last().unwrap()) {
        st.pop();
        st.remove(0);
    }
    st
}

/// A closed walk with an odd number of polarity leaps, taken from the
/// fundamental cycles of a BFS tree. Leap parity is additive over the cycle
/// space, so none exists when every fundamental cycle is even.
pub fn odd_leaping_walk(h: &RotationSystem, bp: &BipolarSubgraph) -> Option<Vec<Dart>> {
    let n = h.num_vertices();
    let mut pred: Vec<Option<Dart>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    let mut tree = HashSet::new();
    while let Some(v) = queue.pop_front() {
        for &d in h.rotation(v) {
            let w = h.head(d);
            if !seen[w] {
                seen[w] = true;
                pred[w] = Some(d);
                tree.insert(edge_of(d));
                queue.push_back(w);
            }
        }
    }
    let root_path = |v: usize| {
        let mut darts = Vec::new();
        let mut v = v;
        while let Some(d) = pred[v] {
            darts.push(d);
            v = h.tail(d);
        }
        darts.reverse();
        darts
    };
    for e in 0..h.num_edges() {
        if tree.contains(&e) {
            continue;
        }
        let d = 2 * e;
        let mut walk = root_path(h.tail(d));
        walk.push(d);
        walk.extend(root_path(h.head(d)).iter().rev().map(|&x| mate(x)));
        let walk = reduce(walk);
        if polarity_leaps(h, bp, &walk) % 2 == 1 {
            return Some(walk);
        }
    }
    None
}

pub fn odd_leaping_walk_exists(h: &RotationSystem, bp: &BipolarSubgraph) -> bool {
    odd_leaping_walk(h, bp).is_some()
}

/// What happened after cutting along `α`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CutOutcome {
    /// Switching distance recomputed on the cut embedding.
    pub h_next: usize,
    /// `h - ⌊‖α‖/2⌋`, which `h_next` must reach.
    pub h_floor: usize,
    /// `δ` minus `α`, in edge ids of the cut embedding.
    pub delta_edges: Vec<usize>,
    /// Halfedges whose recomputed polarity disagrees with the inherited one.
    pub inherited_mismatches: usize,
    pub odd_walk_len: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CutStep {
    pub genus: usize,
    pub h: usize,
    pub stretch: usize,
    pub alpha: EmbCycle,
    pub beta: EmbCycle,
    pub alpha_len: usize,
    pub beta_len: usize,
    /// `‖β‖ >= h`, or `α` is all of `δ`.
    pub terminal: bool,
    pub outcome: Option<CutOutcome>,
}

/// One step on the embedding `rs` with bipolar `δ` in its dual.
pub fn cut_step(
    rs: &RotationSystem,
    bp: &BipolarSubgraph,
    h: usize,
    cap: usize,
) -> Result<(CutStep, Option<(RotationSystem, BipolarSubgraph)>)> {
    let dual = rs.dual();
    let st = stretch_exact(&dual, cap).map_err(|e| match e {
        Error::TooLarge { .. } => Error::ExactRequired,
        e => e,
    })?;
    let (alpha, beta) = st.witness.clone().ok_or(Error::ExactRequired)?;
    let mut step = CutStep {
        genus: rs.genus(),
        h,
        stretch: st.lower,
        alpha_len: alpha.len(),
        beta_len: beta.len(),
        alpha: alpha.clone(),
        beta,
        terminal: true,
        outcome: None,
    };
    let alpha_edges = alpha.edge_set();
    let rest: Vec<usize> = bp.edges.iter().copied().filter(|e| !alpha_edges.contains(e)).collect();
    if step.beta_len >= h || rest.is_empty() {
        return Ok((step, None));
    }
    step.terminal = false;
    let along = cut_along(rs, &EmbCycle { dual: true, darts: alpha.darts.clone() })?;
    let h1 = &along.cut;
    let dual1 = h1.dual();
    let mut new_id = vec![usize::MAX; rs.num_edges()];
    for (e1, &e) in along.edge_origin.iter().enumerate() {
        new_id[e] = e1;
    }
    let delta1: Vec<usize> = rest.iter().map(|&e| new_id[e]).collect();
    let mut bp1 = bipolar_coloring(&dual1, &delta1)?;

    // align each component with the polarities inherited from δ
    let old = bp.polarities(&dual);
    let new = bp1.polarities(&dual1);
    let mut votes = vec![(0usize, 0usize); bp1.num_components()];
    for x in 0..dual1.num_darts() {
        let (Some(p1), Some(p)) = (new[x], old[along.lift_dart(x)]) else { continue };
        let mut y = dual1.sigma(x);
        while !bp1.contains_edge(edge_of(y)) {
            y = dual1.sigma(y);
        }
        let c = bp1.component[bp1.face_of[y]];
        if p1 == p {
            votes[c].0 += 1;
        } else {
            votes[c].1 += 1;
        }
    }
    let mut mismatches = 0;
    for (c, &(agree, disagree)) in votes.iter().enumerate() {
        if disagree > agree {
            bp1.flip_component(c);
        }
        mismatches += agree.min(disagree);
    }
    let walk = odd_leaping_walk(&dual1, &bp1)
        .ok_or_else(|| Error::Invariant("cut embedding has no odd-leaping walk".into()))?;
    let h_next = shortest_polarity_switching_ear(&dual1, &bp1)?.len();
    let h_floor = h.saturating_sub(step.alpha_len / 2);
    if h_next < h_floor {
        return Err(Error::Invariant(format!("switching distance fell to {h_next} < {h_floor}")));
    }
    step.outcome = Some(CutOutcome {
        h_next,
        h_floor,
        delta_edges: bp1.edges.clone(),
        inherited_mismatches: mismatches,
        odd_walk_len: walk.len(),
    });
    Ok((step, Some((h1.clone(), bp1))))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HighStretchReport {
    pub genus: usize,
    pub g_prime: usize,
    /// `ewn*` of the input.
    pub k: usize,
    /// Switching ear length of the starting dual cycle.
    pub l: usize,
    pub steps: Vec<CutStep>,
    pub ewn_prime: usize,
    pub stretch_prime: usize,
    /// `2^{g'-g}·k`.
    pub ewn_bound: f64,
    /// `2^{2g'-2g}·k·l`.
    pub stretch_bound: f64,
    pub ewn_ok: bool,
    pub stretch_ok: bool,
    /// The final embedding in rotation format.
    pub embedding: String,
}

/// Cuts along stretch witnesses from a shortest nonseparating dual cycle
/// until the longer witness reaches the switching distance.
pub fn find_high_stretch_subgraph(rs: &RotationSystem, cap: usize) -> Result<HighStretchReport> {
    let g = rs.genus();
    if g == 0 {
        return Err(Error::pre("high-stretch subgraph", "genus >= 1 required"));
    }
    let k = ewn_dual(rs)?;
    if k < 1 << g {
        return Err(Error::DensityTooLow { k, need: 1 << g });
    }
    let dual = rs.dual();
    let gamma = all_shortest_nonseparating(&dual)?.swap_remove(0);
    let l = switching_ear_length(&dual, &gamma)?;
    let mut cur = rs.clone();
    let mut bp = bipolar_coloring(&dual, &gamma.edges())?;
    let mut h = l;
    let mut steps = Vec::new();
    loop {
        let (step, next) = cut_step(&cur, &bp, h, cap)?;
        let stretch = step.stretch;
        steps.push(step);
        let Some((rs1, bp1)) = next else {
            let i = steps.len() - 1;
            let ewn_prime = ewn_dual(&cur)?;
            let scale = 0.5f64.powi(i as i32);
            let ewn_bound = scale * k as f64;
            let stretch_bound = scale * scale * (k * l) as f64;
            log::info!("high stretch: genus {g} -> {} after {i} cuts", cur.genus());
            return Ok(HighStretchReport {
                genus: g,
                g_prime: cur.genus(),
                k,
                l,
                steps,
                ewn_prime,
                stretch_prime: stretch,
                ewn_bound,
                stretch_bound,
                ewn_ok: ewn_prime as f64 >= ewn_bound,
                stretch_ok: stretch as f64 >= stretch_bound,
                embedding: cur.serialize(),
            });
        };
        if rs1.genus() == 0 {
            return Err(Error::Invariant("cutting reached the plane".into()));
        }
        h = steps.last().unwrap().outcome.as_ref().unwrap().h_next;
        cur = rs1;
        bp = bp1;
    }
}
