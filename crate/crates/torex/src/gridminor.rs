//! Toroidal grid minors on the torus: two families of disjoint homotopic
//! cycles from max-flow, merged into a `C_p x C_q` minor with a checkable
//! certificate, and the resulting lower bounds on `Tex`.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use petgraph::algo::{ford_fulkerson, is_isomorphic};
use petgraph::graph::{DiGraph, NodeIndex, UnGraph};
use serde::Serialize;

use crate::cycle::EmbCycle;
use crate::embedding::{edge_of, mate, Dart, RotationSystem};
use crate::error::{Error, Result};
use crate::homology::{
    all_shortest_nonseparating, face_two_colouring, is_null_homologous, leap_report,
    shortest_switching_ear, switching_ear_length,
};
use crate::surgery::cut_along;

/// Pairwise disjoint cycles, all homotopic to the dual loop `alpha`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleFamily {
    pub cycles: Vec<EmbCycle>,
    pub alpha: EmbCycle,
    pub pairwise_disjoint: bool,
}

fn pairwise_disjoint(rs: &RotationSystem, cycles: &[EmbCycle]) -> bool {
    let mut seen = HashSet::new();
    cycles.iter().all(|c| c.vertices(rs).into_iter().all(|v| seen.insert(v)))
}

fn require_torus(rs: &RotationSystem, what: &str) -> Result<()> {
    if rs.genus() != 1 {
        return Err(Error::pre(what, "genus 1 required"));
    }
    Ok(())
}

/// Cuts along `alpha`, takes a shortest radial path across the resulting
/// cylinder and routes vertex-disjoint paths around it by max-flow.
pub fn disjoint_cycles_along(rs: &RotationSystem, alpha: &EmbCycle) -> Result<CycleFamily> {
    require_torus(rs, "disjoint cycle family")?;
    let along = cut_along(rs, alpha)?;
    let g = &along.cut;
    let n = g.num_vertices();

    // radial BFS from face a1 to face a2; node ids: vertices, then n + face
    let total = n + g.num_faces();
    let mut pred: Vec<Option<(usize, Dart)>> = vec![None; total];
    let mut seen = vec![false; total];
    let (src, dst) = (n + along.a1, n + along.a2);
    seen[src] = true;
    let mut queue = VecDeque::from([src]);
    while let Some(x) = queue.pop_front() {
        if x == dst {
            break;
        }
        if x >= n {
            for &y in &g.faces()[x - n] {
                let v = g.vertex_of(y);
                if !seen[v] {
                    seen[v] = true;
                    pred[v] = Some((x, g.sigma_inv(y)));
                    queue.push_back(v);
                }
            }
        } else {
            for &c in g.rotation(x) {
                let f = n + g.corner_face(c);
                if !seen[f] {
                    seen[f] = true;
                    pred[f] = Some((x, c));
                    queue.push_back(f);
                }
            }
        }
    }
    if !seen[dst] {
        return Err(Error::Invariant("sides of the cut are not connected".into()));
    }
    // vertices of the radial path with entry and exit corners, from a1
    let mut radial: Vec<(usize, Dart, Dart)> = Vec::new();
    let mut x = dst;
    let mut exit = None;
    while x != src {
        let (prev, corner) = pred[x].unwrap();
        if x < n {
            radial.push((x, corner, exit.unwrap()));
        } else {
            exit = Some(corner);
        }
        x = prev;
    }
    radial.reverse();

    // flow network: split every vertex; radial vertices become a source
    // copy (side A) and a sink copy (side B)
    let mut net: DiGraph<(), u32> = DiGraph::new();
    let s = net.add_node(());
    let t = net.add_node(());
    let mut node_in = vec![NodeIndex::end(); n];
    let mut node_out = vec![NodeIndex::end(); n];
    let mut copy_of_dart: HashMap<Dart, (usize, bool)> = HashMap::new();
    let mut a_nodes = Vec::new();
    let mut b_nodes = Vec::new();
    let on_radial: HashMap<usize, usize> = radial.iter().enumerate().map(|(i, r)| (r.0, i)).collect();
    for (i, &(v, x_in, x_out)) in radial.iter().enumerate() {
        let rot = g.rotation(v);
        let k = rot.len();
        let pin = rot.iter().position(|&d| d == x_in).unwrap();
        let pout = rot.iter().position(|&d| d == x_out).unwrap();
        let mut p = (pin + 1) % k;
        loop {
            copy_of_dart.insert(rot[p], (i, true));
            if p == pout {
                break;
            }
            p = (p + 1) % k;
        }
        let mut p = (pout + 1) % k;
        loop {
            copy_of_dart.insert(rot[p], (i, false));
            if p == pin {
                break;
            }
            p = (p + 1) % k;
        }
        let a = net.add_node(());
        let b = net.add_node(());
        net.add_edge(s, a, 1);
        net.add_edge(b, t, 1);
        a_nodes.push(a);
        b_nodes.push(b);
    }
    for v in 0..n {
        if !on_radial.contains_key(&v) {
            node_in[v] = net.add_node(());
            node_out[v] = net.add_node(());
            net.add_edge(node_in[v], node_out[v], 1);
        }
    }
    let tail_node = |d: Dart| -> Option<NodeIndex> {
        match copy_of_dart.get(&d) {
            Some(&(i, true)) => Some(a_nodes[i]),
            Some(&(_, false)) => None,
            None => Some(node_out[g.vertex_of(d)]),
        }
    };
    let head_node = |d: Dart| -> Option<NodeIndex> {
        match copy_of_dart.get(&mate(d)) {
            Some(&(i, false)) => Some(b_nodes[i]),
            Some(&(_, true)) => None,
            None => Some(node_in[g.vertex_of(mate(d))]),
        }
    };
    let mut arc_dart: HashMap<usize, Dart> = HashMap::new();
    for d in 0..g.num_darts() {
        if g.tail(d) == g.head(d) && !copy_of_dart.contains_key(&d) {
            continue;
        }
        if let (Some(a), Some(b)) = (tail_node(d), head_node(d)) {
            let id = net.add_edge(a, b, 1);
            arc_dart.insert(id.index(), d);
        }
    }
    let (value, flows) = ford_fulkerson(&net, s, t);
    log::debug!("family along {}: radial length {}, flow {value}", alpha, radial.len());

    // cancel opposite unit flows on the same edge, then decompose
    let mut used: HashMap<Dart, bool> = HashMap::new();
    for (&id, &d) in &arc_dart {
        if flows[id] > 0 {
            used.insert(d, true);
        }
    }
    let live: HashSet<Dart> = used.keys().copied().filter(|&d| !used.contains_key(&mate(d))).collect();
    let mut next_from: HashMap<NodeIndex, Dart> = HashMap::new();
    for &d in &live {
        next_from.insert(tail_node(d).unwrap(), d);
    }
    let mut cycles = Vec::new();
    for (i, &a) in a_nodes.iter().enumerate() {
        let Some(&first) = next_from.get(&a) else { continue };
        let mut darts = vec![first];
        let mut d = first;
        loop {
            match copy_of_dart.get(&mate(d)) {
                Some(&(j, false)) => {
                    if j != i {
                        return Err(Error::Invariant(format!("path from copy {i} ends at copy {j}")));
                    }
                    break;
                }
                _ => {
                    let w = g.vertex_of(mate(d));
                    d = *next_from
                        .get(&node_out[w])
                        .ok_or_else(|| Error::Invariant("flow path breaks off".into()))?;
                    darts.push(d);
                }
            }
        }
        let lifted: Vec<Dart> = darts.iter().map(|&d| along.lift_dart(d)).collect();
        cycles.push(EmbCycle::from_darts(rs, lifted, false)?);
    }
    let disjoint = pairwise_disjoint(rs, &cycles);
    Ok(CycleFamily { cycles, alpha: alpha.clone(), pairwise_disjoint: disjoint })
}

/// Dual cycle crossing `alpha` once: a shortest switching dual ear closed
/// along the shorter (or longer) arc of `alpha`.
pub fn transversal_dual_cycle(rs: &RotationSystem, alpha: &EmbCycle, longer: bool) -> Result<EmbCycle> {
    let dual = rs.dual();
    let ear = shortest_switching_ear(&dual, alpha)?;
    let (x, y) = (ear.start(&dual), ear.end(&dual));
    let mut closing = arcs(&dual, &alpha.darts, y, x);
    closing.sort_by_key(Vec::len);
    let arc = match (longer, closing.len()) {
        (false, _) => &closing[0],
        (true, 2) => &closing[1],
        _ => return Err(Error::NoneExists("transversal has a single closing arc".into())),
    };
    let mut darts = ear.darts.clone();
    darts.extend(arc);
    EmbCycle::from_darts(&dual, darts, true)
}

/// Odd leap parity, which on the torus means the pair spans homology.
pub fn is_basis_pair(rs: &RotationSystem, c: &EmbCycle, d: &EmbCycle) -> Result<bool> {
    Ok(leap_report(rs, c, d)?.is_odd())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GridMinorCertificate {
    pub p: usize,
    pub q: usize,
    /// Branch set of grid vertex `(i, j)` at index `i * q + j`.
    pub branch_sets: Vec<Vec<usize>>,
    /// One edge of the host graph per grid edge.
    pub connectors: Vec<usize>,
    pub verified: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MergeStats {
    pub phase1_reroutes: usize,
    pub phase2_shortcuts: usize,
    /// Largest number of times a merged cycle wound around the first family.
    pub max_winding: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateCheck {
    pub valid: bool,
    pub problems: Vec<String>,
}

/// `C_p x C_q`.
pub fn grid_graph(p: usize, q: usize) -> UnGraph<(), ()> {
    let mut h = UnGraph::new_undirected();
    let nodes: Vec<_> = (0..p * q).map(|_| h.add_node(())).collect();
    for i in 0..p {
        for j in 0..q {
            h.add_edge(nodes[i * q + j], nodes[((i + 1) % p) * q + j], ());
            h.add_edge(nodes[i * q + j], nodes[i * q + (j + 1) % q], ());
        }
    }
    h
}

/// Disjoint connected branch sets whose connector edges form `C_p x C_q`.
pub fn verify_certificate(rs: &RotationSystem, cert: &GridMinorCertificate) -> CertificateCheck {
    let mut problems = Vec::new();
    let (p, q) = (cert.p, cert.q);
    if p < 3 || q < 3 {
        problems.push(format!("dimensions {p} x {q} below 3"));
    }
    if cert.branch_sets.len() != p * q {
        problems.push(format!("{} branch sets for a {p} x {q} grid", cert.branch_sets.len()));
    }
    if !problems.is_empty() {
        return CertificateCheck { valid: false, problems };
    }
    let n = rs.num_vertices();
    let mut owner = vec![usize::MAX; n];
    for (b, set) in cert.branch_sets.iter().enumerate() {
        if set.is_empty() {
            problems.push(format!("branch set {b} is empty"));
        }
        for &v in set {
            if v >= n {
                problems.push(format!("branch set {b}: vertex {v} out of range"));
            } else if owner[v] != usize::MAX {
                problems.push(format!("branch sets {} and {b} overlap at vertex {v}", owner[v]));
            } else {
                owner[v] = b;
            }
        }
    }
    if !problems.is_empty() {
        return CertificateCheck { valid: false, problems };
    }
    for (b, set) in cert.branch_sets.iter().enumerate() {
        let mut seen: HashSet<usize> = HashSet::from([set[0]]);
        let mut queue = VecDeque::from([set[0]]);
        while let Some(v) = queue.pop_front() {
            for &d in rs.rotation(v) {
                let w = rs.head(d);
                if owner[w] == b && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        if seen.len() != set.len() {
            problems.push(format!("branch set {b} is not connected"));
        }
    }
    let mut minor = UnGraph::<(), ()>::new_undirected();
    let nodes: Vec<_> = (0..p * q).map(|_| minor.add_node(())).collect();
    let mut pairs = HashSet::new();
    for &e in &cert.connectors {
        if e >= rs.num_edges() {
            problems.push(format!("connector {e} out of range"));
            continue;
        }
        let (u, v) = rs.endpoints(e);
        let (a, b) = (owner[u], owner[v]);
        if a == usize::MAX || b == usize::MAX || a == b {
            problems.push(format!("connector {e} does not join two branch sets"));
            continue;
        }
        if pairs.insert((a.min(b), a.max(b))) {
            minor.add_edge(nodes[a], nodes[b], ());
        }
    }
    if problems.is_empty() && !is_isomorphic(&minor, &grid_graph(p, q)) {
        problems.push(format!("contracted graph is not C_{p} x C_{q}"));
    }
    CertificateCheck { valid: problems.is_empty(), problems }
}

/// Vertex to cycle index for a family of disjoint cycles.
fn membership(n: usize, rs: &RotationSystem, cycles: &[Vec<Dart>]) -> Vec<Option<usize>> {
    let mut on = vec![None; n];
    for (i, c) in cycles.iter().enumerate() {
        for &d in c {
            on[rs.tail(d)] = Some(i);
        }
    }
    on
}

#[derive(Clone, Copy, Debug)]
struct Run {
    c: usize,
    start: usize,
    len: usize,
}

impl Run {
    fn end(&self, l: usize) -> usize {
        (self.start + self.len - 1) % l
    }
}

/// Maximal stretches of a closed walk on one cycle of the family.
fn runs(rs: &RotationSystem, walk: &[Dart], on: &[Option<usize>]) -> Vec<Run> {
    let l = walk.len();
    let lab: Vec<Option<usize>> = walk.iter().map(|&d| on[rs.tail(d)]).collect();
    let Some(b) = (0..l).find(|&k| lab[k].is_none() || lab[k] != lab[(k + l - 1) % l]) else {
        return match lab[0] {
            Some(c) => vec![Run { c, start: 0, len: l }],
            None => Vec::new(),
        };
    };
    let mut out: Vec<Run> = Vec::new();
    let mut t = 0;
    while t < l {
        let k = (b + t) % l;
        match lab[k] {
            Some(c) => {
                let mut len = 1;
                while t + len < l && lab[(b + t + len) % l] == Some(c) {
                    len += 1;
                }
                out.push(Run { c, start: k, len });
                t += len;
            }
            None => t += 1,
        }
    }
    out
}

/// Darts of the walk from position `from` up to, not including, `to`.
fn segment(walk: &[Dart], from: usize, count: usize) -> Vec<Dart> {
    (0..count).map(|t| walk[(from + t) % walk.len()]).collect()
}

/// The two arcs of cycle `c` from `x` to `y` (forward, backward).
fn arcs(rs: &RotationSystem, c: &[Dart], x: usize, y: usize) -> Vec<Vec<Dart>> {
    let k = c.len();
    let px = c.iter().position(|&d| rs.tail(d) == x).unwrap();
    let py = c.iter().position(|&d| rs.tail(d) == y).unwrap();
    if px == py {
        return vec![Vec::new()];
    }
    let fwd = segment(c, px, (py + k - px) % k);
    let bwd: Vec<Dart> = segment(c, py, (px + k - py) % k).iter().rev().map(|&d| mate(d)).collect();
    vec![fwd, bwd]
}

fn edges_of(darts: &[Dart]) -> Vec<usize> {
    darts.iter().map(|&d| edge_of(d)).collect()
}

/// Removes immediate reversals `d, mate(d)`, cyclically.
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

/// Faces on the disc side of a null-homologous closed walk.
fn enclosed_faces(rs: &RotationSystem, edges: &[usize]) -> usize {
    let Some(colour) = face_two_colouring(rs, edges) else { return usize::MAX };
    let mut z = vec![false; rs.num_edges()];
    for &e in edges {
        z[e] ^= true;
    }
    let mut chi = [0i64; 2];
    let mut faces = [0usize; 2];
    for &c in &colour {
        chi[c as usize] += 1;
        faces[c as usize] += 1;
    }
    for e in 0..rs.num_edges() {
        if !z[e] {
            chi[colour[rs.face_of(2 * e)] as usize] -= 1;
        }
    }
    for v in 0..rs.num_vertices() {
        let cs: HashSet<u8> = rs.rotation(v).iter().map(|&x| colour[rs.corner_face(x)]).collect();
        if cs.len() == 1 {
            chi[*cs.iter().next().unwrap() as usize] += 1;
        }
    }
    match (chi[0] == 1, chi[1] == 1) {
        (true, false) => faces[0],
        (false, true) => faces[1],
        _ => faces[0].min(faces[1]),
    }
}

fn excess(cs: &[Vec<Dart>], ds: &[Vec<Dart>]) -> usize {
    let de: HashSet<usize> = ds.iter().flat_map(|d| edges_of(d)).collect();
    let ce: HashSet<usize> = cs.iter().flat_map(|c| edges_of(c)).collect();
    ce.difference(&de).count()
}

/// Reroutes cycles of the first family along ears of the second family
/// that leave and return to the same cycle.
fn phase_one(rs: &RotationSystem, cs: &mut [Vec<Dart>], ds: &[Vec<Dart>]) -> Result<usize> {
    let n = rs.num_vertices();
    let mut steps = 0;
    let mut potential = excess(cs, ds);
    loop {
        let on = membership(n, rs, cs);
        let c_edges: HashSet<usize> = cs.iter().flat_map(|c| edges_of(c)).collect();
        let mut found = None;
        'search: for w in ds {
            let l = w.len();
            let hits: Vec<usize> = (0..l).filter(|&k| on[rs.tail(w[k])].is_some()).collect();
            for (h, &s) in hits.iter().enumerate() {
                let t = hits[(h + 1) % hits.len()];
                let count = (t + l - s) % l;
                let count = if count == 0 { l } else { count };
                if count == 1 && c_edges.contains(&edge_of(w[s])) {
                    continue;
                }
                let (x, y) = (rs.tail(w[s]), rs.tail(w[t]));
                if x != y && on[x] == on[y] {
                    found = Some((on[x].unwrap(), segment(w, s, count), x, y));
                    break 'search;
                }
            }
        }
        let Some((i, ear, x, y)) = found else { break };
        let cands = arcs(rs, &cs[i], x, y);
        let Some(k) = (0..cands.len()).find(|&k| {
            let mut e = edges_of(&ear);
            e.extend(edges_of(&cands[k]));
            is_null_homologous(rs, &e)
        }) else {
            return Err(Error::Invariant("ear closes no disc with either arc".into()));
        };
        // keep the other arc, walked from y back to x
        let mut next = ear;
        next.extend(cands[1 - k].iter().rev().map(|&d| mate(d)));
        cs[i] = next;
        steps += 1;
        let np = excess(cs, ds);
        if np >= potential {
            return Err(Error::Invariant(format!("phase 1 potential did not drop ({potential} -> {np})")));
        }
        potential = np;
    }
    Ok(steps)
}

/// Shortcuts excursions `C_a -> C_b -> C_a` of the second family through
/// `C_a`, innermost first.
fn phase_two(rs: &RotationSystem, cs: &[Vec<Dart>], ds: &mut [Vec<Dart>]) -> Result<usize> {
    let on = membership(rs.num_vertices(), rs, cs);
    let mut steps = 0;
    loop {
        let mut best: Option<(usize, usize, Vec<Dart>)> = None;
        for (j, w) in ds.iter().enumerate() {
            let r = runs(rs, w, &on);
            let m = r.len();
            if m < 3 {
                return Err(Error::Invariant(format!("cycle {j} of the second family meets fewer than 3 cycles")));
            }
            let l = w.len();
            for t in 0..m {
                let (prev, next) = (r[(t + m - 1) % m], r[(t + 1) % m]);
                if prev.c != next.c {
                    continue;
                }
                let e = prev.end(l);
                let count = (next.start + l - e) % l;
                let excursion = segment(w, e, count);
                let (x, y) = (rs.tail(w[e]), rs.tail(w[next.start]));
                for arc in arcs(rs, &cs[prev.c], x, y) {
                    let mut z = edges_of(&excursion);
                    z.extend(edges_of(&arc));
                    if !is_null_homologous(rs, &z) {
                        continue;
                    }
                    let size = enclosed_faces(rs, &z);
                    if best.as_ref().is_none_or(|b| size < b.0) {
                        let mut next_walk = segment(w, next.start, l - count);
                        next_walk.extend(arc.iter().copied());
                        best = Some((size, j, reduce(next_walk)));
                    }
                }
            }
        }
        let Some((_, j, walk)) = best else { break };
        let before = runs(rs, &ds[j], &on).len();
        ds[j] = walk;
        let after = runs(rs, &ds[j], &on).len();
        if after + 2 > before {
            return Err(Error::Invariant(format!("phase 2 rank went from {before} to {after}")));
        }
        steps += 1;
    }
    Ok(steps)
}

/// Closed walks winding once, built from one turn of `walk` and an arc of
/// the cycle where the turn starts and ends.
fn one_turn_candidates(
    rs: &RotationSystem,
    cs: &[Vec<Dart>],
    on: &[Option<usize>],
    walk: &[Dart],
) -> Vec<Vec<Dart>> {
    let p = cs.len();
    let r = runs(rs, walk, on);
    let m = r.len();
    let l = walk.len();
    let mut out: Vec<Vec<Dart>> = Vec::new();
    let mut keys = HashSet::new();
    if m % p != 0 {
        return out;
    }
    for s in 0..m {
        let s2 = (s + p) % m;
        let e = r[s].end(l);
        let count = if s2 == s { l - (r[s].len - 1) } else { (r[s2].start + l - e) % l };
        let turn = segment(walk, e, count);
        let (x, y) = (rs.tail(walk[e]), rs.tail(walk[r[s2].start]));
        for arc in arcs(rs, &cs[r[s].c], y, x) {
            let mut darts = turn.clone();
            darts.extend(arc);
            let Ok(c) = EmbCycle::from_darts(rs, darts, false) else { continue };
            let cr = runs(rs, &c.darts, on);
            let mut seen: Vec<usize> = cr.iter().map(|x| x.c).collect();
            seen.sort_unstable();
            seen.dedup();
            if cr.len() != p || seen.len() != p {
                continue;
            }
            if keys.insert(c.canonical_key()) {
                out.push(c.darts);
            }
        }
    }
    out.sort_by_key(Vec::len);
    out
}

fn choose_disjoint(
    rs: &RotationSystem,
    cands: &[Vec<Vec<Dart>>],
    j: usize,
    used: &mut HashSet<usize>,
    chosen: &mut Vec<usize>,
    budget: &mut usize,
) -> bool {
    if j == cands.len() {
        return true;
    }
    for (k, c) in cands[j].iter().enumerate() {
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        let vs: Vec<usize> = c.iter().map(|&d| rs.tail(d)).collect();
        if vs.iter().any(|v| used.contains(v)) {
            continue;
        }
        used.extend(vs.iter().copied());
        chosen.push(k);
        if choose_disjoint(rs, cands, j + 1, used, chosen, budget) {
            return true;
        }
        chosen.pop();
        for v in &vs {
            used.remove(v);
        }
    }
    false
}

/// Merges two families of disjoint homotopic cycles into a grid minor.
pub fn merge_families(
    rs: &RotationSystem,
    cfam: &[EmbCycle],
    dfam: &[EmbCycle],
) -> Result<(GridMinorCertificate, MergeStats)> {
    require_torus(rs, "grid minor merge")?;
    let (p, q) = (cfam.len(), dfam.len());
    if p < 3 || q < 3 {
        return Err(Error::pre("grid minor merge", "families of at least 3 cycles"));
    }
    if !pairwise_disjoint(rs, cfam) || !pairwise_disjoint(rs, dfam) {
        return Err(Error::pre("grid minor merge", "cycles within a family must be disjoint"));
    }
    if leap_report(rs, &cfam[0], &dfam[0])?.algebraic == 0 {
        return Err(Error::pre("grid minor merge", "families must intersect algebraically"));
    }
    let mut cs: Vec<Vec<Dart>> = cfam.iter().map(|c| c.darts.clone()).collect();
    let mut ds: Vec<Vec<Dart>> = dfam.iter().map(|c| c.darts.clone()).collect();
    let mut stats = MergeStats { phase1_reroutes: phase_one(rs, &mut cs, &ds)?, ..Default::default() };
    stats.phase2_shortcuts = phase_two(rs, &cs, &mut ds)?;
    let on = membership(rs.num_vertices(), rs, &cs);
    let mut cands = Vec::with_capacity(q);
    for w in &ds {
        stats.max_winding = stats.max_winding.max(runs(rs, w, &on).len() / p);
        let c = one_turn_candidates(rs, &cs, &on, w);
        if c.is_empty() {
            return Err(Error::Invariant("a cycle of the second family has no single turn".into()));
        }
        cands.push(c);
    }
    let mut chosen = Vec::new();
    let mut budget = 200_000;
    if !choose_disjoint(rs, &cands, 0, &mut HashSet::new(), &mut chosen, &mut budget) {
        return Err(Error::Invariant("no disjoint choice of single turns".into()));
    }
    let dd: Vec<Vec<Dart>> = chosen.iter().enumerate().map(|(j, &k)| cands[j][k].clone()).collect();
    log::debug!("merge: {stats:?}");
    let cert = certificate(rs, &cs, &dd)?;
    Ok((cert, stats))
}

/// Branch sets `C_i ∩ D_j` grown along both families, with connectors.
fn certificate(rs: &RotationSystem, cs: &[Vec<Dart>], ds: &[Vec<Dart>]) -> Result<GridMinorCertificate> {
    let n = rs.num_vertices();
    let on_c = membership(n, rs, cs);
    let on_d = membership(n, rs, ds);
    // order the second family along the first cycle, the first along D_0
    let mut d_order = Vec::new();
    for &x in &cs[0] {
        if let Some(j) = on_d[rs.tail(x)] {
            if !d_order.contains(&j) {
                d_order.push(j);
            }
        }
    }
    let mut c_order = Vec::new();
    for &x in &ds[0] {
        if let Some(i) = on_c[rs.tail(x)] {
            if !c_order.contains(&i) {
                c_order.push(i);
            }
        }
    }
    let (p, q) = (cs.len(), ds.len());
    if c_order.len() != p || d_order.len() != q {
        return Err(Error::Invariant("families do not meet pairwise".into()));
    }
    let ci: HashMap<usize, usize> = c_order.iter().enumerate().map(|(a, &b)| (b, a)).collect();
    let dj: HashMap<usize, usize> = d_order.iter().enumerate().map(|(a, &b)| (b, a)).collect();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    for v in 0..n {
        if let (Some(i), Some(j)) = (on_c[v], on_d[v]) {
            owner[v] = Some(ci[&i] * q + dj[&j]);
        }
    }
    // vertices on exactly one family join the preceding branch set
    for walk in cs.iter().chain(ds) {
        let l = walk.len();
        let Some(s) = (0..l).find(|&k| owner[rs.tail(walk[k])].is_some()) else {
            return Err(Error::Invariant("cycle misses every branch set".into()));
        };
        let mut cur = owner[rs.tail(walk[s])].unwrap();
        for t in 1..l {
            let v = rs.tail(walk[(s + t) % l]);
            let both = on_c[v].is_some() && on_d[v].is_some();
            match owner[v] {
                Some(b) if both => cur = b,
                Some(_) => {}
                None => owner[v] = Some(cur),
            }
        }
    }
    let mut branch_sets = vec![Vec::new(); p * q];
    for v in 0..n {
        if let Some(b) = owner[v] {
            branch_sets[b].push(v);
        }
    }
    let mut pairs: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for walk in cs.iter().chain(ds) {
        for &d in walk {
            let (a, b) = (owner[rs.tail(d)].unwrap(), owner[rs.head(d)].unwrap());
            if a != b {
                pairs.entry((a.min(b), a.max(b))).or_insert(edge_of(d));
            }
        }
    }
    let connectors: Vec<usize> = pairs.into_values().collect();
    let mut cert = GridMinorCertificate { p, q, branch_sets, connectors, verified: false };
    let check = verify_certificate(rs, &cert);
    if !check.valid {
        return Err(Error::Invariant(format!("certificate fails: {}", check.problems.join("; "))));
    }
    cert.verified = true;
    Ok(cert)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GridMinorResult {
    pub certificate: GridMinorCertificate,
    pub first: CycleFamily,
    pub second: CycleFamily,
    pub stats: MergeStats,
}

/// Full pipeline on a torus: families along a shortest nonseparating dual
/// cycle and along a transversal, then the merge.
pub fn grid_minor(rs: &RotationSystem) -> Result<GridMinorResult> {
    require_torus(rs, "grid minor")?;
    let dual = rs.dual();
    let mut alpha = all_shortest_nonseparating(&dual)?.swap_remove(0);
    alpha.dual = true;
    let first = disjoint_cycles_along(rs, &alpha)?;
    if first.cycles.len() < 3 {
        return Err(Error::pre("grid minor", "face-width at least 3"));
    }
    let mut last_err = None;
    for longer in [false, true] {
        let beta = match transversal_dual_cycle(rs, &alpha, longer) {
            Ok(b) => b,
            Err(e) => {
                last_err.get_or_insert(e);
                continue;
            }
        };
        let second = disjoint_cycles_along(rs, &beta)?;
        if first.cycles.is_empty() || second.cycles.is_empty() {
            continue;
        }
        if !is_basis_pair(rs, &first.cycles[0], &second.cycles[0])? {
            continue;
        }
        match merge_families(rs, &first.cycles, &second.cycles) {
            Ok((certificate, stats)) => return Ok(GridMinorResult { certificate, first, second, stats }),
            Err(e) => {
                last_err.get_or_insert(e);
            }
        }
    }
    Err(last_err.unwrap_or_else(|| Error::NoneExists("no basis pair of cycle families".into())))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TexReport {
    pub genus: usize,
    /// `ewn*`.
    pub k: usize,
    /// Largest switching ear length over the shortest dual cycles found.
    pub l: usize,
    pub max_degree: usize,
    pub half_degree: usize,
    /// Grid dimensions guaranteed on the torus when `k >= 5⌊Δ/2⌋`.
    pub grid: Option<(usize, usize)>,
    pub grid_tex: Option<usize>,
    /// `(2/7)⌊Δ/2⌋⁻²·Str*` on the torus.
    pub stretch_bound: Option<f64>,
    /// `(2/7)·4^{1-g}·⌊Δ/2⌋⁻²·Str*` for genus at least 2.
    pub genus_bound: Option<f64>,
    /// Dual stretch used for the two bounds above.
    pub dual_stretch: usize,
    /// Best lower bound on `Tex`.
    pub tex: f64,
    /// `cr >= Tex / 12`.
    pub cr_lower: f64,
    pub notes: Vec<String>,
}

/// Lower bounds on the size of the largest toroidal grid minor, using the
/// stretch lower bound `ewn*²` unless an exact dual stretch is supplied.
pub fn tex_lower_bound(rs: &RotationSystem, dual_stretch: Option<usize>) -> Result<TexReport> {
    let g = rs.genus();
    if g == 0 {
        return Err(Error::pre("Tex lower bound", "genus >= 1 required"));
    }
    let dual = rs.dual();
    let shortest = all_shortest_nonseparating(&dual)?;
    let k = shortest[0].len();
    let mut l = 0;
    for c in &shortest {
        l = l.max(switching_ear_length(&dual, c)?);
    }
    let delta = rs.max_degree();
    let h = rs.half_degree();
    let str_star = dual_stretch.unwrap_or(k * k);
    let hf = h as f64;
    let mut notes = Vec::new();
    let (grid, grid_tex, stretch_bound, genus_bound);
    if g == 1 {
        if k >= 5 * h {
            let dims = (l.div_ceil(h), (2 * k.div_ceil(h)) / 3);
            grid = Some(dims);
            grid_tex = Some(dims.0 * dims.1);
            stretch_bound = Some(2.0 / 7.0 / (hf * hf) * str_star as f64);
        } else {
            grid = None;
            grid_tex = None;
            stretch_bound = None;
            notes.push(format!("grid bound not applicable: k = {k} < 5*floor(Delta/2) = {}", 5 * h));
        }
        genus_bound = None;
    } else {
        grid = None;
        grid_tex = None;
        stretch_bound = None;
        let b = 2.0 / 7.0 * 4f64.powi(1 - g as i32) / (hf * hf) * str_star as f64;
        genus_bound = Some(b);
    }
    let tex = [grid_tex.map(|t| t as f64), stretch_bound, genus_bound]
        .into_iter()
        .flatten()
        .fold(0.0, f64::max);
    Ok(TexReport {
        genus: g,
        k,
        l,
        max_degree: delta,
        half_degree: h,
        grid,
        grid_tex,
        stretch_bound,
        genus_bound,
        dual_stretch: str_star,
        tex,
        cr_lower: tex / 12.0,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{
        grid_phase2_fixture, grid_phase3_fixture, one_vertex, plane_grid, tg_column, tg_row, torus_grid,
    };

    fn col(p: usize, q: usize, j: usize) -> EmbCycle {
        EmbCycle::from_edges(&torus_grid(p, q), &tg_column(p, q, j), false).unwrap()
    }

    fn row(p: usize, q: usize, i: usize) -> EmbCycle {
        EmbCycle::from_edges(&torus_grid(p, q), &tg_row(q, i), false).unwrap()
    }

    #[test]
    fn family_on_tg35_is_the_columns() {
        let rs = torus_grid(3, 5);
        let mut alpha = all_shortest_nonseparating(&rs.dual()).unwrap().swap_remove(0);
        alpha.dual = true;
        assert_eq!(alpha.len(), 3);
        let fam = disjoint_cycles_along(&rs, &alpha).unwrap();
        assert_eq!(fam.cycles.len(), 5);
        assert!(fam.pairwise_disjoint);
        let mut keys: Vec<_> = fam.cycles.iter().map(EmbCycle::canonical_key).collect();
        keys.sort();
        let mut cols: Vec<_> = (0..5).map(|j| col(3, 5, j).canonical_key()).collect();
        cols.sort();
        assert_eq!(keys, cols);
    }

    #[test]
    fn one_vertex_torus_family_has_one_cycle() {
        let rs = one_vertex(&[0, 2, 1, 3]);
        let alpha = EmbCycle { dual: true, darts: vec![0] };
        let fam = disjoint_cycles_along(&rs, &alpha).unwrap();
        assert_eq!(fam.cycles.len(), 1);
        assert!(merge_families(&rs, &fam.cycles, &fam.cycles).unwrap_err().is_precondition());
    }

    #[test]
    fn basis_pairs() {
        assert!(is_basis_pair(&torus_grid(4, 5), &col(4, 5, 1), &row(4, 5, 2)).unwrap());
        assert!(!is_basis_pair(&torus_grid(4, 5), &col(4, 5, 1), &col(4, 5, 3)).unwrap());
    }

    #[test]
    fn torus_grids_give_full_certificates() {
        for (p, q) in [(3, 3), (3, 5), (4, 4), (4, 6), (5, 8)] {
            let rs = torus_grid(p, q);
            let r = grid_minor(&rs).unwrap();
            let c = &r.certificate;
            assert!(c.verified && verify_certificate(&rs, c).valid);
            assert_eq!(c.p * c.q, p * q, "TG({p},{q})");
            assert_eq!(r.stats, MergeStats { phase1_reroutes: 0, phase2_shortcuts: 0, max_winding: 1 });
            assert!(c.branch_sets.iter().all(|b| b.len() == 1));
        }
    }

    #[test]
    fn phase_two_fixture() {
        let (rs, cs, ds) = grid_phase2_fixture();
        let (cert, stats) = merge_families(&rs, &cs, &ds).unwrap();
        assert!(stats.phase2_shortcuts >= 1);
        assert_eq!((cert.p, cert.q), (6, 4));
        assert!(verify_certificate(&rs, &cert).valid);
    }

    #[test]
    fn phase_three_fixture() {
        let (rs, cs, ds) = grid_phase3_fixture();
        assert!(!is_basis_pair(&rs, &cs[0], &ds[0]).unwrap());
        let (cert, stats) = merge_families(&rs, &cs, &ds).unwrap();
        assert_eq!(stats.max_winding, 2);
        assert_eq!((cert.p, cert.q), (6, 3));
        assert!(verify_certificate(&rs, &cert).valid);
    }

    #[test]
    fn broken_certificates_are_rejected() {
        let rs = torus_grid(3, 3);
        let mut cert = grid_minor(&rs).unwrap().certificate;
        cert.branch_sets[1] = cert.branch_sets[0].clone();
        let check = verify_certificate(&rs, &cert);
        assert!(!check.valid && check.problems[0].contains("overlap"));

        // a 3x3 block partition of the planar 6x6 grid
        let g = plane_grid(6, 6);
        let branch_sets: Vec<Vec<usize>> = (0..9)
            .map(|b| {
                let (bi, bj) = (b / 3, b % 3);
                (0..4).map(|t| (2 * bi + t / 2) * 6 + 2 * bj + t % 2).collect()
            })
            .collect();
        let connectors: Vec<usize> = (0..g.num_edges()).collect();
        let cert = GridMinorCertificate { p: 3, q: 3, branch_sets, connectors, verified: false };
        let check = verify_certificate(&g, &cert);
        assert!(!check.valid);
    }

    #[test]
    fn tex_report_formulas() {
        let r = tex_lower_bound(&torus_grid(3, 12), None).unwrap();
        assert_eq!((r.k, r.l, r.grid), (3, 12, None));
        assert!(!r.notes.is_empty());
        let r = tex_lower_bound(&torus_grid(10, 12), None).unwrap();
        assert_eq!((r.k, r.l, r.half_degree), (10, 12, 2));
        assert_eq!(r.grid, Some((6, 3)));
        assert_eq!(r.grid_tex, Some(18));
        let r = tex_lower_bound(&crate::fixtures::join(&torus_grid(3, 3), &torus_grid(3, 3)), None).unwrap();
        let h = r.half_degree as f64;
        let want = 2.0 / 7.0 / 4.0 / (h * h) * (r.k * r.k) as f64;
        assert!((r.genus_bound.unwrap() - want).abs() < 1e-12);
    }
}
