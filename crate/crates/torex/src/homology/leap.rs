use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use crate::cycle::EmbCycle;
use crate::embedding::{edge_of, mate, Dart, RotationSystem};
use crate::error::{Error, Result};

/// One connected component of `A ∩ B`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeapComponent {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    /// `A` and `B` cross here.
    pub leap: bool,
    /// `+1` when `B` crosses `A` from right to left, `-1` for left to right,
    /// `0` when they only touch.
    pub sign: i32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeapReport {
    pub components: Vec<LeapComponent>,
    pub leap_count: usize,
    /// Signed count of the leaps.
    pub algebraic: i64,
}

impl LeapReport {
    pub fn leap_flags(&self) -> Vec<bool> {
        self.components.iter().map(|c| c.leap).collect()
    }

    pub fn is_odd(&self) -> bool {
        self.leap_count % 2 == 1
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Entry and exit darts of `c` at the component with vertex set `vs` and
/// edge set `es`: `(in, out)`, both sitting at component vertices.
fn passage(rs: &RotationSystem, c: &[Dart], vs: &HashSet<usize>, es: &HashSet<usize>) -> (Dart, Dart) {
    let k = c.len();
    let i = (0..k)
        .find(|&i| vs.contains(&rs.tail(c[i])) && !es.contains(&edge_of(c[(i + k - 1) % k])))
        .expect("component is entered");
    let mut j = i;
    while es.contains(&edge_of(c[j % k])) {
        j += 1;
    }
    (mate(c[(i + k - 1) % k]), c[j % k])
}

/// Rotation around the vertex obtained by contracting the edges `es`.
fn merged_rotation(rs: &RotationSystem, start: usize, es: &HashSet<usize>) -> Vec<Dart> {
    fn walk(rs: &RotationSystem, v: usize, incoming: Option<Dart>, es: &HashSet<usize>, out: &mut Vec<Dart>) {
        let rot = rs.rotation(v);
        let k = rot.len();
        let s = incoming.map_or(0, |d| rot.iter().position(|&x| x == d).unwrap() + 1);
        for t in 0..k {
            let x = rot[(s + t) % k];
            if Some(x) == incoming {
                continue;
            }
            if es.contains(&edge_of(x)) {
                walk(rs, rs.head(x), Some(mate(x)), es, out);
            } else {
                out.push(x);
            }
        }
    }
    let mut out = Vec::new();
    walk(rs, start, None, es, &mut out);
    out
}

/// Components of `A ∩ B` and whether `A` and `B` cross at each.
pub fn leap_report(rs: &RotationSystem, a: &EmbCycle, b: &EmbCycle) -> Result<LeapReport> {
    let ea = a.edge_set();
    let eb = b.edge_set();
    if ea == eb {
        return Err(Error::NotACycle("leap report needs two distinct cycles".into()));
    }
    let va: HashSet<usize> = a.vertices(rs).into_iter().collect();
    let vb: HashSet<usize> = b.vertices(rs).into_iter().collect();
    let n = rs.num_vertices();
    let mut parent: Vec<usize> = (0..n).collect();
    let common_edges: Vec<usize> = {
        let mut v: Vec<usize> = ea.intersection(&eb).copied().collect();
        v.sort_unstable();
        v
    };
    for &e in &common_edges {
        let (x, y) = rs.endpoints(e);
        let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
        parent[rx] = ry;
    }
    let mut groups: BTreeMap<usize, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    let mut common_vertices: Vec<usize> = va.intersection(&vb).copied().collect();
    common_vertices.sort_unstable();
    for &v in &common_vertices {
        let r = find(&mut parent, v);
        groups.entry(r).or_default().0.push(v);
    }
    for &e in &common_edges {
        let r = find(&mut parent, rs.tail(2 * e));
        groups.entry(r).or_default().1.push(e);
    }
    let mut comps: Vec<(Vec<usize>, Vec<usize>)> = groups.into_values().collect();
    comps.sort();

    let mut components = Vec::with_capacity(comps.len());
    let mut leap_count = 0;
    let mut algebraic = 0i64;
    for (vertices, edges) in comps {
        let vs: HashSet<usize> = vertices.iter().copied().collect();
        let es: HashSet<usize> = edges.iter().copied().collect();
        let (a_in, a_out) = passage(rs, &a.darts, &vs, &es);
        let (b_in, b_out) = passage(rs, &b.darts, &vs, &es);
        let rot = merged_rotation(rs, vertices[0], &es);
        let pos = |d: Dart| rot.iter().position(|&x| x == d).expect("dart in merged rotation");
        let k = rot.len();
        let (pai, pao, pbi, pbo) = (pos(a_in), pos(a_out), pos(b_in), pos(b_out));
        // left of A: strictly ccw after a_out and before a_in
        let on_left = |p: usize| {
            let off = (p + k - pao) % k;
            off > 0 && off < (pai + k - pao) % k
        };
        let (li, lo) = (on_left(pbi), on_left(pbo));
        let leap = li != lo;
        let sign = match (li, lo) {
            (false, true) => 1,
            (true, false) => -1,
            _ => 0,
        };
        if leap {
            leap_count += 1;
            algebraic += sign as i64;
        }
        components.push(LeapComponent { vertices, edges, leap, sign });
    }
    Ok(LeapReport { components, leap_count, algebraic })
}
