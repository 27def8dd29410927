use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use super::{all_shortest_nonseparating, dart_sides, is_separating, leap_report, switching_ear_length};
use crate::cycle::{cycle_order_key, EmbCycle};
use crate::embedding::{edge_of, Dart, RotationSystem};
use crate::error::{Error, Result};

pub const DEFAULT_EXACT_CAP: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StretchMode {
    Exact,
    Bounds,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StretchResult {
    pub mode: StretchMode,
    pub lower: usize,
    pub upper: usize,
    /// `(A, B)` with `‖A‖ ≤ ‖B‖` and `‖A‖·‖B‖` equal to the exact value.
    pub witness: Option<(EmbCycle, EmbCycle)>,
    /// Whether the witness pair is in one-leap position (otherwise odd-leap).
    pub one_leaping: bool,
}

impl StretchResult {
    pub fn exact(&self) -> Option<usize> {
        (self.mode == StretchMode::Exact).then_some(self.lower)
    }
}

/// Parity weight of each edge with respect to crossing `a`: a closed walk
/// odd-leaps `a` iff its total weight is odd.
pub fn crossing_weights(rs: &RotationSystem, a: &EmbCycle) -> Vec<u8> {
    let side = dart_sides(rs, a);
    let bit = |d: Dart| (side[d] == Some(true)) as u8;
    (0..rs.num_edges()).map(|e| bit(2 * e) ^ bit(2 * e + 1)).collect()
}

/// Shortest closed walk of odd total weight through one of `starts`, if one
/// of length at most `limit` exists. The globally shortest such walk is a
/// simple cycle.
pub fn shortest_odd_cycle(
    rs: &RotationSystem,
    weights: &[u8],
    starts: &[usize],
    limit: usize,
) -> Option<EmbCycle> {
    let n = rs.num_vertices();
    let mut best: Option<Vec<Dart>> = None;
    let mut bound = limit;
    let mut dist = vec![usize::MAX; 2 * n];
    let mut pred: Vec<Dart> = vec![usize::MAX; 2 * n];
    let mut order: Vec<usize> = starts.to_vec();
    order.sort_unstable();
    order.dedup();
    for s in order {
        dist.iter_mut().for_each(|x| *x = usize::MAX);
        dist[2 * s] = 0;
        let target = 2 * s + 1;
        let mut queue = VecDeque::from([2 * s]);
        while let Some(st) = queue.pop_front() {
            if dist[st] >= bound || dist[target] != usize::MAX {
                break;
            }
            let (v, par) = (st / 2, st % 2);
            for &d in rs.rotation(v) {
                let w = rs.head(d);
                let nst = 2 * w + (par ^ weights[edge_of(d)] as usize);
                if dist[nst] == usize::MAX {
                    dist[nst] = dist[st] + 1;
                    pred[nst] = d;
                    queue.push_back(nst);
                }
            }
        }
        if dist[target] <= bound && dist[target] != usize::MAX {
            let mut darts = Vec::with_capacity(dist[target]);
            let mut st = target;
            while st != 2 * s || darts.is_empty() {
                let d = pred[st];
                darts.push(d);
                let v = rs.tail(d);
                st = 2 * v + ((st % 2) ^ weights[edge_of(d)] as usize);
            }
            darts.reverse();
            if best.as_ref().is_none_or(|b| darts.len() < b.len()) {
                bound = darts.len().saturating_sub(1);
                best = Some(darts);
            }
        }
    }
    best.map(|darts| EmbCycle { dual: false, darts })
}

/// All simple cycles of length at most `max_len`, in (length, key) order.
pub fn enumerate_cycles(rs: &RotationSystem, max_len: usize, cap: usize) -> Result<Vec<EmbCycle>> {
    struct Dfs<'a> {
        rs: &'a RotationSystem,
        s: usize,
        max_len: usize,
        cap: usize,
        dist: Vec<usize>,
        on_path: Vec<bool>,
        used: Vec<bool>,
        path: Vec<Dart>,
        seen: HashSet<Vec<usize>>,
        out: Vec<EmbCycle>,
    }
    impl Dfs<'_> {
        fn go(&mut self, v: usize) -> Result<()> {
            let rot: Vec<Dart> = self.rs.rotation(v).to_vec();
            for x in rot {
                let e = edge_of(x);
                if self.used[e] {
                    continue;
                }
                let w = self.rs.head(x);
                let len = self.path.len() + 1;
                if w == self.s {
                    self.path.push(x);
                    let c = EmbCycle { dual: false, darts: self.path.clone() };
                    if self.seen.insert(c.canonical_key()) {
                        self.out.push(c.canonical());
                        if self.out.len() > self.cap {
                            return Err(Error::TooLarge { cap: self.cap });
                        }
                    }
                    self.path.pop();
                } else if w > self.s
                    && !self.on_path[w]
                    && self.dist[w] != usize::MAX
                    && len + self.dist[w] <= self.max_len
                {
                    self.on_path[w] = true;
                    self.used[e] = true;
                    self.path.push(x);
                    self.go(w)?;
                    self.path.pop();
                    self.used[e] = false;
                    self.on_path[w] = false;
                }
            }
            Ok(())
        }
    }
    let n = rs.num_vertices();
    let mut dfs = Dfs {
        rs,
        s: 0,
        max_len,
        cap,
        dist: vec![usize::MAX; n],
        on_path: vec![false; n],
        used: vec![false; rs.num_edges()],
        path: Vec::new(),
        seen: HashSet::new(),
        out: Vec::new(),
    };
    for s in 0..n {
        // distances back to s through vertices >= s
        let mut dist = vec![usize::MAX; n];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &d in rs.rotation(v) {
                let w = rs.head(d);
                if w >= s && dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dfs.s = s;
        dfs.dist = dist;
        dfs.on_path[s] = true;
        dfs.go(s)?;
        dfs.on_path[s] = false;
    }
    let mut out = dfs.out;
    out.sort_by_cached_key(cycle_order_key);
    Ok(out)
}

/// Lower bound `ewn²` and the upper bound `‖C‖·(ℓ_C + ⌊‖C‖/2⌋)` minimised
/// over the shortest nonseparating cycles found.
pub fn stretch_bounds(rs: &RotationSystem) -> Result<StretchResult> {
    let shortest = all_shortest_nonseparating(rs)?;
    let k = shortest[0].len();
    let mut upper = usize::MAX;
    for c in &shortest {
        let l = switching_ear_length(rs, c)?;
        upper = upper.min(c.len() * (l + c.len() / 2));
    }
    Ok(StretchResult { mode: StretchMode::Bounds, lower: k * k, upper, witness: None, one_leaping: false })
}

fn isqrt(x: usize) -> usize {
    let mut r = (x as f64).sqrt() as usize;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

/// A simple cycle of length exactly `m` one-leaping `a`, by depth-first
/// search pruned with distances in the parity double cover.
fn one_leaping_partner(
    rs: &RotationSystem,
    a: &EmbCycle,
    weights: &[u8],
    m: usize,
    budget: &mut usize,
) -> Option<EmbCycle> {
    let n = rs.num_vertices();
    let mut starts = a.vertices(rs);
    starts.sort_unstable();
    for s in starts {
        let mut dist = vec![usize::MAX; 2 * n];
        dist[2 * s + 1] = 0;
        let mut queue = VecDeque::from([2 * s + 1]);
        while let Some(st) = queue.pop_front() {
            let (v, par) = (st / 2, st % 2);
            for &d in rs.rotation(v) {
                let nst = 2 * rs.head(d) + (par ^ weights[edge_of(d)] as usize);
                if dist[nst] == usize::MAX {
                    dist[nst] = dist[st] + 1;
                    queue.push_back(nst);
                }
            }
        }
        let mut on_path = vec![false; n];
        on_path[s] = true;
        let mut path = Vec::new();
        #[allow(clippy::too_many_arguments)]
        fn go(
            rs: &RotationSystem,
            a: &EmbCycle,
            weights: &[u8],
            s: usize,
            m: usize,
            v: usize,
            par: usize,
            dist: &[usize],
            on_path: &mut [bool],
            path: &mut Vec<Dart>,
            budget: &mut usize,
        ) -> Option<EmbCycle> {
            if *budget == 0 {
                return None;
            }
            *budget -= 1;
            for &x in rs.rotation(v) {
                let w = rs.head(x);
                let np = par ^ weights[edge_of(x)] as usize;
                let len = path.len() + 1;
                if path.last().is_some_and(|&l| edge_of(l) == edge_of(x)) {
                    continue;
                }
                if w == s {
                    if len == m && np == 1 {
                        path.push(x);
                        let c = EmbCycle { dual: false, darts: path.clone() };
                        path.pop();
                        if let Ok(rep) = leap_report(rs, a, &c) {
                            if rep.leap_count == 1 {
                                return Some(c);
                            }
                        }
                    }
                } else if !on_path[w] && dist[2 * w + np] != usize::MAX && len + dist[2 * w + np] <= m {
                    on_path[w] = true;
                    path.push(x);
                    let r = go(rs, a, weights, s, m, w, np, dist, on_path, path, budget);
                    path.pop();
                    on_path[w] = false;
                    if r.is_some() {
                        return r;
                    }
                }
            }
            None
        }
        if let Some(c) = go(rs, a, weights, s, m, s, 0, &dist, &mut on_path, &mut path, budget) {
            return Some(c);
        }
    }
    None
}

/// Exact stretch: minimum of `‖A‖·‖B‖` over odd-leaping pairs of cycles.
/// Every candidate `A` with `‖A‖² ≤` the current bound is enumerated and
/// paired with its shortest odd-leaping partner.
pub fn stretch_exact(rs: &RotationSystem, cap: usize) -> Result<StretchResult> {
    let bounds = stretch_bounds(rs)?;
    let mut start: Option<(EmbCycle, EmbCycle)> = None;
    for a in all_shortest_nonseparating(rs)? {
        let w = crossing_weights(rs, &a);
        let b = shortest_odd_cycle(rs, &w, &a.vertices(rs), usize::MAX)
            .ok_or_else(|| Error::Invariant("nonseparating cycle without odd partner".into()))?;
        if start.as_ref().is_none_or(|(x, y)| a.len() * b.len() < x.len() * y.len()) {
            start = Some((a, b));
        }
    }
    let mut witness = start.expect("at least one shortest cycle");
    let mut best = witness.0.len() * witness.1.len();
    if best > bounds.upper {
        return Err(Error::Invariant(format!(
            "odd partner product {best} exceeds the upper bound {}",
            bounds.upper
        )));
    }
    let cycles = enumerate_cycles(rs, isqrt(best), cap)?;
    let mut ties: Vec<EmbCycle> = Vec::new();
    for a in cycles {
        let la = a.len();
        if la * la > best {
            break;
        }
        if is_separating(rs, &a) {
            continue;
        }
        let w = crossing_weights(rs, &a);
        let Some(b) = shortest_odd_cycle(rs, &w, &a.vertices(rs), best / la) else {
            continue;
        };
        let prod = la * b.len();
        if prod < best {
            best = prod;
            witness = (a.clone(), b);
            ties.clear();
        }
        if prod == best {
            ties.push(a);
        }
    }
    let mut one = leap_report(rs, &witness.0, &witness.1).map(|r| r.leap_count == 1).unwrap_or(false);
    if !one {
        let mut budget = cap.max(1000);
        for a in &ties {
            let m = best / a.len();
            let w = crossing_weights(rs, a);
            if let Some(b) = one_leaping_partner(rs, a, &w, m, &mut budget) {
                witness = (a.clone(), b);
                one = true;
                break;
            }
        }
    }
    let (a, b) = witness;
    let (a, b) = if a.len() <= b.len() { (a.canonical(), b.canonical()) } else { (b.canonical(), a.canonical()) };
    Ok(StretchResult {
        mode: StretchMode::Exact,
        lower: best,
        upper: best,
        witness: Some((a, b)),
        one_leaping: one,
    })
}

/// Brute-force reference: minima over all pairs of simple cycles of length
/// at most `max_len`, by leap counting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruteStretch {
    pub odd_min: Option<usize>,
    pub one_min: Option<usize>,
    pub one_pair: Option<(EmbCycle, EmbCycle)>,
}

pub fn brute_force_stretch(rs: &RotationSystem, max_len: usize, cap: usize) -> Result<BruteStretch> {
    let cycles = enumerate_cycles(rs, max_len, cap)?;
    let mut odd = usize::MAX;
    let mut one = usize::MAX;
    let mut one_pair = None;
    for i in 0..cycles.len() {
        let li = cycles[i].len();
        if li * li >= odd && li * li >= one {
            break;
        }
        for j in i + 1..cycles.len() {
            let prod = li * cycles[j].len();
            if prod >= odd && prod >= one {
                break;
            }
            let rep = leap_report(rs, &cycles[i], &cycles[j])?;
            if rep.is_odd() && prod < odd {
                odd = prod;
            }
            if rep.leap_count == 1 && prod < one {
                one = prod;
                one_pair = Some((cycles[i].clone(), cycles[j].clone()));
            }
        }
    }
    let opt = |x: usize| (x != usize::MAX).then_some(x);
    Ok(BruteStretch { odd_min: opt(odd), one_min: opt(one), one_pair })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CrossingLb {
    pub value: usize,
    /// The value is the exact crossing number rather than a lower bound.
    pub exact: bool,
}

/// Crossing number of `C_p x C_q`: exact `(p-2)q` for `min(p,q) ∈ {3,4,5}`,
/// otherwise the lower bound `⌈(p-2)q/2⌉`.
pub fn crossing_lb_from_tex(p: usize, q: usize) -> Result<CrossingLb> {
    if p < 3 || q < 3 {
        return Err(Error::pre("toroidal grid crossing number", "p, q >= 3"));
    }
    let (p, q) = (p.min(q), p.max(q));
    if p <= 5 {
        Ok(CrossingLb { value: (p - 2) * q, exact: true })
    } else {
        Ok(CrossingLb { value: ((p - 2) * q).div_ceil(2), exact: false })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{one_vertex, torus_grid};

    #[test]
    fn torus_grid_stretch_is_pq() {
        for p in 3..=5 {
            for q in p..=5 {
                let rs = torus_grid(p, q);
                let s = stretch_exact(&rs, DEFAULT_EXACT_CAP).unwrap();
                assert_eq!(s.exact(), Some(p * q), "TG({p},{q})");
                let (a, b) = s.witness.unwrap();
                assert_eq!((a.len(), b.len()), (p, q));
                assert!(s.one_leaping);
            }
        }
    }

    #[test]
    fn bounds_on_tg35() {
        let s = stretch_bounds(&torus_grid(3, 5)).unwrap();
        assert_eq!((s.lower, s.upper), (9, 18));
    }

    #[test]
    fn one_vertex_torus_stretch() {
        let rs = one_vertex(&[0, 2, 1, 3]);
        let s = stretch_exact(&rs, DEFAULT_EXACT_CAP).unwrap();
        assert_eq!(s.exact(), Some(1));
        assert!(s.one_leaping);
    }

    #[test]
    fn brute_force_agrees_on_grids() {
        let rs = torus_grid(3, 4);
        let b = brute_force_stretch(&rs, 12, DEFAULT_EXACT_CAP).unwrap();
        assert_eq!((b.odd_min, b.one_min), (Some(12), Some(12)));
    }

    #[test]
    fn exact_matches_brute_force_on_random_systems() {
        for seed in 0..200 {
            let rs = crate::fixtures::random_with_genus(16, 1 + (seed % 2) as usize, seed);
            let s = stretch_exact(&rs, DEFAULT_EXACT_CAP).unwrap();
            let b = brute_force_stretch(&rs, rs.num_vertices(), DEFAULT_EXACT_CAP).unwrap();
            assert_eq!(s.exact(), b.odd_min, "seed {seed}\n{rs}");
            assert_eq!(b.one_min, b.odd_min, "seed {seed}");
            assert!(s.lower >= stretch_bounds(&rs).unwrap().lower);
            assert!(s.one_leaping, "seed {seed}");
        }
    }

    #[test]
    fn cycle_enumeration_counts() {
        // the triangle with a loop: the triangle and the loop
        let rs = crate::fixtures::plane_cycle(3);
        assert_eq!(enumerate_cycles(&rs, 3, 100).unwrap().len(), 1);
        assert!(matches!(
            enumerate_cycles(&torus_grid(4, 4), 8, 10),
            Err(Error::TooLarge { cap: 10 })
        ));
    }

    #[test]
    fn crossing_numbers_of_grids() {
        assert_eq!(crossing_lb_from_tex(3, 6).unwrap(), CrossingLb { value: 6, exact: true });
        assert_eq!(crossing_lb_from_tex(5, 7).unwrap(), CrossingLb { value: 21, exact: true });
        assert_eq!(crossing_lb_from_tex(6, 6).unwrap(), CrossingLb { value: 12, exact: false });
        assert!(crossing_lb_from_tex(2, 6).is_err());
    }
}
