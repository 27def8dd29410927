//! Simple cycles in an embedded graph or its dual, stored as oriented dart walks.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::embedding::{edge_of, mate, Dart, RotationSystem};
use crate::error::{Error, Result};

/// A simple closed walk. For `dual == true` the darts form a cycle of the
/// dual graph, which shares dart ids with the primal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EmbCycle {
    pub dual: bool,
    pub darts: Vec<Dart>,
}

impl EmbCycle {
    /// Validates `darts` as a simple cycle of `host`.
    pub fn from_darts(host: &RotationSystem, darts: Vec<Dart>, dual: bool) -> Result<Self> {
        check_simple_walk(host, &darts)?;
        Ok(EmbCycle { dual, darts })
    }

    /// Orients an edge list as a walk; the first edge decides the direction.
    pub fn from_edges(host: &RotationSystem, edges: &[usize], dual: bool) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::NotACycle("empty edge list".into()));
        }
        let mut last_err = None;
        for first in [2 * edges[0], 2 * edges[0] + 1] {
            match orient(host, edges, first) {
                Ok(darts) => match check_simple_walk(host, &darts) {
                    Ok(()) => return Ok(EmbCycle { dual, darts }),
                    Err(e) => last_err = Some(e),
                },
                Err(e) => last_err = Some(e),
            }
        }
        Err(last_err.unwrap())
    }

    pub fn len(&self) -> usize {
        self.darts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.darts.is_empty()
    }

    pub fn edges(&self) -> Vec<usize> {
        self.darts.iter().map(|&d| edge_of(d)).collect()
    }

    pub fn edge_set(&self) -> HashSet<usize> {
        self.darts.iter().map(|&d| edge_of(d)).collect()
    }

    /// Vertices visited, `vertices()[i]` being the tail of `darts[i]`.
    pub fn vertices(&self, host: &RotationSystem) -> Vec<usize> {
        self.darts.iter().map(|&d| host.tail(d)).collect()
    }

    pub fn reversed(&self) -> EmbCycle {
        EmbCycle { dual: self.dual, darts: self.darts.iter().rev().map(|&d| mate(d)).collect() }
    }

    /// Edge sequence rotated to its minimum edge, read in the direction that
    /// is lexicographically smaller.
    pub fn canonical_key(&self) -> Vec<usize> {
        canonical_edges(&self.edges())
    }

    /// Same cycle, re-oriented and rotated to the canonical key order.
    pub fn canonical(&self) -> EmbCycle {
        let k = self.darts.len();
        let edges = self.edges();
        let start = (0..k).min_by_key(|&i| edges[i]).unwrap();
        let fwd: Vec<Dart> = (0..k).map(|i| self.darts[(start + i) % k]).collect();
        let rev = EmbCycle { dual: self.dual, darts: fwd.clone() }.reversed();
        let rk = rev.darts.len();
        let rstart = (0..rk).min_by_key(|&i| edge_of(rev.darts[i])).unwrap();
        let bwd: Vec<Dart> = (0..rk).map(|i| rev.darts[(rstart + i) % rk]).collect();
        let fe: Vec<usize> = fwd.iter().map(|&d| edge_of(d)).collect();
        let be: Vec<usize> = bwd.iter().map(|&d| edge_of(d)).collect();
        let darts = if fe < be || (fe == be && fwd[0] % 2 == 0) { fwd } else { bwd };
        EmbCycle { dual: self.dual, darts }
    }

    /// `C: e1 e2 ...` or `DC: e1 e2 ...`.
    pub fn literal(&self) -> String {
        let mut s = String::from(if self.dual { "DC:" } else { "C:" });
        for e in self.edges() {
            s.push(' ');
            s.push_str(&e.to_string());
        }
        s
    }
}

impl fmt::Display for EmbCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.literal())
    }
}

/// Total order used for deterministic tie-breaking: length, then key.
pub fn cycle_order_key(c: &EmbCycle) -> (usize, Vec<usize>) {
    (c.len(), c.canonical_key())
}

pub fn canonical_edges(edges: &[usize]) -> Vec<usize> {
    let k = edges.len();
    if k == 0 {
        return Vec::new();
    }
    let start = (0..k).min_by_key(|&i| edges[i]).unwrap();
    let fwd: Vec<usize> = (0..k).map(|i| edges[(start + i) % k]).collect();
    let bwd: Vec<usize> = (0..k).map(|i| edges[(start + k - i) % k]).collect();
    fwd.min(bwd)
}

/// Parses a cycle literal into (is_dual, edge ids).
pub fn parse_literal(s: &str) -> Result<(bool, Vec<usize>)> {
    let s = s.trim();
    let (dual, rest) = if let Some(r) = s.strip_prefix("DC:") {
        (true, r)
    } else if let Some(r) = s.strip_prefix("C:") {
        (false, r)
    } else {
        return Err(Error::Syntax { line: 1, col: 1, msg: "expected `C:` or `DC:`".into() });
    };
    let mut edges = Vec::new();
    for tok in rest.split_whitespace() {
        let e = tok.parse().map_err(|_| Error::Syntax {
            line: 1,
            col: s.find(tok).unwrap_or(0) + 1,
            msg: format!("invalid edge id `{tok}`"),
        })?;
        edges.push(e);
    }
    Ok((dual, edges))
}

fn orient(host: &RotationSystem, edges: &[usize], first: Dart) -> Result<Vec<Dart>> {
    let m = host.num_edges();
    if let Some(&e) = edges.iter().find(|&&e| e >= m) {
        return Err(Error::NotACycle(format!("edge {e} out of range")));
    }
    let mut darts = vec![first];
    let mut at = host.head(first);
    for &e in &edges[1..] {
        let d = if host.tail(2 * e) == at {
            2 * e
        } else if host.tail(2 * e + 1) == at {
            2 * e + 1
        } else {
            return Err(Error::NotACycle(format!("edge {e} does not continue the walk")));
        };
        darts.push(d);
        at = host.head(d);
    }
    Ok(darts)
}

fn check_simple_walk(host: &RotationSystem, darts: &[Dart]) -> Result<()> {
    if darts.is_empty() {
        return Err(Error::NotACycle("empty walk".into()));
    }
    let k = darts.len();
    if let Some(&d) = darts.iter().find(|&&d| d >= host.num_darts()) {
        return Err(Error::NotACycle(format!("dart {d} out of range")));
    }
    for i in 0..k {
        if host.head(darts[i]) != host.tail(darts[(i + 1) % k]) {
            return Err(Error::NotACycle(format!(
                "dart {} does not meet dart {}",
                darts[i],
                darts[(i + 1) % k]
            )));
        }
    }
    let mut seen = HashSet::new();
    let mut edges = HashSet::new();
    for &d in darts {
        if !seen.insert(host.tail(d)) || !edges.insert(edge_of(d)) {
            return Err(Error::NotSimple);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{one_vertex, tg_column, tg_row, torus_grid};

    #[test]
    fn orient_columns_and_rows() {
        let rs = torus_grid(3, 5);
        let c = EmbCycle::from_edges(&rs, &tg_column(3, 5, 2), false).unwrap();
        assert_eq!(c.len(), 3);
        let r = EmbCycle::from_edges(&rs, &tg_row(5, 1), false).unwrap();
        assert_eq!(r.len(), 5);
        assert!(EmbCycle::from_edges(&rs, &[0, 2], false).is_err());
    }

    #[test]
    fn canonical_form_is_orientation_free() {
        let rs = torus_grid(3, 5);
        let c = EmbCycle::from_edges(&rs, &tg_row(5, 1), false).unwrap();
        let r = c.reversed();
        assert_eq!(c.canonical_key(), r.canonical_key());
        assert_eq!(c.canonical(), r.canonical());
        let lp = one_vertex(&[0, 2, 1, 3]);
        let a = EmbCycle::from_darts(&lp, vec![1], false).unwrap();
        assert_eq!(a.canonical().darts, vec![0]);
    }

    #[test]
    fn literal_round_trip() {
        let (dual, edges) = parse_literal("DC: 4 7 9").unwrap();
        assert!(dual);
        assert_eq!(edges, vec![4, 7, 9]);
        let rs = torus_grid(3, 3);
        let c = EmbCycle::from_edges(&rs, &tg_column(3, 3, 0), false).unwrap();
        let (d2, e2) = parse_literal(&c.literal()).unwrap();
        assert!(!d2);
        assert_eq!(e2, c.edges());
        assert!(parse_literal("X: 1").is_err());
    }
}
