//! Rotation systems: cellular embeddings of multigraphs on orientable surfaces.
//!
//! Edge `e` owns darts `2e` (at its tail) and `2e + 1` (at its head). The
//! rotation of a vertex lists its darts in counterclockwise order. Faces are
//! the orbits of `phi(d) = sigma(mate(d))`; the face of a dart lies to its right.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};

pub type Dart = usize;

#[inline]
pub fn mate(d: Dart) -> Dart {
    d ^ 1
}

#[inline]
pub fn edge_of(d: Dart) -> usize {
    d >> 1
}

pub const HEADER: &str = "torex-embedding v1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationSystem {
    rotations: Vec<Vec<Dart>>,
    sigma: Vec<Dart>,
    sigma_inv: Vec<Dart>,
    vertex_of: Vec<usize>,
    faces: Vec<Vec<Dart>>,
    face_of: Vec<usize>,
}

impl RotationSystem {
    /// Builds and validates a rotation system from per-vertex ccw dart lists.
    pub fn new(rotations: Vec<Vec<Dart>>, num_edges: usize) -> Result<Self> {
        if num_edges == 0 {
            return Err(Error::Empty);
        }
        let nd = 2 * num_edges;
        let mut vertex_of = vec![usize::MAX; nd];
        for (v, rot) in rotations.iter().enumerate() {
            for &d in rot {
                if d >= nd {
                    return Err(Error::DartOutOfRange { dart: d, limit: nd });
                }
                if vertex_of[d] != usize::MAX {
                    return Err(Error::DuplicateDart(d));
                }
                vertex_of[d] = v;
            }
        }
        if let Some(d) = vertex_of.iter().position(|&v| v == usize::MAX) {
            return Err(Error::MissingDart(d));
        }
        let rs = Self::build(rotations, vertex_of);
        if !rs.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(rs)
    }

    fn build(rotations: Vec<Vec<Dart>>, vertex_of: Vec<usize>) -> Self {
        let nd = vertex_of.len();
        let mut sigma = vec![0; nd];
        let mut sigma_inv = vec![0; nd];
        for rot in &rotations {
            for (i, &d) in rot.iter().enumerate() {
                let nx = rot[(i + 1) % rot.len()];
                sigma[d] = nx;
                sigma_inv[nx] = d;
            }
        }
        let mut face_of = vec![usize::MAX; nd];
        let mut faces = Vec::new();
        for start in 0..nd {
            if face_of[start] != usize::MAX {
                continue;
            }
            let id = faces.len();
            let mut walk = Vec::new();
            let mut d = start;
            loop {
                face_of[d] = id;
                walk.push(d);
                d = sigma[mate(d)];
                if d == start {
                    break;
                }
            }
            faces.push(walk);
        }
        RotationSystem { rotations, sigma, sigma_inv, vertex_of, faces, face_of }
    }

    fn is_connected(&self) -> bool {
        let n = self.num_vertices();
        if self.rotations.iter().any(|r| r.is_empty()) {
            return false;
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &d in &self.rotations[v] {
                let w = self.vertex_of[mate(d)];
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == n
    }

    pub fn num_vertices(&self) -> usize {
        self.rotations.len()
    }

    pub fn num_edges(&self) -> usize {
        self.vertex_of.len() / 2
    }

    pub fn num_darts(&self) -> usize {
        self.vertex_of.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn rotation(&self, v: usize) -> &[Dart] {
        &self.rotations[v]
    }

    pub fn rotations(&self) -> &[Vec<Dart>] {
        &self.rotations
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rotations[v].len()
    }

    pub fn sigma(&self, d: Dart) -> Dart {
        self.sigma[d]
    }

    pub fn sigma_inv(&self, d: Dart) -> Dart {
        self.sigma_inv[d]
    }

    pub fn phi(&self, d: Dart) -> Dart {
        self.sigma[mate(d)]
    }

    /// Vertex at which dart `d` sits (its tail).
    pub fn vertex_of(&self, d: Dart) -> usize {
        self.vertex_of[d]
    }

    pub fn tail(&self, d: Dart) -> usize {
        self.vertex_of[d]
    }

    pub fn head(&self, d: Dart) -> usize {
        self.vertex_of[mate(d)]
    }

    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        (self.vertex_of[2 * e], self.vertex_of[2 * e + 1])
    }

    pub fn faces(&self) -> &[Vec<Dart>] {
        &self.faces
    }

    /// Face to the right of dart `d`.
    pub fn face_of(&self, d: Dart) -> usize {
        self.face_of[d]
    }

    /// Face containing the corner between `x` and `sigma(x)`.
    pub fn corner_face(&self, x: Dart) -> usize {
        self.face_of[self.sigma[x]]
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.num_edges() as i64 + self.num_faces() as i64
    }

    pub fn genus(&self) -> usize {
        let twice = 2 - self.euler_characteristic();
        debug_assert!(twice >= 0 && twice % 2 == 0);
        (twice / 2) as usize
    }

    pub fn max_degree(&self) -> usize {
        self.rotations.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `floor(max_degree / 2)`, at least 1.
    pub fn half_degree(&self) -> usize {
        (self.max_degree() / 2).max(1)
    }

    /// Topological dual. Face `i` becomes vertex `i`; dart ids are kept, so
    /// the dual rotation is `phi` and `dual(dual(rs))` has the original sigma.
    pub fn dual(&self) -> RotationSystem {
        let rotations = self.faces.clone();
        let vertex_of = self.face_of.clone();
        Self::build(rotations, vertex_of)
    }

    /// Vertex-face incidence graph, embedded on the same surface. Edge `x`
    /// stands for the corner `(x, sigma(x))`; dart `2x` sits at the vertex,
    /// dart `2x + 1` at face vertex `V + corner_face(x)`.
    pub fn vertex_face_incidence(&self) -> RotationSystem {
        let n = self.num_vertices();
        let mut rotations: Vec<Vec<Dart>> = Vec::with_capacity(n + self.num_faces());
        for rot in &self.rotations {
            rotations.push(rot.iter().map(|&x| 2 * x).collect());
        }
        for walk in &self.faces {
            // corners of this face, in reverse walk order
            let mut rot: Vec<Dart> = walk.iter().map(|&d| 2 * mate(d) + 1).collect();
            rot.reverse();
            rotations.push(rot);
        }
        let mut vertex_of = vec![0; 2 * self.num_darts()];
        for (v, rot) in rotations.iter().enumerate() {
            for &d in rot {
                vertex_of[d] = v;
            }
        }
        Self::build(rotations, vertex_of)
    }

    /// Same embedding seen from the other side of the surface.
    pub fn mirror(&self) -> RotationSystem {
        let rotations = self
            .rotations
            .iter()
            .map(|r| r.iter().rev().copied().collect())
            .collect();
        Self::build(rotations, self.vertex_of.clone())
    }

    /// Orientation-preserving map isomorphism onto `other`, as a dart map.
    pub fn isomorphism_to(&self, other: &RotationSystem) -> Option<Vec<Dart>> {
        if self.num_vertices() != other.num_vertices()
            || self.num_edges() != other.num_edges()
            || self.num_faces() != other.num_faces()
        {
            return None;
        }
        let nd = self.num_darts();
        'target: for t in 0..nd {
            if other.degree(other.vertex_of(t)) != self.degree(self.vertex_of(0)) {
                continue;
            }
            let mut map = vec![usize::MAX; nd];
            let mut used = vec![false; nd];
            map[0] = t;
            used[t] = true;
            let mut stack = vec![0usize];
            while let Some(d) = stack.pop() {
                let img = map[d];
                for (nd_, ni) in [
                    (self.sigma[d], other.sigma[img]),
                    (mate(d), mate(img)),
                ] {
                    if map[nd_] == usize::MAX {
                        if used[ni] {
                            continue 'target;
                        }
                        map[nd_] = ni;
                        used[ni] = true;
                        stack.push(nd_);
                    } else if map[nd_] != ni {
                        continue 'target;
                    }
                }
            }
            return Some(map);
        }
        None
    }

    /// Isomorphic as embeddings, allowing a reflection.
    pub fn is_isomorphic(&self, other: &RotationSystem) -> bool {
        self.isomorphism_to(other).is_some() || self.isomorphism_to(&other.mirror()).is_some()
    }

    /// Breadth-first distances from `src`.
    pub fn bfs_distances(&self, src: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.num_vertices()];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            for &d in &self.rotations[v] {
                let w = self.head(d);
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse(text)
    }

    pub fn serialize(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for RotationSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{HEADER}")?;
        writeln!(f, "V {}", self.num_vertices())?;
        writeln!(f, "E {}", self.num_edges())?;
        for (v, rot) in self.rotations.iter().enumerate() {
            write!(f, "R {v}:")?;
            for d in rot {
                write!(f, " {d}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Syntax { line, col, msg: msg.into() }
}

fn parse_count(line_no: usize, line: &str, key: &str) -> Result<usize> {
    let rest = line
        .strip_prefix(key)
        .ok_or_else(|| syntax(line_no, 1, format!("expected `{key} <count>`")))?;
    let t = rest.trim();
    let col = line.len() - rest.trim_start().len() + 1;
    t.parse().map_err(|_| syntax(line_no, col, format!("invalid count `{t}`")))
}

/// Parses the `torex-embedding v1` text format.
pub fn parse(text: &str) -> Result<RotationSystem> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end()))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));

    let (ln, header) = lines.next().ok_or_else(|| syntax(1, 1, "empty input"))?;
    if header.trim() != HEADER {
        return Err(syntax(ln, 1, format!("expected header `{HEADER}`")));
    }
    let (ln, l) = lines.next().ok_or_else(|| syntax(ln + 1, 1, "missing `V` line"))?;
    let n = parse_count(ln, l.trim_start(), "V ")?;
    let (ln, l) = lines.next().ok_or_else(|| syntax(ln + 1, 1, "missing `E` line"))?;
    let m = parse_count(ln, l.trim_start(), "E ")?;

    let mut rotations: Vec<Option<Vec<Dart>>> = vec![None; n];
    for (ln, l) in lines {
        let body = l
            .trim_start()
            .strip_prefix("R ")
            .ok_or_else(|| syntax(ln, 1, "expected `R <vertex>: <darts>`"))?;
        let colon = body
            .find(':')
            .ok_or_else(|| syntax(ln, l.len(), "missing `:`"))?;
        let vtxt = body[..colon].trim();
        let v: usize = vtxt
            .parse()
            .map_err(|_| syntax(ln, 3, format!("invalid vertex id `{vtxt}`")))?;
        if v >= n {
            return Err(syntax(ln, 3, format!("vertex {v} out of range (V = {n})")));
        }
        if rotations[v].is_some() {
            return Err(Error::DuplicateVertex(v));
        }
        let offset = l.len() - body.len() + colon + 1;
        let mut rot = Vec::new();
        let rest = &body[colon + 1..];
        let mut pos = 0;
        for tok in rest.split_whitespace() {
            let at = rest[pos..].find(tok).unwrap() + pos;
            pos = at + tok.len();
            let d: usize = tok
                .parse()
                .map_err(|_| syntax(ln, offset + at + 1, format!("invalid dart `{tok}`")))?;
            rot.push(d);
        }
        rotations[v] = Some(rot);
    }
    let rotations = rotations
        .into_iter()
        .enumerate()
        .map(|(v, r)| r.ok_or(Error::MissingVertex(v)))
        .collect::<Result<Vec<_>>>()?;
    RotationSystem::new(rotations, m)
}
