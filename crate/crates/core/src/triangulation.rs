//! Simplicial triangulations of the 2-sphere given as face lists, their
//! validation, and the rotation system induced by a consistent orientation.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A simplicial triangulation of the sphere on vertices `0..num_vertices`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triangulation {
    pub num_vertices: usize,
    pub faces: Vec<[usize; 3]>,
}

/// First violated triangulation invariant, with a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TriangulationViolation {
    TooFewVertices {
        n: usize,
    },
    VertexOutOfRange {
        face: usize,
        vertex: usize,
    },
    RepeatedVertex {
        face: usize,
    },
    DuplicateFace {
        first: usize,
        second: usize,
    },
    /// The edge `(i, j)` lies in only one face.
    EdgeInOneFace(usize, usize),
    EdgeInManyFaces {
        edge: (usize, usize),
        faces: usize,
    },
    UnusedVertex(usize),
    LinkNotCycle(usize),
    EulerCharacteristic {
        n: usize,
        m: usize,
        f: usize,
    },
    Disconnected(usize),
}

impl fmt::Display for TriangulationViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use TriangulationViolation::*;
        match self {
            TooFewVertices { n } => write!(f, "too few vertices: {n} < 4"),
            VertexOutOfRange { face, vertex } => {
                write!(f, "vertex out of range: {vertex} in face {face}")
            }
            RepeatedVertex { face } => write!(f, "repeated vertex in face {face}"),
            DuplicateFace { first, second } => {
                write!(f, "duplicate face: faces {first} and {second}")
            }
            EdgeInOneFace(i, j) => write!(f, "edge in one face: ({i}, {j})"),
            EdgeInManyFaces { edge, faces } => {
                write!(f, "edge in {faces} faces: ({}, {})", edge.0, edge.1)
            }
            UnusedVertex(v) => write!(f, "vertex {v} lies in no face"),
            LinkNotCycle(v) => write!(f, "link of vertex {v} is not a single cycle"),
            EulerCharacteristic { n, m, f: faces } => {
                write!(f, "euler characteristic {n} - {m} + {faces} != 2")
            }
            Disconnected(v) => write!(f, "graph disconnected: vertex {v} unreachable from 0"),
        }
    }
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Checks every triangulation invariant and reports the first violation.
pub fn validate_triangulation(
    t: &Triangulation,
) -> std::result::Result<(), TriangulationViolation> {
    use TriangulationViolation::*;
    let n = t.num_vertices;
    if n < 4 {
        return Err(TooFewVertices { n });
    }
    let mut seen: HashMap<[usize; 3], usize> = HashMap::new();
    for (fi, face) in t.faces.iter().enumerate() {
        if let Some(&v) = face.iter().find(|&&v| v >= n) {
            return Err(VertexOutOfRange {
                face: fi,
                vertex: v,
            });
        }
        if face[0] == face[1] || face[1] == face[2] || face[0] == face[2] {
            return Err(RepeatedVertex { face: fi });
        }
        let mut key = *face;
        key.sort_unstable();
        if let Some(&first) = seen.get(&key) {
            return Err(DuplicateFace { first, second: fi });
        }
        seen.insert(key, fi);
    }

    let counts = edge_face_counts(&t.faces);
    for (&edge, &c) in &counts {
        match c {
            2 => {}
            1 => return Err(EdgeInOneFace(edge.0, edge.1)),
            _ => return Err(EdgeInManyFaces { edge, faces: c }),
        }
    }

    let mut link: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for face in &t.faces {
        for k in 0..3 {
            link[face[k]].push((face[(k + 1) % 3], face[(k + 2) % 3]));
        }
    }
    for (v, edges) in link.iter().enumerate() {
        if edges.is_empty() {
            return Err(UnusedVertex(v));
        }
        if !is_single_cycle(edges) {
            return Err(LinkNotCycle(v));
        }
    }

    let (m, f) = (counts.len(), t.faces.len());
    if n + f != m + 2 {
        return Err(EulerCharacteristic { n, m, f });
    }

    let adj = adjacency(n, counts.keys().copied());
    let mut reached = vec![false; n];
    let mut queue = VecDeque::from([0]);
    reached[0] = true;
    while let Some(v) = queue.pop_front() {
        for &u in &adj[v] {
            if !reached[u] {
                reached[u] = true;
                queue.push_back(u);
            }
        }
    }
    if let Some(v) = reached.iter().position(|r| !r) {
        return Err(Disconnected(v));
    }
    Ok(())
}

fn edge_face_counts(faces: &[[usize; 3]]) -> BTreeMap<(usize, usize), usize> {
    let mut counts = BTreeMap::new();
    for face in faces {
        for k in 0..3 {
            *counts
                .entry(edge_key(face[k], face[(k + 1) % 3]))
                .or_insert(0) += 1;
        }
    }
    counts
}

fn adjacency(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for (a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    adj
}

// Undirected link edges form one cycle through all their vertices.
fn is_single_cycle(edges: &[(usize, usize)]) -> bool {
    let mut nbrs: HashMap<usize, Vec<usize>> = HashMap::new();
    for &(a, b) in edges {
        nbrs.entry(a).or_default().push(b);
        nbrs.entry(b).or_default().push(a);
    }
    if nbrs.values().any(|v| v.len() != 2) {
        return false;
    }
    let start = edges[0].0;
    let (mut prev, mut cur) = (start, nbrs[&start][0]);
    let mut visited = 1;
    while cur != start {
        let next = if nbrs[&cur][0] == prev {
            nbrs[&cur][1]
        } else {
            nbrs[&cur][0]
        };
        prev = cur;
        cur = next;
        visited += 1;
        if visited > nbrs.len() {
            return false;
        }
    }
    visited == nbrs.len()
}

/// Consistently oriented faces and the cyclic neighbor order at each vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotationSystem {
    /// Faces reoriented so that every directed edge appears exactly once; the
    /// first face keeps its listed order.
    pub oriented_faces: Vec<[usize; 3]>,
    /// For each vertex, its neighbors in cyclic order, starting from the
    /// smallest neighbor.
    pub cycles: Vec<Vec<usize>>,
}

impl RotationSystem {
    /// Neighbors of `v` in cyclic order.
    pub fn cycle(&self, v: usize) -> &[usize] {
        &self.cycles[v]
    }

    /// The same system with every cyclic order reversed.
    pub fn mirrored(&self) -> RotationSystem {
        RotationSystem {
            oriented_faces: self
                .oriented_faces
                .iter()
                .map(|&[a, b, c]| [a, c, b])
                .collect(),
            cycles: self
                .cycles
                .iter()
                .map(|c| {
                    let mut r = c.clone();
                    r[1..].reverse();
                    r
                })
                .collect(),
        }
    }
}

/// Orients all faces by breadth-first search over face adjacency, then reads
/// off each vertex's neighbors in cyclic order.
pub fn rotation_system(t: &Triangulation) -> Result<RotationSystem> {
    validate_triangulation(t).map_err(Error::InvalidTriangulation)?;
    let faces = &t.faces;
    let mut by_edge: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (fi, f) in faces.iter().enumerate() {
        for k in 0..3 {
            by_edge
                .entry(edge_key(f[k], f[(k + 1) % 3]))
                .or_default()
                .push(fi);
        }
    }
    let mut oriented: Vec<Option<[usize; 3]>> = vec![None; faces.len()];
    oriented[0] = Some(faces[0]);
    let mut queue = VecDeque::from([0]);
    while let Some(fi) = queue.pop_front() {
        let f = oriented[fi].expect("queued faces are oriented");
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            for &gi in &by_edge[&edge_key(a, b)] {
                if gi == fi {
                    continue;
                }
                // neighbor must traverse the shared edge as (b, a)
                let g = faces[gi];
                let want = if has_directed(&g, b, a) {
                    g
                } else {
                    [g[0], g[2], g[1]]
                };
                match oriented[gi] {
                    None => {
                        oriented[gi] = Some(want);
                        queue.push_back(gi);
                    }
                    Some(existing) if !has_directed(&existing, b, a) => {
                        return Err(Error::OrientationFailure { face: gi });
                    }
                    Some(_) => {}
                }
            }
        }
    }
    let oriented_faces: Vec<[usize; 3]> = oriented
        .into_iter()
        .enumerate()
        .map(|(fi, f)| f.ok_or(Error::OrientationFailure { face: fi }))
        .collect::<Result<_>>()?;

    let n = t.num_vertices;
    let mut succ: Vec<HashMap<usize, usize>> = vec![HashMap::new(); n];
    for f in &oriented_faces {
        for k in 0..3 {
            let (v, a, b) = (f[k], f[(k + 1) % 3], f[(k + 2) % 3]);
            if succ[v].insert(a, b).is_some() {
                return Err(Error::OrientationFailure { face: 0 });
            }
        }
    }
    let mut cycles = Vec::with_capacity(n);
    for (v, s) in succ.iter().enumerate() {
        let start = *s
            .keys()
            .min()
            .ok_or(Error::OrientationFailure { face: 0 })?;
        let mut cycle = vec![start];
        let mut cur = s[&start];
        while cur != start {
            cycle.push(cur);
            cur = *s.get(&cur).ok_or(Error::OrientationFailure { face: v })?;
            if cycle.len() > s.len() {
                return Err(Error::OrientationFailure { face: v });
            }
        }
        if cycle.len() != s.len() {
            return Err(Error::OrientationFailure { face: v });
        }
        cycles.push(cycle);
    }
    Ok(RotationSystem {
        oriented_faces,
        cycles,
    })
}

fn has_directed(f: &[usize; 3], a: usize, b: usize) -> bool {
    (0..3).any(|k| f[k] == a && f[(k + 1) % 3] == b)
}

impl Triangulation {
    pub fn new(num_vertices: usize, faces: Vec<[usize; 3]>) -> Result<Self> {
        let t = Triangulation {
            num_vertices,
            faces,
        };
        validate_triangulation(&t).map_err(Error::InvalidTriangulation)?;
        Ok(t)
    }

    /// The 1-skeleton as lexicographically sorted pairs `(i, j)`, `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let set: HashSet<(usize, usize)> = self
            .faces
            .iter()
            .flat_map(|f| (0..3).map(move |k| edge_key(f[k], f[(k + 1) % 3])))
            .collect();
        let mut edges: Vec<_> = set.into_iter().collect();
        edges.sort_unstable();
        edges
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .faces
            .iter()
            .filter(|f| f.contains(&v))
            .flat_map(|f| f.iter().copied().filter(|&u| u != v))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn tetrahedron() -> Self {
        Triangulation {
            num_vertices: 4,
            faces: vec![[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]],
        }
    }

    /// Equator `0..k`, top apex `k`, bottom apex `k + 1`.
    pub fn bipyramid(k: usize) -> Result<Self> {
        if k < 3 {
            return Err(Error::DegenerateInput(format!(
                "bipyramid needs k >= 3, got {k}"
            )));
        }
        let (top, bottom) = (k, k + 1);
        let mut faces = Vec::with_capacity(2 * k);
        for i in 0..k {
            let j = (i + 1) % k;
            faces.push([top, i, j]);
            faces.push([bottom, j, i]);
        }
        Ok(Triangulation {
            num_vertices: k + 2,
            faces,
        })
    }

    /// The bipyramid over a square: equator `0..4`, apexes 4 and 5.
    pub fn octahedron() -> Self {
        Self::bipyramid(4).expect("k = 4 is valid")
    }

    /// Apex 0, upper ring `1..=5`, lower ring `6..=10`, apex 11.
    pub fn icosahedron() -> Self {
        let up = |i: usize| 1 + i % 5;
        let lo = |i: usize| 6 + i % 5;
        let mut faces = Vec::with_capacity(20);
        for i in 0..5 {
            faces.push([0, up(i), up(i + 1)]);
            faces.push([up(i), lo(i), up(i + 1)]);
            faces.push([up(i + 1), lo(i), lo(i + 1)]);
            faces.push([11, lo(i + 1), lo(i)]);
        }
        Triangulation {
            num_vertices: 12,
            faces,
        }
    }

    /// Named built-in fixtures: tetrahedron, octahedron, icosahedron and the
    /// bipyramids over 3- to 6-gons.
    pub fn catalog() -> Vec<(String, Triangulation)> {
        let mut out = vec![
            ("tetrahedron".to_string(), Self::tetrahedron()),
            ("octahedron".to_string(), Self::octahedron()),
            ("icosahedron".to_string(), Self::icosahedron()),
        ];
        for k in 3..=6 {
            out.push((format!("bipyramid{k}"), Self::bipyramid(k).expect("k >= 3")));
        }
        out
    }

    pub fn by_name(name: &str) -> Option<Triangulation> {
        Self::catalog()
            .into_iter()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_is_valid() {
        for (name, t) in Triangulation::catalog() {
            assert_eq!(validate_triangulation(&t), Ok(()), "{name}");
            let (n, m, f) = (t.num_vertices, t.edges().len(), t.faces.len());
            assert_eq!(m, 3 * n - 6, "{name}");
            assert_eq!(f, 2 * n - 4, "{name}");
        }
    }

    #[test]
    fn missing_face_reports_first_open_edge() {
        let mut t = Triangulation::tetrahedron();
        t.faces.pop();
        let err = validate_triangulation(&t).unwrap_err();
        assert_eq!(err, TriangulationViolation::EdgeInOneFace(1, 2));
        assert!(err.to_string().starts_with("edge in one face"));
    }

    #[test]
    fn structural_violations() {
        let t = Triangulation {
            num_vertices: 3,
            faces: vec![[0, 1, 2]],
        };
        assert!(matches!(
            validate_triangulation(&t),
            Err(TriangulationViolation::TooFewVertices { .. })
        ));

        let mut t = Triangulation::tetrahedron();
        t.faces[0] = [0, 0, 2];
        assert_eq!(
            validate_triangulation(&t),
            Err(TriangulationViolation::RepeatedVertex { face: 0 })
        );

        let mut t = Triangulation::tetrahedron();
        t.faces[1] = [2, 1, 0];
        assert_eq!(
            validate_triangulation(&t),
            Err(TriangulationViolation::DuplicateFace {
                first: 0,
                second: 1
            })
        );

        let mut t = Triangulation::tetrahedron();
        t.faces[0] = [0, 1, 9];
        assert!(matches!(
            validate_triangulation(&t),
            Err(TriangulationViolation::VertexOutOfRange { .. })
        ));

        let mut t = Triangulation::tetrahedron();
        t.num_vertices = 5;
        assert_eq!(
            validate_triangulation(&t),
            Err(TriangulationViolation::UnusedVertex(4))
        );
    }

    #[test]
    fn two_disjoint_spheres_rejected() {
        let mut faces = Triangulation::tetrahedron().faces;
        faces.extend(
            Triangulation::tetrahedron()
                .faces
                .iter()
                .map(|f| [f[0] + 4, f[1] + 4, f[2] + 4]),
        );
        let t = Triangulation {
            num_vertices: 8,
            faces,
        };
        assert!(matches!(
            validate_triangulation(&t),
            Err(TriangulationViolation::EulerCharacteristic { .. })
        ));
    }

    #[test]
    fn pinched_vertex_rejected() {
        // two tetrahedra glued at vertex 0
        let mut faces = Triangulation::tetrahedron().faces;
        faces.extend([[0, 4, 5], [0, 5, 6], [0, 6, 4], [4, 6, 5]]);
        let t = Triangulation {
            num_vertices: 7,
            faces,
        };
        assert_eq!(
            validate_triangulation(&t),
            Err(TriangulationViolation::LinkNotCycle(0))
        );
    }

    #[test]
    fn rotation_cycles() {
        let rs = rotation_system(&Triangulation::tetrahedron()).unwrap();
        let mut c0 = rs.cycle(0).to_vec();
        c0.sort_unstable();
        assert_eq!(c0, vec![1, 2, 3]);
        assert_eq!(rs.oriented_faces[0], [0, 1, 2]);

        let rs = rotation_system(&Triangulation::octahedron()).unwrap();
        assert!(rs.cycles.iter().all(|c| c.len() == 4));
        let rs = rotation_system(&Triangulation::icosahedron()).unwrap();
        assert!(rs.cycles.iter().all(|c| c.len() == 5));
    }

    #[test]
    fn rotation_cycles_cover_each_edge_twice() {
        for (_, t) in Triangulation::catalog() {
            let rs = rotation_system(&t).unwrap();
            let mut seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
            for (v, cyc) in rs.cycles.iter().enumerate() {
                assert_eq!(cyc.len(), t.neighbors(v).len());
                for &u in cyc {
                    *seen.entry(edge_key(u, v)).or_default() += 1;
                }
            }
            assert_eq!(seen.keys().copied().collect::<Vec<_>>(), t.edges());
            assert!(seen.values().all(|&c| c == 2));
            // consecutive neighbors span a face
            for (v, cyc) in rs.cycles.iter().enumerate() {
                for k in 0..cyc.len() {
                    let (a, b) = (cyc[k], cyc[(k + 1) % cyc.len()]);
                    assert!(rs
                        .oriented_faces
                        .iter()
                        .any(|f| has_directed(f, v, a) && f.contains(&b)));
                }
            }
        }
    }

    #[test]
    fn orientation_is_consistent() {
        for (_, t) in Triangulation::catalog() {
            let rs = rotation_system(&t).unwrap();
            let mut directed = HashSet::new();
            for f in &rs.oriented_faces {
                for k in 0..3 {
                    assert!(directed.insert((f[k], f[(k + 1) % 3])));
                }
            }
        }
    }
}
