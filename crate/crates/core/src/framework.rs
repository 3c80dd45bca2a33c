//! Circle frameworks: circles indexed by the vertices of a graph, with
//! tangency and univalence diagnostics.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circle::{inversive_distance, Circle};
use crate::error::{Error, Result};
pub use crate::triangulation::{
    rotation_system, validate_triangulation, RotationSystem, Triangulation, TriangulationViolation,
};

/// Bijection between edges `(i, j)` with `i < j` and positions `0..m`, in
/// lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeIndex {
    edges: Vec<(usize, usize)>,
}

impl EdgeIndex {
    /// Normalizes and sorts `edges`; rejects loops and duplicates.
    pub fn new(edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut edges: Vec<(usize, usize)> = edges
            .into_iter()
            .map(|(a, b)| if a < b { (a, b) } else { (b, a) })
            .collect();
        if let Some(&(a, _)) = edges.iter().find(|(a, b)| a == b) {
            return Err(Error::InvalidFramework(format!("loop at vertex {a}")));
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidFramework(format!(
                "duplicate edge ({}, {})",
                w[0].0, w[0].1
            )));
        }
        Ok(EdgeIndex { edges })
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn position(&self, i: usize, j: usize) -> Option<usize> {
        let key = if i < j { (i, j) } else { (j, i) };
        self.edges.binary_search(&key).ok()
    }

    pub fn pair(&self, k: usize) -> (usize, usize) {
        self.edges[k]
    }

    pub fn as_slice(&self) -> &[(usize, usize)] {
        &self.edges
    }
}

/// Circles indexed by the vertices of a connected graph.
#[derive(Debug, Clone, PartialEq)]
pub struct CFramework {
    circles: Vec<Circle>,
    edges: EdgeIndex,
    source: Option<Triangulation>,
}

impl CFramework {
    pub fn new(
        circles: Vec<Circle>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let edges = EdgeIndex::new(edges)?;
        let f = CFramework {
            circles,
            edges,
            source: None,
        };
        f.validate()?;
        Ok(f)
    }

    /// Framework on the 1-skeleton of `t`, which is recorded as the source.
    pub fn from_triangulation(t: &Triangulation, circles: Vec<Circle>) -> Result<Self> {
        validate_triangulation(t).map_err(Error::InvalidTriangulation)?;
        if circles.len() != t.num_vertices {
            return Err(Error::InvalidFramework(format!(
                "{} circles for a triangulation on {} vertices",
                circles.len(),
                t.num_vertices
            )));
        }
        let edges = EdgeIndex::new(t.edges())?;
        let f = CFramework {
            circles,
            edges,
            source: Some(t.clone()),
        };
        f.validate()?;
        Ok(f)
    }

    fn validate(&self) -> Result<()> {
        let n = self.circles.len();
        if n == 0 {
            return Err(Error::InvalidFramework("no circles".into()));
        }
        for c in &self.circles {
            c.validate()?;
        }
        if let Some(&(i, j)) = self.edges.as_slice().iter().find(|&&(_, j)| j >= n) {
            return Err(Error::InvalidFramework(format!(
                "edge ({i}, {j}) out of range for {n} circles"
            )));
        }
        let mut adj = vec![Vec::new(); n];
        for &(i, j) in self.edges.as_slice() {
            adj[i].push(j);
            adj[j].push(i);
        }
        let mut reached = vec![false; n];
        reached[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(v) = queue.pop_front() {
            for &u in &adj[v] {
                if !reached[u] {
                    reached[u] = true;
                    queue.push_back(u);
                }
            }
        }
        if let Some(v) = reached.iter().position(|r| !r) {
            return Err(Error::InvalidFramework(format!(
                "graph disconnected: vertex {v} unreachable from 0"
            )));
        }
        if let Some(t) = &self.source {
            if self.edges.len() != 3 * n - 6 {
                return Err(Error::InvalidFramework("edge count is not 3n - 6".into()));
            }
            if t.edges() != self.edges.as_slice() {
                return Err(Error::InvalidFramework(
                    "edges differ from the source triangulation".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn circles(&self) -> &[Circle] {
        &self.circles
    }

    pub fn circle(&self, i: usize) -> &Circle {
        &self.circles[i]
    }

    pub fn num_circles(&self) -> usize {
        self.circles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_index(&self) -> &EdgeIndex {
        &self.edges
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        self.edges.as_slice()
    }

    pub fn source(&self) -> Option<&Triangulation> {
        self.source.as_ref()
    }

    /// The parameter point `(x₀, y₀, r₀, x₁, …)`.
    pub fn coordinates(&self) -> Vec<f64> {
        self.circles.iter().flat_map(|c| [c.x, c.y, c.r]).collect()
    }

    /// Same graph and source, new coordinates.
    pub fn with_coordinates(&self, p: &[f64]) -> Result<Self> {
        if p.len() != 3 * self.circles.len() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} coordinates, got {}",
                3 * self.circles.len(),
                p.len()
            )));
        }
        let circles = p
            .chunks_exact(3)
            .map(|c| Circle::new(c[0], c[1], c[2]))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.with_circles(circles))
    }

    pub(crate) fn with_circles(&self, circles: Vec<Circle>) -> Self {
        CFramework {
            circles,
            edges: self.edges.clone(),
            source: self.source.clone(),
        }
    }
}

/// `|Inv(C_i, C_j) − 1|` per edge, in edge order.
pub fn tangency_residuals(f: &CFramework) -> Vec<f64> {
    f.edges()
        .iter()
        .map(|&(i, j)| (inversive_distance(f.circle(i), f.circle(j)) - 1.0).abs())
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnivalenceReport {
    pub ok: bool,
    /// Smallest inversive distance over all unordered pairs; `+∞` for a
    /// single circle.
    pub min_pairwise_inv: f64,
    pub witness: Option<(usize, usize)>,
}

pub const DEFAULT_UNIVALENCE_TOL: f64 = 1e-8;

/// Closed disks have pairwise disjoint interiors iff every pair has
/// inversive distance at least `1 − tol`.
pub fn univalence_check(f: &CFramework, tol: f64) -> UnivalenceReport {
    let cs = f.circles();
    let mut min = f64::INFINITY;
    let mut witness = None;
    for i in 0..cs.len() {
        for j in i + 1..cs.len() {
            let inv = inversive_distance(&cs[i], &cs[j]);
            if inv < min {
                min = inv;
                witness = Some((i, j));
            }
        }
    }
    UnivalenceReport {
        ok: min >= 1.0 - tol,
        min_pairwise_inv: min,
        witness,
    }
}

/// Smallest radius a perturbation may produce.
pub const MIN_RADIUS: f64 = 1e-6;

/// Adds independent uniform noise from `[−eps, eps]` to every coordinate,
/// keeping radii at least [`MIN_RADIUS`].
pub fn perturb(f: &CFramework, eps: f64, seed: u64) -> Result<CFramework> {
    if !eps.is_finite() || eps < 0.0 {
        return Err(Error::InvalidEps(eps));
    }
    if eps == 0.0 {
        return Ok(f.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let circles = f
        .circles()
        .iter()
        .map(|c| {
            let x = c.x + rng.gen_range(-eps..=eps);
            let y = c.y + rng.gen_range(-eps..=eps);
            let r = (c.r + rng.gen_range(-eps..=eps)).max(MIN_RADIUS.max(c.r - eps));
            Circle { x, y, r }
        })
        .collect();
    Ok(f.with_circles(circles))
}
