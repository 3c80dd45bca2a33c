//! Sign changes of edge labelings around the vertices of a sphere
//! triangulation, and a harness that checks Cauchy's combinatorial lemma
//! by enumeration or sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::framework::{rotation_system, EdgeIndex, RotationSystem, Triangulation};

/// Per-edge labels in edge order: `+1`, `−1`, or `0` for unlabeled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignLabeling(Vec<i8>);

impl SignLabeling {
    pub fn new(labels: Vec<i8>) -> Result<Self> {
        if let Some(k) = labels.iter().position(|l| !matches!(l, -1..=1)) {
            return Err(Error::Validation(format!(
                "label {} at edge {k} is not -1, 0 or 1",
                labels[k]
            )));
        }
        Ok(SignLabeling(labels))
    }

    pub fn unlabeled(m: usize) -> Self {
        SignLabeling(vec![0; m])
    }

    /// Sign pattern of a stress; entries with `|ω| ≤ zero_tol` stay unlabeled.
    pub fn from_stress(stress: &[f64], zero_tol: f64) -> Self {
        SignLabeling(
            stress
                .iter()
                .map(|&w| {
                    if w > zero_tol {
                        1
                    } else if w < -zero_tol {
                        -1
                    } else {
                        0
                    }
                })
                .collect(),
        )
    }

    pub fn labels(&self) -> &[i8] {
        &self.0
    }

    pub fn set(&mut self, edge: usize, label: i8) {
        assert!(matches!(label, -1..=1));
        self.0[edge] = label;
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Rotation system and edge order of one triangulation, reused across many
/// labelings.
#[derive(Debug, Clone)]
pub struct SignChangeCounter {
    rotation: RotationSystem,
    edges: EdgeIndex,
    // edge position of (v, cycle[v][k])
    incident: Vec<Vec<usize>>,
}

impl SignChangeCounter {
    pub fn new(t: &Triangulation) -> Result<Self> {
        Self::with_rotation(t, rotation_system(t)?)
    }

    /// Uses a caller-supplied rotation system, e.g. a mirrored one.
    pub fn with_rotation(t: &Triangulation, rotation: RotationSystem) -> Result<Self> {
        let edges = EdgeIndex::new(t.edges())?;
        let incident = rotation
            .cycles
            .iter()
            .enumerate()
            .map(|(v, cyc)| {
                cyc.iter()
                    .map(|&u| edges.position(v, u).expect("rotation neighbors are edges"))
                    .collect()
            })
            .collect();
        Ok(SignChangeCounter {
            rotation,
            edges,
            incident,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.incident.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn rotation(&self) -> &RotationSystem {
        &self.rotation
    }

    /// Sign changes around `v`, ignoring unlabeled edges. Always even.
    pub fn count(&self, s: &SignLabeling, v: usize) -> usize {
        let labels: Vec<i8> = self.incident[v]
            .iter()
            .map(|&e| s.0[e])
            .filter(|&l| l != 0)
            .collect();
        if labels.len() <= 1 {
            return 0;
        }
        (0..labels.len())
            .filter(|&k| labels[k] != labels[(k + 1) % labels.len()])
            .count()
    }

    /// Whether some edge at `v` carries a label.
    pub fn is_labeled_vertex(&self, s: &SignLabeling, v: usize) -> bool {
        self.incident[v].iter().any(|&e| s.0[e] != 0)
    }

    /// Least vertex with exactly two sign changes.
    pub fn find_exact_two_vertex(&self, s: &SignLabeling) -> Option<usize> {
        (0..self.num_vertices()).find(|&v| self.count(s, v) == 2)
    }

    /// Least labeled vertex whose labeled edges all carry the same sign,
    /// with that sign.
    pub fn uniform_sign_vertex(&self, s: &SignLabeling) -> Option<(usize, i8)> {
        (0..self.num_vertices()).find_map(|v| {
            let mut labels = self.incident[v].iter().map(|&e| s.0[e]).filter(|&l| l != 0);
            let first = labels.next()?;
            labels.all(|l| l == first).then_some((v, first))
        })
    }

    /// The lemma's working hypothesis: some edge is labeled and every
    /// vertex touching a labeled edge has at least two sign changes.
    pub fn satisfies_hypothesis(&self, s: &SignLabeling) -> bool {
        s.0.iter().any(|&l| l != 0)
            && (0..self.num_vertices())
                .all(|v| !self.is_labeled_vertex(s, v) || self.count(s, v) >= 2)
    }

    fn check(&self, s: &SignLabeling) -> Check {
        if !self.satisfies_hypothesis(s) {
            Check::Skipped
        } else if self.find_exact_two_vertex(s).is_some() {
            Check::Passed
        } else {
            Check::Counterexample
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Check {
    Skipped,
    Passed,
    Counterexample,
}

pub fn sign_change_count(t: &Triangulation, s: &SignLabeling, v: usize) -> Result<usize> {
    let counter = SignChangeCounter::new(t)?;
    check_len(&counter, s)?;
    Ok(counter.count(s, v))
}

pub fn find_exact_two_vertex(t: &Triangulation, s: &SignLabeling) -> Result<Option<usize>> {
    let counter = SignChangeCounter::new(t)?;
    check_len(&counter, s)?;
    Ok(counter.find_exact_two_vertex(s))
}

fn check_len(counter: &SignChangeCounter, s: &SignLabeling) -> Result<()> {
    if s.len() != counter.num_edges() {
        return Err(Error::DimensionMismatch(format!(
            "{} labels for {} edges",
            s.len(),
            counter.num_edges()
        )));
    }
    Ok(())
}

/// Largest labeling space enumerated exhaustively.
pub const ENUMERATION_BOUND: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CauchyMode {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CauchyReport {
    pub labelings: u64,
    /// Labelings that met the hypothesis and were checked.
    pub checked: u64,
    pub counterexample: Option<SignLabeling>,
}

impl CauchyReport {
    pub fn ok(&self) -> bool {
        self.counterexample.is_none()
    }
}

fn labeling_from_index(mut k: u64, m: usize) -> SignLabeling {
    let mut labels = vec![0i8; m];
    for l in labels.iter_mut() {
        *l = match k % 3 {
            0 => 0,
            1 => 1,
            _ => -1,
        };
        k /= 3;
    }
    SignLabeling(labels)
}

/// Checks the lemma on every labeling (or on a deterministic sample).
pub fn exhaustive_cauchy_check(t: &Triangulation, mode: CauchyMode) -> Result<CauchyReport> {
    let counter = SignChangeCounter::new(t)?;
    let m = counter.num_edges();
    match mode {
        CauchyMode::Exhaustive => {
            let space = 3f64.powi(m as i32);
            if space > ENUMERATION_BOUND as f64 {
                return Err(Error::TooLarge {
                    labelings: space,
                    bound: ENUMERATION_BOUND,
                });
            }
            let total = 3u64.pow(m as u32);
            let results: Vec<Check> = (0..total)
                .into_par_iter()
                .map(|k| counter.check(&labeling_from_index(k, m)))
                .collect();
            Ok(summarize(total, &results, |k| {
                labeling_from_index(k as u64, m)
            }))
        }
        CauchyMode::Sampled { samples, seed } => {
            let labelings: Vec<SignLabeling> = (0..samples)
                .map(|i| random_labeling(m, seed.wrapping_add(i as u64)))
                .collect();
            let results: Vec<Check> = labelings.par_iter().map(|s| counter.check(s)).collect();
            Ok(summarize(samples as u64, &results, |k| {
                labelings[k].clone()
            }))
        }
    }
}

fn summarize(
    total: u64,
    results: &[Check],
    labeling: impl Fn(usize) -> SignLabeling,
) -> CauchyReport {
    CauchyReport {
        labelings: total,
        checked: results.iter().filter(|&&c| c != Check::Skipped).count() as u64,
        counterexample: results
            .iter()
            .position(|&c| c == Check::Counterexample)
            .map(labeling),
    }
}

/// Uniform labeling over `{−1, 0, +1}^m`, deterministic in `seed`.
pub fn random_labeling(m: usize, seed: u64) -> SignLabeling {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SignLabeling((0..m).map(|_| rng.gen_range(-1..=1)).collect())
}
