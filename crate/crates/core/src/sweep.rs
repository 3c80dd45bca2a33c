//! Genericity sweep: rigidity verdicts over random perturbations of a
//! framework.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::framework::{perturb, CFramework};
use crate::linalg::TolPolicy;
use crate::rigidity::{rigidity_verdict, RankMode, RigidityVerdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub triangulation: String,
    pub samples: usize,
    pub eps: f64,
    pub seed: u64,
    pub rigid_count: usize,
    /// Number of samples at each rank.
    pub rank_histogram: BTreeMap<usize, usize>,
    /// Smallest `σ_{3n−6} / σ_max` over the samples; `None` when `3n − 6 ≤ 0`
    /// or the matrix has fewer singular values.
    pub min_singular_gap: Option<f64>,
}

fn gap(v: &RigidityVerdict, n: usize) -> Option<f64> {
    let k = RigidityVerdict::required_rank(n);
    if k <= 0 {
        return None;
    }
    let s = &v.singular_values;
    let top = *s.first()?;
    if top == 0.0 {
        return Some(0.0);
    }
    s.get(k as usize - 1).map(|x| x / top)
}

/// Sample `i` perturbs `f` by `eps` with seed `seed + i`. Samples run in
/// parallel and are merged in order.
pub fn genericity_sweep(
    f: &CFramework,
    id: &str,
    samples: usize,
    eps: f64,
    seed: u64,
    tol: TolPolicy,
) -> Result<SweepReport> {
    let n = f.num_circles();
    let verdicts = (0..samples)
        .into_par_iter()
        .map(|i| {
            let g = perturb(f, eps, seed.wrapping_add(i as u64))?;
            rigidity_verdict(&g, RankMode::Numeric, tol)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rank_histogram = BTreeMap::new();
    let mut min_gap: Option<f64> = None;
    for v in &verdicts {
        *rank_histogram.entry(v.rank).or_insert(0) += 1;
        if let Some(g) = gap(v, n) {
            min_gap = Some(min_gap.map_or(g, |m| m.min(g)));
        }
    }
    Ok(SweepReport {
        triangulation: id.to_string(),
        samples,
        eps,
        seed,
        rigid_count: verdicts
            .iter()
            .filter(|v| v.is_infinitesimally_rigid)
            .count(),
        rank_histogram,
        min_singular_gap: min_gap,
    })
}
