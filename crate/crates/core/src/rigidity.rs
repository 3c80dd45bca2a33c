//! Inversive rigidity matrix, inversive stress matrices, rigidity verdicts,
//! trivial motions, flexes and equilibrium stresses.
//!
//! Row `k` of the rigidity matrix `R` (m × 3n) is the linearized constraint
//! that edge `k = ij` keeps its inversive distance, scaled by `−r_i² r_j²`.
//! The stress matrix `V` (3n × m) holds in column `ij` the edge vector
//! `V_ij` at circle `i` and `V_ji` at circle `j`. Scaling column `ij` by
//! `r_i² r_j²` turns `V` into `Rᵀ`.

use num_rational::BigRational;
use num_traits::Num;

use crate::circle::{inversive_distance, mobius_generator_field, Circle};
use crate::error::{Error, Result};
use crate::framework::CFramework;
use crate::linalg::{
    column_space, coord_labels, exact_rank, nullspace, numerical_rank, Label, RationalMatrix,
    RealMatrix, TolPolicy,
};

/// Coordinate derivatives `(x₀', y₀', r₀', x₁', …)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionVector(pub Vec<f64>);

/// Edge weights in edge order.
#[derive(Debug, Clone, PartialEq)]
pub struct StressVector(pub Vec<f64>);

/// Non-zero per-edge scale factors `λ_ij`, in edge order.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleAssignment(Vec<f64>);

impl ScaleAssignment {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(k) = values.iter().position(|&v| v == 0.0 || !v.is_finite()) {
            return Err(Error::ZeroScale(k));
        }
        Ok(ScaleAssignment(values))
    }

    pub fn ones(m: usize) -> Self {
        ScaleAssignment(vec![1.0; m])
    }

    /// `λ_ij = r_i² r_j²`, under which the scaled stress matrix is `Rᵀ`.
    pub fn squared_radii(f: &CFramework) -> Self {
        ScaleAssignment(
            f.edges()
                .iter()
                .map(|&(i, j)| {
                    let p = f.circle(i).r * f.circle(j).r;
                    p * p
                })
                .collect(),
        )
    }

    /// `λ_ij = r_i r_j`, under which tangent edge vectors become
    /// `(x_j − x_i, y_j − y_i, r_i + r_j)`.
    pub fn radii_product(f: &CFramework) -> Self {
        ScaleAssignment(
            f.edges()
                .iter()
                .map(|&(i, j)| f.circle(i).r * f.circle(j).r)
                .collect(),
        )
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

fn two<T: Num>() -> T {
    T::one() + T::one()
}

/// The three entries of row `ij` in circle `i`'s columns.
fn rigidity_block<T: Clone + Num>(ci: &[T; 3], cj: &[T; 3]) -> [T; 3] {
    let [xi, yi, ri] = ci.clone();
    let [xj, yj, rj] = cj.clone();
    let dx = xj.clone() - xi.clone();
    let dy = yj.clone() - yi.clone();
    let d2 = dx.clone() * dx.clone() + dy.clone() * dy.clone();
    let rr = ri.clone() * rj.clone();
    let third = rj.clone() * (ri.clone() * ri + d2 - rj.clone() * rj) / two();
    [rr.clone() * dx, rr * dy, third]
}

/// Edge vector `V_ij` from circle `i` toward circle `j`.
fn edge_vector_generic<T: Clone + Num>(ci: &[T; 3], cj: &[T; 3]) -> [T; 3] {
    let [xi, yi, ri] = ci.clone();
    let [xj, yj, rj] = cj.clone();
    let dx = xj - xi;
    let dy = yj - yi;
    let d2 = dx.clone() * dx.clone() + dy.clone() * dy.clone();
    let rr = ri.clone() * rj.clone();
    let third = (ri.clone() * ri.clone() + d2 - rj.clone() * rj.clone())
        / (two::<T>() * ri.clone() * ri * rj);
    [dx / rr.clone(), dy / rr, third]
}

/// Row-major entries of the m × 3n rigidity matrix over any field.
pub fn rigidity_matrix_generic<T: Clone + Num>(
    coords: &[[T; 3]],
    edges: &[(usize, usize)],
) -> Vec<T> {
    let cols = 3 * coords.len();
    let mut data = vec![T::zero(); edges.len() * cols];
    for (k, &(i, j)) in edges.iter().enumerate() {
        let row = &mut data[k * cols..(k + 1) * cols];
        for (a, b) in [(i, j), (j, i)] {
            let block = rigidity_block(&coords[a], &coords[b]);
            for (t, v) in block.into_iter().enumerate() {
                row[3 * a + t] = v;
            }
        }
    }
    data
}

/// Row-major entries of the 3n × m stress matrix over any field.
pub fn stress_matrix_generic<T: Clone + Num>(
    coords: &[[T; 3]],
    edges: &[(usize, usize)],
) -> Vec<T> {
    let m = edges.len();
    let mut data = vec![T::zero(); 3 * coords.len() * m];
    for (k, &(i, j)) in edges.iter().enumerate() {
        for (a, b) in [(i, j), (j, i)] {
            let v = edge_vector_generic(&coords[a], &coords[b]);
            for (t, val) in v.into_iter().enumerate() {
                data[(3 * a + t) * m + k] = val;
            }
        }
    }
    data
}

fn float_coords(f: &CFramework) -> Vec<[f64; 3]> {
    f.circles().iter().map(|c| [c.x, c.y, c.r]).collect()
}

fn exact_coords(f: &CFramework) -> Vec<[BigRational; 3]> {
    let q = |v: f64| BigRational::from_float(v).expect("circle coordinates are finite");
    f.circles()
        .iter()
        .map(|c| [q(c.x), q(c.y), q(c.r)])
        .collect()
}

fn edge_labels(f: &CFramework) -> Vec<Label> {
    f.edges().iter().map(|&(i, j)| Label::Edge(i, j)).collect()
}

/// The m × 3n inversive rigidity matrix, rows in edge order.
pub fn rigidity_matrix(f: &CFramework) -> RealMatrix {
    let data = rigidity_matrix_generic(&float_coords(f), f.edges());
    RealMatrix::from_row_major(f.num_edges(), 3 * f.num_circles(), data)
        .expect("finite circles give finite entries")
        .with_labels(Some(edge_labels(f)), Some(coord_labels(f.num_circles())))
}

/// Rigidity matrix over ℚ, using the exact rational value of every float
/// coordinate.
pub fn rigidity_matrix_exact(f: &CFramework) -> RationalMatrix {
    let data = rigidity_matrix_generic(&exact_coords(f), f.edges());
    RationalMatrix::from_row_major(f.num_edges(), 3 * f.num_circles(), data).expect("shape matches")
}

/// Edge vector `V_ij`. Note `V_ij ≠ −V_ji` in general.
pub fn edge_vector(f: &CFramework, i: usize, j: usize) -> Result<[f64; 3]> {
    if f.edge_index().position(i, j).is_none() || i >= f.num_circles() || j >= f.num_circles() {
        return Err(Error::NotAnEdge(i, j));
    }
    let c = |k: usize| {
        let Circle { x, y, r } = *f.circle(k);
        [x, y, r]
    };
    Ok(edge_vector_generic(&c(i), &c(j)))
}

/// The 3n × m inversive stress matrix.
pub fn stress_matrix(f: &CFramework) -> RealMatrix {
    let data = stress_matrix_generic(&float_coords(f), f.edges());
    RealMatrix::from_row_major(3 * f.num_circles(), f.num_edges(), data)
        .expect("finite circles give finite entries")
        .with_labels(Some(coord_labels(f.num_circles())), Some(edge_labels(f)))
}

pub fn stress_matrix_exact(f: &CFramework) -> RationalMatrix {
    let data = stress_matrix_generic(&exact_coords(f), f.edges());
    RationalMatrix::from_row_major(3 * f.num_circles(), f.num_edges(), data).expect("shape matches")
}

/// `V Λ`: column `ij` of the stress matrix multiplied by `λ_ij`.
pub fn scaled_stress_matrix(f: &CFramework, scale: &ScaleAssignment) -> Result<RealMatrix> {
    stress_matrix(f).scale_columns(scale.values())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RankMode {
    #[default]
    Numeric,
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RigidityVerdict {
    pub rank: usize,
    pub nullity: usize,
    /// Singular-value threshold; 0 in exact mode.
    pub threshold_used: f64,
    pub is_infinitesimally_rigid: bool,
    /// Singular values of `R`, non-increasing.
    pub singular_values: Vec<f64>,
    pub mode: RankMode,
}

impl RigidityVerdict {
    /// `3n − 6`, the rank of an infinitesimally rigid framework.
    pub fn required_rank(n: usize) -> i64 {
        3 * n as i64 - 6
    }
}

/// Rank of the rigidity matrix against `3n − 6`.
pub fn rigidity_verdict(f: &CFramework, mode: RankMode, tol: TolPolicy) -> Result<RigidityVerdict> {
    let n = f.num_circles();
    let r = rigidity_matrix(f);
    let (num_rank, singular_values, threshold) = if f.num_edges() == 0 {
        (0, Vec::new(), 0.0)
    } else {
        let rep = numerical_rank(&r, tol)?;
        (rep.rank, rep.singular_values, rep.threshold)
    };
    let (rank, threshold_used) = match mode {
        RankMode::Numeric => (num_rank, threshold),
        RankMode::Exact => (exact_rank(&rigidity_matrix_exact(f)), 0.0),
    };
    Ok(RigidityVerdict {
        rank,
        nullity: 3 * n - rank,
        threshold_used,
        is_infinitesimally_rigid: rank as i64 == RigidityVerdict::required_rank(n),
        singular_values,
        mode,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrivialBasis {
    /// Six motions, one per generator family, each of length 3n.
    pub vectors: Vec<MotionVector>,
    /// Largest `‖R c‖ / (‖R‖ ‖c‖)` over the six vectors (Frobenius `‖R‖`).
    pub max_relative_residual: f64,
    /// Numerical rank of the six vectors.
    pub gram_rank: usize,
}

/// Motion `k` stacks the `k`-th Möbius generator field over all circles.
pub fn trivial_motion_basis(f: &CFramework) -> Result<TrivialBasis> {
    let vectors: Vec<MotionVector> = (1..=6)
        .map(|k| {
            MotionVector(
                f.circles()
                    .iter()
                    .flat_map(|c| mobius_generator_field(k, c))
                    .collect(),
            )
        })
        .collect();
    let r = rigidity_matrix(f);
    let rn = r.frobenius_norm();
    let max_relative_residual = vectors
        .iter()
        .map(|c| {
            let cn = norm(&c.0);
            if rn == 0.0 || cn == 0.0 {
                0.0
            } else {
                norm(&r.mul_vec(&c.0)) / (rn * cn)
            }
        })
        .fold(0.0, f64::max);
    let gram_rank = numerical_rank(&motions_as_columns(&vectors), TolPolicy::default())?.rank;
    Ok(TrivialBasis {
        vectors,
        max_relative_residual,
        gram_rank,
    })
}

fn motions_as_columns(vs: &[MotionVector]) -> RealMatrix {
    let rows = vs[0].0.len();
    let mut m = RealMatrix::zeros(rows, vs.len());
    for (j, v) in vs.iter().enumerate() {
        for (i, x) in v.0.iter().enumerate() {
            m[(i, j)] = *x;
        }
    }
    m
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimum fraction of a kernel vector that must lie outside the trivial
/// span for it to count as a flex.
pub const FLEX_FRACTION: f64 = 0.9;

/// A unit kernel vector of `R` orthogonal to the trivial motions, or `None`
/// when every infinitesimal motion is trivial.
pub fn extract_flex(f: &CFramework, tol: TolPolicy) -> Result<Option<MotionVector>> {
    let n3 = 3 * f.num_circles();
    let kernel: Vec<Vec<f64>> = if f.num_edges() == 0 {
        (0..n3)
            .map(|i| (0..n3).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect()
    } else {
        nullspace(&rigidity_matrix(f), tol)?.basis
    };
    let trivial = trivial_motion_basis(f)?;
    if kernel.len() <= trivial.gram_rank {
        return Ok(None);
    }
    let (tbasis, _) = column_space(&motions_as_columns(&trivial.vectors), TolPolicy::default())?;

    // kernel vectors with their trivial components removed, as columns
    let mut projected = RealMatrix::zeros(n3, kernel.len());
    for (j, k) in kernel.iter().enumerate() {
        let mut v = k.clone();
        for t in &tbasis {
            let a = dot(&v, t);
            v.iter_mut().zip(t).for_each(|(x, y)| *x -= a * y);
        }
        for (i, x) in v.into_iter().enumerate() {
            projected[(i, j)] = x;
        }
    }
    let (dirs, rep) = column_space(&projected, TolPolicy::default())?;
    match (dirs.into_iter().next(), rep.singular_values.first()) {
        (Some(mut c), Some(&s)) if s >= FLEX_FRACTION => {
            // remove any trivial component reintroduced by roundoff
            for t in &tbasis {
                let a = dot(&c, t);
                c.iter_mut().zip(t).for_each(|(x, y)| *x -= a * y);
            }
            let cn = norm(&c);
            c.iter_mut().for_each(|x| *x /= cn);
            Ok(Some(MotionVector(c)))
        }
        _ => Ok(None),
    }
}

/// Fraction of `c` lying outside the span of the trivial motions.
pub fn nontrivial_fraction(f: &CFramework, c: &MotionVector) -> Result<f64> {
    let trivial = trivial_motion_basis(f)?;
    let (tbasis, _) = column_space(&motions_as_columns(&trivial.vectors), TolPolicy::default())?;
    let mut v = c.0.clone();
    for t in &tbasis {
        let a = dot(&v, t);
        v.iter_mut().zip(t).for_each(|(x, y)| *x -= a * y);
    }
    Ok(norm(&v) / norm(&c.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StressBasis {
    pub basis: Vec<StressVector>,
    pub rank: usize,
    pub threshold_used: f64,
}

/// Orthonormal basis of the equilibrium stresses, the kernel of `V`.
pub fn equilibrium_stresses(f: &CFramework, tol: TolPolicy) -> Result<StressBasis> {
    if f.num_edges() == 0 {
        return Ok(StressBasis {
            basis: Vec::new(),
            rank: 0,
            threshold_used: 0.0,
        });
    }
    let ns = nullspace(&stress_matrix(f), tol)?;
    Ok(StressBasis {
        basis: ns.basis.into_iter().map(StressVector).collect(),
        rank: ns.report.rank,
        threshold_used: ns.report.threshold,
    })
}

/// Per-vertex sums `Σ_j ω_ij V_ij`.
pub fn vertex_sums(f: &CFramework, stress: &StressVector) -> Result<Vec<[f64; 3]>> {
    if stress.0.len() != f.num_edges() {
        return Err(Error::DimensionMismatch(format!(
            "{} stresses for {} edges",
            stress.0.len(),
            f.num_edges()
        )));
    }
    let v = stress_matrix(f);
    let s = if f.num_edges() == 0 {
        vec![0.0; 3 * f.num_circles()]
    } else {
        v.mul_vec(&stress.0)
    };
    Ok(s.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect())
}

/// Inversive distance of every edge, in edge order.
pub fn inversive_distance_vector(f: &CFramework) -> Vec<f64> {
    f.edges()
        .iter()
        .map(|&(i, j)| inversive_distance(f.circle(i), f.circle(j)))
        .collect()
}

fn inv_from_coords(p: &[f64], edges: &[(usize, usize)]) -> Vec<f64> {
    edges
        .iter()
        .map(|&(i, j)| {
            let (xi, yi, ri) = (p[3 * i], p[3 * i + 1], p[3 * i + 2]);
            let (xj, yj, rj) = (p[3 * j], p[3 * j + 1], p[3 * j + 2]);
            let d2 = (xi - xj).powi(2) + (yi - yj).powi(2);
            (d2 - ri * ri - rj * rj) / (2.0 * ri * rj)
        })
        .collect()
}

/// Central-difference Jacobian of the inversive distance map at the
/// framework's coordinates, m × 3n.
pub fn inversive_distance_jacobian_fd(f: &CFramework, h: f64) -> Result<RealMatrix> {
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::DegenerateInput(format!(
            "step must be positive, got {h}"
        )));
    }
    let p0 = f.coordinates();
    let (m, cols) = (f.num_edges(), p0.len());
    let mut jac = RealMatrix::zeros(m, cols);
    let mut p = p0.clone();
    for c in 0..cols {
        p[c] = p0[c] + h;
        let plus = inv_from_coords(&p, f.edges());
        p[c] = p0[c] - h;
        let minus = inv_from_coords(&p, f.edges());
        p[c] = p0[c];
        for k in 0..m {
            jac[(k, c)] = (plus[k] - minus[k]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// Largest entry of `|J − A_p R|`, with `J` the finite-difference Jacobian
/// and `A_p = diag(−1 / (r_i² r_j²))`.
pub fn jacobian_check(f: &CFramework, h: f64) -> Result<f64> {
    let jac = inversive_distance_jacobian_fd(f, h)?;
    let r = rigidity_matrix(f);
    let mut worst: f64 = 0.0;
    for (k, &(i, j)) in f.edges().iter().enumerate() {
        let rr = f.circle(i).r * f.circle(j).r;
        let a = -1.0 / (rr * rr);
        for c in 0..r.cols() {
            worst = worst.max((jac[(k, c)] - a * r[(k, c)]).abs());
        }
    }
    Ok(worst)
}
