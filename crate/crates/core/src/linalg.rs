//! Dense matrices with an explicit rank tolerance policy, plus exact rank
//! over the rationals by fraction-free elimination.

use std::fmt;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Row or column meaning: a framework edge or one circle coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Edge(usize, usize),
    Coord { circle: usize, axis: Axis },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    R,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Edge(i, j) => write!(f, "e{i}_{j}"),
            Label::Coord { circle, axis } => {
                let a = match axis {
                    Axis::X => "x",
                    Axis::Y => "y",
                    Axis::R => "r",
                };
                write!(f, "{a}{circle}")
            }
        }
    }
}

/// Column labels `x₀, y₀, r₀, x₁, …` for `n` circles.
pub fn coord_labels(n: usize) -> Vec<Label> {
    (0..n)
        .flat_map(|circle| [Axis::X, Axis::Y, Axis::R].map(|axis| Label::Coord { circle, axis }))
        .collect()
}

/// Dense row-major real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    pub row_labels: Option<Vec<Label>>,
    pub col_labels: Option<Vec<Label>>,
}

impl RealMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RealMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
            row_labels: None,
            col_labels: None,
        }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::DimensionMismatch(
                "matrix entries must be finite".into(),
            ));
        }
        Ok(RealMatrix {
            rows,
            cols,
            data,
            row_labels: None,
            col_labels: None,
        })
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn with_labels(mut self, rows: Option<Vec<Label>>, cols: Option<Vec<Label>>) -> Self {
        self.row_labels = rows;
        self.col_labels = cols;
        self
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> RealMatrix {
        let mut t = RealMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t.row_labels = self.col_labels.clone();
        t.col_labels = self.row_labels.clone();
        t
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols, "vector length must match column count");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, other: &RealMatrix) -> Result<RealMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = RealMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// `self · diag(scale)`.
    pub fn scale_columns(&self, scale: &[f64]) -> Result<RealMatrix> {
        if scale.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{} scales for {} columns",
                scale.len(),
                self.cols
            )));
        }
        let mut out = self.clone();
        for i in 0..self.rows {
            for (j, s) in scale.iter().enumerate() {
                out[(i, j)] *= s;
            }
        }
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

impl std::ops::Index<(usize, usize)> for RealMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RealMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Threshold below which singular values count as zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TolPolicy {
    /// `max(rows, cols) · σ_max · eps`.
    Relative(f64),
    /// A fixed threshold.
    Absolute(f64),
}

pub const DEFAULT_RELATIVE_TOL: f64 = 1e-12;

/// Environment variable that overrides the relative factor of the default
/// policy.
pub const TOL_ENV_VAR: &str = "INVRIG_TOL";

impl Default for TolPolicy {
    fn default() -> Self {
        TolPolicy::Relative(DEFAULT_RELATIVE_TOL)
    }
}

impl TolPolicy {
    /// Default policy, with the relative factor taken from `INVRIG_TOL` when
    /// set to a positive number.
    pub fn from_env() -> Result<Self> {
        match std::env::var(TOL_ENV_VAR) {
            Ok(s) => match s.trim().parse::<f64>() {
                Ok(v) if v > 0.0 && v.is_finite() => Ok(TolPolicy::Relative(v)),
                _ => Err(Error::Validation(format!(
                    "{TOL_ENV_VAR}={s} is not a positive number"
                ))),
            },
            Err(_) => Ok(TolPolicy::default()),
        }
    }

    pub fn threshold(&self, rows: usize, cols: usize, sigma_max: f64) -> f64 {
        match *self {
            TolPolicy::Relative(eps) => rows.max(cols) as f64 * sigma_max * eps,
            TolPolicy::Absolute(t) => t,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankReport {
    pub rank: usize,
    /// Singular values in non-increasing order, `min(rows, cols)` of them.
    pub singular_values: Vec<f64>,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Nullspace {
    /// Orthonormal basis vectors of length `cols`.
    pub basis: Vec<Vec<f64>>,
    pub report: RankReport,
}

const SVD_MAX_ITER: usize = 100_000;

struct Decomposition {
    sigma: Vec<f64>,
    // right singular vectors as rows, aligned with `sigma`
    v_rows: Vec<Vec<f64>>,
}

fn decompose(m: &RealMatrix, want_v: bool) -> Result<Decomposition> {
    if m.rows == 0 || m.cols == 0 {
        return Err(Error::DimensionMismatch(format!(
            "empty {}x{} matrix",
            m.rows, m.cols
        )));
    }
    // pad wide matrices with zero rows so V is square
    let rows = m.rows.max(if want_v { m.cols } else { 0 });
    let mut a = DMatrix::<f64>::zeros(rows, m.cols);
    for i in 0..m.rows {
        for j in 0..m.cols {
            a[(i, j)] = m[(i, j)];
        }
    }
    let svd = a
        .try_svd(false, want_v, f64::EPSILON, SVD_MAX_ITER)
        .ok_or(Error::NoConvergence {
            iterations: SVD_MAX_ITER,
            residual: f64::NAN,
        })?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sigma: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let v_rows = match &svd.v_t {
        Some(vt) => order
            .iter()
            .map(|&i| vt.row(i).iter().copied().collect())
            .collect(),
        None => Vec::new(),
    };
    Ok(Decomposition { sigma, v_rows })
}

fn report(m: &RealMatrix, sigma: &[f64], tol: TolPolicy) -> RankReport {
    let k = m.rows.min(m.cols);
    let sigma_max = sigma.first().copied().unwrap_or(0.0);
    let threshold = tol.threshold(m.rows, m.cols, sigma_max);
    let singular_values = sigma[..k].to_vec();
    let rank = singular_values.iter().filter(|&&s| s > threshold).count();
    RankReport {
        rank,
        singular_values,
        threshold,
    }
}

/// Number of singular values above the policy threshold.
pub fn numerical_rank(m: &RealMatrix, tol: TolPolicy) -> Result<RankReport> {
    let d = decompose(m, false)?;
    Ok(report(m, &d.sigma, tol))
}

/// Orthonormal basis of the numerical kernel: `cols − rank` vectors.
pub fn nullspace(m: &RealMatrix, tol: TolPolicy) -> Result<Nullspace> {
    let d = decompose(m, true)?;
    let report = report(m, &d.sigma, tol);
    let basis = d.v_rows[report.rank..].to_vec();
    debug_assert_eq!(basis.len(), m.cols - report.rank);
    Ok(Nullspace { basis, report })
}

/// Orthonormal basis of the numerical column space, ordered by decreasing
/// singular value, together with those singular values.
pub fn column_space(m: &RealMatrix, tol: TolPolicy) -> Result<(Vec<Vec<f64>>, RankReport)> {
    if m.rows == 0 || m.cols == 0 {
        return Err(Error::DimensionMismatch(format!(
            "empty {}x{} matrix",
            m.rows, m.cols
        )));
    }
    let svd = m
        .to_nalgebra()
        .try_svd(true, false, f64::EPSILON, SVD_MAX_ITER)
        .ok_or(Error::NoConvergence {
            iterations: SVD_MAX_ITER,
            residual: f64::NAN,
        })?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sigma: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let rep = report(m, &sigma, tol);
    let u = svd.u.expect("requested left singular vectors");
    let basis = order[..rep.rank]
        .iter()
        .map(|&i| u.column(i).iter().copied().collect())
        .collect();
    Ok((basis, rep))
}

/// Dense row-major matrix of exact rationals.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<BigRational>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(RationalMatrix { rows, cols, data })
    }

    /// Exact image of a float matrix: every finite double is a dyadic
    /// rational.
    pub fn from_real(m: &RealMatrix) -> Self {
        let data = m
            .data
            .iter()
            .map(|&v| BigRational::from_float(v).expect("entries are finite"))
            .collect();
        RationalMatrix {
            rows: m.rows,
            cols: m.cols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn transpose(&self) -> RationalMatrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        RationalMatrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn to_real(&self) -> RealMatrix {
        use num_traits::ToPrimitive;
        let data = self
            .data
            .iter()
            .map(|v| v.to_f64().unwrap_or(f64::NAN))
            .collect();
        RealMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
            row_labels: None,
            col_labels: None,
        }
    }
}

/// Exact rank over ℚ by Bareiss fraction-free elimination.
pub fn exact_rank(m: &RationalMatrix) -> usize {
    // clear denominators row by row; row scaling preserves rank
    let mut a: Vec<Vec<BigInt>> = (0..m.rows)
        .map(|i| {
            let row = &m.data[i * m.cols..(i + 1) * m.cols];
            let lcm = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            row.iter().map(|v| v.numer() * (&lcm / v.denom())).collect()
        })
        .collect();

    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..m.cols {
        if rank == m.rows {
            break;
        }
        let Some(p) = (rank..m.rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let (top, below) = a.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        let pivot = pivot_row[col].clone();
        for row in below {
            let lead = std::mem::take(&mut row[col]);
            for (x, p) in row[col + 1..].iter_mut().zip(&pivot_row[col + 1..]) {
                let num = &pivot * &*x - &lead * p;
                debug_assert!((&num % &prev).is_zero());
                *x = num / &prev;
            }
        }
        prev = pivot;
        rank += 1;
    }
    rank
}
