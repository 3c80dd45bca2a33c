//! Maximal tangency packings in the unit disk, and univalent tangency
//! frameworks on the whole sphere triangulation obtained from them by an
//! inversion about an interstice point.
//!
//! Removing a vertex `v∞` leaves a triangulated disk. Its boundary vertices
//! (the neighbors of `v∞`) become horocycles, i.e. circles internally
//! tangent to the unit circle, and interior vertices get hyperbolic radii
//! chosen so that every interior angle sum is `2π`. Radii are stored as
//! `s = e^{−h}`, so horocycles sit at `s = 0` and every angle formula stays
//! finite. The unit circle itself is assigned to `v∞`.

use std::f64::consts::PI;

use nalgebra::{DVector, Matrix3, Vector3};

use crate::circle::{
    apply_mobius, inversive_distance, lorentz_form, Circle, MoebiusAtom, MoebiusMap,
};
use crate::error::{Error, Result};
use crate::framework::{rotation_system, tangency_residuals, CFramework, Triangulation};
use crate::rigidity::{inversive_distance_vector, rigidity_matrix};

pub const DEFAULT_PACKING_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_SWEEPS: usize = 100_000;

const POLISH_FACTOR: f64 = 1e-2;
const POLISH_FLOOR: f64 = 1e-14;
const MAX_POLISH_SWEEPS: usize = 1_000;

#[derive(Debug, Clone, PartialEq)]
pub struct DiskPacking {
    pub triangulation: Triangulation,
    pub removed_vertex: usize,
    /// One circle per vertex; `circles[removed_vertex]` is the unit circle.
    pub circles: Vec<Circle>,
    /// Neighbors of the removed vertex, ascending.
    pub boundary: Vec<usize>,
    /// Vertices of the reduced complex that are not on its boundary.
    pub interior: Vec<usize>,
    /// `e^{−h}` for each vertex; 0 for horocycles and for the removed vertex.
    pub s_radii: Vec<f64>,
    /// Consistently oriented faces not incident to the removed vertex.
    pub faces: Vec<[usize; 3]>,
    /// Largest `|angle sum − 2π|` over interior vertices.
    pub angle_sum_error: f64,
    pub sweeps: usize,
    /// Largest tangency residual over all edges, including those to the
    /// unit circle (internal tangency).
    pub max_tangency_residual: f64,
}

impl DiskPacking {
    pub fn unit_circle() -> Circle {
        Circle {
            x: 0.0,
            y: 0.0,
            r: 1.0,
        }
    }

    /// Angle sum at `v` for the current radii.
    pub fn angle_sum(&self, v: usize) -> f64 {
        angle_sum(v, self.s_radii[v], &self.s_radii, &self.faces)
    }
}

/// Angle at the vertex with s-radius `sv` in the triangle of mutually
/// tangent hyperbolic circles with s-radii `sv`, `su`, `sw`.
pub fn face_angle(sv: f64, su: f64, sw: f64) -> f64 {
    let (v2, u2, w2) = (sv * sv, su * su, sw * sw);
    let num = v2 * (1.0 - u2) * (1.0 - w2);
    let den = (1.0 - v2 * u2) * (1.0 - v2 * w2);
    2.0 * (num / den).clamp(0.0, 1.0).sqrt().asin()
}

fn angle_sum(v: usize, sv: f64, s: &[f64], faces: &[[usize; 3]]) -> f64 {
    faces
        .iter()
        .filter_map(|f| {
            let k = f.iter().position(|&x| x == v)?;
            Some(face_angle(sv, s[f[(k + 1) % 3]], s[f[(k + 2) % 3]]))
        })
        .sum()
}

// Angle sums increase monotonically from 0 at s = 0 to deg·π at s = 1.
fn solve_vertex(v: usize, s: &[f64], faces: &[[usize; 3]]) -> f64 {
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if angle_sum(v, mid, s, faces) < 2.0 * PI {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Inversive distance between the unit circle and a hyperbolic circle of
/// s-radius `s`: `−coth h`, which is −1 for a horocycle.
pub fn unit_circle_inv(s: f64) -> f64 {
    -(1.0 + s * s) / (1.0 - s * s)
}

const UNIT_Q: [f64; 4] = [1.0, -1.0, 0.0, 0.0];

// Covector of the form: <p, q> = covector(p) · q.
fn covector(p: &[f64; 4]) -> [f64; 4] {
    [0.5 * p[1], 0.5 * p[0], -p[2], -p[3]]
}

fn det3(rows: [[f64; 3]; 3]) -> f64 {
    Matrix3::from_fn(|i, j| rows[i][j]).determinant()
}

// Vector annihilated by three covectors (generalized cross product).
fn annihilator(a: [f64; 4], b: [f64; 4], c: [f64; 4]) -> [f64; 4] {
    let mut n = [0.0; 4];
    for (i, ni) in n.iter_mut().enumerate() {
        let cols: Vec<usize> = (0..4).filter(|&j| j != i).collect();
        let minor = [a, b, c].map(|r| [r[cols[0]], r[cols[1]], r[cols[2]]]);
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        *ni = sign * det3(minor);
    }
    n
}

/// Both circles with inversive distance `targets[k]` to `known[k]`, k = 0..3.
fn circles_with_inversive_distances(
    known: [[f64; 4]; 3],
    targets: [f64; 3],
) -> Result<[[f64; 4]; 2]> {
    let gram = Matrix3::from_fn(|i, j| lorentz_form(&known[i], &known[j]));
    let coef = gram
        .try_inverse()
        .map(|g| g * Vector3::from(targets))
        .ok_or_else(|| Error::DegenerateInput("placement constraints are dependent".into()))?;
    let mut base = [0.0; 4];
    for k in 0..3 {
        for (b, q) in base.iter_mut().zip(known[k]) {
            *b += coef[k] * q;
        }
    }
    let n = annihilator(
        covector(&known[0]),
        covector(&known[1]),
        covector(&known[2]),
    );
    let nn = lorentz_form(&n, &n);
    let t2 = (-1.0 - lorentz_form(&base, &base)) / nn;
    if !t2.is_finite() || t2 < -1e-9 {
        return Err(Error::DegenerateInput(format!(
            "no circle satisfies the placement constraints (t² = {t2:e})"
        )));
    }
    let t = t2.max(0.0).sqrt();
    let plus = std::array::from_fn(|i| base[i] + t * n[i]);
    let minus = std::array::from_fn(|i| base[i] - t * n[i]);
    Ok([plus, minus])
}

fn cross(a: &Circle, b: &Circle, c: &Circle) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// Circle for `w` tangent to placed `a`, `b`, with its prescribed inversive
/// distance to the unit circle, such that `(a, b, w)` is counter-clockwise.
fn place_third(a: &Circle, b: &Circle, s_w: f64) -> Result<Circle> {
    let sols = circles_with_inversive_distances(
        [a.lorentz(), b.lorentz(), UNIT_Q],
        [1.0, 1.0, unit_circle_inv(s_w)],
    )?;
    sols.iter()
        .filter_map(|q| Circle::from_lorentz(*q).ok())
        .find(|w| cross(a, b, w) > 0.0)
        .ok_or_else(|| Error::DegenerateInput("no counter-clockwise placement".into()))
}

/// Solves for the maximal packing of `t` with `v_inf` sent to the unit
/// circle.
pub fn maximal_packing(
    t: &Triangulation,
    v_inf: usize,
    tol: f64,
    max_sweeps: usize,
) -> Result<DiskPacking> {
    let rs = rotation_system(t)?;
    let n = t.num_vertices;
    if v_inf >= n {
        return Err(Error::DegenerateInput(format!(
            "vertex {v_inf} out of range"
        )));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::DegenerateInput(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let faces: Vec<[usize; 3]> = rs
        .oriented_faces
        .iter()
        .copied()
        .filter(|f| !f.contains(&v_inf))
        .collect();
    let mut boundary = rs.cycle(v_inf).to_vec();
    boundary.sort_unstable();
    let interior: Vec<usize> = (0..n)
        .filter(|&v| v != v_inf && boundary.binary_search(&v).is_err())
        .collect();

    let mut s = vec![0.0; n];
    for &v in &interior {
        s[v] = 0.5;
    }
    let max_error = |s: &[f64]| {
        interior
            .iter()
            .map(|&v| (angle_sum(v, s[v], s, &faces) - 2.0 * PI).abs())
            .fold(0.0, f64::max)
    };
    let mut error = max_error(&s);
    let mut sweeps = 0;
    while error >= tol {
        if sweeps >= max_sweeps {
            return Err(Error::NoConvergence {
                iterations: sweeps,
                residual: error,
            });
        }
        for &v in &interior {
            s[v] = solve_vertex(v, &s, &faces);
        }
        sweeps += 1;
        error = max_error(&s);
    }
    // layout amplifies the angle error along chains of faces; polish past
    // `tol` while sweeps still make progress
    let polish_target = (tol * POLISH_FACTOR).max(POLISH_FLOOR);
    for _ in 0..MAX_POLISH_SWEEPS {
        if error <= polish_target {
            break;
        }
        let before = s.clone();
        for &v in &interior {
            s[v] = solve_vertex(v, &s, &faces);
        }
        let next = max_error(&s);
        if next >= error {
            s = before;
            break;
        }
        error = next;
        sweeps += 1;
    }

    let circles = layout(n, v_inf, &interior, &faces, &rs.cycles, &s)?;
    let mut packing = DiskPacking {
        triangulation: t.clone(),
        removed_vertex: v_inf,
        circles,
        boundary,
        interior,
        s_radii: s,
        faces,
        angle_sum_error: error,
        sweeps,
        max_tangency_residual: 0.0,
    };
    packing.max_tangency_residual = packing_tangency_residuals(&packing)
        .into_iter()
        .fold(0.0, f64::max);
    Ok(packing)
}

/// Tangency residual per edge of the triangulation, in lexicographic edge
/// order. Edges at the removed vertex measure internal tangency with the
/// unit circle, `|Inv + 1|`.
pub fn packing_tangency_residuals(p: &DiskPacking) -> Vec<f64> {
    p.triangulation
        .edges()
        .into_iter()
        .map(|(i, j)| {
            let inv = inversive_distance(&p.circles[i], &p.circles[j]);
            if i == p.removed_vertex || j == p.removed_vertex {
                (inv + 1.0).abs()
            } else {
                (inv - 1.0).abs()
            }
        })
        .collect()
}

fn layout(
    n: usize,
    v_inf: usize,
    interior: &[usize],
    faces: &[[usize; 3]],
    cycles: &[Vec<usize>],
    s: &[f64],
) -> Result<Vec<Circle>> {
    let mut placed: Vec<Option<Circle>> = vec![None; n];
    placed[v_inf] = Some(DiskPacking::unit_circle());

    if let Some(&v0) = interior.first() {
        // seed: first interior circle at the origin, its first neighbor on
        // the positive x-axis
        let sv = s[v0];
        let inner = (1.0 - sv) / (1.0 + sv);
        placed[v0] = Some(Circle::new(0.0, 0.0, inner)?);
        let u0 = cycles[v0][0];
        let su2 = s[u0] * s[u0];
        let outer = (1.0 - sv * su2) / (1.0 + sv * su2);
        placed[u0] = Some(Circle::new(
            0.5 * (inner + outer),
            0.0,
            0.5 * (outer - inner),
        )?);
    } else {
        // no interior vertex: three mutually tangent horocycles in the
        // symmetric position
        let f = *faces
            .first()
            .ok_or_else(|| Error::DegenerateInput("reduced complex has no faces".into()))?;
        let rho = 2.0 * 3f64.sqrt() - 3.0;
        for (k, &v) in f.iter().enumerate() {
            let theta = 2.0 * PI * k as f64 / 3.0;
            placed[v] = Some(Circle::new(
                (1.0 - rho) * theta.cos(),
                (1.0 - rho) * theta.sin(),
                rho,
            )?);
        }
    }

    loop {
        let mut progress = false;
        for f in faces {
            let missing: Vec<usize> = (0..3).filter(|&k| placed[f[k]].is_none()).collect();
            if missing.len() != 1 {
                continue;
            }
            let k = missing[0];
            let (a, b, w) = (f[(k + 1) % 3], f[(k + 2) % 3], f[k]);
            let circle = place_third(
                placed[a].as_ref().expect("placed"),
                placed[b].as_ref().expect("placed"),
                s[w],
            )?;
            placed[w] = Some(circle);
            progress = true;
        }
        if !progress {
            break;
        }
    }
    placed
        .into_iter()
        .enumerate()
        .map(|(v, c)| {
            c.ok_or_else(|| Error::DegenerateInput(format!("vertex {v} was never placed")))
        })
        .collect()
}

/// A point inside a triangular interstice and the power of that point with
/// respect to the three circles (the squared radius of their orthogonal
/// circle).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntersticePoint {
    pub x: f64,
    pub y: f64,
    pub power: f64,
}

/// The point of equal power with respect to three circles.
pub fn radical_center(a: &Circle, b: &Circle, c: &Circle) -> Result<IntersticePoint> {
    let row = |p: &Circle| {
        (
            2.0 * (p.x - a.x),
            2.0 * (p.y - a.y),
            (p.x * p.x + p.y * p.y - p.r * p.r) - (a.x * a.x + a.y * a.y - a.r * a.r),
        )
    };
    let (a11, a12, b1) = row(b);
    let (a21, a22, b2) = row(c);
    let det = a11 * a22 - a12 * a21;
    let scale = (a11.abs() + a12.abs()) * (a21.abs() + a22.abs());
    if scale == 0.0 || det.abs() <= 1e-12 * scale {
        return Err(Error::DegenerateFace(0, 1, 2));
    }
    let x = (b1 * a22 - b2 * a12) / det;
    let y = (a11 * b2 - a21 * b1) / det;
    Ok(IntersticePoint {
        x,
        y,
        power: a.power(x, y),
    })
}

/// Radical center of the three circles of a face of the reduced complex.
pub fn interstice_inversion_point(p: &DiskPacking, face: [usize; 3]) -> Result<IntersticePoint> {
    let mut key = face;
    key.sort_unstable();
    let is_face = p.faces.iter().any(|f| {
        let mut g = *f;
        g.sort_unstable();
        g == key
    });
    if !is_face {
        return Err(Error::DegenerateInput(format!(
            "({}, {}, {}) is not a face of the reduced complex",
            face[0], face[1], face[2]
        )));
    }
    let [i, j, k] = face;
    radical_center(&p.circles[i], &p.circles[j], &p.circles[k])
        .map_err(|_| Error::DegenerateFace(i, j, k))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FaceChoice {
    /// First face with no boundary vertex, else the first face, in list
    /// order.
    #[default]
    Auto,
    /// Try this face first, then the remaining faces in list order.
    Face([usize; 3]),
}

#[derive(Debug, Clone, PartialEq)]
pub struct KoebeConstruction {
    pub framework: CFramework,
    pub packing: DiskPacking,
    pub face: [usize; 3],
    pub inversion_center: IntersticePoint,
}

/// Minimum relative clearance between the inversion center and any circle.
const INVERSION_CLEARANCE: f64 = 1e-12;

/// Maximal packing followed by inversion about an interstice point.
pub fn koebe_construction(
    t: &Triangulation,
    v_inf: usize,
    face_choice: FaceChoice,
    tol: f64,
    max_sweeps: usize,
) -> Result<KoebeConstruction> {
    let packing = maximal_packing(t, v_inf, tol, max_sweeps)?;
    let on_boundary = |v: usize| packing.boundary.binary_search(&v).is_ok();
    let mut candidates: Vec<[usize; 3]> = Vec::new();
    if let FaceChoice::Face(f) = face_choice {
        candidates.push(f);
    }
    candidates.extend(
        packing
            .faces
            .iter()
            .filter(|f| !f.iter().any(|&v| on_boundary(v))),
    );
    candidates.extend(
        packing
            .faces
            .iter()
            .filter(|f| f.iter().any(|&v| on_boundary(v))),
    );

    for face in candidates {
        let Ok(q) = interstice_inversion_point(&packing, face) else {
            continue;
        };
        let clear = packing.circles.iter().all(|c| {
            let d = ((q.x - c.x).powi(2) + (q.y - c.y).powi(2)).sqrt();
            (d - c.r).abs() > INVERSION_CLEARANCE * c.r.max(1.0)
        });
        if !clear || q.power <= 0.0 {
            continue;
        }
        let inversion = MoebiusMap::new(vec![MoebiusAtom::Inversion { qx: q.x, qy: q.y }])?;
        let circles = packing
            .circles
            .iter()
            .map(|c| apply_mobius(&inversion, c))
            .collect::<Result<Vec<_>>>()?;
        let circles = normalize(circles)?;
        let framework = refine_tangency(CFramework::from_triangulation(t, circles)?);
        return Ok(KoebeConstruction {
            framework,
            packing,
            face,
            inversion_center: q,
        });
    }
    Err(Error::InversionDegenerate)
}

/// Centers the bounding box of the disks at the origin and scales the
/// smallest radius to 1.
fn normalize(circles: Vec<Circle>) -> Result<Vec<Circle>> {
    let (mut x0, mut y0, mut x1, mut y1) = (
        f64::INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::NEG_INFINITY,
    );
    let mut rmin = f64::INFINITY;
    for c in &circles {
        x0 = x0.min(c.x - c.r);
        x1 = x1.max(c.x + c.r);
        y0 = y0.min(c.y - c.r);
        y1 = y1.max(c.y + c.r);
        rmin = rmin.min(c.r);
    }
    let map = MoebiusMap::new(vec![
        MoebiusAtom::Translation {
            dx: -(x0 + x1) / 2.0,
            dy: -(y0 + y1) / 2.0,
        },
        MoebiusAtom::Dilation { s: 1.0 / rmin },
    ])?;
    circles.iter().map(|c| apply_mobius(&map, c)).collect()
}

const REFINE_STEPS: usize = 4;

fn max_residual(f: &CFramework) -> f64 {
    tangency_residuals(f).into_iter().fold(0.0, f64::max)
}

/// Gauss-Newton steps toward exact tangency after the inversion, which
/// amplifies layout error on the circles it blows up. Each step is the
/// minimum-norm solution of `J Δ = 1 − Inv` with `J = A_p R`; a step that
/// does not lower the residual is discarded.
fn refine_tangency(f: CFramework) -> CFramework {
    let mut best = f;
    let mut best_res = max_residual(&best);
    for _ in 0..REFINE_STEPS {
        if best_res == 0.0 {
            break;
        }
        let mut j = rigidity_matrix(&best).to_nalgebra();
        for (k, &(a, b)) in best.edges().iter().enumerate() {
            let (ra, rb) = (best.circle(a).r, best.circle(b).r);
            j.row_mut(k).scale_mut(-1.0 / (ra * ra * rb * rb));
        }
        let rhs = DVector::from_iterator(
            best.num_edges(),
            inversive_distance_vector(&best)
                .into_iter()
                .map(|x| 1.0 - x),
        );
        let Some(svd) = j.try_svd(true, true, f64::EPSILON, 0) else {
            break;
        };
        let cutoff = svd.singular_values.max() * 1e-12;
        let Ok(step) = svd.solve(&rhs, cutoff) else {
            break;
        };
        let p: Vec<f64> = best
            .coordinates()
            .iter()
            .zip(step.iter())
            .map(|(x, d)| x + d)
            .collect();
        let Ok(next) = best.with_coordinates(&p) else {
            break;
        };
        let res = max_residual(&next);
        if res >= best_res {
            break;
        }
        best = next;
        best_res = res;
    }
    best
}

/// Univalent tangency framework on all of `t`.
pub fn koebe_framework(
    t: &Triangulation,
    v_inf: usize,
    face_choice: FaceChoice,
    tol: f64,
) -> Result<CFramework> {
    koebe_construction(t, v_inf, face_choice, tol, DEFAULT_MAX_SWEEPS).map(|k| k.framework)
}
