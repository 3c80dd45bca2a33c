//! Planar circles, inversive distance, and Möbius transformations acting on
//! circles.
//!
//! A Möbius map is stored as an ordered list of atoms (translations,
//! rotations about the origin, dilations about the origin, and inversions in
//! unit circles). Circles are unoriented: an inversion whose center lies
//! inside a disk sends that disk to the complement of the image disk, and
//! [`apply_mobius_oriented`] reports when this happens.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A circle in the plane with center `(x, y)` and radius `r > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub x: f64,
    pub y: f64,
    pub r: f64,
}

impl Circle {
    pub fn new(x: f64, y: f64, r: f64) -> Result<Self> {
        let c = Circle { x, y, r };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let reason = if !(self.x.is_finite() && self.y.is_finite() && self.r.is_finite()) {
            "coordinates must be finite"
        } else if self.r <= 0.0 {
            "radius must be positive"
        } else {
            return Ok(());
        };
        Err(Error::InvalidCircle {
            x: self.x,
            y: self.y,
            r: self.r,
            reason,
        })
    }

    /// Squared distance between the two centers.
    pub fn center_dist2(&self, other: &Circle) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    /// Power of the point `(px, py)` with respect to this circle.
    pub fn power(&self, px: f64, py: f64) -> f64 {
        let dx = px - self.x;
        let dy = py - self.y;
        dx * dx + dy * dy - self.r * self.r
    }

    /// Coordinates `(b, b̄, b·x, b·y)` on the hyperboloid `b b̄ − |w|² = −1`,
    /// where `b = 1/r` is the curvature and `b̄ = (x² + y² − r²)/r` the
    /// co-curvature. The bilinear form [`lorentz_form`] of two such vectors is
    /// their inversive distance.
    pub fn lorentz(&self) -> [f64; 4] {
        let b = 1.0 / self.r;
        let cb = (self.x * self.x + self.y * self.y - self.r * self.r) / self.r;
        [b, cb, self.x * b, self.y * b]
    }

    /// Inverse of [`Circle::lorentz`]. Fails for non-positive curvature.
    pub fn from_lorentz(q: [f64; 4]) -> Result<Self> {
        if q[0].is_nan() || q[0] <= 0.0 {
            return Err(Error::DegenerateInput(format!(
                "curvature {} does not describe a bounded disk",
                q[0]
            )));
        }
        Circle::new(q[2] / q[0], q[3] / q[0], 1.0 / q[0])
    }
}

/// The indefinite form `(b₁ b̄₂ + b̄₁ b₂)/2 − w₁·w₂`.
pub fn lorentz_form(p: &[f64; 4], q: &[f64; 4]) -> f64 {
    0.5 * (p[0] * q[1] + p[1] * q[0]) - p[2] * q[2] - p[3] * q[3]
}

/// Inversive distance `(d² − r_a² − r_b²) / (2 r_a r_b)`.
///
/// Equals 1 for externally tangent circles, 0 for orthogonal ones, exceeds 1
/// for disjoint closed disks and falls below −1 when one disk strictly
/// contains the other.
pub fn inversive_distance(a: &Circle, b: &Circle) -> f64 {
    let d2 = a.center_dist2(b);
    // symmetric by construction: every term commutes
    (d2 - (a.r * a.r + b.r * b.r)) / (2.0 * (a.r * b.r))
}

/// A single Möbius generator acting on the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MoebiusAtom {
    Translation {
        dx: f64,
        dy: f64,
    },
    /// Rotation by `theta` radians about the origin.
    Rotation {
        theta: f64,
    },
    /// Dilation about the origin by `s > 0`.
    Dilation {
        s: f64,
    },
    /// Inversion in the unit circle centered at `(qx, qy)`.
    Inversion {
        qx: f64,
        qy: f64,
    },
}

/// A composition of atoms, applied first to last. The empty list is the
/// identity.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MoebiusMap {
    atoms: Vec<MoebiusAtom>,
}

impl MoebiusMap {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn new(atoms: Vec<MoebiusAtom>) -> Result<Self> {
        for a in &atoms {
            let ok = match *a {
                MoebiusAtom::Translation { dx, dy } => dx.is_finite() && dy.is_finite(),
                MoebiusAtom::Rotation { theta } => theta.is_finite(),
                MoebiusAtom::Dilation { s } => s.is_finite() && s > 0.0,
                MoebiusAtom::Inversion { qx, qy } => qx.is_finite() && qy.is_finite(),
            };
            if !ok {
                return Err(Error::InvalidMoebius(format!("{a:?}")));
            }
        }
        Ok(MoebiusMap { atoms })
    }

    pub fn atoms(&self) -> &[MoebiusAtom] {
        &self.atoms
    }

    pub fn is_identity(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &MoebiusMap) -> MoebiusMap {
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms);
        MoebiusMap { atoms }
    }

    pub fn inverse(&self) -> MoebiusMap {
        let atoms = self
            .atoms
            .iter()
            .rev()
            .map(|a| match *a {
                MoebiusAtom::Translation { dx, dy } => {
                    MoebiusAtom::Translation { dx: -dx, dy: -dy }
                }
                MoebiusAtom::Rotation { theta } => MoebiusAtom::Rotation { theta: -theta },
                MoebiusAtom::Dilation { s } => MoebiusAtom::Dilation { s: 1.0 / s },
                inv @ MoebiusAtom::Inversion { .. } => inv,
            })
            .collect();
        MoebiusMap { atoms }
    }

    /// Image of a point. Points sent to infinity come back as `None`.
    pub fn map_point(&self, x: f64, y: f64) -> Option<(f64, f64)> {
        let (mut x, mut y) = (x, y);
        for a in &self.atoms {
            match *a {
                MoebiusAtom::Translation { dx, dy } => {
                    x += dx;
                    y += dy;
                }
                MoebiusAtom::Rotation { theta } => {
                    let (s, c) = theta.sin_cos();
                    (x, y) = (c * x - s * y, s * x + c * y);
                }
                MoebiusAtom::Dilation { s } => {
                    x *= s;
                    y *= s;
                }
                MoebiusAtom::Inversion { qx, qy } => {
                    let (u, v) = (x - qx, y - qy);
                    let n = u * u + v * v;
                    if n == 0.0 {
                        return None;
                    }
                    x = qx + u / n;
                    y = qy + v / n;
                }
            }
        }
        Some((x, y))
    }
}

fn invert_circle(c: &Circle, qx: f64, qy: f64) -> Result<(Circle, bool)> {
    let (u, v) = (c.x - qx, c.y - qy);
    let d2 = u * u + v * v;
    let k = d2 - c.r * c.r;
    let d = d2.sqrt();
    if (d - c.r).abs() <= 1e-12 * c.r.max(d) {
        return Err(Error::DegenerateImage { qx, qy });
    }
    let img = Circle {
        x: qx + u / k,
        y: qy + v / k,
        r: c.r / k.abs(),
    };
    Ok((img, k < 0.0))
}

/// Image of `c` under `m`, together with a flag that is `true` when an odd
/// number of inversion stages had their center strictly inside the disk,
/// i.e. when the disk bounded by `c` maps to the exterior of the returned
/// circle.
pub fn apply_mobius_oriented(m: &MoebiusMap, c: &Circle) -> Result<(Circle, bool)> {
    let mut cur = *c;
    let mut flipped = false;
    for a in &m.atoms {
        match *a {
            MoebiusAtom::Translation { dx, dy } => {
                cur.x += dx;
                cur.y += dy;
            }
            MoebiusAtom::Rotation { theta } => {
                let (s, co) = theta.sin_cos();
                (cur.x, cur.y) = (co * cur.x - s * cur.y, s * cur.x + co * cur.y);
            }
            MoebiusAtom::Dilation { s } => {
                cur.x *= s;
                cur.y *= s;
                cur.r *= s;
            }
            MoebiusAtom::Inversion { qx, qy } => {
                let (img, f) = invert_circle(&cur, qx, qy)?;
                cur = img;
                flipped ^= f;
            }
        }
    }
    Ok((cur, flipped))
}

/// Image of `c` under `m`.
pub fn apply_mobius(m: &MoebiusMap, c: &Circle) -> Result<Circle> {
    apply_mobius_oriented(m, c).map(|(img, _)| img)
}

/// The `k`-th basis one-parameter Möbius family evaluated at parameter `t`
/// (`k` in 1..=6): x-translation, y-translation, rotation about the origin,
/// dilation about the origin, `z ↦ z/(1 − tz)` and `z ↦ z/(1 − itz)`.
///
/// The last two are realized as inversion, translation, inversion.
pub fn generator_family(k: usize, t: f64) -> MoebiusMap {
    use MoebiusAtom::*;
    let inv = Inversion { qx: 0.0, qy: 0.0 };
    let atoms = match k {
        1 => vec![Translation { dx: t, dy: 0.0 }],
        2 => vec![Translation { dx: 0.0, dy: t }],
        3 => vec![Rotation { theta: t }],
        4 => vec![Dilation { s: t.exp() }],
        5 => vec![inv, Translation { dx: -t, dy: 0.0 }, inv],
        6 => vec![inv, Translation { dx: 0.0, dy: t }, inv],
        _ => panic!("generator index {k} outside 1..=6"),
    };
    MoebiusMap { atoms }
}

/// Infinitesimal motion `(x', y', r')` of `c` under the `k`-th generator
/// family at `t = 0`.
pub fn mobius_generator_field(k: usize, c: &Circle) -> [f64; 3] {
    let Circle { x, y, r } = *c;
    match k {
        1 => [1.0, 0.0, 0.0],
        2 => [0.0, 1.0, 0.0],
        3 => [-y, x, 0.0],
        4 => [x, y, r],
        5 => [x * x - y * y + r * r, 2.0 * x * y, 2.0 * r * x],
        6 => [-2.0 * x * y, x * x - y * y - r * r, -2.0 * r * y],
        _ => panic!("generator index {k} outside 1..=6"),
    }
}

/// Deterministic random composition of 3 to 6 atoms whose parameters are
/// bounded by `magnitude`. A zero magnitude yields the identity.
pub fn random_mobius(seed: u64, magnitude: f64) -> Result<MoebiusMap> {
    if !magnitude.is_finite() || magnitude < 0.0 {
        return Err(Error::InvalidMoebius(format!(
            "magnitude must be a finite non-negative number, got {magnitude}"
        )));
    }
    if magnitude == 0.0 {
        return Ok(MoebiusMap::identity());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = rng.gen_range(3..=6);
    let mut atoms = Vec::with_capacity(len);
    for _ in 0..len {
        let atom = match rng.gen_range(0..4) {
            0 => MoebiusAtom::Translation {
                dx: rng.gen_range(-magnitude..=magnitude),
                dy: rng.gen_range(-magnitude..=magnitude),
            },
            1 => MoebiusAtom::Rotation {
                theta: rng.gen_range(-1.0..=1.0) * magnitude.min(PI),
            },
            2 => MoebiusAtom::Dilation {
                s: (rng.gen_range(-0.5..=0.5) * magnitude).exp(),
            },
            _ => {
                let span = 3.0 * magnitude;
                let mut qx = rng.gen_range(-span..=span);
                let mut qy = rng.gen_range(-span..=span);
                // keep clear of integer points on the coordinate axes
                let near_int = |v: f64| (v - v.round()).abs() < 1e-3;
                if (qy.abs() < 1e-3 && near_int(qx)) || (qx.abs() < 1e-3 && near_int(qy)) {
                    qx += 0.371;
                    qy += 0.229;
                }
                MoebiusAtom::Inversion { qx, qy }
            }
        };
        atoms.push(atom);
    }
    Ok(MoebiusMap { atoms })
}
