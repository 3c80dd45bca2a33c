#![allow(dead_code)]

use invrig::framework::{perturb, CFramework, Triangulation};
use invrig::packing::{koebe_framework, FaceChoice, DEFAULT_PACKING_TOL};
use invrig::Circle;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Circles with small-denominator rational coordinates on a random
/// connected graph. Returns the exact coordinates alongside the float
/// framework built from their nearest doubles.
pub fn random_rational_framework<R: Rng>(
    rng: &mut R,
    max_n: usize,
) -> (Vec<[BigRational; 3]>, CFramework) {
    let n = rng.gen_range(2..=max_n);
    let coords: Vec<[BigRational; 3]> = (0..n)
        .map(|_| {
            let d = rng.gen_range(1..=9);
            [
                q(rng.gen_range(-40..=40), d),
                q(rng.gen_range(-40..=40), d),
                q(rng.gen_range(1..=30), rng.gen_range(1..=9)),
            ]
        })
        .collect();
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.3) && !edges.contains(&(i, j)) {
                edges.push((i, j));
            }
        }
    }
    let circles = coords
        .iter()
        .map(|c| {
            Circle::new(
                c[0].to_f64().unwrap(),
                c[1].to_f64().unwrap(),
                c[2].to_f64().unwrap(),
            )
            .unwrap()
        })
        .collect();
    let f = CFramework::new(circles, edges).unwrap();
    (coords, f)
}

pub fn descartes() -> CFramework {
    let s3 = 3f64.sqrt();
    let circles = vec![
        Circle::new(0.0, 0.0, 1.0).unwrap(),
        Circle::new(2.0, 0.0, 1.0).unwrap(),
        Circle::new(1.0, s3, 1.0).unwrap(),
        Circle::new(1.0, s3 / 3.0, 1.0 / (3.0 + 2.0 * s3)).unwrap(),
    ];
    CFramework::from_triangulation(&Triangulation::tetrahedron(), circles).unwrap()
}

pub fn koebe(t: &Triangulation) -> CFramework {
    koebe_framework(t, 0, FaceChoice::Auto, DEFAULT_PACKING_TOL).unwrap()
}

/// Every circle equal: the rigidity and stress matrices vanish.
pub fn coincident(t: &Triangulation) -> CFramework {
    let circles = vec![Circle::new(0.25, -0.5, 1.5).unwrap(); t.num_vertices];
    CFramework::from_triangulation(t, circles).unwrap()
}

pub struct Fixture {
    pub name: String,
    pub framework: CFramework,
    /// Tangency framework (Descartes or Koebe).
    pub tangency: bool,
    pub degenerate: bool,
}

/// Descartes, the Koebe framework of each catalog triangulation, one
/// perturbation of each, and the coincident octahedron.
pub fn fixtures() -> Vec<Fixture> {
    let mut out = vec![Fixture {
        name: "descartes".into(),
        framework: descartes(),
        tangency: true,
        degenerate: false,
    }];
    for (k, (name, t)) in Triangulation::catalog().into_iter().enumerate() {
        let f = koebe(&t);
        out.push(Fixture {
            name: format!("{name}/perturbed"),
            framework: perturb(&f, 0.05, 1000 + k as u64).unwrap(),
            tangency: false,
            degenerate: false,
        });
        out.push(Fixture {
            name,
            framework: f,
            tangency: true,
            degenerate: false,
        });
    }
    out.push(Fixture {
        name: "coincident octahedron".into(),
        framework: coincident(&Triangulation::octahedron()),
        tangency: false,
        degenerate: true,
    });
    out
}

/// Random connected framework with centers in [-2, 2]² and radii in
/// [0.5, 1.5].
pub fn random_framework<R: Rng>(rng: &mut R, max_n: usize) -> CFramework {
    let n = rng.gen_range(2..=max_n);
    let circles = (0..n)
        .map(|_| {
            Circle::new(
                rng.gen_range(-2.0..=2.0),
                rng.gen_range(-2.0..=2.0),
                rng.gen_range(0.5..=1.5),
            )
            .unwrap()
        })
        .collect();
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.3) && !edges.contains(&(i, j)) {
                edges.push((i, j));
            }
        }
    }
    CFramework::new(circles, edges).unwrap()
}
