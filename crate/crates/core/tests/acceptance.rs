//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{descartes, fixtures, koebe, q, random_framework, random_rational_framework};
use invrig::circle::apply_mobius_oriented;
use invrig::circle::random_mobius;
use invrig::combinatorics::{
    exhaustive_cauchy_check, random_labeling, CauchyMode, SignChangeCounter,
};
use invrig::framework::{tangency_residuals, univalence_check, CFramework, Triangulation};
use invrig::linalg::{numerical_rank, RealMatrix};
use invrig::packing::{koebe_construction, FaceChoice, DEFAULT_MAX_SWEEPS};
use invrig::rigidity::{
    equilibrium_stresses, inversive_distance_vector, jacobian_check, rigidity_matrix,
    rigidity_matrix_generic, rigidity_verdict, scaled_stress_matrix, stress_matrix_generic,
    trivial_motion_basis, RankMode, RigidityVerdict, ScaleAssignment,
};
use invrig::sweep::genericity_sweep;
use invrig::{inversive_distance, TolPolicy};
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// `−(r_i r_j)² ∂Inv/∂p` for one edge, from the derivative of
/// `(d² − r_i² − r_j²) / (2 r_i r_j)` worked out by hand.
fn oracle_row(c: &[[BigRational; 3]], i: usize, j: usize) -> Vec<(usize, BigRational)> {
    let two = q(2, 1);
    let [xi, yi, ri] = &c[i];
    let [xj, yj, rj] = &c[j];
    let d2 = (xi - xj) * (xi - xj) + (yi - yj) * (yi - yj);
    let w = -(ri * rj) * (ri * rj);
    let di_x = (xi - xj) / (ri * rj);
    let di_y = (yi - yj) / (ri * rj);
    let di_r = -(ri * ri + &d2 - rj * rj) / (&two * ri * ri * rj);
    let dj_r = -(rj * rj + &d2 - ri * ri) / (&two * rj * rj * ri);
    vec![
        (3 * i, &w * &di_x),
        (3 * i + 1, &w * &di_y),
        (3 * i + 2, &w * di_r),
        (3 * j, &w * -di_x),
        (3 * j + 1, &w * -di_y),
        (3 * j + 2, &w * dj_r),
    ]
}

fn transpose_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_float: f64 = 0.0;
    for s in 0..50 {
        let (coords, f) = random_rational_framework(&mut rng, 12);
        let (n, edges) = (coords.len(), f.edges());
        let m = edges.len();
        let r = rigidity_matrix_generic(&coords, edges);
        let v = stress_matrix_generic(&coords, edges);
        for (k, &(i, j)) in edges.iter().enumerate() {
            let lambda = (&coords[i][2] * &coords[j][2]) * (&coords[i][2] * &coords[j][2]);
            let mut expected = vec![BigRational::zero(); 3 * n];
            for (col, val) in oracle_row(&coords, i, j) {
                expected[col] = val;
            }
            for col in 0..3 * n {
                let vt = &v[col * m + k] * &lambda;
                ensure(r[k * 3 * n + col] == expected[col], || {
                    format!("framework {s}: R[{k}][{col}] differs from the derivative oracle")
                })?;
                ensure(vt == expected[col], || {
                    format!("framework {s}: (VΛ)ᵀ[{k}][{col}] differs from R")
                })?;
            }
        }
        let rf = rigidity_matrix(&f);
        let vf = scaled_stress_matrix(&f, &ScaleAssignment::squared_radii(&f))
            .map_err(|e| e.to_string())?;
        let scale = rf.max_abs().max(f64::MIN_POSITIVE);
        for k in 0..m {
            for col in 0..3 * n {
                worst_float = worst_float.max((rf[(k, col)] - vf[(col, k)]).abs() / scale);
            }
        }
    }
    ensure(worst_float <= 1e-12, || {
        format!("float relative error {worst_float:.2e}")
    })?;
    Ok(format!(
        "50 frameworks exact; float max relative error {worst_float:.1e}"
    ))
}

fn koebe_rigidity() -> Outcome {
    let mut names = Vec::new();
    let (mut worst_pack, mut worst_tan, mut worst_univ): (f64, f64, f64) =
        (0.0, 0.0, f64::INFINITY);
    let mut cases = 0;
    for (name, t) in Triangulation::catalog() {
        for v_inf in 0..t.num_vertices {
            let k = koebe_construction(&t, v_inf, FaceChoice::Auto, 1e-10, DEFAULT_MAX_SWEEPS)
                .map_err(|e| format!("{name} v∞={v_inf}: {e}"))?;
            let f = &k.framework;
            let n = f.num_circles();
            let want = RigidityVerdict::required_rank(n) as usize;
            let numeric = rigidity_verdict(f, RankMode::Numeric, TolPolicy::default())
                .map_err(|e| e.to_string())?;
            ensure(numeric.rank == want, || {
                format!("{name} v∞={v_inf}: numeric rank {}", numeric.rank)
            })?;
            if v_inf == 0 {
                let exact = rigidity_verdict(f, RankMode::Exact, TolPolicy::default())
                    .map_err(|e| e.to_string())?;
                ensure(exact.rank == want, || {
                    format!("{name}: exact rank {}", exact.rank)
                })?;
            }
            let stresses =
                equilibrium_stresses(f, TolPolicy::default()).map_err(|e| e.to_string())?;
            ensure(stresses.basis.is_empty(), || {
                format!("{name} v∞={v_inf}: {} stresses", stresses.basis.len())
            })?;
            ensure(k.packing.angle_sum_error < 1e-10, || {
                format!(
                    "{name} v∞={v_inf}: packing residual {:.2e}",
                    k.packing.angle_sum_error
                )
            })?;
            let tan = tangency_residuals(f).into_iter().fold(0.0, f64::max);
            ensure(tan < 1e-8, || {
                format!("{name} v∞={v_inf}: tangency residual {tan:.2e}")
            })?;
            let u = univalence_check(f, 1e-8);
            ensure(u.min_pairwise_inv >= 1.0 - 1e-8, || {
                format!("{name} v∞={v_inf}: min pairwise Inv {}", u.min_pairwise_inv)
            })?;
            worst_pack = worst_pack.max(k.packing.angle_sum_error);
            worst_tan = worst_tan.max(tan);
            worst_univ = worst_univ.min(u.min_pairwise_inv);
            cases += 1;
        }
        names.push(name);
    }
    Ok(format!(
        "{cases} (triangulation, v∞) cases over {}; packing ≤ {worst_pack:.1e}, tangency ≤ {worst_tan:.1e}, min Inv {worst_univ:.15}",
        names.join(", ")
    ))
}

fn descartes_oracle() -> Outcome {
    let f = descartes();
    let cs = f.circles();
    // Descartes: (Σk)² = 2Σk² for four mutually tangent circles
    let k: Vec<f64> = cs.iter().map(|c| 1.0 / c.r).collect();
    let lhs = k.iter().sum::<f64>().powi(2);
    let rhs = 2.0 * k.iter().map(|x| x * x).sum::<f64>();
    ensure((lhs - rhs).abs() <= 1e-12 * lhs, || {
        format!("curvatures violate Descartes: {lhs} vs {rhs}")
    })?;
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in i + 1..4 {
            worst = worst.max((inversive_distance(&cs[i], &cs[j]) - 1.0).abs());
        }
    }
    ensure(worst <= 1e-12, || format!("pairwise |Inv − 1| {worst:.2e}"))?;
    let numeric =
        rigidity_verdict(&f, RankMode::Numeric, TolPolicy::default()).map_err(|e| e.to_string())?;
    let exact =
        rigidity_verdict(&f, RankMode::Exact, TolPolicy::default()).map_err(|e| e.to_string())?;
    ensure(numeric.rank == 6 && exact.rank == 6, || {
        format!("ranks numeric {} exact {}", numeric.rank, exact.rank)
    })?;
    Ok(format!(
        "max |Inv − 1| {worst:.1e}; numeric and exact rank 6"
    ))
}

fn genericity() -> Outcome {
    let mut parts = Vec::new();
    for (name, t) in Triangulation::catalog() {
        let r = genericity_sweep(&koebe(&t), &name, 100, 0.05, 1, TolPolicy::default())
            .map_err(|e| e.to_string())?;
        ensure(r.rigid_count >= 99, || {
            format!("{name}: {} / 100 rigid", r.rigid_count)
        })?;
        parts.push(format!("{name} {}", r.rigid_count));
    }
    Ok(format!("rigid of 100: {}", parts.join(", ")))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn trivial_kernel() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut rigid = 0;
    let all = fixtures();
    for fx in &all {
        let f = &fx.framework;
        let r = rigidity_matrix(f);
        let verdict = rigidity_verdict(f, RankMode::Numeric, TolPolicy::default())
            .map_err(|e| e.to_string())?;
        let r_norm = verdict.singular_values.first().copied().unwrap_or(0.0);
        let tb = trivial_motion_basis(f).map_err(|e| e.to_string())?;
        for c in &tb.vectors {
            let rc = r.mul_vec(&c.0);
            let lhs = dot(&rc, &rc).sqrt();
            let bound = 1e-9 * r_norm * dot(&c.0, &c.0).sqrt();
            ensure(lhs <= bound, || {
                format!("{}: ‖Rc‖ = {lhs:.2e} > {bound:.2e}", fx.name)
            })?;
            if r_norm > 0.0 {
                worst = worst.max(lhs / (r_norm * dot(&c.0, &c.0).sqrt()));
            }
        }
        if !fx.degenerate {
            let gram: Vec<f64> = tb
                .vectors
                .iter()
                .flat_map(|a| tb.vectors.iter().map(move |b| dot(&a.0, &b.0)))
                .collect();
            let g = RealMatrix::from_row_major(6, 6, gram).map_err(|e| e.to_string())?;
            let rank = numerical_rank(&g, TolPolicy::default())
                .map_err(|e| e.to_string())?
                .rank;
            ensure(rank == 6, || format!("{}: Gram rank {rank}", fx.name))?;
        }
        if verdict.is_infinitesimally_rigid {
            ensure(verdict.nullity == 6, || {
                format!("{}: nullity {}", fx.name, verdict.nullity)
            })?;
            rigid += 1;
        }
    }
    Ok(format!(
        "{} fixtures ({rigid} rigid); max ‖Rc‖/(‖R‖‖c‖) {worst:.1e}",
        all.len()
    ))
}

fn stress_equivalence() -> Outcome {
    let all = fixtures();
    let mut rigid = 0;
    for fx in &all {
        let f = &fx.framework;
        ensure(f.source().is_some(), || {
            format!("{}: no triangulation source", fx.name)
        })?;
        let verdict = rigidity_verdict(f, RankMode::Numeric, TolPolicy::default())
            .map_err(|e| e.to_string())?;
        let stresses = equilibrium_stresses(f, TolPolicy::default()).map_err(|e| e.to_string())?;
        ensure(
            verdict.is_infinitesimally_rigid == stresses.basis.is_empty(),
            || {
                format!(
                    "{}: rank {} but {} stresses",
                    fx.name,
                    verdict.rank,
                    stresses.basis.len()
                )
            },
        )?;
        if fx.degenerate {
            let m = f.num_edges();
            ensure(
                verdict.rank == 0 && stresses.basis.len() == m && m == 3 * f.num_circles() - 6,
                || {
                    format!(
                        "{}: rank {}, stress nullity {} of {m}",
                        fx.name,
                        verdict.rank,
                        stresses.basis.len()
                    )
                },
            )?;
        }
        rigid += usize::from(verdict.is_infinitesimally_rigid);
    }
    Ok(format!(
        "{} fixtures, {rigid} rigid with no stress, degenerate rank 0 with stress nullity m",
        all.len()
    ))
}

fn cauchy() -> Outcome {
    let tet = exhaustive_cauchy_check(&Triangulation::tetrahedron(), CauchyMode::Exhaustive)
        .map_err(|e| e.to_string())?;
    ensure(tet.labelings == 729 && tet.ok() && tet.checked > 0, || {
        format!("tetrahedron: {tet:?}")
    })?;
    let oct = exhaustive_cauchy_check(
        &Triangulation::octahedron(),
        CauchyMode::Sampled {
            samples: 100_000,
            seed: 7,
        },
    )
    .map_err(|e| e.to_string())?;
    ensure(oct.labelings == 100_000 && oct.ok(), || {
        format!("octahedron: {:?}", oct.counterexample)
    })?;

    let catalog = Triangulation::catalog();
    let counters: Vec<SignChangeCounter> = catalog
        .iter()
        .map(|(_, t)| SignChangeCounter::new(t))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..10_000u64 {
        let c = &counters[rng.gen_range(0..counters.len())];
        let s = random_labeling(c.num_edges(), trial);
        let v = rng.gen_range(0..c.num_vertices());
        let count = c.count(&s, v);
        ensure(count.is_multiple_of(2), || {
            format!("odd count {count} at vertex {v}")
        })?;
    }
    Ok(format!(
        "tetrahedron 729 labelings ({} meet the hypothesis), octahedron 1e5 samples ({} meet it), parity on 1e4 triples",
        tet.checked, oct.checked
    ))
}

fn tangency_cone() -> Outcome {
    let (mut worst_cone, mut worst_z): (f64, f64) = (0.0, 0.0);
    let mut count = 0;
    for fx in fixtures().into_iter().filter(|fx| fx.tangency) {
        let f = &fx.framework;
        let s = scaled_stress_matrix(f, &ScaleAssignment::radii_product(f))
            .map_err(|e| e.to_string())?;
        for (k, &(i, j)) in f.edges().iter().enumerate() {
            let sum = f.circle(i).r + f.circle(j).r;
            for v in [i, j] {
                let (x, y, z) = (s[(3 * v, k)], s[(3 * v + 1, k)], s[(3 * v + 2, k)]);
                let cone = (z * z - x * x - y * y).abs() / (1.0 + z * z);
                let dz = (z - sum).abs();
                ensure(cone <= 1e-10, || {
                    format!("{} edge ({i},{j}): cone residual {cone:.2e}", fx.name)
                })?;
                ensure(dz <= 1e-12, || {
                    format!("{} edge ({i},{j}): |z − (r_i + r_j)| = {dz:.2e}", fx.name)
                })?;
                worst_cone = worst_cone.max(cone);
                worst_z = worst_z.max(dz);
            }
        }
        count += 1;
    }
    Ok(format!(
        "{count} tangency fixtures; cone ≤ {worst_cone:.1e}, |z − (r_i + r_j)| ≤ {worst_z:.1e}"
    ))
}

fn jacobian() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for s in 0..20 {
        let f = random_framework(&mut rng, 12);
        let res = jacobian_check(&f, 1e-5).map_err(|e| e.to_string())?;
        ensure(res <= 1e-6, || format!("framework {s}: residual {res:.2e}"))?;
        worst = worst.max(res);
    }
    Ok(format!("20 frameworks; max residual {worst:.1e}"))
}

fn mobius_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let catalog = Triangulation::catalog();
    let bases: Vec<CFramework> = catalog.iter().map(|(_, t)| koebe(t)).collect();
    let mut worst: f64 = 0.0;
    let mut rejected = 0;
    let mut map_seed = 0u64;
    for pair in 0..100 {
        let f = if pair % 2 == 0 {
            let b = &bases[rng.gen_range(0..bases.len())];
            invrig::framework::perturb(b, 0.05, rng.gen()).map_err(|e| e.to_string())?
        } else {
            random_framework(&mut rng, 12)
        };
        // draw maps until one is non-degenerate and flips no disk
        let g = loop {
            map_seed += 1;
            let map = random_mobius(map_seed, 1.0).map_err(|e| e.to_string())?;
            let image: Option<Vec<_>> = f
                .circles()
                .iter()
                .map(|c| match apply_mobius_oriented(&map, c) {
                    Ok((d, false)) => Some(d),
                    _ => None,
                })
                .collect();
            match image {
                Some(cs) => {
                    break f.with_coordinates(
                        &cs.iter().flat_map(|c| [c.x, c.y, c.r]).collect::<Vec<_>>(),
                    )
                }
                None => rejected += 1,
            }
        }
        .map_err(|e| e.to_string())?;
        let (a, b) = (inversive_distance_vector(&f), inversive_distance_vector(&g));
        for (k, (x, y)) in a.iter().zip(&b).enumerate() {
            let d = (x - y).abs();
            ensure(d <= 1e-9, || format!("pair {pair} edge {k}: {x} vs {y}"))?;
            worst = worst.max(d);
        }
        let va = rigidity_verdict(&f, RankMode::Numeric, TolPolicy::default())
            .map_err(|e| e.to_string())?;
        let vb = rigidity_verdict(&g, RankMode::Numeric, TolPolicy::default())
            .map_err(|e| e.to_string())?;
        ensure(
            va.rank == vb.rank && va.is_infinitesimally_rigid == vb.is_infinitesimally_rigid,
            || format!("pair {pair}: rank {} vs {}", va.rank, vb.rank),
        )?;
    }
    Ok(format!(
        "100 pairs ({rejected} maps rejected for flips or degeneracy); max |ΔInv| {worst:.1e}; verdicts agree"
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("transpose identity", transpose_identity),
        ("univalent tangency rigidity", koebe_rigidity),
        ("Descartes oracle", descartes_oracle),
        ("genericity", genericity),
        ("trivial-motion kernel", trivial_kernel),
        ("stress-rigidity equivalence", stress_equivalence),
        ("Cauchy lemma", cauchy),
        ("tangency cone", tangency_cone),
        ("Jacobian identity", jacobian),
        ("Möbius invariance", mobius_invariance),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{secs:.1}s]", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
