//! Acceptance suite. Runs without the libtest harness so that every check
//! prints its PASS/FAIL line; the process exits non-zero if any check fails.

use std::process::ExitCode;
use std::time::Instant;

use nalgebra::{DVector, Matrix3, Vector3};
use rand::{rngs::StdRng, Rng, SeedableRng};

use nhreduce::connections::{
    abelian_translation_connection, canonical_group_connection, equivariance_defect, Translation,
};
use nhreduce::dldps::{fd_check_gradients, newton_step, DldpsSystem, PathPair};
use nhreduce::ll_reduce::{
    configurations, connection_independence_check, eps_residual, eta_path, eta_points, full_path,
    momentum_evolution_check, momentum_path, project_full_to_eta, reconstruct,
};
use nhreduce::matgroup::{cay, cay_inv, mat_to_vec, orthogonality_drift, vec_to_mat, So3};
use nhreduce::staged::{
    build_particle_reduced, particle_initial, staged_equivalence_test, translate_full, ParticleStage,
};
use nhreduce::suslov::{build_suslov, default_inertia, default_w0, mass_tensor, suslov_spec};
use nhreduce::{integrate, verify_trajectory, DiscretePath, InertiaParams, NewtonOptions, SuslovLevel};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

struct SuslovRun {
    full: DiscretePath,
    g: Vec<Matrix3<f64>>,
    w: Vec<Matrix3<f64>>,
    seconds: f64,
}

fn suslov_run() -> SuslovRun {
    let sys = build_suslov(SuslovLevel::Full, &default_inertia()).unwrap();
    let initial = PathPair::new(mat_to_vec(&Matrix3::identity()), mat_to_vec(&default_w0()));
    let start = Instant::now();
    let full = integrate(&sys, &initial, 200, &NewtonOptions::default()).expect("full Suslov run converges");
    let seconds = start.elapsed().as_secs_f64();
    let g = configurations(&full);
    let w = eta_points(&project_full_to_eta(&full));
    SuslovRun { full, g, w, seconds }
}

fn max_dist(a: &[Matrix3<f64>], b: &[Matrix3<f64>]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs().max()).fold(0.0, f64::max)
}

fn suslov_full_integration(run: &SuslovRun) -> Outcome {
    let sys = build_suslov(SuslovLevel::Full, &default_inertia()).unwrap();
    let rep = verify_trajectory(&sys, &run.full, 1e-10);
    let ortho = run.g.iter().map(orthogonality_drift).fold(0.0, f64::max);
    let passed =
        run.full.len() == 201 && rep.max_dynamic <= 1e-10 && rep.max_kinematic <= 1e-10 && ortho <= 1e-9 && run.seconds < 2.0;
    outcome(
        passed,
        format!(
            "dynamic {:.2e}, S_d {:.2e}, orthogonality {:.2e}, {:.3} s",
            rep.max_dynamic, rep.max_kinematic, ortho, run.seconds
        ),
    )
}

fn three_level_equivalence(run: &SuslovRun) -> Outcome {
    let i = default_inertia();
    let spec = suslov_spec(&i).unwrap();
    let eta_sys = build_suslov(SuslovLevel::Eta, &i).unwrap();
    let mom_sys = build_suslov(SuslovLevel::Momentum, &i).unwrap();
    let eta_rep = verify_trajectory(&eta_sys, &eta_path(&run.w), 1e-9);
    let p: Vec<_> = run.w.iter().map(|w| spec.legendre(w)).collect();
    let mom_rep = verify_trajectory(&mom_sys, &momentum_path(&p), 1e-9);

    let initial = PathPair::new(mat_to_vec(&default_w0()), DVector::zeros(0));
    let indep = integrate(&eta_sys, &initial, 200, &NewtonOptions::default()).expect("eta run converges");
    let dev = max_dist(&eta_points(&indep), &run.w);
    outcome(
        eta_rep.passed && mom_rep.passed && dev <= 1e-8,
        format!(
            "eta max {:.2e}, momentum max {:.2e}, independent eta run deviation {:.2e}",
            eta_rep.max_dynamic.max(eta_rep.max_kinematic).max(eta_rep.max_drift),
            mom_rep.max_dynamic.max(mom_rep.max_kinematic).max(mom_rep.max_drift),
            dev
        ),
    )
}

fn reconstruction(run: &SuslovRun) -> Outcome {
    let eta_sys = build_suslov(SuslovLevel::Eta, &default_inertia()).unwrap();
    let initial = PathPair::new(mat_to_vec(&default_w0()), DVector::zeros(0));
    let eta = integrate(&eta_sys, &initial, 200, &NewtonOptions::default()).expect("eta run converges");
    let lifted = reconstruct(&So3::identity(), &eta_points(&eta), &run.g[0]);
    let dev = max_dist(&lifted, &run.g);
    let full_sys = build_suslov(SuslovLevel::Full, &default_inertia()).unwrap();
    let rep = verify_trajectory(&full_sys, &full_path(&lifted), 1e-9);
    outcome(
        dev <= 1e-9 && rep.passed,
        format!("pointwise deviation {dev:.2e}, lifted path verifies: {}", rep.passed),
    )
}

fn eps_equations(run: &SuslovRun) -> Outcome {
    let spec = suslov_spec(&default_inertia()).unwrap();
    let mut closed: f64 = 0.0;
    let mut pipeline: f64 = 0.0;
    for k in 0..run.w.len() - 1 {
        let (pk, pn) = (spec.legendre(&run.w[k]), spec.legendre(&run.w[k + 1]));
        let wk = run.w[k];
        let r = spec.subspace.project_onto(&(pn.matrix() - wk.transpose() * pk.matrix() * wk));
        closed = closed.max(r.amax());
        pipeline = pipeline.max(eps_residual(&spec, &pk, &pn, None).map(|r| r.amax()).unwrap_or(f64::INFINITY));
    }
    outcome(
        closed <= 1e-9 && pipeline <= 1e-9,
        format!("closed form {closed:.2e}, through inverse Legendre {pipeline:.2e}"),
    )
}

fn momentum_evolution(run: &SuslovRun) -> Outcome {
    let spec = suslov_spec(&default_inertia()).unwrap();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for eta in [Vector3::x(), Vector3::y()] {
        match momentum_evolution_check(&spec, &run.g, &eta) {
            Ok(r) => {
                count += r.len();
                worst = r.iter().fold(worst, |m, x| m.max(x.abs()));
            }
            Err(_) => worst = f64::INFINITY,
        }
    }
    outcome(worst <= 1e-9 && count == 2 * (run.g.len() - 2), format!("max residual {worst:.2e} over {count} checks"))
}

fn connection_independence(run: &SuslovRun) -> Outcome {
    let spec = suslov_spec(&default_inertia()).unwrap();
    let h = So3::cay(&Vector3::new(0.0, 0.0, 0.4));
    let rep = connection_independence_check(&spec, &h, &run.g, 1e-9).unwrap();
    let hmax = rep.reduced_h.max_dynamic.max(rep.reduced_h.max_kinematic).max(rep.reduced_h.max_drift);
    outcome(
        rep.passed,
        format!("h-model max residual {hmax:.2e}, |V - W h^-1| {:.2e}", rep.max_deviation),
    )
}

fn staged_reduction() -> Outcome {
    let init = particle_initial([0.0, 1.0, 0.0], 0.1, 0.05);
    match staged_equivalence_test(0.1, &init, 100, &NewtonOptions::default(), 1e-9) {
        Ok((_, rep)) => {
            let worst = [&rep.full, &rep.h, &rep.g, &rep.g_over_h]
                .iter()
                .map(|r| r.max_dynamic.max(r.max_kinematic).max(r.max_drift))
                .fold(0.0, f64::max);
            outcome(
                rep.passed && rep.f_defect == 0.0,
                format!("max stage residual {worst:.2e}, F defect {:e}", rep.f_defect),
            )
        }
        Err(e) => outcome(false, format!("integration failed: {e}")),
    }
}

fn random_rotation(rng: &mut StdRng, scale: f64) -> Matrix3<f64> {
    cay(&Vector3::from_fn(|_, _| rng.gen_range(-scale..scale)))
}

fn random_vec(rng: &mut StdRng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.gen_range(-2.0..2.0))
}

fn gradient_checks() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2024);
    let i = default_inertia();
    let j = mass_tensor(&i).unwrap();
    let n = 1000;
    let mut parts = Vec::new();

    let full: Vec<PathPair> = (0..n)
        .map(|_| {
            PathPair::new(mat_to_vec(&random_rotation(&mut rng, 2.0)), mat_to_vec(&random_rotation(&mut rng, 2.0)))
        })
        .collect();
    let eta: Vec<PathPair> = (0..n)
        .map(|_| PathPair::new(mat_to_vec(&random_rotation(&mut rng, 1.0)), DVector::zeros(0)))
        .collect();
    let mom: Vec<PathPair> = (0..n)
        .map(|_| {
            let w = random_rotation(&mut rng, 0.4);
            let p = w * j - j * w.transpose();
            let v = Vector3::new(p[(2, 1)], p[(0, 2)], p[(1, 0)]);
            PathPair::new(DVector::from_column_slice(v.as_slice()), DVector::zeros(0))
        })
        .collect();
    for (name, level, samples) in [
        ("suslov-full", SuslovLevel::Full, &full),
        ("suslov-eta", SuslovLevel::Eta, &eta),
        ("suslov-momentum", SuslovLevel::Momentum, &mom),
    ] {
        let sys = build_suslov(level, &i).unwrap();
        parts.push((name, fd_check_gradients(&sys, samples, 1e-6, &mut rng)));
    }
    for stage in ParticleStage::ALL {
        let sys = build_particle_reduced(stage, 0.1).unwrap();
        let nb = sys.bundle().base_dim();
        let samples: Vec<PathPair> =
            (0..n).map(|_| PathPair::new(random_vec(&mut rng, 3), random_vec(&mut rng, nb))).collect();
        parts.push((
            match stage {
                ParticleStage::Full => "particle-full",
                ParticleStage::H => "particle-H",
                ParticleStage::G => "particle-G",
                ParticleStage::GOverH => "particle-G/H",
            },
            fd_check_gradients(&sys, &samples, 1e-6, &mut rng),
        ));
    }
    let worst = parts.iter().map(|p| p.1).fold(0.0, f64::max);
    let detail = parts.iter().map(|(n, e)| format!("{n} {e:.1e}")).collect::<Vec<_>>().join(", ");
    outcome(worst <= 1e-6, detail)
}

/// Independent Cayley map `(I + A/2)(I − A/2)⁻¹`.
fn oracle_cay(w1: f64, w2: f64) -> Matrix3<f64> {
    let a = Matrix3::new(0.0, 0.0, w2, 0.0, 0.0, -w1, -w2, w1, 0.0);
    let id = Matrix3::identity();
    (id + a * 0.5) * (id - a * 0.5).try_inverse().unwrap()
}

/// Norm of the 𝔡-components of `(W₁𝕁 − 𝕁W₁ᵗ) − (𝕁W₀ − W₀ᵗ𝕁)` with
/// `W₁ = cay(ω₁, ω₂, 0)`.
fn oracle_residual(j: &Matrix3<f64>, w0: &Matrix3<f64>, w1: f64, w2: f64) -> f64 {
    let w = oracle_cay(w1, w2);
    let m = (w * j - j * w.transpose()) - (j * w0 - w0.transpose() * j);
    let (r1, r2) = (m[(2, 1)], m[(0, 2)]);
    (r1 * r1 + r2 * r2).sqrt()
}

/// Grid search over `(ω₁, ω₂)` with repeated interval halving around the
/// best node.
fn oracle_step(j: &Matrix3<f64>, w0: &Matrix3<f64>, center: (f64, f64)) -> (f64, f64) {
    let (mut c1, mut c2) = center;
    let mut half = 0.5;
    let n = 40;
    while half > 1e-12 {
        let mut best = (f64::INFINITY, c1, c2);
        for a in 0..=n {
            for b in 0..=n {
                let x = c1 - half + 2.0 * half * a as f64 / n as f64;
                let y = c2 - half + 2.0 * half * b as f64 / n as f64;
                let r = oracle_residual(j, w0, x, y);
                if r < best.0 {
                    best = (r, x, y);
                }
            }
        }
        c1 = best.1;
        c2 = best.2;
        half *= 0.5;
    }
    (c1, c2)
}

/// Largest gap between five Newton steps of the eta model and the oracle.
fn oracle_gap(i: &InertiaParams) -> Result<(f64, f64), String> {
    let j = mass_tensor(i).unwrap();
    let sys: DldpsSystem = build_suslov(SuslovLevel::Eta, i).unwrap();
    let mut prev = PathPair::new(mat_to_vec(&default_w0()), DVector::zeros(0));
    let mut worst: f64 = 0.0;
    let mut moved: f64 = 0.0;
    for _ in 0..5 {
        let step = newton_step(&sys, &prev, &prev, &NewtonOptions::default()).map_err(|e| e.to_string())?;
        let w_prev = vec_to_mat(prev.eps.as_slice());
        let newton = cay_inv(&vec_to_mat(step.pair.eps.as_slice())).unwrap();
        let seed = cay_inv(&w_prev).unwrap();
        let (o1, o2) = oracle_step(&j, &w_prev, (seed[0], seed[1]));
        worst = worst.max((newton[0] - o1).abs()).max((newton[1] - o2).abs());
        moved = moved.max((newton - seed).amax());
        prev = step.pair;
    }
    Ok((worst, moved))
}

/// Runs the spot-check at the default inertia, where every point of `S_d` is
/// an equilibrium of the eta model, and at a tensor with nonzero products of
/// inertia, where the steps move.
fn oracle_spot_check() -> Outcome {
    let generic = InertiaParams::new(2.0, 3.0, 4.0, 0.3, -0.2).unwrap();
    match (oracle_gap(&default_inertia()), oracle_gap(&generic)) {
        (Ok((d, dm)), Ok((g, gm))) => outcome(
            d <= 1e-6 && g <= 1e-6,
            format!("max chart-coordinate gap {d:.2e} (step size {dm:.1e}); with I13, I23 != 0: {g:.2e} (step size {gm:.1e})"),
        ),
        (a, b) => outcome(false, format!("Newton step failed: {:?} {:?}", a.err(), b.err())),
    }
}

fn invariances(run: &SuslovRun) -> Outcome {
    let mut rng = StdRng::seed_from_u64(99);
    let sys = build_suslov(SuslovLevel::Full, &default_inertia()).unwrap();
    let mut suslov: f64 = 0.0;
    for _ in 0..5 {
        let a = random_rotation(&mut rng, 3.0);
        let moved: Vec<_> = run.g.iter().map(|g| a * g).collect();
        let moved = full_path(&moved);
        for k in 1..run.full.len() {
            let r0 = sys.residual_vector(&run.full.pairs[k - 1], &run.full.pairs[k]).unwrap();
            let r1 = sys.residual_vector(&moved.pairs[k - 1], &moved.pairs[k]).unwrap();
            suslov = suslov.max((r0 - r1).amax());
        }
    }

    let init = particle_initial([0.0, 1.0, 0.0], 0.1, 0.05);
    let full_p = build_particle_reduced(ParticleStage::Full, 0.1).unwrap();
    let path = integrate(&full_p, &init, 100, &NewtonOptions::default()).unwrap();
    let mut particle: f64 = 0.0;
    let mut particle_tol: f64 = 0.0;
    for (a, c) in [(0.5, -0.25), (3.0, 1.5), (-1.0, 8.0)] {
        let moved = translate_full(&path, a, c);
        let scale = moved.pairs.iter().chain(&path.pairs).map(|p| p.eps.amax().max(p.m_next.amax())).fold(0.0, f64::max);
        particle_tol = particle_tol.max(ULPS * f64::EPSILON * scale / 0.1);
        for k in 1..path.len() {
            let r0 = full_p.residual_vector(&path.pairs[k - 1], &path.pairs[k]).unwrap();
            let r1 = full_p.residual_vector(&moved.pairs[k - 1], &moved.pairs[k]).unwrap();
            particle = particle.max((r0 - r1).amax());
        }
    }

    let mut equiv: f64 = 0.0;
    let conns = [
        canonical_group_connection(So3::identity()),
        canonical_group_connection(So3::cay(&Vector3::new(0.0, 0.0, 0.4))),
        canonical_group_connection(So3::cay(&Vector3::new(0.7, -1.1, 0.3))),
    ];
    for _ in 0..1000 {
        let s: Vec<So3> = (0..4).map(|_| So3::cay(&Vector3::from_fn(|_, _| rng.gen_range(-3.0..3.0)))).collect();
        for c in &conns {
            equiv = equiv.max(equivariance_defect(c, &s[0], &s[1], &s[2], &s[3]));
        }
        for (n, idx) in [(3usize, vec![2usize]), (3, vec![0, 2]), (2, vec![0])] {
            let c = abelian_translation_connection(n, &idx);
            let g0 = Translation(random_vec(&mut rng, idx.len()));
            let g1 = Translation(random_vec(&mut rng, idx.len()));
            equiv = equiv.max(equivariance_defect(&c, &g0, &g1, &random_vec(&mut rng, n), &random_vec(&mut rng, n)));
        }
    }
    outcome(
        suslov <= 1e-12 && particle <= particle_tol && equiv <= 1e-12,
        format!("suslov {suslov:.2e}, particle {particle:.2e} (rounding bound {particle_tol:.1e}), connection equivariance {equiv:.2e}"),
    )
}

/// Translating floating-point coordinates rounds them, so the particle
/// residuals are compared up to this many ulps of the largest coordinate,
/// scaled by `1/h`.
const ULPS: f64 = 16.0;

fn main() -> ExitCode {
    let run = suslov_run();
    let checks: Vec<(&str, Outcome)> = vec![
        ("suslov full-level integration", suslov_full_integration(&run)),
        ("three-level equivalence", three_level_equivalence(&run)),
        ("reconstruction", reconstruction(&run)),
        ("discrete EPS residual", eps_equations(&run)),
        ("momentum evolution", momentum_evolution(&run)),
        ("connection independence", connection_independence(&run)),
        ("staged reduction", staged_reduction()),
        ("gradient cross-checks", gradient_checks()),
        ("oracle spot-check", oracle_spot_check()),
        ("invariance suite", invariances(&run)),
    ];
    let mut failed = 0;
    for (k, (name, o)) in checks.iter().enumerate() {
        println!("{} [{:>2}] {name}: {}", if o.passed { "PASS" } else { "FAIL" }, k + 1, o.detail);
        if !o.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
