//! Acceptance suite: one line per criterion, non-zero exit status if any fails.
//!
//! Built with `harness = false` so the verdict lines are always printed.

mod common;

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};
use std::time::{Duration, Instant};

use common::{gaussian, hermitian, max_diff, positive_definite, real_vec, rng, sturm_eigenvalues};
use rand::seq::SliceRandom;
use rand::Rng;
use ritz_core::bounds::{
    consecutive_eigenvalue_bound, dkn_certificate, hat_trick, hermitian_spectral_oracle, mixed_bound_cos,
    mixed_bound_tan, positive_t_distance_bound, quadratic_aposteriori, singular_value_oracle, tan_theta_classical,
    tan_theta_improved, ConsecutiveBound, Separation,
};
use ritz_core::harness::{
    generate, mixed_suite, random_unitary, verify_specs, Instance, InstanceSpec, SpectrumSpec, SubspaceMode,
    THREADS_ENV,
};
use ritz_core::linalg::{hermitian_eig, svd, ComplexMatrix, HermitianMatrix, C64};
use ritz_core::majorization::{default_tol, lemma_props_oracle, sort_desc, submajorizes};
use ritz_core::subspace::{sin_squared_identity_check, SubspaceBasis};

type Check = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn close(a: f64, b: f64, tol: f64, what: &str) -> std::result::Result<(), String> {
    if (a - b).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{what}: {a} vs {b} (|diff| = {:.3e} > {tol:.0e})", (a - b).abs()))
    }
}

fn within(elapsed: Duration, limit: Duration) -> std::result::Result<(), String> {
    if elapsed < limit {
        Ok(())
    } else {
        Err(format!("took {elapsed:?}, limit {limit:?}"))
    }
}

fn exa(spec: InstanceSpec) -> Instance {
    generate(&spec).expect("paper instance")
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    for theta in [FRAC_PI_6, FRAC_PI_4, FRAC_PI_3] {
        let i = exa(InstanceSpec::paper_exa1(theta));
        let expected = [(2.0 - 1.0) * theta.sin().powi(2), 0.0];
        for r in [
            mixed_bound_cos(&i.a, &i.x, &i.y, 1e-9).map_err(|e| e.to_string())?,
            mixed_bound_tan(&i.a, &i.x, &i.y, 1e-9).map_err(|e| e.to_string())?,
        ] {
            let dev = max_diff(&r.lhs, &r.rhs).max(max_diff(&r.lhs, &expected));
            ensure!(dev <= 1e-10, "{} at theta = {theta}: lhs {:?}, rhs {:?}", r.theorem_id, r.lhs, r.rhs);
            worst = worst.max(dev);
        }
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("lhs = rhs = ((c-b) sin^2 theta, 0) at pi/6, pi/4, pi/3; max deviation {worst:.1e}"))
}

fn criterion_2() -> Check {
    let start = Instant::now();
    let i = exa(InstanceSpec::paper_exa2(FRAC_PI_6));
    let Separation::Certified(cert) = dkn_certificate(&i.a, &i.x, &i.y).map_err(|e| e.to_string())? else {
        return Err("no ambient separation at pi/6".into());
    };
    close(cert.delta, 0.5, 1e-10, "delta at pi/6")?;
    let classical = tan_theta_classical(&i.a, &i.x, &i.y, &cert, 1e-9).map_err(|e| e.to_string())?;
    close(classical.rhs[0] / cert.delta, 3f64.sqrt(), 1e-10, "classical ratio at pi/6")?;
    let imp = tan_theta_improved(&i.a, &i.x, &i.y, 1e-9).map_err(|e| e.to_string())?;
    close(imp.delta_prime, 1.5, 1e-10, "delta' at pi/6")?;
    close(imp.improved.rhs[0] / imp.delta_prime, FRAC_PI_6.tan(), 1e-10, "improved ratio at pi/6")?;

    let j = exa(InstanceSpec::paper_exa2(FRAC_PI_3));
    let sep = dkn_certificate(&j.a, &j.x, &j.y).map_err(|e| e.to_string())?;
    ensure!(matches!(sep, Separation::NoSeparation { .. }), "expected no separation at pi/3, got {sep:?}");
    let imp3 = tan_theta_improved(&j.a, &j.x, &j.y, 1e-9).map_err(|e| e.to_string())?;
    close(imp3.improved.rhs[0] / imp3.delta_prime, 3f64.sqrt(), 1e-10, "improved ratio at pi/3")?;
    ensure!(imp.improved.verdict.holds && imp3.improved.verdict.holds, "improved bound fails");
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok("delta = 0.5, delta' = 1.5, ratios sqrt(3) -> 1/sqrt(3); pi/3: no separation, improved ratio sqrt(3)".into())
}

const PROPERTY_IDS: &[&str] = &[
    "eigenlist-distance",
    "mixed-cos",
    "mixed-tan",
    "mixed-cos-squared",
    "mixed-tan-squared",
    "spread-partial",
    "apriori-mixed",
    "invariant-residual-sin2",
    "invariant-quadratic",
];

fn criterion_3() -> Check {
    std::env::set_var(THREADS_ENV, "1");
    let specs = mixed_suite(1000, 20_240_601);
    let report = verify_specs(&specs, 1e-9).map_err(|e| e.to_string())?;
    std::env::remove_var(THREADS_ENV);
    let mut ran = Vec::new();
    for id in PROPERTY_IDS {
        let t = &report.tallies[*id];
        ensure!(t.failed == 0, "{id}: {} violations, e.g. {:?}", t.failed, report.flagged.iter().find(|f| f.theorem_id == *id));
        ensure!(t.passed > 0, "{id} never ran: {:?}", t.skipped);
        ran.push(t.passed);
    }
    ensure!(!report.has_violations(), "{} violations among the other bounds", report.violations());
    within(Duration::from_millis(report.elapsed_ms as u64), Duration::from_secs(60))?;
    Ok(format!(
        "1000 instances, 0 violations ({} to {} evaluations per bound), {} ms single-threaded",
        ran.iter().min().unwrap(),
        ran.iter().max().unwrap(),
        report.elapsed_ms
    ))
}

fn ensure_holds(v: ritz_core::Result<ritz_core::majorization::MajorizationVerdict>, what: &str) -> std::result::Result<(), String> {
    match v {
        Ok(v) if v.holds => Ok(()),
        Ok(v) => Err(format!("{what} violated: margins {:?}", v.prefix_margins)),
        Err(e) => Err(format!("{what}: {e}")),
    }
}

fn criterion_4() -> Check {
    let mut r = rng(4);
    let mut checks = 0usize;
    for trial in 0..1000 {
        let d = 2 + trial % 7;
        let c = gaussian(&mut r, d, d);
        let dm = gaussian(&mut r, d, d);
        let scale = 1e-9 * (d as f64) * (1.0 + c.frobenius_norm()) * (1.0 + dm.frobenius_norm());
        for item in 1..=3 {
            ensure_holds(singular_value_oracle(&c, &dm, item, scale), &format!("singular item {item}, trial {trial}"))?;
        }
        // C D Hermitian: D unitary, C = H D*
        let u = random_unitary(&mut r, d);
        let h = hermitian(&mut r, d);
        let cu = h.as_matrix().matmul(&u.adjoint()).unwrap();
        ensure_holds(singular_value_oracle(&cu, &u, 4, scale), &format!("singular item 4, trial {trial}"))?;

        let (hc, hd) = (hermitian(&mut r, d), hermitian(&mut r, d));
        let k = r.gen_range(1..d);
        let blocks = [
            SubspaceBasis::from_isometry(u.select_columns(&(0..k).collect::<Vec<_>>())).unwrap(),
            SubspaceBasis::from_isometry(u.select_columns(&(k..d).collect::<Vec<_>>())).unwrap(),
        ];
        for item in 1..=3 {
            ensure_holds(
                hermitian_spectral_oracle(&hc, &hd, item, &blocks, scale),
                &format!("spectral item {item}, trial {trial}"),
            )?;
        }

        let x = real_vec(&mut r, d, -3.0, 3.0);
        let y = real_vec(&mut r, d, -3.0, 3.0);
        ensure_holds(lemma_props_oracle(&x, &y, &y, 1, default_tol(&y)), "lemma item 1")?;
        let ys = sort_desc(&y).unwrap().into_values();
        let zs = sort_desc(&real_vec(&mut r, d, -3.0, 3.0)).unwrap().into_values();
        let mut below: Vec<f64> = ys.iter().map(|v| v - r.gen_range(0.0..1.0)).collect();
        below.shuffle(&mut r);
        ensure_holds(lemma_props_oracle(&below, &ys, &zs, 2, default_tol(&ys)), "lemma item 2")?;
        let xp = real_vec(&mut r, d, 0.0, 3.0);
        let yp = real_vec(&mut r, d, 0.0, 3.0);
        ensure_holds(lemma_props_oracle(&xp, &yp, &yp, 3, default_tol(&yp)), "lemma item 3")?;
        let ypd = sort_desc(&yp).unwrap().into_values();
        let zpd = sort_desc(&real_vec(&mut r, d, 0.0, 3.0)).unwrap().into_values();
        let mut shrunk: Vec<f64> = ypd.iter().map(|v| v * r.gen_range(0.0..1.0)).collect();
        shrunk.shuffle(&mut r);
        ensure_holds(lemma_props_oracle(&shrunk, &ypd, &zpd, 4, default_tol(&ypd) * 9.0), "lemma item 4")?;

        let e = gaussian(&mut r, k, d - k);
        let hat = hat_trick(&e).map_err(|e| e.to_string())?;
        ensure!(hat.max_deviation <= 1e-10, "hat trick deviation {:.3e}", hat.max_deviation);

        let xb = SubspaceBasis::span_of(&gaussian(&mut r, d, k), 1e-12).unwrap();
        let yb = SubspaceBasis::span_of(&gaussian(&mut r, d, k), 1e-12).unwrap();
        let sin2 = sin_squared_identity_check(&xb, &yb, 1e-9).map_err(|e| e.to_string())?;
        ensure!(sin2.verdict.holds, "sin^2 identity deviation {:.3e}", sin2.max_deviation);

        let t = positive_definite(&mut r, d);
        let p = positive_t_distance_bound(&hc, &hd, &t, 1e-9).map_err(|e| e.to_string())?;
        ensure!(p.verdict.holds, "positive-T bound violated at trial {trial}: {:?}", p.verdict);
        checks += 20;
    }
    Ok(format!("1000 triples, d in [2, 8], {checks} oracle evaluations, 0 violations"))
}

/// Separated instances: `X` invariant, the Ritz values of `Y` outside the
/// hull of the complementary block (below, above or on both sides).
fn separated_instances(n: usize) -> Vec<Instance> {
    let mut r = rng(5);
    let mut out = Vec::with_capacity(n);
    let mut attempt = 0u64;
    while out.len() < n {
        attempt += 1;
        let d = r.gen_range(4..=10);
        let k = r.gen_range(1..=d / 2);
        let gap = r.gen_range(0.3..2.0);
        let layout = attempt % 3;
        let values: Vec<f64> = (0..d)
            .map(|i| {
                let u: f64 = r.gen();
                match (i < k, layout) {
                    (false, _) => u * 2.0 - 1.0,
                    (true, 0) => -1.0 - gap - u,
                    (true, 1) => 1.0 + gap + u,
                    (true, _) if i % 2 == 0 => -1.0 - gap - u,
                    (true, _) => 1.0 + gap + u,
                }
            })
            .collect();
        let eps = [1e-3, 1e-2, 1e-1, 3e-1][(attempt % 4) as usize];
        let spec = InstanceSpec {
            d,
            k,
            spectrum: SpectrumSpec::Explicit { values },
            subspace_mode: SubspaceMode::InvariantPlusPerturbation { eps },
            seed: attempt,
        };
        let inst = generate(&spec).expect("valid spec");
        if let Ok(Separation::Certified(_)) = dkn_certificate(&inst.a, &inst.x, &inst.y) {
            out.push(inst);
        }
    }
    out
}

fn criterion_5(instances: &[Instance]) -> Check {
    let mut finite = 0;
    let mut min_gain = f64::INFINITY;
    for (n, i) in instances.iter().enumerate() {
        let Separation::Certified(cert) = dkn_certificate(&i.a, &i.x, &i.y).map_err(|e| e.to_string())? else {
            unreachable!()
        };
        let classical = tan_theta_classical(&i.a, &i.x, &i.y, &cert, 1e-9).map_err(|e| e.to_string())?;
        let imp = tan_theta_improved(&i.a, &i.x, &i.y, 1e-9).map_err(|e| format!("instance {n}: {e}"))?;
        ensure!(classical.verdict.holds && imp.improved.verdict.holds, "tan bound violated on instance {n}");
        ensure!(imp.delta_prime >= cert.delta - 1e-10, "instance {n}: delta' {} < delta {}", imp.delta_prime, cert.delta);
        min_gain = min_gain.min(imp.delta_prime - cert.delta);
        let (s_full, s_proj) = (&classical.rhs, &imp.improved.rhs);
        ensure_holds(submajorizes(s_proj, s_full, default_tol(s_full)), &format!("s(P R_Y) vs s(R_Y), instance {n}"))?;
        let classical_ratio: Vec<f64> = s_full.iter().map(|v| v / cert.delta).collect();
        let improved_ratio: Vec<f64> = if imp.delta_prime.is_finite() {
            finite += 1;
            s_proj.iter().map(|v| v / imp.delta_prime).collect()
        } else {
            vec![0.0; s_proj.len()]
        };
        ensure_holds(
            submajorizes(&improved_ratio, &classical_ratio, default_tol(&classical_ratio)),
            &format!("improved vs classical rhs, instance {n}"),
        )?;
    }
    Ok(format!(
        "{} separated instances ({finite} with finite delta'), min(delta' - delta) = {min_gain:.3e}",
        instances.len()
    ))
}

fn criterion_6(instances: &[Instance]) -> Check {
    let mut evaluations = 0;
    for (n, i) in instances.iter().enumerate() {
        let delta = dkn_certificate(&i.a, &i.x, &i.y).unwrap().delta().unwrap();
        let imp = tan_theta_improved(&i.a, &i.x, &i.y, 1e-9).map_err(|e| e.to_string())?;
        let mut deltas = vec![delta];
        if imp.delta_prime.is_finite() {
            deltas.push(imp.delta_prime);
        }
        for dl in deltas {
            let q = quadratic_aposteriori(&i.a, &i.x, &i.y, dl, 1e-9).map_err(|e| format!("instance {n}: {e}"))?;
            ensure!(q.verdict.holds, "instance {n}, delta {dl}: margins {:?}", q.verdict.prefix_margins);
            evaluations += 1;
        }
    }
    let e = exa(InstanceSpec::paper_exa2(FRAC_PI_6));
    let q = quadratic_aposteriori(&e.a, &e.x, &e.y, 1.5, 1e-9).map_err(|e| e.to_string())?;
    let k = e.x.dim();
    close(q.lhs[k + 2], 0.5, 1e-10, "spectral-norm lhs")?;
    close(q.rhs[k + 2], 0.5, 1e-10, "spectral-norm rhs")?;
    Ok(format!("{evaluations} norm-family checks (Ky Fan 1..k, Schatten 1, 2, inf) hold; example spectral bound 0.5 = 0.5"))
}

/// `(⟨Ay, y⟩ − λ_{j+1}, ‖P_{X+Y}(Ay − ⟨Ay, y⟩ y)‖² / (λ_j − ⟨Ay, y⟩))` from an
/// explicit eigenbasis `q` with eigenvalues `lambda` (non-increasing).
fn scalar_formula(q: &ComplexMatrix, lambda: &[f64], a: &HermitianMatrix, y: &[C64]) -> (f64, f64) {
    let d = y.len();
    let dot = |u: &[C64], v: &[C64]| u.iter().zip(v).map(|(a, b)| a.conj() * b).sum::<C64>();
    let ay: Vec<C64> = (0..d).map(|i| (0..d).map(|j| a.as_matrix()[(i, j)] * y[j]).sum()).collect();
    let mu = dot(y, &ay).re;
    let j = lambda.iter().filter(|&&l| l > mu).count();
    let mut x = y.to_vec();
    for c in 0..j {
        let col = q.column(c);
        let w = dot(&col, y);
        x.iter_mut().zip(&col).for_each(|(xi, ci)| *xi -= ci * w);
    }
    // orthonormal basis {y, x'} of span{x, y}
    let w = dot(y, &x);
    x.iter_mut().zip(y).for_each(|(xi, yi)| *xi -= yi * w);
    let nx = dot(&x, &x).re.sqrt();
    let r: Vec<C64> = ay.iter().zip(y).map(|(a, b)| a - b * mu).collect();
    let mut p2 = dot(y, &r).norm_sqr();
    if nx > 1e-12 {
        p2 += dot(&x, &r).norm_sqr() / (nx * nx);
    }
    (mu - lambda[j], p2 / (lambda[j - 1] - mu))
}

fn criterion_7() -> Check {
    let mut r = rng(7);
    let (mut accepted, mut attempts, mut scalar_checked, mut worst) = (0, 0, 0, 0.0_f64);
    while accepted < 200 {
        attempts += 1;
        let d = r.gen_range(3..=9);
        let k = if accepted % 2 == 0 { 1 } else { r.gen_range(2..=(d - 1).min(3)) };
        let mut lambda = real_vec(&mut r, d, -5.0, 5.0);
        lambda.sort_by(|a, b| b.total_cmp(a));
        let q = random_unitary(&mut r, d);
        let qd = ComplexMatrix::from_fn(d, d, |i, j| q[(i, j)] * lambda[j]);
        let a = HermitianMatrix::new(qd.matmul(&q.adjoint()).unwrap()).unwrap();
        let y = if k == 1 {
            SubspaceBasis::span_of(&gaussian(&mut r, d, 1), 1e-12).unwrap()
        } else {
            let j = r.gen_range(1..=d - k);
            let target = q.select_columns(&(j..j + k).collect::<Vec<_>>());
            let eps = [1e-2, 1e-1][attempts % 2];
            SubspaceBasis::span_of(&target.add(&gaussian(&mut r, d, k).scale_real(eps)).unwrap(), 1e-12).unwrap()
        };
        let bound: ConsecutiveBound = match consecutive_eigenvalue_bound(&a, &y, 1e-9) {
            Ok(b) => b,
            Err(ritz_core::Error::HypothesisFailed { .. }) => continue,
            Err(e) => return Err(e.to_string()),
        };
        accepted += 1;
        ensure!(bound.report.verdict.holds, "bound fails: {:?}", bound.report);
        // hypotheses, re-derived from the known spectrum
        let top_ritz = mu1(&a, &y);
        let j = lambda.iter().filter(|&&l| l > top_ritz).count();
        ensure!(bound.j == j, "j = {} but {j} eigenvalues exceed the top Ritz value", bound.j);
        ensure!(
            (0..k).all(|i| ritz(&a, &y)[i] >= lambda[i + j] - 1e-10 * a.frobenius_norm().max(1.0)),
            "hypothesis 2 fails on an accepted instance"
        );
        if k == 1 {
            let (lhs, rhs) = scalar_formula(&q, &lambda, &a, &y.matrix().column(0));
            ensure!(lhs >= -1e-12 && lhs <= rhs + 1e-10, "scalar inequality fails: {lhs} > {rhs}");
            let dev = (bound.report.lhs[0] - lhs).abs().max((bound.report.rhs[0] - rhs).abs());
            ensure!(dev <= 1e-10, "k = 1 report ({}, {}) vs scalar formula ({lhs}, {rhs})", bound.report.lhs[0], bound.report.rhs[0]);
            worst = worst.max(dev);
            scalar_checked += 1;
        }
    }
    Ok(format!(
        "200 instances accepted of {attempts} drawn; {scalar_checked} k = 1 cases match the scalar formula to {worst:.1e}"
    ))
}

fn ritz(a: &HermitianMatrix, y: &SubspaceBasis) -> Vec<f64> {
    let rho = y.matrix().adjoint_matmul(&a.as_matrix().matmul(y.matrix()).unwrap()).unwrap();
    sturm_eigenvalues(&HermitianMatrix::new(rho).unwrap())
}

fn mu1(a: &HermitianMatrix, y: &SubspaceBasis) -> f64 {
    ritz(a, y)[0]
}

fn criterion_8() -> Check {
    let mut r = rng(8);
    let mut worst_oracle = 0.0_f64;
    for n in 0..1000 {
        let d = 1 + n % 50;
        let a = hermitian(&mut r, d);
        let e = hermitian_eig(&a).map_err(|e| e.to_string())?;
        let res = e.residual(&a);
        ensure!(res <= 1e-10 * a.frobenius_norm(), "eig residual {res:.3e} at d = {d}");
        let defect = e.eigenvectors.orthonormality_defect();
        ensure!(defect <= 1e-12, "eigenvector orthogonality {defect:.3e} at d = {d}");
        let dev = max_diff(e.eigenvalues.values(), &sturm_eigenvalues(&a));
        ensure!(dev <= 1e-8, "eigenvalues differ from bisection by {dev:.3e} at d = {d}");
        worst_oracle = worst_oracle.max(dev);

        let (rows, cols) = (1 + (n * 7) % 50, 1 + (n * 13) % 50);
        let b = gaussian(&mut r, rows, cols);
        let s = svd(&b).map_err(|e| e.to_string())?;
        let sv = s.singular_values.values();
        ensure!(sv.iter().all(|&v| v >= 0.0) && sv.windows(2).all(|w| w[0] >= w[1]), "bad singular values");
        let rec = s.reconstruct().max_abs_diff(&b).unwrap();
        ensure!(rec <= 1e-10 * sv[0].max(1.0), "svd reconstruction {rec:.3e} at {rows}x{cols}");
        let orth = s.left_vectors.orthonormality_defect().max(s.right_vectors.orthonormality_defect());
        ensure!(orth <= 1e-12, "singular vector orthogonality {orth:.3e} at {rows}x{cols}");
    }
    Ok(format!("1000 eigen + 1000 SVD decompositions up to 50x50; max |lambda - bisection| = {worst_oracle:.1e}"))
}

fn main() {
    let start = Instant::now();
    let separated = separated_instances(500);
    let criteria: Vec<(&str, Box<dyn Fn() -> Check + '_>)> = vec![
        ("1 sharpness of the first example", Box::new(criterion_1)),
        ("2 second example reproduction", Box::new(criterion_2)),
        ("3 mixed and a priori property suite", Box::new(criterion_3)),
        ("4 majorization oracle suite", Box::new(criterion_4)),
        ("5 separation monotonicity", Box::new(|| criterion_5(&separated))),
        ("6 quadratic a posteriori bounds", Box::new(|| criterion_6(&separated))),
        ("7 consecutive-eigenvalue bound", Box::new(criterion_7)),
        ("8 kernel accuracy", Box::new(criterion_8)),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(run))
            .unwrap_or_else(|p| Err(format!("panicked: {:?}", p.downcast_ref::<String>().map(String::as_str).or(p.downcast_ref::<&str>().copied()))));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS  criterion {name} ({secs:.2} s): {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL  criterion {name} ({secs:.2} s): {msg}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.2} s",
        criteria.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
