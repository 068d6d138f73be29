//! Acceptance suite: one line per criterion, `PASS` or `FAIL`, then a nonzero
//! exit if anything failed. Runs as a plain binary so the lines always show.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use monotone_elliptic::app::{cmd_solve, LoadedScenario, Scenario, SolveOverrides};
use monotone_elliptic::geometry::{build_flat_torus, build_icosphere, smallest_eigenvalues, DiscreteDomain, Field};
use monotone_elliptic::iteration::{
    iterate_monotone, positivity_check, Bracket, IterationConfig, SolutionExport, SolutionPair,
};
use monotone_elliptic::linear_operator::{
    check_comparison, lipschitz_certificate, solve_t_with, DualVector, LinearProblem, SolveOptions,
};
use monotone_elliptic::nonlinearity::{
    apply_s, check_alpha1, check_alpha2, Alpha1Clause, Alpha2Clause, NonlinearProblem, ScalarNonlinearity,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($msg)+));
        }
    };
}

fn loaded(text: &str) -> LoadedScenario {
    LoadedScenario { scenario: Scenario::parse(text).unwrap(), base: Default::default() }
}

/// Library run of a scenario: domain, the problem pieces, bracket ends, result.
struct Run {
    domain: DiscreteDomain,
    a: Vec<f64>,
    f: Vec<f64>,
    h: Vec<f64>,
    lower: Field,
    upper: Field,
    pair: SolutionPair,
    steps: usize,
    violations: usize,
    converged: bool,
}

fn run_scenario(text: &str) -> Run {
    let l = loaded(text);
    let domain = l.build_domain().unwrap();
    let (pair, trace, a, f, h, lower, upper) = {
        let problem = l.build_problem(&domain).unwrap();
        let (lower, upper) = l.bracket_fields(&domain).unwrap();
        let bracket = Bracket::new(&problem, lower.clone(), upper.clone(), 1e-10).unwrap();
        let (pair, trace) = iterate_monotone(&problem, &bracket, &IterationConfig::default()).unwrap();
        let a = problem.a().values().to_vec();
        let f = problem.f().values().to_vec();
        let h = problem.h().values().to_vec();
        (pair, trace, a, f, h, lower, upper)
    };
    Run {
        domain,
        a,
        f,
        h,
        lower,
        upper,
        pair,
        steps: trace.steps,
        violations: trace.ordering_violations,
        converged: trace.converged,
    }
}

fn criterion_1() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), "torus.json", TORUS_8);
    let start = Instant::now();
    let summary = cmd_solve(&path, dir.path().join("out"), SolveOverrides::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure!(summary.converged, "did not converge");
    let text = std::fs::read_to_string(dir.path().join("out/solution.json")).unwrap();
    let solution: SolutionExport = serde_json::from_str(&text).unwrap();
    let c = bisect_constant_root();
    for (name, u) in [("u_*", &solution.u_star), ("u^*", &solution.u_upper_star)] {
        ensure!(u.len() == 512, "{name} has {} entries", u.len());
        let (lo, hi) = u.iter().fold((f64::MAX, f64::MIN), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        ensure!(hi - lo <= 1e-7, "{name} spread {:e}", hi - lo);
        let err = u.iter().map(|x| (x - c).abs()).fold(0.0, f64::max);
        ensure!(err <= 1e-8, "{name} off the bisection root {c} by {err:e}");
    }
    ensure!(elapsed <= Duration::from_secs(10), "took {elapsed:?}");
    Ok(format!("c* = {c:.12}, {} steps, {:.2?}", summary.steps, elapsed))
}

/// Replays both sequences with a dense Cholesky solve and the nonlinearities
/// written out by hand, checking the chain at every step.
fn chain_oracle(run: &Run) -> Outcome {
    let solver = DenseSolver::new(dense_system(&run.domain, &run.a));
    let m = run.domain.mass();
    let j = |v: &[f64]| {
        let rhs: Vec<f64> = (0..v.len())
            .map(|i| {
                let t = v[i].max(0.0);
                m[i] * (run.f[i] * t.powi(5) + run.h[i] * t.sqrt())
            })
            .collect();
        solver.solve(&rhs)
    };
    let mut lo = run.lower.values().to_vec();
    let mut up = run.upper.values().to_vec();
    for step in 1..=run.steps {
        let lo_next = j(&lo);
        let up_next = j(&up);
        ensure!(ordered(&lo, &lo_next), "lower sequence falls at step {step}");
        ensure!(ordered(&up_next, &up), "upper sequence rises at step {step}");
        ensure!(ordered(&lo_next, &up_next), "sequences cross at step {step}");
        ensure!(ordered(&lo_next, run.pair.u_upper_star.values()), "u_{step} above the library's u^*");
        ensure!(ordered(run.pair.u_star.values(), &up_next), "u^{step} below the library's u_*");
        lo = lo_next;
        up = up_next;
    }
    let d = max_abs_diff(&lo, run.pair.u_star.values()).max(max_abs_diff(&up, run.pair.u_upper_star.values()));
    ensure!(d <= 1e-8, "dense replay ends {d:e} from the library limits");
    Ok(format!("{} steps", run.steps))
}

fn criterion_2(runs: &[(&str, &Run)]) -> Outcome {
    let mut notes = Vec::new();
    for (name, run) in runs {
        ensure!(run.converged, "{name}: did not converge");
        ensure!(run.violations == 0, "{name}: {} ordering violations", run.violations);
        let note = chain_oracle(run).map_err(|e| format!("{name}: {e}"))?;
        notes.push(format!("{name} {note}"));
    }
    Ok(notes.join(", "))
}

fn criterion_3(runs: &[(&str, &Run)]) -> Outcome {
    let mut mins = Vec::new();
    for (name, run) in runs {
        let chain = [run.lower.values(), run.pair.u_star.values(), run.pair.u_upper_star.values(), run.upper.values()];
        for w in chain.windows(2) {
            ensure!(ordered(w[0], w[1]), "{name}: sandwich broken");
        }
        let min = run.pair.u_star.min();
        ensure!(min > 0.0, "{name}: min u_* = {min}");
        ensure!(run.domain.is_connected(), "{name}: domain not connected");
        ensure!(positivity_check(&run.domain, &run.pair.u_star), "{name}: positivity check fails");
        mins.push(format!("{name} min u_* = {min:.4}"));
    }
    Ok(mins.join(", "))
}

fn random_a(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..hi)).collect()
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let sphere = build_icosphere(2, 1.0).unwrap();
    let n = sphere.vertex_count();

    // (a) uniqueness: zero start and a random start land on the same solution.
    let tol = 1e-10;
    let mut worst_unique = 0.0_f64;
    for _ in 0..10 {
        let a = random_a(&mut rng, n, 0.3, 3.0);
        let problem = LinearProblem::new(&sphere, Field::new(&sphere, a.clone()).unwrap()).unwrap();
        let psi = DualVector::new(&sphere, (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let start: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let (u0, _) = solve_t_with(&problem, &psi, &SolveOptions { tol, ..Default::default() }).unwrap();
        let (u1, _) =
            solve_t_with(&problem, &psi, &SolveOptions { tol, initial_guess: Some(&start), ..Default::default() })
                .unwrap();
        let d = max_abs_diff(u0.values(), u1.values()) / u0.norm_max().max(1.0);
        worst_unique = worst_unique.max(d);
        ensure!(d <= 10.0 * tol, "(a) starts disagree by {d:e}");
        let dense = DenseSolver::new(dense_system(&sphere, &a)).solve(psi.values());
        let e = max_abs_diff(u0.values(), &dense) / u0.norm_max().max(1.0);
        ensure!(e <= 10.0 * tol, "(a) CG differs from dense solve by {e:e}");
    }

    // (b) comparison on 100 ordered pairs.
    for trial in 0..100 {
        let a = random_a(&mut rng, n, 0.1, 4.0);
        let problem = LinearProblem::new(&sphere, Field::new(&sphere, a.clone()).unwrap()).unwrap();
        let p1: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let p2: Vec<f64> =
            p1.iter().map(|x| if rng.gen_bool(0.3) { *x } else { x + rng.gen_range(0.0..1.0) }).collect();
        let psi1 = DualVector::new(&sphere, p1.clone()).unwrap();
        let psi2 = DualVector::new(&sphere, p2.clone()).unwrap();
        ensure!(check_comparison(&problem, &psi1, &psi2).unwrap(), "(b) pair {trial} not ordered");
        let solver = DenseSolver::new(dense_system(&sphere, &a));
        ensure!(ordered(&solver.solve(&p1), &solver.solve(&p2)), "(b) dense oracle disagrees on pair {trial}");
    }

    // (c) Lipschitz certificate on 20 instances; both sides recomputed densely.
    for trial in 0..20 {
        let domain = match trial % 4 {
            0 => build_icosphere(1 + (trial / 4 % 3) as u32, rng.gen_range(0.5..2.0)).unwrap(),
            1 => build_flat_torus(&[(rng.gen_range(5..30), rng.gen_range(0.5..7.0)), (rng.gen_range(5..30), 1.0)])
                .unwrap(),
            2 => build_flat_torus(&[(rng.gen_range(4..12), 1.0); 3]).unwrap(),
            _ => build_flat_torus(&[(rng.gen_range(10..200), rng.gen_range(1.0..10.0))]).unwrap(),
        };
        let m = domain.vertex_count();
        ensure!(m <= 2000, "(c) instance {trial} too large");
        let a = random_a(&mut rng, m, 0.05, 3.0);
        let problem = LinearProblem::new(&domain, Field::new(&domain, a.clone()).unwrap()).unwrap();
        let p1: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let p2: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (lhs, rhs) = lipschitz_certificate(
            &problem,
            &DualVector::new(&domain, p1.clone()).unwrap(),
            &DualVector::new(&domain, p2.clone()).unwrap(),
        )
        .unwrap();
        ensure!(lhs <= rhs + 1e-9, "(c) instance {trial}: {lhs} > {rhs}");

        let ones = vec![1.0; m];
        let g = dense_system(&domain, &ones);
        let r = nalgebra::DVector::from_iterator(m, p1.iter().zip(&p2).map(|(x, y)| x - y));
        let du = DenseSolver::new(dense_system(&domain, &a)).solve(r.as_slice());
        let du = nalgebra::DVector::from_column_slice(&du);
        let oracle_lhs = du.dot(&(&g * &du)).sqrt();
        let c = a.iter().cloned().fold(1.0, f64::min);
        let oracle_rhs = r.dot(&g.clone().cholesky().unwrap().solve(&r)).sqrt() / c;
        ensure!((lhs - oracle_lhs).abs() <= 1e-8 * oracle_lhs.max(1.0), "(c) lhs {lhs} vs dense {oracle_lhs}");
        ensure!((rhs - oracle_rhs).abs() <= 1e-8 * oracle_rhs.max(1.0), "(c) rhs {rhs} vs dense {oracle_rhs}");
    }

    // (d) coercivity and the energy lower bound on 100 random vectors.
    let a = random_a(&mut rng, n, 0.2, 3.0);
    let c = a.iter().cloned().fold(1.0, f64::min);
    let problem = LinearProblem::new(&sphere, Field::new(&sphere, a.clone()).unwrap()).unwrap();
    let sys = dense_system(&sphere, &a);
    let g = dense_system(&sphere, &vec![1.0; n]);
    let g_chol = g.clone().cholesky().unwrap();
    let psi_values: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let psi_vec = nalgebra::DVector::from_column_slice(&psi_values);
    let psi_dual = psi_vec.dot(&g_chol.solve(&psi_vec)).sqrt();
    let psi = DualVector::new(&sphere, psi_values).unwrap();
    for trial in 0..100 {
        let scale = 10f64.powf(rng.gen_range(-3.0..3.0));
        let u = nalgebra::DVector::from_iterator(n, (0..n).map(|_| scale * rng.gen_range(-1.0..1.0)));
        let quad = u.dot(&(&sys * &u));
        let h1 = u.dot(&(&g * &u));
        ensure!(0.5 * quad >= 0.5 * c * h1 - 1e-10 * h1.max(1.0), "(d) vector {trial}: coercivity fails");
        let energy = problem.energy(u.as_slice(), &psi);
        let bound = 0.5 * c * h1 - psi_dual * h1.sqrt();
        ensure!(energy >= bound - 1e-10 * h1.max(1.0), "(d) vector {trial}: energy {energy} < {bound}");
    }

    let elapsed = start.elapsed();
    ensure!(elapsed <= Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!("worst start disagreement {worst_unique:.1e}, {elapsed:.2?}"))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let d = build_icosphere(2, 1.0).unwrap();
    let n = d.vertex_count();
    let field = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| Field::new(&d, random_a(rng, n, lo, hi)).unwrap();
    let problem = NonlinearProblem::new(
        &d,
        field(&mut rng, 0.5, 2.0),
        field(&mut rng, 0.0, 1.0),
        field(&mut rng, 0.0, 1.0),
        ScalarNonlinearity::power(5.0).unwrap(),
        ScalarNonlinearity::power(0.5).unwrap(),
    )
    .unwrap();
    let s = |v: &[f64]| apply_s(&problem, &Field::new(&d, v.to_vec()).unwrap()).unwrap().values().to_vec();

    for trial in 0..100 {
        let v1 = random_a(&mut rng, n, -0.5, 1.5);
        let v2: Vec<f64> = v1.iter().map(|x| if rng.gen_bool(0.2) { *x } else { x + rng.gen_range(0.0..1.0) }).collect();
        let (s1, s2) = (s(&v1), s(&v2));
        ensure!(s1.iter().zip(&s2).all(|(a, b)| a <= b), "monotonicity fails on pair {trial}");
    }

    for _ in 0..20 {
        let v = random_a(&mut rng, n, -2.0, 2.0);
        let clipped: Vec<f64> = v.iter().map(|x| x.max(0.0)).collect();
        ensure!(s(&v) == s(&clipped), "S(v) differs from S(max(v, 0))");
        let negative = random_a(&mut rng, n, -3.0, -1e-12);
        ensure!(s(&negative).iter().all(|&x| x == 0.0), "S of a negative field is not zero");
    }

    // On [0.1, 1] both nonlinearities are Lipschitz: |F'| ≤ 5·2⁴, |H'| ≤ ½/√0.1.
    let v = random_a(&mut rng, n, 0.1, 1.0);
    let dir = random_a(&mut rng, n, -1.0, 1.0);
    let base = s(&v);
    let lip = 5.0 * 16.0 + 0.5 / 0.1_f64.sqrt();
    let max_mass = d.mass().iter().cloned().fold(0.0, f64::max);
    let mut errors = Vec::new();
    for k in [10.0, 20.0, 40.0, 80.0, 160.0, 320.0, 640.0, 1280.0] {
        let vk: Vec<f64> = v.iter().zip(&dir).map(|(x, r)| x + r / k).collect();
        let e = max_abs_diff(&s(&vk), &base);
        ensure!(e <= max_mass * lip / k, "perturbation 1/{k}: change {e:e} above the Lipschitz bound");
        errors.push(e);
    }
    ensure!(errors.windows(2).all(|w| w[1] < w[0]), "changes do not shrink: {errors:?}");
    let slope = (errors[0] / errors[errors.len() - 1]).log2() / (errors.len() - 1) as f64;
    ensure!((slope - 1.0).abs() < 0.1, "observed order {slope}, expected 1");
    Ok(format!("continuity order {slope:.3}"))
}

fn criterion_6() -> Outcome {
    let sphere = build_icosphere(4, 1.0).unwrap();
    let eig = smallest_eigenvalues(&sphere, 4).unwrap();
    ensure!(eig[0].abs() <= 1e-8, "sphere: first eigenvalue {}", eig[0]);
    for &l in &eig[1..] {
        ensure!((l - 2.0).abs() <= 0.05 * 2.0, "sphere: eigenvalue {l} not within 5% of 2");
    }

    let two_pi = 2.0 * std::f64::consts::PI;
    let torus = build_flat_torus(&[(32, two_pi), (32, two_pi)]).unwrap();
    let eig_t = smallest_eigenvalues(&torus, 3).unwrap();
    ensure!(eig_t[0].abs() <= 1e-8, "torus: first eigenvalue {}", eig_t[0]);
    for &l in &eig_t[1..] {
        ensure!((l - 1.0).abs() <= 0.02, "torus: eigenvalue {l} not within 2% of 1");
    }

    let exact = 4.0 * std::f64::consts::PI;
    let errors: Vec<f64> =
        (0..=5).map(|s| (build_icosphere(s, 1.0).unwrap().total_mass() - exact).abs() / exact).collect();
    ensure!(errors[3] <= 0.01, "area error {:.3}% at 3 subdivisions", 100.0 * errors[3]);
    ensure!(errors.windows(2).all(|w| w[1] < w[0]), "area errors not strictly decreasing: {errors:?}");
    Ok(format!(
        "sphere {:.4?}, torus {:.4?}, area error at 3 subdivisions {:.3}%",
        eig,
        eig_t,
        100.0 * errors[3]
    ))
}

fn criterion_7() -> Outcome {
    let pow = |p| ScalarNonlinearity::power(p).unwrap();
    for (n, q) in [(3, 0.5), (4, 0.9), (6, 1.5)] {
        let e = 2.0 * n as f64 / (n as f64 - 2.0) - 1.0;
        let r = check_alpha1(&pow(e), &pow(q), n, q, 3.0).unwrap();
        ensure!(r.passed, "equality case n = {n}, q = {q} fails");
    }
    let r = check_alpha1(&pow(6.0), &pow(0.5), 3, 0.5, 3.0).unwrap();
    let v = r.violation.ok_or("F = t^6 passes")?;
    ensure!(v.clause == Alpha1Clause::FGrowth && v.t > 1.0, "F = t^6 fails with {:?} at t = {}", v.clause, v.t);
    let table = ScalarNonlinearity::table(vec![-1.0, -0.5, 0.0, 2.0], vec![0.1, 0.1, 0.1, 0.2]).unwrap();
    let v = check_alpha1(&table, &pow(0.5), 3, 0.5, 3.0).unwrap().violation.ok_or("table passes")?;
    ensure!(v.clause == Alpha1Clause::FVanishesBelowZero, "table fails with {:?}", v.clause);

    let d = build_flat_torus(&[(4, 1.0), (4, 1.0), (4, 1.0)]).unwrap();
    let k = |c| Field::constant(&d, c).unwrap();
    let problem = |a, f, h| NonlinearProblem::new(&d, a, f, h, pow(5.0), pow(0.5)).unwrap();
    ensure!(check_alpha2(&problem(k(1.0), k(1.0), k(1.0))).passed, "a = f = h = 1 fails");
    let mut a = vec![1.0; d.vertex_count()];
    a[17] = 0.0;
    let fail = check_alpha2(&problem(Field::new(&d, a).unwrap(), k(1.0), k(1.0))).failure.ok_or("a with a zero passes")?;
    ensure!(fail.clause == Alpha2Clause::APositive && fail.vertex == Some(17), "zero in a reported as {fail:?}");
    let fail = check_alpha2(&problem(k(1.0), k(0.0), k(1.0))).failure.ok_or("f = 0 passes")?;
    ensure!(fail.clause == Alpha2Clause::FNotIdenticallyZero, "f = 0 reported as {fail:?}");
    Ok("3 growth-bound cases, 3 sign-condition cases".into())
}

fn cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_monotone-elliptic")).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn same_files(a: &Path, b: &Path) -> Result<usize, String> {
    let mut count = 0;
    for name in ["solution.json", "solution.csv", "trace.csv", "summary.json"] {
        let x = std::fs::read(a.join(name)).map_err(|e| format!("{name}: {e}"))?;
        let y = std::fs::read(b.join(name)).map_err(|e| format!("{name}: {e}"))?;
        ensure!(x == y, "{name} differs between runs");
        count += 1;
    }
    Ok(count)
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let p = |s: &Path| s.to_str().unwrap().to_owned();
    let torus = write_scenario(dir.path(), "torus.json", TORUS_8);
    let sphere = write_scenario(dir.path(), "sphere.json", SPHERE_3);
    for (name, scenario) in [("torus", &torus), ("sphere", &sphere)] {
        let (o1, o2) = (dir.path().join(format!("{name}1")), dir.path().join(format!("{name}2")));
        for out in [&o1, &o2] {
            let (code, _) = cli(&["solve", &p(scenario), "--out", &p(out)]);
            ensure!(code == 0, "{name}: solve exit {code}");
        }
        same_files(&o1, &o2).map_err(|e| format!("{name}: {e}"))?;
    }

    let f_zero = write_scenario(dir.path(), "f0.json", &TORUS_8.replace("\"f\": 0.5", "\"f\": 0.0"));
    let high_lower =
        write_scenario(dir.path(), "hl.json", &TORUS_8.replace("\"lower\": 0.01", "\"lower\": 0.5"));
    let malformed = write_scenario(dir.path(), "bad.json", "{ \"domain\": ");
    let bad_expr = write_scenario(dir.path(), "expr.json", &TORUS_8.replace("\"a\": 2.0", "\"a\": \"2 +* x\""));
    let missing = dir.path().join("missing.json");
    let out = dir.path().join("capped");

    let cases: Vec<(&str, Vec<String>, i32, Option<&str>)> = vec![
        ("check passes", vec!["check".into(), p(&torus)], 0, Some("all checks pass")),
        ("f ≡ 0", vec!["check".into(), p(&f_zero)], 1, Some("f ≢ 0")),
        ("lower too high", vec!["check".into(), p(&high_lower)], 1, Some("at vertex 0")),
        ("step cap", vec!["solve".into(), p(&torus), "--out".into(), p(&out), "--max-steps".into(), "2".into()], 1, None),
        ("malformed json", vec!["check".into(), p(&malformed)], 2, None),
        ("bad expression", vec!["solve".into(), p(&bad_expr), "--out".into(), p(&out)], 2, None),
        ("missing file", vec!["check".into(), p(&missing)], 2, None),
        ("unknown flag", vec!["check".into(), p(&torus), "--bogus".into()], 2, None),
        ("spectrum too many", vec!["spectrum".into(), p(&torus), "--k".into(), "600".into()], 2, None),
    ];
    for (name, args, expected, needle) in &cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (code, stdout) = cli(&args);
        ensure!(code == *expected, "{name}: exit {code}, expected {expected}");
        if let Some(needle) = needle {
            ensure!(stdout.contains(needle), "{name}: output lacks {needle:?}:\n{stdout}");
        }
    }
    ensure!(out.join("summary.json").exists(), "capped run wrote no summary");
    Ok(format!("2 scenarios byte-identical, {} exit-code cases", cases.len()))
}

fn main() {
    // Failures are reported on the criterion line; skip the default panic dump.
    std::panic::set_hook(Box::new(|_| {}));
    let mut results: Vec<(usize, &str, Result<String, String>, Duration)> = Vec::new();
    let mut record = |n, name, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = match catch_unwind(AssertUnwindSafe(f)) {
            Ok(r) => r,
            Err(p) => Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into())),
        };
        let elapsed = start.elapsed();
        match &outcome {
            Ok(detail) => println!("PASS  criterion {n}: {name} ({detail}; {elapsed:.2?})"),
            Err(why) => println!("FAIL  criterion {n}: {name}: {why}"),
        }
        results.push((n, name, outcome, elapsed));
    };

    record(1, "constant-coefficient oracle", &mut criterion_1);

    let torus = run_scenario(TORUS_8);
    let sphere = run_scenario(SPHERE_3);
    let table_sphere = run_scenario(&SPHERE_3.replace("\"subdivisions\": 3", "\"subdivisions\": 2").replace(
        "\"bracket\": { \"lower\": 0.01",
        "\"bracket\": { \"lower\": \"0.005*(1+x^2)\"",
    ).replace("\"f\": 0.5", "\"f\": \"0.25*(1+y^2)\""));
    let runs = [("torus", &torus), ("sphere", &sphere)];
    record(2, "monotone chain", &mut || criterion_2(&runs));
    let all_runs = [("torus", &torus), ("sphere", &sphere), ("sphere-2", &table_sphere)];
    record(3, "sandwich and positivity", &mut || criterion_3(&all_runs));
    record(4, "linear solve: uniqueness, comparison, continuity, coercivity", &mut criterion_4);
    record(5, "substitution operator: monotone, truncated, continuous", &mut criterion_5);
    record(6, "geometry: spectra and area", &mut criterion_6);
    record(7, "hypothesis checkers", &mut criterion_7);
    record(8, "determinism and exit codes", &mut criterion_8);

    let failed = results.iter().filter(|r| r.2.is_err()).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
