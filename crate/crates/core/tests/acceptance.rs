//! Acceptance criteria. Runs as a plain binary so that every criterion
//! prints its own PASS/FAIL line; exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use grid_concentrator::admittance::{
    assemble_admittance, kronecker_sum, lift_real, LineAdmittance, LineDistribution,
    UpsilonConvention,
};
use grid_concentrator::bounds::{
    contingency_expectation_bound, contingency_factors, contingency_tail_bound,
    lcpf_expectation_bound, lcpf_tail_bound, lcpf_variance_envelope, ContingencyModel,
    EnvelopeMode, ExpectationForm,
};
use grid_concentrator::experiment::{
    self, brute_force_distribution, contingency_variance_estimate, lcpf_deviation_norms,
    lcpf_second_moment_estimate, run_norm_sweep, spearman, stream_rng, summarize_sweep,
    ExperimentConfig, ExperimentKind, Format, LineSpec,
};
use grid_concentrator::graph::{sample_er_topology, sample_random_tree, Topology};
use grid_concentrator::lcpf::{flat_start_jacobian, line_space_inverse, schur_inverse};
use grid_concentrator::manifold::{
    norm2, norm_inf, tangent_residual, taylor_residual, ManifoldPoint, TangentStep,
};
use grid_concentrator::spectra::{intrinsic_dimension, lambda_min, max_abs_diff, operator_norm};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn linspace(a: f64, b: f64, k: usize) -> Vec<f64> {
    (0..k)
        .map(|i| a + (b - a) * i as f64 / (k - 1) as f64)
        .collect()
}

fn random_admittance<R: Rng>(rng: &mut R) -> Complex64 {
    let r = rng.random::<f64>().sqrt();
    let angle = rng.random::<f64>() * std::f64::consts::TAU;
    Complex64::from_polar(r, angle)
}

/// Random tree plus independent extra lines, hence connected.
fn random_connected<R: Rng>(n: usize, extra_p: f64, rng: &mut R) -> Topology {
    let tree = sample_random_tree(n, rng).unwrap();
    let extra = sample_er_topology(n, extra_p, rng).unwrap();
    let mut edges = tree.edges().to_vec();
    edges.extend(extra.edges().iter().copied());
    Topology::new(n, edges).unwrap()
}

fn random_contingency_model<R: Rng>(n: usize, rng: &mut R) -> ContingencyModel {
    let t = random_connected(n, 0.3, rng);
    let m = t.n_edges();
    let probs = (0..m).map(|_| rng.random_range(0.05..0.95)).collect();
    let ys = (0..m).map(|_| random_admittance(rng)).collect();
    ContingencyModel::new(t, probs, ys).unwrap()
}

// 1. Norm sweep over Erdős–Rényi networks.
fn norm_sweep_dominance() -> Outcome {
    let start = Instant::now();
    let cfg = ExperimentConfig {
        n: 20,
        samples: 200,
        seed: 2024,
        ..ExperimentConfig::new(ExperimentKind::NormSweep)
    };
    let records = run_norm_sweep(&cfg).map_err(|e| e.to_string())?;
    let points = summarize_sweep(&records);
    let violations = records.iter().filter(|r| r.norm > r.bound).count();
    let mean_m: Vec<f64> = points.iter().map(|p| p.mean_m).collect();
    let mean_norm: Vec<f64> = points.iter().map(|p| p.mean_norm).collect();
    let rho = spearman(&mean_m, &mean_norm);
    let elapsed = start.elapsed();
    check(
        violations == 0 && rho > 0.95 && within(elapsed, 30.0),
        format!(
            "{} records over {} sweep points, {violations} violations, Spearman ρ = {rho:.4}, {:.2}s",
            records.len(),
            points.len(),
            elapsed.as_secs_f64()
        ),
    )
}

// 2. Exhaustive check of the contingency tail and expectation bounds.
fn contingency_exact() -> Outcome {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, t) in [
        ("K3", Topology::complete(3).unwrap()),
        ("P4", Topology::path(4).unwrap()),
    ] {
        let model = ContingencyModel::homogeneous(t, 0.5, Complex64::new(1.0, 0.0)).unwrap();
        let profile = contingency_factors(&model);
        let exact = brute_force_distribution(&model).map_err(|e| e.to_string())?;
        let total = exact.total_probability();
        ok &= (total - 1.0).abs() < 1e-12;
        let thr = profile.tail_threshold();
        let grid = linspace(thr, thr + 5.0, 20);
        let mut worst_gap = f64::INFINITY;
        for &t in &grid {
            let b = contingency_tail_bound(t, &profile).map_err(|e| e.to_string())?;
            ok &= b.valid;
            worst_gap = worst_gap.min(b.value - exact.tail(t));
        }
        ok &= worst_gap >= 0.0;
        let explicit = contingency_expectation_bound(&profile, ExpectationForm::Explicit)
            .map_err(|e| e.to_string())?;
        ok &= exact.mean <= explicit.value;
        if name == "K3" {
            ok &= exact.mean <= 16.374 && (explicit.value - 16.374).abs() < 1e-3;
        }
        lines.push(format!(
            "{name}: E‖Ỹ‖ = {:.4} ≤ {:.4}, min(bound − exact tail) = {worst_gap:.4}",
            exact.mean, explicit.value
        ));
    }
    let elapsed = start.elapsed();
    ok &= within(elapsed, 5.0);
    check(
        ok,
        format!("{}; {:.2}s", lines.join("; "), elapsed.as_secs_f64()),
    )
}

// 3. Monte Carlo matrix variance equals the contingency-weighted Laplacian.
fn variance_identity() -> Outcome {
    let start = Instant::now();
    let mut rng = stream_rng(33, 0, 0);
    let mut worst = 0.0f64;
    let mut sizes = Vec::new();
    for k in 0..5 {
        let n = rng.random_range(3..=8);
        let model = random_contingency_model(n, &mut rng);
        sizes.push(format!("n={n},m={}", model.topology().n_edges()));
        let est = contingency_variance_estimate(&model, 100_000, 1000 + k);
        let target = model.variance_laplacian();
        for i in 0..n {
            for j in 0..n {
                let z = (est.mean[(i, j)].re - target[(i, j)]).abs()
                    / (5.0 * est.stderr_re[(i, j)]).max(1e-12);
                let zi = est.mean[(i, j)].im.abs() / (5.0 * est.stderr_im[(i, j)]).max(1e-12);
                worst = worst.max(z).max(zi);
            }
        }
    }
    let elapsed = start.elapsed();
    check(
        worst <= 1.0 && within(elapsed, 60.0),
        format!(
            "models [{}], max |deviation| / (5·stderr) = {worst:.3}, {:.2}s",
            sizes.join(" "),
            elapsed.as_secs_f64()
        ),
    )
}

// 4. Δ_c ≤ ‖AᵀCA‖ ≤ 2Δ_c and Σd/(2Δ_c) ≤ intdim ≤ n − 1.
fn variance_sandwich() -> Outcome {
    let mut rng = stream_rng(44, 0, 0);
    let mut failures = 0;
    for _ in 0..100 {
        let n = rng.random_range(2..=12);
        let model = random_contingency_model(n, &mut rng);
        let prof = contingency_factors(&model);
        let v = model.variance_laplacian();
        let norm = operator_norm(&v).unwrap();
        let intdim = intrinsic_dimension(&v, true).unwrap();
        let total: f64 = prof.d.iter().sum();
        let tol = 1e-10 * (1.0 + norm);
        let ok = prof.delta_c <= norm + tol
            && norm <= 2.0 * prof.delta_c + tol
            && total / (2.0 * prof.delta_c) <= intdim + 1e-10
            && intdim <= (n - 1) as f64 + 1e-10;
        if !ok {
            failures += 1;
        }
    }
    check(
        failures == 0,
        format!("100 connected models, {failures} failures"),
    )
}

// 5. Sphere-law envelope of E[FFᵀ] on P3.
fn sphere_envelope() -> Outcome {
    let p3 = Topology::path(3).unwrap();
    let env = lcpf_variance_envelope(&p3, EnvelopeMode::Sphere).map_err(|e| e.to_string())?;
    let law = LineDistribution::Sphere {
        radius_sq: 0.5,
        ambient_dim: Some(p3.n_nodes().max(p3.n_edges())),
    };
    let dists = vec![law; p3.n_edges()];
    let est = lcpf_second_moment_estimate(&p3, &dists, 100_000, 55).map_err(|e| e.to_string())?;
    let diff = &env.matrix - &est.mean;
    let sym = (&diff + diff.transpose()) * 0.5;
    let lmin = lambda_min(&sym).map_err(|e| e.to_string())?;
    let tol = 5.0 * est.stderr.norm();
    check(
        lmin >= -tol && (env.nu - 2.0).abs() < 1e-12,
        format!(
            "λ_min(V − Ê[FFᵀ]) = {lmin:.3e} ≥ −{tol:.3e}; ν = {}",
            env.nu
        ),
    )
}

// 6. LCPF spectral error bounds on P3 with Δ = 0.1.
fn lcpf_bounds() -> Outcome {
    let p3 = Topology::path(3).unwrap();
    let delta = 0.1;
    let dists = vec![LineDistribution::bounded(LineAdmittance::new(1.0, -1.0), delta); 2];
    let stats = lcpf_deviation_norms(&p3, &dists, 10_000, 66).map_err(|e| e.to_string())?;
    let expectation = lcpf_expectation_bound(3, delta).unwrap().value;
    let reference = lcpf_expectation_bound(4, delta).unwrap().value;
    let mut ok = stats.mean <= expectation && (reference - 1.203).abs() < 1e-3;
    let mut checked = 0;
    let mut worst_ratio = 0.0f64;
    for t in linspace(0.05, 1.5, 30) {
        let bound = lcpf_tail_bound(t, 3, delta).unwrap().value;
        if bound > 1.0 {
            continue;
        }
        checked += 1;
        let emp = stats.tail(t);
        worst_ratio = worst_ratio.max(emp / bound);
        ok &= emp <= 4.0 * bound;
    }
    ok &= checked > 0;
    check(
        ok,
        format!(
            "E‖F−EF‖ ≈ {:.4} ≤ {expectation:.4} (n=4 reference {reference:.4}); \
             {checked} grid points, max empirical/bound = {worst_ratio:.3} ≤ 4",
            stats.mean
        ),
    )
}

// 7. Closed-form tree inversion.
fn tree_inversion() -> Outcome {
    let mut rng = stream_rng(77, 0, 0);
    let mut worst_paths = 0.0f64;
    let mut worst_identity = 0.0f64;
    let mut min_eig = f64::INFINITY;
    for _ in 0..50 {
        let n = rng.random_range(2..=30);
        let t = sample_random_tree(n, &mut rng)
            .unwrap()
            .with_reference(0)
            .unwrap();
        let lines: Vec<_> = (0..t.n_edges())
            .map(|_| {
                let g = 2.0 * (1.0 - rng.random::<f64>());
                let b = -2.0 * (1.0 - rng.random::<f64>());
                LineAdmittance::new(g, b)
            })
            .collect();
        let j = flat_start_jacobian(&t, &lines, true).unwrap();
        let schur = schur_inverse(&j).map_err(|e| e.to_string())?;
        let line = line_space_inverse(&t, &lines).map_err(|e| e.to_string())?;
        let scale = 1.0f64.max(line.r_matrix.amax()).max(line.x_matrix.amax());
        let gap = max_abs_diff(&schur.r_matrix, &line.r_matrix)
            .max(max_abs_diff(&schur.x_matrix, &line.x_matrix))
            / scale;
        worst_paths = worst_paths.max(gap);
        let prod = j.matrix() * line.inverse_matrix();
        worst_identity = worst_identity.max(max_abs_diff(
            &prod,
            &DMatrix::identity(2 * (n - 1), 2 * (n - 1)),
        ));
        let r_sym = (&line.r_matrix + line.r_matrix.transpose()) * 0.5;
        let x_sym = (&line.x_matrix + line.x_matrix.transpose()) * 0.5;
        min_eig = min_eig
            .min(lambda_min(&r_sym).unwrap())
            .min(lambda_min(&x_sym).unwrap());
    }
    check(
        worst_paths <= 1e-9 && worst_identity <= 1e-9 && min_eig > 0.0,
        format!(
            "50 trees: path gap {worst_paths:.2e}, ‖F·F⁻¹ − I‖_max {worst_identity:.2e}, \
             min λ(R, X) = {min_eig:.3e}"
        ),
    )
}

// 8. Tangent residual identities.
fn manifold_identities() -> Outcome {
    let mut rng = stream_rng(88, 0, 0);
    let mut worst_gap = 0.0f64;
    let mut worst_chain = f64::NEG_INFINITY;
    let mut worst_scaling = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(2..=10);
        let t = random_connected(n, 0.3, &mut rng);
        let w: Vec<LineAdmittance> = (0..t.n_edges())
            .map(|_| random_admittance(&mut rng).into())
            .collect();
        let y = assemble_admittance(&t, &w).unwrap();
        let u = DVector::from_fn(n, |_, _| {
            Complex64::new(
                1.0 + 0.2 * (rng.random::<f64>() - 0.5),
                0.2 * (rng.random::<f64>() - 0.5),
            )
        });
        let h = DVector::from_fn(n, |_, _| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * 0.2
        });
        let base = ManifoldPoint::new(&y, u).unwrap();
        let step = TangentStep::new(base.clone(), h.clone()).unwrap();
        let closed = tangent_residual(&y, &step).unwrap();
        let direct = taylor_residual(&y, &step).unwrap();
        worst_gap = worst_gap.max(norm2(&(&closed - &direct)));
        let y_norm = operator_norm(y.matrix()).unwrap();
        let chain = norm_inf(&h) * y_norm * norm2(&h);
        worst_chain = worst_chain.max(norm2(&closed) - chain * (1.0 + 1e-12));
        let r0 = norm2(&closed);
        for alpha in [2.0, 0.5] {
            let scaled = TangentStep::new(base.clone(), &h * Complex64::new(alpha, 0.0)).unwrap();
            let ra = norm2(&tangent_residual(&y, &scaled).unwrap());
            if r0 > 0.0 {
                worst_scaling =
                    worst_scaling.max((ra - alpha * alpha * r0).abs() / (alpha * alpha * r0));
            }
        }
    }
    check(
        worst_gap <= 1e-12 && worst_chain <= 0.0 && worst_scaling <= 1e-10,
        format!(
            "100 instances: closed vs Taylor {worst_gap:.2e}, chain slack {worst_chain:.2e} ≤ 0, \
             α² scaling rel. error {worst_scaling:.2e}"
        ),
    )
}

// 9. Lifted norm and Kronecker reconstructions.
fn lift_identities() -> Outcome {
    let mut rng: ChaCha8Rng = stream_rng(99, 0, 0);
    let mut worst_norm = 0.0f64;
    let mut worst_lift = 0.0f64;
    let mut worst_jac = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(2..=12);
        let t = random_connected(n, 0.4, &mut rng);
        let w: Vec<LineAdmittance> = (0..t.n_edges())
            .map(|_| LineAdmittance::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
            .collect();
        let y = assemble_admittance(&t, &w).unwrap();
        let lifted = lift_real(&y);
        let a = operator_norm(y.matrix()).unwrap();
        let b = operator_norm(&lifted).unwrap();
        worst_norm = worst_norm.max((a - b).abs());
        let ks = kronecker_sum(&t, &w, UpsilonConvention::Lifted).unwrap();
        worst_lift = worst_lift.max(max_abs_diff(&ks, &lifted));
        let f = flat_start_jacobian(&t, &w, false).unwrap();
        let kj = kronecker_sum(&t, &w, UpsilonConvention::Jacobian).unwrap();
        worst_jac = worst_jac.max(max_abs_diff(&kj, f.matrix()));
    }
    check(
        worst_norm <= 1e-9 && worst_lift <= 1e-12 && worst_jac <= 1e-12,
        format!(
            "100 Laplacians: |‖Ȳ‖ − ‖Y‖| ≤ {worst_norm:.2e}, Ȳ reconstruction {worst_lift:.2e}, \
             F reconstruction {worst_jac:.2e}"
        ),
    )
}

// 10. Byte-identical output for identical config and seed.
fn determinism() -> Outcome {
    let k3 = Topology::complete(3).unwrap();
    let p3 = Topology::path(3).unwrap();
    let configs = vec![
        ExperimentConfig {
            n: 12,
            samples: 20,
            p_sweep: vec![0.2, 0.5, 0.9],
            seed: 10,
            ..ExperimentConfig::new(ExperimentKind::NormSweep)
        },
        ExperimentConfig {
            topology: Some(k3.clone()),
            samples: 3000,
            t_grid: linspace(0.0, 3.0, 7),
            seed: 11,
            ..ExperimentConfig::new(ExperimentKind::ContingencyTail)
        },
        ExperimentConfig {
            topology: Some(k3.clone()),
            samples: 3000,
            seed: 12,
            ..ExperimentConfig::new(ExperimentKind::ContingencyExpectation)
        },
        ExperimentConfig {
            topology: Some(p3),
            samples: 3000,
            t_grid: linspace(0.1, 1.0, 5),
            seed: 13,
            ..ExperimentConfig::new(ExperimentKind::LcpfBounds)
        },
        ExperimentConfig {
            n: 6,
            samples: 50,
            seed: 14,
            lines: Some(LineSpec::Uniform(LineDistribution::Disk)),
            ..ExperimentConfig::new(ExperimentKind::Manifold)
        },
        ExperimentConfig {
            topology: Some(k3),
            t_grid: linspace(2.0, 4.0, 5),
            ..ExperimentConfig::new(ExperimentKind::Bruteforce)
        },
    ];
    let mut identical = 0;
    for cfg in &configs {
        let render = || -> Result<Vec<u8>, String> {
            let table = experiment::run(cfg).map_err(|e| e.to_string())?;
            let mut buf = Vec::new();
            table
                .write(&mut buf, Format::Csv)
                .map_err(|e| e.to_string())?;
            Ok(buf)
        };
        if render()? == render()? {
            identical += 1;
        }
    }
    check(
        identical == configs.len(),
        format!(
            "{identical}/{} experiments byte-identical across runs",
            configs.len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1 norm sweep dominance and growth", norm_sweep_dominance),
        (
            "2 contingency bounds vs exhaustive enumeration",
            contingency_exact,
        ),
        ("3 matrix variance identity", variance_identity),
        ("4 variance-norm sandwich", variance_sandwich),
        ("5 sphere-law variance envelope", sphere_envelope),
        ("6 LCPF tail and expectation bounds", lcpf_bounds),
        ("7 tree inversion", tree_inversion),
        ("8 manifold residual identities", manifold_identities),
        ("9 norm-lift and Kronecker identities", lift_identities),
        ("10 determinism", determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  [{name}] {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  [{name}] {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
