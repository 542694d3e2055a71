//! Second moment of the flat-start Jacobian under random line admittances,
//! compared with its envelope, and the resulting Bernstein-type tail.

use grid_concentrator::admittance::{LineAdmittance, LineDistribution};
use grid_concentrator::bounds::{bernstein_tail, lcpf_variance_envelope, EnvelopeMode};
use grid_concentrator::experiment::lcpf_second_moment_estimate;
use grid_concentrator::graph::Topology;
use grid_concentrator::spectra::{lambda_min, operator_norm};

fn main() -> grid_concentrator::Result<()> {
    let t = Topology::path(3)?;

    let sphere = LineDistribution::Sphere {
        radius_sq: 0.5,
        ambient_dim: Some(t.n_nodes().max(t.n_edges())),
    };
    let env = lcpf_variance_envelope(&t, EnvelopeMode::Sphere)?;
    let est = lcpf_second_moment_estimate(&t, &vec![sphere; t.n_edges()], 100_000, 5)?;
    let gap = &env.matrix - &est.mean;
    let gap = (&gap + gap.transpose()) * 0.5;
    println!("sphere law:");
    println!(
        "  ‖E[FFᵀ]‖ ≈ {:.4}, envelope norm ν = {:.4}",
        operator_norm(&est.mean)?,
        env.nu
    );
    println!("  λ_min(envelope − estimate) = {:.3e}", lambda_min(&gap)?);
    println!("  stderr (Frobenius) = {:.3e}", est.stderr.norm());

    let delta = 0.1;
    let bounded = LineDistribution::bounded(LineAdmittance::new(0.0, 0.0), delta);
    let env = lcpf_variance_envelope(&t, EnvelopeMode::Bounded { delta })?;
    let est = lcpf_second_moment_estimate(&t, &vec![bounded; t.n_edges()], 100_000, 6)?;
    let gap = &env.matrix - &est.mean;
    let gap = (&gap + gap.transpose()) * 0.5;
    println!("bounded law, Δ = {delta}:");
    println!(
        "  ‖E[FFᵀ]‖ ≈ {:.5}, envelope ν = {:.5}",
        operator_norm(&est.mean)?,
        env.nu
    );
    println!("  λ_min(envelope − estimate) = {:.3e}", lambda_min(&gap)?);

    let dim = 2 * t.n_nodes();
    let big_r = 2.0 * delta * 2.0;
    println!(
        "Bernstein tail with dim = {dim}, R = {big_r}, ν = {:.4}:",
        env.nu
    );
    for k in 1..=6 {
        let x = 0.5 * k as f64;
        let b = bernstein_tail(x, dim, big_r, env.nu)?;
        println!("  t = {x:.1}: {:.4e}", b.value);
    }
    Ok(())
}
