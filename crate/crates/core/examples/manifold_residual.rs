//! How far a tangent step leaves the power-flow manifold: the closed-form
//! residual against direct evaluation and the norm bounds built on ‖Y‖.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use grid_concentrator::admittance::{
    assemble_admittance, homogeneous, sample_weights, LineDistribution,
};
use grid_concentrator::bounds::degree_expectation_bound;
use grid_concentrator::graph::Topology;
use grid_concentrator::manifold::{
    distance_bound, expected_distance_bound, norm2, same_voltage_proxy_distance, tangent_residual,
    taylor_residual, DistanceMode, ManifoldPoint, TangentStep,
};
use grid_concentrator::spectra::operator_norm;

fn main() -> grid_concentrator::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let t = Topology::complete(6)?;
    let w = sample_weights(&homogeneous(&t, LineDistribution::Disk), &mut rng)?;
    let y = assemble_admittance(&t, &w)?;
    let y_norm = operator_norm(y.matrix())?;

    let u = DVector::from_fn(6, |_, _| {
        Complex64::new(
            1.0 + rng.random_range(-0.1..0.1),
            rng.random_range(-0.1..0.1),
        )
    });
    let base = ManifoldPoint::new(&y, u)?;
    let h0 = DVector::from_fn(6, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });

    let source = degree_expectation_bound(6, t.max_degree() as f64)?;
    println!(
        "‖Y‖ = {y_norm:.4}, expectation bound on ‖Y‖ = {:.4}",
        source.value
    );
    println!(
        "{:>6} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11}",
        "α", "residual", "|closed−Δ|", "proxy", "Hölder", "crude", "E-bound"
    );
    for alpha in [0.2, 0.1, 0.05, 0.025, 0.0125] {
        let h = &h0 * Complex64::new(alpha, 0.0);
        let step = TangentStep::new(base.clone(), h.clone())?;
        let closed = tangent_residual(&y, &step)?;
        let direct = taylor_residual(&y, &step)?;
        println!(
            "{alpha:>6.4} {:>11.4e} {:>11.2e} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e}",
            norm2(&closed),
            norm2(&(&closed - &direct)),
            same_voltage_proxy_distance(&y, &step)?,
            distance_bound(&h, y_norm, DistanceMode::Holder)?,
            distance_bound(&h, y_norm, DistanceMode::Crude)?,
            expected_distance_bound(&h, &source)?.value,
        );
    }
    Ok(())
}
