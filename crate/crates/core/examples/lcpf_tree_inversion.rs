//! Linearised power flow on a radial network: closed-form inverse of the
//! flat-start Jacobian through line-space impedances, checked against the
//! Schur-complement route, then used to solve for voltage deviations.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use grid_concentrator::admittance::LineAdmittance;
use grid_concentrator::graph::sample_random_tree;
use grid_concentrator::lcpf::{
    flat_start_jacobian, invert_tree_lcpf, lcpf_solve, line_space_inverse, residual_norm,
    schur_inverse,
};
use grid_concentrator::spectra::max_abs_diff;

fn main() -> grid_concentrator::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let t = sample_random_tree(12, &mut rng)?.with_reference(0)?;
    println!("tree edges: {:?}", t.edges());

    let lines: Vec<LineAdmittance> = (0..t.n_edges())
        .map(|_| LineAdmittance::new(rng.random_range(0.2..2.0), rng.random_range(-2.0..-0.2)))
        .collect();
    let j = flat_start_jacobian(&t, &lines, true)?;

    let schur = schur_inverse(&j)?;
    let line = line_space_inverse(&t, &lines)?;
    println!(
        "route agreement: R {:.2e}, X {:.2e}",
        max_abs_diff(&schur.r_matrix, &line.r_matrix),
        max_abs_diff(&schur.x_matrix, &line.x_matrix)
    );
    let blocks = invert_tree_lcpf(&j, &t, &lines)?;
    let dim = 2 * j.dim();
    let id = j.matrix() * blocks.inverse_matrix();
    println!(
        "‖F·F⁻¹ − I‖_max = {:.2e}",
        max_abs_diff(&id, &DMatrix::identity(dim, dim))
    );

    let p = DVector::from_fn(j.dim(), |_, _| rng.random_range(-0.5..0.5));
    let q = DVector::from_fn(j.dim(), |_, _| rng.random_range(-0.2..0.2));
    let (eps, theta) = lcpf_solve(&j, &t, &lines, &p, &q)?;
    println!("{:>4} {:>8} {:>8} {:>9} {:>9}", "bus", "p", "q", "ε", "θ");
    for (k, bus) in (1..t.n_nodes()).enumerate() {
        println!(
            "{bus:>4} {:>8.4} {:>8.4} {:>9.4} {:>9.4}",
            p[k], q[k], eps[k], theta[k]
        );
    }
    println!(
        "residual ‖F[ε;θ] − [p;q]‖ = {:.2e}",
        residual_norm(&j, &eps, &theta, &p, &q)
    );
    Ok(())
}
