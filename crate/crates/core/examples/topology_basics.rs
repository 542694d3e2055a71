//! Build a small network, assemble its admittance matrix and inspect the
//! spectral quantities every bound is phrased in.

use grid_concentrator::admittance::{assemble_admittance, lift_real, LineAdmittance};
use grid_concentrator::bounds::{degree_deterministic_bound, degree_expectation_bound};
use grid_concentrator::graph::Topology;
use grid_concentrator::spectra::{intrinsic_dimension, operator_norm};

fn main() -> grid_concentrator::Result<()> {
    let t = Topology::new(5, vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)])?;
    println!(
        "n = {}, m = {}, degrees {:?}, connected: {}",
        t.n_nodes(),
        t.n_edges(),
        t.degrees(),
        t.is_connected()
    );

    let a = t.incidence_matrix(false)?;
    println!("incidence A (m x n):{}", a.matrix());
    println!("Laplacian AᵀA:{}", t.laplacian());

    let lines: Vec<LineAdmittance> = (0..t.n_edges())
        .map(|l| LineAdmittance::new(0.2 + 0.1 * l as f64, -0.9))
        .collect();
    let y = assemble_admittance(&t, &lines)?;
    let y_norm = operator_norm(y.matrix())?;
    let lifted_norm = operator_norm(&lift_real(&y))?;
    println!("‖Y‖ = {y_norm:.6}, ‖Ȳ‖ = {lifted_norm:.6}");

    let delta = t.max_degree() as f64;
    let det = degree_deterministic_bound(delta, 1.0)?;
    let exp = degree_expectation_bound(t.n_nodes(), delta)?;
    println!("deterministic bound 2Δ = {:.4}", det.value);
    println!("expectation bound = {:.4}", exp.value);
    println!(
        "intdim(AᵀA) = {:.4}",
        intrinsic_dimension(&t.laplacian(), true)?
    );
    Ok(())
}
