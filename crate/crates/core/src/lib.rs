//! Random admittance matrices for power networks and the matrix
//! concentration bounds that control them.
//!
//! The crate is organized bottom-up:
//!
//! - [`graph`]: topologies, incidence matrices, random Erdős–Rényi networks.
//! - [`spectra`]: dense operator norms, eigenvalues, Loewner order, Kronecker products.
//! - [`admittance`]: `Y = Aᵀ diag(w) A`, its lifted real form, line-weight laws.
//! - [`bounds`]: closed-form expectation and tail bounds on `‖Y‖`, `‖Y - EY‖`
//!   and the flat-start Jacobian.
//! - [`lcpf`]: the linear coupled power flow operator and its tree inverse.
//! - [`manifold`]: the AC power flow map and tangent-step residuals.
//! - [`experiment`]: Monte Carlo and exhaustive checks of every bound.
//!
//! ```
//! use grid_concentrator::{admittance, bounds, graph::Topology, spectra};
//!
//! let k3 = Topology::complete(3)?;
//! let w = vec![admittance::LineAdmittance::new(1.0, 0.0); 3];
//! let y = admittance::assemble_admittance(&k3, &w)?;
//! let norm = spectra::operator_norm(y.matrix())?;
//! let bound = bounds::degree_expectation_bound(3, k3.max_degree() as f64)?;
//! assert!((norm - 3.0).abs() < 1e-10 && bound.value >= norm);
//! # Ok::<(), grid_concentrator::Error>(())
//! ```

pub mod admittance;
pub mod bounds;
mod error;
pub mod experiment;
pub mod graph;
pub mod lcpf;
pub mod manifold;
pub mod spectra;

pub use error::{Error, Result};
