//! Erdős–Rényi norm sweep: mean ‖Y‖ against the degree-based expectation
//! bound as the line probability grows.
//!
//!     cargo run --release --example norm_sweep -- [n] [samples] [seed]

use grid_concentrator::experiment::{
    run_norm_sweep, spearman, summarize_sweep, ExperimentConfig, ExperimentKind,
};

fn main() -> grid_concentrator::Result<()> {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<u64>().expect("integer argument"));
    let n = args.next().unwrap_or(20) as usize;
    let samples = args.next().unwrap_or(200) as usize;
    let seed = args.next().unwrap_or(2024);

    let cfg = ExperimentConfig {
        n,
        samples,
        seed,
        ..ExperimentConfig::new(ExperimentKind::NormSweep)
    };
    let records = run_norm_sweep(&cfg)?;
    let points = summarize_sweep(&records);

    println!(
        "{:>5} {:>8} {:>8} {:>10} {:>10}",
        "p", "mean m", "viol.", "mean ‖Y‖", "bound"
    );
    for pt in &points {
        println!(
            "{:>5.2} {:>8.2} {:>8} {:>10.4} {:>10.4}",
            pt.p, pt.mean_m, pt.violations, pt.mean_norm, pt.mean_bound
        );
    }
    let violations = records.iter().filter(|r| !r.dominated).count();
    let m: Vec<f64> = points.iter().map(|p| p.mean_m).collect();
    let norm: Vec<f64> = points.iter().map(|p| p.mean_norm).collect();
    println!("violations: {violations} / {}", records.len());
    println!("Spearman(mean m, mean ‖Y‖) = {:.4}", spearman(&m, &norm));
    Ok(())
}
