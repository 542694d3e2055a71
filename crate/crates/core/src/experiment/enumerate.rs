use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::stats::SampleStats;
use crate::bounds::ContingencyModel;
use crate::error::{Error, Result};
use crate::spectra::operator_norm;

pub const MAX_BRUTE_FORCE_LINES: usize = 20;

/// Exact law of `‖Y - EY‖` under independent line switching, by enumerating
/// all `2^m` open/closed patterns. Zero-probability patterns are skipped.
pub fn brute_force_distribution(model: &ContingencyModel) -> Result<SampleStats> {
    let t = model.topology();
    let m = t.n_edges();
    if m > MAX_BRUTE_FORCE_LINES {
        return Err(Error::TooManyLines {
            m,
            max: MAX_BRUTE_FORCE_LINES,
        });
    }
    let n = t.n_nodes();
    let probs = model.probs();
    let ys = model.admittances();
    let results: Vec<Option<(f64, f64)>> = (0u32..(1u32 << m))
        .into_par_iter()
        .map(|pattern| {
            let mut prob = 1.0;
            let mut centered = DMatrix::<Complex64>::zeros(n, n);
            for (l, &(i, j)) in t.edges().iter().enumerate() {
                let closed = pattern >> l & 1 == 1;
                let p = probs[l];
                prob *= if closed { p } else { 1.0 - p };
                let w = ys[l] * (f64::from(u8::from(closed)) - p);
                centered[(i, i)] += w;
                centered[(j, j)] += w;
                centered[(i, j)] -= w;
                centered[(j, i)] -= w;
            }
            if prob == 0.0 {
                return Ok(None);
            }
            Ok(Some((operator_norm(&centered)?, prob)))
        })
        .collect::<Result<_>>()?;
    let (norms, weights) = results.into_iter().flatten().unzip();
    Ok(SampleStats::from_distribution(norms, weights))
}
