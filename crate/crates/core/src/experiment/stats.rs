use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Generator for one unit of work. Streams are keyed by `(major, minor)`
/// (sweep index and sample or chunk index), so results do not depend on how
/// work is scheduled.
pub fn stream_rng(seed: u64, major: u32, minor: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((u64::from(major) << 32) | u64::from(minor));
    rng
}

/// Operator-norm statistics from Monte Carlo sampling or exact enumeration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleStats {
    pub norms: Vec<f64>,
    /// Pattern probabilities for exact enumeration; `None` for equally
    /// weighted samples.
    pub weights: Option<Vec<f64>>,
    pub mean: f64,
    /// Sample standard deviation over `√samples`; zero when exact.
    pub stderr: f64,
    pub exact: bool,
}

impl SampleStats {
    pub fn from_samples(norms: Vec<f64>) -> Self {
        let n = norms.len() as f64;
        let mean = norms.iter().sum::<f64>() / n;
        let stderr = if norms.len() > 1 {
            let var = norms.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        SampleStats {
            norms,
            weights: None,
            mean,
            stderr,
            exact: false,
        }
    }

    pub fn from_distribution(norms: Vec<f64>, weights: Vec<f64>) -> Self {
        let mean = norms.iter().zip(&weights).map(|(x, w)| x * w).sum();
        SampleStats {
            norms,
            weights: Some(weights),
            mean,
            stderr: 0.0,
            exact: true,
        }
    }

    pub fn len(&self) -> usize {
        self.norms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norms.is_empty()
    }

    /// `Pr(‖·‖ ≥ t)`: exact probability or empirical frequency.
    pub fn tail(&self, t: f64) -> f64 {
        match &self.weights {
            Some(w) => self
                .norms
                .iter()
                .zip(w)
                .filter(|(x, _)| **x >= t)
                .fold(0.0, |acc, (_, p)| acc + p)
                .min(1.0),
            None => {
                let hits = self.norms.iter().filter(|x| **x >= t).count();
                hits as f64 / self.norms.len() as f64
            }
        }
    }

    pub fn tail_frequencies(&self, grid: &[f64]) -> Vec<f64> {
        grid.iter().map(|&t| self.tail(t)).collect()
    }

    pub fn total_probability(&self) -> f64 {
        match &self.weights {
            Some(w) => w.iter().sum(),
            None => 1.0,
        }
    }
}

/// One-sided upper limit of a binomial proportion at 99% confidence
/// (normal approximation with a `1/N` floor).
pub fn binomial_upper_99(p: f64, samples: usize) -> f64 {
    let n = samples as f64;
    let p = p.clamp(0.0, 1.0);
    p + 2.326 * (p * (1.0 - p) / n).sqrt() + 1.0 / n
}

/// Entrywise mean and standard error of a random real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixEstimate {
    pub mean: DMatrix<f64>,
    pub stderr: DMatrix<f64>,
    pub samples: usize,
}

/// Entrywise mean and standard errors (real and imaginary parts separately)
/// of a random complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrixEstimate {
    pub mean: DMatrix<Complex64>,
    pub stderr_re: DMatrix<f64>,
    pub stderr_im: DMatrix<f64>,
    pub samples: usize,
}

/// Running sums for [`MatrixEstimate`].
#[derive(Debug, Clone)]
pub struct MatrixMoments {
    sum: DMatrix<f64>,
    sum_sq: DMatrix<f64>,
    count: usize,
}

impl MatrixMoments {
    pub fn new(rows: usize, cols: usize) -> Self {
        MatrixMoments {
            sum: DMatrix::zeros(rows, cols),
            sum_sq: DMatrix::zeros(rows, cols),
            count: 0,
        }
    }

    pub fn push(&mut self, x: &DMatrix<f64>) {
        self.sum += x;
        self.sum_sq += x.component_mul(x);
        self.count += 1;
    }

    pub fn merge(&mut self, other: &MatrixMoments) {
        self.sum += &other.sum;
        self.sum_sq += &other.sum_sq;
        self.count += other.count;
    }

    pub fn finish(&self) -> MatrixEstimate {
        let n = self.count as f64;
        let mean = &self.sum / n;
        let stderr = self.sum_sq.zip_map(&mean, |s2, mu| {
            if self.count < 2 {
                return 0.0;
            }
            let var = ((s2 - n * mu * mu) / (n - 1.0)).max(0.0);
            (var / n).sqrt()
        });
        MatrixEstimate {
            mean,
            stderr,
            samples: self.count,
        }
    }
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let rx = ranks(x);
    let ry = ranks(y);
    pearson(&rx, &ry)
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            out[idx[k]] = avg;
        }
        i = j + 1;
    }
    out
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}
