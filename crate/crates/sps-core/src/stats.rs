//! Small numerical and statistical helpers shared by the solvers and
//! estimators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A point estimate with its standard error.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

impl Estimate {
    pub fn new(value: f64, se: f64) -> Self {
        Self { value, se }
    }
}

/// Binomial proportion with its standard error.
pub fn binomial_estimate(successes: usize, n: usize) -> Estimate {
    let p = successes as f64 / n as f64;
    Estimate::new(p, (p * (1.0 - p) / n as f64).sqrt())
}

/// Least-squares polynomial fit `y ≈ Σ c_k x^k` of degree `deg` (coefficients
/// low-to-high). Solved via the normal equations with Gaussian elimination;
/// intended for small, well-conditioned systems (counting-field fits).
pub fn polyfit(x: &[f64], y: &[f64], deg: usize) -> Vec<f64> {
    let m = deg + 1;
    assert!(x.len() >= m && x.len() == y.len());
    // Build normal equations A c = b with A = VᵀV, b = Vᵀy.
    let mut a = vec![0.0f64; m * m];
    let mut b = vec![0.0f64; m];
    for (&xi, &yi) in x.iter().zip(y) {
        let mut pow = vec![1.0; m];
        for k in 1..m {
            pow[k] = pow[k - 1] * xi;
        }
        for r in 0..m {
            b[r] += pow[r] * yi;
            for c in 0..m {
                a[r * m + c] += pow[r] * pow[c];
            }
        }
    }
    solve_dense(&mut a, &mut b, m);
    b
}

/// In-place Gaussian elimination with partial pivoting; solution left in `b`.
fn solve_dense(a: &mut [f64], b: &mut [f64], n: usize) {
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r * n + col].abs() > a[piv * n + col].abs() {
                piv = r;
            }
        }
        if piv != col {
            for c in 0..n {
                a.swap(col * n + c, piv * n + c);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        assert!(d.abs() > 1e-300, "singular system in polyfit");
        for r in col + 1..n {
            let f = a[r * n + col] / d;
            for c in col..n {
                a[r * n + c] -= f * a[col * n + c];
            }
            b[r] -= f * b[col];
        }
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for c in col + 1..n {
            s -= a[col * n + c] * b[c];
        }
        b[col] = s / a[col * n + col];
    }
}

/// Evaluate a low-to-high coefficient polynomial at `x`.
pub fn polyval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck)
}

/// Derivative coefficients of a low-to-high coefficient polynomial.
pub fn polyder(c: &[f64]) -> Vec<f64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &ck)| k as f64 * ck)
        .collect()
}

/// SplitMix64 step, used to derive independent sub-seeds.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Counter-based seed split: an independent 256-bit seed for trajectory
/// `index` of logical RNG `stream` under `master_seed`. Deterministic and
/// order-independent, so parallel execution cannot change results.
pub fn split_seed(master_seed: u64, stream: u64, index: u64) -> [u8; 32] {
    let mut state = master_seed ^ stream.wrapping_mul(0xA076_1D64_78BD_642F) ^ index
        .wrapping_mul(0xE703_7ED1_A0B4_28DB);
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    seed
}

/// ChaCha RNG for a (master seed, stream, index) triple.
pub fn rng_for(master_seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(split_seed(master_seed, stream, index))
}

/// Bootstrap standard error of `statistic` over trajectory-level data,
/// resampling with replacement `n_resamples` times (deterministic seed).
pub fn bootstrap_se<T, F>(data: &[T], n_resamples: usize, seed: u64, statistic: F) -> f64
where
    T: Copy,
    F: Fn(&[T]) -> f64,
{
    let n = data.len();
    let mut rng = rng_for(seed, 0xB005_EED, 0);
    let mut vals = Vec::with_capacity(n_resamples);
    let mut sample = vec![data[0]; n];
    for _ in 0..n_resamples {
        for s in sample.iter_mut() {
            *s = data[rng.gen_range(0..n)];
        }
        vals.push(statistic(&sample));
    }
    let mean = vals.iter().sum::<f64>() / n_resamples as f64;
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
        / (n_resamples as f64 - 1.0);
    var.sqrt()
}

/// Two-sided Kolmogorov–Smirnov statistic of `samples` against a CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let c = cdf(x);
        d = d.max((c - i as f64 / n).abs());
        d = d.max(((i as f64 + 1.0) / n - c).abs());
    }
    d
}
