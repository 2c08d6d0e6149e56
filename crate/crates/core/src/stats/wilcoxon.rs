use alloc::vec;
use alloc::vec::Vec;

use super::special::normal_two_sided;
use super::{TestKind, TestResult};
use crate::error::{Error, Result};

/// Largest number of non-zero differences for which the null distribution is
/// enumerated exactly.
pub const EXACT_MAX_N: usize = 20;

/// Two-sided Wilcoxon signed-rank test on `x - y`.
///
/// Zero differences are dropped. Tied magnitudes get midranks. Up to
/// [`EXACT_MAX_N`] remaining differences the p-value is exact over all sign
/// patterns of the observed ranks; beyond that a normal approximation with
/// tie-corrected variance and continuity correction is used.
pub fn wilcoxon_signed_rank(x: &[f64], y: &[f64]) -> Result<TestResult> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(Error::TooFewCases(x.len()));
    }
    let mut d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).filter(|&v| v != 0.0).collect();
    if d.is_empty() {
        return Err(Error::AllZeroDifferences);
    }
    d.sort_unstable_by(|a, b| a.abs().total_cmp(&b.abs()));
    let n = d.len();

    // Ranks are kept doubled so midranks stay integral.
    let mut ranks2 = vec![0u64; n];
    let mut tie_sizes = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && d[j].abs() == d[i].abs() {
            j += 1;
        }
        // ranks i+1 ..= j share the midrank (i + 1 + j) / 2
        let mid2 = (i + 1 + j) as u64;
        ranks2[i..j].fill(mid2);
        tie_sizes.push(j - i);
        i = j;
    }
    let w_plus2: u64 = d.iter().zip(&ranks2).filter(|(v, _)| **v > 0.0).map(|(_, r)| r).sum();
    let w_plus = w_plus2 as f64 / 2.0;

    if n <= EXACT_MAX_N {
        let p = exact_p(&ranks2, w_plus2);
        Ok(TestResult { kind: TestKind::WilcoxonExact, statistic: w_plus, df: None, n_effective: n, p_two_sided: p })
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let ties: f64 = tie_sizes.iter().map(|&t| (t * t * t - t) as f64).sum();
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - ties / 48.0;
        let dev = ((w_plus - mean).abs() - 0.5).max(0.0);
        let p = normal_two_sided(dev / libm::sqrt(var));
        Ok(TestResult { kind: TestKind::WilcoxonNormal, statistic: w_plus, df: None, n_effective: n, p_two_sided: p })
    }
}

/// Fraction of the `2^n` sign assignments whose doubled W+ lies at least as
/// far from its mean as the observed one.
fn exact_p(ranks2: &[u64], observed2: u64) -> f64 {
    let total2: u64 = ranks2.iter().sum();
    // counts[s] = number of sign patterns with doubled positive-rank sum s
    let mut counts = vec![0u64; total2 as usize + 1];
    counts[0] = 1;
    let mut reach = 0usize;
    for &r in ranks2 {
        let r = r as usize;
        for s in (0..=reach).rev() {
            if counts[s] != 0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    // |2 W2 - total2| compares distances from the mean without halves
    let dist = |s: u64| (2 * s).abs_diff(total2);
    let threshold = dist(observed2);
    let extreme: u64 = counts.iter().enumerate().filter(|(s, _)| dist(*s as u64) >= threshold).map(|(_, c)| c).sum();
    extreme as f64 / (1u64 << ranks2.len()) as f64
}
