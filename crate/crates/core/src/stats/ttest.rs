use super::special::student_t_two_sided;
use super::{TestKind, TestResult};
use crate::error::{Error, Result};

/// Differences whose sample sd falls below this fraction of their largest
/// magnitude are treated as constant.
const DEGENERATE_REL_SD: f64 = 1e-12;

/// Two-sided paired Student t test on `x - y`.
pub fn paired_t(x: &[f64], y: &[f64]) -> Result<TestResult> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::TooFewCases(n));
    }
    let nf = n as f64;
    let d = x.iter().zip(y).map(|(a, b)| a - b);
    let mean = d.clone().sum::<f64>() / nf;
    let ss: f64 = d.clone().map(|v| (v - mean) * (v - mean)).sum();
    let sd = libm::sqrt(ss / (nf - 1.0));
    let scale = d.fold(0.0f64, |m, v| m.max(v.abs()));
    if sd == 0.0 || sd <= DEGENERATE_REL_SD * scale {
        return Err(Error::DegenerateVariance);
    }
    let t = mean / (sd / libm::sqrt(nf));
    let df = nf - 1.0;
    Ok(TestResult {
        kind: TestKind::PairedT,
        statistic: t,
        df: Some(df),
        n_effective: n,
        p_two_sided: student_t_two_sided(t, df),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn diffs(d: &[f64]) -> Result<TestResult> {
        paired_t(d, &vec![0.0; d.len()])
    }

    #[test]
    fn equal_samples_degenerate() {
        assert_eq!(paired_t(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]), Err(Error::DegenerateVariance));
    }

    #[test]
    fn near_constant_differences_degenerate() {
        // 0.80 - 0.70 and 0.82 - 0.72 differ in the last bits only
        assert_eq!(paired_t(&[0.80, 0.82, 0.78], &[0.70, 0.72, 0.68]), Err(Error::DegenerateVariance));
    }

    #[test]
    fn df2_example() {
        let r = diffs(&[1.0, 1.0, 2.0]).unwrap();
        assert!((r.statistic - 4.0).abs() < 1e-12);
        assert_eq!(r.df, Some(2.0));
        let closed = 1.0 - 4.0 / 18.0f64.sqrt();
        assert!((r.p_two_sided - closed).abs() < 1e-12);
        assert!((r.p_two_sided - 0.057191).abs() < 1e-6);
    }

    #[test]
    fn symmetric_differences() {
        let r = diffs(&[-1.0, 1.0]).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_two_sided, 1.0);
    }

    #[test]
    fn argument_errors() {
        assert_eq!(paired_t(&[1.0], &[2.0]), Err(Error::TooFewCases(1)));
        assert_eq!(paired_t(&[1.0, 2.0], &[2.0]), Err(Error::LengthMismatch(2, 1)));
    }

    proptest! {
        #[test]
        fn antisymmetric(x in proptest::collection::vec(-10.0f64..10.0, 3..30), y in proptest::collection::vec(-10.0f64..10.0, 30)) {
            let y = &y[..x.len()];
            let xy = paired_t(&x, y).unwrap();
            let yx = paired_t(y, &x).unwrap();
            prop_assert_eq!(xy.statistic, -yx.statistic);
            prop_assert_eq!(xy.p_two_sided, yx.p_two_sided);
            prop_assert!((0.0..=1.0).contains(&xy.p_two_sided));
        }

        #[test]
        fn scale_invariant(d in proptest::collection::vec(-5.0f64..5.0, 3..25), lambda in 0.01f64..100.0) {
            let base = diffs(&d).unwrap();
            let scaled: Vec<f64> = d.iter().map(|v| v * lambda).collect();
            let s = diffs(&scaled).unwrap();
            prop_assert!((base.statistic - s.statistic).abs() <= 1e-9 * base.statistic.abs().max(1.0));
        }
    }
}
