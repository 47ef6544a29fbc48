/// Sample mean of a scalar Monte Carlo quantity with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    /// Standard error of the mean (variance divisor `n - 1`); `None` for a
    /// single sample.
    pub stderr: Option<f64>,
    pub count: usize,
}

impl McEstimate {
    /// Two-pass mean and standard error. Panics on an empty input.
    pub fn from_values(values: impl IntoIterator<Item = f64>) -> Self {
        let values: Vec<f64> = values.into_iter().collect();
        let count = values.len();
        assert!(count > 0, "estimate of an empty sample");
        let n = count as f64;
        let estimate = values.iter().sum::<f64>() / n;
        let stderr = (count > 1).then(|| {
            let ss: f64 = values.iter().map(|v| (v - estimate).powi(2)).sum();
            (ss / (n - 1.0) / n).sqrt()
        });
        Self {
            estimate,
            stderr,
            count,
        }
    }

    /// `|estimate - target| <= sigmas * stderr`, with a floor of `abs_floor`
    /// for zero-variance samples.
    pub fn agrees_with(&self, target: f64, sigmas: f64, abs_floor: f64) -> bool {
        let threshold = (sigmas * self.stderr.unwrap_or(0.0)).max(abs_floor);
        (self.estimate - target).abs() <= threshold
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_stderr() {
        let e = McEstimate::from_values([1.0, 2.0, 3.0, 4.0]);
        assert_eq!(e.estimate, 2.5);
        // sample variance 5/3, stderr sqrt(5/12)
        assert!((e.stderr.unwrap() - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
        assert_eq!(e.count, 4);
    }

    #[test]
    fn single_value_has_no_stderr() {
        let e = McEstimate::from_values([7.0]);
        assert_eq!(e.estimate, 7.0);
        assert_eq!(e.stderr, None);
    }

    #[test]
    fn constant_sample_has_zero_stderr() {
        let e = McEstimate::from_values([0.0; 10]);
        assert_eq!(e.stderr, Some(0.0));
        assert!(e.agrees_with(0.0, 4.0, 0.0));
    }
}
