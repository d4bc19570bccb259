use crate::error::{Error, Result};

/// Exact distribution of a sum of independent Bernoulli variables, by
/// dynamic-programming convolution. Entry `k` is `Pr[sum = k]`.
pub fn poisson_binomial_pmf(probs: &[f64]) -> Result<Vec<f64>> {
    check_probs(probs)?;
    let mut pmf = Vec::with_capacity(probs.len() + 1);
    pmf.push(1.0);
    for &p in probs {
        convolve_in_place(&mut pmf, p);
    }
    Ok(pmf)
}

pub(crate) fn check_probs(probs: &[f64]) -> Result<()> {
    for (index, &value) in probs.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::ProbOutOfRange { index, value });
        }
    }
    Ok(())
}

/// Adds one Bernoulli(p) term to `pmf`.
pub(crate) fn convolve_in_place(pmf: &mut Vec<f64>, p: f64) {
    let q = 1.0 - p;
    pmf.push(0.0);
    for k in (1..pmf.len()).rev() {
        pmf[k] = pmf[k] * q + pmf[k - 1] * p;
    }
    pmf[0] *= q;
}
