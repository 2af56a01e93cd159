use statrs::distribution::{ContinuousCDF, StudentsT};

use super::{check_finite, mean, variance, Correction, StatResult, TestKind};
use crate::error::{Error, Result};

/// Welch's unequal-variance t-test, two-sided.
pub fn welch_t(a: &[f64], b: &[f64]) -> Result<StatResult> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::Argument("Welch's t-test needs at least two samples per group".into()));
    }
    check_finite(a, "group a")?;
    check_finite(b, "group b")?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (va, vb) = (variance(a) / na, variance(b) / nb);
    if va + vb == 0.0 {
        return Err(Error::Undefined("both groups have zero variance".into()));
    }
    let statistic = (mean(a) - mean(b)) / (va + vb).sqrt();
    let df = (va + vb).powi(2) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    let p_value = if statistic == 0.0 {
        1.0
    } else {
        let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::Undefined(e.to_string()))?;
        (2.0 * dist.sf(statistic.abs())).min(1.0)
    };
    Ok(StatResult {
        test: TestKind::WelchT,
        statistic,
        p_value,
        effect_size: cohens_d(a, b).ok(),
        df: Some(df),
        permutations: None,
        seed: None,
        correction: Correction::None,
        degenerate: false,
    })
}

/// Cohen's d with the pooled standard deviation.
pub fn cohens_d(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::Argument("Cohen's d needs at least two samples per group".into()));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let pooled = ((na - 1.0) * variance(a) + (nb - 1.0) * variance(b)) / (na + nb - 2.0);
    if pooled <= 0.0 {
        return Err(Error::Undefined("pooled variance is zero".into()));
    }
    Ok((mean(a) - mean(b)) / pooled.sqrt())
}
