use crate::error::{Error, Result};

/// Multiple-comparison adjustment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Adjustment {
    /// `min(p · m, 1)` for a family of size `m`.
    Bonferroni { m: usize },
    /// Benjamini–Hochberg step-up over the given p-values.
    BhFdr,
}

/// Adjusted p-values in input order.
pub fn adjust(pvals: &[f64], method: Adjustment) -> Result<Vec<f64>> {
    if let Some(p) = pvals.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::Value(format!("p-value {p} outside [0, 1]")));
    }
    match method {
        Adjustment::Bonferroni { m } => {
            if m == 0 {
                return Err(Error::Argument("family size m must be at least 1".into()));
            }
            Ok(pvals.iter().map(|p| (p * m as f64).min(1.0)).collect())
        }
        Adjustment::BhFdr => {
            let n = pvals.len();
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|a, b| pvals[*a].total_cmp(&pvals[*b]).then(a.cmp(b)));
            let mut adjusted = vec![0.0; n];
            let mut running = 1.0f64;
            for (pos, &i) in order.iter().enumerate().rev() {
                running = running.min(pvals[i] * n as f64 / (pos + 1) as f64);
                adjusted[i] = running;
            }
            Ok(adjusted)
        }
    }
}
