//! Welch's unequal-variance t-test per feature.

use statrs::distribution::{ContinuousCDF, StudentsT};

use super::{
    sort_indices, Class, FeatureRanking, LabeledFingerprintSet, ScoreOrder, SelectionMethod,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelchResult {
    pub t: f64,
    /// Welch-Satterthwaite degrees of freedom.
    pub dof: f64,
    /// Two-sided.
    pub p_value: f64,
}

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// `None` when both samples have zero variance and equal means.
pub fn welch(a: &[f64], b: &[f64]) -> Result<Option<WelchResult>> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::InvalidInput(
            "Welch t-test needs at least 2 samples per class".into(),
        ));
    }
    let (m1, v1) = mean_var(a);
    let (m2, v2) = mean_var(b);
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let s1 = v1 / n1;
    let s2 = v2 / n2;
    let se2 = s1 + s2;
    if se2 == 0.0 {
        if m1 == m2 {
            return Ok(None);
        }
        return Ok(Some(WelchResult {
            t: (m1 - m2).signum() * f64::INFINITY,
            dof: n1 + n2 - 2.0,
            p_value: 0.0,
        }));
    }
    let t = (m1 - m2) / se2.sqrt();
    let dof = se2 * se2 / (s1 * s1 / (n1 - 1.0) + s2 * s2 / (n2 - 1.0));
    let dist = StudentsT::new(0.0, 1.0, dof)
        .map_err(|e| Error::NumericalFailure(format!("Student t with {dof} dof: {e}")))?;
    let p_value = (2.0 * dist.sf(t.abs())).clamp(0.0, 1.0);
    Ok(Some(WelchResult { t, dof, p_value }))
}

/// Keeps features with `p < alpha`, ordered from smallest p-value.
pub fn rank_ttest(set: &LabeledFingerprintSet, alpha: f64) -> Result<FeatureRanking> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParams(format!("alpha must be in (0, 1), got {alpha}")));
    }
    let d = set.n_features();
    let mut scores = vec![f64::NAN; d];
    let mut flagged = Vec::new();
    for (r, score) in scores.iter_mut().enumerate() {
        let a = set.class_column(Class::Authorized, r);
        let b = set.class_column(Class::Other, r);
        match welch(&a, &b)? {
            Some(w) => *score = w.p_value,
            None => flagged.push(r),
        }
    }
    let kept = (0..d).filter(|&r| scores[r] < alpha).collect();
    Ok(FeatureRanking {
        method: SelectionMethod::TTest,
        order: sort_indices(&scores, kept, ScoreOrder::Ascending),
        scores,
        direction: ScoreOrder::Ascending,
        flagged,
    })
}
