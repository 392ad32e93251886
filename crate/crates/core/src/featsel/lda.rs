//! Fisher discriminant direction `w = S_w^-1 (mu1 - mu2)`.

use nalgebra::{DMatrix, DVector};

use super::{Class, LabeledFingerprintSet, ProjectionBasis, SelectionMethod};
use crate::{Error, Result};

fn class_mean(set: &LabeledFingerprintSet, class: Class) -> Vec<f64> {
    let d = set.n_features();
    let rows = set.class_rows(class);
    let mut mu = vec![0.0; d];
    for &i in &rows {
        for (m, v) in mu.iter_mut().zip(set.features().row(i)) {
            *m += v;
        }
    }
    mu.iter_mut().for_each(|m| *m /= rows.len() as f64);
    mu
}

/// Within-class scatter plus `1e-6 * trace / d` on the diagonal, then solved
/// by Cholesky. Returns `(w, mu1, mu2)`.
pub fn lda_direction(set: &LabeledFingerprintSet) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let d = set.n_features();
    let mu1 = class_mean(set, Class::Authorized);
    let mu2 = class_mean(set, Class::Other);
    let mut sw = DMatrix::<f64>::zeros(d, d);
    let mut dev = DVector::<f64>::zeros(d);
    for (i, row) in set.features().iter_rows().enumerate() {
        let mu = match set.labels()[i] {
            Class::Authorized => &mu1,
            Class::Other => &mu2,
        };
        for r in 0..d {
            dev[r] = row[r] - mu[r];
        }
        sw.syger(1.0, &dev, &dev, 1.0);
    }
    // syger fills the lower triangle only
    sw.fill_upper_triangle_with_lower_triangle();
    let ridge = 1e-6 * sw.trace() / d as f64;
    if !(ridge > 0.0) || !ridge.is_finite() {
        return Err(Error::SingularScatter);
    }
    for r in 0..d {
        sw[(r, r)] += ridge;
    }
    let diff = DVector::from_iterator(d, mu1.iter().zip(&mu2).map(|(a, b)| a - b));
    let chol = sw.cholesky().ok_or(Error::SingularScatter)?;
    let w = chol.solve(&diff);
    if w.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularScatter);
    }
    Ok((w.iter().cloned().collect(), mu1, mu2))
}

/// One-dimensional projection `F_w = w^T f` (no centering).
pub fn project_lda(set: &LabeledFingerprintSet) -> Result<ProjectionBasis> {
    let (w, _, _) = lda_direction(set)?;
    Ok(ProjectionBasis {
        method: SelectionMethod::Lda,
        mean: vec![0.0; w.len()],
        basis: vec![w],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_means_project_together() {
        let c1 = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]];
        let c2 = vec![vec![2.0, 0.0], vec![-2.0, 0.0], vec![0.0, 2.0], vec![0.0, -2.0]];
        let set = LabeledFingerprintSet::from_classes(&c1, &c2).unwrap();
        let b = project_lda(&set).unwrap();
        let m1: f64 = c1.iter().map(|x| b.project(x, 1)[0]).sum::<f64>() / 4.0;
        let m2: f64 = c2.iter().map(|x| b.project(x, 1)[0]).sum::<f64>() / 4.0;
        assert!((m1 - m2).abs() < 1e-12);
    }

    #[test]
    fn constant_data_is_singular() {
        let c = vec![vec![1.0, 1.0]; 3];
        let set = LabeledFingerprintSet::from_classes(&c, &c).unwrap();
        assert!(matches!(project_lda(&set), Err(Error::SingularScatter)));
    }
}
