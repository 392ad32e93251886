//! Principal components of the mean-removed training set.

use nalgebra::DMatrix;

use super::{LabeledFingerprintSet, ProjectionBasis, SelectionMethod};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PcaFit {
    pub basis: ProjectionBasis,
    /// All eigenvalues of the covariance, largest first.
    pub eigenvalues: Vec<f64>,
}

/// Top `n_r` eigenvectors of `(1/N) Fbar^T Fbar`. Each vector's largest
/// entry by magnitude is made positive so the result is deterministic.
pub fn project_pca(set: &LabeledFingerprintSet, n_r: usize) -> Result<PcaFit> {
    let d = set.n_features();
    if n_r == 0 || n_r > d {
        return Err(Error::InvalidCount {
            requested: n_r,
            available: d,
        });
    }
    let x = set.features();
    let n = x.rows() as f64;
    let mut mean = vec![0.0; d];
    for r in x.iter_rows() {
        for (m, v) in mean.iter_mut().zip(r) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let centered = DMatrix::from_fn(x.rows(), d, |i, j| x.get(i, j) - mean[j]);
    let cov = (centered.transpose() * &centered) / n;
    let eig = cov.symmetric_eigen();
    if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalFailure("covariance eigendecomposition".into()));
    }
    let mut idx: Vec<usize> = (0..d).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let basis = idx[..n_r]
        .iter()
        .map(|&k| {
            let mut v: Vec<f64> = eig.eigenvectors.column(k).iter().cloned().collect();
            let lead = v.iter().cloned().fold(0.0f64, |acc, e| if e.abs() > acc.abs() { e } else { acc });
            if lead < 0.0 {
                v.iter_mut().for_each(|e| *e = -*e);
            }
            v
        })
        .collect();
    Ok(PcaFit {
        basis: ProjectionBasis {
            method: SelectionMethod::Pca,
            basis,
            mean,
        },
        eigenvalues: idx.iter().map(|&k| eig.eigenvalues[k]).collect(),
    })
}
