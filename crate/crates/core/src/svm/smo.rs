//! Pairwise dual ascent for the soft-margin SVM dual
//!
//! ```text
//! min  1/2 a'Qa - e'a   s.t.  y'a = 0,  0 <= a_i <= C,   Q_ij = y_i y_j K_ij
//! ```
//!
//! Working pairs use maximal violation for the first index and second-order
//! gain for the second. Kernel rows are produced on demand and cached.

use std::collections::VecDeque;

use crate::{Error, Result};

/// Source of kernel matrix rows.
pub(crate) trait KernelRows {
    fn len(&self) -> usize;
    fn fill_row(&self, i: usize, out: &mut [f64]);
    fn diag(&self, i: usize) -> f64;
}

/// Kernel rows with a bounded FIFO cache.
struct RowCache<'k, K: KernelRows + ?Sized> {
    kernel: &'k K,
    rows: Vec<Option<Box<[f64]>>>,
    queue: VecDeque<usize>,
    capacity: usize,
}

impl<'k, K: KernelRows + ?Sized> RowCache<'k, K> {
    fn new(kernel: &'k K, budget_entries: usize) -> Self {
        let n = kernel.len();
        Self {
            kernel,
            rows: vec![None; n],
            queue: VecDeque::new(),
            capacity: (budget_entries / n.max(1)).max(2),
        }
    }

    fn ensure(&mut self, i: usize) {
        if self.rows[i].is_some() {
            return;
        }
        if self.queue.len() >= self.capacity {
            if let Some(old) = self.queue.pop_front() {
                self.rows[old] = None;
            }
        }
        let mut row = vec![0.0; self.kernel.len()].into_boxed_slice();
        self.kernel.fill_row(i, &mut row);
        self.rows[i] = Some(row);
        self.queue.push_back(i);
    }

    /// Both rows, loaded so that neither evicts the other.
    fn pair(&mut self, i: usize, j: usize) -> (&[f64], &[f64]) {
        self.ensure(i);
        if self.rows[j].is_none() {
            if self.queue.len() >= self.capacity && self.queue.front() == Some(&i) {
                self.queue.rotate_left(1);
            }
            self.ensure(j);
        }
        (
            self.rows[i].as_deref().expect("row loaded"),
            self.rows[j].as_deref().expect("row loaded"),
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct SolverParams {
    pub cost: f64,
    pub tolerance: f64,
    pub max_updates: usize,
    pub cache_entries: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct Solution {
    pub alpha: Vec<f64>,
    /// Decision function offset, `f(x) = sum a_i y_i K(x_i, x) + bias`.
    pub bias: f64,
}

const TAU: f64 = 1e-12;

/// Solves the dual for labels `y` in {-1, +1}.
pub(crate) fn solve<K: KernelRows + ?Sized>(
    kernel: &K,
    y: &[f64],
    params: &SolverParams,
) -> Result<Solution> {
    let n = y.len();
    let c = params.cost;
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let diag: Vec<f64> = (0..n).map(|i| kernel.diag(i)).collect();
    let mut cache = RowCache::new(kernel, params.cache_entries);

    let upper = |a: f64| a >= c;
    let lower = |a: f64| a <= 0.0;
    let in_up = |t: usize, a: &[f64]| if y[t] > 0.0 { !upper(a[t]) } else { !lower(a[t]) };
    let in_low = |t: usize, a: &[f64]| if y[t] > 0.0 { !lower(a[t]) } else { !upper(a[t]) };

    let mut updates = 0;
    loop {
        let mut gmax = f64::NEG_INFINITY;
        let mut i = usize::MAX;
        for t in 0..n {
            if in_up(t, &alpha) {
                let v = -y[t] * grad[t];
                if v > gmax {
                    gmax = v;
                    i = t;
                }
            }
        }
        let mut gmax2 = f64::NEG_INFINITY;
        let mut j = usize::MAX;
        let mut best_gain = f64::INFINITY;
        if i != usize::MAX {
            cache.ensure(i);
            let ki = cache.rows[i].as_deref().expect("row loaded");
            for t in 0..n {
                if !in_low(t, &alpha) {
                    continue;
                }
                let yg = y[t] * grad[t];
                gmax2 = gmax2.max(yg);
                let diff = gmax + yg;
                if diff > 0.0 {
                    let mut quad = diag[i] + diag[t] - 2.0 * ki[t];
                    if quad <= 0.0 {
                        quad = TAU;
                    }
                    let gain = -(diff * diff) / quad;
                    if gain < best_gain {
                        best_gain = gain;
                        j = t;
                    }
                }
            }
        }
        let gap = gmax + gmax2;
        if j == usize::MAX || gap < params.tolerance {
            break;
        }
        if updates >= params.max_updates {
            return Err(Error::TrainingFailed {
                iterations: updates,
                gap,
            });
        }
        updates += 1;

        let (ki, kj) = cache.pair(i, j);
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let (mut ai, mut aj) = (old_i, old_j);
        if y[i] != y[j] {
            let mut quad = diag[i] + diag[j] + 2.0 * (y[i] * y[j] * ki[j]);
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = ai - aj;
            ai += delta;
            aj += delta;
            if diff > 0.0 {
                if aj < 0.0 {
                    aj = 0.0;
                    ai = diff;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = -diff;
            }
            if diff > 0.0 {
                if ai > c {
                    ai = c;
                    aj = c - diff;
                }
            } else if aj > c {
                aj = c;
                ai = c + diff;
            }
        } else {
            let mut quad = diag[i] + diag[j] - 2.0 * (y[i] * y[j] * ki[j]);
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = ai + aj;
            ai -= delta;
            aj += delta;
            if sum > c {
                if ai > c {
                    ai = c;
                    aj = sum - c;
                }
            } else if aj < 0.0 {
                aj = 0.0;
                ai = sum;
            }
            if sum > c {
                if aj > c {
                    aj = c;
                    ai = sum - c;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = sum;
            }
        }
        let (di, dj) = (ai - old_i, aj - old_j);
        let (yi, yj) = (y[i], y[j]);
        for t in 0..n {
            grad[t] += y[t] * (yi * ki[t] * di + yj * kj[t] * dj);
        }
        alpha[i] = ai;
        alpha[j] = aj;
    }

    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    let mut free_sum = 0.0;
    let mut free = 0usize;
    for t in 0..n {
        let yg = y[t] * grad[t];
        if upper(alpha[t]) {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if lower(alpha[t]) {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            free_sum += yg;
        }
    }
    let rho = if free > 0 {
        free_sum / free as f64
    } else {
        (ub + lb) / 2.0
    };
    Ok(Solution { alpha, bias: -rho })
}
