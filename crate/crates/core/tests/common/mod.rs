//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rfdna_core::featsel::{Class, LabeledFingerprintSet};

/// Triple loop over (m, k, n) with its own circular Gaussian and twiddles.
pub fn dgt_oracle(s: &[Complex64], m_count: usize, k_g: usize, n_delta: usize, sigma: f64) -> Vec<Complex64> {
    let len = (m_count * n_delta) as i64;
    let window = |d: i64| {
        let mut c = d % len;
        if c < 0 {
            c += len;
        }
        if 2 * c >= len {
            c -= len;
        }
        (-((c * c) as f64) / (2.0 * sigma * sigma)).exp()
    };
    let twiddle: Vec<Complex64> = (0..k_g)
        .map(|q| Complex64::from_polar(1.0, -2.0 * PI * q as f64 / k_g as f64))
        .collect();
    let mut out = Vec::with_capacity(m_count * k_g);
    for m in 1..=m_count {
        for k in 0..k_g {
            let mut acc = Complex64::default();
            for n in 1..=len as usize {
                let w = window(n as i64 - (m * n_delta) as i64);
                acc += s[n - 1] * w * twiddle[(k * n) % k_g];
            }
            out.push(acc);
        }
    }
    out
}

/// Double-double accumulator, enough to make the moment oracle exact to
/// well below f64 rounding.
#[derive(Clone, Copy)]
struct Dd(f64, f64);

impl Dd {
    fn from(x: f64) -> Self {
        Dd(x, 0.0)
    }

    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    fn add(self, o: Dd) -> Dd {
        let (s, e) = Self::two_sum(self.0, o.0);
        let e = e + self.1 + o.1;
        let (hi, lo) = Self::two_sum(s, e);
        Dd(hi, lo)
    }

    fn neg(self) -> Dd {
        Dd(-self.0, -self.1)
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.0 * o.0;
        let e = self.0.mul_add(o.0, -p) + self.0 * o.1 + self.1 * o.0;
        let (hi, lo) = Self::two_sum(p, e);
        Dd(hi, lo)
    }

    fn div_f(self, d: f64) -> Dd {
        let q = self.0 / d;
        let r = self.add(Dd::from(q).mul(Dd::from(d)).neg());
        let (hi, lo) = Self::two_sum(q, r.0 / d);
        Dd(hi, lo)
    }

    fn value(self) -> f64 {
        self.0 + self.1
    }
}

pub fn moments_oracle(x: &[f64]) -> [f64; 4] {
    let n = x.len() as f64;
    let mean = x.iter().fold(Dd::from(0.0), |a, &v| a.add(Dd::from(v))).div_f(n);
    let (mut m2, mut m3, mut m4) = (Dd::from(0.0), Dd::from(0.0), Dd::from(0.0));
    for &v in x {
        let d = Dd::from(v).add(mean.neg());
        let d2 = d.mul(d);
        m2 = m2.add(d2);
        m3 = m3.add(d2.mul(d));
        m4 = m4.add(d2.mul(d2));
    }
    let var = m2.div_f(n).value();
    let sd = var.sqrt();
    [sd, var, m3.div_f(n).value() / (var * sd), m4.div_f(n).value() / (var * var)]
}

pub fn relieff_oracle(rows: &[Vec<f64>], labels: &[Class], k: usize) -> Vec<f64> {
    let n = rows.len();
    let d = rows[0].len();
    let mut z = rows.to_vec();
    for r in 0..d {
        let lo = rows.iter().map(|x| x[r]).fold(f64::INFINITY, f64::min);
        let hi = rows.iter().map(|x| x[r]).fold(f64::NEG_INFINITY, f64::max);
        for x in z.iter_mut() {
            x[r] = if hi > lo { (x[r] - lo) / (hi - lo) } else { 0.0 };
        }
    }
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let n_auth = labels.iter().filter(|&&c| c == Class::Authorized).count() as f64;
    let mut w = vec![0.0; d];
    for i in 0..n {
        let mut hits: Vec<(f64, usize)> = Vec::new();
        let mut misses: Vec<(f64, usize)> = Vec::new();
        for j in 0..n {
            if j == i {
                continue;
            }
            let e = (dist(&z[i], &z[j]), j);
            if labels[j] == labels[i] { hits.push(e) } else { misses.push(e) }
        }
        hits.sort_by(|a, b| a.partial_cmp(b).unwrap());
        misses.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let p_own = if labels[i] == Class::Authorized { n_auth } else { n as f64 - n_auth } / n as f64;
        let p_other = 1.0 - p_own;
        for r in 0..d {
            for &(_, h) in &hits[..k] {
                w[r] -= (z[i][r] - z[h][r]).abs() / (n * k) as f64;
            }
            for &(_, m) in &misses[..k] {
                w[r] += p_other / (1.0 - p_own) * (z[i][r] - z[m][r]).abs() / (n * k) as f64;
            }
        }
    }
    w
}

/// Partial-pivot elimination on the ridged scatter matrix.
pub fn lda_oracle(set: &LabeledFingerprintSet) -> Vec<f64> {
    let d = set.n_features();
    let mean = |c: Class| {
        let rows = set.class_rows(c);
        (0..d)
            .map(|r| rows.iter().map(|&i| set.features().get(i, r)).sum::<f64>() / rows.len() as f64)
            .collect::<Vec<f64>>()
    };
    let (m1, m2) = (mean(Class::Authorized), mean(Class::Other));
    let mut a = vec![vec![0.0; d + 1]; d];
    for (i, row) in set.features().iter_rows().enumerate() {
        let mu = if set.labels()[i] == Class::Authorized { &m1 } else { &m2 };
        for p in 0..d {
            for q in 0..d {
                a[p][q] += (row[p] - mu[p]) * (row[q] - mu[q]);
            }
        }
    }
    let ridge = 1e-6 * (0..d).map(|p| a[p][p]).sum::<f64>() / d as f64;
    for p in 0..d {
        a[p][p] += ridge;
        a[p][d] = m1[p] - m2[p];
    }
    for col in 0..d {
        let piv = (col..d).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap();
        a.swap(col, piv);
        for r in col + 1..d {
            let f = a[r][col] / a[col][col];
            for c in col..=d {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    let mut w = vec![0.0; d];
    for r in (0..d).rev() {
        let s: f64 = (r + 1..d).map(|c| a[r][c] * w[c]).sum();
        w[r] = (a[r][d] - s) / a[r][r];
    }
    w
}


pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1e-300) || (a - b).abs() <= tol
}

pub fn kernel(zeta: f64, a: &[f64], b: &[f64]) -> f64 {
    (-zeta * a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>()).exp()
}

pub fn dual_objective(alpha: &[f64], y: &[f64], k: &[Vec<f64>]) -> f64 {
    let mut quad = 0.0;
    for i in 0..alpha.len() {
        for j in 0..alpha.len() {
            quad += alpha[i] * alpha[j] * y[i] * y[j] * k[i][j];
        }
    }
    alpha.iter().sum::<f64>() - 0.5 * quad
}

/// Best dual objective over a grid for labels (+1, +1, -1, -1) and C = 1:
/// a1, a2 free, a3 searched, a4 = a1 + a2 - a3. A coarse pass is refined
/// around its maximizer.
pub fn grid_dual_max(k: &[Vec<f64>]) -> f64 {
    let y = [1.0, 1.0, -1.0, -1.0];
    let search = |c: [f64; 3], half: f64, h: f64| {
        let steps = (2.0 * half / h).round() as i64;
        let mut best = (f64::NEG_INFINITY, [0.0; 3]);
        for i in 0..=steps {
            let a1 = c[0] - half + i as f64 * h;
            if !(0.0..=1.0).contains(&a1) {
                continue;
            }
            for j in 0..=steps {
                let a2 = c[1] - half + j as f64 * h;
                if !(0.0..=1.0).contains(&a2) {
                    continue;
                }
                for l in 0..=steps {
                    let a3 = c[2] - half + l as f64 * h;
                    let a4 = a1 + a2 - a3;
                    if !(0.0..=1.0).contains(&a3) || !(0.0..=1.0).contains(&a4) {
                        continue;
                    }
                    let w = dual_objective(&[a1, a2, a3, a4], &y, k);
                    if w > best.0 {
                        best = (w, [a1, a2, a3]);
                    }
                }
            }
        }
        best
    };
    let coarse = search([0.5, 0.5, 0.5], 0.5, 0.01);
    search(coarse.1, 0.02, 0.0005).0
}
