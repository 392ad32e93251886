//! Digital Butterworth low-pass as a cascade of second-order sections.
//!
//! Analog prototype poles sit at `exp(j*pi*(2k + N + 1) / (2N))`; the
//! cutoff is prewarped and each conjugate pair (plus the real pole for odd
//! orders) is mapped through the bilinear transform `s = 2(1 - z^-1)/(1 + z^-1)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{ComplexBurst, FilterSpec};
use crate::{Error, Result};

const MAX_ORDER: usize = 16;

/// One normalized section `b0 + b1 z^-1 + b2 z^-2 / 1 + a1 z^-1 + a2 z^-2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Butterworth {
    sections: Vec<Biquad>,
}

impl Butterworth {
    pub fn lowpass(order: usize, cutoff: f64) -> Result<Self> {
        if !(cutoff > 0.0 && cutoff < 1.0) {
            return Err(Error::InvalidCutoff(cutoff));
        }
        if order == 0 || order > MAX_ORDER {
            return Err(Error::InvalidParams(format!(
                "Butterworth order must be in 1..={MAX_ORDER}, got {order}"
            )));
        }
        let k = 2.0;
        let wc = k * (PI * cutoff / 2.0).tan();
        let n = order as f64;
        let mut sections = Vec::with_capacity(order.div_ceil(2));
        for i in 0..order / 2 {
            let theta = PI * (2.0 * i as f64 + n + 1.0) / (2.0 * n);
            let p = Complex64::from_polar(wc, theta);
            let re = p.re;
            let mag2 = p.norm_sqr();
            let a0 = k * k - 2.0 * re * k + mag2;
            let a1 = 2.0 * (mag2 - k * k);
            let a2 = k * k + 2.0 * re * k + mag2;
            let g = mag2 / a0;
            sections.push(Biquad {
                b: [g, 2.0 * g, g],
                a: [a1 / a0, a2 / a0],
            });
        }
        if order % 2 == 1 {
            let a0 = k + wc;
            let g = wc / a0;
            sections.push(Biquad {
                b: [g, g, 0.0],
                a: [(wc - k) / a0, 0.0],
            });
        }
        Ok(Self { sections })
    }

    pub fn from_spec(spec: FilterSpec) -> Result<Self> {
        Self::lowpass(spec.order, spec.cutoff)
    }

    pub fn sections(&self) -> &[Biquad] {
        &self.sections
    }

    /// Causal filtering from zero initial state, transposed direct form II.
    pub fn apply(&self, input: &[Complex64]) -> Vec<Complex64> {
        let mut data = input.to_vec();
        for s in &self.sections {
            let (mut z1, mut z2) = (Complex64::default(), Complex64::default());
            for x in data.iter_mut() {
                let y = *x * s.b[0] + z1;
                z1 = *x * s.b[1] - y * s.a[0] + z2;
                z2 = *x * s.b[2] - y * s.a[1];
                *x = y;
            }
        }
        data
    }

    /// Magnitude response at `freq` (fraction of Nyquist).
    pub fn magnitude(&self, freq: f64) -> f64 {
        let z1 = Complex64::from_polar(1.0, -PI * freq);
        let z2 = z1 * z1;
        self.sections
            .iter()
            .map(|s| {
                let num = s.b[0] + z1 * s.b[1] + z2 * s.b[2];
                let den = 1.0 + z1 * s.a[0] + z2 * s.a[1];
                (num / den).norm()
            })
            .product()
    }
}

/// Low-pass filters a burst once, forward in time. Output length equals input length.
pub fn butterworth_filter(burst: &ComplexBurst, order: usize, cutoff: f64) -> Result<ComplexBurst> {
    let filter = Butterworth::lowpass(order, cutoff)?;
    Ok(ComplexBurst {
        samples: filter.apply(&burst.samples),
        ..burst.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn burst(samples: Vec<Complex64>) -> ComplexBurst {
        ComplexBurst::new("t", 1.0, samples)
    }

    #[test]
    fn rejects_bad_cutoff() {
        let b = burst(vec![Complex64::new(1.0, 0.0); 8]);
        for c in [0.0, 1.0, -0.2, 1.5, f64::NAN] {
            assert!(matches!(
                butterworth_filter(&b, 6, c),
                Err(Error::InvalidCutoff(_))
            ));
        }
    }

    #[test]
    fn dc_passes_with_unit_gain() {
        let b = burst(vec![Complex64::new(0.7, -0.3); 2000]);
        let out = butterworth_filter(&b, 6, 0.25).unwrap();
        assert_eq!(out.len(), 2000);
        for s in &out.samples[1500..] {
            assert!((s - Complex64::new(0.7, -0.3)).norm() < 1e-6);
        }
    }

    #[test]
    fn stopband_tone_attenuated_60db() {
        let n = 4000;
        let w = PI * 0.9;
        let x: Vec<_> = (0..n).map(|i| Complex64::from_polar(1.0, w * i as f64)).collect();
        let out = butterworth_filter(&burst(x), 6, 0.25).unwrap();
        let p_out: f64 = out.samples[1000..].iter().map(|s| s.norm_sqr()).sum::<f64>() / 3000.0;
        let atten_db = -10.0 * p_out.log10();
        assert!(atten_db >= 60.0, "attenuation {atten_db} dB");
        // analytic response of the prewarped design at that frequency
        let ratio = (PI * 0.45).tan() / (PI * 0.125).tan();
        let analytic = 1.0 / (1.0 + ratio.powi(12)).sqrt();
        let f = Butterworth::lowpass(6, 0.25).unwrap();
        assert!((f.magnitude(0.9) - analytic).abs() < 1e-12 * analytic.max(1e-300) + 1e-15);
    }

    #[test]
    fn odd_orders_have_unit_dc_gain() {
        for order in 1..=9 {
            let f = Butterworth::lowpass(order, 0.3).unwrap();
            assert!((f.magnitude(0.0) - 1.0).abs() < 1e-12, "order {order}");
            // -3 dB at the cutoff
            assert!((f.magnitude(0.3) - 0.5f64.sqrt()).abs() < 1e-9, "order {order}");
        }
    }
}
