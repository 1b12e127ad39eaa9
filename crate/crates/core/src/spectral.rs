//! Trigonometric (Fourier) tools for uniformly sampled periodic data on `[0, 2π)`.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Unnormalized forward DFT, `X_k = Σ x_j e^{-ikθ_j}`.
pub fn fft(data: &[Complex64]) -> Vec<Complex64> {
    let mut buf = data.to_vec();
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()).process(&mut buf));
    buf
}

/// Inverse DFT including the `1/M` factor.
pub fn ifft(spectrum: &[Complex64]) -> Vec<Complex64> {
    let mut buf = spectrum.to_vec();
    let n = buf.len() as f64;
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()).process(&mut buf));
    for z in &mut buf {
        *z /= n;
    }
    buf
}

/// Signed wavenumber of FFT bin `j` for length `m`; the Nyquist bin maps to `m/2`.
#[inline]
pub fn wavenumber(j: usize, m: usize) -> i64 {
    if j <= m / 2 {
        j as i64
    } else {
        j as i64 - m as i64
    }
}

fn to_complex(x: &[f64]) -> Vec<Complex64> {
    x.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}

/// `order`-th derivative in θ of complex periodic samples.
///
/// The Nyquist coefficient is dropped for odd orders so that real data stays real.
pub fn derivative_complex(samples: &[Complex64], order: u32) -> Vec<Complex64> {
    let m = samples.len();
    let mut spec = fft(samples);
    for (j, c) in spec.iter_mut().enumerate() {
        let k = wavenumber(j, m);
        if m % 2 == 0 && j == m / 2 && order % 2 == 1 {
            *c = Complex64::new(0.0, 0.0);
            continue;
        }
        let ik = Complex64::new(0.0, k as f64);
        *c *= ik.powu(order);
    }
    ifft(&spec)
}

pub fn derivative(samples: &[f64], order: u32) -> Vec<f64> {
    derivative_complex(&to_complex(samples), order)
        .into_iter()
        .map(|z| z.re)
        .collect()
}

/// Band-limited interpolation of complex samples onto `m * factor` uniform nodes.
pub fn upsample_complex(samples: &[Complex64], factor: usize) -> Vec<Complex64> {
    let m = samples.len();
    if factor <= 1 {
        return samples.to_vec();
    }
    let big = m * factor;
    let spec = fft(samples);
    let mut out = vec![Complex64::new(0.0, 0.0); big];
    for (j, &c) in spec.iter().enumerate() {
        let k = wavenumber(j, m);
        if m % 2 == 0 && j == m / 2 {
            // split the Nyquist bin symmetrically
            out[m / 2] += c * 0.5;
            out[big - m / 2] += c * 0.5;
        } else {
            let idx = if k >= 0 { k as usize } else { (big as i64 + k) as usize };
            out[idx] += c;
        }
    }
    let scale = factor as f64;
    ifft(&out).into_iter().map(|z| z * scale).collect()
}

pub fn upsample(samples: &[f64], factor: usize) -> Vec<f64> {
    upsample_complex(&to_complex(samples), factor)
        .into_iter()
        .map(|z| z.re)
        .collect()
}

/// Multiplies Fourier mode `k` by `exp(-strength (|k|/K)^order)`, `K = M/2`.
pub fn exponential_filter(samples: &[f64], strength: f64, order: i32) -> Vec<f64> {
    let m = samples.len();
    let kmax = (m / 2) as f64;
    let mut spec = fft(&to_complex(samples));
    for (j, c) in spec.iter_mut().enumerate() {
        let eta = wavenumber(j, m).unsigned_abs() as f64 / kmax;
        *c *= (-strength * eta.powi(order)).exp();
    }
    ifft(&spec).into_iter().map(|z| z.re).collect()
}

/// Fraction of spectral energy (excluding the mean) carried by the top third of modes.
pub fn spectral_tail(samples: &[f64]) -> f64 {
    let m = samples.len();
    let spec = fft(&to_complex(samples));
    let cutoff = (m / 2) as f64 * 2.0 / 3.0;
    let mut total = 0.0;
    let mut tail = 0.0;
    for (j, c) in spec.iter().enumerate() {
        let k = wavenumber(j, m).unsigned_abs() as f64;
        if k == 0.0 {
            continue;
        }
        let e = c.norm_sqr();
        total += e;
        if k > cutoff {
            tail += e;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        (tail / total).sqrt()
    }
}

/// Amplitude `a` of the mode-`k` component `a cos(kθ + phase)` of real samples.
pub fn mode_amplitude(samples: &[f64], k: usize) -> f64 {
    let m = samples.len();
    let spec = fft(&to_complex(samples));
    let scale = if k == 0 || 2 * k == m { 1.0 } else { 2.0 };
    scale * spec[k].norm() / m as f64
}

/// Real trigonometric interpolant
/// `f(θ) = a_0 + Σ_{k=1}^{K} (a_k cos kθ + b_k sin kθ)` through uniform samples.
#[derive(Debug, Clone)]
pub struct TrigSeries {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl TrigSeries {
    pub fn from_samples(samples: &[f64]) -> Self {
        let m = samples.len();
        let spec = fft(&to_complex(samples));
        let half = m / 2;
        let mut cos = vec![0.0; half + 1];
        let mut sin = vec![0.0; half + 1];
        let mf = m as f64;
        cos[0] = spec[0].re / mf;
        for k in 1..=half {
            let w = if 2 * k == m { 1.0 } else { 2.0 };
            cos[k] = w * spec[k].re / mf;
            sin[k] = if 2 * k == m { 0.0 } else { -w * spec[k].im / mf };
        }
        Self { cos, sin }
    }

    pub fn degree(&self) -> usize {
        self.cos.len() - 1
    }

    /// Value, first and second derivative at `theta`.
    pub fn eval3(&self, theta: f64) -> (f64, f64, f64) {
        let (s1, c1) = theta.sin_cos();
        let (mut ck, mut sk) = (1.0_f64, 0.0_f64);
        let mut f = self.cos[0];
        let mut d1 = 0.0;
        let mut d2 = 0.0;
        for k in 1..self.cos.len() {
            let c_next = ck * c1 - sk * s1;
            let s_next = sk * c1 + ck * s1;
            ck = c_next;
            sk = s_next;
            let kf = k as f64;
            let (a, b) = (self.cos[k], self.sin[k]);
            f += a * ck + b * sk;
            d1 += kf * (b * ck - a * sk);
            d2 -= kf * kf * (a * ck + b * sk);
        }
        (f, d1, d2)
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let (s1, c1) = theta.sin_cos();
        let (mut ck, mut sk) = (1.0_f64, 0.0_f64);
        let mut f = self.cos[0];
        for k in 1..self.cos.len() {
            let c_next = ck * c1 - sk * s1;
            sk = sk * c1 + ck * s1;
            ck = c_next;
            f += self.cos[k] * ck + self.sin[k] * sk;
        }
        f
    }

    pub fn eval2(&self, theta: f64) -> (f64, f64) {
        let (f, d1, _) = self.eval3(theta);
        (f, d1)
    }
}

/// Uniform angles `θ_j = 2πj/m`.
pub fn uniform_angles(m: usize) -> Vec<f64> {
    (0..m).map(|j| 2.0 * PI * j as f64 / m as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples(m: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
        uniform_angles(m).into_iter().map(f).collect()
    }

    #[test]
    fn derivative_of_trig_polynomial_is_exact() {
        let f = samples(32, |t| 1.0 + 0.3 * (3.0 * t).cos() - 0.2 * (5.0 * t).sin());
        let d = derivative(&f, 1);
        let dd = derivative(&f, 2);
        for (j, t) in uniform_angles(32).into_iter().enumerate() {
            let e1 = -0.9 * (3.0 * t).sin() - 1.0 * (5.0 * t).cos();
            let e2 = -2.7 * (3.0 * t).cos() + 5.0 * (5.0 * t).sin();
            assert!((d[j] - e1).abs() < 1e-12);
            assert!((dd[j] - e2).abs() < 1e-11);
        }
    }

    #[test]
    fn series_interpolates_and_upsamples() {
        let f = samples(16, |t| (t.cos() * 0.5).exp());
        let s = TrigSeries::from_samples(&f);
        for (j, t) in uniform_angles(16).into_iter().enumerate() {
            assert!((s.eval(t) - f[j]).abs() < 1e-13);
        }
        let up = upsample(&f, 4);
        for (j, t) in uniform_angles(64).into_iter().enumerate() {
            assert!((up[j] - s.eval(t)).abs() < 1e-13);
        }
        // Nyquist-bearing data still interpolates
        let g: Vec<f64> = (0..16).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let sg = TrigSeries::from_samples(&g);
        assert!((sg.eval(2.0 * PI / 16.0) + 1.0).abs() < 1e-13);
    }

    #[test]
    fn series_derivatives_match_spectral_derivatives() {
        let f = samples(64, |t| 1.0 / (1.2 + (2.0 * t).cos() * 0.4));
        let s = TrigSeries::from_samples(&f);
        let d = derivative(&f, 1);
        for (j, t) in uniform_angles(64).into_iter().enumerate() {
            assert!((s.eval3(t).1 - d[j]).abs() < 1e-10);
        }
    }

    #[test]
    fn filter_leaves_low_modes_and_kills_nyquist() {
        let f = samples(64, |t| (2.0 * t).cos());
        let g = exponential_filter(&f, 36.0, 36);
        for (a, b) in f.iter().zip(&g) {
            assert!((a - b).abs() < 1e-14);
        }
        let nyq: Vec<f64> = (0..64).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let h = exponential_filter(&nyq, 36.0, 36);
        assert!(h.iter().all(|v| v.abs() < 1e-14));
        assert!((mode_amplitude(&f, 2) - 1.0).abs() < 1e-14);
        assert!(spectral_tail(&f) < 1e-14);
    }
}
