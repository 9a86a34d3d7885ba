//! Numeric splitting `F(theta) = f(sin theta) + g(sin theta) cos theta`.
//!
//! The samples are interpolated trigonometrically. With `u = sin theta`,
//! `u = cos phi`, the even part of the interpolant is a Chebyshev series
//! of the first kind in `u` and the odd part divided by `cos theta` is a
//! series of the second kind, which is how `g` is evaluated near `|u| = 1`.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::DecomposeError;

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicFit {
    pub nodes: Vec<f64>,
    pub f_vals: Vec<f64>,
    pub g_vals: Vec<f64>,
    pub residual: f64,
}

/// Trigonometric interpolant `a0/2 + sum a_n cos(n t) + b_n sin(n t)`.
struct Trig {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl Trig {
    fn eval(&self, t: f64) -> f64 {
        let mut s = self.a[0] / 2.0;
        for n in 1..self.a.len() {
            let (sn, cn) = (n as f64 * t).sin_cos();
            s += self.a[n] * cn + self.b[n] * sn;
        }
        s
    }

    /// Even part in `u`: `sum c_n T_n(u)`.
    fn f_series(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.a.len()];
        c[0] = self.a[0] / 2.0;
        for n in 1..self.a.len() {
            c[n] = match n % 4 {
                0 => self.a[n],
                1 => self.b[n],
                2 => -self.a[n],
                _ => -self.b[n],
            };
        }
        c
    }

    /// Odd part over `cos theta`: `sum d_n U_{n-1}(u)`, indexed by `n-1`.
    fn g_series(&self) -> Vec<f64> {
        let len = self.a.len().saturating_sub(1);
        let mut d = vec![0.0; len.max(1)];
        for n in 1..self.a.len() {
            d[n - 1] = match n % 4 {
                0 => -self.b[n],
                1 => self.a[n],
                2 => self.b[n],
                _ => -self.a[n],
            };
        }
        d
    }
}

/// `sum c_k P_k(u)` for the three-term recurrence `P_{k+1} = 2u P_k - P_{k-1}`
/// with `P_0 = 1`, `P_1 = first * u` (`first` is 1 for `T`, 2 for `U`).
fn chebyshev_sum(c: &[f64], u: f64, first: f64) -> f64 {
    let mut prev = 1.0;
    let mut cur = first * u;
    let mut s = c[0];
    if c.len() > 1 {
        s += c[1] * cur;
    }
    for ck in c.iter().skip(2) {
        let next = 2.0 * u * cur - prev;
        prev = cur;
        cur = next;
        s += ck * cur;
    }
    s
}

fn interpolate(samples: &[(f64, f64)]) -> Trig {
    let m = samples.len();
    let mut buf: Vec<Complex<f64>> = samples.iter().map(|&(_, y)| Complex::new(y, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let half = m / 2;
    let scale = 2.0 / m as f64;
    let mut a: Vec<f64> = (0..=half).map(|n| buf[n].re * scale).collect();
    let mut b: Vec<f64> = (0..=half).map(|n| -buf[n].im * scale).collect();
    if m % 2 == 0 {
        // the Nyquist cosine appears once, not twice
        a[half] /= 2.0;
        b[half] = 0.0;
    }
    Trig { a, b }
}

/// Fits `f`, `g` at `n_nodes` points `u_k = cos(k pi / (n_nodes - 1))`.
///
/// `samples` must be `(theta_k, F(theta_k))` on the uniform grid
/// `theta_k = 2 pi k / M` with `M >= 2 n_nodes`.
pub fn periodic_fit(samples: &[(f64, f64)], n_nodes: usize) -> Result<PeriodicFit, DecomposeError> {
    let need = (2 * n_nodes).max(4);
    if n_nodes < 2 || samples.len() < need {
        return Err(DecomposeError::InsufficientSamples {
            need,
            got: samples.len(),
        });
    }
    let m = samples.len();
    let step = 2.0 * PI / m as f64;
    for (k, &(t, y)) in samples.iter().enumerate() {
        if (t - k as f64 * step).abs() > 1e-9 * (1.0 + t.abs()) || !y.is_finite() {
            return Err(DecomposeError::NonUniformGrid);
        }
    }
    let trig = interpolate(samples);
    let fs = trig.f_series();
    let gs = trig.g_series();

    let nodes: Vec<f64> = (0..n_nodes)
        .map(|k| (k as f64 * PI / (n_nodes - 1) as f64).cos())
        .collect();
    let mut f_vals = Vec::with_capacity(n_nodes);
    let mut g_vals = Vec::with_capacity(n_nodes);
    for &u in &nodes {
        let tp = u.clamp(-1.0, 1.0).asin();
        let fa = trig.eval(tp);
        let fb = trig.eval(PI - tp);
        f_vals.push((fa + fb) / 2.0);
        let c = tp.cos();
        if c.abs() >= 0.1 {
            g_vals.push((fa - fb) / (2.0 * c));
        } else {
            g_vals.push(chebyshev_sum(&gs, u, 2.0));
        }
    }

    let mut residual: f64 = 0.0;
    for &(t, y) in samples {
        let (s, c) = t.sin_cos();
        let rec = chebyshev_sum(&fs, s, 1.0) + chebyshev_sum(&gs, s, 2.0) * c;
        residual = residual.max((y - rec).abs());
    }
    Ok(PeriodicFit {
        nodes,
        f_vals,
        g_vals,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize, f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
        (0..n)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / n as f64;
                (t, f(t))
            })
            .collect()
    }

    #[test]
    fn cosine_is_pure_g() {
        let fit = periodic_fit(&sample(128, f64::cos), 16).unwrap();
        for (f, g) in fit.f_vals.iter().zip(&fit.g_vals) {
            assert!(f.abs() < 1e-13);
            assert!((g - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn sine_is_pure_f() {
        let fit = periodic_fit(&sample(128, f64::sin), 16).unwrap();
        for ((u, f), g) in fit.nodes.iter().zip(&fit.f_vals).zip(&fit.g_vals) {
            assert!((f - u).abs() < 1e-13);
            assert!(g.abs() < 1e-13);
        }
        assert!(fit.residual < 1e-13);
    }

    #[test]
    fn mixed_harmonics() {
        // sin(2t) = 2 u cos t, cos(2t) = 1 - 2u^2, cos(3t) = (1 - 4u^2) cos t
        let fit = periodic_fit(&sample(64, |t| (2.0 * t).sin() + (2.0 * t).cos() + (3.0 * t).cos()), 16)
            .unwrap();
        for ((u, f), g) in fit.nodes.iter().zip(&fit.f_vals).zip(&fit.g_vals) {
            assert!((f - (1.0 - 2.0 * u * u)).abs() < 1e-12);
            assert!((g - (2.0 * u + 1.0 - 4.0 * u * u)).abs() < 1e-12, "u={u} g={g}");
        }
    }

    #[test]
    fn too_few_samples() {
        assert_eq!(
            periodic_fit(&sample(10, f64::cos), 8),
            Err(DecomposeError::InsufficientSamples { need: 16, got: 10 })
        );
    }
}
