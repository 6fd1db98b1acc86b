//! Periodic spectral calculus on an N×N grid over a flat torus.
//!
//! Grid point (a, b) sits at lattice coordinates (s, t) = (a/N, b/N), i.e. at
//! z = ω₁(s + τ t). Arrays are row-major with the row index b (the t
//! direction). Coefficients are normalized so that u = Σ û_{mn} e^{2πi(ms+nt)}.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::TorusGeometry;

pub(crate) struct Spectral {
    pub n: usize,
    pub area: f64,
    omega1: f64,
    tau: Complex64,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// Laplacian symbol (≤ 0) per mode, Nyquist entries symmetrized.
    pub lap: Vec<f64>,
}

/// Signed frequency of FFT index i.
pub(crate) fn freq(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

impl Spectral {
    pub fn new(geom: &TorusGeometry) -> Self {
        let n = geom.grid;
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let mut s = Spectral {
            n,
            area: geom.area,
            omega1: geom.omega1(),
            tau: geom.modulus,
            fwd,
            inv,
            lap: vec![0.0; n * n],
        };
        let half = (n / 2) as i64;
        for b in 0..n {
            for a in 0..n {
                let (m, k) = (freq(a, n), freq(b, n));
                // Average |k|² over the aliases of Nyquist components so the
                // symbol stays even under (m, n) → (−m, −n).
                let ms: &[i64] = if m == -half { &[-half, half] } else { &[m] };
                let ks: &[i64] = if k == -half { &[-half, half] } else { &[k] };
                let mut acc = 0.0;
                for &mm in ms {
                    for &kk in ks {
                        acc += s.k_squared(mm, kk);
                    }
                }
                s.lap[b * n + a] = -acc / (ms.len() * ks.len()) as f64;
            }
        }
        s
    }

    /// Physical wavevector of mode (m, n).
    pub fn wavevector(&self, m: i64, n: i64) -> (f64, f64) {
        let two_pi = 2.0 * std::f64::consts::PI;
        let kx = two_pi * m as f64 / self.omega1;
        let ky = two_pi * (n as f64 - m as f64 * self.tau.re) / (self.omega1 * self.tau.im);
        (kx, ky)
    }

    fn k_squared(&self, m: i64, n: i64) -> f64 {
        let (kx, ky) = self.wavevector(m, n);
        kx * kx + ky * ky
    }

    pub fn is_nyquist(&self, a: usize, b: usize) -> bool {
        a == self.n / 2 || b == self.n / 2
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.n;
        let plan = if inverse { &self.inv } else { &self.fwd };
        for row in data.chunks_mut(n) {
            plan.process(row);
        }
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        for a in 0..n {
            for b in 0..n {
                col[b] = data[b * n + a];
            }
            plan.process(&mut col);
            for b in 0..n {
                data[b * n + a] = col[b];
            }
        }
    }

    /// Normalized coefficients of a real grid function.
    pub fn forward(&self, u: &[f64]) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = u.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.transform(&mut data, false);
        let scale = 1.0 / (self.n * self.n) as f64;
        data.iter_mut().for_each(|c| *c *= scale);
        data
    }

    /// Grid values Σ û e^{2πi(ms+nt)} (complex).
    pub fn inverse_complex(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut data = coeffs.to_vec();
        self.transform(&mut data, true);
        data
    }

    /// Real part of the inverse transform.
    pub fn inverse(&self, coeffs: &[Complex64]) -> Vec<f64> {
        self.inverse_complex(coeffs).into_iter().map(|c| c.re).collect()
    }

    pub fn apply_symbol(&self, u: &[f64], symbol: impl Fn(usize, f64) -> f64) -> Vec<f64> {
        let mut c = self.forward(u);
        for (i, ci) in c.iter_mut().enumerate() {
            *ci *= symbol(i, self.lap[i]);
        }
        self.inverse(&c)
    }

    pub fn laplacian(&self, u: &[f64]) -> Vec<f64> {
        self.apply_symbol(u, |_, l| l)
    }

    /// Mean-zero solution of Δψ = f − mean(f).
    pub fn inverse_laplacian(&self, f: &[f64]) -> Vec<f64> {
        self.apply_symbol(f, |i, l| if i == 0 { 0.0 } else { 1.0 / l })
    }

    /// (−Δ + μ)⁻¹ f for μ > 0.
    pub fn shifted_helmholtz_solve(&self, f: &[f64], mu: f64) -> Vec<f64> {
        self.apply_symbol(f, |_, l| 1.0 / (mu - l))
    }

    /// ∂̄ = ½(∂x + i∂y) of a real grid function, Nyquist modes dropped.
    pub fn dbar(&self, u: &[f64]) -> Vec<Complex64> {
        let n = self.n;
        let mut c = self.forward(u);
        for b in 0..n {
            for a in 0..n {
                let idx = b * n + a;
                if self.is_nyquist(a, b) {
                    c[idx] = Complex64::new(0.0, 0.0);
                    continue;
                }
                let (kx, ky) = self.wavevector(freq(a, n), freq(b, n));
                c[idx] *= Complex64::new(0.0, 0.5) * Complex64::new(kx, ky);
            }
        }
        self.inverse_complex(&c)
    }

    /// Band-limited Green's potential Σᵢ 4πG_N(z − pᵢ) at grid points, with
    /// ΔG = δ − 1/A and zero mean; Nyquist modes are dropped.
    pub fn green_potential(&self, points: &[(f64, f64)]) -> Vec<f64> {
        let n = self.n;
        let two_pi = 2.0 * std::f64::consts::PI;
        let mut c = vec![Complex64::new(0.0, 0.0); n * n];
        for b in 0..n {
            for a in 0..n {
                if (a == 0 && b == 0) || self.is_nyquist(a, b) {
                    continue;
                }
                let (m, k) = (freq(a, n) as f64, freq(b, n) as f64);
                let weight = -4.0 * std::f64::consts::PI / (self.area * -self.lap[b * n + a]);
                let mut acc = Complex64::new(0.0, 0.0);
                for &(ps, pt) in points {
                    acc += Complex64::from_polar(1.0, -two_pi * (m * ps + k * pt));
                }
                c[b * n + a] = acc * weight;
            }
        }
        self.inverse(&c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom(n: usize) -> TorusGeometry {
        TorusGeometry::new(Complex64::new(0.3, 1.2), n, 2.0).unwrap()
    }

    #[test]
    fn laplacian_of_plane_wave() {
        let g = geom(16);
        let sp = Spectral::new(&g);
        let n = 16;
        let (m, k) = (2i64, -3i64);
        let u: Vec<f64> = (0..n * n)
            .map(|i| {
                let (a, b) = ((i % n) as f64, (i / n) as f64);
                (2.0 * std::f64::consts::PI * (m as f64 * a + k as f64 * b) / n as f64).cos()
            })
            .collect();
        let (kx, ky) = sp.wavevector(m, k);
        let lap = sp.laplacian(&u);
        for (l, v) in lap.iter().zip(&u) {
            assert!((l + (kx * kx + ky * ky) * v).abs() < 1e-8);
        }
    }

    #[test]
    fn forward_inverse_round_trip() {
        let sp = Spectral::new(&geom(8));
        let u: Vec<f64> = (0..64).map(|i| ((i * 37) % 11) as f64 - 5.0).collect();
        let back = sp.inverse(&sp.forward(&u));
        for (a, b) in u.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn green_potential_has_zero_mean() {
        let sp = Spectral::new(&geom(32));
        let v = sp.green_potential(&[(0.1, 0.7), (0.5, 0.5)]);
        let mean: f64 = v.iter().sum::<f64>() / v.len() as f64;
        assert!(mean.abs() < 1e-12);
    }
}
