//! Lattice-gauge diagnostics of a solved vortex.
//!
//! In unitary gauge Φ = |Φ| = e^{(u+v)/2}, and holomorphicity forces the
//! connection form a = −½ ∗d(u + v). Link angles are exact integrals of a
//! along the edges of a diagnostic lattice (the sample grid shifted off the
//! divisor): the u part through an exact Fourier segment integral, the v part
//! through ∗d log|θ₁|² = 2 d arg θ₁ plus the (4π/A) y dx term of the quadratic
//! correction. Each edge is split into short sub-links on which arg θ₁ varies
//! by less than π, so the sum of principal increments is the true integral.
//!
//! The plaquette flux is the principal value of the link sum; the integer
//! part removed by the principal value counts the zeros of Φ inside.

use num_complex::Complex64;

use super::spectral::{freq, Spectral};
use super::theta::{centered, theta1};
use super::TorusGeometry;

pub(crate) struct GaugeDiagnostics {
    pub plaquette_flux: Vec<f64>,
    pub windings: Vec<i64>,
    pub zero_locations: Vec<(f64, f64)>,
}

fn principal(x: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    x - two_pi * (x / two_pi).round()
}

/// Offset (multiples of h/16 in each lattice direction) keeping every
/// divisor point at least h/8 from the diagnostic lattice lines.
pub(crate) fn choose_offset(points: &[(f64, f64)], n: usize) -> Option<(f64, f64)> {
    let nf = n as f64;
    let pick = |coord: &dyn Fn(&(f64, f64)) -> f64| {
        (0..16).map(|j| j as f64 / (16.0 * nf)).find(|&o| {
            points.iter().all(|p| {
                let x = (coord(p) - o) * nf;
                (x - x.round()).abs() >= 0.125 - 1e-12
            })
        })
    };
    Some((pick(&|p| p.0)?, pick(&|p| p.1)?))
}

/// Sub-links per edge so that each sub-link subtends at most a right angle
/// from any divisor point.
pub(crate) fn refinement(tau: Complex64) -> usize {
    let r = 8.0 * tau.norm_sqr().max(1.0) / tau.im;
    (r.ceil() as usize).max(4)
}

pub(crate) fn diagnose(
    geom: &TorusGeometry,
    sp: &Spectral,
    u_coeffs: &[Complex64],
    points: &[(f64, f64)],
    offset: (f64, f64),
) -> GaugeDiagnostics {
    let n = geom.grid;
    let nf = n as f64;
    let tau = geom.modulus;
    let omega1 = geom.omega1();
    let area = geom.area;
    let r = refinement(tau);
    let two_pi = 2.0 * std::f64::consts::PI;
    let dirs = [Complex64::new(1.0, 0.0), tau];

    // links[dir][b*n + a]: integral of a from node (a, b) one step along dir.
    let mut links = [vec![0.0; n * n], vec![0.0; n * n]];
    for (di, dir) in dirs.iter().enumerate() {
        let step = 1.0 / (r as f64 * nf);
        // Physical sub-link vector and its rotation by +90°.
        let e = (omega1 * step * dir.re, omega1 * step * dir.im);
        let je = (-e.1, e.0);
        let (ds, dt) = if di == 0 { (step, 0.0) } else { (0.0, step) };
        for j in 0..r {
            let (ss, st) = (offset.0 + j as f64 * ds, offset.1 + j as f64 * dt);
            let mut c = vec![Complex64::new(0.0, 0.0); n * n];
            for b in 0..n {
                for a in 0..n {
                    if sp.is_nyquist(a, b) || (a == 0 && b == 0) {
                        continue;
                    }
                    let (m, k) = (freq(a, n), freq(b, n));
                    let (kx, ky) = sp.wavevector(m, k);
                    let theta = kx * e.0 + ky * e.1;
                    let phi = if theta.abs() < 1e-12 {
                        Complex64::new(1.0, 0.0)
                    } else {
                        (Complex64::new(0.0, theta).exp() - 1.0) / Complex64::new(0.0, theta)
                    };
                    let star = Complex64::new(0.0, -(kx * je.0 + ky * je.1));
                    let shift = Complex64::from_polar(1.0, two_pi * (m as f64 * ss + k as f64 * st));
                    c[b * n + a] = u_coeffs[b * n + a] * star * phi * shift;
                }
            }
            let vals = sp.inverse(&c);
            for (l, v) in links[di].iter_mut().zip(vals) {
                *l += -0.5 * v;
            }
        }
        // v part, point by point.
        for b in 0..n {
            for a in 0..n {
                let qs = offset.0 + a as f64 / nf;
                let qt = offset.1 + b as f64 / nf;
                let mut total = 0.0;
                for &(ps, pt) in points {
                    let (rs, rt) = centered(qs - ps, qt - pt);
                    let z0 = Complex64::new(rs + tau.re * rt, tau.im * rt);
                    let mut prev_z = z0;
                    let mut prev = theta1(std::f64::consts::PI * z0, tau);
                    for j in 1..=r {
                        let z = z0 + *dir * (j as f64 * step);
                        let th = theta1(std::f64::consts::PI * z, tau);
                        let darg = (th / prev).arg();
                        let ybar = omega1 * 0.5 * (z.im + prev_z.im);
                        let dx = omega1 * (z.re - prev_z.re);
                        total += 2.0 * darg + 4.0 * std::f64::consts::PI / area * ybar * dx;
                        prev = th;
                        prev_z = z;
                    }
                }
                links[di][b * n + a] += -0.5 * total;
            }
        }
    }

    let mut plaquette_flux = vec![0.0; n * n];
    let mut windings = vec![0i64; n * n];
    let mut zero_locations = Vec::new();
    for b in 0..n {
        for a in 0..n {
            let a1 = (a + 1) % n;
            let b1 = (b + 1) % n;
            let sum = links[0][b * n + a] + links[1][b * n + a1] - links[0][b1 * n + a] - links[1][b * n + a];
            let flux = principal(sum);
            let w = ((flux - sum) / two_pi).round() as i64;
            plaquette_flux[b * n + a] = flux;
            windings[b * n + a] = w;
            let center = (
                (offset.0 + (a as f64 + 0.5) / nf).rem_euclid(1.0),
                (offset.1 + (b as f64 + 0.5) / nf).rem_euclid(1.0),
            );
            for _ in 0..w.max(0) {
                zero_locations.push(center);
            }
        }
    }
    GaugeDiagnostics { plaquette_flux, windings, zero_locations }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_avoid_points() {
        let pts = [(0.0, 0.0), (0.5, 0.25)];
        let (os, ot) = choose_offset(&pts, 8).unwrap();
        for p in pts {
            let x = (p.0 - os) * 8.0;
            let y = (p.1 - ot) * 8.0;
            assert!((x - x.round()).abs() >= 0.125 - 1e-12);
            assert!((y - y.round()).abs() >= 0.125 - 1e-12);
        }
    }

    #[test]
    fn refinement_grows_with_skew() {
        assert_eq!(refinement(Complex64::new(0.0, 1.0)), 8);
        assert!(refinement(Complex64::new(0.5, 0.5)) > 8);
    }
}
