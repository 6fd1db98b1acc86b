//! Abelian τ-vortex equation on a flat torus.
//!
//! Equation: F_A + ½(|Φ|² − τ) iω = 0, ∂̄_A Φ = 0, with the zeros of Φ the
//! prescribed divisor D of degree d. Writing |Φ|² = e^{u+v} with
//! v = Σᵢ 4πG(z − pᵢ) reduces this to Δu = e^{u+v} − τ + 4πd/A, solved by
//! damped Newton iteration with a spectral Laplacian.
//!
//! Sign convention: ∫(i/2π)F_A = −d, so `curvature_integral` (= ∫ iF_A) is
//! −2πd, while the plaquette holonomy phases of the unitary-gauge connection
//! sum to +2πd. Integrating the curvature equation gives ‖Φ‖² = τA − 4πd.
//!
//! Points are given in lattice coordinates (s, t) ∈ [0, 1)², z = ω₁(s + τ t),
//! with ω₁ > 0 fixed by the area A = ω₁² Im τ.

mod export;
mod gauge;
mod spectral;
mod theta;

pub use export::{read_grid_binary, summary_csv, write_grid_binary, GridHeader};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::moduli3::NuZeroSet;
use spectral::Spectral;

/// Convention string written into exported headers.
pub const CONVENTION: &str = "F_A + (|Phi|^2 - tau)/2 i omega = 0; int (i/2pi) F_A = -d; plaquette holonomy sum = 2 pi d";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VortexError {
    #[error("invalid torus geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid vortex problem: {0}")]
    InvalidProblem(String),
    #[error("solvability bound violated: tau*area = {tau_area} <= 4*pi*d = {four_pi_d}")]
    Bradlow { tau_area: f64, four_pi_d: f64 },
    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("no diagnostic lattice offset separates the divisor points from the lattice lines")]
    NoDiagnosticOffset,
}

/// Flat torus ℂ/(ω₁ℤ + ω₁τℤ) sampled on an N×N grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusGeometry {
    pub modulus: Complex64,
    pub grid: usize,
    pub area: f64,
}

impl TorusGeometry {
    pub fn new(modulus: Complex64, grid: usize, area: f64) -> Result<Self, VortexError> {
        if !modulus.re.is_finite() || !modulus.im.is_finite() || modulus.im <= 0.0 {
            return Err(VortexError::InvalidGeometry(format!("modulus {modulus} must have positive imaginary part")));
        }
        if grid < 8 || !grid.is_power_of_two() {
            return Err(VortexError::InvalidGeometry(format!("grid {grid} must be a power of two >= 8")));
        }
        if !area.is_finite() || area <= 0.0 {
            return Err(VortexError::InvalidGeometry(format!("area {area} must be positive")));
        }
        Ok(Self { modulus, grid, area })
    }

    /// The real period ω₁.
    pub fn omega1(&self) -> f64 {
        (self.area / self.modulus.im).sqrt()
    }

    /// Physical position of lattice coordinates (s, t).
    pub fn position(&self, s: f64, t: f64) -> Complex64 {
        self.omega1() * Complex64::new(s + self.modulus.re * t, self.modulus.im * t)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VortexProblem {
    pub geometry: TorusGeometry,
    /// Divisor points in lattice coordinates, repeated by multiplicity.
    pub divisor: Vec<(f64, f64)>,
    pub tau: f64,
    pub tolerance: f64,
}

impl VortexProblem {
    pub fn new(geometry: TorusGeometry, divisor: Vec<(f64, f64)>, tau: f64, tolerance: f64) -> Result<Self, VortexError> {
        if !tau.is_finite() || tau < 0.0 {
            return Err(VortexError::InvalidProblem(format!("tau {tau} must be finite and >= 0")));
        }
        if tolerance.is_nan() || tolerance <= 0.0 {
            return Err(VortexError::InvalidProblem(format!("tolerance {tolerance} must be positive")));
        }
        for &(s, t) in &divisor {
            if !(0.0..1.0).contains(&s) || !(0.0..1.0).contains(&t) {
                return Err(VortexError::InvalidProblem(format!(
                    "divisor point ({s}, {t}) outside the fundamental domain [0,1)^2"
                )));
            }
        }
        Ok(Self { geometry, divisor, tau, tolerance })
    }

    pub fn degree(&self) -> usize {
        self.divisor.len()
    }

    /// τA − 4πd, the expected ‖Φ‖².
    pub fn expected_norm(&self) -> f64 {
        self.tau * self.geometry.area - 4.0 * std::f64::consts::PI * self.degree() as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub max_iterations: usize,
    /// Seed of a random perturbation of the initial guess; `None` starts
    /// from the constant guess.
    pub seed: Option<u64>,
    pub init_amplitude: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { max_iterations: 50, seed: None, init_amplitude: 0.5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VortexSolution {
    pub grid: usize,
    /// u = log|Φ|² − v on the grid.
    pub u_field: Vec<f64>,
    /// |Φ| = e^{(u+v)/2} with v the exact Green's potential.
    pub phi_modulus: Vec<f64>,
    /// ∫ iF_A from the curvature equation (−2πd in this convention).
    pub curvature_integral: f64,
    pub residual_sup: f64,
    pub zero_locations: Vec<(f64, f64)>,
    pub iterations: usize,
    /// Σ of principal plaquette holonomy phases.
    pub plaquette_flux_sum: f64,
    pub zero_count: i64,
    /// sup |∂̄_A Φ| in Coulomb gauge.
    pub dbar_residual: f64,
    /// Σ e^{u+v_N} h² with the band-limited potential used by the solver.
    pub norm_discrete: f64,
    /// Σ e^{u+v} h² with the exact potential.
    pub norm_continuum: f64,
    pub diagnostic_offset: (f64, f64),
}

struct Newton<'a> {
    sp: &'a Spectral,
    v: Vec<f64>,
    c: f64,
    h2: f64,
}

/// Newton state. The coefficients are primary: forward transforms are only
/// applied to updates, so rounding in the high modes does not get amplified
/// by the Laplacian symbol.
struct State {
    coeffs: Vec<Complex64>,
    u: Vec<f64>,
    ew: Vec<f64>,
    f: Vec<f64>,
    res: f64,
}

impl Newton<'_> {
    fn state(&self, coeffs: Vec<Complex64>) -> State {
        let u = self.sp.inverse(&coeffs);
        let lap_c: Vec<Complex64> = coeffs.iter().zip(&self.sp.lap).map(|(c, l)| c * l).collect();
        let lap = self.sp.inverse(&lap_c);
        let ew: Vec<f64> = u.iter().zip(&self.v).map(|(a, b)| (a + b).exp()).collect();
        // F(u) = Δu − e^{u+v} + c.
        let f: Vec<f64> = lap.iter().zip(&ew).map(|(l, e)| l - e + self.c).collect();
        let res = if ew.iter().all(|x| x.is_finite()) { sup(&f) } else { f64::INFINITY };
        State { coeffs, u, ew, f, res }
    }

    fn energy(&self, st: &State) -> f64 {
        // ½∫|∇u|² by Parseval, plus the pointwise terms.
        let n2 = st.u.len() as f64;
        let dirichlet: f64 = st.coeffs.iter().zip(&self.sp.lap).map(|(c, l)| -l * c.norm_sqr()).sum::<f64>() * n2;
        let pointwise: f64 = st.u.iter().zip(&st.ew).map(|(u, e)| e - self.c * u).sum();
        (0.5 * dirichlet + pointwise) * self.h2
    }

    /// Preconditioned CG for (−Δ + D) x = f.
    fn solve_linear(&self, d: &[f64], f: &[f64], target: f64) -> Vec<f64> {
        let mu = (d.iter().sum::<f64>() / d.len() as f64).max(1e-12);
        let apply = |x: &[f64]| -> Vec<f64> {
            let lap = self.sp.laplacian(x);
            x.iter().zip(&lap).zip(d).map(|((xi, li), di)| -li + di * xi).collect()
        };
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let mut x = self.sp.shifted_helmholtz_solve(f, mu);
        let ax = apply(&x);
        let mut r: Vec<f64> = f.iter().zip(&ax).map(|(a, b)| a - b).collect();
        let mut z = self.sp.shifted_helmholtz_solve(&r, mu);
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        for _ in 0..500 {
            if sup(&r) <= target {
                break;
            }
            let ap = apply(&p);
            let alpha = rz / dot(&p, &ap);
            for i in 0..x.len() {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            z = self.sp.shifted_helmholtz_solve(&r, mu);
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..p.len() {
                p[i] = z[i] + beta * p[i];
            }
        }
        x
    }
}

fn sup(x: &[f64]) -> f64 {
    x.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Solves the τ-vortex equation for `p`.
pub fn solve_vortex(p: &VortexProblem, opts: &SolveOptions) -> Result<VortexSolution, VortexError> {
    let geom = &p.geometry;
    let d = p.degree();
    let four_pi_d = 4.0 * std::f64::consts::PI * d as f64;
    let tau_area = p.tau * geom.area;
    if tau_area <= four_pi_d {
        return Err(VortexError::Bradlow { tau_area, four_pi_d });
    }
    let offset = gauge::choose_offset(&p.divisor, geom.grid).ok_or(VortexError::NoDiagnosticOffset)?;
    let n = geom.grid;
    let sp = Spectral::new(geom);
    let c = p.tau - four_pi_d / geom.area;
    let newton = Newton { sp: &sp, v: sp.green_potential(&p.divisor), c, h2: geom.area / (n * n) as f64 };

    let mut u0 = vec![c.ln(); n * n];
    if let Some(seed) = opts.seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for x in u0.iter_mut() {
            *x += rng.gen_range(-opts.init_amplitude..=opts.init_amplitude);
        }
    }

    let mut st = newton.state(sp.forward(&u0));
    let mut iterations = 0;
    while st.res > p.tolerance {
        if iterations >= opts.max_iterations {
            return Err(VortexError::NoConvergence { iterations, residual: st.res });
        }
        iterations += 1;
        let res = st.res;
        let target = (res.min(0.1) * res).max(0.01 * p.tolerance);
        let delta = sp.forward(&newton.solve_linear(&st.ew, &st.f, target));
        let slope = newton.h2 * st.f.iter().zip(&sp.inverse(&delta)).map(|(a, b)| a * b).sum::<f64>();
        let e0 = newton.energy(&st);
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial = newton.state(st.coeffs.iter().zip(&delta).map(|(a, b)| a + alpha * b).collect());
            // Near convergence energy differences drown in rounding, so a
            // halved residual also accepts the step.
            if trial.res.is_finite()
                && (newton.energy(&trial) <= e0 - 1e-4 * alpha * slope || trial.res < 0.5 * res)
            {
                st = trial;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            return Err(VortexError::NoConvergence { iterations, residual: st.res });
        }
    }
    let State { coeffs, u, ew, res, .. } = st;

    let norm_discrete = newton.h2 * ew.iter().sum::<f64>();
    let v_exact = exact_potential(geom, &p.divisor);
    let phi_modulus: Vec<f64> = u.iter().zip(&v_exact).map(|(a, b)| ((a + b) / 2.0).exp()).collect();
    let norm_continuum = newton.h2 * phi_modulus.iter().map(|x| x * x).sum::<f64>();

    // Coulomb-gauge connection from the curvature alone: Δψ = ½(|Φ|² − c).
    let curvature: Vec<f64> = ew.iter().map(|e| 0.5 * (e - c)).collect();
    let psi = sp.inverse_laplacian(&curvature);
    let defect: Vec<f64> = psi.iter().zip(&u).map(|(a, b)| a - 0.5 * b).collect();
    let dbar = sp.dbar(&defect);
    let dbar_residual = dbar.iter().zip(&ew).fold(0.0f64, |m, (z, e)| m.max(z.norm() * e.sqrt()));

    let diag = gauge::diagnose(geom, &sp, &coeffs, &p.divisor, offset);
    Ok(VortexSolution {
        grid: n,
        u_field: u,
        phi_modulus,
        curvature_integral: -0.5 * (tau_area - norm_discrete),
        residual_sup: res,
        zero_locations: diag.zero_locations,
        iterations,
        plaquette_flux_sum: diag.plaquette_flux.iter().sum(),
        zero_count: diag.windings.iter().sum(),
        dbar_residual,
        norm_discrete,
        norm_continuum,
        diagnostic_offset: offset,
    })
}

/// Exact Green's potential Σᵢ 4πG(z − pᵢ) on the grid.
pub fn exact_potential(geom: &TorusGeometry, points: &[(f64, f64)]) -> Vec<f64> {
    let n = geom.grid;
    let c = theta::green_constant(geom.modulus);
    let omega1 = geom.omega1();
    let mut v = vec![0.0; n * n];
    for b in 0..n {
        for a in 0..n {
            let (s, t) = (a as f64 / n as f64, b as f64 / n as f64);
            v[b * n + a] = points
                .iter()
                .map(|&(ps, pt)| theta::green_4pi(s - ps, t - pt, geom.modulus, omega1, geom.area, c))
                .sum();
        }
    }
    v
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    /// Grid quadrature Σ|Φ|²h² of the solver's field.
    pub norm_quadrature: f64,
    /// τA − 4πd.
    pub norm_identity: f64,
    /// |quadrature − identity| / identity.
    pub discrepancy: f64,
    /// Quadrature with the exact Green's potential.
    pub continuum_norm_quadrature: f64,
    pub continuum_discrepancy: f64,
    pub convention: &'static str,
}

/// ‖Φ‖² by quadrature against the integrated curvature identity.
pub fn verify_integrated_identity(sol: &VortexSolution, p: &VortexProblem) -> IdentityReport {
    let identity = p.expected_norm();
    IdentityReport {
        norm_quadrature: sol.norm_discrete,
        norm_identity: identity,
        discrepancy: (sol.norm_discrete - identity).abs() / identity,
        continuum_norm_quadrature: sol.norm_continuum,
        continuum_discrepancy: (sol.norm_continuum - identity).abs() / identity,
        convention: CONVENTION,
    }
}

/// Div(Ψ₊) + Div(Ψ̄₋) = Div(ν) as multisets of zero labels.
pub fn nu_constraint_check(divisor_plus: &[&str], divisor_minus: &[&str], zeros: &NuZeroSet) -> bool {
    let mut counts: std::collections::BTreeMap<&str, i64> =
        zeros.zeros().iter().map(|(l, m)| (l.as_str(), *m as i64)).collect();
    for label in divisor_plus.iter().chain(divisor_minus) {
        match counts.get_mut(label) {
            Some(c) => *c -= 1,
            None => return false,
        }
    }
    counts.values().all(|&c| c == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(n: usize) -> TorusGeometry {
        TorusGeometry::new(Complex64::new(0.0, 1.0), n, 1.0).unwrap()
    }

    fn eight_pi() -> f64 {
        8.0 * std::f64::consts::PI
    }

    #[test]
    fn zero_divisor_is_constant() {
        let p = VortexProblem::new(square(16), vec![], 3.0, 1e-10).unwrap();
        let sol = solve_vortex(&p, &SolveOptions::default()).unwrap();
        assert_eq!(sol.iterations, 0);
        for (u, phi) in sol.u_field.iter().zip(&sol.phi_modulus) {
            assert!((u - 3.0f64.ln()).abs() < 1e-14);
            assert!((phi * phi - 3.0).abs() < 1e-12);
        }
        let rep = verify_integrated_identity(&sol, &p);
        assert!(rep.discrepancy < 1e-14);
        assert_eq!(sol.zero_count, 0);
    }

    #[test]
    fn single_vortex_at_origin() {
        let p = VortexProblem::new(square(64), vec![(0.0, 0.0)], eight_pi(), 1e-10).unwrap();
        let sol = solve_vortex(&p, &SolveOptions::default()).unwrap();
        assert!(sol.residual_sup <= 1e-10);
        assert!((sol.curvature_integral / (2.0 * std::f64::consts::PI) + 1.0).abs() < 1e-6);
        assert!((sol.plaquette_flux_sum - 2.0 * std::f64::consts::PI).abs() < 1e-8);
        assert_eq!(sol.zero_count, 1);
        let (zs, zt) = sol.zero_locations[0];
        let dist = |x: f64| x.min(1.0 - x);
        assert!(dist(zs) <= 1.0 / 64.0 && dist(zt) <= 1.0 / 64.0);
        assert!(sol.dbar_residual < 1e-8);
        assert!(verify_integrated_identity(&sol, &p).discrepancy < 1e-6);
    }

    #[test]
    fn exact_and_truncated_potentials_agree_away_from_points() {
        let g = TorusGeometry::new(Complex64::new(0.25, 1.1), 128, 1.7).unwrap();
        let pts = [(0.3, 0.6)];
        let sp = Spectral::new(&g);
        let vn = sp.green_potential(&pts);
        let ve = exact_potential(&g, &pts);
        // Far field: grid points at lattice distance >= 0.25 from the point.
        let n = 128;
        let mut worst = 0.0f64;
        for b in 0..n {
            for a in 0..n {
                let (s, t) = theta::centered(a as f64 / n as f64 - 0.3, b as f64 / n as f64 - 0.6);
                if s.abs() >= 0.25 || t.abs() >= 0.25 {
                    worst = worst.max((vn[b * n + a] - ve[b * n + a]).abs());
                }
            }
        }
        assert!(worst < 1e-2, "far-field gap {worst}");
    }

    #[test]
    fn skew_torus_two_vortices() {
        let g = TorusGeometry::new(Complex64::new(0.4, 0.9), 64, 2.0).unwrap();
        let p = VortexProblem::new(g, vec![(0.2, 0.3), (0.7, 0.55)], 20.0, 1e-10).unwrap();
        let sol = solve_vortex(&p, &SolveOptions { seed: Some(3), ..Default::default() }).unwrap();
        assert_eq!(sol.zero_count, 2);
        assert!((sol.plaquette_flux_sum - 4.0 * std::f64::consts::PI).abs() < 1e-8);
    }

    #[test]
    fn grid_translation_shifts_the_modulus() {
        let n = 64;
        let g = TorusGeometry::new(Complex64::new(0.3, 1.2), n, 1.0).unwrap();
        let (ds, dt) = (8usize, 20usize);
        let base = VortexProblem::new(g, vec![(0.25, 0.5)], 30.0, 1e-11).unwrap();
        let moved = VortexProblem::new(
            g,
            vec![(0.25 + ds as f64 / n as f64, 0.5 + dt as f64 / n as f64)],
            30.0,
            1e-11,
        )
        .unwrap();
        let a = solve_vortex(&base, &SolveOptions::default()).unwrap();
        let b = solve_vortex(&moved, &SolveOptions::default()).unwrap();
        let mut worst = 0.0f64;
        for t in 0..n {
            for s in 0..n {
                let shifted = ((t + dt) % n) * n + (s + ds) % n;
                worst = worst.max((a.phi_modulus[t * n + s] - b.phi_modulus[shifted]).abs());
            }
        }
        assert!(worst < 1e-9, "translation mismatch {worst}");
    }

    #[test]
    fn bradlow_bound_enforced() {
        let p = VortexProblem::new(square(16), vec![(0.5, 0.5)], 4.0 * std::f64::consts::PI, 1e-10).unwrap();
        assert!(matches!(solve_vortex(&p, &SolveOptions::default()), Err(VortexError::Bradlow { .. })));
    }

    #[test]
    fn invalid_inputs_rejected() {
        assert!(TorusGeometry::new(Complex64::new(0.0, 1.0), 48, 1.0).is_err());
        assert!(TorusGeometry::new(Complex64::new(0.0, -1.0), 16, 1.0).is_err());
        assert!(VortexProblem::new(square(16), vec![(1.0, 0.0)], 1.0, 1e-10).is_err());
    }

    #[test]
    fn nu_constraint_examples() {
        let z = NuZeroSet::new(2, vec![("p".into(), 1), ("q".into(), 1)]).unwrap();
        assert!(nu_constraint_check(&["p"], &["q"], &z));
        assert!(!nu_constraint_check(&["p", "p"], &[], &z));
        assert!(nu_constraint_check(&[], &["p", "q"], &z));
        assert!(!nu_constraint_check(&["r"], &["q"], &z));
    }
}
