//! Eigenvalue-crossing count by sampling and bisection.
//!
//! A parameter value is clean when no eigenvalue satisfies |λ| < 1e−8‖H‖.
//! Negative-eigenvalue counts are compared between consecutive clean samples;
//! a change is localized by bisection until the bracket is below 1e−12 or
//! every probe inside it is unclean, at which point it must be simple.
//!
//! Samples with no clean probe nearby still record the sign pattern of the
//! spectrum against the rounding floor 1e−12‖H‖. If those signs change more
//! often than the surrounding clean counts account for, an eigenvalue crossed
//! zero while hovering below the threshold and the path is rejected.

use serde::Serialize;

use super::{SpecflowError, SpectralPath};

const REL_ZERO: f64 = 1e-8;
const REL_FLOOR: f64 = 1e-12;
const MIN_BRACKET: f64 = 1e-12;
const EIGEN_BUDGET: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Crossing {
    pub t: f64,
    /// +1 when an eigenvalue goes from negative to positive.
    pub direction: i64,
    /// Hellmann–Feynman slope ⟨v, Pv⟩ of the eigenvalue nearest zero.
    pub slope: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BruteForceReport {
    pub flow: i64,
    /// Kernel eigenvalues of H₀ that are negative at the first clean sample.
    pub departures: i64,
    /// Interior crossings after the first clean sample.
    pub crossings: Vec<Crossing>,
    pub eigen_solves: usize,
}

struct Scanner<'a> {
    path: &'a SpectralPath,
    threshold: f64,
    floor: f64,
    solves: usize,
}

enum Probe {
    Clean(i64),
    Unclean,
}

impl Scanner<'_> {
    fn eigen(&mut self, t: f64) -> Result<nalgebra::SymmetricEigen<f64, nalgebra::Dyn>, SpecflowError> {
        self.solves += 1;
        if self.solves > EIGEN_BUDGET {
            return Err(SpecflowError::BudgetExhausted(t));
        }
        Ok(self.path.at(t).symmetric_eigen())
    }

    fn probe(&mut self, t: f64) -> Result<Probe, SpecflowError> {
        let e = self.eigen(t)?;
        if e.eigenvalues.iter().any(|l| l.abs() < self.threshold) {
            return Ok(Probe::Unclean);
        }
        Ok(Probe::Clean(e.eigenvalues.iter().filter(|&&l| l < 0.0).count() as i64))
    }

    /// Negative count against the rounding floor, if no eigenvalue sits inside it.
    fn fine_count(&mut self, t: f64) -> Result<Option<i64>, SpecflowError> {
        let e = self.eigen(t)?;
        if e.eigenvalues.iter().any(|l| l.abs() <= self.floor) {
            return Ok(None);
        }
        Ok(Some(e.eigenvalues.iter().filter(|&&l| l < 0.0).count() as i64))
    }

    /// A clean probe near `t` inside (lo, hi), trying a few nearby offsets.
    fn clean_near(&mut self, t: f64, lo: f64, hi: f64) -> Result<Option<(f64, i64)>, SpecflowError> {
        let width = hi - lo;
        for k in 0..9 {
            let shift = if k == 0 { 0.0 } else { ((k + 1) / 2) as f64 * 0.07 * width * if k % 2 == 1 { 1.0 } else { -1.0 } };
            let s = t + shift;
            if s <= lo || s >= hi {
                continue;
            }
            if let Probe::Clean(n) = self.probe(s)? {
                return Ok(Some((s, n)));
            }
        }
        Ok(None)
    }

    fn slope_at(&mut self, t: f64) -> Result<f64, SpecflowError> {
        let e = self.eigen(t)?;
        let (i, _) = e
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
            .expect("non-empty spectrum");
        let v = e.eigenvectors.column(i);
        Ok(v.dot(&(self.path.p() * v)))
    }

    /// Localizes the count change n_hi − n_lo on (lo, hi] into crossings.
    fn bisect(&mut self, lo: f64, n_lo: i64, hi: f64, n_hi: i64, out: &mut Vec<Crossing>) -> Result<(), SpecflowError> {
        if n_lo == n_hi {
            return Ok(());
        }
        let mid = 0.5 * (lo + hi);
        let probe = if hi - lo > MIN_BRACKET { self.clean_near(mid, lo, hi)? } else { None };
        match probe {
            Some((m, n_m)) => {
                self.bisect(lo, n_lo, m, n_m, out)?;
                self.bisect(m, n_m, hi, n_hi, out)
            }
            None => {
                let count = n_lo - n_hi;
                if count.abs() != 1 {
                    return Err(SpecflowError::DegenerateCrossing { t: mid, count: count.abs() });
                }
                let slope = self.slope_at(mid)?;
                out.push(Crossing { t: mid, direction: count, slope });
                Ok(())
            }
        }
    }
}

/// Sign counts at unclean samples between two clean ones must change exactly
/// as much as the clean counts do; before the first clean sample they must
/// not change at all.
fn check_hidden_crossings(prev: Option<(f64, i64)>, pending: &[(f64, i64)], n: i64) -> Result<(), SpecflowError> {
    let mut seq: Vec<(f64, i64)> = prev.into_iter().collect();
    seq.extend_from_slice(pending);
    let allowed = prev.map_or(0, |(_, np)| (n - np).abs());
    let mut variation = 0;
    let mut last = seq.first().map(|x| x.1);
    for &(t, f) in seq.iter().skip(1).chain(std::iter::once(&(f64::NAN, n))) {
        if let Some(l) = last {
            variation += (f - l).abs();
            if variation > allowed {
                let t = if t.is_nan() { pending.last().map_or(1.0, |x| x.0) } else { t };
                return Err(SpecflowError::UnresolvedCrossing(t));
            }
        }
        last = Some(f);
    }
    Ok(())
}

/// Brute-force spectral flow along H₀ + tP, t ∈ [0, 1].
pub fn spectral_flow_bruteforce(path: &SpectralPath) -> Result<BruteForceReport, SpecflowError> {
    if path.dim() == 0 {
        return Ok(BruteForceReport { flow: 0, departures: 0, crossings: vec![], eigen_solves: 0 });
    }
    let scale = path.h0().norm() + path.p().norm();
    let threshold = REL_ZERO * scale.max(f64::MIN_POSITIVE);
    let mut sc = Scanner { path, threshold, floor: REL_FLOOR * scale.max(f64::MIN_POSITIVE), solves: 0 };

    let e1 = sc.eigen(1.0)?;
    if let Some(l) = e1.eigenvalues.iter().copied().find(|l| l.abs() < threshold) {
        return Err(SpecflowError::EndpointDegenerate(l));
    }
    let e0 = sc.eigen(0.0)?;
    let n_start = e0.eigenvalues.iter().filter(|&&l| l < -threshold).count() as i64;

    let samples = path.samples();
    let h = 1.0 / samples as f64;
    let mut first: Option<(f64, i64)> = None;
    let mut prev: Option<(f64, i64)> = None;
    let mut pending: Vec<(f64, i64)> = Vec::new();
    let mut crossings = Vec::new();
    let n_end = e1.eigenvalues.iter().filter(|&&l| l < 0.0).count() as i64;
    for i in 1..=samples {
        let t = i as f64 * h;
        let probe = if i == samples { Some((1.0, n_end)) } else { sc.clean_near(t, t - 0.5 * h, t + 0.5 * h)? };
        let Some((t, n)) = probe else {
            if let Some(f) = sc.fine_count(t)? {
                pending.push((t, f));
            }
            continue;
        };
        check_hidden_crossings(prev, &pending, n)?;
        pending.clear();
        match prev {
            None => first = Some((t, n)),
            Some((tp, np)) => sc.bisect(tp, np, t, n, &mut crossings)?,
        }
        prev = Some((t, n));
    }
    let (_, n_first) = first.expect("set on first clean sample");
    Ok(BruteForceReport {
        flow: n_start - n_end,
        departures: n_first - n_start,
        crossings,
        eigen_solves: sc.solves,
    })
}
