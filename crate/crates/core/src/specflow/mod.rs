//! Finite-dimensional spectral flow for linear paths H_t = H₀ + tP, t ∈ [0, 1].
//!
//! Convention: −SF counts eigenvalues that are negative at t = 1 but were
//! non-negative at t = 0, so kernel vectors of H₀ count as non-negative at
//! the start. With this convention `flow = n₋(H₀) − n₋(H₀ + P)`.

mod brute;
mod oracle;
mod random;
mod resonance;

pub use brute::{spectral_flow_bruteforce, BruteForceReport, Crossing};
pub use oracle::{run_oracle, OracleSummary};
pub use random::{instance_with_orders, random_instance, RandomInstance, RandomSpec};
pub use resonance::{resonance_prediction, ResonanceReport, FRAGILE_COEFFICIENT};

use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecflowError {
    #[error("matrix {0} is not symmetric")]
    NotSymmetric(&'static str),
    #[error("dimension mismatch: H0 is {h0}x{h0}, P is {p}x{p}")]
    DimensionMismatch { h0: usize, p: usize },
    #[error("matrix {0} is not square")]
    NotSquare(&'static str),
    #[error("endpoint H0 + P is degenerate (eigenvalue {0:e})")]
    EndpointDegenerate(f64),
    #[error("refinement budget exhausted near t = {0}")]
    BudgetExhausted(f64),
    #[error("an eigenvalue changes sign below the resolution threshold near t = {0}")]
    UnresolvedCrossing(f64),
    #[error("degenerate crossing of {count} eigenvalues near t = {t}")]
    DegenerateCrossing { t: f64, count: i64 },
    #[error("samples must be >= 1")]
    NoSamples,
    #[error("depth must be >= 1")]
    ZeroDepth,
    #[error("a {dim}-dimensional kernel remains after depth {depth}")]
    DepthExhausted { depth: usize, dim: usize },
    #[error("closed form needs d_+, d_- >= 1 and g >= d_+ + d_- - 1 (got g={g}, d_+={d_plus}, d_-={d_minus})")]
    ClosedFormBounds { g: i64, d_plus: i64, d_minus: i64 },
    #[error("l = 0 has no closed form")]
    ZeroEll,
    #[error("matrix parse error: {0}")]
    Parse(String),
}

const SYMMETRY_TOL: f64 = 1e-12;

fn check_symmetric(m: &DMatrix<f64>, name: &'static str) -> Result<(), SpecflowError> {
    if !m.is_square() {
        return Err(SpecflowError::NotSquare(name));
    }
    let scale = m.amax().max(1.0);
    if (m - m.transpose()).amax() > SYMMETRY_TOL * scale {
        return Err(SpecflowError::NotSymmetric(name));
    }
    Ok(())
}

/// The path H₀ + tP sampled at `samples` equally spaced points of (0, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralPath {
    h0: DMatrix<f64>,
    p: DMatrix<f64>,
    samples: usize,
}

impl SpectralPath {
    pub fn new(h0: DMatrix<f64>, p: DMatrix<f64>, samples: usize) -> Result<Self, SpecflowError> {
        check_symmetric(&h0, "H0")?;
        check_symmetric(&p, "P")?;
        if h0.nrows() != p.nrows() {
            return Err(SpecflowError::DimensionMismatch { h0: h0.nrows(), p: p.nrows() });
        }
        if samples == 0 {
            return Err(SpecflowError::NoSamples);
        }
        Ok(Self { h0, p, samples })
    }

    pub fn h0(&self) -> &DMatrix<f64> {
        &self.h0
    }
    pub fn p(&self) -> &DMatrix<f64> {
        &self.p
    }
    pub fn samples(&self) -> usize {
        self.samples
    }
    pub fn dim(&self) -> usize {
        self.h0.nrows()
    }

    pub fn at(&self, t: f64) -> DMatrix<f64> {
        &self.h0 + &self.p * t
    }
}

/// (dim Ker Q, dim₋ Q) = (2(g − (d₊ + d₋ − 1)) + 1, 2(d₋ + d₊ − 1) + 1).
pub fn q_signature_closed_form(g: i64, d_plus: i64, d_minus: i64) -> Result<(i64, i64), SpecflowError> {
    if d_plus < 1 || d_minus < 1 || g < d_plus + d_minus - 1 {
        return Err(SpecflowError::ClosedFormBounds { g, d_plus, d_minus });
    }
    let s = d_plus + d_minus - 1;
    Ok((2 * (g - s) + 1, 2 * s + 1))
}

/// Closed-form −SF₊ together with the degenerate contribution x.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct ClosedFormFlow {
    pub minus_sf: i64,
    pub x: i64,
}

/// −SF₊ = x + 2(d₋ + d₊ − 1) + 1 with x = g − (d₊ + d₋ − 1) + [ℓ > 0].
pub fn sf_closed_form(g: i64, d_plus: i64, d_minus: i64, ell: i64) -> Result<ClosedFormFlow, SpecflowError> {
    if ell == 0 {
        return Err(SpecflowError::ZeroEll);
    }
    let (_, neg) = q_signature_closed_form(g, d_plus, d_minus)?;
    let x = g - (d_plus + d_minus - 1) + i64::from(ell > 0);
    Ok(ClosedFormFlow { minus_sf: x + neg, x })
}

/// The isolated diagonal entry −w/(2ℓ) of the block operator; negative iff ℓ > 0
/// for positive weight w.
pub fn reducible_block_alpha(ell: i64, weight: f64) -> Result<f64, SpecflowError> {
    if ell == 0 {
        return Err(SpecflowError::ZeroEll);
    }
    Ok(-weight / (2.0 * ell as f64))
}

/// Spectrum of [[α,0,0],[0,X,−Y],[0,−Y,−X]] minus the α block is symmetric
/// under λ ↦ −λ (to 1e−10 relative).
pub fn pairing_structure_check(x: &DMatrix<f64>, y: &DMatrix<f64>, alpha: f64) -> bool {
    if check_symmetric(x, "X").is_err() || check_symmetric(y, "Y").is_err() || x.shape() != y.shape() {
        return false;
    }
    let k = x.nrows();
    let mut m = DMatrix::zeros(2 * k + 1, 2 * k + 1);
    m[(0, 0)] = alpha;
    m.view_mut((1, 1), (k, k)).copy_from(x);
    m.view_mut((1, 1 + k), (k, k)).copy_from(&(-y));
    m.view_mut((1 + k, 1), (k, k)).copy_from(&(-y));
    m.view_mut((1 + k, 1 + k), (k, k)).copy_from(&(-x));
    // The α block is decoupled; its eigenvector is e₀.
    let block = m.view((1, 1), (2 * k, 2 * k)).into_owned();
    let mut ev: Vec<f64> = block.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let scale = ev.iter().fold(1.0f64, |a, b| a.max(b.abs()));
    let n = ev.len();
    (0..n).all(|i| (ev[i] + ev[n - 1 - i]).abs() <= 1e-10 * scale)
}

/// Plain dense text format: a header line `rows cols`, then one row per line.
pub fn parse_dense_matrix(text: &str) -> Result<DMatrix<f64>, SpecflowError> {
    let err = |m: String| SpecflowError::Parse(m);
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| err("empty input".into()))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|s| s.parse().map_err(|_| err(format!("bad header '{header}'"))))
        .collect::<Result<_, _>>()?;
    let (rows, cols) = match dims.as_slice() {
        [r, c] => (*r, *c),
        [n] => (*n, *n),
        _ => return Err(err(format!("bad header '{header}'"))),
    };
    let mut data = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let line = lines.next().ok_or_else(|| err(format!("missing row {r}")))?;
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| err(format!("bad number '{s}' in row {r}"))))
            .collect::<Result<_, _>>()?;
        if row.len() != cols {
            return Err(err(format!("row {r} has {} entries, expected {cols}", row.len())));
        }
        data.extend(row);
    }
    if lines.next().is_some() {
        return Err(err("trailing rows".into()));
    }
    Ok(DMatrix::from_row_slice(rows, cols, &data))
}

pub fn write_dense_matrix(m: &DMatrix<f64>) -> String {
    let mut out = format!("{} {}\n", m.nrows(), m.ncols());
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|c| format!("{:?}", m[(r, c)])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}
