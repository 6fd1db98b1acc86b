//! Order-by-order prediction of how the kernel of H₀ splits under H₀ + tP.
//!
//! A chain of length k is (Ξ₀, …, Ξ_{k−1}) with H₀Ξ₀ = 0 and
//! H₀Ξ_j + PΞ_{j−1} = 0. The chains form the null space of a block matrix;
//! their first components span V_k ⊂ Ker H₀, and
//! B^k(Ξ₀, Ξ₀′) = ⟨Ξ₀, PΞ′_{k−1}⟩ is a well-defined symmetric form on V_k
//! whose radical is V_{k+1}. Negative eigenvalues of B^k are kernel
//! eigenvalues that leave zero as c·t^k with c < 0.
//!
//! Taking the full null space rather than one pseudo-inverse solution keeps
//! the kernel freedom at every step, so no choice of Ξ_j has to be made.

use nalgebra::DMatrix;
use serde::Serialize;

use super::SpecflowError;

/// Relative cutoff for singular values and form eigenvalues.
const ZERO_TOL: f64 = 1e-10;
/// Below this relative size a nonzero form eigenvalue is overtaken by the
/// next order so close to t = 0 that its sign cannot be observed.
pub const FRAGILE_COEFFICIENT: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OrderCount {
    pub order: usize,
    pub negatives: usize,
    pub positives: usize,
    /// Dimension of the radical passed to the next order.
    pub kernel: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResonanceReport {
    pub dim_ker_h0: usize,
    pub neg_q: usize,
    pub pos_q: usize,
    pub ker_r_dim: usize,
    /// Counts for orders k ≥ 2.
    pub higher_order: Vec<OrderCount>,
    pub predicted_flow: i64,
    /// Smallest nonzero |eigenvalue| over all forms B^k, relative to the
    /// operator scale; tiny values mean the sign at that order is fragile.
    pub min_coefficient: f64,
}

impl ResonanceReport {
    pub fn is_well_conditioned(&self) -> bool {
        self.min_coefficient >= FRAGILE_COEFFICIENT
    }
}

fn chain_matrix(h0: &DMatrix<f64>, p: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let n = h0.nrows();
    let mut m = DMatrix::zeros(k * n, k * n);
    for j in 0..k {
        m.view_mut((j * n, j * n), (n, n)).copy_from(h0);
        if j > 0 {
            m.view_mut((j * n, (j - 1) * n), (n, n)).copy_from(p);
        }
    }
    m
}

/// Orthonormal basis of the null space, as columns.
fn null_space(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let cols: Vec<_> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= tol)
        .map(|(i, _)| vt.row(i).transpose())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(m.ncols(), 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// (negatives, positives, zeros, smallest nonzero |eigenvalue|).
fn signature(b: &DMatrix<f64>, tol: f64) -> (usize, usize, usize, f64) {
    if b.nrows() == 0 {
        return (0, 0, 0, f64::INFINITY);
    }
    let sym = (b + b.transpose()) * 0.5;
    let ev = sym.symmetric_eigenvalues();
    let neg = ev.iter().filter(|&&x| x < -tol).count();
    let pos = ev.iter().filter(|&&x| x > tol).count();
    let min = ev.iter().map(|x| x.abs()).filter(|&x| x > tol).fold(f64::INFINITY, f64::min);
    (neg, pos, ev.len() - neg - pos, min)
}

/// The form B^k on V_k, in an orthonormal basis of V_k.
fn order_form(h0: &DMatrix<f64>, p: &DMatrix<f64>, k: usize, tol: f64) -> DMatrix<f64> {
    let n = h0.nrows();
    let chains = null_space(&chain_matrix(h0, p, k), tol);
    let r = chains.ncols();
    if r == 0 {
        return DMatrix::zeros(0, 0);
    }
    let first = chains.rows(0, n).into_owned();
    let last = chains.rows((k - 1) * n, n).into_owned();
    let g = first.transpose() * p * &last;
    // Coordinates turning chain coefficients into an orthonormal basis of V_k.
    let svd = first.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let cols: Vec<_> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > 1e-8)
        .map(|(i, &s)| vt.row(i).transpose() / s)
        .collect();
    if cols.is_empty() {
        return DMatrix::zeros(0, 0);
    }
    let c = DMatrix::from_columns(&cols);
    c.transpose() * g * c
}

/// Predicted spectral flow from the order expansion up to `depth`.
pub fn resonance_prediction(h0: &DMatrix<f64>, p: &DMatrix<f64>, depth: usize) -> Result<ResonanceReport, SpecflowError> {
    super::check_symmetric(h0, "H0")?;
    super::check_symmetric(p, "P")?;
    if h0.nrows() != p.nrows() {
        return Err(SpecflowError::DimensionMismatch { h0: h0.nrows(), p: p.nrows() });
    }
    if depth == 0 {
        return Err(SpecflowError::ZeroDepth);
    }
    let scale = h0.norm().max(p.norm()).max(f64::MIN_POSITIVE);
    let tol = ZERO_TOL * scale;

    let ker = null_space(h0, tol).ncols();
    let mut report = ResonanceReport {
        dim_ker_h0: ker,
        neg_q: 0,
        pos_q: 0,
        ker_r_dim: 0,
        higher_order: Vec::new(),
        predicted_flow: 0,
        min_coefficient: f64::INFINITY,
    };
    if ker == 0 {
        return Ok(report);
    }
    let mut negatives = 0usize;
    let mut remaining = ker;
    for k in 1..=depth {
        let b = order_form(h0, p, k, tol);
        let (neg, pos, zero, min) = signature(&b, tol);
        negatives += neg;
        report.min_coefficient = report.min_coefficient.min(min / scale);
        if k == 1 {
            report.neg_q = neg;
            report.pos_q = pos;
            report.ker_r_dim = zero;
        } else {
            report.higher_order.push(OrderCount { order: k, negatives: neg, positives: pos, kernel: zero });
        }
        remaining = zero;
        if zero == 0 {
            break;
        }
    }
    if remaining > 0 {
        return Err(SpecflowError::DepthExhausted { depth, dim: remaining });
    }
    report.predicted_flow = -(negatives as i64);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_by_one() {
        let r = resonance_prediction(&DMatrix::zeros(1, 1), &DMatrix::from_element(1, 1, -1.0), 1).unwrap();
        assert_eq!((r.neg_q, r.predicted_flow), (1, -1));
    }

    #[test]
    fn positive_perturbation_predicts_zero() {
        let h0 = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.0, 0.0, 2.0, -1.0]));
        let p = DMatrix::identity(4, 4) * 0.1;
        let r = resonance_prediction(&h0, &p, 1).unwrap();
        assert_eq!((r.dim_ker_h0, r.neg_q, r.pos_q, r.predicted_flow), (2, 0, 2, 0));
    }

    #[test]
    fn second_order_sign() {
        // H0 = diag(0, 1), P = [[0, c], [c, 0]]: λ(t) ≈ −c²t², order 2 negative.
        let h0 = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0]);
        let p = DMatrix::from_row_slice(2, 2, &[0.0, 0.3, 0.3, 0.0]);
        let r = resonance_prediction(&h0, &p, 2).unwrap();
        assert_eq!(r.ker_r_dim, 1);
        assert_eq!(r.higher_order, vec![OrderCount { order: 2, negatives: 1, positives: 0, kernel: 0 }]);
        assert_eq!(r.predicted_flow, -1);
        // With a negative gap the order-2 coefficient flips.
        let h0 = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, -1.0]);
        assert_eq!(resonance_prediction(&h0, &p, 2).unwrap().predicted_flow, 0);
    }

    #[test]
    fn depth_exhaustion_reported() {
        let h0 = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0]);
        let p = DMatrix::from_row_slice(2, 2, &[0.0, 0.3, 0.3, 0.0]);
        assert_eq!(
            resonance_prediction(&h0, &p, 1),
            Err(SpecflowError::DepthExhausted { depth: 1, dim: 1 })
        );
        assert_eq!(resonance_prediction(&h0, &p, 0), Err(SpecflowError::ZeroDepth));
    }
}
