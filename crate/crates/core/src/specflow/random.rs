//! Random instances with a prescribed kernel and resonance orders.
//!
//! In an eigenbasis of H₀ = diag(0, …, 0, μ) with |μ| ∈ [1, 3], P has blocks
//! [[Q, Cᵀ], [C, R]] with Q diagonal. A kernel direction of order 1 has
//! Q_ii ≠ 0. For order 2 and 3, Q_ii = 0 and the column cᵢ of C sits on its
//! own set of non-kernel coordinates, so the order-2 form −cᵢᵀH₀⁻¹cⱼ is
//! diagonal; order 3 additionally balances the signs of μ on that set so
//! cᵢᵀH₀⁻¹cᵢ = 0. A random orthogonal change of basis hides the structure.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomSpec {
    pub max_dim: usize,
    pub max_kernel: usize,
    pub max_order: usize,
    /// Size of the perturbation entries.
    pub epsilon: f64,
}

impl Default for RandomSpec {
    fn default() -> Self {
        Self { max_dim: 12, max_kernel: 4, max_order: 3, epsilon: 0.1 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RandomInstance {
    pub h0: DMatrix<f64>,
    pub p: DMatrix<f64>,
    /// Designed resonance order of each kernel direction.
    pub orders: Vec<usize>,
}

fn uniform_sign<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let x = rng.gen_range(lo..hi);
    if rng.gen_bool(0.5) {
        x
    } else {
        -x
    }
}

fn random_orthogonal<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    g.qr().q()
}

pub fn random_instance<R: Rng>(rng: &mut R, spec: &RandomSpec) -> RandomInstance {
    let k0 = rng.gen_range(1..=spec.max_kernel);
    let mut orders: Vec<usize> = (0..k0).map(|_| rng.gen_range(1..=spec.max_order)).collect();
    while k0 + needed_coordinates(&orders) > spec.max_dim {
        let i = orders.iter().position(|&o| o > 1).expect("order-1 kernels need one coordinate");
        orders[i] -= 1;
    }
    let lo = k0 + needed_coordinates(&orders);
    let n = rng.gen_range(lo..=spec.max_dim.max(lo));
    instance_with_orders(rng, n, &orders, spec.epsilon)
}

/// Coordinates needed outside the kernel: one per order-2, two per order-3
/// direction, and at least one overall.
fn needed_coordinates(orders: &[usize]) -> usize {
    orders.iter().map(|&o| o.saturating_sub(1)).sum::<usize>().max(1)
}

/// An n×n instance whose kernel directions have the given orders (1, 2 or 3).
///
/// # Panics
/// If an order is outside 1..=3 or n is too small for the orders.
pub fn instance_with_orders<R: Rng>(rng: &mut R, n: usize, orders: &[usize], eps: f64) -> RandomInstance {
    assert!(orders.iter().all(|o| (1..=3).contains(o)), "orders must lie in 1..=3");
    let k0 = orders.len();
    assert!(n >= k0 + needed_coordinates(orders), "dimension too small for the requested orders");
    let m = n - k0;

    let mut mu: Vec<f64> = (0..m).map(|_| uniform_sign(rng, 1.0, 3.0)).collect();
    let mut q = vec![0.0; k0];
    let mut c = DMatrix::<f64>::zeros(m, k0);
    let mut free: Vec<usize> = (0..m).collect();
    free.shuffle(rng);
    for (i, &order) in orders.iter().enumerate() {
        match order {
            1 => {
                q[i] = uniform_sign(rng, 0.5 * eps, eps);
                for r in 0..m {
                    c[(r, i)] = rng.gen_range(-eps..eps);
                }
            }
            2 => {
                let r = free.pop().expect("reserved coordinate");
                c[(r, i)] = uniform_sign(rng, 0.5 * eps, eps);
            }
            _ => {
                let a = free.pop().expect("reserved coordinate");
                let b = free.pop().expect("reserved coordinate");
                // Opposite signs of μ on the pair, then balance Σ c²/μ = 0.
                mu[b] = -mu[a].signum() * mu[b].abs();
                let ca = uniform_sign(rng, 0.5 * eps, eps);
                let cb = ca.abs() * (mu[b].abs() / mu[a].abs()).sqrt() * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                c[(a, i)] = ca;
                c[(b, i)] = cb;
            }
        }
    }
    let mut r = DMatrix::from_fn(m, m, |_, _| rng.gen_range(-eps..eps));
    r = (&r + r.transpose()) * 0.5;

    let mut diag = vec![0.0; k0];
    diag.extend(&mu);
    let h = DMatrix::from_diagonal(&DVector::from_vec(diag));
    let mut p = DMatrix::zeros(n, n);
    for i in 0..k0 {
        p[(i, i)] = q[i];
    }
    p.view_mut((k0, 0), (m, k0)).copy_from(&c);
    p.view_mut((0, k0), (k0, m)).copy_from(&c.transpose());
    p.view_mut((k0, k0), (m, m)).copy_from(&r);

    let o = random_orthogonal(rng, n);
    let sym = |x: DMatrix<f64>| (&x + x.transpose()) * 0.5;
    RandomInstance { h0: sym(&o * h * o.transpose()), p: sym(&o * p * o.transpose()), orders: orders.to_vec() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn instances_have_requested_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let inst = random_instance(&mut rng, &RandomSpec::default());
            let n = inst.h0.nrows();
            assert!(n <= 12);
            let ev = inst.h0.clone().symmetric_eigenvalues();
            let zeros = ev.iter().filter(|x| x.abs() < 1e-10).count();
            assert_eq!(zeros, inst.orders.len());
            assert!(ev.iter().all(|x| x.abs() < 1e-10 || x.abs() > 0.99));
        }
    }
}
