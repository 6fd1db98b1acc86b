use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::TopologyError;

/// An integer vector in H₂(X; ℤ)/torsion, in the basis of the Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HomologyClass(Vec<i64>);

impl HomologyClass {
    pub fn new(coordinates: Vec<i64>) -> Self {
        Self(coordinates)
    }

    pub fn zero(rank: usize) -> Self {
        Self(vec![0; rank])
    }

    /// The i-th basis vector.
    pub fn basis(rank: usize, i: usize) -> Self {
        let mut v = vec![0; rank];
        v[i] = 1;
        Self(v)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn coordinates(&self) -> &[i64] {
        &self.0
    }

    /// `a·self + b·other`; panics on rank mismatch.
    pub fn combine(&self, a: i64, other: &HomologyClass, b: i64) -> HomologyClass {
        assert_eq!(self.rank(), other.rank(), "rank mismatch in class combination");
        HomologyClass(self.0.iter().zip(&other.0).map(|(x, y)| a * x + b * y).collect())
    }

    pub fn scaled(&self, k: i64) -> HomologyClass {
        HomologyClass(self.0.iter().map(|x| k * x).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }
}

impl std::ops::Add for &HomologyClass {
    type Output = HomologyClass;
    fn add(self, rhs: &HomologyClass) -> HomologyClass {
        self.combine(1, rhs, 1)
    }
}

impl std::ops::Sub for &HomologyClass {
    type Output = HomologyClass;
    fn sub(self, rhs: &HomologyClass) -> HomologyClass {
        self.combine(1, rhs, -1)
    }
}

impl std::ops::Neg for &HomologyClass {
    type Output = HomologyClass;
    fn neg(self) -> HomologyClass {
        self.scaled(-1)
    }
}

/// Symmetric integer Gram matrix on a free lattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct IntersectionForm {
    rank: usize,
    gram: Vec<i64>,
}

impl IntersectionForm {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self, TopologyError> {
        let rank = rows.len();
        for (row, r) in rows.iter().enumerate() {
            if r.len() != rank {
                return Err(TopologyError::NotSquare { row, len: r.len(), rank });
            }
        }
        for (i, r) in rows.iter().enumerate() {
            for (j, &x) in r.iter().enumerate().take(i) {
                if x != rows[j][i] {
                    return Err(TopologyError::NotSymmetric { i, j });
                }
            }
        }
        Ok(Self { rank, gram: rows.into_iter().flatten().collect() })
    }

    /// Orthogonal direct sum of forms.
    pub fn direct_sum(blocks: &[IntersectionForm]) -> Self {
        let rank: usize = blocks.iter().map(|b| b.rank).sum();
        let mut gram = vec![0; rank * rank];
        let mut off = 0;
        for b in blocks {
            for i in 0..b.rank {
                for j in 0..b.rank {
                    gram[(off + i) * rank + off + j] = b.entry(i, j);
                }
            }
            off += b.rank;
        }
        Self { rank, gram }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.gram[i * self.rank + j]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.gram.chunks(self.rank.max(1)).take(self.rank).map(|r| r.to_vec()).collect()
    }

    /// a·b through the Gram matrix, with overflow detection.
    pub fn pair(&self, a: &HomologyClass, b: &HomologyClass) -> Result<i64, TopologyError> {
        if a.rank() != self.rank || b.rank() != self.rank {
            return Err(TopologyError::DimensionMismatch {
                expected: self.rank,
                got: if a.rank() != self.rank { a.rank() } else { b.rank() },
            });
        }
        let mut acc: i128 = 0;
        for i in 0..self.rank {
            let ai = a.0[i] as i128;
            if ai == 0 {
                continue;
            }
            let mut row: i128 = 0;
            for j in 0..self.rank {
                row += self.entry(i, j) as i128 * b.0[j] as i128;
            }
            acc += ai * row;
        }
        i64::try_from(acc).map_err(|_| TopologyError::Overflow)
    }

    /// First basis index i with w·eᵢ ≢ eᵢ·eᵢ (mod 2), or `None` when w is
    /// characteristic.
    pub fn characteristic_defect(&self, w: &HomologyClass) -> Result<Option<usize>, TopologyError> {
        if w.rank() != self.rank {
            return Err(TopologyError::DimensionMismatch { expected: self.rank, got: w.rank() });
        }
        for i in 0..self.rank {
            let dot: i128 = (0..self.rank).map(|j| self.entry(i, j) as i128 * w.0[j] as i128).sum();
            if (dot - self.entry(i, i) as i128).rem_euclid(2) != 0 {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    /// Counts of positive, negative and zero eigenvalues.
    ///
    /// Entries are small integers, so a floating eigen-solve with a relative
    /// cutoff classifies the inertia reliably.
    pub fn inertia(&self) -> (usize, usize, usize) {
        if self.rank == 0 {
            return (0, 0, 0);
        }
        let m = DMatrix::from_fn(self.rank, self.rank, |i, j| self.entry(i, j) as f64);
        let eig = m.symmetric_eigenvalues();
        let scale = eig.iter().fold(1.0f64, |s, x| s.max(x.abs()));
        let tol = 1e-9 * scale;
        let pos = eig.iter().filter(|&&x| x > tol).count();
        let neg = eig.iter().filter(|&&x| x < -tol).count();
        (pos, neg, self.rank - pos - neg)
    }

    /// Conjugates the form by an integer change of basis: `Uᵀ G U`.
    pub fn conjugate(&self, u: &[Vec<i64>]) -> IntersectionForm {
        let n = self.rank;
        let mut out = vec![vec![0i64; n]; n];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let mut s = 0i64;
                for a in 0..n {
                    for b in 0..n {
                        s += u[a][i] * self.entry(a, b) * u[b][j];
                    }
                }
                *cell = s;
            }
        }
        IntersectionForm::new(out).expect("conjugate of a symmetric form is symmetric")
    }
}

impl TryFrom<Vec<Vec<i64>>> for IntersectionForm {
    type Error = TopologyError;
    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self, Self::Error> {
        IntersectionForm::new(rows)
    }
}

impl From<IntersectionForm> for Vec<Vec<i64>> {
    fn from(f: IntersectionForm) -> Self {
        f.rows()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_asymmetric() {
        assert!(matches!(
            IntersectionForm::new(vec![vec![0, 1], vec![2, 0]]),
            Err(TopologyError::NotSymmetric { i: 1, j: 0 })
        ));
        assert!(matches!(
            IntersectionForm::new(vec![vec![0, 1], vec![1]]),
            Err(TopologyError::NotSquare { .. })
        ));
    }

    #[test]
    fn inertia_of_hyperbolic_plane() {
        let h = IntersectionForm::new(vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(h.inertia(), (1, 1, 0));
        let s = IntersectionForm::direct_sum(&[h.clone(), h]);
        assert_eq!(s.rank(), 4);
        assert_eq!(s.entry(2, 3), 1);
        assert_eq!(s.entry(0, 3), 0);
    }

    #[test]
    fn characteristic_vectors() {
        let odd = IntersectionForm::new(vec![vec![1, 0], vec![0, -1]]).unwrap();
        assert_eq!(odd.characteristic_defect(&HomologyClass::new(vec![3, 1])), Ok(None));
        assert_eq!(odd.characteristic_defect(&HomologyClass::new(vec![2, 1])), Ok(Some(0)));
        let h = IntersectionForm::new(vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(h.characteristic_defect(&HomologyClass::new(vec![2, -4])), Ok(None));
        assert_eq!(h.characteristic_defect(&HomologyClass::new(vec![2, 1])), Ok(Some(0)));
        assert!(h.characteristic_defect(&HomologyClass::new(vec![1])).is_err());
    }

    fn unimodular(n: usize, seed: &[i64]) -> Vec<Vec<i64>> {
        // Upper unitriangular matrix with entries from the seed.
        let mut u = vec![vec![0i64; n]; n];
        let mut k = 0;
        for (i, row) in u.iter_mut().enumerate() {
            row[i] = 1;
            for cell in row.iter_mut().skip(i + 1) {
                *cell = seed[k % seed.len()];
                k += 1;
            }
        }
        u
    }

    proptest! {
        #[test]
        fn self_intersection_is_basis_invariant(
            diag in prop::collection::vec(-3i64..=3, 3),
            off in prop::collection::vec(-2i64..=2, 3),
            seed in prop::collection::vec(-2i64..=2, 3),
            x in prop::collection::vec(-5i64..=5, 3),
        ) {
            let g = IntersectionForm::new(vec![
                vec![diag[0], off[0], off[1]],
                vec![off[0], diag[1], off[2]],
                vec![off[1], off[2], diag[2]],
            ]).unwrap();
            let u = unimodular(3, &seed);
            let g2 = g.conjugate(&u);
            // A class with coordinates y in the new basis is U·y in the old one.
            let y = HomologyClass::new(x.clone());
            let uy = HomologyClass::new((0..3).map(|i| (0..3).map(|j| u[i][j] * x[j]).sum()).collect());
            prop_assert_eq!(g2.pair(&y, &y).unwrap(), g.pair(&uy, &uy).unwrap());
        }
    }
}
