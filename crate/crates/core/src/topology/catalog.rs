//! Built-in catalog: the elliptic surfaces E(n).
//!
//! Data per entry: χ = 12n, σ = −8n, b⁺ = 2n − 1, fiber class F with
//! F·F = 0 and genus 1, canonical class K = (n − 2)F.
//!
//! Lattices: for even n, (2n − 1)H ⊕ n(−E8) with F the first isotropic basis
//! vector; for odd n, (2n − 1)⟨1⟩ ⊕ (10n − 1)⟨−1⟩ with F an isotropic vector
//! whose coordinates are all odd (so that (n − 2)F is characteristic).
//! Every entry is re-validated when built: characteristic numbers against
//! the lattice, K characteristic, K² = 2χ + 3σ and adjunction for F.

use super::{ClosedFourManifold, HomologyClass, IntersectionForm, TopologyError};

/// Provenance note carried with every catalog entry.
pub const PROVENANCE: &str = "E(n): elliptic surface with section; b+ = 2n-1, b- = 10n-1; \
lattice (2n-1)H + n(-E8) for even n and (2n-1)<1> + (10n-1)<-1> for odd n";

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub manifold: ClosedFourManifold,
    pub fiber: HomologyClass,
    pub fiber_genus: i64,
    pub canonical: HomologyClass,
    pub n: i64,
}

const E8_EDGES: [(usize, usize); 7] = [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)];

fn negative_e8() -> IntersectionForm {
    let mut rows = vec![vec![0i64; 8]; 8];
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] = -2;
    }
    for &(a, b) in &E8_EDGES {
        rows[a][b] = 1;
        rows[b][a] = 1;
    }
    IntersectionForm::new(rows).expect("E8 Cartan matrix is symmetric")
}

fn hyperbolic() -> IntersectionForm {
    IntersectionForm::new(vec![vec![0, 1], vec![1, 0]]).expect("hyperbolic plane")
}

fn diagonal(pos: usize, neg: usize) -> IntersectionForm {
    let n = pos + neg;
    let mut rows = vec![vec![0i64; n]; n];
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] = if i < pos { 1 } else { -1 };
    }
    IntersectionForm::new(rows).expect("diagonal form")
}

/// Odd positive integers a_1 ≥ … ≥ a_k with Σ a_i² = target.
fn odd_squares(k: usize, target: i64, max: i64, out: &mut Vec<i64>) -> bool {
    if k == 0 {
        return target == 0;
    }
    if target < k as i64 {
        return false;
    }
    let mut a = max;
    while a >= 1 {
        if a * a <= target - (k as i64 - 1) {
            out.push(a);
            if odd_squares(k - 1, target - a * a, a, out) {
                return true;
            }
            out.pop();
        }
        a -= 2;
    }
    false
}

/// E(n) for n ≥ 1.
pub fn elliptic_surface(n: i64) -> Result<CatalogEntry, TopologyError> {
    let name = format!("E({n})");
    let invalid = |reason: String| TopologyError::CatalogInvalid { name: name.clone(), reason };
    if n < 1 {
        return Err(TopologyError::UnknownCatalogEntry(name));
    }
    let b_plus = 2 * n - 1;
    let b_minus = 10 * n - 1;
    let (form, fiber) = if n % 2 == 0 {
        let mut blocks = vec![hyperbolic(); b_plus as usize];
        blocks.extend(std::iter::repeat(negative_e8()).take(n as usize));
        let form = IntersectionForm::direct_sum(&blocks);
        let fiber = HomologyClass::basis(form.rank(), 0);
        (form, fiber)
    } else {
        let form = diagonal(b_plus as usize, b_minus as usize);
        let mut pos = Vec::new();
        let max = ((b_minus as f64).sqrt() as i64) | 1;
        if !odd_squares(b_plus as usize, b_minus, max + 2, &mut pos) {
            return Err(invalid("no odd isotropic fiber vector".into()));
        }
        let mut coords = pos;
        coords.extend(std::iter::repeat(1).take(b_minus as usize));
        (form, HomologyClass::new(coords))
    };
    let euler = 12 * n;
    let signature = -8 * n;
    let manifold = ClosedFourManifold::new(name.clone(), euler, signature, b_plus, form)?;
    let canonical = fiber.scaled(n - 2);
    let entry = CatalogEntry { manifold, fiber, fiber_genus: 1, canonical, n };
    validate(&entry).map_err(invalid)?;
    Ok(entry)
}

fn validate(e: &CatalogEntry) -> Result<(), String> {
    let m = &e.manifold;
    let err = |x: TopologyError| x.to_string();
    if m.b1() != 0 {
        return Err(format!("b1 = {} but E(n) is simply connected", m.b1()));
    }
    let f2 = m.square(&e.fiber).map_err(err)?;
    if f2 != 0 {
        return Err(format!("F.F = {f2}"));
    }
    let k2 = m.square(&e.canonical).map_err(err)?;
    if k2 != 2 * m.euler() + 3 * m.signature() {
        return Err(format!("K^2 = {k2} differs from 2chi + 3sigma"));
    }
    let kf = m.pair(&e.canonical, &e.fiber).map_err(err)?;
    if 2 * e.fiber_genus - 2 != f2 + kf {
        return Err("adjunction fails for the fiber".into());
    }
    if let Some(i) = m.form().characteristic_defect(&e.canonical).map_err(err)? {
        return Err(format!("K is not characteristic (basis vector {i})"));
    }
    Ok(())
}

/// Looks up `"E(n)"`.
pub fn lookup(name: &str) -> Result<CatalogEntry, TopologyError> {
    let unknown = || TopologyError::UnknownCatalogEntry(name.to_string());
    let inner = name.trim().strip_prefix("E(").and_then(|s| s.strip_suffix(')')).ok_or_else(unknown)?;
    let n: i64 = inner.parse().map_err(|_| unknown())?;
    if !(1..=12).contains(&n) {
        return Err(unknown());
    }
    elliptic_surface(n)
}
