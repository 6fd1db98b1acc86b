//! The JSON input document.
//!
//! Optional blocks stay optional in the normalized form; catalog references
//! are kept as references, so normalizing twice gives the same text.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::moduli3::NuZeroSet;
use crate::rational::HalfInt;
use crate::spinc::LogSpinc;
use crate::topology::{build_pair, catalog, ClosedFourManifold, HomologyClass, IntersectionForm, PairXSigma};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalog: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signature: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_plus: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram_matrix: Option<Vec<Vec<i64>>>,
    /// K_X, needed for spin^c structures given by a twisting class.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub canonical_vector: Option<Vec<i64>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigmaBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genus: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_plus_complement: Option<i64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpincBlock {
    #[serde(rename = "c1L_vector", default, skip_serializing_if = "Option::is_none")]
    pub c1l_vector: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twisting_vector: Option<Vec<i64>>,
    /// Optional check on ½c₁(L)·Σ.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<HalfInt>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NuBlock {
    /// Multiplicities of the zeros, labeled p0, p1, … in order.
    pub zeros: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VortexBlock {
    #[serde(rename = "N")]
    pub n: usize,
    pub modulus: [f64; 2],
    #[serde(default = "default_area")]
    pub area: f64,
    pub tau: f64,
    /// Points in lattice coordinates [0, 1)², repeated by multiplicity.
    #[serde(default)]
    pub divisor: Vec<[f64; 2]>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn default_area() -> f64 {
    1.0
}
fn default_tolerance() -> f64 {
    1e-10
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TunnelingBlock {
    pub a: i64,
    pub b_plus: i64,
    pub b_minus: i64,
    #[serde(default)]
    pub adapted: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomBlock {
    pub count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_kernel: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClosedFormBlock {
    pub g: i64,
    pub d_plus: i64,
    pub d_minus: i64,
    pub ell: i64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecflowBlock {
    /// Dense matrix files: a "rows cols" line, then one row per line.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h0: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random: Option<RandomBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<ClosedFormBlock>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TablesBlock {
    pub side1: PathBuf,
    pub side2: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signs: Option<PathBuf>,
}

/// Glued characteristic numbers for one splitting, with the indices of the
/// spin^c structures of each side in their `spinc` lists.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GluedBlock {
    pub splitting: [i64; 2],
    pub spinc: [usize; 2],
    pub euler: i64,
    pub signature: i64,
    pub c1_square: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairBlock {
    pub manifold: ManifoldBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<SigmaBlock>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub spinc: Vec<SpincBlock>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SumBlock {
    pub pair2: PairBlock,
    #[serde(default)]
    pub residues: [i64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tables: Option<TablesBlock>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub glued: Vec<GluedBlock>,
    /// Index pairs of reducible-end structures s_k on each side.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reducible: Vec<[usize; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpecFile {
    /// Required by every command except `vortex` and `specflow`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifold: Option<ManifoldBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<SigmaBlock>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub spinc: Vec<SpincBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<NuBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vortex: Option<VortexBlock>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tunneling: Vec<TunnelingBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub specflow: Option<SpecflowBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sum: Option<SumBlock>,
}

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

/// A validated pair with its spin^c structures.
#[derive(Clone, Debug)]
pub struct LoadedPair {
    pub pair: PairXSigma,
    pub canonical: Option<HomologyClass>,
    pub spinc: Vec<LogSpinc>,
}

impl ManifoldBlock {
    fn build(&self) -> Result<(ClosedFourManifold, Option<HomologyClass>, Option<catalog::CatalogEntry>), Error> {
        if let Some(name) = &self.catalog {
            let explicit = self.name.is_some()
                || self.euler.is_some()
                || self.signature.is_some()
                || self.b_plus.is_some()
                || self.gram_matrix.is_some()
                || self.canonical_vector.is_some();
            if explicit {
                return Err(schema("manifold: a catalog reference cannot be combined with explicit data"));
            }
            let entry = catalog::lookup(name)?;
            return Ok((entry.manifold.clone(), Some(entry.canonical.clone()), Some(entry)));
        }
        let missing = |f: &str| schema(format!("manifold.{f} is required without a catalog reference"));
        let gram = self.gram_matrix.clone().ok_or_else(|| missing("gram_matrix"))?;
        let form = IntersectionForm::new(gram)?;
        let x = ClosedFourManifold::new(
            self.name.clone().unwrap_or_else(|| "X".to_string()),
            self.euler.ok_or_else(|| missing("euler"))?,
            self.signature.ok_or_else(|| missing("signature"))?,
            self.b_plus.ok_or_else(|| missing("b_plus"))?,
            form,
        )?;
        let canonical = match &self.canonical_vector {
            Some(v) => {
                let c = HomologyClass::new(v.clone());
                x.check_class(&c)?;
                Some(c)
            }
            None => None,
        };
        Ok((x, canonical, None))
    }
}

fn load_pair(manifold: &ManifoldBlock, sigma: Option<&SigmaBlock>, spinc: &[SpincBlock]) -> Result<LoadedPair, Error> {
    let (x, canonical, entry) = manifold.build()?;
    let default = SigmaBlock::default();
    let sigma = sigma.unwrap_or(&default);
    let vector = match (&sigma.vector, &entry) {
        (Some(v), _) => HomologyClass::new(v.clone()),
        (None, Some(e)) => e.fiber.clone(),
        (None, None) => return Err(schema("sigma.vector is required without a catalog reference")),
    };
    let genus = match (sigma.genus, &entry) {
        (Some(g), _) => g,
        (None, Some(e)) => e.fiber_genus,
        (None, None) => return Err(schema("sigma.genus is required without a catalog reference")),
    };
    let bpc = match (sigma.b_plus_complement, &entry) {
        (Some(b), _) => b,
        (None, Some(_)) => x.b_plus(),
        (None, None) => return Err(schema("sigma.b_plus_complement is required without a catalog reference")),
    };
    let pair = build_pair(x, vector, genus, bpc)?;
    let mut out = Vec::with_capacity(spinc.len());
    for (i, s) in spinc.iter().enumerate() {
        let structure = match (&s.c1l_vector, &s.twisting_vector) {
            (Some(c1), None) => {
                let c1 = HomologyClass::new(c1.clone());
                pair.manifold().check_class(&c1)?;
                match s.m {
                    Some(m) => LogSpinc::from_c1_checked(&pair, c1, m)?,
                    None => LogSpinc::from_c1(&pair, c1)?,
                }
            }
            (None, Some(e)) => {
                let k = canonical
                    .as_ref()
                    .ok_or_else(|| schema(format!("spinc[{i}]: twisting_vector needs manifold.canonical_vector")))?;
                let s2 = LogSpinc::from_twisting(&pair, k, HomologyClass::new(e.clone()))?;
                if let Some(m) = s.m {
                    if m != s2.m() {
                        return Err(crate::spinc::SpincError::HalfDegreeMismatch { stated: m, computed: s2.m() }.into());
                    }
                }
                s2
            }
            _ => return Err(schema(format!("spinc[{i}]: give exactly one of c1L_vector and twisting_vector"))),
        };
        out.push(structure);
    }
    Ok(LoadedPair { pair, canonical, spinc: out })
}

impl PairSpecFile {
    pub fn parse(text: &str) -> Result<Self, Error> {
        serde_json::from_str(text).map_err(|e| schema(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.display(), e))?;
        Self::parse(&text)
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_normalized_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("spec files serialize");
        s.push('\n');
        s
    }

    pub fn load_pair(&self) -> Result<LoadedPair, Error> {
        let manifold = self.manifold.as_ref().ok_or_else(|| schema("a manifold block is required"))?;
        load_pair(manifold, self.sigma.as_ref(), &self.spinc)
    }

    pub fn nu_zeros(&self, genus: i64) -> Result<Option<NuZeroSet>, Error> {
        match &self.nu {
            None => Ok(None),
            Some(nu) => Ok(Some(NuZeroSet::from_multiplicities(genus, &nu.zeros)?)),
        }
    }
}

impl PairBlock {
    pub fn load(&self) -> Result<LoadedPair, Error> {
        load_pair(&self.manifold, self.sigma.as_ref(), &self.spinc)
    }
}

/// Resolves a path from the spec file relative to the file's directory.
pub fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}
