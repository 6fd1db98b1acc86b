//! Cross-check of brute-force crossing counts against the order expansion on
//! random instances.
//!
//! An instance is compared only when both sides are trustworthy: the brute
//! force succeeds with no crossing after the departure region, and every
//! form eigenvalue of the expansion is well above the fragility cutoff.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{random_instance, resonance_prediction, spectral_flow_bruteforce, RandomSpec, SpectralPath};

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct OracleSummary {
    pub instances: usize,
    pub compared: usize,
    pub agreed: usize,
    /// Indices of compared instances where the two counts differ.
    pub mismatches: Vec<usize>,
    pub brute_force_failed: usize,
    pub prediction_failed: usize,
    pub fragile: usize,
    pub interior_crossings: usize,
}

impl OracleSummary {
    pub fn all_agree(&self) -> bool {
        self.mismatches.is_empty() && self.agreed == self.compared
    }
}

pub fn run_oracle(seed: u64, count: usize, spec: &RandomSpec, depth: usize, samples: usize) -> OracleSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = OracleSummary { instances: count, ..Default::default() };
    for i in 0..count {
        let inst = random_instance(&mut rng, spec);
        let pred = match resonance_prediction(&inst.h0, &inst.p, depth) {
            Ok(p) => p,
            Err(_) => {
                s.prediction_failed += 1;
                continue;
            }
        };
        let path = SpectralPath::new(inst.h0, inst.p, samples).expect("generated instances are symmetric");
        let bf = match spectral_flow_bruteforce(&path) {
            Ok(b) => b,
            Err(_) => {
                s.brute_force_failed += 1;
                continue;
            }
        };
        if !pred.is_well_conditioned() {
            s.fragile += 1;
            continue;
        }
        if !bf.crossings.is_empty() {
            s.interior_crossings += 1;
            continue;
        }
        s.compared += 1;
        if bf.flow == pred.predicted_flow {
            s.agreed += 1;
        } else {
            s.mismatches.push(i);
        }
    }
    s
}
