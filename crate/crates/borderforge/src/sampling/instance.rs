use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    backward_transform, border_basis_from_points, sample_order_ideal, sample_points, verify_ideal_equality,
    IdealEquality,
};
use crate::algebra::{FieldElement, Polynomial, Ring, TermOrder};
use crate::bba::{BbaConfig, BorderBasis};
use crate::error::{Error, Result};
use crate::orderideal::OrderIdeal;

const POINT_RETRIES: usize = 50;
const IDEAL_RETRIES: usize = 1000;
const TRANSFORM_RETRIES: usize = 20;

/// Parameters of a random zero-dimensional system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct InstanceConfig {
    pub p: u64,
    pub n: usize,
    /// Bound on the degree of the border basis; the order ideal is cut to
    /// degree `max_degree - 1`.
    pub max_degree: u32,
    /// Per-variable caps for the order ideal sampler; defaults to
    /// `max_degree - 1` everywhere.
    pub degree_caps: Option<Vec<u32>>,
    /// Rows of the transform; defaults to n + 1.
    pub transform_rows: Option<usize>,
    pub transform_degree: u32,
    pub transform_terms: usize,
    pub order: TermOrder,
    /// Redraw the transform until F generates the same ideal as G.
    pub require_equal: bool,
}

impl Default for InstanceConfig {
    fn default() -> InstanceConfig {
        InstanceConfig {
            p: 31,
            n: 3,
            max_degree: 2,
            degree_caps: None,
            transform_rows: None,
            transform_degree: 1,
            transform_terms: 10,
            order: TermOrder::DegRevLex,
            require_equal: true,
        }
    }
}

impl InstanceConfig {
    pub fn ring(&self) -> Result<Ring> {
        Ring::new(self.p, self.n, self.order)
    }

    pub fn rows(&self) -> usize {
        self.transform_rows.unwrap_or(self.n + 1)
    }
}

/// A vanishing-ideal border basis together with a transformed generator set.
#[derive(Clone, Debug)]
pub struct Instance {
    pub seed: u64,
    pub points: Vec<Vec<FieldElement>>,
    pub border_basis: BorderBasis,
    pub inputs: Vec<Polynomial>,
}

impl Instance {
    pub fn order_ideal(&self) -> &OrderIdeal {
        self.border_basis.order_ideal()
    }

    /// `{seed, order_ideal_corners, points, border_basis, F}`.
    pub fn to_record(&self, ring: &Ring) -> serde_json::Value {
        let f: Vec<Vec<(FieldElement, crate::algebra::Term)>> =
            self.inputs.iter().map(|g| g.terms().iter().map(|&(t, c)| (c, t)).collect()).collect();
        serde_json::json!({
            "seed": self.seed,
            "order_ideal_corners": self.order_ideal().corners(ring),
            "points": self.points,
            "border_basis": self.border_basis.to_json(),
            "F": f,
        })
    }
}

/// Seed of the `index`-th sample under `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Samples O, then points until O(P) is invertible, then F = A G.
pub fn generate_instance(config: &InstanceConfig, seed: u64) -> Result<Instance> {
    let ring = config.ring()?;
    if config.max_degree == 0 {
        return Err(Error::InvalidConfig("max_degree must be at least 1".into()));
    }
    let caps = config.degree_caps.clone().unwrap_or_else(|| vec![config.max_degree - 1; config.n]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..IDEAL_RETRIES {
        let sampled = sample_order_ideal(&ring, &caps, None, &mut rng)?;
        let o = OrderIdeal::new(
            &ring,
            sampled.ideal.terms().iter().copied().filter(|t| t.degree() < config.max_degree),
        )?;
        for _ in 0..POINT_RETRIES {
            let points = match sample_points(&ring, o.len(), &mut rng) {
                Ok(p) => p,
                Err(Error::TooManyPoints { .. }) => break,
                Err(e) => return Err(e),
            };
            match border_basis_from_points(&ring, &o, &points) {
                Ok(bb) => {
                    for _ in 0..TRANSFORM_RETRIES {
                        let inputs = backward_transform(
                            &ring,
                            &bb,
                            config.rows(),
                            config.transform_degree,
                            config.transform_terms,
                            &mut rng,
                        )?;
                        if !config.require_equal
                            || verify_ideal_equality(&ring, &inputs, &bb, &BbaConfig::default())? == IdealEquality::Equal
                        {
                            return Ok(Instance { seed, points, border_basis: bb, inputs });
                        }
                    }
                    break;
                }
                Err(Error::RankDeficient) => continue,
                Err(e) => return Err(e),
            }
        }
    }
    Err(Error::RankDeficient)
}
