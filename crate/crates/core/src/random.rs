//! Seeded sampling helpers shared by the randomized checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Basis, Octonion};
use crate::Scalar;

/// Deterministic generator for stream `stream` of a run seeded with `seed`.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Whether random coefficients are purely real or complex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarMode {
    Real,
    Complex,
}

pub fn scalar(rng: &mut impl Rng, mode: ScalarMode) -> Scalar {
    let re = rng.random_range(-1.0..=1.0);
    let im = match mode {
        ScalarMode::Real => 0.0,
        ScalarMode::Complex => rng.random_range(-1.0..=1.0),
    };
    Scalar::new(re, im)
}

/// Random octonion with every coefficient in `[-1, 1]` (per component).
pub fn octonion(rng: &mut impl Rng, basis: Basis, mode: ScalarMode) -> Octonion {
    Octonion::new(std::array::from_fn(|_| scalar(rng, mode)), basis)
}
