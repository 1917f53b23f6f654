//! Deterministic offline test backend.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{prompt_digest, EmbeddingBackend, EMBEDDING_DIM};
use crate::error::Result;

pub const HASH_MODEL_ID: &str = "hash-v1";

/// Seeds a counter-based generator from the prompt digest, emits 3072
/// standard-normal reals, scales to unit Euclidean norm. Identical on every
/// machine by construction.
#[derive(Debug, Clone, Default)]
pub struct HashBackend;

impl HashBackend {
    pub fn raw_stream(model_id: &str, prompt_text: &str) -> Vec<f64> {
        let digest = prompt_digest(model_id, prompt_text);
        let mut rng = ChaCha8Rng::from_seed(digest);
        let mut values: Vec<f64> = (0..EMBEDDING_DIM)
            .map(|_| standard_normal(&mut rng))
            .collect();
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            for v in &mut values {
                *v /= norm;
            }
        }
        values
    }
}

impl EmbeddingBackend for HashBackend {
    fn model_id(&self) -> &str {
        HASH_MODEL_ID
    }

    fn embed(&self, prompt_text: &str) -> Result<Vec<f64>> {
        Ok(HashBackend::raw_stream(HASH_MODEL_ID, prompt_text))
    }
}

/// Box-Muller on the raw stream; avoids depending on sampler internals of
/// any particular rand_distr version.
fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_across_instances() {
        let a = HashBackend.embed("some prompt").unwrap();
        let b = HashBackend.embed("some prompt").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unit_norm() {
        for text in ["x", "", "a much longer prompt with numbers 1 2 3"] {
            let v = HashBackend.embed(text).unwrap();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-6, "norm {norm} for {text:?}");
        }
    }

    #[test]
    fn different_prompts_differ() {
        let a = HashBackend.embed("a").unwrap();
        let b = HashBackend.embed("b").unwrap();
        assert_ne!(a, b);
    }
}
