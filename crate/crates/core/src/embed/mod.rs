//! Prompt embedding: pluggable backends behind a persistent
//! content-addressed cache.
//!
//! Every backend maps prompt text to exactly 3072 finite reals. The `hash`
//! backend is a deterministic offline stand-in, the `numeric` backend
//! additionally preserves the numbers in the prompt (so learnability tests
//! have signal to find), and the `http` backend talks to a real embedding
//! service.

pub mod cache;
pub mod hash;
pub mod http;
pub mod numeric;

pub use cache::{embed_cached, EmbeddingCache};
pub use hash::HashBackend;
pub use http::HttpBackend;
pub use numeric::NumericBackend;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Dimension of every embedding vector.
pub const EMBEDDING_DIM: usize = 3072;

/// A 3072-dimensional embedding of one prompt.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector {
    pub values: Vec<f64>,
    pub model_id: String,
    pub prompt_digest: [u8; 32],
}

impl EmbeddingVector {
    pub fn new(values: Vec<f64>, model_id: String, prompt_digest: [u8; 32]) -> Result<Self> {
        validate_values(&values).map_err(|message| Error::Embedding {
            key: hex(&prompt_digest),
            message,
        })?;
        Ok(EmbeddingVector {
            values,
            model_id,
            prompt_digest,
        })
    }
}

pub(crate) fn validate_values(values: &[f64]) -> std::result::Result<(), String> {
    if values.len() != EMBEDDING_DIM {
        return Err(format!(
            "embedding has {} values, expected {EMBEDDING_DIM}",
            values.len()
        ));
    }
    if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(format!("embedding value {i} is not finite ({v})"));
    }
    Ok(())
}

/// Content digest keying the cache: hash(model_id || prompt text).
pub fn prompt_digest(model_id: &str, prompt_text: &str) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update(model_id.as_bytes());
    hasher.update([0x1f]);
    hasher.update(prompt_text.as_bytes());
    hasher.finalize().into()
}

pub fn hex(digest: &[u8]) -> String {
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// An embedding backend: same prompt, same vector, within one instance.
pub trait EmbeddingBackend: Send + Sync {
    fn model_id(&self) -> &str;

    /// Embed one prompt into exactly [`EMBEDDING_DIM`] finite reals.
    fn embed(&self, prompt_text: &str) -> Result<Vec<f64>>;

    /// Upper bound on concurrent `embed` calls workers should issue.
    fn parallelism_limit(&self) -> usize {
        8
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_separates_neighbouring_prompts() {
        let a = prompt_digest("m", "roads: 102");
        let b = prompt_digest("m", "roads: 103");
        assert_ne!(a, b);
        // model id participates in the key
        let c = prompt_digest("m2", "roads: 102");
        assert_ne!(a, c);
        // the separator prevents (model ++ text) ambiguity
        let d = prompt_digest("mr", "oads: 102");
        assert_ne!(a, d);
    }

    #[test]
    fn wrong_length_rejected() {
        let err = EmbeddingVector::new(vec![0.0; 10], "m".into(), [0; 32]);
        assert!(err.is_err());
    }

    #[test]
    fn non_finite_rejected() {
        let mut v = vec![0.0; EMBEDDING_DIM];
        v[100] = f64::NAN;
        assert!(EmbeddingVector::new(v, "m".into(), [0; 32]).is_err());
    }
}
