//! Information-preserving offline backend.

use regex::Regex;
use std::sync::OnceLock;

use super::hash::{HashBackend, HASH_MODEL_ID};
use super::{EmbeddingBackend, EMBEDDING_DIM};
use crate::error::Result;

pub const NUMERIC_MODEL_ID: &str = "numeric-v1";

/// Extracts every numeric token from the prompt in textual order, applies
/// `log(1 + |x|) * sign(x)`, and writes them into the leading dimensions.
/// Remaining dimensions carry the hash backend's stream, whose unit-norm
/// scaling keeps them small next to the encoded numbers.
///
/// A pure hash of the prompt destroys the information the prompt carries;
/// this backend keeps it recoverable so end-to-end learnability tests have
/// something to learn.
#[derive(Debug, Clone, Default)]
pub struct NumericBackend;

fn number_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"-?[0-9]+(?:\.[0-9]+)?").unwrap())
}

impl NumericBackend {
    /// The numeric tokens of a prompt, in textual order.
    pub fn extract_numbers(text: &str) -> Vec<f64> {
        number_pattern()
            .find_iter(text)
            .filter_map(|m| m.as_str().parse::<f64>().ok())
            .collect()
    }
}

impl EmbeddingBackend for NumericBackend {
    fn model_id(&self) -> &str {
        NUMERIC_MODEL_ID
    }

    fn embed(&self, prompt_text: &str) -> Result<Vec<f64>> {
        // fill dims >= k with the plain hash stream of the same prompt
        let mut values = HashBackend::raw_stream(HASH_MODEL_ID, prompt_text);
        for (i, x) in NumericBackend::extract_numbers(prompt_text)
            .into_iter()
            .take(EMBEDDING_DIM)
            .enumerate()
        {
            values[i] = x.abs().ln_1p() * x.signum();
        }
        Ok(values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_number_lands_in_dim0() {
        let v = NumericBackend.embed("roads: 102").unwrap();
        assert!((v[0] - 103f64.ln()).abs() < 1e-12, "dim0 = {}", v[0]);
        // remaining dims come from the hash stream
        let h = HashBackend.embed("roads: 102").unwrap();
        assert_eq!(&v[1..], &h[1..]);
    }

    #[test]
    fn no_numbers_equals_hash_output() {
        let v = NumericBackend.embed("no digits here").unwrap();
        let h = HashBackend.embed("no digits here").unwrap();
        assert_eq!(v, h);
    }

    #[test]
    fn reordering_lines_swaps_leading_dims() {
        let a = NumericBackend.embed("x: 10\ny: 20").unwrap();
        let b = NumericBackend.embed("y: 20\nx: 10").unwrap();
        assert_eq!(a[0], b[1]);
        assert_eq!(a[1], b[0]);
    }

    #[test]
    fn negative_numbers_keep_sign() {
        let v = NumericBackend.embed("delta: -5").unwrap();
        assert!((v[0] + 6f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn extraction_order_is_textual() {
        let nums = NumericBackend::extract_numbers("a 1.5 b -2 c 30");
        assert_eq!(nums, vec![1.5, -2.0, 30.0]);
    }
}
