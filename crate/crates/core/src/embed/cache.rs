//! Persistent content-addressed embedding cache.
//!
//! One file per key: a small header (model id, dimension, creation time)
//! followed by 3072 little-endian f32 values. Writers go through a
//! temporary file and an atomic rename, so concurrent workers over disjoint
//! prompts never corrupt the store, and concurrent writers of the same key
//! simply race to install identical bytes.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::prompt::Prompt;

use super::{hex, prompt_digest, validate_values, EmbeddingBackend, EmbeddingVector, EMBEDDING_DIM};

const MAGIC: &[u8; 8] = b"DCEMBED1";
const RETRIES: usize = 3;

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

/// Handle to a cache directory.
#[derive(Debug, Clone)]
pub struct EmbeddingCache {
    dir: PathBuf,
}

impl EmbeddingCache {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(EmbeddingCache { dir })
    }

    pub fn path_for(&self, digest: &[u8; 32]) -> PathBuf {
        self.dir.join(format!("{}.emb", hex(digest)))
    }

    pub fn contains(&self, digest: &[u8; 32]) -> bool {
        self.path_for(digest).exists()
    }

    /// Number of entries currently stored.
    pub fn len(&self) -> Result<usize> {
        let mut n = 0;
        for entry in std::fs::read_dir(&self.dir).map_err(|e| Error::io(&self.dir, e))? {
            let entry = entry.map_err(|e| Error::io(&self.dir, e))?;
            if entry.path().extension().is_some_and(|e| e == "emb") {
                n += 1;
            }
        }
        Ok(n)
    }

    pub fn is_empty(&self) -> Result<bool> {
        Ok(self.len()? == 0)
    }

    fn read(&self, digest: &[u8; 32]) -> Result<Option<Vec<f64>>> {
        let path = self.path_for(digest);
        let bytes = match std::fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(Error::io(&path, e)),
        };
        match parse_entry(&bytes) {
            Ok(values) => Ok(Some(values)),
            Err(msg) => {
                log::warn!("corrupt cache entry {}: {msg}; treating as miss", path.display());
                Ok(None)
            }
        }
    }

    fn write(&self, digest: &[u8; 32], model_id: &str, values: &[f64]) -> Result<()> {
        let path = self.path_for(digest);
        let tmp = self.dir.join(format!(
            ".tmp-{}-{}",
            std::process::id(),
            TMP_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        {
            let mut f = std::fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
            let mut buf = Vec::with_capacity(8 + 4 + model_id.len() + 4 + 8 + 4 * EMBEDDING_DIM);
            buf.extend_from_slice(MAGIC);
            buf.extend_from_slice(&(model_id.len() as u32).to_le_bytes());
            buf.extend_from_slice(model_id.as_bytes());
            buf.extend_from_slice(&(EMBEDDING_DIM as u32).to_le_bytes());
            let created = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            buf.extend_from_slice(&created.to_le_bytes());
            for v in values {
                buf.extend_from_slice(&(*v as f32).to_le_bytes());
            }
            f.write_all(&buf).map_err(|e| Error::io(&tmp, e))?;
            f.flush().map_err(|e| Error::io(&tmp, e))?;
        }
        std::fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))?;
        Ok(())
    }
}

fn parse_entry(bytes: &[u8]) -> std::result::Result<Vec<f64>, String> {
    let mut cursor = std::io::Cursor::new(bytes);
    let mut magic = [0u8; 8];
    cursor.read_exact(&mut magic).map_err(|_| "truncated magic".to_string())?;
    if &magic != MAGIC {
        return Err("bad magic".into());
    }
    let mut len4 = [0u8; 4];
    cursor.read_exact(&mut len4).map_err(|_| "truncated header".to_string())?;
    let id_len = u32::from_le_bytes(len4) as usize;
    let mut id = vec![0u8; id_len];
    cursor.read_exact(&mut id).map_err(|_| "truncated model id".to_string())?;
    cursor.read_exact(&mut len4).map_err(|_| "truncated dim".to_string())?;
    let dim = u32::from_le_bytes(len4) as usize;
    if dim != EMBEDDING_DIM {
        return Err(format!("dimension {dim} != {EMBEDDING_DIM}"));
    }
    let mut created = [0u8; 8];
    cursor.read_exact(&mut created).map_err(|_| "truncated timestamp".to_string())?;
    let mut values = Vec::with_capacity(dim);
    let mut f4 = [0u8; 4];
    for _ in 0..dim {
        cursor.read_exact(&mut f4).map_err(|_| "truncated payload".to_string())?;
        values.push(f32::from_le_bytes(f4) as f64);
    }
    if cursor.position() != bytes.len() as u64 {
        return Err("trailing bytes".into());
    }
    validate_values(&values)?;
    Ok(values)
}

/// Embed via the cache: hits never invoke the backend; misses invoke it
/// (with bounded retries), persist atomically, and return the stored
/// values.
///
/// Returned values always round-trip through the f32 payload encoding, so a
/// miss and every later hit yield bit-identical vectors.
pub fn embed_cached(
    prompt: &Prompt,
    backend: &dyn EmbeddingBackend,
    cache: &EmbeddingCache,
) -> Result<EmbeddingVector> {
    let digest = prompt_digest(backend.model_id(), &prompt.text);
    if let Some(values) = cache.read(&digest)? {
        return EmbeddingVector::new(values, backend.model_id().to_string(), digest);
    }

    let mut last_err = None;
    for _ in 0..RETRIES {
        match backend.embed(&prompt.text) {
            Ok(values) => {
                validate_values(&values).map_err(|message| Error::Embedding {
                    key: hex(&digest),
                    message,
                })?;
                let rounded: Vec<f64> = values.iter().map(|v| *v as f32 as f64).collect();
                cache.write(&digest, backend.model_id(), &rounded)?;
                return EmbeddingVector::new(rounded, backend.model_id().to_string(), digest);
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(Error::Embedding {
        key: hex(&digest),
        message: format!(
            "backend failed after {RETRIES} attempts: {}",
            last_err.expect("at least one attempt")
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::HashBackend;
    use crate::prompt::PromptKind;
    use crate::types::{MonthIndex, RegionId};
    use std::sync::atomic::AtomicUsize;
    use std::sync::Arc;

    fn prompt(text: &str) -> Prompt {
        Prompt {
            kind: PromptKind::Accessibility,
            region: RegionId::new("D001").unwrap(),
            month: MonthIndex(0),
            text: text.to_string(),
        }
    }

    /// Wraps a backend and counts embed invocations.
    struct Counting<B> {
        inner: B,
        calls: Arc<AtomicUsize>,
    }

    impl<B: EmbeddingBackend> EmbeddingBackend for Counting<B> {
        fn model_id(&self) -> &str {
            self.inner.model_id()
        }
        fn embed(&self, text: &str) -> Result<Vec<f64>> {
            self.calls.fetch_add(1, Ordering::SeqCst);
            self.inner.embed(text)
        }
    }

    #[test]
    fn hit_skips_backend_and_reproduces_vector() {
        let dir = tempfile::tempdir().unwrap();
        let cache = EmbeddingCache::open(dir.path()).unwrap();
        let calls = Arc::new(AtomicUsize::new(0));
        let backend = Counting {
            inner: HashBackend,
            calls: calls.clone(),
        };
        let p = prompt("first");
        let a = embed_cached(&p, &backend, &cache).unwrap();
        assert_eq!(calls.load(Ordering::SeqCst), 1);
        let b = embed_cached(&p, &backend, &cache).unwrap();
        assert_eq!(calls.load(Ordering::SeqCst), 1, "hit must not invoke backend");
        assert_eq!(a, b);
    }

    #[test]
    fn one_character_difference_changes_key() {
        let dir = tempfile::tempdir().unwrap();
        let cache = EmbeddingCache::open(dir.path()).unwrap();
        let a = embed_cached(&prompt("abc"), &HashBackend, &cache).unwrap();
        let b = embed_cached(&prompt("abd"), &HashBackend, &cache).unwrap();
        assert_ne!(a.prompt_digest, b.prompt_digest);
        assert_eq!(cache.len().unwrap(), 2);
    }

    #[test]
    fn wrong_length_backend_rejected() {
        struct Short;
        impl EmbeddingBackend for Short {
            fn model_id(&self) -> &str {
                "short"
            }
            fn embed(&self, _: &str) -> Result<Vec<f64>> {
                Ok(vec![1.0; 10])
            }
        }
        let dir = tempfile::tempdir().unwrap();
        let cache = EmbeddingCache::open(dir.path()).unwrap();
        assert!(embed_cached(&prompt("x"), &Short, &cache).is_err());
    }

    #[test]
    fn corrupt_entry_treated_as_miss() {
        let dir = tempfile::tempdir().unwrap();
        let cache = EmbeddingCache::open(dir.path()).unwrap();
        let p = prompt("payload");
        let a = embed_cached(&p, &HashBackend, &cache).unwrap();
        std::fs::write(cache.path_for(&a.prompt_digest), b"garbage").unwrap();
        let b = embed_cached(&p, &HashBackend, &cache).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn failing_backend_reports_key_after_retries() {
        struct Failing {
            calls: Arc<AtomicUsize>,
        }
        impl EmbeddingBackend for Failing {
            fn model_id(&self) -> &str {
                "failing"
            }
            fn embed(&self, _: &str) -> Result<Vec<f64>> {
                self.calls.fetch_add(1, Ordering::SeqCst);
                Err(Error::Embedding {
                    key: "?".into(),
                    message: "boom".into(),
                })
            }
        }
        let dir = tempfile::tempdir().unwrap();
        let cache = EmbeddingCache::open(dir.path()).unwrap();
        let calls = Arc::new(AtomicUsize::new(0));
        let err = embed_cached(&prompt("x"), &Failing { calls: calls.clone() }, &cache);
        assert!(err.is_err());
        assert_eq!(calls.load(Ordering::SeqCst), RETRIES);
    }
}
