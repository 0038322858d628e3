use std::fs;
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::request::ChatRequest;

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Entry {
    key: String,
    request: ChatRequest,
    text: String,
}

/// Content-addressed response store: `<root>/<provider>/<key[..2]>/<key>.json`.
///
/// Entries are written once through a temporary file and a hard link, so a
/// reader never sees a partial file and an existing entry is never replaced.
#[derive(Debug, Clone)]
pub struct ResponseCache {
    root: PathBuf,
}

fn sanitize(provider: &str) -> String {
    provider
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || "._-".contains(c) { c } else { '_' })
        .collect()
}

impl ResponseCache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        ResponseCache { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn path(&self, provider: &str, key: &str) -> PathBuf {
        self.root.join(sanitize(provider)).join(&key[..2]).join(format!("{key}.json"))
    }

    /// Cached text, or `None` when absent or unreadable.
    pub fn get(&self, provider: &str, req: &ChatRequest) -> Option<String> {
        let key = req.cache_key();
        let bytes = fs::read(self.path(provider, &key)).ok()?;
        let entry: Entry = serde_json::from_slice(&bytes).ok()?;
        (entry.key == key).then_some(entry.text)
    }

    pub fn put(&self, provider: &str, req: &ChatRequest, text: &str) -> std::io::Result<()> {
        let key = req.cache_key();
        let path = self.path(provider, &key);
        if path.exists() {
            return Ok(());
        }
        let dir = path.parent().expect("entry has a parent directory");
        fs::create_dir_all(dir)?;
        let tmp = dir.join(format!(
            ".{key}.{}.{}.tmp",
            std::process::id(),
            TMP_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        let entry = Entry { key, request: req.clone(), text: text.to_string() };
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&serde_json::to_vec(&entry).map_err(std::io::Error::from)?)?;
            f.sync_all()?;
        }
        let linked = fs::hard_link(&tmp, &path);
        fs::remove_file(&tmp)?;
        match linked {
            Err(e) if e.kind() != ErrorKind::AlreadyExists => Err(e),
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nestbench_core::prompt::ChatMessage;

    fn req(model: &str) -> ChatRequest {
        ChatRequest {
            model: model.into(),
            messages: vec![ChatMessage::user("Q: 1")],
            temperature: 0.0,
            sample_index: 0,
            max_output_tokens: 64,
        }
    }

    #[test]
    fn put_then_get_and_never_overwrite() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ResponseCache::new(dir.path());
        assert_eq!(cache.get("p", &req("a")), None);
        cache.put("p", &req("a"), "first").unwrap();
        cache.put("p", &req("a"), "second").unwrap();
        assert_eq!(cache.get("p", &req("a")).as_deref(), Some("first"));
        assert_eq!(cache.get("p", &req("b")), None);
        assert_eq!(cache.get("other", &req("a")), None);
    }

    #[test]
    fn provider_names_are_path_safe() {
        assert_eq!(sanitize("mock:noisy:0.4:7"), "mock_noisy_0.4_7");
        assert_eq!(sanitize("../x"), ".._x");
    }
}
