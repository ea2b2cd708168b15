//! Rasterization of DOT sources through an external Graphviz-compatible
//! binary, with a content-addressed PNG cache. Distinct sources render in
//! parallel; identical sources are single-flighted.

use std::collections::HashMap;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::sync::{Arc, Mutex};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub struct Rasterizer {
    renderer_path: String,
    cache_dir: PathBuf,
    inflight: Mutex<HashMap<String, Arc<Mutex<()>>>>,
}

impl Rasterizer {
    pub fn new(renderer_path: impl Into<String>, cache_dir: impl Into<PathBuf>) -> Rasterizer {
        Rasterizer {
            renderer_path: renderer_path.into(),
            cache_dir: cache_dir.into(),
            inflight: Mutex::new(HashMap::new()),
        }
    }

    /// Renders `dot_source` to PNG with the layout engine declared in the
    /// source, serving repeated sources from the cache.
    pub fn rasterize(&self, dot_source: &str) -> Result<Vec<u8>> {
        let engine = declared_engine(dot_source);
        let hash = hex_digest(dot_source);
        let cached = self.cache_dir.join(format!("{hash}.png"));
        if let Ok(bytes) = std::fs::read(&cached) {
            return Ok(bytes);
        }

        let lock = {
            let mut map = self.inflight.lock().unwrap();
            Arc::clone(map.entry(hash.clone()).or_default())
        };
        let _guard = lock.lock().unwrap();
        // Another thread may have completed the render while we waited.
        if let Ok(bytes) = std::fs::read(&cached) {
            return Ok(bytes);
        }

        let bytes = self.invoke(dot_source, engine)?;
        std::fs::create_dir_all(&self.cache_dir)?;
        std::fs::write(&cached, &bytes)?;
        Ok(bytes)
    }

    fn invoke(&self, dot_source: &str, engine: &str) -> Result<Vec<u8>> {
        let mut child = Command::new(&self.renderer_path)
            .args(["-K", engine, "-Tpng"])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| {
                if e.kind() == std::io::ErrorKind::NotFound {
                    Error::RendererMissing(self.renderer_path.clone())
                } else {
                    Error::Io(e)
                }
            })?;
        // A child that exits before draining stdin yields EPIPE here; its
        // exit status below is the authoritative signal.
        match child.stdin.take().expect("piped stdin").write_all(dot_source.as_bytes()) {
            Ok(()) => {}
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
            Err(e) => return Err(e.into()),
        }
        let output = child.wait_with_output()?;
        if !output.status.success() {
            return Err(Error::RenderFailed {
                stderr: String::from_utf8_lossy(&output.stderr).into_owned(),
            });
        }
        Ok(output.stdout)
    }
}

fn declared_engine(dot_source: &str) -> &str {
    for line in dot_source.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("layout=") {
            return rest.trim_matches(|c| c == '"' || c == ';').trim_matches('"');
        }
    }
    "dot"
}

fn hex_digest(s: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(s.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_renderer_reported() {
        let dir = tempfile::tempdir().unwrap();
        let r = Rasterizer::new("definitely-not-a-renderer-binary", dir.path());
        match r.rasterize("graph G {}") {
            Err(Error::RendererMissing(name)) => {
                assert_eq!(name, "definitely-not-a-renderer-binary")
            }
            other => panic!("expected RendererMissing, got {other:?}"),
        }
    }

    #[cfg(unix)]
    fn stub_renderer(dir: &std::path::Path, body: &str) -> String {
        use std::os::unix::fs::PermissionsExt;
        let path = dir.join("stub-dot");
        std::fs::write(&path, format!("#!/bin/sh\n{body}\n")).unwrap();
        std::fs::set_permissions(&path, std::fs::Permissions::from_mode(0o755)).unwrap();
        path.to_string_lossy().into_owned()
    }

    #[cfg(unix)]
    #[test]
    fn renders_and_caches() {
        let dir = tempfile::tempdir().unwrap();
        let counter = dir.path().join("count");
        // Stub emits PNG magic bytes and counts invocations.
        let stub = stub_renderer(
            dir.path(),
            &format!(
                "echo run >> {}\nprintf '\\211PNG\\r\\n\\032\\n'",
                counter.display()
            ),
        );
        let r = Rasterizer::new(stub, dir.path().join("cache"));
        let src = "graph G {\n    layout=\"neato\";\n    0;\n}\n";
        let first = r.rasterize(src).unwrap();
        assert_eq!(&first[..4], b"\x89PNG");
        let second = r.rasterize(src).unwrap();
        assert_eq!(first, second);
        let runs = std::fs::read_to_string(&counter).unwrap();
        assert_eq!(runs.lines().count(), 1, "second call must hit the cache");
    }

    #[cfg(unix)]
    #[test]
    fn render_failure_carries_stderr() {
        let dir = tempfile::tempdir().unwrap();
        let stub = stub_renderer(dir.path(), "echo 'syntax error' >&2\nexit 1");
        let r = Rasterizer::new(stub, dir.path().join("cache"));
        match r.rasterize("not dot at all") {
            Err(Error::RenderFailed { stderr }) => assert!(stderr.contains("syntax error")),
            other => panic!("expected RenderFailed, got {other:?}"),
        }
    }

    #[test]
    fn engine_declaration_parsed() {
        assert_eq!(declared_engine("graph G {\n    layout=\"sfdp\";\n}"), "sfdp");
        assert_eq!(declared_engine("graph G {}"), "dot");
    }
}
