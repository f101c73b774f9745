//! Report emission: stdout, or files under `--out` written through a temporary
//! file and an atomic rename.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::Failure;

/// Keys whose values vary between identical runs.
const CLOCK_KEYS: [&str; 3] = ["runtime_ms", "wall_clock_ms", "timestamp"];

#[derive(Clone, Debug, Default)]
pub struct Output {
    pub dir: Option<PathBuf>,
    pub timestamps: bool,
}

/// Writes `bytes` next to `path` under a temporary name, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

fn strip_clock(v: &mut Value) {
    match v {
        Value::Object(m) => {
            for k in CLOCK_KEYS {
                m.remove(k);
            }
            m.values_mut().for_each(strip_clock);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_clock),
        _ => {}
    }
}

impl Output {
    pub fn new(dir: Option<PathBuf>, timestamps: bool) -> Self {
        Output { dir, timestamps }
    }

    /// Pretty JSON of `value`, without clock fields unless timestamps are on.
    pub fn json_text(&self, value: &impl Serialize) -> Result<String, Failure> {
        let mut v = serde_json::to_value(value)?;
        if !self.timestamps {
            strip_clock(&mut v);
        }
        Ok(serde_json::to_string_pretty(&v)? + "\n")
    }

    pub fn json(&self, name: &str, value: &impl Serialize) -> Result<(), Failure> {
        let text = self.json_text(value)?;
        self.text(name, &text)
    }

    /// Writes `text` to `<dir>/<name>`, or prints it when no directory is set.
    pub fn text(&self, name: &str, text: &str) -> Result<(), Failure> {
        match &self.dir {
            Some(d) => Ok(write_atomic(&d.join(name), text.as_bytes())?),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    /// Seconds since the epoch when timestamps are on.
    pub fn timestamp(&self) -> Option<u64> {
        self.timestamps
            .then(|| std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clock_fields_are_stripped_at_every_depth() {
        let mut v = serde_json::json!({"value": 1.0, "runtime_ms": 3.0, "runs": [{"timestamp": 5, "x": 1}]});
        strip_clock(&mut v);
        assert_eq!(v, serde_json::json!({"value": 1.0, "runs": [{"x": 1}]}));
    }

    #[test]
    fn atomic_write_leaves_no_temporary_file() {
        let dir = std::env::temp_dir().join(format!("nlyoung-out-{}", std::process::id()));
        let p = dir.join("r.json");
        write_atomic(&p, b"{}").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "{}");
        let names: Vec<_> = fs::read_dir(&dir).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(names.len(), 1);
        fs::remove_dir_all(dir).unwrap();
    }
}
