//! Output directories: the `.<dir>.lock` guard, file writes and the
//! `run.json` record.

use std::fs::{self, OpenOptions};
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};

use crate::error::{CliError, CliResult, Failure, OrFail};

pub const RUN_RECORD: &str = "run.json";

/// An output directory held exclusively for the lifetime of the value.
#[derive(Debug)]
pub struct OutDir {
    dir: PathBuf,
    lock: PathBuf,
}

impl OutDir {
    /// Creates `dir` if needed and takes the sibling lock file
    /// `.<name>.lock`. Fails if another run holds it.
    pub fn acquire(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir).or_fail_with(Failure::Runtime, || format!("creating {}", dir.display()))?;
        let abs = dir
            .canonicalize()
            .or_fail_with(Failure::Runtime, || format!("resolving {}", dir.display()))?;
        let name = abs
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "root".into());
        let lock = abs.parent().unwrap_or(&abs).join(format!(".{name}.lock"));
        match OpenOptions::new().write(true).create_new(true).open(&lock) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
            }
            Err(e) if e.kind() == ErrorKind::AlreadyExists => {
                return Err(CliError::msg(
                    Failure::Config,
                    format!(
                        "{} is locked by another run ({}); remove the lock file if no run is active",
                        dir.display(),
                        lock.display()
                    ),
                ))
            }
            Err(e) => return Err(CliError::new(Failure::Runtime, e)),
        }
        Ok(Self { dir: abs, lock })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    pub fn lock_path(&self) -> &Path {
        &self.lock
    }

    pub fn write(&self, name: &str, bytes: impl AsRef<[u8]>) -> CliResult<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).or_fail_with(Failure::Runtime, || format!("writing {}", path.display()))?;
        Ok(path)
    }

    /// Writes `run.json`: the command, its fully resolved configuration and
    /// the wall-clock time. The timestamp lives only in this file.
    pub fn write_record(&self, command: &str, config: Value) -> CliResult<()> {
        let now = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let record = json!({
            "command": command,
            "version": env!("CARGO_PKG_VERSION"),
            "unix_time": now,
            "config": config,
        });
        let text = serde_json::to_string_pretty(&record).expect("record serializes");
        self.write(RUN_RECORD, text + "\n")?;
        Ok(())
    }
}

impl Drop for OutDir {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.lock);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_holder_is_refused_until_release() {
        let tmp = tempfile::tempdir().unwrap();
        let dir = tmp.path().join("run");
        let a = OutDir::acquire(&dir).unwrap();
        assert!(tmp.path().join(".run.lock").exists());
        let err = OutDir::acquire(&dir).unwrap_err();
        assert_eq!(err.failure, Failure::Config);
        drop(a);
        assert!(!tmp.path().join(".run.lock").exists());
        OutDir::acquire(&dir).unwrap();
    }
}
