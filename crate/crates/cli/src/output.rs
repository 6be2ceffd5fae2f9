use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult};

/// Output directory that refuses to clobber the run's input file.
pub struct OutDir {
    root: PathBuf,
    protected: Option<PathBuf>,
    written: Vec<PathBuf>,
}

impl OutDir {
    pub fn create(root: PathBuf, input: Option<&Path>) -> CliResult<Self> {
        fs::create_dir_all(&root).map_err(|e| CliError::io(&root, e))?;
        let protected = input.and_then(|p| fs::canonicalize(p).ok());
        Ok(Self {
            root,
            protected,
            written: Vec::new(),
        })
    }

    /// Writes to a sibling temp file, then renames over the target.
    pub fn write(&mut self, name: &str, contents: &[u8]) -> CliResult<PathBuf> {
        let path = self.root.join(name);
        if let (Some(input), Ok(dir)) = (&self.protected, fs::canonicalize(&self.root)) {
            if dir.join(name) == *input {
                return Err(CliError::PathConflict(input.clone()));
            }
        }
        let tmp = self.root.join(format!(".{name}.{}.tmp", std::process::id()));
        let result = fs::File::create(&tmp)
            .and_then(|mut f| f.write_all(contents).and_then(|_| f.sync_all()))
            .and_then(|_| fs::rename(&tmp, &path));
        if let Err(e) = result {
            let _ = fs::remove_file(&tmp);
            return Err(CliError::io(&path, e));
        }
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> CliResult<PathBuf> {
        let mut text = serde_json::to_string_pretty(value).expect("serializable");
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    pub fn written(&self) -> Vec<String> {
        self.written
            .iter()
            .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect()
    }
}

pub fn read_input(path: &Path) -> CliResult<mfvmd::Signal> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(mfvmd::csv::read_signal(&text)?)
}
