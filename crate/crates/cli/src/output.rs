use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::error::CliError;

/// Writes artifacts into one directory, each stamped with the library version
/// and the scenario hash.
#[derive(Debug)]
pub struct OutputDir {
    dir: PathBuf,
    command: &'static str,
    sha256: String,
    written: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(dir: &Path, command: &'static str, sha256: &str) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            command,
            sha256: sha256.to_string(),
            written: Vec::new(),
        })
    }

    /// `# shvel <version> command=<cmd> scenario_sha256=<hex>`
    pub fn header_line(&self) -> String {
        format!(
            "# shvel {} command={} scenario_sha256={}",
            shvel::VERSION,
            self.command,
            self.sha256
        )
    }

    fn write_file(
        &mut self,
        name: &str,
        body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
    ) -> Result<(), CliError> {
        let path = self.dir.join(name);
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut w = BufWriter::new(file);
        body(&mut w)
            .and_then(|()| w.flush())
            .map_err(|e| CliError::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    /// CSV with the metadata line first; `body` writes the column header and rows.
    pub fn csv(
        &mut self,
        name: &str,
        body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
    ) -> Result<(), CliError> {
        let header = self.header_line();
        self.write_file(name, |w| {
            writeln!(w, "{header}")?;
            body(w)
        })
    }

    /// Pretty JSON object with `version`, `command` and `scenario_sha256` added.
    pub fn json(&mut self, name: &str, mut value: Value) -> Result<(), CliError> {
        value["version"] = Value::from(shvel::VERSION);
        value["command"] = Value::from(self.command);
        value["scenario_sha256"] = Value::from(self.sha256.clone());
        self.write_file(name, |w| {
            serde_json::to_writer_pretty(&mut *w, &value)?;
            writeln!(w)
        })
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    pub fn into_written(self) -> Vec<PathBuf> {
        self.written
    }
}
