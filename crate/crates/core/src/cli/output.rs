//! Result files: JSON envelopes and commented CSV tables.

use std::fmt::Display;
use std::path::Path;

use serde::Serialize;

use super::config::ExperimentConfig;
use crate::error::{Error, Result};

/// A file produced by a subcommand, written only after the whole run succeeds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputFile {
    pub name: String,
    pub contents: String,
}

#[derive(Serialize)]
struct Envelope<'a, R> {
    config: &'a ExperimentConfig,
    result: &'a R,
}

/// Pretty JSON `{"config": …, "result": …}` with a trailing newline.
pub fn json_file<R: Serialize>(name: String, config: &ExperimentConfig, result: &R) -> OutputFile {
    let mut contents =
        serde_json::to_string_pretty(&Envelope { config, result }).expect("result serializes");
    contents.push('\n');
    OutputFile { name, contents }
}

/// CSV table whose first line carries the resolved configuration.
pub struct CsvWriter {
    name: String,
    contents: String,
}

impl CsvWriter {
    pub fn new(name: String, config: &ExperimentConfig, header: &[&str]) -> Self {
        let mut contents = format!("# config: {}\n", config.to_compact_json());
        contents.push_str(&header.join(","));
        contents.push('\n');
        CsvWriter { name, contents }
    }

    pub fn row(&mut self, fields: &[&dyn Display]) {
        for (i, f) in fields.iter().enumerate() {
            if i > 0 {
                self.contents.push(',');
            }
            self.contents.push_str(&f.to_string());
        }
        self.contents.push('\n');
    }

    pub fn finish(self) -> OutputFile {
        OutputFile {
            name: self.name,
            contents: self.contents,
        }
    }
}

/// Recovers the configuration embedded in a result file.
pub fn embedded_config(contents: &str) -> Result<ExperimentConfig> {
    if let Some(rest) = contents.strip_prefix("# config: ") {
        let line = rest.lines().next().unwrap_or_default();
        return ExperimentConfig::parse(line, "embedded config");
    }
    #[derive(serde::Deserialize)]
    struct Outer {
        config: ExperimentConfig,
    }
    let outer: Outer = serde_json::from_str(contents).map_err(|source| Error::Json {
        path: "embedded config".to_string(),
        source,
    })?;
    Ok(outer.config)
}

/// File-name fragments are restricted to ASCII letters, digits, `-`, `_` and `.`.
pub fn check_file_stem(field: &str, stem: &str) -> Result<()> {
    let ok = !stem.is_empty()
        && !stem.starts_with('.')
        && stem
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'));
    if ok {
        Ok(())
    } else {
        Err(Error::config(
            field,
            format!("{stem:?} is not a valid file name fragment"),
        ))
    }
}

pub fn write_all(dir: &Path, files: &[OutputFile]) -> Result<()> {
    let io = |path: &Path| {
        let path = path.display().to_string();
        move |source| Error::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    for f in files {
        let path = dir.join(&f.name);
        std::fs::write(&path, &f.contents).map_err(io(&path))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_carries_config_line() {
        let cfg = ExperimentConfig::default()
            .resolve(Some(3), Some(10))
            .unwrap();
        let mut w = CsvWriter::new("t.csv".into(), &cfg, &["a", "b"]);
        w.row(&[&0.1f64, &1u8]);
        let f = w.finish();
        assert_eq!(
            f.contents,
            "# config: {\"seed\":3,\"trials\":10}\na,b\n0.1,1\n"
        );
        assert_eq!(embedded_config(&f.contents).unwrap(), cfg);
    }

    #[test]
    fn json_envelope_round_trips_config() {
        let cfg = ExperimentConfig::default()
            .resolve(Some(3), Some(10))
            .unwrap();
        let f = json_file("r.json".into(), &cfg, &vec![1.5f64]);
        assert!(f.contents.ends_with("]\n}\n"));
        assert_eq!(embedded_config(&f.contents).unwrap(), cfg);
    }

    #[test]
    fn file_stems() {
        assert!(check_file_stem("label", "K2_M3").is_ok());
        assert!(check_file_stem("label", "../x").is_err());
        assert!(check_file_stem("label", "").is_err());
    }
}
