use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::schema::Schema;
use super::{ExperimentConfig, RunError};

/// Rows for one CSV file, held in memory until the run has finished.
#[derive(Debug, Clone)]
pub struct Table {
    pub schema: &'static Schema,
    pub file: String,
    pub records: Vec<Vec<String>>,
}

/// Header and values of `row` as the csv serializer writes them.
fn flat_record<T: Serialize>(row: &T) -> (Vec<String>, Vec<String>) {
    let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(Vec::new());
    w.serialize(row).expect("row serializes");
    let bytes = w.into_inner().expect("in-memory writer");
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(&bytes[..]);
    let mut lines = r.records().map(|x| x.expect("csv round trip"));
    let header = lines.next().expect("header").iter().map(String::from).collect();
    let values = lines.next().expect("record").iter().map(String::from).collect();
    (header, values)
}

impl Table {
    pub fn new(schema: &'static Schema) -> Self {
        Self {
            schema,
            file: String::new(),
            records: Vec::new(),
        }
    }

    pub fn named(mut self, file: &str) -> Self {
        self.file = file.to_string();
        self
    }

    pub fn push<T: Serialize>(&mut self, row: &T) {
        self.push_with(&[], row);
    }

    /// Appends `prefix` values ahead of the serialized row. Panics if the
    /// resulting columns differ from the schema, since that is a bug in the
    /// runner rather than bad input.
    pub fn push_with<T: Serialize>(&mut self, prefix: &[String], row: &T) {
        let (header, values) = flat_record(row);
        let cols = &self.schema.columns[1 + prefix.len()..];
        assert_eq!(header, cols, "columns of {} drifted from the registry", self.schema.tag);
        let mut rec = Vec::with_capacity(self.schema.columns.len());
        rec.push(self.schema.tag.to_string());
        rec.extend(prefix.iter().cloned());
        rec.extend(values);
        self.records.push(rec);
    }

    pub fn to_csv_bytes(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.schema.columns).expect("in-memory write");
        for r in &self.records {
            w.write_record(r).expect("in-memory write");
        }
        w.into_inner().expect("in-memory writer")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub file: String,
    pub schema: String,
    pub rows: usize,
}

/// Run record written next to the CSV files. Together with the tool
/// version, `config` is enough to regenerate every CSV byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub kind: String,
    pub master_seed: u64,
    pub config: ExperimentConfig,
    pub outputs: Vec<OutputFile>,
    pub verification_failures: usize,
    pub wall_time_seconds: f64,
}

pub const MANIFEST_FILE: &str = "manifest.json";

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("partial");
    let res = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if res.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    res
}

/// Writes every table and the manifest; on failure removes whatever this
/// call already wrote.
pub(super) fn write_all(
    dir: &Path,
    tables: &[Table],
    config: ExperimentConfig,
    seed: u64,
    wall_time_seconds: f64,
    verification_failures: usize,
) -> Result<Manifest, RunError> {
    fs::create_dir_all(dir)?;
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        kind: config.kind.name().to_string(),
        master_seed: seed,
        config,
        outputs: tables
            .iter()
            .map(|t| OutputFile {
                file: t.file.clone(),
                schema: t.schema.tag.to_string(),
                rows: t.records.len(),
            })
            .collect(),
        verification_failures,
        wall_time_seconds,
    };
    let mut written: Vec<PathBuf> = Vec::new();
    let mut attempt = || -> std::io::Result<()> {
        for t in tables {
            let path = dir.join(&t.file);
            write_atomic(&path, &t.to_csv_bytes())?;
            written.push(path);
        }
        let path = dir.join(MANIFEST_FILE);
        let json = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
        write_atomic(&path, &json)?;
        written.push(path);
        Ok(())
    };
    if let Err(e) = attempt() {
        for p in &written {
            let _ = fs::remove_file(p);
        }
        return Err(e.into());
    }
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::schema;

    #[derive(Serialize)]
    struct Sel {
        check: &'static str,
        size: usize,
        cases: u64,
        expected: u64,
        observed: u64,
        pass: bool,
    }

    #[test]
    fn push_checks_columns() {
        let mut t = Table::new(&schema::PATHS_SELFTEST).named("x.csv");
        let row = Sel {
            check: "a,b",
            size: 1,
            cases: 2,
            expected: 3,
            observed: 3,
            pass: true,
        };
        t.push_with(&["7".into()], &row);
        let text = String::from_utf8(t.to_csv_bytes()).unwrap();
        assert_eq!(
            text,
            "schema,seed,check,size,cases,expected,observed,pass\npaths_selftest.v1,7,\"a,b\",1,2,3,3,true\n"
        );
    }

    #[test]
    #[should_panic(expected = "drifted")]
    fn wrong_columns_panic() {
        let mut t = Table::new(&schema::PATHS_SELFTEST);
        t.push(&Sel {
            check: "a",
            size: 1,
            cases: 1,
            expected: 1,
            observed: 1,
            pass: true,
        });
    }
}
