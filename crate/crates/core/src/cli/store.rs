//! Append-only record file for resumable sweeps.
//!
//! Each line is `hash,index,<row>`: `hash` is the config hash the run was
//! started with and `index` the parameter position. A trailing line without
//! a newline is the remnant of an interrupted write and is discarded on
//! open.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use super::csv::{decode_row, encode_row, Table};

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("store {path} belongs to config {found}, this run is {expected}")]
    HashMismatch { path: String, expected: String, found: String },
    #[error("store {path} line {line} is malformed")]
    Malformed { path: String, line: usize },
    #[error("store {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Debug)]
pub struct ResultStore {
    path: PathBuf,
    hash: String,
    records: BTreeMap<usize, Vec<String>>,
    file: File,
}

impl ResultStore {
    pub fn open(path: &Path, hash: &str) -> Result<Self, StoreError> {
        let io = |source| StoreError::Io { path: path.display().to_string(), source };
        let mut records = BTreeMap::new();
        if path.exists() {
            let text = std::fs::read_to_string(path).map_err(io)?;
            let complete = match text.rfind('\n') {
                Some(i) => &text[..=i],
                None => "",
            };
            if complete.len() != text.len() {
                std::fs::write(path, complete).map_err(io)?;
            }
            for (i, line) in complete.lines().enumerate() {
                let fields = decode_row(line).filter(|f| f.len() >= 2).ok_or(StoreError::Malformed { path: path.display().to_string(), line: i + 1 })?;
                if fields[0] != hash {
                    return Err(StoreError::HashMismatch { path: path.display().to_string(), expected: hash.into(), found: fields[0].clone() });
                }
                let index: usize = fields[1].parse().map_err(|_| StoreError::Malformed { path: path.display().to_string(), line: i + 1 })?;
                records.entry(index).or_insert_with(|| fields[2..].to_vec());
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(path).map_err(io)?;
        Ok(Self { path: path.to_path_buf(), hash: hash.into(), records, file })
    }

    pub fn contains(&self, index: usize) -> bool {
        self.records.contains_key(&index)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records `row` at `index`; an index already present is left untouched.
    pub fn append(&mut self, index: usize, row: Vec<String>) -> Result<(), StoreError> {
        if self.contains(index) {
            return Ok(());
        }
        let mut fields = vec![self.hash.clone(), index.to_string()];
        fields.extend(row.iter().cloned());
        let line = encode_row(&fields);
        writeln!(self.file, "{line}").and_then(|_| self.file.flush()).map_err(|source| StoreError::Io { path: self.path.display().to_string(), source })?;
        self.records.insert(index, row);
        Ok(())
    }

    /// Stored rows in index order under `header`.
    pub fn table(&self, header: Vec<String>) -> Table {
        let mut t = Table::with_header(header);
        for row in self.records.values() {
            t.push(row.clone());
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp(name: &str) -> PathBuf {
        let p = std::env::temp_dir().join(format!("fewbody-store-{}-{name}", std::process::id()));
        let _ = std::fs::remove_file(&p);
        p
    }

    #[test]
    fn resume_is_idempotent() {
        let p = tmp("resume");
        let mut s = ResultStore::open(&p, "abc").unwrap();
        s.append(1, vec!["b".into()]).unwrap();
        s.append(0, vec!["a".into()]).unwrap();
        drop(s);
        let mut s = ResultStore::open(&p, "abc").unwrap();
        s.append(0, vec!["changed".into()]).unwrap();
        let t = s.table(vec!["v".into()]);
        assert_eq!(t.to_bytes(), b"v\na\nb\n");
        std::fs::remove_file(&p).unwrap();
    }

    #[test]
    fn other_hash_is_refused() {
        let p = tmp("hash");
        ResultStore::open(&p, "abc").unwrap().append(0, vec!["a".into()]).unwrap();
        assert!(matches!(ResultStore::open(&p, "def"), Err(StoreError::HashMismatch { .. })));
        std::fs::remove_file(&p).unwrap();
    }

    #[test]
    fn torn_line_is_dropped() {
        let p = tmp("torn");
        std::fs::write(&p, "abc,0,a\nabc,1,").unwrap();
        let s = ResultStore::open(&p, "abc").unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "abc,0,a\n");
        std::fs::remove_file(&p).unwrap();
    }
}
