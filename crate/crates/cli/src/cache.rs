//! Append-only JSON-lines result cache.
//!
//! Each line stores one entry: a key hashing the tool version, operation
//! name, and canonical input together, plus the exact output string that a
//! fresh computation produced. Hits therefore return byte-identical output.
//! Corrupt lines are skipped with a warning; entries from other versions are
//! ignored because the version participates in the key.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

const VERSION: &str = env!("CARGO_PKG_VERSION");
const ENV_VAR: &str = "KNOTCHI_CACHE";
const DEFAULT_PATH: &str = ".knotchi-cache.jsonl";

pub struct Store {
    path: Option<String>,
    entries: HashMap<String, String>,
}

pub fn key(op: &str, canonical_input: &str) -> String {
    let mut h = Sha256::new();
    h.update(VERSION.as_bytes());
    h.update(b"|");
    h.update(op.as_bytes());
    h.update(b"|");
    h.update(canonical_input.as_bytes());
    hex::encode(h.finalize())
}

impl Store {
    /// Open (and eagerly read) the cache file. A missing file is an empty
    /// cache; `disabled` short-circuits everything.
    pub fn open(explicit_path: Option<&str>, disabled: bool) -> Store {
        if disabled {
            return Store { path: None, entries: HashMap::new() };
        }
        let path = explicit_path
            .map(str::to_string)
            .or_else(|| std::env::var(ENV_VAR).ok())
            .unwrap_or_else(|| DEFAULT_PATH.to_string());
        let mut entries = HashMap::new();
        match File::open(&path) {
            Ok(f) => {
                // Shared lock while reading so a concurrent batch writer
                // cannot interleave a partial line.
                let _ = f.lock_shared();
                for (lineno, line) in BufReader::new(&f).lines().enumerate() {
                    let Ok(line) = line else { break };
                    if line.trim().is_empty() {
                        continue;
                    }
                    match parse_entry(&line) {
                        Ok(Some((k, v))) => {
                            entries.insert(k, v);
                        }
                        Ok(None) => {} // entry from another version: ignore
                        Err(()) => {
                            eprintln!(
                                "warning: cache {path}:{}: corrupt entry ignored, recomputing",
                                lineno + 1
                            );
                        }
                    }
                }
                let _ = f.unlock();
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => eprintln!("warning: cannot read cache {path}: {e}"),
        }
        Store { path: Some(path), entries }
    }

    pub fn lookup(&self, op: &str, canonical_input: &str) -> Option<String> {
        self.path.as_ref()?;
        self.entries.get(&key(op, canonical_input)).cloned()
    }

    pub fn insert(&mut self, op: &str, canonical_input: &str, output: &str) {
        let Some(path) = self.path.clone() else { return };
        let k = key(op, canonical_input);
        if self.entries.contains_key(&k) {
            return; // idempotent store
        }
        let created_at = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let line = json!({
            "key": k,
            "value": output,
            "version": VERSION,
            "created_at": created_at,
        })
        .to_string();
        match OpenOptions::new().create(true).append(true).open(&path) {
            Ok(mut f) => {
                let locked = f.lock().is_ok();
                let res = writeln!(f, "{line}");
                if locked {
                    let _ = f.unlock();
                }
                if let Err(e) = res {
                    eprintln!("warning: cannot write cache {path}: {e}");
                } else {
                    self.entries.insert(k, output.to_string());
                }
            }
            Err(e) => eprintln!("warning: cannot open cache {path}: {e}"),
        }
    }
}

/// `Err(())` means the line is corrupt; `Ok(None)` means it is a valid entry
/// written by a different version of the tool.
fn parse_entry(line: &str) -> Result<Option<(String, String)>, ()> {
    let v: Value = serde_json::from_str(line).map_err(|_| ())?;
    let version = v.get("version").and_then(Value::as_str).ok_or(())?;
    let k = v.get("key").and_then(Value::as_str).ok_or(())?.to_string();
    let val = v.get("value").and_then(Value::as_str).ok_or(())?.to_string();
    if version != VERSION {
        return Ok(None);
    }
    Ok(Some((k, val)))
}
