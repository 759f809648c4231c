//! Persistent table of Monte Carlo critical values.
//!
//! The file is a CSV whose first line is the schema marker [`SCHEMA`],
//! followed by the header `kind,params,n,alpha,reps,seed,value,stderr`.
//! Entries are keyed by (statistic, n, alpha). An entry is reused only when
//! its replicate count and seed match the request; any other combination is
//! refused instead of being recomputed or overwritten.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wgof_core::StatisticSpec;

use crate::engine::{critical_values, CriticalValue, McConfig};
use crate::error::{Error, Result};
use crate::parse::parse_statistic;

pub const SCHEMA: &str = "# wgof critical-values v1";

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    kind: String,
    params: String,
    n: usize,
    alpha: f64,
    reps: usize,
    seed: u64,
    value: f64,
    stderr: f64,
}

type Key = (String, String, usize, u64);

fn key(spec: &StatisticSpec, n: usize, alpha: f64) -> Key {
    (spec.kind().name().to_string(), spec.params(), n, alpha.to_bits())
}

fn spec_from_row(kind: &str, params: &str) -> Result<StatisticSpec> {
    let text = match params.split_once('=') {
        Some((_, v)) => format!("{}:{v}", kind.to_ascii_lowercase()),
        None => kind.to_ascii_lowercase(),
    };
    parse_statistic(&text)
}

#[derive(Debug, Default)]
pub struct CriticalCache {
    path: Option<PathBuf>,
    entries: BTreeMap<Key, CriticalValue>,
    dirty: bool,
}

impl CriticalCache {
    /// A cache that lives only as long as the process.
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Opens (or prepares to create) the cache file at `path`.
    pub fn open(path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        let mut cache = Self {
            path: Some(path.clone()),
            ..Self::default()
        };
        if path.exists() {
            cache.load(&path)?;
        }
        Ok(cache)
    }

    fn error(&self, reason: impl Into<String>) -> Error {
        Error::Cache {
            path: self.path.clone().unwrap_or_else(|| PathBuf::from("<memory>")),
            reason: reason.into(),
        }
    }

    fn load(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let first = text.lines().next().unwrap_or("");
        if first.trim_end() != SCHEMA {
            return Err(self.error(format!("unsupported schema line {first:?}, expected {SCHEMA:?}")));
        }
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        for row in rdr.deserialize::<Row>() {
            let row = row?;
            let spec = spec_from_row(&row.kind, &row.params)?;
            let cv = CriticalValue {
                spec,
                n: row.n,
                alpha: row.alpha,
                reps: row.reps,
                seed: row.seed,
                value: row.value,
                stderr: row.stderr,
            };
            if self.entries.insert(key(&spec, row.n, row.alpha), cv).is_some() {
                return Err(self.error(format!("duplicate entry for {spec} at n={} alpha={}", row.n, row.alpha)));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    /// The stored entry for `(spec, n, alpha)`, without provenance checks.
    pub fn get(&self, spec: &StatisticSpec, n: usize, alpha: f64) -> Option<&CriticalValue> {
        self.entries.get(&key(spec, n, alpha))
    }

    /// The stored entry if it was produced with `cfg`'s replicate count and
    /// seed; an error if it was produced with different ones.
    pub fn lookup(&self, spec: &StatisticSpec, n: usize, cfg: &McConfig) -> Result<Option<CriticalValue>> {
        match self.get(spec, n, cfg.alpha) {
            None => Ok(None),
            Some(cv) if cv.reps == cfg.reps_critical && cv.seed == cfg.seed => Ok(Some(*cv)),
            Some(cv) => Err(self.error(format!(
                "{spec} at n={n} alpha={} is stored with reps={} seed={}, requested reps={} seed={}; \
                 use another cache file or matching settings",
                cfg.alpha, cv.reps, cv.seed, cfg.reps_critical, cfg.seed
            ))),
        }
    }

    pub fn insert(&mut self, cv: CriticalValue) -> Result<()> {
        let k = key(&cv.spec, cv.n, cv.alpha);
        if let Some(old) = self.entries.get(&k) {
            if old != &cv {
                return Err(self.error(format!("refusing to overwrite {} at n={}", cv.spec, cv.n)));
            }
            return Ok(());
        }
        self.entries.insert(k, cv);
        self.dirty = true;
        Ok(())
    }

    /// Critical values for `specs` at `n`, simulating only the missing ones
    /// (all missing specs share one batch of null replicates).
    pub fn get_or_compute(&mut self, specs: &[StatisticSpec], n: usize, cfg: &McConfig) -> Result<Vec<CriticalValue>> {
        let mut found = Vec::with_capacity(specs.len());
        let mut missing = Vec::new();
        for s in specs {
            let hit = self.lookup(s, n, cfg)?;
            if hit.is_none() && !missing.contains(s) {
                missing.push(*s);
            }
            found.push(hit);
        }
        if !missing.is_empty() {
            for cv in critical_values(&missing, n, cfg)? {
                self.insert(cv)?;
            }
        }
        specs
            .iter()
            .zip(found)
            .map(|(s, hit)| match hit {
                Some(cv) => Ok(cv),
                None => Ok(*self.get(s, n, cfg.alpha).expect("just computed")),
            })
            .collect()
    }

    /// Writes the file if anything changed; a no-op for in-memory caches.
    pub fn save(&mut self) -> Result<()> {
        let Some(path) = self.path.clone() else {
            return Ok(());
        };
        if !self.dirty {
            return Ok(());
        }
        let bytes = self.to_csv()?;
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let tmp = path.with_extension("csv.tmp");
        fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))?;
        self.dirty = false;
        Ok(())
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        writeln!(out, "{SCHEMA}").expect("write to Vec");
        let mut w = csv::Writer::from_writer(out);
        for cv in self.entries.values() {
            w.serialize(Row {
                kind: cv.spec.kind().name().to_string(),
                params: cv.spec.params(),
                n: cv.n,
                alpha: cv.alpha,
                reps: cv.reps,
                seed: cv.seed,
                value: cv.value,
                stderr: cv.stderr,
            })?;
        }
        w.into_inner().map_err(|e| Error::Config(e.to_string()))
    }
}
