//! Content-addressed on-disk cache of Krylov partitions.
//!
//! Entries are keyed by a SHA-256 of the sorted transition list, the chain
//! length and the sector, so two models with the same transition graph
//! share entries whatever they are called.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::krylov::{decompose, KrylovPartition};
use crate::models::ModelSpec;
use crate::spinchain::{enumerate_sector_ranks, Enumeration, SectorKey};

pub const CACHE_ENV: &str = "PVFRAG_CACHE";

const FORMAT: &str = "pvfrag-partition-v1";

/// Hex SHA-256 identifying the partition of `sector` under `model`.
pub fn content_hash(model: &ModelSpec, sector: &SectorKey) -> String {
    let mut h = Sha256::new();
    h.update(FORMAT.as_bytes());
    h.update(format!("\nalphabet={}\nL={}\nspin={}\n", sector.alphabet, sector.length, sector.total_spin));
    match sector.dipole {
        Some(p) => h.update(format!("dipole={p}\n")),
        None => h.update("dipole=*\n"),
    }
    for (a, b) in model.canonical_transitions() {
        h.update(format!("{a:?}>{b:?}\n"));
    }
    hex::encode(h.finalize())
}

/// Serialized form: class sizes in class-id order and the class id of every
/// basis state, run-length encoded as `[id, count]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PartitionRecord {
    pub class_sizes: Vec<usize>,
    pub class_of: Vec<(u64, usize)>,
}

impl PartitionRecord {
    pub fn from_partition(p: &KrylovPartition) -> Self {
        let mut runs: Vec<(u64, usize)> = Vec::new();
        for &c in &p.class_of {
            match runs.last_mut() {
                Some((id, n)) if *id == c => *n += 1,
                _ => runs.push((c, 1)),
            }
        }
        Self {
            class_sizes: p.class_sizes.clone(),
            class_of: runs,
        }
    }

    /// Rebuilds the partition; `None` if the record does not fit the sector.
    pub fn into_partition(self, sector: &SectorKey) -> Option<KrylovPartition> {
        let ranks = enumerate_sector_ranks(sector, Enumeration::Auto);
        let class_of: Vec<u64> = self
            .class_of
            .iter()
            .flat_map(|&(id, n)| std::iter::repeat(id).take(n))
            .collect();
        if class_of.len() != ranks.len() {
            return None;
        }
        let p = KrylovPartition::from_labels(*sector, ranks, class_of);
        (p.class_sizes == self.class_sizes).then_some(p)
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut bytes = serde_json::to_vec(self)?;
        bytes.push(b'\n');
        Ok(bytes)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CacheStatus {
    Hit,
    Miss,
    Disabled,
}

#[derive(Clone, Debug)]
pub struct PartitionCache {
    dir: PathBuf,
}

impl PartitionCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn from_env() -> Option<Self> {
        std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(Self::new)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, hash: &str) -> PathBuf {
        self.dir.join(format!("{hash}.json"))
    }

    /// A corrupt or mismatched entry is treated as a miss.
    pub fn load(&self, model: &ModelSpec, sector: &SectorKey) -> Option<KrylovPartition> {
        let bytes = fs::read(self.path_for(&content_hash(model, sector))).ok()?;
        let record: PartitionRecord = serde_json::from_slice(&bytes).ok()?;
        record.into_partition(sector)
    }

    /// Writes through a temporary file in the cache directory and renames
    /// it into place, so concurrent writers never expose partial files.
    pub fn store(&self, model: &ModelSpec, sector: &SectorKey, partition: &KrylovPartition) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path_for(&content_hash(model, sector));
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(&PartitionRecord::from_partition(partition).to_bytes()?)?;
        tmp.as_file().sync_all()?;
        tmp.persist(&path).map_err(|e| e.error)?;
        Ok(path)
    }

    pub fn decompose(&self, model: &ModelSpec, sector: &SectorKey) -> Result<(KrylovPartition, CacheStatus)> {
        if let Some(p) = self.load(model, sector) {
            return Ok((p, CacheStatus::Hit));
        }
        let p = decompose(model, sector)?;
        self.store(model, sector, &p)?;
        Ok((p, CacheStatus::Miss))
    }
}

/// Decomposes through the cache when one is given.
pub fn decompose_cached(
    cache: Option<&PartitionCache>,
    model: &ModelSpec,
    sector: &SectorKey,
) -> Result<(KrylovPartition, CacheStatus)> {
    match cache {
        Some(c) => c.decompose(model, sector),
        None => Ok((decompose(model, sector)?, CacheStatus::Disabled)),
    }
}
