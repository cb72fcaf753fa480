//! Cache sector partitions on disk. Entries are keyed by the transition
//! graph, so a renamed or custom copy of a model reuses them.
//!
//! cargo run --example partition_cache

use pvfrag::cache::{content_hash, PartitionCache};
use pvfrag::models::{build_model, load_model_json, ModelParams};
use pvfrag::spinchain::{Alphabet, SectorKey};

fn main() -> pvfrag::Result<()> {
    let dir = tempfile::tempdir()?;
    let cache = PartitionCache::new(dir.path());
    let h3 = build_model("h3_1", &ModelParams::default())?;
    let sector = SectorKey::new(12, Alphabet::Integer(1), 0, Some(4))?;

    let (p, status) = cache.decompose(&h3, &sector)?;
    println!("{status:?}: r={} D_t={}", p.class_count(), p.dimension());

    let copy = load_model_json(&serde_json::to_string(&h3.to_model_file())?)?;
    let (q, status) = cache.decompose(&copy, &sector)?;
    println!("{status:?} for the JSON copy, identical partition: {}", p == q);
    println!("entry {}", cache.path_for(&content_hash(&h3, &sector)).display());
    Ok(())
}
