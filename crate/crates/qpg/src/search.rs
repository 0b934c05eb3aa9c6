//! Sharded exhaustive search.
//!
//! Shards are processed in batches on a rayon pool and committed strictly in
//! shard order, so the output does not depend on the number of workers. A
//! record is kept when its array is valid and passes the Frame and
//! discriminant test on some multiplicity profile; records sharing a scheme
//! key are suppressed after the first.

use std::collections::HashSet;
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use qpg_core::array::CanonicalKey;
use qpg_core::enumerate::{count_valencies, enumerate_arrays, enumerate_valencies, quick_reject, SearchBounds, SearchShard};
use qpg_core::record::{run_gated, FeasibilityRecord};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::db::{read_records, DbError, RecordLine, SCHEMA_VERSION};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("rank must be at least 2, got {0}")]
    Rank(usize),
    #[error("checkpoint {} was written for different bounds", path.display())]
    CheckpointMismatch { path: PathBuf },
    #[error("{context}: {source}")]
    Io { context: String, source: io::Error },
    #[error(transparent)]
    Db(#[from] DbError),
    #[error("checkpoint: {0}")]
    Checkpoint(#[from] serde_json::Error),
}

fn io_err(context: impl Into<String>) -> impl FnOnce(io::Error) -> SearchError {
    let context = context.into();
    move |source| SearchError::Io { context, source }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub bounds: SearchBounds,
    pub jobs: usize,
}

impl SearchConfig {
    fn validate(&self) -> Result<(), SearchError> {
        if self.bounds.rank < 2 {
            return Err(SearchError::Rank(self.bounds.rank));
        }
        Ok(())
    }
}

/// Worker count from `QPG_JOBS`, else the available parallelism.
pub fn default_jobs() -> usize {
    std::env::var("QPG_JOBS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&j| j > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Records of one shard in candidate order, deduplicated within the shard.
pub fn process_shard(shard: &SearchShard) -> Vec<FeasibilityRecord> {
    let mut out: Vec<FeasibilityRecord> = Vec::new();
    let mut seen = HashSet::new();
    enumerate_arrays(shard, |a| {
        if quick_reject(&a) {
            return;
        }
        if let Some(r) = run_gated(&a) {
            if r.in_database() && seen.insert(r.key().cloned()) {
                out.push(r);
            }
        }
    });
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct Checkpoint {
    schema_version: u32,
    rank: usize,
    min_order: u64,
    max_order: u64,
    max_valency: u64,
    shards_committed: u64,
}

impl Checkpoint {
    fn matches(&self, b: &SearchBounds) -> bool {
        self.schema_version == SCHEMA_VERSION
            && self.rank == b.rank
            && self.min_order == b.min_order
            && self.max_order == b.max_order
            && self.max_valency == b.max_valency
    }
}

pub fn checkpoint_path(out: &Path) -> PathBuf {
    let mut p = out.as_os_str().to_owned();
    p.push(".checkpoint");
    PathBuf::from(p)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Progress {
    pub shards_done: u64,
    pub shards_total: u64,
    pub survivors: u64,
}

enum Event {
    /// Records of the shard with this index.
    Shard(u64, Vec<FeasibilityRecord>),
    /// Every shard before this index is committed.
    Batch(u64),
}

/// Drives the search from shard `skip` on, reporting shards in order.
fn drive(config: &SearchConfig, skip: u64, mut on: impl FnMut(Event) -> Result<(), SearchError>) -> Result<(), SearchError> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.max(1))
        .build()
        .expect("thread pool");
    let batch_len = 64 * config.jobs.max(1);
    let mut shards = enumerate_valencies(config.bounds).skip(skip as usize);
    let mut index = skip;
    loop {
        let batch: Vec<SearchShard> = shards.by_ref().take(batch_len).collect();
        if batch.is_empty() {
            break;
        }
        let results: Vec<Vec<FeasibilityRecord>> = pool.install(|| batch.par_iter().map(process_shard).collect());
        for recs in results {
            on(Event::Shard(index, recs))?;
            index += 1;
        }
        on(Event::Batch(index))?;
    }
    Ok(())
}

/// Every kept record in merged order, without touching the file system.
pub fn search_records(config: &SearchConfig) -> Result<Vec<FeasibilityRecord>, SearchError> {
    let mut out = Vec::new();
    let mut seen: HashSet<Option<CanonicalKey>> = HashSet::new();
    drive(config, 0, |ev| {
        if let Event::Shard(_, recs) = ev {
            out.extend(recs.into_iter().filter(|r| seen.insert(r.key().cloned())));
        }
        Ok(())
    })?;
    Ok(out)
}

/// Runs the search into `out` as JSON lines with a checkpoint sidecar.
///
/// With `resume`, shards before the checkpoint are skipped and keys already
/// present in `out` are not written again.
pub fn search_to_file(
    config: &SearchConfig,
    out: &Path,
    resume: bool,
    mut progress: impl FnMut(Progress),
) -> Result<Progress, SearchError> {
    config.validate()?;
    let ckpt_path = checkpoint_path(out);
    let mut seen: HashSet<String> = HashSet::new();
    let mut skip = 0;
    let mut survivors = 0;
    if resume && out.exists() {
        let file = File::open(out).map_err(io_err(format!("opening {}", out.display())))?;
        let existing = read_records(BufReader::new(file), true)?;
        survivors = existing.len() as u64;
        seen.extend(existing.iter().map(|r| r.array.clone()));
        // drop an interrupted final line before appending
        let mut text = fs::read_to_string(out).map_err(io_err(format!("reading {}", out.display())))?;
        if !text.is_empty() && !text.ends_with('\n') {
            let cut = text.rfind('\n').map_or(0, |i| i + 1);
            text.truncate(cut);
            fs::write(out, &text).map_err(io_err(format!("truncating {}", out.display())))?;
        }
        if ckpt_path.exists() {
            let raw = fs::read_to_string(&ckpt_path).map_err(io_err(format!("reading {}", ckpt_path.display())))?;
            let ckpt: Checkpoint = serde_json::from_str(&raw)?;
            if !ckpt.matches(&config.bounds) {
                return Err(SearchError::CheckpointMismatch { path: ckpt_path });
            }
            skip = ckpt.shards_committed;
        }
    } else {
        File::create(out).map_err(io_err(format!("creating {}", out.display())))?;
        if ckpt_path.exists() {
            fs::remove_file(&ckpt_path).map_err(io_err(format!("removing {}", ckpt_path.display())))?;
        }
    }
    let file = OpenOptions::new()
        .append(true)
        .open(out)
        .map_err(io_err(format!("opening {}", out.display())))?;
    let mut sink = BufWriter::new(file);
    let total = count_valencies(config.bounds);
    let mut state = Progress { shards_done: skip, shards_total: total, survivors };
    let mut last_report = Instant::now();
    progress(state);
    let b = config.bounds;
    let write_ckpt = |committed: u64| -> Result<(), SearchError> {
        let ckpt = Checkpoint {
            schema_version: SCHEMA_VERSION,
            rank: b.rank,
            min_order: b.min_order,
            max_order: b.max_order,
            max_valency: b.max_valency,
            shards_committed: committed,
        };
        let tmp = ckpt_path.with_extension("checkpoint.tmp");
        fs::write(&tmp, serde_json::to_string(&ckpt)?).map_err(io_err(format!("writing {}", tmp.display())))?;
        fs::rename(&tmp, &ckpt_path).map_err(io_err(format!("writing {}", ckpt_path.display())))
    };
    let mut committed = skip;
    let result = drive(config, skip, |ev| {
        match ev {
            Event::Shard(index, recs) => {
                for r in recs {
                    let line = RecordLine::from_record(&r);
                    if seen.insert(line.array.clone()) {
                        writeln!(sink, "{}", line.to_line()).map_err(io_err(format!("writing {}", out.display())))?;
                        state.survivors += 1;
                    }
                }
                sink.flush().map_err(io_err(format!("writing {}", out.display())))?;
                state.shards_done = index + 1;
            }
            Event::Batch(index) => {
                write_ckpt(index)?;
                committed = index;
                if last_report.elapsed() >= Duration::from_secs(2) {
                    progress(state);
                    last_report = Instant::now();
                }
            }
        }
        Ok(())
    });
    if let Err(e) = result {
        return Err(match e {
            SearchError::Io { context, source } => SearchError::Io {
                context: format!("{context} (last committed shard {committed})"),
                source,
            },
            other => other,
        });
    }
    write_ckpt(state.shards_done)?;
    progress(state);
    Ok(state)
}
