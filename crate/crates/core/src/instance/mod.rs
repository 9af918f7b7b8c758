//! Instance streams and the DJM text format.
//!
//! ```text
//! djm 1 <n>
//! #batch
//! <u> <v> <w_new>
//! ...
//! ```
//!
//! Update lines carry absolute weights with `u < v < n`; loading converts
//! them to deltas against the running weights.

mod ingest;
mod rmat;
mod split;

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

pub use ingest::{ingest_trace, ingest_trace_str, TraceFormat};
pub use rmat::{gen_rmat_dynamic, Initiator, RmatParams, DEFAULT_WEIGHT_RATE, MAX_WEIGHT};
pub use split::{split_instance, SplitParams};

use crate::error::{Error, Result};
use crate::graph::{normalize, EdgeUpdate, Node};

/// One line of a batch: the new absolute weight of `{u, v}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WeightSet {
    pub u: Node,
    pub v: Node,
    pub weight: u64,
}

impl WeightSet {
    pub fn new(u: Node, v: Node, weight: u64) -> Self {
        let (u, v) = normalize(u, v);
        WeightSet { u, v, weight }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InstanceStream {
    pub n: u32,
    pub batches: Vec<Vec<WeightSet>>,
}

const MAGIC: &str = "djm";
const VERSION: &str = "1";
const BATCH: &str = "#batch";

impl InstanceStream {
    pub fn new(n: u32) -> Self {
        InstanceStream { n, batches: Vec::new() }
    }

    pub fn update_count(&self) -> usize {
        self.batches.iter().map(Vec::len).sum()
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::read(text.as_bytes())
    }

    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines().enumerate();
        let header = match lines.next() {
            Some((_, line)) => line?,
            None => return Err(Error::Parse { line: 1, msg: "empty input".into() }),
        };
        let n = parse_header(&header)?;
        let mut out = InstanceStream::new(n);
        for (idx, line) in lines {
            let line = line?;
            let lineno = idx + 1;
            if line == BATCH {
                out.batches.push(Vec::new());
                continue;
            }
            let up = parse_update(&line, n).map_err(|msg| Error::Parse { line: lineno, msg })?;
            match out.batches.last_mut() {
                Some(b) => b.push(up),
                None => return Err(Error::Parse { line: lineno, msg: "update before the first #batch".into() }),
            }
        }
        Ok(out)
    }

    pub fn write<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(self.to_text().as_bytes())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(16 + self.update_count() * 16);
        writeln!(s, "{MAGIC} {VERSION} {}", self.n).unwrap();
        for batch in &self.batches {
            s.push_str(BATCH);
            s.push('\n');
            for up in batch {
                writeln!(s, "{} {} {}", up.u, up.v, up.weight).unwrap();
            }
        }
        s
    }

    /// Converts absolute weights to deltas against the running weights.
    /// Lines that leave a weight unchanged produce no update.
    pub fn to_delta_batches(&self) -> Vec<Vec<EdgeUpdate>> {
        let mut current: HashMap<(Node, Node), u64> = HashMap::new();
        self.batches
            .iter()
            .map(|batch| {
                batch
                    .iter()
                    .filter_map(|s| {
                        let old = current.insert((s.u, s.v), s.weight).unwrap_or(0);
                        let delta = s.weight as i64 - old as i64;
                        (delta != 0).then(|| EdgeUpdate::new(s.u, s.v, delta))
                    })
                    .collect()
            })
            .collect()
    }

    pub fn max_weight(&self) -> u64 {
        self.batches.iter().flatten().map(|s| s.weight).max().unwrap_or(0)
    }
}

fn parse_header(line: &str) -> Result<u32> {
    let bad = |msg: String| Error::Parse { line: 1, msg };
    let parts: Vec<&str> = line.split_whitespace().collect();
    match parts.as_slice() {
        [MAGIC, VERSION, n] => n.parse().map_err(|_| bad(format!("bad node count '{n}'"))),
        [MAGIC, v, _] => Err(bad(format!("unsupported version '{v}'"))),
        _ => Err(bad(format!("expected 'djm 1 <n>', got '{line}'"))),
    }
}

fn parse_update(line: &str, n: u32) -> std::result::Result<WeightSet, String> {
    let mut it = line.split_whitespace();
    let (Some(a), Some(b), Some(c), None) = (it.next(), it.next(), it.next(), it.next()) else {
        return Err(format!("unrecognized line '{line}'"));
    };
    let u: Node = a.parse().map_err(|_| format!("bad node '{a}'"))?;
    let v: Node = b.parse().map_err(|_| format!("bad node '{b}'"))?;
    let weight: u64 = c.parse().map_err(|_| format!("bad weight '{c}'"))?;
    if u >= v {
        return Err(format!("need u < v, got {u} {v}"));
    }
    if v >= n {
        return Err(format!("node {v} out of range (n = {n})"));
    }
    if weight > i64::MAX as u64 {
        return Err(format!("weight {weight} too large"));
    }
    Ok(WeightSet { u, v, weight })
}
