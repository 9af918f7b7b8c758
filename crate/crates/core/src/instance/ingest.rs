//! Packet or flow traces to instance streams.
//!
//! Each row is `<time> <src> <dst> [size]`, separated by whitespace or
//! commas. Every `group` distinct time values form one batch. Within a batch
//! the traffic between two endpoints, in either direction, becomes the edge
//! weight: summed sizes for [`TraceFormat::Ts`], packet counts for
//! [`TraceFormat::Seq`]. Pairs that carried traffic in the previous batch and
//! none in this one are set to 0.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::BufRead;
use std::str::FromStr;

use super::{InstanceStream, WeightSet};
use crate::error::{Error, Result};
use crate::graph::{normalize, Node};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceFormat {
    /// Timestamped rows with a byte size column.
    Ts,
    /// Sequence-numbered rows; each row is one packet.
    Seq,
}

impl FromStr for TraceFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ts" => Ok(TraceFormat::Ts),
            "seq" => Ok(TraceFormat::Seq),
            _ => Err(Error::Config(format!("unknown trace format '{s}' (expected ts or seq)"))),
        }
    }
}

#[derive(Default)]
struct Builder {
    ids: HashMap<String, Node>,
    batches: Vec<BTreeMap<(Node, Node), u64>>,
    times: HashSet<String>,
    group: usize,
    skipped_loops: usize,
}

impl Builder {
    fn node(&mut self, name: &str) -> Node {
        let next = self.ids.len() as Node;
        *self.ids.entry(name.to_string()).or_insert(next)
    }

    fn row(&mut self, time: &str, src: &str, dst: &str, amount: u64) -> Result<()> {
        if self.batches.is_empty() || (!self.times.contains(time) && self.times.len() == self.group) {
            self.batches.push(BTreeMap::new());
            self.times.clear();
        }
        self.times.insert(time.to_string());
        let (a, b) = (self.node(src), self.node(dst));
        if a == b {
            self.skipped_loops += 1;
            return Ok(());
        }
        let w = self.batches.last_mut().unwrap().entry(normalize(a, b)).or_insert(0);
        *w = w.checked_add(amount).ok_or_else(|| Error::Config("traffic volume overflows u64".into()))?;
        Ok(())
    }

    fn finish(self) -> InstanceStream {
        if self.skipped_loops > 0 {
            log::warn!("skipped {} rows with identical source and destination", self.skipped_loops);
        }
        let mut out = InstanceStream::new(self.ids.len() as u32);
        let mut prev: BTreeMap<(Node, Node), u64> = BTreeMap::new();
        for batch in self.batches {
            let mut lines: BTreeMap<(Node, Node), u64> = prev.keys().map(|&k| (k, 0)).collect();
            lines.extend(batch.iter().filter(|&(k, &w)| w > 0 || prev.contains_key(k)).map(|(&k, &w)| (k, w)));
            out.batches.push(lines.into_iter().map(|((u, v), w)| WeightSet { u, v, weight: w }).collect());
            prev = batch.into_iter().filter(|&(_, w)| w > 0).collect();
        }
        out
    }
}

pub fn ingest_trace<R: BufRead>(reader: R, group: usize, format: TraceFormat) -> Result<InstanceStream> {
    if group == 0 {
        return Err(Error::Config("group size must be at least 1".into()));
    }
    let mut b = Builder { group, ..Default::default() };
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(|ch: char| ch == ',' || ch.is_whitespace()).filter(|f| !f.is_empty()).collect();
        let bad = |msg: String| Error::Parse { line: lineno, msg };
        let (time, src, dst, amount) = match (format, fields.as_slice()) {
            (TraceFormat::Ts, [t, s, d, size]) => {
                let size: i128 = size.parse().map_err(|_| bad(format!("bad size '{size}'")))?;
                if size < 0 {
                    return Err(bad(format!("negative size {size}")));
                }
                let size = u64::try_from(size).map_err(|_| bad(format!("size {size} too large")))?;
                (*t, *s, *d, size)
            }
            (TraceFormat::Seq, [t, s, d]) | (TraceFormat::Seq, [t, s, d, _]) => (*t, *s, *d, 1),
            _ => return Err(bad(format!("expected time, src, dst{} but got '{trimmed}'", if format == TraceFormat::Ts { ", size" } else { "" }))),
        };
        b.row(time, src, dst, amount).map_err(|e| match e {
            Error::Config(msg) => bad(msg),
            other => other,
        })?;
    }
    Ok(b.finish())
}

pub fn ingest_trace_str(text: &str, group: usize, format: TraceFormat) -> Result<InstanceStream> {
    ingest_trace(text.as_bytes(), group, format)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directions_merge() {
        let inst = ingest_trace_str("1 a b 100\n2 b a 50\n", 60, TraceFormat::Ts).unwrap();
        assert_eq!(inst.n, 2);
        assert_eq!(inst.batches, vec![vec![WeightSet::new(0, 1, 150)]]);
    }

    #[test]
    fn silent_pair_is_zeroed() {
        let inst = ingest_trace_str("1,a,b,10\n2,c,d,5\n2,c,d,5\n", 1, TraceFormat::Ts).unwrap();
        assert_eq!(inst.batches.len(), 2);
        assert_eq!(inst.batches[1], vec![WeightSet::new(0, 1, 0), WeightSet::new(2, 3, 10)]);
    }

    #[test]
    fn seq_counts_packets() {
        let rows: String = (0..10).map(|i| format!("{i} x y\n")).collect::<String>() + "10 x y\n";
        let inst = ingest_trace_str(&rows, 10, TraceFormat::Seq).unwrap();
        assert_eq!(inst.batches[0], vec![WeightSet::new(0, 1, 10)]);
        assert_eq!(inst.batches[1], vec![WeightSet::new(0, 1, 1)]);
    }

    #[test]
    fn malformed_rows() {
        for (text, line) in [("1 a b\n", 1), ("1 a b 3\n2 a b -4\n", 2), ("# hdr\n1 a b x\n", 2)] {
            match ingest_trace_str(text, 1, TraceFormat::Ts) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn output_parses_back() {
        let inst = ingest_trace_str("1 a b 3\n1 b c 4\n2 c a 9\n3 a b 1\n", 1, TraceFormat::Ts).unwrap();
        assert_eq!(InstanceStream::parse(&inst.to_text()).unwrap(), inst);
    }
}
