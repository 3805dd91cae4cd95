//! Line-oriented trace files.
//!
//! ```text
//! locpot-trace v1 word_bytes=8
//! 0 f=1 r=1,6 w=7
//! 1 f=0 r= w=3
//! ```

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{Addr, Trace, TraceRecord};
use crate::error::{Error, Result};

pub const TRACE_MAGIC: &str = "locpot-trace v1";

pub fn write_trace_to<W: Write>(t: &Trace, mut w: W) -> Result<()> {
    writeln!(w, "{} word_bytes={}", TRACE_MAGIC, t.word_bytes)?;
    for r in &t.records {
        write!(w, "{} f={} r=", r.id, r.flops)?;
        for (i, a) in r.reads.iter().enumerate() {
            if i > 0 {
                w.write_all(b",")?;
            }
            write!(w, "{a}")?;
        }
        writeln!(w, " w={}", r.write)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trace(t: &Trace, path: impl AsRef<Path>) -> Result<()> {
    let f = File::create(path)?;
    write_trace_to(t, BufWriter::new(f))
}

pub fn read_trace(path: impl AsRef<Path>) -> Result<Trace> {
    let f = File::open(path)?;
    read_trace_from(BufReader::new(f))
}

pub fn read_trace_from<R: BufRead>(r: R) -> Result<Trace> {
    let mut lines = r.lines();
    let header = match lines.next() {
        Some(l) => l?,
        None => return Err(parse_err(1, "missing header")),
    };
    let word_bytes = parse_header(&header)?;
    let mut trace = Trace::new(word_bytes);
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = parse_record(&line, lineno)?;
        if rec.id != trace.records.len() {
            return Err(parse_err(
                lineno,
                format!(
                    "expected record id {}, found {}",
                    trace.records.len(),
                    rec.id
                ),
            ));
        }
        trace.records.push(rec);
    }
    Ok(trace)
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_header(line: &str) -> Result<u32> {
    let rest = line
        .strip_prefix(TRACE_MAGIC)
        .ok_or_else(|| parse_err(1, format!("bad header `{line}`")))?;
    let wb = rest
        .trim()
        .strip_prefix("word_bytes=")
        .ok_or_else(|| parse_err(1, "header lacks word_bytes"))?;
    match wb.parse::<u32>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(parse_err(1, format!("bad word_bytes `{wb}`"))),
    }
}

fn parse_record(line: &str, lineno: usize) -> Result<TraceRecord> {
    let mut fields = line.split_whitespace();
    let mut next = |what: &str| {
        fields
            .next()
            .ok_or_else(|| parse_err(lineno, format!("missing {what}")))
    };
    let id = next("id")?
        .parse::<usize>()
        .map_err(|e| parse_err(lineno, format!("bad id: {e}")))?;
    let flops = field(next("flops")?, "f=", lineno)?
        .parse::<u32>()
        .map_err(|e| parse_err(lineno, format!("bad flops: {e}")))?;
    let reads_s = field(next("reads")?, "r=", lineno)?;
    let reads = if reads_s.is_empty() {
        Vec::new()
    } else {
        reads_s
            .split(',')
            .map(|a| parse_addr(a, lineno))
            .collect::<Result<Vec<_>>>()?
    };
    let write = parse_addr(field(next("write")?, "w=", lineno)?, lineno)?;
    if fields.next().is_some() {
        return Err(parse_err(lineno, "trailing fields"));
    }
    Ok(TraceRecord {
        id,
        reads,
        write,
        flops,
    })
}

fn field<'a>(tok: &'a str, prefix: &str, lineno: usize) -> Result<&'a str> {
    tok.strip_prefix(prefix)
        .ok_or_else(|| parse_err(lineno, format!("expected `{prefix}...`, found `{tok}`")))
}

fn parse_addr(s: &str, lineno: usize) -> Result<Addr> {
    s.parse::<Addr>()
        .map_err(|e| parse_err(lineno, format!("bad address `{s}`: {e}")))
}
