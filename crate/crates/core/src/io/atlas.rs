//! JSONL atlas: one `{"cell","alpha","seed","class","detail"}` object per line.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::sweep::AtlasRecord;

pub fn write_atlas_jsonl<W: Write>(records: &[AtlasRecord], mut sink: W) -> Result<()> {
    if let Some(w) = records.windows(2).find(|w| w[0].cell >= w[1].cell) {
        return Err(Error::Integrity(format!(
            "atlas records out of order: cell {} followed by {}",
            w[0].cell, w[1].cell
        )));
    }
    for record in records {
        serde_json::to_writer(&mut sink, record).map_err(std::io::Error::from)?;
        sink.write_all(b"\n")?;
    }
    sink.flush()?;
    Ok(())
}

pub fn atlas_jsonl_string(records: &[AtlasRecord]) -> Result<String> {
    let mut buf = Vec::new();
    write_atlas_jsonl(records, &mut buf)?;
    Ok(String::from_utf8(buf).expect("JSON output is UTF-8"))
}

pub fn read_atlas_jsonl<R: BufRead>(source: R) -> Result<Vec<AtlasRecord>> {
    let mut out = Vec::new();
    for (n, line) in source.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line)
            .map_err(|e| Error::invalid(format!("atlas line {}", n + 1), e.to_string()))?;
        out.push(record);
    }
    Ok(out)
}
