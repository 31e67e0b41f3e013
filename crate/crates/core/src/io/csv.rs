//! Trajectory CSV: `step,P1,P2,R1,R2,clamped,conflict_skipped`.
//!
//! Reals are written in their shortest round-trip form, so reading a file back
//! reproduces every value bit for bit. `clamped` lists the coordinates that were
//! set to zero in that step as `A1;B2` (region, 1-based position).

use std::io::{Read, Write};

use crate::dynamics::{CoupledState, RegionState, StepEvents, Trajectory};
use crate::error::{Error, Region, Result};

pub const HEADER: [&str; 7] = [
    "step",
    "P1",
    "P2",
    "R1",
    "R2",
    "clamped",
    "conflict_skipped",
];

/// Shortest representation that parses back to the same `f64`, in plain
/// notation for moderate magnitudes and exponent notation otherwise.
pub fn format_real(v: f64) -> String {
    let m = v.abs();
    if m == 0.0 || (1e-5..1e16).contains(&m) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn format_clamped(clamped: &[(Region, usize)]) -> String {
    clamped
        .iter()
        .map(|(region, i)| format!("{region}{}", i + 1))
        .collect::<Vec<_>>()
        .join(";")
}

fn parse_clamped(field: &str, line: u64) -> Result<Vec<(Region, usize)>> {
    if field.is_empty() {
        return Ok(Vec::new());
    }
    field
        .split(';')
        .map(|item| {
            let bad = || {
                Error::invalid(
                    format!("clamped on line {line}"),
                    format!("cannot parse `{item}`"),
                )
            };
            let (region, idx) = item.split_at_checked(1).ok_or_else(bad)?;
            let region = match region {
                "A" => Region::A,
                "B" => Region::B,
                _ => return Err(bad()),
            };
            let idx: usize = idx.parse().map_err(|_| bad())?;
            if idx == 0 {
                return Err(bad());
            }
            Ok((region, idx - 1))
        })
        .collect()
}

pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, sink: W) -> Result<()> {
    if traj.is_empty() {
        return Err(Error::invalid(
            "trajectory",
            "must contain at least one state",
        ));
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink);
    w.write_record(HEADER)?;
    for (state, events) in traj.states.iter().zip(&traj.events) {
        let x = state.to_array();
        w.write_record([
            state.step.to_string(),
            format_real(x[0]),
            format_real(x[1]),
            format_real(x[2]),
            format_real(x[3]),
            format_clamped(&events.clamped),
            events.conflict_skipped.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn trajectory_csv_string(traj: &Trajectory) -> Result<String> {
    let mut buf = Vec::new();
    write_trajectory_csv(traj, &mut buf)?;
    Ok(String::from_utf8(buf).expect("CSV output is ASCII"))
}

pub fn read_trajectory_csv<R: Read>(source: R) -> Result<Trajectory> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(source);
    let header = r.headers()?.clone();
    if header.iter().ne(HEADER) {
        return Err(Error::invalid(
            "trajectory header",
            format!(
                "expected {}, got {}",
                HEADER.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    let mut traj = Trajectory {
        states: Vec::new(),
        events: Vec::new(),
    };
    for record in r.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let real = |i: usize| -> Result<f64> {
            record[i]
                .parse::<f64>()
                .map_err(|e| Error::invalid(format!("{} on line {line}", HEADER[i]), e.to_string()))
        };
        let step: u64 = record[0].parse().map_err(|_| {
            Error::invalid(
                format!("step on line {line}"),
                format!("cannot parse `{}`", &record[0]),
            )
        })?;
        let mut state = CoupledState::new(
            RegionState::new(vec![real(1)?, real(2)?])?,
            RegionState::new(vec![real(3)?, real(4)?])?,
        )?;
        state.step = step;
        let conflict_skipped = match &record[6] {
            "true" => true,
            "false" => false,
            other => {
                return Err(Error::invalid(
                    format!("conflict_skipped on line {line}"),
                    format!("expected true or false, got `{other}`"),
                ))
            }
        };
        traj.states.push(state);
        traj.events.push(StepEvents {
            clamped: parse_clamped(&record[5], line)?,
            conflict_skipped,
        });
    }
    if traj.is_empty() {
        return Err(Error::invalid("trajectory", "file has no rows"));
    }
    Ok(traj)
}
