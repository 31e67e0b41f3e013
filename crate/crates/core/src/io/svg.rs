//! Phase portraits as standalone SVG 1.1 documents.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};

/// The pair of coordinates plotted against each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Plane {
    P1P2,
    R1R2,
    P1R1,
}

impl Plane {
    /// Indices into `(P1, P2, R1, R2)`.
    pub fn axes(self) -> (usize, usize) {
        match self {
            Plane::P1P2 => (0, 1),
            Plane::R1R2 => (2, 3),
            Plane::P1R1 => (0, 2),
        }
    }

    pub fn labels(self) -> (&'static str, &'static str) {
        match self {
            Plane::P1P2 => ("P1", "P2"),
            Plane::R1R2 => ("R1", "R2"),
            Plane::P1R1 => ("P1", "R1"),
        }
    }

    pub fn project(self, x: [f64; 4]) -> [f64; 2] {
        let (i, j) = self.axes();
        [x[i], x[j]]
    }
}

impl fmt::Display for Plane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Plane::P1P2 => "p1p2",
            Plane::R1R2 => "r1r2",
            Plane::P1R1 => "p1r1",
        })
    }
}

impl FromStr for Plane {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "p1p2" => Ok(Plane::P1P2),
            "r1r2" => Ok(Plane::R1R2),
            "p1r1" => Ok(Plane::P1R1),
            _ => Err(Error::invalid(
                "plane",
                format!("expected p1p2, r1r2 or p1r1, got `{s}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvgOptions {
    pub width: u32,
    pub height: u32,
    /// Leading states left out of the plot.
    pub skip: usize,
    /// Point in the selected plane to mark, e.g. an unstable equilibrium.
    pub marker: Option<[f64; 2]>,
    pub title: Option<String>,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            width: 640,
            height: 480,
            skip: 0,
            marker: None,
            title: None,
        }
    }
}

const MARGIN: f64 = 56.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Axis label with at most six decimals and no trailing zeros.
fn label(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

struct Frame {
    lo: [f64; 2],
    hi: [f64; 2],
    w: f64,
    h: f64,
}

impl Frame {
    fn to_px(&self, p: [f64; 2]) -> (f64, f64) {
        let span = |k: usize| self.hi[k] - self.lo[k];
        let x = MARGIN + (p[0] - self.lo[0]) / span(0) * (self.w - 2.0 * MARGIN);
        let y = self.h - MARGIN - (p[1] - self.lo[1]) / span(1) * (self.h - 2.0 * MARGIN);
        (x, y)
    }
}

/// Pads a flat axis so that a constant coordinate lands mid-axis.
fn axis_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if hi > lo {
        (lo, hi)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { 0.05 * lo.abs() };
        (lo - pad, hi + pad)
    }
}

pub fn render_phase_svg(traj: &Trajectory, plane: Plane, opts: &SvgOptions) -> Result<String> {
    if traj.is_empty() {
        return Err(Error::invalid(
            "trajectory",
            "must contain at least one state",
        ));
    }
    let skip = opts.skip.min(traj.len() - 1);
    let points: Vec<[f64; 2]> = traj.states[skip..]
        .iter()
        .map(|s| plane.project(s.to_array()))
        .collect();
    let all_equal = points.iter().all(|p| p == &points[0]);

    let extra = opts.marker.into_iter();
    let x_range = axis_range(
        points
            .iter()
            .map(|p| p[0])
            .chain(extra.clone().map(|m| m[0])),
    );
    let y_range = axis_range(points.iter().map(|p| p[1]).chain(extra.map(|m| m[1])));
    let (w, h) = (f64::from(opts.width), f64::from(opts.height));
    let frame = Frame {
        lo: [x_range.0, y_range.0],
        hi: [x_range.1, y_range.1],
        w,
        h,
    };
    let (xl, yl) = plane.labels();

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        opts.width, opts.height, opts.width, opts.height
    );
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#
    );
    let (x0, y0) = (MARGIN, h - MARGIN);
    let (x1, y1) = (w - MARGIN, MARGIN);
    let _ = writeln!(
        s,
        r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#
    );
    let font = r#"font-family="sans-serif" font-size="12""#;
    let _ = writeln!(
        s,
        r#"<text x="{x0}" y="{}" {font} text-anchor="start">{}</text>"#,
        y0 + 16.0,
        label(frame.lo[0])
    );
    let _ = writeln!(
        s,
        r#"<text x="{x1}" y="{}" {font} text-anchor="end">{}</text>"#,
        y0 + 16.0,
        label(frame.hi[0])
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{y0}" {font} text-anchor="end">{}</text>"#,
        x0 - 4.0,
        label(frame.lo[1])
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" {font} text-anchor="end">{}</text>"#,
        x0 - 4.0,
        y1 + 12.0,
        label(frame.hi[1])
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" {font} text-anchor="middle">{xl}</text>"#,
        w / 2.0,
        h - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" {font} text-anchor="middle" transform="rotate(-90 14 {})">{yl}</text>"#,
        h / 2.0,
        h / 2.0
    );
    if let Some(title) = &opts.title {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="20" {font} text-anchor="middle">{}</text>"#,
            w / 2.0,
            escape(title)
        );
    }

    if all_equal {
        let (cx, cy) = frame.to_px(points[0]);
        let _ = writeln!(
            s,
            r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="4" fill="steelblue"/>"#
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.3}" y="{:.3}" {font}>({}, {})</text>"#,
            cx + 8.0,
            cy - 8.0,
            label(points[0][0]),
            label(points[0][1])
        );
    } else {
        s.push_str(r#"<polyline fill="none" stroke="steelblue" stroke-width="1" points=""#);
        for (n, p) in points.iter().enumerate() {
            let (x, y) = frame.to_px(*p);
            if n > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{x:.3},{y:.3}");
        }
        s.push_str("\"/>\n");
    }
    if let Some(m) = opts.marker {
        let (cx, cy) = frame.to_px(m);
        let _ = writeln!(
            s,
            r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="4" fill="none" stroke="crimson" stroke-width="2"/>"#
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}
