//! CSV and SVG renderings of sweep tables.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{io_err, HarnessError, Result};
use crate::sweep::SweepRow;

pub const CSV_HEADER: &str = "epsilon,fidelity_protected,fidelity_unprotected";

#[derive(Serialize, Deserialize)]
struct CsvRow {
    epsilon: f64,
    fidelity_protected: f64,
    fidelity_unprotected: f64,
}

pub fn csv_string(rows: &[SweepRow]) -> String {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::with_capacity(64 * (rows.len() + 1)));
    w.write_record(CSV_HEADER.split(',')).expect("writing to memory");
    for r in rows {
        w.serialize(CsvRow {
            epsilon: r.epsilon,
            fidelity_protected: r.fidelity_protected,
            fidelity_unprotected: r.fidelity_unprotected,
        })
        .expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("CSV output is UTF-8")
}

pub fn emit_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(HarnessError::Config("refusing to write an empty table".into()));
    }
    std::fs::write(path, csv_string(rows)).map_err(io_err(path))
}

/// Parses [`csv_string`] output. Rows come back marked converged.
pub fn parse_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().map_err(csv_err)?;
    if header.iter().collect::<Vec<_>>().join(",") != CSV_HEADER {
        return Err(HarnessError::Csv {
            line: 1,
            reason: format!("expected header {CSV_HEADER:?}"),
        });
    }
    rdr.deserialize::<CsvRow>()
        .map(|r| {
            let r = r.map_err(csv_err)?;
            Ok(SweepRow {
                epsilon: r.epsilon,
                fidelity_protected: r.fidelity_protected,
                fidelity_unprotected: r.fidelity_unprotected,
                converged: true,
            })
        })
        .collect()
}

fn csv_err(e: csv::Error) -> HarnessError {
    HarnessError::Csv {
        line: e.position().map_or(0, |p| p.line() as usize),
        reason: e.to_string(),
    }
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 60.0;

pub fn svg_string(rows: &[SweepRow]) -> String {
    let x_min = rows.first().map_or(0.0, |r| r.epsilon);
    let x_max = rows.last().map_or(1.0, |r| r.epsilon).max(x_min + 1e-12);
    let lowest = rows
        .iter()
        .flat_map(|r| [r.fidelity_protected, r.fidelity_unprotected])
        .fold(1.0f64, f64::min);
    let y_min = ((lowest * 10.0).floor() / 10.0).clamp(0.0, 0.9);
    let y_max = 1.0;
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x_min) / (x_max - x_min) * plot_w;
    let py = |y: f64| TOP + (y_max - y) / (y_max - y_min) * plot_h;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let (x0, y0, x1, y1) = (px(x_min), py(y_min), px(x_max), py(y_max));
    let _ = writeln!(
        s,
        r#"<path d="M{x0:.2} {y1:.2} L{x0:.2} {y0:.2} L{x1:.2} {y0:.2}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let xv = x_min + (x_max - x_min) * i as f64 / 4.0;
        let yv = y_min + (y_max - y_min) * i as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{xv:.3}</text>"#,
            px(xv),
            y0 + 18.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end">{yv:.3}</text>"#,
            x0 - 6.0,
            py(yv) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="16" text-anchor="middle">ε</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" font-size="16" text-anchor="middle">F</text>"#,
        TOP + plot_h / 2.0
    );
    for (color, pick) in [
        ("red", (|r: &SweepRow| r.fidelity_protected) as fn(&SweepRow) -> f64),
        ("blue", |r: &SweepRow| r.fidelity_unprotected),
    ] {
        let points: Vec<String> = rows.iter().map(|r| format!("{:.2},{:.2}", px(r.epsilon), py(pick(r)))).collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            points.join(" ")
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" fill="red">protected</text>"#,
        x1 - 90.0,
        y1 + 16.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" fill="blue">unprotected</text>"#,
        x1 - 90.0,
        y1 + 32.0
    );
    s.push_str("</svg>\n");
    s
}

pub fn emit_svg(rows: &[SweepRow], path: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(HarnessError::Config("refusing to plot an empty table".into()));
    }
    std::fs::write(path, svg_string(rows)).map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> Vec<SweepRow> {
        vec![
            SweepRow {
                epsilon: 0.0,
                fidelity_protected: 1.0,
                fidelity_unprotected: 0.9999999999999998,
                converged: true,
            },
            SweepRow {
                epsilon: 0.2,
                fidelity_protected: 0.967038123456789,
                fidelity_unprotected: 0.5978551234567,
                converged: true,
            },
        ]
    }

    #[test]
    fn csv_shape_and_round_trip() {
        let text = csv_string(&table());
        assert_eq!(text.lines().count(), 3);
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
        let back = parse_csv(&text).unwrap();
        for (a, b) in back.iter().zip(table()) {
            assert!((a.epsilon - b.epsilon).abs() < 1e-12);
            assert!((a.fidelity_protected - b.fidelity_protected).abs() < 1e-12);
            assert!((a.fidelity_unprotected - b.fidelity_unprotected).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_errors() {
        assert!(parse_csv("eps,f\n").is_err());
        assert!(parse_csv(&format!("{CSV_HEADER}\n0.1,0.2\n")).is_err());
        assert!(parse_csv(&format!("{CSV_HEADER}\n0.1,x,0.3\n")).is_err());
        assert!(emit_csv(&[], Path::new("/nonexistent/out.csv")).is_err());
        assert!(emit_csv(&table(), Path::new("/nonexistent/dir/out.csv")).is_err());
    }

    #[test]
    fn svg_structure() {
        let svg = svg_string(&table());
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains(">ε</text>") && svg.contains(">F</text>"));
        assert!(svg.starts_with("<?xml"));
    }
}
