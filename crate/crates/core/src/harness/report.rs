//! CSV rows, JSON summary, and a log-log SVG plot.

use super::run::{RateReport, RateRow};
use crate::{Error, Result};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone)]
pub struct EmittedFiles {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub svg: PathBuf,
}

pub fn write_rows_csv<W: std::io::Write>(rows: &[RateRow], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn read_rows_csv<R: std::io::Read>(r: R) -> Result<Vec<RateRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut rows = Vec::new();
    for rec in rdr.deserialize() {
        rows.push(rec?);
    }
    Ok(rows)
}

pub fn read_rows_file(path: &Path) -> Result<Vec<RateRow>> {
    let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_rows_csv(f)
}

pub fn summary_json(report: &RateReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)?)
}

/// Summary without rows.
pub fn read_summary(path: &Path) -> Result<RateReport> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Log-log scatter of the rows, per-`n` medians, the fitted line, and the
/// theoretical slope anchored at the first median.
pub fn render_svg(report: &RateReport) -> String {
    const W: f64 = 640.0;
    const H: f64 = 440.0;
    const L: f64 = 70.0;
    const R: f64 = 20.0;
    const T: f64 = 40.0;
    const B: f64 = 50.0;
    let pts: Vec<(f64, f64)> = report
        .rows
        .iter()
        .filter(|r| r.ok() && r.excess01 > 0.0)
        .map(|r| ((r.n as f64).ln(), r.excess01.ln()))
        .collect();
    let meds: Vec<(f64, f64)> = report
        .per_n
        .iter()
        .filter(|s| s.median01 > 0.0)
        .map(|s| ((s.n as f64).ln(), s.median01.ln()))
        .collect();
    let all: Vec<(f64, f64)> = pts.iter().chain(&meds).copied().collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if all.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-9 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 < 1e-9 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let pad = 0.05 * (y1 - y0);
    let (y0, y1) = (y0 - pad, y1 + pad);
    let px = |x: f64| L + (x - x0) / (x1 - x0) * (W - L - R);
    let py = |y: f64| H - B - (y - y0) / (y1 - y0) * (H - T - B);

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" font-family="sans-serif" font-size="14" text-anchor="middle">{} ({})</text>"#,
        W / 2.0,
        esc(&report.name),
        esc(&report.estimator)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{L}" y="{T}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - L - R,
        H - T - B
    );
    for sm in &report.per_n {
        let x = px((sm.n as f64).ln());
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
            H - B + 16.0,
            sm.n
        );
    }
    let dec0 = (y0 / std::f64::consts::LN_10).ceil() as i32;
    let dec1 = (y1 / std::f64::consts::LN_10).floor() as i32;
    for e in dec0..=dec1 {
        let y = py(e as f64 * std::f64::consts::LN_10);
        let _ = writeln!(s, r##"<line x1="{L}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#ddd"/>"##, W - R);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">1e{e}</text>"#,
            L - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">n</text>"#,
        (L + W - R) / 2.0,
        H - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 16 {})">excess 0-1 risk</text>"#,
        (T + H - B) / 2.0,
        (T + H - B) / 2.0
    );
    for &(x, y) in &pts {
        let _ = writeln!(s, r##"<circle cx="{:.2}" cy="{:.2}" r="2" fill="#999"/>"##, px(x), py(y));
    }
    for &(x, y) in &meds {
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="black"/>"#, px(x), py(y));
    }
    let clip = |a: f64| a.clamp(T, H - B);
    if let Some(f) = &report.fit {
        let (ya, yb) = (f.intercept + f.slope * x0, f.intercept + f.slope * x1);
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#c0392b" stroke-width="2"/>"##,
            px(x0),
            clip(py(ya)),
            px(x1),
            clip(py(yb))
        );
    }
    if let Some(&(mx, my)) = meds.first() {
        let k = report.theory_slope();
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#2c6fbb" stroke-width="1.5" stroke-dasharray="6 4"/>"##,
            px(x0),
            clip(py(my + k * (x0 - mx))),
            px(x1),
            clip(py(my + k * (x1 - mx)))
        );
    }
    let slope = report.fit.map_or("n/a".to_string(), |f| format!("{:.3} ± {:.3}", f.slope, f.ci_halfwidth));
    let _ = writeln!(
        s,
        r##"<text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="#c0392b">fit slope {}</text>"##,
        L + 8.0,
        T + 16.0,
        esc(&slope)
    );
    let _ = writeln!(
        s,
        r##"<text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="#2c6fbb">theory slope {:.3}</text>"##,
        L + 8.0,
        T + 30.0,
        report.theory_slope()
    );
    s.push_str("</svg>\n");
    s
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Writes `<stem>.csv`, `<stem>.json` and `<stem>.svg` into `dir`.
pub fn emit_report(report: &RateReport, dir: &Path, stem: &str) -> Result<EmittedFiles> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = EmittedFiles {
        csv: dir.join(format!("{stem}.csv")),
        json: dir.join(format!("{stem}.json")),
        svg: dir.join(format!("{stem}.svg")),
    };
    let mut buf = Vec::new();
    write_rows_csv(&report.rows, &mut buf)?;
    write_file(&files.csv, &buf)?;
    write_file(&files.json, summary_json(report)?.as_bytes())?;
    write_file(&files.svg, render_svg(report).as_bytes())?;
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::run::summarize;

    fn report() -> RateReport {
        let mut rows = Vec::new();
        for (i, n) in [64usize, 128, 256, 512].into_iter().enumerate() {
            for k in 0..5u64 {
                let v = 0.3 * (n as f64).powf(-0.5) * (1.0 + 0.01 * k as f64);
                rows.push(RateRow {
                    n,
                    seed: 100 * i as u64 + k,
                    estimator: "mock".into(),
                    excess01: v,
                    excess_hinge: 2.0 * v,
                    wallclock_ms: 0.0,
                    status: "ok".into(),
                });
            }
        }
        rows[3].status = "capacity: 10 > 1".into();
        rows[3].excess01 = f64::NAN;
        rows[3].excess_hinge = f64::NAN;
        summarize("demo <a&b>", 5, rows, 0.5, Some([-0.6, -0.4]))
    }

    #[test]
    fn emits_three_files() {
        let rep = report();
        let dir = tempfile::tempdir().unwrap();
        let files = emit_report(&rep, dir.path(), "demo").unwrap();
        let rows = read_rows_file(&files.csv).unwrap();
        assert_eq!(rows.len(), 20);
        assert!(rows[3].excess01.is_nan());
        let text = std::fs::read_to_string(&files.csv).unwrap();
        assert!(text.starts_with("n,seed,estimator,excess01,excess_hinge,wallclock_ms,status\n"));
        assert!(std::fs::metadata(&files.svg).unwrap().len() > 0);
        assert!(rep.passed);
        assert_eq!(rep.warnings, 1);
    }

    #[test]
    fn summary_round_trip_keeps_slope() {
        let rep = report();
        let dir = tempfile::tempdir().unwrap();
        let files = emit_report(&rep, dir.path(), "demo").unwrap();
        let back = read_summary(&files.json).unwrap();
        let (a, b) = (rep.fit.unwrap().slope, back.fit.unwrap().slope);
        assert!((a - b).abs() <= 1e-12 * a.abs());
        assert_eq!(format!("{a:.12e}"), format!("{b:.12e}"));
        assert!(back.rows.is_empty());
        assert_eq!(back.per_n, rep.per_n);
    }

    #[test]
    fn rerender_from_csv_matches() {
        let rep = report();
        let mut buf = Vec::new();
        write_rows_csv(&rep.rows, &mut buf).unwrap();
        let rows = read_rows_csv(&buf[..]).unwrap();
        let again = summarize(&rep.name, rep.master_seed, rows, rep.theory_exponent, rep.accept_band);
        assert_eq!(again.fit, rep.fit);
        assert_eq!(render_svg(&again), render_svg(&rep));
    }

    #[test]
    fn io_errors_carry_path() {
        let rep = report();
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        std::fs::write(&blocker, b"x").unwrap();
        let err = emit_report(&rep, &blocker.join("sub"), "demo").unwrap_err();
        assert!(err.to_string().contains("file"), "{err}");
    }
}
