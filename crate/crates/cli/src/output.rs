use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use shiftlab_core::criteria::CriterionReport;

use crate::error::CliError;
use crate::runner::RunReport;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn io(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn write(path: PathBuf, contents: &str, written: &mut Vec<PathBuf>) -> Result<(), CliError> {
    fs::write(&path, contents).map_err(|e| io(&path, e))?;
    written.push(path);
    Ok(())
}

/// Writes `report.json`, one `<check>.csv` per check and one `<check>__<quantity>.svg`
/// per recorded quantity. Returns the paths written.
pub fn write_outputs(dir: &Path, run: &RunReport) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let mut written = Vec::new();
    let json = serde_json::to_string_pretty(run).map_err(|e| CliError::Io(e.to_string()))?;
    write(dir.join("report.json"), &(json + "\n"), &mut written)?;
    for o in &run.outcomes {
        let r = &o.report;
        write(dir.join(format!("{}.csv", r.check)), &r.to_csv(), &mut written)?;
        for q in r.quantities() {
            write(dir.join(format!("{}__{q}.svg", r.check)), &svg_plot(r, &q), &mut written)?;
        }
    }
    Ok(written)
}

/// `log10(value)` against `t_k`, one polyline per index `j`; zero values are skipped.
pub fn svg_plot(report: &CriterionReport, quantity: &str) -> String {
    let series: Vec<(i64, Vec<(f64, f64)>)> = report
        .indices()
        .into_iter()
        .map(|j| {
            let pts = report
                .points(j, quantity)
                .into_iter()
                .filter(|&(_, _, v)| v > 0.0 && v.is_finite())
                .map(|(_, t, v)| (t as f64, v.log10()))
                .collect();
            (j, pts)
        })
        .filter(|(_, pts): &(i64, Vec<(f64, f64)>)| !pts.is_empty())
        .collect();
    let all = series.iter().flat_map(|(_, p)| p.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-12 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-family="sans-serif" font-size="14">{} / {}</text>"#,
        WIDTH / 2.0,
        report.check,
        quantity
    );
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        s,
        r#"<path d="M{left:.1},{top:.1} L{left:.1},{bottom:.1} L{right:.1},{bottom:.1}" stroke="black" fill="none"/>"#
    );
    for (label, x, y) in [
        (format!("{x0:.0}"), left, bottom + 16.0),
        (format!("{x1:.0}"), right, bottom + 16.0),
    ] {
        let _ = writeln!(
            s,
            r#"<text x="{x:.1}" y="{y:.1}" text-anchor="middle" font-family="sans-serif" font-size="11">{label}</text>"#
        );
    }
    for (label, y) in [(format!("{y0:.2}"), bottom), (format!("{y1:.2}"), top)] {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-family="sans-serif" font-size="11">{label}</text>"#,
            left - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="12">n_k</text>"#,
        WIDTH / 2.0,
        HEIGHT - 16.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="12" transform="rotate(-90 16 {:.1})">log10 value</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    for (i, (j, pts)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" stroke="{color}" fill="none" stroke-width="1.5"><title>j = {j}</title></polyline>"#,
            path.join(" ")
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" fill="{color}">j = {j}</text>"#,
            right - 40.0,
            top + 14.0 * i as f64
        );
    }
    s.push_str("</svg>\n");
    s
}
