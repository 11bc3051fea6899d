//! Static SVG figures: path polylines from knot CSVs, log-log moment scatter
//! with the fitted line, and overlaid empirical CDFs from law reports.

use std::fmt::Write as _;
use std::path::Path;

use klpath_core::Report;

use crate::CliError;

pub fn plot_file(input: &Path, output: &Path) -> Result<(), CliError> {
    let ext = input.extension().and_then(|e| e.to_str()).unwrap_or("");
    let svg = match ext {
        "csv" => path_svg(&read_path_csv(input)?),
        "json" => {
            let text = std::fs::read_to_string(input)
                .map_err(|e| CliError::Io(format!("{}: {e}", input.display())))?;
            let report: Report = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: not a report file: {e}", input.display())))?;
            if report.ks.is_some() {
                law_svg(&report)?
            } else if report.moments.is_some() {
                moment_svg(&report)?
            } else {
                return Err(CliError::Config(format!(
                    "{}: report carries neither moments nor law comparisons",
                    input.display()
                )));
            }
        }
        other => {
            return Err(CliError::Config(format!(
                "unsupported plot input extension `{other}` (expected csv or json)"
            )))
        }
    };
    std::fs::write(output, svg)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", output.display())))?;
    Ok(())
}

struct PathRow {
    re: f64,
    im: f64,
}

fn read_path_csv(input: &Path) -> Result<Vec<PathRow>, CliError> {
    let text = std::fs::read_to_string(input)
        .map_err(|e| CliError::Io(format!("{}: {e}", input.display())))?;
    let mut lines = text.lines();
    match lines.next() {
        Some("j,t,re,im") => {}
        _ => {
            return Err(CliError::Config(format!(
                "{}: expected header `j,t,re,im`",
                input.display()
            )))
        }
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(CliError::Config(format!(
                "{}:{}: expected 4 fields",
                input.display(),
                lineno + 2
            )));
        }
        let parse = |s: &str| {
            s.parse::<f64>().map_err(|e| {
                CliError::Config(format!("{}:{}: {e}", input.display(), lineno + 2))
            })
        };
        rows.push(PathRow { re: parse(fields[2])?, im: parse(fields[3])? });
    }
    if rows.is_empty() {
        return Err(CliError::Config(format!("{}: no knot rows", input.display())));
    }
    Ok(rows)
}

fn path_svg(rows: &[PathRow]) -> String {
    const SIZE: f64 = 800.0;
    const MARGIN: f64 = 60.0;
    let (mut lo_x, mut hi_x, mut lo_y, mut hi_y) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for r in rows {
        lo_x = lo_x.min(r.re);
        hi_x = hi_x.max(r.re);
        lo_y = lo_y.min(r.im);
        hi_y = hi_y.max(r.im);
    }
    let span = (hi_x - lo_x).max(hi_y - lo_y).max(1e-9);
    let cx = (lo_x + hi_x) / 2.0;
    let cy = (lo_y + hi_y) / 2.0;
    let scale = (SIZE - 2.0 * MARGIN) / span;
    let sx = |x: f64| SIZE / 2.0 + (x - cx) * scale;
    let sy = |y: f64| SIZE / 2.0 - (y - cy) * scale;

    let mut svg = String::new();
    let _ = write!(
        svg,
        r#"<svg version="1.1" width="{SIZE}" height="{SIZE}" xmlns="http://www.w3.org/2000/svg">"#
    );
    let _ = write!(svg, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    // axes through the origin when visible
    let _ = write!(
        svg,
        r#"<line x1="{}" y1="0" x2="{}" y2="{SIZE}" stroke="lightgray"/>"#,
        sx(0.0),
        sx(0.0)
    );
    let _ = write!(
        svg,
        r#"<line x1="0" y1="{}" x2="{SIZE}" y2="{}" stroke="lightgray"/>"#,
        sy(0.0),
        sy(0.0)
    );
    let mut points = String::new();
    for r in rows {
        let _ = write!(points, "{:.3},{:.3} ", sx(r.re), sy(r.im));
    }
    let _ = write!(
        svg,
        r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#,
        points.trim_end()
    );
    let _ = write!(
        svg,
        r#"<circle cx="{:.3}" cy="{:.3}" r="4" fill="seagreen"/>"#,
        sx(rows[0].re),
        sy(rows[0].im)
    );
    let last = rows.last().expect("nonempty");
    let _ = write!(
        svg,
        r#"<circle cx="{:.3}" cy="{:.3}" r="4" fill="crimson"/>"#,
        sx(last.re),
        sy(last.im)
    );
    let _ = write!(
        svg,
        r#"<text x="10" y="20" font-family="monospace" font-size="14">partial-sum path, {} knots</text>"#,
        rows.len()
    );
    svg.push_str("</svg>");
    svg
}

fn moment_svg(report: &Report) -> Result<String, CliError> {
    const W: f64 = 720.0;
    const H: f64 = 540.0;
    const MARGIN: f64 = 70.0;
    let gaps = report.gaps.as_ref().expect("checked by caller");
    let points: Vec<(f64, f64)> = gaps
        .iter()
        .filter_map(|g| g.mean_m_alpha.map(|m| (g.gap.log10(), m.log10())))
        .collect();
    if points.len() < 2 {
        return Err(CliError::Config("moment report has fewer than two usable gaps".into()));
    }
    let (lo_x, hi_x) = points.iter().fold((f64::MAX, f64::MIN), |a, p| (a.0.min(p.0), a.1.max(p.0)));
    let (lo_y, hi_y) = points.iter().fold((f64::MAX, f64::MIN), |a, p| (a.0.min(p.1), a.1.max(p.1)));
    let pad = |lo: f64, hi: f64| {
        let d = (hi - lo).max(1e-9) * 0.08;
        (lo - d, hi + d)
    };
    let (lo_x, hi_x) = pad(lo_x, hi_x);
    let (lo_y, hi_y) = pad(lo_y, hi_y);
    let sx = |x: f64| MARGIN + (x - lo_x) / (hi_x - lo_x) * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - (y - lo_y) / (hi_y - lo_y) * (H - 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = write!(
        svg,
        r#"<svg version="1.1" width="{W}" height="{H}" xmlns="http://www.w3.org/2000/svg">"#
    );
    let _ = write!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = write!(
        svg,
        r#"<line x1="{MARGIN}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        H - MARGIN,
        W - MARGIN,
        H - MARGIN
    );
    let _ = write!(
        svg,
        r#"<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{}" stroke="black"/>"#,
        H - MARGIN
    );
    for (x, y) in &points {
        let _ = write!(
            svg,
            r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="steelblue"/>"#,
            sx(*x),
            sy(*y)
        );
    }
    if let Some(slope) = report.fitted_slope {
        // line of the fitted slope through the centroid of the fit points
        let cx = points.iter().map(|p| p.0).sum::<f64>() / points.len() as f64;
        let cy = points.iter().map(|p| p.1).sum::<f64>() / points.len() as f64;
        let y_at = |x: f64| cy + slope * (x - cx);
        let _ = write!(
            svg,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="crimson" stroke-width="1.5"/>"#,
            sx(lo_x),
            sy(y_at(lo_x)),
            sx(hi_x),
            sy(y_at(hi_x))
        );
        let _ = write!(
            svg,
            r#"<text x="{}" y="30" font-family="monospace" font-size="14">fitted slope = {slope:.4}</text>"#,
            MARGIN
        );
    }
    let _ = write!(
        svg,
        r#"<text x="{}" y="{}" font-family="monospace" font-size="12">log10 gap</text>"#,
        W / 2.0 - 30.0,
        H - 20.0
    );
    let _ = write!(
        svg,
        r#"<text x="12" y="{}" font-family="monospace" font-size="12" transform="rotate(-90 16 {})">log10 moment</text>"#,
        H / 2.0,
        H / 2.0
    );
    svg.push_str("</svg>");
    Ok(svg)
}

fn law_svg(report: &Report) -> Result<String, CliError> {
    const W: f64 = 640.0;
    const PANEL_H: f64 = 240.0;
    const MARGIN: f64 = 45.0;
    let summaries = report
        .cdf_summaries
        .as_ref()
        .ok_or_else(|| CliError::Config("law report carries no CDF summaries".into()))?;
    let shown = summaries.len().min(8);
    let height = PANEL_H * shown as f64;
    let mut svg = String::new();
    let _ = write!(
        svg,
        r#"<svg version="1.1" width="{W}" height="{height}" xmlns="http://www.w3.org/2000/svg">"#
    );
    let _ = write!(svg, r#"<rect width="{W}" height="{height}" fill="white"/>"#);
    for (panel, summary) in summaries.iter().take(shown).enumerate() {
        let top = panel as f64 * PANEL_H;
        let lo = summary
            .path_quantiles
            .iter()
            .chain(&summary.limit_quantiles)
            .cloned()
            .fold(f64::MAX, f64::min);
        let hi = summary
            .path_quantiles
            .iter()
            .chain(&summary.limit_quantiles)
            .cloned()
            .fold(f64::MIN, f64::max);
        let span = (hi - lo).max(1e-9);
        let sx = |v: f64| MARGIN + (v - lo) / span * (W - 2.0 * MARGIN);
        let sy = |u: f64| top + PANEL_H - MARGIN - u * (PANEL_H - 2.0 * MARGIN);
        for (quantiles, color, dash) in [
            (&summary.path_quantiles, "steelblue", ""),
            (&summary.limit_quantiles, "crimson", r#" stroke-dasharray="6 3""#),
        ] {
            let mut pts = String::new();
            let denom = (quantiles.len() - 1).max(1) as f64;
            for (i, v) in quantiles.iter().enumerate() {
                let _ = write!(pts, "{:.2},{:.2} ", sx(*v), sy(i as f64 / denom));
            }
            let _ = write!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
                pts.trim_end()
            );
        }
        let ks_label = report
            .ks
            .as_ref()
            .and_then(|ks| ks.iter().find(|k| k.t == summary.t))
            .map(|k| if summary.part == "re" { k.re } else { k.im })
            .map(|d| format!(", KS = {d:.4}"))
            .unwrap_or_default();
        let _ = write!(
            svg,
            r#"<text x="{MARGIN}" y="{}" font-family="monospace" font-size="13">t = {}, {} part{} (solid: paths, dashed: limit)</text>"#,
            top + 22.0,
            summary.t,
            summary.part,
            ks_label
        );
    }
    svg.push_str("</svg>");
    Ok(svg)
}
