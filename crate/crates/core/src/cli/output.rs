//! Number formatting, CSV tables, the error log and optional SVG plots.

use std::fmt::Write as _;
use std::path::Path;

use plotters::prelude::*;

/// `%.12g`-style formatting: 12 significant digits, no locale, trailing zeros trimmed.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.11e}");
    let (mant, exp) = sci.split_once('e').expect("exponent in scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        trim_zeros(format!("{:.*}", (11 - exp) as usize, v))
    } else {
        format!("{}e{}", trim_zeros(mant.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// A rectangular table with a leading numeric key column.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub key: String,
    pub columns: Vec<String>,
    pub rows: Vec<(f64, Vec<Option<f64>>)>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.key);
        for c in &self.columns {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for (k, vals) in &self.rows {
            out.push_str(&fmt_num(*k));
            for v in vals {
                out.push(',');
                if let Some(v) = v {
                    out.push_str(&fmt_num(*v));
                }
            }
            out.push('\n');
        }
        out
    }
}

/// One line of `errors.log`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorLine {
    pub command: &'static str,
    pub x: f64,
    pub scheme: String,
    pub kind: &'static str,
    pub message: String,
}

pub fn error_log(lines: &[ErrorLine]) -> String {
    let mut out = String::new();
    for l in lines {
        let msg: String = l
            .message
            .chars()
            .map(|c| if c == ',' || c == '\n' { ';' } else { c })
            .collect();
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            l.command,
            fmt_num(l.x),
            l.scheme,
            l.kind,
            msg
        );
    }
    out
}

/// Line chart of every column against the key column.
pub fn plot_table(path: &Path, table: &Table, y_label: &str) -> Result<(), String> {
    let pts: Vec<Vec<(f64, f64)>> = (0..table.columns.len())
        .map(|j| {
            table
                .rows
                .iter()
                .filter_map(|(x, v)| v[j].filter(|y| y.is_finite()).map(|y| (*x, y)))
                .collect()
        })
        .collect();
    let all: Vec<&(f64, f64)> = pts.iter().flatten().collect();
    if all.is_empty() {
        return Ok(());
    }
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for &&(x, y) in &all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let pad = 0.05 * (y1 - y0);
    let root = SVGBackend::new(path, (800, 560)).into_drawing_area();
    let err = |e: &dyn std::fmt::Display| e.to_string();
    root.fill(&WHITE).map_err(|e| err(&e))?;
    let mut chart = ChartBuilder::on(&root)
        .margin(16)
        .x_label_area_size(40)
        .y_label_area_size(60)
        .build_cartesian_2d(x0..x1, (y0 - pad)..(y1 + pad))
        .map_err(|e| err(&e))?;
    chart
        .configure_mesh()
        .x_desc(table.key.as_str())
        .y_desc(y_label)
        .draw()
        .map_err(|e| err(&e))?;
    for (j, series) in pts.into_iter().enumerate() {
        let color = Palette99::pick(j).to_rgba();
        chart
            .draw_series(LineSeries::new(series, color.stroke_width(2)))
            .map_err(|e| err(&e))?
            .label(table.columns[j].clone())
            .legend(move |(x, y)| {
                PathElement::new(vec![(x, y), (x + 18, y)], color.stroke_width(2))
            });
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(|e| err(&e))?;
    root.present().map_err(|e| err(&e))?;
    Ok(())
}
