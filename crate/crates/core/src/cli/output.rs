//! CSV and SVG emission.

use std::fmt::Write as _;

/// Fixed-width scientific notation; `+inf`, `-inf` and `nan` spelled out.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "+inf".into() } else { "-inf".into() }
    } else {
        format!("{:.12e}", x + 0.0)
    }
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map_or_else(|| "nan".into(), num)
}

/// `#`-prefixed metadata lines.
#[derive(Debug, Clone, Default)]
pub struct Header {
    lines: Vec<String>,
}

impl Header {
    pub fn new(command_line: &str) -> Self {
        let mut h = Self::default();
        h.push(format!("qcc {}", env!("CARGO_PKG_VERSION")));
        h.push(format!("command: {command_line}"));
        h
    }

    pub fn push(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    pub fn render(&self) -> String {
        self.lines.iter().map(|l| format!("# {l}\n")).collect()
    }
}

/// A CSV table with a metadata header. Cells are written as given, so
/// callers format numbers with [`num`].
#[derive(Debug, Clone)]
pub struct Csv {
    pub header: Header,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(header: Header, columns: &[&str]) -> Self {
        Self {
            header,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn render(&self) -> String {
        let mut s = self.header.render();
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

/// One named line of a plot.
#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Polyline chart. Non-finite points (and non-positive `x` on a log axis)
/// are dropped.
pub fn svg_plot(series: &[Series], x_label: &str, y_label: &str, log_x: bool) -> String {
    let tx = |x: f64| if log_x { x.log10() } else { x };
    let kept: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| {
            s.points
                .iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite() && (!log_x || *x > 0.0))
                .map(|&(x, y)| (tx(x), y))
                .collect()
        })
        .collect();
    let all = kept.iter().flatten();
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
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    let x_axis = if log_x { format!("log10 {x_label}") } else { x_label.to_string() };
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 15.0,
        escape(&x_axis)
    );
    let _ = writeln!(
        s,
        r#"<text x="15" y="{}" transform="rotate(-90 15 {})" text-anchor="middle">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
    for (v, anchor, x, y) in [
        (x0, "start", MARGIN, HEIGHT - MARGIN + 18.0),
        (x1, "end", WIDTH - MARGIN, HEIGHT - MARGIN + 18.0),
    ] {
        let _ = writeln!(s, r#"<text x="{x}" y="{y}" text-anchor="{anchor}">{v:.3}</text>"#);
    }
    for (v, y) in [(y0, HEIGHT - MARGIN), (y1, MARGIN)] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{y}" text-anchor="end">{v:.3e}</text>"#,
            MARGIN - 5.0
        );
    }
    for (k, (pts, meta)) in kept.iter().zip(series).enumerate() {
        let color = COLORS[k % COLORS.len()];
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            path.join(" ")
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" fill="{color}">{}</text>"#,
            MARGIN + 10.0,
            MARGIN + 18.0 * (k as f64 + 1.0),
            escape(&meta.name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_are_stable() {
        assert_eq!(num(1.5), "1.500000000000e0");
        assert_eq!(num(f64::INFINITY), "+inf");
        assert_eq!(opt_num(None), "nan");
    }

    #[test]
    fn csv_has_header_then_table() {
        let mut c = Csv::new(Header::new("qcc test"), &["a", "b"]);
        c.row(vec!["1".into(), "2".into()]);
        let text = c.render();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# qcc "));
        assert_eq!(lines[1], "# command: qcc test");
        assert_eq!(&lines[2..], ["a,b", "1,2"]);
    }

    #[test]
    fn svg_has_one_polyline_per_series() {
        let series = vec![
            Series { name: "one".into(), points: vec![(1.0, 0.1), (10.0, 0.2), (100.0, f64::NAN)] },
            Series { name: "two".into(), points: vec![(1.0, 0.3), (10.0, 0.4)] },
        ];
        let svg = svg_plot(&series, "g", "eps", true);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
    }
}
