//! Minimal hand-rolled SVG output: closed polylines for range boundaries
//! plus star markers for barycenters. Figures are a presentation of data
//! that is always also emitted as CSV; nothing exists only in the picture.

pub struct Curve {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

const SIZE: f64 = 640.0;
const MARGIN: f64 = 48.0;

struct Mapper {
    x0: f64,
    y0: f64,
    scale: f64,
}

impl Mapper {
    fn new(points: impl Iterator<Item = (f64, f64)>) -> Self {
        let mut min_x = f64::INFINITY;
        let mut max_x = f64::NEG_INFINITY;
        let mut min_y = f64::INFINITY;
        let mut max_y = f64::NEG_INFINITY;
        for (x, y) in points {
            min_x = min_x.min(x);
            max_x = max_x.max(x);
            min_y = min_y.min(y);
            max_y = max_y.max(y);
        }
        if !min_x.is_finite() {
            (min_x, max_x, min_y, max_y) = (-1.0, 1.0, -1.0, 1.0);
        }
        let span = (max_x - min_x).max(max_y - min_y).max(1e-9);
        let scale = (SIZE - 2.0 * MARGIN) / span;
        // Center the data box inside the viewport.
        let x0 = (min_x + max_x) / 2.0 - span / 2.0;
        let y0 = (min_y + max_y) / 2.0 - span / 2.0;
        Self { x0, y0, scale }
    }

    fn map(&self, (x, y): (f64, f64)) -> (f64, f64) {
        (
            MARGIN + (x - self.x0) * self.scale,
            SIZE - MARGIN - (y - self.y0) * self.scale,
        )
    }
}

fn star_path(cx: f64, cy: f64, r: f64) -> String {
    // Four-spike star.
    let mut d = String::new();
    for k in 0..8 {
        let angle = std::f64::consts::TAU * k as f64 / 8.0;
        let radius = if k % 2 == 0 { r } else { r * 0.4 };
        let x = cx + radius * angle.cos();
        let y = cy + radius * angle.sin();
        d.push_str(if k == 0 { "M" } else { "L" });
        d.push_str(&format!("{x:.2},{y:.2} "));
    }
    d.push('Z');
    d
}

/// Renders closed boundary curves and barycenter stars into a standalone
/// SVG document.
pub fn figure_svg(title: &str, curves: &[Curve], stars: &[(f64, f64)]) -> String {
    let all = curves
        .iter()
        .flat_map(|c| c.points.iter().copied())
        .chain(stars.iter().copied());
    let mapper = Mapper::new(all);

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" \
         viewBox=\"0 0 {SIZE} {SIZE}\">\n"
    ));
    out.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{SIZE}\" height=\"{SIZE}\" fill=\"white\"/>\n"
    ));
    out.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" \
         text-anchor=\"middle\">{title}</text>\n",
        SIZE / 2.0
    ));
    for (i, curve) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut pts = String::new();
        for &p in &curve.points {
            let (x, y) = mapper.map(p);
            pts.push_str(&format!("{x:.2},{y:.2} "));
        }
        if let Some(&first) = curve.points.first() {
            let (x, y) = mapper.map(first);
            pts.push_str(&format!("{x:.2},{y:.2}"));
        }
        out.push_str(&format!(
            "  <polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{pts}\"/>\n"
        ));
        out.push_str(&format!(
            "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" \
             fill=\"{color}\">{}</text>\n",
            16.0,
            28.0 + 18.0 * (i as f64 + 1.0),
            curve.label
        ));
    }
    for &s in stars {
        let (x, y) = mapper.map(s);
        out.push_str(&format!(
            "  <path d=\"{}\" fill=\"#333333\"/>\n",
            star_path(x, y, 7.0)
        ));
    }
    out.push_str("</svg>\n");
    out
}
