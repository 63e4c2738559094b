//! Minimal SVG histogram writer: bars from an empirical density plus an
//! overlaid reference curve, no plotting dependency.

use qilab::ensembles::Histogram;

const W: f64 = 640.0;
const H: f64 = 400.0;
const MARGIN: f64 = 45.0;

pub fn histogram_svg(
    hist: &Histogram,
    curve: impl Fn(f64) -> f64,
    title: &str,
) -> String {
    let (x_lo, x_hi) = (hist.edges[0], *hist.edges.last().unwrap());
    let span = (x_hi - x_lo).max(1e-12);
    let curve_pts: Vec<(f64, f64)> = (0..=256)
        .map(|i| {
            let x = x_lo + span * i as f64 / 256.0;
            (x, curve(x))
        })
        .collect();
    let y_max = hist
        .density
        .iter()
        .cloned()
        .chain(curve_pts.iter().map(|&(_, y)| y))
        .fold(1e-12f64, f64::max)
        * 1.05;
    let px = |x: f64| MARGIN + (x - x_lo) / span * (W - 2.0 * MARGIN);
    let py = |y: f64| H - MARGIN - (y / y_max).clamp(0.0, 1.0) * (H - 2.0 * MARGIN);

    let timestamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\">\n<!-- rendered at unix time {timestamp} -->\n\
         <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
        W / 2.0,
        xml_escape(title)
    );
    // bars
    for (i, &d) in hist.density.iter().enumerate() {
        let (a, b) = (hist.edges[i], hist.edges[i + 1]);
        svg.push_str(&format!(
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" \
             fill=\"#7aa6d6\" stroke=\"#3a6ea5\" stroke-width=\"0.5\"/>\n",
            px(a),
            py(d),
            (px(b) - px(a)).max(0.0),
            (py(0.0) - py(d)).max(0.0),
        ));
    }
    // overlay curve
    let pts: Vec<String> = curve_pts
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
        .collect();
    svg.push_str(&format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#b03030\" stroke-width=\"1.8\"/>\n",
        pts.join(" ")
    ));
    // axes
    svg.push_str(&format!(
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = MARGIN,
        b = H - MARGIN,
        r = W - MARGIN,
        t = MARGIN,
    ));
    for i in 0..=4 {
        let x = x_lo + span * i as f64 / 4.0;
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"11\">{:.2}</text>\n",
            px(x),
            H - MARGIN + 16.0,
            x
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
