//! SVG rendering of PR curves over the unachievable region.
//!
//! Every plot carries the minimum PR curve for each distinct skew it shows;
//! there is no switch to leave it out. Output is byte-for-byte deterministic.

use std::fmt::Write as _;

use prspace::bounds::recall_grid;
use prspace::{aucnpr, aucpr, aucpr_min_range, min_precision, PRCurve, RecallRange};

use crate::error::{CliError, Result};
use crate::format::sig6;

pub const DEFAULT_WIDTH: u32 = 800;
pub const DEFAULT_HEIGHT: u32 = 600;

const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 240.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 60.0;
const MIN_CURVE_SAMPLES: usize = 200;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

pub struct NamedCurve {
    pub name: String,
    pub curve: PRCurve,
}

pub struct PlotSpec {
    pub curves: Vec<NamedCurve>,
    /// Overlay skews. When empty, the skews of `curves` are used.
    pub skews: Vec<f64>,
    pub range: RecallRange,
    pub width: u32,
    pub height: u32,
}

impl PlotSpec {
    pub fn new(curves: Vec<NamedCurve>, skews: Vec<f64>, range: RecallRange) -> Self {
        Self {
            curves,
            skews,
            range,
            width: DEFAULT_WIDTH,
            height: DEFAULT_HEIGHT,
        }
    }

    /// Distinct overlay skews in ascending order.
    pub fn overlay_skews(&self) -> Vec<f64> {
        let mut skews: Vec<f64> = if self.skews.is_empty() {
            self.curves.iter().map(|c| c.curve.skew()).collect()
        } else {
            self.skews.clone()
        };
        skews.sort_by(f64::total_cmp);
        skews.dedup();
        skews
    }
}

pub fn escape_xml(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

struct Frame {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    range: RecallRange,
}

impl Frame {
    fn x(&self, recall: f64) -> f64 {
        self.x0 + (recall - self.range.lo()) / self.range.width() * self.w
    }

    fn y(&self, precision: f64) -> f64 {
        self.y0 + (1.0 - precision) * self.h
    }

    fn coords(&self, pts: &[(f64, f64)]) -> String {
        let mut s = String::new();
        for (i, &(r, p)) in pts.iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{:.2},{:.2}", self.x(r), self.y(p));
        }
        s
    }
}

/// Points along the count-space interpolation, clipped to `range`.
fn curve_points(curve: &PRCurve, range: RecallRange) -> Vec<(f64, f64)> {
    let pos = curve.balance().pos() as f64;
    let cuts = curve.cutpoints().points();
    let sub = if cuts.len() > 200 { 1 } else { 16 };
    let (lo, hi) = (range.lo(), range.hi());
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let ((ta, fa), (tb, fb)) = (
            (w[0].0 as f64, w[0].1 as f64),
            (w[1].0 as f64, w[1].1 as f64),
        );
        if tb == ta {
            let r = tb / pos;
            if tb > 0.0 && (lo..=hi).contains(&r) {
                out.push((r, tb / (tb + fb)));
            }
            continue;
        }
        let slope = (fb - fa) / (tb - ta);
        let fp = |tp: f64| fa + slope * (tp - ta);
        let prec = |tp: f64| {
            if tp == 0.0 && fp(0.0) == 0.0 {
                1.0 / (1.0 + slope)
            } else {
                tp / (tp + fp(tp))
            }
        };
        let (ra, rb) = ((ta / pos).max(lo), (tb / pos).min(hi));
        if ra > rb {
            continue;
        }
        for i in 0..=sub {
            let r = ra + (rb - ra) * i as f64 / sub as f64;
            out.push((r, prec(r * pos)));
        }
    }
    out.dedup();
    out
}

pub fn render(spec: &PlotSpec) -> Result<String> {
    let skews = spec.overlay_skews();
    if skews.is_empty() {
        return Err(CliError::Usage(
            "nothing to plot: give an input file or a skew".into(),
        ));
    }
    let range = spec.range;
    let (width, height) = (spec.width as f64, spec.height as f64);
    let frame = Frame {
        x0: MARGIN_LEFT,
        y0: MARGIN_TOP,
        w: width - MARGIN_LEFT - MARGIN_RIGHT,
        h: height - MARGIN_TOP - MARGIN_BOTTOM,
        range,
    };
    if frame.w < 50.0 || frame.h < 50.0 {
        return Err(CliError::Usage(format!(
            "plot size {}x{} is too small",
            spec.width, spec.height
        )));
    }

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}" font-family="sans-serif" font-size="12">"#,
        spec.width, spec.height, spec.width, spec.height
    );
    let _ = writeln!(svg, "<title>Precision-recall curves</title>");
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{}" height="{}" fill="white"/>"#,
        spec.width, spec.height
    );

    axes(&mut svg, &frame);

    let grid = recall_grid(
        range.lo(),
        range.hi(),
        range.width() / MIN_CURVE_SAMPLES as f64,
    );
    let mut min_curves = Vec::with_capacity(skews.len());
    for &skew in &skews {
        let pts = grid
            .iter()
            .map(|&r| Ok((r, min_precision(r, skew)?)))
            .collect::<Result<Vec<_>>>()?;
        min_curves.push((skew, pts));
    }

    let _ = writeln!(svg, r#"<g id="unachievable-regions">"#);
    for (skew, pts) in &min_curves {
        let mut region = vec![(range.lo(), 0.0)];
        region.extend(pts);
        region.push((range.hi(), 0.0));
        let _ = writeln!(
            svg,
            r##"<polygon class="unachievable" data-skew="{}" points="{}" fill="#808080" fill-opacity="0.25" stroke="none"/>"##,
            sig6(*skew),
            frame.coords(&region)
        );
    }
    let _ = writeln!(svg, "</g>");

    let _ = writeln!(svg, r#"<g id="minimum-curves">"#);
    for (skew, pts) in &min_curves {
        let _ = writeln!(
            svg,
            r##"<polyline class="min-curve" data-skew="{}" points="{}" fill="none" stroke="#404040" stroke-width="1.5" stroke-dasharray="6,3"/>"##,
            sig6(*skew),
            frame.coords(pts)
        );
    }
    let _ = writeln!(svg, "</g>");

    let _ = writeln!(svg, r#"<g id="pr-curves">"#);
    for (i, c) in spec.curves.iter().enumerate() {
        let _ = writeln!(
            svg,
            r#"<polyline class="pr-curve" data-name="{}" points="{}" fill="none" stroke="{}" stroke-width="2"/>"#,
            escape_xml(&c.name),
            frame.coords(&curve_points(&c.curve, range)),
            PALETTE[i % PALETTE.len()]
        );
    }
    let _ = writeln!(svg, "</g>");

    panel(&mut svg, spec, &frame, &min_curves)?;
    let _ = writeln!(svg, "</svg>");
    Ok(svg)
}

fn axes(svg: &mut String, frame: &Frame) {
    let range = frame.range;
    let _ = writeln!(svg, r#"<g id="axes" stroke="black" fill="none">"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}"/>"#,
        frame.x0, frame.y0, frame.w, frame.h
    );
    let bottom = frame.y0 + frame.h;
    for i in 0..=5 {
        let r = range.lo() + range.width() * i as f64 / 5.0;
        let x = frame.x(r);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{bottom:.2}" x2="{x:.2}" y2="{:.2}"/>"#,
            bottom + 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle" stroke="none" fill="black">{}</text>"#,
            bottom + 20.0,
            sig6(r)
        );
    }
    for i in 0..=5 {
        let p = i as f64 / 5.0;
        let y = frame.y(p);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}"/>"#,
            frame.x0 - 5.0,
            frame.x0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" stroke="none" fill="black">{}</text>"#,
            frame.x0 - 8.0,
            y + 4.0,
            sig6(p)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" stroke="none" fill="black">Recall</text>"#,
        frame.x0 + frame.w / 2.0,
        bottom + 45.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" stroke="none" fill="black" transform="rotate(-90 {:.2} {:.2})">Precision</text>"#,
        frame.x0 - 45.0,
        frame.y0 + frame.h / 2.0,
        frame.x0 - 45.0,
        frame.y0 + frame.h / 2.0
    );
    let _ = writeln!(svg, "</g>");
}

/// Legend and annotations in the right-hand panel.
fn panel(
    svg: &mut String,
    spec: &PlotSpec,
    frame: &Frame,
    min_curves: &[(f64, Vec<(f64, f64)>)],
) -> Result<()> {
    let range = spec.range;
    let x = frame.x0 + frame.w + 20.0;
    let mut y = frame.y0 + 10.0;
    let span = if range.is_full() {
        String::new()
    } else {
        format!(" on [{}, {}]", sig6(range.lo()), sig6(range.hi()))
    };

    let _ = writeln!(svg, r#"<g id="annotations">"#);
    for (skew, _) in min_curves {
        let floor = aucpr_min_range(*skew, range)?;
        let _ = writeln!(svg, r#"<g class="annotation" data-skew="{}">"#, sig6(*skew));
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{y:.2}">π = {}</text>"#,
            sig6(*skew)
        );
        y += 15.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{y:.2}" font-size="11">AUCPR_MIN{} = {}</text>"#,
            x + 10.0,
            span,
            sig6(floor)
        );
        let _ = writeln!(svg, "</g>");
        y += 20.0;
    }
    let _ = writeln!(svg, "</g>");

    y += 10.0;
    let _ = writeln!(svg, r#"<g id="legend">"#);
    let _ = writeln!(
        svg,
        r##"<line x1="{x:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#404040" stroke-width="1.5" stroke-dasharray="6,3"/>"##,
        y - 4.0,
        x + 20.0,
        y - 4.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{y:.2}">minimum PR curve</text>"#,
        x + 26.0
    );
    y += 18.0;
    for (i, c) in spec.curves.iter().enumerate() {
        let area = aucpr(&c.curve, range)?.value;
        let norm = aucnpr(area, c.curve.skew(), range)?;
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{}" stroke-width="2"/>"#,
            y - 4.0,
            x + 20.0,
            y - 4.0,
            PALETTE[i % PALETTE.len()]
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{y:.2}">{}</text>"#,
            x + 26.0,
            escape_xml(&c.name)
        );
        y += 15.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{y:.2}" font-size="11">AUCPR{} = {}</text>"#,
            x + 26.0,
            span,
            sig6(area)
        );
        y += 14.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{y:.2}" font-size="11">AUCNPR = {}</text>"#,
            x + 26.0,
            sig6(norm)
        );
        y += 20.0;
    }
    let _ = writeln!(svg, "</g>");
    Ok(())
}
