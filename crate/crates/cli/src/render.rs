//! SVG frames of the scanning homotopy.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use metric_moduli::rational::{to_f64, Rational};
use metric_moduli::{homotopy_frame, HomotopyTime, ModuliPoint, ScanParameter};

#[derive(Clone, Debug, PartialEq)]
pub struct RenderSpec {
    pub frames: usize,
    pub out_dir: PathBuf,
    /// Width and height of each frame in pixels.
    pub size: u32,
    pub labels: bool,
}

/// Trims `-0.000` and fixes three decimals so output never depends on
/// rounding noise in the last bits.
fn num(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

fn position(turn: &Rational, size: u32) -> (f64, f64) {
    let c = size as f64 / 2.0;
    let r = size as f64 * 0.36;
    let a = std::f64::consts::TAU * to_f64(turn);
    (c + r * a.cos(), c - r * a.sin())
}

/// One frame: the circle, the scan chord at `w`, and the vertices of `p`.
pub fn frame_svg(p: &ModuliPoint, w: &ScanParameter, size: u32, labels: bool, caption: &str) -> String {
    let c = size as f64 / 2.0;
    let r = size as f64 * 0.36;
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(s, r#"<rect width="{size}" height="{size}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<circle cx="{}" cy="{}" r="{}" fill="none" stroke="black" stroke-width="1.5"/>"#,
        num(c),
        num(c),
        num(r)
    );
    let (x1, y1) = position(w.w(), size);
    let (x2, y2) = position(&(Rational::from_integer(1.into()) - w.w()), size);
    let _ = writeln!(
        s,
        r##"<line class="scan" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#c0392b" stroke-width="1.5" stroke-dasharray="6 4"/>"##,
        num(x1),
        num(y1),
        num(x2),
        num(y2)
    );
    for q in p.points() {
        let (x, y) = position(&q.turn, size);
        if q.is_marked() {
            let _ = writeln!(
                s,
                r#"<circle class="marked" cx="{}" cy="{}" r="5" fill="black" stroke="black"/>"#,
                num(x),
                num(y)
            );
            if labels {
                let a = std::f64::consts::TAU * to_f64(&q.turn);
                let (lx, ly) = (c + (r + 16.0) * a.cos(), c - (r + 16.0) * a.sin());
                let marks: Vec<String> = q.marks.iter().map(|m| m.to_string()).collect();
                let _ = writeln!(
                    s,
                    r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle" dominant-baseline="middle">{}</text>"#,
                    num(lx),
                    num(ly),
                    marks.join(",")
                );
            }
        } else {
            let _ = writeln!(
                s,
                r#"<circle class="unmarked" cx="{}" cy="{}" r="5" fill="white" stroke="black" stroke-width="1.5"/>"#,
                num(x),
                num(y)
            );
        }
    }
    if labels {
        let _ = writeln!(s, r#"<text x="8" y="18" font-family="sans-serif" font-size="12">{caption}</text>"#);
    }
    s.push_str("</svg>\n");
    s
}

pub fn frame_name(k: usize) -> String {
    format!("frame_{k:04}.svg")
}

/// Writes `frame_0000.svg` onward. Frame `k` of `F` shows the homotopy at
/// time `k / (F - 1)`; a single frame shows `x` itself.
pub fn render_frames(x: &ModuliPoint, spec: &RenderSpec) -> Result<Vec<PathBuf>, String> {
    if spec.frames == 0 {
        return Err("frames must be at least 1".into());
    }
    std::fs::create_dir_all(&spec.out_dir).map_err(|e| format!("{}: {e}", spec.out_dir.display()))?;
    let last = (spec.frames - 1).max(1);
    let mut written = Vec::with_capacity(spec.frames);
    for k in 0..spec.frames {
        let tau = Rational::new((k as i64).into(), (last as i64).into());
        let time = HomotopyTime::new(tau.clone()).expect("k <= frames - 1");
        let w = time.scan_parameter();
        let frame = homotopy_frame(x, &time);
        let caption = format!("tau = {tau}, w = {}", w.w());
        let svg = frame_svg(&frame, &w, spec.size, spec.labels, &caption);
        let path = Path::new(&spec.out_dir).join(frame_name(k));
        std::fs::write(&path, svg).map_err(|e| format!("{}: {e}", path.display()))?;
        written.push(path);
    }
    Ok(written)
}
