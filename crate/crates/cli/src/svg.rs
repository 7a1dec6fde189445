//! SVG rendering of the image of a null-coordinate grid under a map.
//!
//! Output is deterministic for a fixed job and version: polylines only,
//! fixed 6-decimal formatting, viewBox = image bounding box padded 5%,
//! and a metadata block carrying the job hash and the count of samples
//! excluded by domain errors (which become gaps in the polylines).

use confmap::diffops::{Frame, SmoothMap};
use confmap::minkowski2::from_null;

use crate::job::JobSpec;

const LINES_PER_FAMILY: usize = 11;
const SAMPLES_PER_LINE: usize = 129;

struct Polyline {
    // display coordinates (X, -T)
    points: Vec<(f64, f64)>,
    family: usize, // 0 = u-lines, 1 = v-lines, 2 = overlay
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn job_hash(job: &JobSpec) -> String {
    let canonical = serde_json::to_string(job).expect("job serializes");
    format!("{:016x}", fnv1a64(canonical.as_bytes()))
}

fn inclusive_axis(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

/// Renders the image of the null grid over `bounds` (given in the map's
/// own frame) as an SVG document string.
pub fn render_grid(
    map: &SmoothMap,
    bounds: &[(f64, f64)],
    job: &JobSpec,
    draw_diamond: bool,
) -> String {
    let mut excluded = 0usize;
    let mut polylines: Vec<Polyline> = Vec::new();

    // Source null lines, expressed as point lists in the map's frame.
    let source_lines: Vec<(usize, Vec<[f64; 2]>)> = match map.frame() {
        Frame::Null => {
            let us = inclusive_axis(bounds[0].0, bounds[0].1, LINES_PER_FAMILY);
            let vs = inclusive_axis(bounds[1].0, bounds[1].1, LINES_PER_FAMILY);
            let v_dense = inclusive_axis(bounds[1].0, bounds[1].1, SAMPLES_PER_LINE);
            let u_dense = inclusive_axis(bounds[0].0, bounds[0].1, SAMPLES_PER_LINE);
            let mut lines = Vec::new();
            for &u in &us {
                lines.push((0, v_dense.iter().map(|&v| [u, v]).collect()));
            }
            for &v in &vs {
                lines.push((1, u_dense.iter().map(|&u| [u, v]).collect()));
            }
            lines
        }
        Frame::Cartesian => {
            // null bounds covering the Cartesian box
            let (x0, x1) = bounds[0];
            let (t0, t1) = bounds[1];
            let (ulo, uhi) = (x0 + t0, x1 + t1);
            let (vlo, vhi) = (x0 - t1, x1 - t0);
            let us = inclusive_axis(ulo, uhi, LINES_PER_FAMILY);
            let vs = inclusive_axis(vlo, vhi, LINES_PER_FAMILY);
            let inside = |x: f64, t: f64| x >= x0 && x <= x1 && t >= t0 && t <= t1;
            let mut lines = Vec::new();
            for &u in &us {
                let pts = inclusive_axis(vlo, vhi, SAMPLES_PER_LINE)
                    .into_iter()
                    .filter_map(|v| {
                        let (x, t) = from_null((u, v));
                        inside(x, t).then_some([x, t])
                    })
                    .collect::<Vec<_>>();
                if pts.len() >= 2 {
                    lines.push((0, pts));
                }
            }
            for &v in &vs {
                let pts = inclusive_axis(ulo, uhi, SAMPLES_PER_LINE)
                    .into_iter()
                    .filter_map(|u| {
                        let (x, t) = from_null((u, v));
                        inside(x, t).then_some([x, t])
                    })
                    .collect::<Vec<_>>();
                if pts.len() >= 2 {
                    lines.push((1, pts));
                }
            }
            lines
        }
    };

    for (family, pts) in source_lines {
        let mut current: Vec<(f64, f64)> = Vec::new();
        for p in pts {
            match map.eval(&p) {
                Ok(img) => {
                    let (x, t) = match map.frame() {
                        Frame::Null => from_null((img[0], img[1])),
                        Frame::Cartesian => (img[0], img[1]),
                    };
                    current.push((x, -t));
                }
                Err(_) => {
                    excluded += 1;
                    if current.len() >= 2 {
                        polylines.push(Polyline {
                            points: std::mem::take(&mut current),
                            family,
                        });
                    } else {
                        current.clear();
                    }
                }
            }
        }
        if current.len() >= 2 {
            polylines.push(Polyline {
                points: current,
                family,
            });
        }
    }

    if draw_diamond {
        // |X| + |T| = 1, plotted in display coordinates (symmetric in T)
        polylines.push(Polyline {
            points: vec![(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0), (1.0, 0.0)],
            family: 2,
        });
    }

    // bounding box of everything drawn, padded 5%
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for pl in &polylines {
        for &(x, y) in &pl.points {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
    }
    if !xmin.is_finite() {
        (xmin, xmax, ymin, ymax) = (-1.0, 1.0, -1.0, 1.0);
    }
    let pad_x = (0.05 * (xmax - xmin)).max(1e-6);
    let pad_y = (0.05 * (ymax - ymin)).max(1e-6);
    let (vx, vy) = (xmin - pad_x, ymin - pad_y);
    let (vw, vh) = (xmax - xmin + 2.0 * pad_x, ymax - ymin + 2.0 * pad_y);
    let stroke = 0.004 * vw.max(vh);

    let fmt = |x: f64| format!("{x:.6}");
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">\n",
        fmt(vx),
        fmt(vy),
        fmt(vw),
        fmt(vh)
    ));
    out.push_str(&format!(
        "<metadata>{{\"job_hash\":\"{}\",\"excluded_samples\":{},\"version\":\"{}\"}}</metadata>\n",
        job_hash(job),
        excluded,
        env!("CARGO_PKG_VERSION")
    ));
    out.push_str(&format!(
        "<g fill=\"none\" stroke-width=\"{}\" stroke-linejoin=\"round\">\n",
        fmt(stroke)
    ));
    for pl in &polylines {
        let color = match pl.family {
            0 => "#1f77b4",
            1 => "#d62728",
            _ => "#000000",
        };
        let extra = if pl.family == 2 {
            format!(" stroke-dasharray=\"{}\"", fmt(stroke * 3.0))
        } else {
            String::new()
        };
        let pts: Vec<String> = pl
            .points
            .iter()
            .map(|&(x, y)| format!("{},{}", fmt(x), fmt(y)))
            .collect();
        out.push_str(&format!(
            "<polyline stroke=\"{color}\"{extra} points=\"{}\"/>\n",
            pts.join(" ")
        ));
    }
    out.push_str("</g>\n</svg>\n");
    out
}
