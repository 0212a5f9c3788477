//! Heatmaps of phase-space fields.
//!
//! The palette is anchored at zero: white at exactly 0, shading to full red
//! at the field maximum and to full blue at the field minimum. Position runs
//! left to right, momentum bottom to top.

use crate::field::PhaseSpaceField;

/// Keeps the colour scale finite when the field has only one sign: the empty
/// side of the palette spans at least this fraction of the peak magnitude.
pub const SCALE_FLOOR: f64 = 1e-3;

pub const ASCII_COLUMNS: usize = 80;
pub const ASCII_ROWS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Scale {
    lo: f64,
    hi: f64,
}

impl Scale {
    fn of(field: &PhaseSpaceField) -> Option<Self> {
        let peak = field.max_abs();
        if !(peak > 0.0) {
            return None;
        }
        Some(Self {
            lo: field.min_re().min(-SCALE_FLOOR * peak),
            hi: field.max_re().max(SCALE_FLOOR * peak),
        })
    }

    /// Signed position in `[−1, 1]`.
    fn level(&self, v: f64) -> f64 {
        if v >= 0.0 {
            (v / self.hi).min(1.0)
        } else {
            -(v / self.lo).min(1.0)
        }
    }
}

/// RGB colour of a signed level in `[−1, 1]`.
pub fn palette(level: f64) -> [u8; 3] {
    let fade = |t: f64| (255.0 * (1.0 - t.abs())).round() as u8;
    if level >= 0.0 {
        [255, fade(level), fade(level)]
    } else {
        [fade(level), fade(level), 255]
    }
}

/// Binary PPM (P6), one pixel per grid cell: `n_q` wide, `n_p` tall.
pub fn render_ppm(field: &PhaseSpaceField) -> Vec<u8> {
    let grid = field.grid();
    let (width, height) = (grid.n_q(), grid.n_p());
    let scale = Scale::of(field);
    let mut out = format!("P6\n{width} {height}\n255\n").into_bytes();
    out.reserve(3 * width * height);
    for row in 0..height {
        let k = height - 1 - row;
        for j in 0..width {
            let level = scale.map_or(0.0, |s| s.level(field.re(j, k)));
            out.extend_from_slice(&palette(level));
        }
    }
    out
}

/// Pixel at image coordinates `(x, y)` of a P6 buffer from [`render_ppm`].
pub fn ppm_pixel(ppm: &[u8], width: usize, x: usize, y: usize) -> Option<[u8; 3]> {
    let mut newlines = 0;
    let start = ppm.iter().position(|&b| {
        if b == b'\n' {
            newlines += 1;
        }
        newlines == 3
    })? + 1;
    let at = start + 3 * (y * width + x);
    ppm.get(at..at + 3).map(|p| [p[0], p[1], p[2]])
}

const POSITIVE_GLYPHS: &[u8] = b".:+*#";
const NEGATIVE_GLYPHS: &[u8] = b"-~xX";

fn glyph(level: f64) -> char {
    let pick = |glyphs: &[u8], t: f64| {
        let i = ((t * glyphs.len() as f64).ceil() as usize).clamp(1, glyphs.len()) - 1;
        glyphs[i] as char
    };
    if level.abs() < 0.02 {
        ' '
    } else if level > 0.0 {
        pick(POSITIVE_GLYPHS, level)
    } else {
        pick(NEGATIVE_GLYPHS, -level)
    }
}

/// Value of largest magnitude in the half-open index block.
fn block_extreme(field: &PhaseSpaceField, js: (usize, usize), ks: (usize, usize)) -> f64 {
    let grid = field.grid();
    let span = |(lo, hi): (usize, usize), n: usize| {
        let lo = lo.min(n - 1);
        lo..hi.clamp(lo + 1, n)
    };
    let mut best = 0.0f64;
    for j in span(js, grid.n_q()) {
        for k in span(ks, grid.n_p()) {
            let v = field.re(j, k);
            if v.abs() > best.abs() {
                best = v;
            }
        }
    }
    best
}

/// Coarse text preview, [`ASCII_COLUMNS`] wide. Each character shows the
/// value of largest magnitude in its block of cells. Positive values use
/// `.:+*#`, negative values `-~xX`.
pub fn render_ascii(field: &PhaseSpaceField) -> String {
    let grid = field.grid();
    let (n_q, n_p) = (grid.n_q(), grid.n_p());
    let scale = Scale::of(field);
    let mut out = String::with_capacity((ASCII_COLUMNS + 1) * ASCII_ROWS);
    for row in 0..ASCII_ROWS {
        let ks = (
            n_p - (row + 1) * n_p / ASCII_ROWS,
            n_p - row * n_p / ASCII_ROWS,
        );
        for col in 0..ASCII_COLUMNS {
            let js = (col * n_q / ASCII_COLUMNS, (col + 1) * n_q / ASCII_COLUMNS);
            let v = block_extreme(field, js, ks);
            out.push(glyph(scale.map_or(0.0, |s| s.level(v))));
        }
        out.push('\n');
    }
    out
}
