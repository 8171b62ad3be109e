//! Raster rendering of time×scale planes.
//!
//! The numbers live in the grid files; these images are a convenience view
//! of the same planes: a color map for the value plane, paling outside the
//! cone of influence, a contour around significant regions and decimated
//! phase arrows. Rendering is deterministic — same inputs, same bytes.

use image::codecs::png::PngEncoder;
use image::{ImageEncoder, Rgb, RgbImage};
use ndarray::Array2;

use crate::error::{Error, Result};

/// Pixel geometry and arrow decimation for a rendered plane.
#[derive(Debug, Clone, Copy)]
pub struct HeatmapOptions {
    /// Horizontal pixels per time column.
    pub cell_width: u32,
    /// Vertical pixels per scale row.
    pub cell_height: u32,
    /// Columns between phase arrows.
    pub arrow_col_step: usize,
    /// Rows between phase arrows.
    pub arrow_row_step: usize,
}

impl Default for HeatmapOptions {
    fn default() -> Self {
        HeatmapOptions { cell_width: 1, cell_height: 6, arrow_col_step: 48, arrow_row_step: 6 }
    }
}

/// Phase arrows: drawn at decimated cells where `cells` is true, pointing
/// right for phase 0 and down when the first series leads (positive phase).
pub struct ArrowLayer<'a> {
    pub phase: &'a Array2<f64>,
    pub cells: &'a Array2<bool>,
}

/// Map a positive plane to [0, 1] in log scale, robust to outliers: the
/// 2nd..98th percentiles of the log values span the color range.
pub fn log_normalize(plane: &Array2<f64>) -> Array2<f64> {
    let mut logs: Vec<f64> =
        plane.iter().map(|&v| (v.max(1e-300)).ln()).filter(|v| v.is_finite()).collect();
    if logs.is_empty() {
        return Array2::zeros(plane.dim());
    }
    logs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let lo = logs[(0.02 * (logs.len() - 1) as f64).round() as usize];
    let hi = logs[(0.98 * (logs.len() - 1) as f64).round() as usize];
    let span = (hi - lo).max(1e-12);
    plane.mapv(|v| (((v.max(1e-300)).ln() - lo) / span).clamp(0.0, 1.0))
}

/// Render a `(J, N)` plane of values in [0, 1]. Row 0 (smallest period) is
/// at the top. `sig` outlines significant regions; `arrows` draws phase
/// direction glyphs on its cells at the decimation step in `opts`.
pub fn render(
    values: &Array2<f64>,
    periods: &[f64],
    coi: &[f64],
    sig: Option<&Array2<bool>>,
    arrows: Option<ArrowLayer<'_>>,
    opts: &HeatmapOptions,
) -> RgbImage {
    let (j_rows, n_cols) = values.dim();
    assert_eq!(j_rows, periods.len(), "period axis must match plane rows");
    assert_eq!(n_cols, coi.len(), "coi must match plane columns");
    let width = n_cols as u32 * opts.cell_width;
    let height = j_rows as u32 * opts.cell_height;
    let mut img = RgbImage::new(width.max(1), height.max(1));

    for (y, x, px) in iter_pixels(&mut img) {
        let j = (y / opts.cell_height) as usize;
        let k = (x / opts.cell_width) as usize;
        let mut rgb = colormap(values[(j, k)].clamp(0.0, 1.0));
        if periods[j] > coi[k] {
            rgb = blend(rgb, [255, 255, 255], 0.55);
        }
        *px = Rgb(rgb);
    }

    if let Some(mask) = sig {
        draw_contour(&mut img, mask, opts);
    }
    if let Some(layer) = arrows {
        draw_arrows(&mut img, &layer, opts);
    }
    img
}

/// Encode as PNG and write atomically.
pub fn save_png(img: &RgbImage, path: impl AsRef<std::path::Path>) -> Result<()> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    PngEncoder::new(&mut bytes)
        .write_image(img.as_raw(), img.width(), img.height(), image::ExtendedColorType::Rgb8)
        .map_err(|e| {
            Error::io(path.display().to_string(), std::io::Error::new(std::io::ErrorKind::Other, e))
        })?;
    super::write_atomic(path, &bytes)
}

fn iter_pixels(img: &mut RgbImage) -> impl Iterator<Item = (u32, u32, &mut Rgb<u8>)> {
    let width = img.width();
    img.pixels_mut().enumerate().map(move |(i, px)| {
        let x = i as u32 % width;
        let y = i as u32 / width;
        (y, x, px)
    })
}

/// Eight-stop gradient from deep blue through magenta to yellow.
const STOPS: [[u8; 3]; 8] = [
    [13, 8, 135],
    [84, 2, 163],
    [139, 10, 165],
    [185, 50, 137],
    [219, 92, 104],
    [244, 136, 73],
    [254, 188, 43],
    [240, 249, 33],
];

fn colormap(v: f64) -> [u8; 3] {
    let pos = v * (STOPS.len() - 1) as f64;
    let i = (pos.floor() as usize).min(STOPS.len() - 2);
    let f = pos - i as f64;
    let a = STOPS[i];
    let b = STOPS[i + 1];
    [
        lerp_u8(a[0], b[0], f),
        lerp_u8(a[1], b[1], f),
        lerp_u8(a[2], b[2], f),
    ]
}

fn lerp_u8(a: u8, b: u8, f: f64) -> u8 {
    (a as f64 + (b as f64 - a as f64) * f).round() as u8
}

fn blend(a: [u8; 3], b: [u8; 3], towards_b: f64) -> [u8; 3] {
    [
        lerp_u8(a[0], b[0], towards_b),
        lerp_u8(a[1], b[1], towards_b),
        lerp_u8(a[2], b[2], towards_b),
    ]
}

/// Outline cells whose significance differs from a 4-neighbour: a ~2 px
/// black border on the significant side.
fn draw_contour(img: &mut RgbImage, mask: &Array2<bool>, opts: &HeatmapOptions) {
    let (j_rows, n_cols) = mask.dim();
    let edge = |a: bool, b: bool| a && !b;
    for j in 0..j_rows {
        for k in 0..n_cols {
            if !mask[(j, k)] {
                continue;
            }
            let x0 = k as u32 * opts.cell_width;
            let y0 = j as u32 * opts.cell_height;
            let x1 = x0 + opts.cell_width;
            let y1 = y0 + opts.cell_height;
            let top = j == 0 || edge(mask[(j, k)], mask[(j - 1, k)]);
            let bottom = j + 1 == j_rows || edge(mask[(j, k)], mask[(j + 1, k)]);
            let left = k == 0 || edge(mask[(j, k)], mask[(j, k - 1)]);
            let right = k + 1 == n_cols || edge(mask[(j, k)], mask[(j, k + 1)]);
            if top {
                hline(img, x0, x1, y0);
                hline(img, x0, x1, y0 + 1);
            }
            if bottom {
                hline(img, x0, x1, y1.saturating_sub(1));
                hline(img, x0, x1, y1.saturating_sub(2));
            }
            if left {
                vline(img, x0, y0, y1);
                vline(img, x0 + 1, y0, y1);
            }
            if right {
                vline(img, x1.saturating_sub(1), y0, y1);
                vline(img, x1.saturating_sub(2), y0, y1);
            }
        }
    }
}

fn hline(img: &mut RgbImage, x0: u32, x1: u32, y: u32) {
    if y >= img.height() {
        return;
    }
    for x in x0..x1.min(img.width()) {
        img.put_pixel(x, y, Rgb([0, 0, 0]));
    }
}

fn vline(img: &mut RgbImage, x: u32, y0: u32, y1: u32) {
    if x >= img.width() {
        return;
    }
    for y in y0..y1.min(img.height()) {
        img.put_pixel(x, y, Rgb([0, 0, 0]));
    }
}

/// Arrow glyphs: a shaft through the cell center plus a two-stroke head.
/// Screen y grows downward, so a positive phase (first series leads) tilts
/// the arrow downward — "southeast" for phases in (0, π/2).
fn draw_arrows(img: &mut RgbImage, layer: &ArrowLayer<'_>, opts: &HeatmapOptions) {
    let (j_rows, n_cols) = layer.cells.dim();
    let col_step = opts.arrow_col_step.max(1);
    let row_step = opts.arrow_row_step.max(1);
    let len = (opts.cell_height.max(opts.cell_width) as f64 * 1.6).clamp(7.0, 15.0);
    for j in (row_step / 2..j_rows).step_by(row_step) {
        for k in (col_step / 2..n_cols).step_by(col_step) {
            if !layer.cells[(j, k)] {
                continue;
            }
            let phase = layer.phase[(j, k)];
            let (dx, dy) = (phase.cos(), -phase.sin());
            let cx = (k as f64 + 0.5) * opts.cell_width as f64;
            let cy = (j as f64 + 0.5) * opts.cell_height as f64;
            let (hx, hy) = (cx + dx * len / 2.0, cy + dy * len / 2.0);
            let (tx, ty) = (cx - dx * len / 2.0, cy - dy * len / 2.0);
            line(img, tx, ty, hx, hy);
            // head: two short strokes swept back from the tip
            for side in [-1.0, 1.0] {
                let ang = dy.atan2(dx) + side * 2.6;
                line(img, hx, hy, hx + ang.cos() * len * 0.35, hy + ang.sin() * len * 0.35);
            }
        }
    }
}

/// Integer-stepped line segment in black.
fn line(img: &mut RgbImage, x0: f64, y0: f64, x1: f64, y1: f64) {
    let steps = ((x1 - x0).abs().max((y1 - y0).abs()).ceil() as usize).max(1);
    for i in 0..=steps {
        let f = i as f64 / steps as f64;
        let x = x0 + (x1 - x0) * f;
        let y = y0 + (y1 - y0) * f;
        if x >= 0.0 && y >= 0.0 && (x as u32) < img.width() && (y as u32) < img.height() {
            img.put_pixel(x as u32, y as u32, Rgb([0, 0, 0]));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane(j: usize, n: usize) -> Array2<f64> {
        Array2::from_shape_fn((j, n), |(a, b)| ((a * 31 + b * 17) % 97) as f64 / 96.0)
    }

    #[test]
    fn image_dimensions_follow_cell_geometry() {
        let v = plane(5, 40);
        let periods = vec![2.0, 4.0, 8.0, 16.0, 32.0];
        let coi = vec![10.0; 40];
        let opts = HeatmapOptions { cell_width: 2, cell_height: 4, ..Default::default() };
        let img = render(&v, &periods, &coi, None, None, &opts);
        assert_eq!((img.width(), img.height()), (80, 20));
    }

    #[test]
    fn rendering_is_deterministic() {
        let v = plane(6, 30);
        let periods = vec![2.0, 4.0, 8.0, 16.0, 32.0, 64.0];
        let coi: Vec<f64> = (0..30).map(|k| 2.0 * (1 + k.min(29 - k)) as f64).collect();
        let sig = Array2::from_shape_fn((6, 30), |(j, k)| (j + k) % 7 == 0);
        let phase = Array2::from_shape_fn((6, 30), |(j, k)| (j as f64 - k as f64) / 5.0);
        let opts = HeatmapOptions { arrow_col_step: 5, arrow_row_step: 2, ..Default::default() };
        let a = render(&v, &periods, &coi, Some(&sig), Some(ArrowLayer { phase: &phase, cells: &sig }), &opts);
        let b = render(&v, &periods, &coi, Some(&sig), Some(ArrowLayer { phase: &phase, cells: &sig }), &opts);
        assert_eq!(a.as_raw(), b.as_raw());
    }

    #[test]
    fn coi_exterior_is_paler_than_interior() {
        // constant value, one column inside the cone and one outside
        let v = Array2::from_elem((1, 2), 0.4);
        let periods = vec![8.0];
        let coi = vec![16.0, 4.0]; // column 0 inside (8 <= 16), column 1 outside
        let img = render(&v, &periods, &coi, None, None, &HeatmapOptions::default());
        let inside = img.get_pixel(0, 0).0;
        let outside = img.get_pixel(1, 0).0;
        let sum = |p: [u8; 3]| p.iter().map(|&c| c as u32).sum::<u32>();
        assert!(sum(outside) > sum(inside), "outside {outside:?} not paler than {inside:?}");
    }

    #[test]
    fn log_normalize_spans_the_unit_interval() {
        let p = Array2::from_shape_fn((4, 50), |(j, k)| 10f64.powi(j as i32) * (k + 1) as f64);
        let n = log_normalize(&p);
        let max = n.iter().cloned().fold(0.0_f64, f64::max);
        let min = n.iter().cloned().fold(1.0_f64, f64::min);
        assert_eq!(max, 1.0);
        assert_eq!(min, 0.0);
        assert!(n.iter().all(|v| (0.0..=1.0).contains(v)));
    }
}
