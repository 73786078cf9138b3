//! Simple linear iterative clustering.
//!
//! Each pixel is described by a feature vector (CIELAB for RGB input,
//! `100 * I` per channel otherwise) and its position. Centers start on a
//! regular lattice with spacing `S = sqrt(H * W / l)`, are nudged to the
//! lowest-gradient pixel of their 3x3 neighbourhood, and then alternate
//! between assignment (within a `2S x 2S` window, distance
//! `d_color + (c / S) * d_spatial`) and recentering. A connectivity pass
//! follows.

use crate::error::{Error, Result};
use crate::superpixel::connectivity::merge_components;
use crate::superpixel::lab::rgb_to_lab;
use crate::types::{ImageTensor, SuperpixelGrid};

/// Iteration count used when callers have no reason to pick another.
pub const DEFAULT_ITERATIONS: usize = 10;

/// Scale applied to non-RGB intensities so they share the 0..100 range of `L`.
const INTENSITY_SCALE: f64 = 100.0;

/// One cluster center.
#[derive(Clone, Debug, PartialEq)]
pub struct SlicCenter {
    pub color: Vec<f64>,
    pub row: f64,
    pub col: f64,
    pub count: usize,
}

struct Features {
    dims: usize,
    data: Vec<f64>,
}

impl Features {
    fn of(image: &ImageTensor) -> Self {
        if image.channels() == 3 {
            let data = image
                .data()
                .chunks_exact(3)
                .flat_map(|px| rgb_to_lab([px[0], px[1], px[2]]))
                .collect();
            Features { dims: 3, data }
        } else {
            Features {
                dims: image.channels(),
                data: image.data().iter().map(|v| v * INTENSITY_SCALE).collect(),
            }
        }
    }

    fn at(&self, idx: usize) -> &[f64] {
        &self.data[idx * self.dims..(idx + 1) * self.dims]
    }
}

fn color_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Lattice spacing `S` for `l` requested superpixels.
pub fn grid_interval(height: usize, width: usize, l: usize) -> f64 {
    ((height * width) as f64 / l as f64).sqrt()
}

/// Initial center positions: a `rows x cols` lattice with `rows * cols`
/// close to `l`, each center at the middle of its cell.
pub fn seed_lattice(height: usize, width: usize, l: usize) -> Vec<(f64, f64)> {
    let s = grid_interval(height, width, l);
    let rows = ((height as f64 / s).round() as usize).clamp(1, height);
    let cols = ((l as f64 / rows as f64).round() as usize).clamp(1, width);
    let step_r = height as f64 / rows as f64;
    let step_c = width as f64 / cols as f64;
    let mut out = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            out.push((
                (i as f64 + 0.5) * step_r - 0.5,
                (j as f64 + 0.5) * step_c - 0.5,
            ));
        }
    }
    out
}

/// Squared forward differences to the right and down neighbours, summed
/// over feature channels. Missing neighbours contribute nothing.
fn gradient(feats: &Features, height: usize, width: usize, r: usize, c: usize) -> f64 {
    let here = feats.at(r * width + c);
    let mut g = 0.0;
    if c + 1 < width {
        let right = feats.at(r * width + c + 1);
        g += here
            .iter()
            .zip(right)
            .map(|(a, b)| (b - a) * (b - a))
            .sum::<f64>();
    }
    if r + 1 < height {
        let down = feats.at((r + 1) * width + c);
        g += here
            .iter()
            .zip(down)
            .map(|(a, b)| (b - a) * (b - a))
            .sum::<f64>();
    }
    g
}

fn init_centers(feats: &Features, height: usize, width: usize, l: usize) -> Vec<SlicCenter> {
    seed_lattice(height, width, l)
        .into_iter()
        .map(|(row, col)| {
            let (nr, nc) = (
                (row.round() as usize).min(height - 1),
                (col.round() as usize).min(width - 1),
            );
            let base = gradient(feats, height, width, nr, nc);
            let mut best: Option<(usize, usize, f64)> = None;
            for r in nr.saturating_sub(1)..=(nr + 1).min(height - 1) {
                for c in nc.saturating_sub(1)..=(nc + 1).min(width - 1) {
                    let g = gradient(feats, height, width, r, c);
                    let current = best.map_or(base, |(_, _, bg)| bg);
                    if g < current {
                        best = Some((r, c, g));
                    }
                }
            }
            // Only move on a strict improvement so flat regions keep the
            // sub-pixel lattice position.
            let (row, col, pr, pc) = match best {
                Some((r, c, _)) => (r as f64, c as f64, r, c),
                None => (row, col, nr, nc),
            };
            SlicCenter {
                color: feats.at(pr * width + pc).to_vec(),
                row,
                col,
                count: 0,
            }
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn assign(
    feats: &Features,
    height: usize,
    width: usize,
    centers: &[SlicCenter],
    spatial_weight: f64,
    s: f64,
    labels: &mut [u32],
    dist: &mut [f64],
) {
    dist.fill(f64::INFINITY);
    labels.fill(u32::MAX);
    for (k, center) in centers.iter().enumerate() {
        let r0 = (center.row - s).floor().max(0.0) as usize;
        let r1 = ((center.row + s).ceil() as usize).min(height - 1);
        let c0 = (center.col - s).floor().max(0.0) as usize;
        let c1 = ((center.col + s).ceil() as usize).min(width - 1);
        for r in r0..=r1 {
            for c in c0..=c1 {
                let idx = r * width + c;
                let dr = r as f64 - center.row;
                let dc = c as f64 - center.col;
                let d = color_distance(feats.at(idx), &center.color)
                    + spatial_weight * (dr * dr + dc * dc).sqrt();
                // Centers are visited in index order, so strict `<` breaks
                // ties toward the lowest index.
                if d < dist[idx] {
                    dist[idx] = d;
                    labels[idx] = k as u32;
                }
            }
        }
    }
}

fn nearest_center(
    feats: &Features,
    idx: usize,
    width: usize,
    centers: &[SlicCenter],
    spatial_weight: f64,
) -> u32 {
    let (r, c) = ((idx / width) as f64, (idx % width) as f64);
    let mut best = (f64::INFINITY, 0u32);
    for (k, center) in centers.iter().enumerate() {
        let d = color_distance(feats.at(idx), &center.color)
            + spatial_weight * ((r - center.row).powi(2) + (c - center.col).powi(2)).sqrt();
        if d < best.0 {
            best = (d, k as u32);
        }
    }
    best.1
}

fn recenter(feats: &Features, width: usize, labels: &[u32], centers: &mut [SlicCenter]) {
    let dims = feats.dims;
    let mut sums = vec![0.0; centers.len() * (dims + 2)];
    let mut counts = vec![0usize; centers.len()];
    for (idx, &k) in labels.iter().enumerate() {
        let k = k as usize;
        let acc = &mut sums[k * (dims + 2)..(k + 1) * (dims + 2)];
        for (a, f) in acc.iter_mut().zip(feats.at(idx)) {
            *a += f;
        }
        acc[dims] += (idx / width) as f64;
        acc[dims + 1] += (idx % width) as f64;
        counts[k] += 1;
    }
    for (k, center) in centers.iter_mut().enumerate() {
        center.count = counts[k];
        if counts[k] == 0 {
            continue;
        }
        let n = counts[k] as f64;
        let acc = &sums[k * (dims + 2)..(k + 1) * (dims + 2)];
        for (c, a) in center.color.iter_mut().zip(acc) {
            *c = a / n;
        }
        center.row = acc[dims] / n;
        center.col = acc[dims + 1] / n;
    }
}

fn check_params(image: &ImageTensor, l: usize, compactness: f64, iters: usize) -> Result<()> {
    let pixels = image.height() * image.width();
    if l < 1 || l > pixels {
        return Err(Error::Domain(format!(
            "superpixel count {l} outside [1, {pixels}]"
        )));
    }
    if !(compactness > 0.0 && compactness.is_finite()) {
        return Err(Error::Domain(format!(
            "compactness must be positive, got {compactness}"
        )));
    }
    if iters < 1 {
        return Err(Error::Domain("SLIC needs at least one iteration".into()));
    }
    Ok(())
}

/// Raw clustering without the connectivity pass. Labels are center indices,
/// possibly with gaps where a center lost all its pixels.
pub fn slic_labels(
    image: &ImageTensor,
    l: usize,
    compactness: f64,
    iters: usize,
) -> Result<(Vec<u32>, Vec<SlicCenter>)> {
    check_params(image, l, compactness, iters)?;
    let (height, width) = image.shape();
    let feats = Features::of(image);
    let s = grid_interval(height, width, l);
    let spatial_weight = compactness / s;
    let mut centers = init_centers(&feats, height, width, l);
    let mut labels = vec![0u32; height * width];
    let mut dist = vec![0.0; height * width];
    for _ in 0..iters {
        assign(
            &feats,
            height,
            width,
            &centers,
            spatial_weight,
            s,
            &mut labels,
            &mut dist,
        );
        for (idx, label) in labels.iter_mut().enumerate() {
            if *label == u32::MAX {
                *label = nearest_center(&feats, idx, width, &centers, spatial_weight);
            }
        }
        recenter(&feats, width, &labels, &mut centers);
    }
    Ok((labels, centers))
}

/// Minimum component size kept by the connectivity pass: a quarter of the
/// mean superpixel area.
pub fn min_component_size(height: usize, width: usize, l: usize) -> usize {
    ((height * width) / l / 4).max(1)
}

/// SLIC superpixels with approximately `l` regions, each 4-connected.
///
/// The label count is kept within `[ceil(l/2), 2l]` by the merge pass.
pub fn compute_superpixels(
    image: &ImageTensor,
    l: usize,
    compactness: f64,
    iters: usize,
) -> Result<SuperpixelGrid> {
    let (height, width) = image.shape();
    if l == 1 {
        check_params(image, l, compactness, iters)?;
        return SuperpixelGrid::new(height, width, 1, vec![0; height * width]);
    }
    let (labels, _) = slic_labels(image, l, compactness, iters)?;
    let raw = SuperpixelGrid::from_raw(height, width, &labels)?;
    Ok(merge_components(
        &raw,
        min_component_size(height, width, l),
        l.div_ceil(2),
        2 * l,
    ))
}
