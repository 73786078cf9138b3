//! Superpixel grids: SLIC, the square-cell ablation grid, and boundary overlays.

mod connectivity;
mod lab;
mod slic;

pub use connectivity::{
    connected_components, enforce_connectivity, is_four_connected, merge_components,
};
pub use lab::rgb_to_lab;
pub use slic::{
    compute_superpixels, grid_interval, min_component_size, seed_lattice, slic_labels, SlicCenter,
    DEFAULT_ITERATIONS,
};

use crate::error::{Error, Result};
use crate::types::{ImageTensor, SuperpixelGrid};

/// Sizes of `k` balanced bands covering `n`; the first `n % k` bands get the extra row.
fn band_sizes(n: usize, k: usize) -> Vec<usize> {
    (0..k).map(|i| n / k + usize::from(i < n % k)).collect()
}

/// A `k x k` grid of axis-aligned cells, labelled row-major.
pub fn square_grid(height: usize, width: usize, k: usize) -> Result<SuperpixelGrid> {
    if k < 1 || k > height.min(width) {
        return Err(Error::Domain(format!(
            "square grid needs 1 <= k <= {}, got {k}",
            height.min(width)
        )));
    }
    let band_of = |n: usize| -> Vec<u32> {
        band_sizes(n, k)
            .into_iter()
            .enumerate()
            .flat_map(|(i, size)| std::iter::repeat_n(i as u32, size))
            .collect()
    };
    let rows = band_of(height);
    let cols = band_of(width);
    let labels = rows
        .iter()
        .flat_map(|&br| cols.iter().map(move |&bc| br * k as u32 + bc))
        .collect();
    SuperpixelGrid::new(height, width, k * k, labels)
}

/// True when a 4-neighbour of `(r, c)` carries a different label.
pub fn is_boundary(grid: &SuperpixelGrid, r: usize, c: usize) -> bool {
    let (h, w) = grid.shape();
    let here = grid.label(r, c);
    (r > 0 && grid.label(r - 1, c) != here)
        || (r + 1 < h && grid.label(r + 1, c) != here)
        || (c > 0 && grid.label(r, c - 1) != here)
        || (c + 1 < w && grid.label(r, c + 1) != here)
}

/// Copy of `image` with every label-boundary pixel painted `color`.
pub fn boundary_overlay(
    image: &ImageTensor,
    grid: &SuperpixelGrid,
    color: &[f64],
) -> Result<ImageTensor> {
    if image.shape() != grid.shape() {
        return Err(Error::dims(
            format!("{:?}", image.shape()),
            format!("{:?}", grid.shape()),
        ));
    }
    if color.len() != image.channels() {
        return Err(Error::dims(
            format!("{} color channels", image.channels()),
            color.len(),
        ));
    }
    let (h, w) = image.shape();
    let mut data = image.data().to_vec();
    for r in 0..h {
        for c in 0..w {
            if is_boundary(grid, r, c) {
                let start = (r * w + c) * color.len();
                data[start..start + color.len()].copy_from_slice(color);
            }
        }
    }
    ImageTensor::new(h, w, image.channels(), data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn square_single_pixels() {
        let g = square_grid(7, 7, 7).unwrap();
        assert_eq!(g.num_labels(), 49);
        assert!(g.sizes().iter().all(|&s| s == 1));
    }

    #[test]
    fn square_224_by_7() {
        let g = square_grid(224, 224, 7).unwrap();
        assert_eq!(g.num_labels(), 49);
        assert!(g.sizes().iter().all(|&s| s == 32 * 32));
        assert_eq!(g.label(31, 31), 0);
        assert_eq!(g.label(32, 32), 8);
    }

    #[test]
    fn square_balanced_split() {
        let g = square_grid(5, 5, 2).unwrap();
        assert_eq!(g.sizes(), vec![9, 6, 6, 4]);
        assert_eq!(g.label(2, 2), 0);
        assert_eq!(g.label(3, 3), 3);
    }

    #[test]
    fn square_rejects_large_k() {
        assert!(square_grid(4, 6, 5).is_err());
        assert!(square_grid(4, 6, 0).is_err());
    }

    #[test]
    fn overlay_without_boundaries() {
        let img = ImageTensor::filled(4, 4, 3, 0.2).unwrap();
        let g = SuperpixelGrid::new(4, 4, 1, vec![0; 16]).unwrap();
        assert_eq!(boundary_overlay(&img, &g, &[0.0, 1.0, 0.0]).unwrap(), img);
    }

    #[test]
    fn overlay_cross() {
        let img = ImageTensor::filled(4, 4, 1, 0.0).unwrap();
        let g = square_grid(4, 4, 2).unwrap();
        let out = boundary_overlay(&img, &g, &[1.0]).unwrap();
        #[rustfmt::skip]
        let expected = [
            0.0, 1.0, 1.0, 0.0,
            1.0, 1.0, 1.0, 1.0,
            1.0, 1.0, 1.0, 1.0,
            0.0, 1.0, 1.0, 0.0,
        ];
        assert_eq!(out.data(), &expected);
    }

    #[test]
    fn overlay_dimension_checks() {
        let img = ImageTensor::filled(4, 4, 3, 0.0).unwrap();
        let g = square_grid(4, 5, 2).unwrap();
        assert!(boundary_overlay(&img, &g, &[0.0, 1.0, 0.0]).is_err());
        let g = square_grid(4, 4, 2).unwrap();
        assert!(boundary_overlay(&img, &g, &[1.0]).is_err());
    }

    proptest! {
        #[test]
        fn overlay_matches_neighbor_scan(raw in proptest::collection::vec(0u32..4, 30)) {
            let g = SuperpixelGrid::from_raw(5, 6, &raw).unwrap();
            let img = ImageTensor::filled(5, 6, 1, 0.0).unwrap();
            let out = boundary_overlay(&img, &g, &[1.0]).unwrap();
            for r in 0..5usize {
                for c in 0..6usize {
                    let mut differs = false;
                    for (dr, dc) in [(-1i32, 0i32), (1, 0), (0, -1), (0, 1)] {
                        let (nr, nc) = (r as i32 + dr, c as i32 + dc);
                        if (0..5).contains(&nr) && (0..6).contains(&nc)
                            && raw[nr as usize * 6 + nc as usize] != raw[r * 6 + c]
                        {
                            differs = true;
                        }
                    }
                    prop_assert_eq!(out.get(r, c, 0) == 1.0, differs);
                }
            }
        }
    }
}
