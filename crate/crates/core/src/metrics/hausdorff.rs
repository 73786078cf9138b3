//! 95th-percentile Hausdorff distance between class boundaries.
//!
//! Boundary pixels are class pixels with a 4-neighbour outside the class (the
//! image border counts as outside). Directed nearest distances are read off an
//! exact squared Euclidean distance transform (Felzenszwalb-Huttenlocher
//! lower envelope of parabolas), so every distance is `sqrt` of an integer.

use crate::error::{Error, Result};

/// Stand-in for "no feature"; far larger than any squared in-image distance.
const FAR: f64 = 1e18;

/// Boundary indicator of the pixels labelled `class`.
pub fn class_boundary(ids: &[u32], height: usize, width: usize, class: u32) -> Vec<bool> {
    let inside = |r: usize, c: usize| ids[r * width + c] == class;
    let mut out = vec![false; ids.len()];
    for r in 0..height {
        for c in 0..width {
            if !inside(r, c) {
                continue;
            }
            out[r * width + c] = r == 0
                || c == 0
                || r + 1 == height
                || c + 1 == width
                || !inside(r - 1, c)
                || !inside(r + 1, c)
                || !inside(r, c - 1)
                || !inside(r, c + 1);
        }
    }
    out
}

fn transform_1d(f: &[f64], out: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let sq = |q: usize| (q * q) as f64;
    let mut k = 0;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        let intersect =
            |p: usize| ((f[q] + sq(q)) - (f[p] + sq(p))) / (2.0 * (q as f64 - p as f64));
        let mut s = intersect(v[k]);
        // z[0] is -inf, so this never pops the first parabola.
        while s <= z[k] {
            k -= 1;
            s = intersect(v[k]);
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let d = q as f64 - v[k] as f64;
        *o = d * d + f[v[k]];
    }
}

/// Squared distance from every pixel to the nearest `true` pixel of `features`.
pub fn squared_distance_transform(features: &[bool], height: usize, width: usize) -> Vec<f64> {
    let mut grid: Vec<f64> = features
        .iter()
        .map(|&f| if f { 0.0 } else { FAR })
        .collect();
    let n = height.max(width);
    let (mut buf_in, mut buf_out) = (vec![0.0; n], vec![0.0; n]);
    let (mut v, mut z) = (vec![0usize; n], vec![0.0; n + 1]);
    for c in 0..width {
        for r in 0..height {
            buf_in[r] = grid[r * width + c];
        }
        transform_1d(&buf_in[..height], &mut buf_out[..height], &mut v, &mut z);
        for r in 0..height {
            grid[r * width + c] = buf_out[r];
        }
    }
    for r in 0..height {
        buf_in[..width].copy_from_slice(&grid[r * width..(r + 1) * width]);
        transform_1d(&buf_in[..width], &mut buf_out[..width], &mut v, &mut z);
        grid[r * width..(r + 1) * width].copy_from_slice(&buf_out[..width]);
    }
    grid
}

/// Nearest-rank percentile of an unsorted sample, `q` in `(0, 1]`.
pub fn nearest_rank(values: &mut [f64], q: f64) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let rank = (q * values.len() as f64).ceil() as usize;
    values[rank.clamp(1, values.len()) - 1]
}

/// 95th percentile of the pooled directed boundary distances of `class`.
pub fn hd95(pred: &[u32], target: &[u32], height: usize, width: usize, class: u32) -> Result<f64> {
    if pred.len() != height * width || target.len() != height * width {
        return Err(Error::dims(height * width, pred.len().max(target.len())));
    }
    let bp = class_boundary(pred, height, width, class);
    let bt = class_boundary(target, height, width, class);
    if !bp.contains(&true) || !bt.contains(&true) {
        return Err(Error::Undefined(format!(
            "class {class} has no boundary in {}",
            if bp.contains(&true) {
                "target"
            } else {
                "prediction"
            }
        )));
    }
    let to_target = squared_distance_transform(&bt, height, width);
    let to_pred = squared_distance_transform(&bp, height, width);
    let mut distances: Vec<f64> = bp
        .iter()
        .zip(&to_target)
        .filter(|(b, _)| **b)
        .chain(bt.iter().zip(&to_pred).filter(|(b, _)| **b))
        .map(|(_, d)| d.sqrt())
        .collect();
    Ok(nearest_rank(&mut distances, 0.95))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_sq_dt(features: &[bool], h: usize, w: usize) -> Vec<f64> {
        (0..h * w)
            .map(|p| {
                features
                    .iter()
                    .enumerate()
                    .filter(|(_, f)| **f)
                    .map(|(q, _)| {
                        let dr = (p / w) as f64 - (q / w) as f64;
                        let dc = (p % w) as f64 - (q % w) as f64;
                        dr * dr + dc * dc
                    })
                    .fold(f64::INFINITY, f64::min)
            })
            .collect()
    }

    #[test]
    fn identical_masks() {
        let ids = [0, 1, 1, 0, 1, 1, 0, 0, 0];
        assert_eq!(hd95(&ids, &ids, 3, 3, 1).unwrap(), 0.0);
    }

    #[test]
    fn single_pixels_three_apart() {
        let mut a = vec![0; 25];
        let mut b = vec![0; 25];
        a[5 + 1] = 1;
        b[5 + 4] = 1;
        assert_eq!(hd95(&a, &b, 5, 5, 1).unwrap(), 3.0);
    }

    #[test]
    fn empty_boundary_is_undefined() {
        let a = vec![0; 9];
        let mut b = vec![0; 9];
        b[4] = 1;
        assert!(matches!(hd95(&a, &b, 3, 3, 1), Err(Error::Undefined(_))));
    }

    #[test]
    fn nearest_rank_examples() {
        let mut v: Vec<f64> = (1..=20).map(f64::from).collect();
        assert_eq!(nearest_rank(&mut v, 0.95), 19.0);
        let mut v = vec![3.0, 3.0];
        assert_eq!(nearest_rank(&mut v, 0.95), 3.0);
    }

    proptest! {
        #[test]
        fn distance_transform_matches_brute_force(
            h in 1usize..12, w in 1usize..12, seed in proptest::collection::vec(any::<bool>(), 144),
        ) {
            let mut f: Vec<bool> = seed[..h * w].to_vec();
            f[0] |= !f.contains(&true);
            prop_assert_eq!(squared_distance_transform(&f, h, w), brute_sq_dt(&f, h, w));
        }
    }
}
