//! Center-surround saliency and relative saliency between two images.
//!
//! Saliency is computed on channel-mean intensity. For each scale
//! `s = 1..=6` the mean over a `(2s+1)^2` center box is compared with the mean
//! over a `(4s+1)^2` surround box, both clipped to the image; absolute
//! differences are summed over scales and min-max normalized.

use crate::error::{Error, Result};
use crate::types::{minmax_normalize, ImageTensor, SaliencyMap};

/// Center radii used by [`fine_grained_saliency`]; the surround radius is twice the center radius.
pub const SCALES: std::ops::RangeInclusive<usize> = 1..=6;

/// Default guard for [`relative_saliency`].
pub const DEFAULT_EPSILON: f64 = 1e-6;

/// Summed-area table with a zero row and column prepended.
#[derive(Clone, Debug)]
pub struct IntegralImage {
    height: usize,
    width: usize,
    sums: Vec<f64>,
}

impl IntegralImage {
    pub fn new(height: usize, width: usize, values: &[f64]) -> Self {
        assert_eq!(values.len(), height * width);
        let stride = width + 1;
        let mut sums = vec![0.0; (height + 1) * stride];
        for r in 0..height {
            let mut row_sum = 0.0;
            for c in 0..width {
                row_sum += values[r * width + c];
                sums[(r + 1) * stride + c + 1] = sums[r * stride + c + 1] + row_sum;
            }
        }
        Self {
            height,
            width,
            sums,
        }
    }

    /// Sum over the inclusive rectangle `[r0, r1] x [c0, c1]`.
    pub fn box_sum(&self, r0: usize, c0: usize, r1: usize, c1: usize) -> f64 {
        let s = self.width + 1;
        let at = |r: usize, c: usize| self.sums[r * s + c];
        at(r1 + 1, c1 + 1) - at(r0, c1 + 1) - at(r1 + 1, c0) + at(r0, c0)
    }

    /// Mean over the square of the given radius around `(r, c)`, clipped to the image.
    pub fn box_mean(&self, r: usize, c: usize, radius: usize) -> f64 {
        let r0 = r.saturating_sub(radius);
        let c0 = c.saturating_sub(radius);
        let r1 = (r + radius).min(self.height - 1);
        let c1 = (c + radius).min(self.width - 1);
        let area = ((r1 - r0 + 1) * (c1 - c0 + 1)) as f64;
        self.box_sum(r0, c0, r1, c1) / area
    }
}

/// Unnormalized multi-scale center-surround response.
pub fn center_surround_response(height: usize, width: usize, intensity: &[f64]) -> Vec<f64> {
    // Box-mean differences are shift invariant; shifting by the minimum makes
    // flat regions sum to exactly zero instead of to rounding noise.
    let lo = intensity.iter().copied().fold(f64::INFINITY, f64::min);
    let shifted: Vec<f64> = intensity.iter().map(|v| v - lo).collect();
    let table = IntegralImage::new(height, width, &shifted);
    let mut out = vec![0.0; height * width];
    for r in 0..height {
        for c in 0..width {
            out[r * width + c] = SCALES
                .map(|s| (table.box_mean(r, c, s) - table.box_mean(r, c, 2 * s)).abs())
                .sum();
        }
    }
    out
}

/// Normalized saliency map in `[0, 1]`; a featureless image yields 0.5 everywhere.
pub fn fine_grained_saliency(image: &ImageTensor) -> SaliencyMap {
    let (h, w) = image.shape();
    let raw = center_surround_response(h, w, &image.intensity());
    minmax_normalize(h, w, &raw).expect("finite response from validated image")
}

fn share(a: f64, b: f64, epsilon: f64) -> f64 {
    let denom = a + b + epsilon;
    if denom == 0.0 {
        0.5
    } else {
        ((b + epsilon / 2.0) / denom).clamp(0.0, 1.0)
    }
}

/// Share of the second image in the pair's saliency, pixel by pixel:
/// `(sa2 + eps/2) / (sa1 + sa2 + eps)`, with `0/0` read as 0.5.
///
/// The companion map for the first image is [`SaliencyMap::complement`].
pub fn relative_saliency(
    sa1: &SaliencyMap,
    sa2: &SaliencyMap,
    epsilon: f64,
) -> Result<SaliencyMap> {
    if sa1.shape() != sa2.shape() {
        return Err(Error::dims(
            format!("{:?}", sa1.shape()),
            format!("{:?}", sa2.shape()),
        ));
    }
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::Domain(format!(
            "epsilon must be non-negative, got {epsilon}"
        )));
    }
    let data = sa1
        .data()
        .iter()
        .zip(sa2.data())
        .map(|(&a, &b)| {
            // Evaluate the ratio only with the larger share on top, and take
            // the complement otherwise, so swapping inputs gives exactly 1 - v.
            if a <= b {
                share(a, b, epsilon)
            } else {
                1.0 - share(b, a, epsilon)
            }
        })
        .collect();
    let (h, w) = sa1.shape();
    SaliencyMap::new(h, w, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive_box_sum(w: usize, v: &[f64], r0: usize, c0: usize, r1: usize, c1: usize) -> f64 {
        let mut s = 0.0;
        for r in r0..=r1 {
            for c in c0..=c1 {
                s += v[r * w + c];
            }
        }
        s
    }

    /// Saliency straight from the definition, summing boxes pixel by pixel.
    fn naive_response(h: usize, w: usize, v: &[f64]) -> Vec<f64> {
        let mean = |r: usize, c: usize, rad: usize| {
            let (r0, c0) = (r.saturating_sub(rad), c.saturating_sub(rad));
            let (r1, c1) = ((r + rad).min(h - 1), (c + rad).min(w - 1));
            naive_box_sum(w, v, r0, c0, r1, c1) / ((r1 - r0 + 1) * (c1 - c0 + 1)) as f64
        };
        let mut out = Vec::new();
        for r in 0..h {
            for c in 0..w {
                out.push(
                    (1..=6)
                        .map(|s| (mean(r, c, s) - mean(r, c, 2 * s)).abs())
                        .sum(),
                );
            }
        }
        out
    }

    #[test]
    fn constant_image_is_half() {
        let img = ImageTensor::filled(10, 12, 3, 0.4).unwrap();
        assert!(fine_grained_saliency(&img).data().iter().all(|&v| v == 0.5));
    }

    #[test]
    fn bright_pixel_is_most_salient() {
        let img = ImageTensor::from_fn(
            15,
            15,
            1,
            |r, c, _| if (r, c) == (7, 7) { 1.0 } else { 0.0 },
        )
        .unwrap();
        let sal = fine_grained_saliency(&img);
        let oracle = naive_response(15, 15, img.data());
        let best = oracle.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(oracle[7 * 15 + 7], best);
        assert_eq!(sal.get(7, 7), 1.0);
        // far corner is strictly less salient
        assert!(sal.get(0, 0) < 1.0);
    }

    #[test]
    fn response_matches_naive_definition() {
        let img = ImageTensor::from_fn(13, 17, 3, |r, c, ch| {
            ((r * 5 + c * 11 + ch * 3) % 23) as f64 / 22.0
        })
        .unwrap();
        let fast = center_surround_response(13, 17, &img.intensity());
        let slow = naive_response(13, 17, &img.intensity());
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn relative_direct_values() {
        let a = SaliencyMap::filled(1, 1, 0.2).unwrap();
        let b = SaliencyMap::filled(1, 1, 0.6).unwrap();
        let r = relative_saliency(&a, &b, 0.0).unwrap();
        assert!((r.get(0, 0) - 0.75).abs() < 1e-15);
        let z = SaliencyMap::filled(1, 1, 0.0).unwrap();
        assert_eq!(relative_saliency(&z, &z, 1e-6).unwrap().get(0, 0), 0.5);
        assert_eq!(relative_saliency(&z, &z, 0.0).unwrap().get(0, 0), 0.5);
        assert_eq!(relative_saliency(&b, &b, 1e-6).unwrap().get(0, 0), 0.5);
    }

    #[test]
    fn relative_rejects_shape_mismatch() {
        let a = SaliencyMap::filled(2, 2, 0.2).unwrap();
        let b = SaliencyMap::filled(2, 3, 0.2).unwrap();
        assert!(relative_saliency(&a, &b, 1e-6).is_err());
    }

    proptest! {
        /// Dyadic samples keep every partial sum exact, so the two routes agree bit for bit.
        #[test]
        fn integral_box_sums_exact(
            vals in proptest::collection::vec(0u32..=256, 48),
            r0 in 0usize..6, c0 in 0usize..8, dr in 0usize..6, dc in 0usize..8,
        ) {
            let v: Vec<f64> = vals.iter().map(|&x| x as f64 / 256.0).collect();
            let t = IntegralImage::new(6, 8, &v);
            let (r1, c1) = ((r0 + dr).min(5), (c0 + dc).min(7));
            prop_assert_eq!(t.box_sum(r0, c0, r1, c1), naive_box_sum(8, &v, r0, c0, r1, c1));
        }

        #[test]
        fn relative_invariants(a in 0.0f64..=1.0, b in 0.0f64..=1.0, bump in 0.0f64..=1.0, eps in 0.0f64..1e-3) {
            let m = |v: f64| SaliencyMap::filled(1, 1, v).unwrap();
            let r21 = relative_saliency(&m(a), &m(b), eps).unwrap();
            let r12 = r21.complement();
            prop_assert!((r21.get(0, 0) + r12.get(0, 0) - 1.0).abs() < 1e-9);
            prop_assert!((0.0..=1.0).contains(&r21.get(0, 0)));
            let swapped = relative_saliency(&m(b), &m(a), eps).unwrap();
            prop_assert_eq!(swapped.get(0, 0), r12.get(0, 0));
            let b2 = (b + bump).min(1.0);
            let raised = relative_saliency(&m(a), &m(b2), eps).unwrap();
            prop_assert!(raised.get(0, 0) >= r21.get(0, 0) - 1e-15);
        }
    }
}
