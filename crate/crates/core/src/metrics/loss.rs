//! Combined cross-entropy and dice loss.

use crate::error::{Error, Result};
use crate::types::ClassMap;

/// Lower clamp applied to probabilities before taking the log.
pub const LOG_FLOOR: f64 = 1e-12;

/// Per-pixel class probabilities predicted by a model.
#[derive(Clone, Debug, PartialEq)]
pub struct PredictionMap(ClassMap);

impl PredictionMap {
    pub fn new(height: usize, width: usize, num_classes: usize, data: Vec<f64>) -> Result<Self> {
        ClassMap::new(height, width, num_classes, data).map(Self)
    }

    pub fn as_class_map(&self) -> &ClassMap {
        &self.0
    }
}

impl From<ClassMap> for PredictionMap {
    fn from(map: ClassMap) -> Self {
        Self(map)
    }
}

/// Mean pixel cross-entropy plus mean per-image dice loss over a batch.
///
/// Cross-entropy is `sum_n y_n * -ln(max(p_n, 1e-12))` per pixel, which
/// reduces to `-ln p` of the true class for one-hot targets. The dice term
/// for image `j` is `1 - 2 * sum(p * y) / sum(p^2 + y^2)` with both sums
/// running over all pixels and class channels.
pub fn dice_ce_loss(preds: &[PredictionMap], targets: &[ClassMap]) -> Result<f64> {
    if preds.is_empty() {
        return Err(Error::Domain("loss needs a non-empty batch".into()));
    }
    if preds.len() != targets.len() {
        return Err(Error::dims(
            format!("{} targets", preds.len()),
            targets.len(),
        ));
    }
    let first = preds[0].as_class_map();
    let (h, w, n) = (first.height(), first.width(), first.num_classes());
    let mut ce = 0.0;
    let mut dice = 0.0;
    for (pred, target) in preds.iter().zip(targets) {
        let p = pred.as_class_map();
        for map in [p, target] {
            if (map.height(), map.width(), map.num_classes()) != (h, w, n) {
                return Err(Error::dims(
                    format!("{h}x{w}x{n}"),
                    format!("{}x{}x{}", map.height(), map.width(), map.num_classes()),
                ));
            }
        }
        let mut overlap = 0.0;
        let mut energy = 0.0;
        for (&pv, &yv) in p.data().iter().zip(target.data()) {
            if yv > 0.0 {
                ce -= yv * pv.clamp(LOG_FLOOR, 1.0).ln();
            }
            overlap += pv * yv;
            energy += pv * pv + yv * yv;
        }
        // Targets sum to one per pixel, so `energy` is never zero.
        dice += 1.0 - 2.0 * overlap / energy;
    }
    let b = preds.len() as f64;
    Ok(ce / (b * (h * w) as f64) + dice / b)
}
