//! Region-overlap scores on class-id maps.

use crate::error::{Error, Result};

/// `(|A ∩ B|, |A|, |B|)` for the pixels labelled `class`.
fn counts(pred: &[u32], target: &[u32], class: u32) -> Result<(usize, usize, usize)> {
    if pred.len() != target.len() {
        return Err(Error::dims(pred.len(), target.len()));
    }
    let mut inter = 0;
    let mut a = 0;
    let mut b = 0;
    for (&p, &t) in pred.iter().zip(target) {
        let (in_a, in_b) = (p == class, t == class);
        a += usize::from(in_a);
        b += usize::from(in_b);
        inter += usize::from(in_a && in_b);
    }
    Ok((inter, a, b))
}

/// Dice similarity `2|A ∩ B| / (|A| + |B|)`; two empty sets score 1.
pub fn dice_coefficient(pred: &[u32], target: &[u32], class: u32) -> Result<f64> {
    let (inter, a, b) = counts(pred, target, class)?;
    if a + b == 0 {
        return Ok(1.0);
    }
    Ok(2.0 * inter as f64 / (a + b) as f64)
}

/// Jaccard index `|A ∩ B| / |A ∪ B|`; two empty sets score 1.
pub fn jaccard(pred: &[u32], target: &[u32], class: u32) -> Result<f64> {
    let (inter, a, b) = counts(pred, target, class)?;
    let union = a + b - inter;
    if union == 0 {
        return Ok(1.0);
    }
    Ok(inter as f64 / union as f64)
}
