//! Four-colour comparison of a prediction with a reference.

use crate::error::{Error, Result};
use crate::lip::ColorImage;
use crate::mask::BinaryMask;

pub const TRUE_POSITIVE: [u8; 3] = [0, 0, 0];
pub const TRUE_NEGATIVE: [u8; 3] = [255, 255, 255];
pub const FALSE_POSITIVE: [u8; 3] = [0, 255, 255];
pub const FALSE_NEGATIVE: [u8; 3] = [255, 0, 0];

/// Black for true positives, white for true negatives, cyan for false
/// positives and red for false negatives. Pixels outside `fov` are white.
pub fn render_overlay(
    pred: &BinaryMask,
    reference: &BinaryMask,
    fov: &BinaryMask,
) -> Result<ColorImage> {
    for m in [reference, fov] {
        if m.dims() != pred.dims() {
            return Err(Error::DimensionMismatch {
                expected: pred.dims(),
                actual: m.dims(),
            });
        }
    }
    let data = pred
        .data()
        .iter()
        .zip(reference.data())
        .zip(fov.data())
        .map(|((&p, &r), &inside)| match (inside, p, r) {
            (false, _, _) => TRUE_NEGATIVE,
            (true, true, true) => TRUE_POSITIVE,
            (true, false, false) => TRUE_NEGATIVE,
            (true, true, false) => FALSE_POSITIVE,
            (true, false, true) => FALSE_NEGATIVE,
        })
        .collect();
    ColorImage::new(pred.width(), pred.height(), data)
}
