//! Pixel-level comparison against a reference segmentation.

use crate::error::{Error, Result};
use crate::mask::BinaryMask;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }
}

impl std::ops::Add for ConfusionCounts {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self {
            tp: self.tp + o.tp,
            tn: self.tn + o.tn,
            fp: self.fp + o.fp,
            fn_: self.fn_ + o.fn_,
        }
    }
}

/// Counts agreement between `pred` and `reference` over the pixels of `fov`.
pub fn confusion(
    pred: &BinaryMask,
    reference: &BinaryMask,
    fov: &BinaryMask,
) -> Result<ConfusionCounts> {
    for m in [reference, fov] {
        if m.dims() != pred.dims() {
            return Err(Error::DimensionMismatch {
                expected: pred.dims(),
                actual: m.dims(),
            });
        }
    }
    let mut c = ConfusionCounts::default();
    for ((&p, &r), _) in pred
        .data()
        .iter()
        .zip(reference.data())
        .zip(fov.data())
        .filter(|(_, &inside)| inside)
    {
        match (p, r) {
            (true, true) => c.tp += 1,
            (false, false) => c.tn += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
        }
    }
    Ok(c)
}

/// Per-image metrics. `se` is absent when the reference has no vessel pixel
/// and `sp` when it has no background pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    pub image_id: String,
    pub counts: ConfusionCounts,
    pub se: Option<f64>,
    pub sp: Option<f64>,
    pub acc: f64,
}

pub fn metrics(image_id: impl Into<String>, c: ConfusionCounts) -> Result<MetricsRecord> {
    let total = c.total();
    if total == 0 {
        return Err(Error::Empty("no evaluated pixel"));
    }
    let ratio = |num: u64, den: u64| (den > 0).then(|| num as f64 / den as f64);
    Ok(MetricsRecord {
        image_id: image_id.into(),
        counts: c,
        se: ratio(c.tp, c.tp + c.fn_),
        sp: ratio(c.tn, c.tn + c.fp),
        acc: (c.tp + c.tn) as f64 / total as f64,
    })
}

/// Database-level summary: unweighted means over images and the sample
/// standard deviation of the accuracy.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub images: usize,
    pub counts: ConfusionCounts,
    pub mean_se: Option<f64>,
    pub mean_sp: Option<f64>,
    pub mean_acc: f64,
    /// Sample standard deviation (n - 1 denominator); 0 for a single image.
    pub std_acc: f64,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

pub fn aggregate(records: &[MetricsRecord]) -> Result<Summary> {
    if records.is_empty() {
        return Err(Error::Empty("no metrics record to aggregate"));
    }
    let n = records.len();
    let mean_acc = mean(records.iter().map(|r| r.acc)).expect("non-empty");
    let std_acc = if n > 1 {
        let ss: f64 = records.iter().map(|r| (r.acc - mean_acc).powi(2)).sum();
        (ss / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(Summary {
        images: n,
        counts: records
            .iter()
            .map(|r| r.counts)
            .fold(ConfusionCounts::default(), |a, b| a + b),
        mean_se: mean(records.iter().filter_map(|r| r.se)),
        mean_sp: mean(records.iter().filter_map(|r| r.sp)),
        mean_acc,
        std_acc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn fixture() -> (BinaryMask, BinaryMask) {
        // reference: 7 vessel pixels on the first row and a half;
        // prediction: 4 of them and 3 spurious ones on the last row
        let reference = BinaryMask::from_fn(10, 10, |x, y| y * 10 + x < 7);
        let pred = BinaryMask::from_fn(10, 10, |x, y| y * 10 + x < 4 || (y == 9 && x < 3));
        (pred, reference)
    }

    #[test]
    fn hand_counted_fixture() {
        let (pred, reference) = fixture();
        let c = confusion(&pred, &reference, &BinaryMask::full(10, 10)).unwrap();
        assert_eq!(
            c,
            ConfusionCounts {
                tp: 4,
                tn: 90,
                fp: 3,
                fn_: 3
            }
        );

        let m = metrics("fixture", c).unwrap();
        assert_relative_eq!(m.se.unwrap(), 4.0 / 7.0);
        assert_relative_eq!(m.sp.unwrap(), 90.0 / 93.0);
        assert_relative_eq!(m.acc, 0.94);
        assert!((m.se.unwrap() - 0.5714).abs() < 5e-5);
        assert!((m.sp.unwrap() - 0.9677).abs() < 5e-5);
    }

    #[test]
    fn identical_and_complementary_masks() {
        let (_, reference) = fixture();
        let fov = BinaryMask::full(10, 10);
        let c = confusion(&reference, &reference, &fov).unwrap();
        assert_eq!((c.fp, c.fn_), (0, 0));
        let m = metrics("same", c).unwrap();
        assert_eq!((m.se, m.sp, m.acc), (Some(1.0), Some(1.0), 1.0));

        let c = confusion(&reference.complement(), &reference, &fov).unwrap();
        assert_eq!((c.tp, c.tn), (0, 0));
    }

    #[test]
    fn empty_reference_has_no_sensitivity() {
        let empty = BinaryMask::new(4, 4);
        let m = metrics(
            "bg",
            confusion(&empty, &empty, &BinaryMask::full(4, 4)).unwrap(),
        )
        .unwrap();
        assert_eq!((m.se, m.sp, m.acc), (None, Some(1.0), 1.0));
    }

    #[test]
    fn fov_restricts_counting() {
        let (pred, reference) = fixture();
        let top = BinaryMask::from_fn(10, 10, |_, y| y == 0);
        let c = confusion(&pred, &reference, &top).unwrap();
        assert_eq!(
            c,
            ConfusionCounts {
                tp: 4,
                tn: 3,
                fp: 0,
                fn_: 3
            }
        );
        assert!(metrics(
            "none",
            confusion(&pred, &reference, &BinaryMask::new(10, 10)).unwrap()
        )
        .is_err());
        assert!(confusion(&pred, &BinaryMask::new(3, 3), &top).is_err());
    }

    fn record(acc: f64) -> MetricsRecord {
        MetricsRecord {
            image_id: String::new(),
            counts: ConfusionCounts::default(),
            se: Some(0.5),
            sp: Some(0.9),
            acc,
        }
    }

    #[test]
    fn aggregate_examples() {
        let s = aggregate(&[record(0.94), record(0.95), record(0.96)]).unwrap();
        assert_relative_eq!(s.mean_acc, 0.95, epsilon = 1e-12);
        assert_relative_eq!(s.std_acc, 0.01, epsilon = 1e-12);

        let s = aggregate(&[record(0.93)]).unwrap();
        assert_eq!((s.mean_acc, s.std_acc), (0.93, 0.0));
        assert!(aggregate(&[]).is_err());
    }

    proptest! {
        #[test]
        fn counts_are_additive_over_fov_partitions(
            bits in prop::collection::vec(0u8..8, 64),
        ) {
            let get = |k: u8| BinaryMask::from_vec(8, 8, bits.iter().map(|b| b & k != 0).collect()).unwrap();
            let (pred, reference, part) = (get(1), get(2), get(4));
            let full = BinaryMask::full(8, 8);
            let whole = confusion(&pred, &reference, &full).unwrap();
            let a = confusion(&pred, &reference, &part).unwrap();
            let b = confusion(&pred, &reference, &part.complement()).unwrap();
            prop_assert_eq!(whole, a + b);
            prop_assert_eq!(whole.total(), 64);
        }

        #[test]
        fn copies_of_one_record_aggregate_to_it(acc in 0.0..1.0f64, n in 1usize..30) {
            let s = aggregate(&vec![record(acc); n]).unwrap();
            prop_assert!((s.mean_acc - acc).abs() < 1e-12);
            prop_assert!(s.std_acc < 1e-12);
        }
    }
}
