//! Binary masks and the handful of binary morphology operations the
//! pipeline needs. All neighbourhoods are 8-connected.

use std::collections::VecDeque;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

const NEIGHBOURS_8: [(isize, isize); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

impl BinaryMask {
    /// All-clear mask.
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![false; width * height],
        }
    }

    /// All-set mask.
    pub fn full(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![true; width * height],
        }
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::InvalidImage(format!(
                "{} mask values for a {width}x{height} mask",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    /// Like [`get`](Self::get) but `false` outside the domain.
    #[inline]
    pub fn get_signed(&self, x: isize, y: isize) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.data[y as usize * self.width + x as usize]
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.data[y * self.width + x] = value;
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.data.iter().any(|&b| b)
    }

    pub fn complement(&self) -> Self {
        Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|b| !b).collect(),
        }
    }

    fn check_dims(&self, other: &Self) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.dims(),
                actual: other.dims(),
            });
        }
        Ok(())
    }

    pub fn and(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        Ok(Self {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| *a && *b)
                .collect(),
        })
    }

    /// Number of pixels where the two masks disagree, counted only where
    /// `within` is set.
    pub fn changed_count(&self, other: &Self, within: &Self) -> Result<usize> {
        self.check_dims(other)?;
        self.check_dims(within)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .zip(&within.data)
            .filter(|((a, b), w)| **w && a != b)
            .count())
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.dims() == other.dims() && self.data.iter().zip(&other.data).all(|(a, b)| !a || *b)
    }

    /// Bounding box of the set pixels as `(x_min, y_min, x_max, y_max)`.
    pub fn bounding_box(&self) -> Option<(usize, usize, usize, usize)> {
        let mut bbox: Option<(usize, usize, usize, usize)> = None;
        for (i, _) in self.data.iter().enumerate().filter(|(_, &b)| b) {
            let (x, y) = (i % self.width, i / self.width);
            bbox = Some(match bbox {
                None => (x, y, x, y),
                Some((x0, y0, x1, y1)) => (x0.min(x), y0.min(y), x1.max(x), y1.max(y)),
            });
        }
        bbox
    }

    pub fn rotate90(&self) -> Self {
        let (w, h) = (self.width, self.height);
        let mut data = vec![false; w * h];
        for y in 0..h {
            for x in 0..w {
                data[x * h + (h - 1 - y)] = self.data[y * w + x];
            }
        }
        Self {
            width: h,
            height: w,
            data,
        }
    }

    /// Labels 8-connected components of set pixels. Returns one label per
    /// pixel (0 = background, components numbered from 1 in raster order)
    /// and the pixel count of each component (index 0 unused).
    pub fn label_components(&self) -> (Vec<u32>, Vec<usize>) {
        let mut labels = vec![0u32; self.data.len()];
        let mut sizes = vec![0usize];
        let mut queue = VecDeque::new();
        for start in 0..self.data.len() {
            if !self.data[start] || labels[start] != 0 {
                continue;
            }
            let label = sizes.len() as u32;
            let mut size = 0;
            labels[start] = label;
            queue.push_back(start);
            while let Some(i) = queue.pop_front() {
                size += 1;
                for j in self.neighbours(i) {
                    if self.data[j] && labels[j] == 0 {
                        labels[j] = label;
                        queue.push_back(j);
                    }
                }
            }
            sizes.push(size);
        }
        (labels, sizes)
    }

    fn neighbours(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let (x, y) = ((i % self.width) as isize, (i / self.width) as isize);
        NEIGHBOURS_8.iter().filter_map(move |&(dx, dy)| {
            let (nx, ny) = (x + dx, y + dy);
            (nx >= 0 && ny >= 0 && (nx as usize) < self.width && (ny as usize) < self.height)
                .then(|| ny as usize * self.width + nx as usize)
        })
    }

    /// Erosion by the 3x3 square. Neighbours outside the domain are ignored,
    /// so the mask is treated as extending unchanged past the border.
    pub fn erode_square3(&self) -> Self {
        let data = (0..self.data.len())
            .map(|i| self.data[i] && self.neighbours(i).all(|j| self.data[j]))
            .collect();
        Self {
            width: self.width,
            height: self.height,
            data,
        }
    }

    /// Morphological reconstruction by dilation of `marker` under `self`
    /// (8-connected): every component of `self` touched by the marker.
    pub fn reconstruct_from(&self, marker: &Self) -> Result<Self> {
        self.check_dims(marker)?;
        let mut out = vec![false; self.data.len()];
        let mut queue: VecDeque<usize> = (0..self.data.len())
            .filter(|&i| marker.data[i] && self.data[i])
            .collect();
        for &i in &queue {
            out[i] = true;
        }
        while let Some(i) = queue.pop_front() {
            for j in self.neighbours(i) {
                if self.data[j] && !out[j] {
                    out[j] = true;
                    queue.push_back(j);
                }
            }
        }
        Ok(Self {
            width: self.width,
            height: self.height,
            data: out,
        })
    }

    /// Fills every clear region not 8-connected to the image border.
    pub fn fill_enclosed(&self) -> Self {
        let background = self.complement();
        let border = Self::from_fn(self.width, self.height, |x, y| {
            x == 0 || y == 0 || x + 1 == self.width || y + 1 == self.height
        });
        // reconstruct_from only fails on dimension mismatch
        let outside = background
            .reconstruct_from(&border)
            .expect("same dimensions");
        outside.complement()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(rows: &[&str]) -> BinaryMask {
        let h = rows.len();
        let w = rows[0].len();
        BinaryMask::from_fn(w, h, |x, y| rows[y].as_bytes()[x] == b'#')
    }

    #[test]
    fn diagonal_pixels_are_one_component() {
        let m = parse(&["#..", ".#.", "..#", "#.."]);
        let (labels, sizes) = m.label_components();
        assert_eq!(sizes, vec![0, 3, 1]);
        assert_eq!(labels[0], 1);
        assert_eq!(labels[9], 2);
    }

    #[test]
    fn erosion_ignores_outside() {
        let m = BinaryMask::full(3, 3);
        assert_eq!(m.erode_square3(), m);
        let m = parse(&["###", "#.#", "###"]);
        assert!(m.erode_square3().is_empty());
    }

    #[test]
    fn reconstruction_keeps_touched_components() {
        let m = parse(&["##..#", "#...#", "....#"]);
        let marker = parse(&["#....", ".....", "....."]);
        assert_eq!(
            m.reconstruct_from(&marker).unwrap(),
            parse(&["##...", "#....", "....."])
        );
    }

    #[test]
    fn fill_enclosed_fills_interior_only() {
        let m = parse(&[".....", ".###.", ".#.#.", ".###.", "....."]);
        assert_eq!(
            m.fill_enclosed(),
            parse(&[".....", ".###.", ".###.", ".###.", "....."])
        );
        let open = parse(&["#.#", "#.#", "###"]);
        assert_eq!(open.fill_enclosed(), open);
    }

    #[test]
    fn bounding_box_and_counts() {
        let m = parse(&["....", ".#..", "...#"]);
        assert_eq!(m.bounding_box(), Some((1, 1, 3, 2)));
        assert_eq!(m.count(), 2);
        assert_eq!(BinaryMask::new(2, 2).bounding_box(), None);
    }

    #[test]
    fn changed_count_respects_window() {
        let a = parse(&["##", ".."]);
        let b = parse(&["#.", "#."]);
        assert_eq!(a.changed_count(&b, &BinaryMask::full(2, 2)).unwrap(), 2);
        assert_eq!(a.changed_count(&b, &parse(&["#.", ".."])).unwrap(), 0);
    }
}
