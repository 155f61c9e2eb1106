//! Points, axis-aligned boxes, multi-indices and interior sample lattices.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// A point of `Rⁿ` with finite coordinates. When a problem has a time
/// variable it is the last coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument("point of dimension 0".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite coordinate in {coords:?}")));
        }
        Ok(Point(coords))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Closed axis-aligned box `[lo, hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl AxisBox {
    /// Builds a box; `lo[i] <= hi[i]` is required, degenerate axes allowed.
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch { expected: lo.len(), got: hi.len() });
        }
        if lo.is_empty() {
            return Err(Error::InvalidBox("dimension 0".into()));
        }
        for (i, (a, b)) in lo.iter().zip(&hi).enumerate() {
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::InvalidBox(format!("non-finite bound on axis {i}")));
            }
            if a > b {
                return Err(Error::InvalidBox(format!("lo > hi on axis {i}")));
            }
        }
        Ok(AxisBox { lo, hi })
    }

    /// The unit cube `[0,1]ⁿ`.
    pub fn unit(dim: usize) -> Self {
        AxisBox { lo: alloc::vec![0.0; dim], hi: alloc::vec![1.0; dim] }
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn width(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| midpoint(*a, *b)).collect()
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|i| self.width(i)).product()
    }

    pub fn has_interior(&self) -> bool {
        (0..self.dim()).all(|i| self.width(i) > 0.0)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().enumerate().all(|(i, v)| self.lo[i] <= *v && *v <= self.hi[i])
    }

    pub fn contains_interior(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().enumerate().all(|(i, v)| self.lo[i] < *v && *v < self.hi[i])
    }

    pub fn contains_box(&self, other: &AxisBox) -> bool {
        other.dim() == self.dim() && (0..self.dim()).all(|i| self.lo[i] <= other.lo[i] && other.hi[i] <= self.hi[i])
    }

    /// Intersection with nonempty interior, if any.
    pub fn intersect(&self, other: &AxisBox) -> Option<AxisBox> {
        if other.dim() != self.dim() {
            return None;
        }
        let mut lo = Vec::with_capacity(self.dim());
        let mut hi = Vec::with_capacity(self.dim());
        for i in 0..self.dim() {
            let a = self.lo[i].max(other.lo[i]);
            let b = self.hi[i].min(other.hi[i]);
            if a >= b {
                return None;
            }
            lo.push(a);
            hi.push(b);
        }
        Some(AxisBox { lo, hi })
    }

    /// Axis of greatest width; ties go to the lowest index.
    pub fn widest_axis(&self) -> usize {
        let mut best = 0;
        for i in 1..self.dim() {
            if self.width(i) > self.width(best) {
                best = i;
            }
        }
        best
    }

    pub fn max_width(&self) -> f64 {
        self.width(self.widest_axis())
    }

    /// Lexicographic order on `(lo, hi)`, used wherever cells need a
    /// canonical order.
    pub fn lex_cmp(&self, other: &AxisBox) -> core::cmp::Ordering {
        for (a, b) in self.lo.iter().zip(&other.lo).chain(self.hi.iter().zip(&other.hi)) {
            match a.partial_cmp(b) {
                Some(core::cmp::Ordering::Equal) | None => continue,
                Some(o) => return o,
            }
        }
        core::cmp::Ordering::Equal
    }
}

fn midpoint(a: f64, b: f64) -> f64 {
    a + (b - a) * 0.5
}

/// Splits `b` at the midpoint of `axis`.
pub fn bisect(b: &AxisBox, axis: usize) -> Result<(AxisBox, AxisBox)> {
    if axis >= b.dim() {
        return Err(Error::AxisOutOfRange { axis, dim: b.dim() });
    }
    if b.width(axis) <= 0.0 {
        return Err(Error::ZeroWidthAxis { axis });
    }
    let mid = midpoint(b.lo[axis], b.hi[axis]);
    if mid <= b.lo[axis] || mid >= b.hi[axis] {
        // width below float resolution
        return Err(Error::ZeroWidthAxis { axis });
    }
    let mut left = b.clone();
    let mut right = b.clone();
    left.hi[axis] = mid;
    right.lo[axis] = mid;
    Ok((left, right))
}

/// Exponents of a partial derivative `D^α`, one per axis.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(orders: Vec<u32>) -> Self {
        MultiIndex(orders)
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex(alloc::vec![0; dim])
    }

    /// `e_axis * k`.
    pub fn axis(dim: usize, axis: usize, k: u32) -> Self {
        let mut v = alloc::vec![0; dim];
        v[axis] = k;
        MultiIndex(v)
    }

    pub fn orders(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|α|`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&k| k == 0)
    }

    /// `α! = ∏ αᵢ!`.
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&k| (1..=k).map(|j| j as f64).product::<f64>()).product()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other` when componentwise nonnegative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            out.push(a.checked_sub(*b)?);
        }
        Some(MultiIndex(out))
    }

    /// All multi-indices of dimension `dim` with `|α| <= degree`, in
    /// lexicographic order.
    pub fn all_up_to(dim: usize, degree: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = alloc::vec![0u32; dim];
        fn rec(axis: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if axis == cur.len() {
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for k in 0..=left {
                cur[axis] = k;
                rec(axis + 1, left - k, cur, out);
            }
            cur[axis] = 0;
        }
        rec(0, degree, &mut cur, &mut out);
        out.sort();
        out
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "α{:?}", self.0)
    }
}

impl fmt::Display for MultiIndex {
    /// Comma-joined exponents, e.g. `2,0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}")?;
        }
        Ok(())
    }
}

/// `∏ (xᵢ - aᵢ)^{αᵢ} / α!`.
pub fn monomial_eval(alpha: &MultiIndex, x: &[f64], center: &[f64]) -> Result<f64> {
    if x.len() != alpha.dim() {
        return Err(Error::DimensionMismatch { expected: alpha.dim(), got: x.len() });
    }
    if center.len() != alpha.dim() {
        return Err(Error::DimensionMismatch { expected: alpha.dim(), got: center.len() });
    }
    let mut v = 1.0;
    for ((xi, ai), k) in x.iter().zip(center).zip(alpha.orders()) {
        v *= powu(xi - ai, *k);
    }
    Ok(v / alpha.factorial())
}

#[inline]
pub(crate) fn powu(base: f64, k: u32) -> f64 {
    let mut acc = 1.0;
    for _ in 0..k {
        acc *= base;
    }
    acc
}

/// Finite stand-in for a dense subset: the interior lattice of every cell.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    pub points: Vec<Vec<f64>>,
    /// Points per axis per cell.
    pub density: usize,
    /// Index of the owning cell for each point.
    pub cell_of: Vec<usize>,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Fractions `j/(k+1)`, `j = 1..=k`: never on a face.
pub fn interior_lattice(cell: &AxisBox, density: usize) -> Vec<Vec<f64>> {
    let dim = cell.dim();
    let total = density.pow(dim as u32);
    let mut out = Vec::with_capacity(total);
    let mut idx = alloc::vec![0usize; dim];
    for _ in 0..total {
        let p: Vec<f64> = (0..dim)
            .map(|i| {
                let frac = (idx[i] + 1) as f64 / (density + 1) as f64;
                cell.lo[i] + cell.width(i) * frac
            })
            .collect();
        out.push(p);
        // row-major, last axis fastest
        for i in (0..dim).rev() {
            idx[i] += 1;
            if idx[i] < density {
                break;
            }
            idx[i] = 0;
        }
    }
    out
}

/// Interior sample lattice of every cell of a partition of `b`, cell by cell.
pub fn sample_cells(b: &AxisBox, partition: &[AxisBox], density: usize) -> Result<SampleSet> {
    if partition.is_empty() {
        return Err(Error::EmptyPartition);
    }
    if density == 0 {
        return Err(Error::InvalidArgument("density must be >= 1".into()));
    }
    let mut points = Vec::new();
    let mut cell_of = Vec::new();
    for (ci, cell) in partition.iter().enumerate() {
        if cell.dim() != b.dim() {
            return Err(Error::DimensionMismatch { expected: b.dim(), got: cell.dim() });
        }
        if !b.contains_box(cell) {
            return Err(Error::InvalidBox(format!("cell {ci} not inside the domain")));
        }
        for p in interior_lattice(cell, density) {
            // a zero-width axis would put the point on the face
            if cell.contains_interior(&p) {
                points.push(p);
                cell_of.push(ci);
            }
        }
    }
    Ok(SampleSet { points, density, cell_of })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn bx(lo: &[f64], hi: &[f64]) -> AxisBox {
        AxisBox::new(lo.to_vec(), hi.to_vec()).unwrap()
    }

    #[test]
    fn bisect_examples() {
        let (l, r) = bisect(&bx(&[0.0], &[1.0]), 0).unwrap();
        assert_eq!((l, r), (bx(&[0.0], &[0.5]), bx(&[0.5], &[1.0])));
        let (l, r) = bisect(&bx(&[0.0, 0.0], &[1.0, 2.0]), 1).unwrap();
        assert_eq!(l, bx(&[0.0, 0.0], &[1.0, 1.0]));
        assert_eq!(r, bx(&[0.0, 1.0], &[1.0, 2.0]));
        assert_eq!(bisect(&bx(&[1.0, 0.0], &[1.0, 1.0]), 0), Err(Error::ZeroWidthAxis { axis: 0 }));
    }

    #[test]
    fn monomial_examples() {
        let z = MultiIndex::zero(3);
        assert_eq!(monomial_eval(&z, &[1.0, 2.0, 3.0], &[0.5, 0.5, 0.5]).unwrap(), 1.0);
        assert_eq!(monomial_eval(&MultiIndex::new(vec![2]), &[3.0], &[1.0]).unwrap(), 2.0);
        assert_eq!(monomial_eval(&MultiIndex::new(vec![1, 1]), &[2.0, 3.0], &[0.0, 1.0]).unwrap(), 4.0);
        assert!(matches!(
            monomial_eval(&MultiIndex::new(vec![1, 1]), &[2.0], &[0.0, 1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn sample_examples() {
        let s = sample_cells(&bx(&[0.0], &[1.0]), &[bx(&[0.0], &[1.0])], 3).unwrap();
        assert_eq!(s.points, vec![vec![0.25], vec![0.5], vec![0.75]]);
        let s = sample_cells(&bx(&[0.0], &[2.0]), &[bx(&[0.0], &[1.0]), bx(&[1.0], &[2.0])], 1).unwrap();
        assert_eq!(s.points, vec![vec![0.5], vec![1.5]]);
        let s = sample_cells(&AxisBox::unit(2), &[AxisBox::unit(2)], 2).unwrap();
        let (a, b) = (1.0 / 3.0, 2.0 / 3.0);
        assert_eq!(s.points, vec![vec![a, a], vec![a, b], vec![b, a], vec![b, b]]);
        assert_eq!(sample_cells(&AxisBox::unit(1), &[], 2), Err(Error::EmptyPartition));
    }

    #[test]
    fn all_up_to_counts() {
        // C(n+d, d)
        assert_eq!(MultiIndex::all_up_to(4, 2).len(), 15);
        assert_eq!(MultiIndex::all_up_to(1, 3).len(), 4);
    }

    fn arb_box() -> impl Strategy<Value = AxisBox> {
        prop::collection::vec((-10.0f64..10.0, 1e-3f64..5.0), 1..4).prop_map(|v| {
            let lo: Vec<f64> = v.iter().map(|p| p.0).collect();
            let hi: Vec<f64> = v.iter().map(|p| p.0 + p.1).collect();
            AxisBox::new(lo, hi).unwrap()
        })
    }

    proptest! {
        #[test]
        fn bisect_preserves_volume(b in arb_box(), axis in 0usize..3) {
            let axis = axis % b.dim();
            let (l, r) = bisect(&b, axis).unwrap();
            let v = b.volume();
            prop_assert!(((l.volume() + r.volume()) - v).abs() <= 4.0 * f64::EPSILON * v);
            prop_assert_eq!(l.hi()[axis], r.lo()[axis]);
            prop_assert!(l.intersect(&r).is_none());
        }

        #[test]
        fn samples_avoid_the_skeleton(b in arb_box(), density in 1usize..5) {
            let (l, r) = bisect(&b, b.widest_axis()).unwrap();
            let s = sample_cells(&b, &[l.clone(), r.clone()], density).unwrap();
            for (p, c) in s.points.iter().zip(&s.cell_of) {
                let cell = if *c == 0 { &l } else { &r };
                prop_assert!(cell.contains_interior(p));
            }
        }
    }
}
