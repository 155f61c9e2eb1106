//! Extended-real functions sampled on uniform grids and the discrete Baire
//! envelopes.
//!
//! `lower_envelope` is the discrete lower Baire operator `I`: the minimum
//! over the L∞ node ball of radius `r`, clipped at the grid boundary.
//! `upper_envelope` is its dual `S`. The continuum operators take limits
//! over all neighborhoods; on a grid the smallest neighborhood has radius
//! `h`, so the radii are exposed to the caller.
//!
//! Compositions follow the usual conventions:
//! `nlsc_regularize(u, ri, ro) = I_ro(S_ri(u))` and
//! `usc_then_nlsc(u, r) = I_2r(S_r(I_r(u)))`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geom::AxisBox;
use crate::xreal::XReal;

/// Uniform lattice on a box, faces included.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    bbox: AxisBox,
    nodes_per_axis: Vec<usize>,
}

impl Grid {
    pub fn new(bbox: AxisBox, nodes_per_axis: Vec<usize>) -> Result<Self> {
        if nodes_per_axis.len() != bbox.dim() {
            return Err(Error::DimensionMismatch { expected: bbox.dim(), got: nodes_per_axis.len() });
        }
        if nodes_per_axis.iter().any(|&n| n < 2) {
            return Err(Error::InvalidArgument("grid needs at least 2 nodes per axis".into()));
        }
        if !bbox.has_interior() {
            return Err(Error::InvalidBox("grid box must have nonempty interior".into()));
        }
        Ok(Grid { bbox, nodes_per_axis })
    }

    /// Same node count on every axis.
    pub fn uniform(bbox: AxisBox, nodes: usize) -> Result<Self> {
        let d = bbox.dim();
        Grid::new(bbox, vec![nodes; d])
    }

    pub fn bbox(&self) -> &AxisBox {
        &self.bbox
    }

    pub fn nodes_per_axis(&self) -> &[usize] {
        &self.nodes_per_axis
    }

    pub fn dim(&self) -> usize {
        self.nodes_per_axis.len()
    }

    pub fn len(&self) -> usize {
        self.nodes_per_axis.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.bbox.width(axis) / (self.nodes_per_axis[axis] - 1) as f64
    }

    /// Row-major strides (last axis fastest).
    fn strides(&self) -> Vec<usize> {
        let d = self.dim();
        let mut s = vec![1; d];
        for i in (0..d.saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.nodes_per_axis[i + 1];
        }
        s
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for i in (0..self.dim()).rev() {
            idx[i] = flat % self.nodes_per_axis[i];
            flat /= self.nodes_per_axis[i];
        }
        idx
    }

    pub fn coord(&self, axis: usize, k: usize) -> f64 {
        let n = self.nodes_per_axis[axis];
        if k + 1 == n {
            self.bbox.hi()[axis]
        } else {
            self.bbox.lo()[axis] + self.bbox.width(axis) * (k as f64 / (n - 1) as f64)
        }
    }

    pub fn node(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat).iter().enumerate().map(|(a, &k)| self.coord(a, k)).collect()
    }

    pub fn nodes(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(move |i| self.node(i))
    }
}

/// One extended real per grid node.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFn {
    grid: Grid,
    values: Vec<XReal>,
}

impl GridFn {
    pub fn new(grid: Grid, values: Vec<XReal>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), got: values.len() });
        }
        Ok(GridFn { grid, values })
    }

    pub fn constant(grid: Grid, c: XReal) -> Self {
        let n = grid.len();
        GridFn { grid, values: vec![c; n] }
    }

    /// Samples `f` at every node; NaN results are errors.
    pub fn from_fn(grid: Grid, mut f: impl FnMut(&[f64]) -> f64) -> Result<Self> {
        let values = grid.nodes().map(|x| XReal::new(f(&x))).collect::<Result<Vec<_>>>()?;
        Ok(GridFn { grid, values })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[XReal] {
        &self.values
    }

    pub fn into_values(self) -> Vec<XReal> {
        self.values
    }

    pub fn neg(&self) -> GridFn {
        self.map(|v| -v)
    }

    pub fn map(&self, f: impl Fn(XReal) -> XReal) -> GridFn {
        GridFn { grid: self.grid.clone(), values: self.values.iter().map(|v| f(*v)).collect() }
    }

    /// Nodewise combination of two functions on the same grid.
    pub fn zip_with(&self, other: &GridFn, f: impl Fn(XReal, XReal) -> XReal) -> Result<GridFn> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect();
        Ok(GridFn { grid: self.grid.clone(), values })
    }

    /// `self <= other` at every node.
    pub fn le(&self, other: &GridFn) -> bool {
        self.grid == other.grid && self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }
}

/// Separable sliding-window reduction along every axis.
fn window_filter(u: &GridFn, r: usize, pick: fn(XReal, XReal) -> XReal) -> GridFn {
    let grid = &u.grid;
    let strides = grid.strides();
    let mut cur = u.values.clone();
    let mut next = cur.clone();
    for (&n, &stride) in grid.nodes_per_axis.iter().zip(&strides) {
        for (flat, out) in next.iter_mut().enumerate() {
            let k = (flat / stride) % n;
            let base = flat - k * stride;
            let lo = k.saturating_sub(r);
            let hi = (k + r).min(n - 1);
            let mut acc = cur[base + lo * stride];
            for j in lo + 1..=hi {
                acc = pick(acc, cur[base + j * stride]);
            }
            *out = acc;
        }
        core::mem::swap(&mut cur, &mut next);
    }
    GridFn { grid: grid.clone(), values: cur }
}

/// Discrete lower Baire operator: window minimum of radius `r`.
pub fn lower_envelope(u: &GridFn, r: usize) -> Result<GridFn> {
    if r == 0 {
        return Err(Error::InvalidArgument("envelope radius must be >= 1".into()));
    }
    Ok(window_filter(u, r, XReal::min))
}

/// Discrete upper Baire operator: window maximum of radius `r`.
pub fn upper_envelope(u: &GridFn, r: usize) -> Result<GridFn> {
    if r == 0 {
        return Err(Error::InvalidArgument("envelope radius must be >= 1".into()));
    }
    Ok(window_filter(u, r, XReal::max))
}

/// Discrete `I∘S`. The outer radius must be strictly larger than the inner
/// one, otherwise a dilated up-spike survives the erosion.
pub fn nlsc_regularize(u: &GridFn, r_inner: usize, r_outer: usize) -> Result<GridFn> {
    if r_inner == 0 {
        return Err(Error::InvalidArgument("envelope radius must be >= 1".into()));
    }
    if r_outer <= r_inner {
        return Err(Error::RadiusOrder { inner: r_inner, outer: r_outer });
    }
    lower_envelope(&upper_envelope(u, r_inner)?, r_outer)
}

/// Discrete `I∘S∘I`, the regularization used for infima.
pub fn usc_then_nlsc(u: &GridFn, r: usize) -> Result<GridFn> {
    nlsc_regularize(&lower_envelope(u, r)?, r, 2 * r)
}

/// True iff every radius-1 node window contains a finite value.
pub fn is_nearly_finite(u: &GridFn) -> bool {
    let finite = u.map(|v| if v.is_finite() { XReal::ZERO } else { XReal::NEG_INFINITY });
    window_filter(&finite, 1, XReal::max).values.iter().all(|v| v.is_finite())
}
