//! Multivariate polynomials in the shifted monomial basis `(x - c)^α`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geom::{powu, MultiIndex};

/// `Σ_α coeffs[α] · ∏ᵢ (xᵢ - centerᵢ)^{αᵢ}`.
///
/// Coefficients are plain monomial coefficients (no `1/α!` scaling).
/// `degree` is the declared maximal total degree; it may exceed the degree
/// of the stored terms, e.g. a constant declared as a degree-2 piece.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    center: Vec<f64>,
    coeffs: BTreeMap<MultiIndex, f64>,
    degree: u32,
}

impl Poly {
    pub fn new(center: Vec<f64>, coeffs: BTreeMap<MultiIndex, f64>, degree: u32) -> Result<Self> {
        for (alpha, c) in &coeffs {
            if alpha.dim() != center.len() {
                return Err(Error::DimensionMismatch { expected: center.len(), got: alpha.dim() });
            }
            if alpha.order() > degree {
                return Err(Error::DegreeTooLow { needed: alpha.order() as usize, got: degree as usize });
            }
            if !c.is_finite() {
                return Err(Error::InvalidArgument("non-finite polynomial coefficient".into()));
            }
        }
        Ok(Poly { center, coeffs, degree })
    }

    pub fn zero(center: Vec<f64>, degree: u32) -> Self {
        Poly { center, coeffs: BTreeMap::new(), degree }
    }

    pub fn constant(center: Vec<f64>, c: f64, degree: u32) -> Self {
        let mut coeffs = BTreeMap::new();
        if c != 0.0 {
            coeffs.insert(MultiIndex::zero(center.len()), c);
        }
        Poly { center, coeffs, degree }
    }

    /// Taylor polynomial `Σ ξ_α (x - c)^α / α!` from derivative values.
    pub fn from_derivatives<'a>(
        center: Vec<f64>,
        derivs: impl IntoIterator<Item = (&'a MultiIndex, f64)>,
        degree: u32,
    ) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (alpha, v) in derivs {
            if v != 0.0 {
                *coeffs.entry(alpha.clone()).or_insert(0.0) += v / alpha.factorial();
            }
        }
        Poly::new(center, coeffs, degree)
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn coeffs(&self) -> &BTreeMap<MultiIndex, f64> {
        &self.coeffs
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Highest total degree actually present.
    pub fn effective_degree(&self) -> u32 {
        self.coeffs.keys().map(MultiIndex::order).max().unwrap_or(0)
    }

    pub fn with_degree(mut self, degree: u32) -> Result<Self> {
        if self.effective_degree() > degree {
            return Err(Error::DegreeTooLow { needed: self.effective_degree() as usize, got: degree as usize });
        }
        self.degree = degree;
        Ok(self)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim());
        let mut sum = 0.0;
        for (alpha, c) in &self.coeffs {
            let mut term = *c;
            for ((xi, ci), k) in x.iter().zip(&self.center).zip(alpha.orders()) {
                if *k > 0 {
                    term *= powu(xi - ci, *k);
                }
            }
            sum += term;
        }
        sum
    }

    /// `D^β p` as a polynomial around the same center.
    pub fn derivative(&self, beta: &MultiIndex) -> Poly {
        let mut coeffs = BTreeMap::new();
        for (alpha, c) in &self.coeffs {
            if let Some(rest) = alpha.checked_sub(beta) {
                let mut f = 1.0;
                for (a, b) in alpha.orders().iter().zip(beta.orders()) {
                    for j in 0..*b {
                        f *= (a - j) as f64;
                    }
                }
                *coeffs.entry(rest).or_insert(0.0) += c * f;
            }
        }
        Poly { center: self.center.clone(), coeffs, degree: self.degree.saturating_sub(beta.order()) }
    }

    pub fn deriv_eval(&self, x: &[f64], beta: &MultiIndex) -> f64 {
        if beta.is_zero() {
            return self.eval(x);
        }
        self.derivative(beta).eval(x)
    }

    /// Same polynomial expanded around another center.
    pub fn recenter(&self, new_center: &[f64]) -> Poly {
        if new_center == self.center.as_slice() {
            return self.clone();
        }
        let shift: Vec<f64> = new_center.iter().zip(&self.center).map(|(n, o)| n - o).collect();
        let mut coeffs: BTreeMap<MultiIndex, f64> = BTreeMap::new();
        for (alpha, c) in &self.coeffs {
            // ∏ᵢ Σ_j C(αᵢ, j) yᵢ^j shiftᵢ^{αᵢ - j}, y = x - new_center
            let mut terms: Vec<(Vec<u32>, f64)> = vec![(Vec::new(), *c)];
            for (i, &a) in alpha.orders().iter().enumerate() {
                let mut next = Vec::with_capacity(terms.len() * (a as usize + 1));
                for (idx, v) in &terms {
                    for j in 0..=a {
                        let w = binom(a, j) * powu(shift[i], a - j);
                        if w == 0.0 {
                            continue;
                        }
                        let mut idx2 = idx.clone();
                        idx2.push(j);
                        next.push((idx2, v * w));
                    }
                }
                terms = next;
            }
            for (idx, v) in terms {
                *coeffs.entry(MultiIndex::new(idx)).or_insert(0.0) += v;
            }
        }
        coeffs.retain(|_, v| *v != 0.0);
        Poly { center: new_center.to_vec(), coeffs, degree: self.degree }
    }

    pub fn add(&self, other: &Poly) -> Result<Poly> {
        self.check_dim(other)?;
        let other = other.recenter(&self.center);
        let mut coeffs = self.coeffs.clone();
        for (alpha, c) in other.coeffs {
            *coeffs.entry(alpha).or_insert(0.0) += c;
        }
        coeffs.retain(|_, v| *v != 0.0);
        Ok(Poly { center: self.center.clone(), coeffs, degree: self.degree.max(other.degree) })
    }

    pub fn scale(&self, s: f64) -> Poly {
        let mut coeffs: BTreeMap<MultiIndex, f64> = self.coeffs.iter().map(|(a, c)| (a.clone(), c * s)).collect();
        coeffs.retain(|_, v| *v != 0.0);
        Poly { center: self.center.clone(), coeffs, degree: self.degree }
    }

    pub fn mul(&self, other: &Poly) -> Result<Poly> {
        self.check_dim(other)?;
        let other = other.recenter(&self.center);
        let mut coeffs: BTreeMap<MultiIndex, f64> = BTreeMap::new();
        for (a, ca) in &self.coeffs {
            for (b, cb) in &other.coeffs {
                *coeffs.entry(a.add(b)).or_insert(0.0) += ca * cb;
            }
        }
        coeffs.retain(|_, v| *v != 0.0);
        Ok(Poly { center: self.center.clone(), coeffs, degree: self.degree + other.degree })
    }

    /// Lifts a polynomial in the first `n` coordinates to `n + 1`
    /// coordinates, constant in the new last one, which is centered at
    /// `last_center`.
    pub fn extend_last_axis(&self, last_center: f64) -> Poly {
        let mut center = self.center.clone();
        center.push(last_center);
        let coeffs = self
            .coeffs
            .iter()
            .map(|(a, c)| {
                let mut o = a.orders().to_vec();
                o.push(0);
                (MultiIndex::new(o), *c)
            })
            .collect();
        Poly { center, coeffs, degree: self.degree }
    }

    fn check_dim(&self, other: &Poly) -> Result<()> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(())
    }
}

fn binom(n: u32, k: u32) -> f64 {
    let mut r = 1.0;
    for j in 0..k {
        r = r * (n - j) as f64 / (j + 1) as f64;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p1(center: f64, c: &[f64]) -> Poly {
        let coeffs = c.iter().enumerate().map(|(k, v)| (MultiIndex::new(vec![k as u32]), *v)).collect();
        Poly::new(vec![center], coeffs, c.len().saturating_sub(1) as u32).unwrap()
    }

    #[test]
    fn eval_and_derivatives() {
        // 2 + 3(x-1) + 2(x-1)^2
        let p = p1(1.0, &[2.0, 3.0, 2.0]);
        assert_eq!(p.eval(&[2.0]), 7.0);
        assert_eq!(p.deriv_eval(&[1.0], &MultiIndex::new(vec![1])), 3.0);
        assert_eq!(p.deriv_eval(&[1.0], &MultiIndex::new(vec![2])), 4.0);
        assert_eq!(p.deriv_eval(&[1.0], &MultiIndex::new(vec![3])), 0.0);
    }

    #[test]
    fn taylor_coefficients_divide_by_factorial() {
        let a0 = MultiIndex::new(vec![0]);
        let a1 = MultiIndex::new(vec![1]);
        let a2 = MultiIndex::new(vec![2]);
        let p = Poly::from_derivatives(vec![1.0], [(&a0, 2.0), (&a1, 3.0), (&a2, 4.0)], 2).unwrap();
        assert_eq!(p, p1(1.0, &[2.0, 3.0, 2.0]));
    }

    #[test]
    fn degree_is_checked() {
        let mut c = BTreeMap::new();
        c.insert(MultiIndex::new(vec![3]), 1.0);
        assert!(matches!(Poly::new(vec![0.0], c, 2), Err(Error::DegreeTooLow { .. })));
    }

    proptest! {
        #[test]
        fn recenter_preserves_values(
            c in prop::collection::vec(-3.0f64..3.0, 6),
            x in -2.0f64..2.0, y in -2.0f64..2.0, s in -1.0f64..1.0, t in -1.0f64..1.0,
        ) {
            let idx = [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]];
            let coeffs = idx.iter().zip(&c).map(|(a, v)| (MultiIndex::new(a.to_vec()), *v)).collect();
            let p = Poly::new(vec![0.3, -0.2], coeffs, 2).unwrap();
            let q = p.recenter(&[s, t]);
            prop_assert!((p.eval(&[x, y]) - q.eval(&[x, y])).abs() < 1e-10);
            let m = p.mul(&q).unwrap();
            prop_assert!((m.eval(&[x, y]) - p.eval(&[x, y]) * q.eval(&[x, y])).abs() < 1e-9);
        }
    }
}
