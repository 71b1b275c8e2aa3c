use std::collections::BTreeSet;

use crate::error::{Error, Result};

use super::gf::FieldElem;

/// Polynomial over GF(2^κ), coefficients lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    kappa: u8,
    coeffs: Vec<FieldElem>,
}

impl Poly {
    pub fn zero(kappa: u8) -> Self {
        Poly { kappa, coeffs: Vec::new() }
    }

    pub fn from_coeffs(kappa: u8, mut coeffs: Vec<FieldElem>) -> Result<Self> {
        if coeffs.iter().any(|c| c.kappa() != kappa) {
            return Err(Error::param("coefficient from a different field"));
        }
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Ok(Poly { kappa, coeffs })
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn kappa(&self) -> u8 {
        self.kappa
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: FieldElem) -> FieldElem {
        self.coeffs.iter().rev().fold(FieldElem::zero(self.kappa), |acc, &c| acc * x + c)
    }
}

/// The unique polynomial of degree < `points.len()` through the given points.
pub fn lagrange_interpolate(points: &[(FieldElem, FieldElem)]) -> Result<Poly> {
    let Some(&(first, _)) = points.first() else {
        return Err(Error::param("no interpolation points"));
    };
    let kappa = first.kappa();
    let mut seen = BTreeSet::new();
    for &(x, y) in points {
        if x.kappa() != kappa || y.kappa() != kappa {
            return Err(Error::param("interpolation points from different fields"));
        }
        if !seen.insert(x) {
            return Err(Error::param(format!("duplicate x-coordinate {x:?}")));
        }
    }

    let n = points.len();
    let zero = FieldElem::zero(kappa);
    let mut acc = vec![zero; n];
    for (i, &(xi, yi)) in points.iter().enumerate() {
        // basis numerator Π_{j≠i} (X + x_j), built incrementally
        let mut basis = vec![FieldElem::one(kappa)];
        let mut denom = FieldElem::one(kappa);
        for (j, &(xj, _)) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            let mut next = vec![zero; basis.len() + 1];
            for (k, &c) in basis.iter().enumerate() {
                next[k] = next[k] + c * xj;
                next[k + 1] = next[k + 1] + c;
            }
            basis = next;
            denom = denom * (xi + xj);
        }
        let scale = yi * denom.inv()?;
        for (a, &b) in acc.iter_mut().zip(&basis) {
            *a = *a + b * scale;
        }
    }
    Poly::from_coeffs(kappa, acc)
}
