//! Dense univariate polynomials and the two families of "falling" products
//! built from an eigenvalue sequence.

use crate::field::{Elem, Field};
use crate::matrix::Matrix;

/// Coefficients from the constant term up, with no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensePoly {
    field: Field,
    coeffs: Vec<Elem>,
}

impl DensePoly {
    pub fn new(field: &Field, coeffs: Vec<Elem>) -> DensePoly {
        let mut p = DensePoly { field: field.clone(), coeffs };
        p.trim();
        p
    }

    pub fn zero(field: &Field) -> DensePoly {
        DensePoly { field: field.clone(), coeffs: Vec::new() }
    }

    pub fn constant(c: Elem) -> DensePoly {
        let f = c.field().clone();
        DensePoly::new(&f, vec![c])
    }

    /// x - r
    pub fn linear(r: &Elem) -> DensePoly {
        let f = r.field().clone();
        DensePoly::new(&f, vec![-r, f.one()])
    }

    /// The monic polynomial with the given roots.
    pub fn from_roots(field: &Field, roots: &[Elem]) -> DensePoly {
        roots
            .iter()
            .fold(DensePoly::constant(field.one()), |acc, r| acc.mul(&DensePoly::linear(r)))
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Elem::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &DensePoly) -> DensePoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = self.field.zero();
        let coeffs = (0..n)
            .map(|i| self.coeffs.get(i).unwrap_or(&z) + other.coeffs.get(i).unwrap_or(&z))
            .collect();
        DensePoly::new(&self.field, coeffs)
    }

    pub fn neg(&self) -> DensePoly {
        DensePoly::new(&self.field, self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, other: &DensePoly) -> DensePoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &DensePoly) -> DensePoly {
        if self.is_zero() || other.is_zero() {
            return DensePoly::zero(&self.field);
        }
        let mut out = vec![self.field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        DensePoly::new(&self.field, out)
    }

    pub fn scale(&self, c: &Elem) -> DensePoly {
        DensePoly::new(&self.field, self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn eval(&self, x: &Elem) -> Elem {
        self.coeffs.iter().rev().fold(self.field.zero(), |acc, c| &(&acc * x) + c)
    }

    pub fn eval_matrix(&self, m: &Matrix) -> Matrix {
        let n = m.order();
        self.coeffs.iter().rev().fold(Matrix::zero(&self.field, n), |acc, c| {
            acc.mul(m).add(&Matrix::identity(&self.field, n).scale(c))
        })
    }
}

/// (x - s_0)(x - s_1)...(x - s_{i-1})
pub fn tau(seq: &[Elem], i: usize) -> DensePoly {
    let f = seq[0].field().clone();
    DensePoly::from_roots(&f, &seq[..i])
}

/// (x - s_d)(x - s_{d-1})...(x - s_{d-i+1})
pub fn eta(seq: &[Elem], i: usize) -> DensePoly {
    let d = seq.len() - 1;
    let f = seq[0].field().clone();
    let roots: Vec<Elem> = (0..i).map(|h| seq[d - h].clone()).collect();
    DensePoly::from_roots(&f, &roots)
}

/// tau_i evaluated at x without building the polynomial.
pub fn tau_at(seq: &[Elem], i: usize, x: &Elem) -> Elem {
    seq[..i].iter().fold(x.field().one(), |acc, s| &acc * &(x - s))
}

/// eta_i evaluated at x without building the polynomial.
pub fn eta_at(seq: &[Elem], i: usize, x: &Elem) -> Elem {
    let d = seq.len() - 1;
    (0..i).fold(x.field().one(), |acc, h| &acc * &(x - &seq[d - h]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_vanish() {
        let q = Field::rationals();
        let roots: Vec<Elem> = [1, -2, 5].iter().map(|&v| q.from_i64(v)).collect();
        let p = DensePoly::from_roots(&q, &roots);
        assert_eq!(p.degree(), Some(3));
        for r in &roots {
            assert!(p.eval(r).is_zero());
        }
        assert_eq!(p.eval(&q.zero()), q.from_i64(10));
    }

    #[test]
    fn tau_and_eta_match_their_pointwise_forms() {
        let f = Field::prime(13).unwrap();
        let seq: Vec<Elem> = [3, 7, 1, 9].iter().map(|&v| f.from_i64(v)).collect();
        let x = f.from_i64(5);
        for i in 0..=3 {
            assert_eq!(tau(&seq, i).eval(&x), tau_at(&seq, i, &x));
            assert_eq!(eta(&seq, i).eval(&x), eta_at(&seq, i, &x));
        }
        assert!(eta(&seq, 2).eval(&seq[2]).is_zero());
        assert!(!eta(&seq, 2).eval(&seq[1]).is_zero());
    }
}
