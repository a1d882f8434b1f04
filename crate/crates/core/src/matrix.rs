//! Dense square matrices over a [`Field`] with exact elimination.

use std::fmt;

use crate::field::{Elem, Field, FieldError};
use crate::poly::DensePoly;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatrixError {
    #[error("order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("matrix is singular")]
    Singular,
    #[error("eigenvalue list repeats {0}")]
    RepeatedEigenvalue(String),
    #[error("eigenvalue list is not the spectrum of the matrix: {0}")]
    NotAnEigenvalue(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    n: usize,
    data: Vec<Elem>,
}

impl Matrix {
    pub fn zero(field: &Field, n: usize) -> Matrix {
        Matrix { field: field.clone(), n, data: vec![field.zero(); n * n] }
    }

    pub fn identity(field: &Field, n: usize) -> Matrix {
        Matrix::from_fn(field, n, |i, j| if i == j { field.one() } else { field.zero() })
    }

    pub fn diagonal(field: &Field, diag: &[Elem]) -> Matrix {
        Matrix::from_fn(field, diag.len(), |i, j| if i == j { diag[i].clone() } else { field.zero() })
    }

    pub fn from_fn(field: &Field, n: usize, mut f: impl FnMut(usize, usize) -> Elem) -> Matrix {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { field: field.clone(), n, data }
    }

    pub fn from_rows(field: &Field, rows: Vec<Vec<Elem>>) -> Result<Matrix, MatrixError> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(MatrixError::OrderMismatch(n, row.len()));
            }
            for e in row {
                if e.field() != field {
                    return Err(FieldError::CtxMismatch(e.field().descriptor(), field.descriptor()).into());
                }
                data.push(e);
            }
        }
        Ok(Matrix { field: field.clone(), n, data })
    }

    /// Square matrix whose j-th column is `cols[j]`.
    pub fn from_columns(field: &Field, cols: &[Vec<Elem>]) -> Matrix {
        Matrix::from_fn(field, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Elem {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<Elem>> {
        self.data.chunks(self.n.max(1)).take(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<Elem> {
        (0..self.n).map(|i| self.get(i, j).clone()).collect()
    }

    fn check_order(&self, other: &Matrix) -> Result<(), MatrixError> {
        if self.n != other.n {
            return Err(MatrixError::OrderMismatch(self.n, other.n));
        }
        if self.field != other.field {
            return Err(FieldError::CtxMismatch(self.field.descriptor(), other.field.descriptor()).into());
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        self.check_order(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Matrix { field: self.field.clone(), n: self.n, data })
    }

    pub fn try_mul(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        self.check_order(other)?;
        let n = self.n;
        let mut out = Matrix::zero(&self.field, n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * n + j;
                        out.data[idx] = &out.data[idx] + &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Panics on order or field mismatch; see [`Matrix::try_add`].
    pub fn add(&self, other: &Matrix) -> Matrix {
        self.try_add(other).unwrap_or_else(|e| panic!("matrix add: {e}"))
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.neg())
    }

    /// Panics on order or field mismatch; see [`Matrix::try_mul`].
    pub fn mul(&self, other: &Matrix) -> Matrix {
        self.try_mul(other).unwrap_or_else(|e| panic!("matrix mul: {e}"))
    }

    pub fn neg(&self) -> Matrix {
        self.map(|x| -x)
    }

    pub fn scale(&self, c: &Elem) -> Matrix {
        self.map(|x| x * c)
    }

    fn map(&self, f: impl Fn(&Elem) -> Elem) -> Matrix {
        Matrix { field: self.field.clone(), n: self.n, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(&self.field, self.n, |i, j| self.get(j, i).clone())
    }

    pub fn trace(&self) -> Elem {
        (0..self.n).fold(self.field.zero(), |acc, i| &acc + self.get(i, i))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Elem::is_zero)
    }

    /// XY - YX
    pub fn commutator(&self, other: &Matrix) -> Matrix {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn mul_vec(&self, v: &[Elem]) -> Vec<Elem> {
        (0..self.n)
            .map(|i| (0..self.n).fold(self.field.zero(), |acc, j| &acc + &(self.get(i, j) * &v[j])))
            .collect()
    }

    pub fn inverse(&self) -> Result<Matrix, MatrixError> {
        let n = self.n;
        let mut a = self.rows();
        let mut inv = Matrix::identity(&self.field, n).rows();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r][col].is_zero()).ok_or(MatrixError::Singular)?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let pinv = a[col][col].inverse()?;
            for j in 0..n {
                a[col][j] = &a[col][j] * &pinv;
                inv[col][j] = &inv[col][j] * &pinv;
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let factor = a[r][col].clone();
                for j in 0..n {
                    let t = &factor * &a[col][j];
                    a[r][j] = &a[r][j] - &t;
                    let t = &factor * &inv[col][j];
                    inv[r][j] = &inv[r][j] - &t;
                }
            }
        }
        Matrix::from_rows(&self.field, inv)
    }

    pub fn rank(&self) -> usize {
        rank_of_rows(self.rows())
    }

    /// First column that is not identically zero.
    pub fn first_nonzero_column(&self) -> Option<Vec<Elem>> {
        (0..self.n).map(|j| self.column(j)).find(|c| c.iter().any(|x| !x.is_zero()))
    }

    pub fn pow(&self, e: usize) -> Matrix {
        (0..e).fold(Matrix::identity(&self.field, self.n), |acc, _| acc.mul(self))
    }

    pub fn pattern(&self) -> Pattern {
        let n = self.n;
        let nz = |i: usize, j: usize| !self.get(i, j).is_zero();
        let mut p = Pattern {
            diagonal: true,
            lower_bidiagonal: true,
            upper_bidiagonal: true,
            tridiagonal: true,
            irreducible_tridiagonal: true,
        };
        for i in 0..n {
            for j in 0..n {
                if !nz(i, j) {
                    continue;
                }
                let (lo, up) = (i > j, j > i);
                if i != j {
                    p.diagonal = false;
                }
                if up || i > j + 1 {
                    p.lower_bidiagonal = false;
                }
                if lo || j > i + 1 {
                    p.upper_bidiagonal = false;
                }
                if i > j + 1 || j > i + 1 {
                    p.tridiagonal = false;
                }
            }
        }
        p.irreducible_tridiagonal =
            p.tridiagonal && (1..n).all(|i| nz(i, i - 1) && nz(i - 1, i));
        p
    }
}

/// Zero-pattern classification of a square matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pattern {
    pub diagonal: bool,
    pub lower_bidiagonal: bool,
    pub upper_bidiagonal: bool,
    pub tridiagonal: bool,
    /// Tridiagonal with every sub- and superdiagonal entry nonzero.
    pub irreducible_tridiagonal: bool,
}

/// Rank of an arbitrary list of equal-length rows.
pub fn rank_of_rows(mut a: Vec<Vec<Elem>>) -> usize {
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, pivot);
        let pinv = a[rank][col].inverse().expect("pivot is nonzero");
        for r in rank + 1..a.len() {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] * &pinv;
            for j in col..cols {
                let t = &factor * &a[rank][j];
                a[r][j] = &a[r][j] - &t;
            }
        }
        rank += 1;
    }
    rank
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix over {} [", self.field)?;
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|e| e.to_string()).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

/// The primitive idempotents of `m` for the ordered eigenvalue list `eigs`:
/// E_i = prod_{j != i} (m - eigs_j I)/(eigs_i - eigs_j).
///
/// The result is verified: m E_i = eigs_i E_i, E_i E_j = delta_ij E_i,
/// sum E_i = I and every E_i has rank one.
pub fn primitive_idempotents(m: &Matrix, eigs: &[Elem]) -> Result<Vec<Matrix>, MatrixError> {
    let n = m.order();
    let f = m.field();
    for (i, a) in eigs.iter().enumerate() {
        if eigs[..i].contains(a) {
            return Err(MatrixError::RepeatedEigenvalue(a.to_string()));
        }
    }
    if eigs.len() != n {
        return Err(MatrixError::NotAnEigenvalue(format!(
            "{} eigenvalues given for a matrix of order {n}",
            eigs.len()
        )));
    }
    let shifted: Vec<Matrix> = eigs
        .iter()
        .map(|t| m.sub(&Matrix::identity(f, n).scale(t)))
        .collect();
    let mut idem = Vec::with_capacity(n);
    for i in 0..n {
        let mut e = Matrix::identity(f, n);
        let mut denom = f.one();
        for j in (0..n).filter(|&j| j != i) {
            e = e.mul(&shifted[j]);
            denom = &denom * &(&eigs[i] - &eigs[j]);
        }
        idem.push(e.scale(&denom.inverse()?));
    }
    let id = Matrix::identity(f, n);
    let sum = idem.iter().fold(Matrix::zero(f, n), |acc, e| acc.add(e));
    if sum != id {
        return Err(MatrixError::NotAnEigenvalue("idempotents do not sum to I".into()));
    }
    for (i, e) in idem.iter().enumerate() {
        if m.mul(e) != e.scale(&eigs[i]) {
            return Err(MatrixError::NotAnEigenvalue(format!("m E_{i} != {} E_{i}", eigs[i])));
        }
        if e.rank() != 1 {
            return Err(MatrixError::NotAnEigenvalue(format!("E_{i} does not have rank 1")));
        }
        for (j, g) in idem.iter().enumerate() {
            let prod = e.mul(g);
            let ok = if i == j { prod == *e } else { prod.is_zero() };
            if !ok {
                return Err(MatrixError::NotAnEigenvalue(format!("E_{i} E_{j} is wrong")));
            }
        }
    }
    Ok(idem)
}

/// The characteristic-style product prod_i (m - eigs_i I); zero exactly when
/// every eigenvalue of a diagonalisable m is listed.
pub fn annihilator(m: &Matrix, eigs: &[Elem]) -> Matrix {
    DensePoly::from_roots(m.field(), eigs).eval_matrix(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::rationals()
    }

    fn mat(f: &Field, rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(f, rows.iter().map(|r| r.iter().map(|&v| f.from_i64(v)).collect()).collect())
            .unwrap()
    }

    #[test]
    fn inverse_round_trip() {
        let f = q();
        let m = mat(&f, &[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(&f, 3));
        assert_eq!(mat(&f, &[&[1, 2], &[2, 4]]).inverse(), Err(MatrixError::Singular));
    }

    #[test]
    fn idempotents_of_a_diagonalisable_matrix() {
        let f = q();
        // lower bidiagonal, eigenvalues 0,1,2
        let m = mat(&f, &[&[0, 0, 0], &[1, 1, 0], &[0, 1, 2]]);
        let eigs: Vec<Elem> = (0..3).map(|v| f.from_i64(v)).collect();
        let e = primitive_idempotents(&m, &eigs).unwrap();
        assert_eq!(e.len(), 3);
        assert!(annihilator(&m, &eigs).is_zero());
    }

    #[test]
    fn idempotent_errors() {
        let f = q();
        let m = mat(&f, &[&[0, 0], &[1, 1]]);
        let rep = vec![f.one(), f.one()];
        assert!(matches!(primitive_idempotents(&m, &rep), Err(MatrixError::RepeatedEigenvalue(_))));
        let wrong = vec![f.zero(), f.from_i64(2)];
        assert!(matches!(primitive_idempotents(&m, &wrong), Err(MatrixError::NotAnEigenvalue(_))));
    }

    #[test]
    fn patterns() {
        let f = q();
        let lower = mat(&f, &[&[1, 0, 0], &[1, 2, 0], &[0, 1, 3]]);
        let p = lower.pattern();
        assert!(p.lower_bidiagonal && p.tridiagonal && !p.upper_bidiagonal && !p.irreducible_tridiagonal);
        let tri = mat(&f, &[&[1, 2, 0], &[1, 2, 5], &[0, 1, 3]]);
        assert!(tri.pattern().irreducible_tridiagonal);
        assert!(Matrix::identity(&f, 3).pattern().diagonal);
    }

    #[test]
    fn rank_counts_independent_rows() {
        let f = Field::prime(5).unwrap();
        let m = mat(&f, &[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        assert_eq!(m.rank(), 2);
    }
}
