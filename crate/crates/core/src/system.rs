//! Concrete Leonard systems: matrices A, A* with ordered primitive
//! idempotents, and the checks and derived data that can be read off them.

use crate::field::{Elem, Field};
use crate::matrix::{primitive_idempotents, rank_of_rows, Matrix, MatrixError};
use crate::parray::{vartheta_of, Gen, ParameterArray, ParrayError, ValidationReport};
use crate::recurrence::{self, p_eval, Beta};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SystemError {
    #[error("parameter array is invalid: {}", summarize(.0))]
    InvalidParameterArray(ValidationReport),
    #[error("not a pre Leonard system: {0}")]
    NotPreLeonard(String),
    #[error("not a Leonard system: {0}")]
    NotLeonard(String),
    #[error("unexpected zero pattern: {0}")]
    PatternViolation(String),
    #[error("cross-check failed: {0}")]
    CrossCheckFailed(String),
    #[error("tridiagonal relation does not vanish: {0}")]
    TdNonzero(String),
    #[error("{0}")]
    Precondition(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Parray(#[from] ParrayError),
}

fn summarize(r: &ValidationReport) -> String {
    let v: Vec<String> = r.violations.iter().map(|v| v.to_string()).collect();
    v.join("; ")
}

type Result<T> = std::result::Result<T, SystemError>;

/// A, A* on F^{d+1} together with orderings of their primitive idempotents
/// and the matching eigenvalue sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Realization {
    pub field: Field,
    pub a: Matrix,
    pub a_star: Matrix,
    pub e: Vec<Matrix>,
    pub e_star: Vec<Matrix>,
    pub theta: Vec<Elem>,
    pub theta_star: Vec<Elem>,
}

/// Lower bidiagonal with the given diagonal and 1 below it.
pub fn lower_split(field: &Field, diag: &[Elem]) -> Matrix {
    Matrix::from_fn(field, diag.len(), |i, j| {
        if i == j {
            diag[i].clone()
        } else if i == j + 1 {
            field.one()
        } else {
            field.zero()
        }
    })
}

/// Upper bidiagonal with the given diagonal and `sup[i-1]` at (i-1, i).
pub fn upper_split(field: &Field, diag: &[Elem], sup: &[Elem]) -> Matrix {
    Matrix::from_fn(field, diag.len(), |i, j| {
        if i == j {
            diag[i].clone()
        } else if j == i + 1 {
            sup[i].clone()
        } else {
            field.zero()
        }
    })
}

/// The split realisation of a valid parameter array.
pub fn build_split(pa: &ParameterArray) -> Result<Realization> {
    let report = pa.validate()?;
    if !report.is_valid() {
        return Err(SystemError::InvalidParameterArray(report));
    }
    let a = lower_split(&pa.field, &pa.theta);
    let a_star = upper_split(&pa.field, &pa.theta_star, &pa.varphi);
    Realization::from_pair(a, a_star, pa.theta.clone(), pa.theta_star.clone())
}

impl Realization {
    /// Computes the idempotents for the given eigenvalue orderings.
    pub fn from_pair(a: Matrix, a_star: Matrix, theta: Vec<Elem>, theta_star: Vec<Elem>) -> Result<Realization> {
        let e = primitive_idempotents(&a, &theta).map_err(|e| SystemError::NotPreLeonard(format!("A: {e}")))?;
        let e_star =
            primitive_idempotents(&a_star, &theta_star).map_err(|e| SystemError::NotPreLeonard(format!("A*: {e}")))?;
        Ok(Realization { field: a.field().clone(), a, a_star, e, e_star, theta, theta_star })
    }

    /// Accepts explicit idempotents, reading the eigenvalues off as
    /// tr(A E_i) and checking the idempotent axioms.
    pub fn from_parts(a: Matrix, a_star: Matrix, e: Vec<Matrix>, e_star: Vec<Matrix>) -> Result<Realization> {
        let theta: Vec<Elem> = e.iter().map(|x| a.mul(x).trace()).collect();
        let theta_star: Vec<Elem> = e_star.iter().map(|x| a_star.mul(x).trace()).collect();
        let real = Realization::from_pair(a, a_star, theta, theta_star)?;
        if real.e != e || real.e_star != e_star {
            return Err(SystemError::NotPreLeonard(
                "given idempotents differ from those of the listed eigenvalues".into(),
            ));
        }
        Ok(real)
    }

    pub fn d(&self) -> usize {
        self.theta.len() - 1
    }

    /// Applies one generator: reorder E, reorder E*, or swap the two halves.
    pub fn relative(&self, g: Gen) -> Realization {
        let mut r = self.clone();
        match g {
            Gen::DoubleDown => {
                r.e.reverse();
                r.theta.reverse();
            }
            Gen::Down => {
                r.e_star.reverse();
                r.theta_star.reverse();
            }
            Gen::Star => {
                std::mem::swap(&mut r.a, &mut r.a_star);
                std::mem::swap(&mut r.e, &mut r.e_star);
                std::mem::swap(&mut r.theta, &mut r.theta_star);
            }
        }
        r
    }

    pub fn transform(&self, word: &crate::parray::D4Word) -> Realization {
        word.0.iter().fold(self.clone(), |r, &g| r.relative(g))
    }

    /// Conjugates everything by an invertible S: X -> S^{-1} X S.
    pub fn conjugate(&self, s: &Matrix) -> Result<Realization> {
        let inv = s.inverse()?;
        let c = |x: &Matrix| inv.mul(x).mul(s);
        Ok(Realization {
            field: self.field.clone(),
            a: c(&self.a),
            a_star: c(&self.a_star),
            e: self.e.iter().map(c).collect(),
            e_star: self.e_star.iter().map(c).collect(),
            theta: self.theta.clone(),
            theta_star: self.theta_star.clone(),
        })
    }
}

/// Outcome of checking the Leonard system axioms directly.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LeonardReport {
    pub failures: Vec<String>,
}

impl LeonardReport {
    pub fn is_leonard(&self) -> bool {
        self.failures.is_empty()
    }
}

fn idempotent_failures(name: &str, m: &Matrix, eigs: &[Elem], idem: &[Matrix]) -> Vec<String> {
    let mut out = Vec::new();
    let f = m.field();
    let n = m.order();
    if idem.len() != n || eigs.len() != n {
        out.push(format!("{name}: expected {n} idempotents"));
        return out;
    }
    for j in 0..n {
        for i in 0..j {
            if eigs[i] == eigs[j] {
                out.push(format!("{name} is not multiplicity-free: eigenvalues {i} and {j} coincide"));
            }
        }
    }
    let sum = idem.iter().fold(Matrix::zero(f, n), |acc, e| acc.add(e));
    if sum != Matrix::identity(f, n) {
        out.push(format!("{name}: idempotents do not sum to I"));
    }
    for (i, e) in idem.iter().enumerate() {
        let me = m.mul(e);
        if me != e.scale(&eigs[i]) || me != e.mul(m) {
            out.push(format!("{name}: E_{i} is not the idempotent for eigenvalue {}", eigs[i]));
        }
        if e.rank() != 1 {
            out.push(format!("{name}: E_{i} does not have rank 1"));
        }
        for (j, g) in idem.iter().enumerate() {
            let p = e.mul(g);
            if (i == j && p != *e) || (i != j && !p.is_zero()) {
                out.push(format!("{name}: E_{i} E_{j} is wrong"));
            }
        }
    }
    out
}

/// The four one-sided tridiagonality conditions: E*_i A E*_j below and above
/// the diagonal, then E_i A* E_j below and above.
pub fn four_conditions(real: &Realization) -> [bool; 4] {
    let (lo, up) = sandwich_sides(&real.e_star, &real.a);
    let (lo2, up2) = sandwich_sides(&real.e, &real.a_star);
    [lo, up, lo2, up2]
}

/// For idempotents F_i and X: whether F_i X F_j is 0 for i - j > 1 and
/// nonzero for i - j = 1, and the same for j - i.
fn sandwich_sides(f: &[Matrix], x: &Matrix) -> (bool, bool) {
    let n = f.len();
    let right: Vec<Matrix> = f.iter().map(|fj| x.mul(fj)).collect();
    let (mut lower, mut upper) = (true, true);
    for i in 0..n {
        for j in 0..n {
            if i.abs_diff(j) == 0 {
                continue;
            }
            let z = f[i].mul(&right[j]).is_zero();
            let ok = if i.abs_diff(j) > 1 { z } else { !z };
            if !ok {
                if i > j {
                    lower = false;
                } else {
                    upper = false;
                }
            }
        }
    }
    (lower, upper)
}

/// Checks every Leonard system axiom by direct matrix computation.
pub fn verify_leonard(real: &Realization) -> LeonardReport {
    let mut failures = idempotent_failures("A", &real.a, &real.theta, &real.e);
    failures.extend(idempotent_failures("A*", &real.a_star, &real.theta_star, &real.e_star));
    let names = ["E*_i A E*_j below", "E*_i A E*_j above", "E_i A* E_j below", "E_i A* E_j above"];
    for (ok, name) in four_conditions(real).iter().zip(names) {
        if !ok {
            failures.push(format!("{name} the diagonal has the wrong zero pattern"));
        }
    }
    LeonardReport { failures }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalData {
    pub a: Vec<Elem>,
    pub a_star: Vec<Elem>,
}

/// a_i = tr(A E*_i), a*_i = tr(A* E_i), with E*_i A E*_i = a_i E*_i checked.
pub fn diagonal_sequences(real: &Realization) -> Result<DiagonalData> {
    let mut a = Vec::new();
    for (i, es) in real.e_star.iter().enumerate() {
        let v = real.a.mul(es).trace();
        if es.mul(&real.a).mul(es) != es.scale(&v) {
            return Err(SystemError::CrossCheckFailed(format!("E*_{i} A E*_{i} != a_{i} E*_{i}")));
        }
        a.push(v);
    }
    let mut a_star = Vec::new();
    for (i, e) in real.e.iter().enumerate() {
        let v = real.a_star.mul(e).trace();
        if e.mul(&real.a_star).mul(e) != e.scale(&v) {
            return Err(SystemError::CrossCheckFailed(format!("E_{i} A* E_{i} != a*_{i} E_{i}")));
        }
        a_star.push(v);
    }
    Ok(DiagonalData { a, a_star })
}

/// One side of a_i = s_i + x_i/(t_i - t_{i-1}) + x_{i+1}/(t_i - t_{i+1}),
/// where the x-terms are dropped past either end.
fn diag_formula(base: &[Elem], t: &[Elem], x: impl Fn(usize) -> Elem) -> Result<Vec<Elem>> {
    let d = t.len() - 1;
    let mut out = Vec::with_capacity(d + 1);
    for i in 0..=d {
        let mut v = base[i].clone();
        if i >= 1 {
            v = &v + &x(i).try_div(&(&t[i] - &t[i - 1])).map_err(|e| SystemError::Precondition(e.to_string()))?;
        }
        if i < d {
            v = &v + &x(i + 1).try_div(&(&t[i] - &t[i + 1])).map_err(|e| SystemError::Precondition(e.to_string()))?;
        }
        out.push(v);
    }
    Ok(out)
}

/// Diagonal sequences from theta, theta*, varphi.
pub fn diagonal_from_varphi(pa: &ParameterArray) -> Result<DiagonalData> {
    let vp = |i: usize| pa.varphi(i).clone();
    Ok(DiagonalData {
        a: diag_formula(&pa.theta, &pa.theta_star, vp)?,
        a_star: diag_formula(&pa.theta_star, &pa.theta, vp)?,
    })
}

/// Diagonal sequences from theta, theta*, phi.
pub fn diagonal_from_phi(pa: &ParameterArray) -> Result<DiagonalData> {
    let d = pa.d();
    let rev_t: Vec<Elem> = pa.theta.iter().rev().cloned().collect();
    let rev_ts: Vec<Elem> = pa.theta_star.iter().rev().cloned().collect();
    Ok(DiagonalData {
        a: diag_formula(&rev_t, &pa.theta_star, |i| pa.phi(i).clone())?,
        a_star: diag_formula(&rev_ts, &pa.theta, |i| pa.phi(d - i + 1).clone())?,
    })
}

/// Compares the traced diagonal sequences with both closed forms and checks
/// the four sum expressions for each varphi_i and phi_i.
pub fn cross_check_diagonal(real: &Realization, pa: &ParameterArray) -> Result<DiagonalData> {
    let direct = diagonal_sequences(real)?;
    if direct != diagonal_from_varphi(pa)? {
        return Err(SystemError::CrossCheckFailed("diagonal sequences disagree with the varphi form".into()));
    }
    if direct != diagonal_from_phi(pa)? {
        return Err(SystemError::CrossCheckFailed("diagonal sequences disagree with the phi form".into()));
    }
    let bad = split_sum_failures(pa, &direct);
    if let Some(first) = bad.first() {
        return Err(SystemError::CrossCheckFailed(first.clone()));
    }
    Ok(direct)
}

/// Each varphi_i and phi_i equals four partial-sum expressions in the
/// diagonal sequences; returns the ones that fail.
pub fn split_sum_failures(pa: &ParameterArray, diag: &DiagonalData) -> Vec<String> {
    let d = pa.d();
    let (t, ts, a, as_) = (&pa.theta, &pa.theta_star, &diag.a, &diag.a_star);
    let f = &pa.field;
    let sum = |range: std::ops::RangeInclusive<usize>, g: &dyn Fn(usize) -> Elem| {
        range.fold(f.zero(), |acc, h| &acc + &g(h))
    };
    let mut out = Vec::new();
    for i in 1..=d {
        let vp = [
            &(&ts[i] - &ts[i - 1]) * &sum(0..=i - 1, &|h| &t[h] - &a[h]),
            &(&ts[i - 1] - &ts[i]) * &sum(i..=d, &|h| &t[h] - &a[h]),
            &(&t[i] - &t[i - 1]) * &sum(0..=i - 1, &|h| &ts[h] - &as_[h]),
            &(&t[i - 1] - &t[i]) * &sum(i..=d, &|h| &ts[h] - &as_[h]),
        ];
        for (k, v) in vp.iter().enumerate() {
            if v != pa.varphi(i) {
                out.push(format!("varphi_{i} expression {} = {v}, expected {}", k + 1, pa.varphi(i)));
            }
        }
        let ph = [
            &(&ts[i] - &ts[i - 1]) * &sum(0..=i - 1, &|h| &t[d - h] - &a[h]),
            &(&ts[i - 1] - &ts[i]) * &sum(i..=d, &|h| &t[d - h] - &a[h]),
            &(&t[d - i] - &t[d - i + 1]) * &sum(0..=i - 1, &|h| &ts[h] - &as_[d - h]),
            &(&t[d - i + 1] - &t[d - i]) * &sum(i..=d, &|h| &ts[h] - &as_[d - h]),
        ];
        for (k, v) in ph.iter().enumerate() {
            if v != pa.phi(i) {
                out.push(format!("phi_{i} expression {} = {v}, expected {}", k + 1, pa.phi(i)));
            }
        }
    }
    out
}

/// Which primitive idempotent is tested for being normalising.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    /// E*_0: normalising when E_i E*_0 != 0 for every i.
    EStar0,
    /// E_0: normalising when E*_i E_0 != 0 for every i.
    E0,
}

pub fn is_normalizing(real: &Realization, which: Which) -> bool {
    match which {
        Which::EStar0 => real.e.iter().all(|e| !e.mul(&real.e_star[0]).is_zero()),
        Which::E0 => real.e_star.iter().all(|e| !e.mul(&real.e[0]).is_zero()),
    }
}

/// The dimension criterion: {X^i F_0} linearly independent, where X, F_0 are
/// A, E*_0 (or A*, E_0).
pub fn normalizing_by_rank(real: &Realization, which: Which) -> bool {
    let (x, f0) = match which {
        Which::EStar0 => (&real.a, &real.e_star[0]),
        Which::E0 => (&real.a_star, &real.e[0]),
    };
    let d = real.d();
    let mut rows = Vec::with_capacity(d + 1);
    let mut cur = f0.clone();
    for _ in 0..=d {
        rows.push(cur.rows().concat());
        cur = x.mul(&cur);
    }
    rank_of_rows(rows) == d + 1
}

/// Whether {A^i E*_0 A^j : 0 <= i, j <= d} spans all (d+1)x(d+1) matrices.
pub fn a_idempotent_a_spans(real: &Realization) -> bool {
    let d = real.d();
    let pows: Vec<Matrix> = (0..=d).map(|i| real.a.pow(i)).collect();
    let mut rows = Vec::new();
    for pi in &pows {
        let left = pi.mul(&real.e_star[0]);
        for pj in &pows {
            rows.push(left.mul(pj).rows().concat());
        }
    }
    rank_of_rows(rows) == (d + 1) * (d + 1)
}

/// The diagonal K making X -> K^{-1} X^t K (in an E*-eigenbasis) the
/// antiautomorphism that fixes A and A*.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DaggerConjugator {
    /// Columns are nonzero vectors v_i in E*_i V.
    pub basis: Matrix,
    /// A in that basis; irreducible tridiagonal.
    pub b: Matrix,
    pub k: Matrix,
    basis_inv: Matrix,
    k_inv: Matrix,
}

pub fn dagger_conjugator(real: &Realization) -> Result<DaggerConjugator> {
    let f = &real.field;
    let cols: Vec<Vec<Elem>> = real
        .e_star
        .iter()
        .map(|e| e.first_nonzero_column().expect("rank-one idempotent has a nonzero column"))
        .collect();
    let basis = Matrix::from_columns(f, &cols);
    let inv = basis.inverse()?;
    let b = inv.mul(&real.a).mul(&basis);
    if !b.pattern().irreducible_tridiagonal {
        return Err(SystemError::PatternViolation("A is not irreducible tridiagonal in an E*-eigenbasis".into()));
    }
    let mut diag = vec![f.one()];
    for i in 1..=real.d() {
        let next = &diag[i - 1] * &(b.get(i - 1, i) / b.get(i, i - 1));
        diag.push(next);
    }
    let k = Matrix::diagonal(f, &diag);
    let k_inv = k.inverse()?;
    Ok(DaggerConjugator { basis, b, k, basis_inv: inv, k_inv })
}

impl DaggerConjugator {
    /// X in the E*-eigenbasis.
    pub fn to_flat(&self, x: &Matrix) -> Matrix {
        self.basis_inv.mul(x).mul(&self.basis)
    }

    /// K^{-1} Y^t K for Y in the E*-eigenbasis; K is diagonal so this is a
    /// scaled transpose.
    pub fn apply_flat(&self, y: &Matrix) -> Matrix {
        Matrix::from_fn(y.field(), y.order(), |i, j| &(y.get(j, i) * self.k.get(j, j)) * self.k_inv.get(i, i))
    }

    /// The image of X under the antiautomorphism, in the original coordinates.
    pub fn apply(&self, x: &Matrix) -> Matrix {
        self.basis.mul(&self.apply_flat(&self.to_flat(x))).mul(&self.basis_inv)
    }

    /// Checks the fixed points and antiautomorphism identities in the
    /// E*-eigenbasis; returns the ones that fail.
    pub fn failures(&self, real: &Realization) -> Vec<String> {
        let mut out = Vec::new();
        if self.k_inv.mul(&self.b.transpose()).mul(&self.k) != self.b {
            out.push("K^-1 B^t K != B".into());
        }
        let a = self.to_flat(&real.a);
        let a_star = self.to_flat(&real.a_star);
        for (name, x) in [("A", &a), ("A*", &a_star)] {
            if self.apply_flat(x) != *x {
                out.push(format!("{name} is not fixed"));
            }
        }
        for (i, e) in real.e.iter().enumerate() {
            let y = self.to_flat(e);
            if self.apply_flat(&y) != y {
                out.push(format!("E_{i} is not fixed"));
            }
        }
        for (i, e) in real.e_star.iter().enumerate() {
            let y = self.to_flat(e);
            if self.apply_flat(&y) != y {
                out.push(format!("E*_{i} is not fixed"));
            }
        }
        let aas = a.mul(&a_star);
        let image = self.apply_flat(&aas);
        if image != a_star.mul(&a) {
            out.push("(A A*)^dagger != A* A".into());
        }
        if self.apply_flat(&image) != aas {
            out.push("dagger is not an involution on A A*".into());
        }
        out
    }
}

/// The split sequence read off the basis tau_i(A) xi (or eta_i(A) xi when
/// `reversed`), with 0 != xi in E*_0 V. Fails unless A and A* take the split
/// bidiagonal forms in that basis with a nonzero superdiagonal.
pub fn split_sequence(real: &Realization, reversed: bool) -> Result<Vec<Elem>> {
    let f = &real.field;
    let d = real.d();
    let order: Vec<Elem> = if reversed { real.theta.iter().rev().cloned().collect() } else { real.theta.clone() };
    let xi = real.e_star[0].first_nonzero_column().expect("rank-one idempotent");
    let mut cols = vec![xi];
    for i in 0..d {
        let shifted = real.a.sub(&Matrix::identity(f, d + 1).scale(&order[i]));
        let next = shifted.mul_vec(&cols[i]);
        cols.push(next);
    }
    let u = Matrix::from_columns(f, &cols);
    let which = if reversed { "second" } else { "first" };
    let inv = u.inverse().map_err(|_| SystemError::NotLeonard(format!("{which} split basis is degenerate")))?;
    if inv.mul(&real.a).mul(&u) != lower_split(f, &order) {
        return Err(SystemError::NotLeonard(format!("A is not lower split in the {which} split basis")));
    }
    let s = inv.mul(&real.a_star).mul(&u);
    let sup: Vec<Elem> = (1..=d).map(|i| s.get(i - 1, i).clone()).collect();
    if s != upper_split(f, &real.theta_star, &sup) {
        return Err(SystemError::NotLeonard(format!("A* is not upper split in the {which} split basis")));
    }
    if let Some(i) = sup.iter().position(Elem::is_zero) {
        return Err(SystemError::NotLeonard(format!("{which} split sequence vanishes at {}", i + 1)));
    }
    Ok(sup)
}

/// Recovers the parameter array. Succeeding here is exactly the split-form
/// characterisation of a Leonard system among pre Leonard systems.
pub fn extract_parray(real: &Realization) -> Result<ParameterArray> {
    let varphi = split_sequence(real, false)?;
    let phi = split_sequence(real, true)?;
    Ok(ParameterArray::new(&real.field, real.theta.clone(), real.theta_star.clone(), varphi, phi)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TdCoefficients {
    pub beta: Elem,
    pub gamma: Elem,
    pub gamma_star: Elem,
    pub varrho: Elem,
    pub varrho_star: Elem,
}

/// [X, X^2 Y - beta X Y X + Y X^2 - gamma (X Y + Y X) - varrho Y]
pub fn td_commutator(x: &Matrix, y: &Matrix, beta: &Elem, gamma: &Elem, varrho: &Elem) -> Matrix {
    let xy = x.mul(y);
    let yx = y.mul(x);
    let inner = x
        .mul(&xy)
        .sub(&xy.mul(x).scale(beta))
        .add(&yx.mul(x))
        .sub(&xy.add(&yx).scale(gamma))
        .sub(&y.scale(varrho));
    x.commutator(&inner)
}

/// gamma and varrho for an eigenvalue sequence once beta is fixed; 0 where
/// the sequence is too short to pin them down.
fn gamma_rho(seq: &[Elem], beta: &Elem) -> (Elem, Elem) {
    let f = seq[0].field();
    let d = seq.len() - 1;
    let gamma = if d >= 2 { &(&seq[0] - &(beta * &seq[1])) + &seq[2] } else { f.zero() };
    let varrho = if d >= 1 { p_eval(beta, &gamma, &f.zero(), &seq[0], &seq[1]) } else { f.zero() };
    (gamma, varrho)
}

/// Coefficients of both tridiagonal relations, verified to make them vanish.
/// For d = 0 all five are 0; for d = 1, 2 beta is taken to be 2.
pub fn td_coefficients(real: &Realization) -> Result<TdCoefficients> {
    let f = &real.field;
    let d = real.d();
    let beta = if d == 0 {
        f.zero()
    } else {
        match recurrence::detect_beta(&real.theta) {
            Ok(c) => match c.beta {
                Beta::Value(b) => b,
                Beta::Unconstrained => f.from_i64(2),
            },
            Err(e) => return Err(SystemError::NotLeonard(format!("eigenvalues not recurrent: {e}"))),
        }
    };
    let (gamma, varrho) = gamma_rho(&real.theta, &beta);
    let (gamma_star, varrho_star) = gamma_rho(&real.theta_star, &beta);
    let td = TdCoefficients { beta, gamma, gamma_star, varrho, varrho_star };
    if !td1(real, &td).is_zero() {
        return Err(SystemError::TdNonzero("first relation".into()));
    }
    if !td2(real, &td).is_zero() {
        return Err(SystemError::TdNonzero("second relation".into()));
    }
    Ok(td)
}

pub fn td1(real: &Realization, c: &TdCoefficients) -> Matrix {
    td_commutator(&real.a, &real.a_star, &c.beta, &c.gamma, &c.varrho)
}

pub fn td2(real: &Realization, c: &TdCoefficients) -> Matrix {
    td_commutator(&real.a_star, &real.a, &c.beta, &c.gamma_star, &c.varrho_star)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WrapAround {
    pub holds: bool,
    pub dual_holds: bool,
}

/// Both wrap-around identities (d >= 2), with vt built from the first split
/// sequence of `real`.
pub fn wraparound_check(real: &Realization) -> Result<WrapAround> {
    let d = real.d();
    if d < 2 {
        return Err(SystemError::Precondition("wrap-around needs d >= 2".into()));
    }
    let varphi = split_sequence(real, false)?;
    let pa = ParameterArray {
        field: real.field.clone(),
        theta: real.theta.clone(),
        theta_star: real.theta_star.clone(),
        varphi,
        phi: vec![real.field.one(); d],
    };
    let vt = vartheta_of(&pa);
    let coef = &vt[1] - &vt[d];
    let (t, ts) = (&real.theta, &real.theta_star);
    let n = d + 1;
    let f = &real.field;

    let left_start = real.e[d].mul(&real.a_star);
    let lhs = (0..=d - 2).fold(Matrix::zero(f, n), |acc, i| {
        acc.add(&left_start.mul(&real.e[i]).mul(&real.e_star[0]).scale(&(&t[i] - &t[d - 1])))
    });
    let rhs = real.e[d].mul(&real.e_star[0]).scale(&coef);

    let dual_start = real.e_star[0].mul(&real.a);
    let lhs2 = (2..=d).fold(Matrix::zero(f, n), |acc, i| {
        acc.add(&dual_start.mul(&real.e_star[i]).mul(&real.e[d]).scale(&(&ts[1] - &ts[i])))
    });
    let rhs2 = real.e_star[0].mul(&real.e[d]).scale(&coef);
    Ok(WrapAround { holds: lhs == rhs, dual_holds: lhs2 == rhs2 })
}

/// Entry-by-entry formula for the first tridiagonal commutator of the split
/// matrices built from (theta, theta*, varphi), for arbitrary beta, gamma,
/// varrho. Returns the positions where the formula and the product disagree.
pub fn commutator_entry_oracle(
    theta: &[Elem],
    theta_star: &[Elem],
    varphi: &[Elem],
    beta: &Elem,
    gamma: &Elem,
    varrho: &Elem,
) -> Vec<(usize, usize)> {
    let f = theta[0].field().clone();
    let d = theta.len() - 1;
    let a = lower_split(&f, theta);
    let a_star = upper_split(&f, theta_star, varphi);
    let direct = td_commutator(&a, &a_star, beta, gamma, varrho);
    let expected = commutator_entry_formula(theta, theta_star, varphi, beta, gamma, varrho);
    let mut bad = Vec::new();
    for i in 0..=d {
        for j in 0..=d {
            if direct.get(i, j) != expected.get(i, j) {
                bad.push((i, j));
            }
        }
    }
    bad
}

/// The matrix predicted by the entry formulas. Out-of-range theta and theta*
/// only ever appear multiplied by a vanishing coefficient; such terms are
/// dropped.
pub fn commutator_entry_formula(
    theta: &[Elem],
    theta_star: &[Elem],
    varphi: &[Elem],
    beta: &Elem,
    gamma: &Elem,
    varrho: &Elem,
) -> Matrix {
    let f = theta[0].field().clone();
    let d = theta.len() - 1;
    let zero = f.zero();
    let one = f.one();
    let b1 = beta + &one;
    let th = |k: isize| (0..=d as isize).contains(&k).then(|| theta[k as usize].clone());
    let ths = |k: isize| (0..=d as isize).contains(&k).then(|| theta_star[k as usize].clone());
    let t = |k: usize| theta[k].clone();
    let ts = |k: usize| theta_star[k].clone();
    let vp = |k: usize| if k == 0 || k > d { zero.clone() } else { varphi[k - 1].clone() };
    let pa = ParameterArray {
        field: f.clone(),
        theta: theta.to_vec(),
        theta_star: theta_star.to_vec(),
        varphi: varphi.to_vec(),
        phi: vec![one.clone(); d],
    };
    let vt = vartheta_of(&pa);
    // coefficient times a possibly undefined expression
    let term = |coef: Elem, expr: Option<Elem>| -> Elem {
        if coef.is_zero() {
            zero.clone()
        } else {
            &coef * &expr.expect("undefined index with nonzero coefficient")
        }
    };
    let four = |s: &dyn Fn(isize) -> Option<Elem>, i: isize| -> Option<Elem> {
        Some(&(&(&s(i - 2)? - &(&b1 * &s(i - 1)?)) + &(&b1 * &s(i)?)) - &s(i + 1)?)
    };
    let three = |i: isize| -> Option<Elem> { Some(&(&(&th(i - 1)? - &(beta * &th(i)?)) + &th(i + 1)?) - gamma) };
    let pp = |i: isize| -> Option<Elem> { Some(p_eval(beta, gamma, varrho, &th(i - 1)?, &th(i)?)) };

    let mut m = Matrix::zero(&f, d + 1);
    for i in 2..d {
        m.set(i + 1, i - 2, four(&ths, i as isize).expect("in range"));
    }
    for i in 2..=d {
        let ii = i as isize;
        let vt_part = &(&(&vt[i - 2] - &(&b1 * &vt[i - 1])) + &(&b1 * &vt[i])) - &vt[i + 1];
        let v = &(&(&vt_part + &term(&ts(i - 2) - &ts(0), four(&th, ii - 1)))
            + &term(&t(i) - &t(d), four(&ths, ii)))
            + &term(&ts(i - 2) - &ts(i), three(ii - 1));
        m.set(i, i - 2, v);
    }
    for i in 1..=d {
        let ii = i as isize;
        let v = &(&term(vp(i - 1), three(ii - 1)) - &term(vp(i + 1), three(ii)))
            + &term(&ts(i - 1) - &ts(i), pp(ii));
        m.set(i, i - 1, v);
    }
    for i in 0..=d {
        let ii = i as isize;
        let v = &term(vp(i), pp(ii)) - &term(vp(i + 1), pp(ii + 1));
        m.set(i, i, v);
    }
    for i in 1..=d {
        let v = term(&vp(i) * &(&t(i - 1) - &t(i)), pp(i as isize));
        m.set(i - 1, i, v);
    }
    m
}

/// The matrix G with G^{-1} L(theta) G = L(reversed theta) and
/// G^{-1} U(theta*, varphi) G = U(theta*, phi), both verified.
pub fn transition_g(pa: &ParameterArray) -> Result<Matrix> {
    let real = build_split(pa)?;
    let f = &pa.field;
    let d = pa.d();
    let rev: Vec<Elem> = pa.theta.iter().rev().cloned().collect();
    let mut cols = vec![Matrix::identity(f, d + 1).column(0)];
    for i in 0..d {
        let shifted = real.a.sub(&Matrix::identity(f, d + 1).scale(&rev[i]));
        let next = shifted.mul_vec(&cols[i]);
        cols.push(next);
    }
    let g = Matrix::from_columns(f, &cols);
    let gi = g.inverse()?;
    if gi.mul(&real.a).mul(&g) != lower_split(f, &rev) {
        return Err(SystemError::CrossCheckFailed("G does not reverse the lower split form".into()));
    }
    if gi.mul(&real.a_star).mul(&g) != upper_split(f, &pa.theta_star, &pa.phi) {
        return Err(SystemError::CrossCheckFailed("G does not carry varphi to phi".into()));
    }
    Ok(g)
}
