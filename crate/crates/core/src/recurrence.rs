//! Three-term recurrences satisfied by eigenvalue sequences, their closed
//! forms, and the derived sums and products that appear in intersection
//! number formulas.

use crate::field::{Elem, Field, FieldError};
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RecurrenceError {
    #[error("ratio denominator vanishes at i={0}")]
    ZeroDenominator(usize),
    #[error("sequence is not recurrent: ratio at i={0} differs from i=2")]
    NotRecurrent(usize),
    #[error("sequence too short: need d >= {0}")]
    TooShort(usize),
    #[error("fitted value fails at i={0}")]
    InconsistentFit(usize),
    #[error("a root q of q + 1/q = beta is required in this case")]
    MissingQ,
    #[error("q does not satisfy q + 1/q = beta")]
    BadQ,
    #[error("closed form disagrees with the sequence at i={0}")]
    VerificationFailed(usize),
    #[error("terms {0} and {1} coincide")]
    NotDistinct(usize, usize),
    #[error("{0}")]
    Precondition(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

type Result<T> = std::result::Result<T, RecurrenceError>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Beta {
    Value(Elem),
    /// d <= 2: every beta works.
    Unconstrained,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecurrenceClass {
    pub beta: Beta,
    pub gamma: Option<Elem>,
    pub varrho: Option<Elem>,
}

/// Reads beta off the common ratio (s_{i-2} - s_{i+1})/(s_{i-1} - s_i) - 1.
/// Also fills gamma and varrho when beta is determined and d >= 2.
pub fn detect_beta(seq: &[Elem]) -> Result<RecurrenceClass> {
    let d = seq.len() - 1;
    if d < 3 {
        return Ok(RecurrenceClass { beta: Beta::Unconstrained, gamma: None, varrho: None });
    }
    let ratio = |i: usize| -> Result<Elem> {
        (&seq[i - 2] - &seq[i + 1])
            .try_div(&(&seq[i - 1] - &seq[i]))
            .map_err(|_| RecurrenceError::ZeroDenominator(i))
    };
    let r = ratio(2)?;
    for i in 3..d {
        if ratio(i)? != r {
            return Err(RecurrenceError::NotRecurrent(i));
        }
    }
    let beta = &r - &seq[0].field().one();
    let (gamma, varrho) = fit_gamma_rho(seq, &beta)?;
    Ok(RecurrenceClass { beta: Beta::Value(beta), gamma: Some(gamma), varrho: Some(varrho) })
}

/// How much of the recurrence to test.
#[derive(Debug, Clone)]
pub enum Level {
    Beta(Elem),
    BetaGamma(Elem, Elem),
    BetaGammaRho(Elem, Elem, Elem),
}

/// Evaluates the defining identity at every index in its range.
pub fn classify_recurrence(seq: &[Elem], level: &Level) -> bool {
    let d = seq.len() - 1;
    let one = seq[0].field().one();
    match level {
        Level::Beta(beta) => {
            let b1 = beta + &one;
            (2..d).all(|i| {
                (&(&seq[i - 2] - &seq[i + 1]) - &(&b1 * &(&seq[i - 1] - &seq[i]))).is_zero()
            })
        }
        Level::BetaGamma(beta, gamma) => {
            (1..d).all(|i| three_term(seq, beta, i) == *gamma)
        }
        Level::BetaGammaRho(beta, gamma, varrho) => {
            (1..=d).all(|i| p_eval(beta, gamma, &seq[0].field().zero(), &seq[i - 1], &seq[i]) == *varrho)
        }
    }
}

/// s_{i-1} - beta s_i + s_{i+1}
fn three_term(seq: &[Elem], beta: &Elem, i: usize) -> Elem {
    &(&seq[i - 1] - &(beta * &seq[i])) + &seq[i + 1]
}

/// gamma := s_0 - beta s_1 + s_2, checked against every 1 <= i <= d-1.
pub fn fit_gamma(seq: &[Elem], beta: &Elem) -> Result<Elem> {
    let d = seq.len() - 1;
    if d < 2 {
        return Err(RecurrenceError::TooShort(2));
    }
    let gamma = three_term(seq, beta, 1);
    for i in 2..d {
        if three_term(seq, beta, i) != gamma {
            return Err(RecurrenceError::InconsistentFit(i));
        }
    }
    Ok(gamma)
}

/// varrho := P(s_0, s_1) with the given beta, gamma, checked for 1 <= i <= d.
pub fn fit_rho(seq: &[Elem], beta: &Elem, gamma: &Elem) -> Result<Elem> {
    let d = seq.len() - 1;
    if d < 1 {
        return Err(RecurrenceError::TooShort(1));
    }
    let zero = seq[0].field().zero();
    let varrho = p_eval(beta, gamma, &zero, &seq[0], &seq[1]);
    for i in 2..=d {
        if p_eval(beta, gamma, &zero, &seq[i - 1], &seq[i]) != varrho {
            return Err(RecurrenceError::InconsistentFit(i));
        }
    }
    Ok(varrho)
}

pub fn fit_gamma_rho(seq: &[Elem], beta: &Elem) -> Result<(Elem, Elem)> {
    let gamma = fit_gamma(seq, beta)?;
    let varrho = fit_rho(seq, beta, &gamma)?;
    Ok((gamma, varrho))
}

/// P(x, y) = x^2 - beta x y + y^2 - gamma (x + y) - varrho
pub fn p_eval(beta: &Elem, gamma: &Elem, varrho: &Elem, x: &Elem, y: &Elem) -> Elem {
    let quad = &(&x.square() - &(&(beta * x) * y)) + &y.square();
    &(&quad - &(gamma * &(x + y))) - varrho
}

/// Which closed form applies to a beta-recurrent sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClosedFormCase {
    /// beta != 2, -2: a_1 + a_2 q^i + a_3 q^-i with q + 1/q = beta.
    Generic { q: Elem },
    /// beta = 2, char != 2: a_1 + a_2 i + a_3 i(i-1)/2.
    BetaTwo,
    /// beta = -2, char != 2: a_1 + a_2 (-1)^i + a_3 i (-1)^i.
    BetaMinusTwo,
    /// beta = 0 in characteristic 2; the i(i-1)/2 form read mod 2.
    BetaZeroCharTwo,
}

/// Decides the case for beta, checking q when one is needed. `q` may live in
/// an extension of beta's field.
pub fn closed_form_case(beta: &Elem, q: Option<&Elem>) -> Result<ClosedFormCase> {
    let f = beta.field();
    let two = f.from_i64(2);
    if f.characteristic() == 2 && beta.is_zero() {
        return Ok(ClosedFormCase::BetaZeroCharTwo);
    }
    if f.characteristic() != 2 {
        if *beta == two {
            return Ok(ClosedFormCase::BetaTwo);
        }
        if *beta == -&two {
            return Ok(ClosedFormCase::BetaMinusTwo);
        }
    }
    let q = q.ok_or(RecurrenceError::MissingQ)?;
    let b = q.field().embed(beta)?;
    if q.is_zero() || &(q + &q.inverse()?) != &b {
        return Err(RecurrenceError::BadQ);
    }
    Ok(ClosedFormCase::Generic { q: q.clone() })
}

impl ClosedFormCase {
    fn field(&self, fallback: &Field) -> Field {
        match self {
            ClosedFormCase::Generic { q } => q.field().clone(),
            _ => fallback.clone(),
        }
    }

    /// The three basis functions at index i.
    fn basis(&self, f: &Field, i: usize) -> [Elem; 3] {
        let ii = i as i64;
        match self {
            ClosedFormCase::Generic { q } => [
                f.one(),
                q.pow(ii).expect("q is nonzero"),
                q.pow(-ii).expect("q is nonzero"),
            ],
            // In characteristic 2 the integer i(i-1)/2 reduces to 0 for
            // i = 0,1 (mod 4) and 1 for i = 2,3 (mod 4), which is the required
            // reading, so both cases share one embedding.
            ClosedFormCase::BetaTwo | ClosedFormCase::BetaZeroCharTwo => {
                [f.one(), f.from_i64(ii), f.from_i64(ii * (ii - 1) / 2)]
            }
            ClosedFormCase::BetaMinusTwo => {
                let sign = if i % 2 == 0 { 1 } else { -1 };
                [f.one(), f.from_i64(sign), f.from_i64(sign * ii)]
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedFormFit {
    pub case: ClosedFormCase,
    pub alpha: [Elem; 3],
}

impl ClosedFormFit {
    pub fn evaluate(&self, i: usize) -> Elem {
        let f = self.alpha[0].field().clone();
        let basis = self.case.basis(&f, i);
        basis.iter().zip(&self.alpha).fold(f.zero(), |acc, (b, a)| &acc + &(b * a))
    }

    pub fn sequence(&self, d: usize) -> Vec<Elem> {
        (0..=d).map(|i| self.evaluate(i)).collect()
    }
}

/// Solves for the alphas from the first three terms and verifies every term.
/// For d < 2 the trailing alphas are set to zero.
pub fn closed_form_fit(seq: &[Elem], beta: &Elem, q: Option<&Elem>) -> Result<ClosedFormFit> {
    let d = seq.len() - 1;
    let case = closed_form_case(beta, q)?;
    let f = case.field(seq[0].field());
    let seq = embed_all(&f, seq)?;
    let k = (d + 1).min(3);
    let m = Matrix::from_fn(&f, k, |i, j| case.basis(&f, i)[j].clone());
    let inv = m.inverse().map_err(|_| RecurrenceError::Precondition("degenerate basis".into()))?;
    let sol = inv.mul_vec(&seq[..k]);
    let mut alpha = [f.zero(), f.zero(), f.zero()];
    alpha[..k].clone_from_slice(&sol);
    let fit = ClosedFormFit { case, alpha };
    for (i, s) in seq.iter().enumerate() {
        if fit.evaluate(i) != *s {
            return Err(RecurrenceError::VerificationFailed(i));
        }
    }
    Ok(fit)
}

/// The sequence a fit generates, rejected unless its terms are mutually
/// distinct. Over small fields this is where the size bounds on d bite.
pub fn distinct_sequence(fit: &ClosedFormFit, d: usize) -> Result<Vec<Elem>> {
    let seq = fit.sequence(d);
    check_distinct(&seq)?;
    Ok(seq)
}

pub fn check_distinct(seq: &[Elem]) -> Result<()> {
    for j in 0..seq.len() {
        for i in 0..j {
            if seq[i] == seq[j] {
                return Err(RecurrenceError::NotDistinct(i, j));
            }
        }
    }
    Ok(())
}

pub(crate) fn embed_all(f: &Field, seq: &[Elem]) -> Result<Vec<Elem>> {
    seq.iter().map(|x| f.embed(x).map_err(Into::into)).collect()
}

/// vt_i = sum_{h<i} (s_h - s_{d-h})/(s_0 - s_d) for 0 <= i <= d+1.
pub fn vartheta_sums(theta: &[Elem]) -> Result<Vec<Elem>> {
    let d = theta.len() - 1;
    if d < 1 {
        return Err(RecurrenceError::TooShort(1));
    }
    let denom = (&theta[0] - &theta[d]).inverse().map_err(|_| RecurrenceError::NotDistinct(0, d))?;
    let mut out = vec![theta[0].field().zero()];
    for h in 0..=d {
        let next = out.last().unwrap() + &(&(&theta[h] - &theta[d - h]) * &denom);
        out.push(next);
    }
    Ok(out)
}

/// Closed-form values of the normalised sums, by case, for d >= 3.
pub fn vartheta_closed_form(theta: &[Elem], beta: &Elem, q: Option<&Elem>) -> Result<Vec<Elem>> {
    let d = theta.len() - 1;
    if d < 3 {
        return Err(RecurrenceError::TooShort(3));
    }
    let case = closed_form_case(beta, q)?;
    let f = case.field(theta[0].field());
    let di = d as i64;
    let mut out = Vec::with_capacity(d + 2);
    for i in 0..=d + 1 {
        let ii = i as i64;
        let v = match &case {
            ClosedFormCase::Generic { q } => {
                let one = f.one();
                let num = &(&q.pow(ii)? - &one) * &(&q.pow(di - ii + 1)? - &one);
                num.try_div(&(&(q - &one) * &(&q.pow(di)? - &one)))?
            }
            ClosedFormCase::BetaTwo => f.from_i64(ii * (di - ii + 1)).try_div(&f.from_i64(di))?,
            ClosedFormCase::BetaMinusTwo if d % 2 == 1 => f.from_i64(ii % 2),
            ClosedFormCase::BetaMinusTwo => {
                if i % 2 == 0 {
                    f.from_ratio(ii, di)?
                } else {
                    f.from_ratio(di - ii + 1, di)?
                }
            }
            ClosedFormCase::BetaZeroCharTwo => {
                if d != 3 {
                    return Err(RecurrenceError::Precondition("beta = 0 in characteristic 2 needs d = 3".into()));
                }
                f.from_i64(ii % 2)
            }
        };
        out.push(v);
    }
    Ok(out)
}

/// The single rational expression covering both beta = -2 parity cases.
pub fn vartheta_beta_minus_two_uniform(f: &Field, d: usize, i: usize) -> Result<Elem> {
    let sgn = |e: usize| if e % 2 == 0 { 1 } else { -1 };
    let (di, ii) = (d as i64, i as i64);
    let num = 2 * di + 1 + (2 * ii - 2 * di - 1) * sgn(i) + sgn(d) + (2 * ii - 1) * sgn(i + d);
    Ok(f.from_ratio(num, 4 * di)?)
}

/// Compares the direct sums against the closed form (in q's field if needed).
pub fn vartheta_closed_check(theta: &[Elem], beta: &Elem, q: Option<&Elem>) -> Result<bool> {
    let closed = vartheta_closed_form(theta, beta, q)?;
    let f = closed[0].field().clone();
    let direct = embed_all(&f, &vartheta_sums(theta)?)?;
    Ok(direct == closed)
}

/// psi_i = prod_{h=0}^{i-2} (s_i - s_{h+1})/(s_{i+1} - s_h) for 1 <= i <= d-1.
pub fn psi(theta: &[Elem], i: usize) -> Result<Elem> {
    let d = theta.len() - 1;
    if i < 1 || i + 1 > d {
        return Err(RecurrenceError::Precondition(format!("psi_{i} needs 1 <= i <= d-1")));
    }
    let mut acc = theta[0].field().one();
    for h in 0..i.saturating_sub(1) {
        let num = &theta[i] - &theta[h + 1];
        let den = &theta[i + 1] - &theta[h];
        acc = &acc * &num.try_div(&den)?;
    }
    Ok(acc)
}

/// All psi_i, indexed so that `v[i - 1]` is psi_i.
pub fn psi_products(theta: &[Elem]) -> Result<Vec<Elem>> {
    let d = theta.len() - 1;
    (1..d).map(|i| psi(theta, i)).collect()
}

/// Closed form of psi_i by case (needs d >= 3 for the case to be meaningful).
pub fn psi_closed_form(field: &Field, beta: &Elem, q: Option<&Elem>, i: usize) -> Result<Elem> {
    let case = closed_form_case(beta, q)?;
    let f = case.field(field);
    let ii = i as i64;
    Ok(match &case {
        ClosedFormCase::Generic { q } => {
            let one = f.one();
            let num = &(&q.pow(ii - 1)? * &(q - &one)) * &(&q.square() - &one);
            num.try_div(&(&(&q.pow(ii)? - &one) * &(&q.pow(ii + 1)? - &one)))?
        }
        ClosedFormCase::BetaTwo => f.from_ratio(2, ii * (ii + 1))?,
        ClosedFormCase::BetaMinusTwo => {
            if i % 2 == 0 {
                f.from_ratio(-2, ii)?
            } else {
                f.from_ratio(2, ii + 1)?
            }
        }
        ClosedFormCase::BetaZeroCharTwo => f.one(),
    })
}

/// The single expression 4(-1)^i/((-1)^i - 1 - 2i) for beta = -2.
pub fn psi_beta_minus_two_uniform(f: &Field, i: usize) -> Result<Elem> {
    let s = if i % 2 == 0 { 1 } else { -1 };
    Ok(f.from_ratio(4 * s, s - 1 - 2 * i as i64)?)
}

pub fn psi_closed_check(theta: &[Elem], beta: &Elem, q: Option<&Elem>) -> Result<bool> {
    let d = theta.len() - 1;
    if d < 3 {
        return Err(RecurrenceError::TooShort(3));
    }
    let direct = psi_products(theta)?;
    for (k, dv) in direct.iter().enumerate() {
        let closed = psi_closed_form(theta[0].field(), beta, q, k + 1)?;
        if closed.field().embed(dv)? != closed {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Predicted value of (s_i - s_j)/(s_r - s_s) for i + j = r + s, r != s.
pub fn symmetric_ratio(field: &Field, beta: &Elem, q: Option<&Elem>, i: usize, j: usize, r: usize, s: usize) -> Result<Elem> {
    if i + j != r + s || r == s {
        return Err(RecurrenceError::Precondition("need i + j = r + s and r != s".into()));
    }
    let case = closed_form_case(beta, q)?;
    let f = case.field(field);
    let (ii, jj, rr, ss) = (i as i64, j as i64, r as i64, s as i64);
    Ok(match &case {
        ClosedFormCase::Generic { q } => {
            (&q.pow(ii)? - &q.pow(jj)?).try_div(&(&q.pow(rr)? - &q.pow(ss)?))?
        }
        ClosedFormCase::BetaTwo => f.from_ratio(ii - jj, rr - ss)?,
        ClosedFormCase::BetaMinusTwo => {
            let sign = if (i + r) % 2 == 0 { 1 } else { -1 };
            if (i + j) % 2 == 0 {
                f.from_ratio(sign * (ii - jj), rr - ss)?
            } else {
                f.from_i64(sign)
            }
        }
        ClosedFormCase::BetaZeroCharTwo => f.from_i64(if i == j { 0 } else { 1 }),
    })
}

/// Both sides of the characterisation of scaled normalised sums: returns
/// (candidate equals vt_1 times the sums, candidate is beta-recurrent with
/// vt_0 = 0, vt_1 = vt_d, vt_{d+1} = 0). The two agree for distinct,
/// beta-recurrent theta.
pub fn scaled_sum_characterisation(theta: &[Elem], beta: &Elem, candidate: &[Elem]) -> Result<(bool, bool)> {
    let d = theta.len() - 1;
    if candidate.len() != d + 2 {
        return Err(RecurrenceError::Precondition("candidate must have d + 2 terms".into()));
    }
    let sums = vartheta_sums(theta)?;
    let scaled = candidate.iter().zip(&sums).all(|(c, s)| *c == &candidate[1] * s);
    let boundary = candidate[0].is_zero() && candidate[1] == candidate[d] && candidate[d + 1].is_zero();
    let recurrent = classify_recurrence(candidate, &Level::Beta(beta.clone()));
    Ok((scaled, boundary && recurrent))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::rationals()
    }

    fn seq(f: &Field, v: &[i64]) -> Vec<Elem> {
        v.iter().map(|&x| f.from_i64(x)).collect()
    }

    #[test]
    fn detects_beta_for_powers_of_two() {
        let f = q();
        let s = seq(&f, &[1, 2, 4, 8]);
        let c = detect_beta(&s).unwrap();
        assert_eq!(c.beta, Beta::Value(f.from_ratio(5, 2).unwrap()));
        assert_eq!(c.gamma, Some(f.zero()));
        assert_eq!(c.varrho, Some(f.zero()));
    }

    #[test]
    fn short_sequences_leave_beta_free() {
        let f = q();
        let c = detect_beta(&seq(&f, &[0, 1, 2])).unwrap();
        assert_eq!(c.beta, Beta::Unconstrained);
    }

    #[test]
    fn arithmetic_progression_levels() {
        let f = q();
        let s = seq(&f, &[0, 1, 2, 3]);
        let two = f.from_i64(2);
        assert!(classify_recurrence(&s, &Level::Beta(two.clone())));
        assert!(classify_recurrence(&s, &Level::BetaGamma(two.clone(), f.zero())));
        // (i-1)^2 - 2(i-1)i + i^2 = 1
        assert!(classify_recurrence(&s, &Level::BetaGammaRho(two.clone(), f.zero(), f.one())));
        assert!(!classify_recurrence(&s, &Level::BetaGammaRho(two, f.zero(), f.from_i64(-1))));
    }

    #[test]
    fn non_recurrent_and_zero_denominator() {
        let f = q();
        assert_eq!(detect_beta(&seq(&f, &[0, 1, 3, 4, 9])), Err(RecurrenceError::NotRecurrent(3)));
        assert_eq!(detect_beta(&seq(&f, &[0, 1, 1, 4])), Err(RecurrenceError::ZeroDenominator(2)));
    }

    #[test]
    fn generic_fit_needs_q() {
        let f = q();
        let s = seq(&f, &[1, 2, 4, 8]);
        let beta = f.from_ratio(5, 2).unwrap();
        assert_eq!(closed_form_fit(&s, &beta, None), Err(RecurrenceError::MissingQ));
        assert_eq!(closed_form_fit(&s, &beta, Some(&f.from_i64(3))), Err(RecurrenceError::BadQ));
        let fit = closed_form_fit(&s, &beta, Some(&f.from_i64(2))).unwrap();
        assert_eq!(fit.alpha, [f.zero(), f.one(), f.zero()]);
    }

    #[test]
    fn char_two_half_binomial_reading() {
        let f = Field::prime(2).unwrap();
        let fit = ClosedFormFit { case: ClosedFormCase::BetaZeroCharTwo, alpha: [f.zero(), f.zero(), f.one()] };
        let got: Vec<String> = fit.sequence(7).iter().map(|e| e.to_string()).collect();
        assert_eq!(got, ["0", "0", "1", "1", "0", "0", "1", "1"]);
    }

    #[test]
    fn beta_minus_two_uniform_matches_cases() {
        let f = q();
        for d in 3..9usize {
            let theta: Vec<Elem> = (0..=d)
                .map(|i| {
                    let s = if i % 2 == 0 { 1 } else { -1 };
                    f.from_i64(3 + 2 * s + 5 * i as i64 * s)
                })
                .collect();
            let closed = vartheta_closed_form(&theta, &f.from_i64(-2), None).unwrap();
            for (i, c) in closed.iter().enumerate() {
                assert_eq!(*c, vartheta_beta_minus_two_uniform(&f, d, i).unwrap());
            }
            assert!(vartheta_closed_check(&theta, &f.from_i64(-2), None).unwrap());
        }
        for i in 1..10 {
            assert_eq!(
                psi_beta_minus_two_uniform(&f, i).unwrap(),
                psi_closed_form(&f, &f.from_i64(-2), None, i).unwrap()
            );
        }
    }
}
