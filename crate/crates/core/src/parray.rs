//! Parameter arrays: the four sequences (theta; theta*; varphi; phi) that
//! determine a Leonard system up to isomorphism, their validity conditions and
//! the dihedral group of relatives acting on them.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use crate::field::{Elem, Field, FieldError};
use crate::recurrence;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParrayError {
    #[error("malformed parameter array: {0}")]
    Structural(String),
    #[error("prerequisite failed: {0}")]
    Prerequisite(String),
    #[error("{0}_{1} is zero")]
    PA2Failure(Seq, usize),
    #[error("unknown relative generator {0:?} (expected down, Down or star)")]
    BadWord(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Seq {
    Theta,
    ThetaStar,
    Varphi,
    Phi,
}

impl fmt::Display for Seq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Seq::Theta => "theta",
            Seq::ThetaStar => "theta_star",
            Seq::Varphi => "varphi",
            Seq::Phi => "phi",
        })
    }
}

/// theta and theta_star have d+1 terms; varphi and phi have d terms, stored
/// from index 0 so that `varphi[i - 1]` is varphi_i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParameterArray {
    pub field: Field,
    pub theta: Vec<Elem>,
    pub theta_star: Vec<Elem>,
    pub varphi: Vec<Elem>,
    pub phi: Vec<Elem>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Two equal terms of an eigenvalue sequence.
    Distinct { seq: Seq, i: usize, j: usize },
    /// A zero split-sequence term.
    Nonzero { seq: Seq, i: usize },
    /// The varphi_i identity fails.
    VarphiIdentity { i: usize },
    /// The phi_i identity fails.
    PhiIdentity { i: usize },
    /// A ratio (s_{i-2} - s_{i+1})/(s_{i-1} - s_i) is undefined or differs
    /// from the common value taken at i = 2 of theta.
    Ratio { seq: Seq, i: usize },
}

impl Violation {
    /// Condition label PA1..PA5.
    pub fn condition(&self) -> &'static str {
        match self {
            Violation::Distinct { .. } => "PA1",
            Violation::Nonzero { .. } => "PA2",
            Violation::VarphiIdentity { .. } => "PA3",
            Violation::PhiIdentity { .. } => "PA4",
            Violation::Ratio { .. } => "PA5",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Distinct { seq, i, j } => write!(f, "PA1: {seq}_{i} = {seq}_{j}"),
            Violation::Nonzero { seq, i } => write!(f, "PA2: {seq}_{i} = 0"),
            Violation::VarphiIdentity { i } => write!(f, "PA3 fails at i={i}"),
            Violation::PhiIdentity { i } => write!(f, "PA4 fails at i={i}"),
            Violation::Ratio { seq, i } => write!(f, "PA5: {seq} ratio at i={i} is off"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// d = 0, where every condition holds trivially.
    pub vacuous: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl ParameterArray {
    pub fn new(
        field: &Field,
        theta: Vec<Elem>,
        theta_star: Vec<Elem>,
        varphi: Vec<Elem>,
        phi: Vec<Elem>,
    ) -> Result<ParameterArray, ParrayError> {
        let pa = ParameterArray { field: field.clone(), theta, theta_star, varphi, phi };
        pa.check_structure()?;
        Ok(pa)
    }

    /// Builds from small integers; handy in tests and examples.
    pub fn from_ints(field: &Field, theta: &[i64], theta_star: &[i64], varphi: &[i64], phi: &[i64]) -> Result<ParameterArray, ParrayError> {
        let conv = |v: &[i64]| v.iter().map(|&x| field.from_i64(x)).collect();
        ParameterArray::new(field, conv(theta), conv(theta_star), conv(varphi), conv(phi))
    }

    pub fn d(&self) -> usize {
        self.theta.len().saturating_sub(1)
    }

    pub fn check_structure(&self) -> Result<(), ParrayError> {
        if self.theta.is_empty() {
            return Err(ParrayError::Structural("theta is empty".into()));
        }
        let d = self.d();
        let want = [(Seq::ThetaStar, &self.theta_star, d + 1), (Seq::Varphi, &self.varphi, d), (Seq::Phi, &self.phi, d)];
        for (name, v, n) in want {
            if v.len() != n {
                return Err(ParrayError::Structural(format!("{name} has {} terms, expected {n}", v.len())));
            }
        }
        let all = self.theta.iter().chain(&self.theta_star).chain(&self.varphi).chain(&self.phi);
        for e in all {
            if e.field() != &self.field {
                return Err(FieldError::CtxMismatch(e.field().descriptor(), self.field.descriptor()).into());
            }
        }
        Ok(())
    }

    pub fn seq(&self, which: Seq) -> &[Elem] {
        match which {
            Seq::Theta => &self.theta,
            Seq::ThetaStar => &self.theta_star,
            Seq::Varphi => &self.varphi,
            Seq::Phi => &self.phi,
        }
    }

    pub fn seq_mut(&mut self, which: Seq) -> &mut Vec<Elem> {
        match which {
            Seq::Theta => &mut self.theta,
            Seq::ThetaStar => &mut self.theta_star,
            Seq::Varphi => &mut self.varphi,
            Seq::Phi => &mut self.phi,
        }
    }

    /// varphi_i for 1 <= i <= d.
    pub fn varphi(&self, i: usize) -> &Elem {
        &self.varphi[i - 1]
    }

    /// phi_i for 1 <= i <= d.
    pub fn phi(&self, i: usize) -> &Elem {
        &self.phi[i - 1]
    }

    /// Evaluates PA1..PA5 and lists every violation found.
    pub fn validate(&self) -> Result<ValidationReport, ParrayError> {
        self.check_structure()?;
        let d = self.d();
        let mut out = ValidationReport { violations: Vec::new(), vacuous: d == 0 };
        if d == 0 {
            return Ok(out);
        }
        for seq in [Seq::Theta, Seq::ThetaStar] {
            let s = self.seq(seq);
            for j in 0..=d {
                for i in 0..j {
                    if s[i] == s[j] {
                        out.violations.push(Violation::Distinct { seq, i, j });
                    }
                }
            }
        }
        for seq in [Seq::Varphi, Seq::Phi] {
            for (k, v) in self.seq(seq).iter().enumerate() {
                if v.is_zero() {
                    out.violations.push(Violation::Nonzero { seq, i: k + 1 });
                }
            }
        }
        // PA3/PA4 need theta_0 != theta_d; if that fails PA1 already says so.
        if let Ok(sums) = recurrence::vartheta_sums(&self.theta) {
            let (t, ts) = (&self.theta, &self.theta_star);
            for i in 1..=d {
                let shift = &ts[i] - &ts[0];
                let want_varphi = &(self.phi(1) * &sums[i]) + &(&shift * &(&t[i - 1] - &t[d]));
                if *self.varphi(i) != want_varphi {
                    out.violations.push(Violation::VarphiIdentity { i });
                }
                let want_phi = &(self.varphi(1) * &sums[i]) + &(&shift * &(&t[d - i + 1] - &t[0]));
                if *self.phi(i) != want_phi {
                    out.violations.push(Violation::PhiIdentity { i });
                }
            }
        }
        out.violations.extend(ratio_violations(&self.theta, &self.theta_star));
        Ok(out)
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok_and(|r| r.is_valid())
    }

    /// Applies one generator of the relatives group.
    pub fn relative(&self, g: Gen) -> ParameterArray {
        let d = self.d();
        let rev = |v: &[Elem]| v.iter().rev().cloned().collect::<Vec<_>>();
        let (theta, theta_star, varphi, phi) = match g {
            // (theta_{d-i}; theta*_i; phi_i; varphi_i)
            Gen::DoubleDown => (rev(&self.theta), self.theta_star.clone(), self.phi.clone(), self.varphi.clone()),
            // (theta_i; theta*_{d-i}; phi_{d-i+1}; varphi_{d-i+1})
            Gen::Down => (self.theta.clone(), rev(&self.theta_star), rev(&self.phi), rev(&self.varphi)),
            // (theta*_i; theta_i; varphi_i; phi_{d-i+1})
            Gen::Star => (self.theta_star.clone(), self.theta.clone(), self.varphi.clone(), rev(&self.phi)),
        };
        debug_assert_eq!(theta.len(), d + 1);
        ParameterArray { field: self.field.clone(), theta, theta_star, varphi, phi }
    }

    /// Applies a word generator by generator, left to right.
    pub fn transform(&self, word: &D4Word) -> ParameterArray {
        word.0.iter().fold(self.clone(), |pa, &g| pa.relative(g))
    }

    /// The distinct arrays reachable under the group, starting with `self`.
    pub fn orbit(&self) -> Vec<ParameterArray> {
        let mut seen = vec![self.clone()];
        let mut queue = VecDeque::from([self.clone()]);
        while let Some(pa) = queue.pop_front() {
            for g in Gen::ALL {
                let next = pa.relative(g);
                if !seen.contains(&next) {
                    seen.push(next.clone());
                    queue.push_back(next);
                }
            }
        }
        seen
    }
}

/// PA5 on a pair of eigenvalue sequences.
pub fn ratio_violations(theta: &[Elem], theta_star: &[Elem]) -> Vec<Violation> {
    let d = theta.len() - 1;
    let mut out = Vec::new();
    if d < 3 {
        return out;
    }
    let ratio = |s: &[Elem], i: usize| (&s[i - 2] - &s[i + 1]).try_div(&(&s[i - 1] - &s[i])).ok();
    let reference = ratio(theta, 2);
    for seq_kind in [Seq::Theta, Seq::ThetaStar] {
        let s = if seq_kind == Seq::Theta { theta } else { theta_star };
        for i in 2..d {
            let r = ratio(s, i);
            if r.is_none() || r != reference {
                out.push(Violation::Ratio { seq: seq_kind, i });
            }
        }
    }
    out
}

/// vt_0 = 0, vt_i = varphi_i - (theta*_i - theta*_0)(theta_{i-1} - theta_d),
/// vt_{d+1} = 0.
pub fn vartheta_of(pa: &ParameterArray) -> Vec<Elem> {
    let d = pa.d();
    let (t, ts) = (&pa.theta, &pa.theta_star);
    let mut out = vec![pa.field.zero()];
    for i in 1..=d {
        out.push(pa.varphi(i) - &(&(&ts[i] - &ts[0]) * &(&t[i - 1] - &t[d])));
    }
    out.push(pa.field.zero());
    out
}

/// The unique varphi, phi compatible with the given eigenvalue sequences and
/// first split value, built from PA3 and PA4.
pub fn complete_from_varphi1(varphi1: &Elem, theta: &[Elem], theta_star: &[Elem]) -> Result<ParameterArray, ParrayError> {
    let field = varphi1.field().clone();
    let d = theta.len() - 1;
    if theta_star.len() != d + 1 {
        return Err(ParrayError::Structural("theta and theta_star lengths differ".into()));
    }
    if recurrence::check_distinct(theta).is_err() || recurrence::check_distinct(theta_star).is_err() {
        return Err(ParrayError::Prerequisite("eigenvalue sequences must be mutually distinct".into()));
    }
    if !ratio_violations(theta, theta_star).is_empty() {
        return Err(ParrayError::Prerequisite("eigenvalue sequences fail the common-ratio condition".into()));
    }
    if d == 0 {
        return ParameterArray::new(&field, theta.to_vec(), theta_star.to_vec(), vec![], vec![]);
    }
    let sums = recurrence::vartheta_sums(theta).map_err(|e| ParrayError::Prerequisite(e.to_string()))?;
    let phi1 = varphi1 - &(&(&theta_star[1] - &theta_star[0]) * &(&theta[0] - &theta[d]));
    let mut varphi = Vec::with_capacity(d);
    let mut phi = Vec::with_capacity(d);
    for i in 1..=d {
        let shift = &theta_star[i] - &theta_star[0];
        varphi.push(&(&phi1 * &sums[i]) + &(&shift * &(&theta[i - 1] - &theta[d])));
        phi.push(&(varphi1 * &sums[i]) + &(&shift * &(&theta[d - i + 1] - &theta[0])));
    }
    for (seq, v) in [(Seq::Varphi, &varphi), (Seq::Phi, &phi)] {
        if let Some(k) = v.iter().position(Elem::is_zero) {
            return Err(ParrayError::PA2Failure(seq, k + 1));
        }
    }
    ParameterArray::new(&field, theta.to_vec(), theta_star.to_vec(), varphi, phi)
}

/// Generators of the relatives group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gen {
    /// Reverse the primitive idempotents of A (the eigenvalue order).
    DoubleDown,
    /// Reverse the primitive idempotents of A* (the dual eigenvalue order).
    Down,
    /// Swap the roles of A and A*.
    Star,
}

impl Gen {
    pub const ALL: [Gen; 3] = [Gen::DoubleDown, Gen::Down, Gen::Star];

    pub fn name(self) -> &'static str {
        match self {
            Gen::DoubleDown => "Down",
            Gen::Down => "down",
            Gen::Star => "star",
        }
    }
}

/// A word in the generators, applied left to right.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct D4Word(pub Vec<Gen>);

impl D4Word {
    /// Cancels adjacent repeated generators (each is an involution).
    pub fn reduced(&self) -> D4Word {
        let mut out: Vec<Gen> = Vec::new();
        for &g in &self.0 {
            if out.last() == Some(&g) {
                out.pop();
            } else {
                out.push(g);
            }
        }
        D4Word(out)
    }
}

impl FromStr for D4Word {
    type Err = ParrayError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "id" {
            return Ok(D4Word::default());
        }
        s.split('.')
            .map(|t| match t.trim() {
                "Down" => Ok(Gen::DoubleDown),
                "down" => Ok(Gen::Down),
                "star" => Ok(Gen::Star),
                other => Err(ParrayError::BadWord(other.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(D4Word)
    }
}

impl fmt::Display for D4Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("id");
        }
        let names: Vec<&str> = self.0.iter().map(|g| g.name()).collect();
        f.write_str(&names.join("."))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn krawtchouk() -> ParameterArray {
        ParameterArray::from_ints(&Field::rationals(), &[0, 1, 2], &[0, 1, 2], &[-4, -4], &[-2, -2]).unwrap()
    }

    #[test]
    fn krawtchouk_is_valid() {
        let r = krawtchouk().validate().unwrap();
        assert!(r.is_valid(), "{:?}", r.violations);
    }

    #[test]
    fn d1_example() {
        let pa = ParameterArray::from_ints(&Field::rationals(), &[0, 1], &[0, 1], &[1], &[2]).unwrap();
        assert!(pa.is_valid());
        let bad = ParameterArray::from_ints(&Field::rationals(), &[0, 1], &[0, 1], &[1], &[3]).unwrap();
        let r = bad.validate().unwrap();
        assert!(r.violations.contains(&Violation::VarphiIdentity { i: 1 }));
        assert!(r.violations.contains(&Violation::PhiIdentity { i: 1 }));
    }

    #[test]
    fn repeated_theta_is_pa1() {
        let pa = ParameterArray::from_ints(&Field::rationals(), &[0, 0, 2], &[0, 1, 2], &[-4, -4], &[-2, -2]).unwrap();
        let r = pa.validate().unwrap();
        assert_eq!(r.violations[0], Violation::Distinct { seq: Seq::Theta, i: 0, j: 1 });
    }

    #[test]
    fn d0_is_vacuous() {
        let pa = ParameterArray::from_ints(&Field::rationals(), &[5], &[7], &[], &[]).unwrap();
        let r = pa.validate().unwrap();
        assert!(r.vacuous && r.is_valid());
    }

    #[test]
    fn structural_errors() {
        let f = Field::rationals();
        assert!(matches!(
            ParameterArray::from_ints(&f, &[0, 1, 2], &[0, 1], &[1, 1], &[1, 1]),
            Err(ParrayError::Structural(_))
        ));
    }

    #[test]
    fn residues_and_completion() {
        let pa = krawtchouk();
        let vt: Vec<String> = vartheta_of(&pa).iter().map(|e| e.to_string()).collect();
        assert_eq!(vt, ["0", "-2", "-2", "0"]);
        let back = complete_from_varphi1(pa.varphi(1), &pa.theta, &pa.theta_star).unwrap();
        assert_eq!(back, pa);
        let f = Field::rationals();
        let err = complete_from_varphi1(&f.zero(), &pa.theta, &pa.theta_star);
        assert!(matches!(err, Err(ParrayError::PA2Failure(Seq::Varphi, 1))));
    }

    #[test]
    fn word_parse_and_relation() {
        let w: D4Word = "down.star".parse().unwrap();
        let v: D4Word = "star.Down".parse().unwrap();
        let pa = krawtchouk();
        assert_eq!(pa.transform(&w), pa.transform(&v));
        assert_eq!(w.to_string(), "down.star");
        assert!("up".parse::<D4Word>().is_err());
        let ww: D4Word = "star.star.down".parse().unwrap();
        assert_eq!(ww.reduced().to_string(), "down");
    }
}
