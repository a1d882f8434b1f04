//! Exact scalar fields: the rationals, prime fields and small extension fields.
//!
//! A [`Field`] is a cheap, clonable handle. Every [`Elem`] carries the handle of
//! the field it lives in, and arithmetic between elements of different fields is
//! rejected. The operator impls (`+`, `-`, `*`, `/`) panic on such misuse and on
//! division by zero; the `try_*` methods report the same conditions as errors.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    CompositeP(u64),
    #[error("modulus {0:?} is reducible over GF({1})")]
    ReducibleModulus(Vec<u64>, u64),
    #[error("modulus must be monic of degree at least 2, got {0:?}")]
    BadModulus(Vec<u64>),
    #[error("operands belong to different fields ({0} and {1})")]
    CtxMismatch(String, String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse {0:?} as a field element")]
    Parse(String),
    #[error("{0}")]
    OutOfRange(String),
    #[error("bad field descriptor {0:?}")]
    BadDescriptor(String),
}

/// Which field a [`Field`] handle stands for.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Rationals,
    Prime { p: u64 },
    /// GF(p^k) as GF(p)[x]/(m); `modulus` lists m's coefficients from the
    /// constant term up, ending in the leading 1.
    Extension { p: u64, modulus: Vec<u64> },
}

#[derive(Debug, Clone)]
pub struct Field {
    kind: Arc<FieldKind>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.kind, &other.kind) || self.kind == other.kind
    }
}
impl Eq for Field {}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Value {
    Rat(BigRational),
    Mod(u64),
    Poly(Vec<u64>),
}

#[derive(Clone)]
pub struct Elem {
    field: Field,
    value: Value,
}

impl Field {
    pub fn rationals() -> Field {
        Field { kind: Arc::new(FieldKind::Rationals) }
    }

    pub fn prime(p: u64) -> Result<Field, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::CompositeP(p));
        }
        Ok(Field { kind: Arc::new(FieldKind::Prime { p }) })
    }

    pub fn extension(p: u64, modulus: Vec<u64>) -> Result<Field, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::CompositeP(p));
        }
        if modulus.len() < 3 || *modulus.last().unwrap() != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(FieldError::BadModulus(modulus));
        }
        if !is_irreducible(&modulus, p) {
            return Err(FieldError::ReducibleModulus(modulus, p));
        }
        Ok(Field { kind: Arc::new(FieldKind::Extension { p, modulus }) })
    }

    pub fn new(kind: FieldKind) -> Result<Field, FieldError> {
        match kind {
            FieldKind::Rationals => Ok(Field::rationals()),
            FieldKind::Prime { p } => Field::prime(p),
            FieldKind::Extension { p, modulus } => Field::extension(p, modulus),
        }
    }

    /// Parses `Q`, `GF:p` or `GF:p:c0,c1,...,1`.
    pub fn from_descriptor(s: &str) -> Result<Field, FieldError> {
        let bad = || FieldError::BadDescriptor(s.to_string());
        let s = s.trim();
        if s == "Q" {
            return Ok(Field::rationals());
        }
        let rest = s.strip_prefix("GF:").ok_or_else(bad)?;
        let mut parts = rest.splitn(2, ':');
        let p: u64 = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
        match parts.next() {
            None => Field::prime(p),
            Some(coeffs) => {
                let modulus = coeffs
                    .split(',')
                    .map(|c| c.trim().parse::<u64>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>, _>>()?;
                Field::extension(p, modulus)
            }
        }
    }

    pub fn descriptor(&self) -> String {
        match &*self.kind {
            FieldKind::Rationals => "Q".to_string(),
            FieldKind::Prime { p } => format!("GF:{p}"),
            FieldKind::Extension { p, modulus } => {
                let cs: Vec<String> = modulus.iter().map(|c| c.to_string()).collect();
                format!("GF:{p}:{}", cs.join(","))
            }
        }
    }

    pub fn kind(&self) -> &FieldKind {
        &self.kind
    }

    /// 0 for the rationals.
    pub fn characteristic(&self) -> u64 {
        match &*self.kind {
            FieldKind::Rationals => 0,
            FieldKind::Prime { p } | FieldKind::Extension { p, .. } => *p,
        }
    }

    /// Number of elements, or `None` for the rationals (or if it overflows).
    pub fn order(&self) -> Option<u128> {
        match &*self.kind {
            FieldKind::Rationals => None,
            FieldKind::Prime { p } => Some(*p as u128),
            FieldKind::Extension { p, modulus } => (*p as u128).checked_pow(modulus.len() as u32 - 1),
        }
    }

    fn degree(&self) -> usize {
        match &*self.kind {
            FieldKind::Extension { modulus, .. } => modulus.len() - 1,
            _ => 1,
        }
    }

    pub fn zero(&self) -> Elem {
        self.from_i64(0)
    }

    pub fn one(&self) -> Elem {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Elem {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> Elem {
        let value = match &*self.kind {
            FieldKind::Rationals => Value::Rat(BigRational::from_integer(n.clone())),
            FieldKind::Prime { p } => Value::Mod(reduce_bigint(n, *p)),
            FieldKind::Extension { p, .. } => {
                let mut v = vec![0; self.degree()];
                v[0] = reduce_bigint(n, *p);
                Value::Poly(v)
            }
        };
        Elem { field: self.clone(), value }
    }

    /// n/m, reduced into the field.
    pub fn from_ratio(&self, n: i64, m: i64) -> Result<Elem, FieldError> {
        self.from_i64(n).try_div(&self.from_i64(m))
    }

    /// Element of GF(p^k) from its coefficient vector (constant term first).
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<Elem, FieldError> {
        match &*self.kind {
            FieldKind::Extension { p, .. } => {
                let k = self.degree();
                if coeffs.len() != k {
                    return Err(FieldError::OutOfRange(format!(
                        "expected {k} coefficients, got {}",
                        coeffs.len()
                    )));
                }
                if let Some(c) = coeffs.iter().find(|&&c| c >= *p) {
                    return Err(FieldError::OutOfRange(format!("coefficient {c} not in [0,{p})")));
                }
                Ok(Elem { field: self.clone(), value: Value::Poly(coeffs.to_vec()) })
            }
            _ => Err(FieldError::OutOfRange(format!(
                "coefficient vectors only make sense over extension fields, not {}",
                self.descriptor()
            ))),
        }
    }

    /// Reads an element. Integers and fractions (`-3`, `4/6`, with ASCII or
    /// Unicode minus) are accepted over every field; `[c0,...,c_{k-1}]` over
    /// extension fields.
    pub fn parse(&self, text: &str) -> Result<Elem, FieldError> {
        let t = text.trim().replace('\u{2212}', "-");
        if let Some(inner) = t.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let coeffs = inner
                .split(',')
                .map(|c| c.trim().parse::<u64>().map_err(|_| FieldError::Parse(text.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            return self.from_coeffs(&coeffs);
        }
        let (num, den) = match t.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (t.as_str(), "1"),
        };
        let parse_int = |s: &str| BigInt::from_str(s).map_err(|_| FieldError::Parse(text.to_string()));
        let (n, m) = (parse_int(num)?, parse_int(den)?);
        if m.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        match &*self.kind {
            FieldKind::Rationals => Ok(Elem {
                field: self.clone(),
                value: Value::Rat(BigRational::new(n, m)),
            }),
            _ => self.from_bigint(&n).try_div(&self.from_bigint(&m)).map_err(|_| {
                FieldError::OutOfRange(format!(
                    "denominator of {text:?} vanishes in {}",
                    self.descriptor()
                ))
            }),
        }
    }

    /// Maps an element of this field's prime subfield (given as an element of
    /// GF(p)) into this field. Elements already in the field pass through.
    pub fn embed(&self, e: &Elem) -> Result<Elem, FieldError> {
        if e.field == *self {
            return Ok(e.clone());
        }
        match (&*self.kind, &e.value) {
            (FieldKind::Extension { p, .. }, Value::Mod(v)) if e.field.characteristic() == *p => {
                let mut c = vec![0; self.degree()];
                c[0] = *v;
                Ok(Elem { field: self.clone(), value: Value::Poly(c) })
            }
            _ => Err(FieldError::CtxMismatch(e.field.descriptor(), self.descriptor())),
        }
    }

    /// All elements of a finite field in a fixed order, if there are at most
    /// `limit` of them.
    pub fn elements(&self, limit: u128) -> Option<Vec<Elem>> {
        let order = self.order()?;
        if order > limit {
            return None;
        }
        match &*self.kind {
            FieldKind::Rationals => None,
            FieldKind::Prime { p } => Some(
                (0..*p).map(|v| Elem { field: self.clone(), value: Value::Mod(v) }).collect(),
            ),
            FieldKind::Extension { p, .. } => {
                let k = self.degree();
                let mut out = Vec::with_capacity(order as usize);
                for mut idx in 0..order {
                    let mut c = vec![0u64; k];
                    for slot in c.iter_mut() {
                        *slot = (idx % *p as u128) as u64;
                        idx /= *p as u128;
                    }
                    out.push(Elem { field: self.clone(), value: Value::Poly(c) });
                }
                Some(out)
            }
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

impl FromStr for Field {
    type Err = FieldError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Field::from_descriptor(s)
    }
}

impl Elem {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        match &self.value {
            Value::Rat(r) => r.is_zero(),
            Value::Mod(v) => *v == 0,
            Value::Poly(c) => c.iter().all(|&x| x == 0),
        }
    }

    pub fn is_one(&self) -> bool {
        *self == self.field.one()
    }

    /// The rational value, if this is an element of Q.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.value {
            Value::Rat(r) => Some(r),
            _ => None,
        }
    }

    fn check_same(&self, other: &Elem) -> Result<(), FieldError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(FieldError::CtxMismatch(self.field.descriptor(), other.field.descriptor()))
        }
    }

    fn with(&self, value: Value) -> Elem {
        Elem { field: self.field.clone(), value }
    }

    pub fn try_add(&self, other: &Elem) -> Result<Elem, FieldError> {
        self.check_same(other)?;
        Ok(self.with(match (&self.value, &other.value) {
            (Value::Rat(a), Value::Rat(b)) => Value::Rat(a + b),
            (Value::Mod(a), Value::Mod(b)) => Value::Mod(add_mod(*a, *b, self.field.characteristic())),
            (Value::Poly(a), Value::Poly(b)) => {
                let p = self.field.characteristic();
                Value::Poly(a.iter().zip(b).map(|(x, y)| add_mod(*x, *y, p)).collect())
            }
            _ => unreachable!("value shape follows the field"),
        }))
    }

    pub fn try_sub(&self, other: &Elem) -> Result<Elem, FieldError> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Elem) -> Result<Elem, FieldError> {
        self.check_same(other)?;
        Ok(self.with(match (&self.value, &other.value) {
            (Value::Rat(a), Value::Rat(b)) => Value::Rat(a * b),
            (Value::Mod(a), Value::Mod(b)) => Value::Mod(mul_mod(*a, *b, self.field.characteristic())),
            (Value::Poly(a), Value::Poly(b)) => match &*self.field.kind {
                FieldKind::Extension { p, modulus } => Value::Poly(poly_mulmod(a, b, modulus, *p)),
                _ => unreachable!(),
            },
            _ => unreachable!("value shape follows the field"),
        }))
    }

    pub fn inverse(&self) -> Result<Elem, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(match &self.value {
            Value::Rat(a) => self.with(Value::Rat(a.recip())),
            Value::Mod(a) => {
                let p = self.field.characteristic();
                self.with(Value::Mod(pow_mod(*a, p - 2, p)))
            }
            Value::Poly(_) => {
                // a^(q-2) in a field with q elements.
                let q = self.field.order().expect("extension order fits in u128");
                self.pow_u128(q - 2)
            }
        })
    }

    pub fn try_div(&self, other: &Elem) -> Result<Elem, FieldError> {
        self.check_same(other)?;
        self.try_mul(&other.inverse()?)
    }

    fn pow_u128(&self, mut e: u128) -> Elem {
        let mut base = self.clone();
        let mut acc = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Integer power; negative exponents go through the inverse.
    pub fn pow(&self, e: i64) -> Result<Elem, FieldError> {
        if e >= 0 {
            Ok(self.pow_u128(e as u128))
        } else {
            Ok(self.inverse()?.pow_u128(e.unsigned_abs() as u128))
        }
    }

    pub fn square(&self) -> Elem {
        self * self
    }
}

impl PartialEq for Elem {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.value == other.value
    }
}
impl Eq for Elem {}

impl Hash for Elem {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.value.hash(state);
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            Value::Rat(r) => write!(f, "{r}"),
            Value::Mod(v) => write!(f, "{v}"),
            Value::Poly(c) => {
                let cs: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                write!(f, "[{}]", cs.join(","))
            }
        }
    }
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Neg for &Elem {
    type Output = Elem;
    fn neg(self) -> Elem {
        let p = self.field.characteristic();
        self.with(match &self.value {
            Value::Rat(a) => Value::Rat(-a),
            Value::Mod(a) => Value::Mod(neg_mod(*a, p)),
            Value::Poly(c) => Value::Poly(c.iter().map(|x| neg_mod(*x, p)).collect()),
        })
    }
}

impl Neg for Elem {
    type Output = Elem;
    fn neg(self) -> Elem {
        -&self
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $try:ident) => {
        impl $trait<&Elem> for &Elem {
            type Output = Elem;
            fn $method(self, rhs: &Elem) -> Elem {
                match self.$try(rhs) {
                    Ok(v) => v,
                    Err(e) => panic!("{}: {e}", stringify!($method)),
                }
            }
        }
        impl $trait<Elem> for Elem {
            type Output = Elem;
            fn $method(self, rhs: Elem) -> Elem {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Elem> for Elem {
            type Output = Elem;
            fn $method(self, rhs: &Elem) -> Elem {
                (&self).$method(rhs)
            }
        }
        impl $trait<Elem> for &Elem {
            type Output = Elem;
            fn $method(self, rhs: Elem) -> Elem {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);
forward_binop!(Div, div, try_div);

fn reduce_bigint(n: &BigInt, p: u64) -> u64 {
    let pb = BigInt::from(p);
    let r = ((n % &pb) + &pb) % &pb;
    r.abs().to_u64().expect("residue fits in u64")
}

fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + b as u128) % p as u128) as u64
}

fn neg_mod(a: u64, p: u64) -> u64 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; the witness set is exact for all 64-bit n.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &w in &WITNESSES {
        if n % w == 0 {
            return n == w;
        }
    }
    let (mut dd, mut s) = (n - 1, 0);
    while dd % 2 == 0 {
        dd /= 2;
        s += 1;
    }
    'outer: for &w in &WITNESSES {
        let mut x = pow_mod(w, dd, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

/// Remainder of `a` modulo a monic `m` over GF(p).
fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = trim(a.to_vec());
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        for (j, &mc) in m.iter().enumerate() {
            let t = mul_mod(lead, mc, p);
            r[shift + j] = add_mod(r[shift + j], neg_mod(t, p), p);
        }
        r = trim(r);
    }
    r
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = add_mod(prod[i + j], mul_mod(x, y, p), p);
        }
    }
    let mut r = poly_rem(&prod, m, p);
    r.resize(m.len() - 1, 0);
    r
}

/// Exhaustive trial division by every monic polynomial of degree at most k/2.
fn is_irreducible(m: &[u64], p: u64) -> bool {
    let k = m.len() - 1;
    for deg in 1..=k / 2 {
        let count = (p as u128).pow(deg as u32);
        for mut idx in 0..count {
            let mut f = vec![0u64; deg + 1];
            for slot in f.iter_mut().take(deg) {
                *slot = (idx % p as u128) as u64;
                idx /= p as u128;
            }
            f[deg] = 1;
            if poly_rem(m, &f, p).is_empty() {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf4() -> Field {
        Field::from_descriptor("GF:2:1,1,1").unwrap()
    }

    #[test]
    fn rational_parse_normalises() {
        let q = Field::rationals();
        assert_eq!(q.parse("\u{2212}4/6").unwrap(), q.from_ratio(-2, 3).unwrap());
        assert_eq!(q.parse("-4/6").unwrap().to_string(), "-2/3");
        assert_eq!(q.parse("8/4").unwrap().to_string(), "2");
    }

    #[test]
    fn prime_field_parse_reduces() {
        let f = Field::prime(7).unwrap();
        assert_eq!(f.parse("12").unwrap().to_string(), "5");
        assert_eq!(f.parse("-1").unwrap().to_string(), "6");
        assert_eq!(f.parse("1/2").unwrap().to_string(), "4");
        assert!(matches!(f.parse("1/7"), Err(FieldError::OutOfRange(_))));
    }

    #[test]
    fn composite_characteristic_rejected() {
        assert_eq!(Field::prime(15), Err(FieldError::CompositeP(15)));
        assert!(matches!(Field::from_descriptor("GF:9"), Err(FieldError::CompositeP(9))));
    }

    #[test]
    fn gf4_generator_satisfies_its_modulus() {
        let f = gf4();
        let x = f.parse("[0,1]").unwrap();
        assert_eq!((&x * &x).to_string(), "[1,1]");
        assert!((&(&x * &x) + &(&x + &f.one())).is_zero());
        assert_eq!(x.pow(3).unwrap(), f.one());
    }

    #[test]
    fn reducible_modulus_rejected() {
        // x^2 + 1 = (x + 1)^2 over GF(2).
        assert!(matches!(Field::extension(2, vec![1, 0, 1]), Err(FieldError::ReducibleModulus(..))));
        // x^2 + 1 is irreducible over GF(3).
        assert!(Field::extension(3, vec![1, 0, 1]).is_ok());
    }

    #[test]
    fn mixing_fields_is_an_error() {
        let a = Field::prime(5).unwrap().one();
        let b = Field::prime(7).unwrap().one();
        assert!(matches!(a.try_add(&b), Err(FieldError::CtxMismatch(..))));
    }

    #[test]
    fn zero_has_no_inverse() {
        for f in [Field::rationals(), Field::prime(13).unwrap(), gf4()] {
            assert_eq!(f.zero().inverse(), Err(FieldError::DivisionByZero));
        }
    }

    #[test]
    fn descriptor_round_trips() {
        for d in ["Q", "GF:13", "GF:2:1,1,1", "GF:3:1,0,1"] {
            assert_eq!(Field::from_descriptor(d).unwrap().descriptor(), d);
        }
    }

    #[test]
    fn embedding_prime_subfield() {
        let f = gf4();
        let g2 = Field::prime(2).unwrap();
        assert_eq!(f.embed(&g2.one()).unwrap(), f.one());
        assert!(f.embed(&Field::prime(3).unwrap().one()).is_err());
    }

    #[test]
    fn enumerates_small_fields() {
        let f = Field::extension(3, vec![1, 0, 1]).unwrap();
        let els = f.elements(100).unwrap();
        assert_eq!(els.len(), 9);
        // Every nonzero element has order dividing 8.
        for e in els.iter().filter(|e| !e.is_zero()) {
            assert_eq!(e.pow(8).unwrap(), f.one());
        }
        assert!(Field::rationals().elements(100).is_none());
    }
}
