//! Intersection numbers: read off a standard basis by brute force, or
//! computed from the parameter array by several closed forms, plus the
//! identities relating them.

use std::fmt;
use std::str::FromStr;

use crate::field::{Elem, FieldError};
use crate::matrix::Matrix;
use crate::parray::{Gen, ParameterArray};
use crate::poly::{eta_at, tau_at};
use crate::recurrence;
use crate::report::Report;
use crate::system::{self, Realization, SystemError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IntersectionError {
    #[error("not a Leonard system: {0}")]
    NotLeonard(String),
    #[error("method {0} needs d >= 2")]
    MethodPrecondition(Method),
    #[error("division by zero in {0}")]
    DivisionByZero(String),
    #[error("intersection data invariant violated: {0}")]
    InvariantViolated(String),
    #[error(transparent)]
    System(#[from] SystemError),
}

type Result<T> = std::result::Result<T, IntersectionError>;
type Fr = std::result::Result<Elem, FieldError>;

/// b has b_0..b_{d-1}; c has c_1..c_d stored from index 0; a has a_0..a_d.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionData {
    pub a: Vec<Elem>,
    pub b: Vec<Elem>,
    pub c: Vec<Elem>,
    pub a_star: Vec<Elem>,
    pub b_star: Vec<Elem>,
    pub c_star: Vec<Elem>,
}

impl IntersectionData {
    pub fn d(&self) -> usize {
        self.a.len() - 1
    }

    /// The data of the starred system.
    pub fn dual(&self) -> IntersectionData {
        IntersectionData {
            a: self.a_star.clone(),
            b: self.b_star.clone(),
            c: self.c_star.clone(),
            a_star: self.a.clone(),
            b_star: self.b.clone(),
            c_star: self.c.clone(),
        }
    }

    /// c_i with c_0 = 0.
    pub fn c_at(&self, i: usize) -> Elem {
        if i == 0 {
            self.a[0].field().zero()
        } else {
            self.c[i - 1].clone()
        }
    }

    /// b_i with b_d = 0.
    pub fn b_at(&self, i: usize) -> Elem {
        if i == self.d() {
            self.a[0].field().zero()
        } else {
            self.b[i].clone()
        }
    }

    /// Row sums equal theta_0 (theta*_0 for the duals) and b, c are nonzero.
    pub fn invariant_failures(&self, theta0: &Elem, theta_star0: &Elem) -> Vec<String> {
        let mut out = Vec::new();
        for (tag, data, t0) in [("", self.clone(), theta0), ("dual ", self.dual(), theta_star0)] {
            for i in 0..=data.d() {
                let s = &(&data.c_at(i) + &data.a[i]) + &data.b_at(i);
                if &s != t0 {
                    out.push(format!("{tag}row {i}: c + a + b = {s}, expected {t0}"));
                }
            }
            if let Some(i) = data.b.iter().position(Elem::is_zero) {
                out.push(format!("{tag}b_{i} is zero"));
            }
            if let Some(i) = data.c.iter().position(Elem::is_zero) {
                out.push(format!("{tag}c_{} is zero", i + 1));
            }
        }
        out
    }
}

/// A and A* in the basis E*_i xi, 0 != xi in E_0 V.
pub fn standard_basis_rep(real: &Realization) -> Result<(Matrix, Matrix)> {
    let f = &real.field;
    let xi = real.e[0].first_nonzero_column().expect("rank-one idempotent");
    let cols: Vec<Vec<Elem>> = real.e_star.iter().map(|e| e.mul_vec(&xi)).collect();
    let s = Matrix::from_columns(f, &cols);
    let inv = s.inverse().map_err(|_| IntersectionError::NotLeonard("standard basis is degenerate".into()))?;
    let a = inv.mul(&real.a).mul(&s);
    let a_star = inv.mul(&real.a_star).mul(&s);
    if !a.pattern().irreducible_tridiagonal {
        return Err(IntersectionError::NotLeonard("A is not irreducible tridiagonal in the standard basis".into()));
    }
    if a_star != Matrix::diagonal(f, &real.theta_star) {
        return Err(IntersectionError::NotLeonard("A* is not diagonal in the standard basis".into()));
    }
    Ok((a, a_star))
}

/// Intersection numbers read off the standard bases of the system and its dual.
pub fn brute_intersection(real: &Realization) -> Result<IntersectionData> {
    let (rep, _) = standard_basis_rep(real)?;
    let (rep_star, _) = standard_basis_rep(&real.relative(Gen::Star))?;
    let d = real.d();
    let read = |m: &Matrix| {
        let a: Vec<Elem> = (0..=d).map(|i| m.get(i, i).clone()).collect();
        let b: Vec<Elem> = (0..d).map(|i| m.get(i, i + 1).clone()).collect();
        let c: Vec<Elem> = (1..=d).map(|i| m.get(i, i - 1).clone()).collect();
        (a, b, c)
    };
    let (a, b, c) = read(&rep);
    let (a_star, b_star, c_star) = read(&rep_star);
    let data = IntersectionData { a, b, c, a_star, b_star, c_star };
    let bad = data.invariant_failures(&real.theta[0], &real.theta_star[0]);
    if let Some(first) = bad.into_iter().next() {
        return Err(IntersectionError::InvariantViolated(first));
    }
    Ok(data)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Ratios of tau*/eta* values times the split sequences.
    Bbcc,
    /// The same with the ratios simplified through psi.
    Cibiform,
    /// From varphi_1 and the eigenvalue sequences.
    Bici,
    /// From a*_0, c*_1 and the eigenvalue sequences.
    Bcform,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Bbcc, Method::Cibiform, Method::Bici, Method::Bcform];

    pub fn name(self) -> &'static str {
        match self {
            Method::Bbcc => "bbcc",
            Method::Cibiform => "cibiform",
            Method::Bici => "bici",
            Method::Bcform => "bcform",
        }
    }

    pub fn min_d(self) -> usize {
        match self {
            Method::Bici | Method::Bcform => 2,
            _ => 0,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Method, String> {
        Method::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| format!("unknown method {s:?}"))
    }
}

/// Intersection numbers from the parameter array alone. The a-sequences come
/// from the row-sum identity; the duals from the same formulas on the starred
/// array.
pub fn closed_forms(pa: &ParameterArray, method: Method) -> Result<IntersectionData> {
    if pa.d() < method.min_d() {
        return Err(IntersectionError::MethodPrecondition(method));
    }
    let dual_pa = pa.relative(Gen::Star);
    let (b, c) = b_and_c(pa, method)?;
    let (b_star, c_star) = b_and_c(&dual_pa, method)?;
    let fill = |t0: &Elem, b: &[Elem], c: &[Elem]| -> Vec<Elem> {
        let d = b.len();
        (0..=d)
            .map(|i| {
                let mut v = t0.clone();
                if i < d {
                    v = &v - &b[i];
                }
                if i > 0 {
                    v = &v - &c[i - 1];
                }
                v
            })
            .collect()
    };
    Ok(IntersectionData {
        a: fill(&pa.theta[0], &b, &c),
        a_star: fill(&pa.theta_star[0], &b_star, &c_star),
        b,
        c,
        b_star,
        c_star,
    })
}

fn b_and_c(pa: &ParameterArray, method: Method) -> Result<(Vec<Elem>, Vec<Elem>)> {
    let d = pa.d();
    let wrap = |e: FieldError| IntersectionError::DivisionByZero(format!("{method}: {e}"));
    let (t, ts) = (&pa.theta, &pa.theta_star);
    let mut b = Vec::with_capacity(d);
    let mut c = Vec::with_capacity(d);
    match method {
        Method::Bbcc => {
            for i in 0..d {
                let r = tau_at(ts, i, &ts[i]).try_div(&tau_at(ts, i + 1, &ts[i + 1])).map_err(wrap)?;
                b.push(pa.varphi(i + 1) * &r);
            }
            for i in 1..=d {
                let r = eta_at(ts, d - i, &ts[i]).try_div(&eta_at(ts, d - i + 1, &ts[i - 1])).map_err(wrap)?;
                c.push(pa.phi(i) * &r);
            }
        }
        Method::Cibiform => {
            let psi = recurrence::psi_products(t).map_err(|e| IntersectionError::DivisionByZero(e.to_string()))?;
            let psi = |i: usize| psi[i - 1].clone();
            for i in 0..d {
                let v = if i == 0 {
                    pa.varphi(1).try_div(&(&ts[1] - &ts[0]))
                } else {
                    (&(pa.varphi(i + 1) * &psi(i)) * &(&ts[i] - &ts[0]))
                        .try_div(&(&(&ts[i + 1] - &ts[i]) * &(&ts[i + 1] - &ts[i - 1])))
                };
                b.push(v.map_err(wrap)?);
            }
            for i in 1..=d {
                let v = if i == d {
                    pa.phi(d).try_div(&(&ts[d - 1] - &ts[d]))
                } else {
                    (&(pa.phi(i) * &psi(d - i)) * &(&ts[i] - &ts[d]))
                        .try_div(&(&(&ts[i - 1] - &ts[i]) * &(&ts[i - 1] - &ts[i + 1])))
                };
                c.push(v.map_err(wrap)?);
            }
        }
        Method::Bici => {
            let vp1 = pa.varphi(1);
            let f = |j: usize, i: usize| -> Fr {
                Ok(&(&ts[1] - &ts[j]).try_div(&(&ts[0] - &ts[i]))? - &(&ts[1] - &ts[d - 1]).try_div(&(&ts[0] - &ts[d]))?)
            };
            let g = |j: usize, i: usize| -> Elem {
                &(&(&t[1] - &t[2]) * &(&ts[i] - &ts[d])) - &(&(&t[0] - &t[1]) * &(&ts[j] - &ts[d - 1]))
            };
            b.push(vp1.try_div(&(&ts[1] - &ts[0])).map_err(wrap)?);
            for i in 1..d {
                let num = &(&ts[0] - &ts[i]) * &(&(vp1 * &f(i - 1, i).map_err(wrap)?) + &g(i - 1, i));
                b.push(num.try_div(&(&(&ts[i + 1] - &ts[i]) * &(&ts[i + 1] - &ts[i - 1]))).map_err(wrap)?);
                let num = &(&ts[0] - &ts[i]) * &(&(vp1 * &f(i + 1, i).map_err(wrap)?) + &g(i + 1, i));
                c.push(num.try_div(&(&(&ts[i - 1] - &ts[i]) * &(&ts[i - 1] - &ts[i + 1]))).map_err(wrap)?);
            }
            let num = vp1 + &(&(&t[0] - &t[1]) * &(&ts[0] - &ts[d]));
            c.push(num.try_div(&(&ts[d - 1] - &ts[d])).map_err(wrap)?);
        }
        Method::Bcform => {
            let diag = system::diagonal_from_varphi(pa)?;
            let as0 = &diag.a_star[0];
            let cs1 = dual_c1_from_a0(pa, as0).map_err(wrap)?;
            let shared = |i: usize, j: usize| -> Elem {
                &(&(&cs1 * &(&ts[0] - &ts[i])) * &(&t[0] - &t[2]))
                    + &(&(&ts[i] - as0)
                        * &(&(&(&t[1] - &t[2]) * &(&ts[0] - &ts[i])) - &(&(&t[0] - &t[1]) * &(&ts[1] - &ts[j]))))
            };
            b.push((&(&ts[0] - as0) * &(&t[1] - &t[0])).try_div(&(&ts[1] - &ts[0])).map_err(wrap)?);
            for i in 1..d {
                b.push(shared(i, i - 1).try_div(&(&(&ts[i + 1] - &ts[i]) * &(&ts[i + 1] - &ts[i - 1]))).map_err(wrap)?);
                c.push(shared(i, i + 1).try_div(&(&(&ts[i - 1] - &ts[i]) * &(&ts[i - 1] - &ts[i + 1]))).map_err(wrap)?);
            }
            c.push((&(&ts[d] - as0) * &(&t[1] - &t[0])).try_div(&(&ts[d - 1] - &ts[d])).map_err(wrap)?);
        }
    }
    Ok((b, c))
}

/// c*_1 in terms of a*_0 (d >= 2).
fn dual_c1_from_a0(pa: &ParameterArray, a_star0: &Elem) -> Fr {
    let (t, ts) = (&pa.theta, &pa.theta_star);
    let d = pa.d();
    let num = &(&(&t[0] - &t[1]) * &(&ts[1] - &ts[d - 1])) - &(&(&t[1] - &t[2]) * &(&ts[0] - &ts[d]));
    let den = &(&t[0] - &t[2]) * &(&ts[0] - &ts[d]);
    Ok(&(&ts[d] - a_star0) * &num.try_div(&den)?)
}

/// c_1 in terms of a_0 (d >= 2).
fn c1_from_a0(pa: &ParameterArray, a0: &Elem) -> Fr {
    dual_c1_from_a0(&pa.relative(Gen::Star), a0)
}

fn prod(range: impl Iterator<Item = usize>, f: impl Fn(usize) -> Fr) -> Fr {
    let mut acc: Option<Elem> = None;
    for h in range {
        let v = f(h)?;
        acc = Some(match acc {
            None => v,
            Some(a) => &a * &v,
        });
    }
    Ok(acc.unwrap_or_else(|| unreachable!("products here are never empty")))
}

/// Like `prod` but the empty product is 1 in the field of `one`.
fn prod1(one: &Elem, range: impl Iterator<Item = usize>, f: impl Fn(usize) -> Fr) -> Fr {
    let mut acc = one.clone();
    for h in range {
        acc = &acc * &f(h)?;
    }
    Ok(acc)
}

/// Three-term recurrences, the tau/eta transition identities and the solved
/// forms of b, c; run on the system and on its dual.
pub fn recurrence_identity_suite(pa: &ParameterArray, data: &IntersectionData) -> Report {
    let mut rep = Report::default();
    rep.absorb(recurrence_half(pa, data), "");
    rep.absorb(recurrence_half(&pa.relative(Gen::Star), &data.dual()), "dual: ");
    rep
}

fn recurrence_half(pa: &ParameterArray, data: &IntersectionData) -> Report {
    let mut rep = Report::default();
    let d = pa.d();
    if d == 0 {
        return rep;
    }
    let (t, ts) = (&pa.theta, &pa.theta_star);
    // c_i X_{i-1} + a_i X_i + b_i X_{i+1}, dropping terms with c_0, b_d
    let three = |i: usize, x: &dyn Fn(usize) -> Elem| -> Elem {
        let mut v = &data.a[i] * &x(i);
        if i > 0 {
            v = &v + &(&data.c_at(i) * &x(i - 1));
        }
        if i < d {
            v = &v + &(&data.b_at(i) * &x(i + 1));
        }
        v
    };
    let a_star0 = &data.a_star[0];
    for i in 0..=d {
        let lhs = three(i, &|k| ts[k].clone());
        let rhs = &(&t[1] * &ts[i]) + &(a_star0 * &(&t[0] - &t[1]));
        rep.equal(|| format!("three-term recurrence at i={i}"), Ok(lhs), Ok(rhs));
    }
    for j in 1..=d {
        for i in 0..=d {
            let lhs = three(i, &|k| tau_at(ts, j, &ts[k]));
            let rhs = &(&t[j] * &tau_at(ts, j, &ts[i])) + &(pa.varphi(j) * &tau_at(ts, j - 1, &ts[i]));
            rep.equal(|| format!("tau* transition at i={i}, j={j}"), Ok(lhs), Ok(rhs));
            let lhs = three(i, &|k| eta_at(ts, j, &ts[k]));
            let rhs = &(&t[j] * &eta_at(ts, j, &ts[i])) + &(pa.phi(d - j + 1) * &eta_at(ts, j - 1, &ts[i]));
            rep.equal(|| format!("eta* transition at i={i}, j={j}"), Ok(lhs), Ok(rhs));
        }
    }
    rep.equal(|| "b_0 = theta_0 - a_0".into(), Ok(data.b[0].clone()), Ok(&t[0] - &data.a[0]));
    rep.equal(|| "c_d = theta_0 - a_d".into(), Ok(data.c[d - 1].clone()), Ok(&t[0] - &data.a[d]));
    for i in 1..d {
        let common = &(&t[0] - &t[1]) * &(&ts[i] - a_star0);
        let a_shift = &data.a[i] - &t[0];
        let b = (&(&a_shift * &(&ts[i] - &ts[i - 1])) + &common).try_div(&(&ts[i - 1] - &ts[i + 1]));
        let c = (&(&a_shift * &(&ts[i] - &ts[i + 1])) + &common).try_div(&(&ts[i + 1] - &ts[i - 1]));
        rep.equal(|| format!("solved b_{i}"), Ok(data.b[i].clone()), b);
        rep.equal(|| format!("solved c_{i}"), Ok(data.c[i - 1].clone()), c);
    }
    rep
}

/// Fraction, eigenvalue-recovery and duality identities; run on the system
/// and on its dual.
pub fn duality_identity_suite(pa: &ParameterArray, data: &IntersectionData) -> Report {
    let mut rep = Report::default();
    rep.absorb(duality_half(pa, data), "");
    rep.absorb(duality_half(&pa.relative(Gen::Star), &data.dual()), "dual: ");
    rep
}

fn duality_half(pa: &ParameterArray, data: &IntersectionData) -> Report {
    let mut rep = Report::default();
    let d = pa.d();
    let (t, ts) = (&pa.theta, &pa.theta_star);
    let one = pa.field.one();
    let (a, as_) = (&data.a, &data.a_star);
    for i in 0..=d {
        let s = &(&data.c_at(i) + &a[i]) + &data.b_at(i);
        rep.equal(|| format!("row sum {i}"), Ok(s), Ok(t[0].clone()));
    }
    if d == 0 {
        return rep;
    }
    let sum = |r: std::ops::RangeInclusive<usize>, f: &dyn Fn(usize) -> Elem| {
        r.fold(pa.field.zero(), |acc, h| &acc + &f(h))
    };

    // fraction identities
    let up_ratio = |i: usize| prod1(&one, 0..i, |h| (&ts[i + 1] - &ts[h]).try_div(&(&ts[i] - &ts[h])));
    let down_ratio = |i: usize| prod1(&one, i + 1..=d, |h| (&ts[i - 1] - &ts[h]).try_div(&(&ts[i] - &ts[h])));
    for i in 0..d {
        let lhs = sum(0..=i, &|h| &t[h] - &a[h]).try_div(&data.b[i]);
        rep.equal(|| format!("partial sums over b_{i}"), lhs, up_ratio(i));
    }
    for i in 1..=d {
        let lhs = (&sum(0..=i - 1, &|h| a[h].clone()) - &sum(0..=i - 1, &|h| t[d - h].clone())).try_div(&data.c[i - 1]);
        rep.equal(|| format!("partial sums over c_{i}"), lhs, down_ratio(i));
    }
    let bdm1 = prod1(&one, 0..d - 1, |h| (&ts[d - 1] - &ts[h]).try_div(&(&ts[d] - &ts[h]))).map(|r| &(&a[d] - &t[d]) * &r);
    rep.equal(|| "b_{d-1} from a_d".into(), Ok(data.b[d - 1].clone()), bdm1);
    let c1 = prod1(&one, 2..=d, |h| (&ts[1] - &ts[h]).try_div(&(&ts[0] - &ts[h]))).map(|r| &(&a[0] - &t[d]) * &r);
    rep.equal(|| "c_1 from a_0".into(), Ok(data.c[0].clone()), c1);

    // eigenvalues recovered from (a, b) and from (a, c)
    let mut from_b = Vec::new();
    let mut from_c = Vec::new();
    for i in 0..=d {
        let vb: Fr = (|| {
            if i == 0 {
                return Ok(&a[0] + &data.b[0]);
            }
            let back = &data.b[i - 1] * &prod1(&one, 0..i - 1, |h| (&ts[i] - &ts[h]).try_div(&(&ts[i - 1] - &ts[h])))?;
            if i == d {
                return Ok(&a[d] - &back);
            }
            let fwd = &data.b[i] * &up_ratio(i)?;
            Ok(&(&a[i] + &fwd) - &back)
        })();
        from_b.push(vb);
        let vc: Fr = (|| {
            if i == 0 {
                return Ok(&a[d] + &data.c[d - 1]);
            }
            if i == d {
                let r = prod1(&one, 2..=d, |h| (&ts[0] - &ts[h]).try_div(&(&ts[1] - &ts[h])))?;
                return Ok(&a[0] - &(&data.c[0] * &r));
            }
            let k = d - i;
            let fwd = &data.c_at(k) * &prod1(&one, k + 1..=d, |h| (&ts[k - 1] - &ts[h]).try_div(&(&ts[k] - &ts[h])))?;
            let back =
                &data.c[k] * &prod1(&one, k + 2..=d, |h| (&ts[k] - &ts[h]).try_div(&(&ts[k + 1] - &ts[h])))?;
            Ok(&(&a[k] + &fwd) - &back)
        })();
        from_c.push(vc);
    }
    for (i, (vb, vc)) in from_b.into_iter().zip(from_c).enumerate() {
        rep.equal(|| format!("theta_{i} recovered from a, b"), vb, Ok(t[i].clone()));
        rep.equal(|| format!("theta_{i} recovered from a, c"), vc, Ok(t[i].clone()));
    }

    // ratios of eigenvalue differences agree with their duals
    for r in 0..=d {
        for s in 0..=d {
            if r == s {
                continue;
            }
            for i in 0..=d {
                if i > r + s || r + s - i > d {
                    continue;
                }
                let j = r + s - i;
                let lhs = (&t[i] - &t[j]).try_div(&(&t[r] - &t[s]));
                let rhs = (&ts[i] - &ts[j]).try_div(&(&ts[r] - &ts[s]));
                rep.equal(|| format!("difference ratio ({i},{j},{r},{s})"), lhs, rhs);
            }
        }
    }

    // b against b*, c against c*
    for i in 0..d {
        let lhs = prod(0..=i, |h| Ok(&ts[i + 1] - &ts[h]))
            .and_then(|n| prod1(&one, 0..i, |h| Ok(&ts[i] - &ts[h])).and_then(|m| n.try_div(&m)))
            .map(|r| &data.b[i] * &r);
        let rhs = prod(0..=i, |h| Ok(&t[i + 1] - &t[h]))
            .and_then(|n| prod1(&one, 0..i, |h| Ok(&t[i] - &t[h])).and_then(|m| n.try_div(&m)))
            .map(|r| &data.b_star[i] * &r);
        rep.equal(|| format!("b_{i} against b*_{i}"), lhs.clone(), rhs);
        rep.equal(|| format!("b_{i} scaled is varphi_{}", i + 1), lhs, Ok(pa.varphi(i + 1).clone()));
    }
    rep.equal(
        || "b_0 against b*_0".into(),
        Ok(&data.b[0] * &(&ts[1] - &ts[0])),
        Ok(&data.b_star[0] * &(&t[1] - &t[0])),
    );
    for i in 1..d {
        let lhs = (&(&data.b[i] * &(&ts[i + 1] - &ts[i])) * &(&ts[i + 1] - &ts[i - 1])).try_div(&(&ts[i] - &ts[0]));
        let rhs = (&(&data.b_star[i] * &(&t[i + 1] - &t[i])) * &(&t[i + 1] - &t[i - 1])).try_div(&(&t[i] - &t[0]));
        rep.equal(|| format!("scaled b_{i} against b*_{i}"), lhs, rhs);
    }
    for i in 0..d {
        let lhs = prod((i + 1..=d).rev(), |h| Ok(&ts[i] - &ts[h]))
            .and_then(|n| prod1(&one, i + 2..=d, |h| Ok(&ts[i + 1] - &ts[h])).and_then(|m| n.try_div(&m)))
            .map(|r| &data.c[i] * &r);
        let k = d - i;
        let rhs = prod(k..=d, |h| Ok(&t[k - 1] - &t[h]))
            .and_then(|n| prod1(&one, k + 1..=d, |h| Ok(&t[k] - &t[h])).and_then(|m| n.try_div(&m)))
            .map(|r| &data.c_star[k - 1] * &r);
        rep.equal(|| format!("c_{} against c*_{k}", i + 1), lhs.clone(), rhs);
        rep.equal(|| format!("c_{} scaled is phi_{}", i + 1, i + 1), lhs, Ok(pa.phi(i + 1).clone()));
    }

    // diagonal partial sums against their duals
    for i in 0..d {
        let pairs: [(Box<dyn Fn(usize) -> Elem>, Elem, Box<dyn Fn(usize) -> Elem>, Elem); 4] = [
            (Box::new(|h| &t[h] - &a[h]), &t[i] - &t[i + 1], Box::new(|h| &ts[h] - &as_[h]), &ts[i] - &ts[i + 1]),
            (
                Box::new(|h| &t[d - h] - &a[h]),
                &t[d - i] - &t[d - i - 1],
                Box::new(|h| &ts[h] - &as_[d - h]),
                &ts[i] - &ts[i + 1],
            ),
            (
                Box::new(|h| &t[h] - &a[d - h]),
                &t[i] - &t[i + 1],
                Box::new(|h| &ts[d - h] - &as_[h]),
                &ts[d - i] - &ts[d - i - 1],
            ),
            (
                Box::new(|h| &t[d - h] - &a[d - h]),
                &t[d - i] - &t[d - i - 1],
                Box::new(|h| &ts[d - h] - &as_[d - h]),
                &ts[d - i] - &ts[d - i - 1],
            ),
        ];
        for (k, (l, ld, r, rd)) in pairs.iter().enumerate() {
            let lhs = sum(0..=i, &**l).try_div(ld);
            let rhs = sum(0..=i, &**r).try_div(rd);
            let what = if i == 0 { "endpoint diagonal ratio" } else { "diagonal partial-sum ratio" };
            rep.equal(|| format!("{what} {} at i={i}", k + 1), lhs, rhs);
        }
    }

    if d >= 2 {
        let vp1 = pa.varphi(1);
        let e1 = (|| -> Fr {
            let s = &(&(&t[0] + &t[1]) - &t[d - 1]) - &t[d];
            Ok(&(&(vp1 * &s.try_div(&(&t[0] - &t[d]))?) + &(&(&ts[0] - &ts[1]) * &s)) + &(&(&ts[2] - &ts[0]) * &(&t[1] - &t[d])))
        })();
        let e2 = (|| -> Fr {
            let s = &(&(&ts[0] + &ts[1]) - &ts[d - 1]) - &ts[d];
            Ok(&(&(vp1 * &s.try_div(&(&ts[0] - &ts[d]))?) + &(&(&t[0] - &t[1]) * &s)) + &(&(&t[2] - &t[0]) * &(&ts[1] - &ts[d])))
        })();
        rep.equal(|| "varphi_2 from varphi_1 (eigenvalue form)".into(), e1, Ok(pa.varphi(2).clone()));
        rep.equal(|| "varphi_2 from varphi_1 (dual eigenvalue form)".into(), e2, Ok(pa.varphi(2).clone()));
        let v1 = &(&(&data.c[0] - &a[0]) + &t[1]) * &(&ts[2] - &ts[0]);
        let v2 = &(&(&data.c_star[0] - &as_[0]) + &ts[1]) * &(&t[2] - &t[0]);
        rep.equal(|| "varphi_2 from c_1, a_0".into(), Ok(v1), Ok(pa.varphi(2).clone()));
        rep.equal(|| "varphi_2 from c*_1, a*_0".into(), Ok(v2), Ok(pa.varphi(2).clone()));
        rep.equal(|| "c_1 in terms of a_0".into(), c1_from_a0(pa, &a[0]), Ok(data.c[0].clone()));
        rep.equal(|| "c*_1 in terms of a*_0".into(), dual_c1_from_a0(pa, &as_[0]), Ok(data.c_star[0].clone()));
    }

    // psi simplifications of the tau/eta ratios
    if let Ok(psi) = recurrence::psi_products(t) {
        for i in 1..d {
            let lhs = tau_at(t, i, &t[i]).try_div(&tau_at(t, i + 1, &t[i + 1]));
            let rhs = (&psi[i - 1] * &(&t[i] - &t[0])).try_div(&(&(&t[i + 1] - &t[i]) * &(&t[i + 1] - &t[i - 1])));
            rep.equal(|| format!("tau ratio through psi_{i}"), lhs, rhs);
            let lhs = tau_at(ts, i, &ts[i]).try_div(&tau_at(ts, i + 1, &ts[i + 1]));
            let rhs = (&psi[i - 1] * &(&ts[i] - &ts[0])).try_div(&(&(&ts[i + 1] - &ts[i]) * &(&ts[i + 1] - &ts[i - 1])));
            rep.equal(|| format!("tau* ratio through psi_{i}"), lhs, rhs);
            let lhs = eta_at(t, d - i, &t[i]).try_div(&eta_at(t, d - i + 1, &t[i - 1]));
            let rhs = (&psi[d - i - 1] * &(&t[i] - &t[d])).try_div(&(&(&t[i - 1] - &t[i]) * &(&t[i - 1] - &t[i + 1])));
            rep.equal(|| format!("eta ratio through psi_{}", d - i), lhs, rhs);
            let lhs = eta_at(ts, d - i, &ts[i]).try_div(&eta_at(ts, d - i + 1, &ts[i - 1]));
            let rhs =
                (&psi[d - i - 1] * &(&ts[i] - &ts[d])).try_div(&(&(&ts[i - 1] - &ts[i]) * &(&ts[i - 1] - &ts[i + 1])));
            rep.equal(|| format!("eta* ratio through psi_{}", d - i), lhs, rhs);
        }
    } else {
        rep.record(false, || "psi products undefined".into());
    }
    rep
}

/// Compares two data sets field by field; returns the mismatching entries.
pub fn diff(label: &str, x: &IntersectionData, y: &IntersectionData) -> Vec<String> {
    let mut out = Vec::new();
    let parts = [
        ("a", &x.a, &y.a, 0),
        ("b", &x.b, &y.b, 0),
        ("c", &x.c, &y.c, 1),
        ("a*", &x.a_star, &y.a_star, 0),
        ("b*", &x.b_star, &y.b_star, 0),
        ("c*", &x.c_star, &y.c_star, 1),
    ];
    for (name, u, v, offset) in parts {
        if u.len() != v.len() {
            out.push(format!("{label}: {name} lengths differ"));
            continue;
        }
        for (k, (p, q)) in u.iter().zip(v.iter()).enumerate() {
            if p != q {
                out.push(format!("{label}: {name}_{} = {q}, expected {p}", k + offset));
            }
        }
    }
    out
}
