//! The thirteen named families of parameter arrays, their closed-form
//! intersection numbers, and a seeded sampler for admissible parameters.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::field::{Elem, Field, FieldError};
use crate::intersection::IntersectionData;
use crate::parray::{ParameterArray, ParrayError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FamilyError {
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
    #[error("missing parameter {0}")]
    MissingParam(String),
    #[error("parameter {0} is not used by this family")]
    UnknownParam(String),
    #[error("constraint violated: {0}")]
    ConstraintViolated(String),
    #[error("generated array is not a parameter array: {0}")]
    Inadmissible(String),
    #[error("zero denominator in {0}")]
    ZeroDenominator(String),
    #[error("no admissible parameters found after {0} attempts")]
    ExhaustedSearch(usize),
    #[error(transparent)]
    Field(#[from] FieldError),
}

type Result<T> = std::result::Result<T, FamilyError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    QRacah,
    QHahn,
    DualQHahn,
    QuantumQKrawtchouk,
    QKrawtchouk,
    AffineQKrawtchouk,
    DualQKrawtchouk,
    Racah,
    Hahn,
    DualHahn,
    Krawtchouk,
    BannaiIto,
    Orphan,
}

impl Family {
    pub const ALL: [Family; 13] = [
        Family::QRacah,
        Family::QHahn,
        Family::DualQHahn,
        Family::QuantumQKrawtchouk,
        Family::QKrawtchouk,
        Family::AffineQKrawtchouk,
        Family::DualQKrawtchouk,
        Family::Racah,
        Family::Hahn,
        Family::DualHahn,
        Family::Krawtchouk,
        Family::BannaiIto,
        Family::Orphan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::QRacah => "q-racah",
            Family::QHahn => "q-hahn",
            Family::DualQHahn => "dual-q-hahn",
            Family::QuantumQKrawtchouk => "quantum-q-krawtchouk",
            Family::QKrawtchouk => "q-krawtchouk",
            Family::AffineQKrawtchouk => "affine-q-krawtchouk",
            Family::DualQKrawtchouk => "dual-q-krawtchouk",
            Family::Racah => "racah",
            Family::Hahn => "hahn",
            Family::DualHahn => "dual-hahn",
            Family::Krawtchouk => "krawtchouk",
            Family::BannaiIto => "bannai-ito",
            Family::Orphan => "orphan",
        }
    }

    /// Free parameters besides theta0 and theta0_star, tied ones last.
    pub fn params(self) -> &'static [&'static str] {
        match self {
            Family::QRacah => &["q", "h", "h_star", "s", "s_star", "r1", "r2"],
            Family::QHahn => &["q", "h", "h_star", "s_star", "r"],
            Family::DualQHahn => &["q", "h", "h_star", "s", "r"],
            Family::QuantumQKrawtchouk => &["q", "h_star", "s", "r"],
            Family::QKrawtchouk => &["q", "h", "h_star", "s_star"],
            Family::AffineQKrawtchouk => &["q", "h", "h_star", "r"],
            Family::DualQKrawtchouk => &["q", "h", "h_star", "s"],
            Family::Racah => &["h", "h_star", "s", "s_star", "r1", "r2"],
            Family::Hahn => &["s", "h_star", "s_star", "r"],
            Family::DualHahn => &["h", "s", "s_star", "r"],
            Family::Krawtchouk => &["s", "s_star", "r"],
            Family::BannaiIto => &["h", "h_star", "s", "s_star", "r1", "r2"],
            Family::Orphan => &["h", "h_star", "s", "s_star", "r"],
        }
    }

    /// The parameter fixed by the family's constraint, if any.
    pub fn tied(self) -> Option<&'static str> {
        match self {
            Family::QRacah | Family::Racah | Family::BannaiIto => Some("r2"),
            _ => None,
        }
    }

    pub fn has_q(self) -> bool {
        self.params().first() == Some(&"q")
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = FamilyError;
    fn from_str(s: &str) -> Result<Family> {
        Family::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| FamilyError::UnknownFamily(s.to_string()))
    }
}

/// A family, a diameter and values for the family's parameters.
/// theta0 and theta0_star default to 0 when absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilySpec {
    pub family: Family,
    pub d: usize,
    pub field: Field,
    pub params: BTreeMap<String, Elem>,
}

impl FamilySpec {
    pub fn new(family: Family, d: usize, field: &Field, params: BTreeMap<String, Elem>) -> FamilySpec {
        FamilySpec { family, d, field: field.clone(), params }
    }

    pub fn get(&self, name: &str) -> Result<Elem> {
        if let Some(v) = self.params.get(name) {
            return Ok(v.clone());
        }
        if name == "theta0" || name == "theta0_star" {
            return Ok(self.field.zero());
        }
        Err(FamilyError::MissingParam(name.to_string()))
    }

    /// Checks names and the family constraint; fills in a missing tied parameter.
    pub fn normalized(&self) -> Result<FamilySpec> {
        let fam = self.family;
        for k in self.params.keys() {
            if k != "theta0" && k != "theta0_star" && !fam.params().contains(&k.as_str()) {
                return Err(FamilyError::UnknownParam(k.clone()));
            }
        }
        if let Some(v) = self.params.values().find(|v| v.field() != &self.field) {
            return Err(FamilyError::Field(FieldError::CtxMismatch(v.field().descriptor(), self.field.descriptor())));
        }
        if fam == Family::Orphan && (self.field.characteristic() != 2 || self.d != 3) {
            return Err(FamilyError::ConstraintViolated("orphan needs characteristic 2 and d = 3".into()));
        }
        let mut out = self.clone();
        if let Some(t) = fam.tied() {
            let solved = self.solve_tied()?;
            match self.params.get(t) {
                Some(v) if *v != solved => {
                    return Err(FamilyError::ConstraintViolated(format!("{t} = {v}, constraint requires {solved}")));
                }
                _ => {
                    out.params.insert(t.to_string(), solved);
                }
            }
        }
        for p in fam.params() {
            out.get(p)?;
        }
        Ok(out)
    }

    fn solve_tied(&self) -> Result<Elem> {
        let f = &self.field;
        let d = self.d as i64;
        let g = |n: &str| self.get(n);
        Ok(match self.family {
            // r1 r2 = s s* q^{d+1}
            Family::QRacah => {
                let rhs = &(&g("s")? * &g("s_star")?) * &g("q")?.pow(d + 1)?;
                rhs.try_div(&g("r1")?).map_err(|_| FamilyError::ZeroDenominator("r2 from r1".into()))?
            }
            // r1 + r2 = s + s* + d + 1
            Family::Racah => &(&(&g("s")? + &g("s_star")?) + &f.from_i64(d + 1)) - &g("r1")?,
            // r1 + r2 = -s - s* + d + 1
            Family::BannaiIto => &(&f.from_i64(d + 1) - &(&g("s")? + &g("s_star")?)) - &g("r1")?,
            _ => unreachable!("family has no tied parameter"),
        })
    }
}

/// Scalars for one evaluation; `qp(k)` is q^k.
struct Env {
    f: Field,
    d: i64,
    q: Option<Elem>,
    vals: BTreeMap<String, Elem>,
}

impl Env {
    fn new(spec: &FamilySpec) -> Result<Env> {
        let spec = spec.normalized()?;
        let q = if spec.family.has_q() {
            let q = spec.get("q")?;
            if q.is_zero() {
                return Err(FamilyError::ConstraintViolated("q must be nonzero".into()));
            }
            Some(q)
        } else {
            None
        };
        let mut vals = spec.params.clone();
        for k in ["theta0", "theta0_star"] {
            vals.insert(k.to_string(), spec.get(k)?);
        }
        Ok(Env { f: spec.field.clone(), d: spec.d as i64, q, vals })
    }

    fn v(&self, name: &str) -> Elem {
        self.vals[name].clone()
    }

    fn n(&self, k: i64) -> Elem {
        self.f.from_i64(k)
    }

    fn qp(&self, k: i64) -> Elem {
        self.q.as_ref().expect("q family").pow(k).expect("q is nonzero")
    }

    /// 1 - x q^k
    fn om(&self, x: &Elem, k: i64) -> Elem {
        &self.f.one() - &(x * &self.qp(k))
    }

    /// 1 - q^k
    fn omq(&self, k: i64) -> Elem {
        &self.f.one() - &self.qp(k)
    }

    /// The same environment with the listed parameters exchanged.
    fn swapped(&self, pairs: &[(&str, &str)]) -> Env {
        let mut vals = self.vals.clone();
        for (x, y) in pairs {
            let (vx, vy) = (vals.get(*x).cloned(), vals.get(*y).cloned());
            match vy {
                Some(v) => vals.insert(x.to_string(), v),
                None => vals.remove(*x),
            };
            match vx {
                Some(v) => vals.insert(y.to_string(), v),
                None => vals.remove(*y),
            };
        }
        Env { f: self.f.clone(), d: self.d, q: self.q.clone(), vals }
    }
}

fn div(num: Elem, den: Elem, what: &str) -> Result<Elem> {
    num.try_div(&den).map_err(|_| FamilyError::ZeroDenominator(what.to_string()))
}

/// (-1)^k as a field element.
fn sign(e: &Env, k: i64) -> Elem {
    e.n(if k.rem_euclid(2) == 0 { 1 } else { -1 })
}

struct Arrays {
    theta: Vec<Elem>,
    theta_star: Vec<Elem>,
    varphi: Vec<Elem>,
    phi: Vec<Elem>,
}

/// theta0 + h (1 - q^i)(1 - s q^{i+1}) q^{-i}
fn q_racah_eig(e: &Env, t0: &Elem, h: &Elem, s: &Elem, i: i64) -> Elem {
    t0 + &(&(&(h * &e.omq(i)) * &e.om(s, i + 1)) * &e.qp(-i))
}

/// theta0 + h (1 - q^i) q^{-i}
fn q_hahn_eig(e: &Env, t0: &Elem, h: &Elem, i: i64) -> Elem {
    t0 + &(&(h * &e.omq(i)) * &e.qp(-i))
}

/// theta0 + h i (i + 1 + s)
fn racah_eig(e: &Env, t0: &Elem, h: &Elem, s: &Elem, i: i64) -> Elem {
    t0 + &(&(h * &e.n(i)) * &(&e.n(i + 1) + s))
}

/// theta0 + h (s - 1 + (1 - s + 2i)(-1)^i)
fn bi_eig(e: &Env, t0: &Elem, h: &Elem, s: &Elem, i: i64) -> Elem {
    let inner = &(s - &e.n(1)) + &(&(&e.n(1 + 2 * i) - s) * &sign(e, i));
    t0 + &(h * &inner)
}

fn arrays(spec: &FamilySpec) -> Result<Arrays> {
    let e = Env::new(spec)?;
    let d = e.d;
    let (t0, ts0) = (e.v("theta0"), e.v("theta0_star"));
    let g = |n: &str| e.v(n);
    let mut theta = Vec::new();
    let mut theta_star = Vec::new();
    let mut varphi = Vec::new();
    let mut phi = Vec::new();
    let fam = spec.family;
    if fam == Family::Orphan {
        let (h, hs, s, ss, r) = (g("h"), g("h_star"), g("s"), g("s_star"), g("r"));
        let one = e.f.one();
        theta = vec![t0.clone(), &t0 + &(&h * &(&one + &s)), &t0 + &h, &t0 + &(&h * &s)];
        theta_star = vec![ts0.clone(), &ts0 + &(&hs * &(&one + &ss)), &ts0 + &hs, &ts0 + &(&hs * &ss)];
        let hh = &h * &hs;
        let sss = &s * &ss;
        varphi = vec![&hh * &r, hh.clone(), &hh * &(&(&r + &s) + &ss)];
        phi = vec![&hh * &(&(&r + &s) + &sss), hh.clone(), &hh * &(&(&r + &ss) + &sss)];
        return Ok(Arrays { theta, theta_star, varphi, phi });
    }
    for i in 0..=d {
        let (t, ts) = match fam {
            Family::QRacah => (q_racah_eig(&e, &t0, &g("h"), &g("s"), i), q_racah_eig(&e, &ts0, &g("h_star"), &g("s_star"), i)),
            Family::QHahn | Family::QKrawtchouk => {
                (q_hahn_eig(&e, &t0, &g("h"), i), q_racah_eig(&e, &ts0, &g("h_star"), &g("s_star"), i))
            }
            Family::DualQHahn | Family::DualQKrawtchouk => {
                (q_racah_eig(&e, &t0, &g("h"), &g("s"), i), q_hahn_eig(&e, &ts0, &g("h_star"), i))
            }
            Family::QuantumQKrawtchouk => {
                (&t0 - &(&(&g("s") * e.q.as_ref().unwrap()) * &e.omq(i)), q_hahn_eig(&e, &ts0, &g("h_star"), i))
            }
            Family::AffineQKrawtchouk => (q_hahn_eig(&e, &t0, &g("h"), i), q_hahn_eig(&e, &ts0, &g("h_star"), i)),
            Family::Racah => (racah_eig(&e, &t0, &g("h"), &g("s"), i), racah_eig(&e, &ts0, &g("h_star"), &g("s_star"), i)),
            Family::Hahn => (&t0 + &(&g("s") * &e.n(i)), racah_eig(&e, &ts0, &g("h_star"), &g("s_star"), i)),
            Family::DualHahn => (racah_eig(&e, &t0, &g("h"), &g("s"), i), &ts0 + &(&g("s_star") * &e.n(i))),
            Family::Krawtchouk => (&t0 + &(&g("s") * &e.n(i)), &ts0 + &(&g("s_star") * &e.n(i))),
            Family::BannaiIto => (bi_eig(&e, &t0, &g("h"), &g("s"), i), bi_eig(&e, &ts0, &g("h_star"), &g("s_star"), i)),
            Family::Orphan => unreachable!(),
        };
        theta.push(t);
        theta_star.push(ts);
    }
    for i in 1..=d {
        let n = |k: i64| e.n(k);
        // q-side common factor (1 - q^i)(1 - q^{i-d-1}); classical i(i-d-1)
        let qf = || &e.omq(i) * &e.omq(i - d - 1);
        let cf = || &n(i) * &n(i - d - 1);
        let (vp, ph) = match fam {
            Family::QRacah => {
                let (hh, ss, r1, r2) = (&g("h") * &g("h_star"), g("s_star"), g("r1"), g("r2"));
                let base = &(&hh * &e.qp(1 - 2 * i)) * &qf();
                let vp = &(&base * &e.om(&r1, i)) * &e.om(&r2, i);
                let ssq = &ss * &e.qp(i);
                let ph = div(&(&base * &(&r1 - &ssq)) * &(&r2 - &ssq), ss.clone(), "q-Racah phi")?;
                (vp, ph)
            }
            Family::QHahn => {
                let (hh, ss, r) = (&g("h") * &g("h_star"), g("s_star"), g("r"));
                let vp = &(&(&hh * &e.qp(1 - 2 * i)) * &qf()) * &e.om(&r, i);
                let ph = -(&(&(&hh * &e.qp(1 - i)) * &qf()) * &(&r - &(&ss * &e.qp(i))));
                (vp, ph)
            }
            Family::DualQHahn => {
                let (hh, s, r) = (&g("h") * &g("h_star"), g("s"), g("r"));
                let vp = &(&(&hh * &e.qp(1 - 2 * i)) * &qf()) * &e.om(&r, i);
                let ph = &(&(&hh * &e.qp(d + 2 - 2 * i)) * &qf()) * &(&s - &(&r * &e.qp(i - d - 1)));
                (vp, ph)
            }
            Family::QuantumQKrawtchouk => {
                let (hs, s, r) = (g("h_star"), g("s"), g("r"));
                let vp = -(&(&(&r * &hs) * &e.qp(1 - i)) * &qf());
                let ph = &(&(&hs * &e.qp(d + 2 - 2 * i)) * &qf()) * &(&s - &(&r * &e.qp(i - d - 1)));
                (vp, ph)
            }
            Family::QKrawtchouk => {
                let (hh, ss) = (&g("h") * &g("h_star"), g("s_star"));
                let vp = &(&hh * &e.qp(1 - 2 * i)) * &qf();
                let ph = &(&(&hh * &ss) * e.q.as_ref().unwrap()) * &qf();
                (vp, ph)
            }
            Family::AffineQKrawtchouk => {
                let (hh, r) = (&g("h") * &g("h_star"), g("r"));
                let vp = &(&(&hh * &e.qp(1 - 2 * i)) * &qf()) * &e.om(&r, i);
                let ph = -(&(&(&hh * &r) * &e.qp(1 - i)) * &qf());
                (vp, ph)
            }
            Family::DualQKrawtchouk => {
                let (hh, s) = (&g("h") * &g("h_star"), g("s"));
                let vp = &(&hh * &e.qp(1 - 2 * i)) * &qf();
                let ph = &(&(&hh * &s) * &e.qp(d + 2 - 2 * i)) * &qf();
                (vp, ph)
            }
            Family::Racah => {
                let (hh, ss, r1, r2) = (&g("h") * &g("h_star"), g("s_star"), g("r1"), g("r2"));
                let base = &hh * &cf();
                let vp = &(&base * &(&n(i) + &r1)) * &(&n(i) + &r2);
                let ph = &(&base * &(&(&n(i) + &ss) - &r1)) * &(&(&n(i) + &ss) - &r2);
                (vp, ph)
            }
            Family::Hahn => {
                let (hs, s, ss, r) = (g("h_star"), g("s"), g("s_star"), g("r"));
                let base = &(&hs * &s) * &cf();
                let vp = &base * &(&n(i) + &r);
                let ph = -(&base * &(&(&n(i) + &ss) - &r));
                (vp, ph)
            }
            Family::DualHahn => {
                let (h, ss, s, r) = (g("h"), g("s_star"), g("s"), g("r"));
                let base = &(&h * &ss) * &cf();
                let vp = &base * &(&n(i) + &r);
                let ph = &base * &(&(&(&n(i) + &r) - &s) - &n(d + 1));
                (vp, ph)
            }
            Family::Krawtchouk => {
                let (s, ss, r) = (g("s"), g("s_star"), g("r"));
                (&r * &cf(), &(&r - &(&s * &ss)) * &cf())
            }
            Family::BannaiIto => {
                let (hh, ss, r1, r2) = (&g("h") * &g("h_star"), g("s_star"), g("r1"), g("r2"));
                let sid = sign(&e, i + d);
                let si = sign(&e, i);
                let vp = &(&hh * &(&(&(&si * &r2) - &n(2 * i)) - &r2))
                    * &(&(&n(2 * i - d - 1) + &r1) + &(&sid * &(&r1 + &n(d + 1))));
                let left = &(&ss + &r2) + &(&si * &(&(&n(2 * i) - &ss) - &r2));
                let right = &(&(&n(d + 1) - &ss) - &r1) + &(&sid * &(&(&n(2 * i - d - 1) - &ss) - &r1));
                (vp, &(&hh * &left) * &right)
            }
            Family::Orphan => unreachable!(),
        };
        varphi.push(vp);
        phi.push(ph);
    }
    Ok(Arrays { theta, theta_star, varphi, phi })
}

/// The family's parameter array, returned only if it passes validation.
pub fn generate_parray(spec: &FamilySpec) -> Result<ParameterArray> {
    let a = arrays(spec)?;
    let pa = ParameterArray::new(&spec.field, a.theta, a.theta_star, a.varphi, a.phi).map_err(|e| match e {
        ParrayError::Field(f) => FamilyError::Field(f),
        other => FamilyError::Inadmissible(other.to_string()),
    })?;
    let report = pa.validate().map_err(|e| FamilyError::Inadmissible(e.to_string()))?;
    if !report.is_valid() {
        let v: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        return Err(FamilyError::Inadmissible(v.join("; ")));
    }
    Ok(pa)
}

/// b and c for the q-Racah shape with parameters (h, s*, r1, r2).
fn q_racah_bc(e: &Env, h: &Elem, ss: &Elem, r1: &Elem, r2: &Elem) -> Result<(Vec<Elem>, Vec<Elem>)> {
    let d = e.d;
    let mut b = Vec::new();
    let mut c = Vec::new();
    for i in 0..d {
        b.push(if i == 0 {
            div(&(&(h * &e.omq(-d)) * &e.om(r1, 1)) * &e.om(r2, 1), e.om(ss, 2), "b_0")?
        } else {
            let num = &(&(&(h * &e.omq(i - d)) * &e.om(ss, i + 1)) * &e.om(r1, i + 1)) * &e.om(r2, i + 1);
            div(num, &e.om(ss, 2 * i + 1) * &e.om(ss, 2 * i + 2), "b_i")?
        });
    }
    for i in 1..=d {
        let ssq = ss * &e.qp(i);
        let tail = &(r1 - &ssq) * &(r2 - &ssq);
        c.push(if i == d {
            div(&(h * &e.omq(d)) * &tail, &(ss * &e.qp(d)) * &e.om(ss, 2 * d), "c_d")?
        } else {
            let num = &(&(h * &e.omq(i)) * &e.om(ss, i + d + 1)) * &tail;
            let den = &(&(ss * &e.qp(d)) * &e.om(ss, 2 * i)) * &e.om(ss, 2 * i + 1);
            div(num, den, "c_i")?
        });
    }
    Ok((b, c))
}

/// b and c for the q-Hahn shape with parameters (h, s*, r).
fn q_hahn_bc(e: &Env, h: &Elem, ss: &Elem, r: &Elem) -> Result<(Vec<Elem>, Vec<Elem>)> {
    let d = e.d;
    let mut b = Vec::new();
    let mut c = Vec::new();
    for i in 0..d {
        b.push(if i == 0 {
            div(&(h * &e.omq(-d)) * &e.om(r, 1), e.om(ss, 2), "b_0")?
        } else {
            let num = &(&(h * &e.omq(i - d)) * &e.om(ss, i + 1)) * &e.om(r, i + 1);
            div(num, &e.om(ss, 2 * i + 1) * &e.om(ss, 2 * i + 2), "b_i")?
        });
    }
    for i in 1..=d {
        let tail = r - &(ss * &e.qp(i));
        c.push(if i == d {
            div(-(&(h * &e.omq(d)) * &tail), e.om(ss, 2 * d), "c_d")?
        } else {
            let num = -(&(&(&(h * &e.qp(i - d)) * &e.omq(i)) * &e.om(ss, i + d + 1)) * &tail);
            div(num, &e.om(ss, 2 * i) * &e.om(ss, 2 * i + 1), "c_i")?
        });
    }
    Ok((b, c))
}

/// b and c for the q-Krawtchouk shape with parameters (h, s*).
fn q_krawtchouk_bc(e: &Env, h: &Elem, ss: &Elem) -> Result<(Vec<Elem>, Vec<Elem>)> {
    let d = e.d;
    let mut b = Vec::new();
    let mut c = Vec::new();
    for i in 0..d {
        b.push(if i == 0 {
            div(h * &e.omq(-d), e.om(ss, 2), "b_0")?
        } else {
            div(&(h * &e.omq(i - d)) * &e.om(ss, i + 1), &e.om(ss, 2 * i + 1) * &e.om(ss, 2 * i + 2), "b_i")?
        });
    }
    for i in 1..=d {
        c.push(if i == d {
            div(&(&(h * ss) * &e.qp(d)) * &e.omq(d), e.om(ss, 2 * d), "c_d")?
        } else {
            let num = &(&(&(h * ss) * &e.qp(2 * i - d)) * &e.omq(i)) * &e.om(ss, i + d + 1);
            div(num, &e.om(ss, 2 * i) * &e.om(ss, 2 * i + 1), "c_i")?
        });
    }
    Ok((b, c))
}

/// b and c for the Racah shape with parameters (h, s*, r1, r2).
fn racah_bc(e: &Env, h: &Elem, ss: &Elem, r1: &Elem, r2: &Elem) -> Result<(Vec<Elem>, Vec<Elem>)> {
    let d = e.d;
    let n = |k: i64| e.n(k);
    let mut b = Vec::new();
    let mut c = Vec::new();
    for i in 0..d {
        b.push(if i == 0 {
            div(&(&(h * &n(-d)) * &(&n(1) + r1)) * &(&n(1) + r2), &n(2) + ss, "b_0")?
        } else {
            let num = &(&(&(h * &n(i - d)) * &(&n(i + 1) + ss)) * &(&n(i + 1) + r1)) * &(&n(i + 1) + r2);
            div(num, &(&n(2 * i + 1) + ss) * &(&n(2 * i + 2) + ss), "b_i")?
        });
    }
    for i in 1..=d {
        let tail = &(&(&n(i) + ss) - r1) * &(&(&n(i) + ss) - r2);
        c.push(if i == d {
            div(&(h * &n(d)) * &tail, &n(2 * d) + ss, "c_d")?
        } else {
            let num = &(&(h * &n(i)) * &(&n(i + d + 1) + ss)) * &tail;
            div(num, &(&n(2 * i) + ss) * &(&n(2 * i + 1) + ss), "c_i")?
        });
    }
    Ok((b, c))
}

/// b and c for the Hahn shape with parameters (s, s*, r).
fn hahn_bc(e: &Env, s: &Elem, ss: &Elem, r: &Elem) -> Result<(Vec<Elem>, Vec<Elem>)> {
    let d = e.d;
    let n = |k: i64| e.n(k);
    let mut b = Vec::new();
    let mut c = Vec::new();
    for i in 0..d {
        b.push(if i == 0 {
            div(-(&(s * &n(d)) * &(&n(1) + r)), &n(2) + ss, "b_0")?
        } else {
            let num = &(&(s * &n(i - d)) * &(&n(i + 1) + ss)) * &(&n(i + 1) + r);
            div(num, &(&n(2 * i + 1) + ss) * &(&n(2 * i + 2) + ss), "b_i")?
        });
    }
    for i in 1..=d {
        let tail = &(&n(i) + ss) - r;
        c.push(if i == d {
            div(-(&(s * &n(d)) * &tail), &n(2 * d) + ss, "c_d")?
        } else {
            let num = -(&(&(s * &n(i)) * &(&n(i + d + 1) + ss)) * &tail);
            div(num, &(&n(2 * i) + ss) * &(&n(2 * i + 1) + ss), "c_i")?
        });
    }
    Ok((b, c))
}

/// b_i = h (i - d)(i + 1 + r), c_i = h i (i - d - 1 - s + r).
fn dual_hahn_bc(e: &Env, h: &Elem, s: &Elem, r: &Elem) -> (Vec<Elem>, Vec<Elem>) {
    let d = e.d;
    let n = |k: i64| e.n(k);
    let b = (0..d).map(|i| &(h * &n(i - d)) * &(&n(i + 1) + r)).collect();
    let c = (1..=d).map(|i| &(h * &n(i)) * &(&(&n(i - d - 1) - s) + r)).collect();
    (b, c)
}

/// b_i = h (1 - q^{i-d})(1 - r q^{i+1}), c_i = h (1 - q^i)(q s - r q^{i-d}).
fn dual_q_hahn_bc(e: &Env, h: &Elem, s: &Elem, r: &Elem) -> (Vec<Elem>, Vec<Elem>) {
    let d = e.d;
    let q = e.q.as_ref().unwrap();
    let b = (0..d).map(|i| &(h * &e.omq(i - d)) * &e.om(r, i + 1)).collect();
    let c = (1..=d).map(|i| &(h * &e.omq(i)) * &(&(q * s) - &(r * &e.qp(i - d)))).collect();
    (b, c)
}

/// Bannai/Ito b and c with parameters (h, s*, r1, r2), single-expression form.
fn bannai_ito_bc(e: &Env, h: &Elem, ss: &Elem, r1: &Elem, r2: &Elem) -> Result<(Vec<Elem>, Vec<Elem>)> {
    let d = e.d;
    let n = |k: i64| e.n(k);
    let mut b = Vec::new();
    let mut c = Vec::new();
    for i in 0..d {
        let si = sign(e, i);
        let sid = sign(e, i + d);
        let left = h * &(&(&(&n(2 * i + 2) + r2) - ss) + &(&si * &(r2 + ss)));
        let right = &(&n(2 * i - d + 1) + r1) - &(&sid * &(r1 + &n(d + 1)));
        b.push(div(&left * &right, &n(2) * &(&n(2 * i + 2) - ss), "b_i")?);
    }
    for i in 1..=d {
        let si = sign(e, i);
        let sid = sign(e, i + d);
        let left = -(h * &(&(&(&n(2 * i) - r2) - ss) + &(&si * &(r2 + ss))));
        let right = &(&(&(&n(2 * i + d + 1) - ss) - ss) - r1) - &(&sid * &(r1 + &n(d + 1)));
        c.push(div(&left * &right, &n(2) * &(&n(2 * i) - ss), "c_i")?);
    }
    Ok((b, c))
}

fn orphan_bc(e: &Env, h: &Elem, s: &Elem, ss: &Elem, r: &Elem) -> Result<(Vec<Elem>, Vec<Elem>)> {
    let one = e.f.one();
    let p1 = &one + ss;
    let sss = s * ss;
    let b = vec![
        div(h * r, p1.clone(), "b_0")?,
        div(h * &p1, ss.clone(), "b_1")?,
        div(h * &(&(r + s) + ss), p1.clone(), "b_2")?,
    ];
    let c = vec![
        div(h * &(&(r + s) + &sss), p1.clone(), "c_1")?,
        div(h * &p1, ss.clone(), "c_2")?,
        div(h * &(&(r + ss) + &sss), p1, "c_3")?,
    ];
    Ok((b, c))
}

fn family_bc(fam: Family, e: &Env) -> Result<((Vec<Elem>, Vec<Elem>), (Vec<Elem>, Vec<Elem>))> {
    let g = |n: &str| e.v(n);
    let hs = [("h", "h_star"), ("s", "s_star")];
    Ok(match fam {
        Family::QRacah => {
            let f = |e: &Env| q_racah_bc(e, &e.v("h"), &e.v("s_star"), &e.v("r1"), &e.v("r2"));
            (f(e)?, f(&e.swapped(&hs))?)
        }
        Family::QHahn => {
            let (h, hs_, ss, r) = (g("h"), g("h_star"), g("s_star"), g("r"));
            (q_hahn_bc(e, &h, &ss, &r)?, dual_q_hahn_bc(e, &hs_, &ss, &r))
        }
        Family::DualQHahn => {
            let (h, hs_, s, r) = (g("h"), g("h_star"), g("s"), g("r"));
            (dual_q_hahn_bc(e, &h, &s, &r), q_hahn_bc(e, &hs_, &s, &r)?)
        }
        Family::QuantumQKrawtchouk => {
            let (hs_, s, r) = (g("h_star"), g("s"), g("r"));
            let q = e.q.as_ref().unwrap();
            let d = e.d;
            let b = (0..d).map(|i| -(&(&r * &e.qp(i + 1)) * &e.omq(i - d))).collect();
            let c = (1..=d).map(|i| &e.omq(i) * &(&(q * &s) - &(&r * &e.qp(i - d)))).collect();
            let mut bs = Vec::new();
            for i in 0..d {
                bs.push(div(&(&hs_ * &r) * &e.omq(i - d), &s * &e.qp(2 * i + 1), "b*_i")?);
            }
            let mut cs = Vec::new();
            for i in 1..=d {
                cs.push(div(&(&hs_ * &e.omq(i)) * &(&r - &(&s * &e.qp(i))), &s * &e.qp(2 * i), "c*_i")?);
            }
            ((b, c), (bs, cs))
        }
        Family::QKrawtchouk => {
            let (h, hs_, ss) = (g("h"), g("h_star"), g("s_star"));
            let d = e.d;
            let bs = (0..d).map(|i| &hs_ * &e.omq(i - d)).collect();
            let cs = (1..=d).map(|i| &(&(&hs_ * &ss) * e.q.as_ref().unwrap()) * &e.omq(i)).collect();
            (q_krawtchouk_bc(e, &h, &ss)?, (bs, cs))
        }
        Family::AffineQKrawtchouk => {
            let f = |e: &Env| {
                let (h, r) = (e.v("h"), e.v("r"));
                let d = e.d;
                let b: Vec<Elem> = (0..d).map(|i| &(&h * &e.omq(i - d)) * &e.om(&r, i + 1)).collect();
                let c: Vec<Elem> = (1..=d).map(|i| -(&(&(&h * &r) * &e.qp(i - d)) * &e.omq(i))).collect();
                (b, c)
            };
            (f(e), f(&e.swapped(&[("h", "h_star")])))
        }
        Family::DualQKrawtchouk => {
            let (h, hs_, s) = (g("h"), g("h_star"), g("s"));
            let d = e.d;
            let b = (0..d).map(|i| &h * &e.omq(i - d)).collect();
            let c = (1..=d).map(|i| &(&(&h * &s) * e.q.as_ref().unwrap()) * &e.omq(i)).collect();
            ((b, c), q_krawtchouk_bc(e, &hs_, &s)?)
        }
        Family::Racah => {
            let f = |e: &Env| racah_bc(e, &e.v("h"), &e.v("s_star"), &e.v("r1"), &e.v("r2"));
            (f(e)?, f(&e.swapped(&hs))?)
        }
        Family::Hahn => {
            let (s, hs_, ss, r) = (g("s"), g("h_star"), g("s_star"), g("r"));
            (hahn_bc(e, &s, &ss, &r)?, dual_hahn_bc(e, &hs_, &ss, &r))
        }
        Family::DualHahn => {
            let (h, s, ss, r) = (g("h"), g("s"), g("s_star"), g("r"));
            (dual_hahn_bc(e, &h, &s, &r), hahn_bc(e, &ss, &s, &r)?)
        }
        Family::Krawtchouk => {
            let f = |e: &Env| -> Result<(Vec<Elem>, Vec<Elem>)> {
                let (s, ss, r) = (e.v("s"), e.v("s_star"), e.v("r"));
                let d = e.d;
                let mut b = Vec::new();
                for i in 0..d {
                    b.push(div(&r * &e.n(i - d), ss.clone(), "b_i")?);
                }
                let mut c = Vec::new();
                for i in 1..=d {
                    c.push(div(&e.n(i) * &(&r - &(&s * &ss)), ss.clone(), "c_i")?);
                }
                Ok((b, c))
            };
            (f(e)?, f(&e.swapped(&[("s", "s_star")]))?)
        }
        Family::BannaiIto => {
            let f = |e: &Env| bannai_ito_bc(e, &e.v("h"), &e.v("s_star"), &e.v("r1"), &e.v("r2"));
            (f(e)?, f(&e.swapped(&hs))?)
        }
        Family::Orphan => {
            let f = |e: &Env| orphan_bc(e, &e.v("h"), &e.v("s"), &e.v("s_star"), &e.v("r"));
            (f(e)?, f(&e.swapped(&hs))?)
        }
    })
}

/// Intersection numbers from the family's displayed formulas; the diagonal
/// comes from the row sums.
pub fn closed_intersection(spec: &FamilySpec) -> Result<IntersectionData> {
    let e = Env::new(spec)?;
    let ((b, c), (b_star, c_star)) = family_bc(spec.family, &e)?;
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
        a: fill(&e.v("theta0"), &b, &c),
        a_star: fill(&e.v("theta0_star"), &b_star, &c_star),
        b,
        c,
        b_star,
        c_star,
    })
}

/// Bannai/Ito quantities from the case-by-parity displays.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityForms {
    pub theta: Vec<Elem>,
    pub theta_star: Vec<Elem>,
    pub varphi: Vec<Elem>,
    pub phi: Vec<Elem>,
    pub b: Vec<Elem>,
    pub c: Vec<Elem>,
    pub b_star: Vec<Elem>,
    pub c_star: Vec<Elem>,
}

pub fn bannai_ito_parity_forms(spec: &FamilySpec) -> Result<ParityForms> {
    if spec.family != Family::BannaiIto {
        return Err(FamilyError::ConstraintViolated("parity forms exist for bannai-ito only".into()));
    }
    let e = Env::new(spec)?;
    let d = e.d;
    let n = |k: i64| e.n(k);
    let (h, hs, s, ss, r1, r2) = (e.v("h"), e.v("h_star"), e.v("s"), e.v("s_star"), e.v("r1"), e.v("r2"));
    let eig = |t0: &Elem, h: &Elem, s: &Elem, i: i64| {
        if i % 2 == 0 {
            t0 + &(&n(2) * &(h * &n(i)))
        } else {
            t0 + &(&n(2) * &(h * &(&(s - &n(i)) - &n(1))))
        }
    };
    let theta = (0..=d).map(|i| eig(&e.v("theta0"), &h, &s, i)).collect();
    let theta_star = (0..=d).map(|i| eig(&e.v("theta0_star"), &hs, &ss, i)).collect();
    let hh4 = &n(4) * &(&h * &hs);
    let mut varphi = Vec::new();
    let mut phi = Vec::new();
    for i in 1..=d {
        let ni = n(i);
        let (vp, ph) = match (i % 2 == 0, d % 2 == 0) {
            (true, true) => (-(&(&hh4 * &ni) * &(&ni + &r1)), &(&hh4 * &ni) * &(&(&ni - &ss) - &r1)),
            (false, true) => {
                (-(&(&hh4 * &n(i - d - 1)) * &(&ni + &r2)), &(&hh4 * &n(i - d - 1)) * &(&(&ni - &ss) - &r2))
            }
            (true, false) => (-(&(&hh4 * &ni) * &n(i - d - 1)), -(&(&hh4 * &ni) * &n(i - d - 1))),
            (false, false) => (
                -(&(&hh4 * &(&ni + &r1)) * &(&ni + &r2)),
                -(&(&hh4 * &(&(&ni - &ss) - &r1)) * &(&(&ni - &ss) - &r2)),
            ),
        };
        varphi.push(vp);
        phi.push(ph);
    }
    let bc = |h: &Elem, ss: &Elem| -> Result<(Vec<Elem>, Vec<Elem>)> {
        let mut b = Vec::new();
        for i in 0..d {
            let ni1 = n(i + 1);
            let num = match (i % 2 == 0, d % 2 == 0) {
                (true, true) => &n(i - d) * &(&ni1 + &r2),
                (false, true) => &(&ni1 - ss) * &(&ni1 + &r1),
                (true, false) => &(&ni1 + &r1) * &(&ni1 + &r2),
                (false, false) => &n(i - d) * &(&ni1 - ss),
            };
            b.push(div(&(&n(2) * h) * &num, &n(2 * i + 2) - ss, "parity b_i")?);
        }
        let mut c = Vec::new();
        for i in 1..=d {
            let ni = n(i);
            let num = match (i % 2 == 0, d % 2 == 0) {
                (true, true) => &ni * &(&(&ni - ss) - &r1),
                (false, true) => &(&n(i + d + 1) - ss) * &(&(&ni - ss) - &r2),
                (true, false) => &ni * &(&n(i + d + 1) - ss),
                (false, false) => &(&(&ni - ss) - &r1) * &(&(&ni - ss) - &r2),
            };
            c.push(div(-(&(&n(2) * h) * &num), &n(2 * i) - ss, "parity c_i")?);
        }
        Ok((b, c))
    };
    let (b, c) = bc(&h, &ss)?;
    let (b_star, c_star) = bc(&hs, &s)?;
    Ok(ParityForms { theta, theta_star, varphi, phi, b, c, b_star, c_star })
}

/// Candidate values for sampled parameters.
pub fn candidate_values(field: &Field) -> Vec<Elem> {
    if let Some(all) = field.elements(4096) {
        return all;
    }
    let mut out = Vec::new();
    for k in 1..=6 {
        out.push(field.from_i64(k));
        out.push(field.from_i64(-k));
    }
    for (n, m) in [(1, 2), (1, 3), (2, 3), (3, 2)] {
        out.push(field.from_ratio(n, m).expect("nonzero denominator"));
        out.push(field.from_ratio(-n, m).expect("nonzero denominator"));
    }
    out
}

/// Seeded generate-and-validate search for admissible specs; duplicates are
/// dropped.
pub fn sample_admissible(family: Family, d: usize, field: &Field, seed: u64, count: usize) -> Result<Vec<FamilySpec>> {
    let budget = 400 * count.max(1) + 2000;
    if family == Family::Orphan && (field.characteristic() != 2 || d != 3) {
        return Err(FamilyError::ExhaustedSearch(0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = candidate_values(field);
    let mut offsets = values.clone();
    offsets.push(field.zero());
    let mut found: Vec<FamilySpec> = Vec::new();
    for _ in 0..budget {
        if found.len() == count {
            break;
        }
        let mut params = BTreeMap::new();
        for p in family.params() {
            if Some(*p) == family.tied() {
                continue;
            }
            params.insert(p.to_string(), values.choose(&mut rng).expect("nonempty").clone());
        }
        for p in ["theta0", "theta0_star"] {
            params.insert(p.to_string(), offsets.choose(&mut rng).expect("nonempty").clone());
        }
        let spec = match FamilySpec::new(family, d, field, params).normalized() {
            Ok(s) => s,
            Err(_) => continue,
        };
        if found.contains(&spec) {
            continue;
        }
        if generate_parray(&spec).is_ok() && closed_intersection(&spec).is_ok() {
            found.push(spec);
        }
    }
    if found.is_empty() {
        return Err(FamilyError::ExhaustedSearch(budget));
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(fam: Family, d: usize, f: &Field, kv: &[(&str, i64)]) -> FamilySpec {
        let params = kv.iter().map(|(k, v)| (k.to_string(), f.from_i64(*v))).collect();
        FamilySpec::new(fam, d, f, params)
    }

    #[test]
    fn krawtchouk_running_example() {
        let f = Field::rationals();
        let s = spec(Family::Krawtchouk, 2, &f, &[("s", 1), ("s_star", 1), ("r", 2)]);
        let pa = generate_parray(&s).unwrap();
        assert_eq!(pa, ParameterArray::from_ints(&f, &[0, 1, 2], &[0, 1, 2], &[-4, -4], &[-2, -2]).unwrap());
        let data = closed_intersection(&s).unwrap();
        let b: Vec<String> = data.b.iter().map(|e| e.to_string()).collect();
        let c: Vec<String> = data.c.iter().map(|e| e.to_string()).collect();
        assert_eq!(b, ["-4", "-2"]);
        assert_eq!(c, ["1", "2"]);
    }

    #[test]
    fn q_racah_constraint() {
        let f = Field::rationals();
        let s = spec(Family::QRacah, 2, &f, &[("q", 2), ("h", 1), ("h_star", 1), ("s", 1), ("s_star", 1), ("r1", 1), ("r2", 1)]);
        assert!(matches!(generate_parray(&s), Err(FamilyError::ConstraintViolated(_))));
    }

    #[test]
    fn orphan_needs_char_two() {
        let f = Field::rationals();
        let s = spec(Family::Orphan, 3, &f, &[("h", 1), ("h_star", 1), ("s", 2), ("s_star", 2), ("r", 1)]);
        assert!(matches!(generate_parray(&s), Err(FamilyError::ConstraintViolated(_))));
        assert!(matches!(sample_admissible(Family::Orphan, 3, &f, 1, 3), Err(FamilyError::ExhaustedSearch(_))));
        let gf2 = Field::prime(2).unwrap();
        assert!(matches!(sample_admissible(Family::Orphan, 3, &gf2, 1, 3), Err(FamilyError::ExhaustedSearch(_))));
        let gf4 = Field::from_descriptor("GF:2:1,1,1").unwrap();
        let got = sample_admissible(Family::Orphan, 3, &gf4, 9, 5).unwrap();
        assert_eq!(got.len(), 5);
        for s in &got {
            for k in ["s", "s_star"] {
                let v = s.get(k).unwrap();
                assert!(!v.is_zero() && !v.is_one());
            }
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let f = Field::prime(13).unwrap();
        let a = sample_admissible(Family::QRacah, 4, &f, 7, 3).unwrap();
        let b = sample_admissible(Family::QRacah, 4, &f, 7, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 3);
    }
}
