//! Runs every check on one parameter array and collects the results in a fixed
//! order. Suites after `validation` need a valid array and are skipped
//! otherwise.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::intersection::{
    brute_intersection, closed_forms, diff, duality_identity_suite, recurrence_identity_suite, IntersectionData, Method,
};
use crate::parray::ParameterArray;
use crate::system::{
    build_split, cross_check_diagonal, dagger_conjugator, extract_parray, is_normalizing, normalizing_by_rank,
    split_sum_failures, td_coefficients, verify_leonard, wraparound_check, Realization, Which,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Validation,
    LeonardAxioms,
    Td,
    WrapAround,
    Dagger,
    IntersectionOracle,
    Duality,
    Recurrence,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Validation,
        Suite::LeonardAxioms,
        Suite::Td,
        Suite::WrapAround,
        Suite::Dagger,
        Suite::IntersectionOracle,
        Suite::Duality,
        Suite::Recurrence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Validation => "validation",
            Suite::LeonardAxioms => "leonard-axioms",
            Suite::Td => "td",
            Suite::WrapAround => "wrap-around",
            Suite::Dagger => "dagger",
            Suite::IntersectionOracle => "intersection-oracle",
            Suite::Duality => "duality",
            Suite::Recurrence => "recurrence",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Suite, String> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub status: Status,
    pub checks: usize,
    pub witnesses: Vec<String>,
}

impl SuiteResult {
    fn from_failures(suite: Suite, checks: usize, witnesses: Vec<String>) -> SuiteResult {
        let status = if witnesses.is_empty() { Status::Pass } else { Status::Fail };
        SuiteResult { suite: suite.name().to_string(), status, checks, witnesses }
    }

    fn skipped(suite: Suite, why: &str) -> SuiteResult {
        SuiteResult { suite: suite.name().to_string(), status: Status::Skipped, checks: 0, witnesses: vec![why.to_string()] }
    }
}

/// Shared inputs for the suites that need a realization.
struct Prepared<'a> {
    pa: &'a ParameterArray,
    expected: Option<&'a IntersectionData>,
    real: Result<Realization, String>,
    brute: Result<IntersectionData, String>,
}

fn run_one(s: Suite, p: &Prepared) -> SuiteResult {
    let pa = p.pa;
    let real = match (&p.real, s) {
        (_, Suite::Validation) => return validation(pa),
        (Ok(r), _) => r,
        (Err(e), Suite::LeonardAxioms) => return SuiteResult::from_failures(s, 1, vec![format!("build_split: {e}")]),
        (Err(_), _) => return SuiteResult::skipped(s, "no realization"),
    };
    let d = pa.d();
    let mut w = Vec::new();
    let mut checks = 0;
    match s {
        Suite::Validation => unreachable!(),
        Suite::LeonardAxioms => {
            checks += 1;
            w.extend(verify_leonard(real).failures);
            checks += 1;
            match extract_parray(real) {
                Ok(back) if back == *pa => {}
                Ok(_) => w.push("extracted parameter array differs from the input".into()),
                Err(e) => w.push(format!("extract_parray: {e}")),
            }
            checks += 1;
            match cross_check_diagonal(real, pa) {
                Ok(diag) => {
                    checks += 1;
                    w.extend(split_sum_failures(pa, &diag));
                }
                Err(e) => w.push(format!("diagonal sequences: {e}")),
            }
            for which in [Which::EStar0, Which::E0] {
                checks += 1;
                if !is_normalizing(real, which) || !normalizing_by_rank(real, which) {
                    w.push(format!("{which:?} is not normalizing"));
                }
            }
        }
        Suite::Td => {
            checks += 1;
            if let Err(e) = td_coefficients(real) {
                w.push(e.to_string());
            }
        }
        Suite::WrapAround => {
            if d < 2 {
                return SuiteResult::skipped(s, "needs d >= 2");
            }
            checks += 2;
            match wraparound_check(real) {
                Ok(r) => {
                    if !r.holds {
                        w.push("wrap-around identity fails".into());
                    }
                    if !r.dual_holds {
                        w.push("dual wrap-around identity fails".into());
                    }
                }
                Err(e) => w.push(e.to_string()),
            }
        }
        Suite::Dagger => {
            checks += 1;
            match dagger_conjugator(real) {
                Ok(k) => w.extend(k.failures(real)),
                Err(e) => w.push(e.to_string()),
            }
        }
        Suite::IntersectionOracle => {
            let brute = match &p.brute {
                Ok(b) => b,
                Err(e) => return SuiteResult::from_failures(s, 1, vec![format!("brute force: {e}")]),
            };
            checks += 1;
            w.extend(brute.invariant_failures(&pa.theta[0], &pa.theta_star[0]));
            for m in Method::ALL {
                if d < m.min_d() {
                    continue;
                }
                checks += 1;
                match closed_forms(pa, m) {
                    Ok(c) => w.extend(diff(m.name(), brute, &c)),
                    Err(e) => w.push(format!("{m}: {e}")),
                }
            }
            if let Some(x) = p.expected {
                checks += 1;
                w.extend(diff("expected", brute, x));
            }
        }
        Suite::Duality | Suite::Recurrence => {
            let brute = match &p.brute {
                Ok(b) => b,
                Err(e) => return SuiteResult::from_failures(s, 1, vec![format!("brute force: {e}")]),
            };
            let rep = if s == Suite::Duality {
                duality_identity_suite(pa, brute)
            } else {
                recurrence_identity_suite(pa, brute)
            };
            checks += rep.checked;
            w.extend(rep.failures);
        }
    }
    SuiteResult::from_failures(s, checks, w)
}

fn validation(pa: &ParameterArray) -> SuiteResult {
    match pa.validate() {
        Ok(rep) => SuiteResult::from_failures(Suite::Validation, 5, rep.violations.iter().map(|v| v.to_string()).collect()),
        Err(e) => SuiteResult::from_failures(Suite::Validation, 1, vec![e.to_string()]),
    }
}

/// Runs `selected` (all suites when empty) in the fixed order. With
/// `parallel`, independent suites run on scoped threads; the result order is
/// the same either way.
pub fn run_suites(
    pa: &ParameterArray,
    expected: Option<&IntersectionData>,
    selected: &[Suite],
    parallel: bool,
) -> Vec<SuiteResult> {
    let mut chosen: Vec<Suite> = if selected.is_empty() { Suite::ALL.to_vec() } else { selected.to_vec() };
    chosen.sort();
    chosen.dedup();
    let valid = pa.is_valid();
    let needs_real = chosen.iter().any(|&s| s != Suite::Validation);
    let real = if valid && needs_real {
        build_split(pa).map_err(|e| e.to_string())
    } else {
        Err("parameter array is invalid".to_string())
    };
    let needs_brute = chosen
        .iter()
        .any(|s| matches!(s, Suite::IntersectionOracle | Suite::Duality | Suite::Recurrence));
    let brute = match &real {
        Ok(r) if needs_brute => brute_intersection(r).map_err(|e| e.to_string()),
        _ => Err("not computed".to_string()),
    };
    let prep = Prepared { pa, expected, real, brute };
    let run = |s: Suite| {
        if s != Suite::Validation && !valid {
            return SuiteResult::skipped(s, "parameter array is invalid");
        }
        run_one(s, &prep)
    };
    if parallel {
        std::thread::scope(|scope| {
            let handles: Vec<_> = chosen.iter().map(|&s| scope.spawn(move || run(s))).collect();
            handles.into_iter().map(|h| h.join().expect("suite thread panicked")).collect()
        })
    } else {
        chosen.into_iter().map(run).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    fn sample() -> ParameterArray {
        ParameterArray::from_ints(&Field::rationals(), &[0, 1, 2], &[0, 1, 2], &[-4, -4], &[-2, -2]).unwrap()
    }

    #[test]
    fn all_pass_in_order() {
        let res = run_suites(&sample(), None, &[], false);
        let names: Vec<&str> = res.iter().map(|r| r.suite.as_str()).collect();
        assert_eq!(names, Suite::ALL.map(|s| s.name()));
        assert!(res.iter().all(|r| r.status == Status::Pass), "{res:?}");
        assert_eq!(res, run_suites(&sample(), None, &[], true));
    }

    #[test]
    fn invalid_input_skips_the_rest() {
        let mut pa = sample();
        pa.varphi[1] = pa.field.from_i64(5);
        let res = run_suites(&pa, None, &[], false);
        assert_eq!(res[0].status, Status::Fail);
        assert!(res[1..].iter().all(|r| r.status == Status::Skipped));
    }
}
