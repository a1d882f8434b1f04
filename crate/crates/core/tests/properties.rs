use proptest::prelude::*;

use leonard::families::{generate_parray, sample_admissible, Family, FamilySpec};
use leonard::field::{Elem, Field};
use leonard::matrix::{primitive_idempotents, Matrix};
use leonard::parray::{complete_from_varphi1, vartheta_of, D4Word, Gen, ParameterArray};
use leonard::poly::{tau, tau_at};
use leonard::recurrence::{
    classify_recurrence, detect_beta, fit_gamma, fit_gamma_rho, scaled_sum_characterisation, symmetric_ratio, Beta,
    Level,
};
use leonard::system::{
    build_split, diagonal_sequences, four_conditions, is_normalizing, lower_split, normalizing_by_rank,
    td_commutator, td_coefficients, upper_split, Realization, Which,
};

fn fields() -> Vec<Field> {
    ["Q", "GF:13", "GF:101", "GF:2:1,1,1", "GF:3:2,2,1"]
        .iter()
        .map(|d| Field::from_descriptor(d).unwrap())
        .collect()
}

/// An element drawn from a small integer range (or a ratio over Q).
fn elem(f: &Field, n: i64, m: i64, coeffs: &[u64]) -> Elem {
    match f.order() {
        None => f.from_ratio(n, if m == 0 { 1 } else { m }).unwrap(),
        Some(_) if coeffs.len() > 1 && f.characteristic() as u128 != f.order().unwrap() => {
            let p = f.characteristic();
            let k = f.order().unwrap().ilog(p as u128) as usize;
            let cs: Vec<u64> = coeffs.iter().take(k).map(|c| c % p).collect();
            f.from_coeffs(&cs).unwrap()
        }
        Some(_) => f.from_i64(n),
    }
}

fn arb_elem() -> impl Strategy<Value = (i64, i64, Vec<u64>)> {
    (-50i64..50, -7i64..8, proptest::collection::vec(0u64..100, 2))
}

/// A sampled family instance; None when the field cannot host it.
fn instance(fam_idx: usize, d: usize, field_idx: usize, seed: u64) -> Option<(FamilySpec, ParameterArray)> {
    let fam = Family::ALL[fam_idx % Family::ALL.len()];
    let fs = ["Q", "GF:101", "GF:13", "GF:2:1,1,1"];
    let f = Field::from_descriptor(fs[field_idx % fs.len()]).unwrap();
    let d = if fam == Family::Orphan { 3 } else { d };
    let spec = sample_admissible(fam, d, &f, seed, 1).ok()?.pop()?;
    let pa = generate_parray(&spec).ok()?;
    Some((spec, pa))
}

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(cfg(200))]

    #[test]
    fn field_axioms(fi in 0usize..5, x in arb_elem(), y in arb_elem(), z in arb_elem()) {
        let f = &fields()[fi];
        let (a, b, c) = (elem(f, x.0, x.1, &x.2), elem(f, y.0, y.1, &y.2), elem(f, z.0, z.1, &z.2));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &f.zero(), a.clone());
        prop_assert_eq!(&a * &f.one(), a.clone());
        prop_assert!((&a + &(-&a)).is_zero());
        if !a.is_zero() {
            let inv = a.inverse().unwrap();
            prop_assert!((&a * &inv).is_one());
            prop_assert_eq!(inv.inverse().unwrap(), a.clone());
        } else {
            prop_assert!(a.inverse().is_err());
        }
        prop_assert_eq!(f.parse(&a.to_string()).unwrap(), a.clone());
    }

    #[test]
    fn characteristic_kills_one(fi in 0usize..5) {
        let f = &fields()[fi];
        let p = f.characteristic();
        if p == 0 {
            for n in 1..200 {
                prop_assert!(!f.from_i64(n).is_zero());
            }
        } else {
            prop_assert!(f.from_i64(p as i64).is_zero());
            prop_assert!(!f.from_i64(1).is_zero());
        }
    }
}

proptest! {
    #![proptest_config(cfg(64))]

    #[test]
    fn spectral_decomposition(fi in 0usize..3, n in 1usize..5, seed in proptest::collection::vec(-9i64..10, 32)) {
        let f = &fields()[fi];
        // eigenvalues 0, 1, ..., n-1 (distinct in every field used), conjugated
        // by a unipotent upper-triangular S
        let eigs: Vec<Elem> = (0..n as i64).map(|i| f.from_i64(i)).collect();
        let mut k = 0;
        let s = Matrix::from_fn(f, n, |i, j| {
            k += 1;
            match i.cmp(&j) {
                std::cmp::Ordering::Equal => f.one(),
                std::cmp::Ordering::Less => f.from_i64(seed[k % seed.len()]),
                _ => f.zero(),
            }
        });
        let m = s.inverse().unwrap().mul(&Matrix::diagonal(f, &eigs)).mul(&s);
        prop_assert_eq!(s.mul(&s.inverse().unwrap()), Matrix::identity(f, n));
        prop_assert_eq!(s.inverse().unwrap().mul(&s), Matrix::identity(f, n));
        let es = primitive_idempotents(&m, &eigs).unwrap();
        let sum = es.iter().fold(Matrix::zero(f, n), |acc, e| acc.add(e));
        prop_assert_eq!(sum, Matrix::identity(f, n));
        for r in 0..4 {
            let want = es.iter().zip(&eigs).fold(Matrix::zero(f, n), |acc, (e, t)| acc.add(&e.scale(&t.pow(r as i64).unwrap())));
            prop_assert_eq!(m.pow(r), want);
        }
        let annih = eigs.iter().fold(Matrix::identity(f, n), |acc, t| acc.mul(&m.sub(&Matrix::identity(f, n).scale(t))));
        prop_assert!(annih.is_zero());
    }

    #[test]
    fn d4_orbit(fam in 0usize..13, d in 1usize..6, fi in 0usize..4, seed in 0u64..1000) {
        let Some((_, pa)) = instance(fam, d, fi, seed) else { return Ok(()) };
        let d = pa.d();
        let orbit = pa.orbit();
        prop_assert!(8 % orbit.len() == 0);
        for x in &orbit {
            prop_assert!(x.is_valid());
        }
        prop_assert_eq!(pa.relative(Gen::Star).relative(Gen::Star), pa.clone());
        let a: D4Word = "down.star".parse().unwrap();
        let b: D4Word = "star.Down".parse().unwrap();
        prop_assert_eq!(pa.transform(&a), pa.transform(&b));
        let back = complete_from_varphi1(&pa.varphi[0], &pa.theta, &pa.theta_star).unwrap();
        prop_assert_eq!(back, pa.clone());
        let vt = vartheta_of(&pa);
        for i in 0..=d + 1 {
            prop_assert_eq!(&vt[i], &vt[d + 1 - i]);
        }
    }

    #[test]
    fn recurrence_properties(fam in 0usize..13, d in 3usize..8, fi in 0usize..4, seed in 0u64..1000) {
        let Some((spec, pa)) = instance(fam, d, fi, seed) else { return Ok(()) };
        let q = spec.family.has_q().then(|| spec.get("q").unwrap());
        let d = pa.d();
        let th = &pa.theta;
        let beta = match detect_beta(th).unwrap().beta {
            Beta::Value(b) => b,
            Beta::Unconstrained => unreachable!("d >= 3"),
        };
        prop_assert!(classify_recurrence(th, &Level::Beta(beta.clone())));
        let gamma = fit_gamma(th, &beta).unwrap();
        prop_assert!(classify_recurrence(th, &Level::BetaGamma(beta.clone(), gamma.clone())));
        let (g2, rho) = fit_gamma_rho(th, &beta).unwrap();
        prop_assert_eq!(&g2, &gamma);
        prop_assert!(classify_recurrence(th, &Level::BetaGammaRho(beta.clone(), gamma, rho)));
        let n = d + 1;
        let mut checked = 0;
        for i in 0..n {
            for j in 0..n {
                for r in 0..n {
                    if i + j < r || r == i + j - r { continue; }
                    let s = i + j - r;
                    if s >= n { continue; }
                    if let Ok(pred) = symmetric_ratio(&pa.field, &beta, q.as_ref(), i, j, r, s) {
                        let direct = (&th[i] - &th[j]).try_div(&(&th[r] - &th[s])).unwrap();
                        prop_assert_eq!(pred, direct);
                        checked += 1;
                    }
                }
            }
        }
        prop_assert!(checked > 0 || spec.family == Family::Orphan);
        // vartheta from the split sequence is a scaled sum; a broken copy is neither
        let vt = vartheta_of(&pa);
        prop_assert_eq!(scaled_sum_characterisation(th, &beta, &vt).unwrap(), (true, true));
        let mut broken = vt.clone();
        broken[1] = &broken[1] + &pa.field.one();
        let (a, b) = scaled_sum_characterisation(th, &beta, &broken).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn realization_properties(fam in 0usize..13, d in 1usize..5, fi in 0usize..4, seed in 0u64..1000) {
        let Some((_, pa)) = instance(fam, d, fi, seed) else { return Ok(()) };
        let d = pa.d();
        let real = build_split(&pa).unwrap();
        let f = &pa.field;
        let n = d + 1;
        // A^i E*_0 A^j span End(V)
        let rows: Vec<Vec<Elem>> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| real.a.pow(i).mul(&real.e_star[0]).mul(&real.a.pow(j)).rows().concat())
            .collect();
        prop_assert_eq!(leonard::matrix::rank_of_rows(rows), n * n);
        // tau_i(A) = sum_{h >= i} tau_i(theta_h) E_h
        for i in 0..=d {
            let lhs = tau(&pa.theta, i).eval_matrix(&real.a);
            let rhs = (i..=d).fold(Matrix::zero(f, n), |acc, h| acc.add(&real.e[h].scale(&tau_at(&pa.theta, i, &pa.theta[h]))));
            prop_assert_eq!(lhs, rhs);
        }
        for which in [Which::EStar0, Which::E0] {
            prop_assert_eq!(is_normalizing(&real, which), normalizing_by_rank(&real, which));
            prop_assert!(is_normalizing(&real, which));
        }
        // diagonal sequences move as the relatives table says
        let diag = diagonal_sequences(&real).unwrap();
        let rev = |v: &[Elem]| v.iter().rev().cloned().collect::<Vec<_>>();
        let down = diagonal_sequences(&real.relative(Gen::Down)).unwrap();
        prop_assert_eq!(&down.a, &rev(&diag.a));
        prop_assert_eq!(&down.a_star, &diag.a_star);
        let ddown = diagonal_sequences(&real.relative(Gen::DoubleDown)).unwrap();
        prop_assert_eq!(&ddown.a, &diag.a);
        prop_assert_eq!(&ddown.a_star, &rev(&diag.a_star));
        let star = diagonal_sequences(&real.relative(Gen::Star)).unwrap();
        prop_assert_eq!(&star.a, &diag.a_star);
        prop_assert_eq!(&star.a_star, &diag.a);
    }

    #[test]
    fn td1_tracks_vartheta(fam in 0usize..13, d in 3usize..7, fi in 0usize..4, seed in 0u64..1000, bump in 1i64..5, at in 0usize..7) {
        let Some((_, pa)) = instance(fam, d, fi, seed) else { return Ok(()) };
        let d = pa.d();
        let real = build_split(&pa).unwrap();
        let c = td_coefficients(&real).unwrap();
        let mut varphi = pa.varphi.clone();
        let k = at % d;
        varphi[k] = &varphi[k] + &pa.field.from_i64(bump);
        prop_assume!(varphi.iter().all(|x| !x.is_zero()));
        let a = lower_split(&pa.field, &pa.theta);
        let a_star = upper_split(&pa.field, &pa.theta_star, &varphi);
        let zero = td_commutator(&a, &a_star, &c.beta, &c.gamma, &c.varrho).is_zero();
        let broken = ParameterArray { varphi, ..pa.clone() };
        let vt = vartheta_of(&broken);
        prop_assert_eq!(zero, classify_recurrence(&vt, &Level::Beta(c.beta.clone())));
    }

    #[test]
    fn three_of_four(fam in 0usize..13, d in 1usize..5, fi in 0usize..4, seed in 0u64..1000, k in 1i64..6) {
        let Some((_, pa)) = instance(fam, d, fi, seed) else { return Ok(()) };
        let d = pa.d();
        let real = build_split(&pa).unwrap();
        prop_assert_eq!(four_conditions(&real), [true; 4]);
        // Perturb A* by a multiple of a fixed rank-one idempotent: the result is
        // still a pre-system; whenever three conditions survive so does the fourth.
        let n = d + 1;
        let extra = real.e[d].scale(&pa.field.from_i64(k));
        let a_star = real.a_star.add(&extra.mul(&real.e_star[0]));
        let theta_star: Vec<Elem> = pa.theta_star.clone();
        if let Ok(r2) = Realization::from_pair(real.a.clone(), a_star, pa.theta.clone(), theta_star) {
            let c = four_conditions(&r2);
            for skip in 0..4 {
                if (0..4).filter(|&i| i != skip).all(|i| c[i]) {
                    prop_assert!(c[skip], "conditions {:?} with n = {}", c, n);
                }
            }
        }
    }
}
