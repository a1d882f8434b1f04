use std::collections::BTreeMap;

use leonard::families::{closed_intersection, generate_parray, sample_admissible, Family, FamilySpec};
use leonard::field::Field;
use leonard::intersection::{brute_intersection, closed_forms, Method};
use leonard::matrix::Matrix;
use leonard::system::{build_split, extract_parray, verify_leonard};

/// Krawtchouk with theta_i = theta*_i = d - 2i: the hypercube-shaped
/// instance, where a_0 = a*_0 = 0 and c_1 = 1.
#[test]
fn hypercube_normalisation_gives_unit_c1() {
    let f = Field::rationals();
    for d in 1..=6 {
        let params: BTreeMap<String, _> = [("s", -2), ("s_star", -2), ("r", 2), ("theta0", d), ("theta0_star", d)]
            .iter()
            .map(|(k, v)| (k.to_string(), f.from_i64(*v)))
            .collect();
        let spec = FamilySpec::new(Family::Krawtchouk, d as usize, &f, params);
        let pa = generate_parray(&spec).unwrap();
        let want: Vec<_> = (0..=d).map(|i| f.from_i64(d - 2 * i)).collect();
        assert_eq!(pa.theta, want);
        let brute = brute_intersection(&build_split(&pa).unwrap()).unwrap();
        assert!(brute.a[0].is_zero() && brute.a_star[0].is_zero(), "d={d}");
        assert!(brute.c[0].is_one(), "d={d}");
        // hypercube intersection numbers b_i = d - i, c_i = i
        for i in 0..d as usize {
            assert_eq!(brute.b[i], f.from_i64(d - i as i64));
            assert_eq!(brute.c[i], f.from_i64(i as i64 + 1));
        }
        assert_eq!(closed_intersection(&spec).unwrap(), brute);
        for m in Method::ALL {
            if d as usize >= m.min_d() {
                assert!(closed_forms(&pa, m).unwrap().c[0].is_one(), "{m} d={d}");
            }
        }
    }
}

/// The split-form data does not depend on the basis the system is written in.
#[test]
fn conjugated_realizations_extract_the_same_array() {
    for desc in ["Q", "GF:101", "GF:13"] {
        let f = Field::from_descriptor(desc).unwrap();
        for fam in [Family::QRacah, Family::Racah, Family::BannaiIto, Family::Krawtchouk] {
            let Ok(specs) = sample_admissible(fam, 4, &f, 11, 1) else { continue };
            let pa = generate_parray(&specs[0]).unwrap();
            let real = build_split(&pa).unwrap();
            let n = pa.d() + 1;
            // a dense unimodular change of basis: upper unipotent times lower unipotent
            let up = Matrix::from_fn(&f, n, |i, j| if i <= j { f.from_i64(1 + ((i * 3 + j * 5) % 4) as i64) } else { f.zero() });
            let lo = Matrix::from_fn(&f, n, |i, j| if i >= j { f.from_i64(1 + ((i + 2 * j) % 3) as i64) } else { f.zero() });
            let fix = |m: Matrix| {
                let mut m = m;
                for i in 0..n {
                    m.set(i, i, f.one());
                }
                m
            };
            let s = fix(up).mul(&fix(lo));
            let moved = real.conjugate(&s).unwrap();
            assert_ne!(moved.a, real.a);
            assert!(verify_leonard(&moved).is_leonard());
            assert_eq!(extract_parray(&moved).unwrap(), pa, "{fam} over {desc}");
            assert_eq!(brute_intersection(&moved).unwrap(), brute_intersection(&real).unwrap());
        }
    }
}
