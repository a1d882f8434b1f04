use leonard::families::{bannai_ito_parity_forms, closed_intersection, generate_parray, sample_admissible, Family};
use leonard::field::Field;
use leonard::intersection::brute_intersection;
use leonard::parray::Gen;
use leonard::recurrence::{detect_beta, Beta};
use leonard::system::build_split;

fn fields() -> Vec<Field> {
    ["Q", "GF:101", "GF:13", "GF:2:1,1,1"].iter().map(|d| Field::from_descriptor(d).unwrap()).collect()
}

#[test]
fn bannai_ito_parity_displays_agree() {
    let mut seen = 0;
    for f in fields() {
        for d in 1..=8 {
            let Ok(specs) = sample_admissible(Family::BannaiIto, d, &f, 40 + d as u64, 2) else { continue };
            for s in specs {
                let pa = generate_parray(&s).unwrap();
                let closed = closed_intersection(&s).unwrap();
                let p = bannai_ito_parity_forms(&s).unwrap();
                assert_eq!((&p.theta, &p.theta_star), (&pa.theta, &pa.theta_star), "{f} d={d}");
                assert_eq!((&p.varphi, &p.phi), (&pa.varphi, &pa.phi), "{f} d={d}");
                assert_eq!((&p.b, &p.c), (&closed.b, &closed.c), "{f} d={d}");
                assert_eq!((&p.b_star, &p.c_star), (&closed.b_star, &closed.c_star), "{f} d={d}");
                seen += 1;
            }
        }
    }
    // both parities of d over at least Q and GF(101)
    assert!(seen >= 20, "only {seen} instances");
}

#[test]
fn beta_matches_the_family() {
    for f in fields() {
        for fam in Family::ALL {
            let d = if fam == Family::Orphan { 3 } else { 5 };
            let Ok(specs) = sample_admissible(fam, d, &f, 77, 1) else { continue };
            let s = &specs[0];
            let pa = generate_parray(s).unwrap();
            let Beta::Value(beta) = detect_beta(&pa.theta).unwrap().beta else { panic!("d >= 3") };
            let want = if fam.has_q() {
                let q = s.get("q").unwrap();
                &q + &q.inverse().unwrap()
            } else {
                match fam {
                    Family::BannaiIto => f.from_i64(-2),
                    Family::Orphan => f.zero(),
                    _ => f.from_i64(2),
                }
            };
            assert_eq!(beta, want, "{fam} over {f}");
        }
    }
}

#[test]
fn star_relative_swaps_the_intersection_numbers() {
    for f in fields() {
        for fam in Family::ALL {
            let d = if fam == Family::Orphan { 3 } else { 4 };
            let Ok(specs) = sample_admissible(fam, d, &f, 5, 1) else { continue };
            let pa = generate_parray(&specs[0]).unwrap();
            let star = pa.relative(Gen::Star);
            assert!(star.is_valid(), "{fam} over {f}");
            let brute = brute_intersection(&build_split(&star).unwrap()).unwrap();
            assert_eq!(brute, closed_intersection(&specs[0]).unwrap().dual(), "{fam} over {f}");
        }
    }
}

#[test]
fn orphan_rejected_outside_characteristic_two() {
    let q = Field::rationals();
    assert!(sample_admissible(Family::Orphan, 3, &q, 1, 1).is_err());
    let gf4 = Field::from_descriptor("GF:2:1,1,1").unwrap();
    assert!(sample_admissible(Family::Orphan, 4, &gf4, 1, 1).is_err());
}
