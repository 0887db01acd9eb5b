use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use shiftlab::cz::{cz_decompose, default_j_range, doubled, estimate_ay, log_spaced_w, DoubleFamily};
use shiftlab::experiments::{csv_string, fit_power_law, growth_sweep, Exponents, Functional, SweepSpec};
use shiftlab::io::{read_shl1, write_shl1};
use shiftlab::norms::{carleson_norm, lp_norm, mixed_norm, weak_l1_norm};
use shiftlab::operators::{
    dyadic_maximal_by_tree, hl_maximal, lp_conv_shifted, peetre_shifted, shifted_dyadic_maximal, ShiftedOpParams,
};
use shiftlab::spectral::{band_support_check, to_spectrum, translate};
use shiftlab::{Error, Exponent, FilterKind, Grid, GridFunction, LevelFamily};

mod common;
use common::{cz_oracle, random_function, re, rotate};

fn grid() -> Grid {
    Grid::new(4.0, 128).unwrap()
}

fn function() -> impl Strategy<Value = GridFunction> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 128)
        .prop_map(|v| GridFunction::new(grid(), v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap())
}

fn family(levels: usize) -> impl Strategy<Value = LevelFamily> {
    (prop::collection::vec(function(), levels), -2i32..3)
        .prop_map(|(fs, k_min)| LevelFamily::new(k_min, fs).unwrap())
}

fn le_pointwise(a: &[f64], b: &[f64], slack: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| *x <= y + slack * y.abs().max(1.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn translation_round_trips(f in function(), a in -20.0f64..20.0) {
        let back = translate(&translate(&f, a), -a);
        prop_assert!(back.max_relative_diff(&f) < 1e-12);
    }

    #[test]
    fn parseval_holds(f in function()) {
        let spatial: f64 = f.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * f.grid().spacing();
        prop_assert!((spatial - to_spectrum(&f).energy()).abs() <= 1e-12 * spatial);
    }

    #[test]
    fn peetre_decreases_in_sigma(f in function(), s in 1.5f64..4.0, ds in 0.0f64..3.0, k in -1i32..3, y in -30.0f64..30.0) {
        let lo = re(&peetre_shifted(&f, &ShiftedOpParams::new(s + ds, 1.0, k, y)).unwrap());
        let hi = re(&peetre_shifted(&f, &ShiftedOpParams::new(s, 1.0, k, y)).unwrap());
        prop_assert!(le_pointwise(&lo, &hi, 1e-12));
    }

    #[test]
    fn peetre_is_homogeneous(f in function(), c in 0.01f64..100.0, t in prop_oneof![Just(0.5), Just(1.0), Just(f64::INFINITY)]) {
        let params = ShiftedOpParams::new(3.0, t, 1, 7.5);
        let a = re(&peetre_shifted(&f.scale(Complex64::new(0.0, c)), &params).unwrap());
        let b = re(&peetre_shifted(&f, &params).unwrap());
        prop_assert!(a.iter().zip(&b).all(|(x, y)| (x - c * y).abs() <= 1e-10 * (c * y).max(1e-300)));
    }

    #[test]
    fn grid_aligned_shifts_move_the_peetre_function(f in function(), k in -1i32..3, m in -40i64..40, y in -10.0f64..10.0) {
        let h = f.grid().spacing();
        let params = ShiftedOpParams::new(2.5, 1.0, k, y);
        let moved = ShiftedOpParams::new(2.5, 1.0, k, y + 2f64.powi(k) * m as f64 * h);
        let a = peetre_shifted(&f, &moved).unwrap();
        let b = rotate(peetre_shifted(&f, &params).unwrap().values(), m);
        prop_assert!(common::rel_diff(a.values(), &b) < 1e-10);
        let peak = |v: &[Complex64]| v.iter().map(|z| z.re).fold(0.0, f64::max);
        prop_assert!((peak(a.values()) - peak(&b)).abs() <= 1e-10 * peak(&b));
    }

    #[test]
    fn shifted_dyadic_maximal_is_sublinear(f in function(), g in function(), y in -50.0f64..50.0) {
        let sum = GridFunction::new(grid(), f.values().iter().zip(g.values()).map(|(a, b)| a + b).collect()).unwrap();
        let lhs = re(&shifted_dyadic_maximal(&sum, y, 1.0).unwrap());
        let mf = re(&shifted_dyadic_maximal(&f, y, 1.0).unwrap());
        let mg = re(&shifted_dyadic_maximal(&g, y, 1.0).unwrap());
        let rhs: Vec<f64> = mf.iter().zip(&mg).map(|(a, b)| a + b).collect();
        prop_assert!(le_pointwise(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn unshifted_maximal_matches_tree_and_dominates(f in function(), t in prop_oneof![Just(0.5), Just(1.0), Just(2.0)]) {
        let direct = re(&shifted_dyadic_maximal(&f, 0.0, t).unwrap());
        let tree = re(&dyadic_maximal_by_tree(&f, t).unwrap());
        prop_assert!(direct.iter().zip(&tree).all(|(a, b)| (a - b).abs() <= 1e-12 * b.max(1.0)));
        prop_assert!(le_pointwise(&f.moduli(), &tree, 1e-12));
        let windowed = re(&hl_maximal(&f, t).unwrap());
        prop_assert!(le_pointwise(&tree, &windowed, 1e-12));
    }

    #[test]
    fn shifted_annulus_pieces_stay_in_band(f in function(), k in -1i32..4, y in -40.0f64..40.0) {
        for kind in [FilterKind::Phi, FilterKind::Psi] {
            let piece = lp_conv_shifted(&f, kind, k, y).unwrap();
            prop_assert!(band_support_check(&piece, kind.band(k)).pass);
        }
    }

    #[test]
    fn mixed_norm_is_homogeneous_and_monotone(fam in family(3), c in 0.1f64..10.0, p in 1.0f64..4.0, q in 1.0f64..4.0) {
        let base = mixed_norm(&fam, p, q).unwrap();
        let scaled = fam.map(|_, f| Ok(f.scale(Complex64::new(c, 0.0)))).unwrap();
        prop_assert!((mixed_norm(&scaled, p, q).unwrap() - c * base).abs() <= 1e-12 * c * base);
        let bigger = fam
            .map(|k, f| {
                let v = f.values().iter().enumerate().map(|(i, z)| z * (1.0 + ((i as i32 + k) % 5) as f64 / 4.0)).collect();
                GridFunction::new(*f.grid(), v)
            })
            .unwrap();
        prop_assert!(base <= mixed_norm(&bigger, p, q).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn mixed_norm_decreases_in_q(fam in family(4), p in 1.0f64..3.0, q in 1.0f64..3.0, dq in 0.0f64..3.0) {
        prop_assert!(mixed_norm(&fam, p, q + dq).unwrap() <= mixed_norm(&fam, p, q).unwrap() * (1.0 + 1e-12));
        prop_assert!(mixed_norm(&fam, p, f64::INFINITY).unwrap() <= mixed_norm(&fam, p, q).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn mixed_norm_triangle_inequality(a in family(3), b in family(3), p in 1.0f64..4.0, q in 1.0f64..4.0) {
        let b = LevelFamily::new(a.k_min(), b.functions().to_vec()).unwrap();
        let sum = a
            .map(|k, f| {
                let g = b.level(k).unwrap();
                GridFunction::new(*f.grid(), f.values().iter().zip(g.values()).map(|(x, y)| x + y).collect())
            })
            .unwrap();
        let lhs = mixed_norm(&sum, p, q).unwrap();
        prop_assert!(lhs <= (mixed_norm(&a, p, q).unwrap() + mixed_norm(&b, p, q).unwrap()) * (1.0 + 1e-12));
    }

    #[test]
    fn carleson_below_pointwise_sup(fam in family(4), q in 1.0f64..4.0) {
        let n = fam.grid().samples();
        let sup = (0..n)
            .map(|i| fam.functions().iter().map(|f| f.values()[i].norm().powf(q)).sum::<f64>())
            .fold(0.0, f64::max)
            .powf(1.0 / q);
        prop_assert!(carleson_norm(&fam, q).unwrap() <= sup * (1.0 + 1e-12));
    }

    #[test]
    fn weak_norm_below_strong(f in function(), start in 0usize..100, len in 1usize..28, c in 0.1f64..10.0) {
        prop_assert!(weak_l1_norm(&f) <= lp_norm(&f, 1.0).unwrap() * (1.0 + 1e-12));
        let indicator = GridFunction::from_real(grid(), (0..128).map(|i| if (start..start + len).contains(&i) { c } else { 0.0 }).collect()).unwrap();
        prop_assert!((weak_l1_norm(&indicator) - lp_norm(&indicator, 1.0).unwrap()).abs() <= 1e-12 * c * len as f64);
    }

    #[test]
    fn cz_invariants_hold(seed in any::<u64>(), j_count in 1usize..3, k_count in 1usize..3, threshold in 0.3f64..30.0, gamma in 0.5f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let members: Vec<GridFunction> = (0..j_count * k_count).map(|_| random_function(grid(), &mut rng)).collect();
        let fam = DoubleFamily::new(0, j_count, 0, k_count, members.clone()).unwrap();
        let d = cz_decompose(&fam, 2.0, threshold / gamma, gamma).unwrap();
        prop_assert!(cz_oracle(&members, j_count, 2.0, &d).is_ok());
    }

    #[test]
    fn fit_recovers_exact_power_laws(r in -2.0f64..3.0, c in 0.01f64..100.0) {
        let points: Vec<(f64, f64)> = (3..=8).map(|k| {
            let y = (k as f64).exp();
            (y, c * (std::f64::consts::E + y).ln().powf(r))
        }).collect();
        let fit = fit_power_law(&points).unwrap();
        prop_assert!((fit.exponent - r).abs() < 1e-10);
        prop_assert!((fit.intercept - c.ln()).abs() < 1e-9);
    }

    #[test]
    fn exponents_parse_what_they_print(v in 1e-3f64..1e3) {
        let e = Exponent::new(v).unwrap();
        let back: Exponent = e.to_string().parse().unwrap();
        prop_assert_eq!(back, e);
        let text = serde_json::to_string(&e).unwrap();
        prop_assert_eq!(serde_json::from_str::<Exponent>(&text).unwrap(), e);
    }

    #[test]
    fn shl1_round_trips_bitwise(f in function()) {
        let mut buf = Vec::new();
        write_shl1(&mut buf, &f).unwrap();
        let g = read_shl1(buf.as_slice()).unwrap();
        prop_assert_eq!(g.grid(), f.grid());
        prop_assert!(f.values().iter().zip(g.values()).all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits()));
    }

    #[test]
    fn hypothesis_guard_matches_the_stated_conditions(p in 0.5f64..4.0, q in 0.5f64..4.0, t in 0.25f64..4.0, sigma in 0.1f64..6.0) {
        let e = Exponents { p, q, t, sigma };
        prop_assert_eq!(e.check_for(Functional::PeetreMixed).is_ok(), sigma > 1.0 / p.min(q).min(t));
        prop_assert_eq!(e.check_for(Functional::PeetreCarleson).is_ok(), sigma > 1.0 / q.min(t));
        prop_assert_eq!(e.check_for(Functional::DyadicMaximalMixed).is_ok(), t < p.min(q));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn ay_grows_under_refinement(k in 3.0f64..6.0, count in 4usize..12) {
        let y = k.exp();
        let w = log_spaced_w(0.05, 2.0, count);
        let range = default_j_range(y, &w, 2);
        let base = estimate_ay(y, 2.0, range.clone(), &w).unwrap().value;
        prop_assert!(estimate_ay(y, 2.0, doubled(&range), &w).unwrap().value >= base);
        prop_assert!(estimate_ay(y, 2.0, range, &log_spaced_w(0.05, 2.0, 2 * count)).unwrap().value >= base);
    }
}

fn small_sweep(lhs: Functional) -> SweepSpec {
    serde_json::from_value(serde_json::json!({
        "family": "A", "p": 1, "q": 2, "t": 1, "sigma": 2,
        "k_list": [3, 4], "lhs": lhs, "rhs": "raw-mixed",
        "eta": { "halfwidth": 1.0, "floor_radius": 0.25 }
    }))
    .unwrap()
}

#[test]
fn sweeps_repeat_byte_for_byte() {
    let spec = small_sweep(Functional::PeetreMixed);
    assert_eq!(csv_string(&growth_sweep(&spec).unwrap()), csv_string(&growth_sweep(&spec).unwrap()));
}

#[test]
fn equal_sides_give_unit_ratios() {
    for r in growth_sweep(&small_sweep(Functional::RawMixed)).unwrap() {
        assert_eq!(r.ratio(), Some(1.0));
    }
}

#[test]
fn a_single_shift_cannot_be_fitted() {
    let y = 5f64.exp();
    assert!(matches!(fit_power_law(&[(y, 2.0), (y, 2.0), (y, 2.0)]), Err(Error::TooFewPoints(1))));
}
