//! Fast operators against direct enumeration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shiftlab::norms::{carleson_norm, sharp_q2, weak_l1_norm};
use shiftlab::operators::{
    dyadic_average, hl_maximal, lambda_convolve, peetre_shifted, shifted_dyadic_maximal, ShiftedOpParams,
};
use shiftlab::spectral::convolve;
use shiftlab::{Grid, GridFunction, LevelFamily};

mod common;
use common::*;

#[test]
fn convolution_matches_double_sum() {
    let grid = Grid::new(8.0, 512).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..3 {
        let f = random_function(grid, &mut rng);
        let g = random_function(grid, &mut rng);
        let err = convolution_error(&f, &g, &convolve(&f, &g).unwrap());
        assert!(err < 1e-9, "{err}");
    }
}

#[test]
fn dyadic_averages_match_windows() {
    let grid = Grid::new(4.0, 256).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let f = random_function(grid, &mut rng);
    for _ in 0..20 {
        let k = rng.gen_range(grid.coarsest_level()..=grid.finest_level());
        let y: f64 = rng.gen_range(-40.0..40.0);
        let fast = dyadic_average(&f, k, y).unwrap();
        for (i, (v, w)) in fast.values().iter().zip(direct_dyadic_average(&f, k, y)).enumerate() {
            assert!((v - w).norm() <= 1e-12, "k = {k}, y = {y}, i = {i}");
        }
    }
}

#[test]
fn shifted_maximal_matches_windows() {
    let grid = Grid::new(2.0, 256).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f = random_function(grid, &mut rng);
    for (y, t) in [(0.0, 1.0), (13.7, 1.0), (-55.2, 0.5), (201.0, 3.0)] {
        let fast = re(&shifted_dyadic_maximal(&f, y, t).unwrap());
        for (i, (a, b)) in fast.iter().zip(direct_shifted_maximal(&f, y, t)).enumerate() {
            assert!((a - b).abs() <= 1e-12 * b.max(1.0), "y = {y}, i = {i}");
        }
    }
}

#[test]
fn windowed_maximal_matches_all_windows() {
    let grid = Grid::new(2.0, 128).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let f = random_function(grid, &mut rng);
    let fast = re(&hl_maximal(&f, 1.0).unwrap());
    assert!(max_abs_diff(&fast, &direct_windowed_maximal(&f)) <= 1e-12);
}

#[test]
fn level_functionals_match_cube_loops() {
    let grid = Grid::new(2.0, 128).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for q in [1.0, 2.0, 2.5] {
        let k_min = rng.gen_range(-2..3);
        let fam = LevelFamily::new(k_min, (0..7).map(|_| random_function(grid, &mut rng)).collect()).unwrap();
        let (carleson, sharp) = cube_loops(&fam, q);
        let fast = carleson_norm(&fam, q).unwrap();
        assert!((fast - carleson).abs() <= 1e-10 * carleson);
        let fast = re(&sharp_q2(&fam, q).unwrap());
        assert!(max_abs_diff(&fast, &sharp) <= 1e-10 * sup(&sharp));
    }
}

#[test]
fn weak_norm_matches_threshold_scan() {
    let grid = Grid::new(4.0, 256).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let noise = random_function(grid, &mut rng);
    let ties = GridFunction::from_real(grid, (0..256).map(|i| ((i % 7) as f64).sqrt()).collect()).unwrap();
    for f in [noise, ties] {
        assert_eq!(weak_l1_norm(&f), threshold_scan(&f));
    }
}

#[test]
fn peetre_matches_direct_sum() {
    let grid = Grid::new(4.0, 256).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let f = random_function(grid, &mut rng);
    for (sigma, t, k, y) in [(6.0, 1.0, 1, 9.3), (3.0, 1.0, 0, -2.0), (2.0, 2.0, 2, 40.0), (8.0, 0.5, -1, 1.0)] {
        let fast = re(&peetre_shifted(&f, &ShiftedOpParams::new(sigma, t, k, y)).unwrap());
        let slow = peetre_direct(&f, sigma, t, k, y, 20_000);
        assert!(max_abs_diff(&fast, &slow) <= 1e-9 * sup(&slow), "{sigma} {t} {k} {y}");
    }
}

#[test]
fn peetre_sup_matches_direct_scan() {
    let grid = Grid::new(4.0, 256).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let f = random_function(grid, &mut rng);
    let (n, h, length) = (grid.samples(), grid.spacing(), grid.length());
    let m = f.moduli();
    for (sigma, k, y) in [(2.0, 1, 9.3), (0.5, 3, -70.0)] {
        let fast = re(&peetre_shifted(&f, &ShiftedOpParams::new(sigma, f64::INFINITY, k, y)).unwrap());
        let s = 2f64.powi(k);
        for i in 0..n {
            let best = (0..n)
                .map(|l| {
                    let d = (l as f64 * h - y / s).rem_euclid(length);
                    m[(i + n - l) % n] / (1.0 + s * d.min(length - d)).powf(sigma)
                })
                .fold(0.0, f64::max);
            assert!((fast[i] - best).abs() <= 1e-14 * best.max(1.0));
        }
    }
}

#[test]
fn lambda_convolution_is_the_t1_operator() {
    let grid = Grid::new(8.0, 512).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let f = random_function(grid, &mut rng);
    let modulus = GridFunction::from_real(grid, f.moduli()).unwrap();
    let (sigma, j, y) = (2.5, 1, 11.0);
    let a = re(&peetre_shifted(&f, &ShiftedOpParams::new(sigma, 1.0, j, y)).unwrap());
    let b = re(&lambda_convolve(&modulus, j, sigma, y, None).unwrap());
    assert!(max_abs_diff(&a, &b) <= 1e-12 * sup(&a));
}

#[test]
fn integer_shifts_commute_with_the_maximal_operator() {
    let grid = Grid::new(4.0, 256).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let f = random_function(grid, &mut rng);
    let moved = GridFunction::new(grid, rotate(f.values(), 37)).unwrap();
    let params = ShiftedOpParams::new(3.0, 1.0, 2, 17.0);
    let a = peetre_shifted(&moved, &params).unwrap();
    let b = rotate(peetre_shifted(&f, &params).unwrap().values(), 37);
    assert!(rel_diff(a.values(), &b) < 1e-12);
}
