use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shiftlab::cz::{
    check_decomposition, cz_decompose, default_j_range, doubled, estimate_ay, log_spaced_w, DoubleFamily,
};
use shiftlab::{Grid, GridFunction};

mod common;
use common::{cz_oracle, expected_cubes};

fn random_family(grid: Grid, rng: &mut ChaCha8Rng, j_count: usize, k_count: usize) -> DoubleFamily {
    let members = (0..j_count * k_count)
        .map(|_| {
            let v = (0..grid.samples())
                .map(|_| {
                    let boost = if rng.gen_bool(0.03) { rng.gen_range(10.0..100.0) } else { 1.0 };
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * boost
                })
                .collect();
            GridFunction::new(grid, v).unwrap()
        })
        .collect();
    DoubleFamily::new(-1, j_count, 2, k_count, members).unwrap()
}

#[test]
fn random_families_satisfy_every_invariant() {
    let grid = Grid::new(8.0, 512).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..15 {
        let (j_count, k_count) = (rng.gen_range(1..4), rng.gen_range(1..4));
        let fam = random_family(grid, &mut rng, j_count, k_count);
        let alpha = rng.gen_range(0.2..5.0);
        let gamma = rng.gen_range(0.5..2.0);
        let d = cz_decompose(&fam, 2.0, alpha, gamma).unwrap();
        let check = check_decomposition(&d);
        assert!(check.passes(), "{check:?}");
        cz_oracle(fam.members(), j_count, 2.0, &d).unwrap();
        let norm = d.input.pointwise_norm(2.0);
        let mass: f64 = norm.iter().sum::<f64>() * grid.spacing();
        assert!((mass - 1.0).abs() < 1e-12);
        let mut got: Vec<(usize, usize)> =
            d.cubes.iter().map(|c| (c.first_sample(&grid), c.sample_count(&grid))).collect();
        got.sort();
        assert_eq!(got, expected_cubes(&norm, alpha * gamma));
    }
}

#[test]
fn plateau_at_the_threshold_is_not_selected() {
    let grid = Grid::new(4.0, 64).unwrap();
    let half: Vec<f64> = (0..64).map(|i| if i < 32 { 3.0 } else { 0.0 }).collect();
    let fam = DoubleFamily::new(0, 1, 0, 1, vec![GridFunction::from_real(grid, half).unwrap()]).unwrap();
    // normalized plateau height is 1 / 2 = 0.5
    let at = cz_decompose(&fam, 2.0, 0.5, 1.0).unwrap();
    assert!(at.cubes.is_empty());
    let below = cz_decompose(&fam, 2.0, 0.5 * (1.0 - 1e-12), 1.0).unwrap();
    assert_eq!(below.cubes.len(), 1);
    assert_eq!(below.cubes[0].sample_count(&grid), 32);
    assert!(check_decomposition(&below).passes());
}

#[test]
fn single_spike_gives_one_sample_cubes_or_a_degenerate_root() {
    let grid = Grid::new(1.0, 128).unwrap();
    let mut v = vec![0.0; 128];
    v[77] = 1.0;
    let fam = DoubleFamily::new(0, 1, 0, 1, vec![GridFunction::from_real(grid, v).unwrap()]).unwrap();
    let d = cz_decompose(&fam, 2.0, 2.0, 1.0).unwrap();
    assert!(check_decomposition(&d).passes());
    assert!(d.cubes.iter().all(|c| c.sample_range(&grid).contains(&77)));
    let d = cz_decompose(&fam, 2.0, 0.5, 1.0).unwrap();
    assert!(d.degenerate);
    assert!(check_decomposition(&d).passes());
}

#[test]
fn ay_grows_with_levels_and_samples() {
    let y = 5f64.exp();
    let w = log_spaced_w(1.0, 2.0, 4);
    let range = default_j_range(y, &w, 2);
    let base = estimate_ay(y, 2.0, range.clone(), &w).unwrap();
    let wide = estimate_ay(y, 2.0, doubled(&range), &w).unwrap();
    let fine = estimate_ay(y, 2.0, range, &log_spaced_w(1.0, 2.0, 8)).unwrap();
    assert!(wide.value >= base.value);
    assert!(fine.value >= base.value);
    assert!(base.warning.is_none());
    let narrow = estimate_ay(y, 2.0, 0..=1, &w).unwrap();
    assert!(narrow.warning.is_some());
}
