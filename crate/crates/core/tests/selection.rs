#![allow(clippy::needless_range_loop)]

use gralasso::regression::{screen_top_k, SelectionRule, WeightMode};
use gralasso::simulation::{contaminate_cells, gen_design, gen_response, ContaminationSpec, SimDesign};
use gralasso::{fit_gr_alasso, DataMatrix, FitOptions};

fn sim(n: usize, p: usize, seed: u64, noise: f64) -> (SimDesign, DataMatrix) {
    let d = SimDesign::standard(n, p).with_seed(seed);
    let x = gen_design(&d).unwrap();
    let y = gen_response(&x, &d.beta_true, noise, seed + 1).unwrap();
    (d, DataMatrix::from_parts(y, x).unwrap())
}

#[test]
fn noiseless_cross_validation_recovers_support() {
    for seed in 0..5 {
        let (d, data) = sim(80, 12, 100 + seed, 0.0);
        let fit = fit_gr_alasso(&data, &FitOptions::default()).unwrap();
        assert_eq!(fit.support, d.active_set(), "seed {seed}");
    }
}

#[test]
fn estimates_concentrate_as_n_grows() {
    // mean squared error on the active set shrinks roughly like 1/n
    let err = |n: usize| -> f64 {
        (0..20u64)
            .map(|s| {
                let (d, data) = sim(n, 10, 7000 + s, 1.0);
                let fit = fit_gr_alasso(
                    &data,
                    &FitOptions {
                        seed: s,
                        ..FitOptions::default()
                    },
                )
                .unwrap();
                d.active_set().iter().map(|&j| (fit.beta[j] - 1.0).powi(2)).sum::<f64>()
            })
            .sum::<f64>()
            / 20.0
    };
    let (small, large) = (err(200), err(2000));
    assert!(large < small / 3.0, "{small} -> {large}");
    // inactive coefficients are exactly zero with high probability at large n
    let zeros = (0..20u64)
        .filter(|&s| {
            let (d, data) = sim(2000, 10, 8000 + s, 1.0);
            let fit = fit_gr_alasso(
                &data,
                &FitOptions {
                    seed: s,
                    ..FitOptions::default()
                },
            )
            .unwrap();
            (0..10)
                .filter(|j| !d.active_set().contains(j))
                .all(|j| fit.beta[j] == 0.0)
        })
        .count();
    assert!(zeros >= 18, "{zeros}/20");
}

#[test]
fn scaled_errors_look_normal() {
    // √n (β̂_1 − 1) under the min rule: centred, stable spread across n
    let stats = |n: usize| -> (f64, f64) {
        let z: Vec<f64> = (0..60u64)
            .map(|s| {
                let (_, data) = sim(n, 8, 9000 + s + n as u64, 1.0);
                let opts = FitOptions {
                    seed: s,
                    rule: SelectionRule::Min,
                    ..FitOptions::default()
                };
                let fit = fit_gr_alasso(&data, &opts).unwrap();
                (n as f64).sqrt() * (fit.beta[0] - 1.0)
            })
            .collect();
        let m = z.iter().sum::<f64>() / z.len() as f64;
        let sd = (z.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (z.len() - 1) as f64).sqrt();
        (m, sd)
    };
    let (m1, s1) = stats(400);
    let (m2, s2) = stats(1600);
    assert!(m2.abs() < 3.0 * s2 / 60f64.sqrt() + 0.5, "mean {m2}");
    assert!((s2 / s1 - 1.0).abs() < 0.5, "sd {s1} -> {s2}");
    assert!(m1.is_finite());
}

#[test]
fn screening_keeps_the_active_set() {
    let mut hits = 0;
    for s in 0..20u64 {
        let (d, data) = sim(100, 300, 300 + s, 1.0);
        let kept: Vec<usize> = screen_top_k(&data, 50).unwrap().iter().map(|p| p.index).collect();
        hits += d.active_set().iter().filter(|j| kept.contains(j)).count();
    }
    assert!(hits as f64 / 100.0 >= 0.95, "{hits}/100");
}

#[test]
fn screen_then_fit_on_contaminated_data() {
    let (d, data) = sim(120, 400, 55, 1.0);
    let x: Vec<Vec<f64>> = (0..data.p()).map(|j| data.predictor(j).to_vec()).collect();
    let (xc, _) = contaminate_cells(&x, ContaminationSpec::new(0.02, 8.0).unwrap(), 56);
    let dirty = DataMatrix::from_parts(data.response().to_vec(), xc).unwrap();
    let kept: Vec<usize> = screen_top_k(&dirty, 40).unwrap().iter().map(|p| p.index).collect();
    let reduced = dirty.select_predictors(&kept);
    let fit = fit_gr_alasso(&reduced, &FitOptions::default()).unwrap();
    let chosen: Vec<usize> = fit.support.iter().map(|&k| kept[k]).collect();
    let tp = d.active_set().iter().filter(|j| chosen.contains(j)).count();
    assert!(tp >= 4, "{chosen:?}");
}

#[test]
fn high_dimensional_ridge_weights() {
    let (d, data) = sim(100, 200, 77, 1.0);
    let opts = FitOptions {
        weights: WeightMode::Ridge,
        ..FitOptions::default()
    };
    let fit = fit_gr_alasso(&data, &opts).unwrap();
    assert!(fit.converged);
    let tp = d.active_set().iter().filter(|j| fit.support.contains(j)).count();
    assert!(tp >= 4);
    assert!(fit.support.len() < 30);
}
