use num_complex::Complex64 as C64;

use qfisize::bounds::{pairwise_scan, MonteCarlo, PairwiseOptions};
use qfisize::datasets::{simulate_record, uniform_grid, Protocol, Shots};
use qfisize::states::{make_state, CatSpec, DisplacedParityScan, StateSpec};

fn spec() -> StateSpec {
    StateSpec::Cat(CatSpec::new(C64::new(2.0, 0.0), 0.0, 0.8).unwrap())
}

#[test]
fn simulated_error_bars_are_calibrated() {
    let grid = uniform_grid(0.02, 81);
    let scan = DisplacedParityScan::new(&make_state(&spec()).unwrap(), 0.0).unwrap();
    let exact: Vec<f64> = grid.iter().map(|&t| scan.at(t).unwrap()).collect();
    let protocol = Protocol::WignerCut { angle: 0.0, grid };
    let mut z = Vec::new();
    for seed in 0..20 {
        let rec = simulate_record(&spec(), &protocol, Shots::Finite(500), seed, None).unwrap();
        for (s, w) in rec.samples.iter().zip(&exact) {
            z.push((s.value - w) / s.sigma);
        }
    }
    let n = z.len() as f64;
    let mean = z.iter().sum::<f64>() / n;
    let sd = (z.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    assert!(mean.abs() < 0.1, "mean z {mean}");
    assert!((0.9..=1.1).contains(&sd), "sd z {sd}");
}

#[test]
fn pairwise_reports_are_reproducible() {
    let protocol = Protocol::WignerCut {
        angle: 0.0,
        grid: uniform_grid(0.02, 31),
    };
    let rec = simulate_record(&spec(), &protocol, Shots::Finite(1000), 9, None).unwrap();
    let opts = |seed| PairwiseOptions::for_record(&rec, 2, MonteCarlo { samples: 300, seed }).unwrap();
    let a = pairwise_scan(&rec.samples, &opts(1)).unwrap();
    let b = pairwise_scan(&rec.samples, &opts(1)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, pairwise_scan(&rec.samples, &opts(2)).unwrap());
}

#[test]
fn infinite_shots_reproduce_exact_values() {
    let grid = uniform_grid(0.05, 11);
    let scan = DisplacedParityScan::new(&make_state(&spec()).unwrap(), 0.0).unwrap();
    let rec = simulate_record(&spec(), &Protocol::WignerCut { angle: 0.0, grid }, Shots::Infinite, 0, None).unwrap();
    for s in &rec.samples {
        assert_eq!(s.sigma, 0.0);
        assert!((s.value - scan.at(s.setting).unwrap()).abs() < 1e-15);
    }
}
