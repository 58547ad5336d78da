#![allow(dead_code)]

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use qfisize::bounds::{
    bhattacharyya_bound, fitted_bound, histogram_bound, pairwise_scan, shortcut_a2s, static_bound,
    MonteCarlo, PairwiseOptions, ProbabilityPair, StaticSystem, VarianceRecord,
};
use qfisize::datasets::Sample;
use qfisize::qfi::{optimize_generator, GeneratorFamily};
use qfisize::rng;
use qfisize::state_space::operators::{number, quadrature, spin_axis};
use qfisize::state_space::{ComplexMatrix, DensityMatrix, Propagator, SpaceSpec};
use qfisize::states::{
    make_state, CatSpec, FringeModel, ParityAxis, SpinParityScan, StateSpec, WignerCatModel,
};

pub const SOUNDNESS_TOL: f64 = 1e-7;
pub const FOCK_CUTOFF: usize = 60;

#[derive(Debug, Default)]
pub struct SweepReport {
    pub states: usize,
    pub checks: usize,
    pub by_operation: std::collections::BTreeMap<&'static str, usize>,
    pub violations: Vec<String>,
    pub max_excess: f64,
}

impl SweepReport {
    fn check(&mut self, op: &'static str, state: &str, bound: f64, exact: f64) {
        self.checks += 1;
        *self.by_operation.entry(op).or_default() += 1;
        let excess = bound - exact;
        self.max_excess = self.max_excess.max(excess);
        if excess.is_nan() || excess > SOUNDNESS_TOL {
            self.violations
                .push(format!("{op} on {state}: bound {bound} > exact {exact}"));
        }
    }
}

fn gaussian_vector(rng: &mut ChaCha8Rng, support: usize, dim: usize) -> Vec<C64> {
    (0..dim)
        .map(|i| {
            if i < support {
                C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .collect()
}

/// Random mixed state of rank ≤ `support`, living on the first `support`
/// basis vectors of `space`.
pub fn random_state(space: SpaceSpec, support: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let rank = rng.gen_range(1..=support);
    let dim = space.dimension();
    let vectors: Vec<Vec<C64>> = (0..rank).map(|_| gaussian_vector(rng, support, dim)).collect();
    let weights: Vec<f64> = (0..rank).map(|_| rng.gen_range(0.05..1.0)).collect();
    DensityMatrix::mixture(space, vectors, ComplexMatrix::from_real_diagonal(&weights)).unwrap()
}

fn random_unit(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-3 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

struct Dynamics<'a> {
    label: String,
    rho: &'a DensityMatrix,
    /// Generator per unit setting and classical normalization.
    scale: f64,
    normalization: f64,
}

/// Static, Bhattacharyya, histogram and pairwise bounds against the exact
/// optimal QFI of `rho`.
fn generic_checks(d: &Dynamics, rng: &mut ChaCha8Rng, report: &mut SweepReport) {
    let rho = d.rho;
    let space = rho.space();
    let opt = optimize_generator(rho, GeneratorFamily::for_space(space)).unwrap();
    let exact = opt.qfi.value;
    let x = opt.generator.matrix();

    // uncertainty relation with a random second observable
    let (y, system) = match space {
        SpaceSpec::Fock { .. } => {
            let q = quadrature(space, 0, rng.gen_range(-3.2..3.2)).unwrap();
            let n = number(space, 0).unwrap();
            let c = rng.gen_range(-0.5..0.5);
            let mut m = q.matrix().clone();
            for i in 0..m.dim() {
                for j in 0..m.dim() {
                    m[(i, j)] += n[(i, j)] * c;
                }
            }
            (m, StaticSystem::PhotonicModes { modes: 1 })
        }
        SpaceSpec::Spin { particles } => (
            spin_axis(space, random_unit(rng)).unwrap().matrix().clone(),
            StaticSystem::Spin { particles },
        ),
    };
    let z = x.commutator(&y).scale(C64::new(0.0, 1.0));
    let var_y = rho.variance(&y);
    if var_y > 1e-9 {
        let rec = VarianceRecord::moments(system, var_y, 0.0, rho.expectation(&z).re, 0.0);
        report.check("static", &d.label, static_bound(&rec).unwrap().qfi_lower, exact);
    }

    let theta = rng.gen_range(0.02..0.4);
    let (p, q) = match space {
        SpaceSpec::Fock { .. } => {
            let prop = Propagator::new(&opt.generator).unwrap();
            let moved = rho.evolved(&prop, theta);
            moved.check_truncation().unwrap();
            (rho.populations(), moved.populations())
        }
        SpaceSpec::Spin { .. } => {
            let axis = spin_axis_of(&opt.parameters);
            let scan = SpinParityScan::new(rho, axis, ParityAxis::Z).unwrap();
            (scan.populations(0.0), scan.populations(theta))
        }
    };
    let renorm = |v: Vec<f64>| {
        let v: Vec<f64> = v.into_iter().map(|x| x.max(0.0)).collect();
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect::<Vec<_>>()
    };
    let (p, q) = (renorm(p), renorm(q));
    let pair = ProbabilityPair::new(p.clone(), q.clone(), theta)
        .unwrap()
        .with_scale(d.scale, d.normalization)
        .unwrap();
    report.check("bhattacharyya", &d.label, bhattacharyya_bound(&pair).unwrap().qfi_lower, exact);
    let sig: Vec<f64> = p.iter().map(|v| 0.01 * v.sqrt()).collect();
    let sig_q: Vec<f64> = q.iter().map(|v| 0.01 * v.sqrt()).collect();
    let noisy = pair.with_uncertainty(sig, sig_q).unwrap();
    let mc = MonteCarlo {
        samples: 200,
        seed: 3,
    };
    report.check("histogram", &d.label, histogram_bound(&noisy, mc).unwrap().qfi_lower, exact);

    // pairwise scan of an exact parity record
    let t0 = rng.gen_range(0.02..0.2);
    let samples: Vec<Sample> = match space {
        SpaceSpec::Fock { .. } => {
            let angle = opt.parameters[0];
            let scan = qfisize::states::DisplacedParityScan::new(rho, angle).unwrap();
            (-4..=4)
                .map(|n| {
                    let t = n as f64 * t0;
                    Sample::new(t, scan.at(t).unwrap().clamp(-1.0, 1.0), 0.0)
                })
                .collect()
        }
        SpaceSpec::Spin { .. } => {
            let measure = [ParityAxis::X, ParityAxis::Y, ParityAxis::Z][rng.gen_range(0..3)];
            let scan = SpinParityScan::new(rho, spin_axis_of(&opt.parameters), measure).unwrap();
            (-4..=4)
                .map(|n| {
                    let t = n as f64 * t0;
                    Sample::new(t, scan.at(t).unwrap().clamp(-1.0, 1.0), 0.0)
                })
                .collect()
        }
    };
    let mut opts = PairwiseOptions::new(3, MonteCarlo { samples: 0, seed: 0 });
    opts.generator_scale = d.scale;
    opts.normalization = d.normalization;
    let scan = pairwise_scan(&samples, &opts).unwrap();
    let top = scan
        .pairs
        .iter()
        .map(|p| p.bound.qfi_lower)
        .fold(0.0, f64::max);
    report.check("pairwise", &d.label, top, exact);
}

fn spin_axis_of(params: &[f64]) -> [f64; 3] {
    [params[0], params[1], params[2]]
}

/// Random Fock states (dimension ≤ 10) and random spin states (N ≤ 8):
/// static, Bhattacharyya, histogram and pairwise bounds. Damped cats and
/// GHZ states, for which the fringe models are exact, additionally run the
/// fitted and shortcut bounds.
pub fn soundness_sweep(fock: usize, spin: usize, model: usize, seed: u64) -> SweepReport {
    let mut report = SweepReport::default();
    for i in 0..fock {
        let mut r = rng::stream(seed, i as u64);
        let support = r.gen_range(2..=10);
        let space = SpaceSpec::Fock {
            cutoff: FOCK_CUTOFF,
            modes: 1,
        };
        let rho = random_state(space, support, &mut r);
        let d = Dynamics {
            label: format!("fock#{i}(d={support})"),
            rho: &rho,
            scale: 1.0,
            normalization: 1.0,
        };
        generic_checks(&d, &mut r, &mut report);
        report.states += 1;
    }
    for i in 0..spin {
        let mut r = rng::stream(seed, (1000 + i) as u64);
        let particles = r.gen_range(1..=8);
        let space = SpaceSpec::Spin { particles };
        let rho = random_state(space, particles + 1, &mut r);
        let d = Dynamics {
            label: format!("spin#{i}(N={particles})"),
            rho: &rho,
            scale: 0.5,
            normalization: particles as f64,
        };
        generic_checks(&d, &mut r, &mut report);
        report.states += 1;
    }
    for i in 0..model {
        let mut r = rng::stream(seed, (2000 + i) as u64);
        let a = r.gen_range(0.05..1.0);
        let phase = r.gen_range(-3.1..3.1);
        if i % 2 == 0 {
            let alpha = r.gen_range(2.5..3.5);
            let spec = StateSpec::Cat(CatSpec::new(C64::new(alpha, 0.0), phase, a).unwrap());
            let rho = make_state(&spec).unwrap();
            let label = spec.describe();
            let exact = optimize_generator(&rho, GeneratorFamily::PhaseSpace).unwrap().qfi.value;
            let m = WignerCatModel::new(a, 4.0 * alpha * alpha, phase).unwrap();
            report.check("fitted", &label, fitted_bound(&m).unwrap().qfi_lower, exact);
            report.check("shortcut", &label, shortcut_a2s(&m).unwrap().qfi_lower, exact);
            let d = Dynamics {
                label,
                rho: &rho,
                scale: 1.0,
                normalization: 1.0,
            };
            generic_checks(&d, &mut r, &mut report);
        } else {
            let particles = r.gen_range(2..=8);
            let spec = StateSpec::Ghz {
                particles,
                damping: a,
                phase,
            };
            let rho = make_state(&spec).unwrap();
            let label = spec.describe();
            let exact = optimize_generator(&rho, GeneratorFamily::CollectiveSpin).unwrap().qfi.value;
            let m = FringeModel::new(a, particles, phase).unwrap();
            report.check("fitted", &label, fitted_bound(&m).unwrap().qfi_lower, exact);
            report.check("shortcut", &label, shortcut_a2s(&m).unwrap().qfi_lower, exact);
            let d = Dynamics {
                label,
                rho: &rho,
                scale: 0.5,
                normalization: particles as f64,
            };
            generic_checks(&d, &mut r, &mut report);
        }
        report.states += 1;
    }
    report
}
