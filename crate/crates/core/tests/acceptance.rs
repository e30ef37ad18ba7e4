//! Acceptance run: one line per criterion, non-zero exit if any fails.
//!
//! Reference values are computed here from closed forms and from dense
//! matrices built with plain Kronecker products, not from the library's
//! own analytic helpers.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use highspin::experiments::{csv_string, run_sweep, Experiment, ShotMode, SweepConfig, SweepRow};
use highspin::models::{InitialState, ISING_QUBITS};
use highspin::noise::{circuit_error_budget, error_budget, DeviceParams};
use highspin::protocols::{
    correlation, correlation_from_distribution, magnetic_distribution, mean_component, mean_from_distribution,
    measurement_circuit, Estimate, EstimateMode, MeanVector, Probe,
};
use highspin::qasm::{emit_qasm, parse_qasm};
use highspin::sim::{run_circuit, Circuit, Gate, StateVector};
use highspin::spin::{algebra_residuals, singlet_leakage, Axis, SpinRegister, SpinValue};

struct Outcome {
    pass: bool,
    detail: String,
}

fn grid() -> Vec<f64> {
    (0..41).map(|i| i as f64 * PI / 20.0).collect()
}

fn exact_sweep(e: Experiment, initial: InitialState) -> Vec<SweepRow> {
    let mut cfg = SweepConfig::new(e).exact();
    cfg.initial = initial;
    run_sweep(&cfg).expect("sweep")
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed())
}

fn max_err(rows: &[SweepRow], idx: std::ops::Range<usize>, want: impl Fn(f64) -> Vec<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for r in rows {
        let w = want(r.param);
        for (i, j) in idx.clone().enumerate() {
            worst = worst.max((r.estimates[j].value - w[i]).abs());
        }
    }
    worst
}

fn field_probabilities() -> Outcome {
    let ((up, zero), t) = timed(|| {
        (
            exact_sweep(Experiment::MagField, InitialState::Up),
            exact_sweep(Experiment::MagField, InitialState::Zero),
        )
    });
    let e_up = max_err(&up, 0..3, |w| {
        let (s, c) = (w / 2.0).sin_cos();
        vec![c.powi(4), 0.5 * w.sin().powi(2), s.powi(4)]
    });
    let e_zero = max_err(&zero, 0..3, |w| {
        let h = 0.5 * w.sin().powi(2);
        vec![h, w.cos().powi(2), h]
    });
    let err = e_up.max(e_zero);
    Outcome {
        pass: up.len() == 41 && err < 1e-10 && t < Duration::from_secs(1),
        detail: format!("max |err| {err:.2e} over {} points, {:.0} ms", up.len(), t.as_secs_f64() * 1e3),
    }
}

fn field_means() -> Outcome {
    let ((up, zero), t) = timed(|| {
        (
            exact_sweep(Experiment::MagField, InitialState::Up),
            exact_sweep(Experiment::MagField, InitialState::Zero),
        )
    });
    let err = max_err(&up, 3..6, |w| vec![0.0, -w.sin(), w.cos()])
        .max(max_err(&zero, 3..6, |_| vec![0.0; 3]));
    Outcome {
        pass: err < 1e-10 && t < Duration::from_secs(1),
        detail: format!("max |err| {err:.2e}, {:.0} ms", t.as_secs_f64() * 1e3),
    }
}

fn ising_results() -> Outcome {
    let (rows, t) = timed(|| exact_sweep(Experiment::Ising, InitialState::XPolarized));
    let err = max_err(&rows, 6..8, |jt| vec![jt.cos().abs(), jt.cos()]);
    Outcome {
        pass: rows.len() == 41 && err < 1e-10 && t < Duration::from_secs(1),
        detail: format!("|<S1>| and <S1x s2x>: max |err| {err:.2e}, {:.0} ms", t.as_secs_f64() * 1e3),
    }
}

/// Estimator values and their stderr at `shots`, evaluated on the exact
/// outcome distributions of the measurement circuits. This is the spread
/// the sampled estimates should show around the analytic curve.
fn expected_spread(cfg: &SweepConfig, param: f64, shots: u64) -> Vec<Estimate> {
    let spin1 = SpinRegister::new(SpinValue::ONE, 0);
    let partner = Probe::pauli(SpinRegister::new(SpinValue::HALF, 2), Axis::X);
    let base = cfg.circuit_at(param).unwrap();
    let dist = |probes: &[Probe]| {
        let c = measurement_circuit(&base, probes).unwrap();
        run_circuit(&c, &StateVector::zero(c.n_qubits()).unwrap()).unwrap().probabilities()
    };
    let [px, py, pz] = Axis::ALL.map(|a| Probe::new(spin1, a));
    let dx = if cfg.experiment == Experiment::Ising { dist(&[px, partner]) } else { dist(&[px]) };
    let dz = dist(&[pz]);
    let n = shots as f64;
    let mut out: Vec<Estimate> = magnetic_distribution(&dz, &spin1)
        .unwrap()
        .into_iter()
        .map(|p| Estimate { value: p, stderr: (p * (1.0 - p) / n).sqrt(), mode: EstimateMode::Sampled { shots } })
        .collect();
    let means = [
        mean_from_distribution(&dx, &px, Some(shots)).unwrap(),
        mean_from_distribution(&dist(&[py]), &py, Some(shots)).unwrap(),
        mean_from_distribution(&dz, &pz, Some(shots)).unwrap(),
    ];
    out.extend(means);
    if cfg.experiment == Experiment::Ising {
        out.push(MeanVector::from_components(means).magnitude);
        out.push(correlation_from_distribution(&dx, &px, &partner, Some(shots)).unwrap());
    }
    out
}

fn sampled_consistency() -> Outcome {
    let mut points = 0usize;
    let mut good = 0usize;
    let mut good_plugin = 0usize;
    let cases = [
        (Experiment::MagField, InitialState::Up),
        (Experiment::MagField, InitialState::Zero),
        (Experiment::Ising, InitialState::XPolarized),
    ];
    for (e, initial) in cases {
        let mut cfg = SweepConfig::new(e);
        cfg.initial = initial;
        assert_eq!(cfg.shots, ShotMode::Shots(1024));
        let spread: Vec<Vec<Estimate>> = grid().iter().map(|&p| expected_spread(&cfg, p, 1024)).collect();
        for seed in 1..=20u64 {
            cfg.seed = seed;
            for (r, want) in run_sweep(&cfg).expect("sweep").iter().zip(&spread) {
                points += 1;
                let pairs = || r.estimates.iter().zip(want);
                good += pairs().all(|(s, a)| (s.value - a.value).abs() <= 5.0 * a.stderr) as usize;
                good_plugin += pairs().all(|(s, a)| (s.value - a.value).abs() <= 5.0 * s.stderr) as usize;
            }
        }
    }
    let frac = good as f64 / points as f64;
    Outcome {
        pass: frac >= 0.99,
        detail: format!(
            "{good}/{points} points ({:.2}%) within 5 multinomial stderr, 1024 shots, 20 seeds \
             (per-run plug-in stderr: {:.2}%)",
            100.0 * frac,
            100.0 * good_plugin as f64 / points as f64
        ),
    }
}

fn budget() -> Outcome {
    let d = DeviceParams::default();
    let gates = error_budget(20, 4, 0, &d).gates;
    let two = error_budget(20, 4, 2, &d).total();
    let three = error_budget(20, 4, 3, &d).total();
    let pass = (gates - 5.612).abs() <= 0.005 && (two - 14.0).abs() <= 0.005 && (three - 16.63).abs() <= 0.005;
    Outcome {
        pass,
        detail: format!("gates {gates:.3}%, 2-qubit mean {two:.3}%, 3-qubit correlation {three:.3}%"),
    }
}

/// Noisy Ising sweep stays within the additive budget of its own circuit
/// and the noise-free estimates are recovered when every rate is zero.
fn noise_pipeline() -> Outcome {
    let device = DeviceParams::default();
    let mut cfg = SweepConfig::new(Experiment::Ising).exact();
    cfg.noise = Some(device);
    let rows = run_sweep(&cfg).expect("noisy sweep");
    let mut worst: f64 = 0.0;
    let mut leak: f64 = 0.0;
    for r in &rows {
        worst = worst.max((r.estimates[7].value - r.param.cos()).abs());
        leak = leak.max(r.leakage);
    }
    let with_rotation = measurement_circuit(
        &cfg.circuit_at(0.0).unwrap(),
        &[
            Probe::new(SpinRegister::new(SpinValue::ONE, 0), Axis::X),
            Probe::pauli(SpinRegister::new(SpinValue::HALF, 2), Axis::X),
        ],
    )
    .unwrap();
    let bound = circuit_error_budget(&with_rotation, ISING_QUBITS, &device).total() / 100.0;

    cfg.noise = Some(DeviceParams {
        single_qubit_gate_error: 0.0,
        cx_gate_error: 0.0,
        readout_error: 0.0,
        shots: 1024,
    });
    let clean = run_sweep(&cfg).expect("zero-rate sweep");
    let reference = exact_sweep(Experiment::Ising, InitialState::XPolarized);
    let mut drift: f64 = 0.0;
    for (a, b) in clean.iter().zip(&reference) {
        for (x, y) in a.estimates.iter().zip(&b.estimates) {
            drift = drift.max((x.value - y.value).abs());
        }
    }
    Outcome {
        pass: worst <= bound && worst > 0.0 && drift == 0.0,
        detail: format!(
            "max |corr - cos Jt| {worst:.4} <= budget {bound:.4}; leakage reported up to {leak:.2e}; zero-rate drift {drift:.1e}"
        ),
    }
}

fn algebra_suite() -> Outcome {
    let (res, t) = timed(|| {
        (1..=6)
            .map(|t| algebra_residuals(SpinValue::from_twice(t).unwrap()).unwrap())
            .collect::<Vec<_>>()
    });
    let worst = res.iter().map(|r| r.max()).fold(0.0, f64::max);
    Outcome {
        pass: worst < 1e-12 && t < Duration::from_secs(60),
        detail: format!("s = 1/2..3, worst residual {worst:.2e}, {:.2} s", t.as_secs_f64()),
    }
}

type Dense = Vec<Vec<Complex64>>;

fn kron(a: &Dense, b: &Dense) -> Dense {
    let (n, m) = (a.len(), b.len());
    let mut out = vec![vec![Complex64::new(0.0, 0.0); n * m]; n * m];
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                for l in 0..m {
                    out[i * m + k][j * m + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

fn pauli(axis: Axis) -> Dense {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    match axis {
        Axis::X => vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]],
        Axis::Y => vec![vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]],
        Axis::Z => vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(-1.0, 0.0)]],
    }
}

fn identity(d: usize) -> Dense {
    (0..d)
        .map(|i| (0..d).map(|j| Complex64::new((i == j) as u8 as f64, 0.0)).collect())
        .collect()
}

/// `scale · Σ_{q in qubits} σ_q^axis` on `n` qubits, qubit 0 leftmost.
fn summed_pauli(n: usize, qubits: std::ops::Range<usize>, axis: Axis, scale: f64) -> Dense {
    let d = 1 << n;
    let mut total = vec![vec![Complex64::new(0.0, 0.0); d]; d];
    for q in qubits {
        let mut op = identity(1);
        for k in 0..n {
            op = kron(&op, &if k == q { pauli(axis) } else { identity(2) });
        }
        for i in 0..d {
            for j in 0..d {
                total[i][j] += op[i][j] * scale;
            }
        }
    }
    total
}

fn matmul(a: &Dense, b: &Dense) -> Dense {
    let d = a.len();
    (0..d)
        .map(|i| (0..d).map(|j| (0..d).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

fn expectation(op: &Dense, psi: &[Complex64]) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..psi.len() {
        for j in 0..psi.len() {
            acc += psi[i].conj() * op[i][j] * psi[j];
        }
    }
    acc.re
}

fn random_state(n: usize, rng: &mut ChaCha8Rng) -> StateVector {
    let amps = (0..1usize << n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    StateVector::normalized(amps).unwrap()
}

fn random_register(n: usize, rng: &mut ChaCha8Rng) -> SpinRegister {
    let width = rng.random_range(1..=n);
    let first = rng.random_range(0..=n - width);
    SpinRegister::new(SpinValue::from_twice(width as u32).unwrap(), first)
}

fn estimator_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut correlations = 0;
    for _ in 0..200 {
        let n = rng.random_range(1..=4);
        let psi = random_state(n, &mut rng);
        let reg = random_register(n, &mut rng);
        for axis in Axis::ALL {
            let op = summed_pauli(n, reg.qubits(), axis, 0.5);
            let got = mean_component(&psi, &reg, axis).unwrap().value;
            worst = worst.max((got - expectation(&op, psi.amplitudes())).abs());
        }
        if n >= 2 {
            let split = rng.random_range(1..n);
            let a = SpinRegister::new(SpinValue::from_twice(split as u32).unwrap(), 0);
            let b = SpinRegister::new(SpinValue::from_twice((n - split) as u32).unwrap(), split);
            let (ax, bx) = (Axis::ALL[rng.random_range(0..3)], Axis::ALL[rng.random_range(0..3)]);
            let op = matmul(
                &summed_pauli(n, a.qubits(), ax, 0.5),
                &summed_pauli(n, b.qubits(), bx, 0.5),
            );
            let got = correlation(&psi, &Probe::new(a, ax), &Probe::new(b, bx)).unwrap().value;
            worst = worst.max((got - expectation(&op, psi.amplitudes())).abs());
            correlations += 1;
        }
    }
    Outcome {
        pass: worst < 1e-10,
        detail: format!("200 states ({correlations} with correlations), max |err| {worst:.2e}"),
    }
}

fn leakage() -> Outcome {
    let mut worst: f64 = 0.0;
    let spin1 = SpinRegister::new(SpinValue::ONE, 0);
    for (e, initial) in [
        (Experiment::MagField, InitialState::Up),
        (Experiment::MagField, InitialState::Zero),
        (Experiment::Ising, InitialState::XPolarized),
    ] {
        let mut cfg = SweepConfig::new(e).exact();
        cfg.initial = initial;
        for p in grid() {
            let c = cfg.circuit_at(p).unwrap();
            let psi = run_circuit(&c, &StateVector::zero(c.n_qubits()).unwrap()).unwrap();
            worst = worst.max(singlet_leakage(&psi, &spin1).unwrap());
        }
    }
    Outcome {
        pass: worst < 1e-12,
        detail: format!("max singlet leakage {worst:.2e} over both circuits and the grid"),
    }
}

fn random_circuit(rng: &mut ChaCha8Rng) -> Circuit {
    let n = rng.random_range(1..=5);
    let mut c = Circuit::new(n).unwrap();
    for _ in 0..rng.random_range(0..60) {
        let q = rng.random_range(0..n);
        let [t, f, l] = [(); 3].map(|_| rng.random_range(-2.0 * PI..2.0 * PI));
        let g = match rng.random_range(0..6) {
            0 => Gate::Id(q),
            1 => Gate::X(q),
            2 => Gate::SX(q),
            3 => Gate::rz(q, t),
            4 => Gate::u3(q, t, f, l),
            _ if n > 1 => Gate::cx(q, (q + rng.random_range(1..n)) % n),
            _ => Gate::X(q),
        };
        c.push(g).unwrap();
    }
    c
}

fn round_trip_distance(c: &Circuit) -> f64 {
    let back = parse_qasm(&emit_qasm(c, true)).unwrap();
    let z = StateVector::zero(c.n_qubits()).unwrap();
    run_circuit(c, &z)
        .unwrap()
        .distance_up_to_phase(&run_circuit(&back, &z).unwrap())
        .unwrap()
}

fn qasm_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        worst = worst.max(round_trip_distance(&random_circuit(&mut rng)));
    }
    for (e, initial) in [
        (Experiment::MagField, InitialState::Up),
        (Experiment::MagField, InitialState::Zero),
        (Experiment::Ising, InitialState::XPolarized),
    ] {
        let mut cfg = SweepConfig::new(e);
        cfg.initial = initial;
        for p in grid() {
            worst = worst.max(round_trip_distance(&cfg.circuit_at(p).unwrap()));
        }
    }
    let ising = emit_qasm(&SweepConfig::new(Experiment::Ising).circuit_at(PI / 2.0).unwrap(), true);
    let cx = ising.lines().filter(|l| l.trim_start().starts_with("cx ")).count();
    Outcome {
        pass: worst < 1e-12 && cx == 4,
        detail: format!("max distance {worst:.2e} (100 random + experiment circuits), ising cx count {cx}"),
    }
}

fn determinism() -> Outcome {
    let cfg = SweepConfig::new(Experiment::Ising);
    let a = csv_string(cfg.experiment, &run_sweep(&cfg).unwrap());
    let b = csv_string(cfg.experiment, &run_sweep(&cfg).unwrap());
    Outcome {
        pass: a == b,
        detail: format!("two sampled runs, {} bytes each, identical: {}", a.len(), a == b),
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("field probabilities", field_probabilities),
        ("field means", field_means),
        ("ising magnitude and correlation", ising_results),
        ("sampled consistency", sampled_consistency),
        ("error budget", budget),
        ("noise pipeline", noise_pipeline),
        ("spin algebra", algebra_suite),
        ("estimators vs dense oracle", estimator_oracle),
        ("singlet leakage", leakage),
        ("qasm round trip", qasm_round_trip),
        ("csv determinism", determinism),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let o = f();
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += !o.pass as usize;
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
