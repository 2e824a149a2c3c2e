//! Acceptance suite. Runs every criterion, prints one line per criterion and
//! exits non-zero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use superbroadcast::circuits::{
    broadcast_noise_bound, copies, displaced_inputs, exact_broadcast_ancilla, phase_conj_noise_bound,
    purification_noise_bound, run_exact_broadcast, run_phase_conj_broadcast, run_superbroadcast,
    superbroadcast_threshold, BroadcastMode, BroadcastSpec,
};
use superbroadcast::feedforward::{ensemble_channel, monte_carlo_run, params_for_gain};
use superbroadcast::fock::{
    fock_fidelity, fock_partial_trace, fock_run_broadcast, fock_thermal, gaussian_from_fock_moments,
    FockDensityMatrix,
};
use superbroadcast::gaussian::{
    coherent_state, gaussian_fidelity_single_mode, max_abs_diff, ppt_min_symplectic_eigenvalue,
    thermal_state, vacuum, GaussianChannel, GaussianState, SymplecticTransform,
};
use superbroadcast::par::Execution;
use superbroadcast::{Complex64, Error};

const EXACT: f64 = 1e-9;
const ALGEBRAIC: f64 = 1e-12;
const NBARS: [f64; 4] = [0.0, 0.5, 1.0, 2.0];

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

/// Literal closed form for the clone thermal photons, amplifying branch.
fn super_formula(n: usize, m: usize, nbar: f64) -> f64 {
    let (n, m) = (n as f64, m as f64);
    (m * nbar + m - n) / (m * n)
}

fn amplifying_grid() -> Vec<(usize, usize)> {
    (1..=12)
        .flat_map(|m| (1..m).map(move |n| (n, m)))
        .collect()
}

fn alpha() -> Complex64 {
    Complex64::new(0.5, -0.25)
}

fn c1_superbroadcast() -> Verdict {
    let t0 = Instant::now();
    let out = run_superbroadcast(&copies(&thermal_state(1.0).unwrap(), 2), 3).unwrap();
    let headline = (0..3)
        .map(|k| (out.thermal_photons(k).unwrap() - 2.0 / 3.0).abs())
        .fold(0.0, f64::max);
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for (n, m) in amplifying_grid() {
        for nbar in NBARS {
            let out = run_superbroadcast(&displaced_inputs(n, nbar, alpha()).unwrap(), m).unwrap();
            for k in 0..m {
                worst = worst.max((out.thermal_photons(k).unwrap() - super_formula(n, m, nbar)).abs());
            }
            points += 1;
        }
    }
    let elapsed = t0.elapsed();
    verdict(
        headline <= EXACT && worst <= EXACT && within(elapsed, 1.0),
        format!("(2,3,1) err {headline:.1e}; {points} grid points max err {worst:.1e}; {elapsed:.2?}"),
    )
}

fn c2_threshold() -> Verdict {
    let mut mismatches = 0;
    let mut checked = 0;
    for (n, m) in amplifying_grid().into_iter().filter(|&(n, _)| n >= 2) {
        let thr = (m - n) as f64 / (m as f64 * (n - 1) as f64);
        for i in 0..=40 {
            let nbar = i as f64 * 0.05;
            if (nbar - thr).abs() < EXACT {
                continue;
            }
            let out = run_superbroadcast(&displaced_inputs(n, nbar, alpha()).unwrap(), m).unwrap();
            let shrinks = out.thermal_photons(0).unwrap() <= nbar;
            checked += 1;
            if shrinks != (nbar >= thr) {
                mismatches += 1;
            }
        }
    }
    let limit = superbroadcast_threshold(2, 1_000_000);
    let limit_err = (limit - 1.0).abs();
    let never = superbroadcast_threshold(1, 5).is_infinite();
    verdict(
        mismatches == 0 && limit_err <= 1e-5 && never,
        format!("{mismatches}/{checked} mismatches; threshold(2,1e6) = {limit:.7}"),
    )
}

fn c3_cloning_limit() -> Verdict {
    let out = run_superbroadcast(&vacuum(1), 2).unwrap();
    let nbar = out.thermal_photons(0).unwrap();
    let f = gaussian_fidelity_single_mode(&out.partial_trace(&[0]).unwrap(), &vacuum(1)).unwrap();
    let gauss_ok = (nbar - 0.5).abs() <= EXACT && (f - 2.0 / 3.0).abs() <= EXACT;

    let t0 = Instant::now();
    let run = fock_run_broadcast(1, 2, 0.0, Complex64::new(0.0, 0.0), 12).unwrap();
    let local = fock_partial_trace(&run.output, &[0]).unwrap();
    let fock_f = fock_fidelity(&local, &FockDensityMatrix::vacuum(1, 12)).unwrap();
    let elapsed = t0.elapsed();
    verdict(
        gauss_ok && (fock_f - 2.0 / 3.0).abs() <= 1e-4 && within(elapsed, 30.0),
        format!("nbar'' = {nbar:.12}, F = {f:.12}; Fock F = {fock_f:.7} in {elapsed:.2?}"),
    )
}

fn c4_purification() -> Verdict {
    let mut worst: f64 = 0.0;
    for n in 2..=4 {
        for m in 1..=n {
            for nbar in [0.3, 0.9, 1.5] {
                let out = run_superbroadcast(&displaced_inputs(n, nbar, alpha()).unwrap(), m).unwrap();
                for k in 0..m {
                    worst = worst.max((out.thermal_photons(k).unwrap() - nbar / n as f64).abs());
                }
            }
        }
    }
    verdict(worst <= EXACT, format!("max |nbar_out - nbar/N| = {worst:.1e}"))
}

fn c5_exact() -> Verdict {
    let (n, m) = (2, 3);
    let mut worst_state: f64 = 0.0;
    let mut worst_mbar: f64 = 0.0;
    for nbar in [1.0 / 3.0, 0.5, 1.0, 2.0] {
        let spec = BroadcastSpec::new(n, m, nbar, alpha(), BroadcastMode::Exact);
        let out = run_exact_broadcast(&spec).unwrap();
        let input = displaced_inputs(1, nbar, alpha()).unwrap();
        for k in 0..m {
            let clone = out.partial_trace(&[k]).unwrap();
            worst_state = worst_state
                .max(max_abs_diff(clone.cov(), input.cov()))
                .max((clone.mean() - input.mean()).amax());
        }
        let literal = (3.0 * nbar - 1.0) / 4.0;
        worst_mbar = worst_mbar.max((exact_broadcast_ancilla(n, m, nbar).unwrap() - literal).abs());
    }
    let mut disagreements = 0;
    for i in 0..=40 {
        let nbar = i as f64 * 0.05;
        let spec = BroadcastSpec::new(n, m, nbar, alpha(), BroadcastMode::Exact);
        let exact_ok = match run_exact_broadcast(&spec) {
            Ok(_) => true,
            Err(Error::Infeasible { mbar }) => {
                assert!(mbar < 0.0);
                false
            }
            Err(e) => panic!("unexpected error {e}"),
        };
        let out = run_superbroadcast(&displaced_inputs(n, nbar, alpha()).unwrap(), m).unwrap();
        let super_ok = out.thermal_photons(0).unwrap() <= nbar;
        if exact_ok != super_ok {
            disagreements += 1;
        }
    }
    let rejected = matches!(
        run_exact_broadcast(&BroadcastSpec::new(n, m, 0.2, alpha(), BroadcastMode::Exact)),
        Err(Error::Infeasible { .. })
    );
    verdict(
        worst_state <= EXACT && worst_mbar <= ALGEBRAIC && disagreements == 0 && rejected,
        format!(
            "clone err {worst_state:.1e}, mbar err {worst_mbar:.1e}, {disagreements} feasibility disagreements"
        ),
    )
}

fn c6_bounds() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut track = |achieved: f64, bound: f64| worst = worst.max((achieved - bound).abs());
    for (n, m) in amplifying_grid() {
        for nbar in NBARS {
            let out = run_superbroadcast(&displaced_inputs(n, nbar, alpha()).unwrap(), m).unwrap();
            let bound = broadcast_noise_bound(n, m, nbar + 0.5).unwrap();
            for k in 0..m {
                track(out.quadrature_noise_sum(k).unwrap(), bound);
            }
        }
    }
    for n in 2..=4 {
        for m in 1..=n {
            for nbar in [0.3, 0.9, 1.5] {
                let out = run_superbroadcast(&displaced_inputs(n, nbar, alpha()).unwrap(), m).unwrap();
                let bound = purification_noise_bound(n, nbar + 0.5).unwrap();
                for k in 0..m {
                    track(out.quadrature_noise_sum(k).unwrap(), bound);
                }
            }
        }
    }
    for (n, m) in [(2, 2), (2, 3), (3, 4)] {
        for nbar in NBARS {
            let out = run_phase_conj_broadcast(&displaced_inputs(n, nbar, alpha()).unwrap(), m).unwrap();
            let bound = phase_conj_noise_bound(n, nbar + 0.5).unwrap();
            for k in 0..m {
                track(out.quadrature_noise_sum(k).unwrap(), bound);
            }
        }
    }
    verdict(worst <= EXACT, format!("max |Gamma - bound| = {worst:.1e}"))
}

/// Squeezed thermal state with `photons` total photons, a fixed thermal part
/// and the squeezing solved for.
fn squeezed_thermal(photons: f64) -> GaussianState {
    let nth = 0.1;
    let base = (2.0 * nth + 1.0) / 4.0;
    // photons = 2 base cosh(2s) − 1/2
    let s = 0.5 * ((photons + 0.5) / (2.0 * base)).acosh();
    let cov = DMatrix::from_diagonal(&DVector::from_vec(vec![
        base * (-2.0 * s).exp(),
        base * (2.0 * s).exp(),
    ]));
    GaussianState::new(DVector::zeros(2), cov).unwrap()
}

fn c7_general_inputs() -> Verdict {
    let mut worst: f64 = 0.0;
    for photons in [0.5, 1.0, 2.0] {
        let one = squeezed_thermal(photons);
        assert!((one.mean_photons(0).unwrap() - photons).abs() < ALGEBRAIC);
        for (n, m) in [(2, 3), (2, 4), (3, 5)] {
            let out = run_superbroadcast(&copies(&one, n), m).unwrap();
            let want = photons / n as f64 + 1.0 / n as f64 - 1.0 / m as f64;
            for k in 0..m {
                worst = worst.max((out.mean_photons(k).unwrap() - want).abs());
            }
        }
    }
    verdict(worst <= EXACT, format!("max |photons - law| = {worst:.1e}"))
}

fn c8_feedforward() -> Verdict {
    let mut lines = Vec::new();
    let mut pass = true;
    for gain in [1.1, 1.5, 2.0, 3.0] {
        let p = params_for_gain(gain).unwrap();
        let amp = GaussianChannel::amplifier(gain).unwrap();
        let dev = ensemble_channel(p.tau, p.k).unwrap().max_deviation(&amp);
        let input = coherent_state(Complex64::new(1.0, 0.0));
        let expected = amp.apply(&input, &[0]).unwrap();
        let t0 = Instant::now();
        let est = monte_carlo_run(&input, 0, &p, Execution::default()).unwrap();
        let elapsed = t0.elapsed();
        let z = est.z_scores(&expected).unwrap().max_abs();
        pass &= dev <= ALGEBRAIC && z <= 3.0 && est.shots == 100_000 && within(elapsed, 10.0);
        lines.push(format!("G={gain}: dev {dev:.0e} |z|max {z:.2} {elapsed:.2?}"));
    }
    verdict(pass, lines.join("; "))
}

fn c9_oracle() -> Verdict {
    let t0 = Instant::now();
    let run = fock_run_broadcast(2, 3, 0.5, Complex64::new(0.0, 0.0), 14).unwrap();
    let target = {
        let th = fock_thermal(5.0 / 12.0, 14).unwrap();
        FockDensityMatrix::new(1, 14, th.matrix().clone(), 0.0).unwrap()
    };
    let gauss = run_superbroadcast(&copies(&thermal_state(0.5).unwrap(), 2), 3).unwrap();
    let mut min_f: f64 = 1.0;
    let mut worst_moment: f64 = 0.0;
    for k in 0..3 {
        let local = fock_partial_trace(&run.output, &[k]).unwrap();
        min_f = min_f.min(fock_fidelity(&local, &target).unwrap());
        let g = gaussian_from_fock_moments(&local).unwrap();
        let want = gauss.partial_trace(&[k]).unwrap();
        worst_moment = worst_moment
            .max(max_abs_diff(g.cov(), want.cov()))
            .max((g.mean() - want.mean()).amax());
    }
    let elapsed = t0.elapsed();
    verdict(
        min_f >= 1.0 - 1e-4 && worst_moment <= 1e-4 && within(elapsed, 60.0),
        format!(
            "1 - min F = {:.1e}, moment err {worst_moment:.1e}, deficit {:.1e}, {elapsed:.2?}",
            1.0 - min_f,
            run.output.trace_deficit()
        ),
    )
}

fn c10_separability() -> Verdict {
    let mut min = f64::INFINITY;
    for (n, m) in amplifying_grid() {
        for nbar in NBARS {
            let out = run_superbroadcast(&displaced_inputs(n, nbar, alpha()).unwrap(), m).unwrap();
            for k in 0..m {
                min = min.min(ppt_min_symplectic_eigenvalue(&out, &[k]).unwrap());
            }
        }
    }
    verdict(min >= 0.25 - EXACT, format!("min PPT eigenvalue {min:.12}"))
}

fn random_alpha(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))
}

fn c11_properties() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut violations = Vec::new();
    let mut count = |name: &str, bad: bool| {
        if bad {
            violations.push(name.to_string());
        }
    };

    for _ in 0..100 {
        let tau = rng.random_range(0.0..=1.0);
        let r = rng.random_range(0.0..1.5);
        let n = rng.random_range(1..=6);
        let bs = SymplecticTransform::beamsplitter(tau).unwrap();
        let sq = SymplecticTransform::two_mode_squeezer(r).unwrap();
        let dft = SymplecticTransform::dft_interferometer(n).unwrap();
        count("symplectic", bs.symplectic_residual() > ALGEBRAIC);
        count("symplectic", sq.then(&bs).unwrap().symplectic_residual() > 1e-10);
        count("symplectic", dft.symplectic_residual() > ALGEBRAIC);
    }

    for _ in 0..100 {
        let g = rng.random_range(1.0..5.0);
        let eta = rng.random_range(0.0..=1.0);
        let tau = rng.random_range(0.0..=1.0);
        let k = rng.random_range(0.0..3.0);
        for ch in [
            GaussianChannel::amplifier(g).unwrap(),
            GaussianChannel::attenuator(eta).unwrap(),
            GaussianChannel::phase_conjugation(g).unwrap(),
            ensemble_channel(tau, k).unwrap(),
        ] {
            count("cp", ch.cp_min_eigenvalue() < -1e-10);
            let state = superbroadcast::gaussian::displaced_thermal(eta * 2.0, random_alpha(&mut rng)).unwrap();
            let out = ch.apply(&state, &[0]).unwrap();
            count("uncertainty", out.uncertainty_min_eigenvalue() < -1e-10);
        }
    }

    for _ in 0..100 {
        let n = rng.random_range(1..=4);
        let m = rng.random_range(1..=6);
        let nbar = rng.random_range(0.0..2.0);
        let a = random_alpha(&mut rng);
        let plain = displaced_inputs(n, nbar, Complex64::new(0.0, 0.0)).unwrap();
        let shifted = plain.displace_all(a);
        for (conj, run) in [
            (false, run_superbroadcast as fn(&GaussianState, usize) -> superbroadcast::Result<GaussianState>),
            (true, run_phase_conj_broadcast),
        ] {
            let before = run(&shifted, m).unwrap();
            let after = run(&plain, m).unwrap().displace_all(if conj { a.conj() } else { a });
            count("covariance", before.cov() != after.cov());
            count("covariance", (before.mean() - after.mean()).amax() > ALGEBRAIC);
            count("uncertainty", before.uncertainty_min_eigenvalue() < -1e-10);
        }
    }

    for _ in 0..50 {
        let n = rng.random_range(1..=4);
        let m = rng.random_range(2..=8);
        let nbar = rng.random_range(0.0..2.0);
        let out = run_superbroadcast(&displaced_inputs(n, nbar, random_alpha(&mut rng)).unwrap(), m).unwrap();
        let i = rng.random_range(0..m);
        let j = (i + rng.random_range(1..m)) % m;
        let swapped = out.swap_modes(i, j).unwrap();
        count("permutation", max_abs_diff(swapped.cov(), out.cov()) > ALGEBRAIC);
    }

    verdict(
        violations.is_empty(),
        if violations.is_empty() {
            "0 violations over 5 property families".to_string()
        } else {
            format!("violations: {}", violations.join(", "))
        },
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("superbroadcast photons", c1_superbroadcast),
        ("threshold", c2_threshold),
        ("coherent cloning limit", c3_cloning_limit),
        ("purification rate", c4_purification),
        ("exact broadcasting", c5_exact),
        ("bound saturation", c6_bounds),
        ("general-input law", c7_general_inputs),
        ("feed-forward equivalence", c8_feedforward),
        ("Fock oracle equivalence", c9_oracle),
        ("separability", c10_separability),
        ("property suites", c11_properties),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            verdict(false, format!("panicked: {msg}"))
        });
        if !v.pass {
            failed += 1;
        }
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag} {name}: {}", i + 1, v.detail);
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
