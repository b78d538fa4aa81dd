//! Model-level acceptance checks against the reference device numbers.
//! Prints one PASS/FAIL line per criterion and exits non-zero on failure.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;

use eocavity::coupling::{calibrate_g0_from_nms, g0_general, g0_quasi_1d, CouplingInput, Grid3, GridModes};
use eocavity::fitting::{
    fit_lineshape_joint, fit_nms, lineshape_model, JointGuess, LineshapeGuess, NmsGuess, Trace,
};
use eocavity::microwave::{build_mode, AxialProfile, MicrowaveMode, ModeIndices, ResonatorSettings};
use eocavity::model::{
    angular_to_hz, default_ln_material, hz_to_angular, paper_device, paper_laser, paper_operating_point,
    wavelength_to_hz, CONSTANTS,
};
use eocavity::noise::{optimize_antenna_coupling, thermal_occupation, thermal_to_shot_ratio, AntennaBase};
use eocavity::optical::{find_resonances, linewidth_from_losses, stack_reflectivity, Layer, Port};
use eocavity::transduction::{
    cooperativity, efficiency_at, nms_spectrum, peak_efficiency, predict_g0, sweep_triple_resonance,
    NmsParams, SweepAxis, SweepSetup, TransductionParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn within(name: &str, v: f64, lo: f64, hi: f64) -> Check {
    if (lo..=hi).contains(&v) {
        Ok(format!("{name} = {v:.6} in [{lo}, {hi}]"))
    } else {
        Err(format!("{name} = {v:.6} outside [{lo}, {hi}]"))
    }
}

fn all(parts: Vec<Check>) -> Check {
    let mut ok = Vec::new();
    for p in parts {
        ok.push(p?);
    }
    Ok(ok.join("; "))
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn laser_omega() -> f64 {
    hz_to_angular(wavelength_to_hz(paper_laser().wavelength))
}

fn reference_settings() -> ResonatorSettings {
    ResonatorSettings {
        q_int: 1.3e3,
        kappa_ext: hz_to_angular(1.385e6),
        beam_offset: None,
        eps_eff: None,
    }
}

fn reference_mode(idx: ModeIndices) -> MicrowaveMode {
    let d = paper_device();
    build_mode(&d.slab, &d.material, idx, &reference_settings()).unwrap()
}

fn ar_coating() -> Check {
    let lambda = 1550e-9;
    let n = default_ln_material().n_opt;
    let coated = stack_reflectivity(n, &[Layer::new(1.444, 300e-9)], 1.0, lambda).reflectivity;
    let bare = stack_reflectivity(n, &[], 1.0, lambda).reflectivity;
    all(vec![
        within("R coated", coated, 0.004, 0.007),
        within("R bare", bare, 0.125, 0.145),
    ])
}

fn loss_budget() -> Check {
    let d = paper_device();
    let p = predict_g0(
        &d,
        laser_omega(),
        &reference_mode(ModeIndices::new(1, 3, 1)),
        None,
    )
    .unwrap();
    let lw = linewidth_from_losses(&d.stack(p.air_gap), p.pump.local_fsr, Port::Back).unwrap();
    all(vec![
        within("finesse", lw.finesse, 2100.0, 2350.0),
        within("kappa_o/2pi [MHz]", angular_to_hz(p.pump.kappa_o) / 1e6, 3.7, 4.7),
        within(
            "kappa_o from budget [MHz]",
            angular_to_hz(lw.kappa) / 1e6,
            3.7,
            4.7,
        ),
    ])
}

fn microwave_modes() -> Check {
    let m131 = reference_mode(ModeIndices::new(1, 3, 1));
    let m111 = reference_mode(ModeIndices::new(1, 1, 1));
    let (f131, f111) = (angular_to_hz(m131.omega) / 1e9, angular_to_hz(m111.omega) / 1e9);
    let order = if f111 < f131 {
        Ok("TM_111 below TM_131".to_string())
    } else {
        Err("TM_111 not below TM_131".to_string())
    };
    all(vec![
        within("TM_131 [GHz]", f131, 0.8 * 9.44, 1.2 * 9.44),
        within("TM_111 [GHz]", f111, 0.75 * 6.0, 1.25 * 6.0),
        order,
        within("V_m(TM_131) [mm^3]", m131.volume * 1e9, 50.0, 200.0),
    ])
}

fn coupling_prediction() -> Check {
    let d = paper_device();
    let mw = reference_mode(ModeIndices::new(1, 3, 1));
    let p = predict_g0(&d, laser_omega(), &mw, None).unwrap();
    let g0 = within("g0/2pi [Hz]", angular_to_hz(p.coupling.g0), 1.3, 2.1);

    // Without an air gap the crystal fills the cavity and there is no
    // air-facing surface left to coat.
    let mut filled = d.clone();
    filled.ar_coating = None;
    let stack = filled.stack(0.0);
    let w = laser_omega();
    let modes = find_resonances(&stack, (w - 2e11, w + 2e11), Port::Back).unwrap();
    let i = modes.iter().position(|m| m.omega > w).unwrap();
    let (pump, output) = (&modes[i - 1], &modes[i]);
    let resonant = MicrowaveMode {
        omega: output.omega - pump.omega,
        ..mw.clone()
    };
    let len = d.slab.len_x;
    let r = g0_quasi_1d(&CouplingInput::from_modes(
        &d.material,
        &resonant,
        pump,
        output,
        len,
    ));
    let zero = if r.overlap_integral.abs() < 1e-6 * len {
        Ok(format!(
            "|overlap| at zero gap = {:.3e} L",
            r.overlap_integral.abs() / len
        ))
    } else {
        Err(format!(
            "|overlap| at zero gap = {:.3e} L",
            r.overlap_integral.abs() / len
        ))
    };
    all(vec![g0, zero])
}

fn trapezoid(xs: &[f64]) -> Vec<f64> {
    let mut w = vec![0.0; xs.len()];
    for i in 0..xs.len() - 1 {
        let h = 0.5 * (xs[i + 1] - xs[i]);
        w[i] += h;
        w[i + 1] += h;
    }
    w
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Separable modes: a transversely uniform microwave `sin(πx/L)` and
/// Gaussian-waisted optical standing waves with `n k L = 40π, 40.5π`.
fn separable_g0(waist: f64) -> (f64, f64) {
    let mat = default_ln_material();
    let (n, len) = (mat.n_opt, 4e-3);
    let c = CONSTANTS.c;
    let omega_p = 40.0 * PI * c / (n * len);
    let omega_m = 0.5 * PI * c / (n * len);
    let omega_o = omega_p + omega_m;
    let (kp, ko) = (omega_p / c, omega_o / c);
    let v_m = 5.5e-8;

    let g = Grid3 {
        xs: grid(0.0, len, 2049),
        ys: grid(-3.0 * waist, 3.0 * waist, 41),
        zs: grid(-3.0 * waist, 3.0 * waist, 41),
    };
    let u = |y: f64, z: f64| (-(y * y + z * z) / (waist * waist)).exp();
    let psi_m = g.sample(|x, _, _| (PI * x / len).sin());
    let psi_p = g.sample(|x, y, z| (n * kp * x).sin() * u(y, z));
    let psi_o = g.sample(|x, y, z| (n * ko * x).sin() * u(y, z));
    let (wy, wz) = (trapezoid(&g.ys), trapezoid(&g.zs));
    let mut area = 0.0;
    for (j, y) in g.ys.iter().enumerate() {
        for (k, z) in g.zs.iter().enumerate() {
            area += wy[j] * wz[k] * u(*y, *z).powi(2);
        }
    }
    let v_opt = 0.5 * len * area;
    let general = g0_general(
        &mat,
        &g,
        &GridModes {
            psi_m: &psi_m,
            psi_p: &psi_p,
            psi_o: &psi_o,
            omegas: [omega_m, omega_p, omega_o],
            volumes: [v_m, v_opt, v_opt],
        },
    )
    .unwrap();
    let beam = g0_quasi_1d(&CouplingInput {
        material: mat,
        omega_m,
        volume_m: v_m,
        profile: AxialProfile::Standing {
            length: len,
            amplitude: 1.0,
            antinodes: 1,
        },
        omega_p,
        omega_o,
        l_eff_p: 0.5 * len,
        l_eff_o: 0.5 * len,
        crystal_len: len,
    });
    (general.abs(), beam.g0)
}

fn route_equivalence() -> Check {
    let mut worst: f64 = 0.0;
    let mut spread = Vec::new();
    for waist in [30e-6, 60e-6, 120e-6] {
        let (general, beam) = separable_g0(waist);
        worst = worst.max(rel(general, beam));
        spread.push(general);
    }
    let waist_dep = spread.iter().map(|g| rel(*g, spread[0])).fold(0.0, f64::max);
    all(vec![
        within("3-D vs beam-axis relative difference", worst, 0.0, 0.01),
        within("waist dependence", waist_dep, 0.0, 1e-9),
    ])
}

fn nms_calibration() -> Check {
    let g0 = calibrate_g0_from_nms(hz_to_angular(103e6), 1.3e15).unwrap();
    within("g0/2pi [Hz]", angular_to_hz(g0), 1.42, 1.44)
}

fn cooperativity_arithmetic() -> Check {
    let c = cooperativity(
        6.5e10,
        hz_to_angular(1.5),
        hz_to_angular(4.1e6),
        hz_to_angular(8.54e6),
    );
    all(vec![
        within("C", c, 0.0167 - 1e-4, 0.0167 + 1e-4),
        within("eta_peak", peak_efficiency(c, 0.683, 0.162), 0.005, 0.010),
    ])
}

fn lineshape_identity() -> Check {
    let op = paper_operating_point();
    let p = TransductionParams {
        n_p: op.n_p,
        g0: op.g0,
        kappa_o: op.kappa_o,
        kappa_o_ext: op.kappa_o_ext,
        kappa_m: op.kappa_m,
        kappa_m_ext: op.kappa_m_ext(),
        omega_m: op.omega_m,
        delta_op: op.omega_m,
    };
    let peak = p.peak_efficiency();
    let at = efficiency_at(&p, op.omega_m);
    let span = 50.0 * op.kappa_m;
    let excess = (0..10_000)
        .map(|i| op.omega_m - span + 2.0 * span * i as f64 / 9_999.0)
        .map(|w| efficiency_at(&p, w) - peak)
        .fold(f64::NEG_INFINITY, f64::max);
    all(vec![
        within("relative difference at resonance", rel(at, peak), 0.0, 1e-12),
        if excess <= 0.0 {
            Ok(format!("max(eta - eta_peak) = {excess:.3e}"))
        } else {
            Err(format!("eta exceeds eta_peak by {excess:.3e}"))
        },
    ])
}

fn local_maxima(v: &[f64], threshold: f64) -> Vec<usize> {
    (1..v.len() - 1)
        .filter(|&i| v[i] > threshold && v[i] >= v[i - 1] && v[i] > v[i + 1])
        .collect()
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s[s.len() / 2]
}

fn sweep_topology() -> Check {
    let device = paper_device();
    let laser = paper_laser();
    let modes = [
        reference_mode(ModeIndices::new(1, 3, 1)),
        reference_mode(ModeIndices::new(1, 1, 1)),
    ];
    let gaps = grid(6.5e-3, 10e-3, 351);
    let drive_hz = grid(5e9, 10e9, 5001);
    let drive: Vec<f64> = drive_hz.iter().map(|&f| hz_to_angular(f)).collect();
    let setup = SweepSetup {
        device: &device,
        laser: &laser,
        microwave: &modes,
        axis: SweepAxis::AirGap,
        axis_values: &gaps,
        air_gap: 0.0,
        drive: &drive,
    };
    let map = sweep_triple_resonance(&setup).unwrap();
    if !map.flagged().is_empty() {
        return Err(format!("flagged rows {:?}", map.flagged()));
    }
    let (rows, cols) = (gaps.len(), drive.len());

    // Ridges present in every row stand out in the per-column median.
    let col_median: Vec<f64> = (0..cols)
        .map(|j| median(&(0..rows).map(|i| map.magnitude[i][j]).collect::<Vec<_>>()))
        .collect();
    let floor = median(&col_median);
    let vertical: Vec<f64> = local_maxima(&col_median, 20.0 * floor)
        .into_iter()
        .map(|j| drive_hz[j])
        .collect();
    let expected: Vec<f64> = {
        let mut f: Vec<f64> = modes.iter().map(|m| angular_to_hz(m.omega)).collect();
        f.sort_by(f64::total_cmp);
        f
    };
    let vertical_ok =
        vertical.len() == 2 && vertical.iter().zip(&expected).all(|(a, b)| (a - b).abs() <= 2e6);

    // Remaining peaks, away from the vertical ridges, are linked row to row.
    let guard = 60e6;
    let mut tracks: Vec<Vec<(usize, f64)>> = Vec::new();
    for i in 0..rows {
        let row = &map.magnitude[i];
        let thr = 20.0 * median(row);
        for j in local_maxima(row, thr) {
            let f = drive_hz[j];
            if vertical.iter().any(|v| (f - v).abs() < guard) {
                continue;
            }
            let hit = tracks.iter_mut().find(|t| {
                let &(li, lf) = t.last().unwrap();
                let gap = (i - li) as f64;
                li < i && (f - lf).abs() < 30e6 + 10e6 * gap
            });
            match hit {
                Some(t) => t.push((i, f)),
                None => tracks.push(vec![(i, f)]),
            }
        }
    }
    let ridges: Vec<&Vec<(usize, f64)>> = tracks.iter().filter(|t| t.len() >= 20).collect();
    let drifts: Vec<f64> = ridges
        .iter()
        .map(|t| (t.last().unwrap().1 - t[0].1) / 1e9)
        .collect();
    let diagonal_ok = ridges.len() == 2 && drifts.iter().all(|d| d.abs() > 0.5);

    // Global maximum where a diagonal ridge meets a vertical one.
    let (mut bi, mut bj, mut best) = (0, 0, f64::NEG_INFINITY);
    for (i, row) in map.magnitude.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v > best {
                (bi, bj, best) = (i, j, v);
            }
        }
    }
    let f_max = drive_hz[bj];
    let on_vertical = vertical.iter().any(|v| (f_max - v).abs() <= 5e6);
    let on_diagonal = ridges.iter().any(|t| {
        let before = t.iter().rev().find(|p| p.0 <= bi);
        let after = t.iter().find(|p| p.0 >= bi);
        match (before, after) {
            (Some(a), Some(b)) if a.0 == b.0 => (a.1 - f_max).abs() < 30e6,
            (Some(a), Some(b)) => {
                let s = (bi - a.0) as f64 / (b.0 - a.0) as f64;
                (a.1 + s * (b.1 - a.1) - f_max).abs() < 30e6
            }
            _ => false,
        }
    });

    let empty = sweep_triple_resonance(&SweepSetup {
        microwave: &[],
        ..setup
    })
    .unwrap();
    let empty_zero = empty.magnitude.iter().flatten().all(|&v| v == 0.0);

    let summary = format!(
        "vertical ridges at {:?} GHz, {} diagonal ridges drifting {:?} GHz, max at {:.4} mm / {:.4} GHz, empty map zero: {}",
        vertical.iter().map(|f| (f / 1e6).round() / 1e3).collect::<Vec<_>>(),
        ridges.len(),
        drifts.iter().map(|d| (d * 1e3).round() / 1e3).collect::<Vec<_>>(),
        gaps[bi] * 1e3,
        f_max / 1e9,
        empty_zero,
    );
    if vertical_ok && diagonal_ok && on_vertical && on_diagonal && empty_zero {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn noise_budget() -> Check {
    let n_th = thermal_occupation(300.0, hz_to_angular(9.44e9));
    let snr = thermal_to_shot_ratio(0.017, 660.0, 0.683).unwrap();
    let best =
        optimize_antenna_coupling(&AntennaBase::from_operating_point(&paper_operating_point())).unwrap();
    all(vec![
        within("n_th", n_th, 655.0, 670.0),
        within("thermal/shot [dB]", snr, 14.0, 16.0),
        within(
            "kappa_m,ext/2pi [MHz]",
            angular_to_hz(best.kappa_m_ext) / 1e6,
            35.0,
            65.0,
        ),
        within("T_n [K]", best.budget.t_n, 90.0, 135.0),
        within("NF [dB]", best.budget.noise_figure_db, 1.1, 1.7),
    ])
}

fn synth(
    p: &LineshapeGuess,
    center: f64,
    half: f64,
    points: usize,
    noise: Option<(&mut ChaCha8Rng, f64)>,
) -> Trace {
    let freq = grid(center - half, center + half, points);
    let mut value: Vec<f64> = freq.iter().map(|&f| lineshape_model(p, f)).collect();
    if let Some((rng, sigma)) = noise {
        let normal = Normal::new(0.0, sigma).unwrap();
        for v in &mut value {
            *v *= 1.0 + normal.sample(rng);
        }
    }
    Trace::new(freq, value, "synthetic").unwrap()
}

/// Two traces of one device at different pump–output spacings, fitted
/// jointly from a start with rates scaled by up to ±20 % and locations
/// shifted by up to ±0.2 κ_m.
fn noiseless_round_trips() -> (usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let trials = 200;
    let mut ok = 0;
    for _ in 0..trials {
        let kappa_o = rng.random_range(2e6..6e6);
        let kappa_m = kappa_o * rng.random_range(1.6..3.0);
        let truth = LineshapeGuess {
            gain: rng.random_range(1.0..100.0),
            c: rng.random_range(0.005..0.5),
            kappa_o,
            kappa_m,
            omega_m: 9.302e9 + rng.random_range(-5e6..5e6),
            delta_op: 0.0,
        };
        let truth = LineshapeGuess {
            delta_op: truth.omega_m,
            ..truth
        };
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let second = truth.omega_m + sign * rng.random_range(0.5..1.0) * kappa_m;
        let traces = [
            synth(&truth, truth.omega_m, 6.0 * kappa_m, 401, None),
            synth(
                &LineshapeGuess {
                    delta_op: second,
                    ..truth
                },
                truth.omega_m,
                6.0 * kappa_m,
                401,
                None,
            ),
        ];
        let mut s = || rng.random_range(0.8..1.2);
        let (a, b, c, d) = (s(), s(), s(), s());
        let shift = 0.2 * kappa_m;
        let mut loc = |x: f64| x + rng.random_range(-shift..shift);
        let start = JointGuess {
            gain: truth.gain * a,
            c: truth.c * b,
            kappa_o: truth.kappa_o * c,
            kappa_m: truth.kappa_m * d,
            omega_m: loc(truth.omega_m),
            delta_op: vec![loc(truth.delta_op), loc(second)],
        };
        let Ok(fit) = fit_lineshape_joint(&traces, &start) else {
            continue;
        };
        let expect = [
            ("gain", truth.gain),
            ("c", truth.c),
            ("kappa_o", truth.kappa_o),
            ("kappa_m", truth.kappa_m),
            ("omega_m", truth.omega_m),
            ("delta_op_0", truth.delta_op),
            ("delta_op_1", second),
        ];
        if fit.converged
            && expect
                .iter()
                .all(|(n, v)| fit.get(n).is_some_and(|x| rel(x, *v) <= 1e-6))
        {
            ok += 1;
        }
    }
    (ok, trials)
}

/// The reference operating point measured on and off triple resonance with
/// 1 % multiplicative noise.
fn noisy_round_trips() -> (usize, usize, f64) {
    let truth = LineshapeGuess {
        gain: 1.0 / 0.0072,
        c: 0.017,
        kappa_o: 4.10e6,
        kappa_m: 8.54e6,
        omega_m: 9.302e9,
        delta_op: 9.302e9,
    };
    let off = LineshapeGuess {
        delta_op: truth.omega_m + truth.kappa_m,
        ..truth
    };
    let start = JointGuess {
        gain: truth.gain * 1.2,
        c: truth.c * 0.8,
        kappa_o: truth.kappa_o * 1.2,
        kappa_m: truth.kappa_m * 0.8,
        omega_m: truth.omega_m + 1e6,
        delta_op: vec![truth.delta_op - 1e6, off.delta_op + 1.5e6],
    };
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let trials = 100;
    let (mut ok, mut worst) = (0, 0.0_f64);
    for _ in 0..trials {
        let traces = [
            synth(&truth, truth.omega_m, 40e6, 401, Some((&mut rng, 0.01))),
            synth(&off, truth.omega_m, 40e6, 401, Some((&mut rng, 0.01))),
        ];
        let err = match fit_lineshape_joint(&traces, &start) {
            Ok(fit) if fit.converged => rel(fit.get("kappa_o").unwrap(), truth.kappa_o)
                .max(rel(fit.get("kappa_m").unwrap(), truth.kappa_m)),
            _ => f64::INFINITY,
        };
        worst = worst.max(err);
        if err <= 0.02 {
            ok += 1;
        }
    }
    (ok, trials, worst)
}

fn nms_round_trip() -> f64 {
    let p = NmsParams {
        n_m: 1.3e15,
        g0: 103e6 / (2.0 * 1.3e15_f64.sqrt()),
        kappa_o: 4.1e6,
        delta: 0.0,
    };
    let freq = grid(-150e6, 150e6, 1201);
    let trace = Trace::new(freq.clone(), nms_spectrum(&p, &freq), "nms").unwrap();
    let fit = fit_nms(&trace, &NmsGuess::from_trace(&trace)).unwrap();
    rel(fit.get("separation").unwrap(), 103e6)
}

fn fit_round_trips() -> Check {
    let (ok, n) = noiseless_round_trips();
    let (noisy_ok, noisy_n, worst) = noisy_round_trips();
    let nms = nms_round_trip();
    let mut parts = vec![];
    let frac = ok as f64 / n as f64;
    parts.push(if frac >= 0.95 {
        Ok(format!("noiseless {ok}/{n} within 1e-6"))
    } else {
        Err(format!("noiseless {ok}/{n} within 1e-6"))
    });
    let noisy = format!(
        "1% noise {noisy_ok}/{noisy_n} with both kappas within 2% (worst {:.2}%)",
        100.0 * worst
    );
    parts.push(if noisy_ok as f64 >= 0.95 * noisy_n as f64 {
        Ok(noisy)
    } else {
        Err(noisy)
    });
    parts.push(within("NMS separation relative error", nms, 0.0, 1e-3));
    all(parts)
}

fn determinism() -> Check {
    let exe = env!("CARGO_BIN_EXE_eocavity");
    let dir = tempfile::tempdir().unwrap();
    let base = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../configs/paper_device.json"
    ))
    .unwrap();
    let mut cfg: serde_json::Value = serde_json::from_str(&base).unwrap();
    cfg["sweep"]["points"] = 120.into();
    cfg["sweep"]["drive_points"] = 1001.into();
    let cfg_path = dir.path().join("sweep.json");
    std::fs::write(&cfg_path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "8"] {
        let out = dir.path().join(format!("t{threads}"));
        let status = Command::new(exe)
            .args(["sweep", "--config"])
            .arg(&cfg_path)
            .arg("--out")
            .arg(&out)
            .args(["--threads", threads])
            .output()
            .unwrap();
        if !status.status.success() {
            return Err(format!(
                "sweep with {threads} threads failed: {}",
                String::from_utf8_lossy(&status.stderr)
            ));
        }
        outputs.push(
            ["sweep.csv", "sweep.meta.json", "manifest.json"].map(|f| std::fs::read(out.join(f)).unwrap()),
        );
    }
    let same = outputs[0] == outputs[1];
    let msg = format!(
        "sweep.csv {} bytes, identical for 1 and 8 threads: {same}",
        outputs[0][0].len()
    );
    if same {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("AR-coating reduction", ar_coating),
        ("loss budget", loss_budget),
        ("microwave modes", microwave_modes),
        ("coupling prediction", coupling_prediction),
        ("3-D and beam-axis coupling routes agree", route_equivalence),
        ("normal-mode splitting calibration", nms_calibration),
        ("cooperativity arithmetic", cooperativity_arithmetic),
        ("lineshape identity", lineshape_identity),
        ("sweep topology", sweep_topology),
        ("noise budget", noise_budget),
        ("fit round trips", fit_round_trips),
        ("determinism across thread counts", determinism),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
