use std::fs::File;

use serde::Serialize;

use super::config::{linspace, FitConfig, FitKind, OperatingPointConfig, OpticalConfig, RunConfig};
use super::output::{sha256_hex, Artifact, Cell, Table};
use super::{CliError, Command, Context};
use crate::coupling::calibrate_g0_from_nms;
use crate::fitting::{
    fit_lineshape, fit_lineshape_joint, fit_nms, FitError, JointGuess, LineshapeGuess, NmsGuess, Trace,
};
use crate::microwave::{build_mode, linewidths, MicrowaveMode};
use crate::model::{angular_to_hz, hz_to_angular, wavelength_to_hz, Device, Laser};
use crate::noise::{budget_at_coupling, optimize_antenna_coupling, AntennaBase, NoiseBudget};
use crate::optical::find_resonances;
use crate::transduction::{
    cooperativity, efficiency_spectrum, nms_spectrum, normal_modes, peak_efficiency, predict_g0,
    sweep_triple_resonance, tune_triple_resonance, NmsParams, SweepSetup, TransductionParams,
};

type Output = (RunConfig, Vec<Artifact>);

fn numerical(e: impl std::fmt::Display) -> CliError {
    CliError::Numerical(e.to_string())
}

fn need<'a, T>(ctx: &Context, section: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
    section
        .as_ref()
        .ok_or_else(|| ctx.config_error(1, 1, format!("section `{name}` is required by this command")))
}

fn laser_omega(laser: &Laser) -> f64 {
    hz_to_angular(wavelength_to_hz(laser.wavelength))
}

fn microwave_modes(ctx: &Context, cfg: &RunConfig) -> Result<Vec<MicrowaveMode>, CliError> {
    let device = need(ctx, &cfg.device, "device")?;
    let mw = need(ctx, &cfg.microwave, "microwave")?;
    let settings = mw.settings();
    let mut modes = mw
        .modes
        .iter()
        .map(|&idx| build_mode(&device.slab, &device.material, idx, &settings).map_err(numerical))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(f) = mw.frequency_hz {
        let first = &mut modes[0];
        first.omega = hz_to_angular(f);
        first.kappa_m = linewidths(first.omega, settings.q_int, settings.kappa_ext)
            .map_err(numerical)?
            .0;
    }
    Ok(modes)
}

fn device_and_laser<'a>(ctx: &Context, cfg: &'a RunConfig) -> Result<(&'a Device, &'a Laser), CliError> {
    Ok((need(ctx, &cfg.device, "device")?, need(ctx, &cfg.laser, "laser")?))
}

pub(super) fn dispatch(command: Command, cfg: RunConfig, ctx: &Context) -> Result<Output, CliError> {
    match command {
        Command::ModesOptical => modes_optical(cfg, ctx),
        Command::ModesMicrowave => modes_microwave(cfg, ctx),
        Command::G0 => g0(cfg, ctx),
        Command::Tune => tune(cfg, ctx),
        Command::Sweep => sweep(cfg, ctx),
        Command::Spectrum => spectrum(cfg, ctx),
        Command::Nms => nms(cfg, ctx),
        Command::Noise => noise(cfg, ctx),
        Command::OptimizeCoupling => optimize_coupling(cfg, ctx),
        Command::Fit => fit(cfg, ctx),
    }
}

fn modes_optical(mut cfg: RunConfig, ctx: &Context) -> Result<Output, CliError> {
    let (device, laser) = device_and_laser(ctx, &cfg)?;
    let omega_l = laser_omega(laser);
    let optical = cfg.optical.clone().unwrap_or(OpticalConfig {
        air_gap: None,
        window_hz: None,
    });
    let air_gap = match optical.air_gap {
        Some(g) => g,
        None => {
            let modes = microwave_modes(ctx, &cfg).map_err(|_| {
                ctx.config_error(
                    1,
                    1,
                    "`optical.air_gap` or a `microwave` section to tune to is required",
                )
            })?;
            tune_triple_resonance(device, omega_l, modes[0].omega)
                .map_err(numerical)?
                .air_gap
        }
    };
    let f_l = angular_to_hz(omega_l);
    let window = optical.window_hz.unwrap_or((f_l - 50e9, f_l + 50e9));
    let modes = find_resonances(
        &device.stack(air_gap),
        (hz_to_angular(window.0), hz_to_angular(window.1)),
        device.input_port,
    )
    .map_err(numerical)?;
    let mut table = Table::new(&["index", "freq_hz", "A", "L_eff_m", "kappa_o_hz", "kappa_o_ext_hz"]);
    for m in &modes {
        table.push(vec![
            Cell::Int(m.longitudinal_index),
            Cell::Float(m.freq_hz()),
            Cell::Float(m.enhancement),
            Cell::Float(m.effective_length),
            Cell::Float(angular_to_hz(m.kappa_o)),
            Cell::Float(angular_to_hz(m.kappa_o_ext)),
        ]);
    }
    cfg.optical = Some(OpticalConfig {
        air_gap: Some(air_gap),
        window_hz: Some(window),
    });
    Ok((cfg, vec![table.render("optical_modes", ctx.format)]))
}

fn modes_microwave(cfg: RunConfig, ctx: &Context) -> Result<Output, CliError> {
    let modes = microwave_modes(ctx, &cfg)?;
    let mut table = Table::new(&["l", "m", "p", "freq_hz", "V_m_mm3", "kappa_m_hz"]);
    for m in &modes {
        table.push(vec![
            Cell::Int(m.indices.l.into()),
            Cell::Int(m.indices.m.into()),
            Cell::Int(m.indices.p.into()),
            Cell::Float(angular_to_hz(m.omega)),
            Cell::Float(m.volume * 1e9),
            Cell::Float(angular_to_hz(m.kappa_m)),
        ]);
    }
    Ok((cfg, vec![table.render("microwave_modes", ctx.format)]))
}

#[derive(Serialize)]
struct G0Report {
    g0_hz: f64,
    overlap_integral_m: f64,
    phase_mismatch_rad: f64,
    microwave_mode: String,
    microwave_freq_hz: f64,
    microwave_volume_mm3: f64,
    air_gap_m: f64,
    tuned: bool,
    pump_index: u64,
    pump_freq_hz: f64,
    output_index: u64,
    output_freq_hz: f64,
    pump_effective_length_m: f64,
    output_effective_length_m: f64,
}

fn g0(cfg: RunConfig, ctx: &Context) -> Result<Output, CliError> {
    let (device, laser) = device_and_laser(ctx, &cfg)?;
    let modes = microwave_modes(ctx, &cfg)?;
    let air_gap = cfg.optical.as_ref().and_then(|o| o.air_gap);
    let p = predict_g0(device, laser_omega(laser), &modes[0], air_gap).map_err(numerical)?;
    let report = G0Report {
        g0_hz: angular_to_hz(p.coupling.g0),
        overlap_integral_m: p.coupling.overlap_integral,
        phase_mismatch_rad: p.coupling.phase_mismatch,
        microwave_mode: modes[0].indices.to_string(),
        microwave_freq_hz: angular_to_hz(p.omega_m),
        microwave_volume_mm3: modes[0].volume * 1e9,
        air_gap_m: p.air_gap,
        tuned: p.tuned,
        pump_index: p.pump.longitudinal_index,
        pump_freq_hz: p.pump.freq_hz(),
        output_index: p.output.longitudinal_index,
        output_freq_hz: p.output.freq_hz(),
        pump_effective_length_m: p.pump.effective_length,
        output_effective_length_m: p.output.effective_length,
    };
    Ok((cfg, vec![Artifact::json("g0.json", &report)]))
}

#[derive(Serialize)]
struct TuneReport {
    air_gap_m: f64,
    pump_index: u64,
    output_side: i32,
    pump_freq_hz: f64,
    output_freq_hz: f64,
    delta_op_hz: f64,
    microwave_freq_hz: f64,
    laser_wavelength_m: f64,
}

fn tune(cfg: RunConfig, ctx: &Context) -> Result<Output, CliError> {
    let (device, laser) = device_and_laser(ctx, &cfg)?;
    let modes = microwave_modes(ctx, &cfg)?;
    let t = tune_triple_resonance(device, laser_omega(laser), modes[0].omega).map_err(numerical)?;
    let pump_hz = angular_to_hz(t.pump_omega);
    let report = TuneReport {
        air_gap_m: t.air_gap,
        pump_index: t.pump_index,
        output_side: t.side,
        pump_freq_hz: pump_hz,
        output_freq_hz: angular_to_hz(t.output_omega),
        delta_op_hz: angular_to_hz(t.delta_op),
        microwave_freq_hz: angular_to_hz(t.omega_m),
        laser_wavelength_m: crate::model::CONSTANTS.c / pump_hz,
    };
    Ok((cfg, vec![Artifact::json("tune.json", &report)]))
}

#[derive(Serialize)]
struct SweepRowReport {
    axis_value: f64,
    air_gap_m: f64,
    pump_index: u64,
    pump_freq_hz: f64,
    n_p: f64,
    delta_op_lower_hz: Option<f64>,
    delta_op_upper_hz: Option<f64>,
    flagged: Option<String>,
}

#[derive(Serialize)]
struct SweepSidecar {
    #[serde(flatten)]
    meta: crate::transduction::SweepMetadata,
    microwave_modes: Vec<String>,
    optical: Vec<SweepRowReport>,
}

/// SHA-256 of the compact JSON encoding of the config.
fn fixture_hash(cfg: &RunConfig) -> String {
    sha256_hex(&serde_json::to_vec(cfg).expect("config serializes"))
}

fn sweep(cfg: RunConfig, ctx: &Context) -> Result<Output, CliError> {
    let (device, laser) = device_and_laser(ctx, &cfg)?;
    let s = need(ctx, &cfg.sweep, "sweep")?;
    let modes = microwave_modes(ctx, &cfg)?;
    let axis_values = linspace(s.start, s.stop, s.points);
    let drive_hz = linspace(s.drive_start_hz, s.drive_stop_hz, s.drive_points);
    let drive: Vec<f64> = drive_hz.iter().map(|&f| hz_to_angular(f)).collect();
    let setup = SweepSetup {
        device,
        laser,
        microwave: &modes,
        axis: s.axis,
        axis_values: &axis_values,
        air_gap: s.air_gap.unwrap_or(0.0),
        drive: &drive,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(ctx.threads)
        .build()
        .map_err(|e| CliError::Numerical(format!("cannot start worker threads: {e}")))?;
    let result = pool
        .install(|| sweep_triple_resonance(&setup))
        .map_err(numerical)?;

    let mut table = Table::new(&[s.axis.name(), "drive_frequency_hz", "magnitude"]);
    for (i, &a) in result.axis_values.iter().enumerate() {
        for (j, &f) in drive_hz.iter().enumerate() {
            let m = result.magnitude[i][j];
            let v = if s.db { 20.0 * m.log10() } else { m };
            table.push(vec![Cell::Float(a), Cell::Float(f), Cell::Float(v)]);
        }
    }
    let sidecar = SweepSidecar {
        meta: result.metadata(&fixture_hash(&cfg), s.db),
        microwave_modes: modes.iter().map(|m| m.indices.to_string()).collect(),
        optical: result
            .rows
            .iter()
            .map(|r| SweepRowReport {
                axis_value: r.axis_value,
                air_gap_m: r.air_gap,
                pump_index: r.pump_index,
                pump_freq_hz: angular_to_hz(r.pump_omega),
                n_p: r.n_p,
                delta_op_lower_hz: r.delta_op_lower.map(angular_to_hz),
                delta_op_upper_hz: r.delta_op_upper.map(angular_to_hz),
                flagged: r.flagged.clone(),
            })
            .collect(),
    };
    let artifacts = vec![
        table.render("sweep", ctx.format),
        Artifact::json("sweep.meta.json", &sidecar),
    ];
    Ok((cfg, artifacts))
}

fn transduction_params(op: &OperatingPointConfig, delta_op: f64) -> TransductionParams {
    let m = op.to_model();
    TransductionParams {
        n_p: m.n_p,
        g0: m.g0,
        kappa_o: m.kappa_o,
        kappa_o_ext: m.kappa_o_ext,
        kappa_m: m.kappa_m,
        kappa_m_ext: m.kappa_m_ext(),
        omega_m: m.omega_m,
        delta_op,
    }
}

fn spectrum(cfg: RunConfig, ctx: &Context) -> Result<Output, CliError> {
    let op = need(ctx, &cfg.operating_point, "operating_point")?;
    let s = need(ctx, &cfg.spectrum, "spectrum")?;
    let delta_op = hz_to_angular(s.delta_op_hz.unwrap_or(op.microwave_freq_hz));
    let params = transduction_params(op, delta_op);
    params.validate().map_err(numerical)?;
    let freq = linspace(s.start_hz, s.stop_hz, s.points);
    let omegas: Vec<f64> = freq.iter().map(|&f| hz_to_angular(f)).collect();
    let eta = efficiency_spectrum(&params, &omegas);
    let mut table = Table::new(&["freq_hz", "efficiency"]);
    for (f, e) in freq.iter().zip(&eta) {
        table.push(vec![Cell::Float(*f), Cell::Float(*e)]);
    }
    Ok((cfg, vec![table.render("spectrum", ctx.format)]))
}

#[derive(Serialize)]
struct NmsReport {
    splitting_hz: f64,
    lower_hz: f64,
    upper_hz: f64,
    weight_lower: f64,
    weight_upper: f64,
    coupling_hz: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    calibrated_g0_hz: Option<f64>,
}

fn nms(cfg: RunConfig, ctx: &Context) -> Result<Output, CliError> {
    let n = need(ctx, &cfg.nms, "nms")?;
    let op = cfg.operating_point.as_ref();
    let g0_hz = n.g0_hz.or(op.map(|o| o.g0_hz)).ok_or_else(|| {
        ctx.config_error_at(
            &["nms"],
            "`nms.g0_hz` is required without an `operating_point` section",
        )
    })?;
    let kappa_hz = n.kappa_o_hz.or(op.map(|o| o.kappa_o_hz)).ok_or_else(|| {
        ctx.config_error_at(
            &["nms"],
            "`nms.kappa_o_hz` is required without an `operating_point` section",
        )
    })?;
    let params = NmsParams {
        n_m: n.n_m,
        g0: hz_to_angular(g0_hz),
        kappa_o: hz_to_angular(kappa_hz),
        delta: hz_to_angular(n.delta_hz),
    };
    params.validate().map_err(numerical)?;
    let det_hz = linspace(n.start_hz, n.stop_hz, n.points);
    let det: Vec<f64> = det_hz.iter().map(|&f| hz_to_angular(f)).collect();
    let t = nms_spectrum(&params, &det);
    let mut table = Table::new(&["detuning_hz", "transmission"]);
    for (f, v) in det_hz.iter().zip(&t) {
        table.push(vec![Cell::Float(*f), Cell::Float(*v)]);
    }
    let modes = normal_modes(&params);
    let calibrated = n
        .measured_splitting_hz
        .map(|s| calibrate_g0_from_nms(hz_to_angular(s), n.n_m).map(angular_to_hz))
        .transpose()
        .map_err(numerical)?;
    let report = NmsReport {
        splitting_hz: angular_to_hz(modes.upper - modes.lower),
        lower_hz: angular_to_hz(modes.lower),
        upper_hz: angular_to_hz(modes.upper),
        weight_lower: modes.weight_lower,
        weight_upper: modes.weight_upper,
        coupling_hz: n.n_m.sqrt() * g0_hz,
        calibrated_g0_hz: calibrated,
    };
    Ok((
        cfg,
        vec![
            table.render("nms", ctx.format),
            Artifact::json("nms_summary.json", &report),
        ],
    ))
}

#[derive(Serialize)]
struct NoiseReport {
    input: OperatingPointConfig,
    kappa_m_ext_hz: f64,
    kappa_m_hz: f64,
    cooperativity: f64,
    efficiency: f64,
    #[serde(flatten)]
    budget: NoiseBudget,
}

#[derive(Serialize)]
struct OptimumReport {
    input: OperatingPointConfig,
    kappa_m_ext_hz: f64,
    kappa_m_hz: f64,
    cooperativity: f64,
    efficiency: f64,
    iterations: usize,
    #[serde(flatten)]
    budget: NoiseBudget,
}

fn noise(cfg: RunConfig, ctx: &Context) -> Result<Output, CliError> {
    let op = *need(ctx, &cfg.operating_point, "operating_point")?;
    let m = op.to_model();
    let base = AntennaBase::from_operating_point(&m);
    let budget = budget_at_coupling(&base, m.kappa_m_ext()).map_err(numerical)?;
    let c = cooperativity(m.n_p, m.g0, m.kappa_o, m.kappa_m);
    let report = NoiseReport {
        input: op,
        kappa_m_ext_hz: angular_to_hz(m.kappa_m_ext()),
        kappa_m_hz: op.kappa_m_hz,
        cooperativity: c,
        efficiency: peak_efficiency(c, m.kappa_o_ext / m.kappa_o, m.kappa_m_ext() / m.kappa_m),
        budget,
    };
    Ok((cfg, vec![Artifact::json("noise.json", &report)]))
}

fn optimize_coupling(cfg: RunConfig, ctx: &Context) -> Result<Output, CliError> {
    let op = *need(ctx, &cfg.operating_point, "operating_point")?;
    let m = op.to_model();
    let base = AntennaBase::from_operating_point(&m);
    let best = optimize_antenna_coupling(&base).map_err(numerical)?;
    let report = OptimumReport {
        input: op,
        kappa_m_ext_hz: angular_to_hz(best.kappa_m_ext),
        kappa_m_hz: angular_to_hz(best.kappa_m_ext + base.kappa_m_int),
        cooperativity: best.cooperativity,
        efficiency: best.efficiency,
        iterations: best.iterations,
        budget: best.budget,
    };
    Ok((cfg, vec![Artifact::json("coupling.json", &report)]))
}

fn read_trace(ctx: &Context, name: &str) -> Result<Trace, CliError> {
    let path = ctx.base_dir().join(name);
    let file =
        File::open(&path).map_err(|e| CliError::Io(format!("cannot read trace {}: {e}", path.display())))?;
    Trace::from_csv(file, name).map_err(|e| match e {
        FitError::Io(e) => CliError::Io(format!("cannot read trace {}: {e}", path.display())),
        FitError::Parse { line, message } => {
            CliError::Config(format!("{}:{line}: {message}", path.display()))
        }
        other => CliError::Config(format!("{}: {other}", path.display())),
    })
}

fn initial<T: serde::de::DeserializeOwned>(ctx: &Context, f: &FitConfig) -> Result<Option<T>, CliError> {
    f.initial
        .clone()
        .map(serde_json::from_value)
        .transpose()
        .map_err(|e| ctx.config_error_at(&["fit", "initial"], format!("invalid `initial`: {e}")))
}

fn fit(cfg: RunConfig, ctx: &Context) -> Result<Output, CliError> {
    let f = need(ctx, &cfg.fit, "fit")?;
    let traces = f
        .traces
        .iter()
        .map(|t| read_trace(ctx, t))
        .collect::<Result<Vec<_>, _>>()?;
    let result = match (f.kind, traces.as_slice()) {
        (FitKind::Nms, [trace]) => {
            let g = initial::<NmsGuess>(ctx, f)?.unwrap_or_else(|| NmsGuess::from_trace(trace));
            fit_nms(trace, &g)
        }
        (FitKind::Lineshape, [trace]) => {
            let g = initial::<LineshapeGuess>(ctx, f)?.unwrap_or_else(|| LineshapeGuess::from_trace(trace));
            fit_lineshape(trace, &g, None)
        }
        (FitKind::Lineshape, many) => {
            let g = match initial::<JointGuess>(ctx, f)? {
                Some(g) => g,
                None => {
                    let first = LineshapeGuess::from_trace(&many[0]);
                    JointGuess {
                        gain: first.gain,
                        c: first.c,
                        kappa_o: first.kappa_o,
                        kappa_m: first.kappa_m,
                        omega_m: first.omega_m,
                        delta_op: many
                            .iter()
                            .map(|t| LineshapeGuess::from_trace(t).delta_op)
                            .collect(),
                    }
                }
            };
            if g.delta_op.len() != many.len() {
                return Err(ctx.config_error_at(
                    &["fit", "initial"],
                    format!("`delta_op` needs one entry per trace ({})", many.len()),
                ));
            }
            fit_lineshape_joint(many, &g)
        }
        (FitKind::Nms, _) => unreachable!("validated: one trace per normal-mode fit"),
    }
    .map_err(numerical)?;
    Ok((cfg, vec![Artifact::json("fit.json", &result)]))
}

#[cfg(test)]
mod tests {
    use super::super::output::Format;
    use super::*;
    use crate::model::{paper_device, paper_laser};

    fn ctx() -> Context {
        Context {
            text: String::new(),
            path: "cfg.json".into(),
            format: Format::Csv,
            threads: 1,
        }
    }

    #[test]
    fn missing_section_is_a_config_error() {
        let e = dispatch(Command::Noise, RunConfig::default(), &ctx()).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("operating_point"));
    }

    #[test]
    fn modes_optical_records_the_window() {
        let cfg = RunConfig {
            device: Some(paper_device()),
            laser: Some(paper_laser()),
            optical: Some(OpticalConfig {
                air_gap: Some(7e-3),
                window_hz: None,
            }),
            ..RunConfig::default()
        };
        let (resolved, out) = dispatch(Command::ModesOptical, cfg, &ctx()).unwrap();
        assert!(resolved.optical.unwrap().window_hz.is_some());
        let text = String::from_utf8(out[0].bytes.clone()).unwrap();
        assert!(text.starts_with("index,freq_hz,A,L_eff_m,kappa_o_hz,kappa_o_ext_hz\n"));
        assert!(text.lines().count() > 5);
    }
}
