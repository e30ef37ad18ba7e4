//! WebAssembly bindings for the browser demo in `www/`.

use highspin::experiments::{algebra_check, csv_string, plot_model, render_svg, run_sweep, ShotMode, SweepConfig, SweepRow};
use highspin::noise::DeviceParams;
use wasm_bindgen::prelude::*;

fn sweep(
    experiment: &str,
    initial: &str,
    steps: u32,
    max_param: &str,
    shots: u32,
    seed: u32,
    noisy: bool,
) -> Result<(SweepConfig, Vec<SweepRow>), String> {
    let mut cfg = SweepConfig::new(experiment.parse().map_err(|e: highspin::Error| e.to_string())?);
    let set = |cfg: &mut SweepConfig, k: &str, v: &str| cfg.set(k, v).map_err(|e| e.to_string());
    if !initial.is_empty() {
        set(&mut cfg, "initial", initial)?;
    }
    set(&mut cfg, "steps", &steps.to_string())?;
    set(&mut cfg, "max-param", max_param)?;
    cfg.shots = if shots == 0 { ShotMode::Exact } else { ShotMode::Shots(shots.into()) };
    cfg.seed = seed.into();
    if noisy {
        cfg.noise = Some(DeviceParams::default());
    }
    let rows = run_sweep(&cfg).map_err(|e| e.to_string())?;
    Ok((cfg, rows))
}

/// Runs a sweep and returns the plot as SVG markup. `shots = 0` means
/// exact probabilities; `noisy` applies the default device error rates.
#[wasm_bindgen]
pub fn sweep_svg(
    experiment: &str,
    initial: &str,
    steps: u32,
    max_param: &str,
    shots: u32,
    seed: u32,
    noisy: bool,
) -> Result<String, String> {
    let (cfg, rows) = sweep(experiment, initial, steps, max_param, shots, seed, noisy)?;
    let model = plot_model(cfg.experiment, &rows).map_err(|e| e.to_string())?;
    Ok(render_svg(&model))
}

/// Same sweep as [`sweep_svg`], as CSV text.
#[wasm_bindgen]
pub fn sweep_csv(
    experiment: &str,
    initial: &str,
    steps: u32,
    max_param: &str,
    shots: u32,
    seed: u32,
    noisy: bool,
) -> Result<String, String> {
    let (cfg, rows) = sweep(experiment, initial, steps, max_param, shots, seed, noisy)?;
    Ok(csv_string(cfg.experiment, &rows))
}

/// Residual table of the spin identities up to `s = max_twice_s / 2`.
#[wasm_bindgen]
pub fn algebra_report(max_twice_s: u32) -> Result<String, String> {
    algebra_check(max_twice_s)
        .map(|r| r.to_text())
        .map_err(|e| e.to_string())
}
