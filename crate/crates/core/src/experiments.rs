//! Parameter sweeps over the two reference experiments, with CSV and SVG
//! output and the spin-algebra self-check.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::models::{
    analytic_field_means, analytic_field_probabilities, analytic_ising, analytic_ising_means,
    analytic_ising_probabilities, ising_circuit, ising_registers, linspace, magnetic_field_circuit,
    preparation, FieldMapping, FieldSpec, InitialState, IsingSpec, ISING_QUBITS,
};
use crate::noise::{apply_depolarizing, apply_readout_noise, DeviceParams};
use crate::protocols::{
    correlation_from_distribution, magnetic_distribution, measurement_circuit, mean_from_distribution,
    Estimate, EstimateMode, MeanVector, Probe,
};
use crate::qasm::parse_angle;
use crate::sim::{run_circuit, sample_distribution, shot_rng, Circuit, StateVector};
use crate::spin::{algebra_residuals, singlet_leakage, AlgebraResiduals, Axis, SpinRegister, SpinValue};

/// Which experiment a sweep runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    /// Spin-1 in a field along x; the swept parameter is `ωt`.
    MagField,
    /// Spin-1 coupled to a spin-1/2; the swept parameter is `Jt`.
    Ising,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::MagField => "magfield",
            Experiment::Ising => "ising",
        }
    }

    pub fn param_name(self) -> &'static str {
        match self {
            Experiment::MagField => "ωt",
            Experiment::Ising => "Jt",
        }
    }

    /// Estimator columns, in CSV order.
    pub fn estimators(self) -> &'static [&'static str] {
        match self {
            Experiment::MagField => &["p_plus1", "p_0", "p_minus1", "mean_x", "mean_y", "mean_z"],
            Experiment::Ising => &[
                "p_plus1",
                "p_0",
                "p_minus1",
                "mean_x",
                "mean_y",
                "mean_z",
                "magnitude",
                "corr_xx",
            ],
        }
    }

    pub fn default_initial(self) -> InitialState {
        match self {
            Experiment::MagField => InitialState::Up,
            Experiment::Ising => InitialState::XPolarized,
        }
    }

    fn n_qubits(self) -> usize {
        match self {
            Experiment::MagField => 2,
            Experiment::Ising => ISING_QUBITS,
        }
    }
}

impl std::str::FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "magfield" => Ok(Experiment::MagField),
            "ising" => Ok(Experiment::Ising),
            _ => Err(Error::Config(format!("unknown experiment {s:?} (expected magfield or ising)"))),
        }
    }
}

/// Exact probabilities or a finite number of shots per circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShotMode {
    Exact,
    Shots(u64),
}

pub const DEFAULT_STEPS: usize = 41;
pub const DEFAULT_MAX_PARAM: f64 = 2.0 * PI;
pub const DEFAULT_SHOTS: u64 = 1024;
pub const DEFAULT_SEED: u64 = 2021;

/// Everything a sweep needs. [`SweepConfig::new`] gives the reference
/// settings: 41 points over `[0, 2π]` at 1024 shots.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub experiment: Experiment,
    pub initial: InitialState,
    pub steps: usize,
    pub max_param: f64,
    pub shots: ShotMode,
    pub seed: u64,
    pub noise: Option<DeviceParams>,
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub qasm: Option<PathBuf>,
}

impl SweepConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            initial: experiment.default_initial(),
            steps: DEFAULT_STEPS,
            max_param: DEFAULT_MAX_PARAM,
            shots: ShotMode::Shots(DEFAULT_SHOTS),
            seed: DEFAULT_SEED,
            noise: None,
            csv: None,
            svg: None,
            qasm: None,
        }
    }

    pub fn exact(mut self) -> Self {
        self.shots = ShotMode::Exact;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::Config(format!("steps must be at least 2, got {}", self.steps)));
        }
        if !self.max_param.is_finite() {
            return Err(Error::Config("max-param must be finite".into()));
        }
        if self.shots == ShotMode::Shots(0) {
            return Err(Error::Config("shots must be at least 1".into()));
        }
        let ok = match self.experiment {
            Experiment::MagField => self.initial != InitialState::XPolarized,
            Experiment::Ising => self.initial == InitialState::XPolarized,
        };
        if !ok {
            return Err(Error::Config(format!(
                "initial state {} is not available for {}",
                self.initial.name(),
                self.experiment.name()
            )));
        }
        if let Some(noise) = &self.noise {
            noise.validate()?;
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        linspace(self.max_param, self.steps)
    }

    /// Sets one option by its flag name (without the leading dashes).
    /// `noise` takes a path to a device file; `exact` takes true/false.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |e: &dyn std::fmt::Display| Error::Config(format!("{key}: {e}"));
        match key {
            "experiment" => self.experiment = value.parse()?,
            "steps" => self.steps = value.parse().map_err(|e| bad(&e))?,
            "max-param" => {
                self.max_param = parse_angle(value).map_err(|e| bad(&e))?;
            }
            "shots" => self.shots = ShotMode::Shots(value.parse().map_err(|e| bad(&e))?),
            "exact" => {
                if value.parse::<bool>().map_err(|e| bad(&e))? {
                    self.shots = ShotMode::Exact;
                } else if self.shots == ShotMode::Exact {
                    self.shots = ShotMode::Shots(DEFAULT_SHOTS);
                }
            }
            "seed" => self.seed = value.parse().map_err(|e| bad(&e))?,
            "initial" => self.initial = value.parse()?,
            "noise" => self.noise = Some(DeviceParams::from_file(Path::new(value))?),
            "csv" => self.csv = Some(value.into()),
            "svg" => self.svg = Some(value.into()),
            "qasm" => self.qasm = Some(value.into()),
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies flat `key = value` lines (same keys as the flags).
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key=value, got {raw:?}", lineno + 1))
            })?;
            self.set(k.trim(), v.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    /// The experiment circuit (preparation and evolution, no measurement
    /// rotations) at parameter value `param`.
    pub fn circuit_at(&self, param: f64) -> Result<Circuit> {
        match self.experiment {
            Experiment::MagField => {
                let reg = field_register();
                let mut c = preparation(self.initial, &reg, 2)?;
                c.append(&magnetic_field_circuit(
                    &FieldSpec::along_x(param)?,
                    &reg,
                    2,
                    FieldMapping::Perpendicular,
                )?)?;
                Ok(c)
            }
            Experiment::Ising => ising_circuit(&IsingSpec::new(param)?),
        }
    }
}

fn field_register() -> SpinRegister {
    SpinRegister::new(SpinValue::ONE, 0)
}

/// One grid point: estimates, closed-form references and leakage.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    /// In the order of [`Experiment::estimators`].
    pub estimates: Vec<Estimate>,
    pub analytic: Vec<f64>,
    /// Weight outside the symmetric subspace of the spin-1 before
    /// measurement; averaged over noise branches in noisy runs.
    pub leakage: f64,
}

/// Outcome distribution of `circuit` from `|0...0>`, including gate and
/// readout noise when configured.
fn outcome_probabilities(circuit: &Circuit, noise: Option<&DeviceParams>) -> Result<Vec<f64>> {
    let zero = StateVector::zero(circuit.n_qubits())?;
    match noise {
        None => Ok(run_circuit(circuit, &zero)?.probabilities()),
        Some(d) => {
            let run = apply_depolarizing(circuit, &zero, &d.depolarizing())?;
            apply_readout_noise(&run.probabilities, &d.readout(circuit.n_qubits()))
        }
    }
}

fn probability_estimate(p: f64, shots: Option<u64>) -> Estimate {
    match shots {
        None => Estimate::exact(p),
        Some(n) => Estimate {
            value: p,
            stderr: (p * (1.0 - p) / n as f64).max(0.0).sqrt(),
            mode: EstimateMode::Sampled { shots: n },
        },
    }
}

fn run_point(cfg: &SweepConfig, index: usize, param: f64) -> Result<SweepRow> {
    let base = cfg.circuit_at(param)?;
    let n = cfg.experiment.n_qubits();
    let spin1 = field_register();
    let mut rng = shot_rng(cfg.seed, index as u64);
    let shots = match cfg.shots {
        ShotMode::Exact => None,
        ShotMode::Shots(s) => Some(s),
    };

    let mut measured = |probes: &[Probe]| -> Result<Vec<f64>> {
        let c = measurement_circuit(&base, probes)?;
        let probs = outcome_probabilities(&c, cfg.noise.as_ref())?;
        match shots {
            None => Ok(probs),
            Some(s) => Ok(sample_distribution(&probs, s, &mut rng)?.frequencies()),
        }
    };

    let px = Probe::new(spin1, Axis::X);
    let partner = Probe::pauli(ising_registers().1, Axis::X);
    let x_probes: Vec<Probe> = match cfg.experiment {
        Experiment::MagField => vec![px],
        Experiment::Ising => vec![px, partner],
    };
    let dist_x = measured(&x_probes)?;
    let dist_y = measured(&[Probe::new(spin1, Axis::Y)])?;
    let dist_z = measured(&[Probe::new(spin1, Axis::Z)])?;

    let mut estimates: Vec<Estimate> = magnetic_distribution(&dist_z, &spin1)?
        .into_iter()
        .map(|p| probability_estimate(p, shots))
        .collect();
    let means = [
        mean_from_distribution(&dist_x, &px, shots)?,
        mean_from_distribution(&dist_y, &Probe::new(spin1, Axis::Y), shots)?,
        mean_from_distribution(&dist_z, &Probe::new(spin1, Axis::Z), shots)?,
    ];
    estimates.extend(means);

    let mut analytic: Vec<f64> = Vec::with_capacity(8);
    match cfg.experiment {
        Experiment::MagField => {
            analytic.extend(analytic_field_probabilities(cfg.initial, param)?);
            analytic.extend(analytic_field_means(cfg.initial, param)?);
        }
        Experiment::Ising => {
            estimates.push(MeanVector::from_components(means).magnitude);
            estimates.push(correlation_from_distribution(&dist_x, &px, &partner, shots)?);
            analytic.extend(analytic_ising_probabilities(param));
            analytic.extend(analytic_ising_means(param));
            let (magnitude, corr) = analytic_ising(param);
            analytic.extend([magnitude, corr]);
        }
    }

    let zero = StateVector::zero(n)?;
    let leakage = match &cfg.noise {
        None => singlet_leakage(&run_circuit(&base, &zero)?, &spin1)?,
        Some(d) => apply_depolarizing(&base, &zero, &d.depolarizing())?.leakage(&spin1)?,
    };

    Ok(SweepRow {
        param,
        estimates,
        analytic,
        leakage,
    })
}

/// Runs every grid point. Each point draws its shots from its own RNG
/// stream, so the result depends only on the configuration and seed.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let grid = cfg.grid();
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        grid.par_iter()
            .enumerate()
            .map(|(i, &p)| run_point(cfg, i, p))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        grid.iter()
            .enumerate()
            .map(|(i, &p)| run_point(cfg, i, p))
            .collect()
    }
}

/// `x` with 12 significant digits, in the shortest of fixed or scientific
/// notation.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let fixed = format!("{:.*}", (11 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// The CSV text of a sweep: header, then one line per row.
pub fn csv_string(experiment: Experiment, rows: &[SweepRow]) -> String {
    let names = experiment.estimators();
    let mut header = vec!["param".to_string()];
    header.extend(names.iter().map(|n| n.to_string()));
    header.extend(names.iter().map(|n| format!("analytic_{n}")));
    header.push("leakage".into());
    header.extend(names.iter().map(|n| format!("stderr_{n}")));
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        let mut fields = vec![format_number(r.param)];
        fields.extend(r.estimates.iter().map(|e| format_number(e.value)));
        fields.extend(r.analytic.iter().map(|&a| format_number(a)));
        fields.push(format_number(r.leakage));
        fields.extend(r.estimates.iter().map(|e| format_number(e.stderr)));
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn export_csv(experiment: Experiment, rows: &[SweepRow], path: &Path) -> Result<()> {
    std::fs::write(path, csv_string(experiment, rows)).map_err(|e| Error::io(path, e))
}

/// Writes the circuit at the last grid point, with terminal measurements.
pub fn export_qasm(cfg: &SweepConfig, path: &Path) -> Result<()> {
    let last = *cfg.grid().last().ok_or_else(|| Error::Config("empty grid".into()))?;
    let text = crate::qasm::emit_qasm(&cfg.circuit_at(last)?, true);
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

const WIDTH: f64 = 720.0;
const PANEL_HEIGHT: f64 = 300.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

/// One estimator: its closed-form curve and the measured dots, in data
/// coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub name: String,
    pub color: &'static str,
    pub curve: Vec<(f64, f64)>,
    /// `(x, y, stderr)`
    pub dots: Vec<(f64, f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Panel {
    pub title: String,
    pub y_range: (f64, f64),
    pub series: Vec<Series>,
}

/// A plot before serialization.
#[derive(Clone, Debug, PartialEq)]
pub struct PlotModel {
    pub x_label: String,
    pub x_range: (f64, f64),
    pub panels: Vec<Panel>,
}

impl PlotModel {
    pub fn height(&self) -> f64 {
        self.panels.len() as f64 * PANEL_HEIGHT
    }

    /// Pixel position of a data point in panel `panel`.
    pub fn to_pixels(&self, panel: usize, x: f64, y: f64) -> (f64, f64) {
        let (x0, x1) = self.x_range;
        let (y0, y1) = self.panels[panel].y_range;
        let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        let plot_h = PANEL_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        let span_x = if x1 > x0 { x1 - x0 } else { 1.0 };
        let px = MARGIN_LEFT + (x - x0) / span_x * plot_w;
        let py = panel as f64 * PANEL_HEIGHT + MARGIN_TOP + (y1 - y) / (y1 - y0) * plot_h;
        (px, py)
    }
}

/// Lays out the sweep as two panels: outcome probabilities, then means
/// (and for the Ising sweep the magnitude and correlation).
pub fn plot_model(experiment: Experiment, rows: &[SweepRow]) -> Result<PlotModel> {
    if rows.is_empty() {
        return Err(Error::Config("nothing to plot: the sweep has no rows".into()));
    }
    let names = experiment.estimators();
    let series = |idx: usize| Series {
        name: names[idx].to_string(),
        color: PALETTE[idx % PALETTE.len()],
        curve: rows.iter().map(|r| (r.param, r.analytic[idx])).collect(),
        dots: rows
            .iter()
            .map(|r| (r.param, r.estimates[idx].value, r.estimates[idx].stderr))
            .collect(),
    };
    let x_min = rows.iter().map(|r| r.param).fold(f64::INFINITY, f64::min);
    let x_max = rows.iter().map(|r| r.param).fold(f64::NEG_INFINITY, f64::max);
    Ok(PlotModel {
        x_label: experiment.param_name().to_string(),
        x_range: (x_min, x_max),
        panels: vec![
            Panel {
                title: "|C_m|²".into(),
                y_range: (-0.05, 1.05),
                series: (0..3).map(series).collect(),
            },
            Panel {
                title: "spin components".into(),
                y_range: (-1.1, 1.1),
                series: (3..names.len()).map(series).collect(),
            },
        ],
    })
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Serializes a plot model as a standalone SVG document.
pub fn render_svg(model: &PlotModel) -> String {
    let height = model.height();
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (pi, panel) in model.panels.iter().enumerate() {
        let (left, top) = model.to_pixels(pi, model.x_range.0, panel.y_range.1);
        let (right, bottom) = model.to_pixels(pi, model.x_range.1, panel.y_range.0);
        let _ = writeln!(
            s,
            r#"<rect class="frame" x="{left:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
            right - left,
            bottom - top
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            (left + right) / 2.0,
            top - 12.0,
            escape(&panel.title)
        );
        let _ = writeln!(
            s,
            r#"<text class="x-label" x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            (left + right) / 2.0,
            bottom + 36.0,
            escape(&model.x_label)
        );
        for i in 0..=4 {
            let x = model.x_range.0 + (model.x_range.1 - model.x_range.0) * i as f64 / 4.0;
            let (px, _) = model.to_pixels(pi, x, panel.y_range.0);
            let _ = writeln!(
                s,
                r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                bottom + 16.0,
                format_tick(x)
            );
            let y = panel.y_range.0 + (panel.y_range.1 - panel.y_range.0) * i as f64 / 4.0;
            let (_, py) = model.to_pixels(pi, model.x_range.0, y);
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                left - 6.0,
                py + 4.0,
                format_tick(y)
            );
        }
        for (si, series) in panel.series.iter().enumerate() {
            let points: Vec<String> = series
                .curve
                .iter()
                .map(|&(x, y)| {
                    let (px, py) = model.to_pixels(pi, x, y);
                    format!("{px:.2},{py:.2}")
                })
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline class="curve" fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
                series.color,
                points.join(" ")
            );
            for &(x, y, err) in &series.dots {
                let (px, py) = model.to_pixels(pi, x, y);
                if err > 0.0 {
                    let (_, lo) = model.to_pixels(pi, x, y - err);
                    let (_, hi) = model.to_pixels(pi, x, y + err);
                    let _ = writeln!(
                        s,
                        r#"<line class="errorbar" x1="{px:.2}" y1="{lo:.2}" x2="{px:.2}" y2="{hi:.2}" stroke="{}"/>"#,
                        series.color
                    );
                }
                let _ = writeln!(
                    s,
                    r#"<circle class="dot" cx="{px:.2}" cy="{py:.2}" r="3" fill="{}"/>"#,
                    series.color
                );
            }
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" fill="{}">{}</text>"#,
                right + 12.0,
                top + 14.0 + 16.0 * si as f64,
                series.color,
                escape(&series.name)
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

fn format_tick(v: f64) -> String {
    let r = (v * 100.0).round() / 100.0;
    format_number(if r == 0.0 { 0.0 } else { r })
}

/// Builds the plot and writes it to `path`. No file is created when `rows`
/// is empty.
pub fn render_plot(experiment: Experiment, rows: &[SweepRow], path: &Path) -> Result<()> {
    let model = plot_model(experiment, rows)?;
    std::fs::write(path, render_svg(&model)).map_err(|e| Error::io(path, e))
}

/// Largest spin the algebra check accepts, as `2s`.
pub const MAX_ALGEBRA_TWICE_S: u32 = 12;
/// Residual bound for every identity.
pub const ALGEBRA_CHECK_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraReport {
    pub entries: Vec<AlgebraResiduals>,
}

impl AlgebraReport {
    pub fn passes(&self) -> bool {
        self.entries.iter().all(|r| r.passes(ALGEBRA_CHECK_TOLERANCE))
    }

    /// One line per spin with the worst residual of each identity.
    pub fn to_text(&self) -> String {
        let mut s = String::from("s\tcommutator\tcasimir\tsz_eigen\torthonormality\tclosure\thermiticity\tstatus\n");
        for r in &self.entries {
            let _ = writeln!(
                s,
                "{}\t{:.3e}\t{:.3e}\t{:.3e}\t{:.3e}\t{:.3e}\t{:.3e}\t{}",
                r.spin,
                r.commutator,
                r.casimir,
                r.sz_eigen,
                r.orthonormality,
                r.closure,
                r.hermiticity,
                if r.passes(ALGEBRA_CHECK_TOLERANCE) { "ok" } else { "FAIL" }
            );
        }
        s
    }
}

/// Runs the spin identities for `s = 1/2, 1, ..., max_twice_s / 2`.
pub fn algebra_check(max_twice_s: u32) -> Result<AlgebraReport> {
    if !(1..=MAX_ALGEBRA_TWICE_S).contains(&max_twice_s) {
        return Err(Error::Config(format!(
            "max 2s must be between 1 and {MAX_ALGEBRA_TWICE_S}, got {max_twice_s}"
        )));
    }
    let entries = (1..=max_twice_s)
        .map(|t| algebra_residuals(SpinValue::from_twice(t)?))
        .collect::<Result<_>>()?;
    Ok(AlgebraReport { entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(e: Experiment) -> SweepConfig {
        SweepConfig::new(e).exact()
    }

    #[test]
    fn number_format() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(0.25), "0.25");
        assert_eq!(format_number(-0.5), "-0.5");
        assert_eq!(format_number(PI), "3.14159265359");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_number(1.5e-7), "1.5e-7");
        assert_eq!(format_number(6.123233995736766e-17), "6.12323399574e-17");
        assert_eq!(format_number(123456789012345.0), "1.23456789012e14");
        assert_eq!(format_number(0.99999999999999), "1");
    }

    #[test]
    fn magfield_exact_matches_cosine() {
        let rows = run_sweep(&exact(Experiment::MagField)).unwrap();
        assert_eq!(rows.len(), 41);
        for r in &rows {
            assert!((r.estimates[5].value - r.param.cos()).abs() < 1e-10);
            for (e, a) in r.estimates.iter().zip(&r.analytic) {
                assert!((e.value - a).abs() < 1e-10);
                assert_eq!(e.stderr, 0.0);
            }
            assert!(r.leakage < 1e-12);
        }
    }

    #[test]
    fn ising_exact_matches_cosine() {
        let rows = run_sweep(&exact(Experiment::Ising)).unwrap();
        for r in &rows {
            assert!((r.estimates[7].value - r.param.cos()).abs() < 1e-10);
            for (e, a) in r.estimates.iter().zip(&r.analytic) {
                assert!((e.value - a).abs() < 1e-10, "{} vs {a} at {}", e.value, r.param);
            }
            assert!(r.leakage < 1e-12);
        }
    }

    #[test]
    fn degenerate_grid_repeats_initial_point() {
        let mut cfg = exact(Experiment::MagField);
        cfg.steps = 2;
        cfg.max_param = 0.0;
        let rows = run_sweep(&cfg).unwrap();
        assert_eq!(rows[0], rows[1]);
        assert!((rows[0].estimates[0].value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn validation() {
        let mut cfg = SweepConfig::new(Experiment::MagField);
        cfg.steps = 1;
        assert!(run_sweep(&cfg).is_err());
        let mut cfg = SweepConfig::new(Experiment::Ising);
        cfg.initial = InitialState::Up;
        assert!(cfg.validate().is_err());
        let mut cfg = SweepConfig::new(Experiment::MagField);
        cfg.initial = InitialState::XPolarized;
        assert!(cfg.validate().is_err());
        cfg.shots = ShotMode::Shots(0);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn config_text() {
        let mut cfg = SweepConfig::new(Experiment::MagField);
        cfg.apply_text("# sweep\nsteps = 11\nmax-param = pi\ninitial = m=0\nexact = true\nseed=7\n")
            .unwrap();
        assert_eq!(cfg.steps, 11);
        assert!((cfg.max_param - PI).abs() < 1e-15);
        assert_eq!(cfg.initial, InitialState::Zero);
        assert_eq!(cfg.shots, ShotMode::Exact);
        assert_eq!(cfg.seed, 7);
        assert!(cfg.apply_text("colour = red\n").is_err());
        assert!(cfg.apply_text("steps\n").is_err());
        assert!(cfg.apply_text("max-param = pi/\n").is_err());
    }

    #[test]
    fn csv_layout() {
        let rows = run_sweep(&exact(Experiment::Ising)).unwrap();
        let text = csv_string(Experiment::Ising, &rows);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 42);
        assert!(!text.contains('\r'));
        let header: Vec<&str> = lines[0].split(',').collect();
        assert_eq!(&header[..7], &["param", "p_plus1", "p_0", "p_minus1", "mean_x", "mean_y", "mean_z"]);
        assert_eq!(header.len(), 1 + 8 * 3 + 1);
        let leak = header.iter().position(|h| *h == "leakage").unwrap();
        for line in &lines[1..] {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), header.len());
            assert!(fields[leak + 1..].iter().all(|f| *f == "0"), "{line}");
        }
    }

    #[test]
    fn sampled_sweep_is_reproducible() {
        let cfg = SweepConfig::new(Experiment::MagField);
        let a = csv_string(cfg.experiment, &run_sweep(&cfg).unwrap());
        let b = csv_string(cfg.experiment, &run_sweep(&cfg).unwrap());
        assert_eq!(a, b);
        let mut other = cfg.clone();
        other.seed += 1;
        assert_ne!(a, csv_string(cfg.experiment, &run_sweep(&other).unwrap()));
    }

    #[test]
    fn noisy_sweep_runs() {
        let mut cfg = exact(Experiment::Ising);
        cfg.steps = 5;
        cfg.noise = Some(DeviceParams::default());
        let rows = run_sweep(&cfg).unwrap();
        for r in &rows {
            let p: f64 = r.estimates[..3].iter().map(|e| e.value).sum();
            assert!((p - 1.0).abs() < 1e-12);
            assert!(r.leakage > 0.0 && r.leakage < 0.05);
        }
        let first = &rows[0];
        assert!(first.estimates[7].value < 1.0 && first.estimates[7].value > 0.8);
    }

    #[test]
    fn plot_dots_sit_on_curves_in_exact_mode() {
        let rows = run_sweep(&exact(Experiment::MagField)).unwrap();
        let model = plot_model(Experiment::MagField, &rows).unwrap();
        for panel in &model.panels {
            for series in &panel.series {
                assert_eq!(series.curve.len(), series.dots.len());
                for (&(cx, cy), &(dx, dy, err)) in series.curve.iter().zip(&series.dots) {
                    assert_eq!(cx, dx);
                    assert!((cy - dy).abs() < 1e-10);
                    assert_eq!(err, 0.0);
                }
            }
        }
        let svg = render_svg(&model);
        assert!(!svg.contains("errorbar"));
        assert_eq!(svg.matches("class=\"dot\"").count(), 41 * 6);
        assert!(svg.contains("ωt"));
    }

    #[test]
    fn sampled_plot_has_error_bars() {
        let rows = run_sweep(&SweepConfig::new(Experiment::MagField)).unwrap();
        let svg = render_svg(&plot_model(Experiment::MagField, &rows).unwrap());
        assert!(svg.contains("class=\"errorbar\""));
    }

    #[test]
    fn empty_rows_write_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("plot.svg");
        assert!(render_plot(Experiment::Ising, &[], &path).is_err());
        assert!(!path.exists());
    }

    #[test]
    fn qasm_export_of_last_point() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ising.qasm");
        export_qasm(&SweepConfig::new(Experiment::Ising), &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("cx ")).count(), 4);
    }

    #[test]
    fn algebra_report() {
        let report = algebra_check(6).unwrap();
        assert_eq!(report.entries.len(), 6);
        assert!(report.passes(), "{}", report.to_text());
        assert!(algebra_check(0).is_err());
        assert!(algebra_check(13).is_err());
    }
}
