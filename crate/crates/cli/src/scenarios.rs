//! One runner per scenario. Each returns both a CSV table and a JSON value.

use std::f64::consts::{FRAC_PI_4, PI};

use noon_core::fock::PHOTON_CAP_ENV;
use noon_core::generation::{
    generate_noon4_lkd_with, generate_noon_gc_with, optimize_success, GenerationResult,
    SuccessObjective,
};
use noon_core::interferometry::{
    effective_wavelength, fringe_scan, opa_visibility, phase_sensitivity, reference_limits,
    MziLayout, Observable, ReferenceLimits, SensitivityReport,
};
use noon_core::loss::{breakeven_report, contrast_curves, BreakevenReport, LossSweep};
use noon_core::states::OpaSpec;
use noon_core::{apply_beamsplitter, tensor_product, CoherentSpec, FockOptions, PureState};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{ConfigError, OutputFormat, Scenario, ScenarioConfig, MAX_GRID_POINTS};
use crate::format::{Cell, Table};
use crate::CliError;

pub struct Report {
    pub table: Table,
    pub json: Value,
}

impl Report {
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.table.to_csv(),
            OutputFormat::Json => {
                let mut text = serde_json::to_string_pretty(&self.json).expect("reports serialize");
                text.push('\n');
                text
            }
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<Value, CliError> {
    serde_json::to_value(value)
        .map_err(|e| CliError::Output(format!("cannot serialize report: {e}")))
}

/// Runs the configured scenario and serializes its report.
pub fn run_scenario(config: &ScenarioConfig) -> Result<String, CliError> {
    let report = match config.scenario {
        Scenario::Fringe => fringe(config)?,
        Scenario::Hom => hom(config)?,
        Scenario::HeraldGc => herald_gc(config)?,
        Scenario::HeraldLkd => herald_lkd(config)?,
        Scenario::LossSweep => loss_sweep(config)?,
        Scenario::OpaVisibility => opa(config)?,
        Scenario::Sensitivity => sensitivity(config)?,
        Scenario::Limits => limits(config)?,
    };
    Ok(report.render(config.output_format))
}

/// Photon cap from `photon_cap`, else from the environment. The flag reports
/// whether either was given.
fn fock_options(config: &ScenarioConfig) -> Result<(FockOptions, bool), CliError> {
    if let Some(cap) = config.optional_count("photon_cap")? {
        return Ok((FockOptions::default().with_photon_cap(cap), true));
    }
    let explicit = std::env::var_os(PHOTON_CAP_ENV).is_some();
    let options = FockOptions::from_env().map_err(|e| ConfigError(e.to_string()))?;
    Ok((options, explicit))
}

fn positive_n(config: &ScenarioConfig, default: u32) -> Result<u32, CliError> {
    let n = config.count("N", default)?;
    if n == 0 {
        return Err(ConfigError("N must be at least 1".into()).into());
    }
    Ok(n)
}

fn linspace(lo: f64, hi: f64, steps: u32, what: &str) -> Result<Vec<f64>, CliError> {
    if !(2..=MAX_GRID_POINTS as u32).contains(&steps)
        || !(lo < hi)
        || !lo.is_finite()
        || !hi.is_finite()
    {
        return Err(ConfigError(format!(
            "{what} grid needs 2..={MAX_GRID_POINTS} steps and finite min < max"
        ))
        .into());
    }
    let last = steps - 1;
    Ok((0..steps)
        .map(|k| {
            if k == last {
                hi
            } else {
                lo + (hi - lo) * f64::from(k) / f64::from(last)
            }
        })
        .collect())
}

/// Input state, observable and layout shared by `fringe` and `sensitivity`.
fn interferometer_setup(
    config: &ScenarioConfig,
    default_alpha: f64,
    noon_observable: &str,
) -> Result<(PureState, Observable, MziLayout), CliError> {
    let (options, _) = fock_options(config)?;
    let n = positive_n(config, 3)?;
    let (input, default_observable, default_layout) = match config.text("input", "noon")? {
        "noon" => (options.noon(n)?, noon_observable, "bare"),
        "coherent" => {
            let alpha = config.number("alpha", default_alpha)?;
            let beam = options.coherent(&CoherentSpec::real(alpha))?;
            (
                tensor_product(&beam, &options.fock(&[0])?)?,
                "difference",
                "full",
            )
        }
        other => {
            return Err(
                ConfigError(format!("input must be noon or coherent, got '{other}'")).into(),
            )
        }
    };
    let observable = match config.text("observable", default_observable)? {
        "rate" => Observable::NPhotonRate(n),
        "difference" => Observable::Difference,
        "projector" => Observable::NoonProjector(n),
        other => {
            return Err(ConfigError(format!(
                "observable must be rate, difference or projector, got '{other}'"
            ))
            .into())
        }
    };
    let layout = match config.text("layout", default_layout)? {
        "bare" => MziLayout::BarePhase,
        "full" => MziLayout::Full,
        other => {
            return Err(ConfigError(format!("layout must be bare or full, got '{other}'")).into())
        }
    };
    Ok((input, observable, layout))
}

fn fringe(config: &ScenarioConfig) -> Result<Report, CliError> {
    let (input, observable, layout) = interferometer_setup(config, 1.0, "rate")?;
    let gamma = config.number("gamma", 0.0)?;
    let scan = fringe_scan(&input, &config.phase_grid(), gamma, observable, layout)?;
    let mut table = Table::new(vec!["phi_rad", "value", "variance"]);
    for ((phi, value), variance) in scan.phis.iter().zip(&scan.values).zip(&scan.variances) {
        table.push(vec![(*phi).into(), (*value).into(), (*variance).into()]);
    }
    Ok(Report {
        table,
        json: to_json(&scan)?,
    })
}

fn hom(config: &ScenarioConfig) -> Result<Report, CliError> {
    let (options, _) = fock_options(config)?;
    let m = config.count("m", 1)?;
    let theta = config.number("theta", FRAC_PI_4)?;
    let out = apply_beamsplitter(&options.fock(&[m, m])?, 0, 1, theta)?;
    let mut table = Table::new(vec!["n0", "n1", "probability"]);
    let mut outcomes = Vec::new();
    for k in 0..=2 * m {
        let p = out.probability(&[k, 2 * m - k]);
        table.push(vec![k.into(), (2 * m - k).into(), p.into()]);
        outcomes.push(json!({ "counts": [k, 2 * m - k], "probability": p }));
    }
    let json = json!({ "input": [m, m], "theta": theta, "outcomes": outcomes });
    Ok(Report { table, json })
}

fn generation_row(label: &str, r: &GenerationResult) -> Vec<Cell> {
    vec![
        label.into(),
        r.success_probability.into(),
        r.fidelity_to_target
            .map_or(Cell::Text(String::new()), Cell::Number),
    ]
}

fn herald_gc(config: &ScenarioConfig) -> Result<Report, CliError> {
    let (options, _) = fock_options(config)?;
    let n = positive_n(config, 2)?;
    let chi = config.number("chi", PI)?;
    let generated = generate_noon_gc_with(n, chi, options)?;
    let mut table = Table::new(vec!["branch", "success_probability", "fidelity_to_target"]);
    table.push(generation_row("ancilla_upper", &generated.ancilla_upper));
    table.push(generation_row("ancilla_lower", &generated.ancilla_lower));
    Ok(Report {
        table,
        json: to_json(&generated)?,
    })
}

#[derive(Serialize)]
struct LkdRun<'a> {
    tap_theta: f64,
    optimized: bool,
    #[serde(flatten)]
    result: &'a GenerationResult,
}

fn herald_lkd(config: &ScenarioConfig) -> Result<Report, CliError> {
    let mirror_arm = config.count("mirror_arm", 0)?;
    if mirror_arm > 1 {
        return Err(ConfigError(format!("mirror_arm must be 0 or 1, got {mirror_arm}")).into());
    }
    let (tap_theta, optimized) = match config.optional_number("tap_theta")? {
        Some(theta) => (theta, false),
        None => {
            let objective = match config.text("objective", "probability")? {
                "probability" => SuccessObjective::Probability,
                "probability_times_fidelity" => SuccessObjective::ProbabilityTimesFidelity,
                other => {
                    return Err(ConfigError(format!(
                        "objective must be probability or probability_times_fidelity, got '{other}'"
                    ))
                    .into())
                }
            };
            let bounds = (
                config.number("theta_min", 0.01)?,
                config.number("theta_max", 1.56)?,
            );
            (optimize_success(objective, bounds)?.theta, true)
        }
    };
    let result = generate_noon4_lkd_with(tap_theta, mirror_arm as usize)?;
    let mut table = Table::new(vec![
        "tap_theta",
        "success_probability",
        "fidelity_to_target",
    ]);
    let mut row = generation_row("", &result);
    row[0] = tap_theta.into();
    table.push(row);
    let json = to_json(&LkdRun {
        tap_theta,
        optimized,
        result: &result,
    })?;
    Ok(Report { table, json })
}

#[derive(Serialize)]
struct LossRun<'a> {
    #[serde(flatten)]
    sweep: &'a LossSweep,
    breakeven: Option<BreakevenReport>,
}

fn loss_gammas(config: &ScenarioConfig) -> Result<Vec<f64>, CliError> {
    if let Some(list) = config.optional_text("gammas")? {
        return list
            .split(',')
            .map(|s| {
                s.trim().parse::<f64>().map_err(|_| {
                    ConfigError(format!("gammas entry '{}' is not a number", s.trim())).into()
                })
            })
            .collect();
    }
    let top = config.number("gamma_max", 2.0 * std::f64::consts::LN_2)?;
    linspace(0.0, top, config.count("gamma_steps", 5)?, "gamma")
}

fn loss_sweep(config: &ScenarioConfig) -> Result<Report, CliError> {
    let n = positive_n(config, 3)?;
    let n_coherent = config.number("n_coherent", 1.0)?;
    let gammas = loss_gammas(config)?;
    let sweep = contrast_curves(n, n_coherent, &gammas)?;
    let breakeven = if n >= 2 {
        Some(breakeven_report(n)?)
    } else {
        None
    };
    let mut table = Table::new(vec!["gamma", "coherent_contrast", "noon_contrast"]);
    for ((g, c), q) in sweep
        .gammas
        .iter()
        .zip(&sweep.coherent_contrast)
        .zip(&sweep.noon_contrast)
    {
        table.push(vec![(*g).into(), (*c).into(), (*q).into()]);
    }
    let json = to_json(&LossRun {
        sweep: &sweep,
        breakeven,
    })?;
    Ok(Report { table, json })
}

fn opa(config: &ScenarioConfig) -> Result<Report, CliError> {
    let (options, explicit_cap) = fock_options(config)?;
    let rs = linspace(
        config.number("r_min", 0.1)?,
        config.number("r_max", 2.0)?,
        config.count("r_steps", 20)?,
        "r",
    )?;
    let phis = config.phase_grid();
    let mut table = Table::new(vec!["r", "value", "pair_cutoff"]);
    let (mut visibilities, mut cutoffs) = (Vec::new(), Vec::new());
    for &r in &rs {
        let spec = OpaSpec::with_minimal_cutoff(r)?;
        let options = if explicit_cap {
            options
        } else {
            options.with_photon_cap(options.photon_cap.max(2 * spec.pair_cutoff()))
        };
        let v = opa_visibility(&spec, options, &phis)?;
        table.push(vec![r.into(), v.into(), spec.pair_cutoff().into()]);
        visibilities.push(v);
        cutoffs.push(spec.pair_cutoff());
    }
    let json = json!({ "r": rs, "visibility": visibilities, "pair_cutoff": cutoffs, "phis": phis });
    Ok(Report { table, json })
}

#[derive(Serialize)]
struct SensitivityRun {
    observable_tag: String,
    reports: Vec<SensitivityReport>,
}

fn sensitivity(config: &ScenarioConfig) -> Result<Report, CliError> {
    let (input, observable, layout) = interferometer_setup(config, 2.0, "projector")?;
    let gamma = config.number("gamma", 0.0)?;
    let reports = config
        .phase_grid()
        .into_iter()
        .map(|phi| phase_sensitivity(&input, observable, phi, gamma, layout))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(vec!["phi_rad", "value", "slope", "noise"]);
    for r in &reports {
        table.push(vec![
            r.at_phi.into(),
            r.delta_phi.into(),
            r.slope.into(),
            r.noise.into(),
        ]);
    }
    let json = to_json(&SensitivityRun {
        observable_tag: observable.tag(),
        reports,
    })?;
    Ok(Report { table, json })
}

#[derive(Serialize)]
struct LimitsRun {
    n: f64,
    wavelength: f64,
    #[serde(flatten)]
    limits: ReferenceLimits,
    #[serde(rename = "N")]
    noon_n: u32,
    effective_wavelength: f64,
}

fn limits(config: &ScenarioConfig) -> Result<Report, CliError> {
    let n = config.number("n", 1e24)?;
    let wavelength = config.number("wavelength", 1e-6)?;
    let noon_n = positive_n(config, 10)?;
    let limits = reference_limits(n, wavelength)?;
    let effective = effective_wavelength(wavelength, noon_n)?;
    let mut table = Table::new(vec![
        "n",
        "wavelength",
        "snl_phi",
        "hl_phi",
        "snl_x",
        "hl_x",
        "N",
        "effective_wavelength",
    ]);
    table.push(vec![
        n.into(),
        wavelength.into(),
        limits.snl_phi.into(),
        limits.hl_phi.into(),
        limits.snl_x.into(),
        limits.hl_x.into(),
        noon_n.into(),
        effective.into(),
    ]);
    let json = to_json(&LimitsRun {
        n,
        wavelength,
        limits,
        noon_n,
        effective_wavelength: effective,
    })?;
    Ok(Report { table, json })
}
