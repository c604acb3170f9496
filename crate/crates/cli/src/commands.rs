use std::fmt::Write as _;

use log::{debug, info};
use num_complex::Complex64;
use serde::Serialize;

use nonclass_core::bochner::{certify, parse_points, Point, DEFAULT_TOL};
use nonclass_core::channel::{
    apply_channel_charfn, apply_channel_dm, thermal_ancilla_dim, thermal_threshold, ChannelParams,
};
use nonclass_core::homodyne::{
    count_distribution, reconstruct_with_shot_noise, sample_counts, CountDistribution, Histogram,
    SeriesFunctional, SeriesResult, ShotEstimate, DEFAULT_SERIES_TOL,
};
use nonclass_core::states::{build_density_matrix, char_fn, CharFn, StateSpec, DEFAULT_DIM};
use nonclass_core::witness::{
    compensate_gaussian, compensated_witness_mean, gaussian_witness_mean, uncompensated_noisy_mean,
    GaussianWitness,
};
use nonclass_core::{Error, PhaseGrid};

use crate::args::{
    BochnerArgs, ChannelArgs, Cli, Command, Format, GammaArgs, HomodyneArgs, PfuncArgs, StateArgs,
    ThresholdArgs, WitnessArgs,
};
use crate::output::{csv, emit, json, num, CliError};

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let format = cli.command.format().unwrap_or(Format::Json);
    let (text, out) = match &cli.command {
        Command::Threshold(a) => (threshold(a, format)?, &a.out),
        Command::Pfunc(a) => (pfunc(a, format)?, &a.out),
        Command::Witness(a) => (witness(a, format)?, &a.out),
        Command::Homodyne(a) => (homodyne(a, format)?, &a.out),
        Command::Bochner(a) => (bochner(a, format)?, &a.out),
    };
    emit(&text, out.out.as_deref())
}

fn load_state(args: &StateArgs) -> Result<StateSpec, CliError> {
    let raw = args.state.trim_start();
    let text = if raw.starts_with('{') {
        raw.to_string()
    } else {
        std::fs::read_to_string(&args.state)
            .map_err(|e| CliError::validation(format!("cannot read state file {}: {e}", args.state)))?
    };
    let spec = StateSpec::from_json(&text)?;
    debug!("state: {}", spec.to_json());
    Ok(spec)
}

fn load_channel(args: &ChannelArgs) -> Result<Option<ChannelParams>, CliError> {
    match (args.eta, args.nbar) {
        (None, None) => Ok(None),
        (Some(eta), Some(nbar)) => Ok(Some(ChannelParams::new(eta, nbar)?)),
        _ => Err(CliError::validation("--eta and --nbar must be given together")),
    }
}

fn gamma(args: &GammaArgs) -> Complex64 {
    Complex64::new(args.gamma_re, args.gamma_im)
}

fn json_only(format: Format, command: &str) -> Result<(), CliError> {
    if format == Format::Csv {
        return Err(CliError::validation(format!("{command} output is JSON only")));
    }
    Ok(())
}

fn threshold(a: &ThresholdArgs, format: Format) -> Result<String, CliError> {
    let nbar_max = thermal_threshold(a.eta)?;
    match format {
        Format::Json => json(&serde_json::json!({ "nbar_max": nbar_max })),
        Format::Csv => Ok(format!("nbar_max\n{}\n", num(nbar_max))),
    }
}

#[derive(Serialize)]
struct GridValue {
    re: f64,
    im: f64,
    value: f64,
}

fn pfunc(a: &PfuncArgs, format: Format) -> Result<String, CliError> {
    let spec = load_state(&a.state)?;
    let channel = load_channel(&a.channel)?;
    let grid = PhaseGrid::new(gamma(&a.gamma), a.grid_radius, a.grid_step)?;
    let mut phi = char_fn(&spec);
    let s = match (channel, a.s) {
        (Some(ch), s) => {
            phi = apply_channel_charfn(&phi, &ch);
            s.unwrap_or(1.0)
        }
        (None, Some(s)) => s,
        (None, None) => return Err(CliError::validation("--s is required without a channel")),
    };
    let points = grid.points();
    info!("evaluating {} grid points at s = {s}", points.len());
    let values = points
        .iter()
        .map(|&z| {
            Ok(GridValue {
                re: z.re,
                im: z.im,
                value: phi.s_distribution(z, s)?,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    match format {
        Format::Csv => Ok(csv(
            &["re", "im", "value"],
            values.iter().map(|v| vec![v.re, v.im, v.value]),
        )),
        Format::Json => json(&values),
    }
}

#[derive(Serialize)]
struct WitnessReport {
    clean_mean: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    compensated_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    uncompensated_mean: Option<f64>,
    scondition_ok: bool,
}

fn witness(a: &WitnessArgs, format: Format) -> Result<String, CliError> {
    json_only(format, "witness")?;
    let spec = load_state(&a.state)?;
    let channel = load_channel(&a.channel)?;
    let w = GaussianWitness::new(a.a2, gamma(&a.gamma))?;
    let mut report = WitnessReport {
        clean_mean: gaussian_witness_mean(&spec, &w)?,
        compensated_mean: None,
        uncompensated_mean: None,
        scondition_ok: true,
    };
    if let Some(ch) = channel {
        report.uncompensated_mean = Some(uncompensated_noisy_mean(&spec, &ch, &w)?);
        match compensate_gaussian(&w, &ch) {
            Ok(cw) => {
                let noisy = apply_channel_charfn(&char_fn(&spec), &ch);
                report.compensated_mean = Some(compensated_witness_mean(&noisy, &cw)?);
            }
            Err(Error::WitnessCondition { bound, .. }) => {
                info!("no compensated witness: nbar bound is {bound}");
                report.scondition_ok = false;
            }
            Err(e) => return Err(e.into()),
        }
    }
    json(&report)
}

#[derive(Serialize)]
struct HomodyneReport {
    measured_at: Point,
    eta_h: f64,
    functional: SeriesFunctional,
    series: SeriesResult,
    exact: f64,
    counts: CountDistribution,
    #[serde(skip_serializing_if = "Option::is_none")]
    histogram: Option<Histogram>,
    #[serde(skip_serializing_if = "Option::is_none")]
    shot_estimate: Option<ShotEstimate>,
}

fn homodyne(a: &HomodyneArgs, format: Format) -> Result<String, CliError> {
    let spec = load_state(&a.state)?;
    let channel = load_channel(&a.channel)?;
    let w = GaussianWitness::new(a.a2, gamma(&a.gamma))?;
    let exact = gaussian_witness_mean(&spec, &w)?;
    let clean = build_density_matrix(&spec, DEFAULT_DIM)?;
    let (dm, at, functional) = match channel {
        Some(ch) => {
            let functional = SeriesFunctional::modified(&w, &ch, a.eta_h)?;
            let dm = apply_channel_dm(&clean, &ch, thermal_ancilla_dim(ch.nbar))?;
            (dm, w.center * ch.eta.sqrt(), functional)
        }
        None => (clean, w.center, SeriesFunctional::wall(a.a2, a.eta_h)?),
    };
    let counts = count_distribution(&dm, at, a.eta_h, dm.dim())?;
    let series = functional.evaluate(&counts, DEFAULT_SERIES_TOL);
    info!(
        "series: {} terms, ratio {}, bound {:e}",
        series.terms_used, series.ratio, series.truncation_bound
    );
    let (histogram, shot_estimate) = match a.shots {
        Some(shots) => {
            let hist = sample_counts(&counts, shots, a.seed)?;
            let est = reconstruct_with_shot_noise(&hist, &functional);
            (Some(hist), Some(est))
        }
        None => (None, None),
    };
    match format {
        Format::Csv => {
            let mut s = String::from("n,p\n");
            for (n, p) in counts.probs.iter().enumerate() {
                let _ = writeln!(s, "{n},{}", num(*p));
            }
            Ok(s)
        }
        Format::Json => json(&HomodyneReport {
            measured_at: at.into(),
            eta_h: a.eta_h,
            functional,
            series,
            exact,
            counts,
            histogram,
            shot_estimate,
        }),
    }
}

fn bochner(a: &BochnerArgs, format: Format) -> Result<String, CliError> {
    json_only(format, "bochner")?;
    let spec = load_state(&a.state)?;
    let channel = load_channel(&a.channel)?;
    let text = std::fs::read_to_string(&a.points).map_err(|e| {
        CliError::validation(format!("cannot read points file {}: {e}", a.points.display()))
    })?;
    let points = parse_points(&text)?;
    let mut phi: CharFn = char_fn(&spec);
    if let Some(ch) = channel {
        phi = apply_channel_charfn(&phi, &ch);
    }
    let report = certify(&phi, &points, DEFAULT_TOL)?;
    info!("min eigenvalue {}", report.min_eigenvalue);
    json(&report)
}
