//! Experiment dispatch. Each experiment turns a validated scenario into a set
//! of in-memory artifacts plus a JSON summary; writing them is the caller's job.

use std::f64::consts::TAU;

use photon_switch::disorder::{rms_transmission_deviation, DisorderTarget, WEAK_COUPLING};
use photon_switch::quadrature::QuadratureOptions;
use photon_switch::sweep::{
    metrics_sweep_cavity_count, metrics_sweep_coupling, metrics_sweep_separations, Regime, SwitchStates,
};
use photon_switch::wavepacket::packet_integrals;
use photon_switch::{
    compute_spectrum, disorder_study, find_transmission_minima, mitigation_scenario, scattering, DisorderSpec,
    Mitigation, Mode, ScatteringSpectrum, SpectralGrid, SwitchLayout, SwitchMetrics,
};
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, RemedyConfig, ScenarioConfig};
use crate::error::CliError;
use crate::svg::{Plot, Series};

#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub summary: Value,
    /// Sweep rows that failed numerically; their CSV rows carry the message.
    pub failed_rows: usize,
}

/// `name` as a CSV field: shortest round-trip decimal, empty when absent.
pub fn num(v: f64) -> String {
    format!("{v}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn pct(v: f64) -> String {
    format!("{:.1}", 100.0 * v)
}

pub fn csv_bytes(header: &[String], rows: &[Vec<String>]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).map_err(|e| CliError::io(e.to_string()))?;
    for row in rows {
        w.write_record(row).map_err(|e| CliError::io(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::io(e.to_string()))
}

fn headers(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

struct Collector {
    svg: bool,
    artifacts: Vec<Artifact>,
}

impl Collector {
    fn csv(&mut self, name: &str, header: Vec<String>, rows: &[Vec<String>]) -> Result<(), CliError> {
        self.artifacts.push(Artifact { name: name.into(), bytes: csv_bytes(&header, rows)? });
        Ok(())
    }

    fn plot(&mut self, name: &str, plot: Plot) {
        if self.svg {
            self.artifacts.push(Artifact { name: name.into(), bytes: plot.render().into_bytes() });
        }
    }
}

pub fn execute(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    let layout = cfg.layout.to_layout()?;
    let mut out = Collector { svg: cfg.output.svg, artifacts: Vec::new() };
    let (summary, failed_rows) = match &cfg.experiment {
        ExperimentConfig::Spectrum { grid, minima_below } => {
            (spectrum(&mut out, &layout, &grid.to_grid()?, *minima_below)?, 0)
        }
        ExperimentConfig::Metrics { packet, modes, grid } => {
            let packet = packet.to_packet()?;
            let grid = match grid {
                Some(g) => g.to_grid()?,
                None => SpectralGrid::packet_window(packet.lambda_cen, packet.sigma_lambda),
            };
            (metrics(&mut out, &layout, &packet, modes, &grid)?, 0)
        }
        ExperimentConfig::SweepD { d_um, weak_g_ghz, strong_g_ghz, packet } => {
            let states = SwitchStates::from_couplings(&layout, TAU * weak_g_ghz * 1e9, TAU * strong_g_ghz * 1e9);
            let rows = metrics_sweep_separations(
                &states,
                &d_um.to_range(1e-6)?,
                &packet.to_packet()?,
                &[Mode::Reflection, Mode::Transmission],
            )?;
            sweep_d(&mut out, &rows)?
        }
        ExperimentConfig::SweepG { g_ghz, q_c, packets } => {
            let range = g_ghz.to_range(TAU * 1e9)?;
            let mut all = Vec::new();
            for p in packets {
                let rows = metrics_sweep_coupling(&layout, &range, &p.to_packet()?, q_c)?;
                all.push((p.sigma_nm, rows));
            }
            sweep_g(&mut out, &all)?
        }
        ExperimentConfig::SweepN { n, d_um, packet, regimes } => {
            let cfg_regimes = regimes;
            let proto = cfg.layout.prototype()?;
            let regimes: Vec<Regime> = regimes
                .iter()
                .map(|r| Regime {
                    mode: r.mode,
                    cavity: proto.with_coupling(TAU * r.g_ghz * 1e9).with_coupled_q(r.q_c),
                })
                .collect();
            let mut rows = metrics_sweep_cavity_count(n, d_um * 1e-6, layout.v_g, &packet.to_packet()?, &regimes)?;
            // Report the configured Q rather than the one recovered from the rates.
            for (row, regime) in rows.iter_mut().zip(cfg_regimes.iter().flat_map(|r| n.iter().map(move |_| r))) {
                row.q_coupled = regime.q_c;
            }
            sweep_n(&mut out, &rows)?
        }
        ExperimentConfig::Disorder { target, mean, sigma, realizations, keep_samples, grid, region } => {
            let unit = match target {
                DisorderTarget::CoupledQ => 1.0,
                DisorderTarget::Separation => 1e-6,
                _ => 1e-9,
            };
            let spec = DisorderSpec {
                target: *target,
                mean: mean * unit,
                sigma: sigma * unit,
                realizations: *realizations,
                seed: cfg.seed,
            };
            (disorder(&mut out, &layout, &spec, &grid.to_grid()?, *keep_samples, *region)?, 0)
        }
        ExperimentConfig::Mitigation { cavity, remedies, grid } => {
            (mitigation(&mut out, &layout, *cavity, remedies, &grid.to_grid()?)?, 0)
        }
    };
    Ok(Outcome { artifacts: out.artifacts, summary, failed_rows })
}

fn spectrum_rows(s: &ScatteringSpectrum) -> Vec<Vec<String>> {
    s.samples
        .iter()
        .map(|p| {
            vec![
                num(p.axis_value),
                num(p.omega),
                num(p.transmission),
                num(p.reflection),
                num(p.loss),
                num(p.t.re),
                num(p.t.im),
                num(p.r.re),
                num(p.r.im),
            ]
        })
        .collect()
}

fn spectrum_header(s: &ScatteringSpectrum) -> Vec<String> {
    let mut h = vec![s.axis.label().to_string()];
    h.extend(headers(&["omega_rad_s", "transmission", "reflection", "loss", "t_re", "t_im", "r_re", "r_im"]));
    h
}

fn spectrum(
    out: &mut Collector,
    layout: &SwitchLayout,
    grid: &SpectralGrid,
    minima_below: Option<f64>,
) -> Result<Value, CliError> {
    let s = compute_spectrum(layout, grid)?;
    out.csv("spectrum.csv", spectrum_header(&s), &spectrum_rows(&s))?;
    let xs = s.axis_values();
    let t = s.transmission();
    out.plot(
        "spectrum.svg",
        Plot::new("Transmission", s.axis.label(), "|t|²").y_range(0.0, 1.0).with(Series::new("|t|²", &xs, &t)),
    );
    let mut summary = json!({
        "points": s.samples.len(),
        "min_transmission": t.iter().copied().fold(f64::INFINITY, f64::min),
        "max_transmission": t.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    });
    if let Some(floor) = minima_below {
        let minima = find_transmission_minima(&s, floor);
        let rows: Vec<Vec<String>> = minima.iter().map(|(x, y)| vec![num(*x), num(*y)]).collect();
        out.csv("minima.csv", vec![s.axis.label().into(), "transmission".into()], &rows)?;
        summary["minima"] =
            json!(minima.iter().map(|(x, y)| json!({ "position": x, "transmission": y })).collect::<Vec<_>>());
    }
    Ok(summary)
}

fn metrics_json(m: &SwitchMetrics) -> Value {
    json!({
        "efficiency": m.efficiency,
        "fidelity": m.fidelity,
        "routing_probability": m.routing_probability,
        "efficiency_pct": pct(m.efficiency),
        "fidelity_pct": pct(m.fidelity),
    })
}

fn metrics(
    out: &mut Collector,
    layout: &SwitchLayout,
    packet: &photon_switch::WavePacketSpec,
    modes: &[Mode],
    grid: &SpectralGrid,
) -> Result<Value, CliError> {
    let integrals = packet_integrals(layout, packet, QuadratureOptions::default())?;
    let mut rows = Vec::new();
    let mut summary = serde_json::Map::new();
    for &mode in modes {
        let m = integrals.metrics(mode);
        rows.push(vec![
            mode.label().into(),
            num(m.efficiency),
            num(m.fidelity),
            num(m.routing_probability),
            pct(m.efficiency),
            pct(m.fidelity),
        ]);
        summary.insert(mode.label().into(), metrics_json(&m));
    }
    out.csv(
        "metrics.csv",
        headers(&["mode", "efficiency", "fidelity", "routing_probability", "efficiency_pct", "fidelity_pct"]),
        &rows,
    )?;

    let s = compute_spectrum(layout, grid)?;
    let peak = photon_switch::envelope_intensity(packet, packet.omega_cen());
    let envelope: Vec<f64> =
        s.samples.iter().map(|p| photon_switch::envelope_intensity(packet, p.omega) / peak).collect();
    let mut header = spectrum_header(&s);
    header.push("packet_envelope".into());
    let mut srows = spectrum_rows(&s);
    for (row, e) in srows.iter_mut().zip(&envelope) {
        row.push(num(*e));
    }
    out.csv("spectrum.csv", header, &srows)?;
    let xs = s.axis_values();
    out.plot(
        "metrics.svg",
        Plot::new("Switching a Gaussian packet", s.axis.label(), "power")
            .y_range(0.0, 1.0)
            .with(Series::new("|t|²", &xs, &s.transmission()))
            .with(Series::new("|r|²", &xs, &s.samples.iter().map(|p| p.reflection).collect::<Vec<_>>()))
            .with(Series::new("packet (unit height)", &xs, &envelope).dashed()),
    );
    summary.insert("quadrature_intervals".into(), json!(integrals.intervals));
    Ok(Value::Object(summary))
}

fn metric_cells(m: Option<&SwitchMetrics>) -> [String; 3] {
    [opt(m.map(|m| m.efficiency)), opt(m.map(|m| m.fidelity)), opt(m.map(|m| m.routing_probability))]
}

fn series_of<T>(rows: &[T], x: impl Fn(&T) -> f64, y: impl Fn(&T) -> Option<f64>) -> (Vec<f64>, Vec<f64>) {
    rows.iter().map(|r| (x(r), y(r).unwrap_or(f64::NAN))).unzip()
}

fn sweep_d(out: &mut Collector, rows: &[photon_switch::sweep::SeparationRow]) -> Result<(Value, usize), CliError> {
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut row = vec![num(r.d * 1e6)];
            row.extend(metric_cells(r.reflection.as_ref()));
            row.extend(metric_cells(r.transmission.as_ref()));
            row.push(r.failure.clone().unwrap_or_default());
            row
        })
        .collect();
    out.csv("sweep_d.csv", headers(&["d_um", "e_r", "f_r", "p_r", "e_t", "f_t", "p_t", "failure"]), &table)?;
    let d = |r: &photon_switch::sweep::SeparationRow| r.d * 1e6;
    let mut plot = Plot::new("Efficiency and fidelity versus separation", "d (µm)", "value");
    for (label, get) in [
        ("E_r", (|r: &photon_switch::sweep::SeparationRow| r.reflection.map(|m| m.efficiency)) as fn(&_) -> _),
        ("F_r", |r| r.reflection.map(|m| m.fidelity)),
        ("E_t", |r| r.transmission.map(|m| m.efficiency)),
        ("F_t", |r| r.transmission.map(|m| m.fidelity)),
    ] {
        let (xs, ys) = series_of(rows, d, get);
        plot = plot.with(Series::new(label, &xs, &ys));
    }
    out.plot("sweep_d.svg", plot);
    let failed = rows.iter().filter(|r| r.failure.is_some()).count();
    let best = rows
        .iter()
        .filter_map(|r| Some((r, r.reflection?.fidelity * r.transmission?.fidelity)))
        .max_by(|a, b| a.1.total_cmp(&b.1));
    Ok((
        json!({
            "rows": rows.len(),
            "failed_rows": failed,
            "best_fr_times_ft": best.map(|(r, v)| json!({ "d_um": r.d * 1e6, "value": v })),
        }),
        failed,
    ))
}

fn sweep_g(
    out: &mut Collector,
    all: &[(f64, Vec<photon_switch::sweep::CouplingRow>)],
) -> Result<(Value, usize), CliError> {
    let mut table = Vec::new();
    let mut plot = Plot::new("Transmission metrics versus emitter coupling", "g/2π (GHz)", "value").y_range(0.0, 1.0);
    let mut failed = 0;
    for (sigma, rows) in all {
        for r in rows {
            let mut row = vec![num(*sigma), num(r.q_coupled), num(r.g / TAU * 1e-9)];
            row.extend(metric_cells(r.metrics.as_ref()));
            row.push(r.failure.clone().unwrap_or_default());
            table.push(row);
            failed += usize::from(r.failure.is_some());
        }
        let mut qs: Vec<f64> = rows.iter().map(|r| r.q_coupled).collect();
        qs.dedup();
        for q in qs {
            let subset: Vec<_> = rows.iter().filter(|r| r.q_coupled == q).collect();
            let g = |r: &&photon_switch::sweep::CouplingRow| r.g / TAU * 1e-9;
            let (xs, e) = series_of(&subset, g, |r| r.metrics.map(|m| m.efficiency));
            let (_, f) = series_of(&subset, g, |r| r.metrics.map(|m| m.fidelity));
            plot = plot
                .with(Series::new(format!("E_t σ={sigma} nm Q_c={q}"), &xs, &e))
                .with(Series::new(format!("F_t σ={sigma} nm Q_c={q}"), &xs, &f).dashed());
        }
    }
    out.csv("sweep_g.csv", headers(&["sigma_nm", "q_c", "g_ghz", "e_t", "f_t", "p_t", "failure"]), &table)?;
    out.plot("sweep_g.svg", plot);
    Ok((json!({ "rows": table.len(), "failed_rows": failed }), failed))
}

fn sweep_n(out: &mut Collector, rows: &[photon_switch::sweep::CountRow]) -> Result<(Value, usize), CliError> {
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut row = vec![r.mode.label().into(), num(r.q_coupled), num(r.n as f64)];
            row.extend(metric_cells(r.metrics.as_ref()));
            row.push(r.failure.clone().unwrap_or_default());
            row
        })
        .collect();
    out.csv("sweep_n.csv", headers(&["mode", "q_c", "n", "e", "f", "p", "failure"]), &table)?;
    let mut plot = Plot::new("Metrics versus cavity number", "N", "value");
    let mut seen: Vec<(Mode, f64)> = Vec::new();
    for r in rows {
        if !seen.contains(&(r.mode, r.q_coupled)) {
            seen.push((r.mode, r.q_coupled));
        }
    }
    let mut summary = Vec::new();
    for (mode, q) in seen {
        let subset: Vec<_> = rows.iter().filter(|r| r.mode == mode && r.q_coupled == q).collect();
        let n = |r: &&photon_switch::sweep::CountRow| r.n as f64;
        let (xs, e) = series_of(&subset, n, |r| r.metrics.map(|m| m.efficiency));
        let (_, f) = series_of(&subset, n, |r| r.metrics.map(|m| m.fidelity));
        plot = plot
            .with(Series::new(format!("E {} Q_c={q}", mode.label()), &xs, &e))
            .with(Series::new(format!("F {} Q_c={q}", mode.label()), &xs, &f).dashed());
        summary.push(json!({
            "mode": mode,
            "q_c": q,
            "n": xs,
            "efficiency": e,
            "fidelity": f,
        }));
    }
    out.plot("sweep_n.svg", plot);
    let failed = rows.iter().filter(|r| r.failure.is_some()).count();
    Ok((json!({ "rows": rows.len(), "failed_rows": failed, "series": summary }), failed))
}

fn disorder(
    out: &mut Collector,
    layout: &SwitchLayout,
    spec: &DisorderSpec,
    grid: &SpectralGrid,
    keep: usize,
    region: Option<[f64; 2]>,
) -> Result<Value, CliError> {
    let ideal = compute_spectrum(layout, grid)?;
    let result = disorder_study(layout, spec, grid, keep)?;
    let mean = &result.mean_spectrum;
    let mut header = vec![grid.axis.label().to_string(), "t_ideal".into(), "t_mean".into(), "r_mean".into()];
    header.extend((1..=result.sample_spectra.len()).map(|k| format!("t_sample_{k}")));
    let rows: Vec<Vec<String>> = (0..ideal.samples.len())
        .map(|k| {
            let mut row = vec![
                num(ideal.samples[k].axis_value),
                num(ideal.samples[k].transmission),
                num(mean.samples[k].transmission),
                num(mean.samples[k].reflection),
            ];
            row.extend(result.sample_spectra.iter().map(|s| num(s.samples[k].transmission)));
            row
        })
        .collect();
    out.csv("disorder.csv", header, &rows)?;

    let width = result.realized_parameters.iter().map(Vec::len).max().unwrap_or(0);
    let mut pheader = vec!["realization".to_string()];
    pheader.extend((1..=width).map(|j| format!("element_{j}")));
    let prows: Vec<Vec<String>> = result
        .realized_parameters
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let mut row = vec![i.to_string()];
            row.extend(v.iter().map(|x| num(*x)));
            row.resize(width + 1, String::new());
            row
        })
        .collect();
    out.csv("parameters.csv", pheader, &prows)?;

    let xs = ideal.axis_values();
    let mut plot = Plot::new("Transmission with disorder", grid.axis.label(), "|t|²")
        .y_range(0.0, 1.0)
        .with(Series::new("ideal", &xs, &ideal.transmission()))
        .with(Series::new("average", &xs, &mean.transmission()));
    for (k, s) in result.sample_spectra.iter().enumerate() {
        plot = plot.with(Series::new(format!("sample {}", k + 1), &xs, &s.transmission()).dashed());
    }
    out.plot("disorder.svg", plot);

    let [lo, hi] = region.unwrap_or([grid.start, grid.stop]);
    Ok(json!({
        "realizations": spec.realizations,
        "failed_realizations": result.failed_realizations.len(),
        "rms_deviation": rms_transmission_deviation(mean, &ideal, lo, hi)?,
        "region": [lo, hi],
        "seed": spec.seed,
    }))
}

fn mitigation(
    out: &mut Collector,
    layout: &SwitchLayout,
    cavity: usize,
    remedies: &[RemedyConfig],
    grid: &SpectralGrid,
) -> Result<Value, CliError> {
    if cavity == 0 {
        return Err(CliError::validation("mitigation cavity index is 1-based"));
    }
    let index = cavity - 1;
    let faulty = mitigation_scenario(layout, index, Mitigation::WeakCoupling)?;
    let mut variants = vec![("ideal".to_string(), layout.clone()), ("faulty".to_string(), faulty.clone())];
    for r in remedies {
        let (label, action) = match r {
            RemedyConfig::Decouple => ("decoupled".to_string(), Mitigation::Decouple),
            RemedyConfig::DetuneToNm(nm) => (format!("detuned_{nm}nm"), Mitigation::DetuneTo(nm * 1e-9)),
        };
        variants.push((label, mitigation_scenario(&faulty, index, action)?));
    }
    let spectra = variants.iter().map(|(_, l)| compute_spectrum(l, grid)).collect::<Result<Vec<_>, _>>()?;
    let mut header = vec![grid.axis.label().to_string()];
    header.extend(variants.iter().map(|(l, _)| format!("t_{l}")));
    let rows: Vec<Vec<String>> = (0..spectra[0].samples.len())
        .map(|k| {
            let mut row = vec![num(spectra[0].samples[k].axis_value)];
            row.extend(spectra.iter().map(|s| num(s.samples[k].transmission)));
            row
        })
        .collect();
    out.csv("mitigation.csv", header, &rows)?;
    let xs = spectra[0].axis_values();
    let mut plot = Plot::new("Mitigating a weakly coupled emitter", grid.axis.label(), "|t|²").y_range(0.0, 1.0);
    for ((label, _), s) in variants.iter().zip(&spectra) {
        plot = plot.with(Series::new(label.clone(), &xs, &s.transmission()));
    }
    out.plot("mitigation.svg", plot);

    let probe = layout.cavities[index].omega_c;
    let mut summary = serde_json::Map::new();
    for ((label, l), s) in variants.iter().zip(&spectra) {
        let (t, _) = scattering(l, probe)?;
        summary.insert(
            label.clone(),
            json!({
                "transmission_at_resonance": t.norm_sqr(),
                "rms_deviation_from_ideal": rms_transmission_deviation(s, &spectra[0], grid.start, grid.stop)?,
            }),
        );
    }
    summary.insert("weak_g_ghz".into(), json!(WEAK_COUPLING / TAU * 1e-9));
    Ok(Value::Object(summary))
}
