//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Tolerances are fixed here.

use std::f64::consts::TAU;
use std::fs;
use std::path::Path;
use std::time::Instant;

use photon_switch::disorder::rms_transmission_deviation;
use photon_switch::quadrature::QuadratureOptions;
use photon_switch::wavepacket::{packet_integrals, packet_integrals_wavelength};
use photon_switch::{
    chain_scattering, compute_spectrum, disorder_study, find_transmission_minima, mitigation_scenario,
    params_from_q_factors, round_trip_time, scattering, total_matrix, DisorderSpec, DisorderTarget,
    EmitterCavityParams, Error, IdenticalChainParams, Mitigation, Mode, PhysicalConstants, QFactorSpec, SpectralGrid,
    SwitchLayout, SwitchMetrics, WavePacketSpec, WaveguideLink, SPEED_OF_LIGHT,
};
use photon_switch_cli::{load, run_to_dir};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Percentage-point tolerance on reported efficiencies and fidelities.
const PP: f64 = 0.002;
const V_G: f64 = 0.3 * SPEED_OF_LIGHT;

struct Suite {
    failed: Vec<String>,
    total: usize,
}

impl Suite {
    fn check(&mut self, id: &str, what: &str, ok: bool, detail: impl AsRef<str>) {
        self.total += 1;
        println!("{} [{id}] {what}: {}", if ok { "PASS" } else { "FAIL" }, detail.as_ref());
        if !ok {
            self.failed.push(id.to_string());
        }
    }

    /// Measured metrics against target percentages within ±0.2 pp.
    fn metrics(&mut self, id: &str, what: &str, m: &SwitchMetrics, e_pct: f64, f_pct: f64) {
        let de = m.efficiency - e_pct / 100.0;
        let df = m.fidelity - f_pct / 100.0;
        self.check(
            id,
            what,
            de.abs() <= PP && df.abs() <= PP,
            format!(
                "E={:.3}% (target {e_pct}%), F={:.3}% (target {f_pct}%), tol ±{} pp",
                100.0 * m.efficiency,
                100.0 * m.fidelity,
                100.0 * PP
            ),
        );
    }
}

fn cavity(g_ghz: f64, q_c: f64) -> EmitterCavityParams {
    let q = QFactorSpec { q_coupled: q_c, q_intrinsic: 5e4 };
    params_from_q_factors(1550e-9, 1550e-9, g_ghz * 1e9, q, 1e9).unwrap()
}

fn chain(n: usize, d_um: f64, g_ghz: f64, q_c: f64) -> SwitchLayout {
    SwitchLayout::identical(cavity(g_ghz, q_c), n, d_um * 1e-6, V_G)
}

fn packet(sigma_nm: f64) -> WavePacketSpec {
    WavePacketSpec::new(1550e-9, sigma_nm * 1e-9).unwrap()
}

fn metrics(layout: &SwitchLayout, sigma_nm: f64, mode: Mode) -> SwitchMetrics {
    packet_integrals(layout, &packet(sigma_nm), QuadratureOptions::default()).unwrap().metrics(mode)
}

fn omega_nm(nm: f64) -> f64 {
    PhysicalConstants::omega_from_wavelength(nm * 1e-9)
}

/// Layouts, packet widths and modes of criteria 1 to 5.
fn reference_configs() -> Vec<(&'static str, SwitchLayout, f64, Mode)> {
    vec![
        ("N=1 weak σ=0.01 nm", chain(1, 4.65, 0.1, 500.0), 0.01, Mode::Reflection),
        ("N=1 g=100 GHz σ=0.01 nm", chain(1, 4.65, 100.0, 500.0), 0.01, Mode::Transmission),
        ("N=1 g=50 GHz Q_c=2000 σ=0.01 nm", chain(1, 4.65, 50.0, 2000.0), 0.01, Mode::Transmission),
        ("N=3 weak σ=1 nm", chain(3, 4.65, 0.1, 500.0), 1.0, Mode::Reflection),
        ("N=3 g=500 GHz σ=1 nm", chain(3, 4.65, 500.0, 500.0), 1.0, Mode::Transmission),
        ("N=1 weak σ=1 nm", chain(1, 4.65, 0.1, 500.0), 1.0, Mode::Reflection),
        ("N=3 g=500 GHz Q_c=2000 σ=1 nm", chain(3, 4.65, 500.0, 2000.0), 1.0, Mode::Transmission),
        ("N=3 g=250 GHz Q_c=2000 σ=1 nm", chain(3, 4.65, 250.0, 2000.0), 1.0, Mode::Transmission),
    ]
}

fn switch_metrics_criteria(s: &mut Suite) {
    let targets = [
        (96.1, 98.0),
        (96.2, 98.1),
        (96.2, 98.1),
        (96.4, 97.7),
        (96.4, 97.4),
        (84.7, 86.4),
        (99.7, 99.8),
        (95.5, 96.6),
    ];
    let ids = ["1", "2", "2", "3", "3", "3", "4", "5"];
    for ((label, layout, sigma, mode), ((e, f), id)) in
        reference_configs().into_iter().zip(targets.into_iter().zip(ids))
    {
        s.metrics(id, &format!("{label} {}", mode.label()), &metrics(&layout, sigma, mode), e, f);
    }
}

fn rabi_splitting(s: &mut Suite) {
    let layout = chain(1, 4.65, 100.0, 500.0);
    let spectrum = compute_spectrum(&layout, &SpectralGrid::wavelength_nm(1547.0, 1553.0, 60001)).unwrap();
    let minima = find_transmission_minima(&spectrum, 0.5);
    let split = match minima.as_slice() {
        [a, b] => (b.0 - a.0).abs(),
        _ => f64::NAN,
    };
    s.check(
        "6",
        "Rabi splitting at g/2π = 100 GHz",
        (split - 1.6).abs() <= 0.05,
        format!("{split:.4} nm (target 1.6 ± 0.05 nm)"),
    );
}

fn round_trip(s: &mut Suite) {
    let t = round_trip_time(&chain(3, 4.65, 0.1, 500.0));
    let rel = (t / 0.207e-12 - 1.0).abs();
    s.check(
        "7",
        "round-trip time N=3, d=4.65 µm, v_g=0.3c",
        rel <= 0.01,
        format!("{:.5} ps (target 0.207 ps ± 1%)", t * 1e12),
    );
}

fn random_lossy_cavity(rng: &mut ChaCha8Rng) -> EmitterCavityParams {
    let q = QFactorSpec { q_coupled: rng.random_range(200.0..5000.0), q_intrinsic: rng.random_range(1e3..1e6) };
    params_from_q_factors(
        rng.random_range(1545.0..1555.0) * 1e-9,
        rng.random_range(1545.0..1555.0) * 1e-9,
        rng.random_range(0.0..1e12),
        q,
        rng.random_range(0.1e9..10e9),
    )
    .unwrap()
}

fn oracle_equivalence(s: &mut Suite) {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    let mut skipped = 0usize;
    let mut evaluated = 0usize;
    for n in 1..=10 {
        for _ in 0..50 {
            let p = IdenticalChainParams {
                cavity: random_lossy_cavity(&mut rng),
                d: rng.random_range(0.0..50e-6),
                v_g: V_G,
                n,
            };
            let layout = p.to_layout();
            let lo = rng.random_range(1530.0..1550.0);
            for k in 0..256 {
                let w = omega_nm(lo + 20.0 * k as f64 / 255.0);
                let (t, _) = scattering(&layout, w).unwrap();
                match chain_scattering(&p, w) {
                    Ok((to, _)) => {
                        worst = worst.max((to.norm_sqr() - t.norm_sqr()).abs());
                        evaluated += 1;
                    }
                    Err(Error::DegenerateEigenvalues { .. }) => skipped += 1,
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }
    s.check(
        "8",
        "closed form vs cascade, n=1..10, 50 chains each, 256 points",
        worst < 1e-9,
        format!("max ||t|²_oracle - |t|²_cascade| = {worst:.2e} (tol 1e-9), {evaluated} points, {skipped} degenerate points skipped"),
    );
}

fn conservation(s: &mut Suite) {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    let layouts = 20;
    let freqs = 10_000;
    for _ in 0..layouts {
        let n = rng.random_range(1..=10);
        let cavities = (0..n)
            .map(|_| EmitterCavityParams {
                omega_c: omega_nm(rng.random_range(1545.0..1555.0)),
                omega_e: omega_nm(rng.random_range(1545.0..1555.0)),
                g: TAU * rng.random_range(0.0..1e12),
                v_r: rng.random_range(1e11..5e12),
                v_l: rng.random_range(1e11..5e12),
                kappa: 0.0,
                gamma: 0.0,
            })
            .collect();
        let links = (1..n).map(|_| WaveguideLink { d: rng.random_range(0.0..50e-6) }).collect();
        let layout = SwitchLayout { cavities, links, v_g: rng.random_range(0.1..1.0) * SPEED_OF_LIGHT };
        for _ in 0..freqs {
            let (t, r) = scattering(&layout, omega_nm(rng.random_range(1540.0..1560.0))).unwrap();
            worst = worst.max((t.norm_sqr() + r.norm_sqr() - 1.0).abs());
        }
    }
    s.check(
        "9",
        "lossless flux conservation",
        worst < 1e-12,
        format!("max ||t|²+|r|²-1| = {worst:.2e} over {layouts} layouts × {freqs} frequencies (tol 1e-12)"),
    );
}

fn free_spectral_range(s: &mut Suite) {
    for d in [100e-6, 300e-6] {
        let v = 1.2e12;
        let c = EmitterCavityParams {
            omega_c: omega_nm(1550.0),
            omega_e: omega_nm(1550.0),
            g: 0.0,
            v_r: v,
            v_l: v,
            kappa: 0.0,
            gamma: 0.0,
        };
        let layout = SwitchLayout::identical(c, 2, d, V_G);
        let fsr = TAU * V_G / (2.0 * d);
        let start = c.omega_c + 10.0 * v;
        let spectrum = compute_spectrum(&layout, &SpectralGrid::frequency(start, start + 6.0 * fsr, 20001)).unwrap();
        let minima = find_transmission_minima(&spectrum, 1.0);
        let worst = minima.windows(2).map(|p| ((p[1].0 - p[0].0) / fsr - 1.0).abs()).fold(0.0, f64::max);
        s.check(
            "10",
            &format!("free spectral range, N=2 lossless, d={} µm", d * 1e6),
            minima.len() >= 4 && worst < 0.01,
            format!("{} dips, worst spacing error {:.3}% (tol 1%)", minima.len(), 100.0 * worst),
        );
    }
}

fn disorder_grid() -> SpectralGrid {
    SpectralGrid::wavelength_nm(1540.0, 1560.0, 2001)
}

fn deviation(base: &SwitchLayout, target: DisorderTarget, mean: f64, sigma: f64) -> f64 {
    let grid = disorder_grid();
    let spec = DisorderSpec { target, mean, sigma, realizations: 1000, seed: 2024 };
    let ideal = compute_spectrum(base, &grid).unwrap();
    let result = disorder_study(base, &spec, &grid, 0).unwrap();
    rms_transmission_deviation(&result.mean_spectrum, &ideal, 1545.0, 1555.0).unwrap()
}

fn disorder_criteria(s: &mut Suite) {
    let weak = chain(10, 31.5, 0.1, 500.0);
    let strong = chain(10, 31.5, 1000.0, 500.0);
    let grid = disorder_grid();

    let spec = DisorderSpec {
        target: DisorderTarget::CavityWavelength,
        mean: 1550e-9,
        sigma: 1e-9,
        realizations: 200,
        seed: 11,
    };
    let a = disorder_study(&strong, &spec, &grid, 2).unwrap();
    let b = disorder_study(&strong, &spec, &grid, 2).unwrap();
    let pooled = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| disorder_study(&strong, &spec, &grid, 2).unwrap())
    };
    let bits = |r: &photon_switch::DisorderResult| {
        r.mean_spectrum.samples.iter().map(|p| p.transmission.to_bits()).collect::<Vec<_>>()
    };
    let same = a == b && bits(&a) == bits(&pooled(1)) && bits(&a) == bits(&pooled(4));
    s.check(
        "11",
        "disorder study is bitwise reproducible (same seed; 1 and 4 workers)",
        same,
        "200 realizations, seed 11",
    );

    for (label, base) in [("weak", &weak), ("strong", &strong)] {
        let q = deviation(base, DisorderTarget::CoupledQ, 500.0, 125.0);
        let l = deviation(base, DisorderTarget::CavityWavelength, 1550e-9, 5e-9);
        s.check(
            "11",
            &format!("{label}: dev(Q_c σ=125) < dev(λ_c σ=5 nm)"),
            q < l,
            format!("{q:.4} vs {l:.4} (RMS over 1545-1555 nm)"),
        );
        let d1 = deviation(base, DisorderTarget::Separation, 31.5e-6, 0.01e-6);
        let d2 = deviation(base, DisorderTarget::Separation, 31.5e-6, 1e-6);
        s.check("11", &format!("{label}: dev(d σ=0.01 µm) < dev(d σ=1 µm)"), d1 < d2, format!("{d1:.4} vs {d2:.4}"));
    }

    let spec = DisorderSpec {
        target: DisorderTarget::CavityWavelength,
        mean: 1550e-9,
        sigma: 1e-9,
        realizations: 1000,
        seed: 2024,
    };
    let mean = disorder_study(&weak, &spec, &grid, 0).unwrap().mean_spectrum;
    let peak = mean
        .samples
        .iter()
        .filter(|p| (1545.0..=1555.0).contains(&p.axis_value))
        .map(|p| p.transmission)
        .fold(0.0, f64::max);
    s.check(
        "11",
        "weak, λ_c σ=1 nm: averaged dip stays below 0.05 across 1545-1555 nm",
        peak < 0.05,
        format!("max averaged |t|² = {peak:.4}"),
    );

    let at = |l: &SwitchLayout| scattering(l, omega_nm(1550.0)).unwrap().0.norm_sqr();
    let faulty = mitigation_scenario(&strong, 6, Mitigation::WeakCoupling).unwrap();
    let decoupled = mitigation_scenario(&faulty, 6, Mitigation::Decouple).unwrap();
    let detuned = mitigation_scenario(&faulty, 6, Mitigation::DetuneTo(1543e-9)).unwrap();
    let (ti, tf, tc, td) = (at(&strong), at(&faulty), at(&decoupled), at(&detuned));
    s.check(
        "11",
        "mitigation: weak cavity 7 opens a dip at 1550 nm",
        tf < 0.05,
        format!("|t|² = {tf:.2e} (ideal {ti:.4}, band < 0.05)"),
    );
    s.check(
        "11",
        "mitigation: decoupling recovers the ideal window",
        (tc - ti).abs() < 0.05,
        format!("|t|² = {tc:.4} vs ideal {ti:.4} (band ±0.05)"),
    );
    s.check(
        "11",
        "mitigation: detuning to 1543 nm restores transmission",
        td > 0.9,
        format!("|t|² = {td:.4} (band > 0.9)"),
    );
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    reader.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect()
}

fn sweep_criteria(s: &mut Suite, out: &Path) {
    let dir = out.join("fig7");
    run_to_dir(&load("fig7", &[]).unwrap(), &dir).unwrap();
    let rows = read_csv(&dir.join("sweep_n.csv"));
    let value = |q: &str, n: &str, col: usize| -> f64 {
        rows.iter().find(|r| r[0] == "reflection" && r[1] == q && r[2] == n).unwrap()[col].parse().unwrap()
    };
    let (e1, e3, f1, f3) = (value("500", "1", 3), value("500", "3", 3), value("500", "1", 4), value("500", "3", 4));
    s.check(
        "11",
        "N sweep CSV: E_r and F_r improve from N=1 to N=3 (Q_c=500)",
        e3 > e1 && f3 > f1,
        format!("E_r {:.1}% → {:.1}%, F_r {:.1}% → {:.1}%", 100.0 * e1, 100.0 * e3, 100.0 * f1, 100.0 * f3),
    );

    let dir = out.join("fig6");
    run_to_dir(&load("fig6", &[]).unwrap(), &dir).unwrap();
    let rows = read_csv(&dir.join("sweep_g.csv"));
    for sigma in ["0.01", "1"] {
        for q in ["500", "2000"] {
            let series: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r[0] == sigma && r[1] == q)
                .map(|r| (r[2].parse().unwrap(), r[3].parse().unwrap()))
                .collect();
            let tail: Vec<f64> = series.iter().filter(|(g, _)| *g >= 800.0).map(|p| p.1).collect();
            let spread = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - tail.iter().cloned().fold(f64::INFINITY, f64::min);
            let first = series[0].1;
            let last = series.last().unwrap().1;
            s.check(
                "11",
                &format!("g sweep CSV: E_t rises then plateaus (σ={sigma} nm, Q_c={q})"),
                last > first + 0.5 && spread < 0.01,
                format!(
                    "E_t(0)={:.3}, E_t(1 THz)={:.3}, spread over 0.8-1 THz = {spread:.4} (band < 0.01)",
                    first, last
                ),
            );
        }
    }
}

fn fig5_sweep(s: &mut Suite, out: &Path) {
    let dir = out.join("fig5");
    let cfg = load("fig5", &[]).unwrap();
    let clock = Instant::now();
    let report = run_to_dir(&cfg, &dir).unwrap();
    let secs = clock.elapsed().as_secs_f64();
    let rows = read_csv(&dir.join("sweep_d.csv"));
    let ok = rows.len() == 9901 && report["failed_rows"] == 0;
    s.check(
        "12",
        "full separation sweep (9901 separations × 2 regimes) under 10 minutes",
        ok && secs < 600.0,
        format!("{secs:.1} s, {} rows, {} threads", rows.len(), rayon::current_num_threads()),
    );

    let row = rows.iter().find(|r| r[0] == "4.65").unwrap();
    let er: f64 = row[1].parse().unwrap();
    let ft: f64 = row[5].parse().unwrap();
    let direct_r = metrics(&chain(3, 4.65, 0.1, 500.0), 1.0, Mode::Reflection);
    let direct_t = metrics(&chain(3, 4.65, 500.0, 500.0), 1.0, Mode::Transmission);
    let agree = (er - direct_r.efficiency).abs() < 1e-12 && (ft - direct_t.fidelity).abs() < 1e-12;
    s.check("12", "sweep row at d=4.65 µm matches the direct evaluation", agree, format!("E_r={er:.6}, F_t={ft:.6}"));
}

/// Largest transfer-matrix entry over the ±10σ packet window, plus the
/// largest `|t|²+|r|²` seen there.
fn cascade_extent(layout: &SwitchLayout, p: &WavePacketSpec) -> (f64, f64) {
    let half = 10.0 * p.sigma_omega();
    (0..=2000)
        .map(|k| {
            let w = p.omega_cen() - half + 2.0 * half * k as f64 / 2000.0;
            let (t, r) = scattering(layout, w).unwrap();
            (total_matrix(layout, w).unwrap().max_abs(), t.norm_sqr() + r.norm_sqr())
        })
        .fold((0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)))
}

fn numerical_hygiene(s: &mut Suite) {
    let fine = QuadratureOptions {
        initial_intervals: 2 * QuadratureOptions::default().initial_intervals,
        ..Default::default()
    };
    let mut worst_quad = 0.0f64;
    let mut worst_axis = 0.0f64;
    let mut worst_entry = 0.0f64;
    for (_, layout, sigma, mode) in reference_configs() {
        let p = packet(sigma);
        let base = packet_integrals(&layout, &p, QuadratureOptions::default()).unwrap().metrics(mode);
        let halved = packet_integrals(&layout, &p, fine).unwrap().metrics(mode);
        let lambda = packet_integrals_wavelength(&layout, &p, QuadratureOptions::default()).unwrap().metrics(mode);
        worst_quad =
            worst_quad.max((base.efficiency - halved.efficiency).abs()).max((base.fidelity - halved.fidelity).abs());
        worst_axis =
            worst_axis.max((base.efficiency - lambda.efficiency).abs()).max((base.fidelity - lambda.fidelity).abs());
        worst_entry = worst_entry.max(cascade_extent(&layout, &p).0);
    }
    s.check(
        "X",
        "halving the quadrature step moves E and F by < 1e-7",
        worst_quad < 1e-7,
        format!("max change {worst_quad:.2e}"),
    );
    s.check(
        "X",
        "frequency and wavelength integration agree within 1e-6",
        worst_axis < 1e-6,
        format!("max difference {worst_axis:.2e}"),
    );
    s.check(
        "X",
        "transfer-matrix entries stay below 1e12 on the criterion 1-5 configs",
        worst_entry < 1e12,
        format!("max |entry| {worst_entry:.3e}"),
    );

    // Reflecting ten-cavity chains grow roughly like (V/κ)^N inside the stop
    // band, so only headroom below overflow and passivity are asserted.
    let mut entry = 0.0f64;
    let mut flux = 0.0f64;
    for layout in [chain(10, 31.5, 0.1, 500.0), chain(10, 31.5, 1000.0, 500.0)] {
        let (e, f) = cascade_extent(&layout, &packet(1.0));
        entry = entry.max(e);
        flux = flux.max(f);
    }
    s.check(
        "X",
        "ten-cavity configs: entries finite and below 1e100, |t|²+|r|² ≤ 1",
        entry.is_finite() && entry < 1e100 && flux <= 1.0 + 1e-12,
        format!("max |entry| {entry:.3e}, max |t|²+|r|² {flux:.12}"),
    );
}

fn main() {
    let mut suite = Suite { failed: Vec::new(), total: 0 };
    let out = tempfile::tempdir().unwrap();
    let clock = Instant::now();
    switch_metrics_criteria(&mut suite);
    rabi_splitting(&mut suite);
    round_trip(&mut suite);
    oracle_equivalence(&mut suite);
    conservation(&mut suite);
    free_spectral_range(&mut suite);
    disorder_criteria(&mut suite);
    sweep_criteria(&mut suite, out.path());
    numerical_hygiene(&mut suite);
    fig5_sweep(&mut suite, out.path());
    println!(
        "acceptance: {} of {} criteria passed in {:.1} s",
        suite.total - suite.failed.len(),
        suite.total,
        clock.elapsed().as_secs_f64()
    );
    let _ = fs::remove_dir_all(out.path());
    if !suite.failed.is_empty() {
        println!("failed: {}", suite.failed.join(", "));
        std::process::exit(1);
    }
}
