use std::f64::consts::PI;

use qfnoise::connected::{connected_log_coefficient, log_grid, ConnectedProbe};
use qfnoise::distribution::MomentumDistribution;
use qfnoise::ensemble::{
    gaussianity_test, Ensemble, EnsembleConfig, EnsembleStats, PerElectronModel, MIN_GAUSSIAN_TRIALS,
};
use qfnoise::fit::log_log_slope;
use qfnoise::geometry::{
    g_factor_with, hooge_alpha, total_induced_spectrum_si, LeadPlacement, McOptions, SampleGeometry,
};
use qfnoise::kinetic::{delta_k_closed, delta_k_exact, exponential_allowance, KineticParams};
use qfnoise::observation::ObservationGeometry;
use qfnoise::spectrum::angular_integral;
use qfnoise::units::{Dimension, UnitMode, UnitSystem, E_CHARGE_SI};
use qfnoise::{SpectrumEvaluator, SpectrumResult, Tolerance};
use serde_json::{json, Value};

use crate::config::{Method, RunConfig};
use crate::output::{Cell, Report};
use crate::CliError;

fn units(cfg: &RunConfig) -> UnitSystem {
    match cfg.units.mode {
        UnitMode::Natural => UnitSystem::natural(cfg.units.q_ref_si),
        UnitMode::Si => UnitSystem::si(cfg.units.q_ref_si),
    }
}

fn tolerance(cfg: &RunConfig) -> Tolerance {
    Tolerance::new(cfg.tolerance.abs, cfg.tolerance.rel)
}

fn sample(cfg: &RunConfig) -> Result<SampleGeometry, CliError> {
    Ok(SampleGeometry::new(
        cfg.gfactor.sample.shape,
        cfg.gfactor.sample.origin,
    )?)
}

pub fn spectrum(cfg: &RunConfig) -> Result<Report, CliError> {
    let s = &cfg.spectrum;
    let ev = SpectrumEvaluator::new(cfg.distribution.build()?, s.mass)?
        .with_tolerance(tolerance(cfg))
        .with_thresholds(cfg.regime);
    let x = [(s.r * s.r - s.zeta * s.zeta).sqrt(), 0.0, s.zeta];
    let g = ObservationGeometry::new(x, x, [0.0; 3])?;
    let u = units(cfg);
    let si = cfg.units.mode == UnitMode::Si;
    let freq = |v: f64| if si { u.to_si(v, Dimension::FREQUENCY) } else { v };
    let transform = |v: f64| if si { u.to_si(v, Dimension::TRANSFORM) } else { v };

    let mut rows = Vec::new();
    let mut json_rows = Vec::new();
    for omega in log_grid(s.omega_min, s.omega_max, s.points) {
        for m in &s.methods {
            let res: SpectrumResult = match m {
                Method::Exact => ev.exact_i2(&g, omega)?,
                Method::Asymptotic => ev.asymptotic_i22(&g, omega)?,
                Method::Spherical => ev.spherical_i23(g.r(), omega)?,
            };
            let f = res.regime;
            rows.push(vec![
                Cell::Num(freq(omega)),
                Cell::Num(transform(res.magnitude)),
                Cell::Text(res.method.as_str().into()),
                Cell::Num(transform(res.quadrature_error)),
                Cell::Bool(f.cond1_ok),
                Cell::Bool(f.cond2_ok),
                Cell::Num(freq(f.omega0)),
                Cell::Num(f.r_dtilde),
            ]);
            json_rows.push(json!({
                "omega": freq(omega),
                "magnitude": transform(res.magnitude),
                "method": res.method.as_str(),
                "quad_error": transform(res.quadrature_error),
                "cond1_ok": f.cond1_ok,
                "cond2_ok": f.cond2_ok,
                "omega0": freq(f.omega0),
                "r_Dtilde": f.r_dtilde,
            }));
        }
    }
    Ok(Report {
        header: vec![
            "omega",
            "magnitude",
            "method",
            "quad_error",
            "cond1_ok",
            "cond2_ok",
            "omega0",
            "r_Dtilde",
        ],
        rows,
        notes: Vec::new(),
        json: json!({ "rows": json_rows }),
        failed: false,
    })
}

fn fermi_scale(d: &MomentumDistribution) -> f64 {
    d.fermi_momentum().unwrap_or_else(|| d.reference_scale())
}

pub fn kinetic(cfg: &RunConfig) -> Result<Report, CliError> {
    let k = &cfg.kinetic;
    let d0 = cfg.distribution.build()?;
    let q_f = fermi_scale(&d0);
    let rho0 = d0.value_at_zero();
    let ratios = log_grid(k.q0_over_qf_min, k.q0_over_qf_max, k.points);
    let mut rows = Vec::new();
    let mut json_rows = Vec::new();
    let mut notes = Vec::new();
    let mut slopes = Vec::new();
    for &chi in &k.chi {
        let mut mags = Vec::new();
        for &x in &ratios {
            let kp = KineticParams::with_q0(x * q_f, q_f, rho0);
            let exact = delta_k_exact(&d0, &kp, chi)?;
            let closed = delta_k_closed(&kp, chi, rho0).value;
            let rel = ((closed - exact) / exact).abs();
            let allowance = exponential_allowance(&kp, chi);
            mags.push(exact.abs());
            rows.push(vec![
                Cell::Num(x),
                Cell::Num(chi),
                Cell::Num(exact),
                Cell::Num(closed),
                Cell::Num(rel),
                Cell::Num(allowance),
            ]);
            json_rows.push(json!({
                "q0_over_qF": x,
                "chi": chi,
                "deltaK_exact": exact,
                "deltaK_closed": closed,
                "rel_err": rel,
                "exp_allowance": allowance,
            }));
        }
        let slope = log_log_slope(&ratios, &mags)?;
        notes.push(format!(
            "log-log slope of |deltaK_exact| vs q0 at chi = {chi:e}: {slope:e}"
        ));
        slopes.push(json!({ "chi": chi, "slope": slope }));
    }
    Ok(Report {
        header: vec![
            "q0_over_qF",
            "chi",
            "deltaK_exact",
            "deltaK_closed",
            "rel_err",
            "exp_allowance",
        ],
        rows,
        notes,
        json: json!({ "rows": json_rows, "slopes": slopes }),
        failed: false,
    })
}

pub fn gfactor(cfg: &RunConfig) -> Result<Report, CliError> {
    let gb = &cfg.gfactor;
    let sg = sample(cfg)?;
    let leads = gb.leads();
    let opts = McOptions {
        threads: cfg.threads,
        ..Default::default()
    };
    let g = g_factor_with(&sg, &leads, gb.samples, cfg.seed, opts)?;
    let mut result = json!({
        "G": g.g,
        "std_error": g.mc_std_error,
        "n_samples": g.n_samples,
        "seed": g.seed,
        "negative": g.negative,
        "mixed_sign": g.mixed_sign,
        "shape": sg,
        "leads": leads,
    });
    let mut header = vec!["G", "std_error", "n_samples", "seed", "mixed_sign"];
    let mut row = vec![
        Cell::Num(g.g),
        Cell::Num(g.mc_std_error),
        Cell::Int(g.n_samples),
        Cell::Int(g.seed),
        Cell::Bool(g.mixed_sign),
    ];
    if cfg.units.mode == UnitMode::Si {
        let h = &cfg.hooge;
        let sg_si = sg.scaled(h.length_scale);
        let leads_si = leads.scaled(h.length_scale);
        let kp = KineticParams::degenerate(h.n_density, h.m_star, h.tau, h.field, E_CHARGE_SI);
        let n = h.n_density * sg_si.volume();
        let omega = 2.0 * PI * h.frequency;
        let u = units(cfg);
        let hooge = hooge_alpha(&g, &sg_si, &leads_si, &kp, n, leads_si.distance(), omega, &u)?;
        let total = total_induced_spectrum_si(&g, &sg_si, &kp, omega, &u)?;
        result["hooge"] = json!({
            "alpha": hooge.alpha,
            "c_over_u2": hooge.c_over_u2,
            "c_over_u2_direct": hooge.c_over_u2_direct,
            "total_spectrum_si": total,
        });
        header.extend(["hooge_alpha", "total_spectrum_si"]);
        row.extend([Cell::Num(hooge.alpha), Cell::Num(total)]);
    }
    Ok(Report {
        header,
        rows: vec![row],
        notes: Vec::new(),
        json: result,
        failed: false,
    })
}

pub fn ensemble(cfg: &RunConfig) -> Result<Report, CliError> {
    let e = &cfg.ensemble;
    let d0 = cfg.distribution.build()?;
    let kp = KineticParams::with_q0(e.q0, fermi_scale(&d0), d0.value_at_zero());
    let model = PerElectronModel::Induced {
        kp,
        e_charge: e.e_charge,
    };
    let sg = sample(cfg)?;
    let leads = LeadPlacement::new(cfg.gfactor.x_lead_a, cfg.gfactor.x_lead_b, e.lead_radius);
    let ec = EnsembleConfig {
        correlation: e.correlation,
        threads: cfg.threads,
        ..EnsembleConfig::new(e.n_electrons, e.omega, e.t_window, cfg.seed)
    };
    let totals = Ensemble::new(&sg, &leads, &model).trials(&ec, e.trials)?;
    let stats = EnsembleStats::from_totals(&totals, e.n_electrons);
    let gaussian = if totals.len() >= MIN_GAUSSIAN_TRIALS {
        Some(gaussianity_test(&totals, e.n_electrons)?.1)
    } else {
        None
    };
    let json = json!({
        "N": e.n_electrons,
        "trials": e.trials,
        "c": e.correlation,
        "median_total": stats.median_magnitude,
        "iqr": stats.iqr,
        "skewness": { "re": stats.skewness_re, "im": stats.skewness_im },
        "kurtosis": { "re": stats.excess_kurtosis_re, "im": stats.excess_kurtosis_im },
        "seed": cfg.seed,
        "phase_underwrap": ec.phase_underwrap(),
        "gaussian": gaussian,
    });
    let verdict = gaussian.map_or("untested".to_string(), |g| g.to_string());
    Ok(Report {
        header: vec![
            "N",
            "trials",
            "c",
            "median_total",
            "iqr",
            "skew_re",
            "skew_im",
            "kurt_re",
            "kurt_im",
            "seed",
            "gaussian",
        ],
        rows: vec![vec![
            Cell::Int(e.n_electrons),
            Cell::Int(e.trials),
            Cell::Num(e.correlation),
            Cell::Num(stats.median_magnitude),
            Cell::Num(stats.iqr),
            Cell::Num(stats.skewness_re),
            Cell::Num(stats.skewness_im),
            Cell::Num(stats.excess_kurtosis_re),
            Cell::Num(stats.excess_kurtosis_im),
            Cell::Int(cfg.seed),
            Cell::Text(verdict),
        ]],
        notes: Vec::new(),
        json,
        failed: false,
    })
}

struct CheckRow {
    name: &'static str,
    value: f64,
    tolerance: f64,
    pass: bool,
}

fn check_angular() -> Result<CheckRow, CliError> {
    let mut worst: f64 = 0.0;
    for chi in [0.0, 0.3, PI / 4.0, 1.2, PI / 2.0 - 1e-3] {
        let v = angular_integral(f64::sin(chi), |_| 1.0, Tolerance::new(1e-13, 1e-13))?.value;
        worst = worst.max((v - PI).abs());
    }
    Ok(CheckRow {
        name: "angular_identity",
        value: worst,
        tolerance: 1e-10,
        pass: worst < 1e-10,
    })
}

fn check_quadratic_field() -> Result<CheckRow, CliError> {
    let d0 = MomentumDistribution::fermi_step(1.0)?;
    let q0s = log_grid(1e-3, 1e-1, 9);
    let mut mags = Vec::new();
    for &q in &q0s {
        let kp = KineticParams::with_q0(q, 1.0, d0.value_at_zero());
        mags.push(delta_k_exact(&d0, &kp, PI / 3.0)?.abs());
    }
    let dev = (log_log_slope(&q0s, &mags)? - 2.0).abs();
    Ok(CheckRow {
        name: "quadratic_field_slope",
        value: dev,
        tolerance: 0.02,
        pass: dev <= 0.02,
    })
}

fn check_scale_invariance(cfg: &RunConfig) -> Result<CheckRow, CliError> {
    let sg = SampleGeometry::unit_cube();
    let leads = LeadPlacement::new([0.5, 0.5, -0.25], [0.5, 0.5, 1.25], 0.05);
    let opts = McOptions {
        threads: cfg.threads,
        ..Default::default()
    };
    let a = g_factor_with(&sg, &leads, 100_000, cfg.seed, opts)?;
    let b = g_factor_with(&sg.scaled(2.0), &leads.scaled(2.0), 100_000, cfg.seed, opts)?;
    let dev = (a.g - b.g).abs() / a.mc_std_error.hypot(b.mc_std_error);
    Ok(CheckRow {
        name: "g_factor_scale_invariance_sigmas",
        value: dev,
        tolerance: 3.0,
        pass: dev <= 3.0,
    })
}

fn check_exact_vs_asymptote() -> Result<CheckRow, CliError> {
    let mut worst: f64 = 0.0;
    for d in [
        MomentumDistribution::fermi_step(1.0)?,
        MomentumDistribution::gaussian_isotropic(1.0)?,
    ] {
        let ev = SpectrumEvaluator::new(d, 1.0)?;
        let r = 100.0 / ev.dtilde();
        let w = 1e-3 * ev.omega0(r);
        for chi in [0.0, PI / 4.0] {
            let g = ObservationGeometry::from_polar(r, chi, r)?;
            let e = ev.exact_i2(&g, w)?.magnitude;
            let a = ev.asymptotic_i22(&g, w)?.magnitude;
            worst = worst.max(((e - a) / a).abs());
        }
    }
    Ok(CheckRow {
        name: "exact_vs_asymptote",
        value: worst,
        tolerance: 0.02,
        pass: worst < 0.02,
    })
}

fn check_connected() -> Result<CheckRow, CliError> {
    let probe = ConnectedProbe::new([0.0, 0.6, 0.8], 0.01, [0.0, 0.0, 0.05], 1.0);
    let fit = connected_log_coefficient(&probe, &log_grid(1e-6, 1e-4, 11))?;
    let dev = ((fit.coefficient - fit.predicted) / fit.predicted).abs();
    Ok(CheckRow {
        name: "connected_log_coefficient",
        value: dev,
        tolerance: 0.05,
        pass: dev < 0.05 && fit.residual < 0.01,
    })
}

pub fn validate(cfg: &RunConfig) -> Result<Report, CliError> {
    let checks = [
        check_angular()?,
        check_quadratic_field()?,
        check_scale_invariance(cfg)?,
        check_exact_vs_asymptote()?,
        check_connected()?,
    ];
    let failed = checks.iter().any(|c| !c.pass);
    let rows = checks
        .iter()
        .map(|c| {
            vec![
                Cell::Text(c.name.into()),
                Cell::Num(c.value),
                Cell::Num(c.tolerance),
                Cell::Bool(c.pass),
            ]
        })
        .collect();
    let json: Vec<Value> = checks
        .iter()
        .map(|c| json!({ "check": c.name, "value": c.value, "tolerance": c.tolerance, "pass": c.pass }))
        .collect();
    Ok(Report {
        header: vec!["check", "value", "tolerance", "pass"],
        rows,
        notes: Vec::new(),
        json: json!({ "checks": json, "all_pass": !failed }),
        failed,
    })
}
