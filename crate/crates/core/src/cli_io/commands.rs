//! One function per subcommand, each turning a validated configuration
//! into tables plus the derived scalars recorded in the manifest.

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use super::config::{Law, Observable, ProfileSource, RunConfig, SearchMethod, SpectrumSource};
use super::table::{complex_cells, Cell, Table};
use crate::analysis::{classify_regime, fit_exponential_rate, fit_power_law, heuristic_window, peak_envelope, FitReport};
use crate::bath::momentum_grid;
use crate::boundstates::{
    bound_state_from_energy, bound_states_closed_unidirectional, bound_states_numeric, bound_states_self_consistent,
    BoundState, LoopClass,
};
use crate::dynamics::{evolve_numeric, photon_profile_snapshot, uniform_grid, EvolutionResult, EvolveOptions};
use crate::emitter_model::EffectiveHamiltonian;
use crate::error::{Error, Result};

#[derive(Clone, Debug, Default)]
pub struct CommandOutput {
    pub tables: Vec<Table>,
    pub derived: Map<String, Value>,
    pub warnings: Vec<String>,
}

fn c_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn spectrum(cfg: &RunConfig) -> Result<CommandOutput> {
    let bath = cfg.bath_spec();
    let mut out = CommandOutput::default();
    let (mut max_im, mut min_im) = (f64::NEG_INFINITY, f64::INFINITY);
    match cfg.spectrum.source {
        SpectrumSource::Bloch => {
            let mut t = Table::new("spectrum", &["k", "band", "re_e", "im_e", "group_speed"]);
            for k in momentum_grid(cfg.spectrum.n_k) {
                let s = bath.dispersion_sample(k);
                for (band, e) in s.energies.iter().enumerate() {
                    max_im = max_im.max(e.im);
                    min_im = min_im.min(e.im);
                    let [re, im] = complex_cells(*e);
                    let v = s.group_speed.as_ref().map(|g| g[band]);
                    t.push(vec![k.into(), band.into(), re, im, v.into()]);
                }
            }
            out.tables.push(t);
        }
        SpectrumSource::Lattice => {
            let m = bath.build_matrix().to_dense();
            let eig = m
                .eigenvalues()
                .map_err(|e| Error::ConvergenceFailure(format!("{e:?}")))?;
            let mut values: Vec<Complex64> = eig.into_iter().collect();
            values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
            let mut t = Table::new("spectrum", &["index", "re_e", "im_e"]);
            for (i, e) in values.iter().enumerate() {
                max_im = max_im.max(e.im);
                min_im = min_im.min(e.im);
                let [re, im] = complex_cells(*e);
                t.push(vec![i.into(), re, im]);
            }
            out.tables.push(t);
        }
    }
    out.derived.insert("max_im_e".into(), json!(max_im));
    out.derived.insert("min_im_e".into(), json!(min_im));
    Ok(out)
}

pub fn winding(cfg: &RunConfig) -> Result<CommandOutput> {
    let bath = cfg.bath_spec();
    let mut out = CommandOutput::default();
    let mut t = Table::new("winding", &["re_e_ref", "im_e_ref", "winding", "distance", "error"]);
    for [re, im] in &cfg.winding.e_ref {
        let e = Complex64::new(*re, *im);
        let dist = bath.distance_to_spectrum(e, cfg.winding.n_k);
        match bath.spectral_winding(e, cfg.winding.n_k) {
            Ok(w) => t.push(vec![(*re).into(), (*im).into(), w.into(), dist.into(), Cell::Empty]),
            Err(err) if !err.is_validation() => {
                out.warnings.push(format!("e_ref = {e}: {err}"));
                t.push(vec![(*re).into(), (*im).into(), Cell::Empty, dist.into(), err.to_string().into()]);
            }
            Err(err) => return Err(err),
        }
    }
    out.tables.push(t);
    out.derived.insert("n_k".into(), json!(cfg.winding.n_k));
    Ok(out)
}

pub fn eps(cfg: &RunConfig) -> Result<CommandOutput> {
    let bath = cfg.bath_spec();
    let points = bath.exceptional_points()?;
    let mut t = Table::new("eps", &["k", "re_e", "im_e"]);
    for &k in &points {
        let e = bath.dispersion(k)[0];
        let [re, im] = complex_cells(e);
        t.push(vec![k.into(), re, im]);
    }
    let mut out = CommandOutput::default();
    out.derived.insert("exceptional_points".into(), json!(points));
    out.tables.push(t);
    Ok(out)
}

pub fn dos(cfg: &RunConfig) -> Result<CommandOutput> {
    let bath = cfg.bath_spec();
    let h = bath.dos_damping(cfg.dos.n_k, cfg.dos.bins)?;
    let mut t = Table::new("dos", &["bin", "im_e_lower", "im_e_upper", "im_e_center", "count", "density"]);
    for i in 0..h.counts.len() {
        let lo = h.lower + i as f64 * h.bin_width;
        t.push(vec![
            i.into(),
            lo.into(),
            (lo + h.bin_width).into(),
            h.bin_center(i).into(),
            (h.counts[i] as usize).into(),
            h.density[i].into(),
        ]);
    }
    let mut out = CommandOutput::default();
    out.derived.insert("max_im_e".into(), json!(h.max_imag));
    out.derived.insert("min_im_e".into(), json!(h.min_imag));
    out.tables.push(t);
    Ok(out)
}

fn loop_label(c: LoopClass) -> &'static str {
    match c {
        LoopClass::InsideLoop => "InsideLoop",
        LoopClass::OutsideLoop => "OutsideLoop",
        LoopClass::NotApplicable => "NotApplicable",
    }
}

/// Bound states of the configured system by the configured method.
pub fn find_bound_states(cfg: &RunConfig) -> Result<Vec<BoundState>> {
    let bath = cfg.bath_spec();
    let emitter = cfg.emitter_spec();
    let opts = cfg.bound_states.search_options();
    match cfg.bound_states.method {
        SearchMethod::Numeric => {
            let h = EffectiveHamiltonian::assemble(&bath, &emitter)?;
            bound_states_numeric(&h, &opts)
        }
        SearchMethod::SelfConsistent => bound_states_self_consistent(&bath, &emitter, &opts),
        SearchMethod::ClosedForm => {
            let closed = bound_states_closed_unidirectional(emitter.delta(), emitter.g, bath.kappa)?;
            closed
                .into_iter()
                .map(|b| {
                    let mut s = bound_state_from_energy(&bath, emitter.g, emitter.x0, b.energy, opts.tail_window)?;
                    // the thermodynamic-limit weight replaces the finite-L sum
                    s.emitter_weight = b.emitter_weight;
                    s.loop_class = b.loop_class;
                    Ok(s)
                })
                .collect()
        }
    }
}

pub fn bound_states(cfg: &RunConfig) -> Result<CommandOutput> {
    let states = find_bound_states(cfg)?;
    let mut t = Table::new(
        "bound-states",
        &["index", "re_e", "im_e", "loop_class", "emitter_weight", "xi", "tail_side", "tail_r_squared"],
    );
    for (i, s) in states.iter().enumerate() {
        let [re, im] = complex_cells(s.energy);
        let side = s.tail.map(|f| format!("{:?}", f.side).to_lowercase());
        t.push(vec![
            i.into(),
            re,
            im,
            loop_label(s.loop_class).into(),
            s.emitter_weight.into(),
            s.xi().into(),
            side.into(),
            s.tail.map(|f| f.r_squared).into(),
        ]);
    }
    let mut out = CommandOutput::default();
    out.tables.push(t);
    if cfg.bound_states.write_profiles {
        let mut p = Table::new("bound-states-profiles", &["index", "x", "re_c_x", "im_c_x"]);
        for (i, s) in states.iter().enumerate() {
            for (x, c) in s.profile.iter().enumerate() {
                let [re, im] = complex_cells(*c);
                p.push(vec![i.into(), x.into(), re, im]);
            }
        }
        out.tables.push(p);
    }
    let energies: Vec<Value> = states
        .iter()
        .map(|s| json!({"e_b": c_json(s.energy), "loop_class": loop_label(s.loop_class), "emitter_weight": s.emitter_weight, "xi": s.xi()}))
        .collect();
    out.derived.insert("bound_states".into(), Value::Array(energies));
    Ok(out)
}

fn run_evolution(cfg: &RunConfig, opts: &EvolveOptions) -> Result<(EvolutionResult, Vec<String>)> {
    let h = EffectiveHamiltonian::assemble(&cfg.bath_spec(), &cfg.emitter_spec())?;
    let grid = uniform_grid(cfg.time.t_max, cfg.time.steps);
    let res = evolve_numeric(&h, &grid, opts)?;
    let warnings = res
        .boundary_warning
        .map(|w| {
            vec![format!(
                "photon amplitude {:.3e} reached open edge site {} at t = {}",
                w.amplitude, w.site, w.t
            )]
        })
        .unwrap_or_default();
    Ok((res, warnings))
}

pub fn evolve(cfg: &RunConfig) -> Result<CommandOutput> {
    let (res, warnings) = run_evolution(cfg, &cfg.time.evolve_options())?;
    let mut t = Table::new(
        "evolve",
        &["t", "re_c_e", "im_c_e", "emitter_population", "photon_population", "ground_probability"],
    );
    for i in 0..res.times.len() {
        let [re, im] = complex_cells(res.c_e_series[i]);
        t.push(vec![
            res.times[i].into(),
            re,
            im,
            res.c_e_series[i].norm_sqr().into(),
            res.photon_population_series[i].into(),
            res.ground_prob_series[i].into(),
        ]);
    }
    let mut out = CommandOutput {
        warnings,
        ..CommandOutput::default()
    };
    out.tables.push(t);
    if cfg.time.record_snapshots {
        let mut s = Table::new("evolve-snapshots", &["t", "x", "re_c_x", "im_c_x"]);
        for snap in &res.snapshots {
            for (x, c) in snap.c_x.iter().enumerate() {
                let [re, im] = complex_cells(*c);
                s.push(vec![snap.t.into(), x.into(), re, im]);
            }
        }
        out.tables.push(s);
    }
    let last = res.times.len() - 1;
    out.derived.insert("integrator_steps".into(), json!(res.steps));
    out.derived.insert("final_emitter_population".into(), json!(res.c_e_series[last].norm_sqr()));
    out.derived.insert("final_photon_population".into(), json!(res.photon_population_series[last]));
    out.derived.insert("final_ground_probability".into(), json!(res.ground_prob_series[last]));
    Ok(out)
}

pub fn profile(cfg: &RunConfig) -> Result<CommandOutput> {
    let t_snap = cfg.profile.t;
    let emitter = cfg.emitter_spec();
    let (c_x, warnings) = match cfg.profile.source {
        ProfileSource::Analytic => {
            let x0 = emitter.x0;
            let right = photon_profile_snapshot(cfg.length - x0, t_snap, emitter.delta(), emitter.g, cfg.kappa)?;
            let mut full = vec![Complex64::new(0.0, 0.0); cfg.length];
            full[x0..].copy_from_slice(&right);
            (full, Vec::new())
        }
        ProfileSource::Numeric if t_snap == 0.0 => (vec![Complex64::new(0.0, 0.0); cfg.length], Vec::new()),
        ProfileSource::Numeric => {
            let opts = EvolveOptions {
                record_snapshots: true,
                snapshot_every: 1,
                ..cfg.time.evolve_options()
            };
            let h = EffectiveHamiltonian::assemble(&cfg.bath_spec(), &emitter)?;
            let res = evolve_numeric(&h, &[0.0, t_snap], &opts)?;
            let warnings = res
                .boundary_warning
                .map(|w| vec![format!("photon amplitude reached open edge site {} at t = {}", w.site, w.t)])
                .unwrap_or_default();
            let snap = res.snapshots.last().expect("snapshot at the final time");
            (snap.c_x.clone(), warnings)
        }
    };
    let mut t = Table::new("profile", &["x", "re_c_x", "im_c_x", "abs_c_x"]);
    for (x, c) in c_x.iter().enumerate() {
        let [re, im] = complex_cells(*c);
        t.push(vec![x.into(), re, im, c.norm().into()]);
    }
    let mut out = CommandOutput {
        warnings,
        ..CommandOutput::default()
    };
    out.derived.insert("t".into(), json!(t_snap));
    out.derived
        .insert("photon_population".into(), json!(c_x.iter().map(|c| c.norm_sqr()).sum::<f64>()));
    out.tables.push(t);
    Ok(out)
}

pub const CLASSIFY_COLUMNS: [&str; 11] = [
    "re_e_plus",
    "im_e_plus",
    "re_e_minus",
    "im_e_minus",
    "re_zeta_plus",
    "im_zeta_plus",
    "re_zeta_minus",
    "im_zeta_minus",
    "regime",
    "dominant_pole",
    "predicted_spatial_slope",
];

pub fn classify_row(cfg: &RunConfig) -> Result<Vec<Cell>> {
    if cfg.bath_spec().variant() != crate::bath::BathVariant::UnidirectionalHatanoNelson {
        return Err(Error::WrongVariant {
            operation: "classify",
            expected: "unidirectional",
        });
    }
    let e = cfg.emitter_spec();
    let r = classify_regime(e.delta(), e.g, cfg.kappa)?;
    let mut row = Vec::new();
    for z in [r.e_plus, r.e_minus, r.zeta_plus, r.zeta_minus] {
        row.extend(complex_cells(z));
    }
    row.push(format!("{:?}", r.regime).into());
    row.push(format!("{:?}", r.dominant_pole).into());
    row.push(r.predicted_spatial_slope.into());
    Ok(row)
}

pub fn classify(cfg: &RunConfig) -> Result<CommandOutput> {
    let row = classify_row(cfg)?;
    let mut t = Table::new("classify", &CLASSIFY_COLUMNS);
    let mut out = CommandOutput::default();
    out.derived.insert("regime".into(), json!(row[8].render()));
    out.derived.insert("zeta_plus".into(), json!([row[4].render(), row[5].render()]));
    out.derived.insert("zeta_minus".into(), json!([row[6].render(), row[7].render()]));
    t.push(row);
    out.tables.push(t);
    Ok(out)
}

pub const FIT_COLUMNS: [&str; 8] = ["observable", "law", "value", "stderr", "r_squared", "t_min", "t_max", "points"];

/// Evolves the configured system and fits the configured observable.
pub fn fit_report(cfg: &RunConfig) -> Result<(FitReport, Vec<String>)> {
    let opts = EvolveOptions {
        record_snapshots: false,
        ..cfg.time.evolve_options()
    };
    let (res, warnings) = run_evolution(cfg, &opts)?;
    let values = match cfg.fit.observable {
        Observable::EmitterPopulation => res.emitter_population(),
        Observable::PhotonPopulation => res.photon_population_series.clone(),
    };
    let (times, values) = if cfg.fit.peaks {
        peak_envelope(&res.times, &values)
    } else {
        (res.times.clone(), values)
    };
    let window = match cfg.fit.window {
        Some([a, b]) => (a, b),
        None => heuristic_window(&res.times).expect("time grid is non-empty"),
    };
    let report = match cfg.fit.law {
        Law::Exponential => fit_exponential_rate(&times, &values, window, cfg.fit.semantics)?,
        Law::PowerLaw => fit_power_law(&times, &values, window)?,
    };
    Ok((report, warnings))
}

pub fn fit_row(cfg: &RunConfig, r: &FitReport) -> Vec<Cell> {
    let name = |v: Value| v.as_str().unwrap_or_default().to_owned();
    vec![
        name(json!(cfg.fit.observable)).into(),
        name(json!(cfg.fit.law)).into(),
        r.value.into(),
        r.stderr.into(),
        r.r_squared.into(),
        r.window.0.into(),
        r.window.1.into(),
        r.points.into(),
    ]
}

pub fn fit(cfg: &RunConfig) -> Result<CommandOutput> {
    let (report, warnings) = fit_report(cfg)?;
    let mut t = Table::new("fit", &FIT_COLUMNS);
    t.push(fit_row(cfg, &report));
    let mut out = CommandOutput {
        warnings,
        ..CommandOutput::default()
    };
    out.derived.insert("value".into(), json!(report.value));
    out.derived.insert("r_squared".into(), json!(report.r_squared));
    out.tables.push(t);
    Ok(out)
}
