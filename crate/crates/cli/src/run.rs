//! Scenario dispatch.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use ilab_core::ensemble::{self, EnsembleSpec, Potential};
use ilab_core::fraunhofer::{phase_scan_surface, FraunhoferSpec};
use ilab_core::kirchhoff::{far_field_profile, Aperture, SourceSpec};
use ilab_core::qtm::{
    accumulate_hits, kink_diagnostic, quantum_potential_surface, screen_bin_probabilities,
    total_variation, trajectory_fan, HistogramSpec, Seeding, TrajectoryOptions, TrajectoryStatus,
    TwoSlitSetup, TwoSlitState,
};
use ilab_core::{Grid1D, Vec3};
use serde_json::{json, Map, Value};

use crate::config::{
    AmplitudeChoice, ApertureKind, EnsembleConfig, FraunhoferConfig, KirchhoffConfig, QtmConfig,
    Scenario, ScenarioConfig, SeedingChoice,
};
use crate::error::{CliError, CliResult};
use crate::output::{
    emit_heatmap, sha256_hex, to_json, write_atomic, Cell, FileEntry, Grid2Table, Manifest, Table,
    MANIFEST_NAME,
};

pub const TOOL_NAME: &str = "ilab";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything a scenario produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub manifest: Manifest,
    pub out_dir: PathBuf,
}

struct Emitter<'a> {
    dir: &'a Path,
    files: Vec<PathBuf>,
    heatmaps: bool,
}

impl Emitter<'_> {
    fn table(&mut self, name: &str, table: &Table) -> CliResult<()> {
        let path = self.dir.join(name);
        write_atomic(&path, &table.to_csv()?)?;
        self.files.push(path);
        Ok(())
    }

    fn heatmap(&mut self, name: &str, table: &Grid2Table) -> CliResult<()> {
        if !self.heatmaps {
            return Ok(());
        }
        let (pgm, sidecar) = emit_heatmap(table, &self.dir.join(name))?;
        self.files.push(pgm);
        self.files.push(sidecar);
        Ok(())
    }
}

#[derive(Default)]
struct Outcome {
    results: Map<String, Value>,
    warnings: Vec<String>,
}

/// Runs a resolved scenario and writes its files plus `manifest.json` into
/// `out_dir`.
pub fn run_scenario(config: &ScenarioConfig, out_dir: &Path) -> CliResult<RunReport> {
    let scenario = config
        .scenario
        .ok_or_else(|| CliError::Config("key `scenario`: not resolved".into()))?;
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let mut em = Emitter {
        dir: out_dir,
        files: Vec::new(),
        heatmaps: config.output.heatmap,
    };
    let missing = |block: &str| CliError::Config(format!("key `{block}`: block missing"));
    let outcome = match scenario {
        Scenario::Fraunhofer => run_fraunhofer(config.fraunhofer.as_ref().ok_or_else(|| missing("fraunhofer"))?, &mut em)?,
        Scenario::Kirchhoff => run_kirchhoff(config.kirchhoff.as_ref().ok_or_else(|| missing("kirchhoff"))?, &mut em)?,
        Scenario::Ensemble => run_ensemble(config.ensemble.as_ref().ok_or_else(|| missing("ensemble"))?, &mut em)?,
        Scenario::QtmPotential => run_qtm_potential(config.qtm.as_ref().ok_or_else(|| missing("qtm"))?, &mut em)?,
        Scenario::QtmTrajectories => {
            run_qtm_trajectories(config.qtm.as_ref().ok_or_else(|| missing("qtm"))?, config.seed, &mut em)?
        }
        Scenario::QtmAccumulate => {
            run_qtm_accumulate(config.qtm.as_ref().ok_or_else(|| missing("qtm"))?, config.seed, &mut em)?
        }
    };

    let mut files = Vec::with_capacity(em.files.len());
    for path in &em.files {
        let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
        files.push(FileEntry {
            name: path.file_name().expect("emitted files have names").to_string_lossy().into_owned(),
            bytes: bytes.len() as u64,
            sha256: sha256_hex(&bytes),
        });
    }
    let manifest = Manifest {
        tool: TOOL_NAME.into(),
        version: TOOL_VERSION.into(),
        scenario: scenario.name().into(),
        seed: config.seed,
        parameters: serde_json::to_value(config).map_err(|e| CliError::Output(e.to_string()))?,
        results: outcome.results,
        warnings: outcome.warnings,
        files,
    };
    write_atomic(&out_dir.join(MANIFEST_NAME), &to_json(&manifest)?)?;
    Ok(RunReport {
        manifest,
        out_dir: out_dir.to_path_buf(),
    })
}

fn config_err(key: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("key `{key}`: {msg}"))
}

fn linspace(key: &str, lo: f64, hi: f64, count: usize) -> CliResult<Grid1D> {
    if count < 2 || !(hi > lo) {
        return Err(config_err(key, format!("need count >= 2 and max > min, got [{lo}, {hi}] x {count}")));
    }
    Grid1D::from_range(lo, hi, count).map_err(|e| config_err(key, e))
}

/// Maps core validation failures onto the config key that caused them.
fn at<T>(key: &str, r: ilab_core::Result<T>) -> CliResult<T> {
    r.map_err(|e| {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            config_err(key, e)
        }
    })
}

fn run_fraunhofer(c: &FraunhoferConfig, em: &mut Emitter) -> CliResult<Outcome> {
    let grid = linspace("fraunhofer.theta_count", c.theta_min, c.theta_max, c.theta_count)?;
    if c.alpha.is_empty() {
        return Err(config_err("fraunhofer.alpha", "at least one phase is required"));
    }
    let spec = at("fraunhofer", FraunhoferSpec::new(c.k, c.a, 0.0, grid.nodes().collect()))?;
    let surface = at("fraunhofer.alpha", phase_scan_surface(&spec, &c.alpha))?;
    let mut header = vec!["theta [rad]".to_string()];
    header.extend(c.alpha.iter().map(|a| format!("I(alpha={a:?}) [rel]")));
    let mut t = Table::new(header);
    for (i, theta) in grid.nodes().enumerate() {
        let mut row = vec![Cell::Num(theta)];
        row.extend(surface[i].iter().map(|v| Cell::Num(*v)));
        t.push(row);
    }
    em.table("phase_scan.csv", &t)?;
    em.heatmap(
        "phase_scan.pgm",
        &Grid2Table {
            width: grid.len(),
            height: c.alpha.len(),
            values: (0..c.alpha.len())
                .flat_map(|j| surface.iter().map(move |row| Some(row[j])))
                .collect(),
        },
    )?;
    Ok(Outcome::default())
}

fn run_kirchhoff(c: &KirchhoffConfig, em: &mut Emitter) -> CliResult<Outcome> {
    if !(c.wavelength > 0.0 && c.wavelength.is_finite()) {
        return Err(config_err("kirchhoff.wavelength", "must be > 0"));
    }
    let k = 2.0 * PI / c.wavelength;
    let aperture = match c.aperture {
        ApertureKind::Single => Aperture::single_slit(c.half_width_x, c.half_width_y),
        ApertureKind::Double => Aperture::double_slit(c.separation, c.half_width_x, c.half_width_y),
    };
    let aperture = at("kirchhoff.aperture", aperture)?;
    let source = match c.source {
        None => SourceSpec::plane_wave(c.alpha),
        Some([x, y, z]) => SourceSpec::point(Vec3::new(x, y, z), c.alpha, Vec3::new(0.0, 0.0, 1.0)),
    };
    let source = at("kirchhoff.source", source)?;
    at("kirchhoff.quadrature", c.quadrature.validate())?;
    let screen = linspace("kirchhoff.screen_count", c.screen_min, c.screen_max, c.screen_count)?;
    let p = at("kirchhoff", far_field_profile(&aperture, &source, k, &screen, c.distance, &c.quadrature))?;
    let mut t = Table::new(["x [length]", "theta [rad]", "intensity [rel]"]);
    for i in 0..p.x.len() {
        t.push(vec![p.x[i].into(), p.theta[i].into(), p.intensity[i].into()]);
    }
    em.table("far_field.csv", &t)?;
    let mut out = Outcome::default();
    out.results.insert("peak_intensity".into(), json!(p.peak));
    out.warnings.extend(p.regime_warning);
    Ok(out)
}

fn run_ensemble(c: &EnsembleConfig, em: &mut Emitter) -> CliResult<Outcome> {
    let potential = match &c.radial_potential {
        None => Potential::Constant(c.potential),
        Some(values) => {
            let grid = Grid1D::new(c.radial_origin, c.radial_spacing, values.len().max(1));
            Potential::Radial {
                grid: at("ensemble.radial_spacing", grid)?,
                values: values.clone(),
            }
        }
    };
    let mut spec = at("ensemble", EnsembleSpec::new(c.total_energy, potential, c.mass_weight))?;
    if c.amplitude == AmplitudeChoice::UnitProbability {
        spec = at("ensemble.amplitude", ensemble::renormalize(&spec))?;
    }
    let grid = linspace("ensemble.r_count", 0.0, c.r_max, c.r_count)?;
    let mut t = Table::new(["r [length]", "k1 [1/length]", "psi [length^-3/2]"]);
    for r in grid.nodes() {
        let v = Vec3::new(r, 0.0, 0.0);
        t.push(vec![r.into(), ensemble::k_cutoff(&spec, v).into(), ensemble::ensemble_wavefunction(&spec, v).into()]);
    }
    em.table("ensemble_profile.csv", &t)?;
    let mut out = Outcome::default();
    if let Ok(norm) = ensemble::norm_constant_potential(&spec) {
        out.results.insert("norm".into(), json!(norm));
    }
    if !spec.has_states() {
        out.warnings.push("no admissible states: k1 = 0 everywhere".into());
    }
    Ok(out)
}

fn two_slit(c: &QtmConfig) -> CliResult<(TwoSlitState, Vec<String>)> {
    let setup = TwoSlitSetup {
        half_separation: c.half_separation,
        sigma0: c.sigma0,
        v_long: c.v_long,
        screen_distance: c.screen_distance,
        hbar: c.hbar,
        mass: c.mass,
    };
    let warnings = setup.regime_warning().into_iter().collect();
    Ok((at("qtm", TwoSlitState::new(setup))?, warnings))
}

fn check_tolerance(c: &QtmConfig) -> CliResult<()> {
    if !(c.tolerance > 0.0 && c.tolerance < 1.0) {
        return Err(config_err("qtm.tolerance", "must lie in (0, 1)"));
    }
    Ok(())
}

fn run_qtm_potential(c: &QtmConfig, em: &mut Emitter) -> CliResult<Outcome> {
    let (state, warnings) = two_slit(c)?;
    let xg = linspace("qtm.x_count", c.x_min, c.x_max, c.x_count)?;
    let tg = linspace("qtm.t_count", 0.0, state.screen_time(), c.t_count)?;
    let field = quantum_potential_surface(&state, &xg, &tg);
    let mut t = Table::new(["t [time]", "x [length]", "Q [energy]"]);
    for it in 0..tg.len() {
        for (ix, q) in field.row(it).iter().enumerate() {
            t.push(vec![tg.node(it).into(), xg.node(ix).into(), (*q).into()]);
        }
    }
    em.table("quantum_potential.csv", &t)?;
    em.heatmap(
        "quantum_potential.pgm",
        &Grid2Table {
            width: xg.len(),
            height: tg.len(),
            values: field.values.clone(),
        },
    )?;
    let mut out = Outcome { warnings, ..Default::default() };
    out.results.insert("masked_cells".into(), json!(field.masked_count()));
    Ok(out)
}

fn run_qtm_trajectories(c: &QtmConfig, seed: u64, em: &mut Emitter) -> CliResult<Outcome> {
    let (state, warnings) = two_slit(c)?;
    check_tolerance(c)?;
    if c.trajectories == 0 {
        return Err(config_err("qtm.trajectories", "must be >= 1"));
    }
    if c.samples < 2 {
        return Err(config_err("qtm.samples", "must be >= 2"));
    }
    let seeding = match c.seeding {
        SeedingChoice::Quantile => Seeding::Quantile,
        SeedingChoice::Random => Seeding::Random { seed },
    };
    let t_end = state.screen_time();
    let opts = TrajectoryOptions {
        tol: c.tolerance,
        samples: c.samples,
    };
    let fan = at("qtm", trajectory_fan(&state, c.trajectories, seeding, t_end, &opts))?;
    if let Some((i, e)) = fan.failures.first() {
        return Err(CliError::Numerical(format!("trajectory {i}: {e}")));
    }
    let mut paths = Table::new(["index", "t [time]", "x [length]", "v [length/time]"]);
    let mut summary = Table::new([
        "index",
        "x0 [length]",
        "x_end [length]",
        "status",
        "early_peak_accel [length/time^2]",
        "late_peak_accel [length/time^2]",
    ]);
    for (i, tr) in fan.completed().enumerate() {
        for s in &tr.samples {
            paths.push(vec![i.into(), s.t.into(), s.x.into(), s.v.into()]);
        }
        let kink = at("qtm", kink_diagnostic(&state, tr, t_end, 0.1, 0.3))?;
        let status = match tr.status {
            TrajectoryStatus::Completed => "completed",
            TrajectoryStatus::NodeAborted => "node_aborted",
        };
        summary.push(vec![
            i.into(),
            tr.start().into(),
            tr.end().x.into(),
            status.into(),
            kink.early_peak.into(),
            kink.late_peak.into(),
        ]);
    }
    em.table("trajectories.csv", &paths)?;
    em.table("trajectory_summary.csv", &summary)?;
    let trs: Vec<_> = fan.completed().collect();
    let mut out = Outcome { warnings, ..Default::default() };
    out.results.insert("crossings".into(), json!(ilab_core::qtm::crossing_count(&trs)));
    Ok(out)
}

fn run_qtm_accumulate(c: &QtmConfig, seed: u64, em: &mut Emitter) -> CliResult<Outcome> {
    let (state, warnings) = two_slit(c)?;
    check_tolerance(c)?;
    if c.hits == 0 {
        return Err(config_err("qtm.hits", "must be >= 1"));
    }
    let spec = match c.screen_range {
        None => {
            let d = HistogramSpec::default_for(&state);
            at("qtm.bins", HistogramSpec::new(d.lo, d.hi, c.bins))?
        }
        Some([lo, hi]) => at("qtm.screen_range", HistogramSpec::new(lo, hi, c.bins))?,
    };
    let acc = at("qtm.checkpoints", accumulate_hits(&state, c.hits, seed, &c.checkpoints, spec, c.tolerance))?;
    let analytic = screen_bin_probabilities(&state, &spec, state.screen_time());
    let mut tv = Map::new();
    for h in &acc.checkpoints {
        let n = h.total();
        let freq = h.frequencies();
        let mut t = Table::new([
            "bin_lo [length]",
            "bin_hi [length]",
            "count",
            "frequency [1]",
            "analytic_probability [1]",
        ]);
        for i in 0..spec.bins {
            t.push(vec![
                spec.edge(i).into(),
                spec.edge(i + 1).into(),
                h.counts[i].into(),
                freq[i].into(),
                analytic[i].into(),
            ]);
        }
        em.table(&format!("hits_{n:06}.csv"), &t)?;
        tv.insert(n.to_string(), json!(total_variation(&freq, &analytic)));
    }
    let mut out = Outcome { warnings, ..Default::default() };
    out.results.insert("total_variation".into(), Value::Object(tv));
    out.results.insert(
        "failed_trajectories".into(),
        json!(acc.hits.iter().filter(|h| h.is_none()).count()),
    );
    Ok(out)
}
