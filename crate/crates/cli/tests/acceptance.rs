//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use ilab_cli::config::{QtmConfig, Scenario, ScenarioConfig};
use ilab_cli::{run_scenario, verify_manifest};
use ilab_core::ensemble::{ensemble_wavefunction, k_cutoff, norm_constant_potential, renormalize, EnsembleSpec, Potential};
use ilab_core::fraunhofer::phase_intensity;
use ilab_core::kirchhoff::{far_field_profile, Aperture, QuadratureSpec, SourceSpec};
use ilab_core::qtm::{
    crossing_count, hamilton_jacobi_residual, hamilton_jacobi_residual_fd, integrate_trajectory,
    kink_diagnostic, quantum_potential, quantum_potential_fd, quantum_potential_surface, trajectory_fan,
    GaussianPacket, Seeding, TrajectoryOptions, TwoSlitSetup, TwoSlitState, WaveFunction,
};
use ilab_core::{Complex64, Grid1D, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

// ---------------------------------------------------------------- oracles

/// Clenshaw–Curtis rule with `n + 1` nodes on [-1, 1] (`n` even).
fn clenshaw_curtis(n: usize) -> (Vec<f64>, Vec<f64>) {
    let nodes: Vec<f64> = (0..=n).map(|j| (j as f64 * PI / n as f64).cos()).collect();
    let weights = (0..=n)
        .map(|j| {
            let c = if j == 0 || j == n { 1.0 } else { 2.0 };
            let mut s = 1.0;
            for k in 1..=n / 2 {
                let b = if 2 * k == n { 1.0 } else { 2.0 };
                s -= b / (4.0 * (k * k) as f64 - 1.0) * (2.0 * (k * j) as f64 * PI / n as f64).cos();
            }
            c / n as f64 * s
        })
        .collect();
    (nodes, weights)
}

/// Composite Clenshaw–Curtis on `[a, b]`.
struct CompositeRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl CompositeRule {
    fn new(a: f64, b: f64, panels: usize, cc: &(Vec<f64>, Vec<f64>)) -> Self {
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for p in 0..panels {
            let (lo, hi) = (a + h * p as f64, a + h * (p + 1) as f64);
            for (x, w) in cc.0.iter().zip(&cc.1) {
                nodes.push(0.5 * (lo + hi) + 0.5 * (hi - lo) * x);
                weights.push(0.5 * (hi - lo) * w);
            }
        }
        Self { nodes, weights }
    }

    fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }
}

/// Direct product quadrature of `(2π)^{-3/2} ∫_{|k|<k₁} χ₀ e^{ik·r} d³k` in
/// spherical k-coordinates: Clenshaw–Curtis in k and cos θ, trapezoid in φ.
fn sphere_transform_oracle(chi0: f64, k1: f64, r: Vec3) -> f64 {
    let cc = clenshaw_curtis(16);
    let phase = k1 * r.norm();
    let panels = (phase / 2.0).ceil() as usize + 1;
    let k_rule = CompositeRule::new(0.0, k1, panels, &cc);
    let u_rule = CompositeRule::new(-1.0, 1.0, panels, &cc);
    let m_phi = 2 * (phase.ceil() as usize) + 32;
    let phis: Vec<(f64, f64)> = (0..m_phi)
        .map(|j| {
            let p = 2.0 * PI * j as f64 / m_phi as f64;
            (p.cos(), p.sin())
        })
        .collect();
    let integral = k_rule.integrate(|k| {
        k * k
            * u_rule.integrate(|u| {
                let s = (1.0 - u * u).max(0.0).sqrt();
                let sum: f64 = phis
                    .iter()
                    .map(|(c, sn)| (k * (s * c * r.x + s * sn * r.y + u * r.z)).cos())
                    .sum();
                sum * 2.0 * PI / m_phi as f64
            })
    });
    chi0 * (2.0 * PI).powf(-1.5) * integral
}

/// `4π ∫ r² ψ(r)² dr` with the crate's closed-form ψ, truncated at
/// `k₁r = X = 10⁴π` and closed with the analytic tail of the envelope.
fn radial_norm_oracle(spec: &EnsembleSpec) -> f64 {
    let k1 = k_cutoff(spec, Vec3::default());
    let x_max = 1e4 * PI;
    let r_max = x_max / k1;
    let cc = clenshaw_curtis(16);
    let rule = CompositeRule::new(0.0, r_max, 1e4 as usize, &cc);
    let body = rule.integrate(|r| {
        let psi = ensemble_wavefunction(spec, Vec3::new(r, 0.0, 0.0));
        4.0 * PI * r * r * psi * psi
    });
    // ψ(r) = C (sin x − x cos x)/x³, x = k₁r; beyond X the integrand averages
    // to C² 4π/k₁³ · (1/(2X) + 1/(6X³)) when sin 2X = 0.
    let c = ensemble_wavefunction(spec, Vec3::default()) * 3.0;
    let tail = c * c * 4.0 * PI / k1.powi(3) * (1.0 / (2.0 * x_max) + 1.0 / (6.0 * x_max.powi(3)));
    body + tail
}

/// Independent two-Gaussian |ψ(x,t)|² with ħ = m = 1.
fn two_slit_density(x: f64, t: f64, y: f64, sigma0: f64) -> f64 {
    let s = Complex64::new(sigma0, t / (2.0 * sigma0));
    let g = |c: f64| (2.0 * PI).powf(-0.25) / s.sqrt() * (-(x - c) * (x - c) / (4.0 * sigma0 * s)).exp();
    let n2 = 1.0 / (2.0 * (1.0 + (-y * y / (2.0 * sigma0 * sigma0)).exp()));
    n2 * (g(y) + g(-y)).norm_sqr()
}

fn parse_csv(path: &Path) -> Vec<Vec<String>> {
    let text = fs::read_to_string(path).unwrap();
    text.split("\r\n").filter(|l| !l.is_empty()).skip(1).map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

fn fit_order(hs: &[f64], errs: &[f64]) -> f64 {
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

// --------------------------------------------------------------- criteria

fn phase_extinction() -> Verdict {
    let (k, a) = (2.0 * PI / 0.1, 1.0);
    let thetas: Vec<f64> = (0..400).map(|i| -0.3 + 0.6 * i as f64 / 399.0).collect();
    let mut worst = 0.0f64;
    let mut dark = true;
    for &alpha in &[0.0, FRAC_PI_6, FRAC_PI_4, FRAC_PI_3, FRAC_PI_2] {
        let c = alpha.cos();
        for &t in &thetas {
            let base = phase_intensity(k, t, 0.0, a).unwrap();
            let v = phase_intensity(k, t, alpha, a).unwrap();
            worst = worst.max((v - base * c * c).abs());
            if alpha == FRAC_PI_2 && v != 0.0 {
                dark = false;
            }
        }
    }
    verdict(worst <= 1e-15 && dark, format!("max |I(a) - I(0)cos^2 a| = {worst:e}; quarter-turn identically zero: {dark}"))
}

fn kirchhoff_single_slit() -> Verdict {
    let (l, lambda, a) = (1000.0, 0.1, 1.0);
    let k = 2.0 * PI / lambda;
    let aperture = Aperture::single_slit(a, a).unwrap();
    let quad = QuadratureSpec { rel_tol: 1e-6, ..Default::default() };
    // Central three lobes: |sin θ| < 2λ/(2a).
    let x_edge = l * 0.1 / (1.0 - 0.01f64).sqrt();
    let screen = Grid1D::from_range(-x_edge, x_edge, 401).unwrap();
    let p = match far_field_profile(&aperture, &SourceSpec::plane_wave(0.0).unwrap(), k, &screen, l, &quad) {
        Ok(p) => p,
        Err(e) => return verdict(false, format!("quadrature did not converge: {e}")),
    };
    let mut worst = 0.0f64;
    for (x, i) in p.x.iter().zip(&p.intensity) {
        let s = x / (x * x + l * l).sqrt();
        let u = k * a * s;
        let oracle = if u == 0.0 { 1.0 } else { (u.sin() / u).powi(2) };
        worst = worst.max((i - oracle).abs());
    }
    verdict(worst < 0.02, format!("L/a = 1e3, rel_tol 1e-6 converged; peak-relative L-inf = {worst:.3e}"))
}

fn double_slit_spacing() -> Verdict {
    let (l, lambda, d, a) = (4000.0, 0.1, 4.0, 0.1);
    let k = 2.0 * PI / lambda;
    let aperture = Aperture::double_slit(d, a, a).unwrap();
    let screen = Grid1D::from_range(-350.0, 350.0, 701).unwrap();
    let p = match far_field_profile(&aperture, &SourceSpec::plane_wave(0.0).unwrap(), k, &screen, l, &QuadratureSpec::default()) {
        Ok(p) => p,
        Err(e) => return verdict(false, format!("quadrature did not converge: {e}")),
    };
    let y = &p.intensity;
    let mut peaks = Vec::new();
    for i in 1..y.len() - 1 {
        if y[i] > y[i - 1] && y[i] >= y[i + 1] && y[i] > 0.05 {
            let denom = y[i - 1] - 2.0 * y[i] + y[i + 1];
            let shift = if denom != 0.0 { 0.5 * (y[i - 1] - y[i + 1]) / denom } else { 0.0 };
            peaks.push(p.x[i] + shift * (p.x[1] - p.x[0]));
        }
    }
    let expect = lambda * l / d;
    let worst = peaks.windows(2).map(|w| ((w[1] - w[0]) / expect - 1.0).abs()).fold(0.0, f64::max);
    verdict(
        peaks.len() >= 5 && worst < 0.02,
        format!("{} peaks; worst spacing deviation from lambda L/d = {expect} is {:.3}%", peaks.len(), 100.0 * worst),
    )
}

fn ensemble_norm() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let mut worst = 0.0f64;
    let mut worst_unit = 0.0f64;
    let mut idempotent = true;
    for _ in 0..10 {
        let me: f64 = rng.gen_range(0.1..10.0);
        let k1_target: f64 = rng.gen_range(0.2..5.0);
        let spec = EnsembleSpec::new(k1_target * k1_target, Potential::Constant(0.0), me).unwrap();
        let k1 = k_cutoff(&spec, Vec3::default());
        let analytic = 4.0 * PI * me / 3.0 * k1.powi(3);
        let reported = norm_constant_potential(&spec).unwrap();
        let numeric = radial_norm_oracle(&spec);
        worst = worst.max(((numeric - analytic) / analytic).abs()).max(((reported - analytic) / analytic).abs());
        let unit = renormalize(&spec).unwrap();
        worst_unit = worst_unit.max((radial_norm_oracle(&unit) - 1.0).abs());
        idempotent &= renormalize(&unit).unwrap() == unit;
    }
    verdict(
        worst < 1e-8 && worst_unit < 1e-8 && idempotent,
        format!("max rel dev {worst:.2e}; renormalized |norm - 1| = {worst_unit:.2e}; idempotent: {idempotent}"),
    )
}

fn sphere_transform() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let e: f64 = rng.gen_range(0.1..9.0);
        let me: f64 = rng.gen_range(0.2..4.0);
        let spec = EnsembleSpec::new(e, Potential::Constant(0.0), me).unwrap();
        let k1 = k_cutoff(&spec, Vec3::default());
        let x = 10f64.powf(rng.gen_range((1e-4f64).log10()..(50f64).log10()));
        let dir = loop {
            let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let n = v.norm();
            if n > 0.1 && n <= 1.0 {
                break v * (1.0 / n);
            }
        };
        let r = dir * (x / k1);
        let closed = ensemble_wavefunction(&spec, r);
        let oracle = sphere_transform_oracle(me.sqrt(), k1, r);
        worst = worst.max(((closed - oracle) / oracle).abs());
    }
    verdict(worst < 1e-6, format!("50 random pairs, k1 r in [1e-4, 50]; max rel dev {worst:.2e}"))
}

fn free_gaussian_endpoint() -> Verdict {
    let g = GaussianPacket::new(0.0, 1.0, 1.0, 1.0).unwrap();
    let t_end = 40.0;
    let sigma_t = (1.0 + (t_end / 2.0f64).powi(2)).sqrt();
    let mut worst = 0.0f64;
    for i in 0..20 {
        let x0 = -3.0 + 6.0 * i as f64 / 19.0;
        let tr = integrate_trajectory(&g, x0, (0.0, t_end), &TrajectoryOptions::default()).unwrap();
        let expect = x0 * sigma_t;
        worst = worst.max(((tr.end().x - expect) / expect).abs());
    }
    verdict(worst < 1e-6, format!("20 starts across +-3 sigma0, T = 40; max rel dev {worst:.2e}"))
}

fn hamilton_jacobi() -> Verdict {
    let s = TwoSlitState::new(TwoSlitSetup::default()).unwrap();
    let max_amp = s.amplitude_scale();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let mut points = Vec::new();
    while points.len() < 1000 {
        let x = rng.gen_range(-40.0..40.0);
        let t = rng.gen_range(0.0..40.0);
        if s.psi(x, t).norm() > 1e-6 * max_amp {
            points.push((x, t));
        }
    }
    let worst = points.iter().map(|&(x, t)| hamilton_jacobi_residual(&s, x, t).unwrap().abs()).fold(0.0, f64::max);
    let fd_worst = points
        .iter()
        .map(|&(x, t)| hamilton_jacobi_residual_fd(&s, x, t, 1e-3).map(f64::abs).unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    let hs = [0.04, 0.02, 0.01, 0.005];
    let mut orders: Vec<f64> = points
        .iter()
        .filter(|&&(x, t)| t > 0.2 && s.psi(x, t).norm() > 1e-2 * max_amp)
        .take(40)
        .map(|&(x, t)| {
            let errs: Vec<f64> = hs.iter().map(|&h| hamilton_jacobi_residual_fd(&s, x, t, h).unwrap().abs()).collect();
            fit_order(&hs, &errs)
        })
        .collect();
    orders.sort_by(f64::total_cmp);
    let median = orders[orders.len() / 2];
    verdict(
        worst < 1e-8 && fd_worst < 1e-4 && (1.8..=2.2).contains(&median),
        format!("analytic max {worst:.2e} at 1000 points; FD(h=1e-3) max {fd_worst:.2e}; FD median order {median:.3}"),
    )
}

fn gaussian_quantum_potential() -> Verdict {
    let mut worst = 0.0f64;
    let mut orders = Vec::new();
    for &(sigma0, hbar, mass) in &[(1.0, 1.0, 1.0), (0.7, 1.3, 2.0)] {
        let g = GaussianPacket::new(0.0, sigma0, hbar, mass).unwrap();
        let q = |x: f64| hbar * hbar / (4.0 * mass * sigma0 * sigma0) * (1.0 - x * x / (2.0 * sigma0 * sigma0));
        for i in 0..=32 {
            let x = (-4.0 + 0.25 * i as f64) * sigma0;
            let expect = q(x);
            if expect.abs() < 1e-3 {
                continue;
            }
            worst = worst.max(((quantum_potential(&g, x, 0.0).unwrap() - expect) / expect).abs());
        }
        let hs = [0.02, 0.01, 0.005];
        let errs: Vec<f64> = hs
            .iter()
            .map(|&h| {
                let n = (4.0 * sigma0 / h).round() as usize + 1;
                let grid = Grid1D::new(-2.0 * sigma0, h, n).unwrap();
                let fd = quantum_potential_fd(&g, &grid, 0.0).unwrap();
                fd.iter().enumerate().map(|(i, v)| (v.unwrap() - q(grid.node(i))).abs()).fold(0.0, f64::max)
            })
            .collect();
        orders.push(fit_order(&hs, &errs));
    }
    let ok_orders = orders.iter().all(|o| (1.8..=2.2).contains(o));
    verdict(worst < 1e-10 && ok_orders, format!("analytic max rel dev {worst:.2e}; FD orders {orders:.3?}"))
}

fn equivariance(accumulate_dir: &Path) -> Verdict {
    let setup = TwoSlitSetup::default();
    let t_end = setup.screen_time();
    let mut missing = Vec::new();
    for n in ["000100", "003000", "020000", "070000"] {
        if !accumulate_dir.join(format!("hits_{n}.csv")).exists() {
            missing.push(n);
        }
    }
    if !missing.is_empty() {
        return verdict(false, format!("missing checkpoints {missing:?}"));
    }
    let rows = parse_csv(&accumulate_dir.join("hits_070000.csv"));
    let cc = clenshaw_curtis(16);
    let mut tv = 0.0;
    let mut total = 0u64;
    for r in &rows {
        let (lo, hi): (f64, f64) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        let count: u64 = r[2].parse().unwrap();
        total += count;
        let p = CompositeRule::new(lo, hi, 2, &cc).integrate(|x| two_slit_density(x, t_end, setup.half_separation, setup.sigma0));
        tv += 0.5 * (count as f64 / 70000.0 - p).abs();
    }
    verdict(
        rows.len() == 200 && tv < 0.02,
        format!("{total} of 70000 hits in 200 bins; TV = {tv:.4}; checkpoints 100/3000/20000/70000 written"),
    )
}

fn trajectory_structure() -> Verdict {
    let s = TwoSlitState::new(TwoSlitSetup::default()).unwrap();
    let t_end = s.screen_time();
    let fan = trajectory_fan(&s, 61, Seeding::Quantile, t_end, &TrajectoryOptions::default()).unwrap();
    let tr: Vec<_> = fan.completed().collect();
    let crossings = if tr.len() == 61 { crossing_count(&tr) } else { usize::MAX };
    let central = tr[30].samples.iter().map(|p| p.x.abs()).fold(0.0, f64::max);

    let xg = Grid1D::new(-16.0, 0.0625, 513).unwrap();
    let tg = Grid1D::from_range(0.0, t_end, 81).unwrap();
    let field = quantum_potential_surface(&s, &xg, &tg);
    let symmetric = (0..tg.len()).all(|it| {
        let row = field.row(it);
        (0..row.len()).all(|i| row[i] == row[row.len() - 1 - i])
    });
    let row0 = field.row(0);
    let argmax = |range: std::ops::Range<usize>| {
        range.max_by(|&a, &b| row0[a].unwrap_or(f64::MIN).total_cmp(&row0[b].unwrap_or(f64::MIN))).unwrap()
    };
    let right = xg.node(argmax(257..513));
    let left = xg.node(argmax(0..256));
    let y = s.setup().half_separation;
    let located = (right - y).abs() <= xg.spacing() && (left + y).abs() <= xg.spacing();

    let mut kinked = 0;
    let mut off_axis = 0;
    for (i, t) in tr.iter().enumerate() {
        if i == 30 {
            continue;
        }
        off_axis += 1;
        if kink_diagnostic(&s, t, t_end, 0.1, 0.3).unwrap().has_kink() {
            kinked += 1;
        }
    }
    let kink_ok = kinked as f64 >= 0.9 * off_axis as f64;
    verdict(
        crossings == 0 && central <= 1e-6 && symmetric && located && kink_ok,
        format!(
            "(a) crossings {crossings}; (b) central max |x| {central:e}; (c) bitwise symmetric {symmetric}, \
             slit maxima at {left}, {right}; (d) late accel > early accel for {kinked}/{off_axis} off-axis"
        ),
    )
}

fn reproducibility(root: &Path) -> (Verdict, std::path::PathBuf) {
    let small_qtm = QtmConfig { x_count: 257, t_count: 41, trajectories: 15, samples: 101, ..Default::default() };
    let cases: Vec<(Scenario, ScenarioConfig)> = vec![
        (Scenario::Fraunhofer, ScenarioConfig::default()),
        (Scenario::Kirchhoff, ScenarioConfig::parse("[kirchhoff]\nscreen_count = 61\n").unwrap()),
        (Scenario::Ensemble, ScenarioConfig::default()),
        (Scenario::QtmPotential, ScenarioConfig { qtm: Some(small_qtm.clone()), ..Default::default() }),
        (Scenario::QtmTrajectories, ScenarioConfig { seed: 11, qtm: Some(small_qtm), ..Default::default() }),
        (Scenario::QtmAccumulate, ScenarioConfig { seed: 20240917, ..Default::default() }),
    ];
    let mut problems = Vec::new();
    let mut files = 0;
    for (scenario, cfg) in cases {
        let cfg = cfg.resolve(scenario).unwrap();
        let a = root.join(format!("{}-a", scenario.name()));
        let b = root.join(format!("{}-b", scenario.name()));
        let ra = run_scenario(&cfg, &a).unwrap();
        let rb = run_scenario(&cfg, &b).unwrap();
        for f in &ra.manifest.files {
            files += 1;
            if fs::read(a.join(&f.name)).unwrap() != fs::read(b.join(&f.name)).unwrap() {
                problems.push(format!("{}/{} differs", scenario.name(), f.name));
            }
        }
        if ra.manifest != rb.manifest {
            problems.push(format!("{} manifests differ", scenario.name()));
        }
        for dir in [&a, &b] {
            for bad in verify_manifest(dir).unwrap() {
                problems.push(format!("{}/{bad} fails its hash", scenario.name()));
            }
        }
    }
    (
        verdict(problems.is_empty(), format!("6 scenarios x 2 runs, {files} data files byte-identical, hashes verified; {problems:?}")),
        root.join("qtm-accumulate-a"),
    )
}

fn timed(f: impl FnOnce() -> Verdict) -> (Verdict, f64) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed().as_secs_f64())
}

fn main() -> ExitCode {
    let root = tempfile::tempdir().unwrap();
    let mut results = vec![
        ("phase-extinction law", timed(phase_extinction)),
        ("kirchhoff single slit vs sinc^2", timed(kirchhoff_single_slit)),
        ("double-slit fringe spacing", timed(double_slit_spacing)),
        ("ensemble norm and renormalization", timed(ensemble_norm)),
        ("k-sphere closed form vs 3-D quadrature", timed(sphere_transform)),
        ("free-Gaussian trajectory endpoint", timed(free_gaussian_endpoint)),
        ("quantum Hamilton-Jacobi residual", timed(hamilton_jacobi)),
        ("single-Gaussian quantum potential", timed(gaussian_quantum_potential)),
    ];
    let mut accumulate_dir = root.path().to_path_buf();
    let repro = timed(|| {
        let (v, dir) = reproducibility(root.path());
        accumulate_dir = dir;
        v
    });
    results.push(("equivariant screen hits", timed(|| equivariance(&accumulate_dir))));
    results.push(("trajectory structure", timed(trajectory_structure)));
    results.push(("reproducibility", repro));
    let mut all_pass = true;
    for (name, (v, secs)) in &results {
        all_pass &= v.pass;
        println!("{} {name}: {} ({secs:.1} s)", if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
