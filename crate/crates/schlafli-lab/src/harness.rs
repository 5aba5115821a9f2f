//! Batch verification suites and machine-readable reports.
//!
//! A suite runs a fixed list of checks on builtin fixtures and returns one
//! row per check: id, the identity being checked, lhs, rhs, residual,
//! tolerance, pass. Row order is fixed by check id, so reports are
//! deterministic for a fixed config and seed regardless of how many worker
//! threads execute the checks (capped by `SCHLAFLI_LAB_THREADS`). Wall time
//! is tracked in memory but never serialized: two runs with the same config
//! and seed produce byte-identical reports.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use nalgebra::{Vector2, Vector3};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laminations::{
    first_variation_integral, length_derivative, MetricDeformation, RationalLamination, RepPath,
};
use crate::minkowski::{loxodromic, HGeodesic, HPlane, MPoint};
use crate::numerics::integrate_gl;
use crate::polyhedra::{hull, PolyhedronFamily, DEFORMING_FAMILIES};
use crate::tol;
use crate::tubes::{
    convexity_margin, core_dual_volume_expansion, default_margin_probes, dual_volume_epsilon_limit,
    mean_curvature_integral, solid_torus_dual_volume, tube_volume, BentChain, DiffeoFamily,
    TubeBase, TubeSpec,
};
use crate::variation::{
    continuity_probe, dual_schlafli_check, monotonicity_check, normal_flow_integrand,
    schlafli_check, smooth_dual_variation_check, SmoothFamily,
};

pub const SUITE_NAMES: [&str; 7] =
    ["schlafli", "dual-schlafli", "tubes", "core-expansion", "lengths", "margins", "all"];

/// Suite configuration; the seed drives every randomized fixture.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Config {
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
    #[serde(default = "default_quad_tol")]
    pub quad_tol: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_fd_step() -> f64 {
    tol::DEFAULT_FD_STEP
}

fn default_quad_tol() -> f64 {
    tol::DEFAULT_QUAD_TOL
}

impl Default for Config {
    fn default() -> Self {
        Config { fd_step: default_fd_step(), quad_tol: default_quad_tol(), seed: 0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRow {
    pub id: String,
    /// The identity the row verifies, as a short formula label.
    pub anchor: String,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRow {
    /// Two-sided check: residual = |lhs − rhs|.
    fn symmetric(id: impl Into<String>, anchor: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let residual = (lhs - rhs).abs();
        CheckRow {
            id: id.into(),
            anchor: anchor.into(),
            lhs,
            rhs,
            residual,
            tolerance,
            pass: residual <= tolerance,
        }
    }

    /// One-sided check lhs ≤ rhs: residual = max(0, lhs − rhs).
    fn bounded(id: impl Into<String>, anchor: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let residual = (lhs - rhs).max(0.0);
        CheckRow {
            id: id.into(),
            anchor: anchor.into(),
            lhs,
            rhs,
            residual,
            tolerance,
            pass: residual <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub config: Config,
    pub rows: Vec<CheckRow>,
    /// Not serialized: wall time varies run to run while reports must be
    /// byte-identical for a fixed config and seed.
    #[serde(skip)]
    pub wall_time_s: f64,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failing_ids(&self) -> Vec<&str> {
        self.rows.iter().filter(|r| !r.pass).map(|r| r.id.as_str()).collect()
    }
}

/// Worker cap: SCHLAFLI_LAB_THREADS when set, otherwise up to 8 cores.
pub fn thread_cap() -> usize {
    std::env::var("SCHLAFLI_LAB_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(8)
        })
}

type Job = Box<dyn FnOnce() -> Result<Vec<CheckRow>> + Send>;

// Runs jobs on up to thread_cap() workers; output order matches input order.
fn run_jobs(jobs: Vec<Job>) -> Result<Vec<CheckRow>> {
    let n = jobs.len();
    let workers = thread_cap().min(n).max(1);
    let jobs: Vec<Mutex<Option<Job>>> = jobs.into_iter().map(|j| Mutex::new(Some(j))).collect();
    let results: Vec<Mutex<Option<Result<Vec<CheckRow>>>>> =
        (0..n).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k >= n {
                    break;
                }
                let job = jobs[k].lock().unwrap().take().unwrap();
                *results[k].lock().unwrap() = Some(job());
            });
        }
    });
    let mut rows = Vec::new();
    for cell in results {
        rows.extend(cell.into_inner().unwrap().unwrap()?);
    }
    Ok(rows)
}

/// Run a named verification suite on the builtin fixtures.
pub fn run_suite(name: &str, config: &Config) -> Result<SuiteReport> {
    let started = std::time::Instant::now();
    let mut rows = match name {
        "schlafli" => suite_schlafli(config)?,
        "dual-schlafli" => suite_dual_schlafli(config)?,
        "tubes" => suite_tubes(config)?,
        "core-expansion" => suite_core_expansion(config)?,
        "lengths" => suite_lengths(config)?,
        "margins" => suite_margins(config)?,
        "all" => {
            let mut all = Vec::new();
            for sub in &SUITE_NAMES[..6] {
                all.extend(run_suite(sub, config)?.rows);
            }
            all
        }
        other => return Err(Error::UnknownName(format!("suite {other}"))),
    };
    rows.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(SuiteReport {
        suite: name.to_string(),
        config: *config,
        rows,
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}

const ANCHOR_SCHLAFLI: &str = "dVol/dt = 1/2 sum l(e) dtheta(e)";
const ANCHOR_DUAL: &str = "dVol*/dt = -1/2 sum theta(e) dl(e)";
const ANCHOR_SMOOTH: &str = "dVol*/dt = 1/4 int <dI | H I - II> da";
const ANCHOR_FLOW: &str = "<dI | H I - II> = -4 f K_e";
const ANCHOR_WEDGE: &str = "wedge volume = theta l (cosh 2eps - 1)/4";
const ANCHOR_FLAT: &str = "flat volume = A (sinh 2eps/2 + eps)/2";
const ANCHOR_CONE: &str = "cone volume = Omega (sinh 2eps - 2eps)/4";
const ANCHOR_TORUS: &str = "Vol*(N_eps) = -pi l cosh^2(eps) (solid torus)";
const ANCHOR_EXPANSION: &str =
    "Vol*(N_eps) = Vol*0 - lmu/4 (cosh 2eps - 1) - pi/2 |chi| (sinh 2eps - 2eps)";
const ANCHOR_MEANCURV: &str = "int H da = -2 pi |chi| sinh 2eps - lmu cosh 2eps";
const ANCHOR_LIMIT: &str = "Vol*(N_eps P) -> Vol*(P) as eps -> 0";
const ANCHOR_MONOTONE: &str = "N inside N' implies Vol*(N) >= Vol*(N')";
const ANCHOR_CONTINUITY: &str = "Vol* is continuous in the Hausdorff topology";
const ANCHOR_LENGTH: &str = "dl/dt by traces matches finite differences";
const ANCHOR_FIRSTVAR: &str = "int gdot/(2g) dl0 = dl/dt";
const ANCHOR_MARGIN: &str = "II_t + tanh(eps) I_t <= D |t| I_t";

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn suite_schlafli(config: &Config) -> Result<Vec<CheckRow>> {
    let mut jobs: Vec<Job> = Vec::new();
    let (h, qt) = (config.fd_step, config.quad_tol);
    for name in DEFORMING_FAMILIES {
        for t in grid(-0.2, 0.2, 5) {
            let name = name.to_string();
            jobs.push(Box::new(move || {
                let fam = PolyhedronFamily::builtin(&name)?;
                let rep = schlafli_check(&fam, t, h, qt)?;
                Ok(vec![CheckRow::symmetric(
                    format!("schlafli/{}/t={t:+.2}", name.trim_start_matches("builtin:")),
                    ANCHOR_SCHLAFLI,
                    rep.lhs,
                    rep.rhs,
                    tol::VARIATION_RESIDUAL,
                )])
            }));
        }
    }
    for name in ["builtin:rigid-tetra-v1", "builtin:edge-twist-tetra-v1"] {
        let name = name.to_string();
        jobs.push(Box::new(move || {
            let fam = PolyhedronFamily::builtin(&name)?;
            let rep = schlafli_check(&fam, 0.05, 1e-4, 1e-12)?;
            Ok(vec![CheckRow::symmetric(
                format!("schlafli/{}/rigid", name.trim_start_matches("builtin:")),
                ANCHOR_SCHLAFLI,
                rep.lhs,
                rep.rhs,
                1e-8,
            )])
        }));
    }
    // Residual decays O(h²): the coarse-stencil residual shrinks ~4x under
    // halving. Pass when the ratio sits in [2, 8].
    jobs.push(Box::new(move || {
        let fam = PolyhedronFamily::builtin("builtin:stretch-tetra-v1")?;
        let r1 = schlafli_check(&fam, 0.1, 2e-2, 1e-12)?;
        let r2 = schlafli_check(&fam, 0.1, 1e-2, 1e-12)?;
        let ratio = r1.residual / r2.residual.max(1e-16);
        Ok(vec![CheckRow::symmetric(
            "schlafli/stretch-tetra-v1/h-scaling",
            "residual(2h)/residual(h) ~ 4 for an order-2 stencil",
            ratio,
            4.0,
            4.0,
        )])
    }));
    run_jobs(jobs)
}

fn suite_dual_schlafli(config: &Config) -> Result<Vec<CheckRow>> {
    let mut jobs: Vec<Job> = Vec::new();
    let (h, qt) = (config.fd_step, config.quad_tol);
    for name in DEFORMING_FAMILIES {
        for t in grid(-0.2, 0.2, 5) {
            let name = name.to_string();
            jobs.push(Box::new(move || {
                let fam = PolyhedronFamily::builtin(&name)?;
                let rep = dual_schlafli_check(&fam, t, h, qt)?;
                Ok(vec![CheckRow::symmetric(
                    format!("dual-schlafli/{}/t={t:+.2}", name.trim_start_matches("builtin:")),
                    ANCHOR_DUAL,
                    rep.lhs,
                    rep.rhs,
                    tol::VARIATION_RESIDUAL,
                )])
            }));
        }
    }
    // Stationary edge lengths force dVol*/dt ≈ 0 (twist about a fixed edge).
    jobs.push(Box::new(move || {
        let fam = PolyhedronFamily::builtin("builtin:edge-twist-tetra-v1")?;
        let rep = dual_schlafli_check(&fam, 0.1, 1e-4, 1e-12)?;
        Ok(vec![CheckRow::symmetric(
            "dual-schlafli/edge-twist-tetra-v1/angle-only",
            ANCHOR_DUAL,
            rep.lhs,
            0.0,
            tol::VARIATION_RESIDUAL,
        )])
    }));
    // Smooth differential formula on the model families.
    for r in [0.1, 0.5, 1.0, 1.5] {
        jobs.push(Box::new(move || {
            let fam = SmoothFamily::GeodesicSphere { r0: r, rate: 1.0 };
            let rep = smooth_dual_variation_check(&fam, 0.0)?;
            let closed = -4.0 * std::f64::consts::PI * r.cosh().powi(2);
            Ok(vec![
                CheckRow::symmetric(
                    format!("dual-schlafli/smooth/sphere-r={r:.2}/residual"),
                    ANCHOR_SMOOTH,
                    rep.lhs,
                    rep.rhs,
                    1e-7,
                ),
                CheckRow::symmetric(
                    format!("dual-schlafli/smooth/sphere-r={r:.2}/closed-form"),
                    "dVol*/dr = -4 pi cosh^2(r) (geodesic sphere)",
                    rep.rhs,
                    closed,
                    1e-7,
                ),
            ])
        }));
    }
    jobs.push(Box::new(move || {
        let fam = SmoothFamily::PlaneWindow { eps0: 0.4, rate: 1.0, half_width: 0.4 };
        let rep = smooth_dual_variation_check(&fam, 0.0)?;
        Ok(vec![CheckRow::symmetric(
            "dual-schlafli/smooth/plane-window",
            ANCHOR_SMOOTH,
            rep.lhs,
            rep.rhs,
            1e-8,
        )])
    }));
    jobs.push(Box::new(move || {
        let fam = SmoothFamily::LineTube { eps0: 0.5, rate: 1.0, length: 2.0 };
        let rep = smooth_dual_variation_check(&fam, 0.0)?;
        let closed = -2.0 * std::f64::consts::PI * 1.0f64.sinh(); // d/deps of -pi l cosh^2 at eps=0.5, l=2
        Ok(vec![
            CheckRow::symmetric(
                "dual-schlafli/smooth/line-tube/residual",
                ANCHOR_SMOOTH,
                rep.lhs,
                rep.rhs,
                1e-8,
            ),
            CheckRow::symmetric(
                "dual-schlafli/smooth/line-tube/closed-form",
                "d/deps Vol*(N_eps line) = -pi l sinh 2eps",
                rep.lhs,
                closed,
                1e-8,
            ),
        ])
    }));
    jobs.push(Box::new(move || {
        let fam = SmoothFamily::GeodesicSphere { r0: 0.7, rate: 0.0 };
        let rep = smooth_dual_variation_check(&fam, 0.0)?;
        Ok(vec![CheckRow::symmetric(
            "dual-schlafli/smooth/frozen",
            "frozen family: both sides vanish",
            rep.lhs.abs() + rep.rhs.abs(),
            0.0,
            1e-9,
        )])
    }));
    // Normal-flow integrand: tensor contraction vs −4 f K_e.
    jobs.push(Box::new(move || {
        let mut rows = Vec::new();
        let sphere = SmoothFamily::GeodesicSphere { r0: 0.8, rate: 1.0 };
        let v = normal_flow_integrand(&sphere, 0.0, Vector2::new(1.1, 0.3), 1.0)?;
        rows.push(CheckRow::symmetric(
            "dual-schlafli/flow-integrand/sphere",
            ANCHOR_FLOW,
            v,
            -4.0 / 0.8f64.tanh().powi(2),
            1e-9,
        ));
        let window = SmoothFamily::PlaneWindow { eps0: 0.6, rate: 1.0, half_width: 0.4 };
        let v = normal_flow_integrand(&window, 0.0, Vector2::new(0.1, -0.2), 1.0)?;
        rows.push(CheckRow::symmetric(
            "dual-schlafli/flow-integrand/plane",
            ANCHOR_FLOW,
            v,
            -4.0 * 0.6f64.tanh().powi(2),
            1e-9,
        ));
        let v = normal_flow_integrand(&window, 0.0, Vector2::new(0.1, -0.2), 0.0)?;
        rows.push(CheckRow::symmetric(
            "dual-schlafli/flow-integrand/zero-speed",
            ANCHOR_FLOW,
            v,
            0.0,
            1e-15,
        ));
        Ok(rows)
    }));
    run_jobs(jobs)
}

fn suite_tubes(_config: &Config) -> Result<Vec<CheckRow>> {
    let mut jobs: Vec<Job> = Vec::new();
    // Wedge closed form vs 3D quadrature of cosh t sinh t on a 5×5 grid.
    for theta in grid(0.4, 2.4, 5) {
        for eps in grid(0.05, 1.0, 5) {
            jobs.push(Box::new(move || {
                let l = 2.0;
                let spec = TubeSpec::new(TubeBase::Wedge { length: l, angle: theta }, eps)?;
                let closed = tube_volume(&spec);
                let quad = integrate_gl(
                    |t: f64| {
                        integrate_gl(
                            |_th| integrate_gl(|_s| t.cosh() * t.sinh(), 0.0, l, 8, 1),
                            0.0,
                            theta,
                            8,
                            1,
                        )
                    },
                    0.0,
                    eps,
                    16,
                    1,
                );
                Ok(vec![CheckRow::symmetric(
                    format!("tubes/wedge/theta={theta:.2}/eps={eps:.4}"),
                    ANCHOR_WEDGE,
                    closed,
                    quad,
                    1e-7,
                )])
            }));
        }
    }
    // Flat pieces vs 1D quadrature of cosh² on the same ε grid.
    for eps in grid(0.05, 1.0, 5) {
        jobs.push(Box::new(move || {
            let area = 1.7;
            let spec = TubeSpec::new(TubeBase::FlatPatch { area }, eps)?;
            let quad = area * integrate_gl(|t: f64| t.cosh().powi(2), 0.0, eps, 16, 1);
            Ok(vec![CheckRow::symmetric(
                format!("tubes/flat/eps={eps:.4}"),
                ANCHOR_FLAT,
                tube_volume(&spec),
                quad,
                1e-8,
            )])
        }));
    }
    jobs.push(Box::new(move || {
        let eps = 0.75;
        let spec =
            TubeSpec::new(TubeBase::VertexCone { solid_angle: 4.0 * std::f64::consts::PI }, eps)?;
        let ball = std::f64::consts::PI * ((2.0 * eps).sinh() - 2.0 * eps);
        Ok(vec![CheckRow::symmetric(
            "tubes/vertex-cone/full-solid-angle",
            ANCHOR_CONE,
            tube_volume(&spec),
            ball,
            1e-12,
        )])
    }));
    // ε = 0 degenerate grid: all bases give zero.
    jobs.push(Box::new(move || {
        let total: f64 = [
            TubeBase::FlatPatch { area: 2.0 },
            TubeBase::Wedge { length: 1.0, angle: 1.0 },
            TubeBase::VertexCone { solid_angle: 2.0 },
            TubeBase::SolidTorusCore { length: 1.5, weight: 2.0 * std::f64::consts::PI },
        ]
        .into_iter()
        .map(|base| tube_volume(&TubeSpec::new(base, 0.0).unwrap()))
        .sum();
        Ok(vec![CheckRow::symmetric(
            "tubes/zero-eps",
            "every tube volume vanishes at eps = 0",
            total,
            0.0,
            0.0,
        )])
    }));
    // Chain window: assembly equals the sum of its closed-form pieces, the
    // mean-curvature integral matches the piece areas, and the ε-surface
    // stays convex.
    jobs.push(Box::new(move || {
        let chain = BentChain::unfolded(&[(0.0, 0.5), (0.3, 0.35)], (-0.5, 0.8), 1.0)?;
        let eps = 0.4;
        let area: f64 = chain.face_patch_areas().iter().sum();
        let bending = chain.window_bending_length();
        let expect_ih = -area * (2.0f64 * eps).sinh() - bending * (2.0f64 * eps).cosh();
        let mut rows = vec![CheckRow::symmetric(
            "tubes/chain/mean-curvature",
            ANCHOR_MEANCURV,
            chain.mean_curvature_integral(eps),
            expect_ih,
            1e-7,
        )];
        let worst = chain
            .surface_forms(eps, 5)?
            .iter()
            .map(|f| f.principal_curvatures().1)
            .fold(f64::NEG_INFINITY, f64::max);
        rows.push(CheckRow::bounded(
            "tubes/chain/convexity",
            "II of the eps-surface is negative semi-definite",
            worst,
            0.0,
            1e-9,
        ));
        Ok(rows)
    }));
    jobs.push(Box::new(move || {
        let l = 2.0;
        let eps = 0.45;
        let spec = TubeSpec::solid_torus(l, eps)?;
        let closed = mean_curvature_integral(0, 2.0 * std::f64::consts::PI * l, eps)?;
        let forms = crate::tubes::line_tube_forms(eps, 0.0, 0.0)?;
        let quad = forms.h * forms.i.determinant().sqrt() * 2.0 * std::f64::consts::PI * l;
        Ok(vec![
            CheckRow::symmetric(
                "tubes/torus/mean-curvature-quadrature",
                ANCHOR_MEANCURV,
                closed,
                quad,
                1e-8,
            ),
            CheckRow::symmetric(
                "tubes/torus/volume",
                "Vol(N_eps line) = pi l sinh^2(eps)",
                tube_volume(&spec),
                std::f64::consts::PI * l * eps.sinh().powi(2),
                1e-12,
            ),
        ])
    }));
    run_jobs(jobs)
}

fn suite_core_expansion(config: &Config) -> Result<Vec<CheckRow>> {
    let mut jobs: Vec<Job> = Vec::new();
    // Solid torus: the one end-to-end instance with closed forms both sides.
    for l in [1.0, 2.0] {
        for eps in grid(0.1, 1.0, 10) {
            jobs.push(Box::new(move || {
                let direct = -std::f64::consts::PI * l * eps.cosh().powi(2);
                let leibniz = solid_torus_dual_volume(l, eps)?;
                let expansion = core_dual_volume_expansion(
                    -std::f64::consts::PI * l,
                    2.0 * std::f64::consts::PI * l,
                    0,
                    eps,
                );
                Ok(vec![
                    CheckRow::symmetric(
                        format!("core-expansion/torus-l={l:.0}/eps={eps:.1}/assembly"),
                        ANCHOR_TORUS,
                        leibniz,
                        direct,
                        1e-9,
                    ),
                    CheckRow::symmetric(
                        format!("core-expansion/torus-l={l:.0}/eps={eps:.1}/expansion"),
                        ANCHOR_EXPANSION,
                        expansion,
                        direct,
                        1e-9,
                    ),
                ])
            }));
        }
    }
    // ε → 0 limit of the polyhedral assembly, one halving ladder per ε₀.
    let qt = config.quad_tol;
    for eps0 in [0.02, 0.01, 0.005] {
        jobs.push(Box::new(move || {
            let p = hull(&crate::polyhedra::base_tetra())?;
            let dual = p.dual_volume(qt.min(1e-11))?;
            let lim = dual_volume_epsilon_limit(&p, qt.min(1e-11), eps0, 5)?;
            Ok(vec![CheckRow::symmetric(
                format!("core-expansion/eps-limit/eps0={eps0}"),
                ANCHOR_LIMIT,
                lim,
                dual,
                1e-7,
            )])
        }));
    }
    // Monotonicity fuzz: 100 seeded nested pairs.
    let seed = config.seed;
    jobs.push(Box::new(move || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = f64::INFINITY;
        let mut checked = 0usize;
        while checked < 100 {
            let outer_pts: Vec<MPoint> = (0..8)
                .map(|_| {
                    MPoint::from_klein(Vector3::new(
                        rng.gen_range(-0.55..0.55),
                        rng.gen_range(-0.55..0.55),
                        rng.gen_range(-0.55..0.55),
                    ))
                    .unwrap()
                })
                .collect();
            let outer = match hull(&outer_pts) {
                Ok(p) => p,
                Err(_) => continue,
            };
            let inner_pts: Vec<MPoint> = (0..6)
                .map(|_| {
                    let mut w: Vec<f64> =
                        (0..outer.vertices().len()).map(|_| rng.gen_range(0.0..1.0)).collect();
                    let s: f64 = w.iter().sum();
                    w.iter_mut().for_each(|x| *x /= s);
                    let y = outer
                        .vertices()
                        .iter()
                        .zip(&w)
                        .map(|(v, &wi)| wi * v.klein())
                        .sum::<Vector3<f64>>();
                    MPoint::from_klein(y).unwrap()
                })
                .collect();
            let inner = match hull(&inner_pts) {
                Ok(p) => p,
                Err(_) => continue,
            };
            let rep = monotonicity_check(&inner, &outer, 1e-10)?;
            if !rep.contained {
                return Err(Error::bad_input("fuzz generated a non-nested pair"));
            }
            worst = worst.min(rep.margin.unwrap());
            checked += 1;
        }
        Ok(vec![CheckRow::bounded(
            "core-expansion/monotonicity/fuzz-100",
            ANCHOR_MONOTONE,
            -worst,
            0.0,
            tol::MONOTONICITY_SLACK,
        )])
    }));
    // Continuity probe: modulus shrinks with δ; isometric motion is silent.
    let seed2 = config.seed;
    jobs.push(Box::new(move || {
        let p = hull(&crate::polyhedra::base_tetra())?;
        let m1 = continuity_probe(&p, 1e-3, seed2, 1e-11)?;
        let m2 = continuity_probe(&p, 5e-4, seed2, 1e-11)?;
        let mut rows = vec![CheckRow::bounded(
            "core-expansion/continuity/halving",
            ANCHOR_CONTINUITY,
            m2,
            0.75 * m1,
            0.0,
        )];
        let axis = HGeodesic::through(
            &MPoint::origin(),
            &MPoint::from_klein(Vector3::new(0.2, 0.1, -0.1)).unwrap(),
        )?;
        let iso = loxodromic(&axis, 1e-3, 2e-3)?;
        let moved = p.apply(&iso)?;
        rows.push(CheckRow::symmetric(
            "core-expansion/continuity/isometric-motion",
            ANCHOR_CONTINUITY,
            moved.dual_volume(1e-11)?,
            p.dual_volume(1e-11)?,
            1e-9,
        ));
        Ok(rows)
    }));
    run_jobs(jobs)
}

fn suite_lengths(config: &Config) -> Result<Vec<CheckRow>> {
    let mut jobs: Vec<Job> = Vec::new();
    let h = config.fd_step;
    let lamination_for = |path: &str| -> RationalLamination {
        match path {
            "builtin:bend-two-gen-v1" => RationalLamination::new(vec![
                ("ab".into(), 1.0),
                ("aB".into(), 0.5),
                ("aabb".into(), 0.25),
            ])
            .unwrap(),
            _ => RationalLamination::new(vec![("a".into(), 1.0)]).unwrap(),
        }
    };
    for name in RepPath::names() {
        for t in grid(-0.25, 0.25, 5) {
            let name = name.to_string();
            let lam = lamination_for(&name);
            jobs.push(Box::new(move || {
                let path = RepPath::builtin(&name)?;
                let d = length_derivative(&path, &lam, t, h)?;
                Ok(vec![CheckRow::symmetric(
                    format!("lengths/{}/t={t:+.3}", name.trim_start_matches("builtin:")),
                    ANCHOR_LENGTH,
                    d.fd,
                    d.analytic,
                    tol::VARIATION_RESIDUAL,
                )])
            }));
        }
    }
    jobs.push(Box::new(move || {
        let lam = RationalLamination::new(vec![("a".into(), 1.0)]).unwrap();
        let d = length_derivative(&RepPath::LoxStretch, &lam, 0.0, 1e-4)?;
        Ok(vec![CheckRow::symmetric(
            "lengths/lox-stretch-v1/derivative-value",
            "l(t) = 2(1+t) gives dl/dt = 2",
            d.fd,
            2.0,
            1e-8,
        )])
    }));
    jobs.push(Box::new(move || {
        let d = MetricDeformation::builtin("builtin:warped-torus-v1")?;
        let got = first_variation_integral(&d)?;
        let (lo, hi) = d.curve_domain();
        Ok(vec![
            CheckRow::symmetric(
                "lengths/warped-torus/first-variation",
                ANCHOR_FIRSTVAR,
                got,
                hi - lo,
                1e-9,
            ),
            CheckRow::bounded(
                "lengths/warped-torus/geodesic-residual",
                "gamma0 satisfies the g0 geodesic equation",
                d.geodesic_residual(),
                0.0,
                1e-8,
            ),
        ])
    }));
    jobs.push(Box::new(move || {
        let d = MetricDeformation::builtin("builtin:conformal-sin-v1")?;
        let got = first_variation_integral(&d)?;
        Ok(vec![CheckRow::symmetric(
            "lengths/conformal-sin/first-variation",
            "conformal gdot = 2u g0 integrates u along the curve",
            got,
            1.0 - 2.0f64.cos(),
            1e-9,
        )])
    }));
    jobs.push(Box::new(move || {
        let d = MetricDeformation::builtin("builtin:frozen-v1")?;
        Ok(vec![CheckRow::symmetric(
            "lengths/frozen/first-variation",
            ANCHOR_FIRSTVAR,
            first_variation_integral(&d)?,
            0.0,
            1e-15,
        )])
    }));
    run_jobs(jobs)
}

fn suite_margins(_config: &Config) -> Result<Vec<CheckRow>> {
    let mut jobs: Vec<Job> = Vec::new();
    let plane = || HPlane::new(nalgebra::Vector4::new(0.0, 0.0, 0.0, 1.0)).unwrap();
    jobs.push(Box::new(move || {
        let probes = default_margin_probes();
        let fam = DiffeoFamily::builtin("builtin:identity-v1")?;
        let m = convexity_margin(&fam, &plane(), 0.4, 0.3, &probes)?;
        Ok(vec![CheckRow::bounded(
            "margins/identity",
            ANCHOR_MARGIN,
            m.abs(),
            0.0,
            1e-9,
        )])
    }));
    jobs.push(Box::new(move || {
        let probes = default_margin_probes();
        let fam = DiffeoFamily::builtin("builtin:isometry-path-v1")?;
        let m = convexity_margin(&fam, &plane(), 0.4, 0.2, &probes)?;
        Ok(vec![CheckRow::bounded(
            "margins/isometry-path",
            ANCHOR_MARGIN,
            m.abs(),
            0.0,
            1e-8,
        )])
    }));
    jobs.push(Box::new(move || {
        let probes = default_margin_probes();
        let fam = DiffeoFamily::builtin("builtin:dilation-v1")?;
        let eps = 0.3;
        let m0 = convexity_margin(&fam, &plane(), eps, 0.0, &probes)?;
        let mut rows = vec![CheckRow::bounded(
            "margins/dilation/t=0",
            ANCHOR_MARGIN,
            m0.abs(),
            0.0,
            1e-9,
        )];
        let ts = [-0.02, -0.01, -0.005, 0.005, 0.01, 0.02];
        let mut margins = Vec::new();
        for &t in &ts {
            margins.push(convexity_margin(&fam, &plane(), eps, t, &probes)?);
        }
        let d = ts.iter().zip(&margins).map(|(t, m)| m / t.abs()).fold(0.0f64, f64::max);
        rows.push(CheckRow::bounded(
            "margins/dilation/fitted-slope",
            "a single fitted D bounds margin(t)/|t|",
            d,
            0.0,
            50.0,
        ));
        for (t, m) in ts.iter().zip(&margins) {
            rows.push(CheckRow::bounded(
                format!("margins/dilation/t={t:+.3}"),
                ANCHOR_MARGIN,
                *m,
                d * t.abs(),
                1e-12,
            ));
        }
        Ok(rows)
    }));
    run_jobs(jobs)
}

// ---------------------------------------------------------------------------
// Report emission
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::UnknownName(format!("format {other}"))),
        }
    }
}

/// 17 significant digits: enough to round-trip any f64 bit-exactly.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_f64(x: f64) -> String {
    format_float(x)
}

/// Serialize a report with stable field order and 17-significant-digit
/// floats. CSV columns: suite,check,anchor,lhs,rhs,residual,tolerance,pass.
pub fn emit(report: &SuiteReport, format: Format) -> String {
    match format {
        Format::Json => {
            let mut out = String::new();
            out.push_str("{\n");
            out.push_str(&format!("  \"suite\": {},\n", json_str(&report.suite)));
            out.push_str(&format!(
                "  \"config\": {{\"fd_step\": {}, \"quad_tol\": {}, \"seed\": {}}},\n",
                fmt_f64(report.config.fd_step),
                fmt_f64(report.config.quad_tol),
                report.config.seed
            ));
            out.push_str("  \"rows\": [\n");
            for (k, raw) in report.rows.iter().enumerate() {
                out.push_str(&format!(
                    "    {{\"id\": {}, \"anchor\": {}, \"lhs\": {}, \"rhs\": {}, \"residual\": {}, \"tolerance\": {}, \"pass\": {}}}{}\n",
                    json_str(&raw.id),
                    json_str(&raw.anchor),
                    fmt_f64(raw.lhs),
                    fmt_f64(raw.rhs),
                    fmt_f64(raw.residual),
                    fmt_f64(raw.tolerance),
                    raw.pass,
                    if k + 1 < report.rows.len() { "," } else { "" }
                ));
            }
            out.push_str("  ]\n}\n");
            out
        }
        Format::Csv => {
            let mut out = String::from("suite,check,anchor,lhs,rhs,residual,tolerance,pass\n");
            for r in &report.rows {
                debug_assert!(!r.id.contains(',') && !r.anchor.contains(','));
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    report.suite,
                    r.id,
                    r.anchor,
                    fmt_f64(r.lhs),
                    fmt_f64(r.rhs),
                    fmt_f64(r.residual),
                    fmt_f64(r.tolerance),
                    r.pass
                ));
            }
            out
        }
    }
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("string encodes")
}

/// Parse a JSON report produced by `emit`.
pub fn parse_json(s: &str) -> Result<SuiteReport> {
    let v: serde_json::Value = serde_json::from_str(s)?;
    let suite = v
        .get("suite")
        .and_then(|x| x.as_str())
        .ok_or_else(|| Error::bad_input_at("/suite", "missing"))?
        .to_string();
    let config: Config = match v.get("config") {
        Some(c) => serde_json::from_value(c.clone())?,
        None => Config::default(),
    };
    let rows = v
        .get("rows")
        .and_then(|x| x.as_array())
        .ok_or_else(|| Error::bad_input_at("/rows", "missing"))?
        .iter()
        .enumerate()
        .map(|(k, r)| {
            serde_json::from_value::<CheckRow>(r.clone())
                .map_err(|e| Error::bad_input_at(format!("/rows/{k}"), e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SuiteReport { suite, config, rows, wall_time_s: 0.0 })
}

/// Parse a CSV report produced by `emit` (config is not carried by CSV).
pub fn parse_csv(s: &str) -> Result<SuiteReport> {
    let mut lines = s.lines();
    let header = lines.next().ok_or_else(|| Error::bad_input("empty csv"))?;
    if header != "suite,check,anchor,lhs,rhs,residual,tolerance,pass" {
        return Err(Error::bad_input_at("/0", format!("unexpected header {header:?}")));
    }
    let mut suite = String::new();
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 8 {
            return Err(Error::bad_input_at(
                format!("/{}", k + 1),
                format!("expected 8 columns, got {}", parts.len()),
            ));
        }
        suite = parts[0].to_string();
        let f = |i: usize| -> Result<f64> {
            parts[i]
                .parse::<f64>()
                .map_err(|e| Error::bad_input_at(format!("/{}/{}", k + 1, i), e.to_string()))
        };
        rows.push(CheckRow {
            id: parts[1].to_string(),
            anchor: parts[2].to_string(),
            lhs: f(3)?,
            rhs: f(4)?,
            residual: f(5)?,
            tolerance: f(6)?,
            pass: parts[7] == "true",
        });
    }
    Ok(SuiteReport { suite, config: Config::default(), rows, wall_time_s: 0.0 })
}
