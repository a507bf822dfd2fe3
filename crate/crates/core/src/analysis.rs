//! Numerical certification of the analytic ingredients (profile, core
//! inequality, closed-form integrals), reference constants, and the
//! convergence sweep harness.

use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use crate::error::Result;
use crate::filling::{build_filling, predict_density, Params};
use crate::simplicial::validate_disk;
use crate::verify::{drift_audit, uniform_estimates, verify_filling};

/// `q(t) = sqrt(1 - 4t)`, clamped to 0 past `t = 1/4`.
pub fn profile_q(t: f64) -> f64 {
    (1.0 - 4.0 * t).max(0.0).sqrt()
}

/// `I(t) = int_0^t du / q(u) = (1 - q(t)) / 2`.
pub fn drift_integral(t: f64) -> f64 {
    (1.0 - profile_q(t)) / 2.0
}

/// `t_eta = (1 - eta^2) / 4`.
pub fn stopping_time(eta: f64) -> f64 {
    (1.0 - eta * eta) / 4.0
}

/// The profile functions for one stopping scale.
#[derive(Clone, Copy, Debug)]
pub struct Profile {
    pub eta: f64,
}

impl Profile {
    pub fn q(&self, t: f64) -> f64 {
        profile_q(t)
    }

    pub fn drift_integral(&self, t: f64) -> f64 {
        drift_integral(t)
    }

    pub fn stopping_time(&self) -> f64 {
        stopping_time(self.eta)
    }
}

/// Normalised slack `2t + q(t) (s - I(t))_+ - s`.
pub fn core_slack(t: f64, s: f64) -> f64 {
    let q = profile_q(t);
    2.0 * t + q * (s - drift_integral(t)).max(0.0) - s
}

#[derive(Clone, Debug, Serialize)]
pub struct CoreInequalityReport {
    pub eta: f64,
    pub grid_t: usize,
    pub grid_s: usize,
    pub min_slack: f64,
    pub min_at: (f64, f64),
    /// `max |slack(t, 1/2)|` over the `t` grid.
    pub max_abs_slack_at_half: f64,
    pub tolerance: f64,
}

impl CoreInequalityReport {
    pub fn passes(&self) -> bool {
        self.min_slack >= -self.tolerance && self.max_abs_slack_at_half <= self.tolerance
    }
}

/// Float rounding allowance for the slack; exact arithmetic would give 0.
pub const CORE_SLACK_TOLERANCE: f64 = 1e-12;

/// Evaluates the core inequality on a `grid_t x grid_s` grid over
/// `t in [0, t_eta]`, `s in [0, 1/2]`.
pub fn check_core_inequality(grid_t: usize, grid_s: usize, eta: f64) -> CoreInequalityReport {
    let grid_t = grid_t.max(2);
    let grid_s = grid_s.max(2);
    let t_max = stopping_time(eta);
    let mut min_slack = f64::INFINITY;
    let mut min_at = (0.0, 0.0);
    let mut at_half: f64 = 0.0;
    for i in 0..grid_t {
        let t = t_max * i as f64 / (grid_t - 1) as f64;
        for j in 0..grid_s {
            let s = 0.5 * j as f64 / (grid_s - 1) as f64;
            let slack = core_slack(t, s);
            if slack < min_slack {
                min_slack = slack;
                min_at = (t, s);
            }
        }
        at_half = at_half.max(core_slack(t, 0.5).abs());
    }
    CoreInequalityReport {
        eta,
        grid_t,
        grid_s,
        min_slack,
        min_at,
        max_abs_slack_at_half: at_half,
        tolerance: CORE_SLACK_TOLERANCE,
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ProfileIntegral {
    pub eta: f64,
    /// `(1 - eta^3) / 6`.
    pub closed_form: f64,
    pub quadrature: f64,
    pub error_estimate: f64,
}

impl ProfileIntegral {
    pub fn discrepancy(&self) -> f64 {
        (self.closed_form - self.quadrature).abs()
    }

    pub fn agrees_within(&self, tol: f64) -> bool {
        self.discrepancy() <= tol
    }
}

/// `int_0^{t_eta} q(t) dt` in closed form and by adaptive quadrature.
pub fn profile_integral(eta: f64) -> ProfileIntegral {
    let closed_form = (1.0 - eta * eta * eta) / 6.0;
    let out = quadrature::double_exponential::integrate(profile_q, 0.0, stopping_time(eta), 1e-14);
    ProfileIntegral {
        eta,
        closed_form,
        quadrature: out.integral,
        error_estimate: out.error_estimate,
    }
}

/// `I(t)` by quadrature of `1/q`, for comparison with the closed form.
pub fn drift_integral_quadrature(t: f64) -> f64 {
    quadrature::double_exponential::integrate(|u| 1.0 / profile_q(u), 0.0, t, 1e-13).integral
}

/// Minimum vertex count of any `delta`-Lipschitz filling of `C_n`:
/// `delta^3 / 8 (n-1)^2 + (n-1) / 2`.
pub fn lower_bound(n: u32, delta: f64) -> f64 {
    let m = n as f64 - 1.0;
    delta.powi(3) / 8.0 * m * m + m / 2.0
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Constants {
    pub lower: f64,
    pub annular: f64,
    pub hemisphere: f64,
    pub gap: f64,
}

impl Constants {
    /// `1/8 <= 1/6 < 1/(pi sqrt 3)`.
    pub fn ordering_holds(&self) -> bool {
        self.lower <= self.annular && self.annular < self.hemisphere
    }
}

pub fn constants_report() -> Constants {
    let hemisphere = 1.0 / (std::f64::consts::PI * 3f64.sqrt());
    let annular = 1.0 / 6.0;
    Constants { lower: 0.125, annular, hemisphere, gap: hemisphere - annular }
}

/// One row of the convergence table.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub n: u32,
    pub rho: f64,
    pub eta: f64,
    pub vertices: u64,
    pub density: f64,
    pub delta: Option<f64>,
    pub is_isometric: Option<bool>,
    pub eps_n: f64,
    pub build_ms: f64,
    pub verify_ms: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub n: u32,
    pub row: std::result::Result<SweepRow, String>,
}

#[derive(Clone, Copy, Debug)]
pub struct SweepConfig {
    /// Run all-pairs BFS verification for rows with `n` up to this value.
    pub verify_up_to: u32,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { verify_up_to: u32::MAX }
    }
}

fn sweep_one(n: u32, rho: &str, eta: &str, cfg: SweepConfig) -> std::result::Result<SweepRow, String> {
    let p = Params::parse(n, rho, eta).map_err(|e| e.to_string())?;
    let started = Instant::now();
    let built = build_filling(&p).map_err(|e| e.to_string())?;
    let build_ms = started.elapsed().as_secs_f64() * 1e3;

    let report = validate_disk(&built.complex);
    if !report.is_valid() {
        return Err(format!("not a disk: {}", report.defects[0]));
    }
    if built.predicted_vertex_count != built.vertex_count() as u64 {
        return Err("vertex count disagrees with the schedule".into());
    }
    drift_audit(&built).map_err(|e| e.to_string())?;
    let vertices = built.vertex_count() as u64;
    if (vertices as f64) < lower_bound(n, 1.0) {
        return Err(format!("{vertices} vertices is below the isometric lower bound"));
    }
    let (delta, is_isometric, verify_ms) = if n <= cfg.verify_up_to {
        let started = Instant::now();
        let v = verify_filling(&built.complex).map_err(|e| e.to_string())?;
        (Some(v.delta.to_f64()), Some(v.is_isometric), Some(started.elapsed().as_secs_f64() * 1e3))
    } else {
        (None, None, None)
    };
    let eps = uniform_estimates(&built);
    Ok(SweepRow {
        n,
        rho: p.rho_f64(),
        eta: p.eta_f64(),
        vertices,
        density: built.density(),
        delta,
        is_isometric,
        eps_n: eps.eps_n,
        build_ms,
        verify_ms,
    })
}

/// Builds, validates, audits and (optionally) verifies one filling per `n`.
/// Rows are independent; a failing row is recorded and the sweep continues.
pub fn run_sweep(n_list: &[u32], rho: &str, eta: &str, cfg: SweepConfig) -> Vec<SweepOutcome> {
    n_list
        .iter()
        .map(|&n| SweepOutcome { n, row: sweep_one(n, rho, eta, cfg) })
        .collect()
}

pub const SWEEP_COLUMNS: [&str; 10] =
    ["n", "rho", "eta", "vertices", "density", "delta", "is_isometric", "eps_n", "build_ms", "verify_ms"];

/// Writes successful rows as CSV with the fixed column order.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_COLUMNS)?;
    for r in rows {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        w.write_record([
            r.n.to_string(),
            r.rho.to_string(),
            r.eta.to_string(),
            r.vertices.to_string(),
            r.density.to_string(),
            opt(r.delta),
            r.is_isometric.map(|b| b.to_string()).unwrap_or_default(),
            r.eps_n.to_string(),
            r.build_ms.to_string(),
            opt(r.verify_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Density of `K_n` next to its asymptotic bound `rho + (1 - eta^3)/6`.
pub fn density_gap(p: &Params) -> Option<(f64, f64)> {
    let pred = predict_density(p);
    pred.finite_density(p.n).map(|d| (d, pred.bound_f64()))
}
