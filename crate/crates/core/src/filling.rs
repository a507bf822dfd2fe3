//! The concentric annular filling `K_n`: a protective collar of equal-length
//! annuli, a main region following the profile `q(t) = sqrt(1 - 4t)` in `B`
//! steps, and a cone cap.
//!
//! Every schedule quantity is computed in exact rational arithmetic.
//! `M_b = ceil(n q(t_b))` is the least integer whose square is at least the
//! rational `n^2 (1 - 4 t_b)`.

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::annulus::{AnnulusKind, ComplexBuilder, LayerLedger};
use crate::error::{Result, ScheduleError};
use crate::exact::{self, ceil_sqrt_rational, format_rational, int};
use crate::simplicial::{Triangulation, VertexId};

/// Construction parameters `(n, rho, eta)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    pub n: u32,
    #[serde(with = "exact::serde_ratio")]
    pub rho: BigRational,
    #[serde(with = "exact::serde_ratio")]
    pub eta: BigRational,
}

impl Params {
    pub fn new(n: u32, rho: BigRational, eta: BigRational) -> Self {
        Params { n, rho, eta }
    }

    /// Parses `rho` and `eta` from decimal or fraction literals, exactly.
    pub fn parse(n: u32, rho: &str, eta: &str) -> Result<Self> {
        Ok(Params { n, rho: exact::parse_rational(rho)?, eta: exact::parse_rational(eta)? })
    }

    /// Interprets each float as the decimal it prints as (`0.1` is `1/10`).
    pub fn from_f64(n: u32, rho: f64, eta: f64) -> Result<Self> {
        Ok(Params { n, rho: exact::rational_from_f64(rho)?, eta: exact::rational_from_f64(eta)? })
    }

    pub fn rho_f64(&self) -> f64 {
        exact::to_f64(&self.rho)
    }

    pub fn eta_f64(&self) -> f64 {
        exact::to_f64(&self.eta)
    }

    /// `t_eta = (1 - eta^2) / 4`, where `q(t_eta) = eta`.
    pub fn stopping_time(&self) -> BigRational {
        (int(1) - &self.eta * &self.eta) / int(4)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub n: u32,
    /// Collar width `w = ceil(rho n)`.
    pub collar: u32,
    /// Number of blocks `B = ceil(sqrt n)`.
    pub blocks: u32,
    #[serde(with = "exact::serde_ratio")]
    pub stopping_time: BigRational,
    /// Block width `Delta_n = t_eta / B`.
    #[serde(with = "exact::serde_ratio")]
    pub step: BigRational,
    /// `t_b = b Delta_n` for `b = 0..=B`.
    #[serde(with = "exact::serde_ratio_vec")]
    pub times: Vec<BigRational>,
    /// `M_b` for `b = 0..=B`.
    pub lengths: Vec<u32>,
    /// `L_b = floor(n Delta_n)`, the same for every block.
    pub block_len: u32,
}

impl Schedule {
    pub fn innermost_len(&self) -> u32 {
        *self.lengths.last().unwrap()
    }

    pub fn transition_kind(&self, block: usize) -> AnnulusKind {
        if self.lengths[block + 1] < self.lengths[block] {
            AnnulusKind::Shrink
        } else {
            AnnulusKind::TransitionEqual
        }
    }

    /// `n(w+1) + sum_b (L_b M_b + M_{b+1}) + 1`.
    pub fn predicted_vertex_count(&self) -> u64 {
        let n = self.n as u64;
        let mut count = n * (self.collar as u64 + 1);
        for b in 0..self.blocks as usize {
            count += self.block_len as u64 * self.lengths[b] as u64 + self.lengths[b + 1] as u64;
        }
        count + 1
    }

    /// `2nw + sum_b (2 M_b L_b + transition) + M_B`, where a transition uses
    /// `M_b + M_{b+1}` triangles when it shrinks and `2 M_b` otherwise.
    pub fn predicted_triangle_count(&self) -> u64 {
        let n = self.n as u64;
        let mut count = 2 * n * self.collar as u64;
        for b in 0..self.blocks as usize {
            let (outer, inner) = (self.lengths[b] as u64, self.lengths[b + 1] as u64);
            count += 2 * outer * self.block_len as u64;
            count += if inner < outer { outer + inner } else { 2 * outer };
        }
        count + self.innermost_len() as u64
    }

    /// Index of the innermost cycle `C_J`.
    pub fn innermost_layer(&self) -> u32 {
        self.collar + self.blocks * (self.block_len + 1)
    }
}

/// Computes `w, B, Delta_n, t_b, M_b, L_b`, rejecting parameters that would
/// need a cycle shorter than 3, an empty block or an empty collar.
pub fn compute_schedule(p: &Params) -> Result<Schedule, ScheduleError> {
    let n = p.n;
    if n < 3 {
        return Err(ScheduleError::BoundaryTooShort(n));
    }
    if !p.rho.is_positive() {
        return Err(ScheduleError::RhoNotPositive(format_rational(&p.rho)));
    }
    if !p.eta.is_positive() || p.eta >= int(1) {
        return Err(ScheduleError::EtaOutOfRange(format_rational(&p.eta)));
    }
    let eta_sq = &p.eta * &p.eta;
    if eta_sq >= p.rho {
        return Err(ScheduleError::EtaSquaredNotBelowRho {
            eta_sq: format_rational(&eta_sq),
            rho: format_rational(&p.rho),
        });
    }
    let n_rat = int(n as i64);
    let collar = exact::ceil_u64(&(&p.rho * &n_rat)).unwrap_or(u64::MAX);
    if collar < 1 {
        return Err(ScheduleError::EmptyCollar(collar));
    }
    let blocks = exact::u32_sqrt_ceil(n);
    let stopping_time = p.stopping_time();
    let step = &stopping_time / int(blocks as i64);
    let block_len = exact::floor_u64(&(&n_rat * &step)).unwrap_or(0);
    if block_len < 1 {
        return Err(ScheduleError::EmptyBlock(block_len));
    }
    let n_sq = &n_rat * &n_rat;
    let mut times = Vec::with_capacity(blocks as usize + 1);
    let mut lengths = Vec::with_capacity(blocks as usize + 1);
    for b in 0..=blocks {
        let t = &step * int(b as i64);
        let radicand = &n_sq * (int(1) - int(4) * &t);
        let m = ceil_sqrt_rational(&radicand);
        let m = m.to_u64().unwrap_or(0);
        if m < 3 {
            return Err(ScheduleError::CycleTooShort { block: b as usize, length: m });
        }
        times.push(t);
        lengths.push(m as u32);
    }
    Ok(Schedule {
        n,
        collar: collar as u32,
        blocks,
        stopping_time,
        step,
        times,
        lengths,
        block_len: block_len as u32,
    })
}

#[derive(Clone, Debug)]
pub struct BuildResult {
    pub params: Params,
    pub schedule: Schedule,
    pub complex: Triangulation,
    pub ledger: LayerLedger,
    pub apex: VertexId,
    pub predicted_vertex_count: u64,
    pub predicted_triangle_count: u64,
}

impl BuildResult {
    pub fn vertex_count(&self) -> usize {
        self.complex.vertex_count()
    }

    pub fn density(&self) -> f64 {
        let n = self.params.n as f64;
        self.vertex_count() as f64 / (n * n)
    }
}

/// Assembles `K_n`: collar, stepwise main region, cone cap.
pub fn build_filling(p: &Params) -> Result<BuildResult> {
    let schedule = compute_schedule(p)?;
    let mut b = ComplexBuilder::new(p.n)?;
    let mut layer = b.boundary();
    for _ in 0..schedule.collar {
        layer = b.build_equal_annulus(layer, AnnulusKind::Collar)?;
    }
    for block in 0..schedule.blocks as usize {
        for _ in 0..schedule.block_len {
            layer = b.build_equal_annulus(layer, AnnulusKind::Equal)?;
        }
        layer = match schedule.transition_kind(block) {
            AnnulusKind::Shrink => b.build_shrinking_annulus(layer, schedule.lengths[block + 1])?,
            kind => b.build_equal_annulus(layer, kind)?,
        };
    }
    let apex = b.cap_with_cone(layer)?;
    let (complex, ledger, _) = b.finish();
    Ok(BuildResult {
        params: p.clone(),
        predicted_vertex_count: schedule.predicted_vertex_count(),
        predicted_triangle_count: schedule.predicted_triangle_count(),
        schedule,
        complex,
        ledger,
        apex,
    })
}

/// Asymptotic density bound next to the exact finite-`n` count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityPrediction {
    /// `rho + (1 - eta^3) / 6`.
    pub asymptotic_bound: BigRational,
    /// `|V(K_n)|` from the schedule, when the schedule accepts the parameters.
    pub vertex_count: Option<u64>,
}

impl DensityPrediction {
    pub fn bound_f64(&self) -> f64 {
        exact::to_f64(&self.asymptotic_bound)
    }

    pub fn finite_density(&self, n: u32) -> Option<f64> {
        self.vertex_count.map(|v| v as f64 / (n as f64 * n as f64))
    }
}

pub fn predict_density(p: &Params) -> DensityPrediction {
    let eta_cubed = &p.eta * &p.eta * &p.eta;
    let asymptotic_bound = &p.rho + (int(1) - eta_cubed) / int(6);
    let vertex_count = compute_schedule(p).ok().map(|s| s.predicted_vertex_count());
    DensityPrediction { asymptotic_bound, vertex_count }
}

/// `n * q(t) = sqrt(n^2 (1 - 4t))` as a float, for reporting only.
pub fn profile_length(n: u32, t: &BigRational) -> f64 {
    let radicand = exact::to_f64(&(int(1) - int(4) * t));
    n as f64 * radicand.max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;
    use crate::simplicial::{boundary_cycle, validate_disk};

    fn params(n: u32, rho: &str, eta: &str) -> Params {
        Params::parse(n, rho, eta).unwrap()
    }

    #[test]
    fn schedule_for_n_100() {
        let s = compute_schedule(&params(100, "0.3", "0.5")).unwrap();
        assert_eq!(s.stopping_time, ratio(3, 16));
        assert_eq!(s.blocks, 10);
        assert_eq!(s.step, ratio(3, 160));
        assert_eq!(s.block_len, 1);
        assert_eq!(s.lengths[0], 100);
        assert_eq!(s.lengths[1], 97);
        assert_eq!(s.innermost_len(), 50);
    }

    #[test]
    fn collar_width_is_ceil_rho_n() {
        let s = compute_schedule(&params(100, "0.1", "0.25")).unwrap();
        assert_eq!(s.collar, 10);
        let s = compute_schedule(&params(101, "0.1", "0.25")).unwrap();
        assert_eq!(s.collar, 11);
    }

    #[test]
    fn innermost_length_is_ceil_n_eta() {
        for (n, eta) in [(64u32, "0.25"), (100, "0.2"), (333, "0.3"), (1000, "0.17")] {
            let p = params(n, "0.1", eta);
            let s = compute_schedule(&p).unwrap();
            let expected = exact::ceil_u64(&(&p.eta * int(n as i64))).unwrap();
            assert_eq!(s.innermost_len() as u64, expected, "n={n} eta={eta}");
            assert_eq!(s.lengths[0], n);
            assert!(s.lengths.windows(2).all(|w| w[1] <= w[0]));
        }
    }

    #[test]
    fn schedule_rejections_name_the_bound() {
        assert_eq!(
            compute_schedule(&params(100, "0.01", "0.2")),
            Err(ScheduleError::EtaSquaredNotBelowRho { eta_sq: "1/25".into(), rho: "1/100".into() })
        );
        assert!(matches!(
            compute_schedule(&params(10, "0.1", "0.25")),
            Err(ScheduleError::EmptyBlock(0))
        ));
        assert!(matches!(
            compute_schedule(&params(100, "0", "0.25")),
            Err(ScheduleError::RhoNotPositive(_))
        ));
        assert!(matches!(
            compute_schedule(&params(100, "2", "1")),
            Err(ScheduleError::EtaOutOfRange(_))
        ));
        assert!(matches!(
            compute_schedule(&params(2, "0.5", "0.5")),
            Err(ScheduleError::BoundaryTooShort(2))
        ));
        // n = 9: B = 3, L_b = floor(9 * 0.234375 / 3) = 0.
        assert!(compute_schedule(&params(9, "0.5", "0.25")).is_err());
    }

    #[test]
    fn short_inner_cycle_is_rejected() {
        // n = 40, eta = 0.05: M_B = ceil(2) = 2.
        assert!(matches!(
            compute_schedule(&params(40, "0.1", "0.05")),
            Err(ScheduleError::CycleTooShort { length: 2, .. })
        ));
    }

    /// Independent count: walk the layer sequence one cycle at a time.
    fn count_by_layers(s: &Schedule) -> (u64, u64) {
        let mut cycles: Vec<u64> = vec![s.n as u64];
        let mut triangles = 0u64;
        let mut push = |cycles: &mut Vec<u64>, len: u64| {
            let outer = *cycles.last().unwrap();
            triangles += if len == outer { 2 * outer } else { outer + len };
            cycles.push(len);
        };
        for _ in 0..s.collar {
            push(&mut cycles, s.n as u64);
        }
        for b in 0..s.blocks as usize {
            for _ in 0..s.block_len {
                push(&mut cycles, s.lengths[b] as u64);
            }
            push(&mut cycles, s.lengths[b + 1] as u64);
        }
        triangles += *cycles.last().unwrap();
        (cycles.iter().sum::<u64>() + 1, triangles)
    }

    #[test]
    fn counts_match_the_built_complex() {
        for (n, rho, eta) in [(40u32, "0.1", "0.25"), (64, "0.1", "0.25"), (97, "0.05", "0.2"), (150, "0.3", "0.5")] {
            let p = params(n, rho, eta);
            let built = build_filling(&p).unwrap();
            let (v, f) = count_by_layers(&built.schedule);
            assert_eq!(built.predicted_vertex_count, v);
            assert_eq!(built.predicted_triangle_count, f);
            assert_eq!(built.vertex_count() as u64, v);
            assert_eq!(built.complex.triangles().len() as u64, f);
        }
    }

    #[test]
    fn built_fillings_are_disks_bounded_by_c_n() {
        for (n, rho, eta) in [(30u32, "0.1", "0.25"), (64, "0.1", "0.25"), (81, "0.2", "0.4")] {
            let built = build_filling(&params(n, rho, eta)).unwrap();
            let report = validate_disk(&built.complex);
            assert!(report.is_valid(), "n={n}: {:?}", report.defects);
            assert_eq!(boundary_cycle(&built.complex).unwrap(), (0..n).collect::<Vec<_>>());
        }
    }

    #[test]
    fn ledger_structure() {
        let built = build_filling(&params(100, "0.1", "0.25")).unwrap();
        let s = &built.schedule;
        let ledger = &built.ledger;
        assert_eq!(ledger.layers.len() as u32, s.innermost_layer() + 1);
        assert_eq!(ledger.layers[0].len, 100);
        assert!(ledger.layers.windows(2).all(|w| w[1].len <= w[0].len));
        assert!(ledger.layers.iter().all(|l| l.len >= 3));
        let collar = ledger.annuli.iter().filter(|a| a.kind == AnnulusKind::Collar).count();
        assert_eq!(collar as u32, s.collar);
        let transitions = ledger
            .annuli
            .iter()
            .filter(|a| matches!(a.kind, AnnulusKind::Shrink | AnnulusKind::TransitionEqual))
            .count();
        assert_eq!(transitions as u32, s.blocks);
        assert_eq!(built.complex.vertices()[built.apex as usize].theta, None);
    }

    #[test]
    fn phases_follow_the_recursion() {
        let built = build_filling(&params(64, "0.1", "0.25")).unwrap();
        let n = 64;
        let ledger = &built.ledger;
        assert_eq!(ledger.layers[0].phase.value(), &int(0));
        for a in &ledger.annuli {
            let outer = &ledger.layers[a.outer];
            let inner = &ledger.layers[a.outer + 1];
            let expected = if a.kind.is_equal_length() {
                outer.phase.shifted(&ratio(n as i64, 2 * outer.len as i64), n)
            } else {
                outer.phase.clone()
            };
            assert_eq!(inner.phase, expected);
            let bound = if a.kind.is_equal_length() {
                ratio(n as i64, 2 * outer.len as i64)
            } else {
                ratio(n as i64, inner.len as i64)
            };
            assert_eq!(a.drift_bound, bound);
        }
        for (v, meta) in built.complex.vertices().iter().enumerate() {
            let (Some(layer), Some(i)) = (meta.layer, meta.index_in_layer) else { continue };
            let rec = &ledger.layers[layer as usize];
            assert_eq!(rec.vertex(i), v as u32);
            assert_eq!(meta.theta.as_ref(), Some(&rec.phase.vertex_coordinate(i, rec.len, n)));
        }
    }

    #[test]
    fn density_predictions() {
        let p = params(1000, "0.05", "0.2");
        let d = predict_density(&p);
        assert_eq!(d.asymptotic_bound, ratio(1, 20) + ratio(124, 750));
        assert!((d.bound_f64() - 0.215_333_333_333_333_3).abs() < 1e-15);
        assert!(d.vertex_count.is_some());
        let d = predict_density(&Params::new(100, ratio(1, 10), int(0)));
        assert_eq!(d.asymptotic_bound, ratio(1, 10) + ratio(1, 6));
        assert_eq!(d.vertex_count, None);
        let d = predict_density(&Params::new(100, ratio(1, 10), int(1)));
        assert_eq!(d.asymptotic_bound, ratio(1, 10));
        assert_eq!(d.vertex_count, None);
    }

    #[test]
    fn float_params_are_read_as_decimals() {
        let p = Params::from_f64(64, 0.1, 0.25).unwrap();
        assert_eq!(p, params(64, "1/10", "1/4"));
    }
}
