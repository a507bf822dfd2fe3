//! Exact boundary-distance verification of a filling, the per-edge drift
//! audit, and the path-drift lower bound.

use std::cmp::Ordering;
use std::collections::VecDeque;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::annulus::AnnulusKind;
use crate::error::{Error, Result};
use crate::exact::{self, format_rational, int};
use crate::filling::BuildResult;
use crate::phase::circ_dist;
use crate::simplicial::{Edge, SkeletonGraph, Triangulation, VertexId};

pub const UNREACHED: u32 = u32::MAX;

/// Cycle distance `d_{C_n}(x, y)` between two boundary ids.
pub fn cycle_distance(n: u32, x: VertexId, y: VertexId) -> u32 {
    let d = x.abs_diff(y);
    d.min(n - d)
}

/// Unweighted shortest-path distances from `source` to every vertex.
pub fn bfs_distances(g: &SkeletonGraph, source: VertexId) -> Result<Vec<u32>> {
    let mut dist = Vec::new();
    let mut queue = VecDeque::new();
    bfs_into(g, source, &mut dist, &mut queue, |_| true);
    match dist.iter().position(|&d| d == UNREACHED) {
        Some(v) => Err(Error::Unreachable { source_vertex: source, vertex: v as VertexId }),
        None => Ok(dist),
    }
}

/// BFS restricted to vertices accepted by `allowed`; others stay `UNREACHED`.
pub fn bfs_within(g: &SkeletonGraph, source: VertexId, allowed: impl Fn(VertexId) -> bool) -> Vec<u32> {
    let mut dist = Vec::new();
    let mut queue = VecDeque::new();
    bfs_into(g, source, &mut dist, &mut queue, allowed);
    dist
}

fn bfs_into(
    g: &SkeletonGraph,
    source: VertexId,
    dist: &mut Vec<u32>,
    queue: &mut VecDeque<VertexId>,
    allowed: impl Fn(VertexId) -> bool,
) {
    dist.clear();
    dist.resize(g.vertex_count(), UNREACHED);
    queue.clear();
    dist[source as usize] = 0;
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        let next = dist[v as usize] + 1;
        for &u in g.neighbours(v) {
            if dist[u as usize] == UNREACHED && allowed(u) {
                dist[u as usize] = next;
                queue.push_back(u);
            }
        }
    }
}

fn bfs_parents(g: &SkeletonGraph, source: VertexId) -> Vec<VertexId> {
    let mut parent = vec![VertexId::MAX; g.vertex_count()];
    let mut queue = VecDeque::new();
    parent[source as usize] = source;
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        for &u in g.neighbours(v) {
            if parent[u as usize] == VertexId::MAX {
                parent[u as usize] = v;
                queue.push_back(u);
            }
        }
    }
    parent
}

/// A reduced fraction of small integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SmallRatio {
    pub num: u64,
    pub den: u64,
}

impl SmallRatio {
    pub fn new(num: u64, den: u64) -> Self {
        let g = exact::gcd_u64(num, den).max(1);
        SmallRatio { num: num / g, den: den / g }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    fn cmp_value(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PairDistance {
    pub x: VertexId,
    pub y: VertexId,
    pub d_k: u32,
    pub d_c: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub n: u32,
    /// `min d_K(x,y) / d_C(x,y)` over distinct boundary pairs.
    pub delta: SmallRatio,
    pub is_isometric: bool,
    pub worst_pair: PairDistance,
    /// A shortest path realising the worst pair, when it is a shortcut.
    pub witness: Option<Vec<VertexId>>,
    pub pairs_checked: u64,
}

/// Distances from one boundary source to every boundary vertex.
pub fn boundary_distances_from(g: &SkeletonGraph, n: u32, source: VertexId) -> Result<Vec<u32>> {
    let dist = bfs_distances(g, source)?;
    Ok(dist[..n as usize].to_vec())
}

/// Runs BFS from every boundary vertex and computes the Lipschitz constant
/// `delta` exactly. Sources are processed in parallel; the reduction is in
/// source order, so ties resolve to the lexicographically first pair.
pub fn verify_filling(t: &Triangulation) -> Result<VerificationReport> {
    let g = SkeletonGraph::new(t);
    verify_with_graph(t, &g)
}

pub fn verify_with_graph(t: &Triangulation, g: &SkeletonGraph) -> Result<VerificationReport> {
    let n = t.n();
    let per_source: Vec<Result<Option<PairDistance>>> = (0..n)
        .into_par_iter()
        .map_init(
            || (Vec::new(), VecDeque::new()),
            |(dist, queue), x| {
                bfs_into(g, x, dist, queue, |_| true);
                if let Some(v) = dist.iter().position(|&d| d == UNREACHED) {
                    return Err(Error::Unreachable { source_vertex: x, vertex: v as VertexId });
                }
                let mut best: Option<PairDistance> = None;
                for y in x + 1..n {
                    let cand = PairDistance { x, y, d_k: dist[y as usize], d_c: cycle_distance(n, x, y) };
                    if best.is_none_or(|b| ratio_of(&cand).cmp_value(&ratio_of(&b)) == Ordering::Less) {
                        best = Some(cand);
                    }
                }
                Ok(best)
            },
        )
        .collect();

    let mut worst: Option<PairDistance> = None;
    for res in per_source {
        if let Some(cand) = res? {
            if worst.is_none_or(|w| ratio_of(&cand).cmp_value(&ratio_of(&w)) == Ordering::Less) {
                worst = Some(cand);
            }
        }
    }
    let worst = worst.ok_or_else(|| Error::Malformed("boundary has fewer than two vertices".into()))?;
    let delta = ratio_of(&worst);
    let is_isometric = delta.num >= delta.den;
    let witness = (!is_isometric).then(|| shortest_path(g, worst.x, worst.y));
    Ok(VerificationReport {
        n,
        delta,
        is_isometric,
        worst_pair: worst,
        witness,
        pairs_checked: n as u64 * (n as u64 - 1) / 2,
    })
}

fn ratio_of(p: &PairDistance) -> SmallRatio {
    SmallRatio::new(p.d_k as u64, p.d_c as u64)
}

/// One BFS-tree shortest path from `x` to `y`, inclusive.
pub fn shortest_path(g: &SkeletonGraph, x: VertexId, y: VertexId) -> Vec<VertexId> {
    let parent = bfs_parents(g, x);
    let mut path = vec![y];
    let mut v = y;
    while v != x {
        v = parent[v as usize];
        path.push(v);
    }
    path.reverse();
    path
}

#[derive(Clone, Debug, Serialize)]
pub struct AnnulusAudit {
    pub annulus: usize,
    pub kind: AnnulusKind,
    pub outer_len: u32,
    pub inner_len: u32,
    pub slanted_edges: usize,
    #[serde(serialize_with = "ser_ratio")]
    pub bound: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub max_observed: BigRational,
    /// For equal-length annuli: every slanted edge moves exactly the bound.
    pub attains_bound_everywhere: bool,
}

fn ser_ratio<S: serde::Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(v))
}

#[derive(Clone, Debug, Serialize)]
pub struct DriftAudit {
    pub annuli: Vec<AnnulusAudit>,
}

impl DriftAudit {
    /// Every equal-length annulus attains `n / (2m)` on every slanted edge.
    pub fn equal_annuli_attain_bound(&self) -> bool {
        self.annuli
            .iter()
            .filter(|a| a.kind.is_equal_length())
            .all(|a| a.attains_bound_everywhere)
    }
}

/// Checks `||Theta(u) - Theta(v)||_n <= b_r` exactly on every slanted edge.
/// The first violation is returned as an error.
pub fn drift_audit(b: &BuildResult) -> Result<DriftAudit> {
    let n = b.params.n;
    let t = &b.complex;
    let verts = t.vertices();
    let mut annuli = Vec::with_capacity(b.ledger.annuli.len());
    let mut edges: Vec<Edge> = Vec::new();
    for (idx, rec) in b.ledger.annuli.iter().enumerate() {
        let outer_layer = rec.outer as u32;
        edges.clear();
        for tri in &t.triangles()[rec.triangles.clone()] {
            for e in tri.edges() {
                let (la, lb) = (verts[e.lo as usize].layer, verts[e.hi as usize].layer);
                if la != lb && la.is_some_and(|l| l == outer_layer || l == outer_layer + 1) {
                    edges.push(e);
                }
            }
        }
        edges.sort_unstable();
        edges.dedup();
        let mut max_observed = BigRational::zero();
        let mut attains = true;
        for e in &edges {
            let (Some(a), Some(c)) = (&verts[e.lo as usize].theta, &verts[e.hi as usize].theta) else {
                return Err(Error::Malformed(format!("edge {e} has an endpoint without a phase")));
            };
            let d = circ_dist(a, c, n);
            if d > rec.drift_bound {
                return Err(Error::DriftViolation {
                    annulus: idx,
                    u: e.lo,
                    v: e.hi,
                    observed: format_rational(&d),
                    bound: format_rational(&rec.drift_bound),
                });
            }
            if d != rec.drift_bound {
                attains = false;
            }
            if d > max_observed {
                max_observed = d;
            }
        }
        annuli.push(AnnulusAudit {
            annulus: idx,
            kind: rec.kind,
            outer_len: b.ledger.layers[rec.outer].len,
            inner_len: b.ledger.layers[rec.outer + 1].len,
            slanted_edges: edges.len(),
            bound: rec.drift_bound.clone(),
            max_observed,
            attains_bound_everywhere: attains && !edges.is_empty(),
        });
    }
    Ok(DriftAudit { annuli })
}

/// Tabulated path-drift lower bounds, indexed by cycle distance `L`.
///
/// For a path whose deepest layer is `C_h`,
/// `|P| >= 2h + (m_h / n) (L - A_h)_+`; a path through the apex has
/// `|P| >= 2w + 2 sum_b L_b`. The bound for a pair is the minimum over all
/// depths, rounded up.
#[derive(Clone, Debug)]
pub struct DriftLowerBound {
    n: u32,
    /// `per_depth[h][L]`: ceiling of the depth-`h` bound.
    per_depth: Vec<Vec<u32>>,
    /// `prefix_min[h][L]`: min over depths `0..=h`.
    prefix_min: Vec<Vec<u32>>,
    cone: u32,
}

impl DriftLowerBound {
    pub fn new(b: &BuildResult) -> Self {
        let n = b.params.n;
        let n_rat = int(n as i64);
        let drift = b.ledger.accumulated_drift();
        let half = n / 2;
        let mut per_depth = Vec::with_capacity(b.ledger.layers.len());
        for (h, layer) in b.ledger.layers.iter().enumerate() {
            let scale = int(layer.len as i64) / &n_rat;
            let row = (0..=half)
                .map(|l| {
                    let excess = int(l as i64) - &drift[h];
                    let horizontal = if excess > BigRational::zero() {
                        (&scale * excess).ceil().to_integer().to_u32().unwrap_or(u32::MAX)
                    } else {
                        0
                    };
                    (2 * h as u32).saturating_add(horizontal)
                })
                .collect::<Vec<_>>();
            per_depth.push(row);
        }
        let mut prefix_min: Vec<Vec<u32>> = Vec::with_capacity(per_depth.len());
        for row in &per_depth {
            let next = match prefix_min.last() {
                Some(prev) => prev.iter().zip(row).map(|(a, b)| (*a).min(*b)).collect(),
                None => row.clone(),
            };
            prefix_min.push(next);
        }
        let s = &b.schedule;
        let cone = 2 * s.collar + 2 * s.blocks * s.block_len;
        DriftLowerBound { n, per_depth, prefix_min, cone }
    }

    /// Lower bound on `d_K(x, y)` for boundary vertices `x`, `y`.
    pub fn bound(&self, x: VertexId, y: VertexId) -> u32 {
        self.bound_for_distance(cycle_distance(self.n, x, y))
    }

    pub fn bound_for_distance(&self, l: u32) -> u32 {
        let deepest = self.prefix_min.last().map_or(u32::MAX, |row| row[l as usize]);
        deepest.min(self.cone)
    }

    /// Bound for paths whose deepest layer is at most `h` (no apex).
    pub fn bound_within_depth(&self, l: u32, h: usize) -> u32 {
        self.prefix_min[h][l as usize]
    }

    /// Bound for paths whose deepest layer is exactly `h`.
    pub fn bound_at_depth(&self, l: u32, h: usize) -> u32 {
        self.per_depth[h][l as usize]
    }

    pub fn cone_bound(&self) -> u32 {
        self.cone
    }

    pub fn depths(&self) -> usize {
        self.per_depth.len()
    }
}

/// Convenience wrapper building the table for one query.
pub fn drift_lower_bound(b: &BuildResult, x: VertexId, y: VertexId) -> u32 {
    DriftLowerBound::new(b).bound(x, y)
}

/// Outcome of comparing the drift lower bound with exact BFS distances.
#[derive(Clone, Debug, Default, Serialize)]
pub struct LowerBoundCheck {
    pub pairs_checked: u64,
    pub sources: usize,
    /// Pairs where the bound exceeded the true distance.
    pub violations: Vec<PairDistance>,
}

impl LowerBoundCheck {
    pub fn is_sound(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `bound(x, y) <= d_K(x, y)` for the given boundary pairs. Pairs are
/// grouped by source so each source costs one BFS; in `PairDistance` the
/// field `d_c` holds the bound.
pub fn check_lower_bound(b: &BuildResult, g: &SkeletonGraph, pairs: &[(VertexId, VertexId)]) -> Result<LowerBoundCheck> {
    let table = DriftLowerBound::new(b);
    let n = b.params.n;
    let mut by_source: Vec<Vec<VertexId>> = vec![Vec::new(); n as usize];
    for &(x, y) in pairs {
        if x >= n || y >= n {
            return Err(Error::Boundary(format!("pair ({x}, {y}) is not on C_{n}")));
        }
        by_source[x as usize].push(y);
    }
    let per_source: Vec<Result<Vec<PairDistance>>> = by_source
        .par_iter()
        .enumerate()
        .filter(|(_, targets)| !targets.is_empty())
        .map(|(x, targets)| {
            let x = x as VertexId;
            let dist = boundary_distances_from(g, n, x)?;
            Ok(targets
                .iter()
                .filter_map(|&y| {
                    let bound = table.bound(x, y);
                    (bound > dist[y as usize]).then_some(PairDistance { x, y, d_k: dist[y as usize], d_c: bound })
                })
                .collect())
        })
        .collect();
    let mut out = LowerBoundCheck {
        pairs_checked: pairs.len() as u64,
        sources: by_source.iter().filter(|t| !t.is_empty()).count(),
        violations: Vec::new(),
    };
    for r in per_source {
        out.violations.extend(r?);
    }
    Ok(out)
}

/// Every unordered pair of distinct boundary vertices.
pub fn all_boundary_pairs(n: u32) -> Vec<(VertexId, VertexId)> {
    (0..n).flat_map(|x| (x + 1..n).map(move |y| (x, y))).collect()
}

/// `count` pairs of distinct boundary vertices drawn uniformly with a
/// seeded generator.
pub fn sample_boundary_pairs(n: u32, count: usize, seed: u64) -> Vec<(VertexId, VertexId)> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let x = rng.gen_range(0..n);
            let y = (x + rng.gen_range(1..n)) % n;
            (x, y)
        })
        .collect()
}

/// Empirical discrepancies of the stepwise profile against its continuum
/// limit, maximised over main-region layers.
#[derive(Clone, Debug, Serialize)]
pub struct UniformEstimates {
    pub eps_n: f64,
    /// `max |2h - 2 rho n - 2 tau_h n| / n`.
    pub depth: f64,
    /// `max |m_h / n - q(tau_h)|`.
    pub length: f64,
    /// `max |A_h - rho n - n I(tau_h)| / n`.
    pub drift: f64,
    pub worst_layer: usize,
}

pub fn uniform_estimates(b: &BuildResult) -> UniformEstimates {
    let n = b.params.n as f64;
    let rho = b.params.rho_f64();
    let drift = b.ledger.accumulated_drift();
    let start = b.schedule.collar as usize;
    let mut equal_passed = 0u64;
    let mut out = UniformEstimates { eps_n: 0.0, depth: 0.0, length: 0.0, drift: 0.0, worst_layer: start };
    for h in start..b.ledger.layers.len() {
        if h > start && b.ledger.annuli[h - 1].kind == AnnulusKind::Equal {
            equal_passed += 1;
        }
        let tau = equal_passed as f64 / n;
        let q = crate::analysis::profile_q(tau);
        let depth = (2.0 * h as f64 - 2.0 * rho * n - 2.0 * tau * n).abs() / n;
        let length = (b.ledger.layers[h].len as f64 / n - q).abs();
        let a_h = exact::to_f64(&drift[h]);
        let drift_err = (a_h - rho * n - n * crate::analysis::drift_integral(tau)).abs() / n;
        let worst = depth.max(length).max(drift_err);
        out.depth = out.depth.max(depth);
        out.length = out.length.max(length);
        out.drift = out.drift.max(drift_err);
        if worst > out.eps_n {
            out.eps_n = worst;
            out.worst_layer = h;
        }
    }
    out
}
