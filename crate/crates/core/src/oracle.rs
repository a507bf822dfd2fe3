//! Exhaustive enumeration of small triangulated disks bounded by a labeled
//! `C_n`, used as ground truth for the minimum isometric filling size.
//!
//! Generation peels the triangle on the first edge of a pending polygon:
//! its third vertex is either a fresh interior vertex or another polygon
//! vertex, which splits the polygon in two. The decomposition is canonical,
//! so each filling arises once up to relabeling of interior vertices; a
//! brute-force canonical code over interior relabelings rejects isomorphs.

use std::collections::HashSet;
use std::ops::ControlFlow;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::simplicial::{validate_disk, Edge, Triangle, Triangulation, VertexId};
use crate::verify::verify_filling;

pub const MAX_BOUNDARY: u32 = 7;
pub const MAX_INTERIOR: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationBudget {
    pub n: u32,
    pub max_interior: u32,
    /// Stop after this many distinct fillings.
    pub max_fillings: usize,
}

impl EnumerationBudget {
    pub fn new(n: u32, max_interior: u32) -> Result<Self> {
        let b = EnumerationBudget { n, max_interior, max_fillings: 1_000_000 };
        b.check()?;
        Ok(b)
    }

    pub fn check(&self) -> Result<()> {
        if !(3..=MAX_BOUNDARY).contains(&self.n) {
            return Err(Error::Budget(format!("n = {} outside 3..={MAX_BOUNDARY}", self.n)));
        }
        if self.max_interior > MAX_INTERIOR {
            return Err(Error::Budget(format!(
                "max_interior = {} exceeds {MAX_INTERIOR}",
                self.max_interior
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Default, Clone, Serialize)]
pub struct EnumerationStats {
    pub emitted: usize,
    pub isomorphs_rejected: usize,
    pub invalid_rejected: usize,
    pub truncated: bool,
}

struct Search<'a, F> {
    n: u32,
    max_interior: u32,
    triangles: Vec<Triangle>,
    edges: HashSet<Edge>,
    next_vertex: VertexId,
    seen: HashSet<Vec<[VertexId; 3]>>,
    stats: EnumerationStats,
    limit: usize,
    visit: &'a mut F,
}

impl<F: FnMut(&Triangulation) -> ControlFlow<()>> Search<'_, F> {
    fn run(&mut self, pending: &mut Vec<Vec<VertexId>>) -> ControlFlow<()> {
        let Some(poly) = pending.pop() else {
            return self.emit();
        };
        let k = poly.len();
        let (p0, p1) = (poly[0], poly[1]);

        if self.next_vertex - self.n < self.max_interior {
            let x = self.next_vertex;
            self.next_vertex += 1;
            self.triangles.push(Triangle::new(p0, p1, x));
            self.edges.insert(Edge::new(p0, x));
            self.edges.insert(Edge::new(p1, x));
            let mut grown = Vec::with_capacity(k + 1);
            grown.extend([p0, x]);
            grown.extend_from_slice(&poly[1..]);
            pending.push(grown);
            let flow = self.run(pending);
            pending.pop();
            self.edges.remove(&Edge::new(p0, x));
            self.edges.remove(&Edge::new(p1, x));
            self.triangles.pop();
            self.next_vertex -= 1;
            flow?;
        }

        for j in 2..k {
            let x = poly[j];
            let chord_a = (j > 2).then(|| Edge::new(p1, x));
            let chord_b = (j < k - 1).then(|| Edge::new(x, p0));
            if chord_a.is_some_and(|e| self.edges.contains(&e))
                || chord_b.is_some_and(|e| self.edges.contains(&e))
            {
                continue;
            }
            let mut added = Vec::new();
            for e in [chord_a, chord_b].into_iter().flatten() {
                self.edges.insert(e);
                added.push(e);
            }
            self.triangles.push(Triangle::new(p0, p1, x));
            let before = pending.len();
            if j < k - 1 {
                let mut rest = poly[j..].to_vec();
                rest.push(p0);
                pending.push(rest);
            }
            if j > 2 {
                pending.push(poly[1..=j].to_vec());
            }
            let flow = self.run(pending);
            pending.truncate(before);
            self.triangles.pop();
            for e in added {
                self.edges.remove(&e);
            }
            flow?;
        }

        pending.push(poly);
        ControlFlow::Continue(())
    }

    fn emit(&mut self) -> ControlFlow<()> {
        let t = Triangulation::from_triangles(self.n, self.next_vertex, self.triangles.clone());
        if !validate_disk(&t).is_valid() {
            self.stats.invalid_rejected += 1;
            return ControlFlow::Continue(());
        }
        if !self.seen.insert(canonical_code(&t)) {
            self.stats.isomorphs_rejected += 1;
            return ControlFlow::Continue(());
        }
        self.stats.emitted += 1;
        (self.visit)(&t)?;
        if self.stats.emitted >= self.limit {
            self.stats.truncated = true;
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    }
}

/// Calls `visit` once for every distinct filling within the budget, in
/// depth-first order. Returns enumeration statistics.
pub fn for_each_filling<F>(budget: EnumerationBudget, mut visit: F) -> Result<EnumerationStats>
where
    F: FnMut(&Triangulation) -> ControlFlow<()>,
{
    budget.check()?;
    let n = budget.n;
    let mut search = Search {
        n,
        max_interior: budget.max_interior,
        triangles: Vec::new(),
        edges: (0..n).map(|i| Edge::new(i, (i + 1) % n)).collect(),
        next_vertex: n,
        seen: HashSet::new(),
        stats: EnumerationStats::default(),
        limit: budget.max_fillings,
        visit: &mut visit,
    };
    let mut pending = vec![(0..n).collect::<Vec<_>>()];
    let _ = search.run(&mut pending);
    Ok(search.stats)
}

pub fn enumerate_fillings(budget: EnumerationBudget) -> Result<(Vec<Triangulation>, EnumerationStats)> {
    let mut out = Vec::new();
    let stats = for_each_filling(budget, |t| {
        out.push(t.clone());
        ControlFlow::Continue(())
    })?;
    Ok((out, stats))
}

/// Lexicographically least sorted triangle list over all relabelings of the
/// interior vertices. Boundary labels are fixed.
pub fn canonical_code(t: &Triangulation) -> Vec<[VertexId; 3]> {
    let n = t.n();
    let interior: Vec<VertexId> = (n..t.vertex_count() as VertexId).collect();
    let mut perm: Vec<VertexId> = interior.clone();
    let mut best: Option<Vec<[VertexId; 3]>> = None;
    loop {
        let relabel = |v: VertexId| if v < n { v } else { perm[(v - n) as usize] };
        let mut code: Vec<[VertexId; 3]> = t
            .triangles()
            .iter()
            .map(|tri| {
                let [a, b, c] = tri.vertices();
                Triangle::new(relabel(a), relabel(b), relabel(c)).key()
            })
            .collect();
        code.sort_unstable();
        if best.as_ref().is_none_or(|b| code < *b) {
            best = Some(code);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best.unwrap_or_default()
}

fn next_permutation(v: &mut [VertexId]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let Some(i) = (0..v.len() - 1).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let j = (i + 1..v.len()).rev().find(|&j| v[j] > v[i]).unwrap();
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub n: u32,
    pub max_interior: u32,
    /// `None` when no isometric filling exists within the budget.
    pub min_vertices: Option<u32>,
    pub witness: Option<Triangulation>,
    /// Fillings examined per interior-vertex count `0..=max_interior`.
    pub examined: Vec<usize>,
    /// Set when enumeration hit the output cap, so a smaller filling may
    /// have been skipped.
    pub may_be_incomplete: bool,
}

/// Minimum `|V|` over isometric fillings of `C_n` with at most
/// `max_interior` interior vertices. Vertex counts are searched in
/// increasing order, so the first hit is minimal.
pub fn min_isometric_vertices(n: u32, budget: EnumerationBudget) -> Result<OracleResult> {
    let mut examined = Vec::new();
    let mut truncated = false;
    for k in 0..=budget.max_interior {
        let mut witness: Option<Triangulation> = None;
        let mut count = 0usize;
        let level = EnumerationBudget { n, max_interior: k, ..budget };
        let mut failure: Option<Error> = None;
        let stats = for_each_filling(level, |t| {
            if t.vertex_count() as u32 != n + k {
                return ControlFlow::Continue(());
            }
            count += 1;
            match verify_filling(t) {
                Ok(r) if r.is_isometric => {
                    witness = Some(t.clone());
                    ControlFlow::Break(())
                }
                Ok(_) => ControlFlow::Continue(()),
                Err(e) => {
                    failure = Some(e);
                    ControlFlow::Break(())
                }
            }
        })?;
        if let Some(e) = failure {
            return Err(e);
        }
        truncated |= stats.truncated;
        examined.push(count);
        if let Some(w) = witness {
            return Ok(OracleResult {
                n,
                max_interior: budget.max_interior,
                min_vertices: Some(n + k),
                witness: Some(w),
                examined,
                may_be_incomplete: truncated,
            });
        }
    }
    Ok(OracleResult {
        n,
        max_interior: budget.max_interior,
        min_vertices: None,
        witness: None,
        examined,
        may_be_incomplete: truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(n: u32, k: u32) -> (usize, EnumerationStats) {
        let (all, stats) = enumerate_fillings(EnumerationBudget::new(n, k).unwrap()).unwrap();
        (all.iter().filter(|t| t.vertex_count() as u32 == n + k).count(), stats)
    }

    #[test]
    fn triangle_is_the_only_filling_of_c3() {
        let (all, _) = enumerate_fillings(EnumerationBudget::new(3, 0).unwrap()).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].triangles(), &[Triangle::new(0, 1, 2)]);
    }

    #[test]
    fn square_has_two_diagonal_fillings_neither_isometric() {
        let (all, _) = enumerate_fillings(EnumerationBudget::new(4, 0).unwrap()).unwrap();
        assert_eq!(all.len(), 2);
        for t in &all {
            let r = verify_filling(t).unwrap();
            assert!(!r.is_isometric);
            assert_eq!(r.worst_pair.d_k, 1);
            assert_eq!(r.worst_pair.d_c, 2);
        }
    }

    #[test]
    fn wheel_is_among_one_vertex_fillings_of_c4() {
        let wheel_code = canonical_code(&Triangulation::cone(4));
        let (all, _) = enumerate_fillings(EnumerationBudget::new(4, 1).unwrap()).unwrap();
        assert!(all.iter().any(|t| canonical_code(t) == wheel_code));
    }

    #[test]
    fn polygon_triangulations_follow_catalan_numbers() {
        // A polygon with n sides has C_{n-2} triangulations.
        for (n, catalan) in [(3u32, 1usize), (4, 2), (5, 5), (6, 14), (7, 42)] {
            assert_eq!(count(n, 0).0, catalan, "n={n}");
        }
    }

    #[test]
    fn every_filling_is_a_distinct_disk() {
        for (n, k) in [(3u32, 2u32), (4, 2), (5, 2), (6, 1)] {
            let (all, stats) = enumerate_fillings(EnumerationBudget::new(n, k).unwrap()).unwrap();
            assert_eq!(stats.isomorphs_rejected, 0, "n={n} k={k}");
            assert_eq!(stats.invalid_rejected, 0, "n={n} k={k}");
            let codes: HashSet<_> = all.iter().map(canonical_code).collect();
            assert_eq!(codes.len(), all.len());
            for t in &all {
                assert!(validate_disk(t).is_valid());
                assert_eq!(t.triangles().len() as u32, n - 2 + 2 * (t.vertex_count() as u32 - n));
            }
        }
    }

    #[test]
    fn triangle_with_one_interior_vertex() {
        // Only the stellar subdivision.
        assert_eq!(count(3, 1).0, 1);
    }

    #[test]
    fn small_minimum_fillings() {
        let r = min_isometric_vertices(3, EnumerationBudget::new(3, 2).unwrap()).unwrap();
        assert_eq!(r.min_vertices, Some(3));
        let r = min_isometric_vertices(4, EnumerationBudget::new(4, 2).unwrap()).unwrap();
        assert_eq!(r.min_vertices, Some(5));
        let r = min_isometric_vertices(5, EnumerationBudget::new(5, 2).unwrap()).unwrap();
        assert_eq!(r.min_vertices, Some(6));
        assert!(!r.may_be_incomplete);
    }

    #[test]
    fn minimum_is_monotone_in_the_budget() {
        let mut last: Option<u32> = None;
        for k in 0..=2 {
            let r = min_isometric_vertices(5, EnumerationBudget::new(5, k).unwrap()).unwrap();
            if let (Some(prev), Some(now)) = (last, r.min_vertices) {
                assert!(now <= prev);
            }
            if last.is_some() {
                assert!(r.min_vertices.is_some());
            }
            last = r.min_vertices.or(last);
        }
    }

    #[test]
    fn budgets_are_enforced() {
        assert!(EnumerationBudget::new(8, 1).is_err());
        assert!(EnumerationBudget::new(5, 5).is_err());
        assert!(EnumerationBudget::new(2, 0).is_err());
    }

    #[test]
    fn output_cap_marks_truncation() {
        let budget = EnumerationBudget { n: 6, max_interior: 0, max_fillings: 3 };
        let (all, stats) = enumerate_fillings(budget).unwrap();
        assert_eq!(all.len(), 3);
        assert!(stats.truncated);
    }
}
