//! The two elementary annuli and the layer ledger that records every cycle's
//! length, phase and one-crossing drift bound.
//!
//! Annuli are glued on cyclic indices (mod `m`, mod `M`) directly; the seam
//! of the cut-open staircase is never materialised as duplicate vertices.

use std::ops::Range;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{AnnulusError, Result};
use crate::phase::Phase;
use crate::simplicial::{Triangle, Triangulation, VertexId, VertexMeta};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnnulusKind {
    /// Equal-length annulus of length `n` in the protective collar.
    Collar,
    /// Equal-length annulus inside a main-region block.
    Equal,
    /// Transition annulus that strictly shrinks the cycle.
    Shrink,
    /// Transition annulus whose two cycles happen to have equal length.
    TransitionEqual,
}

impl AnnulusKind {
    pub fn is_equal_length(self) -> bool {
        !matches!(self, AnnulusKind::Shrink)
    }
}

/// One concentric cycle `C_r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerRecord {
    pub index: usize,
    pub len: u32,
    #[serde(with = "serde_phase")]
    pub phase: Phase,
    pub first_vertex: VertexId,
}

impl LayerRecord {
    pub fn vertex(&self, i: u32) -> VertexId {
        self.first_vertex + (i % self.len)
    }
}

/// The annulus between `C_outer` and `C_{outer+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnulusRecord {
    pub outer: usize,
    pub kind: AnnulusKind,
    /// `b_r`: the largest circular displacement of one slanted edge.
    #[serde(with = "crate::exact::serde_ratio")]
    pub drift_bound: BigRational,
    pub triangles: Range<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerLedger {
    pub n: u32,
    pub layers: Vec<LayerRecord>,
    pub annuli: Vec<AnnulusRecord>,
}

impl LayerLedger {
    /// `A_h = 2 * sum_{r<h} b_r` for `h = 0..=layers`.
    pub fn accumulated_drift(&self) -> Vec<BigRational> {
        let mut acc = Vec::with_capacity(self.annuli.len() + 1);
        let mut total = crate::exact::int(0);
        acc.push(total.clone());
        for a in &self.annuli {
            total += &a.drift_bound * crate::exact::int(2);
            acc.push(total.clone());
        }
        acc
    }
}

mod serde_phase {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::phase::Phase;

    pub fn serialize<S: Serializer>(value: &Phase, s: S) -> Result<S::Ok, S::Error> {
        crate::exact::serde_ratio::serialize(value.value(), s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Phase, D::Error> {
        let text = String::deserialize(d)?;
        let value = crate::exact::parse_rational(&text).map_err(serde::de::Error::custom)?;
        Ok(Phase::from_reduced(value))
    }
}

/// Handle to a cycle inside a [`ComplexBuilder`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LayerHandle(pub usize);

/// Grows a filling inward from the boundary cycle, one annulus at a time.
#[derive(Debug)]
pub struct ComplexBuilder {
    n: u32,
    vertices: Vec<VertexMeta>,
    triangles: Vec<Triangle>,
    ledger: LayerLedger,
    apex: Option<VertexId>,
}

impl ComplexBuilder {
    /// Starts from the boundary `C_0 = C_n` with phase 0.
    pub fn new(n: u32) -> Result<Self> {
        if n < 3 {
            return Err(AnnulusError::OuterTooShort(n).into());
        }
        let mut b = ComplexBuilder {
            n,
            vertices: Vec::new(),
            triangles: Vec::new(),
            ledger: LayerLedger { n, ..Default::default() },
            apex: None,
        };
        b.push_layer(n, Phase::zero());
        Ok(b)
    }

    pub fn boundary(&self) -> LayerHandle {
        LayerHandle(0)
    }

    pub fn innermost(&self) -> LayerHandle {
        LayerHandle(self.ledger.layers.len() - 1)
    }

    pub fn layer(&self, h: LayerHandle) -> &LayerRecord {
        &self.ledger.layers[h.0]
    }

    pub fn ledger(&self) -> &LayerLedger {
        &self.ledger
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    fn push_layer(&mut self, len: u32, phase: Phase) -> LayerHandle {
        let index = self.ledger.layers.len();
        let first_vertex = self.vertices.len() as VertexId;
        for i in 0..len {
            self.vertices.push(VertexMeta {
                layer: Some(index as u32),
                index_in_layer: Some(i),
                theta: Some(phase.vertex_coordinate(i, len, self.n)),
            });
        }
        self.ledger.layers.push(LayerRecord { index, len, phase, first_vertex });
        LayerHandle(index)
    }

    fn check_outer(&self, outer: LayerHandle) -> Result<()> {
        if self.apex.is_some() {
            return Err(AnnulusError::Capped.into());
        }
        if outer.0 + 1 != self.ledger.layers.len() {
            return Err(AnnulusError::NotInnermost(outer.0).into());
        }
        let m = self.layer(outer).len;
        if m < 3 {
            return Err(AnnulusError::OuterTooShort(m).into());
        }
        Ok(())
    }

    /// Adds an inner cycle of the same length `m`, offset by half a step,
    /// with triangles `(U_i, U_{i+1}, V_i)` and `(U_{i+1}, V_i, V_{i+1})`.
    pub fn build_equal_annulus(&mut self, outer: LayerHandle, kind: AnnulusKind) -> Result<LayerHandle> {
        self.check_outer(outer)?;
        let outer_rec = self.layer(outer).clone();
        let m = outer_rec.len;
        let half_step = BigRational::new(BigInt::from(self.n), BigInt::from(2 * m as u64));
        let phase = outer_rec.phase.shifted(&half_step, self.n);
        let start = self.triangles.len();
        let inner = self.push_layer(m, phase);
        let inner_rec = self.layer(inner).clone();
        for i in 0..m {
            let (u0, u1) = (outer_rec.vertex(i), outer_rec.vertex(i + 1));
            let (v0, v1) = (inner_rec.vertex(i), inner_rec.vertex(i + 1));
            self.triangles.push(Triangle::new(u0, u1, v0));
            self.triangles.push(Triangle::new(u1, v0, v1));
        }
        self.ledger.annuli.push(AnnulusRecord {
            outer: outer.0,
            kind,
            drift_bound: half_step,
            triangles: start..self.triangles.len(),
        });
        Ok(inner)
    }

    /// Adds an inner cycle of length `target <= m` with the same phase,
    /// triangulated by the staircase `k_i = floor(target * i / m)`.
    pub fn build_shrinking_annulus(&mut self, outer: LayerHandle, target: u32) -> Result<LayerHandle> {
        self.check_outer(outer)?;
        let outer_rec = self.layer(outer).clone();
        let m = outer_rec.len;
        if target < 3 {
            return Err(AnnulusError::InnerTooShort(target).into());
        }
        if target > m {
            return Err(AnnulusError::Expanding { outer: m, inner: target }.into());
        }
        let start = self.triangles.len();
        let inner = self.push_layer(target, outer_rec.phase.clone());
        let inner_rec = self.layer(inner).clone();
        let k = staircase(m, target);
        for i in 0..m {
            let (u0, u1) = (outer_rec.vertex(i), outer_rec.vertex(i + 1));
            let ki = k[i as usize];
            if k[i as usize + 1] == ki {
                self.triangles.push(Triangle::new(u0, u1, inner_rec.vertex(ki)));
            } else {
                let (v0, v1) = (inner_rec.vertex(ki), inner_rec.vertex(ki + 1));
                self.triangles.push(Triangle::new(u0, u1, v1));
                self.triangles.push(Triangle::new(u0, v0, v1));
            }
        }
        self.ledger.annuli.push(AnnulusRecord {
            outer: outer.0,
            kind: AnnulusKind::Shrink,
            drift_bound: BigRational::new(BigInt::from(self.n), BigInt::from(target)),
            triangles: start..self.triangles.len(),
        });
        Ok(inner)
    }

    /// Closes the innermost cycle with one apex vertex and a fan of triangles.
    pub fn cap_with_cone(&mut self, outer: LayerHandle) -> Result<VertexId> {
        self.check_outer(outer)?;
        let rec = self.layer(outer).clone();
        let apex = self.vertices.len() as VertexId;
        self.vertices.push(VertexMeta {
            layer: Some(self.ledger.layers.len() as u32),
            index_in_layer: None,
            theta: None,
        });
        for i in 0..rec.len {
            self.triangles.push(Triangle::new(apex, rec.vertex(i), rec.vertex(i + 1)));
        }
        self.apex = Some(apex);
        Ok(apex)
    }

    pub fn finish(self) -> (Triangulation, LayerLedger, Option<VertexId>) {
        (Triangulation::new(self.n, self.vertices, self.triangles), self.ledger, self.apex)
    }
}

/// `k_i = floor(inner * i / outer)` for `i = 0..=outer`.
pub fn staircase(outer: u32, inner: u32) -> Vec<u32> {
    (0..=outer).map(|i| ((inner as u64 * i as u64) / outer as u64) as u32).collect()
}
