//! File formats: the shared triangulation JSON, the build document, the
//! verification report, and OFF/OBJ mesh export.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::Number;

use crate::annulus::{AnnulusRecord, LayerLedger, LayerRecord};
use crate::error::{Error, Result};
use crate::filling::{BuildResult, Params, Schedule};
use crate::phase::Phase;
use crate::simplicial::{Triangle, Triangulation, VertexId, VertexMeta};
use crate::verify::{PairDistance, VerificationReport};

#[derive(Serialize, Deserialize)]
struct VertexJson {
    id: VertexId,
    layer: Option<u32>,
    index_in_layer: Option<u32>,
    theta_num: Option<Number>,
    theta_den: Option<Number>,
}

#[derive(Serialize, Deserialize)]
struct TriangulationJson {
    n: u32,
    vertices: Vec<VertexJson>,
    triangles: Vec<[VertexId; 3]>,
}

#[derive(Serialize, Deserialize)]
struct BuildMeta {
    params: Params,
    schedule: Schedule,
    layers: Vec<LayerRecord>,
    annuli: Vec<AnnulusRecord>,
    apex: VertexId,
    predicted_vertex_count: u64,
    predicted_triangle_count: u64,
}

#[derive(Serialize, Deserialize)]
struct BuildDocument {
    n: u32,
    vertices: Vec<VertexJson>,
    triangles: Vec<[VertexId; 3]>,
    build: BuildMeta,
}

fn big_number(v: &BigInt) -> Number {
    Number::from_str(&v.to_string()).expect("integers are valid JSON numbers")
}

fn parse_big(n: &Number) -> Result<BigInt> {
    BigInt::from_str(&n.to_string()).map_err(|_| Error::Malformed(format!("not an integer: {n}")))
}

fn encode_vertices(t: &Triangulation) -> Vec<VertexJson> {
    t.vertices()
        .iter()
        .enumerate()
        .map(|(id, meta)| VertexJson {
            id: id as VertexId,
            layer: meta.layer,
            index_in_layer: meta.index_in_layer,
            theta_num: meta.theta.as_ref().map(|p| big_number(p.value().numer())),
            theta_den: meta.theta.as_ref().map(|p| big_number(p.value().denom())),
        })
        .collect()
}

fn decode(n: u32, vertices: Vec<VertexJson>, triangles: Vec<[VertexId; 3]>) -> Result<Triangulation> {
    let mut metas = Vec::with_capacity(vertices.len());
    for (expected, v) in vertices.into_iter().enumerate() {
        if v.id as usize != expected {
            return Err(Error::Malformed(format!("vertex ids must be 0..V in order; found {} at {expected}", v.id)));
        }
        let theta = match (v.theta_num, v.theta_den) {
            (Some(num), Some(den)) => {
                let den = parse_big(&den)?;
                if den <= BigInt::from(0) {
                    return Err(Error::Malformed(format!("vertex {} has a non-positive theta_den", v.id)));
                }
                Some(Phase::new(BigRational::new(parse_big(&num)?, den), n))
            }
            (None, None) => None,
            _ => return Err(Error::Malformed(format!("vertex {} has half a theta", v.id))),
        };
        metas.push(VertexMeta { layer: v.layer, index_in_layer: v.index_in_layer, theta });
    }
    let triangles = triangles.into_iter().map(Triangle::from).collect();
    Ok(Triangulation::new(n, metas, triangles))
}

pub fn triangulation_to_json(t: &Triangulation) -> Result<String> {
    let doc = TriangulationJson {
        n: t.n(),
        vertices: encode_vertices(t),
        triangles: t.triangles().iter().map(|tri| tri.vertices()).collect(),
    };
    Ok(serde_json::to_string(&doc)?)
}

/// Parses the shared triangulation JSON; extra top-level keys are ignored,
/// so build documents are accepted too.
pub fn triangulation_from_json(text: &str) -> Result<Triangulation> {
    let doc: TriangulationJson = serde_json::from_str(text)?;
    decode(doc.n, doc.vertices, doc.triangles)
}

pub fn build_to_json(b: &BuildResult) -> Result<String> {
    let doc = BuildDocument {
        n: b.complex.n(),
        vertices: encode_vertices(&b.complex),
        triangles: b.complex.triangles().iter().map(|tri| tri.vertices()).collect(),
        build: BuildMeta {
            params: b.params.clone(),
            schedule: b.schedule.clone(),
            layers: b.ledger.layers.clone(),
            annuli: b.ledger.annuli.clone(),
            apex: b.apex,
            predicted_vertex_count: b.predicted_vertex_count,
            predicted_triangle_count: b.predicted_triangle_count,
        },
    };
    Ok(serde_json::to_string(&doc)?)
}

pub fn build_from_json(text: &str) -> Result<BuildResult> {
    let doc: BuildDocument = serde_json::from_str(text)?;
    let complex = decode(doc.n, doc.vertices, doc.triangles)?;
    let m = doc.build;
    Ok(BuildResult {
        params: m.params,
        schedule: m.schedule,
        ledger: LayerLedger { n: doc.n, layers: m.layers, annuli: m.annuli },
        complex,
        apex: m.apex,
        predicted_vertex_count: m.predicted_vertex_count,
        predicted_triangle_count: m.predicted_triangle_count,
    })
}

/// Whether a JSON document carries build metadata.
pub fn has_build_metadata(text: &str) -> bool {
    #[derive(Deserialize)]
    struct Probe {
        build: Option<serde::de::IgnoredAny>,
    }
    serde_json::from_str::<Probe>(text).map(|p| p.build.is_some()).unwrap_or(false)
}

pub fn read_to_string(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

#[derive(Serialize)]
struct ReportJson<'a> {
    n: u32,
    delta_num: u64,
    delta_den: u64,
    is_isometric: bool,
    worst_pair: &'a PairDistance,
    eps_n: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness_path: Option<&'a [VertexId]>,
}

pub fn report_to_json(r: &VerificationReport, eps_n: Option<f64>, with_witness: bool) -> Result<String> {
    let doc = ReportJson {
        n: r.n,
        delta_num: r.delta.num,
        delta_den: r.delta.den,
        is_isometric: r.is_isometric,
        worst_pair: &r.worst_pair,
        eps_n,
        witness_path: if with_witness { r.witness.as_deref() } else { None },
    };
    Ok(serde_json::to_string(&doc)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    Obj,
}

impl FromStr for MeshFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "off" => Ok(MeshFormat::Off),
            "obj" => Ok(MeshFormat::Obj),
            other => Err(Error::Malformed(format!("unknown mesh format `{other}` (expected off or obj)"))),
        }
    }
}

/// Planar positions for inspection: cycles on circles whose radius shrinks
/// with layer index, angle `2 pi theta / n`, apex at the origin.
pub fn embed(t: &Triangulation) -> Vec<[f64; 3]> {
    let n = t.n() as f64;
    let depth = t.vertices().iter().filter_map(|m| m.layer).max().unwrap_or(0).max(1) as f64;
    let unplaced: Vec<usize> = t
        .vertices()
        .iter()
        .enumerate()
        .filter(|(_, m)| m.theta.is_none() && m.layer.is_none())
        .map(|(i, _)| i)
        .collect();
    t.vertices()
        .iter()
        .enumerate()
        .map(|(v, meta)| {
            let (radius, angle) = match (&meta.theta, meta.layer) {
                (Some(theta), layer) => {
                    let r = 1.0 - layer.unwrap_or(0) as f64 / depth;
                    (r, std::f64::consts::TAU * theta.to_f64() / n)
                }
                (None, Some(_)) => (0.0, 0.0),
                (None, None) if (v as u32) < t.n() => (1.0, std::f64::consts::TAU * v as f64 / n),
                (None, None) => {
                    let k = unplaced.iter().position(|&u| u == v).unwrap_or(0);
                    if unplaced.len() == 1 {
                        (0.0, 0.0)
                    } else {
                        (0.5, std::f64::consts::TAU * k as f64 / unplaced.len() as f64)
                    }
                }
            };
            [radius * angle.cos(), radius * angle.sin(), 0.0]
        })
        .collect()
}

pub fn export_mesh(t: &Triangulation, format: MeshFormat) -> String {
    let coords = embed(t);
    let mut out = String::new();
    match format {
        MeshFormat::Off => {
            let _ = writeln!(out, "OFF");
            let _ = writeln!(out, "{} {} 0", coords.len(), t.triangles().len());
            for [x, y, z] in &coords {
                let _ = writeln!(out, "{x} {y} {z}");
            }
            for tri in t.triangles() {
                let [a, b, c] = tri.vertices();
                let _ = writeln!(out, "3 {a} {b} {c}");
            }
        }
        MeshFormat::Obj => {
            let _ = writeln!(out, "# ringfill filling of C_{}", t.n());
            for [x, y, z] in &coords {
                let _ = writeln!(out, "v {x} {y} {z}");
            }
            for tri in t.triangles() {
                let [a, b, c] = tri.vertices();
                let _ = writeln!(out, "f {} {} {}", a + 1, b + 1, c + 1);
            }
        }
    }
    out
}

/// Vertex and face counts read back from OFF or OBJ text.
pub fn mesh_counts(text: &str, format: MeshFormat) -> Result<(usize, usize)> {
    match format {
        MeshFormat::Off => {
            let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
            if lines.next().map(str::trim) != Some("OFF") {
                return Err(Error::Malformed("missing OFF header".into()));
            }
            let counts: Vec<usize> = lines
                .next()
                .ok_or_else(|| Error::Malformed("missing OFF counts".into()))?
                .split_whitespace()
                .map(|s| s.parse().map_err(|_| Error::Malformed(format!("bad count `{s}`"))))
                .collect::<Result<_>>()?;
            if counts.len() < 2 {
                return Err(Error::Malformed("OFF counts line needs V and F".into()));
            }
            Ok((counts[0], counts[1]))
        }
        MeshFormat::Obj => Ok((
            text.lines().filter(|l| l.starts_with("v ")).count(),
            text.lines().filter(|l| l.starts_with("f ")).count(),
        )),
    }
}
