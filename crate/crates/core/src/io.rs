//! JSON input formats.
//!
//! Complex: `{"dim": 2, "cells": [[[0],[1]], [[0,1]]], "labels": [{"cell": [0,1], "name": "a"}]}`
//! or `{"simplices": [[0,1,2], ...]}` (faces added). Cover spec:
//! `{"degree": 3, "base": "torus.json" | {complex}, "perms": [{"from": [0,1,3], "to": [1,3,4], "perm": [1,2,0]}],
//! "default_identity": true}` or `"random": "cyclic"|"graph"` with a seed.
//! Geometry: `{"uniform": 1.0}` or `{"edges": [[0,1,1.5], ...]}`. Parameters: a
//! flat object of numbers or rational strings. Cycles: `{"chain": [...]}`,
//! `{"edges": [[a,b,coef], ...]}` or `{"word": [labels], "base_vertex": v, "sheet": s}`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::Value;

use crate::bounds::{Num, Params};
use crate::complex::{load_complex, LoadReport, SimplicialComplex};
use crate::covers::{build_cover, random_cyclic_cover, random_graph_cover, Cover, PermutationCoverSpec};
use crate::error::{Error, Result};
use crate::exact::parse_rational;
use crate::scl::cycle_from_word;
use crate::whitney::Geometry;

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn parse<T: for<'de> Deserialize<'de>>(v: &Value, what: &str) -> Result<T> {
    T::deserialize(v).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LabelJson {
    cell: Vec<usize>,
    name: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ComplexJson {
    dim: Option<usize>,
    cells: Option<Vec<Vec<Vec<usize>>>>,
    simplices: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    labels: Vec<LabelJson>,
}

pub fn complex_from_value(v: &Value) -> Result<LoadReport> {
    let c: ComplexJson = parse(v, "complex")?;
    let labels: BTreeMap<Vec<usize>, String> = c
        .labels
        .into_iter()
        .map(|l| {
            let mut s = l.cell;
            s.sort_unstable();
            (s, l.name)
        })
        .collect();
    let cells = match (c.cells, c.simplices) {
        (Some(cells), None) => cells,
        (None, Some(simplices)) => {
            let mut by_dim: Vec<Vec<Vec<usize>>> = Vec::new();
            for s in simplices {
                if s.is_empty() {
                    return Err(Error::Parse("empty simplex".into()));
                }
                if by_dim.len() < s.len() {
                    by_dim.resize(s.len(), Vec::new());
                }
                by_dim[s.len() - 1].push(s);
            }
            by_dim
        }
        _ => return Err(Error::Parse("complex needs exactly one of `cells` or `simplices`".into())),
    };
    load_complex(c.dim, cells, labels)
}

pub fn load_complex_file(path: &Path) -> Result<LoadReport> {
    complex_from_value(&read_json(path)?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PermJson {
    from: Vec<usize>,
    to: Vec<usize>,
    perm: Vec<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CoverJson {
    degree: usize,
    base: Value,
    #[serde(default)]
    perms: Vec<PermJson>,
    #[serde(default)]
    default_identity: bool,
    random: Option<String>,
    seed: Option<u64>,
}

/// Parses a cover spec. Relative base paths resolve against `dir`; `seed`
/// overrides the file's seed for random specs.
pub fn cover_spec_from_value(v: &Value, dir: &Path, seed: Option<u64>) -> Result<PermutationCoverSpec> {
    let c: CoverJson = parse(v, "cover spec")?;
    let base = match &c.base {
        Value::String(p) => load_complex_file(&dir.join(p))?.complex,
        other => complex_from_value(other)?.complex,
    };
    if let Some(kind) = &c.random {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.or(c.seed).unwrap_or(0));
        return match kind.as_str() {
            "cyclic" => random_cyclic_cover(&base, c.degree, &mut rng),
            "graph" => random_graph_cover(&base, c.degree, &mut rng),
            other => Err(Error::Parse(format!("unknown random cover kind `{other}`"))),
        };
    }
    let top = base.top_cells();
    let find = |cell: &[usize]| -> Result<usize> {
        let mut s = cell.to_vec();
        s.sort_unstable();
        top.iter().position(|t| *t == s).ok_or_else(|| Error::InvalidCover(format!("{cell:?} is not a top cell")))
    };
    let entries = c
        .perms
        .iter()
        .map(|p| Ok(((find(&p.from)?, find(&p.to)?), p.perm.clone())))
        .collect::<Result<Vec<_>>>()?;
    PermutationCoverSpec::new(c.degree, base, &entries, c.default_identity)
}

pub fn load_cover_file(path: &Path, seed: Option<u64>) -> Result<Cover> {
    let dir = path.parent().unwrap_or(Path::new("."));
    build_cover(&cover_spec_from_value(&read_json(path)?, dir, seed)?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GeometryJson {
    uniform: Option<f64>,
    edges: Option<Vec<(usize, usize, f64)>>,
}

pub fn geometry_from_value(v: &Value, k: &SimplicialComplex) -> Result<Geometry> {
    let g: GeometryJson = parse(v, "geometry")?;
    match (g.uniform, g.edges) {
        (Some(l), None) => Geometry::uniform(k, l),
        (None, Some(edges)) => {
            let lengths = edges.into_iter().map(|(a, b, l)| ((a.min(b), a.max(b)), l)).collect();
            Geometry::from_edge_lengths(k, lengths)
        }
        _ => Err(Error::Parse("geometry needs exactly one of `uniform` or `edges`".into())),
    }
}

/// Parameter file: a flat object of numbers or strings such as `"1/3"`.
/// Numbers are read through their decimal text, so `0.1` is exactly 1/10.
pub fn params_from_value(v: &Value) -> Result<Params> {
    let Value::Object(map) = v else {
        return Err(Error::Parse("parameters must be a JSON object".into()));
    };
    let mut ps = Params::new();
    for (name, val) in map {
        let text = match val {
            Value::Number(n) => n.to_string(),
            Value::String(s) => s.clone(),
            _ => return Err(Error::Parse(format!("parameter `{name}` must be a number or string"))),
        };
        ps.set_user(name, Num::Exact(parse_rational(&text)?));
    }
    Ok(ps)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CycleJson {
    chain: Option<Vec<i64>>,
    edges: Option<Vec<(usize, usize, i64)>>,
    word: Option<Vec<usize>>,
    #[serde(default)]
    base_vertex: Option<usize>,
    #[serde(default)]
    sheet: usize,
}

/// Integer 1-chain on `k`. Words need the cover that produced `k`.
pub fn cycle_from_value(v: &Value, k: &SimplicialComplex, cover: Option<&Cover>) -> Result<Vec<i64>> {
    let c: CycleJson = parse(v, "cycle")?;
    match (c.chain, c.edges, c.word) {
        (Some(chain), None, None) => {
            if chain.len() != k.num_cells(1) {
                return Err(Error::ShapeMismatch(format!("chain has {} entries for {} edges", chain.len(), k.num_cells(1))));
            }
            Ok(chain)
        }
        (None, Some(edges), None) => {
            let mut chain = vec![0i64; k.num_cells(1)];
            for (a, b, coef) in edges {
                let (lo, hi, s) = if a < b { (a, b, 1) } else { (b, a, -1) };
                let e = k.index_of(&[lo, hi]).ok_or_else(|| Error::Parse(format!("no edge {a}-{b}")))?;
                chain[e] += s * coef;
            }
            Ok(chain)
        }
        (None, None, Some(word)) => {
            let cover = cover.ok_or_else(|| Error::Parse("a word cycle needs a cover".into()))?;
            let first = *word.first().ok_or_else(|| Error::Parse("empty word; use `chain` for the zero cycle".into()))?;
            let (cell, _) = cover.spec.label_endpoints(first).ok_or(Error::BadLabel { label: first, tile: 0 })?;
            let base_vertex = c.base_vertex.unwrap_or(cover.spec.base().top_cells()[cell][0]);
            cycle_from_word(cover, &word, base_vertex, c.sheet)
        }
        _ => Err(Error::Parse("cycle needs exactly one of `chain`, `edges` or `word`".into())),
    }
}

/// Which input a JSON document is, judged by its keys.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Complex,
    Cover,
    Geometry,
    Params,
}

pub fn detect_kind(v: &Value) -> Kind {
    let has = |k: &str| v.get(k).is_some();
    if has("cells") || has("simplices") {
        Kind::Complex
    } else if has("degree") && has("base") {
        Kind::Cover
    } else if has("uniform") || has("edges") {
        Kind::Geometry
    } else {
        Kind::Params
    }
}

/// Complex, optional cover and optional geometry, all parsed up front.
/// Geometry given for the base of a cover is pulled back to the cover.
pub struct Workspace {
    pub complex: SimplicialComplex,
    pub cover: Option<Cover>,
    pub geometry: Option<Geometry>,
    pub added_faces: usize,
    pub sources: Vec<PathBuf>,
}

impl Workspace {
    pub fn load(paths: &[PathBuf], seed: Option<u64>) -> Result<Self> {
        let docs = paths.iter().map(|p| Ok((p.clone(), read_json(p)?))).collect::<Result<Vec<_>>>()?;
        let mut complex = None;
        let mut cover = None;
        let mut geom_doc = None;
        for (path, doc) in &docs {
            match detect_kind(doc) {
                Kind::Complex if complex.is_none() => complex = Some(complex_from_value(doc)?),
                Kind::Cover if cover.is_none() => {
                    let dir = path.parent().unwrap_or(Path::new("."));
                    cover = Some(build_cover(&cover_spec_from_value(doc, dir, seed)?)?);
                }
                Kind::Geometry if geom_doc.is_none() => geom_doc = Some(doc),
                kind => return Err(Error::Parse(format!("{}: unexpected {kind:?} input", path.display()))),
            }
        }
        let (complex, added_faces, cover) = match (complex, cover) {
            (_, Some(c)) => (c.complex.clone(), 0, Some(c)),
            (Some(r), None) => (r.complex, r.added_faces.len(), None),
            (None, None) => return Err(Error::Parse("no complex or cover given".into())),
        };
        let geometry = match (geom_doc, &cover) {
            (None, _) => None,
            (Some(doc), Some(c)) => Some(geometry_from_value(doc, c.spec.base())?.pullback(c)?),
            (Some(doc), None) => Some(geometry_from_value(doc, &complex)?),
        };
        Ok(Self { complex, cover, geometry, added_faces, sources: paths.to_vec() })
    }
}
