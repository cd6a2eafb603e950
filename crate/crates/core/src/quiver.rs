//! Quivers, paths and the path algebra over Q(z).
//!
//! Paths read left to right: `a1 a2` means `a1` then `a2`, composable when
//! `t(a1) = s(a2)`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::hash::{DefaultHasher, Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::cyclo::{parse_scalar, CycError, CycScalar, Ctx};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QuiverError {
    #[error("quiver has no vertices")]
    Empty,
    #[error("arrow {arrow}: unknown vertex {vertex}")]
    UnknownVertex { arrow: String, vertex: String },
    #[error("invalid quiver: {0}")]
    Invalid(String),
    #[error("operands live in different quivers")]
    MixedQuiver,
    #[error("schema error at {path}: {msg}")]
    Schema { path: String, msg: String },
    #[error("cannot parse element at position {pos}: {msg}")]
    Element { pos: usize, msg: String },
    #[error(transparent)]
    Scalar(#[from] CycError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowSpec {
    pub id: String,
    pub src: String,
    pub tgt: String,
}

/// Serialized quiver, as read from JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuiverSpec {
    pub vertices: Vec<String>,
    pub arrows: Vec<ArrowSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    NoVertices,
    DuplicateVertex { id: String },
    DuplicateArrow { id: String },
    UnknownVertex { arrow: String, vertex: String },
    Loop { arrow: String },
    Parallel { arrows: Vec<String>, src: String, tgt: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuiverReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

/// Lists every violation of finite / loopless / Schurian / unique-id.
pub fn validate_quiver(spec: &QuiverSpec) -> QuiverReport {
    let mut v = Vec::new();
    if spec.vertices.is_empty() {
        v.push(Violation::NoVertices);
    }
    let mut seen = HashMap::new();
    for id in &spec.vertices {
        if seen.insert(id.as_str(), ()).is_some() {
            v.push(Violation::DuplicateVertex { id: id.clone() });
        }
    }
    let mut aseen = HashMap::new();
    let mut pairs: BTreeMap<(&str, &str), Vec<String>> = BTreeMap::new();
    for a in &spec.arrows {
        if aseen.insert(a.id.as_str(), ()).is_some() {
            v.push(Violation::DuplicateArrow { id: a.id.clone() });
        }
        for end in [&a.src, &a.tgt] {
            if !seen.contains_key(end.as_str()) {
                v.push(Violation::UnknownVertex {
                    arrow: a.id.clone(),
                    vertex: end.clone(),
                });
            }
        }
        if a.src == a.tgt {
            v.push(Violation::Loop { arrow: a.id.clone() });
        }
        pairs
            .entry((a.src.as_str(), a.tgt.as_str()))
            .or_default()
            .push(a.id.clone());
    }
    for ((s, t), ids) in pairs {
        if ids.len() > 1 && s != t {
            v.push(Violation::Parallel {
                arrows: ids,
                src: s.to_string(),
                tgt: t.to_string(),
            });
        }
    }
    QuiverReport {
        valid: v.is_empty(),
        violations: v,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub id: String,
    pub src: usize,
    pub tgt: usize,
}

/// A validated finite, loopless, Schurian quiver.
#[derive(Debug, Clone)]
pub struct Quiver {
    vertices: Vec<String>,
    arrows: Vec<Arrow>,
    vindex: HashMap<String, usize>,
    aindex: HashMap<String, usize>,
    out: Vec<Vec<usize>>,
    pair: HashMap<(usize, usize), usize>,
    key: u64,
}

impl PartialEq for Quiver {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.arrows == other.arrows
    }
}

impl Eq for Quiver {}

impl Quiver {
    pub fn from_spec(spec: &QuiverSpec) -> Result<Quiver, QuiverError> {
        let report = validate_quiver(spec);
        if let Some(first) = report.violations.first() {
            return Err(match first {
                Violation::NoVertices => QuiverError::Empty,
                Violation::UnknownVertex { arrow, vertex } => QuiverError::UnknownVertex {
                    arrow: arrow.clone(),
                    vertex: vertex.clone(),
                },
                other => QuiverError::Invalid(serde_json::to_string(other).unwrap_or_default()),
            });
        }
        let vindex: HashMap<String, usize> = spec
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        let arrows: Vec<Arrow> = spec
            .arrows
            .iter()
            .map(|a| Arrow {
                id: a.id.clone(),
                src: vindex[&a.src],
                tgt: vindex[&a.tgt],
            })
            .collect();
        Ok(Self::assemble(spec.vertices.clone(), arrows))
    }

    /// Build from index data; panics on invalid input (internal use).
    pub fn from_parts(vertices: Vec<String>, arrows: Vec<(String, usize, usize)>) -> Quiver {
        let arrows = arrows
            .into_iter()
            .map(|(id, src, tgt)| Arrow { id, src, tgt })
            .collect();
        let q = Self::assemble(vertices, arrows);
        let report = validate_quiver(&q.to_spec());
        assert!(report.valid, "invalid quiver: {:?}", report.violations);
        q
    }

    fn assemble(vertices: Vec<String>, arrows: Vec<Arrow>) -> Quiver {
        let vindex = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        let aindex = arrows
            .iter()
            .enumerate()
            .map(|(i, a)| (a.id.clone(), i))
            .collect();
        let mut out = vec![Vec::new(); vertices.len()];
        let mut pair = HashMap::new();
        for (i, a) in arrows.iter().enumerate() {
            out[a.src].push(i);
            pair.insert((a.src, a.tgt), i);
        }
        let mut h = DefaultHasher::new();
        vertices.hash(&mut h);
        for a in &arrows {
            (&a.id, a.src, a.tgt).hash(&mut h);
        }
        Quiver {
            vertices,
            arrows,
            vindex,
            aindex,
            out,
            pair,
            key: h.finish(),
        }
    }

    pub fn to_spec(&self) -> QuiverSpec {
        QuiverSpec {
            vertices: self.vertices.clone(),
            arrows: self
                .arrows
                .iter()
                .map(|a| ArrowSpec {
                    id: a.id.clone(),
                    src: self.vertices[a.src].clone(),
                    tgt: self.vertices[a.tgt].clone(),
                })
                .collect(),
        }
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn vertex_id(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_ids(&self) -> &[String] {
        &self.vertices
    }

    pub fn arrow(&self, a: usize) -> &Arrow {
        &self.arrows[a]
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vindex.get(id).copied()
    }

    pub fn arrow_index(&self, id: &str) -> Option<usize> {
        self.aindex.get(id).copied()
    }

    /// The unique arrow s -> t, if present.
    pub fn arrow_between(&self, s: usize, t: usize) -> Option<usize> {
        self.pair.get(&(s, t)).copied()
    }

    pub fn out_arrows(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    /// Same ids with sources and targets swapped.
    pub fn opposite(&self) -> Quiver {
        let arrows = self
            .arrows
            .iter()
            .map(|a| Arrow {
                id: a.id.clone(),
                src: a.tgt,
                tgt: a.src,
            })
            .collect();
        Self::assemble(self.vertices.clone(), arrows)
    }

    /// `e_i` for every vertex, summed.
    pub fn unit(&self, ctx: &Ctx) -> AlgebraElement {
        let mut e = AlgebraElement::zero(self);
        for v in 0..self.num_vertices() {
            e.add_term(Path::trivial(v), CycScalar::one(ctx));
        }
        e
    }

    pub fn path_name(&self, p: &Path) -> String {
        if p.arrows.is_empty() {
            format!("e[{}]", self.vertices[p.src as usize])
        } else {
            p.arrows
                .iter()
                .map(|&a| self.arrows[a as usize].id.as_str())
                .collect::<Vec<_>>()
                .join("*")
        }
    }

    pub fn arrow_path(&self, a: usize) -> Path {
        let ar = &self.arrows[a];
        Path {
            src: ar.src as u32,
            tgt: ar.tgt as u32,
            arrows: vec![a as u32],
        }
    }

    /// Path from an arrow sequence, checking composability.
    pub fn path(&self, arrows: &[usize]) -> Option<Path> {
        let mut p = self.arrow_path(*arrows.first()?);
        for &a in &arrows[1..] {
            p = p.concat(&self.arrow_path(a))?;
        }
        Some(p)
    }

    /// Reverse a path of this quiver into its opposite quiver.
    pub fn reverse_path(&self, p: &Path) -> Path {
        Path {
            src: p.tgt,
            tgt: p.src,
            arrows: p.arrows.iter().rev().copied().collect(),
        }
    }
}

/// A path: trivial `e_v` (no arrows, src = tgt = v) or a composable arrow word.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    src: u32,
    tgt: u32,
    arrows: Vec<u32>,
}

impl Ord for Path {
    /// Length first, then arrow indices, then (for trivial paths) the vertex.
    fn cmp(&self, other: &Self) -> Ordering {
        self.arrows
            .len()
            .cmp(&other.arrows.len())
            .then_with(|| self.arrows.cmp(&other.arrows))
            .then_with(|| self.src.cmp(&other.src))
    }
}

impl PartialOrd for Path {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Path {
    pub fn trivial(v: usize) -> Path {
        Path {
            src: v as u32,
            tgt: v as u32,
            arrows: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn source(&self) -> usize {
        self.src as usize
    }

    pub fn target(&self) -> usize {
        self.tgt as usize
    }

    pub fn arrows(&self) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.arrows.iter().map(|&a| a as usize)
    }

    /// The single arrow of a length-one path.
    pub fn as_arrow(&self) -> Option<usize> {
        (self.arrows.len() == 1).then(|| self.arrows[0] as usize)
    }

    /// Product in the path algebra: concatenation or `None` (zero).
    pub fn concat(&self, other: &Path) -> Option<Path> {
        if self.tgt != other.src {
            return None;
        }
        if self.arrows.is_empty() {
            return Some(other.clone());
        }
        if other.arrows.is_empty() {
            return Some(self.clone());
        }
        let mut arrows = self.arrows.clone();
        arrows.extend_from_slice(&other.arrows);
        Some(Path {
            src: self.src,
            tgt: other.tgt,
            arrows,
        })
    }

    /// Split after the first `k` arrows, 0 < k < len.
    pub fn split_at(&self, q: &Quiver, k: usize) -> (Path, Path) {
        assert!(k > 0 && k < self.len());
        let mid = q.arrows[self.arrows[k - 1] as usize].tgt as u32;
        (
            Path {
                src: self.src,
                tgt: mid,
                arrows: self.arrows[..k].to_vec(),
            },
            Path {
                src: mid,
                tgt: self.tgt,
                arrows: self.arrows[k..].to_vec(),
            },
        )
    }
}

/// All paths of length <= `max_len`, sorted by length then arrow indices.
pub fn enumerate_paths(q: &Quiver, max_len: usize) -> Vec<Path> {
    let mut all: Vec<Path> = (0..q.num_vertices()).map(Path::trivial).collect();
    let mut level: Vec<Path> = (0..q.num_arrows()).map(|a| q.arrow_path(a)).collect();
    let mut len = 1;
    while len <= max_len && !level.is_empty() {
        level.sort();
        all.extend(level.iter().cloned());
        if len == max_len {
            break;
        }
        let mut next = Vec::new();
        for p in &level {
            for &a in q.out_arrows(p.target()) {
                next.push(p.concat(&q.arrow_path(a)).expect("composable"));
            }
        }
        level = next;
        len += 1;
    }
    all
}

/// Sparse linear combination of paths; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraElement {
    key: u64,
    terms: BTreeMap<Path, CycScalar>,
}

impl AlgebraElement {
    pub fn zero(q: &Quiver) -> Self {
        AlgebraElement {
            key: q.key,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_path(q: &Quiver, p: Path, c: CycScalar) -> Self {
        let mut e = Self::zero(q);
        e.add_term(p, c);
        e
    }

    pub fn quiver_key(&self) -> u64 {
        self.key
    }

    pub fn terms(&self) -> &BTreeMap<Path, CycScalar> {
        &self.terms
    }

    pub fn coeff(&self, p: &Path) -> Option<&CycScalar> {
        self.terms.get(p)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Filtration degree: longest path present (0 for the zero element).
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Path::len).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, p: Path, c: CycScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(p) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &AlgebraElement, c: &CycScalar) {
        assert_eq!(self.key, other.key, "{}", QuiverError::MixedQuiver);
        if c.is_zero() {
            return;
        }
        let one = c.is_one();
        for (p, v) in &other.terms {
            self.add_term(p.clone(), if one { v.clone() } else { v * c });
        }
    }

    pub fn add(&self, other: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        let Some((_, c)) = other.terms.iter().next() else {
            return out;
        };
        out.add_scaled(other, &CycScalar::one(c.ctx()));
        out
    }

    pub fn sub(&self, other: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        let Some((_, c)) = other.terms.iter().next() else {
            return out;
        };
        out.add_scaled(other, &-CycScalar::one(c.ctx()));
        out
    }

    pub fn scale(&self, c: &CycScalar) -> AlgebraElement {
        let mut out = AlgebraElement {
            key: self.key,
            terms: BTreeMap::new(),
        };
        out.add_scaled(self, c);
        out
    }

    /// Bilinear extension of concatenation.
    pub fn mul(&self, other: &AlgebraElement) -> Result<AlgebraElement, QuiverError> {
        if self.key != other.key {
            return Err(QuiverError::MixedQuiver);
        }
        let mut out = AlgebraElement {
            key: self.key,
            terms: BTreeMap::new(),
        };
        for (p, a) in &self.terms {
            for (r, b) in &other.terms {
                if let Some(pr) = p.concat(r) {
                    out.add_term(pr, a * b);
                }
            }
        }
        Ok(out)
    }

    /// Re-key an element for another quiver with the same index structure.
    pub fn rekey(self, q: &Quiver) -> AlgebraElement {
        AlgebraElement {
            key: q.key,
            terms: self.terms,
        }
    }

    pub fn map_paths(&self, q: &Quiver, f: impl Fn(&Path) -> Path) -> AlgebraElement {
        let mut out = AlgebraElement::zero(q);
        for (p, c) in &self.terms {
            out.add_term(f(p), c.clone());
        }
        out
    }

    /// Human-readable form in canonical basis order, e.g. `-e[1] - e[2]`.
    pub fn display(&self, q: &Quiver) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (i, (p, c)) in self.terms.iter().enumerate() {
            let name = q.path_name(p);
            let (neg, mag) = split_sign(c);
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if mag.is_one() {
                s.push_str(&name);
            } else if mag.as_rational().is_some() || !mag.to_string().contains(['+', '-', '*']) {
                let _ = write!(s, "{mag}*{name}");
            } else {
                let _ = write!(s, "({mag})*{name}");
            }
        }
        s
    }
}

// Pull a leading minus out of a scalar when that makes printing cleaner.
fn split_sign(c: &CycScalar) -> (bool, CycScalar) {
    use num_traits::Signed;
    let coeffs = c.coeffs();
    let mut nz = coeffs.iter().filter(|x| !num_traits::Zero::is_zero(*x));
    match (nz.next(), nz.next()) {
        (Some(x), None) if x.is_negative() => (true, -c),
        _ => (false, c.clone()),
    }
}

/// Parse `f1*f2 + 1/2*e[v1]`-style expressions; a bare scalar means scalar * 1.
pub fn parse_element(q: &Quiver, ctx: &Ctx, text: &str) -> Result<AlgebraElement, QuiverError> {
    parse_terms(q, ctx, text, false)
}

/// Like [`parse_element`], but a word whose arrows do not compose is an error.
pub fn parse_element_strict(q: &Quiver, ctx: &Ctx, text: &str) -> Result<AlgebraElement, QuiverError> {
    parse_terms(q, ctx, text, true)
}

fn parse_terms(q: &Quiver, ctx: &Ctx, text: &str, strict: bool) -> Result<AlgebraElement, QuiverError> {
    let mut out = AlgebraElement::zero(q);
    for (start, sign, term) in split_terms(text) {
        let (coeff, path) = parse_product(q, ctx, term, start, strict)?;
        let coeff = if sign { -coeff } else { coeff };
        match path {
            Some(p) => out.add_term(p, coeff),
            None => out.add_scaled(&q.unit(ctx), &coeff),
        }
    }
    Ok(out)
}

// Top-level +/- split that respects parentheses and brackets.
fn split_terms(text: &str) -> Vec<(usize, bool, &str)> {
    let b = text.as_bytes();
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let mut neg = false;
    for (i, &c) in b.iter().enumerate() {
        match c {
            b'(' | b'[' => depth += 1,
            b')' | b']' => depth -= 1,
            b'+' | b'-' if depth == 0 => {
                let cur = text[start..i].trim();
                if cur.is_empty() {
                    // unary sign at the start of a term
                    neg ^= c == b'-';
                    start = i + 1;
                } else if !cur.ends_with(['*', '/', '^']) {
                    out.push((start, neg, &text[start..i]));
                    neg = c == b'-';
                    start = i + 1;
                }
            }
            _ => {}
        }
    }
    out.push((start, neg, &text[start..]));
    out
}

fn parse_product(
    q: &Quiver,
    ctx: &Ctx,
    term: &str,
    offset: usize,
    strict: bool,
) -> Result<(CycScalar, Option<Path>), QuiverError> {
    let err = |pos: usize, msg: &str| QuiverError::Element {
        pos: offset + pos,
        msg: msg.to_string(),
    };
    let mut scalar_src = String::new();
    let mut path: Option<Path> = None;
    let mut saw_path = false;
    let b = term.as_bytes();
    let mut i = 0;
    let mut op = b'*';
    while i < b.len() {
        if b[i].is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        // read one factor
        let factor_end = {
            let mut depth = 0;
            let mut j = i;
            while j < b.len() {
                match b[j] {
                    b'(' | b'[' => depth += 1,
                    b')' | b']' => depth -= 1,
                    b'*' | b'/' if depth == 0 => break,
                    _ => {}
                }
                j += 1;
            }
            j
        };
        let factor = term[start..factor_end].trim();
        if factor.is_empty() {
            return Err(err(start, "empty factor"));
        }
        let as_path = if let Some(v) = factor.strip_prefix("e[").and_then(|r| r.strip_suffix(']')) {
            let vi = q
                .vertex_index(v)
                .ok_or_else(|| err(start, &format!("unknown vertex {v}")))?;
            Some(Path::trivial(vi))
        } else {
            q.arrow_index(factor).map(|a| q.arrow_path(a))
        };
        match as_path {
            Some(p) => {
                if op == b'/' {
                    return Err(err(start, "cannot divide by a path"));
                }
                path = match (saw_path, path) {
                    (false, _) => Some(p),
                    (true, Some(prev)) => match prev.concat(&p) {
                        None if strict => return Err(err(start, &format!("{factor} does not compose with the preceding word"))),
                        c => c,
                    },
                    (true, None) => None,
                };
                saw_path = true;
            }
            None => {
                if !scalar_src.is_empty() {
                    scalar_src.push(op as char);
                }
                if op == b'/' && scalar_src.is_empty() {
                    scalar_src.push_str("1/");
                }
                let _ = write!(scalar_src, "({factor})");
                let _ = parse_scalar(ctx, factor).map_err(|e| match e {
                    CycError::Syntax { pos, msg } => err(start + pos, &msg),
                    other => QuiverError::Scalar(other),
                })?;
            }
        }
        i = factor_end;
        if i < b.len() {
            op = b[i];
            i += 1;
        }
    }
    let coeff = if scalar_src.is_empty() {
        CycScalar::one(ctx)
    } else {
        parse_scalar(ctx, &scalar_src)?
    };
    if saw_path {
        match path {
            Some(p) => Ok((coeff, Some(p))),
            // non-composable word: the product is zero
            None => Ok((CycScalar::zero(ctx), Some(Path::trivial(0)))),
        }
    } else {
        Ok((coeff, None))
    }
}

/// Parse a quiver from JSON with field-path diagnostics.
pub fn parse_quiver(json: &str) -> Result<Quiver, QuiverError> {
    let de = &mut serde_json::Deserializer::from_str(json);
    let spec: QuiverSpec = serde_path_to_error::deserialize(de).map_err(|e| QuiverError::Schema {
        path: e.path().to_string(),
        msg: e.inner().to_string(),
    })?;
    Quiver::from_spec(&spec)
}

pub fn serialize_quiver(q: &Quiver) -> String {
    serde_json::to_string_pretty(&q.to_spec()).expect("serializable")
}

const PALETTE: [&str; 8] = [
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5",
];

/// DOT text; `vertex_class` (e.g. orbit index per vertex) colors the nodes.
pub fn export_dot(q: &Quiver, vertex_class: Option<&[usize]>) -> String {
    let mut s = String::from("digraph Q {\n");
    for (i, v) in q.vertices.iter().enumerate() {
        match vertex_class {
            Some(cls) => {
                let _ = writeln!(
                    s,
                    "  \"{v}\" [style=filled, fillcolor=\"{}\", orbit={}];",
                    PALETTE[cls[i] % PALETTE.len()],
                    cls[i]
                );
            }
            None => {
                let _ = writeln!(s, "  \"{v}\";");
            }
        }
    }
    for a in &q.arrows {
        let _ = writeln!(
            s,
            "  \"{}\" -> \"{}\" [label=\"{}\"];",
            q.vertices[a.src], q.vertices[a.tgt], a.id
        );
    }
    s.push_str("}\n");
    s
}
