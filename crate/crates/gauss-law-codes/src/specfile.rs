//! Text formats: code specifications, section tables and error literals.
//!
//! A code specification is a small INI-like file:
//!
//! ```text
//! # Z2 gauge theory on a triangle with one Z2 boson per vertex
//! group = Z2
//! family = bosonic-gl
//!
//! [lattice]
//! geometry = ring 3
//! root = 0
//! tree = bfs
//!
//! [matter]
//! species = 1 finite
//! ```
//!
//! `geometry` is `ring N` or `torus LX LY`; alternatively `vertices = N`
//! with `links = 0>1, 1>2, 2>0`. `tree` is `bfs`, `dfs` or a comma list of
//! tree links. Matter lines are `species = <charge> finite`,
//! `species = <charge> oscillator <cutoff>` or `fermion = <charge>`, where a
//! charge uses the tuple-item form `e` or `e1:e2`.
//!
//! A section file has one line per syndrome,
//! `(q_0,...,q_{N_V-1}) -> (w_0,...,w_{N_L-1})`, optionally followed by
//! `; x=(r_0,...,r_{N_V-1})` with the matter slots of each row joined by `:`.
//!
//! Error literals are space-separated factors: `W[l:e]`, `X[v,s:k]`,
//! `X[v,sb:k]` (antiparticle slot), `Z[v,s:p/q]`, the fermionic `X[v]`,
//! `Y[v]`, `Z[v]`, the dressing `K[l,s:ka:kb]`, or `I` for the identity.

use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::codes::{build_code, build_code_symbolic, CodeError, CodeInstance, Family};
use crate::errors::ErrorOp;
use crate::gauss_map::{Section, SectionRule, Syndrome, SyndromeBase};
use crate::group::{Character, GroupSpec, RationalPhase};
use crate::lattice::Lattice;
use crate::matter::{MatterContent, Species, SpeciesKind};
use crate::qrf::{SpanningTree, TreeStrategy, WilsonLineProduct};

/// A parse failure with a 1-based position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn at(line: usize, column: usize, message: impl fmt::Display) -> Self {
        ParseError { line, column, message: message.to_string() }
    }
}

/// Failure to load a specification: unreadable, unparsable or inconsistent.
#[derive(Debug, Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Code(#[from] CodeError),
}

/// How the lattice was described.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Geometry {
    Ring(usize),
    Torus(usize, usize),
    Explicit { vertices: usize, links: Vec<(usize, usize)> },
}

/// Parsed code specification.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeSpec {
    pub group: GroupSpec,
    pub family: Family,
    pub geometry: Geometry,
    pub lattice: Lattice,
    pub root: usize,
    pub tree: TreeStrategy,
    pub matter: MatterContent,
}

impl CodeSpec {
    /// Spanning tree of the specification.
    pub fn spanning_tree(&self) -> Result<SpanningTree, CodeError> {
        SpanningTree::build(&self.lattice, self.root, &self.tree).map_err(|_| CodeError::TreeMismatch)
    }

    /// Builds the code with dense data.
    pub fn build(&self) -> Result<CodeInstance, CodeError> {
        build_code(&self.lattice, &self.group, &self.spanning_tree()?, &self.matter, self.family)
    }

    /// Builds the code without dense data.
    pub fn build_symbolic(&self) -> Result<CodeInstance, CodeError> {
        build_code_symbolic(&self.lattice, &self.group, &self.spanning_tree()?, &self.matter, self.family)
    }

    /// Same specification with every oscillator cutoff replaced.
    pub fn with_cutoff(&self, cutoff: usize) -> CodeSpec {
        CodeSpec { matter: self.matter.with_cutoff(cutoff), ..self.clone() }
    }
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

/// Column (1-based) of `needle` inside `line`, or 1.
fn column_of(line: &str, needle: &str) -> usize {
    line.find(needle).map_or(1, |c| c + 1)
}

fn parse_usize(s: &str, line: usize, col: usize) -> Result<usize, ParseError> {
    s.trim().parse::<usize>().map_err(|_| ParseError::at(line, col, format!("expected a non-negative integer, found `{}`", s.trim())))
}

/// Parses a code specification.
pub fn parse_code_spec(text: &str) -> Result<CodeSpec, ParseError> {
    let mut group: Option<(GroupSpec, usize)> = None;
    let mut family: Option<Family> = None;
    let mut geometry: Option<(Geometry, usize)> = None;
    let mut vertices: Option<usize> = None;
    let mut explicit_links: Option<Vec<(usize, usize)>> = None;
    let mut root = 0usize;
    let mut tree_text: Option<(String, usize)> = None;
    let mut matter_lines: Vec<(String, String, usize, usize)> = Vec::new();
    let mut section = String::new();

    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = strip_comment(raw);
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| ParseError::at(ln, column_of(raw, "["), "unterminated section header"))?;
            section = name.trim().to_ascii_lowercase();
            if !matches!(section.as_str(), "lattice" | "matter") {
                return Err(ParseError::at(ln, column_of(raw, "[") + 1, format!("unknown section `{name}`")));
            }
            continue;
        }
        let (key, value) = trimmed
            .split_once('=')
            .ok_or_else(|| ParseError::at(ln, column_of(raw, trimmed), "expected `key = value`"))?;
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim();
        let eq = column_of(raw, "=");
        let vcol = if value.is_empty() { eq + 1 } else { eq + raw[eq..].find(value).map_or(1, |c| c + 1) };
        match (section.as_str(), key.as_str()) {
            ("", "group") => {
                let g: GroupSpec = value.parse().map_err(|e| ParseError::at(ln, vcol, e))?;
                group = Some((g, ln));
            }
            ("", "family") => {
                family = Some(Family::parse(value).ok_or_else(|| ParseError::at(ln, vcol, format!("unknown family `{value}`")))?);
            }
            ("lattice", "geometry") => {
                let parts: Vec<&str> = value.split_whitespace().collect();
                let g = match parts.as_slice() {
                    ["ring", n] => Geometry::Ring(parse_usize(n, ln, vcol)?),
                    ["torus", a, b] => Geometry::Torus(parse_usize(a, ln, vcol)?, parse_usize(b, ln, vcol)?),
                    _ => return Err(ParseError::at(ln, vcol, format!("unknown geometry `{value}`"))),
                };
                geometry = Some((g, ln));
            }
            ("lattice", "vertices") => vertices = Some(parse_usize(value, ln, vcol)?),
            ("lattice", "links") => {
                let mut links = Vec::new();
                for item in value.split(',') {
                    let (a, b) = item
                        .split_once('>')
                        .ok_or_else(|| ParseError::at(ln, column_of(raw, item.trim()), "links are written `tail>head`"))?;
                    let col = column_of(raw, item.trim());
                    links.push((parse_usize(a, ln, col)?, parse_usize(b, ln, col)?));
                }
                explicit_links = Some(links);
            }
            ("lattice", "root") => root = parse_usize(value, ln, vcol)?,
            ("lattice", "tree") => tree_text = Some((value.to_string(), ln)),
            ("matter", "species" | "fermion") => matter_lines.push((key.clone(), value.to_string(), ln, vcol)),
            _ => return Err(ParseError::at(ln, column_of(raw, key.as_str()), format!("unknown key `{key}`"))),
        }
    }

    let (group, _) = group.ok_or_else(|| ParseError::at(1, 1, "missing `group`"))?;
    let family = family.ok_or_else(|| ParseError::at(1, 1, "missing `family`"))?;
    let (geometry, geo_line) = match (geometry, vertices, explicit_links) {
        (Some(g), None, None) => g,
        (None, Some(n), Some(links)) => (Geometry::Explicit { vertices: n, links }, 1),
        _ => return Err(ParseError::at(1, 1, "give either `geometry` or both `vertices` and `links`")),
    };
    let lattice = match &geometry {
        Geometry::Ring(n) => Lattice::ring(*n),
        Geometry::Torus(a, b) => Lattice::torus_square(*a, *b),
        Geometry::Explicit { vertices, links } => Lattice::new("explicit", *vertices, links.clone()),
    }
    .map_err(|e| ParseError::at(geo_line, 1, e))?;
    let tree = match tree_text {
        None => TreeStrategy::Bfs,
        Some((t, ln)) => match t.to_ascii_lowercase().as_str() {
            "bfs" => TreeStrategy::Bfs,
            "dfs" => TreeStrategy::Dfs,
            _ => TreeStrategy::Explicit(
                t.split(',').map(|s| parse_usize(s, ln, 1)).collect::<Result<Vec<_>, _>>()?,
            ),
        },
    };

    let mut species = Vec::new();
    let mut fermion: Option<Character> = None;
    for (key, value, ln, col) in matter_lines {
        let parts: Vec<&str> = value.split_whitespace().collect();
        let charge_text = parts.first().ok_or_else(|| ParseError::at(ln, col, "missing charge"))?;
        let charge = group.parse_character(charge_text).map_err(|e| ParseError::at(ln, col, e))?;
        if key == "fermion" {
            if parts.len() != 1 || fermion.is_some() {
                return Err(ParseError::at(ln, col, "expected exactly one `fermion = <charge>` line"));
            }
            fermion = Some(charge);
            continue;
        }
        let sp = match &parts[1..] {
            ["finite"] => Species::finite(charge),
            ["oscillator", c] => Species::oscillator(charge, parse_usize(c, ln, col)?),
            ["oscillator"] => Species::oscillator(charge, crate::matter::DEFAULT_CUTOFF),
            _ => return Err(ParseError::at(ln, col, format!("unknown species kind in `{value}`"))),
        };
        species.push(sp);
    }
    let matter = match (species.is_empty(), fermion) {
        (true, None) => MatterContent::None,
        (false, None) => MatterContent::bosonic(&group, species).map_err(|e| ParseError::at(1, 1, e))?,
        (true, Some(chi)) => MatterContent::fermionic(&lattice, chi).map_err(|e| ParseError::at(1, 1, e))?,
        (false, Some(_)) => return Err(ParseError::at(1, 1, "bosonic and fermionic matter cannot be mixed")),
    };
    Ok(CodeSpec { group, family, geometry, lattice, root, tree, matter })
}

/// Reads and parses a specification file.
pub fn load_code_spec(path: &Path) -> Result<CodeSpec, SpecError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| SpecError::Io { path: path.display().to_string(), source })?;
    Ok(parse_code_spec(&text)?)
}

fn parse_tuple(s: &str, line: usize, col: usize) -> Result<Vec<&str>, ParseError> {
    let inner = s
        .trim()
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| ParseError::at(line, col, format!("expected a tuple `(...)`, found `{}`", s.trim())))?;
    Ok(inner.split(',').map(str::trim).collect())
}

/// Parses a section table against a syndrome base. Keys are checked by
/// [`crate::gauss_map::make_section`] when the table is turned into a section.
pub fn parse_section_table(text: &str, base: &SyndromeBase) -> Result<SectionRule, ParseError> {
    let g = &base.group;
    let nv = base.lattice.num_vertices();
    let nl = base.lattice.num_links();
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = strip_comment(raw);
        if line.trim().is_empty() {
            continue;
        }
        let (lhs, rest) = line
            .split_once("->")
            .ok_or_else(|| ParseError::at(ln, 1, "expected `(syndrome) -> (links)`"))?;
        let (rhs, x_part) = match rest.split_once(';') {
            Some((a, b)) => (a, Some(b)),
            None => (rest, None),
        };
        let lcol = column_of(raw, lhs.trim());
        let rcol = column_of(raw, rhs.trim());
        let q = parse_tuple(lhs, ln, lcol)?;
        if q.len() != nv {
            return Err(ParseError::at(ln, lcol, format!("syndrome has {} entries for {nv} vertices", q.len())));
        }
        let charges = q
            .iter()
            .map(|c| g.parse_character(c).map_err(|e| ParseError::at(ln, lcol, e)))
            .collect::<Result<Vec<_>, _>>()?;
        let w = parse_tuple(rhs, ln, rcol)?;
        if w.len() != nl {
            return Err(ParseError::at(ln, rcol, format!("representative has {} entries for {nl} links", w.len())));
        }
        let links = w
            .iter()
            .map(|c| g.parse_character(c).map_err(|e| ParseError::at(ln, rcol, e)))
            .collect::<Result<Vec<_>, _>>()?;
        let x = match x_part {
            None => None,
            Some(xp) => {
                let xcol = column_of(raw, xp.trim());
                let body = xp
                    .trim()
                    .strip_prefix("x=")
                    .ok_or_else(|| ParseError::at(ln, xcol, "matter data is written `x=(...)`"))?;
                let rows_txt = parse_tuple(body, ln, xcol)?;
                if rows_txt.len() != nv {
                    return Err(ParseError::at(ln, xcol, format!("matter data has {} rows for {nv} vertices", rows_txt.len())));
                }
                Some(
                    rows_txt
                        .iter()
                        .map(|r| {
                            r.split(':')
                                .map(|v| v.trim().parse::<i64>().map_err(|_| ParseError::at(ln, xcol, format!("bad shift `{v}`"))))
                                .collect::<Result<Vec<_>, _>>()
                        })
                        .collect::<Result<Vec<_>, _>>()?,
                )
            }
        };
        rows.push((Syndrome::new(charges, base.scope()), WilsonLineProduct::from_characters(links), x));
    }
    Ok(SectionRule::ExplicitTable(rows))
}

/// Writes a section in the format read by [`parse_section_table`].
pub fn format_section(sec: &Section) -> String {
    let mut out = String::new();
    for e in sec.entries() {
        out.push_str(&format!("{} -> {}", e.syndrome.to_tuple(), e.links.to_tuple()));
        if let Some(x) = &e.matter_x {
            let rows: Vec<String> =
                x.iter().map(|r| r.iter().map(i64::to_string).collect::<Vec<_>>().join(":")).collect();
            out.push_str(&format!(" ; x=({})", rows.join(",")));
        }
        out.push('\n');
    }
    out
}

/// Slot index of species `s` (antiparticle slot when `bar`).
fn slot_index(code: &CodeInstance, s: usize, bar: bool) -> Option<usize> {
    let species = code.species();
    let sp = species.get(s)?;
    let base: usize = species[..s].iter().map(Species::slots).sum();
    match (bar, sp.kind) {
        (false, _) => Some(base),
        (true, SpeciesKind::OscillatorPair { .. }) => Some(base + 1),
        (true, SpeciesKind::FiniteOrder) => None,
    }
}

/// Parses an error literal for `code`. `line` is used in error positions.
pub fn parse_error_literal(text: &str, code: &CodeInstance, label: &str, line: usize) -> Result<ErrorOp, ParseError> {
    let g = &code.group;
    let nv = code.lattice.num_vertices();
    let nl = code.lattice.num_links();
    let fermionic = matches!(code.matter, MatterContent::Fermionic { .. });
    let mut e = ErrorOp::identity(code);
    e.label = label.to_string();
    let mut offset = 0usize;
    for token in text.split_whitespace() {
        let col = text[offset..].find(token).map_or(1, |p| offset + p + 1);
        offset = col - 1 + token.len();
        let err = |m: String| ParseError::at(line, col, m);
        if token == "I" {
            continue;
        }
        let (kind, body) = token
            .split_once('[')
            .and_then(|(k, b)| b.strip_suffix(']').map(|b| (k, b)))
            .ok_or_else(|| err(format!("malformed factor `{token}`")))?;
        let int = |s: &str| s.trim().parse::<usize>().map_err(|_| err(format!("bad index `{s}` in `{token}`")));
        match kind {
            "W" => {
                let (l, chi) = body.split_once(':').ok_or_else(|| err(format!("expected `W[l:e]`, found `{token}`")))?;
                let l = int(l)?;
                if l >= nl {
                    return Err(err(format!("link {l} out of range")));
                }
                let chi = g.parse_character(chi).map_err(|x| err(x.to_string()))?;
                let cur = e.links.get(l).clone();
                e.links.set(l, g.mul(&cur, &chi));
            }
            "K" => {
                let parts: Vec<&str> = body.split(&[',', ':'][..]).collect();
                let [l, s, ka, kb] = parts.as_slice() else {
                    return Err(err(format!("expected `K[l,s:ka:kb]`, found `{token}`")));
                };
                let (l, s) = (int(l)?, int(s)?);
                let species = code.species();
                if l >= nl || s >= species.len() {
                    return Err(err(format!("link or species out of range in `{token}`")));
                }
                let (ka, kb) = (int(ka)? as u64, int(kb)? as u64);
                let k = e.vacuum_k.get_or_insert_with(|| vec![vec![(0, 0); species.len()]; nl]);
                k[l][s] = (k[l][s].0 + ka, k[l][s].1 + kb);
                let flux = g.pow(&species[s].charge, ka as i64 - kb as i64);
                let cur = e.links.get(l).clone();
                e.links.set(l, g.mul(&cur, &flux));
            }
            "X" | "Y" | "Z" if fermionic && !body.contains(',') => {
                let v = int(body)?;
                if v >= nv {
                    return Err(err(format!("vertex {v} out of range")));
                }
                let half = RationalPhase::new(1, 2);
                match kind {
                    "X" => e.matter_x[v][0] = (e.matter_x[v][0] + 1) % 2,
                    "Y" => {
                        e.matter_x[v][0] = (e.matter_x[v][0] + 1) % 2;
                        e.matter_z[v][0] = e.matter_z[v][0] + half;
                    }
                    _ => e.matter_z[v][0] = e.matter_z[v][0] + half,
                }
            }
            "X" | "Z" => {
                let (vs, val) = body.split_once(':').ok_or_else(|| err(format!("expected `{kind}[v,s:value]`")))?;
                let (v, s) = vs.split_once(',').ok_or_else(|| err(format!("expected `{kind}[v,s:value]`")))?;
                let v = int(v)?;
                let (s, bar) = match s.trim().strip_suffix('b') {
                    Some(n) => (int(n)?, true),
                    None => (int(s)?, false),
                };
                if v >= nv {
                    return Err(err(format!("vertex {v} out of range")));
                }
                let slot = slot_index(code, s, bar).ok_or_else(|| err(format!("no such matter slot in `{token}`")))?;
                if kind == "X" {
                    let k: i64 = val.trim().parse().map_err(|_| err(format!("bad shift `{val}`")))?;
                    e.matter_x[v][slot] += k;
                } else {
                    let (p, q) = val.split_once('/').unwrap_or((val, "1"));
                    let p: i64 = p.trim().parse().map_err(|_| err(format!("bad phase `{val}`")))?;
                    let q: u64 = q.trim().parse().map_err(|_| err(format!("bad phase `{val}`")))?;
                    if q == 0 {
                        return Err(err("phase denominator is zero".into()));
                    }
                    e.matter_z[v][slot] = e.matter_z[v][slot] + RationalPhase::new(p, q);
                }
            }
            _ => return Err(err(format!("unknown factor `{token}`"))),
        }
    }
    Ok(e)
}

/// Parses an errors file: one error per line, optionally `label: literal`.
pub fn parse_errors_file(text: &str, code: &CodeInstance) -> Result<Vec<ErrorOp>, ParseError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        if line.trim().is_empty() {
            continue;
        }
        let (label, literal) = match line.split_once(':') {
            Some((l, rest)) if !l.contains('[') => (l.trim().to_string(), rest),
            _ => (line.trim().to_string(), line),
        };
        out.push(parse_error_literal(literal, code, &label, i + 1)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const PURE: &str = "group = Z2\nfamily = pure-gauge-gl\n[lattice]\ngeometry = ring 3\n";

    #[test]
    fn parses_pure_spec() {
        let spec = parse_code_spec(PURE).unwrap();
        assert_eq!(spec.lattice.num_links(), 3);
        assert_eq!(spec.family, Family::PureGaugeGL);
        assert!(spec.build().is_ok());
    }

    #[test]
    fn rejects_z1_with_position() {
        let err = parse_code_spec("group = Z1\nfamily = pure-gauge-gl\n").unwrap_err();
        assert_eq!((err.line, err.column), (1, 9));
    }

    #[test]
    fn error_literals() {
        let code = parse_code_spec(PURE).unwrap().build().unwrap();
        let e = parse_error_literal("W[0:1] W[2:1]", &code, "e", 1).unwrap();
        assert_eq!(e.links.to_tuple(), "(1,0,1)");
        let err = parse_error_literal("W[0:1] Q[1]", &code, "e", 4).unwrap_err();
        assert_eq!((err.line, err.column), (4, 8));
    }

    #[test]
    fn section_round_trip() {
        let code = parse_code_spec(PURE).unwrap().build().unwrap();
        let base = code.syndrome_base();
        let sec = crate::gauss_map::make_section(&base, &SectionRule::TreeFrameField, "frame").unwrap();
        let text = format_section(&sec);
        let again = crate::gauss_map::make_section(&base, &parse_section_table(&text, &base).unwrap(), "file").unwrap();
        assert_eq!(format_section(&again), text);
    }
}
