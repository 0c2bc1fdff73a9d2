//! The line-oriented `section.key = value` instance format.
//!
//! ```text
//! # Z^2 + Z/4 with two generators
//! group.rank = 2
//! group.torsion = [4]
//! monoid.generators = [[1,0,1],[1,1,0]]
//! options.window = 6
//! ```

use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::abelian::{GroupElement, GroupSpec};
use crate::monoid::{MonoidKind, MonoidSpec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    /// 1-based; `None` for problems with the file as a whole.
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceError {
    pub source: String,
    pub diagnostics: Vec<Diagnostic>,
}

impl fmt::Display for InstanceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.diagnostics.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}: {d}", self.source)?;
        }
        Ok(())
    }
}

impl std::error::Error for InstanceError {}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InstanceOptions {
    pub window: Option<u32>,
    pub prefix: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub name: String,
    pub group: GroupSpec,
    pub monoid: MonoidSpec,
    pub options: InstanceOptions,
}

/// A bracketed integer literal: `5`, `[1,-2]`, `[[1,0],[0,1]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Literal {
    Int(BigInt),
    List(Vec<Literal>),
}

impl Literal {
    pub fn parse(s: &str) -> Result<Literal, String> {
        let mut p = LitParser { s: s.as_bytes(), i: 0 };
        let lit = p.value()?;
        p.ws();
        if p.i != p.s.len() {
            return Err(format!("unexpected trailing input at column {}", p.i + 1));
        }
        Ok(lit)
    }

    pub fn as_int(&self) -> Result<&BigInt, String> {
        match self {
            Literal::Int(v) => Ok(v),
            Literal::List(_) => Err("expected an integer, found a list".into()),
        }
    }

    pub fn as_ints(&self) -> Result<Vec<BigInt>, String> {
        match self {
            Literal::List(items) => items.iter().map(|i| i.as_int().cloned()).collect(),
            Literal::Int(_) => Err("expected a list of integers".into()),
        }
    }

    pub fn as_int_rows(&self) -> Result<Vec<Vec<BigInt>>, String> {
        match self {
            Literal::List(items) => items.iter().map(Literal::as_ints).collect(),
            Literal::Int(_) => Err("expected a list of integer lists".into()),
        }
    }
}

struct LitParser<'a> {
    s: &'a [u8],
    i: usize,
}

impl LitParser<'_> {
    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn value(&mut self) -> Result<Literal, String> {
        self.ws();
        match self.s.get(self.i) {
            Some(b'[') => {
                self.i += 1;
                let mut items = Vec::new();
                self.ws();
                if self.s.get(self.i) == Some(&b']') {
                    self.i += 1;
                    return Ok(Literal::List(items));
                }
                loop {
                    items.push(self.value()?);
                    self.ws();
                    match self.s.get(self.i) {
                        Some(b',') => self.i += 1,
                        Some(b']') => {
                            self.i += 1;
                            return Ok(Literal::List(items));
                        }
                        _ => return Err(format!("expected ',' or ']' at column {}", self.i + 1)),
                    }
                }
            }
            Some(c) if c.is_ascii_digit() || *c == b'-' || *c == b'+' => {
                let start = self.i;
                self.i += 1;
                while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
                    self.i += 1;
                }
                let text = std::str::from_utf8(&self.s[start..self.i]).expect("ascii");
                text.parse::<BigInt>()
                    .map(Literal::Int)
                    .map_err(|_| format!("bad integer '{text}' at column {}", start + 1))
            }
            Some(_) => Err(format!("unexpected character at column {}", self.i + 1)),
            None => Err("unexpected end of value".into()),
        }
    }
}

/// Parses a vector literal such as `[1,-2,0]`.
pub fn parse_vector(s: &str) -> Result<Vec<BigInt>, String> {
    Literal::parse(s)?.as_ints()
}

const KEYS: [&str; 7] = [
    "group.rank",
    "group.torsion",
    "monoid.kind",
    "monoid.generators",
    "monoid.lex_rank",
    "options.window",
    "options.prefix",
];

#[derive(Default)]
struct Raw {
    entries: Vec<(String, Literal, usize, String)>,
}

impl Raw {
    fn get(&self, key: &str) -> Option<&(String, Literal, usize, String)> {
        self.entries.iter().find(|e| e.0 == key)
    }
}

fn small<T: TryFrom<u64>>(v: &BigInt, what: &str) -> Result<T, String> {
    v.to_u64()
        .and_then(|u| T::try_from(u).ok())
        .ok_or_else(|| format!("{what} must be a small nonnegative integer"))
}

pub fn parse_instance_str(name: &str, text: &str) -> Result<Instance, InstanceError> {
    let mut diags = Vec::new();
    let mut raw = Raw::default();
    for (idx, line) in text.lines().enumerate() {
        let ln = idx + 1;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            diags.push(Diagnostic {
                line: Some(ln),
                message: "expected 'section.key = value'".into(),
            });
            continue;
        };
        let key = key.trim();
        let value = value.trim();
        if !KEYS.contains(&key) {
            diags.push(Diagnostic {
                line: Some(ln),
                message: format!("unknown key '{key}'"),
            });
            continue;
        }
        if raw.get(key).is_some() {
            diags.push(Diagnostic {
                line: Some(ln),
                message: format!("duplicate key '{key}'"),
            });
            continue;
        }
        // `monoid.kind` takes a bare word; everything else is a literal.
        let lit = if key == "monoid.kind" {
            Literal::List(Vec::new())
        } else {
            match Literal::parse(value) {
                Ok(l) => l,
                Err(e) => {
                    diags.push(Diagnostic {
                        line: Some(ln),
                        message: format!("{key}: {e}"),
                    });
                    continue;
                }
            }
        };
        raw.entries.push((key.to_string(), lit, ln, value.to_string()));
    }

    let mut err = |line: Option<usize>, message: String| diags.push(Diagnostic { line, message });

    let rank = match raw.get("group.rank") {
        None => {
            err(None, "missing key 'group.rank'".into());
            None
        }
        Some((_, lit, ln, _)) => match lit.as_int().and_then(|v| small::<usize>(v, "group.rank")) {
            Ok(r) => Some(r),
            Err(e) => {
                err(Some(*ln), e);
                None
            }
        },
    };
    let mut torsion_line = None;
    let torsion = match raw.get("group.torsion") {
        None => Some(Vec::new()),
        Some((_, lit, ln, _)) => {
            torsion_line = Some(*ln);
            match lit.as_ints() {
                Ok(t) if t.iter().any(|d| d < &BigInt::from(2)) => {
                    err(Some(*ln), "torsion entries must be >= 2".into());
                    None
                }
                Ok(t) => Some(t),
                Err(e) => {
                    err(Some(*ln), format!("group.torsion: {e}"));
                    None
                }
            }
        }
    };
    let kind = match raw.get("monoid.kind") {
        None if raw.get("monoid.lex_rank").is_some() => Some(MonoidKind::Lex),
        None => Some(MonoidKind::Generated),
        Some((_, _, ln, v)) => match v.as_str() {
            "generated" => Some(MonoidKind::Generated),
            "lex" => Some(MonoidKind::Lex),
            other => {
                err(Some(*ln), format!("monoid.kind must be 'generated' or 'lex', got '{other}'"));
                None
            }
        },
    };

    let (Some(rank), Some(torsion), Some(kind)) = (rank, torsion, kind) else {
        return Err(InstanceError {
            source: name.to_string(),
            diagnostics: diags,
        });
    };
    let (group, presentation) = match GroupSpec::presented(rank, torsion) {
        Ok(p) => p,
        Err(e) => {
            err(torsion_line, e.to_string());
            return Err(InstanceError {
                source: name.to_string(),
                diagnostics: diags,
            });
        }
    };
    let width = rank + presentation.raw_factors().len();

    let monoid = match kind {
        MonoidKind::Generated => {
            if let Some((_, _, ln, _)) = raw.get("monoid.lex_rank") {
                err(Some(*ln), "monoid.lex_rank is only valid with monoid.kind = lex".into());
            }
            let mut gens: Vec<GroupElement> = Vec::new();
            if let Some((_, lit, ln, _)) = raw.get("monoid.generators") {
                match lit.as_int_rows() {
                    Ok(rows) => {
                        for (i, row) in rows.iter().enumerate() {
                            if row.len() != width {
                                err(
                                    Some(*ln),
                                    format!(
                                        "generator {} has {} coordinates, expected {width}",
                                        i + 1,
                                        row.len()
                                    ),
                                );
                                continue;
                            }
                            match presentation.element(row) {
                                Ok(g) => gens.push(g),
                                Err(e) => err(Some(*ln), e.to_string()),
                            }
                        }
                    }
                    Err(e) => err(Some(*ln), format!("monoid.generators: {e}")),
                }
            }
            MonoidSpec::generated(gens)
        }
        MonoidKind::Lex => {
            if let Some((_, _, ln, _)) = raw.get("monoid.generators") {
                err(Some(*ln), "monoid.generators is not allowed with monoid.kind = lex".into());
            }
            if !group.torsion().is_empty() {
                err(torsion_line, "the lex monoid needs a torsion-free group".into());
            }
            match raw.get("monoid.lex_rank") {
                None => err(None, "missing key 'monoid.lex_rank'".into()),
                Some((_, lit, ln, _)) => match lit.as_int().and_then(|v| small::<usize>(v, "monoid.lex_rank")) {
                    Ok(r) if r == rank && r > 0 => {}
                    Ok(r) => err(Some(*ln), format!("monoid.lex_rank = {r} must equal group.rank = {rank} and be positive")),
                    Err(e) => err(Some(*ln), e),
                },
            }
            MonoidSpec::lex(rank)
        }
    };

    let mut options = InstanceOptions::default();
    if let Some((_, lit, ln, _)) = raw.get("options.window") {
        match lit.as_int().and_then(|v| small::<u32>(v, "options.window")) {
            Ok(w) => options.window = Some(w),
            Err(e) => err(Some(*ln), e),
        }
    }
    if let Some((_, lit, ln, _)) = raw.get("options.prefix") {
        match lit.as_int().and_then(|v| small::<usize>(v, "options.prefix")) {
            Ok(0) => err(Some(*ln), "options.prefix must be at least 1".into()),
            Ok(p) => options.prefix = Some(p),
            Err(e) => err(Some(*ln), e),
        }
    }

    if !diags.is_empty() {
        return Err(InstanceError {
            source: name.to_string(),
            diagnostics: diags,
        });
    }
    Ok(Instance {
        name: name.to_string(),
        group,
        monoid,
        options,
    })
}

pub fn parse_instance(path: &Path) -> Result<Instance, InstanceError> {
    let source = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| InstanceError {
        source: source.clone(),
        diagnostics: vec![Diagnostic {
            line: None,
            message: format!("cannot read file: {e}"),
        }],
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or(source.clone());
    parse_instance_str(&name, &text).map_err(|mut e| {
        e.source = source;
        e
    })
}
