//! Resource characterization: per op type, the voltage levels a functional
//! unit can run at, each with its cycle count and per-cycle power figures.

use std::collections::HashMap;

use crate::dfg::{Dfg, OpType};
use crate::error::LibraryError;

/// The bundled default library (illustrative power numbers).
pub const DEFAULT_LIBRARY: &str = include_str!("../../../benchmarks/default.lib");

#[derive(Clone, Debug, PartialEq)]
pub struct VoltageLevel {
    pub vdd: f64,
    pub cycles: u32,
    /// Dynamic power per active cycle, mW.
    pub pdyn: f64,
    /// Leakage power per powered cycle, mW.
    pub plk: f64,
    /// Overhead charged per Vdd switch, mW.
    pub psw: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TypeEntry {
    pub op: OpType,
    /// Fastest (highest-Vdd) level first.
    pub levels: Vec<VoltageLevel>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResourceLibrary {
    types: Vec<TypeEntry>,
    index: HashMap<OpType, usize>,
}

impl ResourceLibrary {
    pub fn new(types: Vec<TypeEntry>) -> Result<Self, LibraryError> {
        let mut index = HashMap::new();
        for (i, t) in types.iter().enumerate() {
            if index.insert(t.op.clone(), i).is_some() {
                return Err(LibraryError::DuplicateType(t.op.to_string()));
            }
            validate_levels(t)?;
        }
        Ok(ResourceLibrary { types, index })
    }

    pub fn parse(text: &str) -> Result<Self, LibraryError> {
        parse_library(text)
    }

    pub fn default_library() -> Self {
        Self::parse(DEFAULT_LIBRARY).expect("bundled library is valid")
    }

    /// Types in declaration order.
    pub fn types(&self) -> &[TypeEntry] {
        &self.types
    }

    pub fn type_index(&self, op: &OpType) -> Option<usize> {
        self.index.get(op).copied()
    }

    pub fn entry(&self, op: &OpType) -> Option<&TypeEntry> {
        self.type_index(op).map(|i| &self.types[i])
    }

    pub fn levels(&self, type_idx: usize) -> &[VoltageLevel] {
        &self.types[type_idx].levels
    }

    /// The level whose cycle count equals `duration`.
    pub fn level_for(&self, type_idx: usize, duration: u32) -> Option<usize> {
        self.types[type_idx].levels.iter().position(|l| l.cycles == duration)
    }

    /// Fails with the first op type of `g` that the library does not characterize.
    pub fn check_covers(&self, g: &Dfg) -> Result<(), LibraryError> {
        for n in g.nodes() {
            if !self.index.contains_key(&n.op) {
                return Err(LibraryError::MissingOpType(n.op.to_string()));
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# power unit: mW\n");
        for t in &self.types {
            out.push_str(&format!("type {}\n", t.op));
            for l in &t.levels {
                out.push_str(&format!(
                    "level vdd={} cycles={} pdyn={} plk={} psw={}\n",
                    l.vdd, l.cycles, l.pdyn, l.plk, l.psw
                ));
            }
        }
        out
    }
}

fn validate_levels(t: &TypeEntry) -> Result<(), LibraryError> {
    let op = t.op.to_string();
    if t.levels.is_empty() {
        return Err(LibraryError::NoLevels(op));
    }
    for l in &t.levels {
        for (field, value) in [("pdyn", l.pdyn), ("plk", l.plk), ("psw", l.psw)] {
            if value < 0.0 || value.is_nan() {
                return Err(LibraryError::NegativePower { op, field, value });
            }
        }
        if l.cycles == 0 {
            return Err(LibraryError::LevelOrder { op, reason: "cycles must be at least 1".into() });
        }
    }
    for (i, a) in t.levels.iter().enumerate() {
        if t.levels[i + 1..].iter().any(|b| b.cycles == a.cycles) {
            return Err(LibraryError::DuplicateCycles { op, cycles: a.cycles });
        }
    }
    if t.levels[0].cycles != 1 {
        return Err(LibraryError::LevelOrder {
            op,
            reason: format!("fastest level must take 1 cycle, got {}", t.levels[0].cycles),
        });
    }
    for w in t.levels.windows(2) {
        let (fast, slow) = (&w[0], &w[1]);
        let reason = if slow.vdd >= fast.vdd {
            Some(format!("vdd {} follows {}", slow.vdd, fast.vdd))
        } else if slow.cycles <= fast.cycles {
            Some(format!("{} cycles follows {}", slow.cycles, fast.cycles))
        } else if slow.pdyn >= fast.pdyn {
            Some(format!("pdyn {} follows {}", slow.pdyn, fast.pdyn))
        } else {
            None
        };
        if let Some(reason) = reason {
            return Err(LibraryError::LevelOrder { op, reason });
        }
    }
    Ok(())
}

fn parse_library(text: &str) -> Result<ResourceLibrary, LibraryError> {
    let syntax = |line: usize, message: String| LibraryError::Syntax { line, message };
    let mut types: Vec<TypeEntry> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = line.split_whitespace().collect();
        let Some(&kw) = toks.first() else { continue };
        match kw {
            "type" => {
                if toks.len() != 2 {
                    return Err(syntax(line_no, "expected `type <optype>`".into()));
                }
                types.push(TypeEntry { op: OpType::new(toks[1]), levels: Vec::new() });
            }
            "level" => {
                let Some(current) = types.last_mut() else {
                    return Err(syntax(line_no, "`level` before any `type`".into()));
                };
                let mut fields: HashMap<&str, &str> = HashMap::new();
                for kv in &toks[1..] {
                    let (k, v) =
                        kv.split_once('=').ok_or_else(|| syntax(line_no, format!("expected key=value, got `{kv}`")))?;
                    if fields.insert(k, v).is_some() {
                        return Err(syntax(line_no, format!("duplicate key `{k}`")));
                    }
                }
                let float = |key: &str| -> Result<f64, LibraryError> {
                    let v = fields.get(key).ok_or_else(|| syntax(line_no, format!("missing `{key}`")))?;
                    v.parse().map_err(|_| syntax(line_no, format!("invalid {key} `{v}`")))
                };
                let cycles_raw = fields.get("cycles").ok_or_else(|| syntax(line_no, "missing `cycles`".into()))?;
                let cycles: u32 =
                    cycles_raw.parse().map_err(|_| syntax(line_no, format!("invalid cycles `{cycles_raw}`")))?;
                let level = VoltageLevel {
                    vdd: float("vdd")?,
                    cycles,
                    pdyn: float("pdyn")?,
                    plk: float("plk")?,
                    psw: float("psw")?,
                };
                if let Some(extra) = fields.keys().find(|k| !["vdd", "cycles", "pdyn", "plk", "psw"].contains(k)) {
                    return Err(syntax(line_no, format!("unknown key `{extra}`")));
                }
                current.levels.push(level);
            }
            other => return Err(syntax(line_no, format!("unknown stanza `{other}`"))),
        }
    }
    ResourceLibrary::new(types)
}
