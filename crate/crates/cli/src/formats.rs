//! The `cantor-system/1` and `cantor-gaps/1` documents.
//!
//! Both are JSON objects written with one level per line. Reals use the shortest
//! decimal that reads back to the same double, so `load(save(s))` is bit-exact and
//! `save(load(save(s)))` is byte-identical.

use std::fmt::Write as _;
use std::path::Path;

use cantor_core::{BuildMode, CantorSpec, Error, Gap, GapTree, IntervalSystem, Segment};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

pub const SYSTEM_FORMAT: &str = "cantor-system/1";
pub const GAPS_FORMAT: &str = "cantor-gaps/1";

/// What an interval system was built from.
#[derive(Debug, Clone, PartialEq)]
pub enum SystemKind {
    Model { c: f64 },
    Target { spec: CantorSpec, mode: BuildMode },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemDocument {
    pub kind: SystemKind,
    pub system: IntervalSystem,
}

#[derive(Serialize, Deserialize)]
struct ModelParameters {
    c: f64,
}

#[derive(Serialize, Deserialize)]
struct TargetParameters {
    spec: CantorSpec,
    mode: BuildMode,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLevel {
    segments: Vec<[f64; 2]>,
    gaps: Vec<[f64; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    format: String,
    kind: String,
    parameters: Value,
    levels: Vec<RawLevel>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGaps {
    format: String,
    hull: [f64; 2],
    levels: Vec<Vec<[f64; 2]>>,
}

fn json<T: Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data serializes")
}

fn pairs<T: Copy + Into<[f64; 2]>>(items: &[T]) -> String {
    json(&items.iter().map(|&x| x.into()).collect::<Vec<[f64; 2]>>())
}

pub fn save_system(doc: &SystemDocument) -> String {
    let (kind, parameters) = match &doc.kind {
        SystemKind::Model { c } => ("model", json(&ModelParameters { c: *c })),
        SystemKind::Target { spec, mode } => ("target", json(&TargetParameters { spec: spec.clone(), mode: *mode })),
    };
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(out, "  \"format\": {},", json(SYSTEM_FORMAT));
    let _ = writeln!(out, "  \"kind\": {},", json(kind));
    let _ = writeln!(out, "  \"parameters\": {parameters},");
    out.push_str("  \"levels\": [\n");
    let depth = doc.system.depth();
    for n in 0..=depth {
        let segments = doc.system.level(n).expect("level within depth");
        let gaps = doc.system.gaps(n).expect("level within depth");
        let sep = if n < depth { "," } else { "" };
        let _ = writeln!(out, "    {{\"segments\": {}, \"gaps\": {}}}{sep}", pairs(segments), pairs(gaps));
    }
    out.push_str("  ]\n}\n");
    out
}

/// 1-based line of byte offset `pos`.
fn line_of(text: &str, pos: usize) -> usize {
    text[..pos.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

/// Line of the `k`-th occurrence (0-based) of `needle`, or of the last line.
fn line_of_nth(text: &str, needle: &str, k: usize) -> usize {
    match text.match_indices(needle).nth(k) {
        Some((pos, _)) => line_of(text, pos),
        None => line_of(text, text.len()),
    }
}

/// Line of the start of element `k` of the top-level `"levels"` array.
fn line_of_level(text: &str, k: usize) -> usize {
    let Some(start) = text.find("\"levels\"") else {
        return 1;
    };
    let mut depth = 0usize;
    let mut seen = 0usize;
    let mut in_string = false;
    let mut escaped = false;
    for (i, ch) in text[start + "\"levels\"".len()..].char_indices() {
        let pos = start + "\"levels\"".len() + i;
        if in_string {
            match (escaped, ch) {
                (true, _) => escaped = false,
                (false, '\\') => escaped = true,
                (false, '"') => in_string = false,
                _ => {}
            }
            continue;
        }
        match ch {
            '"' => in_string = true,
            '[' | '{' => {
                depth += 1;
                if depth == 2 {
                    if seen == k {
                        return line_of(text, pos);
                    }
                    seen += 1;
                }
            }
            ']' | '}' => {
                if depth <= 1 {
                    break;
                }
                depth -= 1;
            }
            _ => {}
        }
    }
    line_of(text, text.len())
}

fn spec_error(line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Core(Error::Spec(format!("line {line}: {msg}")))
}

fn syntax_error(e: serde_json::Error) -> CliError {
    CliError::Core(Error::Spec(format!("line {}, column {}: {e}", e.line(), e.column())))
}

fn check_format(text: &str, found: &str, expected: &str) -> CliResult<()> {
    if found == expected {
        Ok(())
    } else {
        Err(spec_error(
            line_of_nth(text, "\"format\"", 0),
            format!("unsupported format '{found}', expected '{expected}'"),
        ))
    }
}

pub fn load_system(text: &str) -> CliResult<SystemDocument> {
    let raw: RawSystem = serde_json::from_str(text).map_err(syntax_error)?;
    check_format(text, &raw.format, SYSTEM_FORMAT)?;
    let params_line = line_of_nth(text, "\"parameters\"", 0);
    let kind = match raw.kind.as_str() {
        "model" => {
            let p: ModelParameters = serde_json::from_value(raw.parameters).map_err(|e| spec_error(params_line, e))?;
            SystemKind::Model { c: p.c }
        }
        "target" => {
            let p: TargetParameters = serde_json::from_value(raw.parameters).map_err(|e| spec_error(params_line, e))?;
            p.spec.validate().map_err(|e| spec_error(params_line, e))?;
            SystemKind::Target { spec: p.spec, mode: p.mode }
        }
        other => {
            return Err(spec_error(
                line_of_nth(text, "\"kind\"", 0),
                format!("kind must be 'model' or 'target', got '{other}'"),
            ))
        }
    };
    let mut levels = raw.levels.into_iter().enumerate();
    let Some((_, root)) = levels.next() else {
        return Err(spec_error(line_of_nth(text, "\"levels\"", 0), "a system needs at least level 0"));
    };
    let root_segments: Vec<Segment> = root.segments.into_iter().map(Segment::from).collect();
    if root_segments.len() != 1 || !root.gaps.is_empty() {
        return Err(spec_error(line_of_level(text, 0), "level 0 must hold exactly one segment and no gaps"));
    }
    let mut system =
        IntervalSystem::from_levels(vec![root_segments]).map_err(|e| spec_error(line_of_level(text, 0), e))?;
    for (n, level) in levels {
        system
            .push_level(level.segments.into_iter().map(Segment::from).collect())
            .map_err(|e| spec_error(line_of_level(text, n), e))?;
        let stored: Vec<Gap> = level.gaps.into_iter().map(Gap::from).collect();
        if stored.as_slice() != system.gaps(n).expect("level just pushed") {
            return Err(spec_error(
                line_of_level(text, n),
                format!("gaps of level {n} do not match the gaps between its segments"),
            ));
        }
    }
    if let SystemKind::Target { spec, .. } = &kind {
        if spec.hull != system.hull() {
            return Err(spec_error(line_of_level(text, 0), "level 0 differs from the target hull"));
        }
    }
    Ok(SystemDocument { kind, system })
}

pub fn save_gaps(tree: &GapTree) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(out, "  \"format\": {},", json(GAPS_FORMAT));
    let _ = writeln!(out, "  \"hull\": {},", json(&<[f64; 2]>::from(tree.hull)));
    if tree.levels.is_empty() {
        out.push_str("  \"levels\": []\n}\n");
        return out;
    }
    out.push_str("  \"levels\": [\n");
    for (k, gaps) in tree.levels.iter().enumerate() {
        let sep = if k + 1 < tree.levels.len() { "," } else { "" };
        let _ = writeln!(out, "    {}{sep}", pairs(gaps));
    }
    out.push_str("  ]\n}\n");
    out
}

pub fn load_gaps(text: &str) -> CliResult<GapTree> {
    let raw: RawGaps = serde_json::from_str(text).map_err(syntax_error)?;
    check_format(text, &raw.format, GAPS_FORMAT)?;
    let tree = GapTree {
        hull: Segment::from(raw.hull),
        levels: raw.levels.into_iter().map(|l| l.into_iter().map(Gap::from).collect()).collect(),
    };
    if let Err(e) = tree.validate() {
        let hull_ok = GapTree { hull: tree.hull, levels: Vec::new() }.validate().is_ok();
        if !hull_ok {
            return Err(spec_error(line_of_nth(text, "\"hull\"", 0), e));
        }
        // Validity of a prefix is monotone in its length: find the first bad level.
        let (mut good, mut bad) = (0, tree.levels.len());
        while bad - good > 1 {
            let mid = (good + bad) / 2;
            let prefix = GapTree { hull: tree.hull, levels: tree.levels[..mid].to_vec() };
            if prefix.validate().is_ok() {
                good = mid;
            } else {
                bad = mid;
            }
        }
        return Err(spec_error(line_of_level(text, bad - 1), e));
    }
    Ok(tree)
}

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> CliResult<()> {
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

pub fn read_system(path: &Path) -> CliResult<SystemDocument> {
    load_system(&read_text(path)?).map_err(|e| with_path(path, e))
}

pub fn read_gaps(path: &Path) -> CliResult<GapTree> {
    load_gaps(&read_text(path)?).map_err(|e| with_path(path, e))
}

fn with_path(path: &Path, err: CliError) -> CliError {
    match err {
        CliError::Core(Error::Spec(msg)) => CliError::Core(Error::Spec(format!("{}: {msg}", path.display()))),
        other => other,
    }
}
