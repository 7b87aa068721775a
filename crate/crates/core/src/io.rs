//! Set file format and the small text grammars used on the command line.
//!
//! A set file is a JSON document
//! `{"group": [n1, ..., nr], "elements": [[c1, ..., cr], ...]}`.
//! Residues must already be reduced. Groups with a single factor may write
//! elements as bare integers.

use std::path::Path;

use num_rational::Ratio;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::group::{Elem, GroupSpec};
use crate::set::{ElemSet, SetData};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSetFile {
    group: Vec<u32>,
    elements: Vec<RawElem>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawElem {
    Bare(u64),
    Coords(Vec<u64>),
}

/// Parses a set file. Duplicate elements are merged.
pub fn parse_set_file(text: &str) -> Result<ElemSet> {
    let raw: RawSetFile = serde_json::from_str(text).map_err(|e| Error::parse(e.to_string()))?;
    from_raw(raw)
}

/// Same as [`parse_set_file`] for an already-parsed JSON value.
pub fn parse_set_value(value: &serde_json::Value) -> Result<ElemSet> {
    let raw = RawSetFile::deserialize(value).map_err(|e| Error::parse(e.to_string()))?;
    from_raw(raw)
}

fn from_raw(raw: RawSetFile) -> Result<ElemSet> {
    let group = GroupSpec::new(&raw.group)?;
    let mut set = ElemSet::empty(&group);
    for e in raw.elements {
        let index = match e {
            RawElem::Bare(c) if group.rank() == 1 => group.encode(&[c]),
            RawElem::Bare(c) => Err(Error::parse(format!("bare integer {c} is only allowed for single-factor groups"))),
            RawElem::Coords(c) => group.encode(&c),
        }
        .map_err(|e| Error::parse(e.to_string()))?;
        set.insert_index(index);
    }
    Ok(set)
}

pub fn read_set_file(path: &Path) -> Result<ElemSet> {
    let text =
        std::fs::read_to_string(path).map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    parse_set_file(&text)
}

/// Serializes a set; single-factor groups use bare integers.
pub fn format_set_file(set: &ElemSet) -> String {
    set_value(set).to_string()
}

/// The set file document as a JSON value.
pub fn set_value(set: &ElemSet) -> serde_json::Value {
    let data = SetData::from(set);
    let elements: Vec<serde_json::Value> = if data.group.len() == 1 {
        data.elements.iter().map(|c| serde_json::json!(c[0])).collect()
    } else {
        data.elements.iter().map(|c| serde_json::json!(c)).collect()
    };
    serde_json::json!({ "group": data.group, "elements": elements })
}

pub fn write_set_file(path: &Path, set: &ElemSet) -> Result<()> {
    std::fs::write(path, format_set_file(set) + "\n")?;
    Ok(())
}

/// Parses a group presentation such as `16`, `7x3`, `2,2,2`, `[4, 4]` or
/// `Z/7 x Z/3`.
pub fn parse_group_spec(text: &str) -> Result<GroupSpec> {
    let t = text.trim().trim_start_matches('[').trim_end_matches(']');
    if t.is_empty() {
        return Err(Error::parse("empty group description"));
    }
    let mut factors = Vec::new();
    for part in t.split(['x', ',', '*']) {
        let p = part.trim();
        let p = p.strip_prefix("Z/").unwrap_or(p);
        let n: u32 = p.trim().parse().map_err(|_| Error::parse(format!("bad cyclic factor {part:?}")))?;
        factors.push(n);
    }
    GroupSpec::new(&factors).map_err(|e| Error::parse(e.to_string()))
}

/// Parses one element: `5` in a cyclic group, or `(2,1)` / `2,1` as
/// coordinates.
pub fn parse_elem(group: &GroupSpec, text: &str) -> Result<Elem> {
    let t = text.trim().trim_start_matches('(').trim_end_matches(')');
    let coords: Vec<u64> = t
        .split(',')
        .map(|c| c.trim().parse::<u64>().map_err(|_| Error::parse(format!("bad residue {c:?}"))))
        .collect::<Result<_>>()?;
    group.elem_from_coords(&coords).map_err(|e| Error::parse(e.to_string()))
}

/// Parses a list of elements separated by `;` or whitespace, e.g.
/// `(1,0);(0,1)` or `4 8`.
pub fn parse_elem_list(group: &GroupSpec, text: &str) -> Result<Vec<Elem>> {
    text.split(|c: char| c == ';' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| parse_elem(group, s))
        .collect()
}

/// Parses a nonnegative rational: `3`, `4/3`, or a finite decimal `1.25`.
pub fn parse_ratio(text: &str) -> Result<Ratio<u64>> {
    let t = text.trim();
    let bad = || Error::parse(format!("bad rational {text:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n: u64 = n.trim().parse().map_err(|_| bad())?;
        let d: u64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(n, d));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.len() > 12 || frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let den = 10u64.pow(frac.len() as u32);
        let f: u64 = frac.parse().map_err(|_| bad())?;
        let num = int.checked_mul(den).and_then(|v| v.checked_add(f)).ok_or_else(bad)?;
        return Ok(Ratio::new(num, den));
    }
    Ok(Ratio::from_integer(t.parse().map_err(|_| bad())?))
}

/// Parses `7` or an inclusive range `4..12` (also `4..=12`).
pub fn parse_range(text: &str) -> Result<std::ops::RangeInclusive<u32>> {
    let t = text.trim();
    let bad = || Error::parse(format!("bad range {text:?}"));
    match t.split_once("..") {
        Some((a, b)) => {
            let a: u32 = a.trim().parse().map_err(|_| bad())?;
            let b: u32 = b.trim_start_matches('=').trim().parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            Ok(a..=b)
        }
        None => {
            let v: u32 = t.parse().map_err(|_| bad())?;
            Ok(v..=v)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_bare_and_coordinate_elements() {
        let s = parse_set_file(r#"{"group":[16],"elements":[1,2,4,[5]]}"#).unwrap();
        assert_eq!(s.indices().collect::<Vec<_>>(), vec![1, 2, 4, 5]);
        let s = parse_set_file(r#"{"group":[7,3],"elements":[[2,1],[0,0]]}"#).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.contains(&s.group().elem_from_coords(&[2, 1]).unwrap()));
    }

    #[test]
    fn rejects_bad_set_files() {
        assert!(parse_set_file(r#"{"group":[16],"elements":[16]}"#).is_err());
        assert!(parse_set_file(r#"{"group":[7,3],"elements":[1]}"#).is_err());
        assert!(parse_set_file(r#"{"group":[7,3],"elements":[[1,3]]}"#).is_err());
        assert!(parse_set_file(r#"{"group":[7],"elements":[[1,0]]}"#).is_err());
        assert!(parse_set_file(r#"{"group":[0],"elements":[]}"#).is_err());
        assert!(parse_set_file(r#"{"group":[7],"elements":[],"x":1}"#).is_err());
        assert!(parse_set_file("not json").is_err());
    }

    #[test]
    fn empty_group_list_is_trivial() {
        let s = parse_set_file(r#"{"group":[],"elements":[0]}"#).unwrap();
        assert_eq!(s.group().factors(), &[1]);
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn round_trip() {
        let g = GroupSpec::new(&[4, 4]).unwrap();
        let s = ElemSet::from_indices(&g, [0, 5, 15]).unwrap();
        assert_eq!(parse_set_file(&format_set_file(&s)).unwrap(), s);
        let g = GroupSpec::cyclic(32).unwrap();
        let s = ElemSet::from_indices(&g, [3, 31]).unwrap();
        let text = format_set_file(&s);
        assert_eq!(text, r#"{"elements":[3,31],"group":[32]}"#);
        assert_eq!(parse_set_file(&text).unwrap(), s);
    }

    #[test]
    fn group_spec_grammar() {
        assert_eq!(parse_group_spec("16").unwrap().factors(), &[16]);
        assert_eq!(parse_group_spec("7x3").unwrap().factors(), &[7, 3]);
        assert_eq!(parse_group_spec("[2, 2, 2]").unwrap().factors(), &[2, 2, 2]);
        assert_eq!(parse_group_spec("Z/7 x Z/3").unwrap().factors(), &[7, 3]);
        assert!(parse_group_spec("").is_err());
        assert!(parse_group_spec("x").is_err());
        assert!(parse_group_spec("0").is_err());
    }

    #[test]
    fn elem_and_ratio_grammar() {
        let g = GroupSpec::new(&[4, 4]).unwrap();
        assert_eq!(parse_elem(&g, "(1,2)").unwrap().coords(), vec![1, 2]);
        assert_eq!(parse_elem_list(&g, "(1,0);(0,1)").unwrap().len(), 2);
        assert!(parse_elem(&g, "(4,0)").is_err());
        assert_eq!(parse_ratio("4/3").unwrap(), Ratio::new(4, 3));
        assert_eq!(parse_ratio("1.5").unwrap(), Ratio::new(3, 2));
        assert_eq!(parse_ratio("3").unwrap(), Ratio::from_integer(3));
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("-1").is_err());
        assert_eq!(parse_range("4..12").unwrap(), 4..=12);
        assert_eq!(parse_range("5").unwrap(), 5..=5);
        assert!(parse_range("9..4").is_err());
    }
}
