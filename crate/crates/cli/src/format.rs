//! The instance file format: a single JSON document holding a distribution
//! and, optionally, menus and a sequence pair. Rationals travel as strings
//! ("p/q" reduced, or a bare integer) so exact values survive serialization;
//! serialization is canonical (sorted keys, two-space indent, trailing
//! newline), and parsing rejects unknown fields with a path diagnostic.

use std::fmt::Write as _;
use std::str::FromStr;

use buyk::{
    AllocationVector, DiscreteDistribution, Menu, MenuEntry, Rat, SequencePair, ValuationType,
};
use serde_json::{Map, Value};

/// Everything an instance file can carry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceData {
    pub n: usize,
    pub dist: DiscreteDistribution<Rat>,
    pub menus: Vec<Menu<Rat>>,
    pub sequences: Option<SequencePair<Rat>>,
}

pub fn parse_instance(text: &str) -> Result<InstanceData, String> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| format!("line {} column {}: {}", e.line(), e.column(), e))?;
    let object = expect_object(&value, "document")?;
    reject_unknown(object, &["menus", "n", "sequences", "support"], "document")?;

    let n = expect_u64(require(object, "n", "document")?, "n")? as usize;

    let support_value = require(object, "support", "document")?;
    let mut support = Vec::new();
    for (i, item) in expect_array(support_value, "support")?.iter().enumerate() {
        let path = format!("support[{i}]");
        let item_obj = expect_object(item, &path)?;
        reject_unknown(item_obj, &["prob", "values"], &path)?;
        let values = parse_rational_list(
            require(item_obj, "values", &path)?,
            &format!("{path}.values"),
        )?;
        if values.len() != n {
            return Err(format!(
                "{path}.values: expected {n} coordinates, found {}",
                values.len()
            ));
        }
        let prob = parse_rational(require(item_obj, "prob", &path)?, &format!("{path}.prob"))?;
        support.push((ValuationType::new(values), prob));
    }
    let dist = DiscreteDistribution::new(n, support);
    let problems = dist.validate();
    if !problems.is_empty() {
        return Err(format!("support: {}", problems.join("; ")));
    }

    let mut menus = Vec::new();
    if let Some(menus_value) = object.get("menus") {
        for (mi, menu_value) in expect_array(menus_value, "menus")?.iter().enumerate() {
            let mut entries = Vec::new();
            for (ei, entry_value) in
                expect_array(menu_value, &format!("menus[{mi}]"))?.iter().enumerate()
            {
                let path = format!("menus[{mi}][{ei}]");
                let entry_obj = expect_object(entry_value, &path)?;
                reject_unknown(entry_obj, &["alloc", "price"], &path)?;
                let price =
                    parse_rational(require(entry_obj, "price", &path)?, &format!("{path}.price"))?;
                let alloc = parse_rational_list(
                    require(entry_obj, "alloc", &path)?,
                    &format!("{path}.alloc"),
                )?;
                if alloc.len() != n {
                    return Err(format!(
                        "{path}.alloc: expected {n} coordinates, found {}",
                        alloc.len()
                    ));
                }
                entries.push(MenuEntry::new(price, AllocationVector::new(alloc)));
            }
            let menu = Menu::new(n, entries);
            let problems = menu.validate();
            if !problems.is_empty() {
                return Err(format!("menus[{mi}]: {}", problems.join("; ")));
            }
            menus.push(menu);
        }
    }

    let sequences = match object.get("sequences") {
        None => None,
        Some(seq_value) => {
            let seq_obj = expect_object(seq_value, "sequences")?;
            reject_unknown(seq_obj, &["Q", "X"], "sequences")?;
            let xs = parse_vector_list(require(seq_obj, "X", "sequences")?, "sequences.X", n)?
                .into_iter()
                .map(ValuationType::new)
                .collect();
            let qs = parse_vector_list(require(seq_obj, "Q", "sequences")?, "sequences.Q", n)?
                .into_iter()
                .map(AllocationVector::new)
                .collect();
            Some(
                SequencePair::new(n, xs, qs)
                    .map_err(|e| format!("sequences: {e}"))?,
            )
        }
    };

    Ok(InstanceData { n, dist, menus, sequences })
}

pub fn serialize_instance(data: &InstanceData) -> String {
    let mut root = Map::new();
    root.insert("n".into(), Value::from(data.n as u64));
    root.insert(
        "support".into(),
        Value::Array(
            data.dist
                .support
                .iter()
                .map(|(v, p)| {
                    let mut obj = Map::new();
                    obj.insert("prob".into(), Value::String(p.to_string()));
                    obj.insert(
                        "values".into(),
                        Value::Array(
                            v.values.iter().map(|x| Value::String(x.to_string())).collect(),
                        ),
                    );
                    Value::Object(obj)
                })
                .collect(),
        ),
    );
    if !data.menus.is_empty() {
        root.insert(
            "menus".into(),
            Value::Array(
                data.menus
                    .iter()
                    .map(|menu| {
                        Value::Array(
                            menu.entries
                                .iter()
                                .map(|e| {
                                    let mut obj = Map::new();
                                    obj.insert(
                                        "alloc".into(),
                                        Value::Array(
                                            e.allocation
                                                .coords
                                                .iter()
                                                .map(|x| Value::String(x.to_string()))
                                                .collect(),
                                        ),
                                    );
                                    obj.insert(
                                        "price".into(),
                                        Value::String(e.price.to_string()),
                                    );
                                    Value::Object(obj)
                                })
                                .collect(),
                        )
                    })
                    .collect(),
            ),
        );
    }
    if let Some(pair) = &data.sequences {
        let mut seq = Map::new();
        seq.insert(
            "Q".into(),
            Value::Array(
                pair.allocations()
                    .iter()
                    .map(|q| {
                        Value::Array(
                            q.coords.iter().map(|x| Value::String(x.to_string())).collect(),
                        )
                    })
                    .collect(),
            ),
        );
        seq.insert(
            "X".into(),
            Value::Array(
                pair.valuations()
                    .iter()
                    .map(|x| {
                        Value::Array(
                            x.values.iter().map(|v| Value::String(v.to_string())).collect(),
                        )
                    })
                    .collect(),
            ),
        );
        root.insert("sequences".into(), Value::Object(seq));
    }

    let mut out = serde_json::to_string_pretty(&Value::Object(root)).expect("serializable");
    out.push('\n');
    out
}

fn require<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value, String> {
    obj.get(key).ok_or_else(|| format!("{path}: missing field `{key}`"))
}

fn reject_unknown(obj: &Map<String, Value>, allowed: &[&str], path: &str) -> Result<(), String> {
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(format!("{path}: unknown field `{key}`"));
        }
    }
    Ok(())
}

fn expect_object<'a>(value: &'a Value, path: &str) -> Result<&'a Map<String, Value>, String> {
    value.as_object().ok_or_else(|| format!("{path}: expected an object"))
}

fn expect_array<'a>(value: &'a Value, path: &str) -> Result<&'a Vec<Value>, String> {
    value.as_array().ok_or_else(|| format!("{path}: expected an array"))
}

fn expect_u64(value: &Value, path: &str) -> Result<u64, String> {
    value.as_u64().ok_or_else(|| format!("{path}: expected a nonnegative integer"))
}

fn parse_rational(value: &Value, path: &str) -> Result<Rat, String> {
    let text = value
        .as_str()
        .ok_or_else(|| format!("{path}: expected a rational string like \"3/4\""))?;
    Rat::from_str(text).map_err(|_| format!("{path}: malformed rational `{text}`"))
}

fn parse_rational_list(value: &Value, path: &str) -> Result<Vec<Rat>, String> {
    expect_array(value, path)?
        .iter()
        .enumerate()
        .map(|(i, v)| parse_rational(v, &format!("{path}[{i}]")))
        .collect()
}

fn parse_vector_list(value: &Value, path: &str, n: usize) -> Result<Vec<Vec<Rat>>, String> {
    let mut out = Vec::new();
    for (i, row) in expect_array(value, path)?.iter().enumerate() {
        let coords = parse_rational_list(row, &format!("{path}[{i}]"))?;
        if coords.len() != n {
            return Err(format!("{path}[{i}]: expected {n} coordinates, found {}", coords.len()));
        }
        out.push(coords);
    }
    Ok(out)
}

/// Decimal approximation to six significant digits, for display next to the
/// exact value. Uses scientific notation outside a comfortable range.
pub fn approx6(value: &Rat) -> String {
    use num_bigint::BigInt;
    use num_traits::{Signed, Zero};

    if value.is_zero() {
        return "0.00000".into();
    }
    let negative = value.is_negative();
    let mut magnitude = value.abs();
    let one = Rat::from_integer(BigInt::from(1));
    let ten = Rat::from_integer(BigInt::from(10));

    let mut exponent: i32 = 0;
    while magnitude < one {
        magnitude *= ten.clone();
        exponent -= 1;
    }
    while magnitude >= ten {
        magnitude /= ten.clone();
        exponent += 1;
    }
    // magnitude in [1, 10); round to six significant digits.
    let scaled = magnitude * Rat::from_integer(BigInt::from(100_000));
    let half = Rat::new(BigInt::from(1), BigInt::from(2));
    let mut digits = (scaled + half).floor().to_integer();
    if digits == BigInt::from(1_000_000) {
        digits = BigInt::from(100_000);
        exponent += 1;
    }
    let digit_str = digits.to_string();
    debug_assert_eq!(digit_str.len(), 6);

    let sign = if negative { "-" } else { "" };
    let mut out = String::new();
    if (-4..=6).contains(&exponent) {
        if exponent >= 0 {
            let point = exponent as usize + 1;
            write!(out, "{sign}{}.{}", &digit_str[..point], &digit_str[point..]).unwrap();
        } else {
            write!(out, "{sign}0.{}{}", "0".repeat((-exponent - 1) as usize), digit_str).unwrap();
        }
    } else {
        write!(out, "{sign}{}.{}e{}", &digit_str[..1], &digit_str[1..], exponent).unwrap();
    }
    out
}
