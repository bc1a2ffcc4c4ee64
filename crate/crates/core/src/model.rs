//! Encoded values, the distance function, band order operators and the sorted
//! sequence every algorithm works on.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Direction of a monotonic band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Asc,
    Desc,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Asc => "asc",
            Direction::Desc => "desc",
        }
    }

    pub fn flip(self) -> Direction {
        match self {
            Direction::Asc => Direction::Desc,
            Direction::Desc => Direction::Asc,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which directions a dependency may take: one fixed direction, or either
/// direction chosen per band or per segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Asc,
    Desc,
    Bi,
}

impl Orientation {
    /// Directions to try, in tie-break order (ascending first).
    pub fn directions(self) -> &'static [Direction] {
        match self {
            Orientation::Asc => &[Direction::Asc],
            Orientation::Desc => &[Direction::Desc],
            Orientation::Bi => &[Direction::Asc, Direction::Desc],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Orientation::Asc => "asc",
            Orientation::Desc => "desc",
            Orientation::Bi => "bi",
        }
    }
}

impl From<Direction> for Orientation {
    fn from(d: Direction) -> Self {
        match d {
            Direction::Asc => Orientation::Asc,
            Direction::Desc => Orientation::Desc,
        }
    }
}

impl FromStr for Orientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "asc" => Ok(Orientation::Asc),
            "desc" => Ok(Orientation::Desc),
            "bi" | "bidirectional" => Ok(Orientation::Bi),
            other => Err(Error::InvalidConfig(format!("unknown direction `{other}`"))),
        }
    }
}

/// A totally ordered, integer-encoded scalar that may be null.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct OrderedValue(pub Option<i64>);

impl OrderedValue {
    pub const NULL: OrderedValue = OrderedValue(None);

    pub fn new(encoded: i64) -> Self {
        OrderedValue(Some(encoded))
    }

    pub fn is_null(self) -> bool {
        self.0.is_none()
    }

    pub fn encoded(self) -> Option<i64> {
        self.0
    }
}

impl From<Option<i64>> for OrderedValue {
    fn from(v: Option<i64>) -> Self {
        OrderedValue(v)
    }
}

/// Signed distance `b - a` between two encoded values.
///
/// # Panics
/// Panics if either operand is null; callers apply the null policy first.
pub fn distance(a: OrderedValue, b: OrderedValue) -> i64 {
    match (a.0, b.0) {
        (Some(a), Some(b)) => b - a,
        _ => panic!("distance is undefined for null operands"),
    }
}

/// `t` precedes `s` within the band: for `Asc` the value may drop by at most
/// `delta`, for `Desc` it may rise by at most `delta`. Nulls never violate.
pub fn band_leq(t: OrderedValue, s: OrderedValue, delta: i64, dir: Direction) -> bool {
    if t.is_null() || s.is_null() {
        return true;
    }
    match dir {
        Direction::Asc => distance(t, s) >= -delta,
        Direction::Desc => distance(s, t) >= -delta,
    }
}

/// `t` strictly precedes `s`: `s` lies beyond the band on the far side of `t`.
pub fn band_lt(t: OrderedValue, s: OrderedValue, delta: i64, dir: Direction) -> bool {
    if t.is_null() || s.is_null() {
        return false;
    }
    match dir {
        Direction::Asc => distance(t, s) > delta,
        Direction::Desc => distance(s, t) > delta,
    }
}

/// True for the raw tokens read as null: the empty string and `Null` in any case.
pub fn is_null_token(raw: &str) -> bool {
    let raw = raw.trim();
    raw.is_empty() || raw.eq_ignore_ascii_case("null")
}

/// How the raw text of one attribute maps to integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AttrKind {
    Int,
    /// Fixed-point decimal with the given number of fractional digits.
    Decimal(u32),
    /// Free text ranked in byte-lexicographic order of the observed values.
    Text,
    /// Categories in a declared order.
    Categorical(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub kind: AttrKind,
}

impl Attribute {
    pub fn new(name: impl Into<String>, kind: AttrKind) -> Self {
        Attribute {
            name: name.into(),
            kind,
        }
    }
}

#[derive(Debug, Clone)]
enum Digits {
    Numeric { min: i64, max: i64 },
    Ranked(BTreeMap<String, i64>),
}

impl Digits {
    fn radix(&self) -> i64 {
        match self {
            Digits::Numeric { min, max } => max - min + 1,
            Digits::Ranked(ranks) => ranks.len() as i64,
        }
    }
}

/// Order-preserving encoder for an attribute list.
///
/// A single attribute encodes to its own value (numbers) or 1-based rank
/// (text, categories). Several attributes are linearized mixed-radix with the
/// most significant attribute first.
#[derive(Debug, Clone)]
pub struct Encoder {
    attrs: Vec<Attribute>,
    digits: Vec<Digits>,
}

fn parse_int(raw: &str) -> Option<i64> {
    raw.trim().parse().ok()
}

fn parse_decimal(raw: &str, scale: u32) -> Option<i64> {
    let raw = raw.trim();
    let (neg, body) = match raw.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, raw.strip_prefix('+').unwrap_or(raw)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    if frac_part.len() > scale as usize {
        return None;
    }
    let mut value: i64 = if int_part.is_empty() { 0 } else { int_part.parse().ok()? };
    value = value.checked_mul(10i64.checked_pow(scale)?)?;
    if !frac_part.is_empty() {
        let frac: i64 = frac_part.parse().ok()?;
        let pad = 10i64.pow(scale - frac_part.len() as u32);
        value = value.checked_add(frac * pad)?;
    }
    Some(if neg { -value } else { value })
}

impl Encoder {
    /// Builds the encoder from the raw column values (`rows[r][a]` is row `r`,
    /// attribute `a`). Row numbers in errors are 1-based.
    pub fn fit<S: AsRef<str>>(attrs: Vec<Attribute>, rows: &[Vec<S>]) -> Result<Encoder> {
        let mut digits = Vec::with_capacity(attrs.len());
        for (a, attr) in attrs.iter().enumerate() {
            let d = match &attr.kind {
                AttrKind::Int | AttrKind::Decimal(_) => {
                    let mut min = i64::MAX;
                    let mut max = i64::MIN;
                    for (r, row) in rows.iter().enumerate() {
                        let raw = row[a].as_ref();
                        if is_null_token(raw) {
                            continue;
                        }
                        let v = Self::parse_numeric(attr, raw, r + 1)?;
                        min = min.min(v);
                        max = max.max(v);
                    }
                    if min > max {
                        min = 0;
                        max = 0;
                    }
                    Digits::Numeric { min, max }
                }
                AttrKind::Text => {
                    let mut seen: Vec<&str> = rows
                        .iter()
                        .map(|row| row[a].as_ref())
                        .filter(|raw| !is_null_token(raw))
                        .collect();
                    seen.sort_unstable();
                    seen.dedup();
                    Digits::Ranked(
                        seen.into_iter()
                            .enumerate()
                            .map(|(i, s)| (s.to_string(), i as i64 + 1))
                            .collect(),
                    )
                }
                AttrKind::Categorical(order) => Digits::Ranked(
                    order
                        .iter()
                        .enumerate()
                        .map(|(i, s)| (s.clone(), i as i64 + 1))
                        .collect(),
                ),
            };
            digits.push(d);
        }
        Ok(Encoder { attrs, digits })
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attrs
    }

    fn parse_numeric(attr: &Attribute, raw: &str, row: usize) -> Result<i64> {
        let (parsed, expected) = match attr.kind {
            AttrKind::Decimal(scale) => (parse_decimal(raw, scale), "a fixed-point decimal"),
            _ => (parse_int(raw), "an integer"),
        };
        parsed.ok_or_else(|| Error::Parse {
            row,
            column: attr.name.clone(),
            value: raw.to_string(),
            expected,
        })
    }

    fn digit(&self, a: usize, raw: &str, row: usize, top: bool) -> Result<Option<i64>> {
        if is_null_token(raw) {
            return Ok(None);
        }
        let attr = &self.attrs[a];
        match &self.digits[a] {
            Digits::Numeric { min, .. } => {
                let v = Self::parse_numeric(attr, raw, row)?;
                Ok(Some(if top { v } else { v - min }))
            }
            Digits::Ranked(ranks) => match ranks.get(raw.trim()).or_else(|| ranks.get(raw)) {
                Some(&r) => Ok(Some(r)),
                None => Err(Error::Encoding {
                    row,
                    column: attr.name.clone(),
                    message: format!("`{raw}` is not a declared category"),
                }),
            },
        }
    }

    /// Encodes one attribute list into a single scalar. Any null component
    /// makes the whole value null.
    pub fn encode(&self, row: usize, raw: &[&str]) -> Result<OrderedValue> {
        let mut acc: Option<i64> = None;
        let mut any_null = false;
        for (a, value) in raw.iter().enumerate() {
            let d = self.digit(a, value, row, a == 0)?;
            let Some(d) = d else {
                any_null = true;
                continue;
            };
            acc = Some(match acc {
                None => d,
                Some(hi) => hi
                    .checked_mul(self.digits[a].radix())
                    .and_then(|v| v.checked_add(d))
                    .ok_or_else(|| Error::Encoding {
                        row,
                        column: self.attrs[a].name.clone(),
                        message: "mixed-radix encoding overflows 64 bits".into(),
                    })?,
            });
        }
        Ok(if any_null {
            OrderedValue::NULL
        } else {
            OrderedValue(acc)
        })
    }

    /// Encodes each attribute separately, for lexicographic sort keys.
    /// Nulls sort first.
    pub fn encode_key(&self, row: usize, raw: &[&str]) -> Result<Vec<i64>> {
        raw.iter()
            .enumerate()
            .map(|(a, value)| Ok(self.digit(a, value, row, true)?.unwrap_or(i64::MIN)))
            .collect()
    }
}

/// One source row reduced to its sort key and encoded `Y` value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleRecord {
    pub row_id: usize,
    pub x_key: Vec<i64>,
    pub y: OrderedValue,
}

/// Tuples sorted ascending by `x_key`; ties keep input order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SequenceView {
    tuples: Vec<TupleRecord>,
}

impl SequenceView {
    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuples(&self) -> &[TupleRecord] {
        &self.tuples
    }

    /// 1-based access, `T[i]`.
    pub fn get(&self, i: usize) -> Option<&TupleRecord> {
        i.checked_sub(1).and_then(|i| self.tuples.get(i))
    }

    /// 1-based inclusive range, `T[i, j]`.
    pub fn range(&self, i: usize, j: usize) -> &[TupleRecord] {
        &self.tuples[i - 1..j]
    }

    pub fn ys(&self) -> Vec<Option<i64>> {
        self.tuples.iter().map(|t| t.y.0).collect()
    }

    pub fn row_ids(&self) -> Vec<usize> {
        self.tuples.iter().map(|t| t.row_id).collect()
    }
}

/// Sorts records by `x_key`, keeping input order among equal keys.
pub fn build_sequence(mut records: Vec<TupleRecord>) -> SequenceView {
    records.sort_by(|a, b| a.x_key.cmp(&b.x_key));
    SequenceView { tuples: records }
}

/// A dependency under test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BandOdSpec {
    pub x_columns: Vec<String>,
    pub y_columns: Vec<String>,
    pub orientation: Orientation,
    pub delta: i64,
    pub epsilon: usize,
}

impl BandOdSpec {
    pub fn new(orientation: Orientation, delta: i64, epsilon: usize) -> Result<Self> {
        if delta < 0 {
            return Err(Error::InvalidConfig("band-width must be non-negative".into()));
        }
        Ok(BandOdSpec {
            x_columns: Vec::new(),
            y_columns: Vec::new(),
            orientation,
            delta,
            epsilon,
        })
    }
}
