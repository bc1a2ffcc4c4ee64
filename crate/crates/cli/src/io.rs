//! CSV ingestion and column specs.

use std::collections::HashMap;
use std::fs::File;
use std::path::{Path, PathBuf};

use bandod::model::{build_sequence, is_null_token, AttrKind, Attribute, Encoder, TupleRecord};
use thiserror::Error;

const MONTHS: [&str; 12] = [
    "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec",
];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] bandod::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Core(bandod::Error::InvalidConfig(_)) => 2,
            CliError::Core(bandod::Error::SizeLimit { .. }) => 4,
            _ => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// `name[:int|dec<N>|text|cat=A|B|month]`; without a kind the column is an
/// integer when every non-null value parses as one, text otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnSpec {
    pub name: String,
    pub kind: Option<AttrKind>,
}

impl ColumnSpec {
    pub fn parse(raw: &str) -> CliResult<ColumnSpec> {
        let (name, kind) = match raw.split_once(':') {
            None => (raw, None),
            Some((name, kind)) => (name, Some(parse_kind(kind)?)),
        };
        let name = name.trim();
        if name.is_empty() {
            return Err(CliError::Usage(format!("empty column name in `{raw}`")));
        }
        Ok(ColumnSpec {
            name: name.to_string(),
            kind,
        })
    }

    pub fn parse_list(raw: &str) -> CliResult<Vec<ColumnSpec>> {
        raw.split(',').map(ColumnSpec::parse).collect()
    }
}

fn parse_kind(kind: &str) -> CliResult<AttrKind> {
    let kind = kind.trim();
    if let Some(list) = kind.strip_prefix("cat=") {
        return Ok(AttrKind::Categorical(
            list.split('|').map(|s| s.trim().to_string()).collect(),
        ));
    }
    if let Some(scale) = kind.strip_prefix("dec") {
        return scale
            .parse()
            .map(AttrKind::Decimal)
            .map_err(|_| CliError::Usage(format!("bad decimal scale in `{kind}`")));
    }
    match kind {
        "int" => Ok(AttrKind::Int),
        "text" => Ok(AttrKind::Text),
        "month" => Ok(AttrKind::Categorical(MONTHS.iter().map(|m| m.to_string()).collect())),
        other => Err(CliError::Usage(format!("unknown column kind `{other}`"))),
    }
}

/// A CSV file held as strings, header excluded.
#[derive(Debug, Clone)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn read(path: &Path) -> CliResult<Table> {
        let file = File::open(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let csv_err = |source| CliError::Csv {
            path: path.to_path_buf(),
            source,
        };
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
        let headers = rdr.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            rows.push(rec.map_err(csv_err)?.iter().map(str::to_string).collect());
        }
        Ok(Table { headers, rows })
    }

    pub fn column(&self, name: &str) -> CliResult<usize> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Data(format!("column `{name}` not found in header")))
    }

    /// Row indices grouped by the value of `column`, groups in order of first appearance.
    pub fn groups(&self, column: Option<&str>) -> CliResult<Vec<(Option<String>, Vec<usize>)>> {
        let Some(column) = column else {
            return Ok(vec![(None, (0..self.rows.len()).collect())]);
        };
        let c = self.column(column)?;
        let mut index: HashMap<&str, usize> = HashMap::new();
        let mut out: Vec<(Option<String>, Vec<usize>)> = Vec::new();
        for (r, row) in self.rows.iter().enumerate() {
            let k = *index.entry(row[c].as_str()).or_insert_with(|| {
                out.push((Some(row[c].clone()), Vec::new()));
                out.len() - 1
            });
            out[k].1.push(r);
        }
        Ok(out)
    }

    fn encoder(&self, specs: &[ColumnSpec]) -> CliResult<(Encoder, Vec<usize>)> {
        let cols: Vec<usize> = specs.iter().map(|s| self.column(&s.name)).collect::<CliResult<_>>()?;
        let projected: Vec<Vec<&str>> = self
            .rows
            .iter()
            .map(|row| cols.iter().map(|&c| row[c].as_str()).collect())
            .collect();
        let attrs = specs
            .iter()
            .zip(&cols)
            .map(|(s, &c)| {
                let kind = s.kind.clone().unwrap_or_else(|| self.infer(c));
                Attribute::new(s.name.clone(), kind)
            })
            .collect();
        Ok((Encoder::fit(attrs, &projected)?, cols))
    }

    fn infer(&self, c: usize) -> AttrKind {
        let all_int = self
            .rows
            .iter()
            .map(|r| r[c].as_str())
            .filter(|v| !is_null_token(v))
            .all(|v| v.trim().parse::<i64>().is_ok());
        if all_int {
            AttrKind::Int
        } else {
            AttrKind::Text
        }
    }
}

/// One sequence: the selected rows sorted by X with Y encoded.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub ys: Vec<Option<i64>>,
    /// 1-based data row of every sorted position.
    pub rows: Vec<usize>,
    /// Leading X component of every sorted position.
    pub xs: Vec<i64>,
    pub ids: Option<Vec<String>>,
}

impl Prepared {
    pub fn row_of(&self, pos: usize) -> usize {
        self.rows[pos - 1]
    }

    pub fn id_of(&self, pos: usize) -> Option<String> {
        self.ids.as_ref().map(|ids| ids[pos - 1].clone())
    }
}

/// Encodes X and Y for every row once; groups are then cut from it.
pub struct Encoded {
    keys: Vec<Vec<i64>>,
    ys: Vec<Option<i64>>,
    ids: Option<Vec<String>>,
}

impl Encoded {
    pub fn new(table: &Table, x: &[ColumnSpec], y: &[ColumnSpec], id: Option<&str>) -> CliResult<Encoded> {
        let (xenc, xcols) = table.encoder(x)?;
        let (yenc, ycols) = table.encoder(y)?;
        let idc = id.map(|name| table.column(name)).transpose()?;
        let mut keys = Vec::with_capacity(table.rows.len());
        let mut ys = Vec::with_capacity(table.rows.len());
        for (r, row) in table.rows.iter().enumerate() {
            let xr: Vec<&str> = xcols.iter().map(|&c| row[c].as_str()).collect();
            let yr: Vec<&str> = ycols.iter().map(|&c| row[c].as_str()).collect();
            keys.push(xenc.encode_key(r + 1, &xr)?);
            ys.push(yenc.encode(r + 1, &yr)?.0);
        }
        let ids = idc.map(|c| table.rows.iter().map(|row| row[c].clone()).collect());
        Ok(Encoded { keys, ys, ids })
    }

    pub fn sequence(&self, rows: &[usize]) -> Prepared {
        let records = rows
            .iter()
            .map(|&r| TupleRecord {
                row_id: r + 1,
                x_key: self.keys[r].clone(),
                y: bandod::OrderedValue(self.ys[r]),
            })
            .collect();
        let seq = build_sequence(records);
        let rows = seq.row_ids();
        Prepared {
            ys: seq.ys(),
            xs: seq.tuples().iter().map(|t| t.x_key[0]).collect(),
            ids: self
                .ids
                .as_ref()
                .map(|ids| rows.iter().map(|&r| ids[r - 1].clone()).collect()),
            rows,
        }
    }
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}
