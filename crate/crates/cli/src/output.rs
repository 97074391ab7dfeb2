use std::io::Write;

use clap::ValueEnum;
use serde_json::{Map, Value as Json};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            // 17 significant digits round-trip every f64.
            Cell::Float(v) if v.is_nan() => "NaN".to_string(),
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(v) => v.clone(),
        }
    }

    fn json(&self) -> Json {
        match self {
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(Json::Null, Json::Number),
            Cell::Int(v) => Json::from(*v),
            Cell::Bool(v) => Json::from(*v),
            Cell::Text(v) => Json::from(v.as_str()),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Run metadata written ahead of the data.
#[derive(Debug, Clone)]
pub struct Meta {
    pub command: &'static str,
    pub seed: Option<u64>,
    pub parameters: Vec<(String, String)>,
    pub notes: Vec<(String, String)>,
}

impl Meta {
    pub fn new(command: &'static str, seed: Option<u64>) -> Self {
        Self {
            command,
            seed,
            parameters: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.parameters.push((key.to_string(), value.to_string()));
        self
    }

    pub fn note(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.notes.push((key.to_string(), value.to_string()));
        self
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: ToString>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

pub fn join<T: ToString>(values: &[T]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn write(
    out: &mut dyn Write,
    meta: &Meta,
    table: &Table,
    format: Format,
) -> std::io::Result<()> {
    match format {
        Format::Csv => write_csv(out, meta, table),
        Format::Json => write_json(out, meta, table),
    }
}

fn write_csv(out: &mut dyn Write, meta: &Meta, table: &Table) -> std::io::Result<()> {
    writeln!(out, "# command: {}", meta.command)?;
    writeln!(out, "# version: {}", driftcorrect_core::VERSION)?;
    match meta.seed {
        Some(seed) => writeln!(out, "# seed: {seed}")?,
        None => writeln!(out, "# seed: none")?,
    }
    for (k, v) in &meta.parameters {
        writeln!(out, "# param {k}: {v}")?;
    }
    for (k, v) in &meta.notes {
        writeln!(out, "# {k}: {v}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::csv))?;
    }
    w.flush()
}

fn write_json(out: &mut dyn Write, meta: &Meta, table: &Table) -> std::io::Result<()> {
    let pairs = |items: &[(String, String)]| {
        items
            .iter()
            .map(|(k, v)| (k.clone(), Json::from(v.as_str())))
            .collect::<Map<_, _>>()
    };
    let mut m = Map::new();
    m.insert("command".into(), meta.command.into());
    m.insert("version".into(), driftcorrect_core::VERSION.into());
    m.insert("seed".into(), meta.seed.map_or(Json::Null, Json::from));
    m.insert("parameters".into(), Json::Object(pairs(&meta.parameters)));
    m.insert("notes".into(), Json::Object(pairs(&meta.notes)));

    let data: Vec<Json> = table
        .rows
        .iter()
        .map(|row| {
            Json::Object(
                table
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.clone(), v.json()))
                    .collect(),
            )
        })
        .collect();

    let mut doc = Map::new();
    doc.insert("meta".into(), Json::Object(m));
    doc.insert("data".into(), Json::Array(data));
    serde_json::to_writer_pretty(&mut *out, &Json::Object(doc))?;
    writeln!(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> (Meta, Table) {
        let mut meta = Meta::new("demo", Some(7));
        meta.param("alpha", 0.3).note("rows", 2);
        let mut t = Table::new(["x", "y", "ok"]);
        t.push(vec![0.1.into(), f64::NAN.into(), true.into()]);
        t.push(vec![(1.0 / 3.0).into(), 2u64.into(), false.into()]);
        (meta, t)
    }

    #[test]
    fn csv_has_comment_header_and_full_precision() {
        let (meta, t) = sample();
        let mut buf = Vec::new();
        write(&mut buf, &meta, &t, Format::Csv).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body[0], "x,y,ok");
        assert_eq!(body[1], "1.0000000000000001e-1,NaN,true");
        let third: f64 = body[2].split(',').next().unwrap().parse().unwrap();
        assert_eq!(third, 1.0 / 3.0);
        assert!(text.contains("# seed: 7\n") && text.contains("# param alpha: 0.3\n"));
    }

    #[test]
    fn json_mirrors_columns() {
        let (meta, t) = sample();
        let mut buf = Vec::new();
        write(&mut buf, &meta, &t, Format::Json).unwrap();
        let v: Json = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["meta"]["seed"], 7);
        assert_eq!(v["meta"]["parameters"]["alpha"], "0.3");
        assert_eq!(v["data"][0]["y"], Json::Null);
        assert_eq!(v["data"][1]["ok"], false);
        let keys: Vec<&String> = v["data"][0].as_object().unwrap().keys().collect();
        assert_eq!(keys, ["x", "y", "ok"]);
    }
}
