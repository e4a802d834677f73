//! Small helpers shared by the CSV readers and writers.

use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

pub(crate) struct CsvInput<R: Read> {
    name: String,
    reader: csv::Reader<R>,
}

pub(crate) fn open(path: &Path) -> Result<CsvInput<BufReader<File>>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(CsvInput::new(path.display().to_string(), BufReader::new(file)))
}

impl<R: Read> CsvInput<R> {
    pub(crate) fn new(name: impl Into<String>, input: R) -> Self {
        let reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .flexible(false)
            .from_reader(input);
        CsvInput {
            name: name.into(),
            reader,
        }
    }

    pub(crate) fn name(&self) -> &str {
        &self.name
    }

    /// Returns the header fields, failing unless they start with `required`.
    pub(crate) fn expect_headers(&mut self, required: &[&str]) -> Result<Vec<String>> {
        let headers = self
            .reader
            .headers()
            .map_err(|e| Error::parse(&self.name, 1, e.to_string()))?
            .iter()
            .map(str::to_owned)
            .collect::<Vec<_>>();
        let ok = headers.len() >= required.len()
            && headers.iter().zip(required).all(|(h, r)| h == r);
        if !ok {
            return Err(Error::parse(
                &self.name,
                1,
                format!(
                    "expected header `{}`, found `{}`",
                    required.join(","),
                    headers.join(",")
                ),
            ));
        }
        Ok(headers)
    }

    /// Visits every data row as `(line, record)`.
    pub(crate) fn for_each_row(
        &mut self,
        mut f: impl FnMut(u64, &csv::StringRecord) -> Result<()>,
    ) -> Result<()> {
        let mut record = csv::StringRecord::new();
        loop {
            let more = self.reader.read_record(&mut record).map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                Error::parse(&self.name, line, e.to_string())
            })?;
            if !more {
                return Ok(());
            }
            let line = record.position().map_or(0, |p| p.line());
            f(line, &record)?;
        }
    }
}

pub(crate) fn field<T: FromStr>(
    file: &str,
    line: u64,
    record: &csv::StringRecord,
    idx: usize,
    what: &str,
) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let raw = record
        .get(idx)
        .ok_or_else(|| Error::parse(file, line, format!("missing column `{what}`")))?;
    raw.parse()
        .map_err(|e| Error::parse(file, line, format!("bad {what} `{raw}`: {e}")))
}

pub(crate) fn flag(file: &str, line: u64, record: &csv::StringRecord, idx: usize, what: &str) -> Result<bool> {
    match record.get(idx) {
        Some("0") => Ok(false),
        Some("1") => Ok(true),
        Some(other) => Err(Error::parse(
            file,
            line,
            format!("bad {what} `{other}`: expected 0 or 1"),
        )),
        None => Err(Error::parse(file, line, format!("missing column `{what}`"))),
    }
}

pub(crate) fn create(path: &Path) -> Result<std::io::BufWriter<File>> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(std::io::BufWriter::new(file))
}

pub(crate) fn write_string(path: &Path, contents: &str) -> Result<()> {
    use std::io::Write;
    let mut w = create(path)?;
    w.write_all(contents.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}
