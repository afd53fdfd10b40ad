//! Record streams stored either as one JSON array or as JSON Lines.

use std::cell::Cell;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::marker::PhantomData;
use std::path::Path;

use serde::de::{DeserializeOwned, SeqAccess, Visitor};
use serde::{Deserializer, Serialize};

use crate::error::{Error, Result};

/// Feeds every record of `reader` to `f`, in order, without holding more than
/// one record in memory. The layout is sniffed from the first non-blank byte:
/// `[` means a JSON array, anything else JSON Lines. Returns the record count.
pub fn for_each_record<R, T, F>(mut reader: R, context: &str, mut f: F) -> Result<usize>
where
    R: BufRead,
    T: DeserializeOwned,
    F: FnMut(usize, T) -> Result<()>,
{
    let first = loop {
        let buf = reader
            .fill_buf()
            .map_err(|e| Error::io(context, e))?;
        if buf.is_empty() {
            return Ok(0);
        }
        match buf.iter().position(|b| !b.is_ascii_whitespace()) {
            Some(i) => {
                let b = buf[i];
                reader.consume(i);
                break b;
            }
            None => {
                let n = buf.len();
                reader.consume(n);
            }
        }
    };

    if first == b'[' {
        let index = Cell::new(0usize);
        let mut failure: Option<Error> = None;
        let mut de = serde_json::Deserializer::from_reader(reader);
        let visitor = ArrayVisitor {
            f: &mut f,
            index: &index,
            failure: &mut failure,
            _record: PhantomData,
        };
        let outcome = de.deserialize_seq(visitor).and_then(|()| de.end());
        if let Some(err) = failure {
            return Err(err);
        }
        outcome.map_err(|e| {
            Error::Data(format!("{context}: record {}: {e}", index.get()))
        })?;
        Ok(index.get())
    } else {
        let mut count = 0;
        let mut line = String::new();
        let mut line_no = 0;
        loop {
            line.clear();
            let n = reader
                .read_line(&mut line)
                .map_err(|e| Error::io(context, e))?;
            if n == 0 {
                break;
            }
            line_no += 1;
            if line.trim().is_empty() {
                continue;
            }
            let record: T = serde_json::from_str(&line).map_err(|e| {
                Error::Data(format!("{context}: record {count} (line {line_no}): {e}"))
            })?;
            f(count, record)?;
            count += 1;
        }
        Ok(count)
    }
}

struct ArrayVisitor<'a, T, F> {
    f: &'a mut F,
    index: &'a Cell<usize>,
    failure: &'a mut Option<Error>,
    _record: PhantomData<T>,
}

impl<'de, T, F> Visitor<'de> for ArrayVisitor<'_, T, F>
where
    T: DeserializeOwned,
    F: FnMut(usize, T) -> Result<()>,
{
    type Value = ();

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an array of records")
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<(), A::Error> {
        while let Some(record) = seq.next_element::<T>()? {
            let i = self.index.get();
            if let Err(e) = (self.f)(i, record) {
                *self.failure = Some(e);
                return Err(serde::de::Error::custom("record callback failed"));
            }
            self.index.set(i + 1);
        }
        Ok(())
    }
}

pub fn for_each_record_in_file<T, F>(path: &Path, f: F) -> Result<usize>
where
    T: DeserializeOwned,
    F: FnMut(usize, T) -> Result<()>,
{
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    for_each_record(BufReader::new(file), &path.display().to_string(), f)
}

pub fn read_records<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for_each_record_in_file(path, |_, r| {
        out.push(r);
        Ok(())
    })?;
    Ok(out)
}

/// One compact JSON document per line.
pub fn to_jsonl<T: Serialize>(records: &[T]) -> Vec<u8> {
    let mut out = Vec::new();
    for r in records {
        serde_json::to_writer(&mut out, r).expect("record serializes");
        out.push(b'\n');
    }
    out
}

/// A pretty-printed JSON array with a trailing newline.
pub fn to_json_array<T: Serialize>(records: &[T]) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(records).expect("records serialize");
    out.push(b'\n');
    out
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let mut f = File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))
}

pub fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}
