//! Sparse dataset text format.
//!
//! ```text
//! <dimension> <Q>
//! <label ids, comma separated, possibly empty>\t<ascending feature indices, space separated>
//! ```
//!
//! Label names are not part of the format; a loaded dataset carries the
//! numbered label space `0..Q`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{Instance, LabelSet, LabelSpace, MultiLabelDataset, SparseBinaryVector};
use crate::error::{Error, Result};

pub fn save_sparse(dataset: &MultiLabelDataset, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_sparse(dataset, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_sparse<W: Write>(dataset: &MultiLabelDataset, mut w: W) -> Result<()> {
    writeln!(w, "{} {}", dataset.dimension(), dataset.q())?;
    for inst in dataset.instances() {
        let labels: Vec<String> = inst.labels.iter().map(|l| l.to_string()).collect();
        let indices: Vec<String> = inst.vector.indices().iter().map(|i| i.to_string()).collect();
        writeln!(w, "{}\t{}", labels.join(","), indices.join(" "))?;
    }
    Ok(())
}

pub fn load_sparse(path: impl AsRef<Path>) -> Result<MultiLabelDataset> {
    read_sparse(File::open(path)?)
}

fn parse_usize(token: &str, line: u64, what: &str) -> Result<usize> {
    token
        .trim()
        .parse::<usize>()
        .map_err(|_| Error::parse(line, format!("invalid {what} {token:?}")))
}

pub fn read_sparse<R: Read>(reader: R) -> Result<MultiLabelDataset> {
    let mut lines = BufReader::new(reader).lines();
    let header = match lines.next() {
        Some(h) => h?,
        None => return Err(Error::parse(1, "missing header")),
    };
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 2 {
        return Err(Error::parse(1, "header must be `<dimension> <Q>`"));
    }
    let dimension = parse_usize(parts[0], 1, "dimension")?;
    let q = parse_usize(parts[1], 1, "label count")?;
    let space = LabelSpace::numbered(q).map_err(|e| Error::parse(1, e.to_string()))?;

    let mut instances = Vec::new();
    for (offset, line) in lines.enumerate() {
        let line = line?;
        let lineno = offset as u64 + 2;
        let (label_field, index_field) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(lineno, "missing tab separator"))?;

        let mut labels = Vec::new();
        if !label_field.is_empty() {
            for tok in label_field.split(',') {
                let l = parse_usize(tok, lineno, "label id")?;
                if l >= q {
                    return Err(Error::parse(lineno, format!("label id {l} >= Q = {q}")));
                }
                labels.push(l);
            }
        }
        let mut indices = Vec::new();
        for tok in index_field.split_whitespace() {
            let idx = parse_usize(tok, lineno, "feature index")?;
            if idx >= dimension {
                return Err(Error::parse(
                    lineno,
                    format!("index {idx} >= dimension {dimension}"),
                ));
            }
            if indices.last().is_some_and(|&prev| prev >= idx) {
                return Err(Error::parse(lineno, "indices not ascending"));
            }
            indices.push(idx);
        }
        instances.push(Instance {
            vector: SparseBinaryVector::new(indices, dimension)?,
            labels: LabelSet::from_ids(labels),
        });
    }
    MultiLabelDataset::new(space, dimension, instances)
}
