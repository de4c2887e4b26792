//! Corpus CSV: header `id,text,labels`, RFC-4180 quoting, `|`-separated label names.

use std::collections::{BTreeSet, HashSet};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::{Document, LabelSet, LabelSpace};
use crate::error::{Error, Result};

const HEADER: [&str; 3] = ["id", "text", "labels"];

/// A document collection and the label space its label sets refer to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub documents: Vec<Document>,
    pub space: LabelSpace,
}

impl Corpus {
    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn subset(&self, indices: &[usize]) -> Corpus {
        Corpus {
            documents: indices.iter().map(|&i| self.documents[i].clone()).collect(),
            space: self.space.clone(),
        }
    }
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::parse(line, format!("{other:?}")),
    }
}

pub fn load_documents(path: impl AsRef<Path>) -> Result<Corpus> {
    read_documents(File::open(path)?)
}

/// Parses a corpus. Label ids are assigned in lexicographic name order.
pub fn read_documents<R: Read>(reader: R) -> Result<Corpus> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);

    let header = rdr.headers().map_err(csv_error)?.clone();
    if header.len() != HEADER.len() || header.iter().zip(HEADER).any(|(a, b)| a.trim() != b) {
        return Err(Error::parse(1, format!("expected header `id,text,labels`, found {header:?}")));
    }

    let mut rows: Vec<(String, String, Vec<String>)> = Vec::new();
    let mut ids = HashSet::new();
    let mut names = BTreeSet::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != HEADER.len() {
            return Err(Error::parse(
                line,
                format!("expected 3 columns, found {}", record.len()),
            ));
        }
        let id = record[0].to_string();
        let text = record[1].to_string();
        let labels_field = record[2].trim();
        if labels_field.is_empty() {
            return Err(Error::parse(line, "empty label field"));
        }
        let mut row_names = Vec::new();
        for name in labels_field.split('|') {
            let name = name.trim();
            if name.is_empty() {
                return Err(Error::parse(line, "empty label name"));
            }
            names.insert(name.to_string());
            row_names.push(name.to_string());
        }
        if !ids.insert(id.clone()) {
            return Err(Error::Validation(format!("duplicate document id {id:?} (line {line})")));
        }
        rows.push((id, text, row_names));
    }
    if rows.is_empty() {
        return Err(Error::EmptyCorpus);
    }

    let space = LabelSpace::new(names.into_iter().collect())?;
    let documents = rows
        .into_iter()
        .map(|(id, text, row_names)| Document {
            id,
            text,
            labels: row_names
                .iter()
                .map(|n| space.id_of(n).expect("name collected above"))
                .collect::<LabelSet>(),
        })
        .collect();
    Ok(Corpus { documents, space })
}

pub fn write_documents<W: Write>(corpus: &Corpus, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| csv_error(e);
    wtr.write_record(HEADER).map_err(io)?;
    for doc in &corpus.documents {
        let labels = corpus.space.render(&doc.labels);
        wtr.write_record([doc.id.as_str(), doc.text.as_str(), labels.as_str()])
            .map_err(io)?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographic_label_ids() {
        let data = "id,text,labels\nd1,jalan rusak,DBMP\nd2,gepeng ngelem,Dinsos|Satpol PP\n";
        let corpus = read_documents(data.as_bytes()).unwrap();
        assert_eq!(corpus.len(), 2);
        assert_eq!(corpus.space.names(), &["DBMP", "Dinsos", "Satpol PP"]);
        assert_eq!(corpus.documents[0].labels.as_slice(), &[0]);
        assert_eq!(corpus.documents[1].labels.as_slice(), &[1, 2]);
    }

    #[test]
    fn empty_corpus_is_an_error() {
        let err = read_documents("id,text,labels\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::EmptyCorpus));
        assert_eq!(err.to_string(), "empty corpus");
    }

    #[test]
    fn duplicate_labels_collapse() {
        let corpus = read_documents("id,text,labels\nd1,x,A|A\n".as_bytes()).unwrap();
        assert_eq!(corpus.space.len(), 1);
        assert_eq!(corpus.documents[0].labels.len(), 1);
    }

    #[test]
    fn wrong_column_count_reports_line() {
        let data = "id,text,labels\nd1,x,A\nd2,y\n";
        match read_documents(data.as_bytes()).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_label_field_is_a_parse_error() {
        let err = read_documents("id,text,labels\nd1,x,\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn duplicate_ids_fail_validation() {
        let err = read_documents("id,text,labels\nd1,x,A\nd1,y,B\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn quoted_fields_round_trip() {
        let data = "id,text,labels\nd1,\"a, \"\"quoted\"\" text\",A|B\n";
        let corpus = read_documents(data.as_bytes()).unwrap();
        assert_eq!(corpus.documents[0].text, "a, \"quoted\" text");
        let mut out = Vec::new();
        write_documents(&corpus, &mut out).unwrap();
        assert_eq!(read_documents(out.as_slice()).unwrap(), corpus);
    }
}
