//! CSV ingestion for single comparisons and corpora.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::meta_core::{Comparison, CorpusEntry, RawSummary, Study, StudyRecord};

const RAW_KEYS: [&str; 6] = ["n1", "m1", "sd1", "n2", "m2", "sd2"];

/// Column renaming from `--map key=column,...`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ColumnMap(HashMap<String, String>);

impl ColumnMap {
    pub fn parse(spec: Option<&str>) -> Result<Self> {
        let mut map = HashMap::new();
        let Some(spec) = spec else { return Ok(Self(map)) };
        for pair in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, column) = pair
                .split_once('=')
                .ok_or_else(|| Error::Invalid(format!("column mapping `{pair}` is not of the form key=column")))?;
            let key = key.trim().to_lowercase();
            let known = ["effect", "se", "label", "comparison_id", "subfield"];
            if !known.contains(&key.as_str()) && !RAW_KEYS.contains(&key.as_str()) {
                return Err(Error::Invalid(format!("unknown column key `{key}` in --map")));
            }
            map.insert(key, column.trim().to_string());
        }
        Ok(Self(map))
    }

    fn column<'a>(&'a self, key: &'a str) -> &'a str {
        self.0.get(key).map(String::as_str).unwrap_or(key)
    }
}

/// Header positions of the columns in use.
struct Layout {
    effect: Option<(usize, usize)>,
    raw: Option<[usize; 6]>,
    label: Option<usize>,
    id: Option<usize>,
    subfield: Option<usize>,
}

fn layout(headers: &csv::StringRecord, map: &ColumnMap) -> Result<Layout> {
    let find = |key: &str| {
        let name = map.column(key).to_lowercase();
        headers.iter().position(|h| h.trim().to_lowercase() == name)
    };
    let effect = match (find("effect"), find("se")) {
        (Some(e), Some(s)) => Some((e, s)),
        _ => None,
    };
    let raw_pos: Vec<Option<usize>> = RAW_KEYS.iter().map(|k| find(k)).collect();
    let raw = if raw_pos.iter().all(Option::is_some) {
        let v: Vec<usize> = raw_pos.into_iter().flatten().collect();
        Some([v[0], v[1], v[2], v[3], v[4], v[5]])
    } else {
        None
    };
    if effect.is_none() && raw.is_none() {
        return Err(Error::Parse {
            line: 1,
            message: format!(
                "header must contain `{}` and `{}`, or all of {}",
                map.column("effect"),
                map.column("se"),
                RAW_KEYS.map(|k| map.column(k)).join(", ")
            ),
        });
    }
    Ok(Layout { effect, raw, label: find("label"), id: find("comparison_id"), subfield: find("subfield") })
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes())
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    Error::Parse { line, message: e.to_string() }
}

/// A numeric cell: `Ok(None)` for empty or NaN cells.
fn cell(record: &csv::StringRecord, i: usize, line: usize) -> Result<Option<f64>> {
    let text = record.get(i).unwrap_or("").trim();
    if text.is_empty() || text.eq_ignore_ascii_case("na") {
        return Ok(None);
    }
    let v: f64 = text
        .parse()
        .map_err(|_| Error::Parse { line, message: format!("`{text}` is not a number") })?;
    Ok(if v.is_nan() { None } else { Some(v) })
}

/// Reads a study from one row; `Ok(None)` when a required cell is missing
/// or not finite.
fn study(record: &csv::StringRecord, layout: &Layout, line: usize) -> Result<Option<Study>> {
    let label = layout.label.and_then(|i| record.get(i)).unwrap_or("").to_string();
    let wrap = |e: Error| Error::Parse { line, message: e.to_string() };
    if let Some((e, s)) = layout.effect {
        let (Some(y), Some(se)) = (cell(record, e, line)?, cell(record, s, line)?) else {
            return Ok(None);
        };
        if !(y.is_finite() && se.is_finite()) {
            return Ok(None);
        }
        return Study::labeled(y, se, label).map(Some).map_err(wrap);
    }
    let idx = layout.raw.expect("layout has effect or raw columns");
    let mut v = [0.0; 6];
    for (slot, &i) in v.iter_mut().zip(&idx) {
        match cell(record, i, line)? {
            Some(x) if x.is_finite() => *slot = x,
            _ => return Ok(None),
        }
    }
    let raw = RawSummary { n1: v[0], mean1: v[1], sd1: v[2], n2: v[3], mean2: v[4], sd2: v[5] };
    Study::from_raw(raw, label).map(Some).map_err(wrap)
}

fn line_of(record: &csv::StringRecord, fallback: usize) -> usize {
    record.position().map(|p| p.line() as usize).unwrap_or(fallback)
}

/// Parses a single comparison. Every value must be present and finite.
pub fn read_comparison(text: &str, id: &str, map: &ColumnMap) -> Result<Comparison> {
    let mut rdr = reader(text);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    if headers.iter().all(|h| h.is_empty()) {
        return Err(Error::Parse { line: 1, message: "empty input".to_string() });
    }
    let layout = layout(&headers, map)?;
    let mut studies = Vec::new();
    for (n, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        let line = line_of(&rec, n + 2);
        match study(&rec, &layout, line)? {
            Some(s) => studies.push(s),
            None => {
                return Err(Error::Parse { line, message: "missing, NaN or infinite value".to_string() });
            }
        }
    }
    if studies.is_empty() {
        return Err(Error::Parse { line: 1, message: "no studies in input".to_string() });
    }
    Comparison::new(id, studies)
}

/// Parses a corpus with one row per study. Rows are grouped by
/// `comparison_id` in order of first appearance; missing or non-finite
/// values mark a study non-estimable.
pub fn read_corpus(text: &str, map: &ColumnMap) -> Result<Vec<CorpusEntry>> {
    let mut rdr = reader(text);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    if headers.iter().all(|h| h.is_empty()) {
        return Err(Error::Parse { line: 1, message: "empty input".to_string() });
    }
    let layout = layout(&headers, map)?;
    let id_col = layout.id.ok_or_else(|| Error::Parse {
        line: 1,
        message: format!("header must contain a `{}` column", map.column("comparison_id")),
    })?;
    let mut entries: Vec<CorpusEntry> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for (n, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        let line = line_of(&rec, n + 2);
        let id = rec.get(id_col).unwrap_or("").trim().to_string();
        if id.is_empty() {
            return Err(Error::Parse { line, message: "empty comparison_id".to_string() });
        }
        let label = layout.label.and_then(|i| rec.get(i)).unwrap_or("").to_string();
        let record = match study(&rec, &layout, line)? {
            Some(s) => StudyRecord::Estimable(s),
            None => StudyRecord::NonEstimable { label },
        };
        let slot = *index.entry(id.clone()).or_insert_with(|| {
            let subfield = layout.subfield.and_then(|i| rec.get(i)).map(str::to_string).filter(|s| !s.is_empty());
            entries.push(CorpusEntry { id, subfield, records: Vec::new() });
            entries.len() - 1
        });
        entries[slot].records.push(record);
    }
    if entries.is_empty() {
        return Err(Error::Parse { line: 1, message: "no studies in input".to_string() });
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn effect_layout() {
        let c = read_comparison("effect,se,label\n0.5,0.2,A\n0.3,0.1,B\n", "x", &ColumnMap::default()).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.studies()[1].label, "B");
    }

    #[test]
    fn raw_layout() {
        let c = read_comparison("n1,m1,sd1,n2,m2,sd2\n20,5,2,20,4,2\n", "x", &ColumnMap::default()).unwrap();
        assert!((c.studies()[0].effect - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_finite_with_line() {
        let err = read_comparison("effect,se\n0.5,0.2\ninf,0.1\n", "x", &ColumnMap::default()).unwrap_err();
        assert_eq!(err, Error::Parse { line: 3, message: "missing, NaN or infinite value".to_string() });
        let err = read_comparison("effect,se\nNaN,0.2\n", "x", &ColumnMap::default()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn rejects_non_positive_se() {
        let err = read_comparison("effect,se\n0.5,0\n", "x", &ColumnMap::default()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn mapped_columns() {
        let map = ColumnMap::parse(Some("effect=d, se=se_d")).unwrap();
        let c = read_comparison("Study,d,se_d\nA,1.2,0.3\n", "x", &map).unwrap();
        assert_eq!(c.studies()[0].effect, 1.2);
        assert!(ColumnMap::parse(Some("nonsense")).is_err());
    }

    #[test]
    fn empty_input() {
        assert!(matches!(read_comparison("", "x", &ColumnMap::default()), Err(Error::Parse { .. })));
        assert!(matches!(read_comparison("effect,se\n", "x", &ColumnMap::default()), Err(Error::Parse { .. })));
    }

    #[test]
    fn corpus_grouping() {
        let text = "comparison_id,effect,se\nb,0.1,0.2\na,0.2,0.2\nb,,0.3\nb,0.4,0.1\n";
        let corpus = read_corpus(text, &ColumnMap::default()).unwrap();
        assert_eq!(corpus.len(), 2);
        assert_eq!(corpus[0].id, "b");
        assert_eq!(corpus[0].records.len(), 3);
        assert_eq!(corpus[0].non_estimable_count(), 1);
    }

    #[test]
    fn corpus_needs_id() {
        let err = read_corpus("effect,se\n0.1,0.2\n", &ColumnMap::default()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }
}
