//! CSV ingestion and export.
//!
//! Layout: UTF-8, comma-delimited, first row a header, one observation per row.
//! Longitudinal files carry one row per measurement plus a subject-id column and
//! optionally a time column. Error rows are 1-based file lines (the header is line 1).

use crate::dataset::{Dataset, LongitudinalDataset, Subject};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use std::io::{Read, Write};
use std::path::Path;

/// Either kind of dataset, as read from a file.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedData {
    CrossSection(Dataset),
    Longitudinal(LongitudinalDataset),
}

/// Columns with a special role in the file.
#[derive(Debug, Clone, Default)]
pub struct CsvLayout {
    pub response: String,
    pub subject: Option<String>,
    /// Orders measurements within a subject; file order otherwise.
    pub time: Option<String>,
}

impl CsvLayout {
    pub fn new(response: &str) -> Self {
        CsvLayout { response: response.to_string(), subject: None, time: None }
    }
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn read_table<R: Read>(reader: R) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::Io(e.to_string()))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let mut rows = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Io(e.to_string()))?;
        if rec.len() != header.len() {
            return Err(Error::RaggedRow { row: k + 2, expected: header.len(), found: rec.len() });
        }
        rows.push(rec.iter().map(|c| c.trim().to_string()).collect());
    }
    Ok(Table { header, rows })
}

fn column_index(header: &[String], name: &str) -> Result<usize> {
    header.iter().position(|h| h == name).ok_or_else(|| Error::MissingColumn(name.to_string()))
}

fn number(cell: &str, row: usize, column: &str) -> Result<f64> {
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::NonNumericCell { row, column: column.to_string(), cell: cell.to_string() }),
    }
}

/// Reads a dataset from CSV text.
pub fn parse_dataset<R: Read>(reader: R, layout: &CsvLayout) -> Result<LoadedData> {
    let t = read_table(reader)?;
    let yi = column_index(&t.header, &layout.response)?;
    let si = layout.subject.as_deref().map(|s| column_index(&t.header, s)).transpose()?;
    let ti = layout.time.as_deref().map(|s| column_index(&t.header, s)).transpose()?;
    if ti.is_some() && si.is_none() {
        return Err(Error::InvalidArgument("a time column needs a subject column".into()));
    }
    let features: Vec<usize> = (0..t.header.len()).filter(|&k| k != yi && Some(k) != si && Some(k) != ti).collect();
    let names: Vec<String> = features.iter().map(|&k| t.header[k].clone()).collect();
    let n = t.rows.len();
    let p = features.len();
    let mut x = DMatrix::zeros(n, p);
    let mut y = DVector::zeros(n);
    let mut times = vec![0.0; n];
    for (i, row) in t.rows.iter().enumerate() {
        let line = i + 2;
        y[i] = number(&row[yi], line, &t.header[yi])?;
        for (c, &k) in features.iter().enumerate() {
            x[(i, c)] = number(&row[k], line, &t.header[k])?;
        }
        if let Some(ti) = ti {
            times[i] = number(&row[ti], line, &t.header[ti])?;
        }
    }
    let Some(si) = si else {
        return Ok(LoadedData::CrossSection(Dataset::new(x, y, names)?));
    };
    let mut order: Vec<String> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    for (i, row) in t.rows.iter().enumerate() {
        let id = &row[si];
        match order.iter().position(|o| o == id) {
            Some(g) => members[g].push(i),
            None => {
                order.push(id.clone());
                members.push(vec![i]);
            }
        }
    }
    if ti.is_some() {
        for m in &mut members {
            m.sort_by(|&a, &b| times[a].total_cmp(&times[b]));
        }
    }
    let subjects = order
        .into_iter()
        .zip(members)
        .map(|(id, rows)| Subject { id, x: x.select_rows(&rows), y: y.select_rows(&rows) })
        .collect();
    Ok(LoadedData::Longitudinal(LongitudinalDataset::new(subjects, names)?))
}

/// Reads a dataset from a CSV file.
pub fn read_dataset(path: &Path, layout: &CsvLayout) -> Result<LoadedData> {
    let f = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_dataset(std::io::BufReader::new(f), layout)
}

/// Reads one numeric column (by name, or the first column).
pub fn read_column<R: Read>(reader: R, column: Option<&str>) -> Result<Vec<f64>> {
    let t = read_table(reader)?;
    let k = match column {
        Some(c) => column_index(&t.header, c)?,
        None if !t.header.is_empty() => 0,
        None => return Err(Error::MissingColumn("<first>".into())),
    };
    t.rows.iter().enumerate().map(|(i, r)| number(&r[k], i + 2, &t.header[k])).collect()
}

/// Shortest decimal text that parses back to the same `f64`.
fn fmt(v: f64) -> String {
    format!("{v:?}")
}

/// Writes `data` (raw response) as `y,<features>`.
pub fn write_dataset<W: Write>(out: W, data: &Dataset) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["y".to_string()];
    header.extend(data.feature_names.iter().cloned());
    w.write_record(&header).map_err(|e| Error::Io(e.to_string()))?;
    let y = data.raw_response();
    for i in 0..data.n() {
        let mut rec = vec![fmt(y[i])];
        rec.extend(data.x.row(i).iter().map(|&v| fmt(v)));
        w.write_record(&rec).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `data` as `subject,time,y,<features>`, one row per measurement, with
/// times numbered from 1 within each subject.
pub fn write_longitudinal<W: Write>(out: W, data: &LongitudinalDataset) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["subject".to_string(), "time".to_string(), "y".to_string()];
    header.extend(data.feature_names.iter().cloned());
    w.write_record(&header).map_err(|e| Error::Io(e.to_string()))?;
    for s in &data.subjects {
        for t in 0..s.y.len() {
            let mut rec = vec![s.id.clone(), (t + 1).to_string(), fmt(s.y[t])];
            rec.extend(s.x.row(t).iter().map(|&v| fmt(v)));
            w.write_record(&rec).map_err(|e| Error::Io(e.to_string()))?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cross_section() {
        let text = "y,x1,x2\n1,2,3\n4,5,6\n7,8,9\n";
        let LoadedData::CrossSection(d) = parse_dataset(text.as_bytes(), &CsvLayout::new("y")).unwrap() else {
            panic!("expected cross-section");
        };
        assert_eq!(d.p(), 2);
        assert_eq!(d.feature_names, vec!["x1", "x2"]);
        assert_eq!(d.y.as_slice(), &[1.0, 4.0, 7.0]);
        assert_eq!(d.x[(2, 1)], 9.0);
    }

    #[test]
    fn response_need_not_come_first() {
        let text = "a,y,b\n1,2,3\n4,5,6\n";
        let LoadedData::CrossSection(d) = parse_dataset(text.as_bytes(), &CsvLayout::new("y")).unwrap() else {
            panic!()
        };
        assert_eq!(d.feature_names, vec!["a", "b"]);
        assert_eq!(d.y.as_slice(), &[2.0, 5.0]);
    }

    #[test]
    fn errors() {
        let nan = parse_dataset("y,x1\n1,2\n3,NaN\n".as_bytes(), &CsvLayout::new("y"));
        assert_eq!(nan, Err(Error::NonNumericCell { row: 3, column: "x1".into(), cell: "NaN".into() }));
        let word = parse_dataset("y,x1\n1,abc\n3,4\n".as_bytes(), &CsvLayout::new("y"));
        assert!(matches!(word, Err(Error::NonNumericCell { row: 2, .. })));
        let missing = parse_dataset("y,x1\n1,2\n3,4\n".as_bytes(), &CsvLayout::new("resp"));
        assert_eq!(missing, Err(Error::MissingColumn("resp".into())));
        let ragged = parse_dataset("y,x1\n1,2\n3,4,5\n".as_bytes(), &CsvLayout::new("y"));
        assert_eq!(ragged, Err(Error::RaggedRow { row: 3, expected: 2, found: 3 }));
    }

    #[test]
    fn longitudinal_grouping() {
        let text = "id,y,x\n1,0.5,1\n1,0.7,2\n2,0.1,3\n2,0.2,4\n";
        let layout = CsvLayout { subject: Some("id".into()), ..CsvLayout::new("y") };
        let LoadedData::Longitudinal(d) = parse_dataset(text.as_bytes(), &layout).unwrap() else { panic!() };
        assert_eq!(d.n(), 2);
        assert_eq!(d.common_m(), Some(2));
        assert_eq!(d.subjects[1].id, "2");
        assert_eq!(d.subjects[1].x.as_slice(), &[3.0, 4.0]);
    }

    #[test]
    fn time_column_orders_measurements() {
        let text = "s,t,y,x\nb,2,1,10\na,1,2,20\nb,1,3,30\na,2,4,40\n";
        let layout = CsvLayout { subject: Some("s".into()), time: Some("t".into()), ..CsvLayout::new("y") };
        let LoadedData::Longitudinal(d) = parse_dataset(text.as_bytes(), &layout).unwrap() else { panic!() };
        assert_eq!(d.subjects[0].id, "b");
        assert_eq!(d.subjects[0].y.as_slice(), &[3.0, 1.0]);
        assert_eq!(d.feature_names, vec!["x"]);
    }

    #[test]
    fn write_read_round_trip() {
        let x = DMatrix::from_row_slice(3, 2, &[0.1, 1e-300, -2.5e17, 1.0 / 3.0, 7.0, f64::MIN_POSITIVE]);
        let d = Dataset::unnamed(x, DVector::from_column_slice(&[1.0, -0.0, 0.30000000000000004])).unwrap();
        let mut buf = Vec::new();
        write_dataset(&mut buf, &d).unwrap();
        let LoadedData::CrossSection(back) = parse_dataset(buf.as_slice(), &CsvLayout::new("y")).unwrap() else {
            panic!()
        };
        assert_eq!(back, d);
        assert!(back.x.iter().zip(d.x.iter()).all(|(a, b)| a.to_bits() == b.to_bits()));
    }
}
