//! Path CSV (`t,value`) and grid-field JSON files.

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::field::{GridField, GridFieldFile};
use super::path::SampledPath;
use crate::{Error, Result};

#[derive(Serialize, Deserialize)]
struct Row {
    t: f64,
    value: f64,
}

pub fn read_path_csv_from<R: Read>(r: R) -> Result<SampledPath> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let headers = rdr.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "t" || &headers[1] != "value" {
        return Err(Error::Argument(format!("path CSV header must be `t,value`, found `{}`", headers.iter().collect::<Vec<_>>().join(","))));
    }
    let mut ts = Vec::new();
    let mut vs = Vec::new();
    for row in rdr.deserialize::<Row>() {
        let row = row?;
        ts.push(row.t);
        vs.push(row.value);
    }
    SampledPath::linear(ts, vs)
}

pub fn read_path_csv(path: &Path) -> Result<SampledPath> {
    read_path_csv_from(BufReader::new(File::open(path)?))
}

pub fn write_path_csv_to<W: Write>(p: &SampledPath, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for (&t, &value) in p.ts().iter().zip(p.values()) {
        wtr.serialize(Row { t, value })?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_grid_json_from<R: Read>(r: R) -> Result<GridField> {
    let file: GridFieldFile = serde_json::from_reader(r)?;
    GridField::from_file(file)
}

pub fn read_grid_json(path: &Path) -> Result<GridField> {
    read_grid_json_from(BufReader::new(File::open(path)?))
}

pub fn write_grid_json_to<W: Write>(g: &GridField, w: W) -> Result<()> {
    serde_json::to_writer(w, &g.to_file())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_fields::field::Field;
    use crate::grid_fields::func::{Elementary, Func1};

    #[test]
    fn path_csv_round_trip() {
        let p = SampledPath::sample(&Elementary::Sin, 0.0, 1.0, 16).unwrap();
        let mut buf = Vec::new();
        write_path_csv_to(&p, &mut buf).unwrap();
        assert!(buf.starts_with(b"t,value\n"));
        let q = read_path_csv_from(buf.as_slice()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn rejects_wrong_header_and_unsorted_rows() {
        assert!(read_path_csv_from("time,v\n0,1\n1,2\n".as_bytes()).is_err());
        assert!(read_path_csv_from("t,value\n1,1\n0,2\n".as_bytes()).is_err());
    }

    #[test]
    fn grid_json_round_trip() {
        let w = crate::grid_fields::field::make_product_field(Elementary::Sin.shared(), Elementary::Cos.shared());
        let g = GridField::sample(&w, vec![0.0, 0.5, 1.0], vec![-1.0, 0.0, 1.0]).unwrap();
        let mut buf = Vec::new();
        write_grid_json_to(&g, &mut buf).unwrap();
        let h = read_grid_json_from(buf.as_slice()).unwrap();
        assert_eq!(g.eval(0.3, 0.2), h.eval(0.3, 0.2));
        assert!(read_grid_json_from(r#"{"ts":[0,1],"xs":[0,1],"values":[[0,1]],"extra":1}"#.as_bytes()).is_err());
        let _ = Elementary::Sin.value(0.0);
    }
}
