use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

const MAGIC: &[u8; 4] = b"MTXB";

fn format_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Format(msg.into()))
}

/// Reads `.csv` (comma-separated decimal rows) or `.mtb` (binary) by
/// extension.
pub fn read_matrix(path: impl AsRef<Path>) -> Result<Matrix> {
    let path = path.as_ref();
    match extension(path)? {
        Ext::Csv => parse_csv(&fs::read_to_string(path)?),
        Ext::Mtb => parse_mtb(&fs::read(path)?),
    }
}

pub fn write_matrix(path: impl AsRef<Path>, m: &Matrix) -> Result<()> {
    let path = path.as_ref();
    let bytes = match extension(path)? {
        Ext::Csv => to_csv(m).into_bytes(),
        Ext::Mtb => to_mtb(m),
    };
    fs::write(path, bytes)?;
    Ok(())
}

enum Ext {
    Csv,
    Mtb,
}

fn extension(path: &Path) -> Result<Ext> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => Ok(Ext::Csv),
        Some("mtb") => Ok(Ext::Mtb),
        _ => format_err(format!("{}: expected a .csv or .mtb file", path.display())),
    }
}

pub fn parse_csv(text: &str) -> Result<Matrix> {
    let mut rows = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> = line.split(',').map(|f| f.trim().parse::<f64>()).collect();
        match row {
            Ok(r) => rows.push(r),
            Err(e) => return format_err(format!("line {}: {e}", ln + 1)),
        }
    }
    if rows.is_empty() {
        return format_err("empty matrix file");
    }
    let cols = rows[0].len();
    if let Some(i) = rows.iter().position(|r| r.len() != cols) {
        return format_err(format!("row {} has {} fields, expected {cols}", i + 1, rows[i].len()));
    }
    Matrix::from_rows(&rows)
}

pub fn to_csv(m: &Matrix) -> String {
    let mut out = String::with_capacity(m.rows() * m.cols() * 20);
    for i in 0..m.rows() {
        let fields: Vec<String> = m.row(i).iter().map(|v| v.to_string()).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_mtb(bytes: &[u8]) -> Result<Matrix> {
    if bytes.len() < 20 || &bytes[..4] != MAGIC {
        return format_err("missing MTXB header");
    }
    let word = |k: usize| u64::from_le_bytes(bytes[k..k + 8].try_into().unwrap());
    let (rows, cols) = (word(4), word(12));
    let count = rows.checked_mul(cols).and_then(|c| c.checked_mul(8));
    if count != Some(bytes.len() as u64 - 20) {
        return format_err(format!("{rows}x{cols} header does not match a {}-byte payload", bytes.len() - 20));
    }
    let data = bytes[20..].chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    Matrix::from_vec(rows as usize, cols as usize, data)
}

pub fn to_mtb(m: &Matrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(20 + 8 * m.data().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(m.rows() as u64).to_le_bytes());
    out.extend_from_slice(&(m.cols() as u64).to_le_bytes());
    for v in m.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mtb_header_layout() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        let b = to_mtb(&m);
        assert_eq!(&b[..4], b"MTXB");
        assert_eq!(b[4], 1);
        assert_eq!(b[12], 2);
        assert_eq!(b.len(), 36);
        assert_eq!(parse_mtb(&b).unwrap(), m);
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(parse_mtb(b"MTXA\0\0\0\0\0\0\0\0\0\0\0\0\0\0\0\0"), Err(Error::Format(_))));
        let mut b = to_mtb(&Matrix::zeros(2, 2));
        b.pop();
        assert!(matches!(parse_mtb(&b), Err(Error::Format(_))));
        assert!(matches!(parse_csv("1,2\n3\n"), Err(Error::Format(_))));
        assert!(matches!(parse_csv("1,x\n"), Err(Error::Format(_))));
        assert!(matches!(parse_csv("\n"), Err(Error::Format(_))));
    }
}
