//! Plain-text matrix format: whitespace-separated row-major entries, one
//! matrix per blank-line separated block, `#` starts a comment.

use std::fmt::Write;

use crate::error::{Error, Result};

use super::SymMat;

pub fn parse_matrices(src: &str) -> Result<Vec<SymMat<f64>>> {
    let mut out = Vec::new();
    let mut block: Vec<f64> = Vec::new();
    let flush = |block: &mut Vec<f64>, out: &mut Vec<SymMat<f64>>| -> Result<()> {
        if block.is_empty() {
            return Ok(());
        }
        let n = (block.len() as f64).sqrt().round() as usize;
        if n * n != block.len() {
            return Err(Error::Parse(format!("{} entries do not form a square matrix", block.len())));
        }
        let rows: Vec<Vec<f64>> = block.chunks(n).map(|r| r.to_vec()).collect();
        out.push(SymMat::from_rows(&rows)?);
        block.clear();
        Ok(())
    };
    for (lineno, line) in src.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            flush(&mut block, &mut out)?;
            continue;
        }
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad number {tok:?}", lineno + 1)))?;
            block.push(v);
        }
    }
    flush(&mut block, &mut out)?;
    Ok(out)
}

pub fn format_matrix(m: &SymMat<f64>) -> String {
    let mut s = String::new();
    for i in 0..m.n() {
        let row: Vec<String> = (0..m.n()).map(|j| format!("{:.17e}", m.get(i, j))).collect();
        let _ = writeln!(s, "{}", row.join(" "));
    }
    s
}
