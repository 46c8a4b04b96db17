//! JSON-friendly forms of complex matrices: row-major arrays of `[re, im]`.

use crate::error::{Error, Result};
use crate::numerics::{CMat, CVec, C64};

pub type Rows = Vec<Vec<C64>>;

pub fn matrix_to_rows(m: &CMat) -> Rows {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub fn rows_to_matrix(rows: &[Vec<C64>]) -> Result<CMat> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::InvalidParameter("ragged matrix rows".into()));
    }
    Ok(CMat::from_fn(nrows, ncols, |r, c| rows[r][c]))
}

pub fn vector_to_vec(v: &CVec) -> Vec<C64> {
    v.iter().copied().collect()
}

pub fn vec_to_vector(v: &[C64]) -> CVec {
    CVec::from_column_slice(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c64;

    #[test]
    fn round_trip() {
        let m = CMat::from_fn(2, 3, |r, c| c64(r as f64, c as f64 + 0.1));
        let rows = matrix_to_rows(&m);
        assert_eq!(rows[1][2], c64(1.0, 2.1));
        assert_eq!(rows_to_matrix(&rows).unwrap(), m);
        let json = serde_json::to_string(&rows).unwrap();
        assert!(json.starts_with("[[[0.0,0.1]"));
        let back: Rows = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn ragged_rejected() {
        let rows = vec![vec![c64(1.0, 0.0)], vec![]];
        assert!(rows_to_matrix(&rows).is_err());
    }
}
