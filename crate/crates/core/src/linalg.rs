//! Small dense matrices of scalar fields.

use crate::error::{Error, Result};
use crate::scalar::{Chart, ScalarField};

pub type FieldMatrix = Vec<Vec<ScalarField>>;

/// Determinant by cofactor expansion along the first row (sizes stay tiny).
pub fn det(m: &FieldMatrix, chart: &Chart) -> Result<ScalarField> {
    let n = m.len();
    match n {
        0 => Ok(ScalarField::int(chart, 1)),
        1 => Ok(m[0][0].clone()),
        2 => m[0][0].mul(&m[1][1])?.sub(&m[0][1].mul(&m[1][0])?),
        _ => {
            let mut acc = ScalarField::zero(chart);
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let t = m[0][j].mul(&det(&minor(m, 0, j), chart)?)?;
                acc = if j % 2 == 0 { acc.add(&t)? } else { acc.sub(&t)? };
            }
            Ok(acc)
        }
    }
}

pub fn minor(m: &FieldMatrix, row: usize, col: usize) -> FieldMatrix {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| r.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, f)| f.clone()).collect())
        .collect()
}

pub fn submatrix(m: &FieldMatrix, rows: &[usize], cols: &[usize]) -> FieldMatrix {
    rows.iter().map(|&i| cols.iter().map(|&j| m[i][j].clone()).collect()).collect()
}

/// Inverse via the adjugate, returned as (adjugate, determinant).
pub fn adjugate(m: &FieldMatrix, chart: &Chart) -> Result<(FieldMatrix, ScalarField)> {
    let n = m.len();
    let d = det(m, chart)?;
    if d.is_zero() {
        return Err(Error::LeafMatrixSingular);
    }
    let mut adj = vec![vec![ScalarField::zero(chart); n]; n];
    if n == 1 {
        adj[0][0] = ScalarField::int(chart, 1);
        return Ok((adj, d));
    }
    for (i, row) in adj.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            let c = det(&minor(m, j, i), chart)?;
            *entry = if (i + j) % 2 == 0 { c } else { c.neg() };
        }
    }
    Ok((adj, d))
}

pub fn inverse(m: &FieldMatrix, chart: &Chart) -> Result<FieldMatrix> {
    let (adj, d) = adjugate(m, chart)?;
    adj.iter()
        .map(|r| r.iter().map(|f| f.div(&d).map(|g| g.normalized())).collect())
        .collect()
}

pub fn mat_mul(a: &FieldMatrix, b: &FieldMatrix, chart: &Chart) -> Result<FieldMatrix> {
    let (n, k, m) = (a.len(), b.len(), b.first().map_or(0, |r| r.len()));
    let mut out = vec![vec![ScalarField::zero(chart); m]; n];
    for i in 0..n {
        for j in 0..m {
            let mut s = ScalarField::zero(chart);
            for l in 0..k {
                if a[i][l].is_zero() || b[l][j].is_zero() {
                    continue;
                }
                s = s.add(&a[i][l].mul(&b[l][j])?)?;
            }
            out[i][j] = s;
        }
    }
    Ok(out)
}

pub fn eval_matrix(m: &FieldMatrix, x: &[f64]) -> Result<nalgebra::DMatrix<f64>> {
    let (r, c) = (m.len(), m.first().map_or(0, |r| r.len()));
    let mut out = nalgebra::DMatrix::zeros(r, c);
    for i in 0..r {
        for j in 0..c {
            out[(i, j)] = m[i][j].eval(x)?;
        }
    }
    Ok(out)
}
