//! Small dense linear algebra on coefficient space `Rⁿ`: subspaces are stored
//! as matrices whose columns span them.

use nalgebra::{DMatrix, DVector};

/// Relative singular-value cutoff for numerical rank.
pub const RANK_TOL: f64 = 1e-9;

pub fn rank(m: &DMatrix<f64>) -> usize {
    if m.ncols() == 0 || m.nrows() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > RANK_TOL * top).count()
}

pub fn empty(n: usize) -> DMatrix<f64> {
    DMatrix::zeros(n, 0)
}

pub fn identity(n: usize) -> DMatrix<f64> {
    DMatrix::identity(n, n)
}

/// Orthonormal basis of `{y : r·y = 0 for every r in rows}`.
pub fn null_space(n: usize, rows: &[&DVector<f64>]) -> DMatrix<f64> {
    if rows.is_empty() {
        return identity(n);
    }
    // pad to a square matrix so the SVD returns a full set of right vectors
    let m = rows.len().max(n);
    let mut a = DMatrix::zeros(m, n);
    for (i, r) in rows.iter().enumerate() {
        a.set_row(i, &r.transpose());
    }
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cols: Vec<DVector<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| top == 0.0 || **s <= RANK_TOL * top)
        .map(|(i, _)| vt.row(i).transpose())
        .collect();
    if cols.is_empty() {
        empty(n)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Columns of `a` followed by columns of `b`.
pub fn join(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows().max(b.nrows());
    let mut out = DMatrix::zeros(n, a.ncols() + b.ncols());
    if a.ncols() > 0 {
        out.columns_mut(0, a.ncols()).copy_from(a);
    }
    if b.ncols() > 0 {
        out.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    }
    out
}

/// `dim(a ∩ b) = dim a + dim b − dim(a + b)`.
pub fn intersection_dim(a: &DMatrix<f64>, b: &DMatrix<f64>) -> usize {
    rank(a) + rank(b) - rank(&join(a, b))
}

/// `a ⊆ b`?
pub fn contained(a: &DMatrix<f64>, b: &DMatrix<f64>) -> bool {
    rank(&join(b, a)) == rank(b)
}

/// Orthonormal basis of the column span of `m`.
pub fn orthonormal_basis(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    if m.ncols() == 0 {
        return empty(n);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested");
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cols: Vec<DVector<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| top > 0.0 && **s > RANK_TOL * top)
        .map(|(i, _)| u.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        empty(n)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// `a ∩ b` as an orthonormal basis.
pub fn intersection(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    // complement-of-sum formulation: a ∩ b = (a^⊥ + b^⊥)^⊥
    let perp = |m: &DMatrix<f64>| -> DMatrix<f64> {
        let q = orthonormal_basis(m);
        let rows: Vec<DVector<f64>> = q.column_iter().map(|c| c.into_owned()).collect();
        let refs: Vec<&DVector<f64>> = rows.iter().collect();
        null_space(n, &refs)
    };
    let s = join(&perp(a), &perp(b));
    let rows: Vec<DVector<f64>> = orthonormal_basis(&s).column_iter().map(|c| c.into_owned()).collect();
    let refs: Vec<&DVector<f64>> = rows.iter().collect();
    null_space(n, &refs)
}

/// Coordinate vectors, in the given order, that extend `span(base)` one
/// dimension at a time until it is all of `Rⁿ`.
pub fn greedy_complement(base: &DMatrix<f64>, order: &[usize]) -> DMatrix<f64> {
    let n = base.nrows();
    let mut acc = orthonormal_basis(base);
    let mut picked: Vec<DVector<f64>> = Vec::new();
    for &i in order {
        let mut e = DVector::zeros(n);
        e[i] = 1.0;
        let trial = join(&acc, &DMatrix::from_columns(&[e.clone()]));
        if rank(&trial) > rank(&acc) {
            acc = trial;
            picked.push(e);
        }
    }
    if picked.is_empty() {
        empty(n)
    } else {
        DMatrix::from_columns(&picked)
    }
}

pub fn columns(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.column_iter().map(|c| c.iter().copied().collect()).collect()
}
