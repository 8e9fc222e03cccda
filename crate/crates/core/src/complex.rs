//! Oriented simplicial complexes and their integer boundary operators.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use nalgebra::DMatrix;
use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exact::{QMatrix, Rational};

/// A simplex as a strictly increasing tuple of vertex ids.
pub type Simplex = Vec<usize>;

/// Integer matrix stored as sorted `(row, col, value)` triples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseIntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, i64)>,
}

impl SparseIntMatrix {
    /// Builds a matrix from triples; repeated positions are summed and zeros dropped.
    pub fn from_triplets(rows: usize, cols: usize, triplets: impl IntoIterator<Item = (usize, usize, i64)>) -> Self {
        let mut acc: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "entry ({r},{c}) outside {rows}x{cols}");
            *acc.entry((r, c)).or_insert(0) += v;
        }
        let entries = acc.into_iter().filter(|&(_, v)| v != 0).map(|((r, c), v)| (r, c, v)).collect();
        Self { rows, cols, entries }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: Vec::new() }
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        Self::from_triplets(
            r,
            c,
            rows.iter().enumerate().flat_map(|(i, row)| row.iter().enumerate().map(move |(j, &v)| (i, j, v))),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[(usize, usize, i64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.entries
            .binary_search_by(|&(er, ec, _)| (er, ec).cmp(&(r, c)))
            .map_or(0, |i| self.entries[i].2)
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.cols, self.rows, self.entries.iter().map(|&(r, c, v)| (c, r, v)))
    }

    /// Exact product; panics on i64 overflow.
    pub fn mul(&self, other: &SparseIntMatrix) -> Result<SparseIntMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut by_row: Vec<Vec<(usize, i64)>> = vec![Vec::new(); other.rows];
        for &(r, c, v) in &other.entries {
            by_row[r].push((c, v));
        }
        let mut acc: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for &(i, k, a) in &self.entries {
            for &(j, b) in &by_row[k] {
                let e = acc.entry((i, j)).or_insert(0);
                *e = e.checked_add(a.checked_mul(b).expect("overflow")).expect("overflow");
            }
        }
        Ok(Self::from_triplets(self.rows, other.cols, acc.into_iter().map(|((i, j), v)| (i, j, v))))
    }

    pub fn mul_vec_i64(&self, x: &[i64]) -> Vec<i64> {
        assert_eq!(x.len(), self.cols);
        let mut y = vec![0i64; self.rows];
        for &(r, c, v) in &self.entries {
            y[r] += v * x[c];
        }
        y
    }

    pub fn mul_vec_rational(&self, x: &[Rational]) -> Vec<Rational> {
        assert_eq!(x.len(), self.cols);
        let mut y = vec![Rational::from_integer(0.into()); self.rows];
        for &(r, c, v) in &self.entries {
            y[r] += &x[c] * Rational::from_integer(v.into());
        }
        y
    }

    pub fn mul_vec_f64(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        let mut y = vec![0.0; self.rows];
        for &(r, c, v) in &self.entries {
            y[r] += v as f64 * x[c];
        }
        y
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut d = vec![vec![0i64; self.cols]; self.rows];
        for &(r, c, v) in &self.entries {
            d[r][c] = v;
        }
        d
    }

    pub fn to_bigint_rows(&self) -> Vec<Vec<BigInt>> {
        self.to_dense().into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect()
    }

    pub fn to_qmatrix(&self) -> QMatrix {
        QMatrix::from_int_rows(&self.to_dense())
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for &(r, c, v) in &self.entries {
            m[(r, c)] = v as f64;
        }
        m
    }
}

/// Finite oriented simplicial complex. Cells of each dimension are kept in
/// lexicographic order of their vertex tuples.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    dim: usize,
    cells: Vec<Vec<Simplex>>,
    index: Vec<HashMap<Simplex, usize>>,
    labels: BTreeMap<Simplex, String>,
}

impl PartialEq for SimplicialComplex {
    fn eq(&self, other: &Self) -> bool {
        self.cells == other.cells && self.labels == other.labels
    }
}

impl Eq for SimplicialComplex {}

/// Result of loading a cell description.
#[derive(Clone, Debug)]
pub struct LoadReport {
    pub complex: SimplicialComplex,
    /// Faces that were missing from the input and added to close it downward.
    pub added_faces: Vec<Simplex>,
}

impl SimplicialComplex {
    /// Builds the closure of the given top-level simplices.
    pub fn from_simplices(simplices: &[Vec<usize>]) -> Result<Self> {
        let mut by_dim: Vec<Vec<Vec<usize>>> = Vec::new();
        for s in simplices {
            if s.is_empty() {
                return Err(Error::Parse("empty simplex".into()));
            }
            let q = s.len() - 1;
            if by_dim.len() <= q {
                by_dim.resize(q + 1, Vec::new());
            }
            by_dim[q].push(s.clone());
        }
        let mut seen = BTreeSet::new();
        for level in &mut by_dim {
            level.retain(|s| {
                let mut t = s.clone();
                t.sort_unstable();
                seen.insert(t)
            });
        }
        Ok(load_complex(None, by_dim, BTreeMap::new())?.complex)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells(&self, q: usize) -> &[Simplex] {
        self.cells.get(q).map_or(&[], Vec::as_slice)
    }

    pub fn num_cells(&self, q: usize) -> usize {
        self.cells(q).len()
    }

    pub fn cell_counts(&self) -> Vec<usize> {
        self.cells.iter().map(Vec::len).collect()
    }

    pub fn top_cells(&self) -> &[Simplex] {
        self.cells(self.dim)
    }

    pub fn index_of(&self, cell: &[usize]) -> Option<usize> {
        let q = cell.len().checked_sub(1)?;
        self.index.get(q)?.get(cell).copied()
    }

    pub fn labels(&self) -> &BTreeMap<Simplex, String> {
        &self.labels
    }

    pub fn vertices(&self) -> Vec<usize> {
        self.cells(0).iter().map(|c| c[0]).collect()
    }

    /// Matrix of ∂_q : C_q → C_{q−1}, defined for 1 ≤ q ≤ dim.
    pub fn boundary_matrix(&self, q: usize) -> Result<SparseIntMatrix> {
        if q < 1 || q > self.dim {
            return Err(Error::DegreeOutOfRange { q, lo: 1, hi: self.dim });
        }
        Ok(self.boundary_or_zero(q))
    }

    /// Like [`boundary_matrix`](Self::boundary_matrix) but returns the zero map
    /// for q = 0 and q = dim + 1 (and beyond).
    pub fn boundary_or_zero(&self, q: usize) -> SparseIntMatrix {
        let cols = self.num_cells(q);
        if q == 0 {
            return SparseIntMatrix::zeros(0, cols);
        }
        let rows = self.num_cells(q - 1);
        let mut trip = Vec::with_capacity(cols * (q + 1));
        for (j, cell) in self.cells(q).iter().enumerate() {
            for i in 0..cell.len() {
                let mut face = cell.clone();
                face.remove(i);
                let r = self.index_of(&face).expect("complex is closed");
                trip.push((r, j, if i % 2 == 0 { 1 } else { -1 }));
            }
        }
        SparseIntMatrix::from_triplets(rows, cols, trip)
    }

    /// Coboundary d_q : C^q → C^{q+1} as the transpose of ∂_{q+1}.
    pub fn coboundary(&self, q: usize) -> SparseIntMatrix {
        self.boundary_or_zero(q + 1).transpose()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.cells.iter().enumerate().map(|(q, c)| if q % 2 == 0 { c.len() as i64 } else { -(c.len() as i64) }).sum()
    }

    /// Top cells sharing the codimension-one face `facet`.
    pub fn cofaces(&self, facet: &[usize]) -> Vec<usize> {
        let q = facet.len();
        self.cells(q)
            .iter()
            .enumerate()
            .filter(|(_, c)| is_face(facet, c))
            .map(|(i, _)| i)
            .collect()
    }

    /// Vertex tuples of every cell, grouped by dimension.
    pub fn all_cells(&self) -> &[Vec<Simplex>] {
        &self.cells
    }

    /// Applies a vertex relabelling and re-canonicalises the result.
    pub fn relabel_vertices(&self, map: &dyn Fn(usize) -> usize) -> Result<Self> {
        let cells: Vec<Vec<Vec<usize>>> =
            self.cells.iter().map(|level| level.iter().map(|c| c.iter().map(|&v| map(v)).collect()).collect()).collect();
        let labels = self
            .labels
            .iter()
            .map(|(c, n)| {
                let mut t: Vec<usize> = c.iter().map(|&v| map(v)).collect();
                t.sort_unstable();
                (t, n.clone())
            })
            .collect();
        Ok(load_complex(Some(self.dim), cells, labels)?.complex)
    }
}

/// True when `small` is a subset of `big` (both sorted).
pub fn is_face(small: &[usize], big: &[usize]) -> bool {
    let mut it = big.iter();
    small.iter().all(|v| it.any(|w| w == v))
}

/// Validates and canonicalises a cell listing. `cells[q]` must hold
/// (q+1)-vertex tuples; missing faces are added and reported.
pub fn load_complex(
    declared_dim: Option<usize>,
    cells: Vec<Vec<Vec<usize>>>,
    labels: BTreeMap<Simplex, String>,
) -> Result<LoadReport> {
    let mut listed: Vec<BTreeSet<Simplex>> = Vec::new();
    for (q, level) in cells.into_iter().enumerate() {
        for raw in level {
            if raw.len() != q + 1 {
                return Err(Error::MisplacedCell { cell: raw.clone(), listed: q, len: raw.len() });
            }
            let mut s = raw.clone();
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::RepeatedVertex(raw));
            }
            if listed.len() <= q {
                listed.resize(q + 1, BTreeSet::new());
            }
            if !listed[q].insert(s.clone()) {
                return Err(Error::DuplicateCell(s));
            }
        }
    }
    while listed.last().is_some_and(BTreeSet::is_empty) {
        listed.pop();
    }
    if listed.is_empty() {
        return Err(Error::Parse("complex has no cells".into()));
    }
    let dim = listed.len() - 1;
    if let Some(d) = declared_dim {
        if d != dim {
            return Err(Error::DimensionMismatch { declared: d, actual: dim });
        }
    }
    let mut added = Vec::new();
    for q in (1..=dim).rev() {
        let faces: Vec<Simplex> = listed[q]
            .iter()
            .flat_map(|c| (0..c.len()).map(move |i| {
                let mut f = c.clone();
                f.remove(i);
                f
            }))
            .collect();
        for f in faces {
            if listed[q - 1].insert(f.clone()) {
                added.push(f);
            }
        }
    }
    added.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    let cells: Vec<Vec<Simplex>> = listed.into_iter().map(|s| s.into_iter().collect()).collect();
    let index = cells.iter().map(|level| level.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect()).collect();
    let complex = SimplicialComplex { dim, cells, index, labels };
    for cell in complex.labels.keys() {
        if complex.index_of(cell).is_none() {
            return Err(Error::Parse(format!("label refers to unknown cell {cell:?}")));
        }
    }
    Ok(LoadReport { complex, added_faces: added })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_closure_and_signs() {
        let k = SimplicialComplex::from_simplices(&[vec![0, 1, 2]]).unwrap();
        assert_eq!(k.cell_counts(), vec![3, 3, 1]);
        let d1 = k.boundary_matrix(1).unwrap();
        // edge {0,1} is column 0
        assert_eq!(d1.get(0, 0), -1);
        assert_eq!(d1.get(1, 0), 1);
        let d2 = k.boundary_matrix(2).unwrap();
        let e = |a: usize, b: usize| k.index_of(&[a, b]).unwrap();
        assert_eq!(d2.get(e(1, 2), 0), 1);
        assert_eq!(d2.get(e(0, 2), 0), -1);
        assert_eq!(d2.get(e(0, 1), 0), 1);
        assert!(d1.mul(&d2).unwrap().is_zero());
        assert!(k.boundary_matrix(0).is_err());
        assert!(k.boundary_matrix(3).is_err());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            load_complex(None, vec![vec![], vec![vec![1, 1]]], BTreeMap::new()),
            Err(Error::RepeatedVertex(_))
        ));
        assert!(matches!(
            load_complex(None, vec![vec![], vec![vec![0, 1], vec![1, 0]]], BTreeMap::new()),
            Err(Error::DuplicateCell(_))
        ));
        assert!(matches!(
            load_complex(Some(2), vec![vec![], vec![vec![0, 1]]], BTreeMap::new()),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            load_complex(None, vec![vec![vec![0, 1]]], BTreeMap::new()),
            Err(Error::MisplacedCell { .. })
        ));
    }

    #[test]
    fn reports_added_faces() {
        let rep = load_complex(None, vec![vec![vec![0]], vec![], vec![vec![0, 1, 2]]], BTreeMap::new()).unwrap();
        assert_eq!(rep.added_faces.len(), 5);
        assert_eq!(rep.complex.euler_characteristic(), 1);
    }

    #[test]
    fn sparse_product_and_transpose() {
        let a = SparseIntMatrix::from_dense(&[vec![1, 0, 2], vec![0, -1, 0]]);
        let b = a.transpose();
        let p = a.mul(&b).unwrap();
        assert_eq!(p.to_dense(), vec![vec![5, 0], vec![0, 1]]);
        assert!(a.mul(&a).is_err());
        assert_eq!(SparseIntMatrix::from_triplets(1, 1, [(0, 0, 2), (0, 0, -2)]).nnz(), 0);
    }
}
