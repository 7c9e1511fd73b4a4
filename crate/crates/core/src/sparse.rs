//! Compressed-row sparse matrices over `f64` and `Complex64` with the
//! operations assembly needs: deterministic matvec, transpose, sparse
//! products, and Kronecker products.
//!
//! Column indices within each row are kept sorted and row sums run
//! sequentially in column order, so matrix-vector products are bitwise
//! reproducible regardless of thread count.

use num_complex::Complex64;
use rayon::prelude::*;

/// Scalar types the sparse kit works over.
pub trait Scalar:
    Copy
    + Send
    + Sync
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + PartialEq
{
    fn zero() -> Self;
    fn abs(self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> f64 {
        0.0
    }
    fn abs(self) -> f64 {
        f64::abs(self)
    }
}

impl Scalar for Complex64 {
    fn zero() -> Complex64 {
        Complex64::new(0.0, 0.0)
    }
    fn abs(self) -> f64 {
        self.norm()
    }
}

/// CSR matrix.
#[derive(Debug, Clone)]
pub struct Csr<T> {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<T>,
}

pub type CsrF = Csr<f64>;
pub type CsrC = Csr<Complex64>;

impl<T: Scalar> Csr<T> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Csr {
            nrows,
            ncols,
            row_ptr: vec![0; nrows + 1],
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    /// Builds from triplets; duplicates are summed, exact zeros dropped.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, T)]) -> Self {
        let mut per_row: Vec<Vec<(usize, T)>> = vec![Vec::new(); nrows];
        for &(r, c, v) in triplets {
            assert!(r < nrows && c < ncols, "triplet out of bounds");
            per_row[r].push((c, v));
        }
        Self::from_rows(ncols, per_row)
    }

    /// Builds from per-row column/value lists (any order, duplicates summed).
    pub fn from_rows(ncols: usize, mut per_row: Vec<Vec<(usize, T)>>) -> Self {
        let nrows = per_row.len();
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        row_ptr.push(0usize);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for row in per_row.iter_mut() {
            row.sort_by_key(|(c, _)| *c);
            let mut i = 0;
            while i < row.len() {
                let c = row[i].0;
                let mut v = row[i].1;
                let mut j = i + 1;
                while j < row.len() && row[j].0 == c {
                    v = v + row[j].1;
                    j += 1;
                }
                if v != T::zero() {
                    cols.push(c);
                    vals.push(v);
                }
                i = j;
            }
            row_ptr.push(cols.len());
        }
        Csr {
            nrows,
            ncols,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[T]) {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.cols[a..b], &self.vals[a..b])
    }

    pub fn iter_triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let (cs, vs) = self.row(i);
            cs.iter().zip(vs.iter()).map(move |(&c, &v)| (i, c, v))
        })
    }

    /// `y = A x`, rows in parallel, each row summed in column order.
    pub fn matvec(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        y.par_iter_mut().enumerate().for_each(|(i, out)| {
            let (cs, vs) = self.row(i);
            let mut acc = T::zero();
            for (c, v) in cs.iter().zip(vs) {
                acc = acc + *v * x[*c];
            }
            *out = acc;
        });
    }

    pub fn transpose(&self) -> Self {
        let mut per_row: Vec<Vec<(usize, T)>> = vec![Vec::new(); self.ncols];
        for (i, c, v) in self.iter_triplets() {
            per_row[c].push((i, v));
        }
        Csr::from_rows(self.nrows, per_row)
    }

    /// Sparse product `A B` with a drop tolerance on absolute value.
    pub fn matmul(&self, other: &Csr<T>, drop_tol: f64) -> Csr<T> {
        assert_eq!(self.ncols, other.nrows);
        let rows: Vec<Vec<(usize, T)>> = (0..self.nrows)
            .into_par_iter()
            .map(|i| {
                let mut acc: std::collections::BTreeMap<usize, T> = Default::default();
                let (cs, vs) = self.row(i);
                for (k, v) in cs.iter().zip(vs) {
                    let (ocs, ovs) = other.row(*k);
                    for (c, w) in ocs.iter().zip(ovs) {
                        let e = acc.entry(*c).or_insert_with(T::zero);
                        *e = *e + *v * *w;
                    }
                }
                acc.into_iter()
                    .filter(|(_, v)| v.abs() > drop_tol)
                    .collect()
            })
            .collect();
        Csr::from_rows(other.ncols, rows)
    }

    /// Kronecker product (self ⊗ other): entry `((i,k),(j,l)) = A_ij B_kl`
    /// at row `i·nrows(B)+k`, column `j·ncols(B)+l`.
    pub fn kron(&self, other: &Csr<T>) -> Csr<T> {
        let rows: Vec<Vec<(usize, T)>> = (0..self.nrows * other.nrows)
            .into_par_iter()
            .map(|ri| {
                let i = ri / other.nrows;
                let k = ri % other.nrows;
                let (acs, avs) = self.row(i);
                let (bcs, bvs) = other.row(k);
                let mut out = Vec::with_capacity(acs.len() * bcs.len());
                for (j, a) in acs.iter().zip(avs) {
                    for (l, b) in bcs.iter().zip(bvs) {
                        out.push((j * other.ncols + l, *a * *b));
                    }
                }
                out
            })
            .collect();
        Csr::from_rows(self.ncols * other.ncols, rows)
    }

    /// `self + scale · other` over the merged pattern.
    pub fn add_scaled(&self, other: &Csr<T>, scale: T) -> Csr<T> {
        assert_eq!(self.nrows, other.nrows);
        assert_eq!(self.ncols, other.ncols);
        let rows: Vec<Vec<(usize, T)>> = (0..self.nrows)
            .map(|i| {
                let (ac, av) = self.row(i);
                let (bc, bv) = other.row(i);
                let mut out: Vec<(usize, T)> =
                    ac.iter().zip(av).map(|(&c, &v)| (c, v)).collect();
                out.extend(bc.iter().zip(bv).map(|(&c, &v)| (c, scale * v)));
                out
            })
            .collect();
        Csr::from_rows(self.ncols, rows)
    }

    /// Symmetric diagonal scaling `D A D` for a diagonal vector `d`.
    pub fn scale_symmetric(&self, d: &[T]) -> Csr<T> {
        assert_eq!(d.len(), self.nrows);
        assert_eq!(d.len(), self.ncols);
        let mut out = self.clone();
        for i in 0..self.nrows {
            let (a, b) = (out.row_ptr[i], out.row_ptr[i + 1]);
            for idx in a..b {
                out.vals[idx] = d[i] * out.vals[idx] * d[out.cols[idx]];
            }
        }
        out
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.nrows.min(self.ncols))
            .map(|i| {
                let (cs, vs) = self.row(i);
                cs.iter()
                    .zip(vs)
                    .find(|(&c, _)| c == i)
                    .map(|(_, &v)| v)
                    .unwrap_or_else(T::zero)
            })
            .collect()
    }
}

impl Csr<f64> {
    /// Real matrix times complex vector, deterministic like [`Csr::matvec`].
    pub fn matvec_complex(&self, x: &[Complex64], y: &mut [Complex64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        y.par_iter_mut().enumerate().for_each(|(i, out)| {
            let (cs, vs) = self.row(i);
            let mut acc = Complex64::new(0.0, 0.0);
            for (c, v) in cs.iter().zip(vs) {
                acc += x[*c] * *v;
            }
            *out = acc;
        });
    }

    pub fn to_complex(&self) -> CsrC {
        Csr {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr: self.row_ptr.clone(),
            cols: self.cols.clone(),
            vals: self.vals.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Csr {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            cols: (0..n).collect(),
            vals: vec![1.0; n],
        }
    }
}

impl Csr<Complex64> {
    /// Documented triplet dump: one `row col re im` line per entry.
    pub fn dump_triplets(&self) -> String {
        let mut out = String::with_capacity(self.nnz() * 32);
        out.push_str(&format!(
            "# sparse complex matrix {} x {} nnz {}\n# row col re im\n",
            self.nrows,
            self.ncols,
            self.nnz()
        ));
        for (i, c, v) in self.iter_triplets() {
            out.push_str(&format!("{} {} {:.17e} {:.17e}\n", i, c, v.re, v.im));
        }
        out
    }
}
