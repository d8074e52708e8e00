//! Dense complex matrices at the fixed dimensions 1, 3, 9 and 27, with the
//! handful of kernels three-qutrit calculations need: Kronecker products,
//! conjugate transpose, trace and matrix products.
//!
//! Basis convention for three qutrits: the outcome triple `(l, m, n)` with
//! `l, m, n` in `{1, 2, 3}` lives at flat index `9(l-1) + 3(m-1) + (n-1)`.
//! The first factor (Alice) varies slowest. Every module in this crate
//! indexes through [`flat_index`] so the convention is declared once.

use num_complex::Complex64;

use crate::error::{Error, Result};

const SQRT3_HALF: f64 = 0.866_025_403_784_438_6;

/// The primitive cube root of unity, `exp(2i\u{3c0}/3)`.
pub const ALPHA: Complex64 = Complex64::new(-0.5, SQRT3_HALF);

/// `\u{3b1}^p = exp(2i\u{3c0}p/3)` for any integer `p`, negative included.
///
/// The three roots are stored as constants, so identities such as
/// `\u{3b1}^3 = 1` and `1 + \u{3b1} + \u{3b1}^2 = 0` hold exactly and the
/// result depends only on `p mod 3`.
pub fn cube_root_unity(p: i64) -> Complex64 {
    match p.rem_euclid(3) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(-0.5, SQRT3_HALF),
        _ => Complex64::new(-0.5, -SQRT3_HALF),
    }
}

/// Flat index of the outcome triple `(l, m, n)`, each component in `{1, 2, 3}`.
pub fn flat_index(l: usize, m: usize, n: usize) -> usize {
    debug_assert!((1..=3).contains(&l) && (1..=3).contains(&m) && (1..=3).contains(&n));
    9 * (l - 1) + 3 * (m - 1) + (n - 1)
}

fn dim_supported(n: usize) -> bool {
    matches!(n, 1 | 3 | 9 | 27)
}

/// Row-major complex matrix whose dimensions are restricted to 1, 3, 9, 27.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl CMatrix {
    /// Zero matrix. Panics on a dimension outside {1, 3, 9, 27}.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(dim_supported(rows), "unsupported row count {rows}");
        assert!(dim_supported(cols), "unsupported column count {cols}");
        CMatrix {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    /// Identity matrix of size `n`. Panics on an unsupported dimension.
    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix entry by entry from `f(row, col)` (0-based indices).
    /// Panics if `f` produces a non-finite value.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMatrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                let v = f(r, c);
                assert!(v.re.is_finite() && v.im.is_finite(), "non-finite entry at ({r}, {c})");
                m.entries[r * cols + c] = v;
            }
        }
        m
    }

    /// Builds a matrix from row-major entries, validating dimensions,
    /// length and finiteness.
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if !dim_supported(rows) {
            return Err(Error::UnsupportedDimension(rows));
        }
        if !dim_supported(cols) {
            return Err(Error::UnsupportedDimension(cols));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                left_rows: rows,
                left_cols: cols,
                right_rows: entries.len(),
                right_cols: 1,
            });
        }
        if entries.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite("matrix entries"));
        }
        Ok(CMatrix { rows, cols, entries })
    }

    /// Rank-1 projector `|l><l|` on the basis state `l` (1-based) in dimension `n`.
    pub fn basis_projector(n: usize, l: usize) -> Self {
        assert!((1..=n).contains(&l), "basis index {l} out of range for dimension {n}");
        let mut m = CMatrix::zeros(n, n);
        m.entries[(l - 1) * n + (l - 1)] = Complex64::new(1.0, 0.0);
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry at `(row, col)`, 0-based.
    pub fn at(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.cols + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Conjugate transpose. An exact involution: `a.dagger().dagger() == a`.
    pub fn dagger(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.entries[c * self.rows + r] = self.entries[r * self.cols + c].conj();
            }
        }
        out
    }

    /// Sum of diagonal entries. Rejects non-square input.
    pub fn trace(&self) -> Result<Complex64> {
        if self.rows != self.cols {
            return Err(Error::NonSquareTrace {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok((0..self.rows).map(|i| self.entries[i * self.cols + i]).sum())
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &CMatrix) -> Result<CMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: rhs.rows,
                right_cols: rhs.cols,
            });
        }
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.entries[r * self.cols + k];
                for c in 0..rhs.cols {
                    out.entries[r * rhs.cols + c] += a * rhs.entries[k * rhs.cols + c];
                }
            }
        }
        Ok(out)
    }

    /// Entrywise sum.
    pub fn add(&self, rhs: &CMatrix) -> Result<CMatrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: rhs.rows,
                right_cols: rhs.cols,
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(CMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    /// Scalar multiple.
    pub fn scale(&self, factor: Complex64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|v| v * factor).collect(),
        }
    }

    /// Kronecker product `self \u{2297} rhs`. Entry
    /// `((a r_B + b), (c c_B + d)) = self(a, c) * rhs(b, d)`.
    /// Rejects products whose dimensions leave {1, 3, 9, 27}.
    pub fn kron(&self, rhs: &CMatrix) -> Result<CMatrix> {
        let rows = self.rows * rhs.rows;
        let cols = self.cols * rhs.cols;
        if !dim_supported(rows) || !dim_supported(cols) {
            return Err(Error::KronOverflow { rows, cols });
        }
        let mut out = CMatrix::zeros(rows, cols);
        for a in 0..self.rows {
            for c in 0..self.cols {
                let left = self.entries[a * self.cols + c];
                for b in 0..rhs.rows {
                    for d in 0..rhs.cols {
                        out.entries[(a * rhs.rows + b) * cols + (c * rhs.cols + d)] =
                            left * rhs.entries[b * rhs.cols + d];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Largest entrywise absolute difference against `other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.rows, other.rows);
        assert_eq!(self.cols, other.cols);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cube_root_unity_identity_cases() {
        assert_eq!(cube_root_unity(0), c(1.0, 0.0));
        assert_eq!(cube_root_unity(3), c(1.0, 0.0));
        assert_eq!(cube_root_unity(-3), c(1.0, 0.0));
    }

    #[test]
    fn cube_root_unity_primitive_root() {
        let a = cube_root_unity(1);
        assert_eq!(a.re, -0.5);
        assert_eq!(a.im, 0.8660254037844386);
        assert_eq!(a, ALPHA);
    }

    #[test]
    fn cube_root_unity_depends_only_on_residue() {
        for p in -10i64..10 {
            assert_eq!(cube_root_unity(p), cube_root_unity(p + 3));
            assert_eq!(cube_root_unity(p), cube_root_unity(p - 300));
        }
    }

    #[test]
    fn cube_roots_sum_to_zero() {
        let s = cube_root_unity(0) + cube_root_unity(1) + cube_root_unity(2);
        assert!(s.norm() < 1e-15, "1 + \u{3b1} + \u{3b1}\u{b2} = {s}");
    }

    #[test]
    fn flat_index_convention() {
        assert_eq!(flat_index(1, 1, 1), 0);
        assert_eq!(flat_index(2, 2, 2), 13);
        assert_eq!(flat_index(3, 3, 3), 26);
        assert_eq!(flat_index(1, 2, 3), 5);
    }

    #[test]
    fn kron_of_identities() {
        let i3 = CMatrix::identity(3);
        let i9 = i3.kron(&i3).unwrap();
        assert_eq!(i9, CMatrix::identity(9));
    }

    #[test]
    fn kron_dimension_rule() {
        let a = CMatrix::from_fn(3, 3, |r, _| c(r as f64, 0.0));
        let b = CMatrix::from_fn(3, 3, |_, cc| c(0.0, cc as f64));
        let k = a.kron(&b).unwrap();
        assert_eq!((k.rows(), k.cols()), (9, 9));
    }

    #[test]
    fn kron_places_basis_projector_at_flat_index() {
        // |1><1| x |2><2| x |3><3| has its single 1 at the flat index of (1, 2, 3).
        let p = CMatrix::basis_projector(3, 1)
            .kron(&CMatrix::basis_projector(3, 2))
            .unwrap()
            .kron(&CMatrix::basis_projector(3, 3))
            .unwrap();
        let idx = flat_index(1, 2, 3);
        for r in 0..27 {
            for cc in 0..27 {
                let expected = if r == idx && cc == idx { 1.0 } else { 0.0 };
                assert_eq!(p.at(r, cc), c(expected, 0.0));
            }
        }
    }

    #[test]
    fn kron_rejects_overflow_past_27() {
        let i27 = CMatrix::identity(27);
        let i3 = CMatrix::identity(3);
        assert!(matches!(i27.kron(&i3), Err(Error::KronOverflow { .. })));
    }

    #[test]
    fn dagger_of_identity() {
        let i3 = CMatrix::identity(3);
        assert_eq!(i3.dagger(), i3);
    }

    #[test]
    fn trace_of_identity_27() {
        let t = CMatrix::identity(27).trace().unwrap();
        assert_eq!(t, c(27.0, 0.0));
    }

    #[test]
    fn trace_rejects_non_square() {
        let m = CMatrix::zeros(3, 9);
        assert!(matches!(m.trace(), Err(Error::NonSquareTrace { .. })));
    }

    #[test]
    fn trace_of_basis_projector_is_one() {
        for l in 1..=3 {
            let t = CMatrix::basis_projector(3, l).trace().unwrap();
            assert_eq!(t, c(1.0, 0.0));
        }
    }

    #[test]
    fn from_entries_rejects_non_finite() {
        let mut entries = vec![c(0.0, 0.0); 9];
        entries[4] = c(f64::NAN, 0.0);
        assert!(matches!(
            CMatrix::from_entries(3, 3, entries),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn from_entries_rejects_bad_dimension() {
        assert!(matches!(
            CMatrix::from_entries(2, 2, vec![c(0.0, 0.0); 4]),
            Err(Error::UnsupportedDimension(2))
        ));
    }

    prop_compose! {
        fn arb_complex()(re in -2.0f64..2.0, im in -2.0f64..2.0) -> Complex64 {
            Complex64::new(re, im)
        }
    }

    prop_compose! {
        fn arb_matrix3()(entries in prop::collection::vec(arb_complex(), 9)) -> CMatrix {
            CMatrix::from_entries(3, 3, entries).unwrap()
        }
    }

    proptest! {
        #[test]
        fn dagger_is_an_involution(a in arb_matrix3()) {
            prop_assert_eq!(a.dagger().dagger(), a);
        }

        #[test]
        fn dagger_reverses_products(a in arb_matrix3(), b in arb_matrix3()) {
            let lhs = a.mul(&b).unwrap().dagger();
            let rhs = b.dagger().mul(&a.dagger()).unwrap();
            prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }

        #[test]
        fn trace_is_linear(a in arb_matrix3(), b in arb_matrix3()) {
            let lhs = a.add(&b).unwrap().trace().unwrap();
            let rhs = a.trace().unwrap() + b.trace().unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }

        #[test]
        fn kron_is_associative(a in arb_matrix3(), b in arb_matrix3(), x in arb_complex()) {
            let c3 = CMatrix::from_fn(3, 3, |r, cc| x * Complex64::new(r as f64, cc as f64));
            let lhs = a.kron(&b).unwrap().kron(&c3).unwrap();
            let rhs = a.kron(&b.kron(&c3).unwrap()).unwrap();
            prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }
    }

    #[test]
    fn trace_is_linear_at_dimension_27() {
        // Deterministic large-dimension check alongside the proptest 3x3 one.
        let a = CMatrix::from_fn(27, 27, |r, cc| c((r as f64 * 0.37).sin(), (cc as f64 * 0.61).cos()));
        let b = CMatrix::from_fn(27, 27, |r, cc| c((r as f64 + 1.3).cos(), (cc as f64 - 0.7).sin()));
        let lhs = a.add(&b).unwrap().trace().unwrap();
        let rhs = a.trace().unwrap() + b.trace().unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }
}
