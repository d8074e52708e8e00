//! The unbiased symmetric six-port beamsplitter: a three-input/three-output
//! interferometer with a phase shifter on each input port. Its transfer
//! matrix `U_kl = 3^{-1/2} \u{3b1}^{(k-1)(l-1)} exp(i\u{3c6}_l)` is the 3x3
//! discrete Fourier matrix with per-column phases; measuring behind it is the
//! projective measurement `P_l = U\u{2020} |l><l| U`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::{cube_root_unity, CMatrix};

/// The three phase-shifter settings of one six-port device, in radians.
///
/// Angles are unrestricted; the trigonometric functions reduce them mod 2\u{3c0}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseTriple {
    pub phi1: f64,
    pub phi2: f64,
    pub phi3: f64,
}

impl PhaseTriple {
    pub fn new(phi1: f64, phi2: f64, phi3: f64) -> Result<Self> {
        if !(phi1.is_finite() && phi2.is_finite() && phi3.is_finite()) {
            return Err(Error::NonFinite("phase triple"));
        }
        Ok(PhaseTriple { phi1, phi2, phi3 })
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.phi1, self.phi2, self.phi3]
    }

    pub fn is_finite(&self) -> bool {
        self.phi1.is_finite() && self.phi2.is_finite() && self.phi3.is_finite()
    }
}

impl From<[f64; 3]> for PhaseTriple {
    fn from(a: [f64; 3]) -> Self {
        PhaseTriple {
            phi1: a[0],
            phi2: a[1],
            phi3: a[2],
        }
    }
}

/// Transfer matrix of an unbiased symmetric six-port beamsplitter.
///
/// Unitary to 1e-12 with every entry of modulus `3^{-1/2}`; rows index output
/// ports, columns index input ports, and the column phase `exp(i\u{3c6}_l)`
/// sits where the input phase shifter acts.
#[derive(Debug, Clone, PartialEq)]
pub struct SixPortUnitary {
    matrix: CMatrix,
}

impl SixPortUnitary {
    /// Builds the transfer matrix
    /// `U_kl = 3^{-1/2} \u{3b1}^{(k-1)(l-1)} exp(i\u{3c6}_l)` for `k, l` in
    /// `{1, 2, 3}`. Rejects non-finite phases.
    pub fn from_phases(phases: &PhaseTriple) -> Result<Self> {
        if !phases.is_finite() {
            return Err(Error::NonFinite("phase triple"));
        }
        let inv_sqrt3 = 1.0 / 3f64.sqrt();
        let phi = phases.as_array();
        let matrix = CMatrix::from_fn(3, 3, |k, l| {
            cube_root_unity((k * l) as i64) * Complex64::cis(phi[l]) * inv_sqrt3
        });
        Ok(SixPortUnitary { matrix })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Entry `U_kl` with 1-based port indices.
    pub fn entry(&self, k: usize, l: usize) -> Complex64 {
        self.matrix.at(k - 1, l - 1)
    }
}

/// Largest entrywise deviation of `U\u{2020}U` from the identity.
pub fn unitarity_deviation(matrix: &CMatrix) -> f64 {
    let product = matrix.dagger().mul(matrix).expect("3x3 product");
    product.max_abs_diff(&CMatrix::identity(matrix.rows()))
}

/// The three rank-1 projectors `P_l = U\u{2020} |l><l| U` of the measurement
/// realized by one six-port device.
///
/// Each is Hermitian, idempotent and of unit trace; distinct projectors are
/// orthogonal and the three sum to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorSet {
    projectors: [CMatrix; 3],
}

impl ProjectorSet {
    pub fn from_unitary(unitary: &SixPortUnitary) -> Result<Self> {
        ProjectorSet::from_matrix(unitary.matrix())
    }

    /// Builds the projectors from a raw 3x3 matrix, validating unitarity at
    /// 1e-10 rather than trusting the caller.
    pub fn from_matrix(matrix: &CMatrix) -> Result<Self> {
        if matrix.rows() != 3 || matrix.cols() != 3 {
            return Err(Error::DimensionMismatch {
                left_rows: matrix.rows(),
                left_cols: matrix.cols(),
                right_rows: 3,
                right_cols: 3,
            });
        }
        let deviation = unitarity_deviation(matrix);
        if deviation > 1e-10 {
            return Err(Error::NotUnitary { deviation });
        }
        // P_l(r, c) = conj(U_{l r}) U_{l c}: the outer product of the
        // conjugated l-th row with itself.
        let projector = |l: usize| {
            CMatrix::from_fn(3, 3, |r, c| matrix.at(l, r).conj() * matrix.at(l, c))
        };
        Ok(ProjectorSet {
            projectors: [projector(0), projector(1), projector(2)],
        })
    }

    /// Projector onto outcome `l` (1-based).
    pub fn projector(&self, l: usize) -> &CMatrix {
        &self.projectors[l - 1]
    }

    pub fn projectors(&self) -> &[CMatrix; 3] {
        &self.projectors
    }
}
