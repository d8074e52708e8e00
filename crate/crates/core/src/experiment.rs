//! The quantum side of the three-party gedanken experiment: pure three-qutrit
//! states, isotropic noise, the 8 x 27 joint probability table measured
//! through six-port beamsplitters, and the complex correlation function that
//! carries the same information in eight numbers.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sixport::{PhaseTriple, ProjectorSet, SixPortUnitary};
use crate::tensor::{cube_root_unity, flat_index, CMatrix};

/// Squared-norm tolerance for accepting a state vector.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Tolerance at which the nine probabilities of a residue class must agree
/// before they are collapsed to a single group value.
pub const GROUPING_TOLERANCE: f64 = 1e-10;

/// A pure state of three qutrits: 27 amplitudes in the flat basis order of
/// [`flat_index`], normalized to 1e-12 in squared norm.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: [Complex64; 27],
}

impl PureState {
    pub fn new(amplitudes: [Complex64; 27]) -> Result<Self> {
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite("state amplitudes"));
        }
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        let deviation = (norm_sqr - 1.0).abs();
        if deviation > NORM_TOLERANCE {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(PureState { amplitudes })
    }

    /// The maximally entangled state `(|111> + |222> + |333>)/sqrt(3)`.
    pub fn ghz() -> Self {
        let mut amplitudes = [Complex64::new(0.0, 0.0); 27];
        let amp = Complex64::new(1.0 / 3f64.sqrt(), 0.0);
        amplitudes[flat_index(1, 1, 1)] = amp;
        amplitudes[flat_index(2, 2, 2)] = amp;
        amplitudes[flat_index(3, 3, 3)] = amp;
        PureState { amplitudes }
    }

    pub fn amplitudes(&self) -> &[Complex64; 27] {
        &self.amplitudes
    }

    /// Amplitude of the basis state `|lmn>`, 1-based components.
    pub fn amplitude(&self, l: usize, m: usize, n: usize) -> Complex64 {
        self.amplitudes[flat_index(l, m, n)]
    }

    /// Density matrix `|psi><psi|` as a 27 x 27 matrix.
    pub fn density_matrix(&self) -> CMatrix {
        CMatrix::from_fn(27, 27, |r, c| self.amplitudes[r] * self.amplitudes[c].conj())
    }
}

/// A pure state mixed with isotropic noise:
/// `rho(F) = (1 - F) |psi><psi| + (F/27) I`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisyState {
    pure: PureState,
    noise_fraction: f64,
}

impl NoisyState {
    pub fn new(pure: PureState, noise_fraction: f64) -> Result<Self> {
        if !noise_fraction.is_finite() || !(0.0..=1.0).contains(&noise_fraction) {
            return Err(Error::InvalidNoiseFraction(noise_fraction));
        }
        Ok(NoisyState {
            pure,
            noise_fraction,
        })
    }

    pub fn pure(&self) -> &PureState {
        &self.pure
    }

    pub fn noise_fraction(&self) -> f64 {
        self.noise_fraction
    }

    /// The full 27 x 27 density operator of the mixture.
    pub fn density_matrix(&self) -> CMatrix {
        let pure_part = self
            .pure
            .density_matrix()
            .scale(Complex64::new(1.0 - self.noise_fraction, 0.0));
        let noise_part =
            CMatrix::identity(27).scale(Complex64::new(self.noise_fraction / 27.0, 0.0));
        pure_part.add(&noise_part).expect("27x27 shapes agree")
    }
}

/// The six phase triples of the experiment: two settings for each of Alice,
/// Bob and Celine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSettings {
    pub alice: [PhaseTriple; 2],
    pub bob: [PhaseTriple; 2],
    pub celine: [PhaseTriple; 2],
}

impl MeasurementSettings {
    pub fn new(
        alice: [PhaseTriple; 2],
        bob: [PhaseTriple; 2],
        celine: [PhaseTriple; 2],
    ) -> Result<Self> {
        let settings = MeasurementSettings { alice, bob, celine };
        if settings.triples().iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite("measurement settings"));
        }
        Ok(settings)
    }

    pub fn triples(&self) -> [PhaseTriple; 6] {
        [
            self.alice[0],
            self.alice[1],
            self.bob[0],
            self.bob[1],
            self.celine[0],
            self.celine[1],
        ]
    }
}

/// Index of the setting triple `(i, j, k)`, each in `{1, 2}`; `i` slowest.
pub fn setting_index(i: usize, j: usize, k: usize) -> usize {
    debug_assert!((1..=2).contains(&i) && (1..=2).contains(&j) && (1..=2).contains(&k));
    4 * (i - 1) + 2 * (j - 1) + (k - 1)
}

/// All eight setting triples in index order.
pub fn setting_triples() -> impl Iterator<Item = (usize, usize, usize)> {
    (1..=2).flat_map(|i| (1..=2).flat_map(move |j| (1..=2).map(move |k| (i, j, k))))
}

/// The 8 x 27 = 216 joint probabilities `W(a^i_l, b^j_m, c^k_n)`, indexed by
/// setting triple and outcome triple.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTable {
    entries: [[f64; 27]; 8],
}

impl ProbabilityTable {
    /// Wraps raw entries, enforcing that every value lies in
    /// `[-1e-12, 1 + 1e-12]` and that each setting triple's 27 outcomes sum
    /// to 1 within 1e-12. Tables need not come from any quantum state.
    pub fn from_entries(entries: [[f64; 27]; 8]) -> Result<Self> {
        for row in &entries {
            let mut sum = 0.0;
            for &w in row {
                if !w.is_finite() {
                    return Err(Error::NonFinite("probability table"));
                }
                if !(-1e-12..=1.0 + 1e-12).contains(&w) {
                    return Err(Error::ConsistencyCheck(format!(
                        "probability {w} outside [0, 1]"
                    )));
                }
                sum += w;
            }
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::ConsistencyCheck(format!(
                    "setting triple sums to {sum}, not 1"
                )));
            }
        }
        Ok(ProbabilityTable { entries })
    }

    /// Probability of outcomes `(l, m, n)` under setting triple `(i, j, k)`,
    /// all 1-based.
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize, m: usize, n: usize) -> f64 {
        self.entries[setting_index(i, j, k)][flat_index(l, m, n)]
    }

    /// The 27 outcome probabilities of one setting triple.
    pub fn outcomes(&self, i: usize, j: usize, k: usize) -> &[f64; 27] {
        &self.entries[setting_index(i, j, k)]
    }
}

/// The eight complex correlation values `Q_ijk`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTable {
    values: [Complex64; 8],
}

impl CorrelationTable {
    pub fn from_fn(mut f: impl FnMut(usize, usize, usize) -> Complex64) -> Self {
        let mut values = [Complex64::new(0.0, 0.0); 8];
        for (i, j, k) in setting_triples() {
            let q = f(i, j, k);
            debug_assert!(q.norm() <= 1.0 + 1e-12, "correlation |Q| = {} > 1", q.norm());
            values[setting_index(i, j, k)] = q;
        }
        CorrelationTable { values }
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.values[setting_index(i, j, k)]
    }

    pub fn values(&self) -> &[Complex64; 8] {
        &self.values
    }
}

/// The common probability of each outcome-residue group under one setting
/// triple: `w1` for `l+m+n \u{2261} 1 (mod 3)`, `w2` for residue 2, `w3` for
/// residue 0. The three sum to 1/9.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupTriple {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
}

/// Residue group label of an outcome triple: `W1`, `W2`, `W3` for
/// `l+m+n \u{2261} 1, 2, 0 (mod 3)` respectively.
fn group_of_residue(residue: usize) -> u8 {
    match residue {
        1 => 1,
        2 => 2,
        _ => 3,
    }
}

/// Amplitudes of `(U_A \u{2297} U_B \u{2297} U_C) |psi>`; entry `(l, m, n)`
/// is the amplitude of landing in output ports `l, m, n`.
fn transformed_amplitudes(
    state: &PureState,
    ua: &SixPortUnitary,
    ub: &SixPortUnitary,
    uc: &SixPortUnitary,
) -> [Complex64; 27] {
    let zero = Complex64::new(0.0, 0.0);
    let psi = state.amplitudes();

    // Contract one tensor leg at a time.
    let mut t1 = [zero; 27];
    for l in 1..=3 {
        for m in 1..=3 {
            for n in 1..=3 {
                let mut acc = zero;
                for a in 1..=3 {
                    acc += ua.entry(l, a) * psi[flat_index(a, m, n)];
                }
                t1[flat_index(l, m, n)] = acc;
            }
        }
    }
    let mut t2 = [zero; 27];
    for l in 1..=3 {
        for m in 1..=3 {
            for n in 1..=3 {
                let mut acc = zero;
                for b in 1..=3 {
                    acc += ub.entry(m, b) * t1[flat_index(l, b, n)];
                }
                t2[flat_index(l, m, n)] = acc;
            }
        }
    }
    let mut t3 = [zero; 27];
    for l in 1..=3 {
        for m in 1..=3 {
            for n in 1..=3 {
                let mut acc = zero;
                for c in 1..=3 {
                    acc += uc.entry(n, c) * t2[flat_index(l, m, c)];
                }
                t3[flat_index(l, m, n)] = acc;
            }
        }
    }
    t3
}

fn party_unitaries(triples: &[PhaseTriple; 2]) -> Result<[SixPortUnitary; 2]> {
    Ok([
        SixPortUnitary::from_phases(&triples[0])?,
        SixPortUnitary::from_phases(&triples[1])?,
    ])
}

/// The full probability table of the experiment,
/// `W(i,j,k,l,m,n) = Tr(rho(F) P^i_l \u{2297} Q^j_m \u{2297} R^k_n)`,
/// computed through the algebraically equal mixture fast path
/// `(1-F) |<lmn-measured|psi>|^2 + F/27`.
///
/// [`joint_probabilities_dense`] evaluates the same trace against the full
/// 27 x 27 density operator and serves as the cross-check route.
pub fn joint_probabilities(
    state: &NoisyState,
    settings: &MeasurementSettings,
) -> Result<ProbabilityTable> {
    let ua = party_unitaries(&settings.alice)?;
    let ub = party_unitaries(&settings.bob)?;
    let uc = party_unitaries(&settings.celine)?;
    let f = state.noise_fraction();

    let mut entries = [[0.0; 27]; 8];
    for (i, j, k) in setting_triples() {
        let amps = transformed_amplitudes(state.pure(), &ua[i - 1], &ub[j - 1], &uc[k - 1]);
        let row = &mut entries[setting_index(i, j, k)];
        for (slot, amp) in row.iter_mut().zip(amps.iter()) {
            *slot = (1.0 - f) * amp.norm_sqr() + f / 27.0;
        }
    }
    ProbabilityTable::from_entries(entries)
}

/// Reference route for [`joint_probabilities`]: builds every
/// `P^i_l \u{2297} Q^j_m \u{2297} R^k_n` as a 27 x 27 matrix and takes the
/// trace against the full density operator. Slow; kept for verification.
pub fn joint_probabilities_dense(
    state: &NoisyState,
    settings: &MeasurementSettings,
) -> Result<ProbabilityTable> {
    let projector_sets = |triples: &[PhaseTriple; 2]| -> Result<[ProjectorSet; 2]> {
        let [u1, u2] = party_unitaries(triples)?;
        Ok([
            ProjectorSet::from_unitary(&u1)?,
            ProjectorSet::from_unitary(&u2)?,
        ])
    };
    let alice = projector_sets(&settings.alice)?;
    let bob = projector_sets(&settings.bob)?;
    let celine = projector_sets(&settings.celine)?;
    let rho = state.density_matrix();

    let mut entries = [[0.0; 27]; 8];
    for (i, j, k) in setting_triples() {
        let row = &mut entries[setting_index(i, j, k)];
        for l in 1..=3 {
            for m in 1..=3 {
                for n in 1..=3 {
                    let observable = alice[i - 1]
                        .projector(l)
                        .kron(bob[j - 1].projector(m))?
                        .kron(celine[k - 1].projector(n))?;
                    let w = rho.mul(&observable)?.trace()?;
                    row[flat_index(l, m, n)] = w.re;
                }
            }
        }
    }
    ProbabilityTable::from_entries(entries)
}

/// Collapses the 27 probabilities of setting triple `(i, j, k)` into the
/// three residue-group values `(w1, w2, w3)`.
///
/// Errors when any group's nine probabilities spread beyond
/// [`GROUPING_TOLERANCE`], naming the worst group; that signals a state
/// without the GHZ grouping property, for which the group picture does not
/// apply.
pub fn group_probabilities(
    table: &ProbabilityTable,
    i: usize,
    j: usize,
    k: usize,
) -> Result<GroupTriple> {
    let outcomes = table.outcomes(i, j, k);
    let mut sums = [0.0f64; 3];
    let mut spreads = [(f64::INFINITY, f64::NEG_INFINITY); 3];
    for l in 1..=3 {
        for m in 1..=3 {
            for n in 1..=3 {
                let residue = (l + m + n) % 3;
                let w = outcomes[flat_index(l, m, n)];
                sums[residue] += w;
                let (lo, hi) = &mut spreads[residue];
                *lo = lo.min(w);
                *hi = hi.max(w);
            }
        }
    }

    let mut worst = (0usize, 0.0f64);
    for (residue, (lo, hi)) in spreads.iter().enumerate() {
        let spread = hi - lo;
        if spread > worst.1 {
            worst = (residue, spread);
        }
    }
    if worst.1 > GROUPING_TOLERANCE {
        return Err(Error::GroupingViolated {
            group: group_of_residue(worst.0),
            residue: worst.0 as u8,
            spread: worst.1,
        });
    }

    Ok(GroupTriple {
        w1: sums[1] / 9.0,
        w2: sums[2] / 9.0,
        w3: sums[0] / 9.0,
    })
}

/// The correlation function
/// `Q_ijk = sum_{l,m,n} \u{3b1}^{l+m+n} W(i,j,k,l,m,n)` for every setting
/// triple. Defined for any table; no grouping is assumed.
pub fn correlation_from_probabilities(table: &ProbabilityTable) -> CorrelationTable {
    CorrelationTable::from_fn(|i, j, k| {
        let outcomes = table.outcomes(i, j, k);
        let mut q = Complex64::new(0.0, 0.0);
        for l in 1..=3 {
            for m in 1..=3 {
                for n in 1..=3 {
                    q += cube_root_unity((l + m + n) as i64) * outcomes[flat_index(l, m, n)];
                }
            }
        }
        q
    })
}

/// Closed form of the correlation function for the noiseless GHZ state:
///
/// `Q_ijk = (1/3) [ e^{i(\u{394}\u{3c6}_{12} + \u{394}\u{3c8}_{12} + \u{394}\u{3b4}_{12})}
///               + e^{i(\u{394}\u{3c6}_{23} + \u{394}\u{3c8}_{23} + \u{394}\u{3b4}_{23})}
///               + e^{i(\u{394}\u{3c6}_{31} + \u{394}\u{3c8}_{31} + \u{394}\u{3b4}_{31})} ]`
///
/// where `\u{394}\u{3c6}_{ab}` is the phase difference `\u{3c6}_a - \u{3c6}_b`
/// of Alice's `i`-th triple, and likewise for Bob's and Celine's.
pub fn correlation_closed_form(settings: &MeasurementSettings) -> CorrelationTable {
    CorrelationTable::from_fn(|i, j, k| {
        let a = settings.alice[i - 1].as_array();
        let b = settings.bob[j - 1].as_array();
        let c = settings.celine[k - 1].as_array();
        let theta = [a[0] + b[0] + c[0], a[1] + b[1] + c[1], a[2] + b[2] + c[2]];
        (Complex64::cis(theta[0] - theta[1])
            + Complex64::cis(theta[1] - theta[2])
            + Complex64::cis(theta[2] - theta[0]))
            / 3.0
    })
}

/// Inverts one correlation value into its residue-group probabilities:
///
/// `w1 = (1 - Re Q + sqrt(3) Im Q)/27`,
/// `w2 = (1 - Re Q - sqrt(3) Im Q)/27`,
/// `w3 = 1/9 - w1 - w2`.
pub fn probabilities_from_correlation(q: Complex64) -> GroupTriple {
    debug_assert!(q.norm() <= 1.0 + 1e-12);
    let sqrt3 = 3f64.sqrt();
    let w1 = (1.0 - q.re + sqrt3 * q.im) / 27.0;
    let w2 = (1.0 - q.re - sqrt3 * q.im) / 27.0;
    GroupTriple {
        w1,
        w2,
        w3: 1.0 / 9.0 - w1 - w2,
    }
}

/// Isotropic noise acts on correlations as the uniform contraction
/// `Q^F_ijk = (1 - F) Q_ijk`.
pub fn scale_correlations(table: &CorrelationTable, noise_fraction: f64) -> Result<CorrelationTable> {
    if !noise_fraction.is_finite() || !(0.0..=1.0).contains(&noise_fraction) {
        return Err(Error::InvalidNoiseFraction(noise_fraction));
    }
    Ok(CorrelationTable::from_fn(|i, j, k| {
        table.get(i, j, k) * (1.0 - noise_fraction)
    }))
}
