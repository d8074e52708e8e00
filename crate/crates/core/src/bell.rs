//! The Clauser-Horne-Bell inequality for three qutrits, in both of its
//! equivalent forms, together with the machinery that proves the classical
//! bound: expanding the inequality over the 729 deterministic local
//! strategies and scanning them exhaustively.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::experiment::{
    correlation_from_probabilities, joint_probabilities, setting_triples, CorrelationTable,
    MeasurementSettings, NoisyState, ProbabilityTable, PureState,
};
use crate::tensor::{cube_root_unity, flat_index};

/// The local-realistic bound of the inequality.
pub const CLASSICAL_BOUND: f64 = 3.0;

/// One term of the inequality: an integer coefficient attached to the sum of
/// joint probabilities with `l+m+n \u{2261} residue (mod 3)` under setting
/// triple `settings`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InequalityTerm {
    pub coefficient: i32,
    pub settings: (u8, u8, u8),
    pub residue: u8,
}

/// The canonical eight terms. Their coefficients sum to +3, which is also
/// the classical bound.
pub const INEQUALITY_TERMS: [InequalityTerm; 8] = [
    InequalityTerm { coefficient: -1, settings: (2, 2, 1), residue: 1 },
    InequalityTerm { coefficient: -1, settings: (1, 1, 1), residue: 1 },
    InequalityTerm { coefficient: 2, settings: (1, 2, 2), residue: 1 },
    InequalityTerm { coefficient: 1, settings: (1, 2, 1), residue: 0 },
    InequalityTerm { coefficient: -1, settings: (2, 1, 2), residue: 0 },
    InequalityTerm { coefficient: 1, settings: (2, 1, 1), residue: 2 },
    InequalityTerm { coefficient: 1, settings: (2, 2, 2), residue: 2 },
    InequalityTerm { coefficient: 1, settings: (1, 1, 2), residue: 2 },
];

/// A deterministic local strategy: the outcome each observer would produce
/// for each of their two observables, every component in `{1, 2, 3}`.
///
/// These are the extreme points of the local-realistic polytope, so the
/// maximum of the inequality over all 729 of them bounds every
/// local-realistic model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct JointAssignment {
    pub l1: u8,
    pub l2: u8,
    pub m1: u8,
    pub m2: u8,
    pub n1: u8,
    pub n2: u8,
}

impl JointAssignment {
    pub fn new(l1: u8, l2: u8, m1: u8, m2: u8, n1: u8, n2: u8) -> Result<Self> {
        for v in [l1, l2, m1, m2, n1, n2] {
            if !(1..=3).contains(&v) {
                return Err(Error::InvalidOutcome(v));
            }
        }
        Ok(JointAssignment { l1, l2, m1, m2, n1, n2 })
    }

    /// Flat index with `l1` varying slowest and `n2` fastest.
    pub fn index(&self) -> usize {
        self.components()
            .iter()
            .fold(0usize, |acc, &v| acc * 3 + (v as usize - 1))
    }

    pub fn from_index(index: usize) -> Self {
        debug_assert!(index < 729);
        let mut rest = index;
        let mut components = [0u8; 6];
        for slot in components.iter_mut().rev() {
            *slot = (rest % 3) as u8 + 1;
            rest /= 3;
        }
        JointAssignment {
            l1: components[0],
            l2: components[1],
            m1: components[2],
            m2: components[3],
            n1: components[4],
            n2: components[5],
        }
    }

    pub fn components(&self) -> [u8; 6] {
        [self.l1, self.l2, self.m1, self.m2, self.n1, self.n2]
    }

    /// All 729 assignments in flat-index order.
    pub fn all() -> impl Iterator<Item = JointAssignment> {
        (0..729).map(JointAssignment::from_index)
    }

    /// The outcome triple this strategy produces under setting triple
    /// `(i, j, k)`, 1-based.
    pub fn outcomes_at(&self, i: usize, j: usize, k: usize) -> (u8, u8, u8) {
        let l = if i == 1 { self.l1 } else { self.l2 };
        let m = if j == 1 { self.m1 } else { self.m2 };
        let n = if k == 1 { self.n1 } else { self.n2 };
        (l, m, n)
    }
}

/// The integer coefficient each of the 729 deterministic strategies carries
/// in the expanded inequality, in flat-index order.
///
/// The values land in `{-3, 0, 3}` and sum to 729.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientLedger {
    coefficients: Vec<i32>,
}

impl CoefficientLedger {
    pub fn coefficient(&self, assignment: &JointAssignment) -> i32 {
        self.coefficients[assignment.index()]
    }

    pub fn coefficients(&self) -> &[i32] {
        &self.coefficients
    }

    pub fn sum(&self) -> i64 {
        self.coefficients.iter().map(|&c| c as i64).sum()
    }

    pub fn max(&self) -> i32 {
        *self.coefficients.iter().max().expect("ledger is non-empty")
    }

    /// Count of each coefficient value.
    pub fn histogram(&self) -> BTreeMap<i32, usize> {
        let mut histogram = BTreeMap::new();
        for &c in &self.coefficients {
            *histogram.entry(c).or_insert(0) += 1;
        }
        histogram
    }
}

/// Value of the probability form: the signed sum of residue-class
/// probability masses named by [`INEQUALITY_TERMS`]. Local realism keeps it
/// at or below [`CLASSICAL_BOUND`].
pub fn bell_probability_form(table: &ProbabilityTable) -> f64 {
    INEQUALITY_TERMS
        .iter()
        .map(|term| {
            let (i, j, k) = term.settings;
            let outcomes = table.outcomes(i as usize, j as usize, k as usize);
            let mut mass = 0.0;
            for l in 1..=3usize {
                for m in 1..=3usize {
                    for n in 1..=3usize {
                        if (l + m + n) % 3 == term.residue as usize {
                            mass += outcomes[flat_index(l, m, n)];
                        }
                    }
                }
            }
            f64::from(term.coefficient) * mass
        })
        .sum()
}

/// Value of the correlation form,
/// `Re[Q_121 - Q_212 + \u{3b1}(Q_112 + Q_211 + Q_222) + \u{3b1}^2(2 Q_122 - Q_111 - Q_221)]`.
/// Local realism keeps it at or below [`CLASSICAL_BOUND`].
pub fn bell_correlation_form(q: &CorrelationTable) -> f64 {
    let alpha = cube_root_unity(1);
    let alpha2 = cube_root_unity(2);
    let value = q.get(1, 2, 1) - q.get(2, 1, 2)
        + alpha * (q.get(1, 1, 2) + q.get(2, 1, 1) + q.get(2, 2, 2))
        + alpha2 * (2.0 * q.get(1, 2, 2) - q.get(1, 1, 1) - q.get(2, 2, 1));
    value.re
}

/// Expands the inequality over the joint distribution: the coefficient of a
/// deterministic strategy is the signed count of terms whose residue
/// constraint its outcomes satisfy,
/// `c(a) = sum_t coeff_t * [l_i + m_j + n_k \u{2261} g_t (mod 3)]`.
///
/// A point mass on one strategy is itself a valid joint distribution, so
/// `c(a)` equals [`vertex_value`] of that strategy; since every coefficient
/// is at most 3 and joint probabilities sum to 1, the bound follows.
pub fn expand_coefficients() -> CoefficientLedger {
    let coefficients = JointAssignment::all()
        .map(|assignment| assignment_coefficient(&assignment))
        .collect();
    CoefficientLedger { coefficients }
}

fn assignment_coefficient(assignment: &JointAssignment) -> i32 {
    INEQUALITY_TERMS
        .iter()
        .map(|term| {
            let (i, j, k) = term.settings;
            let (l, m, n) = assignment.outcomes_at(i as usize, j as usize, k as usize);
            if (l + m + n) % 3 == term.residue {
                term.coefficient
            } else {
                0
            }
        })
        .sum()
}

/// The probability table of the point-mass local model that plays strategy
/// `assignment`: under setting triple `(i, j, k)` the outcome triple
/// `(l_i, m_j, n_k)` occurs with certainty.
pub fn induced_table(assignment: &JointAssignment) -> ProbabilityTable {
    let mut entries = [[0.0; 27]; 8];
    for (i, j, k) in setting_triples() {
        let (l, m, n) = assignment.outcomes_at(i, j, k);
        entries[crate::experiment::setting_index(i, j, k)]
            [flat_index(l as usize, m as usize, n as usize)] = 1.0;
    }
    ProbabilityTable::from_entries(entries).expect("point mass is normalized")
}

/// The correlation table of the same point-mass model:
/// `Q_ijk = \u{3b1}^{l_i + m_j + n_k}`.
pub fn induced_correlations(assignment: &JointAssignment) -> CorrelationTable {
    CorrelationTable::from_fn(|i, j, k| {
        let (l, m, n) = assignment.outcomes_at(i, j, k);
        cube_root_unity((l + m + n) as i64)
    })
}

/// Inequality value of one deterministic strategy, evaluated through the
/// probability form of its induced table. Float route; agrees exactly with
/// the integer ledger coefficient.
pub fn vertex_value(assignment: &JointAssignment) -> f64 {
    bell_probability_form(&induced_table(assignment))
}

/// Exhaustive integer scan of all 729 deterministic strategies: the maximum
/// inequality value and every strategy attaining it.
pub fn classical_maximum() -> (f64, Vec<JointAssignment>) {
    let ledger = expand_coefficients();
    let max = ledger.max();
    let maximizers = JointAssignment::all()
        .filter(|a| ledger.coefficient(a) == max)
        .collect();
    (f64::from(max), maximizers)
}

/// The same scan through the correlation form of each strategy's point-mass
/// correlations. Serves as the float cross-check of [`classical_maximum`].
pub fn classical_maximum_correlation() -> (f64, Vec<JointAssignment>) {
    let values: Vec<f64> = JointAssignment::all()
        .map(|a| bell_correlation_form(&induced_correlations(&a)))
        .collect();
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let maximizers = JointAssignment::all()
        .filter(|a| (values[a.index()] - max).abs() < 1e-9)
        .collect();
    (max, maximizers)
}

/// A permutation of the outcome labels `{1, 2, 3}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutcomePermutation([u8; 3]);

impl OutcomePermutation {
    pub fn new(images: [u8; 3]) -> Result<Self> {
        let mut sorted = images;
        sorted.sort_unstable();
        if sorted != [1, 2, 3] {
            return Err(Error::InvalidPermutation(images));
        }
        Ok(OutcomePermutation(images))
    }

    pub fn identity() -> Self {
        OutcomePermutation([1, 2, 3])
    }

    pub fn apply(&self, outcome: u8) -> u8 {
        self.0[outcome as usize - 1]
    }

    pub fn images(&self) -> [u8; 3] {
        self.0
    }
}

/// A relabeling of the experiment: one outcome permutation per party-setting
/// slot (ordered Alice 1, Alice 2, Bob 1, Bob 2, Celine 1, Celine 2) and an
/// optional swap of each party's two settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Relabeling {
    pub outcome_perms: [OutcomePermutation; 6],
    pub swap_settings: [bool; 3],
}

impl Relabeling {
    pub fn identity() -> Self {
        Relabeling {
            outcome_perms: [OutcomePermutation::identity(); 6],
            swap_settings: [false; 3],
        }
    }

    /// Rewrites a strategy: each outcome permutation acts on its own
    /// party-setting component, then a swapped party exchanges its two
    /// components (carrying the permuted outcomes along).
    pub fn apply(&self, assignment: &JointAssignment) -> JointAssignment {
        let components = assignment.components();
        let mut out = [0u8; 6];
        for party in 0..3 {
            let first = self.outcome_perms[2 * party].apply(components[2 * party]);
            let second = self.outcome_perms[2 * party + 1].apply(components[2 * party + 1]);
            if self.swap_settings[party] {
                out[2 * party] = second;
                out[2 * party + 1] = first;
            } else {
                out[2 * party] = first;
                out[2 * party + 1] = second;
            }
        }
        JointAssignment {
            l1: out[0],
            l2: out[1],
            m1: out[2],
            m2: out[3],
            n1: out[4],
            n2: out[5],
        }
    }
}

/// Carries the ledger across a relabeling: the relabeled strategy inherits
/// the coefficient of its preimage, so the new ledger describes the member
/// of the inequality family generated by the relabeling.
pub fn relabel_ledger(
    ledger: &CoefficientLedger,
    relabeling: &Relabeling,
) -> Result<CoefficientLedger> {
    if ledger.coefficients.len() != 729 {
        return Err(Error::ConsistencyCheck(format!(
            "ledger has {} entries, expected 729",
            ledger.coefficients.len()
        )));
    }
    let mut coefficients = vec![0i32; 729];
    for assignment in JointAssignment::all() {
        let image = relabeling.apply(&assignment);
        coefficients[image.index()] = ledger.coefficient(&assignment);
    }
    Ok(CoefficientLedger { coefficients })
}

/// Full noisy pipeline to the correlation-form value: probabilities of
/// `rho(F)` at `settings`, their correlations, then the inequality.
pub fn evaluate_correlation_form(
    state: &PureState,
    settings: &MeasurementSettings,
    noise_fraction: f64,
) -> Result<f64> {
    let noisy = NoisyState::new(state.clone(), noise_fraction)?;
    let table = joint_probabilities(&noisy, settings)?;
    Ok(bell_correlation_form(&correlation_from_probabilities(
        &table,
    )))
}

/// As [`evaluate_correlation_form`], for the probability form.
pub fn evaluate_probability_form(
    state: &PureState,
    settings: &MeasurementSettings,
    noise_fraction: f64,
) -> Result<f64> {
    let noisy = NoisyState::new(state.clone(), noise_fraction)?;
    let table = joint_probabilities(&noisy, settings)?;
    Ok(bell_probability_form(&table))
}
