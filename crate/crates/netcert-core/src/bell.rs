//! Bell functionals and certification conditions: the eight inequalities
//! I_l with classical bound 4 and Tsirelson bound 4√2, their sum-of-squares
//! decomposition, the Mermin-type functional for the third observables, and
//! the three condition suites that feed the self-testing theorems.
//!
//! The functional is the Bell-operator form
//!
//!   I_l = 2(−1)^{l₁}⟨(A₀+A₁)B₁C₁⟩ + (−1)^{l₁+l₂}⟨(A₀−A₁)B₀⟩
//!       + (−1)^{l₁+l₃}⟨(A₀−A₁)C₀⟩ ≤ 4,
//!
//! with every correlator conditioned on Eve's outcome l of her first
//! measurement (normalized by P̄(l|0)); the reference network saturates the
//! quantum bound 4√2 for every l.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{frobenius_distance, hermitian_eig, kron, ComplexMatrix};
use crate::network::CorrelationTensor;
use crate::qops::ghz_state;

pub const QUANTUM_BOUND: f64 = 5.656854249492380195206754896838; // 4√2
pub const CLASSICAL_BOUND: f64 = 4.0;

/// Default tolerance for eigenvalue-based bounds.
pub const TOL_EIGEN: f64 = 1e-9;
/// Default tolerance for exact probability identities.
pub const TOL_PROBABILITY: f64 = 1e-10;

/// The six 2×2 observables a Bell functional is evaluated on.
#[derive(Clone, Debug)]
pub struct BellObservables {
    pub a0: ComplexMatrix,
    pub a1: ComplexMatrix,
    pub b0: ComplexMatrix,
    pub b1: ComplexMatrix,
    pub c0: ComplexMatrix,
    pub c1: ComplexMatrix,
}

impl BellObservables {
    pub fn new(
        a0: ComplexMatrix,
        a1: ComplexMatrix,
        b0: ComplexMatrix,
        b1: ComplexMatrix,
        c0: ComplexMatrix,
        c1: ComplexMatrix,
    ) -> Result<Self> {
        for (name, m) in [
            ("A0", &a0),
            ("A1", &a1),
            ("B0", &b0),
            ("B1", &b1),
            ("C0", &c0),
            ("C1", &c1),
        ] {
            if m.rows() != 2 || m.cols() != 2 {
                return Err(Error::DimMismatch(format!("{name} must be a qubit observable")));
            }
            if !m.is_hermitian(1e-10) {
                return Err(Error::Contract(format!("{name} is not Hermitian")));
            }
            let sq = m.matmul(m)?;
            if frobenius_distance(&sq, &ComplexMatrix::identity(2))? > 1e-10 {
                return Err(Error::Contract(format!("{name} does not have ±1 spectrum")));
            }
        }
        Ok(Self { a0, a1, b0, b1, c0, c1 })
    }

    pub fn reference() -> Self {
        use crate::qops::{pauli_x, pauli_z, x_minus_z, x_plus_z};
        Self::new(x_plus_z(), x_minus_z(), pauli_z(), pauli_x(), pauli_z(), pauli_x())
            .expect("reference observables are valid")
    }
}

/// One Bell inequality of the family, indexed by the 3-bit Eve outcome.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BellFunctional {
    pub l: usize,
}

impl BellFunctional {
    pub fn new(l: usize) -> Result<Self> {
        if l > 7 {
            return Err(Error::IndexRange(format!("Bell functional index {l}")));
        }
        Ok(Self { l })
    }

    fn bits(&self) -> (usize, usize, usize) {
        ((self.l >> 2) & 1, (self.l >> 1) & 1, self.l & 1)
    }

    /// Signs (s₁, s₂, s₃) of the three terms: s₁ = (−1)^{l₁} on the
    /// (A₀+A₁)B₁C₁ term, s₂ = (−1)^{l₁+l₂} on (A₀−A₁)B₀, s₃ = (−1)^{l₁+l₃}
    /// on (A₀−A₁)C₀.
    pub fn signs(&self) -> (f64, f64, f64) {
        let (l1, l2, l3) = self.bits();
        let sgn = |k: usize| if k % 2 == 0 { 1.0 } else { -1.0 };
        (sgn(l1), sgn(l1 + l2), sgn(l1 + l3))
    }

    /// Stored classical bound; [classical_bound] re-derives it by
    /// enumeration.
    pub fn classical_bound_value(&self) -> f64 {
        CLASSICAL_BOUND
    }

    pub fn quantum_bound_value(&self) -> f64 {
        QUANTUM_BOUND
    }
}

/// Value of I_l on the conditional distribution p(abc|xyz, l, e=0).
pub fn bell_value(t: &CorrelationTensor, l: usize) -> Result<f64> {
    let f = BellFunctional::new(l)?;
    let (s1, s2, s3) = f.signs();
    let cond = |slots| t.conditional_marginal_correlator(slots, l, 0);
    let t1 = cond([Some(0), Some(1), Some(1)])? + cond([Some(1), Some(1), Some(1)])?;
    let t2 = cond([Some(0), Some(0), None])? - cond([Some(1), Some(0), None])?;
    let t3 = cond([Some(0), None, Some(0)])? - cond([Some(1), None, Some(0)])?;
    Ok(2.0 * s1 * t1 + s2 * t2 + s3 * t3)
}

/// Exhaustive maximum of I_l over the 2⁶ deterministic ±1 assignments,
/// in integer arithmetic. Returns exactly 4 for every l.
pub fn classical_bound(l: usize) -> Result<f64> {
    let f = BellFunctional::new(l)?;
    let (l1, l2, l3) = f.bits();
    let sgn = |k: usize| if k % 2 == 0 { 1i64 } else { -1i64 };
    let (s1, s2, s3) = (sgn(l1), sgn(l1 + l2), sgn(l1 + l3));
    let mut best = i64::MIN;
    for bits in 0..64u32 {
        let v = |i: u32| if bits >> i & 1 == 0 { 1i64 } else { -1i64 };
        let (a0, a1, b0, b1, c0, c1) = (v(0), v(1), v(2), v(3), v(4), v(5));
        let val = 2 * s1 * (a0 + a1) * b1 * c1 + s2 * (a0 - a1) * b0 + s3 * (a0 - a1) * c0;
        best = best.max(val);
    }
    Ok(best as f64)
}

/// The Bell operator Î_l on three qubits for the given observables.
pub fn bell_operator(l: usize, obs: &BellObservables) -> Result<ComplexMatrix> {
    let f = BellFunctional::new(l)?;
    let (s1, s2, s3) = f.signs();
    let id = ComplexMatrix::identity(2);
    let a_sum = obs.a0.add(&obs.a1)?;
    let a_diff = obs.a0.sub(&obs.a1)?;
    let term1 = kron(&kron(&a_sum, &obs.b1), &obs.c1).scale_re(2.0 * s1);
    let term2 = kron(&kron(&a_diff, &obs.b0), &id).scale_re(s2);
    let term3 = kron(&kron(&a_diff, &id), &obs.c0).scale_re(s3);
    term1.add(&term2)?.add(&term3)
}

/// Maximal eigenvalue of the Bell operator; 4√2 for the reference
/// observables.
pub fn quantum_bound(l: usize, obs: &BellObservables) -> Result<f64> {
    let op = bell_operator(l, obs)?;
    let eig = hermitian_eig(&op)?;
    Ok(eig.values[0])
}

/// The three squared stabilizer-like operators of the SOS decomposition:
/// P₁ = (−1)^{l₁}(A₀+A₁)/√2 ⊗ B₁ ⊗ C₁, P₂ = (−1)^{l₁+l₂}(A₀−A₁)/√2 ⊗ B₀,
/// P₃ = (−1)^{l₁+l₃}(A₀−A₁)/√2 ⊗ C₀.
pub fn sos_stabilizers(l: usize, obs: &BellObservables) -> Result<[ComplexMatrix; 3]> {
    let f = BellFunctional::new(l)?;
    let (s1, s2, s3) = f.signs();
    let id = ComplexMatrix::identity(2);
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let a_tilde1 = obs.a0.add(&obs.a1)?.scale_re(inv_sqrt2);
    let a_tilde0 = obs.a0.sub(&obs.a1)?.scale_re(inv_sqrt2);
    Ok([
        kron(&kron(&a_tilde1, &obs.b1), &obs.c1).scale_re(s1),
        kron(&kron(&a_tilde0, &obs.b0), &id).scale_re(s2),
        kron(&kron(&a_tilde0, &id), &obs.c0).scale_re(s3),
    ])
}

/// The operator √2(1−P₁)² + (1/√2)[(1−P₂)² + (1−P₃)²], equal to
/// 4√2·1 − Î_l for any ±1-spectrum observables.
pub fn sos_operator(l: usize, obs: &BellObservables) -> Result<ComplexMatrix> {
    let [p1, p2, p3] = sos_stabilizers(l, obs)?;
    let id = ComplexMatrix::identity(8);
    let sq = |p: &ComplexMatrix| -> Result<ComplexMatrix> {
        let d = id.sub(p)?;
        d.matmul(&d)
    };
    let sqrt2 = std::f64::consts::SQRT_2;
    sq(&p1)?
        .scale_re(sqrt2)
        .add(&sq(&p2)?.add(&sq(&p3)?)?.scale_re(1.0 / sqrt2))
}

/// ⟨ψ| SOS |ψ⟩ ≥ 0; zero exactly on |φ_l⟩ with the reference observables,
/// and equal to ⟨4√2 − Î_l⟩ for any state.
pub fn sos_residual(l: usize, state: &ComplexMatrix, obs: &BellObservables) -> Result<f64> {
    if !state.is_ket() || state.rows() != 8 {
        return Err(Error::DimMismatch(format!(
            "SOS residual needs an 8-dimensional ket, got {}x{}",
            state.rows(),
            state.cols()
        )));
    }
    let sos = sos_operator(l, obs)?;
    Ok(state.expectation(&sos)?.re)
}

/// Mermin-type functional of the third observables, conditioned on Eve's
/// outcome 0 of E₀:
/// ⟨Ã₁B₁C₁ − Ã₁B₂C₂ − A₂B₁C₂ − A₂B₂C₁⟩ with Ã₁ = (A₀+A₁)/√2;
/// equals 4 in the reference experiment (for either global ±Y branch).
pub fn mermin_value(t: &CorrelationTensor) -> Result<f64> {
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let cond = |x, y, z| t.conditional_correlator(x, y, z, 0, 0);
    let a_tilde_b1c1 = (cond(0, 1, 1)? + cond(1, 1, 1)?) * inv_sqrt2;
    let a_tilde_b2c2 = (cond(0, 2, 2)? + cond(1, 2, 2)?) * inv_sqrt2;
    Ok(a_tilde_b1c1 - a_tilde_b2c2 - cond(2, 1, 2)? - cond(2, 2, 1)?)
}

// ─────────────────────────────────────────────────────────────────────────
// Condition suites
// ─────────────────────────────────────────────────────────────────────────

/// One named certification condition with its expected and observed values.
/// `observed` is `None` when the quantity is undefined on the given tensor
/// (conditioning on an absent or zero-probability outcome).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: String,
    pub expected: f64,
    pub observed: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

impl ConditionReport {
    pub fn evaluate(name: &str, expected: f64, observed: Option<f64>, tolerance: f64) -> Self {
        let pass = observed.map(|o| (o - expected).abs() <= tolerance).unwrap_or(false);
        Self { condition: name.to_string(), expected, observed, tolerance, pass }
    }
}

pub fn all_pass(reports: &[ConditionReport]) -> bool {
    reports.iter().all(|r| r.pass)
}

/// Theorem 1 premises: the eight Bell values equal 4√2 and Eve's eight
/// marginals equal 1/8, all for e = 0.
pub fn check_theorem1_conditions(t: &CorrelationTensor, tol: f64) -> Vec<ConditionReport> {
    let mut out = Vec::with_capacity(16);
    for l in 0..8 {
        let observed = if l < t.outcome_count(0) { bell_value(t, l).ok() } else { None };
        out.push(ConditionReport::evaluate(
            &format!("bell_value_l{l}"),
            QUANTUM_BOUND,
            observed,
            tol,
        ));
    }
    for l in 0..8 {
        let observed =
            if l < t.outcome_count(0) { t.eve_marginal(l, 0).ok() } else { Some(0.0) };
        out.push(ConditionReport::evaluate(
            &format!("eve_marginal_e0_l{l}"),
            0.125,
            observed,
            tol,
        ));
    }
    out
}

/// The eight probability identities certifying the NLWE measurement:
/// p(0100|0011) = p(0111|0011) = ... = p(1117|0001) = 1/8.
const THEOREM2_CASES: [(usize, usize, usize, usize, usize, usize, usize); 8] = [
    // (a, b, c, l, x, y, z); e = 1 throughout
    (0, 1, 0, 0, 0, 0, 1),
    (0, 1, 1, 1, 0, 0, 1),
    (0, 0, 1, 2, 1, 0, 0),
    (1, 0, 1, 3, 1, 0, 0),
    (1, 0, 0, 4, 0, 1, 0),
    (1, 1, 0, 5, 0, 1, 0),
    (0, 0, 0, 6, 0, 0, 0),
    (1, 1, 1, 7, 0, 0, 0),
];

pub fn check_theorem2_conditions(t: &CorrelationTensor, tol: f64) -> Vec<ConditionReport> {
    THEOREM2_CASES
        .iter()
        .map(|&(a, b, c, l, x, y, z)| {
            let observed =
                if l < t.outcome_count(1) { t.p(a, b, c, l, x, y, z, 1).ok() } else { Some(0.0) };
            ConditionReport::evaluate(
                &format!("p({a}{b}{c}{l}|{x}{y}{z}1)"),
                0.125,
                observed,
                tol,
            )
        })
        .collect()
}

/// The four probability identities certifying the UPB outcomes.
const THEOREM3_PROB_CASES: [(usize, usize, usize, usize, usize, usize, usize); 4] = [
    // (a, b, c, l, x, y, z); e = 2 throughout
    (0, 1, 0, 0, 0, 0, 1),
    (0, 0, 1, 1, 1, 0, 0),
    (1, 0, 0, 2, 0, 1, 0),
    (1, 1, 1, 3, 1, 1, 1),
];

/// A term of a correlation-picture condition: coefficient times a correlator
/// with optional identity slots (None = that party contributes no operator).
type CorrTerm = (f64, Option<usize>, Option<usize>, Option<usize>);

/// ⟨(1 + A₀B₀ + B₀C₀ + A₀C₀ + A₁B₁C₁ − A₁B₂C₂ − A₂B₁C₂ − A₂B₂C₁) R₄⟩ = 1.
const COND_R4_1: [CorrTerm; 8] = [
    (1.0, None, None, None),
    (1.0, Some(0), Some(0), None),
    (1.0, None, Some(0), Some(0)),
    (1.0, Some(0), None, Some(0)),
    (1.0, Some(1), Some(1), Some(1)),
    (-1.0, Some(1), Some(2), Some(2)),
    (-1.0, Some(2), Some(1), Some(2)),
    (-1.0, Some(2), Some(2), Some(1)),
];

/// Bracket of the second condition, to be multiplied by (1 + A₀):
/// −B₁C₁ + B₂C₂ + B₁(1+C₀) − ½(1−B₀)C₁ + (1+B₀)C₀ + ½B₀ + 3/2.
const COND_R4_2_BRACKET: [(f64, Option<usize>, Option<usize>); 10] = [
    (-1.0, Some(1), Some(1)),
    (1.0, Some(2), Some(2)),
    (1.0, Some(1), None),
    (1.0, Some(1), Some(0)),
    (-0.5, None, Some(1)),
    (0.5, Some(0), Some(1)),
    (1.0, None, Some(0)),
    (1.0, Some(0), Some(0)),
    (0.5, Some(0), None),
    (1.5, None, None),
];

/// Bracket of the third condition, multiplied by (1 + B₀):
/// −A₁C₁ + A₂C₂ + (1+A₀)C₁ − ½A₁(1−C₀) + A₀(1+C₀) + ½C₀ + 3/2.
const COND_R4_3_BRACKET: [(f64, Option<usize>, Option<usize>); 10] = [
    (-1.0, Some(1), Some(1)),
    (1.0, Some(2), Some(2)),
    (1.0, None, Some(1)),
    (1.0, Some(0), Some(1)),
    (-0.5, Some(1), None),
    (0.5, Some(1), Some(0)),
    (1.0, Some(0), None),
    (1.0, Some(0), Some(0)),
    (0.5, None, Some(0)),
    (1.5, None, None),
];

/// Bracket of the fourth condition, multiplied by (1 + C₀):
/// −A₁B₁ + A₂B₂ + A₁(1+B₀) − ½(1−A₀)B₁ + (1+A₀)B₀ + ½A₀ + 3/2.
const COND_R4_4_BRACKET: [(f64, Option<usize>, Option<usize>); 10] = [
    (-1.0, Some(1), Some(1)),
    (1.0, Some(2), Some(2)),
    (1.0, Some(1), None),
    (1.0, Some(1), Some(0)),
    (-0.5, None, Some(1)),
    (0.5, Some(0), Some(1)),
    (1.0, None, Some(0)),
    (1.0, Some(0), Some(0)),
    (0.5, Some(0), None),
    (1.5, None, None),
];

fn eval_terms(t: &CorrelationTensor, terms: &[CorrTerm], l: usize, e: usize) -> Result<f64> {
    let mut acc = 0.0;
    for &(coeff, x, y, z) in terms {
        acc += coeff * t.marginal_correlator([x, y, z], l, e)?;
    }
    Ok(acc)
}

/// Expand bracket × (1 + S₀) for the party in `slot` (0 = A, 1 = B, 2 = C).
fn expand_with_projector(
    bracket: &[(f64, Option<usize>, Option<usize>)],
    slot: usize,
) -> Vec<CorrTerm> {
    let mut terms = Vec::with_capacity(bracket.len() * 2);
    for &(coeff, u, v) in bracket {
        for extra in [None, Some(0)] {
            let term = match slot {
                0 => (coeff, extra, u, v),
                1 => (coeff, u, extra, v),
                _ => (coeff, u, v, extra),
            };
            terms.push(term);
        }
    }
    terms
}

/// The four correlation-picture conditions on Eve's last UPB outcome, with
/// their reference values 1, 3/2, 3/2, 3/2.
pub fn theorem3_correlation_conditions(
    t: &CorrelationTensor,
) -> Result<[(String, f64, Option<f64>); 4]> {
    let l = 4usize;
    let defined = l < t.outcome_count(2);
    let eval = |terms: &[CorrTerm]| -> Option<f64> {
        if defined {
            eval_terms(t, terms, l, 2).ok()
        } else {
            None
        }
    };
    Ok([
        ("corr_R4_1".to_string(), 1.0, eval(&COND_R4_1)),
        ("corr_R4_2".to_string(), 1.5, eval(&expand_with_projector(&COND_R4_2_BRACKET, 0))),
        ("corr_R4_3".to_string(), 1.5, eval(&expand_with_projector(&COND_R4_3_BRACKET, 1))),
        ("corr_R4_4".to_string(), 1.5, eval(&expand_with_projector(&COND_R4_4_BRACKET, 2))),
    ])
}

/// Theorem 3 premises: the four probabilities of Eq.-type (betstat) equal
/// 1/8 and the four correlation conditions take values (1, 3/2, 3/2, 3/2).
pub fn check_theorem3_conditions(t: &CorrelationTensor, tol: f64) -> Vec<ConditionReport> {
    let mut out = Vec::with_capacity(8);
    for &(a, b, c, l, x, y, z) in &THEOREM3_PROB_CASES {
        let observed =
            if l < t.outcome_count(2) { t.p(a, b, c, l, x, y, z, 2).ok() } else { Some(0.0) };
        out.push(ConditionReport::evaluate(
            &format!("p({a}{b}{c}{l}|{x}{y}{z}2)"),
            0.125,
            observed,
            tol,
        ));
    }
    match theorem3_correlation_conditions(t) {
        Ok(conds) => {
            for (name, expected, observed) in conds {
                out.push(ConditionReport::evaluate(&name, expected, observed, tol));
            }
        }
        Err(_) => {
            for (name, expected) in
                [("corr_R4_1", 1.0), ("corr_R4_2", 1.5), ("corr_R4_3", 1.5), ("corr_R4_4", 1.5)]
            {
                out.push(ConditionReport::evaluate(name, expected, None, tol));
            }
        }
    }
    out
}

/// The Mermin-type condition as a one-entry report.
pub fn check_mermin_condition(t: &CorrelationTensor, tol: f64) -> ConditionReport {
    ConditionReport::evaluate("mermin_l0", 4.0, mermin_value(t).ok(), tol)
}

/// Lowest-weight bundle used by extraction and the CLI: all three suites
/// plus the Mermin condition.
pub fn check_all_conditions(t: &CorrelationTensor, tol: f64) -> Vec<ConditionReport> {
    let mut out = check_theorem1_conditions(t, tol);
    out.extend(check_theorem2_conditions(t, tol));
    out.extend(check_theorem3_conditions(t, tol));
    out.push(check_mermin_condition(t, tol));
    out
}

/// Reference state |φ_l⟩ as a convenience for SOS tests.
pub fn ghz_reference_state(l: usize) -> Result<ComplexMatrix> {
    ghz_state(l)
}
