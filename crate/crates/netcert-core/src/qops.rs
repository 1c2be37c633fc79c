//! Concrete quantum objects of the certification scheme: Pauli operators,
//! the rotated single-qubit eigenbases, GHZ states, the NLWE product basis,
//! the UPB and its complementary projector Γ, the reference observables and
//! Eve's three composite measurements.
//!
//! Basis ordering is fixed once here (outcome index ↔ list position) because
//! the probability conditions downstream reference outcomes by this order.
//! All amplitudes are built from exact expressions (cos π/8, 1/√2) evaluated
//! in double precision at construction.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{frobenius_distance, kron, ComplexMatrix, TOL_ALGEBRAIC};

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).expect("2x2")
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_complex(
        2,
        2,
        vec![C64::new(0.0, 0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), C64::new(0.0, 0.0)],
    )
    .expect("2x2")
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).expect("2x2")
}

/// (X+Z)/√2, the A₀ reference observable.
pub fn x_plus_z() -> ComplexMatrix {
    pauli_x().add(&pauli_z()).expect("2x2").scale_re(FRAC_1_SQRT_2)
}

/// (X−Z)/√2, the A₁ reference observable.
pub fn x_minus_z() -> ComplexMatrix {
    pauli_x().sub(&pauli_z()).expect("2x2").scale_re(FRAC_1_SQRT_2)
}

/// |φ⁺⟩ = (|00⟩+|11⟩)/√2.
pub fn phi_plus() -> ComplexMatrix {
    ComplexMatrix::ket_real(&[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2])
}

// ─────────────────────────────────────────────────────────────────────────
// Single-qubit eigenbases
// ─────────────────────────────────────────────────────────────────────────

/// The eight labelled single-qubit kets used to write down the NLWE basis
/// and the UPB: eigenvectors of (X+Z)/√2 (barred 0/1), (X−Z)/√2 (barred ±),
/// X (±) and Z (0/1).
#[derive(Clone, Debug)]
pub struct BarredBasis {
    pub zero_bar: ComplexMatrix,
    pub one_bar: ComplexMatrix,
    pub plus_bar: ComplexMatrix,
    pub minus_bar: ComplexMatrix,
    pub plus: ComplexMatrix,
    pub minus: ComplexMatrix,
    pub zero: ComplexMatrix,
    pub one: ComplexMatrix,
}

/// |0̄⟩ = cos(π/8)|0⟩ + sin(π/8)|1⟩ and friends.
pub fn barred_basis() -> BarredBasis {
    let c8 = (PI / 8.0).cos();
    let s8 = (PI / 8.0).sin();
    BarredBasis {
        zero_bar: ComplexMatrix::ket_real(&[c8, s8]),
        one_bar: ComplexMatrix::ket_real(&[-s8, c8]),
        plus_bar: ComplexMatrix::ket_real(&[s8, c8]),
        minus_bar: ComplexMatrix::ket_real(&[c8, -s8]),
        plus: ComplexMatrix::ket_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]),
        minus: ComplexMatrix::ket_real(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]),
        zero: ComplexMatrix::ket_real(&[1.0, 0.0]),
        one: ComplexMatrix::ket_real(&[0.0, 1.0]),
    }
}

fn kron3(a: &ComplexMatrix, b: &ComplexMatrix, c: &ComplexMatrix) -> ComplexMatrix {
    kron(&kron(a, b), c)
}

// ─────────────────────────────────────────────────────────────────────────
// Families of states
// ─────────────────────────────────────────────────────────────────────────

/// GHZ-like state |φ_l⟩ = (|l₁l₂l₃⟩ + (−1)^{l₁}|l̄₁l̄₂l̄₃⟩)/√2 for the 3-bit
/// index l = l₁l₂l₃ (l₁ most significant).
pub fn ghz_state(l: usize) -> Result<ComplexMatrix> {
    if l > 7 {
        return Err(Error::IndexRange(format!("GHZ index {l} (need 0..=7)")));
    }
    let l1 = (l >> 2) & 1;
    let mut amps = [0.0; 8];
    amps[l] = FRAC_1_SQRT_2;
    amps[7 - l] = if l1 == 0 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
    Ok(ComplexMatrix::ket_real(&amps))
}

/// The eight product vectors |δ_i⟩ of the three-qubit NLWE basis, in the
/// fixed outcome order.
pub fn nlwe_basis() -> Vec<ComplexMatrix> {
    let b = barred_basis();
    vec![
        kron3(&b.zero_bar, &b.one, &b.plus),
        kron3(&b.zero_bar, &b.one, &b.minus),
        kron3(&b.plus_bar, &b.zero, &b.one),
        kron3(&b.minus_bar, &b.zero, &b.one),
        kron3(&b.one_bar, &b.plus, &b.zero),
        kron3(&b.one_bar, &b.minus, &b.zero),
        kron3(&b.zero_bar, &b.zero, &b.zero),
        kron3(&b.one_bar, &b.one, &b.one),
    ]
}

/// The four product vectors |τ_i⟩ of the unextendible product basis.
pub fn upb_vectors() -> Vec<ComplexMatrix> {
    let b = barred_basis();
    vec![
        kron3(&b.zero_bar, &b.one, &b.plus),
        kron3(&b.plus_bar, &b.zero, &b.one),
        kron3(&b.one_bar, &b.plus, &b.zero),
        kron3(&b.minus_bar, &b.minus, &b.minus),
    ]
}

/// Γ = 1 − Σ|τ_i⟩⟨τ_i|, the rank-4 projector onto the completely entangled
/// subspace complementary to the UPB.
pub fn gamma_projector() -> ComplexMatrix {
    let mut g = ComplexMatrix::identity(8);
    for t in upb_vectors() {
        g = g.sub(&t.outer().expect("ket")).expect("8x8");
    }
    g
}

// ─────────────────────────────────────────────────────────────────────────
// Observables and measurements
// ─────────────────────────────────────────────────────────────────────────

/// One of the three external parties.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Party {
    A,
    B,
    C,
}

impl std::fmt::Display for Party {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Party::A => write!(f, "A"),
            Party::B => write!(f, "B"),
            Party::C => write!(f, "C"),
        }
    }
}

/// Hermitian, unitary, ±1-spectrum operator on a labelled subsystem.
#[derive(Clone, Debug)]
pub struct Observable {
    pub party: Party,
    pub setting: usize,
    pub matrix: ComplexMatrix,
}

impl Observable {
    pub fn new(party: Party, setting: usize, matrix: ComplexMatrix) -> Result<Self> {
        let o = Self { party, setting, matrix };
        o.validate(TOL_ALGEBRAIC)?;
        Ok(o)
    }

    /// Hermitian and matrix² = 1 within tol.
    pub fn validate(&self, tol: f64) -> Result<()> {
        if !self.matrix.is_square() {
            return Err(Error::Contract("observable must be square".into()));
        }
        if !self.matrix.is_hermitian(tol) {
            return Err(Error::Contract(format!(
                "observable {}{} is not Hermitian",
                self.party, self.setting
            )));
        }
        let sq = self.matrix.matmul(&self.matrix)?;
        let id = ComplexMatrix::identity(self.matrix.rows());
        if frobenius_distance(&sq, &id)? > tol {
            return Err(Error::Contract(format!(
                "observable {}{} does not square to the identity",
                self.party, self.setting
            )));
        }
        Ok(())
    }

    /// Effect for the binary outcome a: (1 + (−1)^a s)/2.
    pub fn effect(&self, outcome: usize) -> Result<ComplexMatrix> {
        if outcome > 1 {
            return Err(Error::IndexRange(format!("binary outcome {outcome}")));
        }
        let sign = if outcome == 0 { 0.5 } else { -0.5 };
        ComplexMatrix::identity(self.matrix.rows())
            .scale_re(0.5)
            .add(&self.matrix.scale_re(sign))
    }
}

/// Ordered list of positive effects summing to the identity.
#[derive(Clone, Debug)]
pub struct Measurement {
    pub party: String,
    pub setting: usize,
    pub effects: Vec<ComplexMatrix>,
}

impl Measurement {
    /// Construct and validate as a projective measurement.
    pub fn projective(party: &str, setting: usize, effects: Vec<ComplexMatrix>) -> Result<Self> {
        let m = Self { party: party.to_string(), setting, effects };
        m.validate(TOL_ALGEBRAIC, true)?;
        Ok(m)
    }

    /// Construct without validation (used by mutation tests that need
    /// deliberately broken measurements).
    pub fn unchecked(party: &str, setting: usize, effects: Vec<ComplexMatrix>) -> Self {
        Self { party: party.to_string(), setting, effects }
    }

    pub fn outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn dim(&self) -> usize {
        self.effects.first().map(|e| e.rows()).unwrap_or(0)
    }

    /// Effects PSD, summing to the identity; if `projective`, each effect is
    /// idempotent and pairwise products vanish.
    pub fn validate(&self, tol: f64, projective: bool) -> Result<()> {
        let dim = self.dim();
        if dim == 0 {
            return Err(Error::Contract("measurement with no effects".into()));
        }
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for (i, e) in self.effects.iter().enumerate() {
            if e.rows() != dim || e.cols() != dim {
                return Err(Error::DimMismatch(format!("effect {i} has inconsistent dims")));
            }
            if !crate::linalg::is_psd(e, tol)? {
                return Err(Error::Contract(format!(
                    "effect {i} of {}{} is not PSD",
                    self.party, self.setting
                )));
            }
            sum = sum.add(e)?;
        }
        if frobenius_distance(&sum, &ComplexMatrix::identity(dim))? > tol {
            return Err(Error::Contract(format!(
                "effects of {}{} do not sum to the identity",
                self.party, self.setting
            )));
        }
        if projective {
            for (i, e) in self.effects.iter().enumerate() {
                if frobenius_distance(&e.matmul(e)?, e)? > tol {
                    return Err(Error::Contract(format!("effect {i} is not idempotent")));
                }
                for (j, f) in self.effects.iter().enumerate() {
                    if i != j && e.matmul(f)?.frobenius_norm() > tol {
                        return Err(Error::Contract(format!(
                            "effects {i} and {j} do not annihilate"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A₀=(X+Z)/√2, A₁=(X−Z)/√2, A₂=Y; B and C measure Z, X, Y.
pub fn reference_observables() -> Vec<Observable> {
    let mk = |party, setting, m| Observable::new(party, setting, m).expect("reference observable");
    vec![
        mk(Party::A, 0, x_plus_z()),
        mk(Party::A, 1, x_minus_z()),
        mk(Party::A, 2, pauli_y()),
        mk(Party::B, 0, pauli_z()),
        mk(Party::B, 1, pauli_x()),
        mk(Party::B, 2, pauli_y()),
        mk(Party::C, 0, pauli_z()),
        mk(Party::C, 1, pauli_x()),
        mk(Party::C, 2, pauli_y()),
    ]
}

/// Eve's three reference measurements: E₀ the GHZ basis, E₁ the NLWE basis,
/// E₂ the five-outcome UPB hybrid {|τ_i⟩⟨τ_i|} ∪ {Γ}.
pub fn reference_eve_measurements() -> Vec<Measurement> {
    let ghz_effects: Vec<ComplexMatrix> = (0..8)
        .map(|l| ghz_state(l).expect("l<8").outer().expect("ket"))
        .collect();
    let nlwe_effects: Vec<ComplexMatrix> =
        nlwe_basis().iter().map(|d| d.outer().expect("ket")).collect();
    let mut upb_effects: Vec<ComplexMatrix> =
        upb_vectors().iter().map(|t| t.outer().expect("ket")).collect();
    upb_effects.push(gamma_projector());
    vec![
        Measurement::projective("E", 0, ghz_effects).expect("GHZ measurement"),
        Measurement::projective("E", 1, nlwe_effects).expect("NLWE measurement"),
        Measurement::projective("E", 2, upb_effects).expect("UPB measurement"),
    ]
}

/// All reference objects bundled: the three bases, Γ, the nine observables
/// and the maximally entangled pair state.
#[derive(Clone, Debug)]
pub struct ReferenceKit {
    pub ghz: Vec<ComplexMatrix>,
    pub nlwe: Vec<ComplexMatrix>,
    pub upb: Vec<ComplexMatrix>,
    pub gamma: ComplexMatrix,
    pub observables: Vec<Observable>,
    pub phi_plus: ComplexMatrix,
}

impl ReferenceKit {
    pub fn new() -> Self {
        Self {
            ghz: (0..8).map(|l| ghz_state(l).expect("l<8")).collect(),
            nlwe: nlwe_basis(),
            upb: upb_vectors(),
            gamma: gamma_projector(),
            observables: reference_observables(),
            phi_plus: phi_plus(),
        }
    }

    /// The 2×2 matrix of observable `setting` for `party`.
    pub fn observable(&self, party: Party, setting: usize) -> &ComplexMatrix {
        &self
            .observables
            .iter()
            .find(|o| o.party == party && o.setting == setting)
            .expect("reference observables cover settings 0..3")
            .matrix
    }
}

impl Default for ReferenceKit {
    fn default() -> Self {
        Self::new()
    }
}

/// Reshape a 3-qubit ket into the 2×4 matrix across the cut that isolates
/// `qubit` (0, 1 or 2); rank 1 iff the ket is product across that cut.
pub fn reshape_single_qubit_cut(ket: &ComplexMatrix, qubit: usize) -> Result<ComplexMatrix> {
    if !ket.is_ket() || ket.rows() != 8 {
        return Err(Error::DimMismatch("expected an 8-dimensional ket".into()));
    }
    if qubit > 2 {
        return Err(Error::IndexRange(format!("qubit index {qubit}")));
    }
    let mut out = ComplexMatrix::zeros(2, 4);
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                let idx = [a, b, c];
                let row = idx[qubit];
                let rest: Vec<usize> = (0..3).filter(|&q| q != qubit).map(|q| idx[q]).collect();
                out.set(row, rest[0] * 2 + rest[1], ket.get(a * 4 + b * 2 + c, 0));
            }
        }
    }
    Ok(out)
}

/// Second-largest singular value of a matrix (0 iff rank ≤ 1). Computed
/// from the Hermitian dilation [[0, M], [M†, 0]], whose spectrum is ±σ_i —
/// this keeps full absolute precision for tiny singular values, unlike the
/// square root of the Gram spectrum.
pub fn second_singular_value(m: &ComplexMatrix) -> Result<f64> {
    let (r, c) = (m.rows(), m.cols());
    let n = r + c;
    let mut dil = ComplexMatrix::zeros(n, n);
    for i in 0..r {
        for j in 0..c {
            dil.set(i, r + j, m.get(i, j));
            dil.set(r + j, i, m.get(i, j).conj());
        }
    }
    let eig = crate::linalg::hermitian_eig(&dil)?;
    Ok(eig.values.get(1).copied().unwrap_or(0.0).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eig, is_psd};

    fn gram_is_identity(kets: &[ComplexMatrix]) -> f64 {
        let n = kets.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let g = kets[i].inner(&kets[j]).unwrap();
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - C64::new(want, 0.0)).norm());
            }
        }
        worst
    }

    #[test]
    fn barred_basis_structure() {
        let b = barred_basis();
        assert!(b.zero_bar.inner(&b.one_bar).unwrap().norm() < 1e-15);
        assert!(b.plus_bar.inner(&b.minus_bar).unwrap().norm() < 1e-15);
        // ((X+Z)/√2)|0̄⟩ = +|0̄⟩
        let h = x_plus_z();
        let hv = h.matmul(&b.zero_bar).unwrap();
        assert!(frobenius_distance(&hv, &b.zero_bar).unwrap() < 1e-15);
        let hv1 = h.matmul(&b.one_bar).unwrap();
        assert!(frobenius_distance(&hv1, &b.one_bar.scale_re(-1.0)).unwrap() < 1e-15);
        let g = x_minus_z();
        assert!(frobenius_distance(&g.matmul(&b.plus_bar).unwrap(), &b.plus_bar).unwrap() < 1e-15);
        // ⟨0̄|+̄⟩ = sin(π/4) = 1/√2 (direct inner-product oracle)
        let ip = b.zero_bar.inner(&b.plus_bar).unwrap();
        assert!((ip.re - FRAC_1_SQRT_2).abs() < 1e-15 && ip.im == 0.0);
    }

    #[test]
    fn ghz_states_match_definition() {
        // l=0: (|000⟩+|111⟩)/√2
        let g0 = ghz_state(0).unwrap();
        assert!((g0.get(0, 0).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((g0.get(7, 0).re - FRAC_1_SQRT_2).abs() < 1e-15);
        // l=4 (bits 100): (|100⟩−|011⟩)/√2
        let g4 = ghz_state(4).unwrap();
        assert!((g4.get(4, 0).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((g4.get(3, 0).re + FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(ghz_state(8).is_err());

        let all: Vec<_> = (0..8).map(|l| ghz_state(l).unwrap()).collect();
        assert!(gram_is_identity(&all) < 1e-15);
    }

    #[test]
    fn nlwe_basis_is_orthonormal_and_complete() {
        let d = nlwe_basis();
        assert_eq!(d.len(), 8);
        assert!(gram_is_identity(&d) < 1e-12);
        let mut sum = ComplexMatrix::zeros(8, 8);
        for k in &d {
            sum = sum.add(&k.outer().unwrap()).unwrap();
        }
        assert!(frobenius_distance(&sum, &ComplexMatrix::identity(8)).unwrap() < 1e-12);
        // |δ₀⟩ = |0̄⟩|1⟩|+⟩
        let b = barred_basis();
        let d0 = kron3(&b.zero_bar, &b.one, &b.plus);
        assert!(frobenius_distance(&d[0], &d0).unwrap() < 1e-15);
    }

    #[test]
    fn upb_and_gamma() {
        let t = upb_vectors();
        assert_eq!(t.len(), 4);
        assert!(gram_is_identity(&t) < 1e-12);
        let b = barred_basis();
        let t3 = kron3(&b.minus_bar, &b.minus, &b.minus);
        assert!(frobenius_distance(&t[3], &t3).unwrap() < 1e-15);

        let g = gamma_projector();
        assert!((g.trace().unwrap().re - 4.0).abs() < 1e-12);
        assert!(frobenius_distance(&g.matmul(&g).unwrap(), &g).unwrap() < 1e-12);
        for ti in &t {
            assert!(g.matmul(ti).unwrap().frobenius_norm() < 1e-12);
        }
        // projector spectrum {0,1} -> PSD (eigen oracle)
        assert!(is_psd(&g, 1e-12).unwrap());
        let eig = hermitian_eig(&g).unwrap();
        for v in &eig.values {
            assert!((v - 1.0).abs() < 1e-10 || v.abs() < 1e-10);
        }
    }

    #[test]
    fn product_structure_of_delta_and_tau() {
        for ket in nlwe_basis().iter().chain(upb_vectors().iter()) {
            for qubit in 0..3 {
                let m = reshape_single_qubit_cut(ket, qubit).unwrap();
                assert!(second_singular_value(&m).unwrap() <= 1e-10);
            }
        }
        // a GHZ state is not product across any cut
        let g = ghz_state(0).unwrap();
        for qubit in 0..3 {
            let m = reshape_single_qubit_cut(&g, qubit).unwrap();
            assert!(second_singular_value(&m).unwrap() > 0.4);
        }
    }

    #[test]
    fn ghz_reductions_are_maximally_mixed() {
        use crate::linalg::{partial_trace, DimLayout};
        let layout = DimLayout::new(&[("q0", 2), ("q1", 2), ("q2", 2)]).unwrap();
        for l in 0..8 {
            let rho = ghz_state(l).unwrap().outer().unwrap();
            for label in ["q0", "q1", "q2"] {
                let red = partial_trace(&rho, &layout, &[label]).unwrap();
                let half = ComplexMatrix::identity(2).scale_re(0.5);
                assert!(frobenius_distance(&red, &half).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn reference_observables_properties() {
        let obs = reference_observables();
        assert_eq!(obs.len(), 9);
        for o in &obs {
            o.validate(1e-12).unwrap();
            assert!(o.matrix.trace().unwrap().norm() < 1e-12);
        }
        // A₀² = 1
        let a0 = &obs[0].matrix;
        assert!(
            frobenius_distance(&a0.matmul(a0).unwrap(), &ComplexMatrix::identity(2)).unwrap()
                < 1e-15
        );
        // {A₀, A₁} = 0
        let a1 = &obs[1].matrix;
        let anti = a0.matmul(a1).unwrap().add(&a1.matmul(a0).unwrap()).unwrap();
        assert!(anti.frobenius_norm() < 1e-15);
        // B₀ = Z
        assert!(frobenius_distance(&obs[3].matrix, &pauli_z()).unwrap() == 0.0);
    }

    #[test]
    fn eve_measurements_are_projective() {
        let meas = reference_eve_measurements();
        assert_eq!(meas.len(), 3);
        assert_eq!(meas[0].outcomes(), 8);
        assert_eq!(meas[1].outcomes(), 8);
        assert_eq!(meas[2].outcomes(), 5);
        for m in &meas {
            m.validate(1e-10, true).unwrap();
        }
        // E₁ completeness, E₀ effect idempotence spot checks
        let mut sum = ComplexMatrix::zeros(8, 8);
        for e in &meas[1].effects {
            sum = sum.add(e).unwrap();
        }
        assert!(frobenius_distance(&sum, &ComplexMatrix::identity(8)).unwrap() < 1e-12);
        let e3 = &meas[0].effects[3];
        assert!(frobenius_distance(&e3.matmul(e3).unwrap(), e3).unwrap() < 1e-13);
    }

    #[test]
    fn observable_validation_rejects_bad_input() {
        // not squaring to identity
        let half = pauli_z().scale_re(0.5);
        assert!(Observable::new(Party::A, 0, half).is_err());
        // not Hermitian
        let m = ComplexMatrix::from_complex(
            2,
            2,
            vec![C64::new(0.0, 0.0), C64::new(1.0, 0.1), C64::new(1.0, 0.1), C64::new(0.0, 0.0)],
        )
        .unwrap();
        assert!(Observable::new(Party::A, 0, m).is_err());
    }

    #[test]
    fn measurement_validation_rejects_incomplete() {
        let e0 = ComplexMatrix::ket_real(&[1.0, 0.0]).outer().unwrap();
        let m = Measurement::unchecked("E", 0, vec![e0]);
        assert!(m.validate(1e-10, true).is_err());
    }

    #[test]
    fn reference_kit_is_consistent() {
        let kit = ReferenceKit::new();
        assert_eq!(kit.ghz.len(), 8);
        assert_eq!(kit.nlwe.len(), 8);
        assert_eq!(kit.upb.len(), 4);
        assert_eq!(kit.observables.len(), 9);
        // gamma = 1 − Σ|τ⟩⟨τ|
        let mut g = ComplexMatrix::identity(8);
        for t in &kit.upb {
            g = g.sub(&t.outer().unwrap()).unwrap();
        }
        assert!(frobenius_distance(&g, &kit.gamma).unwrap() < 1e-14);
        assert!(frobenius_distance(kit.observable(Party::B, 0), &pauli_z()).unwrap() == 0.0);
        assert!((kit.phi_plus.frobenius_norm() - 1.0).abs() < 1e-15);
    }
}
