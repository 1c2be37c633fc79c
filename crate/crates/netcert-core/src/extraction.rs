//! The constructive core of the self-testing proofs, exercised numerically:
//! scramble the reference experiment by local unitaries and junk degrees of
//! freedom (which leaves the correlations untouched), re-verify every
//! certification condition, then extract local unitaries from the observed
//! objects alone and check that they map everything back onto the reference
//! forms — states to |φ⁺⟩ ⊗ junk, Eve's effects to the three reference
//! measurements ⊗ 1, third observables to ±Y ⊗ 1 with a global sign branch.

use serde::{Deserialize, Serialize};

use crate::bell::{all_pass, check_all_conditions, ConditionReport, TOL_PROBABILITY};
use crate::error::{Error, Result};
use crate::linalg::{
    frobenius_distance, hermitian_eig, kron, partial_trace, permute_subsystems, ComplexMatrix,
    DimLayout, C64,
};
use crate::network::{CorrelationTensor, NetworkRealization};
use crate::qops::{
    pauli_y, phi_plus, reference_eve_measurements, reference_observables, Measurement, Observable,
    Party,
};
use crate::random::{haar_unitary, rng_for};

/// Default distance tolerance for extracted objects.
pub const TOL_EXTRACTION: f64 = 1e-7;

// ─────────────────────────────────────────────────────────────────────────
// Scrambling
// ─────────────────────────────────────────────────────────────────────────

/// How to hide the reference experiment: per-source local unitaries on both
/// sides, a junk factor of dimension 1 or 2 per side, and optionally the
/// −Y branch for the third observables.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ScrambleSpec {
    pub seed: u64,
    pub junk_dims: [usize; 3],
    pub negate_y: bool,
    /// Use identity unitaries and trivial junk (the spec's no-op scramble).
    pub identity: bool,
}

impl ScrambleSpec {
    pub fn new(seed: u64, junk_dim: usize) -> Self {
        Self { seed, junk_dims: [junk_dim; 3], negate_y: false, identity: false }
    }

    pub fn identity_spec() -> Self {
        Self { seed: 0, junk_dims: [1; 3], negate_y: false, identity: true }
    }

    pub fn with_negated_y(mut self) -> Self {
        self.negate_y = true;
        self
    }

    fn validate(&self) -> Result<()> {
        for (i, &j) in self.junk_dims.iter().enumerate() {
            if j != 1 && j != 2 {
                return Err(Error::Config(format!("junk dimension {j} for source {i} (need 1 or 2)")));
            }
        }
        Ok(())
    }
}

/// Coefficient matrix (party rows × Eve-share columns) of a pure source
/// state (U_p ⊗ U_e)(|φ⁺⟩_{qq̄} ⊗ |ξ⟩_{jj̄}).
fn source_matrix(
    junk: usize,
    u_party: &ComplexMatrix,
    u_eve: &ComplexMatrix,
    junk_ket: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    // |φ⁺⟩ ⊗ |ξ⟩ on factor order [q, q̄, j, j̄], permuted to [q, j, q̄, j̄]
    let full = kron(&phi_plus(), junk_ket);
    let layout =
        DimLayout::new(&[("q", 2), ("qbar", 2), ("j", junk), ("jbar", junk)])?;
    let (perm, _) = permute_subsystems(&full, &layout, &["q", "j", "qbar", "jbar"])?;
    let d = 2 * junk;
    let m0 = ComplexMatrix::from_fn(d, d, |r, c| perm.get(r * d + c, 0));
    u_party.matmul(&m0)?.matmul(&u_eve.transpose())
}

/// Lift an 8×8 operator on Eve's three qubits to the interleaved per-party
/// ordering [(q̄_A j̄_A)(q̄_B j̄_B)(q̄_C j̄_C)] with identity junk factors.
fn embed_eve_operator(op8: &ComplexMatrix, junk_dims: [usize; 3]) -> Result<ComplexMatrix> {
    let junk_id = ComplexMatrix::identity(junk_dims.iter().product());
    let big = kron(op8, &junk_id);
    let layout = DimLayout::new(&[
        ("qA", 2),
        ("qB", 2),
        ("qC", 2),
        ("jA", junk_dims[0]),
        ("jB", junk_dims[1]),
        ("jC", junk_dims[2]),
    ])?;
    let (out, _) = permute_subsystems(&big, &layout, &["qA", "jA", "qB", "jB", "qC", "jC"])?;
    Ok(out)
}

/// Build the scrambled experiment. By construction its correlation tensor
/// equals the reference one.
pub fn scramble_realization(spec: &ScrambleSpec) -> Result<NetworkRealization> {
    spec.validate()?;
    let ref_obs = reference_observables();
    let ref_meas = reference_eve_measurements();

    let mut party_us = Vec::with_capacity(3);
    let mut eve_us = Vec::with_capacity(3);
    let mut junk_kets = Vec::with_capacity(3);
    for s in 0..3 {
        let j = spec.junk_dims[s];
        let d = 2 * j;
        if spec.identity {
            party_us.push(ComplexMatrix::identity(d));
            eve_us.push(ComplexMatrix::identity(d));
            junk_kets.push(ComplexMatrix::ket_real(&vec![1.0; 1]));
            continue;
        }
        let mut rng = rng_for(spec.seed, 100 + s as u64);
        party_us.push(haar_unitary(&mut rng, d));
        eve_us.push(haar_unitary(&mut rng, d));
        junk_kets.push(if j == 1 {
            ComplexMatrix::ket_real(&[1.0])
        } else {
            // full-Schmidt-rank junk so the full-rank premise holds
            let mu = 0.35 + 0.45 * rand::Rng::gen::<f64>(&mut rng);
            let schmidt =
                ComplexMatrix::ket_real(&[mu.cos(), 0.0, 0.0, mu.sin()]);
            let rot = kron(&haar_unitary(&mut rng, 2), &haar_unitary(&mut rng, 2));
            rot.matmul(&schmidt)?
        });
    }

    let mut source_states: Vec<ComplexMatrix> = Vec::with_capacity(3);
    for s in 0..3 {
        let m = source_matrix(spec.junk_dims[s], &party_us[s], &eve_us[s], &junk_kets[s])?;
        let d = 2 * spec.junk_dims[s];
        let ket = ComplexMatrix::from_fn(d * d, 1, |r, _| m.get(r / d, r % d));
        source_states.push(ket.outer()?);
    }

    let parties = [Party::A, Party::B, Party::C];
    let mut party_observables: Vec<Vec<Observable>> = Vec::with_capacity(3);
    for s in 0..3 {
        let j = spec.junk_dims[s];
        let junk_id = ComplexMatrix::identity(j);
        let mut obs = Vec::with_capacity(3);
        for setting in 0..3 {
            let mut ref_m = ref_obs
                .iter()
                .find(|o| o.party == parties[s] && o.setting == setting)
                .expect("reference covers all settings")
                .matrix
                .clone();
            if setting == 2 && spec.negate_y {
                ref_m = ref_m.scale_re(-1.0);
            }
            let lifted = kron(&ref_m, &junk_id);
            let scrambled =
                party_us[s].matmul(&lifted)?.matmul(&party_us[s].adjoint())?;
            obs.push(Observable::new(parties[s], setting, scrambled)?);
        }
        party_observables.push(obs);
    }

    let eve_total = kron(&kron(&eve_us[0], &eve_us[1]), &eve_us[2]);
    let mut eve_measurements = Vec::with_capacity(3);
    for m in &ref_meas {
        let mut effects = Vec::with_capacity(m.effects.len());
        for eff in &m.effects {
            let embedded = embed_eve_operator(eff, spec.junk_dims)?;
            effects.push(eve_total.matmul(&embedded)?.matmul(&eve_total.adjoint())?);
        }
        eve_measurements.push(Measurement::projective("E", m.setting, effects)?);
    }

    let layout = DimLayout::new(&[
        ("A", 2 * spec.junk_dims[0]),
        ("B", 2 * spec.junk_dims[1]),
        ("C", 2 * spec.junk_dims[2]),
        ("Abar", 2 * spec.junk_dims[0]),
        ("Bbar", 2 * spec.junk_dims[1]),
        ("Cbar", 2 * spec.junk_dims[2]),
    ])?;

    let mut it = source_states.into_iter();
    let sources = [it.next().unwrap(), it.next().unwrap(), it.next().unwrap()];
    let mut ot = party_observables.into_iter();
    Ok(NetworkRealization {
        source_states: sources,
        party_observables: [ot.next().unwrap(), ot.next().unwrap(), ot.next().unwrap()],
        eve_measurements,
        layout,
    })
}

// ─────────────────────────────────────────────────────────────────────────
// Canonicalization
// ─────────────────────────────────────────────────────────────────────────

/// ‖Π{A₀,A₁}Π‖_F / √rank restricted to the support Π of the reduced state;
/// 0 for the reference pair, 2 for a commuting equal pair.
pub fn check_anticommutation(
    a0: &ComplexMatrix,
    a1: &ComplexMatrix,
    reduced_state: &ComplexMatrix,
) -> Result<f64> {
    if a0.rows() != a1.rows() || a0.rows() != reduced_state.rows() {
        return Err(Error::DimMismatch("anticommutation check dims".into()));
    }
    let anti = a0.matmul(a1)?.add(&a1.matmul(a0)?)?;
    let eig = hermitian_eig(reduced_state)?;
    let rank = eig.values.iter().filter(|&&v| v > 1e-10).count();
    if rank == 0 {
        return Err(Error::Contract("reduced state has empty support".into()));
    }
    let proj = crate::linalg::support_projector(reduced_state, 1e-10)?;
    let restricted = proj.matmul(&anti)?.matmul(&proj)?;
    Ok(restricted.frobenius_norm() / (rank as f64).sqrt())
}

const ANTICOMMUTATION_TOL: f64 = 1e-8;

/// Unitary polar factor of a (near-)invertible matrix: m = P·U with P PSD.
fn polar_unitary(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let mmd = m.matmul(&m.adjoint())?;
    let eig = hermitian_eig(&mmd)?;
    let min = *eig.values.last().expect("nonempty");
    if min < 1e-20 {
        return Err(Error::Contract(format!(
            "polar decomposition of a rank-deficient matrix (min singular value {:.3e})",
            min.max(0.0).sqrt()
        )));
    }
    let n = m.rows();
    let mut inv_sqrt = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        inv_sqrt.set(i, i, C64::new(1.0 / eig.values[i].sqrt(), 0.0));
    }
    let p_inv =
        eig.vectors.matmul(&inv_sqrt)?.matmul(&eig.vectors.adjoint())?;
    p_inv.matmul(m)
}

/// For an anticommuting pair of ±1 observables, construct the unitary with
/// U a₀ U† = (X+Z)/√2 ⊗ 1 and U a₁ U† = (X−Z)/√2 ⊗ 1, and report the junk
/// dimension d/2. Pairing of the ± eigenspaces of a₀ uses the polar factor
/// of a₁'s cross block, which is stable under the residual tolerance.
///
/// The output is unique only up to the commutant 1₂ ⊗ (junk unitary) and a
/// global phase; |φ⁺⟩ is invariant under U ⊗ U*, so this residual freedom
/// cancels in every downstream distance (they compare conjugated operators
/// and projectors, never bare kets).
pub fn canonicalize_anticommuting_pair(
    a0: &ComplexMatrix,
    a1: &ComplexMatrix,
) -> Result<(ComplexMatrix, usize)> {
    let d = a0.rows();
    if d % 2 != 0 || a1.rows() != d || !a0.is_square() || !a1.is_square() {
        return Err(Error::NotCanonicalizable(format!("dimension {d} is not even")));
    }
    let full_rank_state = ComplexMatrix::identity(d).scale_re(1.0 / d as f64);
    let residual = check_anticommutation(a0, a1, &full_rank_state)?;
    if residual > ANTICOMMUTATION_TOL {
        return Err(Error::NotCanonicalizable(format!(
            "anticommutation residual {residual:.3e} exceeds {ANTICOMMUTATION_TOL:.0e}"
        )));
    }
    let half = d / 2;
    // G = (a0+a1)/√2 and D = (a0−a1)/√2 anticommute and square to 1;
    // canonicalizing (G, D) to (X⊗1, Z⊗1) sends a0, a1 to (X±Z)/√2 ⊗ 1.
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let g = a0.add(a1)?.scale_re(inv_sqrt2);
    let dmat = a0.sub(a1)?.scale_re(inv_sqrt2);
    let eig = hermitian_eig(&dmat)?;
    let plus: Vec<usize> = (0..d).filter(|&i| eig.values[i] > 0.0).collect();
    let minus: Vec<usize> = (0..d).filter(|&i| eig.values[i] <= 0.0).collect();
    if plus.len() != half || minus.len() != half {
        return Err(Error::NotCanonicalizable(format!(
            "eigenspaces of the difference observable split {}/{} (need {half}/{half})",
            plus.len(),
            minus.len()
        )));
    }
    let col = |idx: &[usize], j: usize| -> ComplexMatrix {
        ComplexMatrix::from_fn(d, 1, |r, _| eig.vectors.get(r, idx[j]))
    };
    // cross block T_{ij} = ⟨minus_i| G |plus_j⟩, near-unitary; its polar
    // factor pairs the degenerate eigenbases
    let mut t = ComplexMatrix::zeros(half, half);
    for i in 0..half {
        let gv = g.matmul(&col(&minus, i))?;
        for j in 0..half {
            // T_{ij} = ⟨minus_i|G|plus_j⟩ = ⟨G·minus_i|plus_j⟩ (G Hermitian)
            t.set(i, j, gv.inner(&col(&plus, j))?);
        }
    }
    let t_hat = polar_unitary(&t)?;
    // new basis: |0,j⟩ ↔ plus_j, |1,j⟩ ↔ Σ_i minus_i (t_hat)_{ij}
    let mut u = ComplexMatrix::zeros(d, d);
    for j in 0..half {
        let vp = col(&plus, j);
        for r in 0..d {
            u.set(j, r, vp.get(r, 0).conj());
        }
        let mut w = ComplexMatrix::zeros(d, 1);
        for i in 0..half {
            let vm = col(&minus, i);
            for r in 0..d {
                let val = w.get(r, 0) + vm.get(r, 0) * t_hat.get(i, j);
                w.set(r, 0, val);
            }
        }
        for r in 0..d {
            u.set(half + j, r, w.get(r, 0).conj());
        }
    }
    // U maps D → Z⊗1, G → X⊗1 (up to the residual); a0 = (G+D)/√2 and
    // a1 = (G−D)/√2 land on (X±Z)/√2 ⊗ 1
    Ok((u, half))
}

// ─────────────────────────────────────────────────────────────────────────
// Extraction
// ─────────────────────────────────────────────────────────────────────────

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignBranch {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl std::fmt::Display for SignBranch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Plus => write!(f, "+"),
            Self::Minus => write!(f, "-"),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ObjectDistance {
    pub name: String,
    pub distance: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExtractionReport {
    pub sign_branch: SignBranch,
    pub junk_dims: [usize; 3],
    pub distances: Vec<ObjectDistance>,
    pub max_distance: f64,
    pub pass: bool,
}

fn object(name: String, distance: f64, tolerance: f64) -> ObjectDistance {
    ObjectDistance { name, distance, tolerance, pass: distance <= tolerance }
}

/// Pure-state ket of a density matrix (top eigenvector), requiring the
/// second eigenvalue to vanish within tolerance.
fn pure_state_ket(rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(rho)?;
    if eig.values.len() > 1 && eig.values[1].abs() > 1e-9 {
        return Err(Error::PremiseUnmet(format!(
            "source state is not pure (second eigenvalue {:.3e})",
            eig.values[1]
        )));
    }
    Ok(eig.vector(0).scale_re(eig.values[0].sqrt().max(0.0) / eig.values[0].max(1e-300).sqrt()))
}

/// Verify all certification suites on the realization, derive the local
/// unitaries from the observed objects alone, and report the Frobenius
/// distance of every conjugated object to its reference form.
pub fn extract_and_compare(r: &NetworkRealization, tolerance: f64) -> Result<ExtractionReport> {
    let tensor = CorrelationTensor::from_realization(r)?;
    let conditions = check_all_conditions(&tensor, TOL_PROBABILITY);
    if !all_pass(&conditions) {
        let failed: Vec<&str> = conditions
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.condition.as_str())
            .collect();
        return Err(Error::PremiseUnmet(format!(
            "{} condition(s) failed: {}",
            failed.len(),
            failed.join(", ")
        )));
    }
    extract_without_conditions(r, tolerance)
}

/// The extraction body, assuming the condition suites already passed.
fn extract_without_conditions(
    r: &NetworkRealization,
    tolerance: f64,
) -> Result<ExtractionReport> {
    let ref_obs = reference_observables();
    let parties = [Party::A, Party::B, Party::C];
    let pd = r.party_dims();
    let ed = r.eve_dims();

    let mut distances: Vec<ObjectDistance> = Vec::new();
    let mut party_unitaries = Vec::with_capacity(3);
    let mut eve_unitaries = Vec::with_capacity(3);
    let mut junk_dims = [0usize; 3];
    let mut branches = Vec::with_capacity(3);

    // W Z W† = (X+Z)/√2, W X W† = (X−Z)/√2; composing with W† turns the
    // A-style canonical pair into the (Z, X) pair of parties B and C
    let c8 = (std::f64::consts::PI / 8.0).cos();
    let s8 = (std::f64::consts::PI / 8.0).sin();
    let w_rot = ComplexMatrix::from_real(2, 2, &[c8, -s8, s8, c8])?;

    for s in 0..3 {
        let a0 = &r.party_observables[s][0].matrix;
        let a1 = &r.party_observables[s][1].matrix;
        let (u_canonical, junk) = canonicalize_anticommuting_pair(a0, a1)?;
        junk_dims[s] = junk;
        let junk_id = ComplexMatrix::identity(junk);
        let u_s = if s == 0 {
            u_canonical
        } else {
            kron(&w_rot.adjoint(), &junk_id).matmul(&u_canonical)?
        };

        // observables 0 and 1 must land on the reference pair ⊗ 1
        for setting in 0..2 {
            let conj =
                u_s.matmul(&r.party_observables[s][setting].matrix)?.matmul(&u_s.adjoint())?;
            let reference = ref_obs
                .iter()
                .find(|o| o.party == parties[s] && o.setting == setting)
                .expect("reference observable");
            let target = kron(&reference.matrix, &junk_id);
            distances.push(object(
                format!("obs_{}{}", parties[s], setting),
                frobenius_distance(&conj, &target)?,
                tolerance,
            ));
        }

        // third observable: ±Y ⊗ 1, record the branch
        let conj = u_s.matmul(&r.party_observables[s][2].matrix)?.matmul(&u_s.adjoint())?;
        let plus = kron(&pauli_y(), &junk_id);
        let minus = plus.scale_re(-1.0);
        let d_plus = frobenius_distance(&conj, &plus)?;
        let d_minus = frobenius_distance(&conj, &minus)?;
        let (branch, dist) = if d_plus <= d_minus {
            (SignBranch::Plus, d_plus)
        } else {
            (SignBranch::Minus, d_minus)
        };
        branches.push(branch);
        distances.push(object(format!("obs_{}2", parties[s]), dist, tolerance));

        // Eve-side unitary from the source state: polar factor of the
        // party-canonicalized coefficient matrix
        let ket = pure_state_ket(&r.source_states[s])?;
        let m0 = ComplexMatrix::from_fn(pd[s], ed[s], |row, col| ket.get(row * ed[s] + col, 0));
        let m = u_s.matmul(&m0)?;
        // full-rank premise on the party-side reduction
        let eig = hermitian_eig(&m.matmul(&m.adjoint())?)?;
        if *eig.values.last().expect("nonempty") < 1e-10 {
            return Err(Error::PremiseUnmet(format!(
                "source {s} party-side reduction is rank deficient"
            )));
        }
        let v = polar_unitary(&m)?;
        let u_eve = v.conj();

        // state comparison: the rotated source must be |φ⁺⟩ ⊗ junk
        let m_final = m.matmul(&u_eve.transpose())?;
        let final_ket =
            ComplexMatrix::from_fn(pd[s] * ed[s], 1, |row, _| m_final.get(row / ed[s], row % ed[s]));
        let rho_final = final_ket.outer()?;
        let layout = DimLayout::new(&[
            ("q", 2),
            ("j", junk),
            ("qbar", 2),
            ("jbar", junk),
        ])?;
        let (rho_perm, perm_layout) =
            permute_subsystems(&rho_final, &layout, &["q", "qbar", "j", "jbar"])?;
        let junk_marginal = partial_trace(&rho_perm, &perm_layout, &["j", "jbar"])?;
        let target = kron(&phi_plus().outer()?, &junk_marginal);
        distances.push(object(
            format!("source_{}", parties[s]),
            frobenius_distance(&rho_perm, &target)?,
            tolerance,
        ));

        party_unitaries.push(u_s);
        eve_unitaries.push(u_eve);
    }

    // coherent global ±Y branch
    let sign_branch = branches[0];
    if branches.iter().any(|b| *b != sign_branch) {
        return Err(Error::PremiseUnmet(format!(
            "incoherent ±Y branches across parties: {branches:?}"
        )));
    }

    // Eve's measurements: conjugate by ⊗ U_s̄ and compare with the embedded
    // reference effects
    let eve_total = kron(&kron(&eve_unitaries[0], &eve_unitaries[1]), &eve_unitaries[2]);
    let ref_meas = reference_eve_measurements();
    for (e, m) in r.eve_measurements.iter().enumerate() {
        for (l, eff) in m.effects.iter().enumerate() {
            let conj = eve_total.matmul(eff)?.matmul(&eve_total.adjoint())?;
            let target = embed_eve_operator(&ref_meas[e].effects[l], junk_dims)?;
            distances.push(object(
                format!("eve_e{e}_l{l}"),
                frobenius_distance(&conj, &target)?,
                tolerance,
            ));
        }
    }

    let max_distance =
        distances.iter().map(|d| d.distance).fold(0.0f64, f64::max);
    let pass = distances.iter().all(|d| d.pass);
    Ok(ExtractionReport { sign_branch, junk_dims, distances, max_distance, pass })
}

/// Scramble-then-extract round trip; the spine of acceptance testing and
/// the `extract` CLI command.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RoundtripReport {
    pub seed: u64,
    pub junk_dims: [usize; 3],
    pub negate_y: bool,
    /// Largest probability deviation from the reference tensor.
    pub correlation_deviation: f64,
    pub conditions_passed: usize,
    pub conditions_total: usize,
    pub extraction: ExtractionReport,
}

pub fn run_scramble_roundtrip(spec: &ScrambleSpec, tolerance: f64) -> Result<RoundtripReport> {
    let scrambled = scramble_realization(spec)?;
    let reference = NetworkRealization::reference();
    let t_ref = CorrelationTensor::from_realization(&reference)?;
    let t_scr = CorrelationTensor::from_realization(&scrambled)?;
    let correlation_deviation = t_ref.max_abs_difference(&t_scr)?;
    let conditions: Vec<ConditionReport> = check_all_conditions(&t_scr, TOL_PROBABILITY);
    let conditions_passed = conditions.iter().filter(|c| c.pass).count();
    let extraction = extract_and_compare(&scrambled, tolerance)?;
    Ok(RoundtripReport {
        seed: spec.seed,
        junk_dims: spec.junk_dims,
        negate_y: spec.negate_y,
        correlation_deviation,
        conditions_passed,
        conditions_total: conditions.len(),
        extraction,
    })
}
