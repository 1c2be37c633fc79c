//! The four-party network: three bipartite sources linking A, B, C to the
//! central party Eve, per-party observables, Eve's three measurements, and
//! the full correlation tensor p(abcl|xyze).
//!
//! Global factor ordering is [A, B, C, Ā, B̄, C̄] so the external block and
//! Eve's block are each contiguous; sources are built interleaved and
//! explicitly permuted. Probabilities are evaluated by contracting each
//! source into an Eve-side transfer operator, which keeps junk-enlarged
//! realizations cheap (the 4096-dimensional global state never needs to be
//! formed).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    kron, partial_trace, permute_subsystems, ComplexMatrix, DimLayout, C64, TOL_ALGEBRAIC,
};
use crate::qops::{reference_eve_measurements, reference_observables, Measurement, Observable,
    Party, phi_plus};

pub const PARTIES: [Party; 3] = [Party::A, Party::B, Party::C];
pub const SETTINGS_PER_PARTY: usize = 3;
pub const EVE_SETTINGS: usize = 3;
const MAX_EVE_OUTCOMES: usize = 8;

/// The full experiment: three bipartite source states ρ_{sS̄} (party ⊗ Eve
/// share), each party's observables, Eve's measurements and the dimension
/// layout [A, B, C, Ā, B̄, C̄].
#[derive(Clone, Debug)]
pub struct NetworkRealization {
    /// Density matrices on (party share) ⊗ (Eve share), one per source.
    pub source_states: [ComplexMatrix; 3],
    /// Observables for A, B, C; settings 0..=2 in order.
    pub party_observables: [Vec<Observable>; 3],
    /// Eve's measurements e = 0, 1, 2.
    pub eve_measurements: Vec<Measurement>,
    pub layout: DimLayout,
}

impl NetworkRealization {
    /// The reference experiment: |φ⁺⟩ sources, observables of the ideal
    /// scheme, Eve measuring the GHZ basis, the NLWE basis and the UPB
    /// hybrid.
    pub fn reference() -> Self {
        let pair = phi_plus().outer().expect("ket");
        let obs = reference_observables();
        let by_party = |p: Party| -> Vec<Observable> {
            obs.iter().filter(|o| o.party == p).cloned().collect()
        };
        Self {
            source_states: [pair.clone(), pair.clone(), pair],
            party_observables: [by_party(Party::A), by_party(Party::B), by_party(Party::C)],
            eve_measurements: reference_eve_measurements(),
            layout: DimLayout::new(&[
                ("A", 2),
                ("B", 2),
                ("C", 2),
                ("Abar", 2),
                ("Bbar", 2),
                ("Cbar", 2),
            ])
            .expect("fixed labels"),
        }
    }

    pub fn party_dims(&self) -> [usize; 3] {
        ["A", "B", "C"].map(|l| self.layout.dim_of(l).expect("layout labels"))
    }

    pub fn eve_dims(&self) -> [usize; 3] {
        ["Abar", "Bbar", "Cbar"].map(|l| self.layout.dim_of(l).expect("layout labels"))
    }

    pub fn eve_total_dim(&self) -> usize {
        self.eve_dims().iter().product()
    }

    /// Source states PSD with unit trace and dims consistent with the
    /// layout; observables and Eve measurements well formed.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let pd = self.party_dims();
        let ed = self.eve_dims();
        for (i, rho) in self.source_states.iter().enumerate() {
            let want = pd[i] * ed[i];
            if rho.rows() != want || rho.cols() != want {
                return Err(Error::DimMismatch(format!(
                    "source {i} is {}x{}, layout wants {want}",
                    rho.rows(),
                    rho.cols()
                )));
            }
            if !crate::linalg::is_psd(rho, tol)? {
                return Err(Error::Contract(format!("source {i} is not PSD")));
            }
            if (rho.trace()?.re - 1.0).abs() > tol {
                return Err(Error::Contract(format!("source {i} does not have unit trace")));
            }
        }
        for (i, obs) in self.party_observables.iter().enumerate() {
            if obs.len() != SETTINGS_PER_PARTY {
                return Err(Error::Contract(format!("party {i} must have 3 observables")));
            }
            for o in obs {
                o.validate(tol)?;
                if o.matrix.rows() != pd[i] {
                    return Err(Error::DimMismatch(format!(
                        "observable {}{} has dim {}, party dim {}",
                        o.party,
                        o.setting,
                        o.matrix.rows(),
                        pd[i]
                    )));
                }
            }
        }
        if self.eve_measurements.len() != EVE_SETTINGS {
            return Err(Error::Contract("Eve must have 3 measurements".into()));
        }
        let etot = self.eve_total_dim();
        for m in &self.eve_measurements {
            m.validate(tol, false)?;
            if m.dim() != etot {
                return Err(Error::DimMismatch(format!(
                    "Eve measurement {} has dim {}, Eve dim {}",
                    m.setting,
                    m.dim(),
                    etot
                )));
            }
        }
        Ok(())
    }

    fn observable(&self, party: usize, setting: usize) -> Result<&ComplexMatrix> {
        self.party_observables
            .get(party)
            .and_then(|v| v.get(setting))
            .map(|o| &o.matrix)
            .ok_or_else(|| Error::IndexRange(format!("party {party} setting {setting}")))
    }

    fn eve_effect(&self, l: usize, e: usize) -> Result<&ComplexMatrix> {
        self.eve_measurements
            .get(e)
            .and_then(|m| m.effects.get(l))
            .ok_or_else(|| Error::IndexRange(format!("Eve outcome {l} of setting {e}")))
    }

    /// Eve-side transfer operator of source `s` for a party-side operator O:
    /// K = Tr_party[(O ⊗ 1) ρ_s], so that expectations factor as
    /// Tr[(K_A ⊗ K_B ⊗ K_C) R].
    fn transfer(&self, s: usize, op: &ComplexMatrix) -> Result<ComplexMatrix> {
        let pd = self.party_dims()[s];
        let ed = self.eve_dims()[s];
        let rho = &self.source_states[s];
        if op.rows() != pd || op.cols() != pd {
            return Err(Error::DimMismatch(format!(
                "transfer operator dim {} vs party dim {pd}",
                op.rows()
            )));
        }
        let mut k = ComplexMatrix::zeros(ed, ed);
        for j in 0..ed {
            for jp in 0..ed {
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..pd {
                    for kk in 0..pd {
                        // K[j,j'] = Σ_{i,k} O[i,k] ρ[(k,j),(i,j')]
                        acc += op.get(i, kk) * rho.get(kk * ed + j, i * ed + jp);
                    }
                }
                k.set(j, jp, acc);
            }
        }
        Ok(k)
    }
}

/// Global density matrix on [A, B, C, Ā, B̄, C̄], built interleaved and
/// permuted into place. 64×64 for the reference layout.
pub fn assemble_global_state(r: &NetworkRealization) -> Result<ComplexMatrix> {
    let pd = r.party_dims();
    let ed = r.eve_dims();
    let interleaved = kron(&kron(&r.source_states[0], &r.source_states[1]), &r.source_states[2]);
    let layout = DimLayout::new(&[
        ("A", pd[0]),
        ("Abar", ed[0]),
        ("B", pd[1]),
        ("Bbar", ed[1]),
        ("C", pd[2]),
        ("Cbar", ed[2]),
    ])?;
    let (out, _) =
        permute_subsystems(&interleaved, &layout, &["A", "B", "C", "Abar", "Bbar", "Cbar"])?;
    Ok(out)
}

fn check_binary(v: usize, what: &str) -> Result<()> {
    if v > 1 {
        return Err(Error::IndexRange(format!("{what} = {v} (binary outcome)")));
    }
    Ok(())
}

fn check_setting(v: usize, what: &str) -> Result<()> {
    if v >= SETTINGS_PER_PARTY {
        return Err(Error::IndexRange(format!("{what} = {v} (settings are 0..=2)")));
    }
    Ok(())
}

/// p(abcl|xyze) = Tr[ρ_ABCE · N^A_{a|x} ⊗ N^B_{b|y} ⊗ N^C_{c|z} ⊗ N^E_{l|e}].
#[allow(clippy::too_many_arguments)]
pub fn probability(
    r: &NetworkRealization,
    a: usize,
    b: usize,
    c: usize,
    l: usize,
    x: usize,
    y: usize,
    z: usize,
    e: usize,
) -> Result<f64> {
    check_binary(a, "a")?;
    check_binary(b, "b")?;
    check_binary(c, "c")?;
    check_setting(x, "x")?;
    check_setting(y, "y")?;
    check_setting(z, "z")?;
    let effect = r.eve_effect(l, e)?;
    let ka = r.transfer(0, &Observable { party: Party::A, setting: x, matrix: r.observable(0, x)?.clone() }.effect(a)?)?;
    let kb = r.transfer(1, &Observable { party: Party::B, setting: y, matrix: r.observable(1, y)?.clone() }.effect(b)?)?;
    let kc = r.transfer(2, &Observable { party: Party::C, setting: z, matrix: r.observable(2, z)?.clone() }.effect(c)?)?;
    let kabc = kron(&kron(&ka, &kb), &kc);
    let p = kabc.trace_product(effect)?;
    if p.im.abs() > 1e-9 {
        return Err(Error::Contract(format!(
            "probability has imaginary part {:.3e} (non-Hermitian effects?)",
            p.im
        )));
    }
    Ok(p.re)
}

/// ⟨A_x B_y C_z N^E_{l|e}⟩ = Σ_{abc} (−1)^{a+b+c} p(abcl|xyze), evaluated as
/// the direct operator trace.
pub fn correlator(
    r: &NetworkRealization,
    x: usize,
    y: usize,
    z: usize,
    l: usize,
    e: usize,
) -> Result<f64> {
    check_setting(x, "x")?;
    check_setting(y, "y")?;
    check_setting(z, "z")?;
    let effect = r.eve_effect(l, e)?;
    let ka = r.transfer(0, r.observable(0, x)?)?;
    let kb = r.transfer(1, r.observable(1, y)?)?;
    let kc = r.transfer(2, r.observable(2, z)?)?;
    let kabc = kron(&kron(&ka, &kb), &kc);
    Ok(kabc.trace_product(effect)?.re)
}

/// Eve's marginal P̄(l|e) = Σ_{abc} p(abcl|xyze); independent of the external
/// settings, which is re-verified numerically here.
pub fn eve_outcome_prob(r: &NetworkRealization, l: usize, e: usize) -> Result<f64> {
    let effect = r.eve_effect(l, e)?;
    let ids: Vec<ComplexMatrix> =
        r.party_dims().iter().map(|&d| ComplexMatrix::identity(d)).collect();
    let ka = r.transfer(0, &ids[0])?;
    let kb = r.transfer(1, &ids[1])?;
    let kc = r.transfer(2, &ids[2])?;
    let p = kron(&kron(&ka, &kb), &kc).trace_product(effect)?.re;
    // cross-check setting independence through the outcome sums
    for (x, y, z) in [(0, 0, 0), (1, 2, 1)] {
        let mut tot = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    tot += probability(r, a, b, c, l, x, y, z, e)?;
                }
            }
        }
        if (tot - p).abs() > TOL_ALGEBRAIC {
            return Err(Error::Contract(format!(
                "Eve marginal depends on external settings: {tot} vs {p}"
            )));
        }
    }
    Ok(p)
}

/// Post-measurement state of ABC given Eve's outcome l of measurement e:
/// (1/P̄(l)) Tr_{ĀB̄C̄}[(1_ABC ⊗ R_{l|e}) ρ_ABCE].
pub fn post_measurement_state(r: &NetworkRealization, l: usize, e: usize) -> Result<ComplexMatrix> {
    let pbar = eve_outcome_prob(r, l, e)?;
    if pbar <= 1e-12 {
        return Err(Error::UndefinedConditional(format!(
            "outcome {l} of Eve's measurement {e} has probability {pbar:.3e}"
        )));
    }
    let rho = assemble_global_state(r)?;
    let effect = r.eve_effect(l, e)?;
    let pd = r.party_dims();
    let id_abc = ComplexMatrix::identity(pd.iter().product());
    let big_effect = kron(&id_abc, effect);
    let weighted = big_effect.matmul(&rho)?;
    let reduced = partial_trace(&weighted, &r.layout, &["A", "B", "C"])?;
    Ok(reduced.scale_re(1.0 / pbar))
}

// ─────────────────────────────────────────────────────────────────────────
// Noise
// ─────────────────────────────────────────────────────────────────────────

/// Per-source visibility: each source state becomes v·ρ + (1−v)·1/d.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct NoiseModel {
    pub visibilities: [f64; 3],
}

impl NoiseModel {
    pub fn uniform(v: f64) -> Self {
        Self { visibilities: [v, v, v] }
    }

    pub fn validate(&self) -> Result<()> {
        for (i, v) in self.visibilities.iter().enumerate() {
            if !(0.0..=1.0).contains(v) {
                return Err(Error::Config(format!("visibility {i} = {v} outside [0,1]")));
            }
        }
        Ok(())
    }
}

pub fn apply_noise(r: &NetworkRealization, model: &NoiseModel) -> Result<NetworkRealization> {
    model.validate()?;
    let mut out = r.clone();
    for (i, rho) in out.source_states.iter_mut().enumerate() {
        let v = model.visibilities[i];
        let d = rho.rows();
        let mixed = ComplexMatrix::identity(d).scale_re((1.0 - v) / d as f64);
        *rho = rho.scale_re(v).add(&mixed)?;
    }
    Ok(out)
}

// ─────────────────────────────────────────────────────────────────────────
// Correlation tensor
// ─────────────────────────────────────────────────────────────────────────

/// One tensor entry; the row shape of the CSV/JSON interchange format.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct TensorRecord {
    pub x: usize,
    pub y: usize,
    pub z: usize,
    pub e: usize,
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub l: usize,
    pub p: f64,
}

/// p(abcl|xyze) over all settings and outcomes, with derived correlators and
/// Eve marginals. Immutable after construction.
#[derive(Clone, Debug)]
pub struct CorrelationTensor {
    /// Flat storage indexed [x][y][z][e][a][b][c][l] with a fixed l-stride
    /// of 8; entries with l ≥ outcome_counts[e] stay zero.
    probs: Vec<f64>,
    outcome_counts: [usize; 3],
}

impl CorrelationTensor {
    fn index(x: usize, y: usize, z: usize, e: usize, a: usize, b: usize, c: usize, l: usize) -> usize {
        ((((((x * 3 + y) * 3 + z) * 3 + e) * 2 + a) * 2 + b) * 2 + c) * MAX_EVE_OUTCOMES + l
    }

    /// Evaluate every entry of Eq.-(5)-style probabilities for the
    /// realization.
    pub fn from_realization(r: &NetworkRealization) -> Result<Self> {
        let outcome_counts = [
            r.eve_measurements[0].outcomes(),
            r.eve_measurements[1].outcomes(),
            r.eve_measurements[2].outcomes(),
        ];
        for (e, &n) in outcome_counts.iter().enumerate() {
            if n > MAX_EVE_OUTCOMES {
                return Err(Error::Contract(format!(
                    "Eve measurement {e} has {n} outcomes, max {MAX_EVE_OUTCOMES}"
                )));
            }
        }
        // Precompute per-source transfer operators of every effect.
        let mut k: Vec<Vec<[ComplexMatrix; 2]>> = Vec::with_capacity(3);
        for s in 0..3 {
            let mut per_setting = Vec::with_capacity(SETTINGS_PER_PARTY);
            for setting in 0..SETTINGS_PER_PARTY {
                let obs = r.observable(s, setting)?;
                let o = Observable { party: PARTIES[s], setting, matrix: obs.clone() };
                per_setting.push([
                    r.transfer(s, &o.effect(0)?)?,
                    r.transfer(s, &o.effect(1)?)?,
                ]);
            }
            k.push(per_setting);
        }
        let size = 3 * 3 * 3 * 3 * 2 * 2 * 2 * MAX_EVE_OUTCOMES;
        let mut probs = vec![0.0; size];
        for x in 0..3 {
            for y in 0..3 {
                for z in 0..3 {
                    for a in 0..2 {
                        for b in 0..2 {
                            for c in 0..2 {
                                let kabc =
                                    kron(&kron(&k[0][x][a], &k[1][y][b]), &k[2][z][c]);
                                for e in 0..3 {
                                    for l in 0..outcome_counts[e] {
                                        let p = kabc
                                            .trace_product(r.eve_effect(l, e)?)?
                                            .re;
                                        probs[Self::index(x, y, z, e, a, b, c, l)] = p;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(Self { probs, outcome_counts })
    }

    pub fn outcome_count(&self, e: usize) -> usize {
        self.outcome_counts[e]
    }

    /// p(abcl|xyze); zero-probability structural entries (l beyond the
    /// measurement's outcome count) are an index error.
    #[allow(clippy::too_many_arguments)]
    pub fn p(&self, a: usize, b: usize, c: usize, l: usize, x: usize, y: usize, z: usize, e: usize) -> Result<f64> {
        check_binary(a, "a")?;
        check_binary(b, "b")?;
        check_binary(c, "c")?;
        check_setting(x, "x")?;
        check_setting(y, "y")?;
        check_setting(z, "z")?;
        if e >= 3 {
            return Err(Error::IndexRange(format!("e = {e}")));
        }
        if l >= self.outcome_counts[e] {
            return Err(Error::IndexRange(format!(
                "l = {l} for measurement {e} with {} outcomes",
                self.outcome_counts[e]
            )));
        }
        Ok(self.probs[Self::index(x, y, z, e, a, b, c, l)])
    }

    /// Σ_{abc} (−1)^{a+b+c} p(abcl|xyze).
    pub fn correlator(&self, x: usize, y: usize, z: usize, l: usize, e: usize) -> Result<f64> {
        self.marginal_correlator([Some(x), Some(y), Some(z)], l, e)
    }

    /// Correlator with identity slots: parties whose slot is `None`
    /// contribute no sign (their outcome is summed over); identity slots are
    /// evaluated at setting 0, which no-signaling makes immaterial.
    pub fn marginal_correlator(
        &self,
        slots: [Option<usize>; 3],
        l: usize,
        e: usize,
    ) -> Result<f64> {
        let settings = slots.map(|s| s.unwrap_or(0));
        let mut tot = 0.0;
        for a in 0..2usize {
            for b in 0..2usize {
                for c in 0..2usize {
                    let mut sign = 1.0;
                    if slots[0].is_some() && a == 1 {
                        sign = -sign;
                    }
                    if slots[1].is_some() && b == 1 {
                        sign = -sign;
                    }
                    if slots[2].is_some() && c == 1 {
                        sign = -sign;
                    }
                    tot += sign * self.p(a, b, c, l, settings[0], settings[1], settings[2], e)?;
                }
            }
        }
        Ok(tot)
    }

    /// Eve's marginal P̄(l|e) at settings (0,0,0).
    pub fn eve_marginal(&self, l: usize, e: usize) -> Result<f64> {
        self.marginal_correlator([None, None, None], l, e)
    }

    /// Correlator on the conditional distribution p(abc|xyz, l, e)
    /// = p(abcl|xyze)/P̄(l|e).
    pub fn conditional_correlator(
        &self,
        x: usize,
        y: usize,
        z: usize,
        l: usize,
        e: usize,
    ) -> Result<f64> {
        self.conditional_marginal_correlator([Some(x), Some(y), Some(z)], l, e)
    }

    pub fn conditional_marginal_correlator(
        &self,
        slots: [Option<usize>; 3],
        l: usize,
        e: usize,
    ) -> Result<f64> {
        let pbar = self.eve_marginal(l, e)?;
        if pbar <= 1e-12 {
            return Err(Error::UndefinedConditional(format!(
                "conditioning on outcome {l} of measurement {e} with P̄ = {pbar:.3e}"
            )));
        }
        Ok(self.marginal_correlator(slots, l, e)? / pbar)
    }

    /// Σ_{abcl} p = 1 for every setting tuple, within tol.
    pub fn verify_normalization(&self, tol: f64) -> Result<()> {
        for x in 0..3 {
            for y in 0..3 {
                for z in 0..3 {
                    for e in 0..3 {
                        let mut tot = 0.0;
                        for a in 0..2 {
                            for b in 0..2 {
                                for c in 0..2 {
                                    for l in 0..self.outcome_counts[e] {
                                        tot += self.p(a, b, c, l, x, y, z, e)?;
                                    }
                                }
                            }
                        }
                        if (tot - 1.0).abs() > tol {
                            return Err(Error::Contract(format!(
                                "normalization at (x,y,z,e)=({x},{y},{z},{e}): {tot}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Marginals of any subset of parties (and Eve) do not depend on the
    /// remote settings, within tol.
    pub fn verify_no_signaling(&self, tol: f64) -> Result<()> {
        // Eve+two-party marginals independent of the remaining party's setting
        for e in 0..3 {
            for l in 0..self.outcome_counts[e] {
                for moved in 0..3 {
                    for fixed1 in 0..2 {
                        for fixed2 in 0..2 {
                            let mut vals = Vec::new();
                            for s in 0..3 {
                                let mut tot = 0.0;
                                for out in 0..2 {
                                    let (a, b, c, x, y, z) = match moved {
                                        0 => (out, fixed1, fixed2, s, 0, 0),
                                        1 => (fixed1, out, fixed2, 0, s, 0),
                                        _ => (fixed1, fixed2, out, 0, 0, s),
                                    };
                                    tot += self.p(a, b, c, l, x, y, z, e)?;
                                }
                                vals.push(tot);
                            }
                            let spread = vals.iter().cloned().fold(f64::MIN, f64::max)
                                - vals.iter().cloned().fold(f64::MAX, f64::min);
                            if spread > tol {
                                return Err(Error::Contract(format!(
                                    "signaling: party {moved} marginal moves by {spread:.3e}"
                                )));
                            }
                        }
                    }
                }
                // Eve marginal independent of all external settings
                let base = self.eve_marginal(l, e)?;
                for (x, y, z) in [(2, 1, 0), (1, 1, 1)] {
                    let mut tot = 0.0;
                    for a in 0..2 {
                        for b in 0..2 {
                            for c in 0..2 {
                                tot += self.p(a, b, c, l, x, y, z, e)?;
                            }
                        }
                    }
                    if (tot - base).abs() > tol {
                        return Err(Error::Contract(format!(
                            "signaling to Eve at (l,e)=({l},{e}): {tot} vs {base}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Largest entrywise deviation between two tensors over the shared
    /// outcome structure; errors if the outcome counts differ.
    pub fn max_abs_difference(&self, other: &Self) -> Result<f64> {
        if self.outcome_counts != other.outcome_counts {
            return Err(Error::DimMismatch(format!(
                "outcome counts {:?} vs {:?}",
                self.outcome_counts, other.outcome_counts
            )));
        }
        let mut worst: f64 = 0.0;
        for (a, b) in self.probs.iter().zip(&other.probs) {
            worst = worst.max((a - b).abs());
        }
        Ok(worst)
    }

    /// All rows in lexicographic (x,y,z,e,a,b,c,l) order.
    pub fn records(&self) -> Vec<TensorRecord> {
        let mut out = Vec::new();
        for x in 0..3 {
            for y in 0..3 {
                for z in 0..3 {
                    for e in 0..3 {
                        for a in 0..2 {
                            for b in 0..2 {
                                for c in 0..2 {
                                    for l in 0..self.outcome_counts[e] {
                                        out.push(TensorRecord {
                                            x,
                                            y,
                                            z,
                                            e,
                                            a,
                                            b,
                                            c,
                                            l,
                                            p: self.probs
                                                [Self::index(x, y, z, e, a, b, c, l)],
                                        });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Rows restricted to one Eve setting.
    pub fn records_for_eve_setting(&self, e: usize) -> Result<Vec<TensorRecord>> {
        if e >= 3 {
            return Err(Error::IndexRange(format!("e = {e}")));
        }
        Ok(self.records().into_iter().filter(|r| r.e == e).collect())
    }

    /// CSV with header `x,y,z,e,a,b,c,l,p`; probabilities printed with 17
    /// significant digits so the round trip is bit exact.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,y,z,e,a,b,c,l,p\n");
        for r in self.records() {
            s.push_str(&record_csv_line(&r));
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == "x,y,z,e,a,b,c,l,p" => {}
            other => {
                return Err(Error::Config(format!("bad CSV header: {other:?}")));
            }
        }
        let mut probs = vec![0.0; 3 * 3 * 3 * 3 * 2 * 2 * 2 * MAX_EVE_OUTCOMES];
        let mut counts = [0usize; 3];
        for (ln, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.trim().split(',').collect();
            if fields.len() != 9 {
                return Err(Error::Config(format!("CSV line {}: expected 9 fields", ln + 2)));
            }
            let parse_idx = |s: &str| -> Result<usize> {
                s.parse::<usize>().map_err(|_| Error::Config(format!("bad index {s}")))
            };
            let (x, y, z, e) = (
                parse_idx(fields[0])?,
                parse_idx(fields[1])?,
                parse_idx(fields[2])?,
                parse_idx(fields[3])?,
            );
            let (a, b, c, l) = (
                parse_idx(fields[4])?,
                parse_idx(fields[5])?,
                parse_idx(fields[6])?,
                parse_idx(fields[7])?,
            );
            let p: f64 =
                fields[8].parse().map_err(|_| Error::Config(format!("bad probability {}", fields[8])))?;
            if x > 2 || y > 2 || z > 2 || e > 2 || a > 1 || b > 1 || c > 1 || l >= MAX_EVE_OUTCOMES {
                return Err(Error::Config(format!("CSV line {}: index out of range", ln + 2)));
            }
            counts[e] = counts[e].max(l + 1);
            probs[Self::index(x, y, z, e, a, b, c, l)] = p;
        }
        Ok(Self { probs, outcome_counts: counts })
    }

    /// JSON document with a schema tag, outcome counts and all records.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&TensorDoc {
            schema: 1,
            outcome_counts: self.outcome_counts,
            records: self.records(),
        })
        .expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: TensorDoc =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("tensor JSON: {e}")))?;
        if doc.schema != 1 {
            return Err(Error::Config(format!("unsupported tensor schema {}", doc.schema)));
        }
        let mut probs = vec![0.0; 3 * 3 * 3 * 3 * 2 * 2 * 2 * MAX_EVE_OUTCOMES];
        for r in &doc.records {
            if r.x > 2 || r.y > 2 || r.z > 2 || r.e > 2 || r.a > 1 || r.b > 1 || r.c > 1
                || r.l >= doc.outcome_counts[r.e]
            {
                return Err(Error::Config("tensor JSON record out of range".into()));
            }
            probs[Self::index(r.x, r.y, r.z, r.e, r.a, r.b, r.c, r.l)] = r.p;
        }
        Ok(Self { probs, outcome_counts: doc.outcome_counts })
    }
}

#[derive(Serialize, Deserialize)]
struct TensorDoc {
    schema: u32,
    outcome_counts: [usize; 3],
    records: Vec<TensorRecord>,
}

/// One CSV row with a 17-significant-digit probability.
pub fn record_csv_line(r: &TensorRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{:.16e}\n",
        r.x, r.y, r.z, r.e, r.a, r.b, r.c, r.l, r.p
    )
}
