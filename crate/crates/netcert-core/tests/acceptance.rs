//! Acceptance suite: every criterion the toolkit must meet, each printed as
//! one pass/fail line. Tolerances are pinned here and nowhere else.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::time::Instant;

use netcert_core::bell::{
    bell_operator, bell_value, check_mermin_condition, check_theorem1_conditions,
    check_theorem2_conditions, check_theorem3_conditions, classical_bound, mermin_value,
    quantum_bound, sos_operator, sos_residual, BellObservables, QUANTUM_BOUND,
};
use netcert_core::entanglement::{
    bound_entanglement_report, grid_product_overlap_real, max_product_overlap, ppt_check,
    EntanglementVerdict, SeesawConfig,
};
use netcert_core::extraction::{run_scramble_roundtrip, ScrambleSpec, SignBranch};
use netcert_core::linalg::{
    frobenius_distance, hermitian_eig, partial_trace, ComplexMatrix, DimLayout,
};
use netcert_core::network::{
    eve_outcome_prob, post_measurement_state, CorrelationTensor, NetworkRealization,
};
use netcert_core::qops::{
    gamma_projector, ghz_state, nlwe_basis, pauli_x, pauli_y, pauli_z, reference_eve_measurements,
    reshape_single_qubit_cut, second_singular_value, upb_vectors, Measurement,
};
use netcert_core::random::rng_for;

fn announce(criterion: &str, pass: bool) {
    println!("[{}] {criterion}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion failed: {criterion}");
}

fn reference_tensor() -> CorrelationTensor {
    CorrelationTensor::from_realization(&NetworkRealization::reference()).unwrap()
}

/// Criterion 1 — Tsirelson saturation: bell_value = 4√2 within 1e−9 for all
/// l, classical bound exactly 4 by enumeration, operator bound 4√2 within
/// 1e−9; all in under a second.
#[test]
fn criterion_1_tsirelson_saturation() {
    let start = Instant::now();
    let t = reference_tensor();
    let obs = BellObservables::reference();
    let mut pass = true;
    for l in 0..8 {
        pass &= (bell_value(&t, l).unwrap() - QUANTUM_BOUND).abs() <= 1e-9;
        pass &= classical_bound(l).unwrap() == 4.0;
        pass &= (quantum_bound(l, &obs).unwrap() - QUANTUM_BOUND).abs() <= 1e-9;
    }
    let elapsed = start.elapsed();
    pass &= elapsed.as_secs_f64() < 1.0;
    announce(
        &format!("criterion 1: Tsirelson saturation for all 8 inequalities ({elapsed:.2?})"),
        pass,
    );
}

/// Criterion 2 — SOS identity: 4√2·1 − Î_l equals the SOS operator within
/// Frobenius 1e−8 for all l and 100 random observable sets; the residual on
/// (|φ_l⟩, reference) is ≤ 1e−10.
#[test]
fn criterion_2_sos_identity() {
    let mut pass = true;
    let mut rng = rng_for(2024, 0);
    for trial in 0..100 {
        let obs = random_observables(&mut rng);
        let l = trial % 8;
        let sos = sos_operator(l, &obs).unwrap();
        let direct = ComplexMatrix::identity(8)
            .scale_re(QUANTUM_BOUND)
            .sub(&bell_operator(l, &obs).unwrap())
            .unwrap();
        pass &= frobenius_distance(&sos, &direct).unwrap() <= 1e-8;
    }
    let reference = BellObservables::reference();
    for l in 0..8 {
        let phi = ghz_state(l).unwrap();
        pass &= sos_residual(l, &phi, &reference).unwrap().abs() <= 1e-10;
    }
    announce("criterion 2: SOS decomposition identity (100 random sets + reference)", pass);
}

fn random_observables(rng: &mut rand_chacha::ChaCha8Rng) -> BellObservables {
    use rand::Rng;
    let mut random_obs = || {
        let v: [f64; 3] =
            [rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt().max(1e-6);
        pauli_x()
            .scale_re(v[0] / n)
            .add(&pauli_y().scale_re(v[1] / n))
            .unwrap()
            .add(&pauli_z().scale_re(v[2] / n))
            .unwrap()
    };
    BellObservables::new(
        random_obs(),
        random_obs(),
        random_obs(),
        random_obs(),
        random_obs(),
        random_obs(),
    )
    .unwrap()
}

/// Criterion 3 — certification conditions: all three suites pass at 1e−10
/// on the reference network, and each suite fails when its Eve measurement
/// is replaced by either of the other two.
#[test]
fn criterion_3_certification_conditions() {
    let tol = 1e-10;
    let t = reference_tensor();
    let t1 = check_theorem1_conditions(&t, tol);
    let t2 = check_theorem2_conditions(&t, tol);
    let t3 = check_theorem3_conditions(&t, tol);
    let mut pass = t1.len() == 16 && t2.len() == 8 && t3.len() == 8;
    pass &= t1.iter().chain(&t2).chain(&t3).all(|c| c.pass);

    // mutation testing: cross-replace Eve's measurements
    let reference = NetworkRealization::reference();
    type Suite = fn(&CorrelationTensor, f64) -> Vec<netcert_core::bell::ConditionReport>;
    let suites: [Suite; 3] =
        [check_theorem1_conditions, check_theorem2_conditions, check_theorem3_conditions];
    for own in 0..3usize {
        for other in 0..3usize {
            if own == other {
                continue;
            }
            let mut r = reference.clone();
            r.eve_measurements[own] = Measurement::projective(
                "E",
                own,
                reference.eve_measurements[other].effects.clone(),
            )
            .unwrap();
            let tm = CorrelationTensor::from_realization(&r).unwrap();
            let reports = suites[own](&tm, tol);
            pass &= reports.iter().any(|c| !c.pass);
        }
    }
    announce("criterion 3: theorem 1/2/3 condition suites + mutation testing", pass);
}

/// Criterion 4 — Mermin condition: value 4 within 1e−10 on both ±Y
/// branches; < 4 − 1e−3 when any third observable is replaced by X or Z.
#[test]
fn criterion_4_mermin_condition() {
    let mut pass = true;
    let t = reference_tensor();
    pass &= (mermin_value(&t).unwrap() - 4.0).abs() <= 1e-10;
    pass &= check_mermin_condition(&t, 1e-10).pass;

    let mut negated = NetworkRealization::reference();
    for obs in negated.party_observables.iter_mut() {
        obs[2].matrix = pauli_y().scale_re(-1.0);
    }
    let tn = CorrelationTensor::from_realization(&negated).unwrap();
    pass &= (mermin_value(&tn).unwrap() - 4.0).abs() <= 1e-10;

    for party in 0..3 {
        for replacement in [pauli_x(), pauli_z()] {
            let mut r = NetworkRealization::reference();
            r.party_observables[party][2].matrix = replacement;
            let tm = CorrelationTensor::from_realization(&r).unwrap();
            pass &= mermin_value(&tm).unwrap() < 4.0 - 1e-3;
        }
    }
    announce("criterion 4: Mermin-type condition (both branches, X/Z mutations)", pass);
}

/// Criterion 5 — bound entangled state: post-measurement state (e=2, l=4)
/// equals Γ/4 within 1e−10, P̄(4|2) = 1/2 within 1e−12, PPT on all cuts,
/// and the product-overlap witness with see-saw/grid agreement.
#[test]
fn criterion_5_bound_entanglement() {
    let mut pass = true;
    let r = NetworkRealization::reference();
    let rho = post_measurement_state(&r, 4, 2).unwrap();
    let gamma4 = gamma_projector().scale_re(0.25);
    pass &= frobenius_distance(&rho, &gamma4).unwrap() <= 1e-10;
    pass &= (eve_outcome_prob(&r, 4, 2).unwrap() - 0.5).abs() <= 1e-12;

    let layout = DimLayout::new(&[("A", 2), ("B", 2), ("C", 2)]).unwrap();
    for (_, min) in ppt_check(&gamma4, &layout).unwrap() {
        pass &= min >= -1e-12;
    }

    let seesaw = max_product_overlap(&gamma_projector(), &SeesawConfig::with_seed(2024)).unwrap();
    pass &= seesaw.best_overlap <= 1.0 - 1e-3;
    let grid = grid_product_overlap_real(&gamma_projector(), 400).unwrap();
    pass &= (seesaw.best_overlap - grid).abs() <= 2e-3;

    let report = bound_entanglement_report(&gamma4, &layout, &SeesawConfig::with_seed(2024))
        .unwrap();
    pass &= report.verdict == EntanglementVerdict::BoundEntangled;
    announce("criterion 5: Γ/4 bound entanglement (post-measurement, PPT, witness)", pass);
}

/// Criterion 6 — extraction round trip: 25 seeded scrambles over junk dims
/// 1 and 2 including all-negated-Y cases; correlations invariant within
/// 1e−10, every extracted object within 1e−7, coherent global branch;
/// < 2 minutes total.
#[test]
fn criterion_6_extraction_roundtrip() {
    let start = Instant::now();
    let mut pass = true;
    for i in 0..25u64 {
        let junk = if i % 2 == 0 { 1 } else { 2 };
        let mut spec = ScrambleSpec::new(1000 + i, junk);
        let negate = i % 5 == 4;
        if negate {
            spec = spec.with_negated_y();
        }
        let report = run_scramble_roundtrip(&spec, 1e-7).unwrap();
        pass &= report.correlation_deviation <= 1e-10;
        pass &= report.conditions_passed == report.conditions_total;
        pass &= report.extraction.pass;
        let want_branch = if negate { SignBranch::Minus } else { SignBranch::Plus };
        pass &= report.extraction.sign_branch == want_branch;
        if !pass {
            eprintln!(
                "seed {} junk {junk} negate {negate}: max distance {}",
                1000 + i,
                report.extraction.max_distance
            );
            break;
        }
    }
    let elapsed = start.elapsed();
    pass &= elapsed.as_secs_f64() < 120.0;
    announce(&format!("criterion 6: 25 scramble/extract round trips ({elapsed:.2?})"), pass);
}

/// Criterion 7 — structural suite: orthonormality/completeness of the three
/// bases, product structure of |δ_i⟩ and |τ_i⟩ across every cut, GHZ
/// single-qubit reductions = 1/2.
#[test]
fn criterion_7_structural_suite() {
    let mut pass = true;
    let families: [Vec<ComplexMatrix>; 3] = [
        (0..8).map(|l| ghz_state(l).unwrap()).collect(),
        nlwe_basis(),
        upb_vectors(),
    ];
    for kets in &families {
        for i in 0..kets.len() {
            for j in 0..kets.len() {
                let g = kets[i].inner(&kets[j]).unwrap();
                let want = if i == j { 1.0 } else { 0.0 };
                pass &= (g.re - want).abs() <= 1e-10 && g.im.abs() <= 1e-10;
            }
        }
    }
    // completeness of the two full bases and of the UPB ∪ {Γ}
    for (kets, extra) in
        [(&families[0], None), (&families[1], None), (&families[2], Some(gamma_projector()))]
    {
        let mut sum = extra.unwrap_or_else(|| ComplexMatrix::zeros(8, 8));
        for k in kets.iter() {
            sum = sum.add(&k.outer().unwrap()).unwrap();
        }
        pass &= frobenius_distance(&sum, &ComplexMatrix::identity(8)).unwrap() <= 1e-10;
    }
    // product rank-1 structure across every single-qubit cut
    for ket in families[1].iter().chain(families[2].iter()) {
        for qubit in 0..3 {
            let m = reshape_single_qubit_cut(ket, qubit).unwrap();
            pass &= second_singular_value(&m).unwrap() <= 1e-10;
        }
    }
    // GHZ reductions are maximally mixed on each qubit
    let layout = DimLayout::new(&[("q0", 2), ("q1", 2), ("q2", 2)]).unwrap();
    let half = ComplexMatrix::identity(2).scale_re(0.5);
    for l in 0..8 {
        let rho = ghz_state(l).unwrap().outer().unwrap();
        for q in ["q0", "q1", "q2"] {
            let red = partial_trace(&rho, &layout, &[q]).unwrap();
            pass &= frobenius_distance(&red, &half).unwrap() <= 1e-10;
        }
    }
    // Eve's reference measurements validate as projective
    for m in reference_eve_measurements() {
        pass &= m.validate(1e-10, true).is_ok();
    }
    // the spectrum of Γ is {0, 1}
    let eig = hermitian_eig(&gamma_projector()).unwrap();
    for v in eig.values {
        pass &= (v - 1.0).abs() <= 1e-10 || v.abs() <= 1e-10;
    }
    announce("criterion 7: structural suite (bases, products, reductions)", pass);
}
