//! Structural checks on the UPB and the bound entangled state: see-saw
//! search for the best fully product vector in a subspace, unextendibility,
//! PPT across all bipartitions, and the combined bound-entanglement verdict.
//!
//! The see-saw is alternating maximization of ⟨abc|Π|abc⟩ over the three
//! local kets: with two kets fixed the optimal third is the top eigenvector
//! of the contracted 2×2 operator, so each sweep is monotone. Two
//! independent grid-search oracles cross-check it: a real 3-angle grid (the
//! optimum for Γ is attained at real kets) and a Bloch-angle pair grid with
//! the third qubit solved in closed form (for generic complex projectors).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    frobenius_distance, hermitian_eig, partial_transpose, support_projector, ComplexMatrix,
    DimLayout, C64,
};
use crate::qops::{reshape_single_qubit_cut, second_singular_value};
use crate::random::{random_ket, rng_for};

/// Unextendibility threshold: a complement is accepted as completely
/// entangled when no product vector reaches overlap 1 − 1e−3.
pub const UNEXTENDIBILITY_GAP: f64 = 1e-3;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SeesawConfig {
    pub restarts: usize,
    pub max_sweeps: usize,
    pub convergence: f64,
    pub seed: u64,
}

impl Default for SeesawConfig {
    fn default() -> Self {
        Self { restarts: 64, max_sweeps: 500, convergence: 1e-12, seed: 1 }
    }
}

impl SeesawConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }
}

/// Outcome of the product-vector search.
#[derive(Clone, Debug)]
pub struct ProductSearchResult {
    pub best_overlap: f64,
    /// The maximizing local kets (one per qubit).
    pub kets: [ComplexMatrix; 3],
    /// Total see-saw sweeps across all restarts.
    pub iterations: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Final overlap of each restart, in restart order.
    pub per_restart: Vec<f64>,
}

fn check_three_qubit_projector(projector: &ComplexMatrix) -> Result<()> {
    if projector.rows() != 8 || projector.cols() != 8 {
        return Err(Error::DimMismatch(format!(
            "product search needs an 8x8 projector, got {}x{}",
            projector.rows(),
            projector.cols()
        )));
    }
    if !projector.is_hermitian(1e-9) {
        return Err(Error::Contract("product search input is not Hermitian".into()));
    }
    let sq = projector.matmul(projector)?;
    if frobenius_distance(&sq, projector)? > 1e-8 {
        return Err(Error::Contract("product search input is not idempotent".into()));
    }
    Ok(())
}

/// ⟨a⊗b⊗c| P |a⊗b⊗c⟩.
fn product_overlap(p: &ComplexMatrix, kets: &[ComplexMatrix; 3]) -> f64 {
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                let bra = kets[0].get(i, 0).conj() * kets[1].get(j, 0).conj() * kets[2].get(k, 0).conj();
                for ip in 0..2 {
                    for jp in 0..2 {
                        for kp in 0..2 {
                            let ket = kets[0].get(ip, 0) * kets[1].get(jp, 0) * kets[2].get(kp, 0);
                            acc += bra * p.get(i * 4 + j * 2 + k, ip * 4 + jp * 2 + kp) * ket;
                        }
                    }
                }
            }
        }
    }
    acc.re
}

/// Contract all qubits except `q` with the current kets, producing the 2×2
/// operator whose top eigenvector is the optimal update for qubit `q`.
fn contract_to_qubit(p: &ComplexMatrix, kets: &[ComplexMatrix; 3], q: usize) -> ComplexMatrix {
    let mut f = ComplexMatrix::zeros(2, 2);
    for i in 0..2 {
        for ip in 0..2 {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..2 {
                for k in 0..2 {
                    for jp in 0..2 {
                        for kp in 0..2 {
                            let (row, col, w) = match q {
                                0 => (
                                    i * 4 + j * 2 + k,
                                    ip * 4 + jp * 2 + kp,
                                    kets[1].get(j, 0).conj()
                                        * kets[2].get(k, 0).conj()
                                        * kets[1].get(jp, 0)
                                        * kets[2].get(kp, 0),
                                ),
                                1 => (
                                    j * 4 + i * 2 + k,
                                    jp * 4 + ip * 2 + kp,
                                    kets[0].get(j, 0).conj()
                                        * kets[2].get(k, 0).conj()
                                        * kets[0].get(jp, 0)
                                        * kets[2].get(kp, 0),
                                ),
                                _ => (
                                    j * 4 + k * 2 + i,
                                    jp * 4 + kp * 2 + ip,
                                    kets[0].get(j, 0).conj()
                                        * kets[1].get(k, 0).conj()
                                        * kets[0].get(jp, 0)
                                        * kets[1].get(kp, 0),
                                ),
                            };
                            acc += w * p.get(row, col);
                        }
                    }
                }
            }
            f.set(i, ip, acc);
        }
    }
    // symmetrize away rounding before the 2x2 eigensolve
    f.add(&f.adjoint()).expect("2x2").scale_re(0.5)
}

/// Alternating maximization of the product overlap with `restarts` random
/// initial points; deterministic for a given seed and restart count.
pub fn max_product_overlap(
    projector: &ComplexMatrix,
    cfg: &SeesawConfig,
) -> Result<ProductSearchResult> {
    check_three_qubit_projector(projector)?;
    let mut best = f64::NEG_INFINITY;
    let mut best_kets: Option<[ComplexMatrix; 3]> = None;
    let mut total_sweeps = 0usize;
    let mut per_restart = Vec::with_capacity(cfg.restarts);
    for restart in 0..cfg.restarts {
        let mut rng = rng_for(cfg.seed, restart as u64);
        let mut kets =
            [random_ket(&mut rng, 2), random_ket(&mut rng, 2), random_ket(&mut rng, 2)];
        let mut prev = product_overlap(projector, &kets);
        let mut cur = prev;
        for _sweep in 0..cfg.max_sweeps {
            total_sweeps += 1;
            for q in 0..3 {
                let f = contract_to_qubit(projector, &kets, q);
                let eig = hermitian_eig(&f)?;
                kets[q] = eig.vector(0);
            }
            cur = product_overlap(projector, &kets);
            // each sweep is a sequence of exact maximizations, so the
            // overlap is monotone up to rounding
            debug_assert!(cur >= prev - 1e-9, "see-saw regressed: {prev} -> {cur}");
            if (cur - prev).abs() < cfg.convergence {
                break;
            }
            prev = cur;
        }
        per_restart.push(cur);
        if cur > best {
            best = cur;
            best_kets = Some(kets);
        }
    }
    let kets = best_kets.expect("at least one restart");
    Ok(ProductSearchResult {
        best_overlap: best,
        kets,
        iterations: total_sweeps,
        restarts: cfg.restarts,
        seed: cfg.seed,
        per_restart,
    })
}

/// Exhaustive real-saxis oracle: one angle per qubit, kets (cos θ, sin θ),
/// θ on an n-point grid over [0, π). Independent of the see-saw path.
/// Adequate for real-symmetric projectors such as Γ, whose optimum is
/// attained at real kets.
pub fn grid_product_overlap_real(projector: &ComplexMatrix, n: usize) -> Result<f64> {
    check_three_qubit_projector(projector)?;
    if n == 0 {
        return Err(Error::Config("grid resolution must be positive".into()));
    }
    let step = std::f64::consts::PI / n as f64;
    let kets: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let t = i as f64 * step;
            [t.cos(), t.sin()]
        })
        .collect();
    let mut best = f64::NEG_INFINITY;
    for a in &kets {
        // G[(j,k),(j',k')] = Σ_{i,i'} a_i P[(i,j,k),(i',j',k')] a_{i'}
        let mut g = [[C64::new(0.0, 0.0); 4]; 4];
        for j in 0..2 {
            for k in 0..2 {
                for jp in 0..2 {
                    for kp in 0..2 {
                        let mut acc = C64::new(0.0, 0.0);
                        for (i, ai) in a.iter().enumerate() {
                            for (ip, aip) in a.iter().enumerate() {
                                acc += projector.get(i * 4 + j * 2 + k, ip * 4 + jp * 2 + kp)
                                    * (ai * aip);
                            }
                        }
                        g[j * 2 + k][jp * 2 + kp] = acc;
                    }
                }
            }
        }
        for b in &kets {
            let mut f = [[C64::new(0.0, 0.0); 2]; 2];
            for k in 0..2 {
                for kp in 0..2 {
                    let mut acc = C64::new(0.0, 0.0);
                    for (j, bj) in b.iter().enumerate() {
                        for (jp, bjp) in b.iter().enumerate() {
                            acc += g[j * 2 + k][jp * 2 + kp] * (bj * bjp);
                        }
                    }
                    f[k][kp] = acc;
                }
            }
            for c in &kets {
                let mut acc = 0.0;
                for (k, ck) in c.iter().enumerate() {
                    for (kp, ckp) in c.iter().enumerate() {
                        acc += (f[k][kp] * (ck * ckp)).re;
                    }
                }
                best = best.max(acc);
            }
        }
    }
    Ok(best)
}

/// Complex oracle for generic projectors: Bloch-angle grid over two qubits,
/// closed-form top eigenvalue of the contracted 2×2 operator for the third.
pub fn grid_product_overlap_bloch(
    projector: &ComplexMatrix,
    n_theta: usize,
    n_phi: usize,
) -> Result<f64> {
    check_three_qubit_projector(projector)?;
    if n_theta == 0 || n_phi == 0 {
        return Err(Error::Config("grid resolution must be positive".into()));
    }
    let mut kets: Vec<[C64; 2]> = Vec::with_capacity(n_theta * n_phi + 2);
    for it in 0..n_theta {
        let theta = (it as f64 + 0.5) * std::f64::consts::PI / n_theta as f64;
        for ip in 0..n_phi {
            let phi = ip as f64 * 2.0 * std::f64::consts::PI / n_phi as f64;
            kets.push([
                C64::new((theta / 2.0).cos(), 0.0),
                C64::from_polar((theta / 2.0).sin(), phi),
            ]);
        }
    }
    kets.push([C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
    kets.push([C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);

    let mut best = f64::NEG_INFINITY;
    for b in &kets {
        // G[(a,c),(a',c')] = Σ_{j,j'} b_j* P[(a,j,c),(a',j',c')] b_{j'}
        let mut g = [[C64::new(0.0, 0.0); 4]; 4];
        for a in 0..2 {
            for c in 0..2 {
                for ap in 0..2 {
                    for cp in 0..2 {
                        let mut acc = C64::new(0.0, 0.0);
                        for (j, bj) in b.iter().enumerate() {
                            for (jp, bjp) in b.iter().enumerate() {
                                acc += bj.conj()
                                    * projector.get(a * 4 + j * 2 + c, ap * 4 + jp * 2 + cp)
                                    * bjp;
                            }
                        }
                        g[a * 2 + c][ap * 2 + cp] = acc;
                    }
                }
            }
        }
        for c in &kets {
            let mut f00 = C64::new(0.0, 0.0);
            let mut f01 = C64::new(0.0, 0.0);
            let mut f11 = C64::new(0.0, 0.0);
            for (k, ck) in c.iter().enumerate() {
                for (kp, ckp) in c.iter().enumerate() {
                    let w = ck.conj() * ckp;
                    f00 += g[k][kp] * w;
                    f01 += g[k][2 + kp] * w;
                    f11 += g[2 + k][2 + kp] * w;
                }
            }
            let half_tr = 0.5 * (f00.re + f11.re);
            let half_diff = 0.5 * (f00.re - f11.re);
            let lam = half_tr + (half_diff * half_diff + f01.norm_sqr()).sqrt();
            best = best.max(lam);
        }
    }
    Ok(best)
}

// ─────────────────────────────────────────────────────────────────────────
// UPB verification and bound entanglement
// ─────────────────────────────────────────────────────────────────────────

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UpbReport {
    pub pairwise_orthogonal: bool,
    pub all_product: bool,
    pub proper_subspace: bool,
    pub complement_max_product_overlap: f64,
    pub complement_entangled: bool,
    pub is_upb: bool,
    pub seed: u64,
}

/// Check (i) pairwise orthogonality, (ii) full product structure across all
/// single-qubit cuts, (iii) k < D, (iv) the orthogonal complement contains
/// no product vector (see-saw witness).
pub fn verify_upb(kets: &[ComplexMatrix], cfg: &SeesawConfig) -> Result<UpbReport> {
    if kets.is_empty() {
        return Err(Error::Contract("empty candidate UPB".into()));
    }
    for k in kets {
        if !k.is_ket() || k.rows() != 8 {
            return Err(Error::DimMismatch("UPB vectors must be 8-dimensional kets".into()));
        }
    }
    let mut pairwise_orthogonal = true;
    for i in 0..kets.len() {
        for j in 0..kets.len() {
            let g = kets[i].inner(&kets[j])?;
            let want = if i == j { 1.0 } else { 0.0 };
            if (g - C64::new(want, 0.0)).norm() > 1e-12 {
                pairwise_orthogonal = false;
            }
        }
    }
    let mut all_product = true;
    for k in kets {
        for qubit in 0..3 {
            let m = reshape_single_qubit_cut(k, qubit)?;
            if second_singular_value(&m)? > 1e-10 {
                all_product = false;
            }
        }
    }
    let proper_subspace = kets.len() < 8;
    let mut complement = ComplexMatrix::identity(8);
    for k in kets {
        complement = complement.sub(&k.outer()?)?;
    }
    let search = if pairwise_orthogonal {
        max_product_overlap(&complement, cfg)?.best_overlap
    } else {
        // complement of a non-orthogonal family is not a projector; the
        // candidate already failed, skip the search
        f64::NAN
    };
    let complement_entangled =
        pairwise_orthogonal && search < 1.0 - UNEXTENDIBILITY_GAP;
    Ok(UpbReport {
        pairwise_orthogonal,
        all_product,
        proper_subspace,
        complement_max_product_overlap: search,
        complement_entangled,
        is_upb: pairwise_orthogonal && all_product && proper_subspace && complement_entangled,
        seed: cfg.seed,
    })
}

/// Minimal eigenvalue of the partial transpose on each single-party cut.
pub fn ppt_check(rho: &ComplexMatrix, layout: &DimLayout) -> Result<Vec<(String, f64)>> {
    if !rho.is_square() || rho.rows() != layout.total_dim() {
        return Err(Error::DimMismatch("state does not match layout".into()));
    }
    if !crate::linalg::is_psd(rho, 1e-9)? {
        return Err(Error::Contract("ppt_check input is not a state (not PSD)".into()));
    }
    if (rho.trace()?.re - 1.0).abs() > 1e-9 {
        return Err(Error::Contract("ppt_check input does not have unit trace".into()));
    }
    let mut out = Vec::new();
    for label in layout.labels() {
        let pt = partial_transpose(rho, layout, &[label])?;
        let eig = hermitian_eig(&pt)?;
        out.push((label.to_string(), *eig.values.last().expect("nonempty")));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntanglementVerdict {
    /// PPT on every cut and the range contains no product vector.
    BoundEntangled,
    /// Some partial transpose has a negative eigenvalue.
    Npt,
    /// PPT but the range contains a product vector; the range criterion is
    /// silent (e.g. separable states).
    SeparableRange,
}

impl std::fmt::Display for EntanglementVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::BoundEntangled => write!(f, "bound entangled"),
            Self::Npt => write!(f, "NPT"),
            Self::SeparableRange => write!(f, "separable-range"),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundEntanglementReport {
    pub ppt_min_eigenvalues: Vec<(String, f64)>,
    pub ppt_all_cuts: bool,
    pub range_max_product_overlap: f64,
    pub range_entangled: bool,
    pub verdict: EntanglementVerdict,
    pub seed: u64,
}

/// PPT across all cuts combined with the range criterion: a PPT state
/// supported on a completely entangled subspace is (bound) entangled.
pub fn bound_entanglement_report(
    rho: &ComplexMatrix,
    layout: &DimLayout,
    cfg: &SeesawConfig,
) -> Result<BoundEntanglementReport> {
    let ppt = ppt_check(rho, layout)?;
    let ppt_all_cuts = ppt.iter().all(|(_, min)| *min >= -1e-12);
    let range = support_projector(rho, 1e-10)?;
    let search = max_product_overlap(&range, cfg)?;
    let range_entangled = search.best_overlap < 1.0 - UNEXTENDIBILITY_GAP;
    let verdict = if !ppt_all_cuts {
        EntanglementVerdict::Npt
    } else if range_entangled {
        EntanglementVerdict::BoundEntangled
    } else {
        EntanglementVerdict::SeparableRange
    };
    Ok(BoundEntanglementReport {
        ppt_min_eigenvalues: ppt,
        ppt_all_cuts,
        range_max_product_overlap: search.best_overlap,
        range_entangled,
        verdict,
        seed: cfg.seed,
    })
}

/// CSV of per-restart overlaps, one row per restart.
pub fn per_restart_csv(result: &ProductSearchResult) -> String {
    let mut s = String::from("restart,overlap\n");
    for (i, v) in result.per_restart.iter().enumerate() {
        s.push_str(&format!("{i},{v:.16e}\n"));
    }
    s
}
