//! Seeded random quantum objects. All randomness in the toolkit flows from
//! a single 64-bit seed; independent streams are derived with a splitmix
//! step so results do not depend on evaluation order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{ComplexMatrix, C64};

/// Derive an independent substream seed.
pub fn substream(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(substream(seed, index))
}

fn standard_normal(rng: &mut impl Rng) -> f64 {
    // Box-Muller; good enough statistical quality for restart seeds and
    // Haar sampling at these dimensions
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn complex_normal(rng: &mut impl Rng) -> C64 {
    C64::new(standard_normal(rng), standard_normal(rng))
}

/// Unit ket with Haar-uniform direction.
pub fn random_ket(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
    loop {
        let amps: Vec<C64> = (0..dim).map(|_| complex_normal(rng)).collect();
        let ket = ComplexMatrix::ket(&amps);
        if ket.frobenius_norm() > 1e-6 {
            return ket.normalized().expect("nonzero");
        }
    }
}

/// Haar-distributed unitary via Gram-Schmidt on a Ginibre matrix with the
/// R-diagonal phase fix.
pub fn haar_unitary(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
    loop {
        let g = ComplexMatrix::from_fn(dim, dim, |_, _| complex_normal(rng));
        if let Some(u) = gram_schmidt(&g) {
            return u;
        }
    }
}

fn gram_schmidt(g: &ComplexMatrix) -> Option<ComplexMatrix> {
    let n = g.rows();
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    for c in 0..n {
        let mut v: Vec<C64> = (0..n).map(|r| g.get(r, c)).collect();
        let mut pivot = C64::new(0.0, 0.0);
        for q in &cols {
            let overlap: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= overlap * qi;
            }
        }
        // phase fix: rotate so the projection of the original column onto
        // the new direction is real positive (diag(R) > 0)
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            return None;
        }
        for vi in v.iter_mut() {
            *vi /= norm;
        }
        for (r, vi) in v.iter().enumerate() {
            pivot += vi.conj() * g.get(r, c);
        }
        let pn = pivot.norm();
        if pn < 1e-12 {
            return None;
        }
        let phase = pivot / pn;
        for vi in v.iter_mut() {
            *vi *= phase;
        }
        cols.push(v);
    }
    Some(ComplexMatrix::from_fn(n, n, |r, c| cols[c][r]))
}
