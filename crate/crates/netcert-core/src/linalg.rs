//! Self-contained dense complex linear algebra.
//!
//! Everything in this toolkit lives in dimension ≤ 64 (a handful of qubits
//! plus small junk factors), so the implementations favour robustness and
//! zero numeric dependencies over speed: row-major dense storage, cyclic
//! complex Jacobi for Hermitian eigenproblems.
//!
//! Conventions: subsystem 0 is the slowest-varying tensor index (big-endian,
//! |abc⟩ has a as the most significant bit); kets are matrices with one
//! column.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance for algebraic identities (orthonormality, completeness, exact
/// probability values).
pub const TOL_ALGEBRAIC: f64 = 1e-10;
/// Tolerance for results of iterative procedures (eigensolver-derived
/// quantities, see-saw optima).
pub const TOL_ITERATIVE: f64 = 1e-8;
/// Hermiticity requirement on eigensolver inputs (Frobenius distance to the
/// adjoint).
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Eigenvalues within this of each other are treated as degenerate;
/// downstream code must use spectral projectors, not individual
/// eigenvectors, inside such clusters.
pub const DEGENERACY_TOL: f64 = 1e-8;

// ─────────────────────────────────────────────────────────────────────────
// ComplexMatrix
// ─────────────────────────────────────────────────────────────────────────

/// Dense complex matrix in row-major order. Also serves as a ket (single
/// column) and as a density operator.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl std::fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows.min(12) {
            write!(f, "  ")?;
            for c in 0..self.cols.min(12) {
                let z = self.get(r, c);
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    /// Square matrix from row-major real entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimMismatch(format!(
                "expected {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(Self {
            rows,
            cols,
            data: entries.iter().map(|&x| C64::new(x, 0.0)).collect(),
        })
    }

    pub fn from_complex(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimMismatch(format!(
                "expected {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(Self { rows, cols, data: entries })
    }

    /// Column vector (ket) from amplitudes.
    pub fn ket(amplitudes: &[C64]) -> Self {
        Self { rows: amplitudes.len(), cols: 1, data: amplitudes.to_vec() }
    }

    pub fn ket_real(amplitudes: &[f64]) -> Self {
        Self {
            rows: amplitudes.len(),
            cols: 1,
            data: amplitudes.iter().map(|&x| C64::new(x, 0.0)).collect(),
        }
    }

    /// Computational basis ket |i⟩ in dimension `dim`.
    pub fn basis_ket(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::IndexRange(format!("basis index {index} in dimension {dim}")));
        }
        let mut v = Self::zeros(dim, 1);
        v.set(index, 0, C64::new(1.0, 0.0));
        Ok(v)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_ket(&self) -> bool {
        self.cols == 1
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dims(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dims(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimMismatch(format!(
                "matmul {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..other.cols {
                    let v = out.get(r, c) + a * other.get(k, c);
                    out.set(r, c, v);
                }
            }
        }
        Ok(out)
    }

    pub fn trace(&self) -> Result<C64> {
        if !self.is_square() {
            return Err(Error::DimMismatch(format!("trace of {}x{}", self.rows, self.cols)));
        }
        Ok((0..self.rows).map(|i| self.get(i, i)).sum())
    }

    /// Tr(self · other) without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<C64> {
        if self.cols != other.rows || self.rows != other.cols {
            return Err(Error::DimMismatch("trace_product dims".into()));
        }
        let mut acc = C64::new(0.0, 0.0);
        for r in 0..self.rows {
            for k in 0..self.cols {
                acc += self.get(r, k) * other.get(k, r);
            }
        }
        Ok(acc)
    }

    /// ⟨self|other⟩ for kets.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if !self.is_ket() || !other.is_ket() || self.rows != other.rows {
            return Err(Error::DimMismatch("inner product of non-matching kets".into()));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// |self⟩⟨self| for a ket.
    pub fn outer(&self) -> Result<Self> {
        if !self.is_ket() {
            return Err(Error::DimMismatch("outer of a non-ket".into()));
        }
        Ok(Self::from_fn(self.rows, self.rows, |r, c| {
            self.get(r, 0) * self.get(c, 0).conj()
        }))
    }

    /// ⟨self| m |self⟩ for a ket.
    pub fn expectation(&self, m: &Self) -> Result<C64> {
        let mv = m.matmul(self)?;
        self.inner(&mv)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.frobenius_norm();
        if n == 0.0 {
            return Err(Error::Contract("cannot normalize the zero vector".into()));
        }
        Ok(self.scale_re(1.0 / n))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && {
            let adj = self.adjoint();
            frobenius_distance(self, &adj).map(|d| d <= tol).unwrap_or(false)
        }
    }

    fn check_same_dims(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }
}

/// Kronecker product; dims multiply.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for ar in 0..a.rows() {
        for ac in 0..a.cols() {
            let av = a.get(ar, ac);
            if av == C64::new(0.0, 0.0) {
                continue;
            }
            for br in 0..b.rows() {
                for bc in 0..b.cols() {
                    out.set(ar * b.rows() + br, ac * b.cols() + bc, av * b.get(br, bc));
                }
            }
        }
    }
    out
}

/// Kronecker product of a list, left to right.
pub fn kron_all(ms: &[&ComplexMatrix]) -> ComplexMatrix {
    let mut it = ms.iter();
    let first = it.next().expect("kron_all of empty list");
    let mut acc = (*first).clone();
    for m in it {
        acc = kron(&acc, m);
    }
    acc
}

/// ‖a − b‖_F.
pub fn frobenius_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::DimMismatch(format!(
            "frobenius_distance {}x{} vs {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(a.data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

// ─────────────────────────────────────────────────────────────────────────
// DimLayout and subsystem operations
// ─────────────────────────────────────────────────────────────────────────

/// Ordered list of labelled subsystems with local dimensions; pairs with a
/// square matrix whose dimension is the product of the local dimensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimLayout {
    parts: Vec<(String, usize)>,
}

impl DimLayout {
    pub fn new(parts: &[(&str, usize)]) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for (label, dim) in parts {
            if !seen.insert(label.to_string()) {
                return Err(Error::Layout(format!("duplicate label {label}")));
            }
            if *dim == 0 {
                return Err(Error::Layout(format!("zero dimension for {label}")));
            }
        }
        Ok(Self {
            parts: parts.iter().map(|(l, d)| (l.to_string(), *d)).collect(),
        })
    }

    pub fn total_dim(&self) -> usize {
        self.parts.iter().map(|(_, d)| d).product()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.parts.iter().map(|(_, d)| *d).collect()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.parts.iter().map(|(l, _)| l.as_str()).collect()
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.parts
            .iter()
            .position(|(l, _)| l == label)
            .ok_or_else(|| Error::Layout(format!("label {label} not in layout")))
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.parts[self.position(label)?].1)
    }

    fn check_matches(&self, m: &ComplexMatrix) -> Result<()> {
        if !m.is_square() {
            return Err(Error::DimMismatch(format!(
                "subsystem operation on non-square {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        if m.rows() != self.total_dim() {
            return Err(Error::Layout(format!(
                "layout dimension {} does not match matrix dimension {}",
                self.total_dim(),
                m.rows()
            )));
        }
        Ok(())
    }
}

/// Decompose a flat index into per-subsystem indices (big-endian).
fn multi_index(mut flat: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for i in (0..dims.len()).rev() {
        out[i] = flat % dims[i];
        flat /= dims[i];
    }
    out
}

fn flat_index(multi: &[usize], dims: &[usize]) -> usize {
    let mut flat = 0;
    for (i, &d) in dims.iter().enumerate() {
        flat = flat * d + multi[i];
    }
    flat
}

/// Trace out the complement of `keep`; the result lives on the kept factors
/// in their layout order.
pub fn partial_trace(
    m: &ComplexMatrix,
    layout: &DimLayout,
    keep: &[&str],
) -> Result<ComplexMatrix> {
    layout.check_matches(m)?;
    let keep_pos: Vec<usize> = keep
        .iter()
        .map(|l| layout.position(l))
        .collect::<Result<_>>()?;
    let dims = layout.dims();
    let traced_pos: Vec<usize> = (0..dims.len()).filter(|p| !keep_pos.contains(p)).collect();
    let keep_dims: Vec<usize> = keep_pos.iter().map(|&p| dims[p]).collect();
    let traced_dims: Vec<usize> = traced_pos.iter().map(|&p| dims[p]).collect();
    let kd: usize = keep_dims.iter().product();
    let td: usize = traced_dims.iter().product();

    let mut out = ComplexMatrix::zeros(kd, kd);
    let mut full_r = vec![0usize; dims.len()];
    let mut full_c = vec![0usize; dims.len()];
    for kr in 0..kd {
        let kri = multi_index(kr, &keep_dims);
        for kc in 0..kd {
            let kci = multi_index(kc, &keep_dims);
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..td {
                let ti = multi_index(t, &traced_dims);
                for (j, &p) in keep_pos.iter().enumerate() {
                    full_r[p] = kri[j];
                    full_c[p] = kci[j];
                }
                for (j, &p) in traced_pos.iter().enumerate() {
                    full_r[p] = ti[j];
                    full_c[p] = ti[j];
                }
                acc += m.get(flat_index(&full_r, &dims), flat_index(&full_c, &dims));
            }
            out.set(kr, kc, acc);
        }
    }
    Ok(out)
}

/// Transpose the named factors only; involutive and trace-preserving.
pub fn partial_transpose(
    m: &ComplexMatrix,
    layout: &DimLayout,
    transpose_on: &[&str],
) -> Result<ComplexMatrix> {
    layout.check_matches(m)?;
    let tpos: Vec<usize> = transpose_on
        .iter()
        .map(|l| layout.position(l))
        .collect::<Result<_>>()?;
    let dims = layout.dims();
    let n = layout.total_dim();
    let mut out = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        let mut ri = multi_index(r, &dims);
        for c in 0..n {
            let mut ci = multi_index(c, &dims);
            for &p in &tpos {
                std::mem::swap(&mut ri[p], &mut ci[p]);
            }
            out.set(flat_index(&ri, &dims), flat_index(&ci, &dims), m.get(r, c));
            for &p in &tpos {
                std::mem::swap(&mut ri[p], &mut ci[p]);
            }
        }
    }
    Ok(out)
}

/// Reorder tensor factors to `new_order` (a permutation of the layout's
/// labels). Works on square operators and on kets.
pub fn permute_subsystems(
    m: &ComplexMatrix,
    layout: &DimLayout,
    new_order: &[&str],
) -> Result<(ComplexMatrix, DimLayout)> {
    if new_order.len() != layout.len() {
        return Err(Error::Layout(format!(
            "permutation names {} factors, layout has {}",
            new_order.len(),
            layout.len()
        )));
    }
    // target position -> source position
    let src_pos: Vec<usize> = new_order
        .iter()
        .map(|l| layout.position(l))
        .collect::<Result<_>>()?;
    {
        let mut sorted = src_pos.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != layout.len() {
            return Err(Error::Layout("new_order is not a permutation".into()));
        }
    }
    let dims = layout.dims();
    let new_dims: Vec<usize> = src_pos.iter().map(|&p| dims[p]).collect();
    let new_layout = DimLayout {
        parts: src_pos
            .iter()
            .map(|&p| layout.parts[p].clone())
            .collect(),
    };
    let n = layout.total_dim();
    let is_ket = m.cols() == 1;
    if m.rows() != n || (!is_ket && m.cols() != n) {
        return Err(Error::Layout(format!(
            "matrix {}x{} does not match layout dimension {}",
            m.rows(),
            m.cols(),
            n
        )));
    }
    let map = |flat: usize| {
        let mi = multi_index(flat, &dims);
        let new_mi: Vec<usize> = src_pos.iter().map(|&p| mi[p]).collect();
        flat_index(&new_mi, &new_dims)
    };
    let mut out = ComplexMatrix::zeros(m.rows(), m.cols());
    if is_ket {
        for r in 0..n {
            out.set(map(r), 0, m.get(r, 0));
        }
    } else {
        for r in 0..n {
            let nr = map(r);
            for c in 0..n {
                out.set(nr, map(c), m.get(r, c));
            }
        }
    }
    Ok((out, new_layout))
}

// ─────────────────────────────────────────────────────────────────────────
// Hermitian eigenproblem (cyclic complex Jacobi)
// ─────────────────────────────────────────────────────────────────────────

/// Result of a Hermitian eigendecomposition: real eigenvalues sorted
/// descending, matching eigenvector columns, V unitary.
#[derive(Clone, Debug)]
pub struct Eigendecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigendecomposition {
    /// Column `i` as a ket.
    pub fn vector(&self, i: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.vectors.rows(), 1, |r, _| self.vectors.get(r, i))
    }

    /// Spectral projector onto the eigenvalue cluster containing index `i`
    /// (all eigenvalues within [DEGENERACY_TOL] of values[i]).
    pub fn cluster_projector(&self, i: usize) -> ComplexMatrix {
        let n = self.vectors.rows();
        let mut proj = ComplexMatrix::zeros(n, n);
        for j in 0..self.values.len() {
            if (self.values[j] - self.values[i]).abs() <= DEGENERACY_TOL {
                let v = self.vector(j);
                proj = proj.add(&v.outer().expect("ket")).expect("dims");
            }
        }
        proj
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Input must be Hermitian within [HERMITICITY_TOL].
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<Eigendecomposition> {
    if !m.is_square() {
        return Err(Error::DimMismatch(format!(
            "eigendecomposition of {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_hermitian(HERMITICITY_TOL) {
        let d = frobenius_distance(m, &m.adjoint())?;
        return Err(Error::Contract(format!(
            "hermitian_eig input is not Hermitian (‖m − m†‖_F = {d:.3e})"
        )));
    }
    let n = m.rows();
    // symmetrize to scrub the allowed 1e-10 of non-Hermiticity
    let mut h = m.add(&m.adjoint())?.scale_re(0.5);
    let mut v = ComplexMatrix::identity(n);
    let norm = h.frobenius_norm().max(f64::MIN_POSITIVE);
    let target = 1e-14 * norm;

    let mut converged = false;
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for r in 0..n {
            for c in 0..n {
                if r != c {
                    off += h.get(r, c).norm_sqr();
                }
            }
        }
        if off.sqrt() <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let g = h.get(p, q);
                let gn = g.norm();
                if gn <= 1e-300 {
                    continue;
                }
                let phase = g / gn;
                let alpha = h.get(p, p).re;
                let beta = h.get(q, q).re;
                // zero the (p,q) entry of the 2x2 block [[alpha, g],[g*, beta]];
                // the small root of t² − 2τt − 1 = 0 keeps |θ| ≤ π/4
                let tau = (beta - alpha) / (2.0 * gn);
                let t = if tau.abs() > 1e150 {
                    -1.0 / (2.0 * tau)
                } else {
                    -tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // U restricted to (p,q): U_pp = c, U_qp = s·phase*, U_pq = −s·phase, U_qq = c
                let upp = C64::new(c, 0.0);
                let uqp = phase.conj() * s;
                let upq = -phase * s;
                let uqq = C64::new(c, 0.0);
                // columns: H ← H·U
                for r in 0..n {
                    let hp = h.get(r, p);
                    let hq = h.get(r, q);
                    h.set(r, p, hp * upp + hq * uqp);
                    h.set(r, q, hp * upq + hq * uqq);
                }
                // rows: H ← U†·H
                for cidx in 0..n {
                    let hp = h.get(p, cidx);
                    let hq = h.get(q, cidx);
                    h.set(p, cidx, upp.conj() * hp + uqp.conj() * hq);
                    h.set(q, cidx, upq.conj() * hp + uqq.conj() * hq);
                }
                // accumulate V ← V·U
                for r in 0..n {
                    let vp = v.get(r, p);
                    let vq = v.get(r, q);
                    v.set(r, p, vp * upp + vq * uqp);
                    v.set(r, q, vp * upq + vq * uqq);
                }
            }
        }
    }
    if !converged {
        // one final check: the last sweep may have reached the target
        let mut off = 0.0;
        for r in 0..n {
            for c in 0..n {
                if r != c {
                    off += h.get(r, c).norm_sqr();
                }
            }
        }
        if off.sqrt() > target {
            return Err(Error::NoConvergence { sweeps: JACOBI_MAX_SWEEPS });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| h.get(i, i).re).collect();
    order.sort_by(|&a, &b| diag[b].partial_cmp(&diag[a]).expect("finite eigenvalues"));
    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v.get(r, order[c]));
    Ok(Eigendecomposition { values, vectors })
}

/// True iff the Hermitian matrix has min eigenvalue ≥ −tol.
pub fn is_psd(m: &ComplexMatrix, tol: f64) -> Result<bool> {
    let eig = hermitian_eig(m)?;
    Ok(eig.values.last().map(|&v| v >= -tol).unwrap_or(true))
}

/// Projector onto the span of eigenvectors with eigenvalue > threshold.
pub fn support_projector(m: &ComplexMatrix, threshold: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m)?;
    let n = m.rows();
    let mut proj = ComplexMatrix::zeros(n, n);
    for (i, &val) in eig.values.iter().enumerate() {
        if val > threshold {
            proj = proj.add(&eig.vector(i).outer()?)?;
        }
    }
    Ok(proj)
}

/// Support-identity check: given 0 ≤ m ≤ 1 and a state rho with
/// Tr(m·rho) = 1, m must act as the identity on the support of rho.
/// Returns true iff ‖(m − 1)·Π‖_F ≤ tol for the support projector Π.
pub fn identity_on_support(m: &ComplexMatrix, rho: &ComplexMatrix, tol: f64) -> Result<bool> {
    if m.rows() != rho.rows() || !m.is_square() || !rho.is_square() {
        return Err(Error::DimMismatch("identity_on_support dims".into()));
    }
    let proj = support_projector(rho, tol)?;
    let diff = m.matmul(&proj)?.sub(&proj)?;
    Ok(diff.frobenius_norm() <= tol.max(1e-9) * (m.rows() as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qops::{pauli_x, pauli_y, pauli_z};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn kron_identities() {
        let i2 = ComplexMatrix::identity(2);
        let i4 = kron(&i2, &i2);
        assert_eq!(i4, ComplexMatrix::identity(4));

        let zz = kron(&pauli_z(), &pauli_z());
        for (i, want) in [1.0, -1.0, -1.0, 1.0].iter().enumerate() {
            assert_eq!(zz.get(i, i), c(*want, 0.0));
        }
    }

    #[test]
    fn kron_xx_fixes_phi_plus() {
        // 4x4 hand multiplication oracle: (X⊗X)(|00⟩+|11⟩)/√2 = same vector
        let s = 1.0 / 2f64.sqrt();
        let phi = ComplexMatrix::ket_real(&[s, 0.0, 0.0, s]);
        let xx = kron(&pauli_x(), &pauli_x());
        let out = xx.matmul(&phi).unwrap();
        assert!(frobenius_distance(&out, &phi).unwrap() < 1e-15);
    }

    #[test]
    fn kron_associativity_exact() {
        let a = ComplexMatrix::from_fn(2, 2, |r, c_| c(r as f64 + 0.5, c_ as f64 - 1.0));
        let b = ComplexMatrix::from_fn(3, 2, |r, c_| c(r as f64 * 2.0, -(c_ as f64)));
        let d = ComplexMatrix::from_fn(2, 3, |r, c_| c(1.0 - r as f64, c_ as f64 * 0.25));
        let left = kron(&kron(&a, &b), &d);
        let right = kron(&a, &kron(&b, &d));
        assert_eq!(left, right); // entrywise exact
    }

    #[test]
    fn partial_trace_product_state() {
        let rho = ComplexMatrix::from_fn(2, 2, |r, c_| {
            [[c(0.7, 0.0), c(0.1, 0.2)], [c(0.1, -0.2), c(0.3, 0.0)]][r][c_]
        });
        let sigma = ComplexMatrix::from_fn(3, 3, |r, c_| if r == c_ { c(1.0 / 3.0, 0.0) } else { c(0.01, 0.0) });
        let joint = kron(&rho, &sigma);
        let layout = DimLayout::new(&[("P", 2), ("Q", 3)]).unwrap();
        let red = partial_trace(&joint, &layout, &["P"]).unwrap();
        let expect = rho.scale(sigma.trace().unwrap());
        assert!(frobenius_distance(&red, &expect).unwrap() < 1e-13);
        // trace preserved
        let t_red = partial_trace(&joint, &layout, &["Q"]).unwrap();
        assert!((t_red.trace().unwrap() - joint.trace().unwrap()).norm() < 1e-13);
    }

    #[test]
    fn partial_trace_bell_pair_is_maximally_mixed() {
        let s = 1.0 / 2f64.sqrt();
        let phi = ComplexMatrix::ket_real(&[s, 0.0, 0.0, s]);
        let rho = phi.outer().unwrap();
        let layout = DimLayout::new(&[("A", 2), ("B", 2)]).unwrap();
        for keep in [["A"], ["B"]] {
            let red = partial_trace(&rho, &layout, &keep).unwrap();
            let half = ComplexMatrix::identity(2).scale_re(0.5);
            assert!(frobenius_distance(&red, &half).unwrap() < 1e-14);
        }
    }

    #[test]
    fn partial_trace_unknown_label_errors() {
        let layout = DimLayout::new(&[("A", 2), ("B", 2)]).unwrap();
        let m = ComplexMatrix::identity(4);
        assert!(matches!(
            partial_trace(&m, &layout, &["Z"]),
            Err(Error::Layout(_))
        ));
    }

    #[test]
    fn partial_transpose_involution_and_identity() {
        let layout = DimLayout::new(&[("A", 2), ("B", 2)]).unwrap();
        let m = ComplexMatrix::from_fn(4, 4, |r, c_| c(r as f64 * 0.3, c_ as f64 - 1.5));
        let once = partial_transpose(&m, &layout, &["B"]).unwrap();
        let twice = partial_transpose(&once, &layout, &["B"]).unwrap();
        assert_eq!(twice, m);
        assert!((once.trace().unwrap() - m.trace().unwrap()).norm() < 1e-14);

        let idm = ComplexMatrix::identity(4).scale_re(0.25);
        let pt = partial_transpose(&idm, &layout, &["A"]).unwrap();
        assert!(frobenius_distance(&pt, &idm).unwrap() < 1e-15);
    }

    #[test]
    fn partial_transpose_bell_min_eigenvalue() {
        // 4x4 eigen oracle: PT of |φ+⟩⟨φ+| on one qubit has min eigenvalue −1/2
        let s = 1.0 / 2f64.sqrt();
        let rho = ComplexMatrix::ket_real(&[s, 0.0, 0.0, s]).outer().unwrap();
        let layout = DimLayout::new(&[("A", 2), ("B", 2)]).unwrap();
        let pt = partial_transpose(&rho, &layout, &["B"]).unwrap();
        let eig = hermitian_eig(&pt).unwrap();
        assert!((eig.values.last().unwrap() + 0.5).abs() < 1e-12);
    }

    #[test]
    fn eig_diagonal_case() {
        let eig = hermitian_eig(&pauli_z()).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-14);
        assert!((eig.values[1] + 1.0).abs() < 1e-14);
        // eigenvectors |0⟩, |1⟩ up to phase
        assert!((eig.vector(0).get(0, 0).norm() - 1.0).abs() < 1e-12);
        assert!((eig.vector(1).get(1, 0).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_hadamard_like() {
        let h = pauli_x().add(&pauli_z()).unwrap().scale_re(1.0 / 2f64.sqrt());
        let eig = hermitian_eig(&h).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-12);
        assert!((eig.values[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_reconstruction_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for &n in &[2usize, 3, 8, 17, 64] {
            let mut m = ComplexMatrix::zeros(n, n);
            for r in 0..n {
                for c_ in r..n {
                    let z = c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                    if r == c_ {
                        m.set(r, c_, c(z.re, 0.0));
                    } else {
                        m.set(r, c_, z);
                        m.set(c_, r, z.conj());
                    }
                }
            }
            let eig = hermitian_eig(&m).unwrap();
            // V unitary
            let vhv = eig.vectors.adjoint().matmul(&eig.vectors).unwrap();
            assert!(
                frobenius_distance(&vhv, &ComplexMatrix::identity(n)).unwrap() < 1e-9,
                "V not unitary at n={n}"
            );
            // V Λ V† reconstructs m
            let mut lam = ComplexMatrix::zeros(n, n);
            for i in 0..n {
                lam.set(i, i, c(eig.values[i], 0.0));
            }
            let rec = eig.vectors.matmul(&lam).unwrap().matmul(&eig.vectors.adjoint()).unwrap();
            let rel = frobenius_distance(&rec, &m).unwrap() / m.frobenius_norm();
            assert!(rel < 1e-9, "reconstruction {rel:.2e} at n={n}");
            // descending order
            for w in eig.values.windows(2) {
                assert!(w[0] >= w[1] - 1e-12);
            }
        }
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_fn(2, 2, |r, c_| c((r + 2 * c_) as f64, 1.0));
        assert!(matches!(hermitian_eig(&m), Err(Error::Contract(_))));
    }

    #[test]
    fn frobenius_distance_cases() {
        let z = pauli_z();
        assert_eq!(frobenius_distance(&z, &z).unwrap(), 0.0);
        // entrywise sum oracle: ‖Z − X‖_F = √(1+1+1+1) = 2
        assert!((frobenius_distance(&z, &pauli_x()).unwrap() - 2.0).abs() < 1e-15);
        let zero = ComplexMatrix::zeros(2, 2);
        assert!(
            (frobenius_distance(&ComplexMatrix::identity(2), &zero).unwrap() - 2f64.sqrt()).abs()
                < 1e-15
        );
        assert!(frobenius_distance(&z, &ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn psd_checks() {
        assert!(is_psd(&ComplexMatrix::identity(2), 1e-12).unwrap());
        assert!(!is_psd(&ComplexMatrix::identity(2).scale_re(-1.0), 1e-12).unwrap());
        let proj = ComplexMatrix::ket_real(&[1.0, 0.0]).outer().unwrap();
        assert!(is_psd(&proj, 1e-12).unwrap());
        let shifted = proj.sub(&ComplexMatrix::identity(2).scale_re(2.0)).unwrap();
        assert!(!is_psd(&shifted, 1e-12).unwrap());
        assert!(matches!(is_psd(&pauli_y().scale(c(0.0, 1.0)), 1e-12), Err(Error::Contract(_))));
    }

    #[test]
    fn permute_subsystems_roundtrip() {
        let layout = DimLayout::new(&[("A", 2), ("B", 3), ("C", 2)]).unwrap();
        let m = ComplexMatrix::from_fn(12, 12, |r, c_| c(r as f64, c_ as f64 * 0.1));
        let (p, pl) = permute_subsystems(&m, &layout, &["C", "A", "B"]).unwrap();
        assert_eq!(pl.labels(), vec!["C", "A", "B"]);
        let (back, _) = permute_subsystems(&p, &pl, &["A", "B", "C"]).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn permute_matches_kron_reorder() {
        let a = ComplexMatrix::from_fn(2, 2, |r, c_| c(r as f64 + 1.0, c_ as f64));
        let b = ComplexMatrix::from_fn(3, 3, |r, c_| c(r as f64 - c_ as f64, 0.5));
        let ab = kron(&a, &b);
        let layout = DimLayout::new(&[("A", 2), ("B", 3)]).unwrap();
        let (ba, _) = permute_subsystems(&ab, &layout, &["B", "A"]).unwrap();
        assert!(frobenius_distance(&ba, &kron(&b, &a)).unwrap() < 1e-14);
    }

    #[test]
    fn support_identity_lemma() {
        // rho = projector/2 onto a 2-dim support inside dim 4; m = identity on
        // that support plus anything on the complement that keeps m ≤ 1.
        let v0 = ComplexMatrix::ket_real(&[1.0, 0.0, 0.0, 0.0]);
        let v1 = ComplexMatrix::ket_real(&[0.0, 1.0, 0.0, 0.0]);
        let rho = v0.outer().unwrap().add(&v1.outer().unwrap()).unwrap().scale_re(0.5);
        let mut m = v0.outer().unwrap().add(&v1.outer().unwrap()).unwrap();
        assert!(identity_on_support(&m, &rho, 1e-10).unwrap());
        m.set(3, 3, c(0.25, 0.0)); // junk outside the support is irrelevant
        assert!(identity_on_support(&m, &rho, 1e-10).unwrap());
        m.set(0, 0, c(0.9, 0.0)); // now Tr(m rho) < 1 and m is not identity on support
        assert!(!identity_on_support(&m, &rho, 1e-10).unwrap());
    }
}
