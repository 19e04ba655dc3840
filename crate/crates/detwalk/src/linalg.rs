//! Dense complex linear algebra for small walk operators.
//!
//! Everything here is sized for the reduced spaces (dimension <= 10) and for
//! moderate full-space checks, so the implementations favour clarity and
//! deterministic behaviour over asymptotic speed.

use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

/// Default numeric tolerances. Callers can override per call where a function
/// takes an explicit tolerance.
pub mod tol {
    /// Max-norm deviation of `U† U` from the identity for a fresh operator.
    pub const UNITARY: f64 = 1e-12;
    /// Unitarity drift allowed after repeated squaring.
    pub const POWER_UNITARY: f64 = 1e-11;
    /// Max-norm of `U v - e^{i phi} v` per eigenpair.
    pub const EIG_RESIDUAL: f64 = 1e-9;
    /// Max-norm reconstruction error of the spectral sum.
    pub const EIG_RECONSTRUCT: f64 = 1e-8;
    /// Norm deviation tolerated when a unit vector is required.
    pub const VECTOR_NORM: f64 = 1e-12;
}

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("vector norm {norm} is not 1 within {tol}")]
    NotNormalized { norm: f64, tol: f64 },
    #[error("operator deviates from unitarity by {deviation}")]
    NotUnitary { deviation: f64 },
    #[error("eigensolver failed: {0}")]
    EigFailed(String),
    #[error("empty dimension")]
    EmptyDim,
}

/// Complex column vector of unit or arbitrary norm.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    data: Vec<C64>,
}

impl StateVector {
    pub fn from_components(data: Vec<C64>) -> Self {
        StateVector { data }
    }

    pub fn from_reals(reals: &[f64]) -> Self {
        StateVector {
            data: reals.iter().map(|&x| C64::new(x, 0.0)).collect(),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        StateVector {
            data: vec![C64::new(0.0, 0.0); dim],
        }
    }

    pub fn basis_state(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range {dim}");
        let mut v = Self::zeros(dim);
        v.data[index] = C64::new(1.0, 0.0);
        v
    }

    pub fn uniform(dim: usize) -> Self {
        let amp = 1.0 / (dim as f64).sqrt();
        StateVector {
            data: vec![C64::new(amp, 0.0); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn component(&self, i: usize) -> C64 {
        self.data[i]
    }

    pub fn set(&mut self, i: usize, value: C64) {
        self.data[i] = value;
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<C64, LinalgError> {
        if self.dim() != other.dim() {
            return Err(LinalgError::DimMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn scaled(&self, factor: C64) -> StateVector {
        StateVector {
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    /// `self += factor * other`, dimensions must already agree.
    pub fn add_scaled(&mut self, factor: C64, other: &StateVector) {
        assert_eq!(self.dim(), other.dim());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += factor * b;
        }
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn check_normalized(&self, tol: f64) -> Result<(), LinalgError> {
        let norm = self.norm();
        if (norm - 1.0).abs() > tol {
            return Err(LinalgError::NotNormalized { norm, tol });
        }
        Ok(())
    }
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl SquareMatrix {
    pub fn zeros(dim: usize) -> Self {
        SquareMatrix {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[StateVector]) -> Result<Self, LinalgError> {
        let dim = cols.len();
        if dim == 0 {
            return Err(LinalgError::EmptyDim);
        }
        for c in cols {
            if c.dim() != dim {
                return Err(LinalgError::DimMismatch {
                    left: c.dim(),
                    right: dim,
                });
            }
        }
        Ok(Self::from_fn(dim, |i, j| cols[j].component(i)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.data[i * self.dim + j] = value;
    }

    pub fn mul(&self, other: &SquareMatrix) -> Result<SquareMatrix, LinalgError> {
        if self.dim != other.dim {
            return Err(LinalgError::DimMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let n = self.dim;
        let mut out = SquareMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.data[i * n + k];
                if aik == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += aik * other.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector, LinalgError> {
        if self.dim != v.dim() {
            return Err(LinalgError::DimMismatch {
                left: self.dim,
                right: v.dim(),
            });
        }
        let n = self.dim;
        let mut out = StateVector::zeros(n);
        for i in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..n {
                acc += self.data[i * n + j] * v.component(j);
            }
            out.set(i, acc);
        }
        Ok(out)
    }

    pub fn dagger(&self) -> SquareMatrix {
        let n = self.dim;
        Self::from_fn(n, |i, j| self.data[j * n + i].conj())
    }

    pub fn scaled(&self, factor: C64) -> SquareMatrix {
        SquareMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn add(&self, other: &SquareMatrix) -> Result<SquareMatrix, LinalgError> {
        if self.dim != other.dim {
            return Err(LinalgError::DimMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(SquareMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &SquareMatrix) -> Result<SquareMatrix, LinalgError> {
        self.add(&other.scaled(C64::new(-1.0, 0.0)))
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.at(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &SquareMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max-norm deviation of `U† U` from the identity.
    pub fn unitarity_error(&self) -> f64 {
        let gram = self.dagger().mul(self).expect("same dim");
        gram.max_abs_diff(&SquareMatrix::identity(self.dim))
    }

    /// `self^t` by repeated squaring.
    pub fn power(&self, mut t: u64) -> SquareMatrix {
        let mut result = SquareMatrix::identity(self.dim);
        let mut base = self.clone();
        while t > 0 {
            if t & 1 == 1 {
                result = result.mul(&base).expect("same dim");
            }
            t >>= 1;
            if t > 0 {
                base = base.mul(&base).expect("same dim");
            }
        }
        result
    }

    /// `I - (1 - e^{i phase}) |v><v|` for a unit vector `v`.
    pub fn reflection_about(v: &StateVector, phase: f64) -> Result<SquareMatrix, LinalgError> {
        v.check_normalized(tol::VECTOR_NORM)?;
        let coeff = C64::new(1.0, 0.0) - C64::from_polar(1.0, phase);
        let n = v.dim();
        let mut m = SquareMatrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                let outer = v.component(i) * v.component(j).conj();
                let cur = m.at(i, j);
                m.set(i, j, cur - coeff * outer);
            }
        }
        Ok(m)
    }

    /// Phase gate `diag(..., e^{i phase} at index, ...)`.
    pub fn phase_on_index(dim: usize, index: usize, phase: f64) -> SquareMatrix {
        let mut m = SquareMatrix::identity(dim);
        m.set(index, index, C64::from_polar(1.0, phase));
        m
    }

    /// Deterministic unitary whose first column is `v` (Gram-Schmidt
    /// completion against the standard basis).
    pub fn unitary_from_first_column(v: &StateVector) -> Result<SquareMatrix, LinalgError> {
        v.check_normalized(tol::VECTOR_NORM)?;
        let n = v.dim();
        let mut cols: Vec<StateVector> = vec![v.clone()];
        for k in 0..n {
            if cols.len() == n {
                break;
            }
            let mut cand = StateVector::basis_state(n, k);
            for c in &cols {
                let overlap = c.inner(&cand)?;
                cand.add_scaled(-overlap, c);
            }
            let norm = cand.norm();
            if norm > 1e-8 {
                cols.push(cand.scaled(C64::new(1.0 / norm, 0.0)));
            }
        }
        if cols.len() != n {
            return Err(LinalgError::EigFailed(
                "failed to complete orthonormal basis".into(),
            ));
        }
        let mut m = SquareMatrix::zeros(n);
        for (j, c) in cols.iter().enumerate() {
            for i in 0..n {
                m.set(i, j, c.component(i));
            }
        }
        Ok(m)
    }

    /// Eigendecomposition of a unitary matrix via the commuting Hermitian pair
    /// `(U + U†)/2` and `(U - U†)/(2i)`. Eigenpairs come back sorted by phase
    /// in `(-pi, pi]`.
    pub fn eig_unitary(&self) -> Result<UnitaryEigen, LinalgError> {
        if self.dim == 0 {
            return Err(LinalgError::EmptyDim);
        }
        let deviation = self.unitarity_error();
        if deviation > 1e-8 {
            return Err(LinalgError::NotUnitary { deviation });
        }
        let n = self.dim;
        let dag = self.dagger();
        let half = C64::new(0.5, 0.0);
        let h = self.add(&dag)?.scaled(half);
        let neg_half_i = C64::new(0.0, -0.5);
        let k = self.sub(&dag)?.scaled(neg_half_i);

        let (hvals, mut vecs) = hermitian_eigen(&h)?;
        // Within clusters of the cosine part, re-diagonalize the sine part to
        // resolve degeneracies.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| hvals[a].partial_cmp(&hvals[b]).unwrap());
        let cluster_tol = 1e-7;
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && (hvals[order[end]] - hvals[order[end - 1]]).abs() <= cluster_tol {
                end += 1;
            }
            if end - start > 1 {
                let members: Vec<usize> = order[start..end].to_vec();
                rediagonalize_cluster(&k, &mut vecs, &members)?;
            }
            start = end;
        }

        let mut pairs: Vec<(f64, StateVector)> = Vec::with_capacity(n);
        for v in vecs {
            let hv = h.apply(&v)?;
            let kv = k.apply(&v)?;
            let c = v.inner(&hv)?.re;
            let s = v.inner(&kv)?.re;
            let phase = s.atan2(c);
            let uv = self.apply(&v)?;
            let expected = v.scaled(C64::from_polar(1.0, phase));
            let residual = uv.max_abs_diff(&expected);
            if residual > tol::EIG_RESIDUAL {
                return Err(LinalgError::EigFailed(format!(
                    "eigenpair residual {residual} exceeds {}",
                    tol::EIG_RESIDUAL
                )));
            }
            pairs.push((phase, v));
        }
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let (phases, vectors): (Vec<f64>, Vec<StateVector>) = pairs.into_iter().unzip();
        Ok(UnitaryEigen { phases, vectors })
    }
}

/// Result of `eig_unitary`: phases in `(-pi, pi]` with matching eigenvectors.
#[derive(Debug, Clone)]
pub struct UnitaryEigen {
    pub phases: Vec<f64>,
    pub vectors: Vec<StateVector>,
}

impl UnitaryEigen {
    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    /// `sum_j e^{i phi_j} |v_j><v_j|`.
    pub fn reconstruct(&self) -> SquareMatrix {
        let n = self.vectors[0].dim();
        let mut m = SquareMatrix::zeros(n);
        for (phi, v) in self.phases.iter().zip(&self.vectors) {
            let factor = C64::from_polar(1.0, *phi);
            for i in 0..n {
                for j in 0..n {
                    let cur = m.at(i, j);
                    m.set(i, j, cur + factor * v.component(i) * v.component(j).conj());
                }
            }
        }
        m
    }
}

fn rediagonalize_cluster(
    k: &SquareMatrix,
    vecs: &mut [StateVector],
    members: &[usize],
) -> Result<(), LinalgError> {
    let c = members.len();
    let mut sub = SquareMatrix::zeros(c);
    for (a, &ia) in members.iter().enumerate() {
        let kv = k.apply(&vecs[ia])?;
        for (b, &ib) in members.iter().enumerate() {
            sub.set(b, a, vecs[ib].inner(&kv)?);
        }
    }
    let (_, w) = hermitian_eigen(&sub)?;
    let dim = vecs[0].dim();
    let mut rotated: Vec<StateVector> = Vec::with_capacity(c);
    for wa in &w {
        let mut acc = StateVector::zeros(dim);
        for (b, &ib) in members.iter().enumerate() {
            acc.add_scaled(wa.component(b), &vecs[ib]);
        }
        rotated.push(acc);
    }
    for (a, &ia) in members.iter().enumerate() {
        vecs[ia] = rotated[a].clone();
    }
    Ok(())
}

/// Cyclic Jacobi for Hermitian matrices. Returns eigenvalues and orthonormal
/// eigenvectors; no eigenvalue ordering is imposed.
///
/// Each step strips the phase of the pivot `a_pq = m e^{i phi}` and applies a
/// real rotation, i.e. the combined 2x2 unitary is
/// `G = [[c, -s], [s e^{-i phi}, c e^{-i phi}]]` with `tan(2 theta)` chosen to
/// annihilate the pivot of `G† A G`.
pub fn hermitian_eigen(a: &SquareMatrix) -> Result<(Vec<f64>, Vec<StateVector>), LinalgError> {
    let n = a.dim();
    if n == 0 {
        return Err(LinalgError::EmptyDim);
    }
    let mut m = a.clone();
    let mut v = SquareMatrix::identity(n);
    let scale = m.max_abs().max(1.0);
    let eps = 1e-15 * scale;
    let mut converged = false;
    for _sweep in 0..80 {
        let mut off = 0.0_f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(m.at(p, q).norm());
            }
        }
        if off <= eps {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.at(p, q);
                let mag = apq.norm();
                if mag <= eps * 1e-2 {
                    continue;
                }
                let app = m.at(p, p).re;
                let aqq = m.at(q, q).re;
                let phase = apq / mag;
                let tau = (app - aqq) / (2.0 * mag);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let pc = phase.conj();
                // A <- A G (columns p,q)
                for i in 0..n {
                    let aip = m.at(i, p);
                    let aiq = m.at(i, q);
                    m.set(i, p, aip * c + aiq * s * pc);
                    m.set(i, q, aiq * c * pc - aip * s);
                }
                // A <- G† A (rows p,q)
                for j in 0..n {
                    let apj = m.at(p, j);
                    let aqj = m.at(q, j);
                    m.set(p, j, apj * c + aqj * s * phase);
                    m.set(q, j, aqj * c * phase - apj * s);
                }
                // V <- V G
                for i in 0..n {
                    let vip = v.at(i, p);
                    let viq = v.at(i, q);
                    v.set(i, p, vip * c + viq * s * pc);
                    v.set(i, q, viq * c * pc - vip * s);
                }
            }
        }
    }
    if !converged {
        // One final check against a looser threshold before giving up.
        let mut off = 0.0_f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(m.at(p, q).norm());
            }
        }
        if off > 1e-12 * scale {
            return Err(LinalgError::EigFailed(format!(
                "jacobi sweep limit reached with off-diagonal {off}"
            )));
        }
    }
    let vals: Vec<f64> = (0..n).map(|i| m.at(i, i).re).collect();
    let vecs: Vec<StateVector> = (0..n)
        .map(|j| StateVector::from_components((0..n).map(|i| v.at(i, j)).collect()))
        .collect();
    Ok((vals, vecs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_unitary(dim: usize, seed: u64) -> SquareMatrix {
        // Product of reflections about pseudo-random unit vectors.
        let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut u = SquareMatrix::identity(dim);
        for _ in 0..3 {
            let mut v = StateVector::from_components(
                (0..dim)
                    .map(|_| C64::new(next() - 0.5, next() - 0.5))
                    .collect(),
            );
            let norm = v.norm();
            v = v.scaled(C64::new(1.0 / norm, 0.0));
            let phase = 2.0 * std::f64::consts::PI * next() - std::f64::consts::PI;
            let refl = SquareMatrix::reflection_about(&v, phase).unwrap();
            u = u.mul(&refl).unwrap();
        }
        u
    }

    #[test]
    fn reflection_phase_pi_negates_axis() {
        let v = StateVector::basis_state(3, 1);
        let r = SquareMatrix::reflection_about(&v, std::f64::consts::PI).unwrap();
        let expected = SquareMatrix::from_fn(3, |i, j| {
            if i != j {
                C64::new(0.0, 0.0)
            } else if i == 1 {
                C64::new(-1.0, 0.0)
            } else {
                C64::new(1.0, 0.0)
            }
        });
        assert!(r.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn reflection_rejects_unnormalized_axis() {
        let v = StateVector::from_reals(&[0.5, 0.5]);
        assert!(SquareMatrix::reflection_about(&v, 1.0).is_err());
    }

    #[test]
    fn power_matches_repeated_multiplication() {
        let u = random_unitary(4, 7);
        let mut acc = SquareMatrix::identity(4);
        for _ in 0..13 {
            acc = acc.mul(&u).unwrap();
        }
        assert!(u.power(13).max_abs_diff(&acc) < 1e-12);
    }

    #[test]
    fn power_stays_unitary() {
        for seed in 0..5u64 {
            let u = random_unitary(5, seed + 1);
            assert!(u.unitarity_error() < tol::UNITARY * 10.0);
            let p = u.power(64);
            assert!(p.unitarity_error() < tol::POWER_UNITARY);
        }
    }

    #[test]
    fn eig_diagonal_phases() {
        let phases = [0.3, -1.2, 2.5];
        let u = SquareMatrix::from_fn(3, |i, j| {
            if i == j {
                C64::from_polar(1.0, phases[i])
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let eig = u.eig_unitary().unwrap();
        let mut got = eig.phases.clone();
        let mut want = phases.to_vec();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-12, "{g} vs {w}");
        }
    }

    #[test]
    fn eig_handles_degenerate_reflection() {
        let axis = StateVector::uniform(4);
        let u = SquareMatrix::reflection_about(&axis, std::f64::consts::PI).unwrap();
        let eig = u.eig_unitary().unwrap();
        let recon = eig.reconstruct();
        assert!(recon.max_abs_diff(&u) < tol::EIG_RECONSTRUCT);
    }

    #[test]
    fn eig_random_unitary_reconstructs() {
        for seed in 0..6u64 {
            let u = random_unitary(6, seed + 11);
            let eig = u.eig_unitary().unwrap();
            let recon = eig.reconstruct();
            assert!(
                recon.max_abs_diff(&u) < tol::EIG_RECONSTRUCT,
                "seed {seed}: {}",
                recon.max_abs_diff(&u)
            );
        }
    }

    #[test]
    fn hermitian_eigen_reconstructs() {
        let a = SquareMatrix::from_fn(4, |i, j| {
            let base = C64::new(
                (i as f64 + 1.0) * (j as f64 + 1.0) * 0.13,
                (i as f64 - j as f64) * 0.21,
            );
            if i == j {
                C64::new(i as f64 - 1.5, 0.0)
            } else {
                base
            }
        });
        let h = a.add(&a.dagger()).unwrap().scaled(C64::new(0.5, 0.0));
        let (vals, vecs) = hermitian_eigen(&h).unwrap();
        let mut recon = SquareMatrix::zeros(4);
        for (lam, v) in vals.iter().zip(&vecs) {
            for i in 0..4 {
                for j in 0..4 {
                    let cur = recon.at(i, j);
                    recon.set(i, j, cur + C64::new(*lam, 0.0) * v.component(i) * v.component(j).conj());
                }
            }
        }
        assert!(recon.max_abs_diff(&h) < 1e-12, "{}", recon.max_abs_diff(&h));
        for (i, vi) in vecs.iter().enumerate() {
            for (j, vj) in vecs.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((vi.inner(vj).unwrap().norm() - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn unitary_completion_starts_at_given_column() {
        let v = StateVector::from_reals(&[0.6, 0.8]);
        let u = SquareMatrix::unitary_from_first_column(&v).unwrap();
        assert!(u.unitarity_error() < 1e-12);
        let first = u.apply(&StateVector::basis_state(2, 0)).unwrap();
        assert!(first.max_abs_diff(&v) < 1e-12);
    }

    #[test]
    fn mul_dimension_mismatch_errors() {
        let a = SquareMatrix::identity(2);
        let b = SquareMatrix::identity(3);
        assert!(a.mul(&b).is_err());
    }
}
