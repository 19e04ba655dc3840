//! Deterministic search planning.
//!
//! Two amplitude-amplification schemes produce exact hits on a marked
//! subspace: a single-angle scheme whose phases are matched to the initial
//! overlap, and a two-angle scheme that works at an externally fixed
//! reflection phase `beta`. On top of those sit the two-angle walk power
//! solver (`solve_eedp`), which finds walk angles making a t-step walk act as
//! a pure phase shift of the initial state, and exact amplitude evaluators
//! used by the nested layers.

use crate::linalg::{hermitian_eigen, C64, LinalgError, SquareMatrix, StateVector};
use crate::subspaces::{
    build_vertexwalk_5d, vertexwalk_step, JohnsonParams, MarkedClass, SubspaceError,
};
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

/// Default multiplier for the `t <= c * sqrt(r)` search bound of
/// `solve_eedp`. Every known branch family has its minimal step count
/// between `8.1 sqrt(r)` and `9.6 sqrt(r)`, so `4 pi` leaves headroom
/// without admitting runaway scans.
pub const EEDP_T_CAP_MULTIPLIER: f64 = 4.0 * PI;

/// Fidelity demanded of a solved two-angle plan before it is returned.
const PAIR_SOLVE_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("k={k} cannot reach unit fidelity at lambda={lambda}; minimal feasible k is {min_k}")]
    KTooSmall { k: u32, lambda: f64, min_k: u32 },
    #[error("k={k} is below the iteration lower bound {lower:.6}")]
    KBelowLowerBound { k: u32, lower: f64 },
    #[error("resonant parameters at lambda={lambda}, beta={beta}: reduced rotation angle is zero")]
    Resonant { lambda: f64, beta: f64 },
    #[error("no angle pair found at k={k}; best residual {best_residual:.3e}")]
    NoAnglePair { k: u32, best_residual: f64 },
    #[error(
        "no walk branch with t <= {t_cap} met tolerance {tol:.1e}; best residual {best_residual:.3e} at t={best_t}"
    )]
    NoBranch {
        t_cap: u64,
        tol: f64,
        best_residual: f64,
        best_t: u64,
    },
    #[error("no conjugate eigenphase pair dominates the initial state; phases: {phases:?}")]
    NoDominantPair { phases: Vec<f64> },
    #[error("invalid parameter: {0}")]
    BadParams(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Subspace(#[from] SubspaceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Long,
    FixedBeta,
}

/// Parameters of one deterministic amplitude-amplification run.
///
/// `scheme = Long` keeps a single angle (`alpha1 == alpha2`) and matches
/// `beta = -alpha` (stored wrapped into `(0, 2 pi)`). `scheme = FixedBeta`
/// carries an angle pair solved for a caller-supplied `beta`.
#[derive(Debug, Clone, Serialize)]
pub struct SearchPlan {
    pub scheme: Scheme,
    pub lambda: f64,
    pub k: u32,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta: f64,
}

impl SearchPlan {
    /// Single-angle accessor; meaningful for the matched-phase scheme.
    pub fn alpha(&self) -> f64 {
        self.alpha1
    }

    /// Checks the defining equations of the plan's scheme.
    pub fn validate(&self) -> Result<(), SearchError> {
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return Err(SearchError::BadParams(format!(
                "lambda must lie in (0,1], got {}",
                self.lambda
            )));
        }
        if self.k == 0 {
            // Degenerate plan: the prepared state already is the target.
            if (self.lambda - 1.0).abs() > 1e-12 {
                return Err(SearchError::BadParams(
                    "k=0 is only valid for lambda=1".into(),
                ));
            }
            return Ok(());
        }
        match self.scheme {
            Scheme::Long => {
                let lhs = (PI / (4.0 * self.k as f64 + 2.0)).sin();
                let rhs = self.lambda.sqrt() * (self.alpha1 / 2.0).sin();
                if (lhs - rhs).abs() > 1e-12 {
                    return Err(SearchError::BadParams(format!(
                        "matched-phase equation violated by {:.3e}",
                        (lhs - rhs).abs()
                    )));
                }
                if self.alpha1 != self.alpha2 {
                    return Err(SearchError::BadParams(
                        "single-angle plan carries two distinct angles".into(),
                    ));
                }
                let gap = wrap_pm_pi(self.beta + self.alpha1).abs();
                if gap > 1e-12 {
                    return Err(SearchError::BadParams(format!(
                        "beta = -alpha violated by {gap:.3e}"
                    )));
                }
            }
            Scheme::FixedBeta => {
                let lower = k_lower(self.lambda, self.beta)?;
                if (self.k as f64) < lower - 1e-9 {
                    return Err(SearchError::KBelowLowerBound {
                        k: self.k,
                        lower,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Angles of a t-step walk power that acts as a phase shift of the initial
/// state.
///
/// The verified identity is `U(theta1, theta2)^t =
/// e^{i beta} (I - (1 - e^{i beta}) |psi0><psi0|)`: the power multiplies
/// `psi0` by `e^{2 i beta}` and everything orthogonal to it by `e^{i beta}`,
/// so the relative phase shift of the initial state is `beta`. The leading
/// factor is a global phase and drops out of any measurement statistics;
/// without it no nontrivial angle choice closes the identity at all, since
/// the power acts as a scalar on the orthogonal complement of `psi0` and a
/// product of non-identity reflections cannot pin that scalar to 1.
/// `beta = t (theta1 + theta2) / 2  (mod 2 pi)` holds exactly because the
/// solver only returns branches with an even reduced quantum number.
#[derive(Debug, Clone, Serialize)]
pub struct EedpSolution {
    pub theta1: f64,
    pub theta2: f64,
    pub t: u64,
    pub beta: f64,
}

fn wrap_pm_pi(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Reduce into `[-pi/2, pi/2]` by shifting multiples of `pi`.
fn wrap_half_pi(x: f64) -> f64 {
    x - PI * (x / PI).round()
}

/// `pi / (4 arcsin(sqrt(lambda))) - 1/2`, the real-valued iteration count at
/// which a plain amplitude-amplification rotation lands exactly on the
/// marked subspace.
pub fn k_opt(lambda: f64) -> Result<f64, SearchError> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(SearchError::BadParams(format!(
            "lambda must lie in (0,1], got {lambda}"
        )));
    }
    Ok(PI / (4.0 * lambda.sqrt().asin()) - 0.5)
}

/// Matched-phase plan: given `lambda` and an iteration count `k` with
/// `sin(pi/(4k+2)) <= sqrt(lambda)`, the angle
/// `alpha = 2 arcsin(sin(pi/(4k+2)) / sqrt(lambda))` with `beta = -alpha`
/// drives the initial state exactly onto the marked subspace in `k`
/// iterations.
pub fn long_params(lambda: f64, k: u32) -> Result<SearchPlan, SearchError> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(SearchError::BadParams(format!(
            "lambda must lie in (0,1], got {lambda}"
        )));
    }
    if k == 0 {
        return Err(SearchError::BadParams("k must be positive".into()));
    }
    let sl = lambda.sqrt();
    let s = (PI / (4.0 * k as f64 + 2.0)).sin();
    if s > sl {
        // Smallest k with sin(pi/(4k+2)) <= sqrt(lambda).
        let min_k = ((PI / sl.asin() - 2.0) / 4.0).ceil().max(1.0) as u32;
        return Err(SearchError::KTooSmall {
            k,
            lambda,
            min_k,
        });
    }
    let alpha = 2.0 * (s / sl).asin();
    let beta = (-alpha).rem_euclid(2.0 * PI);
    Ok(SearchPlan {
        scheme: Scheme::Long,
        lambda,
        k,
        alpha1: alpha,
        alpha2: alpha,
        beta,
    })
}

/// Iteration lower bound of the fixed-phase scheme:
/// `pi / |4 arcsin(sqrt(lambda) sin(beta/2))  mod [-pi/2, pi/2]|`.
pub fn k_lower(lambda: f64, beta: f64) -> Result<f64, SearchError> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(SearchError::BadParams(format!(
            "lambda must lie in (0,1], got {lambda}"
        )));
    }
    if !(beta > 0.0 && beta < 2.0 * PI) {
        return Err(SearchError::BadParams(format!(
            "beta must lie in (0, 2 pi), got {beta}"
        )));
    }
    let x = 4.0 * (lambda.sqrt() * (beta / 2.0).sin()).asin();
    let reduced = wrap_half_pi(x);
    if reduced.abs() < 1e-12 {
        return Err(SearchError::Resonant { lambda, beta });
    }
    Ok(PI / reduced.abs())
}

/// One iteration `G(alpha, beta) = S_psi0(beta) S_M(alpha)` in the exact
/// two-dimensional invariant space spanned by the marked combination (first
/// component) and its complement inside the prepared state.
#[derive(Clone, Copy)]
struct TwoDim {
    sl: f64,
    cl: f64,
    phase: C64,
}

impl TwoDim {
    fn new(lambda: f64, beta: f64) -> TwoDim {
        TwoDim {
            sl: lambda.sqrt(),
            cl: (1.0 - lambda).sqrt(),
            phase: C64::from_polar(1.0, -beta) - C64::new(1.0, 0.0),
        }
    }

    fn apply(&self, state: (C64, C64), alpha: f64) -> (C64, C64) {
        let a = state.0 * C64::from_polar(1.0, alpha);
        let b = state.1;
        let overlap = self.sl * a + self.cl * b;
        (
            a + self.phase * overlap * self.sl,
            b + self.phase * overlap * self.cl,
        )
    }

    /// Complement amplitude after `k` double steps (`alpha2` first); its
    /// vanishing is equivalent to unit fidelity on the marked component.
    fn miss(&self, k: u32, alpha1: f64, alpha2: f64) -> C64 {
        let mut state = (C64::new(self.sl, 0.0), C64::new(self.cl, 0.0));
        for _ in 0..k {
            state = self.apply(state, alpha2);
            state = self.apply(state, alpha1);
        }
        state.1
    }
}

fn pair_newton(model: &TwoDim, k: u32, seed: (f64, f64), symmetric: bool) -> ((f64, f64), f64) {
    let h = 1e-7;
    let (mut a1, mut a2) = seed;
    for _ in 0..80 {
        let f = model.miss(k, a1, a2);
        if f.norm() < 1e-15 {
            break;
        }
        let (d1, d2) = if symmetric {
            let fd = (model.miss(k, a1 + h, a2 + h) - f).unscale(h);
            // One complex constraint, one real unknown: least-squares step.
            let denom = fd.norm_sqr();
            if denom < 1e-24 {
                break;
            }
            let step = -(f * fd.conj()).re / denom;
            (step, step)
        } else {
            let f1 = (model.miss(k, a1 + h, a2) - f).unscale(h);
            let f2 = (model.miss(k, a1, a2 + h) - f).unscale(h);
            let det = f1.re * f2.im - f2.re * f1.im;
            if det.abs() < 1e-24 {
                break;
            }
            (
                (-f.re * f2.im + f.im * f2.re) / det,
                (-f1.re * f.im + f1.im * f.re) / det,
            )
        };
        let mut scale = 1.0;
        let mut moved = false;
        while scale > 1e-4 {
            if model.miss(k, a1 + scale * d1, a2 + scale * d2).norm() < f.norm() {
                a1 += scale * d1;
                a2 += scale * d2;
                moved = true;
                break;
            }
            scale *= 0.5;
        }
        if !moved {
            break;
        }
    }
    ((a1, a2), model.miss(k, a1, a2).norm())
}

fn solve_pair(
    lambda: f64,
    beta: f64,
    k: u32,
    symmetric: bool,
) -> Result<(f64, f64), SearchError> {
    let model = TwoDim::new(lambda, beta);
    let grid = 48;
    let mut seeds: Vec<(f64, f64, f64)> = Vec::new();
    if symmetric {
        let fine = grid * grid;
        for i in 0..fine {
            let a = -PI + 2.0 * PI * (i as f64 + 0.5) / fine as f64;
            seeds.push((model.miss(k, a, a).norm(), a, a));
        }
    } else {
        for i in 0..grid {
            for j in 0..grid {
                let a1 = -PI + 2.0 * PI * (i as f64 + 0.5) / grid as f64;
                let a2 = -PI + 2.0 * PI * (j as f64 + 0.5) / grid as f64;
                seeds.push((model.miss(k, a1, a2).norm(), a1, a2));
            }
        }
    }
    seeds.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let mut best = f64::INFINITY;
    for &(_, s1, s2) in seeds.iter().take(16) {
        let ((a1, a2), residual) = pair_newton(&model, k, (s1, s2), symmetric);
        if residual < best {
            best = residual;
        }
        if residual <= PAIR_SOLVE_TOL {
            return Ok((wrap_pm_pi(a1), wrap_pm_pi(a2)));
        }
    }
    Err(SearchError::NoAnglePair {
        k,
        best_residual: best,
    })
}

/// Two-angle plan at an externally fixed reflection phase `beta`.
///
/// The angle pair is found numerically in the exact two-dimensional
/// invariant space (two real unknowns against the two real constraints of
/// unit fidelity) by grid seeding plus damped Newton refinement, then
/// verified by direct iteration. `lambda = 1` returns the degenerate `k=0`
/// plan.
pub fn fixed_beta_params(lambda: f64, beta: f64, k: u32) -> Result<SearchPlan, SearchError> {
    fixed_beta_impl(lambda, beta, k, false)
}

/// Like [`fixed_beta_params`] but forces `alpha1 = alpha2`. Used to check
/// consistency against the matched-phase scheme; symmetric solutions only
/// exist at special iteration counts.
pub fn fixed_beta_params_symmetric(
    lambda: f64,
    beta: f64,
    k: u32,
) -> Result<SearchPlan, SearchError> {
    fixed_beta_impl(lambda, beta, k, true)
}

fn fixed_beta_impl(
    lambda: f64,
    beta: f64,
    k: u32,
    symmetric: bool,
) -> Result<SearchPlan, SearchError> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(SearchError::BadParams(format!(
            "lambda must lie in (0,1], got {lambda}"
        )));
    }
    if (lambda - 1.0).abs() <= 1e-15 {
        return Ok(SearchPlan {
            scheme: Scheme::FixedBeta,
            lambda: 1.0,
            k: 0,
            alpha1: 0.0,
            alpha2: 0.0,
            beta,
        });
    }
    if !(beta > 0.0 && beta < 2.0 * PI) {
        return Err(SearchError::BadParams(format!(
            "beta must lie in (0, 2 pi), got {beta}"
        )));
    }
    let lower = k_lower(lambda, beta)?;
    if (k as f64) < lower - 1e-9 {
        return Err(SearchError::KBelowLowerBound { k, lower });
    }
    let (alpha1, alpha2) = solve_pair(lambda, beta, k, symmetric)?;
    Ok(SearchPlan {
        scheme: Scheme::FixedBeta,
        lambda,
        k,
        alpha1,
        alpha2,
        beta,
    })
}

/// Runs a plan against a concrete preparation unitary.
///
/// `psi0 = prep |0>`; each iteration applies `S_M(alpha)` (a phase on the
/// target component) followed by `S_psi0(beta) = I - (1 - e^{-i beta})
/// |psi0><psi0|`. For the two-angle scheme one iteration is the `alpha2`
/// step followed by the `alpha1` step.
pub fn run_search(
    prep: &SquareMatrix,
    target_index: usize,
    plan: &SearchPlan,
) -> Result<StateVector, SearchError> {
    plan.validate()?;
    let dim = prep.dim();
    if target_index >= dim {
        return Err(SearchError::BadParams(format!(
            "target index {target_index} outside dimension {dim}"
        )));
    }
    let deviation = prep.unitarity_error();
    if deviation > 1e-10 {
        return Err(SearchError::Linalg(LinalgError::NotUnitary { deviation }));
    }
    let psi0 = prep.apply(&StateVector::basis_state(dim, 0))?;
    let phase = C64::from_polar(1.0, -plan.beta) - C64::new(1.0, 0.0);
    let mut state = psi0.clone();
    let g = |state: &mut StateVector, alpha: f64| {
        let cur = state.component(target_index);
        state.set(target_index, cur * C64::from_polar(1.0, alpha));
        let overlap = psi0.inner(state).expect("same dim");
        state.add_scaled(phase * overlap, &psi0);
    };
    for _ in 0..plan.k {
        match plan.scheme {
            Scheme::Long => g(&mut state, plan.alpha1),
            Scheme::FixedBeta => {
                g(&mut state, plan.alpha2);
                g(&mut state, plan.alpha1);
            }
        }
    }
    Ok(state)
}

/// Non-unit overlaps `(c1^2, c2^2)` of the two step factors' column spans,
/// obtained from the Gram matrix of the reduced walk. The largest singular
/// value is the shared direction `psi0` and must be 1.
fn principal_overlaps(
    walk: &crate::subspaces::ReducedWalk,
) -> Result<(f64, f64), SearchError> {
    let a = &walk.step_a;
    let b = walk
        .step_b
        .as_ref()
        .ok_or_else(|| SearchError::BadParams("walk has no second step factor".into()))?;
    if a.cols() != b.cols() || a.rows() != b.rows() {
        return Err(SearchError::BadParams(
            "step factors have mismatched shapes".into(),
        ));
    }
    let cols = a.cols();
    let gram = SquareMatrix::from_fn(cols, |i, j| {
        let mut acc = 0.0;
        for k in 0..a.rows() {
            acc += a.at(k, i) * b.at(k, j);
        }
        C64::new(acc, 0.0)
    });
    let gtg = gram.dagger().mul(&gram)?;
    let (mut vals, _) = hermitian_eigen(&gtg)?;
    vals.sort_by(|x, y| y.partial_cmp(x).unwrap());
    if (vals[0] - 1.0).abs() > 1e-9 {
        return Err(SearchError::BadParams(format!(
            "walk Gram matrix lacks a unit singular value (top = {})",
            vals[0]
        )));
    }
    Ok((vals[1], vals[2]))
}

/// Solves for walk angles `(theta1, theta2)` and a step count `t` such that
/// `U(theta1, theta2)^t` is a phase shift of the initial state, using the
/// default `t` bound. See [`solve_eedp_capped`].
pub fn solve_eedp(
    p: JohnsonParams,
    target: MarkedClass,
    tol: f64,
) -> Result<EedpSolution, SearchError> {
    solve_eedp_capped(p, target, tol, EEDP_T_CAP_MULTIPLIER)
}

/// Walk angle solver with a configurable step-count bound `t <=
/// ceil(cap_multiplier * sqrt(r))`.
///
/// In the basis that diagonalizes both column-span projectors, one walk step
/// rotates two invariant planes by angles `nu_1, nu_2` satisfying
/// `cos nu_j = cos((theta1 - theta2)/2) - 2 sin(theta1/2) sin(theta2/2) c_j^2`
/// and multiplies the `psi0` direction by `e^{i (theta1 + theta2)}`. The
/// power closes into a phase shift of `psi0` exactly when both `t nu_j` are
/// integer multiples of `pi` of equal parity. The solver walks the branch
/// family with deficits `(t nu_1, t nu_2) = ((t-8) pi, (t-10) pi)` at the
/// smallest feasible even `t`, inverting the two trace conditions in closed
/// form; this family's phase converges to `(sqrt(28) - 6) pi ~ 1.2915 pi`
/// from above as the walk grows, and of the conjugate angle pair the root
/// with `beta` in `(pi, 2 pi)` is returned. Even `t` keeps the quantum
/// number `t - 8` even, which is what makes the reported `beta` equal
/// `t (theta1 + theta2)/2 mod 2 pi` exactly.
pub fn solve_eedp_capped(
    p: JohnsonParams,
    target: MarkedClass,
    tol: f64,
    cap_multiplier: f64,
) -> Result<EedpSolution, SearchError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(SearchError::BadParams(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if cap_multiplier.is_nan() || cap_multiplier <= 0.0 {
        return Err(SearchError::BadParams(format!(
            "cap multiplier must be positive, got {cap_multiplier}"
        )));
    }
    let walk = build_vertexwalk_5d(p, target)?;
    let (c1sq, c2sq) = principal_overlaps(&walk)?;
    if c1sq - c2sq < 1e-12 {
        return Err(SearchError::BadParams(
            "degenerate plane overlaps; branch family is undefined".into(),
        ));
    }
    let t_cap = (cap_multiplier * (p.r as f64).sqrt()).ceil() as u64;
    let psi0 = &walk.psi0;
    let mut best_residual = f64::INFINITY;
    let mut best_t = 0u64;

    let mut t = 12u64;
    while t <= t_cap {
        let m1 = t - 8;
        let nu1 = m1 as f64 * PI / t as f64;
        let nu2 = (t - 10) as f64 * PI / t as f64;
        let y = (nu2.cos() - nu1.cos()) / (c1sq - c2sq);
        let x = nu1.cos() + y * c1sq;
        if x.abs() <= 1.0 && (x - y).abs() <= 1.0 {
            let d = x.acos();
            let s = 2.0 * PI - (x - y).acos();
            let (theta1, theta2) = polish_angles(
                (s + d).rem_euclid(2.0 * PI),
                (s - d).rem_euclid(2.0 * PI),
                c1sq,
                c2sq,
                nu1.cos(),
                nu2.cos(),
            );
            if theta1.abs() > 1e-9 && theta2.abs() > 1e-9 {
                let sum_half = (theta1 + theta2) / 2.0;
                let beta = (t as f64 * sum_half).rem_euclid(2.0 * PI);
                let step = vertexwalk_step(&walk, theta1, theta2)?;
                let power = step.power(t);
                let want = SquareMatrix::reflection_about(psi0, beta)?
                    .scaled(C64::from_polar(1.0, beta));
                let residual = power.max_abs_diff(&want);
                if residual <= tol {
                    return Ok(EedpSolution {
                        theta1,
                        theta2,
                        t,
                        beta,
                    });
                }
                if residual < best_residual {
                    best_residual = residual;
                    best_t = t;
                }
            }
        }
        t += 2;
    }
    Err(SearchError::NoBranch {
        t_cap,
        tol,
        best_residual,
        best_t,
    })
}

/// Two Newton steps on the exact trace conditions; removes the arccos
/// conditioning loss near the feasibility boundary.
fn polish_angles(
    mut th1: f64,
    mut th2: f64,
    c1sq: f64,
    c2sq: f64,
    k1: f64,
    k2: f64,
) -> (f64, f64) {
    for _ in 0..3 {
        let d = (th1 - th2) / 2.0;
        let (s1, c1) = (th1 / 2.0).sin_cos();
        let (s2, c2) = (th2 / 2.0).sin_cos();
        let f1 = d.cos() - 2.0 * s1 * s2 * c1sq - k1;
        let f2 = d.cos() - 2.0 * s1 * s2 * c2sq - k2;
        let j11 = -d.sin() / 2.0 - c1sq * c1 * s2;
        let j12 = d.sin() / 2.0 - c1sq * s1 * c2;
        let j21 = -d.sin() / 2.0 - c2sq * c1 * s2;
        let j22 = d.sin() / 2.0 - c2sq * s1 * c2;
        let det = j11 * j22 - j12 * j21;
        if det.abs() < 1e-18 {
            break;
        }
        th1 -= (f1 * j22 - f2 * j12) / det;
        th2 -= (j11 * f2 - j21 * f1) / det;
    }
    (th1, th2)
}

/// Residual of a solution against the phase-shift identity, measured as the
/// max-abs deviation of `U^t` from
/// `e^{i beta} (I - (1 - e^{i beta}) |psi0><psi0|)` on the reduced space.
pub fn eedp_residual(
    p: JohnsonParams,
    target: MarkedClass,
    sol: &EedpSolution,
) -> Result<f64, SearchError> {
    let walk = build_vertexwalk_5d(p, target)?;
    let step = vertexwalk_step(&walk, sol.theta1, sol.theta2)?;
    let power = step.power(sol.t);
    let want = SquareMatrix::reflection_about(&walk.psi0, sol.beta)?
        .scaled(C64::from_polar(1.0, sol.beta));
    Ok(power.max_abs_diff(&want))
}

/// `|<target| (step^{t1} check)^{t2} |psi0>|` by direct matrix arithmetic.
pub fn exact_success_amplitude(
    step: &SquareMatrix,
    check: &SquareMatrix,
    psi0: &StateVector,
    target_index: usize,
    t1: u64,
    t2: u64,
) -> Result<f64, SearchError> {
    if step.dim() != check.dim() || step.dim() != psi0.dim() {
        return Err(SearchError::BadParams(
            "operator and state dimensions do not match".into(),
        ));
    }
    if target_index >= psi0.dim() {
        return Err(SearchError::BadParams(format!(
            "target index {target_index} outside dimension {}",
            psi0.dim()
        )));
    }
    for (name, op) in [("step", step), ("check", check)] {
        let deviation = op.unitarity_error();
        if deviation > 1e-8 {
            return Err(SearchError::BadParams(format!(
                "{name} operator is not unitary (deviation {deviation:.3e})"
            )));
        }
    }
    let stepped = step.power(t1);
    let mut state = psi0.clone();
    for _ in 0..t2 {
        state = check.apply(&state)?;
        state = stepped.apply(&state)?;
    }
    Ok(state.component(target_index).norm())
}

/// The conjugate eigenphase pair of a composed step-check operator that
/// dominates the initial state, with the overlaps controlling the success
/// amplitude of a two-block iteration.
#[derive(Debug, Clone, Serialize)]
pub struct OverlapReport {
    /// Positive phase of the pair, in `(0, pi)`.
    pub phase: f64,
    /// `|<target | v_+>|, |<target | v_->|`.
    pub target_overlap: (f64, f64),
    /// `|<psi0 | v_+>|, |<psi0 | v_->|`.
    pub psi0_overlap: (f64, f64),
    /// Initial-state weight outside the pair.
    pub residual_mass: f64,
}

pub fn eigen_overlap_report(
    step_check: &SquareMatrix,
    psi0: &StateVector,
    target_index: usize,
) -> Result<OverlapReport, SearchError> {
    if step_check.dim() != psi0.dim() {
        return Err(SearchError::BadParams(
            "operator and state dimensions do not match".into(),
        ));
    }
    if target_index >= psi0.dim() {
        return Err(SearchError::BadParams(format!(
            "target index {target_index} outside dimension {}",
            psi0.dim()
        )));
    }
    let eig = step_check.eig_unitary()?;
    let n = eig.len();
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..n {
        let phi = eig.phases[i];
        if !(phi > 1e-9 && phi < PI - 1e-9) {
            continue;
        }
        for j in 0..n {
            if (eig.phases[j] + phi).abs() > 1e-6 {
                continue;
            }
            let mass = psi0.inner(&eig.vectors[i])?.norm_sqr()
                + psi0.inner(&eig.vectors[j])?.norm_sqr();
            if best.is_none_or(|(m, _, _)| mass > m) {
                best = Some((mass, i, j));
            }
        }
    }
    match best {
        Some((mass, plus, minus)) if mass >= 0.5 => Ok(OverlapReport {
            phase: eig.phases[plus],
            target_overlap: (
                eig.vectors[plus].component(target_index).norm(),
                eig.vectors[minus].component(target_index).norm(),
            ),
            psi0_overlap: (
                psi0.inner(&eig.vectors[plus])?.norm(),
                psi0.inner(&eig.vectors[minus])?.norm(),
            ),
            residual_mass: (1.0 - mass).max(0.0),
        }),
        _ => Err(SearchError::NoDominantPair {
            phases: eig.phases.clone(),
        }),
    }
}
