//! Reduced invariant subspaces of the Johnson-graph walks.
//!
//! The walk operators conserve a handful of overlap classes once two or three
//! distinguished elements are fixed, so each walk collapses to a small real
//! matrix pair. All class sizes and matrix entries are exact rationals with
//! integer numerators; floats only appear at the final square root.

use crate::linalg::{C64, SquareMatrix, StateVector};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SubspaceError {
    #[error("invalid Johnson parameters: {0}")]
    BadParams(String),
    #[error("invalid marked class ({j},{l})")]
    BadClass { j: usize, l: usize },
    #[error("missing factor: {0}")]
    MissingFactor(&'static str),
}

/// Parameters of the Johnson graph J(n, r): r-subsets of an n-element set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JohnsonParams {
    pub n: usize,
    pub r: usize,
}

impl JohnsonParams {
    pub fn new(n: usize, r: usize) -> Result<Self, SubspaceError> {
        if r < 1 || r + 2 > n {
            return Err(SubspaceError::BadParams(format!(
                "need 1 <= r <= n-2, got n={n} r={r}"
            )));
        }
        Ok(JohnsonParams { n, r })
    }
}

/// Overlap class (|R ∩ K|, |y ∩ K|) of a vertex-walk state against the
/// two-element marked set K.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MarkedClass {
    pub j: usize,
    pub l: usize,
}

pub const VERTEX5_CLASSES: [(usize, usize); 5] = [(0, 0), (0, 1), (1, 0), (1, 1), (2, 0)];

impl MarkedClass {
    pub fn new(j: usize, l: usize) -> Result<Self, SubspaceError> {
        if VERTEX5_CLASSES.contains(&(j, l)) {
            Ok(MarkedClass { j, l })
        } else {
            Err(SubspaceError::BadClass { j, l })
        }
    }

    /// Position of this class in the five-dimensional basis ordering.
    pub fn index(&self) -> usize {
        VERTEX5_CLASSES
            .iter()
            .position(|&c| c == (self.j, self.l))
            .expect("validated class")
    }
}

/// Real matrix with orthonormal columns; the square of each entry is stored
/// implicitly by the builders as an exact rational.
#[derive(Debug, Clone)]
pub struct StepFactor {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl StepFactor {
    fn from_sq_entries(rows: usize, cols: usize, sq: &[(usize, usize, u128, u128)]) -> StepFactor {
        let mut data = vec![0.0; rows * cols];
        for &(i, j, num, den) in sq {
            data[i * cols + j] = frac_sqrt(num, den);
        }
        StepFactor { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    /// The projector A A† onto the column span, as a complex matrix.
    pub fn projector(&self) -> SquareMatrix {
        let n = self.rows;
        SquareMatrix::from_fn(n, |i, j| {
            let mut acc = 0.0;
            for k in 0..self.cols {
                acc += self.at(i, k) * self.at(j, k);
            }
            C64::new(acc, 0.0)
        })
    }

    pub fn column_orthonormality_error(&self) -> f64 {
        let mut worst = 0.0_f64;
        for a in 0..self.cols {
            for b in 0..self.cols {
                let mut acc = 0.0;
                for i in 0..self.rows {
                    acc += self.at(i, a) * self.at(i, b);
                }
                let want = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((acc - want).abs());
            }
        }
        worst
    }
}

/// A walk restricted to its invariant class space.
#[derive(Debug, Clone)]
pub struct ReducedWalk {
    pub basis_labels: Vec<String>,
    pub step_a: StepFactor,
    pub step_b: Option<StepFactor>,
    pub swap: Option<Vec<usize>>,
    pub psi0: StateVector,
    pub target_index: usize,
    pub epsilon: f64,
}

impl ReducedWalk {
    pub fn dim(&self) -> usize {
        self.psi0.dim()
    }
}

/// Fraction of initial-state weight on the target class.
pub fn marked_fraction(walk: &ReducedWalk) -> f64 {
    walk.psi0.component(walk.target_index).norm_sqr()
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

fn frac_sqrt(num: u128, den: u128) -> f64 {
    (num as f64 / den as f64).sqrt()
}

/// |S_j^l| counted by choosing R first: C(2,j) C(n-2, r-j) * (free y choices).
pub fn vertex5_count_by_r(p: JohnsonParams, j: usize, l: usize) -> u128 {
    let (n, r) = (p.n, p.r);
    let y_free = if l == 0 {
        (n - 2 - (r - j)) as u128
    } else {
        (2 - j) as u128
    };
    binomial(2, j) * binomial(n - 2, r - j) * y_free
}

/// |S_j^l| counted through the union T = R + y.
pub fn vertex5_count_by_union(p: JohnsonParams, j: usize, l: usize) -> u128 {
    let (n, r) = (p.n, p.r);
    if l == 0 {
        binomial(2, j) * binomial(n - 2, r + 1 - j) * (r + 1 - j) as u128
    } else {
        binomial(2, j + 1) * binomial(n - 2, r - j) * (j + 1) as u128
    }
}

/// Squared initial-state weights on the five classes, over denominator n(n-1).
pub fn vertex5_psi0_sq_numerators(p: JohnsonParams) -> [u128; 5] {
    let n = p.n as u128;
    let r = p.r as u128;
    let u = n - r;
    [
        (u - 1) * (u - 2),
        2 * (u - 1),
        2 * r * (u - 1),
        2 * r,
        r * (r - 1),
    ]
}

/// Builds the five-dimensional reduced vertex walk on J(n, r) with a
/// two-element marked set.
pub fn build_vertexwalk_5d(
    p: JohnsonParams,
    target: MarkedClass,
) -> Result<ReducedWalk, SubspaceError> {
    if p.r < 2 {
        return Err(SubspaceError::BadParams(format!(
            "five-class reduction needs r >= 2, got r={}",
            p.r
        )));
    }
    let n = p.n as u128;
    let r = p.r as u128;
    let u = n - r;
    let step_a = StepFactor::from_sq_entries(
        5,
        3,
        &[
            (0, 0, u - 2, u),
            (1, 0, 2, u),
            (2, 1, u - 1, u),
            (3, 1, 1, u),
            (4, 2, 1, 1),
        ],
    );
    let step_b = StepFactor::from_sq_entries(
        5,
        3,
        &[
            (0, 0, 1, 1),
            (1, 1, 1, r + 1),
            (2, 1, r, r + 1),
            (3, 2, 2, r + 1),
            (4, 2, r - 1, r + 1),
        ],
    );
    let nums = vertex5_psi0_sq_numerators(p);
    let den = n * (n - 1);
    let psi0 = StateVector::from_reals(
        &nums
            .iter()
            .map(|&num| frac_sqrt(num, den))
            .collect::<Vec<_>>(),
    );
    let target_index = target.index();
    let epsilon = nums[target_index] as f64 / den as f64;
    Ok(ReducedWalk {
        basis_labels: VERTEX5_CLASSES
            .iter()
            .map(|&(j, l)| format!("{j},{l}"))
            .collect(),
        step_a,
        step_b: Some(step_b),
        swap: None,
        psi0,
        target_index,
        epsilon,
    })
}

/// Closed form of the marked fraction for target class (1,0) on J(n1, r2).
pub fn epsilon2_closed_form(n1: usize, r2: usize) -> f64 {
    let n1 = n1 as f64;
    let r2 = r2 as f64;
    2.0 * (r2 / n1) * (1.0 - r2 / (n1 - 1.0))
}

/// One step `U = (I-(1-e^{i theta2}) B B†)(I-(1-e^{i theta1}) A A†)` of a
/// reduced vertex walk.
pub fn vertexwalk_step(
    walk: &ReducedWalk,
    theta1: f64,
    theta2: f64,
) -> Result<SquareMatrix, SubspaceError> {
    let b = walk
        .step_b
        .as_ref()
        .ok_or(SubspaceError::MissingFactor("step_b"))?;
    let ua = generalized_reflection(&walk.step_a.projector(), theta1);
    let ub = generalized_reflection(&b.projector(), theta2);
    Ok(ub.mul(&ua).expect("same dim"))
}

/// One step `S (2 A A† - I)` of the reduced edge walk.
pub fn edgewalk_step(walk: &ReducedWalk) -> Result<SquareMatrix, SubspaceError> {
    let swap = walk
        .swap
        .as_ref()
        .ok_or(SubspaceError::MissingFactor("swap"))?;
    let proj = walk.step_a.projector();
    let dim = proj.dim();
    let refl = proj
        .scaled(C64::new(2.0, 0.0))
        .sub(&SquareMatrix::identity(dim))
        .expect("same dim");
    // S e_k = e_{swap[k]}, so row swap[k] of S*M is row k of M.
    let mut out = SquareMatrix::zeros(dim);
    for (i, &si) in swap.iter().enumerate() {
        for j in 0..dim {
            out.set(si, j, refl.at(i, j));
        }
    }
    Ok(out)
}

fn generalized_reflection(projector: &SquareMatrix, theta: f64) -> SquareMatrix {
    let coeff = C64::new(1.0, 0.0) - C64::from_polar(1.0, theta);
    let dim = projector.dim();
    SquareMatrix::identity(dim)
        .sub(&projector.scaled(coeff))
        .expect("same dim")
}

pub const LAYER1_CLASSES: [(usize, usize); 10] = [
    (0, 0),
    (0, 1),
    (1, 0),
    (1, 1),
    (1, 2),
    (2, 1),
    (2, 2),
    (2, 3),
    (3, 2),
    (3, 3),
];

/// Index permutation of the register swap (j,l) -> (l,j) on the ten classes.
pub const LAYER1_SWAP: [usize; 10] = [0, 2, 1, 3, 5, 4, 6, 8, 7, 9];

/// Squared initial-state weights on the ten classes, over n(n-1)(n-2).
pub fn layer1_psi0_sq_numerators(n: usize, r1: usize) -> [u128; 10] {
    let n = n as u128;
    let r = r1 as u128;
    let u = n - r;
    [
        (u - 1) * (u - 2) * (u - 3),
        3 * (u - 1) * (u - 2),
        3 * (u - 1) * (u - 2),
        3 * (u - 1) * ((r - 1) * (u - 2) + 2),
        6 * (r - 1) * (u - 1),
        6 * (r - 1) * (u - 1),
        3 * (r - 1) * ((r - 2) * (u - 1) + 2),
        3 * (r - 1) * (r - 2),
        3 * (r - 1) * (r - 2),
        (r - 1) * (r - 2) * (r - 3),
    ]
}

/// Builds the ten-dimensional reduced edge walk on J(n, r1) against a fixed
/// three-element target triple.
pub fn build_layer1_10d(n: usize, r1: usize) -> Result<ReducedWalk, SubspaceError> {
    if r1 < 4 || n < r1 + 4 {
        return Err(SubspaceError::BadParams(format!(
            "ten-class reduction needs r1 >= 4 and n >= r1 + 4, got n={n} r1={r1}"
        )));
    }
    let nn = n as u128;
    let r = r1 as u128;
    let u = nn - r;
    let den = r * u;
    let step_a = StepFactor::from_sq_entries(
        10,
        4,
        &[
            (0, 0, u - 3, u),
            (1, 0, 3, u),
            (2, 1, u - 2, den),
            (3, 1, (r - 1) * (u - 2) + 2, den),
            (4, 1, 2 * (r - 1), den),
            (5, 2, 2 * (u - 1), den),
            (6, 2, (r - 2) * (u - 1) + 2, den),
            (7, 2, r - 2, den),
            (8, 3, 3, r),
            (9, 3, r - 3, r),
        ],
    );
    let nums = layer1_psi0_sq_numerators(n, r1);
    let den0 = nn * (nn - 1) * (nn - 2);
    let psi0 = StateVector::from_reals(
        &nums
            .iter()
            .map(|&num| frac_sqrt(num, den0))
            .collect::<Vec<_>>(),
    );
    let epsilon = nums[3] as f64 / den0 as f64;
    Ok(ReducedWalk {
        basis_labels: LAYER1_CLASSES
            .iter()
            .map(|&(j, l)| format!("{j},{l}"))
            .collect(),
        step_a,
        step_b: None,
        swap: Some(LAYER1_SWAP.to_vec()),
        psi0,
        target_index: 3,
        epsilon,
    })
}

/// Basis order of the nine product classes (j1,j2)-(k1,k2).
pub const LAYER4_CLASSES: [((usize, usize), (usize, usize)); 9] = [
    ((0, 0), (0, 0)),
    ((0, 0), (1, 0)),
    ((0, 0), (0, 1)),
    ((0, 0), (1, 1)),
    ((1, 0), (1, 0)),
    ((1, 0), (1, 1)),
    ((0, 1), (0, 1)),
    ((0, 1), (1, 1)),
    ((1, 1), (1, 1)),
];

/// Squared initial-state weights on the nine classes, over r1 r2.
pub fn layer4_psi0_sq_numerators(r1: usize, r2: usize, m: usize) -> [u128; 9] {
    let p = (r1 - m - 1) as u128;
    let q = (r2 - m - 1) as u128;
    let m = m as u128;
    [p * q, q, p, 1, m * q, m, p * m, m, m * m]
}

/// Builds the nine-dimensional reduced product walk on J(r1, m) x J(r2, m).
pub fn build_layer4_9d(r1: usize, r2: usize, m: usize) -> Result<ReducedWalk, SubspaceError> {
    if m < 1 || m + 2 > r1.min(r2) {
        return Err(SubspaceError::BadParams(format!(
            "product reduction needs 1 <= m <= min(r1,r2) - 2, got r1={r1} r2={r2} m={m}"
        )));
    }
    let a1 = (r1 - m) as u128;
    let a2 = (r2 - m) as u128;
    let mm = m as u128;
    let step_a = StepFactor::from_sq_entries(
        9,
        4,
        &[
            (0, 0, (a1 - 1) * (a2 - 1), a1 * a2),
            (1, 0, a2 - 1, a1 * a2),
            (2, 0, a1 - 1, a1 * a2),
            (3, 0, 1, a1 * a2),
            (4, 1, a2 - 1, a2),
            (5, 1, 1, a2),
            (6, 2, a1 - 1, a1),
            (7, 2, 1, a1),
            (8, 3, 1, 1),
        ],
    );
    let b = mm + 1;
    let step_b = StepFactor::from_sq_entries(
        9,
        4,
        &[
            (0, 0, 1, 1),
            (1, 1, 1, b),
            (2, 2, 1, b),
            (3, 3, 1, b * b),
            (4, 1, mm, b),
            (5, 3, mm, b * b),
            (6, 2, mm, b),
            (7, 3, mm, b * b),
            (8, 3, mm * mm, b * b),
        ],
    );
    let nums = layer4_psi0_sq_numerators(r1, r2, m);
    let den = (r1 * r2) as u128;
    let psi0 = StateVector::from_reals(
        &nums
            .iter()
            .map(|&num| frac_sqrt(num, den))
            .collect::<Vec<_>>(),
    );
    let epsilon = (mm * mm) as f64 / den as f64;
    Ok(ReducedWalk {
        basis_labels: LAYER4_CLASSES
            .iter()
            .map(|&((j1, j2), (k1, k2))| format!("({j1},{j2})-({k1},{k2})"))
            .collect(),
        step_a,
        step_b: Some(step_b),
        swap: None,
        psi0,
        target_index: 8,
        epsilon,
    })
}
