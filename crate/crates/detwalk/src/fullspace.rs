//! Brute-force ground truth for the reduced walks.
//!
//! Enumerates small Johnson-walk state spaces explicitly, builds the step
//! operators from their definitional projectors, and checks that compressing
//! onto the symmetry classes reproduces the reduced matrices entrywise.
//!
//! Steps are kept in factored form (uniform-block reflections plus
//! permutations). Applying a step to a vector costs O(dim), so the class-wise
//! comparison never materializes a dense full-space matrix; `to_dense` exists
//! for the small cases where an explicit unitarity check is worth having.

use crate::linalg::{C64, LinalgError, SquareMatrix, StateVector};
use crate::subspaces::{
    binomial, JohnsonParams, SubspaceError, LAYER1_CLASSES, LAYER4_CLASSES, VERTEX5_CLASSES,
};
use thiserror::Error;

/// Largest admissible number of basis states for a full enumeration.
pub const FULL_SPACE_CAP: u128 = 200_000;

#[derive(Debug, Error)]
pub enum FullspaceError {
    #[error("state-space size {size} exceeds cap {cap}")]
    CapExceeded { size: u128, cap: u128 },
    #[error("invalid marked set: {0}")]
    BadMarkedSet(String),
    #[error("empty symmetry classes: {0}")]
    EmptyClass(String),
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error(transparent)]
    Subspace(#[from] SubspaceError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

// ---------------------------------------------------------------------------
// Subset ranking (combinatorial number system, lexicographic order)
// ---------------------------------------------------------------------------

/// Lexicographic rank of a sorted r-subset among all r-subsets of [0, n).
pub fn subset_rank(n: usize, subset: &[usize]) -> u128 {
    let r = subset.len();
    let mut rank: u128 = 0;
    let mut next = 0usize;
    for (i, &c) in subset.iter().enumerate() {
        for x in next..c {
            rank += binomial(n - 1 - x, r - 1 - i);
        }
        next = c + 1;
    }
    rank
}

/// Inverse of `subset_rank`: the sorted r-subset of [0, n) at the given rank.
pub fn subset_unrank(n: usize, r: usize, mut rank: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(r);
    let mut x = 0usize;
    for i in 0..r {
        loop {
            let block = binomial(n - 1 - x, r - 1 - i);
            if rank < block {
                out.push(x);
                x += 1;
                break;
            }
            rank -= block;
            x += 1;
        }
    }
    out
}

fn validate_subset(n: usize, set: &[usize], want_len: usize, name: &str) -> Result<(), FullspaceError> {
    if set.len() != want_len {
        return Err(FullspaceError::BadMarkedSet(format!(
            "{name} must have {want_len} elements, got {}",
            set.len()
        )));
    }
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != want_len {
        return Err(FullspaceError::BadMarkedSet(format!("{name} has repeats")));
    }
    if sorted.iter().any(|&x| x >= n) {
        return Err(FullspaceError::BadMarkedSet(format!(
            "{name} not contained in [0, {n})"
        )));
    }
    Ok(())
}

fn check_cap(size: u128) -> Result<(), FullspaceError> {
    if size > FULL_SPACE_CAP {
        return Err(FullspaceError::CapExceeded {
            size,
            cap: FULL_SPACE_CAP,
        });
    }
    Ok(())
}

/// Sorted r-subsets of [0, n) in lexicographic order.
fn all_subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    let count = binomial(n, r) as usize;
    let mut out = Vec::with_capacity(count);
    let mut cur: Vec<usize> = (0..r).collect();
    loop {
        out.push(cur.clone());
        // Advance to the lexicographic successor.
        let mut i = r;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - (r - i) {
                break;
            }
        }
        if cur[i] >= n - (r - i) {
            return out;
        }
        cur[i] += 1;
        for j in i + 1..r {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

fn intersect_count(sorted: &[usize], marked: &[usize]) -> usize {
    marked.iter().filter(|m| sorted.binary_search(m).is_ok()).count()
}

// ---------------------------------------------------------------------------
// Bases
// ---------------------------------------------------------------------------

/// Explicit basis of the vertex walk: pairs (R, y) with R an r-subset of [N]
/// and y outside R, ordered lexicographically.
#[derive(Debug, Clone)]
pub struct VertexWalkBasis {
    pub params: JohnsonParams,
    pub k_set: [usize; 2],
    states: Vec<(Vec<usize>, usize)>,
}

impl VertexWalkBasis {
    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, index: usize) -> (&[usize], usize) {
        let (r_set, y) = &self.states[index];
        (r_set, *y)
    }

    pub fn states(&self) -> impl Iterator<Item = (&[usize], usize)> {
        self.states.iter().map(|(r_set, y)| (r_set.as_slice(), *y))
    }

    /// Index of the state (R, y); R must be sorted and y outside R.
    pub fn index_of(&self, r_set: &[usize], y: usize) -> usize {
        let p = self.params;
        let u = p.n - p.r;
        let below = r_set.iter().filter(|&&e| e < y).count();
        let group = subset_rank(p.n, r_set) as usize;
        group * u + (y - below)
    }
}

/// Enumerates the vertex-walk basis over J(N, r) with a two-element marked
/// set K.
pub fn enumerate_vertex_basis(
    p: JohnsonParams,
    k_set: &[usize],
) -> Result<VertexWalkBasis, FullspaceError> {
    validate_subset(p.n, k_set, 2, "K")?;
    let size = binomial(p.n, p.r) * (p.n - p.r) as u128;
    check_cap(size)?;
    let mut states = Vec::with_capacity(size as usize);
    for r_set in all_subsets(p.n, p.r) {
        for y in 0..p.n {
            if r_set.binary_search(&y).is_err() {
                states.push((r_set.clone(), y));
            }
        }
    }
    let mut sorted_k = [k_set[0], k_set[1]];
    sorted_k.sort_unstable();
    Ok(VertexWalkBasis {
        params: p,
        k_set: sorted_k,
        states,
    })
}

/// Explicit basis of the edge walk: ordered pairs (R, R′) of r1-subsets of
/// [n] differing in exactly one element.
#[derive(Debug, Clone)]
pub struct EdgeWalkBasis {
    pub n: usize,
    pub r1: usize,
    pub t_set: [usize; 3],
    states: Vec<(Vec<usize>, Vec<usize>)>,
}

impl EdgeWalkBasis {
    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, index: usize) -> (&[usize], &[usize]) {
        let (a, b) = &self.states[index];
        (a, b)
    }

    /// Index of the pair (R, R′); both sorted, |R ∩ R′| = r1 − 1.
    pub fn index_of(&self, r_set: &[usize], r_next: &[usize]) -> usize {
        let u = self.n - self.r1;
        // v is the element leaving R, w the one entering.
        let v = *r_set
            .iter()
            .find(|e| r_next.binary_search(e).is_err())
            .expect("adjacent subsets differ");
        let w = *r_next
            .iter()
            .find(|e| r_set.binary_search(e).is_err())
            .expect("adjacent subsets differ");
        let pos_v = r_set.iter().position(|&e| e == v).expect("member");
        let below = r_set.iter().filter(|&&e| e < w).count();
        let group = subset_rank(self.n, r_set) as usize;
        (group * self.r1 + pos_v) * u + (w - below)
    }
}

/// Enumerates the edge-walk basis over J(n, r1) with a three-element marked
/// set T.
pub fn enumerate_edge_basis(
    n: usize,
    r1: usize,
    t_set: &[usize],
) -> Result<EdgeWalkBasis, FullspaceError> {
    if r1 < 1 || r1 + 1 > n {
        return Err(FullspaceError::BadMarkedSet(format!(
            "need 1 <= r1 <= n-1, got n={n} r1={r1}"
        )));
    }
    validate_subset(n, t_set, 3, "T")?;
    let size = binomial(n, r1) * (r1 as u128) * (n - r1) as u128;
    check_cap(size)?;
    let mut states = Vec::with_capacity(size as usize);
    for r_set in all_subsets(n, r1) {
        for pos_v in 0..r1 {
            let v = r_set[pos_v];
            for w in 0..n {
                if r_set.binary_search(&w).is_err() {
                    let mut next: Vec<usize> =
                        r_set.iter().copied().filter(|&e| e != v).collect();
                    next.push(w);
                    next.sort_unstable();
                    states.push((r_set.clone(), next));
                }
            }
        }
    }
    let mut sorted_t = [t_set[0], t_set[1], t_set[2]];
    sorted_t.sort_unstable();
    Ok(EdgeWalkBasis {
        n,
        r1,
        t_set: sorted_t,
        states,
    })
}

/// One factor of the layer-4 product space: pairs (C, z) with C an m-subset
/// of [r] and z outside C, marked element s.
#[derive(Debug, Clone)]
struct FactorBasis {
    r: usize,
    s: usize,
    states: Vec<(Vec<usize>, usize)>,
}

impl FactorBasis {
    fn new(r: usize, m: usize, s: usize) -> Result<FactorBasis, FullspaceError> {
        validate_subset(r, &[s], 1, "marked element")?;
        let mut states = Vec::new();
        for c_set in all_subsets(r, m) {
            for z in 0..r {
                if c_set.binary_search(&z).is_err() {
                    states.push((c_set.clone(), z));
                }
            }
        }
        Ok(FactorBasis { r, s, states })
    }

    fn dim(&self) -> usize {
        self.states.len()
    }

    /// Class pair (s ∈ C, s ∈ C + z) of a factor state.
    fn class(&self, index: usize) -> (usize, usize) {
        let (c_set, z) = &self.states[index];
        let j = usize::from(c_set.binary_search(&self.s).is_ok());
        let k = usize::from(j == 1 || *z == self.s);
        (j, k)
    }

    fn union_rank(&self, index: usize) -> usize {
        let (c_set, z) = &self.states[index];
        let mut t_set = c_set.clone();
        t_set.push(*z);
        t_set.sort_unstable();
        subset_rank(self.r, &t_set) as usize
    }

    fn c_rank(&self, index: usize) -> usize {
        subset_rank(self.r, &self.states[index].0) as usize
    }
}

/// Explicit basis of the layer-4 product walk J(r1, m) × J(r2, m): one
/// (C_i, z_i) pair per factor, with one marked element per factor.
#[derive(Debug, Clone)]
pub struct ProductWalkBasis {
    pub r1: usize,
    pub r2: usize,
    pub m: usize,
    pub marked: (usize, usize),
    f1: FactorBasis,
    f2: FactorBasis,
}

impl ProductWalkBasis {
    pub fn dim(&self) -> usize {
        self.f1.dim() * self.f2.dim()
    }

    fn split(&self, index: usize) -> (usize, usize) {
        (index / self.f2.dim(), index % self.f2.dim())
    }
}

/// Enumerates the layer-4 product basis with marked elements s1, s2.
pub fn enumerate_product_basis(
    r1: usize,
    r2: usize,
    m: usize,
    s1: usize,
    s2: usize,
) -> Result<ProductWalkBasis, FullspaceError> {
    if m < 1 || m + 1 > r1.min(r2) {
        return Err(FullspaceError::BadMarkedSet(format!(
            "need 1 <= m <= min(r1,r2)-1, got r1={r1} r2={r2} m={m}"
        )));
    }
    let d1 = binomial(r1, m) * (r1 - m) as u128;
    let d2 = binomial(r2, m) * (r2 - m) as u128;
    check_cap(d1 * d2)?;
    Ok(ProductWalkBasis {
        r1,
        r2,
        m,
        marked: (s1, s2),
        f1: FactorBasis::new(r1, m, s1)?,
        f2: FactorBasis::new(r2, m, s2)?,
    })
}

// ---------------------------------------------------------------------------
// Step operators in factored form
// ---------------------------------------------------------------------------

/// A partition of the basis into groups, each carrying the uniform unit
/// vector over its members. The span of those vectors is the column space of
/// the corresponding projector.
#[derive(Debug, Clone)]
struct UniformBlocks {
    group_of: Vec<u32>,
    inv_sqrt_size: Vec<f64>,
}

impl UniformBlocks {
    fn new(group_of: Vec<u32>, num_groups: usize) -> UniformBlocks {
        let mut sizes = vec![0u32; num_groups];
        for &g in &group_of {
            sizes[g as usize] += 1;
        }
        let inv_sqrt_size = sizes
            .iter()
            .map(|&s| {
                debug_assert!(s > 0, "uniform block with no members");
                1.0 / (s as f64).sqrt()
            })
            .collect();
        UniformBlocks {
            group_of,
            inv_sqrt_size,
        }
    }

    /// Overlaps ⟨u_g | v⟩ for every group g.
    fn overlaps(&self, v: &StateVector) -> Vec<C64> {
        let mut acc = vec![C64::new(0.0, 0.0); self.inv_sqrt_size.len()];
        for (i, &g) in self.group_of.iter().enumerate() {
            acc[g as usize] += v.component(i);
        }
        for (g, a) in acc.iter_mut().enumerate() {
            *a *= self.inv_sqrt_size[g];
        }
        acc
    }
}

#[derive(Debug, Clone)]
enum FullStage {
    /// I − (1 − e^{iθ}) P with P the uniform-block projector.
    Reflection { blocks: UniformBlocks, theta: f64 },
    /// 2P − I (Grover diffusion on each block).
    GroverCoin { blocks: UniformBlocks },
    /// e_k → e_{map[k]}.
    Permutation { map: Vec<usize> },
}

/// A full-space walk step, stored as a product of structured stages and
/// applied stage by stage in O(dim) time.
#[derive(Debug, Clone)]
pub struct FullStep {
    dim: usize,
    stages: Vec<FullStage>,
}

impl FullStep {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Applies the step (stages in order) to a state.
    pub fn apply(&self, v: &StateVector) -> Result<StateVector, FullspaceError> {
        if v.dim() != self.dim {
            return Err(FullspaceError::DimMismatch(format!(
                "state dim {} vs operator dim {}",
                v.dim(),
                self.dim
            )));
        }
        let mut cur = v.clone();
        for stage in &self.stages {
            match stage {
                FullStage::Reflection { blocks, theta } => {
                    let coeff = C64::from_polar(1.0, *theta) - C64::new(1.0, 0.0);
                    let over = blocks.overlaps(&cur);
                    for (i, &g) in blocks.group_of.iter().enumerate() {
                        let g = g as usize;
                        let add = coeff * over[g] * blocks.inv_sqrt_size[g];
                        let val = cur.component(i) + add;
                        cur.set(i, val);
                    }
                }
                FullStage::GroverCoin { blocks } => {
                    let over = blocks.overlaps(&cur);
                    for (i, &g) in blocks.group_of.iter().enumerate() {
                        let g = g as usize;
                        let val = 2.0 * over[g] * blocks.inv_sqrt_size[g] - cur.component(i);
                        cur.set(i, val);
                    }
                }
                FullStage::Permutation { map } => {
                    let mut next = StateVector::zeros(self.dim);
                    for (i, &target) in map.iter().enumerate() {
                        next.set(target, cur.component(i));
                    }
                    cur = next;
                }
            }
        }
        Ok(cur)
    }

    /// Dense matrix of the step; intended for small dimensions only.
    pub fn to_dense(&self) -> Result<SquareMatrix, FullspaceError> {
        let mut out = SquareMatrix::zeros(self.dim);
        for j in 0..self.dim {
            let col = self.apply(&StateVector::basis_state(self.dim, j))?;
            for i in 0..self.dim {
                out.set(i, j, col.component(i));
            }
        }
        Ok(out)
    }
}

/// The vertex-walk step U = U_B(θ₂) U_A(θ₁). U_A reflects through the
/// per-R uniform superpositions over y; U_B through the per-union
/// superpositions (1/√(r+1)) Σ_{y′ ∈ T} |T − y′, y′⟩.
pub fn full_vertex_step(b: &VertexWalkBasis, theta1: f64, theta2: f64) -> FullStep {
    let p = b.params;
    let dim = b.dim();
    let u = p.n - p.r;
    let a_groups: Vec<u32> = (0..dim).map(|i| (i / u) as u32).collect();
    let num_a = dim / u;
    let mut b_groups = Vec::with_capacity(dim);
    for (r_set, y) in b.states() {
        let mut t_set = r_set.to_vec();
        t_set.push(y);
        t_set.sort_unstable();
        b_groups.push(subset_rank(p.n, &t_set) as u32);
    }
    let num_b = binomial(p.n, p.r + 1) as usize;
    FullStep {
        dim,
        stages: vec![
            FullStage::Reflection {
                blocks: UniformBlocks::new(a_groups, num_a),
                theta: theta1,
            },
            FullStage::Reflection {
                blocks: UniformBlocks::new(b_groups, num_b),
                theta: theta2,
            },
        ],
    }
}

fn edge_coin_blocks(b: &EdgeWalkBasis) -> UniformBlocks {
    let fiber = b.r1 * (b.n - b.r1);
    let group_of: Vec<u32> = (0..b.dim()).map(|i| (i / fiber) as u32).collect();
    let num = b.dim() / fiber;
    UniformBlocks::new(group_of, num)
}

fn edge_swap_map(b: &EdgeWalkBasis) -> Vec<usize> {
    (0..b.dim())
        .map(|i| {
            let (r_set, r_next) = b.state(i);
            b.index_of(r_next, r_set)
        })
        .collect()
}

/// The coin alone: Grover diffusion 2P − I over the neighbors of each R.
pub fn full_edge_coin(b: &EdgeWalkBasis) -> FullStep {
    FullStep {
        dim: b.dim(),
        stages: vec![FullStage::GroverCoin {
            blocks: edge_coin_blocks(b),
        }],
    }
}

/// The swap alone: (R, R′) → (R′, R).
pub fn full_edge_swap(b: &EdgeWalkBasis) -> FullStep {
    FullStep {
        dim: b.dim(),
        stages: vec![FullStage::Permutation {
            map: edge_swap_map(b),
        }],
    }
}

/// The edge-walk step Swap · Coin.
pub fn full_edge_step(b: &EdgeWalkBasis) -> FullStep {
    FullStep {
        dim: b.dim(),
        stages: vec![
            FullStage::GroverCoin {
                blocks: edge_coin_blocks(b),
            },
            FullStage::Permutation {
                map: edge_swap_map(b),
            },
        ],
    }
}

/// The layer-4 product step U = U_B(θ₂) U_A(θ₁), where the A and B
/// projectors are tensor products of the per-factor ones.
pub fn full_product_step(b: &ProductWalkBasis, theta1: f64, theta2: f64) -> FullStep {
    let dim = b.dim();
    let nc2 = binomial(b.r2, b.m) as usize;
    let nt2 = binomial(b.r2, b.m + 1) as usize;
    let mut a_groups = Vec::with_capacity(dim);
    let mut b_groups = Vec::with_capacity(dim);
    for i in 0..dim {
        let (i1, i2) = b.split(i);
        a_groups.push((b.f1.c_rank(i1) * nc2 + b.f2.c_rank(i2)) as u32);
        b_groups.push((b.f1.union_rank(i1) * nt2 + b.f2.union_rank(i2)) as u32);
    }
    let num_a = binomial(b.r1, b.m) as usize * nc2;
    let num_b = binomial(b.r1, b.m + 1) as usize * nt2;
    FullStep {
        dim,
        stages: vec![
            FullStage::Reflection {
                blocks: UniformBlocks::new(a_groups, num_a),
                theta: theta1,
            },
            FullStage::Reflection {
                blocks: UniformBlocks::new(b_groups, num_b),
                theta: theta2,
            },
        ],
    }
}

// ---------------------------------------------------------------------------
// Class projectors
// ---------------------------------------------------------------------------

/// Row-orthonormal compression onto symmetry classes: one uniform row per
/// class, ordered to match the reduced bases.
#[derive(Debug, Clone)]
pub struct ClassProjector {
    labels: Vec<String>,
    class_of: Vec<u32>,
    inv_sqrt_size: Vec<f64>,
}

impl ClassProjector {
    fn build(
        labels: Vec<String>,
        class_of: Vec<u32>,
    ) -> Result<ClassProjector, FullspaceError> {
        let mut sizes = vec![0u64; labels.len()];
        for &c in &class_of {
            sizes[c as usize] += 1;
        }
        let empty: Vec<&String> = labels
            .iter()
            .zip(&sizes)
            .filter(|(_, &s)| s == 0)
            .map(|(l, _)| l)
            .collect();
        if !empty.is_empty() {
            let list = empty
                .iter()
                .map(|s| s.as_str())
                .collect::<Vec<_>>()
                .join("; ");
            return Err(FullspaceError::EmptyClass(list));
        }
        let inv_sqrt_size = sizes.iter().map(|&s| 1.0 / (s as f64).sqrt()).collect();
        Ok(ClassProjector {
            labels,
            class_of,
            inv_sqrt_size,
        })
    }

    pub fn rows(&self) -> usize {
        self.labels.len()
    }

    pub fn cols(&self) -> usize {
        self.class_of.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// P v: compresses a full state to class coordinates.
    pub fn project(&self, full: &StateVector) -> Result<StateVector, FullspaceError> {
        if full.dim() != self.cols() {
            return Err(FullspaceError::DimMismatch(format!(
                "state dim {} vs projector cols {}",
                full.dim(),
                self.cols()
            )));
        }
        let mut acc = StateVector::zeros(self.rows());
        for (i, &c) in self.class_of.iter().enumerate() {
            let c = c as usize;
            let val = acc.component(c) + full.component(i);
            acc.set(c, val);
        }
        for c in 0..self.rows() {
            let val = acc.component(c) * self.inv_sqrt_size[c];
            acc.set(c, val);
        }
        Ok(acc)
    }

    /// P† w: lifts class coordinates to the uniform full-space state.
    pub fn lift(&self, reduced: &StateVector) -> Result<StateVector, FullspaceError> {
        if reduced.dim() != self.rows() {
            return Err(FullspaceError::DimMismatch(format!(
                "state dim {} vs projector rows {}",
                reduced.dim(),
                self.rows()
            )));
        }
        let mut out = StateVector::zeros(self.cols());
        for (i, &c) in self.class_of.iter().enumerate() {
            let c = c as usize;
            out.set(i, reduced.component(c) * self.inv_sqrt_size[c]);
        }
        Ok(out)
    }

    /// Largest deviation of P P† from the identity.
    pub fn row_orthonormality_error(&self) -> f64 {
        let rows = self.rows();
        let mut gram = vec![C64::new(0.0, 0.0); rows * rows];
        for &c in &self.class_of {
            let c = c as usize;
            let w = self.inv_sqrt_size[c] * self.inv_sqrt_size[c];
            gram[c * rows + c] += C64::new(w, 0.0);
        }
        let mut worst = 0.0_f64;
        for a in 0..rows {
            for bb in 0..rows {
                let want = if a == bb { 1.0 } else { 0.0 };
                worst = worst.max((gram[a * rows + bb] - C64::new(want, 0.0)).norm());
            }
        }
        worst
    }
}

/// Projector onto the five (|R ∩ K|, |y ∩ K|) classes of the vertex walk.
pub fn vertex_class_projector(b: &VertexWalkBasis) -> Result<ClassProjector, FullspaceError> {
    let labels = VERTEX5_CLASSES
        .iter()
        .map(|&(j, l)| format!("{j},{l}"))
        .collect();
    let class_of = b
        .states()
        .map(|(r_set, y)| {
            let j = intersect_count(r_set, &b.k_set);
            let l = usize::from(b.k_set.contains(&y));
            VERTEX5_CLASSES
                .iter()
                .position(|&c| c == (j, l))
                .expect("vertex class") as u32
        })
        .collect();
    ClassProjector::build(labels, class_of)
}

/// Projector onto the ten (|R ∩ T|, |R′ ∩ T|) classes of the edge walk.
pub fn edge_class_projector(b: &EdgeWalkBasis) -> Result<ClassProjector, FullspaceError> {
    let labels = LAYER1_CLASSES
        .iter()
        .map(|&(j, l)| format!("{j},{l}"))
        .collect();
    let class_of = (0..b.dim())
        .map(|i| {
            let (r_set, r_next) = b.state(i);
            let j = intersect_count(r_set, &b.t_set);
            let l = intersect_count(r_next, &b.t_set);
            LAYER1_CLASSES
                .iter()
                .position(|&c| c == (j, l))
                .expect("edge class") as u32
        })
        .collect();
    ClassProjector::build(labels, class_of)
}

/// Projector onto the nine product classes of the layer-4 walk, indexed by
/// the per-factor pairs (s_i ∈ C_i, s_i ∈ C_i + z_i).
pub fn product_class_projector(b: &ProductWalkBasis) -> Result<ClassProjector, FullspaceError> {
    let labels = LAYER4_CLASSES
        .iter()
        .map(|&((j1, j2), (k1, k2))| format!("({j1},{j2})-({k1},{k2})"))
        .collect();
    let class_of = (0..b.dim())
        .map(|i| {
            let (i1, i2) = b.split(i);
            let (j1, k1) = b.f1.class(i1);
            let (j2, k2) = b.f2.class(i2);
            LAYER4_CLASSES
                .iter()
                .position(|&c| c == ((j1, j2), (k1, k2)))
                .expect("product class") as u32
        })
        .collect();
    ClassProjector::build(labels, class_of)
}

// ---------------------------------------------------------------------------
// Reduction checks
// ---------------------------------------------------------------------------

/// Outcome of comparing a projected full step against a reduced matrix.
#[derive(Debug, Clone, Copy)]
pub struct ReductionReport {
    /// Largest entrywise deviation of P · full · P† from the reduced matrix.
    pub maxdev: f64,
    /// Largest entry of (I − P†P) · full · P†, the mass leaking out of the
    /// class span.
    pub leakage: f64,
    pub pass: bool,
}

/// Compares P · full · P† with the reduced step and measures leakage out of
/// the invariant span.
pub fn verify_reduction(
    full: &FullStep,
    proj: &ClassProjector,
    reduced: &SquareMatrix,
    tol: f64,
) -> Result<ReductionReport, FullspaceError> {
    if proj.cols() != full.dim() || proj.rows() != reduced.dim() {
        return Err(FullspaceError::DimMismatch(format!(
            "projector {}x{} vs full dim {} and reduced dim {}",
            proj.rows(),
            proj.cols(),
            full.dim(),
            reduced.dim()
        )));
    }
    let rows = proj.rows();
    let mut maxdev = 0.0_f64;
    let mut leakage = 0.0_f64;
    for c in 0..rows {
        let lifted = proj.lift(&StateVector::basis_state(rows, c))?;
        let moved = full.apply(&lifted)?;
        let compressed = proj.project(&moved)?;
        for k in 0..rows {
            maxdev = maxdev.max((compressed.component(k) - reduced.at(k, c)).norm());
        }
        let mut back = proj.lift(&compressed)?;
        back.add_scaled(C64::new(-1.0, 0.0), &moved);
        for i in 0..back.dim() {
            leakage = leakage.max(back.component(i).norm());
        }
    }
    Ok(ReductionReport {
        maxdev,
        leakage,
        pass: maxdev <= tol && leakage <= tol,
    })
}

/// The compressed step P · full · P† as an explicit matrix.
pub fn project_step(
    full: &FullStep,
    proj: &ClassProjector,
) -> Result<SquareMatrix, FullspaceError> {
    if proj.cols() != full.dim() {
        return Err(FullspaceError::DimMismatch(format!(
            "projector cols {} vs full dim {}",
            proj.cols(),
            full.dim()
        )));
    }
    let rows = proj.rows();
    let mut out = SquareMatrix::zeros(rows);
    for c in 0..rows {
        let lifted = proj.lift(&StateVector::basis_state(rows, c))?;
        let compressed = proj.project(&full.apply(&lifted)?)?;
        for k in 0..rows {
            out.set(k, c, compressed.component(k));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspaces::{
        build_layer1_10d, build_layer4_9d, build_vertexwalk_5d, edgewalk_step, marked_fraction,
        vertexwalk_step, MarkedClass,
    };
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(n: usize, r: usize) -> JohnsonParams {
        JohnsonParams::new(n, r).unwrap()
    }

    fn random_state(dim: usize, seed: u64) -> StateVector {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let comps: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let v = StateVector::from_components(comps);
        v.scaled(C64::new(1.0 / v.norm(), 0.0))
    }

    #[test]
    fn vertex_basis_counts() {
        let b = enumerate_vertex_basis(params(5, 2), &[0, 1]).unwrap();
        assert_eq!(b.dim(), 30);
        let b = enumerate_vertex_basis(params(4, 1), &[0, 1]).unwrap();
        assert_eq!(b.dim(), 12);
    }

    #[test]
    fn vertex_basis_rejects_bad_k() {
        assert!(enumerate_vertex_basis(params(5, 2), &[0, 5]).is_err());
        assert!(enumerate_vertex_basis(params(5, 2), &[3, 3]).is_err());
        assert!(enumerate_vertex_basis(params(5, 2), &[0, 1, 2]).is_err());
    }

    #[test]
    fn vertex_basis_cap() {
        match enumerate_vertex_basis(params(40, 10), &[0, 1]) {
            Err(FullspaceError::CapExceeded { size, cap }) => {
                assert_eq!(cap, FULL_SPACE_CAP);
                assert!(size > cap);
            }
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn vertex_basis_sorted_and_indexed() {
        let b = enumerate_vertex_basis(params(6, 3), &[0, 1]).unwrap();
        assert_eq!(b.dim(), 60);
        let mut seen: Vec<(Vec<usize>, usize)> = Vec::new();
        for (i, (r_set, y)) in b.states().enumerate() {
            assert!(r_set.windows(2).all(|w| w[0] < w[1]));
            assert!(r_set.binary_search(&y).is_err());
            assert_eq!(b.index_of(r_set, y), i);
            seen.push((r_set.to_vec(), y));
        }
        let mut sorted = seen.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(seen, sorted);
    }

    #[test]
    fn subset_rank_roundtrip_6_3() {
        for rank in 0..binomial(6, 3) {
            let s = subset_unrank(6, 3, rank);
            assert_eq!(subset_rank(6, &s), rank);
        }
        assert_eq!(subset_rank(6, &[0, 1, 2]), 0);
        assert_eq!(subset_rank(6, &[3, 4, 5]), binomial(6, 3) - 1);
    }

    #[test]
    fn vertex_step_at_zero_is_identity() {
        let b = enumerate_vertex_basis(params(5, 2), &[0, 1]).unwrap();
        let dense = full_vertex_step(&b, 0.0, 0.0).to_dense().unwrap();
        assert!(dense.max_abs_diff(&SquareMatrix::identity(30)) < 1e-14);
    }

    #[test]
    fn vertex_step_unitary_6_2() {
        let b = enumerate_vertex_basis(params(6, 2), &[0, 1]).unwrap();
        assert_eq!(b.dim(), 60);
        let dense = full_vertex_step(&b, 1.1, 0.7).to_dense().unwrap();
        assert!(dense.unitarity_error() < 1e-12);
    }

    #[test]
    fn vertex_step_commutes_with_relabelings() {
        let b = enumerate_vertex_basis(params(5, 2), &[0, 1]).unwrap();
        let dense = full_vertex_step(&b, 0.9, 1.7).to_dense().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            // A permutation of [N] fixing K pointwise-free on K's complement.
            let mut tail: Vec<usize> = vec![2, 3, 4];
            tail.shuffle(&mut rng);
            let mut perm = vec![0, 1];
            perm.extend(tail);
            let mut pmat = SquareMatrix::zeros(b.dim());
            for i in 0..b.dim() {
                let (r_set, y) = b.state(i);
                let mut pr: Vec<usize> = r_set.iter().map(|&e| perm[e]).collect();
                pr.sort_unstable();
                pmat.set(b.index_of(&pr, perm[y]), i, C64::new(1.0, 0.0));
            }
            let left = pmat.mul(&dense).unwrap();
            let right = dense.mul(&pmat).unwrap();
            assert!(left.max_abs_diff(&right) < 1e-12);
        }
    }

    #[test]
    fn vertex_reduction_6_2() {
        let p = params(6, 2);
        let b = enumerate_vertex_basis(p, &[0, 1]).unwrap();
        let proj = vertex_class_projector(&b).unwrap();
        assert!(proj.row_orthonormality_error() < 1e-12);
        let walk = build_vertexwalk_5d(p, MarkedClass::new(2, 0).unwrap()).unwrap();
        let reduced = vertexwalk_step(&walk, 1.1, 0.7).unwrap();
        let full = full_vertex_step(&b, 1.1, 0.7);
        let report = verify_reduction(&full, &proj, &reduced, 1e-10).unwrap();
        assert!(report.pass, "maxdev {} leakage {}", report.maxdev, report.leakage);
        let psi0 = proj.project(&StateVector::uniform(b.dim())).unwrap();
        assert!(psi0.max_abs_diff(&walk.psi0) < 1e-12);
    }

    #[test]
    fn vertex_reduction_7_3_with_moved_k() {
        let p = params(7, 3);
        let b = enumerate_vertex_basis(p, &[2, 5]).unwrap();
        let proj = vertex_class_projector(&b).unwrap();
        let walk = build_vertexwalk_5d(p, MarkedClass::new(2, 0).unwrap()).unwrap();
        for (t1, t2) in [(0.4, 2.6), (std::f64::consts::PI, 0.0)] {
            let reduced = vertexwalk_step(&walk, t1, t2).unwrap();
            let full = full_vertex_step(&b, t1, t2);
            let report = verify_reduction(&full, &proj, &reduced, 1e-10).unwrap();
            assert!(report.pass, "θ=({t1},{t2}): maxdev {}", report.maxdev);
        }
    }

    #[test]
    fn projected_step_feeds_back_exactly() {
        let b = enumerate_vertex_basis(params(6, 2), &[0, 1]).unwrap();
        let proj = vertex_class_projector(&b).unwrap();
        let full = full_vertex_step(&b, 0.31, 2.9);
        let fed = project_step(&full, &proj).unwrap();
        let report = verify_reduction(&full, &proj, &fed, 1e-10).unwrap();
        assert_eq!(report.maxdev, 0.0);
    }

    #[test]
    fn edge_basis_and_unitarity_6_2() {
        let b = enumerate_edge_basis(6, 2, &[0, 1, 2]).unwrap();
        assert_eq!(b.dim(), 120);
        let dense = full_edge_step(&b).to_dense().unwrap();
        assert!(dense.unitarity_error() < 1e-12);
    }

    #[test]
    fn edge_coin_and_swap_are_involutions() {
        let b = enumerate_edge_basis(9, 4, &[0, 1, 2]).unwrap();
        assert_eq!(b.dim(), 2520);
        let v = random_state(b.dim(), 11);
        let coin = full_edge_coin(&b);
        let twice = coin.apply(&coin.apply(&v).unwrap()).unwrap();
        assert!(twice.max_abs_diff(&v) < 1e-12);
        let swap = full_edge_swap(&b);
        let twice = swap.apply(&swap.apply(&v).unwrap()).unwrap();
        assert!(twice.max_abs_diff(&v) < 1e-12);
    }

    #[test]
    fn edge_reduction_9_4() {
        let b = enumerate_edge_basis(9, 4, &[0, 1, 2]).unwrap();
        let proj = edge_class_projector(&b).unwrap();
        assert!(proj.row_orthonormality_error() < 1e-12);
        let walk = build_layer1_10d(9, 4).unwrap();
        let reduced = edgewalk_step(&walk).unwrap();
        let full = full_edge_step(&b);
        let report = verify_reduction(&full, &proj, &reduced, 1e-10).unwrap();
        assert!(report.pass, "maxdev {} leakage {}", report.maxdev, report.leakage);
        let psi0 = proj.project(&StateVector::uniform(b.dim())).unwrap();
        assert!(psi0.max_abs_diff(&walk.psi0) < 1e-12);
    }

    #[test]
    fn edge_classes_empty_at_7_2() {
        let b = enumerate_edge_basis(7, 2, &[0, 1, 2]).unwrap();
        match edge_class_projector(&b) {
            Err(FullspaceError::EmptyClass(which)) => {
                assert!(which.contains("2,3"));
                assert!(which.contains("3,3"));
            }
            other => panic!("expected empty-class error, got {other:?}"),
        }
    }

    #[test]
    fn product_reduction_5_5_2() {
        let b = enumerate_product_basis(5, 5, 2, 0, 0).unwrap();
        assert_eq!(b.dim(), 900);
        let proj = product_class_projector(&b).unwrap();
        assert!(proj.row_orthonormality_error() < 1e-12);
        let walk = build_layer4_9d(5, 5, 2).unwrap();
        let reduced = vertexwalk_step(&walk, 1.3, 0.4).unwrap();
        let full = full_product_step(&b, 1.3, 0.4);
        let report = verify_reduction(&full, &proj, &reduced, 1e-10).unwrap();
        assert!(report.pass, "maxdev {} leakage {}", report.maxdev, report.leakage);
        let psi0 = proj.project(&StateVector::uniform(b.dim())).unwrap();
        assert!(psi0.max_abs_diff(&walk.psi0) < 1e-12);
        let target = psi0.component(walk.target_index).norm_sqr();
        assert!((target - marked_fraction(&walk)).abs() < 1e-12);
        assert!((target - 4.0 / 25.0).abs() < 1e-12);
    }

    #[test]
    fn product_reduction_6_5_2() {
        let b = enumerate_product_basis(6, 5, 2, 1, 3).unwrap();
        assert_eq!(b.dim(), 1800);
        let proj = product_class_projector(&b).unwrap();
        let walk = build_layer4_9d(6, 5, 2).unwrap();
        let reduced = vertexwalk_step(&walk, 0.9, 2.1).unwrap();
        let full = full_product_step(&b, 0.9, 2.1);
        let report = verify_reduction(&full, &proj, &reduced, 1e-10).unwrap();
        assert!(report.pass, "maxdev {} leakage {}", report.maxdev, report.leakage);
        let psi0 = proj.project(&StateVector::uniform(b.dim())).unwrap();
        assert!(psi0.max_abs_diff(&walk.psi0) < 1e-12);
    }

    #[test]
    fn product_step_unitary_900() {
        let b = enumerate_product_basis(5, 5, 2, 0, 0).unwrap();
        let dense = full_product_step(&b, 2.3, 1.9).to_dense().unwrap();
        assert!(dense.unitarity_error() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn subset_rank_roundtrip(n in 3usize..12, sel in prop::collection::vec(any::<u16>(), 1..6)) {
            let r = sel.len().min(n - 1);
            // Derive a subset from the raw picks deterministically.
            let mut set: Vec<usize> = Vec::new();
            let mut avail: Vec<usize> = (0..n).collect();
            for &raw in sel.iter().take(r) {
                let idx = raw as usize % avail.len();
                set.push(avail.remove(idx));
            }
            set.sort_unstable();
            let rank = subset_rank(n, &set);
            prop_assert_eq!(subset_unrank(n, set.len(), rank), set);
        }

        #[test]
        fn vertex_step_norm_preserving(t1 in 0.0..std::f64::consts::TAU, t2 in 0.0..std::f64::consts::TAU, seed in 0u64..1000) {
            let b = enumerate_vertex_basis(JohnsonParams::new(6, 2).unwrap(), &[0, 1]).unwrap();
            let full = full_vertex_step(&b, t1, t2);
            let v = random_state(b.dim(), seed);
            let w = full.apply(&v).unwrap();
            prop_assert!((w.norm() - 1.0).abs() < 1e-12);
        }
    }
}
