//! Normalized second eigenvalues of bipartite incidence graphs, distance
//! averaging operators, and exact rational walk decompositions.
//!
//! The central object is the two-step walk on the left side: pick a uniform
//! incident wall, then a uniform vertex of that wall. Its transition matrix is
//! row-stochastic and reversible with respect to the degree distribution, and
//! the normalized second eigenvalue of the bipartite graph is the square root
//! of its second eigenvalue on mean-zero functions.

use nalgebra::{DMatrix, DVector};
use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bipartite::{BipartiteError, BipartiteGraph};
use crate::exec::map_indexed;
use crate::numeric::Rat;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_ITERATIONS: usize = 100_000;
/// Rational matrix powering is refused above this many left vertices.
pub const DEFAULT_RATIONAL_CAP: usize = 500;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpectralError {
    #[error("graph has no left vertices")]
    Empty,
    #[error("left vertex {0} has no incident walls; the two-step walk is undefined")]
    ZeroDegreeLeft(u32),
    #[error("graph is not connected on the left side")]
    NotConnected,
    #[error("power iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("rational mode refused: {left} left vertices exceed cap {cap}")]
    CapExceeded { left: usize, cap: usize },
    #[error("half-length n must be at least 1")]
    BadWalkLength,
    #[error(transparent)]
    Graph(#[from] BipartiteError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaMode {
    ExactDense,
    Iterative,
}

#[derive(Debug, Clone, Copy)]
pub struct LambdaOptions {
    pub mode: LambdaMode,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for LambdaOptions {
    fn default() -> Self {
        LambdaOptions {
            mode: LambdaMode::ExactDense,
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            seed: 0,
        }
    }
}

impl LambdaOptions {
    pub fn dense() -> Self {
        Self::default()
    }

    pub fn iterative(seed: u64) -> Self {
        LambdaOptions {
            mode: LambdaMode::Iterative,
            seed,
            ..Self::default()
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }
}

#[derive(Debug, Clone)]
pub struct LambdaResult {
    /// Normalized second largest eigenvalue in `[0, 1]`; the maximum over
    /// left components when the graph is disconnected.
    pub value: f64,
    pub per_component: Vec<f64>,
    pub connected: bool,
    /// Power-iteration steps spent (iterative mode only; summed over
    /// components).
    pub iterations: Option<usize>,
    /// True when the value 0 was certified exactly (complete-bipartite
    /// components), not read off a numerical eigensolve.
    pub exact_zero: bool,
}

/// Normalized second largest eigenvalue of the graph's adjacency operator,
/// computed as sqrt of the second eigenvalue of the symmetrized two-step
/// operator. Disconnected inputs are handled per component and flagged.
pub fn lambda_tilde(
    g: &BipartiteGraph,
    opts: &LambdaOptions,
) -> Result<LambdaResult, SpectralError> {
    if g.left_len() == 0 {
        return Err(SpectralError::Empty);
    }
    let components = g.left_components();
    let connected = components.len() <= 1;
    let mut per_component = Vec::with_capacity(components.len());
    let mut total_iterations = 0usize;
    let mut used_iterations = false;
    let mut exact_zero = true;
    for (ci, comp) in components.iter().enumerate() {
        let rights = component_rights(g, comp);
        if component_is_complete(g, comp, rights.len()) {
            per_component.push(0.0);
            continue;
        }
        exact_zero = false;
        let s = symmetric_two_step(g, comp, &rights);
        let lam2 = match opts.mode {
            LambdaMode::ExactDense => dense_second_eigenvalue(&s),
            LambdaMode::Iterative => {
                let (lam2, iters) = power_iteration_second(
                    &s,
                    g,
                    comp,
                    opts.tolerance,
                    opts.max_iterations,
                    opts.seed,
                    ci as u64,
                )?;
                total_iterations += iters;
                used_iterations = true;
                lam2
            }
        };
        per_component.push(lam2.clamp(0.0, 1.0).sqrt());
    }
    let value = per_component.iter().cloned().fold(0.0f64, f64::max);
    Ok(LambdaResult {
        value,
        per_component,
        connected,
        iterations: used_iterations.then_some(total_iterations),
        exact_zero: exact_zero && value == 0.0,
    })
}

fn component_rights(g: &BipartiteGraph, comp: &[u32]) -> Vec<u32> {
    let mut rights: Vec<u32> = comp
        .iter()
        .flat_map(|&u| g.left_neighbors(u).iter().copied())
        .collect();
    rights.sort_unstable();
    rights.dedup();
    rights
}

fn component_is_complete(g: &BipartiteGraph, comp: &[u32], right_count: usize) -> bool {
    comp.iter().all(|&u| g.left_degree(u) == right_count)
}

/// S = D_V^{-1/2} N D_W^{-1} N^t D_V^{-1/2} on the given component; similar to
/// the two-step transition matrix, symmetric positive semidefinite, top
/// eigenvalue 1 with eigenvector proportional to sqrt(degree).
fn symmetric_two_step(g: &BipartiteGraph, comp: &[u32], rights: &[u32]) -> DMatrix<f64> {
    let n = comp.len();
    let pos_of: std::collections::HashMap<u32, usize> =
        comp.iter().enumerate().map(|(p, &u)| (u, p)).collect();
    let _ = rights;
    let rows: Vec<Vec<f64>> = map_indexed(n, |i| {
        let u = comp[i];
        let mut row = vec![0.0f64; n];
        let du = g.left_degree(u) as f64;
        for &w in g.left_neighbors(u) {
            let dw = g.right_degree(w) as f64;
            for &v in g.right_neighbors(w) {
                let j = pos_of[&v];
                let dv = g.left_degree(v) as f64;
                row[j] += 1.0 / (dw * (du * dv).sqrt());
            }
        }
        row
    });
    DMatrix::from_fn(n, n, |i, j| rows[i][j])
}

fn dense_second_eigenvalue(s: &DMatrix<f64>) -> f64 {
    let mut eigs: Vec<f64> = s
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    eigs.sort_by(|a, b| b.partial_cmp(a).expect("symmetric eigenvalues are finite"));
    eigs.get(1).copied().unwrap_or(0.0)
}

/// Power iteration for the second eigenvalue of `s`, deflating the exactly
/// known top eigenvector (the square-root-of-degree direction, i.e. the
/// stationary distribution of the two-step chain in symmetrized coordinates).
fn power_iteration_second(
    s: &DMatrix<f64>,
    g: &BipartiteGraph,
    comp: &[u32],
    tolerance: f64,
    max_iterations: usize,
    seed: u64,
    stream: u64,
) -> Result<(f64, usize), SpectralError> {
    let n = comp.len();
    let mut v1 = DVector::from_iterator(n, comp.iter().map(|&u| (g.left_degree(u) as f64).sqrt()));
    v1 /= v1.norm();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut x = DVector::from_fn(n, |_, _| rng.gen_range(-1.0f64..1.0));
    deflate(&mut x, &v1);
    let nx = x.norm();
    if nx < 1e-12 {
        // Astronomically unlikely with a random start; perturb deterministically.
        x = DVector::from_fn(n, |i, _| if i == 0 { 1.0 } else { 0.0 });
        deflate(&mut x, &v1);
    }
    x /= x.norm();

    let mut prev = f64::NAN;
    for t in 0..max_iterations {
        let mut y = s * &x;
        deflate(&mut y, &v1);
        let rho = x.dot(&y);
        let ny = y.norm();
        if ny < 1e-300 {
            return Ok((0.0, t + 1));
        }
        x = y / ny;
        if !prev.is_nan() && (rho - prev).abs() < tolerance {
            return Ok((rho, t + 1));
        }
        prev = rho;
    }
    Err(SpectralError::NoConvergence {
        iterations: max_iterations,
    })
}

fn deflate(x: &mut DVector<f64>, v1: &DVector<f64>) {
    let c = x.dot(v1);
    x.axpy(-c, v1, 1.0);
}

/// Exact two-step transition matrix M(u, v) = sum over common walls w of
/// 1/(deg(u) deg(w)). Rows sum to one.
pub fn two_step_rational(g: &BipartiteGraph) -> Result<Vec<Vec<Rat>>, SpectralError> {
    if g.left_len() == 0 {
        return Err(SpectralError::Empty);
    }
    for u in 0..g.left_len() as u32 {
        if g.left_degree(u) == 0 {
            return Err(SpectralError::ZeroDegreeLeft(u));
        }
    }
    let n = g.left_len();
    let rows = map_indexed(n, |i| {
        let u = i as u32;
        let mut row = vec![Rat::zero(); n];
        let du = g.left_degree(u) as i64;
        for &w in g.left_neighbors(u) {
            let share = Rat::new((1).into(), (du * g.right_degree(w) as i64).into());
            for &v in g.right_neighbors(w) {
                row[v as usize] += &share;
            }
        }
        row
    });
    debug_assert!(rows.iter().all(|r| r.iter().sum::<Rat>() == Rat::one()));
    Ok(rows)
}

fn mat_mul(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let n = a.len();
    map_indexed(n, |i| {
        let mut row = vec![Rat::zero(); n];
        for (k, aik) in a[i].iter().enumerate() {
            if aik.is_zero() {
                continue;
            }
            for (j, bkj) in b[k].iter().enumerate() {
                if !bkj.is_zero() {
                    row[j] += aik * bkj;
                }
            }
        }
        row
    })
}

/// Row-stochastic averaging over the radius-2k spheres of the left metric.
/// `A_0` is the identity. Rows with an empty sphere are flagged, not zeroed
/// silently.
#[derive(Debug, Clone)]
pub struct DistanceOperator {
    pub k: usize,
    /// `spheres[u]` = left vertices at distance exactly 2k from `u`.
    pub spheres: Vec<Vec<u32>>,
}

impl DistanceOperator {
    pub fn entry(&self, u: u32, v: u32) -> Rat {
        let sphere = &self.spheres[u as usize];
        if sphere.binary_search(&v).is_ok() {
            Rat::new(1.into(), (sphere.len() as i64).into())
        } else {
            Rat::zero()
        }
    }

    pub fn empty_rows(&self) -> Vec<u32> {
        self.spheres
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_empty())
            .map(|(u, _)| u as u32)
            .collect()
    }

    pub fn to_matrix(&self) -> Vec<Vec<Rat>> {
        let n = self.spheres.len();
        (0..n as u32)
            .map(|u| (0..n as u32).map(|v| self.entry(u, v)).collect())
            .collect()
    }
}

pub fn distance_operator(g: &BipartiteGraph, k: usize) -> Result<DistanceOperator, SpectralError> {
    let n = g.left_len();
    if n == 0 {
        return Err(SpectralError::Empty);
    }
    let spheres = (0..n as u32)
        .map(|u| {
            let hops = g.left_hops(u)?;
            Ok((0..n as u32)
                .filter(|&v| hops[v as usize] == Some(k as u32))
                .collect())
        })
        .collect::<Result<Vec<_>, SpectralError>>()?;
    Ok(DistanceOperator { k, spheres })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IdentityStatus {
    /// The n-fold two-step matrix equals the alpha-weighted sum of distance
    /// operators, exactly.
    Exact,
    /// Witness row whose walk mass is not constant on one of its spheres; the
    /// averaging-operator decomposition cannot reproduce such a row.
    NonConstantSphere { vertex: u32, radius: usize },
}

/// Per-start-vertex decomposition of the 2n-step walk by final distance.
#[derive(Debug, Clone)]
pub struct WalkDecomposition {
    pub n: usize,
    /// `alpha[u][k]` = probability that a 2n-walk from `u` ends at distance
    /// exactly 2k. Each row is nonnegative and sums to one.
    pub alpha: Vec<Vec<Rat>>,
    /// True when alpha does not depend on the start vertex.
    pub uniform: bool,
    pub identity: IdentityStatus,
}

impl WalkDecomposition {
    /// The common coefficient vector, when start-independent.
    pub fn alpha_uniform(&self) -> Option<&[Rat]> {
        self.uniform.then(|| self.alpha[0].as_slice())
    }
}

pub fn walk_decomposition(
    g: &BipartiteGraph,
    n: usize,
) -> Result<WalkDecomposition, SpectralError> {
    walk_decomposition_with_cap(g, n, DEFAULT_RATIONAL_CAP)
}

pub fn walk_decomposition_with_cap(
    g: &BipartiteGraph,
    n: usize,
    cap: usize,
) -> Result<WalkDecomposition, SpectralError> {
    if n < 1 {
        return Err(SpectralError::BadWalkLength);
    }
    if g.left_len() > cap {
        return Err(SpectralError::CapExceeded {
            left: g.left_len(),
            cap,
        });
    }
    let m = two_step_rational(g)?;
    let mut power = m.clone();
    for _ in 1..n {
        power = mat_mul(&power, &m);
    }

    let size = g.left_len();
    let mut alpha = Vec::with_capacity(size);
    let mut identity = IdentityStatus::Exact;
    for u in 0..size as u32 {
        let hops = g.left_hops(u)?;
        let mut row = vec![Rat::zero(); n + 1];
        let mut sphere_value: Vec<Option<Rat>> = vec![None; n + 1];
        for v in 0..size as u32 {
            let p = &power[u as usize][v as usize];
            match hops[v as usize] {
                Some(h) if (h as usize) <= n => {
                    let k = h as usize;
                    row[k] += p;
                    match &sphere_value[k] {
                        None => sphere_value[k] = Some(p.clone()),
                        Some(prev) if prev != p => {
                            if identity == IdentityStatus::Exact {
                                identity = IdentityStatus::NonConstantSphere {
                                    vertex: u,
                                    radius: k,
                                };
                            }
                        }
                        Some(_) => {}
                    }
                }
                _ => debug_assert!(
                    p.is_zero(),
                    "walk mass beyond reach: u={u} v={v} hops={:?}",
                    hops[v as usize]
                ),
            }
        }
        debug_assert_eq!(row.iter().sum::<Rat>(), Rat::one());
        alpha.push(row);
    }
    let uniform = alpha.windows(2).all(|w| w[0] == w[1]);
    Ok(WalkDecomposition {
        n,
        alpha,
        uniform,
        identity,
    })
}

/// Fractions of the 2-walks out of each vertex that keep, respectively lower
/// by two, its distance from the origin. Counted over (wall, endpoint) pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct BackstepFractions {
    pub one_back: Rat,
    pub two_back: Rat,
}

pub fn backstep_fractions(
    g: &BipartiteGraph,
    origin: u32,
) -> Result<Vec<BackstepFractions>, SpectralError> {
    if g.left_len() == 0 {
        return Err(SpectralError::Empty);
    }
    if !g.is_left_connected() {
        return Err(SpectralError::NotConnected);
    }
    let hops = g.left_hops(origin)?;
    (0..g.left_len() as u32)
        .map(|v| {
            if g.left_degree(v) == 0 {
                return Err(SpectralError::ZeroDegreeLeft(v));
            }
            let hv = hops[v as usize].expect("connected graph");
            let mut total = 0u64;
            let mut one = 0u64;
            let mut two = 0u64;
            for &w in g.left_neighbors(v) {
                for &u in g.right_neighbors(w) {
                    total += 1;
                    let hu = hops[u as usize].expect("connected graph");
                    if hu == hv {
                        one += 1;
                    } else if hv > 0 && hu == hv - 1 {
                        two += 1;
                    }
                }
            }
            Ok(BackstepFractions {
                one_back: Rat::new((one as i64).into(), (total as i64).into()),
                two_back: Rat::new((two as i64).into(), (total as i64).into()),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete_partite, flag_complex, FlagComplexSpec};
    use crate::numeric::{rat, rat_int};

    fn heawood() -> BipartiteGraph {
        flag_complex(&FlagComplexSpec::new(2, 1))
            .unwrap()
            .induced_bipartite(0)
            .unwrap()
    }

    fn k24() -> BipartiteGraph {
        complete_partite(&[2, 4])
            .unwrap()
            .induced_bipartite(0)
            .unwrap()
    }

    #[test]
    fn complete_bipartite_lambda_is_exactly_zero() {
        for sizes in [[2usize, 4], [3, 3], [1, 5]] {
            let g = complete_partite(&sizes)
                .unwrap()
                .induced_bipartite(0)
                .unwrap();
            let r = lambda_tilde(&g, &LambdaOptions::dense()).unwrap();
            assert_eq!(r.value, 0.0);
            assert!(r.exact_zero);
        }
    }

    #[test]
    fn heawood_lambda_matches_closed_form() {
        let g = heawood();
        let r = lambda_tilde(&g, &LambdaOptions::dense()).unwrap();
        let expected = (2.0f64).sqrt() / 3.0;
        assert!((r.value - expected).abs() < 1e-12, "got {}", r.value);
        assert!(r.connected);
        assert!(!r.exact_zero);
    }

    #[test]
    fn iterative_matches_dense() {
        for (q, d, i) in [
            (2u64, 1usize, 0usize),
            (3, 1, 0),
            (2, 2, 0),
            (2, 2, 1),
            (3, 2, 0),
        ] {
            let g = flag_complex(&FlagComplexSpec::new(q, d))
                .unwrap()
                .induced_bipartite(i)
                .unwrap();
            let dense = lambda_tilde(&g, &LambdaOptions::dense()).unwrap();
            let iter =
                lambda_tilde(&g, &LambdaOptions::iterative(42).with_tolerance(1e-13)).unwrap();
            assert!(
                (dense.value - iter.value).abs() < 1e-8,
                "q={q} d={d} i={i}: dense {} vs iter {}",
                dense.value,
                iter.value
            );
            assert!(iter.iterations.is_some());
        }
    }

    #[test]
    fn lambda_is_isomorphism_invariant() {
        // Same graph, left labels permuted by reindexing edges.
        let g = heawood();
        let n = g.left_len() as u32;
        let perm: Vec<u32> = (0..n).map(|u| (u * 3 + 2) % n).collect();
        let mut edges = Vec::new();
        for u in 0..n {
            for &w in g.left_neighbors(u) {
                edges.push((perm[u as usize], w));
            }
        }
        let relabeled = BipartiteGraph::new(
            (0..n).map(|u| crate::VertexId(format!("p{u}"))).collect(),
            (0..g.right_len()).map(|w| format!("w{w}")).collect(),
            &edges,
        )
        .unwrap();
        let a = lambda_tilde(&g, &LambdaOptions::dense()).unwrap();
        let b = lambda_tilde(&relabeled, &LambdaOptions::dense()).unwrap();
        assert!((a.value - b.value).abs() < 1e-12);
    }

    #[test]
    fn right_side_spectrum_agrees() {
        // Swapping sides preserves the nonzero two-step spectrum.
        for (q, d) in [(2u64, 1usize), (2, 2)] {
            let g = flag_complex(&FlagComplexSpec::new(q, d))
                .unwrap()
                .induced_bipartite(0)
                .unwrap();
            let mut edges = Vec::new();
            for u in 0..g.left_len() as u32 {
                for &w in g.left_neighbors(u) {
                    edges.push((w, u));
                }
            }
            let swapped = BipartiteGraph::new(
                (0..g.right_len())
                    .map(|w| crate::VertexId(format!("w{w}")))
                    .collect(),
                (0..g.left_len()).map(|u| format!("v{u}")).collect(),
                &edges,
            )
            .unwrap();
            let a = lambda_tilde(&g, &LambdaOptions::dense()).unwrap();
            let b = lambda_tilde(&swapped, &LambdaOptions::dense()).unwrap();
            assert!((a.value - b.value).abs() < 1e-10, "q={q} d={d}");
        }
    }

    #[test]
    fn disconnected_graph_reports_max_with_flag() {
        let g = BipartiteGraph::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec!["w0".into(), "w1".into()],
            &[(0, 0), (1, 0), (2, 1)],
        )
        .unwrap();
        let r = lambda_tilde(&g, &LambdaOptions::dense()).unwrap();
        assert!(!r.connected);
        assert_eq!(r.per_component.len(), 2);
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn empty_graph_is_an_error() {
        let g = BipartiteGraph::new(vec![], vec![], &[]).unwrap();
        assert_eq!(
            lambda_tilde(&g, &LambdaOptions::dense()).unwrap_err(),
            SpectralError::Empty
        );
    }

    #[test]
    fn distance_operator_zero_is_identity() {
        let g = heawood();
        let op = distance_operator(&g, 0).unwrap();
        for u in 0..7 {
            assert_eq!(op.spheres[u as usize], vec![u]);
            assert_eq!(op.entry(u, u), rat_int(1));
        }
        assert!(op.empty_rows().is_empty());
    }

    #[test]
    fn distance_operator_k24_and_heawood() {
        let g = k24();
        let op = distance_operator(&g, 1).unwrap();
        assert_eq!(op.entry(0, 1), rat_int(1));
        assert_eq!(op.entry(1, 0), rat_int(1));

        let h = heawood();
        let op = distance_operator(&h, 1).unwrap();
        for u in 0..7u32 {
            assert_eq!(op.spheres[u as usize].len(), 6);
            for v in 0..7u32 {
                let want = if u == v { Rat::zero() } else { rat(1, 6) };
                assert_eq!(op.entry(u, v), want);
            }
        }
        // Radius beyond the diameter: all rows empty, flagged.
        let op = distance_operator(&h, 2).unwrap();
        assert_eq!(op.empty_rows().len(), 7);
    }

    /// Independent oracle: enumerate all 2n-walks as (wall, endpoint) choice
    /// sequences with their exact probabilities, binned by final distance.
    fn walk_oracle(g: &BipartiteGraph, start: u32, n: usize) -> Vec<Rat> {
        fn recurse(
            g: &BipartiteGraph,
            at: u32,
            left: usize,
            weight: Rat,
            acc: &mut Vec<(u32, Rat)>,
        ) {
            if left == 0 {
                acc.push((at, weight));
                return;
            }
            let du = g.left_degree(at) as i64;
            for &w in g.left_neighbors(at) {
                let dw = g.right_degree(w) as i64;
                let step = &weight * rat(1, du * dw);
                for &v in g.right_neighbors(w) {
                    recurse(g, v, left - 1, step.clone(), acc);
                }
            }
        }
        let mut acc = Vec::new();
        recurse(g, start, n, rat_int(1), &mut acc);
        let hops = g.left_hops(start).unwrap();
        let mut alpha = vec![Rat::zero(); n + 1];
        for (v, wgt) in acc {
            alpha[hops[v as usize].unwrap() as usize] += wgt;
        }
        alpha
    }

    #[test]
    fn k24_walk_decomposition_matches_enumeration() {
        let g = k24();
        let wd = walk_decomposition(&g, 1).unwrap();
        // From either vertex: 4 walls, 2 endpoints each, half of the 8 walks
        // return to the start.
        assert_eq!(wd.alpha[0], vec![rat(1, 2), rat(1, 2)]);
        assert!(wd.uniform);
        assert_eq!(wd.identity, IdentityStatus::Exact);
        assert_eq!(wd.alpha[0], walk_oracle(&g, 0, 1));
    }

    #[test]
    fn heawood_walk_decomposition_exact_identity() {
        let g = heawood();
        for n in 1..=3 {
            let wd = walk_decomposition(&g, n).unwrap();
            assert_eq!(wd.identity, IdentityStatus::Exact, "n={n}");
            assert!(wd.uniform);
            for u in [0u32, 3] {
                assert_eq!(wd.alpha[u as usize], walk_oracle(&g, u, n), "n={n} u={u}");
            }
            for row in &wd.alpha {
                assert_eq!(row.iter().sum::<Rat>(), rat_int(1));
                assert!(row.iter().all(|a| a >= &Rat::zero()));
            }
        }
    }

    #[test]
    fn irregular_graph_flags_nonconstant_sphere() {
        // Path-like graph: b reaches a through one wall and c through two.
        let g = BipartiteGraph::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec!["w0".into(), "w1".into(), "w2".into()],
            &[(0, 0), (1, 0), (1, 1), (2, 1), (1, 2), (2, 2)],
        )
        .unwrap();
        let wd = walk_decomposition(&g, 1).unwrap();
        assert!(matches!(
            wd.identity,
            IdentityStatus::NonConstantSphere {
                vertex: 1,
                radius: 1
            }
        ));
        for u in 0..3 {
            assert_eq!(wd.alpha[u as usize], walk_oracle(&g, u, 1), "u={u}");
        }
    }

    #[test]
    fn walk_cap_and_length_guards() {
        let g = k24();
        assert_eq!(
            walk_decomposition(&g, 0).unwrap_err(),
            SpectralError::BadWalkLength
        );
        assert_eq!(
            walk_decomposition_with_cap(&g, 1, 1).unwrap_err(),
            SpectralError::CapExceeded { left: 2, cap: 1 }
        );
    }

    #[test]
    fn backsteps_on_k24() {
        let g = k24();
        let fractions = backstep_fractions(&g, 0).unwrap();
        // From the origin: half of the 8 (wall, endpoint) pairs return to it.
        assert_eq!(
            fractions[0],
            BackstepFractions {
                one_back: rat(1, 2),
                two_back: rat_int(0)
            }
        );
        // From the other vertex: half stay at distance 2, half drop to 0.
        assert_eq!(
            fractions[1],
            BackstepFractions {
                one_back: rat(1, 2),
                two_back: rat(1, 2)
            }
        );
    }

    #[test]
    fn backsteps_on_heawood_match_enumeration() {
        let g = heawood();
        let fractions = backstep_fractions(&g, 0).unwrap();
        assert_eq!(fractions[0].two_back, rat_int(0));
        let hops = g.left_hops(0).unwrap();
        for v in 0..7u32 {
            let hv = hops[v as usize].unwrap();
            let mut total = 0u32;
            let mut one = 0u32;
            let mut two = 0u32;
            for &w in g.left_neighbors(v) {
                for &u in g.right_neighbors(w) {
                    total += 1;
                    let hu = hops[u as usize].unwrap();
                    if hu == hv {
                        one += 1;
                    } else if hv > 0 && hu + 1 == hv {
                        two += 1;
                    }
                }
            }
            assert_eq!(
                fractions[v as usize].one_back,
                rat(one as i64, total as i64)
            );
            assert_eq!(
                fractions[v as usize].two_back,
                rat(two as i64, total as i64)
            );
        }
    }

    #[test]
    fn backsteps_require_connectivity() {
        let g = BipartiteGraph::new(
            vec!["a".into(), "b".into()],
            vec!["w0".into(), "w1".into()],
            &[(0, 0), (1, 1)],
        )
        .unwrap();
        assert_eq!(
            backstep_fractions(&g, 0).unwrap_err(),
            SpectralError::NotConnected
        );
    }
}
