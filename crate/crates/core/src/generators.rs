//! Test-family generators: complete partite complexes, flag complexes of
//! finite projective geometries, and seeded random partite hypergraphs.

use num::bigint::BigInt;
use num::{One, Signed, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::complex::{ComplexError, TypedComplex, VertexId};
use crate::gf::{GfArith, GfError};
use crate::numeric::Rat;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("class {0} is empty")]
    EmptyClass(usize),
    #[error("need at least two classes, got {0}")]
    TooFewClasses(usize),
    #[error(transparent)]
    Field(#[from] GfError),
    #[error("enumeration budget exceeded: q^(d+2) = {actual} > cap {cap}")]
    CapExceeded { actual: u128, cap: u128 },
    #[error("probability {0} outside [0, 1]")]
    BadProbability(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// Complete `(d+1)`-partite complex: chambers are all transversals.
pub fn complete_partite(sizes: &[usize]) -> Result<TypedComplex, GenError> {
    if sizes.len() < 2 {
        return Err(GenError::TooFewClasses(sizes.len()));
    }
    if let Some(t) = sizes.iter().position(|&s| s == 0) {
        return Err(GenError::EmptyClass(t));
    }
    let d = sizes.len() - 1;
    let vertices = partite_vertices(sizes);
    let chambers = transversals(sizes)
        .map(|pos| {
            pos.iter()
                .enumerate()
                .map(|(t, &p)| partite_id(t, p))
                .collect()
        })
        .collect();
    Ok(TypedComplex::from_parts(d, vertices, chambers)?)
}

fn partite_id(t: usize, p: usize) -> VertexId {
    VertexId(format!("t{t}_{p}"))
}

fn partite_vertices(sizes: &[usize]) -> Vec<(VertexId, usize)> {
    sizes
        .iter()
        .enumerate()
        .flat_map(|(t, &s)| (0..s).map(move |p| (partite_id(t, p), t)))
        .collect()
}

/// Odometer over one position per class, in canonical order.
fn transversals(sizes: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = sizes.iter().product();
    (0..total).map(move |mut n| {
        let mut pos = vec![0usize; sizes.len()];
        for (t, &s) in sizes.iter().enumerate().rev() {
            pos[t] = n % s;
            n /= s;
        }
        pos
    })
}

/// Gaussian binomial `[m choose k]_q`: the number of k-dimensional subspaces
/// of F_q^m.
pub fn gaussian_binomial(m: u32, k: u32, q: u64) -> u128 {
    if k > m {
        return 0;
    }
    let k = k.min(m - k);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    let q = BigInt::from(q);
    for i in 0..k {
        num *= q.pow(m - i) - 1;
        den *= q.pow(i + 1) - 1;
    }
    let (quot, rem) = num::Integer::div_rem(&num, &den);
    debug_assert!(rem.is_zero());
    quot.to_string()
        .parse()
        .expect("desk-scale Gaussian binomial fits u128")
}

/// Parameters for the flag complex of proper nonzero subspaces of F_q^(d+2).
///
/// Vertex types are subspace dimension minus one; chambers are complete flags.
#[derive(Debug, Clone, Copy)]
pub struct FlagComplexSpec {
    pub q: u64,
    pub d: usize,
    /// Budget on q^(d+2), the size of the enumerated vector space.
    pub cap: u128,
}

impl FlagComplexSpec {
    pub fn new(q: u64, d: usize) -> Self {
        FlagComplexSpec {
            q,
            d,
            cap: 1_000_000,
        }
    }

    pub fn with_cap(mut self, cap: u128) -> Self {
        self.cap = cap;
        self
    }
}

/// A subspace in reduced row-echelon form; rows are its canonical basis.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Subspace {
    rows: Vec<Vec<u64>>,
}

impl Subspace {
    fn dim(&self) -> usize {
        self.rows.len()
    }

    fn id(&self, ambient: usize) -> VertexId {
        let _ = ambient;
        let body = self
            .rows
            .iter()
            .map(|row| row.iter().map(u64::to_string).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join(";");
        VertexId(format!("g{}:{}", self.dim(), body))
    }

    /// Reduce `v` against the RREF rows; `v` is in the span iff zero remains.
    fn contains_vector(&self, field: &GfArith, v: &[u64]) -> bool {
        let mut v = v.to_vec();
        for row in &self.rows {
            let pivot = row
                .iter()
                .position(|&x| x != 0)
                .expect("RREF rows are nonzero");
            if v[pivot] != 0 {
                let c = v[pivot];
                for (x, &r) in v.iter_mut().zip(row) {
                    *x = field.sub(*x, field.mul(c, r));
                }
            }
        }
        v.iter().all(|&x| x == 0)
    }

    fn contains_subspace(&self, field: &GfArith, other: &Subspace) -> bool {
        other
            .rows
            .iter()
            .all(|row| self.contains_vector(field, row))
    }
}

/// All dimension-k subspaces of F_q^m via RREF shape enumeration.
fn subspaces(field: &GfArith, m: usize, k: usize) -> Vec<Subspace> {
    let q = field.q();
    let mut out = Vec::new();
    let mut pivots = Vec::new();
    enumerate_pivot_sets(m, k, 0, &mut pivots, &mut |pivots| {
        // Free cells sit right of each pivot, outside the pivot columns.
        let free: Vec<(usize, usize)> = (0..k)
            .flat_map(|r| {
                (pivots[r] + 1..m)
                    .filter(|c| !pivots.contains(c))
                    .map(move |c| (r, c))
            })
            .collect();
        let combos = (q as u128).pow(free.len() as u32);
        for mut n in 0..combos {
            let mut rows = vec![vec![0u64; m]; k];
            for (r, &p) in pivots.iter().enumerate() {
                rows[r][p] = 1;
            }
            for &(r, c) in &free {
                rows[r][c] = (n % q as u128) as u64;
                n /= q as u128;
            }
            out.push(Subspace { rows });
        }
    });
    out.sort();
    out
}

fn enumerate_pivot_sets(
    m: usize,
    k: usize,
    start: usize,
    acc: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]),
) {
    if acc.len() == k {
        f(acc);
        return;
    }
    for c in start..m {
        acc.push(c);
        enumerate_pivot_sets(m, k, c + 1, acc, f);
        acc.pop();
    }
}

/// Order complex of proper nonzero subspaces of F_q^(d+2): vertices by
/// dimension, chambers the complete flags. Type-regular by construction.
pub fn flag_complex(spec: &FlagComplexSpec) -> Result<TypedComplex, GenError> {
    let field = GfArith::new(spec.q)?;
    let m = spec.d + 2;
    let space = (spec.q as u128).checked_pow(m as u32);
    match space {
        Some(actual) if actual <= spec.cap => {}
        _ => {
            return Err(GenError::CapExceeded {
                actual: space.unwrap_or(u128::MAX),
                cap: spec.cap,
            })
        }
    }

    let levels: Vec<Vec<Subspace>> = (1..=spec.d + 1).map(|k| subspaces(&field, m, k)).collect();
    for (k, level) in levels.iter().enumerate() {
        debug_assert_eq!(
            level.len() as u128,
            gaussian_binomial(m as u32, k as u32 + 1, spec.q)
        );
    }

    let mut vertices = Vec::new();
    for (k, level) in levels.iter().enumerate() {
        for s in level {
            vertices.push((s.id(m), k));
        }
    }

    // Containment lists between consecutive levels, then flags by DFS.
    let mut above: Vec<Vec<Vec<u32>>> = Vec::new();
    for k in 0..spec.d {
        let lower = &levels[k];
        let upper = &levels[k + 1];
        let lists = lower
            .iter()
            .map(|s| {
                upper
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| t.contains_subspace(&field, s))
                    .map(|(j, _)| j as u32)
                    .collect()
            })
            .collect();
        above.push(lists);
    }

    let mut chambers = Vec::new();
    let mut stack: Vec<u32> = Vec::new();
    for start in 0..levels[0].len() as u32 {
        stack.push(start);
        extend_flags(&levels, &above, &mut stack, &mut chambers, m);
        stack.pop();
    }

    Ok(TypedComplex::from_parts(spec.d, vertices, chambers)?)
}

fn extend_flags(
    levels: &[Vec<Subspace>],
    above: &[Vec<Vec<u32>>],
    stack: &mut Vec<u32>,
    chambers: &mut Vec<Vec<VertexId>>,
    ambient: usize,
) {
    let depth = stack.len() - 1;
    if depth == levels.len() - 1 {
        chambers.push(
            stack
                .iter()
                .enumerate()
                .map(|(k, &ix)| levels[k][ix as usize].id(ambient))
                .collect(),
        );
        return;
    }
    let current = *stack.last().expect("stack nonempty");
    for &next in &above[depth][current as usize] {
        stack.push(next);
        extend_flags(levels, above, stack, chambers, ambient);
        stack.pop();
    }
}

/// A generated random complex together with the vertices pruned for purity.
#[derive(Debug, Clone)]
pub struct RandomPartite {
    pub complex: TypedComplex,
    pub pruned: Vec<VertexId>,
}

/// Each transversal of the given classes is kept independently with
/// probability `p`, using a seeded deterministic stream. Isolated vertices
/// are pruned and reported.
pub fn random_partite(sizes: &[usize], p: &Rat, seed: u64) -> Result<RandomPartite, GenError> {
    if sizes.len() < 2 {
        return Err(GenError::TooFewClasses(sizes.len()));
    }
    if let Some(t) = sizes.iter().position(|&s| s == 0) {
        return Err(GenError::EmptyClass(t));
    }
    if p.is_negative() || p > &Rat::one() {
        return Err(GenError::BadProbability(p.to_string()));
    }
    let d = sizes.len() - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let one = Rat::one();
    let two_64 = BigInt::one() << 64;
    let mut kept: Vec<Vec<usize>> = Vec::new();
    for pos in transversals(sizes) {
        let draw = rng.next_u64();
        // Keep iff draw/2^64 < p, compared exactly.
        let keep = if p.is_zero() {
            false
        } else if p == &one {
            true
        } else {
            BigInt::from(draw) * p.denom() < p.numer() * &two_64
        };
        if keep {
            kept.push(pos);
        }
    }

    let mut used: Vec<Vec<bool>> = sizes.iter().map(|&s| vec![false; s]).collect();
    for pos in &kept {
        for (t, &pp) in pos.iter().enumerate() {
            used[t][pp] = true;
        }
    }
    let mut vertices = Vec::new();
    let mut pruned = Vec::new();
    for (t, &s) in sizes.iter().enumerate() {
        for pp in 0..s {
            if used[t][pp] {
                vertices.push((partite_id(t, pp), t));
            } else {
                pruned.push(partite_id(t, pp));
            }
        }
    }
    let chambers = kept
        .iter()
        .map(|pos| {
            pos.iter()
                .enumerate()
                .map(|(t, &pp)| partite_id(t, pp))
                .collect()
        })
        .collect();
    Ok(RandomPartite {
        complex: TypedComplex::from_parts(d, vertices, chambers)?,
        pruned,
    })
}
