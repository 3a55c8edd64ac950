//! Embedded complexes: coverage counting and geometric overlap search.
//!
//! Coverage uses closed simplices (boundary counts). The 2d search evaluates
//! a candidate set that hits the arrangement vertices of the embedded edges —
//! with closed simplices such vertices dominate their neighbouring cells, so
//! the best candidate certifies a lower bound on the piecewise-constant
//! coverage maximum, and attains it for generic embeddings.

pub mod predicates;

use std::collections::BTreeMap;

use num::{BigInt, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::complex::{ComplexError, TypedComplex, VertexId};
use crate::exec::map_slice;
use crate::numeric::{f64_to_rat, rat_to_f64, Rat};
use predicates::{
    point_in_simplex_exact, point_in_simplex_f64, point_in_triangle_scaled, PredicateError,
    ScaledPoint, SimplexClass,
};

pub const DEFAULT_FLOAT_EPS: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("embedding point for `{id}` has {got} coordinates, expected {want}")]
    PointDimension {
        id: VertexId,
        got: usize,
        want: usize,
    },
    #[error("embedding is not injective: `{0}` and `{1}` share a point")]
    NotInjective(VertexId, VertexId),
    #[error("no embedding point for vertex `{0}`")]
    MissingVertex(VertexId),
    #[error("embedding dimension {emb} does not match complex dimension {complex}")]
    DimensionMismatch { emb: usize, complex: usize },
    #[error("operation requires a 2-dimensional embedding, got {0}")]
    NotTwoD(usize),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Predicate(#[from] PredicateError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoordMode {
    ExactRational,
    Float,
}

/// A map from vertex ids to points of R^d. Coordinates are held exactly; the
/// mode selects the default predicate path for coverage queries.
#[derive(Debug, Clone)]
pub struct Embedding {
    d: usize,
    points: BTreeMap<VertexId, Vec<Rat>>,
    mode: CoordMode,
}

impl Embedding {
    /// Requires all points of dimension `d` and injectivity on vertices.
    pub fn new(
        d: usize,
        points: BTreeMap<VertexId, Vec<Rat>>,
        mode: CoordMode,
    ) -> Result<Self, GeometryError> {
        let mut seen: BTreeMap<&Vec<Rat>, &VertexId> = BTreeMap::new();
        for (id, p) in &points {
            if p.len() != d {
                return Err(GeometryError::PointDimension {
                    id: id.clone(),
                    got: p.len(),
                    want: d,
                });
            }
            if let Some(other) = seen.insert(p, id) {
                return Err(GeometryError::NotInjective(other.clone(), id.clone()));
            }
        }
        Ok(Embedding { d, points, mode })
    }

    /// Seeded i.i.d. uniform points in the unit cube, one per complex vertex
    /// (exact binary rationals).
    pub fn random_unit_cube(cx: &TypedComplex, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ids: Vec<VertexId> = cx.vertices().iter().map(|v| v.id.clone()).collect();
        ids.sort();
        let mut points = BTreeMap::new();
        for id in ids {
            let p: Vec<Rat> = (0..cx.d())
                .map(|_| f64_to_rat(rng.gen::<f64>()).expect("unit samples are finite"))
                .collect();
            points.insert(id, p);
        }
        Embedding {
            d: cx.d(),
            points,
            mode: CoordMode::ExactRational,
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn mode(&self) -> CoordMode {
        self.mode
    }

    pub fn with_mode(mut self, mode: CoordMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn points(&self) -> &BTreeMap<VertexId, Vec<Rat>> {
        &self.points
    }

    pub fn point(&self, id: &VertexId) -> Option<&Vec<Rat>> {
        self.points.get(id)
    }

    /// Every vertex of the complex must have an image; dimensions must agree.
    pub fn validate_for(&self, cx: &TypedComplex) -> Result<(), GeometryError> {
        if self.d != cx.d() {
            return Err(GeometryError::DimensionMismatch {
                emb: self.d,
                complex: cx.d(),
            });
        }
        for v in cx.vertices() {
            if !self.points.contains_key(&v.id) {
                return Err(GeometryError::MissingVertex(v.id.clone()));
            }
        }
        Ok(())
    }

    fn chamber_simplex(&self, cx: &TypedComplex, c: usize) -> Vec<Vec<Rat>> {
        cx.chambers()[c]
            .iter()
            .map(|&ix| self.points[&cx.vertex(ix).id].clone())
            .collect()
    }

    fn chamber_simplex_f64(&self, cx: &TypedComplex, c: usize) -> Vec<Vec<f64>> {
        cx.chambers()[c]
            .iter()
            .map(|&ix| {
                self.points[&cx.vertex(ix).id]
                    .iter()
                    .map(rat_to_f64)
                    .collect()
            })
            .collect()
    }
}

/// Coverage of one point: which chambers' embedded closed simplices contain
/// it.
#[derive(Debug, Clone)]
pub struct CoverageResult {
    pub point: Vec<Rat>,
    pub covered: usize,
    pub total: usize,
    pub fraction: Rat,
    /// Covering chamber indices (always recorded; recounting them must
    /// reproduce `covered`).
    pub witnesses: Vec<usize>,
    /// Chambers whose embedded simplex is affinely dependent.
    pub degenerate: Vec<usize>,
}

impl CoverageResult {
    pub fn fraction_f64(&self) -> f64 {
        rat_to_f64(&self.fraction)
    }
}

/// Count the chambers covering `p` (closed simplices; boundary counts).
pub fn coverage_at(
    cx: &TypedComplex,
    emb: &Embedding,
    p: &[Rat],
) -> Result<CoverageResult, GeometryError> {
    emb.validate_for(cx)?;
    match emb.mode() {
        CoordMode::ExactRational => coverage_exact(cx, emb, p),
        CoordMode::Float => {
            let pf: Vec<f64> = p.iter().map(rat_to_f64).collect();
            let chambers: Vec<usize> = (0..cx.chambers().len()).collect();
            let classes = map_slice(&chambers, |&c| {
                point_in_simplex_f64(&pf, &emb.chamber_simplex_f64(cx, c), DEFAULT_FLOAT_EPS)
            });
            let mut witnesses = Vec::new();
            let mut degenerate = Vec::new();
            for (c, class) in classes.into_iter().enumerate() {
                let class = class?;
                if class.degenerate {
                    degenerate.push(c);
                }
                if class.covered(true) {
                    witnesses.push(c);
                }
            }
            Ok(finish_coverage(
                p.to_vec(),
                cx.chambers().len(),
                witnesses,
                degenerate,
            ))
        }
    }
}

/// Per-run cache of embedded chamber simplices. In the plane it carries
/// integer-scaled triangles so each classification is a handful of integer
/// orientation signs; degenerate triangles fall back to the generic exact
/// path.
struct SimplexCache {
    simplices: Vec<Vec<Vec<Rat>>>,
    scaled: Option<Vec<[ScaledPoint; 3]>>,
}

impl SimplexCache {
    fn new(cx: &TypedComplex, emb: &Embedding) -> Self {
        let simplices: Vec<Vec<Vec<Rat>>> = (0..cx.chambers().len())
            .map(|c| emb.chamber_simplex(cx, c))
            .collect();
        let scaled = (emb.d() == 2).then(|| {
            simplices
                .iter()
                .map(|s| {
                    [
                        ScaledPoint::new(&s[0]),
                        ScaledPoint::new(&s[1]),
                        ScaledPoint::new(&s[2]),
                    ]
                })
                .collect()
        });
        SimplexCache { simplices, scaled }
    }

    fn classify(
        &self,
        p: &[Rat],
        sp: Option<&ScaledPoint>,
        c: usize,
    ) -> Result<SimplexClass, PredicateError> {
        if let (Some(sp), Some(scaled)) = (sp, &self.scaled) {
            if let Some(class) = point_in_triangle_scaled(sp, &scaled[c]) {
                return Ok(class);
            }
        }
        point_in_simplex_exact(p, &self.simplices[c], true)
    }

    fn cover_count(&self, p: &[Rat]) -> usize {
        let sp = self.scaled.as_ref().map(|_| ScaledPoint::new(p));
        (0..self.simplices.len())
            .filter(|&c| {
                self.classify(p, sp.as_ref(), c)
                    .map(|cl| cl.covered(true))
                    .unwrap_or(false)
            })
            .count()
    }
}

fn coverage_exact(
    cx: &TypedComplex,
    emb: &Embedding,
    p: &[Rat],
) -> Result<CoverageResult, GeometryError> {
    coverage_exact_cached(&SimplexCache::new(cx, emb), cx.chambers().len(), p)
}

fn coverage_exact_cached(
    cache: &SimplexCache,
    total: usize,
    p: &[Rat],
) -> Result<CoverageResult, GeometryError> {
    let sp = cache.scaled.as_ref().map(|_| ScaledPoint::new(p));
    let chambers: Vec<usize> = (0..total).collect();
    let classes = map_slice(&chambers, |&c| cache.classify(p, sp.as_ref(), c));
    let mut witnesses = Vec::new();
    let mut degenerate = Vec::new();
    for (c, class) in classes.into_iter().enumerate() {
        let class = class?;
        if class.degenerate {
            degenerate.push(c);
        }
        if class.covered(true) {
            witnesses.push(c);
        }
    }
    Ok(finish_coverage(p.to_vec(), total, witnesses, degenerate))
}

fn finish_coverage(
    point: Vec<Rat>,
    total: usize,
    witnesses: Vec<usize>,
    degenerate: Vec<usize>,
) -> CoverageResult {
    let covered = witnesses.len();
    let fraction = if total == 0 {
        Rat::zero()
    } else {
        Rat::new(BigInt::from(covered), BigInt::from(total))
    };
    CoverageResult {
        point,
        covered,
        total,
        fraction,
        witnesses,
        degenerate,
    }
}

fn chamber_centroid(simplex: &[Vec<Rat>]) -> Vec<Rat> {
    let d = simplex[0].len();
    let n = Rat::new(BigInt::from(simplex.len()), BigInt::from(1));
    (0..d)
        .map(|i| simplex.iter().map(|v| &v[i]).sum::<Rat>() / &n)
        .collect()
}

/// Candidate points for the 2d search: embedded vertices, chamber centroids,
/// and pairwise intersections of embedded chamber edges. Sorted and
/// deduplicated, so evaluation order (and tie-breaking) is lexicographic.
fn candidates_2d(cx: &TypedComplex, emb: &Embedding) -> Vec<Vec<Rat>> {
    let mut cands: Vec<Vec<Rat>> = emb
        .points()
        .iter()
        .filter(|(id, _)| cx.vertex_index(id).is_some())
        .map(|(_, p)| p.clone())
        .collect();
    for c in 0..cx.chambers().len() {
        cands.push(chamber_centroid(&emb.chamber_simplex(cx, c)));
    }

    // Distinct embedded edges across all chambers.
    let mut segments: Vec<[[Rat; 2]; 2]> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for ch in cx.chambers() {
        for a in 0..ch.len() {
            for b in a + 1..ch.len() {
                let (ia, ib) = (ch[a].min(ch[b]), ch[a].max(ch[b]));
                if seen.insert((ia, ib)) {
                    let pa = &emb.points()[&cx.vertex(ia).id];
                    let pb = &emb.points()[&cx.vertex(ib).id];
                    segments.push([
                        [pa[0].clone(), pa[1].clone()],
                        [pb[0].clone(), pb[1].clone()],
                    ]);
                }
            }
        }
    }
    let pairs: Vec<(usize, usize)> = (0..segments.len())
        .flat_map(|i| (i + 1..segments.len()).map(move |j| (i, j)))
        .collect();
    let hits = map_slice(&pairs, |&(i, j)| {
        predicates::segment_intersection_exact(
            &segments[i][0],
            &segments[i][1],
            &segments[j][0],
            &segments[j][1],
        )
    });
    cands.extend(hits.into_iter().flatten().map(|p| p.to_vec()));
    cands.sort();
    cands.dedup();
    cands
}

/// Best coverage over the 2d candidate set; a certified lower bound on the
/// overlap maximum. Ties break to the lexicographically smallest point.
pub fn overlap_search_2d(
    cx: &TypedComplex,
    emb: &Embedding,
) -> Result<CoverageResult, GeometryError> {
    overlap_search_2d_with_candidates(cx, emb, &[])
}

/// Same search with extra caller-supplied candidate points (coverage is
/// monotone in the candidate set; used for cross-checks and sharpening).
pub fn overlap_search_2d_with_candidates(
    cx: &TypedComplex,
    emb: &Embedding,
    extra: &[Vec<Rat>],
) -> Result<CoverageResult, GeometryError> {
    emb.validate_for(cx)?;
    if emb.d() != 2 {
        return Err(GeometryError::NotTwoD(emb.d()));
    }
    let mut cands = candidates_2d(cx, emb);
    cands.extend(extra.iter().cloned());
    cands.sort();
    cands.dedup();

    let cache = SimplexCache::new(cx, emb);
    let counts = map_slice(&cands, |p| cache.cover_count(p));
    let best_ix = counts
        .iter()
        .enumerate()
        .max_by(|(ia, ca), (ib, cb)| ca.cmp(cb).then(ib.cmp(ia)))
        .map(|(i, _)| i)
        .expect("candidate set is nonempty for valid complexes");
    coverage_exact_cached(&cache, cx.chambers().len(), &cands[best_ix])
}

/// Seeded random search over the bounding box, plus all chamber centroids.
/// The sampled winner is re-verified exactly; the result is a lower bound.
/// `samples = 0` falls back to centroids only.
pub fn overlap_monte_carlo(
    cx: &TypedComplex,
    emb: &Embedding,
    samples: usize,
    seed: u64,
) -> Result<CoverageResult, GeometryError> {
    emb.validate_for(cx)?;
    let d = emb.d();
    let cache = SimplexCache::new(cx, emb);

    // Exact centroid coverage.
    let centroids: Vec<Vec<Rat>> = (0..cx.chambers().len())
        .map(|c| chamber_centroid(&emb.chamber_simplex(cx, c)))
        .collect();
    let centroid_counts = map_slice(&centroids, |p| cache.cover_count(p));
    let mut best: Option<(usize, Vec<Rat>)> = None;
    for (p, &count) in centroids.iter().zip(&centroid_counts) {
        if better(&best, count, p) {
            best = Some((count, p.clone()));
        }
    }

    if samples > 0 {
        let (lo, hi) = bounding_box_f64(emb);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<Vec<f64>> = (0..samples)
            .map(|_| (0..d).map(|i| rng.gen_range(lo[i]..=hi[i])).collect())
            .collect();
        let float_simplices: Vec<Vec<Vec<f64>>> = (0..cx.chambers().len())
            .map(|c| emb.chamber_simplex_f64(cx, c))
            .collect();
        let counts = map_slice(&pts, |p| {
            float_simplices
                .iter()
                .filter(|s| {
                    point_in_simplex_f64(p, s, DEFAULT_FLOAT_EPS)
                        .map(|cl| cl.covered(true))
                        .unwrap_or(false)
                })
                .count()
        });
        if let Some((ix, _)) = counts
            .iter()
            .enumerate()
            .max_by(|(ia, ca), (ib, cb)| ca.cmp(cb).then(ib.cmp(ia)))
        {
            // Exact re-verification of the sampled winner.
            let winner: Vec<Rat> = pts[ix]
                .iter()
                .map(|&x| f64_to_rat(x).expect("bounded samples are finite"))
                .collect();
            let count = cache.cover_count(&winner);
            if better(&best, count, &winner) {
                best = Some((count, winner));
            }
        }
    }

    let (_, point) = best.expect("valid complexes have at least one chamber centroid");
    coverage_exact_cached(&cache, cx.chambers().len(), &point)
}

fn better(best: &Option<(usize, Vec<Rat>)>, count: usize, p: &[Rat]) -> bool {
    match best {
        None => true,
        Some((bc, bp)) => count > *bc || (count == *bc && p < bp.as_slice()),
    }
}

fn bounding_box_f64(emb: &Embedding) -> (Vec<f64>, Vec<f64>) {
    let d = emb.d();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for p in emb.points().values() {
        for i in 0..d {
            let x = rat_to_f64(&p[i]);
            lo[i] = lo[i].min(x);
            hi[i] = hi[i].max(x);
        }
    }
    (lo, hi)
}
