//! Point-in-simplex classification, exact and floating.
//!
//! The exact path solves the barycentric system over the rationals and reads
//! off coordinate signs. Affinely dependent simplices have empty interior;
//! membership in their (measure-zero) hull is decided by an exact phase-1
//! simplex method.

use num::bigint::BigInt;
use num::{Integer, One, Signed, Zero};
use thiserror::Error;

use crate::numeric::Rat;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PredicateError {
    #[error("point has dimension {point}, simplex lives in dimension {simplex}")]
    DimensionMismatch { point: usize, simplex: usize },
    #[error("a {dim}-simplex needs {} vertices, got {got}", dim + 1)]
    VertexCount { dim: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Position {
    Inside,
    Boundary,
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimplexClass {
    pub position: Position,
    pub degenerate: bool,
}

impl SimplexClass {
    pub fn covered(&self, closed: bool) -> bool {
        match self.position {
            Position::Inside => true,
            Position::Boundary => closed,
            Position::Outside => false,
        }
    }
}

fn check_dims(p_len: usize, simplex: &[Vec<Rat>]) -> Result<usize, PredicateError> {
    let d = p_len;
    if simplex.len() != d + 1 {
        return Err(PredicateError::VertexCount {
            dim: d,
            got: simplex.len(),
        });
    }
    for v in simplex {
        if v.len() != d {
            return Err(PredicateError::DimensionMismatch {
                point: d,
                simplex: v.len(),
            });
        }
    }
    Ok(d)
}

/// Exact classification of `p` against the convex hull of `simplex`.
///
/// Non-degenerate simplices ignore `closed` (inside/boundary/outside is
/// geometric). Degenerate simplices have empty interior: with `closed` their
/// hull points classify as boundary, without it everything is outside. The
/// degeneracy is flagged either way.
pub fn point_in_simplex_exact(
    p: &[Rat],
    simplex: &[Vec<Rat>],
    closed: bool,
) -> Result<SimplexClass, PredicateError> {
    let d = check_dims(p.len(), simplex)?;
    // Barycentric system: columns are the vertices with an appended 1-row.
    let a: Vec<Vec<Rat>> = (0..=d)
        .map(|row| {
            (0..=d)
                .map(|col| {
                    if row < d {
                        simplex[col][row].clone()
                    } else {
                        Rat::one()
                    }
                })
                .collect()
        })
        .collect();
    let mut b: Vec<Rat> = p.to_vec();
    b.push(Rat::one());

    match solve_rational(a, b) {
        Some(lambda) => {
            let any_negative = lambda.iter().any(|l| l.is_negative());
            let any_zero = lambda.iter().any(|l| l.is_zero());
            let position = if any_negative {
                Position::Outside
            } else if any_zero {
                Position::Boundary
            } else {
                Position::Inside
            };
            Ok(SimplexClass {
                position,
                degenerate: false,
            })
        }
        None => {
            let on_hull = closed && hull_membership(p, simplex);
            let position = if on_hull {
                Position::Boundary
            } else {
                Position::Outside
            };
            Ok(SimplexClass {
                position,
                degenerate: true,
            })
        }
    }
}

/// Floating classification with an absolute tolerance on the barycentric
/// coordinates. Near-singular systems are flagged degenerate and reported as
/// boundary; callers re-verify winners exactly.
pub fn point_in_simplex_f64(
    p: &[f64],
    simplex: &[Vec<f64>],
    eps: f64,
) -> Result<SimplexClass, PredicateError> {
    let d = p.len();
    if simplex.len() != d + 1 {
        return Err(PredicateError::VertexCount {
            dim: d,
            got: simplex.len(),
        });
    }
    for v in simplex {
        if v.len() != d {
            return Err(PredicateError::DimensionMismatch {
                point: d,
                simplex: v.len(),
            });
        }
    }
    let n = d + 1;
    let a = nalgebra::DMatrix::from_fn(
        n,
        n,
        |row, col| {
            if row < d {
                simplex[col][row]
            } else {
                1.0
            }
        },
    );
    let mut rhs = nalgebra::DVector::zeros(n);
    for i in 0..d {
        rhs[i] = p[i];
    }
    rhs[d] = 1.0;
    let lu = a.lu();
    match lu.solve(&rhs) {
        Some(lambda) if lu.determinant().abs() > eps => {
            let any_negative = lambda.iter().any(|&l| l < -eps);
            let any_zero = lambda.iter().any(|&l| l.abs() <= eps);
            let position = if any_negative {
                Position::Outside
            } else if any_zero {
                Position::Boundary
            } else {
                Position::Inside
            };
            Ok(SimplexClass {
                position,
                degenerate: false,
            })
        }
        _ => Ok(SimplexClass {
            position: Position::Boundary,
            degenerate: true,
        }),
    }
}

/// Gaussian elimination over the rationals; `None` when the matrix is
/// singular.
fn solve_rational(mut a: Vec<Vec<Rat>>, mut b: Vec<Rat>) -> Option<Vec<Rat>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].clone();
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &inv;
            for c in col..n {
                let sub = &factor * &a[col][c];
                a[r][c] -= sub;
            }
            let sub = &factor * &b[col];
            b[r] -= sub;
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Exact feasibility of `p` in the convex hull of arbitrary (possibly
/// affinely dependent) points: phase-1 simplex on
/// `{lambda >= 0 : sum lambda_i v_i = p, sum lambda_i = 1}`.
fn hull_membership(p: &[Rat], points: &[Vec<Rat>]) -> bool {
    let d = p.len();
    let rows = d + 1;
    let cols = points.len();
    let mut a: Vec<Vec<Rat>> = (0..rows)
        .map(|r| {
            (0..cols)
                .map(|c| {
                    if r < d {
                        points[c][r].clone()
                    } else {
                        Rat::one()
                    }
                })
                .collect()
        })
        .collect();
    let mut b: Vec<Rat> = p.to_vec();
    b.push(Rat::one());
    for r in 0..rows {
        if b[r].is_negative() {
            b[r] = -b[r].clone();
            for c in 0..cols {
                a[r][c] = -a[r][c].clone();
            }
        }
    }
    lp_phase1_feasible(&a, &b)
}

/// Phase-1 simplex with Bland's rule, exact arithmetic. Requires `b >= 0`.
fn lp_phase1_feasible(a: &[Vec<Rat>], b: &[Rat]) -> bool {
    let m = b.len();
    let n = a[0].len();
    let width = n + m + 1;
    // Tableau rows [A | I | b]; artificial basis.
    let mut t: Vec<Vec<Rat>> = (0..m)
        .map(|i| {
            let mut row = Vec::with_capacity(width);
            row.extend(a[i].iter().cloned());
            for j in 0..m {
                row.push(if i == j { Rat::one() } else { Rat::zero() });
            }
            row.push(b[i].clone());
            row
        })
        .collect();
    // Reduced costs for minimizing the artificial sum: z_j - c_j.
    let mut obj: Vec<Rat> = (0..width)
        .map(|j| {
            if j < n || j == width - 1 {
                (0..m).map(|i| t[i][j].clone()).sum()
            } else {
                Rat::zero()
            }
        })
        .collect();
    let mut basis: Vec<usize> = (n..n + m).collect();

    loop {
        let Some(enter) = (0..n + m).find(|&j| obj[j].is_positive()) else {
            return obj[width - 1].is_zero();
        };
        // Ratio test, Bland ties by row index.
        let mut leave: Option<(usize, Rat)> = None;
        for (i, row) in t.iter().enumerate() {
            if row[enter].is_positive() {
                let ratio = &row[width - 1] / &row[enter];
                match &leave {
                    Some((_, best)) if *best <= ratio => {}
                    _ => leave = Some((i, ratio)),
                }
            }
        }
        let Some((pivot_row, _)) = leave else {
            // Unbounded phase-1 cannot happen (objective bounded below by 0),
            // but bail out defensively.
            return false;
        };
        let inv = t[pivot_row][enter].clone();
        for v in t[pivot_row].iter_mut() {
            *v /= &inv;
        }
        for i in 0..m {
            if i != pivot_row && !t[i][enter].is_zero() {
                let factor = t[i][enter].clone();
                for j in 0..width {
                    let sub = &factor * &t[pivot_row][j];
                    t[i][j] -= sub;
                }
            }
        }
        if !obj[enter].is_zero() {
            let factor = obj[enter].clone();
            for j in 0..width {
                let sub = &factor * &t[pivot_row][j];
                obj[j] -= sub;
            }
        }
        basis[pivot_row] = enter;
    }
}

/// A planar rational point cleared to a common positive denominator, so
/// orientation signs reduce to integer arithmetic (no divisions, no gcd
/// churn).
#[derive(Debug, Clone)]
pub struct ScaledPoint {
    x: BigInt,
    y: BigInt,
    den: BigInt,
}

impl ScaledPoint {
    pub fn new(p: &[Rat]) -> Self {
        debug_assert_eq!(p.len(), 2);
        let den = p[0].denom().lcm(p[1].denom());
        ScaledPoint {
            x: p[0].numer() * (&den / p[0].denom()),
            y: p[1].numer() * (&den / p[1].denom()),
            den,
        }
    }
}

/// Sign of the cross product (b - a) x (c - a) over scaled points.
fn orient2d(a: &ScaledPoint, b: &ScaledPoint, c: &ScaledPoint) -> i8 {
    let abx = &b.x * &a.den - &a.x * &b.den;
    let aby = &b.y * &a.den - &a.y * &b.den;
    let acx = &c.x * &a.den - &a.x * &c.den;
    let acy = &c.y * &a.den - &a.y * &c.den;
    // Common positive factor a.den^2 b.den c.den dropped.
    let det = abx * acy - aby * acx;
    match det.sign() {
        num::bigint::Sign::Plus => 1,
        num::bigint::Sign::NoSign => 0,
        num::bigint::Sign::Minus => -1,
    }
}

/// Exact triangle classification via three orientation signs. Degenerate
/// triangles return `None`; callers fall back to the generic path.
pub fn point_in_triangle_scaled(p: &ScaledPoint, tri: &[ScaledPoint; 3]) -> Option<SimplexClass> {
    let s = orient2d(&tri[0], &tri[1], &tri[2]);
    if s == 0 {
        return None;
    }
    let signs = [
        s * orient2d(&tri[0], &tri[1], p),
        s * orient2d(&tri[1], &tri[2], p),
        s * orient2d(&tri[2], &tri[0], p),
    ];
    let position = if signs.iter().any(|&o| o < 0) {
        Position::Outside
    } else if signs.iter().any(|&o| o == 0) {
        Position::Boundary
    } else {
        Position::Inside
    };
    Some(SimplexClass {
        position,
        degenerate: false,
    })
}

/// Intersection point of closed segments `ab` and `cd`, exact. Collinear and
/// parallel pairs return `None`; overlap endpoints are segment endpoints and
/// enter candidate sets on their own.
pub fn segment_intersection_exact(
    a: &[Rat; 2],
    b: &[Rat; 2],
    c: &[Rat; 2],
    d: &[Rat; 2],
) -> Option<[Rat; 2]> {
    let r = [&b[0] - &a[0], &b[1] - &a[1]];
    let s = [&d[0] - &c[0], &d[1] - &c[1]];
    let denom = &r[0] * &s[1] - &r[1] * &s[0];
    if denom.is_zero() {
        return None;
    }
    let ca = [&c[0] - &a[0], &c[1] - &a[1]];
    let tn = &ca[0] * &s[1] - &ca[1] * &s[0];
    let un = &ca[0] * &r[1] - &ca[1] * &r[0];
    let t = tn / &denom;
    let u = un / denom;
    let zero = Rat::zero();
    let one = Rat::one();
    if t < zero || t > one || u < zero || u > one {
        return None;
    }
    Some([&a[0] + &t * &r[0], &a[1] + &t * &r[1]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{rat, rat_int};

    fn pt(coords: &[(i64, i64)]) -> Vec<Rat> {
        coords.iter().map(|&(n, d)| rat(n, d)).collect()
    }

    fn unit_triangle() -> Vec<Vec<Rat>> {
        vec![
            pt(&[(0, 1), (0, 1)]),
            pt(&[(1, 1), (0, 1)]),
            pt(&[(0, 1), (1, 1)]),
        ]
    }

    #[test]
    fn triangle_inside_outside_boundary() {
        let tri = unit_triangle();
        let inside = point_in_simplex_exact(&pt(&[(1, 4), (1, 4)]), &tri, true).unwrap();
        assert_eq!(inside.position, Position::Inside);
        assert!(!inside.degenerate);

        let outside = point_in_simplex_exact(&pt(&[(1, 1), (1, 1)]), &tri, true).unwrap();
        assert_eq!(outside.position, Position::Outside);

        let boundary = point_in_simplex_exact(&pt(&[(1, 2), (0, 1)]), &tri, true).unwrap();
        assert_eq!(boundary.position, Position::Boundary);

        let vertex = point_in_simplex_exact(&pt(&[(0, 1), (0, 1)]), &tri, true).unwrap();
        assert_eq!(vertex.position, Position::Boundary);
    }

    #[test]
    fn degenerate_simplex_covers_only_its_hull() {
        // Collinear "triangle" on the diagonal.
        let tri = vec![
            pt(&[(0, 1), (0, 1)]),
            pt(&[(1, 1), (1, 1)]),
            pt(&[(2, 1), (2, 1)]),
        ];
        let on = point_in_simplex_exact(&pt(&[(1, 1), (1, 1)]), &tri, true).unwrap();
        assert_eq!(
            on,
            SimplexClass {
                position: Position::Boundary,
                degenerate: true
            }
        );

        let off = point_in_simplex_exact(&pt(&[(1, 1), (0, 1)]), &tri, true).unwrap();
        assert_eq!(
            off,
            SimplexClass {
                position: Position::Outside,
                degenerate: true
            }
        );

        // Past the hull, still on the line through it.
        let past = point_in_simplex_exact(&pt(&[(3, 1), (3, 1)]), &tri, true).unwrap();
        assert_eq!(past.position, Position::Outside);

        // Open degenerate simplices are empty.
        let open = point_in_simplex_exact(&pt(&[(1, 1), (1, 1)]), &tri, false).unwrap();
        assert_eq!(
            open,
            SimplexClass {
                position: Position::Outside,
                degenerate: true
            }
        );
    }

    #[test]
    fn tetrahedron_membership() {
        let tet = vec![
            pt(&[(0, 1), (0, 1), (0, 1)]),
            pt(&[(1, 1), (0, 1), (0, 1)]),
            pt(&[(0, 1), (1, 1), (0, 1)]),
            pt(&[(0, 1), (0, 1), (1, 1)]),
        ];
        let inside = point_in_simplex_exact(&pt(&[(1, 5), (1, 5), (1, 5)]), &tet, true).unwrap();
        assert_eq!(inside.position, Position::Inside);
        let outside = point_in_simplex_exact(&pt(&[(1, 1), (1, 1), (1, 1)]), &tet, true).unwrap();
        assert_eq!(outside.position, Position::Outside);
    }

    #[test]
    fn float_path_agrees_on_clear_cases() {
        let tri = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let inside = point_in_simplex_f64(&[0.25, 0.25], &tri, 1e-9).unwrap();
        assert_eq!(inside.position, Position::Inside);
        let outside = point_in_simplex_f64(&[1.0, 1.0], &tri, 1e-9).unwrap();
        assert_eq!(outside.position, Position::Outside);
    }

    #[test]
    fn affine_map_preserves_exact_classification() {
        let tri = unit_triangle();
        // x -> (2x + 3y + 1, x - y + 5), determinant -5.
        let map = |v: &[Rat]| -> Vec<Rat> {
            vec![
                rat_int(2) * &v[0] + rat_int(3) * &v[1] + rat_int(1),
                v[0].clone() - &v[1] + rat_int(5),
            ]
        };
        for p in [
            pt(&[(1, 4), (1, 4)]),
            pt(&[(1, 1), (1, 1)]),
            pt(&[(1, 2), (0, 1)]),
        ] {
            let before = point_in_simplex_exact(&p, &tri, true).unwrap();
            let tri2: Vec<Vec<Rat>> = tri.iter().map(|v| map(v)).collect();
            let after = point_in_simplex_exact(&map(&p), &tri2, true).unwrap();
            assert_eq!(before, after);
        }
    }

    #[test]
    fn dimension_guards() {
        let tri = unit_triangle();
        assert!(point_in_simplex_exact(&pt(&[(0, 1)]), &tri, true).is_err());
        assert!(point_in_simplex_exact(&pt(&[(0, 1), (0, 1), (0, 1)]), &tri, true).is_err());
    }

    #[test]
    fn segment_intersections() {
        let a = [rat_int(0), rat_int(0)];
        let b = [rat_int(2), rat_int(2)];
        let c = [rat_int(0), rat_int(2)];
        let d = [rat_int(2), rat_int(0)];
        let x = segment_intersection_exact(&a, &b, &c, &d).unwrap();
        assert_eq!(x, [rat_int(1), rat_int(1)]);

        // Disjoint spans.
        let e = [rat_int(3), rat_int(0)];
        let f = [rat_int(4), rat_int(0)];
        assert!(segment_intersection_exact(&a, &b, &e, &f).is_none());

        // Collinear overlap is deliberately None.
        let g = [rat_int(1), rat_int(1)];
        let h = [rat_int(3), rat_int(3)];
        assert!(segment_intersection_exact(&a, &b, &g, &h).is_none());

        // Endpoint touch counts.
        let x = segment_intersection_exact(&a, &b, &b, &d).unwrap();
        assert_eq!(x, [rat_int(2), rat_int(2)]);
    }

    #[test]
    fn scaled_triangle_path_agrees_with_generic_path() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        let small = |rng: &mut rand_chacha::ChaCha8Rng| {
            rat(rng.gen_range(-6i64..=6), rng.gen_range(1i64..=6))
        };
        let mut checked = 0;
        while checked < 500 {
            let tri: Vec<Vec<Rat>> = (0..3)
                .map(|_| vec![small(&mut rng), small(&mut rng)])
                .collect();
            let p = vec![small(&mut rng), small(&mut rng)];
            let scaled = [
                ScaledPoint::new(&tri[0]),
                ScaledPoint::new(&tri[1]),
                ScaledPoint::new(&tri[2]),
            ];
            let Some(fast) = point_in_triangle_scaled(&ScaledPoint::new(&p), &scaled) else {
                continue; // degenerate triangle: fast path defers
            };
            let generic = point_in_simplex_exact(&p, &tri, true).unwrap();
            assert_eq!(fast, generic, "p={p:?} tri={tri:?}");
            checked += 1;
        }
    }

    #[test]
    fn scaled_path_defers_on_degenerate_triangles() {
        let tri = vec![
            pt(&[(0, 1), (0, 1)]),
            pt(&[(1, 1), (1, 1)]),
            pt(&[(2, 1), (2, 1)]),
        ];
        let scaled = [
            ScaledPoint::new(&tri[0]),
            ScaledPoint::new(&tri[1]),
            ScaledPoint::new(&tri[2]),
        ];
        assert!(
            point_in_triangle_scaled(&ScaledPoint::new(&pt(&[(1, 1), (1, 1)])), &scaled).is_none()
        );
    }

    #[test]
    fn lp_feasibility_matches_direct_reasoning() {
        // Segment from (0,0) to (2,2) in the plane: hull membership of (1,1)
        // with an extra duplicated point, an affinely dependent input.
        let seg = vec![
            pt(&[(0, 1), (0, 1)]),
            pt(&[(2, 1), (2, 1)]),
            pt(&[(1, 1), (1, 1)]),
        ];
        assert!(hull_membership(&pt(&[(1, 2), (1, 2)]), &seg));
        assert!(!hull_membership(&pt(&[(1, 2), (1, 3)]), &seg));
    }
}
