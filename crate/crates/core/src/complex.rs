//! Typed pure simplicial complexes stored by their chamber lists.
//!
//! A `TypedComplex` of dimension `d` is a `(d+1)`-partite hypergraph in
//! disguise: vertices carry a type label in `0..=d`, chambers are
//! `(d+1)`-sets on which the type labels are a bijection. Chambers are the
//! source of truth; walls and lower faces are derived on demand.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bipartite::BipartiteGraph;

/// Opaque vertex identifier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub String);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for VertexId {
    fn from(s: &str) -> Self {
        VertexId(s.to_owned())
    }
}

impl From<String> for VertexId {
    fn from(s: String) -> Self {
        VertexId(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub id: VertexId,
    pub vtype: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ComplexError {
    #[error("dimension must be at least 1, got {0}")]
    BadDimension(usize),
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertexId(VertexId),
    #[error("vertex `{id}` has type {label}, outside 0..={d}")]
    TypeOutOfRange {
        id: VertexId,
        label: usize,
        d: usize,
    },
    #[error("chamber {index} references unknown vertex id `{id}`")]
    UnknownVertexId { index: usize, id: VertexId },
    #[error("type label {label} out of range for dimension {d}")]
    InvalidTypeLabel { label: usize, d: usize },
    #[error("complex fails validation: {0}")]
    NotValid(ValidationReport),
}

/// One violated invariant, with the offending ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Violation {
    NoChambers,
    ChamberSize {
        chamber: usize,
        size: usize,
        expected: usize,
    },
    TypeNotBijective {
        chamber: usize,
        types: Vec<usize>,
    },
    DuplicateChamber {
        chamber: usize,
        first: usize,
    },
    IsolatedVertex {
        id: VertexId,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoChambers => write!(f, "no chambers"),
            Violation::ChamberSize {
                chamber,
                size,
                expected,
            } => {
                write!(
                    f,
                    "chamber {chamber} has {size} vertices, expected {expected}"
                )
            }
            Violation::TypeNotBijective { chamber, types } => {
                write!(
                    f,
                    "type function not injective on chamber {chamber} (types {types:?})"
                )
            }
            Violation::DuplicateChamber { chamber, first } => {
                write!(f, "chamber {chamber} duplicates chamber {first}")
            }
            Violation::IsolatedVertex { id } => {
                write!(f, "vertex `{id}` lies in no chamber")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// A `(d-1)`-face missing exactly one type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Wall {
    /// Sorted vertex ids of the wall.
    pub vertex_ids: Vec<VertexId>,
    /// The missing type.
    pub cotype: usize,
}

/// Per-type-set regularity: the common containment count, or a witness pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Regularity {
    Regular(u64),
    Irregular {
        face_a: Vec<VertexId>,
        count_a: u64,
        face_b: Vec<VertexId>,
        count_b: u64,
    },
}

pub type RegularityMap = BTreeMap<(Vec<usize>, Vec<usize>), Regularity>;

/// Pure `d`-dimensional simplicial complex with typed vertices, stored via its
/// chamber list. Construction resolves ids; semantic invariants are checked by
/// [`TypedComplex::validate`]. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedComplex {
    d: usize,
    vertices: Vec<Vertex>,
    /// Chambers as sorted vertex indices (duplicates kept for the validator).
    chambers: Vec<Vec<u32>>,
}

impl TypedComplex {
    /// Build from raw parts. Rejects only structurally unrepresentable input
    /// (duplicate ids, unknown references, out-of-range type labels); the
    /// semantic invariants are reported by [`Self::validate`].
    pub fn from_parts(
        d: usize,
        vertices: Vec<(VertexId, usize)>,
        chambers: Vec<Vec<VertexId>>,
    ) -> Result<Self, ComplexError> {
        if d < 1 {
            return Err(ComplexError::BadDimension(d));
        }
        let mut index: HashMap<VertexId, u32> = HashMap::with_capacity(vertices.len());
        let mut verts = Vec::with_capacity(vertices.len());
        for (id, vtype) in vertices {
            if vtype > d {
                return Err(ComplexError::TypeOutOfRange {
                    id,
                    label: vtype,
                    d,
                });
            }
            if index.insert(id.clone(), verts.len() as u32).is_some() {
                return Err(ComplexError::DuplicateVertexId(id));
            }
            verts.push(Vertex { id, vtype });
        }
        let mut chs = Vec::with_capacity(chambers.len());
        for (ci, chamber) in chambers.into_iter().enumerate() {
            let mut resolved = Vec::with_capacity(chamber.len());
            for id in chamber {
                match index.get(&id) {
                    Some(&ix) => resolved.push(ix),
                    None => return Err(ComplexError::UnknownVertexId { index: ci, id }),
                }
            }
            resolved.sort_unstable();
            chs.push(resolved);
        }
        Ok(TypedComplex {
            d,
            vertices: verts,
            chambers: chs,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, ix: u32) -> &Vertex {
        &self.vertices[ix as usize]
    }

    pub fn vertex_index(&self, id: &VertexId) -> Option<u32> {
        self.vertices
            .iter()
            .position(|v| &v.id == id)
            .map(|p| p as u32)
    }

    /// Chambers as sorted vertex-index lists.
    pub fn chambers(&self) -> &[Vec<u32>] {
        &self.chambers
    }

    pub fn chamber_ids(&self, c: usize) -> Vec<&VertexId> {
        self.chambers[c]
            .iter()
            .map(|&ix| &self.vertices[ix as usize].id)
            .collect()
    }

    /// Vertex indices of one type class, sorted by id.
    pub fn class(&self, t: usize) -> Vec<u32> {
        let mut ixs: Vec<u32> = (0..self.vertices.len() as u32)
            .filter(|&ix| self.vertices[ix as usize].vtype == t)
            .collect();
        ixs.sort_by(|&a, &b| {
            self.vertices[a as usize]
                .id
                .cmp(&self.vertices[b as usize].id)
        });
        ixs
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.d + 1];
        for v in &self.vertices {
            sizes[v.vtype] += 1;
        }
        sizes
    }

    /// Check every semantic invariant; the report is empty iff the complex is
    /// valid.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.chambers.is_empty() {
            violations.push(Violation::NoChambers);
        }
        let mut seen: HashMap<&[u32], usize> = HashMap::new();
        let mut in_chamber = vec![false; self.vertices.len()];
        for (ci, ch) in self.chambers.iter().enumerate() {
            if ch.len() != self.d + 1 {
                violations.push(Violation::ChamberSize {
                    chamber: ci,
                    size: ch.len(),
                    expected: self.d + 1,
                });
            } else {
                let mut types: Vec<usize> = ch
                    .iter()
                    .map(|&ix| self.vertices[ix as usize].vtype)
                    .collect();
                types.sort_unstable();
                if types.iter().enumerate().any(|(want, &got)| want != got) {
                    violations.push(Violation::TypeNotBijective { chamber: ci, types });
                }
            }
            match seen.get(ch.as_slice()) {
                Some(&first) => violations.push(Violation::DuplicateChamber { chamber: ci, first }),
                None => {
                    seen.insert(ch.as_slice(), ci);
                }
            }
            for &ix in ch {
                in_chamber[ix as usize] = true;
            }
        }
        for (ix, covered) in in_chamber.iter().enumerate() {
            if !covered {
                violations.push(Violation::IsolatedVertex {
                    id: self.vertices[ix].id.clone(),
                });
            }
        }
        ValidationReport { violations }
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_valid()
    }

    /// Validate and return self, or the report as an error.
    pub fn validated(self) -> Result<Self, ComplexError> {
        let report = self.validate();
        if report.is_valid() {
            Ok(self)
        } else {
            Err(ComplexError::NotValid(report))
        }
    }

    fn check_type(&self, i: usize) -> Result<(), ComplexError> {
        if i > self.d {
            return Err(ComplexError::InvalidTypeLabel {
                label: i,
                d: self.d,
            });
        }
        Ok(())
    }

    /// Ranks of vertex indices under id ordering, for canonical face keys.
    fn id_ranks(&self) -> Vec<u32> {
        let mut order: Vec<u32> = (0..self.vertices.len() as u32).collect();
        order.sort_by(|&a, &b| {
            self.vertices[a as usize]
                .id
                .cmp(&self.vertices[b as usize].id)
        });
        let mut rank = vec![0u32; self.vertices.len()];
        for (r, &ix) in order.iter().enumerate() {
            rank[ix as usize] = r as u32;
        }
        rank
    }

    /// The distinct `i`-cotype walls, canonically ordered by their id tuples.
    ///
    /// Assumes a valid complex; chambers that are not type-transversal are
    /// skipped.
    pub fn walls(&self, i: usize) -> Result<Vec<Wall>, ComplexError> {
        self.check_type(i)?;
        let rank = self.id_ranks();
        let mut keys: BTreeSet<Vec<u32>> = BTreeSet::new();
        for ch in &self.chambers {
            if let Some(face) = self.cotype_face(ch, i) {
                let mut key: Vec<u32> = face.iter().map(|&ix| rank[ix as usize]).collect();
                key.sort_unstable();
                keys.insert(key);
            }
        }
        let order: Vec<u32> = {
            let mut order: Vec<u32> = (0..self.vertices.len() as u32).collect();
            order.sort_by(|&a, &b| {
                self.vertices[a as usize]
                    .id
                    .cmp(&self.vertices[b as usize].id)
            });
            order
        };
        Ok(keys
            .into_iter()
            .map(|key| Wall {
                vertex_ids: key
                    .iter()
                    .map(|&r| self.vertices[order[r as usize] as usize].id.clone())
                    .collect(),
                cotype: i,
            })
            .collect())
    }

    /// The `d` vertices of `ch` avoiding type `i`, if `ch` is a transversal.
    fn cotype_face(&self, ch: &[u32], i: usize) -> Option<Vec<u32>> {
        if ch.len() != self.d + 1 {
            return None;
        }
        let mut seen = vec![false; self.d + 1];
        for &ix in ch {
            let t = self.vertices[ix as usize].vtype;
            if seen[t] {
                return None;
            }
            seen[t] = true;
        }
        Some(
            ch.iter()
                .copied()
                .filter(|&ix| self.vertices[ix as usize].vtype != i)
                .collect(),
        )
    }

    /// The bipartite graph of `i`-type vertices versus `i`-cotype walls, with
    /// an edge when their union is a chamber. Edge count equals chamber count
    /// on valid complexes.
    pub fn induced_bipartite(&self, i: usize) -> Result<BipartiteGraph, ComplexError> {
        self.check_type(i)?;
        let rank = self.id_ranks();
        let left = self.class(i);
        let left_pos: HashMap<u32, u32> = left
            .iter()
            .enumerate()
            .map(|(p, &ix)| (ix, p as u32))
            .collect();
        let walls = self.walls(i)?;
        let wall_pos: HashMap<Vec<u32>, u32> = walls
            .iter()
            .enumerate()
            .map(|(p, w)| {
                let mut key: Vec<u32> = w
                    .vertex_ids
                    .iter()
                    .map(|id| {
                        self.vertex_index(id)
                            .expect("wall ids come from the complex")
                    })
                    .map(|ix| rank[ix as usize])
                    .collect();
                key.sort_unstable();
                (key, p as u32)
            })
            .collect();
        let mut edges = BTreeSet::new();
        for ch in &self.chambers {
            let Some(face) = self.cotype_face(ch, i) else {
                continue;
            };
            let v = ch
                .iter()
                .copied()
                .find(|&ix| self.vertices[ix as usize].vtype == i)
                .expect("transversal chamber has a type-i vertex");
            let mut key: Vec<u32> = face.iter().map(|&ix| rank[ix as usize]).collect();
            key.sort_unstable();
            edges.insert((left_pos[&v], wall_pos[&key]));
        }
        let left_ids: Vec<VertexId> = left
            .iter()
            .map(|&ix| self.vertices[ix as usize].id.clone())
            .collect();
        let right_labels: Vec<String> = walls
            .iter()
            .map(|w| {
                w.vertex_ids
                    .iter()
                    .map(|id| id.0.as_str())
                    .collect::<Vec<_>>()
                    .join("|")
            })
            .collect();
        let edges: Vec<(u32, u32)> = edges.into_iter().collect();
        BipartiteGraph::new(left_ids, right_labels, &edges)
            .map_err(|e| unreachable!("induced graph is well-formed by construction: {e}"))
    }

    /// For every pair `I ⊆ J` of type sets, the common number of `J`-type
    /// faces containing each `I`-type face, or an irregularity witness.
    pub fn type_regularity(&self) -> RegularityMap {
        let r = self.d + 1;
        let mut map = RegularityMap::new();
        for j_mask in 0u32..(1 << r) {
            // Distinct J-type faces, as sorted index tuples.
            let mut j_faces: BTreeSet<Vec<u32>> = BTreeSet::new();
            for ch in &self.chambers {
                if let Some(face) = self.typed_subface(ch, j_mask) {
                    j_faces.insert(face);
                }
            }
            let mut i_mask = j_mask;
            loop {
                // Count, for each I-face, the distinct J-faces above it.
                let mut counts: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
                for jf in &j_faces {
                    let proj: Vec<u32> = jf
                        .iter()
                        .copied()
                        .filter(|&ix| i_mask >> self.vertices[ix as usize].vtype & 1 == 1)
                        .collect();
                    *counts.entry(proj).or_insert(0) += 1;
                }
                let entry = regularity_of(&counts, |face| {
                    face.iter()
                        .map(|&ix| self.vertices[ix as usize].id.clone())
                        .collect()
                });
                map.insert((mask_to_types(i_mask, r), mask_to_types(j_mask, r)), entry);
                if i_mask == 0 {
                    break;
                }
                i_mask = (i_mask - 1) & j_mask;
            }
        }
        map
    }

    pub fn is_type_regular(&self) -> bool {
        self.type_regularity()
            .values()
            .all(|r| matches!(r, Regularity::Regular(_)))
    }

    /// The sub-face of `ch` on the types of `mask`, if `ch` is a transversal.
    fn typed_subface(&self, ch: &[u32], mask: u32) -> Option<Vec<u32>> {
        if ch.len() != self.d + 1 {
            return None;
        }
        let mut seen = vec![false; self.d + 1];
        for &ix in ch {
            let t = self.vertices[ix as usize].vtype;
            if seen[t] {
                return None;
            }
            seen[t] = true;
        }
        Some(
            ch.iter()
                .copied()
                .filter(|&ix| mask >> self.vertices[ix as usize].vtype & 1 == 1)
                .collect(),
        )
    }
}

fn mask_to_types(mask: u32, r: usize) -> Vec<usize> {
    (0..r).filter(|t| mask >> t & 1 == 1).collect()
}

fn regularity_of<F>(counts: &BTreeMap<Vec<u32>, u64>, ids_of: F) -> Regularity
where
    F: Fn(&[u32]) -> Vec<VertexId>,
{
    let mut iter = counts.iter();
    let Some((first_face, &first_count)) = iter.next() else {
        // No faces of type I at all (empty complex slice): trivially regular.
        return Regularity::Regular(0);
    };
    for (face, &count) in iter {
        if count != first_count {
            return Regularity::Irregular {
                face_a: ids_of(first_face),
                count_a: first_count,
                face_b: ids_of(face),
                count_b: count,
            };
        }
    }
    Regularity::Regular(first_count)
}

/// Chambers re-expressed as one vertex position per type class.
///
/// Positions index into `classes[t]` (id-sorted). Only valid complexes admit
/// this view.
#[derive(Debug, Clone)]
pub struct TransversalView {
    pub classes: Vec<Vec<u32>>,
    /// `chamber_pos[c][t]` = position of chamber `c`'s type-`t` vertex.
    pub chamber_pos: Vec<Vec<u32>>,
}

impl TypedComplex {
    pub fn transversal_view(&self) -> Result<TransversalView, ComplexError> {
        let report = self.validate();
        if !report.is_valid() {
            return Err(ComplexError::NotValid(report));
        }
        let classes: Vec<Vec<u32>> = (0..=self.d).map(|t| self.class(t)).collect();
        let mut pos_of = vec![0u32; self.vertices.len()];
        for class in &classes {
            for (p, &ix) in class.iter().enumerate() {
                pos_of[ix as usize] = p as u32;
            }
        }
        let chamber_pos = self
            .chambers
            .iter()
            .map(|ch| {
                let mut row = vec![0u32; self.d + 1];
                for &ix in ch {
                    row[self.vertices[ix as usize].vtype] = pos_of[ix as usize];
                }
                row
            })
            .collect();
        Ok(TransversalView {
            classes,
            chamber_pos,
        })
    }
}
