//! Discrepancy of a partite hypergraph: the largest deviation, over one
//! vertex subset per class, between the restricted edge fraction and the
//! product of subset densities.
//!
//! Three routes with different guarantees:
//! - [`discrepancy_exact`]: the true maximum in exact rationals, for small
//!   vertex totals;
//! - [`discrepancy_local_search`]: a certified lower bound from seeded hill
//!   climbing (the witness is re-evaluated exactly);
//! - [`discrepancy_spectral_bound`]: the upper bound `d * max lambda~(B_i)`,
//!   valid on type-regular complexes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::complex::{ComplexError, Regularity, TransversalView, TypedComplex, VertexId};
use crate::exec::map_indexed;
use crate::numeric::Rat;
use crate::spectral::{lambda_tilde, LambdaOptions, SpectralError};

pub const DEFAULT_EXACT_CAP: usize = 24;

#[derive(Debug, Error)]
pub enum DiscError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("selection has {got} classes, the complex has {want}")]
    ClassCountMismatch { got: usize, want: usize },
    #[error("vertex `{id}` is not in class {class}")]
    SelectionTypeMismatch { id: VertexId, class: usize },
    #[error("exact enumeration refused: {total} vertices exceed cap {cap}; use local search")]
    CapExceeded { total: usize, cap: usize },
    #[error("class {class} has {size} vertices, beyond the exact enumerator's subset masks")]
    ClassTooWide { class: usize, size: usize },
    #[error("spectral bound requires a type-regular complex; types {i:?} within {j:?} have unequal counts")]
    Irregular { i: Vec<usize>, j: Vec<usize> },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// One vertex subset per class. Empty subsets are legal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartiteSelection {
    /// `subsets[t]` = chosen type-t vertex ids, sorted.
    pub subsets: Vec<Vec<VertexId>>,
}

impl PartiteSelection {
    pub fn new(mut subsets: Vec<Vec<VertexId>>) -> Self {
        for s in &mut subsets {
            s.sort();
            s.dedup();
        }
        PartiteSelection { subsets }
    }

    pub fn full(cx: &TypedComplex) -> Self {
        let subsets = (0..=cx.d())
            .map(|t| {
                cx.class(t)
                    .iter()
                    .map(|&ix| cx.vertex(ix).id.clone())
                    .collect()
            })
            .collect();
        PartiteSelection { subsets }
    }

    /// Selected positions (into the id-sorted classes), validated.
    fn positions(
        &self,
        view: &TransversalView,
        cx: &TypedComplex,
    ) -> Result<Vec<Vec<bool>>, DiscError> {
        if self.subsets.len() != view.classes.len() {
            return Err(DiscError::ClassCountMismatch {
                got: self.subsets.len(),
                want: view.classes.len(),
            });
        }
        let mut chosen: Vec<Vec<bool>> =
            view.classes.iter().map(|c| vec![false; c.len()]).collect();
        for (t, subset) in self.subsets.iter().enumerate() {
            for id in subset {
                let pos = view.classes[t]
                    .iter()
                    .position(|&ix| &cx.vertex(ix).id == id)
                    .ok_or_else(|| DiscError::SelectionTypeMismatch {
                        id: id.clone(),
                        class: t,
                    })?;
                chosen[t][pos] = true;
            }
        }
        Ok(chosen)
    }
}

/// Number of chambers that are transversals of the selection.
pub fn restricted_edge_count(
    cx: &TypedComplex,
    sel: &PartiteSelection,
) -> Result<usize, DiscError> {
    let view = cx.transversal_view()?;
    let chosen = sel.positions(&view, cx)?;
    Ok(view
        .chamber_pos
        .iter()
        .filter(|pos| pos.iter().enumerate().all(|(t, &p)| chosen[t][p as usize]))
        .count())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscMethod {
    Exact,
    LocalSearch,
}

#[derive(Debug, Clone)]
pub struct DiscrepancyResult {
    /// Exact deviation attained by the witness. For local search this is a
    /// certified lower bound on the discrepancy.
    pub value: Rat,
    pub witness: PartiteSelection,
    pub method: DiscMethod,
}

impl DiscrepancyResult {
    pub fn value_f64(&self) -> f64 {
        crate::numeric::rat_to_f64(&self.value)
    }
}

struct ExactCtx<'a> {
    view: &'a TransversalView,
    /// Classes enumerated by subset masks, ascending class index.
    outer: Vec<usize>,
    /// The widest class, handled by the prefix-sum step instead of masks.
    last: usize,
    e: i128,
    p_total: i128,
}

#[derive(Debug, Clone)]
struct BestCell {
    /// |count * P - E * prod(sizes)| over the common denominator E * P.
    dev: i128,
    outer_masks: Vec<u64>,
    inner: Vec<u32>,
}

/// Exact discrepancy by class-by-class subset enumeration. The widest class
/// is never enumerated: for fixed outer subsets the deviation is linear in
/// the restricted count, so per subset size only the top and bottom count
/// sums can attain the maximum.
pub fn discrepancy_exact(cx: &TypedComplex) -> Result<DiscrepancyResult, DiscError> {
    discrepancy_exact_with_cap(cx, DEFAULT_EXACT_CAP)
}

pub fn discrepancy_exact_with_cap(
    cx: &TypedComplex,
    cap: usize,
) -> Result<DiscrepancyResult, DiscError> {
    let view = cx.transversal_view()?;
    let total: usize = view.classes.iter().map(Vec::len).sum();
    if total > cap {
        return Err(DiscError::CapExceeded { total, cap });
    }
    let last = view
        .classes
        .iter()
        .enumerate()
        .max_by_key(|(t, c)| (c.len(), usize::MAX - t))
        .map(|(t, _)| t)
        .expect("at least two classes");
    for (t, class) in view.classes.iter().enumerate() {
        if t != last && class.len() > 63 {
            return Err(DiscError::ClassTooWide {
                class: t,
                size: class.len(),
            });
        }
    }
    let outer: Vec<usize> = (0..view.classes.len()).filter(|&t| t != last).collect();
    let e = view.chamber_pos.len() as i128;
    let p_total: i128 = view.classes.iter().map(|c| c.len() as i128).product();
    let ctx = ExactCtx {
        view: &view,
        outer,
        last,
        e,
        p_total,
    };

    // Parallelize over the first outer class; everything below is ordered, so
    // the fold is deterministic.
    let first = ctx.outer[0];
    let first_size = ctx.view.classes[first].len();
    let all_chambers: Vec<u32> = (0..ctx.view.chamber_pos.len() as u32).collect();
    let branch_bests = map_indexed(1usize << first_size, |mask| {
        let mask = mask as u64;
        let alive = filter_alive(ctx.view, &all_chambers, first, mask);
        let mut best: Option<BestCell> = None;
        let mut masks = vec![mask];
        recurse_exact(
            &ctx,
            1,
            &alive,
            &mut masks,
            (mask.count_ones() as i128, 1),
            &mut best,
        );
        best
    });
    let best = branch_bests
        .into_iter()
        .flatten()
        .reduce(|a, b| if b.dev > a.dev { b } else { a })
        .expect("enumeration visits at least the empty selection");

    let witness = reconstruct_witness(cx, &ctx, &best);
    let value = Rat::new(best.dev.into(), (ctx.e * ctx.p_total).into());
    debug_assert_eq!(
        exact_value_of(cx, &witness).expect("witness is well-formed"),
        value
    );
    Ok(DiscrepancyResult {
        value,
        witness,
        method: DiscMethod::Exact,
    })
}

fn filter_alive(view: &TransversalView, alive: &[u32], class: usize, mask: u64) -> Vec<u32> {
    alive
        .iter()
        .copied()
        .filter(|&c| mask >> view.chamber_pos[c as usize][class] & 1 == 1)
        .collect()
}

/// `sizes_so_far` = (sum-of-bits bookkeeping, product of selected sizes).
fn recurse_exact(
    ctx: &ExactCtx<'_>,
    depth: usize,
    alive: &[u32],
    masks: &mut Vec<u64>,
    sizes_so_far: (i128, i128),
    best: &mut Option<BestCell>,
) {
    let (_, s_prev_prod) = sizes_so_far;
    if depth == ctx.outer.len() {
        leaf_maximize(ctx, alive, masks, s_prev_prod, best);
        return;
    }
    let class = ctx.outer[depth];
    let size = ctx.view.classes[class].len();
    for mask in 0..(1u64 << size) {
        let next_alive = filter_alive(ctx.view, alive, class, mask);
        masks.push(mask);
        recurse_exact(
            ctx,
            depth + 1,
            &next_alive,
            masks,
            (0, s_prev_prod * mask.count_ones() as i128),
            best,
        );
        masks.pop();
    }
}

fn leaf_maximize(
    ctx: &ExactCtx<'_>,
    alive: &[u32],
    masks: &[u64],
    s_prev_prod_partial: i128,
    best: &mut Option<BestCell>,
) {
    // Product of outer subset sizes: masks align with ctx.outer.
    let s_prev: i128 = masks.iter().map(|m| m.count_ones() as i128).product();
    let _ = s_prev_prod_partial;
    let last_size = ctx.view.classes[ctx.last].len();
    let mut counts = vec![0i128; last_size];
    for &c in alive {
        counts[ctx.view.chamber_pos[c as usize][ctx.last] as usize] += 1;
    }
    let mut order: Vec<u32> = (0..last_size as u32).collect();
    order.sort_by_key(|&p| (-counts[p as usize], p));

    let mut top_prefix = Vec::with_capacity(last_size + 1);
    let mut bot_prefix = Vec::with_capacity(last_size + 1);
    top_prefix.push(0i128);
    bot_prefix.push(0i128);
    for i in 0..last_size {
        top_prefix.push(top_prefix[i] + counts[order[i] as usize]);
        bot_prefix.push(bot_prefix[i] + counts[order[last_size - 1 - i] as usize]);
    }

    for s in 0..=last_size {
        let expected = ctx.e * s_prev * s as i128;
        for (sum, from_top) in [(top_prefix[s], true), (bot_prefix[s], false)] {
            let dev = (sum * ctx.p_total - expected).abs();
            if best.as_ref().is_none_or(|b| dev > b.dev) {
                let inner: Vec<u32> = if from_top {
                    order[..s].to_vec()
                } else {
                    order[last_size - s..].to_vec()
                };
                *best = Some(BestCell {
                    dev,
                    outer_masks: masks.to_vec(),
                    inner,
                });
            }
        }
    }
}

fn reconstruct_witness(cx: &TypedComplex, ctx: &ExactCtx<'_>, best: &BestCell) -> PartiteSelection {
    let mut subsets = vec![Vec::new(); ctx.view.classes.len()];
    for (level, &class) in ctx.outer.iter().enumerate() {
        let mask = best.outer_masks[level];
        subsets[class] = ctx.view.classes[class]
            .iter()
            .enumerate()
            .filter(|(p, _)| mask >> p & 1 == 1)
            .map(|(_, &ix)| cx.vertex(ix).id.clone())
            .collect();
    }
    subsets[ctx.last] = best
        .inner
        .iter()
        .map(|&p| cx.vertex(ctx.view.classes[ctx.last][p as usize]).id.clone())
        .collect();
    PartiteSelection::new(subsets)
}

/// Exact deviation of one particular selection.
pub fn exact_value_of(cx: &TypedComplex, sel: &PartiteSelection) -> Result<Rat, DiscError> {
    let count = restricted_edge_count(cx, sel)? as i128;
    let e = cx.chambers().len() as i128;
    let sizes = cx.class_sizes();
    let p: i128 = sizes.iter().map(|&s| s as i128).product();
    let chosen: i128 = sel.subsets.iter().map(|s| s.len() as i128).product();
    Ok(Rat::new(
        (count * p - e * chosen).abs().into(),
        (e * p).into(),
    ))
}

/// Seeded hill climbing over single-vertex toggles; strict improvements only,
/// ties broken by lowest vertex id. Restarts run independently and the best
/// witness wins (earliest restart on ties). The returned value is exact for
/// its witness, hence a certified lower bound on the discrepancy.
pub fn discrepancy_local_search(
    cx: &TypedComplex,
    restarts: usize,
    seed: u64,
) -> Result<DiscrepancyResult, DiscError> {
    let view = cx.transversal_view()?;
    let e = view.chamber_pos.len() as i128;
    let p_total: i128 = view.classes.iter().map(|c| c.len() as i128).product();

    // Chambers incident to each (class, position).
    let incident: Vec<Vec<Vec<u32>>> = view
        .classes
        .iter()
        .enumerate()
        .map(|(t, class)| {
            let mut lists = vec![Vec::new(); class.len()];
            for (c, pos) in view.chamber_pos.iter().enumerate() {
                lists[pos[t] as usize].push(c as u32);
            }
            lists
        })
        .collect();

    // Global toggle order: ascending vertex id.
    let mut scan: Vec<(usize, usize)> = view
        .classes
        .iter()
        .enumerate()
        .flat_map(|(t, class)| (0..class.len()).map(move |p| (t, p)))
        .collect();
    scan.sort_by(|&(t1, p1), &(t2, p2)| {
        cx.vertex(view.classes[t1][p1])
            .id
            .cmp(&cx.vertex(view.classes[t2][p2]).id)
    });

    let runs = map_indexed(restarts.max(1), |r| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r as u64);
        climb(&view, &incident, &scan, e, p_total, &mut rng)
    });
    let (dev, selected) = runs
        .into_iter()
        .reduce(|a, b| if b.0 > a.0 { b } else { a })
        .expect("at least one restart");

    let subsets = selected
        .iter()
        .enumerate()
        .map(|(t, sel)| {
            sel.iter()
                .enumerate()
                .filter(|(_, &s)| s)
                .map(|(p, _)| cx.vertex(view.classes[t][p]).id.clone())
                .collect()
        })
        .collect();
    let witness = PartiteSelection::new(subsets);
    let value = Rat::new(dev.into(), (e * p_total).into());
    debug_assert_eq!(
        exact_value_of(cx, &witness).expect("witness well-formed"),
        value
    );
    Ok(DiscrepancyResult {
        value,
        witness,
        method: DiscMethod::LocalSearch,
    })
}

fn climb(
    view: &TransversalView,
    incident: &[Vec<Vec<u32>>],
    scan: &[(usize, usize)],
    e: i128,
    p_total: i128,
    rng: &mut ChaCha8Rng,
) -> (i128, Vec<Vec<bool>>) {
    let mut selected: Vec<Vec<bool>> = view
        .classes
        .iter()
        .map(|c| (0..c.len()).map(|_| rng.gen_bool(0.5)).collect())
        .collect();
    let mut sizes: Vec<i128> = selected
        .iter()
        .map(|s| s.iter().filter(|&&b| b).count() as i128)
        .collect();
    // missing[c] = number of classes whose vertex of chamber c is unselected.
    let mut missing: Vec<u32> = view
        .chamber_pos
        .iter()
        .map(|pos| {
            pos.iter()
                .enumerate()
                .filter(|&(t, &p)| !selected[t][p as usize])
                .count() as u32
        })
        .collect();
    let mut count: i128 = missing.iter().filter(|&&m| m == 0).count() as i128;

    let dev_of = |count: i128, sizes: &[i128]| -> i128 {
        let prod: i128 = sizes.iter().product();
        (count * p_total - e * prod).abs()
    };
    let mut current = dev_of(count, &sizes);

    loop {
        let mut best_gain: Option<(i128, usize)> = None;
        for (ix, &(t, p)) in scan.iter().enumerate() {
            let adding = !selected[t][p];
            let delta: i128 = incident[t][p]
                .iter()
                .filter(|&&c| missing[c as usize] == if adding { 1 } else { 0 })
                .count() as i128;
            let new_count = if adding { count + delta } else { count - delta };
            let mut new_sizes = sizes.clone();
            new_sizes[t] += if adding { 1 } else { -1 };
            let dev = dev_of(new_count, &new_sizes);
            if dev > current && best_gain.is_none_or(|(bd, _)| dev > bd) {
                best_gain = Some((dev, ix));
            }
        }
        let Some((dev, ix)) = best_gain else { break };
        let (t, p) = scan[ix];
        let adding = !selected[t][p];
        for &c in &incident[t][p] {
            if adding {
                missing[c as usize] -= 1;
                if missing[c as usize] == 0 {
                    count += 1;
                }
            } else {
                if missing[c as usize] == 0 {
                    count -= 1;
                }
                missing[c as usize] += 1;
            }
        }
        selected[t][p] = adding;
        sizes[t] += if adding { 1 } else { -1 };
        current = dev;
    }
    (current, selected)
}

/// The mixing upper bound `d * max_i lambda~(B_i)`, refused on complexes that
/// are not type-regular (outside the inequality's hypothesis).
///
/// A disconnected `B_i` contributes 1: the second largest eigenvalue of a
/// disconnected graph equals the top one, so the bound goes vacuous rather
/// than silently using per-component values.
#[derive(Debug, Clone)]
pub struct SpectralBound {
    pub value: f64,
    pub per_type: Vec<f64>,
    /// True when every per-type eigenvalue was certified zero exactly, so the
    /// bound is an exact zero rather than eigensolver output.
    pub exact_zero: bool,
}

pub fn discrepancy_spectral_bound(
    cx: &TypedComplex,
    opts: &LambdaOptions,
) -> Result<SpectralBound, DiscError> {
    for ((i, j), reg) in cx.type_regularity() {
        if matches!(reg, Regularity::Irregular { .. }) {
            return Err(DiscError::Irregular { i, j });
        }
    }
    let mut per_type = Vec::with_capacity(cx.d() + 1);
    let mut exact_zero = true;
    for i in 0..=cx.d() {
        let g = cx.induced_bipartite(i)?;
        let r = lambda_tilde(&g, opts)?;
        if r.connected {
            exact_zero &= r.exact_zero;
            per_type.push(r.value);
        } else {
            exact_zero = false;
            per_type.push(1.0);
        }
    }
    let max = per_type.iter().cloned().fold(0.0f64, f64::max);
    Ok(SpectralBound {
        value: cx.d() as f64 * max,
        per_type,
        exact_zero,
    })
}
