//! The explicit constant chain: maximal finite reflection-group orders,
//! the PGL2 spherical-function closed form, operator-norm bounds for
//! distance-averaging operators, the resulting second-eigenvalue bound, the
//! certified overlap constants, and the composition that certifies overlap
//! from a measured spectral bound.
//!
//! Large values are carried as `coeff * q^exponent` with exact rational
//! exponents; decimal rendering happens only at report boundaries.

use std::collections::BTreeMap;

use num::bigint::BigInt;
use num::{One, Signed};
use serde::Serialize;
use thiserror::Error;

use crate::complex::TypedComplex;
use crate::discrepancy::{discrepancy_spectral_bound, DiscError};
use crate::numeric::{log10_bigint, log10_rat, rat_to_f64, Rat, SciValue};
use crate::spectral::LambdaOptions;

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("rank {0} overflows the order table")]
    Overflow(usize),
    #[error("rank-2 finite reflection groups have unbounded order; no maximum exists in all-finite mode")]
    UnboundedRank2,
    #[error("rank must be at least {min}, got {got}")]
    RankTooSmall { got: usize, min: usize },
    #[error("q must be at least 2, got {0}")]
    BadQ(u64),
    #[error("walk half-length n must be at least 1")]
    BadN,
    #[error("k = {k} exceeds n = {n}")]
    KBeyondN { k: u64, n: u64 },
    #[error("selection-density constant must lie strictly between 0 and 1, got {0}")]
    BadPachConstant(String),
    #[error(transparent)]
    Disc(#[from] DiscError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoxeterMode {
    /// Weyl groups only (A, B/C, D, G2, F4, E6, E7, E8) - the groups that
    /// occur as spherical Weyl groups of affine buildings.
    Crystallographic,
    /// Additionally H3 and H4. Rank 2 is refused: the dihedral family makes
    /// the supremum infinite there.
    AllFinite,
}

fn factorial(n: usize) -> Option<u128> {
    let mut acc = 1u128;
    for k in 2..=n as u128 {
        acc = acc.checked_mul(k)?;
    }
    Some(acc)
}

/// Orders of the irreducible finite reflection groups of the given rank.
fn irreducible_orders(rank: usize, mode: CoxeterMode) -> Result<Vec<u128>, BoundsError> {
    let fail = || BoundsError::Overflow(rank);
    let fact = |n: usize| factorial(n).ok_or_else(fail);
    let mut orders = match rank {
        0 => vec![],
        1 => vec![2],
        2 => vec![6, 8, 12],
        k => {
            let a = fact(k + 1)?;
            let b = (1u128 << k).checked_mul(fact(k)?).ok_or_else(fail)?;
            let mut v = vec![a, b];
            if k >= 4 {
                v.push((1u128 << (k - 1)).checked_mul(fact(k)?).ok_or_else(fail)?);
            }
            match k {
                4 => v.push(1152),
                6 => v.push(51840),
                7 => v.push(2903040),
                8 => v.push(696729600),
                _ => {}
            }
            v
        }
    };
    if mode == CoxeterMode::AllFinite {
        match rank {
            3 => orders.push(120),
            4 => orders.push(14400),
            _ => {}
        }
    }
    Ok(orders)
}

/// Maximum order of a rank-d finite reflection group, maximized over products
/// of irreducibles whose ranks partition d.
pub fn coxeter_max_order(d: usize, mode: CoxeterMode) -> Result<u128, BoundsError> {
    if d < 1 {
        return Err(BoundsError::RankTooSmall { got: d, min: 1 });
    }
    if mode == CoxeterMode::AllFinite && d == 2 {
        return Err(BoundsError::UnboundedRank2);
    }
    let mut best = vec![1u128; d + 1];
    for r in 1..=d {
        let mut b = 0u128;
        for k in 1..=r {
            for o in irreducible_orders(k, mode)? {
                let candidate = o.checked_mul(best[r - k]).ok_or(BoundsError::Overflow(d))?;
                b = b.max(candidate);
            }
        }
        best[r] = b;
    }
    Ok(best[d])
}

/// A positive quantity `coeff * base^exponent` with exact parts.
#[derive(Debug, Clone, PartialEq)]
pub struct QPower {
    pub coeff: Rat,
    pub base: u64,
    pub exponent: Rat,
}

impl QPower {
    pub fn log10(&self) -> f64 {
        log10_rat(&self.coeff) + rat_to_f64(&self.exponent) * (self.base as f64).log10()
    }

    pub fn to_f64(&self) -> Option<f64> {
        let v = rat_to_f64(&self.coeff) * (self.base as f64).powf(rat_to_f64(&self.exponent));
        v.is_finite().then_some(v)
    }

    pub fn sci(&self) -> SciValue {
        SciValue::from_log10(self.log10())
    }

    /// A bound of at least 1 says nothing about a normalized operator.
    pub fn is_vacuous(&self) -> bool {
        self.log10() >= 0.0
    }
}

/// Spherical-function value for the rank-one group over a local field with
/// residue size q: coefficient `(n(q-1)+q+1)/(q+1)` against `q^(-n/2)`.
pub fn xi_pgl2(q: u64, n: u64) -> Result<QPower, BoundsError> {
    if q < 2 {
        return Err(BoundsError::BadQ(q));
    }
    let coeff = Rat::new(
        BigInt::from(n) * BigInt::from(q - 1) + BigInt::from(q + 1),
        BigInt::from(q + 1),
    );
    Ok(QPower {
        coeff,
        base: q,
        exponent: Rat::new((-(n as i64)).into(), 2.into()),
    })
}

/// Operator-norm bound `(2k+1) * q^(N_d - k/d)` for the radius-2k averaging
/// operator on mean-zero functions.
pub fn hecke_norm_bound(
    d: usize,
    q: u64,
    k: u64,
    mode: CoxeterMode,
) -> Result<QPower, BoundsError> {
    if d < 2 {
        return Err(BoundsError::RankTooSmall { got: d, min: 2 });
    }
    if q < 2 {
        return Err(BoundsError::BadQ(q));
    }
    let nd = coxeter_max_order(d, mode)?;
    let exponent =
        Rat::from_integer(BigInt::from(nd)) - Rat::new(BigInt::from(k), BigInt::from(d as u64));
    Ok(QPower {
        coeff: Rat::from_integer(BigInt::from(2 * k + 1)),
        base: q,
        exponent,
    })
}

/// The 2n-th root of `sum_{k=0..n} (3 N_d)^n (2k+1)`, via the exact big
/// integer `(3 N_d)^n (n+1)^2` when it is materializable and in log space
/// beyond that, together with the algebraic simplification
/// `sqrt(3 N_d) * (n+1)^(1/n)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MConstant {
    pub value: f64,
    pub sum_form: f64,
    pub closed_form: f64,
    pub log10: f64,
}

const M_CONSTANT_BIGINT_LIMIT: u64 = 20_000;

pub fn m_constant(d: usize, n: u64, mode: CoxeterMode) -> Result<MConstant, BoundsError> {
    if d < 2 {
        return Err(BoundsError::RankTooSmall { got: d, min: 2 });
    }
    if n < 1 {
        return Err(BoundsError::BadN);
    }
    let nd = coxeter_max_order(d, mode)?;
    let base = 3u128 * nd;
    let sum_form = if n <= M_CONSTANT_BIGINT_LIMIT {
        let sum = BigInt::from(base).pow(n as u32) * BigInt::from(n + 1).pow(2);
        let root = 10f64.powf(log10_bigint(&sum) / (2.0 * n as f64));
        // Snap to the exact integer root when there is one.
        let snapped = root.round();
        if snapped >= 1.0 && BigInt::from(snapped as u128).pow(2 * n as u32) == sum {
            snapped
        } else {
            root
        }
    } else {
        let log10_sum = n as f64 * (base as f64).log10() + 2.0 * ((n + 1) as f64).log10();
        10f64.powf(log10_sum / (2.0 * n as f64))
    };
    let log10_m = sum_form.log10();
    let closed_form = (base as f64).sqrt() * ((n + 1) as f64).powf(1.0 / n as f64);
    debug_assert!(
        (sum_form - closed_form).abs() <= 1e-9 * closed_form.max(1.0),
        "sum form {sum_form} vs closed form {closed_form}"
    );
    Ok(MConstant {
        value: sum_form,
        sum_form,
        closed_form,
        log10: log10_m,
    })
}

/// Upper bound `M_{d,n} * q^(-1/(2d) + N_d/(2n))` on the largest normalized
/// second eigenvalue over the type-induced graphs. Only meaningful when the
/// quotient's injectivity radius exceeds 4n; the hypothesis travels with the
/// value.
#[derive(Debug, Clone, Serialize)]
pub struct LambdaBound {
    pub m: MConstant,
    #[serde(skip)]
    pub exponent: Rat,
    pub exponent_decimal: f64,
    pub log10: f64,
    pub value: Option<f64>,
    pub vacuous: bool,
    pub hypothesis: &'static str,
}

pub const LAMBDA_BOUND_HYPOTHESIS: &str = "injectivity radius > 4n";

pub fn lambda_upper_bound(
    d: usize,
    q: u64,
    n: u64,
    mode: CoxeterMode,
) -> Result<LambdaBound, BoundsError> {
    if q < 2 {
        return Err(BoundsError::BadQ(q));
    }
    let m = m_constant(d, n, mode)?;
    let nd = coxeter_max_order(d, mode)?;
    let exponent = Rat::new(BigInt::from(-1), BigInt::from(2 * d as u64))
        + Rat::new(BigInt::from(nd), BigInt::from(2 * n));
    let exponent_decimal = rat_to_f64(&exponent);
    let log10 = m.log10 + exponent_decimal * (q as f64).log10();
    let value = (log10.abs() < 300.0).then(|| 10f64.powf(log10));
    Ok(LambdaBound {
        m,
        exponent,
        exponent_decimal,
        log10,
        value,
        vacuous: log10 >= 0.0,
        hypothesis: LAMBDA_BOUND_HYPOTHESIS,
    })
}

/// The headline constants: `epsilon = c_d^(d+1)/2` and
/// `q_0 = (2 d M_{d,2dN_d} c_d^-(d+1))^(4d)`, with the canonical walk length
/// `n = 2 d N_d` (which pins the q-exponent of the eigenvalue bound to
/// `-1/(4d)`).
#[derive(Debug, Clone)]
pub struct MainConstants {
    pub epsilon: Rat,
    pub n: u64,
    pub m: MConstant,
    pub q0_log10: f64,
    pub q0: SciValue,
}

pub fn main_constants(
    d: usize,
    c_d: &Rat,
    mode: CoxeterMode,
) -> Result<MainConstants, BoundsError> {
    if !(c_d.is_positive() && c_d < &Rat::one()) {
        return Err(BoundsError::BadPachConstant(c_d.to_string()));
    }
    let nd = coxeter_max_order(d, mode)?;
    let n_u128 = 2u128 * d as u128 * nd;
    let n: u64 = n_u128.try_into().map_err(|_| BoundsError::Overflow(d))?;
    let m = m_constant(d, n, mode)?;
    let power = d as i32 + 1;
    let epsilon = c_d.pow(power) / Rat::from_integer(2.into());
    let q0_log10 =
        4.0 * d as f64 * ((2.0 * d as f64).log10() + m.log10 + power as f64 * -log10_rat(c_d));
    Ok(MainConstants {
        epsilon,
        n,
        m,
        q0_log10,
        q0: SciValue::from_log10(q0_log10),
    })
}

/// Walk-count bound `(3 N_d)^n / q^(n-k)` as an exact rational; vacuous at 1
/// or above. Report-only for finite inputs, which lack the injectivity
/// hypothesis.
#[derive(Debug, Clone)]
pub struct WalkBound {
    pub value: Rat,
    pub vacuous: bool,
}

pub fn walk_bound_check(
    d: usize,
    q: u64,
    n: u64,
    k: u64,
    mode: CoxeterMode,
) -> Result<WalkBound, BoundsError> {
    if q < 2 {
        return Err(BoundsError::BadQ(q));
    }
    if k > n {
        return Err(BoundsError::KBeyondN { k, n });
    }
    let nd = coxeter_max_order(d, mode)?;
    let value = Rat::new(
        BigInt::from(3u128 * nd).pow(n as u32),
        BigInt::from(q).pow((n - k) as u32),
    );
    let vacuous = value >= Rat::one();
    Ok(WalkBound { value, vacuous })
}

/// Outcome of composing the measured spectral bound with the selection
/// density threshold `c_d^(d+1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    /// Some point is covered by an `epsilon`-fraction of embedded chambers,
    /// for every embedding.
    CertifiedOverlap { epsilon: f64 },
    /// The measured bound reaches the threshold; nothing is claimed.
    Inconclusive { gap: f64 },
}

#[derive(Debug, Clone)]
pub struct CertifyReport {
    pub d: usize,
    pub c_d: Rat,
    /// `c_d^(d+1)`.
    pub threshold: Rat,
    /// Measured `d * max lambda~(B_i)` (not the q-asymptotic bound).
    pub disc_bound: f64,
    pub per_type: Vec<f64>,
    /// Exact epsilon, available when the spectral bound is exactly zero.
    pub epsilon_exact: Option<Rat>,
    pub verdict: Verdict,
}

pub fn certify_overlap(
    cx: &TypedComplex,
    c_d: &Rat,
    opts: &LambdaOptions,
) -> Result<CertifyReport, BoundsError> {
    if !(c_d.is_positive() && c_d < &Rat::one()) {
        return Err(BoundsError::BadPachConstant(c_d.to_string()));
    }
    let bound = discrepancy_spectral_bound(cx, opts)?;
    let d = cx.d();
    let threshold = c_d.pow(d as i32 + 1);
    let threshold_f = rat_to_f64(&threshold);
    let epsilon = threshold_f - bound.value;
    let verdict = if epsilon > 0.0 {
        Verdict::CertifiedOverlap { epsilon }
    } else {
        Verdict::Inconclusive {
            gap: bound.value - threshold_f,
        }
    };
    let epsilon_exact = bound.exact_zero.then(|| threshold.clone());
    Ok(CertifyReport {
        d,
        c_d: c_d.clone(),
        threshold,
        disc_bound: bound.value,
        per_type: bound.per_type,
        epsilon_exact,
        verdict,
    })
}

/// Registry of selection-density constants. No certified defaults are
/// shipped: values are user-supplied and recorded with their provenance in
/// every report.
#[derive(Debug, Clone, Default)]
pub struct PachRegistry {
    entries: BTreeMap<usize, PachEntry>,
}

#[derive(Debug, Clone)]
pub struct PachEntry {
    pub value: Rat,
    pub provenance: String,
    pub certified: bool,
}

impl PachRegistry {
    /// The shipped registry is empty; nothing here is certified.
    pub fn builtin() -> Self {
        PachRegistry::default()
    }

    pub fn get(&self, d: usize) -> Option<&PachEntry> {
        self.entries.get(&d)
    }

    pub fn set(&mut self, d: usize, entry: PachEntry) {
        self.entries.insert(d, entry);
    }
}

/// True for odd prime powers p^k, p an odd prime.
pub fn is_odd_prime_power(q: u64) -> bool {
    if q < 3 || q % 2 == 0 {
        return false;
    }
    let mut p = 3u64;
    while p.saturating_mul(p) <= q {
        if q % p == 0 {
            let mut rest = q;
            while rest % p == 0 {
                rest /= p;
            }
            return rest == 1;
        }
        p += 2;
    }
    true // q itself is an odd prime
}

/// One evaluated constant for the report: exact forms next to decimal
/// renderings, with the defining formula.
#[derive(Debug, Clone, Serialize)]
pub struct BoundEntry {
    pub name: String,
    pub formula: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rational: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decimal: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log10: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sci: Option<SciValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl BoundEntry {
    fn new(name: &str, formula: &str) -> Self {
        BoundEntry {
            name: name.to_owned(),
            formula: formula.to_owned(),
            rational: None,
            decimal: None,
            log10: None,
            sci: None,
            note: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainVerdict {
    CertifiedOverlap,
    BelowThresholdQ,
}

/// The full evaluated chain for one `(d, q, n, c_d)` configuration.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub d: usize,
    pub q: u64,
    pub n: u64,
    pub c_d: String,
    pub coxeter_mode: CoxeterMode,
    pub entries: Vec<BoundEntry>,
    pub verdict: ChainVerdict,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct BoundConfig {
    pub d: usize,
    pub q: u64,
    /// Walk half-length; defaults to the canonical `2 d N_d`.
    pub n: Option<u64>,
    pub c_d: Rat,
    pub mode: CoxeterMode,
}

pub fn bound_report(cfg: &BoundConfig) -> Result<BoundReport, BoundsError> {
    if cfg.d < 2 {
        return Err(BoundsError::RankTooSmall { got: cfg.d, min: 2 });
    }
    if cfg.q < 2 {
        return Err(BoundsError::BadQ(cfg.q));
    }
    let nd = coxeter_max_order(cfg.d, cfg.mode)?;
    let main = main_constants(cfg.d, &cfg.c_d, cfg.mode)?;
    let n = cfg.n.unwrap_or(main.n);
    if n < 1 {
        return Err(BoundsError::BadN);
    }

    let mut warnings = Vec::new();
    if !is_odd_prime_power(cfg.q) {
        warnings.push(format!("q = {} is not an odd prime power", cfg.q));
    }

    let mut entries = Vec::new();

    let mut e = BoundEntry::new("N_d", "max order of a rank-d finite reflection group");
    e.rational = Some(nd.to_string());
    e.decimal = Some(nd as f64);
    entries.push(e);

    let m = m_constant(cfg.d, n, cfg.mode)?;
    let mut e = BoundEntry::new("M_{d,n}", "(sum_{k=0..n} (3 N_d)^n (2k+1))^(1/2n)");
    e.decimal = Some(m.value);
    e.log10 = Some(m.log10);
    e.note = Some(format!(
        "closed form sqrt(3 N_d) (n+1)^(1/n) = {}",
        m.closed_form
    ));
    entries.push(e);

    // Per-k operator bounds; geometric k-sampling past 64 to keep reports
    // readable.
    let ks: Vec<u64> = if n <= 64 {
        (0..=n).collect()
    } else {
        let mut ks = vec![0u64];
        let mut k = 1u64;
        while k < n {
            ks.push(k);
            k *= 2;
        }
        ks.push(n);
        ks
    };
    for k in ks {
        let h = hecke_norm_bound(cfg.d, cfg.q, k, cfg.mode)?;
        let mut e = BoundEntry::new(&format!("hecke_bound[k={k}]"), "(2k+1) q^(N_d - k/d)");
        e.log10 = Some(h.log10());
        e.sci = Some(h.sci());
        e.decimal = h.to_f64();
        if h.is_vacuous() {
            e.note = Some("vacuous (>= 1)".to_owned());
        }
        entries.push(e);
    }

    let lb = lambda_upper_bound(cfg.d, cfg.q, n, cfg.mode)?;
    let mut e = BoundEntry::new("lambda_bound", "M_{d,n} q^(-1/(2d) + N_d/(2n))");
    e.decimal = lb.value;
    e.log10 = Some(lb.log10);
    e.rational = Some(format!("q-exponent {}", lb.exponent));
    e.note = Some(format!(
        "{}{}",
        lb.hypothesis,
        if lb.vacuous { "; vacuous (>= 1)" } else { "" }
    ));
    entries.push(e);

    let disc_log10 = (cfg.d as f64).log10() + lb.log10;
    let mut e = BoundEntry::new("disc_bound", "d * lambda_bound");
    e.log10 = Some(disc_log10);
    e.decimal = (disc_log10.abs() < 300.0).then(|| 10f64.powf(disc_log10));
    entries.push(e);

    let mut e = BoundEntry::new("epsilon", "c_d^(d+1) / 2");
    e.rational = Some(main.epsilon.to_string());
    e.decimal = Some(rat_to_f64(&main.epsilon));
    entries.push(e);

    let mut e = BoundEntry::new("q_0", "(2 d M_{d,2dN_d} c_d^-(d+1))^(4d)");
    e.log10 = Some(main.q0_log10);
    e.sci = Some(main.q0);
    e.note = Some(format!("canonical walk half-length 2 d N_d = {}", main.n));
    entries.push(e);

    let verdict = if (cfg.q as f64).log10() > main.q0_log10 {
        ChainVerdict::CertifiedOverlap
    } else {
        ChainVerdict::BelowThresholdQ
    };

    Ok(BoundReport {
        d: cfg.d,
        q: cfg.q,
        n,
        c_d: cfg.c_d.to_string(),
        coxeter_mode: cfg.mode,
        entries,
        verdict,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete_partite, flag_complex, FlagComplexSpec};
    use crate::numeric::rat;

    use CoxeterMode::{AllFinite, Crystallographic};

    #[test]
    fn small_rank_orders() {
        assert_eq!(coxeter_max_order(1, Crystallographic).unwrap(), 2);
        assert_eq!(coxeter_max_order(2, Crystallographic).unwrap(), 12);
        assert_eq!(coxeter_max_order(3, Crystallographic).unwrap(), 48);
        assert_eq!(coxeter_max_order(4, Crystallographic).unwrap(), 1152);
        assert_eq!(coxeter_max_order(5, Crystallographic).unwrap(), 3840);
        assert_eq!(coxeter_max_order(6, Crystallographic).unwrap(), 51840);
        assert_eq!(coxeter_max_order(7, Crystallographic).unwrap(), 2903040);
        assert_eq!(coxeter_max_order(8, Crystallographic).unwrap(), 696729600);
    }

    #[test]
    fn all_finite_mode() {
        assert!(matches!(
            coxeter_max_order(2, AllFinite),
            Err(BoundsError::UnboundedRank2)
        ));
        assert_eq!(coxeter_max_order(3, AllFinite).unwrap(), 120);
        assert_eq!(coxeter_max_order(4, AllFinite).unwrap(), 14400);
        // Rank 5: H4 x A1 beats everything irreducible.
        assert_eq!(coxeter_max_order(5, AllFinite).unwrap(), 28800);
    }

    #[test]
    fn order_is_superadditive_under_rank_sums() {
        for a in 1..=6usize {
            for b in 1..=(8 - a) {
                let na = coxeter_max_order(a, Crystallographic).unwrap();
                let nb = coxeter_max_order(b, Crystallographic).unwrap();
                let nab = coxeter_max_order(a + b, Crystallographic).unwrap();
                assert!(nab >= na * nb, "a={a} b={b}");
            }
        }
    }

    #[test]
    fn xi_values() {
        for q in 2..=20u64 {
            let x = xi_pgl2(q, 0).unwrap();
            assert_eq!(x.coeff, Rat::one());
            assert_eq!(x.to_f64().unwrap(), 1.0);
        }
        let x = xi_pgl2(4, 1).unwrap();
        assert_eq!(x.coeff, rat(8, 5));
        assert!((x.to_f64().unwrap() - 0.8).abs() < 1e-12);
        let x = xi_pgl2(4, 2).unwrap();
        assert_eq!(x.coeff, rat(11, 5));
        assert!((x.to_f64().unwrap() - 0.55).abs() < 1e-12);
    }

    #[test]
    fn hecke_bound_examples() {
        let h = hecke_norm_bound(2, 3, 0, Crystallographic).unwrap();
        // k = 0: plain q^(N_d).
        assert_eq!(h.coeff, Rat::one());
        assert!((h.log10() - 12.0 * 3f64.log10()).abs() < 1e-12);

        let h = hecke_norm_bound(2, 3, 2, Crystallographic).unwrap();
        assert!((h.to_f64().unwrap() - 885735.0).abs() < 1e-6);
        assert!(h.is_vacuous());
    }

    #[test]
    fn hecke_bound_eventually_decreases_in_k() {
        let at = |k: u64| hecke_norm_bound(2, 3, k, Crystallographic).unwrap().log10();
        for k in 2..40u64 {
            assert!(at(k + 1) < at(k), "k={k}");
        }
    }

    #[test]
    fn m_constant_values() {
        let m = m_constant(2, 1, Crystallographic).unwrap();
        assert_eq!(m.value, 12.0);
        assert_eq!(m.closed_form, 12.0);

        for d in [2usize, 3] {
            for n in 1..=5u64 {
                let m = m_constant(d, n, Crystallographic).unwrap();
                assert!(
                    (m.sum_form - m.closed_form).abs() < 1e-12,
                    "d={d} n={n}: {} vs {}",
                    m.sum_form,
                    m.closed_form
                );
            }
        }
    }

    #[test]
    fn m_constant_approaches_sqrt_3nd_from_above() {
        let limit = (36.0f64).sqrt();
        let mut prev = f64::INFINITY;
        // 65536 exceeds the big-integer limit, exercising the log-space path.
        for n in [1u64, 2, 4, 8, 16, 64, 256, 1024, 16384, 65536] {
            let m = m_constant(2, n, Crystallographic).unwrap();
            assert!(m.value > limit);
            assert!(m.value < prev, "n={n}");
            prev = m.value;
        }
        assert!((prev - limit) < 0.01);
    }

    #[test]
    fn lambda_bound_exponent_at_canonical_n() {
        for d in [2usize, 3] {
            let nd = coxeter_max_order(d, Crystallographic).unwrap();
            let n = 2 * d as u64 * nd as u64;
            let lb = lambda_upper_bound(d, 9, n, Crystallographic).unwrap();
            assert_eq!(
                lb.exponent,
                Rat::new((-1).into(), (4 * d as i64).into()),
                "d={d}"
            );
        }
    }

    #[test]
    fn lambda_bound_decreases_in_q_and_flags_vacuity() {
        let at = |q: u64| lambda_upper_bound(2, q, 48, Crystallographic).unwrap();
        assert!(at(9).log10 > at(25).log10);
        assert!(at(9).vacuous); // small q: bound exceeds 1
    }

    #[test]
    fn main_constants_for_d2() {
        let mc = main_constants(2, &rat(1, 2), Crystallographic).unwrap();
        assert_eq!(mc.epsilon, rat(1, 16));
        assert_eq!(mc.n, 48);
        // q0 = (4 M_{2,48} 8)^8 with M = 6 * 49^(1/48).
        let m = 6.0 * 49f64.powf(1.0 / 48.0);
        let expected = 8.0 * (32.0 * m).log10();
        assert!((mc.q0_log10 - expected).abs() < 1e-9 * expected);
        assert!(matches!(
            main_constants(2, &rat(3, 2), Crystallographic),
            Err(BoundsError::BadPachConstant(_))
        ));
    }

    #[test]
    fn epsilon_depends_only_on_d_and_c() {
        let a = main_constants(2, &rat(1, 3), Crystallographic).unwrap();
        let b = main_constants(2, &rat(1, 3), Crystallographic).unwrap();
        assert_eq!(a.epsilon, b.epsilon);
        assert_eq!(a.epsilon, rat(1, 54));
    }

    #[test]
    fn walk_bound_values() {
        let wb = walk_bound_check(2, 37, 1, 0, Crystallographic).unwrap();
        assert_eq!(wb.value, rat(36, 37));
        assert!(!wb.vacuous);

        let wb = walk_bound_check(2, 37, 1, 1, Crystallographic).unwrap();
        assert_eq!(wb.value, rat(36, 1));
        assert!(wb.vacuous);

        assert!(matches!(
            walk_bound_check(2, 37, 1, 2, Crystallographic),
            Err(BoundsError::KBeyondN { .. })
        ));
    }

    #[test]
    fn certify_complete_partite_gives_exact_epsilon() {
        for sizes in [vec![2usize, 2], vec![2, 2, 2], vec![2, 2, 2, 2]] {
            let cx = complete_partite(&sizes).unwrap();
            let d = sizes.len() - 1;
            let report = certify_overlap(&cx, &rat(1, 2), &LambdaOptions::dense()).unwrap();
            let expected = rat(1, 2).pow(d as i32 + 1);
            assert_eq!(report.epsilon_exact, Some(expected));
            assert!(matches!(report.verdict, Verdict::CertifiedOverlap { .. }));
        }
    }

    #[test]
    fn certify_verdict_is_consistent_with_the_inequality() {
        // d = 2 flag complex over F_2: the measured bound 2 sqrt(2/7) exceeds
        // 1, so every c stays inconclusive - consistently.
        let cx = flag_complex(&FlagComplexSpec::new(2, 2)).unwrap();
        for (num, den) in [(1i64, 10i64), (1, 2), (9, 10), (99, 100)] {
            let c = rat(num, den);
            let report = certify_overlap(&cx, &c, &LambdaOptions::dense()).unwrap();
            let certified = matches!(report.verdict, Verdict::CertifiedOverlap { .. });
            assert_eq!(certified, report.disc_bound < rat_to_f64(&c.pow(3)));
            assert!(!certified);
        }
        assert!(
            certify_overlap(&cx, &rat(1, 2), &LambdaOptions::dense())
                .unwrap()
                .disc_bound
                > 1.0
        );

        // d = 1 flag complex: measured bound sqrt(2)/3, so the sweep crosses
        // both branches.
        let cx = flag_complex(&FlagComplexSpec::new(2, 1)).unwrap();
        let loose = certify_overlap(&cx, &rat(9, 10), &LambdaOptions::dense()).unwrap();
        assert!(matches!(loose.verdict, Verdict::CertifiedOverlap { .. }));
        let tight = certify_overlap(&cx, &rat(1, 2), &LambdaOptions::dense()).unwrap();
        assert!(matches!(tight.verdict, Verdict::Inconclusive { .. }));
    }

    #[test]
    fn odd_prime_power_recognition() {
        assert!(is_odd_prime_power(3));
        assert!(is_odd_prime_power(9));
        assert!(is_odd_prime_power(27));
        assert!(is_odd_prime_power(49));
        assert!(!is_odd_prime_power(2));
        assert!(!is_odd_prime_power(4));
        assert!(!is_odd_prime_power(15));
        assert!(!is_odd_prime_power(1));
    }

    #[test]
    fn report_assembles_with_warnings() {
        let cfg = BoundConfig {
            d: 2,
            q: 4,
            n: Some(48),
            c_d: rat(1, 2),
            mode: Crystallographic,
        };
        let report = bound_report(&cfg).unwrap();
        assert_eq!(report.verdict, ChainVerdict::BelowThresholdQ);
        assert!(report
            .warnings
            .iter()
            .any(|w| w.contains("odd prime power")));
        assert!(report.entries.iter().any(|e| e.name == "N_d"));
        assert!(report.entries.iter().any(|e| e.name == "q_0"));
    }

    #[test]
    fn registry_ships_empty() {
        let reg = PachRegistry::builtin();
        assert!(reg.get(2).is_none());
        let mut reg = reg;
        reg.set(
            2,
            PachEntry {
                value: rat(1, 2),
                provenance: "user".into(),
                certified: false,
            },
        );
        assert_eq!(reg.get(2).unwrap().value, rat(1, 2));
    }
}
