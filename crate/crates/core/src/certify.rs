//! Exact certification of level-(n−1) integrality gaps.
//!
//! A certificate is a full corner vector `{y_I^N}` in exact rationals. For a
//! constrained 0/1 program it witnesses a gap iff
//!
//! 1. `y_I^N > 0` for every `I`,
//! 2. `Σ_I y_I^N = 1`,
//! 3. for each constraint, `g(x_K) y_K^N < 0` for exactly one `K`,
//! 4. `g(x_J) y_J^N > 0` for every other `J`,
//! 5. `Σ_I 1/(g(x_I) y_I^N) ≤ 0` for each constraint, and
//! 6. `Σ_I y_I^N f(x_I) < f(x_{I*})`, the integral optimum.
//!
//! Without constraints the list becomes: normalization, exactly one negative
//! `y_K^N`, all others positive, `Σ_I 1/y_I^N ≤ 0`, and the gap inequality.
//! Every comparison is made on rationals, so strict and weak inequalities
//! are decided without tolerance.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{self, enumerate_subsets, subset_sums, LatticeVector, Repr, SubsetIndex};
use crate::moment::{self, Instance, LinearForm, MultilinearPoly, DEFAULT_TOL};
use crate::scalar::{format_rational, pow2, Rational};
use crate::speig;

/// Above this size `is_svc` skips its exhaustive self-check.
pub const SVC_SELF_CHECK_MAX_N: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct GapCertificate {
    y_n: LatticeVector<Rational>,
    pub claimed_relaxation_value: Option<Rational>,
    pub metadata: BTreeMap<String, String>,
}

impl GapCertificate {
    /// Wraps a full corner vector; its entries must sum to exactly 1.
    pub fn new(y_n: LatticeVector<Rational>) -> Result<Self> {
        y_n.require_repr(Repr::Corner)?;
        y_n.require_full()?;
        let sum = y_n.sum();
        if !sum.is_one() {
            return Err(Error::Normalization {
                sum: format_rational(&sum),
            });
        }
        Ok(GapCertificate {
            y_n,
            claimed_relaxation_value: None,
            metadata: BTreeMap::new(),
        })
    }

    pub fn from_fn(n: usize, f: impl FnMut(SubsetIndex) -> Rational) -> Result<Self> {
        Self::new(LatticeVector::from_fn(n, n, Repr::Corner, f)?)
    }

    pub fn with_metadata(mut self, key: &str, value: impl Into<String>) -> Self {
        self.metadata.insert(key.to_owned(), value.into());
        self
    }

    pub fn n(&self) -> usize {
        self.y_n.n()
    }

    pub fn y_n(&self) -> &LatticeVector<Rational> {
        &self.y_n
    }

    pub fn get(&self, s: SubsetIndex) -> &Rational {
        self.y_n.at(s)
    }

    /// Moment coordinates `y_I = Σ_{J ⊇ I} y_J^N`.
    pub fn moment_vector(&self) -> LatticeVector<Rational> {
        lattice::zeta(&self.y_n).expect("certificate is a full corner vector")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Optimum {
    Feasible { value: Rational, argmin: SubsetIndex },
    Infeasible,
}

impl Optimum {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            Optimum::Feasible { value, .. } => Some(value),
            Optimum::Infeasible => None,
        }
    }
}

impl fmt::Display for Optimum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Optimum::Feasible { value, argmin } => {
                write!(f, "{} at x_{}", format_rational(value), argmin)
            }
            Optimum::Infeasible => f.write_str("infeasible"),
        }
    }
}

/// Mask-indexed table `I ↦ g(x_I)`.
fn linear_table(g: &LinearForm, n: usize) -> Vec<Rational> {
    let mut buf = vec![Rational::zero(); 1 << n];
    buf[0] = g.g0.clone();
    for i in 0..n {
        buf[1 << i] = g.a.get(i).cloned().unwrap_or_else(Rational::zero);
    }
    subset_sums(&mut buf);
    buf
}

/// Brute-force minimum over all `2^n` assignments; ties go to the first
/// subset in canonical order.
pub fn integral_optimum(inst: &Instance) -> Result<Optimum> {
    let n = inst.n();
    lattice::check_dims(n, n)?;
    let values = inst.objective.value_table();
    let mut feasible = vec![true; 1 << n];
    for g in &inst.constraints {
        for (ok, v) in feasible.iter_mut().zip(linear_table(g, n)) {
            *ok &= !v.is_negative();
        }
    }
    let mut best: Option<(Rational, SubsetIndex)> = None;
    for s in enumerate_subsets(n, n)? {
        let mask = s.bits() as usize;
        if !feasible[mask] {
            continue;
        }
        if best.as_ref().is_none_or(|(v, _)| values[mask] < *v) {
            best = Some((values[mask].clone(), s));
        }
    }
    Ok(match best {
        Some((value, argmin)) => Optimum::Feasible { value, argmin },
        None => Optimum::Infeasible,
    })
}

/// One condition of the certificate checklist, in the order they are listed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    Positivity,
    Normalization,
    UniqueViolation(usize),
    StrictlyPositiveElsewhere(usize),
    ReciprocalSum(usize),
    UniqueNegative,
    PositiveElsewhere,
    UnconstrainedReciprocalSum,
    GapInequality,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Positivity => f.write_str("positivity: y_I^N > 0 for all I"),
            Condition::Normalization => f.write_str("normalization: sum of y_I^N = 1"),
            Condition::UniqueViolation(l) => write!(
                f,
                "constraint {l}: g(x_K) y_K^N < 0 for exactly one K"
            ),
            Condition::StrictlyPositiveElsewhere(l) => write!(
                f,
                "constraint {l}: g(x_J) y_J^N > 0 for every J != K"
            ),
            Condition::ReciprocalSum(l) => write!(
                f,
                "constraint {l}: sum of 1/(g(x_I) y_I^N) <= 0"
            ),
            Condition::UniqueNegative => f.write_str("y_K^N < 0 for exactly one K"),
            Condition::PositiveElsewhere => f.write_str("y_J^N > 0 for every J != K"),
            Condition::UnconstrainedReciprocalSum => f.write_str("sum of 1/y_I^N <= 0"),
            Condition::GapInequality => {
                f.write_str("gap: sum of y_I^N f(x_I) < integral optimum")
            }
        }
    }
}

/// Sign pattern of a corner vector (or of `g(x_I) y_I^N` for a constraint).
#[derive(Debug, Clone, PartialEq)]
pub struct SignPattern {
    pub negative: Vec<SubsetIndex>,
    pub zero: Vec<SubsetIndex>,
    /// `None` when some entry is zero.
    pub reciprocal_sum: Option<Rational>,
}

impl SignPattern {
    fn of<'a>(entries: impl IntoIterator<Item = (SubsetIndex, &'a Rational)>) -> Self {
        let mut negative = Vec::new();
        let mut zero = Vec::new();
        let mut sum = Rational::zero();
        for (s, v) in entries {
            if v.is_zero() {
                zero.push(s);
                continue;
            }
            if v.is_negative() {
                negative.push(s);
            }
            sum += v.recip();
        }
        let reciprocal_sum = zero.is_empty().then_some(sum);
        SignPattern {
            negative,
            zero,
            reciprocal_sum,
        }
    }

    pub fn unique_negative(&self) -> bool {
        self.negative.len() == 1
    }

    /// Everything except the unique negative entry is strictly positive.
    pub fn positive_elsewhere(&self) -> bool {
        self.zero.is_empty() && self.negative.len() <= 1
    }

    pub fn reciprocal_ok(&self) -> bool {
        self.reciprocal_sum
            .as_ref()
            .is_some_and(|s| !s.is_positive())
    }

    /// The `K` of the checklist, when it is unique.
    pub fn cut(&self) -> Option<SubsetIndex> {
        self.unique_negative().then(|| self.negative[0])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GapRatio {
    Finite(Rational),
    /// The integer program is infeasible while the relaxation is not.
    Infinite,
    /// Ratio not meaningful (non-positive relaxation value or optimum).
    Undefined,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapCheck {
    pub relaxation_value: Rational,
    pub integral_optimum: Optimum,
    pub holds: bool,
    pub ratio: GapRatio,
}

impl GapCheck {
    fn new(relaxation_value: Rational, integral_optimum: Optimum) -> Self {
        let (holds, ratio) = match integral_optimum.value() {
            None => (true, GapRatio::Infinite),
            Some(opt) => {
                let ratio = if opt.is_positive() && relaxation_value.is_positive() {
                    GapRatio::Finite(opt / &relaxation_value)
                } else {
                    GapRatio::Undefined
                };
                (relaxation_value < *opt, ratio)
            }
        };
        GapCheck {
            relaxation_value,
            integral_optimum,
            holds,
            ratio,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertKind {
    Constrained,
    Unconstrained,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertReport {
    pub kind: CertKind,
    pub n: usize,
    /// All `y_I^N > 0` (constrained checklist only).
    pub positivity: bool,
    pub normalization: bool,
    /// Per constraint, the sign pattern of `g(x_I) y_I^N`.
    pub constraints: Vec<SignPattern>,
    /// Sign pattern of `y^N` itself (unconstrained checklist only).
    pub sign: Option<SignPattern>,
    pub gap: GapCheck,
    /// Whether the certificate lies in `Las_{n−1}` at all, independent of the gap.
    pub feasible: bool,
}

impl CertReport {
    /// Every condition of the checklist with its outcome, in order.
    pub fn conditions(&self) -> Vec<(Condition, bool)> {
        let mut out = Vec::new();
        match self.kind {
            CertKind::Constrained => {
                out.push((Condition::Positivity, self.positivity));
                out.push((Condition::Normalization, self.normalization));
                for (l, c) in self.constraints.iter().enumerate() {
                    out.push((Condition::UniqueViolation(l), c.unique_negative()));
                    out.push((Condition::StrictlyPositiveElsewhere(l), c.positive_elsewhere()));
                    out.push((Condition::ReciprocalSum(l), c.reciprocal_ok()));
                }
            }
            CertKind::Unconstrained => {
                out.push((Condition::Normalization, self.normalization));
                let sign = self.sign.as_ref().expect("unconstrained report has a sign pattern");
                out.push((Condition::UniqueNegative, sign.unique_negative()));
                out.push((Condition::PositiveElsewhere, sign.positive_elsewhere()));
                out.push((Condition::UnconstrainedReciprocalSum, sign.reciprocal_ok()));
            }
        }
        out.push((Condition::GapInequality, self.gap.holds));
        out
    }

    /// Conditions that fail, in checklist order.
    pub fn failures(&self) -> Vec<Condition> {
        self.conditions()
            .into_iter()
            .filter(|(_, ok)| !ok)
            .map(|(c, _)| c)
            .collect()
    }

    pub fn first_failure(&self) -> Option<Condition> {
        self.failures().into_iter().next()
    }

    /// True iff every condition holds, i.e. the certificate witnesses a gap.
    pub fn verdict(&self) -> bool {
        self.failures().is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CertifyOptions {
    /// Certify even when a constraint excludes no 0/1 point.
    pub allow_redundant: bool,
    /// Re-run the level-(n−1) feasibility check on `zeta(yN)`.
    pub cross_check: bool,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            allow_redundant: false,
            cross_check: true,
        }
    }
}

pub fn certify_ilp(inst: &Instance, cert: &GapCertificate) -> Result<CertReport> {
    certify_ilp_with(inst, cert, CertifyOptions::default())
}

pub fn certify_ilp_with(
    inst: &Instance,
    cert: &GapCertificate,
    opts: CertifyOptions,
) -> Result<CertReport> {
    let n = inst.n();
    if cert.n() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: cert.n(),
        });
    }
    if inst.m() == 0 {
        return Err(Error::NoConstraints);
    }
    if !opts.allow_redundant {
        if let Some(&index) = inst.redundant_constraints().first() {
            return Err(Error::RedundantConstraint { index });
        }
    }
    let y_n = cert.y_n();
    let sum = y_n.sum();
    if !sum.is_one() {
        return Err(Error::Normalization {
            sum: format_rational(&sum),
        });
    }

    let subsets = y_n.subsets();
    let positivity = y_n.values().iter().all(Signed::is_positive);
    let constraints = inst
        .constraints
        .iter()
        .map(|g| {
            let table = linear_table(g, n);
            let products: Vec<Rational> = subsets
                .iter()
                .zip(y_n.values())
                .map(|(s, y)| &table[s.bits() as usize] * y)
                .collect();
            SignPattern::of(subsets.iter().copied().zip(&products))
        })
        .collect();
    let relaxation = moment::objective_value(&inst.objective, y_n)?;
    let gap = GapCheck::new(relaxation, integral_optimum(inst)?);

    let mut report = CertReport {
        kind: CertKind::Constrained,
        n,
        positivity,
        normalization: true,
        constraints,
        sign: None,
        gap,
        feasible: false,
    };
    report.feasible = if opts.cross_check || !report.verdict() {
        let level = n.saturating_sub(1);
        moment::lasserre_check(inst, &cert.moment_vector(), level, DEFAULT_TOL)?.feasible()
    } else {
        true
    };
    Ok(report)
}

/// Reusable checker for unconstrained problems; the value table and the
/// integral optimum are computed once.
#[derive(Debug, Clone)]
pub struct UnconstrainedCertifier {
    objective: MultilinearPoly,
    optimum: Optimum,
}

impl UnconstrainedCertifier {
    pub fn new(objective: &MultilinearPoly) -> Result<Self> {
        let optimum = integral_optimum(&Instance::unconstrained(objective.clone()))?;
        Ok(UnconstrainedCertifier {
            objective: objective.clone(),
            optimum,
        })
    }

    pub fn optimum(&self) -> &Optimum {
        &self.optimum
    }

    pub fn certify(&self, cert: &GapCertificate) -> Result<CertReport> {
        let n = self.objective.n();
        if cert.n() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: cert.n(),
            });
        }
        let y_n = cert.y_n();
        let sum = y_n.sum();
        if !sum.is_one() {
            return Err(Error::Normalization {
                sum: format_rational(&sum),
            });
        }
        let sign = SignPattern::of(y_n.iter());
        let relaxation = moment::objective_value(&self.objective, y_n)?;
        let feasible = n == 0 || speig::psd_corner(y_n)?.psd;
        Ok(CertReport {
            kind: CertKind::Unconstrained,
            n,
            positivity: y_n.values().iter().all(Signed::is_positive),
            normalization: true,
            constraints: Vec::new(),
            sign: Some(sign),
            gap: GapCheck::new(relaxation, self.optimum.clone()),
            feasible,
        })
    }
}

pub fn certify_unconstrained(f: &MultilinearPoly, cert: &GapCertificate) -> Result<CertReport> {
    UnconstrainedCertifier::new(f)?.certify(cert)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SvcFailure {
    /// `x_i` does not appear, so violations come in pairs `I`, `I Δ {i}`.
    ZeroCoefficient { index: usize },
    /// Some assignment gives exactly `g(x_I) = 0`.
    ZeroValue { at: SubsetIndex },
    /// Every assignment satisfies the constraint.
    NoViolation,
    SeveralViolations {
        first: SubsetIndex,
        second: SubsetIndex,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvcVerdict {
    pub is_svc: bool,
    /// The unique violated vertex when `is_svc`.
    pub cut_vertex: Option<SubsetIndex>,
    pub failure: Option<SvcFailure>,
    /// Outcome of the exhaustive self-check (`None` above the size limit).
    pub exhaustive_check: Option<bool>,
}

/// Threshold form `Σ a_i x_i − b ≥ 0` of a stored constraint (`b = −g0`).
pub fn threshold_form(g: &LinearForm) -> (&[Rational], Rational) {
    (&g.a, -g.g0.clone())
}

/// Single-vertex-cutting test in `O(n)`.
///
/// With `P = {i : a_i < 0}`, `g(x_P)` is the minimum over the cube and every
/// other vertex is at least `g(x_P) + min_i |a_i|`; the constraint is SVC iff
/// all `a_i ≠ 0` and `Σ_{i∈P} a_i < b < Σ_{i∈P} a_i + min_i |a_i|`.
pub fn is_svc(g: &LinearForm, n: usize) -> SvcVerdict {
    let (a, b) = threshold_form(g);
    let coeff = |i: usize| a.get(i).cloned().unwrap_or_else(Rational::zero);
    let cut = SubsetIndex::from_bits(
        (0..n)
            .filter(|&i| coeff(i).is_negative())
            .fold(0u32, |m, i| m | (1 << i)),
    );
    let low: Rational = (0..n)
        .map(coeff)
        .filter(Signed::is_negative)
        .fold(Rational::zero(), |acc, v| acc + v);
    let low_value = &low - &b;

    let failure = if low_value.is_zero() {
        Some(SvcFailure::ZeroValue { at: cut })
    } else if low_value.is_positive() {
        Some(SvcFailure::NoViolation)
    } else if let Some((j, step)) = (0..n)
        .map(|i| (i, coeff(i).abs()))
        .min_by(|x, y| x.1.cmp(&y.1))
    {
        let next = cut.symmetric_difference(SubsetIndex::singleton(j + 1));
        let next_value = &low_value + &step;
        if step.is_zero() {
            Some(SvcFailure::ZeroCoefficient { index: j + 1 })
        } else if next_value.is_zero() {
            Some(SvcFailure::ZeroValue { at: next })
        } else if next_value.is_negative() {
            Some(SvcFailure::SeveralViolations {
                first: cut,
                second: next,
            })
        } else {
            None
        }
    } else {
        None
    };
    let verdict = SvcVerdict {
        is_svc: failure.is_none(),
        cut_vertex: failure.is_none().then_some(cut),
        failure,
        exhaustive_check: None,
    };
    if n > SVC_SELF_CHECK_MAX_N {
        return verdict;
    }
    let brute = svc_by_enumeration(g, n);
    assert_eq!(
        brute,
        verdict.cut_vertex,
        "SVC fast test disagrees with enumeration for {g}"
    );
    SvcVerdict {
        exhaustive_check: Some(true),
        ..verdict
    }
}

/// Reference SVC test over all `2^n` assignments; returns the cut vertex.
pub fn svc_by_enumeration(g: &LinearForm, n: usize) -> Option<SubsetIndex> {
    let mut cut = None;
    for (mask, v) in linear_table(g, n).into_iter().enumerate() {
        if v.is_zero() {
            return None;
        }
        if v.is_negative() {
            if cut.is_some() {
                return None;
            }
            cut = Some(SubsetIndex::from_bits(mask as u32));
        }
    }
    cut
}

/// Every constraint is SVC: necessary for a level-(n−1) gap.
pub fn gap_precondition_ilp(inst: &Instance) -> bool {
    inst.constraints.iter().all(|g| is_svc(g, inst.n()).is_svc)
}

/// `ĥ(N) = 2^{−n} Σ_S f(x_S) (−1)^{|S|}`; nonzero iff `f` has degree `n`.
pub fn top_fourier(f: &MultilinearPoly) -> Rational {
    let n = f.n();
    let signed: Rational = f
        .value_table()
        .into_iter()
        .enumerate()
        .map(|(mask, v)| if mask.count_ones() % 2 == 0 { v } else { -v })
        .fold(Rational::zero(), |acc, v| acc + v);
    signed * pow2(-(n as i64))
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoGapPrecheck {
    pub no_gap_certified: bool,
    /// `Σ_I f̃(x_I)` for the table rescaled to `min = 0`, `max = 1`.
    pub normalized_sum: Rational,
}

/// Certifies "no gap at level n−1" when the rescaled value table sums to at least 2.
pub fn no_gap_precheck(f: &MultilinearPoly) -> Result<NoGapPrecheck> {
    let table = f.value_table();
    let min = table.iter().min().expect("value table is nonempty").clone();
    let max = table.iter().max().expect("value table is nonempty").clone();
    if min == max {
        return Err(Error::ConstantObjective);
    }
    let range = &max - &min;
    let shifted: Rational = table
        .iter()
        .map(|v| v - &min)
        .fold(Rational::zero(), |acc, v| acc + v);
    let normalized_sum = shifted / range;
    Ok(NoGapPrecheck {
        no_gap_certified: normalized_sum >= Rational::from_integer(2.into()),
        normalized_sum,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum SearchOutcome {
    Found {
        certificate: Box<GapCertificate>,
        report: Box<CertReport>,
        attempts: usize,
    },
    /// Nothing validated within the budget. Not a proof that no gap exists.
    NotFound { attempts: usize },
}

impl SearchOutcome {
    pub fn certificate(&self) -> Option<&GapCertificate> {
        match self {
            SearchOutcome::Found { certificate, .. } => Some(certificate),
            SearchOutcome::NotFound { .. } => None,
        }
    }
}

pub const DEFAULT_SEARCH_BUDGET: usize = 64;

/// Denominator used to rationalize the float weight shapes.
const SHAPE_DENOM: i64 = 1 << 16;

fn weight_shapes(table: &[Rational], min: &Rational, range: &Rational) -> Vec<Vec<Rational>> {
    let len = table.len();
    let mut shapes = vec![vec![Rational::one(); len]];
    let scaled: Vec<f64> = table
        .iter()
        .map(|v| crate::scalar::Scalar::to_f64(&((v - min) / range)))
        .collect();
    let mut c = 4.0f64;
    while c >= 1.0 / 4096.0 {
        let shape = scaled
            .iter()
            .map(|h| {
                let w = 1.0 / (h + c).sqrt();
                let num = ((w * SHAPE_DENOM as f64).round() as i64).max(1);
                Rational::new(num.into(), SHAPE_DENOM.into())
            })
            .collect();
        shapes.push(shape);
        c /= 4.0;
    }
    shapes
}

/// Heuristic search for an unconstrained level-(n−1) gap certificate.
///
/// The negative entry goes to a maximizer `K` of `f`; the remaining mass
/// `1 + ε` is spread proportionally to a weight shape `s` (uniform first,
/// then shapes favouring small values of `f`). For a fixed shape,
/// `Σ_I 1/y_I^N = −1/ε + A/(1+ε)` with `A = (Σ s)(Σ 1/s)`, so the largest
/// admissible `ε` is `1/(A − 1)`, which makes the reciprocal sum exactly 0.
/// Each candidate is validated with [`certify_unconstrained`]; one candidate
/// counts as one unit of `budget`.
pub fn search_unconstrained_certificate(
    f: &MultilinearPoly,
    budget: usize,
) -> Result<SearchOutcome> {
    let n = f.n();
    lattice::check_dims(n, n)?;
    let certifier = UnconstrainedCertifier::new(f)?;
    let table = f.value_table();
    let min = table.iter().min().expect("nonempty").clone();
    let max = table.iter().max().expect("nonempty").clone();
    if min == max || n == 0 {
        return Ok(SearchOutcome::NotFound { attempts: 0 });
    }
    let range = &max - &min;
    let shapes = weight_shapes(&table, &min, &range);
    let maximizers: Vec<SubsetIndex> = enumerate_subsets(n, n)?
        .into_iter()
        .filter(|s| table[s.bits() as usize] == max)
        .collect();

    let mut attempts = 0;
    for &k in &maximizers {
        for shape in &shapes {
            if attempts >= budget {
                return Ok(SearchOutcome::NotFound { attempts });
            }
            attempts += 1;
            let kmask = k.bits() as usize;
            let others = || (0..table.len()).filter(move |&m| m != kmask);
            let total: Rational = others().map(|m| shape[m].clone()).sum();
            let inv_total: Rational = others().map(|m| shape[m].recip()).sum();
            let a = &total * &inv_total;
            let eps = if a > Rational::one() {
                (a - Rational::one()).recip()
            } else {
                Rational::one()
            };
            let mass = (Rational::one() + &eps) / &total;
            let cert = GapCertificate::from_fn(n, |s| {
                if s == k {
                    -eps.clone()
                } else {
                    &mass * &shape[s.bits() as usize]
                }
            })?
            .with_metadata("search", "negative entry on a maximizer of f; tight reciprocal sum");
            let report = certifier.certify(&cert)?;
            if report.verdict() {
                return Ok(SearchOutcome::Found {
                    certificate: Box::new(cert),
                    report: Box::new(report),
                    attempts,
                });
            }
        }
    }
    Ok(SearchOutcome::NotFound { attempts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};
    use proptest::prelude::*;

    fn lf(a: &[i64], g0: Rational) -> LinearForm {
        LinearForm::new(a.iter().map(|&x| int(x)).collect(), g0)
    }

    fn set(ix: &[usize]) -> SubsetIndex {
        SubsetIndex::from_indices(ix.iter().copied()).unwrap()
    }

    #[test]
    fn svc_examples() {
        let v = is_svc(&lf(&[2, 3], int(-1)), 2);
        assert!(v.is_svc);
        assert_eq!(v.cut_vertex, Some(SubsetIndex::EMPTY));
        assert_eq!(v.exhaustive_check, Some(true));

        let v = is_svc(&lf(&[1, 1], int(-1)), 2);
        assert!(!v.is_svc);
        assert!(matches!(v.failure, Some(SvcFailure::ZeroValue { .. })));

        let knap = lf(&[1, 1, 1], -rat(1, 64));
        assert_eq!(is_svc(&knap, 3).cut_vertex, Some(SubsetIndex::EMPTY));

        let v = is_svc(&lf(&[1, 0], int(-1)), 2);
        assert!(matches!(v.failure, Some(SvcFailure::ZeroCoefficient { index: 2 })));

        let v = is_svc(&lf(&[1, 1], int(1)), 2);
        assert_eq!(v.failure, Some(SvcFailure::NoViolation));

        let v = is_svc(&lf(&[1, 1], -rat(3, 2)), 2);
        assert!(matches!(v.failure, Some(SvcFailure::SeveralViolations { .. })));

        // cut vertex away from the origin
        let v = is_svc(&lf(&[-2, 3, -1], rat(5, 2)), 3);
        assert_eq!(v.cut_vertex, Some(set(&[1, 3])));
    }

    #[test]
    fn optimum_tie_breaks_canonically() {
        let f = MultilinearPoly::linear(&[int(1), int(1), int(1)]).unwrap();
        let g = lf(&[1, 1, 1], int(-1));
        let inst = Instance::new(f, vec![g]).unwrap();
        assert_eq!(
            integral_optimum(&inst).unwrap(),
            Optimum::Feasible {
                value: int(1),
                argmin: set(&[1])
            }
        );
        let free = Instance::unconstrained(MultilinearPoly::linear(&vec![int(1); 3]).unwrap());
        assert_eq!(
            integral_optimum(&free).unwrap(),
            Optimum::Feasible {
                value: int(0),
                argmin: SubsetIndex::EMPTY
            }
        );
    }

    #[test]
    fn top_fourier_examples() {
        for n in 1..=6 {
            let all = SubsetIndex::full(n);
            let product = MultilinearPoly::from_coeffs(n, [(all, int(1))]).unwrap();
            let sign = if n % 2 == 0 { 1 } else { -1 };
            assert_eq!(top_fourier(&product), int(sign) * pow2(-(n as i64)));
        }
        let low = MultilinearPoly::linear(&[int(3), int(-2), int(5)]).unwrap();
        assert_eq!(top_fourier(&low), int(0));
    }

    #[test]
    fn precheck_examples() {
        for n in 2..=6 {
            let f = MultilinearPoly::linear(&vec![int(1); n]).unwrap();
            let pre = no_gap_precheck(&f).unwrap();
            assert_eq!(pre.normalized_sum, pow2(n as i64 - 1));
            assert!(pre.no_gap_certified);
        }
        let constant = MultilinearPoly::from_coeffs(2, [(SubsetIndex::EMPTY, int(3))]).unwrap();
        assert_eq!(no_gap_precheck(&constant), Err(Error::ConstantObjective));
    }

    #[test]
    fn distribution_is_feasible_without_gap() {
        let f = MultilinearPoly::linear(&[int(1), int(2)]).unwrap();
        let cert = GapCertificate::from_fn(2, |_| rat(1, 4)).unwrap();
        let rep = certify_unconstrained(&f, &cert).unwrap();
        assert!(rep.feasible);
        assert!(!rep.gap.holds);
        assert!(!rep.verdict());
        assert_eq!(rep.first_failure(), Some(Condition::UniqueNegative));
    }

    #[test]
    fn certificate_must_be_normalized() {
        assert!(matches!(
            GapCertificate::from_fn(2, |_| rat(1, 3)),
            Err(Error::Normalization { .. })
        ));
    }

    #[test]
    fn redundant_constraint_is_refused() {
        let f = MultilinearPoly::linear(&[int(1), int(1)]).unwrap();
        let inst = Instance::new(f, vec![lf(&[1, 1], int(0))]).unwrap();
        let cert = GapCertificate::from_fn(2, |_| rat(1, 4)).unwrap();
        assert_eq!(
            certify_ilp(&inst, &cert),
            Err(Error::RedundantConstraint { index: 0 })
        );
        let opts = CertifyOptions {
            allow_redundant: true,
            ..CertifyOptions::default()
        };
        let rep = certify_ilp_with(&inst, &cert, opts).unwrap();
        assert_eq!(rep.first_failure(), Some(Condition::UniqueViolation(0)));
    }

    #[test]
    fn unconstrained_instance_has_no_ilp_certificate() {
        let inst = Instance::unconstrained(MultilinearPoly::zero(2));
        let cert = GapCertificate::from_fn(2, |_| rat(1, 4)).unwrap();
        assert_eq!(certify_ilp(&inst, &cert), Err(Error::NoConstraints));
    }

    fn random_form() -> impl Strategy<Value = (LinearForm, usize)> {
        (1usize..=8).prop_flat_map(|n| {
            (
                prop::collection::vec((-4i64..=4, 1i64..=3), n),
                (-12i64..=12, 1i64..=4),
            )
                .prop_map(move |(a, (p, q))| {
                    let a = a.into_iter().map(|(p, q)| rat(p, q)).collect();
                    (LinearForm::new(a, rat(p, q)), n)
                })
        })
    }

    proptest! {
        #[test]
        fn svc_fast_matches_enumeration((g, n) in random_form()) {
            let v = is_svc(&g, n);
            prop_assert_eq!(v.cut_vertex, svc_by_enumeration(&g, n));
            if let Some(cut) = v.cut_vertex {
                prop_assert!(g.eval(cut).is_negative());
            }
        }

        #[test]
        fn top_fourier_tracks_top_coefficient(
            n in 1usize..=6,
            coeffs in prop::collection::vec(-9i64..=9, 64),
        ) {
            let f = MultilinearPoly::from_coeffs(
                n,
                (0..1u32 << n).map(|m| (SubsetIndex::from_bits(m), int(coeffs[m as usize]))),
            ).unwrap();
            let top = f.coeff(SubsetIndex::full(n));
            let sign = if n % 2 == 0 { int(1) } else { int(-1) };
            prop_assert_eq!(top_fourier(&f), sign * top * pow2(-(n as i64)));
        }
    }
}
