//! Instance families with known level-(n−1) behaviour.
//!
//! - `GapKnap`: `min Σx_i` s.t. `Σx_i ≥ 1/P`, with the closed-form
//!   certificate `y_I^N = 2^n/(P|I| − 1)` for `I ≠ ∅`.
//! - Empty hull: one Hamming-distance constraint per vertex, so no 0/1 point
//!   is feasible while the uniform corner vector still is.
//! - Origin and two-point indicators for the unconstrained checks.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::certify::{self, GapCertificate};
use crate::error::{Error, Result};
use crate::lattice::{self, enumerate_subsets, subset_differences, SubsetIndex};
use crate::moment::{Instance, LinearForm, MultilinearPoly};
use crate::scalar::{format_rational, int, pow2, rat, Rational};

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    lattice::check_dims(n, n)
}

/// `P = k·2^{2n+1}`.
pub fn gapknap_p(n: usize, k: &Rational) -> Rational {
    k * pow2(2 * n as i64 + 1)
}

/// The knapsack instance and closed-form certificate for an arbitrary `P > 1`.
///
/// The certificate always sums to 1; whether it is valid depends on `P`
/// (`y_∅^N` turns negative when `P` is too small).
pub fn gapknap_family(n: usize, p: &Rational) -> Result<(Instance, GapCertificate)> {
    check_n(n)?;
    if *p <= Rational::one() {
        return Err(Error::InvalidParameter(format!(
            "P must exceed 1, got {}",
            format_rational(p)
        )));
    }
    let ones = vec![Rational::one(); n];
    let objective = MultilinearPoly::linear(&ones)?;
    let constraint = LinearForm::new(ones, -p.recip());
    let inst = Instance::new(objective, vec![constraint])?;

    let scale = pow2(n as i64);
    // one value per cardinality
    let by_size: Vec<Rational> = (0..=n)
        .map(|c| {
            if c == 0 {
                Rational::zero()
            } else {
                &scale / (p * int(c as i64) - Rational::one())
            }
        })
        .collect();
    let rest: Rational = (1..=n)
        .map(|c| &by_size[c] * int(lattice::binomial(n, c) as i64))
        .sum();
    let empty = Rational::one() - rest;
    let cert = GapCertificate::from_fn(n, |s| {
        if s.is_empty() {
            empty.clone()
        } else {
            by_size[s.len()].clone()
        }
    })?
    .with_metadata("family", "gapknap")
    .with_metadata("P", format_rational(p));
    Ok((inst, cert))
}

/// `min {Σx_i : Σx_i ≥ 1/P}` with `P = k·2^{2n+1}`; integrality gap at least `k`.
pub fn gen_gapknap(n: usize, k: &Rational) -> Result<(Instance, GapCertificate)> {
    if *k < int(2) {
        return Err(Error::InvalidParameter(format!(
            "k must be at least 2, got {}",
            format_rational(k)
        )));
    }
    let (inst, cert) = gapknap_family(n, &gapknap_p(n, k))?;
    Ok((inst, cert.with_metadata("k", format_rational(k))))
}

/// Knapsack with an extra variable `x_{n+1}` in the constraint only:
/// `Σ_{i≤n} x_i + x_{n+1} ≥ 1 + 1/P`.
///
/// The certificate is the moment copy `y'_I = y_{I∖{n+1}}`. In corner
/// coordinates this puts `y^N_I` on `I ∪ {n+1}` and zero on every set
/// without `n+1`, so it still sums to 1. The new constraint is violated at
/// `∅` and at every singleton, so it is not single-vertex-cutting and no
/// gap survives at level `n`; the lifted vector is feasible at level `n−1`.
pub fn gen_gapknap_augmented(n: usize, k: &Rational) -> Result<(Instance, GapCertificate)> {
    check_n(n + 1)?;
    let (_, base) = gen_gapknap(n, k)?;
    let p = gapknap_p(n, k);
    let mut objective = vec![Rational::one(); n];
    objective.push(Rational::zero());
    let objective = MultilinearPoly::linear(&objective)?;
    let constraint = LinearForm::new(
        vec![Rational::one(); n + 1],
        -(Rational::one() + p.recip()),
    );
    let inst = Instance::new(objective, vec![constraint])?;
    let last = n + 1;
    let cert = GapCertificate::from_fn(n + 1, |s| {
        if s.contains(last) {
            base.get(s.without(last)).clone()
        } else {
            Rational::zero()
        }
    })?
    .with_metadata("family", "gapknap-aug")
    .with_metadata("k", format_rational(k))
    .with_metadata("P", format_rational(&p))
    .with_metadata(
        "lift",
        "moment copy y'_I = y_(I without n+1); corner mass on sets containing n+1; no rescaling",
    )
    .with_metadata("level", format!("{}", n.saturating_sub(1)));
    Ok((inst, cert))
}

/// `b = 1/2^{n+1}`.
pub fn default_b(n: usize) -> Rational {
    pow2(-(n as i64) - 1)
}

fn check_b(b: &Rational) -> Result<()> {
    if !b.is_positive() || *b >= rat(1, 2) {
        return Err(Error::InvalidParameter(format!(
            "b must lie in (0, 1/2), got {}",
            format_rational(b)
        )));
    }
    Ok(())
}

/// `Σ_{i∈P}(1 − x_i) + Σ_{i∉P} x_i ≥ b`, stored as `g(x) ≥ 0`.
pub fn hamming_constraint(n: usize, vertex: SubsetIndex, b: &Rational) -> LinearForm {
    let a = (1..=n)
        .map(|i| if vertex.contains(i) { int(-1) } else { int(1) })
        .collect();
    LinearForm::new(a, int(vertex.len() as i64) - b)
}

/// One constraint per listed vertex, cutting exactly that vertex.
/// Duplicates are dropped (with a warning); constraints follow canonical order.
pub fn svc_exclude(n: usize, vertices: &[SubsetIndex], b: &Rational) -> Result<Instance> {
    check_n(n)?;
    check_b(b)?;
    if let Some(v) = vertices.iter().find(|v| !v.fits(n)) {
        return Err(Error::SubsetOutOfRange {
            subset: v.to_string(),
            n,
        });
    }
    let mut sorted = vertices.to_vec();
    sorted.sort();
    sorted.dedup();
    if sorted.len() < vertices.len() {
        log::warn!(
            "svc_exclude: dropped {} duplicate vertices",
            vertices.len() - sorted.len()
        );
    }
    let constraints = sorted
        .par_iter()
        .map(|&v| hamming_constraint(n, v, b))
        .collect();
    Instance::new(MultilinearPoly::linear(&vec![int(1); n])?, constraints)
}

/// `Σ_{∅≠I⊆N} 1/(|I| − b) ≤ 1/b`, the condition for the uniform certificate.
pub fn empty_hull_condition(n: usize, b: &Rational) -> bool {
    let lhs: Rational = (1..=n)
        .map(|c| int(lattice::binomial(n, c) as i64) / (int(c as i64) - b))
        .sum();
    lhs <= b.recip()
}

/// Every vertex excluded, with the uniform certificate `y_I^N = 2^{−n}`.
pub fn gen_empty_hull(n: usize, b: &Rational) -> Result<(Instance, GapCertificate)> {
    check_n(n)?;
    check_b(b)?;
    if !empty_hull_condition(n, b) {
        return Err(Error::InvalidParameter(format!(
            "b = {} violates the reciprocal condition for n = {n}",
            format_rational(b)
        )));
    }
    let inst = svc_exclude(n, &enumerate_subsets(n, n)?, b)?;
    let cert = GapCertificate::from_fn(n, |_| pow2(-(n as i64)))?
        .with_metadata("family", "empty-hull")
        .with_metadata("b", format_rational(b));
    Ok((inst, cert))
}

/// `f = Π(1 − x_i)`: 1 at the origin, 0 elsewhere.
pub fn gen_origin_indicator(n: usize) -> Result<MultilinearPoly> {
    check_n(n)?;
    let coeffs = enumerate_subsets(n, n)?
        .into_iter()
        .map(|s| (s, if s.len() % 2 == 0 { int(1) } else { int(-1) }));
    MultilinearPoly::from_coeffs(n, coeffs)
}

/// Interpolates the table that is 1 at `x_{I1}` and `x_{I2}`, 0 elsewhere.
pub fn two_point_indicator(n: usize, i1: SubsetIndex, i2: SubsetIndex) -> Result<MultilinearPoly> {
    check_n(n)?;
    for s in [i1, i2] {
        if !s.fits(n) {
            return Err(Error::SubsetOutOfRange {
                subset: s.to_string(),
                n,
            });
        }
    }
    if i1 == i2 {
        return Err(Error::InvalidParameter(format!(
            "the two points must differ, both are {i1}"
        )));
    }
    let mut table = vec![Rational::zero(); 1 << n];
    table[i1.bits() as usize] = Rational::one();
    table[i2.bits() as usize] = Rational::one();
    MultilinearPoly::from_value_table(n, &table)
}

/// Coefficients of `f` from its mask-indexed value table (Möbius inversion).
pub fn interpolate(n: usize, table: &[Rational]) -> Result<Vec<Rational>> {
    if table.len() != 1 << n {
        return Err(Error::LengthMismatch {
            expected: 1 << n,
            found: table.len(),
        });
    }
    let mut buf = table.to_vec();
    subset_differences(&mut buf);
    Ok(buf)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub p: BigInt,
    pub relaxation_value: Rational,
    /// `certify_ilp` verdict on the closed-form certificate.
    pub certified: bool,
    /// Certified and relaxation value `≤ 1/k`.
    pub gap_at_least_k: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnapScan {
    pub n: usize,
    pub k: Rational,
    /// Grid rows followed by bisection rows, sorted by `P`.
    pub rows: Vec<ScanRow>,
    /// Smallest integer `P` whose closed-form certificate shows gap `≥ k`.
    /// An upper estimate of the true threshold, since only one family is tried.
    pub threshold: Option<BigInt>,
    /// `(k−1)(2^n−1)²`.
    pub lower_bound: Rational,
    /// `k·2^{2n+1}`.
    pub upper_bound: Rational,
}

/// One scan point: certify the closed-form certificate for this `P`.
pub fn knap_row(n: usize, k: &Rational, p: &BigInt) -> Result<ScanRow> {
    let (inst, cert) = gapknap_family(n, &Rational::from_integer(p.clone()))?;
    let opts = certify::CertifyOptions {
        cross_check: false,
        ..Default::default()
    };
    let report = certify::certify_ilp_with(&inst, &cert, opts)?;
    let certified = report.verdict();
    let relaxation_value = report.gap.relaxation_value;
    let gap_at_least_k = certified && relaxation_value <= k.recip();
    Ok(ScanRow {
        p: p.clone(),
        relaxation_value,
        certified,
        gap_at_least_k,
    })
}

/// Scans `P` over a grid with four points per doubling up to four times
/// `k·2^{2n+1}`, then bisects between the last failing and first passing
/// grid points. Grid points are certified on up to `jobs` threads.
pub fn scan_gapknap(n: usize, k: &Rational, jobs: usize) -> Result<KnapScan> {
    check_n(n)?;
    if *k < int(2) {
        return Err(Error::InvalidParameter(format!(
            "k must be at least 2, got {}",
            format_rational(k)
        )));
    }
    let upper_bound = gapknap_p(n, k);
    let side = int((1i64 << n) - 1);
    let lower_bound = (k - Rational::one()) * &side * &side;

    let limit = (&upper_bound * int(4)).ceil().to_integer();
    let mut grid: Vec<BigInt> = Vec::new();
    for j in 0.. {
        let p = pow2_quarter(j);
        if p > limit {
            break;
        }
        if p > BigInt::one() && grid.last() != Some(&p) {
            grid.push(p);
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let mut rows: Vec<ScanRow> = pool.install(|| {
        grid.par_iter()
            .map(|p| knap_row(n, k, p))
            .collect::<Result<Vec<_>>>()
    })?;

    let first_pass = rows.iter().position(|r| r.gap_at_least_k);
    let threshold = match first_pass {
        None => None,
        Some(0) => Some(rows[0].p.clone()),
        Some(i) => {
            let mut lo = rows[i - 1].p.clone();
            let mut hi = rows[i].p.clone();
            while &hi - &lo > BigInt::one() {
                let mid: BigInt = (&lo + &hi) / 2;
                let row = knap_row(n, k, &mid)?;
                if row.gap_at_least_k {
                    hi = mid;
                } else {
                    lo = mid;
                }
                rows.push(row);
            }
            Some(hi)
        }
    };
    rows.sort_by(|a, b| a.p.cmp(&b.p));
    rows.dedup_by(|a, b| a.p == b.p);
    Ok(KnapScan {
        n,
        k: k.clone(),
        rows,
        threshold,
        lower_bound,
        upper_bound,
    })
}

/// `round(2^{j/4})` as an integer, at least 1.
fn pow2_quarter(j: u32) -> BigInt {
    let whole = BigInt::one() << (j / 4);
    let frac = [1.0, 2f64.powf(0.25), 2f64.sqrt(), 2f64.powf(0.75)][(j % 4) as usize];
    // scale by 2^20 before rounding to keep the fractional factor
    let factor = BigInt::from((frac * (1u64 << 20) as f64).round() as u64);
    let p: BigInt = (whole * factor + (BigInt::one() << 19)) >> 20;
    p.max(BigInt::one())
}

/// `(k−1)(2^n−1)²` and `k·2^{2n+1}` as floats, for display.
pub fn scan_bounds_f64(scan: &KnapScan) -> (f64, f64) {
    let f = |r: &Rational| r.to_f64().unwrap_or(f64::NAN);
    (f(&scan.lower_bound), f(&scan.upper_bound))
}
