//! Moment matrices, the shift operator and level-`t` feasibility.
//!
//! A candidate `y` for `Las_t(P)` must satisfy `y_∅ = 1`, `M_{t+d}(y) ⪰ 0`
//! and `M_t(g_ℓ ∗ y) ⪰ 0` for every constraint, where `d = 1` iff the
//! instance has at least one linear constraint. For the top two levels the
//! PSD conditions reduce to sign conditions on corner coordinates:
//!
//! - `M_n(w)` is congruent to `diag(w^N)`;
//! - `M_{n−1}(w)` is congruent to `D + w_N^N vvᵀ` with `D = diag(w_I^N)` over
//!   `P_{n−1}(N)` and `v_I = (−1)^{n+1−|I|}`.
//!
//! [`lasserre_check`] uses those exact routes in rational mode and a dense
//! eigenvalue test everywhere else.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lattice::{
    self, enumerate_subsets, lattice_size, subset_differences, subset_sums,
    LatticeVector, Repr, SubsetIndex,
};
use crate::scalar::{format_rational, Rational, Scalar};
use crate::speig::{self, CornerCase, PsdCorner};

/// Default threshold for the dense PSD route: `λ_min ≥ −tol`.
pub const DEFAULT_TOL: f64 = 1e-9;

/// `g(x) = Σ a_i x_i + g0`, read as the constraint `g(x) ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearForm {
    pub a: Vec<Rational>,
    pub g0: Rational,
}

impl LinearForm {
    pub fn new(a: Vec<Rational>, g0: Rational) -> Self {
        LinearForm { a, g0 }
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn eval(&self, s: SubsetIndex) -> Rational {
        eval_linear(self, s)
    }

    /// Smallest value over `{0,1}^n` (attained by setting `x_i = 1` iff `a_i < 0`).
    pub fn min_over_cube(&self) -> Rational {
        self.a
            .iter()
            .filter(|a| **a < Rational::zero())
            .fold(self.g0.clone(), |acc, a| acc + a)
    }

    /// A constraint satisfied by every 0/1 point excludes nothing.
    pub fn is_redundant(&self) -> bool {
        self.min_over_cube() >= Rational::zero()
    }
}

/// `g(x_I) = Σ_{i ∈ I} a_i + g0`.
pub fn eval_linear(g: &LinearForm, s: SubsetIndex) -> Rational {
    s.indices()
        .filter_map(|i| g.a.get(i - 1))
        .fold(g.g0.clone(), |acc, a| acc + a)
}

/// Multilinear polynomial as a sparse map `I ↦ f_I` (coefficient of `Π_{i∈I} x_i`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultilinearPoly {
    n: usize,
    coeffs: BTreeMap<SubsetIndex, Rational>,
}

impl MultilinearPoly {
    pub fn zero(n: usize) -> Self {
        MultilinearPoly {
            n,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_coeffs<I>(n: usize, coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (SubsetIndex, Rational)>,
    {
        lattice::check_dims(n, 0)?;
        let mut p = MultilinearPoly::zero(n);
        for (s, c) in coeffs {
            if !s.fits(n) {
                return Err(Error::SubsetOutOfRange {
                    subset: s.to_string(),
                    n,
                });
            }
            let entry = p.coeffs.entry(s).or_insert_with(Rational::zero);
            *entry = entry.clone() + c;
        }
        p.coeffs.retain(|_, c| !c.is_zero());
        Ok(p)
    }

    /// `Σ_i c_i x_i`.
    pub fn linear(coeffs: &[Rational]) -> Result<Self> {
        Self::from_coeffs(
            coeffs.len(),
            coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| (SubsetIndex::singleton(i + 1), c.clone())),
        )
    }

    /// Interpolates a mask-indexed value table `I ↦ f(x_I)` of length `2^n`.
    pub fn from_value_table(n: usize, table: &[Rational]) -> Result<Self> {
        lattice::check_dims(n, n)?;
        if table.len() != 1 << n {
            return Err(Error::LengthMismatch {
                expected: 1 << n,
                found: table.len(),
            });
        }
        let mut buf = table.to_vec();
        subset_differences(&mut buf);
        Self::from_coeffs(
            n,
            buf.into_iter()
                .enumerate()
                .map(|(mask, c)| (SubsetIndex::from_bits(mask as u32), c)),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, s: SubsetIndex) -> Rational {
        self.coeffs.get(&s).cloned().unwrap_or_else(Rational::zero)
    }

    /// Nonzero coefficients in canonical subset order.
    pub fn terms(&self) -> impl Iterator<Item = (SubsetIndex, &Rational)> {
        self.coeffs.iter().map(|(s, c)| (*s, c))
    }

    /// Largest monomial size with a nonzero coefficient; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.keys().map(|s| s.len()).max()
    }

    pub fn eval(&self, s: SubsetIndex) -> Rational {
        eval_poly(self, s)
    }

    /// Mask-indexed table `I ↦ f(x_I)`.
    pub fn value_table(&self) -> Vec<Rational> {
        let mut buf = vec![Rational::zero(); 1 << self.n];
        for (s, c) in &self.coeffs {
            buf[s.bits() as usize] = c.clone();
        }
        subset_sums(&mut buf);
        buf
    }
}

/// `f(x_I) = Σ_{J ⊆ I} f_J`.
pub fn eval_poly(f: &MultilinearPoly, s: SubsetIndex) -> Rational {
    f.coeffs
        .iter()
        .filter(|(j, _)| j.is_subset_of(s))
        .fold(Rational::zero(), |acc, (_, c)| acc + c)
}

/// `min { f(x) : x ∈ {0,1}^n, g_ℓ(x) ≥ 0 }`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    n: usize,
    pub objective: MultilinearPoly,
    pub constraints: Vec<LinearForm>,
}

impl Instance {
    pub fn new(objective: MultilinearPoly, constraints: Vec<LinearForm>) -> Result<Self> {
        let n = objective.n();
        for g in &constraints {
            if g.n() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    found: g.n(),
                });
            }
        }
        Ok(Instance {
            n,
            objective,
            constraints,
        })
    }

    pub fn unconstrained(objective: MultilinearPoly) -> Self {
        Instance {
            n: objective.n(),
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.constraints.len()
    }

    /// `d = 1` iff there is at least one linear constraint.
    pub fn d(&self) -> usize {
        usize::from(!self.constraints.is_empty())
    }

    pub fn redundant_constraints(&self) -> Vec<usize> {
        self.constraints
            .iter()
            .enumerate()
            .filter(|(_, g)| g.is_redundant())
            .map(|(i, _)| i)
            .collect()
    }
}

/// Dense symmetric matrix indexed by subsets; lower triangle stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix<T> {
    index: Vec<SubsetIndex>,
    lower: Vec<T>,
}

impl<T: Scalar> SymmetricMatrix<T> {
    pub fn from_fn(
        index: Vec<SubsetIndex>,
        mut entry: impl FnMut(SubsetIndex, SubsetIndex) -> T,
    ) -> Self {
        let mut lower = Vec::with_capacity(index.len() * (index.len() + 1) / 2);
        for r in 0..index.len() {
            for c in 0..=r {
                lower.push(entry(index[r], index[c]));
            }
        }
        SymmetricMatrix { index, lower }
    }

    pub fn dim(&self) -> usize {
        self.index.len()
    }

    pub fn index(&self) -> &[SubsetIndex] {
        &self.index
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        let (r, c) = if r >= c { (r, c) } else { (c, r) };
        &self.lower[r * (r + 1) / 2 + c]
    }

    pub fn to_dense_f64(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |r, c| self.get(r, c).to_f64())
    }
}

/// `M_t(w)` with `(I, J)` entry `w_{I∪J}` for `I, J ∈ P_t(N)`.
pub fn moment_matrix<T: Scalar>(w: &LatticeVector<T>, t: usize) -> Result<SymmetricMatrix<T>> {
    w.require_repr(Repr::Moment)?;
    let n = w.n();
    if t > n {
        return Err(Error::LevelOutOfRange { t, n });
    }
    let needed = (2 * t).min(n);
    if w.level() < needed {
        return Err(Error::Truncated {
            level: w.level(),
            needed,
        });
    }
    let index = enumerate_subsets(n, t)?;
    Ok(SymmetricMatrix::from_fn(index, |a, b| {
        w.at(a.union(b)).clone()
    }))
}

/// `(g ∗ y)_I = Σ_i g_i y_{I∪{i}} + g0 y_I`.
///
/// The output has one level less than `y`, except that a full-lattice input
/// stays full (`I ∪ {i}` never leaves `P(N)`).
pub fn shift<T: Scalar>(g: &LinearForm, y: &LatticeVector<T>) -> Result<LatticeVector<T>> {
    y.require_repr(Repr::Moment)?;
    let n = y.n();
    if g.n() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: g.n(),
        });
    }
    let coeffs: Vec<T> = g.a.iter().map(T::from_rational).collect();
    let g0 = T::from_rational(&g.g0);
    if y.is_full() {
        let buf = y.to_mask_order()?;
        let out = (0..buf.len())
            .map(|mask| {
                coeffs
                    .iter()
                    .enumerate()
                    .fold(g0.clone() * buf[mask].clone(), |acc, (i, gi)| {
                        acc + gi.clone() * buf[mask | (1 << i)].clone()
                    })
            })
            .collect();
        return LatticeVector::from_mask_order(n, Repr::Moment, out);
    }
    if y.level() == 0 {
        return Err(Error::Truncated {
            level: 0,
            needed: 1,
        });
    }
    LatticeVector::from_fn(n, y.level() - 1, Repr::Moment, |s| {
        coeffs
            .iter()
            .enumerate()
            .fold(g0.clone() * y.at(s).clone(), |acc, (i, gi)| {
                acc + gi.clone() * y.at(s.with(i + 1)).clone()
            })
    })
}

/// `Σ_I f(x_I) y_I^N`, which equals `Σ_I f_I y_I` for `y = zeta(yN)`.
pub fn objective_value<T: Scalar>(f: &MultilinearPoly, y_n: &LatticeVector<T>) -> Result<T> {
    y_n.require_repr(Repr::Corner)?;
    y_n.require_full()?;
    if f.n() != y_n.n() {
        return Err(Error::LengthMismatch {
            expected: y_n.n(),
            found: f.n(),
        });
    }
    let table = f.value_table();
    Ok(y_n.iter().fold(T::zero(), |acc, (s, y)| {
        acc + T::from_rational(&table[s.bits() as usize]) * y.clone()
    }))
}

/// Corner coordinates of a full moment vector; `M_n(w) ⪰ 0` iff all are `≥ 0`.
pub fn corner_form_full<T: Scalar>(w: &LatticeVector<T>) -> Result<LatticeVector<T>> {
    lattice::mobius(w)
}

/// `D + ρ vvᵀ`, congruent to `M_{n−1}(w)` when built by
/// [`corner_form_level_n_minus_1`]. Also used for arbitrary
/// diagonal-plus-rank-one inputs with a `±1` sign vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CornerForm<T> {
    pub diag: Vec<T>,
    pub rho: T,
    pub signs: Vec<i8>,
}

impl<T: Scalar> CornerForm<T> {
    pub fn new(diag: Vec<T>, rho: T, signs: Vec<i8>) -> Result<Self> {
        if diag.len() != signs.len() {
            return Err(Error::LengthMismatch {
                expected: diag.len(),
                found: signs.len(),
            });
        }
        if signs.iter().any(|s| *s != 1 && *s != -1) {
            return Err(Error::InvalidParameter("sign vector entries must be ±1".into()));
        }
        Ok(CornerForm { diag, rho, signs })
    }

    /// All-`+1` sign vector; the spectrum does not depend on the signs.
    pub fn with_unit_signs(diag: Vec<T>, rho: T) -> Self {
        let signs = vec![1; diag.len()];
        CornerForm { diag, rho, signs }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn assemble(&self) -> DMatrix<f64> {
        let rho = self.rho.to_f64();
        let d = self.dim();
        DMatrix::from_fn(d, d, |r, c| {
            let base = if r == c { self.diag[r].to_f64() } else { 0.0 };
            base + rho * f64::from(self.signs[r]) * f64::from(self.signs[c])
        })
    }
}

/// `v_I = (−1)^{n+1−|I|}`.
pub fn corner_sign(n: usize, s: SubsetIndex) -> i8 {
    if (n + 1 - s.len()).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Splits `mobius(w)` into the diagonal over `P_{n−1}(N)` and `ρ = w_N^N`.
pub fn corner_form_level_n_minus_1<T: Scalar>(w: &LatticeVector<T>) -> Result<CornerForm<T>> {
    let n = w.n();
    if n == 0 {
        return Err(Error::InvalidParameter("corner form needs n ≥ 1".into()));
    }
    let corner = lattice::mobius(w)?;
    let split = lattice_size(n, n - 1);
    let mut values = corner.into_values();
    let rho = values.pop().expect("full lattice is nonempty");
    debug_assert_eq!(values.len(), split);
    let signs = enumerate_subsets(n, n - 1)?
        .into_iter()
        .map(|s| corner_sign(n, s))
        .collect();
    Ok(CornerForm {
        diag: values,
        rho,
        signs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsdRoute {
    /// Level `n`: sign test on the corner coordinates.
    ExactDiagonal,
    /// Level `n−1`: sign counting plus the exact reciprocal sum.
    ExactCornerForm,
    /// Float eigendecomposition with threshold `λ_min ≥ −tol`.
    Dense,
}

impl PsdRoute {
    pub fn is_exact(self) -> bool {
        !matches!(self, PsdRoute::Dense)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PsdWitness<T> {
    /// Smallest corner coordinate.
    MinCornerEntry { subset: SubsetIndex, value: T },
    Corner(CornerCase<T>),
    MinEigenvalue(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixLabel {
    Moment,
    Constraint(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixVerdict<T> {
    pub label: MatrixLabel,
    pub level: usize,
    pub psd: bool,
    pub route: PsdRoute,
    pub witness: PsdWitness<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport<T> {
    pub t: usize,
    pub d: usize,
    pub normalized: bool,
    pub moment: MatrixVerdict<T>,
    pub constraints: Vec<MatrixVerdict<T>>,
    pub redundant_constraints: Vec<usize>,
}

impl<T> FeasibilityReport<T> {
    pub fn feasible(&self) -> bool {
        self.normalized && self.moment.psd && self.constraints.iter().all(|c| c.psd)
    }
}

fn psd_verdict<T: Scalar>(
    w: &LatticeVector<T>,
    level: usize,
    label: MatrixLabel,
    tol: f64,
) -> Result<MatrixVerdict<T>> {
    let n = w.n();
    let exact = T::is_exact() && w.is_full() && level + 1 >= n;
    if exact && level == n {
        let corner = corner_form_full(w)?;
        let (subset, value) = corner
            .iter()
            .min_by(|a, b| a.1.partial_cmp(b.1).expect("exact scalars are totally ordered"))
            .map(|(s, v)| (s, v.clone()))
            .expect("full lattice is nonempty");
        return Ok(MatrixVerdict {
            label,
            level,
            psd: value >= T::zero(),
            route: PsdRoute::ExactDiagonal,
            witness: PsdWitness::MinCornerEntry { subset, value },
        });
    }
    if exact {
        let corner = corner_form_full(w)?;
        let PsdCorner { psd, case } = speig::psd_corner(&corner)?;
        return Ok(MatrixVerdict {
            label,
            level,
            psd,
            route: PsdRoute::ExactCornerForm,
            witness: PsdWitness::Corner(case),
        });
    }
    let m = moment_matrix(w, level)?;
    let lambda = speig::dense_min_eigenvalue(&m.to_dense_f64())?;
    Ok(MatrixVerdict {
        label,
        level,
        psd: lambda >= -tol,
        route: PsdRoute::Dense,
        witness: PsdWitness::MinEigenvalue(lambda),
    })
}

/// Checks `y ∈ Las_t(inst)`.
///
/// `y` must cover `P_{min(2t+2d, n)}(N)`; `d` is taken from the instance.
/// Levels `t+d ≥ n` are clamped to `n`.
pub fn lasserre_check<T: Scalar>(
    inst: &Instance,
    y: &LatticeVector<T>,
    t: usize,
    tol: f64,
) -> Result<FeasibilityReport<T>> {
    y.require_repr(Repr::Moment)?;
    let n = inst.n();
    if y.n() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: y.n(),
        });
    }
    if t > n {
        return Err(Error::LevelOutOfRange { t, n });
    }
    let d = inst.d();
    let top = (t + d).min(n);
    let needed = (2 * (t + d)).min(n);
    if y.level() < needed {
        return Err(Error::Truncated {
            level: y.level(),
            needed,
        });
    }

    let y_empty = y.at(SubsetIndex::EMPTY).clone();
    let normalized = if T::is_exact() {
        y_empty == T::one()
    } else {
        (y_empty - T::one()).abs().to_f64() <= tol
    };

    let moment = psd_verdict(y, top, MatrixLabel::Moment, tol)?;
    let constraints = inst
        .constraints
        .iter()
        .enumerate()
        .map(|(l, g)| {
            let z = shift(g, y)?;
            psd_verdict(&z, t, MatrixLabel::Constraint(l), tol)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(FeasibilityReport {
        t,
        d,
        normalized,
        moment,
        constraints,
        redundant_constraints: inst.redundant_constraints(),
    })
}

impl std::fmt::Display for LinearForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (i, a) in self.a.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if a.is_one() {
                write!(f, "x{}", i + 1)?;
            } else {
                write!(f, "({})·x{}", format_rational(a), i + 1)?;
            }
        }
        if !first {
            f.write_str(" + ")?;
        }
        write!(f, "({}) ≥ 0", format_rational(&self.g0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{mobius, zeta};
    use crate::scalar::{int, rat};
    use crate::speig::dense_min_eigenvalue;
    use proptest::prelude::*;

    fn set(ix: &[usize]) -> SubsetIndex {
        SubsetIndex::from_indices(ix.iter().copied()).unwrap()
    }

    fn moment_vec(n: usize, vals: &[Rational]) -> LatticeVector<Rational> {
        LatticeVector::new(n, n, Repr::Moment, vals.to_vec()).unwrap()
    }

    fn corner_vec(n: usize, vals: &[Rational]) -> LatticeVector<Rational> {
        LatticeVector::new(n, n, Repr::Corner, vals.to_vec()).unwrap()
    }

    fn point_mass(n: usize, x: SubsetIndex) -> LatticeVector<Rational> {
        LatticeVector::from_fn(n, n, Repr::Moment, |s| {
            if s.is_subset_of(x) {
                int(1)
            } else {
                int(0)
            }
        })
        .unwrap()
    }

    #[test]
    fn moment_matrix_examples() {
        let y1 = rat(2, 5);
        let m = moment_matrix(&moment_vec(1, &[int(1), y1.clone()]), 1).unwrap();
        assert_eq!(
            (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1)),
            (&int(1), &y1, &y1, &y1)
        );

        let w = moment_vec(2, &[int(1), rat(1, 2), rat(1, 2), rat(1, 4)]);
        let m = moment_matrix(&w, 1).unwrap();
        let rows: Vec<Vec<Rational>> = (0..3)
            .map(|r| (0..3).map(|c| m.get(r, c).clone()).collect())
            .collect();
        assert_eq!(
            rows,
            vec![
                vec![int(1), rat(1, 2), rat(1, 2)],
                vec![rat(1, 2), rat(1, 2), rat(1, 4)],
                vec![rat(1, 2), rat(1, 4), rat(1, 2)],
            ]
        );

        let m0 = moment_matrix(&w, 0).unwrap();
        assert_eq!(m0.dim(), 1);
        assert_eq!(m0.get(0, 0), &int(1));
    }

    #[test]
    fn moment_matrix_needs_level() {
        let w = LatticeVector::<Rational>::zeros(4, 1, Repr::Moment).unwrap();
        assert!(matches!(moment_matrix(&w, 1), Err(Error::Truncated { .. })));
        assert!(moment_matrix(&w.truncate(0).unwrap(), 0).is_ok());
    }

    #[test]
    fn shift_examples() {
        let g = LinearForm::new(vec![int(1)], int(-1));
        let z = shift(&g, &moment_vec(1, &[int(1), int(1)])).unwrap();
        assert_eq!(z.values(), &[int(0), int(0)]);

        let c = rat(3, 7);
        let g = LinearForm::new(vec![int(0), int(0), int(0)], c.clone());
        let y = LatticeVector::from_fn(3, 3, Repr::Moment, |s| rat(s.bits() as i64 + 1, 2))
            .unwrap();
        let z = shift(&g, &y).unwrap();
        for (a, b) in z.values().iter().zip(y.values()) {
            assert_eq!(a, &(c.clone() * b));
        }

        let trunc = y.truncate(2).unwrap();
        let z = shift(&g, &trunc).unwrap();
        assert_eq!(z.level(), 1);
        assert!(shift(&g, &y.truncate(0).unwrap()).is_err());
    }

    #[test]
    fn eval_examples() {
        let g = LinearForm::new(vec![int(2), int(3)], int(-1));
        assert_eq!(eval_linear(&g, set(&[1])), int(1));
        assert_eq!(eval_linear(&g, SubsetIndex::EMPTY), int(-1));
        let p = int(64);
        let knap = LinearForm::new(vec![int(1); 3], -p.recip());
        assert_eq!(eval_linear(&knap, SubsetIndex::full(3)), int(3) - p.recip());

        let sum = MultilinearPoly::linear(&vec![int(1); 4]).unwrap();
        for mask in 0..16u32 {
            let s = SubsetIndex::from_bits(mask);
            assert_eq!(eval_poly(&sum, s), int(s.len() as i64));
        }
    }

    #[test]
    fn objective_value_examples() {
        let f = MultilinearPoly::linear(&[int(2), int(-1), int(5)]).unwrap();
        let x = set(&[1, 3]);
        let mass = mobius(&point_mass(3, x)).unwrap();
        assert_eq!(objective_value(&f, &mass).unwrap(), int(7));

        let c = rat(-5, 3);
        let constant = MultilinearPoly::from_coeffs(3, [(SubsetIndex::EMPTY, c.clone())]).unwrap();
        let dist = corner_vec(
            3,
            &[rat(1, 8), rat(1, 4), rat(1, 16), rat(1, 16), rat(1, 8), rat(1, 8), rat(1, 8), rat(1, 8)],
        );
        assert_eq!(objective_value(&constant, &dist).unwrap(), c);
    }

    #[test]
    fn corner_form_full_examples() {
        let w = zeta(&corner_vec(2, &vec![rat(1, 4); 4])).unwrap();
        let c = corner_form_full(&w).unwrap();
        assert!(c.values().iter().all(|v| *v >= int(0)));
        let lam = dense_min_eigenvalue(&moment_matrix(&w, 2).unwrap().to_dense_f64()).unwrap();
        assert!(lam >= -1e-12);

        let w = zeta(&corner_vec(2, &[int(-1), int(1), int(1), int(0)])).unwrap();
        let lam = dense_min_eigenvalue(&moment_matrix(&w, 2).unwrap().to_dense_f64()).unwrap();
        assert!(lam < -1e-6);

        let w = moment_vec(1, &[int(1), int(1)]);
        assert_eq!(corner_form_full(&w).unwrap().values(), &[int(0), int(1)]);
        let m = moment_matrix(&w, 1).unwrap().to_dense_f64();
        let mut eig: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        assert!((eig[0] - 0.0).abs() < 1e-12 && (eig[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn corner_form_level_n_minus_1_examples() {
        let w = zeta(&corner_vec(2, &[int(-1), int(4), int(4), int(4)])).unwrap();
        let form = corner_form_level_n_minus_1(&w).unwrap();
        assert_eq!(form.diag, vec![int(-1), int(4), int(4)]);
        assert_eq!(form.rho, int(4));
        assert_eq!(form.signs, vec![-1, 1, 1]);

        let w = zeta(&corner_vec(2, &[int(2), int(3), int(5), int(0)])).unwrap();
        let form = corner_form_level_n_minus_1(&w).unwrap();
        assert_eq!(form.rho, int(0));
        let dense = form.assemble();
        assert_eq!(dense, DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 3.0, 5.0])));

        let w = moment_vec(1, &[int(1), rat(1, 3)]);
        let form = corner_form_level_n_minus_1(&w).unwrap();
        assert_eq!(form.diag, vec![rat(2, 3)]);
        assert_eq!(form.rho, rat(1, 3));
        assert_eq!(form.signs, vec![1]);
    }

    #[test]
    fn point_evaluation_is_feasible_at_every_level() {
        let obj = MultilinearPoly::linear(&vec![int(1); 4]).unwrap();
        let g = LinearForm::new(vec![int(1), int(1), int(-1), int(2)], int(-1));
        let inst = Instance::new(obj, vec![g.clone()]).unwrap();
        let x = set(&[1, 2]);
        assert!(g.eval(x) >= int(0));
        let y = point_mass(4, x);
        for t in 0..=4 {
            let rep = lasserre_check(&inst, &y, t, DEFAULT_TOL).unwrap();
            assert!(rep.feasible(), "t = {t}: {rep:?}");
            assert_eq!(rep.d, 1);
        }
        let rep = lasserre_check(&inst, &y, 2, DEFAULT_TOL).unwrap();
        assert_eq!(rep.moment.route, PsdRoute::ExactCornerForm);
        assert_eq!(rep.constraints[0].route, PsdRoute::Dense);
        let rep = lasserre_check(&inst, &y, 3, DEFAULT_TOL).unwrap();
        assert_eq!(rep.moment.route, PsdRoute::ExactDiagonal);
        assert_eq!(rep.constraints[0].route, PsdRoute::ExactCornerForm);
    }

    #[test]
    fn infeasible_point_fails_constraint() {
        let obj = MultilinearPoly::linear(&vec![int(1); 2]).unwrap();
        let g = LinearForm::new(vec![int(1), int(1)], int(-1));
        let inst = Instance::new(obj, vec![g]).unwrap();
        let y = point_mass(2, SubsetIndex::EMPTY);
        let rep = lasserre_check(&inst, &y, 1, DEFAULT_TOL).unwrap();
        assert!(rep.moment.psd);
        assert!(!rep.constraints[0].psd);
        assert!(!rep.feasible());
    }

    #[test]
    fn lasserre_check_level_errors() {
        let inst = Instance::unconstrained(MultilinearPoly::zero(3));
        let y = point_mass(3, SubsetIndex::EMPTY);
        assert!(matches!(
            lasserre_check(&inst, &y.truncate(1).unwrap(), 1, DEFAULT_TOL),
            Err(Error::Truncated { .. })
        ));
        assert!(lasserre_check(&inst, &y.truncate(2).unwrap(), 1, DEFAULT_TOL).is_ok());
        assert!(matches!(
            lasserre_check(&inst, &y, 4, DEFAULT_TOL),
            Err(Error::LevelOutOfRange { .. })
        ));
    }

    #[test]
    fn float_mode_uses_dense_route() {
        let inst = Instance::unconstrained(MultilinearPoly::zero(2));
        let y = point_mass(2, set(&[2])).to_f64();
        let rep = lasserre_check(&inst, &y, 2, DEFAULT_TOL).unwrap();
        assert!(rep.feasible());
        assert_eq!(rep.moment.route, PsdRoute::Dense);
    }

    #[test]
    fn redundant_constraints_are_reported() {
        let obj = MultilinearPoly::zero(2);
        let tight = LinearForm::new(vec![int(1), int(1)], int(-1));
        let loose = LinearForm::new(vec![int(1), int(-1)], int(1));
        let inst = Instance::new(obj, vec![tight, loose]).unwrap();
        assert_eq!(inst.redundant_constraints(), vec![1]);
    }

    fn small_rat() -> impl Strategy<Value = Rational> {
        (-30i64..=30, 1i64..=9).prop_map(|(p, q)| rat(p, q))
    }

    proptest! {
        #[test]
        fn shift_identity_in_corner_coordinates(
            n in 1usize..=5,
            a in prop::collection::vec(small_rat(), 5),
            g0 in small_rat(),
            vals in prop::collection::vec(small_rat(), 32),
        ) {
            let g = LinearForm::new(a[..n].to_vec(), g0);
            let y = moment_vec(n, &vals[..1 << n]);
            let lhs = mobius(&shift(&g, &y).unwrap()).unwrap();
            let yn = mobius(&y).unwrap();
            for ((s, z), w) in lhs.iter().zip(yn.values()) {
                prop_assert_eq!(z.clone(), eval_linear(&g, s) * w);
            }
        }

        #[test]
        fn objective_matches_moment_form(
            n in 0usize..=5,
            coeffs in prop::collection::vec(small_rat(), 32),
            vals in prop::collection::vec(small_rat(), 32),
        ) {
            let f = MultilinearPoly::from_coeffs(
                n,
                (0..1u32 << n).map(|m| (SubsetIndex::from_bits(m), coeffs[m as usize].clone())),
            ).unwrap();
            let y = moment_vec(n, &vals[..1 << n]);
            let direct = y.iter().fold(int(0), |acc, (s, v)| acc + f.coeff(s) * v);
            prop_assert_eq!(objective_value(&f, &mobius(&y).unwrap()).unwrap(), direct);
        }

        #[test]
        fn value_table_roundtrip(n in 0usize..=5, vals in prop::collection::vec(small_rat(), 32)) {
            let table = vals[..1 << n].to_vec();
            let f = MultilinearPoly::from_value_table(n, &table).unwrap();
            prop_assert_eq!(f.value_table(), table.clone());
            for (mask, v) in table.iter().enumerate() {
                prop_assert_eq!(&f.eval(SubsetIndex::from_bits(mask as u32)), v);
            }
        }
    }
}
