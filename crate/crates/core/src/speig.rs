//! Spectra and PSD decisions for `D + ρ vvᵀ` with a `±1` sign vector.
//!
//! Flipping the signs of rows and columns is an orthogonal similarity, so
//! the spectrum equals that of `D + ρ eeᵀ`. With the distinct diagonal
//! values `δ_1 < … < δ_k` of multiplicities `μ_j`, the eigenvalues are
//!
//! - every `δ_j` with `μ_j ≥ 2`, repeated `μ_j − 1` times, and
//! - the `k` roots of the secular equation `Σ_j μ_j / (λ − δ_j) = 1/ρ`,
//!   one strictly inside each gap `(δ_j, δ_{j+1})` and one outside
//!   `[δ_1, δ_k]` on the side of `sign(ρ)`.
//!
//! The exact PSD test [`psd_corner`] never computes eigenvalues. It only
//! counts signs and evaluates `Σ_I 1/w_I^N`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::lattice::{LatticeVector, Repr, SubsetIndex};
use crate::moment::CornerForm;
use crate::scalar::Scalar;

/// Bracket width at which bisection stops.
pub const DEFAULT_ROOT_TOL: f64 = 1e-12;
/// Diagonal entries closer than this (relative) are merged in float mode.
pub const DEDUP_REL_TOL: f64 = 1e-12;
/// Largest matrix accepted by the dense oracle.
pub const MAX_DENSE_DIM: usize = 4096;

const MAX_BISECTIONS: usize = 1100;

#[derive(Debug, Clone, PartialEq)]
pub enum CornerCase<T> {
    /// Every entry is `≥ 0`: a sum of PSD matrices.
    AllNonnegative,
    /// One negative entry, all others strictly positive; PSD iff the
    /// reciprocal sum is `≤ 0`.
    SingleNegative {
        negative: SubsetIndex,
        reciprocal_sum: T,
    },
    /// Two or more negative entries: never PSD.
    SeveralNegative {
        first: SubsetIndex,
        second: SubsetIndex,
    },
    /// A negative entry next to a zero entry. Outside the reciprocal-sum
    /// branch; a 2×2 principal minor of `D + ρvvᵀ` is then negative or a
    /// diagonal entry is negative, so the matrix is not PSD.
    NegativeWithZero {
        negative: SubsetIndex,
        zero: SubsetIndex,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsdCorner<T> {
    pub psd: bool,
    pub case: CornerCase<T>,
}

/// Decides `M_{n−1}(zeta(yN)) ⪰ 0` from the corner coordinates alone.
///
/// Exact for [`Rational`](crate::Rational) input; in float mode the sign
/// tests inherit rounding.
pub fn psd_corner<T: Scalar>(y_n: &LatticeVector<T>) -> Result<PsdCorner<T>> {
    y_n.require_repr(Repr::Corner)?;
    y_n.require_full()?;
    Ok(psd_corner_entries(y_n.iter()))
}

pub(crate) fn psd_corner_entries<'a, T: Scalar>(
    entries: impl IntoIterator<Item = (SubsetIndex, &'a T)>,
) -> PsdCorner<T> {
    let mut negative: Vec<SubsetIndex> = Vec::new();
    let mut zero: Option<SubsetIndex> = None;
    let mut reciprocal_sum = T::zero();
    for (s, v) in entries {
        if v.is_negative() {
            negative.push(s);
            if negative.len() == 2 {
                return PsdCorner {
                    psd: false,
                    case: CornerCase::SeveralNegative {
                        first: negative[0],
                        second: negative[1],
                    },
                };
            }
        } else if v.is_zero() {
            zero.get_or_insert(s);
            continue;
        }
        reciprocal_sum = reciprocal_sum + T::one() / v.clone();
    }
    match (negative.first(), zero) {
        (None, _) => PsdCorner {
            psd: true,
            case: CornerCase::AllNonnegative,
        },
        (Some(&neg), Some(z)) => PsdCorner {
            psd: false,
            case: CornerCase::NegativeWithZero {
                negative: neg,
                zero: z,
            },
        },
        (Some(&neg), None) => PsdCorner {
            psd: !reciprocal_sum.is_positive(),
            case: CornerCase::SingleNegative {
                negative: neg,
                reciprocal_sum,
            },
        },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    /// Full spectrum, ascending; length equals the matrix dimension.
    pub eigenvalues: Vec<f64>,
    /// Diagonal values carried over unchanged, with their multiplicity `μ − 1`.
    pub repeated: Vec<(f64, usize)>,
    /// Roots of the secular equation, ascending.
    pub secular_roots: Vec<f64>,
    /// `|f(λ) − 1/ρ|` scaled by `|1/ρ| + Σ_j μ_j/|λ − δ_j|`, per secular root.
    pub residuals: Vec<f64>,
}

impl SpectrumReport {
    pub fn secular_root_count(&self) -> usize {
        self.secular_roots.len()
    }
}

/// Distinct diagonal values and their multiplicities.
struct Poles {
    values: Vec<f64>,
    weights: Vec<f64>,
}

impl Poles {
    fn new(diag: &[f64]) -> Self {
        let mut sorted = diag.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut values: Vec<f64> = Vec::new();
        let mut weights: Vec<f64> = Vec::new();
        for d in sorted {
            match values.last() {
                Some(&prev) if (d - prev).abs() <= DEDUP_REL_TOL * prev.abs().max(d.abs()) => {
                    *weights.last_mut().expect("parallel to values") += 1.0;
                }
                _ => {
                    values.push(d);
                    weights.push(1.0);
                }
            }
        }
        Poles { values, weights }
    }

    fn secular(&self, lambda: f64) -> f64 {
        self.values
            .iter()
            .zip(&self.weights)
            .map(|(d, w)| w / (lambda - d))
            .sum()
    }

    fn secular_derivative(&self, lambda: f64) -> f64 {
        -self
            .values
            .iter()
            .zip(&self.weights)
            .map(|(d, w)| w / ((lambda - d) * (lambda - d)))
            .sum::<f64>()
    }

    fn scale(&self, lambda: f64) -> f64 {
        self.values
            .iter()
            .zip(&self.weights)
            .map(|(d, w)| w / (lambda - d).abs())
            .sum()
    }

    fn repeated(&self) -> Vec<(f64, usize)> {
        self.values
            .iter()
            .zip(&self.weights)
            .filter(|(_, w)| **w >= 2.0)
            .map(|(v, w)| (*v, *w as usize - 1))
            .collect()
    }
}

/// Root of `f(λ) = target` in `(lo, hi)`, where `f` decreases across the bracket.
fn solve_bracket(poles: &Poles, target: f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let (lo0, hi0) = (lo, hi);
    let mut iterations = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if poles.secular(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
        if iterations > MAX_BISECTIONS {
            return Err(Error::NonConvergence { lo, hi, iterations });
        }
    }
    let mut lambda = 0.5 * (lo + hi);
    // Newton polish; only accepted while it stays inside the original bracket
    // and reduces the residual.
    for _ in 0..2 {
        let r = poles.secular(lambda) - target;
        let dr = poles.secular_derivative(lambda);
        if r == 0.0 || !dr.is_finite() || dr == 0.0 {
            break;
        }
        let next = lambda - r / dr;
        if next > lo0 && next < hi0 && (poles.secular(next) - target).abs() < r.abs() {
            lambda = next;
        } else {
            break;
        }
    }
    if !lambda.is_finite() {
        return Err(Error::NonConvergence {
            lo,
            hi,
            iterations,
        });
    }
    Ok(lambda)
}

/// Exterior bracket: `(δ_k, δ_k + ρ·dim]` for `ρ > 0`, `[δ_1 + ρ·dim, δ_1)` for `ρ < 0`.
fn exterior_root(poles: &Poles, rho: f64, dim: usize, tol: f64) -> Result<f64> {
    let target = 1.0 / rho;
    let mut reach = rho.abs() * dim as f64;
    if rho > 0.0 {
        let base = *poles.values.last().expect("nonempty diagonal");
        while poles.secular(base + reach) > target {
            reach *= 2.0;
        }
        solve_bracket(poles, target, base, base + reach, tol)
    } else {
        let base = poles.values[0];
        while poles.secular(base - reach) < target {
            reach *= 2.0;
        }
        solve_bracket(poles, target, base - reach, base, tol)
    }
}

fn float_form<T: Scalar>(form: &CornerForm<T>) -> Result<(Vec<f64>, f64)> {
    if form.dim() == 0 {
        return Err(Error::InvalidParameter("empty diagonal".into()));
    }
    let diag: Vec<f64> = form.diag.iter().map(Scalar::to_f64).collect();
    let rho = form.rho.to_f64();
    if diag.iter().any(|d| !d.is_finite()) || !rho.is_finite() {
        return Err(Error::InvalidParameter("non-finite entry in corner form".into()));
    }
    Ok((diag, rho))
}

/// Full spectrum of `D + ρ vvᵀ` via the secular equation.
pub fn eigenvalues_dpr1<T: Scalar>(form: &CornerForm<T>, tol: f64) -> Result<SpectrumReport> {
    let (diag, rho) = float_form(form)?;
    if rho == 0.0 {
        let mut eigenvalues = diag;
        eigenvalues.sort_by(f64::total_cmp);
        return Ok(SpectrumReport {
            eigenvalues,
            repeated: Vec::new(),
            secular_roots: Vec::new(),
            residuals: Vec::new(),
        });
    }
    let poles = Poles::new(&diag);
    let target = 1.0 / rho;
    let mut roots = Vec::with_capacity(poles.values.len());
    if rho < 0.0 {
        roots.push(exterior_root(&poles, rho, diag.len(), tol)?);
    }
    for gap in poles.values.windows(2) {
        roots.push(solve_bracket(&poles, target, gap[0], gap[1], tol)?);
    }
    if rho > 0.0 {
        roots.push(exterior_root(&poles, rho, diag.len(), tol)?);
    }
    let residuals = roots
        .iter()
        .map(|&l| (poles.secular(l) - target).abs() / (target.abs() + poles.scale(l)))
        .collect();
    let repeated = poles.repeated();
    let mut eigenvalues: Vec<f64> = repeated
        .iter()
        .flat_map(|&(v, mult)| std::iter::repeat_n(v, mult))
        .chain(roots.iter().copied())
        .collect();
    eigenvalues.sort_by(f64::total_cmp);
    debug_assert_eq!(eigenvalues.len(), diag.len());
    Ok(SpectrumReport {
        eigenvalues,
        repeated,
        secular_roots: roots,
        residuals,
    })
}

/// Least eigenvalue of `D + ρ vvᵀ`, solving only the leftmost bracket.
pub fn min_eigenvalue_dpr1<T: Scalar>(form: &CornerForm<T>, tol: f64) -> Result<f64> {
    let (diag, rho) = float_form(form)?;
    let poles = Poles::new(&diag);
    let lowest = poles.values[0];
    if rho == 0.0 || (rho > 0.0 && poles.weights[0] >= 2.0) {
        return Ok(lowest);
    }
    if rho < 0.0 || poles.values.len() == 1 {
        return exterior_root(&poles, rho, diag.len(), tol);
    }
    solve_bracket(&poles, 1.0 / rho, poles.values[0], poles.values[1], tol)
}

/// Ascending eigenvalues of a dense symmetric matrix (the independent oracle).
pub fn dense_spectrum(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let dim = m.nrows();
    if dim > MAX_DENSE_DIM {
        return Err(Error::DimensionOverflow {
            dim,
            max: MAX_DENSE_DIM,
        });
    }
    if m.ncols() != dim {
        return Err(Error::LengthMismatch {
            expected: dim,
            found: m.ncols(),
        });
    }
    if dim == 0 {
        return Ok(Vec::new());
    }
    let mut eig: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

pub fn dense_min_eigenvalue(m: &DMatrix<f64>) -> Result<f64> {
    dense_spectrum(m)?
        .first()
        .copied()
        .ok_or_else(|| Error::InvalidParameter("empty matrix".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::zeta;
    use crate::moment::{corner_form_level_n_minus_1, moment_matrix};
    use crate::scalar::{int, rat, Rational};
    use proptest::prelude::*;

    fn corner(vals: &[Rational]) -> LatticeVector<Rational> {
        let n = vals.len().trailing_zeros() as usize;
        LatticeVector::new(n, n, Repr::Corner, vals.to_vec()).unwrap()
    }

    #[test]
    fn psd_corner_single_negative_pass() {
        let y = corner(&[int(-1), int(4), int(4), int(4)]);
        let res = psd_corner(&y).unwrap();
        assert!(res.psd);
        assert_eq!(
            res.case,
            CornerCase::SingleNegative {
                negative: SubsetIndex::EMPTY,
                reciprocal_sum: rat(-1, 4)
            }
        );
        let m = DMatrix::from_row_slice(3, 3, &[3.0, -4.0, -4.0, -4.0, 8.0, 4.0, -4.0, 4.0, 8.0]);
        let form = corner_form_level_n_minus_1(&zeta(&y).unwrap()).unwrap();
        assert_eq!(form.assemble(), m);
        assert!(dense_min_eigenvalue(&m).unwrap() >= -1e-12);
    }

    #[test]
    fn psd_corner_single_negative_fail() {
        let y = corner(&[int(-1), int(2), int(2), int(2)]);
        let res = psd_corner(&y).unwrap();
        assert!(!res.psd);
        assert!(matches!(res.case, CornerCase::SingleNegative { reciprocal_sum, .. } if reciprocal_sum == rat(1, 2)));
        let w = zeta(&y).unwrap();
        let lam = dense_min_eigenvalue(&moment_matrix(&w, 1).unwrap().to_dense_f64()).unwrap();
        assert!(lam < -1e-6);
    }

    #[test]
    fn psd_corner_other_cases() {
        let res = psd_corner(&corner(&[int(0), int(1), int(3), int(0)])).unwrap();
        assert_eq!(res, PsdCorner { psd: true, case: CornerCase::AllNonnegative });

        let res = psd_corner(&corner(&[int(1), int(-1), int(3), int(-2)])).unwrap();
        assert!(!res.psd);
        assert!(matches!(res.case, CornerCase::SeveralNegative { .. }));

        // negative next to a zero: confirm with the dense oracle
        let y = corner(&[int(-1), int(0), int(5), int(5)]);
        let res = psd_corner(&y).unwrap();
        assert!(!res.psd);
        assert!(matches!(res.case, CornerCase::NegativeWithZero { .. }));
        let w = zeta(&y).unwrap();
        let lam = dense_min_eigenvalue(&moment_matrix(&w, 1).unwrap().to_dense_f64()).unwrap();
        assert!(lam < -1e-9);
    }

    #[test]
    fn two_by_two_closed_form() {
        let form = CornerForm::with_unit_signs(vec![1.0, 3.0], 1.0);
        let spec = eigenvalues_dpr1(&form, DEFAULT_ROOT_TOL).unwrap();
        let s2 = 2f64.sqrt();
        assert!((spec.eigenvalues[0] - (3.0 - s2)).abs() < 1e-12);
        assert!((spec.eigenvalues[1] - (3.0 + s2)).abs() < 1e-12);
        assert_eq!(spec.secular_root_count(), 2);
        assert!(spec.residuals.iter().all(|r| *r < 1e-12));
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 4.0]);
        assert!((dense_min_eigenvalue(&m).unwrap() - (3.0 - s2)).abs() < 1e-12);
    }

    #[test]
    fn zero_rho_returns_diagonal() {
        let form = CornerForm::with_unit_signs(vec![5.0, -2.0, 1.0], 0.0);
        let spec = eigenvalues_dpr1(&form, DEFAULT_ROOT_TOL).unwrap();
        assert_eq!(spec.eigenvalues, vec![-2.0, 1.0, 5.0]);
        assert_eq!(min_eigenvalue_dpr1(&form, DEFAULT_ROOT_TOL).unwrap(), -2.0);
    }

    #[test]
    fn identity_has_unit_spectrum() {
        assert_eq!(dense_min_eigenvalue(&DMatrix::identity(7, 7)).unwrap(), 1.0);
    }

    #[test]
    fn point_moment_matrix_is_singular_psd() {
        let n = 3;
        let x = SubsetIndex::from_indices([2]).unwrap();
        let y = LatticeVector::from_fn(n, n, Repr::Moment, |s| {
            if s.is_subset_of(x) {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let lam = dense_min_eigenvalue(&moment_matrix(&y, n).unwrap().to_dense_f64()).unwrap();
        assert!(lam.abs() < 1e-12);
    }

    #[test]
    fn dense_dimension_limit() {
        let m = DMatrix::<f64>::zeros(MAX_DENSE_DIM + 1, MAX_DENSE_DIM + 1);
        assert!(matches!(dense_spectrum(&m), Err(Error::DimensionOverflow { .. })));
    }

    #[test]
    fn min_eigenvalue_examples() {
        let y = corner(&[int(-1), int(4), int(4), int(4)]);
        let form = corner_form_level_n_minus_1(&zeta(&y).unwrap()).unwrap();
        assert!(min_eigenvalue_dpr1(&form, DEFAULT_ROOT_TOL).unwrap() >= -1e-12);

        let form = CornerForm::new(vec![-1.0, -3.0, 2.0], 0.5, vec![1, -1, 1]).unwrap();
        assert!(min_eigenvalue_dpr1(&form, DEFAULT_ROOT_TOL).unwrap() < 0.0);

        let form = CornerForm::with_unit_signs(vec![0.5, 2.0, 3.0], 1.5);
        assert!(min_eigenvalue_dpr1(&form, DEFAULT_ROOT_TOL).unwrap() >= 0.5);
    }

    fn check_against_dense(diag: Vec<f64>, rho: f64, signs: Vec<i8>) {
        let form = CornerForm::new(diag, rho, signs).unwrap();
        let spec = eigenvalues_dpr1(&form, DEFAULT_ROOT_TOL).unwrap();
        let dense = dense_spectrum(&form.assemble()).unwrap();
        let scale = dense.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        assert_eq!(spec.eigenvalues.len(), dense.len());
        for (a, b) in spec.eigenvalues.iter().zip(&dense) {
            assert!((a - b).abs() <= 1e-9 * scale, "{a} vs {b}");
        }
        let min = min_eigenvalue_dpr1(&form, DEFAULT_ROOT_TOL).unwrap();
        assert!((min - dense[0]).abs() <= 1e-9 * scale);
        // interlacing: one root per gap plus one exterior root
        let poles = Poles::new(&form.diag);
        assert_eq!(spec.secular_roots.len(), poles.values.len());
        let offset = usize::from(rho < 0.0);
        for (j, gap) in poles.values.windows(2).enumerate() {
            let r = spec.secular_roots[j + offset];
            assert!(r > gap[0] && r < gap[1]);
        }
    }

    #[test]
    fn repeated_diagonal_values() {
        check_against_dense(vec![2.0, 2.0, 5.0], 0.7, vec![1, -1, 1]);
        check_against_dense(vec![2.0, 2.0, 5.0], -0.7, vec![1, 1, 1]);
        check_against_dense(vec![1.0, 1.0, 1.0, 1.0], 3.0, vec![1, -1, 1, -1]);
        let spec =
            eigenvalues_dpr1(&CornerForm::with_unit_signs(vec![4.0, 4.0, 4.0, 1.0], 2.0), 1e-12)
                .unwrap();
        assert_eq!(spec.repeated, vec![(4.0, 2)]);
    }

    proptest! {
        #[test]
        fn secular_matches_dense(
            diag in prop::collection::vec(-10.0f64..10.0, 1..40),
            rho in prop_oneof![-5.0f64..-0.01, 0.01f64..5.0],
            flips in any::<u64>(),
        ) {
            let signs = (0..diag.len()).map(|i| if flips >> (i % 64) & 1 == 1 { -1 } else { 1 }).collect();
            check_against_dense(diag, rho, signs);
        }

        #[test]
        fn secular_with_repeats_matches_dense(
            a in -5.0f64..5.0,
            b in -5.0f64..5.0,
            ka in 1usize..5,
            kb in 1usize..5,
            rho in prop_oneof![-3.0f64..-0.05, 0.05f64..3.0],
        ) {
            let mut diag = vec![a; ka];
            diag.extend(std::iter::repeat_n(b, kb));
            let len = diag.len();
            check_against_dense(diag, rho, vec![1; len]);
        }
    }
}
