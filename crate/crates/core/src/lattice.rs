//! Subsets of `N = {1..n}` and scalar data indexed by them.
//!
//! Subsets are `n`-bit masks (bit `i−1` set iff `i ∈ I`). Every
//! lattice-indexed vector stores its values in *canonical order*: ascending
//! cardinality, ties broken by ascending mask value. Truncation to
//! `P_t(N)` is therefore a prefix.
//!
//! The two coordinate systems used throughout the crate are
//!
//! - moment coordinates `w_I`, and
//! - corner coordinates `w_I^N = Σ_{H ⊆ N∖I} (−1)^{|H|} w_{H∪I}`,
//!
//! related by [`zeta`] (`w_I = Σ_{J ⊇ I} w_J^N`) and its inverse [`mobius`].

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{Scalar, ScalarMode};

/// Largest supported ground set; full-lattice data has `2^n` entries.
pub const MAX_N: usize = 20;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SubsetIndex(u32);

impl SubsetIndex {
    pub const EMPTY: SubsetIndex = SubsetIndex(0);

    pub const fn from_bits(bits: u32) -> Self {
        SubsetIndex(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    /// The ground set `N = {1..n}`.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= 32);
        if n == 32 {
            SubsetIndex(u32::MAX)
        } else {
            SubsetIndex((1u32 << n) - 1)
        }
    }

    /// `{i}` for a 1-based element `i`.
    pub fn singleton(i: usize) -> Self {
        debug_assert!((1..=32).contains(&i));
        SubsetIndex(1 << (i - 1))
    }

    /// Builds a subset from 1-based element indices (order and repeats ignored).
    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Result<Self> {
        let mut bits = 0u32;
        for i in indices {
            if i == 0 || i > MAX_N {
                return Err(Error::InvalidParameter(format!(
                    "element {i} outside 1..={MAX_N}"
                )));
            }
            bits |= 1 << (i - 1);
        }
        Ok(SubsetIndex(bits))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        (1..=32).contains(&i) && self.0 & (1 << (i - 1)) != 0
    }

    pub fn is_subset_of(self, other: SubsetIndex) -> bool {
        self.0 & !other.0 == 0
    }

    /// True iff every element lies in `{1..n}`.
    pub fn fits(self, n: usize) -> bool {
        n >= 32 || self.0 >> n == 0
    }

    pub fn union(self, other: SubsetIndex) -> Self {
        SubsetIndex(self.0 | other.0)
    }

    pub fn intersection(self, other: SubsetIndex) -> Self {
        SubsetIndex(self.0 & other.0)
    }

    pub fn difference(self, other: SubsetIndex) -> Self {
        SubsetIndex(self.0 & !other.0)
    }

    pub fn symmetric_difference(self, other: SubsetIndex) -> Self {
        SubsetIndex(self.0 ^ other.0)
    }

    pub fn with(self, i: usize) -> Self {
        self.union(SubsetIndex::singleton(i))
    }

    pub fn without(self, i: usize) -> Self {
        self.difference(SubsetIndex::singleton(i))
    }

    /// Elements in increasing order, 1-based.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i + 1)
            }
        })
    }
}

impl Ord for SubsetIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.len(), self.0).cmp(&(other.len(), other.0))
    }
}

impl PartialOrd for SubsetIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SubsetIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (k, i) in self.indices().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for SubsetIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SubsetIndex{self}")
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1usize;
    for j in 0..k {
        acc = acc * (n - j) / (j + 1);
    }
    acc
}

pub(crate) fn check_dims(n: usize, t: usize) -> Result<()> {
    if n > MAX_N {
        return Err(Error::DimensionOutOfRange { n, max: MAX_N });
    }
    if t > n {
        return Err(Error::LevelOutOfRange { t, n });
    }
    Ok(())
}

/// `|P_t(N)| = Σ_{j ≤ t} C(n, j)`.
pub fn lattice_size(n: usize, t: usize) -> usize {
    (0..=t.min(n)).map(|j| binomial(n, j)).sum()
}

/// Position of `s` in the canonical order of `P(N)`.
///
/// Among subsets of equal cardinality, ascending mask value coincides with
/// colex order, so the rank is given by the combinatorial number system.
pub fn canonical_rank(n: usize, s: SubsetIndex) -> usize {
    let k = s.len();
    let below: usize = (0..k).map(|j| binomial(n, j)).sum();
    let within: usize = s
        .indices()
        .enumerate()
        .map(|(j, i)| binomial(i - 1, j + 1))
        .sum();
    below + within
}

/// All subsets of `{1..n}` with cardinality at most `t`, in canonical order.
pub fn enumerate_subsets(n: usize, t: usize) -> Result<Vec<SubsetIndex>> {
    check_dims(n, t)?;
    let mut out = Vec::with_capacity(lattice_size(n, t));
    for k in 0..=t {
        if k == 0 {
            out.push(SubsetIndex::EMPTY);
            continue;
        }
        // Gosper's hack: next larger mask with the same popcount.
        let mut x: u32 = (1 << k) - 1;
        let limit: u64 = 1 << n;
        while (x as u64) < limit {
            out.push(SubsetIndex(x));
            let c = x & x.wrapping_neg();
            let r = x + c;
            x = (((r ^ x) >> 2) / c) | r;
            if r == 0 {
                break;
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Repr {
    Moment,
    Corner,
}

impl Repr {
    fn name(self) -> &'static str {
        match self {
            Repr::Moment => "moment",
            Repr::Corner => "corner",
        }
    }
}

/// One scalar per subset of cardinality `≤ level`, in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeVector<T> {
    n: usize,
    level: usize,
    repr: Repr,
    values: Vec<T>,
}

impl<T: Scalar> LatticeVector<T> {
    pub fn new(n: usize, level: usize, repr: Repr, values: Vec<T>) -> Result<Self> {
        check_dims(n, level)?;
        let expected = lattice_size(n, level);
        if values.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: values.len(),
            });
        }
        Ok(LatticeVector {
            n,
            level,
            repr,
            values,
        })
    }

    pub fn from_fn(
        n: usize,
        level: usize,
        repr: Repr,
        mut f: impl FnMut(SubsetIndex) -> T,
    ) -> Result<Self> {
        let values = enumerate_subsets(n, level)?.into_iter().map(&mut f).collect();
        Self::new(n, level, repr, values)
    }

    pub fn zeros(n: usize, level: usize, repr: Repr) -> Result<Self> {
        Self::from_fn(n, level, repr, |_| T::zero())
    }

    /// Full-lattice vector from a mask-indexed buffer of length `2^n`.
    pub fn from_mask_order(n: usize, repr: Repr, buf: Vec<T>) -> Result<Self> {
        check_dims(n, n)?;
        if buf.len() != 1 << n {
            return Err(Error::LengthMismatch {
                expected: 1 << n,
                found: buf.len(),
            });
        }
        let values = enumerate_subsets(n, n)?
            .into_iter()
            .map(|s| buf[s.bits() as usize].clone())
            .collect();
        Self::new(n, n, repr, values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn repr(&self) -> Repr {
        self.repr
    }

    pub fn mode(&self) -> ScalarMode {
        T::MODE
    }

    pub fn is_full(&self) -> bool {
        self.level == self.n
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn subsets(&self) -> Vec<SubsetIndex> {
        enumerate_subsets(self.n, self.level).expect("dimensions validated at construction")
    }

    pub fn iter(&self) -> impl Iterator<Item = (SubsetIndex, &T)> {
        self.subsets().into_iter().zip(self.values.iter())
    }

    /// Value at `s`, or `None` when `s` lies outside `P_level(N)`.
    pub fn get(&self, s: SubsetIndex) -> Option<&T> {
        if !s.fits(self.n) || s.len() > self.level {
            return None;
        }
        self.values.get(canonical_rank(self.n, s))
    }

    /// Like [`get`](Self::get) but panics when `s` is out of range.
    pub fn at(&self, s: SubsetIndex) -> &T {
        self.get(s)
            .unwrap_or_else(|| panic!("{s} not covered by a level-{} vector", self.level))
    }

    pub fn sum(&self) -> T {
        self.values.iter().fold(T::zero(), |acc, v| acc + v.clone())
    }

    pub fn truncate(&self, level: usize) -> Result<Self> {
        if level > self.level {
            return Err(Error::Truncated {
                level: self.level,
                needed: level,
            });
        }
        let len = lattice_size(self.n, level);
        Self::new(self.n, level, self.repr, self.values[..len].to_vec())
    }

    pub fn map<U: Scalar>(&self, f: impl FnMut(&T) -> U) -> LatticeVector<U> {
        LatticeVector {
            n: self.n,
            level: self.level,
            repr: self.repr,
            values: self.values.iter().map(f).collect(),
        }
    }

    pub fn to_f64(&self) -> LatticeVector<f64> {
        self.map(|v| v.to_f64())
    }

    /// Mask-indexed copy (`out[s.bits()]`) of a full-lattice vector.
    pub fn to_mask_order(&self) -> Result<Vec<T>> {
        self.require_full()?;
        let mut buf = vec![T::zero(); 1 << self.n];
        for (s, v) in self.subsets().into_iter().zip(&self.values) {
            buf[s.bits() as usize] = v.clone();
        }
        Ok(buf)
    }

    pub(crate) fn require_full(&self) -> Result<()> {
        if self.is_full() {
            Ok(())
        } else {
            Err(Error::Truncated {
                level: self.level,
                needed: self.n,
            })
        }
    }

    pub(crate) fn require_repr(&self, repr: Repr) -> Result<()> {
        if self.repr == repr {
            Ok(())
        } else {
            Err(Error::WrongRepresentation {
                expected: repr.name(),
                found: self.repr.name(),
            })
        }
    }
}

fn butterfly<T: Scalar>(buf: &mut [T], mut step: impl FnMut(&mut T, &mut T)) {
    debug_assert!(buf.len().is_power_of_two());
    let mut half = 1;
    while half < buf.len() {
        for block in buf.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (without, with) in lo.iter_mut().zip(hi) {
                step(without, with);
            }
        }
        half *= 2;
    }
}

/// In place `buf[I] ← Σ_{J ⊇ I} buf[J]` on a mask-indexed buffer.
pub fn superset_sums<T: Scalar>(buf: &mut [T]) {
    butterfly(buf, |lo, hi| *lo = lo.clone() + hi.clone());
}

/// Inverse of [`superset_sums`].
pub fn superset_differences<T: Scalar>(buf: &mut [T]) {
    butterfly(buf, |lo, hi| *lo = lo.clone() - hi.clone());
}

/// In place `buf[I] ← Σ_{J ⊆ I} buf[J]`; turns multilinear coefficients
/// into the value table `I ↦ f(x_I)`.
pub fn subset_sums<T: Scalar>(buf: &mut [T]) {
    butterfly(buf, |lo, hi| *hi = hi.clone() + lo.clone());
}

/// Inverse of [`subset_sums`]; interpolates a value table.
pub fn subset_differences<T: Scalar>(buf: &mut [T]) {
    butterfly(buf, |lo, hi| *hi = hi.clone() - lo.clone());
}

/// Corner → moment: `out_I = Σ_{J ⊇ I} v_J`.
pub fn zeta<T: Scalar>(v: &LatticeVector<T>) -> Result<LatticeVector<T>> {
    v.require_repr(Repr::Corner)?;
    let mut buf = v.to_mask_order()?;
    superset_sums(&mut buf);
    LatticeVector::from_mask_order(v.n, Repr::Moment, buf)
}

/// Moment → corner: `out_I = Σ_{H ⊆ N∖I} (−1)^{|H|} w_{H∪I}`.
pub fn mobius<T: Scalar>(w: &LatticeVector<T>) -> Result<LatticeVector<T>> {
    w.require_repr(Repr::Moment)?;
    let mut buf = w.to_mask_order()?;
    superset_differences(&mut buf);
    LatticeVector::from_mask_order(w.n, Repr::Corner, buf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat, Rational};
    use proptest::prelude::*;

    fn set(ix: &[usize]) -> SubsetIndex {
        SubsetIndex::from_indices(ix.iter().copied()).unwrap()
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_subsets(2, 1).unwrap(), vec![set(&[]), set(&[1]), set(&[2])]);
        assert_eq!(
            enumerate_subsets(2, 2).unwrap(),
            vec![set(&[]), set(&[1]), set(&[2]), set(&[1, 2])]
        );
        assert_eq!(enumerate_subsets(3, 0).unwrap(), vec![set(&[])]);
        assert!(enumerate_subsets(2, 3).is_err());
        assert!(enumerate_subsets(21, 1).is_err());
    }

    #[test]
    fn enumeration_matches_sorted_masks() {
        for n in 0..=10 {
            for t in 0..=n {
                let got = enumerate_subsets(n, t).unwrap();
                let mut want: Vec<_> = (0u32..1 << n)
                    .map(SubsetIndex::from_bits)
                    .filter(|s| s.len() <= t)
                    .collect();
                want.sort();
                assert_eq!(got, want);
                assert_eq!(got.len(), lattice_size(n, t));
                for (r, s) in got.iter().enumerate() {
                    assert_eq!(canonical_rank(n, *s), r);
                }
            }
        }
    }

    #[test]
    fn display_is_sorted_index_list() {
        assert_eq!(set(&[3, 1]).to_string(), "[1,3]");
        assert_eq!(SubsetIndex::EMPTY.to_string(), "[]");
    }

    fn corner(n: usize, vals: &[Rational]) -> LatticeVector<Rational> {
        LatticeVector::new(n, n, Repr::Corner, vals.to_vec()).unwrap()
    }

    fn moment(n: usize, vals: &[Rational]) -> LatticeVector<Rational> {
        LatticeVector::new(n, n, Repr::Moment, vals.to_vec()).unwrap()
    }

    #[test]
    fn zeta_examples() {
        let q = rat(1, 4);
        let out = zeta(&corner(2, &[q.clone(), q.clone(), q.clone(), q])).unwrap();
        assert_eq!(out.values(), &[int(1), rat(1, 2), rat(1, 2), rat(1, 4)]);
        assert_eq!(out.repr(), Repr::Moment);

        let out = zeta(&corner(1, &[rat(2, 3), rat(5, 7)])).unwrap();
        assert_eq!(out.values(), &[rat(2, 3) + rat(5, 7), rat(5, 7)]);

        for n in 0..=6 {
            let top = SubsetIndex::full(n);
            let v = LatticeVector::from_fn(n, n, Repr::Corner, |s| {
                if s == top {
                    int(1)
                } else {
                    int(0)
                }
            })
            .unwrap();
            assert!(zeta(&v).unwrap().values().iter().all(|x| *x == int(1)));
        }
    }

    #[test]
    fn mobius_examples() {
        let w = moment(2, &[int(1), rat(1, 2), rat(1, 2), rat(1, 4)]);
        assert_eq!(mobius(&w).unwrap().values(), &vec![rat(1, 4); 4]);
        assert_eq!(mobius(&moment(1, &[int(1), int(1)])).unwrap().values(), &[int(0), int(1)]);
    }

    #[test]
    fn transforms_reject_bad_input() {
        let truncated = LatticeVector::<Rational>::zeros(3, 2, Repr::Corner).unwrap();
        assert!(matches!(zeta(&truncated), Err(Error::Truncated { .. })));
        let wrong = LatticeVector::<Rational>::zeros(2, 2, Repr::Moment).unwrap();
        assert!(matches!(zeta(&wrong), Err(Error::WrongRepresentation { .. })));
        assert!(matches!(
            LatticeVector::<f64>::new(2, 1, Repr::Moment, vec![0.0; 4]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn get_and_truncate() {
        let v = LatticeVector::from_fn(3, 3, Repr::Moment, |s| s.bits() as f64).unwrap();
        assert_eq!(*v.at(set(&[1, 3])), 5.0);
        let t = v.truncate(1).unwrap();
        assert_eq!(t.values(), &[0.0, 1.0, 2.0, 4.0]);
        assert_eq!(t.get(set(&[1, 2])), None);
        assert_eq!(t.get(set(&[4])), None);
    }

    #[test]
    fn subset_transforms_are_inverse() {
        let mut buf: Vec<f64> = (0..16).map(|i| (i * i) as f64 - 3.0).collect();
        let orig = buf.clone();
        subset_sums(&mut buf);
        // value at {1,2} = c_∅ + c_1 + c_2 + c_12
        assert_eq!(buf[3], orig[0] + orig[1] + orig[2] + orig[3]);
        subset_differences(&mut buf);
        assert_eq!(buf, orig);
    }

    proptest! {
        #[test]
        fn top_coordinate_is_preserved(vals in prop::collection::vec(-50i64..50, 8)) {
            let v = corner(3, &vals.iter().map(|&x| rat(x, 7)).collect::<Vec<_>>());
            let z = zeta(&v).unwrap();
            let top = SubsetIndex::full(3);
            prop_assert_eq!(z.at(top), v.at(top));
            let m = mobius(&moment(3, v.values())).unwrap();
            prop_assert_eq!(m.at(top), v.at(top));
        }

        #[test]
        fn transforms_are_linear(
            u in prop::collection::vec(-20i64..20, 16),
            v in prop::collection::vec(-20i64..20, 16),
            a in -5i64..5,
            b in 1i64..5,
        ) {
            let u: Vec<Rational> = u.iter().map(|&x| rat(x, 3)).collect();
            let v: Vec<Rational> = v.iter().map(|&x| rat(x, 5)).collect();
            let (alpha, beta) = (int(a), rat(1, b));
            let comb: Vec<Rational> = u.iter().zip(&v)
                .map(|(x, y)| alpha.clone() * x + beta.clone() * y).collect();
            let tu = zeta(&corner(4, &u)).unwrap();
            let tv = zeta(&corner(4, &v)).unwrap();
            let tc = zeta(&corner(4, &comb)).unwrap();
            for ((x, y), z) in tu.values().iter().zip(tv.values()).zip(tc.values()) {
                prop_assert_eq!(alpha.clone() * x + beta.clone() * y, z.clone());
            }
            let mu = mobius(&moment(4, &u)).unwrap();
            let mv = mobius(&moment(4, &v)).unwrap();
            let mc = mobius(&moment(4, &comb)).unwrap();
            for ((x, y), z) in mu.values().iter().zip(mv.values()).zip(mc.values()) {
                prop_assert_eq!(alpha.clone() * x + beta.clone() * y, z.clone());
            }
        }

        #[test]
        fn zeta_mobius_roundtrip(n in 0usize..=7, seed in any::<u64>()) {
            let mut state = seed;
            let vals: Vec<Rational> = (0..1usize << n).map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                rat(((state >> 33) % 201) as i64 - 100, ((state >> 20) % 12 + 1) as i64)
            }).collect();
            let v = corner(n, &vals);
            let back = mobius(&zeta(&v).unwrap()).unwrap();
            prop_assert_eq!(back.values(), v.values());
            let w = moment(n, &vals);
            let back = zeta(&mobius(&w).unwrap()).unwrap();
            prop_assert_eq!(back.values(), w.values());
        }
    }
}
