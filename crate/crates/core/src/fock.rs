//! Truncated bosonic Fock space of `d` modes.
//!
//! The space keeps every number vector `e(n₁,…,n_d)` with total excitation
//! `|n| ≤ N_max`. Basis order is graded lexicographic: first by `|n|`, then
//! lexicographically inside each grade, so grades occupy contiguous index
//! ranges.
//!
//! Operators that are at most quadratic in the ladder operators act exactly
//! on the *interior* subspace `|n| ≤ N_max − margin` (margin 2 by default):
//! their images never reach past the cutoff.

use std::collections::HashMap;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{c, CVector, ZERO};
use crate::sparse::SparseMatrix;

pub const DEFAULT_INTERIOR_MARGIN: usize = 2;
pub const DEFAULT_DIMENSION_CAP: usize = 5000;

/// Occupation numbers `(n₁,…,n_d)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(occupations: Vec<usize>) -> Self {
        Self(occupations)
    }

    pub fn vacuum(d: usize) -> Self {
        Self(vec![0; d])
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    /// Total excitation `|n|`.
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn occupations(&self) -> &[usize] {
        &self.0
    }

    fn shifted(&self, mode: usize, up: bool) -> Option<Self> {
        let mut n = self.0.clone();
        if up {
            n[mode] += 1;
        } else {
            n[mode] = n[mode].checked_sub(1)?;
        }
        Some(Self(n))
    }
}

impl From<&[usize]> for MultiIndex {
    fn from(n: &[usize]) -> Self {
        Self(n.to_vec())
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (k, n) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockConfig {
    pub interior_margin: usize,
    pub dimension_cap: usize,
}

impl Default for FockConfig {
    fn default() -> Self {
        Self { interior_margin: DEFAULT_INTERIOR_MARGIN, dimension_cap: DEFAULT_DIMENSION_CAP }
    }
}

#[derive(Debug, Clone)]
pub struct TruncatedFockSpace {
    modes: usize,
    n_max: usize,
    interior_margin: usize,
    basis: Vec<MultiIndex>,
    index_of: HashMap<MultiIndex, usize>,
    /// `grade_start[g]..grade_start[g+1]` is the index range of grade `g`.
    grade_start: Vec<usize>,
}

/// `binomial(n, k)` in u128 with overflow saturation.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Compositions of `total` into `d` parts, lexicographically ascending.
fn compositions(d: usize, total: usize, prefix: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
    if prefix.len() + 1 == d {
        prefix.push(total);
        out.push(MultiIndex(prefix.clone()));
        prefix.pop();
        return;
    }
    for first in 0..=total {
        prefix.push(first);
        compositions(d, total - first, prefix, out);
        prefix.pop();
    }
}

/// Builds the space with the default interior margin and dimension cap.
pub fn build_space(d: usize, n_max: usize) -> Result<TruncatedFockSpace> {
    TruncatedFockSpace::new(d, n_max)
}

impl TruncatedFockSpace {
    pub fn new(d: usize, n_max: usize) -> Result<Self> {
        Self::with_config(d, n_max, FockConfig::default())
    }

    pub fn with_margin(d: usize, n_max: usize, interior_margin: usize) -> Result<Self> {
        Self::with_config(d, n_max, FockConfig { interior_margin, ..FockConfig::default() })
    }

    pub fn with_config(d: usize, n_max: usize, config: FockConfig) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument("mode count must be at least 1".into()));
        }
        if n_max == 0 {
            return Err(Error::InvalidArgument("excitation cutoff must be at least 1".into()));
        }
        let dim = binomial(n_max + d, d);
        if dim > config.dimension_cap as u128 {
            return Err(Error::DimensionCap {
                dim: usize::try_from(dim).unwrap_or(usize::MAX),
                cap: config.dimension_cap,
            });
        }
        let mut basis = Vec::with_capacity(dim as usize);
        let mut grade_start = Vec::with_capacity(n_max + 2);
        for grade in 0..=n_max {
            grade_start.push(basis.len());
            compositions(d, grade, &mut Vec::with_capacity(d), &mut basis);
        }
        grade_start.push(basis.len());
        let index_of = basis.iter().enumerate().map(|(k, n)| (n.clone(), k)).collect();
        Ok(Self { modes: d, n_max, interior_margin: config.interior_margin, basis, index_of, grade_start })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn interior_margin(&self) -> usize {
        self.interior_margin
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[MultiIndex] {
        &self.basis
    }

    pub fn index_of(&self, n: &MultiIndex) -> Option<usize> {
        self.index_of.get(n).copied()
    }

    /// Convenience lookup from a plain occupation slice.
    pub fn index(&self, n: &[usize]) -> Option<usize> {
        self.index_of.get(&MultiIndex::from(n)).copied()
    }

    pub fn grade_of(&self, index: usize) -> usize {
        self.basis[index].total()
    }

    pub fn grade_range(&self, grade: usize) -> std::ops::Range<usize> {
        if grade > self.n_max {
            return self.dim()..self.dim();
        }
        self.grade_start[grade]..self.grade_start[grade + 1]
    }

    /// Highest grade kept in the interior subspace; `None` when the margin exceeds the cutoff.
    pub fn interior_grade(&self) -> Option<usize> {
        self.n_max.checked_sub(self.interior_margin)
    }

    /// Number of grades `0..=interior_grade`.
    pub fn interior_grade_count(&self) -> usize {
        self.interior_grade().map_or(0, |g| g + 1)
    }

    /// Fails with [`Error::EmptyInterior`] when the interior subspace is empty.
    pub fn require_interior(&self) -> Result<()> {
        match self.interior_grade() {
            Some(_) => Ok(()),
            None => Err(Error::EmptyInterior { margin: self.interior_margin, n_max: self.n_max }),
        }
    }

    /// Basis indices of the interior subspace; a prefix `0..D_int` by grading.
    pub fn interior_indices(&self) -> Vec<usize> {
        (0..self.interior_dim()).collect()
    }

    pub fn interior_dim(&self) -> usize {
        self.interior_grade().map_or(0, |g| self.grade_start[g + 1])
    }

    pub fn is_interior(&self, index: usize) -> bool {
        index < self.interior_dim()
    }

    /// Squared norm of the part of `v` outside the interior subspace.
    pub fn exterior_weight(&self, v: &CVector) -> f64 {
        v.iter().skip(self.interior_dim()).map(|z| z.norm_sqr()).sum()
    }

    /// Fails unless `v` is supported in the interior (relative tolerance 1e-24 on squared norms).
    pub fn ensure_interior(&self, v: &CVector) -> Result<()> {
        let outside = self.exterior_weight(v);
        if outside > 1e-24 * v.norm_squared().max(f64::MIN_POSITIVE) {
            return Err(Error::BoundaryContamination { weight: outside.sqrt() });
        }
        Ok(())
    }

    pub fn basis_vector(&self, index: usize) -> CVector {
        let mut v = CVector::zeros(self.dim());
        v[index] = Complex64::new(1.0, 0.0);
        v
    }

    /// `e(n)` for the given occupations.
    pub fn number_vector(&self, n: &[usize]) -> Result<CVector> {
        let index = self
            .index(n)
            .ok_or_else(|| Error::InvalidArgument(format!("{} is outside the truncated space", MultiIndex::from(n))))?;
        Ok(self.basis_vector(index))
    }

    pub fn vacuum(&self) -> CVector {
        self.basis_vector(0)
    }

    /// Random unit vector supported on the interior subspace.
    pub fn random_interior_vector<R: Rng + ?Sized>(&self, rng: &mut R) -> CVector {
        let mut v = CVector::zeros(self.dim());
        loop {
            for k in 0..self.interior_dim() {
                v[k] = c(rng.sample(StandardNormal), rng.sample(StandardNormal));
            }
            let n = v.norm();
            if n > 0.0 {
                return v.unscale(n);
            }
        }
    }
}

/// Sparse annihilation, creation and number operators of a truncated space.
#[derive(Debug, Clone)]
pub struct LadderOperators {
    pub a: Vec<SparseMatrix>,
    pub adag: Vec<SparseMatrix>,
    pub number: SparseMatrix,
}

impl LadderOperators {
    pub fn modes(&self) -> usize {
        self.a.len()
    }
}

pub fn build_ladders(space: &TruncatedFockSpace) -> LadderOperators {
    let dim = space.dim();
    let mut a = Vec::with_capacity(space.modes());
    for mode in 0..space.modes() {
        let triplets = space.basis().iter().enumerate().filter_map(|(col, n)| {
            let lowered = n.shifted(mode, false)?;
            let row = space.index_of(&lowered).expect("lowered index stays inside the space");
            Some((row, col, Complex64::new((n.occupations()[mode] as f64).sqrt(), 0.0)))
        });
        a.push(SparseMatrix::from_triplets(dim, dim, triplets));
    }
    // a† is the adjoint of the truncated a; rows above the cutoff are absent.
    let adag: Vec<SparseMatrix> = a.iter().map(SparseMatrix::adjoint).collect();
    let diag: Vec<Complex64> = space.basis().iter().map(|n| Complex64::new(n.total() as f64, 0.0)).collect();
    LadderOperators { a, adag, number: SparseMatrix::from_diagonal(&diag) }
}

/// Truncation of the coherent vector: entry `n` is `Π_j g_j^{n_j}/√(n_j!)`.
pub fn coherent_vector(space: &TruncatedFockSpace, g: &[Complex64]) -> Result<CVector> {
    if g.len() != space.modes() {
        return Err(Error::ShapeMismatch(format!(
            "coherent amplitude has {} entries for {} modes",
            g.len(),
            space.modes()
        )));
    }
    Ok(CVector::from_iterator(
        space.dim(),
        space.basis().iter().map(|n| {
            n.occupations().iter().zip(g).fold(Complex64::new(1.0, 0.0), |acc, (&k, &gj)| {
                let fact: f64 = (1..=k).map(|i| i as f64).product();
                acc * gj.powu(k as u32) / fact.sqrt()
            })
        }),
    ))
}

/// Orthogonal projection onto the interior subspace.
pub fn interior_projector(space: &TruncatedFockSpace) -> Result<SparseMatrix> {
    space.require_interior()?;
    let dim = space.dim();
    let keep = space.interior_dim();
    Ok(SparseMatrix::from_triplets(dim, dim, (0..keep).map(|k| (k, k, Complex64::new(1.0, 0.0)))))
}

/// Keeps only the interior components of `v`.
pub fn project_interior(space: &TruncatedFockSpace, v: &CVector) -> CVector {
    let keep = space.interior_dim();
    CVector::from_fn(v.len(), |k, _| if k < keep { v[k] } else { ZERO })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, re};

    fn occ(space: &TruncatedFockSpace) -> Vec<Vec<usize>> {
        space.basis().iter().map(|n| n.occupations().to_vec()).collect()
    }

    #[test]
    fn single_mode_basis() {
        let s = build_space(1, 3).unwrap();
        assert_eq!(s.dim(), 4);
        assert_eq!(occ(&s), vec![vec![0], vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn two_mode_graded_lex_order() {
        let s = build_space(2, 2).unwrap();
        assert_eq!(
            occ(&s),
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![0, 2], vec![1, 1], vec![2, 0]]
        );
        for (k, n) in s.basis().iter().enumerate() {
            assert_eq!(s.index_of(n), Some(k));
        }
    }

    #[test]
    fn three_modes_dimension() {
        assert_eq!(build_space(3, 4).unwrap().dim(), 35);
    }

    #[test]
    fn dimension_cap_guard() {
        assert!(matches!(build_space(6, 12), Err(Error::DimensionCap { dim: 18564, cap: 5000 })));
        let big = TruncatedFockSpace::with_config(
            6,
            12,
            FockConfig { dimension_cap: 20000, ..FockConfig::default() },
        );
        assert_eq!(big.unwrap().dim(), 18564);
    }

    #[test]
    fn rejects_degenerate_arguments() {
        assert!(build_space(0, 3).is_err());
        assert!(build_space(2, 0).is_err());
        let s = TruncatedFockSpace::with_margin(1, 3, 4).unwrap();
        assert_eq!(s.interior_dim(), 0);
        assert!(matches!(interior_projector(&s), Err(Error::EmptyInterior { margin: 4, n_max: 3 })));
    }

    #[test]
    fn single_mode_ladder_action() {
        let s = build_space(1, 3).unwrap();
        let l = build_ladders(&s);
        assert_eq!(l.a[0].mul_vec(&s.basis_vector(1)), s.basis_vector(0));
        assert_eq!(l.a[0].mul_vec(&s.basis_vector(0)), CVector::zeros(4));
        let up = l.adag[0].mul_vec(&s.basis_vector(1));
        assert!((up[2] - re(2f64.sqrt())).norm() < 1e-15);
        assert_eq!(up.iter().filter(|z| z.norm() > 0.0).count(), 1);
        // hard truncation at the top grade
        assert_eq!(l.adag[0].mul_vec(&s.basis_vector(3)), CVector::zeros(4));
    }

    #[test]
    fn number_operator() {
        let s = build_space(2, 3).unwrap();
        let l = build_ladders(&s);
        let e11 = s.number_vector(&[1, 1]).unwrap();
        assert_eq!(l.number.mul_vec(&e11), e11.scale(2.0));
        let sum = &(&l.adag[0] * &l.a[0]) + &(&l.adag[1] * &l.a[1]);
        assert!(max_abs(&(sum.to_dense() - l.number.to_dense())) < 1e-14);
    }

    #[test]
    fn ccr_on_interior() {
        for (d, n_max) in [(1, 5), (2, 4), (3, 3)] {
            let s = build_space(d, n_max).unwrap();
            let l = build_ladders(&s);
            let idx = s.interior_indices();
            for j in 0..d {
                for k in 0..d {
                    let comm = &(&l.a[j] * &l.adag[k]) - &(&l.adag[k] * &l.a[j]);
                    let mut block = comm.compress(&idx, &idx);
                    if j == k {
                        for i in 0..idx.len() {
                            block[(i, i)] -= re(1.0);
                        }
                    }
                    assert!(max_abs(&block) <= 1e-12, "d={d} j={j} k={k}");
                }
            }
        }
    }

    #[test]
    fn ladders_connect_adjacent_grades_only() {
        let s = build_space(2, 4).unwrap();
        let l = build_ladders(&s);
        for j in 0..2 {
            for (r, col, _) in l.a[j].triplets() {
                assert_eq!(s.grade_of(r) + 1, s.grade_of(col));
            }
            for (r, col, _) in l.adag[j].triplets() {
                assert_eq!(s.grade_of(r), s.grade_of(col) + 1);
            }
            assert!(l.a[j].nnz() <= s.dim());
        }
    }

    #[test]
    fn coherent_vector_examples() {
        let s = build_space(2, 3).unwrap();
        let vac = coherent_vector(&s, &[ZERO, ZERO]).unwrap();
        assert_eq!(vac, s.vacuum());

        let s1 = build_space(1, 2).unwrap();
        let v = coherent_vector(&s1, &[re(1.0)]).unwrap();
        let expected = [1.0, 1.0, 1.0 / 2f64.sqrt()];
        for k in 0..3 {
            assert!((v[k] - re(expected[k])).norm() < 1e-15);
        }

        let w = coherent_vector(&s, &[re(1.0), re(2.0)]).unwrap();
        assert!((w[s.index(&[1, 1]).unwrap()] - re(2.0)).norm() < 1e-15);
        assert!(coherent_vector(&s, &[re(1.0)]).is_err());
    }

    #[test]
    fn coherent_vector_is_annihilation_eigenvector_below_cutoff() {
        let s = build_space(2, 6).unwrap();
        let l = build_ladders(&s);
        let g = [c(0.3, -0.2), c(-0.1, 0.4)];
        let v = coherent_vector(&s, &g).unwrap();
        for j in 0..2 {
            let av = l.a[j].mul_vec(&v);
            for k in 0..s.grade_range(5).start {
                assert!((av[k] - g[j] * v[k]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn interior_projector_examples() {
        let s = TruncatedFockSpace::with_margin(1, 3, 2).unwrap();
        let p = interior_projector(&s).unwrap().to_dense();
        let diag: Vec<f64> = (0..4).map(|k| p[(k, k)].re).collect();
        assert_eq!(diag, vec![1.0, 1.0, 0.0, 0.0]);

        let s0 = TruncatedFockSpace::with_margin(2, 3, 0).unwrap();
        assert_eq!(interior_projector(&s0).unwrap().to_dense(), crate::linalg::CMatrix::identity(10, 10));

        let s2 = TruncatedFockSpace::with_margin(2, 2, 2).unwrap();
        let p2 = interior_projector(&s2).unwrap();
        assert_eq!(p2.nnz(), 1);
        assert_eq!(p2.get(0, 0), re(1.0));
    }

    #[test]
    fn projector_idempotent_hermitian() {
        let s = build_space(3, 4).unwrap();
        let p = interior_projector(&s).unwrap();
        assert!(max_abs(&((&p * &p).to_dense() - p.to_dense())) < 1e-15);
        assert!(max_abs(&(p.adjoint().to_dense() - p.to_dense())) < 1e-15);
    }

    #[test]
    fn binomial_counts_match_enumeration() {
        for d in 1..=4 {
            for n_max in 1..=6 {
                let s = build_space(d, n_max).unwrap();
                assert_eq!(s.dim() as u128, binomial(n_max + d, d));
            }
        }
    }
}
