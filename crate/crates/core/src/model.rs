//! Gaussian model data and its Kossakowski matrix.
//!
//! A model is the tuple `(Ω, κ, ζ, V, U)` with
//!
//! ```text
//! H   = Σ Ω_jk a_j† a_k + (κ_jk/2) a_j† a_k† + (κ̄_jk/2) a_j a_k + Σ (ζ_j/2) a_j† + (ζ̄_j/2) a_j
//! L_ℓ = Σ_k v̄_ℓk a_k + u_ℓk a_k†
//! ```
//!
//! and the Kossakowski matrix is the `2d×2d` block matrix
//! `[[VᵀV̄, VᵀU], [U*V̄, U*U]] = B·B†` with `B = [Vᵀ; U*]`.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    expm, hermitian_eigen, hermitian_eigenvalues, hermiticity_error, max_abs, numerical_rank,
    random_complex_matrix, random_hermitian, random_symmetric, random_unitary, re, symmetry_error,
    unitarity_error, CMatrix, CVector, I,
};

/// Tolerance for Hermiticity / symmetry of input data.
pub const INPUT_TOL: f64 = 1e-12;
/// Relative eigenvalue threshold used for rank and strict positivity.
pub const RANK_REL_TOL: f64 = 1e-10;
/// Tolerance for unitarity of Kraus mixing and for the Bogoliubov constraints.
pub const GROUP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianModel {
    omega: CMatrix,
    kappa: CMatrix,
    zeta: CVector,
    v: CMatrix,
    u: CMatrix,
}

impl GaussianModel {
    pub fn new(omega: CMatrix, kappa: CMatrix, zeta: CVector, v: CMatrix, u: CMatrix) -> Result<Self> {
        let d = omega.nrows();
        if d == 0 {
            return Err(Error::InvalidArgument("mode count must be at least 1".into()));
        }
        if omega.shape() != (d, d) || kappa.shape() != (d, d) || zeta.len() != d {
            return Err(Error::ShapeMismatch(format!(
                "omega {:?}, kappa {:?}, zeta {} for d = {d}",
                omega.shape(),
                kappa.shape(),
                zeta.len()
            )));
        }
        check_kraus_shapes(&v, &u)?;
        if v.ncols() != d {
            return Err(Error::ShapeMismatch(format!("V has {} columns, expected {d}", v.ncols())));
        }
        let herm = hermiticity_error(&omega);
        if herm > INPUT_TOL {
            return Err(Error::NotHermitian { what: "omega", deviation: herm });
        }
        let sym = symmetry_error(&kappa);
        if sym > INPUT_TOL {
            return Err(Error::NotSymmetric { what: "kappa", deviation: sym });
        }
        if max_abs(&v) == 0.0 && max_abs(&u) == 0.0 {
            return Err(Error::ZeroDissipation);
        }
        Ok(Self { omega, kappa, zeta, v, u })
    }

    /// Model with only a dissipative part (`Ω = κ = 0`, `ζ = 0`).
    pub fn dissipative(v: CMatrix, u: CMatrix) -> Result<Self> {
        let d = v.ncols();
        Self::new(CMatrix::zeros(d, d), CMatrix::zeros(d, d), CVector::zeros(d), v, u)
    }

    pub fn modes(&self) -> usize {
        self.omega.nrows()
    }

    /// Number of Kraus operators `m`.
    pub fn kraus_count(&self) -> usize {
        self.v.nrows()
    }

    pub fn omega(&self) -> &CMatrix {
        &self.omega
    }

    pub fn kappa(&self) -> &CMatrix {
        &self.kappa
    }

    pub fn zeta(&self) -> &CVector {
        &self.zeta
    }

    pub fn v(&self) -> &CMatrix {
        &self.v
    }

    pub fn u(&self) -> &CMatrix {
        &self.u
    }

    pub fn with_hamiltonian(mut self, omega: CMatrix, kappa: CMatrix, zeta: CVector) -> Result<Self> {
        self = Self::new(omega, kappa, zeta, self.v, self.u)?;
        Ok(self)
    }

    pub fn kossakowski(&self) -> KossakowskiMatrix {
        build_kossakowski(&self.v, &self.u).expect("model invariants guarantee valid Kraus data")
    }

    /// The matrix ℍ = `[[Ω, κ], [κ̄, Ωᵀ]]` of the quadratic part of `H`.
    pub fn hamiltonian_matrix(&self) -> CMatrix {
        let d = self.modes();
        let mut m = CMatrix::zeros(2 * d, 2 * d);
        m.view_mut((0, 0), (d, d)).copy_from(&self.omega);
        m.view_mut((0, d), (d, d)).copy_from(&self.kappa);
        m.view_mut((d, 0), (d, d)).copy_from(&self.kappa.conjugate());
        m.view_mut((d, d), (d, d)).copy_from(&self.omega.transpose());
        m
    }

    /// Coefficients of `L_ℓ` on `(a₁,…,a_d, a₁†,…,a_d†)`: row ℓ is `(v̄_ℓ•, u_ℓ•)`.
    pub fn kraus_coefficients(&self) -> CMatrix {
        let d = self.modes();
        let m = self.kraus_count();
        let mut c = CMatrix::zeros(m, 2 * d);
        c.view_mut((0, 0), (m, d)).copy_from(&self.v.conjugate());
        c.view_mut((0, d), (m, d)).copy_from(&self.u);
        c
    }
}

fn check_kraus_shapes(v: &CMatrix, u: &CMatrix) -> Result<()> {
    if v.shape() != u.shape() {
        return Err(Error::ShapeMismatch(format!("V is {:?} but U is {:?}", v.shape(), u.shape())));
    }
    if v.nrows() == 0 || v.ncols() == 0 {
        return Err(Error::ShapeMismatch("V and U must be non-empty m×d matrices".into()));
    }
    Ok(())
}

/// Kossakowski matrix with spectral metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct KossakowskiMatrix {
    pub matrix: CMatrix,
    /// Ascending eigenvalues.
    pub eigenvalues: Vec<f64>,
    /// Smallest eigenvalue, snapped to zero when below the rank threshold.
    pub eps0: f64,
    pub rank: usize,
    pub strictly_positive: bool,
}

impl KossakowskiMatrix {
    /// Spectral analysis of an arbitrary Hermitian PSD candidate.
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        let herm = hermiticity_error(&matrix);
        if herm > INPUT_TOL * (1.0 + max_abs(&matrix)) {
            return Err(Error::NotHermitian { what: "Kossakowski matrix", deviation: herm });
        }
        let eigenvalues = hermitian_eigenvalues(&matrix);
        let scale = eigenvalues.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        let threshold = RANK_REL_TOL * scale;
        let min = eigenvalues.first().copied().unwrap_or(0.0);
        if min < -threshold.max(RANK_REL_TOL) {
            return Err(Error::NotPositive { what: "Kossakowski matrix", min_eig: min });
        }
        let rank = eigenvalues.iter().filter(|&&x| x > threshold).count();
        let strictly_positive = min > threshold && scale > 0.0;
        let eps0 = if strictly_positive { min } else { 0.0 };
        Ok(Self { matrix, eigenvalues, eps0, rank, strictly_positive })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Spectral norm (largest eigenvalue).
    pub fn norm(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0).max(0.0)
    }
}

/// `B = [Vᵀ; U*]`, the `2d×m` factor with `K = B·B†`.
pub fn kossakowski_factor(v: &CMatrix, u: &CMatrix) -> Result<CMatrix> {
    check_kraus_shapes(v, u)?;
    let (m, d) = v.shape();
    let mut b = CMatrix::zeros(2 * d, m);
    b.view_mut((0, 0), (d, m)).copy_from(&v.transpose());
    b.view_mut((d, 0), (d, m)).copy_from(&u.adjoint());
    Ok(b)
}

/// Assembles `[[VᵀV̄, VᵀU], [U*V̄, U*U]]` block by block.
pub fn build_kossakowski(v: &CMatrix, u: &CMatrix) -> Result<KossakowskiMatrix> {
    check_kraus_shapes(v, u)?;
    if max_abs(v) == 0.0 && max_abs(u) == 0.0 {
        return Err(Error::ZeroDissipation);
    }
    let d = v.ncols();
    let vt = v.transpose();
    let us = u.adjoint();
    let mut k = CMatrix::zeros(2 * d, 2 * d);
    k.view_mut((0, 0), (d, d)).copy_from(&(&vt * v.conjugate()));
    k.view_mut((0, d), (d, d)).copy_from(&(&vt * u));
    k.view_mut((d, 0), (d, d)).copy_from(&(&us * v.conjugate()));
    k.view_mut((d, d), (d, d)).copy_from(&(&us * u));
    KossakowskiMatrix::from_matrix(k)
}

/// Whether `ker(V*) ∩ ker(Uᵀ) = {0}`, i.e. the stacked `2d×m` matrix `[V*; Uᵀ]` has rank `m`.
pub fn check_minimality(v: &CMatrix, u: &CMatrix) -> Result<bool> {
    check_kraus_shapes(v, u)?;
    let (m, d) = v.shape();
    let mut stacked = CMatrix::zeros(2 * d, m);
    stacked.view_mut((0, 0), (d, m)).copy_from(&v.adjoint());
    stacked.view_mut((d, 0), (d, m)).copy_from(&u.transpose());
    Ok(numerical_rank(&stacked, RANK_REL_TOL) == m)
}

/// Replaces `L_ℓ` by `L'_l = Σ_j r_lj L_j`, i.e. `V ↦ r̄V`, `U ↦ rU`.
pub fn mix_kraus(model: &GaussianModel, r: &CMatrix) -> Result<GaussianModel> {
    let m = model.kraus_count();
    if r.shape() != (m, m) {
        return Err(Error::ShapeMismatch(format!("mixing matrix {:?} for {m} Kraus operators", r.shape())));
    }
    let deviation = unitarity_error(r);
    if deviation > GROUP_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    let v = r.conjugate() * &model.v;
    let u = r * &model.u;
    GaussianModel::new(model.omega.clone(), model.kappa.clone(), model.zeta.clone(), v, u)
}

/// Matrices `(E, F)` of a Bogoliubov transformation
/// `a = Eᵀ b + Fᵀ b†`, `a† = F* b + E* b†`.
#[derive(Debug, Clone, PartialEq)]
pub struct BogoliubovPair {
    pub e: CMatrix,
    pub f: CMatrix,
}

impl BogoliubovPair {
    pub fn new(e: CMatrix, f: CMatrix) -> Result<Self> {
        let pair = Self { e, f };
        let deviation = pair.constraint_error()?;
        if deviation > GROUP_TOL {
            return Err(Error::BogoliubovConstraint { deviation });
        }
        Ok(pair)
    }

    pub fn identity(d: usize) -> Self {
        Self { e: CMatrix::identity(d, d), f: CMatrix::zeros(d, d) }
    }

    pub fn modes(&self) -> usize {
        self.e.nrows()
    }

    /// `max(‖E*E − F*F − 1‖_max, ‖EᵀF − FᵀE‖_max)`.
    pub fn constraint_error(&self) -> Result<f64> {
        let d = self.e.nrows();
        if self.e.shape() != (d, d) || self.f.shape() != (d, d) {
            return Err(Error::ShapeMismatch(format!(
                "E {:?} and F {:?} must be square of equal size",
                self.e.shape(),
                self.f.shape()
            )));
        }
        let first = self.e.adjoint() * &self.e - self.f.adjoint() * &self.f - CMatrix::identity(d, d);
        let second = self.e.transpose() * &self.f - self.f.transpose() * &self.e;
        Ok(max_abs(&first).max(max_abs(&second)))
    }

    /// `S = [[Eᵀ, Fᵀ], [F*, E*]]`, mapping `(b; b†)` to `(a; a†)`.
    pub fn mode_matrix(&self) -> CMatrix {
        let d = self.modes();
        let mut s = CMatrix::zeros(2 * d, 2 * d);
        s.view_mut((0, 0), (d, d)).copy_from(&self.e.transpose());
        s.view_mut((0, d), (d, d)).copy_from(&self.f.transpose());
        s.view_mut((d, 0), (d, d)).copy_from(&self.f.adjoint());
        s.view_mut((d, d), (d, d)).copy_from(&self.e.adjoint());
        s
    }

    /// `T = [[Ē, F], [F̄, E]]`; the Kossakowski matrix transforms as `T·K·T†`.
    pub fn congruence(&self) -> CMatrix {
        let d = self.modes();
        let mut t = CMatrix::zeros(2 * d, 2 * d);
        t.view_mut((0, 0), (d, d)).copy_from(&self.e.conjugate());
        t.view_mut((0, d), (d, d)).copy_from(&self.f);
        t.view_mut((d, 0), (d, d)).copy_from(&self.f.conjugate());
        t.view_mut((d, d), (d, d)).copy_from(&self.e);
        t
    }

    /// Exponentiates the quadratic-Hamiltonian generator `−iΣ₃[[Ω, κ], [κ̄, Ωᵀ]]`.
    ///
    /// `omega` must be Hermitian and `kappa` symmetric; the resulting pair
    /// has `F = 0` whenever `kappa = 0`.
    pub fn from_generator(omega: &CMatrix, kappa: &CMatrix) -> Result<Self> {
        let d = omega.nrows();
        if omega.shape() != (d, d) || kappa.shape() != (d, d) {
            return Err(Error::ShapeMismatch("generator blocks must be d×d".into()));
        }
        let mut x = CMatrix::zeros(2 * d, 2 * d);
        x.view_mut((0, 0), (d, d)).copy_from(&(omega * -I));
        x.view_mut((0, d), (d, d)).copy_from(&(kappa * -I));
        x.view_mut((d, 0), (d, d)).copy_from(&(kappa.conjugate() * I));
        x.view_mut((d, d), (d, d)).copy_from(&(omega.transpose() * I));
        let t = expm(&x);
        let e = t.view((0, 0), (d, d)).transpose();
        let f = t.view((0, d), (d, d)).transpose();
        Self::new(e, f)
    }
}

/// Seeded random Bogoliubov pair satisfying both constraints.
pub fn generate_bogoliubov(d: usize, seed: u64) -> Result<BogoliubovPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omega = random_hermitian(&mut rng, d).scale(0.5);
    let kappa = random_symmetric(&mut rng, d).scale(0.3);
    BogoliubovPair::from_generator(&omega, &kappa)
}

/// Rewrites the model in the transformed modes `b`.
///
/// Kraus rows become `V' = V E* + Ū Fᵀ`, `U' = V̄ Fᵀ + U E*`; the quadratic
/// Hamiltonian matrix becomes `S†ℍS` and `ζ' = Ēζ + Fζ̄`. Constant shifts from
/// reordering are dropped.
pub fn bogoliubov_transform(model: &GaussianModel, pair: &BogoliubovPair) -> Result<GaussianModel> {
    let d = model.modes();
    if pair.modes() != d {
        return Err(Error::ShapeMismatch(format!("pair acts on {} modes, model has {d}", pair.modes())));
    }
    let deviation = pair.constraint_error()?;
    if deviation > GROUP_TOL {
        return Err(Error::BogoliubovConstraint { deviation });
    }
    let (e, f) = (&pair.e, &pair.f);
    let v = &model.v * e.adjoint() + model.u.conjugate() * f.transpose();
    let u = model.v.conjugate() * f.transpose() + &model.u * e.adjoint();

    let s = pair.mode_matrix();
    let h = s.adjoint() * model.hamiltonian_matrix() * &s;
    let omega = crate::linalg::hermitian_part(&h.view((0, 0), (d, d)).into_owned());
    let kappa_raw = h.view((0, d), (d, d)).into_owned();
    let kappa = (&kappa_raw + kappa_raw.transpose()).scale(0.5);
    let zeta = e.conjugate() * &model.zeta + f * model.zeta.conjugate();
    GaussianModel::new(omega, kappa, zeta, v, u)
}

/// Parameters of the two-boson common-bath example.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoBosonParams {
    pub gamma_minus: CMatrix,
    pub gamma_plus: CMatrix,
    pub omega: CMatrix,
}

impl TwoBosonParams {
    pub fn isotropic(rate: f64, omega: CMatrix) -> Self {
        let id = CMatrix::identity(2, 2).scale(rate);
        Self { gamma_minus: id.clone(), gamma_plus: id, omega }
    }
}

/// Builds the `d = 2`, `m = 4` model whose Kossakowski matrix is
/// `diag(γ⁻, γ⁺)`.
///
/// `L₁, L₂` come from the spectral decomposition of `γ⁻` (annihilation part,
/// `V` row `√λ·φ`), `L₃, L₄` from `γ⁺` (creation part, `U` row `√λ·φ̄`).
/// Eigenpairs are taken in descending order; zero eigenvalues still produce a
/// (zero) row so the block layout is kept.
pub fn two_boson_model(params: &TwoBosonParams) -> Result<GaussianModel> {
    for (what, g) in [("gamma_minus", &params.gamma_minus), ("gamma_plus", &params.gamma_plus)] {
        if g.shape() != (2, 2) {
            return Err(Error::ShapeMismatch(format!("{what} must be 2×2")));
        }
        let herm = hermiticity_error(g);
        if herm > INPUT_TOL {
            return Err(Error::NotHermitian { what, deviation: herm });
        }
    }
    if params.omega.shape() != (2, 2) {
        return Err(Error::ShapeMismatch("omega must be 2×2".into()));
    }
    let mut v = CMatrix::zeros(4, 2);
    let mut u = CMatrix::zeros(4, 2);
    for (block, g, what) in [
        (0usize, &params.gamma_minus, "gamma_minus"),
        (2usize, &params.gamma_plus, "gamma_plus"),
    ] {
        let (vals, vecs) = hermitian_eigen(g);
        if vals[0] < -GROUP_TOL {
            return Err(Error::NotPositive { what, min_eig: vals[0] });
        }
        for (slot, k) in [1usize, 0].into_iter().enumerate() {
            let weight = vals[k].max(0.0).sqrt();
            let phi = vecs.column(k);
            for j in 0..2 {
                if block == 0 {
                    v[(slot, j)] = phi[j] * weight;
                } else {
                    u[(block + slot, j)] = phi[j].conj() * weight;
                }
            }
        }
    }
    GaussianModel::new(params.omega.clone(), CMatrix::zeros(2, 2), CVector::zeros(2), v, u)
}

/// Seeded random model with `m` Kraus operators on `d` modes.
///
/// `hamiltonian_scale` multiplies random Hermitian `Ω`, symmetric `κ` and `ζ`;
/// zero gives a purely dissipative model.
pub fn random_model(d: usize, m: usize, hamiltonian_scale: f64, seed: u64) -> Result<GaussianModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = random_complex_matrix(&mut rng, m, d).scale(0.5);
    let u = random_complex_matrix(&mut rng, m, d).scale(0.5);
    let omega = random_hermitian(&mut rng, d).scale(hamiltonian_scale);
    let kappa = random_symmetric(&mut rng, d).scale(hamiltonian_scale);
    let zeta = CVector::from_iterator(d, random_complex_matrix(&mut rng, d, 1).iter().copied())
        .scale(hamiltonian_scale);
    GaussianModel::new(omega, kappa, zeta, v, u)
}

/// Seeded random model with `m = 2d` and Kossakowski spectrum inside `[eps0_min, eps0_min + spread]`.
///
/// Built as `B = W·diag(√s)·Q` with Haar unitaries `W`, `Q`; the rows of
/// `V`, `U` are read back from `B = [Vᵀ; U*]`.
pub fn random_positive_model(
    d: usize,
    eps0_min: f64,
    spread: f64,
    hamiltonian_scale: f64,
    seed: u64,
) -> Result<GaussianModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 2 * d;
    let w = random_unitary(&mut rng, n);
    let q = random_unitary(&mut rng, n);
    let spectrum = DVector::from_fn(n, |_, _| re((eps0_min + spread * rng.random::<f64>()).sqrt()));
    let b = w * CMatrix::from_diagonal(&spectrum) * q;
    let v = b.view((0, 0), (d, n)).transpose();
    let u = b.view((d, 0), (d, n)).adjoint();
    let omega = random_hermitian(&mut rng, d).scale(hamiltonian_scale);
    let kappa = random_symmetric(&mut rng, d).scale(hamiltonian_scale);
    let zeta = CVector::from_iterator(d, random_complex_matrix(&mut rng, d, 1).iter().copied())
        .scale(hamiltonian_scale);
    GaussianModel::new(omega, kappa, zeta, v, u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, ONE, ZERO};

    fn col(entries: &[f64]) -> CMatrix {
        CMatrix::from_iterator(entries.len(), 1, entries.iter().map(|&x| re(x)))
    }

    #[test]
    fn kossakowski_identity_example() {
        let k = build_kossakowski(&col(&[1.0, 0.0]), &col(&[0.0, 1.0])).unwrap();
        assert_eq!(k.matrix, CMatrix::identity(2, 2));
        assert!((k.eps0 - 1.0).abs() < 1e-14);
        assert_eq!(k.rank, 2);
        assert!(k.strictly_positive);
    }

    #[test]
    fn kossakowski_annihilation_only() {
        let d = 3;
        let k = build_kossakowski(&CMatrix::identity(d, d), &CMatrix::zeros(d, d)).unwrap();
        let mut expected = CMatrix::zeros(6, 6);
        expected.view_mut((0, 0), (3, 3)).fill_with_identity();
        assert_eq!(k.matrix, expected);
        assert_eq!(k.eps0, 0.0);
        assert_eq!(k.rank, d);
        assert!(!k.strictly_positive);
    }

    #[test]
    fn kossakowski_rank_one() {
        let k = build_kossakowski(&col(&[1.0]), &col(&[1.0])).unwrap();
        assert_eq!(k.matrix, CMatrix::from_element(2, 2, ONE));
        assert!(k.eigenvalues[0].abs() < 1e-14);
        assert!((k.eigenvalues[1] - 2.0).abs() < 1e-14);
        assert_eq!(k.rank, 1);
        assert_eq!(k.eps0, 0.0);
    }

    #[test]
    fn kossakowski_errors() {
        assert!(matches!(
            build_kossakowski(&CMatrix::zeros(2, 1), &CMatrix::zeros(1, 1)),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(matches!(
            build_kossakowski(&CMatrix::zeros(2, 2), &CMatrix::zeros(2, 2)),
            Err(Error::ZeroDissipation)
        ));
    }

    #[test]
    fn minimality_examples() {
        assert!(check_minimality(&col(&[1.0]), &col(&[1.0])).unwrap());
        assert!(!check_minimality(&col(&[1.0, 1.0]), &col(&[0.0, 0.0])).unwrap());
        assert!(check_minimality(&CMatrix::identity(2, 2), &CMatrix::zeros(2, 2)).unwrap());
        assert!(check_minimality(&col(&[1.0]), &col(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn model_validation() {
        let d = 1;
        let bad_omega = CMatrix::from_element(1, 1, c(0.0, 1.0));
        assert!(matches!(
            GaussianModel::new(bad_omega, CMatrix::zeros(d, d), CVector::zeros(d), col(&[1.0]), col(&[0.0])),
            Err(Error::NotHermitian { .. })
        ));
        let bad_kappa = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        assert!(matches!(
            GaussianModel::new(CMatrix::zeros(2, 2), bad_kappa, CVector::zeros(2), CMatrix::identity(2, 2), CMatrix::zeros(2, 2)),
            Err(Error::NotSymmetric { .. })
        ));
        assert!(matches!(GaussianModel::dissipative(col(&[0.0]), col(&[0.0])), Err(Error::ZeroDissipation)));
    }

    #[test]
    fn mix_identity_and_swap() {
        let model = GaussianModel::dissipative(col(&[1.0, 0.0]), col(&[0.0, 1.0])).unwrap();
        let same = mix_kraus(&model, &CMatrix::identity(2, 2)).unwrap();
        assert_eq!(same, model);
        let swap = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let mixed = mix_kraus(&model, &swap).unwrap();
        assert_eq!(mixed.kossakowski().matrix, CMatrix::identity(2, 2));
        let not_unitary = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ONE]);
        assert!(matches!(mix_kraus(&model, &not_unitary), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn mix_haar_preserves_kossakowski() {
        let model = random_model(2, 3, 0.3, 11).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let r = random_unitary(&mut rng, 3);
        let mixed = mix_kraus(&model, &r).unwrap();
        assert!(max_abs(&(mixed.kossakowski().matrix - model.kossakowski().matrix)) <= 1e-10);
    }

    #[test]
    fn bogoliubov_identity_is_noop() {
        let model = random_model(2, 4, 0.5, 3).unwrap();
        let out = bogoliubov_transform(&model, &BogoliubovPair::identity(2)).unwrap();
        assert!(max_abs(&(out.kossakowski().matrix - model.kossakowski().matrix)) < 1e-14);
        assert!(max_abs(&(out.omega() - model.omega())) < 1e-14);
        assert!(max_abs(&(out.kappa() - model.kappa())) < 1e-14);
    }

    #[test]
    fn bogoliubov_single_mode_squeeze() {
        let r = 0.5f64;
        let pair = BogoliubovPair::new(col(&[r.cosh()]), col(&[r.sinh()])).unwrap();
        assert!(pair.constraint_error().unwrap() < 1e-14);
        let model = GaussianModel::dissipative(col(&[1.0, 0.3]), col(&[0.2, 1.0])).unwrap();
        let k = model.kossakowski();
        let out = bogoliubov_transform(&model, &pair).unwrap();
        let t = pair.congruence();
        let expected = &t * &k.matrix * t.adjoint();
        assert!(max_abs(&(out.kossakowski().matrix - expected)) < 1e-12);
        assert_eq!(out.kossakowski().strictly_positive, k.strictly_positive);
    }

    #[test]
    fn bogoliubov_rejects_bad_pair() {
        assert!(matches!(
            BogoliubovPair::new(col(&[2.0]), col(&[0.0])),
            Err(Error::BogoliubovConstraint { .. })
        ));
    }

    #[test]
    fn generated_pair_constraints() {
        for d in 1..=4 {
            for seed in 0..5 {
                let pair = generate_bogoliubov(d, seed).unwrap();
                assert!(pair.constraint_error().unwrap() <= 1e-10);
                assert_eq!(pair, generate_bogoliubov(d, seed).unwrap());
            }
        }
    }

    #[test]
    fn passive_generator_gives_zero_f() {
        let omega = CMatrix::from_element(1, 1, re(0.8));
        let pair = BogoliubovPair::from_generator(&omega, &CMatrix::zeros(1, 1)).unwrap();
        assert_eq!(max_abs(&pair.f), 0.0);
        assert!((pair.e[(0, 0)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bogoliubov_hamiltonian_keeps_structure() {
        let model = random_model(2, 4, 0.7, 5).unwrap();
        let pair = generate_bogoliubov(2, 6).unwrap();
        let out = bogoliubov_transform(&model, &pair).unwrap();
        let s = pair.mode_matrix();
        let full = s.adjoint() * model.hamiltonian_matrix() * &s;
        assert!(max_abs(&(full - out.hamiltonian_matrix())) < 1e-12);
    }

    #[test]
    fn two_boson_identity_rates() {
        let params = TwoBosonParams::isotropic(1.0, CMatrix::zeros(2, 2));
        let model = two_boson_model(&params).unwrap();
        assert_eq!(model.kraus_count(), 4);
        let k = model.kossakowski();
        assert!(max_abs(&(k.matrix.clone() - CMatrix::identity(4, 4))) < 1e-12);
        assert!(k.strictly_positive);
    }

    #[test]
    fn two_boson_singular_minus_block() {
        let params = TwoBosonParams {
            gamma_minus: CMatrix::from_diagonal(&CVector::from_vec(vec![ONE, ZERO])),
            gamma_plus: CMatrix::identity(2, 2),
            omega: CMatrix::zeros(2, 2),
        };
        let k = two_boson_model(&params).unwrap().kossakowski();
        assert_eq!(k.eps0, 0.0);
        assert!(!k.strictly_positive);
    }

    #[test]
    fn two_boson_spectral_reconstruction() {
        let params = TwoBosonParams {
            gamma_minus: CMatrix::from_diagonal(&CVector::from_vec(vec![re(2.0), re(1.0)])),
            gamma_plus: CMatrix::identity(2, 2),
            omega: CMatrix::zeros(2, 2),
        };
        let model = two_boson_model(&params).unwrap();
        let v = model.v().view((0, 0), (2, 2)).into_owned();
        let moduli: Vec<f64> = v.iter().map(|z| z.norm()).collect();
        // column-major: (0,0), (1,0), (0,1), (1,1)
        assert!((moduli[0] - 2f64.sqrt()).abs() < 1e-12);
        assert!(moduli[1] < 1e-12 && moduli[2] < 1e-12);
        assert!((moduli[3] - 1.0).abs() < 1e-12);
        let top = model.kossakowski().matrix.view((0, 0), (2, 2)).into_owned();
        assert!(max_abs(&(top - &params.gamma_minus)) < 1e-12);
    }

    #[test]
    fn two_boson_complex_blocks_round_trip() {
        let g = CMatrix::from_row_slice(2, 2, &[re(1.5), c(0.2, 0.4), c(0.2, -0.4), re(0.9)]);
        let gp = CMatrix::from_row_slice(2, 2, &[re(0.7), c(-0.1, 0.3), c(-0.1, -0.3), re(1.2)]);
        let omega = CMatrix::from_row_slice(2, 2, &[re(0.3), c(0.1, 0.1), c(0.1, -0.1), re(-0.2)]);
        let model = two_boson_model(&TwoBosonParams { gamma_minus: g.clone(), gamma_plus: gp.clone(), omega: omega.clone() }).unwrap();
        let k = model.kossakowski().matrix;
        assert!(max_abs(&(k.view((0, 0), (2, 2)).into_owned() - g)) < 1e-12);
        assert!(max_abs(&(k.view((2, 2), (2, 2)).into_owned() - gp)) < 1e-12);
        assert!(max_abs(&k.view((0, 2), (2, 2)).into_owned()) < 1e-12);
        let h = model.hamiltonian_matrix();
        assert!(max_abs(&(h.view((2, 2), (2, 2)).into_owned() - omega.transpose())) < 1e-15);
    }

    #[test]
    fn two_boson_rejects_negative_rates() {
        let params = TwoBosonParams {
            gamma_minus: CMatrix::from_diagonal(&CVector::from_vec(vec![re(-1.0), re(1.0)])),
            gamma_plus: CMatrix::identity(2, 2),
            omega: CMatrix::zeros(2, 2),
        };
        assert!(matches!(two_boson_model(&params), Err(Error::NotPositive { .. })));
    }

    #[test]
    fn random_positive_model_has_requested_floor() {
        for seed in 0..5 {
            let model = random_positive_model(2, 0.1, 1.0, 0.2, seed).unwrap();
            let k = model.kossakowski();
            assert_eq!(model.kraus_count(), 4);
            assert!(k.eps0 >= 0.1 - 1e-12 && k.strictly_positive);
        }
    }
}
