//! The two-boson model: closure of the interior under G and the L's, and
//! full-rank support of the evolved vacuum. The damping model is the contrast.

use gaussian_qms::diagnostics::{invariant_subspace_report, positivity_improving_probe};
use gaussian_qms::fock::build_space;
use gaussian_qms::generator::{build_lindbladian, build_operators, Picture};
use gaussian_qms::linalg::{re, CMatrix};
use gaussian_qms::model::{two_boson_model, GaussianModel, TwoBosonParams};

fn main() -> gaussian_qms::Result<()> {
    let omega = CMatrix::from_row_slice(2, 2, &[re(0.3), re(0.1), re(0.1), re(0.2)]);
    let model = two_boson_model(&TwoBosonParams::isotropic(1.0, omega))?;
    let contrast = GaussianModel::dissipative(
        CMatrix::from_row_slice(1, 2, &[re(1.0), re(0.0)]),
        CMatrix::zeros(1, 2),
    )?;

    for (name, model) in [("two-boson", &model), ("damping", &contrast)] {
        let ops = build_operators(model, &build_space(2, 6)?)?;
        let vacuum = ops.space.vacuum();
        let e10 = ops.space.number_vector(&[1, 0])?;
        let closure = invariant_subspace_report(&ops, &[vacuum.clone(), e10.clone()])?;
        println!("{name}: eps0 = {:.3}, closure dims {:?} of {}", model.kossakowski().eps0, closure.closure_dims, closure.interior_dim);
        let lstar = build_lindbladian(&ops, Picture::Schrodinger);
        for r in positivity_improving_probe(&lstar, &[vacuum, e10], &[0.05, 0.1], &ops.space)? {
            println!(
                "  start {} t = {:.2}: rank {:>2}/{}  min eig {:.3e}  full = {}",
                r.psi_index, r.t, r.rank, r.interior_dim, r.min_interior_eig, r.full
            );
        }
    }
    Ok(())
}
