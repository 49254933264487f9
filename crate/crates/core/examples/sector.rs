//! Numerical-range sector estimates: G₀ alone, then G for growing Ω.

use gaussian_qms::diagnostics::{sector_estimate, sector_estimate_operator};
use gaussian_qms::fock::build_space;
use gaussian_qms::generator::build_operators;
use gaussian_qms::linalg::{re, CMatrix, CVector};
use gaussian_qms::model::{two_boson_model, TwoBosonParams};

fn main() -> gaussian_qms::Result<()> {
    let shifts = [0.0, 0.5, 1.0];
    let space = build_space(2, 6)?;
    for scale in [0.0, 0.25, 0.5, 1.0, 2.0] {
        let omega = CMatrix::from_diagonal(&CVector::from_vec(vec![re(scale), re(0.5 * scale)]));
        let model = two_boson_model(&TwoBosonParams::isotropic(1.0, omega))?;
        let ops = build_operators(&model, &space)?;
        let g = sector_estimate(&ops, 500, 9, &shifts)?;
        let g0 = sector_estimate_operator(&ops.g0, &space, 500, 9, &shifts)?;
        println!(
            "|Omega| = {scale:<4}  theta(G) = {:.4} at shift {}   theta(G0) = {:.1e}",
            g.theta, g.shift, g0.theta
        );
    }
    Ok(())
}
