//! Span of iterated-commutator words applied to P_t e0, compared with the
//! support of the evolved state.

use gaussian_qms::commutators::{adjoint_action, iterated_commutator, support_span, validate_action_oracle, SpanBudgets};
use gaussian_qms::diagnostics::positivity_improving_probe;
use gaussian_qms::fock::build_space;
use gaussian_qms::generator::{build_lindbladian, build_operators, Picture};
use gaussian_qms::linalg::{re, CMatrix, CVector};
use gaussian_qms::model::GaussianModel;

fn main() -> gaussian_qms::Result<()> {
    let model = GaussianModel::dissipative(
        CMatrix::from_column_slice(2, 1, &[re(2.0), re(0.0)]),
        CMatrix::from_column_slice(2, 1, &[re(0.0), re(2.0)]),
    )?
    .with_hamiltonian(CMatrix::from_element(1, 1, re(0.5)), CMatrix::zeros(1, 1), CVector::zeros(1))?;
    let space = build_space(1, 10)?;
    let ops = build_operators(&model, &space)?;
    let action = adjoint_action(&model);
    println!("action matrix on (1, a, a†):\n{:.3}", action.matrix);
    println!("oracle error: {:.1e}", validate_action_oracle(&model, &space, &action)?);
    for m in 0..3 {
        let f = iterated_commutator(&action, 0, m)?;
        println!("delta^{m}(L_1): alpha = {:.4}, beta = {:.4}", f.alpha[0], f.beta[0]);
    }

    let lstar = build_lindbladian(&ops, Picture::Schrodinger);
    for t in [0.05, 0.1] {
        let span = support_span(&ops, &action, &space.vacuum(), t, SpanBudgets::default_for(&space))?;
        let probe = positivity_improving_probe(&lstar, &[space.vacuum()], &[t], &space)?;
        println!(
            "t = {t}: span rank {} (levels used {}), eigen-rank {} of {}",
            span.rank,
            span.census.len(),
            probe[0].rank,
            space.interior_dim()
        );
    }
    Ok(())
}
