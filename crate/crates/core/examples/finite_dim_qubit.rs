//! A depolarizing qubit in the Gell-Mann basis: derivative identity and the
//! transition-probability probe.

use gaussian_qms::finite_dim::{fd_positivity_probe, gellmann_basis, initial_derivative, FiniteGKLSModel};
use gaussian_qms::linalg::{CMatrix, CVector, ONE, ZERO};

fn main() -> gaussian_qms::Result<()> {
    for (k, f) in gellmann_basis(2)?.iter().enumerate() {
        println!("F_{k} = {:.4}", f);
    }
    let model = FiniteGKLSModel::new(CMatrix::zeros(2, 2), CMatrix::identity(3, 3))?;
    let u = CVector::from_vec(vec![ONE, ZERO]);
    let v = CVector::from_vec(vec![ZERO, ONE]);
    let (analytic, numeric) = initial_derivative(&model, &u, &v)?;
    println!("d/dt <1|T_t(|0><0|)|1> at 0: analytic {analytic}, finite difference {numeric:.8}");

    let report = fd_positivity_probe(&model, &[0.01, 0.1, 1.0], 200, 5)?;
    for (t, min) in &report.per_time {
        println!("t = {t:<5} min over 200 pairs = {min:.3e}");
    }
    println!("positivity improving on the sample: {}", report.positive);
    Ok(())
}
