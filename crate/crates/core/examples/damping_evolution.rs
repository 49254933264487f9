//! Amplitude damping against its closed form, with both integrators.

use gaussian_qms::evolution::{evolve_density, evolve_vector, DensityMatrix, Integrator};
use gaussian_qms::fock::build_space;
use gaussian_qms::generator::{build_lindbladian, build_operators, Picture};
use gaussian_qms::linalg::{re, CMatrix};
use gaussian_qms::model::GaussianModel;

fn main() -> gaussian_qms::Result<()> {
    let model = GaussianModel::dissipative(CMatrix::from_element(1, 1, re(1.0)), CMatrix::zeros(1, 1))?;
    let ops = build_operators(&model, &build_space(1, 6)?)?;
    let lstar = build_lindbladian(&ops, Picture::Schrodinger);
    let rho0 = DensityMatrix::pure(&ops.space.basis_vector(1))?;
    let times: Vec<f64> = (0..=8).map(|k| 0.25 * k as f64).collect();

    let rk4 = evolve_density(&lstar, &rho0, &times, Integrator::Rk4 { step: 1e-3 })?;
    let exact = evolve_density(&lstar, &rho0, &times, Integrator::Expm)?;
    println!("{:>5} {:>12} {:>10} {:>10}", "t", "<e1|rho|e1>", "rk4 err", "expm err");
    for k in 0..times.len() {
        let t = times[k];
        let want = (-t).exp();
        println!(
            "{t:>5.2} {want:>12.8} {:>10.1e} {:>10.1e}",
            (rk4.states[k].rho[(1, 1)].re - want).abs(),
            (exact.states[k].rho[(1, 1)].re - want).abs()
        );
    }

    let e1 = ops.space.basis_vector(1);
    let run = evolve_vector(&ops, &e1, &[1.0, 2.0], Integrator::Expm)?;
    for (t, psi) in run.times.iter().zip(&run.states) {
        println!("P_t e1 at t = {t}: {:.8} (e^(-t/2) = {:.8})", psi[1].re, (-t / 2.0).exp());
    }
    Ok(())
}
