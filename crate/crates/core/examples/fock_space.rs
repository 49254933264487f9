//! Truncated Fock space: basis order, interior subspace and the CCR on it.

use gaussian_qms::fock::{build_ladders, build_space, coherent_vector, interior_projector};
use gaussian_qms::linalg::{c, max_abs};
use gaussian_qms::sparse::SparseMatrix;

fn main() -> gaussian_qms::Result<()> {
    let space = build_space(2, 4)?;
    println!("d = 2, N_max = 4: dim {} (interior {})", space.dim(), space.interior_dim());
    for (k, n) in space.basis().iter().enumerate().take(8) {
        println!("  {k:>2} -> {n}");
    }

    let ladders = build_ladders(&space);
    let p = interior_projector(&space)?;
    let ccr = &(&ladders.a[0] * &ladders.adag[0]) - &(&ladders.adag[0] * &ladders.a[0]);
    let defect = &(&(&p * &ccr) * &p) - &p;
    println!("interior CCR defect: {:.1e}", defect.max_abs());
    let full = &ccr - &SparseMatrix::identity(space.dim());
    println!("full-space CCR defect (top grade): {:.1}", max_abs(&full.to_dense()));

    let g = coherent_vector(&space, &[c(0.3, 0.0), c(0.0, -0.2)])?;
    println!("truncated coherent vector norm² = {:.6} (exact e^|g|² = {:.6})", g.norm_squared(), (0.13f64).exp());
    Ok(())
}
