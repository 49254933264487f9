//! Builds the Kossakowski matrix of a few Kraus configurations and checks
//! minimality and invariance under unitary mixing.

use gaussian_qms::linalg::{max_abs, random_unitary, re, CMatrix};
use gaussian_qms::model::{build_kossakowski, check_minimality, mix_kraus, random_model, GaussianModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gaussian_qms::Result<()> {
    // L = a, then L₁ = a, L₂ = a†.
    let damping = GaussianModel::dissipative(CMatrix::from_element(1, 1, re(1.0)), CMatrix::zeros(1, 1))?;
    let both = GaussianModel::dissipative(
        CMatrix::from_column_slice(2, 1, &[re(1.0), re(0.0)]),
        CMatrix::from_column_slice(2, 1, &[re(0.0), re(1.0)]),
    )?;
    for (name, model) in [("damping", &damping), ("a and a†", &both)] {
        let k = build_kossakowski(model.v(), model.u())?;
        println!(
            "{name:>9}: eigenvalues {:?}  eps0 = {}  rank = {}  minimal = {}",
            k.eigenvalues,
            k.eps0,
            k.rank,
            check_minimality(model.v(), model.u())?
        );
    }

    let model = random_model(2, 4, 0.5, 42)?;
    let k = model.kossakowski();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mixed = mix_kraus(&model, &random_unitary(&mut rng, 4))?;
    println!(
        "random d=2, m=4: eps0 = {:.4}, strictly positive = {}, |K - K'| after mixing = {:.1e}",
        k.eps0,
        k.strictly_positive,
        max_abs(&(&k.matrix - mixed.kossakowski().matrix))
    );
    Ok(())
}
