//! Random Bogoliubov pairs: group constraints and the transformed model.

use gaussian_qms::model::{bogoliubov_transform, generate_bogoliubov, random_positive_model};

fn main() -> gaussian_qms::Result<()> {
    let model = random_positive_model(2, 0.2, 1.0, 0.5, 3)?;
    println!("original eps0 = {:.4}", model.kossakowski().eps0);
    for seed in 0..4 {
        let pair = generate_bogoliubov(2, seed)?;
        let moved = bogoliubov_transform(&model, &pair)?;
        let k = moved.kossakowski();
        println!(
            "seed {seed}: constraint error {:.1e}, |F| = {:.3}, eps0 = {:.4}, strictly positive = {}",
            pair.constraint_error()?,
            pair.f.norm(),
            k.eps0,
            k.strictly_positive
        );
    }
    Ok(())
}
