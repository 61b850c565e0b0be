//! Quadratic constants of motion of the oscillator from the nullspace of
//! M -> {H, S_M}: four at theta = 0, two otherwise.

use ncplane::symmetry::{
    angular_momentum_form, casimir_residual, conserved_bilinears, membership_check, structure_constants, su2_forms,
    DEFAULT_SVD_THRESHOLD,
};
use ncplane::NCParams;

fn main() -> ncplane::Result<()> {
    for theta in [0.0, 0.5] {
        let p = NCParams::unit(theta);
        let basis = conserved_bilinears(&p, DEFAULT_SVD_THRESHOLD)?;
        println!("theta {theta}: dimension {} (gap {:.1e})", basis.dimension, basis.spectral_gap().unwrap());
        let sv: Vec<String> = basis.singular_values.iter().map(|s| format!("{s:.2e}")).collect();
        println!("  singular values {}", sv.join(" "));
        println!("  J in span: residual {:.1e}", membership_check(&angular_momentum_form(theta), &basis)?);
    }

    let p = NCParams::unit(0.0);
    let sc = structure_constants(&su2_forms(&p), &p);
    println!("\n{{S1, S2}} = {:+.3} S3", sc.c[0][1][2]);
    println!("{{S2, S3}} = {:+.3} S1", sc.c[1][2][0]);
    println!("{{S3, S1}} = {:+.3} S2", sc.c[2][0][1]);
    println!("Casimir residual at (1, 2, 3, 4): {:.1e}", casimir_residual(&p, [1.0, 2.0, 3.0, 4.0]));
    Ok(())
}
