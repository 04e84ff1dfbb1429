//! Tour of the supported base fields and their exact invariants.
//!
//! For each field the calibrated realization places `O_F` in `R^d` so that
//! its covolume is `sqrt|Δ_F|`; the codifferent (printed as exact rationals)
//! is what turns Euclidean duals into arithmetic duals.

use latcoh::field::NumberField;
use latcoh::lattice::MetrizedLattice;

fn main() {
    for label in ["Q", "Q(sqrt -1)", "Q(sqrt 5)", "Q(sqrt -3)", "Q(sqrt 2)"] {
        let f = NumberField::parse(label).expect("valid field label");
        let (r1, r2) = f.signature();
        println!("{}", f.label());
        println!("  degree        {}", f.degree());
        println!("  signature     ({r1}, {r2})");
        println!("  discriminant  {}", f.discriminant());
        println!("  O_F basis     {}", f.integral_basis_labels().join(", "));

        // The rank-1 standard lattice is O_F itself; its covolume must be
        // sqrt|Δ| and its degree (n/2)·log|Δ| - log covol = 0.
        let o_f = MetrizedLattice::standard(&f, 1);
        println!(
            "  covol(O_F)    {:.12}  (sqrt|disc| = {:.12})",
            o_f.covolume(),
            (f.abs_discriminant() as f64).sqrt()
        );
        println!("  deg(O_F)      {:+.3e}", o_f.degree());

        let codiff: Vec<String> = f
            .codifferent()
            .iter()
            .map(|row| {
                let entries: Vec<String> = row.iter().map(|x| x.to_string()).collect();
                format!("[{}]", entries.join(", "))
            })
            .collect();
        println!("  codifferent   {}", codiff.join(" "));
        println!();
    }
}
