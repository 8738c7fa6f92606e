//! Compare all classifiers on two Gaussian classes with subject-grouped
//! 5-fold cross-validation, then on the same data with shuffled labels.
//!
//! ```text
//! cargo run --example classifier_comparison
//! ```

use pdeeg::eval::report::render_text;
use pdeeg::eval::{cross_validate, EvalSettings};
use pdeeg::synth::{gaussian_feature_set, permute_labels, GaussianSpec};

fn main() -> pdeeg::Result<()> {
    let (m, y) = gaussian_feature_set(&GaussianSpec::default());
    let names = ["class0".to_string(), "class1".to_string()];
    let settings = EvalSettings::all_defaults(5, 3);
    let report = cross_validate(&m, &y, &names, &settings)?;
    print!("{}", render_text(&report));

    let shuffled = permute_labels(&y, 99);
    let null = cross_validate(&m, &shuffled, &names, &settings)?;
    println!("\nshuffled labels:");
    for r in &null.results {
        println!("  {:<16} accuracy {:>5.1} %  kappa {:+.3}", r.name, 100.0 * r.accuracy, r.kappa);
    }
    Ok(())
}
