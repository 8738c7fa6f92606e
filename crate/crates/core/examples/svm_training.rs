//! Train kernel SVMs with SMO, inspect the support vectors and round-trip a
//! model through JSON.
//!
//! ```text
//! cargo run --example svm_training
//! ```

use pdeeg::classifiers::{
    model_from_json, model_to_json, train_svm, ClassifierSpec, KernelSpec, SvmParams,
};

fn main() -> pdeeg::Result<()> {
    let x = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0], vec![1.0, 0.0]];
    let y = [-1.0, -1.0, 1.0, 1.0];
    for kernel in [
        KernelSpec::Linear,
        KernelSpec::Polynomial { degree: 2, coef0: 1.0 },
        KernelSpec::Rbf { gamma: 1.0 },
    ] {
        let params = SvmParams {
            kernel,
            c: 10.0,
            ..SvmParams::default()
        };
        let m = train_svm(&x, &y, &params)?;
        let correct = x.iter().zip(&y).filter(|(xi, &yi)| m.predict_sign(xi) == yi).count();
        println!(
            "XOR, {:<24} {} support vectors, {}/4 correct, {} iterations",
            kernel.describe(),
            m.n_sv,
            correct,
            m.iterations
        );
    }

    let spec = ClassifierSpec::Svm(SvmParams {
        kernel: KernelSpec::Rbf { gamma: 1.0 },
        c: 10.0,
        ..SvmParams::default()
    });
    let model = spec.train(&x, &[0, 0, 1, 1], 0)?;
    let json = model_to_json(&model)?;
    let back = model_from_json(&json)?;
    println!("\nsaved model is {} bytes of JSON; reloaded equal: {}", json.len(), back == model);
    println!("prediction at (0.9, 0.1): class {}", back.predict(&[0.9, 0.1])?);
    Ok(())
}
