mod common;

use pdeeg::classifiers::{train_svm, KernelSpec, SvmParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dataset(rng: &mut ChaCha8Rng, n: usize, d: usize, shift: f64) -> (Vec<Vec<f64>>, Vec<f64>) {
    let y: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let x = y
        .iter()
        .map(|&yi| (0..d).map(|_| rng.random_range(-1.0..1.0) + yi * shift).collect())
        .collect();
    (x, y)
}

const KERNELS: [KernelSpec; 3] = [
    KernelSpec::Linear,
    KernelSpec::Polynomial { degree: 2, coef0: 1.0 },
    KernelSpec::Rbf { gamma: 0.5 },
];

#[test]
fn kkt_conditions_hold() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for case in 0..50 {
        let n = rng.random_range(4..=40);
        let d = rng.random_range(1..=5);
        let (x, y) = dataset(&mut rng, n, d, 0.3);
        let params = SvmParams {
            kernel: KERNELS[case % 3],
            c: [0.5, 1.0, 10.0][case % 3],
            ..SvmParams::default()
        };
        let m = train_svm(&x, &y, &params).unwrap();
        assert!(m.converged);
        let v = common::max_kkt_violation(&m, &x, &y);
        assert!(v <= params.tol + 1e-9, "case {case}: violation {v}");
        let sum: f64 = common::full_alphas(&m, &x).iter().zip(&y).map(|(a, yi)| a * yi).sum();
        assert!(sum.abs() < 1e-9, "case {case}: sum y·α = {sum}");
    }
}

#[test]
fn agrees_with_dense_qp() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for case in 0..20 {
        let n = rng.random_range(4..=12);
        let (x, y) = dataset(&mut rng, n, 2, 0.6);
        let kernel = KERNELS[case % 3];
        let params = SvmParams {
            kernel,
            c: 1.0,
            tol: 1e-6,
            ..SvmParams::default()
        };
        let m = train_svm(&x, &y, &params).unwrap();
        let qp = common::dense_svm_qp(&x, &y, &kernel, 1.0);
        for (i, xi) in x.iter().enumerate() {
            let want = common::qp_decision(&qp, &x, &y, &kernel, xi);
            let got = m.decision_value(xi);
            assert_eq!(got >= 0.0, want >= 0.0, "case {case} row {i}: {got} vs {want}");
            assert!((got - want).abs() < 1e-3, "case {case} row {i}: {got} vs {want}");
        }
    }
}

#[test]
fn xor_with_rbf() {
    let x = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0], vec![1.0, 0.0]];
    let y = [-1.0, -1.0, 1.0, 1.0];
    let m = train_svm(
        &x,
        &y,
        &SvmParams {
            kernel: KernelSpec::Rbf { gamma: 1.0 },
            c: 10.0,
            ..SvmParams::default()
        },
    )
    .unwrap();
    for (xi, &yi) in x.iter().zip(&y) {
        assert_eq!(m.predict_sign(xi), yi);
    }
}
