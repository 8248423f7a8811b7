use sparsedirect::testmat::{gen_test, TestKind};
use sparsedirect::lufact::{factor_gauss, Pivoting, LuOptions};
use sparsedirect::dense::DenseMat;
fn main() {
    for n in 1..=8 {
        let (a, b): (DenseMat<f64>, _) = gen_test(TestKind::Hilbert, n);
        let f = factor_gauss(&a, Pivoting::Partial, LuOptions::default()).unwrap();
        let x = f.solve(&b).unwrap();
        let err = x.iter().map(|xi| (xi - 1.0).abs()).fold(0.0, f64::max);
        println!("Hilbert n={n}: err={err:.3e}");
    }
}
