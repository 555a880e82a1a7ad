use hc_core::debranges::*;
use num_complex::Complex;
type C = Complex<f64>;
fn main() {
    let m = ClarkModel::build(vec![-1.0f64, 1.0], vec![1.0, 1.0]).unwrap();
    for z in [C::new(0.3, 0.2), C::new(-1.5, 1.0), C::new(0.0, 0.0)] {
        let e = m.e_eval(z);
        let expect = -(z + C::new(0.0, 1.0)).powi(2);
        println!("E({z}) = {e}  expect {expect}");
    }
    for t in [-1.0f64, 1.0] {
        println!("phi'({t}) = {}", m.phase_derivative(t));
    }
    println!("phase_mass_defect = {}", m.phase_mass_defect);
    let k00 = kernel_db(&m, C::new(0.0, 0.0), C::new(0.0, 0.0));
    println!("K_0(0) = {k00} expect {}", 2.0 / std::f64::consts::PI);
    // the 8-point model scale
    let spectrum: Vec<f64> = (1..=8).map(|i| i as f64 + 0.2 * (i as f64).sin()).collect();
    let masses: Vec<f64> = (1..=8).map(|i| 0.5 + 0.1 * i as f64).collect();
    let m8 = ClarkModel::build(spectrum.clone(), masses).unwrap();
    let diag = kernel_db(&m8, C::new(spectrum[0], 0.0), C::new(spectrum[0], 0.0));
    println!("diag at t_0 = {diag}");
    println!("phi'(t_0) = {}", m8.phase_derivative(spectrum[0]));
}
