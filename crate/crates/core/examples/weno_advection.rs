//! Scalar WENO5 Lax-Friedrichs flux reconstruction for linear advection on a
//! periodic line, with the fifth-order convergence of the flux divergence.

use std::f64::consts::PI;

use pif_mhd::weno::scalar_weno_lf;

fn main() {
    let mut prev: Option<f64> = None;
    println!("n, max error of -(F_i+1/2 - F_i-1/2)/h vs -u', order");
    for n in [20usize, 40, 80, 160] {
        let h = 1.0 / n as f64;
        // Point values of u = sin(2 pi x) with flux f = u.
        let u: Vec<f64> = (0..n).map(|i| (2.0 * PI * (i as f64 + 0.5) * h).sin()).collect();
        let faces = scalar_weno_lf(&u, &u, 1.0);
        let err = (0..n)
            .map(|i| {
                let du = -(faces[(i + 1) % n] - faces[i]) / h;
                let exact = -2.0 * PI * (2.0 * PI * (i as f64 + 0.5) * h).cos();
                (du - exact).abs()
            })
            .fold(0.0f64, f64::max);
        let order = prev.map(|p| (p / err).log2());
        println!("{n}, {err:.3e}, {}", order.map_or("-".into(), |o| format!("{o:.2}")));
        prev = Some(err);
    }
}
