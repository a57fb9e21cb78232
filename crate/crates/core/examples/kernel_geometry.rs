//! How the difference-of-Gaussians kernel and its excitatory radius scale.
//!
//! Run with `cargo run --example kernel_geometry`.

use nfgcd::kernel::{dog_kernel, excitatory_radius, phi, KernelParams};

fn main() -> Result<(), nfgcd::error::Error> {
    let base = KernelParams::default();
    println!("a = {}, b = {}", base.a, base.b);
    println!(
        "excitatory radius at sigma = 1: {:.6}",
        excitatory_radius(&base)
    );

    println!("\nsigma   radius");
    for sigma in [0.25, 0.4, 0.5, 0.76, 1.0, 2.5] {
        let p = base.with_sigma(sigma);
        println!("{sigma:<7} {:.4}", excitatory_radius(&p));
    }

    // A support sample excites a query only inside the radius.
    println!("\ndistance  kernel    activation");
    for d in [0.0, 0.5, 1.0, 1.5, 1.57, 1.58, 2.0, 3.0, 5.0] {
        let k = dog_kernel(d, &base);
        println!("{d:<9} {k:>+8.4}  {:.4}", phi(k * phi(1.0)));
    }

    let steep = KernelParams::new(3.0, 0.5, 1.0)?;
    println!(
        "\nwith a = 3, b = 0.5 the radius grows to {:.4}",
        excitatory_radius(&steep)
    );
    Ok(())
}
