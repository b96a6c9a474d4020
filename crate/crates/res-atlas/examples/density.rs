//! Plancherel density: evaluate the direct form (Harish-Chandra c-function
//! product) against the factored form C * Pi * P * Q at one spectral point
//! on every space, and show the normalization c_HC(rho) = 1 plus the
//! structured refusal at the pole lambda = rho.

use res_atlas::plancherel::{c_hc, density_direct, density_factored, rel_err};
use res_atlas::rootdata::{default_catalog, rho_data};
use res_atlas::{C64, SpectralPoint};

fn main() -> res_atlas::Result<()> {
    let lambda = SpectralPoint::new(C64::new(0.37, -0.81), C64::new(1.24, 0.55));
    println!(
        "lambda = ({:.2}{:+.2}i) b1 + ({:.2}{:+.2}i) b2\n",
        lambda.x1.re, lambda.x1.im, lambda.x2.re, lambda.x2.im
    );
    println!(
        "{:<7} {:>13} {:>13} {:>10} {:>12}",
        "space", "Re density", "Im density", "rel err", "|c_HC(rho)-1|"
    );
    for space in default_catalog() {
        let direct = density_direct(&space, &lambda)?;
        let parts = density_factored(&space, &lambda)?;
        let rho = rho_data(&space).rho_point();
        let c_err = (c_hc(&space, &rho)? - C64::new(1.0, 0.0)).norm();
        println!(
            "{:<7} {:>13.6e} {:>13.6e} {:>10.2e} {:>12.2e}",
            space.name(),
            direct.re,
            direct.im,
            rel_err(parts.product, direct),
            c_err,
        );
    }

    // The factored pieces of one space, spelled out.
    let space = default_catalog().into_iter().find(|s| s.name() == "DIII").unwrap();
    let parts = density_factored(&space, &lambda)?;
    println!("\nDIII factored pieces at lambda:");
    println!("  Pi (polynomial)   = {:.6e}{:+.6e}i", parts.pi.re, parts.pi.im);
    println!("  P  (gamma ratio)  = {:.6e}{:+.6e}i", parts.p.re, parts.p.im);
    println!("  Q  (cot factor)   = {:.6e}{:+.6e}i", parts.q.re, parts.q.im);
    println!("  C  (calibration)  = {:.6e}{:+.6e}i", parts.c_cal.re, parts.c_cal.im);
    println!(
        "  product           = {:.6e}{:+.6e}i",
        parts.product.re, parts.product.im
    );

    // lambda = rho sits on the pole set; the evaluator refuses it.
    let rho = rho_data(&space).rho_point();
    match density_direct(&space, &rho) {
        Err(e) => println!("\ndensity at rho is refused: {e}"),
        Ok(v) => panic!("density at rho unexpectedly evaluated to {v}"),
    }
    Ok(())
}
