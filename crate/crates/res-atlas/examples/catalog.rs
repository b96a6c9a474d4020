//! Print the space catalog: the five families with their restricted-root
//! multiplicities, half-sum coordinates, branch-point scale, and the rows
//! where commonly tabulated values disagree with the defining formulas.

use res_atlas::rootdata::{default_catalog, isomorphism_crosscheck, rat_str, rho_data};
use res_atlas::Rat;

fn main() {
    println!(
        "{:<7} {:<10} {:>3} {:>3} {:>3}  {:>9} {:>6}  {:<9} {}",
        "space", "group", "m_l", "m_m", "m_s", "2rho", "L/b", "flags", ""
    );
    for space in default_catalog() {
        let rho = rho_data(&space);
        let two = Rat::from_integer(2);
        let two_rho = format!("({}, {})", rat_str(rho.rho_b1 * two), rat_str(rho.rho_b2 * two));
        let mut flags = Vec::new();
        if space.hermitian {
            flags.push("herm");
        }
        if space.reduced {
            flags.push("C2");
        }
        if space.continuation_excluded {
            flags.push("excl");
        }
        println!(
            "{:<7} {:<10} {:>3} {:>3} {:>3}  {:>9} {:>6.3}  {:<9} {}",
            space.name(),
            space.family.group_name(space.p),
            space.m_l,
            space.m_m,
            space.m_s,
            two_rho,
            rho.l_over_b,
            flags.join(","),
            if rho.annotations.is_empty() { "" } else { "*" },
        );
    }

    println!("\nAnnotated rows (defining formulas win over tabulated values):");
    for space in default_catalog() {
        for note in rho_data(&space).annotations {
            println!("  {}: {note}", space.name());
        }
    }

    let cross = isomorphism_crosscheck();
    println!("\nLow-rank isomorphism crosscheck:");
    for pair in &cross.pairs {
        println!(
            "  {} = {:?}  vs  {} = {:?}  ({})",
            pair.left,
            pair.left_m,
            pair.right,
            pair.right_m,
            if pair.equal { "equal" } else { "MISMATCH" }
        );
    }
    println!(
        "  SO0(2,2) rejected as reducible: {}",
        cross.bdi_p2_rejected
    );
    assert!(cross.all_equal, "crosscheck failed");
}
