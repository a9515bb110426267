//! Builds small schemes, checks the axioms and prints their spectral data.

use tw_core::linalg::DEFAULT_TOL;
use tw_core::scheme::{check_axioms, complete_graph_scheme, cyclic_group_scheme, DEFAULT_SEED};

fn main() -> tw_core::Result<()> {
    for (name, s) in [
        ("K_4", complete_graph_scheme(4, DEFAULT_TOL, DEFAULT_SEED)?),
        ("Z_5", cyclic_group_scheme(5, DEFAULT_TOL, DEFAULT_SEED)?),
    ] {
        let mut report = check_axioms(s.adjacency(), DEFAULT_TOL);
        report.valencies = s.valencies().to_vec();
        report.multiplicities = s.multiplicities().to_vec();
        println!("{name}");
        print!("{}", report.to_table());
        println!("P(1, 1) = {:.6}", s.eigenvalue(1, 1));
        println!();
    }
    Ok(())
}
