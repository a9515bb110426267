//! Closes the Terwilliger algebra of `K_n` and splits its center.

use tw_core::linalg::DEFAULT_TOL;
use tw_core::scheme::{complete_graph_scheme, DEFAULT_SEED};
use tw_core::terwilliger::{
    central_decomposition, primary_idempotent_formula, terwilliger_algebra,
};

fn main() -> tw_core::Result<()> {
    for n in 3..=6 {
        let s = complete_graph_scheme(n, DEFAULT_TOL, DEFAULT_SEED)?;
        let td = terwilliger_algebra(&s, 0, DEFAULT_TOL)?;
        let cd = central_decomposition(&td, DEFAULT_TOL)?;
        let primary = primary_idempotent_formula(&s, 0, DEFAULT_TOL)?;
        println!(
            "K_{n}: dim T = {}, dim Z(T) = {}, types (n, mult) = {:?}, primary formula off by {:.2e}",
            td.dim(),
            cd.len(),
            cd.dims.iter().zip(&cd.mults).collect::<Vec<_>>(),
            primary.dist(&cd.idempotents[0]),
        );
    }
    Ok(())
}
