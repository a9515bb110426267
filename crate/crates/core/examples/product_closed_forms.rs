//! Closed-form classes, idempotents and parameters of a product over the
//! V-shaped poset `0, 1 < 2`.

use tw_core::gwreath::{build_product, BuildOptions, ProductSpec};
use tw_core::linalg::DEFAULT_TOL;
use tw_core::scheme::{complete_graph_scheme, DEFAULT_SEED};
use tw_core::Poset;

fn main() -> tw_core::Result<()> {
    let poset = Poset::from_cover_relations(3, &[(0, 2), (1, 2)])?;
    let k2 = complete_graph_scheme(2, DEFAULT_TOL, DEFAULT_SEED)?;
    let k3 = complete_graph_scheme(3, DEFAULT_TOL, DEFAULT_SEED)?;
    let spec = ProductSpec::new(
        poset,
        vec![k3, k2.clone(), k2],
        vec![],
        DEFAULT_TOL,
        DEFAULT_SEED,
    )?;
    let ps = build_product(&spec, BuildOptions::default())?;

    println!(
        "|X_P| = {}, d = {}, oracle checked: {}",
        ps.size(),
        ps.d(),
        ps.oracle_checked()
    );
    println!("{:<16} {:>4} {:>4}", "index", "k", "m");
    for (k, i) in ps.d_indices().iter().enumerate() {
        println!(
            "{:<16} {:>4} {:>4}",
            i.to_string(),
            ps.valencies()[k],
            ps.multiplicities()[k]
        );
    }
    let by_duals = ps.primary_from_duals()?;
    let by_idempotents = ps.primary_from_idempotents()?;
    println!(
        "primary: two expressions differ by {:.2e}, rank {}",
        by_duals.dist(&by_idempotents),
        by_duals.rank(1e-8)
    );
    Ok(())
}
