//! On an anti-chain the product is the direct product; on a chain it is the
//! iterated wreath product. Both are compared with directly written classes.

use tw_core::gwreath::{build_product, BuildOptions, ProductSpec};
use tw_core::linalg::DEFAULT_TOL;
use tw_core::scheme::{complete_graph_scheme, cyclic_group_scheme, DEFAULT_SEED};
use tw_core::verify::{compare_against_direct_product, compare_against_wreath};
use tw_core::Poset;

fn main() -> tw_core::Result<()> {
    let k2 = complete_graph_scheme(2, DEFAULT_TOL, DEFAULT_SEED)?;
    let k3 = complete_graph_scheme(3, DEFAULT_TOL, DEFAULT_SEED)?;
    let z3 = cyclic_group_scheme(3, DEFAULT_TOL, DEFAULT_SEED)?;

    let direct = ProductSpec::new(
        Poset::antichain(2)?,
        vec![k2.clone(), k3],
        vec![],
        DEFAULT_TOL,
        DEFAULT_SEED,
    )?;
    let c = compare_against_direct_product(&build_product(&direct, BuildOptions::default())?)?;
    println!("{}: {:?} over {} classes", c.check_id, c.status, c.cases);

    let wreath = ProductSpec::new(
        Poset::chain(3)?,
        vec![z3, k2.clone(), k2],
        vec![],
        DEFAULT_TOL,
        DEFAULT_SEED,
    )?;
    let c = compare_against_wreath(&build_product(&wreath, BuildOptions::default())?)?;
    println!("{}: {:?} over {} classes", c.check_id, c.status, c.cases);
    Ok(())
}
