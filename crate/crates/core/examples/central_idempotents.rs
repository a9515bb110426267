//! Enumerates the closed-form central primitive idempotents of a product and
//! matches them against the brute-force decomposition.

use tw_core::gwreath::{build_product, BuildOptions, ProductSpec};
use tw_core::linalg::DEFAULT_TOL;
use tw_core::scheme::{complete_graph_scheme, DEFAULT_SEED};
use tw_core::terwilliger::{central_decomposition, terwilliger_algebra};
use tw_core::verify::match_to_oracle;
use tw_core::Poset;

fn main() -> tw_core::Result<()> {
    // 0 < 1 and 0 < 2
    let poset = Poset::from_cover_relations(3, &[(0, 1), (0, 2)])?;
    let k2 = complete_graph_scheme(2, DEFAULT_TOL, DEFAULT_SEED)?;
    let spec = ProductSpec::new(
        poset,
        vec![k2.clone(), k2.clone(), k2],
        vec![],
        DEFAULT_TOL,
        DEFAULT_SEED,
    )?;
    let ps = build_product(&spec, BuildOptions::default())?;

    let phi = ps.enumerate_phi()?;
    let td = terwilliger_algebra(&ps.as_scheme()?, ps.base_point(), DEFAULT_TOL)?;
    let cd = central_decomposition(&td, DEFAULT_TOL)?;
    let matching = match_to_oracle(&phi.idempotents, &cd);

    println!(
        "dim T = {}, closed forms = {}, oracle = {}",
        td.dim(),
        phi.triples.len(),
        cd.len()
    );
    let d = ps.d_indices();
    for (t, hit) in phi.triples.iter().zip(&matching) {
        let (k, dist) = hit.expect("every closed form has an oracle partner");
        println!(
            "({}, {}, {}): predicted n = {}, oracle n = {}, mult = {}, distance {:.1e}",
            d[t.i],
            d[t.j],
            t.ell,
            ps.predicted_module_dim(t),
            cd.dims[k],
            cd.mults[k],
            dist
        );
    }
    Ok(())
}
