//! Runs the verification suite on a product file and prints the report.
//!
//! `cargo run --example verify_report -- fixtures/f3_v_k2_k2_k2.json full_oracle`

use tw_core::cli::load_spec;
use tw_core::gwreath::{build_product, BuildOptions};
use tw_core::linalg::DEFAULT_TOL;
use tw_core::scheme::DEFAULT_SEED;
use tw_core::verify::{run_suite, Level, SuiteConfig};

fn main() -> tw_core::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| {
        concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/f1_chain2_k2_k2.json").into()
    });
    let level = match args.next().as_deref() {
        Some("closed_forms") => Level::ClosedForms,
        Some("lemmas") => Level::Lemmas,
        _ => Level::FullOracle,
    };
    let spec = load_spec(path.as_ref(), DEFAULT_TOL, DEFAULT_SEED)?;
    let ps = build_product(&spec, BuildOptions::default())?;
    let report = run_suite(
        &ps,
        level,
        SuiteConfig {
            tol: DEFAULT_TOL,
            seed: DEFAULT_SEED,
        },
    )?;
    print!("{}", report.to_table());
    println!("spec digest {}", report.spec_digest);
    Ok(())
}
