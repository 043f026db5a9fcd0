//! Translate an estimate into everyday units. The factors are supplied by
//! the caller; the figures below are illustrative placeholders.
//!
//! Run with: cargo run -p mlco2 --example equivalences

use mlco2::engine::{equivalence, estimate_emissions, EquivalenceFactor};
use mlco2::{DataCatalog, EstimateRequest, Provider};

fn main() -> mlco2::Result<()> {
    let catalog = DataCatalog::shipped()?;
    let e = estimate_emissions(
        &catalog,
        &EstimateRequest::new("Titan V", 4, 120.0, Provider::Aws, "us-east-2"),
    )?;
    println!("net emissions: {:.1} g", e.net_gco2eq);

    let factors = [
        EquivalenceFactor::new("km driven (example car, 170 g/km)", 170.0),
        EquivalenceFactor::new("smartphone charges (example, 8 g each)", 8.0),
    ];
    for (label, units) in equivalence(e.net_gco2eq, &factors)? {
        println!("  {units:>10.1}  {label}");
    }
    Ok(())
}
