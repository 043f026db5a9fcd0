//! Estimate one training run.
//!
//! Run with: cargo run -p mlco2 --example estimate

use mlco2::engine::estimate_emissions;
use mlco2::report::{EstimateReport, Render};
use mlco2::{DataCatalog, EstimateRequest, Provider};

fn main() -> mlco2::Result<()> {
    let catalog = DataCatalog::shipped()?;

    // 4 V100s for a day in GCP's Iowa region, using the region's own PUE
    let request = EstimateRequest::new("Tesla V100", 4, 24.0, Provider::Gcp, "us-central1");
    let estimate = estimate_emissions(&catalog, &request)?;

    println!("{}", EstimateReport::new(&catalog, &estimate).text());

    // what the provider's offsets hide
    println!(
        "gross {:.1} g, of which {:.1} g offset by the provider",
        estimate.gross_gco2eq, estimate.offset_gco2eq
    );
    Ok(())
}
