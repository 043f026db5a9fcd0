//! A run mixing device types is the sum of one estimate per device type.
//!
//! Run with: cargo run -p mlco2 --example mixed_hardware

use mlco2::engine::estimate_emissions;
use mlco2::{DataCatalog, EstimateRequest, Provider};

fn main() -> mlco2::Result<()> {
    let catalog = DataCatalog::shipped()?;
    let parts = [
        EstimateRequest::new("Tesla V100", 8, 48.0, Provider::Azure, "westeurope"),
        // data loading and evaluation on CPUs at partial load
        EstimateRequest::new("Intel Xeon E5-2699", 2, 48.0, Provider::Azure, "westeurope").with_utilization(0.6),
    ];

    let mut total_kwh = 0.0;
    let mut gross = 0.0;
    let mut net = 0.0;
    for req in &parts {
        let e = estimate_emissions(&catalog, req)?;
        println!("{:<20} x{:<2} {:>9.3} kWh {:>11.1} g", e.hardware.name, req.device_count, e.energy.total_kwh, e.gross_gco2eq);
        total_kwh += e.energy.total_kwh;
        gross += e.gross_gco2eq;
        net += e.net_gco2eq;
    }
    println!("total {total_kwh:.3} kWh, gross {gross:.1} g, net {net:.1} g");
    Ok(())
}
