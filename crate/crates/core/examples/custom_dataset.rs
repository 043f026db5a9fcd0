//! Build a catalog from your own CSV data, e.g. an on-premise cluster with
//! a measured PUE and a negotiated renewable contract.
//!
//! Run with: cargo run -p mlco2 --example custom_dataset

use mlco2::dataset::{load_hardware, load_regions, validate_catalog};
use mlco2::engine::estimate_emissions;
use mlco2::{DataCatalog, EstimateRequest, Provider};

const REGIONS: &str = "\
provider,region_code,country,city,intensity_gco2_per_kwh,offset_ratio,default_pue,source
aws,onprem-mtl,Canada,Montréal,20,0.0,1.35,facilities report 2024
aws,onprem-fra,Germany,Frankfurt,615,0.25,1.2,facilities report 2024
";

const HARDWARE: &str = "\
name,kind,tdp_watts,tflops32,tflops16
Tesla V100,gpu,300,15.00,30.00
";

fn main() -> mlco2::Result<()> {
    let catalog = validate_catalog(load_regions(REGIONS.as_bytes())?, load_hardware(HARDWARE.as_bytes())?)?;
    println!("custom catalog {} ({} regions)", catalog.version(), catalog.regions().len());
    println!("bundled catalog {}", DataCatalog::shipped()?.version());

    for code in ["onprem-mtl", "onprem-fra"] {
        let e = estimate_emissions(&catalog, &EstimateRequest::new("Tesla V100", 16, 72.0, Provider::Aws, code))?;
        println!(
            "{code}: {:.1} kWh at PUE {}, gross {:.1} kg, net {:.1} kg",
            e.energy.total_kwh,
            e.pue,
            e.gross_gco2eq / 1000.0,
            e.net_gco2eq / 1000.0
        );
    }

    // validation errors name the row and column
    let broken = REGIONS.replace("0.25", "1.25");
    if let Err(e) = load_regions(broken.as_bytes()) {
        println!("rejected: {e}");
    }
    Ok(())
}
