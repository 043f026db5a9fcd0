//! Spread of grid carbon intensity across datacenters, bucketed by
//! continent. Emits CSV suitable for plotting.
//!
//! Run with: cargo run -p mlco2 --example regional_stats

use mlco2::engine::regional_stats;
use mlco2::report::{Render, StatsReport};
use mlco2::{DataCatalog, GeoMap};

fn main() -> mlco2::Result<()> {
    let catalog = DataCatalog::shipped()?;
    let stats = regional_stats(&catalog, &GeoMap::shipped()?)?;
    let report = StatsReport::new(&catalog, &stats);
    print!("{}", report.text());
    println!();
    print!("{}", report.csv()?);

    for s in stats.iter().filter(|s| s.count == 1) {
        println!("{} has a single data point ({} g/kWh)", s.geo_region, s.min);
    }
    Ok(())
}
