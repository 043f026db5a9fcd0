//! Rank every region for a multi-week, multi-GPU training job and show how
//! much picking a low-carbon grid saves.
//!
//! Run with: cargo run -p mlco2 --example compare_regions

use mlco2::engine::compare_regions;
use mlco2::report::{ComparisonReport, Render};
use mlco2::{DataCatalog, Metric, Workload};

fn main() -> mlco2::Result<()> {
    let catalog = DataCatalog::shipped()?;
    let workload = Workload::new("Tesla V100", 8, 14.0 * 24.0).with_pue(1.0);

    let cmp = compare_regions(&catalog, &workload, None, Metric::Gross)?;
    print!("{}", ComparisonReport::new(&catalog, &workload, None, &cmp, Some(5)).text());

    let (best, worst) = (cmp.best(), cmp.worst());
    println!(
        "\n{}/{} emits {:.1} kg, {}/{} emits {:.1} kg: {:.1} kg avoidable",
        best.region.provider,
        best.region.region_code,
        best.gross_gco2eq / 1000.0,
        worst.region.provider,
        worst.region.region_code,
        worst.gross_gco2eq / 1000.0,
        (worst.gross_gco2eq - best.gross_gco2eq) / 1000.0
    );

    // net ranking: fully offset providers tie at zero and fall back to key order
    let net = compare_regions(&catalog, &workload, None, Metric::Net)?;
    match net.ratio {
        Some(r) => println!("net worst/best ratio {r:.2}"),
        None => println!("net worst/best ratio undefined (best region is fully offset)"),
    }
    Ok(())
}
