//! Compare devices by theoretical GFLOPS per watt of TDP.
//!
//! Run with: cargo run -p mlco2 --example hardware_efficiency

use mlco2::engine::hardware_efficiency;
use mlco2::report::{HardwareReport, Render};
use mlco2::DataCatalog;

fn main() -> mlco2::Result<()> {
    let catalog = DataCatalog::shipped()?;
    print!("{}", HardwareReport::new(&catalog, true).text());

    let eff = |name: &str| catalog.lookup_hardware(name).map(hardware_efficiency);
    let v100 = eff("Tesla V100")?;
    let tpu3 = eff("TPU3")?;
    let xeon = eff("Intel Xeon E5-2699")?;
    let xavier = eff("AGX Xavier")?;

    println!();
    println!("TPU3 vs V100 (fp32):   {:.2}x", tpu3.gflops32_per_watt / v100.gflops32_per_watt);
    println!("V100 vs Xeon (fp32):   {:.2}x", v100.gflops32_per_watt / xeon.gflops32_per_watt);
    println!("Xavier vs V100 (fp32): {:.2}x", xavier.gflops32_per_watt / v100.gflops32_per_watt);
    Ok(())
}
