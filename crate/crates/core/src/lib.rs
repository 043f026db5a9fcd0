//! Estimate the CO2-equivalent emissions of training machine-learning models.
//!
//! The estimate is built from four inputs: the energy drawn by the hardware,
//! the cloud region the job runs in, that region's grid carbon intensity, and
//! any offsets the provider buys. A catalog of GCP, AWS and Azure regions and
//! a table of accelerator power/throughput figures ship with the crate.
//!
//! ```
//! use mlco2::{engine, DataCatalog, EstimateRequest, Provider};
//!
//! let catalog = DataCatalog::shipped().unwrap();
//! let request = EstimateRequest::new("Tesla V100", 1, 100.0, Provider::Aws, "ca-central-1")
//!     .with_pue(1.0);
//! let estimate = engine::estimate_emissions(&catalog, &request).unwrap();
//! assert_eq!(estimate.energy.total_kwh, 30.0);
//! assert_eq!(estimate.gross_gco2eq, 600.0);
//! ```
//!
//! Emissions are an approximation: TDP stands in for measured power draw and
//! each region is assumed to draw from its local grid at a single annual
//! average intensity.

pub mod cli;
pub mod dataset;
pub mod engine;
mod error;
pub mod report;
pub mod service;

pub use dataset::{
    CarbonIntensity, DataCatalog, GeoMap, GridRegion, HardwareKind, HardwareProfile, Provider,
};
pub use engine::{
    Comparison, EfficiencyReport, EmissionsEstimate, EnergyBreakdown, EstimateRequest, Metric,
    RegionalStats, Workload,
};
pub use error::{Error, Result};
