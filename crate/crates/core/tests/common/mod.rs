//! Shared proptest strategies: small random catalogs and workloads.
#![allow(dead_code)]

use std::cmp::Ordering;

use mlco2::dataset::validate_catalog;
use mlco2::engine::estimate_emissions;
use mlco2::{
    CarbonIntensity, DataCatalog, EmissionsEstimate, GridRegion, HardwareKind, HardwareProfile, Metric, Provider,
    Workload,
};
use proptest::prelude::*;

pub fn provider() -> impl Strategy<Value = Provider> {
    prop_oneof![Just(Provider::Aws), Just(Provider::Azure), Just(Provider::Gcp)]
}

/// Free text without leading/trailing whitespace; commas, quotes and
/// diacritics exercise CSV quoting.
pub fn label() -> impl Strategy<Value = String> {
    "[A-Za-zÀ-ÿ,\"][A-Za-zÀ-ÿ ,\"]{0,10}[A-Za-zÀ-ÿ,\"]"
}

pub fn region_with(offsets: Vec<f64>) -> impl Strategy<Value = GridRegion> {
    (
        provider(),
        "[a-z]{1,3}-[a-z0-9]{1,4}",
        label(),
        label(),
        0u32..=20_000,
        proptest::sample::select(offsets),
        0u32..=100,
    )
        .prop_map(|(provider, code, country, city, deci, offset_ratio, pue)| GridRegion {
            provider,
            region_code: code,
            country,
            city,
            intensity: CarbonIntensity::new(f64::from(deci) / 10.0).unwrap(),
            offset_ratio,
            default_pue: 1.0 + f64::from(pue) / 100.0,
            source: "generated".into(),
        })
}

pub fn percent_offsets() -> Vec<f64> {
    (0..=100).map(|k| f64::from(k) / 100.0).collect()
}

pub fn hardware() -> impl Strategy<Value = HardwareProfile> {
    (
        "[A-Za-z0-9]{1,6}( [A-Za-z0-9]{1,6}){0,2}",
        1u32..=1000,
        0u32..=10_000,
        1u32..=10_000,
        prop_oneof![
            Just(HardwareKind::Gpu),
            Just(HardwareKind::Tpu),
            Just(HardwareKind::Cpu),
            Just(HardwareKind::Embedded)
        ],
    )
        .prop_map(|(name, tdp, t32, t16, kind)| HardwareProfile {
            name,
            kind,
            tdp_watts: f64::from(tdp),
            tflops32: f64::from(t32) / 100.0,
            tflops16: f64::from(t16) / 100.0,
        })
}

fn dedup_regions(mut regions: Vec<GridRegion>) -> Vec<GridRegion> {
    let mut seen = std::collections::HashSet::new();
    regions.retain(|r| seen.insert((r.provider, r.region_code.clone())));
    regions
}

/// A valid catalog of 1..=`max_regions` regions and 1..=3 devices.
pub fn catalog_with(max_regions: usize, offsets: Vec<f64>) -> impl Strategy<Value = DataCatalog> {
    (
        prop::collection::vec(region_with(offsets), 1..=max_regions),
        prop::collection::vec(hardware(), 1..=3),
    )
        .prop_map(|(regions, hardware)| {
            let mut seen = std::collections::HashSet::new();
            let hardware: Vec<_> = hardware
                .into_iter()
                .filter(|h| seen.insert(h.name.to_lowercase()))
                .collect();
            validate_catalog(dedup_regions(regions), hardware).expect("generated catalog is valid")
        })
}

pub fn small_catalog() -> impl Strategy<Value = DataCatalog> {
    catalog_with(5, percent_offsets())
}

pub fn workload_for(catalog: &DataCatalog) -> impl Strategy<Value = Workload> {
    let names: Vec<String> = catalog.hardware().iter().map(|h| h.name.clone()).collect();
    (
        proptest::sample::select(names),
        1u32..=64,
        1u32..=1_000_000,
        proptest::option::of(0u32..=100),
        1u32..=100,
    )
        .prop_map(|(name, count, centi_hours, pue, util)| Workload {
            hardware_name: name,
            device_count: count,
            hours: f64::from(centi_hours) / 100.0,
            pue_override: pue.map(|p| 1.0 + f64::from(p) / 100.0),
            utilization: f64::from(util) / 100.0,
        })
}

pub fn catalog_and_workload() -> impl Strategy<Value = (DataCatalog, Workload)> {
    small_catalog().prop_flat_map(|c| {
        let w = workload_for(&c);
        (Just(c), w)
    })
}

/// Brute-force ranking: estimate each region on its own, then sort.
pub fn brute_force_ranking(catalog: &DataCatalog, workload: &Workload, provider: Option<Provider>, metric: Metric) -> Vec<EmissionsEstimate> {
    let mut all: Vec<EmissionsEstimate> = catalog
        .regions()
        .iter()
        .filter(|r| provider.is_none_or(|p| p == r.provider))
        .map(|r| estimate_emissions(catalog, &workload.at(r.provider, r.region_code.clone())).unwrap())
        .collect();
    let value = |e: &EmissionsEstimate| match metric {
        Metric::Gross => e.gross_gco2eq,
        Metric::Net => e.net_gco2eq,
    };
    all.sort_by(|a, b| {
        value(a)
            .partial_cmp(&value(b))
            .unwrap()
            .then_with(|| match a.region.provider.cmp(&b.region.provider) {
                Ordering::Equal => a.region.region_code.cmp(&b.region.region_code),
                o => o,
            })
    });
    all
}

/// Closed-form gross emissions, computed independently of the engine.
pub fn gross_by_formula(catalog: &DataCatalog, workload: &Workload, region: &GridRegion) -> f64 {
    let hw = catalog.lookup_hardware(&workload.hardware_name).unwrap();
    let pue = workload.pue_override.unwrap_or(region.default_pue);
    hw.tdp_watts * workload.utilization * f64::from(workload.device_count) * workload.hours / 1000.0
        * pue
        * region.intensity.value()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
