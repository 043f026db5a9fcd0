//! Serializable, rounded views of engine results shared by the CLI and the
//! HTTP service, plus their text and CSV renderings.
//!
//! Internal arithmetic keeps full precision; only these views round.
//! Grams are reported to 1 decimal, kilograms and kWh to 3, ratios and
//! GFLOPS/W to 2.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dataset::{DataCatalog, GridRegion, HardwareKind, HardwareProfile, Provider};
use crate::engine::{
    hardware_efficiency, Comparison, EmissionsEstimate, EnergyBreakdown, EstimateRequest, Metric, RegionalStats,
    Workload,
};
use crate::error::Result;

pub fn round_to(value: f64, places: i32) -> f64 {
    let scale = 10f64.powi(places);
    let r = (value * scale).round() / scale;
    // keep -0.0 out of reports
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn grams(v: f64) -> f64 {
    round_to(v, 1)
}

fn kilograms(v: f64) -> f64 {
    round_to(v / 1000.0, 3)
}

fn kwh(v: f64) -> f64 {
    round_to(v, 3)
}

fn ratio(v: f64) -> f64 {
    round_to(v, 2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Emissions {
    pub gross_gco2eq: f64,
    pub offset_gco2eq: f64,
    pub net_gco2eq: f64,
    pub gross_kgco2eq: f64,
    pub offset_kgco2eq: f64,
    pub net_kgco2eq: f64,
}

impl Emissions {
    fn of(e: &EmissionsEstimate) -> Self {
        Emissions {
            gross_gco2eq: grams(e.gross_gco2eq),
            offset_gco2eq: grams(e.offset_gco2eq),
            net_gco2eq: grams(e.net_gco2eq),
            gross_kgco2eq: kilograms(e.gross_gco2eq),
            offset_kgco2eq: kilograms(e.offset_gco2eq),
            net_kgco2eq: kilograms(e.net_gco2eq),
        }
    }
}

fn energy(e: &EnergyBreakdown) -> EnergyBreakdown {
    EnergyBreakdown {
        device_kwh: kwh(e.device_kwh),
        overhead_kwh: kwh(e.overhead_kwh),
        total_kwh: kwh(e.total_kwh),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub version: String,
    pub request: EstimateRequest,
    pub region: GridRegion,
    pub hardware: HardwareProfile,
    pub pue: f64,
    pub energy: EnergyBreakdown,
    #[serde(flatten)]
    pub emissions: Emissions,
}

impl EstimateReport {
    pub fn new(catalog: &DataCatalog, e: &EmissionsEstimate) -> Self {
        EstimateReport {
            version: catalog.version().to_string(),
            request: e.request.clone(),
            region: e.region.clone(),
            hardware: e.hardware.clone(),
            pue: e.pue,
            energy: energy(&e.energy),
            emissions: Emissions::of(e),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedRegion {
    pub rank: usize,
    pub region: GridRegion,
    pub pue: f64,
    pub energy: EnergyBreakdown,
    #[serde(flatten)]
    pub emissions: Emissions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionRef {
    pub provider: Provider,
    pub region_code: String,
}

impl RegionRef {
    fn of(r: &GridRegion) -> Self {
        RegionRef {
            provider: r.provider,
            region_code: r.region_code.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub version: String,
    pub metric: Metric,
    pub workload: Workload,
    pub provider: Option<Provider>,
    /// Regions compared; `entries` may be cut short by a top-N limit.
    pub region_count: usize,
    pub best: RegionRef,
    pub worst: RegionRef,
    /// Worst over best for `metric`, or null when the best value is zero.
    pub ratio: Option<f64>,
    pub entries: Vec<RankedRegion>,
}

impl ComparisonReport {
    pub fn new(
        catalog: &DataCatalog,
        workload: &Workload,
        provider: Option<Provider>,
        cmp: &Comparison,
        top: Option<usize>,
    ) -> Self {
        let limit = top.unwrap_or(usize::MAX);
        ComparisonReport {
            version: catalog.version().to_string(),
            metric: cmp.metric,
            workload: workload.clone(),
            provider,
            region_count: cmp.entries.len(),
            best: RegionRef::of(&cmp.best().region),
            worst: RegionRef::of(&cmp.worst().region),
            ratio: cmp.ratio.map(ratio),
            entries: cmp
                .entries
                .iter()
                .take(limit)
                .enumerate()
                .map(|(i, e)| RankedRegion {
                    rank: i + 1,
                    region: e.region.clone(),
                    pue: e.pue,
                    energy: energy(&e.energy),
                    emissions: Emissions::of(e),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardwareRow {
    pub name: String,
    pub kind: HardwareKind,
    pub tdp_watts: f64,
    pub tflops32: f64,
    pub tflops16: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gflops32_per_watt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gflops16_per_watt: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardwareReport {
    pub version: String,
    pub hardware: Vec<HardwareRow>,
}

impl HardwareReport {
    pub fn new(catalog: &DataCatalog, efficiency: bool) -> Self {
        let hardware = catalog
            .list_hardware()
            .iter()
            .map(|h| {
                let eff = efficiency.then(|| hardware_efficiency(h));
                HardwareRow {
                    name: h.name.clone(),
                    kind: h.kind,
                    tdp_watts: h.tdp_watts,
                    tflops32: h.tflops32,
                    tflops16: h.tflops16,
                    gflops32_per_watt: eff.as_ref().map(|r| ratio(r.gflops32_per_watt)),
                    gflops16_per_watt: eff.as_ref().map(|r| ratio(r.gflops16_per_watt)),
                }
            })
            .collect();
        HardwareReport {
            version: catalog.version().to_string(),
            hardware,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionsReport {
    pub version: String,
    pub regions: Vec<GridRegion>,
}

impl RegionsReport {
    pub fn new(catalog: &DataCatalog, provider: Option<Provider>) -> Self {
        RegionsReport {
            version: catalog.version().to_string(),
            regions: catalog.list_regions(provider).cloned().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderSummary {
    pub provider: Provider,
    pub region_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProvidersReport {
    pub version: String,
    pub providers: Vec<ProviderSummary>,
}

impl ProvidersReport {
    pub fn new(catalog: &DataCatalog) -> Self {
        ProvidersReport {
            version: catalog.version().to_string(),
            providers: Provider::ALL
                .iter()
                .map(|&p| ProviderSummary {
                    provider: p,
                    region_count: catalog.list_regions(Some(p)).count(),
                })
                .filter(|s| s.region_count > 0)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsRow {
    pub geo_region: String,
    pub count: usize,
    pub min_gco2_per_kwh: f64,
    pub max_gco2_per_kwh: f64,
    pub mean_gco2_per_kwh: f64,
    pub median_gco2_per_kwh: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub version: String,
    pub stats: Vec<StatsRow>,
}

impl StatsReport {
    pub fn new(catalog: &DataCatalog, stats: &[RegionalStats]) -> Self {
        StatsReport {
            version: catalog.version().to_string(),
            stats: stats
                .iter()
                .map(|s| StatsRow {
                    geo_region: s.geo_region.clone(),
                    count: s.count,
                    min_gco2_per_kwh: s.min,
                    max_gco2_per_kwh: s.max,
                    mean_gco2_per_kwh: round_to(s.mean, 1),
                    median_gco2_per_kwh: round_to(s.median, 1),
                })
                .collect(),
        }
    }
}

/// Text and CSV renderings; JSON goes through serde.
pub trait Render: Serialize {
    fn text(&self) -> String;
    fn csv(&self) -> Result<String>;

    fn json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

impl Render for EstimateReport {
    fn text(&self) -> String {
        let r = &self.request;
        let e = &self.emissions;
        let mut s = String::new();
        let _ = writeln!(s, "dataset    {}", self.version);
        let _ = writeln!(
            s,
            "hardware   {} x{} ({} W TDP, utilization {})",
            self.hardware.name, r.device_count, self.hardware.tdp_watts, r.utilization
        );
        let _ = writeln!(
            s,
            "region     {}/{} ({}, {}), {} gCO2eq/kWh, offset ratio {}",
            self.region.provider,
            self.region.region_code,
            self.region.city,
            self.region.country,
            self.region.intensity.value(),
            self.region.offset_ratio
        );
        let _ = writeln!(s, "hours      {}", r.hours);
        let _ = writeln!(s, "pue        {}", self.pue);
        let _ = writeln!(
            s,
            "energy     {:.3} kWh (device {:.3} + overhead {:.3})",
            self.energy.total_kwh, self.energy.device_kwh, self.energy.overhead_kwh
        );
        let _ = writeln!(s, "gross      {:.1} gCO2eq ({:.3} kg)", e.gross_gco2eq, e.gross_kgco2eq);
        let _ = writeln!(s, "offset     {:.1} gCO2eq ({:.3} kg)", e.offset_gco2eq, e.offset_kgco2eq);
        let _ = writeln!(s, "net        {:.1} gCO2eq ({:.3} kg)", e.net_gco2eq, e.net_kgco2eq);
        s
    }

    fn csv(&self) -> Result<String> {
        let r = &self.request;
        let e = &self.emissions;
        csv_string(
            &[
                "version",
                "provider",
                "region_code",
                "hardware_name",
                "device_count",
                "hours",
                "pue",
                "utilization",
                "intensity_gco2_per_kwh",
                "offset_ratio",
                "device_kwh",
                "overhead_kwh",
                "total_kwh",
                "gross_gco2eq",
                "offset_gco2eq",
                "net_gco2eq",
            ],
            [vec![
                self.version.clone(),
                self.region.provider.to_string(),
                self.region.region_code.clone(),
                self.hardware.name.clone(),
                r.device_count.to_string(),
                r.hours.to_string(),
                self.pue.to_string(),
                r.utilization.to_string(),
                self.region.intensity.value().to_string(),
                self.region.offset_ratio.to_string(),
                self.energy.device_kwh.to_string(),
                self.energy.overhead_kwh.to_string(),
                self.energy.total_kwh.to_string(),
                e.gross_gco2eq.to_string(),
                e.offset_gco2eq.to_string(),
                e.net_gco2eq.to_string(),
            ]],
        )
    }
}

impl Render for ComparisonReport {
    fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:>4}  {:<8} {:<24} {:<16} {:>9} {:>12} {:>14} {:>14}",
            "rank", "provider", "region", "country", "g/kWh", "kWh", "gross g", "net g"
        );
        for e in &self.entries {
            let _ = writeln!(
                s,
                "{:>4}  {:<8} {:<24} {:<16} {:>9} {:>12.3} {:>14.1} {:>14.1}",
                e.rank,
                e.region.provider.as_str(),
                e.region.region_code,
                e.region.country,
                e.region.intensity.value(),
                e.energy.total_kwh,
                e.emissions.gross_gco2eq,
                e.emissions.net_gco2eq
            );
        }
        let ratio = self.ratio.map(|r| format!("{r:.2}")).unwrap_or_else(|| "undefined".into());
        let _ = writeln!(
            s,
            "{} of {} regions; best {}/{}, worst {}/{}, worst/best {} ratio: {}",
            self.entries.len(),
            self.region_count,
            self.best.provider,
            self.best.region_code,
            self.worst.provider,
            self.worst.region_code,
            self.metric.as_str(),
            ratio
        );
        s
    }

    fn csv(&self) -> Result<String> {
        csv_string(
            &[
                "rank",
                "provider",
                "region_code",
                "country",
                "city",
                "intensity_gco2_per_kwh",
                "offset_ratio",
                "pue",
                "total_kwh",
                "gross_gco2eq",
                "offset_gco2eq",
                "net_gco2eq",
            ],
            self.entries.iter().map(|e| {
                vec![
                    e.rank.to_string(),
                    e.region.provider.to_string(),
                    e.region.region_code.clone(),
                    e.region.country.clone(),
                    e.region.city.clone(),
                    e.region.intensity.value().to_string(),
                    e.region.offset_ratio.to_string(),
                    e.pue.to_string(),
                    e.energy.total_kwh.to_string(),
                    e.emissions.gross_gco2eq.to_string(),
                    e.emissions.offset_gco2eq.to_string(),
                    e.emissions.net_gco2eq.to_string(),
                ]
            }),
        )
    }
}

impl Render for HardwareReport {
    fn text(&self) -> String {
        let efficiency = self.hardware.iter().any(|h| h.gflops32_per_watt.is_some());
        let mut s = String::new();
        let _ = write!(s, "{:<20} {:<9} {:>7} {:>9} {:>9}", "name", "kind", "TDP W", "TFLOPS32", "TFLOPS16");
        if efficiency {
            let _ = write!(s, " {:>11} {:>11}", "GFLOPS32/W", "GFLOPS16/W");
        }
        s.push('\n');
        for h in &self.hardware {
            let _ = write!(
                s,
                "{:<20} {:<9} {:>7} {:>9.2} {:>9.2}",
                h.name,
                h.kind.as_str(),
                h.tdp_watts,
                h.tflops32,
                h.tflops16
            );
            if let (Some(a), Some(b)) = (h.gflops32_per_watt, h.gflops16_per_watt) {
                let _ = write!(s, " {a:>11.2} {b:>11.2}");
            }
            s.push('\n');
        }
        s
    }

    fn csv(&self) -> Result<String> {
        let efficiency = self.hardware.iter().any(|h| h.gflops32_per_watt.is_some());
        let mut header = vec!["name", "kind", "tdp_watts", "tflops32", "tflops16"];
        if efficiency {
            header.extend(["gflops32_per_watt", "gflops16_per_watt"]);
        }
        csv_string(
            &header,
            self.hardware.iter().map(|h| {
                let mut row = vec![
                    h.name.clone(),
                    h.kind.to_string(),
                    h.tdp_watts.to_string(),
                    h.tflops32.to_string(),
                    h.tflops16.to_string(),
                ];
                if efficiency {
                    row.push(opt(h.gflops32_per_watt));
                    row.push(opt(h.gflops16_per_watt));
                }
                row
            }),
        )
    }
}

impl Render for RegionsReport {
    fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<8} {:<24} {:<16} {:<20} {:>9} {:>7} {:>5}",
            "provider", "region", "country", "city", "g/kWh", "offset", "pue"
        );
        for r in &self.regions {
            let _ = writeln!(
                s,
                "{:<8} {:<24} {:<16} {:<20} {:>9} {:>7} {:>5}",
                r.provider.as_str(),
                r.region_code,
                r.country,
                r.city,
                r.intensity.value(),
                r.offset_ratio,
                r.default_pue
            );
        }
        s
    }

    fn csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        crate::dataset::write_regions(&self.regions, &mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

impl Render for StatsReport {
    fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<16} {:>5} {:>8} {:>8} {:>8} {:>8}",
            "geo_region", "count", "min", "median", "mean", "max"
        );
        for r in &self.stats {
            let _ = writeln!(
                s,
                "{:<16} {:>5} {:>8.1} {:>8.1} {:>8.1} {:>8.1}",
                r.geo_region,
                r.count,
                r.min_gco2_per_kwh,
                r.median_gco2_per_kwh,
                r.mean_gco2_per_kwh,
                r.max_gco2_per_kwh
            );
        }
        s
    }

    fn csv(&self) -> Result<String> {
        csv_string(
            &[
                "geo_region",
                "count",
                "min_gco2_per_kwh",
                "median_gco2_per_kwh",
                "mean_gco2_per_kwh",
                "max_gco2_per_kwh",
            ],
            self.stats.iter().map(|r| {
                vec![
                    r.geo_region.clone(),
                    r.count.to_string(),
                    r.min_gco2_per_kwh.to_string(),
                    r.median_gco2_per_kwh.to_string(),
                    r.mean_gco2_per_kwh.to_string(),
                    r.max_gco2_per_kwh.to_string(),
                ]
            }),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{compare_regions, estimate_emissions};

    #[test]
    fn rounding_policy() {
        assert_eq!(round_to(22_097.999_999_999_996, 1), 22_098.0);
        assert_eq!(round_to(0.045_67, 3), 0.046);
        assert_eq!(round_to(-0.000_01, 2).to_bits(), 0.0f64.to_bits());
        assert_eq!(kilograms(725_760.0), 725.76);
        assert_eq!(ratio(10.357_142), 10.36);
    }

    #[test]
    fn estimate_report_keys_carry_units() {
        let cat = DataCatalog::shipped().unwrap();
        let req = EstimateRequest::new("Tesla V100", 1, 100.0, Provider::Aws, "ca-central-1").with_pue(1.0);
        let report = EstimateReport::new(&cat, &estimate_emissions(&cat, &req).unwrap());
        let v: serde_json::Value = serde_json::from_str(&report.json()).unwrap();
        for key in ["gross_gco2eq", "offset_gco2eq", "net_gco2eq", "gross_kgco2eq", "version", "pue"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["energy"]["total_kwh"], 30.0);
        assert_eq!(v["region"]["intensity_gco2_per_kwh"], 20.0);
        assert_eq!(v["gross_gco2eq"], 600.0);
        assert_eq!(v["net_gco2eq"], v["gross_gco2eq"]);
        assert!(report.text().contains("gross      600.0 gCO2eq"));

        let back: EstimateReport = serde_json::from_value(v).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn csv_has_header() {
        let cat = DataCatalog::shipped().unwrap();
        let w = Workload::new("Tesla V100", 1, 10.0);
        let cmp = compare_regions(&cat, &w, Some(Provider::Gcp), Metric::Gross).unwrap();
        let report = ComparisonReport::new(&cat, &w, Some(Provider::Gcp), &cmp, Some(3));
        let csv = report.csv().unwrap();
        let lines: Vec<_> = csv.lines().collect();
        assert!(lines[0].starts_with("rank,provider,region_code"));
        assert_eq!(lines.len(), 4);
        assert_eq!(report.region_count, 20);
        assert!(lines[1].contains("europe-west6"));
    }

    #[test]
    fn hardware_efficiency_columns() {
        let cat = DataCatalog::shipped().unwrap();
        let plain = HardwareReport::new(&cat, false);
        assert!(plain.hardware.iter().all(|h| h.gflops32_per_watt.is_none()));
        assert!(!plain.json().contains("gflops32_per_watt"));
        let eff = HardwareReport::new(&cat, true);
        let xavier = eff.hardware.iter().find(|h| h.name == "AGX Xavier").unwrap();
        assert_eq!(xavier.gflops32_per_watt, Some(533.33));
        assert_eq!(xavier.gflops16_per_watt, Some(1066.67));
        assert!(eff.text().contains("533.33"));
        assert!(eff.csv().unwrap().lines().next().unwrap().ends_with("gflops16_per_watt"));
    }
}
