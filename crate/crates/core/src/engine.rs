//! The estimation pipeline: energy drawn, gross and offset-adjusted
//! emissions, hardware efficiency, region comparison and per-bucket
//! intensity statistics. Everything here is a pure function of its inputs.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::{check_pue, DataCatalog, GeoMap, GridRegion, HardwareProfile, Provider};
use crate::error::{Error, Result};

fn default_count() -> u32 {
    1
}

fn default_utilization() -> f64 {
    1.0
}

/// A training run: which device, how many, for how long, and where.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRequest {
    pub hardware_name: String,
    #[serde(default = "default_count")]
    pub device_count: u32,
    pub hours: f64,
    pub provider: Provider,
    pub region_code: String,
    #[serde(default)]
    pub pue_override: Option<f64>,
    /// Fraction of TDP actually drawn.
    #[serde(default = "default_utilization")]
    pub utilization: f64,
}

impl EstimateRequest {
    pub fn new(
        hardware_name: impl Into<String>,
        device_count: u32,
        hours: f64,
        provider: Provider,
        region_code: impl Into<String>,
    ) -> Self {
        EstimateRequest {
            hardware_name: hardware_name.into(),
            device_count,
            hours,
            provider,
            region_code: region_code.into(),
            pue_override: None,
            utilization: 1.0,
        }
    }

    pub fn with_pue(mut self, pue: f64) -> Self {
        self.pue_override = Some(pue);
        self
    }

    pub fn with_utilization(mut self, utilization: f64) -> Self {
        self.utilization = utilization;
        self
    }

    pub fn workload(&self) -> Workload {
        Workload {
            hardware_name: self.hardware_name.clone(),
            device_count: self.device_count,
            hours: self.hours,
            pue_override: self.pue_override,
            utilization: self.utilization,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.workload().validate()
    }
}

/// An [`EstimateRequest`] without a location, as used by region comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Workload {
    pub hardware_name: String,
    #[serde(default = "default_count")]
    pub device_count: u32,
    pub hours: f64,
    #[serde(default)]
    pub pue_override: Option<f64>,
    #[serde(default = "default_utilization")]
    pub utilization: f64,
}

impl Workload {
    pub fn new(hardware_name: impl Into<String>, device_count: u32, hours: f64) -> Self {
        Workload {
            hardware_name: hardware_name.into(),
            device_count,
            hours,
            pue_override: None,
            utilization: 1.0,
        }
    }

    pub fn with_pue(mut self, pue: f64) -> Self {
        self.pue_override = Some(pue);
        self
    }

    pub fn at(&self, provider: Provider, region_code: impl Into<String>) -> EstimateRequest {
        EstimateRequest {
            hardware_name: self.hardware_name.clone(),
            device_count: self.device_count,
            hours: self.hours,
            provider,
            region_code: region_code.into(),
            pue_override: self.pue_override,
            utilization: self.utilization,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_run(self.device_count, self.hours, self.utilization)?;
        if let Some(pue) = self.pue_override {
            check_pue(pue).map_err(|m| Error::range("request", "pue_override", m))?;
        }
        Ok(())
    }
}

fn check_run(device_count: u32, hours: f64, utilization: f64) -> Result<()> {
    if device_count == 0 {
        return Err(Error::range("request", "device_count", "must be at least 1"));
    }
    if !(hours.is_finite() && hours > 0.0) {
        return Err(Error::range("request", "hours", format!("must be > 0, got {hours}")));
    }
    if !(utilization > 0.0 && utilization <= 1.0) {
        return Err(Error::range(
            "request",
            "utilization",
            format!("must lie in (0, 1], got {utilization}"),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub device_kwh: f64,
    /// Cooling, power conversion and other datacenter overhead.
    pub overhead_kwh: f64,
    pub total_kwh: f64,
}

/// Energy drawn by `device_count` devices at `utilization` of TDP for
/// `hours`, scaled by the datacenter PUE.
pub fn compute_energy(
    profile: &HardwareProfile,
    device_count: u32,
    hours: f64,
    pue: f64,
    utilization: f64,
) -> Result<EnergyBreakdown> {
    check_run(device_count, hours, utilization)?;
    check_pue(pue).map_err(|m| Error::range("request", "pue", m))?;
    let device_kwh = profile.tdp_watts * utilization * f64::from(device_count) * hours / 1000.0;
    let overhead_kwh = device_kwh * (pue - 1.0);
    Ok(EnergyBreakdown {
        device_kwh,
        overhead_kwh,
        total_kwh: device_kwh + overhead_kwh,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmissionsEstimate {
    pub request: EstimateRequest,
    pub region: GridRegion,
    pub hardware: HardwareProfile,
    /// PUE actually applied: the override if given, else the region default.
    pub pue: f64,
    pub energy: EnergyBreakdown,
    pub gross_gco2eq: f64,
    pub offset_gco2eq: f64,
    pub net_gco2eq: f64,
}

impl EmissionsEstimate {
    pub fn metric(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Gross => self.gross_gco2eq,
            Metric::Net => self.net_gco2eq,
        }
    }
}

pub fn estimate_emissions(catalog: &DataCatalog, request: &EstimateRequest) -> Result<EmissionsEstimate> {
    request.validate()?;
    let hardware = catalog.lookup_hardware(&request.hardware_name)?;
    let region = catalog.lookup_region(request.provider, &request.region_code)?;
    estimate_resolved(request, hardware, region)
}

fn estimate_resolved(
    request: &EstimateRequest,
    hardware: &HardwareProfile,
    region: &GridRegion,
) -> Result<EmissionsEstimate> {
    let pue = request.pue_override.unwrap_or(region.default_pue);
    let energy = compute_energy(hardware, request.device_count, request.hours, pue, request.utilization)?;
    let gross = energy.total_kwh * region.intensity.value();
    let offset = gross * region.offset_ratio;
    Ok(EmissionsEstimate {
        request: request.clone(),
        region: region.clone(),
        hardware: hardware.clone(),
        pue,
        energy,
        gross_gco2eq: gross,
        offset_gco2eq: offset,
        net_gco2eq: gross - offset,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    pub hardware: HardwareProfile,
    pub gflops32_per_watt: f64,
    pub gflops16_per_watt: f64,
}

/// Theoretical peak throughput per watt of TDP.
pub fn hardware_efficiency(profile: &HardwareProfile) -> EfficiencyReport {
    EfficiencyReport {
        hardware: profile.clone(),
        gflops32_per_watt: profile.tflops32 * 1000.0 / profile.tdp_watts,
        gflops16_per_watt: profile.tflops16 * 1000.0 / profile.tdp_watts,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Gross,
    Net,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Gross => "gross",
            Metric::Net => "net",
        }
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gross" => Ok(Metric::Gross),
            "net" => Ok(Metric::Net),
            other => Err(format!("unknown metric `{other}` (expected gross or net)")),
        }
    }
}

/// One workload estimated in every eligible region, best first.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub metric: Metric,
    pub entries: Vec<EmissionsEstimate>,
    /// Worst over best for `metric`; `None` when the best is zero.
    pub ratio: Option<f64>,
}

impl Comparison {
    pub fn best(&self) -> &EmissionsEstimate {
        &self.entries[0]
    }

    pub fn worst(&self) -> &EmissionsEstimate {
        &self.entries[self.entries.len() - 1]
    }
}

/// Total order used to rank regions: metric ascending, then (provider, region_code).
pub fn rank_order(metric: Metric, a: &EmissionsEstimate, b: &EmissionsEstimate) -> Ordering {
    a.metric(metric)
        .total_cmp(&b.metric(metric))
        .then_with(|| (a.region.provider, &a.region.region_code).cmp(&(b.region.provider, &b.region.region_code)))
}

pub fn compare_regions(
    catalog: &DataCatalog,
    workload: &Workload,
    provider: Option<Provider>,
    metric: Metric,
) -> Result<Comparison> {
    workload.validate()?;
    let hardware = catalog.lookup_hardware(&workload.hardware_name)?;
    let mut entries = catalog
        .list_regions(provider)
        .map(|region| estimate_resolved(&workload.at(region.provider, &region.region_code), hardware, region))
        .collect::<Result<Vec<_>>>()?;
    if entries.is_empty() {
        return Err(Error::EmptyComparison);
    }
    entries.sort_by(|a, b| rank_order(metric, a, b));
    let best = entries[0].metric(metric);
    let worst = entries[entries.len() - 1].metric(metric);
    let ratio = (best > 0.0).then(|| worst / best);
    Ok(Comparison { metric, entries, ratio })
}

/// Intensity spread within one geographic bucket, gCO2eq/kWh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionalStats {
    pub geo_region: String,
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub median: f64,
}

/// Per-bucket statistics over every catalog row, ordered by bucket name.
/// A city served by several providers counts once per row.
pub fn regional_stats(catalog: &DataCatalog, geo: &GeoMap) -> Result<Vec<RegionalStats>> {
    let mut buckets: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for region in catalog.regions() {
        let bucket = geo
            .geo_region(&region.country)
            .ok_or_else(|| Error::Config(format!("country `{}` has no geo_region mapping", region.country)))?;
        buckets.entry(bucket).or_default().push(region.intensity.value());
    }
    Ok(buckets
        .into_iter()
        .map(|(name, mut values)| {
            values.sort_by(f64::total_cmp);
            let n = values.len();
            let median = if n % 2 == 1 {
                values[n / 2]
            } else {
                (values[n / 2 - 1] + values[n / 2]) / 2.0
            };
            RegionalStats {
                geo_region: name.to_string(),
                count: n,
                min: values[0],
                max: values[n - 1],
                mean: values.iter().sum::<f64>() / n as f64,
                median,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceFactor {
    pub label: String,
    pub grams_per_unit: f64,
}

impl EquivalenceFactor {
    pub fn new(label: impl Into<String>, grams_per_unit: f64) -> Self {
        EquivalenceFactor {
            label: label.into(),
            grams_per_unit,
        }
    }
}

/// Expresses `net_gco2eq` in the units of each factor.
pub fn equivalence(net_gco2eq: f64, factors: &[EquivalenceFactor]) -> Result<Vec<(String, f64)>> {
    factors
        .iter()
        .map(|f| {
            if f.grams_per_unit.is_finite() && f.grams_per_unit > 0.0 {
                Ok((f.label.clone(), net_gco2eq / f.grams_per_unit))
            } else {
                Err(Error::Config(format!(
                    "equivalence factor `{}` must be positive, got {}",
                    f.label, f.grams_per_unit
                )))
            }
        })
        .collect()
}
