//! Region and hardware datasets: domain types, CSV ingestion and the
//! validated, immutable [`DataCatalog`].

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const REGIONS_HEADER: [&str; 8] = [
    "provider",
    "region_code",
    "country",
    "city",
    "intensity_gco2_per_kwh",
    "offset_ratio",
    "default_pue",
    "source",
];
pub const HARDWARE_HEADER: [&str; 5] = ["name", "kind", "tdp_watts", "tflops32", "tflops16"];
pub const GEO_HEADER: [&str; 2] = ["country", "geo_region"];

/// Upper sanity bound on grid intensity, gCO2eq/kWh.
pub const MAX_INTENSITY: f64 = 2000.0;

const SHIPPED_REGIONS: &str = include_str!("../data/regions.csv");
const SHIPPED_HARDWARE: &str = include_str!("../data/hardware.csv");
const SHIPPED_GEO: &str = include_str!("../data/geo.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provider {
    Aws,
    Azure,
    Gcp,
}

impl Provider {
    pub const ALL: [Provider; 3] = [Provider::Aws, Provider::Azure, Provider::Gcp];

    pub fn as_str(self) -> &'static str {
        match self {
            Provider::Aws => "aws",
            Provider::Azure => "azure",
            Provider::Gcp => "gcp",
        }
    }
}

impl fmt::Display for Provider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Provider {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "aws" => Ok(Provider::Aws),
            "azure" => Ok(Provider::Azure),
            "gcp" => Ok(Provider::Gcp),
            other => Err(format!("unknown provider `{other}` (expected aws, azure or gcp)")),
        }
    }
}

/// Grid carbon intensity in grams CO2eq per kWh.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct CarbonIntensity(f64);

impl CarbonIntensity {
    pub fn new(value: f64) -> Result<Self, String> {
        if !value.is_finite() || value < 0.0 {
            Err(format!("must be a non-negative number, got {value}"))
        } else if value > MAX_INTENSITY {
            Err(format!("must be at most {MAX_INTENSITY}, got {value}"))
        } else {
            Ok(CarbonIntensity(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for CarbonIntensity {
    type Error = String;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        CarbonIntensity::new(value)
    }
}

impl From<CarbonIntensity> for f64 {
    fn from(c: CarbonIntensity) -> f64 {
        c.0
    }
}

/// One provider region and the grid it is assumed to draw from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRegion {
    pub provider: Provider,
    pub region_code: String,
    pub country: String,
    pub city: String,
    #[serde(rename = "intensity_gco2_per_kwh")]
    pub intensity: CarbonIntensity,
    /// Fraction of gross emissions neutralized by provider RECs/offsets.
    pub offset_ratio: f64,
    pub default_pue: f64,
    pub source: String,
}

impl GridRegion {
    pub fn key(&self) -> String {
        format!("{}/{}", self.provider, self.region_code)
    }

    fn check(&self) -> Result<()> {
        let entity = format!("region {}", self.key());
        if self.region_code.is_empty() {
            return Err(Error::range(entity, "region_code", "must not be empty"));
        }
        if self.region_code.chars().any(|c| c.is_whitespace() || c.is_uppercase()) {
            return Err(Error::range(entity, "region_code", "must be lowercase without whitespace"));
        }
        CarbonIntensity::new(self.intensity.value())
            .map_err(|m| Error::range(entity.clone(), "intensity_gco2_per_kwh", m))?;
        check_offset(self.offset_ratio).map_err(|m| Error::range(entity.clone(), "offset_ratio", m))?;
        check_pue(self.default_pue).map_err(|m| Error::range(entity, "default_pue", m))?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HardwareKind {
    Gpu,
    Tpu,
    Cpu,
    Embedded,
}

impl HardwareKind {
    pub fn as_str(self) -> &'static str {
        match self {
            HardwareKind::Gpu => "gpu",
            HardwareKind::Tpu => "tpu",
            HardwareKind::Cpu => "cpu",
            HardwareKind::Embedded => "embedded",
        }
    }
}

impl fmt::Display for HardwareKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for HardwareKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gpu" => Ok(HardwareKind::Gpu),
            "tpu" => Ok(HardwareKind::Tpu),
            "cpu" => Ok(HardwareKind::Cpu),
            "embedded" => Ok(HardwareKind::Embedded),
            other => Err(format!("unknown hardware kind `{other}`")),
        }
    }
}

/// Rated power and peak throughput of one compute device.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardwareProfile {
    pub name: String,
    pub kind: HardwareKind,
    pub tdp_watts: f64,
    pub tflops32: f64,
    pub tflops16: f64,
}

impl HardwareProfile {
    fn check(&self) -> Result<()> {
        let entity = format!("hardware `{}`", self.name);
        if normalize_hardware_name(&self.name).is_empty() {
            return Err(Error::range(entity, "name", "must not be empty"));
        }
        check_tdp(self.tdp_watts).map_err(|m| Error::range(entity.clone(), "tdp_watts", m))?;
        check_tflops(self.tflops32).map_err(|m| Error::range(entity.clone(), "tflops32", m))?;
        check_tflops(self.tflops16).map_err(|m| Error::range(entity.clone(), "tflops16", m))?;
        if self.tflops32 == 0.0 && self.tflops16 == 0.0 {
            return Err(Error::range(entity, "tflops32/tflops16", "must not both be zero"));
        }
        Ok(())
    }
}

pub(crate) fn check_offset(v: f64) -> Result<(), String> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(format!("must lie in [0, 1], got {v}"))
    }
}

pub(crate) fn check_pue(v: f64) -> Result<(), String> {
    if v.is_finite() && v >= 1.0 {
        Ok(())
    } else {
        Err(format!("must be >= 1.0, got {v}"))
    }
}

pub(crate) fn check_tdp(v: f64) -> Result<(), String> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(format!("must be > 0, got {v}"))
    }
}

pub(crate) fn check_tflops(v: f64) -> Result<(), String> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(format!("must be >= 0, got {v}"))
    }
}

pub fn normalize_region_code(code: &str) -> String {
    code.trim().to_lowercase()
}

/// Lowercase with runs of whitespace collapsed to one space.
pub fn normalize_hardware_name(name: &str) -> String {
    name.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

struct CsvRows<R> {
    file: &'static str,
    reader: csv::Reader<R>,
    header: &'static [&'static str],
}

impl<R: Read> CsvRows<R> {
    fn open(file: &'static str, source: R, header: &'static [&'static str]) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(source);
        let found = reader.headers()?.clone();
        if found.iter().ne(header.iter().copied()) {
            return Err(Error::Header {
                file,
                expected: header.join(","),
                found: found.iter().collect::<Vec<_>>().join(","),
            });
        }
        Ok(CsvRows { file, reader, header })
    }

    /// Calls `f` with (row number, field accessor) for every data row.
    fn for_each(mut self, mut f: impl FnMut(Row<'_>) -> Result<()>) -> Result<()> {
        let mut record = csv::StringRecord::new();
        let mut row = 0;
        while self.reader.read_record(&mut record)? {
            row += 1;
            if record.len() != self.header.len() {
                return Err(Error::Ingest {
                    file: self.file,
                    row,
                    column: "*".into(),
                    message: format!("expected {} columns, found {}", self.header.len(), record.len()),
                });
            }
            f(Row {
                file: self.file,
                row,
                header: self.header,
                record: &record,
            })?;
        }
        Ok(())
    }
}

struct Row<'a> {
    file: &'static str,
    row: usize,
    header: &'static [&'static str],
    record: &'a csv::StringRecord,
}

impl Row<'_> {
    fn error(&self, column: usize, message: impl Into<String>) -> Error {
        Error::Ingest {
            file: self.file,
            row: self.row,
            column: self.header[column].to_string(),
            message: message.into(),
        }
    }

    fn text(&self, column: usize) -> &str {
        &self.record[column]
    }

    fn parse<T: FromStr>(&self, column: usize) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        self.text(column)
            .parse()
            .map_err(|e| self.error(column, format!("`{}`: {e}", self.text(column))))
    }

    fn number(&self, column: usize, check: fn(f64) -> Result<(), String>) -> Result<f64> {
        let v: f64 = self.parse(column)?;
        check(v).map_err(|m| self.error(column, m))?;
        Ok(v)
    }
}

fn finite(v: f64) -> Result<(), String> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(format!("must be finite, got {v}"))
    }
}

/// Parses `regions.csv`.
pub fn load_regions(source: impl Read) -> Result<Vec<GridRegion>> {
    let mut out: Vec<GridRegion> = Vec::new();
    let mut seen = HashMap::new();
    CsvRows::open("regions.csv", source, &REGIONS_HEADER)?.for_each(|row| {
        let provider: Provider = row.parse(0)?;
        let region_code = normalize_region_code(row.text(1));
        if region_code.is_empty() || region_code.contains(char::is_whitespace) {
            return Err(row.error(1, "must be non-empty and contain no whitespace"));
        }
        let intensity = CarbonIntensity::new(row.number(4, finite)?).map_err(|m| row.error(4, m))?;
        let region = GridRegion {
            provider,
            region_code,
            country: row.text(2).to_string(),
            city: row.text(3).to_string(),
            intensity,
            offset_ratio: row.number(5, check_offset)?,
            default_pue: row.number(6, check_pue)?,
            source: row.text(7).to_string(),
        };
        if seen.insert((provider, region.region_code.clone()), row.row).is_some() {
            return Err(Error::DuplicateKey {
                kind: "region",
                key: region.key(),
            });
        }
        out.push(region);
        Ok(())
    })?;
    Ok(out)
}

/// Parses `hardware.csv`.
pub fn load_hardware(source: impl Read) -> Result<Vec<HardwareProfile>> {
    let mut out: Vec<HardwareProfile> = Vec::new();
    let mut seen = HashMap::new();
    CsvRows::open("hardware.csv", source, &HARDWARE_HEADER)?.for_each(|row| {
        let name = row.text(0).split_whitespace().collect::<Vec<_>>().join(" ");
        if name.is_empty() {
            return Err(row.error(0, "must not be empty"));
        }
        let profile = HardwareProfile {
            kind: row.parse(1)?,
            tdp_watts: row.number(2, check_tdp)?,
            tflops32: row.number(3, check_tflops)?,
            tflops16: row.number(4, check_tflops)?,
            name,
        };
        if profile.tflops32 == 0.0 && profile.tflops16 == 0.0 {
            return Err(row.error(3, "tflops32 and tflops16 must not both be zero"));
        }
        if seen.insert(normalize_hardware_name(&profile.name), row.row).is_some() {
            return Err(Error::DuplicateKey {
                kind: "hardware",
                key: profile.name,
            });
        }
        out.push(profile);
        Ok(())
    })?;
    Ok(out)
}

/// Country to geographic bucket, used for per-region intensity statistics.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GeoMap {
    by_country: BTreeMap<String, String>,
}

impl GeoMap {
    pub fn shipped() -> Result<Self> {
        load_geo(SHIPPED_GEO.as_bytes())
    }

    pub fn from_pairs<I, C, G>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (C, G)>,
        C: Into<String>,
        G: Into<String>,
    {
        GeoMap {
            by_country: pairs.into_iter().map(|(c, g)| (c.into(), g.into())).collect(),
        }
    }

    pub fn geo_region(&self, country: &str) -> Option<&str> {
        self.by_country.get(country).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.by_country.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_country.is_empty()
    }
}

/// Parses `geo.csv`.
pub fn load_geo(source: impl Read) -> Result<GeoMap> {
    let mut map = GeoMap::default();
    CsvRows::open("geo.csv", source, &GEO_HEADER)?.for_each(|row| {
        let country = row.text(0).to_string();
        let geo = row.text(1).to_string();
        if country.is_empty() {
            return Err(row.error(0, "must not be empty"));
        }
        if geo.is_empty() {
            return Err(row.error(1, "must not be empty"));
        }
        if map.by_country.insert(country.clone(), geo).is_some() {
            return Err(Error::DuplicateKey {
                kind: "country",
                key: country,
            });
        }
        Ok(())
    })?;
    Ok(map)
}

pub fn write_regions<W: Write>(regions: &[GridRegion], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REGIONS_HEADER)?;
    for r in regions {
        w.write_record([
            r.provider.as_str(),
            &r.region_code,
            &r.country,
            &r.city,
            &r.intensity.value().to_string(),
            &r.offset_ratio.to_string(),
            &r.default_pue.to_string(),
            &r.source,
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_hardware<W: Write>(hardware: &[HardwareProfile], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HARDWARE_HEADER)?;
    for h in hardware {
        w.write_record([
            h.name.as_str(),
            h.kind.as_str(),
            &h.tdp_watts.to_string(),
            &h.tflops32.to_string(),
            &h.tflops16.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Validated, immutable set of regions and hardware.
///
/// Regions are held ordered by (provider, region_code) and hardware by
/// normalized name. The version is a digest of the canonical CSV form, so
/// two catalogs with the same content share a version.
#[derive(Debug, Clone, PartialEq)]
pub struct DataCatalog {
    regions: Vec<GridRegion>,
    hardware: Vec<HardwareProfile>,
    version: String,
    region_index: HashMap<(Provider, String), usize>,
    hardware_index: HashMap<String, usize>,
}

/// Checks every invariant and builds a catalog, or reports the first violation.
pub fn validate_catalog(mut regions: Vec<GridRegion>, mut hardware: Vec<HardwareProfile>) -> Result<DataCatalog> {
    if regions.is_empty() {
        return Err(Error::EmptyCatalog("regions"));
    }
    if hardware.is_empty() {
        return Err(Error::EmptyCatalog("hardware"));
    }

    let mut region_index = HashMap::with_capacity(regions.len());
    for r in &regions {
        r.check()?;
        if region_index.insert((r.provider, r.region_code.clone()), 0).is_some() {
            return Err(Error::DuplicateKey {
                kind: "region",
                key: r.key(),
            });
        }
    }
    let mut hardware_index = HashMap::with_capacity(hardware.len());
    for h in &hardware {
        h.check()?;
        if hardware_index.insert(normalize_hardware_name(&h.name), 0).is_some() {
            return Err(Error::DuplicateKey {
                kind: "hardware",
                key: h.name.clone(),
            });
        }
    }

    regions.sort_by(|a, b| (a.provider, &a.region_code).cmp(&(b.provider, &b.region_code)));
    hardware.sort_by_cached_key(|h| normalize_hardware_name(&h.name));
    for (i, r) in regions.iter().enumerate() {
        region_index.insert((r.provider, r.region_code.clone()), i);
    }
    for (i, h) in hardware.iter().enumerate() {
        hardware_index.insert(normalize_hardware_name(&h.name), i);
    }

    let mut digest = Sha256::new();
    write_regions(&regions, &mut digest_writer(&mut digest))?;
    write_hardware(&hardware, &mut digest_writer(&mut digest))?;
    let hash = digest.finalize();
    let version = format!("data-{}", hex12(&hash));

    Ok(DataCatalog {
        regions,
        hardware,
        version,
        region_index,
        hardware_index,
    })
}

fn hex12(bytes: &[u8]) -> String {
    bytes.iter().take(6).map(|b| format!("{b:02x}")).collect()
}

struct DigestWriter<'a>(&'a mut Sha256);

impl Write for DigestWriter<'_> {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        self.0.update(buf);
        Ok(buf.len())
    }

    fn flush(&mut self) -> std::io::Result<()> {
        Ok(())
    }
}

fn digest_writer(d: &mut Sha256) -> DigestWriter<'_> {
    DigestWriter(d)
}

impl DataCatalog {
    /// The catalog bundled with the crate.
    pub fn shipped() -> Result<Self> {
        validate_catalog(
            load_regions(SHIPPED_REGIONS.as_bytes())?,
            load_hardware(SHIPPED_HARDWARE.as_bytes())?,
        )
    }

    /// Loads `regions.csv` and `hardware.csv` from disk.
    pub fn from_files(regions: impl AsRef<Path>, hardware: impl AsRef<Path>) -> Result<Self> {
        let regions = load_regions(std::fs::File::open(regions)?)?;
        let hardware = load_hardware(std::fs::File::open(hardware)?)?;
        validate_catalog(regions, hardware)
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn regions(&self) -> &[GridRegion] {
        &self.regions
    }

    pub fn hardware(&self) -> &[HardwareProfile] {
        &self.hardware
    }

    pub fn lookup_region(&self, provider: Provider, region_code: &str) -> Result<&GridRegion> {
        let code = normalize_region_code(region_code);
        match self.region_index.get(&(provider, code.clone())) {
            Some(&i) => Ok(&self.regions[i]),
            None => Err(Error::NotFound {
                kind: "region",
                key: format!("{provider}/{code}"),
                suggestions: suggest(&code, self.list_regions(Some(provider)).map(|r| r.region_code.as_str())),
            }),
        }
    }

    pub fn lookup_hardware(&self, name: &str) -> Result<&HardwareProfile> {
        let key = normalize_hardware_name(name);
        match self.hardware_index.get(&key) {
            Some(&i) => Ok(&self.hardware[i]),
            None => {
                let names: Vec<(String, &str)> = self
                    .hardware
                    .iter()
                    .map(|h| (normalize_hardware_name(&h.name), h.name.as_str()))
                    .collect();
                let picked = suggest(&key, names.iter().map(|(n, _)| n.as_str()));
                let suggestions = picked
                    .iter()
                    .filter_map(|p| names.iter().find(|(n, _)| n == p).map(|(_, orig)| orig.to_string()))
                    .collect();
                Err(Error::NotFound {
                    kind: "hardware",
                    key: name.trim().to_string(),
                    suggestions,
                })
            }
        }
    }

    /// Regions ordered by (provider, region_code), optionally for one provider.
    pub fn list_regions(&self, provider: Option<Provider>) -> impl Iterator<Item = &GridRegion> + '_ {
        self.regions
            .iter()
            .filter(move |r| provider.is_none_or(|p| r.provider == p))
    }

    /// Hardware ordered by normalized name.
    pub fn list_hardware(&self) -> &[HardwareProfile] {
        &self.hardware
    }

    pub fn to_regions_csv(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        write_regions(&self.regions, &mut buf)?;
        Ok(buf)
    }

    pub fn to_hardware_csv(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        write_hardware(&self.hardware, &mut buf)?;
        Ok(buf)
    }
}

const MAX_SUGGESTIONS: usize = 5;

/// Candidates sharing the longest common prefix with `query`; when nothing
/// shares more than one leading character, the closest by edit distance.
fn suggest<'a>(query: &str, candidates: impl Iterator<Item = &'a str>) -> Vec<String> {
    let candidates: Vec<&str> = candidates.collect();
    let prefix_len = |c: &str| query.chars().zip(c.chars()).take_while(|(a, b)| a == b).count();
    let best = candidates.iter().map(|c| prefix_len(c)).max().unwrap_or(0);
    let mut picked: Vec<&str> = if best >= 2 {
        candidates.iter().copied().filter(|c| prefix_len(c) == best).collect()
    } else {
        let mut by_distance: Vec<(usize, &str)> = candidates
            .iter()
            .map(|c| (strsim::levenshtein(query, c), *c))
            .collect();
        by_distance.sort();
        let limit = query.chars().count().max(3);
        by_distance
            .into_iter()
            .filter(|(d, _)| *d <= limit)
            .take(3)
            .map(|(_, c)| c)
            .collect()
    };
    picked.sort();
    picked.truncate(MAX_SUGGESTIONS);
    picked.into_iter().map(String::from).collect()
}
