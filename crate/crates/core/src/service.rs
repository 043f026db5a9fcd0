//! Stateless HTTP JSON API over the engine. Also serves the web UI bundle
//! from a static directory when one is configured.
//!
//! Every response body, including errors, carries the dataset `version`.

use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::QueryRejection;
use axum::extract::{Query, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tower_http::cors::{AllowOrigin, CorsLayer};
use tower_http::services::ServeDir;

use crate::dataset::{DataCatalog, GeoMap, Provider};
use crate::engine::{compare_regions, estimate_emissions, regional_stats, EstimateRequest, Metric, Workload};
use crate::error::Error;
use crate::report::{ComparisonReport, EstimateReport, HardwareReport, ProvidersReport, RegionsReport, StatsReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApiErrorCode {
    NotFound,
    BadRequest,
    RangeError,
    Internal,
}

impl ApiErrorCode {
    pub fn status(self) -> StatusCode {
        match self {
            ApiErrorCode::NotFound => StatusCode::NOT_FOUND,
            ApiErrorCode::BadRequest => StatusCode::BAD_REQUEST,
            ApiErrorCode::RangeError => StatusCode::UNPROCESSABLE_ENTITY,
            ApiErrorCode::Internal => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    pub code: ApiErrorCode,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suggestions: Option<Vec<String>>,
    pub version: String,
}

impl ApiError {
    fn new(code: ApiErrorCode, message: impl Into<String>, version: &str) -> Self {
        ApiError {
            code,
            message: message.into(),
            suggestions: None,
            version: version.to_string(),
        }
    }

    fn bad_request(message: impl Into<String>, version: &str) -> Self {
        ApiError::new(ApiErrorCode::BadRequest, message, version)
    }

    fn from_error(err: &Error, version: &str) -> Self {
        let code = match err {
            Error::NotFound { .. } => ApiErrorCode::NotFound,
            Error::Range { .. } | Error::EmptyComparison => ApiErrorCode::RangeError,
            _ => ApiErrorCode::Internal,
        };
        let mut e = ApiError::new(code, err.to_string(), version);
        if let Error::NotFound { suggestions, .. } = err {
            e.suggestions = Some(suggestions.clone());
        }
        e
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.code.status(), Json(self)).into_response()
    }
}

#[derive(Debug, Clone, Default)]
pub struct ServiceConfig {
    /// Directory holding the built web UI, served under `/`.
    pub static_dir: Option<PathBuf>,
    /// Allowed CORS origin; any origin when unset.
    pub cors_origin: Option<String>,
}

#[derive(Clone)]
struct AppState {
    catalog: Arc<DataCatalog>,
    geo: Arc<GeoMap>,
}

impl AppState {
    fn version(&self) -> &str {
        self.catalog.version()
    }

    fn error(&self, err: Error) -> ApiError {
        ApiError::from_error(&err, self.version())
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

pub fn router(catalog: DataCatalog, geo: GeoMap, config: &ServiceConfig) -> Result<Router, Error> {
    let state = AppState {
        catalog: Arc::new(catalog),
        geo: Arc::new(geo),
    };
    let cors = CorsLayer::new()
        .allow_methods([Method::GET, Method::POST])
        .allow_headers([header::CONTENT_TYPE])
        .allow_origin(match &config.cors_origin {
            Some(origin) => AllowOrigin::exact(
                HeaderValue::from_str(origin).map_err(|_| Error::Config(format!("invalid CORS origin `{origin}`")))?,
            ),
            None => AllowOrigin::any(),
        });

    let api = Router::new()
        .route("/healthz", get(healthz))
        .route("/v1/providers", get(providers))
        .route("/v1/regions", get(regions))
        .route("/v1/hardware", get(hardware))
        .route("/v1/estimate", post(estimate))
        .route("/v1/compare", post(compare))
        .route("/v1/stats", get(stats));

    let app = match &config.static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.route("/", get(index)).fallback(not_found),
    };
    Ok(app.layer(cors).with_state(state))
}

/// Binds `addr` and serves until ctrl-c.
pub async fn serve(addr: &str, app: Router) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

#[derive(Serialize)]
struct Health<'a> {
    status: &'static str,
    version: &'a str,
}

async fn healthz(State(s): State<AppState>) -> Response {
    Json(Health {
        status: "ok",
        version: s.version(),
    })
    .into_response()
}

async fn providers(State(s): State<AppState>) -> Json<ProvidersReport> {
    Json(ProvidersReport::new(&s.catalog))
}

#[derive(Deserialize)]
struct RegionsQuery {
    provider: Option<String>,
}

fn query<T>(s: &AppState, q: Result<Query<T>, QueryRejection>) -> Result<T, ApiError> {
    q.map(|Query(t)| t)
        .map_err(|e| ApiError::bad_request(e.body_text(), s.version()))
}

async fn regions(State(s): State<AppState>, q: Result<Query<RegionsQuery>, QueryRejection>) -> ApiResult<RegionsReport> {
    let q = query(&s, q)?;
    let provider = match q.provider.as_deref() {
        None | Some("") => None,
        Some(p) => Some(p.parse::<Provider>().map_err(|m| ApiError::bad_request(m, s.version()))?),
    };
    Ok(Json(RegionsReport::new(&s.catalog, provider)))
}

#[derive(Deserialize)]
struct HardwareQuery {
    efficiency: Option<String>,
}

async fn hardware(State(s): State<AppState>, q: Result<Query<HardwareQuery>, QueryRejection>) -> ApiResult<HardwareReport> {
    let q = query(&s, q)?;
    let efficiency = match q.efficiency.as_deref() {
        None | Some("false") | Some("0") => false,
        Some("true") | Some("1") | Some("") => true,
        Some(other) => {
            return Err(ApiError::bad_request(
                format!("efficiency must be true or false, got `{other}`"),
                s.version(),
            ))
        }
    };
    Ok(Json(HardwareReport::new(&s.catalog, efficiency)))
}

fn body<T: DeserializeOwned>(s: &AppState, bytes: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(bytes).map_err(|e| ApiError::bad_request(format!("invalid request body: {e}"), s.version()))
}

async fn estimate(State(s): State<AppState>, bytes: Bytes) -> ApiResult<EstimateReport> {
    let request: EstimateRequest = body(&s, &bytes)?;
    let est = estimate_emissions(&s.catalog, &request).map_err(|e| s.error(e))?;
    Ok(Json(EstimateReport::new(&s.catalog, &est)))
}

/// Body of `POST /v1/compare`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompareRequest {
    #[serde(flatten)]
    pub workload: Workload,
    #[serde(default)]
    pub provider: Option<Provider>,
    #[serde(default)]
    pub metric: Metric,
    #[serde(default)]
    pub top: Option<usize>,
}

async fn compare(State(s): State<AppState>, bytes: Bytes) -> ApiResult<ComparisonReport> {
    let req: CompareRequest = body(&s, &bytes)?;
    if req.top == Some(0) {
        return Err(ApiError::bad_request("top must be at least 1", s.version()));
    }
    let cmp = compare_regions(&s.catalog, &req.workload, req.provider, req.metric).map_err(|e| s.error(e))?;
    Ok(Json(ComparisonReport::new(&s.catalog, &req.workload, req.provider, &cmp, req.top)))
}

async fn stats(State(s): State<AppState>) -> ApiResult<StatsReport> {
    let stats = regional_stats(&s.catalog, &s.geo).map_err(|e| s.error(e))?;
    Ok(Json(StatsReport::new(&s.catalog, &stats)))
}

async fn index(State(s): State<AppState>) -> Html<String> {
    Html(format!(
        "<!doctype html><html><head><meta charset=\"utf-8\"><title>mlco2</title></head><body>\
         <h1>ML training emissions API</h1><p>dataset {}</p><ul>\
         <li>GET /v1/providers</li><li>GET /v1/regions?provider=</li>\
         <li>GET /v1/hardware?efficiency=true</li><li>POST /v1/estimate</li>\
         <li>POST /v1/compare</li><li>GET /v1/stats</li><li>GET /healthz</li></ul>\
         <p>Start the service with <code>--static-dir</code> to serve the web UI here.</p></body></html>",
        s.version()
    ))
}

async fn not_found(State(s): State<AppState>) -> ApiError {
    ApiError::new(ApiErrorCode::NotFound, "no such endpoint", s.version())
}
