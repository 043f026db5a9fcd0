//! Start the JSON API on an ephemeral port, query it, and shut down.
//! `mlco2 serve` runs the same router in the foreground.
//!
//! Run with: cargo run -p mlco2 --example http_service

use mlco2::service::{router, ServiceConfig};
use mlco2::{DataCatalog, GeoMap};
use tokio::io::{AsyncReadExt, AsyncWriteExt};
use tokio::net::{TcpListener, TcpStream};

async fn request(addr: std::net::SocketAddr, method: &str, path: &str, body: &str) -> std::io::Result<String> {
    let mut stream = TcpStream::connect(addr).await?;
    let head = format!(
        "{method} {path} HTTP/1.1\r\nHost: localhost\r\nContent-Type: application/json\r\n\
         Content-Length: {}\r\nConnection: close\r\n\r\n",
        body.len()
    );
    stream.write_all(head.as_bytes()).await?;
    stream.write_all(body.as_bytes()).await?;
    let mut response = String::new();
    stream.read_to_string(&mut response).await?;
    Ok(response.split("\r\n\r\n").nth(1).unwrap_or_default().to_string())
}

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let app = router(DataCatalog::shipped()?, GeoMap::shipped()?, &ServiceConfig::default())?;
    let listener = TcpListener::bind("127.0.0.1:0").await?;
    let addr = listener.local_addr()?;
    let server = tokio::spawn(async move { axum::serve(listener, app).await });

    println!("GET /healthz\n{}\n", request(addr, "GET", "/healthz", "").await?);

    let body = r#"{"hardware_name":"Tesla V100","device_count":1,"hours":100,
                   "provider":"aws","region_code":"ca-central-1","pue_override":1.0}"#;
    let estimate: serde_json::Value = serde_json::from_str(&request(addr, "POST", "/v1/estimate", body).await?)?;
    println!(
        "POST /v1/estimate -> gross {} g, net {} g",
        estimate["gross_gco2eq"], estimate["net_gco2eq"]
    );

    let missing = body.replace("ca-central-1", "qc-central-9");
    println!("POST /v1/estimate (typo) -> {}", request(addr, "POST", "/v1/estimate", &missing).await?);

    server.abort();
    Ok(())
}
