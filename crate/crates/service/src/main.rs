use std::path::PathBuf;
use std::sync::Arc;

use clap::Parser;
use graphview_service::{router, Config, Store};

#[derive(Parser)]
#[command(version, about = "Serve graph view sessions over HTTP")]
struct Args {
    /// TOML configuration file; GRAPHVIEW_* variables override it.
    #[arg(long, env = "GRAPHVIEW_CONFIG")]
    config: Option<PathBuf>,
}

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    tracing_subscriber::fmt().with_writer(std::io::stderr).init();
    let args = Args::parse();
    let config = Config::load(args.config.as_deref())?;
    let bind = config.bind.clone();
    let store = Arc::new(Store::open(config)?);
    let listener = tokio::net::TcpListener::bind(&bind).await?;
    tracing::info!(address = %listener.local_addr()?, "listening");
    axum::serve(listener, router(store))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
