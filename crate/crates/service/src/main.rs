use std::sync::Arc;

use crowdval_service::store::Store;
use crowdval_service::{app, system_clock, AppState, Config, Platform};

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = Config::from_env()?;
    let platform = Platform::open(Store::at(&config.data_dir)?, config.rng_seed, system_clock())?;
    let state = AppState::new(platform);
    let listener = tokio::net::TcpListener::bind(config.listen).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, app(Arc::clone(&state)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
