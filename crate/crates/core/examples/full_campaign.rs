//! The whole workflow in one directory: generate, evaluate, train, optimize
//! on the surrogates, sweep a Pareto front, and export figures.
//!
//! ```text
//! cargo run --release --example full_campaign -- [out_dir] [designs]
//! ```

use std::path::PathBuf;

use spokeforge::pipeline::{
    cmd_evaluate, cmd_export, cmd_generate, cmd_optimize, cmd_pareto, cmd_train, BackendChoice, CampaignConfig,
};

fn main() -> spokeforge::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let mut args = std::env::args().skip(1);
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("spokeforge-campaign"));
    let design_count = args.next().and_then(|a| a.parse().ok()).unwrap_or(250);
    let mut config = CampaignConfig {
        out,
        design_count,
        backend: BackendChoice::Proxy,
        ..CampaignConfig::default()
    };

    let generated = cmd_generate(&config)?;
    println!("generated {} designs ({} draws)", generated.accepted, generated.draws);
    let evaluated = cmd_evaluate(&config)?;
    println!("evaluated {} designs", evaluated.evaluated);
    let report = cmd_train(&config)?;
    print!("{}", report.table());

    config.backend = BackendChoice::Surrogate;
    config.objective = "max:rft".into();
    let outcome = cmd_optimize(&config)?;
    print!("{}", outcome.summary());
    if let Some(proxy) = outcome.proxy_record {
        println!("proxy check of the optimum: rft {:.1}", proxy.rft);
    }

    config.backend = BackendChoice::Proxy;
    config.objective = "max:rft,min:sedt".into();
    config.sweep.pso.iterations = 20;
    let front = cmd_pareto(&config)?;
    println!("{} Pareto designs in {}", front.rows.len(), front.run_dir.display());

    for path in cmd_export(&config)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
