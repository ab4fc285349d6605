//! Targeted mode: hit RFT 12000 N and RFC 1000 N while minimizing SEDT and
//! vibration, using the campaign command on the proxy.
//!
//! ```text
//! cargo run --release --example targeted_design -- [out_dir]
//! ```

use std::path::PathBuf;

use spokeforge::pipeline::{cmd_optimize, BackendChoice, CampaignConfig};

fn main() -> spokeforge::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("spokeforge-targeted"));
    let config = CampaignConfig {
        out,
        objective: "target:rft=12000,target:rfc=1000,min:sedt,min:vib_rms".into(),
        backend: BackendChoice::Proxy,
        ..CampaignConfig::default()
    };
    let outcome = cmd_optimize(&config)?;
    print!("{}", outcome.summary());
    println!(
        "RFT off target by {:.2}%, RFC by {:.2}%",
        100.0 * (outcome.record.rft - 12000.0).abs() / 12000.0,
        100.0 * (outcome.record.rfc - 1000.0).abs() / 1000.0
    );
    println!("run bundle in {}", outcome.run_dir.display());
    Ok(())
}
