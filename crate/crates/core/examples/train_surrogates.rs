//! Proxy-labelled designs, k-fold grid search, and held-out R² per output.
//!
//! ```text
//! cargo run --release --example train_surrogates -- [designs]
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spokeforge::evaluator::OutputKind;
use spokeforge::geometry::{extract_features, DesignGenotype};
use spokeforge::pipeline::{DesignEvaluator, GbtGrid, KrrGrid};
use spokeforge::surrogate::{r2_score, train_surrogate, ModelFamily};

fn main() -> spokeforge::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(150);
    let evaluator = DesignEvaluator::proxy()?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut x, mut records) = (Vec::new(), Vec::new());
    while x.len() < n {
        let g = DesignGenotype::sample(&mut rng);
        if let Ok((generated, record)) = evaluator.evaluate(&g) {
            x.push(extract_features(&generated.profile, &g).to_array().to_vec());
            records.push(record);
        }
    }
    let cut = n * 4 / 5;
    println!("{n} designs, {cut} train / {} test\n", n - cut);

    for kind in OutputKind::ALL {
        let y: Vec<f64> = records.iter().map(|r| r.get(kind)).collect();
        let grid = match ModelFamily::default_for(kind) {
            ModelFamily::KernelRidge => KrrGrid::default().expand(),
            ModelFamily::BoostedTrees => GbtGrid::default().expand(),
        };
        let (model, cv) = train_surrogate(kind, &x[..cut], &y[..cut], &grid, 5, 42)?;
        let r2 = r2_score(&y[cut..], &model.predict(&x[cut..]))?;
        println!("{:<8} CV R² {:.4}  test R² {r2:.4}", kind.name(), cv.best().mean_r2);
        println!("         {}", cv.best().params.describe());
    }
    Ok(())
}
