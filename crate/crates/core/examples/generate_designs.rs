//! Seeded random genotypes through the PCHIP perturbation and area loop.
//!
//! ```text
//! cargo run --example generate_designs -- [count] [seed]
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spokeforge::geometry::{base_profile, extract_features, generate_profile, profile_area, DesignGenotype, FeatureVector};

fn main() -> spokeforge::Result<()> {
    let mut args = std::env::args().skip(1);
    let count: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(20);
    let seed: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(42);

    let base = base_profile();
    let a0 = profile_area(&base);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut accepted = Vec::new();
    let mut draws = 0;
    while accepted.len() < count && draws < 10 * count {
        draws += 1;
        let genotype = DesignGenotype::sample(&mut rng);
        match generate_profile(&base, &genotype) {
            Ok(g) => accepted.push((genotype, g)),
            Err(e) => log::debug!("rejected: {e}"),
        }
    }
    println!("{} accepted out of {draws} draws (seed {seed})", accepted.len());
    println!("{:>4} {:>10} {:>10} {:>9}", "#", "shift mm", "dA/A", "t_min");
    for (i, (_, g)) in accepted.iter().enumerate() {
        println!(
            "{i:>4} {:>10.3} {:>10.2e} {:>9.3}",
            g.shift_mm(),
            (profile_area(&g.profile) - a0) / a0,
            g.profile.min_thickness()
        );
    }

    if let Some((genotype, g)) = accepted.first() {
        println!("\nfeatures of the first design:");
        let f = extract_features(&g.profile, genotype);
        for (name, v) in FeatureVector::names().iter().zip(f.to_array()) {
            println!("  {name:<6} {v:>9.4}");
        }
    }
    Ok(())
}
