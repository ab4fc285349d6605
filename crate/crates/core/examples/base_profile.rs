//! The reference spoke: polynomial fits, sampled profile, and its proxy record.
//!
//! ```text
//! cargo run --example base_profile
//! ```

use spokeforge::evaluator::{proxy_evaluate_detailed, OutputKind, ProxyCalibration};
use spokeforge::geometry::{base_profile, io::write_profile, profile_area, PolynomialCurve};

fn main() -> spokeforge::Result<()> {
    let top = PolynomialCurve::reference_top();
    let bottom = PolynomialCurve::reference_bottom();
    println!("top curve degree {}, bottom curve degree {}", top.degree(), bottom.degree());
    for x in [0.0, 27.0, 54.0, 81.0, 108.0] {
        let (t, b) = (top.eval(x)?, bottom.eval(x)?);
        println!("  x = {x:>5.1} mm  top {t:>8.4}  bottom {b:>8.4}  thickness {:>7.4}", t - b);
    }

    let base = base_profile();
    println!(
        "\n{} samples, area {:.4} mm², min thickness {:.4} mm",
        base.x().len(),
        profile_area(&base),
        base.min_thickness()
    );

    let calibration = ProxyCalibration::from_base(&base)?;
    let eval = proxy_evaluate_detailed(&base, &calibration)?;
    println!("natural frequency {:.1} Hz", eval.natural_frequency_hz);
    for kind in OutputKind::ALL {
        println!("  {:<8} {:>12.4}", kind.name(), eval.record.get(kind));
    }

    // First rows of the profile CSV.
    let mut csv = Vec::new();
    write_profile(&base, &mut csv)?;
    let text = String::from_utf8_lossy(&csv);
    println!();
    for line in text.lines().take(5) {
        println!("{line}");
    }
    Ok(())
}
