use crate::error::{Error, Result};

fn check(front: &[Vec<f64>], reference: &[f64]) -> Result<()> {
    if reference.len() < 2 {
        return Err(Error::Domain("hypervolume needs at least two objectives".into()));
    }
    for p in front {
        if p.len() != reference.len() {
            return Err(Error::Domain("front point and reference differ in length".into()));
        }
        if p.iter().zip(reference).any(|(v, r)| !(v < r)) {
            return Err(Error::Domain(format!(
                "front point {p:?} does not strictly dominate the reference {reference:?}"
            )));
        }
    }
    Ok(())
}

/// Dominated area of a minimization front in two objectives.
pub fn hypervolume_2d(front: &[Vec<f64>], reference: &[f64]) -> Result<f64> {
    check(front, reference)?;
    if reference.len() != 2 {
        return Err(Error::Domain("hypervolume_2d takes two objectives".into()));
    }
    let pts: Vec<[f64; 2]> = front.iter().map(|p| [p[0], p[1]]).collect();
    Ok(sweep_2d(pts, [reference[0], reference[1]]))
}

fn sweep_2d(mut pts: Vec<[f64; 2]>, reference: [f64; 2]) -> f64 {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut area = 0.0;
    let mut ceiling = reference[1];
    for [x, y] in pts {
        if y < ceiling {
            area += (reference[0] - x) * (ceiling - y);
            ceiling = y;
        }
    }
    area
}

/// Exact dominated hypervolume of a minimization front, by slicing along the
/// last objective down to the two-objective sweep. Dominated points are
/// allowed and contribute nothing.
pub fn hypervolume(front: &[Vec<f64>], reference: &[f64]) -> Result<f64> {
    check(front, reference)?;
    Ok(slice(front.to_vec(), reference))
}

fn slice(mut pts: Vec<Vec<f64>>, reference: &[f64]) -> f64 {
    let d = reference.len();
    if pts.is_empty() {
        return 0.0;
    }
    if d == 2 {
        return sweep_2d(pts.iter().map(|p| [p[0], p[1]]).collect(), [reference[0], reference[1]]);
    }
    pts.sort_by(|a, b| a[d - 1].total_cmp(&b[d - 1]));
    let mut volume = 0.0;
    for i in 0..pts.len() {
        let upper = pts.get(i + 1).map_or(reference[d - 1], |p| p[d - 1]);
        let depth = upper - pts[i][d - 1];
        if depth > 0.0 {
            let projected: Vec<Vec<f64>> = pts[..=i].iter().map(|p| p[..d - 1].to_vec()).collect();
            volume += depth * slice(projected, &reference[..d - 1]);
        }
    }
    volume
}

/// Volume gained by adding `point` to `front`; zero when the point does not
/// strictly dominate the reference.
pub fn hypervolume_improvement(front: &[Vec<f64>], point: &[f64], reference: &[f64]) -> Result<f64> {
    check(front, reference)?;
    if point.len() != reference.len() {
        return Err(Error::Domain("point and reference differ in length".into()));
    }
    if point.iter().zip(reference).any(|(v, r)| !(v < r)) {
        return Ok(0.0);
    }
    let before = slice(front.to_vec(), reference);
    let mut with = front.to_vec();
    with.push(point.to_vec());
    Ok((slice(with, reference) - before).max(0.0))
}
