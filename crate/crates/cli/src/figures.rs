//! The standard figure types built from pipeline objects.

use landskew::elastic::Warp;
use landskew::landscape::{unit_grid, Landscape};

use crate::svg::{Figure, Series};

/// One level of each landscape against the filtration scale.
pub fn landscapes(ls: &[Landscape], level: usize, title: &str) -> Figure {
    let series = ls.iter().enumerate().map(|(i, l)| Series::line(curve(l, level), i)).collect();
    Figure {
        title: title.into(),
        x_label: "filtration scale".into(),
        y_label: format!("lambda{}", level + 1),
        series,
        ..Default::default()
    }
}

fn curve(l: &Landscape, level: usize) -> Vec<(f64, f64)> {
    let row = l.values().get(level).map(Vec::as_slice).unwrap_or(&[]);
    unit_grid(l.t()).into_iter().zip(row).map(|(u, &v)| (u * l.scale_s(), v)).collect()
}

/// Aligned curves as thin lines with the Karcher mean on top and
/// the cross-sectional mean of the unaligned curves dashed.
pub fn mean_overlay(aligned: &[Landscape], mean: &Landscape, unaligned: &[Landscape], level: usize, title: &str) -> Figure {
    let mut series: Vec<Series> = aligned
        .iter()
        .map(|l| Series::Line { points: curve(l, level), color: 7, width: 0.6, dashed: false })
        .collect();
    if let Some(first) = unaligned.first() {
        let n = unaligned.len() as f64;
        let mut avg = curve(first, level);
        for (j, p) in avg.iter_mut().enumerate() {
            p.1 = unaligned.iter().map(|l| l.values().get(level).map_or(0.0, |r| r[j])).sum::<f64>() / n;
        }
        series.push(Series::Line { points: avg, color: 3, width: 1.5, dashed: true });
    }
    series.push(Series::Line { points: curve(mean, level), color: 1, width: 2.0, dashed: false });
    Figure {
        title: title.into(),
        x_label: "filtration scale".into(),
        y_label: format!("lambda{}", level + 1),
        series,
        ..Default::default()
    }
}

/// Birth-death scatter of several diagrams with the diagonal.
pub fn diagrams(sets: &[Vec<(f64, f64)>], colors: &[usize], title: &str, unit_square: bool) -> Figure {
    let series = sets
        .iter()
        .enumerate()
        .map(|(i, pts)| Series::Points { points: pts.clone(), color: colors.get(i).copied().unwrap_or(i) })
        .collect();
    let range = unit_square.then_some((0.0, 1.0));
    Figure {
        title: title.into(),
        x_label: "birth".into(),
        y_label: "death".into(),
        series,
        diagonal: true,
        x_range: range,
        y_range: range,
    }
}

pub fn warps(ws: &[Warp], title: &str) -> Figure {
    let series = ws
        .iter()
        .enumerate()
        .map(|(i, w)| Series::line(unit_grid(w.t()).into_iter().zip(w.values().iter().copied()).collect(), i))
        .collect();
    Figure {
        title: title.into(),
        x_label: "t".into(),
        y_label: "gamma(t)".into(),
        series,
        x_range: Some((0.0, 1.0)),
        y_range: Some((0.0, 1.0)),
        ..Default::default()
    }
}

/// PC1 against PC2, one colour per group. With a single score column the
/// y axis is the curve index.
pub fn scores(rows: &[Vec<f64>], groups: &[usize], title: &str) -> Figure {
    let n_groups = groups.iter().copied().max().map_or(1, |g| g + 1);
    let mut by_group = vec![Vec::new(); n_groups];
    for (i, row) in rows.iter().enumerate() {
        let g = groups.get(i).copied().unwrap_or(0);
        let y = row.get(1).copied().unwrap_or(i as f64);
        by_group[g].push((row.first().copied().unwrap_or(0.0), y));
    }
    let two = rows.first().is_some_and(|r| r.len() >= 2);
    Figure {
        title: title.into(),
        x_label: "PC1 score".into(),
        y_label: if two { "PC2 score".into() } else { "curve".into() },
        series: by_group.into_iter().enumerate().map(|(g, points)| Series::Points { points, color: g }).collect(),
        ..Default::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::svg::parse_polylines;

    #[test]
    fn identity_warp_is_one_diagonal_polyline() {
        let svg = warps(&[Warp::identity(33)], "warps").render();
        let (_, lines) = parse_polylines(&svg);
        assert_eq!(lines.len(), 1);
        assert!(lines[0].iter().all(|p| (p.0 - p.1).abs() < 1e-2));
        assert!(!svg.contains("class=\"diagonal\""));
    }

    #[test]
    fn diagram_scatter_has_the_diagonal() {
        let svg = diagrams(&[vec![(0.1, 0.4)]], &[0], "dg", true).render();
        assert!(svg.contains("class=\"diagonal\""));
        assert_eq!(svg.matches("<circle").count(), 1);
    }
}
