//! Exhaustive destabilizer enumeration for rank-two graded systems, used as
//! an independent check of the search. Works directly on coefficient spaces
//! and incidence-profile values, with none of the saturation or minimal-basis
//! machinery of the main path.

use crate::exactalg::ratlin::{annihilator, RatMat};
use crate::exactalg::Rat;
use crate::{Error, Result};

use super::{par_slope, HodgeSystem};

/// Slope, rank and per-level ranks `(level, rank)` of a destabilizer.
pub type DestabilizerShape = (Rat, usize, Vec<(i64, usize)>);

/// The maximal destabilizer's shape, or `None` for semistable input.
pub type OracleVerdict = Option<DestabilizerShape>;

pub fn rank2_max_destabilizer(e: &HodgeSystem) -> Result<OracleVerdict> {
    if e.rank() != 2 {
        return Err(Error::InvalidInput(
            "the exhaustive oracle covers rank two only".into(),
        ));
    }
    let mu = par_slope(e)?;
    let mut candidates: Vec<DestabilizerShape> = Vec::new();

    let level_keys: Vec<i64> = e.levels().keys().copied().collect();
    if level_keys.len() == 1 {
        let p = level_keys[0];
        let level = e.level(p).unwrap();
        for value in line_values(level) {
            candidates.push((value, 1, vec![(p, 1)]));
        }
    } else {
        let low = level_keys[0];
        let high = level_keys[1];
        let bottom = e.level(low).unwrap();
        candidates.push((bottom.par_degree(), 1, vec![(low, 1)]));
        let theta_vanishes = e.theta(high).is_none_or(|t| t.matrix.is_zero());
        if theta_vanishes {
            let top = e.level(high).unwrap();
            candidates.push((top.par_degree(), 1, vec![(high, 1)]));
        }
    }

    let mut best: Option<DestabilizerShape> = None;
    for c in candidates {
        if c.0 <= mu {
            continue;
        }
        let better = match &best {
            None => true,
            Some(b) => {
                c.0 > b.0
                    || (c.0 == b.0 && c.1 > b.1)
                    || (c.0 == b.0 && c.1 == b.1 && lower_levels_first(&c.2, &b.2))
            }
        };
        if better {
            best = Some(c);
        }
    }
    Ok(best)
}

/// Prefer support at lower levels: compare ranks from the top level down and
/// pick the lexicographically smaller vector.
fn lower_levels_first(a: &[(i64, usize)], b: &[(i64, usize)]) -> bool {
    let top = a
        .iter()
        .chain(b.iter())
        .map(|(p, _)| *p)
        .max()
        .unwrap_or(0);
    let bot = a
        .iter()
        .chain(b.iter())
        .map(|(p, _)| *p)
        .min()
        .unwrap_or(0);
    let vec_of = |list: &[(i64, usize)]| -> Vec<usize> {
        (bot..=top)
            .rev()
            .map(|p| {
                list.iter()
                    .find(|(q, _)| *q == p)
                    .map_or(0, |(_, r)| *r)
            })
            .collect()
    };
    vec_of(a) < vec_of(b)
}

/// All achievable line values `d + sum of prescribed step weights` over
/// solvable degree-and-profile classes in a rank-two level.
fn line_values(level: &super::Level) -> Vec<Rat> {
    let degrees = level.bundle.degrees();
    assert_eq!(degrees.len(), 2);
    let cmax = degrees[0];
    let k = level.flags.flags.len() as i64;
    let mut values = Vec::new();
    for d in (cmax - k)..=cmax {
        let widths: Vec<usize> = degrees
            .iter()
            .map(|&c| usize::try_from(c - d + 1).unwrap_or(0))
            .collect();
        let nvars: usize = widths.iter().sum();
        if nvars == 0 {
            continue;
        }
        // profile entry per point: index into the cumulative spans, the last
        // span being the whole fiber (no condition)
        let radices: Vec<usize> = level
            .flags
            .flags
            .iter()
            .map(|f| f.steps.len())
            .collect();
        let mut profile = vec![0usize; radices.len()];
        loop {
            if let Some(value) = profile_value(level, d, &widths, nvars, &profile) {
                values.push(value);
            }
            let mut i = 0;
            loop {
                if i == profile.len() {
                    break;
                }
                profile[i] += 1;
                if profile[i] < radices[i] {
                    break;
                }
                profile[i] = 0;
                i += 1;
            }
            if profile.iter().all(|&x| x == 0) {
                break;
            }
        }
        if radices.is_empty() {
            // a single empty profile was already evaluated above
        }
    }
    values
}

/// Value of one degree-and-profile class when solvable: existence of a line
/// map with the prescribed fiber incidences, decided on the raw coefficient
/// space. Profile entry `c` prescribes containment in cumulative span `c`;
/// the last span is the full fiber.
fn profile_value(
    level: &super::Level,
    d: i64,
    widths: &[usize],
    nvars: usize,
    profile: &[usize],
) -> Option<Rat> {
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    let mut weight_sum = Rat::zero();
    for (flag, &choice) in level.flags.flags.iter().zip(profile) {
        weight_sum += &flag.steps[choice].weight;
        if choice + 1 == flag.steps.len() {
            continue; // full fiber, vacuous
        }
        let spans = flag.cumulative_spans();
        let x = &flag.point;
        for functional in annihilator(&spans[choice], 2) {
            // functional applied to (v_0(x), v_1(x)) in the splitting basis
            let mut row = Vec::with_capacity(nvars);
            for (l, &w) in widths.iter().enumerate() {
                let mut xe = Rat::one();
                for _ in 0..w {
                    row.push(&functional[l] * &xe);
                    xe = &xe * x;
                }
            }
            rows.push(row);
        }
    }
    let solvable = if rows.is_empty() {
        true
    } else {
        !RatMat::from_rows(rows).kernel_basis().is_empty()
    };
    solvable.then(|| Rat::from_int(d) + weight_sum)
}
