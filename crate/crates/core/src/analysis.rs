//! Moments, extremes, negativity and value segmentation of a sampled field.
//!
//! All reductions walk the field in row-major order and use pairwise
//! summation, so results are deterministic.

use crate::error::{Error, Result};
use crate::format::sig17;
use crate::grid::WignerField;
use crate::wigner::PhasePoint;

/// Below this total signed mass the field is not treated as covering a state.
const MIN_SIGNED_MASS: f64 = 0.5;

/// Signed-weight statistics of a field. Kurtosis is the raw standardized
/// fourth moment (a Gaussian gives 3).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MomentSet {
    pub r0: f64,
    pub p0: f64,
    pub sigma_r: f64,
    pub sigma_p: f64,
    pub skew_r: f64,
    pub skew_p: f64,
    pub kurt_r: f64,
    pub kurt_p: f64,
    pub negativity: f64,
}

impl MomentSet {
    /// JSON object with a fixed key order and 17-significant-digit numbers.
    pub fn to_json(&self) -> String {
        let fields = [
            ("r0", self.r0),
            ("p0", self.p0),
            ("sigma_r", self.sigma_r),
            ("sigma_p", self.sigma_p),
            ("skew_r", self.skew_r),
            ("skew_p", self.skew_p),
            ("kurt_r", self.kurt_r),
            ("kurt_p", self.kurt_p),
            ("negativity", self.negativity),
        ];
        let body: Vec<String> = fields
            .iter()
            .map(|(k, v)| format!("  \"{k}\": {}", sig17(*v)))
            .collect();
        format!("{{\n{}\n}}\n", body.join(",\n"))
    }
}

/// Pairwise (cascade) summation.
pub fn pairwise_sum(terms: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if terms.len() <= LEAF {
        return terms.iter().sum();
    }
    let mid = terms.len() / 2;
    pairwise_sum(&terms[..mid]) + pairwise_sum(&terms[mid..])
}

pub fn compute_moments(field: &WignerField) -> Result<MomentSet> {
    let cells: Vec<(PhasePoint, f64)> = field.cells().map(|(_, _, pt, a, v)| (pt, v * a)).collect();
    let weights: Vec<f64> = cells.iter().map(|c| c.1).collect();
    let mass = pairwise_sum(&weights);
    if !(mass > MIN_SIGNED_MASS) {
        return Err(Error::MassTooLow(mass));
    }
    let mean = |f: &dyn Fn(&(PhasePoint, f64)) -> f64| {
        let terms: Vec<f64> = cells.iter().map(|c| f(c) * c.1).collect();
        pairwise_sum(&terms) / mass
    };
    let r0 = mean(&|c| c.0.r);
    let p0 = mean(&|c| c.0.p);
    let axis = |coord: &dyn Fn(&PhasePoint) -> f64, centre: f64| {
        let m2 = mean(&|c| (coord(&c.0) - centre).powi(2));
        let m3 = mean(&|c| (coord(&c.0) - centre).powi(3));
        let m4 = mean(&|c| (coord(&c.0) - centre).powi(4));
        let sigma = m2.max(0.0).sqrt();
        if sigma > 0.0 {
            (sigma, m3 / sigma.powi(3), m4 / sigma.powi(4))
        } else {
            (0.0, 0.0, 0.0)
        }
    };
    let (sigma_r, skew_r, kurt_r) = axis(&|pt| pt.r, r0);
    let (sigma_p, skew_p, kurt_p) = axis(&|pt| pt.p, p0);
    Ok(MomentSet {
        r0,
        p0,
        sigma_r,
        sigma_p,
        skew_r,
        skew_p,
        kurt_r,
        kurt_p,
        negativity: negativity_volume(field),
    })
}

/// Σ max(0, -value)·area.
pub fn negativity_volume(field: &WignerField) -> f64 {
    let terms: Vec<f64> = field
        .cells()
        .map(|(_, _, _, a, v)| if v < 0.0 { -v * a } else { 0.0 })
        .collect();
    pairwise_sum(&terms)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremes {
    pub min_value: f64,
    pub max_value: f64,
    pub min_point: PhasePoint,
    pub max_point: PhasePoint,
}

/// Sampled extremes; ties go to the lowest `(r, p)`.
pub fn extremes(field: &WignerField) -> Result<Extremes> {
    let mut cells = field.cells();
    let (_, _, first_pt, _, first) = cells.next().ok_or(Error::EmptyField)?;
    let mut out = Extremes {
        min_value: first,
        max_value: first,
        min_point: first_pt,
        max_point: first_pt,
    };
    for (_, _, pt, _, v) in cells {
        if v < out.min_value {
            out.min_value = v;
            out.min_point = pt;
        }
        if v > out.max_value {
            out.max_value = v;
            out.max_point = pt;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SectionMode {
    /// Four equal-width value intervals over [min, max].
    #[default]
    EqualWidth,
    /// Boundaries at the quartiles of cumulative absolute mass.
    EqualMass,
}

/// Four contiguous value intervals over `[min, max]` and the absolute mass of
/// the cells falling in each. Intervals are lower-inclusive; the last one also
/// includes `max`.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueSegmentation {
    pub bounds: [f64; 5],
    pub abs_mass: [f64; 4],
    pub signed_mass: [f64; 4],
}

impl ValueSegmentation {
    pub fn section_of(&self, value: f64) -> usize {
        (1..4).filter(|&k| value >= self.bounds[k]).count()
    }
}

pub fn segment_four(field: &WignerField) -> Result<ValueSegmentation> {
    segment(field, SectionMode::EqualWidth)
}

pub fn segment(field: &WignerField, mode: SectionMode) -> Result<ValueSegmentation> {
    let ext = extremes(field)?;
    let (lo, hi) = (ext.min_value, ext.max_value);
    if !(hi > lo) {
        return Err(Error::DegenerateRange(lo));
    }
    let bounds = match mode {
        SectionMode::EqualWidth => {
            let w = (hi - lo) / 4.0;
            [lo, lo + w, lo + 2.0 * w, lo + 3.0 * w, hi]
        }
        SectionMode::EqualMass => equal_mass_bounds(field, lo, hi),
    };
    let mut seg = ValueSegmentation {
        bounds,
        abs_mass: [0.0; 4],
        signed_mass: [0.0; 4],
    };
    let mut abs_terms: [Vec<f64>; 4] = Default::default();
    let mut signed_terms: [Vec<f64>; 4] = Default::default();
    for (_, _, _, a, v) in field.cells() {
        let k = seg.section_of(v);
        abs_terms[k].push(v.abs() * a);
        signed_terms[k].push(v * a);
    }
    for k in 0..4 {
        seg.abs_mass[k] = pairwise_sum(&abs_terms[k]);
        seg.signed_mass[k] = pairwise_sum(&signed_terms[k]);
    }
    Ok(seg)
}

fn equal_mass_bounds(field: &WignerField, lo: f64, hi: f64) -> [f64; 5] {
    let mut cells: Vec<(f64, f64)> = field.cells().map(|(_, _, _, a, v)| (v, v.abs() * a)).collect();
    cells.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = cells.iter().map(|c| c.1).sum();
    let mut bounds = [lo, lo, lo, lo, hi];
    let mut acc = 0.0;
    let mut next = 1;
    for (v, m) in &cells {
        while next < 4 && acc >= total * next as f64 / 4.0 {
            bounds[next] = *v;
            next += 1;
        }
        acc += m;
    }
    for b in bounds.iter_mut().take(4).skip(next) {
        *b = hi;
    }
    // keep the partition monotone when many cells share a value
    for k in 1..5 {
        bounds[k] = bounds[k].max(bounds[k - 1]);
    }
    bounds
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{sample_field, GridSpec};
    use crate::wigner::StateSpec;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn fine(state: &StateSpec) -> WignerField {
        let c = state.frame_center();
        sample_field(state, &GridSpec::square(c, 6.0, 256).unwrap()).unwrap()
    }

    #[test]
    fn fock_zero_moments() {
        let m = compute_moments(&fine(&StateSpec::fock(0))).unwrap();
        assert_abs_diff_eq!(m.r0, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.sigma_r, 0.5f64.sqrt(), epsilon = 1e-6);
        assert_abs_diff_eq!(m.kurt_r, 3.0, epsilon = 1e-6);
        assert_eq!(m.negativity, 0.0);
    }

    #[test]
    fn fock_one_moments() {
        let f = fine(&StateSpec::fock(1));
        let m = compute_moments(&f).unwrap();
        assert_abs_diff_eq!(m.sigma_r, 1.5f64.sqrt(), epsilon = 1e-6);
        // radial oracle: ∫_0^{1/2} e^{-s}(1-2s) ds = 2e^{-1/2} - 1
        let oracle = 2.0 * (-0.5f64).exp() - 1.0;
        assert_abs_diff_eq!(negativity_volume(&f), oracle, epsilon = 1e-3);
        assert_abs_diff_eq!(negativity_volume(&f), 0.21306, epsilon = 1e-3);
    }

    #[test]
    fn negativity_identity() {
        for state in [StateSpec::fock(3), StateSpec::cat(-1.0).unwrap()] {
            let f = fine(&state);
            let abs: f64 = f.cells().map(|c| c.4.abs() * c.3).sum();
            let signed: f64 = f.cells().map(|c| c.4 * c.3).sum();
            assert_abs_diff_eq!(negativity_volume(&f), (abs - signed) / 2.0, epsilon = 1e-12);
        }
        assert!(negativity_volume(&fine(&StateSpec::cat(-1.0).unwrap())) > 0.0);
        assert_eq!(negativity_volume(&fine(&StateSpec::coherent(Complex64::new(0.5, 0.0)))), 0.0);
    }

    #[test]
    fn symmetric_fields_have_zero_odd_moments() {
        for m in 0..4 {
            let mom = compute_moments(&fine(&StateSpec::fock(m))).unwrap();
            assert!(mom.r0.abs() < 1e-9 && mom.p0.abs() < 1e-9);
            assert!(mom.skew_r.abs() < 1e-9 && mom.skew_p.abs() < 1e-9);
        }
    }

    #[test]
    fn coherent_translation_covariance() {
        let base = compute_moments(&fine(&StateSpec::coherent(Complex64::new(0.0, 0.0)))).unwrap();
        let moved = compute_moments(&fine(&StateSpec::coherent(Complex64::new(1.25, 0.0)))).unwrap();
        assert_abs_diff_eq!(moved.r0 - base.r0, 1.25, epsilon = 1e-6);
        assert_abs_diff_eq!(moved.sigma_r, base.sigma_r, epsilon = 1e-6);
        assert_abs_diff_eq!(moved.skew_r, base.skew_r, epsilon = 1e-6);
        assert_abs_diff_eq!(moved.kurt_r, base.kurt_r, epsilon = 1e-6);
    }

    #[test]
    fn cat_moments_match_fock_basis_oracle() {
        // for |δ⟩ - ⟨0|δ⟩|0⟩ with real δ: ⟨x⟩ = δ, Var x = 1/4 + Eδ²/(2(1-E)), E = e^{-δ²}
        for d in [-0.5f64, -1.0, -2.0, -3.0] {
            let m = compute_moments(&fine(&StateSpec::cat(d).unwrap())).unwrap();
            let e = (-d * d).exp();
            assert_abs_diff_eq!(m.r0, d, epsilon = 1e-9);
            assert_abs_diff_eq!(m.sigma_r, (0.25 + e * d * d / (2.0 * (1.0 - e))).sqrt(), epsilon = 1e-9);
        }
    }

    #[test]
    fn too_little_mass_is_rejected() {
        let f = sample_field(
            &StateSpec::fock(0),
            &GridSpec::regular(-0.1, 0.1, -0.1, 0.1, 4, 4).unwrap(),
        )
        .unwrap();
        assert!(matches!(compute_moments(&f), Err(Error::MassTooLow(_))));
    }

    #[test]
    fn extremes_examples() {
        let e = extremes(&fine(&StateSpec::fock(1))).unwrap();
        // even cell count: the nearest centres sit half a cell off the origin
        assert_abs_diff_eq!(e.min_value, crate::wigner::eval_fock(1, e.min_point), epsilon = 1e-15);
        assert_abs_diff_eq!(e.min_value, -1.0 / PI, epsilon = 2e-3);
        assert!(e.min_point.r.abs() < 0.05 && e.min_point.p.abs() < 0.05);
        assert!(extremes(&fine(&StateSpec::fock(0))).unwrap().min_value > 0.0);

        let single = sample_field(
            &StateSpec::fock(0),
            &GridSpec::regular(-1.0, 1.0, -1.0, 1.0, 1, 1).unwrap(),
        )
        .unwrap();
        let e = extremes(&single).unwrap();
        assert_eq!(e.min_value, e.max_value);
    }

    #[test]
    fn extremes_break_ties_lexicographically() {
        // Fock 0 on a symmetric 2×2 grid: all four cells tie
        let f = sample_field(
            &StateSpec::fock(0),
            &GridSpec::regular(-1.0, 1.0, -1.0, 1.0, 2, 2).unwrap(),
        )
        .unwrap();
        let e = extremes(&f).unwrap();
        assert_eq!(e.max_point, PhasePoint::new(-0.5, -0.5));
        assert_eq!(e.min_point, PhasePoint::new(-0.5, -0.5));
    }

    fn uniform_field() -> WignerField {
        // 1×8 grid with values 0, 1/7, ..., 1
        let grid = GridSpec::regular(0.0, 1.0, 0.0, 8.0, 1, 8).unwrap();
        let values = (0..8).map(|k| k as f64 / 7.0).collect();
        WignerField::new(grid, values, StateSpec::fock(0)).unwrap()
    }

    #[test]
    fn uniform_values_give_equal_width_sections() {
        let seg = segment_four(&uniform_field()).unwrap();
        assert_eq!(seg.bounds, [0.0, 0.25, 0.5, 0.75, 1.0]);
        let total: f64 = uniform_field().values().iter().sum();
        assert_abs_diff_eq!(seg.abs_mass.iter().sum::<f64>(), total, epsilon = 1e-12);
    }

    #[test]
    fn fock_one_core_in_lowest_section() {
        let f = fine(&StateSpec::fock(1));
        let seg = segment_four(&f).unwrap();
        for (_, _, pt, _, v) in f.cells() {
            if pt.r * pt.r + pt.p * pt.p < 0.01 {
                assert_eq!(seg.section_of(v), 0);
            }
        }
        assert!(seg.abs_mass[0] > 0.0);
        let total: f64 = pairwise_sum(&f.cells().map(|c| c.4.abs() * c.3).collect::<Vec<_>>());
        assert_abs_diff_eq!(seg.abs_mass.iter().sum::<f64>(), total, epsilon = 1e-9);
    }

    #[test]
    fn single_cell_has_degenerate_range() {
        let f = sample_field(
            &StateSpec::fock(0),
            &GridSpec::regular(-1.0, 1.0, -1.0, 1.0, 1, 1).unwrap(),
        )
        .unwrap();
        assert!(matches!(segment_four(&f), Err(Error::DegenerateRange(_))));
    }

    #[test]
    fn equal_mass_sections_balance_mass() {
        let f = fine(&StateSpec::fock(0));
        let seg = segment(&f, SectionMode::EqualMass).unwrap();
        let total: f64 = seg.abs_mass.iter().sum();
        for m in seg.abs_mass {
            assert!((m / total - 0.25).abs() < 0.02, "{:?}", seg.abs_mass);
        }
    }

    #[test]
    fn moments_json_has_fixed_keys() {
        let json = MomentSet::default().to_json();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(|s| s.as_str()).collect();
        assert_eq!(keys.len(), 9);
        assert!(json.find("\"r0\"").unwrap() < json.find("\"negativity\"").unwrap());
    }
}
