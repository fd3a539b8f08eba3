//! Adaptive Gauss-Kronrod integration used by the continuous divergence
//! estimators. A 15-point Kronrod rule scores each panel; the panel with the
//! largest error estimate is bisected until the requested absolute accuracy
//! or the panel budget is reached.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::kahan::CompensatedSum;

// 15-point Kronrod abscissae on [-1, 1] (positive half) and the matching
// 7-point Gauss weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Integral estimate with its accumulated error bound and work count.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub abs_error: f64,
    pub panels: usize,
}

/// One Kronrod evaluation over [a, b]: (integral, error estimate).
fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resg = WG[3] * fc;
    let mut resk = WGK[7] * fc;
    let mut resabs = resk.abs();
    let mut fv = [0.0f64; 15];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[j] = f1;
        fv[14 - j] = f2;
        let sum = f1 + f2;
        resk += WGK[j] * sum;
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * sum;
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }
    resasc *= half.abs();
    resabs *= half.abs();
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    if floor > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(floor);
    }
    (resk * half, err)
}

#[derive(Debug)]
struct Panel {
    err: f64,
    a: f64,
    b: f64,
    value: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

pub const DEFAULT_PANEL_BUDGET: usize = 100_000;

/// Integrate f over [a, b] to absolute accuracy `target`, bisecting the worst
/// panel first. The Kronrod nodes are interior, so f is never evaluated at a
/// or b and integrable endpoint singularities only cost extra refinement.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    target: f64,
    budget: usize,
) -> Result<Quadrature> {
    if !(a.is_finite() && b.is_finite() && b > a) {
        return Err(crate::error::domain(format!(
            "integration interval must be finite and ordered, got [{a}, {b}]"
        )));
    }
    let mut heap = BinaryHeap::new();
    let (v, e) = kronrod15(&f, a, b);
    heap.push(Panel { err: e, a, b, value: v });
    let mut panels = 1usize;
    loop {
        let total_err: f64 = {
            let mut s = CompensatedSum::new();
            for p in heap.iter() {
                s.add(p.err);
            }
            s.value()
        };
        if total_err <= target {
            break;
        }
        if panels >= budget {
            return Err(Error::QuadratureBudget { panels, achieved: total_err, target });
        }
        let worst = heap.pop().expect("heap nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval at floating point resolution, keep its estimate
            heap.push(Panel { err: 0.0, ..worst });
            continue;
        }
        let (v1, e1) = kronrod15(&f, worst.a, mid);
        let (v2, e2) = kronrod15(&f, mid, worst.b);
        heap.push(Panel { err: e1, a: worst.a, b: mid, value: v1 });
        heap.push(Panel { err: e2, a: mid, b: worst.b, value: v2 });
        panels += 1;
    }
    let mut value = CompensatedSum::new();
    let mut err = CompensatedSum::new();
    for p in heap.iter() {
        value.add(p.value);
        err.add(p.err);
    }
    Ok(Quadrature { value: value.value(), abs_error: err.value(), panels })
}
