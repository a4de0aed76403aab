//! Adaptive Gauss–Kronrod quadrature and composite rules on tabulated data.

use crate::error::{NspError, Result};

// 15-point Kronrod abscissae on [-1, 1] (non-negative half) and weights,
// with the embedded 7-point Gauss weights at the odd Kronrod nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
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
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_PANELS: usize = 4096;

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

fn gk15<F>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx)? + f(center + dx)?;
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Ok((kronrod * half, ((kronrod - gauss) * half).abs()))
}

/// Integrates `f` over the oriented interval from `a` to `b`, bisecting panels
/// until the summed Kronrod–Gauss error estimate is below `abs_tol`.
pub fn integrate<F>(mut f: F, a: f64, b: f64, abs_tol: f64) -> Result<Integral>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            panels: 0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let (v, e) = gk15(&mut f, lo, hi)?;
    // Panels are kept in a flat list and the worst one is bisected.
    let mut panels = vec![(lo, hi, v, e)];
    loop {
        let total_err: f64 = panels.iter().map(|p| p.3).sum();
        if total_err <= abs_tol {
            break;
        }
        if panels.len() >= MAX_PANELS {
            return Err(NspError::Invariant(format!(
                "adaptive quadrature exceeded {MAX_PANELS} panels (error {total_err:e})"
            )));
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, p)| {
                if p.3 > acc.1 {
                    (i, p.3)
                } else {
                    acc
                }
            });
        let (pa, pb, _, _) = panels.swap_remove(worst);
        let mid = 0.5 * (pa + pb);
        let (v1, e1) = gk15(&mut f, pa, mid)?;
        let (v2, e2) = gk15(&mut f, mid, pb)?;
        panels.push((pa, mid, v1, e1));
        panels.push((mid, pb, v2, e2));
    }
    // Sum in left-to-right order so the result does not depend on refinement history.
    panels.sort_by(|x, y| x.0.total_cmp(&y.0));
    let value: f64 = panels.iter().map(|p| p.2).sum();
    let error: f64 = panels.iter().map(|p| p.3).sum();
    Ok(Integral {
        value: sign * value,
        error,
        panels: panels.len(),
    })
}

/// Composite Simpson rule on uniformly spaced samples. An odd number of
/// intervals finishes with Simpson's 3/8 rule on the last three.
pub fn simpson_uniform(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (values[0] + values[1]),
        3 => h / 3.0 * (values[0] + 4.0 * values[1] + values[2]),
        _ => {
            let intervals = n - 1;
            let simpson_end = if intervals.is_multiple_of(2) { n - 1 } else { n - 4 };
            let mut s = 0.0;
            let mut i = 0;
            while i < simpson_end {
                s += values[i] + 4.0 * values[i + 1] + values[i + 2];
                i += 2;
            }
            let mut total = h / 3.0 * s;
            if intervals % 2 == 1 {
                let k = n - 4;
                total += 3.0 * h / 8.0
                    * (values[k] + 3.0 * values[k + 1] + 3.0 * values[k + 2] + values[k + 3]);
            }
            total
        }
    }
}

/// Trapezoidal rule on uniformly spaced samples.
pub fn trapezoid_uniform(values: &[f64], h: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let inner: f64 = values[1..values.len() - 1].iter().sum();
    h * (inner + 0.5 * (values[0] + values[values.len() - 1]))
}
