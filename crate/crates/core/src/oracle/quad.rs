//! Globally adaptive 21-point Gauss–Kronrod integration over a set of
//! initial panels.

// Node tables are kept at their published precision.
#![allow(clippy::excessive_precision, clippy::needless_range_loop)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

pub(crate) const EVALS_PER_PANEL: usize = 21;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Panel {
    pub a: f64,
    pub b: f64,
    pub value: f64,
    pub error: f64,
    /// Error is already at the rounding floor; bisecting will not help.
    pub at_floor: bool,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    // Largest error first; ties broken by position so the order is total and
    // the run is deterministic.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

pub(crate) fn gauss_kronrod21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    let mut res_abs = kronrod.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..5 {
        let jt = 2 * j + 1;
        let dx = half * XGK[jt];
        let (f1, f2) = (f(center - dx), f(center + dx));
        fv1[jt] = f1;
        fv2[jt] = f2;
        gauss += WG[j] * (f1 + f2);
        kronrod += WGK[jt] * (f1 + f2);
        res_abs += WGK[jt] * (f1.abs() + f2.abs());
    }
    for j in 0..5 {
        let jt = 2 * j;
        let dx = half * XGK[jt];
        let (f1, f2) = (f(center - dx), f(center + dx));
        fv1[jt] = f1;
        fv2[jt] = f2;
        kronrod += WGK[jt] * (f1 + f2);
        res_abs += WGK[jt] * (f1.abs() + f2.abs());
    }
    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let ah = half.abs();
    let value = kronrod * half;
    res_abs *= ah;
    res_asc *= ah;
    let mut err = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * res_abs;
    let at_floor = err <= floor;
    if at_floor {
        err = floor;
    }
    Panel {
        a,
        b,
        value,
        error: err,
        at_floor,
    }
}

/// Outcome of one adaptive run.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub panels: usize,
    pub evaluations: usize,
    pub converged: bool,
}

fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Integrates `f` over `[edges[0], edges[last]]`, starting from the panels
/// delimited by `edges` and bisecting the worst panel until the summed error
/// estimate is below `max(abs_tol, rel_tol * |value|)`.
///
/// `budget` is the number of function evaluations still available; it is
/// decremented in place.
pub(crate) fn integrate<F: Fn(f64) -> f64>(
    f: &F,
    edges: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    budget: &mut usize,
) -> Result<Integral> {
    assert!(edges.len() >= 2, "need at least one panel");
    let initial = edges.len() - 1;
    let start_budget = *budget;
    if initial * EVALS_PER_PANEL > *budget {
        return Err(Error::NonConvergence {
            evaluations: 0,
            value: f64::NAN,
            abs_error: f64::INFINITY,
        });
    }
    let mut heap: BinaryHeap<Panel> = BinaryHeap::with_capacity(initial * 2);
    let mut done: Vec<Panel> = Vec::new();
    let mut value = 0.0;
    let mut error = 0.0;
    for w in edges.windows(2) {
        let p = gauss_kronrod21(f, w[0], w[1]);
        *budget -= EVALS_PER_PANEL;
        value += p.value;
        error += p.error;
        if p.at_floor {
            done.push(p);
        } else {
            heap.push(p);
        }
    }

    let mut converged = true;
    loop {
        let target = abs_tol.max(rel_tol * value.abs());
        if error <= target {
            break;
        }
        let Some(worst) = heap.pop() else {
            // Every panel is at the rounding floor.
            converged = false;
            break;
        };
        if *budget < 2 * EVALS_PER_PANEL {
            heap.push(worst);
            let all: Vec<Panel> = heap.into_iter().chain(done).collect();
            return Err(Error::NonConvergence {
                evaluations: start_budget - *budget,
                value: neumaier_sum(all.iter().map(|p| p.value)),
                abs_error: all.iter().map(|p| p.error).sum(),
            });
        }
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            done.push(Panel {
                at_floor: true,
                ..worst
            });
            continue;
        }
        let left = gauss_kronrod21(f, worst.a, mid);
        let right = gauss_kronrod21(f, mid, worst.b);
        *budget -= 2 * EVALS_PER_PANEL;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        for p in [left, right] {
            if p.at_floor {
                done.push(p);
            } else {
                heap.push(p);
            }
        }
    }

    let mut all: Vec<Panel> = heap.into_iter().chain(done).collect();
    all.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = neumaier_sum(all.iter().map(|p| p.value));
    let abs_error: f64 = all.iter().map(|p| p.error).sum();
    let target = abs_tol.max(rel_tol * value.abs());
    Ok(Integral {
        value,
        abs_error,
        panels: all.len(),
        evaluations: start_budget - *budget,
        converged: converged || abs_error <= target,
    })
}

/// `n + 1` equally spaced edges over `[a, b]` with spacing at most `width`.
pub(crate) fn uniform_edges(a: f64, b: f64, width: f64) -> Vec<f64> {
    let n = (((b - a) / width).ceil() as usize).max(1);
    (0..=n)
        .map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 })
        .collect()
}
