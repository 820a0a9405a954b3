//! Globally adaptive 10/21-point Gauss–Kronrod quadrature for complex integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64 as C64;

use crate::error::{convergence, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_725,
    0.054_755_896_574_351_995,
    0.075_039_674_810_919_96,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_84,
    0.134_709_217_311_473_34,
    0.142_775_938_577_060_09,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];
// Gauss weights for the nodes XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

#[derive(Clone, Copy, Debug)]
pub struct QuadResult {
    pub value: C64,
    pub est_error: f64,
    pub evals: usize,
}

struct Piece {
    a: f64,
    b: f64,
    value: C64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn gk21<F>(f: &mut F, a: f64, b: f64) -> Result<Piece>
where
    F: FnMut(f64) -> Result<C64>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut k = fc * WGK[10];
    let mut g = C64::new(0.0, 0.0);
    for i in 0..10 {
        let x = h * XGK[i];
        let s = f(c - x)? + f(c + x)?;
        k += s * WGK[i];
        if i % 2 == 1 {
            g += s * WG[i / 2];
        }
    }
    Ok(Piece { a, b, value: k * h, err: ((k - g) * h).norm() })
}

/// Integrates `f` over [a, b] until the summed error estimate is below
/// max(abs_tol, rel_tol |I|), bisecting the worst interval each step.
pub fn integrate<F>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64, max_pieces: usize) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<C64>,
{
    if a == b {
        return Ok(QuadResult { value: C64::new(0.0, 0.0), est_error: 0.0, evals: 0 });
    }
    let mut heap = BinaryHeap::new();
    let first = gk21(&mut f, a, b)?;
    let mut total = first.value;
    let mut err = first.err;
    heap.push(first);
    let mut evals = 21;
    while err > abs_tol.max(rel_tol * total.norm()) {
        if heap.len() >= max_pieces {
            return convergence(format!(
                "quadrature on [{a}, {b}] stalled at error {err:.3e} after {max_pieces} subintervals"
            ));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let left = gk21(&mut f, worst.a, mid)?;
        let right = gk21(&mut f, mid, worst.b)?;
        evals += 42;
        total += left.value + right.value - worst.value;
        err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to shed drift from the running updates.
    let value = heap.iter().map(|p| p.value).sum();
    let est_error = heap.iter().map(|p| p.err).sum();
    Ok(QuadResult { value, est_error, evals })
}
