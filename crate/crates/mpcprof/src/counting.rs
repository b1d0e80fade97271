//! Matrix-multiplication packing counters used by the Cheetah and SEMI2K
//! cost configurations.

use crate::error::{Error, Result};

fn cdiv(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

/// Searches block partitions of a (p x q) * (q x r) product packed into
/// degree-`deg` polynomials and returns the (sending, response) ciphertext
/// counts of the cheapest candidate. `lp` weighs local work, `bp` bandwidth;
/// later candidates win ties.
pub fn cheetah_matmul_ct_count(
    p: u64,
    q: u64,
    r: u64,
    deg: u64,
    lp: f64,
    bp: f64,
) -> Result<(u64, u64)> {
    if p == 0 || q == 0 || r == 0 {
        return Err(Error::InvalidDimension(format!(
            "matrix dimensions must be positive, got ({p}, {q}, {r})"
        )));
    }
    if deg == 0 {
        return Err(Error::InvalidDimension("HE degree must be positive".into()));
    }
    let mut min_cost = f64::INFINITY;
    let mut best = (0u64, 0u64);
    for d1 in 1..=deg.min(p + 1) {
        let block1 = cdiv(p, d1);
        let mut d2 = 1u64;
        while d2 <= q && d1 * d2 <= deg {
            let block2 = cdiv(q, d2);
            let d3 = r.min(cdiv(deg, d1 * d2));
            let block3 = cdiv(r, d3);
            let send = block1.min(block3) * block2;
            let resp = cdiv(block1 * block3, d2);
            let num1 = cdiv(block1 * block3, deg) * d2;
            let num2 = block1 * block2 * block3;
            let cost =
                (send + resp) as f64 * bp + num1 as f64 * lp + num2 as f64 * lp / 10.0;
            if cost <= min_cost {
                min_cost = cost;
                best = (send, resp);
            }
            d2 *= 2;
        }
    }
    Ok(best)
}

const MEM_LIMIT: u128 = 1 << 31;

/// Number of ring elements exchanged for a (p x q) * (q x r) product.
///
/// Small products transfer both masked inputs, `p*q + q*r` elements. Products
/// whose transfer would cross the 2^31-bit memory limit are split into blocks
/// and the per-block transfers are summed.
pub fn semi2k_matmul_msg_count(p: u64, q: u64, r: u64, k: u64) -> u128 {
    let (p, q, r, k) = (p as u128, q as u128, r as u128, k as u128);
    if p == 0 || q == 0 || r == 0 || (p * q + q * r) * k < MEM_LIMIT {
        return p * q + q * r;
    }
    let cdiv = |a: u128, b: u128| a.div_ceil(b);
    let (pr_step, q_step);
    if q > (p + r) * 8 {
        pr_step = p + r;
        q_step = cdiv(MEM_LIMIT, k * pr_step).max(1);
    } else if (p + r) > q * 8 {
        q_step = q;
        pr_step = cdiv(MEM_LIMIT, k * q_step).max(1);
    } else {
        let raw = (((p + r) * MEM_LIMIT) as f64 / (q * k) as f64).sqrt();
        q_step = ((MEM_LIMIT as f64 / k as f64 / raw).ceil() as u128).max(1);
        pr_step = (raw.ceil() as u128).max(1);
    }
    let p_step = cdiv(pr_step * p, p + r).max(1);
    let r_step = cdiv(pr_step * r, p + r).max(1);
    let mut res: u128 = 0;
    for i in 0..cdiv(p, p_step) {
        for j in 0..cdiv(q, q_step) {
            for l in 0..cdiv(r, r_step) {
                let ps = (p - p_step * i).min(p_step);
                let qs = (q - q_step * j).min(q_step);
                let rs = (r - r_step * l).min(r_step);
                res += ps * qs + qs * rs;
            }
        }
    }
    res
}
