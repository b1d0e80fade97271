//! The ten built-in framework cost configurations.
//!
//! Every formula works in exact integer arithmetic (u128 internally) and
//! scales its bits components by `size` while leaving rounds untouched;
//! logarithms round up to the next integer. The same configurations also
//! ship as TOML files under `configs/`, which exercise the expression
//! parser instead of these native functions.

use crate::config::{CostFormula, FrameworkConfig, PartyConstraint, Procedure};
use crate::cost::{cdiv, clog2, slice_sum, CostTuple, EvalScope};
use crate::error::Result;

fn t(ob: u128, or: u128, fb: u128, fr: u128) -> Result<CostTuple> {
    CostTuple::from_u128(ob, or, fb, fr)
}

fn zero(_: &EvalScope) -> Result<CostTuple> {
    Ok(CostTuple::ZERO)
}

/// Embedded copies of the shipped TOML configurations, in registry order.
pub const BUILTIN_TOML: [(&str, &str); 10] = [
    ("cryptflow2", include_str!("../configs/cryptflow2.toml")),
    ("crypten", include_str!("../configs/crypten.toml")),
    ("aby", include_str!("../configs/aby.toml")),
    ("spdz2k", include_str!("../configs/spdz2k.toml")),
    ("aby3", include_str!("../configs/aby3.toml")),
    ("falcon", include_str!("../configs/falcon.toml")),
    ("delphi", include_str!("../configs/delphi.toml")),
    ("cheetah", include_str!("../configs/cheetah.toml")),
    ("deepmpc", include_str!("../configs/deepmpc.toml")),
    ("semi2k", include_str!("../configs/semi2k.toml")),
];

pub fn builtin_configs() -> Vec<FrameworkConfig> {
    vec![
        cryptflow2(),
        crypten(),
        aby(),
        spdz2k(),
        aby3(),
        falcon(),
        delphi(),
        cheetah(),
        deepmpc(),
        semi2k(),
    ]
}

fn config(
    name: &str,
    parties: PartyConstraint,
    ops: &[(&str, fn(&EvalScope) -> Result<CostTuple>)],
) -> FrameworkConfig {
    let mut c = FrameworkConfig::new(name, parties);
    for (op, f) in ops {
        c.formulas.insert(op.to_string(), CostFormula::Native(*f));
    }
    c
}

// ---------------------------------------------------------------------------
// CrypTFlow2 (2-party, OT-based, online only)
// ---------------------------------------------------------------------------

fn cf2_reveal(s: &EvalScope) -> Result<CostTuple> {
    t(2 * s.k() as u128 * s.size() as u128, 1, 0, 0)
}

fn cf2_muls(s: &EvalScope) -> Result<CostTuple> {
    let (k, kp) = (s.k() as u128, s.kappa() as u128);
    t(s.size() as u128 * k * (cdiv(k + 1, 2) + kp), 2, 0, 0)
}

fn cf2_matmuls(s: &EvalScope) -> Result<CostTuple> {
    let (k, kp) = (s.k() as u128, s.kappa() as u128);
    let (p, q, r) = (s.p()? as u128, s.q()? as u128, s.r()? as u128);
    let ob = q * r * k * (p * cdiv(k + 1, 2) + kp) * s.size() as u128;
    // messages above ~2^24 ring elements are partitioned into extra flows,
    // never fewer than the two of a single exchange
    let rounds = cdiv(2 * k, cdiv(1 << 24, p * q * r)).max(2);
    t(ob, rounds, 0, 0)
}

fn cf2_truncpr(s: &EvalScope) -> Result<CostTuple> {
    let (k, kp, f) = (s.k() as u128, s.kappa() as u128, s.f() as u128);
    let (ob, rounds) = if s.knownmsb() {
        ((kp + 14) * f + 2 * kp + 4 * k, 2)
    } else {
        (
            kp * (k + 2) + 19 * k + (kp + 14) * f,
            2 * clog2(s.k())? as u128 + 2,
        )
    };
    t(ob * s.size() as u128, rounds, 0, 0)
}

fn cf2_ltz(s: &EvalScope) -> Result<CostTuple> {
    let (k, kp) = (s.k() as u128, s.kappa() as u128);
    t((kp + 18) * k * s.size() as u128, clog2(s.k())? as u128, 0, 0)
}

fn cryptflow2() -> FrameworkConfig {
    config(
        "cryptflow2",
        PartyConstraint::Exactly(2),
        &[
            ("share", zero),
            ("reveal", cf2_reveal),
            ("muls", cf2_muls),
            ("matmuls", cf2_matmuls),
            ("TruncPr", cf2_truncpr),
            ("LTZ", cf2_ltz),
        ],
    )
}

// ---------------------------------------------------------------------------
// CrypTen (2-party backend, trusted dealer offline)
// ---------------------------------------------------------------------------

fn crypten_reveal(s: &EvalScope) -> Result<CostTuple> {
    t(2 * s.k() as u128 * s.size() as u128, 1, 0, 0)
}

fn crypten_muls(s: &EvalScope) -> Result<CostTuple> {
    let (k, n) = (s.k() as u128, s.size() as u128);
    t(2 * k * n, 1, k * n, 3)
}

fn crypten_matmuls(s: &EvalScope) -> Result<CostTuple> {
    let (k, n) = (s.k() as u128, s.size() as u128);
    let (p, q, r) = (s.p()? as u128, s.q()? as u128, s.r()? as u128);
    t((p * q + q * r) * k * 2 * n, 1, p * r * k * n, 3)
}

fn crypten_ltz(s: &EvalScope) -> Result<CostTuple> {
    let (k, n) = (s.k() as u128, s.size() as u128);
    let lg = clog2(s.k())? as u128;
    t(54 * k * n, lg + 2, 14 * k * n, (lg + 2) * 3)
}

fn crypten_exp(s: &EvalScope) -> Result<CostTuple> {
    let (k, n) = (s.k() as u128, s.size() as u128);
    t(16 * k * n, 8, 8 * k * n, 24)
}

fn crypten_eqz(s: &EvalScope) -> Result<CostTuple> {
    let (k, n) = (s.k() as u128, s.size() as u128);
    t(26 * k * n, clog2(s.k())? as u128, 7 * k * n, 21)
}

fn crypten_reciprocal(s: &EvalScope) -> Result<CostTuple> {
    let (k, n) = (s.k() as u128, s.size() as u128);
    t(138 * k * n, 38, 44 * k * n, 114)
}

fn crypten() -> FrameworkConfig {
    config(
        "crypten",
        PartyConstraint::Exactly(2),
        &[
            ("share", zero),
            ("reveal", crypten_reveal),
            ("muls", crypten_muls),
            ("matmuls", crypten_matmuls),
            ("TruncPr", zero),
            ("LTZ", crypten_ltz),
            ("exp_fx", crypten_exp),
            ("EQZ", crypten_eqz),
            ("Reciprocal", crypten_reciprocal),
        ],
    )
}

// ---------------------------------------------------------------------------
// ABY (2-party, arithmetic sharing with OT-based triples)
// ---------------------------------------------------------------------------

fn aby_reveal(s: &EvalScope) -> Result<CostTuple> {
    t(2 * s.k() as u128 * s.size() as u128, 1, 0, 0)
}

fn aby_muls(s: &EvalScope) -> Result<CostTuple> {
    let (k, kp, n) = (s.k() as u128, s.kappa() as u128, s.size() as u128);
    t(4 * k * n, 1, (2 * kp + k + 1) * k * n, 2)
}

fn aby_matmuls(s: &EvalScope) -> Result<CostTuple> {
    let (k, kp, n) = (s.k() as u128, s.kappa() as u128, s.size() as u128);
    let pqr = s.p()? as u128 * s.q()? as u128 * s.r()? as u128;
    t(pqr * k * 4 * n, 1, pqr * (2 * kp + k + 1) * k * n, 2)
}

fn aby_ltz(s: &EvalScope) -> Result<CostTuple> {
    let (k, kp, n) = (s.k() as u128, s.kappa() as u128, s.size() as u128);
    t((kp * k * 7 + (k * k + k) / 2) * n, 4, 5 * kp * k * n, 2)
}

fn aby() -> FrameworkConfig {
    config(
        "aby",
        PartyConstraint::Exactly(2),
        &[
            ("share", zero),
            ("reveal", aby_reveal),
            ("muls", aby_muls),
            ("matmuls", aby_matmuls),
            ("TruncPr", zero),
            ("LTZ", aby_ltz),
        ],
    )
}

// ---------------------------------------------------------------------------
// SPDZ-2k (n-party, malicious majority; authenticated shares)
// ---------------------------------------------------------------------------

fn spdz2k_auth(s: &EvalScope) -> u128 {
    let (k, ks, m) = (s.k() as u128, s.kappa_s() as u128, s.m() as u128);
    ks * (k + ks) * m * (m - 1)
}

fn spdz2k_triple(s: &EvalScope) -> u128 {
    let (k, ks, m) = (s.k() as u128, s.kappa_s() as u128, s.m() as u128);
    (18 * ks * ks + 4 * k * k + 17 * ks * k) * m * (m - 1)
}

fn spdz2k_share(s: &EvalScope) -> Result<CostTuple> {
    let (k, ks, m, n) = (s.k() as u128, s.kappa_s() as u128, s.m() as u128, s.size() as u128);
    t((ks + k) * (m - 1) * n, 1, spdz2k_auth(s) * n, 3)
}

fn spdz2k_reveal(s: &EvalScope) -> Result<CostTuple> {
    let (k, ks, m, n) = (s.k() as u128, s.kappa_s() as u128, s.m() as u128, s.size() as u128);
    t((ks + k) * m * (m - 1) * n, 1, spdz2k_auth(s) * n, 3)
}

fn spdz2k_muls(s: &EvalScope) -> Result<CostTuple> {
    let (k, ks, m, n) = (s.k() as u128, s.kappa_s() as u128, s.m() as u128, s.size() as u128);
    t((k + ks) * m * (m - 1) * 2 * n, 1, spdz2k_triple(s) * n, 8)
}

fn spdz2k_matmuls(s: &EvalScope) -> Result<CostTuple> {
    let (k, ks, m, n) = (s.k() as u128, s.kappa_s() as u128, s.m() as u128, s.size() as u128);
    let pqr = s.p()? as u128 * s.q()? as u128 * s.r()? as u128;
    t(
        (k + ks) * m * (m - 1) * 2 * pqr * n,
        1,
        spdz2k_triple(s) * pqr * n,
        8,
    )
}

// online: one reveal; offline: k random bits, each a share + reveal + mul
fn spdz2k_truncpr(s: &EvalScope) -> Result<CostTuple> {
    let (k, ks, m, n) = (s.k() as u128, s.kappa_s() as u128, s.m() as u128, s.size() as u128);
    let offline =
        k * ((ks + k) * (3 * m + 1) * (m - 1) + spdz2k_auth(s) * 2 + spdz2k_triple(s));
    t((k + ks) * m * (m - 1) * n, 1, offline * n, 11)
}

fn spdz2k() -> FrameworkConfig {
    let mut c = config(
        "spdz2k",
        PartyConstraint::AtLeast(2),
        &[
            ("share", spdz2k_share),
            ("reveal", spdz2k_reveal),
            ("muls", spdz2k_muls),
            ("matmuls", spdz2k_matmuls),
            ("TruncPr", spdz2k_truncpr),
            // sign extraction priced as one truncation by k-1 positions
            ("LTZ", spdz2k_truncpr),
        ],
    );
    c.requires_k_ge_kappa_s = true;
    c
}

// ---------------------------------------------------------------------------
// ABY3 (3-party replicated sharing)
// ---------------------------------------------------------------------------

fn aby3_share(s: &EvalScope) -> Result<CostTuple> {
    t(3 * s.k() as u128 * s.size() as u128, 1, 0, 0)
}

fn aby3_muls(s: &EvalScope) -> Result<CostTuple> {
    t(3 * s.k() as u128 * s.size() as u128, 1, 0, 0)
}

fn aby3_matmuls(s: &EvalScope) -> Result<CostTuple> {
    let ob = 3 * s.p()? as u128 * s.r()? as u128 * s.k() as u128 * s.size() as u128;
    t(ob, 1, 0, 0)
}

fn aby3_truncpr(s: &EvalScope) -> Result<CostTuple> {
    t(s.k() as u128 * s.size() as u128, 1, 0, 0)
}

fn aby3_ltz(s: &EvalScope) -> Result<CostTuple> {
    t(
        9 * s.k() as u128 * s.size() as u128,
        clog2(s.k())? as u128 + 2,
        0,
        0,
    )
}

fn aby3() -> FrameworkConfig {
    config(
        "aby3",
        PartyConstraint::Exactly(3),
        &[
            ("share", aby3_share),
            ("reveal", aby3_share),
            ("muls", aby3_muls),
            ("matmuls", aby3_matmuls),
            ("TruncPr", aby3_truncpr),
            ("LTZ", aby3_ltz),
        ],
    )
}

// ---------------------------------------------------------------------------
// Falcon (3-party, malicious)
// ---------------------------------------------------------------------------

fn falcon_share(s: &EvalScope) -> Result<CostTuple> {
    t(3 * s.k() as u128 * s.size() as u128, 1, 0, 0)
}

fn falcon_reveal(s: &EvalScope) -> Result<CostTuple> {
    t(6 * s.k() as u128 * s.size() as u128, 1, 0, 0)
}

fn falcon_muls(s: &EvalScope) -> Result<CostTuple> {
    t(6 * s.k() as u128 * s.size() as u128, 1, 0, 0)
}

fn falcon_matmuls(s: &EvalScope) -> Result<CostTuple> {
    let ob = 6 * s.p()? as u128 * s.r()? as u128 * s.k() as u128 * s.size() as u128;
    t(ob, 1, 0, 0)
}

fn falcon_truncpr(s: &EvalScope) -> Result<CostTuple> {
    let (k, f, n) = (s.k() as u128, s.f() as u128, s.size() as u128);
    let lg = clog2(s.k())? as u128;
    let lg_kf = clog2(s.k() - s.f())? as u128;
    t(
        2 * k * n,
        1,
        ((6 + lg) * k + (6 + lg_kf) * (k - f)) * n,
        lg + 2,
    )
}

fn falcon_ltz(s: &EvalScope) -> Result<CostTuple> {
    let (k, n) = (s.k() as u128, s.size() as u128);
    let lg = clog2(s.k())? as u128;
    t(24 * k * n, lg + 5, (k + 8 + lg) * k * 3 * n, 4 + 2 * lg)
}

// k comparisons, one per candidate power
fn falcon_pow2(s: &EvalScope) -> Result<CostTuple> {
    let (k, n) = (s.k() as u128, s.size() as u128);
    let lg = clog2(s.k())? as u128;
    t(
        24 * k * k * n,
        (lg + 5) * k,
        (k + 8 + lg) * k * 3 * k * n,
        4 + 2 * lg,
    )
}

// one Pow2 plus five sequential multiplications
fn falcon_reciprocal(s: &EvalScope) -> Result<CostTuple> {
    let (k, n) = (s.k() as u128, s.size() as u128);
    let lg = clog2(s.k())? as u128;
    t(
        (24 * k * k + 36 * k) * n,
        (lg + 5) * k + 5,
        (k + 8 + lg) * k * 3 * k * n,
        4 + 2 * lg,
    )
}

fn falcon() -> FrameworkConfig {
    config(
        "falcon",
        PartyConstraint::Exactly(3),
        &[
            ("share", falcon_share),
            ("reveal", falcon_reveal),
            ("muls", falcon_muls),
            ("matmuls", falcon_matmuls),
            ("TruncPr", falcon_truncpr),
            ("LTZ", falcon_ltz),
            ("Pow2", falcon_pow2),
            ("Reciprocal", falcon_reciprocal),
        ],
    )
}

// ---------------------------------------------------------------------------
// Delphi (2-party, HE offline for linear layers, GC comparisons)
// ---------------------------------------------------------------------------

fn delphi_reveal(s: &EvalScope) -> Result<CostTuple> {
    t(2 * s.k() as u128 * s.size() as u128, 1, 0, 0)
}

fn delphi_muls(s: &EvalScope) -> Result<CostTuple> {
    let (k, n, deg) = (s.k() as u128, s.size() as u128, s.deg()? as u128);
    let sum = slice_sum(s.modulus()?, 0, 0);
    t(k * n, 1, cdiv(n, deg) * deg * sum * 4, 2)
}

fn delphi_matmuls(s: &EvalScope) -> Result<CostTuple> {
    let (k, n, deg) = (s.k() as u128, s.size() as u128, s.deg()? as u128);
    let (p, q, r) = (s.p()? as u128, s.q()? as u128, s.r()? as u128);
    let sum = slice_sum(s.modulus()?, 0, 0);
    t(
        p * q * k * n,
        1,
        (cdiv(p * r, deg) + cdiv(p * q, deg)) * deg * sum * 2 * n,
        2,
    )
}

fn delphi_ltz(s: &EvalScope) -> Result<CostTuple> {
    let (k, n) = (s.k() as u128, s.size() as u128);
    t(148 * k * n, 1, 1470 * k * n, 3)
}

fn delphi_conv2d(s: &EvalScope) -> Result<CostTuple> {
    let (k, n, deg) = (s.k() as u128, s.size() as u128, s.deg()? as u128);
    let sum = slice_sum(s.modulus()?, 0, 0);
    let c = s.conv()?;
    let (batch, cin, cout) = (c.batch as u128, c.in_channel as u128, c.out_channel as u128);
    let (inw, inh, outw, outh) = (c.inw as u128, c.inh as u128, c.outw as u128, c.outh as u128);
    let (kw, kh) = (c.kw as u128, c.kh as u128);
    let offline = batch * cdiv(cin * inw * inh, deg) * kw * kh * deg * sum
        + cdiv(batch * cout * outw * outh, deg) * deg * sum;
    t(batch * cin * inw * inh * k * n, 1, offline * n, 2)
}

fn delphi() -> FrameworkConfig {
    let mut c = config(
        "delphi",
        PartyConstraint::Exactly(2),
        &[
            ("share", zero),
            ("reveal", delphi_reveal),
            ("muls", delphi_muls),
            ("matmuls", delphi_matmuls),
            ("TruncPr", zero),
            ("LTZ", delphi_ltz),
            ("conv2d", delphi_conv2d),
        ],
    );
    c.he_deg = Some(8192);
    c.he_modulus = Some(vec![43, 43, 44, 44, 44]);
    c
}

// ---------------------------------------------------------------------------
// Cheetah (2-party, symmetric-key HE for linear layers)
// ---------------------------------------------------------------------------

fn cheetah_reveal(s: &EvalScope) -> Result<CostTuple> {
    t(2 * s.k() as u128 * s.size() as u128, 1, 0, 0)
}

// the response ciphertext drops its low-end modulus limb
fn cheetah_muls(s: &EvalScope) -> Result<CostTuple> {
    let (n, deg) = (s.size() as u128, s.deg()? as u128);
    let modulus = s.modulus()?;
    let ob = cdiv(n, deg) * (deg * slice_sum(modulus, 0, -1) + deg * slice_sum(modulus, 0, -2));
    t(ob, 2, 0, 0)
}

fn cheetah_truncpr(s: &EvalScope) -> Result<CostTuple> {
    t((s.f() as u128 + 4) * s.size() as u128, 2, 0, 0)
}

fn cheetah_ltz(s: &EvalScope) -> Result<CostTuple> {
    let (k, n) = (s.k() as u128, s.size() as u128);
    t((13 * k + 1) * n, clog2(s.k())? as u128, 0, 0)
}

fn cheetah() -> FrameworkConfig {
    let mut c = config(
        "cheetah",
        PartyConstraint::Exactly(2),
        &[
            ("share", zero),
            ("reveal", cheetah_reveal),
            ("muls", cheetah_muls),
            ("TruncPr", cheetah_truncpr),
            ("LTZ", cheetah_ltz),
        ],
    );
    c.formulas.insert(
        "matmuls".to_string(),
        CostFormula::Procedure(Procedure::CheetahMatmul),
    );
    c.he_deg = Some(8192);
    c.he_modulus = Some(vec![59, 55, 49, 49]);
    c
}

// ---------------------------------------------------------------------------
// Deep-MPC (3-party replicated sharing with dabit conversions)
// ---------------------------------------------------------------------------

fn deepmpc_share(s: &EvalScope) -> Result<CostTuple> {
    t(s.k() as u128 * s.size() as u128, 1, 0, 0)
}

fn deepmpc_reveal(s: &EvalScope) -> Result<CostTuple> {
    t(3 * s.k() as u128 * s.size() as u128, 1, 0, 0)
}

fn deepmpc_matmuls(s: &EvalScope) -> Result<CostTuple> {
    let ob = 3 * s.p()? as u128 * s.r()? as u128 * s.k() as u128 * s.size() as u128;
    t(ob, 1, 0, 0)
}

fn deepmpc_truncpr(s: &EvalScope) -> Result<CostTuple> {
    t(8 * s.k() as u128 * s.size() as u128, 3, 0, 0)
}

// 7.425k bits online per comparison, rounded up after batching
fn deepmpc_ltz(s: &EvalScope) -> Result<CostTuple> {
    let (k, n) = (s.k() as u128, s.size() as u128);
    t(
        cdiv(7425 * k * n, 1000),
        clog2(s.k())? as u128 + 2,
        3 * k * n,
        2,
    )
}

fn deepmpc() -> FrameworkConfig {
    config(
        "deepmpc",
        PartyConstraint::Exactly(3),
        &[
            ("share", deepmpc_share),
            ("reveal", deepmpc_reveal),
            ("muls", deepmpc_reveal),
            ("matmuls", deepmpc_matmuls),
            ("TruncPr", deepmpc_truncpr),
            ("LTZ", deepmpc_ltz),
        ],
    )
}

// ---------------------------------------------------------------------------
// SecretFlow-SEMI2K (n-party, trusted first party offline)
// ---------------------------------------------------------------------------

fn semi2k_reveal(s: &EvalScope) -> Result<CostTuple> {
    let m = s.m() as u128;
    t(m * (m - 1) * s.k() as u128 * s.size() as u128, 1, 0, 0)
}

fn semi2k_muls(s: &EvalScope) -> Result<CostTuple> {
    let m = s.m() as u128;
    t(2 * m * (m - 1) * s.k() as u128 * s.size() as u128, 1, 0, 0)
}

fn semi2k_ltz(s: &EvalScope) -> Result<CostTuple> {
    let (k, m, n) = (s.k() as u128, s.m() as u128, s.size() as u128);
    t(
        m * (2 * k + 2 * (m - 1) * (2 * k + 32)) * n,
        clog2(s.k())? as u128 + 1,
        0,
        0,
    )
}

fn semi2k() -> FrameworkConfig {
    let mut c = config(
        "semi2k",
        PartyConstraint::AtLeast(2),
        &[
            ("share", zero),
            ("reveal", semi2k_reveal),
            ("muls", semi2k_muls),
            ("TruncPr", semi2k_reveal),
            ("LTZ", semi2k_ltz),
        ],
    );
    c.formulas.insert(
        "matmuls".to_string(),
        CostFormula::Procedure(Procedure::Semi2kMatmul),
    );
    c
}
