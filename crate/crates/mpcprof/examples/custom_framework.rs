//! Registering a user-supplied framework from a TOML cost configuration and
//! evaluating individual operations against it.

use mpcprof::config::FrameworkConfig;
use mpcprof::{evaluate_cost, FrameworkRegistry, OpExtras, SecurityParams};

const CONFIG: &str = r#"
name = "myproto"
parties_min = 2

[ops.share]
online_bits = "k*(m-1)*size"
online_rounds = "1"
offline_bits = "0"
offline_rounds = "0"

[ops.reveal]
online_bits = "k*m*(m-1)*size"
online_rounds = "1"
offline_bits = "0"
offline_rounds = "0"

[ops.muls]
online_bits = "2*k*m*(m-1)*size"
online_rounds = "1"
offline_bits = "(2*kappa+k)*k*size"
offline_rounds = "2"

[ops.matmuls]
online_bits = "2*k*m*(m-1)*p*r*size"
online_rounds = "1"
offline_bits = "(2*kappa+k)*k*p*q*r*size"
offline_rounds = "2"

[ops.TruncPr]
online_bits = "k*size"
online_rounds = "1"
offline_bits = "0"
offline_rounds = "0"

[ops.LTZ]
online_bits = "(kappa_s+18)*k*size"
online_rounds = "log2(k)+1"
offline_bits = "0"
offline_rounds = "0"
"#;

pub fn main() -> mpcprof::Result<()> {
    let mut registry = FrameworkRegistry::with_builtins();
    registry.register(FrameworkConfig::load_toml(CONFIG)?, false)?;

    let params = SecurityParams::with_parties(2);
    for (op, extras) in [
        ("muls", OpExtras::size(1)),
        ("muls", OpExtras::size(128)),
        ("matmuls", OpExtras::matmul(16, 64, 10)),
        ("LTZ", OpExtras::size(32)),
    ] {
        let cost = evaluate_cost(&registry, "myproto", op, &params, &extras)?;
        println!("myproto {op:8} {extras:?} -> {cost}");
    }

    // the registry still resolves the built-ins next to the custom one
    let aby3 = evaluate_cost(
        &registry,
        "aby3",
        "muls",
        &SecurityParams::with_parties(3),
        &OpExtras::size(1),
    )?;
    println!("aby3 muls (size 1) -> {aby3}");
    Ok(())
}
