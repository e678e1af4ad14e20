//! Primality by Lucas-style certificates, with a verifier round trip.
//!
//! cargo run --example lucas -- 1000003

use primroot::lucas::{lucas_test, verify_certificate, LucasConfig, PrimalityCertificate, Verdict};
use primroot::numeric::parse_natural;
use primroot::TracedRng;

fn main() -> primroot::Result<()> {
    let arg = std::env::args().nth(1).unwrap_or_else(|| "1000003".into());
    let n = parse_natural(&arg)?;
    let out = lucas_test(&n, 1e-9, &mut TracedRng::seed_from_u64(5), &LucasConfig::default())?;
    match &out.verdict {
        Verdict::Prime(cert) => {
            let text = cert.to_string();
            print!("{text}");
            let parsed: PrimalityCertificate = text.parse()?;
            println!("check: {:?}", verify_certificate(&parsed, true));
        }
        other => println!("{n}: {other:?}"),
    }
    println!("bases drawn: {}", out.bases_drawn);
    Ok(())
}
