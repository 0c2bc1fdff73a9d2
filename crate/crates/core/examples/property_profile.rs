//! Property profiles and the consistency checks between them.

use conetop::abelian::GroupSpec;
use conetop::conetop::{ConeSpace, Variant};
use conetop::monoid::MonoidSpec;
use conetop::profile;

fn main() -> conetop::Result<()> {
    let cone = ConeSpace::build(GroupSpec::free(2), MonoidSpec::lex(2), Variant::Cone)?;
    let star = cone.with_variant(Variant::ConeStar);
    let pc = profile::evaluate(&cone);
    let ps = profile::evaluate(&star);
    for p in [&pc, &ps] {
        println!("[{}]", p.variant);
        for (name, v) in &p.verdicts {
            println!("  {name:<26} {:<5} {}", v.holds, v.rule);
        }
    }
    let violations: Vec<_> = profile::check_implications(&pc)
        .into_iter()
        .chain(profile::check_implications(&ps))
        .chain(profile::cross_variant_check(&pc, &ps))
        .collect();
    println!("violations: {}", violations.len());
    Ok(())
}
