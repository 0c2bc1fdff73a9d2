//! Membership, units and majorization for a few monoids.

use conetop::abelian::GroupSpec;
use conetop::monoid::{Monoid, MonoidSpec};

fn main() -> conetop::Result<()> {
    let z = GroupSpec::free(1);
    let numerical = Monoid::new(z.clone(), MonoidSpec::generated(vec![z.element_i64(&[3])?, z.element_i64(&[5])?]))?;
    let gaps: Vec<i64> = (0..20)
        .filter(|&n| !numerical.member(&z.element_i64(&[n]).unwrap()).unwrap())
        .collect();
    println!("S = {}: gaps in [0, 20) are {gaps:?}", numerical.spec());

    let g = GroupSpec::from_i64(2, &[2])?;
    let gens = vec![g.element_i64(&[1, 0, 0])?, g.element_i64(&[0, 1, 1])?, g.element_i64(&[0, -1, 0])?];
    let m = Monoid::new(g.clone(), MonoidSpec::generated(gens))?;
    println!("S = {} in {g}", m.spec());
    println!("  generators that are units: {:?}", m.unit_flags());
    println!("  index of <S>: {}", m.span().index());
    for x in [[-1, 0, 0], [0, 3, 1], [2, -5, 1]] {
        let e = g.element_i64(&x)?;
        println!("  {e}: member {}, unit {}", m.member(&e)?, m.units().contains(&e)?);
    }
    println!("  every subset majorized: {}", m.majorization().holds);

    let lex = Monoid::new(GroupSpec::free(2), MonoidSpec::lex(2))?;
    let e = GroupSpec::free(2).element_i64(&[-7, 1])?;
    println!("LEX(2): {e} member {}", lex.member(&e)?);
    Ok(())
}
