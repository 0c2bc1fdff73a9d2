//! Normal forms, subgroup indices and coset representatives.

use conetop::abelian::{smith_normal_form, GroupSpec, IntMatrix, SubgroupBasis};

fn main() -> conetop::Result<()> {
    let m = IntMatrix::from_i64(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
    let snf = smith_normal_form(&m);
    println!("M =\n{m}");
    println!("invariant factors: {:?}", snf.invariant_factors().iter().map(ToString::to_string).collect::<Vec<_>>());

    // Z/2 + Z/3 is normalized to Z/6.
    let g = GroupSpec::from_i64(1, &[2, 3])?;
    println!("Z + Z/2 + Z/3 normalizes to {g}");

    let z2 = GroupSpec::free(2);
    let h = SubgroupBasis::generated(&z2, &[z2.element_i64(&[2, 0])?, z2.element_i64(&[1, 3])?])?;
    println!("|Z^2 : <(2,0),(1,3)>| = {}", h.index());
    let reps = h.coset_representatives(16).expect("finite index");
    println!("coset representatives: {}", reps.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "));

    let line = SubgroupBasis::generated(&z2, &[z2.element_i64(&[1, 1])?])?;
    println!(
        "|Z^2 : <(1,1)>| = {}, free direction {}",
        line.index(),
        line.free_direction().expect("infinite index")
    );
    Ok(())
}
