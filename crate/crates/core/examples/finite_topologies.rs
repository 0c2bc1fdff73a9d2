//! Small finite topologies: enumeration, regularization and the lemma sweep.

use conetop::fintop::{self, mask, FinTopology};

fn main() -> conetop::Result<()> {
    for n in 1..=4 {
        println!("topologies on {n} points: {}", fintop::enumerate_topologies(n)?.len());
    }
    let sierpinski = fintop::generate(2, &[mask(&[0])])?;
    println!("Sierpinski opens {:?}", sierpinski.opens());
    println!("regularization {:?}", sierpinski.regularization().opens());
    println!("is antidiscrete: {}", sierpinski.regularization() == FinTopology::antidiscrete(2));

    let left = fintop::generate(2, &[mask(&[0])])?;
    let right = fintop::generate(2, &[mask(&[1])])?;
    println!("sup of the two Sierpinski spaces: {:?}", fintop::supremum(&left, &right)?.opens());

    let r = fintop::verify_lemmas(3)?;
    println!(
        "n=3: {} pairs, {} cowide, {} counterexamples",
        r.pairs_checked,
        r.cowide_pairs,
        r.counterexamples.len()
    );
    Ok(())
}
