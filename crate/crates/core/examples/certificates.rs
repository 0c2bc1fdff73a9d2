//! Failure certificates and their window verification.

use conetop::abelian::GroupSpec;
use conetop::conetop::{ConeSpace, Variant, Window};
use conetop::monoid::MonoidSpec;
use conetop::witness::{self, Certificate};

fn main() -> conetop::Result<()> {
    let z = GroupSpec::free(1);
    let nat = ConeSpace::build(z.clone(), MonoidSpec::generated(vec![z.element_i64(&[1])?]), Variant::ConeStar)?;
    let window = Window::new(8);

    for cert in witness::all_certificates(&nat) {
        let r = witness::verify(&nat, &cert, &window, 16)?;
        println!("{cert}: {}", if r.passed { "verified" } else { "REJECTED" });
    }

    // A tampered chain: the step now points the wrong way.
    let chain = witness::make_2pc_failing_chain(&nat).expect("N is not a group");
    if let Certificate::OpenChain { step, bound } = chain {
        let bad = Certificate::OpenChain { step: z.neg(&step), bound };
        let r = witness::verify(&nat, &bad, &window, 16)?;
        println!("{bad}: passed {}, reason {:?}", r.passed, r.failure.map(|f| f.reason));
    }
    println!("{}", serde_json::to_string(&witness::make_p_space_refuter(&nat)?).unwrap());
    Ok(())
}
