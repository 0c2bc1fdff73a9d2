//! Closures, compactness, separation and limits in the two topologies.

use conetop::abelian::GroupSpec;
use conetop::conetop::{Atom, ConeSpace, DescribedSet, LimitSet, Sequence, Variant, Window};
use conetop::monoid::MonoidSpec;

fn main() -> conetop::Result<()> {
    let g = GroupSpec::free(2);
    let spec = MonoidSpec::generated(vec![g.element_i64(&[1, 0])?, g.element_i64(&[1, 1])?]);
    let cone = ConeSpace::build(g.clone(), spec, Variant::Cone)?;
    let star = cone.with_variant(Variant::ConeStar);

    let a = DescribedSet::new(vec![Atom::Point(g.element_i64(&[2, 1])?), Atom::PlusS(g.element_i64(&[0, 3])?)]);
    println!("A = {a}");
    println!("closure in the cone topology: {}", cone.closure(&a)?);

    let k = DescribedSet::new(vec![Atom::PlusS(g.element_i64(&[0, 0])?)]);
    let v = cone.is_compact(&k)?;
    println!("{k} compact: {} (cover {:?})", v.compact, v.finite_cover.iter().map(ToString::to_string).collect::<Vec<_>>());

    for s in [&cone, &star] {
        let sep = s.separation();
        println!("[{}] T0 {} T1 {} T2 {}", s.variant(), sep.t0, sep.t1, sep.hausdorff);
    }

    // Cone* closure on a finite window, with the probes (1,0) and (1,1).
    let window = Window::new(3);
    let probes = [g.element_i64(&[1, 0])?, g.element_i64(&[1, 1])?];
    let point = DescribedSet::new(vec![Atom::Point(g.element_i64(&[0, 0])?)]);
    let trace = star.window_closure(&point, &window, &probes)?;
    println!("[cone*] window closure of {point}: {} points", trace.len());

    let seq = Sequence::affine(g.element_i64(&[0, 0])?, g.element_i64(&[1, 0])?);
    let report = cone.limits(&seq, &[], 16, &Window::new(4))?;
    let limits = match &report.limits {
        LimitSet::All => "all of G".to_string(),
        LimitSet::Empty => "none".to_string(),
        LimitSet::Described(d) => d.to_string(),
        LimitSet::Sampled(pts) => format!("{} of {} window points", pts.len(), report.points.len()),
    };
    println!("[cone] limits of n(1,0): {limits}");
    Ok(())
}
