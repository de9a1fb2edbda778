use cuspgeom::groups::{FinitelyGenerated, GroupElement, GroupModel};
use cuspgeom::horoball::FreeProductZZ2;
use proptest::prelude::*;

fn models() -> Vec<GroupModel> {
    [
        "free-abelian:2",
        "heisenberg",
        "free:2",
        "lamplighter",
        "cyclic:12",
        "product(free:2,cyclic:3)",
    ]
    .iter()
    .map(|s| GroupModel::parse(s).unwrap())
    .collect()
}

fn element<G: FinitelyGenerated>(g: &G, word: &[usize]) -> G::Element {
    let gens = g.generators();
    word.iter().fold(g.identity(), |acc, &k| {
        g.mul(&acc, &gens[k % gens.len()]).unwrap()
    })
}

fn words() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..64, 0..12)
}

fn check_axioms<G: FinitelyGenerated>(
    g: &G,
    a: &[usize],
    b: &[usize],
    c: &[usize],
) -> Result<(), TestCaseError> {
    let (x, y, z) = (element(g, a), element(g, b), element(g, c));
    let e = g.identity();
    let xy_z = g.mul(&g.mul(&x, &y).unwrap(), &z).unwrap();
    let x_yz = g.mul(&x, &g.mul(&y, &z).unwrap()).unwrap();
    prop_assert_eq!(xy_z, x_yz);
    prop_assert_eq!(g.mul(&x, &e).unwrap(), x.clone());
    prop_assert_eq!(g.mul(&e, &x).unwrap(), x.clone());
    let xi = g.inv(&x).unwrap();
    prop_assert_eq!(g.mul(&x, &xi).unwrap(), e.clone());
    prop_assert_eq!(g.mul(&xi, &x).unwrap(), e);
    // (xy)⁻¹ = y⁻¹x⁻¹
    let lhs = g.inv(&g.mul(&x, &y).unwrap()).unwrap();
    let rhs = g.mul(&g.inv(&y).unwrap(), &xi).unwrap();
    prop_assert_eq!(lhs, rhs);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn group_axioms_hold(a in words(), b in words(), c in words()) {
        for g in models() {
            check_axioms(&g, &a, &b, &c)?;
        }
        check_axioms(&FreeProductZZ2::new(), &a, &b, &c)?;
    }

    #[test]
    fn closed_word_length_is_symmetric_and_subadditive(a in words(), b in words()) {
        for g in models().into_iter().filter(|g| g.closed_word_length(&g.identity()).is_some()) {
            let (x, y) = (element(&g, &a), element(&g, &b));
            let len = |e: &GroupElement| g.closed_word_length(e).unwrap();
            prop_assert_eq!(len(&x), len(&g.inv(&x).unwrap()));
            prop_assert!(len(&g.mul(&x, &y).unwrap()) <= len(&x) + len(&y));
            prop_assert!(len(&x) <= a.len() as u64);
        }
    }
}
