fn main() {
    for l in [1usize, 3] {
        let r = adaptive_sim::equiv::oracle_equivalence(l, 10_000, 11).unwrap();
        println!("{r:?}");
    }
}
