use satake_core::catalogue::cartan_by_name;
use satake_core::lie::TruncatedAlgebra;

fn main() {
    let cm = cartan_by_name("G2~v").unwrap();
    for h in [4usize, 5, 6, 7] {
        let t = std::time::Instant::now();
        let alg = TruncatedAlgebra::build_with_working(&cm, h, h);
        let dims: usize = alg.lowering_dimensions().values().sum();
        println!("G2~v working={h}: n- dims {dims}, {:?}", t.elapsed());
    }
}
