//! Fits the default chain to the shipped table and prints headline numbers.

use nql_core::{chain, dataset, index, pca};

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/gapminder_2005.csv").into());
    let source = std::fs::read_to_string(&path).expect("read data");
    let table = dataset::parse_table(&source).expect("parse");
    let matrix = dataset::standardize(&table).expect("standardize");
    let basis = pca::eigendecompose(&pca::covariance(&matrix)).expect("eigen");
    let fitted = chain::fit(&matrix, &basis, &chain::ChainConfig::default()).expect("fit");
    let oriented = index::orient(&fitted, &matrix).expect("orient");
    let ranking = index::build_index_table(&matrix, &basis, &oriented).expect("index");

    println!("PC1 explained variance:   {:.4}", pca::explained_variance_ratio(&basis, 1));
    println!(
        "curve explained variance: {:.5}",
        chain::curve_explained_variance(&matrix, &oriented).expect("ev")
    );
    for name in ["Luxembourg", "Swaziland", "Russia", "Egypt"] {
        if let Some(r) = ranking.get(name) {
            println!(
                "{name:<12} nql {:>7.3} (#{:>3})  linear {:>7.3} (#{:>3})",
                r.nql_index, r.nql_rank, r.linear_index, r.linear_rank
            );
        }
    }
}
