//! Frozen outputs of the seeded generators and of clustering on fixed data.
//! A change here means results are no longer reproducible across versions.

use hwt::condense::{kmeans, partition_ss, Partition, DEFAULT_RESTARTS};
use hwt::datasets::{add_uniform_noise, gaussian_reference, iris, uniform_matrix};
use hwt::hierarchy::build_hierarchy;
use hwt::{Criterion, MergeStep, Node};

#[test]
fn uniform_stream_is_frozen() {
    let u = uniform_matrix(2, 3, 0.0, 7.9, 1).unwrap();
    assert_eq!(
        u.values(),
        &[
            3.179636742952299,
            0.6350313005452767,
            4.7128254293853535,
            1.73266418582202,
            2.2411556712995266,
            5.613820767080759
        ]
    );
}

#[test]
fn noisy_gaussian_structure_is_frozen() {
    let g = add_uniform_noise(&gaussian_reference(), 10.0, 0).unwrap();
    assert_eq!(g.shape(), (1200, 400));
    let sum: f64 = g.values().iter().sum();
    let weighted: f64 = g.values().iter().enumerate().map(|(i, v)| (i % 97) as f64 * v).sum();
    assert!((sum - 589873.487702787).abs() < 1e-6);
    assert!((weighted - 28313895.3825774).abs() < 1e-4);
    assert_eq!(g.get(0, 0), 0.7862361722621276);
    assert_eq!(g.get(300, 100), 10.645853782016527);
}

#[test]
fn iris_ward_tree_is_frozen() {
    let x = iris();
    let t = build_hierarchy(&x, Criterion::Ward).unwrap();
    let pairs: Vec<(Node, Node)> = t.merges()[..3].iter().map(|m| (m.left, m.right)).collect();
    assert_eq!(
        pairs,
        [
            (Node::Leaf(101), Node::Leaf(142)),
            (Node::Leaf(7), Node::Leaf(39)),
            (Node::Leaf(0), Node::Leaf(17))
        ]
    );
    let MergeStep { left, right, level } = *t.merges().last().unwrap();
    assert_eq!((left, right), (Node::Merge(144), Node::Merge(147)));
    let total = partition_ss(&x, &Partition::from_labels(&[0; 150]).unwrap()).unwrap();
    assert!((level - 526.4236).abs() < 1e-9);
    assert!(level < total);
}

#[test]
fn other_criteria_roots_are_frozen() {
    let x = iris();
    let median = build_hierarchy(&x, Criterion::Median).unwrap();
    assert!((median.merges().last().unwrap().level - 18.15686332314275).abs() < 1e-9);
    let average = build_hierarchy(&x, Criterion::UnweightedAverage).unwrap();
    assert!((average.merges().last().unwrap().level - 4.49728250849221).abs() < 1e-9);
}

#[test]
fn iris_three_means() {
    let km = kmeans(&iris(), 3, 0, DEFAULT_RESTARTS).unwrap();
    assert!((km.ss - 78.851441426146).abs() < 1e-9);
    let mut sizes: Vec<usize> = km.partition.clusters().iter().map(Vec::len).collect();
    sizes.sort();
    assert_eq!(sizes, [38, 50, 62]);
}
