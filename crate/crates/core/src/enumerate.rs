//! Brute-force enumeration of small lattices and monotone maps.

use std::collections::BTreeSet;

use crate::connection::ClassMap;
use crate::lattice::FiniteLattice;

/// Largest size [`lattices_of_size`] will enumerate.
pub const MAX_ENUMERATED: usize = 6;

fn element_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("e{i}")).collect()
}

/// All lattices with `n` elements, one per isomorphism class.
///
/// Elements are named `e0..`, with `e0` the bottom and the last the top.
///
/// # Panics
/// If `n` is zero or exceeds [`MAX_ENUMERATED`].
pub fn lattices_of_size(n: usize) -> Vec<FiniteLattice> {
    assert!((1..=MAX_ENUMERATED).contains(&n), "size {n} out of range");
    let names = element_names(n);
    // candidate strict relations respect the natural numbering, which is a
    // linear extension of every order up to relabelling
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for bits in 0u32..(1 << pairs.len()) {
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if bits >> k & 1 == 1 {
                leq[i * n + j] = true;
            }
        }
        if !transitive(&leq, n) || !(0..n).all(|x| leq[x] && leq[x * n + n - 1]) {
            continue;
        }
        let edges: Vec<(&str, &str)> = pairs
            .iter()
            .filter(|&&(i, j)| leq[i * n + j])
            .map(|&(i, j)| (names[i].as_str(), names[j].as_str()))
            .collect();
        let id = format!("P{n}_{}", out.len());
        let Ok(lattice) = FiniteLattice::new(&id, &names, edges) else {
            continue;
        };
        if seen.insert(canonical(&leq, n)) {
            out.push(lattice);
        }
    }
    out
}

/// All lattices with between 1 and `n` elements.
pub fn lattices_up_to(n: usize) -> Vec<FiniteLattice> {
    (1..=n).flat_map(lattices_of_size).collect()
}

fn transitive(leq: &[bool], n: usize) -> bool {
    (0..n).all(|a| {
        (0..n).all(|b| !leq[a * n + b] || (0..n).all(|c| !leq[b * n + c] || leq[a * n + c]))
    })
}

fn canonical(leq: &[bool], n: usize) -> u64 {
    let mut best = u64::MAX;
    let mut perm: Vec<usize> = (0..n).collect();
    permute(&mut perm, 0, &mut |p| {
        let mut code = 0u64;
        for i in 0..n {
            for j in 0..n {
                code = code << 1 | leq[p[i] * n + p[j]] as u64;
            }
        }
        best = best.min(code);
    });
    best
}

fn permute(perm: &mut [usize], k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == perm.len() {
        visit(perm);
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permute(perm, k + 1, visit);
        perm.swap(k, i);
    }
}

/// Every total monotone map `src → dst`, in lexicographic order of the
/// image tuple.
pub fn monotone_maps(id: &str, src: &FiniteLattice, dst: &FiniteLattice) -> Vec<ClassMap> {
    let classes: Vec<_> = src.classes().collect();
    let targets: Vec<_> = dst.classes().collect();
    let mut out = Vec::new();
    let mut image = vec![0usize; classes.len()];
    loop {
        let monotone = src
            .covers()
            .iter()
            .all(|&(a, b)| dst.leq(targets[image[a.index()]], targets[image[b.index()]]));
        if monotone {
            out.push(ClassMap::from_fn(id, src, dst, |c| {
                targets[image[c.index()]]
            }));
        }
        // odometer, last position fastest
        let mut k = image.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            image[k] += 1;
            if image[k] < targets.len() {
                break;
            }
            image[k] = 0;
        }
    }
}
