//! Shared random generators for the integration suites.

use std::collections::BTreeSet;

use depsrl::core::{AnnotatedSentence, Argument, DepTree, SrlFrame, Token};
use rand::rngs::StdRng;
use rand::Rng;

pub const SRL_LABELS: &[&str] = &[
    "ARG0", "ARG1", "ARG2", "ARG3", "ARG4", "ARG5", "ARGM-TMP", "ARGM-LOC", "ARGM-MNR",
    "ARGM-MOD", "ARGM-NEG", "ARGM-DIS", "ARGM-ADV", "ARGM-PRP", "C-ARG0", "C-ARG1", "R-ARG0",
    "R-ARG1", "R-ARGM-TMP", "A0", "A1",
];

pub const SYN_LABELS: &[&str] = &[
    "nsubj", "dobj", "iobj", "xcomp", "ccomp", "conj", "cc", "det", "amod", "advmod", "rcmod",
    "vmod", "mmod", "prep", "pobj", "mark", "aux", "auxpass", "nsubjpass", "punct", "root", "dep",
    "tmod", "poss", "neg", "expl",
];

/// A random valid tree: every token attaches to an already-attached node.
/// With `multi_root` additional tokens may attach directly to position 0.
pub fn random_tree(rng: &mut StdRng, n: usize, multi_root: bool) -> DepTree {
    let mut order: Vec<usize> = (1..=n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    let mut heads = vec![0usize; n];
    for (k, &tok) in order.iter().enumerate() {
        heads[tok - 1] = if k == 0 || (multi_root && rng.gen_bool(0.15)) {
            0
        } else {
            order[rng.gen_range(0..k)]
        };
    }
    let rels = (0..n)
        .map(|_| SYN_LABELS[rng.gen_range(0..SYN_LABELS.len())].to_string())
        .collect();
    DepTree::new(heads, rels).expect("construction is always a tree")
}

pub fn random_sentence(rng: &mut StdRng, max_len: usize) -> AnnotatedSentence {
    let n = rng.gen_range(1..=max_len);
    let multi_root = rng.gen_bool(0.3);
    let tree = random_tree(rng, n, multi_root);
    let tokens: Vec<Token> = (1..=n)
        .map(|i| {
            let form = format!("w{}{}", i, rng.gen_range(0..100));
            if rng.gen_bool(0.7) {
                Token::with_pos(i, form, "NN")
            } else {
                Token::new(i, form)
            }
        })
        .collect();
    let mut frames = Vec::new();
    let mut preds = BTreeSet::new();
    for _ in 0..rng.gen_range(0..=2) {
        let p = rng.gen_range(1..=n);
        if !preds.insert(p) {
            continue;
        }
        let mut used = vec![false; n + 1];
        used[p] = true;
        let mut args = Vec::new();
        for _ in 0..rng.gen_range(0..=3) {
            let a = rng.gen_range(1..=n);
            let b = rng.gen_range(a..=n.min(a + 4));
            if (a..=b).any(|t| used[t]) {
                continue;
            }
            for t in a..=b {
                used[t] = true;
            }
            args.push(Argument::new(
                SRL_LABELS[rng.gen_range(0..SRL_LABELS.len())],
                a,
                b,
            ));
        }
        frames.push(SrlFrame::new(p, args));
    }
    AnnotatedSentence::new(tokens, tree, frames)
}

pub fn random_document(rng: &mut StdRng) -> Vec<AnnotatedSentence> {
    let sentences = rng.gen_range(1..=4);
    (0..sentences).map(|_| random_sentence(rng, 9)).collect()
}
