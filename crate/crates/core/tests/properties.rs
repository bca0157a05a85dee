use proptest::prelude::*;

use heapable::complete01::complete_heap_01;
use heapable::greedy::{decide_heapable, Decision, GreedyState};
use heapable::io::{format_sequence, format_tree, parse_sequence, parse_tree};
use heapable::key::{Key, Sequence};
use heapable::oracle::{
    bt_completely_heapable, bt_heapable, exact_lchs, exact_lds, exact_lhs, exact_lis, for_each_witness, SearchBudget,
};
use heapable::subseq::thm6_blocks;
use heapable::tree::{dominates, signature_of, verify_complete, verify_heap, HeapTree};

fn small_seq(max_len: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(0i64..6, 1..=max_len)
}

fn greedy_tree(seq: &[i64]) -> Option<HeapTree<i64>> {
    match decide_heapable(seq) {
        Ok(Decision::Heapable(t)) => Some(t),
        _ => None,
    }
}

proptest! {
    #[test]
    fn greedy_matches_backtracking(seq in small_seq(8)) {
        let greedy = greedy_tree(&seq);
        prop_assert_eq!(greedy.is_some(), bt_heapable(&seq, SearchBudget::default()).unwrap());
        if let Some(t) = greedy {
            prop_assert_eq!(verify_heap(&seq, &t), Ok(true));
        }
    }

    #[test]
    fn heapability_is_closed_under_prefixes(seq in small_seq(12)) {
        if let Ok(Decision::NotHeapable { index }) = decide_heapable(&seq) {
            for cut in index + 1..=seq.len() {
                prop_assert!(greedy_tree(&seq[..cut]).is_none());
            }
            prop_assert!(greedy_tree(&seq[..index]).is_some() || index == 0);
        }
    }

    #[test]
    fn greedy_signature_dominates_every_witness(seq in small_seq(6)) {
        let mut state = GreedyState::new();
        if seq.iter().enumerate().all(|(i, &v)| state.insert(v, i).is_ok()) {
            let best = state.signature();
            let mut ok = true;
            for_each_witness(&seq, SearchBudget::default(), |t| {
                let sig = signature_of(t).unwrap();
                ok &= dominates(&best, &sig) == Ok(true);
                ok
            })
            .unwrap();
            prop_assert!(ok);
        }
    }

    #[test]
    fn subsequence_lengths_are_ordered(seq in small_seq(10)) {
        let (lhs, idx) = exact_lhs(&seq, SearchBudget::default()).unwrap();
        let (lchs, _) = exact_lchs(&seq, SearchBudget::default()).unwrap();
        prop_assert!(exact_lis(&seq) <= lhs);
        prop_assert!(lchs <= lhs && lhs <= seq.len());
        prop_assert_eq!(idx.len(), lhs);
        let picked: Vec<i64> = idx.iter().map(|&i| seq[i]).collect();
        prop_assert!(greedy_tree(&picked).is_some());
        prop_assert_eq!(lhs == seq.len(), greedy_tree(&seq).is_some());
    }

    #[test]
    fn binary_complete_heaps_match_backtracking(bits in prop::collection::vec(0u8..2, 1..=15)) {
        let fast = complete_heap_01(&bits);
        if let Ok(c) = &fast {
            prop_assert_eq!(verify_heap(&c.padded, &c.tree), Ok(true));
            prop_assert_eq!(verify_complete(&c.tree), Ok(true));
        }
        let padded = heapable::complete01::pad_to_perfect(&bits);
        prop_assert_eq!(fast.is_ok(), bt_completely_heapable(&padded, SearchBudget::default()).unwrap());
    }

    #[test]
    fn sequence_text_round_trips(items in prop::collection::vec(
        prop_oneof![
            any::<i64>().prop_map(Key::Rank),
            (any::<i64>(), any::<i64>(), any::<i64>()).prop_map(|(a, b, c)| Key::Triple(a, b, c)),
        ],
        0..20,
    )) {
        let text = format_sequence(&items);
        prop_assert_eq!(parse_sequence(&text).unwrap(), Sequence::new(items));
    }

    #[test]
    fn tree_text_round_trips(seq in small_seq(30)) {
        if let Some(t) = greedy_tree(&seq) {
            prop_assert_eq!(parse_tree(&format_tree(&t), &seq).unwrap(), t);
        }
    }

    #[test]
    fn block_sequences_have_short_decreasing_runs(n in 1usize..200) {
        let (seq, b) = thm6_blocks(n);
        prop_assert!(b * ((1usize << b) - 1) >= n);
        prop_assert_eq!(seq.len(), b * (n / b));
        prop_assert_eq!(exact_lds(&seq), n / b);
        prop_assert_eq!(exact_lis(&seq), if seq.is_empty() { 0 } else { b });
    }
}
