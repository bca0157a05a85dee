//! C interface to the heapable library.
//!
//! Sequences cross the boundary as `int64_t` arrays. Trees are opaque
//! handles created by `hp_tree_*` constructors and released with
//! `hp_tree_free`. Every function returns an [`HpStatus`]; panics are caught
//! and reported as `HP_STATUS_PANIC`.

use std::ffi::c_char;
use std::panic::{catch_unwind, UnwindSafe};
use std::ptr;

use heapable::complete01::{complete_heap_01, Complete01Error};
use heapable::greedy::{decide_heapable, Decision};
use heapable::oracle::{exact_heapable_prob, exact_lhs, SearchBudget};
use heapable::tree::{verify_complete, verify_heap, HeapTree};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HpStatus {
    /// Success or a true verdict.
    Ok = 0,
    /// A false verdict.
    False = 1,
    NullArgument = 2,
    InvalidArgument = 3,
    /// A search ran out of budget.
    Exhausted = 4,
    Panic = 5,
}

/// A heap over a sequence of integers.
pub struct HpTree {
    inner: HeapTree<i64>,
}

fn guard(f: impl FnOnce() -> HpStatus + UnwindSafe) -> HpStatus {
    catch_unwind(f).unwrap_or(HpStatus::Panic)
}

/// Borrows `len` items at `p`; a null `p` is allowed only when `len` is 0.
unsafe fn slice<'a, T>(p: *const T, len: usize) -> Option<&'a [T]> {
    if len == 0 {
        Some(&[])
    } else if p.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(p, len))
    }
}

unsafe fn write<T>(out: *mut T, value: T) {
    if !out.is_null() {
        out.write(value);
    }
}

fn boxed(tree: HeapTree<i64>) -> *mut HpTree {
    Box::into_raw(Box::new(HpTree { inner: tree }))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn hp_status_message(status: HpStatus) -> *const c_char {
    let s: &'static str = match status {
        HpStatus::Ok => "ok\0",
        HpStatus::False => "false\0",
        HpStatus::NullArgument => "null argument\0",
        HpStatus::InvalidArgument => "invalid argument\0",
        HpStatus::Exhausted => "search budget exhausted\0",
        HpStatus::Panic => "internal error\0",
    };
    s.as_ptr().cast()
}

/// Decides heapability. Returns `HP_STATUS_OK` if heapable and
/// `HP_STATUS_FALSE` otherwise, writing the index of the first element that
/// found no slot to `out_fail_index` when it is not null.
///
/// # Safety
/// `values` must point to `len` readable integers (or be null with `len` 0).
#[no_mangle]
pub unsafe extern "C" fn hp_decide(values: *const i64, len: usize, out_fail_index: *mut usize) -> HpStatus {
    guard(|| {
        let Some(seq) = slice(values, len) else {
            return HpStatus::NullArgument;
        };
        match decide_heapable(seq) {
            Err(_) | Ok(Decision::Heapable(_)) => HpStatus::Ok,
            Ok(Decision::NotHeapable { index }) => {
                write(out_fail_index, index);
                HpStatus::False
            }
        }
    })
}

/// Builds the greedy heap. On `HP_STATUS_OK` stores a new handle in
/// `*out_tree`; otherwise stores null.
///
/// # Safety
/// `values` must point to `len` readable integers (or be null with `len` 0);
/// `out_tree` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hp_tree_greedy(values: *const i64, len: usize, out_tree: *mut *mut HpTree) -> HpStatus {
    guard(|| {
        if out_tree.is_null() {
            return HpStatus::NullArgument;
        }
        out_tree.write(ptr::null_mut());
        let Some(seq) = slice(values, len) else {
            return HpStatus::NullArgument;
        };
        match decide_heapable(seq) {
            Err(_) => {
                out_tree.write(boxed(HeapTree::new()));
                HpStatus::Ok
            }
            Ok(Decision::Heapable(tree)) => {
                out_tree.write(boxed(tree));
                HpStatus::Ok
            }
            Ok(Decision::NotHeapable { .. }) => HpStatus::False,
        }
    })
}

/// Builds a tree from parent links: node `i` holds `values[seq_index[i]]`
/// and has parent node `parent[i]`, `-1` for the root. A child listed before
/// its sibling is the left child.
///
/// # Safety
/// `values` must point to `len` integers, `seq_index` and `parent` to
/// `count` entries each (nulls allowed for zero lengths); `out_tree` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn hp_tree_from_links(
    values: *const i64,
    len: usize,
    seq_index: *const usize,
    parent: *const isize,
    count: usize,
    out_tree: *mut *mut HpTree,
) -> HpStatus {
    guard(|| {
        if out_tree.is_null() {
            return HpStatus::NullArgument;
        }
        out_tree.write(ptr::null_mut());
        let (Some(seq), Some(idx), Some(par)) = (slice(values, len), slice(seq_index, count), slice(parent, count))
        else {
            return HpStatus::NullArgument;
        };
        let mut links = Vec::with_capacity(count);
        for (&i, &p) in idx.iter().zip(par) {
            let p = match p {
                -1 => None,
                p if p >= 0 => Some(p as usize),
                _ => return HpStatus::InvalidArgument,
            };
            links.push((i, p));
        }
        match HeapTree::from_parent_links(&links, seq) {
            Ok(tree) => {
                out_tree.write(boxed(tree));
                HpStatus::Ok
            }
            Err(_) => HpStatus::InvalidArgument,
        }
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `tree` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hp_tree_free(tree: *mut HpTree) {
    if !tree.is_null() {
        drop(Box::from_raw(tree));
    }
}

/// Number of nodes; 0 for null.
///
/// # Safety
/// `tree` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hp_tree_len(tree: *const HpTree) -> usize {
    tree.as_ref().map_or(0, |t| t.inner.len())
}

/// Number of levels; 0 for null or an empty tree.
///
/// # Safety
/// `tree` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hp_tree_height(tree: *const HpTree) -> usize {
    tree.as_ref().map_or(0, |t| t.inner.height())
}

/// Copies the parent links of every node into the two arrays, which must
/// hold at least `hp_tree_len(tree)` entries each.
///
/// # Safety
/// `tree` must be a live handle and both arrays writable for `cap` entries.
#[no_mangle]
pub unsafe extern "C" fn hp_tree_parent_links(
    tree: *const HpTree,
    out_seq_index: *mut usize,
    out_parent: *mut isize,
    cap: usize,
) -> HpStatus {
    guard(|| {
        let Some(tree) = tree.as_ref() else {
            return HpStatus::NullArgument;
        };
        let links = tree.inner.to_parent_links();
        if links.is_empty() {
            return HpStatus::Ok;
        }
        if out_seq_index.is_null() || out_parent.is_null() {
            return HpStatus::NullArgument;
        }
        if cap < links.len() {
            return HpStatus::InvalidArgument;
        }
        for (i, (idx, parent)) in links.into_iter().enumerate() {
            out_seq_index.add(i).write(idx);
            out_parent.add(i).write(parent.map_or(-1, |p| p as isize));
        }
        HpStatus::Ok
    })
}

/// Checks that `tree` is a heap witness for `values`, and complete when
/// `require_complete` is set. `HP_STATUS_OK` if so, `HP_STATUS_FALSE` if not.
///
/// # Safety
/// `tree` must be a live handle; `values` must point to `len` integers.
#[no_mangle]
pub unsafe extern "C" fn hp_tree_verify(
    tree: *const HpTree,
    values: *const i64,
    len: usize,
    require_complete: bool,
) -> HpStatus {
    guard(|| {
        let (Some(tree), Some(seq)) = (tree.as_ref(), slice(values, len)) else {
            return HpStatus::NullArgument;
        };
        let heap = verify_heap(seq, &tree.inner) == Ok(true);
        let shape = !require_complete || verify_complete(&tree.inner) == Ok(true);
        if heap && shape {
            HpStatus::Ok
        } else {
            HpStatus::False
        }
    })
}

/// Complete heapability of a 0/1 sequence.
///
/// # Safety
/// `bits` must point to `len` bytes, each 0 or 1.
#[no_mangle]
pub unsafe extern "C" fn hp_complete01(bits: *const u8, len: usize) -> HpStatus {
    guard(|| {
        let Some(seq) = slice(bits, len) else {
            return HpStatus::NullArgument;
        };
        match complete_heap_01(seq) {
            Ok(_) => HpStatus::Ok,
            Err(Complete01Error::NotHeapable { .. }) => HpStatus::False,
            Err(_) => HpStatus::InvalidArgument,
        }
    })
}

/// Exact fraction of heapable permutations of `1..=n`, for `n` up to 10.
///
/// # Safety
/// Both outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn hp_exact_heapable_prob(n: usize, out_num: *mut u64, out_den: *mut u64) -> HpStatus {
    guard(|| {
        if out_num.is_null() || out_den.is_null() {
            return HpStatus::NullArgument;
        }
        match exact_heapable_prob(n) {
            Ok(p) => {
                out_num.write(*p.numer());
                out_den.write(*p.denom());
                HpStatus::Ok
            }
            Err(_) => HpStatus::InvalidArgument,
        }
    })
}

/// Length of a longest heapable subsequence, searched exhaustively with at
/// most `budget` node expansions.
///
/// # Safety
/// `values` must point to `len` integers; `out_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hp_exact_lhs(values: *const i64, len: usize, budget: u64, out_len: *mut usize) -> HpStatus {
    guard(|| {
        let Some(seq) = slice(values, len) else {
            return HpStatus::NullArgument;
        };
        if out_len.is_null() {
            return HpStatus::NullArgument;
        }
        match exact_lhs(seq, SearchBudget::new(budget)) {
            Ok((n, _)) => {
                out_len.write(n);
                HpStatus::Ok
            }
            Err(_) => HpStatus::Exhausted,
        }
    })
}
