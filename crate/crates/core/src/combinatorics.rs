//! Enumeration of index multisets in canonical (nondecreasing) order.

/// Visits every multiset of exactly `size` indices drawn with repetition from
/// `0..num_choices`, as a nondecreasing slice, in lexicographic order.
pub fn for_each_multiset_exact<F: FnMut(&[usize])>(num_choices: usize, size: usize, f: &mut F) {
    if num_choices == 0 {
        if size == 0 {
            f(&[]);
        }
        return;
    }
    let mut current = Vec::with_capacity(size);
    recurse_exact(num_choices, size, 0, &mut current, f);
}

fn recurse_exact<F: FnMut(&[usize])>(
    num_choices: usize,
    size: usize,
    lowest: usize,
    current: &mut Vec<usize>,
    f: &mut F,
) {
    if current.len() == size {
        f(current);
        return;
    }
    for i in lowest..num_choices {
        current.push(i);
        recurse_exact(num_choices, size, i, current, f);
        current.pop();
    }
}

/// Visits every multiset of indices from `0..num_choices` of total size at
/// most `max_size`, honoring a per-index multiplicity cap. The empty multiset
/// is visited first; order is lexicographic on the nondecreasing index list.
pub fn for_each_capped_multiset<C, F>(num_choices: usize, cap: C, max_size: usize, f: &mut F)
where
    C: Fn(usize) -> usize,
    F: FnMut(&[usize]),
{
    let mut current = Vec::with_capacity(max_size);
    recurse_capped(num_choices, &cap, max_size, 0, &mut current, f);
}

fn recurse_capped<C, F>(
    num_choices: usize,
    cap: &C,
    max_size: usize,
    lowest: usize,
    current: &mut Vec<usize>,
    f: &mut F,
) where
    C: Fn(usize) -> usize,
    F: FnMut(&[usize]),
{
    f(current);
    if current.len() == max_size {
        return;
    }
    for i in lowest..num_choices {
        let used = current.iter().rev().take_while(|&&j| j == i).count();
        if used >= cap(i) {
            continue;
        }
        current.push(i);
        recurse_capped(num_choices, cap, max_size, i, current, f);
        current.pop();
    }
}
