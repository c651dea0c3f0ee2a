use core::cmp::Ordering;

/// Graded lexicographic comparison of two sparse exponent vectors.
///
/// Both slices are sorted by variable with no zero exponents. A variable that
/// sorts earlier is the more significant one.
pub(crate) fn grlex<K: Ord>(a: &[(K, u32)], b: &[(K, u32)]) -> Ordering {
    let da: u64 = a.iter().map(|(_, e)| u64::from(*e)).sum();
    let db: u64 = b.iter().map(|(_, e)| u64::from(*e)).sum();
    da.cmp(&db).then_with(|| sparse_lex(a, b))
}

pub(crate) fn sparse_lex<K: Ord>(a: &[(K, u32)], b: &[(K, u32)]) -> Ordering {
    for i in 0.. {
        match (a.get(i), b.get(i)) {
            (None, None) => return Ordering::Equal,
            (Some(_), None) => return Ordering::Greater,
            (None, Some(_)) => return Ordering::Less,
            (Some((ka, ea)), Some((kb, eb))) => match ka.cmp(kb) {
                // `a` has a positive exponent on a variable `b` lacks.
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => match ea.cmp(eb) {
                    Ordering::Equal => continue,
                    other => return other,
                },
            },
        }
    }
    unreachable!()
}

/// Product of two sparse exponent vectors.
pub(crate) fn merge_exponents<K: Ord + Clone>(a: &[(K, u32)], b: &[(K, u32)]) -> alloc::vec::Vec<(K, u32)> {
    let mut out = alloc::vec::Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            Ordering::Equal => {
                out.push((a[i].0.clone(), a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grlex_orders_by_degree_then_first_variable() {
        let x1x2 = [(1, 1), (2, 1)];
        let x1 = [(1, 1)];
        let x2 = [(2, 1)];
        let x1sq = [(1, 2)];
        assert_eq!(grlex(&x1x2, &x1), Ordering::Greater);
        assert_eq!(grlex(&x1, &x2), Ordering::Greater);
        assert_eq!(grlex(&x1sq, &x1x2), Ordering::Greater);
        assert_eq!(grlex::<u32>(&[], &[]), Ordering::Equal);
    }
}
