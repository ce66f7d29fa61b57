use proptest::prelude::*;
use zxmultiway::term::{find_matches, match_term, rewrite_at, substitute, Term};

fn arb_term(depth: u32) -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![Just(Term::atom("a")), Just(Term::atom("b")), Just(Term::atom("e"))];
    leaf.prop_recursive(depth, 64, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Term::app("g", vec![x, y])),
            inner.clone().prop_map(|x| Term::app("inv", vec![x])),
        ]
    })
}

fn arb_pattern() -> impl Strategy<Value = Term> {
    prop_oneof![
        Just("g[x_, y_]"),
        Just("g[x_, x_]"),
        Just("g[x_, g[y_, z_]]"),
        Just("inv[x_]"),
        Just("g[a_, inv[a_]]"),
        Just("e"),
        Just("g[x_, e]"),
    ]
    .prop_map(|s| s.parse::<Term>().unwrap())
}

// brute force: walk every subterm by explicit recursion, compare structurally
fn naive_matches(p: &Term, t: &Term) -> Vec<Vec<usize>> {
    fn walk(p: &Term, t: &Term, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if naive_match(p, t, &mut Vec::new()) {
            out.push(path.clone());
        }
        for (i, c) in t.children.iter().enumerate() {
            path.push(i);
            walk(p, c, path, out);
            path.pop();
        }
    }
    fn naive_match(p: &Term, t: &Term, seen: &mut Vec<(String, Term)>) -> bool {
        if p.children.is_empty() && p.head.ends_with('_') && p.head.len() > 1 {
            if let Some((_, prev)) = seen.iter().find(|(n, _)| **n == *p.head) {
                return prev == t;
            }
            seen.push((p.head.to_string(), t.clone()));
            return true;
        }
        p.head == t.head
            && p.children.len() == t.children.len()
            && p.children.iter().zip(&t.children).all(|(a, b)| naive_match(a, b, seen))
    }
    let mut out = Vec::new();
    walk(p, t, &mut Vec::new(), &mut out);
    out
}

proptest! {
    #[test]
    fn find_matches_is_exhaustive(t in arb_term(6), p in arb_pattern()) {
        let got: Vec<_> = find_matches(&p, &t).into_iter().map(|(pos, _)| pos).collect();
        prop_assert_eq!(got, naive_matches(&p, &t));
    }

    #[test]
    fn match_substitute_roundtrip(t in arb_term(6), p in arb_pattern()) {
        for (pos, b) in find_matches(&p, &t) {
            prop_assert_eq!(&substitute(&p, &b).unwrap(), t.subterm(&pos).unwrap());
        }
        if let Some(b) = match_term(&p, &t) {
            prop_assert_eq!(substitute(&p, &b).unwrap(), t);
        }
    }

    #[test]
    fn rewrite_is_local(t in arb_term(6)) {
        let lhs: Term = "g[x_, y_]".parse().unwrap();
        let rhs: Term = "g[y, x]".parse().unwrap();
        for (pos, b) in find_matches(&lhs, &t) {
            let out = rewrite_at(&t, &pos, &lhs, &rhs, &b).unwrap();
            for q in t.positions() {
                let prefix = q.len() >= pos.len() && q[..pos.len()] == pos[..];
                let ancestor = pos.len() >= q.len() && pos[..q.len()] == q[..];
                if !prefix && !ancestor {
                    prop_assert_eq!(t.subterm(&q), out.subterm(&q));
                }
            }
        }
    }

    #[test]
    fn parse_print_roundtrip(t in arb_term(6)) {
        prop_assert_eq!(t.to_string().parse::<Term>().unwrap(), t);
    }
}
