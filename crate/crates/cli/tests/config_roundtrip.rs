use gkm::cartan::{int, rat, Rational};
use gkm::qmodules::ModuleKind;
use gkm_cli::{parse_config, SessionConfig};
use num_complex::Complex64;
use proptest::prelude::*;

/// A symmetrizable matrix `a_ij = b_ij / d_i` from symmetric `b` and positive `d`.
fn symmetrizable(n: usize) -> impl Strategy<Value = (Vec<Vec<Rational>>, Vec<Rational>)> {
    (
        prop::collection::vec(1i64..4, n),
        prop::collection::vec(-3i64..=0, n * n),
    )
        .prop_map(move |(d, off)| {
            let mut a = vec![vec![int(0); n]; n];
            for i in 0..n {
                for j in 0..n {
                    let b = if i == j { 2 * d[i] } else { off[i.min(j) * n + i.max(j)] };
                    a[i][j] = rat(b, d[i]);
                }
            }
            (a, d.into_iter().map(int).collect())
        })
}

fn session() -> impl Strategy<Value = SessionConfig> {
    (1usize..4).prop_flat_map(|n| {
        (
            symmetrizable(n),
            1usize..8,
            0usize..6,
            prop::collection::vec(prop::collection::vec((-5i64..6, 1i64..4), n), 0..3),
            (-1.0f64..1.0, -1.0f64..1.0),
            (1e-12f64..1e-3, 2usize..5, 0usize..6, any::<bool>()),
        )
            .prop_map(|((a, d), cap, depth, hws, (re, im), (tol, strands, wl, verma))| {
                let mut c = SessionConfig::new(a, Some(d)).unwrap();
                c.degree_cap = cap;
                c.depth = depth;
                c.highest_weights = hws
                    .into_iter()
                    .map(|w| w.into_iter().map(|(p, q)| rat(p, q)).collect())
                    .collect();
                c.hbar = Complex64::new(re, im);
                c.tolerance = tol;
                c.strands = strands;
                c.word_length = wl;
                c.module = if verma { ModuleKind::Verma } else { ModuleKind::Irreducible };
                c
            })
    })
}

proptest! {
    #[test]
    fn emit_then_parse_is_identity(c in session()) {
        let text = c.emit();
        let back = parse_config(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.emit(), text);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored(c in session()) {
        let decorated: String = c
            .emit()
            .lines()
            .map(|l| format!("\n  {}   # note\n# whole line comment", l))
            .collect::<Vec<_>>()
            .join("\n");
        prop_assert_eq!(parse_config(&decorated).unwrap(), c);
    }
}
