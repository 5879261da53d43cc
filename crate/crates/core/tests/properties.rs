mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sparseprep::gf2linalg::{
    anti_diag_removal, apply_schedule, lower_elim, lu_decompose, rank, up_elim_comp,
};
use sparseprep::qasm::{parse_qasm, to_qasm};
use sparseprep::simulator::{compare_states, index_to_bits, run, CompareMode};
use sparseprep::synthesis::{build_basis_matrix, preprocess_zero_column};
use sparseprep::wstate::build_w_circuit;
use sparseprep::{
    synthesize, BitMatrix, Circuit, Gate, PermutationMap, StateVector, TreeStrategy,
};

fn matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = BitMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(any::<bool>(), c), r)
            .prop_map(|rows| BitMatrix::from_bools(&rows).unwrap())
    })
}

/// `cols` distinct nonzero columns of height `rows`.
fn basis_columns(rows: usize, cols: usize) -> impl Strategy<Value = BitMatrix> {
    prop::collection::hash_set(1u32..(1 << rows), cols).prop_map(move |set| {
        let mut v: Vec<u32> = set.into_iter().collect();
        v.sort();
        let columns: Vec<Vec<bool>> = v
            .iter()
            .map(|&x| (0..rows).map(|r| x >> r & 1 == 1).collect())
            .collect();
        BitMatrix::from_columns(rows, &columns)
    })
}

fn gate(n: usize) -> impl Strategy<Value = Gate> {
    let q = 0..n;
    let angle = -7.0f64..7.0;
    prop_oneof![
        q.clone().prop_map(Gate::X),
        q.clone().prop_map(Gate::H),
        q.clone().prop_map(Gate::T),
        q.clone().prop_map(Gate::Sdg),
        (q.clone(), angle.clone()).prop_map(|(a, t)| Gate::RY(a, t)),
        (q.clone(), angle.clone()).prop_map(|(a, t)| Gate::Phase(a, t)),
        (q.clone(), q.clone()).prop_filter_map("distinct", |(a, b)| (a != b).then_some(Gate::CX(a, b))),
        (q.clone(), q.clone()).prop_filter_map("distinct", |(a, b)| (a != b).then_some(Gate::CH(a, b))),
        (q.clone(), q.clone(), angle).prop_filter_map("distinct", |(a, b, t)| {
            (a != b).then_some(Gate::CRY(a, b, t))
        }),
        (q.clone(), q.clone(), q).prop_filter_map("distinct", |(a, b, c)| {
            (a != b && b != c && a != c).then_some(Gate::CCX(a, b, c))
        }),
    ]
}

fn circuit(n: usize, len: usize) -> impl Strategy<Value = Circuit> {
    prop::collection::vec(gate(n), 0..len).prop_map(move |g| Circuit::from_gates(n, g).unwrap())
}

fn distinct_nonzero_columns(m: &BitMatrix) -> bool {
    m.has_distinct_nonzero_columns()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn lu_recomposes(m in matrix(12, 12)) {
        let lu = lu_decompose(&m);
        prop_assert_eq!(lu.permuted(&m), lu.product());
        prop_assert_eq!(lu.rank, rank(&m));
        for i in 0..lu.rank {
            prop_assert!(lu.l.get(i, i) && lu.u.get(i, i));
        }
        for i in lu.rank..lu.u.rows() {
            prop_assert!(lu.u.row_is_zero(i));
        }
        prop_assert!(lu.u.is_upper_triangular());
    }

    #[test]
    fn upper_elimination_reaches_identity(m in basis_columns(8, 8)) {
        let u = lu_decompose(&m).u;
        let up = up_elim_comp(&u).unwrap();
        prop_assert!(up.replay(&u).unwrap().is_identity());
        prop_assert_eq!(up.schedule.and_count(), 8 - rank(&u));
        prop_assert!(up.schedule.rounds.iter().all(|r| r.is_disjoint()));
    }

    #[test]
    fn lower_elimination_reaches_identity_block(
        bits in prop::collection::vec(any::<bool>(), 60)
    ) {
        let (rows, cols) = (10, 6);
        let mut l = BitMatrix::identity_block(rows, cols);
        let mut it = bits.into_iter();
        for r in 0..rows {
            for c in 0..cols.min(r) {
                l.set(r, c, it.next().unwrap_or(false));
            }
        }
        let s = lower_elim(&l).unwrap();
        prop_assert_eq!(apply_schedule(&l, &s).unwrap(), BitMatrix::identity_block(rows, cols));
        prop_assert_eq!(s.and_count(), 0);
    }

    #[test]
    fn anti_diagonal_rounds_are_disjoint(bits in prop::collection::vec(any::<bool>(), 45), i in 1usize..17) {
        let n = 10;
        let mut u = BitMatrix::identity(n);
        let mut it = bits.into_iter();
        for r in 0..n {
            for c in r + 1..n {
                u.set(r, c, it.next().unwrap());
            }
        }
        // clear everything before anti-diagonal i first
        let mut cur = u;
        for d in 1..i {
            cur = anti_diag_removal(d, &cur).matrix;
        }
        let a = anti_diag_removal(i, &cur);
        prop_assert!(a.removed);
        prop_assert!(a.round.is_disjoint());
        let touched = a.round.touched();
        prop_assert_eq!(touched.len(), 2 * a.round.len());
        for k in 0..n {
            if i >= k && i - k < n && i - k > k {
                prop_assert!(!a.matrix.get(k, i - k));
            }
        }
    }

    #[test]
    fn forward_schedules_keep_columns_distinct(m in basis_columns(7, 6)) {
        let (pre, _) = preprocess_zero_column(&m).unwrap();
        prop_assert!(distinct_nonzero_columns(&pre));
        let lu = lu_decompose(&pre);
        let mut work = lu.permuted(&pre);
        let lower = lower_elim(&lu.l).unwrap();
        for r in &lower.rounds {
            r.apply(&mut work).unwrap();
            prop_assert!(distinct_nonzero_columns(&work));
        }
        let up = up_elim_comp(&lu.u).unwrap();
        let mut swaps = up.swaps.iter().peekable();
        for (pos, r) in up.schedule.rounds.iter().enumerate() {
            while let Some(sw) = swaps.next_if(|s| s.round == pos) {
                work.swap_cols(sw.a, sw.b);
            }
            r.apply(&mut work).unwrap();
            prop_assert!(distinct_nonzero_columns(&work));
        }
        for sw in swaps {
            work.swap_cols(sw.a, sw.b);
        }
        prop_assert_eq!(work, BitMatrix::identity_block(7, 6));

        // forward then backward is the identity on any matrix
        let fwd = lower.concat(&up.schedule);
        let there = apply_schedule(&BitMatrix::identity_block(7, 6), &fwd).unwrap();
        let back = apply_schedule(&there, &fwd.reversed()).unwrap();
        prop_assert_eq!(back, BitMatrix::identity_block(7, 6));

        let rounds = lower.rounds.len() + up.schedule.rounds.len();
        prop_assert!(rounds <= 2 * (2 * 6 + 7) + 8);
    }

    #[test]
    fn qasm_round_trip(c in circuit(4, 30)) {
        let back = parse_qasm(&to_qasm(&c)).unwrap().circuit;
        prop_assert_eq!(back, c);
    }

    #[test]
    fn remap_commutes_with_simulation(c in circuit(4, 20), perm in Just((0..4).collect::<Vec<usize>>()).prop_shuffle(), idx in 0usize..16) {
        let sigma = PermutationMap::from_vec(perm).unwrap();
        let bits = index_to_bits(idx, 4);
        // qubit q of the input moves to sigma(q)
        let mut moved = vec![false; 4];
        for q in 0..4 {
            moved[sigma.apply(q)] = bits[q];
        }
        let direct = run(&c, &StateVector::from_bits(&bits).unwrap()).unwrap();
        let remapped = run(
            &c.remap_qubits(&sigma).unwrap(),
            &StateVector::from_bits(&moved).unwrap(),
        )
        .unwrap();
        for j in 0..16 {
            let b = index_to_bits(j, 4);
            let mut mb = vec![false; 4];
            for q in 0..4 {
                mb[sigma.apply(q)] = b[q];
            }
            prop_assert!((direct.amplitude(&b) - remapped.amplitude(&mb)).norm() < 1e-12);
        }
        prop_assert_eq!(c.remap_qubits(&sigma).unwrap().resource_report(), c.resource_report());
    }

    #[test]
    fn depth_and_report_sanity(c in circuit(5, 40), g in gate(5)) {
        let r = c.resource_report();
        prop_assert!(r.depth <= r.size);
        prop_assert!(r.non_clifford_t <= r.non_clifford && r.non_clifford <= r.size);
        let mut longer = c.clone();
        longer.push(g);
        prop_assert!(longer.depth() >= c.depth());
        let clifford: Vec<Gate> = c
            .gates
            .iter()
            .copied()
            .filter(|g| g.class() == sparseprep::circuit::GateClass::Clifford)
            .collect();
        let rc = Circuit::from_gates(5, clifford).unwrap().resource_report();
        prop_assert_eq!((rc.non_clifford, rc.non_clifford_t), (0, 0));
    }

    #[test]
    fn w_circuits_prepare_their_states(seed in any::<u64>(), n in 1usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = common::random_tree(&mut rng, n);
        let c = build_w_circuit(&t);
        prop_assert!(c.size() <= 3 * n);
        prop_assert!(c.depth() <= 2 * t.height() + 1);
        let mut one = vec![false; n];
        one[0] = true;
        let out = run(&c, &StateVector::from_bits(&one).unwrap()).unwrap();
        for (k, a) in t.amplitudes().into_iter().enumerate() {
            let mut e = vec![false; n];
            e[k] = true;
            prop_assert!((out.amplitude(&e) - a).norm() < 1e-10);
        }
        let zero = StateVector::zero(n).unwrap();
        prop_assert_eq!(run(&c, &zero).unwrap(), zero);
    }

    #[test]
    fn synthesis_is_exact(seed in any::<u64>(), n in 1usize..7, s_frac in 0.0f64..1.0, strat in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = 1 + ((s_frac * (1usize << n).min(9) as f64) as usize).min((1 << n).min(9) - 1);
        let st = common::random_state(&mut rng, n, s);
        let r = synthesize(&st, TreeStrategy::ALL[strat]).unwrap();
        let m = n.max(s);
        prop_assert_eq!(r.circuit.num_qubits, m);
        prop_assert_eq!(r.ancilla_count, m - n);
        prop_assert!(r.verify(&st, CompareMode::Exact, 1e-9).unwrap().pass);
        let (pre, _) = preprocess_zero_column(&build_basis_matrix(&st)).unwrap();
        prop_assert_eq!(r.ccx_count(), s - rank(&pre));
        prop_assert!(r.report.non_clifford <= 3 * s);
    }
}

#[test]
fn compare_modes_on_phase_shift() {
    let a = StateVector::from_amplitudes(1, vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)])
        .unwrap();
    let ph = Complex64::from_polar(1.0, 2.0);
    let b = StateVector::from_amplitudes(1, a.amplitudes().iter().map(|x| x * ph).collect()).unwrap();
    assert!(!compare_states(&a, &b, CompareMode::Exact, 1e-9).unwrap().pass);
    assert!(compare_states(&a, &b, CompareMode::GlobalPhase, 1e-12).unwrap().pass);
}
