use num_rational::Ratio;
use proptest::prelude::*;

use regenstat::extremes::{approx_cdf, enumerate_j, gamma, gamma_bruteforce, ClusterVector};
use regenstat::io::{read_cycles_csv, write_cycles_csv};
use regenstat::models::dist::TailDist;
use regenstat::models::prescribed::MRule;
use regenstat::{closed_form_profile, simulate_cycle, ExtReal, ModelSpec, RngStream};

type Q = Ratio<i128>;

/// Cluster vectors with total mass at most one.
fn cluster(len: usize) -> impl Strategy<Value = Vec<f64>> {
    (prop::collection::vec(0.001f64..1.0, len), 0.0f64..=1.0).prop_map(|(raw, mass)| {
        let total: f64 = raw.iter().sum();
        raw.iter().map(|u| mass * u / total).collect()
    })
}

fn rational_cluster(len: usize) -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec(0i128..=20, len).prop_map(|raw| {
        let total: i128 = raw.iter().sum::<i128>().max(1) + 3;
        raw.into_iter().map(|a| Q::new(a, total)).collect()
    })
}

fn model() -> impl Strategy<Value = ModelSpec> {
    prop_oneof![
        (0.05f64..0.95).prop_map(|p| ModelSpec::GeometricJump { p }),
        (0.05f64..0.45).prop_map(|p| ModelSpec::ReflectedWalk { p }),
        cluster(3).prop_map(|mut b| {
            let s: f64 = b.iter().sum();
            b[0] += 1.0 - s;
            ModelSpec::PrescribedBeta {
                beta: b,
                tail: TailDist::pareto(2.0),
                m_rule: MRule::Log2,
            }
        }),
    ]
}

proptest! {
    #[test]
    fn j_members_satisfy_constraints(q in 1usize..9, k in 0usize..9) {
        let set = enumerate_j(q, k);
        for j in &set.members {
            prop_assert_eq!(j.len(), q.saturating_sub(1));
            prop_assert_eq!(j.iter().sum::<usize>(), k);
            let weight: usize = j.iter().enumerate().map(|(i, &c)| (i + 1) * c).sum();
            prop_assert!(weight < q);
        }
    }

    #[test]
    fn exact_gamma_equals_enumeration(q in 2usize..7, k in 0usize..6, raw in rational_cluster(5)) {
        let beta = ClusterVector::new(raw[..q - 1].to_vec()).unwrap();
        let k = k.min(q - 1);
        prop_assert_eq!(gamma(q, k, &beta).unwrap(), gamma_bruteforce(q, k, &beta).unwrap());
    }

    #[test]
    fn approx_is_a_distribution_in_q_and_gn(b in cluster(5), g1 in 0.0f64..=1.0, g2 in 0.0f64..=1.0) {
        let beta = ClusterVector::new(b).unwrap();
        let (lo, hi) = if g1 <= g2 { (g1, g2) } else { (g2, g1) };
        let mut prev = 0.0;
        for q in 1..=6 {
            let a = approx_cdf(q, lo, &beta).unwrap();
            prop_assert!((0.0..=1.0).contains(&a));
            prop_assert!(a >= prev - 1e-15);
            prop_assert!(approx_cdf(q, hi, &beta).unwrap() >= a - 1e-12);
            prev = a;
        }
    }

    #[test]
    fn approx_in_f32_tracks_f64(b in cluster(3), gn in 0.01f64..=1.0) {
        let beta64 = ClusterVector::new(b.clone()).unwrap();
        let beta32 = ClusterVector::new(b.iter().map(|&x| x as f32).collect()).unwrap();
        for q in 1..=4 {
            let a = approx_cdf(q, gn, &beta64).unwrap();
            let c = approx_cdf(q, gn as f32, &beta32).unwrap();
            prop_assert!((a - f64::from(c)).abs() < 1e-4);
        }
    }

    #[test]
    fn cycles_are_well_formed(m in model(), seed in any::<u64>(), r in 1usize..5) {
        let mut rng = RngStream::new(seed, 0);
        let records: Vec<_> = (0..50).map(|_| simulate_cycle(&m, r, &mut rng).unwrap()).collect();
        for c in &records {
            prop_assert!(c.length() >= 1);
            prop_assert!(c.maxima().windows(2).all(|w| w[0] >= w[1]));
            for (i, v) in c.maxima().iter().enumerate() {
                prop_assert_eq!(v.is_neg_inf(), i as u64 >= c.length());
            }
            prop_assert!(c.exceedances(-1.0) as u64 == c.length().min(r as u64));
        }
        let mut buf = Vec::new();
        write_cycles_csv(&mut buf, &records).unwrap();
        prop_assert_eq!(read_cycles_csv(buf.as_slice()).unwrap(), records);
    }

    #[test]
    fn profiles_are_monotone(m in model(), xs in prop::collection::vec(-2.0f64..60.0, 2..20)) {
        let prof = closed_form_profile(&m).unwrap();
        let mut xs = xs;
        xs.sort_by(f64::total_cmp);
        let gs: Vec<f64> = xs.iter().map(|&x| prof.g(x)).collect();
        prop_assert!(gs.iter().all(|g| (0.0..=1.0).contains(g)));
        prop_assert!(gs.windows(2).all(|w| w[0] <= w[1] + 1e-15));
        for &x in &xs {
            let total: f64 = (1..=6).filter_map(|i| prof.beta_at(x, i)).sum();
            prop_assert!(total <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn text_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        let v = ExtReal::Finite(x);
        prop_assert_eq!(v.to_string().parse::<ExtReal>().unwrap(), v);
    }
}
