use fragsim::{FragmentId, Oscillation, SiteId, WorkloadSpec, WorkloadStream};

fn counts(spec: &WorkloadSpec, steps: u64) -> (Vec<u64>, u64) {
    let mut stream = WorkloadStream::new(spec).unwrap();
    let mut c = vec![0u64; spec.n];
    let mut total = 0;
    for step in 0..steps {
        if let Some(ev) = stream.next_event(step, FragmentId(0)) {
            c[ev.requester.0] += 1;
            total += 1;
        }
    }
    (c, total)
}

fn within_4_sigma(count: u64, total: u64, p: f64) -> bool {
    let mean = total as f64 * p;
    let sd = (total as f64 * p * (1.0 - p)).sqrt();
    (count as f64 - mean).abs() <= 4.0 * sd.max(1e-12)
}

#[test]
fn requester_frequencies() {
    let probs = vec![0.05, 0.4, 0.25, 0.0, 0.3];
    for seed in [0, 1, 99] {
        let spec = WorkloadSpec::uniform_rate(5, 1, probs.clone(), seed);
        let (c, total) = counts(&spec, 100_000);
        assert_eq!(total, 100_000);
        for (s, &p) in probs.iter().enumerate() {
            assert!(
                within_4_sigma(c[s], total, p),
                "seed {seed} site {s}: {}",
                c[s]
            );
        }
        assert_eq!(c[3], 0);
    }
}

#[test]
fn inactive_sites_renormalize() {
    let probs = vec![0.1, 0.2, 0.3, 0.4];
    let mut spec = WorkloadSpec::uniform_rate(4, 1, probs, 5);
    spec.active = vec![SiteId(1), SiteId(3)];
    let (c, total) = counts(&spec, 60_000);
    assert_eq!(c[0] + c[2], 0);
    // 0.2 and 0.4 rescaled by 1 / 0.6.
    assert!(within_4_sigma(c[1], total, 1.0 / 3.0));
    assert!(within_4_sigma(c[3], total, 2.0 / 3.0));
}

#[test]
fn rate_thins_events() {
    let mut spec = WorkloadSpec::uniform_rate(3, 1, vec![0.2, 0.3, 0.5], 11);
    spec.rate = 0.3;
    let (c, total) = counts(&spec, 100_000);
    assert!(within_4_sigma(total, 100_000, 0.3), "{total}");
    for (s, p) in [0.2, 0.3, 0.5].into_iter().enumerate() {
        assert!(within_4_sigma(c[s], total, p));
    }
}

#[test]
fn oscillation_swaps_per_block() {
    let mut spec = WorkloadSpec::uniform_rate(3, 1, vec![0.9, 0.05, 0.05], 2);
    spec.oscillation = Some(Oscillation {
        a: SiteId(0),
        b: SiteId(2),
        period: 100,
    });
    let mut stream = WorkloadStream::new(&spec).unwrap();
    let mut blocks = vec![[0u64; 3]; 40];
    for step in 0..4_000 {
        let ev = stream.next_event(step, FragmentId(0)).unwrap();
        blocks[step as usize / 100][ev.requester.0] += 1;
    }
    let (even, odd) =
        blocks
            .iter()
            .enumerate()
            .fold(([0u64; 3], [0u64; 3]), |(mut e, mut o), (i, b)| {
                let acc = if i % 2 == 0 { &mut e } else { &mut o };
                for s in 0..3 {
                    acc[s] += b[s];
                }
                (e, o)
            });
    assert!(within_4_sigma(even[0], 2_000, 0.9));
    assert!(within_4_sigma(odd[2], 2_000, 0.9));
    assert!(within_4_sigma(odd[0], 2_000, 0.05));
}

#[test]
fn identical_seeds_identical_streams() {
    let spec = WorkloadSpec::uniform_rate(6, 2, vec![1.0 / 6.0; 6], 42);
    let draw = || {
        let mut s = WorkloadStream::new(&spec).unwrap();
        (0..5_000)
            .flat_map(|step| (0..2).map(move |f| (step, f)))
            .map(|(step, f)| s.next_event(step, FragmentId(f)).unwrap().requester)
            .collect::<Vec<_>>()
    };
    assert_eq!(draw(), draw());
    let mut other = spec.clone();
    other.seed = 43;
    let mut s = WorkloadStream::new(&other).unwrap();
    let b: Vec<_> = (0..5_000)
        .map(|step| s.next_event(step, FragmentId(0)).unwrap().requester)
        .collect();
    assert_ne!(draw().into_iter().step_by(2).collect::<Vec<_>>(), b);
}
