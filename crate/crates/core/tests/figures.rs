use mibound::bounds::*;
use mibound::figures::{build_figure, write_csv, write_svg, FigureId, FigureSpec};
use mibound::gaussian::{overall_accuracy, positive_accuracy, CounterexampleConfig, ThresholdAttack};
use mibound::unlearning::{deletion_capacity, UnlearningPolicy};
use mibound::{Epsilon, Probability};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

fn expected(id: FigureId, label: &str, x: f64) -> f64 {
    let p = |v: f64| Probability::new(v).unwrap();
    let e = |v: f64| Epsilon::new(v).unwrap();
    let eps_of = |l: &str| l.rsplit('_').next().unwrap().parse::<f64>().unwrap();
    let cfg = CounterexampleConfig::default();
    match (id, label) {
        (FigureId::MiBounds, "ours") => positive_accuracy_bounds(e(x), Probability::HALF).upper.value(),
        (FigureId::MiBounds, "erlingsson") => baseline_erlingsson(e(x)).value(),
        (FigureId::MiBounds, "sablayrolles") => baseline_sablayrolles(e(x), Probability::HALF).value(),
        (FigureId::MiBounds, "sablayrolles_raw") => sablayrolles_raw(e(x), Probability::HALF),
        (FigureId::MiBounds, "yeom") => baseline_yeom(e(x)).value(),
        (FigureId::MiBounds, "yeom_raw") => yeom_raw(e(x)),
        (FigureId::MiBoundProb, l) if l.starts_with("upper") => {
            positive_accuracy_bounds(e(eps_of(l)), p(x)).upper.value()
        }
        (FigureId::MiBoundProb, l) if l.starts_with("lower") => {
            positive_accuracy_bounds(e(eps_of(l)), p(x)).lower.value()
        }
        (FigureId::SabComparison, l) if l.starts_with("ours") => {
            positive_accuracy_bounds(e(eps_of(l)), p(x)).upper.value()
        }
        (FigureId::SabComparison, l) if l.starts_with("sablayrolles") => {
            baseline_sablayrolles(e(eps_of(l)), p(x)).value()
        }
        (FigureId::MiAdv, l) => mi_advantage_upper(e(eps_of(l)), p(x)).unwrap(),
        (FigureId::PrivAmpComp, "batch") => (-x).exp(),
        (FigureId::PrivAmpComp, "dataset") => (1.0 - x) / x,
        (FigureId::ThresholdPosAcc, _) => positive_accuracy(ThresholdAttack::new(x).unwrap(), &cfg).value(),
        (FigureId::ThresholdAcc, _) => overall_accuracy(ThresholdAttack::new(x).unwrap(), &cfg).value(),
        (FigureId::DelCapacity, "capacity") => {
            deletion_capacity(&UnlearningPolicy::new(p(0.8), e(1.0), 10_000, x).unwrap()).capacity
        }
        (FigureId::DelCapacity, "linear") => x,
        other => panic!("unexpected series {other:?}"),
    }
}

#[test]
fn plotted_values_match_operations() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for id in FigureId::ALL {
        for s in build_figure(&FigureSpec::new(id)).unwrap() {
            for _ in 0..100 {
                let (x, y) = s.points()[rng.random_range(0..s.len())];
                let want = expected(id, s.label(), x);
                assert!(
                    (y - want).abs() <= 1e-12 * want.abs().max(1.0),
                    "{id}/{}: x = {x}, plotted {y}, expected {want}",
                    s.label()
                );
            }
        }
    }
}

fn digest(path: &std::path::Path) -> Vec<u8> {
    Sha256::digest(std::fs::read(path).unwrap()).to_vec()
}

#[test]
fn identical_specs_give_identical_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for id in FigureId::ALL {
        for dir in [&a, &b] {
            let s = build_figure(&FigureSpec::new(id)).unwrap();
            write_csv(&s, dir.path().join(format!("{id}.csv"))).unwrap();
            write_svg(&s, dir.path().join(format!("{id}.svg")), id.title()).unwrap();
        }
        for ext in ["csv", "svg"] {
            let name = format!("{id}.{ext}");
            assert_eq!(digest(&a.path().join(&name)), digest(&b.path().join(&name)), "{name}");
        }
    }
}

#[test]
fn csv_values_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let s = build_figure(&FigureSpec::new(FigureId::MiBoundProb)).unwrap();
    let path = dir.path().join("p.csv");
    write_csv(&s, &path).unwrap();
    let mut r = csv::Reader::from_path(&path).unwrap();
    let header: Vec<String> = r.headers().unwrap().iter().map(str::to_string).collect();
    assert_eq!(header[0], "x");
    assert_eq!(header.len(), s.len() + 1);
    for (row, rec) in r.records().enumerate() {
        let rec = rec.unwrap();
        assert_eq!(rec[0].parse::<f64>().unwrap(), s[0].points()[row].0);
        for (j, series) in s.iter().enumerate() {
            assert_eq!(rec[j + 1].parse::<f64>().unwrap(), series.points()[row].1);
        }
    }
}
