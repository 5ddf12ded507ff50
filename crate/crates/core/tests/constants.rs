//! Branch-point constants: structural properties for all six models and the
//! reference values that the solver reproduces.

use std::sync::OnceLock;

use subcritical::families::{Family, Structure};
use subcritical::singularity::{check_conditions, constants, Constants, Status, DERIVATIVE_AGREEMENT};

struct Run {
    family: Family,
    structure: Structure,
    at40: Constants,
    at80: Constants,
}

fn runs() -> &'static [Run] {
    static RUNS: OnceLock<Vec<Run>> = OnceLock::new();
    RUNS.get_or_init(|| {
        let mut out = Vec::new();
        for f in Family::ALL {
            for s in Structure::ALL {
                out.push(Run {
                    family: f,
                    structure: s,
                    at40: constants(f, s, 40).unwrap(),
                    at80: constants(f, s, 80).unwrap(),
                });
            }
        }
        out
    })
}

fn run(f: Family, s: Structure) -> &'static Constants {
    &runs().iter().find(|r| r.family == f && r.structure == s).unwrap().at40
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() < tol
}

#[test]
fn spectral_radius_is_one() {
    for r in runs() {
        let sr = r.at40.branch_point.spectral_radius.to_f64();
        assert!((sr - 1.0).abs() < 1e-10, "{} {}: {sr}", r.family, r.structure);
    }
}

#[test]
fn structure_radius_below_class_radius() {
    for r in runs() {
        let c = &r.at40;
        assert!(c.branch_point.rho < c.rho_class, "{} {}", r.family, r.structure);
        assert!(c.growth_ratio.to_f64() > 1.0);
        assert!(c.branch_point.rho.is_positive());
        assert!(c.branch_point.c_values.iter().all(|v| v.is_positive()));
    }
}

#[test]
fn derivative_methods_agree() {
    for r in runs() {
        let c = &r.at40;
        let rel = ((&c.rho_prime - &c.rho_prime_richardson) / &c.rho_prime).abs().to_f64();
        assert!(rel < DERIVATIVE_AGREEMENT, "{} {}: {rel:e}", r.family, r.structure);
        assert!(c.rho_prime.is_sign_negative());
    }
}

#[test]
fn precision_doubling_is_stable() {
    for r in runs() {
        let (a, b) = (&r.at40, &r.at80);
        let mut pairs = vec![
            ("rho", &a.branch_point.rho, &b.branch_point.rho),
            ("rho'", &a.rho_prime, &b.rho_prime),
            ("growth", &a.growth_ratio, &b.growth_ratio),
            ("mean", &a.mean_constant, &b.mean_constant),
            ("rho_class", &a.rho_class, &b.rho_class),
        ];
        for (x, y) in a.branch_point.c_values.iter().zip(&b.branch_point.c_values) {
            pairs.push(("C", x, y));
        }
        for (name, x, y) in pairs {
            let diff = (&y.with_prec(x.prec()) - x).abs().to_f64();
            assert!(diff < 1e-12, "{} {} {name}: {diff:e}", r.family, r.structure);
        }
    }
}

#[test]
fn reports_round_trip() {
    for r in runs() {
        let report = r.at40.report();
        let text = serde_json::to_string_pretty(&report).unwrap();
        let back: subcritical::singularity::ConstantsReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
        assert_eq!(serde_json::to_string_pretty(&back).unwrap(), text);
    }
}

#[test]
fn forest_constants() {
    let mis = run(Family::Forest, Structure::Mis);
    // the six-digit table entry 1.273864 is truncated, not rounded
    assert!(close(mis.growth_ratio.to_f64(), 1.2738645829, 1e-10));
    assert!(close(mis.mean_constant.to_f64(), 0.463922, 5e-7));
    // rho_1 = e^{-1} / alpha
    assert!(close(mis.branch_point.rho.to_f64(), 0.288_790_069_294_497, 1e-14));
    let mat = run(Family::Forest, Structure::Matching);
    assert!(close(mat.growth_ratio.to_f64(), 1.313080, 5e-7));
    assert!(close(mat.mean_constant.to_f64(), 0.357045, 5e-7));
}

#[test]
fn cactus_mis_constants() {
    let c = run(Family::Cactus, Structure::Mis);
    let bp = &c.branch_point;
    assert!(close(bp.rho.to_f64(), 0.1867604863, 1e-9));
    for (v, e) in bp.c_values.iter().zip([1.5865482480, 0.6912173223, 1.1812890598]) {
        assert!(close(v.to_f64(), e, 1e-8));
    }
    assert!(close(c.rho_prime.to_f64(), -0.0805687207, 1e-8));
    assert!(close(c.growth_ratio.to_f64(), 1.278323, 5e-7));
    assert!(close(c.mean_constant.to_f64(), 0.431401, 5e-7));
}

#[test]
fn cactus_matching_constants() {
    // oracle-checked kernel; see the printed_kernels test for the published variant
    let c = run(Family::Cactus, Structure::Matching);
    assert!(close(c.branch_point.rho.to_f64(), 0.1740529782534971, 1e-14));
    assert!(close(c.growth_ratio.to_f64(), 1.3716521606, 1e-9));
    assert!(close(c.mean_constant.to_f64(), 0.3658659800, 1e-9));
    assert!(close(c.rho_class.to_f64(), 0.2387401437, 1e-9));
}

#[test]
fn sp_matching_radius() {
    let c = run(Family::SeriesParallel, Structure::Matching);
    assert!(close(c.branch_point.rho.to_f64(), 0.0749665399, 1e-8));
    assert!(close(c.growth_ratio.to_f64(), 1.4701671808, 1e-8));
}

#[test]
fn thread_count_does_not_change_constants() {
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let three = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let a = one.install(|| constants(Family::Cactus, Structure::Mis, 40).unwrap().report());
    let b = three.install(|| constants(Family::Cactus, Structure::Mis, 40).unwrap().report());
    assert_eq!(a, b);
}

#[test]
fn condition_checks() {
    for s in Structure::ALL {
        let tree = check_conditions(Family::Forest, s);
        assert!(tree.conditions.iter().all(|c| c.status == Status::Pass), "{tree:#?}");
        let cactus = check_conditions(Family::Cactus, s);
        assert!(cactus.conditions.iter().all(|c| c.status == Status::Pass), "{cactus:#?}");
        let sp = check_conditions(Family::SeriesParallel, s);
        assert_eq!(sp.conditions.iter().find(|c| c.name == "C3").unwrap().status, Status::Asserted);
        assert!(sp.all_pass());
    }
    let tree = check_conditions(Family::Forest, Structure::Mis);
    assert!(tree.conditions.iter().find(|c| c.name == "C3").unwrap().detail.contains("i = 2"));
    let cactus = check_conditions(Family::Cactus, Structure::Mis);
    assert!(cactus.conditions.iter().find(|c| c.name == "C3").unwrap().detail.contains("i = 0"));
}
