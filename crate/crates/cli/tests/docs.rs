//! The results table in `docs/experiments.md` must cover every in-scope result
//! and name only kinds that exist.

use entangle_cli::Kind;

const DOC: &str = include_str!("../../../docs/experiments.md");

const IN_SCOPE: [&str; 15] = [
    "spectral expansion of the multiple Cesaro mean",
    "mean ergodic theorem",
    "entangled ergodic theorem for almost periodic unitaries",
    "limit operator over the symmetric point spectrum",
    "reduction identity for entangled limits",
    "eigenspace structure of ergodic systems",
    "operator-convexity bound",
    "double-average defect bound",
    "partial isometry limit of generic diagonal averages",
    "diagonal ergodic theorem and the isometry V",
    "strong convergence of diagonal operator averages",
    "multiple correlations along diagonal averages",
    "product and diagonal states",
    "general exponent averages",
    "weakly mixing limit",
];

fn results_table() -> Vec<(String, Vec<String>)> {
    let section = DOC.split("## Results and the kinds that exercise them").nth(1).expect("results section");
    section
        .lines()
        .filter(|l| l.starts_with('|'))
        .skip(2)
        .map(|l| {
            let cells: Vec<&str> = l.trim_matches('|').split('|').map(str::trim).collect();
            let kinds = cells[1].split(',').map(|k| k.trim().trim_matches('`').to_string()).collect();
            (cells[0].to_string(), kinds)
        })
        .collect()
}

#[test]
fn every_result_maps_to_an_existing_kind() {
    let table = results_table();
    for result in IN_SCOPE {
        let (_, kinds) = table.iter().find(|(r, _)| r == result).unwrap_or_else(|| panic!("{result} is not mapped"));
        assert!(!kinds.is_empty());
        for k in kinds {
            assert!(Kind::from_name(k).is_some(), "{result} maps to unknown kind {k}");
        }
    }
    assert_eq!(table.len(), IN_SCOPE.len());
}

#[test]
fn every_kind_is_documented_and_used() {
    let table = results_table();
    for info in entangle_cli::KINDS {
        let name = info.kind.name();
        assert!(DOC.contains(&format!("| `{name}` |")), "{name} lacks a defaults row");
        assert!(table.iter().any(|(_, ks)| ks.iter().any(|k| k == name)), "{name} exercises no result");
    }
}

#[test]
fn documented_example_runs() {
    let json = DOC.split("```json").nth(1).unwrap().split("```").next().unwrap();
    let config = entangle_cli::ExperimentConfig::from_json(json).unwrap();
    let outcome = entangle_cli::run_experiment(&config).unwrap();
    assert!(outcome.passed(), "{:?}", outcome.checks);
}
