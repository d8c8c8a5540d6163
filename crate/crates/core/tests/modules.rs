use approx::assert_abs_diff_eq;

use diwed::bellexpr::local_bound;
use diwed::graphwit::{catalog, generator, stabilizer_element, synthesize, vertex_mask, Graph, SynthOptions};
use diwed::qcore::{make_ghz, make_graph_state, HermitianOperator, ObservableAssignment, StateVector};
use diwed::seesaw::{full_seesaw, optimize_observables, optimize_state, SeesawConfig};
use diwed::witness_gamma::{build_expression, GammaWitness};

#[test]
fn generators_and_stabilizers() {
    let ring3 = Graph::ring(3).unwrap();
    assert_eq!(generator(&ring3, 1).unwrap().to_string(), "+X₁Z₂Z₃");
    assert_eq!(stabilizer_element(&ring3, 0b111).unwrap().compact(), "-XXX");
    let ring4 = Graph::ring(4).unwrap();
    assert_eq!(stabilizer_element(&ring4, vertex_mask(&[1, 4])).unwrap().compact(), "+YZZY");
    assert_eq!(generator(&Graph::complete(4).unwrap(), 2).unwrap().compact(), "+ZXZZ");
}

#[test]
fn catalog_terms_match_published_forms() {
    for name in ["RG3", "RG4", "RG5", "RG6", "FG4", "FG5", "LG5", "LG5_alt", "LG6", "G3", "G4"] {
        let c = catalog(name).unwrap();
        assert_ne!(c.matches_printed(), Some(false), "{name}");
        assert_eq!(local_bound(&c.expression).unwrap().value, (c.m().unwrap() - 1) as f64);
    }
    assert_eq!(catalog("RG4").unwrap().expression.terms().len(), 5);
}

#[test]
fn linear5_synthesis_finds_both_inequalities() {
    let found = synthesize(&Graph::linear(5).unwrap(), SynthOptions::default()).unwrap();
    for name in ["LG5", "LG5_alt"] {
        let target = catalog(name).unwrap().expression;
        assert!(
            found.iter().any(|s| s.expression.same_terms(&target, 1e-12)),
            "{name} not synthesized"
        );
    }
}

#[test]
fn state_step_recovers_graph_state() {
    let c = catalog("RG3").unwrap();
    let (state, value) = optimize_state(&c.expression, &c.dictionary.assignment()).unwrap();
    assert_abs_diff_eq!(value, 4.0, epsilon = 1e-10);
    let graph = make_graph_state(&c.graph).unwrap();
    let overlap = graph.amplitudes().dotc(state.amplitudes()).norm();
    assert_abs_diff_eq!(overlap, 1.0, epsilon = 1e-9);
}

#[test]
fn identity_observables_give_gamma_minus_one() {
    let e = build_expression(GammaWitness::new(4, 1.3).unwrap()).unwrap();
    let obs = ObservableAssignment::uniform(4, vec![HermitianOperator::identity(2); 2]).unwrap();
    let (_, value) = optimize_state(&e, &obs).unwrap();
    assert_abs_diff_eq!(value, 0.3, epsilon = 1e-10);
}

#[test]
fn observable_optimization_on_fixed_states() {
    let e = build_expression(GammaWitness::new(3, 2.0).unwrap()).unwrap();
    let cfg = SeesawConfig::default().with_restarts(20);
    let ghz = optimize_observables(&make_ghz(3).unwrap(), &e, &cfg).unwrap();
    assert_abs_diff_eq!(ghz.value, 5.0 / 3.0, epsilon = 1e-7);
    let product = optimize_observables(&StateVector::basis(vec![2; 3], 0).unwrap(), &e, &cfg).unwrap();
    assert!(product.value <= 1.0 + 1e-9);
}

#[test]
fn full_seesaw_reaches_graph_values() {
    let cfg = SeesawConfig::default().with_restarts(20);
    for (name, want) in [("FG4", 5.0), ("RG3_full", 8.0)] {
        let e = catalog(name).unwrap().expression;
        let r = full_seesaw(&e, &vec![2; e.n()], &cfg).unwrap();
        assert_abs_diff_eq!(r.value, want, epsilon = 1e-6);
    }
}
