// TEMPORARY probe: measures the verdict residual of every +1
// coefficient mutation, to pin the acceptance margin.

use cmspectra::catalog::{
    a2_generator_binding, b2_generator_binding, coefficient_a, coefficient_b, OperatorName,
    SystemId,
};
use cmspectra::diffop::OpPowerCache;
use cmspectra::poly::CoeffPoly;
use cmspectra::rational::Rational;
use cmspectra::symbol::{SpectralVar, SymbolId};
use cmspectra::verifier::{
    build_samples, relation_operator, verify_vanishing, RelationId, VerifyConfig,
};

fn scan(
    label: &str,
    coeff: &CoeffPoly,
    ipow: u32,
    rel: &cmspectra::diffop::DiffOp,
    cache: &mut OpPowerCache,
    set: &mut cmspectra::verifier::SampleSet,
    tol: f64,
) -> f64 {
    let table = coeff.table().clone();
    let mut min_resid = f64::INFINITY;
    for (mono, c) in coeff.sorted_terms() {
        let mut factors: Vec<(SymbolId, u32)> = table
            .symbols()
            .iter()
            .enumerate()
            .filter(|(i, _)| mono.exp(*i) > 0)
            .map(|(i, s)| (*s, mono.exp(i)))
            .collect();
        if ipow > 0 {
            factors.push((SymbolId::spectral(SpectralVar::I), ipow));
        }
        let delta = cache.monomial_op(&Rational::ONE, &factors).unwrap();
        let mutated = rel.add(&delta);
        let rep = verify_vanishing("mut", &mutated, set, tol).unwrap();
        let fs: Vec<String> = factors.iter().map(|(s, e)| format!("{s}^{e}")).collect();
        println!(
            "{label}: term {} (c={c}) -> residual {:.3e} pass={}",
            fs.join("*"),
            rep.max_residual,
            rep.pass
        );
        min_resid = min_resid.min(rep.max_residual);
    }
    min_resid
}

#[test]
fn probe_a2() {
    let cfg = VerifyConfig {
        samples: 4,
        g2g3_draws: 2,
        ..VerifyConfig::default()
    };
    let gens = a2_generator_binding(OperatorName::I12, None);
    let mut cache = OpPowerCache::new(&gens, 3);
    let rel = relation_operator(RelationId::A2LemmaI12);
    let mut set = build_samples(SystemId::A2, &cfg).unwrap();
    let mut overall = f64::INFINITY;
    for k in 1..=3u32 {
        let m = scan(
            &format!("A{k}"),
            &coefficient_a(k),
            3 - k,
            &rel,
            &mut cache,
            &mut set,
            cfg.tolerance,
        );
        overall = overall.min(m);
    }
    println!("A2 min residual over all mutations: {overall:.3e}");
}

#[test]
fn probe_b2() {
    let cfg = VerifyConfig {
        samples: 4,
        g2g3_draws: 2,
        ..VerifyConfig::default()
    };
    let gens = b2_generator_binding();
    let mut cache = OpPowerCache::new(&gens, 2);
    let rel = relation_operator(RelationId::B2Quartic);
    let mut set = build_samples(SystemId::B2, &cfg).unwrap();
    let mut overall = f64::INFINITY;
    for k in 1..=2u32 {
        let m = scan(
            &format!("B{k}"),
            &coefficient_b(k),
            if k == 1 { 2 } else { 0 },
            &rel,
            &mut cache,
            &mut set,
            cfg.tolerance,
        );
        overall = overall.min(m);
    }
    println!("B2 min residual over all mutations: {overall:.3e}");
}
