mod support;

#[test]
fn corpus_is_small_and_varied() {
    let corpus = support::corpus(12);
    assert!(corpus.len() >= 10, "{} products", corpus.len());
}

#[test]
fn checker_matches_lasso_enumeration() {
    let suite = support::ltl_oracle();
    assert!(suite.cases >= 100, "{} cases", suite.cases);
    eprintln!("{} cases, {} checks, {} failures", suite.cases, suite.checks, suite.failures.len());
    assert!(suite.passed(), "{:#?}", suite.failures);
}
