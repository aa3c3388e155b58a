use super::{embed_texts, similarity_score, EmbeddingProvider, EmbeddingVector};
use crate::error::{Error, Result};

/// Coherent Groups similarity of two word groups: the mean of the scores of
/// every cross-group word pair. Pairs with an out-of-vocabulary word are left
/// out; when no pair is left the similarity is 0.
pub fn coherent_group_similarity<S: AsRef<str>>(
    provider: &dyn EmbeddingProvider,
    words_a: &[S],
    words_b: &[S],
) -> Result<f64> {
    if words_a.is_empty() || words_b.is_empty() {
        return Err(Error::contract("coherent groups need two non-empty word groups"));
    }
    let texts: Vec<&str> = words_a
        .iter()
        .chain(words_b)
        .map(AsRef::as_ref)
        .collect();
    let vectors = embed_texts(provider, &texts)?;
    let (left, right) = vectors.split_at(words_a.len());
    coherent_group_score(left, right)
}

/// Coherent Groups over already embedded words; `None` entries are
/// out-of-vocabulary words.
pub fn coherent_group_score<V: std::borrow::Borrow<EmbeddingVector>>(
    left: &[Option<V>],
    right: &[Option<V>],
) -> Result<f64> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for a in left.iter().flatten() {
        for b in right.iter().flatten() {
            sum += similarity_score(a.borrow(), b.borrow())?;
            count += 1;
        }
    }
    Ok(if count == 0 { 0.0 } else { sum / count as f64 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::{cosine_similarity, FixtureProvider};

    fn fixture() -> FixtureProvider {
        FixtureProvider::new(
            3,
            [
                ("order".to_string(), vec![1.0, 0.2, 0.0]),
                ("customer".to_string(), vec![0.1, 1.0, 0.3]),
                ("ship".to_string(), vec![-0.5, 0.1, 1.0]),
                ("purchase".to_string(), vec![0.9, 0.4, 0.1]),
                ("phone".to_string(), vec![0.0, -1.0, 0.2]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn identical_single_words() {
        let p = fixture();
        assert_eq!(coherent_group_similarity(&p, &["order"], &["order"]).unwrap(), 1.0);
    }

    #[test]
    fn oov_pairs_skipped() {
        let p = fixture();
        let got = coherent_group_similarity(&p, &["order", "num"], &["customer", "order", "ref"]).unwrap();
        // only (order, customer) and (order, order) survive
        let o = p.get("order").unwrap();
        let c = p.get("customer").unwrap();
        let expected = (cosine_similarity(o, c).unwrap().max(0.0) + 1.0) / 2.0;
        assert!((got - expected).abs() < 1e-12);
    }

    #[test]
    fn all_oov_is_zero() {
        let p = fixture();
        assert_eq!(coherent_group_similarity(&p, &["num"], &["ref"]).unwrap(), 0.0);
    }

    #[test]
    fn empty_group_is_contract_error() {
        let p = fixture();
        assert!(coherent_group_similarity::<&str>(&p, &[], &["order"]).is_err());
    }
}
