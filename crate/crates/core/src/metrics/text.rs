//! Corpus text-similarity metrics over whitespace-tokenized gloss strings.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::MetricError;

fn tokens(s: &str) -> Vec<&str> {
    s.split_whitespace().collect()
}

fn aligned<H: AsRef<str>, R: AsRef<str>>(hyp: &[H], refs: &[R]) -> Result<(), MetricError> {
    if hyp.len() != refs.len() {
        return Err(MetricError::Alignment {
            hyp: hyp.len(),
            refs: refs.len(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BleuSmoothing {
    #[default]
    None,
    /// Adds `epsilon` to zero n-gram match counts.
    Epsilon(f64),
}

fn ngram_counts<'t>(toks: &'t [&str], n: usize) -> HashMap<&'t [&'t str], usize> {
    let mut m = HashMap::new();
    if toks.len() >= n {
        for w in toks.windows(n) {
            *m.entry(w).or_insert(0) += 1;
        }
    }
    m
}

/// Corpus BLEU with uniform weights over orders `1..=n`, single reference per
/// hypothesis, brevity penalty, in [0, 1].
pub fn bleu_n<H: AsRef<str>, R: AsRef<str>>(
    hyp: &[H],
    refs: &[R],
    n: usize,
    smoothing: BleuSmoothing,
) -> Result<f64, MetricError> {
    aligned(hyp, refs)?;
    assert!(n >= 1, "BLEU order must be >= 1");
    let mut num = vec![0usize; n + 1];
    let mut den = vec![0usize; n + 1];
    let (mut c, mut r) = (0usize, 0usize);
    for (h, rf) in hyp.iter().zip(refs) {
        let ht = tokens(h.as_ref());
        let rt = tokens(rf.as_ref());
        for k in 1..=n {
            let hc = ngram_counts(&ht, k);
            let rc = ngram_counts(&rt, k);
            num[k] += hc.iter().map(|(g, &cnt)| cnt.min(rc.get(g).copied().unwrap_or(0))).sum::<usize>();
            den[k] += hc.values().sum::<usize>().max(1);
        }
        c += ht.len();
        r += rt.len();
    }
    if num[1] == 0 {
        return Ok(0.0);
    }
    let weight = 1.0 / n as f64;
    let mut log_sum = 0.0;
    for k in 1..=n {
        let p = if num[k] == 0 {
            match smoothing {
                BleuSmoothing::None => return Ok(0.0),
                BleuSmoothing::Epsilon(eps) => eps / den[k] as f64,
            }
        } else {
            num[k] as f64 / den[k] as f64
        };
        log_sum += weight * p.ln();
    }
    let bp = if c > r {
        1.0
    } else if c == 0 {
        0.0
    } else {
        (1.0 - r as f64 / c as f64).exp()
    };
    Ok(bp * log_sum.exp())
}

fn lcs_len(a: &[&str], b: &[&str]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y { prev[j] + 1 } else { cur[j].max(prev[j + 1]) };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// ROUGE-L F1 for one pair.
pub fn rouge_l_pair(hyp: &str, reference: &str) -> f64 {
    let h = tokens(hyp);
    let r = tokens(reference);
    let lcs = lcs_len(&h, &r);
    if lcs == 0 {
        return 0.0;
    }
    let p = lcs as f64 / h.len() as f64;
    let rec = lcs as f64 / r.len() as f64;
    2.0 * p * rec / (p + rec)
}

/// Mean per-pair ROUGE-L F1, in [0, 1].
pub fn rouge_l<H: AsRef<str>, R: AsRef<str>>(hyp: &[H], refs: &[R]) -> Result<f64, MetricError> {
    aligned(hyp, refs)?;
    if hyp.is_empty() {
        return Err(MetricError::UndefinedMetric {
            metric: "rouge_l",
            reason: "empty corpus".into(),
        });
    }
    let total: f64 = hyp.iter().zip(refs).map(|(h, r)| rouge_l_pair(h.as_ref(), r.as_ref())).sum();
    Ok(total / hyp.len() as f64)
}

pub const CHRF_ORDER: usize = 6;
pub const CHRF_BETA: f64 = 2.0;

fn char_ngrams(s: &str, n: usize) -> HashMap<&str, usize> {
    let mut m = HashMap::new();
    let idx: Vec<usize> = s.char_indices().map(|(i, _)| i).chain([s.len()]).collect();
    let chars = idx.len() - 1;
    if chars >= n {
        for i in 0..=chars - n {
            *m.entry(&s[idx[i]..idx[i + n]]).or_insert(0) += 1;
        }
    }
    m
}

/// Corpus chrF (character orders 1..=6, beta 2, whitespace ignored), in
/// [0, 100]. Statistics are summed over the corpus before scoring.
pub fn chrf<H: AsRef<str>, R: AsRef<str>>(hyp: &[H], refs: &[R]) -> Result<f64, MetricError> {
    aligned(hyp, refs)?;
    let mut stats = [[0usize; 3]; CHRF_ORDER];
    for (h, r) in hyp.iter().zip(refs) {
        let h: String = h.as_ref().split_whitespace().collect();
        let r: String = r.as_ref().split_whitespace().collect();
        for (n, st) in stats.iter_mut().enumerate() {
            let hc = char_ngrams(&h, n + 1);
            let rc = char_ngrams(&r, n + 1);
            // hypothesis n-grams only count where the reference has any
            if !rc.is_empty() {
                st[0] += hc.values().sum::<usize>();
            }
            st[1] += rc.values().sum::<usize>();
            st[2] += hc.iter().map(|(g, &c)| c.min(rc.get(g).copied().unwrap_or(0))).sum::<usize>();
        }
    }
    let eps = 1e-16;
    let factor = CHRF_BETA * CHRF_BETA;
    let (mut avg_p, mut avg_r, mut effective) = (0.0, 0.0, 0usize);
    for [n_hyp, n_ref, n_match] in stats {
        let p = if n_hyp > 0 { n_match as f64 / n_hyp as f64 } else { eps };
        let r = if n_ref > 0 { n_match as f64 / n_ref as f64 } else { eps };
        if n_hyp > 0 && n_ref > 0 {
            avg_p += p;
            avg_r += r;
            effective += 1;
        }
    }
    if effective == 0 {
        return Ok(0.0);
    }
    avg_p /= effective as f64;
    avg_r /= effective as f64;
    if avg_p + avg_r == 0.0 {
        return Ok(0.0);
    }
    let score = (1.0 + factor) * avg_p * avg_r / (factor * avg_p + avg_r);
    Ok(100.0 * score)
}

/// Token-level Levenshtein distance.
pub fn edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Sum of edit distances over sum of reference lengths. May exceed 1.
pub fn wer<H: AsRef<str>, R: AsRef<str>>(hyp: &[H], refs: &[R]) -> Result<f64, MetricError> {
    aligned(hyp, refs)?;
    let (mut dist, mut len) = (0usize, 0usize);
    for (h, r) in hyp.iter().zip(refs) {
        let rt = tokens(r.as_ref());
        dist += edit_distance(&tokens(h.as_ref()), &rt);
        len += rt.len();
    }
    if len == 0 {
        return Err(MetricError::UndefinedMetric {
            metric: "wer",
            reason: "references are empty".into(),
        });
    }
    Ok(dist as f64 / len as f64)
}

/// Per-pair scores from a scorer that is not implemented here (BERTScore,
/// METEOR, ...). Folded into the report as their mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalScores {
    pub name: String,
    pub per_pair: Vec<f64>,
}

/// BLEU, ROUGE-L and chrF on a 0-100 scale; WER as a ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextMetricReport {
    pub n_pairs: usize,
    pub bleu_1: f64,
    pub bleu_2: f64,
    pub bleu_3: f64,
    pub bleu_4: f64,
    pub rouge_l_f1: f64,
    pub chrf: f64,
    pub wer: f64,
    pub smoothing: BleuSmoothing,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub external: BTreeMap<String, f64>,
}

impl TextMetricReport {
    pub fn fold_external(&mut self, scores: &ExternalScores) -> Result<(), MetricError> {
        if scores.per_pair.len() != self.n_pairs {
            return Err(MetricError::Alignment {
                hyp: scores.per_pair.len(),
                refs: self.n_pairs,
            });
        }
        let mean = if self.n_pairs == 0 {
            0.0
        } else {
            scores.per_pair.iter().sum::<f64>() / self.n_pairs as f64
        };
        self.external.insert(scores.name.clone(), mean);
        Ok(())
    }
}

/// Scores `hyp` (typically LLM glosses) against `refs` (rule glosses).
pub fn text_report<H: AsRef<str>, R: AsRef<str>>(
    hyp: &[H],
    refs: &[R],
    smoothing: BleuSmoothing,
) -> Result<TextMetricReport, MetricError> {
    aligned(hyp, refs)?;
    let b = |n| bleu_n(hyp, refs, n, smoothing).map(|v| 100.0 * v);
    Ok(TextMetricReport {
        n_pairs: hyp.len(),
        bleu_1: b(1)?,
        bleu_2: b(2)?,
        bleu_3: b(3)?,
        bleu_4: b(4)?,
        rouge_l_f1: 100.0 * rouge_l(hyp, refs)?,
        chrf: chrf(hyp, refs)?,
        wer: wer(hyp, refs)?,
        smoothing,
        external: BTreeMap::new(),
    })
}

/// Rule output is the reference, LLM output the hypothesis.
pub fn compare_translations<H: AsRef<str>, R: AsRef<str>>(
    llm: &[H],
    rule: &[R],
    smoothing: BleuSmoothing,
) -> Result<TextMetricReport, MetricError> {
    text_report(llm, rule, smoothing)
}
