"""Regenerates tests/oracles/text_metrics.json with reference implementations.

Requires nltk, sacrebleu and rouge-score:
    python3 tests/oracles/gen_text_oracle.py
"""
import json
import os
import random
import warnings

import sacrebleu
from nltk.translate.bleu_score import SmoothingFunction, corpus_bleu
from rouge_score import rouge_scorer

HERE = os.path.dirname(os.path.abspath(__file__))
CORPUS = os.path.join(HERE, "..", "..", "fixtures", "corpus")
EPSILON = 0.1


class Whitespace:
    def tokenize(self, text):
        return text.split()


def wer(hyps, refs):
    dist = length = 0
    for h, r in zip(hyps, refs):
        h, r = h.split(), r.split()
        prev = list(range(len(r) + 1))
        for i, x in enumerate(h):
            cur = [i + 1] + [0] * len(r)
            for j, y in enumerate(r):
                cur[j + 1] = min(prev[j] + (x != y), prev[j + 1] + 1, cur[j] + 1)
            prev = cur
        dist += prev[-1]
        length += len(r)
    return dist / length


def scores(hyps, refs):
    hyp_t = [h.split() for h in hyps]
    ref_t = [[r.split()] for r in refs]
    out = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for n in range(1, 5):
            w = tuple([1.0 / n] * n)
            out[f"bleu_{n}"] = corpus_bleu(ref_t, hyp_t, weights=w)
            out[f"bleu_{n}_eps"] = corpus_bleu(
                ref_t, hyp_t, weights=w, smoothing_function=SmoothingFunction(epsilon=EPSILON).method1
            )
    scorer = rouge_scorer.RougeScorer(["rougeL"], tokenizer=Whitespace())
    out["rouge_l"] = sum(scorer.score(r, h)["rougeL"].fmeasure for h, r in zip(hyps, refs)) / len(hyps)
    out["chrf"] = sacrebleu.corpus_chrf(hyps, [refs]).score
    out["wer"] = wer(hyps, refs)
    return out


def read_corpus(name):
    with open(os.path.join(CORPUS, name)) as f:
        return [json.loads(l)["glosses"] for l in f if l.strip()]


def main():
    rng = random.Random(20240607)
    vocab = ["ADD", "STIR", "MIX", "BOWL", "PAN", "EGG", "FOLD", "CUT", "HEAT", "SALT", "T-O-F-U", "OIL", "25"]
    cases = [{"name": "shipped-llm-vs-rule", "hyp": read_corpus("llm.jsonl"), "ref": read_corpus("rule.jsonl")}]
    cases.append(
        {
            "name": "golden-step",
            "hyp": ["CHOCOLATE CHOP ADD DOUGH MIX STIR"],
            "ref": ["CHOP CHOCOLATE ADD BATTER STIR UNTIL INCORPORATE"],
        }
    )
    for k in range(30):
        n = rng.randint(1, 8)
        hyps, refs = [], []
        for _ in range(n):
            r = [rng.choice(vocab) for _ in range(rng.randint(1, 12))]
            h = [t if rng.random() < 0.6 else rng.choice(vocab) for t in r]
            if rng.random() < 0.3:
                h = h[: rng.randint(1, len(h))]
            if rng.random() < 0.3:
                h += [rng.choice(vocab) for _ in range(rng.randint(1, 4))]
            hyps.append(" ".join(h))
            refs.append(" ".join(r))
        cases.append({"name": f"random-{k}", "hyp": hyps, "ref": refs})
    for c in cases:
        c["scores"] = scores(c["hyp"], c["ref"])
    doc = {
        "generator": "tests/oracles/gen_text_oracle.py",
        "tools": {
            "sacrebleu": sacrebleu.__version__,
            "nltk": __import__("nltk").__version__,
        },
        "epsilon": EPSILON,
        "cases": cases,
    }
    with open(os.path.join(HERE, "text_metrics.json"), "w") as f:
        json.dump(doc, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main()
