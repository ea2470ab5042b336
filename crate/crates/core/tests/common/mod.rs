#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use proptest::prelude::*;
use serde::Deserialize;

use signpipe::gloss::{GlossSequence, Provenance};
use signpipe::pipeline::{load_synonyms, read_corpus, sequences};
use signpipe::resolve::{CompoundTable, ResolveTables, SynonymTable, VideoManifest};

pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn fixtures() -> PathBuf {
    crate_dir().join("fixtures")
}

pub fn data() -> PathBuf {
    crate_dir().join("data")
}

pub fn bundled_manifest() -> VideoManifest {
    VideoManifest::load(&fixtures().join("manifest.json")).unwrap()
}

pub fn bundled_synonyms() -> SynonymTable {
    load_synonyms(
        Some(&data().join("synonyms.tsv")),
        Some(&data().join("gloss_frequency.tsv")),
    )
    .unwrap()
}

pub fn bundled_tables() -> ResolveTables {
    ResolveTables {
        manifest: bundled_manifest(),
        synonyms: bundled_synonyms(),
        compounds: CompoundTable::load(&data().join("compounds.tsv")).unwrap(),
    }
}

/// `llm` or `rule`.
pub fn shipped_corpus(name: &str) -> Vec<GlossSequence> {
    sequences(&read_corpus(&fixtures().join(format!("corpus/{name}.jsonl"))).unwrap()).unwrap()
}

/// Common table flags for the CLI.
pub fn table_args() -> Vec<String> {
    let f = fixtures();
    let d = data();
    [
        ("--manifest", f.join("manifest.json")),
        ("--synonyms", d.join("synonyms.tsv")),
        ("--frequencies", d.join("gloss_frequency.tsv")),
        ("--compounds", d.join("compounds.tsv")),
    ]
    .into_iter()
    .flat_map(|(k, v)| [k.to_string(), v.display().to_string()])
    .collect()
}

pub fn copy_dir(from: &Path, to: &Path) {
    std::fs::create_dir_all(to).unwrap();
    for e in std::fs::read_dir(from).unwrap() {
        let e = e.unwrap();
        if e.file_type().unwrap().is_file() {
            std::fs::copy(e.path(), to.join(e.file_name())).unwrap();
        }
    }
}

/// Every file in `dir`, by name.
pub fn dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

/// Runs `router` on an ephemeral port in a background runtime.
pub fn spawn(router: axum::Router) -> SocketAddr {
    let (tx, rx) = std::sync::mpsc::channel();
    std::thread::spawn(move || {
        let rt = tokio::runtime::Runtime::new().unwrap();
        rt.block_on(async move {
            let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
            tx.send(listener.local_addr().unwrap()).unwrap();
            axum::serve(listener, router).await.unwrap();
        });
    });
    rx.recv().unwrap()
}

/// Placeholder clip files for every manifest URI under `root`.
pub fn materialize_assets(manifest: &VideoManifest, root: &Path) {
    for a in manifest.entries().chain(manifest.letter_clips()) {
        let p = root.join(&a.uri);
        std::fs::create_dir_all(p.parent().unwrap()).unwrap();
        std::fs::write(&p, format!("clip {}", a.gloss_key)).unwrap();
    }
}

/// Static file server over `root`.
pub fn static_server(root: &Path) -> SocketAddr {
    spawn(axum::Router::new().fallback_service(tower_http::services::ServeDir::new(root)))
}

// ---------------------------------------------------------------------------
// Oracles. Written against plain strings and sets, without the library types.

/// (occurrences, hits, synonym-recoverable) by scanning every occurrence.
pub fn brute_force_retrieval(
    corpus: &[Vec<String>],
    keys: &BTreeSet<String>,
    pairs: &[(String, String)],
) -> (usize, usize, usize) {
    let is_spelled = |t: &str| t.contains('-') && t.split('-').all(|s| s.chars().count() == 1);
    let covered = |t: &str| keys.contains(t) || (is_spelled(t) && t.split('-').all(|s| keys.contains(s)));
    let (mut n, mut hits, mut rec) = (0, 0, 0);
    for seq in corpus {
        for t in seq {
            n += 1;
            if covered(t) {
                hits += 1;
                continue;
            }
            let mut recoverable = false;
            for (a, b) in pairs {
                if a == b {
                    continue;
                }
                if (a == t && keys.contains(b)) || (b == t && keys.contains(a)) {
                    recoverable = true;
                }
            }
            if recoverable {
                rec += 1;
            }
        }
    }
    (n, hits, rec)
}

/// Levenshtein distance by memoized recursion.
pub fn edit_distance_oracle(a: &[String], b: &[String]) -> usize {
    fn go(a: &[String], b: &[String], i: usize, j: usize, memo: &mut HashMap<(usize, usize), usize>) -> usize {
        if i == a.len() {
            return b.len() - j;
        }
        if j == b.len() {
            return a.len() - i;
        }
        if let Some(&v) = memo.get(&(i, j)) {
            return v;
        }
        let v = if a[i] == b[j] {
            go(a, b, i + 1, j + 1, memo)
        } else {
            1 + go(a, b, i + 1, j, memo)
                .min(go(a, b, i, j + 1, memo))
                .min(go(a, b, i + 1, j + 1, memo))
        };
        memo.insert((i, j), v);
        v
    }
    go(a, b, 0, 0, &mut HashMap::new())
}

pub fn wer_oracle(hyp: &[Vec<String>], refs: &[Vec<String>]) -> f64 {
    let dist: usize = hyp.iter().zip(refs).map(|(h, r)| edit_distance_oracle(h, r)).sum();
    let len: usize = refs.iter().map(Vec::len).sum();
    dist as f64 / len as f64
}

/// Small random retrieval problems.
#[derive(Debug, Clone)]
pub struct RetrievalCase {
    pub corpus: Vec<Vec<String>>,
    pub keys: BTreeSet<String>,
    pub pairs: Vec<(String, String)>,
}

impl RetrievalCase {
    pub fn sequences(&self) -> Vec<GlossSequence> {
        self.corpus
            .iter()
            .enumerate()
            .map(|(i, s)| GlossSequence::from_raw(i, &s.join(" "), Provenance::Llm).unwrap())
            .collect()
    }

    pub fn manifest(&self) -> VideoManifest {
        let doc: serde_json::Map<String, serde_json::Value> = self
            .keys
            .iter()
            .map(|k| (k.clone(), serde_json::json!({ "uri": format!("v/{k}.mp4") })))
            .collect();
        VideoManifest::from_json(&serde_json::Value::Object(doc).to_string()).unwrap()
    }

    pub fn synonyms(&self) -> SynonymTable {
        SynonymTable::from_pairs(self.pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())))
    }
}

const PLAIN: [&str; 14] = [
    "MIX", "STIR", "ADD", "COMBINE", "CHOP", "BOWL", "EGG", "FOLD", "CUP", "CAKE", "AB", "BA", "25", "PUT-IN",
];
const LETTERS: [&str; 6] = ["A", "B", "C", "T", "5", "O"];
const SPELLED: [&str; 5] = ["T-O-F-U", "A-B", "C-A-T", "B-O-A-T", "5-0"];

fn token() -> impl Strategy<Value = String> {
    prop_oneof![
        6 => proptest::sample::select(PLAIN.to_vec()),
        2 => proptest::sample::select(LETTERS.to_vec()),
        2 => proptest::sample::select(SPELLED.to_vec()),
    ]
    .prop_map(str::to_string)
}

pub fn retrieval_case() -> impl Strategy<Value = RetrievalCase> {
    let keys = proptest::collection::btree_set(
        prop_oneof![
            3 => proptest::sample::select(PLAIN.to_vec()),
            2 => proptest::sample::select(LETTERS.to_vec()),
        ]
        .prop_map(str::to_string),
        0..=20,
    );
    let corpus = proptest::collection::vec(proptest::collection::vec(token(), 1..=10), 1..=5);
    let pairs = proptest::collection::vec((token(), token()), 0..=10);
    (corpus, keys, pairs).prop_map(|(corpus, keys, pairs)| RetrievalCase { corpus, keys, pairs })
}

pub fn word_corpus_pair() -> impl Strategy<Value = (Vec<Vec<String>>, Vec<Vec<String>>)> {
    let words = || proptest::sample::select(vec!["A", "B", "C", "MIX", "STIR"]).prop_map(str::to_string);
    (1usize..=6).prop_flat_map(move |n| {
        (
            proptest::collection::vec(proptest::collection::vec(words(), 0..=8), n),
            proptest::collection::vec(proptest::collection::vec(words(), 1..=8), n),
        )
    })
}

#[derive(Debug, Deserialize)]
pub struct TextOracle {
    pub epsilon: f64,
    pub cases: Vec<TextCase>,
}

#[derive(Debug, Deserialize)]
pub struct TextCase {
    pub name: String,
    pub hyp: Vec<String>,
    #[serde(rename = "ref")]
    pub reference: Vec<String>,
    pub scores: BTreeMap<String, f64>,
}

pub fn text_oracle() -> TextOracle {
    let text = std::fs::read_to_string(crate_dir().join("tests/oracles/text_metrics.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

pub const METRIC_TOL: f64 = 1e-9;

/// Compares every library text metric with the pinned values of one case.
pub fn check_text_case(case: &TextCase, epsilon: f64) -> Result<(), String> {
    use signpipe::metrics::{bleu_n, chrf, rouge_l, wer, BleuSmoothing};
    let (h, r) = (&case.hyp, &case.reference);
    let mut got: Vec<(String, f64)> = Vec::new();
    for n in 1..=4 {
        got.push((format!("bleu_{n}"), bleu_n(h, r, n, BleuSmoothing::None).map_err(|e| e.to_string())?));
        got.push((
            format!("bleu_{n}_eps"),
            bleu_n(h, r, n, BleuSmoothing::Epsilon(epsilon)).map_err(|e| e.to_string())?,
        ));
    }
    got.push(("rouge_l".into(), rouge_l(h, r).map_err(|e| e.to_string())?));
    got.push(("chrf".into(), chrf(h, r).map_err(|e| e.to_string())?));
    got.push(("wer".into(), wer(h, r).map_err(|e| e.to_string())?));
    for (name, value) in got {
        let want = *case.scores.get(&name).ok_or(format!("{}: no pinned {name}", case.name))?;
        if (value - want).abs() > METRIC_TOL {
            return Err(format!("{} {name}: got {value}, oracle {want}", case.name));
        }
    }
    Ok(())
}

pub fn bundled_tasks() -> Vec<signpipe::task::TaskSpec> {
    signpipe::task::load_task_dir(&fixtures().join("tasks")).unwrap()
}

/// Rule-translated, compiled bundled tasks.
pub fn compile_bundled_rule(tables: &ResolveTables) -> Vec<signpipe::resolve::CompiledTask> {
    let crucial = signpipe::resolve::PosCrucialPolicy::new(std::sync::Arc::new(
        signpipe::rule::Lexicon::bundled().clone(),
    ));
    signpipe::pipeline::compile_all(
        &bundled_tasks(),
        &signpipe::rule::RuleTranslator::default(),
        tables,
        &crucial,
        signpipe::resolve::FallbackOrder::default(),
        None,
    )
}

pub fn get(url: &str) -> (u16, String) {
    let mut resp = ureq::get(url)
        .config()
        .http_status_as_error(false)
        .build()
        .call()
        .unwrap();
    (resp.status().as_u16(), resp.body_mut().read_to_string().unwrap())
}

pub fn post(url: &str, body: &str) -> (u16, String) {
    let mut resp = ureq::post(url)
        .config()
        .http_status_as_error(false)
        .build()
        .header("content-type", "application/json")
        .send(body)
        .unwrap();
    (resp.status().as_u16(), resp.body_mut().read_to_string().unwrap())
}

pub fn json(s: &str) -> serde_json::Value {
    serde_json::from_str(s).unwrap_or_else(|e| panic!("{e}: {s}"))
}

pub struct Run {
    pub ok: bool,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the CLI with a scrubbed `SIGNPIPE_*` environment plus `envs`.
pub fn signpipe<S: AsRef<std::ffi::OsStr>>(args: &[S], envs: &[(&str, &str)]) -> Run {
    let mut cmd = std::process::Command::new(env!("CARGO_BIN_EXE_signpipe"));
    for (k, _) in std::env::vars() {
        if k.starts_with("SIGNPIPE_") {
            cmd.env_remove(k);
        }
    }
    cmd.args(args).envs(envs.iter().copied());
    let out = cmd.output().unwrap();
    Run {
        ok: out.status.success(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

pub fn path_str(p: &Path) -> String {
    p.display().to_string()
}
