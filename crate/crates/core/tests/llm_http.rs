mod common;

use std::collections::VecDeque;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::http::{HeaderMap, StatusCode};
use axum::routing::post;
use axum::Router;
use serde_json::{json, Value};

use common::spawn;
use signpipe::llm::{
    build_prompt, ChatClient, ChatRequest, HttpChatClient, LlmError, LlmRequestConfig, LlmTranslator,
    TranslationCache,
};
use signpipe::task::load_tasks;
use signpipe::translate::GlossTranslator;

#[derive(Default)]
struct Mock {
    script: Mutex<VecDeque<(u16, String)>>,
    seen: Mutex<Vec<(Option<String>, Value)>>,
}

fn reply(content: &str) -> (u16, String) {
    (200, json!({ "choices": [{ "message": { "role": "assistant", "content": content } }] }).to_string())
}

fn mock(script: Vec<(u16, String)>) -> (Arc<Mock>, url::Url) {
    let m = Arc::new(Mock {
        script: Mutex::new(script.into()),
        ..Default::default()
    });
    let shared = m.clone();
    let app = Router::new().route(
        "/v1/chat/completions",
        post(move |headers: HeaderMap, body: String| {
            let m = shared.clone();
            async move {
                let auth = headers.get("authorization").map(|v| v.to_str().unwrap().to_string());
                m.seen.lock().unwrap().push((auth, serde_json::from_str(&body).unwrap()));
                let (status, body) = m.script.lock().unwrap().pop_front().unwrap_or((500, "empty".into()));
                (StatusCode::from_u16(status).unwrap(), body)
            }
        }),
    );
    let addr = spawn(app);
    (m, format!("http://{addr}/v1/chat/completions").parse().unwrap())
}

fn client(endpoint: url::Url) -> HttpChatClient {
    let cfg = LlmRequestConfig {
        max_retries: 2,
        timeout: Duration::from_secs(5),
        ..Default::default()
    };
    let mut c = HttpChatClient::new(endpoint, "sk-test", &cfg);
    c.backoff_base = Duration::from_millis(5);
    c
}

fn request() -> ChatRequest {
    ChatRequest::new(&LlmRequestConfig::default(), "translate please")
}

#[test]
fn sends_bearer_auth_and_sampling_parameters() {
    let (m, url) = mock(vec![reply("STIR")]);
    assert_eq!(client(url).complete(&request()).unwrap(), "STIR");
    let seen = m.seen.lock().unwrap();
    assert_eq!(seen.len(), 1);
    let (auth, body) = &seen[0];
    assert_eq!(auth.as_deref(), Some("Bearer sk-test"));
    assert_eq!(body["model"], "gpt-3.5-turbo");
    assert_eq!((body["temperature"].clone(), body["max_tokens"].clone(), body["top_p"].clone()), (json!(1.0), json!(1000), json!(1.0)));
    assert_eq!(body["messages"][0]["role"], "user");
    assert_eq!(body["messages"][0]["content"], "translate please");
}

#[test]
fn retries_on_server_errors_and_rate_limits() {
    let (m, url) = mock(vec![(500, "boom".into()), (429, "slow down".into()), reply("OK")]);
    assert_eq!(client(url).complete(&request()).unwrap(), "OK");
    assert_eq!(m.seen.lock().unwrap().len(), 3);
}

#[test]
fn gives_up_after_max_retries() {
    let (m, url) = mock(vec![(503, "a".into()), (503, "b".into()), (503, "c".into()), reply("late")]);
    match client(url).complete(&request()) {
        Err(LlmError::NetworkFailure { attempts, .. }) => assert_eq!(attempts, 3),
        other => panic!("{other:?}"),
    }
    assert_eq!(m.seen.lock().unwrap().len(), 3);
}

#[test]
fn client_errors_are_not_retried() {
    let (m, url) = mock(vec![(401, "bad key".into()), reply("never")]);
    match client(url).complete(&request()) {
        Err(LlmError::NetworkFailure { attempts, message }) => {
            assert_eq!(attempts, 1);
            assert!(message.contains("401"), "{message}");
        }
        other => panic!("{other:?}"),
    }
    assert_eq!(m.seen.lock().unwrap().len(), 1);
}

#[test]
fn unreachable_endpoint_is_a_network_failure() {
    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/", listener.local_addr().unwrap()).parse().unwrap();
    drop(listener);
    assert!(matches!(
        client(url).complete(&request()),
        Err(LlmError::NetworkFailure { attempts: 3, .. })
    ));
}

#[test]
fn malformed_content_is_quarantined_and_not_cached() {
    let task = load_tasks(
        br#"{"task_id":"two","title":"Two","steps":[{"text":"Stir."},{"text":"Serve."}]}"#,
        "1",
    )
    .unwrap()
    .remove(0);
    let (m, url) = mock(vec![
        reply("STIR"),
        reply(r#"["STIR", "SERVE"]"#),
        reply("unused"),
    ]);
    let dir = tempfile::tempdir().unwrap();
    let cache = Arc::new(TranslationCache::open(dir.path()).unwrap());
    let t = LlmTranslator::new(LlmRequestConfig::default(), cache, Some(Arc::new(client(url)))).unwrap();

    assert!(matches!(t.fetch(&task), Err(LlmError::MalformedResponse { .. })));
    assert_eq!(std::fs::read_dir(dir.path().join("quarantine")).unwrap().count(), 1);
    assert!(t.cache().is_empty());

    let steps = t.translate_task(&task).unwrap();
    let rendered: Vec<String> = steps.into_iter().map(|s| s.unwrap().render()).collect();
    assert_eq!(rendered, ["STIR", "SERVE"]);
    // the second call is served from cache
    t.fetch(&task).unwrap();
    assert_eq!(m.seen.lock().unwrap().len(), 2);
    assert_eq!(m.seen.lock().unwrap()[1].1["messages"][0]["content"], build_prompt(&task));
}
