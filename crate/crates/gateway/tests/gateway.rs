use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use nestbench_core::generator::fixture_record;
use nestbench_core::prompt::{build_prompt, ChatMessage};
use nestbench_core::{PromptMethod, TaskKind};
use nestbench_gateway::mock::{NoisyMock, OracleMock};
use nestbench_gateway::{
    ApiKey, ChatCompletionsProvider, ChatRequest, FakeClock, Gateway, GatewayConfig, GatewayError, Provider, ResponseCache,
    RetryPolicy,
};

fn req(text: &str) -> ChatRequest {
    ChatRequest {
        model: "test-model".into(),
        messages: vec![ChatMessage::user(text)],
        temperature: 0.0,
        sample_index: 0,
        max_output_tokens: 32,
    }
}

fn config(max_attempts: u32) -> GatewayConfig {
    GatewayConfig {
        requests_per_minute: None,
        retry: RetryPolicy { max_attempts, base_delay_ms: 100, max_delay_ms: 10_000 },
        ..GatewayConfig::default()
    }
}

/// Fails with the given errors in order, then succeeds.
struct Scripted {
    failures: Mutex<Vec<GatewayError>>,
    calls: AtomicUsize,
}

impl Scripted {
    fn new(mut failures: Vec<GatewayError>) -> Arc<Self> {
        failures.reverse();
        Arc::new(Scripted { failures: Mutex::new(failures), calls: AtomicUsize::new(0) })
    }
}

impl Provider for Scripted {
    fn id(&self) -> String {
        "scripted".into()
    }

    fn complete(&self, _req: &ChatRequest) -> Result<String, GatewayError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        match self.failures.lock().unwrap().pop() {
            Some(e) => Err(e),
            None => Ok("ok".into()),
        }
    }
}

#[test]
fn transient_failures_back_off_exponentially() {
    let provider = Scripted::new(vec![
        GatewayError::Server { status: 503, body: String::new() },
        GatewayError::Transport("reset".into()),
        GatewayError::RateLimited { retry_after: None },
    ]);
    let clock = Arc::new(FakeClock::default());
    let gw = Gateway::new(provider.clone(), &config(5), clock.clone(), None);
    assert_eq!(gw.complete(&req("q")).unwrap(), "ok");
    assert_eq!(provider.calls.load(Ordering::SeqCst), 4);
    let ms: Vec<u128> = clock.sleeps().iter().map(Duration::as_millis).collect();
    assert_eq!(ms, [100, 200, 400]);
    assert_eq!(gw.stats().retries, 3);
}

#[test]
fn auth_errors_are_not_retried() {
    let provider = Scripted::new(vec![GatewayError::Auth { status: 401 }]);
    let gw = Gateway::new(provider.clone(), &config(5), Arc::new(FakeClock::default()), None);
    assert!(matches!(gw.complete(&req("q")), Err(GatewayError::Auth { status: 401 })));
    assert_eq!(provider.calls.load(Ordering::SeqCst), 1);
}

#[test]
fn retries_are_bounded() {
    let provider = Scripted::new((0..10).map(|_| GatewayError::Server { status: 500, body: String::new() }).collect());
    let gw = Gateway::new(provider.clone(), &config(3), Arc::new(FakeClock::default()), None);
    match gw.complete(&req("q")) {
        Err(GatewayError::RetriesExhausted { attempts: 3, .. }) => {}
        other => panic!("unexpected {other:?}"),
    }
    assert_eq!(provider.calls.load(Ordering::SeqCst), 3);
}

#[test]
fn cached_responses_skip_the_provider() {
    let dir = tempfile::tempdir().unwrap();
    let provider = Scripted::new(vec![]);
    let clock = Arc::new(FakeClock::default());
    let gw = Gateway::new(provider.clone(), &config(1), clock.clone(), Some(ResponseCache::new(dir.path())));
    gw.complete(&req("q")).unwrap();
    let gw2 = Gateway::new(provider.clone(), &config(1), clock, Some(ResponseCache::new(dir.path())));
    gw2.complete(&req("q")).unwrap();
    assert_eq!(provider.calls.load(Ordering::SeqCst), 1);
    assert_eq!(gw2.stats().cache_hits, 1);
}

#[test]
fn two_stage_prompts_return_the_followup_reply() {
    let rec = fixture_record(TaskKind::Arithmetic, "((87*-51)-(47*-6))", "r".into()).unwrap();
    let gw = Gateway::new(Arc::new(OracleMock), &config(1), Arc::new(FakeClock::default()), None);
    let bundle = build_prompt(TaskKind::Arithmetic, PromptMethod::SelfConsistency, &rec).unwrap();
    let outs = gw.run_bundle("m", &bundle, 64).unwrap();
    assert_eq!(outs, vec![" 45"; 5]);
    assert_eq!(gw.stats().provider_calls, 10);
}

#[test]
fn noisy_mock_is_deterministic_per_request() {
    let rec = fixture_record(TaskKind::ListOps, "[MIN[MAX243]4[MAX937]]", "r".into()).unwrap();
    let bundle = build_prompt(TaskKind::ListOps, PromptMethod::SelfConsistency, &rec).unwrap();
    let gw = |seed| Gateway::new(Arc::new(NoisyMock { error_rate: 0.5, seed }), &config(1), Arc::new(FakeClock::default()), None);
    let a = gw(1).run_bundle("m", &bundle, 64).unwrap();
    assert_eq!(a, gw(1).run_bundle("m", &bundle, 64).unwrap());
    assert!(a.iter().all(|s| s.trim().parse::<u8>().is_ok()));
}

struct Reply {
    status: u16,
    extra_headers: &'static str,
    body: String,
}

/// Serves one scripted reply per connection and records each raw request.
fn fake_server(replies: Vec<Reply>) -> (String, Arc<Mutex<Vec<String>>>, thread::JoinHandle<()>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1", listener.local_addr().unwrap());
    let seen = Arc::new(Mutex::new(Vec::new()));
    let log = seen.clone();
    let handle = thread::spawn(move || {
        for reply in replies {
            let (stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream);
            let mut head = String::new();
            let mut length = 0usize;
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                    length = v.trim().parse().unwrap();
                }
                head.push_str(&line);
                if line == "\r\n" || line.is_empty() {
                    break;
                }
            }
            let mut body = vec![0; length];
            reader.read_exact(&mut body).unwrap();
            log.lock().unwrap().push(head + &String::from_utf8(body).unwrap());
            let mut stream = reader.into_inner();
            write!(
                stream,
                "HTTP/1.1 {} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\n{}Connection: close\r\n\r\n{}",
                reply.status,
                reply.body.len(),
                reply.extra_headers,
                reply.body
            )
            .unwrap();
        }
    });
    (url, seen, handle)
}

#[test]
fn http_provider_speaks_chat_completions() {
    let ok = r#"{"choices":[{"message":{"role":"assistant","content":"A: 42"}}]}"#;
    let (url, seen, handle) = fake_server(vec![
        Reply { status: 429, extra_headers: "Retry-After: 2\r\n", body: "{}".into() },
        Reply { status: 502, extra_headers: "", body: "bad gateway".into() },
        Reply { status: 200, extra_headers: "", body: ok.into() },
        Reply { status: 401, extra_headers: "", body: "{}".into() },
        Reply { status: 200, extra_headers: "", body: "{\"choices\":[]}".into() },
    ]);
    let provider = Arc::new(ChatCompletionsProvider::new(url, ApiKey::new("sk-test"), Duration::from_secs(5)));
    let clock = Arc::new(FakeClock::default());
    let gw = Gateway::new(provider, &config(4), clock.clone(), None);

    assert_eq!(gw.complete(&req("first")).unwrap(), "A: 42");
    assert_eq!(clock.sleeps(), [Duration::from_secs(2), Duration::from_millis(200)]);
    assert!(matches!(gw.complete(&req("second")), Err(GatewayError::Auth { status: 401 })));
    assert!(matches!(gw.complete(&req("third")), Err(GatewayError::Malformed(_))));
    handle.join().unwrap();

    let seen = seen.lock().unwrap();
    assert_eq!(seen.len(), 5);
    assert!(seen[0].starts_with("POST /v1/chat/completions HTTP/1.1"));
    assert!(seen[0].contains("authorization: Bearer sk-test") || seen[0].contains("Authorization: Bearer sk-test"));
    let body: serde_json::Value = serde_json::from_str(seen[0].split("\r\n\r\n").nth(1).unwrap()).unwrap();
    assert_eq!(body["model"], "test-model");
    assert_eq!(body["messages"][0]["role"], "user");
    assert_eq!(body["messages"][0]["content"], "first");
    assert_eq!(body["max_tokens"], 32);
}
