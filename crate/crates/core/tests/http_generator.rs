//! HTTP adapter against a throwaway local server.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use umf_core::pipeline::{fetch_candidates, GeneratorError, GeneratorRequest, HttpSource, RetryPolicy};
use umf_core::semantic::BiasMap;

struct Seen {
    path: String,
    auth: Option<String>,
    body: String,
}

fn read_request(stream: &mut TcpStream) -> Seen {
    let mut reader = BufReader::new(stream.try_clone().unwrap());
    let mut line = String::new();
    reader.read_line(&mut line).unwrap();
    let path = line.split_whitespace().nth(1).unwrap_or_default().to_string();
    let (mut len, mut auth) = (0, None);
    loop {
        let mut h = String::new();
        reader.read_line(&mut h).unwrap();
        if h.trim().is_empty() {
            break;
        }
        let (k, v) = h.split_once(':').unwrap();
        match k.to_ascii_lowercase().as_str() {
            "content-length" => len = v.trim().parse().unwrap(),
            "authorization" => auth = Some(v.trim().to_string()),
            _ => {}
        }
    }
    let mut body = vec![0; len];
    reader.read_exact(&mut body).unwrap();
    Seen {
        path,
        auth,
        body: String::from_utf8(body).unwrap(),
    }
}

/// Serves the scripted (status, body) replies in order, one per connection.
fn serve(replies: Vec<(u16, &'static str)>) -> (String, Arc<Mutex<Vec<Seen>>>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}", listener.local_addr().unwrap());
    let seen = Arc::new(Mutex::new(Vec::new()));
    let log = Arc::clone(&seen);
    thread::spawn(move || {
        for (status, body) in replies {
            let Ok((mut stream, _)) = listener.accept() else { return };
            let req = read_request(&mut stream);
            log.lock().unwrap().push(req);
            let reply = format!(
                "HTTP/1.1 {status} X\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
                body.len()
            );
            stream.write_all(reply.as_bytes()).unwrap();
        }
    });
    (url, seen)
}

fn request(n: usize) -> GeneratorRequest {
    let mut bias = BiasMap::default();
    bias.adjustments.insert("සෙල්ලම්".into(), 1.0);
    GeneratorRequest {
        source_text: "The children play.".into(),
        source_lang: "en".into(),
        target_lang: "si".into(),
        n,
        bias,
    }
}

fn source(url: &str) -> HttpSource {
    HttpSource::new(url, Some("secret".into()), Duration::from_secs(5))
        .unwrap()
        .with_retry(RetryPolicy {
            max_retries: 3,
            initial_backoff: Duration::from_millis(5),
        })
}

const OK: &str = r#"{"candidates":[{"text":"b","model_score":-2.0,"rank":2},{"text":"a","model_score":-1.0,"rank":1}],"honored_bias":true}"#;

#[test]
fn posts_request_with_bearer_token() {
    let (url, seen) = serve(vec![(200, OK)]);
    let (set, prov) = fetch_candidates(&source(&url), "s1", &request(4)).unwrap();
    assert_eq!(set.candidates.len(), 2);
    assert!(prov.honored_bias);
    assert_eq!(prov.bias.adjustments["සෙල්ලම්"], 1.0);
    let seen = seen.lock().unwrap();
    assert_eq!(seen[0].path, "/generate");
    assert_eq!(seen[0].auth.as_deref(), Some("Bearer secret"));
    let body: serde_json::Value = serde_json::from_str(&seen[0].body).unwrap();
    assert_eq!(body["n"], 4);
    assert_eq!(body["bias"]["සෙල්ලම්"], 1.0);
}

#[test]
fn retries_server_errors_then_succeeds() {
    let (url, seen) = serve(vec![(503, "{}"), (429, "{}"), (200, OK)]);
    assert!(fetch_candidates(&source(&url), "s1", &request(4)).is_ok());
    assert_eq!(seen.lock().unwrap().len(), 3);
}

#[test]
fn gives_up_after_three_retries() {
    let (url, seen) = serve(vec![(500, "{}"); 5]);
    let err = fetch_candidates(&source(&url), "s1", &request(4)).unwrap_err();
    assert!(matches!(err, GeneratorError::Transport(_)), "{err:?}");
    assert_eq!(seen.lock().unwrap().len(), 4);
}

#[test]
fn malformed_body_is_protocol_error() {
    let (url, _) = serve(vec![(200, "{\"candidates\": 3}")]);
    let err = fetch_candidates(&source(&url), "s1", &request(4)).unwrap_err();
    assert!(matches!(err, GeneratorError::Protocol(_)), "{err:?}");
}

#[test]
fn duplicate_rank_is_protocol_error() {
    let (url, _) = serve(vec![(
        200,
        r#"{"candidates":[{"text":"a","rank":1},{"text":"b","rank":1}],"honored_bias":false}"#,
    )]);
    let err = fetch_candidates(&source(&url), "s1", &request(4)).unwrap_err();
    assert!(matches!(err, GeneratorError::Protocol(_)), "{err:?}");
}

#[test]
fn empty_candidate_list() {
    let (url, _) = serve(vec![(200, r#"{"candidates":[],"honored_bias":false}"#)]);
    let err = fetch_candidates(&source(&url), "s1", &request(4)).unwrap_err();
    assert_eq!(err, GeneratorError::EmptyResponse);
}

#[test]
fn client_errors_are_not_retried() {
    let (url, seen) = serve(vec![(401, "{}"), (200, OK)]);
    let err = fetch_candidates(&source(&url), "s1", &request(4)).unwrap_err();
    assert!(matches!(err, GeneratorError::Transport(m) if m.contains("401")));
    assert_eq!(seen.lock().unwrap().len(), 1);
}

#[test]
fn connection_refused_is_transport_error() {
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let err = fetch_candidates(&source(&format!("http://127.0.0.1:{port}")), "s1", &request(4)).unwrap_err();
    assert!(matches!(err, GeneratorError::Transport(_)));
}
