use std::io::{Read, Write};
use std::net::TcpStream;
use std::path::PathBuf;
use std::sync::Arc;

use serde_json::{json, Value};

use articopt::AgreementStore;
use articopt_cli::service::{self, Response, Service};

const UCSD: &str = "UC San Diego|History|2021-2022";
const CSUF: &str = "CSU Fullerton|History|2021-2022";

fn service() -> Service {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/glendale");
    Service::new(AgreementStore::load_dir(dir).unwrap())
}

fn post(service: &Service, path: &str, body: Value) -> Response {
    service.handle("POST", path, body.to_string().as_bytes())
}

#[test]
fn health_catalog_and_agreements() {
    let s = service();
    assert_eq!(s.handle("GET", "/api/health", b""), Response { status: 200, body: json!({"status": "ok"}) });
    let catalog = s.handle("GET", "/api/catalog", b"");
    assert_eq!(catalog.status, 200);
    assert_eq!(catalog.body["courses"].as_array().unwrap().len(), 6);
    let agreements = s.handle("GET", "/api/agreements", b"");
    let ids: Vec<&str> = agreements.body.as_array().unwrap().iter().map(|a| a["id"].as_str().unwrap()).collect();
    assert_eq!(ids, [CSUF, UCSD]);
    assert_eq!(agreements.body[1]["kind"], "major");
}

#[test]
fn solve_glendale_history() {
    let r = post(&service(), "/api/solve", json!({"agreement_ids": [UCSD]}));
    assert_eq!(r.status, 200, "{}", r.body);
    assert_eq!(r.body["opt_size"], 2);
    assert_eq!(r.body["all_optima"].as_array().unwrap().len(), 6);
    assert_eq!(r.body["report"]["rows"].as_array().unwrap().len(), 2);
    assert!(r.body.get("unit_cap_warning").is_none());
}

#[test]
fn solve_with_cap_warns() {
    let r = post(&service(), "/api/solve", json!({"agreement_ids": [UCSD, CSUF], "unit_cap": 3}));
    assert_eq!(r.status, 200);
    assert_eq!(r.body["unit_cap_warning"], json!({"total_units": 6.0, "cap": 3.0}));
}

#[test]
fn infeasible_is_422_with_requirements() {
    let r = post(&service(), "/api/solve", json!({"agreement_ids": [CSUF], "excludes": ["ENG 200"]}));
    assert_eq!(r.status, 422);
    assert_eq!(r.body["error"], "INFEASIBLE");
    assert_eq!(r.body["unsatisfiable"], json!([{"agreement": CSUF, "requirement": "writing"}]));
}

#[test]
fn bad_requests_are_400() {
    let s = service();
    assert_eq!(s.handle("POST", "/api/solve", b"{not json").status, 400);
    assert_eq!(post(&s, "/api/solve", json!({"agreement_ids": [UCSD], "extra": 1})).status, 400);
    assert_eq!(post(&s, "/api/solve", json!({"agreement_ids": []})).status, 400);
    let unknown = post(&s, "/api/solve", json!({"agreement_ids": ["nope"]}));
    assert_eq!((unknown.status, unknown.body["error"].as_str()), (400, Some("UNKNOWN_AGREEMENT")));
    let conflict = post(&s, "/api/solve", json!({"agreement_ids": [UCSD], "pins": ["ENG 200"], "excludes": ["ENG 200"]}));
    assert_eq!(conflict.status, 400);
    assert_eq!(post(&s, "/api/score", json!({"agreement_ids": [UCSD], "plan": ["HIST 999"]})).status, 400);
}

#[test]
fn routing_errors() {
    let s = service();
    assert_eq!(s.handle("GET", "/api/nothing", b"").status, 404);
    assert_eq!(s.handle("GET", "/api/solve", b"").status, 405);
    assert_eq!(s.handle("POST", "/api/health", b"").status, 405);
}

#[test]
fn score_counts_mistakes() {
    let r = post(&service(), "/api/score", json!({"agreement_ids": [UCSD], "plan": ["ENG 200", "HIST 110"]}));
    assert_eq!(r.status, 200);
    assert_eq!(r.body["total"], 2);
    assert_eq!(r.body["unfulfilled"], json!([{"agreement": UCSD, "requirement": "american-history"}]));
}

#[test]
fn concurrent_requests_agree() {
    let s = Arc::new(service());
    let expected = post(&s, "/api/solve", json!({"agreement_ids": [UCSD, CSUF]}));
    let handles: Vec<_> = (0..8)
        .map(|_| {
            let s = s.clone();
            std::thread::spawn(move || post(&s, "/api/solve", json!({"agreement_ids": [UCSD, CSUF]})))
        })
        .collect();
    for h in handles {
        assert_eq!(h.join().unwrap(), expected);
    }
}

fn http(port: u16, request: &str) -> (u16, Value) {
    let mut stream = TcpStream::connect(("127.0.0.1", port)).unwrap();
    stream.write_all(request.as_bytes()).unwrap();
    let mut raw = String::new();
    stream.read_to_string(&mut raw).unwrap();
    let status = raw[9..12].parse().unwrap();
    let body = raw.split_once("\r\n\r\n").unwrap().1;
    (status, serde_json::from_str(body).unwrap())
}

#[test]
fn live_http_round_trip() {
    let runtime = tokio::runtime::Runtime::new().unwrap();
    let listener = runtime.block_on(tokio::net::TcpListener::bind("127.0.0.1:0")).unwrap();
    let port = listener.local_addr().unwrap().port();
    runtime.spawn(service::serve(listener, Arc::new(service())));

    let (status, body) = http(port, "GET /api/health HTTP/1.1\r\nHost: x\r\nConnection: close\r\n\r\n");
    assert_eq!((status, body), (200, json!({"status": "ok"})));

    let payload = json!({"agreement_ids": [UCSD]}).to_string();
    let request = format!(
        "POST /api/solve HTTP/1.1\r\nHost: x\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{payload}",
        payload.len()
    );
    let (status, body) = http(port, &request);
    assert_eq!(status, 200);
    assert_eq!(body["opt_size"], 2);

    let (status, _) = http(port, "GET /missing HTTP/1.1\r\nHost: x\r\nConnection: close\r\n\r\n");
    assert_eq!(status, 404);
}
