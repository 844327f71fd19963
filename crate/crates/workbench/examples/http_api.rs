//! Query the HTTP service the way the browser front end does, without
//! opening a socket: configs, influencing options, a chain and its source view.
//!
//!     cargo run -p perfchain-workbench --example http_api

use axum::body::Body;
use axum::http::{Method, Request};
use clap::Parser;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;
use workbench::cli::{run, Cli};
use workbench::server::{router, AppState};

async fn call(app: &axum::Router, method: Method, uri: &str, body: Option<Value>) -> Value {
    let req = Request::builder()
        .method(&method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
        .unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    let v: Value = serde_json::from_slice(&bytes).unwrap();
    println!("{method} {uri} -> {status}");
    v
}

#[tokio::main(flavor = "current_thread")]
async fn main() {
    let dir = tempfile::tempdir().unwrap();
    let ws = dir.path().join("ws");
    for step in [
        &["init", "--fixture", "berkeley-mini"][..],
        &["measure"],
        &["model"],
        &["hotspots", "default", "user"],
    ] {
        let mut argv = vec!["perfchain", "--workspace", ws.to_str().unwrap()];
        argv.extend_from_slice(step);
        run(&Cli::parse_from(argv)).unwrap();
    }

    let app = router(AppState::load(&ws).unwrap());
    let configs = call(&app, Method::GET, "/api/configs", None).await;
    println!("  configurations: {:?}", configs["configs"].as_object().unwrap().keys().collect::<Vec<_>>());

    let pair = json!({"from": "default", "to": "user"});
    let infl = call(&app, Method::POST, "/api/influencing-options", Some(pair.clone())).await;
    for i in infl["influences"].as_array().unwrap() {
        println!("  {} {:+}", i["options"], i["delta"].as_f64().unwrap());
    }

    let chain = call(&app, Method::POST, "/api/cause-effect", Some(pair)).await;
    for n in chain["method_graph"]["nodes"].as_array().unwrap() {
        println!("  {} {}", n["role"], n["function"]);
    }
    let file = chain["highlights"].as_object().unwrap().keys().next().unwrap().clone();
    let uri = format!("/api/source?file={file}&chop_id={}", chain["chop_id"].as_str().unwrap());
    let src = call(&app, Method::GET, &uri, None).await;
    let text = src["source"].as_str().unwrap();
    for h in src["highlights"].as_array().unwrap() {
        let (a, b) = (h["start"].as_u64().unwrap() as usize, h["end"].as_u64().unwrap() as usize);
        println!("  {:>3}:{:<3} {}", h["line"].as_u64().unwrap(), h["column"].as_u64().unwrap(), text[a..b].lines().next().unwrap().trim());
    }

    let missing = call(&app, Method::POST, "/api/profile-diff", Some(json!({"from": "default", "to": "nope"}))).await;
    println!("  {}", missing["error"]);
}
