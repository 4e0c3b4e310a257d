use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use revzeck::solver::solve;
use revzeck::{GameState, Label};
use revzeck_server::{router, Limits, Store};
use serde_json::{json, Value};
use tower::ServiceExt;

fn app() -> (Router, Arc<Store>) {
    let store = Arc::new(Store::new(Limits::default()));
    (router(Arc::clone(&store)), store)
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string()))
            .unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap()
    };
    (status, value)
}

async fn create(app: &Router, body: Value) -> Value {
    let (status, v) = call(app, Method::POST, "/games", Some(body)).await;
    assert_eq!(status, StatusCode::CREATED, "{v}");
    v
}

#[tokio::test]
async fn fresh_zeckendorf_game() {
    let (app, _) = app();
    let g = create(
        &app,
        json!({"mode": "reversed_zeck", "n": 7, "engine_side": 2, "engine_policy": "optimal"}),
    )
    .await;
    assert_eq!(g["state"], "0,1,0,1");
    assert_eq!(g["to_move"], 1);
    assert_eq!(g["status"], "in_progress");
    assert_eq!(g["history"], json!([]));
    assert_eq!(
        g["legal_moves"],
        json!([{"type": "split", "index": 2}, {"type": "split", "index": 4}])
    );
    let id = g["id"].as_str().unwrap();
    let (status, again) = call(&app, Method::GET, &format!("/games/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(again, g);
}

#[tokio::test]
async fn engine_reply_and_game_over() {
    let (app, _) = app();
    let g = create(&app, json!({"mode": "reversed_zeck", "n": 4})).await;
    let id = g["id"].as_str().unwrap();
    let uri = format!("/games/{id}/moves");
    let (status, g) = call(
        &app,
        Method::POST,
        &uri,
        Some(json!({"type": "split", "index": 3})),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(
        g["history"][1],
        json!({"player": 2, "move": {"type": "split", "index": 2}})
    );
    assert_eq!(g["state"], "4");
    assert_eq!(g["status"], "p2_won");
    let (status, e) = call(
        &app,
        Method::POST,
        &uri,
        Some(json!({"type": "split", "index": 2})),
    )
    .await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(e["code"], "game_over");
}

#[tokio::test]
async fn illegal_moves_list_the_legal_ones() {
    let (app, _) = app();
    let g = create(&app, json!({"mode": "reversed_zeck", "n": 7})).await;
    let uri = format!("/games/{}/moves", g["id"].as_str().unwrap());
    let (status, e) = call(
        &app,
        Method::POST,
        &uri,
        Some(json!({"type": "split", "index": 3})),
    )
    .await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(e["code"], "illegal_move");
    assert_eq!(e["legal_moves"], g["legal_moves"]);
    let (status, e) = call(
        &app,
        Method::POST,
        &uri,
        Some(json!({"type": "place", "value": 1})),
    )
    .await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(e["code"], "illegal_move");
}

#[tokio::test]
async fn engine_opens_with_combine() {
    let (app, _) = app();
    let g = create(
        &app,
        json!({"mode": "reversed_zeck", "n": 6, "engine_side": 1}),
    )
    .await;
    assert_eq!(
        g["history"][0],
        json!({"player": 1, "move": {"type": "combine", "index": 3}})
    );
    assert_eq!(g["state"], "0,0,2");
    assert_eq!(g["to_move"], 2);
}

#[tokio::test]
async fn analysis_views() {
    let (app, _) = app();
    let g = create(&app, json!({"mode": "reversed_zeck", "n": 3})).await;
    let (status, a) = call(
        &app,
        Method::GET,
        &format!("/games/{}/analysis", g["id"].as_str().unwrap()),
        None,
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(a["winner_under_optimal"], 2);
    assert_eq!(a["label"], "L");

    let g = create(&app, json!({"mode": "reversed_zeck", "n": 2})).await;
    let (_, a) = call(
        &app,
        Method::GET,
        &format!("/games/{}/analysis", g["id"].as_str().unwrap()),
        None,
    )
    .await;
    assert_eq!(a["winner_under_optimal"], 1);
    assert_eq!(a["optimal_moves"], json!([{"type": "split", "index": 2}]));

    let g = create(
        &app,
        json!({"mode": "chomp", "rows": 3, "cols": 1, "engine_side": 2}),
    )
    .await;
    assert_eq!(g["to_move"], 1);
    assert_eq!(g["state"], json!({"rows": 3, "cols": 1, "heights": [1]}));
    let (_, a) = call(
        &app,
        Method::GET,
        &format!("/games/{}/analysis", g["id"].as_str().unwrap()),
        None,
    )
    .await;
    assert_eq!(a["winner_under_optimal"], 1);
    assert_eq!(
        a["optimal_moves"],
        json!([{"type": "chomp", "heights": [3]}])
    );

    let g = create(
        &app,
        json!({"mode": "reversed_zeck", "n": 200, "engine_policy": "random"}),
    )
    .await;
    let (status, e) = call(
        &app,
        Method::GET,
        &format!("/games/{}/analysis", g["id"].as_str().unwrap()),
        None,
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(e["code"], "over_solve_limit");
}

#[tokio::test]
async fn buildup_placement_phase() {
    let (app, _) = app();
    let g = create(
        &app,
        json!({"mode": "buildup", "n": 4, "engine_side": 2, "engine_policy": "strategy"}),
    )
    .await;
    assert_eq!(g["state"]["phase"], "placing");
    assert_eq!(g["to_move"], 1);
    assert_eq!(
        g["legal_moves"],
        json!([{"type": "place", "value": 1}, {"type": "place", "value": 2}, {"type": "place", "value": 3}])
    );
    // The engine (P2) loses n = 4 but still answers with a legal move.
    let uri = format!("/games/{}/moves", g["id"].as_str().unwrap());
    let (status, g) = call(
        &app,
        Method::POST,
        &uri,
        Some(json!({"type": "place", "value": 3})),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(
        g["history"][1]["move"],
        json!({"type": "place", "value": 1})
    );
    assert_eq!(g["state"]["phase"], "playing");
    assert_eq!(g["state"]["heights"], "1,0,1");
    assert_eq!(g["to_move"], 1);
}

#[tokio::test]
async fn request_errors() {
    let (app, _) = app();
    let (status, e) = call(&app, Method::GET, "/games/nope", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(e["code"], "not_found");
    let (status, e) = call(
        &app,
        Method::POST,
        "/games",
        Some(json!({"mode": "reversed_zeck", "n": 81})),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(e["code"], "over_solve_limit");
    let (status, e) = call(
        &app,
        Method::POST,
        "/games",
        Some(json!({"mode": "reversed_zeck"})),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{e}");
    let (status, _) = call(
        &app,
        Method::POST,
        "/games",
        Some(json!({"mode": "custom_start", "heights": "x"})),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let req = Request::builder()
        .method(Method::POST)
        .uri("/games")
        .header("content-type", "application/json")
        .body(Body::from("{not json"))
        .unwrap();
    assert_eq!(
        app.clone().oneshot(req).await.unwrap().status(),
        StatusCode::BAD_REQUEST
    );
}

#[tokio::test]
async fn delete_then_get() {
    let (app, _) = app();
    let g = create(&app, json!({"mode": "custom_start", "heights": "2,0,2"})).await;
    let uri = format!("/games/{}", g["id"].as_str().unwrap());
    assert_eq!(
        call(&app, Method::DELETE, &uri, None).await.0,
        StatusCode::NO_CONTENT
    );
    assert_eq!(
        call(&app, Method::GET, &uri, None).await.0,
        StatusCode::NOT_FOUND
    );
    assert_eq!(
        call(&app, Method::DELETE, &uri, None).await.0,
        StatusCode::NOT_FOUND
    );
}

/// Play a whole game as P1 by always taking the last listed move, and check
/// the optimal engine never moves from a won position to another won one.
#[tokio::test]
async fn optimal_engine_keeps_wins() {
    let (app, _) = app();
    for n in [7, 12, 20, 33] {
        let g = create(&app, json!({"mode": "reversed_zeck", "n": n})).await;
        let uri = format!("/games/{}/moves", g["id"].as_str().unwrap());
        let mut g = g;
        while g["status"] == "in_progress" {
            let mv = g["legal_moves"].as_array().unwrap().last().unwrap().clone();
            let (status, next) = call(&app, Method::POST, &uri, Some(mv)).await;
            assert_eq!(status, StatusCode::OK);
            g = next;
        }
        let result = solve(&GameState::zeckendorf(n).unwrap());
        let mut state = GameState::zeckendorf(n).unwrap();
        for h in g["history"].as_array().unwrap() {
            let mv: revzeck::Move = serde_json::from_value(h["move"].clone()).unwrap();
            let next = state.apply(mv).unwrap();
            if h["player"] == 2 && result.label(&state) == Some(Label::Win) {
                assert_eq!(result.label(&next), Some(Label::Loss), "n = {n} at {state}");
            }
            state = next;
        }
        let last = g["history"].as_array().unwrap().last().unwrap()["player"]
            .as_u64()
            .unwrap();
        assert_eq!(g["status"], if last == 1 { "p1_won" } else { "p2_won" });
    }
}

#[tokio::test]
async fn snapshot_roundtrip() {
    let (app, store) = app();
    for body in [
        json!({"mode": "reversed_zeck", "n": 10, "engine_side": 1}),
        json!({"mode": "chomp", "rows": 4, "cols": 3, "engine_policy": "strategy"}),
        json!({"mode": "buildup", "n": 9, "engine_side": 1, "engine_policy": "random", "seed": 5}),
    ] {
        let g = create(&app, body).await;
        let mv = g["legal_moves"][0].clone();
        let uri = format!("/games/{}/moves", g["id"].as_str().unwrap());
        assert_eq!(
            call(&app, Method::POST, &uri, Some(mv)).await.0,
            StatusCode::OK
        );
    }
    let path = std::env::temp_dir().join(format!("revzeck-snapshot-{}.json", std::process::id()));
    store.save_snapshot(&path).unwrap();
    let restored = Arc::new(Store::new(Limits::default()));
    assert!(restored.load_snapshot(&path).unwrap().is_empty());
    std::fs::remove_file(&path).unwrap();
    let app2 = router(Arc::clone(&restored));
    for r in store.records() {
        let uri = format!("/games/{}", r.id);
        assert_eq!(
            call(&app, Method::GET, &uri, None).await,
            call(&app2, Method::GET, &uri, None).await
        );
    }
    assert_eq!(store.records(), restored.records());
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn sessions_in_parallel() {
    let (app, _) = app();
    let tasks: Vec<_> = (2..12)
        .map(|n| {
            let app = app.clone();
            tokio::spawn(
                async move { create(&app, json!({"mode": "reversed_zeck", "n": n})).await },
            )
        })
        .collect();
    let mut ids = std::collections::HashSet::new();
    for t in tasks {
        ids.insert(t.await.unwrap()["id"].as_str().unwrap().to_string());
    }
    assert_eq!(ids.len(), 10);
}
