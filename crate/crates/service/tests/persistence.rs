use serde_json::json;

use crowdval_service::store::Store;
use crowdval_service::testing::{epoch, stepping_clock, Client, PersonaSpec, World};
use crowdval_service::Platform;

const ANNOTATOR: PersonaSpec = PersonaSpec::new(false, false, true, true, false);

fn open(dir: &std::path::Path) -> Platform {
    Platform::open(Store::at(dir).unwrap(), 7, stepping_clock(epoch())).unwrap()
}

#[tokio::test]
async fn restart_reproduces_results() {
    let dir = tempfile::tempdir().unwrap();
    let w = World::default(open(dir.path()), &[ANNOTATOR, ANNOTATOR]).await;
    let pairs = w.develop_pairs().await;
    for (i, p) in pairs.iter().enumerate() {
        for who in 0..2 {
            let v = if (i + who) % 3 == 0 { "NotEquivalent" } else { "Equivalent" };
            let path = format!("/tasks/{}/pairs/{}/decision", w.task_id, p["id"].as_str().unwrap());
            w.client.ok("POST", &path, Some(&w.personas[who].token), Some(json!({ "value": v }))).await;
        }
    }
    let results = format!("/tasks/{}/results", w.task_id);
    let mid = format!("{results}?as_of=2024-01-01T00:00:40Z");
    let annotate = format!("/tasks/{}/pairs?view=annotate", w.task_id);
    let before = (
        w.client.ok("GET", &results, Some(&w.admin.token), None).await,
        w.client.ok("GET", &mid, Some(&w.admin.token), None).await,
        w.client.ok("GET", &annotate, Some(&w.personas[0].token), None).await,
    );
    drop(w.client);

    let client = Client::new(open(dir.path()));
    let after = (
        client.ok("GET", &results, Some(&w.admin.token), None).await,
        client.ok("GET", &mid, Some(&w.admin.token), None).await,
        client.ok("GET", &annotate, Some(&w.personas[0].token), None).await,
    );
    assert_eq!(before.0.to_string(), after.0.to_string());
    assert_eq!(before.1.to_string(), after.1.to_string());
    assert_eq!(before.2.to_string(), after.2.to_string());
    assert_ne!(before.0.to_string(), before.1.to_string());
}

#[tokio::test]
async fn corrupt_event_log_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let w = World::default(open(dir.path()), &[ANNOTATOR]).await;
    let path = format!("/tasks/{}/pairs/{}-1/decision", w.task_id, w.task_id);
    w.client.ok("POST", &path, Some(&w.personas[0].token), Some(json!({ "value": "Equivalent" }))).await;
    let log = dir.path().join("events").join(format!("{}.ndjson", w.task_id));
    let mut text = std::fs::read_to_string(&log).unwrap();
    text.push_str("{ truncated\n");
    std::fs::write(&log, text).unwrap();
    let err = Platform::open(Store::at(dir.path()).unwrap(), 7, stepping_clock(epoch())).err().unwrap();
    assert_eq!(err.code(), "storage_error");
}
