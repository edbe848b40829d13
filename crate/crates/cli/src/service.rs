//! JSON-over-HTTP prediction API over one immutable model.
//!
//! `GET /api/model` returns the model file exactly as serialized.
//! `POST /api/predict` takes a flat object of predictor codes and returns the
//! three class probabilities and the predicted level. `POST /api/whatif`
//! sweeps one model variable over a list of values with the rest held fixed.
//! Malformed or missing fields yield 400; codes outside a variable's domain
//! yield 422. Both carry `{"error": message}`.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::Serialize;
use serde_json::{Map, Value};
use tower_http::cors::{Any, CorsLayer};
use tower_http::services::ServeDir;

use itemgauge::item::VarKind;
use itemgauge::{serialize_model, to_canonical_json, DifficultyLevel, FittedModel, ItemCoding, Predictor};

#[derive(Clone)]
struct AppState {
    model: Arc<FittedModel>,
    model_json: Arc<String>,
}

#[derive(Debug, Serialize)]
struct Prediction {
    p_low: f64,
    p_moderate: f64,
    p_high: f64,
    level: DifficultyLevel,
}

#[derive(Debug, Serialize)]
struct SweepPoint {
    value: i64,
    #[serde(flatten)]
    prediction: Prediction,
}

#[derive(Debug)]
struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            message: message.into(),
        }
    }

    fn unprocessable(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            message: message.into(),
        }
    }
}

fn json_response(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        json_response(
            self.status,
            to_canonical_json(&serde_json::json!({ "error": self.message })),
        )
    }
}

fn parse_object(body: &[u8]) -> Result<Map<String, Value>, ApiError> {
    match serde_json::from_slice::<Value>(body) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(ApiError::bad_request("request body must be a JSON object")),
        Err(e) => Err(ApiError::bad_request(format!("invalid JSON: {e}"))),
    }
}

fn integer(field: &str, value: &Value) -> Result<i64, ApiError> {
    value
        .as_i64()
        .ok_or_else(|| ApiError::bad_request(format!("field `{field}` must be an integer")))
}

fn default_code(var: Predictor) -> i64 {
    match var.kind() {
        VarKind::Ordinal { .. } => 1,
        VarKind::Count => 0,
    }
}

/// Builds an item from predictor fields; every model variable is required,
/// other predictors are optional and default to their lowest code.
fn parse_coding(model: &FittedModel, fields: &Map<String, Value>) -> Result<ItemCoding, ApiError> {
    let mut codes = Predictor::ALL.map(default_code);
    let mut item_id = "request".to_string();
    let mut supplied = Vec::new();
    for (key, value) in fields {
        if key == "item_id" {
            item_id = value
                .as_str()
                .ok_or_else(|| ApiError::bad_request("field `item_id` must be a string"))?
                .to_string();
            continue;
        }
        let var: Predictor = key
            .parse()
            .map_err(|_| ApiError::bad_request(format!("unknown field `{key}`")))?;
        codes[var.index()] = integer(key, value)?;
        supplied.push(var);
    }
    if let Some(missing) = model.variables.iter().find(|v| !supplied.contains(v)) {
        return Err(ApiError::bad_request(format!("missing field `{missing}`")));
    }
    for var in &supplied {
        if let Some(msg) = var.violation(codes[var.index()]) {
            return Err(ApiError::unprocessable(msg));
        }
    }
    Ok(ItemCoding::new(item_id, codes))
}

fn predict(model: &FittedModel, item: &ItemCoding) -> Result<Prediction, ApiError> {
    let p = model
        .predict_probs(item)
        .map_err(|e| ApiError::unprocessable(e.to_string()))?;
    Ok(Prediction {
        p_low: p.p_low,
        p_moderate: p.p_moderate,
        p_high: p.p_high,
        level: p.argmax(),
    })
}

async fn get_model(State(state): State<AppState>) -> Response {
    json_response(StatusCode::OK, state.model_json.as_ref().clone())
}

async fn post_predict(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let fields = parse_object(&body)?;
    let item = parse_coding(&state.model, &fields)?;
    let p = predict(&state.model, &item)?;
    Ok(json_response(StatusCode::OK, to_canonical_json(&p)))
}

async fn post_whatif(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let fields = parse_object(&body)?;
    let field = |name: &str| {
        fields
            .get(name)
            .ok_or_else(|| ApiError::bad_request(format!("missing field `{name}`")))
    };
    let base = match field("base")? {
        Value::Object(map) => map,
        _ => return Err(ApiError::bad_request("field `base` must be an object")),
    };
    let name = field("variable")?
        .as_str()
        .ok_or_else(|| ApiError::bad_request("field `variable` must be a string"))?;
    let var: Predictor = name
        .parse()
        .map_err(|_| ApiError::bad_request(format!("unknown variable `{name}`")))?;
    if !state.model.variables.contains(&var) {
        return Err(ApiError::unprocessable(format!("variable `{var}` is not in the model")));
    }
    let values = field("values")?
        .as_array()
        .ok_or_else(|| ApiError::bad_request("field `values` must be an array"))?
        .iter()
        .map(|v| integer("values", v))
        .collect::<Result<Vec<i64>, _>>()?;
    if let Some(unknown) = fields
        .keys()
        .find(|k| !["base", "variable", "values"].contains(&k.as_str()))
    {
        return Err(ApiError::bad_request(format!("unknown field `{unknown}`")));
    }
    let mut item = parse_coding(&state.model, base)?;
    let mut sweep = Vec::with_capacity(values.len());
    for value in values {
        if let Some(msg) = var.violation(value) {
            return Err(ApiError::unprocessable(msg));
        }
        item.set(var, value);
        sweep.push(SweepPoint {
            value,
            prediction: predict(&state.model, &item)?,
        });
    }
    Ok(json_response(StatusCode::OK, to_canonical_json(&sweep)))
}

/// The service router; `ui_dir`, when given, is served at `/`.
pub fn router(model: FittedModel, ui_dir: Option<PathBuf>) -> Router {
    let state = AppState {
        model_json: Arc::new(serialize_model(&model)),
        model: Arc::new(model),
    };
    let cors = CorsLayer::new()
        .allow_origin(Any)
        .allow_methods([Method::GET, Method::POST])
        .allow_headers([header::CONTENT_TYPE]);
    let api = Router::new()
        .route("/api/model", get(get_model))
        .route("/api/predict", post(post_predict))
        .route("/api/whatif", post(post_whatif))
        .with_state(state);
    let app = match ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    };
    app.layer(cors)
}

/// Binds and serves until the process is stopped.
pub async fn serve(model: FittedModel, addr: SocketAddr, ui_dir: Option<PathBuf>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(model, ui_dir)).await
}
