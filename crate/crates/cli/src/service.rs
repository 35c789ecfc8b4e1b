//! HTTP service: live suggestions and feedback capture for the review UI.
//!
//! | method | path                        | body in        | body out               |
//! |--------|-----------------------------|----------------|------------------------|
//! | GET    | `/health`                   |                | [`Health`]             |
//! | POST   | `/suggest`                  | [`SuggestRequest`] | [`Suggestions`]    |
//! | POST   | `/feedback`                 | [`FeedbackRequest`] | [`FeedbackAck`]   |
//! | GET    | `/jobs/pending`             |                | `[`[`PendingJob`]`]`   |
//! | GET    | `/jobs/{id}/suggestions`    |                | [`JobSuggestions`]     |
//!
//! Errors come back as `{"error": "..."}` with status 400 (invalid input),
//! 404 (unknown job) or 500.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use sqgen_core::corpus::{load_dataset, FeedbackLog};
use sqgen_core::{
    generate_questions, Error, FeedbackLabel, FeedbackTriple, JobPosting, RankedQuestion,
    SqgModels, TemplateId,
};

/// Characters of the posting body shown in the pending list.
pub const EXCERPT_CHARS: usize = 200;

type Key = (String, TemplateId, Option<String>);

/// Shared, mostly immutable service state. Only the decision index changes,
/// and only after the feedback log has synced the new line.
pub struct AppState {
    models: SqgModels,
    /// Postings under review, oldest first.
    jobs: Vec<JobPosting>,
    by_id: HashMap<String, usize>,
    suggestions: Vec<Vec<RankedQuestion>>,
    log: FeedbackLog,
    /// Current label and record offset per question.
    decisions: Mutex<HashMap<Key, (FeedbackLabel, u64)>>,
}

impl AppState {
    /// Computes suggestions for every posting up front and indexes the
    /// existing feedback in `log_path`.
    pub fn new(
        models: SqgModels,
        jobs: Vec<JobPosting>,
        log_path: impl AsRef<std::path::Path>,
    ) -> anyhow::Result<Self> {
        let log_path = log_path.as_ref();
        let mut by_id = HashMap::new();
        for (i, j) in jobs.iter().enumerate() {
            if by_id.insert(j.id.clone(), i).is_some() {
                anyhow::bail!("duplicate job id {:?}", j.id);
            }
        }
        let suggestions = jobs
            .iter()
            .map(|j| generate_questions(j, &models))
            .collect::<Result<Vec<_>, _>>()?;
        let mut decisions = HashMap::new();
        if log_path.exists() {
            let rows: Vec<FeedbackTriple> = load_dataset(log_path)?;
            for (offset, t) in rows.into_iter().enumerate() {
                decisions.insert(
                    (t.job_id, t.template, t.parameter),
                    (t.label, offset as u64),
                );
            }
        }
        let log = FeedbackLog::open(log_path, Some(by_id.keys().cloned().collect()))?;
        Ok(Self {
            models,
            jobs,
            by_id,
            suggestions,
            log,
            decisions: Mutex::new(decisions),
        })
    }

    fn decision(&self, key: &Key) -> Option<FeedbackLabel> {
        self.decisions
            .lock()
            .unwrap_or_else(|p| p.into_inner())
            .get(key)
            .map(|d| d.0)
    }

    /// Stores a triple unless the same label is already current for its
    /// question, so client retries are harmless. Returns the offset of the
    /// stored row and whether a new row was written.
    fn record(&self, triple: &FeedbackTriple) -> sqgen_core::Result<(u64, bool)> {
        let key: Key = (
            triple.job_id.clone(),
            triple.template,
            triple.parameter.clone(),
        );
        let mut decisions = self.decisions.lock().unwrap_or_else(|p| p.into_inner());
        if let Some(&(label, offset)) = decisions.get(&key) {
            if label == triple.label {
                triple.validate()?;
                return Ok((offset, false));
            }
        }
        let offset = self.log.record(triple)?;
        decisions.insert(key, (triple.label, offset));
        Ok((offset, true))
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/suggest", post(suggest))
        .route("/feedback", post(feedback))
        .route("/jobs/pending", get(pending))
        .route("/jobs/{id}/suggestions", get(job_suggestions))
        .layer(tower_http::cors::CorsLayer::permissive())
        .with_state(state)
}

/// Binds `addr` and serves until ctrl-c.
pub async fn serve(state: Arc<AppState>, addr: &str) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::BAD_REQUEST,
            message: message.into(),
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::UnknownJob(_) => StatusCode::NOT_FOUND,
            Error::Io { .. } => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        };
        Self {
            status,
            message: e.to_string(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (
            self.status,
            Json(serde_json::json!({ "error": self.message })),
        )
            .into_response()
    }
}

fn parse<T: serde::de::DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body)
        .map_err(|e| ApiError::bad_request(format!("invalid request body: {e}")))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    pub jobs: usize,
    pub k: usize,
}

async fn health(State(state): State<Arc<AppState>>) -> Json<Health> {
    Json(Health {
        status: "ok".into(),
        jobs: state.jobs.len(),
        k: state.models.k,
    })
}

/// A posting to generate questions for. Only `body` is required.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuggestRequest {
    #[serde(default)]
    pub id: String,
    #[serde(default)]
    pub title: String,
    pub body: String,
    #[serde(default)]
    pub job_features: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionOut {
    pub template: TemplateId,
    pub parameter: Option<String>,
    pub score: f64,
}

impl From<&RankedQuestion> for QuestionOut {
    fn from(r: &RankedQuestion) -> Self {
        Self {
            template: r.question.template,
            parameter: r.question.parameter.clone(),
            score: r.score,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Suggestions {
    pub job_id: String,
    pub questions: Vec<QuestionOut>,
}

async fn suggest(
    State(state): State<Arc<AppState>>,
    body: Bytes,
) -> Result<Json<Suggestions>, ApiError> {
    let req: SuggestRequest = parse(&body)?;
    let job = JobPosting {
        id: req.id,
        title: req.title,
        body: req.body,
        job_features: req.job_features,
    };
    let ranked = generate_questions(&job, &state.models)?;
    Ok(Json(Suggestions {
        job_id: job.id,
        questions: ranked.iter().map(QuestionOut::from).collect(),
    }))
}

/// A reviewer decision. `timestamp` (Unix seconds) defaults to now.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeedbackRequest {
    pub job_id: String,
    pub template: TemplateId,
    #[serde(default)]
    pub parameter: Option<String>,
    pub label: FeedbackLabel,
    #[serde(default)]
    pub timestamp: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FeedbackAck {
    pub offset: u64,
    /// False when the same decision was already stored.
    pub stored: bool,
}

async fn feedback(
    State(state): State<Arc<AppState>>,
    body: Bytes,
) -> Result<Json<FeedbackAck>, ApiError> {
    let req: FeedbackRequest = parse(&body)?;
    let timestamp = req.timestamp.unwrap_or_else(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs())
    });
    let triple = FeedbackTriple {
        job_id: req.job_id,
        template: req.template,
        parameter: req.parameter,
        label: req.label,
        timestamp,
    };
    // The append syncs to disk; keep it off the async workers.
    let (offset, stored) = tokio::task::spawn_blocking(move || state.record(&triple))
        .await
        .map_err(|e| ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            message: e.to_string(),
        })??;
    Ok(Json(FeedbackAck { offset, stored }))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PendingJob {
    pub job_id: String,
    pub title: String,
    pub excerpt: String,
    /// Suggestions without a decision.
    pub pending: usize,
    pub total: usize,
}

/// Postings with at least one undecided suggestion, most recent first.
async fn pending(State(state): State<Arc<AppState>>) -> Json<Vec<PendingJob>> {
    let mut out = Vec::new();
    for (job, sugg) in state.jobs.iter().zip(&state.suggestions).rev() {
        let pending = sugg
            .iter()
            .filter(|r| {
                let key = (
                    job.id.clone(),
                    r.question.template,
                    r.question.parameter.clone(),
                );
                state.decision(&key).is_none()
            })
            .count();
        if pending > 0 {
            out.push(PendingJob {
                job_id: job.id.clone(),
                title: job.title.clone(),
                excerpt: job.body.chars().take(EXCERPT_CHARS).collect(),
                pending,
                total: sugg.len(),
            });
        }
    }
    Json(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Undecided,
    Accepted,
    Rejected,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ReviewQuestion {
    #[serde(flatten)]
    pub question: QuestionOut,
    pub decision: Decision,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct JobSuggestions {
    pub job_id: String,
    pub title: String,
    pub body: String,
    pub questions: Vec<ReviewQuestion>,
}

async fn job_suggestions(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Json<JobSuggestions>, ApiError> {
    let &i = state.by_id.get(&id).ok_or(Error::UnknownJob(id.clone()))?;
    let job = &state.jobs[i];
    let questions = state.suggestions[i]
        .iter()
        .map(|r| {
            let key = (
                job.id.clone(),
                r.question.template,
                r.question.parameter.clone(),
            );
            let decision = match state.decision(&key) {
                None => Decision::Undecided,
                Some(FeedbackLabel::Accepted) => Decision::Accepted,
                Some(FeedbackLabel::Rejected) => Decision::Rejected,
            };
            ReviewQuestion {
                question: r.into(),
                decision,
            }
        })
        .collect();
    Ok(Json(JobSuggestions {
        job_id: job.id.clone(),
        title: job.title.clone(),
        body: job.body.clone(),
        questions,
    }))
}
