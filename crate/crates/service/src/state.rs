use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use leakscope_core::activesim::VenueDataset;
use leakscope_core::corpus::select_venue_categories;
use leakscope_core::ensemble::{fit_adaboost, gini_importance, BoostParams, BoostedEnsemble, FeatureImportance};
use leakscope_core::infoscore::{informativeness, InfoParams, ScoreBreakdown};
use leakscope_core::textproc::{tokenize, CurationPolicy, TermVector, TfIdfModel};
use leakscope_core::Corpus;
use serde::Serialize;

use crate::error::ApiError;

/// A fitted venue-inference task whose feature importance drives relevance.
#[derive(Debug, Clone)]
pub struct VenueTask {
    pub ensemble: BoostedEnsemble,
    pub importance: FeatureImportance,
    pub visitors: usize,
}

impl VenueTask {
    pub fn new(ensemble: BoostedEnsemble, visitors: usize) -> Self {
        let importance = gini_importance(&ensemble);
        VenueTask {
            ensemble,
            importance,
            visitors,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ShareRecord {
    pub timestamp: u64,
    pub text: String,
    pub breakdown: ScoreBreakdown,
}

#[derive(Debug, Clone)]
pub struct Session {
    pub session_id: String,
    pub venue_task: String,
    pub params: InfoParams,
    pub imported_user: Option<String>,
    pub seen_counts: TermVector,
    pub history: Vec<ShareRecord>,
}

/// Everything the handlers share: the feature space, the loaded tasks,
/// importable user timelines and the live sessions.
pub struct AppState {
    pub model: TfIdfModel,
    pub policy: CurationPolicy,
    pub tasks: BTreeMap<String, VenueTask>,
    /// Full text-timeline counts of corpus users available for import.
    pub users: HashMap<String, TermVector>,
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
}

impl AppState {
    pub fn new(
        model: TfIdfModel,
        policy: CurationPolicy,
        tasks: BTreeMap<String, VenueTask>,
        users: HashMap<String, TermVector>,
    ) -> Self {
        AppState {
            model,
            policy,
            tasks,
            users,
            sessions: RwLock::new(HashMap::new()),
        }
    }

    /// Fits one ensemble per venue on every user's full timeline. With no
    /// explicit venues, the 25%-35% visitor band is used.
    pub fn from_corpus(corpus: &Corpus, venues: &[String], boost: BoostParams) -> leakscope_core::Result<Self> {
        let policy = CurationPolicy::curated();
        let dataset = VenueDataset::build(corpus, &policy)?;
        let venues = if venues.is_empty() {
            select_venue_categories(&dataset.labels, 0.25, 0.35)
        } else {
            venues.to_vec()
        };
        let x = dataset.features();
        let mut tasks = BTreeMap::new();
        for venue in venues {
            let y = dataset.labels_for(&venue);
            let visitors = y.iter().filter(|&&v| v).count();
            let ensemble = fit_adaboost(&x, &y, boost)?;
            tasks.insert(venue, VenueTask::new(ensemble, visitors));
        }
        let mut users: HashMap<String, TermVector> = corpus.user_ids().map(|u| (u.to_owned(), TermVector::new())).collect();
        for u in &dataset.users {
            users.insert(u.user_id.clone(), u.full.clone());
        }
        Ok(AppState::new(dataset.model, policy, tasks, users))
    }

    pub fn counts(&self, text: &str) -> TermVector {
        self.model.counts(&tokenize(text, &self.policy))
    }

    pub fn create_session(
        &self,
        venue_task: &str,
        params: InfoParams,
        import_user: Option<&str>,
    ) -> Result<String, ApiError> {
        if !self.tasks.contains_key(venue_task) {
            return Err(ApiError::not_found("unknown task"));
        }
        let seen_counts = match import_user {
            Some(u) => self.users.get(u).cloned().ok_or_else(|| ApiError::not_found("unknown user"))?,
            None => TermVector::new(),
        };
        let session_id = uuid::Uuid::new_v4().to_string();
        let session = Session {
            session_id: session_id.clone(),
            venue_task: venue_task.to_owned(),
            params,
            imported_user: import_user.map(str::to_owned),
            seen_counts,
            history: Vec::new(),
        };
        self.sessions
            .write()
            .expect("session map poisoned")
            .insert(session_id.clone(), Arc::new(Mutex::new(session)));
        Ok(session_id)
    }

    pub fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        self.sessions
            .read()
            .expect("session map poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found("unknown session"))
    }

    fn breakdown(&self, session: &Session, counts: &TermVector) -> Result<ScoreBreakdown, ApiError> {
        let task = &self.tasks[&session.venue_task];
        let mut b = informativeness(counts, &session.seen_counts, &task.importance, &session.params)
            .map_err(|_| ApiError::unscoreable())?;
        b.label_terms(self.model.vocab());
        Ok(b)
    }

    pub fn score(&self, id: &str, text: &str) -> Result<ScoreBreakdown, ApiError> {
        let counts = self.counts(text);
        let session = self.session(id)?;
        let guard = session.lock().expect("session poisoned");
        self.breakdown(&guard, &counts)
    }

    /// Scores against the current state, then folds the text into it.
    pub fn share(&self, id: &str, text: &str) -> Result<ScoreBreakdown, ApiError> {
        let counts = self.counts(text);
        let session = self.session(id)?;
        let mut guard = session.lock().expect("session poisoned");
        let breakdown = self.breakdown(&guard, &counts)?;
        guard.seen_counts.add_assign(&counts);
        guard.history.push(ShareRecord {
            timestamp: now(),
            text: text.to_owned(),
            breakdown: breakdown.clone(),
        });
        Ok(breakdown)
    }

    pub fn summary(&self, id: &str) -> Result<SessionSummary, ApiError> {
        let session = self.session(id)?;
        let s = session.lock().expect("session poisoned");
        Ok(SessionSummary::of(&s))
    }

    /// Every session with its full seen counts, for the shutdown snapshot.
    pub fn snapshot(&self) -> serde_json::Value {
        let sessions = self.sessions.read().expect("session map poisoned");
        let mut ids: Vec<&String> = sessions.keys().collect();
        ids.sort();
        let list: Vec<serde_json::Value> = ids
            .into_iter()
            .map(|id| {
                let s = sessions[id].lock().expect("session poisoned");
                serde_json::json!({
                    "summary": SessionSummary::of(&s),
                    "seen_counts": s.seen_counts,
                    "history": s.history,
                })
            })
            .collect();
        serde_json::json!({ "sessions": list })
    }
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

#[derive(Debug, Clone, Serialize)]
pub struct HistoryEntry {
    pub timestamp: u64,
    pub text: String,
    pub novelty: f64,
    pub relevance: f64,
    pub informativeness: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SessionSummary {
    pub session_id: String,
    pub venue_task: String,
    pub lambda: f64,
    pub alpha: f64,
    pub imported_user: Option<String>,
    pub share_count: usize,
    /// Distinct terms in the seen timeline.
    pub seen_terms: usize,
    /// Total term occurrences in the seen timeline.
    pub seen_total: u64,
    pub history: Vec<HistoryEntry>,
}

impl SessionSummary {
    fn of(s: &Session) -> Self {
        SessionSummary {
            session_id: s.session_id.clone(),
            venue_task: s.venue_task.clone(),
            lambda: s.params.lambda(),
            alpha: s.params.alpha(),
            imported_user: s.imported_user.clone(),
            share_count: s.history.len(),
            seen_terms: s.seen_counts.nnz(),
            seen_total: s.seen_counts.total(),
            history: s
                .history
                .iter()
                .map(|h| HistoryEntry {
                    timestamp: h.timestamp,
                    text: h.text.clone(),
                    novelty: h.breakdown.novelty,
                    relevance: h.breakdown.relevance,
                    informativeness: h.breakdown.informativeness,
                })
                .collect(),
        }
    }
}
